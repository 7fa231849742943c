use clap::{Args, ValueEnum};

use chandisc::chandiv::{regularized_estimate, DivergenceKind, OptimizerConfig};
use chandisc::discrim::{exponent_report, stein_sequence, SteinClass};
use chandisc::sample;
use chandisc::verify::{self, CheckReport, UbdGrid};
use chandisc::QuantumChannel;

use crate::io::{read_channel, read_state};
use crate::table::{witness_hash, Cell, Table};
use crate::{CliError, RunConfig};

/// Tables to print and whether the run found nothing to report as a violation.
pub type Outcome = Result<(Vec<Table>, bool), CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Umegaki,
    Petz,
    Sandwiched,
    Dmax,
    Hypothesis,
}

fn kind_of(kind: Kind, alpha: Option<f64>, epsilon: Option<f64>) -> Result<DivergenceKind, CliError> {
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for this kind")));
    let k = match kind {
        Kind::Umegaki => DivergenceKind::Umegaki,
        Kind::Petz => DivergenceKind::Petz(need(alpha, "alpha")?),
        Kind::Sandwiched => DivergenceKind::Sandwiched(need(alpha, "alpha")?),
        Kind::Dmax => DivergenceKind::Dmax,
        Kind::Hypothesis => DivergenceKind::Hypothesis(need(epsilon, "epsilon")?),
    };
    k.validate()?;
    Ok(k)
}

fn optimizer(run: &RunConfig, restarts: usize) -> Result<OptimizerConfig, CliError> {
    let cfg = OptimizerConfig { restarts, ..OptimizerConfig::with_seed(run.seed) };
    cfg.validate()?;
    Ok(cfg)
}

fn opt(x: Option<f64>) -> Cell {
    x.map_or(Cell::Empty, Cell::Num)
}

#[derive(Debug, Args)]
pub struct DivergenceArgs {
    /// State file or inline JSON.
    #[arg(long)]
    rho: String,
    #[arg(long)]
    sigma: String,
    #[arg(long, value_enum, default_value_t = Kind::Umegaki)]
    kind: Kind,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
}

pub fn divergence(a: &DivergenceArgs, _run: &RunConfig) -> Outcome {
    let kind = kind_of(a.kind, a.alpha, a.epsilon)?;
    let rho = read_state(&a.rho)?;
    let sigma = read_state(&a.sigma)?;
    let d = kind.evaluate(&rho, &sigma)?;
    let mut t = Table::new("divergence", vec!["kind", "alpha", "epsilon", "value", "support_ok"]);
    t.push(vec![
        Cell::Text(kind.name()),
        opt(a.alpha),
        opt(a.epsilon),
        Cell::Num(d.to_scalar()),
        Cell::Bool(d.support_ok),
    ]);
    Ok((vec![t], true))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stein {
    Pro,
    Coh,
}

#[derive(Debug, Args)]
pub struct ChandivArgs {
    /// Channel file (ChannelSpec JSON) or inline JSON.
    #[arg(long)]
    n: String,
    #[arg(long)]
    m: String,
    #[arg(long, value_enum, default_value_t = Kind::Umegaki)]
    kind: Kind,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 1)]
    nmax: usize,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Report finite-copy Stein rates of a strategy class instead (uses --epsilon).
    #[arg(long, value_enum)]
    stein: Option<Stein>,
}

fn channels(n: &str, m: &str) -> Result<(QuantumChannel, QuantumChannel), CliError> {
    Ok((read_channel(n)?, read_channel(m)?))
}

pub fn chandiv(a: &ChandivArgs, run: &RunConfig) -> Outcome {
    if a.nmax == 0 {
        return Err(CliError::Usage("--nmax must be at least 1".into()));
    }
    let cfg = optimizer(run, a.restarts)?;
    let (n, m) = channels(&a.n, &a.m)?;
    if let Some(class) = a.stein {
        let eps = a.epsilon.ok_or_else(|| CliError::Usage("--stein needs --epsilon".into()))?;
        let class = match class {
            Stein::Pro => SteinClass::Pro,
            Stein::Coh => SteinClass::Coh,
        };
        let seq = stein_sequence(&n, &m, eps, a.nmax, class, &cfg)?;
        let mut t = Table::new("stein", vec!["k", "rate", "witness_hash"]);
        for p in seq {
            t.push(vec![Cell::Int(p.copies as u64), Cell::Num(p.rate), Cell::Text(witness_hash(&p.witness))]);
        }
        return Ok((vec![t], true));
    }
    let kind = kind_of(a.kind, a.alpha, a.epsilon)?;
    let points = regularized_estimate(&n, &m, kind, a.nmax, &cfg)?;
    let mut t = Table::new("chandiv", vec!["kind", "k", "value", "witness_hash"]);
    for p in points {
        t.push(vec![
            Cell::Text(kind.name()),
            Cell::Int(p.copies as u64),
            Cell::Num(p.value.to_scalar()),
            Cell::Text(witness_hash(&p.witness)),
        ]);
    }
    Ok((vec![t], true))
}

#[derive(Debug, Args)]
pub struct ExponentsArgs {
    #[arg(long)]
    n: String,
    #[arg(long)]
    m: String,
    #[arg(long)]
    rate: f64,
    #[arg(long, default_value_t = 1)]
    nmax: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
}

pub fn exponents(a: &ExponentsArgs, run: &RunConfig) -> Outcome {
    if !(a.rate > 0.0 && a.rate.is_finite()) {
        return Err(CliError::Usage(format!("--rate must be positive, got {}", a.rate)));
    }
    let cfg = optimizer(run, a.restarts)?;
    let (n, m) = channels(&a.n, &a.m)?;
    let rep = exponent_report(&n, &m, a.rate, a.nmax, &cfg)?;
    let mut ex = Table::new("exponents", vec!["k", "exponent", "alpha", "value", "witness_hash"]);
    let mut curves = Table::new("curves", vec!["k", "curve", "alpha", "value", "witness_hash"]);
    let hash = |w: &Option<chandisc::PureStateVector>| Cell::Text(w.as_ref().map(witness_hash).unwrap_or_default());
    for row in &rep.rows {
        let k = Cell::Int(row.copies as u64);
        ex.push(vec![k.clone(), Cell::Text("sc".into()), Cell::Num(row.sc.alpha), Cell::Num(row.sc.value.to_f64()), hash(&row.sc_witness)]);
        ex.push(vec![k.clone(), Cell::Text("err".into()), Cell::Num(row.err.alpha), Cell::Num(row.err.value.to_f64()), hash(&row.err_witness)]);
        for (name, pts) in [("sandwiched", &row.sandwiched), ("petz", &row.petz)] {
            for p in pts {
                curves.push(vec![
                    k.clone(),
                    Cell::Text(name.into()),
                    Cell::Num(p.alpha),
                    Cell::Num(p.value),
                    Cell::Text(witness_hash(&p.witness)),
                ]);
            }
        }
    }
    Ok((vec![ex, curves], true))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Twomat,
    Boundsdmin,
    DhSandwiched,
    Ubd,
    Symmetrization,
    Infnorm,
    Glt,
    Order,
    Continuity,
    Dpi,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Trials per check (defaults per check).
    #[arg(long)]
    trials: Option<usize>,
    /// Matrix dimension of the state-level checks.
    #[arg(long, default_value_t = 4)]
    dim: usize,
    /// Dimension of the variance-bound counterexample.
    #[arg(long, default_value_t = 64)]
    d: usize,
    /// Copies for the tail bound and the output norm bound.
    #[arg(long, default_value_t = 3)]
    nmax: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Channels for the channel checks; random qubit channels from --seed otherwise.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    m: Option<String>,
}

fn report_row(r: &CheckReport) -> Vec<Cell> {
    vec![
        Cell::Text(r.name.clone()),
        Cell::Int(r.trials as u64),
        Cell::Int(r.violations as u64),
        Cell::Num(r.worst_margin),
        Cell::Int(r.seed),
        Cell::Bool(r.passed()),
        Cell::Json(r.witness.clone()),
    ]
}

pub fn verify(a: &VerifyArgs, run: &RunConfig) -> Outcome {
    let seed = run.seed;
    let tol = |default: f64| run.tol.unwrap_or(default);
    let trials = |default: usize| a.trials.unwrap_or(default);
    let wants = |s: Suite| a.suite == Suite::All || a.suite == s;
    let pair = || -> Result<(QuantumChannel, QuantumChannel), CliError> {
        match (&a.n, &a.m) {
            (Some(n), Some(m)) => channels(n, m),
            (None, None) => {
                let rng = &mut sample::rng(seed, u64::MAX);
                Ok((sample::channel(rng, 2, 2, 4)?, sample::channel(rng, 2, 2, 4)?))
            }
            _ => Err(CliError::Usage("give both --n and --m or neither".into())),
        }
    };

    let mut reports: Vec<CheckReport> = Vec::new();
    if wants(Suite::Twomat) {
        reports.push(verify::check_twomat(trials(10_000), a.dim.max(8), seed, tol(verify::DEFAULT_TOL))?);
    }
    if wants(Suite::Boundsdmin) {
        reports.push(verify::check_boundsdmin(trials(10_000), a.dim, seed, tol(verify::DEFAULT_TOL))?);
    }
    if wants(Suite::DhSandwiched) {
        reports.push(verify::check_dh_sandwiched(trials(10_000), a.dim, seed, tol(verify::DEFAULT_TOL))?);
    }
    if wants(Suite::Ubd) {
        reports.push(verify::check_ubd_sampled(2, a.nmax, &UbdGrid::default(), seed, tol(verify::DEFAULT_TOL))?);
    }
    if wants(Suite::Continuity) {
        reports.push(verify::check_continuity(trials(500), a.dim, seed, tol(verify::DEFAULT_TOL))?);
    }
    if wants(Suite::Dpi) {
        reports.extend(verify::check_dpi(trials(1000), 6, seed, tol(1e-7))?);
    }
    if wants(Suite::Symmetrization) || wants(Suite::Infnorm) || wants(Suite::Order) {
        let (n, m) = pair()?;
        if wants(Suite::Symmetrization) {
            reports.push(verify::check_symmetrization(&n, &m, a.epsilon, trials(200), seed, tol(1e-8))?);
        }
        if wants(Suite::Infnorm) {
            reports.push(verify::check_infnorm_bound(&n, a.nmax, trials(200), seed, tol(verify::DEFAULT_TOL))?);
        }
        if wants(Suite::Order) {
            let cfg = optimizer(run, a.restarts)?;
            reports.push(verify::check_order_relation(&n, &m, &cfg, tol(1e-5))?);
        }
    }

    let mut tables = Vec::new();
    if !reports.is_empty() {
        let mut t = Table::new(
            "checks",
            vec!["name", "trials", "violations", "worst_margin", "seed", "passed", "witness"],
        );
        for r in &reports {
            t.push(report_row(r));
        }
        tables.push(t);
    }
    if wants(Suite::Glt) {
        // the counterexample exceeding the bound is the expected outcome, not a failed check
        let rec = verify::counterexample_glt(a.d)?;
        let mut t = Table::new("glt", vec!["d", "lhs", "rhs", "violated", "minimal_violating_d"]);
        let min_d = verify::minimal_violating_dimension(1024)?;
        t.push(vec![
            Cell::Int(rec.d as u64),
            Cell::Num(rec.lhs),
            Cell::Num(rec.rhs),
            Cell::Bool(rec.violated),
            min_d.map_or(Cell::Empty, |d| Cell::Int(d as u64)),
        ]);
        tables.push(t);
    }
    let ok = reports.iter().all(CheckReport::passed);
    Ok((tables, ok))
}
