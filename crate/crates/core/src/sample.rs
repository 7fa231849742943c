//! Seeded random quantum objects.
//!
//! Every generator is a ChaCha8 stream keyed by `(seed, stream)`, so a
//! trial or restart index can pick an independent, reproducible sequence.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::qmat::{CMatrix, CVector, Channel, Density, Hermitian, PureState};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Entries with independent standard normal real and imaginary parts.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix<f64> {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVector<f64> {
    CVector::from_fn(len, |_, _| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Hilbert–Schmidt (Wishart) state `G G^dagger / tr`, with `G` of shape `d x rank`.
pub fn density<R: Rng + ?Sized>(rng: &mut R, dims: &[usize], rank: Option<usize>) -> Density<f64> {
    let d: usize = dims.iter().product();
    let g = gaussian_matrix(rng, d, rank.unwrap_or(d));
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    Density::from_matrix(w / Complex::new(tr, 0.0), dims.to_vec()).expect("Wishart matrices are valid states")
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> PureState<f64> {
    let d = dims.iter().product();
    PureState::normalized(gaussian_vector(rng, d), dims.to_vec()).expect("Gaussian vectors are nonzero")
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix<f64> {
    let qr = gaussian_matrix(rng, d, d).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..d {
        let z = r[(c, c)];
        let n = z.norm();
        let phase = if n > 0.0 { z / n } else { Complex::new(1.0, 0.0) };
        q.column_mut(c).iter_mut().for_each(|x| *x *= phase);
    }
    q
}

/// Gaussian Hermitian matrix.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Hermitian<f64> {
    let g = gaussian_matrix(rng, d, d);
    Hermitian::from_matrix((&g + g.adjoint()) * Complex::new(0.5, 0.0)).expect("symmetrised matrix")
}

/// Random `0 <= Pi <= I` with a Haar eigenbasis and uniform eigenvalues.
pub fn test_operator<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Hermitian<f64> {
    let u = unitary(rng, d);
    let vals: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    let mut scaled = u.clone();
    for (c, &v) in vals.iter().enumerate() {
        scaled.column_mut(c).iter_mut().for_each(|x| *x *= Complex::new(v, 0.0));
    }
    Hermitian::from_matrix(scaled * u.adjoint()).expect("unitary conjugation of a diagonal")
}

/// Channel from an isometry `A -> B (x) E` cut out of a Haar unitary.
pub fn channel<R: Rng + ?Sized>(rng: &mut R, din: usize, dout: usize, env: usize) -> Result<Channel<f64>> {
    let big = (dout * env).max(din);
    let u = unitary(rng, big);
    // isometry rows are indexed (b, e) with e fastest
    let kraus = (0..env)
        .map(|e| CMatrix::from_fn(dout, din, |b, i| u[(b * env + e, i)]))
        .collect();
    Channel::new(kraus, vec![din], vec![dout])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let u = unitary(&mut rng(1, 0), 5);
        let dev = (u.adjoint() * &u - CMatrix::identity(5, 5)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = density(&mut rng(7, 3), &[2], None);
        let b = density(&mut rng(7, 3), &[2], None);
        let c = density(&mut rng(7, 4), &[2], None);
        assert_eq!(a.matrix(), b.matrix());
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn sampled_channels_are_cptp() {
        let mut r = rng(3, 0);
        for (din, dout, env) in [(2, 2, 2), (2, 3, 4), (3, 2, 1)] {
            if dout * env < din {
                continue;
            }
            let ch = channel(&mut r, din, dout, env).unwrap();
            assert_eq!(ch.dim_out(), dout);
        }
    }
}
