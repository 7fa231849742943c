use itertools::Itertools;

use super::hermitian::{matrix_function, CVector, Hermitian, KernelPolicy};
use super::states::{Density, PureState};
use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

/// Subsystem permutation realising a permutation of `copies` equal blocks.
fn block_perm(block_len: usize, order: &[usize]) -> Vec<usize> {
    order
        .iter()
        .flat_map(|&b| b * block_len..(b + 1) * block_len)
        .collect()
}

fn block_len(dims: &[usize], copies: usize) -> Result<usize> {
    if copies == 0 || !dims.len().is_multiple_of(copies) {
        return Err(domain(format!("{} subsystems do not split into {copies} copies", dims.len())));
    }
    let len = dims.len() / copies;
    if dims.chunks(len).any(|c| c != &dims[..len]) {
        return Err(domain("copies have different dimension profiles"));
    }
    Ok(len)
}

/// Uniform average of `x` over all permutations of its `copies` blocks.
pub fn symmetrize_operator<T: Scalar>(x: &Hermitian<T>, copies: usize) -> Result<Hermitian<T>> {
    let len = block_len(x.dims(), copies)?;
    let mut acc = Hermitian::zeros(x.dims().to_vec());
    let mut count = 0usize;
    for order in (0..copies).permutations(copies) {
        acc = &acc + &x.permute(&block_perm(len, &order))?;
        count += 1;
    }
    Ok(acc.scale(T::one() / T::of(count as f64)))
}

pub fn symmetrize<T: Scalar>(psi: &Density<T>, copies: usize) -> Result<Density<T>> {
    Density::new(symmetrize_operator(psi.op(), copies)?)
}

/// Largest deviation of `x` from its images under block permutations.
pub fn permutation_deviation<T: Scalar>(x: &Hermitian<T>, copies: usize) -> Result<T> {
    let len = block_len(x.dims(), copies)?;
    let mut worst = T::zero();
    for order in (0..copies).permutations(copies) {
        worst = worst.max(x.permute(&block_perm(len, &order))?.max_abs_diff(x));
    }
    Ok(worst)
}

pub fn is_permutation_invariant<T: Scalar>(x: &Hermitian<T>, copies: usize, tol: T) -> Result<bool> {
    Ok(permutation_deviation(x, copies)? <= tol)
}

/// `<phi| P |phi>` for the permutation `order` of the vector's blocks.
pub fn permutation_expectation<T: Scalar>(phi: &PureState<T>, copies: usize, order: &[usize]) -> Result<T> {
    let len = block_len(phi.dims(), copies)?;
    let moved = phi.permute(&block_perm(len, order))?;
    Ok(phi.inner(&moved).re)
}

/// Canonical purification `(sqrt(omega) (x) I) sum_i |i>|i>` of a
/// permutation-invariant state on `copies` blocks.
///
/// The mirror register is split like `omega` and interleaved, so copy `i`
/// of the result is `[mirror block i, original block i]`. Permuting whole
/// copies leaves the vector invariant.
pub fn symmetric_purification<T: Scalar>(omega: &Density<T>, copies: usize) -> Result<PureState<T>> {
    let len = block_len(omega.dims(), copies)?;
    let dev = permutation_deviation(omega.op(), copies)?;
    if dev > T::of(1e-9) {
        return Err(Error::Precondition(format!(
            "state is not permutation invariant (deviation {dev})"
        )));
    }
    let root = matrix_function(omega.op(), |l| l.max(T::zero()).sqrt(), KernelPolicy::MapZeroToZero)?;
    let d = omega.dim();
    let m = root.matrix();
    // component (x, i) of sum_i sqrt(omega)|i> (x) |i>
    let v = CVector::from_fn(d * d, |f, _| m[(f / d, f % d)]);
    let mut dims = omega.dims().to_vec();
    dims.extend_from_slice(omega.dims());
    let joint = PureState::normalized(v, dims)?;
    let n = omega.dims().len();
    let perm: Vec<usize> = (0..copies)
        .flat_map(|c| {
            let mirror = (n + c * len)..(n + (c + 1) * len);
            let orig = (c * len)..((c + 1) * len);
            mirror.chain(orig)
        })
        .collect();
    joint.permute(&perm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(i: usize) -> Density<f64> {
        Density::basis(i, vec![2]).unwrap()
    }

    #[test]
    fn two_element_orbit() {
        let psi = basis(0).tensor(&basis(1));
        let s = symmetrize(&psi, 2).unwrap();
        let expected = Density::diagonal(&[0.0, 0.5, 0.5, 0.0], vec![2, 2]).unwrap();
        assert!(s.op().max_abs_diff(expected.op()) < 1e-15);
    }

    #[test]
    fn maximally_mixed_purification_is_swap_symmetric() {
        let omega = Density::<f64>::maximally_mixed(vec![2, 2]);
        let phi = symmetric_purification(&omega, 2).unwrap();
        assert_eq!(phi.dims(), &[2, 2, 2, 2]);
        let swap = permutation_expectation(&phi, 2, &[1, 0]).unwrap();
        assert!((swap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn purification_marginal() {
        let omega = symmetrize(&basis(0).tensor(&Density::diagonal(&[0.3, 0.7], vec![2]).unwrap()), 2).unwrap();
        let phi = symmetric_purification(&omega, 2).unwrap();
        let marg = phi.to_density().partial_trace(&[1, 3]).unwrap();
        assert!(marg.op().max_abs_diff(omega.op()) < 1e-12);
    }

    #[test]
    fn rejects_asymmetric_state() {
        let psi = basis(0).tensor(&basis(1));
        assert!(matches!(symmetric_purification(&psi, 2), Err(Error::Precondition(_))));
    }
}
