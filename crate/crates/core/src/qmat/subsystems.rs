//! Index bookkeeping for operators on composite systems.
//!
//! Flat indices are row-major over the dimension profile: the last subsystem
//! varies fastest.

use crate::error::{domain, Result};

pub(crate) fn check_profile(dims: &[usize], dim: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(domain(format!("invalid dimension profile {dims:?}")));
    }
    let product: usize = dims.iter().product();
    if product != dim {
        return Err(domain(format!(
            "profile {dims:?} has product {product}, operator dimension is {dim}"
        )));
    }
    Ok(())
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(domain(format!("permutation {perm:?} has wrong length, expected {n}")));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(domain(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Checks a list of distinct subsystem indices.
pub(crate) fn check_subset(idx: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &i in idx {
        if i >= n {
            return Err(domain(format!("subsystem index {i} out of range for {n} subsystems")));
        }
        if seen[i] {
            return Err(domain(format!("subsystem index {i} repeated")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Reordering `dims` so that new position `p` holds old subsystem `perm[p]`.
/// Returns the new profile and `map[new_flat] = old_flat`.
pub(crate) fn permutation_map(dims: &[usize], perm: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let old_strides = strides(dims);
    let total: usize = dims.iter().product();
    let mut map = Vec::with_capacity(total);
    let mut digits = vec![0usize; dims.len()];
    for _ in 0..total {
        let old: usize = digits
            .iter()
            .zip(perm)
            .map(|(&d, &p)| d * old_strides[p])
            .sum();
        map.push(old);
        // increment the new multi-index, last position fastest
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < new_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    (new_dims, map)
}

/// For each flat index: (index over the kept subsystems, index over the rest).
pub(crate) fn split_indices(dims: &[usize], keep: &[usize]) -> Vec<(usize, usize)> {
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&k| dims[k]).collect();
    let ks = strides(&keep_dims);
    let rs = strides(&rest_dims);
    let ds = strides(dims);
    let total: usize = dims.iter().product();
    (0..total)
        .map(|f| {
            let digit = |s: usize| (f / ds[s]) % dims[s];
            let k: usize = keep.iter().enumerate().map(|(j, &s)| digit(s) * ks[j]).sum();
            let r: usize = rest.iter().enumerate().map(|(j, &s)| digit(s) * rs[j]).sum();
            (k, r)
        })
        .collect()
}

/// Subsystem order that moves the output of a map acting on `acting` back into place.
///
/// The intermediate layout is `rest ++ outputs`. When the map has as many
/// output subsystems as it consumed, output `j` goes to position `acting[j]`;
/// otherwise the output block is inserted where the first acting subsystem was.
pub(crate) fn restore_order(n_sub: usize, acting: &[usize], n_out: usize) -> Vec<usize> {
    let rest: Vec<usize> = (0..n_sub).filter(|i| !acting.contains(i)).collect();
    let n_rest = rest.len();
    if n_out == acting.len() {
        (0..n_sub)
            .map(|i| match acting.iter().position(|&a| a == i) {
                Some(j) => n_rest + j,
                None => rest.iter().position(|&r| r == i).unwrap(),
            })
            .collect()
    } else {
        let first = *acting.iter().min().unwrap();
        let before = rest.iter().filter(|&&r| r < first).count();
        let mut order: Vec<usize> = (0..before).collect();
        order.extend(n_rest..n_rest + n_out);
        order.extend(before..n_rest);
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strides_are_row_major() {
        assert_eq!(strides(&[2, 3, 4]), vec![12, 4, 1]);
    }

    #[test]
    fn swap_of_two_qubits() {
        let (nd, map) = permutation_map(&[2, 3], &[1, 0]);
        assert_eq!(nd, vec![3, 2]);
        // new index (b, a) = b*2 + a  <-  old (a, b) = a*3 + b
        assert_eq!(map, vec![0, 3, 1, 4, 2, 5]);
    }

    #[test]
    fn restore_order_same_count() {
        // rest = [0, 2], acting = [3, 1] -> tmp layout [0, 2, out(3), out(1)]
        let order = restore_order(4, &[3, 1], 2);
        assert_eq!(order, vec![0, 3, 1, 2]);
    }

    #[test]
    fn restore_order_merging_block() {
        let order = restore_order(3, &[1, 2], 1);
        assert_eq!(order, vec![0, 1]);
    }
}
