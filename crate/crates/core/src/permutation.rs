//! Membership in the class of tensors that become Z-tensors after reordering
//! their mode-1 slices, decided by bipartite matching.

use crate::tensor::Tensor;

/// Compatibility table: `table[i][j]` is true when slice `j` can sit at
/// position `i` in a Z-tensor, i.e. every positive entry `a_{j t}` of the
/// slice has trailing tuple `t = (i, ..., i)`.
pub fn compatibility(a: &Tensor) -> Vec<Vec<bool>> {
    let n = a.dim();
    let mut table = vec![vec![true; n]; n];
    for j in 0..n {
        // the only position slice j may occupy, if any positive entry pins it
        let mut pinned: Option<Option<usize>> = None;
        for (idx, v) in a.slice_entries(j) {
            if v <= 0.0 {
                continue;
            }
            let tail = &idx[1..];
            let here = tail.iter().all(|&t| t == tail[0]).then_some(tail[0]);
            pinned = match pinned {
                None => Some(here),
                Some(prev) if prev == here => Some(prev),
                Some(_) => Some(None),
            };
        }
        if let Some(pos) = pinned {
            for (i, row) in table.iter_mut().enumerate() {
                row[j] = pos == Some(i);
            }
        }
    }
    table
}

/// Finds the lexicographically smallest permutation `perm` such that the
/// tensor whose slice `i` is slice `perm[i]` of `a` is a Z-tensor, or `None`
/// if no such permutation exists.
pub fn find_z_permutation(a: &Tensor) -> Option<Vec<usize>> {
    let table = compatibility(a);
    let n = table.len();
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for i in 0..n {
        let choice = (0..n).find(|&j| {
            if used[j] || !table[i][j] {
                return false;
            }
            used[j] = true;
            let ok = has_perfect_matching(&table, i + 1, &used);
            used[j] = false;
            ok
        })?;
        used[choice] = true;
        perm.push(choice);
    }
    Some(perm)
}

/// Whether positions `from..n` can be matched to the slices not yet `used`.
fn has_perfect_matching(table: &[Vec<bool>], from: usize, used: &[bool]) -> bool {
    let n = table.len();
    // owner[j] = position currently holding slice j
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for i in from..n {
        let mut seen = vec![false; n];
        if !augment(table, i, used, &mut seen, &mut owner) {
            return false;
        }
    }
    true
}

fn augment(
    table: &[Vec<bool>],
    i: usize,
    used: &[bool],
    seen: &mut [bool],
    owner: &mut [Option<usize>],
) -> bool {
    for j in 0..table.len() {
        if used[j] || !table[i][j] || seen[j] {
            continue;
        }
        seen[j] = true;
        let free = match owner[j] {
            None => true,
            Some(k) => augment(table, k, used, seen, owner),
        };
        if free {
            owner[j] = Some(i);
            return true;
        }
    }
    false
}
