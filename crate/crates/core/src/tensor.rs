//! Order-m, dimension-n real tensors stored as a sorted coordinate list.
//!
//! Indices are 0-based in memory; file formats translate to and from 1-based
//! indices. Entries are kept in lexicographic order of their index tuples and
//! every product sums over them in that order, so results are bit-reproducible.
//! Tensors are never symmetrized implicitly.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::Serialize;

use crate::error::{check_dim, Error, Result};

/// Largest `n^m` for which [`Tensor::to_dense`] will allocate.
pub const DENSE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    order: usize,
    dim: usize,
    // nnz * order indices, row-major per entry
    coords: Vec<usize>,
    values: Vec<f64>,
    // row_start[i]..row_start[i + 1] are the entries whose first index is i
    row_start: Vec<usize>,
}

impl Tensor {
    /// Builds a tensor from 0-based `(index tuple, value)` pairs.
    ///
    /// Duplicate tuples are rejected rather than summed. Exact zeros are not
    /// stored.
    pub fn from_entries<I>(order: usize, dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        check_shape(order, dim)?;
        let mut list: Vec<(Vec<usize>, f64)> = Vec::new();
        for (idx, v) in entries {
            if idx.len() != order {
                return Err(Error::Domain(format!(
                    "index tuple has {} components, tensor order is {order}",
                    idx.len()
                )));
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::Domain(format!(
                    "index {} out of range 1..={dim}",
                    bad + 1
                )));
            }
            if !v.is_finite() {
                return Err(Error::Domain(format!("non-finite entry {v}")));
            }
            list.push((idx, v));
        }
        list.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Domain(format!(
                "duplicate index tuple {}",
                one_based(&w[0].0)
            )));
        }
        Ok(Self::from_sorted(
            order,
            dim,
            list.into_iter().filter(|(_, v)| *v != 0.0),
        ))
    }

    // Caller guarantees sorted, unique, in-range tuples.
    fn from_sorted<I>(order: usize, dim: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut coords = Vec::new();
        let mut values = Vec::new();
        let mut row_start = vec![0; dim + 1];
        for (idx, v) in entries {
            row_start[idx[0] + 1] += 1;
            coords.extend_from_slice(&idx);
            values.push(v);
        }
        for i in 0..dim {
            row_start[i + 1] += row_start[i];
        }
        Tensor {
            order,
            dim,
            coords,
            values,
            row_start,
        }
    }

    fn from_map(order: usize, dim: usize, map: BTreeMap<Vec<usize>, f64>) -> Self {
        Self::from_sorted(order, dim, map.into_iter().filter(|(_, v)| *v != 0.0))
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        check_shape(order, dim)?;
        Ok(Self::from_sorted(order, dim, std::iter::empty()))
    }

    /// The identity tensor: ones on the diagonal `(i, ..., i)`, zeros elsewhere.
    pub fn identity(order: usize, dim: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::Domain(format!(
                "identity tensor needs order >= 2, got {order}"
            )));
        }
        check_shape(order, dim)?;
        Ok(Self::from_sorted(
            order,
            dim,
            (0..dim).map(|i| (vec![i; order], 1.0)),
        ))
    }

    /// The tensor with every entry equal to one.
    pub fn all_ones(order: usize, dim: usize) -> Result<Self> {
        check_shape(order, dim)?;
        check_dense_size(order, dim)?;
        Ok(Self::from_sorted(
            order,
            dim,
            MultiIndex::new(order, dim).map(|idx| (idx, 1.0)),
        ))
    }

    /// Builds a tensor from a dense row-major buffer of length `dim^order`.
    pub fn from_dense(order: usize, dim: usize, data: &[f64]) -> Result<Self> {
        check_shape(order, dim)?;
        let len = check_dense_size(order, dim)?;
        check_dim(len, data.len())?;
        Self::from_entries(
            order,
            dim,
            MultiIndex::new(order, dim).zip(data.iter().copied()),
        )
    }

    /// The order-`k` rank-one tensor `x^k` with entries `x_{i1} ... x_{ik}`.
    pub fn rank_one(x: &[f64], k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("rank-one order must be >= 1".into()));
        }
        check_shape(k, x.len())?;
        check_dense_size(k, x.len())?;
        let entries = MultiIndex::new(k, x.len())
            .map(|idx| {
                let v = idx.iter().map(|&i| x[i]).product::<f64>();
                (idx, v)
            })
            .filter(|(_, v)| *v != 0.0);
        Ok(Self::from_sorted(k, x.len(), entries))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries in lexicographic order of their (0-based) index tuples.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.coords
            .chunks_exact(self.order)
            .zip(self.values.iter().copied())
    }

    fn entry_range(&self, range: Range<usize>) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        let o = self.order;
        self.coords[range.start * o..range.end * o]
            .chunks_exact(o)
            .zip(self.values[range].iter().copied())
    }

    /// Entries of the mode-1 slice `i` (first index equal to `i`).
    pub fn slice_entries(&self, i: usize) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.entry_range(self.row_start[i]..self.row_start[i + 1])
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        if idx.len() != self.order || idx.first().is_none_or(|&i| i >= self.dim) {
            return 0.0;
        }
        let o = self.order;
        let (mut lo, mut hi) = (self.row_start[idx[0]], self.row_start[idx[0] + 1]);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.coords[mid * o..(mid + 1) * o].cmp(idx) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return self.values[mid],
            }
        }
        0.0
    }

    /// Row-major dense copy; refuses when `dim^order` exceeds [`DENSE_LIMIT`].
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        let len = check_dense_size(self.order, self.dim)?;
        let mut out = vec![0.0; len];
        for (idx, v) in self.entries() {
            let flat = idx.iter().fold(0, |acc, &i| acc * self.dim + i);
            out[flat] = v;
        }
        Ok(out)
    }

    /// Value of the diagonal entry `(i, ..., i)`.
    pub fn diagonal(&self, i: usize) -> f64 {
        self.get(&vec![i; self.order])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// `factor * self + shift * I`, with `I` the identity tensor.
    pub fn scale_and_shift(&self, factor: f64, shift: f64) -> Tensor {
        let mut map: BTreeMap<Vec<usize>, f64> = self
            .entries()
            .map(|(idx, v)| (idx.to_vec(), factor * v))
            .collect();
        if shift != 0.0 {
            for i in 0..self.dim {
                *map.entry(vec![i; self.order]).or_insert(0.0) += shift;
            }
        }
        Tensor::from_map(self.order, self.dim, map)
    }

    /// Sum over mode-1 slice `i` of `a_{i i2..im} x_{i2} ... x_{im}`.
    pub fn apply_row(&self, i: usize, x: &[f64]) -> f64 {
        self.slice_entries(i)
            .map(|(idx, v)| idx[1..].iter().fold(v, |acc, &j| acc * x[j]))
            .sum()
    }

    /// `A x^{m-1}`: component `i` is the sum of `a_{i i2..im} x_{i2} ... x_{im}`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        Ok((0..self.dim).map(|i| self.apply_row(i, x)).collect())
    }

    /// `A x^{m-k}`: contracts the trailing `m - k` modes with `x`, leaving an
    /// order-`k` tensor.
    pub fn contract(&self, x: &[f64], k: usize) -> Result<Tensor> {
        check_dim(self.dim, x.len())?;
        if k == 0 || k > self.order {
            return Err(Error::Domain(format!(
                "contraction order {k} outside 1..={}",
                self.order
            )));
        }
        if k == self.order {
            return Ok(self.clone());
        }
        let mut map: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (idx, v) in self.entries() {
            let w = idx[k..].iter().fold(v, |acc, &j| acc * x[j]);
            *map.entry(idx[..k].to_vec()).or_insert(0.0) += w;
        }
        Ok(Tensor::from_map(k, self.dim, map))
    }

    /// Jacobian of `x -> A x^{m-1}`: entry `(i, j)` sums, over every trailing
    /// slot holding `j`, the entry times the product of the other trailing
    /// coordinates.
    pub fn gradient(&self, x: &[f64]) -> Result<Matrix> {
        check_dim(self.dim, x.len())?;
        let n = self.dim;
        let mut jac = Matrix::zeros(n, n);
        for (idx, v) in self.entries() {
            let tail = &idx[1..];
            for slot in 0..tail.len() {
                let w = tail
                    .iter()
                    .enumerate()
                    .filter(|&(l, _)| l != slot)
                    .fold(v, |acc, (_, &j)| acc * x[j]);
                jac.data[idx[0] * n + tail[slot]] += w;
            }
        }
        Ok(jac)
    }

    /// Principal subtensor with every index restricted to `support`
    /// (0-based, strictly increasing). Indices are renumbered `0..support.len()`.
    pub fn principal_subtensor(&self, support: &[usize]) -> Result<Tensor> {
        if support.is_empty() {
            return Err(Error::Domain("empty support".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("support must be strictly increasing".into()));
        }
        if support.last().is_some_and(|&i| i >= self.dim) {
            return Err(Error::Domain("support index out of range".into()));
        }
        let mut pos = vec![usize::MAX; self.dim];
        for (k, &i) in support.iter().enumerate() {
            pos[i] = k;
        }
        // renumbering is monotone, so lexicographic order is preserved
        let entries = self
            .entries()
            .filter(|(idx, _)| idx.iter().all(|&i| pos[i] != usize::MAX))
            .map(|(idx, v)| (idx.iter().map(|&i| pos[i]).collect::<Vec<_>>(), v))
            .collect::<Vec<_>>();
        Ok(Tensor::from_sorted(self.order, support.len(), entries))
    }

    /// Reorders mode-1 slices: slice `i` of the result is slice `perm[i]` of
    /// `self`. Equivalent to `matrix_product` with the permutation matrix
    /// having ones at `(i, perm[i])`.
    pub fn permute_slices(&self, perm: &[usize]) -> Result<Tensor> {
        check_dim(self.dim, perm.len())?;
        if !is_permutation(perm) {
            return Err(Error::Domain("not a permutation".into()));
        }
        let mut entries = Vec::with_capacity(self.nnz());
        for (i, &src) in perm.iter().enumerate() {
            for (idx, v) in self.slice_entries(src) {
                let mut t = idx.to_vec();
                t[0] = i;
                entries.push((t, v));
            }
        }
        Ok(Tensor::from_sorted(self.order, self.dim, entries))
    }
}

/// `P A`: mode-1 slice `i1` of the result is `sum_i p_{i1 i} A_i`.
pub fn matrix_product(p: &Matrix, a: &Tensor) -> Result<Tensor> {
    check_dim(a.dim, p.rows)?;
    check_dim(a.dim, p.cols)?;
    let n = a.dim;
    let mut map: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (idx, v) in a.entries() {
        for i1 in 0..n {
            let w = p.get(i1, idx[0]);
            if w != 0.0 {
                let mut t = idx.to_vec();
                t[0] = i1;
                *map.entry(t).or_insert(0.0) += w * v;
            }
        }
    }
    Ok(Tensor::from_map(a.order, n, map))
}

/// Componentwise power `x^[p]`. Fractional exponents require `x >= 0`.
pub fn componentwise_power(x: &[f64], p: f64) -> Result<Vec<f64>> {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        return Ok(x.iter().map(|v| v.powi(p as i32)).collect());
    }
    if let Some(&v) = x.iter().find(|&&v| v < 0.0) {
        return Err(Error::Domain(format!(
            "negative component {v} raised to fractional power {p}"
        )));
    }
    Ok(x.iter().map(|&v| fractional_power(v, p)).collect())
}

fn fractional_power(v: f64, p: f64) -> f64 {
    if p == 0.5 {
        v.sqrt()
    } else if p == 1.0 / 3.0 {
        v.cbrt()
    } else {
        v.powf(p)
    }
}

/// `v^(1/k)` for `v >= 0`, using correctly rounded roots where available.
pub(crate) fn root(v: f64, k: usize) -> f64 {
    match k {
        1 => v,
        2 => v.sqrt(),
        3 => v.cbrt(),
        _ => v.powf(1.0 / k as f64),
    }
}

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(rows * cols, data.len())?;
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Permutation matrix with a one at `(i, perm[i])` for every row `i`.
    pub fn from_permutation(perm: &[usize]) -> Result<Self> {
        if !is_permutation(perm) {
            return Err(Error::Domain("not a permutation".into()));
        }
        let n = perm.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            m.data[i * n + j] = 1.0;
        }
        Ok(m)
    }

    /// Recovers `perm` if this is a 0/1 matrix with exactly one 1 per row and
    /// column.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut perm = Vec::with_capacity(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            if row.iter().any(|&v| v != 0.0 && v != 1.0) {
                return None;
            }
            let mut ones = row.iter().enumerate().filter(|(_, &v)| v == 1.0);
            match (ones.next(), ones.next()) {
                (Some((j, _)), None) => perm.push(j),
                _ => return None,
            }
        }
        is_permutation(&perm).then_some(perm)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.cols, x.len())?;
        Ok(self
            .data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// True when every off-diagonal entry is `<= tol`.
    pub fn is_z_matrix(&self, tol: f64) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j) <= tol))
    }
}

pub(crate) fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter()
        .all(|&j| j < perm.len() && !std::mem::replace(&mut seen[j], true))
}

/// Odometer over all index tuples in `[0, dim)^order`, lexicographic order.
#[derive(Debug, Clone)]
pub struct MultiIndex {
    dim: usize,
    next: Option<Vec<usize>>,
}

impl MultiIndex {
    pub fn new(order: usize, dim: usize) -> Self {
        MultiIndex {
            dim,
            next: (dim > 0).then(|| vec![0; order]),
        }
    }
}

impl Iterator for MultiIndex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        for slot in (0..succ.len()).rev() {
            succ[slot] += 1;
            if succ[slot] < self.dim {
                self.next = Some(succ);
                return Some(cur);
            }
            succ[slot] = 0;
        }
        Some(cur)
    }
}

fn check_shape(order: usize, dim: usize) -> Result<()> {
    if order == 0 || dim == 0 {
        return Err(Error::Domain(format!(
            "tensor needs order >= 1 and dimension >= 1, got order {order}, dimension {dim}"
        )));
    }
    Ok(())
}

fn check_dense_size(order: usize, dim: usize) -> Result<usize> {
    u32::try_from(order)
        .ok()
        .and_then(|o| dim.checked_pow(o))
        .filter(|&len| len <= DENSE_LIMIT)
        .ok_or_else(|| Error::Domain(format!("{dim}^{order} entries exceed the dense limit")))
}

fn one_based(idx: &[usize]) -> String {
    let parts: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    format!("({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Tensor {
        // a111 = 2, a122 = -1, a222 = 3 (1-based)
        Tensor::from_entries(
            3,
            2,
            vec![
                (vec![0, 0, 0], 2.0),
                (vec![0, 1, 1], -1.0),
                (vec![1, 1, 1], 3.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn identity_order_two_is_identity_matrix() {
        let t = Tensor::identity(2, 3).unwrap();
        let dense = t.to_dense().unwrap();
        let eye = Matrix::identity(3);
        assert_eq!(dense, eye.as_slice());
    }

    #[test]
    fn identity_nonzeros() {
        let t = Tensor::identity(3, 2).unwrap();
        let nz: Vec<_> = t.entries().map(|(i, v)| (i.to_vec(), v)).collect();
        assert_eq!(nz, vec![(vec![0, 0, 0], 1.0), (vec![1, 1, 1], 1.0)]);
        assert_eq!(t.apply(&[2.0, 3.0]).unwrap(), vec![4.0, 9.0]);
        assert_eq!(t.apply(&[1.0, 2.0]).unwrap(), vec![1.0, 4.0]);
    }

    #[test]
    fn identity_rejects_bad_shape() {
        assert!(Tensor::identity(1, 3).is_err());
        assert!(Tensor::identity(3, 0).is_err());
    }

    #[test]
    fn apply_hand_computed() {
        assert_eq!(sample().apply(&[1.0, 2.0]).unwrap(), vec![-2.0, 12.0]);
    }

    #[test]
    fn apply_order_two_is_matrix_vector() {
        let data = [1.0, -2.0, 0.5, 3.0];
        let t = Tensor::from_dense(2, 2, &data).unwrap();
        let m = Matrix::new(2, 2, data.to_vec()).unwrap();
        let x = [0.3, -1.7];
        assert_eq!(t.apply(&x).unwrap(), m.mul_vec(&x).unwrap());
        assert_eq!(t.gradient(&x).unwrap(), m);
    }

    #[test]
    fn apply_dimension_mismatch() {
        assert!(matches!(
            sample().apply(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn duplicates_rejected() {
        let r = Tensor::from_entries(2, 2, vec![(vec![0, 1], 1.0), (vec![0, 1], 2.0)]);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(Tensor::from_entries(2, 2, vec![(vec![0, 2], 1.0)]).is_err());
        assert!(Tensor::from_entries(2, 2, vec![(vec![0], 1.0)]).is_err());
    }

    #[test]
    fn contract_extremes() {
        let a = sample();
        let x = [1.0, 2.0];
        assert_eq!(a.contract(&x, 3).unwrap(), a);
        let k1 = a.contract(&x, 1).unwrap();
        assert_eq!(k1.order(), 1);
        assert_eq!(k1.to_dense().unwrap(), a.apply(&x).unwrap());
        assert!(a.contract(&x, 0).is_err());
        assert!(a.contract(&x, 4).is_err());
    }

    #[test]
    fn contract_identity_to_order_two() {
        let c = Tensor::identity(3, 2)
            .unwrap()
            .contract(&[1.0, 2.0], 2)
            .unwrap();
        assert_eq!(c.to_dense().unwrap(), vec![1.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn gradient_identity() {
        let g = Tensor::identity(3, 2)
            .unwrap()
            .gradient(&[1.0, 2.0])
            .unwrap();
        assert_eq!(g.as_slice(), &[2.0, 0.0, 0.0, 4.0]);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let a = sample();
        let x = [1.0, 2.0];
        let g = a.gradient(&x).unwrap();
        let h = 1e-6;
        for j in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let fp = a.apply(&xp).unwrap();
            let fm = a.apply(&xm).unwrap();
            for i in 0..2 {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                assert!(
                    (fd - g.get(i, j)).abs() < 1e-6,
                    "({i},{j}) {fd} vs {}",
                    g.get(i, j)
                );
            }
        }
    }

    #[test]
    fn matrix_product_identity_and_swap() {
        let a = sample();
        assert_eq!(matrix_product(&Matrix::identity(2), &a).unwrap(), a);
        let swap = Matrix::from_permutation(&[1, 0]).unwrap();
        let pa = matrix_product(&swap, &a).unwrap();
        assert_eq!(pa.get(&[0, 1, 1]), 3.0);
        assert_eq!(pa.get(&[1, 0, 0]), 2.0);
        assert_eq!(pa.get(&[1, 1, 1]), -1.0);
        assert_eq!(pa, a.permute_slices(&[1, 0]).unwrap());
        assert!(matrix_product(&Matrix::identity(3), &a).is_err());
    }

    #[test]
    fn rank_one_examples() {
        let r = Tensor::rank_one(&[1.0, 0.0], 2).unwrap();
        assert_eq!(r.nnz(), 1);
        assert_eq!(r.get(&[0, 0]), 1.0);
        let e = Tensor::rank_one(&[1.0, 1.0], 3).unwrap();
        assert_eq!(e.nnz(), 8);
        assert!(e.entries().all(|(_, v)| v == 1.0));
        assert!(Tensor::rank_one(&[1.0], 0).is_err());
    }

    #[test]
    fn slice_inner_product_matches_apply() {
        let a = sample();
        let x = [0.7, -1.3];
        let r = Tensor::rank_one(&x, 2).unwrap();
        let y = a.apply(&x).unwrap();
        for (i, yi) in y.iter().enumerate() {
            let ip: f64 = a
                .slice_entries(i)
                .map(|(idx, v)| v * r.get(&idx[1..]))
                .sum();
            assert!((ip - yi).abs() <= 1e-12 * yi.abs().max(1.0));
        }
    }

    #[test]
    fn componentwise_power_examples() {
        assert_eq!(
            componentwise_power(&[4.0, 9.0], 0.5).unwrap(),
            vec![2.0, 3.0]
        );
        assert_eq!(
            componentwise_power(&[0.0, 0.0], 0.7).unwrap(),
            vec![0.0, 0.0]
        );
        assert!(componentwise_power(&[-1.0], 0.5).is_err());
        assert_eq!(componentwise_power(&[-2.0], 3.0).unwrap(), vec![-8.0]);
        let x = [0.3, 1.7, 0.0, 12.5];
        for m in 2..6 {
            let k = (m - 1) as f64;
            let back = componentwise_power(&componentwise_power(&x, k).unwrap(), 1.0 / k).unwrap();
            for (a, b) in x.iter().zip(&back) {
                assert!((a - b).abs() <= 1e-14 * a.max(1.0));
            }
        }
    }

    #[test]
    fn explicit_zero_not_stored() {
        let t = Tensor::from_entries(2, 2, vec![(vec![0, 1], 0.0)]).unwrap();
        assert_eq!(t.nnz(), 0);
        assert_eq!(t, Tensor::zeros(2, 2).unwrap());
    }

    #[test]
    fn principal_subtensor_restricts_all_modes() {
        let a = sample();
        let sub = a.principal_subtensor(&[1]).unwrap();
        assert_eq!(sub.dim(), 1);
        assert_eq!(sub.get(&[0, 0, 0]), 3.0);
        assert_eq!(sub.nnz(), 1);
    }

    #[test]
    fn permutation_matrix_round_trip() {
        let p = Matrix::from_permutation(&[2, 0, 1]).unwrap();
        assert_eq!(p.as_permutation(), Some(vec![2, 0, 1]));
        assert_eq!(Matrix::zeros(2, 2).as_permutation(), None);
        assert!(Matrix::from_permutation(&[0, 0]).is_err());
    }

    #[test]
    fn multi_index_enumerates_lexicographically() {
        let all: Vec<_> = MultiIndex::new(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }
}
