#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ztcp_core::generate::{generate_instance, GeneratedInstance, GeneratorParams};
use ztcp_core::tensor::MultiIndex;
use ztcp_core::Tensor;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[lo, hi)`, each present with probability `density`.
pub fn random_tensor(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
    density: f64,
    lo: f64,
    hi: f64,
) -> Tensor {
    let entries: Vec<_> = MultiIndex::new(m, n)
        .filter_map(|idx| rng.gen_bool(density).then(|| (idx, rng.gen_range(lo..hi))))
        .collect();
    Tensor::from_entries(m, n, entries).unwrap()
}

/// Z-tensor: diagonal uniform in `[0, 3)`, off-diagonal in `(-1, 0]`.
pub fn random_z_tensor(rng: &mut ChaCha8Rng, m: usize, n: usize, density: f64) -> Tensor {
    let entries: Vec<_> = MultiIndex::new(m, n)
        .filter_map(|idx| {
            if idx.iter().all(|&i| i == idx[0]) {
                Some((idx, rng.gen_range(0.0..3.0)))
            } else {
                rng.gen_bool(density)
                    .then(|| (idx, -rng.gen_range(0.0..1.0)))
            }
        })
        .collect();
    Tensor::from_entries(m, n, entries).unwrap()
}

/// `A x^{m-1}` by walking the dense array with an explicit odometer over the
/// trailing indices.
pub fn naive_apply(a: &Tensor, x: &[f64]) -> Vec<f64> {
    let n = a.dim();
    let m = a.order();
    let dense = a.to_dense().unwrap();
    let block = n.pow((m - 1) as u32);
    (0..n)
        .map(|i| {
            let mut sum = 0.0;
            for (flat, tail) in MultiIndex::new(m - 1, n).enumerate() {
                let mut term = dense[i * block + flat];
                for &j in &tail {
                    term *= x[j];
                }
                sum += term;
            }
            sum
        })
        .collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn is_z_dense(a: &Tensor) -> bool {
    MultiIndex::new(a.order(), a.dim())
        .all(|idx| idx.iter().all(|&i| i == idx[0]) || a.get(&idx) <= 0.0)
}

/// Every permutation `perm` for which slice `i <- slice perm[i]` is Z.
pub fn exhaustive_z_permutations(a: &Tensor) -> Vec<Vec<usize>> {
    permutations(a.dim())
        .into_iter()
        .filter(|p| is_z_dense(&a.permute_slices(p).unwrap()))
        .collect()
}

/// Strong M-tensor instances, n in {2,3,4}, m in {3,4}.
pub fn corpus(count: u64, orders: &[usize]) -> Vec<GeneratedInstance> {
    (1..=count)
        .map(|seed| {
            let n = 2 + (seed % 3) as usize;
            let m = orders[(seed / 3) as usize % orders.len()];
            let density = [0.1, 0.25, 0.5][(seed / 7) as usize % 3];
            generate_instance(&GeneratorParams {
                n,
                m,
                density,
                margin: 0.5,
                seed,
            })
            .unwrap()
        })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
