//! Sparsest solutions of Z-tensor complementarity problems.
//!
//! For a Z-tensor `A` and `b >= 0`, the least element of
//! `{x >= 0 : A x^{m-1} = b}` is a complementarity solution of minimum
//! support size. [`sparsest_solve`] computes it with the monotone solver;
//! [`oracle_min_support`] certifies the support size by brute force on small
//! instances.

use std::thread;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Precondition, Result};
use crate::permutation::find_z_permutation;
use crate::solver::{
    solve_multilinear, tcp_residual, SolveStatus, SolverConfig, TcpInstance, TcpResidual,
};

/// Support enumeration refuses instances above this dimension.
pub const ORACLE_MAX_DIM: usize = 12;

pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-8;

/// Indices `i` with `|x_i| > zero_threshold`.
pub fn support(x: &[f64], zero_threshold: f64) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > zero_threshold)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCertificate {
    pub min_support_size: usize,
    pub witness: Vec<f64>,
    /// Support of the witness (0-based).
    pub support: Vec<usize>,
    /// Supports examined, in enumeration order, up to and including the winner.
    pub enumerated_supports: usize,
    /// Supports among those whose subproblem solve did not converge.
    pub skipped_supports: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparsestResult {
    pub x_star: Vec<f64>,
    pub support: Vec<usize>,
    pub l0: usize,
    /// `e^T x*`
    pub objective: f64,
    /// The solver converged on an instance meeting the exact-relaxation
    /// preconditions.
    pub relaxation_valid: bool,
    pub status: SolveStatus,
    pub iterations: usize,
    pub residual_inf: f64,
    pub tcp: TcpResidual,
    pub oracle: Option<OracleCertificate>,
    /// Row permutation applied before solving, if any.
    pub permutation: Option<Vec<usize>>,
}

impl SparsestResult {
    /// `Some(true)` when the oracle ran, the relaxation is valid and both
    /// report the same support size.
    pub fn oracle_agrees(&self) -> Option<bool> {
        let cert = self.oracle.as_ref()?;
        Some(self.relaxation_valid && cert.min_support_size == self.l0)
    }
}

/// Least element of `{x >= 0 : A x^{m-1} = b}`, reported as a sparsest
/// complementarity solution.
pub fn sparsest_solve(
    inst: &TcpInstance,
    cfg: &SolverConfig,
    zero_threshold: f64,
) -> Result<SparsestResult> {
    if !(zero_threshold >= 0.0) {
        return Err(Error::Domain("zero threshold must be >= 0".into()));
    }
    if let Some(p) = inst.z_preconditions() {
        return Err(Error::NotApplicable(p));
    }
    let report = solve_multilinear(inst, cfg)?;
    let support = support(&report.x, zero_threshold);
    Ok(SparsestResult {
        l0: support.len(),
        support,
        objective: report.x.iter().sum(),
        relaxation_valid: report.status == SolveStatus::Converged,
        status: report.status,
        iterations: report.iterations,
        residual_inf: report.residual_inf,
        tcp: tcp_residual(inst, &report.x)?,
        x_star: report.x,
        oracle: None,
        permutation: None,
    })
}

/// Reorders the equations of `inst` by the lexicographically smallest
/// permutation that makes its tensor a Z-tensor. Equation `i` of the result
/// is equation `perm[i]` of `inst`.
pub fn z_permuted_instance(inst: &TcpInstance) -> Result<(Vec<usize>, TcpInstance)> {
    let perm = find_z_permutation(inst.tensor())
        .ok_or(Error::NotApplicable(Precondition::NoZPermutation))?;
    let b: Vec<f64> = perm.iter().map(|&j| inst.rhs()[j]).collect();
    if b.iter().any(|&v| v < 0.0) {
        return Err(Error::NotApplicable(Precondition::PermutedRhsNegative));
    }
    let permuted = TcpInstance::new(inst.tensor().permute_slices(&perm)?, b)?;
    Ok((perm, permuted))
}

/// [`sparsest_solve`] after reordering the equations so that the tensor
/// becomes a Z-tensor. Reordering equations leaves the solution set of
/// `A x^{m-1} = b` unchanged, so `x_star` needs no back-transformation;
/// `tcp` is still measured against the original instance.
pub fn sparsest_solve_permuted(
    inst: &TcpInstance,
    cfg: &SolverConfig,
    zero_threshold: f64,
) -> Result<SparsestResult> {
    let (perm, permuted) = z_permuted_instance(inst)?;
    let mut result = sparsest_solve(&permuted, cfg, zero_threshold)?;
    result.tcp = tcp_residual(inst, &result.x_star)?;
    result.permutation = Some(perm);
    Ok(result)
}

/// Runs [`sparsest_solve`] (optionally permuted) and attaches the
/// brute-force certificate. A solver failure is surfaced through
/// `relaxation_valid = false` alongside whatever the oracle found.
pub fn sparsest_solve_certified(
    inst: &TcpInstance,
    cfg: &SolverConfig,
    zero_threshold: f64,
    oracle: &OracleOptions,
) -> Result<SparsestResult> {
    let mut result = sparsest_solve(inst, cfg, zero_threshold)?;
    result.oracle = oracle_min_support_with(inst, oracle)?;
    Ok(result)
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    /// Residual tolerance for subproblem solves and off-support rows.
    pub tol: f64,
    /// Worker threads for evaluating supports of equal size.
    pub threads: usize,
    pub solver: SolverConfig,
}

impl OracleOptions {
    pub fn new(tol: f64) -> Self {
        OracleOptions {
            tol,
            threads: 1,
            solver: SolverConfig {
                tol,
                ..SolverConfig::default()
            },
        }
    }
}

/// Minimum support size over complementarity solutions, by enumerating
/// supports in order of increasing size (lexicographic within a size).
///
/// On a support `S` the principal subsystem `A[S] x_S^{m-1} = b_S` is solved
/// by the monotone solver; the candidate counts when `x_S > 0` and every row
/// outside `S` satisfies `(A x^{m-1})_i >= b_i - tol`. Returns `None` when no
/// support yields a solution.
pub fn oracle_min_support(inst: &TcpInstance, tol: f64) -> Result<Option<OracleCertificate>> {
    oracle_min_support_with(inst, &OracleOptions::new(tol))
}

enum Candidate {
    Valid(Vec<f64>),
    Invalid,
    Skipped,
}

pub fn oracle_min_support_with(
    inst: &TcpInstance,
    opts: &OracleOptions,
) -> Result<Option<OracleCertificate>> {
    let n = inst.dim();
    if n > ORACLE_MAX_DIM {
        return Err(Error::TooLarge {
            n,
            limit: ORACLE_MAX_DIM,
        });
    }
    if let Some(p) = inst.z_preconditions() {
        return Err(Error::NotApplicable(p));
    }
    opts.solver.validate()?;

    let zero = vec![0.0; n];
    let mut enumerated = 1;
    let mut skipped = 0;
    if tcp_residual(inst, &zero)?.within(opts.tol) {
        return Ok(Some(OracleCertificate {
            min_support_size: 0,
            witness: zero,
            support: Vec::new(),
            enumerated_supports: enumerated,
            skipped_supports: skipped,
        }));
    }
    for size in 1..=n {
        let supports = combinations(n, size);
        let outcomes = evaluate_all(inst, opts, &supports)?;
        for (s, outcome) in supports.iter().zip(outcomes) {
            enumerated += 1;
            match outcome {
                Candidate::Valid(witness) => {
                    return Ok(Some(OracleCertificate {
                        min_support_size: size,
                        witness,
                        support: s.clone(),
                        enumerated_supports: enumerated,
                        skipped_supports: skipped,
                    }));
                }
                Candidate::Skipped => skipped += 1,
                Candidate::Invalid => {}
            }
        }
    }
    Ok(None)
}

fn evaluate_all(
    inst: &TcpInstance,
    opts: &OracleOptions,
    supports: &[Vec<usize>],
) -> Result<Vec<Candidate>> {
    let threads = opts.threads.max(1).min(supports.len());
    if threads <= 1 {
        return supports.iter().map(|s| evaluate(inst, opts, s)).collect();
    }
    let chunk = supports.len().div_ceil(threads);
    thread::scope(|scope| {
        let handles: Vec<_> = supports
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|s| evaluate(inst, opts, s))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(supports.len());
        for h in handles {
            out.extend(h.join().expect("support worker panicked")?);
        }
        Ok(out)
    })
}

fn evaluate(inst: &TcpInstance, opts: &OracleOptions, s: &[usize]) -> Result<Candidate> {
    let sub = TcpInstance::new(
        inst.tensor().principal_subtensor(s)?,
        s.iter().map(|&i| inst.rhs()[i]).collect(),
    )?;
    let report = solve_multilinear(&sub, &opts.solver)?;
    if report.status != SolveStatus::Converged {
        warn!(
            "support {:?}: subproblem {:?} after {} iterations, skipped",
            s.iter().map(|i| i + 1).collect::<Vec<_>>(),
            report.status,
            report.iterations
        );
        return Ok(Candidate::Skipped);
    }
    if report.x.iter().any(|&v| !(v > 0.0)) {
        return Ok(Candidate::Invalid);
    }
    let mut x = vec![0.0; inst.dim()];
    for (&i, &v) in s.iter().zip(&report.x) {
        x[i] = v;
    }
    if tcp_residual(inst, &x)?.dual_viol <= opts.tol {
        Ok(Candidate::Valid(x))
    } else {
        Ok(Candidate::Invalid)
    }
}

/// All `size`-subsets of `0..n`, lexicographically ordered.
pub fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if size > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..size).collect();
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..size).rev().find(|&p| cur[p] < n - size + p) else {
            return out;
        };
        cur[pos] += 1;
        for q in pos + 1..size {
            cur[q] = cur[q - 1] + 1;
        }
    }
}

/// Settings for [`enumerate_tcp_solutions`].
#[derive(Debug, Clone, Copy)]
pub struct EnumerationOptions {
    pub tol: f64,
    /// Newton starting points per support.
    pub starts: usize,
    pub max_newton_steps: usize,
    pub rng_seed: u64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            tol: 1e-10,
            starts: 8,
            max_newton_steps: 100,
            rng_seed: 0,
        }
    }
}

/// Complementarity solutions of arbitrary tensors found by support
/// enumeration with multistart damped Newton on each principal subsystem.
///
/// Unlike [`oracle_min_support`] this does not rely on Z-structure, so it can
/// serve as an independent check on partially Z-tensors. It is a search, not
/// a proof: solutions Newton never reaches are missed. Returned points are
/// distinct up to `1e-6` in max-norm.
pub fn enumerate_tcp_solutions(
    inst: &TcpInstance,
    opts: &EnumerationOptions,
) -> Result<Vec<Vec<f64>>> {
    let n = inst.dim();
    if n > ORACLE_MAX_DIM {
        return Err(Error::TooLarge {
            n,
            limit: ORACLE_MAX_DIM,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let mut found: Vec<Vec<f64>> = Vec::new();
    let record = |x: Vec<f64>, found: &mut Vec<Vec<f64>>| {
        let dup = found.iter().any(|y| {
            y.iter()
                .zip(&x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                <= 1e-6
        });
        if !dup {
            found.push(x);
        }
    };
    let zero = vec![0.0; n];
    if tcp_residual(inst, &zero)?.within(opts.tol) {
        record(zero, &mut found);
    }
    for size in 1..=n {
        for s in combinations(n, size) {
            let sub = TcpInstance::new(
                inst.tensor().principal_subtensor(&s)?,
                s.iter().map(|&i| inst.rhs()[i]).collect(),
            )?;
            for _ in 0..opts.starts {
                let start: Vec<f64> = (0..size)
                    .map(|_| rng.gen_range(-1.0..1.5_f64).exp())
                    .collect();
                let Some(xs) = newton(&sub, start, opts)? else {
                    continue;
                };
                if xs.iter().any(|&v| v <= opts.tol) {
                    continue;
                }
                let mut x = vec![0.0; n];
                for (&i, &v) in s.iter().zip(&xs) {
                    x[i] = v;
                }
                if tcp_residual(inst, &x)?.dual_viol <= opts.tol {
                    record(x, &mut found);
                }
            }
        }
    }
    Ok(found)
}

fn newton(
    inst: &TcpInstance,
    mut x: Vec<f64>,
    opts: &EnumerationOptions,
) -> Result<Option<Vec<f64>>> {
    let a = inst.tensor();
    let b = inst.rhs();
    let residual = |x: &[f64]| -> Result<Vec<f64>> {
        Ok(a.apply(x)?.iter().zip(b).map(|(l, r)| l - r).collect())
    };
    let norm = |r: &[f64]| r.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut r = residual(&x)?;
    for _ in 0..opts.max_newton_steps {
        if norm(&r) <= opts.tol {
            return Ok(Some(x));
        }
        let jac = a.gradient(&x)?;
        let Some(step) = solve_dense(jac.as_slice(), &r, x.len()) else {
            return Ok(None);
        };
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(xi, di)| xi - t * di).collect();
            let rt = residual(&trial)?;
            if norm(&rt) < norm(&r) || t < 1e-8 {
                x = trial;
                r = rt;
                break;
            }
            t *= 0.5;
        }
    }
    Ok((norm(&r) <= opts.tol).then_some(x))
}

/// Gaussian elimination with partial pivoting on a row-major `n x n` system.
fn solve_dense(m: &[f64], rhs: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut a = m.to_vec();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let piv =
            (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
