//! Monotone fixed-point solvers for `A x^{m-1} = b, x >= 0` with `A` a
//! Z-tensor and `b >= 0`.
//!
//! Writing `A = s I - B` with `B >= 0`, a nonnegative solution is a fixed point
//! of `T(x) = ((B x^{m-1} + b) / s)^[1/(m-1)]`. `T` is monotone, and from
//! `x = 0` the iterates increase towards the least nonnegative solution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{is_partially_z_tensor, is_z_tensor, m_split, positivity_certificate};
use crate::error::{check_dim, Error, Precondition, Result};
use crate::tensor::{root, Tensor};

/// The pair `(A, b)` defining `TCP(A, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TcpInstance {
    a: Tensor,
    b: Vec<f64>,
}

impl TcpInstance {
    pub fn new(a: Tensor, b: Vec<f64>) -> Result<Self> {
        check_dim(a.dim(), b.len())?;
        if a.order() < 2 {
            return Err(Error::Domain(format!(
                "complementarity problems need order >= 2, got {}",
                a.order()
            )));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("right-hand side is not finite".into()));
        }
        Ok(TcpInstance { a, b })
    }

    pub fn tensor(&self) -> &Tensor {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `||A x^{m-1} - b||_inf`.
    pub fn equation_residual(&self, x: &[f64]) -> Result<f64> {
        let ax = self.a.apply(x)?;
        Ok(ax
            .iter()
            .zip(&self.b)
            .map(|(l, r)| (l - r).abs())
            .fold(0.0, f64::max))
    }

    pub(crate) fn z_preconditions(&self) -> Option<Precondition> {
        if !is_z_tensor(&self.a) {
            Some(Precondition::NotZTensor)
        } else if self.b.iter().any(|&v| v < 0.0) {
            Some(Precondition::NegativeRhs)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Jacobi,
    GaussSeidel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Threshold on `||A x^{m-1} - b||_inf`.
    pub tol: f64,
    pub max_iter: usize,
    pub scheme: Scheme,
    /// Iterates with max-norm above this are declared divergent.
    pub divergence_bound: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-10,
            max_iter: 100_000,
            scheme: Scheme::Jacobi,
            divergence_bound: 1e12,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be >= 1".into()));
        }
        if !(self.divergence_bound > 0.0) {
            return Err(Error::Domain(format!(
                "divergence bound must be > 0, got {}",
                self.divergence_bound
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Diverged,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub x: Vec<f64>,
    pub residual_inf: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    /// Every iterate was componentwise `>=` its predecessor.
    pub monotone: bool,
    /// Set when `status` is `NotApplicable`.
    pub precondition: Option<Precondition>,
}

/// `T_{s,B,b}(x) = ((B x^{m-1} + b) / s)^[1/(m-1)]`.
pub fn fixed_point_map(s: f64, b_tensor: &Tensor, b: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    check_dim(b_tensor.dim(), b.len())?;
    check_dim(b_tensor.dim(), x.len())?;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("shift s must be > 0, got {s}")));
    }
    let k = b_tensor.order() - 1;
    let bx = b_tensor.apply(x)?;
    bx.iter()
        .zip(b)
        .map(|(bx, bi)| {
            let v = (bx + bi) / s;
            if v < 0.0 {
                Err(Error::Domain(format!(
                    "fixed-point map hit negative value {v}; B, b and x must be nonnegative"
                )))
            } else {
                Ok(root(v, k))
            }
        })
        .collect()
}

/// Solves `A x^{m-1} = b` from `x = 0` by the monotone iteration.
pub fn solve_multilinear(inst: &TcpInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    solve_observed(inst, cfg, |_, _| {})
}

/// Like [`solve_multilinear`], calling `observer(k, x_k)` after every step.
pub fn solve_observed<F>(
    inst: &TcpInstance,
    cfg: &SolverConfig,
    mut observer: F,
) -> Result<SolveReport>
where
    F: FnMut(usize, &[f64]),
{
    cfg.validate()?;
    let n = inst.dim();
    if let Some(p) = inst.z_preconditions() {
        return Ok(SolveReport {
            x: vec![0.0; n],
            residual_inf: inst.equation_residual(&vec![0.0; n])?,
            iterations: 0,
            status: SolveStatus::NotApplicable,
            monotone: true,
            precondition: Some(p),
        });
    }
    let split = m_split(&inst.a)?;
    // any s >= max diagonal gives B >= 0; s must also be positive for T
    let (s, bt) = if split.s > 0.0 {
        (split.s, split.b)
    } else {
        (1.0, inst.a.scale_and_shift(-1.0, 1.0))
    };
    let k = inst.a.order() - 1;
    let b = &inst.b;

    let mut x = vec![0.0; n];
    let mut monotone = true;
    let mut residual = f64::INFINITY;
    for iter in 1..=cfg.max_iter {
        let next = match cfg.scheme {
            Scheme::Jacobi => fixed_point_map(s, &bt, b, &x)?,
            Scheme::GaussSeidel => {
                let mut y = x.clone();
                for i in 0..n {
                    y[i] = root((bt.apply_row(i, &y) + b[i]) / s, k);
                }
                y
            }
        };
        monotone &= next.iter().zip(&x).all(|(new, old)| new >= old);
        x = next;
        observer(iter, &x);

        if x.iter()
            .any(|&v| !v.is_finite() || v > cfg.divergence_bound)
        {
            return Ok(SolveReport {
                residual_inf: inst.equation_residual(&x)?,
                x,
                iterations: iter,
                status: SolveStatus::Diverged,
                monotone,
                precondition: None,
            });
        }
        residual = inst.equation_residual(&x)?;
        if residual <= cfg.tol {
            return Ok(SolveReport {
                x,
                residual_inf: residual,
                iterations: iter,
                status: SolveStatus::Converged,
                monotone,
                precondition: None,
            });
        }
    }
    Ok(SolveReport {
        x,
        residual_inf: residual,
        iterations: cfg.max_iter,
        status: SolveStatus::MaxIter,
        monotone,
        precondition: None,
    })
}

/// Violations of the three complementarity conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TcpResidual {
    /// `||min(x, 0)||_inf`
    pub primal_viol: f64,
    /// `||min(A x^{m-1} - b, 0)||_inf`
    pub dual_viol: f64,
    /// `|<x, A x^{m-1} - b>|`
    pub compl_gap: f64,
}

impl TcpResidual {
    pub fn max(&self) -> f64 {
        self.primal_viol.max(self.dual_viol).max(self.compl_gap)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

pub fn tcp_residual(inst: &TcpInstance, x: &[f64]) -> Result<TcpResidual> {
    let ax = inst.a.apply(x)?;
    let mut out = TcpResidual {
        primal_viol: 0.0,
        dual_viol: 0.0,
        compl_gap: 0.0,
    };
    let mut gap = 0.0;
    for ((xi, axi), bi) in x.iter().zip(&ax).zip(&inst.b) {
        let r = axi - bi;
        if *xi < 0.0 {
            out.primal_viol = out.primal_viol.max(-xi);
        }
        if r < 0.0 {
            out.dual_viol = out.dual_viol.max(-r);
        }
        gap += xi * r;
    }
    out.compl_gap = gap.abs();
    Ok(out)
}

/// How much the equation residual may exceed `tol` when the complementarity
/// residuals are within `tol`.
pub const EQUIVALENCE_AMPLIFICATION: f64 = 10.0;

/// For a partially Z-tensor and `b >= 0`, any complementarity solution also
/// solves the equation. Returns false only when `x` solves the
/// complementarity problem within `tol` but `||A x^{m-1} - b||_inf` exceeds
/// `EQUIVALENCE_AMPLIFICATION * tol`.
pub fn check_system_equivalence(inst: &TcpInstance, x: &[f64], tol: f64) -> Result<bool> {
    if !is_partially_z_tensor(&inst.a) {
        return Err(Error::NotApplicable(Precondition::NotPartiallyZTensor));
    }
    if inst.b.iter().any(|&v| v < 0.0) {
        return Err(Error::NotApplicable(Precondition::NegativeRhs));
    }
    if !tcp_residual(inst, x)?.within(tol) {
        return Ok(true);
    }
    Ok(inst.equation_residual(x)? <= EQUIVALENCE_AMPLIFICATION * tol)
}

/// Samples points of `{y >= 0 : A y^{m-1} >= b}` by scaling random positive
/// perturbations of `z`: if `A y^{m-1} > 0` then `t y` is feasible for
/// `t = max_i (b_i / (A y^{m-1})_i)^{1/(m-1)}` by homogeneity.
///
/// Points are scaled by `t * (1 + u)` with `u` uniform in `[0, 1)` for half of
/// the draws and sit exactly on the scaling boundary for the rest.
pub fn feasible_point_sampler(
    inst: &TcpInstance,
    z: &[f64],
    count: usize,
    rng_seed: u64,
) -> Result<Vec<Vec<f64>>> {
    check_dim(inst.dim(), z.len())?;
    if !positivity_certificate(&inst.a, z)? {
        return Err(Error::NotApplicable(Precondition::PositivityCertificate));
    }
    if inst.b.iter().any(|&v| v < 0.0) {
        return Err(Error::NotApplicable(Precondition::NegativeRhs));
    }
    let k = inst.a.order() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Vec::with_capacity(count);
    for draw in 0..count {
        let mut spread = 1.0;
        let (y, ay) = loop {
            let y: Vec<f64> = z
                .iter()
                .map(|&zi| zi * (spread * rng.gen_range(-1.0..1.0_f64)).exp())
                .collect();
            let ay = inst.a.apply(&y)?;
            if ay.iter().all(|&v| v > 0.0) {
                break (y, ay);
            }
            // z itself passes, so shrinking the spread terminates
            spread *= 0.5;
            if spread < 1e-12 {
                break (z.to_vec(), inst.a.apply(z)?);
            }
        };
        let bound = ay
            .iter()
            .zip(&inst.b)
            .map(|(a, b)| root(b / a, k))
            .fold(0.0, f64::max);
        let mut t = if bound == 0.0 { 1.0 } else { bound };
        if draw % 2 == 1 {
            t *= 1.0 + rng.gen_range(0.0..1.0);
        }
        // bump past rounding at the binding row
        loop {
            let p: Vec<f64> = y.iter().map(|v| t * v).collect();
            let ap = inst.a.apply(&p)?;
            if ap.iter().zip(&inst.b).all(|(a, b)| a >= b) {
                out.push(p);
                break;
            }
            t *= 1.0 + 1e-12;
        }
    }
    Ok(out)
}

/// Solves `A z^{m-1} = e` for a Z-tensor; the solution, when it exists, is a
/// positive vector with `A z^{m-1} > 0`.
pub fn positive_certificate_vector(a: &Tensor, cfg: &SolverConfig) -> Result<Option<Vec<f64>>> {
    let inst = TcpInstance::new(a.clone(), vec![1.0; a.dim()])?;
    let report = solve_multilinear(&inst, cfg)?;
    if report.status != SolveStatus::Converged || report.x.iter().any(|&v| !(v > 0.0)) {
        return Ok(None);
    }
    Ok(positivity_certificate(a, &report.x)?.then_some(report.x))
}
