//! Structural tests: Z, partially Z, M / strong M, and the spectral radius of
//! the nonnegative part.

use serde::Serialize;

use crate::error::{check_dim, Error, Precondition, Result};
use crate::permutation::find_z_permutation;
use crate::tensor::{root, Tensor};

/// Weight of the all-ones tensor added to `B` before power iteration, so that
/// reducible tensors still have a positive Perron vector.
pub const PERTURBATION: f64 = 1e-10;

pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-10;
pub const DEFAULT_SPECTRAL_MAX_ITER: usize = 100_000;

fn is_diagonal(idx: &[usize]) -> bool {
    idx.iter().all(|&i| i == idx[0])
}

/// True iff every off-diagonal entry is nonpositive.
pub fn is_z_tensor(a: &Tensor) -> bool {
    a.entries().all(|(idx, v)| v <= 0.0 || is_diagonal(idx))
}

/// True iff `a_{i1 i2..im} <= 0` whenever `i1` does not reappear among the
/// trailing indices.
pub fn is_partially_z_tensor(a: &Tensor) -> bool {
    a.entries()
        .all(|(idx, v)| v <= 0.0 || idx[1..].contains(&idx[0]))
}

/// Splitting `A = s I - B` with `s` the largest diagonal entry and `B >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MSplit {
    pub s: f64,
    pub b: Tensor,
}

pub fn m_split(a: &Tensor) -> Result<MSplit> {
    if !is_z_tensor(a) {
        return Err(Error::NotApplicable(Precondition::NotZTensor));
    }
    let s = (0..a.dim())
        .map(|i| a.diagonal(i))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(MSplit {
        s,
        b: a.scale_and_shift(-1.0, s),
    })
}

/// Two-sided estimate of the spectral radius of a nonnegative tensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralBracket {
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SpectralBracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// Bracket for `rho(B)` from Collatz-Wielandt ratios: for any positive `x`,
/// `min_i (B x^{m-1})_i / x_i^{m-1} <= rho(B) <= max_i (B x^{m-1})_i / x_i^{m-1}`.
///
/// The positive vectors come from power iteration on `B + eps * E` (E all
/// ones) started at the all-ones vector and normalized in the max-norm; the
/// perturbation keeps iterates positive when `B` is reducible. Once that
/// iteration settles, plain iteration on `B` continues from its last iterate
/// while `B x^{m-1}` stays positive. The best bounds seen at any step are
/// returned, widened by a few ulps.
///
/// The lower end also considers level-set truncations of the last iterate
/// (see [`level_set_lower_bound`]).
///
/// `converged` means the bracket width reached `tol`. For reducible `B` it
/// may not, but the bracket is an enclosure either way. The perturbation only
/// steers the iterates: the radius of `B + eps E` can sit far above
/// `rho(B)` (on the order of `eps^{1/(m-1)}` for nilpotent-like `B`), so it
/// is never used as a bound.
pub fn spectral_radius(b: &Tensor, tol: f64, max_iter: usize) -> Result<SpectralBracket> {
    if !b.is_nonnegative() {
        return Err(Error::Domain(
            "spectral radius iteration needs a nonnegative tensor".into(),
        ));
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::Domain("need tol > 0 and max_iter >= 1".into()));
    }
    if b.nnz() == 0 {
        return Ok(SpectralBracket {
            lo: 0.0,
            hi: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    let n = b.dim();
    let k = b.order() - 1;
    let mut x = vec![1.0; n];
    let mut lo = 0.0_f64;
    let mut hi = f64::INFINITY;
    let mut iterations = 0;
    let mut perturbed = true;
    while iterations < max_iter && hi - lo > tol {
        iterations += 1;
        let bx = b.apply(&x)?;
        let (mut rmin, mut rmax) = (f64::INFINITY, 0.0_f64);
        for (yi, xi) in bx.iter().zip(&x) {
            let r = yi / xi.powi(k as i32);
            rmin = rmin.min(r);
            rmax = rmax.max(r);
        }
        lo = lo.max(rmin);
        hi = hi.min(rmax);

        let y: Vec<f64> = if perturbed {
            let extra = PERTURBATION * x.iter().sum::<f64>().powi(k as i32);
            let y: Vec<f64> = bx.iter().map(|v| v + extra).collect();
            let (pmin, pmax) =
                y.iter()
                    .zip(&x)
                    .fold((f64::INFINITY, 0.0_f64), |(a, c), (yi, xi)| {
                        let r = yi / xi.powi(k as i32);
                        (a.min(r), c.max(r))
                    });
            if pmax - pmin <= tol {
                perturbed = false;
            }
            y
        } else if bx.iter().all(|&v| v > 0.0) {
            bx
        } else {
            break;
        };
        let next: Vec<f64> = y.iter().map(|&v| root(v, k)).collect();
        let scale = next.iter().copied().fold(0.0, f64::max);
        let next: Vec<f64> = next.into_iter().map(|v| v / scale).collect();
        if next == x && !perturbed {
            break;
        }
        x = next;
    }
    lo = lo.max(level_set_lower_bound(b, &x)?);
    let slack = 8.0 * f64::EPSILON;
    Ok(SpectralBracket {
        lo: lo * (1.0 - slack) + 0.0,
        hi: hi * (1.0 + slack),
        iterations,
        converged: hi - lo <= tol,
    })
}

/// If `B x^{m-1} >= lambda x^{[m-1]}` on the support of some `x >= 0`, then
/// `rho(B) >= lambda`: on that support the inequality involves only the
/// principal subtensor, whose radius is at most `rho(B)`. Trying the level
/// sets `{i : x_i >= x_j}` of the final iterate recovers the radius of a
/// dominant diagonal block when `B` is reducible.
fn level_set_lower_bound(b: &Tensor, x: &[f64]) -> Result<f64> {
    let k = (b.order() - 1) as i32;
    let mut best = 0.0_f64;
    let mut levels: Vec<f64> = x.to_vec();
    levels.sort_by(|p, q| q.total_cmp(p));
    levels.dedup();
    for t in levels.into_iter().filter(|&t| t > 0.0) {
        let xt: Vec<f64> = x.iter().map(|&v| if v >= t { v } else { 0.0 }).collect();
        let y = b.apply(&xt)?;
        let ratio = y
            .iter()
            .zip(&xt)
            .filter(|(_, &v)| v > 0.0)
            .map(|(yi, v)| yi / v.powi(k))
            .fold(f64::INFINITY, f64::min);
        best = best.max(ratio);
    }
    Ok(best)
}

/// Three-valued strong-M verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrongM {
    Yes,
    No,
    /// `s` lies inside the spectral bracket of `B`.
    Undetermined,
}

pub fn is_strong_m_tensor(a: &Tensor, tol: f64) -> Result<StrongM> {
    is_strong_m_tensor_with(a, tol, DEFAULT_SPECTRAL_MAX_ITER)
}

pub fn is_strong_m_tensor_with(a: &Tensor, tol: f64, max_iter: usize) -> Result<StrongM> {
    let Ok(split) = m_split(a) else {
        return Ok(StrongM::No);
    };
    let bracket = spectral_radius(&split.b, tol, max_iter)?;
    Ok(strong_m_verdict(split.s, &bracket))
}

fn strong_m_verdict(s: f64, bracket: &SpectralBracket) -> StrongM {
    if s > bracket.hi {
        StrongM::Yes
    } else if s <= bracket.lo {
        StrongM::No
    } else {
        StrongM::Undetermined
    }
}

/// Checks `A z^{m-1} > 0` for a user-supplied positive `z`. A passing check
/// certifies nothing about `z`-independent properties; it is sufficient, not
/// necessary, evidence of strong M-structure.
pub fn positivity_certificate(a: &Tensor, z: &[f64]) -> Result<bool> {
    check_dim(a.dim(), z.len())?;
    if z.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Domain("certificate vector must be positive".into()));
    }
    Ok(a.apply(z)?.iter().all(|&v| v > 0.0))
}

/// All structural verdicts for one tensor.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub is_z: bool,
    pub is_partially_z: bool,
    /// `s` of the splitting `A = s I - B`, when `A` is a Z-tensor.
    pub split_s: Option<f64>,
    #[serde(skip)]
    pub split_b: Option<Tensor>,
    pub spectral_radius_bracket: Option<SpectralBracket>,
    pub is_strong_m: Option<StrongM>,
    /// Row permutation `perm` (0-based) with `P A` a Z-tensor, where `P` has
    /// ones at `(i, perm[i])`.
    pub z_permutation: Option<Vec<usize>>,
}

pub fn classify(a: &Tensor, tol: f64, max_iter: usize) -> Result<Classification> {
    let is_z = is_z_tensor(a);
    let mut out = Classification {
        is_z,
        is_partially_z: is_partially_z_tensor(a),
        split_s: None,
        split_b: None,
        spectral_radius_bracket: None,
        is_strong_m: None,
        z_permutation: find_z_permutation(a),
    };
    if is_z {
        let split = m_split(a)?;
        let bracket = spectral_radius(&split.b, tol, max_iter)?;
        out.is_strong_m = Some(strong_m_verdict(split.s, &bracket));
        out.split_s = Some(split.s);
        out.split_b = Some(split.b);
        out.spectral_radius_bracket = Some(bracket);
    }
    Ok(out)
}
