//! Random strong M-tensor instances with a planted nonnegative solution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{
    is_strong_m_tensor, spectral_radius, StrongM, DEFAULT_SPECTRAL_MAX_ITER, DEFAULT_SPECTRAL_TOL,
};
use crate::error::{Error, Result};
use crate::solver::TcpInstance;
use crate::tensor::{MultiIndex, Tensor};

/// Planted vectors are redrawn at most this many times.
pub const REDRAW_BUDGET: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorParams {
    pub n: usize,
    pub m: usize,
    /// Probability that an off-diagonal entry of `B` is nonzero.
    pub density: f64,
    /// `s = (1 + margin) * hi` where `hi` bounds `rho(B)` from above.
    pub margin: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub instance: TcpInstance,
    pub planted: Vec<f64>,
    pub s: f64,
    pub nonnegative_part: Tensor,
    pub redraws: usize,
}

/// `A = s I - B` with `s = (1 + margin) * hi`, `hi` the upper end of the
/// spectral bracket of `B`.
pub fn strong_m_from_nonnegative(b: &Tensor, margin: f64) -> Result<(f64, Tensor)> {
    if !(margin > 0.0) {
        return Err(Error::Domain(format!("margin must be > 0, got {margin}")));
    }
    let bracket = spectral_radius(b, DEFAULT_SPECTRAL_TOL, DEFAULT_SPECTRAL_MAX_ITER)?;
    if !(bracket.hi > 0.0) {
        return Err(Error::Generation(
            "nonnegative part has zero spectral radius".into(),
        ));
    }
    let s = (1.0 + margin) * bracket.hi;
    Ok((s, b.scale_and_shift(-1.0, s)))
}

pub fn generate_instance(params: &GeneratorParams) -> Result<GeneratedInstance> {
    let GeneratorParams {
        n,
        m,
        density,
        margin,
        seed,
    } = *params;
    if m < 2 || n == 0 {
        return Err(Error::Domain(format!(
            "need m >= 2 and n >= 1, got m = {m}, n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Domain(format!(
            "density must lie in [0, 1], got {density}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut entries = Vec::new();
    for idx in MultiIndex::new(m, n) {
        let diagonal = idx.iter().all(|&i| i == idx[0]);
        if diagonal {
            entries.push((idx, rng.gen_range(0.5..1.5)));
        } else if rng.gen_bool(density) {
            entries.push((idx, 1.0 - rng.gen_range(0.0..1.0)));
        }
    }
    let b_part = Tensor::from_entries(m, n, entries)?;
    let (s, a) = strong_m_from_nonnegative(&b_part, margin)?;
    if is_strong_m_tensor(&a, DEFAULT_SPECTRAL_TOL)? != StrongM::Yes {
        return Err(Error::Generation(format!(
            "could not certify strong M-structure with margin {margin}"
        )));
    }

    for redraws in 0..REDRAW_BUDGET {
        let mut planted: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    rng.gen_range(0.5..2.0)
                } else {
                    0.0
                }
            })
            .collect();
        if planted.iter().all(|&v| v == 0.0) {
            planted[rng.gen_range(0..n)] = rng.gen_range(0.5..2.0);
        }
        let b = a.apply(&planted)?;
        if b.iter().all(|&v| v >= 0.0) {
            return Ok(GeneratedInstance {
                instance: TcpInstance::new(a, b)?,
                planted,
                s,
                nonnegative_part: b_part,
                redraws,
            });
        }
    }
    Err(Error::Generation(format!(
        "no planted vector with nonnegative right-hand side in {REDRAW_BUDGET} draws"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::is_z_tensor;

    fn params(n: usize, m: usize, density: f64, seed: u64) -> GeneratorParams {
        GeneratorParams {
            n,
            m,
            density,
            margin: 0.5,
            seed,
        }
    }

    #[test]
    fn zero_density_is_diagonal() {
        let g = generate_instance(&params(4, 3, 0.0, 3)).unwrap();
        let a = g.instance.tensor();
        assert!(a.entries().all(|(idx, _)| idx.iter().all(|&i| i == idx[0])));
        for i in 0..4 {
            let want = a.diagonal(i) * g.planted[i] * g.planted[i];
            assert_eq!(g.instance.rhs()[i], want);
        }
    }

    #[test]
    fn all_ones_doubles_radius() {
        let (s, a) = strong_m_from_nonnegative(&Tensor::all_ones(3, 2).unwrap(), 1.0).unwrap();
        assert!((s - 8.0).abs() < 1e-8);
        assert!((a.get(&[0, 0, 0]) - 7.0).abs() < 1e-8);
        assert_eq!(a.get(&[0, 1, 0]), -1.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let p = params(3, 4, 0.3, 11);
        let a = generate_instance(&p).unwrap();
        let b = generate_instance(&p).unwrap();
        assert_eq!(a.instance, b.instance);
        assert_eq!(a.planted, b.planted);
        let c = generate_instance(&GeneratorParams { seed: 12, ..p }).unwrap();
        assert_ne!(a.instance, c.instance);
    }

    #[test]
    fn outputs_meet_contract() {
        for seed in 0..20 {
            let g = generate_instance(&params(3, 3, 0.4, seed)).unwrap();
            assert!(is_z_tensor(g.instance.tensor()));
            assert!(g.instance.rhs().iter().all(|&v| v >= 0.0));
            assert_eq!(
                is_strong_m_tensor(g.instance.tensor(), 1e-10).unwrap(),
                StrongM::Yes
            );
        }
    }

    #[test]
    fn bad_params() {
        assert!(generate_instance(&params(3, 3, 1.5, 0)).is_err());
        assert!(generate_instance(&params(3, 1, 0.5, 0)).is_err());
        assert!(strong_m_from_nonnegative(&Tensor::all_ones(3, 2).unwrap(), 0.0).is_err());
    }
}
