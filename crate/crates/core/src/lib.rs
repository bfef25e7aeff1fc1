//! Sparsest solutions of Z-tensor complementarity problems.
//!
//! Given an order-`m`, dimension-`n` tensor `A` and a vector `b`, the tensor
//! complementarity problem asks for `x >= 0` with `A x^{m-1} - b >= 0` and
//! `<x, A x^{m-1} - b> = 0`. When `A` is a Z-tensor (nonpositive off-diagonal
//! entries) and `b >= 0`, the least element of `{x >= 0 : A x^{m-1} = b}` is
//! both a solution and one of minimum support size, so the l0 problem reduces
//! to a monotone fixed-point iteration.
//!
//! Layout:
//! - [`tensor`]: coordinate-list tensors, contractions, Jacobians, `P A`.
//! - [`classify`]: Z / partially Z / strong M tests and spectral-radius brackets.
//! - [`permutation`]: row permutations that turn a tensor into a Z-tensor.
//! - [`solver`]: Jacobi and Gauss-Seidel monotone iterations and residuals.
//! - [`sparsity`]: sparsest-solution pipeline and brute-force support oracle.
//! - [`io`], [`generate`]: text formats and random strong M-tensor instances.
//!
//! ```
//! use ztcp_core::{sparsest_solve, SolverConfig, TcpInstance, Tensor};
//!
//! let a = Tensor::identity(3, 2).unwrap();
//! let inst = TcpInstance::new(a, vec![4.0, 0.0]).unwrap();
//! let res = sparsest_solve(&inst, &SolverConfig::default(), 1e-8).unwrap();
//! assert_eq!(res.x_star, vec![2.0, 0.0]);
//! assert_eq!(res.l0, 1);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod error;
pub mod generate;
pub mod io;
pub mod permutation;
pub mod solver;
pub mod sparsity;
pub mod tensor;

pub use classify::{
    classify, is_partially_z_tensor, is_strong_m_tensor, is_z_tensor, m_split,
    positivity_certificate, spectral_radius, Classification, MSplit, SpectralBracket, StrongM,
};
pub use error::{Error, Precondition, Result};
pub use generate::{generate_instance, GeneratedInstance, GeneratorParams};
pub use permutation::find_z_permutation;
pub use solver::{
    check_system_equivalence, feasible_point_sampler, fixed_point_map, solve_multilinear,
    tcp_residual, Scheme, SolveReport, SolveStatus, SolverConfig, TcpInstance, TcpResidual,
};
pub use sparsity::{
    oracle_min_support, oracle_min_support_with, sparsest_solve, sparsest_solve_certified,
    sparsest_solve_permuted, support, z_permuted_instance, OracleCertificate, OracleOptions,
    SparsestResult,
};
pub use tensor::{componentwise_power, matrix_product, Matrix, Tensor};
