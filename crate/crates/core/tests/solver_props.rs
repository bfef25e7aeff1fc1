mod common;

use common::{corpus, max_abs_diff, random_tensor, rng};
use rand::Rng;
use ztcp_core::solver::{positive_certificate_vector, solve_observed};
use ztcp_core::{
    feasible_point_sampler, fixed_point_map, solve_multilinear, tcp_residual, Scheme, SolveStatus,
    SolverConfig, TcpInstance, Tensor,
};

fn cfg(scheme: Scheme) -> SolverConfig {
    SolverConfig {
        scheme,
        ..SolverConfig::default()
    }
}

#[test]
fn fixed_point_map_is_monotone() {
    let mut r = rng(17);
    for trial in 0..1000 {
        let n = 1 + trial % 5;
        let m = 2 + trial % 3;
        let b_tensor = random_tensor(&mut r, m, n, 0.5, 0.0, 1.0);
        let b: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..2.0)).collect();
        let s = r.gen_range(0.5..5.0);
        let x: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..2.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| v + r.gen_range(0.0..1.0)).collect();
        let tx = fixed_point_map(s, &b_tensor, &b, &x).unwrap();
        let ty = fixed_point_map(s, &b_tensor, &b, &y).unwrap();
        assert!(tx.iter().zip(&ty).all(|(u, v)| u <= v), "{tx:?} > {ty:?}");
    }
}

#[test]
fn corpus_converges_monotonically() {
    for g in corpus(120, &[3, 4]) {
        let inst = &g.instance;
        let mut prev = vec![0.0; inst.dim()];
        let mut prev_sum = 0.0;
        let report = solve_observed(inst, &cfg(Scheme::Jacobi), |_, x| {
            assert!(x.iter().zip(&prev).all(|(a, b)| a >= b));
            let sum: f64 = x.iter().sum();
            assert!(sum >= prev_sum);
            prev.copy_from_slice(x);
            prev_sum = sum;
        })
        .unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert!(report.monotone);
        assert!(report.residual_inf <= 1e-10);
    }
}

#[test]
fn larger_corpus_converges() {
    let mut solved = 0;
    for seed in 0..40 {
        let n = 5;
        let m = 3 + (seed % 2) as usize;
        // a tight margin makes b >= 0 rare; skip seeds the generator gives up on
        let Ok(g) = ztcp_core::generate_instance(&ztcp_core::GeneratorParams {
            n,
            m,
            density: 0.3,
            margin: 0.2,
            seed,
        }) else {
            continue;
        };
        solved += 1;
        let report = solve_multilinear(&g.instance, &cfg(Scheme::Jacobi)).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert!(report.monotone);
    }
    assert!(solved >= 20, "only {solved} instances generated");
}

#[test]
fn schemes_agree() {
    for g in corpus(120, &[3, 4]) {
        let j = solve_multilinear(&g.instance, &cfg(Scheme::Jacobi)).unwrap();
        let gs = solve_multilinear(&g.instance, &cfg(Scheme::GaussSeidel)).unwrap();
        assert_eq!(gs.status, SolveStatus::Converged);
        assert!(gs.monotone);
        assert!(max_abs_diff(&j.x, &gs.x) <= 1e-8);
        assert!(gs.iterations <= j.iterations);
    }
}

#[test]
fn least_element_and_tcp_solution() {
    for (seed, g) in corpus(60, &[3, 4]).into_iter().enumerate() {
        let inst = &g.instance;
        let x = solve_multilinear(inst, &SolverConfig::default()).unwrap().x;
        let res = tcp_residual(inst, &x).unwrap();
        assert!(res.within(1e-8), "{res:?}");
        // the planted vector is feasible, and so is anything the sampler draws
        assert!(x.iter().zip(&g.planted).all(|(a, b)| *a <= b + 1e-8));
        let z = positive_certificate_vector(inst.tensor(), &SolverConfig::default())
            .unwrap()
            .expect("strong M-tensors admit a positive certificate");
        for y in feasible_point_sampler(inst, &z, 100, seed as u64).unwrap() {
            let ay = inst.tensor().apply(&y).unwrap();
            assert!(ay.iter().zip(inst.rhs()).all(|(u, v)| u >= v));
            assert!(x.iter().zip(&y).all(|(a, b)| *a <= b + 1e-8));
        }
    }
}

#[test]
fn equation_solutions_have_zero_gap() {
    for g in corpus(60, &[3]) {
        let x = solve_multilinear(&g.instance, &SolverConfig::default())
            .unwrap()
            .x;
        let res = tcp_residual(&g.instance, &x).unwrap();
        assert!(res.compl_gap <= 1e-8 && res.dual_viol <= 1e-8);
    }
}

#[test]
fn zero_rhs_gives_zero() {
    let a = Tensor::identity(4, 3).unwrap().scale_and_shift(2.0, 0.0);
    let inst = TcpInstance::new(a, vec![0.0; 3]).unwrap();
    let report = solve_multilinear(&inst, &SolverConfig::default()).unwrap();
    assert_eq!(report.x, vec![0.0; 3]);
    assert_eq!(report.status, SolveStatus::Converged);
}

#[test]
fn singular_m_tensor_diverges() {
    // s = rho(B): M but not strong M, and b > 0 has no solution
    let a = Tensor::all_ones(2, 2).unwrap().scale_and_shift(-1.0, 2.0);
    let inst = TcpInstance::new(a, vec![1.0, 1.0]).unwrap();
    let report = solve_multilinear(
        &inst,
        &SolverConfig {
            divergence_bound: 1e3,
            max_iter: 1_000_000,
            ..SolverConfig::default()
        },
    )
    .unwrap();
    assert_eq!(report.status, SolveStatus::Diverged);
}
