use blockkrylov::checks::{
    energy_errors, energy_monotonicity, global_stacked, hybrid_split, iterate_history,
    parallel_reduction, residual_gap,
};
use blockkrylov::reference::{column_rel_errors, dense_solve};
use blockkrylov::{
    bcg_solve, bdot, poisson2d, random_block_rhs, spectrum_of, BlockVector, CoefficientField,
    PoissonSpec, Preconditioner, PreconditionerKind, SolveOptions, SolveStatus, SparseMatrix,
    SubalgebraConfig,
};

fn heterogeneous(nx: usize, ny: usize, seed: u64) -> SparseMatrix {
    let spec =
        PoissonSpec::new(nx, ny, CoefficientField::LogUniform { contrast: 2.0 }, seed).unwrap();
    poisson2d(&spec).unwrap()
}

fn ilu(a: &SparseMatrix) -> Preconditioner {
    Preconditioner::build(PreconditionerKind::Ilu0, a).unwrap()
}

#[test]
fn poisson_8x8_matches_dense_direct_solve() {
    let a = heterogeneous(8, 8, 5);
    let b = random_block_rhs(64, 4, 21);
    let cfg = SubalgebraConfig::hybrid(4, 4).unwrap();
    let (x, rep) = bcg_solve(&a, &b, None, &ilu(&a), cfg, &SolveOptions::default()).unwrap();
    assert!(rep.converged);
    let exact = dense_solve(&a.to_dense(), &b).unwrap();
    for err in column_rel_errors(&x, &exact) {
        assert!(err < 1e-6, "relative error {err}");
    }
}

#[test]
fn every_preconditioner_and_mode_converges() {
    let a = heterogeneous(20, 20, 2);
    let b = random_block_rhs(400, 8, 4);
    let exact = dense_solve(&a.to_dense(), &b).unwrap();
    for kind in [
        PreconditionerKind::Identity,
        PreconditionerKind::Jacobi,
        PreconditionerKind::Ilu0,
    ] {
        let m = Preconditioner::build(kind, &a).unwrap();
        for cfg in [
            SubalgebraConfig::parallel(8),
            SubalgebraConfig::hybrid(8, 2),
            SubalgebraConfig::global(8, 2),
            SubalgebraConfig::global(8, 1),
            SubalgebraConfig::classical(8),
        ] {
            let cfg = cfg.unwrap();
            let (x, rep) = bcg_solve(&a, &b, None, &m, cfg, &SolveOptions::default()).unwrap();
            assert!(rep.converged, "{kind} {cfg}: {:?}", rep.status);
            assert!(rep.final_residual.iter().all(|&r| r < 1e-7));
            assert!(column_rel_errors(&x, &exact).iter().all(|&e| e < 1e-5));
        }
    }
}

#[test]
fn initial_guess_is_used() {
    let a = heterogeneous(6, 6, 1);
    let b = random_block_rhs(36, 2, 9);
    let exact = dense_solve(&a.to_dense(), &b).unwrap();
    let cfg = SubalgebraConfig::parallel(2).unwrap();
    let (_, rep) = bcg_solve(
        &a,
        &b,
        Some(&exact),
        &Preconditioner::Identity,
        cfg,
        &SolveOptions::default(),
    )
    .unwrap();
    assert!(rep.converged);
    assert_eq!(rep.iterations, 0);
}

#[test]
fn duplicate_columns_break_down_at_first_iteration() {
    let a = heterogeneous(8, 8, 3);
    let base = random_block_rhs(64, 4, 8);
    let b = BlockVector::from_fn(64, 4, |r, c| base.get(r, if c == 3 { 1 } else { c }));
    // Dense rank oracle: Gram matrix of B has a zero eigenvalue.
    let gram = bdot(&b, &b, SubalgebraConfig::classical(4).unwrap()).unwrap();
    let ev = blockkrylov::theory::symmetric_eigenvalues(gram.as_slice().to_vec(), 4);
    assert!(ev.iter().cloned().fold(f64::INFINITY, f64::min).abs() < 1e-12);

    let cfg = SubalgebraConfig::classical(4).unwrap();
    let (_, rep) = bcg_solve(&a, &b, None, &ilu(&a), cfg, &SolveOptions::default()).unwrap();
    assert_eq!(rep.status, SolveStatus::Breakdown);
    assert_eq!(rep.breakdown.unwrap().iteration, 1);
    assert!(!rep.converged);

    // The parallel method treats columns independently and is unaffected.
    let (_, rep) = bcg_solve(
        &a,
        &b,
        None,
        &ilu(&a),
        SubalgebraConfig::parallel(4).unwrap(),
        &SolveOptions::default(),
    )
    .unwrap();
    assert!(rep.converged);
}

#[test]
fn parallel_mode_is_scalar_cg_per_column() {
    let a = heterogeneous(16, 16, 7);
    let b = random_block_rhs(256, 4, 1);
    for m in [
        ilu(&a),
        Preconditioner::Identity,
        Preconditioner::jacobi(&a).unwrap(),
    ] {
        let dev = parallel_reduction(&a, &b, &m, 20).unwrap();
        assert!(dev <= 1e-12, "{dev}");
    }
}

#[test]
fn hybrid_is_data_parallel_classical() {
    let a = heterogeneous(16, 16, 7);
    let b = random_block_rhs(256, 8, 2);
    let dev = hybrid_split(&a, &b, &ilu(&a), 4, 30).unwrap();
    assert!(dev <= 1e-12, "{dev}");
    let dev = hybrid_split(&a, &b, &Preconditioner::Identity, 2, 30).unwrap();
    assert!(dev <= 1e-12, "{dev}");
}

#[test]
fn global_is_classical_on_stacked_system() {
    let a = heterogeneous(16, 16, 7);
    let b = random_block_rhs(256, 8, 3);
    // Run to convergence: every common iterate is compared.
    for kind in [PreconditionerKind::Ilu0, PreconditionerKind::Jacobi] {
        let dev = global_stacked(&a, &b, kind, 4, 1000).unwrap();
        assert!(dev <= 1e-10, "{kind}: {dev}");
    }
    let dev = global_stacked(&a, &b, PreconditionerKind::Jacobi, 2, 1000).unwrap();
    assert!(dev <= 1e-10, "{dev}");
    let laplace = poisson2d(&PoissonSpec::constant(16, 16)).unwrap();
    let dev = global_stacked(&laplace, &b, PreconditionerKind::Identity, 4, 1000).unwrap();
    assert!(dev <= 1e-10, "{dev}");
}

#[test]
fn classical_energy_error_is_monotone() {
    let a = heterogeneous(12, 12, 4);
    let b = random_block_rhs(144, 4, 6);
    let exact = dense_solve(&a.to_dense(), &b).unwrap();
    let cfg = SubalgebraConfig::classical(4).unwrap();
    let (xs, _, rep) = iterate_history(&a, &b, &ilu(&a), cfg, &SolveOptions::default()).unwrap();
    assert!(rep.converged);
    let errors = energy_errors(&a, &exact, &xs);
    assert!(energy_monotonicity(&errors) <= 1e-10);
}

#[test]
fn recursive_residual_tracks_true_residual() {
    let a = heterogeneous(32, 32, 7);
    let b = random_block_rhs(1024, 8, 7);
    for cfg in [
        SubalgebraConfig::hybrid(8, 8),
        SubalgebraConfig::hybrid(8, 1),
        SubalgebraConfig::global(8, 4),
    ] {
        let (xs, rs, rep) =
            iterate_history(&a, &b, &ilu(&a), cfg.unwrap(), &SolveOptions::default()).unwrap();
        assert!(rep.converged);
        assert!(residual_gap(&a, &b, &xs, &rs).unwrap() <= 1e-8);
    }
}

#[test]
fn preconditioned_gram_blocks_are_positive_definite() {
    let a = heterogeneous(8, 8, 11);
    let r = random_block_rhs(64, 4, 12);
    for kind in [
        PreconditionerKind::Identity,
        PreconditionerKind::Jacobi,
        PreconditionerKind::Ilu0,
    ] {
        let z = Preconditioner::build(kind, &a).unwrap().apply(&r).unwrap();
        let rho = bdot(&z, &r, SubalgebraConfig::classical(4).unwrap()).unwrap();
        // symmetrise: ILU(0) of a symmetric matrix is only symmetric up to rounding
        let sym: Vec<f64> = (0..16)
            .map(|i| 0.5 * (rho.as_slice()[i] + rho.as_slice()[(i % 4) * 4 + i / 4]))
            .collect();
        let ev = blockkrylov::theory::symmetric_eigenvalues(sym, 4);
        assert!(ev.iter().all(|&l| l > 0.0), "{kind}: {ev:?}");
    }
}

#[test]
fn flop_totals_follow_iteration_count() {
    let a = heterogeneous(10, 10, 1);
    let b = random_block_rhs(100, 4, 2);
    let cfg = SubalgebraConfig::hybrid(4, 2).unwrap();
    let (_, rep) = bcg_solve(&a, &b, None, &ilu(&a), cfg, &SolveOptions::default()).unwrap();
    let it = rep.iterations as u64;
    let (n, k, p, q, z) = (100u64, 4u64, 2u64, 2u64, a.nnz() as u64);
    assert_eq!(rep.flops.bdot, it * 3 * 2 * n * p * p * q);
    assert_eq!(rep.flops.baxpy, it * 3 * 2 * n * p * p * q);
    assert_eq!(rep.flops.bop, (it + 1) * 2 * k * z);
}

#[test]
fn poisson_is_spd() {
    for seed in [1, 2, 3] {
        let a = heterogeneous(6, 5, seed);
        assert!(spectrum_of(&a).unwrap().min() > 0.0);
    }
}
