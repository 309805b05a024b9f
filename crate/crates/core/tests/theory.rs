use std::f64::consts::PI;

use blockkrylov::checks::{energy_errors, fitted_contraction, iterate_history};
use blockkrylov::reference::dense_solve;
use blockkrylov::theory::{rate_classical, rate_global, spectrum_of, symmetric_eigenvalues};
use blockkrylov::{
    poisson2d, random_block_rhs, PoissonSpec, Preconditioner, SolveOptions, SparseMatrix, Spectrum,
    SubalgebraConfig,
};

#[test]
fn laplacian_spectrum_matches_closed_form() {
    let m = 9;
    let a = poisson2d(&PoissonSpec::constant(m, m)).unwrap();
    let h = PI / (m + 1) as f64;
    let mut want: Vec<f64> = (1..=m)
        .flat_map(|i| {
            (1..=m).map(move |j| 4.0 - 2.0 * (i as f64 * h).cos() - 2.0 * (j as f64 * h).cos())
        })
        .collect();
    want.sort_by(f64::total_cmp);
    let got = spectrum_of(&a).unwrap();
    for (g, w) in got.eigenvalues().iter().zip(&want) {
        assert!((g - w).abs() <= 1e-10 * w, "{g} vs {w}");
    }
}

#[test]
fn jacobi_eigenvalues_of_known_matrix() {
    // [[2,1],[1,2]] has eigenvalues 1 and 3
    let mut ev = symmetric_eigenvalues(vec![2.0, 1.0, 1.0, 2.0], 2);
    ev.sort_by(f64::total_cmp);
    assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
}

#[test]
fn rates_improve_with_block_size() {
    let spec = Spectrum::new((1..=100).map(f64::from).collect()).unwrap();
    let mut last = 1.0;
    for k in 1..=16 {
        let r = rate_classical(&spec, k).unwrap();
        assert!(r < last);
        last = r;
    }
    assert!((rate_classical(&spec, 4).unwrap() - 2.0 / 3.0).abs() < 1e-14);
    // the global bound never beats classical block CG with the same k
    for (p, q) in [(1, 8), (2, 4), (4, 2), (8, 1)] {
        assert!(rate_global(&spec, p, q).unwrap() >= rate_classical(&spec, p * q).unwrap());
    }
    assert_eq!(
        rate_global(&spec, 8, 1).unwrap(),
        rate_classical(&spec, 8).unwrap()
    );
    assert!(rate_classical(&spec, 0).is_err());
    assert!(Spectrum::new(vec![1.0, 0.0]).is_err());
}

#[test]
fn classical_contraction_respects_bound_on_diagonal_operator() {
    let diag: Vec<f64> = (1..=100).map(f64::from).collect();
    let a = SparseMatrix::from_diagonal(&diag);
    let b = random_block_rhs(100, 4, 7);
    let exact = dense_solve(&a.to_dense(), &b).unwrap();
    let cfg = SubalgebraConfig::classical(4).unwrap();
    let opts = SolveOptions::default().with_tol(1e-12);
    let (xs, _, _) = iterate_history(&a, &b, &Preconditioner::Identity, cfg, &opts).unwrap();
    let mu = rate_classical(&Spectrum::new(diag).unwrap(), 4).unwrap();
    for rate in fitted_contraction(&energy_errors(&a, &exact, &xs)) {
        assert!(rate <= mu + 0.05, "{rate} > {mu}");
    }
}
