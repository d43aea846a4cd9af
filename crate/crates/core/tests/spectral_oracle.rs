mod common;

use common::{random_connected, rng};
use gonlab::graph::{complete, cycle, pappus, path};
use gonlab::spectral::{
    algebraic_connectivity, gonality_bound_closed_form, gonality_bound_formula, jacobi_eigen, psd_laplacian,
    spectral_gonality_bound, support_quadratic, SpectralError, DEFAULT_TOL,
};
use gonlab::Multigraph;
use nalgebra::DMatrix;
use rand::Rng;

fn reference_eigenvalues(g: &Multigraph) -> Vec<f64> {
    let n = g.vertex_count();
    let m = DMatrix::from_row_slice(n, n, &psd_laplacian(g));
    let mut v: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn lambda2_agrees_with_reference_solver() {
    let mut r = rng(13);
    for trial in 0..50 {
        let n = r.random_range(2..=14);
        let p = r.random_range(0.2..0.8);
        let g = random_connected(&mut r, n, p, trial % 4 == 0);
        let s = algebraic_connectivity(&g, DEFAULT_TOL).unwrap();
        let reference = reference_eigenvalues(&g);
        assert!((s.lambda2 - reference[1]).abs() <= s.error_bound + 1e-10, "trial {trial}");
        for (a, b) in s.eigenvalues.iter().zip(&reference) {
            assert!((a - b).abs() <= s.error_bound + 1e-10);
        }
        assert!(s.residual < 1e-6);
    }
}

#[test]
fn closed_forms() {
    let close = |g: Multigraph, want: f64| {
        let s = algebraic_connectivity(&g, DEFAULT_TOL).unwrap();
        assert!((s.lambda2 - want).abs() < 1e-9, "{} vs {want}", s.lambda2);
    };
    close(complete(4), 4.0);
    close(complete(6), 6.0);
    close(cycle(6), 2.0 - 2.0 * (std::f64::consts::PI / 3.0).cos());
    close(path(5), 2.0 - 2.0 * (std::f64::consts::PI / 5.0).cos());
    close(pappus(), 3.0 - 3f64.sqrt());
}

#[test]
fn jacobi_on_a_diagonal_and_a_two_by_two() {
    let e = jacobi_eigen(&[3.0, 0.0, 0.0, 1.0], 2, 1e-12).unwrap();
    assert_eq!(e.values, vec![1.0, 3.0]);
    let e = jacobi_eigen(&[2.0, 1.0, 1.0, 2.0], 2, 1e-12).unwrap();
    assert!((e.values[0] - 1.0).abs() < 1e-12 && (e.values[1] - 3.0).abs() < 1e-12);
}

#[test]
fn formula_forms_agree_and_solve_the_quadratic() {
    for &(l, d, n) in &[(0.5, 3.0, 10.0), (1.2679, 3.0, 18.0), (4.0, 3.0, 4.0), (2.0, 7.0, 100.0)] {
        let x = gonality_bound_formula(l, d, n);
        assert!((x - gonality_bound_closed_form(l, d, n)).abs() < 1e-9 * n);
        assert!(support_quadratic(l, d, n, x).abs() < 1e-6 * n * n);
        assert!(support_quadratic(l, d, n, x * 1.01) > 0.0);
        assert!(gonality_bound_formula(l * 1.1, d, n) > x);
    }
}

#[test]
fn certified_value_sits_below_the_point_value() {
    let s = algebraic_connectivity(&pappus(), DEFAULT_TOL).unwrap();
    let b = spectral_gonality_bound(&s).unwrap();
    assert!(b.certified <= b.value);
    assert!((b.value - 5.0395).abs() < 1e-3);
    assert_eq!(b.ceiling, 6);
    let disconnected = Multigraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
    let s = algebraic_connectivity(&disconnected, DEFAULT_TOL).unwrap();
    assert_eq!(s.lambda2, 0.0);
    assert!(matches!(spectral_gonality_bound(&s), Err(SpectralError::Disconnected)));
}
