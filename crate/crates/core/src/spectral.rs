//! Algebraic connectivity and the spectral gonality bound.
//!
//! The graph module's Laplacian has `-val(v)` on the diagonal. Everything
//! here works with its negation, the positive semidefinite Laplacian
//! `val(v)` / `-ε(v, w)`, whose eigenvalues are `0 = λ₁ <= λ₂ <= …`.

use serde::Serialize;
use thiserror::Error;

use crate::graph::Multigraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("need at least two vertices")]
    TooSmall,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("Jacobi iteration did not reach tolerance {tol} (error bound {bound}) in {sweeps} sweeps")]
    NoConvergence { tol: f64, bound: f64, sweeps: usize },
    #[error("graph is disconnected, so λ₂ = 0 and the bound is undefined")]
    Disconnected,
    #[error("separator sides must be non-empty and fit in the graph")]
    BadSides,
    #[error("λ₂ must be non-negative, got {0}")]
    NegativeLambda(f64),
    #[error("denominator d·n - λ₂·|A ∪ B| = {0} is not positive")]
    NonPositiveDenominator(f64),
}

/// Eigen-decomposition of a dense symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector of `values[i]`.
    pub vectors: Vec<Vec<f64>>,
    /// Bound on `|computed - exact|` for every eigenvalue: the Frobenius norm
    /// of the remaining off-diagonal part plus a rounding allowance.
    pub error_bound: f64,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 60;

/// Cyclic Jacobi rotations on a row-major `n × n` symmetric matrix.
///
/// Each rotation zeroes one off-diagonal pair; a sweep visits every pair
/// once. Sweeps continue until the off-diagonal mass is below machine
/// precision relative to the matrix norm; convergence is quadratic near the
/// end, so this costs only a sweep or two more than a loose stop.
pub fn jacobi_eigen(matrix: &[f64], n: usize, tol: f64) -> Result<SymmetricEigen, SpectralError> {
    assert_eq!(matrix.len(), n * n, "matrix is not n × n");
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frobenius = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let rounding = 8.0 * (n as f64) * f64::EPSILON * frobenius.max(1.0);
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    let mut off = off_norm(&a);
    while off > f64::EPSILON * frobenius && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    let new_p = c * akp - s * akq;
                    let new_q = s * akp + c * akq;
                    a[k * n + p] = new_p;
                    a[p * n + k] = new_p;
                    a[k * n + q] = new_q;
                    a[q * n + k] = new_q;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        off = off_norm(&a);
    }
    let error_bound = off + rounding;
    if error_bound > tol {
        return Err(SpectralError::NoConvergence { tol, bound: error_bound, sweeps });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
        .collect();
    Ok(SymmetricEigen { values, vectors, error_bound, sweeps })
}

/// `λ₂` of the positive semidefinite Laplacian with a certified error bound.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralSummary {
    pub lambda2: f64,
    /// `|lambda2 - λ₂| <= error_bound`.
    pub error_bound: f64,
    pub d_max: u32,
    pub n: usize,
    pub connected: bool,
    /// `‖Lx - λ₂x‖` for the reported eigenvector.
    pub residual: f64,
    #[serde(skip)]
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub fiedler_vector: Vec<f64>,
}

impl SpectralSummary {
    /// Certified interval for `λ₂`.
    pub fn lambda2_interval(&self) -> (f64, f64) {
        ((self.lambda2 - self.error_bound).max(0.0), self.lambda2 + self.error_bound)
    }
}

/// Dense positive semidefinite Laplacian, row-major.
pub fn psd_laplacian(g: &Multigraph) -> Vec<f64> {
    let lap = g.laplacian();
    let n = lap.size();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = -(lap.get(i, j) as f64);
        }
    }
    out
}

pub const DEFAULT_TOL: f64 = 1e-9;

/// Second-smallest Laplacian eigenvalue. Disconnected graphs report exactly
/// zero, decided by a connectivity check rather than the eigenvalue.
pub fn algebraic_connectivity(g: &Multigraph, tol: f64) -> Result<SpectralSummary, SpectralError> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(SpectralError::TooSmall);
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(SpectralError::BadTolerance(tol));
    }
    let m = psd_laplacian(g);
    let eig = jacobi_eigen(&m, n, tol)?;
    let connected = g.is_connected();
    let lambda2 = if connected { eig.values[1].max(0.0) } else { 0.0 };
    let x = &eig.vectors[1];
    let residual = (0..n)
        .map(|i| {
            let row: f64 = (0..n).map(|j| m[i * n + j] * x[j]).sum();
            (row - eig.values[1] * x[i]).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    Ok(SpectralSummary {
        lambda2,
        error_bound: eig.error_bound,
        d_max: g.max_valence(),
        n,
        connected,
        residual,
        eigenvalues: eig.values,
        fiedler_vector: eig.vectors[1].clone(),
    })
}

/// Lower bound `4λ₂|A||B| / (d·n - λ₂|A ∪ B|)` on any vertex set separating
/// `A` from `B`.
pub fn separator_lower_bound(
    size_a: usize,
    size_b: usize,
    lambda2: f64,
    d: u32,
    n: usize,
) -> Result<f64, SpectralError> {
    if size_a == 0 || size_b == 0 || size_a + size_b > n {
        return Err(SpectralError::BadSides);
    }
    if lambda2 < 0.0 {
        return Err(SpectralError::NegativeLambda(lambda2));
    }
    let denominator = f64::from(d) * n as f64 - lambda2 * (size_a + size_b) as f64;
    if denominator <= 0.0 {
        return Err(SpectralError::NonPositiveDenominator(denominator));
    }
    Ok(4.0 * lambda2 * size_a as f64 * size_b as f64 / denominator)
}

/// Positive root `x` of `λ₂x² + (7λ₂ + 9d)n·x − 8λ₂n² = 0`, which equals
/// `n/(2λ₂)·[−(7λ₂ + 9d) + 3√(9λ₂² + 14dλ₂ + 9d²)]`.
///
/// Evaluated as `16nλ₂ / (b + √(b² + 32λ₂²))` with `b = 7λ₂ + 9d`, which is
/// the same number without the cancellation in the bracket.
pub fn gonality_bound_formula(lambda2: f64, d: f64, n: f64) -> f64 {
    let b = 7.0 * lambda2 + 9.0 * d;
    16.0 * n * lambda2 / (b + (b * b + 32.0 * lambda2 * lambda2).sqrt())
}

/// The bracketed closed form, evaluated literally.
pub fn gonality_bound_closed_form(lambda2: f64, d: f64, n: f64) -> f64 {
    let radicand = 9.0 * lambda2 * lambda2 + 14.0 * d * lambda2 + 9.0 * d * d;
    n / (2.0 * lambda2) * (-(7.0 * lambda2 + 9.0 * d) + 3.0 * radicand.sqrt())
}

/// Left side of `λ₂x² + (7λ₂ + 9d)n·x − 8λ₂n² >= 0`.
pub fn support_quadratic(lambda2: f64, d: f64, n: f64, x: f64) -> f64 {
    lambda2 * x * x + (7.0 * lambda2 + 9.0 * d) * n * x - 8.0 * lambda2 * n * n
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralBound {
    pub value: f64,
    /// The bound evaluated at the low end of the `λ₂` interval; the bound is
    /// increasing in `λ₂`, so this is a certified lower bound.
    pub certified: f64,
    /// `⌈certified⌉`.
    pub ceiling: i64,
}

/// Spectral lower bound on gonality from `λ₂`, maximum valence and `n`.
pub fn spectral_gonality_bound(summary: &SpectralSummary) -> Result<SpectralBound, SpectralError> {
    if !summary.connected {
        return Err(SpectralError::Disconnected);
    }
    let (d, n) = (f64::from(summary.d_max), summary.n as f64);
    let value = gonality_bound_formula(summary.lambda2, d, n);
    let (low, _) = summary.lambda2_interval();
    // few-ulp relative slack for the evaluation itself
    let certified = gonality_bound_formula(low, d, n) * (1.0 - 1e-12);
    Ok(SpectralBound { value, certified, ceiling: certified.ceil() as i64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, pappus, path};

    #[test]
    fn k2_and_k4_spectra() {
        let s = algebraic_connectivity(&path(2), DEFAULT_TOL).unwrap();
        assert!((s.lambda2 - 2.0).abs() < 1e-12);
        let s = algebraic_connectivity(&complete(4), DEFAULT_TOL).unwrap();
        assert!((s.lambda2 - 4.0).abs() < 1e-12);
        assert!(s.eigenvalues.iter().skip(1).all(|x| (x - 4.0).abs() < 1e-12));
    }

    #[test]
    fn pappus_lambda2() {
        let s = algebraic_connectivity(&pappus(), DEFAULT_TOL).unwrap();
        assert!((s.lambda2 - (3.0 - 3f64.sqrt())).abs() < 1e-9);
        assert!(s.error_bound <= DEFAULT_TOL);
        assert!(s.residual < 1e-8);
    }

    #[test]
    fn cycle_spectrum_matches_cosines() {
        let n = 9;
        let s = algebraic_connectivity(&cycle(n), DEFAULT_TOL).unwrap();
        let expected = 2.0 - 2.0 * (2.0 * std::f64::consts::PI / n as f64).cos();
        assert!((s.lambda2 - expected).abs() < 1e-10);
    }

    #[test]
    fn disconnected_reports_zero() {
        let g = Multigraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let s = algebraic_connectivity(&g, DEFAULT_TOL).unwrap();
        assert_eq!(s.lambda2, 0.0);
        assert!(!s.connected);
        assert_eq!(spectral_gonality_bound(&s).unwrap_err(), SpectralError::Disconnected);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(algebraic_connectivity(&path(1), 1e-9).unwrap_err(), SpectralError::TooSmall);
        assert!(matches!(algebraic_connectivity(&path(3), 0.0), Err(SpectralError::BadTolerance(_))));
    }

    #[test]
    fn separator_bound_cases() {
        assert!(matches!(
            separator_lower_bound(1, 1, 2.0, 1, 2),
            Err(SpectralError::NonPositiveDenominator(x)) if x == -2.0
        ));
        assert_eq!(separator_lower_bound(0, 1, 1.0, 3, 5), Err(SpectralError::BadSides));
        assert_eq!(separator_lower_bound(3, 3, 1.0, 3, 5), Err(SpectralError::BadSides));
        // 4(3-√3)·36 / (54 - 12(3-√3))
        let b = separator_lower_bound(6, 6, 3.0 - 3f64.sqrt(), 3, 18).unwrap();
        assert!((b - 4.707_66).abs() < 1e-4, "{b}");
        assert!(b <= 6.0); // the middle ring separates the outer and inner rings
        assert_eq!(separator_lower_bound(6, 6, 0.0, 3, 18).unwrap(), 0.0);
        assert!(separator_lower_bound(6, 6, 1e-12, 3, 18).unwrap() < 1e-9);
    }

    #[test]
    fn bound_formula_matches_closed_form_and_quadratic() {
        for &(l, d, n) in &[(3.0 - 3f64.sqrt(), 3.0, 18.0), (2.0, 1.0, 2.0), (0.3, 4.0, 50.0)] {
            let x = gonality_bound_formula(l, d, n);
            let y = gonality_bound_closed_form(l, d, n);
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
            let scale = 8.0 * l * n * n;
            assert!(support_quadratic(l, d, n, x).abs() <= 1e-6 * scale);
        }
    }

    #[test]
    fn pappus_bound_and_per_vertex_constant() {
        let s = algebraic_connectivity(&pappus(), DEFAULT_TOL).unwrap();
        let b = spectral_gonality_bound(&s).unwrap();
        assert!((b.value - 5.04).abs() < 0.01, "{}", b.value);
        assert_eq!(b.ceiling, 6);
        let l = 3.0 - 2.0 * 2f64.sqrt();
        let per_vertex = gonality_bound_formula(l, 3.0, 1.0);
        // 0.048657..., reported truncated
        assert_eq!((per_vertex * 1e4).floor() / 1e4, 0.0486, "{per_vertex}");
    }

    #[test]
    fn k2_bound_value() {
        // n/(2λ)·(-23 + 3√73) with λ = 2, d = 1, n = 2
        let x = gonality_bound_formula(2.0, 1.0, 2.0);
        assert!((x - 0.5 * (-23.0 + 3.0 * 73f64.sqrt())).abs() < 1e-12);
        assert!((x - 1.3160).abs() < 1e-4);
    }
}
