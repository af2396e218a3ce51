//! Rate bounds for relaxed linear iterations: the spectral radius of
//! `T_λ − P_Fix` bounds the linear rate from below, its operator norm from
//! above.

use crate::eigen::{operator_norm, spectral_radius};
use crate::error::Result;
use crate::iteration::relax;
use crate::matrix::Matrix;
use crate::splitting::SplittingScheme;
use crate::subspace::Subspace;

/// Radiality tolerance: `|ρ − ‖·‖|` below this counts as equal.
pub const RADIAL_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateBounds {
    pub lambda: f64,
    pub spectral_radius: f64,
    pub operator_norm: f64,
    pub is_radial: bool,
}

/// `T_λ − P_Fix` for a scheme.
pub fn residual_operator(scheme: &SplittingScheme, lambda: f64) -> Matrix {
    &relax(scheme.operator(), lambda) - scheme.fixed_projector()
}

pub fn rate_bounds(scheme: &SplittingScheme, lambda: f64) -> Result<RateBounds> {
    bounds_of(&residual_operator(scheme, lambda), lambda)
}

/// Bounds for an already formed residual matrix.
pub fn bounds_of(residual: &Matrix, lambda: f64) -> Result<RateBounds> {
    let rho = spectral_radius(residual)?;
    let norm = operator_norm(residual)?;
    Ok(RateBounds {
        lambda,
        spectral_radius: rho,
        operator_norm: norm,
        is_radial: (rho - norm).abs() <= RADIAL_TOLERANCE,
    })
}

/// The two eigenvalues of `T_λ − P_Z` for relaxed POCS on three lines
/// through the origin at angles `0, θ, 2θ`.
pub fn pocs_three_lines_eigenvalues(theta: f64, lambda: f64) -> (f64, f64) {
    let s2 = theta.sin().powi(2);
    let k = 4.0 * lambda / 3.0;
    (1.0 - k, 1.0 + k * (2.0 * s2 * s2 - 3.0 * s2))
}

/// Operator norm of `T_λ − P_Z` for the three-lines POCS family, from the
/// lower-triangular 2x2 form of the composition in the basis `e_0, e_{π/2}`.
pub fn pocs_three_lines_norm(theta: f64, lambda: f64) -> f64 {
    let k = 4.0 * lambda / 3.0;
    let c2 = theta.cos().powi(2);
    let a = 1.0 - k + k * c2 * (2.0 * theta).cos();
    let b = k * c2 * (2.0 * theta).sin();
    let c = 1.0 - k;
    // largest singular value of [[a, 0], [b, c]]
    let f = a * a + b * b + c * c;
    let det = (a * c).abs();
    ((f + (f * f - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt()
}

/// Projector onto the line spanned by `(cos φ, sin φ)`.
pub fn line_projector(phi: f64) -> Matrix {
    let (s, c) = phi.sin_cos();
    Matrix::from_rows(&[vec![c * c, s * c], vec![s * c, s * s]]).expect("finite entries")
}

/// The lines `U = ℝe_0`, `V = ℝe_θ`, `W = ℝe_{2θ}` in the plane.
pub fn three_lines(theta: f64) -> [Subspace; 3] {
    [0.0, theta, 2.0 * theta].map(|phi| {
        let (s, c) = phi.sin_cos();
        Subspace::from_basis(&Matrix::column(&[c, s]).expect("finite entries"))
            .expect("a unit vector spans a line")
    })
}
