//! Splitting operators for the best-approximation problem over an
//! intersection of linear (or consistent affine) subspaces.
//!
//! The crate builds the Ryu, Malitsky–Tam, Campoy and relaxed-POCS operators
//! as explicit matrices for normal cones of subspaces, together with the
//! projector onto each operator's fixed-point set. Iterating the relaxed
//! operator converges to that projector, and the scheme's shadow sequence
//! converges to the projection of the starting point onto the intersection.
//!
//! Modules, bottom-up:
//!
//! - [`matrix`], [`eigen`], [`pinv`]: dense kernels (Jacobi, Hessenberg/QR,
//!   one-sided Jacobi SVD and the pseudoinverse).
//! - [`subspace`]: orthogonal projectors and their calculus
//!   (complements, Anderson–Duffin intersections, sums, products).
//! - [`splitting`]: the four schemes, a resolvent-oracle evaluation path and
//!   the affine reduction.
//! - [`iteration`]: relaxed fixed-point runs, error traces, rate estimates.
//! - [`spectral`]: spectral-radius and operator-norm rate bounds.

pub mod eigen;
pub mod error;
pub mod iteration;
pub mod matrix;
pub mod pinv;
pub mod spectral;
pub mod splitting;
pub mod subspace;
pub mod textio;

pub use eigen::{
    general_eigenvalues, jacobi_symmetric_eig, operator_norm, spectral_radius, ComplexValue,
    EigResult,
};
pub use error::{Error, Result};
pub use iteration::{
    estimate_rate, hitting_times, iterate, iterate_affine, relax, HittingTimes, IterationTrace,
    StopRule, StopTarget, DEFAULT_RATE_WINDOW,
};
pub use matrix::Matrix;
pub use pinv::pseudoinverse;
pub use spectral::{
    pocs_three_lines_eigenvalues, pocs_three_lines_norm, rate_bounds, residual_operator,
    three_lines, RateBounds,
};
pub use splitting::{
    apply_generic_step, build_affine, build_campoy, build_mt, build_pocs, build_ryu, build_scheme,
    evaluate_generic, AffineConjugation, ResolventOracle, SchemeKind, SplittingScheme,
};
pub use subspace::{AffineSubspace, Subspace};
