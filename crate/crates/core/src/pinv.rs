//! Singular value decomposition by one-sided (Hestenes) Jacobi and the
//! Moore–Penrose pseudoinverse built on it.

use crate::matrix::Matrix;

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U·diag(σ)·Vᵀ` for a matrix with `rows ≥ cols`.
///
/// Returned `u` holds the rotated columns of `A` without normalization, so
/// column `j` has norm `σ_j`.
struct ThinSvd {
    u: Matrix,
    sigma: Vec<f64>,
    v: Matrix,
}

fn one_sided_jacobi(a: &Matrix) -> ThinSvd {
    debug_assert!(a.rows() >= a.cols());
    let (m, n) = a.shape();
    // Column-major working copies keep the inner loops contiguous.
    let mut u: Vec<Vec<f64>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..m {
                    alpha += u[p][i] * u[p][i];
                    beta += u[q][i] * u[q][i];
                    gamma += u[p][i] * u[q][i];
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                let (up, uq) = pair_mut(&mut u, p, q);
                rotate(up, uq, c, s);
                let (vp, vq) = pair_mut(&mut v, p, q);
                rotate(vp, vq, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma = u.iter().map(|col| crate::matrix::norm(col)).collect();
    ThinSvd {
        u: Matrix::from_fn(m, n, |i, j| u[j][i]),
        sigma,
        v: Matrix::from_fn(n, n, |i, j| v[j][i]),
    }
}

fn pair_mut(cols: &mut [Vec<f64>], p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let (left, right) = cols.split_at_mut(q);
    (&mut left[p], &mut right[0])
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = c * xa - s * yb;
        *b = s * xa + c * yb;
    }
}

/// Singular values in descending order.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let tall = if a.rows() >= a.cols() {
        a.clone()
    } else {
        a.transpose()
    };
    let mut s = one_sided_jacobi(&tall).sigma;
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Relative rank cutoff: singular values at or below
/// `max(rows, cols) · σ_max · 1e-13` are treated as zero.
pub fn rank_cutoff(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * sigma_max * 1e-13
}

/// Numerical rank under [`rank_cutoff`].
pub fn numerical_rank(a: &Matrix) -> usize {
    let s = singular_values(a);
    let cut = rank_cutoff(a.rows(), a.cols(), s[0]);
    s.iter().filter(|&&x| x > cut).count()
}

/// Moore–Penrose pseudoinverse.
pub fn pseudoinverse(a: &Matrix) -> Matrix {
    if a.rows() < a.cols() {
        return pseudoinverse(&a.transpose()).transpose();
    }
    let (m, n) = a.shape();
    let svd = one_sided_jacobi(a);
    let sigma_max = svd.sigma.iter().copied().fold(0.0, f64::max);
    let cut = rank_cutoff(m, n, sigma_max);
    let mut out = Matrix::zeros(n, m);
    for (j, &s) in svd.sigma.iter().enumerate() {
        if s <= cut || s == 0.0 {
            continue;
        }
        let inv_sq = 1.0 / (s * s);
        for r in 0..n {
            let vr = svd.v[(r, j)] * inv_sq;
            if vr == 0.0 {
                continue;
            }
            for c in 0..m {
                out[(r, c)] += vr * svd.u[(c, j)];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
    }

    fn penrose_residuals(a: &Matrix, p: &Matrix) -> [f64; 4] {
        let ap = a * p;
        let pa = p * a;
        [
            (&ap * a).distance(a),
            (&pa * p).distance(p),
            ap.asymmetry(),
            pa.asymmetry(),
        ]
    }

    #[test]
    fn projector_is_its_own_pseudoinverse() {
        let p = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(pseudoinverse(&p).max_abs_diff(&p) < 1e-15);
    }

    #[test]
    fn rank_one_formula() {
        let a = Matrix::from_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let want = Matrix::from_rows(&[vec![0.0, 0.0], vec![0.5, 0.0]]).unwrap();
        assert!(pseudoinverse(&a).max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn penrose_conditions_on_random_and_deficient_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..30 {
            let a = match trial % 3 {
                0 => gaussian(6, 5, &mut rng),
                1 => gaussian(4, 7, &mut rng),
                _ => {
                    // rank 3 product, 8 x 6
                    &gaussian(8, 3, &mut rng) * &gaussian(3, 6, &mut rng)
                }
            };
            let p = pseudoinverse(&a);
            let tol = 1e-9 * (1.0 + a.frobenius_norm());
            for r in penrose_residuals(&a, &p) {
                assert!(r <= tol, "trial {trial}: residual {r}");
            }
        }
    }

    #[test]
    fn zero_matrix_pseudoinverse_is_zero() {
        let z = Matrix::zeros(3, 2);
        assert_eq!(pseudoinverse(&z), Matrix::zeros(2, 3));
    }

    #[test]
    fn singular_values_of_diagonal() {
        let s = singular_values(&Matrix::diag(&[-3.0, 0.5, 2.0]));
        assert_abs_diff_eq!(s[0], 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s[1], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s[2], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rank_detects_deficiency() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = &gaussian(6, 2, &mut rng) * &gaussian(2, 5, &mut rng);
        assert_eq!(numerical_rank(&a), 2);
    }
}
