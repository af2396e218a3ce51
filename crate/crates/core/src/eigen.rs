//! Eigenvalue kernels: cyclic Jacobi for symmetric matrices and
//! Hessenberg reduction plus Francis double-shift QR for general ones.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl ComplexValue {
    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re, -self.im)
    }
}

impl fmt::Display for ComplexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0.0 {
            write!(f, "{}", self.re)
        } else if self.im > 0.0 {
            write!(f, "{}+{}i", self.re, self.im)
        } else {
            write!(f, "{}-{}i", self.re, -self.im)
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigResult {
    pub eigenvalues: Vec<ComplexValue>,
    /// Orthonormal eigenvectors as columns; only the symmetric path fills this.
    pub eigenvectors: Option<Matrix>,
}

impl EigResult {
    /// Real parts, in stored order.
    pub fn real_values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// The input is symmetrized first. Eigenvalues come back sorted descending
/// with matching eigenvector columns.
pub fn jacobi_symmetric_eig(a: &Matrix) -> Result<EigResult> {
    let (values, vectors) = symmetric_eig(a)?;
    Ok(EigResult {
        eigenvalues: values.into_iter().map(ComplexValue::real).collect(),
        eigenvectors: Some(vectors),
    })
}

/// Same as [`jacobi_symmetric_eig`] but with plain real output.
pub fn symmetric_eig(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut m = a.symmetrize();
    let mut v = Matrix::identity(n);
    let scale = m.frobenius_norm();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Reduces a square matrix to upper Hessenberg form by Householder
/// similarity transforms. Entries below the subdiagonal are zeroed.
pub fn hessenberg(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut h = a.clone();
    if n < 3 {
        return Ok(h);
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let f = (m..=high).rev().map(|i| ort[i] * h[(i, j)]).sum::<f64>() / hh;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let f = (m..=high).rev().map(|j| ort[j] * h[(i, j)]).sum::<f64>() / hh;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
        for i in m + 1..=high {
            h[(i, m - 1)] = 0.0;
        }
    }
    Ok(h)
}

/// All eigenvalues of a square matrix, with multiplicity.
///
/// Orthogonal reduction to Hessenberg form followed by the implicitly
/// double-shifted QR iteration (EISPACK `hqr`). Complex eigenvalues appear
/// as exact conjugate pairs. Fails after `100·n` QR iterations without
/// deflation.
pub fn general_eigenvalues(a: &Matrix) -> Result<Vec<ComplexValue>> {
    let mut h = hessenberg(a)?;
    let nn = a.rows();
    let max_iters = 100 * nn;
    let mut re = vec![0.0; nn];
    let mut im = vec![0.0; nn];

    let eps = f64::EPSILON;
    let low: isize = 0;
    let mut n = nn as isize - 1;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z);
    let (mut x, mut y, mut w);

    let norm: f64 = (0..nn)
        .map(|i| {
            (i.saturating_sub(1)..nn)
                .map(|j| h[(i, j)].abs())
                .sum::<f64>()
        })
        .sum();

    let mut iter = 0usize;
    let mut total_iters = 0usize;
    while n >= low {
        let nu = n as usize;
        // Look for a single small subdiagonal element.
        let mut l = n;
        while l > low {
            let lu = l as usize;
            s = h[(lu - 1, lu - 1)].abs() + h[(lu, lu)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(lu, lu - 1)].abs() <= eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            re[nu] = h[(nu, nu)] + exshift;
            im[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            x = h[(nu, nu)] + exshift;
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                re[nu - 1] = x + z;
                re[nu] = if z != 0.0 { x - w / z } else { x + z };
                im[nu - 1] = 0.0;
                im[nu] = 0.0;
            } else {
                re[nu - 1] = x + p;
                re[nu] = x + p;
                im[nu - 1] = z;
                im[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[(nu, nu)];
            y = h[(nu - 1, nu - 1)];
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];

            // Exceptional shifts break cycles.
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            total_iters += 1;
            if total_iters > max_iters {
                return Err(Error::NoConvergence(max_iters));
            }

            // Look for two consecutive small subdiagonal elements.
            let mut m = n - 2;
            loop {
                let mu = m as usize;
                z = h[(mu, mu)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(mu + 1, mu)] + h[(mu, mu + 1)];
                q = h[(mu + 1, mu + 1)] - z - r - s;
                r = h[(mu + 2, mu + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(mu, mu - 1)].abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs()
                            * (h[(mu - 1, mu - 1)].abs() + z.abs() + h[(mu + 1, mu + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }
            let mu = m as usize;
            let lu = l as usize;

            for i in mu + 2..=nu {
                h[(i, i - 2)] = 0.0;
                if i > mu + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            let mut k = mu;
            while k < nu {
                let notlast = k != nu - 1;
                if k != mu {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != mu {
                        h[(k, k - 1)] = -s * x;
                    } else if lu != mu {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k, j)] -= p * x;
                        h[(k + 1, j)] -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k)] -= p;
                        h[(i, k + 1)] -= p * q;
                    }
                }
                k += 1;
            }
        }
    }

    Ok(re
        .into_iter()
        .zip(im)
        .map(|(r, i)| ComplexValue::new(r, i))
        .collect())
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &Matrix) -> Result<f64> {
    Ok(general_eigenvalues(a)?
        .iter()
        .map(ComplexValue::modulus)
        .fold(0.0, f64::max))
}

/// Largest singular value, as the square root of the top eigenvalue of the
/// smaller Gram matrix.
pub fn operator_norm(a: &Matrix) -> Result<f64> {
    let at = a.transpose();
    let gram = if a.rows() >= a.cols() {
        &at * a
    } else {
        a * &at
    };
    let (values, _) = symmetric_eig(&gram)?;
    Ok(values[0].max(0.0).sqrt())
}
