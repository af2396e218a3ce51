//! Dense row-major real matrices.
//!
//! Every operator in this crate (projectors, splitting operators, inner maps)
//! is carried as a [`Matrix`]. Values are immutable in spirit: arithmetic
//! returns new matrices and nothing is shared behind the caller's back.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch("rows of unequal length".into()));
        }
        Self::new(n_rows, n_cols, rows.concat())
    }

    /// Column vector (n x 1).
    pub fn column(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix shape must be non-empty");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// (A + Aᵀ)/2. Panics on non-square input.
    pub fn symmetrize(&self) -> Self {
        assert!(self.is_square(), "symmetrize needs a square matrix");
        Self::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self[(i, j)] + self[(j, i)])
        })
    }

    /// ‖A − Aᵀ‖_F.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self[(i, j)] - self[(j, i)];
                s += d * d;
            }
        }
        s.sqrt()
    }

    /// Checked product `self · rhs`.
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch(format!(
                "elementwise op on {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    /// Matrix-vector product. Panics when `x.len() != cols`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.matvec_into(x, &mut out);
        out
    }

    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.cols, "matvec length mismatch");
        assert_eq!(out.len(), self.rows, "matvec output length mismatch");
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// Assembles a grid of blocks into one matrix.
    ///
    /// Blocks in a grid row must share a row count, blocks in a grid column
    /// must share a column count.
    pub fn block_assemble(grid: &[Vec<Matrix>]) -> Result<Matrix> {
        let n_block_rows = grid.len();
        if n_block_rows == 0 {
            return Err(Error::RaggedBlocks("empty grid".into()));
        }
        let n_block_cols = grid[0].len();
        if n_block_cols == 0 || grid.iter().any(|r| r.len() != n_block_cols) {
            return Err(Error::RaggedBlocks(
                "grid rows hold different numbers of blocks".into(),
            ));
        }
        let row_heights: Vec<usize> = grid.iter().map(|r| r[0].rows).collect();
        let col_widths: Vec<usize> = grid[0].iter().map(|b| b.cols).collect();
        for (bi, grid_row) in grid.iter().enumerate() {
            for (bj, block) in grid_row.iter().enumerate() {
                if block.rows != row_heights[bi] || block.cols != col_widths[bj] {
                    return Err(Error::RaggedBlocks(format!(
                        "block ({bi}, {bj}) is {}x{}, expected {}x{}",
                        block.rows, block.cols, row_heights[bi], col_widths[bj]
                    )));
                }
            }
        }
        let total_rows: usize = row_heights.iter().sum();
        let total_cols: usize = col_widths.iter().sum();
        let mut out = Matrix::zeros(total_rows, total_cols);
        let mut r0 = 0;
        for (bi, grid_row) in grid.iter().enumerate() {
            let mut c0 = 0;
            for (bj, block) in grid_row.iter().enumerate() {
                out.set_block(r0, c0, block);
                c0 += col_widths[bj];
            }
            r0 += row_heights[bi];
        }
        Ok(out)
    }

    /// Splits a matrix into a grid with the given block heights and widths.
    pub fn block_extract(&self, heights: &[usize], widths: &[usize]) -> Result<Vec<Vec<Matrix>>> {
        if heights.iter().sum::<usize>() != self.rows || widths.iter().sum::<usize>() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "block sizes do not tile a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut grid = Vec::with_capacity(heights.len());
        let mut r0 = 0;
        for &h in heights {
            let mut row = Vec::with_capacity(widths.len());
            let mut c0 = 0;
            for &w in widths {
                row.push(self.submatrix(r0, c0, h, w)?);
                c0 += w;
            }
            grid.push(row);
            r0 += h;
        }
        Ok(grid)
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Result<Matrix> {
        if rows == 0 || cols == 0 || r0 + rows > self.rows || c0 + cols > self.cols {
            return Err(Error::DimensionMismatch(format!(
                "submatrix {rows}x{cols} at ({r0}, {c0}) outside {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(Matrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)]))
    }

    /// Square `d x d` block `(bi, bj)` of a matrix tiled by `d`.
    pub fn block(&self, bi: usize, bj: usize, d: usize) -> Matrix {
        Matrix::from_fn(d, d, |i, j| self[(bi * d + i, bj * d + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(i));
        }
    }

    /// Block-diagonal matrix from the given square or rectangular blocks.
    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// ‖self − other‖_F.
    pub fn distance(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator sugar for internal formulas whose shapes are fixed by construction.
// Mismatched shapes are programming errors here and panic; use the `try_*`
// and `matmul` methods for checked arithmetic.

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v:>12.6e}")).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Euclidean norm of a vector.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// ‖a − b‖₂.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_product(a: &Matrix, b: &Matrix) -> Matrix {
        Matrix::from_fn(a.rows(), b.cols(), |i, j| {
            (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum()
        })
    }

    #[test]
    fn identity_times_matrix() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(Matrix::identity(2).matmul(&a).unwrap(), a);
    }

    #[test]
    fn nilpotent_square_is_zero() {
        let n = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(n.matmul(&n).unwrap(), Matrix::zeros(2, 2));
    }

    #[test]
    fn product_matches_triple_loop() {
        let a = Matrix::from_fn(3, 4, |i, j| ((i * 7 + j * 3) % 5) as f64 - 1.7);
        let b = Matrix::from_fn(4, 2, |i, j| (i as f64 + 0.5) * (j as f64 - 0.25));
        let got = a.matmul(&b).unwrap();
        assert!(got.max_abs_diff(&naive_product(&a, &b)) < 1e-14);
    }

    #[test]
    fn product_shape_mismatch_is_error() {
        let a = Matrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(matches!(Matrix::new(0, 2, vec![]), Err(Error::Empty)));
        assert!(matches!(
            Matrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(Matrix::new(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn assemble_scalars() {
        let s = |v: f64| Matrix::new(1, 1, vec![v]).unwrap();
        let m = Matrix::block_assemble(&[vec![s(1.0), s(2.0)], vec![s(3.0), s(4.0)]]).unwrap();
        assert_eq!(
            m,
            Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap()
        );
    }

    #[test]
    fn assemble_identity_blocks() {
        let i2 = Matrix::identity(2);
        let z2 = Matrix::zeros(2, 2);
        let m = Matrix::block_assemble(&[vec![i2.clone(), z2.clone()], vec![z2, i2]]).unwrap();
        assert_eq!(m, Matrix::identity(4));
    }

    #[test]
    fn ragged_grid_is_rejected() {
        let grid = vec![
            vec![Matrix::zeros(2, 2), Matrix::zeros(2, 1)],
            vec![Matrix::zeros(1, 2), Matrix::zeros(2, 1)],
        ];
        assert!(matches!(
            Matrix::block_assemble(&grid),
            Err(Error::RaggedBlocks(_))
        ));
        assert!(Matrix::block_assemble(&[vec![Matrix::zeros(1, 1)], vec![]]).is_err());
    }
}
