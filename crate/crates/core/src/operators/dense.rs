use super::{assert_shape, LinearOperator};
use crate::error::{Error, Result};
use crate::par;
use crate::rng;
use crate::vecops::dot;

/// Default guard for [`to_dense`]: at most a million entries.
pub const DENSE_LIMIT: usize = 1_000_000;

/// Row-major dense matrix; also usable as an operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    label: String,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
            label: "dense".into(),
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                context: "DenseMatrix::from_row_major",
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            data,
            label: "dense".into(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                context: "DenseMatrix::matmul",
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }
}

impl LinearOperator for DenseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn label(&self) -> String {
        self.label.clone()
    }

    fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), false);
        par::fill_indexed(y, |i| dot(self.row(i), x));
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), true);
        let cols = self.cols;
        par::fill_indexed(x, |j| {
            let mut s = 0.0;
            for (i, yi) in y.iter().enumerate() {
                s += self.data[i * cols + j] * yi;
            }
            s
        });
    }
}

/// Random sensing matrix with unit-norm columns.
///
/// Entries are drawn column by column (all of column 0, then column 1, ...)
/// from the seeded standard-normal stream, then each column is normalized.
pub fn make_gaussian_sensing(m: usize, n: usize, seed: u64) -> Result<DenseMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "sensing matrix needs positive size, got {m}x{n}"
        )));
    }
    let mut rng = rng::seeded(seed);
    let mut a = DenseMatrix::zeros(m, n).with_label(format!("gaussian({m}x{n}, seed={seed})"));
    for j in 0..n {
        let col = rng::standard_normal_vec(&mut rng, m);
        let norm = crate::vecops::norm2(&col);
        for (i, v) in col.iter().enumerate() {
            a.set(i, j, v / norm);
        }
    }
    Ok(a)
}

pub fn to_dense(op: &dyn LinearOperator) -> Result<DenseMatrix> {
    to_dense_with_limit(op, DENSE_LIMIT)
}

/// Column `j` of the result is `op.forward(e_j)`.
pub fn to_dense_with_limit(op: &dyn LinearOperator, limit: usize) -> Result<DenseMatrix> {
    let (rows, cols) = (op.rows(), op.cols());
    if rows.saturating_mul(cols) > limit {
        return Err(Error::DenseLimit { rows, cols, limit });
    }
    let mut out = DenseMatrix::zeros(rows, cols).with_label(format!("dense({})", op.label()));
    let mut e = vec![0.0; cols];
    let mut y = vec![0.0; rows];
    for j in 0..cols {
        e[j] = 1.0;
        op.forward_into(&e, &mut y);
        for (i, v) in y.iter().enumerate() {
            out.set(i, j, *v);
        }
        e[j] = 0.0;
    }
    Ok(out)
}
