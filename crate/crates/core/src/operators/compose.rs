use std::sync::Arc;

use super::{assert_shape, LinearOperator, Operator};
use crate::error::{Error, Result};

/// `a ∘ b`: forward applies `b` then `a`.
#[derive(Clone)]
pub struct Composed {
    a: Operator,
    b: Operator,
}

pub fn compose(a: Operator, b: Operator) -> Result<Composed> {
    if a.cols() != b.rows() {
        return Err(Error::ShapeMismatch {
            context: "compose",
            expected: a.cols(),
            actual: b.rows(),
        });
    }
    Ok(Composed { a, b })
}

impl LinearOperator for Composed {
    fn rows(&self) -> usize {
        self.a.rows()
    }

    fn cols(&self) -> usize {
        self.b.cols()
    }

    fn label(&self) -> String {
        format!("{} * {}", self.a.label(), self.b.label())
    }

    fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), false);
        let mid = self.b.forward(x);
        self.a.forward_into(&mid, y);
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), true);
        let mid = self.a.adjoint(y);
        self.b.adjoint_into(&mid, x);
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn rows(&self) -> usize {
        self.0
    }
    fn cols(&self) -> usize {
        self.0
    }
    fn label(&self) -> String {
        format!("identity({})", self.0)
    }
    fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), false);
        y.copy_from_slice(x);
    }
    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), true);
        x.copy_from_slice(y);
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroOp {
    pub rows: usize,
    pub cols: usize,
}

impl LinearOperator for ZeroOp {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn label(&self) -> String {
        format!("zero({}x{})", self.rows, self.cols)
    }
    fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), false);
        y.fill(0.0);
    }
    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), true);
        x.fill(0.0);
    }
}

/// `(across ⊗ along)` acting on a column-major field with `along.cols()` rows
/// and `across.cols()` columns: `along` is applied to every column (trace),
/// then `across` mixes the columns. Equivalent to `vec(A X Bᵀ)` with
/// `A = along`, `B = across`.
#[derive(Clone)]
pub struct KroneckerOp {
    across: Operator,
    along: Operator,
}

impl KroneckerOp {
    pub fn new(across: Operator, along: Operator) -> Self {
        Self { across, along }
    }

    fn apply(&self, x: &[f64], y: &mut [f64], adjoint: bool) {
        let (a_in, a_out, b_in, b_out) = if adjoint {
            (self.along.rows(), self.along.cols(), self.across.rows(), self.across.cols())
        } else {
            (self.along.cols(), self.along.rows(), self.across.cols(), self.across.rows())
        };
        // Stage 1: along every input column.
        let columns: Vec<Vec<f64>> = crate::par::map_range(b_in, |c| {
            let col = &x[c * a_in..(c + 1) * a_in];
            if adjoint {
                self.along.adjoint(col)
            } else {
                self.along.forward(col)
            }
        });
        // Stage 2: across, one output row at a time.
        let mut row_in = vec![0.0; b_in];
        let mut row_out = vec![0.0; b_out];
        for r in 0..a_out {
            for (c, col) in columns.iter().enumerate() {
                row_in[c] = col[r];
            }
            if adjoint {
                self.across.adjoint_into(&row_in, &mut row_out);
            } else {
                self.across.forward_into(&row_in, &mut row_out);
            }
            for (c, v) in row_out.iter().enumerate() {
                y[c * a_out + r] = *v;
            }
        }
    }
}

impl LinearOperator for KroneckerOp {
    fn rows(&self) -> usize {
        self.across.rows() * self.along.rows()
    }

    fn cols(&self) -> usize {
        self.across.cols() * self.along.cols()
    }

    fn label(&self) -> String {
        format!("({}) kron ({})", self.across.label(), self.along.label())
    }

    fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), false);
        self.apply(x, y, false);
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), true);
        self.apply(y, x, true);
    }
}

impl From<Composed> for Operator {
    fn from(c: Composed) -> Self {
        Arc::new(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::make_causal_integration;

    #[test]
    fn compose_rejects_shape_mismatch() {
        let a: Operator = Arc::new(Identity(3));
        let b: Operator = Arc::new(Identity(4));
        assert!(matches!(compose(a, b), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn identity_compose_is_noop() {
        let a: Operator = Arc::new(Identity(4));
        let b: Operator = Arc::new(make_causal_integration(4).unwrap());
        let c = compose(a, b.clone()).unwrap();
        let x = [1.0, -2.0, 0.5, 3.0];
        assert_eq!(c.forward(&x), b.forward(&x));
        assert_eq!(c.adjoint(&x), b.adjoint(&x));
    }
}
