//! Forward-difference gradient operators with a zero last row.

use super::{assert_shape, GridDims, LinearOperator};
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeKind {
    /// Gradient: `N x N` in 1D, `2N x N` in 2D (horizontal block first).
    D1,
    /// Second differences `Dbar1 * D1`.
    D2,
    /// First differences applied blockwise to a gradient field: `N x N` in 1D,
    /// `2N x 2N` block-diagonal in 2D.
    Dbar1,
}

#[derive(Debug, Clone, Copy)]
pub struct DerivativeOp {
    kind: DerivativeKind,
    dims: GridDims,
}

pub fn make_derivative_operator(kind: DerivativeKind, dims: GridDims) -> Result<DerivativeOp> {
    if dims.nz < 2 || dims.n() < 2 {
        return Err(Error::InvalidArgument(format!(
            "derivative operator needs at least 2 samples per column, got {dims}"
        )));
    }
    Ok(DerivativeOp { kind, dims })
}

impl DerivativeOp {
    pub fn kind(&self) -> DerivativeKind {
        self.kind
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }
}

// Horizontal difference of a column-major field: x[k + nz] - x[k], zero in the last column.
fn diff_x(dims: GridDims, x: &[f64], y: &mut [f64]) {
    let interior = (dims.nx - 1) * dims.nz;
    let nz = dims.nz;
    par::fill_indexed(y, |k| if k < interior { x[k + nz] - x[k] } else { 0.0 });
}

fn diff_x_adjoint(dims: GridDims, y: &[f64], x: &mut [f64]) {
    let interior = (dims.nx - 1) * dims.nz;
    let nz = dims.nz;
    par::fill_indexed(x, |k| {
        let left = if k >= nz { y[k - nz] } else { 0.0 };
        let here = if k < interior { y[k] } else { 0.0 };
        left - here
    });
}

// Vertical difference within each column: x[k + 1] - x[k], zero in the last row.
fn diff_z(dims: GridDims, x: &[f64], y: &mut [f64]) {
    let nz = dims.nz;
    par::fill_indexed(y, |k| if k % nz < nz - 1 { x[k + 1] - x[k] } else { 0.0 });
}

fn diff_z_adjoint(dims: GridDims, y: &[f64], x: &mut [f64]) {
    let nz = dims.nz;
    par::fill_indexed(x, |k| {
        let iz = k % nz;
        let above = if iz >= 1 { y[k - 1] } else { 0.0 };
        let here = if iz < nz - 1 { y[k] } else { 0.0 };
        above - here
    });
}

impl DerivativeOp {
    fn d1(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dims.n();
        if self.dims.is_2d() {
            let (h, v) = y.split_at_mut(n);
            diff_x(self.dims, x, h);
            diff_z(self.dims, x, v);
        } else {
            diff_z(self.dims, x, y);
        }
    }

    fn d1_adjoint(&self, y: &[f64], x: &mut [f64]) {
        let n = self.dims.n();
        if self.dims.is_2d() {
            let mut tmp = vec![0.0; n];
            diff_x_adjoint(self.dims, &y[..n], x);
            diff_z_adjoint(self.dims, &y[n..], &mut tmp);
            x.iter_mut().zip(&tmp).for_each(|(a, b)| *a += b);
        } else {
            diff_z_adjoint(self.dims, y, x);
        }
    }

    fn dbar1(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dims.n();
        if self.dims.is_2d() {
            let (h, v) = y.split_at_mut(n);
            diff_x(self.dims, &x[..n], h);
            diff_z(self.dims, &x[n..], v);
        } else {
            diff_z(self.dims, x, y);
        }
    }

    fn dbar1_adjoint(&self, y: &[f64], x: &mut [f64]) {
        let n = self.dims.n();
        if self.dims.is_2d() {
            let (h, v) = x.split_at_mut(n);
            diff_x_adjoint(self.dims, &y[..n], h);
            diff_z_adjoint(self.dims, &y[n..], v);
        } else {
            diff_z_adjoint(self.dims, y, x);
        }
    }
}

impl LinearOperator for DerivativeOp {
    fn rows(&self) -> usize {
        match self.kind {
            DerivativeKind::D1 | DerivativeKind::D2 | DerivativeKind::Dbar1 => {
                self.dims.gradient_len()
            }
        }
    }

    fn cols(&self) -> usize {
        match self.kind {
            DerivativeKind::D1 | DerivativeKind::D2 => self.dims.n(),
            DerivativeKind::Dbar1 => self.dims.gradient_len(),
        }
    }

    fn label(&self) -> String {
        format!("{:?}({})", self.kind, self.dims)
    }

    fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), false);
        match self.kind {
            DerivativeKind::D1 => self.d1(x, y),
            DerivativeKind::Dbar1 => self.dbar1(x, y),
            DerivativeKind::D2 => {
                let mut g = vec![0.0; self.dims.gradient_len()];
                self.d1(x, &mut g);
                self.dbar1(&g, y);
            }
        }
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), true);
        match self.kind {
            DerivativeKind::D1 => self.d1_adjoint(y, x),
            DerivativeKind::Dbar1 => self.dbar1_adjoint(y, x),
            DerivativeKind::D2 => {
                let mut g = vec![0.0; self.dims.gradient_len()];
                self.dbar1_adjoint(y, &mut g);
                self.d1_adjoint(&g, x);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(kind: DerivativeKind, nz: usize, nx: usize) -> DerivativeOp {
        make_derivative_operator(kind, GridDims::new(nz, nx).unwrap()).unwrap()
    }

    #[test]
    fn d1_1d_stencil() {
        let d1 = op(DerivativeKind::D1, 4, 1);
        assert_eq!(d1.forward(&[1.0, 2.0, 4.0, 7.0]), vec![1.0, 2.0, 3.0, 0.0]);
    }

    #[test]
    fn d2_1d_ramp() {
        let d2 = op(DerivativeKind::D2, 4, 1);
        assert_eq!(d2.forward(&[0.0, 1.0, 2.0, 3.0]), vec![0.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn d1_2d_small_grid() {
        let d1 = op(DerivativeKind::D1, 2, 2);
        assert_eq!(
            d1.forward(&[1.0, 2.0, 3.0, 4.0]),
            vec![2.0, 2.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]
        );
    }

    #[test]
    fn shapes() {
        let d = GridDims::new(3, 5).unwrap();
        let d1 = make_derivative_operator(DerivativeKind::D1, d).unwrap();
        let db = make_derivative_operator(DerivativeKind::Dbar1, d).unwrap();
        let d2 = make_derivative_operator(DerivativeKind::D2, d).unwrap();
        assert_eq!((d1.rows(), d1.cols()), (30, 15));
        assert_eq!((db.rows(), db.cols()), (30, 30));
        assert_eq!((d2.rows(), d2.cols()), (30, 15));
    }

    #[test]
    fn rejects_tiny_grid() {
        assert!(GridDims::new(1, 4).is_err());
        assert!(make_derivative_operator(DerivativeKind::D1, GridDims { nz: 1, nx: 1 }).is_err());
    }

    #[test]
    fn constants_are_annihilated() {
        for (nz, nx) in [(7, 1), (5, 6)] {
            let d1 = op(DerivativeKind::D1, nz, nx);
            let y = d1.forward(&vec![3.25; nz * nx]);
            assert!(y.iter().all(|&v| v == 0.0));
        }
    }
}
