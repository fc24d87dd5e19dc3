//! Matrix-free linear operators with adjoints.
//!
//! Models on 2D grids are stacked column-major (z fastest): sample `(iz, ix)`
//! lives at index `ix * nz + iz`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

mod compose;
mod dense;
mod derivative;
mod radon;
mod sampling;

pub use compose::{compose, Composed, Identity, KroneckerOp, ZeroOp};
pub use dense::{make_gaussian_sensing, to_dense, to_dense_with_limit, DenseMatrix, DENSE_LIMIT};
pub use derivative::{make_derivative_operator, DerivativeKind, DerivativeOp};
pub use radon::{make_radon, ray_pixel_intersections, RadonOp, RayGeometry};
pub use sampling::{make_causal_integration, make_subsampler, CausalIntegration, Subsampler};

/// A linear map `R^cols -> R^rows` known only through its action and the
/// action of its transpose.
///
/// `forward_into` and `adjoint_into` overwrite their output buffer and panic
/// if the buffer lengths do not conform to the declared shape.
pub trait LinearOperator: Send + Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn label(&self) -> String;

    fn forward_into(&self, x: &[f64], y: &mut [f64]);
    fn adjoint_into(&self, y: &[f64], x: &mut [f64]);

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows()];
        self.forward_into(x, &mut y);
        y
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.cols()];
        self.adjoint_into(y, &mut x);
        x
    }
}

pub type Operator = Arc<dyn LinearOperator>;

impl fmt::Debug for dyn LinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}x{}]", self.label(), self.rows(), self.cols())
    }
}

/// Checks a model-side length `x` against `cols` and a data-side length `y`
/// against `rows`.
pub(crate) fn assert_shape(op: &dyn LinearOperator, x: usize, y: usize, adjoint: bool) {
    assert!(
        x == op.cols() && y == op.rows(),
        "{} {}: model-side length {} (expected {}), data-side length {} (expected {})",
        op.label(),
        if adjoint { "adjoint" } else { "forward" },
        x,
        op.cols(),
        y,
        op.rows()
    );
}

/// Grid of model samples: `nz` vertical samples by `nx` horizontal samples.
/// `nx == 1` denotes a 1D model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridDims {
    pub nz: usize,
    pub nx: usize,
}

impl GridDims {
    pub fn new(nz: usize, nx: usize) -> Result<Self> {
        if nz < 2 || nx < 1 {
            return Err(Error::InvalidArgument(format!(
                "grid must have nz >= 2 and nx >= 1, got {nz}x{nx}"
            )));
        }
        Ok(Self { nz, nx })
    }

    pub fn one_d(n: usize) -> Result<Self> {
        Self::new(n, 1)
    }

    pub fn n(&self) -> usize {
        self.nz * self.nx
    }

    pub fn is_2d(&self) -> bool {
        self.nx > 1
    }

    /// Length of the stacked gradient: `N` in 1D, `2N` in 2D.
    pub fn gradient_len(&self) -> usize {
        if self.is_2d() {
            2 * self.n()
        } else {
            self.n()
        }
    }

    #[inline]
    pub fn index(&self, iz: usize, ix: usize) -> usize {
        ix * self.nz + iz
    }
}

impl fmt::Display for GridDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.nz, self.nx)
    }
}
