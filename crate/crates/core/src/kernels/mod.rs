//! Numerical kernels used inside the ADMM iteration.

mod cg;
mod cubic;
mod tridiag;

pub use cg::{cg_solve, CgOutcome, CgSettings};
pub use cubic::{max_real_root_depressed_cubic, real_roots_depressed_cubic, CubicCoefficients};
pub use tridiag::{tridiagonal_solve, LaplacianFilter};
