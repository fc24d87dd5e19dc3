//! Closed-form and inner-solver updates for the individual ADMM blocks.

use crate::error::{check_len, Result};
use crate::kernels::{
    cg_solve, max_real_root_depressed_cubic, CgOutcome, CgSettings, CubicCoefficients,
    LaplacianFilter,
};
use crate::operators::{GridDims, LinearOperator};
use crate::par;
use crate::vecops::norm2_sq;

/// Right-hand side pieces of the model update.
pub struct ModelRhs<'a> {
    pub data: &'a [f64],
    pub g1: &'a [f64],
    pub g2: &'a [f64],
    pub e: &'a [f64],
    pub lambda1: &'a [f64],
    pub lambda2: &'a [f64],
}

/// Solves `(mu1 D1ᵀD1 + mu2 GᵀG) m = mu1 D1ᵀ(g1 + g2 + λ1) + mu2 Gᵀ(d - e + λ2)`
/// by conjugate gradients started at `m0`.
pub fn solve_model_update(
    d1: &dyn LinearOperator,
    g: &dyn LinearOperator,
    mu1: f64,
    mu2: f64,
    rhs: &ModelRhs<'_>,
    m0: &[f64],
    cg: &CgSettings,
) -> Result<CgOutcome> {
    let n = g.cols();
    check_len("model update D1 rows", d1.rows(), rhs.g1.len())?;
    check_len("model update data", g.rows(), rhs.data.len())?;

    let grad_target: Vec<f64> = rhs
        .g1
        .iter()
        .zip(rhs.g2)
        .zip(rhs.lambda1)
        .map(|((a, b), c)| a + b + c)
        .collect();
    let data_target: Vec<f64> = rhs
        .data
        .iter()
        .zip(rhs.e)
        .zip(rhs.lambda2)
        .map(|((d, e), l)| d - e + l)
        .collect();
    let mut b = d1.adjoint(&grad_target);
    let gt = g.adjoint(&data_target);
    for (bi, gi) in b.iter_mut().zip(&gt) {
        *bi = mu1 * *bi + mu2 * gi;
    }

    let mut grad = vec![0.0; d1.rows()];
    let mut back = vec![0.0; n];
    let mut proj = vec![0.0; g.rows()];
    let mut back_g = vec![0.0; n];
    let apply = |x: &[f64], y: &mut [f64]| {
        d1.forward_into(x, &mut grad);
        d1.adjoint_into(&grad, &mut back);
        g.forward_into(x, &mut proj);
        g.adjoint_into(&proj, &mut back_g);
        for ((yi, a), b) in y.iter_mut().zip(&back).zip(&back_g) {
            *yi = mu1 * a + mu2 * b;
        }
    };
    cg_solve(apply, &b, m0, cg)
}

/// Component-wise soft threshold `x_i max(1 - t/|x_i|, 0)`, zero at zero.
pub fn soft_threshold(x: &[f64], t: f64) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let a = v.abs();
            if a > t {
                v * (1.0 - t / a)
            } else {
                0.0
            }
        })
        .collect()
}

/// Proximal step on the blocky gradient: `T_{1/mu1}(D1 m - g2 - λ1)`.
pub fn gradient_shrink(dm: &[f64], g2: &[f64], lambda1: &[f64], mu1: f64) -> Vec<f64> {
    let arg: Vec<f64> = dm
        .iter()
        .zip(g2)
        .zip(lambda1)
        .map(|((a, b), c)| a - b - c)
        .collect();
    soft_threshold(&arg, 1.0 / mu1)
}

/// Applies `(I + c·D̄1ᵀD̄1)⁻¹` exactly.
///
/// In 2D the operator is block diagonal: the horizontal block is a set of
/// independent tridiagonal systems along each grid row, the vertical block
/// along each grid column.
#[derive(Debug, Clone)]
pub struct SmoothFilter {
    dims: GridDims,
    along_z: LaplacianFilter,
    along_x: Option<LaplacianFilter>,
}

impl SmoothFilter {
    pub fn new(dims: GridDims, c: f64) -> Result<Self> {
        let along_z = LaplacianFilter::new(dims.nz, c)?;
        let along_x = if dims.is_2d() {
            Some(LaplacianFilter::new(dims.nx, c)?)
        } else {
            None
        };
        Ok(Self { dims, along_z, along_x })
    }

    pub fn apply_in_place(&self, v: &mut [f64]) {
        let (nz, nx, n) = (self.dims.nz, self.dims.nx, self.dims.n());
        assert_eq!(v.len(), self.dims.gradient_len(), "smooth filter input length");
        match &self.along_x {
            None => self.along_z.solve_in_place(v),
            Some(fx) => {
                let (h, vert) = v.split_at_mut(n);
                // horizontal block: transpose so each grid row is contiguous
                let mut rows = vec![0.0; n];
                for ix in 0..nx {
                    for iz in 0..nz {
                        rows[iz * nx + ix] = h[ix * nz + iz];
                    }
                }
                par::for_each_chunk(&mut rows, nx, |_, line| fx.solve_in_place(line));
                for ix in 0..nx {
                    for iz in 0..nz {
                        h[ix * nz + iz] = rows[iz * nx + ix];
                    }
                }
                par::for_each_chunk(vert, nz, |_, line| self.along_z.solve_in_place(line));
            }
        }
    }
}

/// Result of the noise-vector update.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseUpdate {
    pub e: Vec<f64>,
    pub gamma: f64,
    /// `||r||²` with `r = d - G m + λ2`.
    pub residual_energy: f64,
}

/// Coefficients of the scale equation for `e = γ r`.
pub fn noise_cubic(energy: f64, epsilon: f64, lambda3: f64, mu2: f64, mu3: f64) -> CubicCoefficients {
    let denom = 2.0 * mu3 * energy;
    CubicCoefficients {
        p: (mu2 - 2.0 * mu3 * (epsilon + lambda3)) / denom,
        q: -mu2 / denom,
    }
}

/// `e = γ r`, with `γ` the largest real root of the scale cubic.
pub fn noise_update(r: &[f64], epsilon: f64, lambda3: f64, mu2: f64, mu3: f64) -> NoiseUpdate {
    let energy = norm2_sq(r);
    if energy < 1e-30 {
        return NoiseUpdate {
            e: vec![0.0; r.len()],
            gamma: 0.0,
            residual_energy: energy,
        };
    }
    let cubic = noise_cubic(energy, epsilon, lambda3, mu2, mu3);
    let gamma = max_real_root_depressed_cubic(cubic);
    debug_assert!(
        largest_root_minimizes(cubic, gamma, energy, epsilon + lambda3, mu2, mu3),
        "largest cubic root is not the minimizer of the noise subproblem"
    );
    NoiseUpdate {
        e: r.iter().map(|v| gamma * v).collect(),
        gamma,
        residual_energy: energy,
    }
}

/// `f(γ) = mu2 E/2 (γ - 1)² + mu3/2 (E γ² - shift)²`
pub fn noise_objective(gamma: f64, energy: f64, shift: f64, mu2: f64, mu3: f64) -> f64 {
    0.5 * mu2 * energy * (gamma - 1.0).powi(2) + 0.5 * mu3 * (energy * gamma * gamma - shift).powi(2)
}

fn largest_root_minimizes(
    cubic: CubicCoefficients,
    gamma: f64,
    energy: f64,
    shift: f64,
    mu2: f64,
    mu3: f64,
) -> bool {
    let f_top = noise_objective(gamma, energy, shift, mu2, mu3);
    crate::kernels::real_roots_depressed_cubic(cubic)
        .into_iter()
        .all(|g| f_top <= noise_objective(g, energy, shift, mu2, mu3) * (1.0 + 1e-9) + 1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{make_derivative_operator, DerivativeKind, Identity, ZeroOp};

    #[test]
    fn soft_threshold_values() {
        assert_eq!(soft_threshold(&[0.0, 2.0, 0.5, -2.0], 1.0), vec![0.0, 1.0, 0.0, -1.0]);
    }

    #[test]
    fn model_update_without_gradient_term() {
        let n = 5;
        let data = [1.0, 2.0, -1.0, 0.5, 3.0];
        let e = [0.1, 0.0, 0.2, -0.3, 0.0];
        let l2 = [0.0, 0.5, 0.0, 0.0, -1.0];
        let zeros = [0.0; 5];
        let rhs = ModelRhs {
            data: &data,
            g1: &zeros,
            g2: &zeros,
            e: &e,
            lambda1: &zeros,
            lambda2: &l2,
        };
        let out = solve_model_update(
            &ZeroOp { rows: n, cols: n },
            &Identity(n),
            10.0,
            1.0,
            &rhs,
            &zeros,
            &CgSettings::default(),
        )
        .unwrap();
        for i in 0..n {
            assert!((out.x[i] - (data[i] - e[i] + l2[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn filter_identity_at_zero_weight_and_constants() {
        for dims in [GridDims::one_d(12).unwrap(), GridDims::new(4, 5).unwrap()] {
            let f0 = SmoothFilter::new(dims, 0.0).unwrap();
            let mut v: Vec<f64> = (0..dims.gradient_len()).map(|i| (i as f64 * 0.37).sin()).collect();
            let orig = v.clone();
            f0.apply_in_place(&mut v);
            assert_eq!(v, orig);

            let f = SmoothFilter::new(dims, 4.0).unwrap();
            let mut c = vec![1.25; dims.gradient_len()];
            f.apply_in_place(&mut c);
            assert!(c.iter().all(|x| (x - 1.25).abs() < 1e-13));
        }
    }

    #[test]
    fn filter_inverts_normal_operator() {
        let dims = GridDims::new(5, 4).unwrap();
        let c = 1.7;
        let dbar = make_derivative_operator(DerivativeKind::Dbar1, dims).unwrap();
        let x: Vec<f64> = (0..40).map(|i| ((i * 7 % 11) as f64) - 5.0).collect();
        // y = (I + c D̄ᵀD̄) x, then filter back
        let dx = dbar.forward(&x);
        let dtdx = dbar.adjoint(&dx);
        let mut y: Vec<f64> = x.iter().zip(&dtdx).map(|(a, b)| a + c * b).collect();
        SmoothFilter::new(dims, c).unwrap().apply_in_place(&mut y);
        for (a, b) in y.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_update_on_budget() {
        // ||r||² = eps = 1, λ3 = 0, mu2 = mu3 = 1: no rescaling
        let r = [0.6, 0.8];
        let out = noise_update(&r, 1.0, 0.0, 1.0, 1.0);
        assert!((out.gamma - 1.0).abs() < 1e-14);
        assert_eq!(out.residual_energy, 1.0);
        let zero = noise_update(&[0.0, 0.0], 1.0, 0.0, 1.0, 1.0);
        assert_eq!(zero.gamma, 0.0);
        assert_eq!(zero.e, vec![0.0, 0.0]);
    }
}
