//! Splitting a reconstruction into blocky and smooth components.
//!
//! `m1` and `m2` are only defined up to a constant, so `m2` is taken as the
//! mean-zero potential of the smooth gradient `g2` and `m1 = m - m2`.

use tiktv::kernels::{cg_solve, CgSettings};
use tiktv::operators::{DerivativeOp, LinearOperator};
use tiktv::vecops::mean;
use tiktv::GridDims;

use crate::error::CliError;

pub const GAUGE_NOTE: &str = "m2 is the mean-zero potential of the final smooth gradient g2 \
(running sum in 1D, least-squares solution of D1 m2 = g2 in 2D); m1 = m - m2.";

pub struct Components {
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
}

pub fn decompose(m: &[f64], g2: &[f64], d1: &DerivativeOp, dims: GridDims) -> Result<Components, CliError> {
    let mut m2 = if dims.is_2d() {
        let b = d1.adjoint(g2);
        let settings = CgSettings { rel_tol: 1e-10, max_iter: 4 * dims.n().max(100), warm_start: false };
        let mut tmp = vec![0.0; d1.rows()];
        let apply = |x: &[f64], y: &mut [f64]| {
            d1.forward_into(x, &mut tmp);
            d1.adjoint_into(&tmp, y);
        };
        cg_solve(apply, &b, &vec![0.0; dims.n()], &settings)?.x
    } else {
        let mut acc = 0.0;
        let mut v = Vec::with_capacity(m.len());
        v.push(0.0);
        for g in &g2[..m.len() - 1] {
            acc += g;
            v.push(acc);
        }
        v
    };
    let shift = mean(&m2);
    m2.iter_mut().for_each(|x| *x -= shift);
    let m1 = m.iter().zip(&m2).map(|(a, b)| a - b).collect();
    Ok(Components { m1, m2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tiktv::operators::{make_derivative_operator, DerivativeKind};

    #[test]
    fn recovers_smooth_part_1d_and_2d() {
        for dims in [GridDims::one_d(40).unwrap(), GridDims::new(12, 9).unwrap()] {
            let d1 = make_derivative_operator(DerivativeKind::D1, dims).unwrap();
            let smooth: Vec<f64> = (0..dims.n()).map(|i| (i as f64 * 0.37).sin()).collect();
            let blocky: Vec<f64> = (0..dims.n()).map(|i| if i > dims.n() / 2 { 1.0 } else { 0.0 }).collect();
            let m: Vec<f64> = smooth.iter().zip(&blocky).map(|(a, b)| a + b).collect();
            let c = decompose(&m, &d1.forward(&smooth), &d1, dims).unwrap();
            let s_mean = mean(&smooth);
            for i in 0..dims.n() {
                assert!((c.m2[i] - (smooth[i] - s_mean)).abs() < 1e-7, "{dims} {i}");
                assert!((c.m1[i] + c.m2[i] - m[i]).abs() < 1e-12);
            }
        }
    }
}
