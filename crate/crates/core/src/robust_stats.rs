//! Robust z-scores on the model gradient and the balancing-parameter update.
//!
//! Entries of `g = D1 m` whose robust z-score exceeds `tau_nrm` in magnitude
//! are treated as jumps of the blocky component; the rest form the "normal"
//! set `nrm(g)`. The balancing parameter is driven towards the root of
//! `phi(beta) = ||g2||_inf - ||nrm(g)||_inf`.

use crate::error::{check_len, Error, Result};
use crate::vecops::norm_inf;

/// Gaussian consistency constant for the MAD.
pub const MAD_SCALE: f64 = 1.4826;

/// Median of a non-empty vector; mean of the two middle values for even length.
pub fn median(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::EmptyInput("median"));
    }
    let mut s = v.to_vec();
    Ok(median_in_place(&mut s))
}

fn median_in_place(s: &mut [f64]) -> f64 {
    let n = s.len();
    let mid = n / 2;
    let (lower, upper, _) = s.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower_max = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower_max + upper)
    }
}

/// `1.4826 * median(|v - median(v)|)`.
pub fn mad(v: &[f64]) -> Result<f64> {
    let med = median(v)?;
    Ok(mad_about(v, med))
}

fn mad_about(v: &[f64], med: f64) -> f64 {
    let mut dev: Vec<f64> = v.iter().map(|x| (x - med).abs()).collect();
    MAD_SCALE * median_in_place(&mut dev)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientStats {
    pub median_g: f64,
    pub mad_g: f64,
    pub z: Vec<f64>,
    pub normal_mask: Vec<bool>,
    /// `||nrm(g)||_inf`
    pub nrm_inf: f64,
    /// `||g2||_inf`
    pub g2_inf: f64,
    /// `g2_inf - nrm_inf`
    pub phi: f64,
    /// MAD was numerically zero, so every entry was declared normal.
    pub mad_degenerate: bool,
    /// No entry passed the threshold; `nrm(g)` was taken to be `g`.
    pub normal_set_empty: bool,
}

impl GradientStats {
    pub fn n_anomalous(&self) -> usize {
        self.normal_mask.iter().filter(|&&m| !m).count()
    }
}

pub fn gradient_stats(g: &[f64], g2: &[f64], tau_nrm: f64) -> Result<GradientStats> {
    check_len("gradient_stats g2", g.len(), g2.len())?;
    if !(tau_nrm > 0.0) {
        return Err(Error::InvalidArgument(format!("tau_nrm must be > 0, got {tau_nrm}")));
    }
    let median_g = median(g)?;
    let mad_g = mad_about(g, median_g);
    let g_inf = norm_inf(g);
    let g2_inf = norm_inf(g2);

    let mad_degenerate = mad_g < 1e-12 * (1.0 + g_inf);
    let (z, normal_mask): (Vec<f64>, Vec<bool>) = if mad_degenerate {
        (vec![0.0; g.len()], vec![true; g.len()])
    } else {
        g.iter()
            .map(|&gi| {
                let z = (gi - median_g) / mad_g;
                (z, z.abs() <= tau_nrm)
            })
            .unzip()
    };

    let normal_set_empty = !normal_mask.iter().any(|&m| m);
    let nrm_inf = if normal_set_empty {
        g_inf
    } else {
        g.iter()
            .zip(&normal_mask)
            .filter(|(_, &m)| m)
            .fold(0.0_f64, |acc, (gi, _)| acc.max(gi.abs()))
    };

    Ok(GradientStats {
        median_g,
        mad_g,
        z,
        normal_mask,
        nrm_inf,
        g2_inf,
        phi: g2_inf - nrm_inf,
        mad_degenerate,
        normal_set_empty,
    })
}

/// The second term of the averaged update, `(4 g2_inf / (g2_inf + nrm_inf) - 1) beta`.
pub fn psi(beta: f64, g2_inf: f64, nrm_inf: f64) -> f64 {
    (4.0 * g2_inf / (g2_inf + nrm_inf) - 1.0) * beta
}

/// One averaged fixed-point step `beta/2 + psi(beta)/2`, kept strictly positive.
pub fn beta_update(beta: f64, stats: &GradientStats) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta must be finite and > 0, got {beta}")));
    }
    if !stats.g2_inf.is_finite() || !stats.nrm_inf.is_finite() {
        return Err(Error::NonFinite("beta_update statistics"));
    }
    let denom = stats.g2_inf + stats.nrm_inf;
    if !(denom > 0.0) {
        return Ok(beta);
    }
    let next = 0.5 * beta + 0.5 * psi(beta, stats.g2_inf, stats.nrm_inf);
    Ok(next.max(1e-12 * beta))
}
