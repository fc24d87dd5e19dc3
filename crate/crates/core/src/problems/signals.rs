//! Closed-form 1D test signals and velocity profiles.
//!
//! Every signal is a function of the normalized coordinate `t = i / (n - 1)`,
//! so the same kind sampled at different `n` describes the same curve.

use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MIN_SIGNAL_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalKind {
    Smooth,
    PiecewiseSmooth,
    Blocky,
    Mixed,
}

impl SignalKind {
    pub const ALL: [SignalKind; 4] = [
        SignalKind::Smooth,
        SignalKind::PiecewiseSmooth,
        SignalKind::Blocky,
        SignalKind::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SignalKind::Smooth => "smooth",
            SignalKind::PiecewiseSmooth => "piecewise_smooth",
            SignalKind::Blocky => "blocky",
            SignalKind::Mixed => "mixed",
        }
    }
}

impl FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SignalKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown signal kind `{s}`")))
    }
}

/// Jump positions (as fractions of the domain) and the levels between them.
pub const BLOCKY_JUMPS: [f64; 4] = [0.15, 0.35, 0.55, 0.8];
const BLOCKY_LEVELS: [f64; 5] = [0.0, 1.0, -0.5, 0.7, 0.2];

fn blocky_at(t: f64) -> f64 {
    let k = BLOCKY_JUMPS.iter().filter(|&&j| t >= j).count();
    BLOCKY_LEVELS[k]
}

// Cosines only, so the slope vanishes at both ends of the domain. The
// harmonics add up to a sharper crest at the ends, where the slope is far
// larger than over the rest of the signal.
const SMOOTH_WEIGHTS: [f64; 4] = [0.5, 0.35, 0.25, 0.15];

fn smooth_at(t: f64) -> f64 {
    SMOOTH_WEIGHTS
        .iter()
        .enumerate()
        .map(|(k, w)| w * (2.0 * PI * (k + 1) as f64 * t).cos())
        .sum()
}

/// Upper bound on `|smooth(t)|`.
pub const SMOOTH_AMPLITUDE: f64 = 1.25;

fn ramp_at(t: f64) -> f64 {
    0.8 * ((t - 0.6) / 0.15).clamp(0.0, 1.0)
}

fn signal_at(kind: SignalKind, t: f64) -> f64 {
    match kind {
        SignalKind::Smooth => smooth_at(t),
        SignalKind::Blocky => blocky_at(t),
        SignalKind::PiecewiseSmooth => blocky_at(t) + 0.5 * smooth_at(t),
        SignalKind::Mixed => blocky_at(t) + 0.5 * smooth_at(t) + ramp_at(t),
    }
}

fn grid(n: usize) -> impl Iterator<Item = f64> {
    let h = 1.0 / (n - 1) as f64;
    (0..n).map(move |i| i as f64 * h)
}

pub fn make_test_signal(kind: SignalKind, n: usize) -> Result<Vec<f64>> {
    if n < MIN_SIGNAL_LEN {
        return Err(Error::InvalidArgument(format!(
            "test signals need at least {MIN_SIGNAL_LEN} samples, got {n}"
        )));
    }
    Ok(grid(n).map(|t| signal_at(kind, t)).collect())
}

/// Interval velocity log: a linear trend with a gentle oscillation plus four
/// layer contrasts, one of them a high-velocity slab.
pub fn make_velocity_profile(n: usize) -> Result<Vec<f64>> {
    if n < MIN_SIGNAL_LEN {
        return Err(Error::InvalidArgument(format!(
            "velocity profiles need at least {MIN_SIGNAL_LEN} samples, got {n}"
        )));
    }
    Ok(grid(n).map(velocity_at).collect())
}

pub(crate) fn velocity_at(t: f64) -> f64 {
    let trend = 1.5 + 1.2 * t + 0.15 * (3.0 * PI * t).sin();
    let layers = if t >= 0.82 {
        1.0
    } else if t >= 0.6 {
        0.6
    } else if t >= 0.42 {
        0.9
    } else if t >= 0.2 {
        0.4
    } else {
        0.0
    };
    trend + layers
}
