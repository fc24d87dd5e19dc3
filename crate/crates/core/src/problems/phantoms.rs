//! 2D phantoms on `[-1, 1]²`, sampled at pixel centres.
//!
//! Row `iz = 0` is the top of the image (`y = +1`) and column `ix = 0` its
//! left edge (`x = -1`).

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::operators::GridDims;

pub const MIN_PHANTOM_SIDE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhantomKind {
    PiecewiseSmooth2d,
    SheppLogan,
    SmoothBlobMix,
}

impl PhantomKind {
    pub const ALL: [PhantomKind; 3] = [
        PhantomKind::PiecewiseSmooth2d,
        PhantomKind::SheppLogan,
        PhantomKind::SmoothBlobMix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PhantomKind::PiecewiseSmooth2d => "piecewise_smooth_2d",
            PhantomKind::SheppLogan => "shepp_logan",
            PhantomKind::SmoothBlobMix => "smooth_blob_mix",
        }
    }
}

impl FromStr for PhantomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PhantomKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown phantom kind `{s}`")))
    }
}

/// Pixel-centre coordinates `(x, y)` of sample `(iz, ix)`.
pub fn pixel_centre(dims: GridDims, iz: usize, ix: usize) -> (f64, f64) {
    let x = -1.0 + (2 * ix + 1) as f64 / dims.nx as f64;
    let y = 1.0 - (2 * iz + 1) as f64 / dims.nz as f64;
    (x, y)
}

/// Ellipse `(x0, y0, a, b, rotation_deg, value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub x0: f64,
    pub y0: f64,
    pub a: f64,
    pub b: f64,
    pub rotation_deg: f64,
    pub value: f64,
}

impl Ellipse {
    const fn new(x0: f64, y0: f64, a: f64, b: f64, rotation_deg: f64, value: f64) -> Self {
        Self { x0, y0, a, b, rotation_deg, value }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (s, c) = self.rotation_deg.to_radians().sin_cos();
        let (dx, dy) = (x - self.x0, y - self.y0);
        let u = dx * c + dy * s;
        let v = -dx * s + dy * c;
        (u / self.a).powi(2) + (v / self.b).powi(2) <= 1.0
    }
}

/// The modified (high-contrast) ten-ellipse Shepp-Logan head.
pub const SHEPP_LOGAN: [Ellipse; 10] = [
    Ellipse::new(0.0, 0.0, 0.69, 0.92, 0.0, 1.0),
    Ellipse::new(0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8),
    Ellipse::new(0.22, 0.0, 0.11, 0.31, -18.0, -0.2),
    Ellipse::new(-0.22, 0.0, 0.16, 0.41, 18.0, -0.2),
    Ellipse::new(0.0, 0.35, 0.21, 0.25, 0.0, 0.1),
    Ellipse::new(0.0, 0.1, 0.046, 0.046, 0.0, 0.1),
    Ellipse::new(0.0, -0.1, 0.046, 0.046, 0.0, 0.1),
    Ellipse::new(-0.08, -0.605, 0.046, 0.023, 0.0, 0.1),
    Ellipse::new(0.0, -0.606, 0.023, 0.023, 0.0, 0.1),
    Ellipse::new(0.06, -0.605, 0.023, 0.046, 0.0, 0.1),
];

fn shepp_logan_at(x: f64, y: f64) -> f64 {
    let v: f64 = SHEPP_LOGAN
        .iter()
        .filter(|e| e.contains(x, y))
        .map(|e| e.value)
        .sum();
    v.clamp(0.0, 1.0)
}

fn gaussian(x: f64, y: f64, x0: f64, y0: f64, width_sq: f64) -> f64 {
    (-((x - x0).powi(2) + (y - y0).powi(2)) / width_sq).exp()
}

fn piecewise_smooth_at(x: f64, y: f64) -> f64 {
    let background = 0.4 * gaussian(x, y, 0.1, -0.1, 0.8) + 0.1 * (1.5 * x).sin() * (1.2 * y).cos();
    let mut v = background;
    if (-0.65..=-0.1).contains(&x) && (0.1..=0.6).contains(&y) {
        v += 1.5;
    }
    if (x - 0.35).powi(2) + (y + 0.3).powi(2) <= 0.3 * 0.3 {
        v -= 1.05;
    }
    if Ellipse::new(-0.3, -0.45, 0.35, 0.15, 25.0, 0.0).contains(x, y) {
        v += 0.9;
    }
    v
}

fn blob_mix_at(x: f64, y: f64) -> f64 {
    let mut v = 1.2 * gaussian(x, y, -0.25, -0.15, 0.12)
        + 0.9 * gaussian(x, y, 0.35, 0.3, 0.06)
        + 0.6 * gaussian(x, y, 0.1, -0.5, 0.04);
    let discs = [(0.35, -0.3, 0.2, 0.5), (-0.4, 0.4, 0.16, 0.4), (0.05, 0.2, 0.1, 0.3)];
    for (x0, y0, r, val) in discs {
        if (x - x0).powi(2) + (y - y0).powi(2) <= r * r {
            v += val;
        }
    }
    v
}

pub fn make_phantom(kind: PhantomKind, dims: GridDims) -> Result<Vec<f64>> {
    if dims.nz < MIN_PHANTOM_SIDE || dims.nx < MIN_PHANTOM_SIDE {
        return Err(Error::InvalidArgument(format!(
            "phantoms need at least {MIN_PHANTOM_SIDE} samples per side, got {dims}"
        )));
    }
    let f = match kind {
        PhantomKind::SheppLogan => shepp_logan_at,
        PhantomKind::PiecewiseSmooth2d => piecewise_smooth_at,
        PhantomKind::SmoothBlobMix => blob_mix_at,
    };
    Ok(sample(dims, f))
}

fn sample(dims: GridDims, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(dims.n());
    for ix in 0..dims.nx {
        for iz in 0..dims.nz {
            let (x, y) = pixel_centre(dims, iz, ix);
            out.push(f(x, y));
        }
    }
    out
}

/// Interval velocity section: dipping layers with a smooth depth trend and a
/// high-velocity body. Column `ix` is one trace; `iz` is depth (time).
pub fn make_velocity_field(dims: GridDims) -> Result<Vec<f64>> {
    if dims.nz < MIN_PHANTOM_SIDE || dims.nx < 2 {
        return Err(Error::InvalidArgument(format!(
            "velocity fields need nz >= {MIN_PHANTOM_SIDE} and nx >= 2, got {dims}"
        )));
    }
    let body = Ellipse::new(0.2, -0.1, 0.35, 0.2, 10.0, 0.0);
    Ok(sample(dims, |x, y| {
        let t = 0.5 * (1.0 - y);
        let dip = 0.08 * x + 0.03 * (2.5 * x).sin();
        let mut v = super::signals::velocity_at((t - dip).clamp(0.0, 1.0));
        if body.contains(x, y) {
            v = 4.5;
        }
        v
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shepp_logan_range_and_background() {
        let dims = GridDims::new(64, 64).unwrap();
        let p = make_phantom(PhantomKind::SheppLogan, dims).unwrap();
        assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(p[dims.index(0, 0)], 0.0);
        assert_eq!(p[dims.index(63, 63)], 0.0);
        assert!(p.contains(&1.0));
    }

    #[test]
    fn small_dims_rejected() {
        let dims = GridDims::new(8, 32).unwrap();
        assert!(make_phantom(PhantomKind::SmoothBlobMix, dims).is_err());
    }

    #[test]
    fn velocity_field_positive() {
        let dims = GridDims::new(64, 40).unwrap();
        let v = make_velocity_field(dims).unwrap();
        assert!(v.iter().all(|x| *x >= 1.4));
    }
}
