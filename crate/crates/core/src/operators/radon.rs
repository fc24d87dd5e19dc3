//! Parallel-beam projector with exact ray–pixel intersection lengths.
//!
//! Geometry: unit pixels, image centred at the origin, `x` horizontal
//! (pixel column `ix`) and `z` vertical (pixel row `iz`). A ray at angle
//! `theta` and offset `s` is the line `{p : p·(cos θ, sin θ) = s}`, so at 0°
//! rays run vertically down pixel columns. Offsets are equispaced over the
//! image diagonal, `s_j = D·((j + ½)/R − ½)` with `D = sqrt(nx² + nz²)`.
//! Rows are ordered angle-major, ray-minor.
//!
//! A ray lying exactly on a pixel edge (only possible when it is axis
//! aligned) contributes half its length to each of the two adjacent pixels.

use super::{assert_shape, GridDims, LinearOperator};
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, PartialEq)]
pub struct RayGeometry {
    pub dims: GridDims,
    pub angles_deg: Vec<f64>,
    pub n_rays: usize,
}

impl RayGeometry {
    pub fn diagonal(&self) -> f64 {
        let (nx, nz) = (self.dims.nx as f64, self.dims.nz as f64);
        (nx * nx + nz * nz).sqrt()
    }

    pub fn offset(&self, ray: usize) -> f64 {
        self.diagonal() * ((ray as f64 + 0.5) / self.n_rays as f64 - 0.5)
    }

    /// `(angle in degrees, offset)` of a data row.
    pub fn ray(&self, row: usize) -> (f64, f64) {
        let a = row / self.n_rays;
        let j = row % self.n_rays;
        (self.angles_deg[a], self.offset(j))
    }

    pub fn n_rows(&self) -> usize {
        self.angles_deg.len() * self.n_rays
    }
}

/// Unit normal `(cos θ, sin θ)` with values within 1e-15 of 0 or ±1 snapped,
/// so that 0° and ±90° rays are exactly axis aligned.
pub(crate) fn ray_normal(theta_deg: f64) -> (f64, f64) {
    let t = theta_deg.to_radians();
    let snap = |v: f64| {
        if v.abs() < 1e-15 {
            0.0
        } else if (v.abs() - 1.0).abs() < 1e-15 {
            v.signum()
        } else {
            v
        }
    };
    (snap(t.cos()), snap(t.sin()))
}

/// Pixel indices (column-major) and intersection lengths of one ray.
pub fn ray_pixel_intersections(dims: GridDims, theta_deg: f64, offset: f64) -> Vec<(usize, f64)> {
    let (nxf, nzf) = (dims.nx as f64, dims.nz as f64);
    let (cx, cz) = ray_normal(theta_deg);
    // direction (-sin, cos); base point offset * normal
    let (ux, uz) = (-cz, cx);
    let (px, pz) = (offset * cx, offset * cz);
    let (x_lo, x_hi) = (-nxf / 2.0, nxf / 2.0);
    let (z_lo, z_hi) = (-nzf / 2.0, nzf / 2.0);

    let slab = |p: f64, u: f64, lo: f64, hi: f64| -> Option<(f64, f64)> {
        if u == 0.0 {
            (p >= lo && p <= hi).then_some((f64::NEG_INFINITY, f64::INFINITY))
        } else {
            let (a, b) = ((lo - p) / u, (hi - p) / u);
            Some((a.min(b), a.max(b)))
        }
    };
    let (Some((tx0, tx1)), Some((tz0, tz1))) = (slab(px, ux, x_lo, x_hi), slab(pz, uz, z_lo, z_hi))
    else {
        return Vec::new();
    };
    let t_min = tx0.max(tz0);
    let t_max = tx1.min(tz1);
    if !(t_max > t_min) {
        return Vec::new();
    }

    let mut ts = Vec::with_capacity(dims.nx + dims.nz + 2);
    ts.push(t_min);
    if ux != 0.0 {
        for i in 0..=dims.nx {
            let t = (x_lo + i as f64 - px) / ux;
            if t > t_min && t < t_max {
                ts.push(t);
            }
        }
    }
    if uz != 0.0 {
        for i in 0..=dims.nz {
            let t = (z_lo + i as f64 - pz) / uz;
            if t > t_min && t < t_max {
                ts.push(t);
            }
        }
    }
    ts.push(t_max);
    ts.sort_by(f64::total_cmp);

    // Axis-aligned ray on a grid line: split between the two neighbours.
    let on_line = |u: f64, p: f64, lo: f64| u == 0.0 && (p - lo).fract() == 0.0;
    let split_x = on_line(ux, px, x_lo);
    let split_z = on_line(uz, pz, z_lo);

    let mut out = Vec::with_capacity(ts.len());
    for w in ts.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let tm = 0.5 * (w[0] + w[1]);
        let (xm, zm) = (px + tm * ux, pz + tm * uz);
        let cols = cell_candidates(xm - x_lo, dims.nx, split_x);
        let rows = cell_candidates(zm - z_lo, dims.nz, split_z);
        for &(ix, wx) in cols.iter().flatten() {
            for &(iz, wz) in rows.iter().flatten() {
                out.push((dims.index(iz, ix), len * wx * wz));
            }
        }
    }
    out
}

// Cell index for a coordinate measured from the grid's low edge, or the two
// cells sharing an edge (weight ½ each) when `split` is set.
fn cell_candidates(c: f64, n: usize, split: bool) -> [Option<(usize, f64)>; 2] {
    if split {
        let k = c.round() as i64;
        let left = (k >= 1 && k as usize <= n).then(|| (k as usize - 1, 0.5));
        let right = (k >= 0 && (k as usize) < n).then_some((k as usize, 0.5));
        [left, right]
    } else {
        let k = (c.floor().max(0.0) as usize).min(n - 1);
        [Some((k, 1.0)), None]
    }
}

/// Discrete Radon transform with cached ray traversals.
///
/// The intersection lists are computed once at construction and stored both
/// per ray and per pixel, so forward and adjoint are gathers.
pub struct RadonOp {
    geometry: RayGeometry,
    ray_ptr: Vec<usize>,
    ray_pix: Vec<u32>,
    ray_w: Vec<f64>,
    pix_ptr: Vec<usize>,
    pix_ray: Vec<u32>,
    pix_w: Vec<f64>,
}

pub fn make_radon(dims: GridDims, n_rays: usize, angles_deg: &[f64]) -> Result<RadonOp> {
    if angles_deg.is_empty() {
        return Err(Error::EmptyInput("make_radon angles"));
    }
    if n_rays == 0 {
        return Err(Error::InvalidArgument("n_rays must be >= 1".into()));
    }
    if let Some(a) = angles_deg
        .iter()
        .find(|a| !a.is_finite() || a.abs() > 90.0)
    {
        return Err(Error::InvalidArgument(format!(
            "angle {a} outside [-90, 90] degrees"
        )));
    }
    let geometry = RayGeometry {
        dims,
        angles_deg: angles_deg.to_vec(),
        n_rays,
    };
    let rows = geometry.n_rows();
    let per_ray: Vec<Vec<(usize, f64)>> = par::map_range(rows, |r| {
        let (theta, s) = geometry.ray(r);
        ray_pixel_intersections(dims, theta, s)
    });

    let nnz: usize = per_ray.iter().map(Vec::len).sum();
    let mut ray_ptr = Vec::with_capacity(rows + 1);
    let mut ray_pix = Vec::with_capacity(nnz);
    let mut ray_w = Vec::with_capacity(nnz);
    let mut counts = vec![0usize; dims.n()];
    ray_ptr.push(0);
    for list in &per_ray {
        for &(p, w) in list {
            ray_pix.push(p as u32);
            ray_w.push(w);
            counts[p] += 1;
        }
        ray_ptr.push(ray_pix.len());
    }

    let mut pix_ptr = vec![0usize; dims.n() + 1];
    for (p, c) in counts.iter().enumerate() {
        pix_ptr[p + 1] = pix_ptr[p] + c;
    }
    let mut fill = pix_ptr.clone();
    let mut pix_ray = vec![0u32; nnz];
    let mut pix_w = vec![0.0; nnz];
    for (r, list) in per_ray.iter().enumerate() {
        for &(p, w) in list {
            pix_ray[fill[p]] = r as u32;
            pix_w[fill[p]] = w;
            fill[p] += 1;
        }
    }

    Ok(RadonOp {
        geometry,
        ray_ptr,
        ray_pix,
        ray_w,
        pix_ptr,
        pix_ray,
        pix_w,
    })
}

impl RadonOp {
    pub fn geometry(&self) -> &RayGeometry {
        &self.geometry
    }

    pub fn nnz(&self) -> usize {
        self.ray_w.len()
    }
}

impl LinearOperator for RadonOp {
    fn rows(&self) -> usize {
        self.geometry.n_rows()
    }

    fn cols(&self) -> usize {
        self.geometry.dims.n()
    }

    fn label(&self) -> String {
        format!(
            "radon({}, {} angles x {} rays)",
            self.geometry.dims,
            self.geometry.angles_deg.len(),
            self.geometry.n_rays
        )
    }

    fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), false);
        par::fill_indexed(y, |r| {
            let (a, b) = (self.ray_ptr[r], self.ray_ptr[r + 1]);
            self.ray_pix[a..b]
                .iter()
                .zip(&self.ray_w[a..b])
                .map(|(&p, &w)| w * x[p as usize])
                .sum()
        });
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), true);
        par::fill_indexed(x, |p| {
            let (a, b) = (self.pix_ptr[p], self.pix_ptr[p + 1]);
            self.pix_ray[a..b]
                .iter()
                .zip(&self.pix_w[a..b])
                .map(|(&r, &w)| w * y[r as usize])
                .sum()
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertical_ray_through_column_center() {
        let dims = GridDims::new(4, 4).unwrap();
        let hits = ray_pixel_intersections(dims, 0.0, 0.5);
        assert_eq!(hits.len(), 4);
        let total: f64 = hits.iter().map(|h| h.1).sum();
        assert_eq!(total, 4.0);
        // column ix = 2, all rows
        let mut pix: Vec<usize> = hits.iter().map(|h| h.0).collect();
        pix.sort();
        assert_eq!(pix, vec![8, 9, 10, 11]);
    }

    #[test]
    fn ray_on_grid_line_is_split() {
        let dims = GridDims::new(4, 4).unwrap();
        let hits = ray_pixel_intersections(dims, 0.0, 0.0);
        assert_eq!(hits.len(), 8);
        assert!(hits.iter().all(|h| h.1 == 0.5));
    }

    #[test]
    fn ray_missing_the_image() {
        let dims = GridDims::new(4, 4).unwrap();
        assert!(ray_pixel_intersections(dims, 30.0, 3.0).is_empty());
    }

    #[test]
    fn rejects_bad_geometry() {
        let dims = GridDims::new(4, 4).unwrap();
        assert!(make_radon(dims, 5, &[]).is_err());
        assert!(make_radon(dims, 0, &[0.0]).is_err());
        assert!(make_radon(dims, 5, &[91.0]).is_err());
    }

    #[test]
    fn all_ones_image_axis_aligned() {
        let dims = GridDims::new(4, 4).unwrap();
        let op = make_radon(dims, 4, &[0.0]).unwrap();
        assert_eq!(op.rows(), 4);
        let y = op.forward(&[1.0; 16]);
        // offsets are ±0.5*D*(3/4 ... ); only the two central rays hit
        let d = (32.0f64).sqrt();
        for (j, v) in y.iter().enumerate() {
            let s = d * ((j as f64 + 0.5) / 4.0 - 0.5);
            let expected = if s.abs() < 2.0 { 4.0 } else { 0.0 };
            assert_eq!(*v, expected, "ray {j} at offset {s}");
        }
    }
}
