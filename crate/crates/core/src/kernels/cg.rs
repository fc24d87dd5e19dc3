use crate::error::{Error, Result};
use crate::vecops::{axpy, dot, norm2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgSettings {
    pub rel_tol: f64,
    pub max_iter: usize,
    pub warm_start: bool,
}

impl Default for CgSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-7,
            max_iter: 100,
            warm_start: true,
        }
    }
}

impl CgSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidArgument(format!(
                "CG settings need rel_tol > 0 and max_iter >= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `||A x - b|| / ||b||` at exit (recursively updated residual).
    pub rel_residual: f64,
}

/// Conjugate gradients for a symmetric positive (semi-)definite `apply_a`.
///
/// Starts from `x0` when `settings.warm_start` is set, otherwise from zero, and
/// stops once `||A x - b|| <= rel_tol ||b||` or after `max_iter` iterations.
pub fn cg_solve<F>(mut apply_a: F, b: &[f64], x0: &[f64], settings: &CgSettings) -> Result<CgOutcome>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = b.len();
    crate::error::check_len("cg_solve x0", n, x0.len())?;
    let b_norm = norm2(b);
    if !b_norm.is_finite() {
        return Err(Error::NonFinite("cg_solve right-hand side"));
    }
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            x: vec![0.0; n],
            iterations: 0,
            rel_residual: 0.0,
        });
    }

    let mut x = if settings.warm_start {
        x0.to_vec()
    } else {
        vec![0.0; n]
    };
    let mut ap = vec![0.0; n];
    apply_a(&x, &mut ap);
    let mut r: Vec<f64> = b.iter().zip(&ap).map(|(bi, ai)| bi - ai).collect();
    let mut rr = dot(&r, &r);
    if !rr.is_finite() {
        return Err(Error::NonFinite("cg_solve initial residual"));
    }
    let tol_sq = (settings.rel_tol * b_norm).powi(2);
    let mut p = r.clone();
    let mut iterations = 0;

    while rr > tol_sq && iterations < settings.max_iter {
        apply_a(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !pap.is_finite() {
            return Err(Error::NonFinite("cg_solve operator application"));
        }
        if pap <= 0.0 {
            // direction in the null space: nothing more to gain
            break;
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rr_new = dot(&r, &r);
        iterations += 1;
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    if !crate::vecops::all_finite(&x) {
        return Err(Error::NonFinite("cg_solve iterate"));
    }
    Ok(CgOutcome {
        x,
        iterations,
        rel_residual: rr.sqrt() / b_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_one_iteration() {
        let b = [1.0, -2.0, 3.5];
        let out = cg_solve(|x, y| y.copy_from_slice(x), &b, &[0.0; 3], &CgSettings::default()).unwrap();
        assert_eq!(out.iterations, 1);
        for (a, e) in out.x.iter().zip(&b) {
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn two_by_two_against_inverse() {
        // A = [[4,1],[1,3]], A^-1 = 1/11 [[3,-1],[-1,4]]
        let apply = |x: &[f64], y: &mut [f64]| {
            y[0] = 4.0 * x[0] + x[1];
            y[1] = x[0] + 3.0 * x[1];
        };
        let out = cg_solve(apply, &[1.0, 2.0], &[0.0, 0.0], &CgSettings::default()).unwrap();
        assert!((out.x[0] - 1.0 / 11.0).abs() < 1e-9);
        assert!((out.x[1] - 7.0 / 11.0).abs() < 1e-9);
    }

    #[test]
    fn warm_start_at_solution() {
        let apply = |x: &[f64], y: &mut [f64]| {
            y[0] = 4.0 * x[0] + x[1];
            y[1] = x[0] + 3.0 * x[1];
        };
        let exact = [1.0 / 11.0, 7.0 / 11.0];
        let out = cg_solve(apply, &[1.0, 2.0], &exact, &CgSettings::default()).unwrap();
        assert!(out.iterations <= 1);
        assert!((out.x[0] - exact[0]).abs() < 1e-15 && (out.x[1] - exact[1]).abs() < 1e-15);
    }

    #[test]
    fn zero_rhs() {
        let out = cg_solve(|x, y| y.copy_from_slice(x), &[0.0; 4], &[1.0; 4], &CgSettings::default()).unwrap();
        assert_eq!(out.x, vec![0.0; 4]);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn non_finite_is_reported() {
        let apply = |_: &[f64], y: &mut [f64]| y.fill(f64::NAN);
        let err = cg_solve(apply, &[1.0, 1.0], &[0.0, 0.0], &CgSettings::default()).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(CgSettings { rel_tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(CgSettings { max_iter: 0, ..Default::default() }.validate().is_err());
    }
}
