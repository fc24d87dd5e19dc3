use crate::error::{check_len, Error, Result};

/// Solves a tridiagonal system by elimination without pivoting.
///
/// `sub` and `sup` hold the `n - 1` off-diagonal entries (`sub[i]` is row
/// `i + 1`, column `i`).
pub fn tridiagonal_solve(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::EmptyInput("tridiagonal_solve"));
    }
    check_len("tridiagonal_solve sub", n - 1, sub.len())?;
    check_len("tridiagonal_solve sup", n - 1, sup.len())?;
    check_len("tridiagonal_solve rhs", n, rhs.len())?;
    let factor = Factorization::new(sub, diag, sup)?;
    let mut x = rhs.to_vec();
    factor.solve_in_place(&mut x);
    Ok(x)
}

#[derive(Debug, Clone)]
struct Factorization {
    sub: Vec<f64>,
    sup_mod: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl Factorization {
    fn new(sub: &[f64], diag: &[f64], sup: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut sup_mod = vec![0.0; n.saturating_sub(1)];
        let mut inv_pivot = vec![0.0; n];
        for i in 0..n {
            let pivot = if i == 0 {
                diag[0]
            } else {
                diag[i] - sub[i - 1] * sup_mod[i - 1]
            };
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::ZeroPivot(i));
            }
            inv_pivot[i] = 1.0 / pivot;
            if i + 1 < n {
                sup_mod[i] = sup[i] * inv_pivot[i];
            }
        }
        Ok(Self {
            sub: sub.to_vec(),
            sup_mod,
            inv_pivot,
        })
    }

    fn solve_in_place(&self, d: &mut [f64]) {
        let n = self.inv_pivot.len();
        d[0] *= self.inv_pivot[0];
        for i in 1..n {
            d[i] = (d[i] - self.sub[i - 1] * d[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            d[i] -= self.sup_mod[i] * d[i + 1];
        }
    }
}

/// Pre-factored `(I + c·L)` where `L = D1ᵀD1` is the path-graph Laplacian of
/// the zero-last-row forward difference (diagonal `1, 2, …, 2, 1`,
/// off-diagonals `-1`). Used to apply the first-order Tikhonov filter along
/// grid lines.
#[derive(Debug, Clone)]
pub struct LaplacianFilter {
    n: usize,
    factor: Option<Factorization>,
}

impl LaplacianFilter {
    pub fn new(n: usize, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput("LaplacianFilter"));
        }
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "filter weight must be finite and >= 0, got {c}"
            )));
        }
        if c == 0.0 || n == 1 {
            return Ok(Self { n, factor: None });
        }
        let mut diag = vec![1.0 + 2.0 * c; n];
        diag[0] = 1.0 + c;
        diag[n - 1] = 1.0 + c;
        let off = vec![-c; n - 1];
        Ok(Self {
            n,
            factor: Some(Factorization::new(&off, &diag, &off)?),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Overwrites `line` with `(I + c·L)⁻¹ line`.
    pub fn solve_in_place(&self, line: &mut [f64]) {
        assert_eq!(line.len(), self.n, "filter line length");
        if let Some(f) = &self.factor {
            f.solve_in_place(line);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let r = [1.0, -2.0, 3.0, 0.5];
        let x = tridiagonal_solve(&[0.0; 3], &[1.0; 4], &[0.0; 3], &r).unwrap();
        assert_eq!(x, r.to_vec());
    }

    #[test]
    fn zero_pivot() {
        let err = tridiagonal_solve(&[1.0], &[0.0, 1.0], &[1.0], &[1.0, 1.0]).unwrap_err();
        assert_eq!(err, Error::ZeroPivot(0));
        let err = tridiagonal_solve(&[1.0], &[1.0, 1.0], &[1.0], &[1.0, 1.0]).unwrap_err();
        assert_eq!(err, Error::ZeroPivot(1));
    }

    #[test]
    fn length_checks() {
        assert!(tridiagonal_solve(&[0.0], &[1.0; 3], &[0.0; 2], &[1.0; 3]).is_err());
        assert!(tridiagonal_solve(&[], &[], &[], &[]).is_err());
    }

    #[test]
    fn zero_weight_filter_is_identity() {
        let f = LaplacianFilter::new(5, 0.0).unwrap();
        let mut v = vec![3.0, 1.0, -4.0, 1.0, 5.0];
        f.solve_in_place(&mut v);
        assert_eq!(v, vec![3.0, 1.0, -4.0, 1.0, 5.0]);
    }

    #[test]
    fn filter_preserves_constants() {
        let f = LaplacianFilter::new(9, 3.5).unwrap();
        let mut v = vec![2.0; 9];
        f.solve_in_place(&mut v);
        assert!(v.iter().all(|x| (x - 2.0).abs() < 1e-14));
        assert!(LaplacianFilter::new(4, -1.0).is_err());
    }
}
