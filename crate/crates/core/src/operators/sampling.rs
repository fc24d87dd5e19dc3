use super::{assert_shape, LinearOperator};
use crate::error::{Error, Result};

/// Row selection from an identity matrix. Indices are 0-based.
#[derive(Debug, Clone)]
pub struct Subsampler {
    selected: Vec<usize>,
    n: usize,
}

pub fn make_subsampler(selected_rows: &[usize], n: usize) -> Result<Subsampler> {
    if selected_rows.is_empty() {
        return Err(Error::EmptyInput("make_subsampler"));
    }
    for w in selected_rows.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidArgument(format!(
                "selected rows must be strictly increasing (found {} then {})",
                w[0], w[1]
            )));
        }
    }
    if let Some(&last) = selected_rows.last() {
        if last >= n {
            return Err(Error::InvalidArgument(format!(
                "selected row {last} out of range for n = {n}"
            )));
        }
    }
    Ok(Subsampler {
        selected: selected_rows.to_vec(),
        n,
    })
}

impl Subsampler {
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }
}

impl LinearOperator for Subsampler {
    fn rows(&self) -> usize {
        self.selected.len()
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn label(&self) -> String {
        format!("subsample({} of {})", self.selected.len(), self.n)
    }

    fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), false);
        for (yi, &j) in y.iter_mut().zip(&self.selected) {
            *yi = x[j];
        }
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), true);
        x.fill(0.0);
        for (yi, &j) in y.iter().zip(&self.selected) {
            x[j] = *yi;
        }
    }
}

/// Lower-triangular matrix of ones, applied as a running sum.
#[derive(Debug, Clone, Copy)]
pub struct CausalIntegration {
    n: usize,
}

pub fn make_causal_integration(n: usize) -> Result<CausalIntegration> {
    if n == 0 {
        return Err(Error::InvalidArgument("causal integration needs n >= 1".into()));
    }
    Ok(CausalIntegration { n })
}

impl LinearOperator for CausalIntegration {
    fn rows(&self) -> usize {
        self.n
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn label(&self) -> String {
        format!("causal_integration({})", self.n)
    }

    fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), false);
        let mut acc = 0.0;
        for (yi, xi) in y.iter_mut().zip(x) {
            acc += xi;
            *yi = acc;
        }
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        assert_shape(self, x.len(), y.len(), true);
        let mut acc = 0.0;
        for (xi, yi) in x.iter_mut().zip(y).rev() {
            acc += yi;
            *xi = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsample_picks_and_scatters() {
        let s = make_subsampler(&[0, 2], 3).unwrap();
        assert_eq!(s.forward(&[5.0, 6.0, 7.0]), vec![5.0, 7.0]);
        assert_eq!(s.adjoint(&[5.0, 7.0]), vec![5.0, 0.0, 7.0]);
    }

    #[test]
    fn full_selection_is_identity() {
        let idx: Vec<usize> = (0..6).collect();
        let s = make_subsampler(&idx, 6).unwrap();
        let x = [0.3, -1.0, 2.5, 4.0, 0.0, -7.5];
        assert_eq!(s.forward(&x), x.to_vec());
        assert_eq!(s.adjoint(&x), x.to_vec());
    }

    #[test]
    fn subsample_rejects_bad_indices() {
        assert!(make_subsampler(&[1, 1], 3).is_err());
        assert!(make_subsampler(&[2, 1], 3).is_err());
        assert!(make_subsampler(&[0, 3], 3).is_err());
        assert!(make_subsampler(&[], 3).is_err());
    }

    #[test]
    fn causal_sums() {
        let c = make_causal_integration(3).unwrap();
        assert_eq!(c.forward(&[4.0, 4.0, 4.0]), vec![4.0, 8.0, 12.0]);
        assert_eq!(c.adjoint(&[1.0, 1.0, 1.0]), vec![3.0, 2.0, 1.0]);
        assert!(make_causal_integration(0).is_err());
    }
}
