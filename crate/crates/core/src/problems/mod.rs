//! Test problems `d = G m + e`: generators, noise injection and metrics.

use std::sync::Arc;

use rand::seq::index::sample;

use crate::admm::Problem;
use crate::error::{check_len, Error, Result};
use crate::operators::{
    compose, make_causal_integration, make_subsampler, GridDims, KroneckerOp, LinearOperator,
    Operator,
};
use crate::rng::{seeded, standard_normal_vec};
use crate::vecops::{dist2, norm2, norm2_sq};

mod phantoms;
mod signals;

pub use phantoms::{
    make_phantom, make_velocity_field, pixel_centre, Ellipse, PhantomKind, MIN_PHANTOM_SIDE,
    SHEPP_LOGAN,
};
pub use signals::{
    make_test_signal, make_velocity_profile, SignalKind, BLOCKY_JUMPS, MIN_SIGNAL_LEN,
    SMOOTH_AMPLITUDE,
};

#[derive(Debug, Clone)]
pub struct TestProblem {
    pub operator: Operator,
    pub d: Vec<f64>,
    pub m_true: Option<Vec<f64>>,
    pub e_true: Option<Vec<f64>>,
    /// `||e_true||²`, exactly as injected.
    pub epsilon: f64,
    pub dims: GridDims,
    pub seed: u64,
    pub label: String,
}

impl TestProblem {
    /// Noiseless problem `d = G m_true`.
    pub fn noiseless(
        operator: Operator,
        m_true: Vec<f64>,
        dims: GridDims,
        seed: u64,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_len("model", operator.cols(), m_true.len())?;
        check_len("grid", dims.n(), m_true.len())?;
        let d = operator.forward(&m_true);
        Ok(Self {
            operator,
            d,
            m_true: Some(m_true),
            e_true: None,
            epsilon: 0.0,
            dims,
            seed,
            label: label.into(),
        })
    }

    pub fn clean_data(&self) -> Option<Vec<f64>> {
        self.m_true.as_ref().map(|m| self.operator.forward(m))
    }

    pub fn as_problem(&self) -> Problem<'_> {
        Problem {
            operator: self.operator.as_ref(),
            data: &self.d,
            dims: self.dims,
            m_true: self.m_true.as_deref(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseReference {
    /// Noise level relative to `||G m_true||`.
    DataNorm,
    /// Noise level relative to `||m_true||`.
    ModelNorm,
}

/// Replaces any previous noise by white Gaussian noise with
/// `||e|| = level * ||reference||` and sets `epsilon = ||e||²`.
pub fn add_noise(
    problem: &TestProblem,
    level: f64,
    reference: NoiseReference,
    seed: u64,
) -> Result<TestProblem> {
    if !(level >= 0.0) || !level.is_finite() {
        return Err(Error::InvalidArgument(format!("noise level must be >= 0, got {level}")));
    }
    let m_true = problem
        .m_true
        .as_ref()
        .ok_or(Error::EmptyInput("noise injection needs a true model"))?;
    let clean = problem.operator.forward(m_true);
    let ref_norm = match reference {
        NoiseReference::DataNorm => norm2(&clean),
        NoiseReference::ModelNorm => norm2(m_true),
    };
    let mut e = standard_normal_vec(&mut seeded(seed), clean.len());
    let target = level * ref_norm;
    let raw = norm2(&e);
    if target == 0.0 || raw == 0.0 {
        e.iter_mut().for_each(|v| *v = 0.0);
    } else {
        let s = target / raw;
        e.iter_mut().for_each(|v| *v *= s);
    }
    let d = clean.iter().zip(&e).map(|(c, n)| c + n).collect();
    Ok(TestProblem {
        operator: problem.operator.clone(),
        d,
        m_true: Some(m_true.clone()),
        epsilon: norm2_sq(&e),
        e_true: Some(e),
        dims: problem.dims,
        seed,
        label: problem.label.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub relative_error: f64,
    pub discrepancy: f64,
}

pub fn metrics(m_est: &[f64], m_true: &[f64], operator: &dyn LinearOperator, d: &[f64]) -> Result<Metrics> {
    check_len("estimate", operator.cols(), m_est.len())?;
    check_len("true model", operator.cols(), m_true.len())?;
    check_len("data", operator.rows(), d.len())?;
    let scale = norm2(m_true);
    if scale == 0.0 {
        return Err(Error::InvalidArgument("relative error against a zero model".into()));
    }
    let gm = operator.forward(m_est);
    Ok(Metrics {
        relative_error: dist2(m_est, m_true) / scale,
        discrepancy: gm.iter().zip(d).map(|(a, b)| (a - b).powi(2)).sum(),
    })
}

/// Which RMS samples (1D) or traces (2D) are observed.
#[derive(Debug, Clone, PartialEq)]
pub enum Picks {
    /// Draw this fraction of positions without replacement.
    Fraction(f64),
    /// Explicit 0-based, strictly increasing positions.
    Indices(Vec<usize>),
}

fn resolve_picks(picks: &Picks, n: usize, seed: u64) -> Result<Vec<usize>> {
    match picks {
        Picks::Indices(v) => {
            if v.is_empty() {
                return Err(Error::EmptyInput("pick list"));
            }
            Ok(v.clone())
        }
        Picks::Fraction(f) => {
            if !(*f > 0.0 && *f <= 1.0) {
                return Err(Error::InvalidArgument(format!("pick fraction must be in (0, 1], got {f}")));
            }
            let k = ((f * n as f64).round() as usize).clamp(1, n);
            let mut v = sample(&mut seeded(seed), n, k).into_vec();
            v.sort_unstable();
            Ok(v)
        }
    }
}

fn squared_velocities(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::EmptyInput("velocity"));
    }
    if v.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidArgument("velocities must be positive and finite".into()));
    }
    Ok(v.iter().map(|x| x * x).collect())
}

/// 1D Dix problem: `m = v²`, data are the picked entries of `i V_i² = sum_{j<=i} m_j`.
pub fn make_dix_problem(interval_velocity: &[f64], picks: &Picks, seed: u64) -> Result<TestProblem> {
    let m = squared_velocities(interval_velocity)?;
    let n = m.len();
    let dims = GridDims::one_d(n)?;
    let rows = resolve_picks(picks, n, seed)?;
    let sub: Operator = Arc::new(make_subsampler(&rows, n)?);
    let g: Operator = Arc::new(make_causal_integration(n)?);
    let op: Operator = compose(sub, g)?.into();
    TestProblem::noiseless(op, m, dims, seed, format!("dix_1d n={n} picks={}", rows.len()))
}

/// 2D Dix problem on a section of traces: operator `Φ ⊗ G`, with `G` the
/// causal integration along each trace and `Φ` selecting traces.
pub fn make_dix_problem_2d(
    interval_velocity: &[f64],
    dims: GridDims,
    trace_picks: &Picks,
    seed: u64,
) -> Result<TestProblem> {
    check_len("velocity field", dims.n(), interval_velocity.len())?;
    let m = squared_velocities(interval_velocity)?;
    let traces = resolve_picks(trace_picks, dims.nx, seed)?;
    let phi: Operator = Arc::new(make_subsampler(&traces, dims.nx)?);
    let g: Operator = Arc::new(make_causal_integration(dims.nz)?);
    let op: Operator = Arc::new(KroneckerOp::new(phi, g));
    TestProblem::noiseless(op, m, dims, seed, format!("dix_2d {dims} traces={}", traces.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Identity;

    fn identity_problem(n: usize) -> TestProblem {
        let m = make_test_signal(SignalKind::Mixed, n).unwrap();
        TestProblem::noiseless(Arc::new(Identity(n)), m, GridDims::one_d(n).unwrap(), 0, "id").unwrap()
    }

    #[test]
    fn constant_velocity_data() {
        let p = make_dix_problem(&[2.0; 5], &Picks::Indices((0..5).collect()), 1).unwrap();
        assert_eq!(p.d, vec![4.0, 8.0, 12.0, 16.0, 20.0]);
    }

    #[test]
    fn full_picks_invert_by_differencing() {
        let v = make_velocity_profile(64).unwrap();
        let p = make_dix_problem(&v, &Picks::Fraction(1.0), 3).unwrap();
        let mut prev = 0.0;
        let rec: Vec<f64> = p.d.iter().map(|d| { let m = d - prev; prev = *d; m }).collect();
        let m = p.m_true.as_ref().unwrap();
        for (a, b) in rec.iter().zip(m) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn dix_rejects_bad_input() {
        assert!(make_dix_problem(&[1.0, -1.0, 2.0], &Picks::Fraction(0.5), 0).is_err());
        assert!(make_dix_problem(&[1.0; 8], &Picks::Indices(vec![]), 0).is_err());
        assert!(make_dix_problem(&[1.0; 8], &Picks::Fraction(0.0), 0).is_err());
    }

    #[test]
    fn fraction_picks_deterministic() {
        let v = make_velocity_profile(512).unwrap();
        let a = make_dix_problem(&v, &Picks::Fraction(0.25), 9).unwrap();
        let b = make_dix_problem(&v, &Picks::Fraction(0.25), 9).unwrap();
        assert_eq!(a.d, b.d);
        assert_eq!(a.operator.rows(), 128);
    }

    #[test]
    fn zero_noise_keeps_clean_data() {
        let p = identity_problem(32);
        let q = add_noise(&p, 0.0, NoiseReference::DataNorm, 4).unwrap();
        assert_eq!(q.d, p.d);
        assert_eq!(q.epsilon, 0.0);
    }

    #[test]
    fn noise_level_is_exact() {
        let p = identity_problem(200);
        let m = p.m_true.clone().unwrap();
        let a = add_noise(&p, 0.3, NoiseReference::ModelNorm, 1).unwrap();
        let b = add_noise(&p, 0.3, NoiseReference::ModelNorm, 2).unwrap();
        let ea = a.e_true.as_ref().unwrap();
        let eb = b.e_true.as_ref().unwrap();
        assert!((norm2(ea) / norm2(&m) - 0.3).abs() < 1e-12);
        assert_ne!(ea, eb);
        assert!((norm2(ea) - norm2(eb)).abs() < 1e-12 * norm2(ea));
        assert_eq!(a.epsilon, norm2_sq(ea));
    }

    #[test]
    fn metrics_limits() {
        let p = add_noise(&identity_problem(40), 0.05, NoiseReference::DataNorm, 5).unwrap();
        let m = p.m_true.as_ref().unwrap();
        let exact = metrics(m, m, p.operator.as_ref(), &p.d).unwrap();
        assert_eq!(exact.relative_error, 0.0);
        assert!((exact.discrepancy - p.epsilon).abs() <= 1e-12 * p.epsilon);
        let zero = metrics(&vec![0.0; 40], m, p.operator.as_ref(), &p.d).unwrap();
        assert_eq!(zero.relative_error, 1.0);
        assert!(metrics(m, &vec![0.0; 40], p.operator.as_ref(), &p.d).is_err());
    }
}
