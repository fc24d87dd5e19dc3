//! ADMM for the discrepancy-constrained Tikhonov-TV problem with automatic
//! balancing parameter.
//!
//! One outer iteration updates, in order, the model `m`, the blocky gradient
//! `g1`, the smooth gradient `g2` (with the previous `beta`), the noise
//! estimate `e`, the three scaled multipliers, and finally `beta`.

mod config;
mod subproblems;

pub use config::{AdmmConfig, BetaPolicy, Mode};
pub use subproblems::{
    gradient_shrink, noise_cubic, noise_objective, noise_update, soft_threshold,
    solve_model_update, ModelRhs, NoiseUpdate, SmoothFilter,
};

use crate::error::{check_len, Error, Result};
use crate::operators::{make_derivative_operator, DerivativeKind, DerivativeOp, GridDims, LinearOperator};
use crate::robust_stats::{beta_update, gradient_stats, GradientStats};
use crate::vecops::{all_finite, dist2, norm2, norm2_sq};

/// Ceiling on `beta / mu1`. When no positive root of the balance function
/// exists, the adaptive update grows `beta` geometrically; past this point the
/// smoothing filter has converged to its null-space projection and the
/// tridiagonal factorization would start losing all precision.
pub const MAX_SMOOTHING: f64 = 1e12;

/// The inverse problem seen by the solver: `d = G m + e`.
#[derive(Clone, Copy)]
pub struct Problem<'a> {
    pub operator: &'a dyn LinearOperator,
    pub data: &'a [f64],
    pub dims: GridDims,
    /// Ground truth, used only for reporting the relative error.
    pub m_true: Option<&'a [f64]>,
}

impl Problem<'_> {
    fn validate(&self) -> Result<()> {
        check_len("problem data", self.operator.rows(), self.data.len())?;
        check_len("problem model size", self.dims.n(), self.operator.cols())?;
        if let Some(m) = self.m_true {
            check_len("problem ground truth", self.dims.n(), m.len())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub m: Vec<f64>,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
    pub e: Vec<f64>,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub lambda3: f64,
    pub beta: f64,
    pub k: usize,
}

impl AdmmState {
    pub fn initial(dims: GridDims, n_data: usize, beta: f64) -> Self {
        let ng = dims.gradient_len();
        Self {
            m: vec![0.0; dims.n()],
            g1: vec![0.0; ng],
            g2: vec![0.0; ng],
            e: vec![0.0; n_data],
            lambda1: vec![0.0; ng],
            lambda2: vec![0.0; n_data],
            lambda3: 0.0,
            beta,
            k: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// `||G m - d||²`
    pub discrepancy: f64,
    /// `||e||² - eps`
    pub constraint_gap: f64,
    /// Balancing parameter after this iteration's update.
    pub beta: f64,
    pub phi: f64,
    /// `||m^k - m^{k-1}|| / ||m^{k-1}||` (infinite at the first iteration).
    pub rel_change: f64,
    pub rel_error: Option<f64>,
    pub cg_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Stabilized,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: AdmmState,
    pub history: Vec<IterationRecord>,
    /// First iteration where the relative model change fell below tolerance.
    pub stabilized_at: Option<usize>,
    pub stop: StopReason,
}

impl RunOutcome {
    pub fn last(&self) -> &IterationRecord {
        self.history.last().expect("a run records at least one iteration")
    }
}

/// Stepwise ADMM driver. Each `update_*` method performs one block of the
/// iteration on the internal state; [`Admm::step`] runs a full iteration.
pub struct Admm<'a> {
    problem: Problem<'a>,
    cfg: AdmmConfig,
    d1: DerivativeOp,
    state: AdmmState,
    dm: Vec<f64>,
    gm: Vec<f64>,
    last_cg_iters: usize,
    last_stats: Option<GradientStats>,
}

impl<'a> Admm<'a> {
    pub fn new(problem: Problem<'a>, cfg: AdmmConfig) -> Result<Self> {
        cfg.validate()?;
        problem.validate()?;
        let d1 = make_derivative_operator(DerivativeKind::D1, problem.dims)?;
        let state = AdmmState::initial(problem.dims, problem.data.len(), cfg.initial_beta());
        Ok(Self {
            dm: vec![0.0; problem.dims.gradient_len()],
            gm: vec![0.0; problem.data.len()],
            problem,
            cfg,
            d1,
            state,
            last_cg_iters: 0,
            last_stats: None,
        })
    }

    /// Replaces the current iterate, e.g. to resume from a previous run.
    pub fn with_state(mut self, state: AdmmState) -> Result<Self> {
        check_len("state m", self.state.m.len(), state.m.len())?;
        check_len("state g1", self.state.g1.len(), state.g1.len())?;
        check_len("state g2", self.state.g2.len(), state.g2.len())?;
        check_len("state lambda1", self.state.lambda1.len(), state.lambda1.len())?;
        check_len("state e", self.state.e.len(), state.e.len())?;
        check_len("state lambda2", self.state.lambda2.len(), state.lambda2.len())?;
        self.d1.forward_into(&state.m, &mut self.dm);
        self.problem.operator.forward_into(&state.m, &mut self.gm);
        self.state = state;
        Ok(self)
    }

    pub fn state(&self) -> &AdmmState {
        &self.state
    }

    pub fn config(&self) -> &AdmmConfig {
        &self.cfg
    }

    pub fn problem(&self) -> &Problem<'a> {
        &self.problem
    }

    pub fn gradient_operator(&self) -> &DerivativeOp {
        &self.d1
    }

    /// `D1 m` for the current model.
    pub fn model_gradient(&self) -> &[f64] {
        &self.dm
    }

    /// Statistics computed during the most recent [`Admm::update_beta`].
    pub fn last_stats(&self) -> Option<&GradientStats> {
        self.last_stats.as_ref()
    }

    /// `||D1 m - g1 - g2|| / (1 + ||D1 m||)`
    pub fn split_residual(&self) -> f64 {
        let s = &self.state;
        let r: f64 = self
            .dm
            .iter()
            .zip(&s.g1)
            .zip(&s.g2)
            .map(|((a, b), c)| (a - b - c).powi(2))
            .sum();
        r.sqrt() / (1.0 + norm2(&self.dm))
    }

    /// Model update by warm-started CG; returns the CG iteration count.
    pub fn update_m(&mut self) -> Result<usize> {
        let s = &self.state;
        let rhs = ModelRhs {
            data: self.problem.data,
            g1: &s.g1,
            g2: &s.g2,
            e: &s.e,
            lambda1: &s.lambda1,
            lambda2: &s.lambda2,
        };
        let out = solve_model_update(
            &self.d1,
            self.problem.operator,
            self.cfg.mu1,
            self.cfg.mu2,
            &rhs,
            &s.m,
            &self.cfg.cg,
        )?;
        self.state.m = out.x;
        self.d1.forward_into(&self.state.m, &mut self.dm);
        self.problem.operator.forward_into(&self.state.m, &mut self.gm);
        self.last_cg_iters = out.iterations;
        Ok(out.iterations)
    }

    pub fn update_g1(&mut self) {
        if self.cfg.mode == Mode::TikhonovOnly {
            return;
        }
        let s = &self.state;
        self.state.g1 = gradient_shrink(&self.dm, &s.g2, &s.lambda1, self.cfg.mu1);
    }

    pub fn update_g2(&mut self) -> Result<()> {
        if self.cfg.mode == Mode::TvOnly {
            return Ok(());
        }
        let s = &self.state;
        let mut v: Vec<f64> = self
            .dm
            .iter()
            .zip(&s.g1)
            .zip(&s.lambda1)
            .map(|((a, b), c)| a - b - c)
            .collect();
        SmoothFilter::new(self.problem.dims, s.beta / self.cfg.mu1)?.apply_in_place(&mut v);
        self.state.g2 = v;
        Ok(())
    }

    /// Noise update; returns the scale `γ` with `e = γ (d - G m + λ2)`.
    pub fn update_e(&mut self) -> f64 {
        let r = self.noise_residual();
        let s = &self.state;
        let out = noise_update(&r, self.cfg.epsilon, s.lambda3, self.cfg.mu2, self.cfg.mu3);
        self.state.e = out.e;
        out.gamma
    }

    /// `d - G m + λ2` for the current model.
    pub fn noise_residual(&self) -> Vec<f64> {
        self.problem
            .data
            .iter()
            .zip(&self.gm)
            .zip(&self.state.lambda2)
            .map(|((d, gm), l)| d - gm + l)
            .collect()
    }

    pub fn update_multipliers(&mut self) {
        let s = &mut self.state;
        for (((l, a), b), dm) in s.lambda1.iter_mut().zip(&s.g1).zip(&s.g2).zip(&self.dm) {
            *l += a + b - dm;
        }
        for (((l, d), e), gm) in s
            .lambda2
            .iter_mut()
            .zip(self.problem.data)
            .zip(&s.e)
            .zip(&self.gm)
        {
            *l += d - e - gm;
        }
        s.lambda3 += self.cfg.epsilon - norm2_sq(&s.e);
    }

    /// Computes the gradient statistics and, for adaptive combined runs,
    /// advances beta by one averaged fixed-point step, never pushing
    /// `beta / mu1` past [`MAX_SMOOTHING`].
    pub fn update_beta(&mut self) -> Result<&GradientStats> {
        let stats = gradient_stats(&self.dm, &self.state.g2, self.cfg.tau_nrm)?;
        if self.cfg.beta_is_adaptive() {
            let cap = MAX_SMOOTHING * self.cfg.mu1;
            self.state.beta = beta_update(self.state.beta, &stats)?.min(cap);
        }
        Ok(self.last_stats.insert(stats))
    }

    /// One full outer iteration.
    pub fn step(&mut self) -> Result<IterationRecord> {
        let k = self.state.k + 1;
        let m_prev_norm = norm2(&self.state.m);
        let m_prev = self.state.m.clone();

        let cg_iters = self.update_m()?;
        if !all_finite(&self.state.m) {
            return Err(Error::Divergence { iteration: k, what: "model" });
        }
        self.update_g1();
        self.update_g2()?;
        self.update_e();
        self.update_multipliers();
        let phi = self.update_beta()?.phi;
        self.state.k = k;

        let s = &self.state;
        if !all_finite(&s.e) || !all_finite(&s.g1) || !all_finite(&s.g2) || !s.lambda3.is_finite() {
            return Err(Error::Divergence { iteration: k, what: "auxiliary variables" });
        }
        if !(s.beta > 0.0) || !s.beta.is_finite() {
            return Err(Error::Divergence { iteration: k, what: "beta" });
        }

        let change = dist2(&s.m, &m_prev);
        let rel_change = if m_prev_norm > 0.0 {
            change / m_prev_norm
        } else if change == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let discrepancy: f64 = self
            .gm
            .iter()
            .zip(self.problem.data)
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        let rel_error = self
            .problem
            .m_true
            .map(|t| dist2(&s.m, t) / norm2(t));
        Ok(IterationRecord {
            k,
            discrepancy,
            constraint_gap: norm2_sq(&s.e) - self.cfg.epsilon,
            beta: s.beta,
            phi,
            rel_change,
            rel_error,
            cg_iters,
        })
    }

    pub fn into_state(self) -> AdmmState {
        self.state
    }
}

/// Runs ADMM until the model stabilizes (or to `max_iter` when
/// `run_to_max_iter` is set), calling `on_iteration` after every iteration.
pub fn run<F>(problem: Problem<'_>, cfg: &AdmmConfig, mut on_iteration: F) -> Result<RunOutcome>
where
    F: FnMut(&IterationRecord),
{
    let mut admm = Admm::new(problem, cfg.clone())?;
    let mut history = Vec::with_capacity(cfg.max_iter.min(10_000));
    let mut stabilized_at = None;
    let mut stop = StopReason::MaxIterations;
    for _ in 0..cfg.max_iter {
        let rec = admm.step()?;
        on_iteration(&rec);
        let settled = rec.rel_change < cfg.rel_change_tol;
        let k = rec.k;
        history.push(rec);
        if settled && stabilized_at.is_none() {
            stabilized_at = Some(k);
            if !cfg.run_to_max_iter {
                stop = StopReason::Stabilized;
                break;
            }
        }
    }
    Ok(RunOutcome {
        state: admm.into_state(),
        history,
        stabilized_at,
        stop,
    })
}
