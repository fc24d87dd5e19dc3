use crate::error::{Error, Result};
use crate::kernels::CgSettings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Tikhonov-TV with both gradient components.
    Combined,
    /// `g2 ≡ 0`: anisotropic TV only.
    TvOnly,
    /// `g1 ≡ 0`: second-order Tikhonov only.
    TikhonovOnly,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Combined, Mode::TvOnly, Mode::TikhonovOnly];

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Combined => "combined",
            Mode::TvOnly => "tv_only",
            Mode::TikhonovOnly => "tikhonov_only",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "combined" => Ok(Mode::Combined),
            "tv_only" | "tv" => Ok(Mode::TvOnly),
            "tikhonov_only" | "tikhonov" => Ok(Mode::TikhonovOnly),
            other => Err(Error::InvalidArgument(format!("unknown mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaPolicy {
    /// Averaged fixed-point update after every outer iteration.
    Adaptive,
    /// Constant balancing parameter.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmConfig {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    /// Squared noise budget `||e||²`.
    pub epsilon: f64,
    pub tau_nrm: f64,
    pub beta0: f64,
    pub max_iter: usize,
    pub rel_change_tol: f64,
    pub mode: Mode,
    pub beta_policy: BetaPolicy,
    pub cg: CgSettings,
    /// Keep iterating after the model has stabilized, up to `max_iter`.
    pub run_to_max_iter: bool,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            mu1: 10.0,
            mu2: 1.0,
            mu3: 1.0,
            epsilon: 0.0,
            tau_nrm: 2.5,
            beta0: 1.0,
            max_iter: 500,
            rel_change_tol: 1e-4,
            mode: Mode::Combined,
            beta_policy: BetaPolicy::Adaptive,
            cg: CgSettings::default(),
            run_to_max_iter: false,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        for (name, v) in [("mu1", self.mu1), ("mu2", self.mu2), ("mu3", self.mu3)] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        if self.mode == Mode::Combined && !(self.mu1 > self.mu2) {
            return bad(format!(
                "combined mode needs mu1 > mu2, got mu1 = {}, mu2 = {}",
                self.mu1, self.mu2
            ));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return bad(format!("epsilon must be finite and >= 0, got {}", self.epsilon));
        }
        if !(self.tau_nrm > 0.0) {
            return bad(format!("tau_nrm must be > 0, got {}", self.tau_nrm));
        }
        if !(self.beta0 > 0.0) || !self.beta0.is_finite() {
            return bad(format!("beta0 must be finite and > 0, got {}", self.beta0));
        }
        if let BetaPolicy::Fixed(b) = self.beta_policy {
            if !(b > 0.0) || !b.is_finite() {
                return bad(format!("fixed beta must be finite and > 0, got {b}"));
            }
        }
        if self.max_iter == 0 {
            return bad("max_iter must be >= 1".into());
        }
        if !(self.rel_change_tol >= 0.0) {
            return bad(format!("rel_change_tol must be >= 0, got {}", self.rel_change_tol));
        }
        self.cg.validate()
    }

    /// The balancing parameter used at the first iteration.
    pub fn initial_beta(&self) -> f64 {
        match self.beta_policy {
            BetaPolicy::Fixed(b) => b,
            BetaPolicy::Adaptive => self.beta0,
        }
    }

    /// Whether beta is updated between iterations.
    pub fn beta_is_adaptive(&self) -> bool {
        self.mode == Mode::Combined && self.beta_policy == BetaPolicy::Adaptive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        AdmmConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_invalid() {
        let base = AdmmConfig::default();
        let cases = [
            AdmmConfig { mu1: 1.0, ..base.clone() },
            AdmmConfig { mu3: 0.0, ..base.clone() },
            AdmmConfig { epsilon: -1.0, ..base.clone() },
            AdmmConfig { tau_nrm: 0.0, ..base.clone() },
            AdmmConfig { beta0: 0.0, ..base.clone() },
            AdmmConfig { beta_policy: BetaPolicy::Fixed(-1.0), ..base.clone() },
            AdmmConfig { max_iter: 0, ..base.clone() },
        ];
        for c in cases {
            assert!(c.validate().is_err(), "{c:?}");
        }
        // mu1 > mu2 is only required when both components are active
        AdmmConfig { mu1: 1.0, mode: Mode::TvOnly, ..base }.validate().unwrap();
    }

    #[test]
    fn mode_parsing() {
        for m in Mode::ALL {
            assert_eq!(m.name().parse::<Mode>().unwrap(), m);
        }
        assert!("isotropic".parse::<Mode>().is_err());
    }
}
