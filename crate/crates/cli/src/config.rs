//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Solver keys may be given
//! globally or prefixed with a mode name (`tv_only.mu1 = 5`) to override
//! that mode only. Every key must be consumed, so typos are reported.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use tiktv::admm::{AdmmConfig, BetaPolicy, Mode};
use tiktv::problems::{NoiseReference, PhantomKind, SignalKind};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Cs1d,
    Denoise2d,
    Dix1d,
    Dix2d,
    XrayFull,
    XrayLimited,
    Decompose2d,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Cs1d,
        Experiment::Denoise2d,
        Experiment::Dix1d,
        Experiment::Dix2d,
        Experiment::XrayFull,
        Experiment::XrayLimited,
        Experiment::Decompose2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Cs1d => "cs_1d",
            Experiment::Denoise2d => "denoise_2d",
            Experiment::Dix1d => "dix_1d",
            Experiment::Dix2d => "dix_2d",
            Experiment::XrayFull => "xray_full",
            Experiment::XrayLimited => "xray_limited",
            Experiment::Decompose2d => "decompose_2d",
        }
    }

    fn is_2d(self) -> bool {
        !matches!(self, Experiment::Cs1d | Experiment::Dix1d)
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm16,
    Csv,
}

impl FromStr for ImageFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pgm16" => Ok(ImageFormat::Pgm16),
            "csv" => Ok(ImageFormat::Csv),
            _ => Err(format!("unknown image format `{s}` (expected pgm16 or csv)")),
        }
    }
}

/// Problem geometry. Fields that an experiment does not use are ignored,
/// but only keys relevant to the chosen experiment are accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemParams {
    pub n: usize,
    pub m: usize,
    pub signals: Vec<SignalKind>,
    pub nz: usize,
    pub nx: usize,
    pub phantom: PhantomKind,
    pub n_rays: usize,
    pub n_angles: usize,
    pub angle_min: f64,
    pub angle_max: f64,
    pub pick_fraction: f64,
    /// Multiplies the generated true model.
    pub model_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub problem: ProblemParams,
    pub noise_level: f64,
    pub noise_reference: NoiseReference,
    pub epsilon_scale: f64,
    pub modes: Vec<Mode>,
    /// Solver settings per mode; `epsilon` is filled in from the problem.
    pub solver: BTreeMap<ModeKey, AdmmConfig>,
    pub image_format: ImageFormat,
    pub output: Option<PathBuf>,
}

/// `Mode` ordered by declaration, for use as a map key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModeKey(u8);

impl From<Mode> for ModeKey {
    fn from(m: Mode) -> Self {
        ModeKey(Mode::ALL.iter().position(|x| *x == m).unwrap() as u8)
    }
}

impl ExperimentConfig {
    pub fn solver_for(&self, mode: Mode) -> &AdmmConfig {
        &self.solver[&ModeKey::from(mode)]
    }

    pub fn solver_for_mut(&mut self, mode: Mode) -> &mut AdmmConfig {
        self.solver.get_mut(&ModeKey::from(mode)).unwrap()
    }

    /// Defaults for an experiment, before any keys are applied.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut problem = ProblemParams {
            n: 1024,
            m: 250,
            signals: SignalKind::ALL.to_vec(),
            nz: 256,
            nx: 256,
            phantom: PhantomKind::PiecewiseSmooth2d,
            n_rays: 181,
            n_angles: 90,
            angle_min: -90.0,
            angle_max: 88.0,
            pick_fraction: 0.25,
            model_scale: 1.0,
        };
        let mut noise_level = 0.001;
        let mut noise_reference = NoiseReference::DataNorm;
        let mut modes = vec![Mode::Combined];
        match experiment {
            Experiment::Cs1d => {}
            Experiment::Denoise2d => {
                noise_level = 0.3;
                noise_reference = NoiseReference::ModelNorm;
                modes = Mode::ALL.to_vec();
            }
            Experiment::Decompose2d => {
                (problem.nz, problem.nx) = (128, 128);
                problem.phantom = PhantomKind::SmoothBlobMix;
                noise_level = 0.05;
                noise_reference = NoiseReference::ModelNorm;
            }
            Experiment::Dix1d => problem.n = 512,
            Experiment::Dix2d => {
                (problem.nz, problem.nx) = (128, 96);
                problem.pick_fraction = 0.3;
            }
            Experiment::XrayFull => {
                (problem.nz, problem.nx) = (128, 128);
                problem.phantom = PhantomKind::SheppLogan;
                noise_level = 0.01;
                modes = Mode::ALL.to_vec();
            }
            Experiment::XrayLimited => {
                (problem.nz, problem.nx) = (128, 128);
                problem.phantom = PhantomKind::SmoothBlobMix;
                problem.n_angles = 85;
                problem.angle_min = -42.0;
                problem.angle_max = 42.0;
                noise_level = 0.01;
                modes = Mode::ALL.to_vec();
            }
        }
        let solver = Mode::ALL
            .into_iter()
            .map(|m| (ModeKey::from(m), AdmmConfig { mode: m, ..AdmmConfig::default() }))
            .collect();
        Self {
            experiment,
            seed: 1,
            problem,
            noise_level,
            noise_reference,
            epsilon_scale: 1.0,
            modes,
            solver,
            image_format: ImageFormat::Pgm16,
            output: None,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = parse_entries(text)?;
        let experiment = match entries.remove("experiment") {
            Some(e) => e.value.parse::<Experiment>().map_err(|m| e.error(m))?,
            None => return Err(CliError::Config("missing required key `experiment`".into())),
        };
        let mut cfg = Self::defaults(experiment);
        cfg.apply(&mut entries)?;
        if let Some((key, e)) = entries.into_iter().next() {
            return Err(CliError::Config(format!(
                "line {}: unknown key `{key}` for experiment {}",
                e.line,
                experiment.name()
            )));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, entries: &mut Entries) -> Result<(), CliError> {
        take(entries, "seed", &mut self.seed)?;
        take(entries, "noise_level", &mut self.noise_level)?;
        if let Some(e) = entries.remove("noise_reference") {
            self.noise_reference = match e.value.as_str() {
                "data_norm" => NoiseReference::DataNorm,
                "model_norm" => NoiseReference::ModelNorm,
                _ => return Err(e.error("expected data_norm or model_norm")),
            };
        }
        take(entries, "epsilon_scale", &mut self.epsilon_scale)?;
        if let Some(e) = entries.remove("modes") {
            self.modes = parse_list(&e.value).map_err(|m| e.error(m))?;
        }
        take(entries, "image_format", &mut self.image_format)?;
        if let Some(e) = entries.remove("output") {
            self.output = Some(PathBuf::from(e.value));
        }
        take(entries, "model_scale", &mut self.problem.model_scale)?;

        let p = &mut self.problem;
        match self.experiment {
            Experiment::Cs1d => {
                take(entries, "n", &mut p.n)?;
                take(entries, "m", &mut p.m)?;
                if let Some(e) = entries.remove("signals") {
                    p.signals = parse_list(&e.value).map_err(|m| e.error(m))?;
                }
            }
            Experiment::Dix1d => {
                take(entries, "n", &mut p.n)?;
                take(entries, "pick_fraction", &mut p.pick_fraction)?;
            }
            Experiment::Dix2d => {
                take(entries, "nz", &mut p.nz)?;
                take(entries, "nx", &mut p.nx)?;
                take(entries, "pick_fraction", &mut p.pick_fraction)?;
            }
            Experiment::Denoise2d | Experiment::Decompose2d => {
                take(entries, "nz", &mut p.nz)?;
                take(entries, "nx", &mut p.nx)?;
                take(entries, "phantom", &mut p.phantom)?;
            }
            Experiment::XrayFull | Experiment::XrayLimited => {
                take(entries, "nz", &mut p.nz)?;
                take(entries, "nx", &mut p.nx)?;
                take(entries, "phantom", &mut p.phantom)?;
                take(entries, "n_rays", &mut p.n_rays)?;
                take(entries, "n_angles", &mut p.n_angles)?;
                take(entries, "angle_min", &mut p.angle_min)?;
                take(entries, "angle_max", &mut p.angle_max)?;
            }
        }

        // Unprefixed solver keys apply to every mode, so each mode reads from
        // its own copy and the shared entries are consumed once at the end.
        for mode in Mode::ALL {
            let solver = self.solver.get_mut(&ModeKey::from(mode)).unwrap();
            apply_solver(&mut entries.clone(), "", solver)?;
        }
        apply_solver(entries, "", &mut AdmmConfig::default())?;
        for mode in Mode::ALL {
            let prefix = format!("{}.", mode.name());
            let solver = self.solver.get_mut(&ModeKey::from(mode)).unwrap();
            apply_solver(entries, &prefix, solver)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.modes.is_empty() {
            return bad("`modes` must name at least one mode".into());
        }
        let p = &self.problem;
        if self.experiment == Experiment::Cs1d && p.signals.is_empty() {
            return bad("`signals` must name at least one signal".into());
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return bad(format!("noise_level must be >= 0, got {}", self.noise_level));
        }
        if !(self.epsilon_scale >= 0.0 && self.epsilon_scale.is_finite()) {
            return bad(format!("epsilon_scale must be >= 0, got {}", self.epsilon_scale));
        }
        if !(p.model_scale > 0.0 && p.model_scale.is_finite()) {
            return bad(format!("model_scale must be > 0, got {}", p.model_scale));
        }
        if self.experiment.is_2d() && (p.nz < 16 || p.nx < 2) {
            return bad(format!("grid {}x{} is too small", p.nz, p.nx));
        }
        if matches!(self.experiment, Experiment::XrayFull | Experiment::XrayLimited) {
            if p.n_angles == 0 || p.n_rays == 0 {
                return bad("n_angles and n_rays must be positive".into());
            }
            if p.angle_min > p.angle_max || p.angle_min < -90.0 || p.angle_max > 90.0 {
                return bad(format!(
                    "angles must satisfy -90 <= angle_min <= angle_max <= 90, got [{}, {}]",
                    p.angle_min, p.angle_max
                ));
            }
        }
        for &mode in &self.modes {
            let mut s = self.solver_for(mode).clone();
            s.epsilon = 0.0;
            s.validate()
                .map_err(|e| CliError::Config(format!("solver settings for {mode}: {e}")))?;
        }
        Ok(())
    }

    /// Evenly spaced projection angles, endpoints included.
    pub fn angles(&self) -> Vec<f64> {
        let p = &self.problem;
        if p.n_angles == 1 {
            return vec![p.angle_min];
        }
        let step = (p.angle_max - p.angle_min) / (p.n_angles - 1) as f64;
        (0..p.n_angles).map(|k| p.angle_min + k as f64 * step).collect()
    }
}

fn apply_solver(entries: &mut Entries, prefix: &str, s: &mut AdmmConfig) -> Result<(), CliError> {
    let key = |k: &str| format!("{prefix}{k}");
    take(entries, &key("mu1"), &mut s.mu1)?;
    take(entries, &key("mu2"), &mut s.mu2)?;
    take(entries, &key("mu3"), &mut s.mu3)?;
    take(entries, &key("tau_nrm"), &mut s.tau_nrm)?;
    take(entries, &key("beta0"), &mut s.beta0)?;
    take(entries, &key("max_iter"), &mut s.max_iter)?;
    take(entries, &key("rel_change_tol"), &mut s.rel_change_tol)?;
    take(entries, &key("run_to_max_iter"), &mut s.run_to_max_iter)?;
    take(entries, &key("cg_rel_tol"), &mut s.cg.rel_tol)?;
    take(entries, &key("cg_max_iter"), &mut s.cg.max_iter)?;
    take(entries, &key("cg_warm_start"), &mut s.cg.warm_start)?;
    if let Some(e) = entries.remove(&key("beta_fixed")) {
        let v: f64 = e.value.parse().map_err(|_| e.error("expected a number"))?;
        s.beta_policy = BetaPolicy::Fixed(v);
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

impl Entry {
    fn error(&self, msg: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("line {}: key `{}`: {msg}", self.line, self.key))
    }
}

type Entries = BTreeMap<String, Entry>;

fn parse_entries(text: &str) -> Result<Entries, CliError> {
    let mut out = Entries::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("line {}: expected `key = value`", i + 1)));
        };
        let key = k.trim().to_string();
        let value = v.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key or value", i + 1)));
        }
        if let Some(prev) = out.get(&key) {
            return Err(CliError::Config(format!(
                "line {}: key `{key}` already set on line {}",
                i + 1,
                prev.line
            )));
        }
        out.insert(key.clone(), Entry { key, value, line: i + 1 });
    }
    Ok(out)
}

trait ConfigValue: Sized {
    fn parse_value(s: &str) -> Result<Self, String>;
}

macro_rules! from_str_value {
    ($($t:ty),*) => {$(
        impl ConfigValue for $t {
            fn parse_value(s: &str) -> Result<Self, String> {
                s.parse::<$t>().map_err(|e| e.to_string())
            }
        }
    )*};
}
from_str_value!(u64, usize, f64);

impl ConfigValue for bool {
    fn parse_value(s: &str) -> Result<Self, String> {
        match s {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            _ => Err(format!("expected a boolean, got `{s}`")),
        }
    }
}

impl ConfigValue for ImageFormat {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse()
    }
}

impl ConfigValue for PhantomKind {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse().map_err(|e: tiktv::Error| e.to_string())
    }
}

impl ConfigValue for SignalKind {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse().map_err(|e: tiktv::Error| e.to_string())
    }
}

impl ConfigValue for Mode {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse().map_err(|e: tiktv::Error| e.to_string())
    }
}

fn take<T: ConfigValue>(entries: &mut Entries, key: &str, slot: &mut T) -> Result<(), CliError> {
    if let Some(e) = entries.remove(key) {
        *slot = T::parse_value(&e.value).map_err(|m| e.error(m))?;
    }
    Ok(())
}

fn parse_list<T: ConfigValue + PartialEq>(s: &str) -> Result<Vec<T>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let v = T::parse_value(item)?;
        if out.contains(&v) {
            return Err(format!("`{item}` listed twice"));
        }
        out.push(v);
    }
    Ok(out)
}
