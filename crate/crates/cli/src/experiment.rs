//! Building test problems from a config, running the solver modes and
//! writing their outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use tiktv::admm::{run, Mode, RunOutcome};
use tiktv::operators::{
    make_derivative_operator, make_gaussian_sensing, make_radon, DerivativeKind, Identity, LinearOperator,
    Operator,
};
use tiktv::problems::{
    add_noise, make_dix_problem, make_dix_problem_2d, make_phantom, make_test_signal,
    make_velocity_field, make_velocity_profile, Picks, TestProblem,
};
use tiktv::robust_stats::gradient_stats;
use tiktv::vecops::norm2;
use tiktv::GridDims;

use crate::config::{Experiment, ExperimentConfig};
use crate::decompose::{decompose, GAUGE_NOTE};
use crate::error::CliError;
use crate::output::{write_image, write_vector, HistoryWriter};

/// One test problem of an experiment; `cs_1d` has one per signal.
pub struct Case {
    pub name: Option<String>,
    pub problem: TestProblem,
}

pub struct ModeResult {
    pub case: Option<String>,
    pub mode: Mode,
    /// Noise budget handed to the solver.
    pub epsilon: f64,
    pub outcome: RunOutcome,
    pub wall_time: Duration,
    /// `||D1 m - g1 - g2|| / (1 + ||D1 m||)` at the last iterate.
    pub split_residual: f64,
    /// `|phi| / (1 + ||nrm(g)||∞)` at the last iterate.
    pub balance: f64,
}

impl ModeResult {
    pub fn final_rel_error(&self) -> Option<f64> {
        self.outcome.last().rel_error
    }

    pub fn final_discrepancy(&self) -> f64 {
        self.outcome.last().discrepancy
    }
}

pub struct Report {
    pub output_dir: PathBuf,
    pub results: Vec<ModeResult>,
}

impl Report {
    pub fn get(&self, case: Option<&str>, mode: Mode) -> Option<&ModeResult> {
        self.results
            .iter()
            .find(|r| r.mode == mode && r.case.as_deref() == case)
    }
}

fn scaled(v: Vec<f64>, s: f64) -> Vec<f64> {
    if s == 1.0 {
        v
    } else {
        v.into_iter().map(|x| x * s).collect()
    }
}

pub fn build_cases(cfg: &ExperimentConfig) -> Result<Vec<Case>, CliError> {
    let p = &cfg.problem;
    let seed = cfg.seed;
    let noisy = |clean: TestProblem| -> Result<TestProblem, CliError> {
        Ok(add_noise(&clean, cfg.noise_level, cfg.noise_reference, seed.wrapping_add(1))?)
    };
    let grid = || GridDims::new(p.nz, p.nx).map_err(CliError::from);
    let single = |problem| Ok(vec![Case { name: None, problem }]);
    match cfg.experiment {
        Experiment::Cs1d => {
            let dims = GridDims::one_d(p.n)?;
            let op: Operator = Arc::new(make_gaussian_sensing(p.m, p.n, seed)?);
            p.signals
                .iter()
                .map(|&kind| {
                    let m = scaled(make_test_signal(kind, p.n)?, p.model_scale);
                    let clean = TestProblem::noiseless(op.clone(), m, dims, seed, kind.name())?;
                    Ok(Case { name: Some(kind.name().to_string()), problem: noisy(clean)? })
                })
                .collect()
        }
        Experiment::Denoise2d | Experiment::Decompose2d => {
            let dims = grid()?;
            let m = scaled(make_phantom(p.phantom, dims)?, p.model_scale);
            let op: Operator = Arc::new(Identity(dims.n()));
            single(noisy(TestProblem::noiseless(op, m, dims, seed, p.phantom.name())?)?)
        }
        Experiment::XrayFull | Experiment::XrayLimited => {
            let dims = grid()?;
            let m = scaled(make_phantom(p.phantom, dims)?, p.model_scale);
            let op: Operator = Arc::new(make_radon(dims, p.n_rays, &cfg.angles())?);
            single(noisy(TestProblem::noiseless(op, m, dims, seed, p.phantom.name())?)?)
        }
        Experiment::Dix1d => {
            let v = scaled(make_velocity_profile(p.n)?, p.model_scale.sqrt());
            single(noisy(make_dix_problem(&v, &Picks::Fraction(p.pick_fraction), seed.wrapping_add(2))?)?)
        }
        Experiment::Dix2d => {
            let dims = grid()?;
            let v = scaled(make_velocity_field(dims)?, p.model_scale.sqrt());
            single(noisy(make_dix_problem_2d(&v, dims, &Picks::Fraction(p.pick_fraction), seed.wrapping_add(2))?)?)
        }
    }
}

fn mode_dir(root: &Path, case: Option<&str>, mode: Mode) -> PathBuf {
    match case {
        Some(c) => root.join(c).join(mode.name()),
        None => root.join(mode.name()),
    }
}

fn run_mode(cfg: &ExperimentConfig, case: &Case, mode: Mode, staging: &Path) -> Result<ModeResult, CliError> {
    let problem = &case.problem;
    let mut solver = cfg.solver_for(mode).clone();
    solver.mode = mode;
    solver.epsilon = cfg.epsilon_scale * problem.epsilon;

    let dir = mode_dir(staging, case.name.as_deref(), mode);
    fs::create_dir_all(&dir).map_err(|e| CliError::io(dir.display(), e))?;
    let mut history = HistoryWriter::create(&dir.join("history.csv"))?;
    let mut write_err = None;
    let start = Instant::now();
    let outcome = run(problem.as_problem(), &solver, |rec| {
        if write_err.is_none() {
            write_err = history.push(rec).err();
        }
    })?;
    let wall_time = start.elapsed();
    if let Some(e) = write_err {
        return Err(e);
    }
    history.finish()?;

    let dims = problem.dims;
    let d1 = make_derivative_operator(DerivativeKind::D1, dims)?;
    let parts = decompose(&outcome.state.m, &outcome.state.g2, &d1, dims)?;
    let image = |v: &[f64], stem: &str| -> Result<(), CliError> {
        if dims.is_2d() {
            let ext = match cfg.image_format {
                crate::ImageFormat::Pgm16 => "pgm",
                crate::ImageFormat::Csv => "csv",
            };
            write_image(v, dims, &dir.join(format!("{stem}.{ext}")), cfg.image_format)
        } else {
            write_vector(v, &dir.join(format!("{stem}.csv")))
        }
    };
    image(&outcome.state.m, "m_est")?;
    image(&parts.m1, "m1")?;
    image(&parts.m2, "m2")?;
    write_vector(&outcome.state.e, &dir.join("e_est.csv"))?;
    let gauge = dir.join("gauge.txt");
    fs::write(&gauge, format!("{GAUGE_NOTE}\n")).map_err(|e| CliError::io(gauge.display(), e))?;

    let dm = d1.forward(&outcome.state.m);
    let st = &outcome.state;
    let split: f64 = dm
        .iter()
        .zip(&st.g1)
        .zip(&st.g2)
        .map(|((a, b), c)| (a - b - c).powi(2))
        .sum::<f64>()
        .sqrt();
    let stats = gradient_stats(&dm, &st.g2, solver.tau_nrm)?;
    let result = ModeResult {
        case: case.name.clone(),
        mode,
        epsilon: solver.epsilon,
        split_residual: split / (1.0 + norm2(&dm)),
        balance: stats.phi.abs() / (1.0 + stats.nrm_inf),
        outcome,
        wall_time,
    };
    let summary = dir.join("summary.txt");
    fs::write(&summary, format!("{SUMMARY_HEADER}\n{}\n", summary_row(&result)))
        .map_err(|e| CliError::io(summary.display(), e))?;
    Ok(result)
}

const SUMMARY_HEADER: &str = "case,mode,iterations,stabilized_at,final_rel_error,final_beta,\
final_discrepancy,epsilon,split_residual,balance,wall_time_s";

fn summary_row(r: &ModeResult) -> String {
    let last = r.outcome.last();
    format!(
        "{},{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.3}",
        r.case.as_deref().unwrap_or("-"),
        r.mode,
        last.k,
        r.outcome.stabilized_at.map(|k| k.to_string()).unwrap_or_default(),
        last.rel_error.map(|e| format!("{e:.16e}")).unwrap_or_default(),
        last.beta,
        last.discrepancy,
        r.epsilon,
        r.split_residual,
        r.balance,
        r.wall_time.as_secs_f64()
    )
}

/// Builds the problem(s), runs every requested mode and writes the results
/// under `out`. Outputs are staged and moved into place only on success.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<Report, CliError> {
    let cases = build_cases(cfg)?;
    fs::create_dir_all(out).map_err(|e| CliError::io(out.display(), e))?;
    let staging = out.join(format!(".staging-{}", std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| CliError::io(staging.display(), e))?;
    }
    fs::create_dir_all(&staging).map_err(|e| CliError::io(staging.display(), e))?;

    let jobs: Vec<(&Case, Mode)> = cases
        .iter()
        .flat_map(|c| cfg.modes.iter().map(move |&m| (c, m)))
        .collect();
    let results: Result<Vec<ModeResult>, CliError> = jobs
        .par_iter()
        .map(|&(case, mode)| run_mode(cfg, case, mode, &staging))
        .collect();
    let finish = results.and_then(|results| {
        let summary = staging.join("summary.csv");
        let mut text = format!("{SUMMARY_HEADER}\n");
        for r in &results {
            text.push_str(&summary_row(r));
            text.push('\n');
        }
        fs::write(&summary, text).map_err(|e| CliError::io(summary.display(), e))?;
        publish(&staging, out)?;
        Ok(results)
    });
    match finish {
        Ok(results) => Ok(Report { output_dir: out.to_path_buf(), results }),
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            Err(e)
        }
    }
}

fn publish(staging: &Path, out: &Path) -> Result<(), CliError> {
    let entries = fs::read_dir(staging).map_err(|e| CliError::io(staging.display(), e))?;
    for entry in entries {
        let entry = entry.map_err(|e| CliError::io(staging.display(), e))?;
        let target = out.join(entry.file_name());
        if target.is_dir() {
            fs::remove_dir_all(&target).map_err(|e| CliError::io(target.display(), e))?;
        } else if target.exists() {
            fs::remove_file(&target).map_err(|e| CliError::io(target.display(), e))?;
        }
        fs::rename(entry.path(), &target).map_err(|e| CliError::io(target.display(), e))?;
    }
    fs::remove_dir(staging).map_err(|e| CliError::io(staging.display(), e))
}
