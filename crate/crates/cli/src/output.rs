//! On-disk formats: iteration histories, images and plain vectors.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use tiktv::admm::IterationRecord;
use tiktv::GridDims;

use crate::error::CliError;

pub const HISTORY_HEADER: &str = "iter,discrepancy,constraint_gap,beta,phi,rel_change,rel_error,cg_iters";

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path.display(), e))
}

/// 17 significant digits, enough to round-trip any `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Streaming writer for `history.csv`.
pub struct HistoryWriter {
    out: BufWriter<File>,
    path: std::path::PathBuf,
}

impl HistoryWriter {
    pub fn create(path: &Path) -> Result<Self, CliError> {
        let mut out = create(path)?;
        writeln!(out, "{HISTORY_HEADER}").map_err(|e| CliError::io(path.display(), e))?;
        Ok(Self { out, path: path.to_path_buf() })
    }

    pub fn push(&mut self, r: &IterationRecord) -> Result<(), CliError> {
        let rel_error = r.rel_error.map(num).unwrap_or_default();
        writeln!(
            self.out,
            "{},{},{},{},{},{},{},{}",
            r.k,
            num(r.discrepancy),
            num(r.constraint_gap),
            num(r.beta),
            num(r.phi),
            num(r.rel_change),
            rel_error,
            r.cg_iters
        )
        .map_err(|e| CliError::io(self.path.display(), e))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush().map_err(|e| CliError::io(self.path.display(), e))
    }
}

pub fn write_history_csv(history: &[IterationRecord], path: &Path) -> Result<(), CliError> {
    if history.is_empty() {
        return Err(CliError::Config("refusing to write an empty history".into()));
    }
    let mut w = HistoryWriter::create(path)?;
    for r in history {
        w.push(r)?;
    }
    w.finish()
}

pub fn read_history_csv(path: &Path) -> Result<Vec<IterationRecord>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    let mut lines = text.lines();
    if lines.next() != Some(HISTORY_HEADER) {
        return Err(CliError::Io(format!("{}: unexpected header", path.display())));
    }
    let bad = |n: usize| CliError::Io(format!("{}: malformed row {n}", path.display()));
    lines
        .enumerate()
        .map(|(n, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 8 {
                return Err(bad(n + 1));
            }
            let x = |i: usize| f[i].parse::<f64>().map_err(|_| bad(n + 1));
            Ok(IterationRecord {
                k: f[0].parse().map_err(|_| bad(n + 1))?,
                discrepancy: x(1)?,
                constraint_gap: x(2)?,
                beta: x(3)?,
                phi: x(4)?,
                rel_change: x(5)?,
                rel_error: if f[6].is_empty() { None } else { Some(x(6)?) },
                cg_iters: f[7].parse().map_err(|_| bad(n + 1))?,
            })
        })
        .collect()
}

/// One value per line.
pub fn write_vector(v: &[f64], path: &Path) -> Result<(), CliError> {
    let mut out = create(path)?;
    let io = |e| CliError::io(path.display(), e);
    for x in v {
        writeln!(out, "{}", num(*x)).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    text.lines()
        .flat_map(|l| l.split(','))
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Io(format!("{}: bad number `{s}`", path.display()))))
        .collect()
}

/// Writes a column-major model as an image with `nz` rows and `nx` columns.
///
/// `pgm16` scales linearly from `[min, max]` to `[0, 65535]` and records the
/// range in `<path>.range`; a constant image maps to all zeros.
pub fn write_image(model: &[f64], dims: GridDims, path: &Path, format: crate::ImageFormat) -> Result<(), CliError> {
    if model.len() != dims.n() {
        return Err(CliError::Config(format!(
            "image of {} samples does not match grid {dims}",
            model.len()
        )));
    }
    let io = |e| CliError::io(path.display(), e);
    let mut out = create(path)?;
    match format {
        crate::ImageFormat::Csv => {
            for iz in 0..dims.nz {
                let row: Vec<String> = (0..dims.nx).map(|ix| num(model[dims.index(iz, ix)])).collect();
                writeln!(out, "{}", row.join(",")).map_err(io)?;
            }
        }
        crate::ImageFormat::Pgm16 => {
            let lo = model.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = model.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let span = hi - lo;
            writeln!(out, "P5 {} {} 65535", dims.nx, dims.nz).map_err(io)?;
            let mut bytes = Vec::with_capacity(2 * dims.n());
            for iz in 0..dims.nz {
                for ix in 0..dims.nx {
                    let v = model[dims.index(iz, ix)];
                    let s = if span > 0.0 { ((v - lo) / span * 65535.0).round() as u16 } else { 0 };
                    bytes.extend_from_slice(&s.to_be_bytes());
                }
            }
            out.write_all(&bytes).map_err(io)?;
            let mut side = path.as_os_str().to_owned();
            side.push(".range");
            let side = Path::new(&side);
            std::fs::write(side, format!("min = {}\nmax = {}\n", num(lo), num(hi)))
                .map_err(|e| CliError::io(side.display(), e))?;
        }
    }
    out.flush().map_err(io)
}
