//! Batch driver behind the `wtc` binary: expand a configured problem, verify
//! the series, sample the field, and write CSV/JSON artifacts.
//!
//! Exit status: 0 when every check passes, 1 for a verification defect or an
//! internal inconsistency, 2 for configuration and I/O errors.

pub mod config;
pub mod table;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use wtc_nls::recursion::CompatDefects;
use wtc_nls::verify::{estimate_growth, sample_field, verify_series, GridSpec, VerificationReport};
use wtc_nls::{
    expand_potential, generate_with, PotentialExpansion, PotentialSpec64, Series64, WtcError,
};

pub use config::RunConfig;

#[derive(Debug)]
pub enum Failure {
    /// Bad configuration, grid, or file.
    Config(anyhow::Error),
    /// A check exceeded its tolerance.
    Defect(Vec<String>),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Defect(_) => 1,
            Failure::Config(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "error: {e:#}"),
            Failure::Defect(list) => {
                write!(f, "verification failed:")?;
                for item in list {
                    write!(f, "\n  {item}")?;
                }
                Ok(())
            }
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

impl From<WtcError> for Failure {
    fn from(e: WtcError) -> Self {
        match e {
            WtcError::Inconsistent { .. } => Failure::Defect(vec![e.to_string()]),
            other => Failure::Config(other.into()),
        }
    }
}

pub type Outcome<T = ()> = std::result::Result<T, Failure>;

/// Generated series with the inputs it came from.
pub struct Run {
    pub spec: PotentialSpec64,
    pub expansion: PotentialExpansion<f64>,
    pub series: Series64,
}

pub fn run(config: &RunConfig) -> Outcome<Run> {
    let spec = config.spec();
    let series = generate_with(
        &spec,
        &config.free(),
        config.n,
        config.k_target,
        &config.generation_tolerances(),
    )?;
    let expansion = expand_potential(&spec.truncate(config.required_order()))?;
    Ok(Run {
        spec,
        expansion,
        series,
    })
}

#[derive(Serialize)]
struct Summary<'a> {
    n: usize,
    k_target: usize,
    jet_order: usize,
    t0: f64,
    leading_magnitudes: Vec<f64>,
    valid_order: &'a [usize],
    compat: Option<CompatDefects>,
    conjugacy_defect: f64,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    #[serde(flatten)]
    report: &'a VerificationReport,
    failures: &'a [String],
}

fn create(out: &Path, name: &str) -> anyhow::Result<(PathBuf, BufWriter<File>)> {
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let path = out.join(name);
    let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok((path, BufWriter::new(file)))
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> anyhow::Result<PathBuf> {
    use std::io::Write;
    let (path, mut w) = create(out, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}

/// Writes the coefficient table and a summary with `|u_j(t0)|`, valid orders
/// and resonance diagnostics.
pub fn expand(config: &RunConfig, out: &Path) -> Outcome {
    let run = run(config)?;
    let (path, w) = create(out, &config.outputs.coefficients)?;
    table::write_coefficients(&run.series, w)?;
    println!("wrote {}", path.display());

    let summary = Summary {
        n: run.series.n,
        k_target: config.k_target,
        jet_order: config.order(),
        t0: config.t0,
        leading_magnitudes: run.series.leading_magnitudes(),
        valid_order: &run.series.valid_order,
        compat: run.series.diagnostics.as_ref().map(|d| d.defects()),
        conjugacy_defect: wtc_nls::verify::conjugacy_defect(&run.series),
    };
    let path = write_json(out, &config.outputs.summary, &summary)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Annulus `radius/4 <= |Psi| <= radius/2` at `t0`, or `None` when the
/// radius estimate is unreliable or infinite.
pub fn auto_grid(config: &RunConfig, series: &Series64) -> Option<GridSpec> {
    let growth = estimate_growth(series);
    if !growth.reliable || !growth.radius.is_finite() {
        return None;
    }
    let r_max = growth.radius / 2.0;
    let r_min = growth.radius / 4.0;
    let centre = -config.potential.psi.first().copied().unwrap_or(0.0);
    Some(GridSpec {
        x_min: centre - r_max,
        x_max: centre + r_max,
        dx: (r_min / 8.0).min(1e-3),
        t_min: config.t0,
        t_max: config.t0,
        dt: 1e-4,
        r_min,
        r_max,
        trust: None,
    })
}

fn judge(config: &RunConfig, out: &Path, run: &Run) -> Outcome {
    let grid = config.grid.or_else(|| auto_grid(config, &run.series));
    let report = verify_series(&run.series, &run.spec, &run.expansion, grid.as_ref())?;
    let failures = report.failures(&config.tolerances);
    let path = write_json(
        out,
        &config.outputs.report,
        &ReportFile {
            report: &report,
            failures: &failures,
        },
    )?;
    println!("wrote {}", path.display());
    if failures.is_empty() {
        println!(
            "pass: max coefficient residual {:e}, conjugacy defect {:e}",
            report.max_coeff_residual(),
            report.conjugacy_defect
        );
        Ok(())
    } else {
        Err(Failure::Defect(failures))
    }
}

/// Generates the series, runs every check and writes the report.
pub fn verify(config: &RunConfig, out: &Path) -> Outcome {
    let run = run(config)?;
    judge(config, out, &run)
}

/// Re-reads a coefficient table written by [`expand`] and verifies it.
pub fn report(config: &RunConfig, out: &Path) -> Outcome {
    let path = out.join(&config.outputs.coefficients);
    let file = File::open(&path).with_context(|| format!("cannot open {}", path.display()))?;
    let series = table::read_coefficients(file, config.t0)
        .with_context(|| format!("invalid coefficient table {}", path.display()))?;
    let spec = config.spec();
    let expansion = expand_potential(&spec.truncate(config.required_order()))?;
    judge(
        config,
        out,
        &Run {
            spec,
            expansion,
            series,
        },
    )
}

/// Writes field samples over the configured grid.
pub fn sample(config: &RunConfig, out: &Path) -> Outcome {
    let grid = config.grid.context("sample needs a grid in the config")?;
    let run = run(config)?;
    let samples = sample_field(&run.series, &run.spec, &grid, run.series.n)?;
    let (path, w) = create(out, &config.outputs.samples)?;
    table::write_samples(&samples, w)?;
    println!("wrote {} ({} rows)", path.display(), samples.len());
    Ok(())
}
