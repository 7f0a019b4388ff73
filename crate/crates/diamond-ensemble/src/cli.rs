//! Command implementations behind the `diamond` binary.
//!
//! Everything here is a plain library function returning a serializable
//! report, so the binary stays a thin argument parser and the commands are
//! directly testable.

use serde::Serialize;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::asymptotics::{
    self, convergence_reports, expected_energy_trapezoid, AsymptoticReport, AsymptoticsError,
};
use crate::energy::{
    self, expected_energy_general, expected_energy_symmetric, EnergyBreakdown, EnergyError,
};
use crate::ensemble::{LayoutError, ParallelLayout};
use crate::monte_carlo::{mc_expected_energy, McError, McReport};
use crate::profile::{ProfileFamily, ProfileSpec, SpecError};

pub const NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    BadSpec(#[from] SpecError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed CSV: {reason}")]
    MalformedCsv {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{path}:{line}: point has norm {norm}, more than {NORM_TOLERANCE:e} from 1")]
    NonUnitPoint {
        path: PathBuf,
        line: usize,
        norm: f64,
    },
    #[error("unknown verify suite `{0}` (known: formulas, montecarlo)")]
    UnknownSuite(String),
}

/// Point file format written by `generate`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    /// `x,y,z` CSV plus a `.json` provenance sidecar.
    Csv,
    /// Single JSON document with provenance and embedded points.
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (csv or json)")),
        }
    }
}

#[derive(Serialize)]
pub struct GenerateSummary {
    #[serde(rename = "N")]
    pub n_points: i64,
    pub p: usize,
    pub seed: u64,
    pub points_path: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sidecar_path: Option<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Samples the profile named by `spec` and writes the point file(s).
pub fn cmd_generate(
    spec: &str,
    seed: u64,
    out: &Path,
    format: OutputFormat,
) -> Result<GenerateSummary, CliError> {
    let spec: ProfileSpec = spec.parse()?;
    let profile = spec.build()?;
    let layout = ParallelLayout::from_profile(&profile)?;
    let points = layout.sample(seed);

    let sidecar_path = match format {
        OutputFormat::Csv => {
            let file = std::fs::File::create(out).map_err(io_err(out))?;
            let mut w = std::io::BufWriter::new(file);
            points.write_csv(&mut w).map_err(io_err(out))?;
            w.flush().map_err(io_err(out))?;

            let sidecar_path = out.with_extension("json");
            let json = serde_json::to_string_pretty(&points.sidecar()).expect("sidecar is serializable");
            std::fs::write(&sidecar_path, json).map_err(io_err(&sidecar_path))?;
            Some(sidecar_path)
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct FullExport<'a> {
                seed: u64,
                generator_id: &'static str,
                profile: Option<&'a crate::profile::Profile>,
                phases: &'a [f64],
                points: &'a [[f64; 3]],
            }
            let doc = FullExport {
                seed,
                generator_id: crate::ensemble::GENERATOR_ID,
                profile: points.layout().source_profile(),
                phases: points.phases(),
                points: points.points(),
            };
            let json = serde_json::to_string_pretty(&doc).expect("export is serializable");
            std::fs::write(out, json).map_err(io_err(out))?;
            None
        }
    };

    Ok(GenerateSummary {
        n_points: layout.n_points(),
        p: layout.parallel_count(),
        seed,
        points_path: out.to_path_buf(),
        sidecar_path,
    })
}

/// Reads an `x,y,z` CSV of unit vectors.
pub fn read_points_csv(path: &Path) -> Result<Vec<[f64; 3]>, CliError> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    let reader = std::io::BufReader::new(file);
    let mut points = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let lineno = idx + 1;
        if idx == 0 {
            if line.trim() != "x,y,z" {
                return Err(CliError::MalformedCsv {
                    path: path.to_path_buf(),
                    line: lineno,
                    reason: format!("expected header `x,y,z`, got `{line}`"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::MalformedCsv {
                path: path.to_path_buf(),
                line: lineno,
                reason: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let mut pt = [0.0f64; 3];
        for (k, field) in fields.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| CliError::MalformedCsv {
                path: path.to_path_buf(),
                line: lineno,
                reason: format!("field {} is not a number: `{field}`", k + 1),
            })?;
            if !v.is_finite() {
                return Err(CliError::MalformedCsv {
                    path: path.to_path_buf(),
                    line: lineno,
                    reason: format!("field {} is not finite: `{field}`", k + 1),
                });
            }
            pt[k] = v;
        }
        let norm = (pt[0] * pt[0] + pt[1] * pt[1] + pt[2] * pt[2]).sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(CliError::NonUnitPoint {
                path: path.to_path_buf(),
                line: lineno,
                norm,
            });
        }
        points.push(pt);
    }
    Ok(points)
}

#[derive(Serialize)]
pub struct EnergyValue {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    pub value: f64,
    #[serde(rename = "N")]
    pub n_points: usize,
}

/// Log-energy (default) or Riesz `s`-energy of a points file.
pub fn cmd_energy(input: &Path, s: Option<f64>) -> Result<EnergyValue, CliError> {
    let points = read_points_csv(input)?;
    let (kind, value) = match s {
        None => ("log", energy::log_energy(&points)?),
        Some(s) => ("riesz", energy::riesz_energy(&points, s)?),
    };
    Ok(EnergyValue {
        kind,
        s,
        value,
        n_points: points.len(),
    })
}

#[derive(Serialize)]
pub struct ExpectReport {
    pub breakdown: EnergyBreakdown,
    /// Symmetric-layout formula value, when the layout qualifies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetric_formula: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<f64>,
}

/// Expected-energy breakdown for a profile spec, with the symmetric-formula
/// value alongside when applicable.
pub fn cmd_expect(spec: &str) -> Result<ExpectReport, CliError> {
    let spec: ProfileSpec = spec.parse()?;
    let layout = ParallelLayout::from_profile(&spec.build()?)?;
    let breakdown = expected_energy_general(&layout);
    let symmetric = if layout.is_symmetric() && layout.has_optimal_heights() {
        Some(expected_energy_symmetric(&layout)?)
    } else {
        None
    };
    Ok(ExpectReport {
        breakdown,
        symmetric_formula: symmetric,
        difference: symmetric.map(|v| breakdown.total - v),
    })
}

pub struct AsymptoteOutput {
    pub reports: Vec<AsymptoticReport>,
    pub converging: bool,
}

/// Convergence study of a profile family over the given scales.
pub fn cmd_asymptote(family: &str, m_list: &[i64]) -> Result<AsymptoteOutput, CliError> {
    let family: ProfileFamily = family.parse()?;
    let reports = convergence_reports(family, m_list)?;
    let converging = asymptotics::is_strictly_improving(&reports);
    Ok(AsymptoteOutput { reports, converging })
}

#[derive(Serialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct VerifySummary {
    pub suite: String,
    pub checks: Vec<CheckLine>,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct McRun {
    pub layout: String,
    #[serde(flatten)]
    pub report: McReport,
}

fn check(
    checks: &mut Vec<CheckLine>,
    name: impl Into<String>,
    pass: bool,
    detail: impl Into<String>,
) {
    checks.push(CheckLine {
        name: name.into(),
        pass,
        detail: detail.into(),
    });
}

fn formulas_suite() -> Result<Vec<CheckLine>, CliError> {
    let mut checks = Vec::new();

    let three_point = expected_energy_general(&ParallelLayout::from_counts(&[1])?).total;
    let want = -4.0 * std::f64::consts::LN_2;
    check(
        &mut checks,
        "three-point value",
        (three_point - want).abs() < 1e-13,
        format!("{three_point} vs {want}"),
    );

    for spec in ["simple:K=4,M=4", "elaborated:m=2", "quasioptimal:m=2"] {
        let parsed: ProfileSpec = spec.parse()?;
        let profile = parsed.build()?;
        let layout = ParallelLayout::from_profile(&profile)?;
        let general = expected_energy_general(&layout).total;
        let symmetric = expected_energy_symmetric(&layout)?;
        let trapezoid = expected_energy_trapezoid(&profile)?;
        let scale = general.abs();
        let worst = (general - symmetric)
            .abs()
            .max((general - trapezoid).abs())
            .max((symmetric - trapezoid).abs());
        check(
            &mut checks,
            format!("three-route agreement {spec}"),
            worst <= 1e-11 * scale,
            format!("max spread {worst:e} of {scale:e}"),
        );
    }

    // random symmetric count vectors: the two layout-level routes
    let mut state = 0x51ab_1d0a_dead_beefu64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut worst_rel: f64 = 0.0;
    for _ in 0..20 {
        let half = (next() % 11) as usize + 1;
        let mut counts: Vec<i64> = (0..half).map(|_| (next() % 40) as i64 + 1).collect();
        for j in (0..half - 1).rev() {
            counts.push(counts[j]);
        }
        let layout = ParallelLayout::from_counts(&counts)?;
        let general = expected_energy_general(&layout).total;
        let symmetric = expected_energy_symmetric(&layout)?;
        worst_rel = worst_rel.max((general - symmetric).abs() / general.abs());
    }
    check(
        &mut checks,
        "random symmetric counts, general vs symmetric",
        worst_rel <= 1e-11,
        format!("worst relative spread {worst_rel:e}"),
    );

    Ok(checks)
}

fn montecarlo_suite(trials: u64, base_seed: u64) -> Result<Vec<CheckLine>, CliError> {
    let mut checks = Vec::new();
    let cases: Vec<(String, ParallelLayout)> = vec![
        ("counts [2,2]".into(), ParallelLayout::from_counts(&[2, 2])?),
        (
            "quasioptimal:m=1".into(),
            ParallelLayout::from_profile(&ProfileSpec::Quasioptimal { m: 1 }.build()?)?,
        ),
    ];
    for (name, layout) in cases {
        let report = mc_expected_energy(&layout, trials, base_seed)?;
        check(
            &mut checks,
            format!("z-score {name}"),
            report.z_score.abs() <= 4.0,
            format!(
                "z = {:.3} over {} trials (mean {}, closed form {})",
                report.z_score, report.trials, report.mean_energy, report.closed_form
            ),
        );
    }
    Ok(checks)
}

/// Runs a named invariant suite. `trials`/`base_seed` apply to the
/// montecarlo suite.
pub fn cmd_verify(suite: &str, trials: u64, base_seed: u64) -> Result<VerifySummary, CliError> {
    let checks = match suite {
        "formulas" => formulas_suite()?,
        "montecarlo" => montecarlo_suite(trials, base_seed)?,
        other => return Err(CliError::UnknownSuite(other.to_string())),
    };
    let passed = checks.iter().all(|c| c.pass);
    Ok(VerifySummary {
        suite: suite.to_string(),
        checks,
        passed,
    })
}
