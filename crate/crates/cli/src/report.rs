//! Report assembly and serialization. JSON is the canonical output and is
//! byte-deterministic for a fixed configuration and seed: struct field order
//! fixes key order and every float is written with 17 significant digits.
//! CSV is a projection of the same tables. Wall-clock timings are printed to
//! stderr and never enter the canonical document.

use std::io::Write as _;
use std::time::Instant;

use loopmorse_core::morse::CriticalComponent;
use loopmorse_core::pathspace::PathSpace;
use serde::Serialize;

use crate::config::{CliError, RunConfig};

/// One row of the check table. `status` is the authority: most rows pass
/// when `residual ≤ tolerance`, the torus-fixed rows when the reported
/// singular value stays above its floor, and `vacuous` marks checks with
/// nothing to test under the current configuration.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Vacuous,
}

impl CheckRow {
    pub fn threshold(name: impl Into<String>, residual: f64, tolerance: f64) -> CheckRow {
        let status = if residual <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        CheckRow { name: name.into(), residual, tolerance, status }
    }

    pub fn vacuous(name: impl Into<String>, tolerance: f64) -> CheckRow {
        CheckRow { name: name.into(), residual: 0.0, tolerance, status: CheckStatus::Vacuous }
    }

    pub fn ok(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

/// One critical component as reported: the classification fields are null
/// when the command did not run the full classification (table export).
#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    /// Nearest lattice winding k with |ξ| = 2πk√(2c).
    pub winding: i64,
    /// Diagonal angles of the chamber representative ξ.
    pub velocity_angles: Vec<f64>,
    /// Critical value |ξ|².
    pub value: f64,
    /// Morse index λ_C.
    pub index: usize,
    pub orbit: String,
    pub centralizer_dim: usize,
    pub isotropy_dim: usize,
    pub torus_fixed: Option<bool>,
    pub torus_scaled_singular: Option<f64>,
    pub min_margin: Option<f64>,
    pub null_alignment: Option<f64>,
    pub index_samples: Option<Vec<usize>>,
}

impl ComponentReport {
    /// Table-only view of a component with a computed index.
    pub fn bare(space: &PathSpace, comp: &CriticalComponent, index: usize) -> ComponentReport {
        let spec = space.model().group();
        let scale = 2.0 * std::f64::consts::PI * (2.0 * spec.metric_scale()).sqrt();
        ComponentReport {
            winding: (spec.norm(&comp.xi) / scale).round() as i64,
            velocity_angles: spec.diag_angles(&comp.xi).unwrap_or_default(),
            value: comp.value,
            index,
            orbit: comp.orbit.clone(),
            centralizer_dim: comp.centralizer_dim,
            isotropy_dim: comp.isotropy_dim,
            torus_fixed: None,
            torus_scaled_singular: None,
            min_margin: None,
            null_alignment: None,
            index_samples: None,
        }
    }
}

/// Assembled Morse series (present only when every component has a built-in
/// cohomology table).
#[derive(Debug, Clone, Serialize)]
pub struct SeriesReport {
    pub degree_cap: usize,
    pub ordinary: Vec<i64>,
    pub ordinary_display: String,
    pub equivariant: Vec<i64>,
    pub equivariant_display: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PerfectionVerdict {
    Perfect,
    Imperfect,
    Unavailable,
}

/// Comparison of the Morse series against the loop-space targets 1/(1−t²)
/// and 1/((1−t²)(1−t⁴)).
#[derive(Debug, Clone, Serialize)]
pub struct PerfectionSummary {
    pub verdict: PerfectionVerdict,
    /// Largest degree the enumerated components determine: 4·k_max + 1.
    pub valid_cap: usize,
    /// Cap actually compared (the requested degree, else the valid cap).
    pub compared_cap: Option<usize>,
    pub ordinary_difference: Option<Vec<i64>>,
    pub equivariant_difference: Option<Vec<i64>>,
}

impl PerfectionSummary {
    pub fn unavailable(valid_cap: usize) -> PerfectionSummary {
        PerfectionSummary {
            verdict: PerfectionVerdict::Unavailable,
            valid_cap,
            compared_cap: None,
            ordinary_difference: None,
            equivariant_difference: None,
        }
    }
}

/// The canonical report emitted by every command.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config: RunConfig,
    /// Injectivity radius ρ̄ of the configured metric.
    pub injectivity_radius: f64,
    /// Sublevel bound ½·n·ρ̄² defining the search domain.
    pub sublevel_bound: f64,
    /// Component table, sorted by critical value.
    pub components: Vec<ComponentReport>,
    pub series: Option<SeriesReport>,
    pub perfection: Option<PerfectionSummary>,
    pub checks: Vec<CheckRow>,
    pub passed: bool,
    /// Phase timings in milliseconds; stderr only, never serialized, so the
    /// canonical JSON stays byte-identical across runs.
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl RunReport {
    pub fn print_timings(&self) {
        for (name, ms) in &self.timings {
            eprintln!("{name}: {ms:.1} ms");
        }
    }
}

/// Stopwatch helper appending phase durations to a timing list.
pub struct Phase<'a> {
    timings: &'a mut Vec<(String, f64)>,
    name: String,
    start: Instant,
}

impl<'a> Phase<'a> {
    pub fn start(timings: &'a mut Vec<(String, f64)>, name: &str) -> Phase<'a> {
        Phase { timings, name: name.to_string(), start: Instant::now() }
    }
}

impl Drop for Phase<'_> {
    fn drop(&mut self) {
        self.timings.push((self.name.clone(), self.start.elapsed().as_secs_f64() * 1e3));
    }
}

/// 17-significant-digit float formatting shared by JSON and CSV output.
/// Zeros are signless so algebraically-zero entries print identically.
pub fn format_float(value: f64) -> String {
    if value == 0.0 {
        format!("{:.16e}", 0.0)
    } else if value.is_finite() {
        format!("{value:.16e}")
    } else {
        "null".to_string()
    }
}

struct FixedFloatFormatter;

impl serde_json::ser::Formatter for FixedFloatFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Canonical single-line JSON with pinned float formatting.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloatFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Run(format!("report serialization failed: {e}")))?;
    String::from_utf8(buf).map_err(|e| CliError::Run(format!("report is not UTF-8: {e}")))
}

/// CSV projection of the component table (units: energy in metric-c units).
pub fn components_csv(components: &[ComponentReport]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["winding", "velocity_angles", "value", "index", "orbit", "torus_fixed"])
        .map_err(csv_err)?;
    for c in components {
        let angles: Vec<String> = c.velocity_angles.iter().map(|a| format_float(*a)).collect();
        w.write_record([
            c.winding.to_string(),
            angles.join(";"),
            format_float(c.value),
            c.index.to_string(),
            c.orbit.clone(),
            c.torus_fixed.map_or("".to_string(), |b| b.to_string()),
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

/// CSV projection of the check table.
pub fn checks_csv(checks: &[CheckRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "residual", "tolerance", "status"]).map_err(csv_err)?;
    for row in checks {
        let status = match row.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Vacuous => "vacuous",
        };
        w.write_record([
            row.name.clone(),
            format_float(row.residual),
            format_float(row.tolerance),
            status.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

pub fn csv_err(e: csv::Error) -> CliError {
    CliError::Run(format!("CSV assembly failed: {e}"))
}

pub fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Run(format!("CSV flush failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Run(format!("CSV is not UTF-8: {e}")))
}

/// Emit the report on stdout in the configured format.
pub fn emit(report: &RunReport) -> Result<(), CliError> {
    let text = match report.config.format {
        crate::config::FormatChoice::Json => {
            let json = to_canonical_json(report)?;
            crate::schema::validate_report_json(&json)?;
            json
        }
        crate::config::FormatChoice::Csv => {
            if report.command == "verify" {
                checks_csv(&report.checks)?
            } else {
                components_csv(&report.components)?
            }
        }
    };
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
        .map_err(|e| CliError::Run(format!("writing to stdout failed: {e}")))?;
    report.print_timings();
    Ok(())
}
