//! `export-tables`: write plot-ready CSV tables — the (k, |ξ|², λ) index
//! table, Morse-series coefficients, and per-component conjugate-point
//! schedules — plus the canonical JSON report when the format is json.
//! Runs the enumeration fresh; indices come from the Hessian spectrum
//! without the full classification sweep.

use std::fs;
use std::path::{Path, PathBuf};

use loopmorse_core::jacobi::CurvatureSpectrum;
use loopmorse_core::morse::{
    builtin_cohomology, comparison_degree_cap, enumerate_critical, SeriesVariant,
};
use loopmorse_core::series::{morse_series, MorseSeries};

use crate::config::{run_err, CliError, FormatChoice, RunConfig};
use crate::report::{
    csv_err, finish_csv, format_float, to_canonical_json, ComponentReport, Phase, RunReport,
    SeriesReport,
};

pub fn run(config: RunConfig, out_dir: &Path) -> Result<(RunReport, Vec<PathBuf>), CliError> {
    let space = config.build_space()?;
    let spec = space.model().group();
    let mut timings = Vec::new();

    let comps = {
        let _p = Phase::start(&mut timings, "enumeration");
        enumerate_critical(&space).map_err(run_err)?
    };

    let mut components = Vec::new();
    let mut schedules: Vec<(i64, Vec<(f64, usize)>)> = Vec::new();
    {
        let _p = Phase::start(&mut timings, "indices");
        for comp in &comps {
            let spectrum = space.hessian_matrix(&comp.config).map_err(run_err)?;
            components.push(ComponentReport::bare(&space, comp, spectrum.negative));
            // Schedule of interior conjugate points along the ξ-geodesic;
            // t = 1 itself is excluded by the strict cutoff.
            let curvature = CurvatureSpectrum::compute(spec, &comp.xi).map_err(run_err)?;
            let points = curvature
                .conjugate_points(1.0 - 1e-9)
                .into_iter()
                .map(|p| (p.time, p.multiplicity))
                .collect();
            schedules.push((components.last().expect("just pushed").winding, points));
        }
    }

    let series = {
        let _p = Phase::start(&mut timings, "series");
        let model = space.model();
        let cap = config.degree_cap.unwrap_or_else(|| comparison_degree_cap(spec, &comps));
        let gather = |variant: SeriesVariant| -> Vec<(usize, Option<MorseSeries>)> {
            comps
                .iter()
                .zip(&components)
                .map(|(comp, row)| (row.index, builtin_cohomology(model, comp, variant, cap)))
                .collect()
        };
        let ordinary_terms = gather(SeriesVariant::Ordinary);
        let equivariant_terms = gather(SeriesVariant::GroupEquivariant);
        let available = !comps.is_empty()
            && ordinary_terms.iter().all(|(_, s)| s.is_some())
            && equivariant_terms.iter().all(|(_, s)| s.is_some());
        if available {
            let ordinary = morse_series(&ordinary_terms, cap).map_err(run_err)?;
            let equivariant = morse_series(&equivariant_terms, cap).map_err(run_err)?;
            Some(SeriesReport {
                degree_cap: cap,
                ordinary_display: ordinary.to_string(),
                ordinary: ordinary.coefficients().to_vec(),
                equivariant_display: equivariant.to_string(),
                equivariant: equivariant.coefficients().to_vec(),
            })
        } else {
            None
        }
    };

    let report = RunReport {
        command: "export-tables".into(),
        injectivity_radius: spec.injectivity_radius(),
        sublevel_bound: space.sublevel_bound(),
        config,
        components,
        series,
        perfection: None,
        checks: Vec::new(),
        passed: true,
        timings,
    };

    let written = write_tables(&report, &schedules, out_dir)?;
    Ok((report, written))
}

/// Write the three CSV tables (header-only when a run produced no rows) and
/// the JSON report when the configured format asks for it.
fn write_tables(
    report: &RunReport,
    schedules: &[(i64, Vec<(f64, usize)>)],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_dir).map_err(|e| {
        CliError::Config(format!("cannot create output directory {}: {e}", out_dir.display()))
    })?;
    let mut written = Vec::new();
    let mut save = |name: &str, text: String| -> Result<(), CliError> {
        let path = out_dir.join(name);
        fs::write(&path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
        Ok(())
    };

    // Index table: winding, squared velocity norm, Morse index (energy in
    // metric-c units).
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "xi_norm_sq", "lambda"]).map_err(csv_err)?;
    for c in &report.components {
        w.write_record([
            c.winding.to_string(),
            format_float(c.value),
            c.index.to_string(),
        ])
        .map_err(csv_err)?;
    }
    save("index_table.csv", finish_csv(w)?)?;

    // Morse-series coefficients per degree, when the run assembles one.
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["degree", "ordinary", "equivariant"]).map_err(csv_err)?;
    if let Some(series) = &report.series {
        for (degree, (a, b)) in series.ordinary.iter().zip(&series.equivariant).enumerate() {
            w.write_record([degree.to_string(), a.to_string(), b.to_string()])
                .map_err(csv_err)?;
        }
    }
    save("series.csv", finish_csv(w)?)?;

    // Conjugate-point schedules of the component velocities on (0, 1).
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "time", "multiplicity"]).map_err(csv_err)?;
    for (winding, points) in schedules {
        for (time, multiplicity) in points {
            w.write_record([
                winding.to_string(),
                format_float(*time),
                multiplicity.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    save("conjugate_schedule.csv", finish_csv(w)?)?;

    if report.config.format == FormatChoice::Json {
        let json = to_canonical_json(report)?;
        crate::schema::validate_report_json(&json)?;
        save("report.json", json + "\n")?;
    }
    Ok(written)
}
