//! Grid evaluation and table output.
//!
//! Rows are emitted in row-major grid order regardless of how they were
//! computed; sequential runs warm-start each fixed point from its
//! predecessor, parallel runs solve every point independently, so both are
//! deterministic and produce byte-identical tables for a given config.

use crate::config::{apply_axis, Analysis, AxisField, ResolvedSweep, SystemSpec};
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use spinmachine::closedform::nosym_thermo;
use spinmachine::cycle::{ChannelHandle, ChannelTarget, StrokeMode};
use spinmachine::lowtemp::{LowTempParams, SingleExcitationModel};
use spinmachine::mixing::{factorized_eigenvector_test, zero_temperature_channel};
use spinmachine::quantumstate::DensityMatrix;
use spinmachine::spinchain::{build_hamiltonian, build_nosym_hamiltonian, DENSE_SITE_CAP};
use spinmachine::thermo::{
    extract_ansatz, heat_symmetry_residual, predicted_regime, steady_thermo, CycleThermo,
};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

pub const DATA_COLUMNS: &[&str] = &[
    "q_h",
    "q_c",
    "w",
    "clausius",
    "regime",
    "predicted_regime",
    "efficiency",
    "cop",
    "g",
    "f4",
    "heat_sym_residual",
    "gap",
    "zero_t_gap",
    "factorized",
    "f2_lowtemp",
    "lowtemp_q_h",
    "lowtemp_q_c",
    "iterations",
    "residual",
    "status",
];

#[derive(Debug, Clone, Default)]
pub struct RowCells {
    pub q_h: Option<f64>,
    pub q_c: Option<f64>,
    pub w: Option<f64>,
    pub clausius: Option<f64>,
    pub regime: Option<String>,
    pub predicted_regime: Option<String>,
    pub efficiency: Option<f64>,
    pub cop: Option<f64>,
    pub g: Option<f64>,
    pub f4: Option<f64>,
    pub heat_sym_residual: Option<f64>,
    pub gap: Option<f64>,
    pub zero_t_gap: Option<f64>,
    pub factorized: Option<bool>,
    pub f2_lowtemp: Option<f64>,
    pub lowtemp_q_h: Option<f64>,
    pub lowtemp_q_c: Option<f64>,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis_values: Vec<f64>,
    pub cells: RowCells,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.cells.status == "ok"
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Everything shareable across grid points: for stroke-time-only axes the
/// system never changes, so the single-excitation diagonalization is reused.
struct SharedData {
    lowtemp_model: Option<SingleExcitationModel>,
}

fn system_is_constant(axes: &[(AxisField, Vec<f64>)]) -> bool {
    axes.iter().all(|(field, _)| {
        matches!(
            field,
            AxisField::Tau1 | AxisField::Tau2 | AxisField::Tau | AxisField::Beta1 | AxisField::Beta2
        )
    })
}

fn law_status(thermo: &CycleThermo) -> Option<String> {
    let scale = thermo.q_h.abs().max(thermo.q_c.abs()).max(1.0);
    if (thermo.q_h + thermo.q_c + thermo.w).abs() > 1e-10 * scale {
        return Some("first-law-violation".into());
    }
    if thermo.clausius < -1e-10 {
        return Some("second-law-violation".into());
    }
    None
}

fn compute_row(
    resolved: &ResolvedSweep,
    shared: &SharedData,
    axis_values: &[f64],
    warm: Option<&DensityMatrix>,
) -> (SweepRow, Option<DensityMatrix>) {
    let mut system = resolved.system.clone();
    let mut cycle = resolved.cycle;
    for ((field, _), &value) in resolved.axes.iter().zip(axis_values) {
        match apply_axis(&system, &cycle, *field, value) {
            Ok((s, c)) => {
                system = s;
                cycle = c;
            }
            Err(e) => {
                let mut cells = RowCells::default();
                cells.status = format!("axis-error: {e}");
                return (SweepRow { axis_values: axis_values.to_vec(), cells }, None);
            }
        }
    }

    let mut cells = RowCells::default();
    cells.status = "ok".into();
    let wants = |a: Analysis| resolved.analyses.contains(&a);
    let needs_fixed_point = wants(Analysis::Thermo) || wants(Analysis::Regime) || wants(Analysis::Ansatz);
    let mut next_warm = None;

    let thermo: Option<CycleThermo> = if needs_fixed_point {
        match &system {
            SystemSpec::Chain(spec) => {
                match steady_thermo(spec, &cycle, resolved.tol, spinmachine::cycle::DEFAULT_MAX_ITER, warm) {
                    Ok((thermo, heats)) => {
                        cells.iterations = Some(heats.iterations);
                        cells.residual = Some(heats.residual);
                        next_warm = Some(heats.rho_cb_star);
                        Some(thermo)
                    }
                    Err(e) => {
                        cells.status = format!("not-converged: {e}");
                        None
                    }
                }
            }
            SystemSpec::Pair(pair) => match nosym_thermo(pair, &cycle) {
                Ok((thermo, _)) => Some(thermo),
                Err(e) => {
                    cells.status = format!("closed-form-degenerate: {e}");
                    None
                }
            },
        }
    } else {
        None
    };

    if let Some(t) = &thermo {
        if wants(Analysis::Thermo) {
            cells.q_h = Some(t.q_h);
            cells.q_c = Some(t.q_c);
            cells.w = Some(t.w);
            cells.clausius = Some(t.clausius);
            if let Some(bad) = law_status(t) {
                cells.status = bad;
            }
        }
        if wants(Analysis::Regime) {
            cells.regime = Some(t.regime.letter().to_string());
            cells.efficiency = t.efficiency;
            cells.cop = t.cop;
            let (e1, en) = boundary_energies(&system);
            if let Ok(p) = predicted_regime(e1, en, cycle.beta1, cycle.beta2) {
                cells.predicted_regime = Some(p.letter().to_string());
            }
        }
        if wants(Analysis::Ansatz) {
            let (e1, en) = boundary_energies(&system);
            match extract_ansatz(t, e1, en, cycle.beta1, cycle.beta2) {
                Ok(a) => {
                    cells.g = Some(a.g);
                    cells.f4 = a.f4;
                }
                // a vanishing boundary gap makes the decomposition
                // inapplicable at this grid point, not wrong
                Err(spinmachine::Error::ZeroLocalEnergy(_)) => {}
                Err(e) => {
                    if matches!(system, SystemSpec::Chain(_)) {
                        cells.status = format!("ansatz-error: {e}");
                    }
                }
            }
            if let Ok(r) = heat_symmetry_residual(t, e1, en) {
                cells.heat_sym_residual = Some(r);
            }
        }
    }

    if wants(Analysis::Gap) {
        let handle = match &system {
            SystemSpec::Chain(spec) => ChannelHandle::new(spec, &cycle, ChannelTarget::CB),
            SystemSpec::Pair(pair) => ChannelHandle::nosym(pair, &cycle, ChannelTarget::CB),
        };
        if let Ok(h) = handle {
            if let Ok(g) = h.spectral_gap() {
                cells.gap = Some(g);
            }
        }
    }

    if wants(Analysis::Lowtemp) {
        if let SystemSpec::Chain(spec) = &system {
            if cycle.mode == StrokeMode::TwoStroke && spec.e_first() > 0.0 && spec.e_last() > 0.0 {
                let f2 = match &shared.lowtemp_model {
                    Some(model) => model.f2(cycle.tau1),
                    None => spinmachine::lowtemp::f2_lowtemp(spec, cycle.tau1),
                };
                match f2 {
                    Ok(f2) => {
                        cells.f2_lowtemp = Some(f2);
                        if let Ok(params) = LowTempParams::from_baths(spec, cycle.beta1, cycle.beta2) {
                            let dx = params.x1 - params.x2;
                            cells.lowtemp_q_c = Some(dx * f2 * spec.e_last());
                            cells.lowtemp_q_h = Some(-dx * f2 * spec.e_first());
                        }
                    }
                    Err(e) => cells.status = format!("lowtemp-error: {e}"),
                }
            }
        }
    }

    if wants(Analysis::Mixing) {
        if let SystemSpec::Chain(spec) = &system {
            if let Ok(zt) = zero_temperature_channel(spec, &cycle, ChannelTarget::CB) {
                if let Ok(g) = zt.spectral_gap() {
                    cells.zero_t_gap = Some(g);
                }
            }
            if spec.n <= DENSE_SITE_CAP {
                if let Ok(h) = build_hamiltonian(spec) {
                    if let Ok(report) = factorized_eigenvector_test(&h) {
                        cells.factorized = Some(report.found);
                    }
                }
            }
        } else if let SystemSpec::Pair(pair) = &system {
            if let Ok(h) = build_nosym_hamiltonian(pair) {
                if let Ok(report) = factorized_eigenvector_test(&h) {
                    cells.factorized = Some(report.found);
                }
            }
        }
    }

    (SweepRow { axis_values: axis_values.to_vec(), cells }, next_warm)
}

fn boundary_energies(system: &SystemSpec) -> (f64, f64) {
    match system {
        SystemSpec::Chain(c) => (c.e_first(), c.e_last()),
        SystemSpec::Pair(p) => (p.e1, p.e2),
    }
}

fn grid_points(axes: &[(AxisField, Vec<f64>)]) -> Vec<Vec<f64>> {
    match axes {
        [(_, a)] => a.iter().map(|&x| vec![x]).collect(),
        [(_, a), (_, b)] => {
            let mut out = Vec::with_capacity(a.len() * b.len());
            for &x in a {
                for &y in b {
                    out.push(vec![x, y]);
                }
            }
            out
        }
        _ => unreachable!("validated to 1 or 2 axes"),
    }
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub csv_path: PathBuf,
    pub meta_path: PathBuf,
    pub rows: usize,
    pub flagged: usize,
}

/// Evaluate the whole grid and write `<prefix>.csv` plus a JSON sidecar with
/// provenance. Returns the number of rows whose status is not `ok`.
pub fn run_sweep(resolved: &ResolvedSweep, jobs: usize, config_text: &str) -> Result<SweepOutcome, String> {
    let shared = SharedData {
        lowtemp_model: match (&resolved.system, system_is_constant(&resolved.axes)) {
            (SystemSpec::Chain(spec), true) if resolved.analyses.contains(&Analysis::Lowtemp) => {
                Some(SingleExcitationModel::new(spec).map_err(|e| e.to_string())?)
            }
            _ => None,
        },
    };
    let points = grid_points(&resolved.axes);

    let rows: Vec<SweepRow> = if jobs <= 1 {
        let mut rows = Vec::with_capacity(points.len());
        let mut warm: Option<DensityMatrix> = None;
        for p in &points {
            let (row, next) = compute_row(resolved, &shared, p, warm.as_ref());
            if next.is_some() {
                warm = next;
            }
            rows.push(row);
        }
        rows
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(|| {
            points
                .par_iter()
                .map(|p| compute_row(resolved, &shared, p, None).0)
                .collect()
        })
    };

    fs::create_dir_all(&resolved.out_dir).map_err(|e| e.to_string())?;
    let csv_path = resolved.out_dir.join(format!("{}.csv", resolved.prefix));
    let meta_path = resolved.out_dir.join(format!("{}.meta.json", resolved.prefix));

    let mut writer = csv::Writer::from_path(&csv_path).map_err(|e| e.to_string())?;
    let mut header: Vec<String> = resolved.axes.iter().map(|(f, _)| f.name().to_string()).collect();
    header.extend(DATA_COLUMNS.iter().map(|s| s.to_string()));
    writer.write_record(&header).map_err(|e| e.to_string())?;
    let mut flagged = 0usize;
    for row in &rows {
        if !row.is_ok() {
            flagged += 1;
        }
        let c = &row.cells;
        let mut record: Vec<String> = row.axis_values.iter().map(|&v| fmt_f64(v)).collect();
        record.extend([
            opt_f64(c.q_h),
            opt_f64(c.q_c),
            opt_f64(c.w),
            opt_f64(c.clausius),
            c.regime.clone().unwrap_or_default(),
            c.predicted_regime.clone().unwrap_or_default(),
            opt_f64(c.efficiency),
            opt_f64(c.cop),
            opt_f64(c.g),
            opt_f64(c.f4),
            opt_f64(c.heat_sym_residual),
            opt_f64(c.gap),
            opt_f64(c.zero_t_gap),
            c.factorized.map(|b| b.to_string()).unwrap_or_default(),
            opt_f64(c.f2_lowtemp),
            opt_f64(c.lowtemp_q_h),
            opt_f64(c.lowtemp_q_c),
            c.iterations.map(|i| i.to_string()).unwrap_or_default(),
            opt_f64(c.residual),
            c.status.clone(),
        ]);
        writer.write_record(&record).map_err(|e| e.to_string())?;
    }
    writer.flush().map_err(|e| e.to_string())?;

    let mut hasher = Sha256::new();
    hasher.update(config_text.as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        let _ = write!(hex, "{b:02x}");
    }
    let meta = serde_json::json!({
        "tool": "spinmachine",
        "version": env!("CARGO_PKG_VERSION"),
        "config_sha256": hex,
        "rows": rows.len(),
        "flagged": flagged,
        "axes": resolved.axes.iter().map(|(f, v)| serde_json::json!({"field": f.name(), "points": v.len()})).collect::<Vec<_>>(),
        "columns": header,
    });
    fs::write(&meta_path, serde_json::to_string_pretty(&meta).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;

    Ok(SweepOutcome { csv_path, meta_path, rows: rows.len(), flagged })
}
