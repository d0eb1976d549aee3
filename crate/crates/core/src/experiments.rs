//! Experiment drivers behind the command-line verbs. Each writes its CSV
//! files row by row into the scenario's output directory, plus a manifest.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::Discretisation;
use crate::diagnostics::{
    defect_dual_norms, energy, eoc, error_vs_exact, manufactured_solution_xy, EnergyTrace, ErrorReport, ExactSolution,
    ERRORS_CSV_HEADER,
};
use crate::error::{Error, Result};
use crate::mesh::{disk_mesh_with_nodes, generate_disk_mesh, write_vtk, Mesh2D, MeshMetrics};
use crate::scenario::{ExactKind, InitialData, MeshSpec, Scenario};
use crate::timestepping::{compute_theta, integrate, BdfScheme, FieldState, ForcingProvider, NoForcing, Problem};

pub const EOC_CSV_HEADER: &str = "tau,h_coarse,h_fine,eoc_u_L2_bulk,eoc_u_L2_surf,eoc_u_H1_bulk,eoc_u_H1_surf,\
eoc_w_L2_bulk,eoc_w_L2_surf,eoc_w_H1_bulk,eoc_w_H1_surf,eoc_u_L2,eoc_u_H1,eoc_w_L2,eoc_w_H1";
pub const DEFECTS_CSV_HEADER: &str = "h,n_nodes,t,d_u,d_w";
pub const DEFECTS_EOC_CSV_HEADER: &str = "t,h_coarse,h_fine,eoc_d_u,eoc_d_w";

/// Base mesh of the scenario refined `level` times.
pub fn build_mesh(scenario: &Scenario, level: usize) -> Result<Mesh2D> {
    let base = match scenario.mesh {
        MeshSpec::BaseWidth(h) => generate_disk_mesh(scenario.domain_radius, h)?,
        MeshSpec::TargetNodes(n) => disk_mesh_with_nodes(scenario.domain_radius, n)?,
    };
    Ok(base.refined(level))
}

pub fn exact_solution(scenario: &Scenario) -> Option<ExactSolution> {
    scenario.exact_solution.map(|k| match k {
        ExactKind::Xy => manufactured_solution_xy(&scenario.potential),
    })
}

/// Seeded `±1` nodal values.
pub fn random_pm1(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect()
}

/// Problem data and initial state of one run on `disc`.
pub struct Setup<'a> {
    pub problem: Problem<'a>,
    pub initial: FieldState,
}

pub fn setup<'a>(
    scenario: &Scenario,
    disc: &'a Discretisation,
    exact: Option<&ExactSolution>,
    forcing: &'a dyn ForcingProvider,
) -> Result<Setup<'a>> {
    let need_exact = || exact.ok_or_else(|| Error::InvalidArgument("scenario needs an exact solution".into()));
    let n = disc.n();
    let u0 = match scenario.initial_data {
        InitialData::InterpolatedExact => disc.interpolate(&need_exact()?.u, 0.0),
        InitialData::RitzExact => disc.ritz_map(&need_exact()?.u, 0.0)?,
        InitialData::RandomPm1 { seed } => random_pm1(n, seed),
        InitialData::Constant(v) => vec![v; n],
    };
    let mut problem = Problem::new(disc, scenario.potential.clone()).with_forcing(forcing);
    if scenario.theta_correction {
        let ex = need_exact()?;
        let u_r = disc.ritz_map(&ex.u, 0.0)?;
        let w_r = disc.ritz_map(&ex.w, 0.0)?;
        let f_w = forcing.load_w(disc, 0.0);
        problem = problem.with_theta(compute_theta(disc, &scenario.potential, &u_r, &w_r, f_w.as_deref())?);
    }
    let initial = problem.initial_state(u0, 0.0)?;
    Ok(Setup { problem, initial })
}

fn record_step(step: usize, n_steps: usize, cadence: usize) -> bool {
    step.is_multiple_of(cadence) || step == n_steps
}

/// One convergence run: errors against the exact solution, maximised over
/// the recorded steps.
pub fn run_convergence_case(scenario: &Scenario, level: usize, tau: f64) -> Result<ErrorReport> {
    let exact = exact_solution(scenario).ok_or_else(|| Error::Config {
        field: "exact_solution".into(),
        message: "convergence runs need an exact solution".into(),
    })?;
    let disc = Discretisation::new(build_mesh(scenario, level)?)?;
    let forcing = exact.forcing();
    let Setup { problem, initial } = setup(scenario, &disc, Some(&exact), &forcing)?;
    let scheme = BdfScheme::new(scenario.bdf_order)?;
    let n_steps = scenario.steps_for(tau);
    let mut report = ErrorReport::new(disc.mesh.mesh_width(), tau, disc.n());
    let cadence = scenario.output.cadence;
    let mut observe = |k: usize, s: &FieldState| -> Result<()> {
        if record_step(k, n_steps, cadence) {
            report.record(&error_vs_exact(&disc.mesh, s, &exact)?)?;
        }
        Ok(())
    };
    integrate(&problem, &scheme, tau, n_steps, initial, &mut observe)?;
    Ok(report)
}

fn eoc_or_nan(values: &[f64], hs: &[f64]) -> f64 {
    eoc(values, hs).map(|v| v[0]).unwrap_or(f64::NAN)
}

/// EOCs between two runs with the same `τ`: the eight error columns followed
/// by the bulk + surface sums.
pub fn report_eoc(coarse: &ErrorReport, fine: &ErrorReport) -> Vec<f64> {
    let hs = [coarse.h, fine.h];
    let (c, f) = (coarse.max.as_array(), fine.max.as_array());
    let mut out: Vec<f64> = (0..8).map(|i| eoc_or_nan(&[c[i], f[i]], &hs)).collect();
    out.extend((0..4).map(|i| eoc_or_nan(&[coarse.combined[i], fine.combined[i]], &hs)));
    out
}

fn csv_writer(dir: &Path, name: &str, header: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(File::create(dir.join(name))?);
    writeln!(w, "{header}")?;
    w.flush()?;
    Ok(w)
}

fn fmt_row(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{v:.10e}");
    }
    s
}

/// Node counts of all configured levels.
pub fn node_counts(scenario: &Scenario) -> Result<Vec<usize>> {
    scenario.mesh_levels.iter().map(|&l| build_mesh(scenario, l).map(|m| m.n_nodes())).collect()
}

/// Plain-text manifest: comment lines with the version, seed and node
/// counts, followed by the full scenario as TOML, so the file can be passed
/// back as `--config` to rerun.
pub fn manifest(scenario: &Scenario, node_counts: &[usize]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# chdbc {}", env!("CARGO_PKG_VERSION"));
    let seed = match scenario.initial_data {
        InitialData::RandomPm1 { seed } => seed.to_string(),
        _ => "none".into(),
    };
    let _ = writeln!(s, "# seed: {seed}");
    let _ = writeln!(s, "# mesh_levels: {:?}", scenario.mesh_levels);
    let _ = writeln!(s, "# node_counts: {node_counts:?}");
    s.push_str(&scenario.to_toml());
    s
}

pub fn write_manifest(dir: &Path, scenario: &Scenario, node_counts: &[usize]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("manifest.txt"), manifest(scenario, node_counts))?;
    Ok(())
}

/// Runs every `(τ, level)` pair, writing `errors.csv` row by row and
/// `eoc.csv` with the EOCs between consecutive levels at equal `τ`.
pub fn run_convergence(scenario: &Scenario, out: &Path) -> Result<Vec<ErrorReport>> {
    write_manifest(out, scenario, &node_counts(scenario)?)?;
    let mut errors = csv_writer(out, "errors.csv", ERRORS_CSV_HEADER)?;
    let mut eocs = csv_writer(out, "eoc.csv", EOC_CSV_HEADER)?;
    let mut reports = Vec::new();
    for &tau in &scenario.tau_list {
        let mut prev: Option<ErrorReport> = None;
        for &level in &scenario.mesh_levels {
            let report = run_convergence_case(scenario, level, tau)?;
            writeln!(errors, "{}", report.csv_row())?;
            errors.flush()?;
            if let Some(p) = &prev {
                let mut row = vec![tau, p.h, report.h];
                row.extend(report_eoc(p, &report));
                writeln!(eocs, "{}", fmt_row(&row))?;
                eocs.flush()?;
            }
            prev = Some(report.clone());
            reports.push(report);
        }
    }
    Ok(reports)
}

#[derive(Debug, Clone)]
pub struct SpinodalOutcome {
    pub energy: EnergyTrace,
    pub n_nodes: usize,
    pub tau: f64,
    pub final_state: FieldState,
}

fn snapshot_steps(scenario: &Scenario, tau: f64) -> Vec<usize> {
    scenario.output.snapshot_times.iter().map(|t| (t / tau).round() as usize).collect()
}

/// Phase separation run on the first configured level with the first `τ`.
/// Writes `energy.csv`, VTK snapshots at the configured times and, if
/// enabled, `checkpoint.csv` at the output cadence.
pub fn run_spinodal(scenario: &Scenario, out: &Path) -> Result<SpinodalOutcome> {
    let level = scenario.mesh_levels[0];
    let tau = scenario.tau_list[0];
    let disc = Discretisation::new(build_mesh(scenario, level)?)?;
    write_manifest(out, scenario, &[disc.n()])?;
    let Setup { problem, initial } = setup(scenario, &disc, exact_solution(scenario).as_ref(), &NoForcing)?;
    let scheme = BdfScheme::new(scenario.bdf_order)?;
    let n_steps = scenario.steps_for(tau);
    let cadence = scenario.output.cadence;
    let snaps = snapshot_steps(scenario, tau);

    let mut energy_csv = csv_writer(out, "energy.csv", "t,energy")?;
    let mut checkpoint =
        if scenario.output.checkpoint { Some(csv_writer(out, "checkpoint.csv", "t,node,u,w")?) } else { None };
    let mut trace = EnergyTrace::new();
    let pot = &scenario.potential;
    let mut observe = |k: usize, s: &FieldState| -> Result<()> {
        if record_step(k, n_steps, cadence) {
            let e = energy(&disc, pot, &s.u)?;
            trace.push(s.t, e)?;
            writeln!(energy_csv, "{:.12e},{:.12e}", s.t, e)?;
            energy_csv.flush()?;
            if let Some(w) = checkpoint.as_mut() {
                for (i, (u, wv)) in s.u.iter().zip(&s.w).enumerate() {
                    writeln!(w, "{:.12e},{i},{u:.17e},{wv:.17e}", s.t)?;
                }
                w.flush()?;
            }
        }
        if snaps.contains(&k) {
            let path = out.join(format!("snapshot_{k:06}.vtk"));
            let title = format!("{} t={}", scenario.name, s.t);
            write_vtk(&path, &disc.mesh, &title, &[("u", &s.u), ("w", &s.w)])?;
        }
        Ok(())
    };
    let final_state = integrate(&problem, &scheme, tau, n_steps, initial, &mut observe)?;
    Ok(SpinodalOutcome { energy: trace, n_nodes: disc.n(), tau, final_state })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectRow {
    pub h: f64,
    pub n_nodes: usize,
    pub t: f64,
    pub d_u: f64,
    pub d_w: f64,
}

/// Times at which defects are evaluated: the snapshot times, or
/// `0, T/2, T` when none are configured.
pub fn defect_times(scenario: &Scenario) -> Vec<f64> {
    if scenario.output.snapshot_times.is_empty() {
        vec![0.0, 0.5 * scenario.final_time, scenario.final_time]
    } else {
        scenario.output.snapshot_times.clone()
    }
}

/// Dual norms of the defects of the Ritz-mapped exact solution on every
/// level, written to `defects.csv` and `defects_eoc.csv`.
pub fn run_defects(scenario: &Scenario, out: &Path) -> Result<Vec<DefectRow>> {
    let exact = exact_solution(scenario).ok_or_else(|| Error::Config {
        field: "exact_solution".into(),
        message: "defect sweeps need an exact solution".into(),
    })?;
    write_manifest(out, scenario, &node_counts(scenario)?)?;
    let times = defect_times(scenario);
    let mut csv = csv_writer(out, "defects.csv", DEFECTS_CSV_HEADER)?;
    let mut rows = Vec::new();
    for &level in &scenario.mesh_levels {
        let disc = Discretisation::new(build_mesh(scenario, level)?)?;
        let h = disc.mesh.mesh_width();
        for &t in &times {
            let (d_u, d_w) = defect_dual_norms(&disc, &scenario.potential, &exact, t)?;
            writeln!(csv, "{h:.10e},{},{t:.10e},{d_u:.10e},{d_w:.10e}", disc.n())?;
            csv.flush()?;
            rows.push(DefectRow { h, n_nodes: disc.n(), t, d_u, d_w });
        }
    }
    let mut eocs = csv_writer(out, "defects_eoc.csv", DEFECTS_EOC_CSV_HEADER)?;
    for (i, &t) in times.iter().enumerate() {
        let at: Vec<&DefectRow> = rows.iter().skip(i).step_by(times.len()).collect();
        for pair in at.windows(2) {
            let hs = [pair[0].h, pair[1].h];
            let eu = eoc_or_nan(&[pair[0].d_u, pair[1].d_u], &hs);
            let ew = eoc_or_nan(&[pair[0].d_w, pair[1].d_w], &hs);
            writeln!(eocs, "{}", fmt_row(&[t, pair[0].h, pair[1].h, eu, ew]))?;
        }
    }
    eocs.flush()?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshInfo {
    pub level: usize,
    pub metrics: MeshMetrics,
    pub quasi_uniformity: f64,
}

pub fn mesh_info(scenario: &Scenario) -> Result<Vec<MeshInfo>> {
    scenario
        .mesh_levels
        .iter()
        .map(|&level| {
            let mesh = build_mesh(scenario, level)?;
            mesh.validate()?;
            Ok(MeshInfo { level, metrics: mesh.metrics(), quasi_uniformity: mesh.quasi_uniformity() })
        })
        .collect()
}

pub fn mesh_info_table(rows: &[MeshInfo]) -> String {
    let mut s = String::from("level,n_nodes,n_boundary_nodes,n_triangles,h,area,perimeter,quasi_uniformity\n");
    for r in rows {
        let m = &r.metrics;
        let _ = writeln!(
            s,
            "{},{},{},{},{:.6e},{:.10e},{:.10e},{:.4}",
            r.level, m.n_nodes, m.n_boundary_nodes, m.n_triangles, m.h, m.area, m.perimeter, r.quasi_uniformity
        );
    }
    s
}
