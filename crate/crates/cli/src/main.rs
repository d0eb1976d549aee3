use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chdbc::experiments::{
    defect_times, mesh_info, mesh_info_table, report_eoc, run_convergence, run_defects, run_spinodal,
};
use chdbc::scenario::{parse_config, InitialData, Scenario};
use chdbc::Error;

#[derive(Parser)]
#[command(
    name = "chdbc",
    version,
    about = "Bulk-surface FEM / BDF solver for Cahn-Hilliard with dynamic boundary conditions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spatial/temporal convergence sweep against the manufactured solution.
    Converge(RunArgs),
    /// Phase separation from random data; writes the energy trace and snapshots.
    Spinodal(RunArgs),
    /// Print mesh statistics for every configured level.
    MeshInfo(RunArgs),
    /// Defect dual norms of the Ritz-mapped exact solution across levels.
    Defects(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML). Without it the verb's built-in preset is used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random initial data.
    #[arg(long)]
    seed: Option<u64>,
    /// BDF order 1..=6.
    #[arg(long)]
    bdf: Option<usize>,
    /// Use refinement levels 1..=k.
    #[arg(long)]
    levels: Option<usize>,
    /// Comma-separated step sizes.
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<f64>>,
}

fn load(args: &RunArgs, preset: &str) -> Result<Scenario, Error> {
    let mut s = match &args.config {
        Some(path) => parse_config(path)?,
        None => Scenario::preset(preset)?,
    };
    if let Some(dir) = &args.out {
        s.output.dir = dir.clone();
    }
    if let Some(seed) = args.seed {
        s.initial_data = InitialData::RandomPm1 { seed };
    }
    if let Some(q) = args.bdf {
        s.bdf_order = q;
    }
    if let Some(k) = args.levels {
        s.mesh_levels = (1..=k).collect();
    }
    if let Some(t) = &args.tau {
        s.tau_list = t.clone();
    }
    s.validate()?;
    Ok(s)
}

fn converge(s: &Scenario) -> Result<(), Error> {
    let dir = s.output.dir.as_path();
    let reports = run_convergence(s, dir)?;
    println!("h,tau,n_nodes,err_u_L2,err_u_H1,err_w_L2,err_w_H1");
    for r in &reports {
        let c = r.combined;
        println!("{:.4e},{:.4e},{},{:.4e},{:.4e},{:.4e},{:.4e}", r.h, r.tau, r.n_nodes, c[0], c[1], c[2], c[3]);
    }
    for pair in reports.windows(2).filter(|p| p[0].tau == p[1].tau) {
        let e = report_eoc(&pair[0], &pair[1]);
        println!(
            "eoc tau={:.4e} h {:.4e}->{:.4e}: u L2 {:.3} u H1 {:.3} w L2 {:.3} w H1 {:.3}",
            pair[0].tau, pair[0].h, pair[1].h, e[8], e[9], e[10], e[11]
        );
    }
    print_outputs(dir, &["errors.csv", "eoc.csv", "manifest.txt"]);
    Ok(())
}

fn spinodal(s: &Scenario) -> Result<(), Error> {
    let dir = s.output.dir.as_path();
    let out = run_spinodal(s, dir)?;
    let p = out.energy.points();
    let (first, last) = (p[0], p[p.len() - 1]);
    println!("nodes {} tau {} steps {}", out.n_nodes, out.tau, s.steps_for(out.tau));
    println!("energy t={:.4} {:.6e} -> t={:.4} {:.6e}", first.0, first.1, last.0, last.1);
    println!("largest single-step energy increase {:.3e}", out.energy.max_increase());
    print_outputs(dir, &["energy.csv", "manifest.txt"]);
    Ok(())
}

fn defects(s: &Scenario) -> Result<(), Error> {
    let dir = s.output.dir.as_path();
    let rows = run_defects(s, dir)?;
    println!("h,n_nodes,t,d_u,d_w");
    for r in &rows {
        println!("{:.4e},{},{:.4},{:.4e},{:.4e}", r.h, r.n_nodes, r.t, r.d_u, r.d_w);
    }
    println!("times {:?}", defect_times(s));
    print_outputs(dir, &["defects.csv", "defects_eoc.csv", "manifest.txt"]);
    Ok(())
}

fn print_outputs(dir: &Path, files: &[&str]) {
    for f in files {
        println!("wrote {}", dir.join(f).display());
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Converge(a) => converge(&load(&a, "convergence")?),
        Command::Spinodal(a) => spinodal(&load(&a, "spinodal")?),
        Command::MeshInfo(a) => {
            print!("{}", mesh_info_table(&mesh_info(&load(&a, "convergence")?)?));
            Ok(())
        }
        Command::Defects(a) => defects(&load(&a, "convergence")?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
