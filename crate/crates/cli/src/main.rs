//! Command-line front end: configuration ingestion, scenario registry,
//! and artifact emission around the verification suite.

mod report;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use neumann_core::config::{self, Overrides, SuiteConfig};
use neumann_core::phi::constants;
use neumann_core::sde::simulate_path;
use neumann_core::verify::{run_suite, suite_exit_code, ConstantsMode};
use neumann_core::Result;

#[derive(Parser)]
#[command(
    name = "neumann",
    about = "Reflected-diffusion simulator and functional-inequality verifier",
    version
)]
struct Cli {
    /// TOML suite file (the embedded default suite when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    n_paths: Option<usize>,

    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Directory for CSV/SVG artifacts.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    /// Restrict to a single scenario id.
    #[arg(long, global = true)]
    scenario: Option<String>,

    /// Source of the curvature constants on the right-hand sides.
    #[arg(long, global = true, value_parser = parse_constants)]
    constants: Option<ConstantsMode>,

    /// Print scenario ids and exit.
    #[arg(long, global = true)]
    list_scenarios: bool,

    /// Parse and validate the configuration, then exit.
    #[arg(long, global = true)]
    validate_only: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the conformal-factor constants per scenario as CSV.
    Phi,
    /// Simulate reflected paths for a scenario.
    Simulate {
        /// Write the trajectories as CSV (path, t, coordinates, local time).
        #[arg(long)]
        dump: bool,
    },
    /// Run the inequality suite and emit reports.
    Verify,
    /// Re-render SVG charts from an existing reports.csv.
    Report,
}

fn parse_constants(s: &str) -> std::result::Result<ConstantsMode, String> {
    match s {
        "empirical" => Ok(ConstantsMode::Empirical),
        "analytic" => Ok(ConstantsMode::Analytic),
        other => Err(format!("unknown constants mode '{other}' (empirical|analytic)")),
    }
}

fn load_suite(cli: &Cli) -> Result<SuiteConfig> {
    match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            SuiteConfig::parse(&text)
        }
        None => Ok(config::default_suite()),
    }
}

fn overrides(cli: &Cli) -> Overrides {
    Overrides {
        seed: cli.seed,
        n_paths: cli.n_paths,
        dt: cli.dt,
        constants: cli.constants,
        scenario: cli.scenario.clone(),
    }
}

fn run(cli: &Cli) -> Result<i32> {
    let suite = load_suite(cli)?;
    if cli.list_scenarios {
        for sc in &suite.scenarios {
            println!("{}", sc.id);
        }
        return Ok(0);
    }
    if cli.validate_only {
        println!(
            "suite '{}' valid: {} scenario(s)",
            suite.suite,
            suite.scenarios.len()
        );
        return Ok(0);
    }
    let ov = overrides(cli);
    match &cli.cmd {
        Cmd::Phi => {
            let scenarios = suite.build(&ov)?;
            let mut rows = Vec::new();
            for s in &scenarios {
                let c = constants(&s.phi, &s.model, s.k_lower, s.p)?;
                rows.push((s.id.clone(), s.phi.clone(), c));
            }
            print!("{}", report::phi_csv_string(&rows));
            let path = report::write_phi_csv(&rows, &cli.out_dir)?;
            eprintln!("wrote {}", path.display());
            Ok(0)
        }
        Cmd::Simulate { dump } => {
            let scenarios = suite.build(&ov)?;
            let n = cli.n_paths.unwrap_or(8);
            for s in &scenarios {
                let cfg = s.sde_config()?;
                let mut dumped = String::new();
                if *dump {
                    let mut header = String::from("path,t");
                    for i in 0..s.model.dim {
                        let _ = write!(header, ",x{i}");
                    }
                    header.push_str(",l\n");
                    dumped.push_str(&header);
                }
                let mut mean_l = 0.0;
                for p in 0..n as u64 {
                    let path = simulate_path(&s.model, &cfg, s.x, s.seed, p)?;
                    mean_l += path.terminal_local_time();
                    if *dump {
                        for (i, st) in path.states.iter().enumerate() {
                            let l = path.local_time[i];
                            let t = i as f64 * cfg.dt;
                            let _ = write!(dumped, "{p},{t}");
                            for d in 0..s.model.dim {
                                let _ = write!(dumped, ",{}", st[d]);
                            }
                            let _ = writeln!(dumped, ",{l}");
                        }
                    }
                }
                println!(
                    "{}: {} path(s), T = {}, mean terminal local time {}",
                    s.id,
                    n,
                    s.t,
                    mean_l / n as f64
                );
                if *dump {
                    fs::create_dir_all(&cli.out_dir)?;
                    let path = cli.out_dir.join(format!("paths_{}.csv", s.id));
                    fs::write(&path, dumped)?;
                    eprintln!("wrote {}", path.display());
                }
            }
            Ok(0)
        }
        Cmd::Verify => {
            let scenarios = suite.build(&ov)?;
            let reports = run_suite(&scenarios)?;
            for r in &reports {
                println!(
                    "{:<16} {:<16} lhs {:>12.5e}  rhs {:>12.5e}  slack {:>12.5e}  {}",
                    r.scenario_id,
                    r.theorem.label(),
                    r.lhs,
                    r.rhs,
                    r.slack,
                    if r.pass { "pass" } else { "FAIL" }
                );
            }
            let csv = report::write_reports_csv(&reports, &cli.out_dir)?;
            let svgs = report::write_slack_svgs(&reports, &cli.out_dir)?;
            eprintln!("wrote {} and {} chart(s)", csv.display(), svgs.len());
            Ok(suite_exit_code(&reports))
        }
        Cmd::Report => {
            let csv = cli.out_dir.join(report::REPORTS_CSV);
            let reports = report::read_reports_csv(&csv)?;
            let svgs = report::write_slack_svgs(&reports, &cli.out_dir)?;
            for p in &svgs {
                println!("{}", p.display());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
