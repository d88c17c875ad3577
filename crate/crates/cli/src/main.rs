use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wavesteer_cli::{
    load_config, parse_range, run_solve, run_sweep, run_verify, CliError, RunConfig, SolveOptions, SolverName,
    EXIT_CONFIG,
};

#[derive(Parser)]
#[command(name = "wavesteer", version, about = "Minimal-energy steering of an elastic rod")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and write summary.json, controls.csv and fields.csv.
    Solve(Common),
    /// Tabulate T*E over ranges of M and N.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_range, default_value = "2:6")]
        m_range: (usize, usize),
        #[arg(long, value_parser = parse_range, default_value = "2:6")]
        n_range: (usize, usize),
    },
    /// Solve with the finite-difference oracle and check every invariant.
    Verify(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Qp,
    El,
    Both,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Samples per piece (odd, at least 5).
    #[arg(long)]
    p_grid: Option<usize>,
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    /// Run the finite-difference oracle.
    #[arg(long)]
    oracle: bool,
    /// Write C, A and the free map as exact CSV.
    #[arg(long)]
    dump_matrices: bool,
}

impl Common {
    fn load(&self) -> Result<(RunConfig, SolveOptions), CliError> {
        let mut cfg = load_config(&self.config)?;
        cfg.output_dir = Some(self.out.clone());
        if let Some(p) = self.p_grid {
            cfg.p = p;
        }
        if let Some(s) = self.solver {
            cfg.solver = match s {
                SolverArg::Qp => SolverName::Qp,
                SolverArg::El => SolverName::EulerLagrange,
                SolverArg::Both => SolverName::Both,
            };
        }
        cfg.oracle.enabled |= self.oracle;
        Ok((cfg, SolveOptions { dump_matrices: self.dump_matrices }))
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve(common) => {
            let (cfg, opts) = common.load()?;
            let summary = run_solve(&cfg, &opts)?;
            match summary.status.as_str() {
                "ok" => println!(
                    "E = {:.12}  T*E = {:.12}",
                    summary.result.as_ref().map_or(0.0, |r| r.energy),
                    summary.result.as_ref().map_or(0.0, |r| r.t_e)
                ),
                _ => eprintln!("{}: {}", summary.status, summary.message.as_deref().unwrap_or("")),
            }
            Ok(summary.exit_code())
        }
        Command::Sweep { common, m_range, n_range } => {
            let (cfg, _) = common.load()?;
            let report = run_sweep(&cfg, m_range, n_range)?;
            for r in &report.rows {
                match r.t_e {
                    Some(te) => println!("N={} M={} T*E={te:.12}", r.n, r.m),
                    None => println!("N={} M={} failed: {}", r.n, r.m, r.message),
                }
            }
            println!("nonincreasing in M: {}, in N: {}", report.monotone_in_m, report.monotone_in_n);
            for v in &report.violations {
                println!("violation {v}");
            }
            Ok(0)
        }
        Command::Verify(common) => {
            let (cfg, opts) = common.load()?;
            let report = run_verify(&cfg, &opts)?;
            for c in &report.checks {
                println!("{} {} = {:e} (tolerance {:e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.tolerance);
            }
            Ok(if report.passed { 0 } else { wavesteer_cli::EXIT_INVARIANT })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
