use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chemotaxis_lab::harness::{self, parse_axis, SweepSpec, WORKERS_ENV};
use chemotaxis_lab::verify::{run_suite, Suite};

#[derive(Parser)]
#[command(name = "chemolab", version, about = "1D chemotaxis-reaction-diffusion lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV outputs.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the cartesian product of parameter axes.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `key=v1,v2,...` with key one of L, chi, eps, M0, sigma. Repeatable.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite; exits nonzero if any check fails.
    Verify {
        #[arg(long, default_value = "fast")]
        suite: Suite,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
    },
    /// Recompute fits or reaction-time diagnostics from stored CSVs.
    Report {
        #[arg(long = "in")]
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> chemotaxis_lab::Result<ExitCode> {
    match command {
        Command::Run { config, out } => {
            let cfg = harness::load_config(&config)?;
            let s = harness::run(&cfg, &out)?;
            println!("{} run: t = {}, {} steps", s.scenario.name(), s.t_final, s.steps);
            if let Some(r) = s.reaction {
                println!(
                    "quarter-mass time {} (crossed: {}, fraction at end {:.6})",
                    r.t_quarter, r.crossed, r.fraction_at_end
                );
            }
            if let Some(d) = s.diffusive {
                if let Some(c1) = d.case1_ratio {
                    println!("case-1 ratio {c1}");
                }
                println!("case-2 ratio {}", d.case2_ratio);
            }
            for (k, v) in &s.extra {
                println!("{k} = {}", harness::fmt_num(*v));
            }
            if s.boundary_warning {
                println!("warning: boundary mass {:.3e}", s.max_boundary_mass);
            }
        }
        Command::Sweep {
            config,
            axes,
            workers,
            out,
        } => {
            let spec = SweepSpec {
                base: harness::load_config(&config)?,
                axes: axes.iter().map(|a| parse_axis(a)).collect::<Result<_, _>>()?,
                workers,
            };
            let report = harness::sweep(&spec, &out)?;
            println!("{} points, {} failed", report.rows.len() + report.failures.len(), report.failures.len());
            for (i, e) in &report.failures {
                println!("point {i}: {e}");
            }
            for f in &report.fits {
                println!("{} [{}]: slope {:.4} (r^2 {:.5})", f.axis.name(), f.group, f.fit.slope, f.fit.r_squared);
            }
        }
        Command::Verify { suite, workers } => {
            let report = run_suite(suite, workers);
            println!("{report}");
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Report { dir } => print!("{}", harness::report(&dir)?),
    }
    Ok(ExitCode::SUCCESS)
}
