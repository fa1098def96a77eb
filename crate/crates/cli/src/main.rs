use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use spp::bench::{run_bench, BenchConfig, Method};
use spp::ga::{run_ga, GaConfig};
use spp::ieti::apply_ieti;
use spp::oracle::solve_exact;
use spp::transform::{build_g, transform};
use spp::verify::run_battery;
use spp::{batch, solve_cspp, Workspace};

#[derive(Parser, Debug)]
#[command(name = "spp", version, about = "Order and orient subpaths into a short closed tour")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random workspace as JSON.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000.0)]
        extent: f64,
        /// Arc lengths are drawn between 1x and this multiple of the chord.
        #[arg(long, default_value_t = 2.0)]
        curvature_max: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one workspace and print the tour as JSON.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Cspp)]
        method: MethodArg,
        /// GA seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// GA population; chosen from the instance size when omitted.
        #[arg(long)]
        ga_pop: Option<usize>,
        /// Write per-generation GA statistics as CSV.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Compare methods over several workspaces; CSV on stdout.
    Bench {
        /// Workspace files, one environment each.
        #[arg(long, num_args = 1.., required = true)]
        envs: Vec<PathBuf>,
        #[arg(long, value_enum, num_args = 1.., default_values_t = [MethodArg::Cspp, MethodArg::Ga])]
        methods: Vec<MethodArg>,
        #[arg(long, default_value_t = 30)]
        reps: usize,
        #[arg(long)]
        ga_pop: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the invariant checks on one workspace.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dump a weight matrix as CSV.
    Graph {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Stage::Repaired)]
        stage: Stage,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Cspp,
    Exact,
    Ga,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Cspp => Method::Cspp,
            MethodArg::Exact => Method::Exact,
            MethodArg::Ga => Method::Ga,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Stage {
    /// Endpoints only.
    Endpoints,
    /// With middle nodes, before triangle repair.
    Transformed,
    /// After triangle repair.
    Repaired,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<spp::Error>().map_or(1, |e| e.exit_code());
            ExitCode::from(code as u8)
        }
    }
}

fn run(args: Args) -> anyhow::Result<ExitCode> {
    match args.command {
        Command::Gen { n, extent, curvature_max, seed, out } => {
            let ws = Workspace::random(n, extent, curvature_max, seed)?;
            match out {
                Some(path) => ws.save(&path)?,
                None => println!("{}", ws.to_json()),
            }
        }
        Command::Solve { input, method, seed, ga_pop, stats } => {
            if stats.is_some() && method != MethodArg::Ga {
                bail!("--stats is only produced by the ga method");
            }
            let ws = Workspace::load(&input)?;
            let solution = match method {
                MethodArg::Cspp => solve_cspp(&ws)?,
                MethodArg::Exact => solve_exact(&ws)?,
                MethodArg::Ga => {
                    let mut cfg = GaConfig::for_size(ws.len(), seed);
                    if let Some(p) = ga_pop {
                        cfg.population_size = p;
                    }
                    let (solution, ga_stats) = run_ga(&ws, &cfg)?;
                    if let Some(path) = stats {
                        write(&path, &ga_stats.to_csv())?;
                    }
                    solution
                }
            };
            println!("{}", solution.to_json());
        }
        Command::Bench { envs, methods, reps, ga_pop, seed } => {
            let envs = envs
                .iter()
                .map(|p| Ok((env_name(p), Workspace::load(p)?)))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let cfg = BenchConfig {
                methods: methods.into_iter().map(Method::from).collect(),
                reps,
                ga_population: ga_pop,
                seed,
                threads: batch::threads_from_env(),
            };
            print!("{}", run_bench(&envs, &cfg)?.to_csv());
        }
        Command::Verify { input, seed } => {
            let ws = Workspace::load(&input)?;
            let checks = run_battery(&ws, seed)?;
            for c in &checks {
                if c.passed && c.detail == "no-op" {
                    println!("{}: no-op", c.name);
                } else {
                    println!("{}: {} ({})", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
                }
            }
            if checks.iter().any(|c| !c.passed) {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Graph { input, stage } => {
            let ws = Workspace::load(&input)?;
            let g = match stage {
                Stage::Endpoints => build_g(&ws),
                Stage::Transformed => transform(&ws),
                Stage::Repaired => apply_ieti(&transform(&ws))?.0,
            };
            print!("{}", g.to_csv());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn env_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("failed to write {}", path.display()))
}
