use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use softopt_cli::commands::{self, CONVERGENCE_FILE};
use softopt_cli::problem::{effective_globals, load_finger_design};
use softopt_cli::{ProblemKind, Result, StudyConfig};

/// Multi-objective design optimization of a cable-driven sensorized finger.
#[derive(Parser)]
#[command(name = "softopt", version)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an NSGA-II study and export its Pareto front.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Continue the study recorded in the output directory's trial log.
        #[arg(long)]
        resume: bool,
    },
    /// One-at-a-time sensitivity of each objective around a baseline design.
    Sensitivity {
        #[arg(long)]
        config: PathBuf,
        /// Baseline design file, or `slim` / `large`.
        design: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Deformation objectives of one design at increasing node counts.
    Convergence {
        /// Design file, or `slim` / `large`.
        design: String,
        /// Comma-separated node targets.
        #[arg(long, value_delimiter = ',', default_values_t = [500usize, 1000, 2000, 4000])]
        targets: Vec<usize>,
        /// Material, actuation and globals; meshing target is ignored.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Objectives of one design.
    Evaluate {
        /// Design file, or `slim` / `large`.
        design: String,
        /// Defaults to the config's problem, else `deformation`.
        #[arg(long, value_enum)]
        problem: Option<ProblemKind>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Re-extract the Pareto front and trial table from a trial log.
    Pareto {
        log: PathBuf,
        /// Defaults to the log's directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Overrides the config's solver seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's worker count.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn load_config(path: &Path, run: &RunArgs) -> Result<StudyConfig> {
    let mut c = StudyConfig::load(path)?;
    if let Some(seed) = run.seed {
        c.solver.seed = seed;
    }
    if let Some(w) = run.workers {
        c.workers = w as usize;
    }
    if let Some(dir) = &run.output {
        c.output_dir = dir.clone();
    }
    Ok(c)
}

fn optional_config(path: &Option<PathBuf>, problem: ProblemKind) -> Result<StudyConfig> {
    match path {
        Some(p) => StudyConfig::load(p),
        None => Ok(StudyConfig::new(problem)),
    }
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("output serializes"));
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Optimize { config, run, resume } => {
            let c = load_config(&config, &run)?;
            let (_, s) = commands::optimize(&c, resume)?;
            if cli.json {
                print_json(&s);
            } else {
                println!(
                    "{} trials ({} replayed, {} failed); Pareto front: {} trials",
                    s.trials, s.replayed, s.failed, s.pareto_rows
                );
                println!("log:    {}", s.log.display());
                println!("front:  {}", s.pareto_csv.display());
                println!("trials: {}", s.all_trials_csv.display());
            }
        }
        Command::Sensitivity { config, design, run } => {
            let c = load_config(&config, &run)?;
            let (report, path) = commands::sensitivity(&c, &design)?;
            if cli.json {
                let rows: Vec<_> = report
                    .objective_names
                    .iter()
                    .zip(&report.per_objective)
                    .flat_map(|(name, col)| {
                        col.iter().map(move |p| {
                            json!({"parameter": p.parameter, "objective": name, "raw": p.raw, "normalized": p.normalized})
                        })
                    })
                    .collect();
                print_json(&json!({"csv": path, "evaluations": report.evaluations,
                    "failed_probes": report.failed_probes.len(), "rows": rows}));
            } else {
                for (j, name) in report.objective_names.iter().enumerate() {
                    println!("{name}:");
                    for p in report.column(j) {
                        println!(
                            "  {:<20} raw {:>12.6}  normalized {:.4}",
                            p.parameter, p.raw, p.normalized
                        );
                    }
                }
                println!("written to {}", path.display());
            }
        }
        Command::Convergence {
            design,
            targets,
            config,
            output,
        } => {
            let c = optional_config(&config, ProblemKind::Deformation)?;
            let d = load_finger_design(&design)?;
            let mut model = c.model();
            model.globals = effective_globals(&d, model.globals);
            let rows = commands::convergence(&model, &d, &targets)?;
            let dir = output.unwrap_or(c.output_dir);
            let path = commands::write_convergence_csv(&dir, &rows)?;
            if cli.json {
                print_json(&json!({"csv": path, "rows": rows}));
            } else {
                println!(
                    "{:>8} {:>8} {:>12} {:>10} {:>8} {:>10}",
                    "target", "nodes", "f1", "f2", "secs", "|df1|"
                );
                for r in &rows {
                    let f = |v: Option<f64>| v.map_or("-".into(), |v| format!("{v:.4}"));
                    println!(
                        "{:>8} {:>8} {:>12} {:>10} {:>8.2} {:>10}  {}",
                        r.target_nodes,
                        r.achieved_nodes.map_or("-".into(), |n| n.to_string()),
                        f(r.f1),
                        f(r.f2),
                        r.solve_seconds,
                        f(r.abs_delta_f1),
                        if r.status == "ok" { "" } else { &r.status },
                    );
                }
                println!("written to {}", dir.join(CONVERGENCE_FILE).display());
            }
        }
        Command::Evaluate {
            design,
            problem,
            config,
        } => {
            let mut c = optional_config(&config, problem.unwrap_or(ProblemKind::Deformation))?;
            if let Some(p) = problem {
                c.problem = p;
            }
            let report = commands::evaluate(&c, &design)?;
            if cli.json {
                print_json(&report);
            } else {
                print!("{}", report.to_text());
            }
        }
        Command::Pareto { log, output } => {
            let dir = output.unwrap_or_else(|| log.parent().map(PathBuf::from).unwrap_or_default());
            let s = commands::pareto(&log, &dir)?;
            if cli.json {
                print_json(&s);
            } else {
                println!("{} trials; Pareto front: {} trials", s.trials, s.pareto_rows);
                println!("front:  {}", s.pareto_csv.display());
                println!("trials: {}", s.all_trials_csv.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
