use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use planforge::ops::{
    self, Context, EngineKind, EplusContext, GenerateParams, OptimizeParams, ReportQuery,
};
use planforge::service::Service;
use planforge_core::fpop::ObjectiveKind;
use planforge_core::project::{load_project, save_project, Project};
use planforge_core::reporting::{ReportPeriod, SimulationResult};

#[derive(Parser)]
#[command(
    name = "planforge",
    version,
    about = "Floor plan generation and energy optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Surrogate,
    Energyplus,
}

impl From<Engine> for EngineKind {
    fn from(e: Engine) -> Self {
        match e {
            Engine::Surrogate => EngineKind::Surrogate,
            Engine::Energyplus => EngineKind::Energyplus,
        }
    }
}

impl From<Engine> for ObjectiveKind {
    fn from(e: Engine) -> Self {
        match e {
            Engine::Surrogate => ObjectiveKind::Surrogate,
            Engine::Energyplus => ObjectiveKind::Energyplus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Checks a project file and lists its problems.
    Validate {
        #[arg(long)]
        project: PathBuf,
    },
    /// Generates layouts and stores them in the project.
    Generate {
        #[arg(long)]
        project: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n_solutions: Option<usize>,
        #[arg(long)]
        max_generations: Option<usize>,
        /// Where to write the updated project; defaults to the input file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulates a solution and writes its hourly results as JSON.
    Simulate {
        #[arg(long)]
        project: PathBuf,
        /// Solution id; the best ranked when absent.
        #[arg(long)]
        solution: Option<String>,
        #[arg(long, value_enum, default_value = "surrogate")]
        engine: Engine,
        #[arg(long)]
        eplus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimizes a solution's parameters and stores the result in the project.
    Optimize {
        #[arg(long)]
        project: PathBuf,
        #[arg(long)]
        solution: Option<String>,
        #[arg(long)]
        passes: Option<usize>,
        #[arg(long, value_enum)]
        objective: Option<Engine>,
        #[arg(long)]
        eplus: Option<PathBuf>,
        /// Where to write the updated project; defaults to the input file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes the EnergyPlus input file of a solution.
    ExportIdf {
        #[arg(long)]
        project: PathBuf,
        #[arg(long)]
        solution: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregates one hourly variable over a period.
    Report {
        #[arg(long)]
        project: PathBuf,
        #[arg(long)]
        solution: Option<String>,
        /// Results written by `simulate`; the surrogate is run when absent.
        #[arg(long)]
        results: Option<PathBuf>,
        #[arg(long)]
        variable: String,
        #[arg(long)]
        key: Option<String>,
        #[arg(long, default_value = "all_year")]
        period: ReportPeriod,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory holding projects and jobs.
        #[arg(long, default_value = "planforge-data")]
        data: PathBuf,
        #[arg(long)]
        eplus: Option<PathBuf>,
    },
}

fn base_dir(project: &Path) -> Option<&Path> {
    project.parent().filter(|p| !p.as_os_str().is_empty())
}

fn open(path: &Path) -> Result<Project> {
    load_project(path).with_context(|| format!("loading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => stdout(&format!("{text}\n")),
    }
}

/// Writes to stdout, treating a closed pipe (as with `| head`) as success.
fn stdout(text: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { project } => {
            let v = ops::validate(&open(&project)?);
            emit(None, &json(&v)?)?;
            return Ok(if v.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
        Command::Generate {
            project,
            seed,
            n_solutions,
            max_generations,
            out,
        } => {
            let mut p = open(&project)?;
            let params = GenerateParams {
                seed,
                n_solutions,
                max_generations,
            };
            let mut last = 0;
            let ids = ops::generate(&mut p, &params, &mut |f| {
                let pct = (f * 100.0) as u32;
                if pct >= last + 10 {
                    last = pct;
                    eprintln!("generation {pct}%");
                }
            })?;
            save_project(&p, out.as_deref().unwrap_or(&project))?;
            emit(None, &json(&serde_json::json!({ "solutions": ids }))?)?;
        }
        Command::Simulate {
            project,
            solution,
            engine,
            eplus,
            out,
        } => {
            let p = open(&project)?;
            let s = ops::select_solution(&p, solution.as_deref())?;
            let ctx = Context::new(&p, base_dir(&project))?;
            let result = ops::simulate(
                &ctx,
                &s.layout,
                engine.into(),
                &EplusContext {
                    executable: eplus,
                    work_root: None,
                },
            )?;
            emit(out.as_deref(), &json(&result)?)?;
        }
        Command::Optimize {
            project,
            solution,
            passes,
            objective,
            eplus,
            out,
        } => {
            let mut p = open(&project)?;
            let params = OptimizeParams {
                solution,
                passes,
                objective: objective.map(Into::into),
            };
            let eplus = EplusContext {
                executable: eplus,
                work_root: None,
            };
            let id = ops::optimize(&mut p, &params, base_dir(&project), &eplus)?;
            save_project(&p, out.as_deref().unwrap_or(&project))?;
            emit(None, &json(&serde_json::json!({ "solution": id }))?)?;
        }
        Command::ExportIdf {
            project,
            solution,
            out,
        } => {
            let p = open(&project)?;
            let s = ops::select_solution(&p, solution.as_deref())?;
            let ctx = Context::new(&p, base_dir(&project))?;
            let text = ops::export_idf(&ctx, &s.layout)?;
            match out {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => stdout(&text)?,
            }
        }
        Command::Report {
            project,
            solution,
            results,
            variable,
            key,
            period,
            format,
            out,
        } => {
            let p = open(&project)?;
            let s = ops::select_solution(&p, solution.as_deref())?;
            let ctx = Context::new(&p, base_dir(&project))?;
            let result: SimulationResult = match results {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str(&text)
                        .with_context(|| format!("parsing {}", path.display()))?
                }
                None => ops::simulate(
                    &ctx,
                    &s.layout,
                    EngineKind::Surrogate,
                    &EplusContext::default(),
                )?,
            };
            let report = ops::report(
                &result,
                &ctx.weather,
                &ReportQuery {
                    variable,
                    key,
                    period,
                },
            )?;
            let text = match format {
                Format::Json => json(&report)?,
                Format::Csv => report.to_csv(),
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Serve { port, data, eplus } => {
            if port == 0 {
                bail!("--port must be non-zero");
            }
            let service = Service::open(
                &data,
                EplusContext {
                    executable: eplus,
                    work_root: None,
                },
            )?;
            let addr = SocketAddr::from(([0, 0, 0, 0], port));
            eprintln!("listening on {addr}");
            tokio::runtime::Runtime::new()?.block_on(planforge::http::serve(service, addr))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
