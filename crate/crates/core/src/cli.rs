// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 constraints that
//! cannot be met (static check failure, infeasible windows, or a schedule
//! with violations), 3 scheduling aborted on a resource conflict.
//! Diagnostics go to standard error; machine-readable results to standard
//! output or to the files named by `--out`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::constraints::{IoConstraintSpec, OperatorLibrary};
use crate::error::Error;
use crate::explore::{render_runs, run_table};
use crate::graph::{export_dot, generate_fft_sfg, parse_sfg, serialize_sfg, Sfg};
use crate::memory::MemoryMapping;
use crate::pipeline::{Outcome, Problem};
use crate::report::{build_report, render_table};
use crate::schedule::{AllocationMode, FailureReason, Schedule};
use crate::testgen::{random_problem, RandomConfig};
use crate::verify::verify_schedule;
use crate::Duration;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_ABORT: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "hlsched",
    version,
    about = "Memory- and I/O-aware scheduling of signal-flow graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse the inputs and run the static feasibility checks.
    Check(Inputs),
    /// Schedule the graph and report the resulting architecture.
    Schedule {
        #[command(flatten)]
        inputs: Inputs,
        /// `auto` or `fixed:<class>=<count>,...`.
        #[arg(long, default_value = "auto")]
        alloc: String,
        /// Directory receiving schedule.json, report.json and report.txt;
        /// without it the schedule is printed.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a schedule file and re-derive its architecture report.
    Report {
        /// Schedule file written by `schedule`.
        schedule: PathBuf,
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// File receiving the report instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the signal-flow graph of a radix-2 FFT.
    GenFft {
        #[arg(long)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a graph in DOT format.
    ExportDot {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a random problem (graph.json, lib.json, io.json, mem.json).
    GenRandom {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        max_ops: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the three FFT architecture configurations and tabulate them.
    Explore {
        #[arg(long, default_value_t = 16)]
        points: usize,
        /// Directory receiving `<run>.schedule.json` and `<run>.report.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Debug)]
struct Inputs {
    /// Signal-flow graph document.
    #[arg(long)]
    graph: PathBuf,
    /// Operator library document; defaults to single-cycle `mult`, `add`
    /// and `sub` classes.
    #[arg(long)]
    lib: Option<PathBuf>,
    /// I/O constraint document; without it all I/O is unconstrained and
    /// `--latency` is required.
    #[arg(long)]
    io: Option<PathBuf>,
    /// Memory mapping document.
    #[arg(long)]
    mem: Option<PathBuf>,
    /// Latency bound, overriding the I/O document.
    #[arg(long)]
    latency: Option<Duration>,
    /// Iteration period; defaults to the larger of the document's cadence
    /// and the latency bound.
    #[arg(long)]
    cadence: Option<Duration>,
}

/// Failure carrying its exit code.
struct Exit(i32, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        Exit(EXIT_USAGE, e.to_string())
    }
}

fn read(path: &Path) -> std::result::Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| Exit(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> std::result::Result<(), Exit> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Exit(EXIT_USAGE, format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Exit(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> std::result::Result<Sfg, Exit> {
    parse_sfg(&read(path)?).map_err(|e| Exit(EXIT_USAGE, format!("{}: {e}", path.display())))
}

impl Inputs {
    fn load(&self) -> std::result::Result<Problem, Exit> {
        let graph = load_graph(&self.graph)?;
        let lib = match &self.lib {
            Some(p) => OperatorLibrary::parse(&read(p)?)?,
            None => OperatorLibrary::unit_latency(),
        };
        let mut spec = match (&self.io, self.latency) {
            (Some(p), _) => IoConstraintSpec::from_document(&read(p)?, &graph)?,
            (None, Some(l)) => IoConstraintSpec::unconstrained(l),
            (None, None) => return Err(Exit(EXIT_USAGE, "either --io or --latency is required".into())),
        };
        if let Some(l) = self.latency {
            spec.latency_bound = l;
            spec.cadence = spec.cadence.max(l);
        }
        if let Some(c) = self.cadence {
            spec.cadence = c;
        }
        spec.validate(&graph)?;
        let mapping = match &self.mem {
            Some(p) => MemoryMapping::from_document(&read(p)?, &graph)?,
            None => MemoryMapping::default(),
        };
        Ok(Problem {
            graph,
            lib,
            spec,
            mapping,
        })
    }
}

fn label(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned())
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> std::result::Result<(), Exit> {
    match path {
        Some(p) => write(p, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Exit(EXIT_USAGE, e.to_string())),
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<(), Exit> {
    match cmd {
        Command::Check(inputs) => {
            let p = inputs.load()?;
            let pre = p.prepare()?;
            let f = &pre.feasibility;
            for d in &f.diagnostics {
                let _ = writeln!(err, "{d}");
            }
            if !f.feasible() {
                return Err(Exit(EXIT_INFEASIBLE, "constraints are infeasible".into()));
            }
            emit(
                out,
                None,
                &format!(
                    "feasible: critical path {}, latency bound {}, cadence {}\n",
                    f.critical_path, p.spec.latency_bound, p.spec.cadence
                ),
            )
        }
        Command::Schedule {
            inputs,
            alloc,
            out: dir,
        } => {
            let mode = AllocationMode::parse(&alloc)?;
            let p = inputs.load()?;
            match p.run(&mode)? {
                Outcome::Infeasible(f) => {
                    for d in &f.diagnostics {
                        let _ = writeln!(err, "{d}");
                    }
                    Err(Exit(EXIT_INFEASIBLE, "constraints are infeasible".into()))
                }
                Outcome::Failed(f) => {
                    let code = match f.reason {
                        FailureReason::InfeasibleWindows => EXIT_INFEASIBLE,
                        _ => EXIT_ABORT,
                    };
                    Err(Exit(code, format!("scheduling aborted: {f}")))
                }
                Outcome::Scheduled(s, r) => match dir {
                    Some(dir) => {
                        write(&dir.join("schedule.json"), &s.to_json())?;
                        write(&dir.join("report.json"), &r.to_json())?;
                        let table = render_table(&[(label(&inputs.graph), r)]);
                        write(&dir.join("report.txt"), &table)?;
                        emit(out, None, &table)
                    }
                    None => emit(out, None, &s.to_json()),
                },
            }
        }
        Command::Report {
            schedule,
            inputs,
            format,
            out: path,
        } => {
            let p = inputs.load()?;
            let s = Schedule::from_json(&read(&schedule)?)?;
            let pre = p.prepare()?;
            let violations = verify_schedule(&s, &p.graph, &pre.gcg, &p.spec, &pre.mapping, &p.lib);
            if !violations.is_empty() {
                for v in &violations {
                    let _ = writeln!(err, "{v}");
                }
                return Err(Exit(
                    EXIT_INFEASIBLE,
                    format!("{} violation(s) in {}", violations.len(), schedule.display()),
                ));
            }
            let r = build_report(&s, &p.graph, &p.spec, &pre.mapping);
            let text = match format {
                Format::Json => r.to_json(),
                Format::Table => render_table(&[(label(&inputs.graph), r)]),
            };
            emit(out, path.as_deref(), &text)
        }
        Command::GenFft { points, out: path } => {
            let g = generate_fft_sfg(points)?;
            emit(out, path.as_deref(), &serialize_sfg(&g))
        }
        Command::ExportDot { graph, out: path } => {
            let g = load_graph(&graph)?;
            emit(out, path.as_deref(), &export_dot(&g))
        }
        Command::GenRandom {
            seed,
            max_ops,
            out: dir,
        } => {
            let config = RandomConfig {
                max_ops,
                ..RandomConfig::default()
            };
            let p = random_problem(seed, &config);
            let mut lib = serde_json::to_string_pretty(&p.lib).expect("library serialization");
            lib.push('\n');
            write(&dir.join("graph.json"), &serialize_sfg(&p.graph))?;
            write(&dir.join("lib.json"), &lib)?;
            write(&dir.join("io.json"), &p.spec.to_document(&p.graph))?;
            write(&dir.join("mem.json"), &p.mapping.to_document(&p.graph))
        }
        Command::Explore { points, out: dir } => {
            let runs = run_table(points)?;
            if let Some(dir) = dir {
                for r in &runs {
                    write(&dir.join(format!("{}.schedule.json", r.name)), &r.schedule.to_json())?;
                    write(&dir.join(format!("{}.report.json", r.name)), &r.report.to_json())?;
                }
            }
            emit(out, None, &render_runs(&runs))
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run_cli_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(Exit(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

/// [`run_cli_with`] on the process's standard streams.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_cli_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
