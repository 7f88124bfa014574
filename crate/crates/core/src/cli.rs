//! The `plumbing` command line.

use crate::fiber::{compile, CompiledFibration};
use crate::graph::{GraphError, PlumbingGraph};
use crate::homology::{homology_basis, HomologyModel, WordEntry};
use crate::invariants::{self, boundary_homology, chi_lefschetz, substitute, Page, RelationError, SubstitutionRelation};
use crate::rational::{parse_rational, ExactRational};
use crate::symplectic::{self, solve_area_system, tolerances, DiskBundleModel, NumericReport, VerifyParams};
use crate::validate::{validate, ValidatedGraph};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SEED_ENV: &str = "PLUMBING_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Success = 0,
    Rejected = 1,
    CheckFailed = 2,
    InputError = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "plumbing", version, about = "Convex plumbings, Lefschetz fibrations and open books")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the graph hypotheses and print all four definiteness conditions.
    Validate { graph: PathBuf },
    /// Emit the open book / Lefschetz interchange file.
    Compile {
        graph: PathBuf,
        /// Compile even if the hypotheses fail; the output is marked.
        #[arg(long)]
        force: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve the area system for target areas B_v, given in units of π.
    Areas {
        graph: PathBuf,
        /// Comma-separated B_v/π in vertex order, e.g. "1,1" or "3/2,2".
        #[arg(long, value_delimiter = ',', required = true)]
        areas: Vec<String>,
    },
    /// Run the numerical certificates on one disk bundle model, or on every
    /// vertex model of a graph with prescribed areas.
    VerifyModels {
        /// Constants file {A, Ai, ni, delta, m, genus}; defaults to a built-in model.
        #[arg(long, conflicts_with = "graph")]
        constants: Option<PathBuf>,
        #[arg(long, requires = "areas")]
        graph: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', requires = "graph")]
        areas: Option<Vec<String>>,
        /// Finite-difference step.
        #[arg(long, default_value_t = tolerances::STEP)]
        step: f64,
        #[arg(long, default_value_t = tolerances::SAMPLES)]
        samples: usize,
        #[arg(long, env = SEED_ENV, default_value_t = tolerances::SEED)]
        seed: u64,
        /// Override the floating-point tolerances.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Compare the homology actions of two twist words.
    HomologyCheck {
        /// Words file {"w1": [...], "w2": [...]}.
        #[arg(long)]
        words: PathBuf,
        /// Interchange file from `compile`; neck ids resolve against its page.
        #[arg(long, conflicts_with = "page")]
        fibration: Option<PathBuf>,
        /// Abstract page "genus,boundary".
        #[arg(long)]
        page: Option<String>,
    },
    /// Monodromy substitution report for a graph and a relation.
    Substitute {
        graph: PathBuf,
        #[arg(long, conflicts_with = "builtin")]
        relation: Option<PathBuf>,
        /// Name of a built-in relation, e.g. "torus relation squared".
        #[arg(long)]
        builtin: Option<String>,
    },
    /// Euler characteristic, signature and boundary homology of the plumbing.
    Invariants { graph: PathBuf },
}

struct Failure {
    status: ExitStatus,
    message: String,
}

impl Failure {
    fn input(message: impl std::fmt::Display) -> Self {
        Self {
            status: ExitStatus::InputError,
            message: message.to_string(),
        }
    }

    fn rejected(message: impl std::fmt::Display) -> Self {
        Self {
            status: ExitStatus::Rejected,
            message: message.to_string(),
        }
    }

    fn check(message: impl std::fmt::Display) -> Self {
        Self {
            status: ExitStatus::CheckFailed,
            message: message.to_string(),
        }
    }
}

/// One command's output and the status it earned.
struct Outcome {
    json: serde_json::Value,
    text: String,
    status: ExitStatus,
}

impl Outcome {
    fn new<T: Serialize>(value: &T, text: String, status: ExitStatus) -> Self {
        Self {
            json: serde_json::to_value(value).expect("reports serialize"),
            text,
            status,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<PlumbingGraph, Failure> {
    PlumbingGraph::from_json_str(&read(path)?).map_err(|e| match e {
        GraphError::Loop { .. } => Failure::rejected(format!("{}: {e}", path.display())),
        e => Failure::input(format!("{}: {e}", path.display())),
    })
}

fn load_validated(path: &Path) -> Result<ValidatedGraph, Failure> {
    ValidatedGraph::new(load_graph(path)?).map_err(|e| Failure::rejected(format!("{}: {e}", path.display())))
}

fn parse_areas(list: &[String]) -> Result<Vec<ExactRational>, Failure> {
    list.iter()
        .map(|s| parse_rational(s).map_err(Failure::input))
        .collect()
}

fn run_command(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Validate { graph } => {
            let g = load_graph(graph)?;
            let report = validate(&g);
            let status = if report.passes() {
                ExitStatus::Success
            } else {
                ExitStatus::Rejected
            };
            Ok(Outcome::new(&report, report.to_text(), status))
        }
        Command::Compile { graph, force, output } => {
            let g = load_graph(graph)?;
            let validated = if *force {
                ValidatedGraph::forced(g).map_err(Failure::rejected)?
            } else {
                ValidatedGraph::new(g).map_err(|e| Failure::rejected(format!("{e}; use --force to compile anyway")))?
            };
            let compiled = compile(&validated);
            if let Some(out) = output {
                std::fs::write(out, compiled.to_json() + "\n")
                    .map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
            }
            let text = compiled.to_text();
            Ok(Outcome {
                json: serde_json::from_str(&compiled.to_json()).expect("interchange is JSON"),
                text,
                status: ExitStatus::Success,
            })
        }
        Command::Areas { graph, areas } => {
            let g = load_validated(graph)?;
            let targets = parse_areas(areas)?;
            let assignment = solve_area_system(&g, &targets).map_err(|e| match e {
                symplectic::AreaError::Inconsistent(_) => Failure::check(e),
                e => Failure::input(e),
            })?;
            let status = if assignment.verify(&g) {
                ExitStatus::Success
            } else {
                ExitStatus::CheckFailed
            };
            Ok(Outcome::new(&assignment, assignment.to_text(), status))
        }
        Command::VerifyModels {
            constants,
            graph,
            areas,
            step,
            samples,
            seed,
            tolerance,
        } => {
            if !(*step > 0.0 && step.is_finite()) || *samples == 0 || tolerance.is_some_and(|t| t.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)) {
                return Err(Failure::input("step, samples and tolerance must be positive"));
            }
            let params = VerifyParams {
                step: *step,
                samples: *samples,
                seed: *seed,
                tolerance: *tolerance,
            };
            let models: Vec<(Option<String>, DiskBundleModel)> = match (constants, graph) {
                (Some(path), _) => vec![(
                    None,
                    DiskBundleModel::from_json_str(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
                )],
                (None, Some(path)) => {
                    let g = load_validated(path)?;
                    let targets = parse_areas(areas.as_deref().unwrap_or_default())?;
                    let assignment = solve_area_system(&g, &targets).map_err(Failure::input)?;
                    let models = assignment.vertex_models(&g).map_err(Failure::check)?;
                    assignment.vertices.iter().cloned().map(Some).zip(models).collect()
                }
                (None, None) => vec![(None, DiskBundleModel::reference())],
            };
            let mut reports: Vec<NumericReport> = Vec::new();
            for (vertex, model) in &models {
                for mut r in symplectic::verify_model(model, &params) {
                    if let Some(v) = vertex {
                        r.check = format!("{v}: {}", r.check);
                    }
                    reports.push(r);
                }
            }
            let ok = reports.iter().all(NumericReport::certified);
            let text: String = reports.iter().map(|r| r.to_text() + "\n").collect();
            Ok(Outcome::new(
                &reports,
                text,
                if ok { ExitStatus::Success } else { ExitStatus::CheckFailed },
            ))
        }
        Command::HomologyCheck { words, fibration, page } => {
            let text = read(words)?;
            #[derive(serde::Deserialize)]
            struct Words {
                w1: Vec<WordEntry>,
                w2: Vec<WordEntry>,
            }
            let w: Words = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", words.display())))?;
            let model: HomologyModel = match (fibration, page) {
                (Some(path), _) => {
                    let compiled = CompiledFibration::from_json(&read(path)?).map_err(Failure::input)?;
                    homology_basis(&compiled.fiber()).map_err(Failure::input)?
                }
                (None, Some(p)) => {
                    let (g, b) = parse_page(p)?;
                    HomologyModel::standard(g, b).map_err(Failure::input)?
                }
                (None, None) => return Err(Failure::input("give --fibration or --page")),
            };
            let w1 = model.resolve(&w.w1).map_err(Failure::input)?;
            let w2 = model.resolve(&w.w2).map_err(Failure::input)?;
            let cmp = model.homologically_equal(&w1, &w2).map_err(Failure::input)?;
            let text = format!(
                "equal: {} ({})\nbasis: {}\nw1:\n{}w2:\n{}",
                cmp.equal,
                cmp.caveat,
                model.labels.join(", "),
                matrix_text(cmp.action1.rows()),
                matrix_text(cmp.action2.rows())
            );
            let status = if cmp.equal {
                ExitStatus::Success
            } else {
                ExitStatus::CheckFailed
            };
            Ok(Outcome::new(&cmp, text, status))
        }
        Command::Substitute { graph, relation, builtin } => {
            let g = load_validated(graph)?;
            let rel = match (relation, builtin) {
                (Some(path), _) => SubstitutionRelation::from_json_str(&read(path)?).map_err(|e| match e {
                    RelationError::HomologyMismatch { .. } => Failure::check(e),
                    e => Failure::input(e),
                })?,
                (None, Some(name)) => invariants::find_relation(name).ok_or_else(|| {
                    let names: Vec<String> =
                        invariants::relation_library().iter().map(|r| format!("{:?}", r.name())).collect();
                    Failure::input(format!("no built-in relation {name:?}; known: {}", names.join(", ")))
                })?,
                (None, None) => return Err(Failure::input("give --relation or --builtin")),
            };
            let report = substitute(&g, &rel).map_err(Failure::check)?;
            let status = if report.homology.equal && report.chi_plumbing == report.chi_z {
                ExitStatus::Success
            } else {
                ExitStatus::CheckFailed
            };
            Ok(Outcome::new(&report, report.to_text(), status))
        }
        Command::Invariants { graph } => {
            let g = load_validated(graph)?;
            let fiber = crate::fiber::build_fiber(&g);
            let k = crate::fiber::neck_curves_of(&fiber).len();
            let page = Page {
                genus: fiber.genus,
                boundary: fiber.boundary_count,
            };
            let boundary = boundary_homology(&g);
            #[derive(Serialize)]
            struct Summary {
                page: Page,
                k: usize,
                chi_lefschetz: i64,
                chi_plumbing: i64,
                signature: i64,
                boundary_homology: invariants::BoundaryHomology,
            }
            let s = Summary {
                page,
                k,
                chi_lefschetz: chi_lefschetz(page, k),
                chi_plumbing: crate::fiber::chi_plumbing(&g),
                signature: -(g.vertex_count() as i64),
                boundary_homology: boundary,
            };
            let text = format!(
                "page: {}\nk = {}\nchi (Lefschetz) = {}\nchi (plumbing) = {}\nsignature = {}\n{}",
                s.page,
                s.k,
                s.chi_lefschetz,
                s.chi_plumbing,
                s.signature,
                s.boundary_homology.to_text()
            );
            let status = if s.chi_lefschetz == s.chi_plumbing {
                ExitStatus::Success
            } else {
                ExitStatus::CheckFailed
            };
            Ok(Outcome::new(&s, text, status))
        }
    }
}

fn parse_page(text: &str) -> Result<(u64, u64), Failure> {
    let bad = || Failure::input(format!("--page expects \"genus,boundary\", got {text:?}"));
    let (g, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((g.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn matrix_text(rows: &[Vec<i64>]) -> String {
    rows.iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|x| format!("{x:>4}")).collect();
            format!("  [{}]\n", cells.join(""))
        })
        .collect()
}

/// Parses `args` (program name first), runs the command and writes the
/// report to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    ExitStatus::Success
                }
                _ => {
                    let _ = write!(err, "{e}");
                    ExitStatus::InputError
                }
            };
        }
    };
    match run_command(&cli) {
        Ok(outcome) => {
            let _ = match cli.format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&outcome.json).expect("json")),
                Format::Text => write!(out, "{}", outcome.text),
            };
            outcome.status
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.status
        }
    }
}
