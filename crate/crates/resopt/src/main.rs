//! Command-line entry point: validate → lower → solve → report.
//!
//! Exit codes: 0 success/Optimal, 1 validation (or lowering) problems,
//! 2 parse failure, 3 Infeasible, 4 solver failure. Log verbosity is
//! controlled through the `RUST_LOG` environment variable.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use resopt::milp::{TagKey, TagSet};
use resopt::model::EnergySystem;
use resopt::solver::lp_file;
use resopt::{
    export_graph, export_yaml, flows, lower, parse, solve_milp, to_csv, GraphFormat, LowerOptions,
    MilpModel, Solution, SolveOptions, SolveStatus,
};

const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_SOLVER: u8 = 4;

#[derive(Parser)]
#[command(
    name = "resopt",
    version,
    about = "Optimise residential energy systems: parse a YAML model, \
             lower it to a MILP, solve, and report the flows."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and print any validation issues.
    Validate {
        /// Path to the model YAML document.
        model: PathBuf,
    },
    /// Solve a model and write solution.csv and summary.txt.
    Solve {
        /// Path to the model YAML document.
        model: PathBuf,
        /// Directory receiving the result files.
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
        #[command(flatten)]
        lowering: LoweringFlags,
        /// Absolute optimality gap for branch and bound.
        #[arg(long, default_value_t = 1e-6)]
        gap: f64,
        /// Also write the lowered model as LP-format text (plus a .names
        /// sidecar mapping sanitised names back to the originals).
        #[arg(long, value_name = "FILE", num_args = 0..=1, default_missing_value = "model.lp")]
        export_lp: Option<PathBuf>,
        /// Keep only flows whose tags contain KEY=VALUE (repeatable).
        #[arg(long, value_name = "KEY=VALUE")]
        filter: Vec<String>,
        /// Omit timestamps and wall-clock timings from summary.txt so
        /// repeated runs produce byte-identical files.
        #[arg(long)]
        no_timestamps: bool,
    },
    /// Write the lowered model's node graph for visualisation.
    Graph {
        /// Path to the model YAML document.
        model: PathBuf,
        /// Directory receiving the graph file.
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
        /// Graph document format.
        #[arg(long, value_enum, default_value_t = FormatArg::Dot)]
        format: FormatArg,
        #[command(flatten)]
        lowering: LoweringFlags,
    },
    /// Print the canonical, self-contained YAML form of a model.
    Export {
        /// Path to the model YAML document.
        model: PathBuf,
    },
}

#[derive(Args)]
struct LoweringFlags {
    /// Force level indicators to be exclusive (y + ȳ = 1).
    #[arg(long)]
    strict_levels: bool,
    /// Anchor storage-level indicators to the end-of-interval content.
    #[arg(long, value_name = "BOOL", default_value_t = true, action = ArgAction::Set)]
    time_discrete: bool,
    /// Require every storage to end the horizon at its initial content.
    #[arg(long)]
    cyclic_storage: bool,
}

impl LoweringFlags {
    fn options(&self) -> LowerOptions {
        LowerOptions {
            time_discrete: self.time_discrete,
            strict_levels: self.strict_levels,
            cyclic_storage: self.cyclic_storage,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Dot,
    Graphml,
}

fn main() -> ExitCode {
    env_logger::init();
    ExitCode::from(run(Cli::parse()))
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Validate { model } => cmd_validate(&model),
        Command::Solve { model, output, lowering, gap, export_lp, filter, no_timestamps } => {
            cmd_solve(&model, &output, &lowering, gap, export_lp.as_deref(), &filter, no_timestamps)
        }
        Command::Graph { model, output, format, lowering } => {
            cmd_graph(&model, &output, format, &lowering)
        }
        Command::Export { model } => cmd_export(&model),
    }
}

/// Reads and parses the model file; failures print to stderr and map to
/// exit 2.
fn load(path: &Path) -> Result<EnergySystem, u8> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_PARSE
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse(&text, base).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_PARSE
    })
}

/// Validates the system; issues print to stderr and map to exit 1.
fn check(system: &EnergySystem) -> Result<(), u8> {
    let report = system.validate();
    if report.is_empty() {
        return Ok(());
    }
    for issue in &report.issues {
        eprintln!("{issue}");
    }
    Err(EXIT_INVALID)
}

/// Lowers the validated system; lowering errors are model problems and map
/// to exit 1.
fn lowered(system: &EnergySystem, flags: &LoweringFlags) -> Result<MilpModel, u8> {
    let model = lower(system, &flags.options()).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID
    })?;
    log::info!(
        "lowered model: {} variables ({} binary), {} constraints",
        model.num_vars(),
        model.binary_vars().len(),
        model.constraints.len()
    );
    Ok(model)
}

fn cmd_validate(path: &Path) -> u8 {
    let system = match load(path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let report = system.validate();
    for issue in &report.issues {
        println!("{issue}");
    }
    if report.is_empty() {
        println!("ok");
        EXIT_OK
    } else {
        EXIT_INVALID
    }
}

fn parse_filter(pairs: &[String]) -> Result<TagSet, u8> {
    let mut filter = TagSet::new();
    for pair in pairs {
        let Some((key, value)) = pair.split_once('=') else {
            eprintln!("error: --filter expects KEY=VALUE, got {pair:?}");
            return Err(EXIT_PARSE);
        };
        let Some(key) = TagKey::parse(key) else {
            eprintln!(
                "error: unknown filter key {key:?} (expected location, carrier, component, \
                 demand, level, or origin)"
            );
            return Err(EXIT_PARSE);
        };
        filter.insert((key, value.to_string()));
    }
    Ok(filter)
}

/// Joins `file` under `dir` unless it is already absolute.
fn under(dir: &Path, file: &Path) -> PathBuf {
    if file.is_absolute() {
        file.to_path_buf()
    } else {
        dir.join(file)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), u8> {
    fs::write(path, contents).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        EXIT_SOLVER
    })
}

fn cmd_solve(
    path: &Path,
    output: &Path,
    flags: &LoweringFlags,
    gap: f64,
    export_lp: Option<&Path>,
    filter_specs: &[String],
    no_timestamps: bool,
) -> u8 {
    let filter = match parse_filter(filter_specs) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let system = match load(path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if let Err(code) = check(&system) {
        return code;
    }
    let model = match lowered(&system, flags) {
        Ok(m) => m,
        Err(code) => return code,
    };
    if let Err(e) = fs::create_dir_all(output) {
        eprintln!("error: cannot create {}: {e}", output.display());
        return EXIT_SOLVER;
    }
    if let Some(lp_path) = export_lp {
        let lp_path = under(output, lp_path);
        let export = lp_file::export_lp(&model);
        if let Err(code) = write_file(&lp_path, &export.text) {
            return code;
        }
        let names_path = lp_path.with_extension(format!(
            "{}.names",
            lp_path.extension().and_then(|e| e.to_str()).unwrap_or("lp")
        ));
        if let Err(code) = write_file(&names_path, &export.name_map_text()) {
            return code;
        }
        log::info!("wrote {}", lp_path.display());
    }

    let solution = match solve_milp(&model, &SolveOptions { abs_gap: gap }) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_SOLVER;
        }
    };
    let summary = summarize(&model, &solution, no_timestamps);
    if let Err(code) = write_file(&output.join("summary.txt"), &summary) {
        return code;
    }
    match solution.status {
        SolveStatus::Optimal => {
            let records = match flows(&model, &solution, &filter) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_SOLVER;
                }
            };
            if let Err(code) = write_file(&output.join("solution.csv"), &to_csv(&records)) {
                return code;
            }
            println!(
                "optimal: objective {}, results in {}",
                solution.objective.expect("optimal solutions carry an objective"),
                output.display()
            );
            EXIT_OK
        }
        SolveStatus::Infeasible => {
            eprintln!("model is infeasible");
            EXIT_INFEASIBLE
        }
        SolveStatus::Unbounded => {
            eprintln!("model is unbounded");
            EXIT_SOLVER
        }
    }
}

fn summarize(model: &MilpModel, solution: &Solution, no_timestamps: bool) -> String {
    let mut out = String::new();
    let status = match solution.status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unbounded => "unbounded",
    };
    out.push_str(&format!("status: {status}\n"));
    match solution.objective {
        Some(obj) => out.push_str(&format!("objective: {obj}\n")),
        None => out.push_str("objective: none\n"),
    }
    out.push_str(&format!("variables: {}\n", model.num_vars()));
    out.push_str(&format!("binaries: {}\n", model.binary_vars().len()));
    out.push_str(&format!("constraints: {}\n", model.constraints.len()));
    out.push_str(&format!("nodes: {}\n", solution.stats.nodes));
    out.push_str(&format!("simplex iterations: {}\n", solution.stats.iterations));
    if !no_timestamps {
        out.push_str(&format!("wall time: {:?}\n", solution.stats.wall));
        out.push_str(&format!(
            "generated: {}\n",
            chrono::Local::now().format("%Y-%m-%d %H:%M:%S")
        ));
    }
    out
}

fn cmd_graph(path: &Path, output: &Path, format: FormatArg, flags: &LoweringFlags) -> u8 {
    let system = match load(path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if let Err(code) = check(&system) {
        return code;
    }
    let model = match lowered(&system, flags) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let (text, file) = match format {
        FormatArg::Dot => (export_graph(&model, GraphFormat::Dot), "energy_system.dot"),
        FormatArg::Graphml => {
            (export_graph(&model, GraphFormat::GraphMl), "energy_system.graphml")
        }
    };
    if let Err(e) = fs::create_dir_all(output) {
        eprintln!("error: cannot create {}: {e}", output.display());
        return EXIT_SOLVER;
    }
    let target = output.join(file);
    if let Err(code) = write_file(&target, &text) {
        return code;
    }
    println!("wrote {}", target.display());
    EXIT_OK
}

fn cmd_export(path: &Path) -> u8 {
    let system = match load(path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if let Err(code) = check(&system) {
        return code;
    }
    print!("{}", export_yaml(&system));
    EXIT_OK
}
