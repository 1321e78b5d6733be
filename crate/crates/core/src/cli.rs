//! The `xsolve` command line.
//!
//! Exit codes: 10 satisfiable, 20 unsatisfiable, 0 other successes, 1 usage,
//! I/O and parse errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{catalog_eval, tau_of, weight_search, Catalog};
use crate::dimacs::{parse_with_warnings, XDimacsDocument};
use crate::error::{Error, Result};
use crate::search::{solve_with, Decision, SearchStats, SolverOptions};
use crate::testkit::{brute_force, generate_clauses, GeneratorConfig};

pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_ERROR: i32 = 1;

/// Environment variable naming a catalog file to use instead of the bundled
/// one.
pub const CATALOG_ENV: &str = "XSOLVE_CATALOG";

pub const STATS_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "xsolve", version, about = "Exact satisfiability solver and analysis tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide an instance
    Solve {
        file: PathBuf,
        /// Print the model on a `v` line
        #[arg(long)]
        model: bool,
        /// Write search statistics as JSON
        #[arg(long, value_name = "PATH")]
        stats_json: Option<PathBuf>,
        /// Disable the pattern branches on variables in two 3-literal clauses
        #[arg(long)]
        no_case21: bool,
    },
    /// Count models by enumeration
    Oracle { file: PathBuf },
    /// Write a seeded random instance
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long)]
        len_min: usize,
        #[arg(long)]
        len_max: usize,
        /// Probability of negating a literal
        #[arg(long, default_value_t = 0.5)]
        neg_prob: f64,
        /// Cap every variable at two occurrences of one polarity
        #[arg(long)]
        deg2: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Branching factor of a vector of measure decreases
    Tau {
        #[arg(required = true, allow_negative_numbers = true)]
        decreases: Vec<f64>,
    },
    /// Evaluate the case catalog at a weight
    CatalogEval {
        #[arg(long)]
        w: f64,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Grid search for the weight minimizing the worst branching factor
    WeightSearch {
        #[arg(long, default_value_t = 0.5)]
        lo: f64,
        #[arg(long, default_value_t = 1.0)]
        hi: f64,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Also print every grid point
        #[arg(long)]
        curve: bool,
    },
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StatsJson<'a> {
    version: u32,
    nodes: u64,
    leaves: u64,
    max_depth: u64,
    rule_fires: &'a std::collections::BTreeMap<String, u64>,
    mu_initial: f64,
    min_branch_drop: Option<f64>,
}

pub fn stats_json(stats: &SearchStats) -> String {
    let doc = StatsJson {
        version: STATS_VERSION,
        nodes: stats.nodes,
        leaves: stats.leaves,
        max_depth: stats.max_depth,
        rule_fires: &stats.rule_fires,
        mu_initial: stats.mu_initial,
        min_branch_drop: stats.measure.min_drop(),
    };
    serde_json::to_string_pretty(&doc).expect("stats serialize")
}

fn read_document(path: &Path, err: &mut dyn Write) -> Result<XDimacsDocument> {
    let text = std::fs::read_to_string(path)?;
    let (doc, warnings) = parse_with_warnings(&text)?;
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(doc)
}

fn load_catalog(flag: Option<&Path>) -> Result<Catalog> {
    match flag {
        Some(p) => Catalog::load(p),
        None => match std::env::var_os(CATALOG_ENV) {
            Some(p) => Catalog::load(Path::new(&p)),
            None => Ok(Catalog::builtin()),
        },
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e)
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Solve {
            file,
            model,
            stats_json: stats_path,
            no_case21,
        } => {
            let doc = read_document(&file, err)?;
            let f = doc.to_formula();
            let opts = SolverOptions {
                case21: !no_case21,
                instrument: stats_path.is_some(),
            };
            let result = solve_with(&f, &opts);
            writeln!(out, "s {}", result.decision).map_err(io)?;
            if let (true, Some(m)) = (model, &result.model) {
                let mut line = String::from("v");
                for lit in m.to_dimacs() {
                    line.push_str(&format!(" {lit}"));
                }
                writeln!(out, "{line} 0").map_err(io)?;
            }
            if let Some(path) = stats_path {
                std::fs::write(path, stats_json(&result.stats) + "\n")?;
            }
            Ok(exit_for(result.decision))
        }
        Command::Oracle { file } => {
            let f = read_document(&file, err)?.to_formula();
            let r = brute_force(&f)?;
            writeln!(out, "s {}", r.decision).map_err(io)?;
            writeln!(out, "c models {}", r.model_count).map_err(io)?;
            Ok(exit_for(r.decision))
        }
        Command::Gen {
            seed,
            vars,
            clauses,
            len_min,
            len_max,
            neg_prob,
            deg2,
            output,
        } => {
            let cfg = GeneratorConfig {
                seed,
                n_vars: vars,
                n_clauses: clauses,
                len_min,
                len_max,
                neg_probability: neg_prob,
                degree_cap: deg2.then_some(2),
            };
            let mut doc = XDimacsDocument::from_formula_clauses(vars, &generate_clauses(&cfg)?);
            doc.comments.push(format!(
                "seed {seed} vars {vars} clauses {clauses} len {len_min}..{len_max} neg {neg_prob}{}",
                if deg2 { " deg2" } else { "" }
            ));
            match output {
                Some(path) => std::fs::write(path, doc.emit())?,
                None => out.write_all(doc.emit().as_bytes()).map_err(io)?,
            }
            Ok(0)
        }
        Command::Tau { decreases } => {
            writeln!(out, "{:.6}", tau_of(&decreases)?).map_err(io)?;
            Ok(0)
        }
        Command::CatalogEval { w, catalog } => {
            let catalog = load_catalog(catalog.as_deref())?;
            let eval = catalog_eval(&catalog, w)?;
            writeln!(out, "{:<28} {:>9} {:>3} {:>9}", "case", "tau", "h", "expected").map_err(io)?;
            for r in &eval.rows {
                let h = r.h.map_or("-".to_string(), |h| h.to_string());
                let expected = r.expected.map_or("-".to_string(), |e| format!("{e:.4}"));
                writeln!(out, "{:<28} {:>9.6} {:>3} {:>9}", r.name, r.tau, h, expected).map_err(io)?;
            }
            writeln!(out, "max {:.6} {}", eval.max_tau, eval.worst).map_err(io)?;
            Ok(0)
        }
        Command::WeightSearch {
            lo,
            hi,
            step,
            catalog,
            curve,
        } => {
            let catalog = load_catalog(catalog.as_deref())?;
            let r = weight_search(&catalog, lo, hi, step)?;
            if curve {
                writeln!(out, "{:>10} {:>9}", "w", "max tau").map_err(io)?;
                for (w, t) in &r.curve {
                    writeln!(out, "{w:>10.6} {t:>9.6}").map_err(io)?;
                }
            }
            writeln!(out, "bestW {:.4}", r.best_w).map_err(io)?;
            writeln!(out, "bestTau {:.6}", r.best_tau).map_err(io)?;
            Ok(0)
        }
    }
}

fn exit_for(d: Decision) -> i32 {
    match d {
        Decision::Sat => EXIT_SAT,
        Decision::Unsat => EXIT_UNSAT,
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_ERROR
                }
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
