//! Command-line interface: infer, eval, unify, check and conjecture.

use std::fs;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::deriv;
use crate::eval;
use crate::harness::{run_conjecture, GenConfig};
use crate::infer::{infer, infer_q};
use crate::syntax::{self, Term};
use crate::types;
use crate::unify::{unify_q, UnifProblem, UnifyOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNTYPABLE: i32 = 2;
pub const EXIT_RULE_VIOLATION: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "lrank2",
    about = "Linear rank 2 intersection types: inference, evaluation and derivation checking",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infer the environment and type of a term
    Infer {
        /// Also report the quantitative index
        #[arg(short, long)]
        quantitative: bool,
        #[command(flatten)]
        input: Input,
    },
    /// Evaluate a term to leftmost-outermost normal form
    Eval {
        /// Maximum number of steps
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        /// Print each intermediate term
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        input: Input,
    },
    /// Unify equations between linear types
    Unify {
        /// Equations of the form "t1 = t2"
        #[arg(required = true)]
        equations: Vec<String>,
    },
    /// Check a derivation stored as JSON
    Check {
        /// Emit the outcome as JSON
        #[arg(long)]
        json: bool,
        file: PathBuf,
    },
    /// Compare inferred indices against evaluation lengths over a corpus
    Conjecture {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 12)]
        max_size: usize,
        #[arg(long, default_value_t = 3)]
        max_binder_reuse: usize,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Input {
    /// Read the term from a file
    #[arg(short = 'f', long = "file")]
    file: Option<PathBuf>,
    /// The term itself; `-` reads stdin
    expr: Option<String>,
}

impl Input {
    fn read(&self) -> Result<String, String> {
        match (&self.file, &self.expr) {
            (Some(path), None) => {
                fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
            }
            (None, Some(expr)) if expr == "-" => {
                let mut buf = String::new();
                std::io::stdin()
                    .read_to_string(&mut buf)
                    .map_err(|e| format!("cannot read stdin: {e}"))?;
                Ok(buf)
            }
            (None, Some(expr)) => Ok(expr.clone()),
            _ => Err("provide exactly one of an expression or -f FILE".into()),
        }
    }
}

pub fn main(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not usage errors
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    run(cli.command)
}

pub fn run(command: Command) -> i32 {
    match command {
        Command::Infer {
            quantitative,
            input,
        } => cmd_infer(quantitative, &input),
        Command::Eval { fuel, trace, input } => cmd_eval(fuel, trace, &input),
        Command::Unify { equations } => cmd_unify(&equations),
        Command::Check { json, file } => cmd_check(json, &file),
        Command::Conjecture {
            seed,
            count,
            max_size,
            max_binder_reuse,
            fuel,
            out,
        } => cmd_conjecture(
            GenConfig {
                max_size,
                max_binder_reuse,
                seed,
                count,
            },
            fuel,
            out.as_deref(),
        ),
    }
}

fn parse_term(input: &Input) -> Result<Term, i32> {
    let text = input.read().map_err(|e| {
        eprintln!("error: {e}");
        EXIT_USAGE
    })?;
    syntax::parse(text.trim()).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_USAGE
    })
}

fn cmd_infer(quantitative: bool, input: &Input) -> i32 {
    let term = match parse_term(input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let result = if quantitative {
        infer_q(&term)
    } else {
        infer(&term)
    };
    match result {
        Ok(r) => {
            println!("{} |- {} : {}", r.env, term, r.ty);
            if quantitative {
                println!("steps={}", r.steps);
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("untypable: {e}");
            EXIT_UNTYPABLE
        }
    }
}

fn cmd_eval(fuel: u64, trace: bool, input: &Input) -> i32 {
    let term = match parse_term(input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    if trace {
        for step in eval::trace(&term, fuel) {
            println!("{step}");
        }
    }
    let out = eval::normalize(&term, fuel);
    println!("{}", out.result);
    match out.status {
        eval::EvalStatus::Normal => println!("steps={}", out.steps),
        eval::EvalStatus::FuelExhausted => println!("steps={} (fuel exhausted)", out.steps),
    }
    EXIT_OK
}

fn cmd_unify(equations: &[String]) -> i32 {
    let mut parsed = Vec::new();
    for eq in equations {
        let Some((lhs, rhs)) = eq.split_once('=') else {
            eprintln!("error: equation {eq:?} lacks '='");
            return EXIT_USAGE;
        };
        let lhs = match types::parse_lin(lhs.trim()) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        };
        let rhs = match types::parse_lin(rhs.trim()) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        };
        parsed.push((lhs, rhs));
    }
    let (outcome, count) = unify_q(&UnifProblem::new(parsed));
    match outcome {
        UnifyOutcome::Solved(s) => {
            println!("{s}");
            println!("decompositions={count}");
            EXIT_OK
        }
        UnifyOutcome::Failed(e) => {
            eprintln!("not unifiable: {e}");
            EXIT_UNTYPABLE
        }
    }
}

fn cmd_check(json: bool, file: &std::path::Path) -> i32 {
    let text = match fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", file.display());
            return EXIT_USAGE;
        }
    };
    let derivation = match deriv::from_json(&text) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let quantitative = derivation.conclusion.multi.is_some();
    let outcome = if quantitative {
        deriv::check_q(&derivation)
    } else {
        deriv::check(&derivation)
    };
    match outcome {
        Ok(judgment) => {
            if json {
                let tight = quantitative && deriv::is_tight(&derivation);
                let mut value = serde_json::json!({
                    "ok": true,
                    "judgment": judgment.to_string(),
                });
                if quantitative {
                    value["tight"] = serde_json::json!(tight);
                }
                println!("{value}");
            } else {
                println!("ok: {judgment}");
                if quantitative && deriv::is_tight(&derivation) {
                    println!("tight");
                }
            }
            EXIT_OK
        }
        Err(violation) => {
            if json {
                println!(
                    "{}",
                    serde_json::json!({ "ok": false, "error": violation.to_string() })
                );
            } else {
                eprintln!("rule violation: {violation}");
            }
            EXIT_RULE_VIOLATION
        }
    }
}

fn cmd_conjecture(cfg: GenConfig, fuel: u64, out: Option<&std::path::Path>) -> i32 {
    let report = run_conjecture(&cfg, fuel);
    let rendered = serde_json::to_string_pretty(&report).expect("report serialization");
    match out {
        Some(path) => {
            if let Err(e) = fs::write(path, &rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
            println!(
                "total={} typable={} agreements={} mismatches={} diverged={}",
                report.total,
                report.typable,
                report.agreements,
                report.mismatches.len(),
                report.diverged
            );
        }
        None => println!("{rendered}"),
    }
    if report.mismatches.is_empty() {
        EXIT_OK
    } else {
        eprintln!("found {} mismatching term(s)", report.mismatches.len());
        EXIT_MISMATCH
    }
}
