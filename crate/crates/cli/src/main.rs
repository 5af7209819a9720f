//! Command-line front end for the GBS decision procedures.

mod bench;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gbs::britton::{britton_reduce_fast, cyclic_form, word_problem};
use gbs::commonoid::{congruent, monoid_to_gbs, parse_vector, CongResult, MonPresentation, Step};
use gbs::conjugacy::{conjugate, ConjResult};
use gbs::gog::{parse_factorization, parse_graph, parse_word, rebase, spanning_tree, GFactorization, GbsGraph};

const YES: u8 = 0;
const NO: u8 = 1;
const UNKNOWN: u8 = 2;
const ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "gbs", version, about = "Word and conjugacy problems in generalized Baumslag-Solitar groups")]
struct Cli {
    /// Treat graph, word and vector arguments as literal text, never as paths.
    #[arg(long, global = true)]
    literal: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file; prints `valid` or one violation per line.
    Validate { graph: String },
    /// Decide whether a closed word is trivial.
    Wp {
        graph: String,
        word: String,
        /// Read the word in the fundamental group relative to the spanning
        /// tree, rebasing it at the least vertex first.
        #[arg(long)]
        rebase: bool,
    },
    /// Print the Britton-reduced form of a word.
    Reduce { graph: String, word: String },
    /// Print a cyclically reduced conjugate of a closed word.
    CycReduce { graph: String, word: String },
    /// Decide whether two closed words are conjugate.
    Conj {
        graph: String,
        v: String,
        w: String,
        /// Coordinate cap for the elliptic monoid search.
        #[arg(long)]
        bound: Option<u64>,
        /// Print a verified conjugator `z` with `z v z⁻¹ = w`.
        #[arg(long)]
        witness: bool,
    },
    /// Commutative monoid queries.
    #[command(subcommand)]
    Monoid(MonoidCommand),
    /// Reductions between problems.
    #[command(subcommand)]
    Convert(ConvertCommand),
    /// Cross-check fast procedures against oracles on random instances.
    Bench(bench::BenchArgs),
}

#[derive(Subcommand)]
enum MonoidCommand {
    /// Decide whether two vectors are congruent.
    Congruent {
        #[command(flatten)]
        query: MonoidQuery,
        /// Coordinate cap for the search.
        #[arg(long)]
        bound: Option<u64>,
    },
}

#[derive(Subcommand)]
enum ConvertCommand {
    /// Emit a one-vertex graph file whose elliptic conjugacy question
    /// matches the congruence question; the two words follow as comments.
    MonoidToGbs {
        #[command(flatten)]
        query: MonoidQuery,
    },
}

#[derive(Args)]
struct MonoidQuery {
    pres: String,
    e: String,
    f: String,
}

/// Reads `arg` as a file when it names one, unless literals are forced.
fn text_of(arg: &str, literal: bool) -> Result<String, String> {
    if !literal && Path::new(arg).is_file() {
        return fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"));
    }
    Ok(arg.to_string())
}

struct Context {
    literal: bool,
}

impl Context {
    fn graph(&self, arg: &str) -> Result<GbsGraph, String> {
        let text = if self.literal { arg.to_string() } else { fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))? };
        let graph = parse_graph(&text).map_err(|e| format!("{arg}: {e}"))?;
        graph.validated().map_err(|e| format!("{arg}: {e}"))
    }

    fn word(&self, arg: &str, graph: &GbsGraph) -> Result<GFactorization, String> {
        parse_factorization(text_of(arg, self.literal)?.trim(), graph).map_err(|e| e.to_string())
    }

    fn closed(&self, arg: &str, graph: &GbsGraph) -> Result<GFactorization, String> {
        let f = self.word(arg, graph)?;
        f.require_closed(graph).map_err(|e| e.to_string())?;
        Ok(f)
    }

    fn monoid(&self, q: &MonoidQuery) -> Result<(MonPresentation, Vec<u64>, Vec<u64>), String> {
        let pres = MonPresentation::parse(&text_of(&q.pres, self.literal)?).map_err(|e| format!("{}: {e}", q.pres))?;
        let e = parse_vector(text_of(&q.e, self.literal)?.trim()).map_err(|e| e.to_string())?;
        let f = parse_vector(text_of(&q.f, self.literal)?.trim()).map_err(|e| e.to_string())?;
        Ok((pres, e, f))
    }
}

fn answer(yes: bool, y: &str, n: &str) -> u8 {
    println!("{}", if yes { y } else { n });
    if yes {
        YES
    } else {
        NO
    }
}

fn path_text(path: &[Step]) -> String {
    if path.is_empty() {
        return "none".into();
    }
    let mut parts = Vec::new();
    for step in path {
        let index = step.relation as i64 + 1;
        for _ in 0..step.times {
            parts.push(if step.forward { index } else { -index }.to_string());
        }
    }
    parts.join(" ")
}

fn run(cli: Cli) -> Result<u8, String> {
    let ctx = Context { literal: cli.literal };
    match cli.command {
        Command::Validate { graph } => {
            let text = if ctx.literal { graph.clone() } else { fs::read_to_string(&graph).map_err(|e| format!("{graph}: {e}"))? };
            let g = parse_graph(&text).map_err(|e| format!("{graph}: {e}"))?;
            let report = g.validate();
            if report.is_valid() {
                println!("valid");
                return Ok(YES);
            }
            for v in &report.violations {
                println!("{v}");
            }
            Ok(ERROR)
        }
        Command::Wp { graph, word, rebase: rebased } => {
            let g = ctx.graph(&graph)?;
            let f = if rebased {
                let letters = parse_word(text_of(&word, ctx.literal)?.trim(), &g).map_err(|e| e.to_string())?;
                let tree = spanning_tree(&g).map_err(|e| e.to_string())?;
                rebase(&letters, &g, &tree, tree.root()).map_err(|e| e.to_string())?
            } else {
                ctx.closed(&word, &g)?
            };
            let trivial = word_problem(&f, &g).map_err(|e| e.to_string())?;
            Ok(answer(trivial, "trivial", "nontrivial"))
        }
        Command::Reduce { graph, word } => {
            let g = ctx.graph(&graph)?;
            let f = ctx.word(&word, &g)?;
            println!("{}", britton_reduce_fast(&f, &g).display(&g));
            Ok(YES)
        }
        Command::CycReduce { graph, word } => {
            let g = ctx.graph(&graph)?;
            let f = ctx.closed(&word, &g)?;
            let cf = cyclic_form(&f, &g).map_err(|e| e.to_string())?;
            println!("{}", cf.word.display(&g));
            Ok(YES)
        }
        Command::Conj { graph, v, w, bound, witness } => {
            let g = ctx.graph(&graph)?;
            let (v, w) = (ctx.closed(&v, &g)?, ctx.closed(&w, &g)?);
            match conjugate(&v, &w, &g, bound).map_err(|e| e.to_string())? {
                ConjResult::Conjugate(z) => {
                    println!("conjugate");
                    if let (true, Some(z)) = (witness, z) {
                        println!("{}", z.display(&g));
                    }
                    Ok(YES)
                }
                ConjResult::NotConjugate => Ok(answer(false, "", "not conjugate")),
                ConjResult::Unknown(reason) => {
                    println!("unknown: {reason}");
                    Ok(UNKNOWN)
                }
            }
        }
        Command::Monoid(MonoidCommand::Congruent { query, bound }) => {
            let (pres, e, f) = ctx.monoid(&query)?;
            match congruent(&e, &f, &pres, bound).map_err(|e| e.to_string())? {
                CongResult::Congruent(path) => {
                    println!("congruent");
                    println!("path: {}", path_text(&path));
                    Ok(YES)
                }
                CongResult::NotCongruent => Ok(answer(false, "", "not congruent")),
                CongResult::Unknown(reason) => {
                    println!("unknown: {reason}");
                    Ok(UNKNOWN)
                }
            }
        }
        Command::Convert(ConvertCommand::MonoidToGbs { query }) => {
            let (pres, e, f) = ctx.monoid(&query)?;
            let (g, k, l) = monoid_to_gbs(&pres, &e, &f).map_err(|e| e.to_string())?;
            print!("{}", g.to_text());
            println!("# v: {}", k.display(&g));
            println!("# w: {}", l.display(&g));
            Ok(YES)
        }
        Command::Bench(args) => Ok(bench::run(&args)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ERROR } else { YES };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(ERROR)
        }
    }
}
