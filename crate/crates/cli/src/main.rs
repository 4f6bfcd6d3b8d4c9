//! `unialg`: congruences, commutators and term conditions of finite algebras.
//!
//! Exit codes: 0 success, 1 negative answer, 2 input error, 3 cap reached
//! or search undecided.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use unialg::commutator::{abelian_analysis, center, commutator_delta, commutator_tc, CmGate};
use unialg::conditions::{find_chain, find_day_terms, ChainKind, SearchOutcome};
use unialg::io::{load_algebra, parse_partition_spec};
use unialg::lattice::con_all;
use unialg::report::{build_report, congruence_summary, lattice_dot, Caps, ChainSummary};
use unialg::{affine, Error, FiniteAlgebra};

#[derive(Parser)]
#[command(name = "unialg", version, about)]
struct Cli {
    /// Uniform cap on closures and free-algebra searches.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Also write the Hasse diagram of Con(A) in DOT format.
    #[arg(long, global = true, value_name = "PATH")]
    dot: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List all congruences.
    Con { algebra: String },
    /// Congruence generated by pairs, e.g. `0-2,1-3`.
    Cg { algebra: String, pairs: String },
    /// The commutator [alpha, beta].
    Commutator {
        algebra: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long, value_enum, default_value_t = Method::Tc)]
        method: Method,
    },
    /// The center.
    Center { algebra: String },
    /// Is [1, 1] = 0?
    Abelian { algebra: String },
    /// Search for a term chain.
    Maltsev {
        algebra: String,
        #[arg(long, default_value = "maltsev")]
        which: ChainKind,
    },
    /// Module representation of an Abelian algebra.
    Affine {
        algebra: String,
        #[arg(long, default_value_t = 0)]
        zero: usize,
    },
    /// Everything at once, as JSON.
    Report {
        algebra: String,
        /// Record wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Tc,
    Day,
    Delta,
}

impl Command {
    fn algebra(&self) -> &str {
        match self {
            Command::Con { algebra }
            | Command::Cg { algebra, .. }
            | Command::Commutator { algebra, .. }
            | Command::Center { algebra }
            | Command::Abelian { algebra }
            | Command::Maltsev { algebra, .. }
            | Command::Affine { algebra, .. }
            | Command::Report { algebra, .. } => algebra,
        }
    }
}

enum Outcome {
    Yes,
    No,
    Undecided,
}

fn exit_for_error(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::NotAffineEligible(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Yes) => ExitCode::SUCCESS,
        Ok(Outcome::No) => ExitCode::from(1),
        Ok(Outcome::Undecided) => ExitCode::from(3),
        Err(e) => {
            eprintln!("unialg: {e}");
            ExitCode::from(exit_for_error(&e))
        }
    }
}

fn emit(cli: &Cli, text: impl std::fmt::Display, value: serde_json::Value) {
    let mut out = std::io::stdout().lock();
    if cli.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("json"));
    } else {
        let _ = writeln!(out, "{text}");
    }
}

fn chain_summary_json(kind: ChainKind, outcome: &SearchOutcome<unialg::conditions::TermChain>) -> serde_json::Value {
    json!({ "kind": kind, "outcome": ChainSummary::from(outcome) })
}

fn run(cli: &Cli) -> unialg::Result<Outcome> {
    let caps = cli.cap.map(Caps::uniform).unwrap_or_default();
    let alg = load_algebra(cli.command.algebra())?;
    if let Some(path) = &cli.dot {
        let lat = con_all(&alg, caps.closure)?;
        std::fs::write(path, lattice_dot(&lat, &alg.name))
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    match &cli.command {
        Command::Con { .. } => {
            let lat = con_all(&alg, caps.closure)?;
            let summary = congruence_summary(&lat);
            let mut text = summary.list.join("\n");
            text.push_str(&format!(
                "\n{} congruences, modular: {}, distributive: {}",
                summary.count, summary.modular, summary.distributive
            ));
            emit(cli, text, json!(summary));
        }
        Command::Cg { pairs, .. } => {
            let p = parse_partition_spec(&alg, &format!("cg:{pairs}"))?;
            emit(cli, &p, json!({ "pairs": pairs, "congruence": p.to_string() }));
        }
        Command::Commutator {
            alpha, beta, method, ..
        } => {
            let a = parse_partition_spec(&alg, alpha)?;
            let b = parse_partition_spec(&alg, beta)?;
            let (name, c) = match method {
                Method::Tc => ("tc", commutator_tc(&alg, &a, &b, caps.closure)?),
                Method::Day | Method::Delta => {
                    let day = match find_day_terms(&alg, caps.free4)? {
                        SearchOutcome::Found(d) => d,
                        SearchOutcome::None => {
                            return Err(Error::NotModular(
                                "no Day terms, the algebra does not generate a modular variety".into(),
                            ))
                        }
                        SearchOutcome::Undecided { .. } => return Err(Error::CapExceeded { cap: caps.free4 }),
                    };
                    if matches!(method, Method::Day) {
                        ("day", affine::commutator_day(&alg, &day, &a, &b, caps.closure)?)
                    } else {
                        ("delta", commutator_delta(&alg, &a, &b, CmGate::Day(&day))?)
                    }
                }
            };
            emit(
                cli,
                &c,
                json!({ "alpha": a.to_string(), "beta": b.to_string(), "method": name, "commutator": c.to_string() }),
            );
        }
        Command::Center { .. } => {
            let z = center(&alg, caps.closure)?;
            emit(cli, &z, json!({ "center": z.to_string() }));
        }
        Command::Abelian { .. } => {
            let a = abelian_analysis(&alg, caps.closure)?;
            let text = if a.abelian {
                "abelian".to_string()
            } else {
                format!("not abelian: [1,1] = {}", a.commutator)
            };
            emit(
                cli,
                text,
                json!({ "abelian": a.abelian, "commutator": a.commutator.to_string(), "abelianization_size": a.abelianization.size }),
            );
            return Ok(if a.abelian { Outcome::Yes } else { Outcome::No });
        }
        Command::Maltsev { which, .. } => {
            let outcome = find_chain(&alg, *which, caps.search(*which))?;
            let text = match &outcome {
                SearchOutcome::Found(c) => c.to_string(),
                SearchOutcome::None => format!("{which}: none"),
                SearchOutcome::Undecided { elements } => {
                    format!("{which}: undecided after {elements} elements")
                }
            };
            emit(cli, text, chain_summary_json(*which, &outcome));
            return Ok(match outcome {
                SearchOutcome::Found(_) => Outcome::Yes,
                SearchOutcome::None => Outcome::No,
                SearchOutcome::Undecided { .. } => Outcome::Undecided,
            });
        }
        Command::Affine { zero, .. } => {
            let rep = affine::module_reconstruct(&alg, *zero, caps.closure)?;
            emit(cli, affine_text(&alg, &rep), json!(rep));
        }
        Command::Report { timing, .. } => {
            let report = build_report(&alg, caps, *timing)?;
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json"));
        }
    }
    Ok(Outcome::Yes)
}

fn affine_text(alg: &FiniteAlgebra, rep: &affine::AffineRepresentation) -> String {
    let n = alg.size;
    let mut s = format!("zero: {}\nmaltsev polynomial: {}\n", rep.zero, rep.maltsev);
    s.push_str(&format!("plus: {:?}\nneg: {:?}\n", rep.plus, rep.neg));
    s.push_str(&format!("ring: {} elements\n", rep.ring.len()));
    for i in 0..rep.ring.len() {
        s.push_str(&format!("  r{i} = {:?}\n", &rep.action[i * n..(i + 1) * n]));
    }
    for d in &rep.decompositions {
        let coeffs: Vec<String> = d.coefficients.iter().map(|c| format!("r{c}")).collect();
        s.push_str(&format!("{} = ({}) + {}\n", d.symbol, coeffs.join(", "), d.constant));
    }
    s.pop();
    s
}
