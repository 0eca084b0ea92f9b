use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use opaq_core::crosscheck::{run_batch, write_divergence_fixtures, BatchConfig};
use opaq_core::oracle::OracleConfig;
use opaq_core::projection::{build_projected_automaton, build_sipa};
use opaq_core::strong::{
    build_verifier_bounded, verify_infinite_step_strong_in, verify_k_step_strong_in,
};
use opaq_core::weak::{
    verify_current_state_opacity_in, verify_infinite_step_weak_in, verify_k_step_weak_in,
};
use opaq_core::{
    build_observer_bounded, build_sipa_with, build_sst, build_weak_state_tree, dot, LimitExceeded,
    Nfa, Property, RootPolicy, SipaUniverse, Verdict, VerdictReport,
};

const OPAQUE: u8 = 0;
const NOT_OPAQUE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const LIMIT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "opaq",
    version,
    about = "Opacity verification for partially observed NFAs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one opacity property for a model.
    Verify {
        #[arg(long, value_enum)]
        property: PropertyArg,
        /// Step count for k-weak and k-strong.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Cap on observer and verifier states.
        #[arg(long, default_value_t = 1 << 20)]
        max_states: usize,
        /// Estimates rooting the trees for k-strong.
        #[arg(long, value_enum, default_value_t = RootsArg::All)]
        roots: RootsArg,
        file: PathBuf,
    },
    /// Print a construction as Graphviz DOT.
    Export {
        #[arg(long, value_enum)]
        structure: Structure,
        /// Root estimate for trees, e.g. "1,4,7".
        #[arg(long)]
        root: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1 << 20)]
        max_states: usize,
        file: PathBuf,
    },
    /// Compare every verdict against the brute-force oracle on random models.
    Crosscheck {
        #[arg(long, default_value_t = 500)]
        models: usize,
        #[arg(long, default_value_t = 5)]
        max_states: usize,
        #[arg(long, default_value_t = 4)]
        max_events: usize,
        /// A single K, an inclusive range "0..3", or a list "0,2".
        #[arg(long, default_value = "0..3")]
        k: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Longest observation the oracle explores.
        #[arg(long, default_value_t = 64)]
        bound: usize,
        #[arg(long, value_enum, default_value_t = RootsArg::All)]
        roots: RootsArg,
        #[arg(long, default_value = "crosscheck.jsonl")]
        report: PathBuf,
        /// Directory for models whose verdicts diverge.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum PropertyArg {
    Cs,
    KWeak,
    KStrong,
    InfWeak,
    InfStrong,
}

impl From<PropertyArg> for Property {
    fn from(p: PropertyArg) -> Self {
        match p {
            PropertyArg::Cs => Property::CurrentState,
            PropertyArg::KWeak => Property::KStepWeak,
            PropertyArg::KStrong => Property::KStepStrong,
            PropertyArg::InfWeak => Property::InfiniteStepWeak,
            PropertyArg::InfStrong => Property::InfiniteStepStrong,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, ValueEnum)]
enum RootsArg {
    All,
    Secret,
}

impl From<RootsArg> for RootPolicy {
    fn from(r: RootsArg) -> Self {
        match r {
            RootsArg::All => RootPolicy::AllStates,
            RootsArg::Secret => RootPolicy::SecretIntersecting,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Structure {
    Observer,
    Projected,
    Sipa,
    Verifier,
    WeakTree,
    Sst,
}

/// A failed run: message for stderr and its exit code.
struct Failure(u8, String);

impl From<LimitExceeded> for Failure {
    fn from(e: LimitExceeded) -> Self {
        Failure(LIMIT, format!("resource limit: {e}"))
    }
}

fn input_error(msg: impl Into<String>) -> Failure {
    Failure(INPUT_ERROR, msg.into())
}

fn load(path: &Path) -> Result<Nfa, Failure> {
    Nfa::load(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn use_color() -> bool {
    match std::env::var("OPAQ_COLOR").as_deref() {
        Ok("always") => true,
        Ok("never") => false,
        Ok("auto") | Err(_) => io::stdout().is_terminal(),
        Ok(other) => {
            eprintln!("warning: OPAQ_COLOR={other:?} is not auto, always or never; using auto");
            io::stdout().is_terminal()
        }
    }
}

#[derive(Serialize)]
struct Sizes {
    observer_states: usize,
    sipa_states: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    verifier_states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tree_nodes: Option<usize>,
}

#[derive(Serialize)]
struct VerifyOutput {
    #[serde(flatten)]
    verdict: VerdictReport,
    sizes: Sizes,
}

fn run_verify(
    property: Property,
    k: Option<usize>,
    format: Format,
    max_states: usize,
    roots: RootPolicy,
    file: &Path,
) -> Result<u8, Failure> {
    let k = match (property.takes_k(), k) {
        (true, None) => return Err(input_error(format!("--k is required for {property}"))),
        (true, Some(k)) => Some(k),
        (false, Some(_)) => {
            eprintln!("warning: --k is ignored for {property}");
            None
        }
        (false, None) => None,
    };
    let nfa = load(file)?;
    let obs = build_observer_bounded(&nfa, max_states)?;
    let sipa = build_sipa(&nfa);
    let mut sizes = Sizes {
        observer_states: obs.len(),
        sipa_states: sipa.states().len(),
        verifier_states: None,
        tree_nodes: None,
    };
    let verdict: Verdict = match property {
        Property::CurrentState => verify_current_state_opacity_in(&nfa, &obs),
        Property::KStepWeak => verify_k_step_weak_in(&nfa, &obs, k.unwrap_or_default()),
        Property::InfiniteStepWeak => verify_infinite_step_weak_in(&nfa, &obs),
        Property::KStepStrong => {
            let full = build_sipa_with(&nfa, SipaUniverse::Full);
            verify_k_step_strong_in(&nfa, &obs, &full, k.unwrap_or_default(), roots)
        }
        Property::InfiniteStepStrong => {
            verify_infinite_step_strong_in(&nfa, &obs, &sipa, max_states)?
        }
    };
    if property == Property::InfiniteStepStrong {
        sizes.verifier_states = Some(verdict.explored);
    } else {
        sizes.tree_nodes = Some(verdict.explored);
    }

    let report = verdict.to_report(&nfa);
    let mut out = io::stdout().lock();
    match format {
        Format::Json => {
            let body = VerifyOutput {
                verdict: report,
                sizes,
            };
            let _ = writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&body).expect("output serializes")
            );
        }
        Format::Text => {
            let color = use_color();
            let (word, code) = if verdict.opaque {
                ("opaque", "32")
            } else {
                ("not opaque", "31")
            };
            let word = if color {
                format!("\x1b[1;{code}m{word}\x1b[0m")
            } else {
                word.to_string()
            };
            match k {
                Some(k) => {
                    let _ = writeln!(out, "{property} (K = {k}): {word}");
                }
                None => {
                    let _ = writeln!(out, "{property}: {word}");
                }
            }
            if let Some(w) = &report.witness {
                let show = |v: &[String]| {
                    if v.is_empty() {
                        "ε".to_string()
                    } else {
                        v.join(" ")
                    }
                };
                let _ = writeln!(out, "witness prefix: {}", show(&w.prefix));
                let _ = writeln!(out, "witness continuation: {}", show(&w.continuation));
                let _ = writeln!(out, "violating node: {}", w.node);
            }
            let _ = writeln!(out, "observer states: {}", sizes.observer_states);
            let _ = writeln!(out, "SIPA states: {}", sizes.sipa_states);
            if let Some(n) = sizes.verifier_states {
                let _ = writeln!(out, "verifier states: {n}");
            }
            if let Some(n) = sizes.tree_nodes {
                let _ = writeln!(out, "tree nodes: {n}");
            }
        }
    }
    Ok(if verdict.opaque { OPAQUE } else { NOT_OPAQUE })
}

fn run_export(
    structure: Structure,
    root: Option<&str>,
    k: Option<usize>,
    max_states: usize,
    file: &Path,
) -> Result<u8, Failure> {
    let nfa = load(file)?;
    let text = match structure {
        Structure::Observer => dot::observer_dot(&nfa, &build_observer_bounded(&nfa, max_states)?),
        Structure::Projected => dot::projected_dot(&nfa, &build_projected_automaton(&nfa)),
        Structure::Sipa => dot::sipa_dot(&nfa, &build_sipa(&nfa)),
        Structure::Verifier => {
            let obs = build_observer_bounded(&nfa, max_states)?;
            let ver = build_verifier_bounded(&nfa, &obs, &build_sipa(&nfa), max_states, false)?;
            dot::verifier_dot(&nfa, &ver)
        }
        Structure::WeakTree | Structure::Sst => {
            let root = root.ok_or_else(|| input_error("--root is required for tree export"))?;
            let k = k.ok_or_else(|| input_error("--k is required for tree export"))?;
            let names: Vec<&str> = root
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            let root = nfa
                .parse_states(&names)
                .map_err(|e| input_error(format!("--root: {e}")))?;
            let obs = build_observer_bounded(&nfa, max_states)?;
            let tree = match structure {
                Structure::WeakTree => build_weak_state_tree(&nfa, &obs, &root, k),
                _ => build_sst(
                    &nfa,
                    &obs,
                    &build_sipa_with(&nfa, SipaUniverse::Full),
                    &root,
                    k,
                ),
            }
            .map_err(|e| input_error(e.to_string()))?;
            dot::tree_dot(&nfa, &tree)
        }
    };
    print!("{text}");
    Ok(0)
}

fn parse_ks(s: &str) -> Result<Vec<usize>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad K value {t:?}"))
    };
    let ks: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(format!("empty K range {s:?}"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    Ok(ks)
}

#[allow(clippy::too_many_arguments)]
fn run_crosscheck(
    models: usize,
    max_states: usize,
    max_events: usize,
    k: &str,
    seed: u64,
    bound: usize,
    roots: RootPolicy,
    report_path: &Path,
    fixtures: Option<&Path>,
) -> Result<u8, Failure> {
    if max_states == 0 {
        return Err(input_error("--max-states must be at least 1"));
    }
    if max_events == 0 {
        return Err(input_error("--max-events must be at least 1"));
    }
    if bound == 0 {
        return Err(input_error("--bound must be at least 1"));
    }
    let ks = parse_ks(k).map_err(input_error)?;
    let cfg = BatchConfig {
        models,
        max_states,
        max_events,
        ks,
        seed,
        oracle: OracleConfig {
            max_len: bound,
            ..OracleConfig::default()
        },
        policy: roots,
    };
    let report = run_batch(&cfg);
    std::fs::write(report_path, report.to_jsonl())
        .map_err(|e| input_error(format!("{}: {e}", report_path.display())))?;
    if let Some(dir) = fixtures {
        let written = write_divergence_fixtures(&report, dir)
            .map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
        for p in written {
            eprintln!("fixture: {}", p.display());
        }
    }
    let bad: Vec<_> = report.disagreements().collect();
    println!(
        "models: {}, records: {}, disagreements: {}",
        report.models.len(),
        report.records.len(),
        bad.len()
    );
    for r in &bad {
        println!(
            "disagreement: seed {} {} k={:?} verdict={} oracle={}",
            r.seed, r.property, r.k, r.verdict, r.oracle
        );
    }
    println!("report: {}", report_path.display());
    Ok(if bad.is_empty() { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Verify {
            property,
            k,
            format,
            max_states,
            roots,
            file,
        } => run_verify(property.into(), k, format, max_states, roots.into(), &file),
        Command::Export {
            structure,
            root,
            k,
            max_states,
            file,
        } => run_export(structure, root.as_deref(), k, max_states, &file),
        Command::Crosscheck {
            models,
            max_states,
            max_events,
            k,
            seed,
            bound,
            roots,
            report,
            fixtures,
        } => run_crosscheck(
            models,
            max_states,
            max_events,
            &k,
            seed,
            bound,
            roots.into(),
            &report,
            fixtures.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(Failure(code, msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
        // the panic message is already on stderr
        Err(_) => ExitCode::from(INPUT_ERROR),
    }
}
