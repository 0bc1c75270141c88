//! `pcmorph`: run law suites, invertibility checks, quotient validation and
//! ticket-lock exploration from the command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage errors.

mod registry;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pcmorph_core::*;

/// Largest bound accepted for law suites; triple sweeps grow as `(4^B)^3`.
const MAX_LAW_BOUND: u32 = 4;
/// Largest bound accepted by the explorer.
const MAX_EXPLORE_BOUND: u32 = 6;

#[derive(Parser)]
#[command(name = "pcmorph", version, about = "Exhaustive checks for PCMs, separating relations, morphisms and a ticket lock")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format on stdout and in the output file.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for the exhaustive sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a law suite: pcm-*, seprel-*, morph-*, cancel-*, category or framing-*.
    Laws {
        name: String,
        #[arg(long, default_value_t = 3)]
        bound: u32,
    },
    /// Check invertibility of a relation (seprel-*) or a morphism (morph-*).
    Invert {
        name: String,
        #[arg(long, default_value_t = 3)]
        bound: u32,
    },
    /// Build the quotient of a carrier by a relation and validate it.
    Subpcm {
        pcm: String,
        rel: String,
        #[arg(long, default_value_t = 3)]
        bound: u32,
    },
    /// Explore every interleaving of lock/unlock threads.
    Explore {
        #[arg(long, default_value_t = 2)]
        threads: usize,
        #[arg(long, default_value_t = 1)]
        rounds: u32,
        #[arg(long, default_value_t = 4)]
        bound: u32,
        /// Replace a transition by a faulty variant: lock, unlock or taketx.
        #[arg(long)]
        mutate: Option<String>,
        /// Comma-separated: mutex, statespace, seprel, outline, stability, simulation.
        #[arg(long, value_delimiter = ',', default_value = "mutex,statespace,seprel,outline,stability,simulation")]
        check: Vec<String>,
    },
    /// Print a known counterexample.
    Counterexample {
        name: String,
        #[arg(long, default_value_t = 3)]
        bound: u32,
    },
}

/// A usage error, reported on stderr with exit code 2.
struct Usage(String);

type Outcome = std::result::Result<LawReport, Usage>;

fn usage(msg: impl Into<String>) -> Usage {
    Usage(msg.into())
}

fn unknown(kind: &str, name: &str, names: &[String]) -> Usage {
    usage(format!("unknown {kind} `{name}`; known names:\n  {}", names.join("\n  ")))
}

fn strs(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn check_bound(bound: u32, max: u32) -> std::result::Result<(), Usage> {
    if (1..=max).contains(&bound) {
        Ok(())
    } else {
        Err(usage(format!("bound must be between 1 and {max}, got {bound}")))
    }
}

fn laws(name: &str, b: u32) -> Outcome {
    check_bound(b, MAX_LAW_BOUND)?;
    let miss = || unknown("suite", name, &registry::law_names());
    if name == "category" {
        return Ok(check_category_laws(&registry::category_registry(b)));
    }
    let (kind, rest) = name.split_once('-').ok_or_else(miss)?;
    match kind {
        "pcm" => registry::pcm(rest, b).map(|p| check_pcm_laws(&p)),
        "seprel" => registry::seprel(rest, b).map(|r| check_seprel_laws(&r)),
        "morph" => registry::morphism(rest, b).map(|m| check_morphism_laws(&m)),
        "cancel" => registry::pcm(rest, b).map(|p| check_cancellative(&p)),
        "framing" => registry::framing(rest, b).map(|(r, m)| check_framing_lemmas(&r, &m)),
        _ => None,
    }
    .ok_or_else(miss)
}

fn invert(name: &str, b: u32) -> Outcome {
    check_bound(b, MAX_LAW_BOUND)?;
    let miss = || unknown("relation or morphism", name, &registry::invert_names());
    match name.split_once('-').ok_or_else(miss)? {
        ("seprel", rest) => registry::seprel(rest, b).map(|r| check_invertible_rel(&r)),
        ("morph", rest) => registry::morphism(rest, b).map(|m| check_invertible_morph(&m)),
        _ => None,
    }
    .ok_or_else(miss)
}

fn subpcm(pcm: &str, rel: &str, b: u32) -> Outcome {
    check_bound(b, MAX_LAW_BOUND)?;
    let p = registry::pcm(pcm, b).ok_or_else(|| unknown("carrier", pcm, &strs(registry::PCMS)))?;
    let r = registry::seprel(rel, b).ok_or_else(|| unknown("relation", rel, &strs(registry::SEPRELS)))?;
    if !p.same_as(r.base()) {
        return Err(usage(format!("relation `{rel}` lives on {}, not on {}", r.base().name(), p.name())));
    }
    match quotient(&p, &r) {
        Ok(w) => {
            let mut rep = check_quotient(&w, &r);
            let m = registry::quotient_morphism(rel, &p, b);
            match check_inject_invertibility(&m, &w) {
                Ok(inv) => rep.absorb("inject-invertibility", inv),
                Err(e) => rep.note(format!("injection invertibility skipped: {e}")),
            }
            Ok(rep)
        }
        Err(e) => {
            let mut rep = check_seprel_laws(&r);
            rep.suite = format!("quotient refused: {}", p.name());
            rep.note(e.to_string());
            Ok(rep)
        }
    }
}

const EXPLORER_CHECKS: &[&str] = &["mutex", "statespace", "seprel", "outline"];
const RESOURCE_CHECKS: &[&str] = &["stability", "simulation"];

fn explore_cmd(threads: usize, rounds: u32, b: u32, mutate: Option<&str>, checks: &[String]) -> Outcome {
    check_bound(b, MAX_EXPLORE_BOUND)?;
    if threads == 0 || rounds == 0 {
        return Err(usage("threads and rounds must be positive"));
    }
    let drawn = threads as u64 * rounds as u64;
    if drawn > b as u64 {
        return Err(usage(PcmError::BoundExceeded { bound: b, requested: drawn.min(u32::MAX as u64) as u32 }.to_string()));
    }
    let all: Vec<String> = EXPLORER_CHECKS.iter().chain(RESOURCE_CHECKS).map(|s| s.to_string()).collect();
    if let Some(bad) = checks.iter().find(|c| !all.contains(c)) {
        return Err(unknown("check", bad, &all));
    }
    let mut r = resource_tl(b);
    if let Some(m) = mutate {
        r = r.with_mutation(m.parse::<Mutation>().map_err(|e| usage(e.to_string()))?);
    }
    let explorer: Vec<Check> = checks.iter().filter_map(|c| c.parse().ok()).collect();
    let progs = (0..threads)
        .map(|_| thread_program(&r, rounds))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| usage(e.to_string()))?;
    let res = explore(&r, &progs, &explorer).map_err(|e| usage(e.to_string()))?;
    let mut rep = res.to_report();
    rep.suite = format!("explore: {} threads={threads} rounds={rounds}", r.name);
    if checks.iter().any(|c| c == "stability") {
        rep.absorb("statespace-preservation", check_statespace_preservation(&r));
        rep.absorb("stability", check_stability(&r));
    }
    if checks.iter().any(|c| c == "simulation") {
        rep.absorb("simulation", check_simulation_to_quotient(&r));
        if mutate.is_none() {
            match compare_with_quotient(b, threads, rounds) {
                Ok(q) => rep.absorb("quotient", q),
                Err(e) => rep.note(format!("quotient comparison skipped: {e}")),
            }
        }
    }
    Ok(rep)
}

fn counterexample(name: &str, b: u32) -> Outcome {
    check_bound(b, MAX_LAW_BOUND)?;
    if name != "upsilon" {
        return Err(unknown("counterexample", name, &strs(&["upsilon"])));
    }
    if b < 3 {
        return Err(usage("the upsilon counterexample needs bound at least 3"));
    }
    let r = rel_upsilon(b);
    let laws = check_seprel_laws(&r);
    let mut rep = LawReport::new("counterexample: upsilon is not associative");
    let w = laws.witness("associativity").map(<[Element]>::to_vec);
    if let Some([x, y, z]) = w.as_deref() {
        let dom = |e: &Element| {
            let keys: Vec<String> = e.as_map().map(|m| m.keys().map(u32::to_string).collect()).unwrap_or_default();
            format!("{{{}}}", keys.join(", "))
        };
        let p = r.base();
        let yz = p.join(y, z).map(|e| dom(&e)).unwrap_or_else(|_| "top".into());
        rep.note(format!("dom x = {}, dom y = {}, dom z = {}", dom(x), dom(y), dom(z)));
        rep.note(format!(
            "x υ y: {}, (x ⊕ y) υ z: {}, y υ z: {} since dom(y ⊕ z) = {yz}",
            r.holds(x, y).unwrap_or(false),
            p.join(x, y).and_then(|xy| r.holds(&xy, z)).unwrap_or(false),
            r.holds(y, z).unwrap_or(false),
        ));
    }
    rep.record("associativity", w);
    Ok(rep)
}

fn render(rep: &LawReport, format: Format) -> String {
    match format {
        Format::Text => rep.to_string(),
        Format::Json => serde_json::to_string_pretty(rep).expect("reports serialize") + "\n",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().expect("pool configured once");
    }
    let outcome = match &cli.command {
        Command::Laws { name, bound } => laws(name, *bound),
        Command::Invert { name, bound } => invert(name, *bound),
        Command::Subpcm { pcm, rel, bound } => subpcm(pcm, rel, *bound),
        Command::Explore { threads, rounds, bound, mutate, check } => {
            explore_cmd(*threads, *rounds, *bound, mutate.as_deref(), check)
        }
        Command::Counterexample { name, bound } => counterexample(name, *bound),
    };
    let rep = match outcome {
        Ok(rep) => rep,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let text = render(&rep, cli.format);
    // A closed pipe on stdout is not an error worth reporting.
    let _ = io::stdout().write_all(text.as_bytes());
    if let Some(path) = &cli.output {
        if let Err(e) = fs::write(path, &text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if rep.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
