use std::fmt::Display;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use drsynth::region::AtomRecord;
use drsynth::{
    build_gadget, enumerate_atoms, extract_hitting_set, hs_brute_force, isomorphic,
    net_from_regions, parse_hs, parse_net, parse_ts, synthesize_with, Construction,
    HittingSetInstance, NetType, SolverError, Strategy, SynthesisOptions, SynthesisProblem,
    TransitionSystem,
};
use serde::Serialize;
use serde_json::json;

/// Dependency d-restricted synthesis of Boolean Petri nets.
///
/// Exit codes: 0 success, 1 negative verdict, 2 input error, 3 seed limit hit.
#[derive(Parser)]
#[command(name = "drsynth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a d-restricted net for a transition system.
    Synth {
        /// Transition system file, `-` for stdin.
        ts: PathBuf,
        /// Comma-separated interactions, e.g. `nop,swap,used,set`.
        #[arg(long = "type", value_parser = parse_type)]
        net_type: NetType,
        /// Maximum number of restricted events per place.
        #[arg(long)]
        d: usize,
        /// Write the net here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Print the reachability graph of a net.
    Rg {
        net: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a net's reachability graph is isomorphic to a transition system.
    Verify {
        ts: PathBuf,
        net: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Build the gadget transition system for a hitting set instance.
    Reduce {
        hs: PathBuf,
        /// Which construction: 2.1, 2.2, 2.3 or 2.4.
        #[arg(long = "theorem")]
        construction: Construction,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Solve a hitting set instance by brute force.
    Hs {
        hs: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compare the hitting set verdict with synthesis on the gadget.
    Roundtrip {
        hs: PathBuf,
        #[arg(long = "theorem")]
        construction: Construction,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// List the separation atoms of a transition system.
    Atoms {
        ts: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct SolverArgs {
    /// Worker threads; the result does not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Give up with exit code 3 after this many seeds (or guided search nodes).
    #[arg(long)]
    seed_limit: Option<u64>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    strategy: StrategyArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Seed,
    Guided,
}

impl SolverArgs {
    fn options(&self) -> SynthesisOptions {
        SynthesisOptions {
            strategy: match self.strategy {
                StrategyArg::Auto => Strategy::Auto,
                StrategyArg::Seed => Strategy::SeedOrder,
                StrategyArg::Guided => Strategy::Guided,
            },
            seed_limit: self.seed_limit,
            threads: self.threads,
        }
    }
}

fn parse_type(s: &str) -> Result<NetType, String> {
    s.parse().map_err(|e| format!("{e}"))
}

enum Failure {
    Input(String),
    Limit(String),
}

impl Failure {
    fn input(context: impl Display, err: impl Display) -> Self {
        Failure::Input(format!("{context}: {err}"))
    }
}

impl From<SolverError> for Failure {
    fn from(err: SolverError) -> Self {
        match err {
            SolverError::SeedLimit { .. } => Failure::Limit(err.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::input("stdin", e))?;
        return Ok(text);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::input(path.display(), e))
}

fn load_ts(path: &Path) -> Result<TransitionSystem, Failure> {
    parse_ts(&read(path)?).map_err(|e| Failure::input(path.display(), e))
}

fn load_hs(path: &Path) -> Result<HittingSetInstance, Failure> {
    parse_hs(&read(path)?).map_err(|e| Failure::input(path.display(), e))
}

/// Writes an artifact to `out`, or to stdout when there is none.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::input(path.display(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json(value: &impl Serialize) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("reports serialize")
    );
}

fn synth(
    ts_path: &Path,
    net_type: NetType,
    d: usize,
    out: Option<&Path>,
    json: bool,
    solver: &SolverArgs,
) -> Outcome {
    let ts = load_ts(ts_path)?;
    let problem = SynthesisProblem::new(ts, net_type, d)?;
    let result = synthesize_with(&problem, &solver.options())?;
    let ts = problem.ts();
    let stats = &result.stats;
    eprintln!(
        "strategy {}, seeds tried {}, regions found {}, wall time {:.3?}",
        match result.strategy {
            Strategy::Guided => "guided",
            _ => "seed order",
        },
        stats.seeds_tried,
        stats.valid_regions,
        stats.elapsed
    );
    let net = if result.is_solvable() {
        let net = net_from_regions(ts, net_type, &result.admissible)
            .expect("admissible regions are regions of the TS");
        Some(net.to_text())
    } else {
        None
    };
    if json {
        if let (Some(text), Some(path)) = (&net, out) {
            emit(Some(path), text)?;
        }
        print_json(&json!({ "report": result.report(ts), "net": net }));
    } else if let Some(text) = &net {
        emit(out, text)?;
    } else {
        println!("unsolvable: {} atoms unsolved", result.unsolved_atoms.len());
        for atom in &result.unsolved_atoms {
            println!("{}", atom.named(ts));
        }
    }
    Ok(result.is_solvable())
}

fn rg(net_path: &Path, out: Option<&Path>) -> Outcome {
    let net = parse_net(&read(net_path)?).map_err(|e| Failure::input(net_path.display(), e))?;
    emit(out, &net.reachability_graph().to_text())?;
    Ok(true)
}

fn verify(ts_path: &Path, net_path: &Path, json: bool) -> Outcome {
    let ts = load_ts(ts_path)?;
    let net = parse_net(&read(net_path)?).map_err(|e| Failure::input(net_path.display(), e))?;
    let outcome = isomorphic(&ts, &net.reachability_graph());
    if json {
        print_json(&json!({
            "isomorphic": outcome.is_ok(),
            "failure": outcome.as_ref().err().map(|e| e.to_string()),
        }));
    } else {
        match &outcome {
            Ok(_) => println!("isomorphic"),
            Err(e) => println!("not isomorphic: {e}"),
        }
    }
    Ok(outcome.is_ok())
}

fn reduce(hs_path: &Path, construction: Construction, out: Option<&Path>, json: bool) -> Outcome {
    let inst = load_hs(hs_path)?;
    let gadget = build_gadget(&inst, construction);
    let alpha = gadget.alpha.named(&gadget.ts).to_string();
    eprintln!(
        "construction {construction}: {} states, {} events, d = {}, alpha = {alpha}",
        gadget.ts.num_states(),
        gadget.ts.num_events(),
        gadget.d
    );
    if json {
        if let Some(path) = out {
            emit(Some(path), &gadget.to_text())?;
        }
        print_json(&json!({
            "construction": construction,
            "states": gadget.ts.num_states(),
            "events": gadget.ts.num_events(),
            "d": gadget.d,
            "alpha": AtomRecord::new(&gadget.alpha, &gadget.ts),
            "type": construction.designated_type().to_string(),
            "ts": out.is_none().then(|| gadget.ts.to_text()),
        }));
    } else {
        emit(out, &gadget.to_text())?;
    }
    Ok(true)
}

fn hs(hs_path: &Path, json: bool) -> Outcome {
    let inst = load_hs(hs_path)?;
    let found = hs_brute_force(&inst);
    if json {
        print_json(&json!({
            "kappa": inst.kappa(),
            "hitting_set": found.as_ref().map(|s| inst.names(s)),
        }));
    } else {
        match &found {
            Some(s) => println!("hitting set: {}", inst.names(s).join(" ")),
            None => println!("no hitting set of size at most {}", inst.kappa()),
        }
    }
    Ok(found.is_some())
}

fn roundtrip(
    hs_path: &Path,
    construction: Construction,
    json: bool,
    solver: &SolverArgs,
) -> Outcome {
    let inst = load_hs(hs_path)?;
    let gadget = build_gadget(&inst, construction);
    let expected = hs_brute_force(&inst).is_some();
    let problem =
        SynthesisProblem::new(gadget.ts.clone(), construction.designated_type(), gadget.d)?;
    let result = synthesize_with(&problem, &solver.options())?;
    let extracted = result
        .admissible
        .iter()
        .find(|r| r.solves(&gadget.alpha))
        .map(|r| extract_hitting_set(&inst, &gadget.ts, r));
    let extraction_ok = extracted.as_ref().map_or(!result.is_solvable(), |s| {
        s.len() <= inst.kappa() && inst.is_hitting_set(s)
    });
    let agree = expected == result.is_solvable() && extraction_ok;
    if json {
        print_json(&json!({
            "construction": construction,
            "hitting_set_exists": expected,
            "synthesis": result.verdict,
            "extracted": extracted.as_ref().map(|s| inst.names(s)),
            "extraction_valid": extraction_ok,
            "unsolved_atoms": result.report(&gadget.ts).unsolved_atoms,
            "agree": agree,
        }));
    } else {
        println!("hitting set exists: {expected}");
        println!(
            "synthesis on gadget {construction} (d = {}): {}",
            gadget.d,
            if result.is_solvable() {
                "solvable"
            } else {
                "unsolvable"
            }
        );
        for atom in &result.unsolved_atoms {
            println!("  unsolved {}", atom.named(&gadget.ts));
        }
        if let Some(s) = &extracted {
            println!(
                "extracted: {} ({})",
                inst.names(s).join(" "),
                if extraction_ok { "valid" } else { "invalid" }
            );
        }
        println!("{}", if agree { "agree" } else { "disagree" });
    }
    Ok(agree)
}

fn atoms(ts_path: &Path, json: bool) -> Outcome {
    let ts = load_ts(ts_path)?;
    let atoms = enumerate_atoms(&ts);
    if json {
        let records: Vec<AtomRecord> = atoms.iter().map(|a| AtomRecord::new(a, &ts)).collect();
        print_json(&records);
    } else {
        for atom in &atoms {
            println!("{}", atom.named(&ts));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Synth {
            ts,
            net_type,
            d,
            out,
            json,
            solver,
        } => synth(ts, *net_type, *d, out.as_deref(), *json, solver),
        Command::Rg { net, out } => rg(net, out.as_deref()),
        Command::Verify { ts, net, json } => verify(ts, net, *json),
        Command::Reduce {
            hs,
            construction,
            out,
            json,
        } => reduce(hs, *construction, out.as_deref(), *json),
        Command::Hs { hs: path, json } => hs(path, *json),
        Command::Roundtrip {
            hs,
            construction,
            json,
            solver,
        } => roundtrip(hs, *construction, *json, solver),
        Command::Atoms { ts, json } => atoms(ts, *json),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Limit(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
