//! Deciding d-restricted synthesis: find, for every separation atom, a
//! region with at most `d` restricted events that solves it.

mod enumerate;
mod guided;

use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::interaction::{Interaction, NetType};
use crate::region::{enumerate_atoms, AtomRecord, Region, SeparationAtom, SpanningTree};
use crate::ts::TransitionSystem;

pub use enumerate::{enumerate_d_restricted_regions, seed_count, RegionStream};

use guided::{Guided, LimitReached};

/// Closed-form seed count up to which [`Strategy::Auto`] uses seed order.
pub const AUTO_SEED_THRESHOLD: u128 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("type {net_type} has no nop, so every one of the {events} events is restricted, but d = {d}")]
    BudgetBelowEvents {
        net_type: NetType,
        events: usize,
        d: usize,
    },
    #[error("atom is not an atom of this transition system")]
    ForeignAtom,
    #[error("search limit of {limit} exceeded")]
    SeedLimit { limit: u64 },
}

#[derive(Debug, Clone)]
pub struct SynthesisProblem {
    ts: TransitionSystem,
    net_type: NetType,
    d: usize,
}

impl SynthesisProblem {
    pub fn new(ts: TransitionSystem, net_type: NetType, d: usize) -> Result<Self, SolverError> {
        if !net_type.has_nop() && d < ts.num_events() {
            return Err(SolverError::BudgetBelowEvents {
                net_type,
                events: ts.num_events(),
                d,
            });
        }
        Ok(SynthesisProblem { ts, net_type, d })
    }

    pub fn ts(&self) -> &TransitionSystem {
        &self.ts
    }

    pub fn net_type(&self) -> NetType {
        self.net_type
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Seeds a full seed-order pass would visit.
    pub fn seed_count(&self) -> u128 {
        seed_count(self.ts.num_events(), self.net_type, self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Seed order when the closed-form count is small, guided otherwise.
    #[default]
    Auto,
    /// First solving region per atom in seed order.
    SeedOrder,
    /// Backtracking search per atom, reusing regions already selected.
    Guided,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SynthesisOptions {
    pub strategy: Strategy,
    /// Seeds (seed order) or search nodes (guided) after which to give up.
    pub seed_limit: Option<u64>,
    /// Worker threads for seed order; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl SynthesisOptions {
    fn resolve(&self, problem: &SynthesisProblem) -> Strategy {
        match self.strategy {
            Strategy::Auto if problem.seed_count() <= AUTO_SEED_THRESHOLD => Strategy::SeedOrder,
            Strategy::Auto => Strategy::Guided,
            s => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Solvable,
    Unsolvable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SolverStats {
    /// Seeds visited (seed order) or search nodes expanded (guided).
    pub seeds_tried: u64,
    pub valid_regions: u64,
    #[serde(serialize_with = "as_seconds")]
    pub elapsed: Duration,
}

fn as_seconds<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub verdict: Verdict,
    pub strategy: Strategy,
    pub admissible: Vec<Region>,
    pub unsolved_atoms: Vec<SeparationAtom>,
    pub stats: SolverStats,
}

impl SynthesisResult {
    pub fn is_solvable(&self) -> bool {
        self.verdict == Verdict::Solvable
    }

    /// Machine-readable summary with names resolved against `ts`.
    pub fn report(&self, ts: &TransitionSystem) -> SynthesisReport {
        SynthesisReport {
            verdict: self.verdict,
            strategy: self.strategy,
            regions: self
                .admissible
                .iter()
                .map(|r| RegionRecord::new(r, ts))
                .collect(),
            unsolved_atoms: self
                .unsolved_atoms
                .iter()
                .map(|a| AtomRecord::new(a, ts))
                .collect(),
            stats: self.stats,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionRecord {
    pub signature: Vec<(String, Interaction)>,
    pub support: Vec<(String, u8)>,
}

impl RegionRecord {
    pub fn new(region: &Region, ts: &TransitionSystem) -> Self {
        RegionRecord {
            signature: region
                .signature()
                .iter()
                .enumerate()
                .map(|(e, &i)| (ts.event_name(e).to_string(), i))
                .collect(),
            support: region
                .support()
                .iter()
                .enumerate()
                .map(|(s, &b)| (ts.state_name(s).to_string(), b as u8))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisReport {
    pub verdict: Verdict,
    pub strategy: Strategy,
    pub regions: Vec<RegionRecord>,
    pub unsolved_atoms: Vec<AtomRecord>,
    pub stats: SolverStats,
}

/// Synthesis with default options.
pub fn synthesize(problem: &SynthesisProblem) -> Result<SynthesisResult, SolverError> {
    synthesize_with(problem, &SynthesisOptions::default())
}

pub fn synthesize_with(
    problem: &SynthesisProblem,
    options: &SynthesisOptions,
) -> Result<SynthesisResult, SolverError> {
    let start = Instant::now();
    let atoms = enumerate_atoms(&problem.ts);
    let strategy = options.resolve(problem);
    let (hits, mut stats) = match strategy {
        Strategy::Guided => guided_pass(problem, &atoms, options.seed_limit)?,
        _ => in_pool(options.threads, || {
            seed_order_pass(problem, &atoms, options.seed_limit)
        })?,
    };
    stats.elapsed = start.elapsed();
    let mut admissible: Vec<Region> = Vec::new();
    let mut unsolved_atoms = Vec::new();
    for (atom, hit) in atoms.iter().zip(hits) {
        match hit {
            Some(region) => {
                if !admissible.contains(&region) {
                    admissible.push(region);
                }
            }
            None => unsolved_atoms.push(*atom),
        }
    }
    let verdict = if unsolved_atoms.is_empty() {
        Verdict::Solvable
    } else {
        admissible.clear();
        Verdict::Unsolvable
    };
    debug_assert!(admissible
        .iter()
        .all(|r| r.restriction_count() <= problem.d));
    Ok(SynthesisResult {
        verdict,
        strategy,
        admissible,
        unsolved_atoms,
        stats,
    })
}

/// The first region solving `atom`, in seed order or by guided search.
pub fn solve_single_atom(
    problem: &SynthesisProblem,
    atom: &SeparationAtom,
    options: &SynthesisOptions,
) -> Result<Option<Region>, SolverError> {
    if !atom.is_atom_of(&problem.ts) {
        return Err(SolverError::ForeignAtom);
    }
    match options.resolve(problem) {
        Strategy::Guided => {
            let mut g = Guided::new(&problem.ts, problem.net_type, problem.d, options.seed_limit);
            g.solve(atom)
                .map_err(|LimitReached| SolverError::SeedLimit {
                    limit: options.seed_limit.unwrap_or(0),
                })
        }
        _ => {
            let (hits, _) = in_pool(options.threads, || {
                seed_order_pass(problem, std::slice::from_ref(atom), options.seed_limit)
            })?;
            Ok(hits.into_iter().next().flatten())
        }
    }
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

fn guided_pass(
    problem: &SynthesisProblem,
    atoms: &[SeparationAtom],
    limit: Option<u64>,
) -> Result<(Vec<Option<Region>>, SolverStats), SolverError> {
    let mut g = Guided::new(&problem.ts, problem.net_type, problem.d, limit);
    let mut selected: Vec<Region> = Vec::new();
    let mut hits = Vec::with_capacity(atoms.len());
    for atom in atoms {
        if let Some(r) = selected.iter().find(|r| r.solves(atom)) {
            hits.push(Some(r.clone()));
            continue;
        }
        let found = g
            .solve(atom)
            .map_err(|LimitReached| SolverError::SeedLimit {
                limit: limit.unwrap_or(0),
            })?;
        if let Some(r) = &found {
            selected.push(r.clone());
        }
        hits.push(found);
    }
    let stats = SolverStats {
        seeds_tried: g.nodes,
        valid_regions: selected.len() as u64,
        elapsed: Duration::ZERO,
    };
    Ok((hits, stats))
}

/// First hit per atom inside some range of seeds: `(seed index, region)`.
type Hits = Vec<Option<(u64, Region)>>;

fn merge(mut a: Hits, b: Hits) -> Hits {
    for (x, y) in a.iter_mut().zip(b) {
        if let Some(y) = y {
            if x.as_ref().is_none_or(|x| y.0 < x.0) {
                *x = Some(y);
            }
        }
    }
    a
}

/// One pass over the seed stream recording, per atom, the region at the
/// smallest seed index that solves it. This equals restarting the stream for
/// every atom. Subsets are processed in waves of growing size; within a wave
/// blocks run in parallel and are merged by minimum seed index.
fn seed_order_pass(
    problem: &SynthesisProblem,
    atoms: &[SeparationAtom],
    limit: Option<u64>,
) -> Result<(Vec<Option<Region>>, SolverStats), SolverError> {
    let ts = &problem.ts;
    let net_type = problem.net_type;
    let tree = SpanningTree::new(ts);
    let choices = net_type.non_nop();
    let fill = if net_type.has_nop() {
        Interaction::Nop
    } else {
        choices[0]
    };
    let base = vec![fill; ts.num_events()];
    let mut best: Hits = vec![None; atoms.len()];
    let mut open: Vec<usize> = (0..atoms.len()).collect();
    let mut seeds = 0u64;
    let mut valid = 0u64;
    let mut wave_size = 1usize;

    'levels: for level in enumerate::levels(ts.num_events(), net_type, problem.d) {
        if level > 0 && choices.is_empty() {
            break;
        }
        let block = enumerate::block_len(choices.len(), level);
        let mut combos = (0..ts.num_events()).combinations(level).peekable();
        while combos.peek().is_some() {
            if open.is_empty() {
                break 'levels;
            }
            if limit.is_some_and(|l| seeds >= l) {
                return Err(SolverError::SeedLimit {
                    limit: limit.unwrap(),
                });
            }
            let wave: Vec<(u64, Vec<usize>)> = combos
                .by_ref()
                .take(wave_size)
                .enumerate()
                .map(|(k, subset)| (seeds + k as u64 * block, subset))
                .collect();
            wave_size = (wave_size * 2).min(4096);
            let open_atoms: Vec<SeparationAtom> = open.iter().map(|&a| atoms[a]).collect();
            let (found, wave_valid) = wave
                .par_iter()
                .fold(
                    || (vec![None; open_atoms.len()], 0u64),
                    |(mut acc, mut count): (Hits, u64), (start, subset)| {
                        let mut support = vec![false; ts.num_states()];
                        scan_block_limited(
                            &tree,
                            &choices,
                            &base,
                            subset,
                            &mut support,
                            *start,
                            limit,
                            |index, sig, support| {
                                count += 1;
                                let mut region: Option<Region> = None;
                                for (slot, atom) in acc.iter_mut().zip(&open_atoms) {
                                    if slot.is_some() || !solves_raw(atom, sig, support) {
                                        continue;
                                    }
                                    let r = region.get_or_insert_with(|| {
                                        Region::from_parts_unchecked(
                                            net_type,
                                            support.to_vec(),
                                            sig.to_vec(),
                                        )
                                    });
                                    *slot = Some((index, r.clone()));
                                }
                            },
                        );
                        (acc, count)
                    },
                )
                .reduce(
                    || (vec![None; open_atoms.len()], 0u64),
                    |(a, ca), (b, cb)| (merge(a, b), ca + cb),
                );
            let wave_seeds = wave.len() as u64 * block;
            let truncated = limit.is_some_and(|l| seeds + wave_seeds > l);
            seeds = match limit {
                Some(l) => (seeds + wave_seeds).min(l),
                None => seeds + wave_seeds,
            };
            valid += wave_valid;
            for (&a, hit) in open.iter().zip(found) {
                best[a] = hit;
            }
            open.retain(|&a| best[a].is_none());
            if truncated && !open.is_empty() {
                return Err(SolverError::SeedLimit {
                    limit: limit.unwrap(),
                });
            }
        }
    }
    let stats = SolverStats {
        seeds_tried: seeds,
        valid_regions: valid,
        elapsed: Duration::ZERO,
    };
    Ok((best.into_iter().map(|h| h.map(|(_, r)| r)).collect(), stats))
}

#[allow(clippy::too_many_arguments)]
fn scan_block_limited<F>(
    tree: &SpanningTree,
    choices: &[Interaction],
    base: &[Interaction],
    subset: &[usize],
    support: &mut [bool],
    start: u64,
    limit: Option<u64>,
    mut visit: F,
) where
    F: FnMut(u64, &[Interaction], &[bool]),
{
    if limit.is_some_and(|l| start >= l) {
        return;
    }
    enumerate::scan_block(tree, choices, base, subset, support, |offset, sig, sup| {
        let index = start + offset;
        if limit.is_none_or(|l| index < l) {
            visit(index, sig, sup);
        }
    });
}

fn solves_raw(atom: &SeparationAtom, sig: &[Interaction], support: &[bool]) -> bool {
    match *atom {
        SeparationAtom::States(s, t) => support[s] != support[t],
        SeparationAtom::EventState(e, s) => sig[e].apply(support[s]).is_none(),
    }
}
