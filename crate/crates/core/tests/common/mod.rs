//! Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use drsynth::{
    enumerate_atoms, parse_hs, parse_ts, HittingSetInstance, Interaction, NetType, SeparationAtom,
    TransitionSystem, TsBuilder,
};
use itertools::Itertools;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const TWO_LOOP: &str = "states s0 s1\ninitial s0\nevents a\narc s0 a s1\narc s1 a s0\n";
pub const BC_CYCLE: &str = "states r0 r1\ninitial r0\nevents b c\narc r0 b r1\narc r1 c r0\n";
pub const ABC_PATH: &str =
    "states i s1 s2 s3\ninitial i\nevents a b c\narc i a s1\narc s1 b s2\narc s2 c s3\n";
pub const TWO_PLACE_NET: &str =
    "type nop,inp,swap\ntransition a b\nplace R1 init 1\nplace R2 init 0\n\
                            flow R1 a inp\nflow R1 b nop\nflow R2 a swap\nflow R2 b inp\n";
pub const TOGGLE_NET: &str =
    "type nop,swap,used,set\ntransition a\nplace R1 init 0\nflow R1 a swap\n";
pub const FOUR_SETS_HS: &str =
    "universe X1 X2 X3 X4\nset X1 X2\nset X2 X3\nset X1 X4\nset X1 X3 X4\nkappa 2\n";

pub fn ts(text: &str) -> TransitionSystem {
    parse_ts(text).unwrap()
}

pub fn ty(list: &str) -> NetType {
    list.parse().unwrap()
}

pub fn inp_free() -> NetType {
    ty("nop,inp,free")
}

pub fn swap_used_set() -> NetType {
    ty("nop,swap,used,set")
}

/// The two example types plus the four types the gadgets are checked with.
pub fn corpus_types() -> Vec<NetType> {
    vec![
        inp_free(),
        swap_used_set(),
        ty("nop,inp,set"),
        ty("nop,set,res,free"),
        ty("nop,set,swap,used"),
        ty("nop,inp,res,swap"),
    ]
}

/// One representative per type family of the hardness construction, plus the
/// two example types.
pub fn hardness_types() -> Vec<NetType> {
    vec![
        inp_free(),
        swap_used_set(),
        ty("nop,inp,set"),
        ty("nop,out,res"),
        ty("nop,set,res,free"),
        ty("nop,set,res,swap,used"),
        ty("nop,set,swap,used"),
        ty("nop,inp,res,swap,free"),
        ty("nop,inp,res,swap"),
        ty("nop,out,set,swap"),
    ]
}

/// A random valid TS with `1..=max_states` states over at most
/// `max_events` events. Reachability comes from a random spanning tree;
/// extra arcs are added without breaking determinism.
pub fn random_ts(rng: &mut StdRng, max_states: usize, max_events: usize) -> TransitionSystem {
    let events = ["a", "b", "c", "d"];
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_events);
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut arcs = Vec::new();
    for s in 1..n {
        loop {
            let p = rng.gen_range(0..s);
            let e = rng.gen_range(0..k);
            if used.insert((p, e)) {
                arcs.push((p, e, s));
                break;
            }
        }
    }
    let extra = rng.gen_range(0..=n * k);
    for _ in 0..extra {
        let (p, e, t) = (
            rng.gen_range(0..n),
            rng.gen_range(0..k),
            rng.gen_range(0..n),
        );
        if used.insert((p, e)) {
            arcs.push((p, e, t));
        }
    }
    let mut b = TsBuilder::new();
    b.state("s0").initial("s0");
    for s in 0..n {
        b.state(format!("s{s}"));
    }
    for (p, e, t) in arcs {
        b.arc(&format!("s{p}"), events[e], &format!("s{t}"));
    }
    b.build().unwrap()
}

/// The criterion corpus: `count` random systems from a fixed seed.
pub fn corpus(count: usize) -> Vec<TransitionSystem> {
    let mut rng = StdRng::seed_from_u64(0x5eed_2024);
    (0..count).map(|_| random_ts(&mut rng, 5, 3)).collect()
}

pub type RegionKey = (Vec<bool>, Vec<Interaction>);

/// Every total `(support, signature)` pair that is edge-consistent, with at
/// most `d` restricted events. Exhaustive over `2^|S| * |type|^|E|`.
pub fn oracle_regions(ts: &TransitionSystem, net_type: NetType, d: usize) -> BTreeSet<RegionKey> {
    let members: Vec<Interaction> = net_type.members().collect();
    let (n, k) = (ts.num_states(), ts.num_events());
    let mut out = BTreeSet::new();
    let total_sigs = members.len().pow(k as u32);
    for code in 0..total_sigs {
        let mut c = code;
        let sig: Vec<Interaction> = (0..k)
            .map(|_| {
                let i = members[c % members.len()];
                c /= members.len();
                i
            })
            .collect();
        if sig.iter().filter(|&&i| i != Interaction::Nop).count() > d {
            continue;
        }
        for bits in 0..1u32 << n {
            let support: Vec<bool> = (0..n).map(|s| bits >> s & 1 == 1).collect();
            let consistent = ts
                .edges()
                .iter()
                .all(|e| sig[e.event].apply(support[e.source]) == Some(support[e.target]));
            if consistent {
                out.insert((support, sig.clone()));
            }
        }
    }
    out
}

pub fn key_solves(key: &RegionKey, atom: &SeparationAtom) -> bool {
    match *atom {
        SeparationAtom::States(s, t) => key.0[s] != key.0[t],
        SeparationAtom::EventState(e, s) => key.1[e].apply(key.0[s]).is_none(),
    }
}

/// Reference decision: the atoms no oracle region solves.
pub fn reference_unsolved(
    ts: &TransitionSystem,
    net_type: NetType,
    d: usize,
) -> Vec<SeparationAtom> {
    let regions = oracle_regions(ts, net_type, d);
    enumerate_atoms(ts)
        .into_iter()
        .filter(|a| !regions.iter().any(|r| key_solves(r, a)))
        .collect()
}

pub fn four_sets() -> HittingSetInstance {
    parse_hs(FOUR_SETS_HS).unwrap()
}

/// Every instance with at most 3 elements, at most 3 distinct sets of size
/// 1 or 2, and `kappa` in `0..=2`.
pub fn small_instances() -> Vec<HittingSetInstance> {
    let mut out = Vec::new();
    for n in 0..=3usize {
        let universe: Vec<String> = (1..=n).map(|i| format!("X{i}")).collect();
        let subsets: Vec<Vec<usize>> = (1..=2).flat_map(|s| (0..n).combinations(s)).collect();
        for m in 0..=3 {
            for family in subsets.iter().cloned().combinations(m) {
                for kappa in 0..=2 {
                    out.push(
                        HittingSetInstance::new(universe.clone(), family.clone(), kappa).unwrap(),
                    );
                }
            }
        }
    }
    out
}
