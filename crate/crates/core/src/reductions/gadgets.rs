//! Gadget transition systems for the four constructions.
//!
//! Names: states `bot{i}`, `t{i}_{j}`, `h{g}_{j}` (plain `h{j}` for the
//! single gadget of 2.1), `s{i}_{j}_{g}_{l}` and `q{i}`; events are the
//! universe elements plus `k`, `z`, `z1`..`z4`, `o`, `o1`, `o2`, `w{i}`,
//! `sep{i}`, `a{i}_{l}`, `v{i}_{j}_{n}`, `plus{i}_{j}_{n}`, `c{i}_{n}`, `u{i}`.
//! Indices are 1-based where the construction counts sets.

use crate::region::SeparationAtom;
use crate::ts::TsBuilder;

use super::{Construction, GadgetOutput, HittingSetInstance};

fn bot(i: usize) -> String {
    format!("bot{i}")
}

fn t(i: usize, j: usize) -> String {
    format!("t{i}_{j}")
}

fn h(g: usize, j: usize) -> String {
    format!("h{g}_{j}")
}

fn w(i: usize) -> String {
    format!("w{i}")
}

fn sep(i: usize) -> String {
    format!("sep{i}")
}

/// Adds `states[0] -events[0]-> states[1] -events[1]-> ...`.
fn chain(b: &mut TsBuilder, states: &[String], events: &[String]) {
    assert_eq!(states.len(), events.len() + 1);
    for (k, e) in events.iter().enumerate() {
        b.arc(&states[k], e, &states[k + 1]);
    }
}

/// Like [`chain`], with the self-loop `s' -e-> s'` after every edge.
fn looped_chain(b: &mut TsBuilder, states: &[String], events: &[String]) {
    chain(b, states, events);
    for (k, e) in events.iter().enumerate() {
        b.arc(&states[k + 1], e, &states[k + 1]);
    }
}

fn owned(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn finish(
    b: &TsBuilder,
    inst: &HittingSetInstance,
    construction: Construction,
    alpha: (&str, &str),
) -> GadgetOutput {
    let ts = b.build().expect("gadget construction yields a valid TS");
    let alpha = SeparationAtom::by_name(&ts, "ESSP", alpha.0, alpha.1)
        .expect("key atom is an ESSP atom of the gadget");
    GadgetOutput {
        d: construction.budget(inst.kappa()),
        ts,
        alpha,
        construction,
    }
}

/// Budget `kappa + 2`, key atom `(k, h2)`.
pub fn build_inp_set(inst: &HittingSetInstance) -> GadgetOutput {
    let m = inst.family().len();
    let mut b = TsBuilder::new();
    b.state(bot(1)).initial(&bot(1));
    for i in 1..=m {
        b.arc(&bot(i), &sep(i), &bot(i + 1));
    }
    let hs: Vec<String> = (0..5).map(|j| format!("h{j}")).collect();
    let mut states = vec![bot(m + 1)];
    states.extend(hs);
    chain(
        &mut b,
        &states,
        &[w(m + 1), "k".into(), "z".into(), "o".into(), "k".into()],
    );
    for i in 1..=m {
        let xs = inst.set_names(i - 1);
        let states: Vec<String> = std::iter::once(bot(i))
            .chain((0..xs.len() + 4).map(|j| t(i, j)))
            .collect();
        let mut events = vec![w(i), "k".to_string()];
        events.extend(owned(&xs));
        events.extend(owned(&["z", "k"]));
        chain(&mut b, &states[..], &events);
    }
    finish(&b, inst, Construction::InpSet, ("k", "h2"))
}

/// Budget `kappa + 4`, key atom `(k, h1_2)`. Every edge carries a self-loop
/// with the same event at its target.
pub fn build_set_res_free(inst: &HittingSetInstance) -> GadgetOutput {
    let m = inst.family().len();
    let mut b = TsBuilder::new();
    b.state(bot(1)).initial(&bot(1));
    for i in 1..=m + 2 {
        looped_chain(&mut b, &[bot(i), bot(i + 1)], &[sep(i)]);
    }
    let gadget = |g: usize, len: usize, base: usize| -> Vec<String> {
        std::iter::once(bot(base))
            .chain((0..len).map(|j| h(g, j)))
            .collect()
    };
    looped_chain(
        &mut b,
        &gadget(1, 5, m + 1),
        &[w(m + 1), "k".into(), "o1".into(), "o2".into(), "k".into()],
    );
    looped_chain(
        &mut b,
        &gadget(2, 3, m + 2),
        &[w(m + 2), "k".into(), "z1".into()],
    );
    b.arc(&h(2, 2), "o1", &h(2, 2));
    looped_chain(&mut b, &gadget(3, 1, m + 3), &[w(m + 3)]);
    b.arc(&h(3, 0), "o1", &h(3, 0));
    b.arc(&h(3, 0), "z2", &h(3, 0));
    for i in 1..=m {
        let xs = inst.set_names(i - 1);
        let states: Vec<String> = std::iter::once(bot(i))
            .chain((0..xs.len() + 5).map(|j| t(i, j)))
            .collect();
        let mut events = owned(&["k", "z1"]);
        events.insert(0, w(i));
        events.extend(owned(&xs));
        events.extend(owned(&["z2", "k"]));
        looped_chain(&mut b, &states, &events);
    }
    finish(&b, inst, Construction::SetResFree, ("k", "h1_2"))
}

/// Budget `kappa + 4`, key atom `(k, h0_3)`. Edges are bidirectional except
/// the first `X` edge of every block `a X X a`.
pub fn build_set_swap_used(inst: &HittingSetInstance) -> GadgetOutput {
    let m = inst.family().len();
    let mut b = TsBuilder::new();
    b.state(bot(1)).initial(&bot(1));
    for i in 1..=m + 1 {
        b.biarc(&bot(i), &sep(i), &bot(i + 1));
    }
    let both = |b: &mut TsBuilder, states: &[String], events: &[String]| {
        for (k, e) in events.iter().enumerate() {
            b.biarc(&states[k], e, &states[k + 1]);
        }
    };
    let h0: Vec<String> = std::iter::once(bot(m + 1))
        .chain((1..=5).map(|j| h(0, j)))
        .collect();
    both(
        &mut b,
        &h0,
        &[w(m + 1), "k".into(), "o1".into(), "o2".into(), "k".into()],
    );
    let h1: Vec<String> = std::iter::once(bot(m + 2))
        .chain((1..=6).map(|j| h(1, j)))
        .collect();
    both(
        &mut b,
        &h1,
        &[
            w(m + 2),
            "k".into(),
            "z1".into(),
            "o1".into(),
            "z2".into(),
            "k".into(),
        ],
    );
    for i in 1..=m {
        let xs = inst.set_names(i - 1);
        both(
            &mut b,
            &[bot(i), t(i, 0), t(i, 1), t(i, 2)],
            &[w(i), "k".into(), "z1".into()],
        );
        for (l, x) in xs.iter().enumerate() {
            let l = l + 1;
            let a = format!("a{i}_{l}");
            b.biarc(&t(i, 4 * l - 2), &a, &t(i, 4 * l - 1));
            b.arc(&t(i, 4 * l - 1), x, &t(i, 4 * l));
            b.biarc(&t(i, 4 * l), x, &t(i, 4 * l + 1));
            b.biarc(&t(i, 4 * l + 1), &a, &t(i, 4 * l + 2));
        }
        let end = 4 * xs.len() + 2;
        both(
            &mut b,
            &[t(i, end), t(i, end + 1), t(i, end + 2)],
            &owned(&["z2", "k"]),
        );
    }
    finish(&b, inst, Construction::SetSwapUsed, ("k", "h0_3"))
}

/// One path of the pyramid that lets gadget `gadget` keep the events of
/// set `source` separable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevantPath {
    /// Set whose event sequence the path comes from (1-based).
    pub source: usize,
    /// Position of the event in that sequence (1-based, at least 2).
    pub position: usize,
    /// Gadget the path is placed in (1-based).
    pub gadget: usize,
    /// Rank of `gadget` among all gadgets the event is relevant for.
    pub rank: usize,
    pub states: Vec<String>,
    pub events: Vec<String>,
}

/// All relevant paths, ordered by `(source, position, rank)`.
///
/// Set `i` has the event sequence `X_{i_1}, ..., X_{i_{m_i}}, z4`. Its event
/// at position `j >= 2` is relevant for every other gadget that contains it
/// but not its predecessor.
pub fn relevant_paths(inst: &HittingSetInstance) -> Vec<RelevantPath> {
    let m = inst.family().len();
    let sequence = |i: usize| -> Vec<&str> {
        let mut seq = inst.set_names(i - 1);
        seq.push("z4");
        seq
    };
    // events of T_i other than k and z3
    let contains = |i: usize, e: &str| e == "z4" || inst.set_names(i - 1).contains(&e);
    let mut out = Vec::new();
    for i in 1..=m {
        let seq = sequence(i);
        for j in 2..=seq.len() {
            let (e, prev) = (seq[j - 1], seq[j - 2]);
            let gadgets = (1..=m).filter(|&g| g != i && contains(g, e) && !contains(g, prev));
            for (rank, g) in gadgets.enumerate() {
                let n = rank + 1;
                let states = (0..=n + 1).map(|l| format!("s{i}_{j}_{g}_{l}")).collect();
                let mut events = vec![format!("v{i}_{j}_{n}")];
                events.extend((1..=n).rev().map(|p| format!("plus{i}_{j}_{p}")));
                out.push(RelevantPath {
                    source: i,
                    position: j,
                    gadget: g,
                    rank: n,
                    states,
                    events,
                });
            }
        }
    }
    out
}

/// Budget `kappa + 4`, key atom `(k, h0_2)`.
pub fn build_inp_res_swap(inst: &HittingSetInstance) -> GadgetOutput {
    let m = inst.family().len();
    let mut b = TsBuilder::new();
    b.state(bot(1)).initial(&bot(1));
    for i in 1..=m + 4 {
        b.arc(&bot(i), &sep(i), &bot(i + 1));
    }
    let hs: [&[&str]; 5] = [
        &["k", "o1", "o2", "k"],
        &["k", "z1", "o2", "k"],
        &["k", "z2", "o2", "k"],
        &["k", "z1", "z3", "z2", "k"],
        &["k", "z1", "z4", "z2", "k"],
    ];
    for (g, events) in hs.iter().enumerate() {
        let states: Vec<String> = std::iter::once(bot(m + 1 + g))
            .chain((0..=events.len()).map(|j| h(g, j)))
            .collect();
        let mut evs = vec![w(m + 1 + g)];
        evs.extend(owned(events));
        chain(&mut b, &states, &evs);
    }
    let paths = relevant_paths(inst);
    for i in 1..=m {
        let mut here: Vec<&RelevantPath> = paths.iter().filter(|p| p.gadget == i).collect();
        here.sort_by_key(|p| (p.source, p.position));
        if here.is_empty() {
            let q = format!("q{i}");
            chain(
                &mut b,
                &[bot(i), q.clone(), t(i, 0)],
                &[w(i), format!("u{i}")],
            );
        } else {
            b.arc(&bot(i), &w(i), &here[0].states[0]);
            for (r, p) in here.iter().enumerate() {
                chain(&mut b, &p.states, &p.events);
                let last = p.states.last().unwrap();
                match here.get(r + 1) {
                    Some(next) => b.arc(last, &format!("c{i}_{}", r + 1), &next.states[0]),
                    None => b.arc(last, &format!("u{i}"), &t(i, 0)),
                };
            }
        }
        let xs = inst.set_names(i - 1);
        let states: Vec<String> = (0..xs.len() + 5).map(|j| t(i, j)).collect();
        let mut events = owned(&["k", "z3"]);
        events.extend(owned(&xs));
        events.extend(owned(&["z4", "k"]));
        chain(&mut b, &states, &events);
    }
    finish(&b, inst, Construction::InpResSwap, ("k", "h0_2"))
}

pub fn build_gadget(inst: &HittingSetInstance, construction: Construction) -> GadgetOutput {
    match construction {
        Construction::InpSet => build_inp_set(inst),
        Construction::SetResFree => build_set_res_free(inst),
        Construction::SetSwapUsed => build_set_swap_used(inst),
        Construction::InpResSwap => build_inp_res_swap(inst),
    }
}
