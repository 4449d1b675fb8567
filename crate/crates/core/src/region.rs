//! Regions of a transition system: the TS-side image of a net place.
//!
//! A region is fully determined by the support bit at the initial state and
//! the signature, since every type is deterministic. [`region_from_seed`]
//! rebuilds the support along a breadth-first spanning tree and then checks
//! every remaining edge.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};
use std::hash::{Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

use crate::interaction::{Interaction, NetType};
use crate::ts::{Edge, TransitionSystem};

/// Breadth-first spanning tree rooted at the initial state. Successors are
/// explored in event order, so the tree is deterministic.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    parent: Vec<Option<(usize, usize)>>,
    order: Vec<usize>,
    non_tree: Vec<Edge>,
}

impl SpanningTree {
    pub fn new(ts: &TransitionSystem) -> Self {
        let n = ts.num_states();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut tree_edges = Vec::with_capacity(n.saturating_sub(1));
        let mut queue = VecDeque::from([ts.initial()]);
        seen[ts.initial()] = true;
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for e in 0..ts.num_events() {
                if let Some(t) = ts.delta(s, e) {
                    if !seen[t] {
                        seen[t] = true;
                        parent[t] = Some((s, e));
                        tree_edges.push(Edge {
                            source: s,
                            event: e,
                            target: t,
                        });
                        queue.push_back(t);
                    }
                }
            }
        }
        tree_edges.sort();
        let non_tree = ts
            .edges()
            .iter()
            .filter(|edge| tree_edges.binary_search(edge).is_err())
            .copied()
            .collect();
        SpanningTree {
            parent,
            order,
            non_tree,
        }
    }

    /// Tree predecessor `(parent state, event)`; `None` for the root.
    pub fn parent(&self, state: usize) -> Option<(usize, usize)> {
        self.parent[state]
    }

    /// States in breadth-first order, root first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn num_edges(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }

    /// Edges of the TS that are not tree edges.
    pub fn non_tree_edges(&self) -> &[Edge] {
        &self.non_tree
    }
}

/// Propagates `sup_init` down the tree into `support` and checks the
/// non-tree edges. Returns `false` as soon as an interaction is undefined or
/// an edge disagrees.
pub(crate) fn fill_support(
    tree: &SpanningTree,
    sup_init: bool,
    sig: &[Interaction],
    support: &mut [bool],
) -> bool {
    let mut order = tree.order.iter();
    let root = *order.next().expect("a TS has at least one state");
    support[root] = sup_init;
    for &s in order {
        let (p, e) = tree.parent[s].unwrap();
        match sig[e].apply(support[p]) {
            Some(x) => support[s] = x,
            None => return false,
        }
    }
    tree.non_tree
        .iter()
        .all(|edge| sig[edge.event].apply(support[edge.source]) == Some(support[edge.target]))
}

/// A region `(support, signature)` of a specific TS and type.
///
/// Equality and hashing look at support and signature only.
#[derive(Debug, Clone)]
pub struct Region {
    net_type: NetType,
    support: Vec<bool>,
    signature: Vec<Interaction>,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.support == other.support && self.signature == other.signature
    }
}

impl Eq for Region {}

impl Hash for Region {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.support.hash(state);
        self.signature.hash(state);
    }
}

impl Region {
    pub(crate) fn from_parts_unchecked(
        net_type: NetType,
        support: Vec<bool>,
        signature: Vec<Interaction>,
    ) -> Self {
        Region {
            net_type,
            support,
            signature,
        }
    }

    pub fn net_type(&self) -> NetType {
        self.net_type
    }

    pub fn support(&self) -> &[bool] {
        &self.support
    }

    pub fn signature(&self) -> &[Interaction] {
        &self.signature
    }

    pub fn sup(&self, state: usize) -> bool {
        self.support[state]
    }

    pub fn sig(&self, event: usize) -> Interaction {
        self.signature[event]
    }

    /// Number of events whose signature is not `nop`.
    pub fn restriction_count(&self) -> usize {
        restriction_count(&self.signature)
    }

    pub fn solves(&self, atom: &SeparationAtom) -> bool {
        match *atom {
            SeparationAtom::States(s, t) => self.support[s] != self.support[t],
            SeparationAtom::EventState(e, s) => self.signature[e].apply(self.support[s]).is_none(),
        }
    }

    pub fn to_raw(&self) -> RawRegion {
        RawRegion {
            support: self.support.clone(),
            signature: self.signature.clone(),
        }
    }

    pub fn to_text(&self, ts: &TransitionSystem) -> String {
        self.to_raw().to_text(ts)
    }
}

pub fn restriction_count(signature: &[Interaction]) -> usize {
    signature.iter().filter(|&&i| i != Interaction::Nop).count()
}

/// Builds the region implied by `sup_init` and `sig`, or `None` if the seed
/// does not describe a region of `ts`.
pub fn region_from_seed(
    ts: &TransitionSystem,
    net_type: NetType,
    sup_init: bool,
    sig: &[Interaction],
    tree: &SpanningTree,
) -> Option<Region> {
    if sig.len() != ts.num_events() || !sig.iter().all(|&i| net_type.contains(i)) {
        return None;
    }
    let mut support = vec![false; ts.num_states()];
    fill_support(tree, sup_init, sig, &mut support)
        .then(|| Region::from_parts_unchecked(net_type, support, sig.to_vec()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegionDefect {
    #[error(
        "region covers {states} states and {events} events, the TS has {ts_states} and {ts_events}"
    )]
    Shape {
        states: usize,
        events: usize,
        ts_states: usize,
        ts_events: usize,
    },
    #[error("signature of `{event}` is `{interaction}`, which is not in the type")]
    NotAMember {
        event: String,
        interaction: Interaction,
    },
    #[error("edge {from} --{event}--> {target} is not mapped to an edge of the type")]
    Inconsistent {
        from: String,
        event: String,
        target: String,
    },
}

/// An unvalidated `(support, signature)` pair, e.g. read from a file.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RawRegion {
    pub support: Vec<bool>,
    pub signature: Vec<Interaction>,
}

impl RawRegion {
    /// Validates against `ts` and `net_type`, reporting the first defect.
    pub fn check(&self, ts: &TransitionSystem, net_type: NetType) -> Result<Region, RegionDefect> {
        if self.support.len() != ts.num_states() || self.signature.len() != ts.num_events() {
            return Err(RegionDefect::Shape {
                states: self.support.len(),
                events: self.signature.len(),
                ts_states: ts.num_states(),
                ts_events: ts.num_events(),
            });
        }
        if let Some((e, &i)) = self
            .signature
            .iter()
            .enumerate()
            .find(|(_, &i)| !net_type.contains(i))
        {
            return Err(RegionDefect::NotAMember {
                event: ts.event_name(e).to_string(),
                interaction: i,
            });
        }
        if let Some(edge) = ts.edges().iter().find(|edge| {
            self.signature[edge.event].apply(self.support[edge.source])
                != Some(self.support[edge.target])
        }) {
            return Err(RegionDefect::Inconsistent {
                from: ts.state_name(edge.source).to_string(),
                event: ts.event_name(edge.event).to_string(),
                target: ts.state_name(edge.target).to_string(),
            });
        }
        Ok(Region::from_parts_unchecked(
            net_type,
            self.support.clone(),
            self.signature.clone(),
        ))
    }

    /// `sig <event> <interaction>` lines followed by `sup <state> <0|1>` lines.
    pub fn to_text(&self, ts: &TransitionSystem) -> String {
        let mut out = String::new();
        for (e, i) in self.signature.iter().enumerate() {
            writeln!(out, "sig {} {}", ts.event_name(e), i).unwrap();
        }
        for (s, &b) in self.support.iter().enumerate() {
            writeln!(out, "sup {} {}", ts.state_name(s), b as u8).unwrap();
        }
        out
    }

    /// Parses the format written by [`RawRegion::to_text`]. Every state and
    /// every event of `ts` must be assigned exactly once.
    pub fn parse(text: &str, ts: &TransitionSystem) -> Result<RawRegion, String> {
        let mut support: Vec<Option<bool>> = vec![None; ts.num_states()];
        let mut signature: Vec<Option<Interaction>> = vec![None; ts.num_events()];
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let tokens: Vec<&str> = raw
                .split('#')
                .next()
                .unwrap_or("")
                .split_whitespace()
                .collect();
            match tokens.as_slice() {
                [] => {}
                ["sig", e, i] => {
                    let e = ts
                        .event_index(e)
                        .ok_or_else(|| format!("line {line}: unknown event `{e}`"))?;
                    let i = i.parse().map_err(|err| format!("line {line}: {err}"))?;
                    if signature[e].replace(i).is_some() {
                        return Err(format!("line {line}: event assigned twice"));
                    }
                }
                ["sup", s, b] => {
                    let s = ts
                        .state_index(s)
                        .ok_or_else(|| format!("line {line}: unknown state `{s}`"))?;
                    let b = match *b {
                        "0" => false,
                        "1" => true,
                        other => return Err(format!("line {line}: `{other}` is not a bit")),
                    };
                    if support[s].replace(b).is_some() {
                        return Err(format!("line {line}: state assigned twice"));
                    }
                }
                _ => return Err(format!("line {line}: expected `sig` or `sup` entry")),
            }
        }
        let support = support
            .into_iter()
            .enumerate()
            .map(|(s, b)| b.ok_or_else(|| format!("no support for `{}`", ts.state_name(s))))
            .collect::<Result<_, _>>()?;
        let signature = signature
            .into_iter()
            .enumerate()
            .map(|(e, i)| i.ok_or_else(|| format!("no signature for `{}`", ts.event_name(e))))
            .collect::<Result<_, _>>()?;
        Ok(RawRegion { support, signature })
    }
}

/// A separation atom. States pairs are stored with the smaller index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeparationAtom {
    /// Two distinct states that must receive different support.
    States(usize, usize),
    /// `(event, state)` where the event does not occur at the state.
    EventState(usize, usize),
}

impl SeparationAtom {
    pub fn ssp(a: usize, b: usize) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(SeparationAtom::States(a, b)),
            std::cmp::Ordering::Greater => Some(SeparationAtom::States(b, a)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn essp(ts: &TransitionSystem, event: usize, state: usize) -> Option<Self> {
        (event < ts.num_events() && state < ts.num_states() && !ts.occurs(state, event))
            .then_some(SeparationAtom::EventState(event, state))
    }

    /// Looks up an atom by names, e.g. `("SSP", "s0", "s1")` or `("ESSP", "k", "h2")`.
    pub fn by_name(ts: &TransitionSystem, kind: &str, a: &str, b: &str) -> Option<Self> {
        match kind {
            "SSP" => SeparationAtom::ssp(ts.state_index(a)?, ts.state_index(b)?),
            "ESSP" => SeparationAtom::essp(ts, ts.event_index(a)?, ts.state_index(b)?),
            _ => None,
        }
    }

    pub fn is_atom_of(&self, ts: &TransitionSystem) -> bool {
        match *self {
            SeparationAtom::States(a, b) => a < b && b < ts.num_states(),
            SeparationAtom::EventState(e, s) => SeparationAtom::essp(ts, e, s).is_some(),
        }
    }

    pub fn named<'a>(&'a self, ts: &'a TransitionSystem) -> NamedAtom<'a> {
        NamedAtom { atom: self, ts }
    }
}

/// Display adapter printing `SSP s s'` or `ESSP e s`.
pub struct NamedAtom<'a> {
    atom: &'a SeparationAtom,
    ts: &'a TransitionSystem,
}

impl fmt::Display for NamedAtom<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self.atom {
            SeparationAtom::States(a, b) => {
                write!(f, "SSP {} {}", self.ts.state_name(a), self.ts.state_name(b))
            }
            SeparationAtom::EventState(e, s) => {
                write!(
                    f,
                    "ESSP {} {}",
                    self.ts.event_name(e),
                    self.ts.state_name(s)
                )
            }
        }
    }
}

/// Serializable view of an atom by names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomRecord {
    pub kind: &'static str,
    pub first: String,
    pub second: String,
}

impl AtomRecord {
    pub fn new(atom: &SeparationAtom, ts: &TransitionSystem) -> Self {
        match *atom {
            SeparationAtom::States(a, b) => AtomRecord {
                kind: "SSP",
                first: ts.state_name(a).to_string(),
                second: ts.state_name(b).to_string(),
            },
            SeparationAtom::EventState(e, s) => AtomRecord {
                kind: "ESSP",
                first: ts.event_name(e).to_string(),
                second: ts.state_name(s).to_string(),
            },
        }
    }
}

/// All SSP atoms (state pairs in index order), then all ESSP atoms (by event,
/// then state).
pub fn enumerate_atoms(ts: &TransitionSystem) -> Vec<SeparationAtom> {
    let n = ts.num_states();
    let mut atoms = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for a in 0..n {
        for b in a + 1..n {
            atoms.push(SeparationAtom::States(a, b));
        }
    }
    for e in 0..ts.num_events() {
        for s in 0..n {
            if !ts.occurs(s, e) {
                atoms.push(SeparationAtom::EventState(e, s));
            }
        }
    }
    atoms
}
