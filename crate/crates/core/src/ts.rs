//! Finite deterministic initialized transition systems.
//!
//! States and events are named by identifiers and stored in lexicographic
//! order, so indices (and everything enumerated over them) are stable.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

/// A labelled edge `source --event--> target`, by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub event: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("no initial state declared")]
    MissingInitial,
    #[error("initial state `{0}` is not a declared state")]
    UnknownInitial(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("event `{event}` at state `{state}` leads to several states: {}", targets.join(", "))]
    Nondeterministic {
        state: String,
        event: String,
        targets: Vec<String>,
    },
    #[error("state `{0}` is not reachable from the initial state")]
    Unreachable(String),
    #[error("event `{0}` occurs on no edge")]
    OrphanEvent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown {kind} `{name}`")]
    UnknownReference {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error("invalid transition system: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Identifier rule shared by every text format in the crate.
pub fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '+' | '-' | '⊕'))
}

/// A validated transition system. Immutable once built.
#[derive(Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    states: Vec<String>,
    events: Vec<String>,
    /// Row-major `states × events` successor table.
    delta: Vec<Option<usize>>,
    edges: Vec<Edge>,
    initial: usize,
}

impl TransitionSystem {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn events(&self) -> &[String] {
        &self.events
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn event_name(&self, e: usize) -> &str {
        &self.events[e]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.binary_search_by(|s| s.as_str().cmp(name)).ok()
    }

    pub fn event_index(&self, name: &str) -> Option<usize> {
        self.events.binary_search_by(|e| e.as_str().cmp(name)).ok()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn delta(&self, state: usize, event: usize) -> Option<usize> {
        self.delta[state * self.events.len() + event]
    }

    pub fn occurs(&self, state: usize, event: usize) -> bool {
        self.delta(state, event).is_some()
    }

    /// All edges, sorted by `(source, event, target)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn to_builder(&self) -> TsBuilder {
        let mut b = TsBuilder::new();
        for s in &self.states {
            b.state(s);
        }
        for e in &self.events {
            b.event(e);
        }
        for edge in &self.edges {
            b.arc(
                &self.states[edge.source],
                &self.events[edge.event],
                &self.states[edge.target],
            );
        }
        b.initial(&self.states[self.initial]);
        b
    }

    /// Serializes to the line-based text format accepted by [`parse_ts`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "states {}", self.states.join(" ")).unwrap();
        writeln!(out, "initial {}", self.states[self.initial]).unwrap();
        if !self.events.is_empty() {
            writeln!(out, "events {}", self.events.join(" ")).unwrap();
        }
        for edge in &self.edges {
            writeln!(
                out,
                "arc {} {} {}",
                self.states[edge.source], self.events[edge.event], self.states[edge.target]
            )
            .unwrap();
        }
        out
    }
}

impl fmt::Debug for TransitionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransitionSystem")
            .field("states", &self.states)
            .field("events", &self.events)
            .field("initial", &self.states[self.initial])
            .field("edges", &self.edges.len())
            .finish()
    }
}

impl FromStr for TransitionSystem {
    type Err = TsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ts(s)
    }
}

/// Mutable, unvalidated form of a transition system.
///
/// `arc` declares its states and event implicitly; [`TsBuilder::build`]
/// checks every invariant and reports all violations at once.
#[derive(Debug, Clone, Default)]
pub struct TsBuilder {
    states: BTreeSet<String>,
    events: BTreeSet<String>,
    arcs: BTreeSet<(String, String, String)>,
    initial: Option<String>,
}

impl TsBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, name: impl Into<String>) -> &mut Self {
        self.states.insert(name.into());
        self
    }

    pub fn event(&mut self, name: impl Into<String>) -> &mut Self {
        self.events.insert(name.into());
        self
    }

    pub fn arc(&mut self, source: &str, event: &str, target: &str) -> &mut Self {
        self.states.insert(source.to_string());
        self.states.insert(target.to_string());
        self.events.insert(event.to_string());
        self.arcs
            .insert((source.to_string(), event.to_string(), target.to_string()));
        self
    }

    /// Adds `source --event--> target` and `target --event--> source`.
    pub fn biarc(&mut self, source: &str, event: &str, target: &str) -> &mut Self {
        self.arc(source, event, target).arc(target, event, source)
    }

    pub fn initial(&mut self, name: &str) -> &mut Self {
        self.initial = Some(name.to_string());
        self
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Every invariant violation, in a deterministic order.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for name in self.states.iter().chain(&self.events) {
            if !is_identifier(name) {
                out.push(Violation::InvalidIdentifier(name.clone()));
            }
        }

        let mut succ: BTreeMap<(&str, &str), Vec<&str>> = BTreeMap::new();
        for (s, e, t) in &self.arcs {
            succ.entry((s, e)).or_default().push(t);
        }
        for ((s, e), targets) in &succ {
            if targets.len() > 1 {
                out.push(Violation::Nondeterministic {
                    state: s.to_string(),
                    event: e.to_string(),
                    targets: targets.iter().map(|t| t.to_string()).collect(),
                });
            }
        }

        let used: BTreeSet<&str> = self.arcs.iter().map(|(_, e, _)| e.as_str()).collect();
        for e in &self.events {
            if !used.contains(e.as_str()) {
                out.push(Violation::OrphanEvent(e.clone()));
            }
        }

        match &self.initial {
            None => out.push(Violation::MissingInitial),
            Some(init) if !self.states.contains(init) => {
                out.push(Violation::UnknownInitial(init.clone()))
            }
            Some(init) => {
                let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
                for (s, _, t) in &self.arcs {
                    adj.entry(s).or_default().push(t);
                }
                let mut seen: BTreeSet<&str> = BTreeSet::from([init.as_str()]);
                let mut queue = VecDeque::from([init.as_str()]);
                while let Some(s) = queue.pop_front() {
                    for &t in adj.get(s).into_iter().flatten() {
                        if seen.insert(t) {
                            queue.push_back(t);
                        }
                    }
                }
                for s in &self.states {
                    if !seen.contains(s.as_str()) {
                        out.push(Violation::Unreachable(s.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn build(&self) -> Result<TransitionSystem, TsError> {
        let violations = self.violations();
        if !violations.is_empty() {
            return Err(TsError::Invalid(violations));
        }
        let states: Vec<String> = self.states.iter().cloned().collect();
        let events: Vec<String> = self.events.iter().cloned().collect();
        let sidx = |n: &str| states.binary_search_by(|s| s.as_str().cmp(n)).unwrap();
        let eidx = |n: &str| events.binary_search_by(|s| s.as_str().cmp(n)).unwrap();
        let mut delta = vec![None; states.len() * events.len()];
        let mut edges = Vec::with_capacity(self.arcs.len());
        for (s, e, t) in &self.arcs {
            let edge = Edge {
                source: sidx(s),
                event: eidx(e),
                target: sidx(t),
            };
            delta[edge.source * events.len() + edge.event] = Some(edge.target);
            edges.push(edge);
        }
        edges.sort();
        let initial = sidx(self.initial.as_deref().unwrap());
        Ok(TransitionSystem {
            states,
            events,
            delta,
            edges,
            initial,
        })
    }
}

/// Re-checks every invariant of a built transition system from scratch.
pub fn validate_ts(ts: &TransitionSystem) -> Vec<Violation> {
    ts.to_builder().violations()
}

/// Parses the line-based TS format:
///
/// ```text
/// states s0 s1 s2
/// initial s0
/// events a b
/// arc s0 a s1
/// arc s1 b s2
/// ```
///
/// `#` starts a comment. Arcs must only mention declared states and events.
pub fn parse_ts(text: &str) -> Result<TransitionSystem, TsError> {
    let mut b = TsBuilder::new();
    let mut initial_line = None;
    let mut arcs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        let args: Vec<&str> = tokens.collect();
        if let Some(bad) = args.iter().find(|a| !is_identifier(a)) {
            return Err(TsError::Syntax {
                line,
                message: format!("`{bad}` is not a valid identifier"),
            });
        }
        match keyword {
            "states" => args.iter().for_each(|s| {
                b.state(*s);
            }),
            "events" => args.iter().for_each(|e| {
                b.event(*e);
            }),
            "initial" => {
                if args.len() != 1 {
                    return Err(syntax(line, "`initial` takes exactly one state"));
                }
                if initial_line.is_some() {
                    return Err(syntax(line, "initial state declared twice"));
                }
                initial_line = Some((line, args[0].to_string()));
            }
            "arc" => {
                if args.len() != 3 {
                    return Err(syntax(line, "`arc` takes a source, an event and a target"));
                }
                arcs.push((line, args[0], args[1], args[2]));
            }
            other => return Err(syntax(line, &format!("unknown keyword `{other}`"))),
        }
    }
    let declared_states = b.states.clone();
    let declared_events = b.events.clone();
    for (line, s, e, t) in arcs {
        for (kind, name, known) in [
            ("state", s, &declared_states),
            ("event", e, &declared_events),
            ("state", t, &declared_states),
        ] {
            if !known.contains(name) {
                return Err(TsError::UnknownReference {
                    line,
                    kind,
                    name: name.to_string(),
                });
            }
        }
        b.arc(s, e, t);
    }
    match initial_line {
        Some((line, init)) => {
            if !declared_states.contains(&init) {
                return Err(TsError::UnknownReference {
                    line,
                    kind: "state",
                    name: init,
                });
            }
            b.initial(&init);
        }
        None => return Err(TsError::Invalid(vec![Violation::MissingInitial])),
    }
    b.build()
}

fn syntax(line: usize, message: &str) -> TsError {
    TsError::Syntax {
        line,
        message: message.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PLACE_RG: &str = "\
# reachability graph of the two-place net
states 10 01 00
initial 10
events a b
arc 10 a 01
arc 01 b 00
";

    #[test]
    fn parses_three_state_path() {
        let ts = parse_ts(TWO_PLACE_RG).unwrap();
        assert_eq!(ts.num_states(), 3);
        assert_eq!(ts.num_events(), 2);
        assert_eq!(ts.state_name(ts.initial()), "10");
        let s01 = ts.state_index("01").unwrap();
        let b = ts.event_index("b").unwrap();
        assert_eq!(ts.delta(s01, b), ts.state_index("00"));
        assert!(validate_ts(&ts).is_empty());
    }

    #[test]
    fn single_state_without_events() {
        let ts = parse_ts("states s\ninitial s\n").unwrap();
        assert_eq!(ts.num_states(), 1);
        assert_eq!(ts.num_events(), 0);
        assert!(ts.edges().is_empty());
    }

    #[test]
    fn rejects_nondeterminism() {
        let err = parse_ts("states s0 s1 s2\ninitial s0\nevents a\narc s0 a s1\narc s0 a s2\n")
            .unwrap_err();
        let TsError::Invalid(v) = err else {
            panic!("expected violations, got {err:?}")
        };
        assert!(matches!(&v[0], Violation::Nondeterministic { state, .. } if state == "s0"));
    }

    #[test]
    fn reports_isolated_state() {
        let mut b = TsBuilder::new();
        b.arc("s0", "a", "s1").state("lost").initial("s0");
        assert_eq!(b.violations(), vec![Violation::Unreachable("lost".into())]);
    }

    #[test]
    fn rejects_orphan_event() {
        let err = parse_ts("states s0 s1\ninitial s0\nevents a b\narc s0 a s1\n").unwrap_err();
        assert_eq!(
            err,
            TsError::Invalid(vec![Violation::OrphanEvent("b".into())])
        );
    }

    #[test]
    fn unknown_references_carry_line_numbers() {
        let err = parse_ts("states s0\ninitial s0\nevents a\n\narc s0 a s9\n").unwrap_err();
        assert_eq!(
            err,
            TsError::UnknownReference {
                line: 5,
                kind: "state",
                name: "s9".into()
            }
        );
        let err = parse_ts("states s0\ninitial s0\narc s0 a s0\n").unwrap_err();
        assert!(matches!(
            err,
            TsError::UnknownReference { kind: "event", .. }
        ));
        let err = parse_ts("states s0\ninitial q\n").unwrap_err();
        assert!(matches!(err, TsError::UnknownReference { line: 2, .. }));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_ts("states s0\nfoo bar\n"),
            Err(TsError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_ts("states s0\ninitial s0 s0\n"),
            Err(TsError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_ts("states s0 s$\ninitial s0\n"),
            Err(TsError::Syntax { line: 1, .. })
        ));
        assert_eq!(
            parse_ts("states s0\n"),
            Err(TsError::Invalid(vec![Violation::MissingInitial]))
        );
    }

    #[test]
    fn self_loops_and_bidirectional_edges_are_plain_arcs() {
        let mut b = TsBuilder::new();
        b.biarc("p", "x", "q").arc("q", "y", "q").initial("p");
        let ts = b.build().unwrap();
        assert_eq!(ts.edges().len(), 3);
        let q = ts.state_index("q").unwrap();
        assert_eq!(ts.delta(q, ts.event_index("y").unwrap()), Some(q));
    }

    #[test]
    fn text_round_trip() {
        let ts = parse_ts(TWO_PLACE_RG).unwrap();
        assert_eq!(parse_ts(&ts.to_text()).unwrap(), ts);
    }
}
