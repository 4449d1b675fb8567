//! Boolean nets: firing, reachability graphs, and nets built from regions.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::interaction::{Interaction, NetType, TypeError};
use crate::region::Region;
use crate::ts::{is_identifier, TransitionSystem, TsBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown {kind} `{name}`")]
    UnknownReference {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error("line {line}: {kind} `{name}` declared twice")]
    Duplicate {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error("net file has no `type` line")]
    MissingType,
    #[error(
        "flow of place `{place}` on `{transition}` is `{interaction}`, which is not in the type"
    )]
    NotAMember {
        place: String,
        transition: String,
        interaction: Interaction,
    },
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("transition `{0}` is not enabled")]
    Disabled(String),
    #[error("marking has {got} bits, the net has {expected} places")]
    MarkingShape { got: usize, expected: usize },
    #[error("region does not match the transition system: {0}")]
    RegionMismatch(String),
    #[error(transparent)]
    Type(#[from] TypeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanNet {
    net_type: NetType,
    places: Vec<String>,
    transitions: Vec<String>,
    /// `flow[p][t]`
    flow: Vec<Vec<Interaction>>,
    initial: Vec<bool>,
}

impl BooleanNet {
    /// Builds a net, checking shapes and type membership of every flow value.
    pub fn new(
        net_type: NetType,
        places: Vec<String>,
        transitions: Vec<String>,
        flow: Vec<Vec<Interaction>>,
        initial: Vec<bool>,
    ) -> Result<Self, NetError> {
        if initial.len() != places.len() || flow.len() != places.len() {
            return Err(NetError::MarkingShape {
                got: initial.len(),
                expected: places.len(),
            });
        }
        for (p, row) in flow.iter().enumerate() {
            if row.len() != transitions.len() {
                return Err(NetError::RegionMismatch(format!(
                    "flow row of `{}` has {} entries for {} transitions",
                    places[p],
                    row.len(),
                    transitions.len()
                )));
            }
            if let Some((t, &i)) = row.iter().enumerate().find(|(_, &i)| !net_type.contains(i)) {
                return Err(NetError::NotAMember {
                    place: places[p].clone(),
                    transition: transitions[t].clone(),
                    interaction: i,
                });
            }
        }
        Ok(BooleanNet {
            net_type,
            places,
            transitions,
            flow,
            initial,
        })
    }

    pub fn net_type(&self) -> NetType {
        self.net_type
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[String] {
        &self.transitions
    }

    pub fn flow(&self, place: usize, transition: usize) -> Interaction {
        self.flow[place][transition]
    }

    pub fn initial_marking(&self) -> &[bool] {
        &self.initial
    }

    pub fn transition_index(&self, name: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t == name)
    }

    fn check_marking(&self, marking: &[bool]) -> Result<(), NetError> {
        if marking.len() != self.places.len() {
            return Err(NetError::MarkingShape {
                got: marking.len(),
                expected: self.places.len(),
            });
        }
        Ok(())
    }

    fn successor(&self, marking: &[bool], t: usize) -> Option<Vec<bool>> {
        marking
            .iter()
            .enumerate()
            .map(|(p, &x)| self.flow[p][t].apply(x))
            .collect()
    }

    pub fn enabled(&self, marking: &[bool], transition: &str) -> Result<bool, NetError> {
        self.check_marking(marking)?;
        let t = self
            .transition_index(transition)
            .ok_or_else(|| NetError::UnknownTransition(transition.to_string()))?;
        Ok(self.successor(marking, t).is_some())
    }

    pub fn fire(&self, marking: &[bool], transition: &str) -> Result<Vec<bool>, NetError> {
        self.check_marking(marking)?;
        let t = self
            .transition_index(transition)
            .ok_or_else(|| NetError::UnknownTransition(transition.to_string()))?;
        self.successor(marking, t)
            .ok_or_else(|| NetError::Disabled(transition.to_string()))
    }

    /// Breadth-first closure from the initial marking. States are named by
    /// their bit string over the place order (`_` when there are no places).
    /// Transitions that never fire do not appear in the result.
    pub fn reachability_graph(&self) -> TransitionSystem {
        let mut index: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut markings = vec![self.initial.clone()];
        index.insert(self.initial.clone(), 0);
        let mut arcs = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(m) = queue.pop_front() {
            for t in 0..self.transitions.len() {
                if let Some(next) = self.successor(&markings[m], t) {
                    let target = *index.entry(next.clone()).or_insert_with(|| {
                        markings.push(next);
                        queue.push_back(markings.len() - 1);
                        markings.len() - 1
                    });
                    arcs.push((m, t, target));
                }
            }
        }
        let names: Vec<String> = markings.iter().map(|m| marking_name(m)).collect();
        let mut builder = TsBuilder::new();
        for name in &names {
            builder.state(name.clone());
        }
        builder.initial(&names[0]);
        for (s, t, u) in arcs {
            builder.arc(&names[s], &self.transitions[t], &names[u]);
        }
        builder
            .build()
            .expect("reachability graphs are deterministic and reachable")
    }

    /// Maximum over places of the number of non-`nop` flow entries.
    pub fn dependency_number(&self) -> usize {
        self.flow
            .iter()
            .map(|row| row.iter().filter(|&&i| i != Interaction::Nop).count())
            .max()
            .unwrap_or(0)
    }

    /// `type`, `transition`, `place` and non-`nop` `flow` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "type {}", self.net_type).unwrap();
        for t in &self.transitions {
            writeln!(out, "transition {t}").unwrap();
        }
        for (p, name) in self.places.iter().enumerate() {
            writeln!(out, "place {name} init {}", self.initial[p] as u8).unwrap();
        }
        for (p, name) in self.places.iter().enumerate() {
            for (t, tname) in self.transitions.iter().enumerate() {
                if self.flow[p][t] != Interaction::Nop {
                    writeln!(out, "flow {name} {tname} {}", self.flow[p][t]).unwrap();
                }
            }
        }
        out
    }
}

/// Bit string of a marking, or `_` for the empty marking.
pub fn marking_name(marking: &[bool]) -> String {
    if marking.is_empty() {
        return "_".to_string();
    }
    marking.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// One place `p<k>` per region, flow from signatures, initial marking from
/// the support at the initial state.
pub fn net_from_regions(
    ts: &TransitionSystem,
    net_type: NetType,
    regions: &[Region],
) -> Result<BooleanNet, NetError> {
    for (k, r) in regions.iter().enumerate() {
        if r.support().len() != ts.num_states() || r.signature().len() != ts.num_events() {
            return Err(NetError::RegionMismatch(format!(
                "region {k} has {} states and {} events",
                r.support().len(),
                r.signature().len()
            )));
        }
        if let Err(defect) = r.to_raw().check(ts, net_type) {
            return Err(NetError::RegionMismatch(format!("region {k}: {defect}")));
        }
    }
    BooleanNet::new(
        net_type,
        (0..regions.len()).map(|k| format!("p{k}")).collect(),
        ts.events().to_vec(),
        regions.iter().map(|r| r.signature().to_vec()).collect(),
        regions.iter().map(|r| r.sup(ts.initial())).collect(),
    )
}

pub fn parse_net(text: &str) -> Result<BooleanNet, NetError> {
    let mut net_type = None;
    let mut transitions: Vec<String> = Vec::new();
    let mut places: Vec<String> = Vec::new();
    let mut initial: Vec<bool> = Vec::new();
    let mut flows: Vec<(usize, String, String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let tokens: Vec<&str> = raw
            .split('#')
            .next()
            .unwrap_or("")
            .split_whitespace()
            .collect();
        let syntax = |message: &str| NetError::Syntax {
            line,
            message: message.to_string(),
        };
        match tokens.as_slice() {
            [] => {}
            ["type", list] => {
                if net_type.is_some() {
                    return Err(syntax("second `type` line"));
                }
                net_type = Some(NetType::from_str(list)?);
            }
            ["transition", names @ ..] if !names.is_empty() => {
                for &name in names {
                    if !is_identifier(name) {
                        return Err(syntax(&format!("`{name}` is not a valid identifier")));
                    }
                    if transitions.iter().any(|t| t == name) {
                        return Err(NetError::Duplicate {
                            line,
                            kind: "transition",
                            name: name.to_string(),
                        });
                    }
                    transitions.push(name.to_string());
                }
            }
            ["place", name, "init", bit] => {
                if !is_identifier(name) {
                    return Err(syntax(&format!("`{name}` is not a valid identifier")));
                }
                if places.iter().any(|p| p == name) {
                    return Err(NetError::Duplicate {
                        line,
                        kind: "place",
                        name: name.to_string(),
                    });
                }
                let bit = match *bit {
                    "0" => false,
                    "1" => true,
                    other => return Err(syntax(&format!("`{other}` is not a bit"))),
                };
                places.push(name.to_string());
                initial.push(bit);
            }
            ["flow", p, t, i] => flows.push((line, p.to_string(), t.to_string(), i.to_string())),
            [keyword, ..] => {
                return Err(syntax(&format!("unexpected `{keyword}` line")));
            }
        }
    }
    let net_type = net_type.ok_or(NetError::MissingType)?;
    let mut flow = vec![vec![Interaction::Nop; transitions.len()]; places.len()];
    let mut seen = vec![vec![false; transitions.len()]; places.len()];
    for (line, p, t, i) in flows {
        let pi = places
            .iter()
            .position(|x| *x == p)
            .ok_or(NetError::UnknownReference {
                line,
                kind: "place",
                name: p.clone(),
            })?;
        let ti = transitions
            .iter()
            .position(|x| *x == t)
            .ok_or(NetError::UnknownReference {
                line,
                kind: "transition",
                name: t.clone(),
            })?;
        if std::mem::replace(&mut seen[pi][ti], true) {
            return Err(NetError::Duplicate {
                line,
                kind: "flow",
                name: format!("{p} {t}"),
            });
        }
        flow[pi][ti] = i.parse()?;
    }
    if !net_type.has_nop() {
        // omitted entries default to nop, which this type cannot express
        if let Some((p, t)) = (0..places.len())
            .flat_map(|p| (0..transitions.len()).map(move |t| (p, t)))
            .find(|&(p, t)| !seen[p][t])
        {
            return Err(NetError::NotAMember {
                place: places[p].clone(),
                transition: transitions[t].clone(),
                interaction: Interaction::Nop,
            });
        }
    }
    BooleanNet::new(net_type, places, transitions, flow, initial)
}

impl FromStr for BooleanNet {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_net(s)
    }
}
