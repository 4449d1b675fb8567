//! Isomorphism of deterministic transition systems and certificate checks.

use serde::Serialize;
use thiserror::Error;

use crate::interaction::NetType;
use crate::net::net_from_regions;
use crate::region::{enumerate_atoms, AtomRecord, RawRegion, Region, SeparationAtom};
use crate::ts::TransitionSystem;

/// Why two transition systems are not isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoFailure {
    #[error("event alphabets differ (only left: {only_left:?}, only right: {only_right:?})")]
    Alphabet {
        only_left: Vec<String>,
        only_right: Vec<String>,
    },
    #[error("state counts differ: {left} vs {right}")]
    StateCount { left: usize, right: usize },
    #[error(
        "`{event}` occurs at left state `{left}` but not at right state `{right}`, or vice versa"
    )]
    MissingEdge {
        left: String,
        right: String,
        event: String,
    },
    #[error("left state `{left}` would have to map to both `{first}` and `{second}`")]
    Conflict {
        left: String,
        first: String,
        second: String,
    },
    #[error("right state `{right}` is the image of two left states")]
    NotInjective { right: String },
}

/// The unique candidate map from paired traversal of both systems, returned
/// when it is an edge-preserving bijection. `map[s]` is the image of `s`.
pub fn isomorphic(a: &TransitionSystem, b: &TransitionSystem) -> Result<Vec<usize>, IsoFailure> {
    if a.events() != b.events() {
        return Err(IsoFailure::Alphabet {
            only_left: a
                .events()
                .iter()
                .filter(|e| b.event_index(e).is_none())
                .cloned()
                .collect(),
            only_right: b
                .events()
                .iter()
                .filter(|e| a.event_index(e).is_none())
                .cloned()
                .collect(),
        });
    }
    if a.num_states() != b.num_states() {
        return Err(IsoFailure::StateCount {
            left: a.num_states(),
            right: b.num_states(),
        });
    }
    let mut map: Vec<Option<usize>> = vec![None; a.num_states()];
    let mut inverse: Vec<Option<usize>> = vec![None; b.num_states()];
    map[a.initial()] = Some(b.initial());
    inverse[b.initial()] = Some(a.initial());
    let mut stack = vec![a.initial()];
    while let Some(s) = stack.pop() {
        let t = map[s].unwrap();
        for e in 0..a.num_events() {
            match (a.delta(s, e), b.delta(t, e)) {
                (None, None) => {}
                (Some(s2), Some(t2)) => match map[s2] {
                    Some(x) if x == t2 => {}
                    Some(x) => {
                        return Err(IsoFailure::Conflict {
                            left: a.state_name(s2).to_string(),
                            first: b.state_name(x).to_string(),
                            second: b.state_name(t2).to_string(),
                        })
                    }
                    None => {
                        if inverse[t2].is_some() {
                            return Err(IsoFailure::NotInjective {
                                right: b.state_name(t2).to_string(),
                            });
                        }
                        map[s2] = Some(t2);
                        inverse[t2] = Some(s2);
                        stack.push(s2);
                    }
                },
                _ => {
                    return Err(IsoFailure::MissingEdge {
                        left: a.state_name(s).to_string(),
                        right: b.state_name(t).to_string(),
                        event: a.event_name(e).to_string(),
                    })
                }
            }
        }
    }
    // every state of a is reachable, so the map is total; equal counts and
    // injectivity make it a bijection
    Ok(map.into_iter().map(Option::unwrap).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct OverBudget {
    pub region: usize,
    pub restricted: usize,
}

/// Outcome of checking a claimed admissible set.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub accepted: bool,
    /// `(region index, defect)` for regions that are not regions of the TS.
    pub invalid: Vec<(usize, String)>,
    pub over_budget: Vec<OverBudget>,
    #[serde(skip)]
    pub unsolved: Vec<SeparationAtom>,
    pub unsolved_atoms: Vec<AtomRecord>,
    pub isomorphic: bool,
    pub isomorphism_failure: Option<String>,
}

/// Checks that `regions` is a d-restricted admissible set of `ts` and that
/// the net built from it reproduces `ts`. Only valid regions within budget
/// count towards solving atoms and building the net.
pub fn check_certificate(
    ts: &TransitionSystem,
    net_type: NetType,
    d: usize,
    regions: &[RawRegion],
) -> CertificateReport {
    let mut invalid = Vec::new();
    let mut over_budget = Vec::new();
    let mut good: Vec<Region> = Vec::new();
    for (k, raw) in regions.iter().enumerate() {
        match raw.check(ts, net_type) {
            Err(defect) => invalid.push((k, defect.to_string())),
            Ok(r) if r.restriction_count() > d => over_budget.push(OverBudget {
                region: k,
                restricted: r.restriction_count(),
            }),
            Ok(r) => good.push(r),
        }
    }
    let unsolved: Vec<SeparationAtom> = enumerate_atoms(ts)
        .into_iter()
        .filter(|atom| !good.iter().any(|r| r.solves(atom)))
        .collect();
    let iso = net_from_regions(ts, net_type, &good)
        .map_err(|e| e.to_string())
        .and_then(|net| isomorphic(ts, &net.reachability_graph()).map_err(|e| e.to_string()));
    let isomorphism_failure = iso.err();
    let isomorphic = isomorphism_failure.is_none();
    CertificateReport {
        accepted: invalid.is_empty() && over_budget.is_empty() && unsolved.is_empty() && isomorphic,
        invalid,
        over_budget,
        unsolved_atoms: unsolved.iter().map(|a| AtomRecord::new(a, ts)).collect(),
        unsolved,
        isomorphic,
        isomorphism_failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::Interaction::*;
    use crate::ts::parse_ts;

    fn a1() -> TransitionSystem {
        parse_ts("states s0 s1\ninitial s0\nevents a\narc s0 a s1\narc s1 a s0\n").unwrap()
    }

    #[test]
    fn identity_and_symmetry() {
        let ts = a1();
        assert_eq!(isomorphic(&ts, &ts).unwrap(), vec![0, 1]);
        let other = parse_ts("states 0 1\ninitial 0\nevents a\narc 0 a 1\narc 1 a 0\n").unwrap();
        let forward = isomorphic(&ts, &other).unwrap();
        let back = isomorphic(&other, &ts).unwrap();
        for (s, &t) in forward.iter().enumerate() {
            assert_eq!(back[t], s);
        }
    }

    #[test]
    fn missing_back_edge_is_detected() {
        let one_way = parse_ts("states s0 s1\ninitial s0\nevents a\narc s0 a s1\n").unwrap();
        assert!(matches!(
            isomorphic(&a1(), &one_way),
            Err(IsoFailure::MissingEdge { .. })
        ));
        assert!(isomorphic(&one_way, &a1()).is_err());
    }

    #[test]
    fn alphabets_must_match() {
        let a2 =
            parse_ts("states r0 r1\ninitial r0\nevents b c\narc r0 b r1\narc r1 c r0\n").unwrap();
        assert!(matches!(
            isomorphic(&a1(), &a2),
            Err(IsoFailure::Alphabet { .. })
        ));
    }

    #[test]
    fn merged_states_are_not_injective() {
        // a loop of length 3 vs. 3 states where the third wraps to the second
        let left = parse_ts("states x y z\ninitial x\nevents a\narc x a y\narc y a z\narc z a x\n")
            .unwrap();
        let right =
            parse_ts("states x y z\ninitial x\nevents a\narc x a y\narc y a z\narc z a y\n")
                .unwrap();
        assert!(isomorphic(&left, &right).is_err());
    }

    #[test]
    fn certificate_checks() {
        let ts = a1();
        let t1: NetType = "nop,swap,used,set".parse().unwrap();
        let swap = RawRegion {
            support: vec![false, true],
            signature: vec![Swap],
        };
        assert!(check_certificate(&ts, t1, 1, std::slice::from_ref(&swap)).accepted);
        let over = check_certificate(&ts, t1, 0, &[swap]);
        assert!(!over.accepted);
        assert_eq!(over.over_budget.len(), 1);
        let broken = RawRegion {
            support: vec![false, false],
            signature: vec![Swap],
        };
        let report = check_certificate(&ts, t1, 1, &[broken]);
        assert!(!report.accepted);
        assert_eq!(report.invalid.len(), 1);
        assert_eq!(report.unsolved, vec![SeparationAtom::States(0, 1)]);
    }
}
