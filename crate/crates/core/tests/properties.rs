//! Invariants over random transition systems and nets.

mod common;

use common::*;
use drsynth::{
    enumerate_atoms, enumerate_d_restricted_regions, isomorphic, net_from_regions, parse_net,
    parse_ts, synthesize, validate_ts, BooleanNet, Interaction, NetType, RawRegion, SeparationAtom,
    SynthesisProblem, TransitionSystem, TsBuilder,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn arb_ts() -> impl Strategy<Value = TransitionSystem> {
    any::<u64>().prop_map(|seed| random_ts(&mut StdRng::seed_from_u64(seed), 5, 3))
}

fn arb_type() -> impl Strategy<Value = NetType> {
    prop::sample::select(hardness_types())
}

/// Any non-empty type, with or without `nop`.
fn arb_any_type() -> impl Strategy<Value = NetType> {
    (1u8..=255).prop_map(|mask| {
        NetType::new(
            Interaction::ALL
                .into_iter()
                .filter(|i| mask >> i.index() & 1 == 1),
        )
        .unwrap()
    })
}

fn arb_net() -> impl Strategy<Value = BooleanNet> {
    (any::<u64>(), arb_any_type()).prop_map(|(seed, net_type)| {
        let mut rng = StdRng::seed_from_u64(seed);
        let members: Vec<Interaction> = net_type.members().collect();
        let places = rng.gen_range(0..=3);
        let transitions = rng.gen_range(1..=3);
        let flow = (0..places)
            .map(|_| {
                (0..transitions)
                    .map(|_| members[rng.gen_range(0..members.len())])
                    .collect()
            })
            .collect();
        BooleanNet::new(
            net_type,
            (0..places).map(|p| format!("p{p}")).collect(),
            (0..transitions).map(|t| format!("t{t}")).collect(),
            flow,
            (0..places).map(|_| rng.gen()).collect(),
        )
        .unwrap()
    })
}

/// Same system with states renamed and declared in reverse order.
fn renamed(ts: &TransitionSystem) -> TransitionSystem {
    let name = |s: usize| format!("x{}", ts.num_states() - s);
    let mut b = TsBuilder::new();
    for s in (0..ts.num_states()).rev() {
        b.state(name(s));
    }
    for e in ts.edges() {
        b.arc(&name(e.source), ts.event_name(e.event), &name(e.target));
    }
    b.initial(&name(ts.initial()));
    b.build().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ts_text_round_trips(ts in arb_ts()) {
        prop_assert_eq!(parse_ts(&ts.to_text()).unwrap(), ts);
    }

    #[test]
    fn enumerated_regions_are_sound(ts in arb_ts(), net_type in arb_type(), d in 0usize..4) {
        for r in enumerate_d_restricted_regions(&ts, net_type, d) {
            prop_assert!(r.restriction_count() <= d);
            prop_assert!(r.to_raw().check(&ts, net_type).is_ok());
        }
    }

    #[test]
    fn enumeration_is_deterministic(ts in arb_ts(), net_type in arb_type(), d in 0usize..4) {
        let first: Vec<_> = enumerate_d_restricted_regions(&ts, net_type, d).collect();
        let second: Vec<_> = enumerate_d_restricted_regions(&ts, net_type, d).collect();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn essp_atoms_are_solved_by_partial_interactions_only(ts in arb_ts(), net_type in arb_type()) {
        let d = ts.num_events();
        let regions: Vec<_> = enumerate_d_restricted_regions(&ts, net_type, d).collect();
        for atom in enumerate_atoms(&ts) {
            if let SeparationAtom::EventState(e, _) = atom {
                for r in regions.iter().filter(|r| r.solves(&atom)) {
                    prop_assert!(r.sig(e).is_partial());
                }
            }
        }
    }

    #[test]
    fn region_text_round_trips(ts in arb_ts(), net_type in arb_type()) {
        for r in enumerate_d_restricted_regions(&ts, net_type, 2).take(20) {
            let raw = RawRegion::parse(&r.to_text(&ts), &ts).unwrap();
            prop_assert_eq!(raw, r.to_raw());
        }
    }

    #[test]
    fn isomorphism_is_symmetric_under_renaming(ts in arb_ts()) {
        let other = renamed(&ts);
        let forward = isomorphic(&ts, &other).unwrap();
        let back = isomorphic(&other, &ts).unwrap();
        for (s, &t) in forward.iter().enumerate() {
            prop_assert_eq!(back[t], s);
            prop_assert_eq!(other.state_name(t), format!("x{}", ts.num_states() - s));
        }
    }

    #[test]
    fn reachability_graphs_are_valid(net in arb_net()) {
        let rg = net.reachability_graph();
        prop_assert!(validate_ts(&rg).is_empty());
        prop_assert!(rg.num_states() <= 1 << net.places().len());
        let reparsed = parse_net(&net.to_text()).unwrap();
        prop_assert_eq!(reparsed.reachability_graph(), rg);
    }

    #[test]
    fn synthesized_nets_reproduce_the_system(ts in arb_ts(), net_type in arb_type(), d in 0usize..4) {
        let problem = SynthesisProblem::new(ts.clone(), net_type, d).unwrap();
        let result = synthesize(&problem).unwrap();
        if result.is_solvable() {
            let net = net_from_regions(&ts, net_type, &result.admissible).unwrap();
            let max = result.admissible.iter().map(|r| r.restriction_count()).max().unwrap_or(0);
            prop_assert_eq!(net.dependency_number(), max);
            prop_assert!(max <= d);
            prop_assert!(isomorphic(&ts, &net.reachability_graph()).is_ok());
        } else {
            prop_assert!(result.admissible.is_empty());
        }
    }

    #[test]
    fn solvability_is_monotone_in_d(ts in arb_ts(), net_type in arb_type()) {
        let mut before: Option<Vec<SeparationAtom>> = None;
        for d in 0..=ts.num_events() + 1 {
            let problem = SynthesisProblem::new(ts.clone(), net_type, d).unwrap();
            let unsolved = synthesize(&problem).unwrap().unsolved_atoms;
            if let Some(prev) = &before {
                prop_assert!(unsolved.iter().all(|a| prev.contains(a)));
            }
            before = Some(unsolved);
        }
    }
}

#[test]
fn d_monotonicity_on_the_corpus() {
    let mut violations = Vec::new();
    for (n, ts) in corpus(120).iter().enumerate() {
        for net_type in corpus_types() {
            let solvable: Vec<bool> = (0..=ts.num_events() + 1)
                .map(|d| {
                    let problem = SynthesisProblem::new(ts.clone(), net_type, d).unwrap();
                    synthesize(&problem).unwrap().is_solvable()
                })
                .collect();
            if solvable.windows(2).any(|w| w[0] && !w[1]) {
                violations.push((n, net_type.to_string()));
            }
        }
    }
    assert!(violations.is_empty(), "{violations:?}");
}
