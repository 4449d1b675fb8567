//! Dependency d-restricted synthesis of Boolean Petri nets.
//!
//! Given a finite transition system, a Boolean type of net and a bound `d`,
//! [`solver::synthesize`] looks for an admissible set of regions in which
//! every region restricts at most `d` events. [`net::net_from_regions`] turns
//! such a set into a net and [`verify`] checks the result by reachability
//! graph isomorphism. [`reductions`] builds the Hitting Set gadgets.

pub mod interaction;
pub mod net;
pub mod reductions;
pub mod region;
pub mod solver;
pub mod ts;
pub mod verify;

pub use interaction::{Interaction, NetType, TypeError};
pub use net::{net_from_regions, parse_net, BooleanNet, NetError};
pub use reductions::{
    build_gadget, extract_hitting_set, hs_brute_force, parse_hs, Construction, GadgetOutput,
    HittingSetInstance, HsError,
};
pub use region::{
    enumerate_atoms, region_from_seed, RawRegion, Region, SeparationAtom, SpanningTree,
};
pub use solver::{
    enumerate_d_restricted_regions, solve_single_atom, synthesize, synthesize_with, SolverError,
    Strategy, SynthesisOptions, SynthesisProblem, SynthesisResult, Verdict,
};
pub use ts::{parse_ts, validate_ts, TransitionSystem, TsBuilder, TsError, Violation};
pub use verify::{check_certificate, isomorphic, CertificateReport, IsoFailure};
