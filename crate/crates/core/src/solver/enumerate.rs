//! Seed enumeration in the fixed order: restriction count, then event subset,
//! then interaction assignment, then `sup(initial)` with 0 first.

use std::ops::Range;

use itertools::{Combinations, Itertools};

use crate::interaction::{Interaction, NetType};
use crate::region::{fill_support, Region, SpanningTree};
use crate::ts::TransitionSystem;

/// Levels (restriction counts) visited for `d`. Without `nop` every event is
/// restricted, so the only level is `|E|`.
pub(crate) fn levels(num_events: usize, net_type: NetType, d: usize) -> Range<usize> {
    if net_type.has_nop() {
        0..d.min(num_events) + 1
    } else if d >= num_events {
        num_events..num_events + 1
    } else {
        0..0
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Closed-form number of seeds for a full pass.
pub fn seed_count(num_events: usize, net_type: NetType, d: usize) -> u128 {
    let k = net_type.non_nop().len() as u128;
    levels(num_events, net_type, d)
        .map(|i| {
            binomial(num_events, i)
                .saturating_mul(k.saturating_pow(i as u32))
                .saturating_mul(2)
        })
        .fold(0u128, u128::saturating_add)
}

/// Seeds in one event subset: `2 * k^i`.
pub(crate) fn block_len(k: usize, i: usize) -> u64 {
    2 * (k as u64).pow(i as u32)
}

/// Walks every seed of one subset in order and calls `visit(offset, sig,
/// support)` for each valid region. `offset` is relative to the block start.
pub(crate) fn scan_block<F>(
    tree: &SpanningTree,
    choices: &[Interaction],
    base: &[Interaction],
    subset: &[usize],
    support: &mut [bool],
    mut visit: F,
) where
    F: FnMut(u64, &[Interaction], &[bool]),
{
    let mut sig = base.to_vec();
    let mut digits = vec![0usize; subset.len()];
    for (&e, &c) in subset.iter().zip(&digits) {
        sig[e] = choices[c];
    }
    let mut offset = 0u64;
    loop {
        for sup in [false, true] {
            if fill_support(tree, sup, &sig, support) {
                visit(offset, &sig, support);
            }
            offset += 1;
        }
        // odometer with the last position fastest
        let mut pos = subset.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < choices.len() {
                sig[subset[pos]] = choices[digits[pos]];
                break;
            }
            digits[pos] = 0;
            sig[subset[pos]] = choices[0];
        }
    }
}

/// Lazy stream of every valid region with restriction count at most `d`,
/// in seed order.
pub struct RegionStream<'a> {
    ts: &'a TransitionSystem,
    net_type: NetType,
    tree: SpanningTree,
    choices: Vec<Interaction>,
    base: Vec<Interaction>,
    levels: Range<usize>,
    combos: Option<Combinations<Range<usize>>>,
    subset: Vec<usize>,
    digits: Vec<usize>,
    sig: Vec<Interaction>,
    sup: bool,
    active: bool,
    support: Vec<bool>,
    seeds_tried: u64,
}

impl<'a> RegionStream<'a> {
    pub fn new(ts: &'a TransitionSystem, net_type: NetType, d: usize) -> Self {
        let choices = net_type.non_nop();
        let fill = if net_type.has_nop() {
            Interaction::Nop
        } else {
            // every event is in the subset, the fill is always overwritten
            choices.first().copied().unwrap_or(Interaction::Nop)
        };
        let base = vec![fill; ts.num_events()];
        RegionStream {
            ts,
            net_type,
            tree: SpanningTree::new(ts),
            choices,
            sig: base.clone(),
            base,
            levels: levels(ts.num_events(), net_type, d),
            combos: None,
            subset: Vec::new(),
            digits: Vec::new(),
            sup: false,
            active: false,
            support: vec![false; ts.num_states()],
            seeds_tried: 0,
        }
    }

    /// Seeds visited so far, valid or not.
    pub fn seeds_tried(&self) -> u64 {
        self.seeds_tried
    }

    fn advance(&mut self) -> bool {
        if self.active {
            if !self.sup {
                self.sup = true;
                return true;
            }
            let mut pos = self.subset.len();
            while pos > 0 {
                pos -= 1;
                self.digits[pos] += 1;
                if self.digits[pos] < self.choices.len() {
                    self.sig[self.subset[pos]] = self.choices[self.digits[pos]];
                    self.sup = false;
                    return true;
                }
                self.digits[pos] = 0;
                self.sig[self.subset[pos]] = self.choices[0];
            }
            self.active = false;
        }
        loop {
            if let Some(subset) = self.combos.as_mut().and_then(Iterator::next) {
                if !subset.is_empty() && self.choices.is_empty() {
                    continue;
                }
                self.sig.copy_from_slice(&self.base);
                for &e in &subset {
                    self.sig[e] = self.choices[0];
                }
                self.digits = vec![0; subset.len()];
                self.subset = subset;
                self.sup = false;
                self.active = true;
                return true;
            }
            match self.levels.next() {
                Some(i) => self.combos = Some((0..self.ts.num_events()).combinations(i)),
                None => return false,
            }
        }
    }
}

impl Iterator for RegionStream<'_> {
    type Item = Region;

    fn next(&mut self) -> Option<Region> {
        while self.advance() {
            self.seeds_tried += 1;
            if fill_support(&self.tree, self.sup, &self.sig, &mut self.support) {
                return Some(Region::from_parts_unchecked(
                    self.net_type,
                    self.support.clone(),
                    self.sig.clone(),
                ));
            }
        }
        None
    }
}

/// Stream of all valid regions of `ts` with restriction count at most `d`.
pub fn enumerate_d_restricted_regions(
    ts: &TransitionSystem,
    net_type: NetType,
    d: usize,
) -> RegionStream<'_> {
    RegionStream::new(ts, net_type, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ts::parse_ts;

    #[test]
    fn closed_form_for_one_event() {
        let t1: NetType = "nop,swap,used,set".parse().unwrap();
        assert_eq!(seed_count(1, t1, 1), 8);
        assert_eq!(seed_count(16, "nop,inp,set".parse().unwrap(), 4), 68_226);
        let no_nop: NetType = "inp,swap".parse().unwrap();
        assert_eq!(seed_count(3, no_nop, 2), 0);
        assert_eq!(seed_count(3, no_nop, 3), 16);
    }

    #[test]
    fn stream_visits_exactly_the_closed_form() {
        let ts =
            parse_ts("states s0 s1\ninitial s0\nevents a\narc s0 a s1\narc s1 a s0\n").unwrap();
        let t1: NetType = "nop,swap,used,set".parse().unwrap();
        let mut stream = enumerate_d_restricted_regions(&ts, t1, 1);
        let regions: Vec<Region> = stream.by_ref().collect();
        assert_eq!(stream.seeds_tried(), 8);
        // nop and swap with either support, used and set only with support 1
        assert_eq!(regions.len(), 6);
    }

    #[test]
    fn d_zero_yields_the_two_constant_regions() {
        let ts =
            parse_ts("states r0 r1\ninitial r0\nevents b c\narc r0 b r1\narc r1 c r0\n").unwrap();
        let t: NetType = "nop,inp,out".parse().unwrap();
        let regions: Vec<Region> = enumerate_d_restricted_regions(&ts, t, 0).collect();
        assert_eq!(regions.len(), 2);
        assert_eq!(regions[0].support(), &[false, false]);
        assert_eq!(regions[1].support(), &[true, true]);
    }

    #[test]
    fn stream_matches_block_scan() {
        let ts = parse_ts("states a b c\ninitial a\nevents x y\narc a x b\narc b y c\narc c x a\n")
            .unwrap();
        let t: NetType = "nop,inp,out,swap".parse().unwrap();
        let streamed: Vec<Vec<Interaction>> = enumerate_d_restricted_regions(&ts, t, 2)
            .map(|r| r.signature().to_vec())
            .collect();
        let tree = SpanningTree::new(&ts);
        let choices = t.non_nop();
        let base = vec![Interaction::Nop; 2];
        let mut scanned = Vec::new();
        let mut support = vec![false; 3];
        for i in 0..=2 {
            for subset in (0..2).combinations(i) {
                scan_block(
                    &tree,
                    &choices,
                    &base,
                    &subset,
                    &mut support,
                    |_, sig, _| scanned.push(sig.to_vec()),
                );
            }
        }
        assert_eq!(streamed, scanned);
    }
}
