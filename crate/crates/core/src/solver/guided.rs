//! Exact backtracking search for a single atom.
//!
//! Decisions are made on event signatures only. Each fixed signature turns
//! its edges into unary constraints (`set`, `inp`, ...) or parity
//! constraints (`nop`, `swap`) on support bits, which a union-find with
//! parities and per-class values decides exactly. Undecided events keep a
//! domain filtered edge by edge; the budget is checked against events whose
//! domain has lost `nop`.

use crate::interaction::{Interaction, NetType};
use crate::region::{RawRegion, Region, SeparationAtom};
use crate::ts::TransitionSystem;

/// Bit `2x + y` is set when the interaction maps `x` to `y`.
fn pair_mask(i: Interaction) -> u8 {
    let mut mask = 0;
    for x in [false, true] {
        if let Some(y) = i.apply(x) {
            mask |= 1 << (2 * x as u8 + y as u8);
        }
    }
    mask
}

/// The bit on which a partial interaction is undefined.
fn undefined_on(i: Interaction) -> Option<bool> {
    [false, true].into_iter().find(|&x| i.apply(x).is_none())
}

enum Undo {
    Attach {
        child: usize,
        root: usize,
        rank_bumped: bool,
    },
    Value {
        root: usize,
    },
    Sig {
        event: usize,
    },
}

pub(crate) struct Guided<'a> {
    ts: &'a TransitionSystem,
    net_type: NetType,
    d: usize,
    by_event: Vec<Vec<(usize, usize)>>,
    masks: [u8; 8],
    node_limit: Option<u64>,
    pub(crate) nodes: u64,
    parent: Vec<usize>,
    parity: Vec<bool>,
    rank: Vec<u8>,
    value: Vec<Option<bool>>,
    sig: Vec<Option<Interaction>>,
    restricted: usize,
    trail: Vec<Undo>,
    essp: Option<(usize, usize)>,
}

pub(crate) struct LimitReached;

impl<'a> Guided<'a> {
    pub(crate) fn new(
        ts: &'a TransitionSystem,
        net_type: NetType,
        d: usize,
        node_limit: Option<u64>,
    ) -> Self {
        let mut by_event = vec![Vec::new(); ts.num_events()];
        for edge in ts.edges() {
            by_event[edge.event].push((edge.source, edge.target));
        }
        let mut masks = [0u8; 8];
        for i in Interaction::ALL {
            masks[i.index()] = pair_mask(i);
        }
        let n = ts.num_states();
        Guided {
            ts,
            net_type,
            d,
            by_event,
            masks,
            node_limit,
            nodes: 0,
            parent: (0..n).collect(),
            parity: vec![false; n],
            rank: vec![0; n],
            value: vec![None; n],
            sig: vec![None; ts.num_events()],
            restricted: 0,
            trail: Vec::new(),
            essp: None,
        }
    }

    fn reset(&mut self) {
        let n = self.ts.num_states();
        self.parent = (0..n).collect();
        self.parity.fill(false);
        self.rank.fill(0);
        self.value.fill(None);
        self.sig.fill(None);
        self.restricted = 0;
        self.trail.clear();
        self.essp = None;
    }

    fn find(&self, mut s: usize) -> (usize, bool) {
        let mut p = false;
        while self.parent[s] != s {
            p ^= self.parity[s];
            s = self.parent[s];
        }
        (s, p)
    }

    /// Possible values of the root of a class as a 2-bit set.
    fn root_values(&self, root: usize) -> u8 {
        match self.value[root] {
            Some(v) => 1 << v as u8,
            None => 0b11,
        }
    }

    fn state_values(&self, s: usize) -> u8 {
        let (r, p) = self.find(s);
        let vals = self.root_values(r);
        if p {
            ((vals & 1) << 1) | (vals >> 1)
        } else {
            vals
        }
    }

    /// Possible `(sup(s), sup(t))` pairs as a 4-bit set.
    fn edge_pairs(&self, s: usize, t: usize) -> u8 {
        let (rs, ps) = self.find(s);
        let (rt, pt) = self.find(t);
        let mut mask = 0;
        if rs == rt {
            for v in [false, true] {
                if self.root_values(rs) & (1 << v as u8) != 0 {
                    mask |= 1 << (2 * (v ^ ps) as u8 + (v ^ pt) as u8);
                }
            }
        } else {
            let xs = self.state_values(s);
            let ys = self.state_values(t);
            for x in 0..2u8 {
                for y in 0..2u8 {
                    if xs & (1 << x) != 0 && ys & (1 << y) != 0 {
                        mask |= 1 << (2 * x + y);
                    }
                }
            }
        }
        mask
    }

    fn fix(&mut self, s: usize, v: bool) -> bool {
        let (r, p) = self.find(s);
        match self.value[r] {
            Some(x) => x == v ^ p,
            None => {
                self.value[r] = Some(v ^ p);
                self.trail.push(Undo::Value { root: r });
                true
            }
        }
    }

    /// Records `sup(a) xor sup(b) = p`.
    fn relate(&mut self, a: usize, b: usize, p: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == p;
        }
        let (root, child) = if self.rank[ra] >= self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        let link = pa ^ pb ^ p;
        let implied = self.value[child].map(|v| v ^ link);
        if let (Some(x), Some(y)) = (self.value[root], implied) {
            if x != y {
                return false;
            }
        }
        let rank_bumped = self.rank[root] == self.rank[child];
        if rank_bumped {
            self.rank[root] += 1;
        }
        self.parent[child] = root;
        self.parity[child] = link;
        self.trail.push(Undo::Attach {
            child,
            root,
            rank_bumped,
        });
        if self.value[root].is_none() {
            if let Some(y) = implied {
                self.value[root] = Some(y);
                self.trail.push(Undo::Value { root });
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Undo::Attach {
                    child,
                    root,
                    rank_bumped,
                } => {
                    self.parent[child] = child;
                    self.parity[child] = false;
                    if rank_bumped {
                        self.rank[root] -= 1;
                    }
                }
                Undo::Value { root } => self.value[root] = None,
                Undo::Sig { event } => {
                    if self.sig[event] != Some(Interaction::Nop) {
                        self.restricted -= 1;
                    }
                    self.sig[event] = None;
                }
            }
        }
    }

    fn decide(&mut self, e: usize, i: Interaction) -> bool {
        self.sig[e] = Some(i);
        if i != Interaction::Nop {
            self.restricted += 1;
        }
        self.trail.push(Undo::Sig { event: e });
        if let Some((ae, s)) = self.essp {
            if ae == e {
                match undefined_on(i) {
                    Some(x) => {
                        if !self.fix(s, x) {
                            return false;
                        }
                    }
                    None => return false,
                }
            }
        }
        for k in 0..self.by_event[e].len() {
            let (s, t) = self.by_event[e][k];
            let ok = match i {
                Interaction::Nop => self.relate(s, t, false),
                Interaction::Swap => self.relate(s, t, true),
                Interaction::Set => self.fix(t, true),
                Interaction::Res => self.fix(t, false),
                Interaction::Inp => self.fix(s, true) && self.fix(t, false),
                Interaction::Out => self.fix(s, false) && self.fix(t, true),
                Interaction::Used => self.fix(s, true) && self.fix(t, true),
                Interaction::Free => self.fix(s, false) && self.fix(t, false),
            };
            if !ok {
                return false;
            }
        }
        true
    }

    fn domain(&self, e: usize) -> u8 {
        let mut dom = self.net_type.mask();
        if let Some((ae, s)) = self.essp {
            if ae == e {
                let vals = self.state_values(s);
                for i in Interaction::ALL {
                    let keep = undefined_on(i).is_some_and(|x| vals & (1 << x as u8) != 0);
                    if !keep {
                        dom &= !(1 << i.index());
                    }
                }
            }
        }
        for &(s, t) in &self.by_event[e] {
            if dom == 0 {
                break;
            }
            let pairs = self.edge_pairs(s, t);
            for i in Interaction::ALL {
                if dom & (1 << i.index()) != 0 && self.masks[i.index()] & pairs == 0 {
                    dom &= !(1 << i.index());
                }
            }
        }
        dom
    }

    /// Searches for a region with restriction count at most `d` solving `atom`.
    pub(crate) fn solve(&mut self, atom: &SeparationAtom) -> Result<Option<Region>, LimitReached> {
        self.reset();
        match *atom {
            SeparationAtom::States(s, t) => {
                if !self.relate(s, t, true) {
                    return Ok(None);
                }
            }
            SeparationAtom::EventState(e, s) => self.essp = Some((e, s)),
        }
        let found = self.search()?;
        Ok(found.filter(|r| r.solves(atom)))
    }

    fn search(&mut self) -> Result<Option<Region>, LimitReached> {
        self.nodes += 1;
        if self.node_limit.is_some_and(|limit| self.nodes > limit) {
            return Err(LimitReached);
        }
        let nop_bit = 1 << Interaction::Nop.index();
        let mut forced = 0;
        let mut pick: Option<(usize, u8)> = None;
        let mut open = Vec::new();
        for e in 0..self.sig.len() {
            if self.sig[e].is_some() {
                continue;
            }
            let dom = self.domain(e);
            if dom == 0 {
                return Ok(None);
            }
            if dom & nop_bit == 0 {
                forced += 1;
            }
            open.push((e, dom));
        }
        if self.restricted + forced > self.d {
            return Ok(None);
        }
        if open.is_empty() {
            return Ok(self.region());
        }
        let tight = self.restricted + forced == self.d;
        for &(e, dom) in &open {
            let dom = if tight && dom & nop_bit != 0 {
                nop_bit
            } else {
                dom
            };
            let better = match pick {
                None => true,
                Some((pe, pd)) => {
                    let (a, b) = (dom.count_ones(), pd.count_ones());
                    a < b || (a == b && self.by_event[e].len() > self.by_event[pe].len())
                }
            };
            if better {
                pick = Some((e, dom));
            }
        }
        let (e, dom) = pick.unwrap();
        for i in Interaction::ALL {
            if dom & (1 << i.index()) == 0 {
                continue;
            }
            let mark = self.trail.len();
            if self.decide(e, i) {
                if let Some(region) = self.search()? {
                    return Ok(Some(region));
                }
            }
            self.undo_to(mark);
        }
        Ok(None)
    }

    fn region(&self) -> Option<Region> {
        let support = (0..self.ts.num_states())
            .map(|s| {
                let (r, p) = self.find(s);
                self.value[r].unwrap_or(false) ^ p
            })
            .collect();
        let signature = self.sig.iter().map(|i| i.unwrap()).collect();
        let raw = RawRegion { support, signature };
        raw.check(self.ts, self.net_type).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ts::parse_ts;

    #[test]
    fn masks_follow_the_table() {
        assert_eq!(pair_mask(Interaction::Nop), 0b1001);
        assert_eq!(pair_mask(Interaction::Inp), 0b0100);
        assert_eq!(pair_mask(Interaction::Swap), 0b0110);
        assert_eq!(undefined_on(Interaction::Used), Some(false));
        assert_eq!(undefined_on(Interaction::Set), None);
    }

    #[test]
    fn finds_swap_for_the_two_cycle() {
        let ts =
            parse_ts("states s0 s1\ninitial s0\nevents a\narc s0 a s1\narc s1 a s0\n").unwrap();
        let t1: NetType = "nop,swap,used,set".parse().unwrap();
        let mut g = Guided::new(&ts, t1, 1, None);
        let r = g
            .solve(&SeparationAtom::States(0, 1))
            .ok()
            .flatten()
            .unwrap();
        assert_eq!(r.sig(0), Interaction::Swap);
        let t0: NetType = "nop,inp,free".parse().unwrap();
        let mut g = Guided::new(&ts, t0, 1, None);
        assert!(g
            .solve(&SeparationAtom::States(0, 1))
            .ok()
            .unwrap()
            .is_none());
    }

    #[test]
    fn essp_needs_a_partial_interaction() {
        let ts =
            parse_ts("states r0 r1\ninitial r0\nevents b c\narc r0 b r1\narc r1 c r0\n").unwrap();
        let t: NetType = "nop,inp,out".parse().unwrap();
        let mut g = Guided::new(&ts, t, 2, None);
        let atom = SeparationAtom::by_name(&ts, "ESSP", "b", "r1").unwrap();
        let r = g.solve(&atom).ok().flatten().unwrap();
        assert!(r.solves(&atom));
        let t1: NetType = "nop,swap,used,set".parse().unwrap();
        let mut g = Guided::new(&ts, t1, 2, None);
        assert!(g.solve(&atom).ok().unwrap().is_none());
    }
}
