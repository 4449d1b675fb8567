//! The eight Boolean interactions between a place and a transition, and net
//! types built from them.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// A Boolean interaction: a partial function on `{0, 1}`.
///
/// The declaration order is the canonical order used everywhere an
/// interaction set is iterated (type listings, seed enumeration).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Interaction {
    Nop = 0,
    Inp = 1,
    Out = 2,
    Set = 3,
    Res = 4,
    Swap = 5,
    Used = 6,
    Free = 7,
}

impl Interaction {
    pub const ALL: [Interaction; 8] = [
        Interaction::Nop,
        Interaction::Inp,
        Interaction::Out,
        Interaction::Set,
        Interaction::Res,
        Interaction::Swap,
        Interaction::Used,
        Interaction::Free,
    ];

    /// Applies the interaction to a bit; `None` where the function is undefined.
    pub const fn apply(self, x: bool) -> Option<bool> {
        match (self, x) {
            (Interaction::Nop, x) => Some(x),
            (Interaction::Inp, true) => Some(false),
            (Interaction::Inp, false) => None,
            (Interaction::Out, false) => Some(true),
            (Interaction::Out, true) => None,
            (Interaction::Set, _) => Some(true),
            (Interaction::Res, _) => Some(false),
            (Interaction::Swap, x) => Some(!x),
            (Interaction::Used, true) => Some(true),
            (Interaction::Used, false) => None,
            (Interaction::Free, false) => Some(false),
            (Interaction::Free, true) => None,
        }
    }

    /// True for the four interactions that are undefined on some bit.
    pub const fn is_partial(self) -> bool {
        matches!(
            self,
            Interaction::Inp | Interaction::Out | Interaction::Used | Interaction::Free
        )
    }

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn name(self) -> &'static str {
        match self {
            Interaction::Nop => "nop",
            Interaction::Inp => "inp",
            Interaction::Out => "out",
            Interaction::Set => "set",
            Interaction::Res => "res",
            Interaction::Swap => "swap",
            Interaction::Used => "used",
            Interaction::Free => "free",
        }
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Interaction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unknown interaction `{0}`")]
    UnknownInteraction(String),
    #[error("a net type needs at least one interaction")]
    Empty,
    #[error("interaction `{interaction}` is not a member of type {net_type}")]
    NotAMember {
        interaction: Interaction,
        net_type: NetType,
    },
}

impl FromStr for Interaction {
    type Err = TypeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Interaction::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| TypeError::UnknownInteraction(s.to_string()))
    }
}

/// A Boolean type of net, stored as a bit set over [`Interaction::ALL`].
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct NetType(u8);

impl NetType {
    pub fn new<I: IntoIterator<Item = Interaction>>(members: I) -> Result<Self, TypeError> {
        let mask = members
            .into_iter()
            .fold(0u8, |acc, i| acc | (1 << i.index()));
        if mask == 0 {
            return Err(TypeError::Empty);
        }
        Ok(NetType(mask))
    }

    pub fn contains(self, i: Interaction) -> bool {
        self.0 & (1 << i.index()) != 0
    }

    /// Members in canonical order.
    pub fn members(self) -> impl Iterator<Item = Interaction> + Clone {
        Interaction::ALL
            .into_iter()
            .filter(move |&i| self.contains(i))
    }

    /// Members other than `nop`, in canonical order.
    pub fn non_nop(self) -> Vec<Interaction> {
        self.members().filter(|&i| i != Interaction::Nop).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn has_nop(self) -> bool {
        self.contains(Interaction::Nop)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    /// The transition function of the type: `δ(x, i) = i(x)` for members.
    pub fn step(self, x: bool, i: Interaction) -> Result<Option<bool>, TypeError> {
        if !self.contains(i) {
            return Err(TypeError::NotAMember {
                interaction: i,
                net_type: self,
            });
        }
        Ok(i.apply(x))
    }
}

impl fmt::Display for NetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.members().map(Interaction::name).collect();
        f.write_str(&names.join(","))
    }
}

impl fmt::Debug for NetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromStr for NetType {
    type Err = TypeError;

    /// Parses a comma list such as `nop,inp,swap`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let members = s
            .split(',')
            .map(str::trim)
            .filter(|tok| !tok.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Interaction>, _>>()?;
        NetType::new(members)
    }
}

impl Serialize for NetType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.members())
    }
}

#[cfg(test)]
mod tests {
    use super::Interaction::*;
    use super::*;

    #[test]
    fn table_matches_all_sixteen_cells() {
        let expected = [
            (Nop, Some(false), Some(true)),
            (Inp, None, Some(false)),
            (Out, Some(true), None),
            (Set, Some(true), Some(true)),
            (Res, Some(false), Some(false)),
            (Swap, Some(true), Some(false)),
            (Used, None, Some(true)),
            (Free, Some(false), None),
        ];
        let mut defined = 0;
        for (i, on0, on1) in expected {
            assert_eq!(i.apply(false), on0, "{i}(0)");
            assert_eq!(i.apply(true), on1, "{i}(1)");
            defined += on0.is_some() as usize + on1.is_some() as usize;
        }
        assert_eq!(defined, 12);
    }

    #[test]
    fn apply_examples() {
        assert_eq!(Inp.apply(true), Some(false));
        assert_eq!(Inp.apply(false), None);
        assert_eq!(Nop.apply(false), Some(false));
        assert_eq!(Swap.apply(false), Some(true));
    }

    #[test]
    fn partial_iff_some_cell_empty() {
        for i in Interaction::ALL {
            let partial = i.apply(false).is_none() || i.apply(true).is_none();
            assert_eq!(i.is_partial(), partial, "{i}");
        }
    }

    #[test]
    fn type_step_examples() {
        let t: NetType = "nop,inp,swap".parse().unwrap();
        assert_eq!(t.step(true, Inp), Ok(Some(false)));
        assert!(matches!(
            t.step(false, Set),
            Err(TypeError::NotAMember { .. })
        ));
        let t0: NetType = "nop,inp,free".parse().unwrap();
        assert_eq!(t0.step(true, Free), Ok(None));
    }

    #[test]
    fn parse_and_display() {
        let t: NetType = "swap, nop ,used,set".parse().unwrap();
        assert_eq!(t.to_string(), "nop,set,swap,used");
        assert_eq!(t.len(), 4);
        assert_eq!(t.non_nop(), vec![Set, Swap, Used]);
        assert_eq!("".parse::<NetType>(), Err(TypeError::Empty));
        assert!(matches!(
            "nop,frob".parse::<NetType>(),
            Err(TypeError::UnknownInteraction(_))
        ));
    }
}
