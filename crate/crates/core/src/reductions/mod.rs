//! Hitting Set instances and their encodings as synthesis problems.

mod gadgets;

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::OnceLock;

use itertools::Itertools;
use regex::Regex;
use serde::Serialize;
use thiserror::Error;

use crate::interaction::{Interaction, NetType};
use crate::region::{Region, SeparationAtom};
use crate::ts::{is_identifier, TransitionSystem};

pub use gadgets::{
    build_gadget, build_inp_res_swap, build_inp_set, build_set_res_free, build_set_swap_used,
    relevant_paths, RelevantPath,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: `{name}` is not in the universe")]
    UnknownElement { line: usize, name: String },
    #[error("`{0}` appears twice in the universe")]
    DuplicateElement(String),
    #[error("set {set} lists `{name}` twice")]
    DuplicateInSet { set: usize, name: String },
    #[error("set {0} is empty")]
    EmptySet(usize),
    #[error("element name `{0}` is reserved for gadget events")]
    ReservedName(String),
    #[error("set {set} refers to element index {index}, the universe has {size}")]
    IndexOutOfRange {
        set: usize,
        index: usize,
        size: usize,
    },
    #[error("no `kappa` line")]
    MissingKappa,
    #[error("no `universe` line")]
    MissingUniverse,
}

fn reserved() -> &'static Regex {
    static RESERVED: OnceLock<Regex> = OnceLock::new();
    RESERVED.get_or_init(|| {
        Regex::new(
            r"^(k|z[1-4]?|o[12]?|(w|sep|u)[0-9]+|[ac][0-9]+_[0-9]+|(v|plus)[0-9]+_[0-9]+_[0-9]+)$",
        )
        .unwrap()
    })
}

/// Universe, family of non-empty subsets (element indices in increasing
/// universe order), and the budget `kappa`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingSetInstance {
    universe: Vec<String>,
    family: Vec<Vec<usize>>,
    kappa: usize,
}

impl HittingSetInstance {
    /// Builds an instance. Sets are given as element indices in any order
    /// and are stored sorted.
    pub fn new(
        universe: Vec<String>,
        family: Vec<Vec<usize>>,
        kappa: usize,
    ) -> Result<Self, HsError> {
        for (k, name) in universe.iter().enumerate() {
            if !is_identifier(name) {
                return Err(HsError::Syntax {
                    line: 0,
                    message: format!("`{name}` is not a valid identifier"),
                });
            }
            if reserved().is_match(name) {
                return Err(HsError::ReservedName(name.clone()));
            }
            if universe[..k].contains(name) {
                return Err(HsError::DuplicateElement(name.clone()));
            }
        }
        let mut sorted = Vec::with_capacity(family.len());
        for (i, set) in family.into_iter().enumerate() {
            if set.is_empty() {
                return Err(HsError::EmptySet(i + 1));
            }
            if let Some(&index) = set.iter().find(|&&x| x >= universe.len()) {
                return Err(HsError::IndexOutOfRange {
                    set: i + 1,
                    index,
                    size: universe.len(),
                });
            }
            let mut set = set;
            set.sort_unstable();
            if let Some(w) = set.windows(2).find(|w| w[0] == w[1]) {
                return Err(HsError::DuplicateInSet {
                    set: i + 1,
                    name: universe[w[0]].clone(),
                });
            }
            sorted.push(set);
        }
        Ok(HittingSetInstance {
            universe,
            family: sorted,
            kappa,
        })
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn family(&self) -> &[Vec<usize>] {
        &self.family
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn with_kappa(&self, kappa: usize) -> Self {
        HittingSetInstance {
            kappa,
            ..self.clone()
        }
    }

    /// Names of the elements of set `i` (0-based), in universe order.
    pub fn set_names(&self, i: usize) -> Vec<&str> {
        self.family[i]
            .iter()
            .map(|&x| self.universe[x].as_str())
            .collect()
    }

    /// True if `hits` (element indices) meets every set.
    pub fn is_hitting_set(&self, hits: &[usize]) -> bool {
        self.family
            .iter()
            .all(|set| set.iter().any(|x| hits.contains(x)))
    }

    pub fn names(&self, elements: &[usize]) -> Vec<String> {
        elements.iter().map(|&x| self.universe[x].clone()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "universe {}", self.universe.join(" ")).unwrap();
        for i in 0..self.family.len() {
            writeln!(out, "set {}", self.set_names(i).join(" ")).unwrap();
        }
        writeln!(out, "kappa {}", self.kappa).unwrap();
        out
    }
}

/// Parses `universe ...`, `set ...` and `kappa N` lines; `#` starts a comment.
pub fn parse_hs(text: &str) -> Result<HittingSetInstance, HsError> {
    let mut universe: Option<Vec<String>> = None;
    let mut sets: Vec<(usize, Vec<String>)> = Vec::new();
    let mut kappa = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let tokens: Vec<&str> = raw
            .split('#')
            .next()
            .unwrap_or("")
            .split_whitespace()
            .collect();
        let syntax = |message: String| HsError::Syntax { line, message };
        match tokens.as_slice() {
            [] => {}
            ["universe", names @ ..] => {
                if universe.is_some() {
                    return Err(syntax("second `universe` line".into()));
                }
                universe = Some(names.iter().map(|s| s.to_string()).collect());
            }
            ["set", names @ ..] => sets.push((line, names.iter().map(|s| s.to_string()).collect())),
            ["kappa", n] => {
                if kappa.is_some() {
                    return Err(syntax("second `kappa` line".into()));
                }
                kappa = Some(
                    n.parse::<usize>()
                        .map_err(|_| syntax(format!("`{n}` is not a natural number")))?,
                );
            }
            [keyword, ..] => return Err(syntax(format!("unexpected `{keyword}` line"))),
        }
    }
    let universe = universe.ok_or(HsError::MissingUniverse)?;
    let kappa = kappa.ok_or(HsError::MissingKappa)?;
    let mut family = Vec::with_capacity(sets.len());
    for (line, names) in sets {
        let set = names
            .iter()
            .map(|n| {
                universe
                    .iter()
                    .position(|u| u == n)
                    .ok_or_else(|| HsError::UnknownElement {
                        line,
                        name: n.clone(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        family.push(set);
    }
    HittingSetInstance::new(universe, family, kappa)
}

impl FromStr for HittingSetInstance {
    type Err = HsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_hs(s)
    }
}

/// First hitting set of size at most `kappa`, trying sizes in increasing
/// order and subsets of one size in lexicographic order of indices.
pub fn hs_brute_force(inst: &HittingSetInstance) -> Option<Vec<usize>> {
    (0..=inst.kappa.min(inst.universe.len())).find_map(|size| {
        (0..inst.universe.len())
            .combinations(size)
            .find(|candidate| inst.is_hitting_set(candidate))
    })
}

/// Universe elements whose event carries a non-`nop` signature in `region`.
/// Elements that occur in no set have no event and are never returned.
pub fn extract_hitting_set(
    inst: &HittingSetInstance,
    ts: &TransitionSystem,
    region: &Region,
) -> Vec<usize> {
    (0..inst.universe.len())
        .filter(|&x| {
            ts.event_index(&inst.universe[x])
                .is_some_and(|e| region.sig(e) != Interaction::Nop)
        })
        .collect()
}

/// The four gadget constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Construction {
    #[serde(rename = "2.1")]
    InpSet,
    #[serde(rename = "2.2")]
    SetResFree,
    #[serde(rename = "2.3")]
    SetSwapUsed,
    #[serde(rename = "2.4")]
    InpResSwap,
}

impl Construction {
    pub const ALL: [Construction; 4] = [
        Construction::InpSet,
        Construction::SetResFree,
        Construction::SetSwapUsed,
        Construction::InpResSwap,
    ];

    /// The type each construction is checked against.
    pub fn designated_type(self) -> NetType {
        let list = match self {
            Construction::InpSet => "nop,inp,set",
            Construction::SetResFree => "nop,set,res,free",
            Construction::SetSwapUsed => "nop,set,swap,used",
            Construction::InpResSwap => "nop,inp,res,swap",
        };
        list.parse().unwrap()
    }

    /// Restriction budget as a function of `kappa`.
    pub fn budget(self, kappa: usize) -> usize {
        match self {
            Construction::InpSet => kappa + 2,
            _ => kappa + 4,
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construction::InpSet => "2.1",
            Construction::SetResFree => "2.2",
            Construction::SetSwapUsed => "2.3",
            Construction::InpResSwap => "2.4",
        })
    }
}

impl FromStr for Construction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "2.1" => Ok(Construction::InpSet),
            "2.2" => Ok(Construction::SetResFree),
            "2.3" => Ok(Construction::SetSwapUsed),
            "2.4" => Ok(Construction::InpResSwap),
            other => Err(format!(
                "unknown construction `{other}`, expected 2.1 to 2.4"
            )),
        }
    }
}

/// A generated transition system with its budget and key atom.
#[derive(Debug, Clone)]
pub struct GadgetOutput {
    pub ts: TransitionSystem,
    pub d: usize,
    pub alpha: SeparationAtom,
    pub construction: Construction,
}

impl GadgetOutput {
    /// TS text preceded by `# d = N` and `# alpha = ESSP e s` comment lines.
    pub fn to_text(&self) -> String {
        format!(
            "# d = {}\n# alpha = {}\n{}",
            self.d,
            self.alpha.named(&self.ts),
            self.ts.to_text()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str =
        "universe X1 X2 X3 X4\nset X1 X2\nset X2 X3\nset X1 X4\nset X1 X3 X4\nkappa 2\n";

    #[test]
    fn parse_and_print() {
        let inst = parse_hs(EXAMPLE).unwrap();
        assert_eq!(inst.family().len(), 4);
        assert_eq!(inst.set_names(3), ["X1", "X3", "X4"]);
        assert_eq!(inst.to_text(), EXAMPLE);
        let shuffled = parse_hs("universe A B\nset B A\nkappa 1\n").unwrap();
        assert_eq!(shuffled.set_names(0), ["A", "B"]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_hs("universe A\nset B\nkappa 1\n"),
            Err(HsError::UnknownElement { line: 2, .. })
        ));
        assert!(matches!(
            parse_hs("universe A A\nkappa 1\n"),
            Err(HsError::DuplicateElement(_))
        ));
        assert!(matches!(
            parse_hs("universe A\nset A A\nkappa 1\n"),
            Err(HsError::DuplicateInSet { .. })
        ));
        assert!(matches!(
            parse_hs("universe A\nset\nkappa 1\n"),
            Err(HsError::EmptySet(1))
        ));
        assert!(matches!(
            parse_hs("universe k\nkappa 1\n"),
            Err(HsError::ReservedName(_))
        ));
        assert!(matches!(
            parse_hs("universe w3\nkappa 1\n"),
            Err(HsError::ReservedName(_))
        ));
        assert_eq!(parse_hs("universe A\n"), Err(HsError::MissingKappa));
        assert!(parse_hs("universe A\nkappa x\n").is_err());
        // names that merely look similar are fine
        assert!(parse_hs("universe kk z5 o3 w\nkappa 0\n").is_ok());
    }

    #[test]
    fn brute_force_on_the_example() {
        let inst = parse_hs(EXAMPLE).unwrap();
        let hs = hs_brute_force(&inst).unwrap();
        assert_eq!(hs.len(), 2);
        assert!(inst.is_hitting_set(&hs));
        assert!(inst.is_hitting_set(&[0, 2]));
        assert_eq!(hs_brute_force(&inst.with_kappa(1)), None);
        assert_eq!(hs_brute_force(&inst.with_kappa(4)).unwrap().len(), 2);
    }

    #[test]
    fn empty_family_is_hit_by_nothing() {
        let inst = parse_hs("universe A\nkappa 0\n").unwrap();
        assert_eq!(hs_brute_force(&inst), Some(vec![]));
    }

    #[test]
    fn construction_parameters() {
        assert_eq!(Construction::InpSet.budget(0), 2);
        assert_eq!(Construction::SetSwapUsed.budget(2), 6);
        assert_eq!("2.4".parse::<Construction>(), Ok(Construction::InpResSwap));
        assert!("3.1".parse::<Construction>().is_err());
        assert_eq!(
            Construction::SetResFree.designated_type().to_string(),
            "nop,set,res,free"
        );
    }
}
