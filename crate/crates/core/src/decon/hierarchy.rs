use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Asserted facts about a graph class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassFacts {
    pub all_grids_minors: bool,
    pub all_trees_minors: bool,
    pub all_paths_minors: bool,
    pub stack_depth: usize,
    pub unbounded_multiplicity: bool,
}

impl ClassFacts {
    pub fn check(&self) -> Result<()> {
        if self.all_grids_minors && !self.all_trees_minors {
            return Err(Error::Precondition("all grids as minors implies all trees as minors".into()));
        }
        if self.all_trees_minors && !self.all_paths_minors {
            return Err(Error::Precondition("all trees as minors implies all paths as minors".into()));
        }
        Ok(())
    }
}

/// A level of the chain `T_0 < F_0 < T_1 < F_1 < ... < P < T < L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum HierarchyLevel {
    /// Trees of height at most `d`.
    Td(usize),
    /// Forests of height at most `d`.
    Fd(usize),
    Paths,
    Trees,
    Grids,
}

impl HierarchyLevel {
    fn rank(&self) -> (u8, usize, u8) {
        match *self {
            HierarchyLevel::Td(d) => (0, d, 0),
            HierarchyLevel::Fd(d) => (0, d, 1),
            HierarchyLevel::Paths => (1, 0, 0),
            HierarchyLevel::Trees => (2, 0, 0),
            HierarchyLevel::Grids => (3, 0, 0),
        }
    }
}

impl Ord for HierarchyLevel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl PartialOrd for HierarchyLevel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HierarchyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HierarchyLevel::Td(d) => write!(f, "T_{d}"),
            HierarchyLevel::Fd(d) => write!(f, "F_{d}"),
            HierarchyLevel::Paths => f.write_str("P"),
            HierarchyLevel::Trees => f.write_str("T"),
            HierarchyLevel::Grids => f.write_str("L"),
        }
    }
}

impl FromStr for HierarchyLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let depth = |d: &str| d.parse::<usize>().map_err(|_| Error::Parse(format!("bad level `{s}`")));
        match s {
            "P" => Ok(HierarchyLevel::Paths),
            "T" => Ok(HierarchyLevel::Trees),
            "L" => Ok(HierarchyLevel::Grids),
            _ => match s.split_once('_') {
                Some(("T", d)) => Ok(HierarchyLevel::Td(depth(d)?)),
                Some(("F", d)) => Ok(HierarchyLevel::Fd(depth(d)?)),
                _ => Err(Error::Parse(format!("bad level `{s}`"))),
            },
        }
    }
}

impl From<HierarchyLevel> for String {
    fn from(l: HierarchyLevel) -> String {
        l.to_string()
    }
}

impl TryFrom<String> for HierarchyLevel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// The level of a class described by `f`.
pub fn hierarchy_level(f: &ClassFacts) -> Result<HierarchyLevel> {
    f.check()?;
    Ok(if f.all_grids_minors {
        HierarchyLevel::Grids
    } else if f.all_trees_minors {
        HierarchyLevel::Trees
    } else if f.all_paths_minors {
        HierarchyLevel::Paths
    } else if f.unbounded_multiplicity {
        HierarchyLevel::Fd(f.stack_depth)
    } else {
        HierarchyLevel::Td(f.stack_depth)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cascade() {
        let paths = ClassFacts {
            all_paths_minors: true,
            ..Default::default()
        };
        assert_eq!(hierarchy_level(&paths).unwrap(), HierarchyLevel::Paths);
        let grids = ClassFacts {
            all_grids_minors: true,
            all_trees_minors: true,
            all_paths_minors: true,
            ..Default::default()
        };
        assert_eq!(hierarchy_level(&grids).unwrap(), HierarchyLevel::Grids);
        let td = ClassFacts {
            stack_depth: 3,
            ..Default::default()
        };
        assert_eq!(hierarchy_level(&td).unwrap(), HierarchyLevel::Td(3));
        let bad = ClassFacts {
            all_grids_minors: true,
            ..Default::default()
        };
        assert!(hierarchy_level(&bad).is_err());
    }

    #[test]
    fn order_and_text() {
        let chain = ["T_0", "F_0", "T_1", "F_1", "T_7", "P", "T", "L"];
        let levels: Vec<HierarchyLevel> = chain.iter().map(|s| s.parse().unwrap()).collect();
        assert!(levels.windows(2).all(|w| w[0] < w[1]));
        for (l, s) in levels.iter().zip(chain) {
            assert_eq!(l.to_string(), s);
        }
        assert_eq!(serde_json::to_string(&HierarchyLevel::Fd(2)).unwrap(), "\"F_2\"");
    }
}
