use crate::error::{Error, Result};

/// Search step budget for backtracking procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Budget(pub u64);

impl Budget {
    pub const UNLIMITED: Budget = Budget(u64::MAX);
}

impl Default for Budget {
    fn default() -> Self {
        Budget(50_000_000)
    }
}

/// Size guards for the exponential procedures.
///
/// Every guarded operation fails with [`Error::Guard`] instead of running
/// past these bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Universe size accepted by `is_core` and `core`.
    pub core_elements: usize,
    /// Vertex count accepted by tree depth, treewidth and pathwidth.
    pub width_vertices: usize,
    /// Vertex count accepted by minor search.
    pub minor_vertices: usize,
    /// Total pebble count accepted by `duplicator_wins`.
    pub pebbles: usize,
    /// Number of set vectors an unfolding may have.
    pub set_vectors: usize,
    /// Size of a partial-homomorphism table in the bag reductions.
    pub ph_elements: usize,
    /// Number of disjuncts produced when moving disjunctions outwards.
    pub disjuncts: usize,
    /// Number of merged trees in the disjunction-to-homomorphism construction.
    pub merged_trees: usize,
    /// Largest relation arity accepted from input files.
    pub max_arity: usize,
    /// Number of candidate tuples an interpretation may examine.
    pub interpretation_tuples: usize,
    pub hom_budget: Budget,
    pub minor_budget: Budget,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            core_elements: 8,
            width_vertices: 12,
            minor_vertices: 24,
            pebbles: 6,
            set_vectors: 50_000,
            ph_elements: 20_000,
            disjuncts: 256,
            merged_trees: 256,
            max_arity: 4,
            interpretation_tuples: 20_000_000,
            hom_budget: Budget::default(),
            minor_budget: Budget(5_000_000),
        }
    }
}

impl Limits {
    /// Applies overrides of the form `key=value,key=value`.
    ///
    /// ```
    /// let mut l = homlab::Limits::default();
    /// l.apply_overrides("core=10, pebbles=7").unwrap();
    /// assert_eq!((l.core_elements, l.pebbles), (10, 7));
    /// ```
    pub fn apply_overrides(&mut self, spec: &str) -> Result<()> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("guard override `{item}` is not key=value")))?;
            let n: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("guard value `{value}` is not a number")))?;
            let u = n as usize;
            match key.trim() {
                "core" => self.core_elements = u,
                "width" => self.width_vertices = u,
                "minor" => self.minor_vertices = u,
                "pebbles" => self.pebbles = u,
                "set-vectors" => self.set_vectors = u,
                "ph" => self.ph_elements = u,
                "disjuncts" => self.disjuncts = u,
                "merged-trees" => self.merged_trees = u,
                "arity" => self.max_arity = u,
                "interpretation" => self.interpretation_tuples = u,
                "hom-budget" => self.hom_budget = Budget(n),
                "minor-budget" => self.minor_budget = Budget(n),
                other => return Err(Error::Parse(format!("unknown guard `{other}`"))),
            }
        }
        Ok(())
    }
}
