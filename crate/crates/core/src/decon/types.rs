use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphlib::{Graph, RootedForest};
use crate::relstruct::{Elem, Structure, StructureSpec};

/// Which covering condition the bags must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every reflexive edge of the subject lies in the union of two bags
    /// indexed by a reflexive edge of the host.
    Deconstruction,
    /// Every reflexive edge of the subject lies inside a single bag.
    Decomposition,
}

/// Host-indexed bags over a subject graph.
///
/// Construction checks only the shape (one bag per host vertex, bag entries
/// are subject vertices); the covering conditions are checked by
/// [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deconstruction {
    subject: Graph,
    host: Graph,
    bags: Vec<Vec<Elem>>,
    mode: Mode,
    roots: Option<Vec<Elem>>,
}

impl Deconstruction {
    pub fn new(subject: Graph, host: Graph, mut bags: Vec<Vec<Elem>>, mode: Mode) -> Result<Self> {
        if bags.len() != host.len() {
            return Err(Error::Argument(format!(
                "{} bags for a host with {} vertices",
                bags.len(),
                host.len()
            )));
        }
        for b in &mut bags {
            b.sort_unstable();
            b.dedup();
            if let Some(&bad) = b.iter().find(|&&g| g as usize >= subject.len()) {
                return Err(Error::Argument(format!("bag entry {bad} is not a subject vertex")));
            }
        }
        Ok(Deconstruction {
            subject,
            host,
            bags,
            mode,
            roots: None,
        })
    }

    /// Attaches host roots; the host must then be a forest.
    pub fn with_roots(mut self, roots: Vec<Elem>) -> Result<Self> {
        RootedForest::new(self.host.clone(), roots.clone())?;
        self.roots = Some(roots);
        Ok(self)
    }

    pub fn subject(&self) -> &Graph {
        &self.subject
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn bag(&self, h: Elem) -> &[Elem] {
        &self.bags[h as usize]
    }

    pub fn bags(&self) -> &[Vec<Elem>] {
        &self.bags
    }

    pub fn roots(&self) -> Option<&[Elem]> {
        self.roots.as_deref()
    }

    /// The host as a rooted forest, using stored roots or least vertices.
    pub fn rooted_host(&self) -> Result<RootedForest> {
        match &self.roots {
            Some(r) => RootedForest::new(self.host.clone(), r.clone()),
            None => RootedForest::rooted_at_least(self.host.clone()),
        }
    }

    pub fn max_bag(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Same bags read in the other mode.
    pub fn as_mode(&self, mode: Mode) -> Deconstruction {
        Deconstruction {
            mode,
            ..self.clone()
        }
    }

    /// Host vertices whose bag contains `g`.
    pub fn occurrences(&self, g: Elem) -> Vec<Elem> {
        self.host
            .vertices()
            .filter(|&h| self.bags[h as usize].binary_search(&g).is_ok())
            .collect()
    }

    pub fn to_spec(&self) -> DeconstructionSpec {
        DeconstructionSpec {
            subject: self.subject.as_structure().to_spec(),
            host: self.host.as_structure().to_spec(),
            mode: self.mode,
            bags: self
                .host
                .vertices()
                .map(|h| {
                    (
                        self.host.name(h).to_string(),
                        self.bags[h as usize].iter().map(|&g| self.subject.name(g).to_string()).collect(),
                    )
                })
                .collect(),
            roots: self
                .roots
                .as_ref()
                .map(|r| r.iter().map(|&h| self.host.name(h).to_string()).collect()),
        }
    }

    pub fn from_spec(spec: &DeconstructionSpec) -> Result<Self> {
        let subject = Graph::from_structure(Structure::from_spec(&spec.subject)?)?;
        let host = Graph::from_structure(Structure::from_spec(&spec.host)?)?;
        let mut bags = vec![Vec::new(); host.len()];
        let mut seen = vec![false; host.len()];
        for (h, members) in &spec.bags {
            let hi = host.vertex(h)?;
            seen[hi as usize] = true;
            bags[hi as usize] = members.iter().map(|g| subject.vertex(g)).collect::<Result<_>>()?;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Argument(format!("host vertex `{}` has no bag", host.name(i as Elem))));
        }
        let d = Deconstruction::new(subject, host, bags, spec.mode)?;
        match &spec.roots {
            Some(r) => {
                let ids = r.iter().map(|n| d.host.vertex(n)).collect::<Result<Vec<_>>>()?;
                d.with_roots(ids)
            }
            None => Ok(d),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("deconstructions serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DeconstructionSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_spec(&spec)
    }
}

/// Serializable form; bags are keyed by host vertex name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeconstructionSpec {
    pub subject: StructureSpec,
    pub host: StructureSpec,
    pub mode: Mode,
    pub bags: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<String>>,
}

/// A failed covering or connectivity condition, by vertex name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeconViolation {
    /// No pair of bags along a reflexive host edge contains both vertices.
    Uncovered(String, String),
    /// No single bag contains both vertices.
    NotInOneBag(String, String),
    /// The host vertices whose bags contain this vertex are disconnected.
    Disconnected(String),
}

impl fmt::Display for DeconViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeconViolation::Uncovered(a, b) => write!(f, "coverage fails for ({a},{b})"),
            DeconViolation::NotInOneBag(a, b) => write!(f, "no bag contains both {a} and {b}"),
            DeconViolation::Disconnected(g) => write!(f, "bags containing {g} are not connected"),
        }
    }
}

/// Checks the covering condition of the value's mode and connectivity.
pub fn validate(d: &Deconstruction) -> Vec<DeconViolation> {
    let g = &d.subject;
    let h = &d.host;
    let occ: Vec<Vec<Elem>> = g.vertices().map(|v| d.occurrences(v)).collect();
    let mut out = Vec::new();
    let covered = |a: Elem, b: Elem| -> bool {
        let (oa, ob) = (&occ[a as usize], &occ[b as usize]);
        match d.mode {
            Mode::Decomposition => oa.iter().any(|x| ob.binary_search(x).is_ok()),
            Mode::Deconstruction => oa.iter().any(|&x| ob.iter().any(|&y| h.refl_adjacent(x, y))),
        }
    };
    for a in g.vertices() {
        let partners = std::iter::once(a).chain(g.neighbors(a).iter().copied().filter(|&b| b > a));
        for b in partners {
            if !covered(a, b) {
                let (na, nb) = (g.name(a).to_string(), g.name(b).to_string());
                out.push(match d.mode {
                    Mode::Deconstruction => DeconViolation::Uncovered(na, nb),
                    Mode::Decomposition => DeconViolation::NotInOneBag(na, nb),
                });
            }
        }
    }
    for v in g.vertices() {
        if !h.is_connected_set(&occ[v as usize]) {
            out.push(DeconViolation::Disconnected(g.name(v).to_string()));
        }
    }
    out
}

pub(crate) fn ensure_valid(d: &Deconstruction, what: &str) -> Result<()> {
    let v = validate(d);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{what} is not valid: {}",
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
        )))
    }
}

/// Largest `|B_h ∪ B_h'|` over reflexive host edges `(h, h')`.
pub fn deconstruction_width(d: &Deconstruction) -> usize {
    let mut best = d.max_bag();
    for (x, y) in d.host.edges() {
        let (a, b) = (&d.bags[x as usize], &d.bags[y as usize]);
        let common = a.iter().filter(|g| b.binary_search(g).is_ok()).count();
        best = best.max(a.len() + b.len() - common);
    }
    best
}

/// Largest bag size minus one.
pub fn decomposition_width(d: &Deconstruction) -> usize {
    d.max_bag().saturating_sub(1)
}

/// Width in the convention of the value's mode; fails on invalid input.
pub fn width(d: &Deconstruction) -> Result<usize> {
    ensure_valid(d, "deconstruction")?;
    Ok(match d.mode {
        Mode::Deconstruction => deconstruction_width(d),
        Mode::Decomposition => decomposition_width(d),
    })
}
