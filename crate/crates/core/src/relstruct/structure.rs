use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an element in a structure's canonical order.
pub type Elem = u32;

/// Relation symbols with their arities.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vocabulary(BTreeMap<String, usize>);

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// The vocabulary `{E/2}` of graphs.
    pub fn graph() -> Self {
        Self::new().with("E", 2)
    }

    /// Builder-style insertion; panics on a conflicting redefinition.
    pub fn with(mut self, symbol: &str, arity: usize) -> Self {
        self.insert(symbol, arity).expect("conflicting symbol");
        self
    }

    /// Adds a symbol. Re-adding with the same arity is a no-op.
    pub fn insert(&mut self, symbol: &str, arity: usize) -> Result<()> {
        if arity == 0 {
            return Err(Error::Argument(format!("symbol `{symbol}` has arity 0")));
        }
        match self.0.get(symbol) {
            Some(&a) if a != arity => Err(Error::NameClash(symbol.to_string())),
            _ => {
                self.0.insert(symbol.to_string(), arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, symbol: &str) -> Option<usize> {
        self.0.get(symbol).copied()
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.0.contains_key(symbol)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, usize)> {
        self.0.iter().map(|(s, &a)| (s.as_str(), a))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.0.values().copied().max().unwrap_or(0)
    }

    /// Union of two vocabularies; a symbol with two arities is an error.
    pub fn union(&self, other: &Vocabulary) -> Result<Vocabulary> {
        let mut out = self.clone();
        for (s, a) in other.symbols() {
            out.insert(s, a)
                .map_err(|_| Error::VocabularyMismatch(format!("`{s}` has two arities")))?;
        }
        Ok(out)
    }
}

impl FromIterator<(String, usize)> for Vocabulary {
    fn from_iter<I: IntoIterator<Item = (String, usize)>>(iter: I) -> Self {
        Vocabulary(iter.into_iter().collect())
    }
}

/// A relation stored as a sorted, duplicate-free table of flattened tuples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    arity: usize,
    data: Vec<Elem>,
}

impl Relation {
    fn from_unsorted(arity: usize, mut data: Vec<Elem>) -> Self {
        let mut rows: Vec<&[Elem]> = data.chunks_exact(arity).collect();
        rows.sort_unstable();
        rows.dedup();
        let sorted: Vec<Elem> = rows.concat();
        data.clear();
        Relation {
            arity,
            data: sorted,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn tuple(&self, i: usize) -> &[Elem] {
        &self.data[i * self.arity..(i + 1) * self.arity]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Elem]> + '_ {
        self.data.chunks_exact(self.arity)
    }

    pub fn contains(&self, t: &[Elem]) -> bool {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.tuple(mid).cmp(t) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

/// A finite relational structure with a nonempty universe.
///
/// Elements are named; the canonical order is the lexicographic order of
/// names and elements are addressed by their position in it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    vocab: Vocabulary,
    names: Vec<String>,
    rels: BTreeMap<String, Relation>,
}

impl Structure {
    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Element names in canonical order.
    pub fn universe(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// Always false: universes are nonempty.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        0..self.names.len() as Elem
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<Elem> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(|i| i as Elem)
    }

    /// Looks up an element, failing with an argument error for foreign names.
    pub fn elem(&self, name: &str) -> Result<Elem> {
        self.index_of(name)
            .ok_or_else(|| Error::Argument(format!("`{name}` is not an element")))
    }

    /// The interpretation of `symbol`; every vocabulary symbol has one.
    pub fn relation(&self, symbol: &str) -> Option<&Relation> {
        self.rels.get(symbol)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.rels.iter().map(|(s, r)| (s.as_str(), r))
    }

    pub fn holds(&self, symbol: &str, t: &[Elem]) -> bool {
        self.rels.get(symbol).is_some_and(|r| r.contains(t))
    }

    pub fn tuple_count(&self) -> usize {
        self.rels.values().map(Relation::len).sum()
    }

    pub fn same_vocabulary(&self, other: &Structure) -> Result<()> {
        if self.vocab == other.vocab {
            Ok(())
        } else {
            Err(Error::VocabularyMismatch(format!(
                "{:?} vs {:?}",
                self.vocab.0.keys().collect::<Vec<_>>(),
                other.vocab.0.keys().collect::<Vec<_>>()
            )))
        }
    }

    /// Serializable form with tuples written by name.
    pub fn to_spec(&self) -> StructureSpec {
        StructureSpec {
            vocabulary: self.vocab.clone(),
            universe: self.names.clone(),
            relations: self
                .rels
                .iter()
                .map(|(s, r)| {
                    let rows = r
                        .iter()
                        .map(|t| t.iter().map(|&e| self.names[e as usize].clone()).collect())
                        .collect();
                    (s.clone(), rows)
                })
                .collect(),
        }
    }

    pub fn from_spec(spec: &StructureSpec) -> Result<Structure> {
        let violations = validate_structure(spec);
        if !violations.is_empty() {
            return Err(Error::Invalid(
                violations.iter().map(ToString::to_string).collect(),
            ));
        }
        let mut b = StructureBuilder::new(spec.vocabulary.clone());
        for n in &spec.universe {
            b.element(n.clone());
        }
        for (s, rows) in &spec.relations {
            for row in rows {
                let ids: Vec<Elem> = row.iter().map(|n| b.lookup(n).unwrap()).collect();
                b.tuple(s, &ids)?;
            }
        }
        b.finish()
    }

    /// Re-checks every invariant through the serializable form.
    pub fn validate(&self) -> Vec<Violation> {
        validate_structure(&self.to_spec())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("structures serialize")
    }

    pub fn from_json(text: &str) -> Result<Structure> {
        let spec: StructureSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Structure::from_spec(&spec)
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(","))?;
        for (s, r) in &self.rels {
            write!(f, " {s}=[")?;
            for (i, t) in r.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                let parts: Vec<&str> = t.iter().map(|&e| self.name(e)).collect();
                write!(f, "({})", parts.join(","))?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Incremental constructor; elements may be added in any order.
#[derive(Debug, Clone)]
pub struct StructureBuilder {
    vocab: Vocabulary,
    names: Vec<String>,
    lookup: std::collections::HashMap<String, Elem>,
    duplicate: Option<String>,
    tuples: BTreeMap<String, Vec<Elem>>,
}

impl StructureBuilder {
    pub fn new(vocab: Vocabulary) -> Self {
        StructureBuilder {
            vocab,
            names: Vec::new(),
            lookup: Default::default(),
            duplicate: None,
            tuples: BTreeMap::new(),
        }
    }

    /// Adds a fresh element and returns its builder-local id.
    /// A repeated name is reported by [`finish`](Self::finish).
    pub fn element(&mut self, name: impl Into<String>) -> Elem {
        let name = name.into();
        let id = self.names.len() as Elem;
        if self.lookup.insert(name.clone(), id).is_some() && self.duplicate.is_none() {
            self.duplicate = Some(name.clone());
        }
        self.names.push(name);
        id
    }

    /// Returns the id of `name`, adding it if new.
    pub fn intern(&mut self, name: &str) -> Elem {
        match self.lookup.get(name) {
            Some(&id) => id,
            None => self.element(name.to_string()),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Elem> {
        self.lookup.get(name).copied()
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn element_count(&self) -> usize {
        self.names.len()
    }

    pub fn tuple(&mut self, symbol: &str, t: &[Elem]) -> Result<()> {
        let arity = self
            .vocab
            .arity(symbol)
            .ok_or_else(|| Error::Argument(format!("unknown symbol `{symbol}`")))?;
        if t.len() != arity {
            return Err(Error::Argument(format!(
                "tuple of length {} for `{symbol}` of arity {arity}",
                t.len()
            )));
        }
        if let Some(&bad) = t.iter().find(|&&e| e as usize >= self.names.len()) {
            return Err(Error::Argument(format!("element id {bad} out of range")));
        }
        self.tuples.entry(symbol.to_string()).or_default().extend_from_slice(t);
        Ok(())
    }

    pub fn finish(self) -> Result<Structure> {
        if let Some(d) = self.duplicate {
            return Err(Error::NameClash(d));
        }
        if self.names.is_empty() {
            return Err(Error::Argument("empty universe".into()));
        }
        let mut order: Vec<usize> = (0..self.names.len()).collect();
        order.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        let mut rank = vec![0 as Elem; order.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r as Elem;
        }
        let mut names = self.names;
        let sorted_names: Vec<String> = order.iter().map(|&i| std::mem::take(&mut names[i])).collect();
        let mut rels = BTreeMap::new();
        for (s, a) in self.vocab.symbols() {
            let data: Vec<Elem> = self
                .tuples
                .get(s)
                .map(|d| d.iter().map(|&e| rank[e as usize]).collect())
                .unwrap_or_default();
            rels.insert(s.to_string(), Relation::from_unsorted(a, data));
        }
        Ok(Structure {
            vocab: self.vocab,
            names: sorted_names,
            rels,
        })
    }
}

/// Name-based serializable form of a structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureSpec {
    pub vocabulary: Vocabulary,
    pub universe: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<String>>>,
}

/// A broken invariant of a [`StructureSpec`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyUniverse,
    DuplicateElement(String),
    ZeroArity(String),
    UnknownSymbol(String),
    WrongArity { symbol: String, tuple: Vec<String> },
    ForeignElement { symbol: String, tuple: Vec<String>, element: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyUniverse => write!(f, "empty universe"),
            Violation::DuplicateElement(e) => write!(f, "duplicate element `{e}`"),
            Violation::ZeroArity(s) => write!(f, "symbol `{s}` has arity 0"),
            Violation::UnknownSymbol(s) => write!(f, "relation for unknown symbol `{s}`"),
            Violation::WrongArity { symbol, tuple } => {
                write!(f, "tuple ({}) has the wrong arity for `{symbol}`", tuple.join(","))
            }
            Violation::ForeignElement {
                symbol,
                tuple,
                element,
            } => write!(
                f,
                "foreign element `{element}` in tuple ({}) of `{symbol}`",
                tuple.join(",")
            ),
        }
    }
}

/// Checks every structure invariant; never aborts.
pub fn validate_structure(spec: &StructureSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    if spec.universe.is_empty() {
        out.push(Violation::EmptyUniverse);
    }
    let mut seen = std::collections::BTreeSet::new();
    for e in &spec.universe {
        if !seen.insert(e.as_str()) {
            out.push(Violation::DuplicateElement(e.clone()));
        }
    }
    for (s, a) in spec.vocabulary.symbols() {
        if a == 0 {
            out.push(Violation::ZeroArity(s.to_string()));
        }
    }
    for (s, rows) in &spec.relations {
        let Some(arity) = spec.vocabulary.arity(s) else {
            out.push(Violation::UnknownSymbol(s.clone()));
            continue;
        };
        for row in rows {
            if row.len() != arity {
                out.push(Violation::WrongArity {
                    symbol: s.clone(),
                    tuple: row.clone(),
                });
            }
            if let Some(bad) = row.iter().find(|e| !seen.contains(e.as_str())) {
                out.push(Violation::ForeignElement {
                    symbol: s.clone(),
                    tuple: row.clone(),
                    element: bad.clone(),
                });
            }
        }
    }
    out
}
