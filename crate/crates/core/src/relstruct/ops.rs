use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graphlib::Graph;

use super::structure::{Elem, Structure, StructureBuilder, Vocabulary};

/// Name of the singleton color attached to element `name` by [`star_expand`].
pub fn color_symbol(name: &str) -> String {
    format!("C_{name}")
}

/// The substructure induced on `subset` (element ids of `a`).
pub fn induced(a: &Structure, subset: &[Elem]) -> Result<Structure> {
    if subset.is_empty() {
        return Err(Error::Argument("induced substructure on an empty set".into()));
    }
    let mut keep = vec![None; a.len()];
    let mut b = StructureBuilder::new(a.vocabulary().clone());
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &e in &sorted {
        let slot = keep
            .get_mut(e as usize)
            .ok_or_else(|| Error::Argument(format!("element id {e} out of range")))?;
        *slot = Some(b.element(a.name(e)));
    }
    let mut buf = Vec::new();
    for (s, r) in a.relations() {
        'tuples: for t in r.iter() {
            buf.clear();
            for &e in t {
                match keep[e as usize] {
                    Some(x) => buf.push(x),
                    None => continue 'tuples,
                }
            }
            b.tuple(s, &buf)?;
        }
    }
    b.finish()
}

/// Same as [`induced`] with the subset given by names.
pub fn induced_by_names<S: AsRef<str>>(a: &Structure, names: &[S]) -> Result<Structure> {
    let ids = names
        .iter()
        .map(|n| a.elem(n.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    induced(a, &ids)
}

/// The Gaifman graph: distinct elements are adjacent iff they share a tuple.
pub fn gaifman(a: &Structure) -> Graph {
    let mut adj = vec![Vec::new(); a.len()];
    for (_, r) in a.relations() {
        for t in r.iter() {
            for (i, &x) in t.iter().enumerate() {
                for &y in &t[i + 1..] {
                    if x != y {
                        adj[x as usize].push(y);
                        adj[y as usize].push(x);
                    }
                }
            }
        }
    }
    Graph::from_adjacency(a.universe().to_vec(), adj).expect("gaifman graph is well formed")
}

/// Element ids of each connected component, ordered by least element.
pub fn component_sets(a: &Structure) -> Vec<Vec<Elem>> {
    gaifman(a).components()
}

/// Induced substructures on the connected components, ordered by least element.
pub fn components(a: &Structure) -> Vec<Structure> {
    component_sets(a)
        .iter()
        .map(|c| induced(a, c).expect("components are nonempty"))
        .collect()
}

/// The direct product; element `(x, y)` is named `x*y`.
pub fn direct_product(a: &Structure, b: &Structure) -> Result<Structure> {
    a.same_vocabulary(b)?;
    let mut out = StructureBuilder::new(a.vocabulary().clone());
    let nb = b.len() as Elem;
    for x in a.universe() {
        for y in b.universe() {
            out.element(format!("{x}*{y}"));
        }
    }
    let mut buf = Vec::new();
    for (s, ra) in a.relations() {
        let rb = b.relation(s).expect("same vocabulary");
        for t in ra.iter() {
            for u in rb.iter() {
                buf.clear();
                buf.extend(t.iter().zip(u).map(|(&x, &y)| x * nb + y));
                out.tuple(s, &buf)?;
            }
        }
    }
    out.finish()
}

pub const P1: &str = "P_1";
pub const P2: &str = "P_2";

/// Disjoint union of `a` and `b` tagged by the unary symbols `P_1`, `P_2`.
/// Elements are renamed `1.x` and `2.y`.
pub fn pair(a: &Structure, b: &Structure) -> Result<Structure> {
    for p in [P1, P2] {
        if a.vocabulary().contains(p) || b.vocabulary().contains(p) {
            return Err(Error::NameClash(p.to_string()));
        }
    }
    let mut vocab = a.vocabulary().union(b.vocabulary())?;
    vocab.insert(P1, 1)?;
    vocab.insert(P2, 1)?;
    let mut out = StructureBuilder::new(vocab);
    let offset = a.len() as Elem;
    for x in a.universe() {
        out.element(format!("1.{x}"));
    }
    for y in b.universe() {
        out.element(format!("2.{y}"));
    }
    for e in a.elements() {
        out.tuple(P1, &[e])?;
    }
    for e in b.elements() {
        out.tuple(P2, &[e + offset])?;
    }
    for (s, r) in a.relations() {
        for t in r.iter() {
            out.tuple(s, t)?;
        }
    }
    let mut buf = Vec::new();
    for (s, r) in b.relations() {
        for t in r.iter() {
            buf.clear();
            buf.extend(t.iter().map(|&e| e + offset));
            out.tuple(s, &buf)?;
        }
    }
    out.finish()
}

/// Adds a singleton color `C_x = {x}` for every element `x`.
pub fn star_expand(a: &Structure) -> Result<Structure> {
    let mut vocab = a.vocabulary().clone();
    for x in a.universe() {
        let c = color_symbol(x);
        if vocab.contains(&c) {
            return Err(Error::NameClash(c));
        }
        vocab.insert(&c, 1)?;
    }
    let mut out = StructureBuilder::new(vocab);
    for x in a.universe() {
        out.element(x.clone());
    }
    for (s, r) in a.relations() {
        for t in r.iter() {
            out.tuple(s, t)?;
        }
    }
    for e in a.elements() {
        out.tuple(&color_symbol(a.name(e)), &[e])?;
    }
    out.finish()
}

/// Reduct of `a` to the symbols of `vocab`.
pub fn reduct(a: &Structure, vocab: &Vocabulary) -> Result<Structure> {
    for (s, ar) in vocab.symbols() {
        if a.vocabulary().arity(s) != Some(ar) {
            return Err(Error::VocabularyMismatch(format!("`{s}` missing from the structure")));
        }
    }
    let mut out = StructureBuilder::new(vocab.clone());
    for x in a.universe() {
        out.element(x.clone());
    }
    for (s, _) in vocab.symbols() {
        for t in a.relation(s).expect("checked").iter() {
            out.tuple(s, t)?;
        }
    }
    out.finish()
}

/// A finite map between element ids of two structures.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialHom(BTreeMap<Elem, Elem>);

impl PartialHom {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, from: Elem, to: Elem) -> Option<Elem> {
        self.0.insert(from, to)
    }

    pub fn get(&self, from: Elem) -> Option<Elem> {
        self.0.get(&from).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = Elem> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.0.iter().map(|(&a, &b)| (a, b))
    }

    /// Whether `other` agrees with `self` on the common domain and contains it.
    pub fn extends(&self, other: &PartialHom) -> bool {
        other.iter().all(|(a, b)| self.get(a) == Some(b))
    }

    /// Name-level rendering, used for output.
    pub fn named(&self, a: &Structure, b: &Structure) -> BTreeMap<String, String> {
        self.iter()
            .map(|(x, y)| (a.name(x).to_string(), b.name(y).to_string()))
            .collect()
    }

    pub fn from_total(map: &[Elem]) -> Self {
        PartialHom(map.iter().enumerate().map(|(i, &v)| (i as Elem, v)).collect())
    }
}

impl FromIterator<(Elem, Elem)> for PartialHom {
    fn from_iter<I: IntoIterator<Item = (Elem, Elem)>>(iter: I) -> Self {
        PartialHom(iter.into_iter().collect())
    }
}

/// Whether `g` is empty or a homomorphism from the substructure of `a`
/// induced on its domain into `b`.
pub fn is_partial_hom(a: &Structure, b: &Structure, g: &PartialHom) -> Result<bool> {
    a.same_vocabulary(b)?;
    for (x, y) in g.iter() {
        if x as usize >= a.len() || y as usize >= b.len() {
            return Err(Error::Argument(format!("foreign element in map {x}->{y}")));
        }
    }
    let mut buf = Vec::new();
    for (s, r) in a.relations() {
        let rb = b.relation(s).expect("same vocabulary");
        'tuples: for t in r.iter() {
            buf.clear();
            for &e in t {
                match g.get(e) {
                    Some(v) => buf.push(v),
                    None => continue 'tuples,
                }
            }
            if !rb.contains(&buf) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether the total map `h` is a homomorphism from `a` to `b`.
pub fn is_hom(a: &Structure, b: &Structure, h: &[Elem]) -> Result<bool> {
    if h.len() != a.len() {
        return Err(Error::Argument("map is not total".into()));
    }
    is_partial_hom(a, b, &PartialHom::from_total(h))
}
