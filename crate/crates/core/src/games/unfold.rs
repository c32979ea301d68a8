use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graphlib::RootedForest;
use crate::limits::Limits;
use crate::relstruct::{core, find_hom, is_hom, Elem, Structure, StructureBuilder};

use super::strategy::{is_winning_strategy, StrategyTable};
use super::vector::{set_vectors, GameVector, SetVector};

/// A rooted forest with one bag of structure elements per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VDecomposition {
    pub host: RootedForest,
    pub bags: Vec<Vec<Elem>>,
}

impl VDecomposition {
    /// Bags keyed by host node name, listing element names of `a`.
    pub fn named(&self, a: &Structure) -> std::collections::BTreeMap<String, Vec<String>> {
        self.host
            .graph()
            .vertices()
            .map(|h| {
                (
                    self.host.graph().name(h).to_string(),
                    self.bags[h as usize].iter().map(|&x| a.name(x).to_string()).collect(),
                )
            })
            .collect()
    }
}

/// `T_v(A)` with its set-vector forest.
#[derive(Debug, Clone)]
pub struct Unfolding {
    /// `None` when every set vector has an empty last set.
    pub structure: Option<Structure>,
    /// Set vectors, one per host node, parents being prefixes.
    pub set_vectors: Vec<SetVector>,
    /// The forest over set vectors and the bags `B_s`.
    pub decomposition: VDecomposition,
    /// The underlying element of each element of the structure.
    pub projection: Vec<Elem>,
}

/// Builds `T_v(A)`: elements are pairs `(a, u(a,s))` named `a@{..}|{..}`,
/// and a tuple belongs to a relation when it lies in a single bag `B_s` and
/// projects onto a tuple of `A`.
pub fn build_unfolding(a: &Structure, v: &GameVector, limits: &Limits) -> Result<Unfolding> {
    let svs = set_vectors(a.len(), v, limits.set_vectors)?;
    let tag = |x: Elem, s: &SetVector| format!("{}@{}", a.name(x), s.prefix_for(x).expect("member").render(a));

    let mut b = StructureBuilder::new(a.vocabulary().clone());
    let mut under: Vec<Elem> = Vec::new();
    let mut local_bags: Vec<Vec<Elem>> = Vec::with_capacity(svs.len());
    for s in &svs {
        let last = s.last();
        let mut ids = vec![Elem::MAX; a.len()];
        for &x in last {
            let before = b.element_count();
            let id = b.intern(&tag(x, s));
            if b.element_count() > before {
                under.push(x);
            }
            ids[x as usize] = id;
        }
        for (sym, r) in a.relations() {
            for t in r.iter() {
                if t.iter().all(|x| last.binary_search(x).is_ok()) {
                    let mapped: Vec<Elem> = t.iter().map(|&x| ids[x as usize]).collect();
                    b.tuple(sym, &mapped)?;
                }
            }
        }
        local_bags.push(last.iter().map(|&x| ids[x as usize]).collect());
    }

    let index: HashMap<&SetVector, usize> = svs.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let names: Vec<String> = svs.iter().map(|s| s.render(a)).collect();
    let parents: Vec<Option<usize>> = svs.iter().map(|s| s.parent().map(|p| index[&p])).collect();
    let host = RootedForest::from_parents(names.clone(), &parents)?;

    let (structure, projection, remap) = if b.element_count() == 0 {
        (None, Vec::new(), Vec::new())
    } else {
        let mut names_by_id = vec![String::new(); b.element_count()];
        for (s, bag) in svs.iter().zip(&local_bags) {
            for (&x, &id) in s.last().iter().zip(bag) {
                if names_by_id[id as usize].is_empty() {
                    names_by_id[id as usize] = tag(x, s);
                }
            }
        }
        let t = b.finish()?;
        let remap: Vec<Elem> = names_by_id.iter().map(|n| t.elem(n)).collect::<Result<_>>()?;
        let mut projection = vec![0; t.len()];
        for (i, &x) in under.iter().enumerate() {
            projection[remap[i] as usize] = x;
        }
        (Some(t), projection, remap)
    };

    let mut bags = vec![Vec::new(); svs.len()];
    let mut ordered: Vec<Option<SetVector>> = vec![None; svs.len()];
    for ((s, bag), name) in svs.iter().zip(local_bags).zip(&names) {
        let h = host.graph().vertex(name)? as usize;
        let mut mapped: Vec<Elem> = bag.iter().map(|&id| remap[id as usize]).collect();
        mapped.sort_unstable();
        bags[h] = mapped;
        ordered[h] = Some(s.clone());
    }
    Ok(Unfolding {
        structure,
        set_vectors: ordered.into_iter().map(|s| s.expect("one per node")).collect(),
        decomposition: VDecomposition { host, bags },
        projection,
    })
}

/// A failed condition of a `v`-decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VViolation {
    Shape(String),
    Uncovered(String),
    TupleOutsideBags { symbol: String, tuple: Vec<String> },
    Disconnected(String),
    TooTall { height: usize, rounds: usize },
    RootBag { node: String, size: usize, allowed: usize },
    NotContained { node: String },
    Growth { node: String, added: usize, allowed: usize },
}

impl fmt::Display for VViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VViolation::Shape(s) => write!(f, "{s}"),
            VViolation::Uncovered(x) => write!(f, "element {x} is in no bag"),
            VViolation::TupleOutsideBags { symbol, tuple } => {
                write!(f, "tuple ({}) of {symbol} lies in no single bag", tuple.join(","))
            }
            VViolation::Disconnected(x) => write!(f, "bags containing {x} are not connected"),
            VViolation::TooTall { height, rounds } => {
                write!(f, "forest has {} levels but the game has {rounds} rounds", height + 1)
            }
            VViolation::RootBag { node, size, allowed } => {
                write!(f, "root {node} has a bag of size {size}, more than {allowed}")
            }
            VViolation::NotContained { node } => write!(f, "bag of {node} does not contain its parent's bag"),
            VViolation::Growth { node, added, allowed } => {
                write!(f, "bag of {node} adds {added} elements, more than {allowed}")
            }
        }
    }
}

/// Checks that the bags form a decomposition of `a` over a forest of fewer
/// than `r` levels whose bags grow by at most `p_i` at level `i`.
pub fn validate_v_decomposition(a: &Structure, vd: &VDecomposition, v: &GameVector) -> Vec<VViolation> {
    let host = &vd.host;
    let hg = host.graph();
    if vd.bags.len() != hg.len() {
        return vec![VViolation::Shape(format!("{} bags for {} nodes", vd.bags.len(), hg.len()))];
    }
    if vd.bags.iter().flatten().any(|&x| x as usize >= a.len()) {
        return vec![VViolation::Shape("bag entry outside the universe".into())];
    }
    let mut out = Vec::new();
    let mut bags = vd.bags.clone();
    for bag in &mut bags {
        bag.sort_unstable();
        bag.dedup();
    }
    let occ: Vec<Vec<Elem>> = a
        .elements()
        .map(|x| hg.vertices().filter(|&h| bags[h as usize].binary_search(&x).is_ok()).collect())
        .collect();
    for x in a.elements() {
        if occ[x as usize].is_empty() {
            out.push(VViolation::Uncovered(a.name(x).to_string()));
        } else if !hg.is_connected_set(&occ[x as usize]) {
            out.push(VViolation::Disconnected(a.name(x).to_string()));
        }
    }
    for (sym, r) in a.relations() {
        for t in r.iter() {
            if !bags.iter().any(|bag| t.iter().all(|x| bag.binary_search(x).is_ok())) {
                out.push(VViolation::TupleOutsideBags {
                    symbol: sym.to_string(),
                    tuple: t.iter().map(|&x| a.name(x).to_string()).collect(),
                });
            }
        }
    }
    if host.height() >= v.rounds() {
        out.push(VViolation::TooTall {
            height: host.height(),
            rounds: v.rounds(),
        });
    }
    for h in hg.vertices() {
        let bag = &bags[h as usize];
        let node = hg.name(h).to_string();
        match host.parent(h) {
            None => {
                if bag.len() > v.p(1) {
                    out.push(VViolation::RootBag {
                        node,
                        size: bag.len(),
                        allowed: v.p(1),
                    });
                }
            }
            Some(p) => {
                let pb = &bags[p as usize];
                let level = host.depth(h) + 1;
                if !pb.iter().all(|x| bag.binary_search(x).is_ok()) {
                    out.push(VViolation::NotContained { node });
                } else if level <= v.rounds() && bag.len() - pb.len() > v.p(level) {
                    out.push(VViolation::Growth {
                        node,
                        added: bag.len() - pb.len(),
                        allowed: v.p(level),
                    });
                }
            }
        }
    }
    out
}

/// Glues the maps a winning strategy offers on the bags of a
/// `v`-decomposition of `t`, walking the forest from its roots.
pub fn strategy_to_hom(
    t: &Structure,
    b: &Structure,
    v: &GameVector,
    w: &StrategyTable,
    vd: &VDecomposition,
) -> Result<Vec<Elem>> {
    let bad = validate_v_decomposition(t, vd, v);
    if !bad.is_empty() {
        return Err(Error::Precondition(format!(
            "not a v-decomposition: {}",
            bad.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
        )));
    }
    if !is_winning_strategy(t, b, v, w)? {
        return Err(Error::Precondition("not a winning strategy".into()));
    }
    let host = &vd.host;
    let mut map: Vec<Option<Elem>> = vec![None; t.len()];
    let mut chosen = vec![None; host.len()];
    let mut order: Vec<Elem> = Vec::new();
    for &r in host.roots() {
        order.extend(host.subtree(r));
    }
    for h in order {
        let mut bag = vd.bags[h as usize].clone();
        bag.sort_unstable();
        bag.dedup();
        let level = host.depth(h) + 1;
        let base = host.parent(h).map(|p| chosen[p as usize].as_ref().expect("parent first"));
        let f = w
            .find(level, &bag, base)
            .ok_or_else(|| Error::Internal(format!("strategy has no answer at level {level}")))?
            .clone();
        for (x, y) in f.iter() {
            match map[x as usize] {
                Some(z) if z != y => return Err(Error::Internal("bag maps disagree".into())),
                _ => map[x as usize] = Some(y),
            }
        }
        chosen[h as usize] = Some(f);
    }
    let h: Vec<Elem> = map
        .into_iter()
        .map(|y| y.ok_or_else(|| Error::Internal("element left unmapped".into())))
        .collect::<Result<_>>()?;
    if !is_hom(t, b, &h)? {
        return Err(Error::Internal("glued map is not a homomorphism".into()));
    }
    Ok(h)
}

/// Outcome of [`v_game_solves`].
#[derive(Debug, Clone)]
pub struct Solves {
    pub unfolding: Unfolding,
    /// A homomorphism from `a` into the unfolding, if one exists.
    pub witness: Option<Vec<Elem>>,
}

impl Solves {
    pub fn solves(&self) -> bool {
        self.witness.is_some()
    }
}

/// Whether the `v`-game decides homomorphisms out of `a`, tested as a
/// homomorphism from `a` into `T_v(a)`.
pub fn v_game_solves(a: &Structure, v: &GameVector, limits: &Limits) -> Result<Solves> {
    let unfolding = build_unfolding(a, v, limits)?;
    let witness = match &unfolding.structure {
        None => None,
        Some(t) => find_hom(a, t, limits.hom_budget)?.decided(limits.hom_budget)?,
    };
    Ok(Solves { unfolding, witness })
}

/// Pulls the unfolding's bags back along a homomorphism from the core of `a`
/// into `T_v(a)`. Nodes whose whole subtree has empty bags are dropped.
pub fn extract_v_decomposition(a: &Structure, v: &GameVector, limits: &Limits) -> Result<(Structure, VDecomposition)> {
    let c = core(a, limits)?;
    let unfolding = build_unfolding(a, v, limits)?;
    let Some(t) = &unfolding.structure else {
        return Err(Error::Precondition(format!("the {v}-game does not solve the problem")));
    };
    let h = find_hom(&c, t, limits.hom_budget)?
        .decided(limits.hom_budget)?
        .ok_or_else(|| Error::Precondition(format!("the {v}-game does not solve the problem")))?;
    let host = &unfolding.decomposition.host;
    let pulled: Vec<Vec<Elem>> = unfolding
        .decomposition
        .bags
        .iter()
        .map(|bag| c.elements().filter(|&x| bag.binary_search(&h[x as usize]).is_ok()).collect())
        .collect();

    let mut keep = vec![false; host.len()];
    let mut post: Vec<Elem> = Vec::new();
    for &r in host.roots() {
        post.extend(host.subtree(r));
    }
    post.reverse();
    for &x in &post {
        keep[x as usize] =
            !pulled[x as usize].is_empty() || host.children(x).iter().any(|&ch| keep[ch as usize]);
    }
    let kept: Vec<Elem> = host.graph().vertices().filter(|&x| keep[x as usize]).collect();
    let pos: HashMap<Elem, usize> = kept.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let names: Vec<String> = kept.iter().map(|&x| host.graph().name(x).to_string()).collect();
    let parents: Vec<Option<usize>> = kept.iter().map(|&x| host.parent(x).map(|p| pos[&p])).collect();
    let forest = RootedForest::from_parents(names, &parents)?;
    let bags = forest
        .graph()
        .vertices()
        .map(|y| Ok(pulled[host.graph().vertex(forest.graph().name(y))? as usize].clone()))
        .collect::<Result<_>>()?;
    let vd = VDecomposition { host: forest, bags };
    let bad = validate_v_decomposition(&c, &vd, v);
    if !bad.is_empty() {
        return Err(Error::Internal(format!("pulled-back bags are not a v-decomposition: {}", bad[0])));
    }
    Ok((c, vd))
}

/// Least `n <= n_max` such that `n` one-pebble rounds solve homomorphism
/// from `a`.
pub fn min_pebbles_unary(a: &Structure, n_max: usize, limits: &Limits) -> Result<Option<usize>> {
    for n in 1..=n_max {
        if v_game_solves(a, &GameVector::unary(n)?, limits)?.solves() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::duplicator_wins;
    use crate::graphlib::generate;
    use crate::relstruct::{hom_exists, star_expand};
    use crate::Budget;

    fn g(s: &str) -> GameVector {
        s.parse().unwrap()
    }

    fn k(n: usize) -> Structure {
        generate::complete(n).unwrap().to_structure()
    }

    fn p(n: usize) -> Structure {
        generate::path(n).unwrap().to_structure()
    }

    #[test]
    fn unfolding_of_an_edge() {
        let lim = Limits::default();
        let one = build_unfolding(&k(2), &g("1"), &lim).unwrap();
        let t = one.structure.unwrap();
        assert_eq!(t.universe(), &["1@{1}", "2@{2}"]);
        assert_eq!(t.tuple_count(), 0);
        let two = build_unfolding(&k(2), &g("2"), &lim).unwrap();
        let t = two.structure.unwrap();
        assert!(t.holds("E", &[t.elem("1@{1,2}").unwrap(), t.elem("2@{1,2}").unwrap()]));
        assert!(is_hom(&t, &k(2), &two.projection).unwrap());
        assert!(validate_v_decomposition(&t, &two.decomposition, &g("2")).is_empty());
    }

    #[test]
    fn zero_pebbles_give_no_structure() {
        let u = build_unfolding(&k(2), &g("0"), &Limits::default()).unwrap();
        assert!(u.structure.is_none());
        assert!(!v_game_solves(&k(2), &g("0"), &Limits::default()).unwrap().solves());
    }

    #[test]
    fn solves_examples() {
        let lim = Limits::default();
        assert!(v_game_solves(&k(2), &g("2"), &lim).unwrap().solves());
        assert!(!v_game_solves(&k(2), &g("1"), &lim).unwrap().solves());
        assert!(v_game_solves(&p(3), &g("1,1"), &lim).unwrap().solves());
    }

    #[test]
    fn unary_pebble_counts() {
        let lim = Limits::default();
        assert_eq!(min_pebbles_unary(&k(2), 4, &lim).unwrap(), Some(2));
        assert_eq!(min_pebbles_unary(&k(3), 4, &lim).unwrap(), Some(3));
        assert_eq!(min_pebbles_unary(&p(7), 4, &lim).unwrap(), Some(2));
        assert_eq!(min_pebbles_unary(&k(3), 2, &lim).unwrap(), None);
    }

    #[test]
    fn extracted_decompositions() {
        let lim = Limits::default();
        let k2s = star_expand(&k(2)).unwrap();
        let (c, vd) = extract_v_decomposition(&k2s, &g("2"), &lim).unwrap();
        assert_eq!(c, k2s);
        assert_eq!(vd.host.height(), 0);
        assert!(vd.bags.iter().all(|b| b.len() <= 2));
        let (c, vd) = extract_v_decomposition(&p(3), &g("1,1"), &lim).unwrap();
        assert_eq!(c.len(), 2);
        assert!(validate_v_decomposition(&c, &vd, &g("1,1")).is_empty());
        assert!(extract_v_decomposition(&k(3), &g("1,1"), &lim).is_err());
    }

    #[test]
    fn shrinking_bag_is_reported() {
        let host = RootedForest::from_parents(vec!["r".into(), "s".into()], &[None, Some(0)]).unwrap();
        let vd = VDecomposition {
            host,
            bags: vec![vec![0, 1], vec![1]],
        };
        let bad = validate_v_decomposition(&k(2), &vd, &g("2,1"));
        assert!(bad.contains(&VViolation::NotContained { node: "s".into() }));
    }

    #[test]
    fn strategy_gives_folding_of_path() {
        let lim = Limits::default();
        let v = g("1,1");
        let t = p(3);
        let w = duplicator_wins(&t, &k(2), &v, &lim).unwrap();
        let host = RootedForest::from_parents(vec!["a".into(), "b".into(), "c".into()], &[None, Some(0), Some(0)]).unwrap();
        let vd = VDecomposition {
            host,
            bags: vec![vec![1], vec![0, 1], vec![1, 2]],
        };
        let h = strategy_to_hom(&t, &k(2), &v, w.strategy().unwrap(), &vd).unwrap();
        assert!(is_hom(&t, &k(2), &h).unwrap());
        assert_eq!(h[0], h[2]);
    }

    #[test]
    fn game_matches_unfolding() {
        let lim = Limits::default();
        let structures = [k(2), k(3), p(3), generate::cycle(4).unwrap().to_structure(), generate::cycle(5).unwrap().to_structure()];
        for v in ["1", "2", "1,1", "2,1", "1,1,1"] {
            let v = g(v);
            for a in &structures {
                let u = build_unfolding(a, &v, &lim).unwrap();
                for b in &structures {
                    let game = duplicator_wins(a, b, &v, &lim).unwrap().duplicator_wins();
                    let hom = match &u.structure {
                        Some(t) => hom_exists(t, b, Budget::default()).unwrap(),
                        None => true,
                    };
                    assert_eq!(game, hom, "v={v} a={a} b={b}");
                }
            }
        }
    }
}
