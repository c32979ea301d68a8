use crate::error::{Error, Result};
use crate::graphlib::{is_minor_map, property_p_nodes, has_property_p, MinorMap, RootedForest};
use crate::relstruct::Elem;

use super::types::{deconstruction_width, validate, Deconstruction, Mode};

/// Whether `d`, read as the branch sets of a map from the tree `m` into the
/// tree `g`, is a nice deconstruction: a valid deconstruction given by a
/// minor map, the root of `g` in the root's branch set, and every edge
/// between the sets of a parent and a child pointing downward in `g`.
pub fn is_nice(m: &RootedForest, g: &RootedForest, d: &Deconstruction) -> Result<bool> {
    if d.host() != m.graph() || d.subject() != g.graph() {
        return Err(Error::Argument(
            "bags must be indexed by the host tree and range over the subject tree".into(),
        ));
    }
    let (m0, g0) = (m.single_root()?, g.single_root()?);
    let mu = MinorMap(d.bags().to_vec());
    if !is_minor_map(m.graph(), g.graph(), &mu)? {
        return Ok(false);
    }
    if !validate(&d.as_mode(Mode::Deconstruction)).is_empty() {
        return Ok(false);
    }
    if d.bag(m0).binary_search(&g0).is_err() {
        return Ok(false);
    }
    let gg = g.graph();
    for a in m.graph().vertices() {
        for &c in m.children(a) {
            for &x in d.bag(a) {
                for &y in d.bag(c) {
                    if gg.adjacent(x, y) && g.parent(y) != Some(x) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Output of [`build_td_deconstruction`].
#[derive(Debug, Clone)]
pub struct TdDeconstruction {
    /// A rooted tree of height at most `d`; each node is named after the
    /// highest subject vertex in its bag.
    pub host: RootedForest,
    pub deconstruction: Deconstruction,
    pub width: usize,
}

/// A branch set over the vertices of some tree, with the parent's position.
type Node = (Vec<Elem>, Option<usize>);

/// Builds a nice deconstruction of the rooted tree `t` over a tree of height
/// at most `d`, provided the root of `t` lacks property `P(d+1, k)`.
pub fn build_td_deconstruction(t: &RootedForest, d: usize, k: usize) -> Result<TdDeconstruction> {
    let root = t.single_root()?;
    if has_property_p(t, d + 1, k)? {
        return Err(Error::Precondition(format!("the tree has property P({}, {k})", d + 1)));
    }
    let nodes = recurse(t, d, k)?;
    let top = |set: &[Elem]| -> Elem { *set.iter().min_by_key(|&&v| (t.depth(v), v)).expect("nonempty") };
    let names: Vec<String> = nodes.iter().map(|(s, _)| t.graph().name(top(s)).to_string()).collect();
    let parents: Vec<Option<usize>> = nodes.iter().map(|(_, p)| *p).collect();
    let host = RootedForest::from_parents(names.clone(), &parents)?;
    let mut bags = vec![Vec::new(); nodes.len()];
    for ((set, _), name) in nodes.into_iter().zip(&names) {
        bags[host.graph().vertex(name)? as usize] = set;
    }
    let hroot = host.single_root()?;
    let dec = Deconstruction::new(t.graph().clone(), host.graph().clone(), bags, Mode::Deconstruction)?
        .with_roots(vec![hroot])?;
    debug_assert!(dec.bag(hroot).contains(&root));
    if host.height() > d || !is_nice(&host, t, &dec)? {
        return Err(Error::Internal("tree-depth builder produced a malformed deconstruction".into()));
    }
    let width = deconstruction_width(&dec);
    Ok(TdDeconstruction {
        host,
        deconstruction: dec,
        width,
    })
}

/// A tree on `0..parents.len()` whose vertex order matches the indices.
fn indexed_tree(parents: &[Option<usize>]) -> Result<RootedForest> {
    let names = (0..parents.len()).map(|i| format!("{i:08}")).collect();
    RootedForest::from_parents(names, parents)
}

fn recurse(t: &RootedForest, d: usize, k: usize) -> Result<Vec<Node>> {
    let r = t.single_root()?;
    if d == 0 {
        return Ok(vec![(t.graph().vertices().collect(), None)]);
    }
    if t.height() <= d {
        return Ok(t
            .graph()
            .vertices()
            .map(|v| (vec![v], t.parent(v).map(|p| p as usize)))
            .collect());
    }
    let p = property_p_nodes(t, d, k)?;
    let (heavy, light): (Vec<Elem>, Vec<Elem>) = t.children(r).iter().partition(|&&c| p[c as usize]);

    let mut top = vec![r];
    top.extend(&heavy);
    top.sort_unstable();
    let mut sets: Vec<Vec<Elem>> = vec![top];
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut slot = vec![usize::MAX; t.len()];
    for &b in &heavy {
        for &x in t.children(b) {
            for v in t.subtree(x) {
                slot[v as usize] = sets.len();
                sets.push(vec![v]);
                parents.push(Some(if v == x { 0 } else { slot[t.parent(v).unwrap() as usize] }));
            }
        }
    }
    for &c in &light {
        let members = t.subtree(c);
        let mut local = vec![usize::MAX; t.len()];
        for (i, &v) in members.iter().enumerate() {
            local[v as usize] = i;
        }
        let sub_parents: Vec<Option<usize>> = members
            .iter()
            .map(|&v| if v == c { None } else { t.parent(v).map(|q| local[q as usize]) })
            .collect();
        let offset = sets.len();
        for (set, par) in recurse(&indexed_tree(&sub_parents)?, d - 1, k)? {
            let mut set: Vec<Elem> = set.iter().map(|&i| members[i as usize]).collect();
            set.sort_unstable();
            sets.push(set);
            parents.push(Some(par.map_or(0, |q| q + offset)));
        }
    }

    let inner = recurse(&indexed_tree(&parents)?, d, k)?;
    Ok(inner
        .into_iter()
        .map(|(set, par)| {
            let mut out: Vec<Elem> = set.iter().flat_map(|&h| sets[h as usize].iter().copied()).collect();
            out.sort_unstable();
            (out, par)
        })
        .collect())
}
