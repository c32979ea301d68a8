use crate::error::{Error, Result};
use crate::graphlib::{generate, is_minor_map, Graph, MinorMap, RootedForest};
use crate::relstruct::Elem;

use super::types::{ensure_valid, Deconstruction, Mode};

/// Host `g` itself with singleton bags.
pub fn self_deconstruction(g: &Graph) -> Deconstruction {
    let bags = g.vertices().map(|v| vec![v]).collect();
    Deconstruction::new(g.clone(), g.clone(), bags, Mode::Deconstruction).expect("well formed")
}

/// Host the `n x n` grid for `n = |g|`; vertex `(i,j)` holds the `i`-th and
/// `j`-th vertex of `g`.
pub fn grid_deconstruction(g: &Graph) -> Result<Deconstruction> {
    let n = g.len();
    let host = generate::grid(n)?;
    let mut bags = Vec::with_capacity(n * n);
    for i in 0..n as Elem {
        for j in 0..n as Elem {
            bags.push(vec![i, j]);
        }
    }
    Deconstruction::new(g.clone(), host, bags, Mode::Deconstruction)
}

/// Composes a deconstruction of `G` over `H` with one of `H` over `I`:
/// the bag at `i` is the union of the `G`-bags at the members of `C_i`.
pub fn compose(d_gh: &Deconstruction, d_hi: &Deconstruction) -> Result<Deconstruction> {
    if d_gh.host() != d_hi.subject() {
        return Err(Error::Argument(
            "the host of the first deconstruction must be the subject of the second".into(),
        ));
    }
    ensure_valid(d_gh, "first deconstruction")?;
    ensure_valid(d_hi, "second deconstruction")?;
    let bags = d_hi
        .bags()
        .iter()
        .map(|c| c.iter().flat_map(|&h| d_gh.bag(h).iter().copied()).collect())
        .collect();
    let out = Deconstruction::new(d_gh.subject().clone(), d_hi.host().clone(), bags, Mode::Deconstruction)?;
    match d_hi.roots() {
        Some(r) => out.with_roots(r.to_vec()),
        None => Ok(out),
    }
}

/// The `G`-deconstruction of a minor `M` given by a minor map: the bag at
/// `g` holds the minor vertices whose branch set contains `g`.
pub fn from_minor_map(m: &Graph, g: &Graph, mu: &MinorMap) -> Result<Deconstruction> {
    if !is_minor_map(m, g, mu)? {
        return Err(Error::Precondition("not a minor map".into()));
    }
    let mut bags = vec![Vec::new(); g.len()];
    for (i, set) in mu.0.iter().enumerate() {
        for &v in set {
            bags[v as usize].push(i as Elem);
        }
    }
    Deconstruction::new(m.clone(), g.clone(), bags, Mode::Deconstruction)
}

/// Turns a deconstruction over a tree into a decomposition by merging each
/// bag with its parent's.
pub fn tree_decon_to_decomp(d: &Deconstruction) -> Result<Deconstruction> {
    if !(d.host().is_connected() && d.host().is_forest()) {
        return Err(Error::Precondition("host is not a tree".into()));
    }
    ensure_valid(d, "deconstruction")?;
    let t = d.rooted_host()?;
    let bags = d
        .host()
        .vertices()
        .map(|h| {
            let mut b = d.bag(h).to_vec();
            if let Some(p) = t.parent(h) {
                b.extend_from_slice(d.bag(p));
            }
            b
        })
        .collect();
    Deconstruction::new(d.subject().clone(), d.host().clone(), bags, Mode::Decomposition)?
        .with_roots(t.roots().to_vec())
}

/// The decomposition over a forest whose closure contains every edge of `g`:
/// each node's bag holds the node and its ancestors.
pub fn decomp_from_treedepth_witness(g: &Graph, t: &RootedForest) -> Result<Deconstruction> {
    if !t.closure_contains(g) {
        return Err(Error::Precondition(
            "the forest's closure does not contain every edge of the graph".into(),
        ));
    }
    let bags = t.graph().vertices().map(|v| t.ancestors(v)).collect();
    Deconstruction::new(g.clone(), t.graph().clone(), bags, Mode::Decomposition)?
        .with_roots(t.roots().to_vec())
}
