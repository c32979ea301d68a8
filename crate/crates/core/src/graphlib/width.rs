use std::collections::HashMap;

use crate::error::{guard, Result};
use crate::limits::Limits;

use super::graph::{Graph, RootedForest};

type Mask = u64;

fn masks(g: &Graph) -> Vec<Mask> {
    g.vertices()
        .map(|v| g.neighbors(v).iter().fold(0, |m, &w| m | 1 << w))
        .collect()
}

fn components_of(adj: &[Mask], set: Mask) -> Vec<Mask> {
    let mut rest = set;
    let mut out = Vec::new();
    while rest != 0 {
        let mut comp = rest & rest.wrapping_neg();
        loop {
            let mut grow = comp;
            let mut bits = comp;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                grow |= adj[v] & set;
            }
            if grow == comp {
                break;
            }
            comp = grow;
        }
        out.push(comp);
        rest &= !comp;
    }
    out
}

fn bits(m: Mask) -> impl Iterator<Item = usize> {
    let mut m = m;
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            v
        })
    })
}

/// Exact tree depth with a witness forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDepth {
    pub depth: usize,
    pub witness: RootedForest,
}

struct TdSolver<'a> {
    adj: &'a [Mask],
    memo: HashMap<Mask, (usize, usize)>,
}

impl TdSolver<'_> {
    /// Tree depth of a connected vertex set, with the least optimal root.
    fn connected(&mut self, set: Mask) -> (usize, usize) {
        if set.count_ones() == 1 {
            return (0, set.trailing_zeros() as usize);
        }
        if let Some(&r) = self.memo.get(&set) {
            return r;
        }
        let mut best = (usize::MAX, 0);
        for v in bits(set) {
            let rest = set & !(1 << v);
            let mut worst = 0;
            for c in components_of(self.adj, rest) {
                worst = worst.max(self.connected(c).0);
                if worst + 1 >= best.0 {
                    break;
                }
            }
            if worst + 1 < best.0 {
                best = (worst + 1, v);
            }
        }
        self.memo.insert(set, best);
        best
    }

    fn build(&mut self, set: Mask, parent: Option<usize>, parents: &mut [Option<usize>]) {
        let (_, root) = self.connected(set);
        parents[root] = parent;
        for c in components_of(self.adj, set & !(1 << root)) {
            self.build(c, Some(root), parents);
        }
    }
}

/// Tree depth in the edge-count convention (a single vertex has depth 0),
/// with a witness forest of that height whose closure contains every edge.
pub fn tree_depth(g: &Graph, limits: &Limits) -> Result<TreeDepth> {
    guard("vertex count for tree depth", g.len(), limits.width_vertices.min(63))?;
    let adj = masks(g);
    let all: Mask = (1u64 << g.len()) - 1;
    let mut solver = TdSolver {
        adj: &adj,
        memo: HashMap::new(),
    };
    let mut parents = vec![None; g.len()];
    let mut depth = 0;
    for c in components_of(&adj, all) {
        depth = depth.max(solver.connected(c).0);
        solver.build(c, None, &mut parents);
    }
    let witness = RootedForest::from_parents(g.names().to_vec(), &parents)?;
    debug_assert_eq!(witness.height(), depth);
    Ok(TreeDepth { depth, witness })
}

/// Vertices outside `set ∪ {v}` reachable from `v` through `set`.
fn q_set(adj: &[Mask], set: Mask, v: usize) -> Mask {
    let mut inside = 1u64 << v;
    let mut frontier = 1u64 << v;
    let mut out = 0;
    while frontier != 0 {
        let mut next = 0;
        for u in bits(frontier) {
            next |= adj[u];
        }
        out |= next & !set & !inside;
        let grow = next & set & !inside;
        inside |= grow;
        frontier = grow;
    }
    out & !(1u64 << v)
}

/// Exact treewidth (bag size minus one) by dynamic programming over the
/// vertex subsets eliminated first.
pub fn treewidth(g: &Graph, limits: &Limits) -> Result<usize> {
    guard("vertex count for treewidth", g.len(), limits.width_vertices.min(24))?;
    let n = g.len();
    let adj = masks(g);
    let full = (1usize << n) - 1;
    let mut tw = vec![i64::MAX; full + 1];
    tw[0] = -1;
    for s in 1..=full {
        let mut best = i64::MAX;
        for v in bits(s as Mask) {
            let rest = s & !(1 << v);
            let q = q_set(&adj, rest as Mask, v).count_ones() as i64;
            best = best.min(tw[rest].max(q));
        }
        tw[s] = best;
    }
    Ok(tw[full].max(0) as usize)
}

/// Exact pathwidth via the vertex separation number of the best ordering.
pub fn pathwidth(g: &Graph, limits: &Limits) -> Result<usize> {
    guard("vertex count for pathwidth", g.len(), limits.width_vertices.min(24))?;
    let n = g.len();
    let adj = masks(g);
    let full = (1usize << n) - 1;
    let mut vs = vec![usize::MAX; full + 1];
    vs[0] = 0;
    for s in 1..=full {
        let boundary = bits(s as Mask)
            .filter(|&u| adj[u] & !(s as Mask) != 0)
            .count();
        let best = bits(s as Mask).map(|v| vs[s & !(1 << v)]).min().unwrap();
        vs[s] = best.max(boundary);
    }
    Ok(vs[full])
}
