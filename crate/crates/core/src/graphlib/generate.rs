//! Named graph families with canonical vertex names.
//!
//! Numeric names are zero-padded so that the lexicographic canonical order
//! agrees with the numeric one.

use crate::error::{Error, Result};
use crate::relstruct::Elem;

use super::graph::{Graph, RootedForest};

fn pad(i: usize, n: usize) -> String {
    let w = n.to_string().len();
    format!("{i:0w$}")
}

fn need(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Argument(msg.to_string()))
    }
}

fn numbered(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Result<Graph> {
    let names: Vec<String> = (1..=n).map(|i| pad(i, n)).collect();
    let mut adj = vec![Vec::new(); n];
    for (u, v) in edges {
        adj[u].push(v as Elem);
    }
    Graph::from_adjacency(names, adj)
}

/// The path with `n` vertices `1..n`.
pub fn path(n: usize) -> Result<Graph> {
    need(n >= 1, "path needs n >= 1")?;
    numbered(n, (1..n).map(|i| (i - 1, i)))
}

/// The cycle with `n >= 3` vertices.
pub fn cycle(n: usize) -> Result<Graph> {
    need(n >= 3, "cycle needs n >= 3")?;
    numbered(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// The complete graph on `n` vertices.
pub fn complete(n: usize) -> Result<Graph> {
    need(n >= 1, "complete graph needs n >= 1")?;
    numbered(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

/// The `n x n` grid; vertex `(i,j)` is named `i,j` (1-based).
pub fn grid(n: usize) -> Result<Graph> {
    need(n >= 1, "grid needs n >= 1")?;
    let mut names = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            names.push(format!("{},{}", pad(i, n), pad(j, n)));
        }
    }
    let idx = |i: usize, j: usize| i * n + j;
    let mut adj = vec![Vec::new(); n * n];
    for i in 0..n {
        for j in 0..n {
            if i + 1 < n {
                adj[idx(i, j)].push(idx(i + 1, j) as Elem);
            }
            if j + 1 < n {
                adj[idx(i, j)].push(idx(i, j + 1) as Elem);
            }
        }
    }
    Graph::from_adjacency(names, adj)
}

/// A center `0` joined to leaves `1..k`.
pub fn star(k: usize) -> Result<Graph> {
    need(k >= 1, "star needs k >= 1")?;
    let names: Vec<String> = (0..=k).map(|i| pad(i, k)).collect();
    let mut adj = vec![Vec::new(); k + 1];
    adj[0] = (1..=k as Elem).collect();
    Graph::from_adjacency(names, adj)
}

/// The complete `k`-ary tree of height `h`, rooted at `r`. The node reached
/// by the child sequence `i1 i2 ...` is named `ri1i2...`; for `k >= 10` the
/// indices are separated by dots.
pub fn tree(h: usize, k: usize) -> Result<RootedForest> {
    need(k >= 1, "tree needs k >= 1")?;
    let total: usize = (0..=h).map(|d| k.checked_pow(d as u32).unwrap_or(usize::MAX)).sum();
    need(total <= 1 << 20, "tree is too large")?;
    let sep = if k >= 10 { "." } else { "" };
    let mut names = vec!["r".to_string()];
    let mut parents = vec![None];
    let mut level = vec![0usize];
    for _ in 0..h {
        let mut next = Vec::new();
        for &p in &level {
            for c in 1..=k {
                let name = format!("{}{sep}{c}", names[p]);
                next.push(names.len());
                names.push(name);
                parents.push(Some(p));
            }
        }
        level = next;
    }
    RootedForest::from_parents(names, &parents)
}

/// A graph family member, selected at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Path(usize),
    Cycle(usize),
    Grid(usize),
    Complete(usize),
    Star(usize),
    Tree(usize, usize),
}

/// Either a plain graph or, for trees, a rooted forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generated {
    Graph(Graph),
    Forest(RootedForest),
}

impl Generated {
    pub fn graph(&self) -> &Graph {
        match self {
            Generated::Graph(g) => g,
            Generated::Forest(f) => f.graph(),
        }
    }
}

pub fn generate(kind: Kind) -> Result<Generated> {
    Ok(match kind {
        Kind::Path(n) => Generated::Graph(path(n)?),
        Kind::Cycle(n) => Generated::Graph(cycle(n)?),
        Kind::Grid(n) => Generated::Graph(grid(n)?),
        Kind::Complete(n) => Generated::Graph(complete(n)?),
        Kind::Star(k) => Generated::Graph(star(k)?),
        Kind::Tree(h, k) => Generated::Forest(tree(h, k)?),
    })
}
