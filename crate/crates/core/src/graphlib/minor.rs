use crate::error::{guard, Error, Result};
use crate::limits::{Budget, Limits};
use crate::relstruct::{Elem, Outcome};

use super::generate;
use super::graph::{Graph, RootedForest};

/// Branch sets indexed by the vertices of the minor; each set is sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MinorMap(pub Vec<Vec<Elem>>);

impl MinorMap {
    pub fn identity(n: usize) -> MinorMap {
        MinorMap((0..n as Elem).map(|v| vec![v]).collect())
    }

    pub fn branch(&self, m: Elem) -> &[Elem] {
        &self.0[m as usize]
    }

    /// Name-level rendering.
    pub fn named(&self, m: &Graph, g: &Graph) -> std::collections::BTreeMap<String, Vec<String>> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, set)| {
                (
                    m.name(i as Elem).to_string(),
                    set.iter().map(|&v| g.name(v).to_string()).collect(),
                )
            })
            .collect()
    }
}

/// Checks nonempty connected branch sets, disjointness and edge realization.
pub fn is_minor_map(m: &Graph, g: &Graph, mu: &MinorMap) -> Result<bool> {
    if mu.0.len() != m.len() {
        return Err(Error::Argument("minor map must cover every vertex of the minor".into()));
    }
    let mut owner = vec![None; g.len()];
    for (i, set) in mu.0.iter().enumerate() {
        if let Some(&bad) = set.iter().find(|&&v| v as usize >= g.len()) {
            return Err(Error::Argument(format!("vertex id {bad} is not in the host graph")));
        }
        if set.is_empty() || !g.is_connected_set(set) {
            return Ok(false);
        }
        for &v in set {
            if owner[v as usize].replace(i).is_some() {
                return Ok(false);
            }
        }
    }
    for (a, b) in m.edges() {
        let realized = mu.0[a as usize]
            .iter()
            .any(|&x| g.neighbors(x).iter().any(|&y| owner[y as usize] == Some(b as usize)));
        if !realized {
            return Ok(false);
        }
    }
    Ok(true)
}

type Mask = u64;

struct MinorSearch<'a> {
    g: &'a Graph,
    m: &'a Graph,
    gadj: Vec<Mask>,
    order: Vec<Elem>,
    earlier: Vec<Vec<usize>>,
    sets: Vec<Mask>,
    steps: u64,
    budget: u64,
}

impl MinorSearch<'_> {
    fn nbhd(&self, set: Mask) -> Mask {
        let mut out = 0;
        let mut b = set;
        while b != 0 {
            let v = b.trailing_zeros();
            b &= b - 1;
            out |= self.gadj[v as usize];
        }
        out & !set
    }

    /// Connected subsets of `avail` with at most `cap` vertices, smallest
    /// first and lexicographic within a size.
    fn connected_sets(&self, avail: Mask, cap: usize) -> Vec<Mask> {
        let mut out = Vec::new();
        let mut b = avail;
        while b != 0 {
            let v = b.trailing_zeros();
            b &= b - 1;
            let above = avail & !((1u64 << (v + 1)) - 1);
            let ext = self.gadj[v as usize] & above;
            self.extend(1 << v, ext, above, cap, &mut out);
        }
        out.sort_by_key(|&s| (s.count_ones(), s.trailing_zeros(), s));
        out
    }

    fn extend(&self, sub: Mask, mut ext: Mask, allowed: Mask, cap: usize, out: &mut Vec<Mask>) {
        out.push(sub);
        if sub.count_ones() as usize >= cap {
            return;
        }
        let closed = sub | self.nbhd(sub);
        while ext != 0 {
            let w = 63 - ext.leading_zeros();
            ext &= !(1u64 << w);
            let excl = self.gadj[w as usize] & allowed & !closed;
            self.extend(sub | 1 << w, ext | excl, allowed, cap, out);
        }
    }

    fn run(&mut self, i: usize, used: Mask) -> Option<bool> {
        if i == self.order.len() {
            return Some(true);
        }
        let all: Mask = if self.g.len() == 64 { !0 } else { (1u64 << self.g.len()) - 1 };
        let avail = all & !used;
        let remaining = self.order.len() - i - 1;
        let cap = (avail.count_ones() as usize).saturating_sub(remaining);
        if cap == 0 {
            return Some(false);
        }
        let needs: Vec<Mask> = self.earlier[i].iter().map(|&j| self.nbhd(self.sets[j])).collect();
        for s in self.connected_sets(avail, cap) {
            self.steps += 1;
            if self.steps > self.budget {
                return None;
            }
            if needs.iter().any(|&n| n & s == 0) {
                continue;
            }
            self.sets[i] = s;
            let used2 = used | s;
            if !self.future_ok(i, used2) {
                continue;
            }
            match self.run(i + 1, used2)? {
                true => return Some(true),
                false => {}
            }
        }
        Some(false)
    }

    /// Every later minor vertex adjacent to a placed one still has room.
    fn future_ok(&self, i: usize, used: Mask) -> bool {
        for k in i + 1..self.order.len() {
            for &j in &self.earlier[k] {
                if j <= i && self.nbhd(self.sets[j]) & !used == 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Exhaustive branch-set search for `m` as a minor of `g`.
pub fn find_minor(g: &Graph, m: &Graph, budget: Budget) -> Result<Outcome<MinorMap>> {
    guard("host vertex count for minor search", g.len(), 64)?;
    if m.len() > g.len() || m.edge_count() > g.edge_count() {
        return Ok(Outcome::NotFound);
    }
    let mut order = Vec::new();
    for comp in m.components() {
        let mut seen = vec![comp[0]];
        let mut k = 0;
        while k < seen.len() {
            let u = seen[k];
            k += 1;
            for &w in m.neighbors(u) {
                if !seen.contains(&w) {
                    seen.push(w);
                }
            }
        }
        order.extend(seen);
    }
    let pos: Vec<usize> = {
        let mut p = vec![0; m.len()];
        for (i, &v) in order.iter().enumerate() {
            p[v as usize] = i;
        }
        p
    };
    let earlier = order
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut e: Vec<usize> = m.neighbors(v).iter().map(|&w| pos[w as usize]).filter(|&j| j < i).collect();
            e.sort_unstable();
            e
        })
        .collect();
    let gadj = g
        .vertices()
        .map(|v| g.neighbors(v).iter().fold(0u64, |acc, &w| acc | 1 << w))
        .collect();
    let mut search = MinorSearch {
        g,
        m,
        gadj,
        sets: vec![0; order.len()],
        order,
        earlier,
        steps: 0,
        budget: budget.0,
    };
    Ok(match search.run(0, 0) {
        None => Outcome::BudgetExceeded,
        Some(false) => Outcome::NotFound,
        Some(true) => {
            let mut mu = vec![Vec::new(); search.m.len()];
            for (i, &v) in search.order.iter().enumerate() {
                let mut set = Vec::new();
                let mut b = search.sets[i];
                while b != 0 {
                    set.push(b.trailing_zeros() as Elem);
                    b &= b - 1;
                }
                mu[v as usize] = set;
            }
            Outcome::Found(MinorMap(mu))
        }
    })
}

/// For every node, whether it has property `P(d,k)`: `P(0,k)` always holds,
/// and `P(d,k)` holds at `u` when `u` has `k` pairwise incomparable proper
/// descendants with `P(d-1,k)`.
pub fn property_p_nodes(t: &RootedForest, d: usize, k: usize) -> Result<Vec<bool>> {
    if k == 0 {
        return Err(Error::Argument("property P needs k >= 1".into()));
    }
    let n = t.len();
    let mut post = Vec::with_capacity(n);
    for &r in t.roots() {
        let mut pre = t.subtree(r);
        pre.reverse();
        post.extend(pre);
    }
    let mut good = vec![true; n];
    for _ in 0..d {
        let mut antichain = vec![0usize; n];
        let mut next = vec![false; n];
        for &u in &post {
            let below: usize = t.children(u).iter().map(|&c| antichain[c as usize]).sum();
            next[u as usize] = below >= k;
            antichain[u as usize] = below.max(good[u as usize] as usize);
        }
        good = next;
    }
    Ok(good)
}

/// Whether the root of the single tree `t` has property `P(d,k)`.
pub fn has_property_p(t: &RootedForest, d: usize, k: usize) -> Result<bool> {
    let r = t.single_root()?;
    Ok(property_p_nodes(t, d, k)?[r as usize])
}

/// Largest `d <= d_max` such that the complete `k`-ary tree of height `d`
/// is a minor of `g`.
pub fn stack_profile(g: &Graph, d_max: usize, k: usize, limits: &Limits) -> Result<usize> {
    guard("vertex count for minor search", g.len(), limits.minor_vertices.min(64))?;
    for d in 1..=d_max {
        let t = generate::tree(d, k)?;
        if t.len() > g.len() {
            return Ok(d - 1);
        }
        let found = find_minor(g, t.graph(), limits.minor_budget)?.decided(limits.minor_budget)?;
        if found.is_none() {
            return Ok(d - 1);
        }
    }
    Ok(d_max)
}
