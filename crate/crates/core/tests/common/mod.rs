//! Seeded generators and brute-force oracles shared by the integration tests.
//! The oracles deliberately avoid the library's search code.

#![allow(dead_code)]

use std::collections::HashMap;

use homlab::decon::{compose, from_minor_map, grid_deconstruction, self_deconstruction, Deconstruction, Mode};
use homlab::folog::Formula;
use homlab::graphlib::{Graph, MinorMap, RootedForest};
use homlab::relstruct::{color_symbol, Elem, Structure, StructureBuilder, Vocabulary};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Random structure on `0..n` where each tuple is present with probability `p`.
pub fn random_structure(rng: &mut impl Rng, n: usize, vocab: &Vocabulary, p: f64) -> Structure {
    let mut b = StructureBuilder::new(vocab.clone());
    for x in names(n) {
        b.element(x);
    }
    for (s, k) in vocab.symbols() {
        let total = n.pow(k as u32);
        for code in 0..total {
            if rng.gen_bool(p) {
                let mut t = Vec::with_capacity(k);
                let mut c = code;
                for _ in 0..k {
                    t.push((c % n) as Elem);
                    c /= n;
                }
                b.tuple(s, &t).unwrap();
            }
        }
    }
    b.finish().unwrap()
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let vs = names(n);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((vs[i].as_str(), vs[j].as_str()));
            }
        }
    }
    Graph::from_edges(vs.iter().map(String::as_str), edges).unwrap()
}

/// Vocabulary of `G*` for a structure `g`.
pub fn star_vocabulary(g: &Structure) -> Vocabulary {
    let mut v = g.vocabulary().clone();
    for x in g.universe() {
        v.insert(&color_symbol(x), 1).unwrap();
    }
    v
}

/// Every structure on `0..n` over `vocab`, with at most `cap` relation
/// choices per symbol (taken in order of their bit patterns).
pub fn all_structures(n: usize, vocab: &Vocabulary, cap: usize) -> Vec<Structure> {
    let syms: Vec<(String, usize)> = vocab.symbols().map(|(s, k)| (s.to_string(), k)).collect();
    let choices: Vec<usize> = syms
        .iter()
        .map(|(_, k)| (1usize << n.pow(*k as u32)).min(cap))
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; syms.len()];
    loop {
        let mut b = StructureBuilder::new(vocab.clone());
        for x in names(n) {
            b.element(x);
        }
        for ((s, k), &mask) in syms.iter().zip(&idx) {
            for code in 0..n.pow(*k as u32) {
                if mask >> code & 1 == 1 {
                    let mut t = Vec::new();
                    let mut c = code;
                    for _ in 0..*k {
                        t.push((c % n) as Elem);
                        c /= n;
                    }
                    b.tuple(s, &t).unwrap();
                }
            }
        }
        out.push(b.finish().unwrap());
        let mut i = idx.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < choices[i] {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Homomorphism existence by exhaustive assignment with prefix checks.
pub fn brute_hom(a: &Structure, b: &Structure) -> bool {
    let tuples: Vec<(String, Vec<Elem>)> = a
        .relations()
        .flat_map(|(s, r)| r.iter().map(move |t| (s.to_string(), t.to_vec())))
        .collect();
    fn go(i: usize, map: &mut Vec<Elem>, a: &Structure, b: &Structure, tuples: &[(String, Vec<Elem>)]) -> bool {
        let ok = tuples.iter().all(|(s, t)| {
            if t.iter().any(|&e| e as usize >= i) {
                return true;
            }
            let img: Vec<Elem> = t.iter().map(|&e| map[e as usize]).collect();
            b.holds(s, &img)
        });
        if !ok {
            return false;
        }
        if i == a.len() {
            return true;
        }
        for y in 0..b.len() as Elem {
            map.push(y);
            if go(i + 1, map, a, b, tuples) {
                return true;
            }
            map.pop();
        }
        false
    }
    go(0, &mut Vec::new(), a, b, &tuples)
}

/// Truth of a formula by direct recursion over assignments.
pub fn brute_models(b: &Structure, f: &Formula) -> bool {
    fn ev(b: &Structure, f: &Formula, env: &mut HashMap<String, Elem>) -> bool {
        let args = |xs: &[String], env: &HashMap<String, Elem>| -> Vec<Elem> { xs.iter().map(|x| env[x]).collect() };
        match f {
            Formula::Atom(a) => b.holds(&a.rel, &args(&a.args, env)),
            Formula::NotAtom(a) => !b.holds(&a.rel, &args(&a.args, env)),
            Formula::Eq(x, y) => env[x] == env[y],
            Formula::NotEq(x, y) => env[x] != env[y],
            Formula::And(fs) => fs.iter().all(|g| ev(b, g, env)),
            Formula::Or(fs) => fs.iter().any(|g| ev(b, g, env)),
            Formula::Exists(x, g) => {
                let saved = env.get(x).copied();
                let mut found = false;
                for e in 0..b.len() as Elem {
                    env.insert(x.clone(), e);
                    if ev(b, g, env) {
                        found = true;
                        break;
                    }
                }
                match saved {
                    Some(v) => env.insert(x.clone(), v),
                    None => env.remove(x),
                };
                found
            }
        }
    }
    ev(b, f, &mut HashMap::new())
}

/// Random existential sentence over `E/2`, `C/1` with quantifier rank at
/// most `qr` and at most `ors` disjunction nodes.
pub fn random_sentence(rng: &mut impl Rng, qr: usize, ors: usize) -> Formula {
    struct Gen<'a, R: Rng> {
        rng: &'a mut R,
        ors: usize,
        fresh: usize,
        nodes: usize,
    }
    impl<R: Rng> Gen<'_, R> {
        fn literal(&mut self, scope: &[String]) -> Formula {
            let pick = |g: &mut Self| scope.choose(g.rng).unwrap().clone();
            match self.rng.gen_range(0..6) {
                0 => Formula::atom("C", [pick(self)]),
                1 => Formula::NotAtom(homlab::folog::Atom::new("C", [pick(self)])),
                2 => Formula::atom("E", [pick(self), pick(self)]),
                3 => Formula::NotAtom(homlab::folog::Atom::new("E", [pick(self), pick(self)])),
                4 => Formula::Eq(pick(self), pick(self)),
                _ => Formula::NotEq(pick(self), pick(self)),
            }
        }
        fn quantify(&mut self, depth: usize, scope: &[String]) -> Formula {
            let x = if !scope.is_empty() && self.rng.gen_bool(0.15) {
                scope.choose(self.rng).unwrap().clone()
            } else {
                self.fresh += 1;
                format!("x{}", self.fresh)
            };
            let mut inner = scope.to_vec();
            inner.push(x.clone());
            Formula::exists(x, self.body(depth - 1, &inner))
        }
        fn body(&mut self, depth: usize, scope: &[String]) -> Formula {
            let r = self.rng.gen_range(0..10);
            if self.nodes == 0 {
                return self.literal(scope);
            }
            self.nodes -= 1;
            if r < 3 || (depth == 0 && r < 6) {
                return self.literal(scope);
            }
            if r < 5 && self.ors > 0 {
                self.ors -= 1;
                let a = self.body(depth, scope);
                let b = self.body(depth, scope);
                return Formula::Or(vec![a, b]);
            }
            if depth > 0 && r >= 7 {
                return self.quantify(depth, scope);
            }
            let n = self.rng.gen_range(2..=3);
            Formula::And((0..n).map(|_| self.body(depth, scope)).collect())
        }
    }
    let mut g = Gen { rng, ors, fresh: 0, nodes: 12 };
    g.quantify(qr.max(1), &[])
}

/// A host containing `g` as a minor: each vertex is blown up into a path of
/// one or two vertices, each edge of `g` becomes one edge between branch
/// sets, and a few random extra edges are added.
pub fn random_minor_host(rng: &mut impl Rng, g: &Graph) -> (Graph, MinorMap) {
    let mut branch: Vec<Vec<String>> = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    for v in g.vertices() {
        let k = rng.gen_range(1..=2);
        let b: Vec<String> = (0..k).map(|i| format!("{}.{i}", g.name(v))).collect();
        for w in b.windows(2) {
            edges.push((w[0].clone(), w[1].clone()));
        }
        branch.push(b);
    }
    for (u, v) in g.edges() {
        if u < v {
            let x = branch[u as usize].choose(rng).unwrap().clone();
            let y = branch[v as usize].choose(rng).unwrap().clone();
            edges.push((x, y));
        }
    }
    let all: Vec<String> = branch.iter().flatten().cloned().collect();
    if all.len() >= 2 && rng.gen_bool(0.5) {
        let x = all.choose(rng).unwrap().clone();
        let y = all.choose(rng).unwrap().clone();
        if x != y && !edges.contains(&(x.clone(), y.clone())) && !edges.contains(&(y.clone(), x.clone())) {
            edges.push((x, y));
        }
    }
    let host = Graph::from_edges(all.iter().map(String::as_str), edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))).unwrap();
    let mu = MinorMap(
        branch
            .iter()
            .map(|b| b.iter().map(|n| host.vertex(n).unwrap()).collect())
            .collect(),
    );
    (host, mu)
}

/// A random valid deconstruction of `g` drawn from the self, grid,
/// minor-induced and composed constructions, with its kind.
pub fn random_deconstruction(rng: &mut impl Rng, g: &Graph) -> (Deconstruction, &'static str) {
    match rng.gen_range(0..4) {
        0 => (self_deconstruction(g), "self"),
        1 => (grid_deconstruction(g).unwrap(), "grid"),
        2 => {
            let (host, mu) = random_minor_host(rng, g);
            (from_minor_map(g, &host, &mu).unwrap(), "minor")
        }
        _ => {
            let first = if rng.gen_bool(0.5) {
                self_deconstruction(g)
            } else {
                let (host, mu) = random_minor_host(rng, g);
                from_minor_map(g, &host, &mu).unwrap()
            };
            let h = first.host().clone();
            let second = if rng.gen_bool(0.5) || h.len() > 5 {
                let (host, mu) = random_minor_host(rng, &h);
                from_minor_map(&h, &host, &mu).unwrap()
            } else {
                grid_deconstruction(&h).unwrap()
            };
            (compose(&first, &second).unwrap(), "composed")
        }
    }
}

/// `d` with an extra host component whose bags are all empty.
pub fn with_empty_component(rng: &mut impl Rng, d: &Deconstruction) -> Deconstruction {
    let host = d.host();
    let k = rng.gen_range(1..=3);
    let mut vs: Vec<String> = host.names().to_vec();
    let extra: Vec<String> = (0..k).map(|i| format!("~{i}")).collect();
    vs.extend(extra.iter().cloned());
    let mut edges: Vec<(String, String)> = host
        .edges()
        .filter(|(u, v)| u < v)
        .map(|(u, v)| (host.name(u).to_string(), host.name(v).to_string()))
        .collect();
    for w in extra.windows(2) {
        edges.push((w[0].clone(), w[1].clone()));
    }
    let big = Graph::from_edges(vs.iter().map(String::as_str), edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))).unwrap();
    let bags = big
        .vertices()
        .map(|h| host.index_of(big.name(h)).map(|o| d.bag(o).to_vec()).unwrap_or_default())
        .collect();
    Deconstruction::new(d.subject().clone(), big, bags, d.mode()).unwrap()
}

/// Random rooted tree with at most `max_nodes` nodes and height at most `max_height`.
pub fn random_tree(rng: &mut impl Rng, max_nodes: usize, max_height: usize) -> RootedForest {
    let n = rng.gen_range(1..=max_nodes);
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut depth = vec![0usize];
    for _ in 1..n {
        let candidates: Vec<usize> = (0..parents.len()).filter(|&i| depth[i] < max_height).collect();
        let p = *candidates.choose(rng).unwrap();
        parents.push(Some(p));
        depth.push(depth[p] + 1);
    }
    let names: Vec<String> = (0..n).map(|i| format!("{i:02}")).collect();
    RootedForest::from_parents(names, &parents).unwrap()
}

fn adjacency(g: &Graph) -> Vec<u32> {
    g.vertices()
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect()
}

/// Tree depth (edge convention) from its recursive characterization:
/// components are independent and a connected graph loses one vertex per level.
pub fn brute_tree_depth(g: &Graph) -> usize {
    fn comps(adj: &[u32], set: u32) -> Vec<u32> {
        let mut left = set;
        let mut out = Vec::new();
        while left != 0 {
            let start = left & left.wrapping_neg();
            let mut comp = start;
            let mut frontier = start;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let new = adj[v] & set & !comp;
                comp |= new;
                frontier |= new;
            }
            left &= !comp;
            out.push(comp);
        }
        out
    }
    fn vertex_td(adj: &[u32], set: u32) -> usize {
        if set == 0 {
            return 0;
        }
        let cs = comps(adj, set);
        if cs.len() > 1 {
            return cs.iter().map(|&c| vertex_td(adj, c)).max().unwrap();
        }
        let mut best = usize::MAX;
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            best = best.min(1 + vertex_td(adj, set & !(1 << v)));
        }
        best
    }
    let adj = adjacency(g);
    vertex_td(&adj, (1u32 << g.len()) - 1) - 1
}

/// Treewidth as the least maximum back-degree over all elimination orders.
pub fn brute_treewidth(g: &Graph) -> usize {
    fn go(adj: &mut Vec<u32>, left: u32, cur: usize, best: &mut usize) {
        if cur >= *best {
            return;
        }
        if left == 0 {
            *best = cur;
            return;
        }
        let mut rest = left;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let nb = adj[v] & left & !(1 << v);
            let deg = nb.count_ones() as usize;
            let saved = adj.clone();
            let mut m = nb;
            while m != 0 {
                let u = m.trailing_zeros() as usize;
                m &= m - 1;
                adj[u] |= nb & !(1 << u);
            }
            go(adj, left & !(1 << v), cur.max(deg), best);
            *adj = saved;
        }
    }
    let mut adj = adjacency(g);
    let mut best = g.len().saturating_sub(1);
    go(&mut adj, (1u32 << g.len()) - 1, 0, &mut best);
    best
}

/// Pathwidth as the least vertex separation number over all linear orders.
pub fn brute_pathwidth(g: &Graph) -> usize {
    fn go(adj: &[u32], placed: u32, n: usize, cur: usize, best: &mut usize) {
        if cur >= *best {
            return;
        }
        if placed.count_ones() as usize == n {
            *best = cur;
            return;
        }
        let all = (1u32 << n) - 1;
        for v in 0..n {
            if placed >> v & 1 == 1 {
                continue;
            }
            let p = placed | 1 << v;
            // Placed vertices with a neighbor still to come.
            let mut sep = 0;
            let mut m = p;
            while m != 0 {
                let u = m.trailing_zeros() as usize;
                m &= m - 1;
                if adj[u] & all & !p != 0 {
                    sep += 1;
                }
            }
            go(adj, p, n, cur.max(sep), best);
        }
    }
    let adj = adjacency(g);
    let mut best = g.len().saturating_sub(1);
    go(&adj, 0, g.len(), 0, &mut best);
    best
}

/// Isomorphism by backtracking over injective maps; with equal tuple counts
/// per symbol an injective homomorphism between equal-size structures is an
/// isomorphism.
pub fn brute_isomorphic(a: &Structure, b: &Structure) -> bool {
    if a.len() != b.len() || a.vocabulary() != b.vocabulary() {
        return false;
    }
    if a.relations().any(|(s, r)| b.relation(s).unwrap().len() != r.len()) {
        return false;
    }
    let tuples: Vec<(String, Vec<Elem>)> = a
        .relations()
        .flat_map(|(s, r)| r.iter().map(move |t| (s.to_string(), t.to_vec())))
        .collect();
    fn go(i: usize, map: &mut Vec<Elem>, used: &mut Vec<bool>, a: &Structure, b: &Structure, tuples: &[(String, Vec<Elem>)]) -> bool {
        let ok = tuples.iter().all(|(s, t)| {
            if t.iter().any(|&e| e as usize >= i) || !t.iter().any(|&e| e as usize == i.wrapping_sub(1)) {
                return true;
            }
            let img: Vec<Elem> = t.iter().map(|&e| map[e as usize]).collect();
            b.holds(s, &img)
        });
        if !ok {
            return false;
        }
        if i == a.len() {
            return true;
        }
        for y in 0..b.len() {
            if used[y] {
                continue;
            }
            used[y] = true;
            map.push(y as Elem);
            if go(i + 1, map, used, a, b, tuples) {
                return true;
            }
            map.pop();
            used[y] = false;
        }
        false
    }
    go(0, &mut Vec::new(), &mut vec![false; b.len()], a, b, &tuples)
}

pub fn mode_name(d: &Deconstruction) -> &'static str {
    match d.mode() {
        Mode::Deconstruction => "deconstruction",
        Mode::Decomposition => "decomposition",
    }
}

/// Every game vector with positive entries, at most `rounds` rounds and at
/// most `pebbles` pebbles in total.
pub fn game_vectors(rounds: usize, pebbles: usize) -> Vec<homlab::games::GameVector> {
    fn go(prefix: &mut Vec<usize>, rounds: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        if prefix.len() == rounds {
            return;
        }
        for p in 1..=left {
            prefix.push(p);
            go(prefix, rounds, left - p, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), rounds, pebbles, &mut out);
    out.into_iter().map(|v| homlab::games::GameVector::new(v).unwrap()).collect()
}
