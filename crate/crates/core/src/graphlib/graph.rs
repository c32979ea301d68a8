use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::relstruct::{Elem, Structure, StructureBuilder, Vocabulary};

/// A simple undirected graph: a structure over `{E/2}` with `E` irreflexive
/// and symmetric. Adjacency lists are cached.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    s: Structure,
    adj: Vec<Vec<Elem>>,
}

impl Graph {
    pub fn from_structure(s: Structure) -> Result<Graph> {
        if s.vocabulary() != &Vocabulary::graph() {
            return Err(Error::VocabularyMismatch("a graph has vocabulary {E/2}".into()));
        }
        let e = s.relation("E").expect("graph vocabulary");
        let mut adj = vec![Vec::new(); s.len()];
        for t in e.iter() {
            if t[0] == t[1] {
                return Err(Error::Argument(format!("loop at `{}`", s.name(t[0]))));
            }
            if !e.contains(&[t[1], t[0]]) {
                return Err(Error::Argument(format!(
                    "edge ({},{}) is not symmetric",
                    s.name(t[0]),
                    s.name(t[1])
                )));
            }
            adj[t[0] as usize].push(t[1]);
        }
        Ok(Graph { s, adj })
    }

    /// Builds a graph from names (any order) and adjacency lists indexed like
    /// `names`; edges are symmetrized.
    pub(crate) fn from_adjacency(names: Vec<String>, adj: Vec<Vec<Elem>>) -> Result<Graph> {
        let mut b = StructureBuilder::new(Vocabulary::graph());
        for n in names {
            b.element(n);
        }
        for (u, list) in adj.iter().enumerate() {
            for &v in list {
                if u as Elem == v {
                    return Err(Error::Argument("loop in graph".into()));
                }
                b.tuple("E", &[u as Elem, v])?;
                b.tuple("E", &[v, u as Elem])?;
            }
        }
        Graph::from_structure(b.finish()?)
    }

    /// Builds a graph from vertex names and undirected edges given by name.
    pub fn from_edges<'a>(
        vertices: impl IntoIterator<Item = &'a str>,
        edges: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Graph> {
        let mut b = StructureBuilder::new(Vocabulary::graph());
        for v in vertices {
            b.element(v);
        }
        for (u, v) in edges {
            let (Some(x), Some(y)) = (b.lookup(u), b.lookup(v)) else {
                return Err(Error::Argument(format!("edge ({u},{v}) uses an unknown vertex")));
            };
            if x == y {
                return Err(Error::Argument(format!("loop at `{u}`")));
            }
            b.tuple("E", &[x, y])?;
            b.tuple("E", &[y, x])?;
        }
        Graph::from_structure(b.finish()?)
    }

    pub fn as_structure(&self) -> &Structure {
        &self.s
    }

    pub fn to_structure(&self) -> Structure {
        self.s.clone()
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Elem> + Clone {
        self.s.elements()
    }

    pub fn names(&self) -> &[String] {
        self.s.universe()
    }

    pub fn name(&self, v: Elem) -> &str {
        self.s.name(v)
    }

    pub fn index_of(&self, name: &str) -> Option<Elem> {
        self.s.index_of(name)
    }

    pub fn vertex(&self, name: &str) -> Result<Elem> {
        self.s.elem(name)
    }

    pub fn neighbors(&self, v: Elem) -> &[Elem] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: Elem) -> usize {
        self.adj[v as usize].len()
    }

    pub fn adjacent(&self, u: Elem, v: Elem) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Whether `(u, v)` belongs to the reflexive closure of the edge relation.
    pub fn refl_adjacent(&self, u: Elem, v: Elem) -> bool {
        u == v || self.adjacent(u, v)
    }

    /// Undirected edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.vertices()
            .flat_map(move |u| self.adj[u as usize].iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Connected components restricted to vertices with `keep[v]`, each
    /// sorted, ordered by least vertex.
    pub fn components_within(&self, keep: &[bool]) -> Vec<Vec<Elem>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen[s as usize] || !keep[s as usize] {
                continue;
            }
            let mut comp = vec![s];
            seen[s as usize] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &w in &self.adj[u as usize] {
                    if keep[w as usize] && !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<Vec<Elem>> {
        self.components_within(&vec![true; self.len()])
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Whether the vertex set `vs` induces a connected subgraph; the empty
    /// set counts as connected.
    pub fn is_connected_set(&self, vs: &[Elem]) -> bool {
        if vs.is_empty() {
            return true;
        }
        let mut keep = vec![false; self.len()];
        for &v in vs {
            keep[v as usize] = true;
        }
        self.components_within(&keep).len() == 1
    }

    pub fn is_forest(&self) -> bool {
        self.edge_count() + self.components().len() == self.len()
    }

    /// The subgraph induced on `vs`.
    pub fn induced(&self, vs: &[Elem]) -> Result<Graph> {
        Graph::from_structure(crate::relstruct::induced(&self.s, vs)?)
    }

    /// Text form: one `u v` line per edge and one line per isolated vertex.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in self.vertices() {
            if self.adj[v as usize].is_empty() {
                let _ = writeln!(out, "{}", self.name(v));
            }
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{} {}", self.name(u), self.name(v));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Graph> {
        let (g, roots) = parse_text(text)?;
        if !roots.is_empty() {
            return Err(Error::Parse("root lines in a plain graph file".into()));
        }
        Ok(g)
    }
}

fn parse_text(text: &str) -> Result<(Graph, Vec<String>)> {
    let mut vertices: BTreeSet<&str> = BTreeSet::new();
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            ["root", r] => roots.push(r.to_string()),
            [v] => {
                vertices.insert(v);
            }
            [u, v] => {
                vertices.insert(u);
                vertices.insert(v);
                edges.push((*u, *v));
            }
            _ => return Err(Error::Parse(format!("line {}: expected `u v`, `u` or `root u`", no + 1))),
        }
    }
    for r in &roots {
        vertices.insert(r.as_str());
    }
    if vertices.is_empty() {
        return Err(Error::Parse("graph without vertices".into()));
    }
    let g = Graph::from_edges(vertices.iter().copied(), edges.iter().copied())?;
    Ok((g, roots))
}

/// A forest with one designated root per component.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootedForest {
    graph: Graph,
    roots: Vec<Elem>,
    parent: Vec<Option<Elem>>,
    depth: Vec<usize>,
    children: Vec<Vec<Elem>>,
}

impl RootedForest {
    pub fn new(graph: Graph, mut roots: Vec<Elem>) -> Result<RootedForest> {
        if !graph.is_forest() {
            return Err(Error::Argument("the graph of a rooted forest must be acyclic".into()));
        }
        roots.sort_unstable();
        roots.dedup();
        let comps = graph.components();
        let mut comp_of = vec![0usize; graph.len()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v as usize] = i;
            }
        }
        let mut hit = vec![false; comps.len()];
        for &r in &roots {
            if r as usize >= graph.len() {
                return Err(Error::Argument(format!("root id {r} out of range")));
            }
            if std::mem::replace(&mut hit[comp_of[r as usize]], true) {
                return Err(Error::Argument("two roots in one component".into()));
            }
        }
        if let Some(i) = hit.iter().position(|h| !h) {
            return Err(Error::Argument(format!(
                "component of `{}` has no root",
                graph.name(comps[i][0])
            )));
        }
        let n = graph.len();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut children = vec![Vec::new(); n];
        let mut queue: Vec<Elem> = roots.clone();
        let mut seen = vec![false; n];
        for &r in &roots {
            seen[r as usize] = true;
        }
        let mut i = 0;
        while i < queue.len() {
            let u = queue[i];
            i += 1;
            for &w in graph.neighbors(u) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    parent[w as usize] = Some(u);
                    depth[w as usize] = depth[u as usize] + 1;
                    children[u as usize].push(w);
                    queue.push(w);
                }
            }
        }
        Ok(RootedForest {
            graph,
            roots,
            parent,
            depth,
            children,
        })
    }

    /// Roots given by name.
    pub fn with_root_names<S: AsRef<str>>(graph: Graph, roots: &[S]) -> Result<RootedForest> {
        let ids = roots
            .iter()
            .map(|r| graph.vertex(r.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        RootedForest::new(graph, ids)
    }

    /// Builds a forest from names and a parent relation (indices into `names`).
    pub fn from_parents(names: Vec<String>, parents: &[Option<usize>]) -> Result<RootedForest> {
        let adj: Vec<Vec<Elem>> = parents
            .iter()
            .map(|p| p.map(|q| vec![q as Elem]).unwrap_or_default())
            .collect();
        let root_names: Vec<String> = parents
            .iter()
            .zip(&names)
            .filter(|(p, _)| p.is_none())
            .map(|(_, n)| n.clone())
            .collect();
        let g = Graph::from_adjacency(names, adj)?;
        let f = RootedForest::with_root_names(g, &root_names)?;
        Ok(f)
    }

    /// Roots each component at its least vertex.
    pub fn rooted_at_least(graph: Graph) -> Result<RootedForest> {
        let roots = graph.components().iter().map(|c| c[0]).collect();
        RootedForest::new(graph, roots)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn roots(&self) -> &[Elem] {
        &self.roots
    }

    pub fn parent(&self, v: Elem) -> Option<Elem> {
        self.parent[v as usize]
    }

    pub fn children(&self, v: Elem) -> &[Elem] {
        &self.children[v as usize]
    }

    pub fn depth(&self, v: Elem) -> usize {
        self.depth[v as usize]
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Largest number of edges on a root-to-node path.
    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// `v` followed by its proper ancestors up to the root.
    pub fn ancestors(&self, v: Elem) -> Vec<Elem> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            out.push(p);
            cur = p;
        }
        out
    }

    pub fn is_ancestor(&self, a: Elem, d: Elem) -> bool {
        let mut cur = Some(d);
        while let Some(c) = cur {
            if c == a {
                return true;
            }
            cur = self.parent(c);
        }
        false
    }

    /// Vertices of the subtree rooted at `v`, in preorder.
    pub fn subtree(&self, v: Elem) -> Vec<Elem> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children(u).iter().rev());
        }
        out
    }

    /// Whether `u` and `v` are comparable, i.e. `(u,v)` lies in the closure.
    pub fn in_closure(&self, u: Elem, v: Elem) -> bool {
        self.is_ancestor(u, v) || self.is_ancestor(v, u)
    }

    /// Whether every edge of `g` (matched by vertex name) lies in the closure.
    pub fn closure_contains(&self, g: &Graph) -> bool {
        if g.names() != self.graph.names() {
            return false;
        }
        g.edges().all(|(u, v)| self.in_closure(u, v))
    }

    pub fn single_root(&self) -> Result<Elem> {
        match self.roots.as_slice() {
            [r] => Ok(*r),
            _ => Err(Error::Argument("expected a single rooted tree".into())),
        }
    }

    /// Text form: the graph lines followed by `root u` lines.
    pub fn to_text(&self) -> String {
        let mut out = self.graph.to_text();
        for &r in &self.roots {
            let _ = writeln!(out, "root {}", self.graph.name(r));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<RootedForest> {
        let (g, roots) = parse_text(text)?;
        RootedForest::with_root_names(g, &roots)
    }
}

/// Depth-first search forest; roots and neighbors are taken in canonical order.
pub fn dfs_forest(g: &Graph) -> RootedForest {
    let n = g.len();
    let mut seen = vec![false; n];
    let mut adj: Vec<Vec<Elem>> = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for s in g.vertices() {
        if seen[s as usize] {
            continue;
        }
        roots.push(s);
        seen[s as usize] = true;
        let mut stack: Vec<(Elem, usize)> = vec![(s, 0)];
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            let nbrs = g.neighbors(u);
            if *next < nbrs.len() {
                let w = nbrs[*next];
                *next += 1;
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    adj[u as usize].push(w);
                    stack.push((w, 0));
                }
            } else {
                stack.pop();
            }
        }
    }
    let tree = Graph::from_adjacency(g.names().to_vec(), adj).expect("dfs tree is a graph");
    RootedForest::new(tree, roots).expect("dfs tree is a forest")
}
