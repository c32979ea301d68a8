use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{guard, Error, Result};
use crate::graphlib::{Graph, RootedForest};
use crate::limits::Limits;
use crate::relstruct::{color_symbol, Elem, Structure, StructureBuilder, Vocabulary};

use super::formula::{Atom, Formula, Var};

/// Symbol interpreted by the complement of `rel`.
pub fn complement_symbol(rel: &str) -> String {
    format!("!{rel}")
}

/// Symbol interpreted by the disequality relation.
pub const NOT_EQUAL: &str = "!=";

/// Renames bound variables so that no two quantifiers bind the same name
/// and no quantifier binds a free variable's name. The first binder of a
/// name keeps it.
pub fn normalize(f: &Formula) -> Formula {
    let all = f.all_vars();
    let mut taken: BTreeSet<Var> = f.free_vars();
    fn go(f: &Formula, scope: &mut Vec<(Var, Var)>, taken: &mut BTreeSet<Var>, all: &BTreeSet<Var>) -> Formula {
        let rename = |v: &Var, scope: &[(Var, Var)]| {
            scope
                .iter()
                .rev()
                .find(|(old, _)| old == v)
                .map_or_else(|| v.clone(), |(_, new)| new.clone())
        };
        match f {
            Formula::Atom(a) | Formula::NotAtom(a) => {
                let a = Atom {
                    rel: a.rel.clone(),
                    args: a.args.iter().map(|v| rename(v, scope)).collect(),
                };
                if matches!(f, Formula::Atom(_)) {
                    Formula::Atom(a)
                } else {
                    Formula::NotAtom(a)
                }
            }
            Formula::Eq(x, y) => Formula::Eq(rename(x, scope), rename(y, scope)),
            Formula::NotEq(x, y) => Formula::NotEq(rename(x, scope), rename(y, scope)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| go(g, scope, taken, all)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| go(g, scope, taken, all)).collect()),
            Formula::Exists(x, b) => {
                let new = if taken.contains(x) {
                    (1..)
                        .map(|k| format!("{x}_{k}"))
                        .find(|c| !taken.contains(c) && !all.contains(c))
                        .expect("fresh name")
                } else {
                    x.clone()
                };
                taken.insert(new.clone());
                scope.push((x.clone(), new.clone()));
                let body = go(b, scope, taken, all);
                scope.pop();
                Formula::exists(new, body)
            }
        }
    }
    go(f, &mut Vec::new(), &mut taken, &all)
}

/// Flattens nested conjunctions and drops empty ones.
fn flatten_and(parts: Vec<Formula>) -> Formula {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Formula::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    if out.len() == 1 {
        out.pop().expect("one part")
    } else {
        Formula::And(out)
    }
}

/// Normal form of a primitive positive sentence: bound variables are
/// pairwise distinct and every equality class of variables is replaced by
/// its outermost member, whose quantifier encloses all the others.
pub fn pp_normal_form(f: &Formula) -> Result<Formula> {
    if !f.is_pp() {
        return Err(Error::Precondition(format!("not primitive positive: {f}")));
    }
    if !f.is_sentence() {
        return Err(Error::Argument("not a sentence".into()));
    }
    let g = normalize(f);
    let mut order: HashMap<Var, (usize, usize)> = HashMap::new();
    fn depths(f: &Formula, d: usize, order: &mut HashMap<Var, (usize, usize)>) {
        if let Formula::Exists(x, _) = f {
            let n = order.len();
            order.insert(x.clone(), (d, n));
        }
        let d = d + usize::from(matches!(f, Formula::Exists(..)));
        for c in f.children() {
            depths(c, d, order);
        }
    }
    depths(&g, 0, &mut order);

    let mut parent: HashMap<Var, Var> = HashMap::new();
    fn find(parent: &HashMap<Var, Var>, v: &Var) -> Var {
        let mut cur = v.clone();
        while let Some(p) = parent.get(&cur) {
            if *p == cur {
                break;
            }
            cur = p.clone();
        }
        cur
    }
    let mut eqs = Vec::new();
    g.visit(&mut |h| {
        if let Formula::Eq(x, y) = h {
            eqs.push((x.clone(), y.clone()));
        }
    });
    for (x, y) in eqs {
        let (rx, ry) = (find(&parent, &x), find(&parent, &y));
        if rx != ry {
            let (keep, drop) = if order[&rx] <= order[&ry] { (rx, ry) } else { (ry, rx) };
            parent.insert(drop, keep);
        }
    }
    fn rewrite(f: &Formula, parent: &HashMap<Var, Var>) -> Formula {
        match f {
            Formula::Atom(a) => Formula::Atom(Atom {
                rel: a.rel.clone(),
                args: a.args.iter().map(|v| find(parent, v)).collect(),
            }),
            Formula::Eq(..) => Formula::truth(),
            Formula::And(fs) => flatten_and(fs.iter().map(|g| rewrite(g, parent)).collect()),
            Formula::Exists(x, b) => {
                let body = rewrite(b, parent);
                if find(parent, x) == *x {
                    Formula::exists(x.clone(), body)
                } else {
                    body
                }
            }
            _ => unreachable!("pp formulas have no other connectives"),
        }
    }
    Ok(rewrite(&g, &parent))
}

fn bound_vars(f: &Formula) -> Vec<Var> {
    let mut out = Vec::new();
    f.visit(&mut |g| {
        if let Formula::Exists(x, _) = g {
            out.push(x.clone());
        }
    });
    out
}

/// The structure whose elements are the variables of the normalized
/// sentence and whose tuples are its atoms; `b` satisfies `f` iff this
/// structure maps homomorphically to `b`.
pub fn canonical_structure(f: &Formula, vocab: &Vocabulary) -> Result<Structure> {
    f.check_vocabulary(vocab)?;
    let g = pp_normal_form(f)?;
    let mut b = StructureBuilder::new(vocab.clone());
    for v in bound_vars(&g) {
        b.element(v);
    }
    if b.element_count() == 0 {
        return Err(Error::Precondition("the sentence quantifies no variable".into()));
    }
    let mut res = Ok(());
    g.visit(&mut |h| {
        if let Formula::Atom(a) = h {
            let ids: Vec<Elem> = a.args.iter().map(|v| b.lookup(v).expect("bound")).collect();
            if res.is_ok() {
                res = b.tuple(&a.rel, &ids);
            }
        }
    });
    res?;
    b.finish()
}

/// The forest on the variables of the normalized sentence in which each
/// quantified variable is a child of the nearest enclosing quantifier.
pub fn formula_forest(f: &Formula) -> Result<RootedForest> {
    let g = pp_normal_form(f)?;
    let mut names = Vec::new();
    let mut parents = Vec::new();
    fn walk(f: &Formula, up: Option<usize>, names: &mut Vec<Var>, parents: &mut Vec<Option<usize>>) {
        let mut up = up;
        if let Formula::Exists(x, _) = f {
            names.push(x.clone());
            parents.push(up);
            up = Some(names.len() - 1);
        }
        for c in f.children() {
            walk(c, up, names, parents);
        }
    }
    walk(&g, None, &mut names, &mut parents);
    if names.is_empty() {
        return Err(Error::Precondition("the sentence quantifies no variable".into()));
    }
    RootedForest::from_parents(names, &parents)
}

fn query_at(t: &RootedForest, v: Elem) -> Formula {
    let name = t.graph().name(v);
    let colour = Formula::atom(&color_symbol(name), [name]);
    if t.children(v).is_empty() {
        return colour;
    }
    let mut parts = vec![colour];
    for &c in t.children(v) {
        let child = t.graph().name(c);
        parts.push(Formula::exists(
            child,
            Formula::And(vec![
                Formula::atom("E", [name, child]),
                Formula::atom("E", [child, name]),
                query_at(t, c),
            ]),
        ));
    }
    Formula::And(parts)
}

/// The primitive positive formula, free in the variable named like `r`,
/// satisfied by `a` in `B` iff some homomorphism from the starred tree to
/// `B` sends `r` to `a`. Variables are named after tree vertices. Each tree
/// edge contributes both `E x y` and `E y x`, so `B` need not be symmetric.
pub fn canonical_query(tree: &Graph, r: Elem) -> Result<Formula> {
    if !(tree.is_connected() && tree.is_forest()) {
        return Err(Error::Argument("canonical queries are defined for trees".into()));
    }
    let t = RootedForest::new(tree.clone(), vec![r])?;
    Ok(query_at(&t, r))
}

/// Conjunction over the trees of `f` of the existentially closed canonical
/// queries at their roots; `B` satisfies it iff `F*` maps to `B`.
pub fn canonical_sentence(f: &RootedForest) -> Formula {
    let parts: Vec<Formula> = f
        .roots()
        .iter()
        .map(|&r| Formula::exists(f.graph().name(r), query_at(f, r)))
        .collect();
    if parts.len() == 1 {
        parts.into_iter().next().expect("one tree")
    } else {
        Formula::And(parts)
    }
}

fn positive(f: &Formula) -> Formula {
    match f {
        Formula::NotAtom(a) => Formula::Atom(Atom {
            rel: complement_symbol(&a.rel),
            args: a.args.clone(),
        }),
        Formula::NotEq(x, y) => Formula::atom(NOT_EQUAL, [x.clone(), y.clone()]),
        Formula::And(fs) => Formula::And(fs.iter().map(positive).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(positive).collect()),
        Formula::Exists(x, b) => Formula::exists(x.clone(), positive(b)),
        other => other.clone(),
    }
}

fn distribute(f: &Formula, limit: usize) -> Result<Vec<Formula>> {
    Ok(match f {
        Formula::Atom(_) | Formula::Eq(..) => vec![f.clone()],
        Formula::NotAtom(_) | Formula::NotEq(..) => unreachable!("negations are removed first"),
        Formula::Or(fs) => {
            let mut out = Vec::new();
            for g in fs {
                out.extend(distribute(g, limit)?);
                guard("number of disjuncts", out.len(), limit)?;
            }
            out
        }
        Formula::And(fs) => {
            let mut acc: Vec<Vec<Formula>> = vec![Vec::new()];
            for g in fs {
                let ds = distribute(g, limit)?;
                guard("number of disjuncts", acc.len() * ds.len(), limit)?;
                acc = acc
                    .into_iter()
                    .flat_map(|prefix| {
                        ds.iter().map(move |d| {
                            let mut p = prefix.clone();
                            p.push(d.clone());
                            p
                        })
                    })
                    .collect();
            }
            acc.into_iter().map(Formula::And).collect()
        }
        Formula::Exists(x, b) => distribute(b, limit)?
            .into_iter()
            .map(|d| Formula::exists(x.clone(), d))
            .collect(),
    })
}

/// Rewrites an existential sentence over `a` into a disjunction of primitive
/// positive sentences over the expansion of `a` by complement relations
/// `!R` (and `!=` when disequalities occur).
pub fn existential_to_dpp(a: &Structure, f: &Formula, limits: &Limits) -> Result<(Structure, Formula)> {
    if !f.is_sentence() {
        return Err(Error::Argument("not a sentence".into()));
    }
    f.check_vocabulary(a.vocabulary())?;
    let mut uses_neq = false;
    f.visit(&mut |g| uses_neq |= matches!(g, Formula::NotEq(..)));

    let mut vocab = a.vocabulary().clone();
    let mut extra: BTreeMap<String, (usize, Option<String>)> = BTreeMap::new();
    for (s, k) in a.vocabulary().symbols() {
        extra.insert(complement_symbol(s), (k, Some(s.to_string())));
    }
    if uses_neq {
        extra.insert(NOT_EQUAL.to_string(), (2, None));
    }
    for (s, &(k, _)) in &extra {
        if vocab.contains(s) {
            return Err(Error::NameClash(s.clone()));
        }
        vocab.insert(s, k)?;
    }
    let mut b = StructureBuilder::new(vocab);
    for e in a.elements() {
        b.element(a.name(e));
    }
    for (s, r) in a.relations() {
        for t in r.iter() {
            b.tuple(s, t)?;
        }
    }
    let n = a.len();
    for (s, (k, base)) in &extra {
        let total = n.checked_pow(*k as u32).unwrap_or(usize::MAX);
        guard("complement relation size", total, limits.interpretation_tuples)?;
        let mut t = vec![0 as Elem; *k];
        for _ in 0..total {
            let keep = match base {
                Some(r) => !a.holds(r, &t),
                None => t[0] != t[1],
            };
            if keep {
                b.tuple(s, &t)?;
            }
            for slot in t.iter_mut().rev() {
                *slot += 1;
                if (*slot as usize) < n {
                    break;
                }
                *slot = 0;
            }
        }
    }
    let expanded = b.finish()?;
    let mut ds = distribute(&positive(f), limits.disjuncts)?;
    let psi = if ds.len() == 1 { ds.pop().expect("one disjunct") } else { Formula::Or(ds) };
    Ok((expanded, psi))
}
