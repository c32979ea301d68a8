use std::collections::{BTreeMap, HashMap};

use crate::decon::{ensure_valid, Deconstruction, Mode};
use crate::error::{guard, Error, Result};
use crate::folog::{Definition, Formula, Interpretation, Var, UNIVERSE};
use crate::graphlib::Graph;
use crate::limits::Limits;
use crate::relstruct::{
    color_symbol, star_expand, Elem, Relation, Structure, StructureBuilder, Vocabulary, P1, P2,
};

use super::report::{digest, HomInstance, ReductionReport, Trace};

/// Name of the fresh looped element that absorbs host nodes with empty bags.
pub const EMPTY_BAG_VERTEX: &str = "b''";
/// Name of the element added when no partial homomorphism exists at all.
pub const INERT_VERTEX: &str = "inert";

/// Decides membership in `PH(src, tgt, ℓ)`.
struct PhCheck<'a> {
    rels: Vec<(&'a Relation, &'a Relation)>,
    size: usize,
}

impl<'a> PhCheck<'a> {
    fn new(src: &'a Structure, tgt: &'a Structure) -> Result<Self> {
        src.same_vocabulary(tgt)?;
        let rels = src
            .relations()
            .map(|(s, r)| (r, tgt.relation(s).expect("same vocabulary")))
            .collect();
        Ok(PhCheck { rels, size: src.len() })
    }

    fn holds(&self, gs: &[Elem], bs: &[Elem]) -> bool {
        let mut map: Vec<Option<Elem>> = vec![None; self.size];
        for (&g, &b) in gs.iter().zip(bs) {
            match map[g as usize] {
                Some(x) if x != b => return false,
                _ => map[g as usize] = Some(b),
            }
        }
        let mut img = Vec::new();
        self.rels.iter().all(|(ra, rb)| {
            ra.iter().all(|t| {
                img.clear();
                for &e in t {
                    match map[e as usize] {
                        Some(x) => img.push(x),
                        None => return true,
                    }
                }
                rb.contains(&img)
            })
        })
    }
}

/// The part of `PH(src, tgt, w)` whose source tuples are among `sources`,
/// in lexicographic order of `(ḡ, b̄)`.
fn ph_table(
    check: &PhCheck<'_>,
    sources: &[Vec<Elem>],
    n_tgt: usize,
    limit: usize,
) -> Result<Vec<(Vec<Elem>, Vec<Elem>)>> {
    fn extend(
        check: &PhCheck<'_>,
        gs: &[Elem],
        bs: &mut Vec<Elem>,
        n_tgt: usize,
        limit: usize,
        out: &mut Vec<(Vec<Elem>, Vec<Elem>)>,
    ) -> Result<()> {
        let k = bs.len();
        if k == gs.len() {
            out.push((gs.to_vec(), bs.clone()));
            return guard("partial homomorphism table", out.len(), limit);
        }
        for b in 0..n_tgt as Elem {
            bs.push(b);
            if check.holds(&gs[..=k], bs) {
                extend(check, gs, bs, n_tgt, limit, out)?;
            }
            bs.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    for gs in sources {
        extend(check, gs, &mut Vec::with_capacity(gs.len()), n_tgt, limit, &mut out)?;
    }
    Ok(out)
}

/// Every `w`-tuple over `n` elements in lexicographic order.
fn all_tuples(n: usize, w: usize, limit: usize) -> Result<Vec<Vec<Elem>>> {
    let total = n.checked_pow(w as u32).unwrap_or(usize::MAX);
    guard("partial homomorphism table", total, limit)?;
    let mut out = Vec::with_capacity(total);
    let mut t = vec![0 as Elem; w];
    for _ in 0..total {
        out.push(t.clone());
        for slot in t.iter_mut().rev() {
            *slot += 1;
            if (*slot as usize) < n {
                break;
            }
            *slot = 0;
        }
    }
    Ok(out)
}

/// The bag as a `w`-tuple: canonical order, padded by repeating its least element.
fn listing(bag: &[Elem], w: usize) -> Vec<Elem> {
    let mut l = bag.to_vec();
    l.resize(w, bag[0]);
    l
}

fn join(s: &Structure, t: &[Elem]) -> String {
    t.iter().map(|&e| s.name(e)).collect::<Vec<_>>().join(",")
}

/// Vocabulary of `H*` for a host graph.
fn starred_vocabulary(host: &Graph) -> Result<Vocabulary> {
    let mut v = Vocabulary::graph();
    for n in host.names() {
        v.insert(&color_symbol(n), 1)?;
    }
    Ok(v)
}

/// Which source tuples enter the partial-homomorphism table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Table {
    /// All of `PH(src, b, w)`.
    Full,
    /// Only pairs whose source tuple lists a bag. The other elements carry
    /// no color, so no homomorphism from `H*` uses them.
    Listings,
}

/// The structure `B'` on `PH(src, b, w)`, with `b''` serving the host
/// nodes whose bag is empty.
fn ph_structure(
    src: &Structure,
    host: &Graph,
    bags: &[Vec<Elem>],
    b: &Structure,
    table: Table,
    limits: &Limits,
    trace: &mut Trace,
) -> Result<Structure> {
    let check = PhCheck::new(src, b)?;
    let w = bags.iter().map(Vec::len).max().unwrap_or(0);
    let sources = match table {
        _ if w == 0 => Vec::new(),
        Table::Full => all_tuples(src.len(), w, limits.ph_elements)?,
        Table::Listings => {
            let mut l: Vec<Vec<Elem>> = bags.iter().filter(|b| !b.is_empty()).map(|b| listing(b, w)).collect();
            l.sort_unstable();
            l.dedup();
            trace.notes.push("table restricted to bag listings".into());
            l
        }
    };
    let ph = ph_table(&check, &sources, b.len(), limits.ph_elements)?;

    let mut out = StructureBuilder::new(starred_vocabulary(host)?);
    for (gs, bs) in &ph {
        out.element(format!("({}|{})", join(src, gs), join(b, bs)));
    }
    let mut by_listing: HashMap<&[Elem], Vec<Elem>> = HashMap::new();
    for (i, (gs, _)) in ph.iter().enumerate() {
        by_listing.entry(gs.as_slice()).or_default().push(i as Elem);
    }

    let mut buf = Vec::with_capacity(2 * w);
    let mut cat = Vec::with_capacity(2 * w);
    for (i, (gi, bi)) in ph.iter().enumerate() {
        for (j, (gj, bj)) in ph.iter().enumerate().skip(i) {
            buf.clear();
            buf.extend_from_slice(gi);
            buf.extend_from_slice(gj);
            cat.clear();
            cat.extend_from_slice(bi);
            cat.extend_from_slice(bj);
            if check.holds(&buf, &cat) {
                out.tuple("E", &[i as Elem, j as Elem])?;
                if i != j {
                    out.tuple("E", &[j as Elem, i as Elem])?;
                }
            }
        }
    }

    let empty: Vec<Elem> = host.vertices().filter(|&h| bags[h as usize].is_empty()).collect();
    let absorber = if !empty.is_empty() {
        let x = out.element(EMPTY_BAG_VERTEX);
        out.tuple("E", &[x, x])?;
        trace.special_vertices.push(EMPTY_BAG_VERTEX.to_string());
        Some(x)
    } else if ph.is_empty() {
        out.element(INERT_VERTEX);
        trace.special_vertices.push(INERT_VERTEX.to_string());
        trace
            .notes
            .push("no partial homomorphism exists; added an element without colors".into());
        None
    } else {
        None
    };

    for h in host.vertices() {
        let hn = host.name(h);
        let c = color_symbol(hn);
        let bag = &bags[h as usize];
        if bag.is_empty() {
            out.tuple(&c, &[absorber.expect("added above")])?;
            continue;
        }
        let l = listing(bag, w);
        if bag.len() < w {
            trace.padded.push(hn.to_string());
        }
        trace
            .bag_listings
            .insert(hn.to_string(), l.iter().map(|&g| src.name(g).to_string()).collect());
        for &p in by_listing.get(l.as_slice()).into_iter().flatten() {
            out.tuple(&c, &[p])?;
        }
    }
    out.finish()
}

/// Splits host components into all-empty and all-nonempty ones; a component
/// mixing both is rejected.
fn empty_components(host: &Graph, bags: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>> {
    let mut empty = Vec::new();
    for comp in host.components() {
        let n_empty = comp.iter().filter(|&&h| bags[h as usize].is_empty()).count();
        if n_empty == comp.len() {
            empty.push(comp);
        } else if n_empty > 0 {
            let names: Vec<&str> = comp
                .iter()
                .filter(|&&h| bags[h as usize].is_empty())
                .map(|&h| host.name(h))
                .collect();
            return Err(Error::Precondition(format!(
                "host component containing `{}` mixes empty bags ({}) with nonempty ones",
                host.name(comp[0]),
                names.join(", ")
            )));
        }
    }
    Ok(empty)
}

/// Transfers `Hom(G*)` instances to `Hom(H*)` along a deconstruction of `g`
/// over `H`: `G* → b` iff `H* → b'`.
pub fn decon_hom_reduction(g: &Graph, d: &Deconstruction, b: &Structure, limits: &Limits) -> Result<ReductionReport> {
    if d.subject() != g {
        return Err(Error::Argument("the deconstruction is not of the given graph".into()));
    }
    ensure_valid(d, "the deconstruction")?;
    let host = d.host();
    let empty = empty_components(host, d.bags())?;
    let src = star_expand(g.as_structure())?;
    b.same_vocabulary(&src)
        .map_err(|e| e.in_vocabulary_of("G*"))?;
    let mut trace = Trace::default();
    if !empty.is_empty() {
        trace.notes.push(format!(
            "{} host component(s) with empty bags map to `{EMPTY_BAG_VERTEX}`",
            empty.len()
        ));
    }
    let target = ph_structure(&src, host, d.bags(), b, Table::Full, limits, &mut trace)?;
    Ok(ReductionReport {
        input_digest: digest(&[g.as_structure().to_json(), d.to_json(), b.to_json()]),
        output: HomInstance {
            source: star_expand(host.as_structure())?,
            target: Some(target),
        },
        trace,
    })
}

/// Transfers `Hom(A*)` instances to `Hom(H*)` along a decomposition of the
/// structure `a` over a forest `H` whose bags cover every tuple of `a`.
/// Host components whose bags are all empty are dropped; the reported
/// source is `H*` for the remaining host.
pub fn decomp_hom_reduction(a: &Structure, d: &Deconstruction, b: &Structure, limits: &Limits) -> Result<ReductionReport> {
    decomp_with_table(a, d, b, Table::Full, limits)
}

pub(crate) fn decomp_with_table(
    a: &Structure,
    d: &Deconstruction,
    b: &Structure,
    table: Table,
    limits: &Limits,
) -> Result<ReductionReport> {
    if d.mode() != Mode::Decomposition {
        return Err(Error::Argument("expected a decomposition".into()));
    }
    if d.subject().names() != a.universe() {
        return Err(Error::Argument(
            "the decomposition's subject has different elements than the structure".into(),
        ));
    }
    ensure_valid(d, "the decomposition")?;
    let host = d.host();
    if !host.is_forest() {
        return Err(Error::Precondition("the host is not a forest".into()));
    }
    for (s, r) in a.relations() {
        for t in r.iter() {
            let covered = d.bags().iter().any(|bag| t.iter().all(|e| bag.binary_search(e).is_ok()));
            if !covered {
                return Err(Error::Precondition(format!(
                    "tuple {s}({}) lies in no single bag",
                    join(a, t)
                )));
            }
        }
    }
    let empty = empty_components(host, d.bags())?;
    let mut trace = Trace::default();
    let mut drop = vec![false; host.len()];
    for comp in &empty {
        for &h in comp {
            drop[h as usize] = true;
            trace.dropped.push(host.name(h).to_string());
        }
    }
    let kept: Vec<Elem> = host.vertices().filter(|&h| !drop[h as usize]).collect();
    let trimmed = if empty.is_empty() { host.clone() } else { host.induced(&kept)? };
    let bags: Vec<Vec<Elem>> = kept.iter().map(|&h| d.bag(h).to_vec()).collect();

    let src = star_expand(a)?;
    b.same_vocabulary(&src)
        .map_err(|e| e.in_vocabulary_of("A*"))?;
    let target = ph_structure(&src, &trimmed, &bags, b, table, limits, &mut trace)?;
    Ok(ReductionReport {
        input_digest: digest(&[a.to_json(), d.to_json(), b.to_json()]),
        output: HomInstance {
            source: star_expand(trimmed.as_structure())?,
            target: Some(target),
        },
        trace,
    })
}

/// Relation symbol of the auxiliary structure holding the listing of bag `h`.
pub fn bag_symbol(h: &str) -> String {
    format!("B_{h}")
}

fn vars(prefix: &str, n: usize) -> Vec<Var> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn implies(a: Formula, b: Formula) -> Formula {
    let neg = match a {
        Formula::Atom(x) => Formula::NotAtom(x),
        Formula::Eq(x, y) => Formula::NotEq(x, y),
        _ => unreachable!("only literals are negated here"),
    };
    Formula::Or(vec![neg, b])
}

/// `ph(x̄, ȳ)`: `{(x_i, y_i)}` is a partial homomorphism from the `P_1` part
/// to the `P_2` part, for a source whose symbols are `E` and the unary `colors`.
fn ph_formula(xs: &[Var], ys: &[Var], colors: &[String]) -> Formula {
    let mut parts = Vec::new();
    parts.extend(xs.iter().map(|x| Formula::atom(P1, [x])));
    parts.extend(ys.iter().map(|y| Formula::atom(P2, [y])));
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            if i < j {
                parts.push(implies(
                    Formula::Eq(xs[i].clone(), xs[j].clone()),
                    Formula::Eq(ys[i].clone(), ys[j].clone()),
                ));
            }
            parts.push(implies(
                Formula::atom("E", [&xs[i], &xs[j]]),
                Formula::atom("E", [&ys[i], &ys[j]]),
            ));
        }
        for c in colors {
            parts.push(implies(Formula::atom(c, [&xs[i]]), Formula::atom(c, [&ys[i]])));
        }
    }
    Formula::And(parts)
}

/// The auxiliary structure `G̃` and the quantifier-free interpretation of
/// dimension `2w` that produces the target of [`decon_hom_reduction`] from
/// `pair(G̃, b)`, up to isomorphism. Requires every bag to be nonempty.
pub fn deconstruction_interpretation(g: &Graph, d: &Deconstruction) -> Result<(Structure, Interpretation)> {
    if d.subject() != g {
        return Err(Error::Argument("the deconstruction is not of the given graph".into()));
    }
    ensure_valid(d, "the deconstruction")?;
    let host = d.host();
    if let Some(h) = host.vertices().find(|&h| d.bag(h).is_empty()) {
        return Err(Error::Precondition(format!(
            "bag of `{}` is empty; the interpretation covers nonempty bags only",
            host.name(h)
        )));
    }
    let w = d.max_bag();
    let star = star_expand(g.as_structure())?;

    let mut vocab = star.vocabulary().clone();
    for h in host.names() {
        vocab.insert(&bag_symbol(h), w)?;
    }
    let mut aux = StructureBuilder::new(vocab.clone());
    for x in star.universe() {
        aux.element(x.clone());
    }
    for (s, r) in star.relations() {
        for t in r.iter() {
            aux.tuple(s, t)?;
        }
    }
    for h in host.vertices() {
        aux.tuple(&bag_symbol(host.name(h)), &listing(d.bag(h), w))?;
    }
    let aux = aux.finish()?;

    let colors: Vec<String> = g.names().iter().map(|n| color_symbol(n)).collect();
    let (xs, ys, us, vs) = (vars("x", w), vars("y", w), vars("u", w), vars("v", w));
    let cat = |a: &[Var], b: &[Var]| -> Vec<Var> { a.iter().chain(b).cloned().collect() };

    let mut formulas = BTreeMap::new();
    formulas.insert(
        UNIVERSE.to_string(),
        Definition {
            vars: cat(&xs, &ys),
            formula: ph_formula(&xs, &ys, &colors),
        },
    );
    formulas.insert(
        "E".to_string(),
        Definition {
            vars: [cat(&xs, &ys), cat(&us, &vs)].concat(),
            formula: ph_formula(&cat(&xs, &us), &cat(&ys, &vs), &colors),
        },
    );
    for h in host.names() {
        formulas.insert(
            color_symbol(h),
            Definition {
                vars: cat(&xs, &ys),
                formula: Formula::atom(&bag_symbol(h), xs.clone()),
            },
        );
    }
    let mut input = vocab;
    input.insert(P1, 1)?;
    input.insert(P2, 1)?;
    let interp = Interpretation {
        input,
        output: starred_vocabulary(host)?,
        dimension: 2 * w,
        formulas,
    };
    interp.validate()?;
    Ok((aux, interp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decon::{self_deconstruction, Deconstruction};
    use crate::folog::eval_interpretation;
    use crate::graphlib::generate;
    use crate::relstruct::{gaifman, hom_exists, is_isomorphic, pair};
    use crate::Budget;

    fn hom(a: &Structure, b: &Structure) -> bool {
        hom_exists(a, b, Budget::default()).unwrap()
    }

    #[test]
    fn self_deconstruction_of_an_edge() {
        let k2 = generate::complete(2).unwrap();
        let d = self_deconstruction(&k2);
        let b = star_expand(k2.as_structure()).unwrap();
        let r = decon_hom_reduction(&k2, &d, &b, &Limits::default()).unwrap();
        assert!(hom(&b, &b));
        assert!(hom(r.source(), r.target().unwrap()));
        assert!(r.trace.padded.is_empty());
        assert_eq!(r.trace.bag_listings.len(), 2);
    }

    #[test]
    fn missing_color_fails_both_sides() {
        let k2 = generate::complete(2).unwrap();
        let d = self_deconstruction(&k2);
        let star = star_expand(k2.as_structure()).unwrap();
        let mut spec = star.to_spec();
        spec.relations.insert(color_symbol(&k2.names()[0]), Vec::new());
        let b = Structure::from_spec(&spec).unwrap();
        let r = decon_hom_reduction(&k2, &d, &b, &Limits::default()).unwrap();
        assert!(!hom(&star, &b));
        assert!(!hom(r.source(), r.target().unwrap()));
    }

    #[test]
    fn empty_bag_components_get_the_looped_vertex() {
        let k2 = generate::complete(2).unwrap();
        let host = Graph::from_edges(["a", "b", "z"], [("a", "b")]).unwrap();
        let d = Deconstruction::new(k2.clone(), host, vec![vec![0], vec![1], vec![]], Mode::Deconstruction).unwrap();
        let b = star_expand(k2.as_structure()).unwrap();
        let r = decon_hom_reduction(&k2, &d, &b, &Limits::default()).unwrap();
        assert_eq!(r.trace.special_vertices, vec![EMPTY_BAG_VERTEX.to_string()]);
        assert!(hom(r.source(), r.target().unwrap()));

        let mixed = Graph::from_edges(["a", "b", "z"], [("a", "b"), ("b", "z")]).unwrap();
        let d = Deconstruction::new(k2.clone(), mixed, vec![vec![0], vec![1], vec![]], Mode::Deconstruction).unwrap();
        assert!(matches!(
            decon_hom_reduction(&k2, &d, &b, &Limits::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn decomposition_of_a_ternary_tuple() {
        let vocab = Vocabulary::new().with("R", 3);
        let mut sb = StructureBuilder::new(vocab);
        let (x, y, z) = (sb.element("x"), sb.element("y"), sb.element("z"));
        sb.tuple("R", &[x, y, z]).unwrap();
        let a = sb.finish().unwrap();
        let host = Graph::from_edges(["h"], []).unwrap();
        let d = Deconstruction::new(gaifman(&a), host.clone(), vec![vec![0, 1, 2]], Mode::Decomposition).unwrap();
        let b = star_expand(&a).unwrap();
        let r = decomp_hom_reduction(&a, &d, &b, &Limits::default()).unwrap();
        assert_eq!(r.source().len(), 1);
        assert!(hom(r.source(), r.target().unwrap()));

        let two = Graph::from_edges(["h", "k"], [("h", "k")]).unwrap();
        let d = Deconstruction::new(gaifman(&a), two, vec![vec![0, 1], vec![1, 2]], Mode::Decomposition);
        // Not a valid decomposition of the triangle, so it fails either on validity or coverage.
        assert!(d.and_then(|d| decomp_hom_reduction(&a, &d, &b, &Limits::default())).is_err());
    }

    #[test]
    fn interpretation_matches_direct_construction() {
        let k2 = generate::complete(2).unwrap();
        let d = self_deconstruction(&k2);
        let b = star_expand(k2.as_structure()).unwrap();
        let (aux, i) = deconstruction_interpretation(&k2, &d).unwrap();
        assert_eq!(i.dimension, 2 * d.max_bag());
        let via = eval_interpretation(&i, &pair(&aux, &b).unwrap(), &Limits::default())
            .unwrap()
            .unwrap();
        let direct = decon_hom_reduction(&k2, &d, &b, &Limits::default()).unwrap();
        assert!(is_isomorphic(&via, direct.target().unwrap(), Budget::default()).unwrap());
    }
}
