use crate::decon::decomp_from_treedepth_witness;
use crate::error::{guard, Error, Result};
use crate::folog::{
    canonical_structure, classify_fragment, existential_to_dpp, formula_forest, pp_normal_form, Formula, Fragment,
};
use crate::graphlib::RootedForest;
use crate::limits::Limits;
use crate::relstruct::{color_symbol, gaifman, star_expand, Elem, Structure, StructureBuilder};

use super::bags::{decomp_with_table, Table, INERT_VERTEX};
use super::report::{digest, HomInstance, ReductionReport, Trace};

/// One disjunct compiled to `F_i* → B_i`.
struct Compiled {
    forest: RootedForest,
    target: Structure,
}

/// `b` with every color of `a*` interpreted by the whole universe.
fn all_colors(a: &Structure, b: &Structure) -> Result<Structure> {
    let star = star_expand(a)?;
    let mut out = StructureBuilder::new(star.vocabulary().clone());
    for y in b.universe() {
        out.element(y.clone());
    }
    for (s, r) in b.relations() {
        for t in r.iter() {
            out.tuple(s, t)?;
        }
    }
    for x in a.universe() {
        let c = color_symbol(x);
        for y in b.elements() {
            out.tuple(&c, &[y])?;
        }
    }
    out.finish()
}

/// `B ⊨ φ` iff `F* → B'` for the formula forest `F` of the primitive
/// positive sentence `φ`.
fn compile_pp(b: &Structure, phi: &Formula, limits: &Limits) -> Result<Compiled> {
    let mut nf = pp_normal_form(phi)?;
    if !nf.has_quantifier() {
        nf = Formula::exists("z", nf);
    }
    let a = canonical_structure(&nf, b.vocabulary())?;
    let forest = formula_forest(&nf)?;
    let d = decomp_from_treedepth_witness(&gaifman(&a), &forest)?;
    let rep = decomp_with_table(&a, &d, &all_colors(&a, b)?, Table::Listings, limits)?;
    let target = rep.output.target.expect("bag reductions always produce a target");
    Ok(Compiled { forest, target })
}

/// Counter over `Π [c_i]` in lexicographic order.
fn next_index(j: &mut [usize], bounds: &[usize]) -> bool {
    for i in (0..j.len()).rev() {
        j[i] += 1;
        if j[i] < bounds[i] {
            return true;
        }
        j[i] = 0;
    }
    false
}

/// Compiles a disjunction of primitive positive sentences into a forest
/// `F` and a structure `b'` with `b ⊨ f` iff `F* → b'`.
///
/// Each disjunct becomes a forest whose trees are combined, one tree per
/// disjunct, by merging roots; the tree named `n.r` is the `n`-th choice in
/// lexicographic order. A node `t` of disjunct `i` appears as `n.i.t`.
pub fn dpp_to_hom(b: &Structure, f: &Formula, limits: &Limits) -> Result<(RootedForest, ReductionReport)> {
    if !f.is_sentence() {
        return Err(Error::Argument("not a sentence".into()));
    }
    f.check_vocabulary(b.vocabulary())?;
    let parts = f.disjuncts();
    guard("disjuncts", parts.len(), limits.disjuncts)?;
    if let Some(p) = parts.iter().find(|p| !p.is_pp()) {
        return Err(Error::Precondition(format!("disjunct is not primitive positive: {p}")));
    }
    let compiled = parts
        .iter()
        .map(|p| compile_pp(b, p, limits))
        .collect::<Result<Vec<_>>>()?;
    let bounds: Vec<usize> = compiled.iter().map(|c| c.forest.roots().len()).collect();
    let total = bounds.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c)).unwrap_or(usize::MAX);
    guard("merged trees", total, limits.merged_trees)?;

    let mut names = Vec::new();
    let mut parents: Vec<Option<usize>> = Vec::new();
    let mut out_elems: Vec<String> = Vec::new();
    let mut e_tuples: Vec<(usize, usize)> = Vec::new();
    let mut colors: Vec<(String, usize)> = Vec::new();

    let mut j = vec![0usize; compiled.len()];
    let mut n = 0usize;
    loop {
        let root_name = format!("{n}.r");
        let root_idx = names.len();
        names.push(root_name.clone());
        parents.push(None);
        // Nodes of the chosen tree of each disjunct, without its root.
        let mut members: Vec<(usize, Elem, Vec<Elem>)> = Vec::new();
        for (i, c) in compiled.iter().enumerate() {
            let r = c.forest.roots()[j[i]];
            let sub: Vec<Elem> = c.forest.subtree(r).into_iter().filter(|&t| t != r).collect();
            let start = names.len();
            for &t in &sub {
                names.push(format!("{n}.{}.{}", i + 1, c.forest.graph().name(t)));
                parents.push(None);
            }
            for (k, &t) in sub.iter().enumerate() {
                let p = c.forest.parent(t).expect("non-root");
                parents[start + k] = Some(if p == r {
                    root_idx
                } else {
                    start + sub.iter().position(|&s| s == p).expect("parent in subtree")
                });
            }
            members.push((i, r, sub));
        }

        for (i, c) in compiled.iter().enumerate() {
            let bi = &c.target;
            let fg = c.forest.graph();
            let base = out_elems.len();
            for y in bi.universe() {
                out_elems.push(format!("{n}.{}.{y}", i + 1));
            }
            let root_color = bi
                .relation(&color_symbol(fg.name(members[i].1)))
                .expect("colors of the forest");
            let rooted: Vec<Elem> = root_color.iter().map(|t| t[0]).collect();
            for t in bi.relation("E").expect("graph vocabulary").iter() {
                e_tuples.push((base + t[0] as usize, base + t[1] as usize));
            }
            for &y in &rooted {
                e_tuples.push((base + y as usize, base + y as usize));
                colors.push((color_symbol(&root_name), base + y as usize));
            }
            for (i2, _, sub) in &members {
                for &t in sub {
                    let node = format!("{n}.{}.{}", i2 + 1, compiled[*i2].forest.graph().name(t));
                    let sym = color_symbol(&node);
                    if *i2 == i {
                        for u in bi.relation(&color_symbol(fg.name(t))).expect("colors").iter() {
                            colors.push((sym.clone(), base + u[0] as usize));
                        }
                    } else {
                        for &y in &rooted {
                            colors.push((sym.clone(), base + y as usize));
                        }
                    }
                }
            }
        }

        n += 1;
        if !next_index(&mut j, &bounds) {
            break;
        }
    }

    let forest = RootedForest::from_parents(names, &parents)?;
    let source = star_expand(forest.graph().as_structure())?;
    let mut trace = Trace::default();
    trace.notes.push(format!(
        "{} disjunct(s), tree counts {:?}, {} merged tree(s)",
        compiled.len(),
        bounds,
        n
    ));
    let mut out = StructureBuilder::new(source.vocabulary().clone());
    for y in &out_elems {
        out.element(y.clone());
    }
    if out_elems.is_empty() {
        out.element(INERT_VERTEX);
        trace.special_vertices.push(INERT_VERTEX.to_string());
    }
    for (x, y) in e_tuples {
        out.tuple("E", &[x as Elem, y as Elem])?;
    }
    for (s, y) in colors {
        out.tuple(&s, &[y as Elem])?;
    }
    Ok((
        forest,
        ReductionReport {
            input_digest: digest(&[b.to_json(), f.to_string()]),
            output: HomInstance {
                source,
                target: Some(out.finish()?),
            },
            trace,
        },
    ))
}

/// Model checking an existential sentence with relations of arity at most
/// `r` as a homomorphism problem from a starred forest of height below the
/// quantifier rank.
pub fn mc_to_hom_pipeline(b: &Structure, f: &Formula, r: usize, limits: &Limits) -> Result<(RootedForest, ReductionReport)> {
    if classify_fragment(f, r) == Fragment::Other {
        return Err(Error::Precondition(format!(
            "not an existential sentence with arity at most {r}: {f}"
        )));
    }
    let (expanded, dpp) = existential_to_dpp(b, f, limits)?;
    let (forest, mut rep) = dpp_to_hom(&expanded, &dpp, limits)?;
    rep.input_digest = digest(&[b.to_json(), f.to_string(), r.to_string()]);
    rep.trace.notes.insert(0, format!("disjunctive normal form: {dpp}"));
    Ok((forest, rep))
}
