use crate::error::{guard, Error, Result};
use crate::graphlib::Graph;
use crate::limits::Limits;
use crate::relstruct::{
    color_symbol, core, direct_product, induced_by_names, is_core, reduct, star_expand, Elem, Structure, StructureBuilder,
};

use super::report::{digest, HomInstance, ReductionReport, Trace};

/// Drops the color layer: `A* → b` iff `A → b'`, where `b'` is the induced
/// substructure of `a × b|σ` on the pairs `(x, y)` with `y ∈ C_x^b`.
/// `a` must be a core.
pub fn product_reduction(a: &Structure, b: &Structure, limits: &Limits) -> Result<ReductionReport> {
    if !is_core(a, limits)? {
        return Err(Error::Precondition("the source structure is not a core".into()));
    }
    let star = star_expand(a)?;
    b.same_vocabulary(&star)
        .map_err(|e| e.in_vocabulary_of("A*"))?;
    let plain = reduct(b, a.vocabulary())?;
    let prod = direct_product(a, &plain)?;
    let keep: Vec<String> = a
        .universe()
        .iter()
        .flat_map(|x| {
            let c = b.relation(&color_symbol(x)).expect("same vocabulary");
            c.iter().map(move |t| format!("{x}*{}", b.name(t[0]))).collect::<Vec<_>>()
        })
        .collect();
    let mut trace = Trace::default();
    let target = if keep.is_empty() {
        trace.notes.push("every color is empty; the target has no elements".into());
        None
    } else {
        Some(induced_by_names(&prod, &keep)?)
    };
    Ok(ReductionReport {
        input_digest: digest(&[a.to_json(), b.to_json()]),
        output: HomInstance {
            source: a.clone(),
            target,
        },
        trace,
    })
}

/// Adds the full universe as every color of `core(a)*`: `A → b` iff
/// `core(A)* → b'`.
pub fn color_trivialize(a: &Structure, b: &Structure, limits: &Limits) -> Result<ReductionReport> {
    a.same_vocabulary(b)?;
    let c = core(a, limits)?;
    let source = star_expand(&c)?;
    let mut out = StructureBuilder::new(source.vocabulary().clone());
    for y in b.universe() {
        out.element(y.clone());
    }
    for (s, r) in b.relations() {
        for t in r.iter() {
            out.tuple(s, t)?;
        }
    }
    for x in c.universe() {
        let sym = color_symbol(x);
        for y in b.elements() {
            out.tuple(&sym, &[y])?;
        }
    }
    Ok(ReductionReport {
        input_digest: digest(&[a.to_json(), b.to_json()]),
        output: HomInstance {
            source,
            target: Some(out.finish()?),
        },
        trace: Trace::default(),
    })
}

/// `in(A)`: one left vertex per tuple position, one right vertex per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incidence {
    pub graph: Graph,
    /// Left vertices `(R, ā, i)`.
    pub left: Vec<Elem>,
    /// Right vertices, the elements of the structure.
    pub right: Vec<Elem>,
}

/// Name of the left vertex for position `i` (1-based) of tuple `t` of `rel`.
pub fn incidence_name(a: &Structure, rel: &str, t: &[Elem], i: usize) -> String {
    let args: Vec<&str> = t.iter().map(|&e| a.name(e)).collect();
    format!("{rel}({})#{i}", args.join(","))
}

/// The incidence graph: left vertices of one tuple form a clique, and
/// `(R, ā, i)` is joined to `a_i`.
pub fn incidence_graph(a: &Structure) -> Result<Incidence> {
    let mut names: Vec<String> = a.universe().to_vec();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut left_ids = Vec::new();
    for (s, r) in a.relations() {
        for t in r.iter() {
            let first = names.len();
            for i in 1..=t.len() {
                names.push(incidence_name(a, s, t, i));
            }
            for i in 0..t.len() {
                left_ids.push(first + i);
                edges.push((first + i, t[i] as usize));
                for j in i + 1..t.len() {
                    edges.push((first + i, first + j));
                }
            }
        }
    }
    let distinct: std::collections::BTreeSet<&str> = names.iter().map(String::as_str).collect();
    if distinct.len() != names.len() {
        return Err(Error::NameClash(
            "incidence vertex names collide with element names".into(),
        ));
    }
    let graph = Graph::from_edges(
        names.iter().map(String::as_str),
        edges.iter().map(|&(u, v)| (names[u].as_str(), names[v].as_str())),
    )?;
    let mut left: Vec<Elem> = left_ids.iter().map(|&i| graph.vertex(&names[i])).collect::<Result<_>>()?;
    let mut right: Vec<Elem> = a.universe().iter().map(|n| graph.vertex(n)).collect::<Result<_>>()?;
    left.sort_unstable();
    right.sort_unstable();
    Ok(Incidence { graph, left, right })
}

/// `A → b` iff `in(A)* → b'`, where `b'` is `in(b)` with `C_(R,ā,i)`
/// interpreted by the left vertices `(R, b̄, i)` of `in(b)` and `C_a` by the
/// right vertices.
pub fn incidence_reduction(a: &Structure, b: &Structure, limits: &Limits) -> Result<ReductionReport> {
    a.same_vocabulary(b)?;
    guard("relation arity", a.vocabulary().max_arity(), limits.max_arity)?;
    let ia = incidence_graph(a)?;
    let ib = incidence_graph(b)?;
    let source = star_expand(ia.graph.as_structure())?;

    let mut out = StructureBuilder::new(source.vocabulary().clone());
    for n in ib.graph.names() {
        out.element(n.clone());
    }
    for (u, v) in ib.graph.edges() {
        out.tuple("E", &[u, v])?;
        out.tuple("E", &[v, u])?;
    }
    for x in a.universe() {
        let c = color_symbol(x);
        for &y in &ib.right {
            out.tuple(&c, &[y])?;
        }
    }
    for (s, r) in a.relations() {
        let rb = b.relation(s).expect("same vocabulary");
        for t in r.iter() {
            for i in 1..=t.len() {
                let c = color_symbol(&incidence_name(a, s, t, i));
                for u in rb.iter() {
                    out.tuple(&c, &[ib.graph.vertex(&incidence_name(b, s, u, i))?])?;
                }
            }
        }
    }
    Ok(ReductionReport {
        input_digest: digest(&[a.to_json(), b.to_json()]),
        output: HomInstance {
            source,
            target: Some(out.finish()?),
        },
        trace: Trace::default(),
    })
}
