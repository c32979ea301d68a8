use std::collections::HashMap;

use crate::error::Result;
use crate::limits::Budget;

use super::hom::{find_hom_within, Outcome};
use super::structure::{Elem, Structure};

/// Stable element colors computed jointly on both structures by iterated
/// refinement over tuple neighbourhoods.
fn refine(a: &Structure, b: &Structure) -> (Vec<u32>, Vec<u32>) {
    let mut ca = vec![0u32; a.len()];
    let mut cb = vec![0u32; b.len()];
    let mut classes = 1;
    loop {
        let mut ids: HashMap<(u32, Vec<(String, usize, Vec<u32>)>), u32> = HashMap::new();
        let mut step = |s: &Structure, col: &[u32]| -> Vec<u32> {
            let mut sig: Vec<Vec<(String, usize, Vec<u32>)>> = vec![Vec::new(); s.len()];
            for (sym, r) in s.relations() {
                for t in r.iter() {
                    let cols: Vec<u32> = t.iter().map(|&e| col[e as usize]).collect();
                    for (p, &e) in t.iter().enumerate() {
                        sig[e as usize].push((sym.to_string(), p, cols.clone()));
                    }
                }
            }
            sig.into_iter()
                .enumerate()
                .map(|(e, mut v)| {
                    v.sort();
                    let next = ids.len() as u32;
                    *ids.entry((col[e], v)).or_insert(next)
                })
                .collect()
        };
        let na = step(a, &ca);
        let nb = step(b, &cb);
        let count = ids.len();
        ca = na;
        cb = nb;
        if count == classes {
            return (ca, cb);
        }
        classes = count;
    }
}

/// Searches for an isomorphism `a -> b`, returned as an element map.
pub fn find_isomorphism(a: &Structure, b: &Structure, budget: Budget) -> Result<Outcome<Vec<Elem>>> {
    if a.vocabulary() != b.vocabulary() || a.len() != b.len() {
        return Ok(Outcome::NotFound);
    }
    if a.relations().any(|(s, r)| b.relation(s).map(|q| q.len()) != Some(r.len())) {
        return Ok(Outcome::NotFound);
    }
    let (ca, cb) = refine(a, b);
    let mut hist_a = ca.clone();
    let mut hist_b = cb.clone();
    hist_a.sort_unstable();
    hist_b.sort_unstable();
    if hist_a != hist_b {
        return Ok(Outcome::NotFound);
    }
    let candidates: Vec<Vec<Elem>> = ca
        .iter()
        .map(|&c| b.elements().filter(|&y| cb[y as usize] == c).collect())
        .collect();
    find_hom_within(a, b, &candidates, true, budget)
}

pub fn is_isomorphic(a: &Structure, b: &Structure, budget: Budget) -> Result<bool> {
    Ok(find_isomorphism(a, b, budget)?.decided(budget)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphlib::{generate, Graph};

    #[test]
    fn relabelled_cycle_is_isomorphic() {
        let c5 = generate::cycle(5).unwrap().to_structure();
        let other = Graph::from_edges(
            ["a", "b", "c", "d", "e"],
            [("a", "c"), ("c", "e"), ("e", "b"), ("b", "d"), ("d", "a")],
        )
        .unwrap()
        .to_structure();
        assert!(is_isomorphic(&c5, &other, Budget::default()).unwrap());
        let p5 = generate::path(5).unwrap().to_structure();
        assert!(!is_isomorphic(&c5, &p5, Budget::default()).unwrap());
    }

    #[test]
    fn regular_non_isomorphic_graphs_are_separated() {
        let c6 = generate::cycle(6).unwrap().to_structure();
        let two_triangles = Graph::from_edges(
            ["1", "2", "3", "4", "5", "6"],
            [("1", "2"), ("2", "3"), ("3", "1"), ("4", "5"), ("5", "6"), ("6", "4")],
        )
        .unwrap()
        .to_structure();
        assert!(!is_isomorphic(&c6, &two_triangles, Budget::default()).unwrap());
    }
}
