use crate::error::{guard, Result};
use crate::limits::Limits;

use super::hom::find_hom;
use super::ops::induced;
use super::structure::{Elem, Structure};

/// Searches for an endomorphism of `a` that misses some element; such a map
/// exists iff `a` has a non-injective endomorphism. Returns its image.
fn shrinking_endomorphism(a: &Structure, limits: &Limits) -> Result<Option<Vec<Elem>>> {
    if a.len() == 1 {
        return Ok(None);
    }
    for z in a.elements() {
        let rest: Vec<Elem> = a.elements().filter(|&e| e != z).collect();
        let target = induced(a, &rest)?;
        if let Some(h) = find_hom(a, &target, limits.hom_budget)?.decided(limits.hom_budget)? {
            let mut image: Vec<Elem> = h.iter().map(|&v| rest[v as usize]).collect();
            image.sort_unstable();
            image.dedup();
            return Ok(Some(image));
        }
    }
    Ok(None)
}

/// Whether every endomorphism of `a` is injective.
pub fn is_core(a: &Structure, limits: &Limits) -> Result<bool> {
    guard("structure size for core computation", a.len(), limits.core_elements)?;
    Ok(shrinking_endomorphism(a, limits)?.is_none())
}

/// The core of `a`, obtained by repeatedly restricting to the image of a
/// non-injective endomorphism.
pub fn core(a: &Structure, limits: &Limits) -> Result<Structure> {
    guard("structure size for core computation", a.len(), limits.core_elements)?;
    let mut cur = a.clone();
    while let Some(image) = shrinking_endomorphism(&cur, limits)? {
        cur = induced(&cur, &image)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphlib::generate;
    use crate::relstruct::star_expand;

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn core_examples() {
        let k3 = generate::complete(3).unwrap().to_structure();
        let p3 = generate::path(3).unwrap().to_structure();
        assert!(is_core(&k3, &lim()).unwrap());
        assert!(!is_core(&p3, &lim()).unwrap());
        assert_eq!(core(&k3, &lim()).unwrap(), k3);
        let c = core(&p3, &lim()).unwrap();
        assert_eq!(c.universe(), ["2", "3"]);
        assert_eq!(c.tuple_count(), 2);
        assert!(is_core(&star_expand(&p3).unwrap(), &lim()).unwrap());
    }

    #[test]
    fn guard_is_enforced() {
        let p9 = generate::path(9).unwrap().to_structure();
        assert!(matches!(is_core(&p9, &lim()), Err(crate::Error::Guard { .. })));
    }
}
