//! Isomorphism search between presheaves.

use std::collections::HashMap;

use super::{NatTrans, Psh};
use crate::error::Result;
use crate::search::{Budget, NatSearch};

/// An iso-invariant fingerprint of a cell `x ∈ X(c)`: which pairs of
/// parallel morphisms into `c` agree on `x`, and how many cells sit above
/// `x` along each morphism out of `c`.
fn signature(x: &Psh, c: u32, e: u32) -> Vec<u32> {
    let site = x.site();
    let mut sig = Vec::new();
    for d in 0..site.num_objects() as u32 {
        let hom = site.hom(d, c);
        for i in 0..hom.len() {
            for j in i + 1..hom.len() {
                sig.push((x.apply(hom[i], e) == x.apply(hom[j], e)) as u32);
            }
        }
    }
    for &f in site.out_of(c) {
        let t = x.act(f);
        sig.push(t.iter().filter(|&&v| v == e).count() as u32);
    }
    sig
}

/// Searches for a natural isomorphism `x -> y`; the first one in canonical
/// order, if any.
pub fn iso_search(x: &Psh, y: &Psh, budget: &mut Budget) -> Result<Option<NatTrans>> {
    if !x.site().same_as(y.site()) {
        return Err(crate::error::Error::SiteMismatch);
    }
    if x.sizes() != y.sizes() {
        return Ok(None);
    }
    let site = x.site();
    let mut search = NatSearch::new(x, y)?.injective();
    for c in 0..site.num_objects() as u32 {
        let mut by_sig: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
        for e in 0..y.size(c) as u32 {
            by_sig.entry(signature(y, c, e)).or_default().push(e);
        }
        for e in 0..x.size(c) as u32 {
            match by_sig.get(&signature(x, c, e)) {
                Some(list) => search.restrict(c, e, list.iter().copied()),
                None => return Ok(None),
            }
        }
    }
    Ok(search.first(budget)?.map(|comp| NatTrans::from_parts(x.clone(), y.clone(), comp)))
}
