//! `TFib(a)`: the presheaf over `X` of `+`-algebra structures on the fibers
//! of `a : A -> X`.
//!
//! A cell at `c` is a point `x ∈ X(c)` and an algebra structure on the
//! pullback `x*a` along the Yoneda map of `x`. Such a structure is a map
//! `β : y(c) ×_X A′ -> A` over `X` fixing `η`, stored as a table indexed by
//! `(h ∈ incoming(c), w ∈ A′(dom h))` with `u32::MAX` off the pullback.

use std::collections::HashMap;

use super::class::CofibrationClass;
use super::plus::{plus_over, Plus};
use crate::error::{Error, Result};
use crate::presheaf::{pullback, yoneda, NatTrans, Presheaf, Psh};
use crate::search::{Budget, NatSearch};

const UNSET: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct TfibClassifier {
    pub a: NatTrans,
    pub plus: Plus,
    pub obj: Psh,
    pub to_base: NatTrans,
    cells: Vec<Vec<(u32, Vec<u32>)>>,
    offsets: Vec<Vec<usize>>,
}

pub fn tfib_classifier(a: &NatTrans, class: &CofibrationClass, budget: &mut Budget) -> Result<TfibClassifier> {
    let p = plus_over(a, class, budget)?;
    let x = a.tgt();
    let site = x.site().clone();
    let no = site.num_objects();
    let mut offsets = Vec::with_capacity(no);
    for c in 0..no as u32 {
        let mut off = Vec::new();
        let mut total = 0;
        for &h in site.incoming(c) {
            off.push(total);
            total += p.obj.size(site.dom(h));
        }
        off.push(total);
        offsets.push(off);
    }
    let mut cells = Vec::with_capacity(no);
    for c in 0..no as u32 {
        let yc = yoneda(&site, c).into_psh();
        let mut here = Vec::new();
        for xc in 0..x.size(c) as u32 {
            let comp = (0..no as u32).map(|d| site.hom(d, c).iter().map(|&h| x.apply(h, xc)).collect()).collect();
            let xhat = NatTrans::from_parts(yc.clone(), x.clone(), comp);
            let pb = pullback(&xhat, &p.proj)?;
            let mut s = NatSearch::new(&pb.obj, a.src())?;
            let mut eta_inv: Vec<HashMap<u32, u32>> = Vec::new();
            for d in 0..no as u32 {
                eta_inv.push(p.eta.component(d).iter().enumerate().map(|(i, &v)| (v, i as u32)).collect());
            }
            for d in 0..no as u32 {
                for z in 0..pb.obj.size(d) as u32 {
                    let w = pb.tuple(d, z)[1];
                    let over = p.proj.apply(d, w);
                    s.retain(d, z, |v| a.apply(d, v) == over);
                    if let Some(&e) = eta_inv[d as usize].get(&w) {
                        s.fix(d, z, e);
                    }
                }
            }
            let off = &offsets[c as usize];
            let mut tables: Vec<Vec<u32>> = Vec::new();
            s.for_each(budget, |comp| {
                let mut t = vec![UNSET; off[off.len() - 1]];
                for d in 0..no as u32 {
                    for (z, &v) in comp[d as usize].iter().enumerate() {
                        let tup = pb.tuple(d, z as u32);
                        let h = site.hom(d, c)[tup[0] as usize];
                        t[off[site.pos_in_into(h)] + tup[1] as usize] = v;
                    }
                }
                tables.push(t);
                true
            })?;
            tables.sort();
            here.extend(tables.into_iter().map(|t| (xc, t)));
        }
        cells.push(here);
    }
    let index: Vec<HashMap<(u32, Vec<u32>), u32>> =
        cells.iter().map(|l| l.iter().enumerate().map(|(i, k)| (k.clone(), i as u32)).collect()).collect();
    let sizes: Vec<usize> = cells.iter().map(|l| l.len()).collect();
    let mut act = Vec::with_capacity(site.num_morphisms());
    for u in 0..site.num_morphisms() as u32 {
        let (cp, c) = (site.dom(u), site.cod(u));
        let mut t = Vec::with_capacity(sizes[c as usize]);
        for (xc, table) in &cells[c as usize] {
            let offp = &offsets[cp as usize];
            let mut nt = vec![UNSET; offp[offp.len() - 1]];
            for (i, &h) in site.incoming(cp).iter().enumerate() {
                let j = site.pos_in_into(site.compose(u, h));
                let n = p.obj.size(site.dom(h));
                nt[offp[i]..offp[i] + n].copy_from_slice(&table[offsets[c as usize][j]..offsets[c as usize][j] + n]);
            }
            let key = (x.apply(u, *xc), nt);
            t.push(*index[cp as usize].get(&key).ok_or_else(|| Error::Malformed("restriction left TFib".into()))?);
        }
        act.push(t);
    }
    let obj = Presheaf::from_parts(site.clone(), sizes, act, p.obj.validity(), p.obj.intrinsic_only()).into_psh();
    let to_base = NatTrans::from_parts(obj.clone(), x.clone(), cells.iter().map(|l| l.iter().map(|k| k.0).collect()).collect());
    Ok(TfibClassifier { a: a.clone(), plus: p, obj, to_base, cells, offsets })
}

impl TfibClassifier {
    /// The structure `β` behind a cell, evaluated at `(h, w)`.
    pub fn structure(&self, c: u32, cell: u32, h: u32, w: u32) -> u32 {
        let site = self.obj.site();
        let (_, t) = &self.cells[c as usize][cell as usize];
        t[self.offsets[c as usize][site.pos_in_into(h)] + w as usize]
    }

    /// The algebra `α : A′ -> A` encoded by a section `σ : X -> TFib(a)`:
    /// `α(w) = σ(proj w)(id, w)`.
    pub fn algebra_of_section(&self, sigma: &NatTrans) -> NatTrans {
        let site = self.obj.site();
        let comp = (0..site.num_objects() as u32)
            .map(|c| {
                (0..self.plus.obj.size(c) as u32)
                    .map(|w| self.structure(c, sigma.apply(c, self.plus.proj.apply(c, w)), site.id(c), w))
                    .collect()
            })
            .collect();
        NatTrans::from_parts(self.plus.obj.clone(), self.a.src().clone(), comp)
    }

    /// All sections of `TFib(a) -> X`.
    pub fn sections(&self, budget: &mut Budget) -> Result<Vec<NatTrans>> {
        let x = self.a.tgt();
        crate::presheaf::maps_over(&NatTrans::identity(x), &self.to_base, budget)
    }

    /// The number of algebra structures on `a`, counted directly.
    pub fn count_algebras(&self, budget: &mut Budget) -> Result<u64> {
        let p = &self.plus;
        let a = self.a.src();
        let mut s = NatSearch::new(&p.obj, a)?;
        for c in 0..a.site().num_objects() as u32 {
            for w in 0..p.obj.size(c) as u32 {
                let over = p.proj.apply(c, w);
                s.retain(c, w, |v| self.a.apply(c, v) == over);
            }
            for e in 0..a.size(c) as u32 {
                s.fix(c, p.eta.apply(c, e), e);
            }
        }
        s.count(budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cofib::tfib::verify_algebra;
    use crate::cube::build_site;
    use crate::presheaf::{coproduct, terminal};

    #[test]
    fn identity_has_a_canonical_structure() {
        let s = build_site(1).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let i = yoneda(&s, 1).into_psh();
        let t = tfib_classifier(&NatTrans::identity(&i), &class, &mut Budget::default()).unwrap();
        assert!(t.obj.audit().is_none());
        let secs = t.sections(&mut Budget::default()).unwrap();
        assert_eq!(secs.len(), 1);
        assert!(verify_algebra(&t.plus, &t.algebra_of_section(&secs[0])).passed());
    }

    #[test]
    fn sections_match_algebras() {
        let s = build_site(1).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let one = terminal(&s).into_psh();
        let two = coproduct(&one, &one).obj;
        let om = class.omega().obj.clone();
        for x in [one, two, om] {
            let a = NatTrans::to_terminal(&x);
            let t = tfib_classifier(&a, &class, &mut Budget::default()).unwrap();
            let secs = t.sections(&mut Budget::default()).unwrap();
            assert_eq!(secs.len() as u64, t.count_algebras(&mut Budget::default()).unwrap());
            for sigma in &secs {
                assert!(verify_algebra(&t.plus, &t.algebra_of_section(sigma)).passed());
            }
        }
    }
}
