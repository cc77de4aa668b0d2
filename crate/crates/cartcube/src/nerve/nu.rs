//! The nerve `ν(A)(c) = Cat(ℂ/c, A)`, right adjoint to `∫`.

use std::collections::HashMap;
use std::sync::Arc;

use serde_json::json;

use crate::error::{Error, Result};
use crate::fincat::{functors, functors_with, FinCat, Functor, MorId, Site};
use crate::presheaf::{pullback, NatTrans, Presheaf, Psh};
use crate::report::CheckReport;
use crate::search::{Budget, NatSearch};

use super::{Elements, Slices};

/// `ν(A)` with the functor behind every cell.
#[derive(Clone, Debug)]
pub struct NerveData {
    pub a: Arc<FinCat>,
    pub slices: Arc<Slices>,
    pub obj: Psh,
    /// `cells[c][i]` is the functor `ℂ/c -> A` of cell `i`, in canonical order.
    pub cells: Vec<Vec<Functor>>,
    index: Vec<HashMap<Functor, u32>>,
}

/// Builds `ν(A)` on `site`.
pub fn nerve(a: &FinCat, site: &Site, budget: &mut Budget) -> Result<NerveData> {
    nerve_with(a, &Arc::new(Slices::new(site)), budget)
}

/// [`nerve`] reusing precomputed slices.
pub fn nerve_with(a: &FinCat, slices: &Arc<Slices>, budget: &mut Budget) -> Result<NerveData> {
    let site = &slices.site;
    let mut cells = Vec::with_capacity(site.num_objects());
    for c in 0..site.num_objects() {
        cells.push(functors(&slices.over[c].cat, a, budget)?);
    }
    let index: Vec<HashMap<Functor, u32>> =
        cells.iter().map(|fs| fs.iter().enumerate().map(|(i, f)| (f.clone(), i as u32)).collect()).collect();
    let mut act = Vec::with_capacity(site.num_morphisms());
    for h in 0..site.num_morphisms() as MorId {
        let (c0, c) = (site.dom(h), site.cod(h));
        let along = &slices.along[h as usize];
        let t: Vec<u32> = cells[c as usize].iter().map(|f| index[c0 as usize][&f.after(along)]).collect();
        act.push(t);
    }
    let sizes = cells.iter().map(Vec::len).collect();
    let obj = Presheaf::new(site.clone(), sizes, act)?.into_psh();
    Ok(NerveData { a: Arc::new(a.clone()), slices: slices.clone(), obj, cells, index })
}

impl NerveData {
    pub fn cell_of(&self, c: u32, f: &Functor) -> Option<u32> {
        self.index[c as usize].get(f).copied()
    }

    /// `ι_x : ℂ/c -> ∫X`, sending `(d, u)` to `(d, X(u)x)`.
    pub fn point_functor(slices: &Slices, el: &Elements, c: u32, x: u32) -> Functor {
        let site = &slices.site;
        let sl = &slices.over[c as usize];
        let obj = (0..sl.cat.num_objects() as u32)
            .map(|o| {
                let (d, u) = sl.element(o);
                el.object(d, el.x.apply(site.hom(d, c)[u as usize], x))
            })
            .collect();
        let mor = (0..sl.cat.num_morphisms() as MorId)
            .map(|m| {
                let g = sl.proj.mor[m as usize];
                let (d, u) = sl.element(sl.cat.cod(m));
                el.morphism(g, el.x.apply(site.hom(d, c)[u as usize], x))
            })
            .collect();
        Functor { obj, mor }
    }

    /// The transpose `X -> ν(A)` of a functor `F : ∫X -> A`: `x ↦ F ∘ ι_x`.
    pub fn transpose_functor(&self, el: &Elements, f: &Functor) -> Result<NatTrans> {
        let x = &el.x;
        let site = &self.slices.site;
        let mut comp = Vec::with_capacity(site.num_objects());
        for c in 0..site.num_objects() as u32 {
            let mut t = Vec::with_capacity(x.size(c));
            for e in 0..x.size(c) as u32 {
                let g = f.after(&Self::point_functor(&self.slices, el, c, e));
                t.push(self.cell_of(c, &g).ok_or_else(|| Error::Malformed("transpose is not a functor".into()))?);
            }
            comp.push(t);
        }
        NatTrans::new(x.clone(), self.obj.clone(), comp)
    }

    /// The transpose `∫X -> A` of `φ : X -> ν(A)`: `(c, x) ↦ φ(x)(c, 1_c)`.
    pub fn transpose_map(&self, el: &Elements, phi: &NatTrans) -> Functor {
        let obj = (0..el.cat.num_objects() as u32)
            .map(|o| {
                let (c, e) = el.element(o);
                self.cells[c as usize][phi.apply(c, e) as usize].obj[self.slices.top(c) as usize]
            })
            .collect();
        let mor = (0..el.cat.num_morphisms() as MorId)
            .map(|m| {
                let g = el.proj.mor[m as usize];
                let (c, e) = el.element(el.cat.cod(m));
                self.cells[c as usize][phi.apply(c, e) as usize].mor[self.slices.to_top(g) as usize]
            })
            .collect();
        Functor { obj, mor }
    }

    /// `ν` on a functor `G : A -> B`, by postcomposition.
    pub fn map(&self, g: &Functor, target: &NerveData) -> Result<NatTrans> {
        let site = &self.slices.site;
        let mut comp = Vec::with_capacity(site.num_objects());
        for c in 0..site.num_objects() as u32 {
            let t: Option<Vec<u32>> = self.cells[c as usize].iter().map(|f| target.cell_of(c, &g.after(f))).collect();
            comp.push(t.ok_or_else(|| Error::Input("the functor does not land in the target nerve".into()))?);
        }
        NatTrans::new(self.obj.clone(), target.obj.clone(), comp)
    }
}

/// Checks `Hom(X, νA) ≅ Cat(∫X, A)`: equal counts, and the two transposes
/// are mutually inverse on every element of both sides.
pub fn check_adjunction(x: &Psh, nerve: &NerveData, budget: &mut Budget) -> Result<CheckReport> {
    let mut r = CheckReport::new("nerve-adjunction");
    let el = Elements::new(x);
    let mut functor_count = 0u64;
    let mut bad = None;
    functors_with(&el.cat, &nerve.a, budget, |f| {
        functor_count += 1;
        match nerve.transpose_functor(&el, f) {
            Ok(phi) if nerve.transpose_map(&el, &phi) == *f => true,
            _ => {
                bad = Some(f.clone());
                false
            }
        }
    })?;
    if let Some(f) = bad {
        r.fail("a functor does not survive the round trip", json!({"functor": f.obj}));
        return Ok(r);
    }
    let mut map_count = 0u64;
    let mut bad = None;
    NatSearch::new(x, &nerve.obj)?.for_each(budget, |comp| {
        map_count += 1;
        let phi = NatTrans::new(x.clone(), nerve.obj.clone(), comp.clone()).expect("search returns natural maps");
        let back = nerve.transpose_functor(&el, &nerve.transpose_map(&el, &phi));
        if back.map(|b| b.same_as(&phi)).unwrap_or(false) {
            true
        } else {
            bad = Some(comp.clone());
            false
        }
    })?;
    if let Some(c) = bad {
        r.fail("a map does not survive the round trip", json!({"map": c}));
        return Ok(r);
    }
    r.count("functors", functor_count);
    r.count("maps", map_count);
    r.require(functor_count == map_count, "the hom-sets have different sizes", || {
        json!({"functors": functor_count, "maps": map_count})
    });
    Ok(r)
}

/// The unit `η : X -> ν(∫X)`, `x ↦ ι_x`.
pub fn unit(x: &Psh, slices: &Arc<Slices>, budget: &mut Budget) -> Result<(Elements, NerveData, NatTrans)> {
    let el = Elements::new(x);
    let nu = nerve_with(&el.cat, slices, budget)?;
    let id = Functor::identity(&el.cat);
    let eta = nu.transpose_functor(&el, &id)?;
    Ok((el, nu, eta))
}

/// `∫f : ∫X -> ∫Y`.
pub fn elements_map(f: &NatTrans, ex: &Elements, ey: &Elements) -> Functor {
    let obj = (0..ex.cat.num_objects() as u32)
        .map(|o| {
            let (c, e) = ex.element(o);
            ey.object(c, f.apply(c, e))
        })
        .collect();
    let mor = (0..ex.cat.num_morphisms() as MorId)
        .map(|m| {
            let g = ex.proj.mor[m as usize];
            let (c, e) = ex.element(ex.cat.cod(m));
            ey.morphism(g, f.apply(c, e))
        })
        .collect();
    Functor { obj, mor }
}

/// Checks that the naturality square of the unit at `f : X -> Y` is a
/// pullback: `X ≅ Y ×_{ν∫Y} ν∫X`.
pub fn check_unit_pullback(f: &NatTrans, budget: &mut Budget) -> Result<CheckReport> {
    let mut r = CheckReport::new("unit-pullback");
    let slices = Arc::new(Slices::new(f.src().site()));
    let (ex, nx, ex_eta) = unit(f.src(), &slices, budget)?;
    let (ey, ny, ey_eta) = unit(f.tgt(), &slices, budget)?;
    let nuf = nx.map(&elements_map(f, &ex, &ey), &ny)?;
    if !f.then(&ey_eta)?.same_as(&ex_eta.then(&nuf)?) {
        r.fail("the square does not commute", json!({}));
        return Ok(r);
    }
    let p = pullback(&ey_eta, &nuf)?;
    let gap = p.pair(&[f.clone(), ex_eta])?;
    r.count("nerve_cells", nx.obj.total_cells() as u64);
    r.require(gap.is_iso(), "the comparison map into the pullback is not invertible", || {
        json!({"domain": f.src().sizes(), "pullback": p.obj.sizes()})
    });
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;
    use crate::fincat::{arrow_category, terminal_category, walking_iso};
    use crate::interval::IntervalKit;
    use crate::presheaf::{terminal, yoneda};

    #[test]
    fn nerve_of_the_point_is_terminal() {
        let s = build_site(2).unwrap();
        let nu = nerve(&terminal_category(), &s, &mut Budget::default()).unwrap();
        assert_eq!(nu.obj.sizes(), terminal(&s).sizes());
    }

    #[test]
    fn maps_from_a_representable() {
        let s = build_site(2).unwrap();
        let nu = nerve(&arrow_category(), &s, &mut Budget::default()).unwrap();
        let y1 = yoneda(&s, 1).into_psh();
        let r = check_adjunction(&y1, &nu, &mut Budget::default()).unwrap();
        assert!(r.passed(), "{r:#?}");
        // ∫y[1] is ℂ/[1], so both sides count the cells of ν(𝟚) at [1].
        assert_eq!(r.counters["maps"], nu.obj.size(1) as u64);
    }

    #[test]
    fn adjunction_on_small_objects() {
        let s = build_site(1).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        for a in [arrow_category(), walking_iso()] {
            let nu = nerve(&a, &s, &mut Budget::default()).unwrap();
            for x in [&kit.one, &kit.i, &kit.two.obj] {
                assert!(check_adjunction(x, &nu, &mut Budget::default()).unwrap().passed());
            }
        }
    }

    #[test]
    fn unit_squares_are_pullbacks() {
        let s = build_site(1).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        for f in [&kit.delta0, &kit.boundary, &NatTrans::to_terminal(&kit.i)] {
            let r = check_unit_pullback(f, &mut Budget::default()).unwrap();
            assert!(r.passed(), "{r:#?}");
        }
    }
}
