//! Small universes `V_α = ν(Set_α^op)` and `V̇_α = ν(Ṡet_α^op)`, the
//! classification of families with small fibers, and realignment.

use std::sync::Arc;

use serde_json::json;

use crate::error::{Error, Result};
use crate::fincat::{functors, FiniteSets, Functor, MorId, Site};
use crate::presheaf::{iso_search, pullback, search_over, NatTrans, Psh};
use crate::report::CheckReport;
use crate::search::{Budget, NatSearch};

use super::{nerve_with, NerveData, Slices};

/// `V̇_α -> V_α` on a site, with the skeletal sets behind both.
#[derive(Clone, Debug)]
pub struct Universe {
    pub alpha: usize,
    pub sets: FiniteSets,
    pub pointed: FiniteSets,
    pub base: NerveData,
    pub total: NerveData,
    /// Forgets the point.
    pub proj: NatTrans,
}

/// Builds `V_α` for `α ∈ {2, 3}`.
pub fn universe(alpha: usize, site: &Site, budget: &mut Budget) -> Result<Universe> {
    if !(2..=3).contains(&alpha) {
        return Err(Error::Input(format!("α must be 2 or 3, got {alpha}")));
    }
    let slices = Arc::new(Slices::new(site));
    let sets = FiniteSets::new(alpha, false);
    let pointed = FiniteSets::new(alpha, true);
    let base = nerve_with(&sets.cat.opposite(), &slices, budget)?;
    let total = nerve_with(&pointed.cat.opposite(), &slices, budget)?;
    let forget = Functor {
        obj: pointed.objects.iter().map(|&(n, _)| sets.object(n, None).expect("size below α")).collect(),
        mor: (0..pointed.cat.num_morphisms() as MorId)
            .map(|m| {
                let (a, b) = (pointed.cat.dom(m), pointed.cat.cod(m));
                let (fa, fb) = (pointed.objects[a as usize].0, pointed.objects[b as usize].0);
                let (fa, fb) = (sets.object(fa, None).expect("size"), sets.object(fb, None).expect("size"));
                sets.morphism(fa, fb, &pointed.tables[m as usize]).expect("every function is in the skeleton")
            })
            .collect(),
    };
    let proj = total.map(&forget, &base)?;
    Ok(Universe { alpha, sets, pointed, base, total, proj })
}

impl Universe {
    pub fn site(&self) -> &Site {
        &self.base.slices.site
    }

    /// The classifying maps `X -> V_α` and `Y -> V̇_α` of `f : Y -> X`, read
    /// off the fibers in index order.
    pub fn classify_family(&self, f: &NatTrans) -> Result<(NatTrans, NatTrans)> {
        let (y, x) = (f.src(), f.tgt());
        let site = self.site();
        if !site.same_as(x.site()) {
            return Err(Error::SiteMismatch);
        }
        // fibers[d][v] lists the cells of Y(d) over v ∈ X(d), in order.
        let mut fibers: Vec<Vec<Vec<u32>>> = (0..site.num_objects()).map(|d| vec![Vec::new(); x.size(d as u32)]).collect();
        for d in 0..site.num_objects() as u32 {
            for e in 0..y.size(d) as u32 {
                fibers[d as usize][f.apply(d, e) as usize].push(e);
            }
        }
        if let Some((d, v, n)) = fibers.iter().enumerate().find_map(|(d, fs)| {
            fs.iter().enumerate().find(|(_, s)| s.len() >= self.alpha).map(|(v, s)| (d, v, s.len()))
        }) {
            return Err(Error::Input(format!(
                "the fiber over cell {v} at {} has {n} elements, not fewer than α = {}",
                site.object_name(d as u32),
                self.alpha
            )));
        }
        let mut chi = Vec::with_capacity(site.num_objects());
        let mut dot = Vec::with_capacity(site.num_objects());
        for c in 0..site.num_objects() as u32 {
            let mut tc = Vec::with_capacity(x.size(c));
            for v in 0..x.size(c) as u32 {
                let g = self.fiber_functor(f, &fibers, c, v, None)?;
                tc.push(self.base.cell_of(c, &g).expect("fiber functor is a cell"));
            }
            chi.push(tc);
            let mut tc = Vec::with_capacity(y.size(c));
            for e in 0..y.size(c) as u32 {
                let g = self.fiber_functor(f, &fibers, c, f.apply(c, e), Some(e))?;
                tc.push(self.total.cell_of(c, &g).expect("pointed fiber functor is a cell"));
            }
            dot.push(tc);
        }
        Ok((NatTrans::new(x.clone(), self.base.obj.clone(), chi)?, NatTrans::new(y.clone(), self.total.obj.clone(), dot)?))
    }

    /// `(d, u) ↦ f⁻¹(X(u)v)`, pointed at `Y(u)e` when `e` is given.
    fn fiber_functor(&self, f: &NatTrans, fibers: &[Vec<Vec<u32>>], c: u32, v: u32, e: Option<u32>) -> Result<Functor> {
        let site = self.site();
        let (x, y) = (f.tgt(), f.src());
        let sl = &self.base.slices.over[c as usize];
        let sets = if e.is_some() { &self.pointed } else { &self.sets };
        let object = |o: u32| {
            let (d, u) = sl.element(o);
            let h = site.hom(d, c)[u as usize];
            let fib = &fibers[d as usize][x.apply(h, v) as usize];
            let point = e.map(|e| fib.iter().position(|&z| z == y.apply(h, e)).expect("the point lies in its fiber"));
            sets.object(fib.len(), point).expect("fiber below α")
        };
        let obj: Vec<u32> = (0..sl.cat.num_objects() as u32).map(object).collect();
        let mut mor = Vec::with_capacity(sl.cat.num_morphisms());
        for m in 0..sl.cat.num_morphisms() as MorId {
            let g = sl.proj.mor[m as usize];
            let (d, u) = sl.element(sl.cat.cod(m));
            let d0 = site.dom(g);
            let h = site.hom(d, c)[u as usize];
            let from = &fibers[d as usize][x.apply(h, v) as usize];
            let to = &fibers[d0 as usize][x.apply(site.compose(h, g), v) as usize];
            let table: Vec<usize> =
                from.iter().map(|&z| to.iter().position(|&w| w == y.apply(g, z)).expect("restriction stays in the fiber")).collect();
            // A morphism of Set^op from F(dom) to F(cod) is a function F(cod) -> F(dom).
            let (a, b) = (obj[sl.cat.cod(m) as usize], obj[sl.cat.dom(m) as usize]);
            mor.push(sets.morphism(a, b, &table).ok_or_else(|| Error::Malformed("restriction is not in the skeleton".into()))?);
        }
        Ok(Functor { obj, mor })
    }

    /// Checks that `Y -> V̇_α` over `χ : X -> V_α` exhibits `f` as a pullback.
    pub fn check_classifying_square(&self, f: &NatTrans, chi: &NatTrans, dot: &NatTrans) -> Result<CheckReport> {
        let mut r = CheckReport::new("classifying-square");
        if !f.then(chi)?.same_as(&dot.then(&self.proj)?) {
            r.fail("the square does not commute", json!({}));
            return Ok(r);
        }
        let p = pullback(chi, &self.proj)?;
        let gap = p.pair(&[f.clone(), dot.clone()])?;
        r.require(gap.is_iso(), "the family is not the pullback of the universal one", || {
            json!({"family": f.src().sizes(), "pullback": p.obj.sizes()})
        });
        Ok(r)
    }

    /// Whether `f` is a pullback of `V̇_α -> V_α` along `chi`, i.e. whether
    /// `chi*V̇_α ≅ Y` over `X`.
    pub fn classifies(&self, chi: &NatTrans, f: &NatTrans, budget: &mut Budget) -> Result<bool> {
        let p = pullback(chi, &self.proj)?;
        if p.obj.sizes() != f.src().sizes() {
            return Ok(false);
        }
        let s = search_over(f, &p.proj[0])?.injective();
        Ok(s.first(budget)?.is_some())
    }

    /// Searches for `χ : X -> V_α` classifying `f` with `χ ∘ c = given`.
    /// Candidates are narrowed to those whose object part matches the
    /// fibers of `f`; each one is then tested by an isomorphism search.
    pub fn realign_family(&self, c: &NatTrans, f: &NatTrans, given: &NatTrans, budget: &mut Budget) -> Result<Option<NatTrans>> {
        if !c.is_mono() {
            return Err(Error::Input("realignment needs a monomorphism".into()));
        }
        if !c.tgt().same_as(f.tgt()) || !given.src().same_as(c.src()) {
            return Err(Error::Input("the maps do not fit together".into()));
        }
        let x = f.tgt();
        let (canonical, _) = self.classify_family(f)?;
        let site = self.site();
        let mut s = NatSearch::new(x, &self.base.obj)?;
        for d in 0..site.num_objects() as u32 {
            for v in 0..x.size(d) as u32 {
                let want = &self.base.cells[d as usize][canonical.apply(d, v) as usize].obj;
                let cells = &self.base.cells[d as usize];
                s.retain(d, v, |w| cells[w as usize].obj == *want);
            }
            for z in 0..c.src().size(d) as u32 {
                s.fix(d, c.apply(d, z), given.apply(d, z));
            }
        }
        let mut found = None;
        let mut err = None;
        let base = self.base.obj.clone();
        let mut inner = Budget::new(budget.remaining());
        s.for_each(budget, |comp| {
            let chi = NatTrans::new(x.clone(), base.clone(), comp.clone()).expect("search returns natural maps");
            match self.classifies(&chi, f, &mut inner) {
                Ok(true) => {
                    found = Some(chi);
                    false
                }
                Ok(false) => true,
                Err(e) => {
                    err = Some(e);
                    false
                }
            }
        })?;
        budget.charge(inner.used(), "realignment")?;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(found)
    }

    /// Compares `V_α(c)` with `Set_α`-valued presheaves on `ℂ/c`, counted
    /// as functors `(ℂ/c)^op -> Set_α`.
    pub fn check_presheaf_count(&self, budget: &mut Budget) -> Result<CheckReport> {
        let mut r = CheckReport::new("universe-presheaves");
        for c in 0..self.site().num_objects() as u32 {
            let slice = self.base.slices.over[c as usize].cat.opposite();
            let n = functors(&slice, &self.sets.cat, budget)?.len();
            let have = self.base.obj.size(c);
            r.require(n == have, "a level has the wrong number of cells", || json!({"level": c, "presheaves": n, "cells": have}));
        }
        Ok(r)
    }
}

/// Checks `V₂ ≅ Ω` by isomorphism search, and that `V̇₂ -> V₂` is `true`.
pub fn check_universe_omega(site: &Site, omega: &Psh, truth: &NatTrans, budget: &mut Budget) -> Result<CheckReport> {
    let mut r = CheckReport::new("universe-omega").param("site", site.object_names().join(","));
    let u = universe(2, site, budget)?;
    for c in 0..site.num_objects() as u32 {
        r.count(&format!("cells_at_{}", site.object_name(c)), u.base.obj.size(c) as u64);
    }
    let Some(iso) = iso_search(&u.base.obj, omega, budget)? else {
        r.fail("no natural isomorphism V₂ ≅ Ω", json!({"universe": u.base.obj.sizes(), "omega": omega.sizes()}));
        return Ok(r);
    };
    r.require(u.total.obj.sizes().iter().all(|&n| n == 1), "the pointed universe is not terminal", || {
        json!({"sizes": u.total.obj.sizes()})
    });
    let via = u.proj.then(&iso)?;
    r.require(via.components() == truth.components(), "the universal family is not `true`", || json!({}));
    Ok(r)
}
