//! The cofibrant partial map classifier `A⁺` and its relative version over a
//! base, with unit, multiplication and classifying maps.
//!
//! For `f : A -> X` a cell of `A′` at `c` is a triple `(x, S, s)`: a point
//! `x ∈ X(c)`, a member sieve `S` on `c`, and a section `s : S -> A` lying
//! over `x`. The section is stored as a table indexed by the position of
//! `h` in `incoming(c)`, with `u32::MAX` where `h ∉ S`. The absolute `A⁺` is
//! the relative one over `A -> 1`.

use std::collections::HashMap;
use std::sync::Arc;

use serde_json::json;

use super::class::CofibrationClass;
use crate::error::{Error, Result};
use crate::presheaf::{pullback, yoneda, NatTrans, Omega, Presheaf, Psh};
use crate::report::CheckReport;
use crate::search::{Budget, NatSearch};

const UNSET: u32 = u32::MAX;

/// A cell of `A′`: base point, sieve index and section table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlusCell {
    pub base: u32,
    pub sieve: u32,
    pub section: Vec<u32>,
}

/// `A′` over `X` for a map `f : A -> X`, with `η : A -> A′` and `A′ -> X`.
#[derive(Clone, Debug)]
pub struct Plus {
    pub f: NatTrans,
    pub obj: Psh,
    pub proj: NatTrans,
    pub eta: NatTrans,
    omega: Arc<Omega>,
    cells: Vec<Vec<PlusCell>>,
    index: Vec<HashMap<PlusCell, u32>>,
}

/// The relative plus construction `A′` for `f : A -> X`.
pub fn plus_over(f: &NatTrans, class: &CofibrationClass, budget: &mut Budget) -> Result<Plus> {
    let a = f.src();
    let x = f.tgt();
    let site = a.site().clone();
    if !site.same_as(class.site()) {
        return Err(Error::SiteMismatch);
    }
    let omega = class.omega().clone();
    let no = site.num_objects();
    let mut cells: Vec<Vec<PlusCell>> = Vec::with_capacity(no);
    for c in 0..no as u32 {
        let into = site.incoming(c);
        let yc = yoneda(&site, c).into_psh();
        let mut here = Vec::new();
        for s in class.allowed_sieves(c) {
            let (sp, inc) = omega.as_subobject(&yc, c, s).to_presheaf();
            // Positions in `incoming(c)` of the cells of `S`.
            let pos: Vec<Vec<usize>> = (0..no as u32)
                .map(|d| inc.component(d).iter().map(|&hp| site.pos_in_into(site.hom(d, c)[hp as usize])).collect())
                .collect();
            for xc in 0..x.size(c) as u32 {
                budget.tick("plus construction")?;
                let mut search = NatSearch::new(&sp, a)?;
                for d in 0..no as u32 {
                    for (i, &p) in pos[d as usize].iter().enumerate() {
                        let over = x.apply(into[p], xc);
                        search.retain(d, i as u32, |v| f.apply(d, v) == over);
                    }
                }
                search.for_each(budget, |comp| {
                    let mut section = vec![UNSET; into.len()];
                    for d in 0..no {
                        for (i, &v) in comp[d].iter().enumerate() {
                            section[pos[d][i]] = v;
                        }
                    }
                    here.push(PlusCell { base: xc, sieve: s, section });
                    true
                })?;
            }
        }
        here.sort();
        cells.push(here);
    }
    let index: Vec<HashMap<PlusCell, u32>> =
        cells.iter().map(|l| l.iter().enumerate().map(|(i, k)| (k.clone(), i as u32)).collect()).collect();
    let sizes: Vec<usize> = cells.iter().map(|l| l.len()).collect();
    let mut act = Vec::with_capacity(site.num_morphisms());
    for u in 0..site.num_morphisms() as u32 {
        let (cp, c) = (site.dom(u), site.cod(u));
        let mut t = Vec::with_capacity(sizes[c as usize]);
        for cell in &cells[c as usize] {
            let key = restrict_cell(&site, &omega, x, u, cell);
            let w = index[cp as usize]
                .get(&key)
                .ok_or_else(|| Error::Malformed("the class is not closed under pullback along cube maps".into()))?;
            t.push(*w);
        }
        act.push(t);
    }
    let validity = a.validity().min(x.validity());
    let obj = Presheaf::from_parts(site.clone(), sizes, act, validity, a.intrinsic_only() || x.intrinsic_only()).into_psh();
    let proj = NatTrans::from_parts(
        obj.clone(),
        x.clone(),
        cells.iter().map(|l| l.iter().map(|k| k.base).collect()).collect(),
    );
    let mut eta_comp = Vec::with_capacity(no);
    for c in 0..no as u32 {
        let top = omega.top(c);
        if !class.allows(c, top) {
            return Err(Error::Input("the class must contain the identities".into()));
        }
        let mut t = Vec::with_capacity(a.size(c));
        for e in 0..a.size(c) as u32 {
            let section = site.incoming(c).iter().map(|&h| a.apply(h, e)).collect();
            let key = PlusCell { base: f.apply(c, e), sieve: top, section };
            t.push(index[c as usize][&key]);
        }
        eta_comp.push(t);
    }
    let eta = NatTrans::from_parts(a.clone(), obj.clone(), eta_comp);
    Ok(Plus { f: f.clone(), obj, proj, eta, omega, cells, index })
}

/// The absolute `A⁺`, relative to `A -> 1`.
pub fn plus(a: &Psh, class: &CofibrationClass, budget: &mut Budget) -> Result<Plus> {
    plus_over(&NatTrans::to_terminal(a), class, budget)
}

fn restrict_cell(site: &crate::fincat::FinCat, omega: &Omega, x: &Presheaf, u: u32, cell: &PlusCell) -> PlusCell {
    let cp = site.dom(u);
    let section = site
        .incoming(cp)
        .iter()
        .map(|&h| cell.section[site.pos_in_into(site.compose(u, h))])
        .collect();
    PlusCell { base: x.apply(u, cell.base), sieve: omega.obj.apply(u, cell.sieve), section }
}

impl Plus {
    pub fn cell(&self, c: u32, w: u32) -> &PlusCell {
        &self.cells[c as usize][w as usize]
    }

    pub fn cell_of(&self, c: u32, key: &PlusCell) -> Option<u32> {
        self.index[c as usize].get(key).copied()
    }

    pub fn omega(&self) -> &Arc<Omega> {
        &self.omega
    }

    /// Whether `w` lies in the image of `η`, i.e. carries the top sieve.
    pub fn is_total(&self, c: u32, w: u32) -> bool {
        self.cell(c, w).sieve == self.omega.top(c)
    }

    /// The classifying map `χ : Z -> A′` of the partial map `Z ↢ C -> A`
    /// lying over `h : Z -> X`. Requires `m` mono, `f ∘ g = h ∘ m`, and the
    /// sieves of `m` to be members.
    pub fn classify(&self, m: &NatTrans, g: &NatTrans, h: &NatTrans) -> Result<NatTrans> {
        let z = m.tgt();
        let site = z.site();
        if !m.is_mono() {
            return Err(Error::Input("the partial map's domain inclusion is not mono".into()));
        }
        if !g.src().same_as(m.src()) || !g.tgt().same_as(self.f.src()) || !h.src().same_as(z) || !h.tgt().same_as(self.f.tgt()) {
            return Err(Error::Input("the partial map does not fit the plus object".into()));
        }
        if g.then(&self.f)?.components() != m.then(h)?.components() {
            return Err(Error::Input("the partial map does not lie over the given base map".into()));
        }
        let inverse = preimages(m);
        let mut comp = Vec::with_capacity(site.num_objects());
        for c in 0..site.num_objects() as u32 {
            let into = site.incoming(c);
            let mut t = Vec::with_capacity(z.size(c));
            for e in 0..z.size(c) as u32 {
                let mut bits = fixedbitset::FixedBitSet::with_capacity(into.len());
                let mut section = vec![UNSET; into.len()];
                for (i, &k) in into.iter().enumerate() {
                    let d = site.dom(k);
                    let ze = z.apply(k, e);
                    let pre = inverse[d as usize][ze as usize];
                    if pre != UNSET {
                        bits.insert(i);
                        section[i] = g.apply(d, pre);
                    }
                }
                let sieve = self.omega.index_of(c, &bits).expect("closed subsets are sieves");
                let key = PlusCell { base: h.apply(c, e), sieve, section };
                let w = self
                    .cell_of(c, &key)
                    .ok_or_else(|| Error::Input("the domain inclusion is not a member of the class".into()))?;
                t.push(w);
            }
            comp.push(t);
        }
        Ok(NatTrans::from_parts(z.clone(), self.obj.clone(), comp))
    }

    /// The number of maps `χ : Z -> A′` over `h` with `χ ∘ m = η ∘ g` whose
    /// pullback of `η` is exactly `m`.
    pub fn count_classifiers(&self, m: &NatTrans, g: &NatTrans, h: &NatTrans, budget: &mut Budget) -> Result<u64> {
        let z = m.tgt();
        let site = z.site();
        let inverse = preimages(m);
        let mut s = NatSearch::new(z, &self.obj)?;
        for c in 0..site.num_objects() as u32 {
            for e in 0..z.size(c) as u32 {
                let over = h.apply(c, e);
                s.retain(c, e, |w| self.proj.apply(c, w) == over);
                let pre = inverse[c as usize][e as usize];
                if pre == UNSET {
                    s.retain(c, e, |w| !self.is_total(c, w));
                } else {
                    s.fix(c, e, self.eta.apply(c, g.apply(c, pre)));
                }
            }
        }
        s.count(budget)
    }

    /// `g′ : A′ -> B′` for `g : A -> B` over the common base: `(x, S, s) ↦ (x, S, g∘s)`.
    pub fn map_to(&self, g: &NatTrans, target: &Plus) -> Result<NatTrans> {
        if !g.src().same_as(self.f.src()) || !g.tgt().same_as(target.f.src()) || !self.f.tgt().same_as(target.f.tgt()) {
            return Err(Error::Input("the map does not connect the two plus objects".into()));
        }
        if g.then(&target.f)?.components() != self.f.components() {
            return Err(Error::Input("the map does not lie over the base".into()));
        }
        let site = self.obj.site();
        let comp = (0..site.num_objects() as u32)
            .map(|c| {
                self.cells[c as usize]
                    .iter()
                    .map(|k| {
                        let section = site
                            .incoming(c)
                            .iter()
                            .zip(&k.section)
                            .map(|(&hh, &v)| if v == UNSET { UNSET } else { g.apply(site.dom(hh), v) })
                            .collect();
                        target.index[c as usize][&PlusCell { base: k.base, sieve: k.sieve, section }]
                    })
                    .collect()
            })
            .collect();
        Ok(NatTrans::from_parts(self.obj.clone(), target.obj.clone(), comp))
    }

    /// `μ : A″ -> A′`, where `outer` is the plus of `self.proj`:
    /// `(x, S, t) ↦ (x, {h ∈ S : t(h) total}, h ↦ t(h)(id))`.
    pub fn mu(&self, outer: &Plus) -> Result<NatTrans> {
        if !outer.f.same_as(&self.proj) {
            return Err(Error::Input("the outer plus must be taken over this plus object's projection".into()));
        }
        let site = self.obj.site();
        let comp = (0..site.num_objects() as u32)
            .map(|c| {
                let into = site.incoming(c);
                outer.cells[c as usize]
                    .iter()
                    .map(|k| {
                        let mut bits = fixedbitset::FixedBitSet::with_capacity(into.len());
                        let mut section = vec![UNSET; into.len()];
                        for (i, &hh) in into.iter().enumerate() {
                            let v = k.section[i];
                            if v == UNSET {
                                continue;
                            }
                            let d = site.dom(hh);
                            let inner = self.cell(d, v);
                            if inner.sieve == self.omega.top(d) {
                                bits.insert(i);
                                section[i] = inner.section[site.pos_in_into(site.id(d))];
                            }
                        }
                        let sieve = self.omega.index_of(c, &bits).expect("composite sieve");
                        self.index[c as usize]
                            .get(&PlusCell { base: k.base, sieve, section })
                            .copied()
                            .ok_or_else(|| Error::Malformed("the class is not closed under composition".into()))
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NatTrans::from_parts(outer.obj.clone(), self.obj.clone(), comp))
    }
}

/// `m⁻¹` as per-object tables, `u32::MAX` off the image.
fn preimages(m: &NatTrans) -> Vec<Vec<u32>> {
    let z = m.tgt();
    (0..z.site().num_objects() as u32)
        .map(|c| {
            let mut t = vec![UNSET; z.size(c)];
            for (i, &v) in m.component(c).iter().enumerate() {
                t[v as usize] = i as u32;
            }
            t
        })
        .collect()
}

/// Verifies the universal property for one partial map `Z ↢ C -> A` over
/// `h : Z -> X`: the computed `χ` closes a pullback square, and it is the
/// only such map.
pub fn check_classifier(p: &Plus, m: &NatTrans, g: &NatTrans, h: &NatTrans, budget: &mut Budget) -> Result<CheckReport> {
    let mut r = CheckReport::new("classifier");
    let chi = p.classify(m, g, h)?;
    r.require(chi.naturality_failure().is_none(), "χ is not natural", || json!(null));
    r.require(
        chi.then(&p.proj)?.components() == h.components(),
        "χ does not lie over the base map",
        || json!(null),
    );
    let pb = pullback(&chi, &p.eta)?;
    let comparison = pb.pair(&[m.clone(), g.clone()])?;
    r.require(comparison.is_iso(), "the square is not a pullback", || json!({"pullback": pb.obj.sizes(), "domain": m.src().sizes()}));
    let n = p.count_classifiers(m, g, h, budget)?;
    r.count("classifiers", n);
    r.require(n == 1, "the classifier is not unique", || json!({"count": n}));
    Ok(r)
}

/// The monad laws for `(⁺, η, μ)` over a base, from three iterated plus
/// objects `p1 = A′`, `p2 = (A′)′`, `p3 = ((A′)′)′`.
pub fn check_monad_laws(p1: &Plus, p2: &Plus, p3: &Plus) -> Result<CheckReport> {
    let mut r = CheckReport::new("plus-monad");
    let mu = p1.mu(p2)?;
    let id1 = NatTrans::identity(&p1.obj);
    let left = p2.eta.then(&mu)?;
    r.require(left.same_as(&id1), "μ ∘ η_{A′} ≠ id", || json!(left.components()));
    let eta_plus = p1.map_to(&p1.eta, p2)?;
    let right = eta_plus.then(&mu)?;
    r.require(right.same_as(&id1), "μ ∘ η′ ≠ id", || json!(right.components()));
    let mu2 = p2.mu(p3)?;
    let mu_plus = p3.map_to(&mu, p2)?;
    let assoc_l = mu2.then(&mu)?;
    let assoc_r = mu_plus.then(&mu)?;
    r.require(assoc_l.same_as(&assoc_r), "μ ∘ μ_{A′} ≠ μ ∘ μ′", || json!(null));
    r.require(p1.eta.is_mono(), "η is not mono", || json!(null));
    r.count("levels", p1.obj.site().num_objects() as u64);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;
    use crate::presheaf::{coproduct, initial, iso_search, subobjects, terminal};

    #[test]
    fn plus_of_terminal_is_omega() {
        for n in 1..=2 {
            let s = build_site(n).unwrap();
            let class = CofibrationClass::all_monos(&s);
            let one = terminal(&s).into_psh();
            let p = plus(&one, &class, &mut Budget::default()).unwrap();
            assert!(p.obj.audit().is_none());
            assert_eq!(p.obj.sizes(), class.omega().obj.sizes());
            assert!(iso_search(&p.obj, &class.omega().obj, &mut Budget::default()).unwrap().is_some());
        }
    }

    #[test]
    fn plus_of_initial_has_only_empty_sieves() {
        let s = build_site(1).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let p = plus(&initial(&s).into_psh(), &class, &mut Budget::default()).unwrap();
        assert_eq!(p.obj.sizes(), &[1, 1]);
    }

    #[test]
    fn monad_laws_for_small_objects() {
        let s = build_site(1).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let one = terminal(&s).into_psh();
        let two = coproduct(&one, &one).obj;
        for a in [one, two] {
            let b = &mut Budget::default();
            let p1 = plus(&a, &class, b).unwrap();
            let p2 = plus_over(&p1.proj, &class, b).unwrap();
            let p3 = plus_over(&p2.proj, &class, b).unwrap();
            let r = check_monad_laws(&p1, &p2, &p3).unwrap();
            assert!(r.passed(), "{:?}", r.details);
            assert!(class.contains(&p1.eta));
        }
    }

    #[test]
    fn every_partial_map_into_the_interval_is_uniquely_classified() {
        let s = build_site(1).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let i = yoneda(&s, 1).into_psh();
        let p = plus(&i, &class, &mut Budget::default()).unwrap();
        let b = &mut Budget::default();
        for sub in subobjects(&i, class.omega(), b).unwrap() {
            let (c, m) = sub.to_presheaf();
            for g in crate::presheaf::enumerate_nat_trans(&c, &i, b).unwrap() {
                let r = check_classifier(&p, &m, &g, &NatTrans::to_terminal(&i), b).unwrap();
                assert!(r.passed(), "{:?}", r.details);
            }
        }
    }
}
