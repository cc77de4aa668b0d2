//! Classifying types `TFib(a)` and `Fib(a)` over the base of `a : A -> X`.
//!
//! A cell of `Fib(a)` at `[c]` is a point `x ∈ X(c)` together with a uniform
//! fibration structure on the pullback `x*a`. Lifting problems of `x*a` are
//! pairs `(b, w)` of a map `b : [n+1] -> [c]` and a problem `w` of `a` over
//! `X(b)x`, and a filler of `x*a` is a filler of `a`; so a structure is a
//! uniform table `(b, w) ↦ E(n+1)`. Restriction along `u : [c'] -> [c]`
//! precomposes `b` with `u`.

use std::collections::HashMap;

use serde_json::json;

use super::generators::Mode;
use super::structure::{FibrationStructure, Problems};
use crate::cofib::{is_trivial_fibration, tfib_classifier, CofibrationClass, TfibClassifier};
use crate::error::{Error, Result};
use crate::presheaf::{maps_over, pullback, search_over, NatTrans, Presheaf, Psh};
use crate::report::CheckReport;
use crate::search::{Budget, NatSearch};

/// Which structures a classifying type classifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassifierKind {
    Tfib,
    Fib(Mode),
}

impl ClassifierKind {
    pub fn name(self) -> String {
        match self {
            ClassifierKind::Tfib => "tfib".into(),
            ClassifierKind::Fib(m) => format!("fib-{}", m.name()),
        }
    }
}

/// `Fib(a)` for one mode.
#[derive(Clone, Debug)]
pub struct FibClassifier {
    pub a: NatTrans,
    pub problems: Problems,
    pub obj: Psh,
    pub to_base: NatTrans,
    /// Per object `c` and point `x`, the problems `(b, w)` of `x*a` at each level.
    keys: Vec<Vec<Vec<Vec<(u32, u32)>>>>,
    /// Per object, the cells as `(x, table per level)`.
    cells: Vec<Vec<(u32, Vec<Vec<u32>>)>>,
}

fn fib_classifier(a: &NatTrans, class: &CofibrationClass, mode: Mode, budget: &mut Budget) -> Result<FibClassifier> {
    let pr = Problems::new(a, class, mode, budget)?;
    let x = a.tgt();
    let site = x.site().clone();
    let no = site.num_objects();
    let levels = pr.sub.num_objects();
    let fillers: Vec<Vec<Vec<u32>>> =
        (0..levels as u32).map(|n| (0..pr.obj.size(n) as u32).map(|w| pr.fillers(n, w)).collect()).collect();

    let mut keys = Vec::with_capacity(no);
    let mut cells = Vec::with_capacity(no);
    for c in 0..no as u32 {
        let mut keys_c = Vec::new();
        let mut here = Vec::new();
        for xc in 0..x.size(c) as u32 {
            let k: Vec<Vec<(u32, u32)>> = (0..levels as u32)
                .map(|n| {
                    let mut l = Vec::new();
                    for (bp, &b) in site.hom(n + 1, c).iter().enumerate() {
                        let base = x.apply(b, xc);
                        for w in 0..pr.obj.size(n) as u32 {
                            if pr.cell(n, w).base == base {
                                l.push((bp as u32, w));
                            }
                        }
                    }
                    l
                })
                .collect();
            let index: Vec<HashMap<(u32, u32), u32>> =
                k.iter().map(|l| l.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect()).collect();
            let mut act = Vec::with_capacity(pr.sub.num_morphisms());
            for v in 0..pr.sub.num_morphisms() as u32 {
                let (m, n) = (pr.sub.dom(v), pr.sub.cod(v));
                let us = pr.successor(v);
                let t = k[n as usize]
                    .iter()
                    .map(|&(bp, w)| {
                        let b = site.compose(site.hom(n + 1, c)[bp as usize], us);
                        let key = (site.pos_in_hom(b) as u32, pr.obj.apply(v, w));
                        index[m as usize][&key]
                    })
                    .collect();
                act.push(t);
            }
            let q = Presheaf::from_parts(pr.sub.clone(), k.iter().map(|l| l.len()).collect(), act, x.validity(), x.intrinsic_only())
                .into_psh();
            let mut s = NatSearch::new(&q, &pr.shifted)?;
            for (n, l) in k.iter().enumerate() {
                for (i, &(_, w)) in l.iter().enumerate() {
                    s.restrict(n as u32, i as u32, fillers[n][w as usize].iter().copied());
                }
            }
            let mut tables = s.all(budget)?;
            tables.sort();
            here.extend(tables.into_iter().map(|t| (xc, t)));
            keys_c.push(k);
        }
        keys.push(keys_c);
        cells.push(here);
    }

    let index: Vec<HashMap<&(u32, Vec<Vec<u32>>), u32>> =
        cells.iter().map(|l| l.iter().enumerate().map(|(i, k)| (k, i as u32)).collect()).collect();
    let lookup: Vec<Vec<Vec<HashMap<(u32, u32), u32>>>> = keys
        .iter()
        .map(|kc| kc.iter().map(|k| k.iter().map(|l| l.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect()).collect()).collect())
        .collect();
    let mut act = Vec::with_capacity(site.num_morphisms());
    for u in 0..site.num_morphisms() as u32 {
        let (cp, c) = (site.dom(u), site.cod(u));
        let mut t = Vec::with_capacity(cells[c as usize].len());
        for (xc, table) in &cells[c as usize] {
            let xp = x.apply(u, *xc);
            let nt: Vec<Vec<u32>> = keys[cp as usize][xp as usize]
                .iter()
                .enumerate()
                .map(|(n, l)| {
                    l.iter()
                        .map(|&(bp, w)| {
                            let b = site.compose(u, site.hom(n as u32 + 1, cp)[bp as usize]);
                            let i = lookup[c as usize][*xc as usize][n][&(site.pos_in_hom(b) as u32, w)];
                            table[n][i as usize]
                        })
                        .collect()
                })
                .collect();
            let key = (xp, nt);
            t.push(*index[cp as usize].get(&key).ok_or_else(|| Error::Malformed("restriction left Fib".into()))?);
        }
        act.push(t);
    }
    let sizes = cells.iter().map(|l| l.len()).collect();
    let obj = Presheaf::from_parts(site.clone(), sizes, act, a.src().validity().min(x.validity()), x.intrinsic_only()).into_psh();
    let to_base = NatTrans::from_parts(obj.clone(), x.clone(), cells.iter().map(|l| l.iter().map(|k| k.0).collect()).collect());
    Ok(FibClassifier { a: a.clone(), problems: pr, obj, to_base, keys, cells })
}

impl FibClassifier {
    /// The structure on `a` encoded by a section `σ : X -> Fib(a)`: the filler
    /// of problem `w` is read off `σ(base w)` at `(id, w)`.
    pub fn structure_of_section(&self, sigma: &NatTrans) -> FibrationStructure {
        let pr = &self.problems;
        let site = self.obj.site();
        let fillers = (0..pr.sub.num_objects() as u32)
            .map(|n| {
                let c = n + 1;
                let idp = site.pos_in_hom(site.id(c)) as u32;
                (0..pr.obj.size(n) as u32)
                    .map(|w| {
                        let xc = pr.cell(n, w).base;
                        let (_, table) = &self.cells[c as usize][sigma.apply(c, xc) as usize];
                        let l = &self.keys[c as usize][xc as usize][n as usize];
                        let i = l.iter().position(|&k| k == (idp, w)).expect("every problem sits over its base");
                        table[n as usize][i]
                    })
                    .collect()
            })
            .collect();
        FibrationStructure { mode: pr.mode, fillers }
    }

    /// Structures on `a`, counted by direct search.
    pub fn count_structures(&self, budget: &mut Budget) -> Result<u64> {
        let pr = &self.problems;
        let mut s = NatSearch::new(&pr.obj, &pr.shifted)?;
        for n in 0..pr.sub.num_objects() as u32 {
            for w in 0..pr.obj.size(n) as u32 {
                s.restrict(n, w, pr.fillers(n, w));
            }
        }
        s.count(budget)
    }
}

#[derive(Clone, Debug)]
enum Inner {
    Tfib(Box<TfibClassifier>),
    Fib(Box<FibClassifier>),
}

/// A classifying type `C(a) -> X` whose sections are structures on `a`.
#[derive(Clone, Debug)]
pub struct ClassifyingType {
    pub kind: ClassifierKind,
    pub class: CofibrationClass,
    pub obj: Psh,
    pub to_base: NatTrans,
    inner: Inner,
}

pub fn classifying_type(
    a: &NatTrans,
    class: &CofibrationClass,
    kind: ClassifierKind,
    budget: &mut Budget,
) -> Result<ClassifyingType> {
    let inner = match kind {
        ClassifierKind::Tfib => Inner::Tfib(Box::new(tfib_classifier(a, class, budget)?)),
        ClassifierKind::Fib(mode) => Inner::Fib(Box::new(fib_classifier(a, class, mode, budget)?)),
    };
    let (obj, to_base) = match &inner {
        Inner::Tfib(t) => (t.obj.clone(), t.to_base.clone()),
        Inner::Fib(f) => (f.obj.clone(), f.to_base.clone()),
    };
    Ok(ClassifyingType { kind, class: class.clone(), obj, to_base, inner })
}

impl ClassifyingType {
    pub fn map(&self) -> &NatTrans {
        match &self.inner {
            Inner::Tfib(t) => &t.a,
            Inner::Fib(f) => &f.a,
        }
    }

    pub fn sections(&self, budget: &mut Budget) -> Result<Vec<NatTrans>> {
        maps_over(&NatTrans::identity(self.to_base.tgt()), &self.to_base, budget)
    }

    /// Enumerates sections and, independently, structures; requires equal
    /// counts and that every section decodes to a valid structure.
    pub fn audit_sections(&self, budget: &mut Budget) -> Result<CheckReport> {
        let mut r = CheckReport::new("classifier-sections").param("kind", self.kind.name());
        if let Some(bad) = self.obj.audit() {
            r.fail("the classifying type is not a presheaf", json!({"g": bad.g, "f": bad.f, "cell": bad.cell}));
            return Ok(r);
        }
        let secs = self.sections(budget)?;
        let direct = match &self.inner {
            Inner::Tfib(t) => t.count_algebras(budget)?,
            Inner::Fib(f) => f.count_structures(budget)?,
        };
        r.count("sections", secs.len() as u64);
        r.count("structures", direct);
        r.require(secs.len() as u64 == direct, "sections and structures differ in number", || {
            json!({"sections": secs.len(), "structures": direct})
        });
        let mut decoded = Vec::with_capacity(secs.len());
        for sigma in &secs {
            let v = match &self.inner {
                Inner::Tfib(t) => {
                    let alpha = t.algebra_of_section(sigma);
                    decoded.push(alpha.components().to_vec());
                    crate::cofib::tfib::verify_algebra(&t.plus, &alpha)
                }
                Inner::Fib(f) => {
                    let j = f.structure_of_section(sigma);
                    decoded.push(j.fillers.clone());
                    j.verify(&f.problems)
                }
            };
            if !v.passed() {
                r.push(v);
                return Ok(r);
            }
        }
        decoded.sort();
        decoded.dedup();
        r.require(decoded.len() == secs.len(), "two sections decode to the same structure", || json!(null));
        Ok(r)
    }

    /// `C(f*a) ≅ f*C(a)` over `Y`, found by searching for an isomorphism over `Y`.
    pub fn audit_pullback(&self, f: &NatTrans, budget: &mut Budget) -> Result<CheckReport> {
        let mut r = CheckReport::new("classifier-pullback").param("kind", self.kind.name());
        let a = self.map();
        let pa = pullback(f, a)?;
        let fa = pa.proj[0].clone();
        let lhs = classifying_type(&fa, &self.class, self.kind, budget)?;
        let pc = pullback(f, &self.to_base)?;
        let rhs_to_base = pc.proj[0].clone();
        r.count("lhs_cells", lhs.obj.total_cells() as u64);
        r.count("rhs_cells", pc.obj.total_cells() as u64);
        if lhs.obj.sizes() != pc.obj.sizes() {
            r.fail("sizes differ", json!({"classifier_of_pullback": lhs.obj.sizes(), "pullback_of_classifier": pc.obj.sizes()}));
            return Ok(r);
        }
        let found = search_over(&lhs.to_base, &rhs_to_base)?.injective().first(budget)?;
        r.require(found.is_some(), "no isomorphism over the base", || json!(null));
        Ok(r)
    }

    /// Whether the projection `C(a) ×_X C(a) -> C(a)` is a trivial fibration.
    pub fn weak_proposition(&self, budget: &mut Budget) -> Result<CheckReport> {
        let mut r = CheckReport::new("weak-proposition").param("kind", self.kind.name());
        let sq = pullback(&self.to_base, &self.to_base)?;
        let ok = is_trivial_fibration(&sq.proj[0], &self.class, budget)?;
        r.count("square_cells", sq.obj.total_cells() as u64);
        r.require(ok, "the projection from the fibered square is not a trivial fibration", || json!(null));
        Ok(r)
    }
}
