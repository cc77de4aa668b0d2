//! Trivial fibrations, decided three ways and cross-checked:
//! a relative `+`-algebra structure, lifting against every basic
//! cofibration, and a uniform filling structure.
//!
//! A commuting square from a basic cofibration `S ↣ y(c)` to `f : A -> X` is
//! by Yoneda a cell `(x, S, s)` of the relative plus `A′`, so squares are
//! indexed by the cells of `A′`.

use std::collections::HashMap;

use serde_json::{json, Value};

use super::class::CofibrationClass;
use super::lifting::{solve_lifting, Lifting, LiftingProblem};
use super::plus::{plus_over, Plus, PlusCell};
use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::presheaf::{yoneda, NatTrans};
use crate::report::CheckReport;
use crate::search::{Budget, NatSearch};

const UNSET: u32 = u32::MAX;

/// A chosen filler for every square from a basic cofibration, stored as a
/// table over the cells of `A′`.
#[derive(Clone, Debug)]
pub struct UniformFillingStructure {
    pub fillers: Vec<Vec<u32>>,
}

/// The outcome of [`trivial_fibration_structure`].
#[derive(Clone, Debug)]
pub struct TfibAnalysis {
    pub plus: Plus,
    /// A retraction `α : A′ -> A` of `η` over `X`.
    pub algebra: Option<NatTrans>,
    pub uniform: Option<UniformFillingStructure>,
    /// The first square without a filler, as `(object, cell of A′)`.
    pub refutation: Option<(u32, u32)>,
    pub report: CheckReport,
}

impl TfibAnalysis {
    /// `Some(true)` for a trivial fibration, `Some(false)` for a refuted one,
    /// `None` when the three descriptions disagree.
    pub fn verdict(&self) -> Option<bool> {
        match (self.algebra.is_some(), self.refutation.is_none(), self.uniform.is_some()) {
            (true, true, true) => Some(true),
            (false, false, false) => Some(false),
            _ => None,
        }
    }
}

/// Fillers of the square behind `w ∈ A′(c)`: cells `a ∈ A(c)` over the base
/// point that restrict to the section.
fn fillers_of(p: &Plus, c: u32, w: u32) -> Vec<u32> {
    let a = p.f.src();
    let site = a.site();
    let cell = p.cell(c, w);
    let into = site.incoming(c);
    (0..a.size(c) as u32)
        .filter(|&v| {
            p.f.apply(c, v) == cell.base
                && cell.section.iter().enumerate().all(|(i, &t)| t == UNSET || a.apply(into[i], v) == t)
        })
        .collect()
}

/// The basic cofibration `S ↣ y(c)` with its data maps, as a lifting problem
/// against `f`.
pub fn square_problem(p: &Plus, c: u32, w: u32) -> Result<LiftingProblem> {
    let a = p.f.src();
    let x = p.f.tgt();
    let site = a.site();
    let cell = p.cell(c, w);
    let yc = yoneda(site, c).into_psh();
    let (sp, inc) = p.omega().as_subobject(&yc, c, cell.sieve).to_presheaf();
    let no = site.num_objects() as u32;
    let top = (0..no)
        .map(|d| {
            inc.component(d)
                .iter()
                .map(|&hp| cell.section[site.pos_in_into(site.hom(d, c)[hp as usize])])
                .collect()
        })
        .collect();
    let top = NatTrans::new(sp, a.clone(), top)?;
    let bottom = (0..no).map(|d| site.hom(d, c).iter().map(|&h| x.apply(h, cell.base)).collect()).collect();
    let bottom = NatTrans::new(yc, x.clone(), bottom)?;
    LiftingProblem::new(inc, p.f.clone(), top, bottom)
}

fn square_json(p: &Plus, c: u32, w: u32) -> Value {
    let site = p.obj.site();
    let cell = p.cell(c, w);
    let members: Vec<&str> = p.omega().members(c, cell.sieve).iter().map(|&h| site.morphism(h).name.as_str()).collect();
    json!({
        "object": site.object_name(c),
        "sieve": members,
        "section": cell.section.iter().map(|&v| if v == UNSET { Value::Null } else { json!(v) }).collect::<Vec<_>>(),
        "base": cell.base,
    })
}

impl UniformFillingStructure {
    /// Checks every stored filler and the equation `j(u*w) = A(u) j(w)` for
    /// every morphism `u` and every square `w`.
    pub fn verify(&self, p: &Plus) -> CheckReport {
        let mut r = CheckReport::new("uniform-filling");
        let a = p.f.src();
        let site = a.site();
        for c in 0..site.num_objects() as u32 {
            for w in 0..p.obj.size(c) as u32 {
                let j = self.fillers[c as usize][w as usize];
                if !fillers_of(p, c, w).contains(&j) {
                    r.fail("a stored value is not a filler", json!({"square": square_json(p, c, w), "value": j}));
                    return r;
                }
            }
        }
        for u in 0..site.num_morphisms() as u32 {
            let (cp, c) = (site.dom(u), site.cod(u));
            for w in 0..p.obj.size(c) as u32 {
                let lhs = self.fillers[cp as usize][p.obj.apply(u, w) as usize];
                let rhs = a.apply(u, self.fillers[c as usize][w as usize]);
                if lhs != rhs {
                    r.fail(
                        "uniformity fails",
                        json!({"morphism": site.morphism(u).name, "square": square_json(p, c, w), "lhs": lhs, "rhs": rhs}),
                    );
                    return r;
                }
            }
        }
        r.count("squares", p.obj.total_cells() as u64);
        r
    }

    pub fn as_map(&self, p: &Plus) -> NatTrans {
        NatTrans::from_parts(p.obj.clone(), p.f.src().clone(), self.fillers.clone())
    }
}

/// Checks that `alpha` is a retraction of `η` over the base.
pub fn verify_algebra(p: &Plus, alpha: &NatTrans) -> CheckReport {
    let mut r = CheckReport::new("algebra");
    if let Some(w) = alpha.naturality_failure() {
        r.fail("α is not natural", json!({"morphism": w.morphism, "cell": w.cell}));
        return r;
    }
    match p.eta.then(alpha) {
        Ok(e) => r.require(e.same_as(&NatTrans::identity(p.f.src())), "α ∘ η ≠ id", || json!(e.components())),
        Err(e) => r.fail(e.to_string(), json!(null)),
    }
    match alpha.then(&p.f) {
        Ok(e) => r.require(e.components() == p.proj.components(), "α does not lie over the base", || json!(null)),
        Err(e) => r.fail(e.to_string(), json!(null)),
    }
    r
}

/// `α ↦ j`: `j(c, x, y) = α ∘ χ(c, x, y)`, evaluated at the generic cell.
pub fn algebra_to_filling(p: &Plus, alpha: &NatTrans) -> Result<UniformFillingStructure> {
    let site = p.obj.site();
    let mut fillers = Vec::with_capacity(site.num_objects());
    for c in 0..site.num_objects() as u32 {
        let id_cell = site.pos_in_hom(site.id(c)) as u32;
        let mut t = Vec::with_capacity(p.obj.size(c));
        for w in 0..p.obj.size(c) as u32 {
            let sq = square_problem(p, c, w)?;
            let chi = p.classify(&sq.left, &sq.top, &sq.bottom)?;
            t.push(alpha.apply(c, chi.apply(c, id_cell)));
        }
        fillers.push(t);
    }
    Ok(UniformFillingStructure { fillers })
}

/// `j ↦ α`: `α(w) = j(w*η, w′)`, where the square is the pullback of `η`
/// along the Yoneda map of `w`.
pub fn filling_to_algebra(p: &Plus, j: &UniformFillingStructure) -> Result<NatTrans> {
    let site = p.obj.site();
    let mut inverse_eta: Vec<HashMap<u32, u32>> = Vec::new();
    for c in 0..site.num_objects() as u32 {
        inverse_eta.push(p.eta.component(c).iter().enumerate().map(|(i, &v)| (v, i as u32)).collect());
    }
    let mut comp = Vec::with_capacity(site.num_objects());
    for c in 0..site.num_objects() as u32 {
        let into = site.incoming(c);
        let mut t = Vec::with_capacity(p.obj.size(c));
        for w in 0..p.obj.size(c) as u32 {
            let mut bits = fixedbitset::FixedBitSet::with_capacity(into.len());
            let mut section = vec![UNSET; into.len()];
            for (i, &h) in into.iter().enumerate() {
                let d = site.dom(h);
                if let Some(&pre) = inverse_eta[d as usize].get(&p.obj.apply(h, w)) {
                    bits.insert(i);
                    section[i] = pre;
                }
            }
            let sieve = p.omega().index_of(c, &bits).ok_or_else(|| Error::Malformed("pullback of η is not a sieve".into()))?;
            let key = PlusCell { base: p.proj.apply(c, w), sieve, section };
            let sq = p.cell_of(c, &key).ok_or_else(|| Error::Malformed("pulled-back square is not a basic square".into()))?;
            t.push(j.fillers[c as usize][sq as usize]);
        }
        comp.push(t);
    }
    NatTrans::new(p.obj.clone(), p.f.src().clone(), comp)
}

/// Decides whether `f` is a trivial fibration for `class` three ways and
/// cross-checks them, including both translations between algebra
/// structures and uniform filling structures.
pub fn trivial_fibration_structure(f: &NatTrans, class: &CofibrationClass, budget: &mut Budget) -> Result<TfibAnalysis> {
    let mut r = CheckReport::new("tfib").param("class", class.name());
    let used = budget.used();
    let p = plus_over(f, class, budget)?;
    let a = f.src();
    let site = a.site().clone();
    let no = site.num_objects() as u32;
    r.count("plus_cells", p.obj.total_cells() as u64);

    // (1) A retraction of η over the base.
    let mut s1 = NatSearch::new(&p.obj, a)?;
    for c in 0..no {
        for w in 0..p.obj.size(c) as u32 {
            let over = p.proj.apply(c, w);
            s1.retain(c, w, |v| f.apply(c, v) == over);
        }
        for e in 0..a.size(c) as u32 {
            s1.fix(c, p.eta.apply(c, e), e);
        }
    }
    let algebra = s1.first(budget)?.map(|comp| NatTrans::from_parts(p.obj.clone(), a.clone(), comp));
    let mut part1 = CheckReport::new("algebra");
    match &algebra {
        Some(alpha) => part1.push(verify_algebra(&p, alpha)),
        None => part1.detail("no retraction of η over the base"),
    }

    // (2) Lifting against every basic cofibration.
    let mut part2 = CheckReport::new("lifting");
    let mut candidates: Vec<Vec<Vec<u32>>> = Vec::with_capacity(no as usize);
    let mut refutation = None;
    for c in 0..no {
        let mut here = Vec::with_capacity(p.obj.size(c));
        for w in 0..p.obj.size(c) as u32 {
            budget.tick("lifting squares")?;
            let fill = fillers_of(&p, c, w);
            if fill.is_empty() && refutation.is_none() {
                refutation = Some((c, w));
            }
            here.push(fill);
        }
        candidates.push(here);
    }
    part2.count("squares", p.obj.total_cells() as u64);
    if let Some((c, w)) = refutation {
        // Confirm with the generic solver on the explicit square.
        let sq = square_problem(&p, c, w)?;
        let confirmed = matches!(solve_lifting(&sq, budget)?, Lifting::Refuted);
        part2.detail("a basic square has no filler");
        part2.witness = Some(json!({"square": square_json(&p, c, w), "maps": sq.witness(), "solver_agrees": confirmed}));
        if !confirmed {
            part2.fail("the generic solver found a filler the scan missed", json!(null));
        }
    }

    // (3) A uniform choice of fillers.
    let mut s3 = NatSearch::new(&p.obj, a)?;
    for c in 0..no {
        for w in 0..p.obj.size(c) as u32 {
            s3.restrict(c, w, candidates[c as usize][w as usize].iter().copied());
        }
    }
    let uniform = s3.first(budget)?.map(|fillers| UniformFillingStructure { fillers });
    let mut part3 = CheckReport::new("uniform");
    match &uniform {
        Some(j) => part3.push(j.verify(&p)),
        None => part3.detail("no uniform choice of fillers"),
    }

    // Translations between (1) and (3).
    let mut part4 = CheckReport::new("translations");
    if let Some(alpha) = &algebra {
        let j = algebra_to_filling(&p, alpha)?;
        let mut v = j.verify(&p);
        v.check = "algebra-to-filling".into();
        part4.push(v);
    }
    if let Some(j) = &uniform {
        match filling_to_algebra(&p, j) {
            Ok(alpha) => {
                let mut v = verify_algebra(&p, &alpha);
                v.check = "filling-to-algebra".into();
                part4.push(v);
            }
            Err(e) => part4.fail(format!("filling-to-algebra: {e}"), json!(null)),
        }
    }

    let found = [algebra.is_some(), refutation.is_none(), uniform.is_some()];
    r.set_param("found", json!({"algebra": found[0], "lifting": found[1], "uniform": found[2]}));
    for part in [part1, part2.clone(), part3, part4] {
        r.push(part);
    }
    let analysis_verdict = match found {
        [true, true, true] => Some(true),
        [false, false, false] => Some(false),
        _ => None,
    };
    match analysis_verdict {
        Some(true) => {
            let alpha = algebra.as_ref().expect("found");
            let cert = Certificate::filler(&p.eta, f, &NatTrans::identity(a), &p.proj, alpha);
            r.certificate = Some(cert.to_json());
        }
        Some(false) => {
            r.fail("not a trivial fibration", part2.witness.clone().unwrap_or(Value::Null));
        }
        None => r.fail("the three characterizations disagree", json!({"found": found})),
    }
    r.count("nodes", budget.used() - used);
    Ok(TfibAnalysis { plus: p, algebra, uniform, refutation, report: r })
}

/// The factorization `A -> A′ -> X` of `f` through the relative plus.
#[derive(Clone, Debug)]
pub struct CofTfibFactorization {
    pub plus: Plus,
    pub left: NatTrans,
    pub right: NatTrans,
}

/// Factors `f` as a cofibration followed by a trivial fibration and
/// certifies both halves. When `f` is already a trivial fibration the
/// report also exhibits it as a retract of the right factor.
pub fn factor_cof_tfib(
    f: &NatTrans,
    class: &CofibrationClass,
    budget: &mut Budget,
) -> Result<(CofTfibFactorization, CheckReport)> {
    let mut r = CheckReport::new("factor-cof-tfib").param("class", class.name());
    let p = plus_over(f, class, budget)?;
    let composite = p.eta.then(&p.proj)?;
    r.require(composite.same_as(f), "the factors do not compose to f", || json!(null));
    r.require(class.contains(&p.eta), "the left factor is not a cofibration", || json!(null));
    r.require(p.obj.audit().is_none(), "the middle object is not functorial", || json!(null));
    let right = trivial_fibration_structure(&p.proj, class, budget)?;
    let mut rp = right.report.clone();
    rp.check = "right-factor".into();
    rp.certificate = None;
    r.push(rp);
    if let Some(cert) = right.report.certificate {
        r.certificate = Some(cert);
    }
    let own = trivial_fibration_structure(f, class, budget)?;
    if let Some(alpha) = &own.algebra {
        let mut retract = CheckReport::new("retract");
        let back = p.eta.then(alpha)?;
        retract.require(back.same_as(&NatTrans::identity(f.src())), "α ∘ η ≠ id", || json!(null));
        retract.require(alpha.then(f)?.components() == p.proj.components(), "α is not over the base", || json!(null));
        retract.detail("f is a retract of its right factor over the base");
        r.push(retract);
    }
    let fac = CofTfibFactorization { left: p.eta.clone(), right: p.proj.clone(), plus: p };
    Ok((fac, r))
}

/// A section of `f`, if any.
pub fn find_section(f: &NatTrans, budget: &mut Budget) -> Result<Option<NatTrans>> {
    let x = f.tgt();
    let a = f.src();
    let mut s = NatSearch::new(x, a)?;
    for c in 0..x.site().num_objects() as u32 {
        for e in 0..x.size(c) as u32 {
            s.retain(c, e, |v| f.apply(c, v) == e);
        }
    }
    Ok(s.first(budget)?.map(|comp| NatTrans::from_parts(x.clone(), a.clone(), comp)))
}

/// Convenience: whether `f` is a trivial fibration, with disagreement
/// reported as an error.
pub fn is_trivial_fibration(f: &NatTrans, class: &CofibrationClass, budget: &mut Budget) -> Result<bool> {
    let t = trivial_fibration_structure(f, class, budget)?;
    t.verdict().ok_or_else(|| Error::Malformed("trivial fibration characterizations disagree".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;
    use crate::presheaf::{coproduct, initial, terminal};

    #[test]
    fn identities_are_trivial_fibrations() {
        let s = build_site(1).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let i = yoneda(&s, 1).into_psh();
        let t = trivial_fibration_structure(&NatTrans::identity(&i), &class, &mut Budget::default()).unwrap();
        assert_eq!(t.verdict(), Some(true));
        assert!(t.report.passed(), "{:?}", t.report.details);
        let cert = Certificate::from_json(t.report.certificate.as_ref().unwrap()).unwrap();
        assert!(cert.verify().unwrap().passed());
    }

    #[test]
    fn omega_is_injective() {
        for n in 1..=2 {
            let s = build_site(n).unwrap();
            let class = CofibrationClass::all_monos(&s);
            let om = class.omega().obj.clone();
            let t = trivial_fibration_structure(&NatTrans::to_terminal(&om), &class, &mut Budget::default()).unwrap();
            assert_eq!(t.verdict(), Some(true), "N={n}: {:?}", t.report.details);
        }
    }

    #[test]
    fn two_points_are_not_injective() {
        let s = build_site(1).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let one = terminal(&s).into_psh();
        let two = coproduct(&one, &one).obj;
        let t = trivial_fibration_structure(&NatTrans::to_terminal(&two), &class, &mut Budget::default()).unwrap();
        assert_eq!(t.verdict(), Some(false));
        assert!(!t.report.passed());
        assert!(t.report.witness.is_some());
        let zero = initial(&s).into_psh();
        let t0 = trivial_fibration_structure(&NatTrans::to_terminal(&zero), &class, &mut Budget::default()).unwrap();
        assert_eq!(t0.verdict(), Some(false));
    }

    #[test]
    fn factorization_of_identity_on_terminal() {
        let s = build_site(1).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let one = terminal(&s).into_psh();
        let (fac, r) = factor_cof_tfib(&NatTrans::identity(&one), &class, &mut Budget::default()).unwrap();
        assert!(r.passed(), "{:?}", r.details);
        assert_eq!(fac.plus.obj.sizes(), &[2, 5]);
        assert!(r.parts.iter().any(|p| p.check == "retract"));
    }

    #[test]
    fn factorization_of_an_initial_map() {
        let s = build_site(1).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let i = yoneda(&s, 1).into_psh();
        let (fac, r) = factor_cof_tfib(&NatTrans::from_initial(&i), &class, &mut Budget::default()).unwrap();
        assert!(r.passed(), "{:?}", r.details);
        assert!(fac.left.src().is_empty());
    }
}
