//! Classes of cofibrations and the axiom checker.

use std::collections::HashSet;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fincat::Site;
use crate::interval::{pathobject_map, pathobject_shift, IntervalKit};
use crate::presheaf::{
    coproduct, enumerate_nat_trans, initial, subobjects, yoneda, NatTrans, Omega, Psh, Subobject,
};
use crate::report::CheckReport;
use crate::search::{Budget, NatSearch};

#[derive(Clone, Debug)]
enum Rule {
    AllMonos,
    IsosOnly,
    /// Monos whose characteristic map lands in a given subobject of `Ω`.
    Classified(Subobject),
    /// All monos except one fixed subobject of one fixed presheaf.
    Excluding(Subobject),
}

/// A class of monomorphisms, decided on images.
#[derive(Clone, Debug)]
pub struct CofibrationClass {
    name: String,
    site: Site,
    omega: Arc<Omega>,
    rule: Rule,
    /// `allowed[c]` marks the sieves on `c` whose subobject of `y(c)` is a member.
    allowed: Vec<FixedBitSet>,
}

impl CofibrationClass {
    fn build(name: &str, site: &Site, omega: Arc<Omega>, rule: Rule) -> CofibrationClass {
        let mut cls = CofibrationClass { name: name.into(), site: site.clone(), omega, rule, allowed: Vec::new() };
        cls.allowed = (0..site.num_objects() as u32)
            .map(|c| {
                let yc = yoneda(site, c).into_psh();
                let n = cls.omega.obj.size(c);
                let mut b = FixedBitSet::with_capacity(n);
                for s in 0..n as u32 {
                    if cls.admits(&cls.omega.as_subobject(&yc, c, s)) {
                        b.insert(s as usize);
                    }
                }
                b
            })
            .collect();
        cls
    }

    /// Every monomorphism; classified by all of `Ω`.
    pub fn all_monos(site: &Site) -> CofibrationClass {
        CofibrationClass::build("all-monos", site, Arc::new(Omega::new(site)), Rule::AllMonos)
    }

    /// Only isomorphisms; classified by the top sieves.
    pub fn isos_only(site: &Site) -> CofibrationClass {
        CofibrationClass::build("isos-only", site, Arc::new(Omega::new(site)), Rule::IsosOnly)
    }

    /// The monos classified by `phi ⊆ Ω`, which must contain `true`.
    pub fn from_phi(omega: Arc<Omega>, phi: Subobject) -> Result<CofibrationClass> {
        if !phi.ambient().same_as(&omega.obj) {
            return Err(Error::Input("Φ must be a subobject of Ω".into()));
        }
        let site = omega.obj.site().clone();
        if (0..site.num_objects() as u32).any(|c| !phi.contains(c, omega.top(c))) {
            return Err(Error::Input("Φ must contain true".into()));
        }
        Ok(CofibrationClass::build("classified", &site, omega, Rule::Classified(phi)))
    }

    /// All monos except the diagonal of the given interval kit.
    pub fn excluding_diagonal(kit: &IntervalKit) -> CofibrationClass {
        let diag = Subobject::image(&kit.diagonal);
        CofibrationClass::build("excluding-diagonal", &kit.site, Arc::new(Omega::new(&kit.site)), Rule::Excluding(diag))
    }

    pub fn by_name(site: &Site, name: &str) -> Result<CofibrationClass> {
        match name {
            "all-monos" => Ok(CofibrationClass::all_monos(site)),
            "isos-only" => Ok(CofibrationClass::isos_only(site)),
            "excluding-diagonal" => Ok(CofibrationClass::excluding_diagonal(&IntervalKit::new(site)?)),
            other => Err(Error::Input(format!("unknown cofibration class `{other}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn site(&self) -> &Site {
        &self.site
    }

    pub fn omega(&self) -> &Arc<Omega> {
        &self.omega
    }

    /// Whether sieve `s` on `c` is a member, as a subobject of `y(c)`.
    pub fn allows(&self, c: u32, s: u32) -> bool {
        self.allowed[c as usize].contains(s as usize)
    }

    pub fn allowed_sieves(&self, c: u32) -> Vec<u32> {
        self.allowed[c as usize].ones().map(|s| s as u32).collect()
    }

    /// `Φ ⊆ Ω`: the sieves whose subobjects are members.
    pub fn phi(&self) -> Subobject {
        Subobject::from_bits(&self.omega.obj, self.allowed.clone())
    }

    /// Whether the inclusion of `s` is a member.
    pub fn admits(&self, s: &Subobject) -> bool {
        match &self.rule {
            Rule::AllMonos => true,
            Rule::IsosOnly => s.is_full(),
            Rule::Classified(phi) => {
                let chi = self.omega.chi(s);
                (0..self.site.num_objects() as u32).all(|c| chi.component(c).iter().all(|&v| phi.contains(c, v)))
            }
            Rule::Excluding(d) => d != s,
        }
    }

    /// Whether `m` is a member.
    pub fn contains(&self, m: &NatTrans) -> bool {
        m.is_mono() && self.admits(&Subobject::image(m))
    }

    /// Membership judged only at levels `≤ k`: `m` is mono there and its
    /// image, with sieves cut down to maps between those levels, agrees with
    /// a member.
    pub fn contains_up_to(&self, m: &NatTrans, k: usize) -> bool {
        if k >= self.site.depth() {
            return self.contains(m);
        }
        let site = &self.site;
        let low: Vec<u32> = site.objects_up_to_level(k);
        let injective = low.iter().all(|&c| {
            let mut seen = HashSet::new();
            m.component(c).iter().all(|v| seen.insert(*v))
        });
        if !injective {
            return false;
        }
        let image = Subobject::image(m);
        let x = m.tgt();
        let cut = |c: u32, bits: &dyn Fn(usize) -> bool| -> Vec<bool> {
            site.incoming(c).iter().enumerate().filter(|(_, &f)| site.level(site.dom(f)) <= k).map(|(i, _)| bits(i)).collect()
        };
        low.iter().all(|&c| {
            let allowed: HashSet<Vec<bool>> =
                self.allowed[c as usize].ones().map(|s| cut(c, &|i| self.omega.sieve(c, s as u32).contains(i))).collect();
            (0..x.size(c) as u32).all(|e| {
                let into = site.incoming(c);
                let chi = cut(c, &|i| image.contains(site.dom(into[i]), x.apply(into[i], e)));
                allowed.contains(&chi)
            })
        })
    }
}

/// A named catalog object.
struct Entry {
    name: &'static str,
    obj: Psh,
}

fn catalog(kit: &IntervalKit) -> Vec<Entry> {
    let one = kit.one.clone();
    vec![
        Entry { name: "0", obj: initial(&kit.site).into_psh() },
        Entry { name: "1", obj: one.clone() },
        Entry { name: "1+1", obj: kit.two.obj.clone() },
        Entry { name: "I", obj: kit.i.clone() },
        Entry { name: "1+I", obj: coproduct(&one, &kit.i).obj },
        Entry { name: "IxI", obj: kit.square.obj.clone() },
    ]
}

fn sub_json(name: &str, s: &Subobject) -> Value {
    let cells: Vec<Vec<u32>> = (0..s.bits().len() as u32).map(|c| s.cells(c)).collect();
    json!({"object": name, "cells": cells})
}

/// The inclusion `S -> T` of nested subobjects.
fn nested_inclusion(s: &Subobject, t: &Subobject) -> NatTrans {
    let (sp, _) = s.to_presheaf();
    let (tp, _) = t.to_presheaf();
    let comp = (0..s.bits().len() as u32)
        .map(|c| {
            let tc = t.cells(c);
            s.cells(c).iter().map(|x| tc.binary_search(x).expect("nested") as u32).collect()
        })
        .collect();
    NatTrans::from_parts(sp, tp, comp)
}

/// Checks A0–A7 on a fixed catalog of small objects built from the interval:
/// `0, 1, 1+1, I, 1+I, I×I`, with every subobject and every map between them.
pub fn check_axioms(class: &CofibrationClass, kit: &IntervalKit, budget: &mut Budget) -> Result<CheckReport> {
    if !class.site.same_as(&kit.site) {
        return Err(Error::SiteMismatch);
    }
    let mut r = CheckReport::new("axioms").param("class", class.name()).param("N", kit.site.depth());
    let cat = catalog(kit);
    let used = budget.used();
    let mut subs: Vec<Vec<Subobject>> = Vec::new();
    for e in &cat {
        subs.push(subobjects(&e.obj, &class.omega, budget)?);
    }
    let members: Vec<Vec<&Subobject>> = subs.iter().map(|l| l.iter().filter(|s| class.admits(s)).collect()).collect();
    let mut maps: Vec<(usize, usize, NatTrans)> = Vec::new();
    for (i, a) in cat.iter().enumerate() {
        for (j, b) in cat.iter().enumerate() {
            for m in enumerate_nat_trans(&a.obj, &b.obj, budget)? {
                maps.push((i, j, m));
            }
        }
    }
    r.count("objects", cat.len() as u64);
    r.count("subobjects", subs.iter().map(|l| l.len() as u64).sum());
    r.count("maps", maps.len() as u64);

    let mut a0 = CheckReport::new("A0");
    let mut a1 = CheckReport::new("A1");
    for (i, j, m) in &maps {
        if class.contains(m) {
            a0.require(m.is_mono(), "a member is not mono", || json!({"from": cat[*i].name, "to": cat[*j].name}));
        }
        if m.is_iso() {
            a1.require(class.contains(m), "an isomorphism is not a member", || {
                json!({"from": cat[*i].name, "to": cat[*j].name, "components": m.components()})
            });
        }
    }

    let mut a2 = CheckReport::new("A2");
    let mut a4 = CheckReport::new("A4");
    for (k, l) in members.iter().enumerate() {
        let name = cat[k].name;
        for s in l {
            for t in l {
                budget.tick("axioms")?;
                if s.le(t) && class.contains(&nested_inclusion(s, t)) {
                    a2.require(class.admits(s), "a composite of members is not a member", || {
                        json!({"inner": sub_json(name, s), "outer": sub_json(name, t)})
                    });
                }
                let j = s.union(t)?;
                a4.require(class.admits(&j), "a join of members is not a member", || {
                    json!({"left": sub_json(name, s), "right": sub_json(name, t)})
                });
            }
        }
    }

    let mut a3 = CheckReport::new("A3");
    for (i, j, m) in &maps {
        for s in &members[*j] {
            budget.tick("axioms")?;
            let p = Subobject::preimage(m, s);
            a3.require(class.admits(&p), "a pullback of a member is not a member", || {
                json!({"map": {"from": cat[*i].name, "to": cat[*j].name, "components": m.components()}, "member": sub_json(cat[*j].name, s)})
            });
        }
    }

    let mut a5 = CheckReport::new("A5");
    a5.require(class.contains(&kit.diagonal), "the diagonal I -> I×I is not a member", || {
        json!({"map": "diagonal", "components": kit.diagonal.components()})
    });

    let mut a6 = CheckReport::new("A6");
    let k = kit.site.depth() - 1;
    a6.validity = Some(k);
    for (e, l) in cat.iter().zip(&members) {
        if e.obj.validity() == 0 {
            continue;
        }
        let sx = pathobject_shift(&e.obj)?;
        for s in l {
            let (sp, inc) = s.to_presheaf();
            let ss = pathobject_shift(&sp)?;
            let shifted = pathobject_map(&ss, &sx, &inc)?;
            a6.require(class.contains_up_to(&shifted, k), "the path object of a member is not a member", || {
                json!({"member": sub_json(e.name, s), "levels": k})
            });
        }
    }

    let mut a7 = CheckReport::new("A7");
    let (phi, _) = class.phi().to_presheaf();
    let top_in_phi: Vec<u32> = (0..kit.site.num_objects() as u32)
        .map(|c| class.phi().cells(c).binary_search(&class.omega.top(c)).expect("true ∈ Φ") as u32)
        .collect();
    for (e, l) in cat.iter().zip(&subs) {
        for s in l {
            let mut search = NatSearch::new(&e.obj, &phi)?;
            for c in 0..kit.site.num_objects() as u32 {
                let t = top_in_phi[c as usize];
                for x in 0..e.obj.size(c) as u32 {
                    if s.contains(c, x) {
                        search.fix(c, x, t);
                    } else {
                        search.retain(c, x, |v| v != t);
                    }
                }
            }
            let n = search.count(budget)?;
            let want = u64::from(class.admits(s));
            a7.require(n == want, "a subobject is not uniquely classified exactly when it is a member", || {
                json!({"subobject": sub_json(e.name, s), "classifiers": n, "member": want == 1})
            });
        }
    }
    for part in [a0, a1, a2, a3, a4, a5, a6, a7] {
        r.push(part);
    }
    r.count("nodes", budget.used() - used);
    if !r.passed() {
        let failed: Vec<&str> = r.parts.iter().filter(|p| !p.passed()).map(|p| p.check.as_str()).collect();
        r.witness = Some(json!({"failed": failed}));
    }
    r.caveat("The classifier property is checked on the truncated site only; no claim is made about a terminal object beyond it.");
    Ok(r)
}
