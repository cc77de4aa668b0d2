//! Weak homotopy equivalences relative to an explicit family of fibrant
//! test objects: `f : X -> Y` is one when every `π₀(K^f)` is a bijection.

use serde_json::json;

use super::pi0::{pi0, pi0_map};
use crate::cofib::CofibrationClass;
use crate::error::{Error, Result};
use crate::fib::{fibration_structure, Mode, Route};
use crate::presheaf::{coproduct, exponential_on, terminal, NatTrans, Psh};
use crate::report::CheckReport;
use crate::search::Budget;

/// A test object with a display name.
#[derive(Clone, Debug)]
pub struct TestObject {
    pub name: String,
    pub obj: Psh,
}

impl TestObject {
    pub fn new(name: &str, obj: &Psh) -> TestObject {
        TestObject { name: name.into(), obj: obj.clone() }
    }
}

/// `1`, `1+1` and `Ω` on the site of `class`.
pub fn standard_family(class: &CofibrationClass) -> Vec<TestObject> {
    let one = terminal(class.site()).into_psh();
    let two = coproduct(&one, &one).obj;
    vec![TestObject::new("1", &one), TestObject::new("1+1", &two), TestObject::new("Ω", &class.omega().obj)]
}

/// Whether `K -> 1` passes the unbiased fibration check (route A).
pub fn certify_fibrant(k: &Psh, class: &CofibrationClass, budget: &mut Budget) -> Result<bool> {
    let a = fibration_structure(&NatTrans::to_terminal(k), class, Mode::Unbiased, Route::A, budget)?;
    Ok(a.verdict() == Some(true))
}

/// Checks `π₀(K^Y) -> π₀(K^X)` for every `K` in the family. Members that
/// are not certified fibrant fail the report instead of being skipped; a
/// member whose exponentials exceed the budget makes the verdict BUDGET.
pub fn weak_homotopy_equivalence(
    f: &NatTrans,
    family: &[TestObject],
    class: &CofibrationClass,
    budget: &mut Budget,
) -> Result<CheckReport> {
    let names: Vec<&str> = family.iter().map(|k| k.name.as_str()).collect();
    let mut r = CheckReport::new("whe").param("family", json!(names));
    r.detail(format!("weak homotopy equivalence relative to the family {{{}}}", names.join(", ")));
    let (x, y) = (f.src(), f.tgt());
    for k in family {
        let mut part = CheckReport::new("whe-member").param("k", k.name.as_str());
        if !certify_fibrant(&k.obj, class, budget)? {
            part.fail("not certified fibrant, so unusable as a test object", json!({"k": k.name}));
            r.push(part);
            continue;
        }
        let exps = exponential_on(&k.obj, y, &[0, 1], budget)
            .and_then(|ky| Ok((exponential_on(&k.obj, x, &[0, 1], budget)?, ky)));
        let (kx, ky) = match exps {
            Ok(e) => e,
            Err(e @ Error::Budget { .. }) => {
                part.budget(&e);
                r.push(part);
                continue;
            }
            Err(e) => return Err(e),
        };
        let kf = ky.pre(f, &kx)?;
        let (py, px) = (pi0(&ky.obj)?, pi0(&kx.obj)?);
        let m = pi0_map(&kf, &py, &px);
        let mut seen = vec![false; px.count];
        let mut injective = true;
        for &c in &m {
            injective &= !std::mem::replace(&mut seen[c as usize], true);
        }
        let surjective = seen.iter().all(|&s| s);
        part.count("pi0_of_k_to_the_codomain", py.count as u64);
        part.count("pi0_of_k_to_the_domain", px.count as u64);
        part.set_param("injective", injective);
        part.set_param("surjective", surjective);
        part.require(injective && surjective, "π₀(K^f) is not a bijection", || {
            json!({"k": k.name, "injective": injective, "surjective": surjective, "map": m})
        });
        r.push(part);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;
    use crate::fib::cellular_round;
    use crate::interval::IntervalKit;

    #[test]
    fn identity_and_collapse() {
        let s = build_site(2).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let kit = IntervalKit::new(&s).unwrap();
        let fam = standard_family(&class);
        let id = NatTrans::identity(&kit.i);
        assert!(weak_homotopy_equivalence(&id, &fam, &class, &mut Budget::default()).unwrap().passed());
        let two = &fam[1];
        let collapse = NatTrans::to_terminal(&kit.two.obj);
        let r = weak_homotopy_equivalence(&collapse, std::slice::from_ref(two), &class, &mut Budget::default()).unwrap();
        assert!(!r.passed());
        assert_eq!(r.parts[0].counters["pi0_of_k_to_the_codomain"], 2);
        assert_eq!(r.parts[0].counters["pi0_of_k_to_the_domain"], 4);
    }

    #[test]
    fn uncertified_members_fail() {
        let s = build_site(2).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let kit = IntervalKit::new(&s).unwrap();
        let fam = [TestObject::new("I", &kit.i)];
        let r = weak_homotopy_equivalence(&NatTrans::identity(&kit.one), &fam, &class, &mut Budget::default()).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn a_cellular_trivial_cofibration_is_a_whe() {
        let s = build_site(2).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let kit = IntervalKit::new(&s).unwrap();
        let fam = standard_family(&class);
        let r = weak_homotopy_equivalence(&kit.delta0, &fam, &class, &mut Budget::default()).unwrap();
        assert!(r.passed(), "{:#?}", r);
        // One attachment round on δ₀ gives a larger cellular map; `Ω^E` is
        // then beyond the default budget, the discrete members are not.
        let (i, _) = cellular_round(&kit.delta0, &class, &mut Budget::default()).unwrap();
        let r = weak_homotopy_equivalence(&i, &fam, &class, &mut Budget::new(2_000_000)).unwrap();
        assert!(r.parts[..2].iter().all(|p| p.passed()));
        assert_ne!(r.verdict, crate::report::Verdict::Fail);
    }
}
