//! Homotopy as an equivalence relation on maps into a fibrant object:
//! every homotopic pair gets symmetry and transitivity fillers.

use serde_json::json;

use super::paths::{find_homotopy, symmetry, transitivity, Homotopy};
use super::whe::{certify_fibrant, TestObject};
use crate::cofib::CofibrationClass;
use crate::error::Result;
use crate::presheaf::{enumerate_nat_trans, Psh};
use crate::report::CheckReport;
use crate::search::Budget;

/// For each source `X`, enumerates the maps `X -> K`, finds a homotopy for
/// every ordered pair that has one, and fills the symmetry box for each and
/// the transitivity box for each composable pair of homotopies.
pub fn check_homotopy_relation(
    k: &TestObject,
    sources: &[TestObject],
    class: &CofibrationClass,
    budget: &mut Budget,
) -> Result<CheckReport> {
    let mut r = CheckReport::new("homotopy-relation").param("k", k.name.as_str());
    if !certify_fibrant(&k.obj, class, budget)? {
        r.fail("the target is not certified fibrant", json!({"k": k.name}));
        return Ok(r);
    }
    for x in sources {
        let mut part = CheckReport::new("homotopy-relation-source").param("x", x.name.as_str());
        let maps = enumerate_nat_trans(&x.obj, &k.obj, budget)?;
        let n = maps.len();
        let mut paths: Vec<Vec<Option<Homotopy>>> = vec![vec![None; n]; n];
        for i in 0..n {
            for j in 0..n {
                paths[i][j] = find_homotopy(&maps[i], &maps[j], budget)?;
            }
        }
        let homotopic = paths.iter().flatten().filter(|p| p.is_some()).count();
        let mut triples = 0u64;
        for i in 0..n {
            for j in 0..n {
                let Some(th) = &paths[i][j] else { continue };
                let sym = symmetry(th, budget)?;
                let ok = sym.result.as_ref().is_some_and(|h| h.joins(&maps[j], &maps[i]));
                part.require(ok, "a symmetry box has no filler", || json!({"x": x.name, "from": i, "to": j}));
                for (l, ph) in paths[j].iter().enumerate() {
                    let Some(ph) = ph else { continue };
                    triples += 1;
                    let tr = transitivity(th, ph, budget)?;
                    let ok = tr.result.as_ref().is_some_and(|h| h.joins(&maps[i], &maps[l]));
                    part.require(ok, "a transitivity box has no filler", || json!({"x": x.name, "maps": [i, j, l]}));
                }
            }
        }
        part.count("maps", n as u64);
        part.count("homotopic_pairs", homotopic as u64);
        part.count("composable_triples", triples);
        r.push(part);
    }
    Ok(r)
}

/// Sources used by default: `1`, `1+1` and `I`.
pub fn standard_sources(kit: &crate::interval::IntervalKit) -> Vec<TestObject> {
    let i: &Psh = &kit.i;
    vec![TestObject::new("1", &kit.one), TestObject::new("1+1", &kit.two.obj), TestObject::new("I", i)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;
    use crate::interval::IntervalKit;

    #[test]
    fn relation_in_omega() {
        let s = build_site(2).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let kit = IntervalKit::new(&s).unwrap();
        let k = TestObject::new("Ω", &class.omega().obj);
        let r = check_homotopy_relation(&k, &standard_sources(&kit), &class, &mut Budget::default()).unwrap();
        assert!(r.passed(), "{r:#?}");
        assert!(r.parts.iter().map(|p| p.counters["homotopic_pairs"]).sum::<u64>() >= 10);
    }

    #[test]
    fn uncertified_targets_fail() {
        let s = build_site(2).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let kit = IntervalKit::new(&s).unwrap();
        let k = TestObject::new("I", &kit.i);
        assert!(!check_homotopy_relation(&k, &[], &class, &mut Budget::default()).unwrap().passed());
    }
}
