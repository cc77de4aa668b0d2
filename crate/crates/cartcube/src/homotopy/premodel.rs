//! Sampled checks of the two weak factorization systems and of 3-for-2 for
//! maps between fibrant objects.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::paths::homotopy_equivalence;
use super::whe::{certify_fibrant, weak_homotopy_equivalence, TestObject};
use crate::cofib::{factor_cof_tfib, is_trivial_fibration, unliftable_square, CofibrationClass};
use crate::error::{Error, Result};
use crate::fib::{enumerate_generators, fibration_structure, pushout_product, Mode, Route};
use crate::interval::IntervalKit;
use crate::presheaf::{NatTrans, Psh};
use crate::report::{CheckReport, Verdict};
use crate::search::{Budget, NatSearch};

type Named = (String, NatTrans);

/// The sampled maps the suite runs on.
#[derive(Clone, Debug)]
pub struct PremodelSamples {
    pub class: CofibrationClass,
    pub trivial_cofibrations: Vec<Named>,
    /// Candidate fibrations; only those certified by route A are used.
    pub fibrations: Vec<Named>,
    pub cofibrations: Vec<Named>,
    /// Candidate trivial fibrations; only certified ones are used.
    pub trivial_fibrations: Vec<Named>,
    /// Pairs expected to have an unliftable square.
    pub negative: Vec<(String, NatTrans, NatTrans)>,
    /// Objects for the 3-for-2 triangles and the WHE family.
    pub fibrant: Vec<TestObject>,
    pub triangles: usize,
    /// Objects with more cells than this appear at most once per triangle.
    pub large_object: usize,
    /// Search budget per triangle; triangles over it are counted, not run.
    pub triangle_budget: u64,
    pub seed: u64,
}

impl PremodelSamples {
    /// The default samples on a cube site with `N >= 2`.
    pub fn standard(class: &CofibrationClass, budget: &mut Budget) -> Result<PremodelSamples> {
        let site = class.site();
        let kit = IntervalKit::new(site)?;
        let top = site.cube().map_or(0, |d| d.n);
        let mut trivial_cofibrations = Vec::new();
        for g in enumerate_generators(class, Mode::Unbiased, top)? {
            if g.map.is_iso() {
                continue;
            }
            let (n, s, i) = g.basic.expect("basic generator");
            trivial_cofibrations.push((format!("gen[n={n},sieve={s},i={i}]"), g.map));
        }
        let fibrant = super::whe::standard_family(class);
        let mut fibrations: Vec<Named> =
            fibrant.iter().map(|k| (format!("{}->1", k.name), NatTrans::to_terminal(&k.obj))).collect();
        fibrations.push(("I->1".into(), NatTrans::to_terminal(&kit.i)));
        let cofibrations = vec![
            ("boundary".into(), kit.boundary.clone()),
            ("delta0".into(), kit.delta0.clone()),
            ("0->I".into(), NatTrans::from_initial(&kit.i)),
            ("diagonal".into(), kit.diagonal.clone()),
            ("boundary⊗delta0".into(), pushout_product(&kit.boundary, &kit.delta0)?),
        ];
        let mut trivial_fibrations: Vec<Named> = vec![("id_I".into(), NatTrans::identity(&kit.i))];
        for (name, f) in [("1+1->1", NatTrans::to_terminal(&kit.two.obj)), ("delta0", kit.delta0.clone())] {
            let (fac, _) = factor_cof_tfib(&f, class, budget)?;
            trivial_fibrations.push((format!("({name})+"), fac.right));
        }
        trivial_fibrations.push(("I->1".into(), NatTrans::to_terminal(&kit.i)));
        let negative = vec![
            ("boundary⊗delta0 vs I->1".into(), pushout_product(&kit.boundary, &kit.delta0)?, NatTrans::to_terminal(&kit.i)),
            ("boundary vs I->1".into(), kit.boundary.clone(), NatTrans::to_terminal(&kit.i)),
        ];
        Ok(PremodelSamples {
            class: class.clone(),
            trivial_cofibrations,
            fibrations,
            cofibrations,
            trivial_fibrations,
            negative,
            fibrant,
            triangles: 12,
            large_object: 16,
            triangle_budget: 5_000_000,
            seed: 0,
        })
    }
}

fn lifting_part(name: &str, lefts: &[Named], rights: &[Named], budget: &mut Budget) -> Result<CheckReport> {
    let mut r = CheckReport::new(name);
    let mut pairs = 0u64;
    for (ln, l) in lefts {
        for (rn, rt) in rights {
            pairs += 1;
            if let Some(p) = unliftable_square(l, rt, budget)? {
                r.fail("a square has no filler", json!({"left": ln, "right": rn, "square": p.witness()}));
                return Ok(r);
            }
        }
    }
    r.count("pairs", pairs);
    Ok(r)
}

/// A uniformly chosen map between the given objects, if one exists.
fn sample_map(x: &Psh, y: &Psh, rng: &mut ChaCha8Rng, budget: &mut Budget) -> Result<Option<NatTrans>> {
    let all = NatSearch::new(x, y)?.all(budget)?;
    Ok(all.choose(rng).map(|c| NatTrans::from_parts(x.clone(), y.clone(), c.clone())))
}

/// Samples `f : X -> Y` and `g : Y -> Z`. Returns which of `f`, `g`, `gf`
/// are homotopy equivalences and the indices of those that fail the WHE check.
fn triangle(
    x: &TestObject,
    y: &TestObject,
    z: &TestObject,
    family: &[TestObject],
    class: &CofibrationClass,
    rng: &mut ChaCha8Rng,
    budget: &mut Budget,
) -> Result<Option<(Vec<bool>, Vec<usize>)>> {
    let Some(f) = sample_map(&x.obj, &y.obj, rng, budget)? else { return Ok(None) };
    let Some(g) = sample_map(&y.obj, &z.obj, rng, budget)? else { return Ok(None) };
    let gf = f.then(&g)?;
    let mut he = Vec::with_capacity(3);
    let mut fails = Vec::new();
    for (i, m) in [&f, &g, &gf].into_iter().enumerate() {
        let e = homotopy_equivalence(m, budget)?.is_some();
        if e && weak_homotopy_equivalence(m, family, class, budget)?.verdict == Verdict::Fail {
            fails.push(i);
        }
        he.push(e);
    }
    Ok(Some((he, fails)))
}

pub fn premodel_sample_suite(samples: &PremodelSamples, budget: &mut Budget) -> Result<CheckReport> {
    let class = &samples.class;
    let mut r = CheckReport::new("premodel-suite").param("seed", samples.seed).param("triangles", samples.triangles as u64);

    let mut fibs = Vec::new();
    for (name, f) in &samples.fibrations {
        match fibration_structure(f, class, Mode::Unbiased, Route::A, budget)?.verdict() {
            Some(true) => fibs.push((name.clone(), f.clone())),
            _ => r.detail(format!("{name} is not certified as a fibration and is left out")),
        }
    }
    let mut tfibs = Vec::new();
    for (name, f) in &samples.trivial_fibrations {
        if is_trivial_fibration(f, class, budget)? {
            tfibs.push((name.clone(), f.clone()));
        } else {
            r.detail(format!("{name} is not certified as a trivial fibration and is left out"));
        }
    }
    r.count("certified_fibrations", fibs.len() as u64);
    r.count("certified_trivial_fibrations", tfibs.len() as u64);
    let tcof = lifting_part("tcof-vs-fib", &samples.trivial_cofibrations, &fibs, budget)?;
    r.push(tcof);
    let cof = lifting_part("cof-vs-tfib", &samples.cofibrations, &tfibs, budget)?;
    r.push(cof);

    let mut neg = CheckReport::new("negative-controls");
    for (name, l, rt) in &samples.negative {
        let w = unliftable_square(l, rt, budget)?;
        neg.require(w.is_some(), "a negative control has all its fillers", || json!({"control": name}));
        if let Some(p) = w {
            neg.detail(format!("{name}: refuted by {}", p.witness()));
        }
    }
    r.push(neg);

    let mut fibrant = Vec::new();
    for k in &samples.fibrant {
        if certify_fibrant(&k.obj, class, budget)? {
            fibrant.push(k.clone());
        }
    }
    let mut tri = CheckReport::new("three-for-two");
    let mut rng = ChaCha8Rng::seed_from_u64(samples.seed);
    let mut done = 0;
    let mut he_count = 0u64;
    let mut over_budget = 0u64;
    for _ in 0..samples.triangles * 4 {
        if done == samples.triangles || fibrant.is_empty() {
            break;
        }
        let pick = |rng: &mut ChaCha8Rng| fibrant.choose(rng).expect("nonempty").clone();
        let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        // Quasi-inverse search enumerates maps between every pair of the
        // triangle, and endomaps of a large object are out of reach.
        let large = [&x, &y, &z].iter().filter(|k| k.obj.total_cells() > samples.large_object).count();
        if large > 1 {
            continue;
        }
        let mut inner = Budget::new(budget.remaining().min(samples.triangle_budget));
        let outcome = triangle(&x, &y, &z, &fibrant, class, &mut rng, &mut inner);
        budget.charge(inner.used(), "three-for-two")?;
        match outcome {
            Ok(None) => continue,
            Ok(Some((he, whe_fails))) => {
                let n = he.iter().filter(|&&b| b).count() as u64;
                he_count += n;
                tri.require(whe_fails.is_empty(), "a homotopy equivalence is not a weak homotopy equivalence", || {
                    json!({"triangle": [x.name, y.name, z.name], "maps": whe_fails})
                });
                tri.require(n != 2, "two of three are homotopy equivalences but the third is not", || {
                    json!({"triangle": [x.name, y.name, z.name], "equivalences": he})
                });
                done += 1;
            }
            Err(Error::Budget { .. }) => over_budget += 1,
            Err(e) => return Err(e),
        }
    }
    tri.count("over_budget", over_budget);
    tri.count("triangles", done as u64);
    tri.count("equivalences", he_count);
    r.push(tri);
    Ok(r)
}
