//! The registry of named checks and the suite runner.
//!
//! Sampled checks draw sample `i` from its own ChaCha stream and search it
//! under its own budget, then merge the per-sample reports in index order,
//! so a report does not depend on how many worker threads ran it.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cofib::{check_axioms, factor_cof_tfib, is_trivial_fibration, trivial_fibration_structure, CofibrationClass};
use crate::cube::build_site;
use crate::error::{Error, Result};
use crate::fib::{
    check_leibniz, classifying_type, fibration_structure, ClassifierKind, Mode, Route,
};
use crate::fincat::{arrow_category, chain, terminal_category, walking_iso, Site};
use crate::homotopy::{
    check_homotopy_relation, check_pi0_product, pi0, premodel_sample_suite, standard_sources, PremodelSamples, TestObject,
};
use crate::interval::{check_binomial, check_root_adjunction, IntervalKit};
use crate::nerve::{check_adjunction, check_full_faithfulness, check_universe_omega, cubical_nerve, nerve};
use crate::presheaf::{
    codiscrete, codiscrete_map, coproduct, product, pullback, pushforward, random_map, random_presheaf, NatTrans, Psh, Shape, Subobject,
};
use crate::report::CheckReport;
use crate::search::Budget;

/// Every registered check, in suite order.
pub const CHECKS: [&str; 12] = [
    "binomial",
    "root-adjunction",
    "leibniz",
    "tfib-equiv",
    "fib-check",
    "pi0-products",
    "nerve-ff",
    "universe-omega",
    "axioms",
    "premodel-suite",
    "frobenius-sample",
    "tfib-closure",
];

/// Parameters shared by all checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckArgs {
    /// The truncation `N` of the cube site.
    pub trunc: usize,
    pub seed: u64,
    /// Overrides the default sample count of sampled checks.
    pub samples: Option<usize>,
    /// Search budget per sample, in nodes.
    pub budget: u64,
    pub class: String,
}

impl Default for CheckArgs {
    fn default() -> CheckArgs {
        CheckArgs { trunc: 2, seed: 0, samples: None, budget: Budget::DEFAULT, class: "all-monos".into() }
    }
}

impl CheckArgs {
    fn site(&self) -> Result<Site> {
        build_site(self.trunc)
    }

    fn class(&self, site: &Site) -> Result<CofibrationClass> {
        CofibrationClass::by_name(site, &self.class)
    }

    fn budget(&self) -> Budget {
        Budget::new(self.budget)
    }

    fn count(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn needs(&self, least: usize, check: &str) -> Result<()> {
        if self.trunc < least {
            return Err(Error::Input(format!("{check} needs N >= {least}, got {}", self.trunc)));
        }
        Ok(())
    }
}

/// Runs one registered check; the report carries its wall time. A check
/// that exhausts its budget outside any sample yields a BUDGET report.
pub fn run_check(name: &str, args: &CheckArgs) -> Result<CheckReport> {
    let start = Instant::now();
    let outcome = match name {
        "binomial" => check_binomial(args.trunc, &mut args.budget()),
        "root-adjunction" => root_adjunction(args),
        "leibniz" => leibniz(args),
        "tfib-equiv" => tfib_equiv(args),
        "fib-check" => fib_check(args),
        "pi0-products" => pi0_products(args),
        "nerve-ff" => nerve_ff(args),
        "universe-omega" => universe_omega(args),
        "axioms" => axioms(args),
        "premodel-suite" => premodel(args),
        "frobenius-sample" => frobenius(args),
        "tfib-closure" => tfib_closure(args),
        other => return Err(Error::Input(format!("unknown check `{other}`; registered: {}", CHECKS.join(", ")))),
    };
    let mut r = match outcome {
        Ok(r) => r,
        Err(e @ (Error::Budget { .. } | Error::HomBudget { .. })) => {
            let mut r = CheckReport::new(name);
            r.budget(&e);
            r
        }
        Err(e) => return Err(e),
    };
    r.set_param("N", args.trunc);
    r.wall_ms = Some(start.elapsed().as_millis() as u64);
    Ok(r)
}

/// Runs each `(check, args)` entry on a pool of `workers` threads. Reports
/// come back in entry order.
pub fn run_suite(entries: &[(String, CheckArgs)], workers: usize) -> Result<Vec<CheckReport>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Input(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| entries.par_iter().map(|(n, a)| run_check(n, a)).collect())
}

/// Optional overrides of [`CheckArgs`] fields.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArgOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

impl ArgOverrides {
    pub fn apply(&self, base: &CheckArgs) -> CheckArgs {
        CheckArgs {
            trunc: self.trunc.unwrap_or(base.trunc),
            seed: self.seed.unwrap_or(base.seed),
            samples: self.samples.or(base.samples),
            budget: self.budget.unwrap_or(base.budget),
            class: self.class.clone().unwrap_or_else(|| base.class.clone()),
        }
    }
}

/// A suite entry: a check name, optionally with its own overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ManifestEntry {
    Name(String),
    With {
        name: String,
        #[serde(flatten)]
        args: ArgOverrides,
    },
}

/// A suite manifest.
///
/// ```json
/// {"defaults": {"trunc": 2, "seed": 7},
///  "checks": ["binomial", {"name": "leibniz", "samples": 10}],
///  "workers": 4}
/// ```
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub defaults: ArgOverrides,
    pub checks: Vec<ManifestEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Manifest {
    /// Every registered check with no overrides.
    pub fn all() -> Manifest {
        Manifest { checks: CHECKS.iter().map(|c| ManifestEntry::Name(c.to_string())).collect(), ..Manifest::default() }
    }

    /// Resolves the entries against `base`, rejecting unknown names.
    pub fn resolve(&self, base: &CheckArgs) -> Result<Vec<(String, CheckArgs)>> {
        let defaults = self.defaults.apply(base);
        self.checks
            .iter()
            .map(|e| {
                let (name, args) = match e {
                    ManifestEntry::Name(n) => (n.clone(), defaults.clone()),
                    ManifestEntry::With { name, args } => (name.clone(), args.apply(&defaults)),
                };
                if !CHECKS.contains(&name.as_str()) {
                    return Err(Error::Input(format!("manifest names unknown check `{name}`")));
                }
                Ok((name, args))
            })
            .collect()
    }
}

/// The RNG for sample `i`.
fn sample_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64 + 1);
    rng
}

/// Runs `sample(i, rng, budget)` for `i < n` in parallel and folds the parts
/// into one report. A sample over its budget becomes a BUDGET part.
fn sampled<F>(name: &str, args: &CheckArgs, n: usize, sample: F) -> Result<CheckReport>
where
    F: Fn(usize, &mut ChaCha8Rng, &mut Budget) -> Result<CheckReport> + Sync,
{
    let parts: Vec<CheckReport> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(args.seed, i);
            let mut budget = args.budget();
            match sample(i, &mut rng, &mut budget) {
                Ok(mut p) => {
                    p.set_param("sample", i);
                    Ok(p)
                }
                Err(e @ (Error::Budget { .. } | Error::HomBudget { .. })) => {
                    let mut p = CheckReport::new("sample").param("sample", i);
                    p.budget(&e);
                    Ok(p)
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut r = CheckReport::new(name).param("seed", args.seed).param("samples", n);
    for p in parts {
        r.push(p);
    }
    Ok(r)
}

/// Sums a counter over the parts of a report.
pub fn total(r: &CheckReport, key: &str) -> u64 {
    r.parts.iter().map(|p| p.counters.get(key).copied().unwrap_or(0) + total(p, key)).sum()
}

fn small(rng: &mut ChaCha8Rng, site: &Site) -> Result<Psh> {
    random_presheaf(site, rng, Shape { generators: 2, max_level: 1, gluings: 2 })
}

fn root_adjunction(args: &CheckArgs) -> Result<CheckReport> {
    args.needs(1, "root-adjunction")?;
    let site = args.site()?;
    sampled("root-adjunction", args, args.count(20), |_, rng, budget| {
        let a = random_presheaf(&site, rng, Shape { generators: 1, max_level: 1, gluings: 0 })?;
        let x = small(rng, &site)?;
        check_root_adjunction(&a, &x, budget)
    })
}

/// Small monomorphisms: standard ones from the interval and the inclusion
/// of a random generated subobject.
fn random_mono(kit: &IntervalKit, rng: &mut ChaCha8Rng) -> Result<(String, NatTrans)> {
    let site = &kit.site;
    let pick = rng.gen_range(0..7);
    Ok(match pick {
        0 => ("delta0".into(), kit.delta0.clone()),
        1 => ("delta1".into(), kit.delta1.clone()),
        2 => ("boundary".into(), kit.boundary.clone()),
        3 => ("0->1".into(), NatTrans::from_initial(&kit.one)),
        4 => ("0->I".into(), NatTrans::from_initial(&kit.i)),
        5 => ("id_1".into(), NatTrans::identity(&kit.one)),
        _ => {
            let x = small(rng, site)?;
            let cells: Vec<(u32, u32)> = (0..site.num_objects() as u32)
                .filter(|&c| x.size(c) > 0)
                .filter_map(|c| rng.gen_bool(0.5).then(|| (c, rng.gen_range(0..x.size(c) as u32))))
                .collect();
            let (_, m) = Subobject::generated(&x, &cells).to_presheaf();
            ("generated".into(), m)
        }
    })
}

fn random_target(site: &Site, rng: &mut ChaCha8Rng, budget: &mut Budget) -> Result<NatTrans> {
    let x = small(rng, site)?;
    if rng.gen_bool(0.5) {
        return Ok(NatTrans::to_terminal(&x));
    }
    let y = small(rng, site)?;
    Ok(match random_map(&x, &y, rng, budget)? {
        Some(f) => f,
        None => NatTrans::to_terminal(&x),
    })
}

fn leibniz(args: &CheckArgs) -> Result<CheckReport> {
    args.needs(1, "leibniz")?;
    let kit = IntervalKit::new(&args.site()?)?;
    let mut r = sampled("leibniz", args, args.count(50), |_, rng, budget| {
        let (an, a) = random_mono(&kit, rng)?;
        let (bn, b) = random_mono(&kit, rng)?;
        let c = random_target(&kit.site, rng, budget)?;
        let mut p = check_leibniz(&a, &b, &c, budget)?;
        p.set_param("a", an);
        p.set_param("b", bn);
        p.set_param("c", json!(c.src().sizes()));
        Ok(p)
    })?;
    let lifts = r.parts.iter().filter(|p| p.params.get("lifts") == Some(&json!(true))).count();
    r.count("lifting_triples", lifts as u64);
    r.count("non_lifting_triples", (r.parts.len() - lifts) as u64);
    Ok(r)
}

fn tfib_equiv(args: &CheckArgs) -> Result<CheckReport> {
    args.needs(1, "tfib-equiv")?;
    let site = args.site()?;
    let class = args.class(&site)?;
    let mut r = sampled("tfib-equiv", args, args.count(30), |i, rng, budget| {
        // Every third sample is a right factor, so positives are represented.
        let f = random_target(&site, rng, budget)?;
        let f = if i % 3 == 0 { factor_cof_tfib(&f, &class, budget)?.0.right } else { f };
        let t = trivial_fibration_structure(&f, &class, budget)?;
        let verdict = t.verdict();
        let mut p = agreement("tfib-sample", verdict, t.report, &f);
        match verdict {
            Some(true) => p.count("trivial_fibrations", 1),
            Some(false) => p.count("refutations", 1),
            None => {}
        }
        Ok(p)
    })?;
    for key in ["trivial_fibrations", "refutations"] {
        let n = total(&r, key);
        r.count(key, n);
    }
    Ok(r)
}

fn fib_check(args: &CheckArgs) -> Result<CheckReport> {
    args.needs(2, "fib-check")?;
    let site = args.site()?;
    let class = args.class(&site)?;
    let kit = IntervalKit::new(&site)?;
    let fixed = [
        NatTrans::to_terminal(&kit.one),
        NatTrans::to_terminal(&kit.two.obj),
        NatTrans::to_terminal(&class.omega().obj),
        NatTrans::to_terminal(&kit.i),
        kit.delta0.clone(),
    ];
    let mut r = sampled("fib-check", args, args.count(16), |i, rng, budget| {
        let f = match fixed.get(i) {
            Some(f) => f.clone(),
            None => random_target(&site, rng, budget)?,
        };
        let a = fibration_structure(&f, &class, Mode::Unbiased, Route::Both, budget)?;
        let derived: Vec<CheckReport> =
            a.report.parts.iter().filter(|q| q.check == "biased-derivation").cloned().collect();
        let mut p = agreement("fib-sample", a.verdict(), a.report.clone(), &f);
        p.set_param("route_a", json!(a.route_a));
        p.set_param("route_b", json!(a.route_b));
        if a.verdict() == Some(true) {
            p.count("fibrations", 1);
            p.require(!derived.is_empty(), "no biased structure was derived", || json!(null));
        }
        p.count("biased_derivations", derived.len() as u64);
        for d in derived {
            p.push(d);
        }
        Ok(p)
    })?;
    for key in ["fibrations", "biased_derivations"] {
        let n = total(&r, key);
        r.count(key, n);
    }
    Ok(r)
}

/// A sample of a decision procedure with several characterizations: it
/// passes when they agree, whichever way. A refutation's witness is kept.
fn agreement(name: &str, verdict: Option<bool>, inner: CheckReport, f: &NatTrans) -> CheckReport {
    let mut p = CheckReport::new(name);
    p.params = inner.params;
    p.counters = inner.counters;
    p.set_param("sizes", json!([f.src().sizes(), f.tgt().sizes()]));
    p.set_param("verdict", json!(verdict));
    if verdict == Some(false) {
        p.set_param("refutation", inner.witness.unwrap_or(json!(null)));
    }
    p.require(verdict.is_some(), "the characterizations disagree", || json!({"details": inner.details}));
    p
}

fn pi0_products(args: &CheckArgs) -> Result<CheckReport> {
    args.needs(1, "pi0-products")?;
    let site = args.site()?;
    let kit = IntervalKit::new(&site)?;
    let mut r = sampled("pi0-products", args, args.count(30), |_, rng, _| {
        let x = small(rng, &site)?;
        let y = small(rng, &site)?;
        check_pi0_product(&x, &y)
    })?;
    let (pi, p2) = (pi0(&kit.i)?.count, pi0(&kit.two.obj)?.count);
    r.count("pi0_of_interval", pi as u64);
    r.count("pi0_of_two_points", p2 as u64);
    r.require(pi == 1 && p2 == 2, "π₀ of I or of 1+1 is wrong", || json!({"interval": pi, "two_points": p2}));
    Ok(r)
}

fn nerve_ff(args: &CheckArgs) -> Result<CheckReport> {
    args.needs(2, "nerve-ff")?;
    let site = args.site()?;
    let mut r = CheckReport::new("nerve-ff");
    let cats = [("1", terminal_category()), ("2", arrow_category()), ("iso", walking_iso()), ("3-chain", chain(3))];
    for (cn, c) in &cats {
        for (dn, d) in &cats {
            let mut p = check_full_faithfulness(c, d, &site, &mut args.budget())?;
            p.set_param("pair", json!([cn, dn]));
            r.push(p);
        }
    }
    let n2 = cubical_nerve(&arrow_category(), &site, &mut args.budget())?;
    r.set_param("nerve_of_2", json!(n2.obj.sizes()));
    r.require(n2.obj.size(2) == 6, "N(𝟚)₂ is not 6", || json!({"sizes": n2.obj.sizes()}));
    // ν(iso)[n] counts all object assignments on ℂ/[n], which is out of
    // reach above [1]; the iso is checked on □≤1.
    let low = build_site(1)?;
    let runs = [("1", &cats[0].1, &site), ("2", &cats[1].1, &site), ("iso", &cats[2].1, &low)];
    for (an, a, s) in runs {
        let kit = IntervalKit::new(s)?;
        let nu = nerve(a, s, &mut args.budget())?;
        for (xn, x) in [("1", &kit.one), ("I", &kit.i), ("1+1", &kit.two.obj)] {
            let mut p = check_adjunction(x, &nu, &mut args.budget())?;
            p.set_param("pair", json!([xn, an]));
            p.set_param("N", s.cube().map_or(0, |d| d.n));
            r.push(p);
        }
    }
    r.caveat("the ν-adjunction for the walking iso is checked on □≤1");
    Ok(r)
}

fn universe_omega(args: &CheckArgs) -> Result<CheckReport> {
    args.needs(1, "universe-omega")?;
    let site = args.site()?;
    let class = CofibrationClass::all_monos(&site);
    let om = class.omega();
    check_universe_omega(&site, &om.obj, &om.truth(), &mut args.budget())
}

fn axioms(args: &CheckArgs) -> Result<CheckReport> {
    args.needs(1, "axioms")?;
    let site = args.site()?;
    let kit = IntervalKit::new(&site)?;
    check_axioms(&args.class(&site)?, &kit, &mut args.budget())
}

fn premodel(args: &CheckArgs) -> Result<CheckReport> {
    args.needs(2, "premodel-suite")?;
    let site = args.site()?;
    let class = args.class(&site)?;
    let kit = IntervalKit::new(&site)?;
    let mut budget = args.budget();
    let mut samples = PremodelSamples::standard(&class, &mut budget)?;
    samples.seed = args.seed;
    if let Some(n) = args.samples {
        samples.triangles = n;
    }
    let mut r = premodel_sample_suite(&samples, &mut args.budget())?;
    let k = TestObject::new("Ω", &class.omega().obj);
    r.push(check_homotopy_relation(&k, &standard_sources(&kit), &class, &mut args.budget())?);
    Ok(r)
}

/// Pushforwards of fibrations along fibrations, on instances whose
/// pushforward stays small.
fn frobenius(args: &CheckArgs) -> Result<CheckReport> {
    args.needs(2, "frobenius-sample")?;
    let site = args.site()?;
    let class = args.class(&site)?;
    let kit = IntervalKit::new(&site)?;
    let one = kit.one.clone();
    let two = kit.two.clone();
    let omega = class.omega().obj.clone();
    let collapse = NatTrans::to_terminal(&two.obj);
    let on_omega = NatTrans::to_terminal(&omega);
    let four = coproduct(&two.obj, &two.obj);
    // (1+1)+(1+1) -> 1+1, each summand onto its own point.
    let fold = four.copair(&[
        NatTrans::to_terminal(&two.obj).then(&two.inj[0])?,
        NatTrans::to_terminal(&two.obj).then(&two.inj[1])?,
    ])?;
    let om1 = coproduct(&omega, &one);
    let om_plus_one = om1.copair(&[NatTrans::to_terminal(&omega).then(&two.inj[0])?, two.inj[1].clone()])?;
    let om_two = product(&omega, &two.obj)?;
    let instances: Vec<(&str, NatTrans, NatTrans)> = vec![
        ("id over 1+1 -> 1", NatTrans::identity(&two.obj), collapse.clone()),
        ("fold over 1+1 -> 1", fold, collapse.clone()),
        ("Ω+1 over 1+1 -> 1", om_plus_one, collapse),
        ("id over Ω -> 1", NatTrans::identity(&omega), on_omega.clone()),
        ("Ω×(1+1) over Ω -> 1", om_two.proj[0].clone(), on_omega),
        ("Ω -> 1 over id", NatTrans::to_terminal(&omega), NatTrans::identity(&one)),
    ];
    let mut r = sampled("frobenius-sample", args, args.samples.unwrap_or(instances.len()).min(instances.len()), |i, _, budget| {
        let (name, a, f) = &instances[i];
        let mut p = CheckReport::new("frobenius-instance").param("instance", *name);
        for (what, m) in [("a", a), ("f", f)] {
            let v = fibration_structure(m, &class, Mode::Unbiased, Route::A, budget)?.verdict();
            p.require(v == Some(true), "an input is not certified as a fibration", || json!({"map": what}));
        }
        let pf = pushforward(a, f, budget)?;
        p.set_param("pushforward", json!(pf.obj.sizes()));
        // The pushforward is computed on the truncation alone; its fibrancy
        // is decided for that truncated object at the inputs' horizon.
        let horizon = a.src().validity().min(f.tgt().validity());
        let obj = (*pf.obj).clone().with_validity(horizon, true).into_psh();
        let to_base = NatTrans::new(obj, pf.to_base.tgt().clone(), pf.to_base.components().clone())?;
        let v = fibration_structure(&to_base, &class, Mode::Unbiased, Route::A, budget)?.verdict();
        p.require(v == Some(true), "the pushforward is not a fibration", || json!({"instance": name}));
        Ok(p)
    })?;
    r.count("instances", r.parts.len() as u64);
    r.caveat("pushforwards are computed on the truncation; fibrancy is that of the truncated object");
    Ok(r)
}

/// Trivial fibrations built from codiscrete objects: projections
/// `X×K(2) -> X`, maps `K(g)` for surjections `g`, and pullbacks of those.
/// Each sample checks composition, pullback along a random map and
/// pushforward along a random map; then `TFib(a)×TFib(a) -> TFib(a)` is
/// checked on fixed maps.
fn tfib_closure(args: &CheckArgs) -> Result<CheckReport> {
    args.needs(1, "tfib-closure")?;
    let site = args.site()?;
    let class = args.class(&site)?;
    let kit = IntervalKit::new(&site)?;
    let tiny = Shape { generators: 1, max_level: 1, gluings: 1 };
    let mut r = sampled("tfib-closure", args, args.count(12), |i, rng, budget| {
        let mut p = CheckReport::new("tfib-closure-sample");
        let onto = |rng: &mut ChaCha8Rng| -> Result<NatTrans> {
            let b = rng.gen_range(1..=2usize);
            let mut g: Vec<u32> = (0..b as u32).collect();
            g.push(rng.gen_range(0..b as u32));
            codiscrete_map(&site, 0, &g, b)
        };
        let t = match i % 3 {
            0 => product(&random_presheaf(&site, rng, tiny)?, &codiscrete(&site, 0, 2)?.into_psh())?.proj[0].clone(),
            1 => onto(rng)?,
            _ => {
                let k = onto(rng)?;
                let z = random_presheaf(&site, rng, tiny)?;
                match random_map(&z, k.tgt(), rng, budget)? {
                    Some(g) => pullback(&g, &k)?.proj[0].clone(),
                    None => k,
                }
            }
        };
        p.set_param("tfib", json!([t.src().sizes(), t.tgt().sizes()]));
        p.require(is_trivial_fibration(&t, &class, budget)?, "the sample is not a trivial fibration", || json!(null));
        // Composition: t after its own pullback along t.
        let sq = pullback(&t, &t)?;
        let comp = sq.proj[0].then(&t)?;
        p.require(is_trivial_fibration(&comp, &class, budget)?, "a composite is not a trivial fibration", || json!(null));
        // Pullback along a random map into the base.
        let z = random_presheaf(&site, rng, tiny)?;
        if let Some(g) = random_map(&z, t.tgt(), rng, budget)? {
            let pb = pullback(&g, &t)?;
            p.require(is_trivial_fibration(&pb.proj[0], &class, budget)?, "a pullback is not a trivial fibration", || {
                json!({"along": z.sizes()})
            });
            p.count("pullbacks", 1);
        }
        // Pushforward along the base's map to a small object.
        let w = if rng.gen_bool(0.5) { kit.one.clone() } else { kit.i.clone() };
        if let Some(h) = random_map(t.tgt(), &w, rng, budget)? {
            let pf = pushforward(&t, &h, budget)?;
            p.require(is_trivial_fibration(&pf.to_base, &class, budget)?, "a pushforward is not a trivial fibration", || {
                json!({"along": [h.src().sizes(), h.tgt().sizes()]})
            });
            p.count("pushforwards", 1);
        }
        p.count("composites", 1);
        Ok(p)
    })?;
    for key in ["composites", "pullbacks", "pushforwards"] {
        let n = total(&r, key);
        r.count(key, n);
    }
    // TFib(a)×_X TFib(a) -> TFib(a) is a trivial fibration.
    let mut budget = args.budget();
    let one = kit.one.clone();
    let maps = [
        ("K(3)->K(2)", codiscrete_map(&site, 0, &[0, 1, 1], 2)?),
        ("id_I", NatTrans::identity(&kit.i)),
        ("delta0", kit.delta0.clone()),
        ("1+1->1", NatTrans::to_terminal(&kit.two.obj)),
        ("I->1", NatTrans::to_terminal(&kit.i)),
        ("1->1", NatTrans::identity(&one)),
    ];
    let mut wp = CheckReport::new("weak-propositions");
    for (name, a) in maps.iter() {
        let ct = classifying_type(a, &class, ClassifierKind::Tfib, &mut budget)?;
        let mut q = ct.weak_proposition(&mut budget)?;
        q.set_param("map", *name);
        wp.push(q);
    }
    r.push(wp);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(trunc: usize) -> CheckArgs {
        CheckArgs { trunc, ..CheckArgs::default() }
    }

    #[test]
    fn registered_examples() {
        assert!(run_check("binomial", &args(2)).unwrap().passed());
        assert!(run_check("universe-omega", &args(1)).unwrap().passed());
        assert!(matches!(run_check("binomial", &args(0)), Err(Error::Input(_))));
        assert!(matches!(run_check("no-such-check", &args(2)), Err(Error::Input(_))));
    }

    #[test]
    fn tiny_budgets_are_reported_not_raised() {
        let a = CheckArgs { budget: 10, ..args(2) };
        let r = run_check("axioms", &a).unwrap();
        assert_eq!(r.verdict, crate::report::Verdict::Budget);
        assert_eq!(r.verdict.exit_code(), 2);
    }

    #[test]
    fn manifests_resolve_in_order() {
        let m: Manifest = serde_json::from_str(
            r#"{"defaults": {"trunc": 1, "seed": 3}, "checks": ["binomial", {"name": "leibniz", "samples": 4}]}"#,
        )
        .unwrap();
        let e = m.resolve(&CheckArgs::default()).unwrap();
        assert_eq!(e[0], ("binomial".to_string(), CheckArgs { trunc: 1, seed: 3, ..CheckArgs::default() }));
        assert_eq!(e[1].1.samples, Some(4));
        assert_eq!(e[1].1.seed, 3);
        let bad: Manifest = serde_json::from_str(r#"{"checks": ["nope"]}"#).unwrap();
        assert!(bad.resolve(&CheckArgs::default()).is_err());
        assert!(serde_json::from_str::<Manifest>(r#"{"checks": [], "extra": 1}"#).is_err());
        assert_eq!(Manifest::all().resolve(&CheckArgs::default()).unwrap().len(), CHECKS.len());
    }

    #[test]
    fn worker_count_does_not_change_digests() {
        let a = CheckArgs { samples: Some(6), seed: 11, ..args(2) };
        let entries: Vec<(String, CheckArgs)> =
            ["leibniz", "pi0-products", "root-adjunction"].iter().map(|n| (n.to_string(), a.clone())).collect();
        let one: Vec<String> = run_suite(&entries, 1).unwrap().iter().map(CheckReport::digest).collect();
        let four: Vec<String> = run_suite(&entries, 4).unwrap().iter().map(CheckReport::digest).collect();
        assert_eq!(one, four);
        let other = CheckArgs { seed: 12, ..a };
        assert_ne!(run_check("leibniz", &other).unwrap().digest(), one[0]);
    }
}
