//! Acceptance criteria, one line per criterion.
//!
//! Counts and verdicts from the library are compared with oracles written
//! here from first principles: representables are built from hom-sets,
//! subpresheaves and natural families are enumerated by backtracking, lifting
//! is decided against every sieve inclusion, and components are computed
//! with a union-find on the 1-skeleton.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cartcube::checks::{run_check, run_suite, total, CheckArgs, Manifest};
use cartcube::cofib::{check_classifier, check_monad_laws, plus, plus_over, trivial_fibration_structure, CofibrationClass};
use cartcube::cube::{build_site, hom, CubeMap, Entry};
use cartcube::fincat::{arrow_category, chain, terminal_category, walking_iso, FinCat, MorId, Site};
use cartcube::homotopy::pi0;
use cartcube::interval::{check_binomial, check_root_adjunction, root};
use cartcube::presheaf::{
    codiscrete, codiscrete_map, exponential, product, pullback, pushforward, random_map, random_presheaf, NatTrans, Presheaf,
    Psh, Shape, Subobject,
};
use cartcube::report::{CheckReport, Verdict};
use cartcube::search::Budget;

type Outcome = Result<String, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed <= limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))
}

fn lib<T>(r: cartcube::error::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn budget() -> Budget {
    Budget::new(50_000_000)
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// `y(c)` built directly from hom-sets and composition.
fn representable(site: &Site, c: u32) -> Psh {
    let sizes = (0..site.num_objects() as u32).map(|d| site.hom(d, c).len()).collect();
    let act = (0..site.num_morphisms() as MorId)
        .map(|f| site.hom(site.cod(f), c).iter().map(|&h| site.pos_in_hom(site.compose(h, f)) as u32).collect())
        .collect();
    Presheaf::new(site.clone(), sizes, act).expect("representables are functorial").into_psh()
}

/// `n` points, acted on trivially.
fn points(site: &Site, n: usize) -> Psh {
    let sizes = vec![n; site.num_objects()];
    let act = (0..site.num_morphisms()).map(|_| (0..n as u32).collect()).collect();
    Presheaf::new(site.clone(), sizes, act).unwrap().into_psh()
}

/// Every subpresheaf of `x`, listed as sorted cells per object.
fn subpresheaves(x: &Presheaf) -> Vec<Vec<Vec<u32>>> {
    let site = x.site();
    let offset: Vec<usize> = (0..site.num_objects())
        .scan(0, |acc, c| {
            let o = *acc;
            *acc += x.size(c as u32);
            Some(o)
        })
        .collect();
    let mut cells: Vec<(u32, u32)> =
        (0..site.num_objects() as u32).flat_map(|c| (0..x.size(c) as u32).map(move |i| (c, i))).collect();
    cells.sort_by_key(|&(c, _)| std::cmp::Reverse(site.level(c)));
    let below = |(c, i): (u32, u32)| -> Vec<usize> {
        site.incoming(c).iter().map(|&f| offset[site.dom(f) as usize] + x.apply(f, i) as usize).collect()
    };
    let closures: Vec<Vec<usize>> = cells.iter().map(|&q| below(q)).collect();
    let flat = |(c, i): (u32, u32)| offset[c as usize] + i as usize;

    // 0 undecided, 1 in, 2 out
    fn go(
        k: usize,
        cells: &[(u32, u32)],
        closures: &[Vec<usize>],
        flat: &dyn Fn((u32, u32)) -> usize,
        state: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) {
        if k == cells.len() {
            out.push(state.clone());
            return;
        }
        let me = flat(cells[k]);
        if state[me] == 1 {
            return go(k + 1, cells, closures, flat, state, out);
        }
        state[me] = 2;
        go(k + 1, cells, closures, flat, state, out);
        state[me] = 0;
        if closures[k].iter().any(|&r| state[r] == 2) {
            return;
        }
        let changed: Vec<usize> = closures[k].iter().copied().filter(|&r| state[r] == 0).collect();
        for &r in &changed {
            state[r] = 1;
        }
        state[me] = 1;
        go(k + 1, cells, closures, flat, state, out);
        for &r in &changed {
            state[r] = 0;
        }
        state[me] = 0;
    }
    let mut out = Vec::new();
    let mut state = vec![0u8; x.total_cells()];
    go(0, &cells, &closures, &flat, &mut state, &mut out);
    out.into_iter()
        .map(|s| {
            (0..site.num_objects())
                .map(|c| (0..x.size(c as u32) as u32).filter(|&i| s[offset[c] + i as usize] == 1).collect())
                .collect()
        })
        .collect()
}

/// Natural families on a subpresheaf `S ⊆ Z`, valued in some presheaf.
struct Families {
    order: Vec<(u32, u32)>,
    down: Vec<Vec<(MorId, usize)>>,
    up: Vec<Vec<(MorId, usize)>>,
}

const UNSET: u32 = u32::MAX;

impl Families {
    fn new(z: &Presheaf, sub: &[Vec<u32>]) -> Families {
        let site = z.site();
        let mut order: Vec<(u32, u32)> =
            sub.iter().enumerate().flat_map(|(c, xs)| xs.iter().map(move |&x| (c as u32, x))).collect();
        order.sort_by_key(|&(c, x)| (site.level(c), c, x));
        let pos: HashMap<(u32, u32), usize> = order.iter().enumerate().map(|(k, &q)| (q, k)).collect();
        let mut down = vec![Vec::new(); order.len()];
        let mut up = vec![Vec::new(); order.len()];
        for (k, &(c, x)) in order.iter().enumerate() {
            for &f in site.incoming(c) {
                if site.is_identity(f) {
                    continue;
                }
                let r = pos[&(site.dom(f), z.apply(f, x))];
                down[k].push((f, r));
                up[r].push((f, k));
            }
        }
        Families { order, down, up }
    }

    /// Visits each family whose values pass `allowed`; stops when `visit`
    /// returns false and reports whether the enumeration ran to the end.
    fn run(&self, a: &Presheaf, allowed: &dyn Fn(u32, u32, u32) -> bool, visit: &mut dyn FnMut(&[u32]) -> bool) -> bool {
        let mut vals = vec![UNSET; self.order.len()];
        self.go(0, a, allowed, visit, &mut vals)
    }

    fn go(
        &self,
        k: usize,
        a: &Presheaf,
        allowed: &dyn Fn(u32, u32, u32) -> bool,
        visit: &mut dyn FnMut(&[u32]) -> bool,
        vals: &mut Vec<u32>,
    ) -> bool {
        if k == self.order.len() {
            return visit(vals);
        }
        let (c, x) = self.order[k];
        for v in 0..a.size(c) as u32 {
            if !allowed(c, x, v) {
                continue;
            }
            let fits = self.down[k].iter().all(|&(f, r)| vals[r] == UNSET || a.apply(f, v) == vals[r])
                && self.up[k].iter().all(|&(f, p)| vals[p] == UNSET || a.apply(f, vals[p]) == v);
            if !fits {
                continue;
            }
            vals[k] = v;
            let go_on = self.go(k + 1, a, allowed, visit, vals);
            vals[k] = UNSET;
            if !go_on {
                return false;
            }
        }
        true
    }

    fn count(&self, a: &Presheaf) -> u64 {
        let mut n = 0;
        self.run(a, &|_, _, _| true, &mut |_| {
            n += 1;
            true
        });
        n
    }
}

/// Right lifting against every sieve inclusion `S ↪ y(c)`, decided by
/// enumerating each boundary problem and searching for a filler.
fn lifts_against_sieves(f: &NatTrans) -> bool {
    let (x, y) = (f.src(), f.tgt());
    let site = x.site().clone();
    for c in 0..site.num_objects() as u32 {
        let yc = representable(&site, c);
        for s in subpresheaves(&yc) {
            let fam = Families::new(&yc, &s);
            for yv in 0..y.size(c) as u32 {
                let over = |d: u32, h: u32, v: u32| f.apply(d, v) == y.apply(site.hom(d, c)[h as usize], yv);
                let complete = fam.run(x, &over, &mut |vals| {
                    (0..x.size(c) as u32).any(|xv| {
                        f.apply(c, xv) == yv
                            && fam.order.iter().zip(vals).all(|(&(d, h), &v)| x.apply(site.hom(d, c)[h as usize], xv) == v)
                    })
                });
                if !complete {
                    return false;
                }
            }
        }
    }
    true
}

fn endpoint_mor(site: &Site, eps: bool) -> MorId {
    site.cube_mor(&CubeMap::endpoint(eps)).unwrap()
}

/// Components of the 1-skeleton by union-find.
fn components(x: &Presheaf) -> usize {
    let site = x.site();
    let (d0, d1) = (endpoint_mor(site, false), endpoint_mor(site, true));
    let mut parent: Vec<usize> = (0..x.size(0)).collect();
    fn find(p: &mut Vec<usize>, a: usize) -> usize {
        let mut r = a;
        while p[r] != r {
            r = p[r];
        }
        p[a] = r;
        r
    }
    for e in 0..x.size(1) as u32 {
        let (a, b) = (find(&mut parent, x.apply(d0, e) as usize), find(&mut parent, x.apply(d1, e) as usize));
        parent[a] = b;
    }
    (0..x.size(0)).filter(|&v| find(&mut parent, v) == v).count()
}

/// Functors between finite categories by brute force over morphism images.
fn count_functors(c: &FinCat, d: &FinCat) -> u64 {
    let nc = c.num_objects();
    let mut count = 0;
    let mut objs = vec![0u32; nc];
    loop {
        let mut image: Vec<MorId> = vec![0; c.num_morphisms()];
        let non_id: Vec<MorId> = (0..c.num_morphisms() as MorId).filter(|&f| !c.is_identity(f)).collect();
        for a in 0..nc as u32 {
            image[c.id(a) as usize] = d.id(objs[a as usize]);
        }
        fn assign(k: usize, non_id: &[MorId], c: &FinCat, d: &FinCat, objs: &[u32], image: &mut Vec<MorId>, count: &mut u64) {
            if k == non_id.len() {
                let ok = (0..c.num_morphisms() as MorId).all(|g| {
                    (0..c.num_morphisms() as MorId).all(|f| match c.try_compose(g, f) {
                        Some(gf) => d.compose(image[g as usize], image[f as usize]) == image[gf as usize],
                        None => true,
                    })
                });
                *count += ok as u64;
                return;
            }
            let f = non_id[k];
            for &h in d.hom(objs[c.dom(f) as usize], objs[c.cod(f) as usize]) {
                image[f as usize] = h;
                assign(k + 1, non_id, c, d, objs, image, count);
            }
        }
        assign(0, &non_id, c, d, &objs, &mut image, &mut count);
        let mut i = 0;
        loop {
            if i == nc {
                return count;
            }
            objs[i] += 1;
            if (objs[i] as usize) < d.num_objects() {
                break;
            }
            objs[i] = 0;
            i += 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// A reflexive graph on `□≤1` with `a` vertices, a degenerate loop on each,
/// and one edge `src[j] -> tgt[j]` for each `j`.
fn reflexive_graph(site: &Site, a: usize, src: &[u32], tgt: &[u32]) -> Psh {
    let b = a + src.len();
    let face = |eps: bool, j: usize| -> u32 {
        if j < a {
            j as u32
        } else if eps {
            tgt[j - a]
        } else {
            src[j - a]
        }
    };
    let act = (0..site.num_morphisms() as MorId)
        .map(|f| {
            let m = site.cube_map(f).unwrap();
            match (m.src(), m.tgt(), m.entries()) {
                (0, 0, _) => (0..a as u32).collect(),
                (0, 1, [e]) => (0..b).map(|j| face(*e == Entry::One, j)).collect(),
                (1, 0, _) => (0..a as u32).collect(),
                (1, 1, [Entry::Var(_)]) => (0..b as u32).collect(),
                (1, 1, [e]) => (0..b).map(|j| face(*e == Entry::One, j)).collect(),
                _ => unreachable!("□≤1 has no other maps"),
            }
        })
        .collect();
    Presheaf::new(site.clone(), vec![a, b], act).unwrap().into_psh()
}

fn small_graphs(site: &Site) -> Vec<(String, Psh)> {
    let mut out = vec![("empty".to_string(), reflexive_graph(site, 0, &[], &[]))];
    for a in 1..=3usize {
        for extra in 0..=(3 - a) {
            let mut choice = vec![0usize; extra];
            loop {
                let src: Vec<u32> = choice.iter().map(|&k| (k / a) as u32).collect();
                let tgt: Vec<u32> = choice.iter().map(|&k| (k % a) as u32).collect();
                out.push((format!("V{a}E{src:?}->{tgt:?}"), reflexive_graph(site, a, &src, &tgt)));
                // next choice, nondecreasing to skip reorderings
                let mut i = extra;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if choice[i] + 1 < a * a {
                        choice[i] += 1;
                        for j in i + 1..extra {
                            choice[j] = choice[i];
                        }
                        i = usize::MAX;
                        break;
                    }
                }
                if i != usize::MAX {
                    break;
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

struct Suite {
    by_name: BTreeMap<String, CheckReport>,
    first_digests: Vec<String>,
    second_digests: Vec<String>,
    wall: Duration,
}

impl Suite {
    fn get(&self, name: &str) -> Result<&CheckReport, String> {
        self.by_name.get(name).ok_or_else(|| format!("the suite has no {name} report"))
    }

    fn wall_of(&self, name: &str) -> Duration {
        Duration::from_millis(self.by_name.get(name).and_then(|r| r.wall_ms).unwrap_or(0))
    }
}

fn passed(r: &CheckReport) -> Result<(), String> {
    ensure(r.passed(), || format!("{} is {:?}: {:?}", r.check, r.verdict, first_failure(r)))
}

fn first_failure(r: &CheckReport) -> Vec<String> {
    if !r.details.is_empty() && r.verdict != Verdict::Pass {
        return r.details.clone();
    }
    r.parts.iter().find(|p| !p.passed()).map(first_failure).unwrap_or_default()
}

fn c1_cube_homs() -> Outcome {
    let t = Instant::now();
    for m in 0..=4usize {
        for n in 0..=4usize {
            let maps: Vec<CubeMap> = hom(m, n).collect();
            let distinct: BTreeSet<String> = maps.iter().map(|f| format!("{:?}", f.entries())).collect();
            let well_formed = maps.iter().all(|f| {
                f.src() == m
                    && f.entries().len() == n
                    && f.entries().iter().all(|e| !matches!(e, Entry::Var(k) if *k == 0 || *k as usize > m))
            });
            let expected = (m + 2).pow(n as u32);
            ensure(well_formed, || format!("malformed map in □([{m}],[{n}])"))?;
            ensure(distinct.len() == maps.len() && maps.len() == expected, || {
                format!("|□([{m}],[{n}])| = {} ({} distinct), expected {expected}", maps.len(), distinct.len())
            })?;
        }
    }
    let site = lib(build_site(4))?;
    for m in 0..=4u32 {
        for n in 0..=4u32 {
            let expected = (m as usize + 2).pow(n);
            ensure(site.hom(m, n).len() == expected, || format!("site hom([{m}],[{n}]) has {}", site.hom(m, n).len()))?;
        }
    }
    within(t.elapsed(), Duration::from_secs(1), "hom counting")?;
    Ok(format!("25 hom-sets in {:?}", t.elapsed()))
}

fn c2_binomial() -> Outcome {
    let t = Instant::now();
    for n in [2usize, 3] {
        passed(&lib(check_binomial(n, &mut budget()))?)?;
        let site = lib(build_site(n))?;
        let i = representable(&site, 1);
        let ii = lib(exponential(&i, &i, &mut budget()))?.obj;
        for k in 0..n {
            // y[k] × I = y[k+1], so I^I[k] = □([k+1],[1]).
            let direct = hom(k + 1, 1).count();
            ensure(direct == k + 3 && ii.size(k as u32) == k + 3, || {
                format!("N={n}: I^I[{k}] = {} and □([{}],[1]) = {direct}, expected {}", ii.size(k as u32), k + 1, k + 3)
            })?;
        }
    }
    within(t.elapsed(), Duration::from_secs(10), "binomial")?;
    Ok(format!("N=2,3 in {:?}", t.elapsed()))
}

fn c3_root(s: &Suite) -> Outcome {
    let t = Instant::now();
    let site = lib(build_site(2))?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..20 {
        let x = lib(random_presheaf(&site, &mut rng, Shape { generators: 2, max_level: 2, gluings: 2 }))?;
        let r = lib(root(&x, &mut budget()))?;
        for n in 0..=2usize {
            let expected: u128 = (0..=n).map(|j| (x.size(j as u32) as u128).pow(binomial(n, j) as u32)).product();
            ensure(r.obj.size(n as u32) as u128 == expected, || {
                format!("sample {k}: |X_I[{n}]| = {}, expected {expected} from {:?}", r.obj.size(n as u32), x.sizes())
            })?;
        }
        if k < 5 {
            let a = lib(random_presheaf(&site, &mut rng, Shape { generators: 1, max_level: 1, gluings: 0 }))?;
            passed(&lib(check_root_adjunction(&a, &x, &mut budget()))?)?;
        }
    }
    let rep = s.get("root-adjunction")?;
    passed(rep)?;
    ensure(rep.parts.len() >= 20, || format!("{} transpose samples", rep.parts.len()))?;
    within(t.elapsed() + s.wall_of("root-adjunction"), Duration::from_secs(60), "root")?;
    Ok(format!("20 size checks, {} transpose samples", rep.parts.len() + 5))
}

fn c4_leibniz(s: &Suite) -> Outcome {
    let r = s.get("leibniz")?;
    passed(r)?;
    let (yes, no) = (r.counters["lifting_triples"], r.counters["non_lifting_triples"]);
    ensure(r.parts.len() >= 50, || format!("{} triples", r.parts.len()))?;
    ensure(r.parts.iter().all(|p| p.verdict == Verdict::Pass), || "a triple disagreed or ran out of budget".into())?;
    ensure(yes > 0 && no > 0, || format!("lifting {yes}, non-lifting {no}: one side is untested"))?;
    within(s.wall_of("leibniz"), Duration::from_secs(300), "leibniz")?;
    Ok(format!("{} triples, 0 disagreements ({yes} lifting, {no} not)", r.parts.len()))
}

fn c5_classifier() -> Outcome {
    let t = Instant::now();
    let site = lib(build_site(1))?;
    let class = CofibrationClass::all_monos(&site);
    let graphs = small_graphs(&site);
    let mut checked = 0u64;
    for (an, a) in &graphs {
        let b = &mut budget();
        let p1 = lib(plus(a, &class, b))?;
        // |A⁺(c)| = Σ over sieves S on y(c) of |Hom(S, A)|
        for c in 0..2u32 {
            let yc = representable(&site, c);
            let expected: u64 = subpresheaves(&yc).iter().map(|s| Families::new(&yc, s).count(a)).sum();
            ensure(p1.obj.size(c) as u64 == expected, || format!("|{an}⁺[{c}]| = {}, expected {expected}", p1.obj.size(c)))?;
        }
        for (zn, z) in &graphs {
            let h = NatTrans::to_terminal(z);
            for sub in subpresheaves(z) {
                let so = lib(Subobject::new(z, &sub))?;
                let (sp, m) = so.to_presheaf();
                let fam = Families::new(z, &sub);
                let mut maps = Vec::new();
                fam.run(a, &|_, _, _| true, &mut |vals| {
                    let at: HashMap<(u32, u32), u32> = fam.order.iter().copied().zip(vals.iter().copied()).collect();
                    let comp = (0..2u32).map(|c| (0..sp.size(c) as u32).map(|i| at[&(c, m.apply(c, i))]).collect()).collect();
                    maps.push(comp);
                    true
                });
                for comp in maps {
                    let g = lib(NatTrans::new(sp.clone(), a.clone(), comp))?;
                    let r = lib(check_classifier(&p1, &m, &g, &h, &mut budget()))?;
                    ensure(r.passed() && r.counters["classifiers"] == 1, || {
                        format!("partial map {zn} ↢ {:?} -> {an}: {:?}", sub, r.details)
                    })?;
                    checked += 1;
                }
            }
        }
        let p2 = lib(plus_over(&p1.proj, &class, b))?;
        let p3 = lib(plus_over(&p2.proj, &class, b))?;
        passed(&lib(check_monad_laws(&p1, &p2, &p3))?).map_err(|e| format!("{an}: {e}"))?;
    }
    within(t.elapsed(), Duration::from_secs(60), "classifier")?;
    Ok(format!("{} presheaves, {checked} partial maps classified uniquely, monad laws hold", graphs.len()))
}

fn c6_tfib(s: &Suite) -> Outcome {
    let t = Instant::now();
    let r = s.get("tfib-equiv")?;
    passed(r)?;
    ensure(r.parts.len() >= 30, || format!("{} maps", r.parts.len()))?;
    let refutations: Vec<&CheckReport> =
        r.parts.iter().filter(|p| p.params.get("verdict") == Some(&serde_json::json!(false))).collect();
    ensure(refutations.len() >= 5, || format!("{} refutations", refutations.len()))?;
    ensure(refutations.iter().all(|p| p.params.get("refutation").is_some_and(|w| !w.is_null())), || {
        "a refutation has no witness".into()
    })?;

    // Library verdicts against the sieve-lifting oracle on maps drawn here.
    let site = lib(build_site(2))?;
    let class = CofibrationClass::all_monos(&site);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut yes, mut no) = (0, 0);
    for i in 0..30 {
        let shape = Shape { generators: 2, max_level: 1, gluings: 2 };
        let x = lib(random_presheaf(&site, &mut rng, shape))?;
        let f = if i % 2 == 0 {
            NatTrans::to_terminal(&x)
        } else {
            let y = lib(random_presheaf(&site, &mut rng, shape))?;
            lib(random_map(&x, &y, &mut rng, &mut budget()))?.unwrap_or_else(|| NatTrans::to_terminal(&x))
        };
        // X × K(2) -> X, a pullback of K(2) -> 1, gives positives.
        let f = if i % 5 == 0 {
            let k2 = lib(codiscrete(&site, 0, 2))?.into_psh();
            lib(product(&x, &k2))?.proj[0].clone()
        } else {
            f
        };
        let oracle = lifts_against_sieves(&f);
        let verdict = lib(trivial_fibration_structure(&f, &class, &mut budget()))?.verdict();
        ensure(verdict == Some(oracle), || format!("map {i}: library says {verdict:?}, lifting oracle says {oracle}"))?;
        if oracle {
            yes += 1
        } else {
            no += 1
        }
    }
    ensure(yes > 0 && no >= 5, || format!("oracle sample has {yes} tfibs and {no} refutations"))?;
    within(t.elapsed() + s.wall_of("tfib-equiv"), Duration::from_secs(600), "tfib equivalence")?;
    Ok(format!(
        "{} maps tri-equivalent, {} refutations with witnesses; oracle agrees on 30 more ({yes} tfibs)",
        r.parts.len(),
        refutations.len()
    ))
}

fn c7_routes(s: &Suite) -> Outcome {
    let r = s.get("fib-check")?;
    passed(r)?;
    ensure(r.parts.len() >= 10, || format!("{} maps", r.parts.len()))?;
    let expected = [true, true, true, false, false];
    for (i, want) in expected.iter().enumerate() {
        let got = r.parts[i].params.get("verdict").cloned();
        ensure(got == Some(serde_json::json!(want)), || format!("fixed map {i}: verdict {got:?}, expected {want}"))?;
    }
    for p in &r.parts {
        let (a, b) = (p.params.get("route_a"), p.params.get("route_b"));
        ensure(a.is_some() && a == b, || format!("routes disagree: {a:?} vs {b:?}"))?;
        if p.params.get("verdict") == Some(&serde_json::json!(true)) {
            ensure(p.counters.get("biased_derivations").copied().unwrap_or(0) >= 1, || "a fibration lacks a biased derivation".into())?;
            ensure(p.parts.iter().all(|d| d.passed()), || "a biased derivation failed".into())?;
        }
    }
    within(s.wall_of("fib-check"), Duration::from_secs(1800), "fib-check")?;
    Ok(format!(
        "{} maps, routes agree, {} fibrations, {} biased derivations checked",
        r.parts.len(),
        r.counters["fibrations"],
        r.counters["biased_derivations"]
    ))
}

fn c8_pi0(s: &Suite) -> Outcome {
    let t = Instant::now();
    let r = s.get("pi0-products")?;
    passed(r)?;
    let site = lib(build_site(2))?;
    let i = representable(&site, 1);
    let two = points(&site, 2);
    ensure(components(&i) == 1 && lib(pi0(&i))?.count == 1, || "π₀(I) ≠ 1".into())?;
    ensure(components(&two) == 2 && lib(pi0(&two))?.count == 2, || "π₀(1+1) ≠ 2".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..30 {
        let shape = Shape { generators: 3, max_level: 2, gluings: 2 };
        let x = lib(random_presheaf(&site, &mut rng, shape))?;
        let y = lib(random_presheaf(&site, &mut rng, shape))?;
        let xy = lib(product(&x, &y))?.obj;
        let (cx, cy, cxy) = (components(&x), components(&y), components(&xy));
        ensure(cxy == cx * cy, || format!("pair {k}: union-find gives {cxy} ≠ {cx}·{cy}"))?;
        ensure(lib(pi0(&x))?.count == cx && lib(pi0(&xy))?.count == cxy, || format!("pair {k}: library π₀ disagrees"))?;
    }
    within(t.elapsed() + s.wall_of("pi0-products"), Duration::from_secs(10), "π₀")?;
    Ok(format!("{} + 30 product pairs, π₀(I)=1, π₀(1+1)=2", r.parts.len()))
}

fn c9_fillers(s: &Suite) -> Outcome {
    let r = s.get("premodel-suite")?;
    let rel = r.parts.iter().find(|p| p.check == "homotopy-relation").ok_or("no homotopy-relation part")?;
    passed(rel)?;
    // Ω is certified fibrant (else the part fails). Maps 1 -> Ω are points
    // of Ω[0]; two are homotopic exactly when an edge joins them.
    let site = lib(build_site(2))?;
    let omega = CofibrationClass::all_monos(&site).omega().obj.clone();
    let (d0, d1) = (endpoint_mor(&site, false), endpoint_mor(&site, true));
    let edges: BTreeSet<(u32, u32)> = (0..omega.size(1) as u32).map(|e| (omega.apply(d0, e), omega.apply(d1, e))).collect();
    let by_source: HashMap<String, u64> = rel
        .parts
        .iter()
        .map(|p| (p.params["x"].as_str().unwrap_or_default().to_string(), p.counters["homotopic_pairs"]))
        .collect();
    let one = edges.len() as u64;
    ensure(by_source.get("1") == Some(&one), || format!("homotopic points: {:?}, edge oracle {one}", by_source.get("1")))?;
    ensure(by_source.get("1+1") == Some(&(one * one)), || format!("homotopic pairs on 1+1: {:?}", by_source.get("1+1")))?;
    let triples = total(rel, "composable_triples");
    ensure(triples > 0, || "no transitivity box was filled".into())?;
    Ok(format!("K=Ω certified; {} symmetry and {triples} transitivity boxes filled", total(rel, "homotopic_pairs")))
}

fn c10_nerve(s: &Suite) -> Outcome {
    let t = Instant::now();
    let r = s.get("nerve-ff")?;
    passed(r)?;
    let cats = [("1", terminal_category()), ("2", arrow_category()), ("iso", walking_iso()), ("3-chain", chain(3))];
    let names: HashMap<&str, &FinCat> = cats.iter().map(|(n, c)| (*n, c)).collect();
    let mut pairs = 0;
    for p in r.parts.iter().filter(|p| p.check == "nerve-ff") {
        let pair = p.params["pair"].as_array().ok_or("pair param")?;
        let (cn, dn) = (pair[0].as_str().unwrap(), pair[1].as_str().unwrap());
        let expected = count_functors(names[cn], names[dn]);
        ensure(p.counters["natural_maps"] == expected && p.counters["functors"] == expected, || {
            format!("{cn} -> {dn}: {} natural maps, {expected} functors by brute force", p.counters["natural_maps"])
        })?;
        pairs += 1;
    }
    ensure(pairs == 16, || format!("{pairs} pairs"))?;
    ensure(r.params.get("nerve_of_2") == Some(&serde_json::json!([2, 3, 6])), || format!("N(𝟚) = {:?}", r.params.get("nerve_of_2")))?;
    let adjunctions = r.parts.iter().filter(|p| p.check != "nerve-ff").count();
    ensure(adjunctions >= 9, || format!("{adjunctions} ν-adjunction checks"))?;
    within(t.elapsed() + s.wall_of("nerve-ff"), Duration::from_secs(60), "nerve")?;
    Ok(format!("16 pairs fully faithful, {adjunctions} ν-adjunction checks, N(𝟚)₂ = 6"))
}

fn c11_universe(s: &Suite) -> Outcome {
    let low = lib(run_check("universe-omega", &CheckArgs { trunc: 1, ..CheckArgs::default() }))?;
    let high = s.get("universe-omega")?;
    for (n, r) in [(1usize, &low), (2, high)] {
        passed(r)?;
        let site = lib(build_site(n))?;
        for c in 0..=n as u32 {
            let sieves = subpresheaves(&representable(&site, c)).len() as u64;
            let got = r.counters[&format!("cells_at_{c}")];
            ensure(got == sieves, || format!("N={n}: |ν(Set₂^op)[{c}]| = {got}, sieve oracle {sieves}"))?;
        }
    }
    ensure(low.counters["cells_at_1"] == 5, || "|Ω[1]| ≠ 5".into())?;
    Ok(format!("ν(Set₂^op) ≅ Ω at N=1,2; |Ω[1]| = 5, |Ω[2]| = {}", high.counters["cells_at_2"]))
}

fn c12_closure(s: &Suite) -> Outcome {
    let r = s.get("tfib-closure")?;
    passed(r)?;
    for key in ["composites", "pullbacks", "pushforwards"] {
        ensure(total(r, key) > 0, || format!("no {key} were checked"))?;
    }
    ensure(r.parts.iter().any(|p| p.check == "weak-propositions" && p.passed()), || "no TFib(A)² → TFib(A) check".into())?;

    // The oracle confirms the closure on a few instances independently.
    let site = lib(build_site(2))?;
    let onto = lib(codiscrete_map(&site, 0, &[0, 1, 1], 2))?;
    let not_onto = lib(codiscrete_map(&site, 0, &[1], 2))?;
    ensure(lifts_against_sieves(&onto) && !lifts_against_sieves(&not_onto), || "codiscrete controls misjudged".into())?;
    let sq = lib(pullback(&onto, &onto))?;
    let composite = lib(sq.proj[0].then(&onto))?;
    ensure(lifts_against_sieves(&composite), || "a composite of tfibs does not lift".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let i = representable(&site, 1);
    let g = lib(random_map(&i, onto.tgt(), &mut rng, &mut budget()))?.ok_or("no map I -> K(2)")?;
    let pb = lib(pullback(&g, &onto))?;
    ensure(lifts_against_sieves(&pb.proj[0]), || "a pullback of a tfib does not lift".into())?;
    let two = points(&site, 2);
    let k2 = lib(codiscrete(&site, 0, 2))?.into_psh();
    let prod = lib(product(&two, &k2))?;
    let pf = lib(pushforward(&prod.proj[0], &NatTrans::to_terminal(&two), &mut budget()))?;
    ensure(lifts_against_sieves(&pf.to_base), || "a pushforward of a tfib does not lift".into())?;
    Ok(format!(
        "{} composites, {} pullbacks, {} pushforwards; weak propositions closed; oracle confirms 4 instances",
        total(r, "composites"),
        total(r, "pullbacks"),
        total(r, "pushforwards")
    ))
}

fn c13_determinism(s: &Suite) -> Outcome {
    ensure(s.first_digests == s.second_digests, || "digests differ between 4 workers and 1 worker".into())?;
    Ok(format!("{} digests identical across two runs (4 and 1 workers), suite {:?}", s.first_digests.len(), s.wall))
}

fn main() -> ExitCode {
    let entries = Manifest::all().resolve(&CheckArgs::default()).expect("the registry resolves");
    let started = Instant::now();
    let first = run_suite(&entries, 4).expect("the suite runs");
    let wall = started.elapsed();
    let second = run_suite(&entries, 1).expect("the suite runs again");
    let digests = |rs: &[CheckReport]| rs.iter().map(CheckReport::digest).collect::<Vec<_>>();
    let suite = Suite {
        first_digests: digests(&first),
        second_digests: digests(&second),
        by_name: entries.iter().map(|(n, _)| n.clone()).zip(second).collect(),
        wall,
    };

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("cube hom-set sizes", Box::new(c1_cube_homs)),
        ("I^I ≅ I+1 below the top level", Box::new(c2_binomial)),
        ("root sizes and transpose", Box::new(|| c3_root(&suite))),
        ("Leibniz adjunction", Box::new(|| c4_leibniz(&suite))),
        ("partial map classifier and monad", Box::new(c5_classifier)),
        ("trivial fibration tri-equivalence", Box::new(|| c6_tfib(&suite))),
        ("fibration routes and biased derivation", Box::new(|| c7_routes(&suite))),
        ("π₀ preserves products", Box::new(|| c8_pi0(&suite))),
        ("homotopy symmetry and transitivity", Box::new(|| c9_fillers(&suite))),
        ("nerve full faithfulness and ν-adjunction", Box::new(|| c10_nerve(&suite))),
        ("universe of propositions is Ω", Box::new(|| c11_universe(&suite))),
        ("trivial fibration closure", Box::new(|| c12_closure(&suite))),
        ("deterministic digests", Box::new(|| c13_determinism(&suite))),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} [{:?}]", k + 1, t.elapsed()),
            Err(msg) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
