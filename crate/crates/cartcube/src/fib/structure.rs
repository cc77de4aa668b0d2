//! Uniform fibration structures, found two independent ways.
//!
//! Route A searches fillers directly. A lifting problem of a basic generator
//! `c ⊗_i δ : B ↣ y[n+1]` against `p : E -> X` is a base cell `x ∈ X(n+1)`
//! and a section of `E` over the sieve `B` lying over `x`. These problems form
//! a presheaf `P` on `□≤N-1`: reindexing along `u : [m] -> [n]` pulls back
//! along `u × I`. A uniform structure is then a natural map from `P` to the
//! shifted presheaf `n ↦ E(n+1)` choosing a filler for every problem.
//!
//! Route B builds `δ ⇒ I*p` over the slice of the site over `I` and asks
//! whether it is a trivial fibration there.

use std::collections::HashMap;
use std::sync::Arc;

use serde_json::{json, Value};

use super::generators::{enumerate_generators, Mode};
use super::leibniz::pullback_hom_on;
use crate::certificate::Certificate;
use crate::cofib::{trivial_fibration_structure, CofibrationClass, TfibAnalysis};
use crate::error::{Error, Result};
use crate::fincat::{Functor, MorId, Site};
use crate::interval::{endpoint_cell, SlicedInterval};
use crate::presheaf::{terminal, yoneda, NatTrans, Presheaf, Psh, Subobject};
use crate::report::CheckReport;
use crate::search::{Budget, NatSearch};

/// The caveat every fibration verdict carries.
pub const FIBRANCY_CAVEAT: &str =
    "Truncated fibrancy is one-directionally sound: a refutation at valid levels refutes ambient fibrancy; a pass does not prove it.";

/// The shape of one basic generator, as a sieve on `[n+1]`.
#[derive(Clone, Debug)]
struct Shape {
    sieve: u32,
    index: u32,
    members: Vec<MorId>,
    /// Position of each member in `members`, indexed by morphism id.
    slot: Vec<u32>,
    domain: Subobject,
}

/// A lifting problem: a generator, a base cell, and a section over its sieve.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProblemCell {
    pub generator: u32,
    pub base: u32,
    pub section: Vec<u32>,
}

/// All lifting problems of basic generators against a map, as a presheaf.
#[derive(Clone, Debug)]
pub struct Problems {
    pub map: NatTrans,
    pub mode: Mode,
    /// `□≤N-1`, with its inclusion into the site of the map.
    pub sub: Site,
    pub inclusion: Functor,
    pub obj: Psh,
    /// `n ↦ E(n+1)` on `sub`.
    pub shifted: Psh,
    shapes: Vec<Vec<Shape>>,
    cells: Vec<Vec<ProblemCell>>,
    /// `u × I` in the site of the map, for each morphism `u` of `sub`.
    successor: Vec<MorId>,
}

fn unset() -> u32 {
    u32::MAX
}

impl Problems {
    /// Enumerates every problem of every generator with `n + 1 ≤ N`.
    pub fn new(p: &NatTrans, class: &CofibrationClass, mode: Mode, budget: &mut Budget) -> Result<Problems> {
        let site = p.src().site().clone();
        let depth = site.cube().map(|d| d.n).ok_or_else(|| Error::Input("fibrations need a cube site".into()))?;
        if depth < 1 {
            return Err(Error::Dimension("fibrations need N >= 1".into()));
        }
        if !class.site().same_as(&site) {
            return Err(Error::SiteMismatch);
        }
        let (e, x) = (p.src(), p.tgt());
        let keep = site.objects_up_to_level(depth - 1);
        let (sub, inclusion) = site.full_subcategory(&keep);
        let sub: Site = Arc::new(sub);
        let successor: Vec<MorId> = inclusion
            .mor
            .iter()
            .map(|&u| site.cube_mor(&site.cube_map(u).expect("cube site").successor()))
            .collect::<Result<_>>()?;

        let mut shapes: Vec<Vec<Shape>> = vec![Vec::new(); depth];
        for g in enumerate_generators(class, mode, depth)? {
            let (n, sieve, index) = g.basic.expect("basic");
            let members = g.members()?;
            let domain = g.sieve()?;
            let mut slot = vec![unset(); site.num_morphisms()];
            for (k, &h) in members.iter().enumerate() {
                slot[h as usize] = k as u32;
            }
            shapes[n].push(Shape { sieve, index, members, slot, domain });
        }

        let mut cells: Vec<Vec<ProblemCell>> = Vec::with_capacity(depth);
        for n in 0..depth {
            let mut here = Vec::new();
            for (gi, shape) in shapes[n].iter().enumerate() {
                let (tp, incl) = shape.domain.to_presheaf();
                let top = n as u32 + 1;
                for base in 0..x.size(top) as u32 {
                    let mut s = NatSearch::new(&tp, e)?;
                    for d in 0..site.num_objects() as u32 {
                        for z in 0..tp.size(d) as u32 {
                            let h = site.hom(d, top)[incl.apply(d, z) as usize];
                            let want = x.apply(h, base);
                            s.retain(d, z, |v| p.apply(d, v) == want);
                        }
                    }
                    s.for_each(budget, |comp| {
                        let mut section = vec![0u32; shape.members.len()];
                        for d in 0..site.num_objects() as u32 {
                            for (z, &v) in comp[d as usize].iter().enumerate() {
                                let h = site.hom(d, top)[incl.apply(d, z as u32) as usize];
                                section[shape.slot[h as usize] as usize] = v;
                            }
                        }
                        here.push(ProblemCell { generator: gi as u32, base, section });
                        true
                    })?;
                }
            }
            here.sort();
            cells.push(here);
        }

        let index: Vec<HashMap<&ProblemCell, u32>> =
            cells.iter().map(|l| l.iter().enumerate().map(|(i, k)| (k, i as u32)).collect()).collect();
        let gen_index: Vec<HashMap<(u32, u32), u32>> = shapes
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, s)| ((s.sieve, s.index), i as u32)).collect())
            .collect();
        let omega = class.omega();
        let mut act = Vec::with_capacity(sub.num_morphisms());
        for (u, &uu) in inclusion.mor.iter().enumerate() {
            let (m, n) = (site.dom(uu) as usize, site.cod(uu) as usize);
            let cu = site.cube_map(uu).expect("cube site");
            let us = successor[u];
            let mut t = Vec::with_capacity(cells[n].len());
            for cell in &cells[n] {
                let shape = &shapes[n][cell.generator as usize];
                let sieve = omega.obj.apply(uu, shape.sieve);
                let i = crate::cube::CubeMap::from_rank(n, 1, shape.index as usize).compose(cu)?.rank() as u32;
                let g = *gen_index[m]
                    .get(&(sieve, i))
                    .ok_or_else(|| Error::Malformed("generators are not closed under reindexing".into()))?;
                let target = &shapes[m][g as usize];
                let section =
                    target.members.iter().map(|&h| cell.section[shape.slot[site.compose(us, h) as usize] as usize]).collect();
                let key = ProblemCell { generator: g, base: x.apply(us, cell.base), section };
                t.push(*index[m].get(&key).ok_or_else(|| Error::Malformed("reindexed problem is missing".into()))?);
            }
            act.push(t);
        }
        let sizes = cells.iter().map(|l| l.len()).collect();
        let obj = Presheaf::from_parts(sub.clone(), sizes, act, e.validity(), e.intrinsic_only()).into_psh();
        let shifted = Presheaf::from_parts(
            sub.clone(),
            (1..=depth).map(|k| e.size(k as u32)).collect(),
            successor.iter().map(|&us| e.act(us).to_vec()).collect(),
            e.validity(),
            e.intrinsic_only(),
        )
        .into_psh();
        Ok(Problems { map: p.clone(), mode, sub, inclusion, obj, shifted, shapes, cells, successor })
    }

    pub fn cell(&self, n: u32, w: u32) -> &ProblemCell {
        &self.cells[n as usize][w as usize]
    }

    /// Sieve index and indexing rank of a generator at level `n`.
    pub fn generator(&self, n: u32, g: u32) -> (u32, u32) {
        let s = &self.shapes[n as usize][g as usize];
        (s.sieve, s.index)
    }

    /// Cells of `E(n+1)` filling problem `w`.
    pub fn fillers(&self, n: u32, w: u32) -> Vec<u32> {
        let e = self.map.src();
        let cell = self.cell(n, w);
        let shape = &self.shapes[n as usize][cell.generator as usize];
        (0..e.size(n + 1) as u32)
            .filter(|&j| {
                self.map.apply(n + 1, j) == cell.base
                    && shape.members.iter().zip(&cell.section).all(|(&h, &v)| e.apply(h, j) == v)
            })
            .collect()
    }

    pub fn problem_json(&self, n: u32, w: u32) -> Value {
        let cell = self.cell(n, w);
        let shape = &self.shapes[n as usize][cell.generator as usize];
        let site = self.map.src().site();
        json!({
            "level": n,
            "generator": {"sieve": shape.sieve, "indexing": site.cube_map(site.hom(n, 1)[shape.index as usize]).map(|c| c.to_string())},
            "base": cell.base,
            "section": shape.members.iter().zip(&cell.section)
                .map(|(&h, &v)| json!([site.morphism(h).name, v])).collect::<Vec<_>>(),
        })
    }

    /// Problem `w` at level `n` as the span `y[n+1] <- B -> E` of its
    /// generator's inclusion and its top map.
    pub fn span(&self, n: u32, w: u32) -> (NatTrans, NatTrans) {
        let e = self.map.src();
        let site = e.site();
        let cell = self.cell(n, w);
        let shape = &self.shapes[n as usize][cell.generator as usize];
        let (tp, incl) = shape.domain.to_presheaf();
        let comp = (0..site.num_objects() as u32)
            .map(|d| {
                (0..tp.size(d) as u32)
                    .map(|z| {
                        let h = site.hom(d, n + 1)[incl.apply(d, z) as usize];
                        cell.section[shape.slot[h as usize] as usize]
                    })
                    .collect()
            })
            .collect();
        let top = NatTrans::from_parts(tp, e.clone(), comp);
        (incl, top)
    }

    /// Whether the generator of problem `w` is an isomorphism.
    pub fn is_trivial(&self, n: u32, w: u32) -> bool {
        self.shapes[n as usize][self.cell(n, w).generator as usize].domain.is_full()
    }

    /// `u × I` for a morphism `u` of `sub`.
    pub fn successor(&self, u: MorId) -> MorId {
        self.successor[u as usize]
    }
}

/// A filler for every problem, natural in the problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrationStructure {
    pub mode: Mode,
    pub fillers: Vec<Vec<u32>>,
}

impl FibrationStructure {
    /// Checks each filler and the uniformity equation
    /// `j(u*c, iu, x(u×I)′, y(u×I)) = j(c, i, x, y) ∘ (u×I)` for every `u`.
    pub fn verify(&self, pr: &Problems) -> CheckReport {
        let mut r = CheckReport::new("fibration-structure").param("mode", self.mode.name());
        if self.mode != pr.mode || self.fillers.len() != pr.sub.num_objects() {
            r.fail("the structure does not match the problems", json!(null));
            return r;
        }
        let e = pr.map.src();
        for n in 0..pr.sub.num_objects() as u32 {
            if self.fillers[n as usize].len() != pr.obj.size(n) {
                r.fail("wrong number of fillers", json!({"level": n}));
                return r;
            }
            for w in 0..pr.obj.size(n) as u32 {
                let j = self.fillers[n as usize][w as usize];
                if !pr.fillers(n, w).contains(&j) {
                    r.fail("a stored value is not a filler", json!({"problem": pr.problem_json(n, w), "value": j}));
                    return r;
                }
            }
        }
        for u in 0..pr.sub.num_morphisms() as MorId {
            let (m, n) = (pr.sub.dom(u), pr.sub.cod(u));
            for w in 0..pr.obj.size(n) as u32 {
                let lhs = self.fillers[m as usize][pr.obj.apply(u, w) as usize];
                let rhs = e.apply(pr.successor(u), self.fillers[n as usize][w as usize]);
                if lhs != rhs {
                    r.fail(
                        "uniformity fails",
                        json!({"morphism": pr.sub.morphism(u).name, "problem": pr.problem_json(n, w), "lhs": lhs, "rhs": rhs}),
                    );
                    return r;
                }
            }
        }
        r.count("problems", pr.obj.total_cells() as u64);
        r
    }
}

/// Route A: a uniform choice of fillers, or the first problem with none.
#[derive(Clone, Debug)]
pub struct RouteA {
    pub problems: Problems,
    pub structure: Option<FibrationStructure>,
    pub report: CheckReport,
}

pub fn route_a(f: &NatTrans, class: &CofibrationClass, mode: Mode, budget: &mut Budget) -> Result<RouteA> {
    let mut r = CheckReport::new("route-a").param("mode", mode.name());
    let pr = Problems::new(f, class, mode, budget)?;
    r.count("problems", pr.obj.total_cells() as u64);
    let mut s = NatSearch::new(&pr.obj, &pr.shifted)?;
    let mut stuck = None;
    for n in 0..pr.sub.num_objects() as u32 {
        for w in 0..pr.obj.size(n) as u32 {
            budget.tick("fibration problems")?;
            let c = pr.fillers(n, w);
            if c.is_empty() && stuck.is_none() {
                stuck = Some((n, w));
            }
            s.restrict(n, w, c);
        }
    }
    let structure = if stuck.is_some() {
        None
    } else {
        s.first(budget)?.map(|fillers| FibrationStructure { mode, fillers })
    };
    match (&structure, stuck) {
        (Some(j), _) => r.push(j.verify(&pr)),
        (None, Some((n, w))) => r.fail("a lifting problem has no filler", json!({"problem": pr.problem_json(n, w)})),
        (None, None) => r.fail("every problem has a filler, but no choice is uniform", json!(null)),
    }
    Ok(RouteA { problems: pr, structure, report: r })
}

/// Route B: `δ ⇒ I*f` over the slice at levels `≤ N-1`, decided as a trivial
/// fibration for the monos there.
pub fn route_b(f: &NatTrans, budget: &mut Budget) -> Result<(TfibAnalysis, CheckReport)> {
    let site = f.src().site();
    let depth = site.cube().map(|d| d.n).ok_or_else(|| Error::Input("fibrations need a cube site".into()))?;
    let mut r = CheckReport::new("route-b");
    let si = SlicedInterval::over(site)?;
    let pf = si.el.pull_map(f);
    let keep = si.el.cat.objects_up_to_level(depth - 1);
    let ph = pullback_hom_on(&si.delta, &pf, &keep, budget)?;
    r.count("slice_objects", keep.len() as u64);
    r.count("pullback_hom_cells", ph.map.src().total_cells() as u64);
    let class = CofibrationClass::all_monos(ph.map.src().site());
    let t = trivial_fibration_structure(&ph.map, &class, budget)?;
    match t.verdict() {
        Some(true) => {}
        Some(false) => r.fail("δ ⇒ I*f is not a trivial fibration", t.report.witness.clone().unwrap_or(Value::Null)),
        None => r.fail("the trivial-fibration characterizations disagree", json!(null)),
    }
    r.push(t.report.clone());
    Ok((t, r))
}

/// The biased check by pullback-hom: `δ_ε ⇒ f` at levels `≤ N-1` as a
/// trivial fibration.
pub fn biased_pullback_hom(f: &NatTrans, eps: bool, budget: &mut Budget) -> Result<TfibAnalysis> {
    let site = f.src().site();
    let depth = site.cube().map(|d| d.n).ok_or_else(|| Error::Input("fibrations need a cube site".into()))?;
    let one = terminal(site).into_psh();
    let i = yoneda(site, 1).into_psh();
    let comp = (0..site.num_objects()).map(|n| vec![endpoint_cell(n, eps)]).collect();
    let d = NatTrans::new(one, i, comp)?;
    let ph = pullback_hom_on(&d, f, &site.objects_up_to_level(depth - 1), budget)?;
    let class = CofibrationClass::all_monos(ph.map.src().site());
    trivial_fibration_structure(&ph.map, &class, budget)
}

/// Restricts an unbiased structure to the problems of a biased mode.
pub fn derive_biased(unbiased: &Problems, j: &FibrationStructure, biased: &Problems) -> Result<FibrationStructure> {
    let mut fillers = Vec::with_capacity(biased.sub.num_objects());
    for n in 0..biased.sub.num_objects() as u32 {
        let lookup: HashMap<(u32, u32, u32, &[u32]), u32> = (0..unbiased.obj.size(n) as u32)
            .map(|w| {
                let c = unbiased.cell(n, w);
                let (s, i) = unbiased.generator(n, c.generator);
                ((s, i, c.base, c.section.as_slice()), w)
            })
            .collect();
        let mut t = Vec::with_capacity(biased.obj.size(n));
        for w in 0..biased.obj.size(n) as u32 {
            let c = biased.cell(n, w);
            let (s, i) = biased.generator(n, c.generator);
            let u = lookup
                .get(&(s, i, c.base, c.section.as_slice()))
                .ok_or_else(|| Error::Malformed("a biased problem is not an unbiased one".into()))?;
            t.push(j.fillers[n as usize][*u as usize]);
        }
        fillers.push(t);
    }
    Ok(FibrationStructure { mode: biased.mode, fillers })
}

/// Which routes [`fibration_structure`] runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    A,
    B,
    Both,
}

impl Route {
    pub fn by_name(s: &str) -> Result<Route> {
        match s {
            "a" | "A" => Ok(Route::A),
            "b" | "B" => Ok(Route::B),
            "both" => Ok(Route::Both),
            other => Err(Error::Input(format!("unknown route `{other}`"))),
        }
    }
}

/// The outcome of [`fibration_structure`].
#[derive(Clone, Debug)]
pub struct FibAnalysis {
    pub structure: Option<FibrationStructure>,
    pub route_a: Option<bool>,
    pub route_b: Option<bool>,
    pub report: CheckReport,
}

impl FibAnalysis {
    /// The common verdict of the routes that ran, or `None` if they disagree.
    pub fn verdict(&self) -> Option<bool> {
        match (self.route_a, self.route_b) {
            (Some(a), Some(b)) if a != b => None,
            (Some(a), _) => Some(a),
            (None, b) => b,
        }
    }
}

/// Decides whether `f` carries a uniform fibration structure of the given
/// mode, at the levels where the truncation is exact (`≤ N-1`).
///
/// Route B uses all monos of the slice, so it requires the class to be all
/// monos. When an unbiased structure is found, the biased structures for
/// both endpoints are derived from it and verified, and `δ_ε ⇒ f` is checked
/// to be a trivial fibration.
pub fn fibration_structure(
    f: &NatTrans,
    class: &CofibrationClass,
    mode: Mode,
    route: Route,
    budget: &mut Budget,
) -> Result<FibAnalysis> {
    let site = f.src().site();
    let depth = site.cube().map(|d| d.n).ok_or_else(|| Error::Input("fibrations need a cube site".into()))?;
    let valid = f.src().validity().min(f.tgt().validity()).min(depth);
    if valid < 1 {
        return Err(Error::ValidityUnderflow("fibration checks need validity at least 1".into()));
    }
    // Work on the levels the inputs are valid for.
    let f = if valid < depth { f.truncate(valid)? } else { f.clone() };
    let class = if valid < depth { CofibrationClass::by_name(f.src().site(), class.name())? } else { class.clone() };
    let mut r = CheckReport::new("fib-check").param("mode", mode.name()).param("class", class.name());
    r.validity = Some(valid - 1);
    r.caveat(FIBRANCY_CAVEAT);
    let used = budget.used();

    let mut structure = None;
    let mut verdict_a = None;
    let mut problems = None;
    if route != Route::B {
        let a = route_a(&f, &class, mode, budget)?;
        verdict_a = Some(a.structure.is_some());
        structure = a.structure.clone();
        r.push(a.report);
        problems = Some(a.problems);
    }
    let mut verdict_b = None;
    if route != Route::A {
        if class.name() != "all-monos" {
            return Err(Error::Input("route B is available for the all-monos class only".into()));
        }
        let (t, part) = match mode {
            Mode::Unbiased => route_b(&f, budget)?,
            Mode::Biased(eps) => {
                let t = biased_pullback_hom(&f, eps, budget)?;
                let mut part = CheckReport::new("route-b");
                if t.verdict() != Some(true) {
                    part.fail("δ_ε ⇒ f is not a trivial fibration", t.report.witness.clone().unwrap_or(Value::Null));
                }
                part.push(t.report.clone());
                (t, part)
            }
        };
        verdict_b = t.verdict();
        r.push(part);
        if verdict_b.is_none() {
            r.fail("route B is internally inconsistent", json!(null));
        }
    }
    if let (Some(a), Some(b)) = (verdict_a, verdict_b) {
        r.require(a == b, "route A and route B disagree", || json!({"route_a": a, "route_b": b}));
    }

    if let (Mode::Unbiased, Some(j), Some(pr)) = (mode, &structure, &problems) {
        let mut part = CheckReport::new("biased-derivation");
        for eps in [false, true] {
            let bp = Problems::new(&f, &class, Mode::Biased(eps), budget)?;
            let jb = derive_biased(pr, j, &bp)?;
            part.push(jb.verify(&bp));
            if class.name() == "all-monos" {
                let t = biased_pullback_hom(&f, eps, budget)?;
                part.require(t.verdict() == Some(true), format!("δ_{} ⇒ f is not a trivial fibration", eps as u8), || {
                    t.report.witness.clone().unwrap_or(Value::Null)
                });
            }
        }
        r.push(part);
    }

    if let Some(j) = &structure {
        r.certificate = Some(Certificate::fibration(&f, class.name(), j).to_json());
    }
    let fibrant = verdict_a.or(verdict_b);
    r.set_param("fibration", json!(fibrant));
    if fibrant == Some(false) && r.passed() {
        r.fail("not a fibration", json!(null));
    }
    r.count("nodes", budget.used() - used);
    Ok(FibAnalysis { structure, route_a: verdict_a, route_b: verdict_b, report: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;
    use crate::interval::IntervalKit;
    use crate::presheaf::coproduct;

    fn run(f: &NatTrans) -> FibAnalysis {
        let class = CofibrationClass::all_monos(f.src().site());
        fibration_structure(f, &class, Mode::Unbiased, Route::Both, &mut Budget::default()).unwrap()
    }

    #[test]
    fn terminal_and_discrete_objects_are_fibrant() {
        for n in 1..=2 {
            let s = build_site(n).unwrap();
            let one = terminal(&s).into_psh();
            let two = coproduct(&one, &one).obj;
            for x in [&one, &two] {
                let a = run(&NatTrans::to_terminal(x));
                assert_eq!(a.verdict(), Some(true), "{:#?}", a.report);
                assert!(a.report.passed());
                assert_eq!(a.report.caveats, vec![FIBRANCY_CAVEAT.to_string()]);
                let cert = Certificate::from_json(a.report.certificate.as_ref().unwrap()).unwrap();
                assert!(cert.verify().unwrap().passed());
            }
        }
    }

    #[test]
    fn endpoint_inclusion_is_not_a_fibration() {
        let s = build_site(2).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        let a = run(&kit.delta0);
        assert_eq!(a.verdict(), Some(false), "{:#?}", a.report);
        assert_eq!(a.route_a, a.route_b);
        assert!(!a.report.passed());
    }

    #[test]
    fn the_two_routes_agree_on_the_interval() {
        let s = build_site(2).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        for f in [NatTrans::to_terminal(&kit.i), kit.boundary.clone(), NatTrans::identity(&kit.i)] {
            let a = run(&f);
            assert!(a.verdict().is_some(), "{:#?}", a.report);
        }
    }

    #[test]
    fn biased_modes_run_both_routes() {
        let s = build_site(2).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        let class = CofibrationClass::all_monos(&s);
        for eps in [false, true] {
            let f = NatTrans::to_terminal(&kit.i);
            let a = fibration_structure(&f, &class, Mode::Biased(eps), Route::Both, &mut Budget::default()).unwrap();
            assert!(a.verdict().is_some(), "{:#?}", a.report);
        }
    }

    #[test]
    fn low_validity_is_an_error() {
        let s = build_site(2).unwrap();
        let x = terminal(&s).with_validity(0, false).into_psh();
        let class = CofibrationClass::all_monos(&s);
        let r = fibration_structure(&NatTrans::to_terminal(&x), &class, Mode::Unbiased, Route::Both, &mut Budget::default());
        assert!(matches!(r, Err(Error::ValidityUnderflow(_))));
    }
}
