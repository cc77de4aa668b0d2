//! The interval `I = y[1]`, its path object `X^I`, and the root `X_I`.
//!
//! The path object is the shift `X^I(n) = X(n+1)`. At the top level `N` of
//! `□≤N` the value `X(N+1)` is not available, so it is replaced by the
//! skeletal extension: classes of pairs `(a ∈ X(k), u : [N+1] -> [k])`
//! modulo `(X(v)a, u) ~ (a, v∘u)`. With that choice `(−)^I ⊣ (−)_I` holds
//! exactly on `□≤N`, while agreement with the untruncated path object is
//! only claimed one level below the input's validity.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use serde_json::json;

use crate::cube::{hom, CubeMap, Entry};
use crate::error::{Error, Result};
use crate::fincat::{MorId, Site};
use crate::nerve::Elements;
use crate::presheaf::{
    coproduct, enumerate_nat_trans, exponential, iso_search, product, terminal, yoneda, Colimit, Limit, NatTrans,
    Presheaf, Psh, Subobject,
};
use crate::report::CheckReport;
use crate::search::{Budget, Components, NatSearch};

fn cube_depth(site: &Site) -> Result<usize> {
    site.cube().map(|d| d.n).ok_or_else(|| Error::Input("a cube site is required".into()))
}

/// The point `ε` of `I` at level `n`, as an index into `hom([n], [1])`.
pub fn endpoint_cell(n: usize, eps: bool) -> u32 {
    if eps {
        n as u32 + 1
    } else {
        0
    }
}

/// The interval with its endpoints, boundary and diagonal.
#[derive(Clone, Debug)]
pub struct IntervalKit {
    pub site: Site,
    pub one: Psh,
    pub i: Psh,
    pub delta0: NatTrans,
    pub delta1: NatTrans,
    pub two: Colimit,
    pub boundary: NatTrans,
    pub square: Limit,
    pub diagonal: NatTrans,
}

impl IntervalKit {
    pub fn new(site: &Site) -> Result<IntervalKit> {
        let n = cube_depth(site)?;
        if n < 1 {
            return Err(Error::Dimension("the interval needs N >= 1".into()));
        }
        let one = terminal(site).into_psh();
        let i = yoneda(site, 1).into_psh();
        let point = |eps| {
            let comp = (0..=n).map(|k| vec![endpoint_cell(k, eps)]).collect();
            NatTrans::new(one.clone(), i.clone(), comp)
        };
        let delta0 = point(false)?;
        let delta1 = point(true)?;
        let two = coproduct(&one, &one);
        let boundary = two.copair(&[delta0.clone(), delta1.clone()])?;
        let square = product(&i, &i)?;
        let diagonal = square.pair(&[NatTrans::identity(&i), NatTrans::identity(&i)])?;
        Ok(IntervalKit { site: site.clone(), one, i, delta0, delta1, two, boundary, square, diagonal })
    }

    pub fn endpoint(&self, eps: bool) -> &NatTrans {
        if eps {
            &self.delta1
        } else {
            &self.delta0
        }
    }

    /// The structural invariants of an interval.
    pub fn check(&self) -> CheckReport {
        let mut r = CheckReport::new("interval-kit").param("N", self.site.depth());
        r.require(!self.delta0.same_as(&self.delta1), "endpoints coincide", || json!(null));
        r.require(self.boundary.is_mono(), "boundary is not mono", || json!(null));
        r.require(self.diagonal.is_mono(), "diagonal is not mono", || json!(null));
        if let Some(pb) = r.absorb("pullback", crate::presheaf::pullback(&self.delta0, &self.delta1)) {
            r.require(pb.obj.is_empty(), "endpoints intersect", || json!(pb.obj.sizes()));
        }
        let d0 = Subobject::image(&self.delta0);
        let d1 = Subobject::image(&self.delta1);
        let join = d0.union(&d1).expect("same ambient");
        r.require(join == Subobject::image(&self.boundary), "boundary is not the join of the endpoints", || {
            json!(join.sizes())
        });
        let p = &self.square.proj;
        if let Some(eq) = r.absorb("equalizer", crate::presheaf::equalizer(&p[0], &p[1])) {
            let img = Subobject::image(&eq.proj[0]);
            r.require(img == Subobject::image(&self.diagonal), "diagonal is not the equalizer of the projections", || {
                json!(img.sizes())
            });
        }
        r
    }
}

/// The top level of a shift, as a skeletal extension.
#[derive(Clone, Debug)]
struct TopLevel {
    homs: Vec<Vec<CubeMap>>,
    offsets: Vec<usize>,
    class: Vec<u32>,
    reps: Vec<(usize, u32, usize)>,
}

/// The path object `X^I` as a shift, with the tables needed to transpose.
#[derive(Clone, Debug)]
pub struct Shift {
    pub obj: Psh,
    pub base: Psh,
    depth: usize,
    top: TopLevel,
}

impl Shift {
    /// `X′(h)(a)` as a cell of `X^I` at level `h.src() - 1`, for `a ∈ X(k)`
    /// and `h : [m+1] -> [k]`.
    pub fn cell(&self, k: usize, a: u32, h: &CubeMap) -> u32 {
        let site = self.base.site();
        if h.src() <= self.depth {
            let f = site.cube_mor(h).expect("map inside the site");
            self.base.apply(f, a)
        } else {
            let g = self.top.offsets[k] + a as usize * self.top.homs[k].len() + h.rank();
            self.top.class[g]
        }
    }

    /// A representative `(k, a, u)` with `u : [m+1] -> [k]` of a cell at level `m`.
    pub fn rep(&self, m: usize, w: u32) -> (usize, u32, CubeMap) {
        if m < self.depth {
            (m + 1, w, CubeMap::identity(m + 1))
        } else {
            let (k, a, r) = self.top.reps[w as usize];
            (k, a, self.top.homs[k][r].clone())
        }
    }
}

/// `X^I` by shifting; validity drops by one.
pub fn pathobject_shift(x: &Psh) -> Result<Shift> {
    let site = x.site().clone();
    let n = cube_depth(&site)?;
    if x.validity() == 0 {
        return Err(Error::ValidityUnderflow("the path object needs validity at least 1".into()));
    }
    // Skeletal top level.
    let homs: Vec<Vec<CubeMap>> = (0..=n).map(|k| hom(n + 1, k).collect()).collect();
    let mut offsets = Vec::with_capacity(n + 2);
    let mut total = 0;
    for k in 0..=n {
        offsets.push(total);
        total += x.size(k as u32) * homs[k].len();
    }
    offsets.push(total);
    let gidx = |k: usize, a: u32, r: usize| offsets[k] + a as usize * homs[k].len() + r;
    let mut uf = UnionFind::<usize>::new(total);
    for v in 0..site.num_morphisms() as MorId {
        if site.is_identity(v) {
            continue;
        }
        let vm = site.cube_map(v).expect("cube site");
        let (k, kp) = (vm.src(), vm.tgt());
        for (r, u) in homs[k].iter().enumerate() {
            let vu = vm.compose(u)?.rank();
            for a in 0..x.size(kp as u32) as u32 {
                uf.union(gidx(k, x.apply(v, a), r), gidx(kp, a, vu));
            }
        }
    }
    let mut class = vec![0u32; total];
    let mut reps = Vec::new();
    let mut of_root: HashMap<usize, u32> = HashMap::new();
    for k in 0..=n {
        for a in 0..x.size(k as u32) as u32 {
            for r in 0..homs[k].len() {
                let g = gidx(k, a, r);
                let root = uf.find_mut(g);
                let next = of_root.len() as u32;
                let c = *of_root.entry(root).or_insert_with(|| {
                    reps.push((k, a, r));
                    next
                });
                class[g] = c;
            }
        }
    }
    let top = TopLevel { homs, offsets, class, reps };
    let mut sizes: Vec<usize> = (0..n).map(|m| x.size(m as u32 + 1)).collect();
    sizes.push(top.reps.len());
    let proto = Shift {
        obj: terminal(&site).into_psh(),
        base: x.clone(),
        depth: n,
        top,
    };
    let mut act = Vec::with_capacity(site.num_morphisms());
    for f in 0..site.num_morphisms() as MorId {
        let fm = site.cube_map(f).expect("cube site").successor();
        let nn = site.cod(f) as usize;
        let t = (0..sizes[nn] as u32)
            .map(|w| {
                let (k, a, u) = proto.rep(nn, w);
                proto.cell(k, a, &u.compose(&fm).expect("composable"))
            })
            .collect();
        act.push(t);
    }
    let obj = Presheaf::from_parts(site, sizes, act, x.validity() - 1, x.intrinsic_only()).into_psh();
    Ok(Shift { obj, ..proto })
}

/// `f^I : X^I -> Y^I`, given the shifts of the source and target of `f`.
pub fn pathobject_map(sx: &Shift, sy: &Shift, f: &NatTrans) -> Result<NatTrans> {
    if !sx.base.same_as(f.src()) || !sy.base.same_as(f.tgt()) {
        return Err(Error::Input("shifts do not match the map".into()));
    }
    let n = sx.depth;
    let comp = (0..=n)
        .map(|m| {
            (0..sx.obj.size(m as u32) as u32)
                .map(|w| {
                    let (k, a, u) = sx.rep(m, w);
                    sy.cell(k, f.apply(k as u32, a), &u)
                })
                .collect()
        })
        .collect();
    Ok(NatTrans::from_parts(sx.obj.clone(), sy.obj.clone(), comp))
}

/// Compares two presheaves at levels up to `k`: both must be functorial and
/// naturally isomorphic. A broken action is reported with its square.
pub fn compare_up_to(name: &str, lhs: &Presheaf, rhs: &Presheaf, k: usize, budget: &mut Budget) -> CheckReport {
    let mut r = CheckReport::new(name).param("levels", k);
    for (side, x) in [("lhs", lhs), ("rhs", rhs)] {
        if let Some(w) = x.audit() {
            r.fail(format!("{side} is not functorial"), json!({"side": side, "square": w}));
        }
    }
    if !r.passed() {
        return r;
    }
    let (Some(a), Some(b)) = (r.absorb("truncate", lhs.truncate(k)), r.absorb("truncate", rhs.truncate(k))) else {
        return r;
    };
    r.details.push(format!("counts {:?} and {:?}", a.sizes(), b.sizes()));
    let used = budget.used();
    let (a, b) = (a.into_psh(), b.into_psh());
    if let Some(found) = r.absorb("iso search", iso_search(&a, &b, budget)) {
        match found {
            Some(iso) => {
                r.certificate = Some(crate::certificate::Certificate::iso(&iso).to_json());
            }
            None => r.fail("no natural isomorphism", json!({"lhs": a.sizes(), "rhs": b.sizes()})),
        }
    }
    r.count("nodes", budget.used() - used);
    r
}

/// `I^I ≅ I + 1` at levels `≤ N−1`, with both sides' counts `n + 3`.
pub fn check_binomial(n: usize, budget: &mut Budget) -> Result<CheckReport> {
    if n < 2 {
        return Err(Error::Input("the binomial check needs N >= 2".into()));
    }
    let site = crate::cube::build_site(n)?;
    let i = yoneda(&site, 1).into_psh();
    let lhs = pathobject_shift(&i)?.obj;
    let rhs = coproduct(&i, &terminal(&site).into_psh()).obj;
    let mut r = compare_up_to("binomial", &lhs, &rhs, n - 1, budget).param("N", n);
    let expected: Vec<usize> = (0..n).map(|k| k + 3).collect();
    r.require(lhs.sizes()[..n] == expected[..], "path object counts differ from n+3", || json!(lhs.sizes()));
    r.require(rhs.sizes()[..n] == expected[..], "I+1 counts differ from n+3", || json!(rhs.sizes()));
    r.validity = Some(n - 1);
    Ok(r)
}

/// The shift against the exponential `X^I`, at levels up to `validity − 1`.
pub fn check_shift_vs_exponential(x: &Psh, budget: &mut Budget) -> Result<CheckReport> {
    let site = x.site();
    let shift = pathobject_shift(x)?;
    let e = exponential(x, &yoneda(site, 1).into_psh(), budget)?;
    let k = x.validity() - 1;
    let k = k.min(site.depth().saturating_sub(1));
    let mut r = compare_up_to("shift-vs-exponential", &shift.obj, &e.obj, k, budget);
    r.validity = Some(k);
    Ok(r)
}

/// The root `X_I`: `X_I(n) = Nat((y[n])^I, X)` with `(y[n])^I(m) = hom([m+1], [n])`.
#[derive(Clone, Debug)]
pub struct Root {
    pub base: Psh,
    pub obj: Psh,
    paths: Vec<Psh>,
    cells: Vec<Vec<Components>>,
}

/// `(y[n])^I` on `□≤N`, computed from cube maps one dimension up.
fn path_representable(site: &Site, n: usize) -> Psh {
    let depth = site.depth();
    let sizes = (0..=depth).map(|m| crate::cube::hom_count(m + 1, n) as usize).collect();
    Presheaf::from_fn(site.clone(), sizes, depth, |f, h| {
        let fm = site.cube_map(f).expect("cube site").successor();
        let hm = CubeMap::from_rank(site.cod(f) as usize + 1, n, h as usize);
        hm.compose(&fm).expect("composable").rank() as u32
    })
    .into_psh()
}

impl Root {
    pub fn cell(&self, n: u32, w: u32) -> &Components {
        &self.cells[n as usize][w as usize]
    }

    /// The expected count `Π_k |X_k|^C(n,k)`, or `None` on overflow.
    pub fn expected_size(x: &Presheaf, n: usize) -> Option<u128> {
        let mut binom = 1u128;
        let mut total = 1u128;
        for k in 0..=n {
            if k > 0 {
                binom = binom * (n + 1 - k) as u128 / k as u128;
            }
            total = total.checked_mul((x.size(k as u32) as u128).checked_pow(binom as u32)?)?;
        }
        Some(total)
    }
}

pub fn root(x: &Psh, budget: &mut Budget) -> Result<Root> {
    let site = x.site().clone();
    let n = cube_depth(&site)?;
    let paths: Vec<Psh> = (0..=n).map(|k| path_representable(&site, k)).collect();
    let mut cells = Vec::with_capacity(n + 1);
    let mut index: Vec<HashMap<Components, u32>> = Vec::with_capacity(n + 1);
    for p in &paths {
        let sols = NatSearch::new(p, x)?.all(budget)?;
        index.push(sols.iter().enumerate().map(|(i, c)| (c.clone(), i as u32)).collect());
        cells.push(sols);
    }
    let sizes: Vec<usize> = cells.iter().map(|c| c.len()).collect();
    let mut act = Vec::with_capacity(site.num_morphisms());
    for f in 0..site.num_morphisms() as MorId {
        let u = site.cube_map(f).expect("cube site");
        let (np, nn) = (u.src(), u.tgt());
        let t = cells[nn]
            .iter()
            .map(|phi| {
                let comp: Components = (0..=n)
                    .map(|m| {
                        (0..paths[np].size(m as u32))
                            .map(|hp| {
                                let h = CubeMap::from_rank(m + 1, np, hp);
                                phi[m][u.compose(&h).expect("composable").rank()]
                            })
                            .collect()
                    })
                    .collect();
                index[np][&comp]
            })
            .collect();
        act.push(t);
    }
    let obj = Presheaf::from_parts(site, sizes, act, x.validity(), x.intrinsic_only()).into_psh();
    Ok(Root { base: x.clone(), obj, paths, cells })
}

/// Transposes across `(−)^I ⊣ (−)_I`.
pub struct RootAdjunction<'a> {
    pub shift: &'a Shift,
    pub root: &'a Root,
}

impl RootAdjunction<'_> {
    /// `ψ(φ)_n(a)_m(h) = φ_m(A′(h)(a))` for `φ : A^I -> X`.
    pub fn psi(&self, phi: &NatTrans) -> Option<NatTrans> {
        let a = &self.shift.base;
        let site = a.site();
        let index: Vec<HashMap<&Components, u32>> = self
            .root
            .cells
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, c)| (c, i as u32)).collect())
            .collect();
        let mut comp = Vec::with_capacity(site.num_objects());
        for n in 0..site.num_objects() {
            let mut t = Vec::with_capacity(a.size(n as u32));
            for e in 0..a.size(n as u32) as u32 {
                let tr: Components = (0..site.num_objects())
                    .map(|m| {
                        (0..self.root.paths[n].size(m as u32))
                            .map(|hp| {
                                let h = CubeMap::from_rank(m + 1, n, hp);
                                phi.apply(m as u32, self.shift.cell(n, e, &h))
                            })
                            .collect()
                    })
                    .collect();
                t.push(*index[n].get(&tr)?);
            }
            comp.push(t);
        }
        NatTrans::new(a.clone(), self.root.obj.clone(), comp).ok()
    }

    /// `φ(β)_m([(a, u)]) = β_k(a)_m(u)` for `β : A -> X_I`.
    pub fn phi(&self, beta: &NatTrans) -> Option<NatTrans> {
        let site = self.shift.obj.site();
        let comp = (0..site.num_objects())
            .map(|m| {
                (0..self.shift.obj.size(m as u32) as u32)
                    .map(|w| {
                        let (k, a, u) = self.shift.rep(m, w);
                        self.root.cell(k as u32, beta.apply(k as u32, a))[m][u.rank()]
                    })
                    .collect()
            })
            .collect();
        NatTrans::new(self.shift.obj.clone(), self.root.base.clone(), comp).ok()
    }
}

/// `|Hom(A^I, X)| = |Hom(A, X_I)|` with mutually inverse transposes.
pub fn check_root_adjunction(a: &Psh, x: &Psh, budget: &mut Budget) -> Result<CheckReport> {
    let mut r = CheckReport::new("root-adjunction").param("N", a.site().depth());
    let shift = pathobject_shift(a)?;
    let rt = root(x, budget)?;
    let used = budget.used();
    let lhs = enumerate_nat_trans(&shift.obj, x, budget)?;
    let rhs = enumerate_nat_trans(a, &rt.obj, budget)?;
    r.count("nodes", budget.used() - used);
    r.count("lhs", lhs.len() as u64);
    r.count("rhs", rhs.len() as u64);
    r.require(lhs.len() == rhs.len(), "hom-set sizes differ", || json!([lhs.len(), rhs.len()]));
    let adj = RootAdjunction { shift: &shift, root: &rt };
    for (i, phi) in lhs.iter().enumerate() {
        match adj.psi(phi).and_then(|b| adj.phi(&b).map(|back| (b, back))) {
            Some((b, back)) if back.same_as(phi) => {
                let _ = b;
            }
            _ => {
                r.fail("transpose of a map out of A^I does not round-trip", json!({"index": i}));
                break;
            }
        }
    }
    for (i, beta) in rhs.iter().enumerate() {
        match adj.phi(beta).and_then(|p| adj.psi(&p)) {
            Some(back) if back.same_as(beta) => {}
            _ => {
                r.fail("transpose of a map into X_I does not round-trip", json!({"index": i}));
                break;
            }
        }
    }
    for n in 0..=a.site().depth() {
        if let Some(exp) = Root::expected_size(x, n) {
            r.require(rt.obj.size(n as u32) as u128 == exp, format!("|X_I({n})| differs from the product formula"), || {
                json!({"level": n, "found": rt.obj.size(n as u32), "expected": exp as u64})
            });
        }
    }
    r.validity = Some(a.site().depth());
    Ok(r)
}

/// `□≤N/[1]` as the elements of `I`, the pulled-back interval `I*I` on it,
/// and the generic point `δ : 1 -> I*I`.
#[derive(Clone, Debug)]
pub struct SlicedInterval {
    pub el: Elements,
    pub ii: Psh,
    pub delta: NatTrans,
}

pub fn sliced_interval(n: usize) -> Result<SlicedInterval> {
    if n < 1 {
        return Err(Error::Input("the sliced interval needs N >= 1".into()));
    }
    SlicedInterval::over(&crate::cube::build_site(n)?)
}

impl SlicedInterval {
    /// The slice over `I` of a given cube site, so that pulled-back
    /// presheaves share that site.
    pub fn over(site: &Site) -> Result<SlicedInterval> {
        if cube_depth(site)? < 1 {
            return Err(Error::Input("the sliced interval needs N >= 1".into()));
        }
        let i = yoneda(site, 1).into_psh();
        let el = Elements::new(&i);
        let ii = el.pull(&i).into_psh();
        let delta = el.generic_point();
        Ok(SlicedInterval { el, ii, delta })
    }

    /// The endpoint `ε` viewed over the slice: the object `([0], ε)`.
    pub fn endpoint_object(&self, eps: bool) -> u32 {
        self.el.object(0, endpoint_cell(0, eps))
    }

    /// Pulls `δ` back along `δ_ε : 1 -> I`: the value of `δ` at the object
    /// `([n], ε)`, for each `n`.
    pub fn delta_over_endpoint(&self, eps: bool) -> Vec<u32> {
        let depth = self.el.base.depth();
        (0..=depth).map(|k| self.delta.apply(self.el.object(k as u32, endpoint_cell(k, eps)), 0)).collect()
    }
}

/// The constant cube map `[n] -> [1]` at `ε`.
pub fn constant(n: usize, eps: bool) -> CubeMap {
    CubeMap::new(n, vec![if eps { Entry::One } else { Entry::Zero }]).expect("valid constant")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;

    #[test]
    fn kit_invariants() {
        for n in 1..=2 {
            let kit = IntervalKit::new(&build_site(n).unwrap()).unwrap();
            let r = kit.check();
            assert!(r.passed(), "{:?}", r.details);
        }
    }

    #[test]
    fn endpoint_cells_are_constants() {
        for n in 0..3 {
            assert_eq!(constant(n, false).rank() as u32, endpoint_cell(n, false));
            assert_eq!(constant(n, true).rank() as u32, endpoint_cell(n, true));
        }
    }

    #[test]
    fn shift_of_interval_and_terminal() {
        let s = build_site(2).unwrap();
        let i = yoneda(&s, 1).into_psh();
        let sh = pathobject_shift(&i).unwrap();
        assert_eq!(&sh.obj.sizes()[..2], &[3, 4]);
        assert!(sh.obj.audit().is_none());
        assert_eq!(sh.obj.validity(), 1);
        let one = terminal(&s).into_psh();
        assert_eq!(pathobject_shift(&one).unwrap().obj.sizes(), &[1, 1, 1]);
    }

    #[test]
    fn skeletal_top_of_a_representable_is_its_true_value() {
        // y[1] is 1-skeletal, so its extension to [3] is hom([3],[1]).
        let s = build_site(2).unwrap();
        let sh = pathobject_shift(&yoneda(&s, 1).into_psh()).unwrap();
        assert_eq!(sh.obj.size(2), 5);
    }

    #[test]
    fn validity_underflow_is_an_error() {
        let s = build_site(1).unwrap();
        let x = yoneda(&s, 1).with_validity(0, false).into_psh();
        assert!(matches!(pathobject_shift(&x), Err(Error::ValidityUnderflow(_))));
    }

    #[test]
    fn binomial_at_two() {
        let r = check_binomial(2, &mut Budget::default()).unwrap();
        assert!(r.passed(), "{:?}", r.details);
        assert!(check_binomial(0, &mut Budget::default()).is_err());
    }

    #[test]
    fn root_of_interval() {
        let s = build_site(2).unwrap();
        let i = yoneda(&s, 1).into_psh();
        let rt = root(&i, &mut Budget::default()).unwrap();
        assert_eq!(rt.obj.size(0), 2);
        assert_eq!(rt.obj.size(1), 6);
        assert!(rt.obj.audit().is_none());
        let one = terminal(&s).into_psh();
        assert_eq!(root(&one, &mut Budget::default()).unwrap().obj.sizes(), &[1, 1, 1]);
    }

    #[test]
    fn root_adjunction_small_cases() {
        let s = build_site(2).unwrap();
        let one = terminal(&s).into_psh();
        let i = yoneda(&s, 1).into_psh();
        let two = coproduct(&one, &one).obj;
        for (a, x) in [(&one, &one), (&i, &i), (&two, &i)] {
            let r = check_root_adjunction(a, x, &mut Budget::default()).unwrap();
            assert!(r.passed(), "{:?}", r.details);
        }
    }

    #[test]
    fn sliced_interval_shape() {
        let si = sliced_interval(1).unwrap();
        assert_eq!(si.el.cat.num_objects(), 5);
        assert_eq!(si.delta_over_endpoint(false), vec![0, 0]);
        assert_eq!(si.delta_over_endpoint(true), vec![1, 2]);
    }
}
