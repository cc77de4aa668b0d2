//! Homotopies `θ : I×X -> Y`, the box fillings that make homotopy into a
//! fibrant object an equivalence relation, and homotopy equivalences.

use crate::cofib::{solve_lifting, Lifting, LiftingProblem};
use crate::error::{Error, Result};
use crate::fib::pushout_product_with;
use crate::interval::{endpoint_cell, IntervalKit};
use crate::presheaf::{exponential_on, product, yoneda, Limit, NatTrans, Psh, Subobject};
use crate::search::{Budget, NatSearch};

use super::pi0::pi0;

/// A homotopy `θ : I×X -> Y` with the cylinder it is defined on.
#[derive(Clone, Debug)]
pub struct Homotopy {
    /// `I × X`, with `I` first.
    pub cylinder: Limit,
    pub theta: NatTrans,
}

fn cylinder(x: &Psh) -> Result<Limit> {
    let site = x.site();
    if site.cube().map_or(true, |d| d.n < 1) {
        return Err(Error::Dimension("homotopies need a cube site with N >= 1".into()));
    }
    product(&yoneda(site, 1).into_psh(), x)
}

fn check_parallel(f: &NatTrans, g: &NatTrans) -> Result<()> {
    if f.src().same_as(g.src()) && f.tgt().same_as(g.tgt()) {
        Ok(())
    } else {
        Err(Error::Input("the maps must be parallel".into()))
    }
}

impl Homotopy {
    /// The value of `θ` at the cell `(i, x)` of `I×X` at level `k`.
    pub fn at(&self, k: u32, i: u32, x: u32) -> u32 {
        self.theta.apply(k, self.cylinder.cell(k, &[i, x]).expect("cylinder cell"))
    }

    /// `θ ∘ ι_ε`.
    pub fn end(&self, eps: bool) -> NatTrans {
        let x = self.cylinder.proj[1].tgt();
        let site = x.site();
        let comp = (0..site.num_objects() as u32)
            .map(|k| (0..x.size(k) as u32).map(|v| self.at(k, endpoint_cell(k as usize, eps), v)).collect())
            .collect();
        NatTrans::from_parts(x.clone(), self.theta.tgt().clone(), comp)
    }

    /// Whether this is a homotopy `f ∼ g`.
    pub fn joins(&self, f: &NatTrans, g: &NatTrans) -> bool {
        self.end(false).same_as(f) && self.end(true).same_as(g)
    }

    /// The constant homotopy `f ∘ π₂ : f ∼ f`.
    pub fn constant(f: &NatTrans) -> Result<Homotopy> {
        let cylinder = cylinder(f.src())?;
        let theta = cylinder.proj[1].then(f)?;
        Ok(Homotopy { cylinder, theta })
    }
}

/// Searches `Hom(I×X, Y)` for `θ` with `θι₀ = f` and `θι₁ = g`.
pub fn find_homotopy(f: &NatTrans, g: &NatTrans, budget: &mut Budget) -> Result<Option<Homotopy>> {
    check_parallel(f, g)?;
    let x = f.src();
    let cyl = cylinder(x)?;
    let mut s = NatSearch::new(&cyl.obj, f.tgt())?;
    for k in 0..x.site().num_objects() as u32 {
        for v in 0..x.size(k) as u32 {
            for (eps, m) in [(false, f), (true, g)] {
                let z = cyl.cell(k, &[endpoint_cell(k as usize, eps), v]).expect("cylinder cell");
                s.fix(k, z, m.apply(k, v));
            }
        }
    }
    Ok(s.first(budget)?.map(|comp| Homotopy { theta: NatTrans::from_parts(cyl.obj.clone(), f.tgt().clone(), comp), cylinder: cyl }))
}

/// The level-0 cell of `Y^X` transposing `f`.
fn point_of(exp: &crate::presheaf::Exponential, f: &NatTrans) -> Result<u32> {
    let site = f.src().site();
    let table: Vec<u32> = (0..site.num_objects() as u32).flat_map(|d| f.component(d).iter().copied()).collect();
    exp.cell_of(0, &table).ok_or_else(|| Error::Malformed("a map is missing from the exponential".into()))
}

/// The same search through the transpose: a 1-cell of `Y^X` from `f̂` to `ĝ`.
/// Also reports whether `f̂` and `ĝ` share a component of `Y^X`.
pub fn homotopy_by_transpose(f: &NatTrans, g: &NatTrans, budget: &mut Budget) -> Result<(Option<Homotopy>, bool)> {
    check_parallel(f, g)?;
    let (x, y) = (f.src(), f.tgt());
    let cyl = cylinder(x)?;
    let exp = exponential_on(y, x, &[0, 1], budget)?;
    let (pf, pg) = (point_of(&exp, f)?, point_of(&exp, g)?);
    let sub = exp.obj.site();
    let d0 = sub.hom(0, 1)[endpoint_cell(0, false) as usize];
    let d1 = sub.hom(0, 1)[endpoint_cell(0, true) as usize];
    let connected = pi0(&exp.obj)?.same(pf, pg);
    let site = x.site();
    for phi in 0..exp.obj.size(1) as u32 {
        budget.tick("paths in the exponential")?;
        if exp.obj.apply(d0, phi) != pf || exp.obj.apply(d1, phi) != pg {
            continue;
        }
        let mut comp = Vec::with_capacity(site.num_objects());
        for d in 0..site.num_objects() as u32 {
            let mut t = vec![0u32; cyl.obj.size(d)];
            for (hp, &h) in site.hom(d, 1).iter().enumerate() {
                for v in 0..x.size(d) as u32 {
                    t[cyl.cell(d, &[hp as u32, v]).expect("cylinder cell") as usize] = exp.eval(1, phi, h, v);
                }
            }
            comp.push(t);
        }
        let theta = NatTrans::new(cyl.obj.clone(), y.clone(), comp)?;
        return Ok((Some(Homotopy { cylinder: cyl, theta }), connected));
    }
    Ok((None, connected))
}

/// The open box `I×{0} ∪ {0,1}×I` inside `I×I` (coordinates `(s, t)`),
/// multiplied by `X`, and the lifting problem that extends `sides` from it
/// against `Y -> 1`.
fn box_problem(x: &Psh, y: &Psh, sides: impl Fn(u32, u32, u32, u32) -> u32) -> Result<(LiftingProblem, Limit, Limit)> {
    let site = x.site();
    let kit = IntervalKit::new(site)?;
    let pp = pushout_product_with(&kit.boundary, &kit.delta0)?;
    let open = Subobject::image(&pp.map);
    let square = pp.codomain;
    let space = product(&square.obj, x)?;
    let mut cells = Vec::with_capacity(site.num_objects());
    for k in 0..site.num_objects() as u32 {
        cells.push((0..space.obj.size(k) as u32).filter(|&z| open.contains(k, space.tuple(k, z)[0])).collect::<Vec<_>>());
    }
    let (b, incl) = Subobject::new(&space.obj, &cells)?.to_presheaf();
    let comp = (0..site.num_objects() as u32)
        .map(|k| {
            (0..b.size(k) as u32)
                .map(|z| {
                    let t = space.tuple(k, incl.apply(k, z));
                    let st = square.tuple(k, t[0]);
                    sides(k, st[0], st[1], t[1])
                })
                .collect()
        })
        .collect();
    let top = NatTrans::new(b, y.clone(), comp)?;
    let problem = LiftingProblem {
        left: incl,
        right: NatTrans::to_terminal(y),
        top,
        bottom: NatTrans::to_terminal(&space.obj),
    };
    Ok((problem, square, space))
}

/// The top face `t = 1` of a filled box, read as a homotopy.
fn top_face(filler: &NatTrans, square: &Limit, space: &Limit, x: &Psh) -> Result<Homotopy> {
    let cyl = cylinder(x)?;
    let site = x.site();
    let comp = (0..site.num_objects() as u32)
        .map(|k| {
            (0..cyl.obj.size(k) as u32)
                .map(|z| {
                    let t = cyl.tuple(k, z);
                    let sq = square.cell(k, &[t[0], endpoint_cell(k as usize, true)]).expect("square cell");
                    filler.apply(k, space.cell(k, &[sq, t[1]]).expect("box cell"))
                })
                .collect()
        })
        .collect();
    Ok(Homotopy { theta: NatTrans::new(cyl.obj.clone(), filler.tgt().clone(), comp)?, cylinder: cyl })
}

/// The outcome of one box filling.
#[derive(Clone, Debug)]
pub struct BoxFilling {
    pub problem: LiftingProblem,
    /// The filler, or `None` when the box has no filler.
    pub filler: Option<NatTrans>,
    pub result: Option<Homotopy>,
}

fn fill(x: &Psh, y: &Psh, sides: impl Fn(u32, u32, u32, u32) -> u32, budget: &mut Budget) -> Result<BoxFilling> {
    let (problem, square, space) = box_problem(x, y, sides)?;
    match solve_lifting(&problem, budget)? {
        Lifting::Filler(c) => {
            let result = Some(top_face(&c, &square, &space, x)?);
            Ok(BoxFilling { problem, filler: Some(c), result })
        }
        Lifting::Refuted => Ok(BoxFilling { problem, filler: None, result: None }),
    }
}

/// From `θ : f ∼ g`, a homotopy `g ∼ f`: fill the box with `θ` on the left
/// and `f` constant on the bottom and right, then take the top.
pub fn symmetry(theta: &Homotopy, budget: &mut Budget) -> Result<BoxFilling> {
    let f = theta.end(false);
    let x = f.src().clone();
    fill(
        &x,
        f.tgt(),
        |k, s, t, v| {
            if s == endpoint_cell(k as usize, false) {
                theta.at(k, t, v)
            } else {
                f.apply(k, v)
            }
        },
        budget,
    )
}

/// From `θ : f ∼ g` and `φ : g ∼ h`, a homotopy `f ∼ h`: `θ` on the bottom,
/// `f` constant on the left, `φ` on the right.
pub fn transitivity(theta: &Homotopy, phi: &Homotopy, budget: &mut Budget) -> Result<BoxFilling> {
    if !theta.end(true).same_as(&phi.end(false)) {
        return Err(Error::Input("the homotopies do not compose".into()));
    }
    let f = theta.end(false);
    let x = f.src().clone();
    fill(
        &x,
        f.tgt(),
        |k, s, t, v| {
            if s == endpoint_cell(k as usize, false) {
                f.apply(k, v)
            } else if s == endpoint_cell(k as usize, true) {
                phi.at(k, t, v)
            } else {
                theta.at(k, s, v)
            }
        },
        budget,
    )
}

/// A quasi-inverse with the two homotopies.
#[derive(Clone, Debug)]
pub struct HomotopyEquivalence {
    pub inverse: NatTrans,
    /// `1_X ∼ g∘f`.
    pub unit: Homotopy,
    /// `1_Y ∼ f∘g`.
    pub counit: Homotopy,
}

/// Tries every `g : Y -> X` in canonical order.
pub fn homotopy_equivalence(f: &NatTrans, budget: &mut Budget) -> Result<Option<HomotopyEquivalence>> {
    let (x, y) = (f.src(), f.tgt());
    let id_x = NatTrans::identity(x);
    let id_y = NatTrans::identity(y);
    for comp in NatSearch::new(y, x)?.all(budget)? {
        let g = NatTrans::from_parts(y.clone(), x.clone(), comp);
        let Some(unit) = find_homotopy(&id_x, &f.then(&g)?, budget)? else { continue };
        let Some(counit) = find_homotopy(&id_y, &g.then(f)?, budget)? else { continue };
        return Ok(Some(HomotopyEquivalence { inverse: g, unit, counit }));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cofib::CofibrationClass;
    use crate::cube::build_site;
    use crate::interval::IntervalKit;
    use crate::presheaf::{coproduct, iso_search, terminal};

    #[test]
    fn reflexivity_and_discrete_targets() {
        let s = build_site(2).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        let f = kit.delta0.clone();
        let h = find_homotopy(&f, &f, &mut Budget::default()).unwrap().unwrap();
        assert!(h.joins(&f, &f));
        assert!(Homotopy::constant(&f).unwrap().joins(&f, &f));
        let [a, b] = [kit.two.inj[0].clone(), kit.two.inj[1].clone()];
        assert!(find_homotopy(&a, &b, &mut Budget::default()).unwrap().is_none());
        // The endpoints of I are joined one way only.
        assert!(find_homotopy(&kit.delta0, &kit.delta1, &mut Budget::default()).unwrap().is_some());
        assert!(find_homotopy(&kit.delta1, &kit.delta0, &mut Budget::default()).unwrap().is_none());
    }

    #[test]
    fn transpose_agrees_with_direct_search() {
        let s = build_site(2).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        let pairs = [(&kit.delta0, &kit.delta1), (&kit.delta1, &kit.delta0), (&kit.delta0, &kit.delta0)];
        for (f, g) in pairs {
            let direct = find_homotopy(f, g, &mut Budget::default()).unwrap();
            let (tr, _) = homotopy_by_transpose(f, g, &mut Budget::default()).unwrap();
            assert_eq!(direct.is_some(), tr.is_some());
            if let Some(h) = tr {
                assert!(h.joins(f, g));
            }
        }
    }

    #[test]
    fn symmetry_and_transitivity_in_omega() {
        let s = build_site(2).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let om = class.omega().obj.clone();
        let one = terminal(&s).into_psh();
        let points: Vec<NatTrans> = (0..om.size(0) as u32).map(|p| crate::presheaf::yoneda_map(&om, 0, p)).collect();
        let points: Vec<NatTrans> = points.into_iter().map(|m| NatTrans::from_parts(one.clone(), om.clone(), m.components().clone())).collect();
        let mut pairs = 0;
        for f in &points {
            for g in &points {
                let Some(th) = find_homotopy(f, g, &mut Budget::default()).unwrap() else { continue };
                pairs += 1;
                let sym = symmetry(&th, &mut Budget::default()).unwrap();
                assert!(sym.result.unwrap().joins(g, f));
                for h in &points {
                    let Some(ph) = find_homotopy(g, h, &mut Budget::default()).unwrap() else { continue };
                    let tr = transitivity(&th, &ph, &mut Budget::default()).unwrap();
                    assert!(tr.result.unwrap().joins(f, h));
                }
            }
        }
        assert!(pairs >= 3);
    }

    #[test]
    fn symmetry_fails_in_the_interval() {
        let s = build_site(2).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        let th = find_homotopy(&kit.delta0, &kit.delta1, &mut Budget::default()).unwrap().unwrap();
        let sym = symmetry(&th, &mut Budget::default()).unwrap();
        assert!(sym.filler.is_none());
    }

    #[test]
    fn equivalences() {
        let s = build_site(2).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        let e = homotopy_equivalence(&NatTrans::identity(&kit.i), &mut Budget::default()).unwrap().unwrap();
        assert!(e.inverse.same_as(&NatTrans::identity(&kit.i)));
        let swap = iso_search(&kit.two.obj, &coproduct(&kit.one, &kit.one).obj, &mut Budget::default()).unwrap().unwrap();
        assert!(homotopy_equivalence(&swap, &mut Budget::default()).unwrap().is_some());
        let collapse = NatTrans::to_terminal(&kit.two.obj);
        assert!(homotopy_equivalence(&collapse, &mut Budget::default()).unwrap().is_none());
    }
}
