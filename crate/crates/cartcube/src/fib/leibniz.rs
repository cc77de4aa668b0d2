//! Pushout-products, pullback-homs, and the Leibniz adjunction between them.

use serde_json::json;

use crate::cofib::unliftable_square;
use crate::error::{Error, Result};
use crate::presheaf::{exponential_on, product, pullback, pushout, Colimit, Exponential, Limit, NatTrans};
use crate::report::CheckReport;
use crate::search::Budget;

/// `f × g` between chosen products.
fn product_map(from: &Limit, to: &Limit, f: &NatTrans, g: &NatTrans) -> Result<NatTrans> {
    to.pair(&[from.proj[0].then(f)?, from.proj[1].then(g)?])
}

/// `a ⊗ b` with the pushout it is defined on.
#[derive(Clone, Debug)]
pub struct PushoutProduct {
    /// `A₁×B₀ +_{A₀×B₀} A₀×B₁`, injections in that order.
    pub domain: Colimit,
    /// `A₁ × B₁`.
    pub codomain: Limit,
    pub map: NatTrans,
}

pub fn pushout_product_with(a: &NatTrans, b: &NatTrans) -> Result<PushoutProduct> {
    if !a.src().site().same_as(b.src().site()) {
        return Err(Error::SiteMismatch);
    }
    let p00 = product(a.src(), b.src())?;
    let p10 = product(a.tgt(), b.src())?;
    let p01 = product(a.src(), b.tgt())?;
    let p11 = product(a.tgt(), b.tgt())?;
    let id = |x: &NatTrans| NatTrans::identity(x.src());
    let ida0 = id(a);
    let idb0 = id(b);
    let left = product_map(&p00, &p10, a, &idb0)?;
    let right = product_map(&p00, &p01, &ida0, b)?;
    let domain = pushout(&left, &right)?;
    let leg10 = product_map(&p10, &p11, &NatTrans::identity(a.tgt()), b)?;
    let leg01 = product_map(&p01, &p11, a, &NatTrans::identity(b.tgt()))?;
    let map = domain.copair(&[leg10, leg01])?;
    Ok(PushoutProduct { domain, codomain: p11, map })
}

/// `a ⊗ b : A₁×B₀ +_{A₀×B₀} A₀×B₁ -> A₁×B₁`.
pub fn pushout_product(a: &NatTrans, b: &NatTrans) -> Result<NatTrans> {
    Ok(pushout_product_with(a, b)?.map)
}

/// `u ⇒ f : Y^B -> X^B ×_{X^A} Y^A` for `u : A -> B` and `f : Y -> X`,
/// with the four exponentials it is built from.
#[derive(Clone, Debug)]
pub struct PullbackHom {
    pub yb: Exponential,
    pub xb: Exponential,
    pub ya: Exponential,
    pub xa: Exponential,
    /// The pullback, with projections to `X^B` and `Y^A`.
    pub target: Limit,
    pub map: NatTrans,
}

/// The pullback-hom computed at the objects `keep` only; the result lives
/// on the full subcategory they span.
pub fn pullback_hom_on(u: &NatTrans, f: &NatTrans, keep: &[u32], budget: &mut Budget) -> Result<PullbackHom> {
    if !u.src().site().same_as(f.src().site()) {
        return Err(Error::SiteMismatch);
    }
    let yb = exponential_on(f.src(), u.tgt(), keep, budget)?;
    let xb = exponential_on(f.tgt(), u.tgt(), keep, budget)?;
    let ya = exponential_on(f.src(), u.src(), keep, budget)?;
    let xa = exponential_on(f.tgt(), u.src(), keep, budget)?;
    let fb = yb.post(f, &xb)?;
    let xu = xb.pre(u, &xa)?;
    let fa = ya.post(f, &xa)?;
    let yu = yb.pre(u, &ya)?;
    let target = pullback(&xu, &fa)?;
    let map = target.pair(&[fb, yu])?;
    Ok(PullbackHom { yb, xb, ya, xa, target, map })
}

pub fn pullback_hom(u: &NatTrans, f: &NatTrans, budget: &mut Budget) -> Result<NatTrans> {
    let all: Vec<u32> = (0..u.src().site().num_objects() as u32).collect();
    Ok(pullback_hom_on(u, f, &all, budget)?.map)
}

/// Decides `(a⊗b) ⋔ c` and `a ⋔ (b⇒c)` independently, each by exhaustive
/// square enumeration and filler search, and requires the answers to agree.
pub fn check_leibniz(a: &NatTrans, b: &NatTrans, c: &NatTrans, budget: &mut Budget) -> Result<CheckReport> {
    let mut r = CheckReport::new("leibniz");
    let ab = pushout_product(a, b)?;
    let bc = pullback_hom(b, c, budget)?;
    let lhs = unliftable_square(&ab, c, budget)?;
    let rhs = unliftable_square(a, &bc, budget)?;
    r.set_param("lifts", lhs.is_none());
    r.require(lhs.is_none() == rhs.is_none(), "the two sides of the adjunction disagree", || {
        json!({
            "pushout_product_side": lhs.as_ref().map(|p| p.witness()),
            "pullback_hom_side": rhs.as_ref().map(|p| p.witness()),
        })
    });
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;
    use crate::interval::IntervalKit;
    use crate::presheaf::{iso_search, Subobject};

    #[test]
    fn initial_map_is_a_unit() {
        let s = build_site(2).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        let bang = NatTrans::from_initial(&kit.one);
        let g = kit.boundary.clone();
        let pp = pushout_product(&bang, &g).unwrap();
        assert_eq!(pp.src().sizes(), g.src().sizes());
        assert!(pp.is_mono());
        assert!(iso_search(pp.tgt(), g.tgt(), &mut Budget::default()).unwrap().is_some());
    }

    #[test]
    fn open_box_from_boundary_and_endpoint() {
        let s = build_site(2).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        let m = pushout_product(&kit.boundary, &kit.delta0).unwrap();
        assert!(m.is_mono());
        // Bottom and both sides of the square: all 4 vertices, and the 1-cubes
        // (e, 0) or (0, e) or (1, e) among the 9 maps [1] -> [2].
        let im = Subobject::image(&m);
        assert_eq!(im.cells(0).len(), 4);
        assert_eq!(im.cells(1).len(), 7);
        assert!(!im.is_full());
    }

    #[test]
    fn pullback_hom_units() {
        let s = build_site(2).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        let bang = NatTrans::from_initial(&kit.one);
        let f = NatTrans::to_terminal(&kit.i);
        let h = pullback_hom(&bang, &f, &mut Budget::default()).unwrap();
        assert!(iso_search(h.src(), f.src(), &mut Budget::default()).unwrap().is_some());
        assert!(iso_search(h.tgt(), f.tgt(), &mut Budget::default()).unwrap().is_some());
        // δ₀ ⇒ (I -> 1) is evaluation at 0 from the path object.
        let e = pullback_hom(&kit.delta0, &f, &mut Budget::default()).unwrap();
        assert_eq!(&e.src().sizes()[..2], &[3, 4]);
        assert!(iso_search(e.tgt(), &kit.i, &mut Budget::default()).unwrap().is_some());
    }

    #[test]
    fn leibniz_on_interval_maps() {
        let s = build_site(1).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        let f = NatTrans::to_terminal(&kit.two.obj);
        for a in [&kit.delta0, &kit.boundary] {
            let r = check_leibniz(a, &kit.delta1, &f, &mut Budget::default()).unwrap();
            assert!(r.passed(), "{:?}", r.details);
        }
    }
}
