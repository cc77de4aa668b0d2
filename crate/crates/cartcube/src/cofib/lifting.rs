//! Lifting problems and the exhaustive filler search.

use serde_json::{json, Value};

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::presheaf::NatTrans;
use crate::search::{Budget, NatSearch};

/// A commuting square `right ∘ top = bottom ∘ left`:
///
/// ```text
///   A --top--> X
///   |          |
/// left       right
///   v          v
///   B -bottom> Y
/// ```
#[derive(Clone, Debug)]
pub struct LiftingProblem {
    pub left: NatTrans,
    pub right: NatTrans,
    pub top: NatTrans,
    pub bottom: NatTrans,
}

/// The outcome of a filler search that stayed within budget.
#[derive(Clone, Debug)]
pub enum Lifting {
    Filler(NatTrans),
    /// The search space was exhausted without a filler.
    Refuted,
}

impl Lifting {
    pub fn filler(&self) -> Option<&NatTrans> {
        match self {
            Lifting::Filler(d) => Some(d),
            Lifting::Refuted => None,
        }
    }
}

impl LiftingProblem {
    /// Checks shapes and commutativity.
    pub fn new(left: NatTrans, right: NatTrans, top: NatTrans, bottom: NatTrans) -> Result<LiftingProblem> {
        let shapes = left.src().same_as(top.src())
            && left.tgt().same_as(bottom.src())
            && right.src().same_as(top.tgt())
            && right.tgt().same_as(bottom.tgt());
        if !shapes {
            return Err(Error::Input("the four maps do not form a square".into()));
        }
        let a = top.then(&right)?;
        let b = left.then(&bottom)?;
        if a.components() != b.components() {
            return Err(Error::Input("the square does not commute".into()));
        }
        Ok(LiftingProblem { left, right, top, bottom })
    }

    /// The constrained search for diagonals `B -> X`.
    pub fn search(&self) -> Result<NatSearch<'_>> {
        let b = self.left.tgt();
        let site = b.site();
        let mut s = NatSearch::new(b, self.right.src())?;
        for c in 0..site.num_objects() as u32 {
            for x in 0..b.size(c) as u32 {
                let y = self.bottom.apply(c, x);
                s.retain(c, x, |v| self.right.apply(c, v) == y);
            }
            for a in 0..self.left.src().size(c) as u32 {
                s.fix(c, self.left.apply(c, a), self.top.apply(c, a));
            }
        }
        // `fix` on a cell already fixed to a different value empties its
        // domain, which the search reports as no solution.
        Ok(s)
    }

    pub fn certificate(&self, diagonal: &NatTrans) -> Certificate {
        Certificate::filler(&self.left, &self.right, &self.top, &self.bottom, diagonal)
    }

    /// The square as a JSON witness.
    pub fn witness(&self) -> Value {
        json!({
            "left": self.left.components(),
            "right": self.right.components(),
            "top": self.top.components(),
            "bottom": self.bottom.components(),
            "sizes": {
                "A": self.left.src().sizes(),
                "B": self.left.tgt().sizes(),
                "X": self.right.src().sizes(),
                "Y": self.right.tgt().sizes(),
            }
        })
    }
}

/// The first diagonal filler in canonical order, or a refutation.
pub fn solve_lifting(p: &LiftingProblem, budget: &mut Budget) -> Result<Lifting> {
    Ok(match p.search()?.first(budget)? {
        Some(comp) => Lifting::Filler(NatTrans::from_parts(p.left.tgt().clone(), p.right.src().clone(), comp)),
        None => Lifting::Refuted,
    })
}

pub fn count_fillers(p: &LiftingProblem, budget: &mut Budget) -> Result<u64> {
    p.search()?.count(budget)
}

/// The first commuting square from `left` to `right` without a diagonal
/// filler, or `None` when `left ⋔ right`. Squares are enumerated by bottom
/// map, then top map, in canonical order.
pub fn unliftable_square(left: &NatTrans, right: &NatTrans, budget: &mut Budget) -> Result<Option<LiftingProblem>> {
    let a = left.src();
    for bc in NatSearch::new(left.tgt(), right.tgt())?.all(budget)? {
        let bottom = NatTrans::from_parts(left.tgt().clone(), right.tgt().clone(), bc);
        let mut tops = NatSearch::new(a, right.src())?;
        for c in 0..a.site().num_objects() as u32 {
            for x in 0..a.size(c) as u32 {
                let want = bottom.apply(c, left.apply(c, x));
                tops.retain(c, x, |v| right.apply(c, v) == want);
            }
        }
        // Tops are streamed; filler searches draw on a budget of their own
        // that is charged back afterwards.
        let mut inner = Budget::new(budget.remaining());
        let mut found = None;
        let mut err = None;
        tops.for_each(budget, |tc| {
            let top = NatTrans::from_parts(a.clone(), right.src().clone(), tc.clone());
            let p = LiftingProblem { left: left.clone(), right: right.clone(), top, bottom: bottom.clone() };
            match p.search().and_then(|s| s.first(&mut inner)) {
                Ok(Some(_)) => true,
                Ok(None) => {
                    found = Some(p);
                    false
                }
                Err(e) => {
                    err = Some(e);
                    false
                }
            }
        })?;
        budget.charge(inner.used(), "filler search")?;
        if let Some(e) = err {
            return Err(e);
        }
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;
    use crate::presheaf::{coproduct, count_nat_trans, initial, terminal, yoneda};

    #[test]
    fn identity_left_has_the_top_as_unique_filler() {
        let s = build_site(1).unwrap();
        let i = yoneda(&s, 1).into_psh();
        let one = terminal(&s).into_psh();
        let id = NatTrans::identity(&i);
        let top = NatTrans::to_terminal(&i);
        let p = LiftingProblem::new(id.clone(), NatTrans::identity(&one), top.clone(), top.clone()).unwrap();
        let d = solve_lifting(&p, &mut Budget::default()).unwrap();
        assert!(d.filler().unwrap().same_as(&top));
        assert_eq!(count_fillers(&p, &mut Budget::default()).unwrap(), 1);
        assert!(p.certificate(d.filler().unwrap()).verify().unwrap().passed());
    }

    #[test]
    fn empty_left_counts_global_points() {
        let s = build_site(1).unwrap();
        let zero = initial(&s).into_psh();
        let one = terminal(&s).into_psh();
        for x in [yoneda(&s, 1).into_psh(), coproduct(&one, &one).obj, zero] {
            let p = LiftingProblem::new(
                NatTrans::from_initial(&one),
                NatTrans::to_terminal(&x),
                NatTrans::from_initial(&x),
                NatTrans::identity(&one),
            )
            .unwrap();
            let n = count_fillers(&p, &mut Budget::default()).unwrap();
            assert_eq!(n, count_nat_trans(&one, &x, &mut Budget::default()).unwrap());
            assert_eq!(solve_lifting(&p, &mut Budget::default()).unwrap().filler().is_some(), n > 0);
        }
    }

    #[test]
    fn non_commuting_squares_are_rejected() {
        let s = build_site(1).unwrap();
        let one = terminal(&s).into_psh();
        let two = coproduct(&one, &one);
        let id2 = NatTrans::identity(&two.obj);
        let swap = two.copair(&[two.inj[1].clone(), two.inj[0].clone()]).unwrap();
        assert!(LiftingProblem::new(id2.clone(), id2.clone(), id2, swap).is_err());
    }

    #[test]
    fn budget_overrun_is_not_a_refutation() {
        let s = build_site(2).unwrap();
        let i = yoneda(&s, 2).into_psh();
        let p = LiftingProblem::new(
            NatTrans::from_initial(&i),
            NatTrans::to_terminal(&i),
            NatTrans::from_initial(&i),
            NatTrans::to_terminal(&i),
        )
        .unwrap();
        let r = count_fillers(&p, &mut Budget::new(3));
        assert!(matches!(r, Err(Error::Budget { .. })));
    }
}
