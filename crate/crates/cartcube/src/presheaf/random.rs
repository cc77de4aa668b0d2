//! Seeded random presheaves and maps for sampled checks.
//!
//! A random presheaf is a quotient of a coproduct of representables: a few
//! generators are drawn, then a few pairs of same-level cells are glued by
//! coequalizing the two Yoneda maps that pick them.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{coequalizer, coproduct, initial, yoneda, NatTrans, Psh};
use crate::error::Result;
use crate::fincat::Site;
use crate::search::{Budget, NatSearch};

/// Size limits for [`random_presheaf`].
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    /// Generators drawn, from 1 to this many.
    pub generators: usize,
    /// Highest object level a generator may have.
    pub max_level: usize,
    /// Gluings attempted, from 0 to this many.
    pub gluings: usize,
}

impl Default for Shape {
    fn default() -> Shape {
        Shape { generators: 2, max_level: 1, gluings: 2 }
    }
}

/// The Yoneda map `y(c) -> X` of a cell `x ∈ X(c)`.
pub fn yoneda_map(x: &Psh, c: u32, e: u32) -> NatTrans {
    let site = x.site();
    let yc = yoneda(site, c).into_psh();
    let comp = (0..site.num_objects() as u32).map(|d| site.hom(d, c).iter().map(|&h| x.apply(h, e)).collect()).collect();
    NatTrans::from_parts(yc, x.clone(), comp)
}

pub fn random_presheaf(site: &Site, rng: &mut impl Rng, shape: Shape) -> Result<Psh> {
    let objects: Vec<u32> =
        (0..site.num_objects() as u32).filter(|&c| site.level(c) <= shape.max_level).collect();
    let mut x = initial(site).into_psh();
    for _ in 0..rng.gen_range(1..=shape.generators.max(1)) {
        let c = *objects.choose(rng).expect("a site has objects");
        x = coproduct(&x, &yoneda(site, c).into_psh()).obj;
    }
    for _ in 0..rng.gen_range(0..=shape.gluings) {
        let c = *objects.choose(rng).expect("a site has objects");
        let n = x.size(c) as u32;
        if n < 2 {
            continue;
        }
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a == b {
            continue;
        }
        x = coequalizer(&yoneda_map(&x, c, a), &yoneda_map(&x, c, b))?.obj;
    }
    Ok(x)
}

/// A uniformly chosen map `x -> y` (by enumeration), if any exists.
pub fn random_map(x: &Psh, y: &Psh, rng: &mut impl Rng, budget: &mut Budget) -> Result<Option<NatTrans>> {
    let all = NatSearch::new(x, y)?.all(budget)?;
    Ok(all.choose(rng).map(|c| NatTrans::from_parts(x.clone(), y.clone(), c.clone())))
}
