//! Slice categories `ℂ/c` as categories of elements of representables, with
//! the postcomposition functors `ℂ/c' -> ℂ/c` along each `h : c' -> c`.

use crate::fincat::{Functor, MorId, Site};
use crate::presheaf::yoneda;

use super::Elements;

/// Every slice of a site, plus the functor induced by each morphism.
#[derive(Clone, Debug)]
pub struct Slices {
    pub site: Site,
    /// `over[c]` is `∫y(c) ≅ ℂ/c`.
    pub over: Vec<Elements>,
    /// `along[h]` is `h ∘ − : ℂ/dom h -> ℂ/cod h`.
    pub along: Vec<Functor>,
}

impl Slices {
    pub fn new(site: &Site) -> Slices {
        let over: Vec<Elements> =
            (0..site.num_objects() as u32).map(|c| Elements::new(&yoneda(site, c).into_psh())).collect();
        let along = (0..site.num_morphisms() as MorId)
            .map(|h| {
                let (c0, c) = (site.dom(h), site.cod(h));
                let (src, tgt) = (&over[c0 as usize], &over[c as usize]);
                let post = |d: u32, u: u32| site.pos_in_hom(site.compose(h, site.hom(d, c0)[u as usize])) as u32;
                let obj = (0..src.cat.num_objects() as u32)
                    .map(|o| {
                        let (d, u) = src.element(o);
                        tgt.object(d, post(d, u))
                    })
                    .collect();
                let mor = (0..src.cat.num_morphisms() as MorId)
                    .map(|m| {
                        let g = src.proj.mor[m as usize];
                        let (_, u) = src.element(src.cat.cod(m));
                        tgt.morphism(g, post(site.cod(g), u))
                    })
                    .collect();
                Functor { obj, mor }
            })
            .collect();
        Slices { site: site.clone(), over, along }
    }

    /// The terminal object `(c, 1_c)` of `ℂ/c`.
    pub fn top(&self, c: u32) -> u32 {
        self.over[c as usize].object(c, self.site.pos_in_hom(self.site.id(c)) as u32)
    }

    /// The morphism `(d, f) -> (c, 1_c)` of `ℂ/c` given by `f : d -> c`.
    pub fn to_top(&self, f: MorId) -> MorId {
        let c = self.site.cod(f);
        self.over[c as usize].morphism(f, self.site.pos_in_hom(self.site.id(c)) as u32)
    }
}
