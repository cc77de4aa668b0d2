//! Categories of elements and the discrete fibrations they project to.

use std::sync::Arc;

use crate::fincat::{FinCat, Functor, MorId, Morphism, Site};
use crate::presheaf::{terminal, NatTrans, Presheaf, Psh};

/// `∫X`: objects are pairs `(c, x ∈ X(c))`; a morphism `(c', X(f)x) -> (c, x)`
/// is a base morphism `f : c' -> c` paired with `x`.
#[derive(Clone, Debug)]
pub struct Elements {
    pub base: Site,
    pub x: Psh,
    pub cat: Site,
    /// The projection `∫X -> base`.
    pub proj: Functor,
    obj_off: Vec<u32>,
    mor_off: Vec<u32>,
}

impl Elements {
    pub fn new(x: &Psh) -> Elements {
        let base = x.site().clone();
        let mut obj_off = Vec::with_capacity(base.num_objects());
        let mut objects = Vec::new();
        let mut levels = Vec::new();
        let mut proj_obj = Vec::new();
        for c in 0..base.num_objects() as u32 {
            obj_off.push(objects.len() as u32);
            for e in 0..x.size(c) {
                objects.push(format!("{}:{e}", base.object_name(c)));
                levels.push(base.level(c));
                proj_obj.push(c);
            }
        }
        let mut mor_off = Vec::with_capacity(base.num_morphisms());
        let mut mors = Vec::new();
        let mut proj_mor = Vec::new();
        for f in 0..base.num_morphisms() as MorId {
            mor_off.push(mors.len() as u32);
            let (c0, c) = (base.dom(f), base.cod(f));
            for e in 0..x.size(c) as u32 {
                mors.push(Morphism {
                    dom: obj_off[c0 as usize] + x.apply(f, e),
                    cod: obj_off[c as usize] + e,
                    name: format!("{}@{e}", base.morphism(f).name),
                });
                proj_mor.push(f);
            }
        }
        let ids = (0..base.num_objects() as u32)
            .flat_map(|c| {
                let id = mor_off[base.id(c) as usize];
                (0..x.size(c) as u32).map(move |e| id + e)
            })
            .collect();
        let cat = FinCat::new(
            objects,
            levels,
            mors,
            ids,
            |g, f| {
                let (bg, bf) = (proj_mor[g as usize], proj_mor[f as usize]);
                let e = g - mor_off[bg as usize];
                mor_off[base.compose(bg, bf) as usize] + e
            },
            base.depth(),
        )
        .expect("elements of a presheaf form a category");
        Elements {
            base: base.clone(),
            x: x.clone(),
            cat: Arc::new(cat),
            proj: Functor { obj: proj_obj, mor: proj_mor },
            obj_off,
            mor_off,
        }
    }

    /// The object `(c, x)`.
    pub fn object(&self, c: u32, e: u32) -> u32 {
        self.obj_off[c as usize] + e
    }

    /// The pair `(c, x)` behind an object.
    pub fn element(&self, o: u32) -> (u32, u32) {
        let c = self.proj.obj[o as usize];
        (c, o - self.obj_off[c as usize])
    }

    /// The morphism `(f, x)` into `(cod f, x)`.
    pub fn morphism(&self, f: MorId, e: u32) -> MorId {
        self.mor_off[f as usize] + e
    }

    /// Pullback along the projection: `(π*A)(c, x) = A(c)`.
    pub fn pull(&self, a: &Presheaf) -> Presheaf {
        a.reindex(&self.cat, &self.proj)
    }

    /// Pullback of a map along the projection.
    pub fn pull_map(&self, f: &NatTrans) -> NatTrans {
        f.reindex(&self.cat, &self.proj)
    }

    /// The generic element `1 -> π*X`, picking `x` at `(c, x)`.
    pub fn generic_point(&self) -> NatTrans {
        let one = terminal(&self.cat).into_psh();
        let px = self.pull(&self.x).into_psh();
        let comp = (0..self.cat.num_objects() as u32).map(|o| vec![self.element(o).1]).collect();
        NatTrans::new(one, px, comp).expect("the generic element is natural")
    }

    /// Checks that the projection is a discrete fibration: every base
    /// morphism into `c` lifts uniquely to a morphism into each `(c, x)`.
    pub fn is_discrete_fibration(&self) -> bool {
        (0..self.cat.num_objects() as u32).all(|o| {
            let (c, _) = self.element(o);
            let mut lifted: Vec<MorId> = self.cat.incoming(o).iter().map(|&m| self.proj.mor[m as usize]).collect();
            lifted.sort_unstable();
            let mut base: Vec<MorId> = self.base.incoming(c).to_vec();
            base.sort_unstable();
            lifted == base
        })
    }
}
