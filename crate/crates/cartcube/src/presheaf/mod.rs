//! Finite presheaves on a finite site and the operations of the presheaf topos.
//!
//! A presheaf `X` assigns to each object `c` a carrier `X(c) = {0, ..., n-1}`
//! and to each morphism `f : c -> d` a function `X(f) : X(d) -> X(c)`.
//! Every presheaf carries a validity horizon: the levels up to which it is
//! known to agree with the untruncated computation.

pub mod iso;
pub mod json;
pub mod omega;
pub mod ops;
pub mod pushforward;
pub mod random;
pub mod subobject;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{Functor, MorId, Site};
use crate::search::{Budget, Components, NatSearch};

pub use iso::iso_search;
pub use json::{NatTransJson, PresheafJson, SiteJson};
pub use omega::{sieves, subobjects, Omega};
pub use pushforward::{maps_over, pushforward, search_over, Pushforward};
pub use ops::{
    codiscrete, codiscrete_map, coequalizer, colimit, coproduct, equalizer, exponential, exponential_on, initial, limit, product, pullback, pushout,
    terminal, yoneda, Colimit, Diagram, Exponential, Limit,
};
pub use random::{random_map, random_presheaf, yoneda_map, Shape};
pub use subobject::Subobject;

/// A levelwise-finite presheaf.
#[derive(Clone, Debug)]
pub struct Presheaf {
    site: Site,
    sizes: Vec<usize>,
    act: Vec<Vec<u32>>,
    validity: usize,
    intrinsic_only: bool,
}

pub type Psh = Arc<Presheaf>;

/// A composable pair `g ∘ f` and a cell `z` on which `X(g∘f)(z) ≠ X(f)(X(g)(z))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctorialityWitness {
    pub g: String,
    pub f: String,
    pub cell: u32,
}

impl Presheaf {
    /// Builds a presheaf, checking table shapes and functoriality.
    pub fn new(site: Site, sizes: Vec<usize>, act: Vec<Vec<u32>>) -> Result<Presheaf> {
        let depth = site.depth();
        let x = Presheaf { site, sizes, act, validity: depth, intrinsic_only: false };
        x.check_shape()?;
        if let Some(w) = x.audit() {
            return Err(Error::Malformed(format!(
                "action is not functorial at ({} ∘ {}) on cell {}",
                w.g, w.f, w.cell
            )));
        }
        Ok(x)
    }

    pub(crate) fn from_parts(site: Site, sizes: Vec<usize>, act: Vec<Vec<u32>>, validity: usize, intrinsic_only: bool) -> Presheaf {
        Presheaf { site, sizes, act, validity, intrinsic_only }
    }

    /// Builds a presheaf from sizes and an action function, without auditing.
    pub(crate) fn from_fn(site: Site, sizes: Vec<usize>, validity: usize, mut action: impl FnMut(MorId, u32) -> u32) -> Presheaf {
        let act = (0..site.num_morphisms() as MorId)
            .map(|f| (0..sizes[site.cod(f) as usize] as u32).map(|x| action(f, x)).collect())
            .collect();
        Presheaf { site, sizes, act, validity, intrinsic_only: false }
    }

    fn check_shape(&self) -> Result<()> {
        let s = &self.site;
        if self.sizes.len() != s.num_objects() || self.act.len() != s.num_morphisms() {
            return Err(Error::Malformed("presheaf tables do not match the site".into()));
        }
        for f in 0..s.num_morphisms() as MorId {
            let (c, d) = (s.dom(f) as usize, s.cod(f) as usize);
            let t = &self.act[f as usize];
            if t.len() != self.sizes[d] || t.iter().any(|&v| v as usize >= self.sizes[c]) {
                return Err(Error::Malformed(format!("action of {} has the wrong shape", s.morphism(f).name)));
            }
            if s.is_identity(f) && t.iter().enumerate().any(|(i, &v)| v as usize != i) {
                return Err(Error::Malformed(format!("identity {} does not act trivially", s.morphism(f).name)));
            }
        }
        Ok(())
    }

    /// Checks `X(g∘f) = X(f)∘X(g)` on every composable pair and every cell.
    pub fn audit(&self) -> Option<FunctorialityWitness> {
        let s = &self.site;
        for f in 0..s.num_morphisms() as MorId {
            if s.is_identity(f) && self.act[f as usize].iter().enumerate().any(|(i, &v)| v as usize != i) {
                return Some(FunctorialityWitness { g: s.morphism(f).name.clone(), f: s.morphism(f).name.clone(), cell: 0 });
            }
            for &g in s.out_of(s.cod(f)) {
                let gf = s.compose(g, f);
                let (ag, af, agf) = (&self.act[g as usize], &self.act[f as usize], &self.act[gf as usize]);
                for z in 0..ag.len() {
                    if agf[z] != af[ag[z] as usize] {
                        return Some(FunctorialityWitness {
                            g: s.morphism(g).name.clone(),
                            f: s.morphism(f).name.clone(),
                            cell: z as u32,
                        });
                    }
                }
            }
        }
        None
    }

    pub fn site(&self) -> &Site {
        &self.site
    }

    pub fn size(&self, c: u32) -> usize {
        self.sizes[c as usize]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn act(&self, f: MorId) -> &[u32] {
        &self.act[f as usize]
    }

    pub fn actions(&self) -> &[Vec<u32>] {
        &self.act
    }

    /// `X(f)(x)`.
    pub fn apply(&self, f: MorId, x: u32) -> u32 {
        self.act[f as usize][x as usize]
    }

    pub fn total_cells(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_cells() == 0
    }

    pub fn validity(&self) -> usize {
        self.validity
    }

    pub fn intrinsic_only(&self) -> bool {
        self.intrinsic_only
    }

    pub fn with_validity(mut self, validity: usize, intrinsic_only: bool) -> Presheaf {
        self.validity = validity;
        self.intrinsic_only = intrinsic_only;
        self
    }

    pub fn into_psh(self) -> Psh {
        Arc::new(self)
    }

    /// Structural equality: same site, sizes and action tables.
    pub fn same_as(&self, other: &Presheaf) -> bool {
        std::ptr::eq(self, other)
            || (self.sizes == other.sizes && self.act == other.act && self.site.same_as(&other.site))
    }

    /// Same underlying tables, ignoring validity annotations.
    pub fn same_tables(&self, other: &Presheaf) -> bool {
        self.same_as(other)
    }

    /// Restriction along a functor `F : site -> self.site()`: `(F*X)(e) = X(F e)`.
    pub fn reindex(&self, site: &Site, functor: &Functor) -> Presheaf {
        let sizes = functor.obj.iter().map(|&a| self.sizes[a as usize]).collect();
        let act = functor.mor.iter().map(|&f| self.act[f as usize].clone()).collect();
        Presheaf { site: site.clone(), sizes, act, validity: self.validity, intrinsic_only: self.intrinsic_only }
    }

    /// Restriction to the objects of level at most `k` of a cube site.
    pub fn truncate(&self, k: usize) -> Result<Presheaf> {
        let keep = self.site.objects_up_to_level(k);
        let (sub, inc) = self.site.full_subcategory(&keep);
        let sub = Arc::new(sub);
        let mut x = self.reindex(&sub, &inc);
        x.validity = x.validity.min(k);
        Ok(x)
    }

    /// Replaces `X(f)[x]` by `v` without any checks; used for negative controls.
    pub fn mutate(&mut self, f: MorId, x: u32, v: u32) {
        self.act[f as usize][x as usize] = v;
    }
}

/// A composable pair witness for naturality failure: `f : c -> d`, a cell
/// `x ∈ X(d)` with `α_c(X(f)x) ≠ Y(f)(α_d x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NaturalityWitness {
    pub morphism: String,
    pub cell: u32,
}

/// A natural transformation between presheaves on the same site.
#[derive(Clone, Debug)]
pub struct NatTrans {
    src: Psh,
    tgt: Psh,
    comp: Components,
}

impl NatTrans {
    /// Builds a natural transformation, checking shapes and naturality.
    pub fn new(src: Psh, tgt: Psh, comp: Components) -> Result<NatTrans> {
        if !src.site.same_as(&tgt.site) {
            return Err(Error::SiteMismatch);
        }
        let s = &src.site;
        if comp.len() != s.num_objects() {
            return Err(Error::Malformed("component table count does not match the site".into()));
        }
        for c in 0..s.num_objects() {
            if comp[c].len() != src.sizes[c] || comp[c].iter().any(|&v| v as usize >= tgt.sizes[c]) {
                return Err(Error::Malformed(format!("component at {} has the wrong shape", s.object_name(c as u32))));
            }
        }
        let t = NatTrans { src, tgt, comp };
        if let Some(w) = t.naturality_failure() {
            return Err(Error::Malformed(format!("not natural at {} on cell {}", w.morphism, w.cell)));
        }
        Ok(t)
    }

    pub(crate) fn from_parts(src: Psh, tgt: Psh, comp: Components) -> NatTrans {
        NatTrans { src, tgt, comp }
    }

    pub fn identity(x: &Psh) -> NatTrans {
        let comp = x.sizes.iter().map(|&n| (0..n as u32).collect()).collect();
        NatTrans { src: x.clone(), tgt: x.clone(), comp }
    }

    /// The unique map from `x` to the terminal presheaf.
    pub fn to_terminal(x: &Psh) -> NatTrans {
        let one = terminal(x.site()).into_psh();
        let comp = x.sizes.iter().map(|&n| vec![0; n]).collect();
        NatTrans { src: x.clone(), tgt: one, comp }
    }

    /// The unique map from the initial presheaf to `x`.
    pub fn from_initial(x: &Psh) -> NatTrans {
        let zero = initial(x.site()).into_psh();
        let comp = x.sizes.iter().map(|_| Vec::new()).collect();
        NatTrans { src: zero, tgt: x.clone(), comp }
    }

    pub fn src(&self) -> &Psh {
        &self.src
    }

    pub fn tgt(&self) -> &Psh {
        &self.tgt
    }

    pub fn component(&self, c: u32) -> &[u32] {
        &self.comp[c as usize]
    }

    pub fn components(&self) -> &Components {
        &self.comp
    }

    pub fn apply(&self, c: u32, x: u32) -> u32 {
        self.comp[c as usize][x as usize]
    }

    pub fn naturality_failure(&self) -> Option<NaturalityWitness> {
        let s = &self.src.site;
        for f in 0..s.num_morphisms() as MorId {
            let (c, d) = (s.dom(f) as usize, s.cod(f) as usize);
            for x in 0..self.src.sizes[d] {
                let lhs = self.comp[c][self.src.act[f as usize][x] as usize];
                let rhs = self.tgt.act[f as usize][self.comp[d][x] as usize];
                if lhs != rhs {
                    return Some(NaturalityWitness { morphism: s.morphism(f).name.clone(), cell: x as u32 });
                }
            }
        }
        None
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &NatTrans) -> Result<NatTrans> {
        if !self.tgt.same_as(&g.src) {
            return Err(Error::Input("maps are not composable".into()));
        }
        let comp = self
            .comp
            .iter()
            .enumerate()
            .map(|(c, t)| t.iter().map(|&v| g.comp[c][v as usize]).collect())
            .collect();
        Ok(NatTrans { src: self.src.clone(), tgt: g.tgt.clone(), comp })
    }

    /// `g ∘ f`.
    pub fn compose(g: &NatTrans, f: &NatTrans) -> Result<NatTrans> {
        f.then(g)
    }

    pub fn is_mono(&self) -> bool {
        self.comp.iter().enumerate().all(|(c, t)| {
            let mut seen = vec![false; self.tgt.sizes[c]];
            t.iter().all(|&v| !std::mem::replace(&mut seen[v as usize], true))
        })
    }

    pub fn is_epi(&self) -> bool {
        self.comp.iter().enumerate().all(|(c, t)| {
            let mut seen = vec![false; self.tgt.sizes[c]];
            t.iter().for_each(|&v| seen[v as usize] = true);
            seen.iter().all(|&b| b)
        })
    }

    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.is_epi()
    }

    pub fn inverse(&self) -> Option<NatTrans> {
        if !self.is_iso() {
            return None;
        }
        let comp = self
            .comp
            .iter()
            .enumerate()
            .map(|(c, t)| {
                let mut inv = vec![0; self.tgt.sizes[c]];
                for (x, &v) in t.iter().enumerate() {
                    inv[v as usize] = x as u32;
                }
                inv
            })
            .collect();
        Some(NatTrans { src: self.tgt.clone(), tgt: self.src.clone(), comp })
    }

    /// Same endpoints (structurally) and the same components.
    pub fn same_as(&self, other: &NatTrans) -> bool {
        self.comp == other.comp && self.src.same_as(&other.src) && self.tgt.same_as(&other.tgt)
    }

    /// Restriction along a functor into the site.
    pub fn reindex(&self, site: &Site, functor: &Functor) -> NatTrans {
        let src = self.src.reindex(site, functor).into_psh();
        let tgt = self.tgt.reindex(site, functor).into_psh();
        let comp = functor.obj.iter().map(|&a| self.comp[a as usize].clone()).collect();
        NatTrans { src, tgt, comp }
    }

    /// Restriction to the objects of level at most `k`.
    pub fn truncate(&self, k: usize) -> Result<NatTrans> {
        let keep = self.src.site.objects_up_to_level(k);
        let (sub, inc) = self.src.site.full_subcategory(&keep);
        Ok(self.reindex(&Arc::new(sub), &inc))
    }
}

/// All natural transformations `x -> y` in canonical order.
pub fn enumerate_nat_trans(x: &Psh, y: &Psh, budget: &mut Budget) -> Result<Vec<NatTrans>> {
    let sols = NatSearch::new(x, y)?.all(budget)?;
    Ok(sols.into_iter().map(|c| NatTrans::from_parts(x.clone(), y.clone(), c)).collect())
}

/// `|Nat(x, y)|`.
pub fn count_nat_trans(x: &Psh, y: &Psh, budget: &mut Budget) -> Result<u64> {
    NatSearch::new(x, y)?.count(budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;

    #[test]
    fn hom_interval_interval_has_three_elements() {
        let site = build_site(2).unwrap();
        let i = yoneda(&site, 1).into_psh();
        assert_eq!(count_nat_trans(&i, &i, &mut Budget::default()).unwrap(), 3);
    }

    #[test]
    fn maps_into_terminal_and_out_of_initial() {
        let site = build_site(2).unwrap();
        let x = yoneda(&site, 2).into_psh();
        let one = terminal(&site).into_psh();
        let zero = initial(&site).into_psh();
        assert_eq!(count_nat_trans(&x, &one, &mut Budget::default()).unwrap(), 1);
        assert_eq!(count_nat_trans(&zero, &x, &mut Budget::default()).unwrap(), 1);
        assert_eq!(count_nat_trans(&x, &zero, &mut Budget::default()).unwrap(), 0);
    }

    #[test]
    fn yoneda_counts() {
        let site = build_site(2).unwrap();
        assert_eq!(yoneda(&site, 1).sizes(), &[2, 3, 4]);
        assert_eq!(yoneda(&site, 0).sizes(), &[1, 1, 1]);
        assert!(yoneda(&site, 2).audit().is_none());
    }

    #[test]
    fn audit_catches_a_mutation() {
        let site = build_site(1).unwrap();
        let mut x = yoneda(&site, 1);
        let f = site.cube_mor(&"[1->1: 0]".parse().unwrap()).unwrap();
        x.mutate(f, 1, 2);
        assert!(x.audit().is_some());
        assert!(Presheaf::new(site.clone(), x.sizes().to_vec(), x.actions().to_vec()).is_err());
    }

    #[test]
    fn yoneda_lemma_counts() {
        let site = build_site(2).unwrap();
        let x = ops::coproduct(&yoneda(&site, 1).into_psh(), &terminal(&site).into_psh()).obj;
        for c in 0..3 {
            let yc = yoneda(&site, c).into_psh();
            assert_eq!(count_nat_trans(&yc, &x, &mut Budget::default()).unwrap() as usize, x.size(c));
        }
    }
}
