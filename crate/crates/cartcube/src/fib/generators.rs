//! Generating trivial cofibrations `c ⊗_i δ : Z +_C (C×I) ↣ Z×I`.

use serde::{Deserialize, Serialize};

use crate::cofib::CofibrationClass;
use crate::cube::CubeMap;
use crate::error::{Error, Result};
use crate::fincat::MorId;
use crate::interval::endpoint_cell;
use crate::presheaf::{product, pushout, yoneda, yoneda_map, Colimit, Limit, NatTrans, Psh, Subobject};

/// Which generators a fibration structure must fill against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Every indexing map `i : Z -> I`.
    Unbiased,
    /// Only the constant indexing at one endpoint.
    Biased(bool),
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Unbiased => "unbiased",
            Mode::Biased(false) => "biased-0",
            Mode::Biased(true) => "biased-1",
        }
    }

    pub fn by_name(s: &str) -> Result<Mode> {
        match s {
            "unbiased" => Ok(Mode::Unbiased),
            "biased-0" => Ok(Mode::Biased(false)),
            "biased-1" => Ok(Mode::Biased(true)),
            other => Err(Error::Input(format!("unknown fibration mode `{other}`"))),
        }
    }

    /// The indexing maps `[n] -> [1]` this mode uses, as ranks in `hom([n], [1])`.
    pub fn indexings(self, n: usize) -> Vec<u32> {
        match self {
            Mode::Unbiased => (0..n as u32 + 2).collect(),
            Mode::Biased(eps) => vec![endpoint_cell(n, eps)],
        }
    }
}

/// A generating trivial cofibration and the pieces it is assembled from.
#[derive(Clone, Debug)]
pub struct GeneratingTrivialCofibration {
    /// The cofibration `c : C ↣ Z`.
    pub c: NatTrans,
    /// The indexing `i : Z -> I`.
    pub i: NatTrans,
    /// `Z × I`.
    pub cylinder: Limit,
    /// The graph `⟨1_Z, i⟩ : Z -> Z×I`.
    pub graph: NatTrans,
    /// `Z +_C (C×I)`, injections from `Z` and `C×I`.
    pub domain: Colimit,
    /// `c ⊗_i δ`.
    pub map: NatTrans,
    /// For basic generators `C ↣ y[n]`: `n`, the sieve index of `C`, and the rank of `i`.
    pub basic: Option<(usize, u32, u32)>,
}

impl GeneratingTrivialCofibration {
    /// `c ⊗_i δ = [⟨i⟩, c×I]` for a mono `c : C -> Z` and `i : Z -> I`.
    pub fn new(c: &NatTrans, i: &NatTrans, interval: &Psh) -> Result<GeneratingTrivialCofibration> {
        if !c.is_mono() {
            return Err(Error::Input("c must be a monomorphism".into()));
        }
        if !i.src().same_as(c.tgt()) || !i.tgt().same_as(interval) {
            return Err(Error::Input("the indexing must be a map Z -> I".into()));
        }
        let z = c.tgt();
        let cylinder = product(z, interval)?;
        let graph = cylinder.pair(&[NatTrans::identity(z), i.clone()])?;
        let ci = product(c.src(), interval)?;
        let c_times_i = cylinder.pair(&[ci.proj[0].then(c)?, ci.proj[1].clone()])?;
        let ic = c.then(i)?;
        let graph_c = ci.pair(&[NatTrans::identity(c.src()), ic])?;
        let domain = pushout(c, &graph_c)?;
        let map = domain.copair(&[graph.clone(), c_times_i])?;
        Ok(GeneratingTrivialCofibration { c: c.clone(), i: i.clone(), cylinder, graph, domain, map, basic: None })
    }

    /// The basic generator for the sieve `s` on `[n]` and the indexing of rank `i`.
    pub fn basic(class: &CofibrationClass, n: usize, s: u32, i: u32) -> Result<GeneratingTrivialCofibration> {
        let site = class.site();
        if site.cube().is_none() || n + 1 > site.depth() {
            return Err(Error::Dimension(format!("a basic generator over [{n}] needs [{}] in the site", n + 1)));
        }
        let yn = yoneda(site, n as u32).into_psh();
        let interval = yoneda(site, 1).into_psh();
        let (cpsh, c) = class.omega().as_subobject(&yn, n as u32, s).to_presheaf();
        debug_assert!(cpsh.same_as(c.src()));
        let idx = yoneda_map(&interval, n as u32, i);
        let mut g = GeneratingTrivialCofibration::new(&c, &idx, &interval)?;
        g.basic = Some((n, s, i));
        Ok(g)
    }

    /// The image of `c ⊗_i δ` in `Z×I`.
    pub fn image(&self) -> Subobject {
        Subobject::image(&self.map)
    }

    /// For a basic generator, the image transported along `y[n+1] ≅ y[n]×I`
    /// (last coordinate to `I`), as a sieve on `[n+1]`.
    pub fn sieve(&self) -> Result<Subobject> {
        let (n, _, _) = self.basic.ok_or_else(|| Error::Input("not a basic generator".into()))?;
        let site = self.c.src().site();
        let top = yoneda(site, n as u32 + 1).into_psh();
        let image = self.image();
        let mut cells = Vec::with_capacity(site.num_objects());
        for k in 0..site.num_objects() as u32 {
            let mut here = Vec::new();
            for (pos, &h) in site.hom(k, n as u32 + 1).iter().enumerate() {
                let (p, q) = split_last(site.cube_map(h).expect("cube site"));
                let key = [site.pos_in_hom(site.cube_mor(&p)?) as u32, site.pos_in_hom(site.cube_mor(&q)?) as u32];
                let cell = self.cylinder.cell(k, &key).expect("the product has every pair");
                if image.contains(k, cell) {
                    here.push(pos as u32);
                }
            }
            cells.push(here);
        }
        Subobject::new(&top, &cells)
    }

    /// The members of [`Self::sieve`] as morphisms into `[n+1]`, in order of
    /// domain and then hom position.
    pub fn members(&self) -> Result<Vec<MorId>> {
        let (n, _, _) = self.basic.ok_or_else(|| Error::Input("not a basic generator".into()))?;
        let site = self.c.src().site();
        let s = self.sieve()?;
        Ok((0..site.num_objects() as u32)
            .flat_map(|k| s.cells(k).into_iter().map(move |p| site.hom(k, n as u32 + 1)[p as usize]))
            .collect())
    }
}

/// `h : [k] -> [n+1]` as the pair `(π h, last h)`.
fn split_last(h: &CubeMap) -> (CubeMap, CubeMap) {
    let e = h.entries();
    let n = e.len() - 1;
    (
        CubeMap::new(h.src(), e[..n].to_vec()).expect("prefix of a cube map"),
        CubeMap::new(h.src(), e[n..].to_vec()).expect("last entry of a cube map"),
    )
}

/// All basic generators `c ⊗_i δ : B ↣ y[n+1]` with `n + 1 ≤ top`, `c` in the
/// class and `i` allowed by the mode; ordered by `n`, sieve, then indexing.
pub fn enumerate_generators(class: &CofibrationClass, mode: Mode, top: usize) -> Result<Vec<GeneratingTrivialCofibration>> {
    let mut out = Vec::new();
    for n in 0..top {
        for s in class.allowed_sieves(n as u32) {
            for i in mode.indexings(n) {
                out.push(GeneratingTrivialCofibration::basic(class, n, s, i)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;
    use crate::interval::IntervalKit;
    use crate::presheaf::iso_search;
    use crate::search::Budget;

    #[test]
    fn biased_level_zero_generators_are_the_endpoints() {
        let s = build_site(1).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let kit = IntervalKit::new(&s).unwrap();
        for eps in [false, true] {
            let gens = enumerate_generators(&class, Mode::Biased(eps), 1).unwrap();
            // The empty sieve gives δ_ε; the full sieve gives an isomorphism.
            assert_eq!(gens.len(), 2);
            let empty = gens.iter().find(|g| g.c.src().is_empty()).unwrap();
            let want = Subobject::image(kit.endpoint(eps));
            let got = empty.sieve().unwrap();
            assert_eq!(got.bits(), want.bits());
            let full = gens.iter().find(|g| !g.c.src().is_empty()).unwrap();
            assert!(full.map.is_iso());
        }
    }

    #[test]
    fn every_generator_is_graph_join_cylinder() {
        let s = build_site(2).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let gens = enumerate_generators(&class, Mode::Unbiased, 2).unwrap();
        for g in &gens {
            assert!(g.map.is_mono());
            assert!(g.graph.is_mono());
            let cyl = Subobject::image(&g.domain.inj[1].then(&g.map).unwrap());
            let join = Subobject::image(&g.graph).union(&cyl).unwrap();
            assert_eq!(join.bits(), g.image().bits());
        }
    }

    #[test]
    fn counts_at_two() {
        let s = build_site(2).unwrap();
        let class = CofibrationClass::all_monos(&s);
        let gens = enumerate_generators(&class, Mode::Unbiased, 2).unwrap();
        let sieves1 = class.allowed_sieves(1).len();
        let at1 = gens.iter().filter(|g| g.basic.unwrap().0 == 1).count();
        assert_eq!(at1, sieves1 * 3);
        assert_eq!(gens.len() - at1, 2 * 2);
    }

    #[test]
    fn graphs_are_generators() {
        // With c = 0 ↣ y[n], c ⊗_i δ is the graph of i.
        let s = build_site(2).unwrap();
        let class = CofibrationClass::all_monos(&s);
        for g in enumerate_generators(&class, Mode::Unbiased, 2).unwrap() {
            if g.c.src().is_empty() {
                assert!(iso_search(g.map.src(), g.c.tgt(), &mut Budget::default()).unwrap().is_some());
                assert_eq!(Subobject::image(&g.graph).bits(), g.image().bits());
            }
        }
    }
}
