//! The cubical nerve `N(C)_n = Cat(𝟚ⁿ, C)` and its full faithfulness.

use std::collections::HashMap;

use serde_json::json;

use crate::cube::{CubeMap, Entry};
use crate::error::{Error, Result};
use crate::fincat::{functors, FinCat, Functor, MorId, Morphism, Site};
use crate::presheaf::{NatTrans, Presheaf, Psh};
use crate::report::CheckReport;
use crate::search::{Budget, NatSearch};

/// The poset `𝟚ⁿ` of subsets of `{1..n}`, as bitmasks.
pub fn cube_poset(n: usize) -> FinCat {
    let size = 1u32 << n;
    let mut mors = Vec::new();
    let mut index = HashMap::new();
    for a in 0..size {
        for b in 0..size {
            if a & !b == 0 {
                index.insert((a, b), mors.len() as MorId);
                mors.push(Morphism { dom: a, cod: b, name: format!("{a:b}<={b:b}") });
            }
        }
    }
    let ends: Vec<(u32, u32)> = mors.iter().map(|m| (m.dom, m.cod)).collect();
    let ids = (0..size).map(|a| index[&(a, a)]).collect();
    let levels = (0..size).map(|a| a.count_ones() as usize).collect();
    FinCat::new(
        (0..size).map(|a| format!("{a:0n$b}")).collect(),
        levels,
        mors,
        ids,
        |g, f| index[&(ends[f as usize].0, ends[g as usize].1)],
        n,
    )
    .expect("a poset is a category")
}

fn image(f: &CubeMap, v: u32) -> u32 {
    f.entries().iter().enumerate().fold(0, |w, (i, e)| {
        let bit = match *e {
            Entry::Zero => 0,
            Entry::One => 1,
            Entry::Var(k) => (v >> (k - 1)) & 1,
        };
        w | (bit << i)
    })
}

/// The monotone map `𝟚ᵐ -> 𝟚ⁿ` of a cube map `[m] -> [n]`.
pub fn poset_map(f: &CubeMap, src: &FinCat, tgt: &FinCat) -> Functor {
    let obj: Vec<u32> = (0..src.num_objects() as u32).map(|v| image(f, v)).collect();
    let mor = (0..src.num_morphisms() as MorId)
        .map(|m| {
            let (a, b) = (obj[src.dom(m) as usize], obj[src.cod(m) as usize]);
            tgt.hom(a, b)[0]
        })
        .collect();
    Functor { obj, mor }
}

/// `N(C)` with the functor behind each cell.
#[derive(Clone, Debug)]
pub struct CubicalNerve {
    pub obj: Psh,
    pub cells: Vec<Vec<Functor>>,
    index: Vec<HashMap<Functor, u32>>,
}

impl CubicalNerve {
    pub fn cell_of(&self, n: u32, f: &Functor) -> Option<u32> {
        self.index[n as usize].get(f).copied()
    }

    /// `N(F) : N(C) -> N(D)`, by postcomposition.
    pub fn map(&self, f: &Functor, target: &CubicalNerve) -> Result<NatTrans> {
        let mut comp = Vec::with_capacity(self.cells.len());
        for (n, cells) in self.cells.iter().enumerate() {
            let t: Option<Vec<u32>> = cells.iter().map(|g| target.cell_of(n as u32, &f.after(g))).collect();
            comp.push(t.ok_or_else(|| Error::Input("the functor does not land in the target nerve".into()))?);
        }
        NatTrans::new(self.obj.clone(), target.obj.clone(), comp)
    }
}

/// The cubical nerve of `c` on a cube site.
pub fn cubical_nerve(c: &FinCat, site: &Site, budget: &mut Budget) -> Result<CubicalNerve> {
    let top = site.cube().map(|d| d.n).ok_or_else(|| Error::Input("the cubical nerve needs a cube site".into()))?;
    let posets: Vec<FinCat> = (0..=top).map(cube_poset).collect();
    let mut cells = Vec::with_capacity(top + 1);
    for p in &posets {
        cells.push(functors(p, c, budget)?);
    }
    let index: Vec<HashMap<Functor, u32>> =
        cells.iter().map(|fs| fs.iter().enumerate().map(|(i, f)| (f.clone(), i as u32)).collect()).collect();
    let mut act = Vec::with_capacity(site.num_morphisms());
    for h in 0..site.num_morphisms() as MorId {
        let u = site.cube_map(h).expect("cube site");
        let (m, n) = (u.src(), u.tgt());
        let along = poset_map(u, &posets[m], &posets[n]);
        act.push(cells[n].iter().map(|f| index[m][&f.after(&along)]).collect());
    }
    let obj = Presheaf::new(site.clone(), cells.iter().map(Vec::len).collect(), act)?.into_psh();
    Ok(CubicalNerve { obj, cells, index })
}

/// Checks that `N : Cat(C, D) -> Nat(N(C), N(D))` is a bijection: the
/// images of distinct functors are distinct natural maps, and the two sets
/// have the same size.
pub fn check_full_faithfulness(c: &FinCat, d: &FinCat, site: &Site, budget: &mut Budget) -> Result<CheckReport> {
    let mut r = CheckReport::new("nerve-ff");
    let (nc, nd) = (cubical_nerve(c, site, budget)?, cubical_nerve(d, site, budget)?);
    let fs = functors(c, d, budget)?;
    let mut images = Vec::with_capacity(fs.len());
    for f in &fs {
        let m = nc.map(f, &nd)?;
        if m.naturality_failure().is_some() {
            r.fail("the image of a functor is not natural", json!({"functor": f.obj}));
            return Ok(r);
        }
        images.push(m.components().clone());
    }
    images.sort();
    images.dedup();
    let nats = NatSearch::new(&nc.obj, &nd.obj)?.count(budget)?;
    r.count("functors", fs.len() as u64);
    r.count("distinct_images", images.len() as u64);
    r.count("natural_maps", nats);
    r.require(images.len() == fs.len(), "two functors have the same nerve", || json!({"functors": fs.len()}));
    r.require(nats == fs.len() as u64, "some natural map is not the nerve of a functor", || {
        json!({"functors": fs.len(), "natural_maps": nats})
    });
    Ok(r)
}
