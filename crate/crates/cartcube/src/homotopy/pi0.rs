//! Connected components `π₀X`, the coequalizer of `X₁ ⇉ X₀` along the
//! endpoint maps.

use petgraph::unionfind::UnionFind;
use serde_json::json;

use crate::error::{Error, Result};
use crate::interval::endpoint_cell;
use crate::presheaf::{product, NatTrans, Presheaf, Psh};
use crate::report::CheckReport;

/// The component of each vertex, numbered in order of least vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi0 {
    pub component: Vec<u32>,
    pub count: usize,
}

pub fn pi0(x: &Presheaf) -> Result<Pi0> {
    let site = x.site();
    let depth = site.cube().map(|d| d.n).ok_or_else(|| Error::Input("π₀ needs a cube site".into()))?;
    let n0 = x.size(0);
    let mut uf = UnionFind::<usize>::new(n0);
    if depth >= 1 {
        let d0 = site.hom(0, 1)[endpoint_cell(0, false) as usize];
        let d1 = site.hom(0, 1)[endpoint_cell(0, true) as usize];
        for e in 0..x.size(1) as u32 {
            uf.union(x.apply(d0, e) as usize, x.apply(d1, e) as usize);
        }
    }
    let mut label = vec![u32::MAX; n0];
    let mut component = Vec::with_capacity(n0);
    let mut count = 0;
    for v in 0..n0 {
        let r = uf.find(v);
        if label[r] == u32::MAX {
            label[r] = count as u32;
            count += 1;
        }
        component.push(label[r]);
    }
    Ok(Pi0 { component, count })
}

impl Pi0 {
    pub fn same(&self, a: u32, b: u32) -> bool {
        self.component[a as usize] == self.component[b as usize]
    }

    /// The vertices of each component.
    pub fn classes(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.component.iter().enumerate() {
            out[c as usize].push(v as u32);
        }
        out
    }
}

/// `π₀f : π₀X -> π₀Y`.
pub fn pi0_map(f: &NatTrans, px: &Pi0, py: &Pi0) -> Vec<u32> {
    let mut out = vec![0u32; px.count];
    for (v, &c) in px.component.iter().enumerate() {
        out[c as usize] = py.component[f.apply(0, v as u32) as usize];
    }
    out
}

/// Checks that `π₀(X×Y) -> π₀X × π₀Y` is a bijection.
pub fn check_pi0_product(x: &Psh, y: &Psh) -> Result<CheckReport> {
    let mut r = CheckReport::new("pi0-product");
    let p = product(x, y)?;
    let (pp, px, py) = (pi0(&p.obj)?, pi0(x)?, pi0(y)?);
    let to_x = pi0_map(&p.proj[0], &pp, &px);
    let to_y = pi0_map(&p.proj[1], &pp, &py);
    let mut hit = vec![false; px.count * py.count];
    for c in 0..pp.count {
        let slot = to_x[c] as usize * py.count + to_y[c] as usize;
        if hit[slot] {
            r.fail("two components of the product map to the same pair", json!({"pair": [to_x[c], to_y[c]]}));
            return Ok(r);
        }
        hit[slot] = true;
    }
    r.count("product_components", pp.count as u64);
    r.count("pairs", (px.count * py.count) as u64);
    r.require(pp.count == px.count * py.count, "a pair of components is missed", || {
        json!({"product": pp.count, "left": px.count, "right": py.count})
    });
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;
    use crate::interval::IntervalKit;
    use crate::presheaf::{coequalizer, random_presheaf, Shape};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn interval_and_two_points() {
        let s = build_site(2).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        assert_eq!(pi0(&kit.i).unwrap().count, 1);
        assert_eq!(pi0(&kit.two.obj).unwrap().count, 2);
        assert_eq!(pi0(&kit.one).unwrap().count, 1);
        let circle = coequalizer(&kit.delta0, &kit.delta1).unwrap().obj;
        assert_eq!(pi0(&circle).unwrap().count, 1);
    }

    #[test]
    fn functorial_on_endpoints() {
        let s = build_site(1).unwrap();
        let kit = IntervalKit::new(&s).unwrap();
        let (p1, pi) = (pi0(&kit.one).unwrap(), pi0(&kit.i).unwrap());
        assert_eq!(pi0_map(&kit.delta0, &p1, &pi), vec![0]);
    }

    #[test]
    fn products_on_random_pairs() {
        let s = build_site(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let x = random_presheaf(&s, &mut rng, Shape::default()).unwrap();
            let y = random_presheaf(&s, &mut rng, Shape::default()).unwrap();
            assert!(check_pi0_product(&x, &y).unwrap().passed());
        }
    }
}
