//! Dependent products: the right adjoint `f_*` to pullback along `f`, and
//! searches for maps over a fixed base.

use std::collections::HashMap;

use super::{pullback, yoneda, Limit, NatTrans, Presheaf, Psh};
use crate::error::{Error, Result};
use crate::search::{Budget, NatSearch};

/// A search for maps `B -> E` commuting with given maps to a common base.
pub fn search_over<'a>(b: &'a NatTrans, e: &'a NatTrans) -> Result<NatSearch<'a>> {
    if !b.tgt().same_as(e.tgt()) {
        return Err(Error::Input("maps over different bases".into()));
    }
    let site = b.src().site();
    let mut s = NatSearch::new(b.src(), e.src())?;
    for c in 0..site.num_objects() as u32 {
        for x in 0..b.src().size(c) as u32 {
            let over = b.apply(c, x);
            s.retain(c, x, |v| e.apply(c, v) == over);
        }
    }
    Ok(s)
}

/// All maps `B -> E` over the common base, in canonical order.
pub fn maps_over(b: &NatTrans, e: &NatTrans, budget: &mut Budget) -> Result<Vec<NatTrans>> {
    let sols = search_over(b, e)?.all(budget)?;
    Ok(sols.into_iter().map(|c| NatTrans::from_parts(b.src().clone(), e.src().clone(), c)).collect())
}

/// `f_*A` for `a : A -> X` and `f : X -> Y`, with its projection to `Y`.
///
/// A cell at `c` is a point `y ∈ Y(c)` together with a section of `a` over
/// the pullback `y(c) ×_Y X`, stored as a flat table indexed by
/// `(d, h : d -> c, x ∈ X(d))` with unused slots set to `u32::MAX`.
#[derive(Clone, Debug)]
pub struct Pushforward {
    pub obj: Psh,
    pub to_base: NatTrans,
    pub a: NatTrans,
    pub f: NatTrans,
    cells: Vec<Vec<(u32, Vec<u32>)>>,
    offsets: Vec<Vec<usize>>,
}

impl Pushforward {
    fn slot(&self, c: u32, d: u32, h_pos: usize, x: u32) -> usize {
        self.offsets[c as usize][d as usize] + h_pos * self.f.src().size(d) + x as usize
    }

    /// The base point and section behind a cell.
    pub fn cell(&self, c: u32, w: u32) -> &(u32, Vec<u32>) {
        &self.cells[c as usize][w as usize]
    }

    /// The counit `f*(f_*A) -> A` over `X`, as a map out of the given pullback
    /// of `to_base` along `f` (first projection to `f_*A`, second to `X`).
    pub fn counit(&self, pb: &Limit) -> NatTrans {
        let site = self.obj.site();
        let comp = (0..site.num_objects() as u32)
            .map(|c| {
                (0..pb.obj.size(c) as u32)
                    .map(|z| {
                        let t = pb.tuple(c, z);
                        let (_, s) = self.cell(c, t[0]);
                        s[self.slot(c, c, site.pos_in_hom(site.id(c)), t[1])]
                    })
                    .collect()
            })
            .collect();
        NatTrans::from_parts(pb.obj.clone(), self.a.src().clone(), comp)
    }
}

pub fn pushforward(a: &NatTrans, f: &NatTrans, budget: &mut Budget) -> Result<Pushforward> {
    if !a.tgt().same_as(f.src()) {
        return Err(Error::Input("pushforward needs a : A -> X and f : X -> Y".into()));
    }
    let x = f.src();
    let y = f.tgt();
    let site = x.site().clone();
    let no = site.num_objects();
    let mut cells = Vec::with_capacity(no);
    let mut index = Vec::with_capacity(no);
    let mut offsets = Vec::with_capacity(no);
    for c in 0..no as u32 {
        let yc = yoneda(&site, c).into_psh();
        let mut off = Vec::with_capacity(no + 1);
        let mut total = 0;
        for d in 0..no as u32 {
            off.push(total);
            total += site.hom(d, c).len() * x.size(d);
        }
        off.push(total);
        let mut here = Vec::new();
        for pt in 0..y.size(c) as u32 {
            let comp = (0..no as u32).map(|d| site.hom(d, c).iter().map(|&h| y.apply(h, pt)).collect()).collect();
            let pt_map = NatTrans::from_parts(yc.clone(), y.clone(), comp);
            let p = pullback(&pt_map, f)?;
            let over = p.proj[1].clone();
            let mut search = NatSearch::new(&p.obj, a.src())?;
            for d in 0..no as u32 {
                for z in 0..p.obj.size(d) as u32 {
                    let xv = over.apply(d, z);
                    search.retain(d, z, |v| a.apply(d, v) == xv);
                }
            }
            let mut secs: Vec<Vec<u32>> = search
                .all(budget)?
                .into_iter()
                .map(|comp| {
                    let mut table = vec![u32::MAX; total];
                    for d in 0..no as u32 {
                        for (z, &v) in comp[d as usize].iter().enumerate() {
                            let t = p.tuple(d, z as u32);
                            table[off[d as usize] + t[0] as usize * x.size(d) + t[1] as usize] = v;
                        }
                    }
                    table
                })
                .collect();
            secs.sort();
            here.extend(secs.into_iter().map(|s| (pt, s)));
        }
        index.push(here.iter().enumerate().map(|(i, k)| (k.clone(), i as u32)).collect::<HashMap<_, _>>());
        cells.push(here);
        offsets.push(off);
    }
    let sizes: Vec<usize> = cells.iter().map(|l| l.len()).collect();
    let mut act = Vec::with_capacity(site.num_morphisms());
    for u in 0..site.num_morphisms() as u32 {
        let (cp, c) = (site.dom(u), site.cod(u));
        let mut t = Vec::with_capacity(sizes[c as usize]);
        for (pt, s) in &cells[c as usize] {
            let mut table = vec![u32::MAX; offsets[cp as usize][no]];
            for d in 0..no as u32 {
                for (hp, &h) in site.hom(d, cp).iter().enumerate() {
                    let uh = site.pos_in_hom(site.compose(u, h));
                    for xv in 0..x.size(d) {
                        table[offsets[cp as usize][d as usize] + hp * x.size(d) + xv] =
                            s[offsets[c as usize][d as usize] + uh * x.size(d) + xv];
                    }
                }
            }
            let key = (y.apply(u, *pt), table);
            t.push(*index[cp as usize]
                .get(&key)
                .ok_or_else(|| Error::Malformed("pushforward action left the carrier".into()))?);
        }
        act.push(t);
    }
    let obj = Presheaf::from_parts(site.clone(), sizes, act, 0, true).into_psh();
    let to_base = NatTrans::from_parts(
        obj.clone(),
        y.clone(),
        cells.iter().map(|l| l.iter().map(|(pt, _)| *pt).collect()).collect(),
    );
    Ok(Pushforward { obj, to_base, a: a.clone(), f: f.clone(), cells, offsets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;
    use crate::presheaf::{coproduct, iso_search, terminal};

    #[test]
    fn pushforward_along_identity_is_the_input() {
        let s = build_site(1).unwrap();
        let one = terminal(&s).into_psh();
        let two = coproduct(&one, &one).obj;
        let i = yoneda(&s, 1).into_psh();
        let p = crate::presheaf::product(&i, &two).unwrap();
        let a = p.proj[0].clone();
        let id = NatTrans::identity(&i);
        let pf = pushforward(&a, &id, &mut Budget::default()).unwrap();
        assert!(pf.obj.audit().is_none());
        assert!(iso_search(&pf.obj, &p.obj, &mut Budget::default()).unwrap().is_some());
    }

    #[test]
    fn pushforward_of_identity_is_terminal_over_base() {
        let s = build_site(1).unwrap();
        let one = terminal(&s).into_psh();
        let i = yoneda(&s, 1).into_psh();
        let f = NatTrans::to_terminal(&i);
        let pf = pushforward(&NatTrans::identity(&i), &f, &mut Budget::default()).unwrap();
        assert_eq!(pf.obj.sizes(), one.sizes());
    }
}
