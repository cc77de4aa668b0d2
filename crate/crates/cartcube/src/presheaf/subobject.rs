//! Subpresheaves: levelwise subsets closed under the action.

use fixedbitset::FixedBitSet;

use super::{NatTrans, Presheaf, Psh};
use crate::error::{Error, Result};
use crate::fincat::MorId;

/// An action-closed levelwise subset of an ambient presheaf.
#[derive(Clone, Debug)]
pub struct Subobject {
    ambient: Psh,
    members: Vec<FixedBitSet>,
}

impl PartialEq for Subobject {
    fn eq(&self, other: &Subobject) -> bool {
        self.members == other.members && self.ambient.same_as(&other.ambient)
    }
}

impl Subobject {
    /// Builds a subobject from per-object cell lists, checking closure.
    pub fn new(ambient: &Psh, cells: &[Vec<u32>]) -> Result<Subobject> {
        if cells.len() != ambient.site().num_objects() {
            return Err(Error::Malformed("one cell list per object is required".into()));
        }
        let mut members = Vec::with_capacity(cells.len());
        for (c, list) in cells.iter().enumerate() {
            let mut b = FixedBitSet::with_capacity(ambient.size(c as u32));
            for &x in list {
                if x as usize >= b.len() {
                    return Err(Error::Malformed(format!("cell {x} is out of range")));
                }
                b.insert(x as usize);
            }
            members.push(b);
        }
        let s = Subobject { ambient: ambient.clone(), members };
        if let Some((f, x)) = s.closure_failure() {
            return Err(Error::Malformed(format!(
                "not closed: {} sends cell {x} outside the subset",
                ambient.site().morphism(f).name
            )));
        }
        Ok(s)
    }

    pub(crate) fn from_bits(ambient: &Psh, members: Vec<FixedBitSet>) -> Subobject {
        Subobject { ambient: ambient.clone(), members }
    }

    pub fn full(ambient: &Psh) -> Subobject {
        let members = ambient
            .sizes()
            .iter()
            .map(|&n| {
                let mut b = FixedBitSet::with_capacity(n);
                b.insert_range(..);
                b
            })
            .collect();
        Subobject { ambient: ambient.clone(), members }
    }

    pub fn empty(ambient: &Psh) -> Subobject {
        let members = ambient.sizes().iter().map(|&n| FixedBitSet::with_capacity(n)).collect();
        Subobject { ambient: ambient.clone(), members }
    }

    /// The least subobject containing the given cells.
    pub fn generated(ambient: &Psh, cells: &[(u32, u32)]) -> Subobject {
        let mut s = Subobject::empty(ambient);
        let site = ambient.site();
        for &(c, x) in cells {
            for &f in site.incoming(c) {
                s.members[site.dom(f) as usize].insert(ambient.apply(f, x) as usize);
            }
        }
        s
    }

    fn closure_failure(&self) -> Option<(MorId, u32)> {
        let site = self.ambient.site();
        for f in 0..site.num_morphisms() as MorId {
            let (c, d) = (site.dom(f) as usize, site.cod(f) as usize);
            for x in self.members[d].ones() {
                if !self.members[c].contains(self.ambient.apply(f, x as u32) as usize) {
                    return Some((f, x as u32));
                }
            }
        }
        None
    }

    pub fn ambient(&self) -> &Psh {
        &self.ambient
    }

    pub fn contains(&self, c: u32, x: u32) -> bool {
        self.members[c as usize].contains(x as usize)
    }

    pub fn cells(&self, c: u32) -> Vec<u32> {
        self.members[c as usize].ones().map(|x| x as u32).collect()
    }

    pub fn bits(&self) -> &[FixedBitSet] {
        &self.members
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(|b| b.count_ones(..)).collect()
    }

    pub fn is_full(&self) -> bool {
        self.members.iter().all(|b| b.is_full())
    }

    pub fn is_empty(&self) -> bool {
        self.members.iter().all(|b| b.is_clear())
    }

    pub fn le(&self, other: &Subobject) -> bool {
        self.members.iter().zip(&other.members).all(|(a, b)| a.is_subset(b))
    }

    fn combine(&self, other: &Subobject, op: impl Fn(&mut FixedBitSet, &FixedBitSet)) -> Result<Subobject> {
        if !self.ambient.same_as(&other.ambient) {
            return Err(Error::Input("subobjects of different presheaves".into()));
        }
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(a, b)| {
                let mut a = a.clone();
                op(&mut a, b);
                a
            })
            .collect();
        Ok(Subobject { ambient: self.ambient.clone(), members })
    }

    /// `S ∨ T`.
    pub fn union(&self, other: &Subobject) -> Result<Subobject> {
        self.combine(other, |a, b| a.union_with(b))
    }

    /// `S ∧ T`.
    pub fn intersect(&self, other: &Subobject) -> Result<Subobject> {
        self.combine(other, |a, b| a.intersect_with(b))
    }

    /// The subobject as a presheaf in its own right, with its inclusion.
    /// Cells keep the ambient order.
    pub fn to_presheaf(&self) -> (Psh, NatTrans) {
        let site = self.ambient.site();
        let cells: Vec<Vec<u32>> = (0..site.num_objects() as u32).map(|c| self.cells(c)).collect();
        let mut back: Vec<Vec<u32>> = self.ambient.sizes().iter().map(|&n| vec![u32::MAX; n]).collect();
        for (c, list) in cells.iter().enumerate() {
            for (i, &x) in list.iter().enumerate() {
                back[c][x as usize] = i as u32;
            }
        }
        let sizes = cells.iter().map(|l| l.len()).collect();
        let x = Presheaf::from_fn(site.clone(), sizes, self.ambient.validity(), |f, i| {
            let d = site.cod(f) as usize;
            back[site.dom(f) as usize][self.ambient.apply(f, cells[d][i as usize]) as usize]
        })
        .with_validity(self.ambient.validity(), self.ambient.intrinsic_only())
        .into_psh();
        let inc = NatTrans::from_parts(x.clone(), self.ambient.clone(), cells);
        (x, inc)
    }

    /// The image of a natural transformation, as a subobject of its target.
    pub fn image(f: &NatTrans) -> Subobject {
        let tgt = f.tgt();
        let mut s = Subobject::empty(tgt);
        for c in 0..tgt.site().num_objects() {
            for &v in f.component(c as u32) {
                s.members[c].insert(v as usize);
            }
        }
        s
    }

    /// `f⁻¹(S)` for `f : X -> Y` and `S ⊆ Y`.
    pub fn preimage(f: &NatTrans, s: &Subobject) -> Subobject {
        let src = f.src();
        let mut out = Subobject::empty(src);
        for c in 0..src.site().num_objects() {
            for (x, &v) in f.component(c as u32).iter().enumerate() {
                if s.members[c].contains(v as usize) {
                    out.members[c].insert(x);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;
    use crate::presheaf::yoneda;

    #[test]
    fn endpoints_generate_the_constant_cubes() {
        let s = build_site(2).unwrap();
        let i = yoneda(&s, 1).into_psh();
        let e0 = Subobject::generated(&i, &[(0, 0)]);
        let e1 = Subobject::generated(&i, &[(0, 1)]);
        let b = e0.union(&e1).unwrap();
        assert_eq!(b.sizes(), vec![2, 2, 2]);
        assert!(e0.intersect(&e1).unwrap().is_empty());
        assert_eq!(b.union(&b).unwrap(), b);
        assert_eq!(b.intersect(&Subobject::full(&i)).unwrap(), b);
    }

    #[test]
    fn closure_is_enforced() {
        let s = build_site(1).unwrap();
        let i = yoneda(&s, 1).into_psh();
        assert!(Subobject::new(&i, &[vec![], vec![1]]).is_err());
        assert!(Subobject::new(&i, &[vec![0], vec![0]]).is_ok());
    }

    #[test]
    fn inclusion_is_mono() {
        let s = build_site(2).unwrap();
        let sq = yoneda(&s, 2).into_psh();
        let sub = Subobject::generated(&sq, &[(1, 3)]);
        let (p, inc) = sub.to_presheaf();
        assert!(p.audit().is_none());
        assert!(inc.naturality_failure().is_none());
        assert!(inc.is_mono());
        assert_eq!(Subobject::image(&inc), sub);
    }
}
