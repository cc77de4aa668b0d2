//! The subobject classifier: sieves, their pullback action, and
//! characteristic maps.

use std::collections::{HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;

use super::{NatTrans, Presheaf, Psh, Subobject};
use crate::error::Result;
use crate::fincat::{FinCat, MorId, Site};
use crate::search::{Budget, NatSearch};

/// All sieves on `c`, as bitsets over `site.incoming(c)`, ordered by size and
/// then by their sorted member positions.
pub fn sieves(site: &FinCat, c: u32) -> Vec<FixedBitSet> {
    let into = site.incoming(c);
    let n = into.len();
    let principal: Vec<FixedBitSet> = into
        .iter()
        .map(|&f| {
            let mut b = FixedBitSet::with_capacity(n);
            for &h in site.incoming(site.dom(f)) {
                b.insert(site.pos_in_into(site.compose(f, h)));
            }
            b
        })
        .collect();
    let empty = FixedBitSet::with_capacity(n);
    let mut seen: HashSet<FixedBitSet> = HashSet::from([empty.clone()]);
    let mut queue = VecDeque::from([empty]);
    while let Some(s) = queue.pop_front() {
        for (i, p) in principal.iter().enumerate() {
            if s.contains(i) {
                continue;
            }
            let mut t = s.clone();
            t.union_with(p);
            if seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
    }
    let mut all: Vec<FixedBitSet> = seen.into_iter().collect();
    all.sort_by_cached_key(|b| (b.count_ones(..), b.ones().collect::<Vec<_>>()));
    all
}

/// The presheaf `Ω` of sieves, with `true : 1 -> Ω`.
#[derive(Clone, Debug)]
pub struct Omega {
    pub obj: Psh,
    sieves: Vec<Vec<FixedBitSet>>,
    index: Vec<HashMap<FixedBitSet, u32>>,
}

impl Omega {
    pub fn new(site: &Site) -> Omega {
        let no = site.num_objects();
        let sieves: Vec<Vec<FixedBitSet>> = (0..no as u32).map(|c| sieves(site, c)).collect();
        let index: Vec<HashMap<FixedBitSet, u32>> = sieves
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, b)| (b.clone(), i as u32)).collect())
            .collect();
        let sizes = sieves.iter().map(|l| l.len()).collect();
        let obj = Presheaf::from_fn(site.clone(), sizes, site.depth(), |f, s| {
            let (cp, c) = (site.dom(f), site.cod(f));
            let pulled = pull(site, f, &sieves[c as usize][s as usize]);
            index[cp as usize][&pulled]
        })
        .into_psh();
        Omega { obj, sieves, index }
    }

    pub fn sieve(&self, c: u32, s: u32) -> &FixedBitSet {
        &self.sieves[c as usize][s as usize]
    }

    /// The members of a sieve as morphisms into `c`.
    pub fn members(&self, c: u32, s: u32) -> Vec<MorId> {
        let into = self.obj.site().incoming(c);
        self.sieve(c, s).ones().map(|i| into[i]).collect()
    }

    pub fn index_of(&self, c: u32, sieve: &FixedBitSet) -> Option<u32> {
        self.index[c as usize].get(sieve).copied()
    }

    /// Index of the maximal sieve on `c`.
    pub fn top(&self, c: u32) -> u32 {
        self.sieves[c as usize].len() as u32 - 1
    }

    /// `true : 1 -> Ω`.
    pub fn truth(&self) -> NatTrans {
        let site = self.obj.site();
        let one = super::terminal(site).into_psh();
        let comp = (0..site.num_objects() as u32).map(|c| vec![self.top(c)]).collect();
        NatTrans::from_parts(one, self.obj.clone(), comp)
    }

    /// The characteristic map `χ_S : X -> Ω`, `χ(x) = {f | X(f)x ∈ S}`.
    pub fn chi(&self, s: &Subobject) -> NatTrans {
        let x = s.ambient();
        let site = x.site();
        let comp = (0..site.num_objects() as u32)
            .map(|c| {
                let into = site.incoming(c);
                (0..x.size(c) as u32)
                    .map(|e| {
                        let mut b = FixedBitSet::with_capacity(into.len());
                        for (i, &f) in into.iter().enumerate() {
                            if s.contains(site.dom(f), x.apply(f, e)) {
                                b.insert(i);
                            }
                        }
                        self.index[c as usize][&b]
                    })
                    .collect()
            })
            .collect();
        NatTrans::from_parts(x.clone(), self.obj.clone(), comp)
    }

    /// The pullback of `true` along `χ : X -> Ω`.
    pub fn classified(&self, chi: &NatTrans) -> Subobject {
        let x = chi.src();
        let members = (0..x.site().num_objects() as u32)
            .map(|c| {
                let mut b = FixedBitSet::with_capacity(x.size(c));
                for (e, &s) in chi.component(c).iter().enumerate() {
                    if s == self.top(c) {
                        b.insert(e);
                    }
                }
                b
            })
            .collect();
        Subobject::from_bits(x, members)
    }

    /// The sieve `s` on `c` as a subobject of the representable `y(c)`.
    pub fn as_subobject(&self, yc: &Psh, c: u32, s: u32) -> Subobject {
        let site = self.obj.site();
        let sieve = self.sieve(c, s);
        let members = (0..site.num_objects() as u32)
            .map(|d| {
                let mut b = FixedBitSet::with_capacity(site.hom(d, c).len());
                for (i, &h) in site.hom(d, c).iter().enumerate() {
                    if sieve.contains(site.pos_in_into(h)) {
                        b.insert(i);
                    }
                }
                b
            })
            .collect();
        Subobject::from_bits(yc, members)
    }
}

/// `f*S = {h | f ∘ h ∈ S}` for `f : c' -> c`.
fn pull(site: &FinCat, f: MorId, s: &FixedBitSet) -> FixedBitSet {
    let into = site.incoming(site.dom(f));
    let mut b = FixedBitSet::with_capacity(into.len());
    for (i, &h) in into.iter().enumerate() {
        if s.contains(site.pos_in_into(site.compose(f, h))) {
            b.insert(i);
        }
    }
    b
}

/// All subobjects of `x`, in the order of their characteristic maps.
pub fn subobjects(x: &Psh, omega: &Omega, budget: &mut Budget) -> Result<Vec<Subobject>> {
    let chis = NatSearch::new(x, &omega.obj)?.all(budget)?;
    Ok(chis
        .into_iter()
        .map(|comp| omega.classified(&NatTrans::from_parts(x.clone(), omega.obj.clone(), comp)))
        .collect())
}
