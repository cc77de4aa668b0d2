//! The Cartesian cube category and its full truncations.
//!
//! An object `[n]` is the bipointed set `{0, x1, ..., xn, 1}`. A map
//! `f : [m] -> [n]` is stored as the `n`-tuple of its coordinates, each of
//! which is `0`, `1` or a variable `xk` with `k <= m`. Composition is
//! substitution and the product of objects is `[m] x [n] = [m + n]`.
//!
//! Maps have a textual form used by the CLI and by JSON files:
//!
//! ```text
//! map     := "[" m "->" n ":" entries "]"
//! entries := ε | entry ("," entry)*
//! entry   := "0" | "1" | "x" k          (1 <= k <= m)
//! ```
//!
//! ```
//! use cartcube::cube::CubeMap;
//! let diag: CubeMap = "[1->2: x1,x1]".parse().unwrap();
//! let proj: CubeMap = "[2->1: x1]".parse().unwrap();
//! assert_eq!(proj.compose(&diag).unwrap(), CubeMap::identity(1));
//! ```

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{FinCat, Morphism};

/// Default bound on the number of table entries `build_site` may create.
pub const DEFAULT_HOM_BUDGET: u64 = 10_000_000;

/// One coordinate of a cube map.
///
/// The derived order is the canonical one: `Zero < Var(1) < ... < One`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    Zero,
    Var(u32),
    One,
}

impl Entry {
    fn digit(self, m: usize) -> usize {
        match self {
            Entry::Zero => 0,
            Entry::Var(k) => k as usize,
            Entry::One => m + 1,
        }
    }

    fn from_digit(d: usize, m: usize) -> Entry {
        if d == 0 {
            Entry::Zero
        } else if d == m + 1 {
            Entry::One
        } else {
            Entry::Var(d as u32)
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Zero => write!(f, "0"),
            Entry::One => write!(f, "1"),
            Entry::Var(k) => write!(f, "x{k}"),
        }
    }
}

/// A morphism `[m] -> [n]` of the cube category.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CubeMap {
    src: usize,
    entries: Vec<Entry>,
}

impl CubeMap {
    pub fn new(src: usize, entries: Vec<Entry>) -> Result<CubeMap> {
        for e in &entries {
            if let Entry::Var(k) = e {
                if *k == 0 || *k as usize > src {
                    return Err(Error::Dimension(format!(
                        "variable x{k} out of range for source [{src}]"
                    )));
                }
            }
        }
        Ok(CubeMap { src, entries })
    }

    pub fn identity(n: usize) -> CubeMap {
        CubeMap { src: n, entries: (1..=n as u32).map(Entry::Var).collect() }
    }

    /// The endpoint `δε : [0] -> [1]`.
    pub fn endpoint(eps: bool) -> CubeMap {
        CubeMap { src: 0, entries: vec![if eps { Entry::One } else { Entry::Zero }] }
    }

    /// The unique map `[m] -> [0]`.
    pub fn bang(m: usize) -> CubeMap {
        CubeMap { src: m, entries: Vec::new() }
    }

    /// The coordinate projection `[n] -> [1]` onto `xi`.
    pub fn projection(n: usize, i: u32) -> Result<CubeMap> {
        CubeMap::new(n, vec![Entry::Var(i)])
    }

    /// The diagonal `[1] -> [n]`.
    pub fn diagonal(n: usize) -> CubeMap {
        CubeMap { src: 1, entries: vec![Entry::Var(1); n] }
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn tgt(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// `self ∘ f`, substituting the entries of `f` for the variables of `self`.
    pub fn compose(&self, f: &CubeMap) -> Result<CubeMap> {
        if f.tgt() != self.src {
            return Err(Error::Dimension(format!(
                "cannot compose {self} after {f}"
            )));
        }
        Ok(self.compose_unchecked(f))
    }

    fn compose_unchecked(&self, f: &CubeMap) -> CubeMap {
        let entries = self
            .entries
            .iter()
            .map(|e| match e {
                Entry::Var(k) => f.entries[*k as usize - 1],
                other => *other,
            })
            .collect();
        CubeMap { src: f.src, entries }
    }

    /// The product map `[m + m'] -> [n + n']`.
    pub fn tensor(&self, g: &CubeMap) -> CubeMap {
        let shift = self.src as u32;
        let mut entries = self.entries.clone();
        entries.extend(g.entries.iter().map(|e| match e {
            Entry::Var(k) => Entry::Var(k + shift),
            other => *other,
        }));
        CubeMap { src: self.src + g.src, entries }
    }

    /// `self ⊗ id_[1]`: the action of the successor functor `[n] ↦ [n+1]`.
    pub fn successor(&self) -> CubeMap {
        self.tensor(&CubeMap::identity(1))
    }

    /// Position of this map in the canonical order of its hom-set.
    pub fn rank(&self) -> usize {
        let base = self.src + 2;
        self.entries.iter().fold(0, |acc, e| acc * base + e.digit(self.src))
    }

    pub fn from_rank(m: usize, n: usize, mut rank: usize) -> CubeMap {
        let base = m + 2;
        let mut entries = vec![Entry::Zero; n];
        for slot in entries.iter_mut().rev() {
            *slot = Entry::from_digit(rank % base, m);
            rank /= base;
        }
        CubeMap { src: m, entries }
    }

    /// Whether some variable occurs twice or not at all (the map is not a
    /// permutation).
    pub fn is_permutation(&self) -> bool {
        if self.src != self.tgt() {
            return false;
        }
        let mut seen = vec![false; self.src + 1];
        for e in &self.entries {
            match e {
                Entry::Var(k) if !seen[*k as usize] => seen[*k as usize] = true,
                _ => return false,
            }
        }
        true
    }
}

impl PartialOrd for CubeMap {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CubeMap {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.src, self.tgt(), &self.entries).cmp(&(other.src, other.tgt(), &other.entries))
    }
}

impl fmt::Display for CubeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}->{}: ", self.src, self.tgt())?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for CubeMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<CubeMap> {
        let bad = || Error::Input(format!("malformed cube map literal {s:?}"));
        let inner = s.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
        let (dims, body) = inner.split_once(':').ok_or_else(bad)?;
        let (m, n) = dims.split_once("->").ok_or_else(bad)?;
        let m: usize = m.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        let body = body.trim();
        let mut entries = Vec::new();
        if !body.is_empty() {
            for tok in body.split(',') {
                let e = match tok.trim() {
                    "0" => Entry::Zero,
                    "1" => Entry::One,
                    t => {
                        let k: u32 = t.strip_prefix('x').and_then(|k| k.parse().ok()).ok_or_else(bad)?;
                        Entry::Var(k)
                    }
                };
                entries.push(e);
            }
        }
        if entries.len() != n {
            return Err(Error::Input(format!("{s:?} lists {} entries for target [{n}]", entries.len())));
        }
        CubeMap::new(m, entries)
    }
}

impl Serialize for CubeMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CubeMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `|hom([m],[n])| = (m+2)^n`.
pub fn hom_count(m: usize, n: usize) -> u64 {
    (m as u64 + 2).pow(n as u32)
}

/// All maps `[m] -> [n]` in canonical order.
pub fn hom(m: usize, n: usize) -> impl Iterator<Item = CubeMap> {
    (0..hom_count(m, n) as usize).map(move |r| CubeMap::from_rank(m, n, r))
}

/// Metadata attached to a site built by [`build_site`].
#[derive(Clone, Debug)]
pub struct CubeData {
    pub n: usize,
    pub maps: Vec<CubeMap>,
}

/// The full subcategory `□≤N` as a [`FinCat`], with the default hom budget.
pub fn build_site(n: usize) -> Result<Arc<FinCat>> {
    build_site_with_budget(n, DEFAULT_HOM_BUDGET)
}

/// The full subcategory `□≤N` on `[0], ..., [N]`.
///
/// Morphisms are numbered by `(source, target, rank)`. Identity and
/// associativity laws are verified exhaustively for `N <= 2` and on a fixed
/// sample of triples above that.
pub fn build_site_with_budget(n: usize, budget: u64) -> Result<Arc<FinCat>> {
    let mut morphisms: u64 = 0;
    let mut pairs: u64 = 0;
    for b in 0..=n {
        let into: u64 = (0..=n).map(|a| hom_count(a, b)).sum();
        let out: u64 = (0..=n).map(|c| hom_count(b, c)).sum();
        morphisms += into;
        pairs += into * out;
    }
    if morphisms + pairs > budget {
        return Err(Error::HomBudget { limit: budget, needed: morphisms + pairs });
    }
    let mut offset = vec![vec![0u32; n + 1]; n + 1];
    let mut maps = Vec::with_capacity(morphisms as usize);
    let mut mors = Vec::with_capacity(morphisms as usize);
    for a in 0..=n {
        for b in 0..=n {
            offset[a][b] = maps.len() as u32;
            for f in hom(a, b) {
                mors.push(Morphism { dom: a as u32, cod: b as u32, name: f.to_string() });
                maps.push(f);
            }
        }
    }
    let ids = (0..=n).map(|a| offset[a][a] + CubeMap::identity(a).rank() as u32).collect();
    let objects = (0..=n).map(|a| a.to_string()).collect();
    let levels = (0..=n).collect();
    let comp = |g: u32, f: u32| {
        let h = maps[g as usize].compose_unchecked(&maps[f as usize]);
        offset[h.src()][h.tgt()] + h.rank() as u32
    };
    let mut cat = FinCat::new(objects, levels, mors, ids, comp, n)?;
    if n <= 2 {
        cat.check_laws_exhaustive()?;
    } else {
        cat.check_laws_sampled(20_000, 0xC0BE)?;
    }
    cat.set_cube(CubeData { n, maps });
    Ok(Arc::new(cat))
}

impl FinCat {
    /// The identifier of a cube map in a cube site.
    pub fn cube_mor(&self, f: &CubeMap) -> Result<u32> {
        let data = self.cube().ok_or_else(|| Error::Input("not a cube site".into()))?;
        if f.src() > data.n || f.tgt() > data.n {
            return Err(Error::Dimension(format!("{f} lies outside □≤{}", data.n)));
        }
        Ok(self.hom(f.src() as u32, f.tgt() as u32)[f.rank()])
    }

    /// The cube map behind a morphism of a cube site.
    pub fn cube_map(&self, f: u32) -> Option<&CubeMap> {
        self.cube().map(|d| &d.maps[f as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> CubeMap {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_order_matches_rank() {
        for m in 0..3 {
            for n in 0..3 {
                let all: Vec<_> = hom(m, n).collect();
                let mut sorted = all.clone();
                sorted.sort();
                assert_eq!(all, sorted);
                for (r, f) in all.iter().enumerate() {
                    assert_eq!(f.rank(), r);
                }
            }
        }
    }

    #[test]
    fn hand_table_of_hom_one_one() {
        let all: Vec<String> = hom(1, 1).map(|f| f.to_string()).collect();
        assert_eq!(all, ["[1->1: 0]", "[1->1: x1]", "[1->1: 1]"]);
    }

    #[test]
    fn composition_examples() {
        let d0 = CubeMap::endpoint(false);
        let s = CubeMap::bang(1);
        assert_eq!(d0.compose(&s).unwrap(), lit("[1->1: 0]"));
        let diag = CubeMap::diagonal(2);
        let p1 = CubeMap::projection(2, 1).unwrap();
        assert_eq!(p1.compose(&diag).unwrap(), CubeMap::identity(1));
        assert_eq!(diag.compose(&p1).unwrap(), lit("[2->2: x1,x1]"));
        assert!(d0.compose(&d0).is_err());
    }

    #[test]
    fn tensor_examples() {
        let id1 = CubeMap::identity(1);
        assert_eq!(id1.tensor(&id1), CubeMap::identity(2));
        let t = CubeMap::endpoint(false).tensor(&CubeMap::endpoint(true));
        assert_eq!(t.entries(), &[Entry::Zero, Entry::One]);
        let f = lit("[2->1: x2]");
        assert_eq!(f.tensor(&CubeMap::identity(0)), f);
    }

    #[test]
    fn literal_round_trip() {
        for s in ["[2->1: x1]", "[0->2: 0,1]", "[1->0: ]", "[3->3: x3,1,x1]"] {
            assert_eq!(lit(s).to_string(), s);
        }
        assert!("[1->1: x2]".parse::<CubeMap>().is_err());
        assert!("[1->2: x1]".parse::<CubeMap>().is_err());
        assert!("1->1: x1".parse::<CubeMap>().is_err());
    }

    #[test]
    fn site_hom_sizes() {
        let site = build_site(2).unwrap();
        let expected = [[1, 2, 4], [1, 3, 9], [1, 4, 16]];
        for m in 0..3u32 {
            for n in 0..3u32 {
                assert_eq!(site.hom(m, n).len(), expected[m as usize][n as usize]);
            }
        }
        assert_eq!(site.num_morphisms(), 41);
    }

    #[test]
    fn hom_budget_is_enforced() {
        assert!(matches!(build_site_with_budget(3, 100), Err(Error::HomBudget { .. })));
    }
}
