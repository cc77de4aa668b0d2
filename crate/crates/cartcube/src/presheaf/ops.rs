//! Representables, finite limits and colimits, and exponentials.

use std::collections::HashMap;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;

use super::{NatTrans, Presheaf, Psh};
use crate::error::{Error, Result};
use crate::fincat::{MorId, Site};
use crate::search::{Budget, Components, NatSearch};

/// The presheaf with one cell at every object.
pub fn terminal(site: &Site) -> Presheaf {
    let n = site.num_objects();
    Presheaf::from_fn(site.clone(), vec![1; n], site.depth(), |_, _| 0)
}

/// The empty presheaf.
pub fn initial(site: &Site) -> Presheaf {
    let n = site.num_objects();
    Presheaf::from_fn(site.clone(), vec![0; n], site.depth(), |_, _| 0)
}

/// The representable `y(c)`: cells at `d` are the morphisms `d -> c` in hom
/// order, acted on by precomposition.
pub fn yoneda(site: &Site, c: u32) -> Presheaf {
    let sizes = (0..site.num_objects() as u32).map(|d| site.hom(d, c).len()).collect();
    Presheaf::from_fn(site.clone(), sizes, site.depth(), |f, x| {
        let h = site.hom(site.cod(f), c)[x as usize];
        site.pos_in_hom(site.compose(h, f)) as u32
    })
}

/// The codiscrete presheaf `K(S)` over `base` with `S = {0..s}`: cells at
/// `c` are functions `Hom(base, c) -> S`, acted on by precomposition. Maps
/// `Y -> K(S)` are functions `Y(base) -> S`, so `K(S)` is injective for
/// `s > 0`. Cells are numbered in base `s`, first morphism least significant.
pub fn codiscrete(site: &Site, base: u32, s: usize) -> Result<Presheaf> {
    let mut sizes = Vec::with_capacity(site.num_objects());
    for c in 0..site.num_objects() as u32 {
        let n = site.hom(base, c).len() as u32;
        let size = s.checked_pow(n).filter(|&k| k <= u32::MAX as usize);
        sizes.push(size.ok_or_else(|| Error::Input(format!("K({s}) has more than 2^32 cells at object {c}")))?);
    }
    let s = s as u32;
    Ok(Presheaf::from_fn(site.clone(), sizes, site.depth(), |f, x| {
        let digits = codiscrete_digits(site, base, site.cod(f), s, x);
        site.hom(base, site.dom(f)).iter().rev().fold(0, |acc, &h| acc * s + digits[site.pos_in_hom(site.compose(f, h))])
    }))
}

fn codiscrete_digits(site: &Site, base: u32, c: u32, s: u32, mut x: u32) -> Vec<u32> {
    (0..site.hom(base, c).len())
        .map(|_| {
            let d = x % s;
            x /= s;
            d
        })
        .collect()
}

/// `K(g) : K(a) -> K(b)` for a function `g : {0..a} -> {0..b}`, by
/// postcomposition. It is a trivial fibration when `g` is onto.
pub fn codiscrete_map(site: &Site, base: u32, g: &[u32], b: usize) -> Result<NatTrans> {
    let (ka, kb) = (codiscrete(site, base, g.len())?.into_psh(), codiscrete(site, base, b)?.into_psh());
    let a = g.len() as u32;
    let comp = (0..site.num_objects() as u32)
        .map(|c| {
            (0..ka.size(c) as u32)
                .map(|x| codiscrete_digits(site, base, c, a, x).iter().rev().fold(0, |acc, &d| acc * b as u32 + g[d as usize]))
                .collect()
        })
        .collect();
    NatTrans::new(ka, kb, comp)
}

/// A finite diagram of presheaves on a common site.
#[derive(Clone, Debug, Default)]
pub struct Diagram {
    pub nodes: Vec<Psh>,
    pub edges: Vec<(usize, usize, NatTrans)>,
}

impl Diagram {
    pub fn new() -> Diagram {
        Diagram::default()
    }

    pub fn node(&mut self, x: &Psh) -> usize {
        self.nodes.push(x.clone());
        self.nodes.len() - 1
    }

    pub fn edge(&mut self, from: usize, to: usize, f: &NatTrans) -> Result<()> {
        if !self.nodes[from].same_as(f.src()) || !self.nodes[to].same_as(f.tgt()) {
            return Err(Error::Input("edge does not match its endpoints".into()));
        }
        self.edges.push((from, to, f.clone()));
        Ok(())
    }

    fn site(&self) -> Result<Site> {
        let first = self.nodes.first().ok_or_else(|| Error::Input("empty diagram".into()))?;
        if self.nodes.iter().any(|x| !x.site().same_as(first.site())) {
            return Err(Error::SiteMismatch);
        }
        Ok(first.site().clone())
    }

    fn validity(&self) -> (usize, bool) {
        let v = self.nodes.iter().map(|x| x.validity()).min().unwrap_or(0);
        (v, self.nodes.iter().any(|x| x.intrinsic_only()))
    }
}

/// A limit cone: the apex and one projection per diagram node.
#[derive(Clone, Debug)]
pub struct Limit {
    pub obj: Psh,
    pub proj: Vec<NatTrans>,
    tuples: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, u32>>,
}

impl Limit {
    /// The tuple of node cells behind a cell of the apex.
    pub fn tuple(&self, c: u32, x: u32) -> &[u32] {
        &self.tuples[c as usize][x as usize]
    }

    /// The apex cell with the given coordinates, if it exists.
    pub fn cell(&self, c: u32, tuple: &[u32]) -> Option<u32> {
        self.index[c as usize].get(tuple).copied()
    }

    /// Drops all but the first `k` coordinates, which must determine the rest.
    fn keep_coordinates(mut self, k: usize) -> Limit {
        self.proj.truncate(k);
        for ts in &mut self.tuples {
            for t in ts.iter_mut() {
                t.truncate(k);
            }
        }
        self.index = self
            .tuples
            .iter()
            .map(|ts| ts.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect())
            .collect();
        self
    }

    /// The map `Z -> lim` induced by a cone of maps `Z -> X_i`.
    pub fn pair(&self, legs: &[NatTrans]) -> Result<NatTrans> {
        let z = legs.first().ok_or_else(|| Error::Input("empty cone".into()))?.src().clone();
        let site = z.site();
        let mut comp = Vec::with_capacity(site.num_objects());
        for c in 0..site.num_objects() as u32 {
            let mut t = Vec::with_capacity(z.size(c));
            for x in 0..z.size(c) as u32 {
                let key: Vec<u32> = legs.iter().map(|l| l.apply(c, x)).collect();
                t.push(self.cell(c, &key).ok_or_else(|| Error::Input("legs do not form a cone".into()))?);
            }
            comp.push(t);
        }
        NatTrans::new(z, self.obj.clone(), comp)
    }
}

/// The limit of a finite diagram, computed levelwise. Cells are tuples in
/// lexicographic order.
pub fn limit(d: &Diagram) -> Result<Limit> {
    let site = d.site()?;
    let k = d.nodes.len();
    // For each node, the edges whose target is that node and whose source precedes it.
    let mut checks: Vec<Vec<(usize, &NatTrans, bool)>> = vec![Vec::new(); k];
    for (from, to, f) in &d.edges {
        let later = (*from).max(*to);
        checks[later].push((if later == *to { *from } else { *to }, f, later == *to));
    }
    let mut tuples = Vec::new();
    let mut index = Vec::new();
    for c in 0..site.num_objects() as u32 {
        let mut out = Vec::new();
        let mut cur = vec![0u32; k];
        fn rec(
            c: u32,
            i: usize,
            d: &Diagram,
            checks: &[Vec<(usize, &NatTrans, bool)>],
            cur: &mut Vec<u32>,
            out: &mut Vec<Vec<u32>>,
        ) {
            if i == d.nodes.len() {
                out.push(cur.clone());
                return;
            }
            'cand: for x in 0..d.nodes[i].size(c) as u32 {
                cur[i] = x;
                for &(other, f, i_is_target) in &checks[i] {
                    let ok = if other == i {
                        f.apply(c, x) == x
                    } else if i_is_target {
                        f.apply(c, cur[other]) == x
                    } else {
                        f.apply(c, x) == cur[other]
                    };
                    if !ok {
                        continue 'cand;
                    }
                }
                rec(c, i + 1, d, checks, cur, out);
            }
        }
        rec(c, 0, d, &checks, &mut cur, &mut out);
        let idx: HashMap<Vec<u32>, u32> = out.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        tuples.push(out);
        index.push(idx);
    }
    let sizes = tuples.iter().map(|t| t.len()).collect();
    let (v, intrinsic) = d.validity();
    let obj = Presheaf::from_fn(site.clone(), sizes, v, |f, x| {
        let (c, dd) = (site.dom(f), site.cod(f));
        let t: Vec<u32> = tuples[dd as usize][x as usize]
            .iter()
            .zip(&d.nodes)
            .map(|(&y, n)| n.apply(f, y))
            .collect();
        index[c as usize][&t]
    })
    .with_validity(v, intrinsic)
    .into_psh();
    let proj = (0..k)
        .map(|i| {
            let comp = tuples.iter().map(|ts| ts.iter().map(|t| t[i]).collect()).collect();
            NatTrans::from_parts(obj.clone(), d.nodes[i].clone(), comp)
        })
        .collect();
    Ok(Limit { obj, proj, tuples, index })
}

/// `X × Y`; cells at `c` are pairs `(x, y)` in lexicographic order.
pub fn product(x: &Psh, y: &Psh) -> Result<Limit> {
    let mut d = Diagram::new();
    d.node(x);
    d.node(y);
    limit(&d)
}

/// The pullback of the cospan `f : X -> Z <- Y : g`; projections to `X` and `Y`.
pub fn pullback(f: &NatTrans, g: &NatTrans) -> Result<Limit> {
    let mut d = Diagram::new();
    let a = d.node(f.src());
    let b = d.node(g.src());
    let z = d.node(f.tgt());
    d.edge(a, z, f)?;
    d.edge(b, z, g)?;
    Ok(limit(&d)?.keep_coordinates(2))
}

/// The equalizer of a parallel pair `f, g : X -> Y`, with its inclusion.
pub fn equalizer(f: &NatTrans, g: &NatTrans) -> Result<Limit> {
    let mut d = Diagram::new();
    let a = d.node(f.src());
    let b = d.node(f.tgt());
    d.edge(a, b, f)?;
    d.edge(a, b, g)?;
    Ok(limit(&d)?.keep_coordinates(1))
}

/// A colimit cocone: the apex and one injection per diagram node.
#[derive(Clone, Debug)]
pub struct Colimit {
    pub obj: Psh,
    pub inj: Vec<NatTrans>,
}

impl Colimit {
    /// The map `colim -> Z` induced by a cocone `X_i -> Z`.
    pub fn copair(&self, legs: &[NatTrans]) -> Result<NatTrans> {
        let z = legs.first().ok_or_else(|| Error::Input("empty cocone".into()))?.tgt().clone();
        let site = z.site();
        let mut comp: Components = (0..site.num_objects()).map(|c| vec![u32::MAX; self.obj.sizes()[c]]).collect();
        for (leg, inj) in legs.iter().zip(&self.inj) {
            for c in 0..site.num_objects() {
                for (x, &w) in inj.component(c as u32).iter().enumerate() {
                    let v = leg.apply(c as u32, x as u32);
                    if comp[c][w as usize] != u32::MAX && comp[c][w as usize] != v {
                        return Err(Error::Input("legs do not form a cocone".into()));
                    }
                    comp[c][w as usize] = v;
                }
            }
        }
        if comp.iter().flatten().any(|&v| v == u32::MAX) {
            return Err(Error::Input("cocone misses part of the colimit".into()));
        }
        NatTrans::new(self.obj.clone(), z, comp)
    }
}

/// The colimit of a finite diagram: levelwise disjoint union modulo the
/// identifications made by the edges, computed with union-find. Classes are
/// ordered by their least member in the disjoint union.
pub fn colimit(d: &Diagram) -> Result<Colimit> {
    let site = d.site()?;
    let k = d.nodes.len();
    let mut offsets: Vec<Vec<usize>> = Vec::new();
    let mut classes: Vec<Vec<u32>> = Vec::new();
    let mut sizes = Vec::new();
    for c in 0..site.num_objects() as u32 {
        let mut off = Vec::with_capacity(k + 1);
        let mut total = 0;
        for x in &d.nodes {
            off.push(total);
            total += x.size(c);
        }
        off.push(total);
        let mut uf = UnionFind::<usize>::new(total);
        for (from, to, f) in &d.edges {
            for (x, &y) in f.component(c).iter().enumerate() {
                uf.union(off[*from] + x, off[*to] + y as usize);
            }
        }
        let mut class_of_root = HashMap::new();
        let mut cls = Vec::with_capacity(total);
        for g in 0..total {
            let r = uf.find_mut(g);
            let next = class_of_root.len() as u32;
            cls.push(*class_of_root.entry(r).or_insert(next));
        }
        sizes.push(class_of_root.len());
        offsets.push(off);
        classes.push(cls);
    }
    let (v, intrinsic) = d.validity();
    // Each class has a least member; the action is computed on it.
    let mut rep: Vec<Vec<(usize, u32)>> = Vec::new();
    for c in 0..site.num_objects() {
        let mut r = vec![(0, 0); sizes[c]];
        let mut seen = vec![false; sizes[c]];
        for i in 0..k {
            for x in 0..d.nodes[i].size(c as u32) {
                let cl = classes[c][offsets[c][i] + x] as usize;
                if !seen[cl] {
                    seen[cl] = true;
                    r[cl] = (i, x as u32);
                }
            }
        }
        rep.push(r);
    }
    let obj = Presheaf::from_fn(site.clone(), sizes, v, |f, w| {
        let (c, dd) = (site.dom(f) as usize, site.cod(f) as usize);
        let (i, x) = rep[dd][w as usize];
        classes[c][offsets[c][i] + d.nodes[i].apply(f, x) as usize]
    })
    .with_validity(v, intrinsic)
    .into_psh();
    let inj = (0..k)
        .map(|i| {
            let comp = (0..site.num_objects())
                .map(|c| (0..d.nodes[i].size(c as u32)).map(|x| classes[c][offsets[c][i] + x]).collect())
                .collect();
            NatTrans::from_parts(d.nodes[i].clone(), obj.clone(), comp)
        })
        .collect();
    Ok(Colimit { obj, inj })
}

/// `X + Y`, with the cells of `X` first.
pub fn coproduct(x: &Psh, y: &Psh) -> Colimit {
    let mut d = Diagram::new();
    d.node(x);
    d.node(y);
    colimit(&d).expect("a two-node diagram on one site")
}

/// The pushout of the span `B <- A -> C`; injections from `B` and `C`.
pub fn pushout(f: &NatTrans, g: &NatTrans) -> Result<Colimit> {
    if !f.src().same_as(g.src()) {
        return Err(Error::Input("pushout legs must share a source".into()));
    }
    let mut d = Diagram::new();
    let b = d.node(f.tgt());
    let c = d.node(g.tgt());
    let a = d.node(f.src());
    d.edge(a, b, f)?;
    d.edge(a, c, g)?;
    let mut p = colimit(&d)?;
    p.inj.truncate(2);
    Ok(p)
}

/// The coequalizer of a parallel pair, with its quotient map.
pub fn coequalizer(f: &NatTrans, g: &NatTrans) -> Result<Colimit> {
    let mut d = Diagram::new();
    let b = d.node(f.tgt());
    let a = d.node(f.src());
    d.edge(a, b, f)?;
    d.edge(a, b, g)?;
    let mut p = colimit(&d)?;
    p.inj.truncate(1);
    Ok(p)
}

/// An exponential `X^Y` together with the tables needed for evaluation and
/// transposition.
///
/// A cell of `X^Y` at `c` is a natural transformation `y(c) × Y -> X`,
/// stored as one flat table indexed by `(d, h, y)` where `h : d -> c`.
#[derive(Clone, Debug)]
pub struct Exponential {
    pub obj: Psh,
    pub base: Psh,
    pub target: Psh,
    kept: Vec<u32>,
    cells: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, u32>>,
    offsets: Vec<Vec<usize>>,
}

impl Exponential {
    /// Site objects (of the ambient site) at which the exponential was computed.
    pub fn kept(&self) -> &[u32] {
        &self.kept
    }

    fn slot(&self, ci: usize, d: u32, h_pos: usize, y: u32) -> usize {
        self.offsets[ci][d as usize] + h_pos * self.base.size(d) + y as usize
    }

    /// `φ_d(h, y)` for the cell `φ` at the `ci`-th kept object.
    pub fn eval(&self, ci: usize, phi: u32, h: MorId, y: u32) -> u32 {
        let site = self.base.site();
        let d = site.dom(h);
        self.cells[ci][phi as usize][self.slot(ci, d, site.pos_in_hom(h), y)]
    }

    /// The flat table of a cell.
    pub fn cell_table(&self, ci: usize, phi: u32) -> &[u32] {
        &self.cells[ci][phi as usize]
    }

    /// Looks up a flat table among the cells at the `ci`-th kept object.
    pub fn cell_of(&self, ci: usize, table: &[u32]) -> Option<u32> {
        self.index[ci].get(table).copied()
    }

    /// The evaluation map `X^Y × Y -> X` (only for full exponentials).
    pub fn evaluation(&self) -> Result<(Limit, NatTrans)> {
        if self.kept.len() != self.base.site().num_objects() {
            return Err(Error::Input("evaluation needs the exponential at every object".into()));
        }
        let p = product(&self.obj, &self.base)?;
        let site = self.base.site();
        let comp = (0..site.num_objects() as u32)
            .map(|c| {
                (0..p.obj.size(c) as u32)
                    .map(|z| {
                        let t = p.tuple(c, z);
                        self.eval(c as usize, t[0], site.id(c), t[1])
                    })
                    .collect()
            })
            .collect();
        let ev = NatTrans::from_parts(p.obj.clone(), self.target.clone(), comp);
        Ok((p, ev))
    }

    /// The transpose `Z -> X^Y` of a map `α : Z × Y -> X` given on the product `zy`.
    pub fn curry(&self, zy: &Limit, alpha: &NatTrans) -> Result<NatTrans> {
        let z = zy.proj[0].tgt().clone();
        let site = self.base.site().clone();
        let mut comp = Vec::new();
        for (ci, &c) in self.kept.iter().enumerate() {
            let mut t = Vec::with_capacity(z.size(c));
            for x in 0..z.size(c) as u32 {
                let mut table = vec![0u32; self.offsets[ci][site.num_objects()]];
                for d in 0..site.num_objects() as u32 {
                    for (hp, &h) in site.hom(d, c).iter().enumerate() {
                        let zx = z.apply(h, x);
                        for y in 0..self.base.size(d) as u32 {
                            let cell = zy.cell(d, &[zx, y]).expect("product cell");
                            table[self.slot(ci, d, hp, y)] = alpha.apply(d, cell);
                        }
                    }
                }
                t.push(self.cell_of(ci, &table).ok_or_else(|| Error::Input("map is not natural".into()))?);
            }
            comp.push(t);
        }
        if self.kept.len() == site.num_objects() {
            NatTrans::new(z, self.obj.clone(), comp)
        } else {
            Err(Error::Input("transpose needs the exponential at every object".into()))
        }
    }

    /// Builds the map `self -> other` sending `φ` to the cell whose table at
    /// `(h : d -> c, y)` is `entry(ci, φ, h, y)`. Both must keep the same objects.
    fn map_cells(&self, other: &Exponential, entry: impl Fn(usize, u32, MorId, u32) -> u32) -> Result<NatTrans> {
        if self.kept != other.kept {
            return Err(Error::Input("exponentials computed at different objects".into()));
        }
        let site = other.base.site();
        let no = site.num_objects();
        let mut comp = Vec::with_capacity(self.kept.len());
        for (ci, &c) in self.kept.iter().enumerate() {
            let mut t = Vec::with_capacity(self.cells[ci].len());
            for phi in 0..self.cells[ci].len() as u32 {
                let mut table = vec![0u32; other.offsets[ci][no]];
                for d in 0..no as u32 {
                    for (hp, &h) in site.hom(d, c).iter().enumerate() {
                        for y in 0..other.base.size(d) as u32 {
                            table[other.slot(ci, d, hp, y)] = entry(ci, phi, h, y);
                        }
                    }
                }
                t.push(other.cell_of(ci, &table).ok_or_else(|| Error::Input("induced table is not a cell".into()))?);
            }
            comp.push(t);
        }
        Ok(NatTrans::from_parts(self.obj.clone(), other.obj.clone(), comp))
    }

    /// `f^Y : X^Y -> X'^Y` for `f : X -> X'`, into the exponential `other = X'^Y`.
    pub fn post(&self, f: &NatTrans, other: &Exponential) -> Result<NatTrans> {
        let site = self.base.site();
        self.map_cells(other, |ci, phi, h, y| f.apply(site.dom(h), self.eval(ci, phi, h, y)))
    }

    /// `X^u : X^Y -> X^Y'` for `u : Y' -> Y`, into the exponential `other = X^Y'`.
    pub fn pre(&self, u: &NatTrans, other: &Exponential) -> Result<NatTrans> {
        let site = self.base.site();
        self.map_cells(other, |ci, phi, h, y| self.eval(ci, phi, h, u.apply(site.dom(h), y)))
    }

    /// The inverse transpose of `β : Z -> X^Y`, as a map on the product `zy`.
    pub fn uncurry(&self, zy: &Limit, beta: &NatTrans) -> Result<NatTrans> {
        let site = self.base.site();
        let comp = (0..site.num_objects() as u32)
            .map(|d| {
                (0..zy.obj.size(d) as u32)
                    .map(|w| {
                        let t = zy.tuple(d, w);
                        self.eval(d as usize, beta.apply(d, t[0]), site.id(d), t[1])
                    })
                    .collect()
            })
            .collect();
        NatTrans::new(zy.obj.clone(), self.target.clone(), comp)
    }
}

/// Validity of `X^Y`: exact loss of `k` levels when `Y` is the representable
/// `y[k]` of a cube site, otherwise level 0 and marked intrinsic-only.
fn exponential_validity(x: &Presheaf, y: &Presheaf) -> (usize, bool) {
    let site = y.site();
    let v = x.validity().min(y.validity());
    if site.cube().is_some() {
        for k in 0..site.num_objects() as u32 {
            if y.sizes() == yoneda(site, k).sizes() && y.same_as(&yoneda(site, k)) {
                return (v.saturating_sub(k as usize), x.intrinsic_only() || y.intrinsic_only());
            }
        }
        if y.sizes().iter().all(|&n| n == 1) {
            return (v, x.intrinsic_only());
        }
    }
    (0, true)
}

/// The exponential `X^Y` on the whole site.
pub fn exponential(x: &Psh, y: &Psh, budget: &mut Budget) -> Result<Exponential> {
    let all: Vec<u32> = (0..x.site().num_objects() as u32).collect();
    exponential_on(x, y, &all, budget)
}

/// The exponential `X^Y` computed only at the objects `keep`, as a presheaf
/// on the full subcategory they span. Cells at `c` are all natural maps
/// `y(c) × Y -> X` over the whole site, in sorted order.
pub fn exponential_on(x: &Psh, y: &Psh, keep: &[u32], budget: &mut Budget) -> Result<Exponential> {
    if !x.site().same_as(y.site()) {
        return Err(Error::SiteMismatch);
    }
    let site = x.site().clone();
    let no = site.num_objects();
    let mut cells = Vec::with_capacity(keep.len());
    let mut index = Vec::with_capacity(keep.len());
    let mut offsets = Vec::with_capacity(keep.len());
    for &c in keep {
        let yc = yoneda(&site, c).into_psh();
        let p = product(&yc, y)?;
        let mut off = Vec::with_capacity(no + 1);
        let mut total = 0;
        for d in 0..no as u32 {
            off.push(total);
            total += site.hom(d, c).len() * y.size(d);
        }
        off.push(total);
        let sols = NatSearch::new(&p.obj, x)?.all(budget)?;
        let flat: Vec<Vec<u32>> = sols
            .iter()
            .map(|comp| {
                let mut table = vec![0u32; total];
                for d in 0..no as u32 {
                    for (w, &v) in comp[d as usize].iter().enumerate() {
                        let t = p.tuple(d, w as u32);
                        table[off[d as usize] + t[0] as usize * y.size(d) + t[1] as usize] = v;
                    }
                }
                table
            })
            .collect();
        let mut sorted = flat;
        sorted.sort();
        index.push(sorted.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect::<HashMap<_, _>>());
        cells.push(sorted);
        offsets.push(off);
    }
    let sub = if keep.len() == no && keep.iter().enumerate().all(|(i, &c)| c as usize == i) {
        site.clone()
    } else {
        Arc::new(site.full_subcategory(keep).0)
    };
    let sizes: Vec<usize> = cells.iter().map(|c| c.len()).collect();
    let (v, intrinsic) = exponential_validity(x, y);
    let v = v.min(sub.depth());
    let mut action_err = None;
    let obj = {
        let mut act = Vec::with_capacity(sub.num_morphisms());
        for f_sub in 0..sub.num_morphisms() as MorId {
            // Morphisms of the full subcategory are listed by (dom, cod) blocks of the ambient hom sets.
            let (ci_dom, ci_cod) = (sub.dom(f_sub) as usize, sub.cod(f_sub) as usize);
            let (cp, c) = (keep[ci_dom], keep[ci_cod]);
            let f = site.hom(cp, c)[sub.pos_in_hom(f_sub)];
            let mut t = Vec::with_capacity(sizes[ci_cod]);
            for phi in &cells[ci_cod] {
                // (f·φ)_d(h, y) = φ_d(f∘h, y) for h : d -> c'.
                let mut table = vec![0u32; offsets[ci_dom][no]];
                for d in 0..no as u32 {
                    for (hp, &h) in site.hom(d, cp).iter().enumerate() {
                        let fh = site.pos_in_hom(site.compose(f, h));
                        for yy in 0..y.size(d) {
                            table[offsets[ci_dom][d as usize] + hp * y.size(d) + yy] =
                                phi[offsets[ci_cod][d as usize] + fh * y.size(d) + yy];
                        }
                    }
                }
                match index[ci_dom].get(&table) {
                    Some(&i) => t.push(i),
                    None => {
                        action_err = Some(Error::Malformed("exponential action left the carrier".into()));
                        t.push(0);
                    }
                }
            }
            act.push(t);
        }
        Presheaf::from_parts(sub, sizes, act, v, intrinsic)
    };
    if let Some(e) = action_err {
        return Err(e);
    }
    Ok(Exponential {
        obj: obj.into_psh(),
        base: y.clone(),
        target: x.clone(),
        kept: keep.to_vec(),
        cells,
        index,
        offsets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_site;
    use crate::presheaf::{count_nat_trans, iso_search};

    fn site2() -> Site {
        build_site(2).unwrap()
    }

    #[test]
    fn codiscrete_maps_are_vertex_functions() {
        let s = site2();
        let k = codiscrete(&s, 0, 2).unwrap();
        assert_eq!(k.sizes(), &[2, 4, 16]);
        let k = Presheaf::new(s.clone(), k.sizes().to_vec(), k.act.clone()).unwrap().into_psh();
        for (y, vertices) in [(yoneda(&s, 1), 2u32), (yoneda(&s, 2), 4), (terminal(&s), 1)] {
            let n = count_nat_trans(&y.into_psh(), &k, &mut Budget::default()).unwrap();
            assert_eq!(n, 2u64.pow(vertices));
        }
    }

    #[test]
    fn codiscrete_maps_of_surjections_are_trivial_fibrations() {
        use crate::cofib::{is_trivial_fibration, CofibrationClass};
        let s = site2();
        let class = CofibrationClass::all_monos(&s);
        let onto = codiscrete_map(&s, 0, &[0, 1, 1], 2).unwrap();
        assert!(onto.naturality_failure().is_none());
        assert!(is_trivial_fibration(&onto, &class, &mut Budget::default()).unwrap());
        let into = codiscrete_map(&s, 0, &[1], 2).unwrap();
        assert!(!is_trivial_fibration(&into, &class, &mut Budget::default()).unwrap());
    }

    #[test]
    fn product_of_intervals_is_the_square() {
        let s = site2();
        let i = yoneda(&s, 1).into_psh();
        let p = product(&i, &i).unwrap();
        assert_eq!(p.obj.sizes(), &[4, 9, 16]);
        let sq = yoneda(&s, 2).into_psh();
        assert!(iso_search(&p.obj, &sq, &mut Budget::default()).unwrap().is_some());
    }

    #[test]
    fn endpoints_are_disjoint() {
        let s = site2();
        let one = terminal(&s).into_psh();
        let i = yoneda(&s, 1).into_psh();
        let d0 = NatTrans::new(one.clone(), i.clone(), vec![vec![0], vec![0], vec![0]]).unwrap();
        let d1 = NatTrans::new(one.clone(), i.clone(), vec![vec![1], vec![2], vec![3]]).unwrap();
        assert!(pullback(&d0, &d1).unwrap().obj.is_empty());
        assert_eq!(pullback(&d0, &d0).unwrap().obj.sizes(), &[1, 1, 1]);
        let q = coequalizer(&d0, &d1).unwrap();
        assert_eq!(q.obj.size(0), 1);
    }

    #[test]
    fn coproducts_and_pushouts() {
        let s = site2();
        let one = terminal(&s).into_psh();
        let zero = initial(&s).into_psh();
        assert_eq!(coproduct(&one, &one).obj.sizes(), &[2, 2, 2]);
        let f = NatTrans::from_initial(&one);
        let p = pushout(&f, &f).unwrap();
        assert_eq!(p.obj.sizes(), &[2, 2, 2]);
        assert!(coproduct(&zero, &one).obj.same_as(&one));
    }

    #[test]
    fn interval_path_object_counts() {
        let s = site2();
        let i = yoneda(&s, 1).into_psh();
        let e = exponential(&i, &i, &mut Budget::default()).unwrap();
        assert_eq!(&e.obj.sizes()[..2], &[3, 4]);
        assert!(e.obj.audit().is_none());
    }

    #[test]
    fn exponential_by_terminal_and_of_terminal() {
        let s = site2();
        let one = terminal(&s).into_psh();
        let i = yoneda(&s, 1).into_psh();
        let e = exponential(&i, &one, &mut Budget::default()).unwrap();
        assert!(iso_search(&e.obj, &i, &mut Budget::default()).unwrap().is_some());
        let e = exponential(&one, &i, &mut Budget::default()).unwrap();
        assert_eq!(e.obj.sizes(), &[1, 1, 1]);
        let zero = initial(&s).into_psh();
        let e = exponential(&i, &zero, &mut Budget::default()).unwrap();
        assert_eq!(e.obj.sizes(), &[1, 1, 1]);
    }

    #[test]
    fn curry_round_trip_and_adjunction_count() {
        let s = build_site(1).unwrap();
        let i = yoneda(&s, 1).into_psh();
        let one = terminal(&s).into_psh();
        let two = coproduct(&one, &one).obj;
        let e = exponential(&two, &i, &mut Budget::default()).unwrap();
        let zy = product(&i, &i).unwrap();
        let lhs = crate::presheaf::enumerate_nat_trans(&zy.obj, &two, &mut Budget::default()).unwrap();
        let rhs = count_nat_trans(&i, &e.obj, &mut Budget::default()).unwrap();
        assert_eq!(lhs.len() as u64, rhs);
        for a in &lhs {
            let b = e.curry(&zy, a).unwrap();
            assert!(e.uncurry(&zy, &b).unwrap().same_as(a));
        }
        let (_, ev) = e.evaluation().unwrap();
        assert!(ev.naturality_failure().is_none());
    }

    #[test]
    fn limit_validity_is_the_minimum() {
        let s = site2();
        let i = yoneda(&s, 1).with_validity(1, false).into_psh();
        let one = terminal(&s).into_psh();
        assert_eq!(product(&i, &one).unwrap().obj.validity(), 1);
        let e = exponential(&one, &yoneda(&s, 1).into_psh(), &mut Budget::default()).unwrap();
        assert_eq!(e.obj.validity(), 1);
    }
}
