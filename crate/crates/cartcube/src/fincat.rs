//! Finite categories with dense morphism numbering and tabulated composition.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cube::CubeData;
use crate::error::{Error, Result};
use crate::search::Budget;

pub type MorId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub dom: u32,
    pub cod: u32,
    pub name: String,
}

/// A finite category.
///
/// Objects and morphisms are numbered densely. `level` is a rank per object
/// (the dimension for cube sites) used to order searches and to truncate.
/// `depth` is the largest level at which presheaves on this site are taken to
/// agree with the untruncated computation.
#[derive(Clone, Debug)]
pub struct FinCat {
    objects: Vec<String>,
    levels: Vec<usize>,
    mors: Vec<Morphism>,
    ids: Vec<MorId>,
    hom: Vec<Vec<Vec<MorId>>>,
    into: Vec<Vec<MorId>>,
    out: Vec<Vec<MorId>>,
    pos_in_into: Vec<u32>,
    pos_in_hom: Vec<u32>,
    comp: Vec<Vec<MorId>>,
    depth: usize,
    cube: Option<CubeData>,
}

impl FinCat {
    /// Tabulates a category from its morphisms and a composition function
    /// `compose(g, f) = g ∘ f`, which is called on every composable pair.
    pub fn new(
        objects: Vec<String>,
        levels: Vec<usize>,
        mors: Vec<Morphism>,
        ids: Vec<MorId>,
        compose: impl Fn(MorId, MorId) -> MorId,
        depth: usize,
    ) -> Result<FinCat> {
        let n = objects.len();
        if levels.len() != n || ids.len() != n {
            return Err(Error::Malformed("object tables have inconsistent lengths".into()));
        }
        let mut hom = vec![vec![Vec::new(); n]; n];
        let mut into = vec![Vec::new(); n];
        let mut out = vec![Vec::new(); n];
        let mut pos_in_into = vec![0u32; mors.len()];
        let mut pos_in_hom = vec![0u32; mors.len()];
        for (i, m) in mors.iter().enumerate() {
            if m.dom as usize >= n || m.cod as usize >= n {
                return Err(Error::Malformed(format!("morphism {} has an unknown endpoint", m.name)));
            }
            pos_in_hom[i] = hom[m.dom as usize][m.cod as usize].len() as u32;
            hom[m.dom as usize][m.cod as usize].push(i as MorId);
            pos_in_into[i] = into[m.cod as usize].len() as u32;
            into[m.cod as usize].push(i as MorId);
            out[m.dom as usize].push(i as MorId);
        }
        for (a, &id) in ids.iter().enumerate() {
            let m = mors.get(id as usize).ok_or_else(|| Error::Malformed("bad identity".into()))?;
            if m.dom as usize != a || m.cod as usize != a {
                return Err(Error::Malformed(format!("identity of {} is not an endomorphism", objects[a])));
            }
        }
        let comp = mors
            .iter()
            .enumerate()
            .map(|(g, m)| into[m.dom as usize].iter().map(|&f| compose(g as MorId, f)).collect())
            .collect();
        Ok(FinCat { objects, levels, mors, ids, hom, into, out, pos_in_into, pos_in_hom, comp, depth, cube: None })
    }

    pub(crate) fn set_cube(&mut self, data: CubeData) {
        self.cube = Some(data);
    }

    pub fn cube(&self) -> Option<&CubeData> {
        self.cube.as_ref()
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.mors.len()
    }

    pub fn object_name(&self, a: u32) -> &str {
        &self.objects[a as usize]
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn object_by_name(&self, name: &str) -> Option<u32> {
        self.objects.iter().position(|o| o == name).map(|i| i as u32)
    }

    pub fn level(&self, a: u32) -> usize {
        self.levels[a as usize]
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn morphism(&self, f: MorId) -> &Morphism {
        &self.mors[f as usize]
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.mors
    }

    pub fn dom(&self, f: MorId) -> u32 {
        self.mors[f as usize].dom
    }

    pub fn cod(&self, f: MorId) -> u32 {
        self.mors[f as usize].cod
    }

    pub fn id(&self, a: u32) -> MorId {
        self.ids[a as usize]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        self.ids[self.dom(f) as usize] == f
    }

    pub fn hom(&self, a: u32, b: u32) -> &[MorId] {
        &self.hom[a as usize][b as usize]
    }

    /// Position of `f` in the list `hom(dom f, cod f)`.
    pub fn pos_in_hom(&self, f: MorId) -> usize {
        self.pos_in_hom[f as usize] as usize
    }

    /// All morphisms with codomain `b`.
    /// Position of `f` in [`FinCat::incoming`] of its codomain.
    pub fn pos_in_into(&self, f: MorId) -> usize {
        self.pos_in_into[f as usize] as usize
    }

    pub fn incoming(&self, b: u32) -> &[MorId] {
        &self.into[b as usize]
    }

    /// All morphisms with domain `a`.
    pub fn out_of(&self, a: u32) -> &[MorId] {
        &self.out[a as usize]
    }

    /// `g ∘ f`, or `None` when the pair is not composable.
    pub fn try_compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        if self.cod(f) != self.dom(g) {
            return None;
        }
        Some(self.comp[g as usize][self.pos_in_into[f as usize] as usize])
    }

    /// `g ∘ f`; panics when the pair is not composable.
    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        self.try_compose(g, f).expect("composable morphisms")
    }

    /// Structural equality (same numbering and the same tables).
    pub fn same_as(&self, other: &FinCat) -> bool {
        std::ptr::eq(self, other)
            || (self.objects == other.objects && self.mors == other.mors && self.comp == other.comp && self.ids == other.ids)
    }

    /// Object order used by searches: higher levels first, then more incoming
    /// morphisms, then by index.
    pub fn search_order(&self) -> Vec<u32> {
        let mut objs: Vec<u32> = (0..self.num_objects() as u32).collect();
        objs.sort_by_key(|&a| (std::cmp::Reverse(self.level(a)), std::cmp::Reverse(self.incoming(a).len()), a));
        objs
    }

    fn check_pair_laws(&self, g: MorId, f: MorId) -> Result<()> {
        let h = self.compose(g, f);
        if self.dom(h) != self.dom(f) || self.cod(h) != self.cod(g) {
            return Err(Error::Malformed(format!(
                "{} ∘ {} has the wrong endpoints",
                self.mors[g as usize].name, self.mors[f as usize].name
            )));
        }
        Ok(())
    }

    fn check_identity_laws(&self, f: MorId) -> Result<()> {
        let m = &self.mors[f as usize];
        if self.compose(self.id(m.cod), f) != f || self.compose(f, self.id(m.dom)) != f {
            return Err(Error::Malformed(format!("identity law fails at {}", m.name)));
        }
        Ok(())
    }

    fn check_assoc(&self, h: MorId, g: MorId, f: MorId) -> Result<()> {
        if self.compose(h, self.compose(g, f)) != self.compose(self.compose(h, g), f) {
            return Err(Error::Malformed(format!(
                "associativity fails at ({}, {}, {})",
                self.mors[h as usize].name, self.mors[g as usize].name, self.mors[f as usize].name
            )));
        }
        Ok(())
    }

    /// Checks unit and associativity laws on every composable triple.
    pub fn check_laws_exhaustive(&self) -> Result<()> {
        for f in 0..self.num_morphisms() as MorId {
            self.check_identity_laws(f)?;
            for &g in self.out_of(self.cod(f)) {
                self.check_pair_laws(g, f)?;
                for &h in self.out_of(self.cod(g)) {
                    self.check_assoc(h, g, f)?;
                }
            }
        }
        Ok(())
    }

    /// Checks unit laws everywhere and associativity on `samples` random
    /// composable triples drawn from a fixed seed.
    pub fn check_laws_sampled(&self, samples: usize, seed: u64) -> Result<()> {
        for f in 0..self.num_morphisms() as MorId {
            self.check_identity_laws(f)?;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = self.num_morphisms();
        for _ in 0..samples {
            let f = rng.gen_range(0..m) as MorId;
            let outs = self.out_of(self.cod(f));
            let g = outs[rng.gen_range(0..outs.len())];
            let outs = self.out_of(self.cod(g));
            let h = outs[rng.gen_range(0..outs.len())];
            self.check_pair_laws(g, f)?;
            self.check_assoc(h, g, f)?;
        }
        Ok(())
    }

    /// The opposite category; morphism numbering is kept.
    pub fn opposite(&self) -> FinCat {
        let mors = self
            .mors
            .iter()
            .map(|m| Morphism { dom: m.cod, cod: m.dom, name: m.name.clone() })
            .collect();
        let mut cat = FinCat::new(
            self.objects.clone(),
            self.levels.clone(),
            mors,
            self.ids.clone(),
            |g, f| self.compose(f, g),
            self.depth,
        )
        .expect("opposite of a valid category");
        cat.cube = None;
        cat
    }

    /// The full subcategory on `keep` (in the given order) and its inclusion.
    ///
    /// When `self` is the cube site `□≤N` and `keep` is `0..=k`, the result is
    /// again a cube site, identical to `□≤k`.
    pub fn full_subcategory(&self, keep: &[u32]) -> (FinCat, Functor) {
        let mut new_obj = vec![u32::MAX; self.num_objects()];
        for (i, &a) in keep.iter().enumerate() {
            new_obj[a as usize] = i as u32;
        }
        let mut old_mor = Vec::new();
        let mut new_mor = vec![u32::MAX; self.num_morphisms()];
        for &a in keep {
            for &b in keep {
                for &f in self.hom(a, b) {
                    new_mor[f as usize] = old_mor.len() as u32;
                    old_mor.push(f);
                }
            }
        }
        let mors = old_mor
            .iter()
            .map(|&f| {
                let m = &self.mors[f as usize];
                Morphism { dom: new_obj[m.dom as usize], cod: new_obj[m.cod as usize], name: m.name.clone() }
            })
            .collect();
        let objects = keep.iter().map(|&a| self.objects[a as usize].clone()).collect();
        let levels = keep.iter().map(|&a| self.levels[a as usize]).collect();
        let ids = keep.iter().map(|&a| new_mor[self.id(a) as usize]).collect();
        let depth = keep.iter().map(|&a| self.levels[a as usize]).max().unwrap_or(0).min(self.depth);
        let mut cat = FinCat::new(
            objects,
            levels,
            mors,
            ids,
            |g, f| new_mor[self.compose(old_mor[g as usize], old_mor[f as usize]) as usize],
            depth,
        )
        .expect("full subcategory of a valid category");
        if let Some(data) = &self.cube {
            let prefix = keep.iter().enumerate().all(|(i, &a)| a as usize == i);
            if prefix {
                let k = keep.len().saturating_sub(1);
                let maps = old_mor.iter().map(|&f| data.maps[f as usize].clone()).collect();
                cat.cube = Some(CubeData { n: k, maps });
            }
        }
        (cat, Functor { obj: keep.to_vec(), mor: old_mor })
    }

    /// The objects whose level is at most `k`, in index order.
    pub fn objects_up_to_level(&self, k: usize) -> Vec<u32> {
        (0..self.num_objects() as u32).filter(|&a| self.level(a) <= k).collect()
    }
}

/// A functor between finite categories, as object and morphism tables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Functor {
    pub obj: Vec<u32>,
    pub mor: Vec<MorId>,
}

impl Functor {
    pub fn identity(c: &FinCat) -> Functor {
        Functor { obj: (0..c.num_objects() as u32).collect(), mor: (0..c.num_morphisms() as u32).collect() }
    }

    /// `self ∘ g`.
    pub fn after(&self, g: &Functor) -> Functor {
        Functor {
            obj: g.obj.iter().map(|&a| self.obj[a as usize]).collect(),
            mor: g.mor.iter().map(|&f| self.mor[f as usize]).collect(),
        }
    }

    /// Checks that the tables define a functor `src -> tgt`.
    pub fn check(&self, src: &FinCat, tgt: &FinCat) -> Result<()> {
        let bad = |why: String| Err(Error::Malformed(why));
        if self.obj.len() != src.num_objects() || self.mor.len() != src.num_morphisms() {
            return bad("functor tables have the wrong size".into());
        }
        for f in 0..src.num_morphisms() as MorId {
            let v = self.mor[f as usize];
            if v as usize >= tgt.num_morphisms()
                || tgt.dom(v) != self.obj[src.dom(f) as usize]
                || tgt.cod(v) != self.obj[src.cod(f) as usize]
            {
                return bad(format!("{} is sent to a morphism with the wrong endpoints", src.morphism(f).name));
            }
            if src.is_identity(f) && !tgt.is_identity(v) {
                return bad(format!("identity {} is not preserved", src.morphism(f).name));
            }
            for &g in src.out_of(src.cod(f)) {
                if self.mor[src.compose(g, f) as usize] != tgt.compose(self.mor[g as usize], v) {
                    return bad(format!(
                        "composite {} ∘ {} is not preserved",
                        src.morphism(g).name,
                        src.morphism(f).name
                    ));
                }
            }
        }
        Ok(())
    }
}

/// All functors `c -> d` in canonical order (lexicographic on the object
/// table, then on the morphism table).
pub fn functors(c: &FinCat, d: &FinCat, budget: &mut Budget) -> Result<Vec<Functor>> {
    let mut out = Vec::new();
    functors_with(c, d, budget, |f| {
        out.push(f.clone());
        true
    })?;
    out.sort();
    Ok(out)
}

/// Calls `visit` on every functor `c -> d` until it returns `false`.
pub fn functors_with(
    c: &FinCat,
    d: &FinCat,
    budget: &mut Budget,
    mut visit: impl FnMut(&Functor) -> bool,
) -> Result<()> {
    if c.num_objects() == 0 {
        visit(&Functor { obj: Vec::new(), mor: Vec::new() });
        return Ok(());
    }
    if d.num_objects() == 0 {
        return Ok(());
    }
    // Variables: each object followed by the non-identity morphisms whose
    // endpoints are now both placed.
    let order = c.search_order();
    let mut placed = vec![false; c.num_objects()];
    let mut steps: Vec<Step> = Vec::new();
    for &a in &order {
        placed[a as usize] = true;
        steps.push(Step::Obj(a));
        for f in 0..c.num_morphisms() as MorId {
            let m = c.morphism(f);
            if c.is_identity(f) || !(m.dom == a || m.cod == a) {
                continue;
            }
            if placed[m.dom as usize] && placed[m.cod as usize] {
                steps.push(Step::Mor(f));
            }
        }
    }
    let mut triples: Vec<Vec<(MorId, MorId, MorId)>> = vec![Vec::new(); c.num_morphisms()];
    for f in 0..c.num_morphisms() as MorId {
        if c.is_identity(f) {
            continue;
        }
        for &g in c.out_of(c.cod(f)) {
            if c.is_identity(g) {
                continue;
            }
            let h = c.compose(g, f);
            triples[f as usize].push((g, f, h));
            triples[g as usize].push((g, f, h));
            if !c.is_identity(h) {
                triples[h as usize].push((g, f, h));
            }
        }
    }
    let mut state = FunctorSearch {
        c,
        d,
        steps,
        triples,
        obj: vec![u32::MAX; c.num_objects()],
        mor: vec![u32::MAX; c.num_morphisms()],
    };
    state.rec(0, budget, &mut visit)?;
    Ok(())
}

enum Step {
    Obj(u32),
    Mor(MorId),
}

struct FunctorSearch<'a> {
    c: &'a FinCat,
    d: &'a FinCat,
    steps: Vec<Step>,
    triples: Vec<Vec<(MorId, MorId, MorId)>>,
    obj: Vec<u32>,
    mor: Vec<MorId>,
}

impl FunctorSearch<'_> {
    fn value(&self, f: MorId) -> MorId {
        self.mor[f as usize]
    }

    fn consistent(&self, f: MorId) -> bool {
        self.triples[f as usize].iter().all(|&(g, h, k)| {
            let (vg, vh, vk) = (self.value(g), self.value(h), self.value(k));
            vg == u32::MAX || vh == u32::MAX || vk == u32::MAX || self.d.compose(vg, vh) == vk
        })
    }

    /// Returns `false` when the visitor asked to stop.
    fn rec(&mut self, i: usize, budget: &mut Budget, visit: &mut dyn FnMut(&Functor) -> bool) -> Result<bool> {
        if i == self.steps.len() {
            let f = Functor { obj: self.obj.clone(), mor: self.mor.clone() };
            return Ok(visit(&f));
        }
        match self.steps[i] {
            Step::Obj(a) => {
                for x in 0..self.d.num_objects() as u32 {
                    budget.tick("functor enumeration")?;
                    self.obj[a as usize] = x;
                    let ida = self.c.id(a);
                    self.mor[ida as usize] = self.d.id(x);
                    let ok = self.consistent(ida);
                    if ok && !self.rec(i + 1, budget, visit)? {
                        return Ok(false);
                    }
                    self.mor[ida as usize] = u32::MAX;
                }
                self.obj[a as usize] = u32::MAX;
            }
            Step::Mor(f) => {
                let m = self.c.morphism(f);
                let (x, y) = (self.obj[m.dom as usize], self.obj[m.cod as usize]);
                for k in 0..self.d.hom(x, y).len() {
                    budget.tick("functor enumeration")?;
                    let v = self.d.hom(x, y)[k];
                    self.mor[f as usize] = v;
                    if self.consistent(f) && !self.rec(i + 1, budget, visit)? {
                        return Ok(false);
                    }
                }
                self.mor[f as usize] = u32::MAX;
            }
        }
        Ok(true)
    }
}

/// A category presented by generating data; identities are added.
fn from_table(
    objects: &[&str],
    mors: &[(&str, usize, usize)],
    compose: impl Fn(&str, &str) -> String,
) -> FinCat {
    let mut all: Vec<Morphism> = objects
        .iter()
        .enumerate()
        .map(|(a, o)| Morphism { dom: a as u32, cod: a as u32, name: format!("id_{o}") })
        .collect();
    all.extend(mors.iter().map(|(n, a, b)| Morphism { dom: *a as u32, cod: *b as u32, name: n.to_string() }));
    let ids = (0..objects.len() as u32).collect();
    let index: HashMap<String, MorId> = all.iter().enumerate().map(|(i, m)| (m.name.clone(), i as MorId)).collect();
    let names: Vec<String> = all.iter().map(|m| m.name.clone()).collect();
    let idn = objects.len() as u32;
    let cat = FinCat::new(
        objects.iter().map(|s| s.to_string()).collect(),
        vec![0; objects.len()],
        all,
        ids,
        |g, f| {
            if g < idn {
                f
            } else if f < idn {
                g
            } else {
                index[&compose(&names[g as usize], &names[f as usize])]
            }
        },
        0,
    )
    .expect("valid table");
    cat.check_laws_exhaustive().expect("category laws");
    cat
}

/// The terminal category `𝟙`.
pub fn terminal_category() -> FinCat {
    from_table(&["*"], &[], |_, _| unreachable!())
}

/// The walking arrow `𝟚 = (0 -> 1)`.
pub fn arrow_category() -> FinCat {
    chain(2)
}

/// The walking isomorphism: two objects and mutually inverse arrows.
pub fn walking_iso() -> FinCat {
    from_table(&["0", "1"], &[("f", 0, 1), ("g", 1, 0)], |g, f| match (g, f) {
        ("g", "f") => "id_0".into(),
        ("f", "g") => "id_1".into(),
        _ => unreachable!(),
    })
}

/// The poset `0 < 1 < ... < k-1` as a category.
pub fn chain(k: usize) -> FinCat {
    let objects: Vec<String> = (0..k).map(|i| i.to_string()).collect();
    let mut mors = Vec::new();
    let mut index = HashMap::new();
    for a in 0..k {
        for b in a..k {
            index.insert((a, b), mors.len() as MorId);
            let name = if a == b { format!("id_{a}") } else { format!("{a}<{b}") };
            mors.push(Morphism { dom: a as u32, cod: b as u32, name });
        }
    }
    let ids = (0..k).map(|a| index[&(a, a)]).collect();
    let doms: Vec<(u32, u32)> = mors.iter().map(|m| (m.dom, m.cod)).collect();
    FinCat::new(
        objects,
        (0..k).collect(),
        mors,
        ids,
        |g, f| index[&(doms[f as usize].0 as usize, doms[g as usize].1 as usize)],
        k.saturating_sub(1),
    )
    .expect("valid chain")
}

/// The skeleton of finite sets `{0, ..., alpha-1}` with all functions, or
/// with the point-preserving functions between pointed sets when `pointed`.
pub fn finite_sets(alpha: usize, pointed: bool) -> FinCat {
    FiniteSets::new(alpha, pointed).cat
}

/// [`finite_sets`] together with the value table of every morphism.
///
/// In the pointed variant object `(n, p)` is the set of size `n` pointed at
/// `p`. A morphism is named by its value table.
#[derive(Clone, Debug)]
pub struct FiniteSets {
    pub cat: FinCat,
    pub objects: Vec<(usize, Option<usize>)>,
    pub tables: Vec<Vec<usize>>,
    index: HashMap<(usize, usize, Vec<usize>), MorId>,
}

impl FiniteSets {
    pub fn new(alpha: usize, pointed: bool) -> FiniteSets {
        let mut objects: Vec<(usize, Option<usize>)> = Vec::new();
        for n in 0..alpha {
            if pointed {
                objects.extend((0..n).map(|p| (n, Some(p))));
            } else {
                objects.push((n, None));
            }
        }
        let mut mors = Vec::new();
        let mut tables: Vec<Vec<usize>> = Vec::new();
        let mut index: HashMap<(usize, usize, Vec<usize>), MorId> = HashMap::new();
        for (a, &(n, p)) in objects.iter().enumerate() {
            for (b, &(m, q)) in objects.iter().enumerate() {
                for t in all_functions(n, m) {
                    if let (Some(p), Some(q)) = (p, q) {
                        if t[p] != q {
                            continue;
                        }
                    }
                    index.insert((a, b, t.clone()), mors.len() as MorId);
                    let name = format!("{}->{}:{:?}", a, b, t);
                    mors.push(Morphism { dom: a as u32, cod: b as u32, name });
                    tables.push(t);
                }
            }
        }
        let ids = objects.iter().enumerate().map(|(a, &(n, _))| index[&(a, a, (0..n).collect())]).collect();
        let names = objects
            .iter()
            .map(|&(n, p)| match p {
                Some(p) => format!("{n}@{p}"),
                None => n.to_string(),
            })
            .collect();
        let levels = objects.iter().map(|&(n, _)| n).collect();
        let ends: Vec<(usize, usize)> = mors.iter().map(|m| (m.dom as usize, m.cod as usize)).collect();
        let cat = FinCat::new(
            names,
            levels,
            mors,
            ids,
            |g, f| {
                let t: Vec<usize> = tables[f as usize].iter().map(|&x| tables[g as usize][x]).collect();
                index[&(ends[f as usize].0, ends[g as usize].1, t)]
            },
            0,
        )
        .expect("valid skeleton");
        FiniteSets { cat, objects, tables, index }
    }

    /// The object `(n, p)`.
    pub fn object(&self, n: usize, p: Option<usize>) -> Option<u32> {
        self.objects.iter().position(|&o| o == (n, p)).map(|a| a as u32)
    }

    /// The morphism `a -> b` with the given value table.
    pub fn morphism(&self, a: u32, b: u32, table: &[usize]) -> Option<MorId> {
        self.index.get(&(a as usize, b as usize, table.to_vec())).copied()
    }
}

fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                (0..m).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// JSON form of an explicit finite category.
///
/// Identities are implicit and named `id_<object>`. `composition` lists
/// `[g, f, g∘f]` for every composable pair of non-identity morphisms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinCatJson {
    pub objects: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    pub morphisms: Vec<MorphismJson>,
    pub composition: Vec<(String, String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismJson {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

impl FinCatJson {
    pub fn to_fincat(&self) -> Result<FinCat> {
        let obj = |s: &str| {
            self.objects
                .iter()
                .position(|o| o == s)
                .map(|i| i as u32)
                .ok_or_else(|| Error::Input(format!("unknown object {s:?}")))
        };
        let mut mors: Vec<Morphism> = self
            .objects
            .iter()
            .enumerate()
            .map(|(a, o)| Morphism { dom: a as u32, cod: a as u32, name: format!("id_{o}") })
            .collect();
        for m in &self.morphisms {
            mors.push(Morphism { dom: obj(&m.dom)?, cod: obj(&m.cod)?, name: m.name.clone() });
        }
        let mut index = HashMap::new();
        for (i, m) in mors.iter().enumerate() {
            if index.insert(m.name.clone(), i as MorId).is_some() {
                return Err(Error::Input(format!("duplicate morphism name {:?}", m.name)));
            }
        }
        let mut table = HashMap::new();
        for (g, f, h) in &self.composition {
            let look = |s: &String| index.get(s).copied().ok_or_else(|| Error::Input(format!("unknown morphism {s:?}")));
            table.insert((look(g)?, look(f)?), look(h)?);
        }
        let n = self.objects.len() as u32;
        for f in n..mors.len() as u32 {
            for g in n..mors.len() as u32 {
                if mors[f as usize].cod == mors[g as usize].dom && !table.contains_key(&(g, f)) {
                    return Err(Error::Input(format!(
                        "composition of {:?} after {:?} is missing",
                        mors[g as usize].name, mors[f as usize].name
                    )));
                }
            }
        }
        let levels = self.levels.clone().unwrap_or_else(|| vec![0; self.objects.len()]);
        let depth = levels.iter().copied().max().unwrap_or(0);
        let cat = FinCat::new(
            self.objects.clone(),
            levels,
            mors,
            (0..n).collect(),
            |g, f| {
                if g < n {
                    f
                } else if f < n {
                    g
                } else {
                    table[&(g, f)]
                }
            },
            depth,
        )?;
        cat.check_laws_exhaustive().map_err(|e| Error::Input(e.to_string()))?;
        Ok(cat)
    }

    pub fn from_fincat(c: &FinCat) -> FinCatJson {
        let nonid: Vec<MorId> = (0..c.num_morphisms() as MorId).filter(|&f| !c.is_identity(f)).collect();
        let name = |f: MorId| {
            if c.is_identity(f) {
                format!("id_{}", c.object_name(c.dom(f)))
            } else {
                c.morphism(f).name.clone()
            }
        };
        let mut composition = Vec::new();
        for &g in &nonid {
            for &f in c.incoming(c.dom(g)) {
                if !c.is_identity(f) {
                    composition.push((name(g), name(f), name(c.compose(g, f))));
                }
            }
        }
        let levels = (0..c.num_objects() as u32).map(|a| c.level(a)).collect::<Vec<_>>();
        FinCatJson {
            objects: c.object_names().to_vec(),
            levels: if levels.iter().all(|&l| l == 0) { None } else { Some(levels) },
            morphisms: nonid
                .iter()
                .map(|&f| MorphismJson {
                    name: name(f),
                    dom: c.object_name(c.dom(f)).to_string(),
                    cod: c.object_name(c.cod(f)).to_string(),
                })
                .collect(),
            composition,
        }
    }
}

/// Shared handle to a site.
pub type Site = Arc<FinCat>;

#[cfg(test)]
mod tests {
    use super::*;

    fn count(c: &FinCat, d: &FinCat) -> usize {
        functors(c, d, &mut Budget::new(1_000_000)).unwrap().len()
    }

    #[test]
    fn standard_categories_obey_laws() {
        for c in [terminal_category(), arrow_category(), walking_iso(), chain(3), finite_sets(3, false), finite_sets(3, true)] {
            c.check_laws_exhaustive().unwrap();
            c.opposite().check_laws_exhaustive().unwrap();
        }
    }

    #[test]
    fn functor_counts_by_hand() {
        let two = arrow_category();
        assert_eq!(count(&two, &two), 3);
        assert_eq!(count(&chain(3), &two), 4);
        assert_eq!(count(&walking_iso(), &two), 2);
        assert_eq!(count(&two, &walking_iso()), 4);
        assert_eq!(count(&terminal_category(), &chain(3)), 3);
    }

    #[test]
    fn finite_set_skeleton_sizes() {
        assert_eq!(finite_sets(2, false).num_morphisms(), 3);
        assert_eq!(finite_sets(3, false).num_morphisms(), 11);
        assert_eq!(finite_sets(2, true).num_morphisms(), 1);
    }

    #[test]
    fn json_round_trip() {
        for c in [walking_iso(), chain(3), finite_sets(3, false)] {
            let j = FinCatJson::from_fincat(&c);
            let back = j.to_fincat().unwrap();
            assert_eq!(FinCatJson::from_fincat(&back), j);
            let text = serde_json::to_string(&j).unwrap();
            let again: FinCatJson = serde_json::from_str(&text).unwrap();
            assert_eq!(again, j);
        }
    }

    #[test]
    fn missing_composite_is_rejected() {
        let mut j = FinCatJson::from_fincat(&walking_iso());
        j.composition.pop();
        assert!(j.to_fincat().is_err());
    }

    #[test]
    fn full_subcategory_of_cube_site_is_cube_site() {
        let site = crate::cube::build_site(2).unwrap();
        let (sub, inc) = site.full_subcategory(&[0, 1]);
        let small = crate::cube::build_site(1).unwrap();
        assert!(sub.same_as(&small));
        assert_eq!(sub.cube().unwrap().n, 1);
        inc.check(&sub, &site).unwrap();
    }
}
