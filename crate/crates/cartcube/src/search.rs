//! The search kernel for natural transformations.
//!
//! Cells of the source are assigned in order of descending object level.
//! Choosing the image of a cell `x ∈ X(d)` forces the image of `X(f)(x)` for
//! every morphism `f` into `d`, so a conflict is detected as soon as two
//! choices disagree on a common face. Per-cell candidate sets are first
//! narrowed to arc consistency.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::presheaf::Presheaf;

/// A node budget for exhaustive searches.
#[derive(Clone, Debug)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub const DEFAULT: u64 = 50_000_000;

    pub fn new(limit: u64) -> Budget {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Budget {
        Budget::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.limit.saturating_sub(self.used)
    }

    #[inline]
    pub fn tick(&mut self, during: &str) -> Result<()> {
        self.charge(1, during)
    }

    #[inline]
    pub fn charge(&mut self, n: u64, during: &str) -> Result<()> {
        self.used = self.used.saturating_add(n);
        if self.used > self.limit {
            return Err(Error::Budget { limit: self.limit, during: during.to_string() });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Budget {
        Budget::new(Budget::DEFAULT)
    }
}

/// Components of a natural transformation, one table per object.
pub type Components = Vec<Vec<u32>>;

const NONE: u32 = u32::MAX;

/// A constrained search for natural transformations `src -> tgt`.
#[derive(Clone)]
pub struct NatSearch<'a> {
    src: &'a Presheaf,
    tgt: &'a Presheaf,
    offsets: Vec<usize>,
    obj_of: Vec<u32>,
    domains: Vec<FixedBitSet>,
    injective: bool,
    consistent: bool,
}

impl<'a> NatSearch<'a> {
    pub fn new(src: &'a Presheaf, tgt: &'a Presheaf) -> Result<NatSearch<'a>> {
        if !src.site().same_as(tgt.site()) {
            return Err(Error::SiteMismatch);
        }
        let n = src.site().num_objects();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut obj_of = Vec::new();
        let mut domains = Vec::new();
        let mut total = 0;
        for c in 0..n as u32 {
            offsets.push(total);
            total += src.size(c);
            for _ in 0..src.size(c) {
                obj_of.push(c);
                let mut d = FixedBitSet::with_capacity(tgt.size(c));
                d.insert_range(..);
                domains.push(d);
            }
        }
        offsets.push(total);
        Ok(NatSearch { src, tgt, offsets, obj_of, domains, injective: false, consistent: true })
    }

    /// Only injective (levelwise) assignments are reported.
    pub fn injective(mut self) -> Self {
        self.injective = true;
        self
    }

    fn global(&self, c: u32, x: u32) -> usize {
        self.offsets[c as usize] + x as usize
    }

    /// Intersects the candidates of `x ∈ src(c)` with `allowed`.
    pub fn restrict(&mut self, c: u32, x: u32, allowed: impl IntoIterator<Item = u32>) {
        let g = self.global(c, x);
        let mut keep = FixedBitSet::with_capacity(self.tgt.size(c));
        for v in allowed {
            if (v as usize) < keep.len() {
                keep.insert(v as usize);
            }
        }
        self.domains[g].intersect_with(&keep);
    }

    /// Keeps only the candidates of `x ∈ src(c)` satisfying `pred`.
    pub fn retain(&mut self, c: u32, x: u32, mut pred: impl FnMut(u32) -> bool) {
        let g = self.global(c, x);
        let drop: Vec<usize> = self.domains[g].ones().filter(|&v| !pred(v as u32)).collect();
        for v in drop {
            self.domains[g].set(v, false);
        }
    }

    /// Forces the image of `x ∈ src(c)` to be `v`.
    pub fn fix(&mut self, c: u32, x: u32, v: u32) {
        if v as usize >= self.tgt.size(c) {
            self.consistent = false;
            return;
        }
        let g = self.global(c, x);
        let had = self.domains[g].contains(v as usize);
        self.domains[g].clear();
        if had {
            self.domains[g].insert(v as usize);
        }
    }

    /// Marks the problem unsatisfiable.
    pub fn forbid(&mut self) {
        self.consistent = false;
    }

    pub fn candidates(&self, c: u32, x: u32) -> Vec<u32> {
        self.domains[self.global(c, x)].ones().map(|v| v as u32).collect()
    }

    /// Narrows candidate sets until every functional constraint
    /// `val(X(f)x) = Y(f)(val x)` is arc consistent. Returns `false` if some
    /// candidate set became empty.
    fn arc_consistency(&mut self, budget: &mut Budget) -> Result<bool> {
        let site = self.src.site();
        let mut changed = true;
        while changed {
            changed = false;
            for d in 0..site.num_objects() as u32 {
                for &f in site.incoming(d) {
                    if site.is_identity(f) {
                        continue;
                    }
                    let c = site.dom(f);
                    let sact = self.src.act(f);
                    let tact = self.tgt.act(f);
                    for x in 0..self.src.size(d) {
                        budget.tick("arc consistency")?;
                        let gx = self.offsets[d as usize] + x;
                        let gz = self.offsets[c as usize] + sact[x] as usize;
                        let mut image = FixedBitSet::with_capacity(self.tgt.size(c));
                        let mut drop = Vec::new();
                        for y in self.domains[gx].ones() {
                            let w = tact[y] as usize;
                            if self.domains[gz].contains(w) {
                                image.insert(w);
                            } else {
                                drop.push(y);
                            }
                        }
                        if !drop.is_empty() {
                            changed = true;
                            for y in drop {
                                self.domains[gx].set(y, false);
                            }
                        }
                        if self.domains[gx].is_clear() {
                            return Ok(false);
                        }
                        if image.count_ones(..) < self.domains[gz].count_ones(..) {
                            changed = true;
                            self.domains[gz].intersect_with(&image);
                        }
                    }
                }
            }
        }
        Ok(self.domains.iter().all(|d| !d.is_clear()))
    }

    /// Calls `visit` on every solution until it returns `false`.
    pub fn for_each(&self, budget: &mut Budget, mut visit: impl FnMut(&Components) -> bool) -> Result<()> {
        if !self.consistent {
            return Ok(());
        }
        let mut me = self.clone();
        if !me.arc_consistency(budget)? {
            return Ok(());
        }
        me.dfs(budget, &mut visit)
    }

    fn dfs(&self, budget: &mut Budget, visit: &mut dyn FnMut(&Components) -> bool) -> Result<()> {
        let site = self.src.site();
        let total = self.obj_of.len();
        let nonid_into: Vec<Vec<u32>> = (0..site.num_objects() as u32)
            .map(|d| site.incoming(d).iter().copied().filter(|&f| !site.is_identity(f)).collect())
            .collect();
        let mut order: Vec<usize> = Vec::with_capacity(total);
        let objs = site.search_order();
        for pass in 0..2 {
            for &c in &objs {
                for x in 0..self.src.size(c) {
                    let g = self.offsets[c as usize] + x;
                    let single = self.domains[g].count_ones(..) == 1;
                    if single == (pass == 0) {
                        order.push(g);
                    }
                }
            }
        }
        let dom_lists: Vec<Vec<u32>> = self.domains.iter().map(|d| d.ones().map(|v| v as u32).collect()).collect();
        let tgt_off: Vec<usize> = {
            let mut o = Vec::new();
            let mut t = 0;
            for c in 0..site.num_objects() as u32 {
                o.push(t);
                t += self.tgt.size(c);
            }
            o
        };
        let mut val = vec![NONE; total];
        let tgt_total: usize = (0..site.num_objects() as u32).map(|c| self.tgt.size(c)).sum();
        let mut used_by = if self.injective { vec![NONE; tgt_total] } else { Vec::new() };
        let mut trail: Vec<usize> = Vec::new();

        let assign = |g: usize, y: u32, val: &mut Vec<u32>, used_by: &mut Vec<u32>, trail: &mut Vec<usize>| -> bool {
            let put = |cell: usize, v: u32, val: &mut Vec<u32>, used_by: &mut Vec<u32>, trail: &mut Vec<usize>| -> bool {
                if self.injective {
                    let t = tgt_off[self.obj_of[cell] as usize] + v as usize;
                    if used_by[t] != NONE && used_by[t] != cell as u32 {
                        return false;
                    }
                    used_by[t] = cell as u32;
                }
                val[cell] = v;
                trail.push(cell);
                true
            };
            if !put(g, y, val, used_by, trail) {
                return false;
            }
            let d = self.obj_of[g];
            let x = g - self.offsets[d as usize];
            for &f in &nonid_into[d as usize] {
                let c = site.dom(f);
                let z = self.offsets[c as usize] + self.src.act(f)[x] as usize;
                let w = self.tgt.act(f)[y as usize];
                if val[z] == NONE {
                    if !self.domains[z].contains(w as usize) || !put(z, w, val, used_by, trail) {
                        return false;
                    }
                } else if val[z] != w {
                    return false;
                }
            }
            true
        };
        let undo = |mark: usize, val: &mut Vec<u32>, used_by: &mut Vec<u32>, trail: &mut Vec<usize>| {
            while trail.len() > mark {
                let cell = trail.pop().unwrap();
                if self.injective {
                    let t = tgt_off[self.obj_of[cell] as usize] + val[cell] as usize;
                    used_by[t] = NONE;
                }
                val[cell] = NONE;
            }
        };
        let next_free = |mut p: usize, val: &Vec<u32>| {
            while p < total && val[order[p]] != NONE {
                p += 1;
            }
            p
        };
        let emit = |val: &Vec<u32>| -> Components {
            (0..site.num_objects())
                .map(|c| val[self.offsets[c]..self.offsets[c + 1]].to_vec())
                .collect()
        };

        let start = next_free(0, &val);
        if start == total {
            visit(&emit(&val));
            return Ok(());
        }
        // Frames: (position in order, next candidate, trail mark).
        let mut stack: Vec<(usize, usize, usize)> = vec![(start, 0, 0)];
        while let Some(top) = stack.last_mut() {
            let (p, ci, mark) = *top;
            undo(mark, &mut val, &mut used_by, &mut trail);
            let g = order[p];
            let cands = &dom_lists[g];
            if ci >= cands.len() {
                stack.pop();
                continue;
            }
            top.1 += 1;
            budget.tick("natural transformation search")?;
            if assign(g, cands[ci], &mut val, &mut used_by, &mut trail) {
                let q = next_free(p + 1, &val);
                if q == total {
                    if !visit(&emit(&val)) {
                        return Ok(());
                    }
                } else {
                    let mark = trail.len();
                    stack.push((q, 0, mark));
                }
            }
        }
        Ok(())
    }

    pub fn first(&self, budget: &mut Budget) -> Result<Option<Components>> {
        let mut found = None;
        self.for_each(budget, |s| {
            found = Some(s.clone());
            false
        })?;
        Ok(found)
    }

    /// All solutions, sorted lexicographically by their component tables.
    /// Each stored solution costs its number of cells, so memory stays
    /// within the budget as well.
    pub fn all(&self, budget: &mut Budget) -> Result<Vec<Components>> {
        let mut out = Vec::new();
        let room = budget.remaining();
        let mut stored = 0u64;
        self.for_each(budget, |s| {
            stored += s.iter().map(|c| c.len() as u64).sum::<u64>().max(1);
            out.push(s.clone());
            stored <= room
        })?;
        budget.charge(stored, "storing solutions")?;
        out.sort();
        Ok(out)
    }

    pub fn count(&self, budget: &mut Budget) -> Result<u64> {
        let mut n = 0u64;
        self.for_each(budget, |_| {
            n += 1;
            true
        })?;
        Ok(n)
    }
}
