//! JSON forms of presheaves and maps.
//!
//! ```json
//! {
//!   "site": {"kind": "cube", "N": 1},
//!   "levels": {"0": 2, "1": 3},
//!   "action": {"[0->1: 0]": [0, 0, 1], "[0->1: 1]": [1, 1, 1], ...}
//! }
//! ```
//!
//! `levels` gives the carrier size per object. `action` is keyed by
//! morphism name (the map literal on cube sites) and lists `X(f)(x)` for
//! each `x ∈ X(cod f)`. Identities may be omitted and are never written.
//! An explicit site uses `{"kind": "fincat", "objects": ..., "morphisms": ...,
//! "composition": ...}` as for categories.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{NatTrans, Presheaf, Psh};
use crate::cube::build_site;
use crate::error::{Error, Result};
use crate::fincat::{FinCatJson, Site};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SiteJson {
    Cube {
        #[serde(rename = "N")]
        n: usize,
    },
    Fincat(FinCatJson),
}

impl SiteJson {
    pub fn to_site(&self) -> Result<Site> {
        match self {
            SiteJson::Cube { n } => build_site(*n),
            SiteJson::Fincat(c) => Ok(Arc::new(c.to_fincat()?)),
        }
    }

    pub fn from_site(site: &Site) -> SiteJson {
        match site.cube() {
            Some(data) => SiteJson::Cube { n: data.n },
            None => SiteJson::Fincat(FinCatJson::from_fincat(site)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresheafJson {
    pub site: SiteJson,
    pub levels: BTreeMap<String, usize>,
    pub action: BTreeMap<String, Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validity: Option<usize>,
}

impl PresheafJson {
    pub fn from_presheaf(x: &Presheaf) -> PresheafJson {
        let site = x.site();
        let levels = (0..site.num_objects() as u32).map(|c| (site.object_name(c).to_string(), x.size(c))).collect();
        let action = (0..site.num_morphisms() as u32)
            .filter(|&f| !site.is_identity(f))
            .map(|f| (site.morphism(f).name.clone(), x.act(f).to_vec()))
            .collect();
        let validity = (x.validity() != site.depth()).then_some(x.validity());
        PresheafJson { site: SiteJson::from_site(site), levels, action, validity }
    }

    /// Builds the presheaf on a freshly constructed site.
    pub fn to_presheaf(&self) -> Result<Presheaf> {
        let site = self.site.to_site()?;
        self.to_presheaf_on(&site)
    }

    /// Builds the presheaf on a given site, which must match `self.site`.
    pub fn to_presheaf_on(&self, site: &Site) -> Result<Presheaf> {
        if SiteJson::from_site(site) != self.site {
            return Err(Error::SiteMismatch);
        }
        let mut sizes = Vec::with_capacity(site.num_objects());
        for c in 0..site.num_objects() as u32 {
            let name = site.object_name(c);
            sizes.push(*self.levels.get(name).ok_or_else(|| Error::Input(format!("no size for object {name}")))?);
        }
        if self.levels.len() != site.num_objects() {
            return Err(Error::Input("levels name objects outside the site".into()));
        }
        let mut act = Vec::with_capacity(site.num_morphisms());
        let mut used = 0;
        for f in 0..site.num_morphisms() as u32 {
            let name = &site.morphism(f).name;
            match self.action.get(name) {
                Some(t) => {
                    used += 1;
                    act.push(t.clone());
                }
                None if site.is_identity(f) => act.push((0..sizes[site.cod(f) as usize] as u32).collect()),
                None => return Err(Error::Input(format!("no action given for {name}"))),
            }
        }
        if used != self.action.len() {
            return Err(Error::Input("action names morphisms outside the site".into()));
        }
        let x = Presheaf::new(site.clone(), sizes, act).map_err(|e| Error::Input(e.to_string()))?;
        Ok(match self.validity {
            Some(v) if v <= site.depth() => x.with_validity(v, false),
            Some(_) => return Err(Error::Input("validity exceeds the site depth".into())),
            None => x,
        })
    }
}

/// A map between presheaves given inline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NatTransJson {
    pub source: PresheafJson,
    pub target: PresheafJson,
    pub components: BTreeMap<String, Vec<u32>>,
}

impl NatTransJson {
    pub fn from_nat_trans(f: &NatTrans) -> NatTransJson {
        let site = f.src().site();
        NatTransJson {
            source: PresheafJson::from_presheaf(f.src()),
            target: PresheafJson::from_presheaf(f.tgt()),
            components: (0..site.num_objects() as u32)
                .map(|c| (site.object_name(c).to_string(), f.component(c).to_vec()))
                .collect(),
        }
    }

    pub fn to_nat_trans(&self) -> Result<NatTrans> {
        let site = self.source.site.to_site()?;
        self.to_nat_trans_on(&site)
    }

    pub fn to_nat_trans_on(&self, site: &Site) -> Result<NatTrans> {
        let src: Psh = self.source.to_presheaf_on(site)?.into_psh();
        let tgt: Psh = self.target.to_presheaf_on(site)?.into_psh();
        let mut comp = Vec::with_capacity(site.num_objects());
        for c in 0..site.num_objects() as u32 {
            let name = site.object_name(c);
            comp.push(
                self.components
                    .get(name)
                    .cloned()
                    .ok_or_else(|| Error::Input(format!("no component at object {name}")))?,
            );
        }
        NatTrans::new(src, tgt, comp).map_err(|e| Error::Input(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::arrow_category;
    use crate::presheaf::{terminal, yoneda};

    #[test]
    fn presheaf_round_trip() {
        let s = build_site(2).unwrap();
        let x = yoneda(&s, 1);
        let j = PresheafJson::from_presheaf(&x);
        let text = serde_json::to_string(&j).unwrap();
        let back: PresheafJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, j);
        assert!(back.to_presheaf().unwrap().same_as(&x));
        assert_eq!(PresheafJson::from_presheaf(&back.to_presheaf().unwrap()), j);
    }

    #[test]
    fn fincat_site_round_trip() {
        let s: Site = Arc::new(arrow_category());
        let x = terminal(&s);
        let j = PresheafJson::from_presheaf(&x);
        let y = j.to_presheaf().unwrap();
        assert_eq!(PresheafJson::from_presheaf(&y), j);
    }

    #[test]
    fn broken_action_is_an_input_error() {
        let s = build_site(1).unwrap();
        let mut j = PresheafJson::from_presheaf(&yoneda(&s, 1));
        j.action.get_mut("[1->1: 0]").unwrap()[1] = 2;
        assert!(matches!(j.to_presheaf(), Err(Error::Input(_))));
    }

    #[test]
    fn map_round_trip() {
        let s = build_site(1).unwrap();
        let x = yoneda(&s, 1).into_psh();
        let f = NatTrans::identity(&x);
        let j = NatTransJson::from_nat_trans(&f);
        assert!(j.to_nat_trans().unwrap().same_as(&f));
    }
}
