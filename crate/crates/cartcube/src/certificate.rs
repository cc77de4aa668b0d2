//! Replayable certificates: a problem, its digest, and a found solution.
//! Replay checks the solution's equations directly, without searching.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cofib::CofibrationClass;
use crate::error::{Error, Result};
use crate::fib::{FibrationStructure, Mode, Problems};
use crate::presheaf::json::{NatTransJson, PresheafJson};
use crate::presheaf::{NatTrans, Presheaf};
use crate::report::{CheckReport, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Problem {
    /// A natural isomorphism between two presheaves.
    Iso { source: PresheafJson, target: PresheafJson },
    /// A diagonal filler for a commuting square `right ∘ top = bottom ∘ left`.
    Filler { left: NatTransJson, right: NatTransJson, top: NatTransJson, bottom: NatTransJson },
    /// A uniform fibration structure on a map, as fillers for its problem presheaf.
    Fibration { map: NatTransJson, mode: Mode, class: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub problem_digest: String,
    pub problem: Problem,
    /// Component tables of the solution, keyed by object name.
    pub solution: BTreeMap<String, Vec<u32>>,
}

fn digest(p: &Problem) -> String {
    hex::encode(Sha256::digest(serde_json::to_string(p).expect("problems serialize").as_bytes()))
}

fn tables(f: &NatTrans) -> BTreeMap<String, Vec<u32>> {
    let site = f.src().site();
    (0..site.num_objects() as u32).map(|c| (site.object_name(c).to_string(), f.component(c).to_vec())).collect()
}

impl Certificate {
    pub fn new(problem: Problem, solution: &NatTrans) -> Certificate {
        Certificate { schema_version: SCHEMA_VERSION, problem_digest: digest(&problem), problem, solution: tables(solution) }
    }

    pub fn iso(f: &NatTrans) -> Certificate {
        let problem =
            Problem::Iso { source: PresheafJson::from_presheaf(f.src()), target: PresheafJson::from_presheaf(f.tgt()) };
        Certificate::new(problem, f)
    }

    pub fn filler(left: &NatTrans, right: &NatTrans, top: &NatTrans, bottom: &NatTrans, diagonal: &NatTrans) -> Certificate {
        let j = NatTransJson::from_nat_trans;
        let problem = Problem::Filler { left: j(left), right: j(right), top: j(top), bottom: j(bottom) };
        Certificate::new(problem, diagonal)
    }

    /// A fibration structure, with fillers keyed by the level they fill at.
    pub fn fibration(f: &NatTrans, class: &str, j: &FibrationStructure) -> Certificate {
        let problem = Problem::Fibration { map: NatTransJson::from_nat_trans(f), mode: j.mode, class: class.to_string() };
        let solution = j.fillers.iter().enumerate().map(|(n, t)| (n.to_string(), t.clone())).collect();
        Certificate { schema_version: SCHEMA_VERSION, problem_digest: digest(&problem), problem, solution }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("certificates serialize")
    }

    pub fn from_json(v: &Value) -> Result<Certificate> {
        serde_json::from_value(v.clone()).map_err(|e| Error::Input(format!("corrupt certificate: {e}")))
    }

    /// Re-checks the certificate. Errors mean the file itself is unusable
    /// (corrupt, or its problem does not match its digest); a wrong
    /// solution yields a `FAIL` report naming the violated equation.
    pub fn verify(&self) -> Result<CheckReport> {
        if digest(&self.problem) != self.problem_digest {
            return Err(Error::Input("certificate digest mismatch".into()));
        }
        let mut r = CheckReport::new("verify");
        match &self.problem {
            Problem::Iso { source, target } => {
                r.set_param("kind", "iso");
                let src = source.to_presheaf()?.into_psh();
                let tgt = target.to_presheaf_on(src.site())?.into_psh();
                let Some(f) = self.solution_map(&mut r, &src, &tgt) else { return Ok(r) };
                r.require(f.is_iso(), "solution is not levelwise bijective", || json!(null));
            }
            Problem::Filler { left, right, top, bottom } => {
                r.set_param("kind", "filler");
                let l = left.to_nat_trans()?;
                let site = l.src().site().clone();
                let rt = right.to_nat_trans_on(&site)?;
                let t = top.to_nat_trans_on(&site)?;
                let b = bottom.to_nat_trans_on(&site)?;
                let square = l.then(&b).ok().zip(t.then(&rt).ok());
                r.require(
                    matches!(&square, Some((x, y)) if x.components() == y.components()),
                    "the square does not commute",
                    || json!(null),
                );
                let Some(d) = self.solution_map(&mut r, l.tgt(), t.tgt()) else { return Ok(r) };
                check_triangle(&mut r, "diagonal ∘ left = top", &l, &d, &t);
                check_triangle(&mut r, "right ∘ diagonal = bottom", &d, &rt, &b);
            }
            Problem::Fibration { map, mode, class } => {
                r.set_param("kind", "fibration");
                let f = map.to_nat_trans()?;
                let cls = CofibrationClass::by_name(f.src().site(), class)?;
                let pr = Problems::new(&f, &cls, *mode, &mut crate::search::Budget::default())?;
                let mut fillers = Vec::new();
                for n in 0..pr.sub.num_objects() {
                    match self.solution.get(&n.to_string()) {
                        Some(t) => fillers.push(t.clone()),
                        None => {
                            r.fail(format!("no fillers at level {n}"), json!({"level": n}));
                            return Ok(r);
                        }
                    }
                }
                r.push(FibrationStructure { mode: *mode, fillers }.verify(&pr));
            }
        }
        r.count("cells", self.solution.values().map(|v| v.len() as u64).sum());
        Ok(r)
    }

    fn solution_map(&self, r: &mut CheckReport, src: &std::sync::Arc<Presheaf>, tgt: &std::sync::Arc<Presheaf>) -> Option<NatTrans> {
        let site = src.site();
        let mut comp = Vec::new();
        for c in 0..site.num_objects() as u32 {
            let name = site.object_name(c);
            match self.solution.get(name) {
                Some(t) if t.len() == src.size(c) && t.iter().all(|&v| (v as usize) < tgt.size(c)) => comp.push(t.clone()),
                _ => {
                    r.fail(format!("solution table at {name} has the wrong shape"), json!({"object": name}));
                    return None;
                }
            }
        }
        let f = NatTrans::from_parts(src.clone(), tgt.clone(), comp);
        if let Some(w) = f.naturality_failure() {
            r.fail(
                format!("naturality fails: {} on cell {}", w.morphism, w.cell),
                json!({"equation": "naturality", "morphism": w.morphism, "cell": w.cell}),
            );
            return None;
        }
        Some(f)
    }
}

fn check_triangle(r: &mut CheckReport, eq: &str, first: &NatTrans, second: &NatTrans, expected: &NatTrans) {
    let site = first.src().site();
    for c in 0..site.num_objects() as u32 {
        for (x, &y) in first.component(c).iter().enumerate() {
            let got = second.apply(c, y);
            let want = expected.apply(c, x as u32);
            if got != want {
                r.fail(
                    format!("{eq} fails at {} cell {x}", site.object_name(c)),
                    json!({"equation": eq, "object": site.object_name(c), "cell": x, "got": got, "expected": want}),
                );
                return;
            }
        }
    }
}
