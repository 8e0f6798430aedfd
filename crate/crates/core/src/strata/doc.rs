use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chow::{AmbientClass, GradedClass};
use crate::error::{Error, Result};
use crate::linalg::{Flat, FlatDoc};

use super::{Ambient, EulerTable, StratPoset, Stratum, StratumGeometry};

/// JSON form of a stratification of `P^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosetDocument {
    pub ambient_n: usize,
    pub strata: Vec<StratumDoc>,
    /// `euler_table[Z][S]`; omitted entries are zero. When the whole table is
    /// absent all closures are treated as smooth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_table: Option<BTreeMap<String, BTreeMap<String, i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mather: Option<BTreeMap<String, Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumDoc {
    pub id: String,
    pub dim: usize,
    pub chi_c: i64,
    pub class: Vec<i64>,
    #[serde(default)]
    pub below: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flat: Option<FlatDoc>,
}

impl PosetDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("poset documents serialize")
    }

    pub fn build(&self) -> Result<(Arc<StratPoset>, EulerTable)> {
        let n = self.ambient_n;
        let index: BTreeMap<&str, usize> = self.strata.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
        let lookup =
            |id: &str| index.get(id).copied().ok_or_else(|| Error::InvalidPoset(format!("unknown stratum {id}")));
        let mut strata = Vec::with_capacity(self.strata.len());
        let mut below = Vec::with_capacity(self.strata.len());
        for s in &self.strata {
            let mather = match self.mather.as_ref().and_then(|m| m.get(&s.id)) {
                Some(v) => Some(AmbientClass::Projective(GradedClass::new(n, v.clone())?)),
                None => None,
            };
            let geometry = match &s.flat {
                Some(doc) => Some(StratumGeometry::Flat(Flat::try_from(doc)?)),
                None => None,
            };
            strata.push(Stratum {
                id: s.id.clone(),
                dim: s.dim,
                chi_c: s.chi_c,
                class: AmbientClass::Projective(GradedClass::new(n, s.class.clone())?),
                mather,
                geometry,
            });
            below.push(s.below.iter().map(|id| lookup(id)).collect::<Result<Vec<_>>>()?);
        }
        let poset = StratPoset::new(Ambient::Projective(n), strata, below)?;
        let table = match &self.euler_table {
            None => EulerTable::smooth(&poset),
            Some(rows) => {
                let k = poset.len();
                let mut e = vec![vec![0; k]; k];
                for (z, row) in rows {
                    let zi = lookup(z)?;
                    for (s, v) in row {
                        e[zi][lookup(s)?] = *v;
                    }
                }
                EulerTable::new(&poset, e)?
            }
        };
        Ok((Arc::new(poset), table))
    }

    pub fn from_poset(poset: &StratPoset, table: &EulerTable) -> Result<Self> {
        let Ambient::Projective(n) = poset.ambient() else {
            return Err(Error::Unsupported("JSON export of product stratifications".into()));
        };
        let mut strata = Vec::new();
        let mut euler = BTreeMap::new();
        let mut mather = BTreeMap::new();
        for (t, s) in poset.strata().iter().enumerate() {
            let class = s.class.as_projective().expect("projective ambient").coeffs().to_vec();
            let flat = match &s.geometry {
                Some(StratumGeometry::Flat(f)) => Some(FlatDoc::from(f)),
                _ => None,
            };
            strata.push(StratumDoc {
                id: s.id.clone(),
                dim: s.dim,
                chi_c: s.chi_c,
                class,
                below: poset.below(t).map(|b| poset.stratum(b).id.clone()).collect(),
                flat,
            });
            let row: BTreeMap<String, i64> = (0..poset.len())
                .filter(|&b| table.entry(t, b) != 0)
                .map(|b| (poset.stratum(b).id.clone(), table.entry(t, b)))
                .collect();
            euler.insert(s.id.clone(), row);
            if let Some(m) = s.mather.as_ref().and_then(AmbientClass::as_projective) {
                mather.insert(s.id.clone(), m.coeffs().to_vec());
            }
        }
        Ok(PosetDocument {
            ambient_n: n,
            strata,
            euler_table: Some(euler),
            mather: if mather.is_empty() { None } else { Some(mather) },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUSP_LIKE: &str = r#"{
        "ambient_n": 2,
        "strata": [
            {"id": "p", "dim": 0, "chi_c": 1, "class": [1, 0, 0]},
            {"id": "C", "dim": 1, "chi_c": 1, "class": [0, 3, 0], "below": ["p"]},
            {"id": "U", "dim": 2, "chi_c": 1, "class": [0, 0, 1], "below": ["p", "C"]}
        ],
        "euler_table": {"p": {"p": 1}, "C": {"C": 1, "p": 2}, "U": {"U": 1, "C": 1, "p": 1}},
        "mather": {"p": [1, 0, 0], "C": [4, 3, 0], "U": [3, 3, 1]}
    }"#;

    #[test]
    fn parses_singular_closure_data() {
        let doc = PosetDocument::from_json(CUSP_LIKE).unwrap();
        let (poset, table) = doc.build().unwrap();
        assert_eq!(poset.len(), 3);
        assert_eq!(table.entry(1, 0), 2);
        let again = PosetDocument::from_poset(&poset, &table).unwrap();
        let (poset2, table2) = again.build().unwrap();
        assert_eq!(*poset2, *poset);
        assert_eq!(table2, table);
    }

    #[test]
    fn rejects_wrong_mather_leading_term() {
        let bad = CUSP_LIKE.replace("\"C\": [4, 3, 0]", "\"C\": [4, 2, 0]");
        let doc = PosetDocument::from_json(&bad).unwrap();
        assert!(matches!(doc.build(), Err(Error::InvalidPoset(_))));
    }

    #[test]
    fn rejects_unknown_ids() {
        let bad = CUSP_LIKE.replace("\"below\": [\"p\"]", "\"below\": [\"q\"]");
        assert!(PosetDocument::from_json(&bad).unwrap().build().is_err());
    }
}
