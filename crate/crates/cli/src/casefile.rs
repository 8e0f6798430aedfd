//! Case file schema and load-time validation.
//!
//! A case file is `{"cases": [case, ...]}`. Each case names its kind, the
//! models and functions it needs and optional expectations:
//!
//! ```json
//! {"id": "lines", "kind": "intersection-formula",
//!  "first": {"model": {"n": 2, "hyperplanes": [["1", "0", "0"]]}},
//!  "second": {"model": {"n": 2, "hyperplanes": [["0", "1", "0"]]},
//!             "function": [{"meet": [0], "coeff": 1}]},
//!  "expect": {"equal": true}}
//! ```
//!
//! A model is either an arrangement (`hyperplanes`, one linear form each) or
//! a family of flats (`flats`, each a list of linear forms cutting it out).
//! A function is a list of terms `coeff · 1_F` where `F` is the meet of the
//! listed generators; an empty `meet` is all of `P^n`. Without `function`
//! the indicator of the union of the generators is used.

use std::fmt;

use csm_core::arrangements::{strat_poset_from_arrangement, Arrangement};
use csm_core::linalg::{parse_rational, Flat, Q};
use csm_core::microlocal::LinearMap;
use csm_core::strata::{Ambient, ConstructibleFunction, LinearStratification};
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    IntersectionFormula,
    Vrr,
    IndexFormula,
    SplayedCheck,
    NoncharacteristicCheck,
    CsmCompute,
}

impl CaseKind {
    /// Identifier of the identity a case checks, echoed in every report.
    pub fn tag(self) -> &'static str {
        match self {
            CaseKind::IntersectionFormula | CaseKind::SplayedCheck => "thm-1.2-ambient",
            CaseKind::Vrr => "thm-1.4",
            CaseKind::IndexFormula | CaseKind::NoncharacteristicCheck => "cor-1.5",
            CaseKind::CsmCompute => "csm",
        }
    }

    fn needs_second(self) -> bool {
        !matches!(self, CaseKind::Vrr | CaseKind::CsmCompute)
    }

    fn allowed_expectations(self) -> &'static [&'static str] {
        match self {
            CaseKind::IntersectionFormula | CaseKind::Vrr => &["equal", "lhs", "rhs"],
            CaseKind::IndexFormula => &["equal", "euler_integral"],
            CaseKind::SplayedCheck | CaseKind::NoncharacteristicCheck => &["holds"],
            CaseKind::CsmCompute => &["class"],
        }
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("kind serializes");
        write!(f, "{}", s.as_str().expect("kind is a string"))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CaseFile {
    pub cases: Vec<CaseSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub id: String,
    pub kind: CaseKind,
    pub first: Side,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<Side>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectations>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Side {
    pub model: ModelDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<Vec<Term>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperplanes: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flats: Option<Vec<Vec<Vec<String>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub meet: Vec<usize>,
    pub coeff: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapDoc {
    Projection { fiber: usize, base: usize },
    Embedding(Vec<Vec<String>>),
    Composite(Vec<MapDoc>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equal: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_integral: Option<i64>,
}

impl Expectations {
    fn present(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        if self.equal.is_some() {
            keys.push("equal");
        }
        if self.holds.is_some() {
            keys.push("holds");
        }
        if self.lhs.is_some() {
            keys.push("lhs");
        }
        if self.rhs.is_some() {
            keys.push("rhs");
        }
        if self.class.is_some() {
            keys.push("class");
        }
        if self.euler_integral.is_some() {
            keys.push("euler_integral");
        }
        keys
    }

    pub fn is_empty(&self) -> bool {
        self.present().is_empty()
    }
}

/// A model with its generators parsed.
#[derive(Clone, Debug)]
pub struct Model {
    n: usize,
    generators: Vec<Flat>,
    arrangement: Option<Arrangement>,
}

impl Model {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stratification(&self) -> Result<LinearStratification> {
        Ok(match &self.arrangement {
            Some(a) => strat_poset_from_arrangement(a),
            None => LinearStratification::from_generators(self.n, self.generators.clone())?,
        })
    }

    fn meet(&self, indices: &[usize]) -> Result<Flat> {
        let mut flat = Flat::ambient(self.n);
        for &i in indices {
            let g = self.generators.get(i).ok_or_else(|| CliError::Case(format!("generator {i} out of range")))?;
            flat = flat.meet(g).ok_or_else(|| CliError::Case(format!("meet {indices:?} is empty")))?;
        }
        Ok(flat)
    }

    /// The function of `terms` on `strat`, or the union indicator.
    pub fn function(&self, strat: &LinearStratification, terms: Option<&[Term]>) -> Result<ConstructibleFunction> {
        match terms {
            Some(terms) => {
                let flats = terms.iter().map(|t| Ok((self.meet(&t.meet)?, t.coeff))).collect::<Result<Vec<_>>>()?;
                Ok(strat.combination(&flats)?)
            }
            None => {
                let values =
                    strat.flats().iter().map(|f| self.generators.iter().any(|g| g.contains(f)) as i64).collect();
                Ok(ConstructibleFunction::new(strat.poset_arc(), values)?)
            }
        }
    }
}

fn parse_rows(rows: &[Vec<String>]) -> Result<Vec<Vec<Q>>> {
    rows.iter()
        .map(|r| r.iter().map(|s| parse_rational(s)).collect::<csm_core::Result<Vec<_>>>())
        .collect::<csm_core::Result<Vec<_>>>()
        .map_err(CliError::from)
}

impl ModelDoc {
    pub fn load(&self) -> Result<Model> {
        match (&self.hyperplanes, &self.flats) {
            (Some(h), None) => {
                let a = Arrangement::new(self.n, parse_rows(h)?)?;
                let generators = (0..a.len()).filter_map(|i| a.hyperplane_flat(i)).collect();
                Ok(Model { n: self.n, generators, arrangement: Some(a) })
            }
            (None, Some(fs)) => {
                let generators = fs
                    .iter()
                    .map(|rows| Ok(Flat::from_rows(self.n, parse_rows(rows)?)?))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Model { n: self.n, generators, arrangement: None })
            }
            _ => Err(CliError::Case("a model has exactly one of \"hyperplanes\" and \"flats\"".into())),
        }
    }
}

impl MapDoc {
    pub fn load(&self) -> Result<LinearMap> {
        Ok(match self {
            MapDoc::Projection { fiber, base } => LinearMap::projection(*fiber, *base),
            MapDoc::Embedding(rows) => LinearMap::embedding(parse_rows(rows)?)?,
            MapDoc::Composite(maps) => LinearMap::composite(maps.iter().map(MapDoc::load).collect::<Result<_>>()?)?,
        })
    }
}

/// A case with every input parsed and checked.
#[derive(Clone, Debug)]
pub struct LoadedCase {
    pub spec: CaseSpec,
    pub first: Model,
    pub second: Option<Model>,
    pub map: Option<LinearMap>,
}

impl CaseSpec {
    pub fn load(&self) -> Result<LoadedCase> {
        let err = |msg: String| CliError::Case(format!("case {:?}: {msg}", self.id));
        let first = self.first.model.load().map_err(|e| err(e.to_string()))?;
        let check_terms = |side: &Side, model: &Model| -> Result<()> {
            for t in side.function.iter().flatten() {
                model.meet(&t.meet).map_err(|e| err(e.to_string()))?;
            }
            Ok(())
        };
        check_terms(&self.first, &first)?;
        let second = match (&self.second, self.kind.needs_second()) {
            (Some(side), true) => {
                let m = side.model.load().map_err(|e| err(e.to_string()))?;
                if m.n != first.n {
                    return Err(err(format!("models live in P^{} and P^{}", first.n, m.n)));
                }
                check_terms(side, &m)?;
                Some(m)
            }
            (None, true) => return Err(err(format!("kind {} needs \"second\"", self.kind))),
            (Some(_), false) => return Err(err(format!("kind {} takes no \"second\"", self.kind))),
            (None, false) => None,
        };
        let map = match (&self.map, self.kind == CaseKind::Vrr) {
            (Some(doc), true) => {
                let f = doc.load().map_err(|e| err(e.to_string()))?;
                if f.target() != Ambient::Projective(first.n) {
                    return Err(err(format!("map lands in {:?}, the model lives in P^{}", f.target(), first.n)));
                }
                Some(f)
            }
            (None, true) => return Err(err("kind vrr needs \"map\"".into())),
            (Some(_), false) => return Err(err(format!("kind {} takes no \"map\"", self.kind))),
            (None, false) => None,
        };
        if let Some(e) = &self.expect {
            let allowed = self.kind.allowed_expectations();
            if let Some(bad) = e.present().into_iter().find(|k| !allowed.contains(k)) {
                return Err(err(format!("expectation {bad:?} does not apply to kind {}", self.kind)));
            }
        }
        Ok(LoadedCase { spec: self.clone(), first, second, map })
    }
}

impl CaseFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("case files serialize")
    }

    /// Parses every case; any failure here is a parse error.
    pub fn load(&self) -> Result<Vec<LoadedCase>> {
        self.cases.iter().map(CaseSpec::load).collect::<Result<Vec<_>>>().map_err(|e| CliError::Parse(e.to_string()))
    }
}
