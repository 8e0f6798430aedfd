//! Evaluation of loaded cases into report entries.

use csm_core::chow::AmbientClass;
use csm_core::microlocal::{
    is_noncharacteristic_diagonal, is_noncharacteristic_map, is_splayed_pair, support, verify_index_formula,
    verify_intersection_formula, verify_vrr, FormCheck, Verdict,
};
use csm_core::strata::{csm, ConstructibleFunction, LinearStratification};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::casefile::{CaseKind, Expectations, LoadedCase, Model, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    Refused,
    Error,
}

impl Outcome {
    pub fn is_hard_failure(self) -> bool {
        self != Outcome::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splayed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noncharacteristic: Option<bool>,
}

/// One line of the JSON-lines report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case_id: String,
    pub kind: CaseKind,
    pub tag: String,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<HypothesisDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs: Option<AmbientClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<AmbientClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<AmbientClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_integral: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signed_pairing: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equal: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corollary: Option<FormCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mismatches: Vec<String>,
    pub detail: String,
}

impl CaseReport {
    fn new(case: &LoadedCase) -> Self {
        CaseReport {
            case_id: case.spec.id.clone(),
            kind: case.spec.kind,
            tag: case.spec.kind.tag().to_string(),
            outcome: Outcome::Pass,
            hypothesis: None,
            lhs: None,
            rhs: None,
            class: None,
            euler_integral: None,
            signed_pairing: None,
            equal: None,
            holds: None,
            corollary: None,
            witness: None,
            mismatches: Vec::new(),
            detail: String::new(),
        }
    }

    fn set_witness(&mut self, verdict: &Verdict) {
        self.witness = verdict.witness.as_ref().map(|w| serde_json::to_value(w).expect("witnesses serialize"));
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

struct Loaded {
    strat: LinearStratification,
    function: ConstructibleFunction,
}

fn load_side(model: &Model, side: &Side) -> csm_core::Result<Loaded> {
    let strat = model.stratification().map_err(into_core)?;
    let function = model.function(&strat, side.function.as_deref()).map_err(into_core)?;
    Ok(Loaded { strat, function })
}

fn into_core(e: crate::CliError) -> csm_core::Error {
    match e {
        crate::CliError::Core(e) => e,
        other => csm_core::Error::Parse(other.to_string()),
    }
}

fn coeffs_value(class: &AmbientClass) -> Value {
    let v = serde_json::to_value(class).expect("classes serialize");
    v.get("coeffs").cloned().unwrap_or(v)
}

fn compare(report: &mut CaseReport, expect: &Expectations) {
    let mut check = |key: &str, expected: Option<Value>, actual: Option<Value>| {
        if let Some(expected) = expected {
            if actual.as_ref() != Some(&expected) {
                let actual = actual.map_or("nothing".to_string(), |a| a.to_string());
                report.mismatches.push(format!("{key}: expected {expected}, got {actual}"));
            }
        }
    };
    check("equal", expect.equal.map(Value::from), report.equal.map(Value::from));
    check("holds", expect.holds.map(Value::from), report.holds.map(Value::from));
    check("lhs", expect.lhs.clone(), report.lhs.as_ref().map(coeffs_value));
    check("rhs", expect.rhs.clone(), report.rhs.as_ref().map(coeffs_value));
    check("class", expect.class.clone(), report.class.as_ref().map(coeffs_value));
    check("euler_integral", expect.euler_integral.map(Value::from), report.euler_integral.map(Value::from));
}

/// Fills in observations; the default outcome applies when no expectation is given.
fn observe(case: &LoadedCase, report: &mut CaseReport) -> csm_core::Result<Outcome> {
    let first = load_side(&case.first, &case.spec.first)?;
    let second = match (&case.second, &case.spec.second) {
        (Some(m), Some(side)) => Some(load_side(m, side)?),
        _ => None,
    };
    let pair = || second.as_ref().expect("validated at load time");
    match case.spec.kind {
        CaseKind::IntersectionFormula => {
            let b = pair();
            let r = verify_intersection_formula(&first.strat, &first.function, &b.strat, &b.function)?;
            report.hypothesis = Some(HypothesisDoc {
                splayed: Some(r.hypothesis.splayed),
                noncharacteristic: Some(r.hypothesis.noncharacteristic),
            });
            report.detail = r.status();
            report.witness = r.witness.as_ref().map(|w| serde_json::to_value(w).expect("witnesses serialize"));
            report.lhs = Some(AmbientClass::Projective(r.lhs));
            report.rhs = Some(AmbientClass::Projective(r.rhs));
            report.equal = Some(r.equal);
            Ok(match (r.certified, r.equal) {
                (true, true) => Outcome::Pass,
                (true, false) => Outcome::Fail,
                (false, _) => Outcome::Refused,
            })
        }
        CaseKind::IndexFormula => {
            let b = pair();
            let splayed = is_splayed_pair(&first.strat, &first.function, &b.strat, &b.function)?;
            let sa = support(&first.function, first.strat.euler())?;
            let sb = support(&b.function, b.strat.euler())?;
            let nc = is_noncharacteristic_diagonal(&sa, &sb)?;
            report.hypothesis = Some(HypothesisDoc { splayed: Some(splayed.holds), noncharacteristic: Some(nc.holds) });
            let r = verify_index_formula(&first.strat, &first.function, &b.strat, &b.function)?;
            report.euler_integral = Some(r.euler_integral);
            report.signed_pairing = Some(r.signed_pairing);
            report.equal = Some(r.equal);
            report.detail = if r.equal { "identity holds" } else { "identity fails" }.into();
            Ok(if r.equal { Outcome::Pass } else { Outcome::Fail })
        }
        CaseKind::SplayedCheck => {
            let b = pair();
            let v = is_splayed_pair(&first.strat, &first.function, &b.strat, &b.function)?;
            report.hypothesis = Some(HypothesisDoc { splayed: Some(v.holds), noncharacteristic: None });
            report.holds = Some(v.holds);
            report.set_witness(&v);
            report.detail = if v.holds { "splayed" } else { "not splayed" }.into();
            Ok(Outcome::Pass)
        }
        CaseKind::NoncharacteristicCheck => {
            let b = pair();
            let sa = support(&first.function, first.strat.euler())?;
            let sb = support(&b.function, b.strat.euler())?;
            let v = is_noncharacteristic_diagonal(&sa, &sb)?;
            report.hypothesis = Some(HypothesisDoc { splayed: None, noncharacteristic: Some(v.holds) });
            report.holds = Some(v.holds);
            report.set_witness(&v);
            report.detail = if v.holds { "non-characteristic" } else { "characteristic" }.into();
            Ok(Outcome::Pass)
        }
        CaseKind::Vrr => {
            let f = case.map.as_ref().expect("validated at load time");
            let v = is_noncharacteristic_map(f, &support(&first.function, first.strat.euler())?)?;
            report.hypothesis = Some(HypothesisDoc { splayed: None, noncharacteristic: Some(v.holds) });
            let r = verify_vrr(f, &first.function, first.strat.euler())?;
            let holds = r.equal && r.corollary.as_ref().is_none_or(|c| c.equal);
            report.lhs = Some(r.lhs);
            report.rhs = Some(r.rhs);
            report.equal = Some(r.equal);
            report.corollary = r.corollary;
            report.detail = if holds { "identity holds" } else { "identity fails" }.into();
            Ok(if holds { Outcome::Pass } else { Outcome::Fail })
        }
        CaseKind::CsmCompute => {
            report.class = Some(csm(&first.function, first.strat.euler())?);
            report.detail = "computed".into();
            Ok(Outcome::Pass)
        }
    }
}

pub fn evaluate(case: &LoadedCase) -> CaseReport {
    let mut report = CaseReport::new(case);
    let default = match observe(case, &mut report) {
        Ok(outcome) => outcome,
        Err(csm_core::Error::Characteristic(witness)) => {
            report.witness = serde_json::from_str(&witness).ok();
            report.detail = "refused: non-characteristic hypothesis fails".into();
            return CaseReport { outcome: Outcome::Refused, ..report };
        }
        Err(e) => {
            report.detail = e.to_string();
            return CaseReport { outcome: Outcome::Error, ..report };
        }
    };
    report.outcome = match case.spec.expect.as_ref().filter(|e| !e.is_empty()) {
        Some(expect) => {
            compare(&mut report, expect);
            if report.mismatches.is_empty() {
                Outcome::Pass
            } else {
                Outcome::Fail
            }
        }
        None => default,
    };
    report
}
