use serde::{Deserialize, Serialize};

use crate::chow::{chern_tangent, cross, diagonal_gysin, AmbientClass, BiCohClass, CohClass, GradedClass};
use crate::error::{Error, Result};
use crate::lagrangian::{cc, CompletionData, LagrangianCycle};
use crate::strata::linear::inverse_chern_tangent;
use crate::strata::{csm, csm_projective, ConstructibleFunction, EulerTable, LinearStratification};

use super::{
    cycle_support, gysin, is_noncharacteristic_diagonal, is_noncharacteristic_map, is_splayed_pair, pullback_function,
    support, LinearMap, Witness,
};

/// `deg(L_A · L_B)` computed in the projective completion of `T*P^n`.
///
/// Refuses unless the supports meet only in the zero section, which keeps
/// the intersection away from the hyperplane at infinity.
pub fn index_pairing(la: &LagrangianCycle, lb: &LagrangianCycle, supplied: &CompletionData) -> Result<i64> {
    let verdict = is_noncharacteristic_diagonal(&cycle_support(la)?, &cycle_support(lb)?)?;
    if !verdict.holds {
        return Err(Error::Characteristic(verdict.witness_json()));
    }
    let sa = la.symbols(supplied)?;
    let sb = lb.symbols(supplied)?;
    let mut total = 0;
    for (a, x) in &sa {
        for (b, y) in &sb {
            total += a * b * x.completion.mul(&y.completion).degree();
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub splayed: bool,
    pub noncharacteristic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub hypothesis: Hypothesis,
    pub certified: bool,
    pub lhs: GradedClass,
    pub rhs: GradedClass,
    pub equal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl IntersectionReport {
    /// "identity holds" or "identity fails", qualified when uncertified.
    pub fn status(&self) -> String {
        let identity = if self.equal { "identity holds" } else { "identity fails" };
        if self.certified {
            identity.to_string()
        } else {
            format!("hypothesis not certified; {identity}")
        }
    }
}

/// `c_*(α)·c_*(β)` against `c(TP^n) ∩ c_*(α·β)` in `H_*(P^n)`.
pub fn verify_intersection_formula(
    a: &LinearStratification,
    alpha: &ConstructibleFunction,
    b: &LinearStratification,
    beta: &ConstructibleFunction,
) -> Result<IntersectionReport> {
    let n = a.n();
    let ca = csm_projective(alpha, a.euler())?;
    let cb = csm_projective(beta, b.euler())?;
    let lhs = diagonal_gysin(&cross(&ca, &cb))?;
    let r = a.common_refinement(b)?;
    let prod = a.transfer(alpha, &r.strat, &r.to_first)?.product(&b.transfer(beta, &r.strat, &r.to_second)?)?;
    let rhs = chern_tangent(n).cap(&csm_projective(&prod, r.strat.euler())?)?;

    let splay = is_splayed_pair(a, alpha, b, beta)?;
    let diag = is_noncharacteristic_diagonal(&support(alpha, a.euler())?, &support(beta, b.euler())?)?;
    let witness = if splay.holds {
        splay.witness
    } else if diag.holds {
        None
    } else {
        diag.witness.or(splay.witness)
    };
    Ok(IntersectionReport {
        hypothesis: Hypothesis { splayed: splay.holds, noncharacteristic: diag.holds },
        certified: splay.holds || diag.holds,
        equal: lhs == rhs,
        lhs,
        rhs,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    pub euler_integral: i64,
    pub pairing: i64,
    /// `(-1)^n · pairing`.
    pub signed_pairing: i64,
    pub equal: bool,
}

/// `χ(α·β)` against `(-1)^n deg(CC(α)·CC(β))`.
pub fn verify_index_formula(
    a: &LinearStratification,
    alpha: &ConstructibleFunction,
    b: &LinearStratification,
    beta: &ConstructibleFunction,
) -> Result<IndexReport> {
    let n = a.n();
    let pairing = index_pairing(&cc(alpha, a.euler())?, &cc(beta, b.euler())?, &CompletionData::new())?;
    let r = a.common_refinement(b)?;
    let prod = a.transfer(alpha, &r.strat, &r.to_first)?.product(&b.transfer(beta, &r.strat, &r.to_second)?)?;
    let euler_integral = prod.euler_integral();
    let signed_pairing = if n.is_multiple_of(2) { pairing } else { -pairing };
    Ok(IndexReport { euler_integral, pairing, signed_pairing, equal: euler_integral == signed_pairing })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormCheck {
    /// "submersion" or "embedding".
    pub form: String,
    pub lhs: AmbientClass,
    pub rhs: AmbientClass,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VrrReport {
    pub lhs: AmbientClass,
    pub rhs: AmbientClass,
    pub equal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corollary: Option<FormCheck>,
}

fn cap_ambient(u: &CohClass, v: Option<&CohClass>, x: &AmbientClass) -> Result<AmbientClass> {
    match (x, v) {
        (AmbientClass::Projective(g), None) => Ok(AmbientClass::Projective(u.cap(g)?)),
        (AmbientClass::Biprojective(g), Some(v)) => Ok(AmbientClass::Biprojective(BiCohClass::exterior(u, v).cap(g)?)),
        _ => Err(Error::Dimension("cohomology class and homology class live on different spaces".into())),
    }
}

fn inverse_tangent_cap(x: &AmbientClass) -> Result<AmbientClass> {
    match x {
        AmbientClass::Projective(g) => cap_ambient(&inverse_chern_tangent(g.n()), None, x),
        AmbientClass::Biprojective(g) => {
            let (a, b) = g.dims();
            cap_ambient(&inverse_chern_tangent(a), Some(&inverse_chern_tangent(b)), x)
        }
    }
}

/// `f^!(c(TN)^{-1} ∩ c_*γ)` against `c(TM)^{-1} ∩ c_*(f^*γ)`, plus the
/// submersion or embedding form when `f` is a single projection or a chain
/// of embeddings.
pub fn verify_vrr(f: &LinearMap, gamma: &ConstructibleFunction, table: &EulerTable) -> Result<VrrReport> {
    if gamma.poset().ambient() != f.target() {
        return Err(Error::Dimension(format!(
            "function on {:?} pulled back along a map into {:?}",
            gamma.poset().ambient(),
            f.target()
        )));
    }
    let verdict = is_noncharacteristic_map(f, &support(gamma, table)?)?;
    if !verdict.holds {
        return Err(Error::Characteristic(verdict.witness_json()));
    }
    let c_gamma = csm(gamma, table)?;
    let lhs = gysin(f, &inverse_tangent_cap(&c_gamma)?)?;
    let (pulled, pulled_table) = pullback_function(f, gamma, table)?;
    let c_pulled = csm(&pulled, &pulled_table)?;
    let rhs = inverse_tangent_cap(&c_pulled)?;

    let corollary = match (f, f.flatten_embeddings()) {
        (LinearMap::Projection { fiber, base }, _) => {
            let relative = chern_tangent(*fiber);
            let lhs = cap_ambient(&relative, Some(&CohClass::one(*base)), &gysin(f, &c_gamma)?)?;
            Some(FormCheck { form: "submersion".into(), equal: lhs == c_pulled, lhs, rhs: c_pulled.clone() })
        }
        (_, Some(matrix)) => {
            let (k, n) = (matrix.len() - 1, matrix[0].len() - 1);
            let normal = CohClass::binomial_power(k, 1, (n - k) as i64);
            let rhs = cap_ambient(&normal, None, &c_pulled)?;
            let lhs = gysin(f, &c_gamma)?;
            Some(FormCheck { form: "embedding".into(), equal: lhs == rhs, lhs, rhs })
        }
        _ => None,
    };
    Ok(VrrReport { equal: lhs == rhs, lhs, rhs, corollary })
}
