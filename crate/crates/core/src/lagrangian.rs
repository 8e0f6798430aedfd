//! Conic Lagrangian cycles in `T*P^n` and the characteristic cycle map.
//!
//! A cycle is an integer combination of conormal spaces `[T*_Z P^n]` of
//! stratum closures. Segre classes are computed in the projective completion
//! `P(T*P^n ⊕ 1)`, whose Chow ring is modelled by [`BundleRingClass`].

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chow::{binomial, chern_cotangent, BundleRingClass, GradedClass};
use crate::error::{Error, Result};
use crate::strata::{
    compose_euler, decompose_euler, Ambient, ConstructibleFunction, EulerTable, MorseTable, StratPoset, StratumGeometry,
};

fn sign(d: usize) -> i64 {
    if d.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Class of `P(T*_F P^n ⊕ 1)` for a flat `F ≅ P^k`.
///
/// The completion is the zero locus of `O(-1) → T*F ⊗ …`, i.e. of a section
/// of `π*T*F ⊗ O(1)` over `P(T*P^n|_F ⊕ 1)`, so its class is
/// `[F] · c_k(T*F ⊗ O(1)) = h^{n-k} Σ_i c_i(T*P^k) ζ^{k-i}`.
pub fn flat_completion_class(n: usize, k: usize) -> BundleRingClass {
    assert!(k <= n);
    let mut poly = vec![vec![0i64; n + 1]; n + 1];
    for i in 0..=k {
        poly[n - k + i][k - i] = sign(i) * binomial(k as i64 + 1, i as i64);
    }
    BundleRingClass::from_polynomial(&chern_cotangent(n), n, &poly).expect("cotangent completion")
}

/// `[T*_Z P^n]` for the closure of one stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConormalSymbol {
    pub stratum: usize,
    pub stratum_id: String,
    pub dim_z: usize,
    pub completion: BundleRingClass,
}

impl ConormalSymbol {
    /// Symbol of a stratum with flat closure.
    pub fn of_stratum(poset: &StratPoset, z: usize) -> Result<Self> {
        let s = poset.stratum(z);
        let Ambient::Projective(n) = poset.ambient() else {
            return Err(Error::Unsupported("conormal completions over product spaces".into()));
        };
        match &s.geometry {
            Some(StratumGeometry::Flat(f)) => Ok(ConormalSymbol {
                stratum: z,
                stratum_id: s.id.clone(),
                dim_z: s.dim,
                completion: flat_completion_class(n, f.dim()),
            }),
            _ => Err(Error::MissingCompletion(s.id.clone())),
        }
    }

    /// Symbol with a caller-supplied completion class (for singular closures).
    pub fn with_completion(poset: &StratPoset, z: usize, completion: BundleRingClass) -> Result<Self> {
        let s = poset.stratum(z);
        let Ambient::Projective(n) = poset.ambient() else {
            return Err(Error::Unsupported("conormal completions over product spaces".into()));
        };
        if completion.base_dim() != n || completion.rank() != n || *completion.bundle() != chern_cotangent(n) {
            return Err(Error::MissingCompletion(format!("{}: completion is not over P(T*P^{n} + 1)", s.id)));
        }
        // An n-dimensional cycle in the 2n-dimensional completion has codimension n.
        for (a, row) in completion.coeffs().iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                if c != 0 && a + b != n {
                    return Err(Error::MissingCompletion(format!(
                        "{}: completion class has a term h^{a} zeta^{b} of codimension {}",
                        s.id,
                        a + b
                    )));
                }
            }
        }
        // Its image in the base is the closure itself.
        let pushed = segre_of(&completion);
        let class = s.class.as_projective().expect("projective ambient");
        if pushed.coeff(s.dim) != class.coeff(s.dim) || (s.dim + 1..=n).any(|i| pushed.coeff(i) != 0) {
            return Err(Error::MissingCompletion(format!("{}: completion does not lie over the closure", s.id)));
        }
        Ok(ConormalSymbol { stratum: z, stratum_id: s.id.clone(), dim_z: s.dim, completion })
    }
}

/// Caller-supplied completion classes, keyed by stratum id.
pub type CompletionData = HashMap<String, BundleRingClass>;

fn symbol(poset: &StratPoset, z: usize, supplied: &CompletionData) -> Result<ConormalSymbol> {
    match supplied.get(&poset.stratum(z).id) {
        Some(c) => ConormalSymbol::with_completion(poset, z, c.clone()),
        None => ConormalSymbol::of_stratum(poset, z),
    }
}

fn segre_of(completion: &BundleRingClass) -> GradedClass {
    let bound = completion.base_dim() + completion.rank();
    let mut total = GradedClass::zero(completion.base_dim());
    let mut term = completion.clone();
    for _ in 0..=bound {
        if term.is_zero() {
            break;
        }
        total += &term.pushforward();
        term = term.times_zeta();
    }
    total
}

/// `s_*(C) = Σ_{i≥0} π_*(ζ^i ∩ [P(C ⊕ 1)])`.
pub fn segre(symbol: &ConormalSymbol) -> GradedClass {
    segre_of(&symbol.completion)
}

/// `č^{Ma}_*(Z) = c(T*P^n) ∩ s_*(T*_Z P^n)`.
pub fn dual_mather(symbol: &ConormalSymbol) -> GradedClass {
    let n = symbol.completion.base_dim();
    chern_cotangent(n).cap(&segre(symbol)).expect("same base")
}

/// Integer combination of conormal spaces of stratum closures.
#[derive(Clone, Debug)]
pub struct LagrangianCycle {
    poset: Arc<StratPoset>,
    coeffs: Vec<i64>,
}

impl PartialEq for LagrangianCycle {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.poset, &other.poset) || *self.poset == *other.poset) && self.coeffs == other.coeffs
    }
}

impl Eq for LagrangianCycle {}

/// JSON term `{stratum_id, coefficient}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleTerm {
    pub stratum_id: String,
    pub coefficient: i64,
}

impl LagrangianCycle {
    pub fn new(poset: Arc<StratPoset>, coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() != poset.len() {
            return Err(Error::Dimension(format!("{} coefficients for {} strata", coeffs.len(), poset.len())));
        }
        Ok(LagrangianCycle { poset, coeffs })
    }

    pub fn zero(poset: &Arc<StratPoset>) -> Self {
        LagrangianCycle { poset: poset.clone(), coeffs: vec![0; poset.len()] }
    }

    /// `[T*_Z]` for a single stratum closure.
    pub fn conormal(poset: &Arc<StratPoset>, z: usize) -> Self {
        let mut c = Self::zero(poset);
        c.coeffs[z] = 1;
        c
    }

    pub fn poset(&self) -> &Arc<StratPoset> {
        &self.poset
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, z: usize) -> i64 {
        self.coeffs[z]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i64) -> Self {
        LagrangianCycle { poset: self.poset.clone(), coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !(Arc::ptr_eq(&self.poset, &other.poset) || *self.poset == *other.poset) {
            return Err(Error::PosetMismatch);
        }
        Ok(LagrangianCycle {
            poset: self.poset.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    /// Strata with nonzero coefficient.
    pub fn components(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&z| self.coeffs[z] != 0).collect()
    }

    pub fn terms(&self) -> Vec<CycleTerm> {
        self.components()
            .into_iter()
            .map(|z| CycleTerm { stratum_id: self.poset.stratum(z).id.clone(), coefficient: self.coeffs[z] })
            .collect()
    }

    pub fn from_terms(poset: &Arc<StratPoset>, terms: &[CycleTerm]) -> Result<Self> {
        let mut c = Self::zero(poset);
        for t in terms {
            let z = poset
                .index_of(&t.stratum_id)
                .ok_or_else(|| Error::InvalidPoset(format!("unknown stratum {}", t.stratum_id)))?;
            c.coeffs[z] += t.coefficient;
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.terms()).expect("cycle terms serialize")
    }

    pub fn from_json(poset: &Arc<StratPoset>, text: &str) -> Result<Self> {
        let terms: Vec<CycleTerm> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_terms(poset, &terms)
    }

    /// Segre class of the cycle, using flat geometry or supplied completions.
    pub fn segre(&self, supplied: &CompletionData) -> Result<GradedClass> {
        let Ambient::Projective(n) = self.poset.ambient() else {
            return Err(Error::Unsupported("Segre classes over product spaces".into()));
        };
        let mut total = GradedClass::zero(n);
        for z in self.components() {
            total += &segre(&symbol(&self.poset, z, supplied)?).scale(self.coeffs[z]);
        }
        Ok(total)
    }

    pub(crate) fn symbols(&self, supplied: &CompletionData) -> Result<Vec<(i64, ConormalSymbol)>> {
        self.components().into_iter().map(|z| Ok((self.coeffs[z], symbol(&self.poset, z, supplied)?))).collect()
    }
}

/// `CC(α) = Σ_Z c_Z (-1)^{dim Z} [T*_Z]` where `α = Σ_Z c_Z Eu_Z`.
pub fn cc(alpha: &ConstructibleFunction, table: &EulerTable) -> Result<LagrangianCycle> {
    let poset = alpha.poset();
    let c = decompose_euler(alpha, table)?;
    let coeffs = c.iter().enumerate().map(|(z, v)| v * sign(poset.stratum(z).dim)).collect();
    LagrangianCycle::new(poset.clone(), coeffs)
}

/// Inverse of [`cc`]: `[T*_Z] ↦ (-1)^{dim Z} Eu_Z`.
pub fn cc_inverse(cycle: &LagrangianCycle, table: &EulerTable) -> Result<ConstructibleFunction> {
    let poset = cycle.poset();
    let c: Vec<i64> = cycle.coeffs.iter().enumerate().map(|(z, v)| v * sign(poset.stratum(z).dim)).collect();
    compose_euler(poset, &c, table)
}

/// `CC(α) = Σ_S (-1)^{dim S} χ((NMD(S), α)) [T*_{closure S}]`.
pub fn cc_from_morse(alpha: &ConstructibleFunction, morse: &MorseTable) -> Result<LagrangianCycle> {
    let poset = alpha.poset();
    let weights = morse.weights(alpha)?;
    let coeffs = weights.iter().enumerate().map(|(s, w)| w * sign(poset.stratum(s).dim)).collect();
    LagrangianCycle::new(poset.clone(), coeffs)
}

/// Dual MacPherson class `č_*(α) = Σ_Z d_Z č^{Ma}_*(Z)` with `α = Σ d_Z Ěu_Z`.
pub fn dual_csm(alpha: &ConstructibleFunction, table: &EulerTable, supplied: &CompletionData) -> Result<GradedClass> {
    // Ěu^{-1}(α) has the same coefficients as CC(α).
    let cycle = cc(alpha, table)?;
    let Ambient::Projective(n) = alpha.poset().ambient() else {
        return Err(Error::Unsupported("dual Chern classes over product spaces".into()));
    };
    let mut total = GradedClass::zero(n);
    for (c, sym) in cycle.symbols(supplied)? {
        total += &dual_mather(&sym).scale(c);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::{chern_tangent, CohClass};
    use crate::linalg::{q, Flat};
    use crate::strata::{csm_projective, LinearStratification};

    fn line_in_plane() -> LinearStratification {
        let l = Flat::from_rows(2, vec![vec![q(1), q(0), q(0)]]).unwrap();
        LinearStratification::from_generators(2, vec![l]).unwrap()
    }

    #[test]
    fn segre_examples() {
        for n in 0..5 {
            // Zero section and a point.
            let zero = ConormalSymbol {
                stratum: 0,
                stratum_id: "M".into(),
                dim_z: n,
                completion: flat_completion_class(n, n),
            };
            assert_eq!(segre(&zero), GradedClass::fundamental(n));
            let pt = ConormalSymbol {
                stratum: 0,
                stratum_id: "p".into(),
                dim_z: 0,
                completion: flat_completion_class(n, 0),
            };
            assert_eq!(segre(&pt), GradedClass::linear(n, 0));
        }
        let line =
            ConormalSymbol { stratum: 0, stratum_id: "L".into(), dim_z: 1, completion: flat_completion_class(2, 1) };
        assert_eq!(segre(&line).coeffs(), &[1, 1, 0]);
    }

    #[test]
    fn dual_mather_examples() {
        let m1 =
            ConormalSymbol { stratum: 0, stratum_id: "M".into(), dim_z: 1, completion: flat_completion_class(1, 1) };
        assert_eq!(dual_mather(&m1).coeffs(), &[-2, 1]);
        let pt =
            ConormalSymbol { stratum: 0, stratum_id: "p".into(), dim_z: 0, completion: flat_completion_class(3, 0) };
        assert_eq!(dual_mather(&pt), GradedClass::linear(3, 0));
        let line =
            ConormalSymbol { stratum: 0, stratum_id: "L".into(), dim_z: 1, completion: flat_completion_class(2, 1) };
        assert_eq!(dual_mather(&line).coeffs(), &[-2, 1, 0]);
    }

    #[test]
    fn cc_of_smooth_ambient_is_signed_zero_section() {
        for n in 0..4 {
            let s = LinearStratification::from_generators(n, vec![]).unwrap();
            let one = ConstructibleFunction::constant(&s.poset_arc(), 1);
            let l = cc(&one, s.euler()).unwrap();
            assert_eq!(l.coeffs(), &[sign(n)]);
            assert_eq!(cc_inverse(&l, s.euler()).unwrap(), one);
        }
    }

    #[test]
    fn cc_of_line_has_no_point_component() {
        let s = line_in_plane();
        let l = s.flats()[1].clone();
        let alpha = s.indicator(&l).unwrap();
        let cycle = cc(&alpha, s.euler()).unwrap();
        assert_eq!(cycle.coeffs(), &[0, -1]);
        assert!(cc(&ConstructibleFunction::zero(&s.poset_arc()), s.euler()).unwrap().is_zero());
    }

    #[test]
    fn cc_inverse_of_conormal_is_dual_euler_obstruction() {
        let s = line_in_plane();
        let p = s.poset_arc();
        let f = cc_inverse(&LagrangianCycle::conormal(&p, 1), s.euler()).unwrap();
        assert_eq!(f, s.euler().column(&p, 1).scale(-1));
    }

    #[test]
    fn morse_formula_single_stratum() {
        let s = LinearStratification::from_generators(3, vec![]).unwrap();
        let one = ConstructibleFunction::constant(&s.poset_arc(), 1);
        let l = cc_from_morse(&one, &MorseTable::PerStratum(vec![1])).unwrap();
        assert_eq!(l, cc(&one, s.euler()).unwrap());
        assert!(cc_from_morse(&one, &MorseTable::PerStratum(vec![])).is_err());
    }

    #[test]
    fn dual_csm_follows_sign_law() {
        let s = line_in_plane();
        let alpha = s.indicator(&s.flats()[1]).unwrap();
        let dual = dual_csm(&alpha, s.euler(), &CompletionData::new()).unwrap();
        assert_eq!(dual.coeffs(), &[2, -1, 0]);
        let direct = csm_projective(&alpha, s.euler()).unwrap();
        assert_eq!(dual, direct.sign_dual());
        let p1 = LinearStratification::from_generators(1, vec![]).unwrap();
        let one = ConstructibleFunction::constant(&p1.poset_arc(), 1);
        assert_eq!(dual_csm(&one, p1.euler(), &CompletionData::new()).unwrap().coeffs(), &[2, -1]);
    }

    #[test]
    fn smooth_example_identity_for_flats() {
        for n in 0..5 {
            for k in 0..=n {
                let sym = ConormalSymbol {
                    stratum: 0,
                    stratum_id: "F".into(),
                    dim_z: k,
                    completion: flat_completion_class(n, k),
                };
                let expected =
                    chern_tangent(k).dual().cap(&GradedClass::fundamental(k)).unwrap().push_to_linear(n).unwrap();
                assert_eq!(dual_mather(&sym), expected, "n={n} k={k}");
            }
        }
        let _ = CohClass::one(0);
    }

    #[test]
    fn supplied_completion_is_validated() {
        let s = line_in_plane();
        let p = s.poset();
        let good = flat_completion_class(2, 1);
        assert!(ConormalSymbol::with_completion(p, 1, good.clone()).is_ok());
        // Class of the zero section does not lie over a line.
        assert!(ConormalSymbol::with_completion(p, 1, flat_completion_class(2, 2)).is_err());
        let bad = good.add(&good.monomial(0, 0));
        assert!(ConormalSymbol::with_completion(p, 1, bad).is_err());
    }

    #[test]
    fn cycle_json_round_trip() {
        let s = line_in_plane();
        let p = s.poset_arc();
        let l = LagrangianCycle::new(p.clone(), vec![3, -1]).unwrap();
        assert_eq!(LagrangianCycle::from_json(&p, &l.to_json()).unwrap(), l);
    }
}
