//! Conic supports, splayedness and non-characteristic tests for linear
//! models, pullback of Lagrangian cycles, and the verification harnesses.

mod maps;
mod verify;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lagrangian::{cc, LagrangianCycle};
use crate::linalg::{common_vector, format_rational, rank, Flat, Q};
use crate::strata::{Ambient, ConstructibleFunction, EulerTable, LinearStratification, StratumGeometry};

pub use maps::{gysin, is_noncharacteristic_map, pullback_cycle, pullback_function, LinearMap};
pub use verify::{
    index_pairing, verify_index_formula, verify_intersection_formula, verify_vrr, FormCheck, Hypothesis, IndexReport,
    IntersectionReport, VrrReport,
};

/// One conormal component `T*_F` of a conic support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportComponent {
    pub stratum_id: String,
    pub geometry: StratumGeometry,
}

impl SupportComponent {
    /// Linear forms cutting out the closure, in the coordinates of the
    /// ambient space (concatenated for products).
    pub fn flat_data(&self) -> Vec<Vec<Q>> {
        match &self.geometry {
            StratumGeometry::Flat(f) => f.rows().to_vec(),
            StratumGeometry::ProductFlat(f, g) => {
                let (w1, w2) = (f.ambient_dim() + 1, g.ambient_dim() + 1);
                let zeros = |w: usize| vec![Q::from_integer(0.into()); w];
                let mut rows: Vec<Vec<Q>> = f.rows().iter().map(|r| [r.clone(), zeros(w2)].concat()).collect();
                rows.extend(g.rows().iter().map(|r| [zeros(w1), r.clone()].concat()));
                rows
            }
        }
    }

    pub fn key(&self) -> String {
        match &self.geometry {
            StratumGeometry::Flat(f) => f.key(),
            StratumGeometry::ProductFlat(f, g) => format!("{}x{}", f.key(), g.key()),
        }
    }

    fn meets(&self, other: &SupportComponent) -> Result<bool> {
        match (&self.geometry, &other.geometry) {
            (StratumGeometry::Flat(f), StratumGeometry::Flat(g)) if f.ambient_dim() == g.ambient_dim() => {
                Ok(f.meet(g).is_some())
            }
            (StratumGeometry::ProductFlat(f1, g1), StratumGeometry::ProductFlat(f2, g2))
                if f1.ambient_dim() == f2.ambient_dim() && g1.ambient_dim() == g2.ambient_dim() =>
            {
                Ok(f1.meet(f2).is_some() && g1.meet(g2).is_some())
            }
            _ => Err(Error::Dimension("support components live on different spaces".into())),
        }
    }
}

/// Union of conormal spaces `T*_F`, one per stratum with nonzero CC coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConicSupport {
    pub ambient: Ambient,
    pub components: Vec<SupportComponent>,
}

impl ConicSupport {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn keys(&self) -> BTreeSet<String> {
        self.components.iter().map(SupportComponent::key).collect()
    }

    /// Zero section only.
    pub fn is_zero_section(&self) -> bool {
        self.components.len() == 1 && self.components[0].flat_data().is_empty()
    }

    fn flats(&self) -> Result<Vec<Flat>> {
        self.components
            .iter()
            .map(|c| match &c.geometry {
                StratumGeometry::Flat(f) => Ok(f.clone()),
                StratumGeometry::ProductFlat(..) => Err(Error::Unsupported("splayedness on product spaces".into())),
            })
            .collect()
    }
}

/// Supporting evidence attached to a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// The two supports only involve disjoint sets of homogeneous coordinates.
    CoordinateSplit { first: Vec<usize>, second: Vec<usize> },
    /// Ranks of the two normal spaces at every flat where both are nonzero.
    LocalSplits { points: Vec<LocalSplit> },
    /// A covector normal to both sides at the points of `flat`.
    SplayFailure { flat: String, covector: Vec<String> },
    /// Two components meeting with a common conormal direction.
    CommonCovector { first: String, second: String, covector: Vec<String> },
    /// A conormal direction of `component` killed by the differential of the map.
    MapCharacteristic { component: String, covector: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSplit {
    pub flat: String,
    pub first_rank: usize,
    pub second_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub(crate) fn yes(witness: Option<Witness>) -> Self {
        Verdict { holds: true, witness }
    }

    pub(crate) fn no(witness: Witness) -> Self {
        Verdict { holds: false, witness: Some(witness) }
    }

    pub(crate) fn witness_json(&self) -> String {
        self.witness.as_ref().map_or_else(String::new, |w| serde_json::to_string(w).expect("witness serializes"))
    }
}

pub(crate) fn covector_strings(v: &[Q]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

/// Components of `L` with their closures.
pub fn cycle_support(cycle: &LagrangianCycle) -> Result<ConicSupport> {
    let poset = cycle.poset();
    let components = cycle
        .components()
        .into_iter()
        .map(|z| {
            let s = poset.stratum(z);
            let geometry = s
                .geometry
                .clone()
                .ok_or_else(|| Error::NonLinear(format!("stratum {} has no declared geometry", s.id)))?;
            Ok(SupportComponent { stratum_id: s.id.clone(), geometry })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConicSupport { ambient: poset.ambient(), components })
}

/// `supp CC(α)`.
pub fn support(alpha: &ConstructibleFunction, table: &EulerTable) -> Result<ConicSupport> {
    cycle_support(&cc(alpha, table)?)
}

fn coordinate_set(flats: &[Flat]) -> BTreeSet<usize> {
    flats
        .iter()
        .flat_map(|f| {
            f.rows()
                .iter()
                .flat_map(|r| r.iter().enumerate().filter(|(_, x)| !num_traits::Zero::is_zero(*x)).map(|(j, _)| j))
        })
        .collect()
}

/// Whether `α` on `a` and `β` on `b` are splayed.
///
/// At a point `p` lying in the minimal flat `G` of the joint closure family,
/// the flats of each side through `p` are exactly those containing `G`; the
/// two sides split locally iff the spans of their normal covectors meet only
/// in zero.
pub fn is_splayed_pair(
    a: &LinearStratification,
    alpha: &ConstructibleFunction,
    b: &LinearStratification,
    beta: &ConstructibleFunction,
) -> Result<Verdict> {
    if a.n() != b.n() {
        return Err(Error::Dimension(format!("P^{} vs P^{}", a.n(), b.n())));
    }
    let sa = support(alpha, a.euler())?.flats()?;
    let sb = support(beta, b.euler())?.flats()?;
    let joint = LinearStratification::from_generators(a.n(), sa.iter().chain(&sb).cloned().collect())?;
    let mut points = Vec::new();
    for g in joint.flats() {
        let wa: Vec<Vec<Q>> = sa.iter().filter(|f| f.contains(g)).flat_map(|f| f.rows().iter().cloned()).collect();
        let wb: Vec<Vec<Q>> = sb.iter().filter(|f| f.contains(g)).flat_map(|f| f.rows().iter().cloned()).collect();
        if wa.is_empty() || wb.is_empty() {
            continue;
        }
        if let Some(v) = common_vector(&wa, &wb) {
            return Ok(Verdict::no(Witness::SplayFailure { flat: g.key(), covector: covector_strings(&v) }));
        }
        points.push(LocalSplit { flat: g.key(), first_rank: rank(&wa), second_rank: rank(&wb) });
    }
    let (ca, cb) = (coordinate_set(&sa), coordinate_set(&sb));
    let witness = if ca.is_disjoint(&cb) {
        Witness::CoordinateSplit { first: ca.into_iter().collect(), second: cb.into_iter().collect() }
    } else {
        Witness::LocalSplits { points }
    };
    Ok(Verdict::yes(Some(witness)))
}

/// `N*_F ∩ N*_G = 0` along `F ∩ G` for every pair of components.
pub fn is_noncharacteristic_diagonal(sa: &ConicSupport, sb: &ConicSupport) -> Result<Verdict> {
    if sa.ambient != sb.ambient {
        return Err(Error::Dimension("supports live on different spaces".into()));
    }
    for f in &sa.components {
        for g in &sb.components {
            if !f.meets(g)? {
                continue;
            }
            if let Some(v) = common_vector(&f.flat_data(), &g.flat_data()) {
                return Ok(Verdict::no(Witness::CommonCovector {
                    first: f.stratum_id.clone(),
                    second: g.stratum_id.clone(),
                    covector: covector_strings(&v),
                }));
            }
        }
    }
    Ok(Verdict::yes(None))
}
