use std::sync::Arc;

use crate::chow::{cross, AmbientClass, GradedClass};
use crate::error::{Error, Result};
use crate::lagrangian::LagrangianCycle;
use crate::linalg::{common_vector, null_space, Flat, Q};
use crate::strata::linear::check_embedding;
use crate::strata::{
    cross_fn, Ambient, ConstructibleFunction, EulerTable, LinearStratification, StratPoset, StratumGeometry,
};

use super::{covector_strings, cycle_support, ConicSupport, SupportComponent, Verdict, Witness};

/// A map between projective spaces (or a product onto a factor).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearMap {
    /// `P^fiber × P^base → P^base`.
    Projection { fiber: usize, base: usize },
    /// `P^k → P^n`, `y ↦ Aᵀy` for a `(k+1) × (n+1)` matrix `A` of full rank.
    Embedding { matrix: Vec<Vec<Q>> },
    /// `maps[0] ∘ maps[1] ∘ …`.
    Composite(Vec<LinearMap>),
}

impl LinearMap {
    pub fn projection(fiber: usize, base: usize) -> Self {
        LinearMap::Projection { fiber, base }
    }

    pub fn embedding(matrix: Vec<Vec<Q>>) -> Result<Self> {
        let n = matrix.first().map_or(0, |r| r.len().saturating_sub(1));
        check_embedding(&matrix, n)?;
        Ok(LinearMap::Embedding { matrix })
    }

    pub fn identity(n: usize) -> Self {
        let matrix = (0..=n).map(|i| (0..=n).map(|j| Q::from_integer(((i == j) as i64).into())).collect()).collect();
        LinearMap::Embedding { matrix }
    }

    /// `maps[0] ∘ maps[1] ∘ …`, checking that consecutive maps compose.
    pub fn composite(maps: Vec<LinearMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidMap("empty composite".into()));
        }
        for w in maps.windows(2) {
            if w[0].source() != w[1].target() {
                return Err(Error::InvalidMap(format!(
                    "cannot compose a map from {:?} with a map into {:?}",
                    w[0].source(),
                    w[1].target()
                )));
            }
        }
        Ok(LinearMap::Composite(maps))
    }

    pub fn source(&self) -> Ambient {
        match self {
            LinearMap::Projection { fiber, base } => Ambient::Biprojective(*fiber, *base),
            LinearMap::Embedding { matrix } => Ambient::Projective(matrix.len() - 1),
            LinearMap::Composite(maps) => maps.last().expect("nonempty composite").source(),
        }
    }

    pub fn target(&self) -> Ambient {
        match self {
            LinearMap::Projection { base, .. } => Ambient::Projective(*base),
            LinearMap::Embedding { matrix } => Ambient::Projective(matrix[0].len() - 1),
            LinearMap::Composite(maps) => maps[0].target(),
        }
    }

    /// Elementary maps in the order their pullbacks are applied.
    fn steps(&self) -> Vec<&LinearMap> {
        match self {
            LinearMap::Composite(maps) => maps.iter().flat_map(LinearMap::steps).collect(),
            other => vec![other],
        }
    }

    /// Collapses a chain of embeddings into a single embedding.
    pub fn flatten_embeddings(&self) -> Option<Vec<Vec<Q>>> {
        let mut acc: Option<Vec<Vec<Q>>> = None;
        for step in self.steps() {
            let LinearMap::Embedding { matrix } = step else {
                return None;
            };
            acc = Some(match acc {
                None => matrix.clone(),
                // (f∘g)(z) = A_fᵀ A_gᵀ z, so the composite matrix is A_g A_f.
                Some(outer) => matrix
                    .iter()
                    .map(|row| {
                        (0..outer[0].len()).map(|c| row.iter().zip(&outer).map(|(x, o)| x * &o[c]).sum()).collect()
                    })
                    .collect(),
            });
        }
        acc
    }
}

fn expect_projective(ambient: Ambient, n: usize) -> Result<()> {
    if ambient == Ambient::Projective(n) {
        Ok(())
    } else {
        Err(Error::Dimension(format!("expected data on P^{n}, found {ambient:?}")))
    }
}

fn step_support(step: &LinearMap, s: &ConicSupport) -> Result<(Verdict, ConicSupport)> {
    expect_projective(
        s.ambient,
        match step.target() {
            Ambient::Projective(n) => n,
            Ambient::Biprojective(..) => unreachable!("elementary maps land in a projective space"),
        },
    )?;
    match step {
        LinearMap::Projection { fiber, base } => {
            let components = s
                .components
                .iter()
                .map(|c| match &c.geometry {
                    StratumGeometry::Flat(f) => Ok(SupportComponent {
                        stratum_id: c.stratum_id.clone(),
                        geometry: StratumGeometry::ProductFlat(Flat::ambient(*fiber), f.clone()),
                    }),
                    StratumGeometry::ProductFlat(..) => Err(Error::Dimension("product component on P^n".into())),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((Verdict::yes(None), ConicSupport { ambient: Ambient::Biprojective(*fiber, *base), components }))
        }
        LinearMap::Embedding { matrix } => {
            let n = matrix[0].len() - 1;
            let k = matrix.len() - 1;
            // Covectors vanishing on the embedded subspace.
            let annihilator = null_space(matrix, n + 1);
            let mut components = Vec::new();
            for c in &s.components {
                let StratumGeometry::Flat(f) = &c.geometry else {
                    return Err(Error::Dimension("product component on P^n".into()));
                };
                let Some(pre) = f.preimage(matrix) else {
                    continue;
                };
                if let Some(v) = common_vector(f.rows(), &annihilator) {
                    return Ok((
                        Verdict::no(Witness::MapCharacteristic {
                            component: c.stratum_id.clone(),
                            covector: covector_strings(&v),
                        }),
                        s.clone(),
                    ));
                }
                components
                    .push(SupportComponent { stratum_id: c.stratum_id.clone(), geometry: StratumGeometry::Flat(pre) });
            }
            Ok((Verdict::yes(None), ConicSupport { ambient: Ambient::Projective(k), components }))
        }
        LinearMap::Composite(_) => unreachable!("steps are elementary"),
    }
}

/// Whether `f` is non-characteristic for `s`; composites are checked step by
/// step against the successively pulled-back supports.
pub fn is_noncharacteristic_map(f: &LinearMap, s: &ConicSupport) -> Result<Verdict> {
    let mut current = s.clone();
    for step in f.steps() {
        let (verdict, next) = step_support(step, &current)?;
        if !verdict.holds {
            return Ok(verdict);
        }
        current = next;
    }
    Ok(Verdict::yes(None))
}

fn projection_poset(fiber: usize, poset: &Arc<StratPoset>) -> Result<Arc<StratPoset>> {
    let point = StratPoset::point_stratification(fiber);
    Ok(Arc::new(StratPoset::product(&point, poset)?))
}

/// `t_* f'^!(L)`: for projections `[T*_Z] ↦ [T*_{P^a}] × [T*_Z]`, for
/// transversal embeddings `[T*_F] ↦ [T*_{F ∩ M}]`.
pub fn pullback_cycle(f: &LinearMap, cycle: &LagrangianCycle) -> Result<LagrangianCycle> {
    let verdict = is_noncharacteristic_map(f, &cycle_support(cycle)?)?;
    if !verdict.holds {
        return Err(Error::Characteristic(verdict.witness_json()));
    }
    let mut current = cycle.clone();
    for step in f.steps() {
        current = match step {
            LinearMap::Projection { fiber, base } => {
                expect_projective(current.poset().ambient(), *base)?;
                LagrangianCycle::new(projection_poset(*fiber, current.poset())?, current.coeffs().to_vec())?
            }
            LinearMap::Embedding { matrix } => {
                let (strat, map) = LinearStratification::from_poset(current.poset())?;
                let pulled = strat.pull_back(matrix)?;
                let mut coeffs = vec![0i64; pulled.strat.len()];
                for (i, flat) in strat.flats().iter().enumerate() {
                    let c = current.coeff(map[i]);
                    if c == 0 {
                        continue;
                    }
                    if let Some(pre) = flat.preimage(matrix) {
                        coeffs[pulled.strat.index_of_flat(&pre).expect("preimages generate the pullback")] += c;
                    }
                }
                LagrangianCycle::new(pulled.strat.poset_arc(), coeffs)?
            }
            LinearMap::Composite(_) => unreachable!("steps are elementary"),
        };
    }
    Ok(current)
}

/// `f^*γ` together with the Euler obstruction table of its stratification.
pub fn pullback_function(
    f: &LinearMap,
    gamma: &ConstructibleFunction,
    table: &EulerTable,
) -> Result<(ConstructibleFunction, EulerTable)> {
    let mut current = (gamma.clone(), table.clone());
    for step in f.steps() {
        let (g, e) = &current;
        current = match step {
            LinearMap::Projection { fiber, base } => {
                expect_projective(g.poset().ambient(), *base)?;
                let point = StratPoset::point_stratification(*fiber);
                let one = ConstructibleFunction::constant(&point, 1);
                (cross_fn(&one, g)?, EulerTable::product(&EulerTable::smooth(&point), e))
            }
            LinearMap::Embedding { matrix } => {
                if *e != EulerTable::smooth(g.poset()) {
                    return Err(Error::Unsupported("restriction of singular closures to linear subspaces".into()));
                }
                let (strat, map) = LinearStratification::from_poset(g.poset())?;
                let on_strat = g.transfer(&strat.poset_arc(), &map)?;
                let pulled = strat.pull_back(matrix)?;
                let pg = strat.transfer(&on_strat, &pulled.strat, &pulled.origin)?;
                (pg, pulled.strat.euler().clone())
            }
            LinearMap::Composite(_) => unreachable!("steps are elementary"),
        };
    }
    Ok(current)
}

/// Gysin pullback `f^!` on ambient homology classes.
pub fn gysin(f: &LinearMap, class: &AmbientClass) -> Result<AmbientClass> {
    let mut current = class.clone();
    for step in f.steps() {
        let x = current
            .as_projective()
            .ok_or_else(|| Error::Dimension("Gysin pullback of a class on a product space".into()))?;
        current = match step {
            LinearMap::Projection { fiber, base } => {
                if x.n() != *base {
                    return Err(Error::Dimension(format!("class on P^{} pulled back to P^{fiber} x P^{base}", x.n())));
                }
                AmbientClass::Biprojective(cross(&GradedClass::fundamental(*fiber), x))
            }
            LinearMap::Embedding { matrix } => {
                if x.n() + 1 != matrix[0].len() {
                    return Err(Error::Dimension(format!(
                        "class on P^{} restricted along a map into P^{}",
                        x.n(),
                        matrix[0].len() - 1
                    )));
                }
                AmbientClass::Projective(x.restrict_to_linear(matrix.len() - 1)?)
            }
            LinearMap::Composite(_) => unreachable!("steps are elementary"),
        };
    }
    Ok(current)
}
