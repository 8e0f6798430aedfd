//! Stratifications of `P^n` whose closures are linear flats.
//!
//! The family of closures is closed under intersection, so every point lies
//! in a unique smallest flat and the open strata are "flat minus smaller
//! flats". Refinements and pullbacks along linear embeddings stay inside this
//! class, which keeps every identity exactly computable.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::chow::{chern_tangent, AmbientClass, CohClass, GradedClass};
use crate::error::{Error, Result};
use crate::linalg::{Flat, Q};

use super::{Ambient, ConstructibleFunction, EulerTable, StratPoset, Stratum, StratumGeometry};

#[derive(Clone, Debug)]
pub struct LinearStratification {
    n: usize,
    flats: Vec<Flat>,
    poset: Arc<StratPoset>,
    euler: EulerTable,
}

/// A common refinement together with the maps sending each refined stratum
/// to the stratum of each input containing it.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub strat: LinearStratification,
    pub to_first: Vec<usize>,
    pub to_second: Vec<usize>,
}

/// Pullback of a stratification along a linear embedding.
#[derive(Clone, Debug)]
pub struct PulledBack {
    pub strat: LinearStratification,
    /// Source stratum containing the image of each pulled-back stratum.
    pub origin: Vec<usize>,
}

/// Chern–Mather class of a smooth flat `P^d ⊂ P^n`: `(1+h)^{d+1} ∩ [P^d]`.
pub fn flat_mather_class(n: usize, d: usize) -> GradedClass {
    chern_tangent(d).cap(&GradedClass::fundamental(d)).and_then(|c| c.push_to_linear(n)).expect("d <= n")
}

impl LinearStratification {
    /// Stratification generated by the given flats (the ambient space is
    /// always included).
    pub fn from_generators(n: usize, generators: Vec<Flat>) -> Result<Self> {
        if let Some(bad) = generators.iter().find(|f| f.ambient_dim() != n) {
            return Err(Error::Dimension(format!("flat in P^{} used in P^{n}", bad.ambient_dim())));
        }
        let mut family: BTreeSet<Flat> = BTreeSet::new();
        family.insert(Flat::ambient(n));
        let mut frontier: Vec<Flat> = Vec::new();
        for g in generators {
            if family.insert(g.clone()) {
                frontier.push(g);
            }
        }
        while let Some(f) = frontier.pop() {
            let snapshot: Vec<Flat> = family.iter().cloned().collect();
            for g in snapshot {
                if let Some(m) = f.meet(&g) {
                    if family.insert(m.clone()) {
                        frontier.push(m);
                    }
                }
            }
        }
        Ok(Self::from_closed_family(n, family.into_iter().collect()))
    }

    fn from_closed_family(n: usize, mut flats: Vec<Flat>) -> Self {
        flats.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.cmp(b)));
        let k = flats.len();
        let below: Vec<Vec<usize>> =
            (0..k).map(|t| (0..k).filter(|&s| s != t && flats[t].contains(&flats[s])).collect()).collect();
        // Smaller flats come later in `flats`, so process in reverse.
        let mut chi_c = vec![0i64; k];
        for t in (0..k).rev() {
            let inside: i64 = below[t].iter().map(|&s| chi_c[s]).sum();
            chi_c[t] = flats[t].dim() as i64 + 1 - inside;
        }
        let strata = flats
            .iter()
            .enumerate()
            .map(|(i, f)| Stratum {
                id: format!("F{i}"),
                dim: f.dim(),
                chi_c: chi_c[i],
                class: AmbientClass::Projective(GradedClass::linear(n, f.dim())),
                mather: Some(AmbientClass::Projective(flat_mather_class(n, f.dim()))),
                geometry: Some(StratumGeometry::Flat(f.clone())),
            })
            .collect();
        let poset = StratPoset::new(Ambient::Projective(n), strata, below).expect("flat inclusion is a valid poset");
        let euler = EulerTable::smooth(&poset);
        LinearStratification { n, flats, poset: Arc::new(poset), euler }
    }

    /// Rebuilds the linear model of a poset whose strata carry flat geometry.
    /// Returns the model and, for each of its strata, the matching stratum of
    /// `poset`.
    pub fn from_poset(poset: &StratPoset) -> Result<(Self, Vec<usize>)> {
        let Ambient::Projective(n) = poset.ambient() else {
            return Err(Error::NonLinear("product stratifications have no flat model".into()));
        };
        let mut flats = Vec::with_capacity(poset.len());
        for s in poset.strata() {
            match &s.geometry {
                Some(StratumGeometry::Flat(f)) if f.ambient_dim() == n && f.dim() == s.dim => flats.push(f.clone()),
                _ => return Err(Error::NonLinear(format!("stratum {} has no flat closure", s.id))),
            }
        }
        let strat = Self::from_generators(n, flats.clone())?;
        if strat.len() != poset.len() {
            return Err(Error::NonLinear("flat closures are not closed under intersection".into()));
        }
        let map = strat
            .flats
            .iter()
            .map(|f| flats.iter().position(|g| g == f).ok_or_else(|| Error::NonLinear("unmatched flat".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok((strat, map))
    }

    /// `P^0 ⊂ P^1 ⊂ … ⊂ P^n` cut out by the last coordinates.
    pub fn flag(n: usize) -> Self {
        let flats =
            (0..n).map(|d| Flat::coordinate(n, &((d + 1)..=n).collect::<Vec<_>>()).expect("flag flat")).collect();
        Self::from_generators(n, flats).expect("flag of flats")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    pub fn flat(&self, s: usize) -> &Flat {
        &self.flats[s]
    }

    pub fn poset(&self) -> &StratPoset {
        &self.poset
    }

    pub fn poset_arc(&self) -> Arc<StratPoset> {
        self.poset.clone()
    }

    pub fn euler(&self) -> &EulerTable {
        &self.euler
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    pub fn index_of_flat(&self, f: &Flat) -> Option<usize> {
        self.flats.iter().position(|g| g == f)
    }

    /// The smallest flat of the family containing `f`.
    pub fn locate(&self, f: &Flat) -> usize {
        // The family is closed under meets, so the smallest container is unique.
        (0..self.flats.len())
            .filter(|&i| self.flats[i].contains(f))
            .min_by_key(|&i| self.flats[i].dim())
            .expect("ambient flat contains everything")
    }

    /// `1_F` for a flat of the family.
    pub fn indicator(&self, f: &Flat) -> Result<ConstructibleFunction> {
        let t = self
            .index_of_flat(f)
            .ok_or_else(|| Error::InvalidPoset(format!("{} is not a flat of this stratification", f.key())))?;
        Ok(ConstructibleFunction::closure_indicator(&self.poset, t))
    }

    /// `Σ c·1_F`.
    pub fn combination(&self, terms: &[(Flat, i64)]) -> Result<ConstructibleFunction> {
        let mut out = ConstructibleFunction::zero(&self.poset);
        for (f, c) in terms {
            out = out.add(&self.indicator(f)?.scale(*c))?;
        }
        Ok(out)
    }

    /// Re-expresses a function on this stratification in the basis `1_F`.
    pub fn flat_expansion(&self, alpha: &ConstructibleFunction) -> Result<Vec<(Flat, i64)>> {
        let coeffs = super::decompose_euler(alpha, &self.euler)?;
        Ok(coeffs.into_iter().enumerate().filter(|(_, c)| *c != 0).map(|(i, c)| (self.flats[i].clone(), c)).collect())
    }

    pub fn common_refinement(&self, other: &LinearStratification) -> Result<Refinement> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("P^{} vs P^{}", self.n, other.n)));
        }
        let mut family = BTreeSet::new();
        for f in &self.flats {
            for g in &other.flats {
                if let Some(m) = f.meet(g) {
                    family.insert(m);
                }
            }
        }
        let strat = Self::from_closed_family(self.n, family.into_iter().collect());
        let to_first = strat.flats.iter().map(|k| self.locate(k)).collect();
        let to_second = strat.flats.iter().map(|k| other.locate(k)).collect();
        Ok(Refinement { strat, to_first, to_second })
    }

    /// Pullback along the embedding `P^k → P^n`, `y ↦ Aᵀy`.
    pub fn pull_back(&self, matrix: &[Vec<Q>]) -> Result<PulledBack> {
        check_embedding(matrix, self.n)?;
        let k = matrix.len() - 1;
        let preimages: Vec<Option<Flat>> = self.flats.iter().map(|f| f.preimage(matrix)).collect();
        let family: BTreeSet<Flat> = preimages.iter().flatten().cloned().collect();
        let strat = Self::from_closed_family(k, family.into_iter().collect());
        let origin = strat
            .flats
            .iter()
            .map(|g| {
                (0..self.flats.len())
                    .filter(|&i| preimages[i].as_ref().is_some_and(|p| p.contains(g)))
                    .min_by_key(|&i| self.flats[i].dim())
                    .expect("ambient preimage contains everything")
            })
            .collect();
        Ok(PulledBack { strat, origin })
    }

    /// Transfers a function on `self` to a refinement or pullback.
    pub fn transfer(
        &self,
        alpha: &ConstructibleFunction,
        target: &LinearStratification,
        origin: &[usize],
    ) -> Result<ConstructibleFunction> {
        if !Arc::ptr_eq(alpha.poset(), &self.poset) && **alpha.poset() != *self.poset {
            return Err(Error::PosetMismatch);
        }
        alpha.transfer(&target.poset, origin)
    }
}

/// Checks that a `(k+1) × (n+1)` matrix has full row rank.
pub fn check_embedding(matrix: &[Vec<Q>], n: usize) -> Result<()> {
    if matrix.is_empty() || matrix.iter().any(|r| r.len() != n + 1) {
        return Err(Error::InvalidMap(format!("embedding matrix must have {} columns", n + 1)));
    }
    if matrix.len() > n + 1 || crate::linalg::rank(matrix) != matrix.len() {
        return Err(Error::InvalidMap("embedding matrix is not of full rank".into()));
    }
    Ok(())
}

/// `c(TP^n)^{-1}`.
pub fn inverse_chern_tangent(n: usize) -> CohClass {
    CohClass::binomial_power(n, 1, -(n as i64 + 1))
}
