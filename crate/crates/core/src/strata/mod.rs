//! Stratification posets and the constructible functions that live on them.
//!
//! A [`StratPoset`] records, per stratum, its dimension, the compactly
//! supported Euler characteristic of the open stratum and the class of its
//! closure in the ambient homology. Constructible functions are integer
//! vectors indexed by strata. Changes of basis between indicator functions and
//! Euler obstructions are unitriangular solves over the closure order.

mod doc;
pub mod linear;

use std::collections::HashMap;
use std::sync::Arc;

use crate::chow::{cross, AmbientClass, GradedClass};
use crate::error::{Error, Result};
use crate::linalg::Flat;

pub use doc::{PosetDocument, StratumDoc};
pub use linear::{LinearStratification, PulledBack, Refinement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ambient {
    Projective(usize),
    Biprojective(usize, usize),
}

impl Ambient {
    pub fn dim(&self) -> usize {
        match *self {
            Ambient::Projective(n) => n,
            Ambient::Biprojective(n, m) => n + m,
        }
    }
}

/// Linear geometry of a stratum closure, when known.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StratumGeometry {
    Flat(Flat),
    ProductFlat(Flat, Flat),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub id: String,
    pub dim: usize,
    /// χ_c of the open stratum (summed over components).
    pub chi_c: i64,
    /// Class of the closure, pushed to the ambient space.
    pub class: AmbientClass,
    /// Chern–Mather class of the closure, pushed to the ambient space.
    pub mather: Option<AmbientClass>,
    pub geometry: Option<StratumGeometry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratPoset {
    ambient: Ambient,
    strata: Vec<Stratum>,
    // le[s][t] <=> s ⊆ closure(t)
    le: Vec<Vec<bool>>,
}

impl StratPoset {
    /// `below[t]` lists the strata strictly below `t`; it must already be a
    /// down-closed set.
    pub fn new(ambient: Ambient, strata: Vec<Stratum>, below: Vec<Vec<usize>>) -> Result<Self> {
        let k = strata.len();
        if below.len() != k {
            return Err(Error::InvalidPoset(format!("{} strata but {} down-sets", k, below.len())));
        }
        let mut ids = HashMap::new();
        for (i, s) in strata.iter().enumerate() {
            if ids.insert(s.id.as_str(), i).is_some() {
                return Err(Error::InvalidPoset(format!("duplicate stratum id {}", s.id)));
            }
        }
        let mut le = vec![vec![false; k]; k];
        for t in 0..k {
            le[t][t] = true;
            for &s in &below[t] {
                if s >= k {
                    return Err(Error::InvalidPoset(format!("unknown stratum index {s}")));
                }
                if s == t {
                    return Err(Error::InvalidPoset(format!("stratum {} listed below itself", strata[t].id)));
                }
                le[s][t] = true;
            }
        }
        for t in 0..k {
            for s in 0..k {
                if s == t || !le[s][t] {
                    continue;
                }
                if le[t][s] {
                    return Err(Error::InvalidPoset(format!(
                        "{} and {} are below each other",
                        strata[s].id, strata[t].id
                    )));
                }
                if strata[s].dim >= strata[t].dim {
                    return Err(Error::InvalidPoset(format!(
                        "{} < {} but dim {} >= {}",
                        strata[s].id, strata[t].id, strata[s].dim, strata[t].dim
                    )));
                }
                for r in 0..k {
                    if le[r][s] && !le[r][t] {
                        return Err(Error::InvalidPoset(format!(
                            "down-set of {} is not closed: contains {} but not {}",
                            strata[t].id, strata[s].id, strata[r].id
                        )));
                    }
                }
            }
        }
        for s in &strata {
            check_leading_term(s, ambient)?;
        }
        Ok(StratPoset { ambient, strata, le })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn stratum(&self, i: usize) -> &Stratum {
        &self.strata[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.strata.iter().position(|s| s.id == id)
    }

    /// `s ⊆ closure(t)`.
    pub fn le(&self, s: usize, t: usize) -> bool {
        self.le[s][t]
    }

    pub fn below(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&s| s != t && self.le[s][t])
    }

    /// Strata sorted by decreasing dimension, ties broken by id.
    pub fn elimination_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.strata[b].dim.cmp(&self.strata[a].dim).then_with(|| self.strata[a].id.cmp(&self.strata[b].id))
        });
        order
    }

    /// Product stratification of two projective stratifications.
    pub fn product(p: &StratPoset, q: &StratPoset) -> Result<StratPoset> {
        let (Ambient::Projective(n), Ambient::Projective(m)) = (p.ambient, q.ambient) else {
            return Err(Error::Unsupported("products of bi-projective stratifications".into()));
        };
        let mut strata = Vec::with_capacity(p.len() * q.len());
        let mut below = Vec::with_capacity(p.len() * q.len());
        for (i, s) in p.strata.iter().enumerate() {
            for (j, t) in q.strata.iter().enumerate() {
                let class = cross(proj(&s.class)?, proj(&t.class)?);
                let mather = match (&s.mather, &t.mather) {
                    (Some(a), Some(b)) => Some(AmbientClass::Biprojective(cross(proj(a)?, proj(b)?))),
                    _ => None,
                };
                let geometry = match (&s.geometry, &t.geometry) {
                    (Some(StratumGeometry::Flat(f)), Some(StratumGeometry::Flat(g))) => {
                        Some(StratumGeometry::ProductFlat(f.clone(), g.clone()))
                    }
                    _ => None,
                };
                strata.push(Stratum {
                    id: product_id(&s.id, &t.id),
                    dim: s.dim + t.dim,
                    chi_c: s.chi_c * t.chi_c,
                    class: AmbientClass::Biprojective(class),
                    mather,
                    geometry,
                });
                let mut down = Vec::new();
                for i2 in 0..p.len() {
                    for j2 in 0..q.len() {
                        if (i2, j2) != (i, j) && p.le[i2][i] && q.le[j2][j] {
                            down.push(i2 * q.len() + j2);
                        }
                    }
                }
                below.push(down);
            }
        }
        StratPoset::new(Ambient::Biprojective(n, m), strata, below)
    }

    /// Single-stratum stratification of `P^n`.
    pub fn point_stratification(n: usize) -> Arc<StratPoset> {
        linear::LinearStratification::from_generators(n, vec![]).expect("trivial stratification").poset_arc()
    }
}

pub fn product_id(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

fn proj(c: &AmbientClass) -> Result<&GradedClass> {
    c.as_projective().ok_or_else(|| Error::Unsupported("expected a class on a projective space".into()))
}

fn check_leading_term(s: &Stratum, ambient: Ambient) -> Result<()> {
    let shape_ok = match (&s.class, ambient) {
        (AmbientClass::Projective(c), Ambient::Projective(n)) => c.n() == n,
        (AmbientClass::Biprojective(c), Ambient::Biprojective(n, m)) => c.dims() == (n, m),
        _ => false,
    };
    if !shape_ok {
        return Err(Error::InvalidPoset(format!("class of {} does not live on the ambient space", s.id)));
    }
    if s.class.top_dimension() != Some(s.dim) {
        return Err(Error::InvalidPoset(format!("class of {} is not of dimension {}", s.id, s.dim)));
    }
    if let Some(m) = &s.mather {
        let agrees = match (&s.class, m) {
            (AmbientClass::Projective(c), AmbientClass::Projective(mc)) => {
                mc.n() == c.n() && mc.coeff(s.dim) == c.coeff(s.dim) && (s.dim + 1..=c.n()).all(|i| mc.coeff(i) == 0)
            }
            (AmbientClass::Biprojective(c), AmbientClass::Biprojective(mc)) => {
                let (n, m) = c.dims();
                mc.dims() == (n, m)
                    && (0..=n).all(|i| {
                        (0..=m).all(|j| match (i + j).cmp(&s.dim) {
                            std::cmp::Ordering::Greater => mc.coeff(i, j) == 0,
                            std::cmp::Ordering::Equal => mc.coeff(i, j) == c.coeff(i, j),
                            std::cmp::Ordering::Less => true,
                        })
                    })
            }
            _ => false,
        };
        if !agrees {
            return Err(Error::InvalidPoset(format!("Mather class of {} has the wrong leading term", s.id)));
        }
    }
    Ok(())
}

/// `e[z][s]` = value of the Euler obstruction of `closure(z)` on stratum `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerTable {
    e: Vec<Vec<i64>>,
}

impl EulerTable {
    pub fn new(poset: &StratPoset, e: Vec<Vec<i64>>) -> Result<Self> {
        let k = poset.len();
        if e.len() != k || e.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidEulerTable(format!("expected a {k}x{k} table")));
        }
        for (z, row) in e.iter().enumerate() {
            if row[z] != 1 {
                return Err(Error::InvalidEulerTable(format!(
                    "Eu of closure({}) is {} on its own stratum",
                    poset.strata[z].id, row[z]
                )));
            }
            for (s, &v) in row.iter().enumerate() {
                if v != 0 && !poset.le(s, z) {
                    return Err(Error::InvalidEulerTable(format!(
                        "Eu of closure({}) is nonzero on {} outside the closure",
                        poset.strata[z].id, poset.strata[s].id
                    )));
                }
            }
        }
        Ok(EulerTable { e })
    }

    /// Table of a stratification with smooth closures: `Eu_Z = 1_Z`.
    pub fn smooth(poset: &StratPoset) -> Self {
        let k = poset.len();
        EulerTable { e: (0..k).map(|z| (0..k).map(|s| i64::from(poset.le(s, z))).collect()).collect() }
    }

    pub fn entry(&self, z: usize, s: usize) -> i64 {
        self.e[z][s]
    }

    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    /// `Eu_{Z×Z'} = Eu_Z × Eu_{Z'}`.
    pub fn product(a: &EulerTable, b: &EulerTable) -> EulerTable {
        let (ka, kb) = (a.len(), b.len());
        let mut e = vec![vec![0; ka * kb]; ka * kb];
        for z in 0..ka {
            for w in 0..kb {
                for s in 0..ka {
                    for t in 0..kb {
                        e[z * kb + w][s * kb + t] = a.e[z][s] * b.e[w][t];
                    }
                }
            }
        }
        EulerTable { e }
    }

    /// The function `Eu_{closure(z)}`.
    pub fn column(&self, poset: &Arc<StratPoset>, z: usize) -> ConstructibleFunction {
        ConstructibleFunction { poset: poset.clone(), values: self.e[z].clone() }
    }
}

#[derive(Clone, Debug)]
pub struct ConstructibleFunction {
    poset: Arc<StratPoset>,
    values: Vec<i64>,
}

impl PartialEq for ConstructibleFunction {
    fn eq(&self, other: &Self) -> bool {
        same_poset(&self.poset, &other.poset) && self.values == other.values
    }
}

impl Eq for ConstructibleFunction {}

fn same_poset(a: &Arc<StratPoset>, b: &Arc<StratPoset>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl ConstructibleFunction {
    pub fn new(poset: Arc<StratPoset>, values: Vec<i64>) -> Result<Self> {
        if values.len() != poset.len() {
            return Err(Error::Dimension(format!("{} values for {} strata", values.len(), poset.len())));
        }
        Ok(ConstructibleFunction { poset, values })
    }

    pub fn zero(poset: &Arc<StratPoset>) -> Self {
        ConstructibleFunction { poset: poset.clone(), values: vec![0; poset.len()] }
    }

    pub fn constant(poset: &Arc<StratPoset>, c: i64) -> Self {
        ConstructibleFunction { poset: poset.clone(), values: vec![c; poset.len()] }
    }

    /// `1_{closure(t)}`.
    pub fn closure_indicator(poset: &Arc<StratPoset>, t: usize) -> Self {
        ConstructibleFunction {
            poset: poset.clone(),
            values: (0..poset.len()).map(|s| i64::from(poset.le(s, t))).collect(),
        }
    }

    pub fn poset(&self) -> &Arc<StratPoset> {
        &self.poset
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn value(&self, s: usize) -> i64 {
        self.values[s]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if same_poset(&self.poset, &other.poset) {
            Ok(())
        } else {
            Err(Error::PosetMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(ConstructibleFunction {
            poset: self.poset.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, k: i64) -> Self {
        ConstructibleFunction { poset: self.poset.clone(), values: self.values.iter().map(|v| v * k).collect() }
    }

    /// Pointwise product.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(ConstructibleFunction {
            poset: self.poset.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    /// `Σ_S χ_c(S)·α(S)`.
    pub fn euler_integral(&self) -> i64 {
        self.poset.strata.iter().zip(&self.values).map(|(s, v)| s.chi_c * v).sum()
    }

    /// Pullback along a stratum map `target stratum -> source stratum`.
    pub fn transfer(&self, target: &Arc<StratPoset>, origin: &[usize]) -> Result<Self> {
        if origin.len() != target.len() {
            return Err(Error::Dimension("transfer map does not cover the target".into()));
        }
        Ok(ConstructibleFunction { poset: target.clone(), values: origin.iter().map(|&s| self.values[s]).collect() })
    }

    /// Strata where the function is nonzero.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&s| self.values[s] != 0).collect()
    }
}

pub fn euler_integral(alpha: &ConstructibleFunction) -> i64 {
    alpha.euler_integral()
}

pub fn product(alpha: &ConstructibleFunction, beta: &ConstructibleFunction) -> Result<ConstructibleFunction> {
    alpha.product(beta)
}

/// Coefficients `c_Z` with `α = Σ_Z c_Z · Eu_{closure(Z)}`.
pub fn decompose_euler(alpha: &ConstructibleFunction, table: &EulerTable) -> Result<Vec<i64>> {
    let poset = &alpha.poset;
    if table.len() != poset.len() {
        return Err(Error::InvalidEulerTable("table does not match the stratification".into()));
    }
    let mut c = vec![0i64; poset.len()];
    let order = poset.elimination_order();
    for (pos, &z) in order.iter().enumerate() {
        let above: i64 = order[..pos].iter().map(|&w| c[w] * table.entry(w, z)).sum();
        c[z] = alpha.values[z] - above;
    }
    Ok(c)
}

/// `Σ_Z c_Z · Eu_{closure(Z)}`.
pub fn compose_euler(poset: &Arc<StratPoset>, coeffs: &[i64], table: &EulerTable) -> Result<ConstructibleFunction> {
    if coeffs.len() != poset.len() || table.len() != poset.len() {
        return Err(Error::Dimension("coefficient vector does not match the stratification".into()));
    }
    let values = (0..poset.len()).map(|s| (0..poset.len()).map(|z| coeffs[z] * table.entry(z, s)).sum()).collect();
    ConstructibleFunction::new(poset.clone(), values)
}

/// MacPherson's Chern class: `c_*(α) = Σ_Z c_Z · c^{Ma}_*(closure Z)`.
pub fn csm(alpha: &ConstructibleFunction, table: &EulerTable) -> Result<AmbientClass> {
    let coeffs = decompose_euler(alpha, table)?;
    let poset = &alpha.poset;
    let mut total = zero_class(poset.ambient);
    for (z, &c) in coeffs.iter().enumerate().filter(|(_, c)| **c != 0) {
        let stratum = &poset.strata[z];
        let mather = stratum.mather.as_ref().ok_or_else(|| Error::MissingMather(stratum.id.clone()))?;
        total = total.try_add(&mather.scale(c))?;
    }
    Ok(total)
}

/// `csm` for a stratification of a projective space.
pub fn csm_projective(alpha: &ConstructibleFunction, table: &EulerTable) -> Result<GradedClass> {
    match csm(alpha, table)? {
        AmbientClass::Projective(c) => Ok(c),
        AmbientClass::Biprojective(_) => {
            Err(Error::Unsupported("csm of a product stratification as a P^n class".into()))
        }
    }
}

pub(crate) fn zero_class(ambient: Ambient) -> AmbientClass {
    match ambient {
        Ambient::Projective(n) => AmbientClass::Projective(GradedClass::zero(n)),
        Ambient::Biprojective(n, m) => AmbientClass::Biprojective(crate::chow::BiGradedClass::zero(n, m)),
    }
}

/// `(α×β)(S×T) = α(S)·β(T)` on the product stratification.
pub fn cross_fn(alpha: &ConstructibleFunction, beta: &ConstructibleFunction) -> Result<ConstructibleFunction> {
    let poset = Arc::new(StratPoset::product(&alpha.poset, &beta.poset)?);
    let values = alpha.values.iter().flat_map(|a| beta.values.iter().map(move |b| a * b)).collect();
    ConstructibleFunction::new(poset, values)
}

/// Euler characteristics of normal Morse data, weighted by a function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorseTable {
    /// `χ((NMD(S), α))` for one fixed `α`, per stratum.
    PerStratum(Vec<i64>),
    /// `nmd[S][T] = χ((NMD(S), 1_{closure T}))`, extended linearly in `α`.
    Bilinear(Vec<Vec<i64>>),
}

impl MorseTable {
    pub fn bilinear(poset: &StratPoset, nmd: Vec<Vec<i64>>) -> Result<Self> {
        let k = poset.len();
        if nmd.len() != k {
            return Err(Error::MissingMorse(format!("{} rows for {k} strata", nmd.len())));
        }
        for (s, row) in nmd.iter().enumerate() {
            if row.len() != k {
                return Err(Error::MissingMorse(poset.strata[s].id.clone()));
            }
            for (t, &v) in row.iter().enumerate() {
                if v != 0 && !poset.le(s, t) {
                    return Err(Error::InvalidPoset(format!(
                        "normal Morse weight of {} for closure({}) outside the closure",
                        poset.strata[s].id, poset.strata[t].id
                    )));
                }
            }
        }
        Ok(MorseTable::Bilinear(nmd))
    }

    /// `χ((NMD(S), α))` for every stratum `S`.
    pub fn weights(&self, alpha: &ConstructibleFunction) -> Result<Vec<i64>> {
        let poset = alpha.poset();
        match self {
            MorseTable::PerStratum(w) => {
                if w.len() != poset.len() {
                    let missing = poset.strata.get(w.len()).map_or_else(String::new, |s| s.id.clone());
                    return Err(Error::MissingMorse(missing));
                }
                Ok(w.clone())
            }
            MorseTable::Bilinear(nmd) => {
                if nmd.len() != poset.len() {
                    return Err(Error::MissingMorse(format!("{} rows for {} strata", nmd.len(), poset.len())));
                }
                // α = Σ_T a_T 1_{closure T}
                let a = decompose_euler(alpha, &EulerTable::smooth(poset))?;
                Ok(nmd.iter().map(|row| row.iter().zip(&a).map(|(x, y)| x * y).sum()).collect())
            }
        }
    }
}
