//! Projective hyperplane arrangements over the rationals.
//!
//! The characteristic polynomial of an arrangement in `P^n` is taken over
//! its full lattice of projective flats, `χ(t) = Σ_F μ(P^n, F) t^{dim F}`.
//! Deletion and restriction are stated for the central arrangement in
//! `C^{n+1}` (the cone), whose polynomial is
//! `t·χ(t) − χ(1)` when the hyperplanes have no common point and `t·χ(t)`
//! otherwise.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{format_rational, null_space, parse_rational, rank, rref, Flat, Q};
use crate::microlocal::{is_splayed_pair, Verdict, Witness};
use crate::strata::{ConstructibleFunction, LinearStratification};

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ArrangementDoc", into = "ArrangementDoc")]
pub struct Arrangement {
    n: usize,
    hyperplanes: Vec<Vec<Q>>,
}

/// JSON form: `{"n": 2, "hyperplanes": [["1", "0", "-1/2"]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementDoc {
    pub n: usize,
    pub hyperplanes: Vec<Vec<String>>,
}

impl TryFrom<ArrangementDoc> for Arrangement {
    type Error = Error;

    fn try_from(doc: ArrangementDoc) -> Result<Self> {
        let rows = doc
            .hyperplanes
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Arrangement::new(doc.n, rows)
    }
}

impl From<Arrangement> for ArrangementDoc {
    fn from(a: Arrangement) -> Self {
        ArrangementDoc {
            n: a.n,
            hyperplanes: a.hyperplanes.iter().map(|r| r.iter().map(format_rational).collect()).collect(),
        }
    }
}

impl fmt::Debug for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.hyperplanes.iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>().join(",")).collect();
        write!(f, "Arrangement(P^{}; [{}])", self.n, rows.join("; "))
    }
}

impl Arrangement {
    pub fn new(n: usize, hyperplanes: Vec<Vec<Q>>) -> Result<Self> {
        for (i, h) in hyperplanes.iter().enumerate() {
            if h.len() != n + 1 {
                return Err(Error::InvalidArrangement(format!(
                    "hyperplane {i} has {} coefficients, expected {}",
                    h.len(),
                    n + 1
                )));
            }
            if h.iter().all(Zero::is_zero) {
                return Err(Error::InvalidArrangement(format!("hyperplane {i} is the zero form")));
            }
            for (j, g) in hyperplanes[..i].iter().enumerate() {
                if rank(&[g.clone(), h.clone()]) < 2 {
                    return Err(Error::InvalidArrangement(format!("hyperplanes {j} and {i} coincide")));
                }
            }
        }
        Ok(Arrangement { n, hyperplanes })
    }

    pub fn from_ints(n: usize, rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(n, rows.iter().map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect()).collect())
    }

    pub fn empty(n: usize) -> Self {
        Arrangement { n, hyperplanes: Vec::new() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("arrangements serialize")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn hyperplanes(&self) -> &[Vec<Q>] {
        &self.hyperplanes
    }

    /// Hyperplane `i` as a flat; `None` only in `P^0`, where every nonzero
    /// form cuts out the empty set.
    pub fn hyperplane_flat(&self, i: usize) -> Option<Flat> {
        Flat::from_rows(self.n, vec![self.hyperplanes[i].clone()]).ok()
    }

    fn flats_of_hyperplanes(&self) -> Vec<Flat> {
        (0..self.len()).filter_map(|i| self.hyperplane_flat(i)).collect()
    }

    /// No point lies on every hyperplane.
    pub fn is_essential(&self) -> bool {
        rank(&self.hyperplanes) == self.n + 1
    }

    /// Every set of at most `n + 1` hyperplanes is independent.
    pub fn is_generic(&self) -> bool {
        fn rec(rows: &[Vec<Q>], start: usize, chosen: &mut Vec<Vec<Q>>, limit: usize) -> bool {
            if !chosen.is_empty() && rank(chosen) < chosen.len() {
                return false;
            }
            if chosen.len() == limit {
                return true;
            }
            (start..rows.len()).all(|i| {
                chosen.push(rows[i].clone());
                let ok = rec(rows, i + 1, chosen, limit);
                chosen.pop();
                ok
            })
        }
        rec(&self.hyperplanes, 0, &mut Vec::new(), self.n + 1)
    }

    /// `A ∖ {H_i}`.
    pub fn deletion(&self, i: usize) -> Arrangement {
        let mut hyperplanes = self.hyperplanes.clone();
        hyperplanes.remove(i);
        Arrangement { n: self.n, hyperplanes }
    }

    /// `A^{H_i}`: traces of the other hyperplanes on `H_i ≅ P^{n-1}`,
    /// with coincident traces merged.
    pub fn restriction(&self, i: usize) -> Result<Arrangement> {
        if self.n == 0 {
            return Err(Error::InvalidArrangement("no restriction to a hyperplane of P^0".into()));
        }
        let basis = null_space(&[self.hyperplanes[i].clone()], self.n + 1);
        let mut seen = BTreeSet::new();
        let mut hyperplanes = Vec::new();
        for (j, h) in self.hyperplanes.iter().enumerate() {
            if j == i {
                continue;
            }
            let trace: Vec<Q> = basis.iter().map(|b| b.iter().zip(h).map(|(x, y)| x * y).sum()).collect();
            let canonical = rref(vec![trace]).remove(0);
            if seen.insert(canonical.clone()) {
                hyperplanes.push(canonical);
            }
        }
        Ok(Arrangement { n: self.n - 1, hyperplanes })
    }

    /// `1_{H_1 ∪ … ∪ H_k}` on the stratification of the arrangement.
    pub fn union_indicator(&self, strat: &LinearStratification) -> Result<ConstructibleFunction> {
        let hs = self.flats_of_hyperplanes();
        let values = strat.flats().iter().map(|f| hs.iter().any(|h| h.contains(f)) as i64).collect();
        ConstructibleFunction::new(strat.poset_arc(), values)
    }

    /// Homogeneous coordinates appearing in some hyperplane.
    pub fn variables(&self) -> BTreeSet<usize> {
        self.hyperplanes
            .iter()
            .flat_map(|h| h.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, _)| j))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeFlat {
    pub id: String,
    pub flat: Flat,
    /// Indices of the hyperplanes containing the flat.
    pub members: BTreeSet<usize>,
}

impl LatticeFlat {
    pub fn dim(&self) -> usize {
        self.flat.dim()
    }
}

/// Intersection lattice ordered by reverse inclusion, with its Möbius function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatLattice {
    n: usize,
    flats: Vec<LatticeFlat>,
    /// `le[i][j]`: flat `j` is contained in flat `i`.
    le: Vec<Vec<bool>>,
    mobius: Vec<Vec<i64>>,
}

impl FlatLattice {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flats(&self) -> &[LatticeFlat] {
        &self.flats
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    /// The ambient flat, the minimum of the order.
    pub fn top(&self) -> usize {
        0
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.le[i][j]
    }

    pub fn mobius(&self, i: usize, j: usize) -> i64 {
        self.mobius[i][j]
    }

    pub fn index_of(&self, f: &Flat) -> Option<usize> {
        self.flats.iter().position(|l| l.flat == *f)
    }

    /// Checks `Σ_{F ≤ H ≤ G} μ(H, G) = 0` for `F < G`, summing from the other
    /// end of each interval than the defining recursion does.
    pub fn verify_mobius(&self) -> bool {
        let k = self.len();
        (0..k).all(|f| {
            self.mobius[f][f] == 1
                && (0..k).filter(|&g| g != f && self.le[f][g]).all(|g| {
                    (0..k).filter(|&h| self.le[f][h] && self.le[h][g]).map(|h| self.mobius[h][g]).sum::<i64>() == 0
                })
        })
    }
}

pub fn build_lattice(a: &Arrangement) -> FlatLattice {
    let strat = LinearStratification::from_generators(a.n, a.flats_of_hyperplanes()).expect("hyperplanes live in P^n");
    let hs: Vec<Option<Flat>> = (0..a.len()).map(|i| a.hyperplane_flat(i)).collect();
    let flats: Vec<LatticeFlat> = strat
        .flats()
        .iter()
        .enumerate()
        .map(|(i, f)| LatticeFlat {
            id: format!("F{i}"),
            flat: f.clone(),
            members: (0..a.len()).filter(|&j| hs[j].as_ref().is_some_and(|h| h.contains(f))).collect(),
        })
        .collect();
    let k = flats.len();
    let le: Vec<Vec<bool>> = (0..k).map(|i| (0..k).map(|j| flats[i].flat.contains(&flats[j].flat)).collect()).collect();
    // Flats are sorted by decreasing dimension, so every H strictly between F
    // and G precedes G.
    let mut mobius = vec![vec![0i64; k]; k];
    for f in 0..k {
        mobius[f][f] = 1;
        for g in f + 1..k {
            if le[f][g] {
                mobius[f][g] = -(f..g).filter(|&h| le[f][h] && le[h][g]).map(|h| mobius[f][h]).sum::<i64>();
            }
        }
    }
    FlatLattice { n: a.n, flats, le, mobius }
}

/// Coefficients of `Σ_F μ(P^n, F) t^{dim F}`, indexed by the power of `t`.
pub fn char_poly(l: &FlatLattice) -> Vec<i64> {
    let mut out = vec![0i64; l.n + 1];
    for (j, f) in l.flats.iter().enumerate() {
        out[f.dim()] += l.mobius[l.top()][j];
    }
    out
}

/// Characteristic polynomial of the central arrangement in `C^{n+1}`.
pub fn cone_char_poly(a: &Arrangement) -> Vec<i64> {
    let proj = char_poly(&build_lattice(a));
    let mut out = vec![0i64; a.n + 2];
    for (d, c) in proj.iter().enumerate() {
        out[d + 1] = *c;
    }
    if a.is_essential() {
        out[0] = -proj.iter().sum::<i64>();
    }
    out
}

/// Value of an integer polynomial given by its coefficients.
pub fn evaluate(poly: &[i64], t: i64) -> i64 {
    poly.iter().rev().fold(0, |acc, c| acc * t + c)
}

/// The stratification of `P^n` by open flat strata.
pub fn strat_poset_from_arrangement(a: &Arrangement) -> LinearStratification {
    LinearStratification::from_generators(a.n, a.flats_of_hyperplanes()).expect("hyperplanes live in P^n")
}

/// Splayedness of the unions of two arrangements.
pub fn detect_splayed(a: &Arrangement, b: &Arrangement) -> Result<Verdict> {
    let sa = strat_poset_from_arrangement(a);
    let sb = strat_poset_from_arrangement(b);
    let mut verdict = is_splayed_pair(&sa, &a.union_indicator(&sa)?, &sb, &b.union_indicator(&sb)?)?;
    let (va, vb) = (a.variables(), b.variables());
    if verdict.holds && va.is_disjoint(&vb) {
        verdict.witness =
            Some(Witness::CoordinateSplit { first: va.into_iter().collect(), second: vb.into_iter().collect() });
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic_three_lines() -> Arrangement {
        Arrangement::from_ints(2, &[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 1]]).unwrap()
    }

    fn boolean(n: usize) -> Arrangement {
        let rows: Vec<Vec<i64>> = (0..=n).map(|i| (0..=n).map(|j| (i == j) as i64).collect()).collect();
        Arrangement::from_ints(n, &rows).unwrap()
    }

    #[test]
    fn validation() {
        assert!(Arrangement::from_ints(2, &[vec![1, 0, 0], vec![2, 0, 0]]).is_err());
        assert!(Arrangement::from_ints(2, &[vec![0, 0, 0]]).is_err());
        assert!(Arrangement::from_ints(2, &[vec![1, 0]]).is_err());
        let a = Arrangement::from_json(r#"{"n": 2, "hyperplanes": [["1", "-1/2", "0"]]}"#).unwrap();
        assert_eq!(Arrangement::from_json(&a.to_json()).unwrap(), a);
        assert!(Arrangement::from_json(r#"{"n": 1, "hyperplanes": [["1", "x"]]}"#).is_err());
    }

    #[test]
    fn lattice_examples() {
        let e = build_lattice(&Arrangement::empty(2));
        assert_eq!(e.len(), 1);
        assert_eq!(e.mobius(0, 0), 1);

        let two = build_lattice(&Arrangement::from_ints(2, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap());
        assert_eq!(two.len(), 4);
        let pt = two.index_of(&Flat::coordinate(2, &[0, 1]).unwrap()).unwrap();
        assert_eq!(two.mobius(two.top(), pt), 1);
        assert_eq!(two.flats()[pt].members, BTreeSet::from([0, 1]));

        let b = build_lattice(&boolean(2));
        let points: Vec<usize> = (0..b.len()).filter(|&i| b.flats()[i].dim() == 0).collect();
        assert_eq!(points.len(), 3);
        assert!(points.iter().all(|&p| b.mobius(0, p) == 1));
        assert!(b.verify_mobius());
    }

    #[test]
    fn characteristic_polynomials() {
        assert_eq!(char_poly(&build_lattice(&Arrangement::empty(3))), vec![0, 0, 0, 1]);
        let one = Arrangement::from_ints(3, &[vec![1, 2, 3, 4]]).unwrap();
        assert_eq!(char_poly(&build_lattice(&one)), vec![0, 0, -1, 1]);
        assert_eq!(char_poly(&build_lattice(&generic_three_lines())), vec![3, -3, 1]);
        assert_eq!(char_poly(&build_lattice(&boolean(2))), vec![3, -3, 1]);
        // Cone of the Boolean arrangement: (t-1)^3.
        assert_eq!(cone_char_poly(&boolean(2)), vec![-1, 3, -3, 1]);
    }

    #[test]
    fn deletion_restriction_on_three_lines() {
        let a = generic_three_lines();
        for i in 0..a.len() {
            let lhs = cone_char_poly(&a);
            let del = cone_char_poly(&a.deletion(i));
            let res = cone_char_poly(&a.restriction(i).unwrap());
            let rhs: Vec<i64> = (0..lhs.len()).map(|d| del[d] - res.get(d).copied().unwrap_or(0)).collect();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn restriction_merges_traces() {
        // Three concurrent lines restrict to one point on each of them.
        let a = Arrangement::from_ints(2, &[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]]).unwrap();
        assert_eq!(a.restriction(0).unwrap().len(), 1);
        assert!(!a.is_essential());
        assert!(!a.is_generic());
        assert!(generic_three_lines().is_generic());
    }

    #[test]
    fn stratification_examples() {
        let chi = |a: &Arrangement| -> Vec<(usize, i64)> {
            strat_poset_from_arrangement(a).poset().strata().iter().map(|s| (s.dim, s.chi_c)).collect()
        };
        assert_eq!(chi(&Arrangement::empty(2)), vec![(2, 3)]);
        assert_eq!(chi(&Arrangement::from_ints(2, &[vec![1, 0, 0]]).unwrap()), vec![(2, 1), (1, 2)]);
        assert_eq!(
            chi(&Arrangement::from_ints(2, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap()),
            vec![(2, 0), (1, 1), (1, 1), (0, 1)]
        );
    }

    #[test]
    fn splayed_detection() {
        let a = Arrangement::from_ints(3, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![1, 1, 0, 0]]).unwrap();
        let b = Arrangement::from_ints(3, &[vec![0, 0, 1, 0], vec![0, 0, 1, 3]]).unwrap();
        let v = detect_splayed(&a, &b).unwrap();
        assert!(v.holds);
        assert_eq!(v.witness, Some(Witness::CoordinateSplit { first: vec![0, 1], second: vec![2, 3] }));
        assert!(!detect_splayed(&a, &a).unwrap().holds);
        assert!(detect_splayed(&Arrangement::empty(3), &a).unwrap().holds);
    }
}
