//! Exact rational linear algebra for linear subspaces of projective space.
//!
//! A projective flat `F ⊂ P^n` is stored through the row space of linear
//! forms vanishing on it, kept in reduced row-echelon form so that two flats
//! are equal exactly when their stored rows are equal. The same row space is
//! the conormal fibre of `F` at any of its points, which is what the
//! transversality tests in `microlocal` consume.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let t = s.trim();
    let parsed = match t.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
            let den: BigInt = den.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Q::new(num, den)
        }
        None => Q::from_integer(t.parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?),
    };
    Ok(parsed)
}

pub fn format_rational(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Reduced row-echelon form; zero rows are dropped.
pub fn rref(mut rows: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivot_row = 0;
    for col in 0..width {
        let Some(found) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let inv = rows[pivot_row][col].recip();
        for v in rows[pivot_row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..rows.len() {
            if r == pivot_row || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            let pivot = rows[pivot_row][col..width].to_vec();
            for (x, p) in rows[r][col..width].iter_mut().zip(&pivot) {
                *x -= &factor * p;
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    rows
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    rref(rows.to_vec()).len()
}

/// Basis of `{x : rows · x = 0}`.
pub fn null_space(rows: &[Vec<Q>], width: usize) -> Vec<Vec<Q>> {
    let reduced = rref(rows.to_vec());
    let pivots: Vec<usize> =
        reduced.iter().map(|r| r.iter().position(|v| !v.is_zero()).expect("rref rows are nonzero")).collect();
    let mut basis = Vec::new();
    for free in (0..width).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); width];
        v[free] = Q::one();
        for (row, &p) in reduced.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// A nonzero vector lying in both row spaces, if one exists.
pub fn common_vector(a: &[Vec<Q>], b: &[Vec<Q>]) -> Option<Vec<Q>> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let width = a[0].len();
    // Columns of the stacked system are the rows of a and -b.
    let stacked: Vec<&Vec<Q>> = a.iter().chain(b.iter()).collect();
    let transposed: Vec<Vec<Q>> = (0..width)
        .map(|c| {
            stacked
                .iter()
                .enumerate()
                .map(|(i, row)| if i < a.len() { row[c].clone() } else { -row[c].clone() })
                .collect()
        })
        .collect();
    for coeffs in null_space(&transposed, stacked.len()) {
        let mut v = vec![Q::zero(); width];
        for (lambda, row) in coeffs.iter().zip(a) {
            for (dst, x) in v.iter_mut().zip(row) {
                *dst += lambda * x;
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            return Some(normalize_integral(v));
        }
    }
    None
}

/// Scales a vector to coprime integers with a positive leading entry.
pub fn normalize_integral(v: Vec<Q>) -> Vec<Q> {
    use num_integer::Integer;
    let mut lcm = BigInt::one();
    for x in &v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v;
    }
    let sign = ints.iter().find(|x| !x.is_zero()).map_or(BigInt::one(), |x| x.signum());
    ints.into_iter().map(|x| Q::from_integer(x / &g * &sign)).collect()
}

/// A nonempty linear subspace of `P^n`, identified by the reduced row space of
/// the linear forms that vanish on it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flat {
    n: usize,
    rows: Vec<Vec<Q>>,
}

impl Flat {
    pub fn ambient(n: usize) -> Self {
        Flat { n, rows: Vec::new() }
    }

    pub fn from_rows(n: usize, rows: Vec<Vec<Q>>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != n + 1) {
            return Err(Error::Dimension(format!("linear form of length {} in P^{n} (expected {})", bad.len(), n + 1)));
        }
        let rows = rref(rows);
        if rows.len() > n {
            return Err(Error::EmptyFlat);
        }
        Ok(Flat { n, rows })
    }

    /// Flat cut out by coordinate hyperplanes `x_i = 0`.
    pub fn coordinate(n: usize, vars: &[usize]) -> Result<Self> {
        let rows = vars.iter().map(|&i| (0..=n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
        Flat::from_rows(n, rows)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n - self.rows.len()
    }

    pub fn codim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Q>] {
        &self.rows
    }

    pub fn is_ambient(&self) -> bool {
        self.rows.is_empty()
    }

    /// Intersection; `None` when it is empty.
    pub fn meet(&self, other: &Flat) -> Option<Flat> {
        debug_assert_eq!(self.n, other.n);
        let rows: Vec<Vec<Q>> = self.rows.iter().chain(&other.rows).cloned().collect();
        Flat::from_rows(self.n, rows).ok()
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Flat) -> bool {
        let mut rows = other.rows.clone();
        rows.extend(self.rows.iter().cloned());
        rank(&rows) == other.rows.len()
    }

    /// Preimage under the linear map `P^k → P^n`, `y ↦ Aᵀ y`, where `matrix`
    /// is the `(k+1) × (n+1)` matrix `A`.
    pub fn preimage(&self, matrix: &[Vec<Q>]) -> Option<Flat> {
        let k = matrix.len() - 1;
        let rows = self
            .rows
            .iter()
            .map(|r| matrix.iter().map(|a| a.iter().zip(r).map(|(x, y)| x * y).sum()).collect())
            .collect();
        Flat::from_rows(k, rows).ok()
    }

    /// Linear span of the flat as `dim + 1` vectors in `Q^{n+1}`.
    pub fn span(&self) -> Vec<Vec<Q>> {
        null_space(&self.rows, self.n + 1)
    }

    /// Canonical string key, stable across runs.
    pub fn key(&self) -> String {
        let rows: Vec<String> =
            self.rows.iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>().join(",")).collect();
        format!("P{}[{}]", self.n, rows.join(";"))
    }
}

impl fmt::Debug for Flat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Flat(dim {}, {})", self.dim(), self.key())
    }
}

/// Serialized as `{"n": int, "rows": [["p/q", ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatDoc {
    pub n: usize,
    pub rows: Vec<Vec<String>>,
}

impl From<&Flat> for FlatDoc {
    fn from(f: &Flat) -> Self {
        FlatDoc { n: f.n, rows: f.rows.iter().map(|r| r.iter().map(format_rational).collect()).collect() }
    }
}

impl TryFrom<&FlatDoc> for Flat {
    type Error = Error;

    fn try_from(doc: &FlatDoc) -> Result<Flat> {
        let rows = doc
            .rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Flat::from_rows(doc.n, rows)
    }
}

pub fn is_zero_vector(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn max_abs_numerator(v: &[Q]) -> BigInt {
    v.iter().map(|x| x.numer().abs()).max().unwrap_or_default()
}
