//! Integer Chow/homology models of `P^n`, `P^n × P^m` and projective
//! completions of vector bundles over `P^n`.
//!
//! Homology classes are integer vectors in the basis `[P^0], …, [P^n]`;
//! cohomology classes are truncated polynomials in the hyperplane class `h`.
//! Every class "on a subspace" is represented by its pushforward to the
//! ambient projective space.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || k > n || n < 0 {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i64, |acc, i| acc * (n - i) / (i + 1))
}

/// `Σ a_i [P^i]` in `H_*(P^n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GradedDoc")]
pub struct GradedClass {
    n: usize,
    coeffs: Vec<i64>,
}

#[derive(Deserialize)]
struct GradedDoc {
    n: usize,
    coeffs: Vec<i64>,
}

impl TryFrom<GradedDoc> for GradedClass {
    type Error = Error;
    fn try_from(doc: GradedDoc) -> Result<Self> {
        GradedClass::new(doc.n, doc.coeffs)
    }
}

impl GradedClass {
    pub fn new(n: usize, coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() != n + 1 {
            return Err(Error::Dimension(format!("class on P^{n} needs {} coefficients, got {}", n + 1, coeffs.len())));
        }
        Ok(GradedClass { n, coeffs })
    }

    pub fn zero(n: usize) -> Self {
        GradedClass { n, coeffs: vec![0; n + 1] }
    }

    /// `[P^i]`; zero when `i > n`.
    pub fn linear(n: usize, i: usize) -> Self {
        let mut c = Self::zero(n);
        if i <= n {
            c.coeffs[i] = 1;
        }
        c
    }

    pub fn fundamental(n: usize) -> Self {
        Self::linear(n, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Degree of the zero-dimensional part.
    pub fn degree(&self) -> i64 {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i64) -> Self {
        GradedClass { n: self.n, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("P^{} vs P^{}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(GradedClass { n: self.n, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    /// Intersection product: `[P^i]·[P^j] = [P^{i+j-n}]`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.n;
        let mut out = vec![0; n + 1];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| **a != 0) {
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= n {
                    out[i + j - n] += a * b;
                }
            }
        }
        Ok(GradedClass { n, coeffs: out })
    }

    /// Flips the sign of the `[P^i]`-coefficient for odd `i`.
    pub fn sign_dual(&self) -> Self {
        GradedClass {
            n: self.n,
            coeffs: self.coeffs.iter().enumerate().map(|(i, c)| if i % 2 == 0 { *c } else { -c }).collect(),
        }
    }

    /// Gysin pullback along a linear `P^k ⊂ P^n`: `[P^j] ↦ [P^{j-(n-k)}]`.
    pub fn restrict_to_linear(&self, k: usize) -> Result<Self> {
        if k > self.n {
            return Err(Error::Dimension(format!("cannot restrict P^{} to P^{k}", self.n)));
        }
        let shift = self.n - k;
        Ok(GradedClass { n: k, coeffs: (0..=k).map(|j| self.coeffs[j + shift]).collect() })
    }

    /// Pushforward along a linear `P^n ⊂ P^N`.
    pub fn push_to_linear(&self, big: usize) -> Result<Self> {
        if big < self.n {
            return Err(Error::Dimension(format!("cannot push P^{} into P^{big}", self.n)));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(big + 1, 0);
        Ok(GradedClass { n: big, coeffs })
    }
}

impl Add for &GradedClass {
    type Output = GradedClass;
    fn add(self, rhs: &GradedClass) -> GradedClass {
        self.try_add(rhs).expect("graded classes on different P^n")
    }
}

impl Sub for &GradedClass {
    type Output = GradedClass;
    fn sub(self, rhs: &GradedClass) -> GradedClass {
        self + &rhs.scale(-1)
    }
}

impl Neg for &GradedClass {
    type Output = GradedClass;
    fn neg(self) -> GradedClass {
        self.scale(-1)
    }
}

impl AddAssign<&GradedClass> for GradedClass {
    fn add_assign(&mut self, rhs: &GradedClass) {
        *self = &*self + rhs;
    }
}

/// `Σ b_c h^c` in `H^*(P^n)`, truncated above degree `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CohClass {
    n: usize,
    coeffs: Vec<i64>,
}

impl CohClass {
    /// Truncates or zero-pads `coeffs` to degrees `0..=n`.
    pub fn new(n: usize, mut coeffs: Vec<i64>) -> Self {
        coeffs.resize(n + 1, 0);
        CohClass { n, coeffs }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(n, vec![])
    }

    pub fn one(n: usize) -> Self {
        Self::new(n, vec![1])
    }

    /// `h^c`.
    pub fn h_pow(n: usize, c: usize) -> Self {
        let mut v = vec![0; c + 1];
        v[c] = 1;
        Self::new(n, v)
    }

    /// `(1 + s·h)^e` for any integer exponent, as a truncated power series.
    pub fn binomial_power(n: usize, s: i64, e: i64) -> Self {
        // Generalized binomial coefficients, computed by the ratio recurrence.
        let mut coeffs = vec![0i64; n + 1];
        let mut term: i128 = 1;
        for (k, slot) in coeffs.iter_mut().enumerate() {
            *slot = term as i64;
            let k = k as i128;
            term = term * (e as i128 - k) / (k + 1) * s as i128;
        }
        CohClass { n, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, c: usize) -> i64 {
        self.coeffs.get(c).copied().unwrap_or(0)
    }

    pub fn scale(&self, k: i64) -> Self {
        CohClass { n: self.n, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("P^{} vs P^{}", self.n, other.n)));
        }
        Ok(CohClass { n: self.n, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("P^{} vs P^{}", self.n, other.n)));
        }
        let n = self.n;
        let mut out = vec![0; n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Ok(CohClass { n, coeffs: out })
    }

    /// Multiplicative inverse; requires constant term `±1`.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0 != 1 && c0 != -1 {
            return Err(Error::Unsupported(format!("constant term {c0} is not a unit")));
        }
        let mut inv = vec![0i64; self.n + 1];
        inv[0] = c0;
        for k in 1..=self.n {
            let s: i64 = (1..=k).map(|i| self.coeffs[i] * inv[k - i]).sum();
            inv[k] = -c0 * s;
        }
        Ok(CohClass { n: self.n, coeffs: inv })
    }

    /// Restriction to a linear `P^k`.
    pub fn restrict(&self, k: usize) -> Self {
        Self::new(k, self.coeffs[..=k.min(self.n)].to_vec())
    }

    /// Same polynomial viewed on `P^m`, truncated or padded.
    pub fn extend(&self, m: usize) -> Self {
        Self::new(m, self.coeffs.clone())
    }

    /// Chern class of the dual bundle: `c_i ↦ (-1)^i c_i`.
    pub fn dual(&self) -> Self {
        CohClass {
            n: self.n,
            coeffs: self.coeffs.iter().enumerate().map(|(i, c)| if i % 2 == 0 { *c } else { -c }).collect(),
        }
    }

    /// `h^c ∩ [P^i] = [P^{i-c}]`.
    pub fn cap(&self, x: &GradedClass) -> Result<GradedClass> {
        if self.n != x.n {
            return Err(Error::Dimension(format!("cap of P^{} class on P^{}", self.n, x.n)));
        }
        let mut out = vec![0; x.n + 1];
        for (c, b) in self.coeffs.iter().enumerate().filter(|(_, b)| **b != 0) {
            for i in c..=x.n {
                out[i - c] += b * x.coeffs[i];
            }
        }
        Ok(GradedClass { n: x.n, coeffs: out })
    }
}

impl Mul for &CohClass {
    type Output = CohClass;
    fn mul(self, rhs: &CohClass) -> CohClass {
        self.try_mul(rhs).expect("cohomology classes on different P^n")
    }
}

/// `c(TP^n) = (1+h)^{n+1}`.
pub fn chern_tangent(n: usize) -> CohClass {
    CohClass::binomial_power(n, 1, n as i64 + 1)
}

/// `c(T*P^n) = (1-h)^{n+1}`.
pub fn chern_cotangent(n: usize) -> CohClass {
    CohClass::binomial_power(n, -1, n as i64 + 1)
}

pub fn cap(u: &CohClass, x: &GradedClass) -> Result<GradedClass> {
    u.cap(x)
}

pub fn mul(x: &GradedClass, y: &GradedClass) -> Result<GradedClass> {
    x.mul(y)
}

/// `Σ a_{ij} [P^i × P^j]` in `H_*(P^n × P^m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BiGradedClass {
    n: usize,
    m: usize,
    coeffs: Vec<Vec<i64>>,
}

impl BiGradedClass {
    pub fn new(n: usize, m: usize, coeffs: Vec<Vec<i64>>) -> Result<Self> {
        if coeffs.len() != n + 1 || coeffs.iter().any(|r| r.len() != m + 1) {
            return Err(Error::Dimension(format!(
                "bi-graded class on P^{n} x P^{m} needs a {}x{} matrix",
                n + 1,
                m + 1
            )));
        }
        Ok(BiGradedClass { n, m, coeffs })
    }

    pub fn zero(n: usize, m: usize) -> Self {
        BiGradedClass { n, m, coeffs: vec![vec![0; m + 1]; n + 1] }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn coeffs(&self) -> &[Vec<i64>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> i64 {
        self.coeffs[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i64) -> Self {
        BiGradedClass {
            n: self.n,
            m: self.m,
            coeffs: self.coeffs.iter().map(|r| r.iter().map(|c| c * k).collect()).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.dims() != other.dims() {
            return Err(Error::Dimension(format!("{:?} vs {:?}", self.dims(), other.dims())));
        }
        Ok(BiGradedClass {
            n: self.n,
            m: self.m,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        })
    }

    /// Pushforward along the projection to the second factor.
    pub fn push_second(&self) -> GradedClass {
        let mut out = GradedClass::zero(self.m);
        for j in 0..=self.m {
            out.coeffs[j] = self.coeffs[0][j];
        }
        out
    }
}

/// Cross product `x × y`.
pub fn cross(x: &GradedClass, y: &GradedClass) -> BiGradedClass {
    BiGradedClass {
        n: x.n,
        m: y.n,
        coeffs: x.coeffs.iter().map(|a| y.coeffs.iter().map(|b| a * b).collect()).collect(),
    }
}

/// Gysin pullback along the diagonal `P^n → P^n × P^n`, pushed to `P^n`.
pub fn diagonal_gysin(z: &BiGradedClass) -> Result<GradedClass> {
    if z.n != z.m {
        return Err(Error::Dimension(format!("diagonal of P^{} x P^{}", z.n, z.m)));
    }
    let n = z.n;
    let mut out = vec![0; n + 1];
    for i in 0..=n {
        for j in 0..=n {
            if i + j >= n {
                out[i + j - n] += z.coeffs[i][j];
            }
        }
    }
    Ok(GradedClass { n, coeffs: out })
}

/// `Σ b_{cd} h_1^c h_2^d` in `H^*(P^n × P^m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiCohClass {
    n: usize,
    m: usize,
    coeffs: Vec<Vec<i64>>,
}

impl BiCohClass {
    /// `u × v` for classes pulled back from each factor.
    pub fn exterior(u: &CohClass, v: &CohClass) -> Self {
        BiCohClass {
            n: u.n,
            m: v.n,
            coeffs: u.coeffs.iter().map(|a| v.coeffs.iter().map(|b| a * b).collect()).collect(),
        }
    }

    pub fn cap(&self, x: &BiGradedClass) -> Result<BiGradedClass> {
        if (self.n, self.m) != x.dims() {
            return Err(Error::Dimension(format!("cap of {:?} class on {:?}", (self.n, self.m), x.dims())));
        }
        let mut out = BiGradedClass::zero(self.n, self.m);
        for (c, row) in self.coeffs.iter().enumerate() {
            for (d, b) in row.iter().enumerate().filter(|(_, b)| **b != 0) {
                for i in c..=self.n {
                    for j in d..=self.m {
                        out.coeffs[i - c][j - d] += b * x.coeffs[i][j];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// A homology class of a projective or bi-projective ambient space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AmbientClass {
    Projective(GradedClass),
    Biprojective(BiGradedClass),
}

impl AmbientClass {
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (AmbientClass::Projective(a), AmbientClass::Projective(b)) => Ok(AmbientClass::Projective(a.try_add(b)?)),
            (AmbientClass::Biprojective(a), AmbientClass::Biprojective(b)) => {
                Ok(AmbientClass::Biprojective(a.try_add(b)?))
            }
            _ => Err(Error::Dimension("projective vs bi-projective class".into())),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        match self {
            AmbientClass::Projective(a) => AmbientClass::Projective(a.scale(k)),
            AmbientClass::Biprojective(a) => AmbientClass::Biprojective(a.scale(k)),
        }
    }

    pub fn as_projective(&self) -> Option<&GradedClass> {
        match self {
            AmbientClass::Projective(a) => Some(a),
            AmbientClass::Biprojective(_) => None,
        }
    }

    pub fn as_biprojective(&self) -> Option<&BiGradedClass> {
        match self {
            AmbientClass::Biprojective(a) => Some(a),
            AmbientClass::Projective(_) => None,
        }
    }

    /// Dimension of the top nonzero homological degree (total degree for products).
    pub fn top_dimension(&self) -> Option<usize> {
        match self {
            AmbientClass::Projective(a) => a.coeffs.iter().rposition(|&c| c != 0),
            AmbientClass::Biprojective(a) => (0..=a.n)
                .flat_map(|i| (0..=a.m).map(move |j| (i, j)))
                .filter(|&(i, j)| a.coeffs[i][j] != 0)
                .map(|(i, j)| i + j)
                .max(),
        }
    }
}

/// A class in the Chow ring of the projective completion `P(V ⊕ 1) → P^n`
/// of a rank-`r` bundle `V`.
///
/// Stored as `coeffs[a][b]` against `h^a ζ^b`, `0 ≤ a ≤ n`, `0 ≤ b ≤ r`,
/// where `ζ = c_1(O(1))`. Higher powers of `ζ` are eliminated with
/// `ζ^{r+1} = -Σ_{i≥1} c_i(V) ζ^{r+1-i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleRingClass {
    n: usize,
    bundle: CohClass,
    rank: usize,
    coeffs: Vec<Vec<i64>>,
}

impl BundleRingClass {
    /// Validates a matrix that is claimed to already be in normal form.
    pub fn from_normal_form(bundle: CohClass, rank: usize, coeffs: Vec<Vec<i64>>) -> Result<Self> {
        let n = bundle.n;
        if coeffs.len() != n + 1 || coeffs.iter().any(|r| r.len() != rank + 1) {
            return Err(Error::NormalForm(format!("expected a {}x{} matrix over h^a zeta^b", n + 1, rank + 1)));
        }
        if bundle.coeffs[0] != 1 {
            return Err(Error::NormalForm("total Chern class must start with 1".into()));
        }
        if bundle.coeffs.iter().skip(rank + 1).any(|&c| c != 0) {
            return Err(Error::NormalForm(format!("bundle of rank {rank} has Chern classes above degree {rank}")));
        }
        Ok(BundleRingClass { n, bundle, rank, coeffs })
    }

    /// Reduces an arbitrary polynomial `Σ p[a][b] h^a ζ^b` to normal form.
    pub fn from_polynomial(bundle: &CohClass, rank: usize, poly: &[Vec<i64>]) -> Result<Self> {
        let n = bundle.n;
        let mut z = Self::from_normal_form(bundle.clone(), rank, vec![vec![0; rank + 1]; n + 1])?;
        for (a, row) in poly.iter().enumerate().take(n + 1) {
            for (b, &c) in row.iter().enumerate().filter(|(_, c)| **c != 0) {
                let term = z.monomial(a, b).scale(c);
                z = z.add(&term);
            }
        }
        Ok(z)
    }

    pub fn zero_like(&self) -> Self {
        BundleRingClass {
            n: self.n,
            bundle: self.bundle.clone(),
            rank: self.rank,
            coeffs: vec![vec![0; self.rank + 1]; self.n + 1],
        }
    }

    pub fn one_like(&self) -> Self {
        self.monomial(0, 0)
    }

    /// Normal form of `h^a ζ^b` (any `b`).
    pub fn monomial(&self, a: usize, b: usize) -> Self {
        let mut out = self.zero_like();
        if a > self.n {
            return out;
        }
        if b <= self.rank {
            out.coeffs[a][b] = 1;
            return out;
        }
        out.coeffs[a][self.rank] = 1;
        for _ in self.rank..b {
            out = out.times_zeta();
        }
        out
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bundle(&self) -> &CohClass {
        &self.bundle
    }

    pub fn coeffs(&self) -> &[Vec<i64>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|&c| c == 0)
    }

    fn compatible(&self, other: &Self) -> bool {
        self.n == other.n && self.rank == other.rank && self.bundle == other.bundle
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.compatible(other), "bundle ring classes over different bundles");
        let mut out = self.clone();
        for (ra, rb) in out.coeffs.iter_mut().zip(&other.coeffs) {
            for (x, y) in ra.iter_mut().zip(rb) {
                *x += y;
            }
        }
        out
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().flatten().for_each(|c| *c *= k);
        out
    }

    /// Multiplication by `h^c` pulled back from the base.
    fn times_h_pow(&self, c: usize) -> Self {
        let mut out = self.zero_like();
        for a in 0..=self.n {
            if a + c <= self.n {
                out.coeffs[a + c] = self.coeffs[a].clone();
            }
        }
        out
    }

    pub fn times_zeta(&self) -> Self {
        let r = self.rank;
        let mut out = self.zero_like();
        for a in 0..=self.n {
            for b in 0..r {
                out.coeffs[a][b + 1] += self.coeffs[a][b];
            }
            let top = self.coeffs[a][r];
            if top == 0 {
                continue;
            }
            // h^a ζ^{r+1} = -Σ_{i=1}^{r} c_i(V) h^a ζ^{r+1-i}
            for i in 1..=r.min(self.n) {
                let ci = self.bundle.coeff(i);
                if ci != 0 && a + i <= self.n {
                    out.coeffs[a + i][r + 1 - i] -= top * ci;
                }
            }
        }
        out
    }

    /// Multiplication by a base class `u`.
    pub fn times_base(&self, u: &CohClass) -> Self {
        let mut out = self.zero_like();
        for (c, coef) in u.coeffs.iter().enumerate().filter(|(_, k)| **k != 0) {
            out = out.add(&self.times_h_pow(c).scale(*coef));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert!(self.compatible(other), "bundle ring classes over different bundles");
        let mut out = self.zero_like();
        for (a, row) in other.coeffs.iter().enumerate() {
            for (b, &c) in row.iter().enumerate().filter(|(_, c)| **c != 0) {
                let mut term = self.times_h_pow(a);
                for _ in 0..b {
                    term = term.times_zeta();
                }
                out = out.add(&term.scale(c));
            }
        }
        out
    }

    /// Proper pushforward to `H_*(P^n)`; in normal form only `ζ^r` survives
    /// (`π_*ζ^r = 1`, lower powers have too small fibre degree).
    pub fn pushforward(&self) -> GradedClass {
        let n = self.n;
        let mut out = GradedClass::zero(n);
        for a in 0..=n {
            out.coeffs[n - a] = self.coeffs[a][self.rank];
        }
        out
    }

    /// Degree of the zero-dimensional part (for classes of top codimension).
    pub fn degree(&self) -> i64 {
        self.pushforward().degree()
    }
}

pub fn bundle_pushforward(z: &BundleRingClass) -> GradedClass {
    z.pushforward()
}
