//! Reference computations that work directly with flats and truncated
//! polynomials in `Z[h]/(h^{n+1})`, bypassing stratifications and Euler
//! obstruction tables.

#![allow(dead_code)]

use csm_core::linalg::Flat;

pub fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    let mut r = 1i64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Product in `Z[h]/(h^{n+1})`, coefficients indexed by the power of `h`.
pub fn poly_mul(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
    let mut out = vec![0; n + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= n {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// `h^shift (1 + s h)^e` truncated to degree `n`, for `e ≥ 0`.
pub fn shifted_power(n: usize, shift: usize, s: i64, e: i64) -> Vec<i64> {
    let mut out = vec![0; n + 1];
    for j in 0..=e {
        let d = shift + j as usize;
        if d <= n {
            out[d] = binom(e, j) * s.pow(j as u32);
        }
    }
    out
}

/// Cohomology polynomial to homology coefficients: `h^c ↦ [P^{n-c}]`.
pub fn to_homology(p: &[i64]) -> Vec<i64> {
    p.iter().rev().copied().collect()
}

/// `c_*(Σ c_F 1_F)` as a polynomial: `Σ c_F h^{n-d}(1+h)^{d+1}`.
pub fn csm_poly(n: usize, terms: &[(Flat, i64)]) -> Vec<i64> {
    let mut out = vec![0; n + 1];
    for (f, c) in terms {
        let d = f.dim();
        for (i, v) in shifted_power(n, n - d, 1, d as i64 + 1).iter().enumerate() {
            out[i] += c * v;
        }
    }
    out
}

/// Terms of `α·β` from terms of `α` and `β`.
pub fn product_terms(a: &[(Flat, i64)], b: &[(Flat, i64)]) -> Vec<(Flat, i64)> {
    let mut out = Vec::new();
    for (f, c) in a {
        for (g, d) in b {
            if let Some(m) = f.meet(g) {
                out.push((m, c * d));
            }
        }
    }
    out
}

/// `χ(Σ c_F 1_F) = Σ c_F (dim F + 1)`.
pub fn chi(terms: &[(Flat, i64)]) -> i64 {
    terms.iter().map(|(f, c)| c * (f.dim() as i64 + 1)).sum()
}

/// Both sides of the ambient intersection formula, as homology coefficients.
pub fn intersection_sides(n: usize, a: &[(Flat, i64)], b: &[(Flat, i64)]) -> (Vec<i64>, Vec<i64>) {
    let lhs = poly_mul(&csm_poly(n, a), &csm_poly(n, b), n);
    let rhs = poly_mul(&shifted_power(n, 0, 1, n as i64 + 1), &csm_poly(n, &product_terms(a, b)), n);
    (to_homology(&lhs), to_homology(&rhs))
}

/// `c(T*P^k) ∩ [P^k]` pushed into `P^n`, as homology coefficients.
pub fn cotangent_class_of_flat(n: usize, k: usize) -> Vec<i64> {
    to_homology(&shifted_power(n, n - k, -1, k as i64 + 1))
}

pub fn poly_eval(p: &[i64], t: i64) -> i64 {
    p.iter().rev().fold(0, |acc, c| acc * t + c)
}
