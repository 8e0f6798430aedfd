//! Seeded random instances whose hypotheses hold by construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrangements::{strat_poset_from_arrangement, Arrangement};
use crate::error::{Error, Result};
use crate::linalg::{rank, Flat, Q};
use crate::microlocal::{is_noncharacteristic_map, support, LinearMap};
use crate::strata::{ConstructibleFunction, LinearStratification};

const COEFF_RANGE: i64 = 5;
const MAX_DRAWS: usize = 10_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_form<R: Rng>(rng: &mut R, width: usize, vars: &[usize]) -> Vec<Q> {
    loop {
        let mut v = vec![Q::from_integer(0.into()); width];
        for &j in vars {
            v[j] = Q::from_integer(rng.gen_range(-COEFF_RANGE..=COEFF_RANGE).into());
        }
        if vars.iter().any(|&j| v[j] != Q::from_integer(0.into())) {
            return v;
        }
    }
}

/// `k` hyperplanes of `P^n` in general position.
pub fn generic_arrangement<R: Rng>(rng: &mut R, n: usize, k: usize) -> Result<Arrangement> {
    if n == 0 && k > 0 {
        return Err(Error::InvalidArrangement("P^0 has no hyperplanes".into()));
    }
    let vars: Vec<usize> = (0..=n).collect();
    for _ in 0..MAX_DRAWS {
        let rows = (0..k).map(|_| random_form(rng, n + 1, &vars)).collect();
        if let Ok(a) = Arrangement::new(n, rows) {
            if a.is_generic() {
                return Ok(a);
            }
        }
    }
    Err(Error::InvalidArrangement(format!("no generic arrangement of {k} hyperplanes in P^{n} found")))
}

/// Two arrangements of `k` hyperplanes each whose union is in general position.
pub fn generic_arrangement_pair<R: Rng>(rng: &mut R, n: usize, k: usize) -> Result<(Arrangement, Arrangement)> {
    let all = generic_arrangement(rng, n, 2 * k)?;
    let rows = all.hyperplanes();
    Ok((Arrangement::new(n, rows[..k].to_vec())?, Arrangement::new(n, rows[k..].to_vec())?))
}

fn arrangement_on<R: Rng>(rng: &mut R, n: usize, vars: &[usize]) -> Arrangement {
    // Forms in |vars| variables: at most one hyperplane when only one variable is free.
    let max = if vars.len() == 1 { 1 } else { vars.len() + 1 };
    let k = rng.gen_range(1..=max);
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut draws = 0;
    while rows.len() < k && draws < MAX_DRAWS {
        draws += 1;
        let v = random_form(rng, n + 1, vars);
        if rows.iter().all(|r| rank(&[r.clone(), v.clone()]) == 2) {
            rows.push(v);
        }
    }
    Arrangement::new(n, rows).expect("distinct forms")
}

/// Arrangements on complementary sets of homogeneous coordinates.
pub fn splayed_coordinate_pair<R: Rng>(rng: &mut R, n: usize) -> Result<(Arrangement, Arrangement)> {
    if n == 0 {
        return Err(Error::InvalidArrangement("P^0 has no coordinate split".into()));
    }
    let mut vars: Vec<usize> = (0..=n).collect();
    vars.shuffle(rng);
    let cut = rng.gen_range(1..=n);
    let (mut first, mut second) = (vars[..cut].to_vec(), vars[cut..].to_vec());
    first.sort_unstable();
    second.sort_unstable();
    Ok((arrangement_on(rng, n, &first), arrangement_on(rng, n, &second)))
}

/// `P^0 ⊂ P^1 ⊂ … ⊂ P^n`.
pub fn flag_of_flats(n: usize) -> LinearStratification {
    LinearStratification::flag(n)
}

/// Random terms `(F, c_F)` over a subset of the flats, `c_F ∈ [-3, 3]`.
pub fn random_flat_terms<R: Rng>(rng: &mut R, strat: &LinearStratification) -> Vec<(Flat, i64)> {
    let mut terms = Vec::new();
    for f in strat.flats() {
        if rng.gen_bool(0.5) {
            terms.push((f.clone(), rng.gen_range(-3..=3)));
        }
    }
    terms
}

/// `Σ c_F 1_F` for [`random_flat_terms`].
pub fn random_flat_function<R: Rng>(rng: &mut R, strat: &LinearStratification) -> ConstructibleFunction {
    let terms = random_flat_terms(rng, strat);
    strat.combination(&terms).expect("flats of the stratification")
}

/// A random function that is not identically zero.
pub fn random_nonzero_flat_function<R: Rng>(rng: &mut R, strat: &LinearStratification) -> ConstructibleFunction {
    loop {
        let f = random_flat_function(rng, strat);
        if !f.is_zero() {
            return f;
        }
    }
}

/// A random full-rank `(k+1) × (n+1)` matrix.
pub fn random_embedding_matrix<R: Rng>(rng: &mut R, k: usize, n: usize) -> Vec<Vec<Q>> {
    assert!(k <= n);
    let vars: Vec<usize> = (0..=n).collect();
    loop {
        let m: Vec<Vec<Q>> = (0..=k).map(|_| random_form(rng, n + 1, &vars)).collect();
        if rank(&m) == k + 1 {
            return m;
        }
    }
}

/// An embedding `P^k → P^n` that is non-characteristic for `supp CC(γ)`.
pub fn random_transversal_embedding<R: Rng>(
    rng: &mut R,
    k: usize,
    strat: &LinearStratification,
    gamma: &ConstructibleFunction,
) -> Result<LinearMap> {
    let s = support(gamma, strat.euler())?;
    for _ in 0..MAX_DRAWS {
        let f = LinearMap::embedding(random_embedding_matrix(rng, k, strat.n()))?;
        if is_noncharacteristic_map(&f, &s)?.holds {
            return Ok(f);
        }
    }
    Err(Error::InvalidMap("no transversal embedding found".into()))
}

/// A generic arrangement in `P^n` with a random flat-generated function on it.
pub fn random_arrangement_function<R: Rng>(
    rng: &mut R,
    n: usize,
    k: usize,
) -> Result<(Arrangement, LinearStratification, ConstructibleFunction)> {
    let a = generic_arrangement(rng, n, k)?;
    let s = strat_poset_from_arrangement(&a);
    let f = random_flat_function(rng, &s);
    Ok((a, s, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangements::detect_splayed;

    #[test]
    fn deterministic_given_seed() {
        let a = generic_arrangement_pair(&mut rng(7), 2, 2).unwrap();
        let b = generic_arrangement_pair(&mut rng(7), 2, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generic_pair_is_generic() {
        let (a, b) = generic_arrangement_pair(&mut rng(7), 2, 2).unwrap();
        assert_eq!((a.len(), b.len()), (2, 2));
        let union = Arrangement::new(2, a.hyperplanes().iter().chain(b.hyperplanes()).cloned().collect()).unwrap();
        assert!(union.is_generic());
    }

    #[test]
    fn splayed_pair_uses_disjoint_variables() {
        let (a, b) = splayed_coordinate_pair(&mut rng(1), 3).unwrap();
        assert!(a.variables().is_disjoint(&b.variables()));
        assert!(detect_splayed(&a, &b).unwrap().holds);
    }

    #[test]
    fn flag_shape() {
        assert_eq!(flag_of_flats(3).len(), 4);
    }

    #[test]
    fn transversal_embeddings_are_transversal() {
        let mut r = rng(3);
        let (_, s, f) = random_arrangement_function(&mut r, 3, 3).unwrap();
        let map = random_transversal_embedding(&mut r, 2, &s, &f).unwrap();
        assert!(is_noncharacteristic_map(&map, &support(&f, s.euler()).unwrap()).unwrap().holds);
    }
}
