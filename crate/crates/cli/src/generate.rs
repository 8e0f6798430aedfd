//! Case files whose hypotheses hold by construction.

use std::str::FromStr;

use csm_core::arrangements::Arrangement;
use csm_core::chow::binomial;
use csm_core::generate::{generic_arrangement_pair, rng, splayed_coordinate_pair};
use csm_core::linalg::format_rational;
use rand::Rng;
use serde_json::Value;

use crate::casefile::{CaseFile, CaseKind, CaseSpec, Expectations, MapDoc, ModelDoc, Side, Term};
use crate::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    GenericArrangementPair,
    SplayedCoordinatePair,
    FlagOfFlats,
}

impl FromStr for Family {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic-arrangement-pair" => Ok(Family::GenericArrangementPair),
            "splayed-coordinate-pair" => Ok(Family::SplayedCoordinatePair),
            "flag-of-flats" => Ok(Family::FlagOfFlats),
            other => Err(CliError::Usage(format!("unknown family {other:?}"))),
        }
    }
}

fn model(a: &Arrangement) -> ModelDoc {
    ModelDoc {
        n: a.n(),
        hyperplanes: Some(a.hyperplanes().iter().map(|r| r.iter().map(format_rational).collect()).collect()),
        flats: None,
    }
}

/// One to three terms, each over a meet of at most `max_meet` generators.
fn random_terms<R: Rng>(rng: &mut R, generators: usize, max_meet: usize) -> Vec<Term> {
    let count = rng.gen_range(1..=3);
    (0..count)
        .map(|_| {
            let size = rng.gen_range(0..=max_meet.min(generators));
            let mut meet: Vec<usize> = rand::seq::index::sample(rng, generators, size).into_vec();
            meet.sort_unstable();
            let coeff = loop {
                let c = rng.gen_range(-3..=3);
                if c != 0 {
                    break c;
                }
            };
            Term { meet, coeff }
        })
        .collect()
}

fn case(id: String, kind: CaseKind, first: Side, second: Option<Side>, expect: Option<Expectations>) -> CaseSpec {
    CaseSpec { id, kind, first, second, map: None, expect }
}

fn pair_cases(
    prefix: &str,
    a: &Arrangement,
    b: &Arrangement,
    check: CaseKind,
    fa: Vec<Term>,
    fb: Vec<Term>,
) -> Vec<CaseSpec> {
    let plain = |m: &Arrangement| Side { model: model(m), function: None };
    let with = |m: &Arrangement, t: Vec<Term>| Side { model: model(m), function: Some(t) };
    let holds = Some(Expectations { holds: Some(true), ..Expectations::default() });
    vec![
        case(format!("{prefix}-check"), check, plain(a), Some(plain(b)), holds),
        case(format!("{prefix}-intersection"), CaseKind::IntersectionFormula, plain(a), Some(plain(b)), None),
        case(
            format!("{prefix}-intersection-weighted"),
            CaseKind::IntersectionFormula,
            with(a, fa.clone()),
            Some(with(b, fb.clone())),
            None,
        ),
        case(format!("{prefix}-index"), CaseKind::IndexFormula, with(a, fa), Some(with(b, fb)), None),
    ]
}

/// `c_*(1_{P^k})` in `P^n` as `[P^i]` coefficients: `binom(k+1, i+1)` for `i ≤ k`.
fn flat_csm(n: usize, k: usize) -> Value {
    Value::from((0..=n).map(|i| if i <= k { binomial(k as i64 + 1, i as i64 + 1) } else { 0 }).collect::<Vec<_>>())
}

fn flag_cases(n: usize, seed: u64) -> Vec<CaseSpec> {
    // Flat k is cut out by x_{k+1} = … = x_n = 0.
    let flats: Vec<Vec<Vec<String>>> = (0..n)
        .map(|k| (k + 1..=n).map(|j| (0..=n).map(|c| if c == j { "1" } else { "0" }.to_string()).collect()).collect())
        .collect();
    let doc = ModelDoc { n, hyperplanes: None, flats: Some(flats) };
    let prefix = format!("flag-of-flats-n{n}-s{seed}");
    let mut cases: Vec<CaseSpec> = (0..=n)
        .map(|k| {
            // The empty meet is P^n itself.
            let meet = if k == n { vec![] } else { vec![k] };
            let side = Side { model: doc.clone(), function: Some(vec![Term { meet, coeff: 1 }]) };
            let expect = Expectations { class: Some(flat_csm(n, k)), ..Expectations::default() };
            case(format!("{prefix}-csm-{k}"), CaseKind::CsmCompute, side, None, Some(expect))
        })
        .collect();
    if n >= 1 {
        let mut r = rng(seed);
        let terms = random_terms(&mut r, n, 1);
        cases.push(CaseSpec {
            id: format!("{prefix}-vrr-projection"),
            kind: CaseKind::Vrr,
            first: Side { model: doc, function: Some(terms) },
            second: None,
            map: Some(MapDoc::Projection { fiber: 1, base: n }),
            expect: None,
        });
    }
    cases
}

/// Case file for `family` in `P^n`; `k` is the number of hyperplanes per
/// side for generic pairs.
pub fn generate(family: Family, n: usize, k: usize, seed: u64) -> Result<CaseFile> {
    let cases = match family {
        Family::GenericArrangementPair => {
            let mut r = rng(seed);
            let (a, b) = generic_arrangement_pair(&mut r, n, k)?;
            let fa = random_terms(&mut r, a.len(), n);
            let fb = random_terms(&mut r, b.len(), n);
            let prefix = format!("generic-arrangement-pair-n{n}-k{k}-s{seed}");
            pair_cases(&prefix, &a, &b, CaseKind::NoncharacteristicCheck, fa, fb)
        }
        Family::SplayedCoordinatePair => {
            let mut r = rng(seed);
            let (a, b) = splayed_coordinate_pair(&mut r, n)?;
            let fa = random_terms(&mut r, a.len(), a.len());
            let fb = random_terms(&mut r, b.len(), b.len());
            let prefix = format!("splayed-coordinate-pair-n{n}-s{seed}");
            pair_cases(&prefix, &a, &b, CaseKind::SplayedCheck, fa, fb)
        }
        Family::FlagOfFlats => flag_cases(n, seed),
    };
    Ok(CaseFile { cases })
}
