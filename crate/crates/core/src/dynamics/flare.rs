//! Empirical flare certificates over a finite set of conjugacy classes.
//!
//! A certificate states that every enumerated hyperbolic class `g` with
//! `min_len <= |g| <= max_syllables` satisfies
//! `lambda |g| <= max(|phi^N(g)|, |phi^-N(g)|)` for cyclic syllable length.
//! This is evidence on finitely many classes, not a proof.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use super::enumerate::{cyclic_words, EnumerationBounds};
use super::DynamicsError;
use crate::automorphism::Automorphism;
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlareCounterexample {
    #[serde(serialize_with = "crate::serde_util::word")]
    pub g: Word,
    pub length: usize,
    pub forward: usize,
    pub backward: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FlareVerdict {
    Certificate {
        #[serde(serialize_with = "rational")]
        lambda: BigRational,
        n: usize,
        min_len: usize,
        max_len: usize,
    },
    Counterexamples {
        n_max: usize,
        total: usize,
        /// The first failures in enumeration order.
        examples: Vec<FlareCounterexample>,
    },
    Undecided {
        reason: String,
    },
}

fn rational<S: serde::Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlareReport {
    #[serde(flatten)]
    pub verdict: FlareVerdict,
    pub bounds: EnumerationBounds,
    pub classes: usize,
    pub note: &'static str,
}

pub const EMPIRICAL_NOTE: &str = "empirical evidence on enumerated classes, not a proof";
const MAX_EXAMPLES: usize = 16;

fn holds(lambda: &BigRational, len: usize, forward: usize, backward: usize) -> bool {
    lambda * BigRational::from_integer(BigInt::from(len)) <= BigRational::from_integer(BigInt::from(forward.max(backward)))
}

pub fn flare_certify(
    phi: &Automorphism,
    min_len: usize,
    bounds: &EnumerationBounds,
    n_max: usize,
    lambda: &BigRational,
) -> Result<FlareReport, DynamicsError> {
    phi.require_factor_preserving()?;
    if *lambda <= BigRational::one() {
        return Err(DynamicsError::InvalidLambda(lambda.to_string()));
    }
    let words = cyclic_words(phi.presentation(), bounds, min_len.max(1));
    let report = |verdict| FlareReport {
        verdict,
        bounds: *bounds,
        classes: words.len(),
        note: EMPIRICAL_NOTE,
    };
    if words.len() as u64 > bounds.limit {
        return Ok(report(FlareVerdict::Undecided {
            reason: format!("{} classes exceed the limit {}", words.len(), bounds.limit),
        }));
    }
    let inv = phi.inverse();
    let lengths: Vec<usize> = words.iter().map(Word::syllable_length).collect();
    let mut fronts: Vec<(Word, Word)> = words.iter().map(|g| (g.clone(), g.clone())).collect();
    let mut last: Vec<(usize, usize)> = lengths.iter().map(|&l| (l, l)).collect();
    for n in 1..=n_max {
        let stepped: Vec<((Word, Word), (usize, usize))> = fronts
            .par_iter()
            .map(|(f, b)| {
                let f = phi.apply(f).expect("same presentation");
                let b = inv.apply(b).expect("same presentation");
                let lens = (f.cyclic_syllable_length(), b.cyclic_syllable_length());
                ((f, b), lens)
            })
            .collect();
        (fronts, last) = stepped.into_iter().unzip();
        if lengths.iter().zip(&last).all(|(&len, &(f, b))| holds(lambda, len, f, b)) {
            return Ok(report(FlareVerdict::Certificate {
                lambda: lambda.clone(),
                n,
                min_len,
                max_len: bounds.max_syllables,
            }));
        }
    }
    let failures: Vec<FlareCounterexample> = words
        .iter()
        .zip(lengths.iter().zip(&last))
        .filter(|(_, (&len, &(f, b)))| !holds(lambda, len, f, b))
        .map(|(g, (&length, &(forward, backward)))| FlareCounterexample {
            g: g.clone(),
            length,
            forward,
            backward,
        })
        .collect();
    Ok(report(FlareVerdict::Counterexamples {
        n_max,
        total: failures.len(),
        examples: failures.into_iter().take(MAX_EXAMPLES).collect(),
    }))
}

/// Re-runs the inequality at the certificate's `(lambda, N)` on every class.
pub fn verify_flare_certificate(phi: &Automorphism, report: &FlareReport) -> bool {
    let FlareVerdict::Certificate { lambda, n, min_len, .. } = &report.verdict else {
        return false;
    };
    let inv = phi.inverse();
    cyclic_words(phi.presentation(), &report.bounds, (*min_len).max(1))
        .iter()
        .all(|g| {
            let f = phi.apply_power(*n as i64, g).expect("same presentation").cyclic_syllable_length();
            let b = inv.apply_power(*n as i64, g).expect("same presentation").cyclic_syllable_length();
            holds(lambda, g.syllable_length(), f, b)
        })
}
