//! Orbit length sequences and their growth classification.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::DynamicsError;
use crate::automorphism::Automorphism;
use crate::words::Word;

/// Lengths of the cyclic reductions of `phi^n(g)` for `n = 0..=n_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitLengths {
    pub syllables: Vec<usize>,
    #[serde(serialize_with = "crate::serde_util::bigints")]
    pub letters: Vec<BigInt>,
    /// Total factor-exponent magnitude (L1 mass of the factor syllables).
    #[serde(serialize_with = "crate::serde_util::bigints")]
    pub mass: Vec<BigInt>,
    /// First `(a, b)` with `a < b` and `[phi^a(g)] = [phi^b(g)]`, if seen.
    pub period: Option<(usize, usize)>,
}

pub fn orbit_lengths(phi: &Automorphism, g: &Word, n_max: usize) -> Result<OrbitLengths, DynamicsError> {
    phi.require_factor_preserving()?;
    if g.is_identity() {
        return Err(DynamicsError::EmptyWord);
    }
    let mut out = OrbitLengths {
        syllables: Vec::with_capacity(n_max + 1),
        letters: Vec::with_capacity(n_max + 1),
        mass: Vec::with_capacity(n_max + 1),
        period: None,
    };
    let mut classes = Vec::with_capacity(n_max + 1);
    let mut cur = g.clone();
    for n in 0..=n_max {
        let core = cur.cyclic_normal_form()?.as_word();
        out.syllables.push(core.syllable_length());
        out.letters.push(core.letter_length());
        out.mass.push(core.factor_mass());
        let canon = cur.cyclic_normal_form()?.canonical_rotation();
        if out.period.is_none() {
            if let Some(a) = classes.iter().position(|c| *c == canon) {
                out.period = Some((a, n));
            }
        }
        classes.push(canon);
        if n < n_max {
            cur = phi.apply(&cur)?;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthKind {
    Bounded,
    Polynomial { degree: i64 },
    Exponential { rate: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthVerdict {
    #[serde(flatten)]
    pub kind: GrowthKind,
    /// False only for exactly detected bounded growth.
    pub heuristic: bool,
    pub sequence: Vec<String>,
    pub log_slope: f64,
    pub log_r2: f64,
    pub loglog_slope: f64,
    pub loglog_r2: f64,
}

/// Least squares fit; returns `(slope, r^2)`.
fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

const MIN_LEN: usize = 8;
const R2_EXPONENTIAL: f64 = 0.999;

/// Classifies a length sequence indexed from `n = 0`. `period` is an exactly
/// detected repetition of the underlying conjugacy class.
pub fn classify_growth(seq: &[BigInt], period: Option<(usize, usize)>) -> Result<GrowthVerdict, DynamicsError> {
    if seq.len() < MIN_LEN {
        return Err(DynamicsError::TooShort { len: seq.len(), min: MIN_LEN });
    }
    let vals: Vec<f64> = seq.iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect();
    let half = seq.len() / 2;
    let idx: Vec<usize> = (half..seq.len()).filter(|&n| vals[n] > 0.0).collect();
    let xs: Vec<f64> = idx.iter().map(|&n| n as f64).collect();
    let lx: Vec<f64> = idx.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = idx.iter().map(|&n| vals[n].ln()).collect();
    let (log_slope, log_r2) = if idx.len() >= 2 { fit(&xs, &ly) } else { (0.0, 0.0) };
    let (loglog_slope, loglog_r2) = if idx.len() >= 2 { fit(&lx, &ly) } else { (0.0, 0.0) };
    let tail = &seq[half..];
    let constant_tail = tail.windows(2).all(|w| w[0] == w[1]);
    let increasing_tail = tail.windows(2).all(|w| w[0] < w[1]);
    let (kind, heuristic) = if period.is_some() {
        (GrowthKind::Bounded, false)
    } else if constant_tail {
        (GrowthKind::Bounded, true)
    } else if increasing_tail && log_slope > 0.0 && log_r2 >= R2_EXPONENTIAL && log_r2 >= loglog_r2 {
        (GrowthKind::Exponential { rate: log_slope.exp() }, true)
    } else {
        (
            GrowthKind::Polynomial {
                degree: loglog_slope.round() as i64,
            },
            true,
        )
    };
    Ok(GrowthVerdict {
        kind,
        heuristic,
        sequence: seq.iter().map(ToString::to_string).collect(),
        log_slope,
        log_r2,
        loglog_slope,
        loglog_r2,
    })
}

/// Orbit lengths of `g` classified by syllable length, falling back to letter
/// length and then factor mass when syllable length is eventually constant.
pub fn classify_orbit(phi: &Automorphism, g: &Word, n_max: usize) -> Result<(OrbitLengths, GrowthVerdict), DynamicsError> {
    let orbit = orbit_lengths(phi, g, n_max)?;
    let syl: Vec<BigInt> = orbit.syllables.iter().map(|&x| BigInt::from(x)).collect();
    let mut verdict = classify_growth(&syl, orbit.period)?;
    for seq in [&orbit.letters, &orbit.mass] {
        if verdict.kind != GrowthKind::Bounded || !verdict.heuristic {
            break;
        }
        verdict = classify_growth(seq, orbit.period)?;
    }
    Ok((orbit, verdict))
}
