//! Bounded search for twinned pairs of factor conjugates.
//!
//! For `H = u A_i u^-1` and `K = v A_j v^-1`, `phi^m(H) = g H g^-1` and
//! `phi^m(K) = g K g^-1` have a common solution `g` exactly when
//! `G_i^-1 phi^m(u^-1 v) G_j` lies in `A_i (u^-1 v) A_j`, where `G_i` are the
//! conjugators of `phi^m`.

use rayon::prelude::*;
use serde::Serialize;

use super::enumerate::{reduced_words, EnumerationBounds};
use super::{DynamicsError, SearchReport, SearchVerdict};
use crate::automorphism::Automorphism;
use crate::words::{Slot, Syllable, Word};

/// The subgroup `u A_i u^-1`, with `u` not ending in `A_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FactorConjugate {
    #[serde(serialize_with = "crate::serde_util::word")]
    pub u: Word,
    /// Zero-based factor index; rendered one-based in reports.
    #[serde(serialize_with = "one_based")]
    pub factor: usize,
}

fn one_based<S: serde::Serializer>(i: &usize, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("A{}", i + 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwinWitness {
    pub h: FactorConjugate,
    pub k: FactorConjugate,
    pub m: usize,
    #[serde(serialize_with = "crate::serde_util::word")]
    pub g: Word,
}

/// Is `w` a single syllable of factor `i`?
fn in_factor(w: &Word, i: usize) -> bool {
    w.syllables().len() == 1 && w.syllables()[0].slot() == Slot::Factor(i)
}

/// Checks `phi^m(u A_i u^-1) = g u A_i u^-1 g^-1` on the generators of `A_i`.
///
/// Containment suffices: a conjugate of `A_i` inside another conjugate of `A_i`
/// is equal to it.
pub fn conjugates_factor(phi_m: &Automorphism, g: &Word, h: &FactorConjugate) -> bool {
    let pres = phi_m.presentation();
    let back = &(&h.u.inverse() * &g.inverse()) * &phi_m.apply(&h.u).expect("same presentation");
    let rank = pres.factor_rank(h.factor);
    (0..rank).all(|c| {
        let mut e = vec![0i64; rank];
        e[c] = 1;
        let x = Word::from_syllable(pres, Syllable::factor(h.factor, e)).expect("valid generator");
        let y = &(&back * &phi_m.apply(&x).expect("same presentation")) * &back.inverse();
        in_factor(&y, h.factor)
    })
}

impl TwinWitness {
    pub fn verify(&self, phi: &Automorphism) -> bool {
        let phi_m = phi.power(self.m as i64);
        self.h != self.k && conjugates_factor(&phi_m, &self.g, &self.h) && conjugates_factor(&phi_m, &self.g, &self.k)
    }
}

/// `u A_i u^-1 = v A_j v^-1`?
fn same_subgroup(h: &FactorConjugate, k: &FactorConjugate) -> bool {
    if h.factor != k.factor {
        return false;
    }
    let w = &h.u.inverse() * &k.u;
    w.is_identity() || in_factor(&w, h.factor)
}

/// Leading `A_i` syllable of `w` as a word.
fn leading(w: &Word, i: usize) -> Word {
    let pres = w.presentation();
    match w.split_leading(Slot::Factor(i)).0 {
        Some(s) => Word::from_syllable(pres, s).expect("valid"),
        None => Word::identity(pres),
    }
}

/// Tests one pair under `phi^m`, returning the common conjugator.
fn test_pair(
    phi_m: &Automorphism,
    images: &[Word],
    subgroups: &[FactorConjugate],
    a: usize,
    b: usize,
) -> Option<Word> {
    let (h, k) = (&subgroups[a], &subgroups[b]);
    let (i, j) = (h.factor, k.factor);
    let w = &h.u.inverse() * &k.u;
    let c = &(&phi_m.conjugator(i).inverse() * &(&images[a].inverse() * &images[b])) * phi_m.conjugator(j);
    let rep = |x: &Word| x.double_coset_rep(i, j).expect("factor in range");
    if rep(&c) != rep(&w) {
        return None;
    }
    // c = a_c r b_c and w = a_w r b_w, so c = (a_c a_w^-1) w (b_w^-1 b_c)
    let alpha = &leading(&c, i) * &leading(&w, i).inverse();
    Some(&(&(&images[a] * phi_m.conjugator(i)) * &alpha) * &h.u.inverse())
}

/// All subgroups `u A_i u^-1` with `u` in the bounds, deduplicated, in
/// enumeration order.
pub fn factor_conjugates(phi: &Automorphism, bounds: &EnumerationBounds) -> Vec<FactorConjugate> {
    let pres = phi.presentation();
    let words = reduced_words(pres, bounds);
    let mut out = Vec::new();
    for u in &words {
        for i in 0..pres.num_factors() {
            if u.last().is_some_and(|s| s.slot() == Slot::Factor(i)) {
                continue;
            }
            out.push(FactorConjugate { u: u.clone(), factor: i });
        }
    }
    out
}

/// Searches `m = 1..=m_max` and pairs of distinct factor conjugates with
/// conjugators in `bounds`.
pub fn twin_search(
    phi: &Automorphism,
    m_max: usize,
    bounds: &EnumerationBounds,
) -> Result<SearchReport<TwinWitness>, DynamicsError> {
    phi.require_factor_preserving()?;
    let started = std::time::Instant::now();
    let subgroups = factor_conjugates(phi, bounds);
    let n = subgroups.len();
    let pairs = (n * n.saturating_sub(1) / 2) as u64;
    if pairs * m_max as u64 > bounds.limit {
        return Ok(SearchReport {
            verdict: SearchVerdict::Undecided {
                reason: format!("{} pair tests exceed the limit {}", pairs * m_max as u64, bounds.limit),
            },
            bounds: *bounds,
            exponent_bound: m_max,
            examined: Some(0),
            elapsed: started.elapsed(),
        });
    }
    for m in 1..=m_max {
        let phi_m = phi.power(m as i64);
        let images: Vec<Word> = subgroups
            .par_iter()
            .map(|h| phi_m.apply(&h.u).expect("same presentation"))
            .collect();
        let hit = (0..n).into_par_iter().find_map_first(|a| {
            (a + 1..n).find_map(|b| {
                if same_subgroup(&subgroups[a], &subgroups[b]) {
                    return None;
                }
                test_pair(&phi_m, &images, &subgroups, a, b).map(|g| TwinWitness {
                    h: subgroups[a].clone(),
                    k: subgroups[b].clone(),
                    m,
                    g,
                })
            })
        });
        if let Some(w) = hit {
            debug_assert!(w.verify(phi));
            return Ok(SearchReport {
                verdict: SearchVerdict::Witness { witness: w },
                bounds: *bounds,
                exponent_bound: m_max,
                examined: None,
                elapsed: started.elapsed(),
            });
        }
    }
    Ok(SearchReport {
        verdict: SearchVerdict::Exhausted,
        bounds: *bounds,
        exponent_bound: m_max,
        examined: Some(pairs * m_max as u64),
        elapsed: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_map::tests::aut;
    use crate::text::render_word;

    fn intro_example() -> Automorphism {
        // Z^2 * Z^3 with an Anosov matrix on each factor
        aut(
            vec![2, 3],
            0,
            &["a1.1^2 a1.2", "a1.1 a1.2", "a2.2", "a2.3", "a2.1 a2.2"],
            &["a1.1 a1.2^-1", "a1.1^-1 a1.2^2", "a2.1^-1 a2.3", "a2.1", "a2.2"],
        )
    }

    #[test]
    fn introduction_factors_are_twinned() {
        let phi = intro_example();
        let r = twin_search(&phi, 2, &EnumerationBounds::new(2, 2)).unwrap();
        let w = match r.verdict {
            SearchVerdict::Witness { witness } => witness,
            v => panic!("{v:?}"),
        };
        assert_eq!((w.h.factor, w.k.factor, w.m), (0, 1, 1));
        assert!(w.h.u.is_identity() && w.k.u.is_identity() && w.g.is_identity());
        assert!(w.verify(&phi));
    }

    #[test]
    fn conjugated_factor_with_growing_conjugator_exhausts() {
        // A1 fixed, A2 -> x1 A2 x1^-1, x1 -> x1 x2 a1.1, x2 -> x1
        let phi = aut(
            vec![1, 1],
            2,
            &["a1.1", "x1 a2.1 x1^-1", "x1 x2 a1.1", "x1"],
            &["a1.1", "x2^-1 a2.1 x2", "x2", "x2^-1 x1 a1.1^-1"],
        );
        let r = twin_search(&phi, 3, &EnumerationBounds::new(2, 1)).unwrap();
        assert_eq!(r.verdict, SearchVerdict::Exhausted);
    }

    #[test]
    fn fibonacci_mixing_twins_at_second_power() {
        // with x1 -> x1 x2, x2 -> x1: phi^2(x1^-1 A2 x1) = A2 and phi^2(x2 A1 x2^-1) = x1 x2 A1 x2^-1 x1^-1
        let phi = aut(
            vec![1, 1],
            2,
            &["a1.1", "x1 a2.1 x1^-1", "x1 x2", "x1"],
            &["a1.1", "x2^-1 a2.1 x2", "x2", "x2^-1 x1"],
        );
        let r = twin_search(&phi, 2, &EnumerationBounds::new(1, 1)).unwrap();
        let w = r.witness().expect("twinned pair");
        assert_eq!(w.m, 2);
        assert_eq!(render_word(&w.g), "x1");
        assert!(w.verify(&phi));
    }

    #[test]
    fn twist_twins_recover_conjugator() {
        // phi|A1 = id, phi|A2 = ad_{a1.1}: g = a1.1 works for (A1, A2)
        let phi = crate::graph_map::tests::toral_twist();
        let r = twin_search(&phi, 1, &EnumerationBounds::new(1, 1)).unwrap();
        let w = match r.verdict {
            SearchVerdict::Witness { witness } => witness,
            v => panic!("{v:?}"),
        };
        assert!(w.verify(&phi));
        assert_eq!(render_word(&w.g), "a1.1");
    }

    #[test]
    fn equal_subgroups_are_not_pairs() {
        let phi = intro_example();
        let p = phi.presentation();
        let h = FactorConjugate { u: Word::identity(p), factor: 0 };
        let k = FactorConjugate {
            u: crate::text::parse_word("a1.1", p).unwrap(),
            factor: 0,
        };
        assert!(same_subgroup(&h, &k));
    }
}
