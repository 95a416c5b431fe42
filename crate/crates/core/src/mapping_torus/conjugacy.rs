//! Bounded conjugacy test for outer classes.
//!
//! Invariants that are preserved by conjugation in `Out(G)` are compared first;
//! any mismatch distinguishes the pair. Otherwise a bounded family of candidate
//! conjugators `psi` is tried, and for each the composite `phi2^-1 psi phi1 psi^-1`
//! is tested exactly for being inner.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::{abelianized_action, mapping_torus_abelianization, smith_normal_form};
use crate::automorphism::{AutError, Automorphism};
use crate::words::{Generator, Presentation, Syllable, Word};

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    /// Syllable bound for partial-conjugation candidates.
    pub conj_len: usize,
    /// Entry bound for factor substitutions (matrices in `GL(n_i, Z)`).
    pub substitution_bound: i64,
    /// Upper limit on candidate conjugators tried.
    pub max_candidates: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            conj_len: 2,
            substitution_bound: 1,
            max_candidates: 20_000,
        }
    }
}

/// `phi2 = ad_inner . psi . phi1 . psi^-1`.
#[derive(Clone, Debug)]
pub struct ConjugacyWitness {
    pub psi: Automorphism,
    pub inner: Word,
}

impl ConjugacyWitness {
    pub fn verify(&self, phi1: &Automorphism, phi2: &Automorphism) -> bool {
        let Ok(conj) = self
            .psi
            .compose(phi1)
            .and_then(|a| a.compose(&self.psi.inverse()))
            .and_then(|a| Automorphism::inner(&self.inner).compose(&a))
        else {
            return false;
        };
        conj.images() == phi2.images()
    }
}

#[derive(Clone, Debug)]
pub enum ConjugacyOutcome {
    Conjugate {
        witness: ConjugacyWitness,
        warnings: Vec<String>,
    },
    Distinguished {
        invariant: String,
        left: String,
        right: String,
        warnings: Vec<String>,
    },
    Undecided {
        candidates_tried: usize,
        warnings: Vec<String>,
    },
}

/// A named conjugacy invariant with a printable value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Invariant {
    pub name: String,
    pub value: String,
}

fn fmt_ints(xs: &[BigInt]) -> String {
    format!("[{}]", xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

/// Invariants of the outer class of `phi` (with `sigma = id`).
pub fn outer_invariants(phi: &Automorphism) -> Vec<Invariant> {
    let mut out = Vec::new();
    let torus = mapping_torus_abelianization(phi);
    out.push(Invariant {
        name: "mapping torus abelianization".into(),
        value: format!("torsion {} free rank {}", fmt_ints(&torus.torsion), torus.free_rank),
    });
    let ab = abelianized_action(phi);
    out.push(Invariant {
        name: "characteristic polynomial of the abelianized action".into(),
        value: fmt_ints(&ab.characteristic_polynomial()),
    });
    for c in -2i64..=2 {
        let d = smith_normal_form(&ab.shift(&BigInt::from(c))).diagonal();
        out.push(Invariant {
            name: format!("Smith invariants of Phi_ab - ({c})I"),
            value: fmt_ints(&d),
        });
    }
    // Factor restrictions, as a multiset so that factor relabelling is harmless.
    let mut factors: Vec<String> = (0..phi.presentation().num_factors())
        .map(|i| {
            let m = phi.factor_matrix(i);
            let coker = smith_normal_form(&m.shift(&BigInt::from(1))).diagonal();
            format!(
                "rank {} charpoly {} coker(M-I) {}",
                m.rows(),
                fmt_ints(&m.characteristic_polynomial()),
                fmt_ints(&coker)
            )
        })
        .collect();
    factors.sort();
    out.push(Invariant {
        name: "factor restrictions".into(),
        value: factors.join("; "),
    });
    out
}

fn warnings_for(phi1: &Automorphism, phi2: &Automorphism) -> Vec<String> {
    let mut w = Vec::new();
    for (name, phi) in [("first", phi1), ("second", phi2)] {
        if let Ok((false, _)) = phi.is_toral() {
            w.push(format!("{name} automorphism is not toral"));
        }
    }
    if phi1.presentation().abelian_ranks().iter().any(|&n| n < 2) {
        w.push("some factor is cyclic".into());
    }
    w
}

/// Words of at most `len` syllables with exponent entries in `{-1, 0, 1}` avoiding factor `skip`.
fn short_words(pres: &Presentation, len: usize, skip: usize) -> Vec<Word> {
    let mut letters: Vec<Syllable> = Vec::new();
    for f in 0..pres.num_factors() {
        if f == skip {
            continue;
        }
        let n = pres.factor_rank(f);
        let count = 3usize.pow(n.min(3) as u32);
        for code in 1..count {
            let mut c = code;
            let mut v = vec![BigInt::zero(); n];
            for slot in v.iter_mut().take(n.min(3)) {
                *slot = BigInt::from((c % 3) as i64 - 1);
                c /= 3;
            }
            if v.iter().any(|x| !x.is_zero()) {
                letters.push(Syllable::Factor { factor: f, exponents: v });
            }
        }
    }
    for l in 0..pres.free_rank() {
        letters.push(Syllable::free(l, 1));
        letters.push(Syllable::free(l, -1));
    }
    let mut layer: Vec<Vec<Syllable>> = vec![Vec::new()];
    let mut out = Vec::new();
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &layer {
            for s in &letters {
                if w.last().is_some_and(|t| t.slot() == s.slot()) {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(s.clone());
                out.push(Word::reduce(pres, w2.clone()).expect("valid syllables"));
                next.push(w2);
            }
        }
        layer = next;
    }
    out
}

fn partial_conjugation(pres: &Presentation, factor: usize, w: &Word) -> Automorphism {
    let gens = pres.generators();
    let mut fwd = Vec::with_capacity(gens.len());
    let mut bwd = Vec::with_capacity(gens.len());
    let wi = w.inverse();
    for g in gens {
        let s = Word::generator(pres, g).expect("own generator");
        match g {
            Generator::Factor { factor: f, .. } if f == factor => {
                fwd.push(Word::concat_all(pres, [w, &s, &wi]));
                bwd.push(Word::concat_all(pres, [&wi, &s, w]));
            }
            _ => {
                fwd.push(s.clone());
                bwd.push(s);
            }
        }
    }
    Automorphism::new(pres, fwd, bwd).expect("partial conjugations are automorphisms")
}

/// Small elements of `GL(n, Z)` together with their inverses.
fn small_gl(n: usize, bound: i64) -> Vec<(crate::matrix::IntegerMatrix, crate::matrix::IntegerMatrix)> {
    use crate::matrix::IntegerMatrix;
    if n > 2 {
        return Vec::new();
    }
    let width = (2 * bound + 1) as usize;
    let mut out = Vec::new();
    for code in 0..width.pow((n * n) as u32) {
        let mut c = code;
        let mut m = IntegerMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = BigInt::from((c % width) as i64 - bound);
                c /= width;
            }
        }
        let det = m.determinant();
        if det == BigInt::from(1) || det == BigInt::from(-1) {
            if m.is_identity() {
                continue;
            }
            let s = smith_normal_form(&m);
            // m^-1 = v u since u m v = I
            let inv = &s.v * &s.u;
            out.push((m, inv));
        }
    }
    out
}

fn factor_substitution(
    pres: &Presentation,
    factor: usize,
    m: &crate::matrix::IntegerMatrix,
    inv: &crate::matrix::IntegerMatrix,
) -> Automorphism {
    let gens = pres.generators();
    let mut fwd = Vec::with_capacity(gens.len());
    let mut bwd = Vec::with_capacity(gens.len());
    for g in gens {
        match g {
            Generator::Factor { factor: f, index } if f == factor => {
                let mk = |mat: &crate::matrix::IntegerMatrix| {
                    Word::reduce(
                        pres,
                        [Syllable::Factor {
                            factor,
                            exponents: mat.column(index),
                        }],
                    )
                    .expect("valid syllable")
                };
                fwd.push(mk(m));
                bwd.push(mk(inv));
            }
            _ => {
                let s = Word::generator(pres, g).expect("own generator");
                fwd.push(s.clone());
                bwd.push(s);
            }
        }
    }
    Automorphism::new(pres, fwd, bwd).expect("GL substitutions are automorphisms")
}

fn candidates(pres: &Presentation, opts: &PipelineOptions) -> Vec<Automorphism> {
    let mut out = vec![Automorphism::identity(pres)];
    for f in 0..pres.num_factors() {
        for w in short_words(pres, opts.conj_len, f) {
            if out.len() >= opts.max_candidates {
                return out;
            }
            out.push(partial_conjugation(pres, f, &w));
        }
    }
    for f in 0..pres.num_factors() {
        for (m, inv) in small_gl(pres.factor_rank(f), opts.substitution_bound) {
            if out.len() >= opts.max_candidates {
                return out;
            }
            out.push(factor_substitution(pres, f, &m, &inv));
        }
    }
    out
}

/// Tests whether `phi1` and `phi2` are conjugate in `Out(G)`, up to the bounds in `opts`.
pub fn conjugacy_pipeline(
    phi1: &Automorphism,
    phi2: &Automorphism,
    opts: &PipelineOptions,
) -> Result<ConjugacyOutcome, AutError> {
    if phi1.presentation() != phi2.presentation() {
        return Err(crate::words::WordError::PresentationMismatch.into());
    }
    phi1.require_factor_preserving()?;
    phi2.require_factor_preserving()?;
    let warnings = warnings_for(phi1, phi2);
    for (a, b) in outer_invariants(phi1).into_iter().zip(outer_invariants(phi2)) {
        if a.value != b.value {
            return Ok(ConjugacyOutcome::Distinguished {
                invariant: a.name,
                left: a.value,
                right: b.value,
                warnings,
            });
        }
    }
    let pres = phi1.presentation();
    let phi2_inv = phi2.inverse();
    let cands = candidates(pres, opts);
    for psi in &cands {
        let chi = phi2_inv.compose(&psi.compose(phi1)?.compose(&psi.inverse())?)?;
        if let Some(g) = chi.inner_element() {
            // psi phi1 psi^-1 = phi2 ad_g = ad_{phi2(g)} phi2
            let inner = phi2.apply(&g)?.inverse();
            let witness = ConjugacyWitness {
                psi: psi.clone(),
                inner,
            };
            if witness.verify(phi1, phi2) {
                return Ok(ConjugacyOutcome::Conjugate { witness, warnings });
            }
        }
    }
    Ok(ConjugacyOutcome::Undecided {
        candidates_tried: cands.len(),
        warnings,
    })
}
