//! Automorphisms of `G` preserving the free factor system `{[A_1], ..., [A_p]}`.
//!
//! An [`Automorphism`] is built from a generator image table together with the
//! table of its inverse. Validation checks that the two tables are mutually
//! inverse and extracts, for each factor `A_i`, the permutation `sigma` and the
//! conjugator `g_i` with `phi(A_i) = g_i A_sigma(i) g_i^-1`. `g_i` is kept in
//! canonical form: no trailing syllable in `A_sigma(i)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::matrix::IntegerMatrix;
use crate::words::{Generator, Presentation, Slot, Syllable, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutError {
    #[error("image table has {got} entries, expected {expected}")]
    TableSize { expected: usize, got: usize },
    #[error("not an automorphism: the tables are not inverse on {generator}")]
    NotAnAutomorphism { generator: String },
    #[error("not factor preserving at {generator}: {reason}")]
    NotFactorPreserving { generator: String, reason: String },
    #[error("the automorphism permutes factors (sigma = {sigma:?}); take a power first")]
    FactorsPermuted { sigma: Vec<usize> },
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Per-direction data: one of these describes `phi`, the other `phi^-1`.
#[derive(Debug)]
struct Table {
    images: Vec<Word>,
    sigma: Vec<usize>,
    conjugators: Vec<Word>,
    /// `n_sigma(i) x n_i` matrix of `ad_{g_i}^-1 . phi` restricted to `A_i`.
    factor_matrices: Vec<IntegerMatrix>,
}

impl Table {
    fn extract(pres: &Presentation, images: Vec<Word>) -> Result<Table, AutError> {
        let gens = pres.generators();
        let p = pres.num_factors();
        let mut sigma = Vec::with_capacity(p);
        let mut conjugators = Vec::with_capacity(p);
        let mut factor_matrices = Vec::with_capacity(p);
        for i in 0..p {
            let mut target: Option<(usize, Word)> = None;
            let mut columns = Vec::with_capacity(pres.factor_rank(i));
            for j in 0..pres.factor_rank(i) {
                let gen = Generator::Factor { factor: i, index: j };
                let image = &images[pres.generator_position(gen)?];
                let fail = |reason: &str| AutError::NotFactorPreserving {
                    generator: gen.to_string(),
                    reason: reason.to_string(),
                };
                let cyc = image.cyclic_normal_form().map_err(|_| fail("image is trivial"))?;
                let (k, vector) = match cyc.syllables() {
                    [Syllable::Factor { factor, exponents }] => (*factor, exponents.clone()),
                    _ => return Err(fail("image is not conjugate into a factor")),
                };
                let (u, _) = cyc.conjugator().split_trailing(Slot::Factor(k));
                match &target {
                    None => target = Some((k, u)),
                    Some((k0, u0)) => {
                        if *k0 != k {
                            return Err(fail("generators of one factor land in different factors"));
                        }
                        if *u0 != u {
                            return Err(fail("no common conjugator for the factor"));
                        }
                    }
                }
                columns.push(vector);
            }
            let (k, u) = target.expect("factors have positive rank");
            if pres.factor_rank(k) != pres.factor_rank(i) {
                return Err(AutError::NotFactorPreserving {
                    generator: format!("a{}", i + 1),
                    reason: "factor sent into a factor of different rank".into(),
                });
            }
            sigma.push(k);
            conjugators.push(u);
            factor_matrices.push(IntegerMatrix::from_columns(pres.factor_rank(k), &columns));
        }
        let mut seen = vec![false; p];
        for &k in &sigma {
            if std::mem::replace(&mut seen[k], true) {
                return Err(AutError::NotFactorPreserving {
                    generator: format!("a{}", k + 1),
                    reason: "two factors are sent into the same factor".into(),
                });
            }
        }
        debug_assert_eq!(gens.len(), images.len());
        Ok(Table {
            images,
            sigma,
            conjugators,
            factor_matrices,
        })
    }

    fn apply(&self, pres: &Presentation, w: &Word) -> Word {
        let mut parts: Vec<Word> = Vec::with_capacity(3 * w.syllable_length());
        let free_base = pres.abelianization_rank() - pres.free_rank();
        for s in w.syllables() {
            match s {
                Syllable::Factor { factor, exponents } => {
                    let g = &self.conjugators[*factor];
                    let image = self.factor_matrices[*factor].mul_vec(exponents);
                    let core = Word::from_normal(
                        pres,
                        vec![Syllable::Factor {
                            factor: self.sigma[*factor],
                            exponents: image,
                        }],
                    );
                    parts.push(g.clone());
                    parts.push(core);
                    parts.push(g.inverse());
                }
                Syllable::Free { letter, exponent } => {
                    parts.push(self.images[free_base + letter].pow(exponent));
                }
            }
        }
        Word::concat_all(pres, parts.iter())
    }
}

/// Generator-by-generator substitution, used before the tables are validated.
pub fn substitute(pres: &Presentation, images: &[Word], w: &Word) -> Word {
    let mut parts = Vec::new();
    for s in w.syllables() {
        match s {
            Syllable::Factor { factor, exponents } => {
                for (j, e) in exponents.iter().enumerate() {
                    if e.is_zero() {
                        continue;
                    }
                    let pos = pres
                        .generator_position(Generator::Factor { factor: *factor, index: j })
                        .expect("word matches presentation");
                    parts.push(images[pos].pow(e));
                }
            }
            Syllable::Free { letter, exponent } => {
                let pos = pres
                    .generator_position(Generator::Free { letter: *letter })
                    .expect("word matches presentation");
                parts.push(images[pos].pow(exponent));
            }
        }
    }
    Word::concat_all(pres, parts.iter())
}

/// A validated automorphism together with its inverse. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Automorphism {
    pres: Presentation,
    forward: Arc<Table>,
    backward: Arc<Table>,
}

impl PartialEq for Automorphism {
    fn eq(&self, other: &Self) -> bool {
        self.pres == other.pres && self.forward.images == other.forward.images
    }
}

impl Eq for Automorphism {}

impl Automorphism {
    /// Validates a pair of image tables indexed like [`Presentation::generators`].
    pub fn new(pres: &Presentation, images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Self, AutError> {
        Self::build(pres, images, inverse_images, true)
    }

    fn build(
        pres: &Presentation,
        images: Vec<Word>,
        inverse_images: Vec<Word>,
        verify_inverse: bool,
    ) -> Result<Self, AutError> {
        let gens = pres.generators();
        for table in [&images, &inverse_images] {
            if table.len() != gens.len() {
                return Err(AutError::TableSize {
                    expected: gens.len(),
                    got: table.len(),
                });
            }
            if table.iter().any(|w| w.presentation() != pres) {
                return Err(WordError::PresentationMismatch.into());
            }
        }
        if verify_inverse {
            for (pos, g) in gens.iter().enumerate() {
                let s = Word::generator(pres, *g)?;
                let there = substitute(pres, &inverse_images, &images[pos]);
                let back = substitute(pres, &images, &inverse_images[pos]);
                if there != s || back != s {
                    return Err(AutError::NotAnAutomorphism {
                        generator: g.to_string(),
                    });
                }
            }
        }
        let forward = Table::extract(pres, images)?;
        let backward = Table::extract(pres, inverse_images)?;
        for (i, m) in forward.factor_matrices.iter().enumerate() {
            if !m.determinant().abs().is_one() {
                return Err(AutError::NotAnAutomorphism {
                    generator: format!("a{}", i + 1),
                });
            }
        }
        Ok(Automorphism {
            pres: pres.clone(),
            forward: Arc::new(forward),
            backward: Arc::new(backward),
        })
    }

    pub fn identity(pres: &Presentation) -> Self {
        let images: Vec<Word> = pres
            .generators()
            .into_iter()
            .map(|g| Word::generator(pres, g).expect("own generator"))
            .collect();
        Self::build(pres, images.clone(), images, false).expect("identity is valid")
    }

    /// Inner automorphism `s -> g s g^-1`.
    pub fn inner(g: &Word) -> Self {
        let pres = g.presentation().clone();
        let gi = g.inverse();
        let gens = pres.generators();
        let conj = |h: &Word, s: &Word| Word::concat_all(&pres, [h, s, &h.inverse()]);
        let mut images = Vec::with_capacity(gens.len());
        let mut inverse_images = Vec::with_capacity(gens.len());
        for gen in gens {
            let s = Word::generator(&pres, gen).expect("own generator");
            images.push(conj(g, &s));
            inverse_images.push(conj(&gi, &s));
        }
        Self::build(&pres, images, inverse_images, false).expect("inner automorphisms are valid")
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn images(&self) -> &[Word] {
        &self.forward.images
    }

    pub fn inverse_images(&self) -> &[Word] {
        &self.backward.images
    }

    pub fn image_of(&self, g: Generator) -> Result<&Word, AutError> {
        Ok(&self.forward.images[self.pres.generator_position(g)?])
    }

    /// Factor permutation: `phi(A_i)` is conjugate to `A_sigma[i]`.
    pub fn sigma(&self) -> &[usize] {
        &self.forward.sigma
    }

    pub fn preserves_each_factor(&self) -> bool {
        self.forward.sigma.iter().enumerate().all(|(i, &k)| i == k)
    }

    pub(crate) fn require_factor_preserving(&self) -> Result<(), AutError> {
        if self.preserves_each_factor() {
            Ok(())
        } else {
            Err(AutError::FactorsPermuted {
                sigma: self.forward.sigma.clone(),
            })
        }
    }

    /// Canonical conjugator `g_i`.
    pub fn conjugator(&self, factor: usize) -> &Word {
        &self.forward.conjugators[factor]
    }

    pub fn conjugators(&self) -> &[Word] {
        &self.forward.conjugators
    }

    /// Matrix of `ad_{g_i}^-1 . phi` on `A_i = Z^{n_i}` (columns are images of generators).
    pub fn factor_matrix(&self, factor: usize) -> &IntegerMatrix {
        &self.forward.factor_matrices[factor]
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            pres: self.pres.clone(),
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    pub fn apply(&self, w: &Word) -> Result<Word, AutError> {
        if w.presentation() != &self.pres {
            return Err(WordError::PresentationMismatch.into());
        }
        Ok(self.forward.apply(&self.pres, w))
    }

    /// `phi^n(w)`; negative `n` uses the inverse table.
    pub fn apply_power(&self, n: i64, w: &Word) -> Result<Word, AutError> {
        if w.presentation() != &self.pres {
            return Err(WordError::PresentationMismatch.into());
        }
        let table = if n >= 0 { &self.forward } else { &self.backward };
        let mut cur = w.clone();
        for _ in 0..n.unsigned_abs() {
            cur = table.apply(&self.pres, &cur);
        }
        Ok(cur)
    }

    /// `self . other`, i.e. `s -> self(other(s))`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism, AutError> {
        if self.pres != other.pres {
            return Err(WordError::PresentationMismatch.into());
        }
        let images = other
            .forward
            .images
            .iter()
            .map(|w| self.forward.apply(&self.pres, w))
            .collect();
        let inverse_images = self
            .backward
            .images
            .iter()
            .map(|w| other.backward.apply(&self.pres, w))
            .collect();
        Self::build(&self.pres, images, inverse_images, false)
    }

    pub fn power(&self, n: i64) -> Automorphism {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut result = Automorphism::identity(&self.pres);
        let mut square = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose(&square).expect("same presentation");
            }
            k >>= 1;
            if k > 0 {
                square = square.compose(&square).expect("same presentation");
            }
        }
        result
    }

    /// Whether every factor restriction is, after conjugation by `g_i`, the identity.
    /// Returns the witnesses `g_i`.
    pub fn is_toral(&self) -> Result<(bool, Vec<Word>), AutError> {
        self.require_factor_preserving()?;
        let toral = self.forward.factor_matrices.iter().all(IntegerMatrix::is_identity);
        Ok((toral, self.forward.conjugators.clone()))
    }

    /// Per factor: does `M_i - I` have a nontrivial kernel?
    pub fn check_central_condition(&self) -> Result<Vec<bool>, AutError> {
        self.require_factor_preserving()?;
        Ok(self
            .forward
            .factor_matrices
            .iter()
            .map(|m| m.shift(&BigInt::one()).determinant().is_zero())
            .collect())
    }

    /// If `self` is inner, the element `g` with `self = ad_g`.
    pub fn inner_element(&self) -> Option<Word> {
        if !self.preserves_each_factor() || !self.forward.factor_matrices.iter().all(IntegerMatrix::is_identity) {
            return None;
        }
        let pres = &self.pres;
        let p = pres.num_factors();
        let k = pres.free_rank();
        let free_base = pres.abelianization_rank() - k;
        let with_leading = |c: &Word, r: &Word, slot: Slot| match r.split_leading(slot).0 {
            Some(a) => c * &Word::from_normal(pres, vec![a]),
            None => c.clone(),
        };
        let candidate = if p >= 2 {
            // g = g_0 a with g_0^-1 g_1 in a A_1.
            let c0 = &self.forward.conjugators[0];
            let between = &c0.inverse() * &self.forward.conjugators[1];
            let (lead, rest) = between.split_leading(Slot::Factor(0));
            if !rest.split_trailing(Slot::Factor(1)).0.is_identity() {
                return None;
            }
            match lead {
                Some(a) => c0 * &Word::from_normal(pres, vec![a]),
                None => c0.clone(),
            }
        } else if p == 1 && k >= 1 {
            // g = g_0 a with g_0^-1 phi(x_1) g_0 = a x_1 a^-1.
            let c0 = &self.forward.conjugators[0];
            let r = Word::concat_all(pres, [&c0.inverse(), &self.forward.images[free_base], c0]);
            with_leading(c0, &r, Slot::Factor(0))
        } else if p == 1 {
            self.forward.conjugators[0].clone()
        } else if k >= 2 {
            // g = c x_1^m where c conjugates x_1 onto phi(x_1).
            let cyc = self.forward.images[free_base].cyclic_normal_form().ok()?;
            let c = cyc.conjugator().clone();
            let r = Word::concat_all(pres, [&c.inverse(), &self.forward.images[free_base + 1], &c]);
            with_leading(&c, &r, Slot::Free(0))
        } else {
            Word::identity(pres)
        };
        let inner = Automorphism::inner(&candidate);
        (inner.forward.images == self.forward.images).then_some(candidate)
    }
}
