//! Normal forms for elements of `G = A_1 * ... * A_p * F_k`, each `A_i` free abelian.
//!
//! An element is stored as its free-product normal form: a sequence of
//! syllables, each either a nonzero exponent vector in one factor `A_i = Z^{n_i}`
//! or a nonzero power of one free letter, with no two adjacent syllables in the
//! same factor or on the same letter. Exponents are arbitrary precision.
//!
//! Indices are 0-based in the API. The text grammar (see [`crate::text`]) is
//! 1-based.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Mul;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("a presentation needs at least one factor or free letter")]
    EmptyPresentation,
    #[error("factor {factor} has rank 0")]
    ZeroRankFactor { factor: usize },
    #[error("{0} is out of range for this presentation")]
    IndexOutOfRange(String),
    #[error("exponent vector for factor a{} has length {got}, expected {expected}", factor + 1)]
    ExponentLength {
        factor: usize,
        expected: usize,
        got: usize,
    },
    #[error("words belong to different presentations")]
    PresentationMismatch,
    #[error("the empty word has no cyclic normal form")]
    EmptyWord,
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct PresentationData {
    abelian_ranks: Vec<usize>,
    free_rank: usize,
}

/// The group `Z^{n_1} * ... * Z^{n_p} * F_k`. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Presentation(Arc<PresentationData>);

impl Presentation {
    pub fn new(abelian_ranks: Vec<usize>, free_rank: usize) -> Result<Self, WordError> {
        if abelian_ranks.is_empty() && free_rank == 0 {
            return Err(WordError::EmptyPresentation);
        }
        if let Some(factor) = abelian_ranks.iter().position(|&n| n == 0) {
            return Err(WordError::ZeroRankFactor { factor });
        }
        Ok(Self(Arc::new(PresentationData {
            abelian_ranks,
            free_rank,
        })))
    }

    pub fn abelian_ranks(&self) -> &[usize] {
        &self.0.abelian_ranks
    }

    pub fn num_factors(&self) -> usize {
        self.0.abelian_ranks.len()
    }

    pub fn factor_rank(&self, factor: usize) -> usize {
        self.0.abelian_ranks[factor]
    }

    pub fn free_rank(&self) -> usize {
        self.0.free_rank
    }

    /// Scott complexity `(k, p)`: free rank, then number of factors.
    pub fn scott_complexity(&self) -> (usize, usize) {
        (self.free_rank(), self.num_factors())
    }

    /// Rank of the abelianization, `sum n_i + k`.
    pub fn abelianization_rank(&self) -> usize {
        self.0.abelian_ranks.iter().sum::<usize>() + self.0.free_rank
    }

    /// Offset of factor `i`'s coordinates inside the abelianization.
    pub fn factor_offset(&self, factor: usize) -> usize {
        self.0.abelian_ranks[..factor].iter().sum()
    }

    /// Generators in canonical order: all factor generators, then free letters.
    pub fn generators(&self) -> Vec<Generator> {
        let mut gens = Vec::with_capacity(self.abelianization_rank());
        for (factor, &n) in self.0.abelian_ranks.iter().enumerate() {
            gens.extend((0..n).map(|index| Generator::Factor { factor, index }));
        }
        gens.extend((0..self.0.free_rank).map(|letter| Generator::Free { letter }));
        gens
    }

    /// Position of a generator in [`Presentation::generators`].
    pub fn generator_position(&self, g: Generator) -> Result<usize, WordError> {
        match g {
            Generator::Factor { factor, index } => {
                if factor >= self.num_factors() || index >= self.factor_rank(factor) {
                    return Err(WordError::IndexOutOfRange(g.to_string()));
                }
                Ok(self.factor_offset(factor) + index)
            }
            Generator::Free { letter } => {
                if letter >= self.free_rank() {
                    return Err(WordError::IndexOutOfRange(g.to_string()));
                }
                Ok(self.abelianization_rank() - self.free_rank() + letter)
            }
        }
    }

    pub(crate) fn check_syllable(&self, s: &Syllable) -> Result<(), WordError> {
        match s {
            Syllable::Factor { factor, exponents } => {
                if *factor >= self.num_factors() {
                    return Err(WordError::IndexOutOfRange(format!("factor a{}", factor + 1)));
                }
                let expected = self.factor_rank(*factor);
                if exponents.len() != expected {
                    return Err(WordError::ExponentLength {
                        factor: *factor,
                        expected,
                        got: exponents.len(),
                    });
                }
                Ok(())
            }
            Syllable::Free { letter, .. } => {
                if *letter >= self.free_rank() {
                    return Err(WordError::IndexOutOfRange(format!("letter x{}", letter + 1)));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presentation(Z^{:?} * F_{})", self.0.abelian_ranks, self.0.free_rank)
    }
}

/// A generator of the presentation: `a<i>.<j>` or `x<l>` in the text grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Factor { factor: usize, index: usize },
    Free { letter: usize },
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Factor { factor, index } => write!(f, "a{}.{}", factor + 1, index + 1),
            Generator::Free { letter } => write!(f, "x{}", letter + 1),
        }
    }
}

/// Which free factor (or free letter) a syllable lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Factor(usize),
    Free(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Syllable {
    Factor { factor: usize, exponents: Vec<BigInt> },
    Free { letter: usize, exponent: BigInt },
}

impl Syllable {
    pub fn factor<I, E>(factor: usize, exponents: I) -> Self
    where
        I: IntoIterator<Item = E>,
        E: Into<BigInt>,
    {
        Syllable::Factor {
            factor,
            exponents: exponents.into_iter().map(Into::into).collect(),
        }
    }

    pub fn free(letter: usize, exponent: impl Into<BigInt>) -> Self {
        Syllable::Free {
            letter,
            exponent: exponent.into(),
        }
    }

    pub fn slot(&self) -> Slot {
        match self {
            Syllable::Factor { factor, .. } => Slot::Factor(*factor),
            Syllable::Free { letter, .. } => Slot::Free(*letter),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            Syllable::Factor { exponents, .. } => exponents.iter().all(Zero::is_zero),
            Syllable::Free { exponent, .. } => exponent.is_zero(),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Syllable::Factor { factor, exponents } => Syllable::Factor {
                factor: *factor,
                exponents: exponents.iter().map(|e| -e).collect(),
            },
            Syllable::Free { letter, exponent } => Syllable::Free {
                letter: *letter,
                exponent: -exponent,
            },
        }
    }

    /// L1 norm of the exponent data.
    pub fn mass(&self) -> BigInt {
        match self {
            Syllable::Factor { exponents, .. } => exponents.iter().map(|e| e.abs()).sum(),
            Syllable::Free { exponent, .. } => exponent.abs(),
        }
    }

    pub(crate) fn scaled(&self, k: &BigInt) -> Self {
        match self {
            Syllable::Factor { factor, exponents } => Syllable::Factor {
                factor: *factor,
                exponents: exponents.iter().map(|e| e * k).collect(),
            },
            Syllable::Free { letter, exponent } => Syllable::Free {
                letter: *letter,
                exponent: exponent * k,
            },
        }
    }

    /// Adds `other` into `self`; both must share a slot.
    fn absorb(&mut self, other: &Syllable) {
        match (self, other) {
            (Syllable::Factor { exponents: a, .. }, Syllable::Factor { exponents: b, .. }) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            (Syllable::Free { exponent: a, .. }, Syllable::Free { exponent: b, .. }) => *a += b,
            _ => unreachable!("absorb across slots"),
        }
    }
}

fn push_reduced(stack: &mut Vec<Syllable>, s: Syllable) {
    if s.is_trivial() {
        return;
    }
    if let Some(top) = stack.last_mut() {
        if top.slot() == s.slot() {
            top.absorb(&s);
            if top.is_trivial() {
                stack.pop();
            }
            return;
        }
    }
    stack.push(s);
}

/// An element of `G` in free-product normal form.
#[derive(Clone)]
pub struct Word {
    pres: Presentation,
    syllables: Vec<Syllable>,
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.pres == other.pres && self.syllables == other.syllables
    }
}

impl Eq for Word {}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.syllables.hash(state);
    }
}

impl Word {
    pub fn identity(pres: &Presentation) -> Self {
        Word {
            pres: pres.clone(),
            syllables: Vec::new(),
        }
    }

    /// Reduces an arbitrary syllable sequence to normal form. Zero syllables are allowed.
    pub fn reduce<I>(pres: &Presentation, raw: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = Syllable>,
    {
        let mut stack = Vec::new();
        for s in raw {
            pres.check_syllable(&s)?;
            push_reduced(&mut stack, s);
        }
        Ok(Word {
            pres: pres.clone(),
            syllables: stack,
        })
    }

    pub fn generator(pres: &Presentation, g: Generator) -> Result<Self, WordError> {
        pres.generator_position(g)?;
        let s = match g {
            Generator::Factor { factor, index } => {
                let mut exponents = vec![BigInt::zero(); pres.factor_rank(factor)];
                exponents[index] = BigInt::one();
                Syllable::Factor { factor, exponents }
            }
            Generator::Free { letter } => Syllable::free(letter, 1),
        };
        Ok(Word {
            pres: pres.clone(),
            syllables: vec![s],
        })
    }

    pub fn from_syllable(pres: &Presentation, s: Syllable) -> Result<Self, WordError> {
        Self::reduce(pres, [s])
    }

    /// Wraps syllables already known to be in normal form.
    pub(crate) fn from_normal(pres: &Presentation, syllables: Vec<Syllable>) -> Self {
        debug_assert!(is_normal(&syllables));
        Word {
            pres: pres.clone(),
            syllables,
        }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn into_syllables(self) -> Vec<Syllable> {
        self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllable_length(&self) -> usize {
        self.syllables.len()
    }

    /// Number of free-letter occurrences, `sum |e|` over free syllables.
    pub fn letter_length(&self) -> BigInt {
        self.syllables
            .iter()
            .filter(|s| matches!(s, Syllable::Free { .. }))
            .map(Syllable::mass)
            .sum()
    }

    /// L1 norm of all factor exponent vectors.
    pub fn factor_mass(&self) -> BigInt {
        self.syllables
            .iter()
            .filter(|s| matches!(s, Syllable::Factor { .. }))
            .map(Syllable::mass)
            .sum()
    }

    /// Word length for the generating set made of all factor generators and free letters.
    pub fn generator_length(&self) -> BigInt {
        self.syllables.iter().map(Syllable::mass).sum()
    }

    fn check_same(&self, other: &Word) -> Result<(), WordError> {
        if self.pres == other.pres {
            Ok(())
        } else {
            Err(WordError::PresentationMismatch)
        }
    }

    pub fn multiply(&self, other: &Word) -> Result<Word, WordError> {
        self.check_same(other)?;
        Ok(self.concat(other))
    }

    /// Product without the presentation check.
    pub(crate) fn concat(&self, other: &Word) -> Word {
        let mut stack = self.syllables.clone();
        for s in &other.syllables {
            push_reduced(&mut stack, s.clone());
        }
        Word {
            pres: self.pres.clone(),
            syllables: stack,
        }
    }

    pub(crate) fn concat_all<'a, I: IntoIterator<Item = &'a Word>>(pres: &Presentation, parts: I) -> Word {
        let mut stack = Vec::new();
        for w in parts {
            for s in &w.syllables {
                push_reduced(&mut stack, s.clone());
            }
        }
        Word {
            pres: pres.clone(),
            syllables: stack,
        }
    }

    pub fn inverse(&self) -> Word {
        Word {
            pres: self.pres.clone(),
            syllables: self.syllables.iter().rev().map(Syllable::inverse).collect(),
        }
    }

    /// `g * self * g^-1`.
    pub fn conjugate_by(&self, g: &Word) -> Result<Word, WordError> {
        self.check_same(g)?;
        Ok(Word::concat_all(&self.pres, [g, self, &g.inverse()]))
    }

    pub fn pow(&self, e: &BigInt) -> Word {
        if e.is_zero() || self.is_identity() {
            return Word::identity(&self.pres);
        }
        let cyc = self.cyclic_normal_form().expect("nonempty word");
        let core = if cyc.syllables.len() == 1 {
            vec![cyc.syllables[0].scaled(e)]
        } else {
            let base: Vec<Syllable> = if e.is_negative() {
                cyc.syllables.iter().rev().map(Syllable::inverse).collect()
            } else {
                cyc.syllables.clone()
            };
            let reps = usize::try_from(e.abs()).expect("power too large to expand");
            let mut out = Vec::with_capacity(base.len() * reps);
            for _ in 0..reps {
                out.extend(base.iter().cloned());
            }
            out
        };
        let core = Word::from_normal(&self.pres, core);
        Word::concat_all(&self.pres, [&cyc.conjugator, &core, &cyc.conjugator.inverse()])
    }

    pub fn first(&self) -> Option<&Syllable> {
        self.syllables.first()
    }

    pub fn last(&self) -> Option<&Syllable> {
        self.syllables.last()
    }

    /// Removes a trailing syllable in `slot`, returning the remainder and the stripped syllable.
    pub(crate) fn split_trailing(&self, slot: Slot) -> (Word, Option<Syllable>) {
        match self.syllables.last() {
            Some(s) if s.slot() == slot => (
                Word::from_normal(&self.pres, self.syllables[..self.syllables.len() - 1].to_vec()),
                Some(s.clone()),
            ),
            _ => (self.clone(), None),
        }
    }

    pub(crate) fn split_leading(&self, slot: Slot) -> (Option<Syllable>, Word) {
        match self.syllables.first() {
            Some(s) if s.slot() == slot => (Some(s.clone()), Word::from_normal(&self.pres, self.syllables[1..].to_vec())),
            _ => (None, self.clone()),
        }
    }

    /// Strips conjugating prefix/suffix pairs and merges wrap-around syllables.
    pub fn cyclic_normal_form(&self) -> Result<CyclicWord, WordError> {
        if self.is_identity() {
            return Err(WordError::EmptyWord);
        }
        let mut syl: Vec<Syllable> = self.syllables.clone();
        let mut conjugator: Vec<Syllable> = Vec::new();
        let mut lo = 0;
        let mut hi = syl.len();
        while hi - lo >= 2 && syl[lo].slot() == syl[hi - 1].slot() {
            let mut merged = syl[hi - 1].clone();
            merged.absorb(&syl[lo]);
            if merged.is_trivial() {
                // w = s * w' * s^-1
                push_reduced(&mut conjugator, syl[lo].clone());
                lo += 1;
                hi -= 1;
            } else {
                // w = t^-1 * (t s w'') * t where t is the last syllable
                push_reduced(&mut conjugator, syl[hi - 1].inverse());
                syl[lo] = merged;
                hi -= 1;
                break;
            }
        }
        let core: Vec<Syllable> = syl[lo..hi].to_vec();
        Ok(CyclicWord {
            pres: self.pres.clone(),
            syllables: core,
            conjugator: Word {
                pres: self.pres.clone(),
                syllables: conjugator,
            },
        })
    }

    pub fn cyclic_syllable_length(&self) -> usize {
        self.cyclic_normal_form().map(|c| c.len()).unwrap_or(0)
    }

    /// Not conjugate into any factor. The empty word is elliptic.
    pub fn is_hyperbolic(&self) -> bool {
        match self.cyclic_normal_form() {
            Ok(c) => c.is_hyperbolic(),
            Err(_) => false,
        }
    }

    pub fn is_conjugate(&self, other: &Word) -> Result<bool, WordError> {
        self.check_same(other)?;
        match (self.is_identity(), other.is_identity()) {
            (true, true) => return Ok(true),
            (true, false) | (false, true) => return Ok(false),
            _ => {}
        }
        let a = self.cyclic_normal_form()?;
        let b = other.cyclic_normal_form()?;
        Ok(a.same_class(&b))
    }

    /// Canonical representative of `A_i * self * A_j`: no leading syllable in
    /// factor `i`, no trailing syllable in factor `j`.
    pub fn double_coset_rep(&self, i: usize, j: usize) -> Result<Word, WordError> {
        for f in [i, j] {
            if f >= self.pres.num_factors() {
                return Err(WordError::IndexOutOfRange(format!("factor a{}", f + 1)));
            }
        }
        let (_, rest) = self.split_leading(Slot::Factor(i));
        let (rep, _) = rest.split_trailing(Slot::Factor(j));
        Ok(rep)
    }

    /// Image in `G_ab = Z^{sum n_i} + Z^k`.
    pub fn abelianization(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.pres.abelianization_rank()];
        let free_base = self.pres.abelianization_rank() - self.pres.free_rank();
        for s in &self.syllables {
            match s {
                Syllable::Factor { factor, exponents } => {
                    let off = self.pres.factor_offset(*factor);
                    for (k, e) in exponents.iter().enumerate() {
                        out[off + k] += e;
                    }
                }
                Syllable::Free { letter, exponent } => out[free_base + letter] += exponent,
            }
        }
        out
    }
}

impl Mul for &Word {
    type Output = Word;

    /// Panics if the words belong to different presentations.
    fn mul(self, rhs: &Word) -> Word {
        self.multiply(rhs).expect("multiplying words of different presentations")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

pub(crate) fn is_normal(syllables: &[Syllable]) -> bool {
    syllables.iter().all(|s| !s.is_trivial()) && syllables.windows(2).all(|w| w[0].slot() != w[1].slot())
}

/// A cyclically reduced conjugate of a word, with the conjugator that recovers it:
/// `conjugator * cyclic * conjugator^-1 == original`.
#[derive(Clone, Debug)]
pub struct CyclicWord {
    pres: Presentation,
    syllables: Vec<Syllable>,
    conjugator: Word,
}

impl CyclicWord {
    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn conjugator(&self) -> &Word {
        &self.conjugator
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// The cyclic core as a plain word.
    pub fn as_word(&self) -> Word {
        Word::from_normal(&self.pres, self.syllables.clone())
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.syllables.len() >= 2 || matches!(self.syllables.first(), Some(Syllable::Free { .. }))
    }

    pub fn is_elliptic(&self) -> bool {
        !self.is_hyperbolic()
    }

    /// Least rotation of the syllable sequence; a complete conjugacy invariant.
    pub fn canonical_rotation(&self) -> Vec<Syllable> {
        least_rotation(&self.syllables)
    }

    pub fn same_class(&self, other: &CyclicWord) -> bool {
        if self.syllables.len() != other.syllables.len() {
            return false;
        }
        let n = self.syllables.len();
        (0..n).any(|r| (0..n).all(|t| self.syllables[(r + t) % n] == other.syllables[t]))
    }
}

pub(crate) fn least_rotation<T: Ord + Clone>(items: &[T]) -> Vec<T> {
    let n = items.len();
    let best = (0..n)
        .min_by(|&a, &b| {
            (0..n)
                .map(|t| &items[(a + t) % n])
                .cmp((0..n).map(|t| &items[(b + t) % n]))
        })
        .unwrap_or(0);
    (0..n).map(|t| items[(best + t) % n].clone()).collect()
}
