//! Bounded enumeration of words and cyclic words in graded lexicographic order.
//!
//! Syllables are drawn from a finite alphabet: every nonzero syllable whose
//! mass (L1 norm of the exponent vector, or `|e|` for a free letter) is at most
//! `max_mass`, ordered by `(mass, slot, exponents)`. Words are ordered by
//! syllable count, then lexicographically by alphabet index.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::words::{least_rotation, Presentation, Slot, Syllable, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EnumerationBounds {
    pub max_syllables: usize,
    pub max_mass: usize,
    /// Cap on the number of candidates examined; exceeding it makes a search undecided.
    pub limit: u64,
}

impl EnumerationBounds {
    pub const DEFAULT_LIMIT: u64 = 5_000_000;

    pub fn new(max_syllables: usize, max_mass: usize) -> Self {
        EnumerationBounds {
            max_syllables,
            max_mass,
            limit: Self::DEFAULT_LIMIT,
        }
    }
}

/// Integer vectors of the given dimension with L1 norm exactly `mass`.
fn vectors_of_mass(dim: usize, mass: usize) -> Vec<Vec<i64>> {
    if dim == 0 {
        return if mass == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in -(mass as i64)..=(mass as i64) {
        let rest = mass - first.unsigned_abs() as usize;
        for mut tail in vectors_of_mass(dim - 1, rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Alphabet {
    pub syllables: Vec<Syllable>,
    slots: Vec<Slot>,
}

impl Alphabet {
    pub fn new(pres: &Presentation, max_mass: usize) -> Self {
        let mut syllables = Vec::new();
        for mass in 1..=max_mass {
            for i in 0..pres.num_factors() {
                for v in vectors_of_mass(pres.factor_rank(i), mass) {
                    syllables.push(Syllable::factor(i, v));
                }
            }
            for l in 0..pres.free_rank() {
                syllables.push(Syllable::free(l, -(mass as i64)));
                syllables.push(Syllable::free(l, mass as i64));
            }
        }
        let slots = syllables.iter().map(Syllable::slot).collect();
        Alphabet { syllables, slots }
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn slot(&self, idx: usize) -> Slot {
        self.slots[idx]
    }

    pub fn word(&self, pres: &Presentation, idx: &[usize]) -> Word {
        Word::from_normal(pres, idx.iter().map(|&k| self.syllables[k].clone()).collect())
    }
}

/// All reduced words with at most `max_syllables` syllables, in enumeration order.
pub fn reduced_words(pres: &Presentation, bounds: &EnumerationBounds) -> Vec<Word> {
    let alpha = Alphabet::new(pres, bounds.max_mass);
    let mut out = vec![Word::identity(pres)];
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..bounds.max_syllables {
        let mut next = Vec::new();
        for w in &layer {
            for k in 0..alpha.len() {
                if w.last().is_none_or(|&j| alpha.slot(j) != alpha.slot(k)) {
                    let mut v = w.clone();
                    v.push(k);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().map(|w| alpha.word(pres, w)));
        layer = next;
    }
    out
}

/// Depth-first walk over canonical cyclic index sequences of length `len`
/// starting with `first`. Stops at the first `Some`.
fn walk_cyclic<T>(
    alpha: &Alphabet,
    len: usize,
    prefix: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]) -> Option<T>,
) -> Option<T> {
    if prefix.len() == len {
        let closes = len == 1 || alpha.slot(prefix[0]) != alpha.slot(prefix[len - 1]);
        if closes && least_rotation(prefix) == *prefix {
            return f(prefix);
        }
        return None;
    }
    let first = prefix[0];
    let last = *prefix.last().expect("nonempty");
    for k in first..alpha.len() {
        if alpha.slot(k) == alpha.slot(last) {
            continue;
        }
        prefix.push(k);
        let r = walk_cyclic(alpha, len, prefix, f);
        prefix.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

/// Outcome of a parallel scan over hyperbolic cyclic words.
pub enum Scan<T> {
    Found(T),
    Exhausted { examined: u64 },
    LimitReached { examined: u64 },
}

/// Runs `test` over one representative of every hyperbolic conjugacy class with
/// `min_syllables..=max_syllables` cyclic syllables, returning the first hit in
/// enumeration order. Levels are scanned in order; within a level the work is
/// split by first syllable.
pub fn scan_cyclic<T: Send>(
    pres: &Presentation,
    bounds: &EnumerationBounds,
    min_syllables: usize,
    test: impl Fn(&Word) -> Option<T> + Sync,
) -> Scan<T> {
    let alpha = Alphabet::new(pres, bounds.max_mass);
    let mut examined = 0u64;
    for len in min_syllables.max(1)..=bounds.max_syllables {
        let results: Vec<(u64, Option<T>)> = (0..alpha.len())
            .into_par_iter()
            .map(|first| {
                if len == 1 && !matches!(alpha.slot(first), Slot::Free(_)) {
                    return (0, None);
                }
                let mut count = 0u64;
                let mut prefix = vec![first];
                let hit = walk_cyclic(&alpha, len, &mut prefix, &mut |idx| {
                    count += 1;
                    test(&alpha.word(pres, idx))
                });
                (count, hit)
            })
            .collect();
        let mut hit = None;
        for (count, r) in results {
            examined += count;
            if hit.is_none() {
                hit = r;
            }
        }
        if let Some(t) = hit {
            return Scan::Found(t);
        }
        if examined > bounds.limit {
            return Scan::LimitReached { examined };
        }
    }
    Scan::Exhausted { examined }
}

/// Every hyperbolic cyclic word in the bounds, in enumeration order.
pub fn cyclic_words(pres: &Presentation, bounds: &EnumerationBounds, min_syllables: usize) -> Vec<Word> {
    let alpha = Alphabet::new(pres, bounds.max_mass);
    let mut out = Vec::new();
    for len in min_syllables.max(1)..=bounds.max_syllables {
        for first in 0..alpha.len() {
            if len == 1 && !matches!(alpha.slot(first), Slot::Free(_)) {
                continue;
            }
            let mut prefix = vec![first];
            walk_cyclic::<()>(&alpha, len, &mut prefix, &mut |idx| {
                out.push(alpha.word(pres, idx));
                None
            });
        }
    }
    out
}

/// Total mass of a word: sum of syllable masses.
pub fn word_mass(w: &Word) -> BigInt {
    w.syllables().iter().map(Syllable::mass).sum()
}
