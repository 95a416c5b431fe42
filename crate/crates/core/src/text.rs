//! Text grammar for words.
//!
//! Tokens are whitespace separated. `a<i>.<j>^<e>` is the `j`-th generator of
//! factor `i` raised to `e`; `x<l>^<e>` is free letter `l`. The exponent is
//! optional and defaults to 1. Indices are 1-based. The token `1` (or an empty
//! string) denotes the identity.
//!
//! ```
//! use fpaut_core::{parse_word, render_word, Presentation};
//! let pres = Presentation::new(vec![2, 3], 1).unwrap();
//! let w = parse_word("a1.1^2 x1^-1 a2.3", &pres).unwrap();
//! assert_eq!(render_word(&w), "a1.1^2 x1^-1 a2.3");
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::words::{Generator, Presentation, Syllable, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("parse error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error(transparent)]
    Word(#[from] WordError),
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        position,
        message: message.into(),
    }
}

fn parse_index(s: &str, position: usize, what: &str) -> Result<usize, ParseError> {
    let n: usize = s
        .parse()
        .map_err(|_| syntax(position, format!("expected a positive {what} index, found {s:?}")))?;
    if n == 0 {
        return Err(syntax(position, format!("{what} indices start at 1")));
    }
    Ok(n - 1)
}

/// Parses one generator name such as `a2.1` or `x3` (no exponent).
pub fn parse_generator(token: &str, position: usize) -> Result<Generator, ParseError> {
    if let Some(rest) = token.strip_prefix('a') {
        let (f, j) = rest
            .split_once('.')
            .ok_or_else(|| syntax(position, format!("factor generator {token:?} needs the form a<i>.<j>")))?;
        Ok(Generator::Factor {
            factor: parse_index(f, position, "factor")?,
            index: parse_index(j, position, "generator")?,
        })
    } else if let Some(rest) = token.strip_prefix('x') {
        Ok(Generator::Free {
            letter: parse_index(rest, position, "letter")?,
        })
    } else {
        Err(syntax(position, format!("unknown token {token:?}")))
    }
}

/// Parses a word in the text grammar and reduces it to normal form.
pub fn parse_word(text: &str, pres: &Presentation) -> Result<Word, ParseError> {
    let mut raw = Vec::new();
    let mut offset = 0;
    for token in text.split_whitespace() {
        let position = offset + text[offset..].find(token).unwrap_or(0);
        offset = position + token.len();
        if token == "1" {
            continue;
        }
        let (name, exponent) = match token.split_once('^') {
            Some((name, e)) => {
                let e: BigInt = e
                    .parse()
                    .map_err(|_| syntax(position, format!("bad exponent {e:?}")))?;
                (name, e)
            }
            None => (token, BigInt::one()),
        };
        let gen = parse_generator(name, position)?;
        pres.generator_position(gen)?;
        raw.push(match gen {
            Generator::Factor { factor, index } => {
                let mut v = vec![BigInt::zero(); pres.factor_rank(factor)];
                v[index] = exponent;
                Syllable::Factor { factor, exponents: v }
            }
            Generator::Free { letter } => Syllable::Free { letter, exponent },
        });
    }
    Ok(Word::reduce(pres, raw)?)
}

struct Exp<'a>(&'a BigInt);

impl fmt::Display for Exp<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_one() {
            Ok(())
        } else {
            write!(f, "^{}", self.0)
        }
    }
}

/// Renders a syllable as one or more grammar tokens.
pub fn render_syllable(s: &Syllable) -> String {
    match s {
        Syllable::Factor { factor, exponents } => exponents
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(j, e)| format!("a{}.{}{}", factor + 1, j + 1, Exp(e)))
            .collect::<Vec<_>>()
            .join(" "),
        Syllable::Free { letter, exponent } => format!("x{}{}", letter + 1, Exp(exponent)),
    }
}

/// Renders a word; the identity renders as `1`.
pub fn render_word(w: &Word) -> String {
    if w.is_identity() {
        return "1".to_string();
    }
    w.syllables().iter().map(render_syllable).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_word(self))
    }
}
