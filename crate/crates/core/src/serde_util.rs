//! Serialization helpers: integers as decimal strings, words in the text grammar.

use num_bigint::BigInt;
use serde::ser::{SerializeSeq, Serializer};

use crate::text::render_word;
use crate::words::Word;

pub fn bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn bigints<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(ToString::to_string))
}

pub fn bigint_rows<S: Serializer>(rows: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for r in rows {
        seq.serialize_element(&r.iter().map(ToString::to_string).collect::<Vec<_>>())?;
    }
    seq.end()
}

pub fn word<S: Serializer>(w: &Word, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&render_word(w))
}

pub fn words<S: Serializer>(ws: &[Word], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ws.iter().map(render_word))
}
