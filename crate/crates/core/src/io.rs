//! Automorphism files.
//!
//! ```json
//! {
//!   "group": {"abelian_factors": [2, 2], "free_rank": 0},
//!   "images": {"a1.1": "a1.1", "a1.2": "a1.2", "a2.1": "a1.1 a2.1 a1.1^-1", "a2.2": "a1.1 a2.2 a1.1^-1"},
//!   "inverse_images": {"a1.1": "a1.1", "a1.2": "a1.2", "a2.1": "a1.1^-1 a2.1 a1.1", "a2.2": "a1.1^-1 a2.2 a1.1"}
//! }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automorphism::{AutError, Automorphism};
use crate::text::{parse_generator, parse_word, render_word, ParseError};
use crate::words::{Presentation, Word, WordError};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("malformed automorphism file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{map}: {message}")]
    Generators { map: &'static str, message: String },
    #[error("{map}[{generator}]: {source}")]
    Parse {
        map: &'static str,
        generator: String,
        source: ParseError,
    },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Aut(#[from] AutError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub abelian_factors: Vec<usize>,
    pub free_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomorphismFile {
    pub group: GroupSpec,
    pub images: BTreeMap<String, String>,
    pub inverse_images: BTreeMap<String, String>,
}

fn read_map(pres: &Presentation, map: &BTreeMap<String, String>, name: &'static str) -> Result<Vec<Word>, FileError> {
    let gens = pres.generators();
    let mut out: Vec<Option<Word>> = vec![None; gens.len()];
    for (key, value) in map {
        let g = parse_generator(key, 0).map_err(|source| FileError::Parse {
            map: name,
            generator: key.clone(),
            source,
        })?;
        let pos = pres.generator_position(g).map_err(|e| FileError::Generators {
            map: name,
            message: e.to_string(),
        })?;
        let w = parse_word(value, pres).map_err(|source| FileError::Parse {
            map: name,
            generator: key.clone(),
            source,
        })?;
        out[pos] = Some(w);
    }
    let missing: Vec<String> = gens
        .iter()
        .zip(&out)
        .filter(|(_, w)| w.is_none())
        .map(|(g, _)| g.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(FileError::Generators {
            map: name,
            message: format!("missing generators {}", missing.join(", ")),
        });
    }
    Ok(out.into_iter().map(|w| w.expect("checked")).collect())
}

impl AutomorphismFile {
    pub fn parse(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn presentation(&self) -> Result<Presentation, FileError> {
        Ok(Presentation::new(self.group.abelian_factors.clone(), self.group.free_rank)?)
    }

    pub fn to_automorphism(&self) -> Result<Automorphism, FileError> {
        let pres = self.presentation()?;
        let images = read_map(&pres, &self.images, "images")?;
        let inverse = read_map(&pres, &self.inverse_images, "inverse_images")?;
        Ok(Automorphism::new(&pres, images, inverse)?)
    }

    pub fn from_automorphism(phi: &Automorphism) -> Self {
        let pres = phi.presentation();
        let map = |ws: &[Word]| {
            pres.generators()
                .iter()
                .zip(ws)
                .map(|(g, w)| (g.to_string(), render_word(w)))
                .collect()
        };
        AutomorphismFile {
            group: GroupSpec {
                abelian_factors: pres.abelian_ranks().to_vec(),
                free_rank: pres.free_rank(),
            },
            images: map(phi.images()),
            inverse_images: map(phi.inverse_images()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("string maps serialize")
    }
}

/// Parses and validates an automorphism file.
pub fn read_automorphism(text: &str) -> Result<Automorphism, FileError> {
    AutomorphismFile::parse(text)?.to_automorphism()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_map::tests::{fibonacci, toral_twist};

    #[test]
    fn round_trip() {
        for phi in [fibonacci(), toral_twist()] {
            let text = AutomorphismFile::from_automorphism(&phi).to_json();
            assert_eq!(read_automorphism(&text).unwrap(), phi);
        }
    }

    #[test]
    fn doc_example_is_the_twist() {
        let text = r#"{
          "group": {"abelian_factors": [2, 2], "free_rank": 0},
          "images": {"a1.1": "a1.1", "a1.2": "a1.2", "a2.1": "a1.1 a2.1 a1.1^-1", "a2.2": "a1.1 a2.2 a1.1^-1"},
          "inverse_images": {"a1.1": "a1.1", "a1.2": "a1.2", "a2.1": "a1.1^-1 a2.1 a1.1", "a2.2": "a1.1^-1 a2.2 a1.1"}
        }"#;
        assert_eq!(read_automorphism(text).unwrap(), toral_twist());
    }

    #[test]
    fn errors_are_specific() {
        let missing = r#"{"group": {"abelian_factors": [], "free_rank": 2},
            "images": {"x1": "x1 x2"}, "inverse_images": {"x1": "x2", "x2": "x2^-1 x1"}}"#;
        assert!(matches!(read_automorphism(missing), Err(FileError::Generators { map: "images", .. })));
        let bad = r#"{"group": {"abelian_factors": [], "free_rank": 2},
            "images": {"x1": "x1 x3", "x2": "x1"}, "inverse_images": {"x1": "x2", "x2": "x2^-1 x1"}}"#;
        assert!(matches!(read_automorphism(bad), Err(FileError::Parse { .. })));
        let not_inverse = r#"{"group": {"abelian_factors": [], "free_rank": 2},
            "images": {"x1": "x1 x2", "x2": "x1"}, "inverse_images": {"x1": "x2", "x2": "x1"}}"#;
        assert!(matches!(read_automorphism(not_inverse), Err(FileError::Aut(_))));
        assert!(matches!(read_automorphism("{"), Err(FileError::Json(_))));
    }
}
