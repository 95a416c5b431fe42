//! Growth of conjugacy classes and bounded searches for periodic classes,
//! twinned subgroups and flaring.
//!
//! Every negative verdict is relative to the stated bounds.

pub mod atoroidal;
pub mod enumerate;
pub mod flare;
pub mod growth;
pub mod twins;

use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

pub use atoroidal::{atoroidal_search, PeriodicClass};
pub use enumerate::EnumerationBounds;
pub use flare::{flare_certify, verify_flare_certificate, FlareCounterexample, FlareReport, FlareVerdict};
pub use growth::{classify_growth, classify_orbit, orbit_lengths, GrowthKind, GrowthVerdict, OrbitLengths};
pub use twins::{twin_search, FactorConjugate, TwinWitness};

use crate::automorphism::{AutError, Automorphism};
use crate::words::WordError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("orbit of the empty word")]
    EmptyWord,
    #[error("sequence of length {len} is too short, need at least {min}")]
    TooShort { len: usize, min: usize },
    #[error("lambda must exceed 1, got {0}")]
    InvalidLambda(String),
    #[error("central and atoroidal up to bounds, yet twinned: {0}")]
    ImplicationViolated(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SearchVerdict<W> {
    Witness { witness: W },
    Exhausted,
    Undecided { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport<W> {
    #[serde(flatten)]
    pub verdict: SearchVerdict<W>,
    pub bounds: EnumerationBounds,
    /// Power bound (`N` or `M`).
    pub exponent_bound: usize,
    /// Candidates examined; reported only when the scan ran to completion.
    pub examined: Option<u64>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl<W> SearchReport<W> {
    pub fn witness(&self) -> Option<&W> {
        match &self.verdict {
            SearchVerdict::Witness { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self.verdict, SearchVerdict::Exhausted)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ImplicationReport {
    pub central: Vec<bool>,
    pub atoroidal: SearchReport<PeriodicClass>,
    pub twins: SearchReport<TwinWitness>,
    /// Central on every factor and atoroidal up to bounds.
    pub applies: bool,
}

/// Runs the central-condition check, the atoroidal search and the twin search;
/// central plus atoroidal-up-to-bounds with a twin witness is reported as an error.
pub fn no_twin_implication_check(
    phi: &Automorphism,
    bounds: &EnumerationBounds,
    n_max: usize,
    m_max: usize,
) -> Result<ImplicationReport, DynamicsError> {
    let central = phi.check_central_condition()?;
    let atoroidal = atoroidal_search(phi, bounds, n_max)?;
    let twins = twin_search(phi, m_max, bounds)?;
    let applies = central.iter().all(|&c| c) && atoroidal.is_exhausted();
    if applies {
        if let Some(w) = twins.witness() {
            return Err(DynamicsError::ImplicationViolated(format!(
                "{}{:?} ~ {}{:?} under phi^{} by {}",
                w.h.u, w.h.factor, w.k.u, w.k.factor, w.m, w.g
            )));
        }
    }
    Ok(ImplicationReport {
        central,
        atoroidal,
        twins,
        applies,
    })
}
