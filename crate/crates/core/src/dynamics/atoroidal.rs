//! Bounded search for hyperbolic conjugacy classes with a periodic orbit.

use serde::Serialize;

use super::enumerate::{scan_cyclic, EnumerationBounds, Scan};
use super::{DynamicsError, SearchReport, SearchVerdict};
use crate::automorphism::Automorphism;
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicClass {
    #[serde(serialize_with = "crate::serde_util::word")]
    pub g: Word,
    pub n: usize,
}

impl PeriodicClass {
    /// `[phi^n(g)] = [g]` with `g` hyperbolic.
    pub fn verify(&self, phi: &Automorphism) -> bool {
        self.g.is_hyperbolic()
            && phi
                .apply_power(self.n as i64, &self.g)
                .and_then(|img| Ok(img.is_conjugate(&self.g)?))
                .unwrap_or(false)
    }
}

/// Least `n <= n_max` with `[phi^n(g)] = [g]`.
pub(crate) fn least_period(phi: &Automorphism, g: &Word, n_max: usize) -> Option<usize> {
    let target = g.cyclic_normal_form().ok()?;
    let mut cur = g.clone();
    for n in 1..=n_max {
        cur = phi.apply(&cur).ok()?;
        let c = cur.cyclic_normal_form().ok()?;
        if c.same_class(&target) {
            return Some(n);
        }
    }
    None
}

/// Tests every hyperbolic cyclic word in `bounds` against `phi^n` for `n <= n_max`.
pub fn atoroidal_search(
    phi: &Automorphism,
    bounds: &EnumerationBounds,
    n_max: usize,
) -> Result<SearchReport<PeriodicClass>, DynamicsError> {
    phi.require_factor_preserving()?;
    let started = std::time::Instant::now();
    let scan = scan_cyclic(phi.presentation(), bounds, 1, |g| {
        least_period(phi, g, n_max).map(|n| PeriodicClass { g: g.clone(), n })
    });
    let (verdict, examined) = match scan {
        Scan::Found(w) => {
            debug_assert!(w.verify(phi));
            (SearchVerdict::Witness { witness: w }, None)
        }
        Scan::Exhausted { examined } => (SearchVerdict::Exhausted, Some(examined)),
        Scan::LimitReached { examined } => (
            SearchVerdict::Undecided {
                reason: format!("enumeration limit {} reached", bounds.limit),
            },
            Some(examined),
        ),
    };
    Ok(SearchReport {
        verdict,
        bounds: *bounds,
        exponent_bound: n_max,
        examined,
        elapsed: started.elapsed(),
    })
}
