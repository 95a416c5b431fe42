//! Abelianized actions, mapping-torus abelianization, the block-triangular
//! orbit solver and the conjugacy pipeline.

pub mod block_orbit;
pub mod conjugacy;
pub mod snf;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::automorphism::Automorphism;
use crate::matrix::IntegerMatrix;

pub use block_orbit::{block_orbit_solve, BlockOrbitInstance, Constraint, OrbitError, OrbitOutcome, Target};
pub use conjugacy::{conjugacy_pipeline, ConjugacyOutcome, ConjugacyWitness, PipelineOptions};
pub use snf::{integer_kernel, smith_normal_form, SmithDecomposition};

/// Matrix of `phi` on `G_ab`; column `c` is the exponent-sum vector of the image of generator `c`.
pub fn abelianized_action(phi: &Automorphism) -> IntegerMatrix {
    let n = phi.presentation().abelianization_rank();
    let columns: Vec<Vec<BigInt>> = phi.images().iter().map(|w| w.abelianization()).collect();
    IntegerMatrix::from_columns(n, &columns)
}

/// `coker(Phi_ab - I) + Z` with the images of generators and of `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianizationReport {
    /// Invariant factors greater than one.
    #[serde(serialize_with = "crate::serde_util::bigints")]
    pub torsion: Vec<BigInt>,
    /// Free rank, counting the `t` direction.
    pub free_rank: usize,
    /// Full Smith diagonal of `Phi_ab - I`.
    #[serde(serialize_with = "crate::serde_util::bigints")]
    pub diagonal: Vec<BigInt>,
    /// Coordinates of each generator of `G` in the cyclic decomposition
    /// (torsion coordinates reduced, `t` coordinate last).
    #[serde(serialize_with = "crate::serde_util::bigint_rows")]
    pub generator_images: Vec<Vec<BigInt>>,
    #[serde(serialize_with = "crate::serde_util::bigints")]
    pub t_image: Vec<BigInt>,
}

impl AbelianizationReport {
    /// Canonical summary `(torsion, free_rank)` used for comparisons.
    pub fn signature(&self) -> (Vec<BigInt>, usize) {
        (self.torsion.clone(), self.free_rank)
    }
}

pub fn mapping_torus_abelianization(phi: &Automorphism) -> AbelianizationReport {
    let m = abelianized_action(phi).shift(&BigInt::one());
    let s = smith_normal_form(&m);
    let diagonal = s.diagonal();
    let kept: Vec<usize> = (0..diagonal.len()).filter(|&i| !diagonal[i].is_one()).collect();
    let generator_images = (0..m.cols())
        .map(|g| {
            let mut coords: Vec<BigInt> = kept
                .iter()
                .map(|&i| {
                    let x = s.u[(i, g)].clone();
                    if diagonal[i].is_zero() {
                        x
                    } else {
                        x.mod_floor(&diagonal[i])
                    }
                })
                .collect();
            coords.push(BigInt::zero());
            coords
        })
        .collect();
    let mut t_image = vec![BigInt::zero(); kept.len()];
    t_image.push(BigInt::one());
    AbelianizationReport {
        torsion: diagonal.iter().filter(|d| *d > &BigInt::one()).cloned().collect(),
        free_rank: diagonal.iter().filter(|d| d.is_zero()).count() + 1,
        diagonal,
        generator_images,
        t_image,
    }
}
