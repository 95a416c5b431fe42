//! Exact computation with automorphisms of free products `A_1 * ... * A_p * F_k`
//! of free-abelian groups and a free group.

pub mod automorphism;
pub mod dynamics;
pub mod graph_map;
pub mod io;
pub mod mapping_torus;
pub mod matrix;
pub mod serde_util;
pub mod text;
pub mod words;

pub use automorphism::{AutError, Automorphism};
pub use dynamics::{
    atoroidal_search, classify_growth, flare_certify, no_twin_implication_check, orbit_lengths, twin_search,
    DynamicsError, EnumerationBounds, SearchReport, SearchVerdict,
};
pub use mapping_torus::{
    abelianized_action, block_orbit_solve, conjugacy_pipeline, mapping_torus_abelianization, smith_normal_form,
    AbelianizationReport, BlockOrbitInstance, ConjugacyOutcome, SmithDecomposition,
};
pub use graph_map::{
    build_standard_map, check_train_track, constants_report, gate_structure, nielsen_search, pf_growth_rate, EdgePath,
    GraphError, GraphMap, StandardGraph, TrainTrackVerdict, Vertex,
};
pub use io::{read_automorphism, AutomorphismFile, FileError};
pub use matrix::IntegerMatrix;
pub use text::{parse_word, render_word, ParseError};
pub use words::{CyclicWord, Generator, Presentation, Slot, Syllable, Word, WordError};
