//! Random Boolean regulatory networks with a methylation-style epigenetic
//! control layer, scored on NK and NKCS fitness landscapes and evolved with a
//! 1+1 hill-climber.
//!
//! The crate is organised bottom-up:
//!
//! * [`landscape`] - NK / NKCS epistasis tables and their fitness functions.
//! * [`network`] - genome encoding and the synchronous update rule, including
//!   the methylation state machine.
//! * [`evolution`] - random genomes, the single-point mutation operator,
//!   replacement with tie-breaking, and the hill-climbing loop.
//! * [`scenarios`] - the evaluation regimes that map a genome to fitness.
//! * [`analysis`] - attractor detection, methylation rhythm statistics,
//!   Welch's t-test and run aggregation.
//! * [`seed`] - the fixed seed-mixing function used to derive per-job RNGs.

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod landscape;
pub mod network;
pub mod scenarios;
pub mod seed;

pub use error::{Error, Result};
pub use evolution::{prefer, run_hill_climber, EvolutionParams, Preference, RunRecord};
pub use landscape::{NkLandscape, NkcsLandscape};
pub use network::{CellState, Genome, NodeGene};
pub use scenarios::{Landscapes, Order, ScenarioConfig, ScenarioKind};

/// The RNG used throughout. Seeded explicitly everywhere; nothing reads
/// ambient entropy.
pub type SimRng = rand_chacha::ChaCha8Rng;
