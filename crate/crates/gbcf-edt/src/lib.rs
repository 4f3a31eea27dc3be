//! Energy-distortion tradeoff analysis for a pair of correlated Gaussian
//! sources sent over a two-user Gaussian broadcast channel with noiseless
//! causal feedback.
//!
//! The crate answers one question in several ways: how much transmit
//! energy per source-pair sample is needed so that each receiver
//! reconstructs its source within mean-square error `D`, when the number
//! of channel uses per sample is unconstrained?
//!
//! * [`bounds`] evaluates the closed forms — a cut-set lower bound, two
//!   separation-based upper bounds, and the low-power limit of the
//!   uncoded Ozarow-Leung-style linear feedback scheme.
//! * [`olscheme`] is the deterministic second-moment engine of that
//!   linear scheme: the per-step LMMSE recursion, termination counting
//!   `K(P, D)`, and exact energy accounting `P·K`.
//! * [`montecarlo`] validates the recursion by simulating actual sample
//!   paths over the random channel, with reproducible seeding.
//! * [`experiments`] sweeps distortion/correlation grids and runs
//!   power-convergence studies, producing byte-stable tables.
//! * [`model`] holds the validated parameter types and the pinned
//!   correlated Gaussian sampler that everything above shares.
//!
//! The `gbcf-edt` binary (separate crate) exposes all of it as
//! subcommands with CSV/JSON output.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod model;
pub mod montecarlo;
pub mod olscheme;
pub mod ratedistortion;
pub mod render;

pub use bounds::{bounds_bundle, Energy, EnergyBounds};
pub use error::{Error, Result};
pub use model::{DistortionTarget, SystemParams};
pub use montecarlo::{McConfig, McReport};
pub use olscheme::{run_to_distortion, OlRun, OlState};
