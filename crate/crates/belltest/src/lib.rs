//! Workbench for one-detector-per-side Bell tests with `+`/`0` outcomes.
//!
//! The crate covers the full chain from physics model to verdict:
//!
//! * [`model`] — quantum forward model: a non-maximally entangled
//!   polarization state, two analyzer angles per side, detector
//!   efficiencies, visibility, background and multi-pair emission, down to
//!   the per-setting-pair outcome probability table and its `J` value.
//! * [`optimize`] — derivative-free search for the state parameter and
//!   angles that maximize the violation, plus critical-efficiency
//!   thresholds.
//! * [`sim`] — deterministic trial-stream generation, either from the
//!   quantum model or from local-hidden-variable adversaries with memory
//!   and bounded setting predictability.
//! * [`stats`] — count-based `J` estimate and a p-value that stays valid
//!   under full memory and predictable settings, evaluated in log space.
//! * [`spacetime`] — light-cone margin audit of the experiment layout.
//! * [`ingest`] — detector pulse classification and locally defined time
//!   slots.
//! * [`config`], [`records`] — the shared key-value configuration format
//!   and the trial-record / trace / event file codecs.

pub mod config;
pub mod error;
pub mod ingest;
pub mod model;
pub mod optimize;
pub mod records;
pub mod rng;
pub mod sim;
pub mod spacetime;
pub mod stats;

pub use error::{Error, Result};
