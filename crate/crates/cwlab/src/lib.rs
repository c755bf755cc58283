//! Exact and randomised analysis of the Curie-Weiss magnetisation.
//!
//! The crate exposes the model's mixing law for exchangeable spins, the exact
//! finite-`n` magnetisation law and its mixture representation, seedable
//! samplers for every stochastic object (surrogates, couplings, the
//! fixed-point chain), distance metrics with log-log rate fitting, and a
//! suite of numerical checkers for the asymptotic claims. Each major
//! capability has a runnable demo under `examples/`; the thin `cwlab` binary
//! drives batch experiments.

pub mod error;
pub mod exact;
pub mod measures;

mod quad;
mod special;

pub use error::{Error, Result};
