//! Experiment harness: JSON configs in, deterministic CSV tables out.
//!
//! The library half exists so integration tests can drive experiments
//! without spawning the binary; the binary is a thin clap wrapper around
//! [`experiments::run_experiment`].

pub mod config;
pub mod csvout;
pub mod experiments;
