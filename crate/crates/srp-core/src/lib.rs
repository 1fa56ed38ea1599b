//! Stochastic ranking process toolkit.
//!
//! An N-particle move-to-front system: particle `i` starts at rank `x_i` and
//! jumps to rank 1 at the points of its own inhomogeneous Poisson process
//! with intensity measure ρ_i, pushing the particles it passes down one
//! rank. The crate provides
//!
//! - exact event sampling and lazy O(log N) position queries ([`ranking`]),
//! - the deterministic N→∞ limit of the empirical rank distribution for
//!   finite intensity mixtures: boundary curve y_C, characteristics y_A/y_B
//!   and their inverses, and the per-class tails U_α(y,t) ([`limit`]),
//! - finite-difference and characteristic-ODE verification that those tails
//!   solve the associated inviscid-Burgers-with-evaporation system
//!   ([`burgers`]),
//! - the total-jump time change, Zipf weight families with Pareto limit, and
//!   the incomplete-gamma ranking curve x_b(S) ([`timechange`]),
//! - least-squares fitting of the Pareto exponent b from (S, x) observations
//!   with bootstrap confidence intervals ([`fit`]).
//!
//! All randomness flows through seeded ChaCha streams; replicas, particles,
//! and bootstrap resamples use disjoint stream counters, so every result is
//! reproducible bit-for-bit from a seed.

pub mod burgers;
pub mod fit;
pub mod intensity;
pub mod limit;
pub mod ranking;
pub mod special;
pub mod timechange;

pub use intensity::{ActivityProfile, IntensityError, IntensitySpec, MixtureAtom, MixtureSpec};
pub use limit::{LimitError, LimitEvaluator};
pub use ranking::{EmpiricalSnapshot, Layout, ParticleSystem, RankingError};
