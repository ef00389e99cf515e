//! Monte Carlo laboratory for discrete- and continuous-time random walks in a
//! one-dimensional Lévy random medium.
//!
//! The medium is a two-sided point process `ω` on the real line with `ω_0 = 0`
//! and i.i.d. positive gaps. An integer random walk `S` picks which target is
//! visited next; the flight `Y_n = ω_{S_n}` jumps between targets and the gas
//! `X(t)` walks between them at unit speed.
//!
//! Modules map onto the pieces of the laboratory:
//!
//! * [`stable`]: α-stable sampling and marginals of stable Lévy processes.
//! * [`medium`]: gap laws and the lazily extended medium window.
//! * [`walks`]: increment laws, walk paths, flights and gas trajectories.
//! * [`limits`]: samplers for the limit processes used as references.
//! * [`constants`]: closed-form constants and their quadratures.
//! * [`stats`]: quenched/annealed ensembles, estimators and tests.
//! * [`scenario`]: reproducible scenarios with CSV/JSON reports.

pub mod constants;
pub mod error;
pub mod limits;
pub mod medium;
pub mod par;
pub mod quadrature;
pub mod rng;
pub mod scenario;
pub mod special;
pub mod stable;
pub mod stats;
pub mod walks;

pub use error::{Error, Result};
