//! Time-domain buffer-sharing cache analysis.
//!
//! A cached content item occupies a buffer slot from its arrival until it is
//! either requested (a hit) or its maximum caching time expires. This crate
//! models the request-delay distribution of each content class, derives the
//! hit-ratio / storage-cost tradeoff and its optimal randomized frontier,
//! allocates storage across heterogeneous classes, computes blocking for
//! finite buffers (Erlang-B and a diffusion approximation), optimizes the
//! finite-buffer operating point, and validates everything against a
//! discrete-event loss-queue simulator.
//!
//! Module map:
//!
//! * [`rdi`] — request-delay distributions (base families, transforms, mixtures)
//! * [`ratecost`] — per-class hit-ratio vs. mean-caching-time curves and envelopes
//! * [`allocator`] — multi-class storage allocation and the overall cost-rate curve
//! * [`blocking`] — Erlang-B, diffusion approximation, peakedness
//! * [`finite_opt`] — finite-buffer hit-ratio maximization and quasi-concavity checks
//! * [`simulator`] — G/GI/L/0 discrete-event simulation
//! * [`controller`] — online shadow-price adaptation without arrival statistics
//! * [`presets`] — the standard content classes `p1`..`p10` and flows `pi1`..`pi3`
//! * [`validation`] — the machine-checkable acceptance criteria

pub mod allocator;
pub mod blocking;
pub mod controller;
mod error;
pub mod finite_opt;
pub mod numeric;
pub mod presets;
pub mod ratecost;
pub mod rdi;
pub mod simulator;
pub mod validation;

pub use allocator::{Allocation, CachingTimeLaw, FlowModel, FlowSpec, OverallCurve};
pub use error::Error;
pub use finite_opt::FiniteOptResult;
pub use ratecost::{CachePolicy, Envelope, RateCostCurve};
pub use rdi::{BaseFamily, Moments, RdiSpec, Transform};
pub use simulator::{ArrivalProcess, SimConfig, SimReport};

pub type Result<T> = std::result::Result<T, Error>;
