//! Gauging how close a step graphon or a sampled graph is to Robinson form.
//!
//! A graphon `w` is *Robinson* when `w(x,z) <= min(w(x,y), w(y,z))` for all
//! `x <= y <= z`: link strength only decays as points move apart on the line.
//! This crate measures deviation from that shape and builds Robinson
//! approximations:
//!
//! * [`graphon`] — step graphons on a uniform grid, closed-form graphon
//!   families, stepping and shift operators, the Robinson violation score.
//! * [`cutnorm`] — exact and heuristic cut norms of step kernels, plus a
//!   block-permutation cut-distance search.
//! * [`gamma`] — the gauge `Γ(w, A)` evaluated in closed form for
//!   grid-aligned `A`, maximized exhaustively or by local search, and
//!   quadruple lower-bound certificates.
//! * [`approx`] — the Robinson approximation `R_w`, black/white/grey region
//!   maps, and approximation-error reports.
//! * [`graph`] — seeded w-random graphs and the discrete gauge `Γ*` over
//!   vertex orderings, with spectral (Fiedler) ordering.
//!
//! The crate is `no_std` + `alloc`; all types are immutable after
//! construction and every operation is a pure function, so values can be
//! shared freely across threads.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod approx;
pub mod bits;
pub mod cutnorm;
mod error;
pub mod gamma;
pub mod graph;
pub mod graphon;
mod spectral;

pub use error::{Error, Result};
pub use graphon::{GraphonSpec, IntervalSet, StepGraphon, StepKernel};

/// Cheap stateless mixer for deriving per-task seeds from a base seed.
///
/// Distinct `(base, stream)` pairs map to well-separated seeds; used so that
/// restart batches and experiment replicates stay deterministic no matter
/// how work is scheduled.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
