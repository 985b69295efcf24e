//! Core algorithms for a link-level physical-layer simulation laboratory.
//!
//! The crate provides the building blocks for benchmarking a reservoir-based
//! neural receiver against classical LMMSE receivers on dispersive wireless
//! channels:
//!
//! * [`signal`] — Gray-labelled QAM constellations, pilot/data resource grids,
//!   and OFDM / OTFS (de)modulators with unitary DFT conventions.
//! * [`channel`] — FIR and rational (IIR) channel application, tapped-delay-line
//!   realizations with exponential power-delay profiles, Jakes sum-of-sinusoids
//!   Doppler evolution, and seeded AWGN.
//! * [`deconv`] — exact channel inversion via partial fractions: a minimum-phase
//!   FIR (or rational) channel's inverse expressed as a parallel bank of
//!   one-pole IIR sections plus skip taps, together with the state-space
//!   modal equivalence.
//! * [`reservoir`] — the trainable counterpart of [`deconv`]: a bank of fixed,
//!   randomly placed one-pole neurons whose linear readout is fitted by ridge
//!   regression on scarce known samples.
//! * [`receivers`] — end-to-end detectors: the per-TTI-trained neural receiver
//!   and pilot-estimated / genie LMMSE baselines.
//! * [`math`] — self-contained numerics: unitary DFTs, dense complex linear
//!   algebra, complex eigensolvers, and a bit-exact seeded RNG.
//!
//! The crate is `no_std` (with `alloc`); all randomness flows through the
//! explicit seeded generators in [`math::rng`], so every result is reproducible
//! bit-for-bit across platforms and thread schedules. IO, configuration files,
//! and experiment orchestration live in the companion harness crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod channel;
pub mod deconv;
pub mod math;
pub mod receivers;
pub mod reservoir;
pub mod signal;

pub use num_complex::Complex64;
