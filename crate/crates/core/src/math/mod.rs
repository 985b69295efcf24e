//! Self-contained numerical kernels.
//!
//! Everything here is hand-rolled on purpose: the simulation contract requires
//! bit-identical results for a given seed across platforms and run orders, so
//! all transcendentals go through `libm` (pure software floating point) and no
//! external FFT/LAPACK backend is involved.

pub mod dft;
pub mod eig;
pub mod linalg;
pub mod rng;
