//! Waveform-side primitives: constellations, resource grids, modulators.
//!
//! Submodules:
//! * constellation mapping lives here (`Constellation`);
//! * [`grid`] — pilot/data resource grids shared by all waveforms;
//! * [`ofdm`] — CP-OFDM (de)modulation with unitary DFTs;
//! * [`otfs`] — OTFS as ISFFT + CP-OFDM, mapping delay–Doppler grids to the
//!   same time-sample interface.

pub mod grid;
pub mod ofdm;
pub mod otfs;

use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

/// Errors from bit mapping and grid/frame assembly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignalError {
    /// Bit-vector length is not a multiple of bits-per-symbol.
    InvalidBitLength { len: usize, bits_per_symbol: usize },
    /// Data symbol count does not match the grid's data capacity.
    GridFillError { expected: usize, got: usize },
    /// Sample count is not a whole number of OFDM symbols.
    FramingError { len: usize, frame: usize },
    /// Pilot pattern preconditions not met for this grid geometry.
    PatternUnsupported { reason: &'static str },
}

impl core::fmt::Display for SignalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SignalError::InvalidBitLength { len, bits_per_symbol } => write!(
                f,
                "bit vector length {len} is not a multiple of {bits_per_symbol}"
            ),
            SignalError::GridFillError { expected, got } => {
                write!(f, "grid expects {expected} data symbols per stream, got {got}")
            }
            SignalError::FramingError { len, frame } => {
                write!(f, "sample count {len} is not a multiple of the frame {frame}")
            }
            SignalError::PatternUnsupported { reason } => {
                write!(f, "pilot pattern unsupported here: {reason}")
            }
        }
    }
}

impl core::error::Error for SignalError {}

/// Gray-labelled square QAM constellations with unit average power.
///
/// Labels follow the I/Q-separable convention used in cellular standards:
/// even-position bits steer I, odd-position bits steer Q, and along each axis
/// adjacent amplitude levels differ in exactly one bit. A symbol index is its
/// bit label read MSB-first, e.g. QPSK `00 → (+1+i)/√2`, `11 → (−1−i)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constellation {
    Qpsk,
    Qam16,
    Qam64,
}

impl Constellation {
    /// Number of constellation points (4 / 16 / 64).
    pub fn order(self) -> usize {
        match self {
            Constellation::Qpsk => 4,
            Constellation::Qam16 => 16,
            Constellation::Qam64 => 64,
        }
    }

    /// Bits carried per symbol (2 / 4 / 6).
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Constellation::Qpsk => 2,
            Constellation::Qam16 => 4,
            Constellation::Qam64 => 6,
        }
    }

    /// Point for a bit label packed MSB-first into `index`.
    pub fn point(self, index: usize) -> Complex64 {
        debug_assert!(index < self.order());
        let b = |k: usize| -> f64 {
            // k-th bit of the label, MSB first.
            let shift = self.bits_per_symbol() - 1 - k;
            1.0 - 2.0 * ((index >> shift) & 1) as f64
        };
        match self {
            Constellation::Qpsk => {
                let norm = 1.0 / 2f64.sqrt();
                Complex64::new(b(0) * norm, b(1) * norm)
            }
            Constellation::Qam16 => {
                let norm = 1.0 / 10f64.sqrt();
                let i = b(0) * (2.0 - b(2));
                let q = b(1) * (2.0 - b(3));
                Complex64::new(i * norm, q * norm)
            }
            Constellation::Qam64 => {
                let norm = 1.0 / 42f64.sqrt();
                let i = b(0) * (4.0 - b(2) * (2.0 - b(4)));
                let q = b(1) * (4.0 - b(3) * (2.0 - b(5)));
                Complex64::new(i * norm, q * norm)
            }
        }
    }

    /// All points in label order.
    pub fn points(self) -> Vec<Complex64> {
        (0..self.order()).map(|i| self.point(i)).collect()
    }

    /// Maps a 0/1 bit vector to symbols, MSB first per symbol.
    pub fn map_bits(self, bits: &[u8]) -> Result<Vec<Complex64>, SignalError> {
        let bps = self.bits_per_symbol();
        if bits.len() % bps != 0 {
            return Err(SignalError::InvalidBitLength {
                len: bits.len(),
                bits_per_symbol: bps,
            });
        }
        Ok(bits
            .chunks(bps)
            .map(|chunk| {
                let mut idx = 0usize;
                for &b in chunk {
                    debug_assert!(b <= 1);
                    idx = (idx << 1) | b as usize;
                }
                self.point(idx)
            })
            .collect())
    }

    /// Index of the nearest constellation point (minimum Euclidean distance;
    /// ties resolve to the smaller index, making slicing deterministic).
    pub fn nearest(self, y: Complex64) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for idx in 0..self.order() {
            let d = (y - self.point(idx)).norm_sqr();
            if d < best_d {
                best_d = d;
                best = idx;
            }
        }
        best
    }

    /// Unpacks a symbol index back into its bit label, MSB first.
    pub fn index_bits(self, index: usize) -> Vec<u8> {
        let bps = self.bits_per_symbol();
        (0..bps)
            .map(|k| ((index >> (bps - 1 - k)) & 1) as u8)
            .collect()
    }
}
