//! OTFS modulation: delay–Doppler grids carried over CP-OFDM.
//!
//! The inverse symplectic finite Fourier transform (ISFFT) maps a
//! delay–Doppler grid (rows = Doppler bins, columns = delay bins) to a
//! time–frequency grid of the same shape, which then rides the ordinary
//! CP-OFDM modulator. Each delay–Doppler point spreads over the whole TTI,
//! so a doubly dispersive channel that smears energy in both time and
//! frequency acts on every symbol the same way — a sparse twist instead of
//! a per-subcarrier fade.
//!
//! With unitary DFTs in both directions the ISFFT/SFFT pair is an exact
//! inverse, so modulate → demodulate reproduces the grid to rounding error.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math::dft::{dft, idft};

use super::grid::ValueGrid;
use super::ofdm::{ofdm_demodulate, ofdm_modulate};
use super::SignalError;

/// Delay–Doppler → time–frequency: forward DFT along delay (columns),
/// inverse DFT along Doppler (rows).
pub fn isfft(dd: &ValueGrid) -> ValueGrid {
    let n = dd.n_symbols;
    let m = dd.n_subcarriers;
    let mut tf = ValueGrid::zeros(n, m);
    // Delay → frequency, one Doppler row at a time.
    for k in 0..n {
        let row = dft(dd.row(k));
        for (col, v) in row.into_iter().enumerate() {
            tf.set(k, col, v);
        }
    }
    // Doppler → time, one frequency column at a time.
    for col in 0..m {
        let column: Vec<Complex64> = (0..n).map(|k| tf.at(k, col)).collect();
        let time = idft(&column);
        for (row, v) in time.into_iter().enumerate() {
            tf.set(row, col, v);
        }
    }
    tf
}

/// Time–frequency → delay–Doppler: exact inverse of [`isfft`].
pub fn sfft(tf: &ValueGrid) -> ValueGrid {
    let n = tf.n_symbols;
    let m = tf.n_subcarriers;
    let mut dd = ValueGrid::zeros(n, m);
    // Time → Doppler, one frequency column at a time.
    for col in 0..m {
        let column: Vec<Complex64> = (0..n).map(|row| tf.at(row, col)).collect();
        let doppler = dft(&column);
        for (k, v) in doppler.into_iter().enumerate() {
            dd.set(k, col, v);
        }
    }
    // Frequency → delay, one Doppler row at a time.
    for k in 0..n {
        let row = idft(dd.row(k));
        for (col, v) in row.into_iter().enumerate() {
            dd.set(k, col, v);
        }
    }
    dd
}

/// Modulates a delay–Doppler grid to time samples (ISFFT, then CP-OFDM).
pub fn otfs_modulate(dd: &ValueGrid, cp_len: usize) -> Result<Vec<Complex64>, SignalError> {
    ofdm_modulate(&isfft(dd), cp_len)
}

/// Demodulates time samples back to a delay–Doppler grid.
pub fn otfs_demodulate(
    samples: &[Complex64],
    n_delay_bins: usize,
    cp_len: usize,
) -> Result<ValueGrid, SignalError> {
    Ok(sfft(&ofdm_demodulate(samples, n_delay_bins, cp_len)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::rng::Rng;
    use alloc::vec::Vec;

    fn random_grid(seed: u64, n: usize, m: usize) -> ValueGrid {
        let mut rng = Rng::new(seed);
        let values: Vec<Complex64> = (0..n * m).map(|_| rng.complex_normal()).collect();
        ValueGrid::from_flat(n, m, values)
    }

    #[test]
    fn sfft_inverts_isfft() {
        let dd = random_grid(1, 16, 32);
        let back = sfft(&isfft(&dd));
        for k in 0..16 {
            for l in 0..32 {
                assert!((back.at(k, l) - dd.at(k, l)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn impulse_spreads_flat() {
        // A single delay–Doppler spike becomes a unimodular time–frequency
        // sheet: every TF sample has magnitude 1/√(NM).
        let mut dd = ValueGrid::zeros(8, 16);
        dd.set(3, 5, Complex64::new(1.0, 0.0));
        let tf = isfft(&dd);
        let expect = 1.0 / (8.0f64 * 16.0).sqrt();
        for n in 0..8 {
            for m in 0..16 {
                assert!((tf.at(n, m).norm() - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn modulate_demodulate_round_trip() {
        for (n, m, cp) in [(16, 32, 8), (14, 12, 3), (4, 4, 0)] {
            let dd = random_grid(9, n, m);
            let samples = otfs_modulate(&dd, cp).unwrap();
            let back = otfs_demodulate(&samples, m, cp).unwrap();
            for k in 0..n {
                for l in 0..m {
                    assert!((back.at(k, l) - dd.at(k, l)).norm() < 1e-12, "({k},{l})");
                }
            }
        }
    }

    #[test]
    fn isfft_preserves_energy() {
        let dd = random_grid(17, 12, 24);
        let tf = isfft(&dd);
        assert!((tf.energy() - dd.energy()).abs() < 1e-9 * dd.energy());
    }
}
