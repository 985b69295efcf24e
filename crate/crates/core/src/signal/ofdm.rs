//! CP-OFDM modulation with unitary transforms.
//!
//! Each grid row (one OFDM symbol of subcarrier values) passes through a
//! unitary inverse DFT and gets a cyclic prefix: the last `cp_len` time
//! samples are copied in front of the symbol body. Demodulation strips the
//! prefix and applies the forward DFT. Because both transforms are unitary,
//! modulate → demodulate is an exact identity and per-symbol energy is
//! preserved up to the prefix's deliberate redundancy.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math::dft::{dft, idft};

use super::grid::ValueGrid;
use super::SignalError;

/// Serializes a grid to time samples: per row, unitary IDFT then cyclic
/// prefix. Output length is `n_symbols * (cp_len + n_subcarriers)`.
pub fn ofdm_modulate(grid: &ValueGrid, cp_len: usize) -> Result<Vec<Complex64>, SignalError> {
    if cp_len >= grid.n_subcarriers {
        return Err(SignalError::FramingError {
            len: cp_len,
            frame: grid.n_subcarriers,
        });
    }
    let mut out = Vec::with_capacity(grid.n_symbols * (cp_len + grid.n_subcarriers));
    for sym in 0..grid.n_symbols {
        let body = idft(grid.row(sym));
        out.extend_from_slice(&body[grid.n_subcarriers - cp_len..]);
        out.extend_from_slice(&body);
    }
    Ok(out)
}

/// Inverse of [`ofdm_modulate`]: drops each cyclic prefix and applies the
/// forward DFT per symbol. The sample count must be a whole number of
/// `cp_len + n_subcarriers` frames.
pub fn ofdm_demodulate(
    samples: &[Complex64],
    n_subcarriers: usize,
    cp_len: usize,
) -> Result<ValueGrid, SignalError> {
    if cp_len >= n_subcarriers {
        return Err(SignalError::FramingError {
            len: cp_len,
            frame: n_subcarriers,
        });
    }
    let frame = cp_len + n_subcarriers;
    if frame == 0 || samples.len() % frame != 0 {
        return Err(SignalError::FramingError {
            len: samples.len(),
            frame,
        });
    }
    let n_symbols = samples.len() / frame;
    let mut values = Vec::with_capacity(n_symbols * n_subcarriers);
    for sym in 0..n_symbols {
        let body = &samples[sym * frame + cp_len..(sym + 1) * frame];
        values.extend_from_slice(&dft(body));
    }
    Ok(ValueGrid::from_flat(n_symbols, n_subcarriers, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::rng::Rng;
    use alloc::vec::Vec;

    fn random_grid(seed: u64, n_symbols: usize, n_subcarriers: usize) -> ValueGrid {
        let mut rng = Rng::new(seed);
        let values: Vec<Complex64> = (0..n_symbols * n_subcarriers)
            .map(|_| rng.complex_normal())
            .collect();
        ValueGrid::from_flat(n_symbols, n_subcarriers, values)
    }

    #[test]
    fn single_dc_subcarrier_is_constant() {
        // A lone value on subcarrier zero spreads evenly over the symbol:
        // the unitary IDFT of e_0 scaled by one is 1/√N everywhere.
        let mut grid = ValueGrid::zeros(1, 256);
        grid.set(0, 0, Complex64::new(1.0, 0.0));
        let samples = ofdm_modulate(&grid, 0).unwrap();
        let expect = 1.0 / 16.0;
        for s in &samples {
            assert!((s - Complex64::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_is_exact() {
        for (n_sym, n_sc, cp) in [(14, 12, 3), (4, 256, 18), (2, 7, 2), (1, 1, 0)] {
            let grid = random_grid(41, n_sym, n_sc);
            let samples = ofdm_modulate(&grid, cp).unwrap();
            assert_eq!(samples.len(), n_sym * (cp + n_sc));
            let back = ofdm_demodulate(&samples, n_sc, cp).unwrap();
            assert_eq!(back.n_symbols, n_sym);
            for sym in 0..n_sym {
                for sc in 0..n_sc {
                    assert!((back.at(sym, sc) - grid.at(sym, sc)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn prefix_copies_symbol_tail() {
        let grid = random_grid(5, 2, 16);
        let cp = 4;
        let samples = ofdm_modulate(&grid, cp).unwrap();
        for sym in 0..2 {
            let frame = &samples[sym * 20..(sym + 1) * 20];
            assert_eq!(&frame[..cp], &frame[16..]);
        }
    }

    #[test]
    fn body_energy_preserved() {
        let grid = random_grid(6, 3, 64);
        let samples = ofdm_modulate(&grid, 0).unwrap();
        let time: f64 = samples.iter().map(|v| v.norm_sqr()).sum();
        assert!((time - grid.energy()).abs() < 1e-9 * grid.energy());
    }

    #[test]
    fn framing_errors() {
        let grid = random_grid(7, 1, 8);
        assert!(matches!(
            ofdm_modulate(&grid, 8),
            Err(SignalError::FramingError { .. })
        ));
        let samples = ofdm_modulate(&grid, 2).unwrap();
        assert!(matches!(
            ofdm_demodulate(&samples[..9], 8, 2),
            Err(SignalError::FramingError { len: 9, frame: 10 })
        ));
    }
}
