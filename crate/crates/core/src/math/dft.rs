//! Unitary discrete Fourier transforms.
//!
//! Forward: `X[k] = (1/sqrt(N)) * sum_n x[n] exp(-2πi k n / N)`
//! Inverse: `x[n] = (1/sqrt(N)) * sum_k X[k] exp(+2πi k n / N)`
//!
//! Power-of-two lengths run through an iterative radix-2 Cooley–Tukey;
//! everything else falls back to the direct O(N^2) sum with a precomputed
//! twiddle table indexed by `(k*n) mod N`, which keeps angles small and the
//! result independent of evaluation order. Desk-scale grids (N ≤ a few
//! thousand) make the fallback perfectly affordable.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

/// Unitary forward DFT.
pub fn dft(x: &[Complex64]) -> Vec<Complex64> {
    transform(x, -1.0)
}

/// Unitary inverse DFT.
pub fn idft(x: &[Complex64]) -> Vec<Complex64> {
    transform(x, 1.0)
}

fn transform(x: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = if n.is_power_of_two() {
        radix2(x, sign)
    } else {
        direct(x, sign)
    };
    let scale = 1.0 / (n as f64).sqrt();
    for v in &mut out {
        *v *= scale;
    }
    out
}

fn twiddle(sign: f64, num: f64, den: f64) -> Complex64 {
    let angle = sign * core::f64::consts::TAU * num / den;
    Complex64::new(angle.cos(), angle.sin())
}

fn radix2(x: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = x.len();
    if n == 1 {
        return x.to_vec();
    }
    let mut a = vec![Complex64::new(0.0, 0.0); n];
    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for (i, &v) in x.iter().enumerate() {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        a[j] = v;
    }
    let mut len = 2;
    while len <= n {
        let step = twiddle(sign, 1.0, len as f64);
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = a[start + k];
                let t = a[start + k + len / 2] * w;
                a[start + k] = u + t;
                a[start + k + len / 2] = u - t;
                w *= step;
            }
        }
        len <<= 1;
    }
    a
}

fn direct(x: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = x.len();
    let table: Vec<Complex64> = (0..n)
        .map(|j| twiddle(sign, j as f64, n as f64))
        .collect();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, &v) in x.iter().enumerate() {
                acc += v * table[(k * m) % n];
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use crate::math::rng::Rng;

    fn assert_close(a: Complex64, b: Complex64, tol: f64, msg: &str) {
        assert!((a - b).norm() <= tol, "{msg}: {a} vs {b}");
    }

    #[test]
    fn matches_direct_sum_on_power_of_two() {
        // Radix-2 path cross-checked against the O(N^2) definition.
        let mut rng = Rng::new(11);
        let x = rng.complex_normal_vec(64);
        let fast = dft(&x);
        let slow = direct(&x, -1.0);
        for (k, (f, s)) in fast.iter().zip(slow.iter()).enumerate() {
            assert_close(*f, *s / 8.0, 1e-12, &format!("bin {k}"));
        }
    }

    #[test]
    fn round_trip_various_lengths() {
        let mut rng = Rng::new(5);
        for n in [1usize, 2, 3, 12, 14, 93, 256] {
            let x = rng.complex_normal_vec(n);
            let back = idft(&dft(&x));
            for (i, (a, b)) in x.iter().zip(back.iter()).enumerate() {
                assert_close(*a, *b, 1e-12, &format!("n={n} i={i}"));
            }
        }
    }

    #[test]
    fn unitary_preserves_energy() {
        let mut rng = Rng::new(6);
        for n in [12usize, 16, 168] {
            let x = rng.complex_normal_vec(n);
            let y = dft(&x);
            let ex: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            let ey: f64 = y.iter().map(|v| v.norm_sqr()).sum();
            assert!((ex - ey).abs() <= 1e-10 * ex, "n={n}: {ex} vs {ey}");
        }
    }

    #[test]
    fn impulse_becomes_flat() {
        let mut x = vec![Complex64::new(0.0, 0.0); 8];
        x[0] = Complex64::new(1.0, 0.0);
        let y = dft(&x);
        for v in y {
            assert_close(v, Complex64::new(1.0 / 8f64.sqrt(), 0.0), 1e-14, "flat");
        }
    }
}
