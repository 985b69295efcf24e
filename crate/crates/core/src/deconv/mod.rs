//! Exact channel inversion by partial fractions.
//!
//! A dispersive channel with taps `h_0..h_k` acts as the polynomial
//! `H(Z) = h_0 + h_1 Z^-1 + … + h_k Z^-k` in the unit delay `Z^-1`. Writing
//! `x = Z^-1` and factoring `H̃(x) = h_k·Π (x − x_r)`, the zero-forcing
//! inverse decomposes into first-order sections:
//!
//! ```text
//! F(Z) = 1 / H(Z) = Σ_i  w_i / (1 − p_i Z^-1),      p_i = 1 / x_i
//! ```
//!
//! i.e. a *parallel bank of one-pole IIR filters* — each section is the
//! recursion `s_i[n] = p_i s_i[n−1] + x[n]` scaled by its weight `w_i`. The
//! decomposition exists whenever the channel is minimum phase (all `|p_i| < 1`)
//! with simple zeros. Rational channels `H = a/b` invert the same way with an
//! extra FIR ("skip tap") part from polynomial long division:
//!
//! ```text
//! F(Z) = b(Z) / a(Z) = Σ_i w_i / (1 − p_i Z^-1)  +  Σ_j α_j Z^-j
//! ```
//!
//! The same form arises from any stable diagonalizable state-space model via
//! its eigendecomposition ([`modal_decomposition`]), which is what connects
//! these exact inverses to banks of linear recurrent neurons: poles are the
//! recurrent gains, weights are the readout.
//!
//! Conventions: polynomial coefficient slices are ascending powers of
//! `x = Z^-1` (index = delay in samples). Roots are computed in `x` and
//! inverted to poles `p = 1/x`, so "minimum phase" reads `|p| < 1`.

mod state_space;

pub use state_space::{modal_decomposition, modal_decomposition_siso, StateSpaceModel};

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::math::eig::{self};
use crate::math::linalg::CMat;

/// Largest polynomial degree accepted by the companion-matrix root finder.
pub const MAX_DEGREE: usize = 64;

/// Minimum pole separation below which partial fractions are refused.
pub const MIN_POLE_SEPARATION: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A filter expressed as parallel one-pole sections plus skip taps:
/// `F(Z) = Σ_i weights[i] / (1 − poles[i]·Z^-1) + Σ_j skip_taps[j]·Z^-j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleWeightForm {
    /// Section poles, each strictly inside the unit circle, pairwise distinct.
    pub poles: Vec<Complex64>,
    /// Section gains (residues), aligned with `poles`.
    pub weights: Vec<Complex64>,
    /// FIR part: `skip_taps[j]` multiplies `x[n−j]`.
    pub skip_taps: Vec<Complex64>,
}

/// Failures of the inversion and decomposition routines.
#[derive(Clone, Debug, PartialEq)]
pub enum DeconvError {
    /// Leading coefficient (h_0 or a_0) is zero: the filter has a bare delay
    /// and no causal inverse in this form.
    ZeroLeadingCoefficient,
    /// Polynomial degree exceeds [`MAX_DEGREE`].
    DegreeTooHigh { degree: usize },
    /// QR iteration did not converge, or recomposing the computed roots does
    /// not reproduce the input coefficients within 1e-8·‖coeffs‖.
    RootFindingFailed,
    /// Some inverse pole lies on or outside the unit circle.
    NotMinimumPhase { max_pole_magnitude: f64 },
    /// Two poles closer than [`MIN_POLE_SEPARATION`]: residues blow up.
    RepeatedPoles { separation: f64 },
    /// State-space matrix has spectral radius ≥ 1.
    UnstableSystem { spectral_radius: f64 },
    /// Eigenbasis is numerically unusable (near-defective matrix).
    IllConditionedEigenbasis,
    /// State-space dimensions are inconsistent.
    DimensionMismatch,
}

impl core::fmt::Display for DeconvError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DeconvError::ZeroLeadingCoefficient => {
                write!(f, "leading coefficient is zero; no causal inverse")
            }
            DeconvError::DegreeTooHigh { degree } => {
                write!(f, "polynomial degree {degree} exceeds cap {MAX_DEGREE}")
            }
            DeconvError::RootFindingFailed => {
                write!(f, "root finding failed to reproduce the coefficients")
            }
            DeconvError::NotMinimumPhase { max_pole_magnitude } => write!(
                f,
                "channel is not minimum phase: |p|max = {max_pole_magnitude}"
            ),
            DeconvError::RepeatedPoles { separation } => {
                write!(f, "poles closer than {MIN_POLE_SEPARATION} (min gap {separation})")
            }
            DeconvError::UnstableSystem { spectral_radius } => {
                write!(f, "state matrix spectral radius {spectral_radius} >= 1")
            }
            DeconvError::IllConditionedEigenbasis => {
                write!(f, "eigenbasis is ill conditioned (near-defective matrix)")
            }
            DeconvError::DimensionMismatch => write!(f, "state-space dimensions disagree"),
        }
    }
}

impl core::error::Error for DeconvError {}

/// Drops trailing coefficients that are zero relative to the largest one.
fn trim_trailing(coeffs: &[Complex64]) -> Vec<Complex64> {
    let maxmag = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut out: Vec<Complex64> = coeffs.to_vec();
    while out.len() > 1 {
        if out.last().unwrap().norm() <= 1e-14 * maxmag {
            out.pop();
        } else {
            break;
        }
    }
    out
}

/// Horner evaluation of an ascending-coefficient polynomial.
fn poly_eval(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = ZERO;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Evaluates the derivative of an ascending-coefficient polynomial.
fn poly_derivative_eval(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = ZERO;
    for (i, &c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * x + c * (i as f64);
    }
    acc
}

/// Long division `num / den` on ascending coefficients:
/// returns (quotient, remainder) with deg(remainder) < deg(den).
fn poly_divide(num: &[Complex64], den: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    if dn < dd {
        return (Vec::new(), num.to_vec());
    }
    let mut rem: Vec<Complex64> = num.to_vec();
    let mut quot = vec![ZERO; dn - dd + 1];
    let lead = den[dd];
    for k in (0..=dn - dd).rev() {
        let q = rem[dd + k] / lead;
        quot[k] = q;
        for j in 0..=dd {
            let d = den[j];
            rem[j + k] -= q * d;
        }
    }
    rem.truncate(dd.max(1));
    (quot, rem)
}

/// Roots of a complex polynomial given as ascending coefficients
/// `c_0 + c_1 x + … + c_n x^n`, via the eigenvalues of its companion matrix.
///
/// Trailing (numerically) zero coefficients are trimmed first; a constant
/// polynomial yields an empty root list. The computed roots are validated by
/// recomposition: `c_n·Π(x − x_i)` must match the input within
/// `1e-8·‖coeffs‖₂`, otherwise [`DeconvError::RootFindingFailed`] is returned.
pub fn find_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, DeconvError> {
    let c = trim_trailing(coeffs);
    let degree = c.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    if degree > MAX_DEGREE {
        return Err(DeconvError::DegreeTooHigh { degree });
    }
    let lead = c[degree];
    // Companion matrix of the monic polynomial: ones on the subdiagonal,
    // negated monic coefficients in the last column.
    let mut comp = CMat::zeros(degree, degree);
    for i in 1..degree {
        comp[(i, i - 1)] = ONE;
    }
    for i in 0..degree {
        comp[(i, degree - 1)] = -c[i] / lead;
    }
    let roots = eig::eigenvalues(&comp).map_err(|_| DeconvError::RootFindingFailed)?;
    // Validate by multiplying the factors back out.
    let mut recomposed = vec![ONE];
    for &r in &roots {
        let mut next = vec![ZERO; recomposed.len() + 1];
        for (i, &co) in recomposed.iter().enumerate() {
            next[i + 1] += co;
            next[i] -= co * r;
        }
        recomposed = next;
    }
    let norm: f64 = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let err: f64 = recomposed
        .iter()
        .zip(c.iter())
        .map(|(r, v)| (r * lead - v).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if err > 1e-8 * norm {
        return Err(DeconvError::RootFindingFailed);
    }
    Ok(roots)
}

/// Converts roots in `x = Z^-1` to poles, enforcing minimum phase and
/// simple-pole separation.
fn roots_to_poles(roots: &[Complex64]) -> Result<Vec<Complex64>, DeconvError> {
    let poles: Vec<Complex64> = roots.iter().map(|&x| ONE / x).collect();
    let max_mag = poles.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if max_mag >= 1.0 {
        return Err(DeconvError::NotMinimumPhase {
            max_pole_magnitude: max_mag,
        });
    }
    let mut min_sep = f64::INFINITY;
    for i in 0..poles.len() {
        for j in i + 1..poles.len() {
            min_sep = min_sep.min((poles[i] - poles[j]).norm());
        }
    }
    if min_sep < MIN_POLE_SEPARATION {
        return Err(DeconvError::RepeatedPoles { separation: min_sep });
    }
    Ok(poles)
}

/// Inverts a minimum-phase FIR channel `h` into pole/weight form.
///
/// With `H̃(x) = Σ h_i x^i` and simple roots `x_r`, the residue of
/// `1/H̃` at `x_r` is `1/H̃'(x_r)`, giving section weights
/// `w_r = −p_r / H̃'(x_r)` for `p_r = 1/x_r`. A zero-order channel inverts to
/// a single skip tap `1/h_0`.
pub fn invert_fir(h: &[Complex64]) -> Result<PoleWeightForm, DeconvError> {
    assert!(!h.is_empty(), "invert_fir needs at least one tap");
    let h = trim_trailing(h);
    let maxmag = h.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if h[0].norm() <= 1e-14 * maxmag || maxmag == 0.0 {
        return Err(DeconvError::ZeroLeadingCoefficient);
    }
    if h.len() == 1 {
        return Ok(PoleWeightForm {
            poles: Vec::new(),
            weights: Vec::new(),
            skip_taps: vec![ONE / h[0]],
        });
    }
    let roots = find_roots(&h)?;
    let poles = roots_to_poles(&roots)?;
    let weights: Vec<Complex64> = roots
        .iter()
        .zip(poles.iter())
        .map(|(&x, &p)| -p / poly_derivative_eval(&h, x))
        .collect();
    Ok(PoleWeightForm {
        poles,
        weights,
        skip_taps: Vec::new(),
    })
}

/// Inverts a rational channel `H(Z) = a(Z)/b(Z)` into the pole/weight form of
/// `F(Z) = b(Z)/a(Z)`.
///
/// Long division `b = q·a + r` supplies the FIR part (`skip_taps = q`,
/// degree `max(0, deg b − deg a)`), and the strictly proper remainder `r/a`
/// decomposes over the inverted roots of `a`. `extra_delay` only pads the
/// skip taps with trailing zeros up to length `extra_delay + 1` (train-time
/// callers use the padding as room for delay compensation); an empty
/// quotient with `extra_delay = 0` stays empty.
pub fn invert_rational(
    a: &[Complex64],
    b: &[Complex64],
    extra_delay: usize,
) -> Result<PoleWeightForm, DeconvError> {
    assert!(!a.is_empty() && !b.is_empty(), "empty coefficient vector");
    let a = trim_trailing(a);
    let b = trim_trailing(b);
    let maxmag = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if a[0].norm() <= 1e-14 * maxmag || maxmag == 0.0 {
        return Err(DeconvError::ZeroLeadingCoefficient);
    }
    let (quot, rem) = poly_divide(&b, &a);
    let mut skip_taps = quot;
    if extra_delay > 0 && skip_taps.len() < extra_delay + 1 {
        skip_taps.resize(extra_delay + 1, ZERO);
    }
    let rem_is_zero = rem.iter().all(|c| c.norm() <= 1e-14 * maxmag);
    if a.len() == 1 || rem_is_zero {
        // Pure FIR inverse: q = b / a_0 already absorbed the whole quotient.
        return Ok(PoleWeightForm {
            poles: Vec::new(),
            weights: Vec::new(),
            skip_taps,
        });
    }
    let roots = find_roots(&a)?;
    let poles = roots_to_poles(&roots)?;
    let weights: Vec<Complex64> = roots
        .iter()
        .zip(poles.iter())
        .map(|(&x, &p)| -p * poly_eval(&rem, x) / poly_derivative_eval(&a, x))
        .collect();
    Ok(PoleWeightForm {
        poles,
        weights,
        skip_taps,
    })
}

/// First `n` samples of the form's impulse response:
/// `r[t] = Σ_i w_i p_i^t + skip_taps[t]`.
pub fn impulse_response(form: &PoleWeightForm, n: usize) -> Vec<Complex64> {
    let mut powers: Vec<Complex64> = vec![ONE; form.poles.len()];
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let mut acc = ZERO;
        for (pw, &w) in powers.iter_mut().zip(form.weights.iter()) {
            acc += w * *pw;
        }
        if t < form.skip_taps.len() {
            acc += form.skip_taps[t];
        }
        for (pw, &p) in powers.iter_mut().zip(form.poles.iter()) {
            *pw *= p;
        }
        out.push(acc);
    }
    out
}

/// Runs the filter over `x` by streaming the one-pole recursions:
/// `s_i[n] = p_i s_i[n−1] + x[n]`, `y[n] = Σ_i w_i s_i[n] + Σ_j α_j x[n−j]`.
/// State starts at zero; output length equals input length.
pub fn evaluate_filter(form: &PoleWeightForm, x: &[Complex64]) -> Vec<Complex64> {
    let mut states = vec![ZERO; form.poles.len()];
    let mut out = Vec::with_capacity(x.len());
    for (n, &xn) in x.iter().enumerate() {
        let mut acc = ZERO;
        for ((s, &p), &w) in states
            .iter_mut()
            .zip(form.poles.iter())
            .zip(form.weights.iter())
        {
            *s = p * *s + xn;
            acc += w * *s;
        }
        for (j, &alpha) in form.skip_taps.iter().enumerate() {
            if n >= j {
                acc += alpha * x[n - j];
            }
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use crate::math::rng::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64, msg: &str) {
        assert!((a - b).norm() <= tol, "{msg}: {a} vs {b}");
    }

    /// FIR convolution, the independent oracle used to verify inverses.
    fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] += ai * bj;
            }
        }
        out
    }

    // ---- find_roots ----

    #[test]
    fn roots_of_anchored_quadratic() {
        // 1 − 0.75x + 0.125x² has roots x ∈ {2, 4}.
        let roots = find_roots(&[c(1.0, 0.0), c(-0.75, 0.0), c(0.125, 0.0)]).unwrap();
        let mut mags: Vec<f64> = roots.iter().map(|r| r.re).collect();
        mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((mags[0] - 2.0).abs() < 1e-10, "{mags:?}");
        assert!((mags[1] - 4.0).abs() < 1e-10, "{mags:?}");
        for r in &roots {
            assert!(r.im.abs() < 1e-10);
        }
    }

    #[test]
    fn constant_polynomial_has_no_roots() {
        assert_eq!(find_roots(&[c(3.0, 0.0)]).unwrap(), Vec::new());
    }

    #[test]
    fn degree_cap_enforced() {
        let coeffs = vec![c(1.0, 0.0); 66]; // degree 65
        assert_eq!(
            find_roots(&coeffs),
            Err(DeconvError::DegreeTooHigh { degree: 65 })
        );
    }

    #[test]
    fn trailing_zeros_reduce_degree() {
        let roots = find_roots(&[c(1.0, 0.0), c(-0.5, 0.0), ZERO, ZERO]).unwrap();
        assert_eq!(roots.len(), 1);
        assert_close(roots[0], c(2.0, 0.0), 1e-12, "root");
    }

    // ---- invert_fir ----

    #[test]
    fn two_tap_geometric_inverse() {
        // h = [1, −0.5]: pole 0.5, weight 1, impulse response 0.5^t.
        let form = invert_fir(&[c(1.0, 0.0), c(-0.5, 0.0)]).unwrap();
        assert_eq!(form.poles.len(), 1);
        assert_close(form.poles[0], c(0.5, 0.0), 1e-12, "pole");
        assert_close(form.weights[0], c(1.0, 0.0), 1e-12, "weight");
        assert!(form.skip_taps.is_empty());
        let imp = impulse_response(&form, 5);
        for (t, v) in imp.iter().enumerate() {
            assert_close(*v, c(0.5f64.powi(t as i32), 0.0), 1e-12, &format!("t={t}"));
        }
    }

    #[test]
    fn anchored_three_tap_inverse() {
        // h = [1, −0.75, 0.125] → poles {0.5, 0.25}, weights {2, −1}.
        let h = [c(1.0, 0.0), c(-0.75, 0.0), c(0.125, 0.0)];
        let form = invert_fir(&h).unwrap();
        let mut pw: Vec<(Complex64, Complex64)> = form
            .poles
            .iter()
            .cloned()
            .zip(form.weights.iter().cloned())
            .collect();
        pw.sort_by(|x, y| y.0.norm().partial_cmp(&x.0.norm()).unwrap());
        assert_close(pw[0].0, c(0.5, 0.0), 1e-9, "pole 0");
        assert_close(pw[0].1, c(2.0, 0.0), 1e-9, "weight 0");
        assert_close(pw[1].0, c(0.25, 0.0), 1e-9, "pole 1");
        assert_close(pw[1].1, c(-1.0, 0.0), 1e-9, "weight 1");
        // Independent residue oracle: cover-up on the factored polynomial,
        // A_r = 1/(h_k · Π_{s≠r}(x_r − x_s)), w_r = −A_r·p_r.
        let xs = [c(2.0, 0.0), c(4.0, 0.0)];
        for (r, &xr) in xs.iter().enumerate() {
            let mut prod = h[2];
            for (s, &xsv) in xs.iter().enumerate() {
                if s != r {
                    prod *= xr - xsv;
                }
            }
            let w_oracle = -(ONE / xr) / prod;
            let idx = form
                .poles
                .iter()
                .position(|p| (p - ONE / xr).norm() < 1e-9)
                .expect("pole present");
            assert_close(form.weights[idx], w_oracle, 1e-9, &format!("cover-up {r}"));
        }
        // Anchored impulse response prefix.
        let imp = impulse_response(&form, 3);
        assert_close(imp[0], c(1.0, 0.0), 1e-9, "imp 0");
        assert_close(imp[1], c(0.75, 0.0), 1e-9, "imp 1");
        assert_close(imp[2], c(0.4375, 0.0), 1e-9, "imp 2");
    }

    #[test]
    fn non_minimum_phase_rejected() {
        // h = [1, −2]: inverse pole at 2.
        match invert_fir(&[c(1.0, 0.0), c(-2.0, 0.0)]) {
            Err(DeconvError::NotMinimumPhase { max_pole_magnitude }) => {
                assert!((max_pole_magnitude - 2.0).abs() < 1e-9)
            }
            other => panic!("expected NotMinimumPhase, got {other:?}"),
        }
    }

    #[test]
    fn repeated_poles_rejected() {
        // h = (1 − 0.5x)² = [1, −1, 0.25].
        match invert_fir(&[c(1.0, 0.0), c(-1.0, 0.0), c(0.25, 0.0)]) {
            Err(DeconvError::RepeatedPoles { .. }) => {}
            other => panic!("expected RepeatedPoles, got {other:?}"),
        }
    }

    #[test]
    fn zero_order_channel_inverts_to_skip_tap() {
        let form = invert_fir(&[c(2.0, 0.0)]).unwrap();
        assert!(form.poles.is_empty());
        assert_eq!(form.skip_taps.len(), 1);
        assert_close(form.skip_taps[0], c(0.5, 0.0), 1e-15, "skip");
    }

    #[test]
    fn zero_leading_tap_rejected() {
        assert_eq!(
            invert_fir(&[ZERO, c(1.0, 0.0)]),
            Err(DeconvError::ZeroLeadingCoefficient)
        );
    }

    #[test]
    fn inverse_at_zero_identity() {
        // Σ w_i + α_0 = 1/h_0 for random minimum-phase channels.
        let mut rng = Rng::new(71);
        for trial in 0..20 {
            let k = 1 + rng.below(6);
            let poles: Vec<Complex64> = (0..k)
                .map(|_| rng.complex_normal() * 0.4)
                .collect();
            // Build h = Π(1 − p x), minimum phase by construction.
            let mut h = vec![ONE];
            for &p in &poles {
                let mut next = vec![ZERO; h.len() + 1];
                for (i, &co) in h.iter().enumerate() {
                    next[i] += co;
                    next[i + 1] -= co * p;
                }
                h = next;
            }
            let form = match invert_fir(&h) {
                Ok(f) => f,
                Err(DeconvError::RepeatedPoles { .. }) => continue,
                Err(e) => panic!("trial {trial}: {e:?}"),
            };
            let sum: Complex64 = form.weights.iter().sum::<Complex64>()
                + form.skip_taps.first().cloned().unwrap_or(ZERO);
            assert_close(sum, ONE / h[0], 1e-8, &format!("trial {trial}"));
        }
    }

    #[test]
    fn convolution_oracle_on_random_channel() {
        // impulse_response(invert_fir(h)) ⊛ h ≈ unit impulse.
        let h = [c(1.0, 0.0), c(-0.4, 0.3), c(0.1, -0.2), c(0.05, 0.02)];
        let form = invert_fir(&h).unwrap();
        let inv = impulse_response(&form, 128);
        let delta = convolve(&inv, &h);
        assert_close(delta[0], ONE, 1e-9, "delta[0]");
        let tail: f64 = delta[1..128].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(tail < 1e-9, "tail energy {tail}");
    }

    // ---- invert_rational ----

    #[test]
    fn fir_only_rational() {
        // H = 1/(1 − 0.5 Z^-1): inverse is the FIR [1, −0.5].
        let form = invert_rational(&[c(1.0, 0.0)], &[c(1.0, 0.0), c(-0.5, 0.0)], 0).unwrap();
        assert!(form.poles.is_empty());
        assert_eq!(form.skip_taps.len(), 2);
        assert_close(form.skip_taps[0], c(1.0, 0.0), 1e-12, "α0");
        assert_close(form.skip_taps[1], c(-0.5, 0.0), 1e-12, "α1");
    }

    #[test]
    fn pole_only_rational() {
        // H = (1 − 0.5 Z^-1): inverse is 1/(1 − 0.5 Z^-1), no skip taps.
        let form = invert_rational(&[c(1.0, 0.0), c(-0.5, 0.0)], &[c(1.0, 0.0)], 0).unwrap();
        assert_eq!(form.poles.len(), 1);
        assert_close(form.poles[0], c(0.5, 0.0), 1e-12, "pole");
        assert_close(form.weights[0], c(1.0, 0.0), 1e-12, "weight");
        assert!(form.skip_taps.is_empty());
    }

    #[test]
    fn extra_delay_pads_skip_taps() {
        let form = invert_rational(&[c(1.0, 0.0), c(-0.5, 0.0)], &[c(1.0, 0.0)], 2).unwrap();
        assert_eq!(form.skip_taps.len(), 3);
        for t in &form.skip_taps {
            assert_close(*t, ZERO, 0.0, "pad");
        }
    }

    #[test]
    fn mixed_rational_matches_streamed_channel() {
        // Random stable/minimum-phase a, b with deg b > deg a: run the exact
        // channel recursion (oracle) and undo it with the decomposed inverse.
        let a = [c(1.0, 0.0), c(-0.3, 0.2), c(0.05, -0.04)];
        let b = [c(1.0, 0.0), c(0.4, -0.1), c(-0.2, 0.05), c(0.1, 0.0)];
        let form = invert_rational(&a, &b, 0).unwrap();
        assert_eq!(form.skip_taps.len(), 2); // deg b − deg a = 1 → α_0, α_1
        let mut rng = Rng::new(99);
        let x = rng.complex_normal_vec(256);
        // Oracle channel: b(Z)·y = a(Z)·x streamed directly.
        let mut y = vec![ZERO; x.len()];
        for n in 0..x.len() {
            let mut acc = ZERO;
            for (i, &ai) in a.iter().enumerate() {
                if n >= i {
                    acc += ai * x[n - i];
                }
            }
            for (i, &bi) in b.iter().enumerate().skip(1) {
                if n >= i {
                    acc -= bi * y[n - i];
                }
            }
            y[n] = acc / b[0];
        }
        let xh = evaluate_filter(&form, &y);
        for (n, (got, want)) in xh.iter().zip(x.iter()).enumerate() {
            assert_close(*got, *want, 1e-8, &format!("n={n}"));
        }
    }

    #[test]
    fn unstable_inverse_rejected() {
        // a has a root on the unit circle in Z: pole magnitude 1.
        match invert_rational(&[c(1.0, 0.0), c(-1.0, 0.0)], &[c(1.0, 0.0)], 0) {
            Err(DeconvError::NotMinimumPhase { .. }) => {}
            other => panic!("expected NotMinimumPhase, got {other:?}"),
        }
    }

    // ---- evaluate_filter ----

    #[test]
    fn evaluate_matches_impulse_convolution() {
        let form = invert_fir(&[c(1.0, 0.0), c(-0.6, 0.1), c(0.2, -0.05)]).unwrap();
        let mut rng = Rng::new(4);
        let x = rng.complex_normal_vec(64);
        let y = evaluate_filter(&form, &x);
        let imp = impulse_response(&form, 64);
        let full = convolve(&imp, &x);
        for n in 0..64 {
            assert_close(y[n], full[n], 1e-10 * 64f64, &format!("n={n}"));
        }
    }

    #[test]
    fn evaluate_linear_in_input_scaling() {
        // Power-of-two scaling commutes exactly through IEEE arithmetic.
        let form = invert_fir(&[c(1.0, 0.0), c(-0.5, 0.25)]).unwrap();
        let mut rng = Rng::new(12);
        let x = rng.complex_normal_vec(32);
        let x2: Vec<Complex64> = x.iter().map(|v| v * 2.0).collect();
        let y = evaluate_filter(&form, &x);
        let y2 = evaluate_filter(&form, &x2);
        for (a, b) in y.iter().zip(y2.iter()) {
            assert_eq!(a * 2.0, *b);
        }
    }

    #[test]
    fn empty_input_gives_empty_output() {
        let form = invert_fir(&[c(1.0, 0.0), c(-0.5, 0.0)]).unwrap();
        assert!(evaluate_filter(&form, &[]).is_empty());
        assert!(impulse_response(&form, 0).is_empty());
    }
}
