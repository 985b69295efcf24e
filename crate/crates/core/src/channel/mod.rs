//! Dispersive channel simulation: FIR/rational ISI, statistical tap
//! generation, Doppler evolution, MIMO mixing, and AWGN.
//!
//! A [`ChannelRealization`] stores one draw of a tapped-delay-line channel —
//! per (rx, tx) antenna pair a sequence of complex tap gains, optionally one
//! set per sample time for time-varying channels. [`apply_fir`] convolves
//! transmit streams through it; [`sample_tdl_channel`] draws realizations
//! with an exponential power-delay profile; [`evolve_doppler`] modulates taps
//! with Jakes-spectrum fading; [`awgn`] adds calibrated noise.
//!
//! Every stochastic operation is a pure function of its inputs and an
//! explicit seed, so TTIs can run in parallel with bit-identical results.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::deconv::find_roots;
use crate::math::rng::Rng;

/// Speed of light, m/s.
const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Errors from channel application.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelError {
    /// Stream count or stream lengths do not match the channel geometry.
    DimensionError { expected: usize, got: usize },
    /// A recursive channel has a pole on or outside the unit circle.
    UnstableChannel { pole_magnitude: f64 },
    /// Denominator is empty, all-zero, or numerically intractable.
    BadDenominator,
}

impl core::fmt::Display for ChannelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ChannelError::DimensionError { expected, got } => {
                write!(f, "expected {expected} sequences/samples, got {got}")
            }
            ChannelError::UnstableChannel { pole_magnitude } => {
                write!(f, "channel pole magnitude {pole_magnitude} is not < 1")
            }
            ChannelError::BadDenominator => write!(f, "unusable channel denominator"),
        }
    }
}

impl core::error::Error for ChannelError {}

/// One draw of a (possibly time-varying) MIMO tapped-delay-line channel.
///
/// Taps are indexed `[time][tap][rx][tx]`; static channels store a single
/// time snapshot and [`ChannelRealization::tap`] clamps the time index, so a
/// static realization answers for any sample instant. `sample_rate` and
/// `delay_spread` record the geometry the taps were drawn for.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    pub n_rx: usize,
    pub n_tx: usize,
    pub n_taps: usize,
    /// Stored time snapshots; 1 for static channels.
    pub n_times: usize,
    pub sample_rate: f64,
    pub delay_spread: f64,
    taps: Vec<Complex64>,
}

impl ChannelRealization {
    /// Builds a static channel from taps laid out `[tap][rx][tx]`.
    pub fn from_static_taps(
        n_rx: usize,
        n_tx: usize,
        taps: Vec<Complex64>,
        sample_rate: f64,
        delay_spread: f64,
    ) -> Result<Self, ChannelError> {
        let per_time = n_rx * n_tx;
        if per_time == 0 || taps.is_empty() || taps.len() % per_time != 0 {
            return Err(ChannelError::DimensionError {
                expected: per_time.max(1),
                got: taps.len(),
            });
        }
        Ok(ChannelRealization {
            n_rx,
            n_tx,
            n_taps: taps.len() / per_time,
            n_times: 1,
            sample_rate,
            delay_spread,
            taps,
        })
    }

    /// Static single-antenna channel from a plain tap list.
    pub fn siso(taps: &[Complex64]) -> Self {
        ChannelRealization::from_static_taps(1, 1, taps.to_vec(), 1.0, 0.0)
            .expect("non-empty tap list")
    }

    fn idx(&self, t: usize, tap: usize, rx: usize, tx: usize) -> usize {
        ((t * self.n_taps + tap) * self.n_rx + rx) * self.n_tx + tx
    }

    /// Tap gain at sample time `t`. Times beyond the stored evolution clamp
    /// to the last snapshot, so static channels are time-invariant.
    pub fn tap(&self, t: usize, tap: usize, rx: usize, tx: usize) -> Complex64 {
        debug_assert!(tap < self.n_taps && rx < self.n_rx && tx < self.n_tx);
        let t = t.min(self.n_times - 1);
        self.taps[self.idx(t, tap, rx, tx)]
    }

    /// Tap gain averaged over the sample window `[t0, t1)` (used by
    /// perfect-CSI receivers to summarize intra-symbol variation).
    pub fn mean_tap(&self, t0: usize, t1: usize, tap: usize, rx: usize, tx: usize) -> Complex64 {
        debug_assert!(t0 < t1);
        let mut acc = Complex64::new(0.0, 0.0);
        for t in t0..t1 {
            acc += self.tap(t, tap, rx, tx);
        }
        acc / (t1 - t0) as f64
    }
}

/// Convolves transmit streams through the channel:
/// `y_rx[n] = Σ_tx Σ_i h_i^{(rx,tx)}[n] · x_tx[n−i]`, with taps indexed at
/// the output sample instant and zero initial state. Purely deterministic;
/// noise is added separately by [`awgn`].
pub fn apply_fir(
    x: &[Vec<Complex64>],
    ch: &ChannelRealization,
) -> Result<Vec<Vec<Complex64>>, ChannelError> {
    if x.len() != ch.n_tx {
        return Err(ChannelError::DimensionError {
            expected: ch.n_tx,
            got: x.len(),
        });
    }
    let n = x[0].len();
    for stream in x {
        if stream.len() != n {
            return Err(ChannelError::DimensionError {
                expected: n,
                got: stream.len(),
            });
        }
    }
    let mut y = vec![vec![Complex64::new(0.0, 0.0); n]; ch.n_rx];
    for rx in 0..ch.n_rx {
        let out = &mut y[rx];
        for tx in 0..ch.n_tx {
            let xs = &x[tx];
            for sample in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for tap in 0..ch.n_taps.min(sample + 1) {
                    acc += ch.tap(sample, tap, rx, tx) * xs[sample - tap];
                }
                out[sample] += acc;
            }
        }
    }
    Ok(y)
}

/// Channel with a rational transfer function: numerator `a`, denominator
/// `b`, both ascending in the delay variable. The output satisfies
/// `b·y = a·x` as a causal recursion, which is stable only when every
/// channel pole lies strictly inside the unit circle.
#[derive(Clone, Debug)]
pub struct RationalChannel {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl RationalChannel {
    /// Magnitude of the largest channel pole (reciprocals of the denominator
    /// roots in the delay variable).
    pub fn max_pole_magnitude(&self) -> Result<f64, ChannelError> {
        if self.b.is_empty() || self.b.iter().all(|c| c.norm() == 0.0) {
            return Err(ChannelError::BadDenominator);
        }
        let roots = find_roots(&self.b).map_err(|_| ChannelError::BadDenominator)?;
        let mut max_mag = 0.0f64;
        for root in roots {
            let mag = root.norm();
            let pole = if mag == 0.0 { f64::INFINITY } else { 1.0 / mag };
            max_mag = max_mag.max(pole);
        }
        Ok(max_mag)
    }
}

/// Runs one stream through a rational channel. Rejects channels whose
/// recursion would diverge (pole magnitude ≥ 1, including a denominator root
/// on the unit circle).
pub fn apply_rational(
    x: &[Complex64],
    ch: &RationalChannel,
) -> Result<Vec<Complex64>, ChannelError> {
    let max_pole = ch.max_pole_magnitude()?;
    if max_pole >= 1.0 {
        return Err(ChannelError::UnstableChannel {
            pole_magnitude: max_pole,
        });
    }
    let b0 = ch.b[0];
    if b0.norm() == 0.0 {
        return Err(ChannelError::BadDenominator);
    }
    let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
    for n in 0..x.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &ai) in ch.a.iter().enumerate() {
            if i > n {
                break;
            }
            acc += ai * x[n - i];
        }
        for (j, &bj) in ch.b.iter().enumerate().skip(1) {
            if j > n {
                break;
            }
            acc -= bj * y[n - j];
        }
        y[n] = acc / b0;
    }
    Ok(y)
}

/// Per-tap mean powers of an exponential power-delay profile with RMS decay
/// `delay_spread`, normalized to unit total power. A non-positive spread
/// collapses all power into the first tap (flat fading).
pub fn exponential_profile(n_taps: usize, delay_spread: f64, sample_rate: f64) -> Vec<f64> {
    assert!(n_taps >= 1);
    let mut p = vec![0.0f64; n_taps];
    if delay_spread <= 0.0 {
        p[0] = 1.0;
        return p;
    }
    let mut total = 0.0;
    for (i, slot) in p.iter_mut().enumerate() {
        let tau = i as f64 / sample_rate;
        *slot = (-tau / delay_spread).exp();
        total += *slot;
    }
    for slot in &mut p {
        *slot /= total;
    }
    p
}

/// Draws a static MIMO tapped-delay-line channel: i.i.d. complex Gaussian
/// taps per antenna pair, powers following [`exponential_profile`], unit
/// total mean power. Taps are drawn tap-major, then rx, then tx, so the
/// realization is a pure function of the seed.
pub fn sample_tdl_channel(
    n_taps: usize,
    delay_spread: f64,
    sample_rate: f64,
    n_rx: usize,
    n_tx: usize,
    rng_seed: u64,
) -> ChannelRealization {
    let profile = exponential_profile(n_taps, delay_spread, sample_rate);
    let mut rng = Rng::new(rng_seed);
    let mut taps = Vec::with_capacity(n_taps * n_rx * n_tx);
    for p in &profile {
        let scale = p.sqrt();
        for _ in 0..n_rx * n_tx {
            taps.push(rng.complex_normal() * scale);
        }
    }
    ChannelRealization {
        n_rx,
        n_tx,
        n_taps,
        n_times: 1,
        sample_rate,
        delay_spread,
        taps,
    }
}

/// Mobility description for [`evolve_doppler`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DopplerSpec {
    /// User speed, m/s.
    pub velocity: f64,
    /// Carrier frequency, Hz.
    pub carrier_freq: f64,
    pub model: DopplerModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DopplerModel {
    /// No time variation.
    None,
    /// Jakes-spectrum fading from the given number of sinusoids per tap.
    Jakes { n_sinusoids: usize },
}

impl DopplerSpec {
    /// Maximum Doppler shift `f_d = v·f_c/c`, Hz.
    pub fn max_doppler(&self) -> f64 {
        self.velocity * self.carrier_freq / SPEED_OF_LIGHT
    }
}

/// Expands a static channel into a time-varying one over `n_samples`
/// instants: every tap is multiplied by its own unit-mean-power
/// sum-of-sinusoids process `g[n] = √(1/N) Σ_q exp(j(2π f_d cos(α_q)·n/f_s + φ_q))`
/// with independent uniform angles and phases per (tap, rx, tx). The
/// ensemble autocorrelation of `g` is the Jakes spectrum's `J₀(2π f_d τ)`
/// and `E|g|² = 1`, so per-tap mean power is preserved.
///
/// Zero velocity (or `DopplerModel::None`) returns the input unchanged.
pub fn evolve_doppler(
    ch: &ChannelRealization,
    d: &DopplerSpec,
    n_samples: usize,
    rng_seed: u64,
) -> ChannelRealization {
    evolve_doppler_held(ch, d, n_samples, 1, rng_seed)
}

/// [`evolve_doppler`] with block fading: tap gains update only every `hold`
/// samples (evaluated at each block's first instant) and stay constant in
/// between. `hold = 1` is full-rate evolution; a `hold` of one OFDM frame
/// gives per-symbol block fading.
pub fn evolve_doppler_held(
    ch: &ChannelRealization,
    d: &DopplerSpec,
    n_samples: usize,
    hold: usize,
    rng_seed: u64,
) -> ChannelRealization {
    let n_sinusoids = match d.model {
        DopplerModel::None => return ch.clone(),
        DopplerModel::Jakes { n_sinusoids } => n_sinusoids.max(1),
    };
    let f_d = d.max_doppler();
    if f_d == 0.0 || n_samples == 0 {
        return ch.clone();
    }
    assert!(hold >= 1);
    assert!(ch.n_times == 1, "input must be a static realization");

    let mut rng = Rng::new(rng_seed);
    let n_procs = ch.n_taps * ch.n_rx * ch.n_tx;
    let mut taps = vec![Complex64::new(0.0, 0.0); n_samples * n_procs];
    // Process order matches the static layout [tap][rx][tx].
    for (proc_idx, &h0) in ch.taps.iter().enumerate() {
        // Per-sinusoid phase increments and initial phases.
        let mut phasors = Vec::with_capacity(n_sinusoids);
        let mut rotators = Vec::with_capacity(n_sinusoids);
        for _ in 0..n_sinusoids {
            let alpha = TAU * rng.uniform();
            let phi = TAU * rng.uniform();
            let omega = TAU * f_d * alpha.cos() / ch.sample_rate;
            phasors.push(Complex64::from_polar(1.0, phi));
            rotators.push(Complex64::from_polar(1.0, omega * hold as f64));
        }
        let amp = 1.0 / (n_sinusoids as f64).sqrt();
        let mut current = Complex64::new(0.0, 0.0);
        for t in 0..n_samples {
            if t % hold == 0 {
                let mut g = Complex64::new(0.0, 0.0);
                for ph in &phasors {
                    g += ph;
                }
                for (ph, rot) in phasors.iter_mut().zip(&rotators) {
                    *ph *= *rot;
                }
                current = h0 * g * amp;
            }
            taps[t * n_procs + proc_idx] = current;
        }
    }
    ChannelRealization {
        n_rx: ch.n_rx,
        n_tx: ch.n_tx,
        n_taps: ch.n_taps,
        n_times: n_samples,
        sample_rate: ch.sample_rate,
        delay_spread: ch.delay_spread,
        taps,
    }
}

/// Adds circularly-symmetric complex Gaussian noise with variance
/// `signal_power · 10^(−snr_db/10)` (half in each component). Pure function
/// of the inputs and the seed.
pub fn awgn(y: &[Complex64], snr_db: f64, signal_power: f64, rng_seed: u64) -> Vec<Complex64> {
    debug_assert!(signal_power > 0.0);
    let sigma = (signal_power * 10f64.powf(-snr_db / 10.0)).sqrt();
    let mut rng = Rng::new(rng_seed);
    y.iter().map(|&v| v + rng.complex_normal() * sigma).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn impulse(n: usize) -> Vec<Complex64> {
        let mut x = vec![c(0.0, 0.0); n];
        x[0] = c(1.0, 0.0);
        x
    }

    #[test]
    fn identity_channel_passes_through() {
        let ch = ChannelRealization::siso(&[c(1.0, 0.0)]);
        let x = vec![c(1.0, 2.0), c(-0.5, 0.25), c(0.0, -3.0)];
        let y = apply_fir(&[x.clone()], &ch).unwrap();
        assert_eq!(y[0], x);
    }

    #[test]
    fn pure_delay_shifts_by_one() {
        let ch = ChannelRealization::siso(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let x = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let y = apply_fir(&[x], &ch).unwrap();
        assert_eq!(y[0], vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn impulse_reads_out_taps() {
        let ch = ChannelRealization::siso(&[c(1.0, 0.0), c(0.5, 0.0)]);
        let y = apply_fir(&[impulse(5)], &ch).unwrap();
        assert_eq!(
            y[0],
            vec![c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
    }

    #[test]
    fn mimo_single_tap_mixes_streams() {
        // One tap, 2×2: y_rx = Σ_tx H[rx][tx]·x_tx, checked by hand.
        let h = vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, -1.0)];
        let ch = ChannelRealization::from_static_taps(2, 2, h, 1.0, 0.0).unwrap();
        let x0 = vec![c(1.0, 0.0)];
        let x1 = vec![c(0.0, 1.0)];
        let y = apply_fir(&[x0, x1], &ch).unwrap();
        assert_eq!(y[0][0], c(1.0, 0.0) * c(1.0, 0.0) + c(0.0, 1.0) * c(0.0, 1.0));
        assert_eq!(y[1][0], c(2.0, 0.0) * c(1.0, 0.0) + c(0.0, -1.0) * c(0.0, 1.0));
    }

    #[test]
    fn stream_count_mismatch_rejected() {
        let ch = ChannelRealization::siso(&[c(1.0, 0.0)]);
        let err = apply_fir(&[impulse(3), impulse(3)], &ch).unwrap_err();
        assert_eq!(err, ChannelError::DimensionError { expected: 1, got: 2 });

        let h = vec![c(1.0, 0.0); 4];
        let mimo = ChannelRealization::from_static_taps(2, 2, h, 1.0, 0.0).unwrap();
        let err = apply_fir(&[impulse(3), impulse(4)], &mimo).unwrap_err();
        assert_eq!(err, ChannelError::DimensionError { expected: 3, got: 4 });
    }

    #[test]
    fn static_application_is_linear() {
        let ch = ChannelRealization::siso(&[c(1.0, 0.2), c(-0.4, 0.1), c(0.05, -0.3)]);
        let mut rng = Rng::new(77);
        let x1: Vec<Complex64> = (0..40).map(|_| rng.complex_normal()).collect();
        let x2: Vec<Complex64> = (0..40).map(|_| rng.complex_normal()).collect();
        let (alpha, beta) = (c(2.0, -1.0), c(0.5, 0.5));
        let mixed: Vec<Complex64> = x1
            .iter()
            .zip(&x2)
            .map(|(&a, &b)| alpha * a + beta * b)
            .collect();
        let y_mixed = apply_fir(&[mixed], &ch).unwrap();
        let y1 = apply_fir(&[x1], &ch).unwrap();
        let y2 = apply_fir(&[x2], &ch).unwrap();
        for n in 0..40 {
            let want = alpha * y1[0][n] + beta * y2[0][n];
            assert!((y_mixed[0][n] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn time_varying_taps_indexed_per_sample_with_end_clamp() {
        // Two snapshots: gain 1 at t=0, gain 2 afterwards (clamped).
        let ch = ChannelRealization {
            n_rx: 1,
            n_tx: 1,
            n_taps: 1,
            n_times: 2,
            sample_rate: 1.0,
            delay_spread: 0.0,
            taps: vec![c(1.0, 0.0), c(2.0, 0.0)],
        };
        let x = vec![c(1.0, 0.0); 4];
        let y = apply_fir(&[x], &ch).unwrap();
        assert_eq!(
            y[0],
            vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)]
        );
        assert_eq!(ch.tap(100, 0, 0, 0), c(2.0, 0.0));
        assert_eq!(ch.mean_tap(0, 2, 0, 0, 0), c(1.5, 0.0));
    }

    #[test]
    fn rational_identity_and_geometric_response() {
        let ident = RationalChannel {
            a: vec![c(1.0, 0.0)],
            b: vec![c(1.0, 0.0)],
        };
        let x = vec![c(0.3, -0.7), c(1.0, 1.0)];
        assert_eq!(apply_rational(&x, &ident).unwrap(), x);

        let one_pole = RationalChannel {
            a: vec![c(1.0, 0.0)],
            b: vec![c(1.0, 0.0), c(-0.5, 0.0)],
        };
        let y = apply_rational(&impulse(6), &one_pole).unwrap();
        for (t, v) in y.iter().enumerate() {
            assert!((v - c(0.5f64.powi(t as i32), 0.0)).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn rational_matches_fir_when_denominator_trivial() {
        let a = vec![c(1.0, 0.5), c(-0.3, 0.0), c(0.0, 0.25)];
        let rat = RationalChannel {
            a: a.clone(),
            b: vec![c(1.0, 0.0)],
        };
        let mut rng = Rng::new(5);
        let x: Vec<Complex64> = (0..64).map(|_| rng.complex_normal()).collect();
        let via_rational = apply_rational(&x, &rat).unwrap();
        let ch = ChannelRealization::siso(&a);
        let via_fir = apply_fir(&[x], &ch).unwrap();
        assert_eq!(via_rational, via_fir[0]);
    }

    #[test]
    fn unstable_denominator_rejected() {
        // Denominator root at 1.0 puts a channel pole on the unit circle.
        let marginal = RationalChannel {
            a: vec![c(1.0, 0.0)],
            b: vec![c(1.0, 0.0), c(-1.0, 0.0)],
        };
        match apply_rational(&impulse(4), &marginal) {
            Err(ChannelError::UnstableChannel { pole_magnitude }) => {
                assert!((pole_magnitude - 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected: {other:?}"),
        }

        let degenerate = RationalChannel {
            a: vec![c(1.0, 0.0)],
            b: vec![],
        };
        assert_eq!(
            apply_rational(&impulse(4), &degenerate),
            Err(ChannelError::BadDenominator)
        );
    }

    #[test]
    fn tdl_channel_is_seed_deterministic() {
        let a = sample_tdl_channel(4, 50e-9, 7.68e6, 2, 2, 42);
        let b = sample_tdl_channel(4, 50e-9, 7.68e6, 2, 2, 42);
        let d = sample_tdl_channel(4, 50e-9, 7.68e6, 2, 2, 43);
        assert_eq!(a.taps, b.taps);
        assert_ne!(a.taps, d.taps);
        assert_eq!(a.n_taps, 4);
        assert_eq!(a.n_times, 1);
    }

    #[test]
    fn exponential_profile_shape() {
        let p = exponential_profile(4, 50e-9, 7.68e6);
        let total: f64 = p.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // Consecutive ratio is exp(−1/(ds·fs)).
        let want = (-1.0 / (50e-9 * 7.68e6)).exp();
        for w in p.windows(2) {
            assert!((w[1] / w[0] - want).abs() < 1e-12);
        }
        assert_eq!(exponential_profile(3, 0.0, 1.0), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn flat_fading_mean_power_near_unity() {
        let mut acc = 0.0;
        let n = 4000;
        for seed in 0..n {
            let ch = sample_tdl_channel(1, 0.0, 1.0, 1, 1, seed);
            acc += ch.tap(0, 0, 0, 0).norm_sqr();
        }
        let mean = acc / n as f64;
        assert!((mean - 1.0).abs() < 0.1, "mean tap power {mean}");
    }

    #[test]
    fn zero_velocity_keeps_taps_static() {
        let ch = sample_tdl_channel(3, 50e-9, 7.68e6, 1, 1, 7);
        let spec = DopplerSpec {
            velocity: 0.0,
            carrier_freq: 3.8e9,
            model: DopplerModel::Jakes { n_sinusoids: 32 },
        };
        let evolved = evolve_doppler(&ch, &spec, 1000, 99);
        assert_eq!(evolved.n_times, 1);
        for t in [0, 17, 999] {
            assert_eq!(evolved.tap(t, 1, 0, 0), ch.tap(0, 1, 0, 0));
        }
    }

    #[test]
    fn doppler_evolution_varies_and_is_deterministic() {
        let ch = sample_tdl_channel(2, 50e-9, 7.68e6, 1, 1, 7);
        let spec = DopplerSpec {
            velocity: 120.0,
            carrier_freq: 3.8e9,
            model: DopplerModel::Jakes { n_sinusoids: 16 },
        };
        let a = evolve_doppler(&ch, &spec, 512, 5);
        let b = evolve_doppler(&ch, &spec, 512, 5);
        let other = evolve_doppler(&ch, &spec, 512, 6);
        assert_eq!(a.taps, b.taps);
        assert_ne!(a.taps, other.taps);
        assert_eq!(a.n_times, 512);
        assert!((a.tap(0, 0, 0, 0) - a.tap(511, 0, 0, 0)).norm() > 1e-6);
    }

    #[test]
    fn held_evolution_is_piecewise_constant() {
        let ch = sample_tdl_channel(1, 0.0, 7.68e6, 1, 1, 3);
        let spec = DopplerSpec {
            velocity: 200.0,
            carrier_freq: 3.8e9,
            model: DopplerModel::Jakes { n_sinusoids: 8 },
        };
        let held = evolve_doppler_held(&ch, &spec, 40, 10, 11);
        for block in 0..4 {
            let first = held.tap(block * 10, 0, 0, 0);
            for offset in 1..10 {
                assert_eq!(held.tap(block * 10 + offset, 0, 0, 0), first);
            }
        }
        assert_ne!(held.tap(0, 0, 0, 0), held.tap(10, 0, 0, 0));
    }

    #[test]
    fn awgn_vanishes_at_extreme_snr() {
        let mut rng = Rng::new(1);
        let y: Vec<Complex64> = (0..100).map(|_| rng.complex_normal()).collect();
        let noisy = awgn(&y, 300.0, 1.0, 9);
        for (a, b) in y.iter().zip(&noisy) {
            assert!((a - b).norm() < 1e-10 * a.norm().max(1.0));
        }
    }

    #[test]
    fn awgn_component_variance_split() {
        let y = vec![Complex64::new(0.0, 0.0); 40_000];
        let noisy = awgn(&y, 0.0, 2.0, 31);
        // σ² = 2, so each component has variance 1.
        let re_var: f64 = noisy.iter().map(|v| v.re * v.re).sum::<f64>() / y.len() as f64;
        let im_var: f64 = noisy.iter().map(|v| v.im * v.im).sum::<f64>() / y.len() as f64;
        assert!((re_var - 1.0).abs() < 0.05, "re {re_var}");
        assert!((im_var - 1.0).abs() < 0.05, "im {im_var}");
        assert_eq!(awgn(&y, 0.0, 2.0, 31), noisy);
    }
}
