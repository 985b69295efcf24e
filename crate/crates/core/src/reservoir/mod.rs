//! The neural receiver core: a parallel bank of fixed-pole linear recurrent
//! neurons with a per-TTI trainable linear readout.
//!
//! Each neuron is a one-pole IIR filter `s_i[n] = p_i·s_i[n−1] + x[n]` whose
//! pole is drawn once and never trained; alongside the neuron states, the
//! current and `m` past inputs are exposed as skip features. Any filter
//! expressible as a partial-fraction sum over (approximately) those poles —
//! in particular the exact channel inverses produced by the deconvolution
//! module — is then a *linear combination* of features, so training reduces
//! to ridge regression of the readout on whatever samples have known
//! transmit values. Nonlinearity appears only at the output, as a
//! nearest-point constellation slicer.
//!
//! Neuron state lives only for the duration of one [`run_reservoir`] call
//! and starts at zero, so every TTI is processed independently and results
//! never depend on processing order.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::channel::sample_tdl_channel;
use crate::deconv::find_roots;
use crate::math::linalg::CMat;
use crate::math::rng::{derive, Rng};
use crate::signal::Constellation;

/// Errors from reservoir training and application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReservoirError {
    /// Feature and target row counts (or widths) disagree.
    DimensionMismatch { expected: usize, got: usize },
    /// No training rows were provided.
    EmptyTraining,
    /// The reservoir has no readout yet.
    NotTrained,
}

impl core::fmt::Display for ReservoirError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ReservoirError::DimensionMismatch { expected, got } => {
                write!(f, "expected {expected} rows/columns, got {got}")
            }
            ReservoirError::EmptyTraining => write!(f, "no training rows"),
            ReservoirError::NotTrained => write!(f, "reservoir readout not trained"),
        }
    }
}

impl core::error::Error for ReservoirError {}

/// Tapped-delay-line statistics referenced by the covariance-matched pole
/// strategy (the generator parameters of the channel ensemble to match).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TapStatistics {
    pub n_taps: usize,
    pub delay_spread: f64,
    pub sample_rate: f64,
}

/// How to place the fixed poles.
#[derive(Clone, Debug, PartialEq)]
pub enum PoleStrategy {
    /// Area-uniform over the disk of radius `r_max`.
    UniformDisk { r_max: f64 },
    /// Radius `r_max·u^{1/(2γ)}`: density concentrates toward the rim as γ
    /// grows (γ = 1 is area-uniform). Slowly decaying channel inverses live
    /// near the rim, so this is the default.
    EdgeBiased { r_max: f64, gamma: f64 },
    /// Empirical matching: draw `n_channels` realizations from the tap
    /// statistics, collect the stable poles of each channel's inverse, fit a
    /// Gaussian kernel density (Silverman bandwidth), and sample poles from
    /// it, rejecting any with magnitude ≥ `r_max`. Falls back to
    /// `EdgeBiased(r_max, 4)` if the ensemble yields no stable poles (e.g.
    /// single-tap channels).
    CovarianceMatched {
        r_max: f64,
        stats: TapStatistics,
        n_channels: usize,
    },
}

/// Draws `m` poles per the strategy; a pure function of the seed.
/// Draw order per pole is radius variate first, then angle.
pub fn sample_poles(m: usize, strategy: &PoleStrategy, rng_seed: u64) -> Vec<Complex64> {
    assert!(m >= 1);
    let mut rng = Rng::new(rng_seed);
    match strategy {
        PoleStrategy::UniformDisk { r_max } => {
            assert!(0.0 < *r_max && *r_max < 1.0);
            (0..m)
                .map(|_| {
                    let r = r_max * rng.uniform().sqrt();
                    let theta = TAU * rng.uniform();
                    Complex64::from_polar(r, theta)
                })
                .collect()
        }
        PoleStrategy::EdgeBiased { r_max, gamma } => {
            assert!(0.0 < *r_max && *r_max < 1.0);
            assert!(*gamma >= 1.0);
            (0..m)
                .map(|_| {
                    let r = r_max * rng.uniform().powf(1.0 / (2.0 * gamma));
                    let theta = TAU * rng.uniform();
                    Complex64::from_polar(r, theta)
                })
                .collect()
        }
        PoleStrategy::CovarianceMatched {
            r_max,
            stats,
            n_channels,
        } => {
            assert!(0.0 < *r_max && *r_max < 1.0);
            let pool = inverse_pole_pool(stats, *n_channels, rng_seed);
            if pool.is_empty() {
                return sample_poles(
                    m,
                    &PoleStrategy::EdgeBiased {
                        r_max: *r_max,
                        gamma: 4.0,
                    },
                    rng_seed,
                );
            }
            let bandwidth = silverman_bandwidth(&pool);
            let mut rng = Rng::new(derive(rng_seed, 0));
            (0..m)
                .map(|_| {
                    for _ in 0..256 {
                        let base = pool[rng.below(pool.len())];
                        let jitter = Complex64::new(
                            bandwidth * rng.standard_normal(),
                            bandwidth * rng.standard_normal(),
                        );
                        let p = base + jitter;
                        if p.norm() < *r_max {
                            return p;
                        }
                    }
                    // Pathological kernel mass outside the disk: clamp the
                    // last base radially just inside the boundary.
                    let base = pool[rng.below(pool.len())];
                    let mag = base.norm();
                    if mag == 0.0 {
                        base
                    } else {
                        base * (r_max * (1.0 - 1e-3) / mag)
                    }
                })
                .collect()
        }
    }
}

/// Stable inverse poles of `n_channels` SISO draws from the tap statistics.
fn inverse_pole_pool(stats: &TapStatistics, n_channels: usize, seed: u64) -> Vec<Complex64> {
    let mut pool = Vec::new();
    for i in 0..n_channels {
        let ch = sample_tdl_channel(
            stats.n_taps,
            stats.delay_spread,
            stats.sample_rate,
            1,
            1,
            derive(seed, 1 + i as u64),
        );
        let taps: Vec<Complex64> = (0..ch.n_taps).map(|k| ch.tap(0, k, 0, 0)).collect();
        let Ok(roots) = find_roots(&taps) else {
            continue;
        };
        for root in roots {
            let mag = root.norm();
            if mag > 1.0 {
                // Root of the tap polynomial outside the unit circle ⇒ the
                // inverse filter's pole 1/root is stable.
                pool.push(Complex64::new(1.0, 0.0) / root);
            }
        }
    }
    pool
}

/// Silverman's rule for a 2D Gaussian kernel: `σ̂·n^{−1/6}` with the
/// per-component standard deviation pooled across re/im.
fn silverman_bandwidth(pool: &[Complex64]) -> f64 {
    let n = pool.len() as f64;
    let mean_re: f64 = pool.iter().map(|p| p.re).sum::<f64>() / n;
    let mean_im: f64 = pool.iter().map(|p| p.im).sum::<f64>() / n;
    let var: f64 = pool
        .iter()
        .map(|p| {
            let dr = p.re - mean_re;
            let di = p.im - mean_im;
            dr * dr + di * di
        })
        .sum::<f64>()
        / n;
    let sigma = (var / 2.0).sqrt();
    (sigma * n.powf(-1.0 / 6.0)).max(1e-3)
}

/// Ridge strength for readout training.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ridge {
    /// Use λ as given.
    Absolute(f64),
    /// Scale to the data: `λ = s · ‖features‖²_F / (rows·cols)`, i.e. `s`
    /// times the mean squared feature entry, so the same `s` works across
    /// SNRs and feature counts.
    Scaled(f64),
}

impl Default for Ridge {
    fn default() -> Self {
        Ridge::Scaled(1e-4)
    }
}

impl Ridge {
    fn resolve(self, features: &CMat) -> f64 {
        match self {
            Ridge::Absolute(v) => v,
            Ridge::Scaled(s) => {
                let fro = features.frobenius();
                s * fro * fro / (features.rows * features.cols) as f64
            }
        }
    }
}

/// A trained readout with its diagnostics.
#[derive(Clone, Debug)]
pub struct ReadoutFit {
    /// F × n_streams weight matrix.
    pub weights: CMat,
    /// Output delay selected by the fit: the model predicts the transmit
    /// value at position `t` from the feature row at `t + delay`.
    pub delay: usize,
    /// Absolute ridge λ that was applied.
    pub lambda: f64,
    /// Training was rank-deficient at λ = 0 and fell back to the
    /// minimum-norm pseudoinverse solution.
    pub used_pseudoinverse: bool,
    /// Squared training residual ‖F·W − targets‖².
    pub residual_energy: f64,
    /// Squared target energy, for relative residual reporting.
    pub target_energy: f64,
}

/// Parallel bank of fixed-pole neurons plus skip taps.
///
/// Features per receive input are ordered `[s_0 … s_{M−1}, x[n], x[n−1], …,
/// x[n−m]]`; with several receive inputs the per-input blocks are
/// concatenated, giving `(M + m + 1)·n_rx` features per time step.
#[derive(Clone, Debug)]
pub struct Reservoir {
    poles: Vec<Complex64>,
    pub skip_order: usize,
    pub readout: Option<ReadoutFit>,
}

impl Reservoir {
    /// Builds an untrained reservoir. Poles must lie strictly inside the
    /// unit circle; they are fixed for the reservoir's lifetime.
    pub fn new(poles: Vec<Complex64>, skip_order: usize) -> Self {
        assert!(!poles.is_empty());
        for p in &poles {
            assert!(p.norm() < 1.0, "pole {p} outside the unit disk");
        }
        Reservoir {
            poles,
            skip_order,
            readout: None,
        }
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    /// Features per time step for `n_rx` receive inputs.
    pub fn n_features(&self, n_rx: usize) -> usize {
        (self.poles.len() + self.skip_order + 1) * n_rx
    }

    /// Runs the trained readout over receive sequences: returns a
    /// T × n_streams matrix of soft symbol estimates, delay-compensated so
    /// row `t` estimates the transmit value at position `t`.
    pub fn apply(&self, inputs: &[Vec<Complex64>]) -> Result<CMat, ReservoirError> {
        let fit = self.readout.as_ref().ok_or(ReservoirError::NotTrained)?;
        let t_len = inputs[0].len();
        let features = run_reservoir(self, &pad_inputs(inputs, fit.delay));
        let rows: Vec<usize> = (0..t_len).map(|t| t + fit.delay).collect();
        Ok(take_rows(&features, &rows).mul(&fit.weights))
    }
}

fn pad_inputs(inputs: &[Vec<Complex64>], extra: usize) -> Vec<Vec<Complex64>> {
    inputs
        .iter()
        .map(|x| {
            let mut padded = x.clone();
            padded.extend(core::iter::repeat(Complex64::new(0.0, 0.0)).take(extra));
            padded
        })
        .collect()
}

fn take_rows(m: &CMat, rows: &[usize]) -> CMat {
    let mut out = CMat::zeros(rows.len(), m.cols);
    for (i, &r) in rows.iter().enumerate() {
        for c in 0..m.cols {
            out[(i, c)] = m[(r, c)];
        }
    }
    out
}

/// Drives the neuron bank over per-receive-input sequences and returns the
/// T × (M + m + 1)·n_rx feature matrix. State starts at zero (one TTI, no
/// carry-over). Features are exactly linear in the input.
pub fn run_reservoir(r: &Reservoir, inputs: &[Vec<Complex64>]) -> CMat {
    assert!(!inputs.is_empty());
    let t_len = inputs[0].len();
    for x in inputs {
        assert_eq!(x.len(), t_len, "receive sequences must share a length");
    }
    let m_poles = r.poles.len();
    let per_input = m_poles + r.skip_order + 1;
    let mut features = CMat::zeros(t_len, per_input * inputs.len());
    for (input_idx, x) in inputs.iter().enumerate() {
        let base = input_idx * per_input;
        let mut state = vec![Complex64::new(0.0, 0.0); m_poles];
        for n in 0..t_len {
            for (i, &p) in r.poles.iter().enumerate() {
                state[i] = p * state[i] + x[n];
                features[(n, base + i)] = state[i];
            }
            for j in 0..=r.skip_order {
                if n >= j {
                    features[(n, base + m_poles + j)] = x[n - j];
                }
            }
        }
    }
    features
}

/// Closed-form ridge regression of a readout:
/// `W = argmin ‖features·W − targets‖² + λ‖W‖²` via the regularized normal
/// equations. At λ = 0 with rank-deficient features the minimum-norm
/// solution is computed through the Gram matrix's eigendecomposition and
/// flagged. Deterministic.
pub fn train_readout(
    features: &CMat,
    targets: &CMat,
    lambda: f64,
) -> Result<(CMat, bool), ReservoirError> {
    if features.rows == 0 {
        return Err(ReservoirError::EmptyTraining);
    }
    if features.rows != targets.rows {
        return Err(ReservoirError::DimensionMismatch {
            expected: features.rows,
            got: targets.rows,
        });
    }
    debug_assert!(lambda >= 0.0);
    let mut gram = features.gram();
    let rhs = features.herm_mul(targets);
    gram.add_scaled_identity(lambda);
    if let Some(w) = gram.cholesky_solve(&rhs) {
        return Ok((w, false));
    }
    // Rank-deficient (or numerically indefinite) Gram: minimum-norm
    // least-squares via the spectral pseudoinverse of FᴴF.
    let (eigs, vectors) = gram.hermitian_eig();
    let max_eig = eigs.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = max_eig * gram.rows as f64 * 1e-12;
    let projected = vectors.herm_mul(&rhs);
    let mut scaled = projected;
    for (i, &e) in eigs.iter().enumerate() {
        let inv = if e > cutoff { 1.0 / e } else { 0.0 };
        for c in 0..scaled.cols {
            scaled[(i, c)] *= inv;
        }
    }
    Ok((vectors.mul(&scaled), true))
}

/// Trains a readout against targets anchored at known positions, searching
/// output delays `d ∈ {0..max_delay}` for the one minimizing the training
/// residual (ties resolve to the smallest delay). `targets` row `i` is the
/// known transmit vector at time `positions[i]`; candidate `d` regresses it
/// on the feature row at `positions[i] + d`, with the input zero-padded so
/// every shifted row exists. The ridge is resolved once, on the unshifted
/// training rows.
pub fn fit_readout(
    r: &Reservoir,
    inputs: &[Vec<Complex64>],
    targets: &CMat,
    positions: &[usize],
    max_delay: usize,
    ridge: Ridge,
) -> Result<ReadoutFit, ReservoirError> {
    if positions.is_empty() {
        return Err(ReservoirError::EmptyTraining);
    }
    if positions.len() != targets.rows {
        return Err(ReservoirError::DimensionMismatch {
            expected: positions.len(),
            got: targets.rows,
        });
    }
    let features = run_reservoir(r, &pad_inputs(inputs, max_delay));
    let base_rows = take_rows(&features, positions);
    let lambda = ridge.resolve(&base_rows);
    let target_energy = targets.frobenius().powi(2);

    let mut best: Option<ReadoutFit> = None;
    for d in 0..=max_delay {
        let rows: Vec<usize> = positions.iter().map(|&p| p + d).collect();
        let sub = if d == 0 {
            base_rows.clone()
        } else {
            take_rows(&features, &rows)
        };
        let (weights, used_pseudoinverse) = train_readout(&sub, targets, lambda)?;
        let predictions = sub.mul(&weights);
        let mut residual_energy = 0.0;
        for i in 0..predictions.rows {
            for c in 0..predictions.cols {
                residual_energy += (predictions[(i, c)] - targets[(i, c)]).norm_sqr();
            }
        }
        let candidate = ReadoutFit {
            weights,
            delay: d,
            lambda,
            used_pseudoinverse,
            residual_energy,
            target_energy,
        };
        // A larger delay must beat the incumbent by more than numerical
        // noise, so exact fits at several delays resolve to the smallest.
        let better = match &best {
            None => true,
            Some(b) => candidate.residual_energy < b.residual_energy - 1e-12 * target_energy,
        };
        if better {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one delay candidate"))
}

/// Trains the reservoir to invert a channel from one aligned (transmitted,
/// received) sequence pair: runs the neuron bank on `y`, regresses the
/// readout toward `x`, and keeps the best delay in `{0..skip_order}`.
/// Returns a trained copy; the pole list is untouched.
///
/// The last `skip_order` symbols are left out of training: a delayed
/// prediction of those would need received samples past the end of the
/// sequence, and letting them regress against the zero padding would bias
/// the delay search.
pub fn fit_deconvolver(
    r: &Reservoir,
    x: &[Complex64],
    y: &[Complex64],
    ridge: Ridge,
) -> Result<Reservoir, ReservoirError> {
    if x.len() != y.len() {
        return Err(ReservoirError::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let usable = x.len().saturating_sub(r.skip_order);
    let mut targets = CMat::zeros(usable, 1);
    for i in 0..usable {
        targets[(i, 0)] = x[i];
    }
    let positions: Vec<usize> = (0..usable).collect();
    let received = [y.to_vec()];
    let fit = fit_readout(r, &received, &targets, &positions, r.skip_order, ridge)?;
    Ok(Reservoir {
        poles: r.poles.clone(),
        skip_order: r.skip_order,
        readout: Some(fit),
    })
}

/// Nearest-point decision per soft symbol: returns the hard constellation
/// points and their bit labels (MSB first). Ties break toward the smaller
/// constellation index.
pub fn slice(soft: &[Complex64], c: Constellation) -> (Vec<Complex64>, Vec<u8>) {
    let mut hard = Vec::with_capacity(soft.len());
    let mut bits = Vec::with_capacity(soft.len() * c.bits_per_symbol());
    for &s in soft {
        let idx = c.nearest(s);
        hard.push(c.point(idx));
        bits.extend_from_slice(&c.index_bits(idx));
    }
    (hard, bits)
}
