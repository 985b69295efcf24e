//! End-to-end detectors over one TTI.
//!
//! Three receivers share the same observation type and result shape:
//!
//! * [`neural_receive`] — the reservoir receiver: serializes the received
//!   grids row-major into per-antenna sequences, fits the readout on every
//!   RE whose transmit vector is known (pilots and deliberate nulls), then
//!   applies the trained map everywhere and slices the data positions.
//! * [`lmmse_receive`] — the classical baseline: per-pilot least-squares
//!   channel estimates, bilinear 2D interpolation across the grid, and a
//!   per-RE LMMSE equalizer.
//! * [`genie_receive`] — the same equalizer driven by the true channel, as
//!   a performance floor. It shares the equalization code path with the
//!   estimated baseline, so perfect estimates give bit-identical output.
//!
//! [`otfs_lmmse_receive`] adapts the classical baseline to delay–Doppler
//! grids: the channel's DD spreading kernel is read off around each
//! stream's impulse pilot, converted to a time–frequency response,
//! equalized there, and transformed back.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;

use crate::math::linalg::CMat;
use crate::reservoir::{
    fit_readout, sample_poles, slice, PoleStrategy, ReservoirError, Reservoir, Ridge,
};
use crate::signal::grid::{ResourceGrid, ValueGrid};
use crate::signal::otfs::{isfft, sfft};
use crate::signal::Constellation;

/// Errors from TTI detection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReceiverError {
    /// A stream has no pilot REs to train or estimate from.
    InsufficientPilots { stream: usize },
    /// Observation pieces disagree in shape.
    DimensionMismatch { expected: usize, got: usize },
    /// Readout training failed.
    Training(ReservoirError),
}

impl From<ReservoirError> for ReceiverError {
    fn from(e: ReservoirError) -> Self {
        ReceiverError::Training(e)
    }
}

impl core::fmt::Display for ReceiverError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ReceiverError::InsufficientPilots { stream } => {
                write!(f, "stream {stream} has no pilot resource elements")
            }
            ReceiverError::DimensionMismatch { expected, got } => {
                write!(f, "expected {expected}, got {got}")
            }
            ReceiverError::Training(e) => write!(f, "readout training failed: {e}"),
        }
    }
}

impl core::error::Error for ReceiverError {}

/// Everything a receiver may look at for one TTI: the demodulated grids per
/// receive antenna plus the transmit-side knowledge a real receiver has —
/// pilot books, which REs are silent, and the constellation.
#[derive(Clone, Debug)]
pub struct TtiObservation {
    /// Received grid per rx antenna (time–frequency or delay–Doppler).
    pub rx_grids: Vec<ValueGrid>,
    pub n_streams: usize,
    pub constellation: Constellation,
    /// REs whose full transmit vector is known, row-major.
    pub known_positions: Vec<(usize, usize)>,
    /// Transmit vector (one value per stream) for each known position.
    pub known_values: Vec<Vec<Complex64>>,
    /// Per stream: its pilot lattice with values (for LS estimation).
    pub pilot_entries: Vec<Vec<(usize, usize, Complex64)>>,
    /// REs carrying payload, row-major.
    pub data_positions: Vec<(usize, usize)>,
    /// Noise variance if the receiver is granted it; estimated otherwise.
    pub noise_variance_hint: Option<f64>,
}

impl TtiObservation {
    /// Assembles an observation from the transmit grid's bookkeeping and
    /// the received per-antenna grids.
    pub fn from_grids(
        tx: &ResourceGrid,
        rx_grids: Vec<ValueGrid>,
        constellation: Constellation,
        noise_variance_hint: Option<f64>,
    ) -> Result<Self, ReceiverError> {
        for g in &rx_grids {
            if g.n_symbols != tx.n_symbols || g.n_subcarriers != tx.n_subcarriers {
                return Err(ReceiverError::DimensionMismatch {
                    expected: tx.n_symbols * tx.n_subcarriers,
                    got: g.n_symbols * g.n_subcarriers,
                });
            }
        }
        let known_positions = tx.known_positions().to_vec();
        let known_values = known_positions
            .iter()
            .map(|&(sym, sc)| {
                (0..tx.n_streams)
                    .map(|s| tx.tx_value(sym, sc, s))
                    .collect()
            })
            .collect();
        Ok(TtiObservation {
            rx_grids,
            n_streams: tx.n_streams,
            constellation,
            known_positions,
            known_values,
            pilot_entries: (0..tx.n_streams).map(|s| tx.pilot_entries(s)).collect(),
            data_positions: tx.data_positions(),
            noise_variance_hint,
        })
    }

    fn n_symbols(&self) -> usize {
        self.rx_grids[0].n_symbols
    }

    fn n_subcarriers(&self) -> usize {
        self.rx_grids[0].n_subcarriers
    }

    /// Received vector across antennas at one RE.
    fn rx_vector(&self, sym: usize, sc: usize) -> Vec<Complex64> {
        self.rx_grids.iter().map(|g| g.at(sym, sc)).collect()
    }
}

/// Per-detection diagnostics.
#[derive(Clone, Debug)]
pub struct Diagnostics {
    /// Relative training residual ‖FW − X‖²/‖X‖² (NaN for untrained paths).
    pub training_residual: f64,
    /// Output delay chosen by the readout fit.
    pub chosen_delay: usize,
    /// Readout training fell back to the minimum-norm pseudoinverse.
    pub used_pseudoinverse: bool,
    /// Noise variance the equalizer/readout effectively used.
    pub sigma2: f64,
    /// An equalizer matrix was singular at σ² = 0 and required ε loading.
    pub regularized: bool,
}

impl Diagnostics {
    fn none() -> Self {
        Diagnostics {
            training_residual: f64::NAN,
            chosen_delay: 0,
            used_pseudoinverse: false,
            sigma2: f64::NAN,
            regularized: false,
        }
    }
}

/// Hard decisions for one TTI.
#[derive(Clone, Debug)]
pub struct DetectionResult {
    /// Per stream: hard constellation points per data RE, in the data
    /// positions' row-major order.
    pub hard_symbols: Vec<Vec<Complex64>>,
    /// Per stream: decided bits, MSB-first per symbol.
    pub bits: Vec<Vec<u8>>,
    pub diagnostics: Diagnostics,
}

/// How the received grid becomes the reservoir's input sample stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridSerialization {
    /// Plain row-major scan. Right for time–frequency grids, where the
    /// channel already acts linearly along the scan.
    Linear,
    /// Row-major scan with cyclic extensions for delay–Doppler grids. A
    /// doubly dispersive channel acts on the DD grid as a 2D *circular*
    /// convolution, and no single linear filter over a plain scan can invert
    /// a circular operator: samples wrapped across a row edge land at
    /// position-dependent lags. Emitting each row as
    /// [last half | full row | first half], and padding the frame with
    /// `context_rows` circularly preceding and following rows, fixes the
    /// geometry: every kernel tap (κ Doppler, λ delay) then sits at the
    /// fixed stream lag κ·block + λ, so the channel inverse becomes an
    /// ordinary convolution — the same job a cyclic prefix does for OFDM
    /// in the time domain.
    CircularRows {
        /// Rows of circular context prepended and appended (clamped to the
        /// grid height). Covers the Doppler reach of the inverse kernel.
        context_rows: usize,
        /// Also feed each stream delayed and advanced by one row block.
        /// The inverse kernel's adjacent-Doppler taps (κ = ±1) live a whole
        /// block away — beyond any contiguous run of skip taps — so these
        /// extra streams put them within skip reach. Triples the feature
        /// count; worth it only when the per-frame Doppler drift is large
        /// and the training set can support the extra freedom.
        doppler_taps: bool,
    },
}

/// Reservoir receiver configuration.
#[derive(Clone, Debug)]
pub struct NeuralConfig {
    /// Neurons per receive antenna.
    pub n_poles: usize,
    /// Skip-connection order m (features include x[n]…x[n−m]).
    pub skip_order: usize,
    pub strategy: PoleStrategy,
    pub ridge: Ridge,
    /// Seed for the pole draw (poles are fixed before the TTI's data is seen).
    pub pole_seed: u64,
    /// Output-delay search bound for the readout fit. Channels whose
    /// inverse has an anti-causal part (non-minimum-phase taps, cyclic
    /// delay–Doppler spreading) need the readout to emit estimates late;
    /// OTFS grids want roughly one extended row block here.
    pub max_delay: usize,
    /// Input serialization; use `CircularRows` for delay–Doppler grids.
    pub serialization: GridSerialization,
}

impl Default for NeuralConfig {
    fn default() -> Self {
        NeuralConfig {
            n_poles: 64,
            skip_order: 4,
            strategy: PoleStrategy::EdgeBiased {
                r_max: 0.95,
                gamma: 4.0,
            },
            ridge: Ridge::default(),
            pole_seed: 0,
            max_delay: 4,
            serialization: GridSerialization::Linear,
        }
    }
}

/// Maps grid coordinates onto the serialized reservoir input stream.
struct StreamLayout {
    /// Columns copied on each side of every row (0 for linear scans).
    half: usize,
    /// Samples per row block in the stream.
    block: usize,
    /// Stream index where the frame's own first row block starts.
    lead: usize,
}

impl StreamLayout {
    fn index_of(&self, sym: usize, sc: usize) -> usize {
        self.lead + sym * self.block + self.half + sc
    }
}

/// Serializes the received grids per antenna according to `mode`.
fn serialize_grids(
    grids: &[ValueGrid],
    n_rows: usize,
    n_cols: usize,
    mode: GridSerialization,
) -> (Vec<Vec<Complex64>>, StreamLayout) {
    match mode {
        GridSerialization::Linear => {
            let inputs = grids.iter().map(|g| g.values().to_vec()).collect();
            let layout = StreamLayout {
                half: 0,
                block: n_cols,
                lead: 0,
            };
            (inputs, layout)
        }
        GridSerialization::CircularRows {
            context_rows,
            doppler_taps,
        } => {
            let context = context_rows.min(n_rows);
            let half = n_cols / 2;
            let block = n_cols + 2 * half;
            let mut inputs = Vec::with_capacity(grids.len());
            for g in grids {
                let mut stream = Vec::with_capacity((n_rows + 2 * context) * block);
                let push_row = |stream: &mut Vec<Complex64>, row: usize| {
                    for sc in n_cols - half..n_cols {
                        stream.push(g.at(row, sc));
                    }
                    for sc in 0..n_cols {
                        stream.push(g.at(row, sc));
                    }
                    for sc in 0..half {
                        stream.push(g.at(row, sc));
                    }
                };
                for row in n_rows - context..n_rows {
                    push_row(&mut stream, row);
                }
                for row in 0..n_rows {
                    push_row(&mut stream, row);
                }
                for row in 0..context {
                    push_row(&mut stream, row);
                }
                inputs.push(stream);
            }
            if doppler_taps {
                // Each antenna's stream is also fed in delayed and advanced
                // by one block, giving the readout direct κ = ±1 taps.
                let zero = Complex64::new(0.0, 0.0);
                let mut shifted = Vec::with_capacity(2 * inputs.len());
                for x in &inputs {
                    let mut late = vec![zero; x.len()];
                    late[block..].copy_from_slice(&x[..x.len() - block]);
                    let mut early = vec![zero; x.len()];
                    early[..x.len() - block].copy_from_slice(&x[block..]);
                    shifted.push(late);
                    shifted.push(early);
                }
                inputs.append(&mut shifted);
            }
            let layout = StreamLayout {
                half,
                block,
                lead: context * block,
            };
            (inputs, layout)
        }
    }
}

/// The neural receiver: per-TTI readout training on known REs, detection on
/// data REs. Poles come from `cfg` and are never adapted within the TTI.
pub fn neural_receive(
    obs: &TtiObservation,
    cfg: &NeuralConfig,
) -> Result<DetectionResult, ReceiverError> {
    for (s, pilots) in obs.pilot_entries.iter().enumerate() {
        if pilots.is_empty() {
            return Err(ReceiverError::InsufficientPilots { stream: s });
        }
    }
    let (inputs, stream) = serialize_grids(
        &obs.rx_grids,
        obs.n_symbols(),
        obs.n_subcarriers(),
        cfg.serialization,
    );

    let positions: Vec<usize> = obs
        .known_positions
        .iter()
        .map(|&(sym, sc)| stream.index_of(sym, sc))
        .collect();
    let mut targets = CMat::zeros(positions.len(), obs.n_streams);
    for (row, values) in obs.known_values.iter().enumerate() {
        for (s, &v) in values.iter().enumerate() {
            targets[(row, s)] = v;
        }
    }

    let poles = sample_poles(cfg.n_poles, &cfg.strategy, cfg.pole_seed);
    let mut reservoir = Reservoir::new(poles, cfg.skip_order);
    let fit = fit_readout(
        &reservoir,
        &inputs,
        &targets,
        &positions,
        cfg.max_delay,
        cfg.ridge,
    )?;
    let diagnostics = Diagnostics {
        training_residual: fit.residual_energy / fit.target_energy.max(f64::MIN_POSITIVE),
        chosen_delay: fit.delay,
        used_pseudoinverse: fit.used_pseudoinverse,
        sigma2: obs.noise_variance_hint.unwrap_or(f64::NAN),
        regularized: false,
    };
    reservoir.readout = Some(fit);
    let soft = reservoir.apply(&inputs)?;

    let mut soft_per_stream = vec![Vec::with_capacity(obs.data_positions.len()); obs.n_streams];
    for &(sym, sc) in &obs.data_positions {
        let t = stream.index_of(sym, sc);
        for (s, sink) in soft_per_stream.iter_mut().enumerate() {
            sink.push(soft[(t, s)]);
        }
    }
    Ok(package(obs, soft_per_stream, diagnostics))
}

fn package(
    obs: &TtiObservation,
    soft_per_stream: Vec<Vec<Complex64>>,
    diagnostics: Diagnostics,
) -> DetectionResult {
    let mut hard_symbols = Vec::with_capacity(obs.n_streams);
    let mut bits = Vec::with_capacity(obs.n_streams);
    for soft in &soft_per_stream {
        let (hard, b) = slice(soft, obs.constellation);
        hard_symbols.push(hard);
        bits.push(b);
    }
    DetectionResult {
        hard_symbols,
        bits,
        diagnostics,
    }
}

/// Raw least-squares channel estimates at pilot REs: per stream, per pilot
/// RE, the per-antenna estimate `Ĥ[rx] = y_rx / x_pilot`.
#[derive(Clone, Debug)]
pub struct PilotEstimates {
    /// `per_stream[s]` lists `(symbol, subcarrier, per-rx estimates)`.
    pub per_stream: Vec<Vec<(usize, usize, Vec<Complex64>)>>,
}

/// Divides the received values by the known pilots. Works because pilots
/// are stream-orthogonal: at a pilot RE only the owning stream transmits.
pub fn ls_channel_estimate(obs: &TtiObservation) -> Result<PilotEstimates, ReceiverError> {
    let mut per_stream = Vec::with_capacity(obs.n_streams);
    for (s, pilots) in obs.pilot_entries.iter().enumerate() {
        if pilots.is_empty() {
            return Err(ReceiverError::InsufficientPilots { stream: s });
        }
        per_stream.push(
            pilots
                .iter()
                .map(|&(sym, sc, x)| {
                    let estimates = obs.rx_grids.iter().map(|g| g.at(sym, sc) / x).collect();
                    (sym, sc, estimates)
                })
                .collect(),
        );
    }
    Ok(PilotEstimates { per_stream })
}

/// Channel estimates for every RE of a grid, one complex gain per
/// (rx, stream) pair.
#[derive(Clone, Debug)]
pub struct GridChannelEstimate {
    pub n_rx: usize,
    pub n_streams: usize,
    /// Indexed `[rx][stream]`, each a full grid of gains.
    grids: Vec<ValueGrid>,
}

impl GridChannelEstimate {
    pub fn new(n_rx: usize, n_streams: usize, n_symbols: usize, n_subcarriers: usize) -> Self {
        GridChannelEstimate {
            n_rx,
            n_streams,
            grids: vec![ValueGrid::zeros(n_symbols, n_subcarriers); n_rx * n_streams],
        }
    }

    pub fn set(&mut self, rx: usize, stream: usize, sym: usize, sc: usize, v: Complex64) {
        self.grids[rx * self.n_streams + stream].set(sym, sc, v);
    }

    pub fn gain(&self, rx: usize, stream: usize, sym: usize, sc: usize) -> Complex64 {
        self.grids[rx * self.n_streams + stream].at(sym, sc)
    }

    /// The n_rx × n_streams channel matrix at one RE.
    pub fn matrix_at(&self, sym: usize, sc: usize) -> CMat {
        let mut h = CMat::zeros(self.n_rx, self.n_streams);
        for rx in 0..self.n_rx {
            for s in 0..self.n_streams {
                h[(rx, s)] = self.gain(rx, s, sym, sc);
            }
        }
        h
    }
}

/// Bilinear interpolation of pilot estimates over the whole grid.
///
/// Each stream's pilots form a product lattice (distinct pilot symbols ×
/// distinct pilot subcarriers); values are interpolated separably along both
/// axes and clamped to the nearest lattice line outside the pilot hull, so a
/// single pilot extrapolates as a constant and affine channels are
/// reproduced exactly.
pub fn interpolate_2d(
    estimates: &PilotEstimates,
    n_symbols: usize,
    n_subcarriers: usize,
    n_rx: usize,
) -> GridChannelEstimate {
    let n_streams = estimates.per_stream.len();
    let mut out = GridChannelEstimate::new(n_rx, n_streams, n_symbols, n_subcarriers);
    for (s, pilots) in estimates.per_stream.iter().enumerate() {
        let mut sym_axis: Vec<usize> = pilots.iter().map(|&(sym, _, _)| sym).collect();
        sym_axis.sort_unstable();
        sym_axis.dedup();
        let mut sc_axis: Vec<usize> = pilots.iter().map(|&(_, sc, _)| sc).collect();
        sc_axis.sort_unstable();
        sc_axis.dedup();

        for rx in 0..n_rx {
            // Lattice of node values; a hole (possible only for non-product
            // layouts) falls back to the nearest pilot of this stream.
            let mut nodes =
                vec![vec![Complex64::new(0.0, 0.0); sc_axis.len()]; sym_axis.len()];
            for (i, &sym) in sym_axis.iter().enumerate() {
                for (j, &sc) in sc_axis.iter().enumerate() {
                    nodes[i][j] = pilots
                        .iter()
                        .min_by_key(|&&(ps, pc, _)| {
                            let ds = ps.abs_diff(sym);
                            let dc = pc.abs_diff(sc);
                            ds * ds + dc * dc
                        })
                        .map(|(_, _, est)| est[rx])
                        .unwrap()
                }
            }
            for sym in 0..n_symbols {
                let (i0, i1, fs) = bracket(&sym_axis, sym);
                for sc in 0..n_subcarriers {
                    let (j0, j1, fc) = bracket(&sc_axis, sc);
                    let top = nodes[i0][j0] * (1.0 - fc) + nodes[i0][j1] * fc;
                    let bottom = nodes[i1][j0] * (1.0 - fc) + nodes[i1][j1] * fc;
                    out.set(rx, s, sym, sc, top * (1.0 - fs) + bottom * fs);
                }
            }
        }
    }
    out
}

/// Bracketing lattice indices and interpolation fraction for `q` along a
/// sorted axis, clamped at the edges.
fn bracket(axis: &[usize], q: usize) -> (usize, usize, f64) {
    if q <= axis[0] {
        return (0, 0, 0.0);
    }
    if q >= *axis.last().unwrap() {
        let last = axis.len() - 1;
        return (last, last, 0.0);
    }
    let hi = axis.partition_point(|&a| a < q);
    let lo = hi - 1;
    if axis[hi] == q {
        return (hi, hi, 0.0);
    }
    let f = (q - axis[lo]) as f64 / (axis[hi] - axis[lo]) as f64;
    (lo, hi, f)
}

/// Per-RE LMMSE equalization: `x̂ = (ĤᴴĤ + σ²I)⁻¹ Ĥᴴ y`. Returns the soft
/// symbol vector and whether ε-loading was needed (singular system at
/// σ² = 0).
pub fn lmmse_equalize(y: &[Complex64], h: &CMat, sigma2: f64) -> (Vec<Complex64>, bool) {
    debug_assert_eq!(y.len(), h.rows);
    debug_assert!(sigma2 >= 0.0);
    let mut col = CMat::zeros(y.len(), 1);
    for (i, &v) in y.iter().enumerate() {
        col[(i, 0)] = v;
    }
    let rhs = h.herm_mul(&col);
    let mut gram = h.gram();
    gram.add_scaled_identity(sigma2);
    let mut regularized = false;
    if sigma2 == 0.0 {
        // Without noise loading the Gram can be singular (rank-deficient
        // Ĥ). Cholesky may still "succeed" on a rounding-level pivot, so
        // detect the deficiency spectrally and ε-load explicitly.
        let (eigs, _) = gram.hermitian_eig();
        let max_eig = eigs.last().copied().unwrap_or(0.0);
        if eigs[0] <= 1e-12 * max_eig.max(f64::MIN_POSITIVE) {
            gram.add_scaled_identity(1e-12);
            regularized = true;
        }
    }
    if let Some(x) = gram.cholesky_solve(&rhs) {
        return ((0..h.cols).map(|s| x[(s, 0)]).collect(), regularized);
    }
    gram.add_scaled_identity(1e-12);
    match gram.cholesky_solve(&rhs) {
        Some(x) => ((0..h.cols).map(|s| x[(s, 0)]).collect(), true),
        // Even ε-loading failed (pathological scaling): return zeros rather
        // than poisoning downstream slicing with NaNs.
        None => (vec![Complex64::new(0.0, 0.0); h.cols], true),
    }
}

/// Noise-variance estimate from pilot LS estimates when no hint is given:
/// per (stream, rx), fit an affine plane a + b·sym + c·sc to the estimates
/// and pool the residual variance (the interpolated estimates themselves
/// reproduce pilots exactly, so their fit residual is useless). Groups too
/// small for a plane fall back to variance around the mean.
pub fn estimate_sigma2(estimates: &PilotEstimates, n_rx: usize) -> f64 {
    let mut total = 0.0f64;
    let mut dof = 0usize;
    let mut fallback_total = 0.0f64;
    let mut fallback_dof = 0usize;
    for pilots in &estimates.per_stream {
        for rx in 0..n_rx {
            let n = pilots.len();
            if n >= 2 {
                let mean = pilots.iter().map(|(_, _, e)| e[rx]).sum::<Complex64>() / n as f64;
                let ss: f64 = pilots
                    .iter()
                    .map(|(_, _, e)| (e[rx] - mean).norm_sqr())
                    .sum();
                fallback_total += ss;
                fallback_dof += n - 1;
            }
            if n < 4 {
                continue;
            }
            let design = CMat::from_rows(
                &pilots
                    .iter()
                    .map(|&(sym, sc, _)| {
                        vec![
                            Complex64::new(1.0, 0.0),
                            Complex64::new(sym as f64, 0.0),
                            Complex64::new(sc as f64, 0.0),
                        ]
                    })
                    .collect::<Vec<_>>(),
            );
            let values = CMat::from_rows(
                &pilots.iter().map(|(_, _, e)| vec![e[rx]]).collect::<Vec<_>>(),
            );
            let gram = design.gram();
            let rhs = design.herm_mul(&values);
            // Degenerate lattices (a single pilot symbol, say) make the
            // plane rank-deficient; those groups use the mean fallback.
            let Some(coef) = gram.cholesky_solve(&rhs) else {
                continue;
            };
            let fitted = design.mul(&coef);
            let ss: f64 = (0..n).map(|i| (fitted[(i, 0)] - values[(i, 0)]).norm_sqr()).sum();
            total += ss;
            dof += n - 3;
        }
    }
    if dof > 0 {
        total / dof as f64
    } else if fallback_dof > 0 {
        fallback_total / fallback_dof as f64
    } else {
        1e-12
    }
}

/// Equalizes and slices all data REs of an observation against a per-RE
/// channel estimate. Shared by the estimated and perfect-CSI baselines.
fn equalize_grid(
    obs: &TtiObservation,
    estimate: &GridChannelEstimate,
    sigma2: f64,
) -> DetectionResult {
    let mut soft_per_stream = vec![Vec::with_capacity(obs.data_positions.len()); obs.n_streams];
    let mut regularized = false;
    for &(sym, sc) in &obs.data_positions {
        let y = obs.rx_vector(sym, sc);
        let h = estimate.matrix_at(sym, sc);
        let (soft, flagged) = lmmse_equalize(&y, &h, sigma2);
        regularized |= flagged;
        for (s, sink) in soft_per_stream.iter_mut().enumerate() {
            sink.push(soft[s]);
        }
    }
    let diagnostics = Diagnostics {
        sigma2,
        regularized,
        ..Diagnostics::none()
    };
    package(obs, soft_per_stream, diagnostics)
}

/// Classical baseline: LS pilot estimates → bilinear interpolation → per-RE
/// LMMSE equalization → slicing. σ² comes from the observation's hint or
/// from [`estimate_sigma2`].
pub fn lmmse_receive(obs: &TtiObservation) -> Result<DetectionResult, ReceiverError> {
    let pilot_est = ls_channel_estimate(obs)?;
    let estimate = interpolate_2d(
        &pilot_est,
        obs.n_symbols(),
        obs.n_subcarriers(),
        obs.rx_grids.len(),
    );
    let sigma2 = obs
        .noise_variance_hint
        .unwrap_or_else(|| estimate_sigma2(&pilot_est, obs.rx_grids.len()));
    Ok(equalize_grid(obs, &estimate, sigma2))
}

/// Perfect-CSI bound: LMMSE equalization with the true per-RE channel.
pub fn genie_receive(
    obs: &TtiObservation,
    true_channel: &GridChannelEstimate,
    sigma2: f64,
) -> DetectionResult {
    equalize_grid(obs, true_channel, sigma2)
}

/// Geometry of a delay–Doppler impulse pilot layout.
#[derive(Clone, Debug)]
pub struct DdPilotLayout {
    /// Per stream: the impulse position (doppler_bin, delay_bin).
    pub impulses: Vec<(usize, usize)>,
    pub guard_doppler: usize,
    pub guard_delay: usize,
}

/// OTFS classical baseline. The received DD grid around each stream's
/// impulse is (to guard accuracy) the channel's delay–Doppler spreading
/// kernel; converting each kernel to a time–frequency response
/// `H[n][m] = Σ_{κ,λ} k[κ][λ]·e^{j2π(nκ/N − mλ/M)}` gives per-RE channel
/// matrices in the TF domain, where the grid is equalized before
/// transforming back to DD for slicing. Doppler offsets are read
/// cyclically (negative Doppler wraps to the top rows), delay offsets
/// causally.
pub fn otfs_lmmse_receive(
    obs: &TtiObservation,
    layout: &DdPilotLayout,
) -> Result<DetectionResult, ReceiverError> {
    if layout.impulses.len() != obs.n_streams {
        return Err(ReceiverError::DimensionMismatch {
            expected: obs.n_streams,
            got: layout.impulses.len(),
        });
    }
    for (s, pilots) in obs.pilot_entries.iter().enumerate() {
        if pilots.is_empty() {
            return Err(ReceiverError::InsufficientPilots { stream: s });
        }
    }
    let n = obs.n_symbols();
    let m = obs.n_subcarriers();
    let n_rx = obs.rx_grids.len();

    // TF-domain view of the received grids (exact inverse of the final
    // demodulation step, so no information is lost).
    let tf_grids: Vec<ValueGrid> = obs.rx_grids.iter().map(isfft).collect();

    // Kernel Doppler window: everything the guard reserves, but never more
    // than one wrap of the Doppler circle, else cells double-count.
    let reach = layout.guard_doppler.min(n / 2) as isize;
    let dk_lo = -reach;
    let dk_hi = if 2 * reach as usize + 1 > n {
        reach - 1
    } else {
        reach
    };

    // Per (rx, stream) TF response accumulated from the measured kernel.
    let mut estimate = GridChannelEstimate::new(n_rx, obs.n_streams, n, m);
    for (s, &(k_c, l_c)) in layout.impulses.iter().enumerate() {
        let amp = obs.pilot_entries[s][0].2;
        for rx in 0..n_rx {
            let dd = &obs.rx_grids[rx];
            for dk in dk_lo..=dk_hi {
                let row = (k_c as isize + dk).rem_euclid(n as isize) as usize;
                for dl in 0..=layout.guard_delay {
                    let col = l_c + dl;
                    if col >= m {
                        continue;
                    }
                    let kernel = dd.at(row, col) / amp;
                    for sym in 0..n {
                        let phase = TAU
                            * (sym as f64 * dk as f64 / n as f64);
                        let rot_sym = Complex64::from_polar(1.0, phase);
                        for sc in 0..m {
                            let rot_sc = Complex64::from_polar(
                                1.0,
                                -TAU * (sc as f64 * dl as f64 / m as f64),
                            );
                            let prev = estimate.gain(rx, s, sym, sc);
                            estimate.set(rx, s, sym, sc, prev + kernel * rot_sym * rot_sc);
                        }
                    }
                }
            }
        }
    }

    let sigma2 = obs.noise_variance_hint.unwrap_or_else(|| {
        // Guard cells at maximal delay offset are dominated by noise once
        // the channel's delay support is shorter than the guard.
        let mut acc = 0.0;
        let mut count = 0usize;
        for &(k_c, l_c) in &layout.impulses {
            let col = l_c + layout.guard_delay;
            if col >= m {
                continue;
            }
            for rx in 0..n_rx {
                let dd = &obs.rx_grids[rx];
                for dk in dk_lo..=dk_hi {
                    let row = (k_c as isize + dk).rem_euclid(n as isize) as usize;
                    acc += dd.at(row, col).norm_sqr();
                    count += 1;
                }
            }
        }
        if count == 0 {
            1e-12
        } else {
            acc / count as f64
        }
    });

    // Equalize in TF, then bring the soft grid back to DD for slicing.
    let mut soft_tf = vec![ValueGrid::zeros(n, m); obs.n_streams];
    let mut regularized = false;
    for sym in 0..n {
        for sc in 0..m {
            let y: Vec<Complex64> = tf_grids.iter().map(|g| g.at(sym, sc)).collect();
            let h = estimate.matrix_at(sym, sc);
            let (soft, flagged) = lmmse_equalize(&y, &h, sigma2);
            regularized |= flagged;
            for (s, grid) in soft_tf.iter_mut().enumerate() {
                grid.set(sym, sc, soft[s]);
            }
        }
    }
    let soft_dd: Vec<ValueGrid> = soft_tf.iter().map(sfft).collect();
    let soft_per_stream: Vec<Vec<Complex64>> = (0..obs.n_streams)
        .map(|s| {
            obs.data_positions
                .iter()
                .map(|&(k, l)| soft_dd[s].at(k, l))
                .collect()
        })
        .collect();
    let diagnostics = Diagnostics {
        sigma2,
        regularized,
        ..Diagnostics::none()
    };
    Ok(package(obs, soft_per_stream, diagnostics))
}
