//! Link-level simulation harness: JSON-configured BER/SER sweeps of the
//! reservoir receiver against LMMSE baselines over statistical channels.
//!
//! One TTI runs the full chain — random payload bits → resource grid →
//! CP-OFDM or OTFS modulation → tapped-delay-line channel with Jakes
//! Doppler evolution → AWGN → demodulation → every configured receiver →
//! error counts against the transmitted ground truth. All receivers within
//! a TTI see the identical channel and noise realization, so comparisons
//! are matched-randomness.
//!
//! # Reproducibility
//!
//! Every random draw descends from `master_seed` through the SplitMix64
//! finalizer `mix64` and the sub-stream derivation
//! `derive(seed, salt) = mix64(seed ^ (salt+1)·0x9e3779b97f4a7c15)`:
//!
//! * per-TTI seed: `derive(derive(master_seed, snr_index), tti_index)`
//! * within a TTI, salt 1 = payload bits, 2 = pilot values, 3 = channel
//!   taps, 4 = Doppler evolution, 5 = noise (further derived per rx
//!   antenna with the antenna index as salt)
//! * reservoir poles: `derive(master_seed, 6)`, drawn once per sweep and
//!   fixed across TTIs and SNR points.
//!
//! Sweeps are embarrassingly parallel; aggregation sums integer error
//! counts per (receiver, SNR) cell, so serial and parallel execution
//! produce bit-identical reports.

use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nrx_core::channel::{
    apply_fir, awgn, evolve_doppler_held, sample_tdl_channel, ChannelRealization, DopplerModel,
    DopplerSpec,
};
use nrx_core::Complex64;
use nrx_core::deconv;
use nrx_core::math::rng::{derive, Rng};
use nrx_core::receivers::{
    genie_receive, lmmse_receive, neural_receive, otfs_lmmse_receive, DdPilotLayout,
    DetectionResult, GridChannelEstimate, GridSerialization, NeuralConfig, TtiObservation,
};
use nrx_core::reservoir::{PoleStrategy, Ridge, TapStatistics};
use nrx_core::signal::grid::{build_grid, pilot_layout, PilotPattern, ValueGrid};
use nrx_core::signal::ofdm::{ofdm_demodulate, ofdm_modulate};
use nrx_core::signal::otfs::{otfs_demodulate, otfs_modulate};
use nrx_core::signal::Constellation;

const SALT_BITS: u64 = 1;
const SALT_PILOTS: u64 = 2;
const SALT_CHANNEL: u64 = 3;
const SALT_DOPPLER: u64 = 4;
const SALT_NOISE: u64 = 5;
const SALT_POLES: u64 = 6;

/// Configuration or runtime failure, mapped to distinct CLI exit codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HarnessError {
    /// Invalid configuration (bad file, schema violation, inconsistent
    /// parameters). CLI exit code 2.
    Config(String),
    /// Failure while running a valid configuration. CLI exit code 1.
    Runtime(String),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Config(msg) => write!(f, "config error: {msg}"),
            HarnessError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

impl std::error::Error for HarnessError {}

/// Modulation applied to the resource grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Waveform {
    /// Cyclic-prefix OFDM; the grid is time–frequency.
    OfdmCp,
    /// OTFS; the grid is delay–Doppler, carried over CP-OFDM.
    Otfs,
}

/// Constellation selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstellationChoice {
    Qpsk,
    Qam16,
    Qam64,
}

impl ConstellationChoice {
    pub fn to_core(self) -> Constellation {
        match self {
            ConstellationChoice::Qpsk => Constellation::Qpsk,
            ConstellationChoice::Qam16 => Constellation::Qam16,
            ConstellationChoice::Qam64 => Constellation::Qam64,
        }
    }
}

/// Pilot placement selector (see the signal layer for the exact layouts).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PilotPatternConfig {
    /// Every RE carries data; only the perfect-CSI receiver can run.
    None,
    /// Two pilot symbols, four pilot subcarriers per stream per 12-sc block.
    Fig2Like,
    /// The first `count` OFDM symbols are all pilots.
    LeadingSymbols { count: usize },
    /// One boosted impulse per stream inside a guarded delay–Doppler box,
    /// plus `scattered` unit-power pilots per stream spread over the data
    /// region (extra training rows for regression-based receivers). `boost`
    /// pins the spike amplitude; omitted, the spike absorbs its guard box's
    /// energy budget.
    DdImpulse {
        guard_doppler: usize,
        guard_delay: usize,
        #[serde(default)]
        scattered: usize,
        #[serde(default)]
        boost: Option<f64>,
    },
}

impl PilotPatternConfig {
    pub fn to_core(&self) -> PilotPattern {
        match *self {
            PilotPatternConfig::None => PilotPattern::None,
            PilotPatternConfig::Fig2Like => PilotPattern::Fig2Like,
            PilotPatternConfig::LeadingSymbols { count } => PilotPattern::LeadingSymbols(count),
            PilotPatternConfig::DdImpulse {
                guard_doppler,
                guard_delay,
                scattered,
                boost,
            } => PilotPattern::DdImpulse {
                guard_doppler,
                guard_delay,
                scattered,
                boost,
            },
        }
    }
}

/// Statistical channel parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    /// Tapped-delay-line length in samples.
    pub n_taps: usize,
    /// RMS delay spread of the exponential power profile, seconds.
    pub delay_spread_s: f64,
    pub carrier_freq_hz: f64,
    /// User speed in m/s; 0 freezes the channel within the TTI.
    pub velocity_mps: f64,
    /// Sum-of-sinusoids order for the Jakes fading processes.
    pub n_sinusoids: usize,
    /// Samples per constant-channel block during Doppler evolution;
    /// 0 means one OFDM frame (`cp_len + n_subcarriers`).
    pub doppler_hold_samples: usize,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            n_taps: 4,
            delay_spread_s: 50e-9,
            carrier_freq_hz: 3.8e9,
            velocity_mps: 30.0 / 3.6,
            n_sinusoids: 16,
            doppler_hold_samples: 0,
        }
    }
}

/// Receiver selector; each runs on the identical observation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKind {
    /// Reservoir receiver with per-TTI readout training.
    Neural,
    /// LS pilot estimation + interpolation + LMMSE equalization
    /// (kernel-based TF equalization for OTFS grids).
    Lmmse,
    /// LMMSE with the true channel (perfect-CSI bound).
    Genie,
}

impl ReceiverKind {
    pub fn name(self) -> &'static str {
        match self {
            ReceiverKind::Neural => "neural",
            ReceiverKind::Lmmse => "lmmse",
            ReceiverKind::Genie => "genie",
        }
    }
}

/// Pole-placement selector. The covariance-matched variant draws its
/// channel ensemble from this experiment's own tap statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PoleStrategyConfig {
    UniformDisk { r_max: f64 },
    EdgeBiased { r_max: f64, gamma: f64 },
    CovarianceMatched { r_max: f64, n_channels: usize },
}

/// Ridge-regularization selector for the readout fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RidgeConfig {
    Absolute { lambda: f64 },
    Scaled { scale: f64 },
}

impl RidgeConfig {
    pub fn to_core(self) -> Ridge {
        match self {
            RidgeConfig::Absolute { lambda } => Ridge::Absolute(lambda),
            RidgeConfig::Scaled { scale } => Ridge::Scaled(scale),
        }
    }
}

/// Reservoir dimensioning for the neural receiver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReservoirSettings {
    /// Neurons (poles) per receive antenna.
    pub n_poles: usize,
    /// Skip-connection order (direct delayed-input taps).
    pub skip_order: usize,
    /// Output-delay search bound for the readout fit; 0 means "same as
    /// skip_order". OTFS grids want roughly one extended row block here,
    /// because the cyclic delay–Doppler spreading makes the inverse partly
    /// anti-causal.
    pub max_delay: usize,
    /// Circular context rows each side of the serialized frame (OTFS only;
    /// the delay–Doppler channel is a 2D circular convolution, so the
    /// reservoir input carries wrap-around context).
    pub dd_context_rows: usize,
    /// Feed block-shifted copies of each stream so the readout gets direct
    /// adjacent-Doppler taps (OTFS only; costs 3× the features).
    pub dd_doppler_taps: bool,
    pub strategy: PoleStrategyConfig,
    pub ridge: RidgeConfig,
}

impl Default for ReservoirSettings {
    fn default() -> Self {
        ReservoirSettings {
            n_poles: 64,
            skip_order: 4,
            max_delay: 0,
            dd_context_rows: 2,
            dd_doppler_taps: false,
            strategy: PoleStrategyConfig::EdgeBiased {
                r_max: 0.95,
                gamma: 4.0,
            },
            ridge: RidgeConfig::Scaled { scale: 1e-4 },
        }
    }
}

/// Full experiment description. The defaults mirror the reference OFDM
/// scenario: 14 × 252 grid at 30 kHz spacing, 3.8 GHz carrier, 4-tap TDL
/// with 50 ns delay spread at 30 km/h, 16-QAM, 2 streams × 2 rx antennas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub waveform: Waveform,
    /// OFDM symbols (OTFS: Doppler bins) per TTI.
    pub n_symbols: usize,
    /// Subcarriers (OTFS: delay bins).
    pub n_subcarriers: usize,
    pub cp_len: usize,
    pub subcarrier_spacing_hz: f64,
    pub pilot_pattern: PilotPatternConfig,
    pub constellation: ConstellationChoice,
    pub channel: ChannelConfig,
    /// Receive antennas.
    pub n_rx: usize,
    /// Spatial streams (each feeds its own transmit antenna).
    pub n_streams: usize,
    pub receivers: Vec<ReceiverKind>,
    pub reservoir: ReservoirSettings,
    pub snr_db: Vec<f64>,
    pub ttis_per_point: usize,
    pub master_seed: u64,
    /// Hand receivers the true noise variance; otherwise the baseline
    /// estimates it from pilot residuals.
    pub noise_hint: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            waveform: Waveform::OfdmCp,
            n_symbols: 14,
            n_subcarriers: 252,
            cp_len: 18,
            subcarrier_spacing_hz: 30e3,
            pilot_pattern: PilotPatternConfig::Fig2Like,
            constellation: ConstellationChoice::Qam16,
            channel: ChannelConfig::default(),
            n_rx: 2,
            n_streams: 2,
            receivers: vec![ReceiverKind::Neural, ReceiverKind::Lmmse, ReceiverKind::Genie],
            reservoir: ReservoirSettings::default(),
            snr_db: vec![10.0, 15.0, 20.0],
            ttis_per_point: 10,
            master_seed: 1,
            noise_hint: true,
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a JSON config.
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a config file, surfacing the path in any error.
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn sample_rate(&self) -> f64 {
        self.n_subcarriers as f64 * self.subcarrier_spacing_hz
    }

    fn frame_len(&self) -> usize {
        self.cp_len + self.n_subcarriers
    }

    fn doppler_hold(&self) -> usize {
        if self.channel.doppler_hold_samples == 0 {
            self.frame_len()
        } else {
            self.channel.doppler_hold_samples
        }
    }

    /// Checks internal consistency; every rejected config comes with a
    /// human-readable reason.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.n_symbols == 0 || self.n_subcarriers == 0 {
            return fail("grid dimensions must be nonzero".into());
        }
        if self.cp_len >= self.n_subcarriers {
            return fail(format!(
                "cp_len {} must be shorter than n_subcarriers {}",
                self.cp_len, self.n_subcarriers
            ));
        }
        if self.n_rx == 0 || self.n_streams == 0 {
            return fail("need at least one rx antenna and one stream".into());
        }
        if self.receivers.is_empty() {
            return fail("no receivers configured".into());
        }
        if self.snr_db.is_empty() || self.ttis_per_point == 0 {
            return fail("need at least one SNR point and one TTI".into());
        }
        if self.channel.n_taps == 0 {
            return fail("channel needs at least one tap".into());
        }
        if self.channel.n_taps > self.cp_len + 1 {
            return fail(format!(
                "channel memory ({} taps) exceeds the cyclic prefix ({} samples); \
                 per-RE channel modeling would be invalid",
                self.channel.n_taps, self.cp_len
            ));
        }
        if self.subcarrier_spacing_hz <= 0.0 || self.channel.carrier_freq_hz <= 0.0 {
            return fail("frequencies must be positive".into());
        }
        if self.channel.velocity_mps < 0.0 {
            return fail("velocity must be non-negative".into());
        }
        if self.channel.velocity_mps > 0.0 && self.channel.n_sinusoids == 0 {
            return fail("Doppler evolution needs n_sinusoids >= 1".into());
        }
        if self.reservoir.n_poles == 0 {
            return fail("reservoir needs at least one pole".into());
        }
        match self.reservoir.strategy {
            PoleStrategyConfig::UniformDisk { r_max }
            | PoleStrategyConfig::EdgeBiased { r_max, .. }
            | PoleStrategyConfig::CovarianceMatched { r_max, .. } => {
                if !(r_max > 0.0 && r_max < 1.0) {
                    return fail(format!("pole radius bound {r_max} must lie in (0, 1)"));
                }
            }
        }
        // Pattern/grid compatibility (dimensions, stream counts).
        let pattern = self.pilot_pattern.to_core();
        let layout = pilot_layout(&pattern, self.n_symbols, self.n_subcarriers, self.n_streams)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        let trained = self
            .receivers
            .iter()
            .any(|r| matches!(r, ReceiverKind::Neural | ReceiverKind::Lmmse));
        if trained && layout.per_stream.iter().any(|p| p.is_empty()) {
            return fail("pilot-trained receivers need at least one pilot per stream".into());
        }
        if self.waveform == Waveform::Otfs {
            if self.receivers.contains(&ReceiverKind::Genie) {
                return fail("the perfect-CSI receiver is not defined for OTFS grids".into());
            }
            if self.receivers.contains(&ReceiverKind::Lmmse)
                && !matches!(self.pilot_pattern, PilotPatternConfig::DdImpulse { .. })
            {
                return fail(
                    "the OTFS LMMSE baseline requires the dd_impulse pilot pattern".into(),
                );
            }
        }
        if layout.known.len() >= self.n_symbols * self.n_subcarriers {
            return fail("pilot pattern leaves no data REs".into());
        }
        Ok(())
    }

    fn pole_strategy(&self) -> PoleStrategy {
        match self.reservoir.strategy {
            PoleStrategyConfig::UniformDisk { r_max } => PoleStrategy::UniformDisk { r_max },
            PoleStrategyConfig::EdgeBiased { r_max, gamma } => {
                PoleStrategy::EdgeBiased { r_max, gamma }
            }
            PoleStrategyConfig::CovarianceMatched { r_max, n_channels } => {
                PoleStrategy::CovarianceMatched {
                    r_max,
                    n_channels,
                    stats: TapStatistics {
                        n_taps: self.channel.n_taps,
                        delay_spread: self.channel.delay_spread_s,
                        sample_rate: self.sample_rate(),
                    },
                }
            }
        }
    }

    fn neural_config(&self) -> NeuralConfig {
        let max_delay = if self.reservoir.max_delay == 0 {
            self.reservoir.skip_order
        } else {
            self.reservoir.max_delay
        };
        let serialization = match self.waveform {
            Waveform::OfdmCp => GridSerialization::Linear,
            Waveform::Otfs => GridSerialization::CircularRows {
                context_rows: self.reservoir.dd_context_rows,
                doppler_taps: self.reservoir.dd_doppler_taps,
            },
        };
        NeuralConfig {
            n_poles: self.reservoir.n_poles,
            skip_order: self.reservoir.skip_order,
            strategy: self.pole_strategy(),
            ridge: self.reservoir.ridge.to_core(),
            pole_seed: derive(self.master_seed, SALT_POLES),
            max_delay,
            serialization,
        }
    }
}

/// Error counts from one receiver over one TTI.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TtiCounts {
    pub n_bits: u64,
    pub n_bit_errors: u64,
    pub n_symbols: u64,
    pub n_symbol_errors: u64,
}

impl TtiCounts {
    fn absorb(&mut self, other: TtiCounts) {
        self.n_bits += other.n_bits;
        self.n_bit_errors += other.n_bit_errors;
        self.n_symbols += other.n_symbols;
        self.n_symbol_errors += other.n_symbol_errors;
    }
}

fn runtime<E: fmt::Display>(context: &str) -> impl Fn(E) -> HarnessError + '_ {
    move |e| HarnessError::Runtime(format!("{context}: {e}"))
}

/// Runs the full chain for one TTI at one SNR point and counts errors for
/// every configured receiver. All receivers observe the identical channel
/// and noise realization.
pub fn run_tti(
    cfg: &ExperimentConfig,
    snr_db: f64,
    tti_seed: u64,
) -> Result<Vec<TtiCounts>, HarnessError> {
    let constellation = cfg.constellation.to_core();
    let bps = constellation.bits_per_symbol();
    let pattern = cfg.pilot_pattern.to_core();
    let layout = pilot_layout(&pattern, cfg.n_symbols, cfg.n_subcarriers, cfg.n_streams)
        .map_err(runtime("pilot layout"))?;
    let n_data = cfg.n_symbols * cfg.n_subcarriers - layout.known.len();

    // Payload bits and their constellation symbols, per stream.
    let mut bit_rng = Rng::new(derive(tti_seed, SALT_BITS));
    let mut tx_bits: Vec<Vec<u8>> = Vec::with_capacity(cfg.n_streams);
    let mut tx_data: Vec<Vec<Complex64>> = Vec::with_capacity(cfg.n_streams);
    for _ in 0..cfg.n_streams {
        let bits: Vec<u8> = (0..n_data * bps).map(|_| bit_rng.below(2) as u8).collect();
        let symbols = constellation
            .map_bits(&bits)
            .map_err(runtime("bit mapping"))?;
        tx_bits.push(bits);
        tx_data.push(symbols);
    }

    let tx_grid = build_grid(
        cfg.n_symbols,
        cfg.n_subcarriers,
        cfg.n_streams,
        &pattern,
        derive(tti_seed, SALT_PILOTS),
        &tx_data,
    )
    .map_err(runtime("grid assembly"))?;

    // Modulate every stream onto its own transmit antenna.
    let mut tx_samples: Vec<Vec<Complex64>> = Vec::with_capacity(cfg.n_streams);
    for s in 0..cfg.n_streams {
        let grid = tx_grid.stream_values(s);
        let samples = match cfg.waveform {
            Waveform::OfdmCp => ofdm_modulate(&grid, cfg.cp_len),
            Waveform::Otfs => otfs_modulate(&grid, cfg.cp_len),
        }
        .map_err(runtime("modulation"))?;
        tx_samples.push(samples);
    }
    let n_samples = tx_samples[0].len();

    // Fresh channel realization per TTI, Doppler-evolved within it.
    let static_ch = sample_tdl_channel(
        cfg.channel.n_taps,
        cfg.channel.delay_spread_s,
        cfg.sample_rate(),
        cfg.n_rx,
        cfg.n_streams,
        derive(tti_seed, SALT_CHANNEL),
    );
    let ch: ChannelRealization = if cfg.channel.velocity_mps > 0.0 {
        let spec = DopplerSpec {
            velocity: cfg.channel.velocity_mps,
            carrier_freq: cfg.channel.carrier_freq_hz,
            model: DopplerModel::Jakes {
                n_sinusoids: cfg.channel.n_sinusoids,
            },
        };
        evolve_doppler_held(
            &static_ch,
            &spec,
            n_samples,
            cfg.doppler_hold(),
            derive(tti_seed, SALT_DOPPLER),
        )
    } else {
        static_ch
    };
    let clean_rx = apply_fir(&tx_samples, &ch).map_err(runtime("channel"))?;

    // Noise scaled to each antenna's measured signal power.
    let noise_root = derive(tti_seed, SALT_NOISE);
    let mut rx_grids: Vec<ValueGrid> = Vec::with_capacity(cfg.n_rx);
    let mut noise_vars = Vec::with_capacity(cfg.n_rx);
    for (r, clean) in clean_rx.iter().enumerate() {
        let power = clean.iter().map(|v| v.norm_sqr()).sum::<f64>() / clean.len() as f64;
        let noisy = awgn(clean, snr_db, power, derive(noise_root, r as u64));
        noise_vars.push(power * 10f64.powf(-snr_db / 10.0));
        let grid = match cfg.waveform {
            Waveform::OfdmCp => ofdm_demodulate(&noisy, cfg.n_subcarriers, cfg.cp_len),
            Waveform::Otfs => otfs_demodulate(&noisy, cfg.n_subcarriers, cfg.cp_len),
        }
        .map_err(runtime("demodulation"))?;
        rx_grids.push(grid);
    }
    let true_sigma2 = noise_vars.iter().sum::<f64>() / noise_vars.len() as f64;
    let hint = cfg.noise_hint.then_some(true_sigma2);

    let obs = TtiObservation::from_grids(&tx_grid, rx_grids, constellation, hint)
        .map_err(runtime("observation"))?;

    // True per-RE channel for the perfect-CSI bound: tap gains averaged
    // over each symbol body, Fourier-transformed across delay.
    let truth = cfg.receivers.contains(&ReceiverKind::Genie).then(|| {
        let mut est =
            GridChannelEstimate::new(cfg.n_rx, cfg.n_streams, cfg.n_symbols, cfg.n_subcarriers);
        let frame = cfg.frame_len();
        for sym in 0..cfg.n_symbols {
            let t0 = sym * frame + cfg.cp_len;
            let t1 = t0 + cfg.n_subcarriers;
            for rx in 0..cfg.n_rx {
                for s in 0..cfg.n_streams {
                    let taps: Vec<Complex64> = (0..cfg.channel.n_taps)
                        .map(|tap| ch.mean_tap(t0, t1, tap, rx, s))
                        .collect();
                    for sc in 0..cfg.n_subcarriers {
                        let mut h = Complex64::new(0.0, 0.0);
                        for (tap, &g) in taps.iter().enumerate() {
                            let phase = -core::f64::consts::TAU * (sc * tap) as f64
                                / cfg.n_subcarriers as f64;
                            h += g * Complex64::from_polar(1.0, phase);
                        }
                        est.set(rx, s, sym, sc, h);
                    }
                }
            }
        }
        est
    });

    let dd_layout = matches!(cfg.waveform, Waveform::Otfs).then(|| {
        let (guard_doppler, guard_delay) = match cfg.pilot_pattern {
            PilotPatternConfig::DdImpulse {
                guard_doppler,
                guard_delay,
                ..
            } => (guard_doppler, guard_delay),
            _ => (0, 0),
        };
        DdPilotLayout {
            impulses: layout.per_stream.iter().map(|p| p[0]).collect(),
            guard_doppler,
            guard_delay,
        }
    });

    let mut counts = Vec::with_capacity(cfg.receivers.len());
    for kind in &cfg.receivers {
        let result: DetectionResult = match kind {
            ReceiverKind::Neural => {
                neural_receive(&obs, &cfg.neural_config()).map_err(runtime("neural receiver"))?
            }
            ReceiverKind::Lmmse => match cfg.waveform {
                Waveform::OfdmCp => lmmse_receive(&obs).map_err(runtime("lmmse receiver"))?,
                Waveform::Otfs => {
                    otfs_lmmse_receive(&obs, dd_layout.as_ref().expect("otfs layout"))
                        .map_err(runtime("otfs lmmse receiver"))?
                }
            },
            ReceiverKind::Genie => genie_receive(
                &obs,
                truth.as_ref().expect("true channel prepared"),
                true_sigma2,
            ),
        };
        counts.push(count_errors(&tx_bits, &tx_data, &result));
    }
    Ok(counts)
}

fn count_errors(
    tx_bits: &[Vec<u8>],
    tx_data: &[Vec<Complex64>],
    result: &DetectionResult,
) -> TtiCounts {
    let mut counts = TtiCounts::default();
    for s in 0..tx_bits.len() {
        debug_assert_eq!(tx_bits[s].len(), result.bits[s].len());
        counts.n_bits += tx_bits[s].len() as u64;
        counts.n_bit_errors += tx_bits[s]
            .iter()
            .zip(&result.bits[s])
            .filter(|(a, b)| a != b)
            .count() as u64;
        counts.n_symbols += tx_data[s].len() as u64;
        counts.n_symbol_errors += tx_data[s]
            .iter()
            .zip(&result.hard_symbols[s])
            .filter(|(a, b)| (*a - *b).norm() > 1e-12)
            .count() as u64;
    }
    counts
}

/// One aggregated (receiver, SNR) cell of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct BerRow {
    pub receiver: String,
    pub snr_db: f64,
    pub n_bits: u64,
    pub n_bit_errors: u64,
    pub n_symbols: u64,
    pub n_symbol_errors: u64,
}

impl BerRow {
    pub fn ber(&self) -> f64 {
        if self.n_bits == 0 {
            0.0
        } else {
            self.n_bit_errors as f64 / self.n_bits as f64
        }
    }

    pub fn ser(&self) -> f64 {
        if self.n_symbols == 0 {
            0.0
        } else {
            self.n_symbol_errors as f64 / self.n_symbols as f64
        }
    }
}

/// Sweep result: one row per (receiver, SNR), receivers in config order,
/// SNR points in config order within each receiver.
#[derive(Clone, Debug, PartialEq)]
pub struct BerReport {
    pub rows: Vec<BerRow>,
}

/// Runs `ttis_per_point` TTIs at every SNR point and aggregates error
/// counts. `parallel` distributes TTIs over rayon's pool; because each TTI
/// is independently seeded and aggregation sums integers in a fixed order,
/// the report is bit-identical either way.
pub fn run_sweep(cfg: &ExperimentConfig, parallel: bool) -> Result<BerReport, HarnessError> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.snr_db.len())
        .flat_map(|i| (0..cfg.ttis_per_point).map(move |j| (i, j)))
        .collect();
    let run = |&(snr_idx, tti_idx): &(usize, usize)| {
        let tti_seed = derive(derive(cfg.master_seed, snr_idx as u64), tti_idx as u64);
        run_tti(cfg, cfg.snr_db[snr_idx], tti_seed).map(|c| (snr_idx, c))
    };
    let per_tti: Vec<(usize, Vec<TtiCounts>)> = if parallel {
        jobs.par_iter().map(run).collect::<Result<_, _>>()?
    } else {
        jobs.iter().map(run).collect::<Result<_, _>>()?
    };

    let mut cells = vec![vec![TtiCounts::default(); cfg.snr_db.len()]; cfg.receivers.len()];
    for (snr_idx, counts) in per_tti {
        for (r, c) in counts.into_iter().enumerate() {
            cells[r][snr_idx].absorb(c);
        }
    }
    let mut rows = Vec::with_capacity(cfg.receivers.len() * cfg.snr_db.len());
    for (r, kind) in cfg.receivers.iter().enumerate() {
        for (i, &snr) in cfg.snr_db.iter().enumerate() {
            let c = cells[r][i];
            rows.push(BerRow {
                receiver: kind.name().to_string(),
                snr_db: snr,
                n_bits: c.n_bits,
                n_bit_errors: c.n_bit_errors,
                n_symbols: c.n_symbols,
                n_symbol_errors: c.n_symbol_errors,
            });
        }
    }
    Ok(BerReport { rows })
}

/// Renders a report as CSV. Floats use Rust's scientific notation, which
/// prints the shortest digit string that round-trips exactly.
pub fn csv_string(report: &BerReport) -> String {
    let mut out = String::from("receiver,snr_db,n_bits,n_bit_errors,ber,n_symbol_errors,ser\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{:e},{},{},{:e},{},{:e}\n",
            row.receiver,
            row.snr_db,
            row.n_bits,
            row.n_bit_errors,
            row.ber(),
            row.n_symbol_errors,
            row.ser()
        ));
    }
    out
}

/// Writes the CSV to disk, surfacing the path in any I/O error.
pub fn emit_csv(report: &BerReport, path: &Path) -> Result<(), HarnessError> {
    fs::write(path, csv_string(report))
        .map_err(|e| HarnessError::Runtime(format!("{}: {e}", path.display())))
}

/// Parses `--taps` input ("1,-0.5" or "1+0i,-0.5+0.25i") into coefficients.
pub fn parse_taps(text: &str) -> Result<Vec<Complex64>, HarnessError> {
    let mut taps = Vec::new();
    for piece in text.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(HarnessError::Config("empty tap in --taps list".into()));
        }
        let v = parse_complex(piece)
            .ok_or_else(|| HarnessError::Config(format!("cannot parse tap '{piece}'")))?;
        taps.push(v);
    }
    if taps.is_empty() {
        return Err(HarnessError::Config("--taps list is empty".into()));
    }
    Ok(taps)
}

fn parse_complex(s: &str) -> Option<Complex64> {
    if let Ok(re) = s.parse::<f64>() {
        return Some(Complex64::new(re, 0.0));
    }
    // a+bi / a-bi with the imaginary part marked by a trailing 'i' or 'j'.
    let body = s.strip_suffix(['i', 'j'])?;
    let bytes = body.as_bytes();
    // Split at the rightmost sign that isn't part of an exponent.
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))?;
    let re = body[..split].parse::<f64>().ok()?;
    let im = match &body[split..] {
        "+" => 1.0,
        "-" => -1.0,
        im => im.parse::<f64>().ok()?,
    };
    Some(Complex64::new(re, im))
}

/// Formats the pole/weight decomposition of a FIR filter's inverse, as
/// printed by `nrx decompose`.
pub fn decompose_report(taps: &[Complex64]) -> Result<String, HarnessError> {
    let form = deconv::invert_fir(taps).map_err(|e| HarnessError::Runtime(e.to_string()))?;
    let mut out = format!(
        "inverse of {}-tap filter: {} pole(s), {} skip tap(s)\n",
        taps.len(),
        form.poles.len(),
        form.skip_taps.len()
    );
    for (i, (p, w)) in form.poles.iter().zip(&form.weights).enumerate() {
        out.push_str(&format!(
            "pole {i}: {} {:+}i    weight: {} {:+}i\n",
            p.re, p.im, w.re, w.im
        ));
    }
    for (j, a) in form.skip_taps.iter().enumerate() {
        out.push_str(&format!("skip {j}: {} {:+}i\n", a.re, a.im));
    }
    Ok(out)
}

/// The `demo` subcommand: the default OFDM scenario at three SNR points,
/// rendered as a small table.
pub fn run_demo(master_seed: u64) -> Result<String, HarnessError> {
    let cfg = ExperimentConfig {
        master_seed,
        ..ExperimentConfig::default()
    };
    let report = run_sweep(&cfg, true)?;
    let mut out = String::from(
        "demo sweep: 14x252 OFDM grid, 16-QAM, 2x2, TDL 4 taps / 50 ns, 30 km/h\n",
    );
    out.push_str(&format!(
        "{:<8} {:>7} {:>12} {:>12} {:>12}\n",
        "receiver", "snr_db", "ber", "ser", "bits"
    ));
    for row in &report.rows {
        out.push_str(&format!(
            "{:<8} {:>7} {:>12} {:>12} {:>12}\n",
            row.receiver,
            format!("{:e}", row.snr_db),
            format!("{:e}", row.ber()),
            format!("{:e}", row.ser()),
            row.n_bits
        ));
    }
    Ok(out)
}
