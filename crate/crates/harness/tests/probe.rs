//! Scratch probe for exploring OTFS scenario configurations. Not part of the
//! shipped test suite; run with `cargo test --test probe -- --ignored --nocapture`.

use nrx_harness::{
    ChannelConfig, ConstellationChoice, ExperimentConfig, PilotPatternConfig, ReceiverKind,
    ReservoirSettings, RidgeConfig, PoleStrategyConfig, Waveform,
};

#[allow(clippy::too_many_arguments)]
fn otfs_cfg(
    n_symbols: usize,
    scs: f64,
    delay_spread_s: f64,
    velocity_mps: f64,
    hold: usize,
    scattered: usize,
    boost: Option<f64>,
    n_poles: usize,
    skip: usize,
    max_delay: usize,
    taps: bool,
    ridge: f64,
) -> ExperimentConfig {
    ExperimentConfig {
        waveform: Waveform::Otfs,
        n_symbols,
        n_subcarriers: 32,
        cp_len: 4,
        subcarrier_spacing_hz: scs,
        pilot_pattern: PilotPatternConfig::DdImpulse {
            guard_doppler: 8,
            guard_delay: 3,
            scattered,
            boost,
        },
        constellation: ConstellationChoice::Qam16,
        channel: ChannelConfig {
            n_taps: 4,
            delay_spread_s,
            carrier_freq_hz: 3.8e9,
            velocity_mps,
            n_sinusoids: 16,
            doppler_hold_samples: hold,
        },
        n_rx: 2,
        n_streams: 2,
        receivers: vec![ReceiverKind::Neural, ReceiverKind::Lmmse],
        reservoir: ReservoirSettings {
            n_poles,
            skip_order: skip,
            max_delay,
            dd_context_rows: 2,
            dd_doppler_taps: taps,
            strategy: PoleStrategyConfig::EdgeBiased {
                r_max: 0.95,
                gamma: 4.0,
            },
            ridge: RidgeConfig::Scaled { scale: ridge },
        },
        snr_db: vec![20.0],
        ttis_per_point: 10,
        master_seed: 11,
        noise_hint: true,
    }
}

fn report(label: &str, cfg: ExperimentConfig) {
    let rep = nrx_harness::run_sweep(&cfg, false).expect("sweep");
    let mut neural = f64::NAN;
    let mut lmmse = f64::NAN;
    for row in &rep.rows {
        match row.receiver.as_str() {
            "neural" => neural = row.ber(),
            "lmmse" => lmmse = row.ber(),
            _ => {}
        }
    }
    println!("{label} -> neural {neural:.4}  lmmse {lmmse:.4}");
}

#[test]
#[ignore]
fn probe_otfs_neural() {
    // Frame-duration ladder at 200 TTIs: shorter frames shrink the
    // within-frame Doppler drift the per-TTI linear fit must absorb, while
    // the kernel baseline's estimation noise (box cells * sigma^2 / boost^2)
    // stays fixed.
    for (scs, scat, boost, ridge, seed) in [
        (480e3, 48, Some(4.0), 1e-1, 11),
        (480e3, 48, Some(4.0), 1e-1, 5),
        (480e3, 96, Some(4.0), 1e-1, 11),
        (480e3, 48, Some(4.0), 3e-2, 11),
        (960e3, 48, Some(4.0), 1e-1, 11),
        (240e3, 48, Some(3.0), 1e-1, 11),
    ] {
        let mut cfg = otfs_cfg(8, scs, 2.5e-7, 125.0, 1, scat, boost, 24, 8, 8, false, ridge);
        cfg.ttis_per_point = 200;
        cfg.master_seed = seed;
        let label = format!(
            "{:>4}k N=8 2x2 scat={scat:>3} boost={:.1} ridge={ridge:.0e} seed={seed:>2} ttis=200",
            (scs / 1e3) as u64,
            boost.unwrap_or(0.0),
        );
        report(&label, cfg);
    }
}
