//! Time–frequency (or delay–Doppler) resource grids with pilot bookkeeping.
//!
//! A [`ResourceGrid`] holds one TTI worth of resource elements for every
//! spatial stream. Each RE is either a data symbol, a pilot with a known
//! value, or a deliberate null. Pilots are stream-orthogonal: wherever one
//! stream transmits a pilot, all other streams are silent, so receivers can
//! treat every non-data RE as a training position with a fully known
//! transmit vector.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use crate::math::rng::Rng;

use super::{Constellation, SignalError};

/// One resource element of one stream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReEntry {
    /// Payload symbol.
    Data(Complex64),
    /// Known training symbol.
    Pilot(Complex64),
    /// Known silence (guard or another stream's pilot slot).
    Null,
}

impl ReEntry {
    /// Transmitted value of this entry (`Null` transmits zero).
    pub fn value(&self) -> Complex64 {
        match self {
            ReEntry::Data(v) | ReEntry::Pilot(v) => *v,
            ReEntry::Null => Complex64::new(0.0, 0.0),
        }
    }
}

/// Where pilots go within a TTI.
#[derive(Clone, Debug, PartialEq)]
pub enum PilotPattern {
    /// No pilots: every RE carries data (genie-only experiments).
    None,
    /// Sparse cellular-style lattice: pilot symbols 2 and 11, four pilot
    /// subcarriers per 12-subcarrier block per stream. Streams alternate
    /// subcarrier offsets; with three or four streams the two pilot symbols
    /// are split between stream pairs instead of shared.
    Fig2Like,
    /// The first `k` OFDM symbols are pilots on every subcarrier, with
    /// subcarriers round-robined across streams. Dense training for
    /// fit-quality studies rather than realistic overhead.
    LeadingSymbols(usize),
    /// Delay–Doppler impulse pilot per stream: a single spike at a
    /// stream-specific delay slot, mid Doppler, surrounded by a known-zero
    /// guard box so the channel's delay–Doppler spreading lands on REs whose
    /// transmit value is known. The spike concentrates the guard region's
    /// energy budget (amplitude √(guard REs per stream)); the Doppler guard
    /// clamps at the grid edges, so a large `guard_doppler` reserves the
    /// stream's whole Doppler column — the right choice under fractional
    /// Doppler, whose spreading has no compact support.
    ///
    /// `scattered` additionally sprinkles that many unit-power single-RE
    /// pilots per stream across the data region (evenly, outside every guard
    /// box). Kernel-reading estimators gain nothing from them, but receivers
    /// that regress on known REs get training rows whose neighborhoods look
    /// like data, not like the silent guard box.
    ///
    /// `boost` overrides the spike amplitude. `None` concentrates the guard
    /// box's whole energy budget in the spike; an explicit amplitude bounds
    /// the pilot's peak power at the cost of a noisier kernel readout.
    DdImpulse {
        guard_doppler: usize,
        guard_delay: usize,
        scattered: usize,
        boost: Option<f64>,
    },
}

/// Pilot placement resolved against a concrete grid geometry.
#[derive(Clone, Debug)]
pub struct PilotLayout {
    /// Per stream: positions `(symbol, subcarrier)` that carry a pilot,
    /// row-major order.
    pub per_stream: Vec<Vec<(usize, usize)>>,
    /// All REs reserved for training (pilots plus guard nulls), row-major,
    /// deduplicated. Data fills the complement.
    pub known: Vec<(usize, usize)>,
}

/// Computes pilot placement for a pattern on an
/// `n_symbols × n_subcarriers × n_streams` grid.
pub fn pilot_layout(
    pattern: &PilotPattern,
    n_symbols: usize,
    n_subcarriers: usize,
    n_streams: usize,
) -> Result<PilotLayout, SignalError> {
    if n_streams == 0 || n_symbols == 0 || n_subcarriers == 0 {
        return Err(SignalError::PatternUnsupported {
            reason: "grid dimensions must be nonzero",
        });
    }
    let mut per_stream: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_streams];
    let mut known: Vec<(usize, usize)> = Vec::new();

    match pattern {
        PilotPattern::None => {}
        PilotPattern::Fig2Like => {
            if n_symbols < 12 {
                return Err(SignalError::PatternUnsupported {
                    reason: "fig2-like needs at least 12 symbols",
                });
            }
            if n_subcarriers < 12 || n_subcarriers % 12 != 0 {
                return Err(SignalError::PatternUnsupported {
                    reason: "fig2-like needs a multiple of 12 subcarriers",
                });
            }
            if n_streams > 4 {
                return Err(SignalError::PatternUnsupported {
                    reason: "fig2-like supports at most 4 streams",
                });
            }
            const BASE_SC: [usize; 4] = [1, 5, 8, 11];
            const PILOT_SYMS: [usize; 2] = [2, 11];
            for s in 0..n_streams {
                // Odd streams shift the subcarrier comb by one; with more
                // than two streams, stream pairs {0,1} and {2,3} take one
                // pilot symbol each instead of sharing both.
                let offset = s % 2;
                let symbols: &[usize] = if n_streams <= 2 {
                    &PILOT_SYMS
                } else if s < 2 {
                    &PILOT_SYMS[..1]
                } else {
                    &PILOT_SYMS[1..]
                };
                for &sym in symbols {
                    for block in 0..n_subcarriers / 12 {
                        for &b in &BASE_SC {
                            let sc = block * 12 + (b + offset) % 12;
                            per_stream[s].push((sym, sc));
                        }
                    }
                }
                per_stream[s].sort_unstable();
            }
        }
        PilotPattern::LeadingSymbols(k) => {
            if *k > n_symbols {
                return Err(SignalError::PatternUnsupported {
                    reason: "leading-symbol count exceeds grid length",
                });
            }
            if n_subcarriers < n_streams {
                return Err(SignalError::PatternUnsupported {
                    reason: "fewer subcarriers than streams",
                });
            }
            for s in 0..n_streams {
                for sym in 0..*k {
                    for sc in (s..n_subcarriers).step_by(n_streams) {
                        per_stream[s].push((sym, sc));
                    }
                }
                per_stream[s].sort_unstable();
            }
        }
        PilotPattern::DdImpulse {
            guard_doppler,
            guard_delay,
            scattered,
            boost,
        } => {
            if let Some(b) = boost {
                if !(*b > 0.0) {
                    return Err(SignalError::PatternUnsupported {
                        reason: "impulse boost must be a positive amplitude",
                    });
                }
            }
            let box_cols = 2 * guard_delay + 1;
            let stride = n_subcarriers / n_streams;
            if box_cols > stride {
                return Err(SignalError::PatternUnsupported {
                    reason: "impulse guard box does not fit the per-stream delay slot",
                });
            }
            let k_c = n_symbols / 2;
            let mut in_box = vec![false; n_symbols * n_subcarriers];
            for s in 0..n_streams {
                let l_c = stride / 2 + s * stride;
                per_stream[s].push((k_c, l_c));
                let row_lo = k_c.saturating_sub(*guard_doppler);
                let row_hi = (k_c + guard_doppler).min(n_symbols - 1);
                let col_lo = l_c.saturating_sub(*guard_delay);
                let col_hi = (l_c + guard_delay).min(n_subcarriers - 1);
                for sym in row_lo..=row_hi {
                    for sc in col_lo..=col_hi {
                        known.push((sym, sc));
                        in_box[sym * n_subcarriers + sc] = true;
                    }
                }
            }
            if *scattered > 0 {
                let eligible: Vec<(usize, usize)> = (0..n_symbols)
                    .flat_map(|sym| (0..n_subcarriers).map(move |sc| (sym, sc)))
                    .filter(|&(sym, sc)| !in_box[sym * n_subcarriers + sc])
                    .collect();
                let total = scattered * n_streams;
                if total > eligible.len() {
                    return Err(SignalError::PatternUnsupported {
                        reason: "scattered pilots outnumber the REs outside the guard boxes",
                    });
                }
                // Uniform downsample of the eligible set (row-major), streams
                // interleaved so each gets an even spread over the grid.
                for j in 0..total {
                    let idx = j * eligible.len() / total + eligible.len() / (2 * total);
                    per_stream[j % n_streams].push(eligible[idx]);
                }
            }
        }
    }

    for positions in &per_stream {
        known.extend_from_slice(positions);
    }
    known.sort_unstable();
    known.dedup();
    Ok(PilotLayout { per_stream, known })
}

/// One TTI of resource elements for all streams.
#[derive(Clone, Debug)]
pub struct ResourceGrid {
    pub n_symbols: usize,
    pub n_subcarriers: usize,
    pub n_streams: usize,
    entries: Vec<ReEntry>,
    layout: PilotLayout,
}

impl ResourceGrid {
    fn idx(&self, sym: usize, sc: usize, stream: usize) -> usize {
        debug_assert!(sym < self.n_symbols && sc < self.n_subcarriers && stream < self.n_streams);
        (sym * self.n_subcarriers + sc) * self.n_streams + stream
    }

    /// Entry for one stream at one RE.
    pub fn entry(&self, sym: usize, sc: usize, stream: usize) -> &ReEntry {
        &self.entries[self.idx(sym, sc, stream)]
    }

    /// Transmitted value of one stream at one RE (nulls read as zero).
    pub fn tx_value(&self, sym: usize, sc: usize, stream: usize) -> Complex64 {
        self.entries[self.idx(sym, sc, stream)].value()
    }

    /// Full grid of one stream's transmitted values, ready for a modulator.
    pub fn stream_values(&self, stream: usize) -> ValueGrid {
        let mut g = ValueGrid::zeros(self.n_symbols, self.n_subcarriers);
        for sym in 0..self.n_symbols {
            for sc in 0..self.n_subcarriers {
                g.set(sym, sc, self.tx_value(sym, sc, stream));
            }
        }
        g
    }

    /// REs carrying payload, row-major. Identical for every stream.
    pub fn data_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_symbols * self.n_subcarriers - self.layout.known.len());
        let mut known = self.layout.known.iter().peekable();
        for sym in 0..self.n_symbols {
            for sc in 0..self.n_subcarriers {
                if known.peek() == Some(&&(sym, sc)) {
                    known.next();
                } else {
                    out.push((sym, sc));
                }
            }
        }
        out
    }

    /// REs whose transmit vector is fully known (pilots and nulls), row-major.
    pub fn known_positions(&self) -> &[(usize, usize)] {
        &self.layout.known
    }

    /// One stream's pilot lattice with values, row-major.
    pub fn pilot_entries(&self, stream: usize) -> Vec<(usize, usize, Complex64)> {
        self.layout.per_stream[stream]
            .iter()
            .map(|&(sym, sc)| (sym, sc, self.tx_value(sym, sc, stream)))
            .collect()
    }

    /// Number of data REs per stream.
    pub fn data_capacity(&self) -> usize {
        self.n_symbols * self.n_subcarriers - self.layout.known.len()
    }
}

/// Assembles a grid: pilots per `pattern` (values drawn as seeded QPSK for
/// lattice patterns, unit spikes for delay–Doppler impulses), remaining REs
/// filled with `data[stream]` in row-major order.
///
/// `data[stream].len()` must equal the grid's data capacity, and `data` must
/// provide exactly one vector per stream.
pub fn build_grid(
    n_symbols: usize,
    n_subcarriers: usize,
    n_streams: usize,
    pattern: &PilotPattern,
    pilot_seed: u64,
    data: &[Vec<Complex64>],
) -> Result<ResourceGrid, SignalError> {
    let layout = pilot_layout(pattern, n_symbols, n_subcarriers, n_streams)?;
    if data.len() != n_streams {
        return Err(SignalError::GridFillError {
            expected: n_streams,
            got: data.len(),
        });
    }
    let capacity = n_symbols * n_subcarriers - layout.known.len();
    for stream_data in data {
        if stream_data.len() != capacity {
            return Err(SignalError::GridFillError {
                expected: capacity,
                got: stream_data.len(),
            });
        }
    }

    let mut entries = vec![ReEntry::Data(Complex64::new(0.0, 0.0)); n_symbols * n_subcarriers * n_streams];
    let at = |sym: usize, sc: usize, stream: usize| (sym * n_subcarriers + sc) * n_streams + stream;

    // Reserve every known RE as silence first; pilots then overwrite their
    // own slots. Pilot values are QPSK symbols from a dedicated stream of
    // randomness so the same seed always yields the same pilot book.
    for &(sym, sc) in &layout.known {
        for stream in 0..n_streams {
            entries[at(sym, sc, stream)] = ReEntry::Null;
        }
    }
    let mut rng = Rng::new(pilot_seed);
    let impulse = matches!(pattern, PilotPattern::DdImpulse { .. });
    // By default an impulse pilot carries the energy its guard box gave up,
    // keeping the grid's training energy budget comparable to lattice
    // patterns; an explicit boost overrides the amplitude. Scattered
    // single-RE pilots are unit power, like the data they sit among.
    let (scattered_total, boost_override) = match pattern {
        PilotPattern::DdImpulse { scattered, boost, .. } => (scattered * n_streams, *boost),
        _ => (0, None),
    };
    let box_cells = layout.known.len() - scattered_total;
    let boost =
        boost_override.unwrap_or_else(|| ((box_cells / n_streams.max(1)) as f64).sqrt());
    for (stream, positions) in layout.per_stream.iter().enumerate() {
        for (idx, &(sym, sc)) in positions.iter().enumerate() {
            let value = if impulse && idx == 0 {
                Complex64::new(boost, 0.0)
            } else {
                Constellation::Qpsk.point(rng.below(4))
            };
            entries[at(sym, sc, stream)] = ReEntry::Pilot(value);
        }
    }

    let mut cursors = vec![0usize; n_streams];
    let mut known_iter = layout.known.iter().peekable();
    for sym in 0..n_symbols {
        for sc in 0..n_subcarriers {
            if known_iter.peek() == Some(&&(sym, sc)) {
                known_iter.next();
                continue;
            }
            for stream in 0..n_streams {
                entries[at(sym, sc, stream)] = ReEntry::Data(data[stream][cursors[stream]]);
                cursors[stream] += 1;
            }
        }
    }

    Ok(ResourceGrid {
        n_symbols,
        n_subcarriers,
        n_streams,
        entries,
        layout,
    })
}

/// Dense complex grid: `n_symbols` rows by `n_subcarriers` columns,
/// row-major. The row-major flattening is also the serialization order used
/// when a grid is fed through sequence models.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueGrid {
    pub n_symbols: usize,
    pub n_subcarriers: usize,
    values: Vec<Complex64>,
}

impl ValueGrid {
    pub fn zeros(n_symbols: usize, n_subcarriers: usize) -> Self {
        ValueGrid {
            n_symbols,
            n_subcarriers,
            values: vec![Complex64::new(0.0, 0.0); n_symbols * n_subcarriers],
        }
    }

    pub fn from_flat(n_symbols: usize, n_subcarriers: usize, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), n_symbols * n_subcarriers);
        ValueGrid {
            n_symbols,
            n_subcarriers,
            values,
        }
    }

    pub fn at(&self, sym: usize, sc: usize) -> Complex64 {
        self.values[sym * self.n_subcarriers + sc]
    }

    pub fn set(&mut self, sym: usize, sc: usize, v: Complex64) {
        self.values[sym * self.n_subcarriers + sc] = v;
    }

    /// One OFDM symbol's subcarrier values.
    pub fn row(&self, sym: usize) -> &[Complex64] {
        &self.values[sym * self.n_subcarriers..(sym + 1) * self.n_subcarriers]
    }

    /// Row-major flattening (the serialization order).
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Sum of |v|² over the grid.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}
