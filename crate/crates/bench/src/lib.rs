//! Fixtures shared by the benchmarks.

use gvqkd_core::analysis::{FringeScan, WAVELENGTH_NM};
use gvqkd_core::{Bit, SessionConfig, SourceParams};

/// A clean session of `duration` seconds at 1000 pairs/s.
pub fn session_config(duration: f64) -> SessionConfig {
    SessionConfig {
        visibility: 0.86,
        source: SourceParams {
            pair_rate: 1000.0,
            ..Default::default()
        },
        duration,
        seed: 5,
        ..Default::default()
    }
}

pub fn scan() -> FringeScan {
    FringeScan {
        source_bit: Bit::Zero,
        start_nm: 0.0,
        stop_nm: 2.0 * WAVELENGTH_NM,
        n_steps: 81,
        shots_per_step: 20_000,
        wavelength_nm: WAVELENGTH_NM,
        visibility_d0: 0.89,
        visibility_d1: 0.82,
    }
}
