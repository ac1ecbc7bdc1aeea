//! JSON report documents. Field order is the emission order.

use serde::{Deserialize, Serialize};

use gvqkd_core::Decision;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run: usize,
    pub seed: u64,
    pub sends: usize,
    pub receives: usize,
    pub matched: usize,
    pub anomalies: usize,
    pub disclosed: usize,
    pub key_bits: usize,
    pub qber: Option<f64>,
    pub qber_sigma: Option<f64>,
    pub anomaly_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmitSummary {
    pub runs: usize,
    pub source: String,
    pub visibility: f64,
    /// Mean over runs with a defined QBER.
    pub qber: Option<f64>,
    /// Standard deviation of the per-run QBER.
    pub qber_sigma: Option<f64>,
    pub anomaly_fraction: Option<f64>,
    pub mean_disclosed: f64,
    pub per_run: Vec<RunSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub source: String,
    pub wavelength_nm: f64,
    pub visibility_d0: f64,
    pub visibility_d1: f64,
    /// Phase of the D1 fringe relative to D0, in `[0, 2 pi)`.
    pub phase_offset_rad: f64,
    pub phase_d0_rad: f64,
    pub phase_d1_rad: f64,
    pub mean_rate_d0: f64,
    pub mean_rate_d1: f64,
    pub residual_rms_d0: f64,
    pub residual_rms_d1: f64,
    /// `(1 - V)/2` at the mean fitted visibility.
    pub qber_from_visibility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub strategy: String,
    pub sends: usize,
    pub receives: usize,
    pub matched: usize,
    pub anomaly_fraction: f64,
    pub qber: Option<f64>,
    pub qber_sigma: Option<f64>,
    pub decision: Decision,
    pub eve_information_bits: f64,
    pub anomaly_threshold: f64,
    pub qber_threshold: f64,
}
