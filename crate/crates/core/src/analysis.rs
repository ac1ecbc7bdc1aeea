//! Fringe scans, known-period sine fits, QBER statistics and the
//! eavesdropping verdict.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::optics::{
    apply_phase, check_visibility, detection_probabilities, make_state, wrap_phase, Bit, PhaseAngle,
};
use crate::protocol::{combined_jitter, SessionConfig, SiftResult};

/// Degenerate-downconversion wavelength of the source.
pub const WAVELENGTH_NM: f64 = 812.0;

/// Detector rates at one path-length difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringePoint {
    pub delta_l_nm: f64,
    pub counts_d0: f64,
    pub counts_d1: f64,
}

/// Fit of `N(dl) = A (1 + V cos(2 pi dl / lambda + phi0))` for one detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeFit {
    pub visibility: f64,
    /// Radians in `[0, 2 pi)`.
    pub phase_offset: f64,
    pub mean_rate: f64,
    pub residual_rms: f64,
}

/// Phase of the D1 fringe relative to D0, in `[0, 2 pi)`.
pub fn phase_difference(d0: &FringeFit, d1: &FringeFit) -> f64 {
    wrap_phase(d1.phase_offset - d0.phase_offset)
}

/// Scan of Alice's delay line with one source active.
///
/// Each detector keeps its own fringe contrast; counts at each step are
/// binomial draws over `shots_per_step` heralded photons (one second of
/// dwell), so the rates are counts per second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeScan {
    pub source_bit: Bit,
    pub start_nm: f64,
    pub stop_nm: f64,
    pub n_steps: usize,
    pub shots_per_step: u64,
    pub wavelength_nm: f64,
    pub visibility_d0: f64,
    pub visibility_d1: f64,
}

impl FringeScan {
    pub fn validate(&self) -> Result<()> {
        if self.n_steps < 2 {
            return Err(Error::param(
                "scan_steps",
                format!("need at least 2, got {}", self.n_steps),
            ));
        }
        if self.shots_per_step == 0 {
            return Err(Error::param("shots_per_step", "must be at least 1"));
        }
        if !(self.start_nm.is_finite() && self.stop_nm.is_finite()) || self.start_nm == self.stop_nm
        {
            return Err(Error::param(
                "scan_range",
                format!("empty range [{}, {}] nm", self.start_nm, self.stop_nm),
            ));
        }
        if !(self.wavelength_nm.is_finite() && self.wavelength_nm > 0.0) {
            return Err(Error::param("wavelength", "must be positive"));
        }
        check_visibility(self.visibility_d0)?;
        check_visibility(self.visibility_d1)
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.stop_nm - self.start_nm) / (self.n_steps - 1) as f64;
        (0..self.n_steps).map(move |i| self.start_nm + step * i as f64)
    }
}

pub fn fringe_scan<R: Rng + ?Sized>(scan: &FringeScan, rng: &mut R) -> Result<Vec<FringePoint>> {
    scan.validate()?;
    let base = make_state(scan.source_bit);
    scan.positions()
        .map(|delta_l_nm| {
            let phi = PhaseAngle::from_path_difference(delta_l_nm, scan.wavelength_nm);
            let state = apply_phase(&base, phi);
            let (p0, _) = detection_probabilities(&state, scan.visibility_d0)?;
            let (_, p1) = detection_probabilities(&state, scan.visibility_d1)?;
            Ok(FringePoint {
                delta_l_nm,
                counts_d0: binomial(scan.shots_per_step, p0, rng)?,
                counts_d1: binomial(scan.shots_per_step, p1, rng)?,
            })
        })
        .collect()
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> Result<f64> {
    let dist = Binomial::new(n, p).map_err(|e| Error::param("probability", e.to_string()))?;
    Ok(dist.sample(rng) as f64)
}

/// Least-squares sine fit of both detector series at a known wavelength.
///
/// With the period fixed the model is linear in `(1, cos, sin)`, so the fit
/// is a single linear solve.
pub fn fit_fringe(points: &[FringePoint], wavelength_nm: f64) -> Result<(FringeFit, FringeFit)> {
    if points.len() < 4 {
        return Err(Error::DegenerateFit(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }
    if !(wavelength_nm.is_finite() && wavelength_nm > 0.0) {
        return Err(Error::param("wavelength", "must be positive"));
    }
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.delta_l_nm), hi.max(p.delta_l_nm))
        });
    if hi - lo < wavelength_nm * (1.0 - 1e-9) {
        return Err(Error::DegenerateFit(format!(
            "scan spans {:.1} nm, less than one period ({wavelength_nm} nm)",
            hi - lo
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.delta_l_nm).collect();
    let d0: Vec<f64> = points.iter().map(|p| p.counts_d0).collect();
    let d1: Vec<f64> = points.iter().map(|p| p.counts_d1).collect();
    Ok((
        fit_series(&xs, &d0, wavelength_nm)?,
        fit_series(&xs, &d1, wavelength_nm)?,
    ))
}

fn fit_series(xs: &[f64], ys: &[f64], wavelength_nm: f64) -> Result<FringeFit> {
    let k = TAU / wavelength_nm;
    let design = DMatrix::from_fn(xs.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => (k * xs[i]).cos(),
        _ => (k * xs[i]).sin(),
    });
    let y = DVector::from_column_slice(ys);
    let svd = design.clone().svd(true, true);
    let (smax, smin) = svd
        .singular_values
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| {
            (hi.max(s), lo.min(s))
        });
    if smin.is_nan() || smin <= smax * 1e-10 {
        return Err(Error::DegenerateFit(
            "design matrix is rank-deficient".into(),
        ));
    }
    let coef = svd
        .solve(&y, 1e-12)
        .map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let (offset, c, s) = (coef[0], coef[1], coef[2]);
    if offset.is_nan() || offset <= 0.0 {
        return Err(Error::DegenerateFit(format!(
            "non-positive mean rate {offset}"
        )));
    }
    let residual = &y - &design * &coef;
    Ok(FringeFit {
        visibility: (c.hypot(s) / offset).clamp(0.0, 1.0),
        phase_offset: wrap_phase((-s).atan2(c)),
        mean_rate: offset,
        residual_rms: (residual.norm_squared() / ys.len() as f64).sqrt(),
    })
}

/// `(n_max - n_min) / (n_max + n_min)`.
pub fn visibility_from_extremes(n_max: f64, n_min: f64) -> Result<f64> {
    if !(n_min >= 0.0 && n_max >= n_min && n_max.is_finite()) {
        return Err(Error::param(
            "extremes",
            format!("need n_max >= n_min >= 0, got ({n_max}, {n_min})"),
        ));
    }
    if n_max == 0.0 {
        return Err(Error::Undefined("visibility of an all-zero fringe"));
    }
    Ok((n_max - n_min) / (n_max + n_min))
}

/// Expected QBER `(1 - V)/2` at the balanced operating point.
pub fn qber_from_visibility(visibility: f64) -> f64 {
    (1.0 - visibility) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Clean,
    TimingAlarm,
    QberAlarm,
    BothAlarms,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub anomaly_fraction: f64,
    pub qber: Option<f64>,
    pub qber_sigma: Option<f64>,
    pub decision: Decision,
}

/// Probability that an honest detection falls outside a window of
/// half-width `window` when `t_r - t_s` is Gaussian with std `sigma`.
pub fn false_anomaly_rate(window: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    erfc(window / (sigma * std::f64::consts::SQRT_2))
}

/// Three times the analytic false-anomaly rate, floored at 1e-3 so the
/// threshold stays inside (0, 1) for jitter-free configurations.
pub fn default_anomaly_threshold(config: &SessionConfig) -> f64 {
    let sigma = combined_jitter(&config.source, &config.detector);
    (3.0 * false_anomaly_rate(config.accept_window, sigma)).clamp(1e-3, 0.5)
}

pub const DEFAULT_QBER_THRESHOLD: f64 = 0.11;

/// Timing alarm when the anomaly fraction exceeds its threshold; QBER alarm
/// when the QBER exceeds its threshold by more than two standard errors.
pub fn detect_eavesdropping(
    sift: &SiftResult,
    anomaly_threshold: f64,
    qber_threshold: f64,
) -> Result<Verdict> {
    for (name, t) in [
        ("anomaly_threshold", anomaly_threshold),
        ("qber_threshold", qber_threshold),
    ] {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::param(name, format!("must lie in (0, 1), got {t}")));
        }
    }
    let anomaly_fraction = sift.anomaly_fraction().ok_or(Error::Undefined("verdict"))?;
    let timing = anomaly_fraction > anomaly_threshold;
    let bits = sift
        .qber
        .is_some_and(|q| q.value - 2.0 * q.sigma > qber_threshold);
    let decision = match (timing, bits) {
        (false, false) => Decision::Clean,
        (true, false) => Decision::TimingAlarm,
        (false, true) => Decision::QberAlarm,
        (true, true) => Decision::BothAlarms,
    };
    Ok(Verdict {
        anomaly_fraction,
        qber: sift.qber.map(|q| q.value),
        qber_sigma: sift.qber.map(|q| q.sigma),
        decision,
    })
}

/// Wrapped distance of `phase` from `pi`.
pub fn distance_from_pi(phase: f64) -> f64 {
    let d = wrap_phase(phase - PI);
    d.min(TAU - d)
}
