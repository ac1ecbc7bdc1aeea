//! Heralded single-photon source and SPAD detector models.
//!
//! Times are real-valued picoseconds rounded to a 1 ps resolution. Keeping
//! every timestamp integral means sums such as `t_s + tau + T` are exact in
//! double precision for sessions shorter than ~2.5 hours.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PS_PER_SECOND: f64 = 1e12;

/// Event time in picoseconds since the start of the session.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct TimeStamp(f64);

impl TimeStamp {
    pub const ZERO: TimeStamp = TimeStamp(0.0);

    /// Rounds to the nearest picosecond; negative times clamp to zero.
    pub fn from_ps(ps: f64) -> Self {
        let r = ps.round();
        if r > 0.0 {
            TimeStamp(r)
        } else {
            TimeStamp(0.0)
        }
    }

    pub fn ps(self) -> f64 {
        self.0
    }

    pub fn offset(self, delta_ps: f64) -> Self {
        Self::from_ps(self.0 + delta_ps)
    }
}

impl fmt::Display for TimeStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ps", self.0)
    }
}

/// CW-pumped photon-pair source with a heralding detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    /// Pairs per second.
    pub pair_rate: f64,
    pub heralding_efficiency: f64,
    /// Picoseconds.
    pub herald_jitter_sigma: f64,
}

impl SourceParams {
    pub fn validate(&self) -> Result<()> {
        non_negative("pair_rate", self.pair_rate)?;
        probability("heralding_efficiency", self.heralding_efficiency)?;
        non_negative("herald_jitter", self.herald_jitter_sigma)
    }
}

impl Default for SourceParams {
    fn default() -> Self {
        Self {
            pair_rate: 1_000.0,
            heralding_efficiency: 1.0,
            herald_jitter_sigma: 300.0,
        }
    }
}

/// SPAD detector. Dead time and afterpulsing are not modeled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    pub efficiency: f64,
    /// Picoseconds.
    pub jitter_sigma: f64,
    /// Counts per second.
    pub dark_rate: f64,
}

impl DetectorParams {
    pub fn validate(&self) -> Result<()> {
        probability("detector_efficiency", self.efficiency)?;
        non_negative("jitter", self.jitter_sigma)?;
        non_negative("dark_rate", self.dark_rate)
    }
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            efficiency: 1.0,
            jitter_sigma: 300.0,
            dark_rate: 0.0,
        }
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be finite and >= 0, got {value}"),
        ))
    }
}

fn probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must lie in [0, 1], got {value}"),
        ))
    }
}

/// One heralded emission: the true emission time and Alice's recorded
/// sending time `t_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeraldedEmission {
    pub t_true: TimeStamp,
    pub t_s: TimeStamp,
}

/// Homogeneous Poisson process on `[0, duration]`, strictly increasing at
/// 1 ps resolution.
pub fn poisson_process<R: Rng + ?Sized>(
    rate_per_s: f64,
    duration_s: f64,
    rng: &mut R,
) -> Result<Vec<TimeStamp>> {
    if !duration_s.is_finite() || duration_s <= 0.0 {
        return Err(Error::NonPositiveDuration(duration_s));
    }
    non_negative("rate", rate_per_s)?;
    if rate_per_s == 0.0 {
        return Ok(Vec::new());
    }
    let horizon = duration_s * PS_PER_SECOND;
    let gap =
        Exp::new(rate_per_s / PS_PER_SECOND).map_err(|e| Error::param("rate", e.to_string()))?;
    let mut events = Vec::with_capacity((rate_per_s * duration_s * 1.1) as usize + 8);
    let mut t = 0.0;
    loop {
        t += gap.sample(rng);
        if t > horizon {
            break;
        }
        events.push(TimeStamp::from_ps(t));
    }
    enforce_strict_order(&mut events);
    Ok(events)
}

/// Bumps ties created by 1 ps rounding so the list is strictly increasing.
pub(crate) fn enforce_strict_order(events: &mut [TimeStamp]) {
    for i in 1..events.len() {
        if events[i].0 <= events[i - 1].0 {
            events[i] = TimeStamp(events[i - 1].0 + 1.0);
        }
    }
}

/// Pair emission times of the CW source.
pub fn generate_emissions<R: Rng + ?Sized>(
    params: &SourceParams,
    duration_s: f64,
    rng: &mut R,
) -> Result<Vec<TimeStamp>> {
    params.validate()?;
    poisson_process(params.pair_rate, duration_s, rng)
}

/// Thins the emissions by the heralding efficiency and stamps each survivor
/// with a jittered sending time. Output keeps emission order.
pub fn herald<R: Rng + ?Sized>(
    emissions: &[TimeStamp],
    params: &SourceParams,
    rng: &mut R,
) -> Vec<HeraldedEmission> {
    let mut out = Vec::with_capacity(emissions.len());
    for &t_true in emissions {
        if rng.random::<f64>() >= params.heralding_efficiency {
            continue;
        }
        let noise: f64 = StandardNormal.sample(rng);
        out.push(HeraldedEmission {
            t_true,
            t_s: t_true.offset(noise * params.herald_jitter_sigma),
        });
    }
    out
}

/// Detector response to a photon arriving at `t_arrival`.
///
/// Always consumes the same amount of randomness per call, so the jitter
/// sequence of a session does not depend on which detector clicked.
pub fn detector_click<R: Rng + ?Sized>(
    t_arrival: TimeStamp,
    params: &DetectorParams,
    rng: &mut R,
) -> Option<TimeStamp> {
    let fires = rng.random::<f64>() < params.efficiency;
    let noise: f64 = StandardNormal.sample(rng);
    fires.then(|| t_arrival.offset(noise * params.jitter_sigma))
}

/// Background clicks of one detector over the session window.
pub fn dark_clicks<R: Rng + ?Sized>(
    params: &DetectorParams,
    duration_s: f64,
    rng: &mut R,
) -> Result<Vec<TimeStamp>> {
    params.validate()?;
    poisson_process(params.dark_rate, duration_s, rng)
}
