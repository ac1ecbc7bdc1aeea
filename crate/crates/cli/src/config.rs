//! Flat `key = value` scenario files.
//!
//! Lines are UTF-8; `#` starts a comment; blank lines are ignored. Every key
//! is optional. Units: times in picoseconds, lengths in nanometers,
//! durations in seconds, rates per second.
//!
//! | key | default |
//! |-----|---------|
//! | `tau` | 2000 |
//! | `travel_time` | 1000 |
//! | `accept_window` | 3 * sqrt(herald_jitter² + jitter²) |
//! | `visibility` | mean of `visibility_d0`/`visibility_d1` if given, else 1 |
//! | `visibility_d0`, `visibility_d1` | `visibility` |
//! | `pair_rate` | 1000 |
//! | `heralding_efficiency` | 1 |
//! | `herald_jitter` | 300 |
//! | `jitter` | 300 |
//! | `detector_efficiency` | 1 |
//! | `dark_rate` | 0 |
//! | `duration` | 5 |
//! | `disclosure_fraction` | 0.5 |
//! | `seed` | 1 |
//! | `runs` | 60 |
//! | `source` | `both` (`s0`, `s1`) |
//! | `wavelength` | 812 |
//! | `scan_start`, `scan_stop` | 0, 1624 |
//! | `scan_steps` | 81 |
//! | `shots_per_step` | 20000 |
//! | `attack` | `none` (`which-path`, `store-forward`) |
//! | `extra_delay` | 2000 |
//! | `anomaly_threshold` | 3x the analytic false-anomaly rate |
//! | `qber_threshold` | 0.11 |

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use gvqkd_core::analysis::{default_anomaly_threshold, DEFAULT_QBER_THRESHOLD, WAVELENGTH_NM};
use gvqkd_core::protocol::default_accept_window;
use gvqkd_core::{AttackStrategy, Bit, FringeScan, SessionConfig, SourceSelection};

use crate::error::CliError;

const KEYS: &[&str] = &[
    "tau",
    "travel_time",
    "accept_window",
    "visibility",
    "visibility_d0",
    "visibility_d1",
    "pair_rate",
    "heralding_efficiency",
    "herald_jitter",
    "jitter",
    "detector_efficiency",
    "dark_rate",
    "duration",
    "disclosure_fraction",
    "seed",
    "runs",
    "source",
    "wavelength",
    "scan_start",
    "scan_stop",
    "scan_steps",
    "shots_per_step",
    "attack",
    "extra_delay",
    "anomaly_threshold",
    "qber_threshold",
];

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub session: SessionConfig,
    pub runs: usize,
    pub wavelength_nm: f64,
    pub visibility_d0: f64,
    pub visibility_d1: f64,
    pub scan_start_nm: f64,
    pub scan_stop_nm: f64,
    pub scan_steps: usize,
    pub shots_per_step: u64,
    pub attack: AttackStrategy,
    pub extra_delay: f64,
    pub anomaly_threshold: f64,
    pub qber_threshold: f64,
}

impl RunConfig {
    pub fn fringe_scan(&self, source_bit: Bit) -> FringeScan {
        FringeScan {
            source_bit,
            start_nm: self.scan_start_nm,
            stop_nm: self.scan_stop_nm,
            n_steps: self.scan_steps,
            shots_per_step: self.shots_per_step,
            wavelength_nm: self.wavelength_nm,
            visibility_d0: self.visibility_d0,
            visibility_d1: self.visibility_d1,
        }
    }

    /// Sources exercised by the fringe scan.
    pub fn active_sources(&self) -> Vec<Bit> {
        match self.session.selection {
            SourceSelection::Random => vec![Bit::Zero, Bit::One],
            SourceSelection::OnlyS0 => vec![Bit::Zero],
            SourceSelection::OnlyS1 => vec![Bit::One],
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.session.seed = seed;
        self
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

struct Entries(HashMap<String, String>);

impl Entries {
    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::config(key, format!("cannot parse `{raw}`"))),
        }
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.get(key)?.unwrap_or(default))
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::config(
                line,
                format!("line {}: expected `key = value`", lineno + 1),
            ));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(CliError::config(
                key,
                format!("line {}: unknown key", lineno + 1),
            ));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(CliError::config(
                key,
                format!("line {}: duplicate key", lineno + 1),
            ));
        }
    }
    let e = Entries(map);

    let mut session = SessionConfig::default();
    session.tau = e.or("tau", session.tau)?;
    session.travel_time = e.or("travel_time", session.travel_time)?;
    session.source.pair_rate = e.or("pair_rate", session.source.pair_rate)?;
    session.source.heralding_efficiency =
        e.or("heralding_efficiency", session.source.heralding_efficiency)?;
    session.source.herald_jitter_sigma =
        e.or("herald_jitter", session.source.herald_jitter_sigma)?;
    session.detector.jitter_sigma = e.or("jitter", session.detector.jitter_sigma)?;
    session.detector.efficiency = e.or("detector_efficiency", session.detector.efficiency)?;
    session.detector.dark_rate = e.or("dark_rate", session.detector.dark_rate)?;
    session.duration = e.or("duration", session.duration)?;
    session.disclosure_fraction = e.or("disclosure_fraction", session.disclosure_fraction)?;
    session.seed = e.or("seed", session.seed)?;
    session.accept_window = e.or(
        "accept_window",
        default_accept_window(&session.source, &session.detector),
    )?;
    session.selection = match e.get::<String>("source")?.as_deref() {
        None | Some("both") => SourceSelection::Random,
        Some("s0") => SourceSelection::OnlyS0,
        Some("s1") => SourceSelection::OnlyS1,
        Some(other) => {
            return Err(CliError::config(
                "source",
                format!("expected both, s0 or s1, got `{other}`"),
            ))
        }
    };

    let v_d0: Option<f64> = e.get("visibility_d0")?;
    let v_d1: Option<f64> = e.get("visibility_d1")?;
    session.visibility = match (e.get("visibility")?, v_d0, v_d1) {
        (Some(v), _, _) => v,
        (None, Some(a), Some(b)) => (a + b) / 2.0,
        (None, Some(a), None) | (None, None, Some(a)) => a,
        (None, None, None) => 1.0,
    };
    let visibility_d0 = v_d0.unwrap_or(session.visibility);
    let visibility_d1 = v_d1.unwrap_or(session.visibility);
    session.validate()?;

    let runs: usize = e.or("runs", 60)?;
    if runs == 0 {
        return Err(CliError::config("runs", "must be at least 1"));
    }
    let extra_delay = e.or("extra_delay", 2000.0)?;
    let attack_name: String = e.or("attack", "none".to_string())?;
    let attack = AttackStrategy::from_name(&attack_name, extra_delay)?;

    let anomaly_threshold = e.or("anomaly_threshold", default_anomaly_threshold(&session))?;
    let qber_threshold = e.or("qber_threshold", DEFAULT_QBER_THRESHOLD)?;
    for (key, t) in [
        ("anomaly_threshold", anomaly_threshold),
        ("qber_threshold", qber_threshold),
    ] {
        if !(t > 0.0 && t < 1.0) {
            return Err(CliError::config(
                key,
                format!("must lie in (0, 1), got {t}"),
            ));
        }
    }

    let config = RunConfig {
        runs,
        wavelength_nm: e.or("wavelength", WAVELENGTH_NM)?,
        visibility_d0,
        visibility_d1,
        scan_start_nm: e.or("scan_start", 0.0)?,
        scan_stop_nm: e.or("scan_stop", 2.0 * WAVELENGTH_NM)?,
        scan_steps: e.or("scan_steps", 81)?,
        shots_per_step: e.or("shots_per_step", 20_000)?,
        attack,
        extra_delay,
        anomaly_threshold,
        qber_threshold,
        session,
    };
    config.fringe_scan(Bit::Zero).validate()?;
    Ok(config)
}
