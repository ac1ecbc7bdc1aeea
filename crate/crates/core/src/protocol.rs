//! Session engine: Alice's random-time encoding, channel transit, Bob's
//! delayed recombination, then the two public security tests.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{apply_attack, Arrival, AttackStrategy, EveRecord, InFlight};
use crate::devices::{
    dark_clicks, detector_click, enforce_strict_order, generate_emissions, herald, DetectorParams,
    HeraldedEmission, SourceParams, TimeStamp,
};
use crate::error::{Error, Result};
use crate::optics::{
    check_visibility, detection_probabilities, make_state, Bit, Detector, PathState,
};
use crate::rng::{self, Stream};

/// Packets interfere at the configured visibility only if their arrival
/// mismatch at Bob's second beam splitter is within this many picoseconds.
pub const COHERENCE_WINDOW_PS: f64 = 10.0;

/// Which of Alice's two sources fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SourceSelection {
    /// Uniform i.i.d. bits.
    #[default]
    Random,
    /// Only `S0`: every bit is 0.
    OnlyS0,
    /// Only `S1`: every bit is 1.
    OnlyS1,
}

/// All protocol and physics parameters of one session. Times in
/// picoseconds, durations in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    /// Storage delay of packet `b` (OD1 at Alice, OD2 at Bob).
    pub tau: f64,
    /// Channel travel time `T`.
    pub travel_time: f64,
    /// Half-width of the timing-test acceptance window.
    pub accept_window: f64,
    pub visibility: f64,
    pub source: SourceParams,
    /// Shared by D0 and D1.
    pub detector: DetectorParams,
    pub duration: f64,
    pub disclosure_fraction: f64,
    pub seed: u64,
    pub selection: SourceSelection,
}

impl Default for SessionConfig {
    fn default() -> Self {
        let source = SourceParams::default();
        let detector = DetectorParams::default();
        Self {
            tau: 2000.0,
            travel_time: 1000.0,
            accept_window: default_accept_window(&source, &detector),
            visibility: 1.0,
            source,
            detector,
            duration: 5.0,
            disclosure_fraction: 0.5,
            seed: 1,
            selection: SourceSelection::Random,
        }
    }
}

/// Standard deviation of `t_r - t_s` for an honest photon.
pub fn combined_jitter(source: &SourceParams, detector: &DetectorParams) -> f64 {
    source.herald_jitter_sigma.hypot(detector.jitter_sigma)
}

/// `3 * sqrt(sigma_h^2 + sigma_s^2)`.
pub fn default_accept_window(source: &SourceParams, detector: &DetectorParams) -> f64 {
    3.0 * combined_jitter(source, detector)
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.detector.validate()?;
        positive("tau", self.tau)?;
        positive("travel_time", self.travel_time)?;
        positive("duration", self.duration)?;
        if !(self.accept_window.is_finite() && self.accept_window >= 0.0) {
            return Err(Error::param(
                "accept_window",
                format!("must be finite and >= 0, got {}", self.accept_window),
            ));
        }
        check_visibility(self.visibility)?;
        if !(self.disclosure_fraction > 0.0 && self.disclosure_fraction < 1.0) {
            return Err(Error::param(
                "disclosure_fraction",
                format!("must lie in (0, 1), got {}", self.disclosure_fraction),
            ));
        }
        let floor = 3.0 * combined_jitter(&self.source, &self.detector);
        if self.tau < floor {
            return Err(Error::param(
                "tau",
                format!(
                    "{} ps is below 3x the combined timing jitter ({floor:.1} ps)",
                    self.tau
                ),
            ));
        }
        Ok(())
    }

    /// Detection time expected for a photon sent at `t_s`.
    pub fn expected_arrival(&self, t_s: TimeStamp) -> f64 {
        t_s.ps() + self.tau + self.travel_time
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive, got {value}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SendRecord {
    pub index: usize,
    pub bit: Bit,
    pub t_s: TimeStamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiveRecord {
    pub t_r: TimeStamp,
    pub detector: Detector,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Transcript {
    pub sends: Vec<SendRecord>,
    /// Sorted by `t_r`.
    pub receives: Vec<ReceiveRecord>,
    /// One entry per send.
    pub eve_log: Vec<EveRecord>,
}

impl Transcript {
    pub fn alice_bits(&self) -> Vec<Bit> {
        self.sends.iter().map(|s| s.bit).collect()
    }
}

/// Alice's side of one photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prepared {
    pub photon: InFlight,
    pub record: SendRecord,
}

/// Encodes `bit` on the photon emitted at `emission.t_true`; packet `b`
/// leaves `tau` picoseconds after packet `a`.
pub fn alice_prepare(bit: Bit, emission: &HeraldedEmission, tau: f64, index: usize) -> Prepared {
    Prepared {
        photon: InFlight {
            state: make_state(bit),
            launch_a: emission.t_true,
            launch_b: emission.t_true.offset(tau),
        },
        record: SendRecord {
            index,
            bit,
            t_s: emission.t_s,
        },
    }
}

/// Bob holds packet `a` for `tau`, recombines it with `b` and records the
/// click, if any.
///
/// Draws one uniform for the detector choice and then calls
/// [`detector_click`], so the randomness consumed per photon is fixed.
pub fn bob_receive<R: Rng + ?Sized>(
    state: &PathState,
    arrival_a: TimeStamp,
    arrival_b: TimeStamp,
    config: &SessionConfig,
    rng: &mut R,
) -> Result<Option<ReceiveRecord>> {
    let delayed_a = arrival_a.ps() + config.tau;
    let mismatch = (delayed_a - arrival_b.ps()).abs();
    let visibility = if mismatch <= COHERENCE_WINDOW_PS {
        config.visibility
    } else {
        0.0
    };
    let (p0, _) = detection_probabilities(state, visibility)?;
    let detector = if rng.random::<f64>() < p0 {
        Detector::D0
    } else {
        Detector::D1
    };
    let at = TimeStamp::from_ps(delayed_a.max(arrival_b.ps()));
    Ok(detector_click(at, &config.detector, rng).map(|t_r| ReceiveRecord { t_r, detector }))
}

/// Runs one full session. The seed in `config` drives every random draw
/// through independent named streams.
pub fn run_session(config: &SessionConfig, attack: &AttackStrategy) -> Result<Transcript> {
    config.validate()?;
    attack.validate()?;

    let seed = config.seed;
    let mut source_rng = rng::stream(seed, Stream::Source);
    let mut herald_rng = rng::stream(seed, Stream::Herald);
    let mut bits_rng = rng::stream(seed, Stream::Bits);
    let mut attack_rng = rng::stream(seed, Stream::Attack);
    let mut detector_rng = rng::stream(seed, Stream::Detectors);
    let mut dark_rng = rng::stream(seed, Stream::Dark);

    let emissions = generate_emissions(&config.source, config.duration, &mut source_rng)?;
    let mut heralded = herald(&emissions, &config.source, &mut herald_rng);
    // Index order follows Alice's recorded sending times.
    heralded.sort_by(|x, y| x.t_s.ps().total_cmp(&y.t_s.ps()));
    let mut stamps: Vec<TimeStamp> = heralded.iter().map(|h| h.t_s).collect();
    enforce_strict_order(&mut stamps);
    for (h, t_s) in heralded.iter_mut().zip(stamps) {
        h.t_s = t_s;
    }

    let mut transcript = Transcript {
        sends: Vec::with_capacity(heralded.len()),
        receives: Vec::with_capacity(heralded.len()),
        eve_log: Vec::with_capacity(heralded.len()),
    };
    for (index, emission) in heralded.iter().enumerate() {
        let coin = Bit::from_bool(bits_rng.random::<bool>());
        let bit = match config.selection {
            SourceSelection::Random => coin,
            SourceSelection::OnlyS0 => Bit::Zero,
            SourceSelection::OnlyS1 => Bit::One,
        };
        let prepared = alice_prepare(bit, emission, config.tau, index);
        let (
            Arrival {
                state,
                arrival_a,
                arrival_b,
            },
            eve,
        ) = apply_attack(
            attack,
            &prepared.photon,
            config.travel_time,
            config.tau,
            &mut attack_rng,
        )?;
        if let Some(rec) = bob_receive(&state, arrival_a, arrival_b, config, &mut detector_rng)? {
            transcript.receives.push(rec);
        }
        transcript.sends.push(prepared.record);
        transcript.eve_log.push(eve);
    }

    for detector in [Detector::D0, Detector::D1] {
        for t_r in dark_clicks(&config.detector, config.duration, &mut dark_rng)? {
            transcript.receives.push(ReceiveRecord { t_r, detector });
        }
    }
    transcript
        .receives
        .sort_by(|x, y| x.t_r.ps().total_cmp(&y.t_r.ps()));
    Ok(transcript)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub send: SendRecord,
    pub receive: ReceiveRecord,
}

impl MatchedPair {
    pub fn is_error(&self) -> bool {
        self.send.bit != self.receive.detector.bit()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimingOutcome {
    /// In receive-time order.
    pub matched: Vec<MatchedPair>,
    pub anomalies: Vec<ReceiveRecord>,
}

/// Public comparison of sending and receiving times.
///
/// Receives are processed in time order; each is paired with the nearest
/// still-unmatched send whose expected arrival `t_s + tau + T` lies within
/// `accept_window`. Receives without such a send are anomalies.
pub fn timing_test(
    sends: &[SendRecord],
    receives: &[ReceiveRecord],
    config: &SessionConfig,
) -> TimingOutcome {
    let offset = config.tau + config.travel_time;
    let w = config.accept_window;
    let mut order: Vec<usize> = (0..receives.len()).collect();
    order.sort_by(|&i, &j| receives[i].t_r.ps().total_cmp(&receives[j].t_r.ps()));

    let mut taken = vec![false; sends.len()];
    let mut outcome = TimingOutcome::default();
    for i in order {
        let rec = receives[i];
        let target = rec.t_r.ps() - offset;
        let start = sends.partition_point(|s| s.t_s.ps() < target - w);
        let mut best: Option<(usize, f64)> = None;
        for (k, send) in sends.iter().enumerate().skip(start) {
            let gap = send.t_s.ps() - target;
            if gap > w {
                break;
            }
            if taken[k] {
                continue;
            }
            let dist = gap.abs();
            if best.is_none_or(|(_, d)| dist < d) {
                best = Some((k, dist));
            }
        }
        match best {
            Some((k, _)) => {
                taken[k] = true;
                outcome.matched.push(MatchedPair {
                    send: sends[k],
                    receive: rec,
                });
            }
            None => outcome.anomalies.push(rec),
        }
    }
    outcome
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QberEstimate {
    pub value: f64,
    /// Binomial standard error.
    pub sigma: f64,
    pub disclosed: usize,
    pub errors: usize,
}

impl QberEstimate {
    pub fn from_counts(errors: usize, disclosed: usize) -> Option<Self> {
        if disclosed == 0 {
            return None;
        }
        let n = disclosed as f64;
        let q = errors as f64 / n;
        Some(Self {
            value: q,
            sigma: (q * (1.0 - q) / n).sqrt(),
            disclosed,
            errors,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiftResult {
    pub matched_pairs: Vec<MatchedPair>,
    /// Parallel to `matched_pairs`.
    pub disclosed: Vec<bool>,
    pub anomalies: usize,
    pub key_bits_alice: Vec<Bit>,
    pub key_bits_bob: Vec<Bit>,
    /// `None` when no pair was disclosed.
    pub qber: Option<QberEstimate>,
}

impl SiftResult {
    pub fn total_receives(&self) -> usize {
        self.matched_pairs.len() + self.anomalies
    }

    pub fn anomaly_fraction(&self) -> Option<f64> {
        let total = self.total_receives();
        (total > 0).then(|| self.anomalies as f64 / total as f64)
    }
}

/// Discloses a uniformly random `disclosure_fraction` of the matched pairs
/// to estimate the QBER; the rest form the key. Disclosed pairs never enter
/// the key.
pub fn sift_and_qber<R: Rng + ?Sized>(
    timing: &TimingOutcome,
    disclosure_fraction: f64,
    rng: &mut R,
) -> Result<SiftResult> {
    if !(disclosure_fraction > 0.0 && disclosure_fraction < 1.0) {
        return Err(Error::param(
            "disclosure_fraction",
            format!("must lie in (0, 1), got {disclosure_fraction}"),
        ));
    }
    let n = timing.matched.len();
    let k = ((n as f64) * disclosure_fraction).round() as usize;
    let mut disclosed = vec![false; n];
    for i in index::sample(rng, n, k.min(n)) {
        disclosed[i] = true;
    }
    let mut errors = 0;
    let mut key_bits_alice = Vec::with_capacity(n - k);
    let mut key_bits_bob = Vec::with_capacity(n - k);
    for (pair, &shown) in timing.matched.iter().zip(&disclosed) {
        if shown {
            errors += usize::from(pair.is_error());
        } else {
            key_bits_alice.push(pair.send.bit);
            key_bits_bob.push(pair.receive.detector.bit());
        }
    }
    Ok(SiftResult {
        matched_pairs: timing.matched.clone(),
        disclosed,
        anomalies: timing.anomalies.len(),
        key_bits_alice,
        key_bits_bob,
        qber: QberEstimate::from_counts(errors, k),
    })
}

/// Timing test plus sifting, with the disclosure sample drawn from the
/// session's sift stream.
pub fn sift_session(transcript: &Transcript, config: &SessionConfig) -> Result<SiftResult> {
    let timing = timing_test(&transcript.sends, &transcript.receives, config);
    let mut rng = rng::stream(config.seed, Stream::Sift);
    sift_and_qber(&timing, config.disclosure_fraction, &mut rng)
}
