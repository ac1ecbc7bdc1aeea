//! Eavesdropping strategies acting on photons in the channel.
//!
//! The two non-trivial strategies sit at the extremes of the
//! information/disturbance trade-off:
//!
//! * [`AttackStrategy::WhichPathInterceptResend`] measures which channel the
//!   photon occupies while only packet `a` is in flight. The outcome carries
//!   no bit information and destroys the interference, so Bob sees a 50%
//!   error rate with untouched timing.
//! * [`AttackStrategy::StoreMeasureForward`] holds packet `a` until `b`
//!   arrives, decodes the bit exactly and forwards a fresh copy. Bits are
//!   perfect but every arrival is late by at least `tau`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::devices::TimeStamp;
use crate::error::{Error, Result};
use crate::optics::{beam_splitter, collapse_which_path, make_state, Bit, Mode, PathState};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum AttackStrategy {
    #[default]
    None,
    WhichPathInterceptResend,
    StoreMeasureForward {
        /// Delay beyond `tau`, picoseconds. Must be positive.
        extra_delay: f64,
    },
}

impl AttackStrategy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AttackStrategy::StoreMeasureForward { extra_delay }
                if !(extra_delay > 0.0 && extra_delay.is_finite()) =>
            {
                Err(Error::param(
                    "extra_delay",
                    format!("must be positive, got {extra_delay}"),
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AttackStrategy::None => "none",
            AttackStrategy::WhichPathInterceptResend => "which-path",
            AttackStrategy::StoreMeasureForward { .. } => "store-forward",
        }
    }

    /// Parses a CLI strategy name.
    pub fn from_name(name: &str, extra_delay: f64) -> Result<Self> {
        let strategy = match name {
            "none" => AttackStrategy::None,
            "which-path" => AttackStrategy::WhichPathInterceptResend,
            "store-forward" => AttackStrategy::StoreMeasureForward { extra_delay },
            other => {
                return Err(Error::param(
                    "attack",
                    format!(
                        "unknown strategy `{other}` (expected none, which-path, store-forward)"
                    ),
                ))
            }
        };
        strategy.validate()?;
        Ok(strategy)
    }
}

/// Eve's private log for one photon.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EveRecord {
    pub guessed_bit: Option<Bit>,
    pub measurement_outcome: Option<Mode>,
    /// Added delay on Bob's arrivals, picoseconds.
    pub timing_perturbation: f64,
}

/// Photon as launched by Alice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InFlight {
    pub state: PathState,
    pub launch_a: TimeStamp,
    pub launch_b: TimeStamp,
}

/// Photon as it reaches Bob's site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub state: PathState,
    pub arrival_a: TimeStamp,
    pub arrival_b: TimeStamp,
}

/// Channel transit of one photon through Eve's hands. `travel_time` and
/// `tau` are in picoseconds.
pub fn apply_attack<R: Rng + ?Sized>(
    strategy: &AttackStrategy,
    photon: &InFlight,
    travel_time: f64,
    tau: f64,
    rng: &mut R,
) -> Result<(Arrival, EveRecord)> {
    strategy.validate()?;
    let honest = Arrival {
        state: photon.state,
        arrival_a: photon.launch_a.offset(travel_time),
        arrival_b: photon.launch_b.offset(travel_time),
    };
    let out = match *strategy {
        AttackStrategy::None => (honest, EveRecord::default()),
        AttackStrategy::WhichPathInterceptResend => {
            // Only packet a is reachable here; finding it (or not) localizes
            // the photon and Eve resends it in the same slot.
            let (mode, collapsed) = collapse_which_path(&photon.state, rng);
            let guess = Bit::from_bool(rng.random::<bool>());
            (
                Arrival {
                    state: collapsed,
                    ..honest
                },
                EveRecord {
                    guessed_bit: Some(guess),
                    measurement_outcome: Some(mode),
                    timing_perturbation: 0.0,
                },
            )
        }
        AttackStrategy::StoreMeasureForward { extra_delay } => {
            let learned = decode(&photon.state, rng);
            let delay = tau + extra_delay;
            (
                Arrival {
                    state: make_state(learned),
                    arrival_a: honest.arrival_a.offset(delay),
                    arrival_b: honest.arrival_b.offset(delay),
                },
                EveRecord {
                    guessed_bit: Some(learned),
                    measurement_outcome: None,
                    timing_perturbation: delay,
                },
            )
        }
    };
    Ok(out)
}

/// Eve's own ideal interferometer: beam splitter then Born sampling.
fn decode<R: Rng + ?Sized>(state: &PathState, rng: &mut R) -> Bit {
    let out = beam_splitter(state);
    let p0 = out.occupation(Mode::A) / out.norm_sqr();
    if rng.random::<f64>() < p0 {
        Bit::Zero
    } else {
        Bit::One
    }
}

/// Empirical mutual information, in bits per photon, between Eve's guesses
/// and Alice's bits. Photons without a guess are ignored; if Eve never
/// guesses the result is 0.
pub fn eve_information(records: &[EveRecord], alice_bits: &[Bit]) -> Result<f64> {
    if records.len() != alice_bits.len() {
        return Err(Error::LengthMismatch {
            left: records.len(),
            right: alice_bits.len(),
        });
    }
    if records.is_empty() {
        return Err(Error::Undefined("eve information"));
    }
    let mut joint = [[0u64; 2]; 2];
    for (rec, bit) in records.iter().zip(alice_bits) {
        if let Some(guess) = rec.guessed_bit {
            joint[guess.value() as usize][bit.value() as usize] += 1;
        }
    }
    Ok(mutual_information(&joint))
}

fn mutual_information(joint: &[[u64; 2]; 2]) -> f64 {
    let total: u64 = joint.iter().flatten().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let row = [joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]];
    let col = [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]];
    let mut info = 0.0;
    for g in 0..2 {
        for b in 0..2 {
            let c = joint[g][b];
            if c == 0 {
                continue;
            }
            let p = c as f64 / n;
            let indep = (row[g] as f64 / n) * (col[b] as f64 / n);
            info += p * (p / indep).log2();
        }
    }
    info.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::detection_probabilities;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn photon(bit: Bit) -> InFlight {
        InFlight {
            state: make_state(bit),
            launch_a: TimeStamp::from_ps(10_000.0),
            launch_b: TimeStamp::from_ps(12_000.0),
        }
    }

    #[test]
    fn none_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (arr, rec) = apply_attack(
            &AttackStrategy::None,
            &photon(Bit::One),
            1000.0,
            2000.0,
            &mut rng,
        )
        .unwrap();
        assert_eq!(arr.state, make_state(Bit::One));
        assert_eq!(arr.arrival_a.ps(), 11_000.0);
        assert_eq!(arr.arrival_b.ps(), 13_000.0);
        assert_eq!(rec, EveRecord::default());
    }

    #[test]
    fn which_path_keeps_timing_and_kills_interference() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for bit in [Bit::Zero, Bit::One] {
            for _ in 0..200 {
                let (arr, rec) = apply_attack(
                    &AttackStrategy::WhichPathInterceptResend,
                    &photon(bit),
                    1000.0,
                    2000.0,
                    &mut rng,
                )
                .unwrap();
                assert_eq!(arr.arrival_a.ps(), 11_000.0);
                assert_eq!(arr.arrival_b.ps(), 13_000.0);
                assert_eq!(rec.timing_perturbation, 0.0);
                assert!(rec.guessed_bit.is_some() && rec.measurement_outcome.is_some());
                assert_eq!(
                    detection_probabilities(&arr.state, 1.0).unwrap(),
                    (0.5, 0.5)
                );
            }
        }
    }

    #[test]
    fn store_forward_learns_bit_and_delays() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let strategy = AttackStrategy::StoreMeasureForward { extra_delay: 500.0 };
        for bit in [Bit::Zero, Bit::One] {
            let (arr, rec) =
                apply_attack(&strategy, &photon(bit), 1000.0, 2000.0, &mut rng).unwrap();
            assert_eq!(rec.guessed_bit, Some(bit));
            assert_eq!(arr.state, make_state(bit));
            assert_eq!(arr.arrival_a.ps(), 11_000.0 + 2500.0);
            assert_eq!(arr.arrival_b.ps() - arr.arrival_a.ps(), 2000.0);
        }
    }

    #[test]
    fn malformed_strategy_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let bad = AttackStrategy::StoreMeasureForward { extra_delay: 0.0 };
        assert!(apply_attack(&bad, &photon(Bit::Zero), 1000.0, 2000.0, &mut rng).is_err());
        assert!(AttackStrategy::from_name("beam-splitting", 1.0).is_err());
        assert_eq!(
            AttackStrategy::from_name("which-path", 1.0).unwrap(),
            AttackStrategy::WhichPathInterceptResend
        );
    }

    #[test]
    fn information_examples() {
        let bits: Vec<Bit> = (0..1000).map(|i| Bit::from_bool(i % 2 == 0)).collect();
        let none = vec![EveRecord::default(); bits.len()];
        assert_eq!(eve_information(&none, &bits).unwrap(), 0.0);

        let perfect: Vec<EveRecord> = bits
            .iter()
            .map(|&b| EveRecord {
                guessed_bit: Some(b),
                ..Default::default()
            })
            .collect();
        assert!((eve_information(&perfect, &bits).unwrap() - 1.0).abs() < 1e-12);

        let inverted: Vec<EveRecord> = bits
            .iter()
            .map(|&b| EveRecord {
                guessed_bit: Some(b.flip()),
                ..Default::default()
            })
            .collect();
        assert!((eve_information(&inverted, &bits).unwrap() - 1.0).abs() < 1e-12);

        assert!(eve_information(&[], &[]).is_err());
        assert!(eve_information(&none[..3], &bits[..2]).is_err());
    }

    #[test]
    fn which_path_information_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut records = Vec::new();
        let mut bits = Vec::new();
        for i in 0..10_000 {
            let bit = Bit::from_bool(rng.random::<bool>() ^ (i % 3 == 0));
            let (_, rec) = apply_attack(
                &AttackStrategy::WhichPathInterceptResend,
                &photon(bit),
                1000.0,
                2000.0,
                &mut rng,
            )
            .unwrap();
            records.push(rec);
            bits.push(bit);
        }
        assert!(eve_information(&records, &bits).unwrap() < 0.01);
    }
}
