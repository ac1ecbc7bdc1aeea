//! Discrete-event simulation of the orthogonal-state (Goldenberg–Vaidman)
//! quantum key distribution protocol.
//!
//! A single photon is prepared in one of two orthogonal superpositions of
//! spatially separated wave packets `|a>` and `|b>`. Packet `b` leaves Alice
//! a storage delay `tau` after packet `a`, so the two never share the
//! channel; Bob delays `a` by the same amount and recombines them on a beam
//! splitter. Security rests on two public checks: the detection time must
//! equal `t_s + tau + T`, and a disclosed sample of the key must show a low
//! bit error rate.
//!
//! Modules, bottom-up:
//!
//! * [`optics`]: two-mode single-photon state algebra.
//! * [`devices`]: heralded source and SPAD detector models.
//! * [`protocol`]: session engine, timing test and key sifting.
//! * [`adversary`]: eavesdropping strategies and Eve's information.
//! * [`analysis`]: fringe scans, sine fits, and the eavesdropping verdict.
//! * [`export`]: CSV formats for transcripts and fringe scans.

pub mod adversary;
pub mod analysis;
pub mod devices;
mod error;
pub mod export;
pub mod optics;
pub mod protocol;
pub mod rng;

pub use adversary::{apply_attack, eve_information, AttackStrategy, EveRecord};
pub use analysis::{
    detect_eavesdropping, fit_fringe, fringe_scan, qber_from_visibility, visibility_from_extremes,
    Decision, FringeFit, FringePoint, FringeScan, Verdict,
};
pub use devices::{DetectorParams, SourceParams, TimeStamp};
pub use error::{Error, Result};
pub use optics::{Bit, Detector, Mode, PathState, PhaseAngle};
pub use protocol::{
    run_session, sift_and_qber, timing_test, ReceiveRecord, SendRecord, SessionConfig, SiftResult,
    SourceSelection, Transcript,
};
