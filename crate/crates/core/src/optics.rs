//! Two-mode single-photon state algebra.
//!
//! A photon is described by the complex amplitudes of the two localized wave
//! packets `|a>` and `|b>`. The beam splitter uses the real Hadamard
//! convention, so the encoding state for bit `i` exits towards detector `D_i`
//! with certainty in an ideal interferometer.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex amplitude of one wave-packet mode.
pub type Amplitude = Complex64;

/// Normalization tolerance for stored states.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn value(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}

impl TryFrom<u8> for Bit {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            0 => Ok(Bit::Zero),
            1 => Ok(Bit::One),
            other => Err(Error::InvalidBit(other)),
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Spatial wave-packet mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    A,
    B,
}

/// Output detector of Bob's interferometer. Ideal transmission maps bit `i`
/// to `D_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Detector {
    D0,
    D1,
}

impl Detector {
    pub fn index(self) -> u8 {
        match self {
            Detector::D0 => 0,
            Detector::D1 => 1,
        }
    }

    /// The bit Bob decodes from a click.
    pub fn bit(self) -> Bit {
        match self {
            Detector::D0 => Bit::Zero,
            Detector::D1 => Bit::One,
        }
    }

    pub fn from_index(index: u8) -> Result<Self> {
        match index {
            0 => Ok(Detector::D0),
            1 => Ok(Detector::D1),
            other => Err(Error::param(
                "detector",
                format!("unknown detector index {other}"),
            )),
        }
    }
}

/// Normalized single-photon state over the modes `|a>` and `|b>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    amp_a: Amplitude,
    amp_b: Amplitude,
}

impl PathState {
    pub fn new(amp_a: Amplitude, amp_b: Amplitude) -> Result<Self> {
        if !(amp_a.re.is_finite()
            && amp_a.im.is_finite()
            && amp_b.re.is_finite()
            && amp_b.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm = amp_a.norm_sqr() + amp_b.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amp_a, amp_b })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amp_a: Amplitude, amp_b: Amplitude) -> Result<Self> {
        let norm = (amp_a.norm_sqr() + amp_b.norm_sqr()).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized(norm * norm));
        }
        Self::new(amp_a / norm, amp_b / norm)
    }

    /// Photon fully localized in one mode.
    pub fn localized(mode: Mode) -> Self {
        let (a, b) = match mode {
            Mode::A => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            Mode::B => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        };
        Self { amp_a: a, amp_b: b }
    }

    pub fn amp_a(&self) -> Amplitude {
        self.amp_a
    }

    pub fn amp_b(&self) -> Amplitude {
        self.amp_b
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp_a.norm_sqr() + self.amp_b.norm_sqr()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PathState) -> Complex64 {
        self.amp_a.conj() * other.amp_a + self.amp_b.conj() * other.amp_b
    }

    /// Probability of finding the photon in `mode`.
    pub fn occupation(&self, mode: Mode) -> f64 {
        match mode {
            Mode::A => self.amp_a.norm_sqr(),
            Mode::B => self.amp_b.norm_sqr(),
        }
    }
}

/// Phase shift between the two arms.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PhaseAngle(f64);

impl PhaseAngle {
    pub fn from_radians(radians: f64) -> Self {
        Self(radians)
    }

    /// `phi = 2 pi * delta_l / lambda`.
    pub fn from_path_difference(delta_l_nm: f64, wavelength_nm: f64) -> Self {
        Self(TAU * delta_l_nm / wavelength_nm)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Representative in `[0, 2 pi)`.
    pub fn canonical(self) -> f64 {
        wrap_phase(self.0)
    }
}

pub(crate) fn wrap_phase(radians: f64) -> f64 {
    let r = radians.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Encoding state for `bit`: `(|a> + |b>)/sqrt 2` for 0, `(|a> - |b>)/sqrt 2` for 1.
pub fn make_state(bit: Bit) -> PathState {
    let sign = match bit {
        Bit::Zero => 1.0,
        Bit::One => -1.0,
    };
    PathState {
        amp_a: Complex64::new(FRAC_1_SQRT_2, 0.0),
        amp_b: Complex64::new(sign * FRAC_1_SQRT_2, 0.0),
    }
}

/// Real Hadamard beam splitter.
pub fn beam_splitter(state: &PathState) -> PathState {
    PathState {
        amp_a: (state.amp_a + state.amp_b) * FRAC_1_SQRT_2,
        amp_b: (state.amp_a - state.amp_b) * FRAC_1_SQRT_2,
    }
}

/// Multiplies the `|b>` amplitude by `e^{i phi}`.
pub fn apply_phase(state: &PathState, phi: PhaseAngle) -> PathState {
    PathState {
        amp_a: state.amp_a,
        amp_b: state.amp_b * Complex64::from_polar(1.0, phi.radians()),
    }
}

/// Click probabilities `(p0, p1)` at Bob's detectors after the second beam
/// splitter, with the interference cross-term scaled by `visibility`.
///
/// At `visibility = 1` this is the Born rule applied to
/// [`beam_splitter`]`(state)`; at `visibility = 0` both detectors are
/// equally likely whatever the input.
pub fn detection_probabilities(state: &PathState, visibility: f64) -> Result<(f64, f64)> {
    check_visibility(visibility)?;
    let population = 0.5 * state.norm_sqr();
    let cross = (state.amp_a * state.amp_b.conj()).re;
    let p0 = (population + visibility * cross).clamp(0.0, 1.0);
    Ok((p0, 1.0 - p0))
}

pub(crate) fn check_visibility(visibility: f64) -> Result<()> {
    if (0.0..=1.0).contains(&visibility) {
        Ok(())
    } else {
        Err(Error::param(
            "visibility",
            format!("must lie in [0, 1], got {visibility}"),
        ))
    }
}

/// Which-path measurement: projects onto `|a>` or `|b>` with Born
/// probabilities and returns the found mode and the collapsed state.
pub fn collapse_which_path<R: Rng + ?Sized>(state: &PathState, rng: &mut R) -> (Mode, PathState) {
    let p_a = state.occupation(Mode::A) / state.norm_sqr();
    let mode = if rng.random::<f64>() < p_a {
        Mode::A
    } else {
        Mode::B
    };
    (mode, PathState::localized(mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::{prop_assert, prop_assert_eq, prop_assume, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    type Mat2 = [[Complex64; 2]; 2];

    // Independent oracle: density matrix with the coherence scaled by V,
    // conjugated by the Hadamard matrix; p0 is the (0,0) element.
    fn density_oracle(state: &PathState, visibility: f64) -> (f64, f64) {
        let psi = [state.amp_a(), state.amp_b()];
        let mut rho: Mat2 = [[Complex64::default(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                rho[i][j] = psi[i] * psi[j].conj();
                if i != j {
                    rho[i][j] *= visibility;
                }
            }
        }
        let h = FRAC_1_SQRT_2;
        let had = [[h, h], [h, -h]];
        let mut out: Mat2 = [[Complex64::default(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[i][j] += rho[k][l] * had[i][k] * had[j][l];
                    }
                }
            }
        }
        (out[0][0].re, out[1][1].re)
    }

    fn random_state(rng: &mut ChaCha8Rng) -> PathState {
        let c = |rng: &mut ChaCha8Rng| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        };
        PathState::normalized(c(rng), c(rng)).unwrap()
    }

    #[test]
    fn encoding_states() {
        let s0 = make_state(Bit::Zero);
        let s1 = make_state(Bit::One);
        assert_abs_diff_eq!(s0.amp_a().re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s0.amp_b().re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s1.amp_b().re, -(0.5f64.sqrt()), epsilon = 1e-15);
        assert_eq!(s0.inner(&s1), Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(s0.norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn invalid_bits_rejected() {
        assert_eq!(Bit::try_from(2), Err(Error::InvalidBit(2)));
        assert_eq!(Bit::try_from(1), Ok(Bit::One));
    }

    #[test]
    fn path_state_validation() {
        let one = Complex64::new(1.0, 0.0);
        assert!(matches!(
            PathState::new(one, one),
            Err(Error::NotNormalized(_))
        ));
        assert_eq!(
            PathState::new(Complex64::new(f64::NAN, 0.0), one),
            Err(Error::NonFinite)
        );
    }

    #[test]
    fn beam_splitter_examples() {
        let out = beam_splitter(&PathState::localized(Mode::A));
        assert_abs_diff_eq!(out.amp_a().re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amp_b().re, FRAC_1_SQRT_2, epsilon = 1e-15);

        let d0 = beam_splitter(&make_state(Bit::Zero));
        assert_abs_diff_eq!(d0.amp_a().norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d0.amp_b().norm(), 0.0, epsilon = 1e-15);
        let d1 = beam_splitter(&make_state(Bit::One));
        assert_abs_diff_eq!(d1.amp_a().norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d1.amp_b().norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn phase_pi_maps_zero_to_one() {
        let s = make_state(Bit::Zero);
        assert_eq!(apply_phase(&s, PhaseAngle::from_radians(0.0)), s);
        let flipped = apply_phase(&s, PhaseAngle::from_radians(PI));
        let overlap = flipped.inner(&make_state(Bit::One)).norm();
        assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn phase_from_path_difference() {
        let half = PhaseAngle::from_path_difference(406.0, 812.0);
        assert_abs_diff_eq!(half.radians(), PI, epsilon = 1e-15);
        let wrapped = PhaseAngle::from_path_difference(-812.0 * 1.25, 812.0).canonical();
        assert_abs_diff_eq!(wrapped, 1.5 * PI, epsilon = 1e-12);
        assert!((0.0..TAU).contains(&PhaseAngle::from_radians(-1e-18).canonical()));
    }

    #[test]
    fn detection_probability_examples() {
        let (p0, p1) = detection_probabilities(&make_state(Bit::Zero), 1.0).unwrap();
        assert_abs_diff_eq!(p0, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p1, 0.0, epsilon = 1e-15);

        let (p0, p1) = detection_probabilities(&make_state(Bit::Zero), 0.86).unwrap();
        assert_abs_diff_eq!(p0, 0.93, epsilon = 1e-12);
        assert_abs_diff_eq!(p1, 0.07, epsilon = 1e-12);

        for v in [0.0, 0.3, 1.0] {
            let (p0, p1) = detection_probabilities(&PathState::localized(Mode::A), v).unwrap();
            assert_eq!((p0, p1), (0.5, 0.5));
        }
    }

    #[test]
    fn visibility_out_of_range_rejected() {
        let s = make_state(Bit::Zero);
        assert!(detection_probabilities(&s, 1.01).is_err());
        assert!(detection_probabilities(&s, -0.1).is_err());
        assert!(detection_probabilities(&s, f64::NAN).is_err());
    }

    #[test]
    fn correct_detector_probability_matches_density_oracle_on_grid() {
        for bit in [Bit::Zero, Bit::One] {
            for step in 0..24 {
                let phi = TAU * step as f64 / 24.0;
                for v in [0.0, 0.25, 0.5, 0.8, 0.86, 0.95, 1.0] {
                    let state = apply_phase(&make_state(bit), PhaseAngle::from_radians(phi));
                    let (p0, p1) = detection_probabilities(&state, v).unwrap();
                    let (o0, o1) = density_oracle(&state, v);
                    assert_abs_diff_eq!(p0, o0, epsilon = 1e-12);
                    assert_abs_diff_eq!(p1, o1, epsilon = 1e-12);
                    let correct = if bit == Bit::Zero { p0 } else { p1 };
                    assert_abs_diff_eq!(correct, (1.0 + v * phi.cos()) / 2.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn collapse_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let s = make_state(Bit::Zero);
        let hits = (0..n)
            .filter(|_| collapse_which_path(&s, &mut rng).0 == Mode::A)
            .count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.01, "freq {freq}");

        let certain = PathState::localized(Mode::A);
        for _ in 0..1000 {
            let (mode, collapsed) = collapse_which_path(&certain, &mut rng);
            assert_eq!(mode, Mode::A);
            assert_eq!(collapsed, certain);
        }
    }

    #[test]
    fn collapse_matches_born_within_four_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 100_000;
        for _ in 0..5 {
            let state = random_state(&mut rng);
            let p = state.occupation(Mode::A);
            let hits = (0..n)
                .filter(|_| collapse_which_path(&state, &mut rng).0 == Mode::A)
                .count() as f64;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            assert!((hits - n as f64 * p).abs() <= 4.0 * sigma.max(1.0));
        }
    }

    #[test]
    fn collapsed_state_gives_even_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for bit in [Bit::Zero, Bit::One] {
            let (_, collapsed) = collapse_which_path(&make_state(bit), &mut rng);
            let (p0, p1) = detection_probabilities(&collapsed, 1.0).unwrap();
            let (o0, o1) = density_oracle(&collapsed, 1.0);
            assert_eq!((p0, p1), (0.5, 0.5));
            assert_abs_diff_eq!(o0, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(o1, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn unitarity_over_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..1000 {
            let s = random_state(&mut rng);
            let phi = PhaseAngle::from_radians(rng.random::<f64>() * TAU);
            assert!((beam_splitter(&s).norm_sqr() - 1.0).abs() < 1e-12);
            assert!((apply_phase(&s, phi).norm_sqr() - 1.0).abs() < 1e-12);
            let back = beam_splitter(&beam_splitter(&s));
            assert!((back.amp_a() - s.amp_a()).norm() < 1e-12);
            assert!((back.amp_b() - s.amp_b()).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn probabilities_sum_to_one_and_scale_with_visibility(
            ar in -1.0f64..1.0, ai in -1.0f64..1.0, br in -1.0f64..1.0, bi in -1.0f64..1.0,
            v in 0.0f64..=1.0,
        ) {
            prop_assume!(ar * ar + ai * ai + br * br + bi * bi > 1e-6);
            let s = PathState::normalized(Complex64::new(ar, ai), Complex64::new(br, bi)).unwrap();
            let (p0, p1) = detection_probabilities(&s, v).unwrap();
            prop_assert_eq!(p0 + p1, 1.0);
            prop_assert!((0.0..=1.0).contains(&p0));
            let (full, _) = detection_probabilities(&s, 1.0).unwrap();
            prop_assert!(((p0 - 0.5) - v * (full - 0.5)).abs() < 1e-12);
        }
    }
}
