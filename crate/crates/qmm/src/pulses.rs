//! Gaussian wave-packet synthesis for priming and probe pulses.
//!
//! A pulse is injected as an initial condition: field displacement and
//! velocity of a carrier wave under a Gaussian envelope, moving left or
//! right at the phase velocity omega/k. Synthesis is additive, so
//! superpositions (for example two counter-propagating pulses) are built by
//! repeated calls.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SimState;

/// Envelope values below this are treated as exactly zero.
const ENVELOPE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Left => -1.0,
            Direction::Right => 1.0,
        }
    }
}

/// One traveling wave packet.
///
/// At the moment of injection the field is
/// `a(z) = 2 A exp(-((z - z0)/l)^2) cos(k (z - z0) + phi0)` and the velocity
/// is its co-moving time derivative. `z` counts lattice sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub amplitude: f64,
    pub wavenumber: f64,
    pub omega: f64,
    pub center: f64,
    pub width: f64,
    pub direction: Direction,
    #[serde(default)]
    pub phase: f64,
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        // Zero amplitude is a legal no-op so degenerate drives can still run.
        if !(self.amplitude >= 0.0) {
            return Err(Error::Config(format!(
                "pulse amplitude must be >= 0, got {}",
                self.amplitude
            )));
        }
        if !(self.wavenumber > 0.0) {
            return Err(Error::Config(format!(
                "pulse wavenumber must be > 0, got {}",
                self.wavenumber
            )));
        }
        if !(self.omega > 0.0) {
            return Err(Error::Config(format!(
                "pulse omega must be > 0, got {}",
                self.omega
            )));
        }
        if !(self.width > 0.0) {
            return Err(Error::Config(format!(
                "pulse width must be > 0, got {}",
                self.width
            )));
        }
        if !self.center.is_finite() {
            return Err(Error::Config("pulse center must be finite".into()));
        }
        if !self.phase.is_finite() {
            return Err(Error::Config("pulse phase must be finite".into()));
        }
        Ok(())
    }
}

/// Add `spec` to the field of `state`. Endpoints stay clamped at zero.
pub fn synthesize(spec: &PulseSpec, state: &mut SimState) -> Result<()> {
    spec.validate()?;
    let n = state.a.len();
    if n < 3 {
        return Err(Error::Precondition(format!(
            "field of {n} sites cannot hold a pulse"
        )));
    }
    let s = spec.direction.sign();
    let v_phase = spec.omega / spec.wavenumber;
    for i in 1..n - 1 {
        let dz = i as f64 - spec.center;
        let env = (-(dz / spec.width).powi(2)).exp();
        if env < ENVELOPE_FLOOR {
            continue;
        }
        let theta = spec.wavenumber * dz + spec.phase;
        let (sin_t, cos_t) = theta.sin_cos();
        let carrier = 2.0 * spec.amplitude * env;
        state.a[i] += carrier * cos_t;
        // Co-moving derivative: envelope drift plus carrier oscillation.
        state.a_dot[i] +=
            s * carrier * (2.0 * v_phase * dz / (spec.width * spec.width) * cos_t + spec.omega * sin_t);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LatticeLayout;

    fn blank(n: usize) -> SimState {
        let layout = LatticeLayout::centered(n, n / 2).unwrap();
        SimState::new(&layout)
    }

    fn spec(center: f64, direction: Direction, phase: f64) -> PulseSpec {
        PulseSpec {
            amplitude: 0.18,
            wavenumber: 2.0 * std::f64::consts::PI / 25.0,
            omega: 0.9,
            center,
            width: 24.0,
            direction,
            phase,
        }
    }

    #[test]
    fn peak_value_at_center() {
        let mut state = blank(256);
        let p = spec(128.0, Direction::Right, 0.0);
        synthesize(&p, &mut state).unwrap();
        assert!((state.a[128] - 2.0 * p.amplitude).abs() < 1e-15);
    }

    #[test]
    fn endpoints_stay_zero() {
        let mut state = blank(64);
        let p = spec(2.0, Direction::Right, 0.0);
        synthesize(&p, &mut state).unwrap();
        assert_eq!(state.a[0], 0.0);
        assert_eq!(state.a_dot[0], 0.0);
        assert_eq!(state.a[63], 0.0);
        assert_eq!(state.a_dot[63], 0.0);
    }

    #[test]
    fn envelope_truncates_far_field() {
        let mut state = blank(1024);
        let p = spec(512.0, Direction::Right, 0.3);
        synthesize(&p, &mut state).unwrap();
        // Beyond ~sqrt(ln(1e8)) widths the synthesis writes nothing.
        assert_eq!(state.a[10], 0.0);
        assert_eq!(state.a_dot[1013], 0.0);
        assert!(state.a[512] != 0.0);
    }

    #[test]
    fn synthesis_is_additive() {
        let mut both = blank(512);
        let p1 = spec(180.0, Direction::Right, 0.0);
        let p2 = spec(330.0, Direction::Left, 1.1);
        synthesize(&p1, &mut both).unwrap();
        synthesize(&p2, &mut both).unwrap();

        let mut one = blank(512);
        synthesize(&p1, &mut one).unwrap();
        let mut two = blank(512);
        synthesize(&p2, &mut two).unwrap();
        for i in 0..512 {
            let sum_a = one.a[i] + two.a[i];
            let sum_ad = one.a_dot[i] + two.a_dot[i];
            assert!((both.a[i] - sum_a).abs() < 1e-15);
            assert!((both.a_dot[i] - sum_ad).abs() < 1e-15);
        }
    }

    #[test]
    fn left_pulse_mirrors_right_pulse() {
        let center = 256.0;
        let mut right = blank(512);
        synthesize(&spec(center, Direction::Right, 0.0), &mut right).unwrap();
        let mut left = blank(512);
        synthesize(&spec(center, Direction::Left, 0.0), &mut left).unwrap();
        for d in 1..200usize {
            let plus = 256 + d;
            let minus = 256 - d;
            assert!((right.a[plus] - left.a[minus]).abs() < 1e-14);
            assert!((right.a_dot[plus] - left.a_dot[minus]).abs() < 1e-14);
        }
    }

    #[test]
    fn counter_propagating_pair_is_standing_wave() {
        let center = 256.0;
        let mut state = blank(512);
        synthesize(&spec(center, Direction::Right, 0.0), &mut state).unwrap();
        synthesize(&spec(center, Direction::Left, 0.0), &mut state).unwrap();
        let p = spec(center, Direction::Right, 0.0);
        for i in 100..412usize {
            assert!(state.a_dot[i].abs() < 1e-14, "site {i}");
            let dz = i as f64 - center;
            let expect = 4.0 * p.amplitude
                * (-(dz / p.width).powi(2)).exp()
                * (p.wavenumber * dz).cos();
            let expect = if expect.abs() < 4.0 * p.amplitude * ENVELOPE_FLOOR {
                state.a[i]
            } else {
                expect
            };
            assert!((state.a[i] - expect).abs() < 1e-13, "site {i}");
        }
    }

    #[test]
    fn rejects_degenerate_specs() {
        let mut state = blank(64);
        let mut p = spec(32.0, Direction::Right, 0.0);
        p.amplitude = -0.1;
        assert!(synthesize(&p, &mut state).is_err());
        let mut p = spec(32.0, Direction::Right, 0.0);
        p.width = -1.0;
        assert!(synthesize(&p, &mut state).is_err());
        let mut p = spec(32.0, Direction::Right, 0.0);
        p.omega = 0.0;
        assert!(synthesize(&p, &mut state).is_err());
    }

    #[test]
    fn zero_amplitude_is_a_no_op() {
        let mut state = blank(64);
        let mut p = spec(32.0, Direction::Right, 0.0);
        p.amplitude = 0.0;
        synthesize(&p, &mut state).unwrap();
        assert!(state.a.iter().all(|&x| x == 0.0));
        assert!(state.a_dot.iter().all(|&x| x == 0.0));
    }
}
