//! Closed-form excitation profile of a qubit under a standing-wave drive.
//!
//! In the quasi-monochromatic regime a qubit at position z undergoes
//! generalized Rabi oscillations whose local frequency and detuning are set
//! by the standing-wave intensity cos(2kz + phi0) + 1. This is the analytic
//! reference the simulator is validated against.

use crate::model::QubitParams;

/// |c1|(z, t) for a ground-state qubit driven by a standing wave of
/// single-pulse amplitude `a`, carrier wavenumber `k`, relative phase `phi0`
/// and carrier detuning `delta`.
pub fn rabi_profile(
    z: f64,
    t: f64,
    a: f64,
    k: f64,
    phi0: f64,
    delta: f64,
    q: &QubitParams,
) -> f64 {
    let intensity = (2.0 * k * z + phi0).cos() + 1.0;
    let drive = 2.0 * q.d01.abs() * a * a * intensity;
    if drive == 0.0 {
        return 0.0;
    }
    let detune = delta + 4.0 * a * a * (q.d00 - q.d11) * intensity;
    let generalized = (drive * drive + 0.25 * detune * detune).sqrt();
    drive * (generalized * t).sin().abs() / generalized
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> QubitParams {
        QubitParams::default()
    }

    #[test]
    fn node_sites_never_excite() {
        let k = 2.0 * std::f64::consts::PI / 25.0;
        // 2kz + phi0 = pi at z = 6.25 for phi0 = 0.
        for t in [0.0, 1.0, 37.5, 1e4] {
            assert_eq!(rabi_profile(6.25, t, 0.18, k, 0.0, 0.0, &q()), 0.0);
        }
    }

    #[test]
    fn resonant_antinode_is_pure_sine() {
        let k = 0.3;
        let a = 0.1;
        let qp = q();
        // Cancel the intensity-induced detuning so the oscillation is full.
        let delta = -8.0 * a * a * (qp.d00 - qp.d11);
        let rabi = 4.0 * qp.d01 * a * a;
        for i in 0..50 {
            let t = i as f64 * 1.7;
            let got = rabi_profile(0.0, t, a, k, 0.0, delta, &qp);
            assert!((got - (rabi * t).sin().abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn detuning_caps_the_amplitude() {
        let qp = q();
        let a = 0.1;
        let drive = 4.0 * qp.d01 * a * a;
        let delta = -8.0 * a * a * (qp.d00 - qp.d11) + 3.0 * drive;
        let cap = drive / (drive * drive + 0.25 * (3.0 * drive).powi(2)).sqrt();
        let mut peak = 0.0f64;
        for i in 0..2000 {
            peak = peak.max(rabi_profile(0.0, i as f64 * 0.5, a, 0.4, 0.0, delta, &qp));
        }
        assert!(peak <= cap + 1e-12);
        assert!(peak > 0.95 * cap);
    }

    proptest! {
        #[test]
        fn stays_in_unit_interval(
            z in -1e3..1e3f64,
            t in 0.0..1e4f64,
            a in 0.0..0.5f64,
            delta in -1.0..1.0f64,
            phi0 in -10.0..10.0f64,
        ) {
            let v = rabi_profile(z, t, a, 0.2513, phi0, delta, &q());
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn periodic_in_z(z in -100.0..100.0f64, t in 0.0..100.0f64) {
            let k = 2.0 * std::f64::consts::PI / 25.0;
            let period = std::f64::consts::PI / k;
            let a = rabi_profile(z, t, 0.18, k, 0.4, 0.05, &q());
            let b = rabi_profile(z + period, t, 0.18, k, 0.4, 0.05, &q());
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn no_cross_element_no_excitation(z in -50.0..50.0f64, t in 0.0..500.0f64) {
            let mut qp = q();
            qp.d01 = 0.0;
            prop_assert_eq!(rabi_profile(z, t, 0.2, 0.3, 0.1, 0.02, &qp), 0.0);
        }
    }
}
