//! Domain types and unit conventions.
//!
//! The dimensionless core works in units hbar = 1, epsilon = 1, L0 = 1:
//! times are measured in 1/epsilon, lengths in lattice spacings, energies in
//! hbar*epsilon. Conversion from laboratory quantities is quarantined in
//! [`derive_medium`].

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-level parameters of the identical qubits.
///
/// `d00`, `d01`, `d11` are the matrix elements of the cosine operator scaled
/// by the Josephson energy, in units hbar*epsilon. `d01` is stored real
/// non-negative; its phase is a basis choice with no observable effect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    pub epsilon: f64,
    pub d00: f64,
    pub d01: f64,
    pub d11: f64,
    pub e_j: f64,
}

impl QubitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!(
                "qubit.epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if !(self.e_j > 0.0) {
            return Err(Error::Config(format!(
                "qubit.e_j must be > 0, got {}",
                self.e_j
            )));
        }
        for (name, d) in [("d00", self.d00), ("d01", self.d01), ("d11", self.d11)] {
            if !d.is_finite() {
                return Err(Error::Config(format!("qubit.{name} must be finite")));
            }
        }
        if self.d01 < 0.0 {
            return Err(Error::Config(format!(
                "qubit.d01 must be >= 0, got {}",
                self.d01
            )));
        }
        Ok(())
    }
}

impl Default for QubitParams {
    fn default() -> Self {
        QubitParams {
            epsilon: 1.0,
            d00: 0.4,
            d01: 0.2,
            d11: 3.6,
            e_j: 2.0,
        }
    }
}

/// Wave speeds and back-action strength of the lattice medium.
///
/// `v_tilde` and `u_tilde` are the active/passive speeds in L0*epsilon;
/// `r` is the back-action coefficient in epsilon^2. Impedance matching means
/// `u_tilde == v_tilde`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    pub v_tilde: f64,
    pub u_tilde: f64,
    pub r: f64,
}

impl MediumParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_tilde > 0.0) {
            return Err(Error::Config(format!(
                "medium.v_tilde must be > 0, got {}",
                self.v_tilde
            )));
        }
        if !(self.u_tilde > 0.0) {
            return Err(Error::Config(format!(
                "medium.u_tilde must be > 0, got {}",
                self.u_tilde
            )));
        }
        if !(self.r >= 0.0) {
            return Err(Error::Config(format!(
                "medium.r must be >= 0, got {}",
                self.r
            )));
        }
        Ok(())
    }
}

impl Default for MediumParams {
    fn default() -> Self {
        // Chosen so the default priming carrier sits on the two-photon
        // resonance of the standing-wave antinodes; see README.
        MediumParams {
            v_tilde: 3.65,
            u_tilde: 3.65,
            r: 0.1,
        }
    }
}

/// Laboratory-frame platform parameters (SI).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Qubit spacing (m).
    pub l0: f64,
    /// Distance between the superconducting lines (m).
    pub d: f64,
    /// Strip thickness (m).
    pub w: f64,
    /// Junction critical current (A).
    pub i_c: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("l0", self.l0),
            ("d", self.d),
            ("w", self.w),
            ("i_c", self.i_c),
        ] {
            if !(v > 0.0) {
                return Err(Error::Config(format!(
                    "physical.{name} must be > 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Platform example used throughout the docs and tests.
    pub fn reference() -> Self {
        PhysicalParams {
            l0: 5e-4,
            d: 1e-5,
            w: 1e-5,
            i_c: 4e-7,
        }
    }
}

/// Site layout: `n_total` sites, qubits on `active_start..active_end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeLayout {
    pub n_total: usize,
    pub active_start: usize,
    pub active_end: usize,
}

impl LatticeLayout {
    pub fn new(n_total: usize, active_start: usize, active_end: usize) -> Result<Self> {
        let layout = LatticeLayout {
            n_total,
            active_start,
            active_end,
        };
        layout.validate()?;
        Ok(layout)
    }

    /// Active span of `n_active` sites centered in `n_total`.
    pub fn centered(n_total: usize, n_active: usize) -> Result<Self> {
        if n_active >= n_total {
            return Err(Error::Config(format!(
                "lattice: active count {n_active} must be < n_total {n_total}"
            )));
        }
        let start = (n_total - n_active) / 2;
        Self::new(n_total, start, start + n_active)
    }

    pub fn validate(&self) -> Result<()> {
        if self.active_start >= self.active_end || self.active_end > self.n_total {
            return Err(Error::Config(format!(
                "lattice: need active_start < active_end <= n_total, got [{}, {}) in {}",
                self.active_start, self.active_end, self.n_total
            )));
        }
        if self.active_start == 0 || self.active_end == self.n_total {
            return Err(Error::Config(
                "lattice: passive padding must be nonempty on both sides".into(),
            ));
        }
        Ok(())
    }

    pub fn n_active(&self) -> usize {
        self.active_end - self.active_start
    }

    pub fn is_active(&self, site: usize) -> bool {
        (self.active_start..self.active_end).contains(&site)
    }
}

/// Full dynamical state: field samples, field velocities, one amplitude pair
/// per active site, and the clock.
///
/// `c0`/`c1` are the interaction-picture amplitudes; `|c0|^2 + |c1|^2 = 1`
/// per site within integrator tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub a: Vec<f64>,
    pub a_dot: Vec<f64>,
    pub c0: Vec<C64>,
    pub c1: Vec<C64>,
}

impl SimState {
    /// All-ground state with zero field.
    pub fn new(layout: &LatticeLayout) -> Self {
        SimState {
            t: 0.0,
            a: vec![0.0; layout.n_total],
            a_dot: vec![0.0; layout.n_total],
            c0: vec![C64::new(1.0, 0.0); layout.n_active()],
            c1: vec![C64::new(0.0, 0.0); layout.n_active()],
        }
    }

    pub fn check_consistent(&self, layout: &LatticeLayout) -> Result<()> {
        if self.a.len() != layout.n_total
            || self.a_dot.len() != layout.n_total
            || self.c0.len() != layout.n_active()
            || self.c1.len() != layout.n_active()
        {
            return Err(Error::Precondition(format!(
                "state arrays ({}, {}, {}, {}) inconsistent with layout ({} sites, {} active)",
                self.a.len(),
                self.a_dot.len(),
                self.c0.len(),
                self.c1.len(),
                layout.n_total,
                layout.n_active()
            )));
        }
        Ok(())
    }

    /// Worst per-site deviation of |c0|^2 + |c1|^2 from 1.
    pub fn max_norm_deviation(&self) -> f64 {
        self.c0
            .iter()
            .zip(&self.c1)
            .map(|(c0, c1)| (c0.norm_sqr() + c1.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Excited-level populations |c1|^2 per active site.
    pub fn populations(&self) -> Vec<f64> {
        self.c1.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// Periodic susceptibility chi(z) = chi0 + chi_tilde * (1 + cos(2 pi z / L_m)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiProfile {
    pub chi0: f64,
    pub chi_tilde: f64,
    pub l_m: f64,
}

impl ChiProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.chi0 >= 0.0) {
            return Err(Error::Config(format!(
                "chi.chi0 must be >= 0, got {}",
                self.chi0
            )));
        }
        if !(self.chi_tilde >= 0.0) {
            return Err(Error::Config(format!(
                "chi.chi_tilde must be >= 0, got {}",
                self.chi_tilde
            )));
        }
        if !(self.l_m > 0.0) {
            return Err(Error::Config(format!(
                "chi.l_m must be > 0, got {}",
                self.l_m
            )));
        }
        Ok(())
    }
}

/// Instantaneous susceptibility expectation of one qubit, in epsilon^2.
///
/// chi = (r/E_J) * (d00 |c0|^2 + d11 |c1|^2 + 2 Re(d01 c0* c1 e^{-i eps t})).
/// Errors if the amplitude pair is not normalized to 1e-6.
pub fn chi_expectation(c0: C64, c1: C64, t: f64, q: &QubitParams, m: &MediumParams) -> Result<f64> {
    let norm = c0.norm_sqr() + c1.norm_sqr();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NormViolation(format!(
            "|c0|^2+|c1|^2 = {norm}, expected 1 within 1e-6"
        )));
    }
    Ok(chi_expectation_unchecked(c0, c1, t, q, m))
}

pub(crate) fn chi_expectation_unchecked(
    c0: C64,
    c1: C64,
    t: f64,
    q: &QubitParams,
    m: &MediumParams,
) -> f64 {
    let rot = C64::from_polar(1.0, -q.epsilon * t);
    let cross = (c0.conj() * c1 * rot).re;
    (m.r / q.e_j) * (q.d00 * c0.norm_sqr() + q.d11 * c1.norm_sqr() + 2.0 * q.d01 * cross)
}

// SI constants for derive_medium.
const HBAR: f64 = 1.054_571_817e-34;
const E_CHARGE: f64 = 1.602_176_634e-19;
const C_LIGHT: f64 = 2.997_924_58e8;
const EPS_0: f64 = 8.854_187_812_8e-12;

/// derive_medium output: the dimensionless medium plus the laboratory-frame
/// diagnostics behind it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DerivedMedium {
    pub medium: MediumParams,
    /// Bracket factor of the back-action formula (dimensionless).
    pub x: f64,
    /// Wave speed over vacuum light speed.
    pub v_over_c: f64,
    /// Josephson energy (J).
    pub e_j_joule: f64,
    /// Josephson frequency (rad/s).
    pub omega_j: f64,
    /// Qubit splitting used for the unit conversion (rad/s).
    pub epsilon: f64,
    /// Matched passive capacitance (F). Equals the junction capacitance
    /// implied by the frequency ratio; reported as the matching diagnostic.
    pub c_tilde_farad: f64,
}

/// Convert laboratory parameters to the dimensionless medium.
///
/// `e_j_over_hbar_omega_j` fixes the Josephson frequency from the critical
/// current; `epsilon_over_omega_j` is normally taken from the charge-qubit
/// spectrum oracle (None falls back to the harmonic-limit value 2).
pub fn derive_medium(
    phys: &PhysicalParams,
    e_j_over_hbar_omega_j: f64,
    epsilon_over_omega_j: Option<f64>,
) -> Result<DerivedMedium> {
    phys.validate()?;
    if !(e_j_over_hbar_omega_j > 0.0) {
        return Err(Error::Config(format!(
            "e_j_over_hbar_omega_j must be > 0, got {e_j_over_hbar_omega_j}"
        )));
    }
    let eps_ratio = epsilon_over_omega_j.unwrap_or(2.0);
    if !(eps_ratio > 0.0) {
        return Err(Error::Config(format!(
            "epsilon_over_omega_j must be > 0, got {eps_ratio}"
        )));
    }

    let e_j = HBAR * phys.i_c / (2.0 * E_CHARGE);
    let omega_j = e_j / (e_j_over_hbar_omega_j * HBAR);
    // Squared electron charge in Gaussian form (J*m).
    let e_g2 = E_CHARGE * E_CHARGE / (4.0 * std::f64::consts::PI * EPS_0);
    let denom = 32.0 * std::f64::consts::PI * e_g2 * phys.d * e_j;
    let x = HBAR * HBAR * phys.l0 * phys.w * omega_j * omega_j / denom;
    let r_phys = omega_j * omega_j / (1.0 + x);
    // Site-rate form of the wave speed (1/s); physical speed is upsilon * L0.
    let upsilon = (r_phys * phys.w * HBAR * HBAR * C_LIGHT * C_LIGHT
        / (denom * phys.l0))
        .sqrt();
    let v_over_c = upsilon * phys.l0 / C_LIGHT;
    // Cross-check against the closed form sqrt(x / (1 + x)).
    let alt = (x / (1.0 + x)).sqrt();
    debug_assert!((v_over_c - alt).abs() <= 1e-12 * alt);

    let epsilon = eps_ratio * omega_j;
    let v_tilde = upsilon / epsilon;
    let c_tilde = 4.0 * E_CHARGE * E_CHARGE * e_j / (HBAR * omega_j).powi(2);

    Ok(DerivedMedium {
        medium: MediumParams {
            v_tilde,
            u_tilde: v_tilde,
            r: r_phys / (epsilon * epsilon),
        },
        x,
        v_over_c,
        e_j_joule: e_j,
        omega_j,
        epsilon,
        c_tilde_farad: c_tilde,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: QubitParams = QubitParams {
        epsilon: 1.0,
        d00: 0.4,
        d01: 0.2,
        d11: 3.6,
        e_j: 2.0,
    };
    const M: MediumParams = MediumParams {
        v_tilde: 3.65,
        u_tilde: 3.65,
        r: 0.25,
    };

    #[test]
    fn chi_ground_state() {
        let chi = chi_expectation(C64::new(1.0, 0.0), C64::new(0.0, 0.0), 0.7, &Q, &M).unwrap();
        assert!((chi - 0.05).abs() < 1e-15, "chi = {chi}");
    }

    #[test]
    fn chi_excited_state() {
        let chi = chi_expectation(C64::new(0.0, 0.0), C64::new(1.0, 0.0), 0.0, &Q, &M).unwrap();
        assert!((chi - (M.r / Q.e_j) * Q.d11).abs() < 1e-15);
    }

    #[test]
    fn chi_equal_superposition() {
        let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let chi = chi_expectation(amp, amp, 0.0, &Q, &M).unwrap();
        let expect = (M.r / Q.e_j) * (0.5 * Q.d00 + 0.5 * Q.d11 + Q.d01);
        assert!((chi - expect).abs() < 1e-15);
    }

    #[test]
    fn chi_rejects_unnormalized() {
        let err = chi_expectation(C64::new(0.9, 0.0), C64::new(0.0, 0.0), 0.0, &Q, &M);
        assert!(matches!(err, Err(Error::NormViolation(_))));
    }

    #[test]
    fn chi_periodic_in_time() {
        let c0 = C64::new(0.6, 0.3);
        let c1 = C64::new(0.5, (1.0 - 0.36 - 0.09 - 0.25f64).sqrt());
        let period = 2.0 * std::f64::consts::PI / Q.epsilon;
        let chi_a = chi_expectation(c0, c1, 0.31, &Q, &M).unwrap();
        let chi_b = chi_expectation(c0, c1, 0.31 + period, &Q, &M).unwrap();
        assert!((chi_a - chi_b).abs() < 1e-12);
    }

    #[test]
    fn chi_minimum_over_states_matches_matrix_eigenvalue() {
        // min over Bloch sphere = (r/E_J) * min eigenvalue of [[d00,d01],[d01,d11]].
        let tr = Q.d00 + Q.d11;
        let det = Q.d00 * Q.d11 - Q.d01 * Q.d01;
        let lam_min = 0.5 * (tr - (tr * tr - 4.0 * det).sqrt());
        let bound = (M.r / Q.e_j) * lam_min;
        let mut min_seen = f64::INFINITY;
        let steps = 160;
        for i in 0..=steps {
            let theta = std::f64::consts::PI * i as f64 / steps as f64;
            for j in 0..steps {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / steps as f64;
                let c0 = C64::new((theta / 2.0).cos(), 0.0);
                let c1 = C64::from_polar((theta / 2.0).sin(), phi);
                let chi = chi_expectation(c0, c1, 0.0, &Q, &M).unwrap();
                min_seen = min_seen.min(chi);
            }
        }
        assert!((min_seen - bound).abs() < 1e-3, "{min_seen} vs {bound}");
    }

    #[test]
    fn derive_medium_reference_platform() {
        let der = derive_medium(&PhysicalParams::reference(), 4.0, Some(1.9353655909)).unwrap();
        assert!((der.x - 0.17737146).abs() < 1e-7, "x = {}", der.x);
        assert!(
            (der.v_over_c - 0.38813707).abs() < 1e-7,
            "v/c = {}",
            der.v_over_c
        );
        assert!(
            (der.medium.v_tilde - 0.38531258).abs() < 1e-7,
            "v_tilde = {}",
            der.medium.v_tilde
        );
        assert!(
            (der.medium.r - 0.22675688).abs() < 1e-7,
            "r = {}",
            der.medium.r
        );
        assert!((der.c_tilde_farad - 1.24797245e-14).abs() < 1e-20);
        assert_eq!(der.medium.u_tilde, der.medium.v_tilde);
    }

    #[test]
    fn derive_medium_vanishing_strip_kills_speed() {
        let mut phys = PhysicalParams::reference();
        phys.w = 1e-30;
        let der = derive_medium(&phys, 4.0, None).unwrap();
        assert!(der.medium.v_tilde < 1e-12);
    }

    #[test]
    fn derive_medium_small_bracket_limit() {
        // x -> 0 makes the back-action approach the bare Josephson frequency.
        let mut phys = PhysicalParams::reference();
        phys.w = 1e-30;
        let der = derive_medium(&phys, 4.0, Some(2.0)).unwrap();
        let r_epsilon2 = der.medium.r * (der.epsilon / der.omega_j).powi(2);
        assert!((r_epsilon2 - 1.0).abs() < 1e-9, "r/omega_j^2 = {r_epsilon2}");
    }

    #[test]
    fn derive_medium_rejects_nonpositive() {
        let mut phys = PhysicalParams::reference();
        phys.d = 0.0;
        assert!(matches!(
            derive_medium(&phys, 4.0, None),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            derive_medium(&PhysicalParams::reference(), -1.0, None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn layout_invariants() {
        assert!(LatticeLayout::new(10, 0, 5).is_err());
        assert!(LatticeLayout::new(10, 5, 10).is_err());
        assert!(LatticeLayout::new(10, 5, 5).is_err());
        let layout = LatticeLayout::centered(2048, 512).unwrap();
        assert_eq!(layout.active_start, 768);
        assert_eq!(layout.active_end, 1280);
        assert_eq!(layout.n_active(), 512);
    }

    #[test]
    fn fresh_state_is_ground() {
        let layout = LatticeLayout::centered(64, 16).unwrap();
        let state = SimState::new(&layout);
        assert_eq!(state.max_norm_deviation(), 0.0);
        assert!(state.populations().iter().all(|&p| p == 0.0));
        state.check_consistent(&layout).unwrap();
    }
}
