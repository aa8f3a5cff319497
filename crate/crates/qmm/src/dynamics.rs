//! Coupled field-qubit time stepping.
//!
//! The field obeys a lattice wave equation with a sine restoring term whose
//! strength is the instantaneous qubit susceptibility; each active-site qubit
//! obeys a two-level Schroedinger equation driven by the local squared field.
//! Qubit amplitudes are integrated in a co-rotating frame psi0 = c0 e^{+i e
//! t/2}, psi1 = c1 e^{-i e t/2}, which makes the susceptibility time-local.
//!
//! One public step is a three-substep composition (weights W1, W0, W1) of a
//! base substep that combines velocity-Verlet for the field with a two-node
//! Gauss quadrature Magnus propagator for the qubits, the field along the
//! substep reconstructed by cubic Hermite interpolation and refined by one
//! corrector pass. The composition is globally fourth-order and preserves
//! qubit norm to rounding.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{LatticeLayout, MediumParams, QubitParams, SimState};

/// Composition weights: W1 = 1 / (2 - 2^(1/3)), W0 = 1 - 2 W1.
const W1: f64 = 1.3512071919596578;
const W0: f64 = -1.7024143839193153;

/// Largest allowed Courant number max(v, u) * dt.
const MAX_COURANT: f64 = 0.5;
/// Largest allowed qubit phase advance epsilon * dt.
const MAX_EPS_STEP: f64 = 0.1;

pub struct Integrator {
    layout: LatticeLayout,
    qubit: QubitParams,
    medium: MediumParams,
    dt: f64,
    /// Squared wave speed per site (u^2 outside the active span, v^2 inside).
    v2: Vec<f64>,
    t: f64,
    a: Vec<f64>,
    ad: Vec<f64>,
    psi0: Vec<C64>,
    psi1: Vec<C64>,
    /// Cached acceleration at (a, chi(now)); the last substep's final
    /// evaluation doubles as the next substep's initial one.
    acc: Option<Vec<f64>>,
    /// Static susceptibility; when set, qubits are no longer evolved.
    frozen: Option<Vec<f64>>,
}

/// Per-site squared wave speed for the given layout.
pub fn speeds_squared(layout: &LatticeLayout, medium: &MediumParams) -> Vec<f64> {
    (0..layout.n_total)
        .map(|i| {
            let s = if layout.is_active(i) {
                medium.v_tilde
            } else {
                medium.u_tilde
            };
            s * s
        })
        .collect()
}

/// Field energy of `state` over sites [lo, hi); the bond to the right of a
/// site belongs to that site.
pub fn region_energy(
    state: &SimState,
    layout: &LatticeLayout,
    medium: &MediumParams,
    lo: usize,
    hi: usize,
) -> f64 {
    let n = state.a.len();
    let hi = hi.min(n);
    let v2 = speeds_squared(layout, medium);
    let mut e = 0.0;
    #[allow(clippy::needless_range_loop)]
    for i in lo..hi {
        e += 0.5 * state.a_dot[i] * state.a_dot[i];
        if i + 1 < n {
            let d = state.a[i + 1] - state.a[i];
            e += 0.5 * v2[i] * d * d;
        }
    }
    e
}

/// Hermite basis on [0, 1] evaluated at sigma.
fn hermite_basis(sigma: f64) -> [f64; 4] {
    let s2 = sigma * sigma;
    let s3 = s2 * sigma;
    [
        2.0 * s3 - 3.0 * s2 + 1.0,
        s3 - 2.0 * s2 + sigma,
        -2.0 * s3 + 3.0 * s2,
        s3 - s2,
    ]
}

impl Integrator {
    pub fn new(
        layout: LatticeLayout,
        qubit: QubitParams,
        medium: MediumParams,
        dt: f64,
        state: SimState,
    ) -> Result<Self> {
        layout.validate()?;
        qubit.validate()?;
        medium.validate()?;
        state.check_consistent(&layout)?;
        if !(dt > 0.0) {
            return Err(Error::Config(format!("dt must be > 0, got {dt}")));
        }
        let vmax = medium.v_tilde.max(medium.u_tilde);
        if dt * vmax > MAX_COURANT * (1.0 + 1e-9) {
            return Err(Error::Cfl(format!(
                "dt = {dt} exceeds the Courant bound {MAX_COURANT} / max speed = {}",
                MAX_COURANT / vmax
            )));
        }
        if dt * qubit.epsilon > MAX_EPS_STEP * (1.0 + 1e-9) {
            return Err(Error::Cfl(format!(
                "dt = {dt} exceeds the qubit phase bound {}",
                MAX_EPS_STEP / qubit.epsilon
            )));
        }
        let dev = state.max_norm_deviation();
        if dev > 1e-6 {
            return Err(Error::NormViolation(format!(
                "initial qubit norm deviates by {dev:.2e}"
            )));
        }

        let v2 = speeds_squared(&layout, &medium);
        let half = 0.5 * qubit.epsilon * state.t;
        let fwd = C64::from_polar(1.0, half);
        let psi0 = state.c0.iter().map(|c| c * fwd).collect();
        let psi1 = state.c1.iter().map(|c| c * fwd.conj()).collect();
        Ok(Integrator {
            layout,
            qubit,
            medium,
            dt,
            v2,
            t: state.t,
            a: state.a,
            ad: state.a_dot,
            psi0,
            psi1,
            acc: None,
            frozen: None,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn layout(&self) -> &LatticeLayout {
        &self.layout
    }

    pub fn field(&self) -> &[f64] {
        &self.a
    }

    pub fn field_velocity(&self) -> &[f64] {
        &self.ad
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen.is_some()
    }

    /// Excited-level population per active site.
    pub fn populations(&self) -> Vec<f64> {
        self.psi1.iter().map(|p| p.norm_sqr()).collect()
    }

    pub fn max_norm_deviation(&self) -> f64 {
        self.psi0
            .iter()
            .zip(&self.psi1)
            .map(|(p0, p1)| (p0.norm_sqr() + p1.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Susceptibility the field currently sees, one value per active site.
    pub fn chi_snapshot(&self) -> Vec<f64> {
        match &self.frozen {
            Some(chi) => chi.clone(),
            None => self.chi_live(),
        }
    }

    /// Pin the susceptibility to its population part (the oscillating
    /// interference term is dropped) and stop evolving the qubits.
    pub fn freeze_static_chi(&mut self) {
        let scale = self.medium.r / self.qubit.e_j;
        let chi = self
            .psi0
            .iter()
            .zip(&self.psi1)
            .map(|(p0, p1)| scale * (self.qubit.d00 * p0.norm_sqr() + self.qubit.d11 * p1.norm_sqr()))
            .collect();
        self.frozen = Some(chi);
        self.acc = None;
    }

    /// State in the lab frame; populations and norms match the internal ones.
    pub fn state(&self) -> SimState {
        let half = 0.5 * self.qubit.epsilon * self.t;
        let back = C64::from_polar(1.0, -half);
        SimState {
            t: self.t,
            a: self.a.clone(),
            a_dot: self.ad.clone(),
            c0: self.psi0.iter().map(|p| p * back).collect(),
            c1: self.psi1.iter().map(|p| p * back.conj()).collect(),
        }
    }

    /// Field energy over sites [lo, hi).
    pub fn energy(&self, lo: usize, hi: usize) -> f64 {
        let n = self.a.len();
        let hi = hi.min(n);
        let mut e = 0.0;
        for i in lo..hi {
            e += 0.5 * self.ad[i] * self.ad[i];
            if i + 1 < n {
                let d = self.a[i + 1] - self.a[i];
                e += 0.5 * self.v2[i] * d * d;
            }
        }
        e
    }

    pub fn total_energy(&self) -> f64 {
        self.energy(0, self.a.len())
    }

    /// Advance one full composed step of length `dt`.
    pub fn step(&mut self) {
        self.substep(W1 * self.dt);
        self.substep(W0 * self.dt);
        self.substep(W1 * self.dt);
    }

    /// Step until within half a step of `t_end`; returns steps taken.
    pub fn run_to(&mut self, t_end: f64) -> usize {
        let mut steps = 0;
        while self.t < t_end - 0.5 * self.dt {
            self.step();
            steps += 1;
        }
        steps
    }

    fn chi_live(&self) -> Vec<f64> {
        let q = &self.qubit;
        let scale = self.medium.r / q.e_j;
        self.psi0
            .iter()
            .zip(&self.psi1)
            .map(|(p0, p1)| {
                scale
                    * (q.d00 * p0.norm_sqr()
                        + q.d11 * p1.norm_sqr()
                        + 2.0 * q.d01 * (p0.conj() * p1).re)
            })
            .collect()
    }

    fn accel(&self, a: &[f64], chi: &[f64]) -> Vec<f64> {
        let n = a.len();
        let mut acc = vec![0.0; n];
        for i in 1..n - 1 {
            acc[i] = self.v2[i] * (a[i + 1] + a[i - 1] - 2.0 * a[i]);
        }
        for (j, i) in (self.layout.active_start..self.layout.active_end).enumerate() {
            acc[i] -= a[i].sin() * chi[j];
        }
        acc
    }

    fn substep(&mut self, h: f64) {
        if self.acc.is_none() {
            let chi = self.chi_snapshot();
            self.acc = Some(self.accel(&self.a, &chi));
        }
        let acc = self.acc.take().expect("cache filled above");
        let n = self.a.len();
        let mut vh = vec![0.0; n];
        let mut anew = vec![0.0; n];
        for i in 0..n {
            vh[i] = self.ad[i] + 0.5 * h * acc[i];
            anew[i] = self.a[i] + h * vh[i];
        }

        if let Some(chi) = &self.frozen {
            let chi = chi.clone();
            let acc1 = self.accel(&anew, &chi);
            for i in 0..n {
                self.ad[i] = vh[i] + 0.5 * h * acc1[i];
            }
            self.a = anew;
            self.acc = Some(acc1);
            self.t += h;
            return;
        }

        let (s0, s1) = (self.layout.active_start, self.layout.active_end);
        let aq0 = self.a[s0..s1].to_vec();
        let adq0 = self.ad[s0..s1].to_vec();

        // Predictor: end-of-substep velocity from the current susceptibility.
        let chi_now = self.chi_live();
        let acc1p = self.accel(&anew, &chi_now);
        let adq1p: Vec<f64> = (s0..s1).map(|i| vh[i] + 0.5 * h * acc1p[i]).collect();
        let (q0p, q1p) = self.magnus_pair(h, &aq0, &adq0, &anew[s0..s1], &adq1p);

        // Corrector: susceptibility from the predicted qubit state refines the
        // end velocity, then the qubit step is redone from the original state.
        let scale = self.medium.r / self.qubit.e_j;
        let chi1: Vec<f64> = q0p
            .iter()
            .zip(&q1p)
            .map(|(p0, p1)| {
                scale
                    * (self.qubit.d00 * p0.norm_sqr()
                        + self.qubit.d11 * p1.norm_sqr()
                        + 2.0 * self.qubit.d01 * (p0.conj() * p1).re)
            })
            .collect();
        let acc1c = self.accel(&anew, &chi1);
        let adq1c: Vec<f64> = (s0..s1).map(|i| vh[i] + 0.5 * h * acc1c[i]).collect();
        let (p0n, p1n) = self.magnus_pair(h, &aq0, &adq0, &anew[s0..s1], &adq1c);
        self.psi0 = p0n;
        self.psi1 = p1n;

        let chi_fin = self.chi_live();
        let acc1 = self.accel(&anew, &chi_fin);
        for i in 0..n {
            self.ad[i] = vh[i] + 0.5 * h * acc1[i];
        }
        self.a = anew;
        self.acc = Some(acc1);
        self.t += h;
    }

    /// Propagate all qubit pairs over one substep of length `h` given the
    /// field endpoints and end-slopes on the active span.
    fn magnus_pair(
        &self,
        h: f64,
        aq0: &[f64],
        adq0: &[f64],
        aq1: &[f64],
        adq1: &[f64],
    ) -> (Vec<C64>, Vec<C64>) {
        let s3 = 3.0_f64.sqrt();
        let b1 = hermite_basis(0.5 - s3 / 6.0);
        let b2 = hermite_basis(0.5 + s3 / 6.0);
        let q = &self.qubit;
        let dd = 0.5 * (q.d00 - q.d11);
        let dp = 0.5 * (q.d00 + q.d11);
        let na = aq0.len();
        let mut out0 = Vec::with_capacity(na);
        let mut out1 = Vec::with_capacity(na);
        for j in 0..na {
            let field_at = |b: &[f64; 4]| {
                b[0] * aq0[j] + b[1] * h * adq0[j] + b[2] * aq1[j] + b[3] * h * adq1[j]
            };
            let a1s = field_at(&b1).powi(2);
            let a2s = field_at(&b2).powi(2);
            let sum = a1s + a2s;
            let k0 = 0.5 * h * dp * sum;
            let kx = 0.5 * h * q.d01 * sum;
            let kz = 0.5 * h * (-q.epsilon + dd * sum);
            let ky = -(s3 * h * h * q.epsilon * q.d01 / 12.0) * (a1s - a2s);
            let km = (kx * kx + ky * ky + kz * kz).sqrt();
            let (sn, cs) = km.sin_cos();
            let f = if km > 0.0 { sn / km } else { 0.0 };
            let ph = C64::from_polar(1.0, -k0);
            let p0 = self.psi0[j];
            let p1 = self.psi1[j];
            let i = C64::new(0.0, 1.0);
            out0.push(ph * ((cs - i * f * kz) * p0 - i * f * C64::new(kx, -ky) * p1));
            out1.push(ph * (-i * f * C64::new(kx, ky) * p0 + (cs + i * f * kz) * p1));
        }
        (out0, out1)
    }
}
