//! Scenario drivers behind the CLI subcommands.
//!
//! Each driver resolves the sparse [`Config`] against its own defaults (the
//! canonical experiment geometry), runs the simulation or oracle, writes the
//! artifacts into an output directory, and returns a serializable summary.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::analysis::{self, ChiFit, PeriodEstimate};
use crate::config::{Config, Mode};
use crate::dynamics::Integrator;
use crate::error::{Error, Result};
use crate::model::{ChiProfile, LatticeLayout, MediumParams, QubitParams, SimState};
use crate::oracles;
use crate::output::{self, fmt_f64, params_json, CsvWriter};
use crate::pulses::{synthesize, Direction, PulseSpec};

const TAU: f64 = std::f64::consts::TAU;

/// Sites between an injection center and the nearest active interface.
const LAUNCH_OFFSET: f64 = 300.0;
/// Plane-wave basis size for band solves; converged far beyond output digits.
const BANDS_TRUNCATION: usize = 16;

fn record_field(csv: &mut CsvWriter, sim: &Integrator) {
    let t = fmt_f64(sim.time());
    let a = sim.field();
    let ad = sim.field_velocity();
    for i in 0..a.len() {
        csv.row(&[t.clone(), i.to_string(), fmt_f64(a[i]), fmt_f64(ad[i])]);
    }
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Config(format!(
            "{name} must be a positive finite number, got {x}"
        )));
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// prime

#[derive(Debug, Clone, Serialize)]
pub struct PrimeParams {
    pub layout: LatticeLayout,
    pub medium: MediumParams,
    pub qubit: QubitParams,
    pub right_moving: PulseSpec,
    pub left_moving: PulseSpec,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
}

pub fn resolve_prime(cfg: &Config) -> Result<PrimeParams> {
    let layout = cfg.lattice.resolve(2048, 512)?;
    let medium = cfg.medium.resolve(&MediumParams::default())?;
    let qubit = cfg.qubit.resolve(&QubitParams::default())?;
    let p = &cfg.pulses;
    let amplitude = p.amplitude.unwrap_or(0.18);
    let wavenumber = p.wavenumber.unwrap_or(TAU / 25.0);
    let omega = p.omega.unwrap_or(medium.v_tilde * wavenumber);
    let width = p.width.unwrap_or(240.0);
    let phase = p.phase.unwrap_or(0.0);
    let center_left = p
        .center_left
        .unwrap_or(layout.active_start as f64 - LAUNCH_OFFSET);
    let center_right = p
        .center_right
        .unwrap_or((layout.active_end - 1) as f64 + LAUNCH_OFFSET);
    let right_moving = PulseSpec {
        amplitude,
        wavenumber,
        omega,
        center: center_left,
        width,
        direction: Direction::Right,
        phase: 0.0,
    };
    // The left-moving pulse carries the relative phase.
    let left_moving = PulseSpec {
        center: center_right,
        direction: Direction::Left,
        phase,
        ..right_moving
    };
    right_moving.validate()?;
    left_moving.validate()?;
    Ok(PrimeParams {
        layout,
        medium,
        qubit,
        right_moving,
        left_moving,
        dt: positive("run.dt", cfg.run.dt.unwrap_or(0.02))?,
        t_end: positive("run.t_end", cfg.run.t_end.unwrap_or(450.0))?,
        snapshot_stride: cfg.run.snapshot_stride.unwrap_or(500).max(1),
    })
}

/// In-memory result of one priming run.
pub struct PrimeOutcome {
    pub populations: Vec<f64>,
    pub final_state: SimState,
    pub period: Result<PeriodEstimate>,
    pub chi_fit: Result<ChiFit>,
    pub max_population: f64,
    pub norm_deviation: f64,
    pub steps: usize,
}

/// Runs the priming simulation, optionally recording field snapshots.
pub fn prime_core(p: &PrimeParams, mut snapshots: Option<&mut CsvWriter>) -> Result<PrimeOutcome> {
    let mut state = SimState::new(&p.layout);
    synthesize(&p.right_moving, &mut state)?;
    synthesize(&p.left_moving, &mut state)?;
    let mut sim = Integrator::new(p.layout, p.qubit, p.medium, p.dt, state)?;
    let n_steps = (p.t_end / p.dt).round() as usize;
    if let Some(csv) = snapshots.as_deref_mut() {
        record_field(csv, &sim);
    }
    for s in 1..=n_steps {
        sim.step();
        if s % p.snapshot_stride == 0 || s == n_steps {
            if let Some(csv) = snapshots.as_deref_mut() {
                record_field(csv, &sim);
            }
        }
    }
    let populations = sim.populations();
    let max_population = populations.iter().copied().fold(0.0, f64::max);
    let norm_deviation = sim.max_norm_deviation();
    let final_state = sim.state();
    let period = analysis::modulation_period(&populations);
    let chi_fit = analysis::fit_chi_profile(&final_state, &p.layout, &p.qubit, &p.medium);
    Ok(PrimeOutcome {
        populations,
        final_state,
        period,
        chi_fit,
        max_population,
        norm_deviation,
        steps: n_steps,
    })
}

#[derive(Debug, Serialize)]
pub struct PrimeSummary {
    pub params: PrimeParams,
    pub steps: usize,
    pub t_final: f64,
    pub max_population: f64,
    pub norm_deviation: f64,
    pub period: Option<PeriodEstimate>,
    pub period_error: Option<String>,
    pub chi_fit: Option<ChiFit>,
    pub chi_fit_error: Option<String>,
}

pub fn run_prime(cfg: &Config, out_dir: &Path) -> Result<PrimeSummary> {
    let p = resolve_prime(cfg)?;
    let echo = params_json(&p);
    let mut field_csv = CsvWriter::new("prime", &echo, &["t", "site", "a", "a_dot"]);
    let outcome = prime_core(&p, Some(&mut field_csv))?;
    field_csv.write(&out_dir.join("field_snapshots.csv"))?;

    let mut pop_csv = CsvWriter::new("prime", &echo, &["site", "p1"]);
    for (j, &v) in outcome.populations.iter().enumerate() {
        pop_csv.row(&[(p.layout.active_start + j).to_string(), fmt_f64(v)]);
    }
    pop_csv.write(&out_dir.join("populations.csv"))?;

    output::save_register(
        &out_dir.join("state_final.csv"),
        &outcome.final_state,
        &p.layout,
        "prime",
        &echo,
    )?;

    let (period, period_err) = match outcome.period {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e)),
    };
    let (chi_fit, chi_err) = match outcome.chi_fit {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e)),
    };
    let summary = PrimeSummary {
        params: p,
        steps: outcome.steps,
        t_final: outcome.final_state.t,
        max_population: outcome.max_population,
        norm_deviation: outcome.norm_deviation,
        period,
        period_error: period_err.as_ref().map(|e| e.to_string()),
        chi_fit,
        chi_fit_error: chi_err.as_ref().map(|e| e.to_string()),
    };
    output::write_json(&out_dir.join("summary.json"), &summary)?;
    // A register with no usable pattern is an error, but only after every
    // artifact that does exist has been written.
    if let Some(e) = period_err {
        return Err(e);
    }
    if let Some(e) = chi_err {
        return Err(e);
    }
    Ok(summary)
}

// ---------------------------------------------------------------------------
// probe

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum RegisterSource {
    /// p(z) = p_max cos^2(pi (z - active_start) / l_m), real amplitudes.
    Synthetic { p_max: f64, l_m: f64 },
    File { path: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeParams {
    pub layout: LatticeLayout,
    pub medium: MediumParams,
    pub qubit: QubitParams,
    pub mode: Mode,
    pub omegas: Vec<f64>,
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
    pub phase: f64,
    /// Explicit carrier wavenumber; default matches the lattice dispersion.
    pub wavenumber_override: Option<f64>,
    pub register: RegisterSource,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
}

/// Wavenumber whose lattice dispersion in the passive medium equals `omega`.
fn lattice_wavenumber(omega: f64, u_tilde: f64) -> Result<f64> {
    let x = omega / (2.0 * u_tilde);
    if !(x > 0.0) || x >= 1.0 {
        return Err(Error::Unphysical(format!(
            "carrier omega {omega} outside the passive band (0, {})",
            2.0 * u_tilde
        )));
    }
    Ok(2.0 * x.asin())
}

pub fn resolve_probe(cfg: &Config, mode_override: Option<Mode>) -> Result<ProbeParams> {
    let layout = cfg.lattice.resolve(4096, 512)?;
    let medium = cfg.medium.resolve(&MediumParams::default())?;
    let qubit = cfg.qubit.resolve(&QubitParams::default())?;
    let mode = mode_override.or(cfg.run.mode).unwrap_or(Mode::Frozen);
    let omegas = match cfg.probe.omega {
        Some(w) => vec![positive("probe.omega", w)?],
        None => vec![0.5 * qubit.epsilon, 0.6 * qubit.epsilon],
    };
    let register = match &cfg.probe.state_file {
        Some(path) => RegisterSource::File {
            path: path.display().to_string(),
        },
        None => {
            let p_max = cfg.probe.p_max.unwrap_or(0.5);
            if !(0.0..=1.0).contains(&p_max) {
                return Err(Error::Config(format!(
                    "probe.p_max must lie in [0, 1], got {p_max}"
                )));
            }
            let l_m = match cfg.probe.l_m {
                Some(l) => positive("probe.l_m", l)?,
                None => {
                    // Put the center of the first gap at half the splitting.
                    let scale = medium.r / qubit.e_j;
                    let mean_chi = scale * (qubit.d00 + 0.5 * (qubit.d11 - qubit.d00) * p_max);
                    let half = 0.5 * qubit.epsilon;
                    let arg = half * half - mean_chi;
                    if arg <= 0.0 {
                        return Err(Error::Config(format!(
                            "mean susceptibility {mean_chi} exceeds the squared half-splitting; \
                             give probe.l_m explicitly"
                        )));
                    }
                    PI * medium.v_tilde / arg.sqrt()
                }
            };
            RegisterSource::Synthetic { p_max, l_m }
        }
    };
    Ok(ProbeParams {
        layout,
        medium,
        qubit,
        mode,
        omegas,
        amplitude: cfg.pulses.amplitude.unwrap_or(2e-3),
        width: cfg.pulses.width.unwrap_or(240.0),
        center: cfg
            .pulses
            .center_left
            .unwrap_or(layout.active_start as f64 - 500.0),
        phase: cfg.pulses.phase.unwrap_or(0.0),
        wavenumber_override: cfg.pulses.wavenumber,
        register,
        dt: positive("run.dt", cfg.run.dt.unwrap_or(0.02))?,
        t_end: positive("run.t_end", cfg.run.t_end.unwrap_or(900.0))?,
        snapshot_stride: cfg.run.snapshot_stride.unwrap_or(2500).max(1),
    })
}

pub fn build_register(p: &ProbeParams) -> Result<SimState> {
    match &p.register {
        RegisterSource::File { path } => output::load_register(Path::new(path), &p.layout),
        RegisterSource::Synthetic { p_max, l_m } => {
            let mut st = SimState::new(&p.layout);
            for j in 0..p.layout.n_active() {
                let pop = p_max * (PI * j as f64 / l_m).cos().powi(2);
                st.c0[j] = C64::new((1.0 - pop).sqrt(), 0.0);
                st.c1[j] = C64::new(pop.sqrt(), 0.0);
            }
            Ok(st)
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapWindow {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRun {
    pub omega: f64,
    pub wavenumber: f64,
    pub transmitted: f64,
    pub reflected: f64,
    pub loss: f64,
    pub norm_deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct ProbeSummary {
    pub params: ProbeParams,
    pub register_fit: Option<ChiFit>,
    pub register_fit_error: Option<String>,
    /// First-gap edges of the fitted profile, when one exists.
    pub gap: Option<GapWindow>,
    pub runs: Vec<ProbeRun>,
}

pub fn run_probe(cfg: &Config, mode_override: Option<Mode>, out_dir: &Path) -> Result<ProbeSummary> {
    let p = resolve_probe(cfg, mode_override)?;
    let echo = params_json(&p);
    let base = build_register(&p)?;

    let (register_fit, register_fit_error) =
        match analysis::fit_chi_profile(&base, &p.layout, &p.qubit, &p.medium) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
    let gap = match &register_fit {
        Some(f) if f.profile.l_m.is_finite() && f.profile.chi_tilde > 0.0 => {
            let bs = oracles::bloch_bands(&[], &f.profile, &p.medium, BANDS_TRUNCATION)?;
            let g = bs.gaps[0];
            Some(GapWindow {
                lo: g.center - 0.5 * g.width,
                hi: g.center + 0.5 * g.width,
            })
        }
        _ => None,
    };

    let mut runs = Vec::new();
    for &omega in &p.omegas {
        let wavenumber = match p.wavenumber_override {
            Some(k) => positive("pulses.wavenumber", k)?,
            None => lattice_wavenumber(omega, p.medium.u_tilde)?,
        };
        let spec = PulseSpec {
            amplitude: p.amplitude,
            wavenumber,
            omega,
            center: p.center,
            width: p.width,
            direction: Direction::Right,
            phase: p.phase,
        };
        let mut st = base.clone();
        synthesize(&spec, &mut st)?;
        let initial = st.clone();
        let mut sim = Integrator::new(p.layout, p.qubit, p.medium, p.dt, st)?;
        if p.mode == Mode::Frozen {
            sim.freeze_static_chi();
        }
        let n_steps = (p.t_end / p.dt).round() as usize;
        let mut csv = CsvWriter::new("probe", &echo, &["t", "site", "a", "a_dot"]);
        record_field(&mut csv, &sim);
        for s in 1..=n_steps {
            sim.step();
            if s % p.snapshot_stride == 0 || s == n_steps {
                record_field(&mut csv, &sim);
            }
        }
        csv.write(&out_dir.join(format!("field_w{}.csv", fmt_f64(omega))))?;
        let final_state = sim.state();
        let tr = analysis::transmission(&initial, &final_state, &p.layout, &p.medium)?;
        runs.push(ProbeRun {
            omega,
            wavenumber,
            transmitted: tr.transmitted,
            reflected: tr.reflected,
            loss: tr.loss,
            norm_deviation: sim.max_norm_deviation(),
        });
    }

    let summary = ProbeSummary {
        params: p,
        register_fit,
        register_fit_error,
        gap,
        runs,
    };
    output::write_json(&out_dir.join("transmission.json"), &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// bands

#[derive(Debug, Clone, Serialize)]
pub struct BandsParams {
    pub medium: MediumParams,
    pub qubit: QubitParams,
    pub profile: ChiProfile,
    pub truncation: usize,
    pub n_k: usize,
}

#[derive(Debug, Serialize)]
pub struct BandsSummary {
    pub params: BandsParams,
    /// Present when the profile came from a register file.
    pub fit: Option<ChiFit>,
    pub gaps: Vec<oracles::GapInfo>,
    pub first_gap: oracles::GapResolution,
    pub k_edge: f64,
    /// Unperturbed edge frequency sqrt((v k_edge)^2 + W0); the first gap
    /// center sits near it.
    pub omega1_reference: f64,
}

pub fn run_bands(cfg: &Config, out_dir: &Path) -> Result<BandsSummary> {
    let medium = cfg.medium.resolve(&MediumParams::default())?;
    let qubit = cfg.qubit.resolve(&QubitParams::default())?;
    let (profile, fit) = match &cfg.chi.state_file {
        Some(path) => {
            let layout = cfg.lattice.resolve(4096, 512)?;
            let st = output::load_register(path, &layout)?;
            let fit = analysis::fit_chi_profile(&st, &layout, &qubit, &medium)?;
            (fit.profile, Some(fit))
        }
        None => (
            ChiProfile {
                chi0: cfg.chi.chi0.unwrap_or(0.02),
                chi_tilde: cfg.chi.chi_tilde.unwrap_or(0.04),
                l_m: cfg.chi.l_m.unwrap_or(12.5),
            },
            None,
        ),
    };
    profile.validate()?;
    if !profile.l_m.is_finite() {
        return Err(Error::Precondition(
            "register is uniform; band structure needs a finite modulation period".into(),
        ));
    }
    let n_k = 161;
    let k_max = TAU / profile.l_m;
    let k_list: Vec<f64> = (0..n_k)
        .map(|i| k_max * i as f64 / (n_k - 1) as f64)
        .collect();
    let bs = oracles::bloch_bands(&k_list, &profile, &medium, BANDS_TRUNCATION)?;
    let first_gap = oracles::resolve_first_gap(&profile, &medium, BANDS_TRUNCATION)?;

    let params = BandsParams {
        medium,
        qubit,
        profile,
        truncation: BANDS_TRUNCATION,
        n_k,
    };
    let echo = params_json(&params);
    let n_branches = bs.samples[0].omegas.len().min(6);
    let names: Vec<String> = std::iter::once("k".to_string())
        .chain((1..=n_branches).map(|b| format!("omega_{b}")))
        .collect();
    let header: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut exact = CsvWriter::new("bands", &echo, &header);
    for s in &bs.samples {
        let mut row = vec![s.k];
        row.extend_from_slice(&s.omegas[..n_branches]);
        exact.row_f64(&row);
    }
    exact.write(&out_dir.join("bands_exact.csv"))?;

    let mut pert = CsvWriter::new("bands", &echo, &["k", "omega_minus", "omega_plus"]);
    for &k in &k_list {
        let (lo, hi) = oracles::dispersion_perturbative(k, &profile, &medium)?;
        pert.row_f64(&[k, lo, hi]);
    }
    pert.write(&out_dir.join("bands_perturbative.csv"))?;

    let k_edge = PI / profile.l_m;
    let w0 = profile.chi0 + profile.chi_tilde;
    let summary = BandsSummary {
        params,
        fit,
        gaps: bs.gaps,
        first_gap,
        k_edge,
        omega1_reference: ((medium.v_tilde * k_edge).powi(2) + w0).sqrt(),
    };
    output::write_json(&out_dir.join("gaps.json"), &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// rabi-check

#[derive(Debug, Clone, Serialize)]
pub struct RabiParams {
    pub layout: LatticeLayout,
    pub medium: MediumParams,
    pub qubit: QubitParams,
    pub amplitude: f64,
    pub wavenumber: f64,
    pub omega: f64,
    pub width: f64,
    pub center: f64,
    pub phase: f64,
    /// Two-carrier-quanta detuning from the splitting.
    pub delta: f64,
    /// Standing-wave phase in absolute site coordinates.
    pub oracle_phase: f64,
    /// Generalized flopping frequency at an antinode.
    pub rabi_frequency: f64,
    pub dt: f64,
    pub t_end: f64,
    pub n_samples: usize,
    pub window: (usize, usize),
}

pub fn resolve_rabi(cfg: &Config) -> Result<RabiParams> {
    let layout = cfg.lattice.resolve(8192, 512)?;
    let qubit = cfg.qubit.resolve(&QubitParams::default())?;
    let wavenumber = positive(
        "pulses.wavenumber",
        cfg.pulses.wavenumber.unwrap_or(TAU / 25.0),
    )?;
    let omega = positive(
        "pulses.omega",
        cfg.pulses.omega.unwrap_or(0.5 * qubit.epsilon),
    )?;
    // Default medium puts the carrier exactly on the lattice dispersion and
    // removes back-action so the flopping formula applies cleanly.
    let v_resonant = omega / (2.0 * (0.5 * wavenumber).sin());
    let medium = cfg.medium.resolve(&MediumParams {
        v_tilde: v_resonant,
        u_tilde: v_resonant,
        r: 0.0,
    })?;
    let amplitude = cfg.pulses.amplitude.unwrap_or(0.1);
    let width = cfg.pulses.width.unwrap_or(3000.0);
    let phase = cfg.pulses.phase.unwrap_or(0.0);
    // Both pulses share a center; snap the default to the node lattice so the
    // pattern lines up with integer sites the same way for any layout.
    let half_wave = PI / wavenumber;
    let mid = 0.5 * (layout.active_start + layout.active_end) as f64;
    let center = cfg
        .pulses
        .center_left
        .or(cfg.pulses.center_right)
        .unwrap_or_else(|| (mid / half_wave).round() * half_wave);
    let delta = 2.0 * omega - qubit.epsilon;
    let a2 = amplitude * amplitude;
    let drive = 4.0 * qubit.d01.abs() * a2;
    let detune = delta + 8.0 * a2 * (qubit.d00 - qubit.d11);
    let rabi_frequency = (drive * drive + 0.25 * detune * detune).sqrt();
    let t_end = match cfg.run.t_end {
        Some(t) => positive("run.t_end", t)?,
        None => {
            if rabi_frequency <= 0.0 {
                return Err(Error::Config(
                    "drive is degenerate at the antinode; give run.t_end explicitly".into(),
                ));
            }
            3.0 * TAU / rabi_frequency
        }
    };
    let c = center.round() as i64;
    let window = (
        (c - 100).max(layout.active_start as i64) as usize,
        (c + 100).min(layout.active_end as i64) as usize,
    );
    if window.0 >= window.1 {
        return Err(Error::Config(
            "comparison window misses the active span; move pulses.center_left".into(),
        ));
    }
    Ok(RabiParams {
        layout,
        medium,
        qubit,
        amplitude,
        wavenumber,
        omega,
        width,
        center,
        phase,
        delta,
        oracle_phase: phase - 2.0 * wavenumber * center,
        rabi_frequency,
        dt: positive("run.dt", cfg.run.dt.unwrap_or(0.02))?,
        t_end,
        n_samples: 10,
        window,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RabiSample {
    pub t: f64,
    pub max_abs_error: f64,
    /// Largest |c1| among near-node sites in the window.
    pub node_max: f64,
}

#[derive(Debug, Serialize)]
pub struct RabiSummary {
    pub params: RabiParams,
    pub samples: Vec<RabiSample>,
    pub max_abs_error: f64,
    pub node_max: f64,
    pub norm_deviation: f64,
}

/// Sites this close to a node (by drive intensity) feed the node metric.
const NODE_INTENSITY: f64 = 0.01;

pub fn run_rabi_check(cfg: &Config, out_dir: &Path) -> Result<RabiSummary> {
    let p = resolve_rabi(cfg)?;
    let echo = params_json(&p);
    let mut state = SimState::new(&p.layout);
    let base = PulseSpec {
        amplitude: p.amplitude,
        wavenumber: p.wavenumber,
        omega: p.omega,
        center: p.center,
        width: p.width,
        direction: Direction::Right,
        phase: 0.0,
    };
    synthesize(&base, &mut state)?;
    synthesize(
        &PulseSpec {
            direction: Direction::Left,
            phase: p.phase,
            ..base
        },
        &mut state,
    )?;
    let mut sim = Integrator::new(p.layout, p.qubit, p.medium, p.dt, state)?;

    let mut samples = Vec::new();
    let mut profile_csv = CsvWriter::new("rabi-check", &echo, &["site", "sim_c1", "oracle_c1"]);
    let (mut max_err, mut node_max) = (0.0f64, 0.0f64);
    for i in 1..=p.n_samples {
        let target = p.t_end * i as f64 / p.n_samples as f64;
        sim.run_to(target);
        let t = sim.time();
        let pops = sim.populations();
        let (mut err_i, mut node_i) = (0.0f64, 0.0f64);
        for site in p.window.0..p.window.1 {
            let z = site as f64;
            let sim_c1 = pops[site - p.layout.active_start].sqrt();
            let oracle = oracles::rabi_profile(
                z,
                t,
                p.amplitude,
                p.wavenumber,
                p.oracle_phase,
                p.delta,
                &p.qubit,
            );
            err_i = err_i.max((sim_c1 - oracle).abs());
            if (2.0 * p.wavenumber * z + p.oracle_phase).cos() + 1.0 < NODE_INTENSITY {
                node_i = node_i.max(sim_c1);
            }
            if i == p.n_samples {
                profile_csv.row(&[site.to_string(), fmt_f64(sim_c1), fmt_f64(oracle)]);
            }
        }
        samples.push(RabiSample {
            t,
            max_abs_error: err_i,
            node_max: node_i,
        });
        max_err = max_err.max(err_i);
        node_max = node_max.max(node_i);
    }
    profile_csv.write(&out_dir.join("rabi_profile.csv"))?;
    let summary = RabiSummary {
        params: p,
        samples,
        max_abs_error: max_err,
        node_max,
        norm_deviation: sim.max_norm_deviation(),
    };
    output::write_json(&out_dir.join("rabi_check.json"), &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// qubit-spectrum

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectrumParams {
    pub ratio: f64,
    pub n_g: f64,
    pub truncation: usize,
}

#[derive(Debug, Serialize)]
pub struct SpectrumSummary {
    pub params: SpectrumParams,
    pub spectrum: oracles::QubitSpectrum,
}

pub fn run_qubit_spectrum(cfg: &Config, out_dir: &Path) -> Result<SpectrumSummary> {
    let ratio = cfg.spectrum.ratio.unwrap_or(4.0);
    let n_g = cfg.spectrum.n_g.unwrap_or(0.25);
    let truncation = cfg
        .spectrum
        .truncation
        .unwrap_or_else(|| oracles::auto_truncation(ratio));
    let spectrum = oracles::qubit_spectrum(ratio, n_g, truncation)?;
    let params = SpectrumParams {
        ratio,
        n_g,
        truncation,
    };
    let echo = params_json(&params);
    let mut csv = CsvWriter::new("qubit-spectrum", &echo, &["index", "energy"]);
    for (i, &e) in spectrum.levels.iter().enumerate() {
        csv.row(&[i.to_string(), fmt_f64(e)]);
    }
    csv.write(&out_dir.join("levels.csv"))?;
    let summary = SpectrumSummary { params, spectrum };
    output::write_json(&out_dir.join("qubit_spectrum.json"), &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    Amplitude,
    Wavenumber,
    Phase,
    R,
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "amplitude" => Ok(SweepParameter::Amplitude),
            "wavenumber" => Ok(SweepParameter::Wavenumber),
            "phase" => Ok(SweepParameter::Phase),
            "r" => Ok(SweepParameter::R),
            other => Err(Error::Config(format!(
                "sweep.parameter must be one of amplitude, wavenumber, phase, r; got '{other}'"
            ))),
        }
    }
}

fn apply_sweep_value(cfg: &Config, parameter: SweepParameter, value: f64) -> Config {
    let mut c = cfg.clone();
    match parameter {
        SweepParameter::Amplitude => c.pulses.amplitude = Some(value),
        SweepParameter::Wavenumber => c.pulses.wavenumber = Some(value),
        SweepParameter::Phase => c.pulses.phase = Some(value),
        SweepParameter::R => c.medium.r = Some(value),
    }
    c
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub value: f64,
    /// NaN (null in JSON) when no period could be extracted.
    pub period: f64,
    pub uncertainty: f64,
    pub n_peaks: usize,
    pub max_population: f64,
    pub chi_tilde: f64,
}

#[derive(Debug, Serialize)]
pub struct SweepSummary {
    pub parameter: SweepParameter,
    pub rows: Vec<SweepRow>,
}

pub fn run_sweep(cfg: &Config, out_dir: &Path) -> Result<SweepSummary> {
    let parameter: SweepParameter = cfg
        .sweep
        .parameter
        .as_deref()
        .ok_or_else(|| Error::Config("sweep.parameter is required".into()))?
        .parse()?;
    let values = cfg
        .sweep
        .values
        .clone()
        .ok_or_else(|| Error::Config("sweep.values is required".into()))?;
    if values.is_empty() {
        return Err(Error::Config("sweep.values must not be empty".into()));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Config(format!("sweep value {bad} is not finite")));
    }
    // Resolve every point up front so configuration mistakes surface before
    // any simulation starts.
    let params: Vec<PrimeParams> = values
        .iter()
        .map(|&v| resolve_prime(&apply_sweep_value(cfg, parameter, v)))
        .collect::<Result<_>>()?;

    let n_workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(params.len());
    let results: Vec<Result<PrimeOutcome>> = std::thread::scope(|scope| {
        let params = &params;
        let handles: Vec<_> = (0..n_workers)
            .map(|w| {
                scope.spawn(move || {
                    let mut done = Vec::new();
                    let mut i = w;
                    while i < params.len() {
                        done.push((i, prime_core(&params[i], None)));
                        i += n_workers;
                    }
                    done
                })
            })
            .collect();
        let mut slots: Vec<Option<Result<PrimeOutcome>>> =
            (0..params.len()).map(|_| None).collect();
        for h in handles {
            for (i, r) in h.join().expect("sweep worker panicked") {
                slots[i] = Some(r);
            }
        }
        slots
            .into_iter()
            .map(|s| s.expect("every sweep index is covered"))
            .collect()
    });

    let mut rows = Vec::new();
    for (i, res) in results.into_iter().enumerate() {
        let outcome = res?;
        let (period, uncertainty, n_peaks) = match outcome.period {
            Ok(p) => (p.period, p.uncertainty, p.n_peaks),
            Err(_) => (f64::NAN, f64::NAN, 0),
        };
        let chi_tilde = outcome
            .chi_fit
            .map(|f| f.profile.chi_tilde)
            .unwrap_or(f64::NAN);
        rows.push(SweepRow {
            value: values[i],
            period,
            uncertainty,
            n_peaks,
            max_population: outcome.max_population,
            chi_tilde,
        });
    }

    let summary = SweepSummary { parameter, rows };
    let echo = params_json(&summary.parameter);
    let mut csv = CsvWriter::new(
        "sweep",
        &echo,
        &["value", "period", "uncertainty", "n_peaks", "max_population", "chi_tilde"],
    );
    for r in &summary.rows {
        csv.row(&[
            fmt_f64(r.value),
            fmt_f64(r.period),
            fmt_f64(r.uncertainty),
            r.n_peaks.to_string(),
            fmt_f64(r.max_population),
            fmt_f64(r.chi_tilde),
        ]);
    }
    csv.write(&out_dir.join("sweep.csv"))?;
    output::write_json(&out_dir.join("sweep.json"), &summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_defaults_reproduce_canonical_geometry() {
        let p = resolve_prime(&Config::default()).unwrap();
        assert_eq!((p.layout.active_start, p.layout.active_end), (768, 1280));
        assert_eq!(p.right_moving.center, 468.0);
        assert_eq!(p.left_moving.center, 1579.0);
        assert!((p.right_moving.omega - 3.65 * TAU / 25.0).abs() < 1e-12);
        assert_eq!(p.right_moving.phase, 0.0);
        assert_eq!(p.dt, 0.02);
        assert_eq!(p.t_end, 450.0);
    }

    #[test]
    fn phase_override_lands_on_left_mover() {
        let mut cfg = Config::default();
        cfg.pulses.phase = Some(PI);
        let p = resolve_prime(&cfg).unwrap();
        assert_eq!(p.left_moving.phase, PI);
        assert_eq!(p.right_moving.phase, 0.0);
    }

    #[test]
    fn probe_designs_in_gap_period() {
        let p = resolve_probe(&Config::default(), None).unwrap();
        assert_eq!(p.mode, Mode::Frozen);
        assert_eq!(p.omegas, vec![0.5, 0.6]);
        match p.register {
            RegisterSource::Synthetic { p_max, l_m } => {
                assert_eq!(p_max, 0.5);
                assert!((l_m - 26.306_673_62).abs() < 1e-6, "l_m = {l_m}");
            }
            _ => panic!("expected synthetic register"),
        }
    }

    #[test]
    fn probe_mode_override_wins() {
        let mut cfg = Config::default();
        cfg.run.mode = Some(Mode::Frozen);
        let p = resolve_probe(&cfg, Some(Mode::Live)).unwrap();
        assert_eq!(p.mode, Mode::Live);
    }

    #[test]
    fn lattice_wavenumber_inverts_dispersion() {
        let u = 3.65;
        let k = lattice_wavenumber(0.5, u).unwrap();
        assert!((2.0 * u * (0.5 * k).sin() - 0.5).abs() < 1e-14);
        assert!(lattice_wavenumber(7.31, u).is_err());
        assert!(lattice_wavenumber(0.0, u).is_err());
    }

    #[test]
    fn rabi_defaults_sit_on_resonance() {
        let p = resolve_rabi(&Config::default()).unwrap();
        // Carrier at half the splitting, on the lattice dispersion.
        let lattice_omega = 2.0 * p.medium.v_tilde * (0.5 * p.wavenumber).sin();
        assert!((lattice_omega - 0.5).abs() < 1e-14);
        assert_eq!(p.delta, 0.0);
        assert!((p.center - 4100.0).abs() < 1e-9, "center {}", p.center);
        assert!((p.rabi_frequency - 0.128_250).abs() < 1e-5);
        assert!((p.t_end - 3.0 * TAU / p.rabi_frequency).abs() < 1e-9);
        assert_eq!(p.window, (4000, 4200));
        assert_eq!(p.medium.r, 0.0);
        // Absolute-coordinate oracle phase is a whole number of turns here.
        let turns = p.oracle_phase / TAU;
        assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn sweep_value_application() {
        let cfg = Config::default();
        let c = apply_sweep_value(&cfg, SweepParameter::Amplitude, 0.09);
        assert_eq!(c.pulses.amplitude, Some(0.09));
        let c = apply_sweep_value(&cfg, SweepParameter::R, 0.05);
        assert_eq!(c.medium.r, Some(0.05));
        assert!("period".parse::<SweepParameter>().is_err());
        assert_eq!(
            "wavenumber".parse::<SweepParameter>().unwrap(),
            SweepParameter::Wavenumber
        );
    }

    #[test]
    fn positive_guard() {
        assert!(positive("x", 1.0).is_ok());
        assert!(positive("x", 0.0).is_err());
        assert!(positive("x", -2.0).is_err());
        assert!(positive("x", f64::NAN).is_err());
        assert!(positive("x", f64::INFINITY).is_err());
    }
}
