//! Python bindings: a stateful `Simulation` class over the lattice
//! integrator plus direct wrappers for the analysis oracles.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use qmm::analysis;
use qmm::dynamics::Integrator;
use qmm::model::{
    derive_medium as derive_medium_rs, ChiProfile, LatticeLayout, MediumParams, PhysicalParams,
    QubitParams, SimState,
};
use qmm::oracles;
use qmm::pulses::{synthesize, Direction, PulseSpec};

fn py_err(e: qmm::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

enum Engine {
    /// Pulses and register edits are only legal before the first run.
    Pending {
        layout: LatticeLayout,
        qubit: QubitParams,
        medium: MediumParams,
        dt: f64,
        state: Box<SimState>,
    },
    Running(Box<Integrator>),
    Poisoned,
}

/// Time-domain simulation of the qubit-loaded transmission line.
#[pyclass]
struct Simulation {
    engine: Engine,
}

impl Simulation {
    fn integrator(&mut self) -> PyResult<&mut Integrator> {
        if let Engine::Pending { .. } = self.engine {
            match std::mem::replace(&mut self.engine, Engine::Poisoned) {
                Engine::Pending {
                    layout,
                    qubit,
                    medium,
                    dt,
                    state,
                } => {
                    let sim = Integrator::new(layout, qubit, medium, dt, *state).map_err(py_err)?;
                    self.engine = Engine::Running(Box::new(sim));
                }
                _ => unreachable!(),
            }
        }
        match &mut self.engine {
            Engine::Running(sim) => Ok(sim),
            Engine::Poisoned => Err(PyValueError::new_err(
                "simulation construction failed earlier; build a new one",
            )),
            Engine::Pending { .. } => unreachable!(),
        }
    }
}

#[pymethods]
impl Simulation {
    #[new]
    #[pyo3(signature = (n_total, active_start, active_end, dt,
                        v=3.65, u=3.65, r=0.1,
                        epsilon=1.0, d00=0.4, d01=0.2, d11=3.6, e_j=2.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        n_total: usize,
        active_start: usize,
        active_end: usize,
        dt: f64,
        v: f64,
        u: f64,
        r: f64,
        epsilon: f64,
        d00: f64,
        d01: f64,
        d11: f64,
        e_j: f64,
    ) -> PyResult<Self> {
        let layout = LatticeLayout::new(n_total, active_start, active_end).map_err(py_err)?;
        let medium = MediumParams {
            v_tilde: v,
            u_tilde: u,
            r,
        };
        let qubit = QubitParams {
            epsilon,
            d00,
            d01,
            d11,
            e_j,
        };
        let state = Box::new(SimState::new(&layout));
        Ok(Simulation {
            engine: Engine::Pending {
                layout,
                qubit,
                medium,
                dt,
                state,
            },
        })
    }

    /// Adds a traveling pulse to the initial condition (before the first run).
    #[pyo3(signature = (amplitude, wavenumber, omega, center, width, right=true, phase=0.0))]
    #[allow(clippy::too_many_arguments)]
    fn add_pulse(
        &mut self,
        amplitude: f64,
        wavenumber: f64,
        omega: f64,
        center: f64,
        width: f64,
        right: bool,
        phase: f64,
    ) -> PyResult<()> {
        match &mut self.engine {
            Engine::Pending { state, .. } => {
                let spec = PulseSpec {
                    amplitude,
                    wavenumber,
                    omega,
                    center,
                    width,
                    direction: if right { Direction::Right } else { Direction::Left },
                    phase,
                };
                synthesize(&spec, state).map_err(py_err)
            }
            _ => Err(PyValueError::new_err("pulses must be added before the first run")),
        }
    }

    /// Sets excited-state populations over the active sites (cos^2-style
    /// registers and primed patterns), real amplitudes.
    fn set_register(&mut self, populations: Vec<f64>) -> PyResult<()> {
        match &mut self.engine {
            Engine::Pending { state, layout, .. } => {
                if populations.len() != layout.n_active() {
                    return Err(PyValueError::new_err(format!(
                        "expected {} populations, got {}",
                        layout.n_active(),
                        populations.len()
                    )));
                }
                for (j, &p) in populations.iter().enumerate() {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(PyValueError::new_err(format!(
                            "population {p} at slot {j} outside [0, 1]"
                        )));
                    }
                    state.c0[j] = ((1.0 - p).sqrt()).into();
                    state.c1[j] = (p.sqrt()).into();
                }
                Ok(())
            }
            _ => Err(PyValueError::new_err("the register must be set before the first run")),
        }
    }

    /// Pins the susceptibility at its current per-site values.
    fn freeze(&mut self) -> PyResult<()> {
        self.integrator()?.freeze_static_chi();
        Ok(())
    }

    /// Advances to `t_end`; returns the number of steps taken.
    fn run(&mut self, t_end: f64) -> PyResult<usize> {
        Ok(self.integrator()?.run_to(t_end))
    }

    fn time(&mut self) -> PyResult<f64> {
        Ok(self.integrator()?.time())
    }

    fn field(&mut self) -> PyResult<Vec<f64>> {
        Ok(self.integrator()?.field().to_vec())
    }

    fn field_velocity(&mut self) -> PyResult<Vec<f64>> {
        Ok(self.integrator()?.field_velocity().to_vec())
    }

    /// Excited-state population per active site.
    fn populations(&mut self) -> PyResult<Vec<f64>> {
        Ok(self.integrator()?.populations())
    }

    /// Susceptibility per active site at the current instant.
    fn chi(&mut self) -> PyResult<Vec<f64>> {
        Ok(self.integrator()?.chi_snapshot())
    }

    fn norm_deviation(&mut self) -> PyResult<f64> {
        Ok(self.integrator()?.max_norm_deviation())
    }

    /// Field energy in sites `[lo, hi)`; the whole lattice by default.
    #[pyo3(signature = (lo=None, hi=None))]
    fn energy(&mut self, lo: Option<usize>, hi: Option<usize>) -> PyResult<f64> {
        let sim = self.integrator()?;
        match (lo, hi) {
            (None, None) => Ok(sim.total_energy()),
            _ => {
                let n = sim.layout().n_total;
                Ok(sim.energy(lo.unwrap_or(0), hi.unwrap_or(n)))
            }
        }
    }
}

/// Two lowest charge-qubit levels: splitting ratio and drive matrix elements.
#[pyfunction]
#[pyo3(signature = (e_j_over_hbar_omega_j, n_g=0.0, truncation=None))]
fn qubit_spectrum(
    py: Python<'_>,
    e_j_over_hbar_omega_j: f64,
    n_g: f64,
    truncation: Option<usize>,
) -> PyResult<Py<PyDict>> {
    let m = truncation.unwrap_or_else(|| oracles::auto_truncation(e_j_over_hbar_omega_j));
    let s = oracles::qubit_spectrum(e_j_over_hbar_omega_j, n_g, m).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("epsilon_over_omega_j", s.epsilon_over_omega_j)?;
    d.set_item("d00", s.d00)?;
    d.set_item("d01", s.d01)?;
    d.set_item("d11", s.d11)?;
    d.set_item("levels", s.levels)?;
    d.set_item("edge_support", s.edge_support)?;
    d.set_item("truncation", m)?;
    Ok(d.into())
}

/// |c1|(z, t) of a ground-state qubit under a standing-wave drive.
#[pyfunction]
#[pyo3(signature = (z, t, a, k, phi0=0.0, delta=0.0,
                    epsilon=1.0, d00=0.4, d01=0.2, d11=3.6, e_j=2.0))]
#[allow(clippy::too_many_arguments)]
fn rabi_profile(
    z: f64,
    t: f64,
    a: f64,
    k: f64,
    phi0: f64,
    delta: f64,
    epsilon: f64,
    d00: f64,
    d01: f64,
    d11: f64,
    e_j: f64,
) -> f64 {
    let q = QubitParams {
        epsilon,
        d00,
        d01,
        d11,
        e_j,
    };
    oracles::rabi_profile(z, t, a, k, phi0, delta, &q)
}

/// Bloch branches over `k_list` plus the detected gaps.
#[pyfunction]
#[pyo3(signature = (k_list, chi0, chi_tilde, l_m, v=3.65, truncation=16))]
fn bloch_bands(
    py: Python<'_>,
    k_list: Vec<f64>,
    chi0: f64,
    chi_tilde: f64,
    l_m: f64,
    v: f64,
    truncation: usize,
) -> PyResult<Py<PyDict>> {
    let chi = ChiProfile {
        chi0,
        chi_tilde,
        l_m,
    };
    let medium = MediumParams {
        v_tilde: v,
        u_tilde: v,
        r: 0.0,
    };
    let bs = oracles::bloch_bands(&k_list, &chi, &medium, truncation).map_err(py_err)?;
    let d = PyDict::new(py);
    let ks: Vec<f64> = bs.samples.iter().map(|s| s.k).collect();
    let omegas: Vec<Vec<f64>> = bs.samples.iter().map(|s| s.omegas.clone()).collect();
    d.set_item("k", ks)?;
    d.set_item("omegas", omegas)?;
    let gaps = PyList::empty(py);
    for g in &bs.gaps {
        let item = PyDict::new(py);
        item.set_item("index", g.index)?;
        item.set_item("center", g.center)?;
        item.set_item("width", g.width)?;
        gaps.append(item)?;
    }
    d.set_item("gaps", gaps)?;
    Ok(d.into())
}

/// First-gap width from the truncated Fourier operator against both
/// perturbative readings.
#[pyfunction]
#[pyo3(signature = (chi0, chi_tilde, l_m, v=3.65, truncation=16))]
fn resolve_first_gap(
    py: Python<'_>,
    chi0: f64,
    chi_tilde: f64,
    l_m: f64,
    v: f64,
    truncation: usize,
) -> PyResult<Py<PyDict>> {
    let chi = ChiProfile {
        chi0,
        chi_tilde,
        l_m,
    };
    let medium = MediumParams {
        v_tilde: v,
        u_tilde: v,
        r: 0.0,
    };
    let r = oracles::resolve_first_gap(&chi, &medium, truncation).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("hill", r.hill)?;
    d.set_item("perturbative_full", r.perturbative_full)?;
    d.set_item("perturbative_half", r.perturbative_half)?;
    d.set_item("primary", r.primary)?;
    d.set_item("diagnostic", r.diagnostic)?;
    d.set_item("half_is_primary", r.half_is_primary)?;
    d.set_item("validity_ratio", r.validity_ratio)?;
    Ok(d.into())
}

/// Lower and upper perturbative branch frequencies at wavenumber `k`.
#[pyfunction]
#[pyo3(signature = (k, chi0, chi_tilde, l_m, v=3.65))]
fn dispersion_perturbative(
    k: f64,
    chi0: f64,
    chi_tilde: f64,
    l_m: f64,
    v: f64,
) -> PyResult<(f64, f64)> {
    let chi = ChiProfile {
        chi0,
        chi_tilde,
        l_m,
    };
    let medium = MediumParams {
        v_tilde: v,
        u_tilde: v,
        r: 0.0,
    };
    oracles::dispersion_perturbative(k, &chi, &medium).map_err(py_err)
}

/// Code-unit medium parameters from the fabrication geometry.
#[pyfunction]
#[pyo3(signature = (l0, d, w, i_c, e_j_over_hbar_omega_j, epsilon_over_omega_j=None))]
fn derive_medium(
    py: Python<'_>,
    l0: f64,
    d: f64,
    w: f64,
    i_c: f64,
    e_j_over_hbar_omega_j: f64,
    epsilon_over_omega_j: Option<f64>,
) -> PyResult<Py<PyDict>> {
    let phys = PhysicalParams { l0, d, w, i_c };
    let m = derive_medium_rs(&phys, e_j_over_hbar_omega_j, epsilon_over_omega_j).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("v_tilde", m.medium.v_tilde)?;
    d.set_item("u_tilde", m.medium.u_tilde)?;
    d.set_item("r", m.medium.r)?;
    d.set_item("x", m.x)?;
    d.set_item("v_over_c", m.v_over_c)?;
    d.set_item("e_j_joule", m.e_j_joule)?;
    d.set_item("omega_j", m.omega_j)?;
    d.set_item("epsilon", m.epsilon)?;
    d.set_item("c_tilde_farad", m.c_tilde_farad)?;
    Ok(d.into())
}

/// Dominant spatial period of a population pattern, in sites.
#[pyfunction]
fn modulation_period(py: Python<'_>, populations: Vec<f64>) -> PyResult<Py<PyDict>> {
    let est = analysis::modulation_period(&populations).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("period", est.period)?;
    d.set_item("uncertainty", est.uncertainty)?;
    d.set_item("n_peaks", est.n_peaks)?;
    d.set_item("fft_period", est.fft_period)?;
    Ok(d.into())
}

#[pymodule]
fn qmm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Simulation>()?;
    m.add_function(wrap_pyfunction!(qubit_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(rabi_profile, m)?)?;
    m.add_function(wrap_pyfunction!(bloch_bands, m)?)?;
    m.add_function(wrap_pyfunction!(resolve_first_gap, m)?)?;
    m.add_function(wrap_pyfunction!(dispersion_perturbative, m)?)?;
    m.add_function(wrap_pyfunction!(derive_medium, m)?)?;
    m.add_function(wrap_pyfunction!(modulation_period, m)?)?;
    Ok(())
}
