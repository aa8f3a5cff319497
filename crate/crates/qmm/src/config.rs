//! TOML configuration schema.
//!
//! Every field is optional; each scenario fills the gaps with its own
//! defaults, so an empty file (or no file) runs the canonical experiments.
//! Unknown keys are rejected to catch typos.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LatticeLayout, MediumParams, QubitParams};

/// Probe coupling mode: static susceptibility versus full back-action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Live,
    Frozen,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "live" => Ok(Mode::Live),
            "frozen" => Ok(Mode::Frozen),
            other => Err(Error::Config(format!(
                "mode must be 'frozen' or 'live', got '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Live => "live",
            Mode::Frozen => "frozen",
        })
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub lattice: LatticeSection,
    pub medium: MediumSection,
    pub qubit: QubitSection,
    pub pulses: PulsesSection,
    pub run: RunSection,
    pub chi: ChiSection,
    pub probe: ProbeSection,
    pub spectrum: SpectrumSection,
    pub sweep: SweepSection,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Parse(path.display().to_string(), e.to_string()))
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSection {
    pub n_total: Option<usize>,
    pub active_start: Option<usize>,
    pub active_end: Option<usize>,
    pub n_active: Option<usize>,
}

impl LatticeSection {
    pub fn resolve(&self, default_total: usize, default_active: usize) -> Result<LatticeLayout> {
        let n_total = self.n_total.unwrap_or(default_total);
        match (self.active_start, self.active_end) {
            (Some(start), Some(end)) => {
                if self.n_active.is_some() {
                    return Err(Error::Config(
                        "lattice: give either active_start/active_end or n_active, not both"
                            .into(),
                    ));
                }
                LatticeLayout::new(n_total, start, end)
            }
            (None, None) => {
                LatticeLayout::centered(n_total, self.n_active.unwrap_or(default_active))
            }
            _ => Err(Error::Config(
                "lattice: active_start and active_end must be given together".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MediumSection {
    pub v_tilde: Option<f64>,
    pub u_tilde: Option<f64>,
    pub r: Option<f64>,
}

impl MediumSection {
    /// Missing u_tilde follows v_tilde (impedance-matched padding).
    pub fn resolve(&self, defaults: &MediumParams) -> Result<MediumParams> {
        let v_tilde = self.v_tilde.unwrap_or(defaults.v_tilde);
        let m = MediumParams {
            v_tilde,
            u_tilde: self.u_tilde.unwrap_or(v_tilde),
            r: self.r.unwrap_or(defaults.r),
        };
        m.validate()?;
        Ok(m)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QubitSection {
    pub epsilon: Option<f64>,
    pub d00: Option<f64>,
    pub d01: Option<f64>,
    pub d11: Option<f64>,
    pub e_j: Option<f64>,
}

impl QubitSection {
    pub fn resolve(&self, defaults: &QubitParams) -> Result<QubitParams> {
        let q = QubitParams {
            epsilon: self.epsilon.unwrap_or(defaults.epsilon),
            d00: self.d00.unwrap_or(defaults.d00),
            d01: self.d01.unwrap_or(defaults.d01),
            d11: self.d11.unwrap_or(defaults.d11),
            e_j: self.e_j.unwrap_or(defaults.e_j),
        };
        q.validate()?;
        Ok(q)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulsesSection {
    pub amplitude: Option<f64>,
    pub wavenumber: Option<f64>,
    /// Carrier frequency; scenarios default it to the natural carrier of
    /// their medium when unset.
    pub omega: Option<f64>,
    pub width: Option<f64>,
    /// Relative phase, carried by the left-moving pulse.
    pub phase: Option<f64>,
    pub center_left: Option<f64>,
    pub center_right: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    /// Steps between field snapshots.
    pub snapshot_stride: Option<usize>,
    pub mode: Option<Mode>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChiSection {
    pub chi0: Option<f64>,
    pub chi_tilde: Option<f64>,
    pub l_m: Option<f64>,
    /// Register file to fit the profile from instead.
    pub state_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSection {
    /// Probe carrier; unset runs the two canonical carriers.
    pub omega: Option<f64>,
    /// Primed register to load; unset builds the synthetic register.
    pub state_file: Option<PathBuf>,
    /// Peak population of the synthetic register.
    pub p_max: Option<f64>,
    /// Modulation period of the synthetic register; unset designs it so the
    /// gap straddles half the qubit splitting.
    pub l_m: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub ratio: Option<f64>,
    pub n_g: Option<f64>,
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// One of "amplitude", "wavenumber", "phase", "r".
    pub parameter: Option<String>,
    pub values: Option<Vec<f64>>,
}
