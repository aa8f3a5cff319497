//! Analytic and small-matrix references the simulator is validated against.

pub mod bands;
pub mod jacobi;
pub mod qubit;
pub mod rabi;

pub use bands::{bloch_bands, BandSample, BandStructure, GapInfo};
pub use qubit::{auto_truncation, qubit_spectrum, QubitSpectrum};
pub use rabi::rabi_profile;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ChiProfile, MediumParams};

/// Relative window around the first zone edge treated as resonant.
const RESONANCE_TOL: f64 = 1e-6;

/// Perturbative dispersion branches (omega_minus, omega_plus) at wavenumber k.
///
/// The single-harmonic susceptibility couples only waves split by the first
/// reciprocal vector, so branches split at |k| = pi/L_m and coincide
/// everywhere else. Negative k folds onto positive k.
pub fn dispersion_perturbative(
    k: f64,
    chi: &ChiProfile,
    medium: &MediumParams,
) -> Result<(f64, f64)> {
    if !k.is_finite() {
        return Err(Error::Precondition(format!("wavenumber must be finite, got {k}")));
    }
    let k = k.abs();
    let w0 = chi.chi0 + chi.chi_tilde;
    let resonant = (k * chi.l_m / std::f64::consts::PI - 1.0).abs() < RESONANCE_TOL;
    let w_k = if resonant { 0.5 * chi.chi_tilde } else { 0.0 };
    let base = medium.v_tilde * medium.v_tilde * k * k + w0;
    let lo2 = base - w_k;
    if lo2 < 0.0 {
        return Err(Error::Unphysical(format!(
            "negative squared frequency {lo2} at k = {k}"
        )));
    }
    Ok((lo2.sqrt(), (base + w_k).sqrt()))
}

/// Perturbative width of gap `n` plus the validity ratio of the estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapEstimate {
    pub width: f64,
    /// Unperturbed squared frequency over the coupling; large means the
    /// perturbative width is trustworthy.
    pub validity_ratio: f64,
}

/// First-order gap width for the single-harmonic profile: nonzero only for
/// n = 1, where it is chi_tilde / sqrt((pi v / L_m)^2 + W_0).
pub fn gap_width(n: usize, chi: &ChiProfile, medium: &MediumParams) -> Result<GapEstimate> {
    if n < 1 {
        return Err(Error::Precondition("gap index must be >= 1".into()));
    }
    let w0 = chi.chi0 + chi.chi_tilde;
    let kn = std::f64::consts::PI * n as f64 / chi.l_m;
    let base = (medium.v_tilde * kn).powi(2) + w0;
    let coupling = 0.5 * chi.chi_tilde;
    let width = if n == 1 && chi.chi_tilde > 0.0 {
        chi.chi_tilde / base.sqrt()
    } else {
        0.0
    };
    Ok(GapEstimate {
        width,
        validity_ratio: if coupling > 0.0 { base / coupling } else { f64::INFINITY },
    })
}

/// The two perturbative readings of the first gap (they differ by a factor
/// two) arbitrated by the exact Hill solve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapResolution {
    pub hill: f64,
    pub perturbative_full: f64,
    pub perturbative_half: f64,
    /// Whichever perturbative reading is closer to the Hill value.
    pub primary: f64,
    pub diagnostic: f64,
    pub half_is_primary: bool,
    pub validity_ratio: f64,
}

pub fn resolve_first_gap(
    chi: &ChiProfile,
    medium: &MediumParams,
    truncation: usize,
) -> Result<GapResolution> {
    let est = gap_width(1, chi, medium)?;
    let full = est.width;
    let half = 0.5 * full;
    let bs = bloch_bands(&[], chi, medium, truncation)?;
    let hill = bs.gaps[0].width;
    let half_is_primary = (half - hill).abs() <= (full - hill).abs();
    let (primary, diagnostic) = if half_is_primary { (half, full) } else { (full, half) };
    Ok(GapResolution {
        hill,
        perturbative_full: full,
        perturbative_half: half,
        primary,
        diagnostic,
        half_is_primary,
        validity_ratio: est.validity_ratio,
    })
}
