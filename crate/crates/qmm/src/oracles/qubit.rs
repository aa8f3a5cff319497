//! Charge-basis spectrum of a single junction qubit.
//!
//! The junction Hamiltonian is diagonalized in the charge basis |m>, |m| <= M:
//! kinetic term (m - n_g)^2 / ratio on the diagonal, cosine term -ratio on the
//! first off-diagonals, everything in units of the plasma quantum. The level
//! splitting and the cosine matrix elements feed the dimensionless model.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracles::jacobi;

/// Ground-state amplitude allowed at the truncation edge.
const EDGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct QubitSpectrum {
    /// Level splitting (E1 - E0) over the plasma quantum.
    pub epsilon_over_omega_j: f64,
    /// Cosine matrix elements rescaled to units of the splitting.
    /// The sign of `d01` is an eigenvector gauge; only |d01| is physical.
    pub d00: f64,
    pub d01: f64,
    pub d11: f64,
    /// Lowest eigenvalues in plasma-quantum units, ascending.
    pub levels: Vec<f64>,
    /// Largest ground-state amplitude at |m| = M (truncation diagnostic).
    pub edge_support: f64,
}

/// Truncation that keeps the ground-state edge support far below `EDGE_TOL`
/// for any ratio of practical interest.
pub fn auto_truncation(ej_over_hbar_omega_j: f64) -> usize {
    let m = (9.0 * ej_over_hbar_omega_j.sqrt()).ceil() as usize;
    m.max(16)
}

pub fn qubit_spectrum(
    ej_over_hbar_omega_j: f64,
    n_g: f64,
    truncation: usize,
) -> Result<QubitSpectrum> {
    if !(ej_over_hbar_omega_j > 0.0) {
        return Err(Error::Precondition(format!(
            "energy ratio must be > 0, got {ej_over_hbar_omega_j}"
        )));
    }
    if truncation < 8 {
        return Err(Error::Precondition(format!(
            "charge truncation must be >= 8, got {truncation}"
        )));
    }
    if !n_g.is_finite() {
        return Err(Error::Precondition("gate offset must be finite".into()));
    }

    let ratio = ej_over_hbar_omega_j;
    let m_max = truncation as isize;
    let n = 2 * truncation + 1;
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        let m = i as isize - m_max;
        h[i * n + i] = (m as f64 - n_g).powi(2) / ratio;
        if i + 1 < n {
            h[i * n + i + 1] = -ratio;
            h[(i + 1) * n + i] = -ratio;
        }
    }
    let e = jacobi::eigh(&h, n, true)?;

    let ground = e.vector(0);
    let edge_support = ground[0].abs().max(ground[n - 1].abs());
    if edge_support > EDGE_TOL {
        return Err(Error::Truncation(format!(
            "charge truncation {truncation} too small: ground-state edge support {edge_support:.2e}"
        )));
    }

    let epsilon = e.values[1] - e.values[0];
    // <a| cos phi |b> with cos phi = (shift_up + shift_down) / 2.
    let cos_elem = |a: &[f64], b: &[f64]| -> f64 {
        (0..n - 1).map(|i| 0.5 * (a[i + 1] * b[i] + a[i] * b[i + 1])).sum()
    };
    let excited = e.vector(1);
    let to_d = ratio / epsilon;
    let levels = e.values.iter().take(8).copied().collect();

    Ok(QubitSpectrum {
        epsilon_over_omega_j: epsilon,
        d00: to_d * cos_elem(ground, ground),
        d01: to_d * cos_elem(ground, excited),
        d11: to_d * cos_elem(excited, excited),
        levels,
        edge_support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_ratio_four() {
        let s = qubit_spectrum(4.0, 0.0, 20).unwrap();
        assert!((s.epsilon_over_omega_j - 1.935365590943).abs() < 1e-9);
        assert!((s.d00 - 1.937583569909).abs() < 1e-8);
        assert!((s.d11 - 1.678932143909).abs() < 1e-8);
        assert!(s.d01.abs() < 1e-12, "parity violated: d01 = {}", s.d01);
        let expect = [
            -7.015881451834,
            -5.080515860892,
            -3.212799647694,
            -1.416965808411,
        ];
        for (got, want) in s.levels.iter().zip(expect) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn levels_ascending() {
        let s = qubit_spectrum(4.0, 0.25, 20).unwrap();
        for pair in s.levels.windows(2) {
            assert!(pair[0] <= pair[1]);
        }
    }

    #[test]
    fn gate_offset_keeps_cross_element_suppressed() {
        // Deep in the junction-dominated regime the cross element stays tiny
        // even off the symmetry point.
        let s = qubit_spectrum(4.0, 0.25, 20).unwrap();
        assert!((s.d01.abs() - 1.515e-11).abs() < 1e-12, "d01 = {}", s.d01);
    }

    #[test]
    fn harmonic_limit() {
        for (ratio, expect) in [(50.0, 1.9949874172), (100.0, 1.9974968647)] {
            let m = auto_truncation(ratio);
            let s = qubit_spectrum(ratio, 0.0, m).unwrap();
            assert!(
                (s.epsilon_over_omega_j - expect).abs() < 1e-8,
                "ratio {ratio}: {}",
                s.epsilon_over_omega_j
            );
            assert!(s.epsilon_over_omega_j > 1.9 && s.epsilon_over_omega_j < 2.0);
        }
    }

    #[test]
    fn truncation_doubling_is_converged() {
        let a = qubit_spectrum(4.0, 0.0, 20).unwrap();
        let b = qubit_spectrum(4.0, 0.0, 40).unwrap();
        let rel = (a.epsilon_over_omega_j - b.epsilon_over_omega_j).abs() / b.epsilon_over_omega_j;
        assert!(rel < 1e-10, "rel = {rel:.2e}");
    }

    #[test]
    fn undersized_truncation_is_rejected() {
        let err = qubit_spectrum(4.0, 0.0, 12);
        assert!(matches!(err, Err(Error::Truncation(_))), "{err:?}");
        assert!(matches!(
            qubit_spectrum(4.0, 0.0, 4),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            qubit_spectrum(-1.0, 0.0, 20),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn auto_truncation_is_sufficient() {
        for ratio in [1.0, 4.0, 50.0, 200.0] {
            let m = auto_truncation(ratio);
            let s = qubit_spectrum(ratio, 0.0, m).unwrap();
            assert!(s.edge_support < 1e-12, "ratio {ratio}: {}", s.edge_support);
        }
    }
}
