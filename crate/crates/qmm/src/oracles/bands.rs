//! Exact Bloch bands of the periodically modulated medium via the Hill
//! matrix: the wave equation with susceptibility chi(z) truncated to 2M+1
//! plane waves per quasimomentum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ChiProfile, MediumParams};
use crate::oracles::jacobi;

#[derive(Debug, Clone, Serialize)]
pub struct BandSample {
    pub k: f64,
    /// Branch frequencies, ascending.
    pub omegas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapInfo {
    /// 1-based gap index; odd gaps sit at the zone edge, even at the center.
    pub index: usize,
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BandStructure {
    pub samples: Vec<BandSample>,
    pub gaps: Vec<GapInfo>,
}

/// Number of gaps reported in `BandStructure::gaps`.
const N_GAPS: usize = 4;

fn omegas_at(k: f64, chi: &ChiProfile, medium: &MediumParams, m_max: usize) -> Result<Vec<f64>> {
    let n = 2 * m_max + 1;
    let g = 2.0 * std::f64::consts::PI / chi.l_m;
    let v2 = medium.v_tilde * medium.v_tilde;
    let w0 = chi.chi0 + chi.chi_tilde;
    let coupling = 0.5 * chi.chi_tilde;
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        let m = i as f64 - m_max as f64;
        h[i * n + i] = v2 * (k + g * m).powi(2) + w0;
        if i + 1 < n {
            h[i * n + i + 1] = coupling;
            h[(i + 1) * n + i] = coupling;
        }
    }
    let e = jacobi::eigh(&h, n, false)?;
    e.values
        .into_iter()
        .map(|lam| {
            if lam < -1e-12 {
                Err(Error::Unphysical(format!(
                    "negative squared frequency {lam} at k = {k}"
                )))
            } else {
                Ok(lam.max(0.0).sqrt())
            }
        })
        .collect()
}

/// Band structure over `k_list` plus the first few gaps read off at the
/// high-symmetry points.
pub fn bloch_bands(
    k_list: &[f64],
    chi: &ChiProfile,
    medium: &MediumParams,
    truncation: usize,
) -> Result<BandStructure> {
    chi.validate()?;
    medium.validate()?;
    if truncation < 4 {
        return Err(Error::Precondition(format!(
            "plane-wave truncation must be >= 4, got {truncation}"
        )));
    }
    if !chi.l_m.is_finite() {
        return Err(Error::Precondition(
            "band structure needs a finite modulation period".into(),
        ));
    }

    let samples = k_list
        .iter()
        .map(|&k| {
            Ok(BandSample {
                k,
                omegas: omegas_at(k, chi, medium, truncation)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let edge = omegas_at(std::f64::consts::PI / chi.l_m, chi, medium, truncation)?;
    let center = omegas_at(0.0, chi, medium, truncation)?;
    let mut gaps = Vec::with_capacity(N_GAPS);
    for index in 1..=N_GAPS {
        let at = if index % 2 == 1 { &edge } else { &center };
        let lo = at[index - 1];
        let hi = at[index];
        gaps.push(GapInfo {
            index,
            center: 0.5 * (lo + hi),
            width: (hi - lo).max(0.0),
        });
    }
    Ok(BandStructure { samples, gaps })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MEDIUM: MediumParams = MediumParams {
        v_tilde: 1.99,
        u_tilde: 1.99,
        r: 0.25,
    };
    const CHI: ChiProfile = ChiProfile {
        chi0: 0.05,
        chi_tilde: 0.02,
        l_m: 12.5,
    };

    #[test]
    fn reference_profile_edge_and_center() {
        let k_edge = std::f64::consts::PI / CHI.l_m;
        let bs = bloch_bands(&[k_edge, 0.0], &CHI, &MEDIUM, 12).unwrap();
        let edge = &bs.samples[0].omegas;
        assert!((edge[0] - 0.556858912185).abs() < 1e-9);
        assert!((edge[1] - 0.574535767956).abs() < 1e-9);
        assert!((edge[2] - 1.523580936787).abs() < 1e-9);
        let center = &bs.samples[1].omegas;
        assert!((center[0] - 0.264197176594).abs() < 1e-9);
        assert!((center[1] - 1.034665630876).abs() < 1e-9);
        assert!((center[2] - 1.034762204103).abs() < 1e-9);
        assert!((bs.gaps[0].width - 0.0176768558).abs() < 1e-8);
        assert!(bs.gaps[1].width < 1e-3);
    }

    #[test]
    fn no_modulation_gives_folded_free_branches() {
        let chi = ChiProfile {
            chi0: 0.05,
            chi_tilde: 0.0,
            l_m: 12.5,
        };
        let k = 0.11;
        let bs = bloch_bands(&[k], &chi, &MEDIUM, 8).unwrap();
        let g = 2.0 * std::f64::consts::PI / chi.l_m;
        let mut expect: Vec<f64> = (-8..=8i32)
            .map(|m| {
                let kk = k + g * m as f64;
                (MEDIUM.v_tilde * MEDIUM.v_tilde * kk * kk + chi.chi0).sqrt()
            })
            .collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in bs.samples[0].omegas.iter().zip(&expect) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        assert!(bs.gaps[0].width < 1e-12);
    }

    #[test]
    fn truncation_convergence() {
        let k_edge = std::f64::consts::PI / CHI.l_m;
        let a = bloch_bands(&[k_edge], &CHI, &MEDIUM, 8).unwrap();
        let b = bloch_bands(&[k_edge], &CHI, &MEDIUM, 16).unwrap();
        for i in 0..2 {
            let rel =
                (a.samples[0].omegas[i] - b.samples[0].omegas[i]).abs() / b.samples[0].omegas[i];
            assert!(rel < 1e-8, "band {i}: rel = {rel:.2e}");
        }
    }

    #[test]
    fn branches_ascending_and_gaps_nonnegative() {
        let ks: Vec<f64> = (0..30)
            .map(|i| i as f64 / 29.0 * 2.0 * std::f64::consts::PI / CHI.l_m)
            .collect();
        let bs = bloch_bands(&ks, &CHI, &MEDIUM, 8).unwrap();
        for s in &bs.samples {
            for w in s.omegas.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
        for gap in &bs.gaps {
            assert!(gap.width >= 0.0);
        }
    }

    #[test]
    fn weak_modulation_limit_is_continuous() {
        let weak = ChiProfile {
            chi_tilde: 1e-6,
            ..CHI
        };
        let none = ChiProfile {
            chi_tilde: 0.0,
            ..CHI
        };
        let k = 0.2;
        let a = bloch_bands(&[k], &weak, &MEDIUM, 8).unwrap();
        let b = bloch_bands(&[k], &none, &MEDIUM, 8).unwrap();
        for (x, y) in a.samples[0].omegas.iter().zip(&b.samples[0].omegas) {
            assert!((x - y).abs() < 1e-5);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(bloch_bands(&[0.1], &CHI, &MEDIUM, 3).is_err());
        let uniform = ChiProfile {
            chi0: 0.05,
            chi_tilde: 0.0,
            l_m: f64::INFINITY,
        };
        assert!(bloch_bands(&[0.1], &uniform, &MEDIUM, 8).is_err());
    }
}
