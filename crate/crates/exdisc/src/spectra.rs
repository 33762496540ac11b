//! Measurement instruments: eigenvalue extraction, cross-mode merging with
//! the ±m multiplicity, log-log (Weyl) exponent fits, superpolynomial-decay
//! classification, and eigenvalue-cluster bookkeeping.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::mode_ops::ModeMatrix;

/// Relative floor below which merged singular values are discarded.
pub const SV_FLOOR_REL: f64 = 1e-14;

/// Weighted-symmetry tolerance enforced before any eigensolve.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Multiplicity of mode m in the full plane: ±m coincide for m >= 1.
pub fn mode_multiplicity(m: usize) -> usize {
    if m == 0 {
        1
    } else {
        2
    }
}

/// Eigenvalues of the weighted symmetrization of a mode matrix, ascending.
///
/// Aborts if the weighted-symmetry invariant is violated, which indicates an
/// assembly bug rather than a numerical accident.
pub fn eigs_sym(mm: &ModeMatrix) -> Result<Vec<f64>> {
    if mm.is_raw() {
        return Err(Error::IncompatibleRealization(
            "eigs_sym expects a matrix with boundary conditions applied".into(),
        ));
    }
    let defect = mm.weighted_symmetry_defect();
    if defect > SYMMETRY_TOL {
        return Err(Error::SymmetryViolated {
            defect,
            tol: SYMMETRY_TOL,
        });
    }
    let n = mm.n();
    let w = mm.active_weights();
    let band = mm.band();
    if band.kl().max(band.ku()) <= 1 {
        let d: Vec<f64> = (0..n).map(|i| band.get(i, i)).collect();
        let e: Vec<f64> = (0..n - 1)
            .map(|i| {
                let s_up = band.get(i, i + 1) * (w[i] / w[i + 1]).sqrt();
                let s_dn = band.get(i + 1, i) * (w[i + 1] / w[i]).sqrt();
                0.5 * (s_up + s_dn)
            })
            .collect();
        linalg::tridiag_eigenvalues(&d, &e)
    } else {
        let mut a = band.to_dense();
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] *= (w[i] / w[j]).sqrt();
            }
        }
        // Enforce exact symmetry (defect already checked above).
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (a[(i, j)] + a[(j, i)]);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        Ok(linalg::dense_sym_eigenvalues(&a))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeylFit {
    pub slope: f64,
    pub intercept: f64,
    /// exp(intercept): estimate of lim s_l · l^{-slope}.
    pub constant: f64,
    /// RMS residual of the least-squares fit in log-log coordinates.
    pub residual: f64,
    /// Half-open index window [lo, hi) into the series (0-based).
    pub window: (usize, usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct SvEntry {
    pub value: f64,
    pub mode: usize,
    pub multiplicity: usize,
}

/// Merged singular values across modes, descending, with ±m duplication.
#[derive(Debug, Clone, Serialize)]
pub struct SingularValueSeries {
    pub source: String,
    pub entries: Vec<SvEntry>,
    pub fit: Option<WeylFit>,
}

impl SingularValueSeries {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }
}

/// Merges per-mode descending singular-value lists into one descending
/// series, duplicating m >= 1 values (±m symmetry) and discarding entries
/// below the relative floor.
pub fn sv_merge(per_mode: &[(usize, Vec<f64>)], source: &str) -> SingularValueSeries {
    let mut entries: Vec<SvEntry> = Vec::new();
    for (m, values) in per_mode {
        let mult = mode_multiplicity(*m);
        for v in values {
            for _ in 0..mult {
                entries.push(SvEntry {
                    value: *v,
                    mode: *m,
                    multiplicity: mult,
                });
            }
        }
    }
    entries.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.mode.cmp(&b.mode)));
    if let Some(first) = entries.first() {
        let floor = first.value * SV_FLOOR_REL;
        entries.retain(|e| e.value > floor);
    }
    SingularValueSeries {
        source: source.to_string(),
        entries,
        fit: None,
    }
}

/// Least-squares fit of log s_l against log l over an index window.
///
/// The default window drops the first 10% (low-mode geometry) and the last
/// 20% (discretization floor) of the series.
pub fn weyl_fit(series: &SingularValueSeries, window: Option<(usize, usize)>) -> Result<WeylFit> {
    let n = series.len();
    let (lo, hi) = window.unwrap_or((
        (0.1 * n as f64).ceil() as usize,
        (0.8 * n as f64).floor() as usize,
    ));
    if hi > n || lo >= hi {
        return Err(Error::SeriesTooShort(format!(
            "window [{lo}, {hi}) outside series of length {n}"
        )));
    }
    if hi - lo < 20 {
        return Err(Error::SeriesTooShort(format!(
            "window [{lo}, {hi}) has {} < 20 points",
            hi - lo
        )));
    }
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let k = (hi - lo) as f64;
    for idx in lo..hi {
        let x = ((idx + 1) as f64).ln();
        let y = series.entries[idx].value.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = k * sxx - sx * sx;
    let slope = (k * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / k;
    let mut ss = 0.0;
    for idx in lo..hi {
        let x = ((idx + 1) as f64).ln();
        let y = series.entries[idx].value.ln();
        let r = y - slope * x - intercept;
        ss += r * r;
    }
    Ok(WeylFit {
        slope,
        intercept,
        constant: intercept.exp(),
        residual: (ss / k).sqrt(),
        window: (lo, hi),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NegligibilityVerdict {
    /// Largest p <= p_max with s_{2l} <= 2^{-p} s_l across the test window.
    pub sustained_p: u32,
    pub p_max: u32,
}

impl NegligibilityVerdict {
    pub fn passes(&self, p: u32) -> bool {
        self.sustained_p >= p
    }
}

/// Tests superpolynomial decay: for each p the doubling condition
/// s_{2l} <= 2^{-p} s_l must hold for every l in [len/4, len/2].
pub fn negligibility_test(series: &SingularValueSeries, p_max: u32) -> Result<NegligibilityVerdict> {
    let n = series.len();
    if n < 40 {
        return Err(Error::SeriesTooShort(format!(
            "negligibility test needs >= 40 entries, got {n}"
        )));
    }
    let values = series.values();
    let lo = (n / 4).max(2);
    let hi = n / 2;
    let mut sustained = 0;
    'outer: for p in 1..=p_max {
        let factor = 2f64.powi(-(p as i32));
        for l in lo..=hi {
            if values[2 * l - 1] > factor * values[l - 1] {
                break 'outer;
            }
        }
        sustained = p;
    }
    Ok(NegligibilityVerdict {
        sustained_p: sustained,
        p_max,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralEntry {
    pub value: f64,
    pub mode: usize,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Cluster {
    pub center: f64,
    pub halfwidth: f64,
    pub count: usize,
}

/// Eigenvalues merged across modes (ascending) with mode provenance.
/// Counts fold in the ±m multiplicity.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub entries: Vec<SpectralEntry>,
}

impl SpectrumReport {
    pub fn from_modes(per_mode: &[(usize, Vec<f64>)]) -> Self {
        let mut entries: Vec<SpectralEntry> = per_mode
            .iter()
            .flat_map(|(m, evs)| {
                let mult = mode_multiplicity(*m);
                evs.iter().map(move |v| SpectralEntry {
                    value: *v,
                    mode: *m,
                    multiplicity: mult,
                })
            })
            .collect();
        entries.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.mode.cmp(&b.mode)));
        SpectrumReport { entries }
    }

    /// Number of eigenvalues (with multiplicity) in [center - hw, center + hw].
    pub fn cluster_count(&self, center: f64, halfwidth: f64) -> Result<usize> {
        if !(halfwidth > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "halfwidth {halfwidth} must be positive"
            )));
        }
        Ok(self
            .entries
            .iter()
            .filter(|e| (e.value - center).abs() <= halfwidth)
            .map(|e| e.multiplicity)
            .sum())
    }

    /// Nondecreasing counts of eigenvalues <= each threshold (with
    /// multiplicity). Thresholds must be ascending.
    pub fn counting_function(&self, thresholds: &[f64]) -> Result<Vec<usize>> {
        if thresholds.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidConfig("thresholds must be ascending".into()));
        }
        Ok(thresholds
            .iter()
            .map(|t| {
                self.entries
                    .iter()
                    .take_while(|e| e.value <= *t)
                    .map(|e| e.multiplicity)
                    .sum()
            })
            .collect())
    }

    /// Assigns eigenvalues within `halfwidth` of some center to the nearest
    /// center (ties to the lower one) and reports per-center counts.
    pub fn detect_clusters(&self, centers: &[f64], halfwidth: f64) -> Result<Vec<Cluster>> {
        if !(halfwidth > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "halfwidth {halfwidth} must be positive"
            )));
        }
        let mut counts = vec![0usize; centers.len()];
        for e in &self.entries {
            let mut best: Option<(usize, f64)> = None;
            for (k, c) in centers.iter().enumerate() {
                let d = (e.value - c).abs();
                if d <= halfwidth {
                    let better = match best {
                        None => true,
                        // Strict inequality keeps ties on the lower center,
                        // centers being scanned in ascending order.
                        Some((_, bd)) => d < bd,
                    };
                    if better {
                        best = Some((k, d));
                    }
                }
            }
            if let Some((k, _)) = best {
                counts[k] += e.multiplicity;
            }
        }
        Ok(centers
            .iter()
            .zip(counts)
            .map(|(c, count)| Cluster {
                center: *c,
                halfwidth,
                count,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::mode_ops::{apply_bc, assemble_second_order, Coefficients, RealizationSpec};
    use std::sync::Arc;

    fn series(values: Vec<f64>) -> SingularValueSeries {
        SingularValueSeries {
            source: "synthetic".into(),
            entries: values
                .into_iter()
                .map(|value| SvEntry {
                    value,
                    mode: 0,
                    multiplicity: 1,
                })
                .collect(),
            fit: None,
        }
    }

    #[test]
    fn merge_applies_multiplicity() {
        let merged = sv_merge(&[(0, vec![3.0]), (1, vec![2.0])], "t");
        assert_eq!(merged.values(), vec![3.0, 2.0, 2.0]);
        let empty = sv_merge(&[], "t");
        assert!(empty.is_empty());
    }

    #[test]
    fn merge_is_permutation_invariant() {
        let a = sv_merge(&[(0, vec![3.0, 1.0]), (2, vec![2.5]), (1, vec![0.5])], "t");
        let b = sv_merge(&[(1, vec![0.5]), (0, vec![3.0, 1.0]), (2, vec![2.5])], "t");
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn merge_closed_form_slope() {
        // Per-mode values 1/m², merged -> slope -2.
        let per: Vec<(usize, Vec<f64>)> =
            (1..=200).map(|m| (m, vec![1.0 / (m * m) as f64])).collect();
        let merged = sv_merge(&per, "t");
        let fit = weyl_fit(&merged, None).unwrap();
        assert!((fit.slope + 2.0).abs() < 0.02, "slope {}", fit.slope);
    }

    #[test]
    fn weyl_fit_recovers_synthetic_power_law() {
        let s = series((1..=500).map(|l| 3.0 * (l as f64).powf(-2.0)).collect());
        let fit = weyl_fit(&s, None).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-6);
        assert!((fit.constant - 3.0).abs() < 3e-4);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn weyl_fit_window_too_short() {
        // Default window on 25 entries keeps 17 < 20 points.
        let s = series((1..=25).map(|l| 1.0 / l as f64).collect());
        assert!(weyl_fit(&s, None).is_err());
        assert!(weyl_fit(&s, Some((0, 31))).is_err());
    }

    #[test]
    fn negligibility_synthetic() {
        let exp = series((1..=64).map(|l| (-(l as f64)).exp()).collect());
        let v = negligibility_test(&exp, 8).unwrap();
        assert_eq!(v.sustained_p, 8);
        let poly = series((1..=100).map(|l| (l as f64).powf(-2.0)).collect());
        let v = negligibility_test(&poly, 8).unwrap();
        assert_eq!(v.sustained_p, 2);
        assert!(!v.passes(3));
        let short = series((1..=20).map(|l| 1.0 / l as f64).collect());
        assert!(negligibility_test(&short, 8).is_err());
    }

    #[test]
    fn report_counts_and_clusters() {
        let rep = SpectrumReport::from_modes(&[(0, vec![1.0, 1.0, 1.0, 5.0])]);
        assert_eq!(rep.cluster_count(1.0, 0.1).unwrap(), 3);
        assert_eq!(rep.counting_function(&[2.5]).unwrap(), vec![3]);
        assert_eq!(rep.counting_function(&[0.5]).unwrap(), vec![0]);
        assert!(rep.counting_function(&[2.0, 1.0]).is_err());
        assert!(rep.cluster_count(1.0, 0.0).is_err());
        // Equidistant tie goes to the lower center.
        let rep = SpectrumReport::from_modes(&[(0, vec![0.5])]);
        let cl = rep.detect_clusters(&[0.4, 0.6], 0.12).unwrap();
        assert_eq!((cl[0].count, cl[1].count), (1, 0));
    }

    #[test]
    fn eigs_on_mode_matrices() {
        let g = Arc::new(build_grid(1.0, 20.0, 160, 2.0).unwrap());
        let co = Coefficients::second_order(1.0).unwrap();
        let raw = assemble_second_order(0, &g, &co).unwrap();
        assert!(eigs_sym(&raw).is_err());
        let dir = apply_bc(&raw, &RealizationSpec::Dirichlet).unwrap();
        let neu = apply_bc(&raw, &RealizationSpec::Neumann).unwrap();
        let dir_ev = eigs_sym(&dir).unwrap();
        let neu_ev = eigs_sym(&neu).unwrap();
        // Positivity with lower bound c0, and form ordering.
        assert!(dir_ev[0] >= 1.0 - 1e-6);
        assert!(neu_ev[0] <= dir_ev[0]);
        // Cauchy interlacing: Dirichlet is a principal submatrix of Neumann.
        for k in 0..dir_ev.len() {
            assert!(neu_ev[k] <= dir_ev[k] + 1e-9);
            assert!(dir_ev[k] <= neu_ev[k + 1] + 1e-9);
        }
    }
}
