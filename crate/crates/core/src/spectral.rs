//! Dense Hermitian spectra, gap detection and Fermi projections.

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest Hermitian matrix handed to the dense eigensolver.
pub const MAX_DENSE_DIMENSION: usize = 6000;

/// Factor applied to the median level spacing for the default gap threshold.
pub const GAP_SPACING_FACTOR: f64 = 5.0;
/// Floor of the default threshold, relative to the spectral spread; guards
/// against highly degenerate spectra with zero median spacing.
pub const GAP_RELATIVE_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
}

impl Gap {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

#[derive(Clone, Debug)]
pub struct SpectralData {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: Option<Mat<Complex64>>,
    pub gap_threshold: f64,
    pub gaps: Vec<Gap>,
}

/// Eigen-decomposition of a Hermitian matrix (lower triangle is read).
pub fn spectrum(h: &Mat<Complex64>, vectors: bool, min_width: Option<f64>) -> Result<SpectralData> {
    if h.nrows() != h.ncols() {
        return Err(Error::Precondition("matrix is not square".into()));
    }
    check_dense_dimension(h.nrows())?;
    let (eigenvalues, eigenvectors) = if vectors {
        let evd = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let vals: Vec<f64> = (0..h.nrows()).map(|i| s[i].re).collect();
        (vals, Some(evd.U().to_owned()))
    } else {
        let vals = h
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        (vals, None)
    };
    let gap_threshold = min_width.unwrap_or_else(|| default_gap_threshold(&eigenvalues));
    let gaps = find_gaps(&eigenvalues, gap_threshold);
    Ok(SpectralData {
        eigenvalues,
        eigenvectors,
        gap_threshold,
        gaps,
    })
}

/// Refuses balls too large for a dense eigensolve.
pub fn check_dense_dimension(n: usize) -> Result<()> {
    if n > MAX_DENSE_DIMENSION {
        return Err(Error::Precondition(format!(
            "ball has {n} elements; dense eigensolves are limited to {MAX_DENSE_DIMENSION}"
        )));
    }
    Ok(())
}

/// Runs faer single-threaded so spectra are bitwise reproducible.
pub fn use_sequential_linear_algebra() {
    faer::set_global_parallelism(faer::Par::Seq);
}

/// `5 ×` the median level spacing, floored relative to the spread.
pub fn default_gap_threshold(eigenvalues: &[f64]) -> f64 {
    if eigenvalues.len() < 2 {
        return 0.0;
    }
    let mut spacings: Vec<f64> = eigenvalues.windows(2).map(|w| w[1] - w[0]).collect();
    spacings.sort_by(f64::total_cmp);
    let median = spacings[spacings.len() / 2];
    let spread = eigenvalues[eigenvalues.len() - 1] - eigenvalues[0];
    (GAP_SPACING_FACTOR * median).max(GAP_RELATIVE_FLOOR * spread.max(1.0))
}

/// Gaps between consecutive eigenvalues wider than `min_width`.
pub fn find_gaps(eigenvalues: &[f64], min_width: f64) -> Vec<Gap> {
    eigenvalues
        .windows(2)
        .filter(|w| w[1] - w[0] > min_width)
        .map(|w| Gap {
            lower: w[0],
            upper: w[1],
            width: w[1] - w[0],
        })
        .collect()
}

impl SpectralData {
    /// Midpoint of the widest detected gap.
    pub fn largest_gap(&self) -> Option<Gap> {
        self.gaps
            .iter()
            .copied()
            .max_by(|a, b| a.width.total_cmp(&b.width))
    }

    pub fn count_below(&self, energy: f64) -> usize {
        self.eigenvalues.partition_point(|&l| l <= energy)
    }

    /// The gap containing `energy`, `Ok(None)` when `energy` lies outside the
    /// spectrum, and an error when it sits inside a cluster.
    pub fn gap_at(&self, energy: f64) -> Result<Option<Gap>> {
        let ev = &self.eigenvalues;
        if ev.is_empty() || energy < ev[0] || energy > ev[ev.len() - 1] {
            return Ok(None);
        }
        let k = self.count_below(energy);
        let (lower, upper) = (ev[k.saturating_sub(1)], ev[k.min(ev.len() - 1)]);
        let width = upper - lower;
        if k == 0 || k == ev.len() || !(width > self.gap_threshold) || energy == lower {
            return Err(Error::NoGap {
                energy,
                lower,
                upper,
                width,
                threshold: self.gap_threshold,
            });
        }
        Ok(Some(Gap { lower, upper, width }))
    }

    /// `P_E`: projection onto eigenvectors with eigenvalue `≤ E`.
    pub fn fermi_projection(&self, energy: f64) -> Result<Mat<Complex64>> {
        self.gap_at(energy)?;
        let u = self
            .eigenvectors
            .as_ref()
            .ok_or_else(|| Error::Precondition("eigenvectors were not computed".into()))?;
        let k = self.count_below(energy);
        let n = u.nrows();
        if k == 0 {
            return Ok(Mat::zeros(n, n));
        }
        let occ = u.subcols(0, k);
        Ok(occ * occ.adjoint())
    }
}

/// Frobenius norms of `P² − P` and `P − P*`.
pub fn projection_defects(p: &Mat<Complex64>) -> (f64, f64) {
    let p2 = p * p;
    let idem = (&p2 - p).norm_l2();
    let adj = (p - p.adjoint()).norm_l2();
    (idem, adj)
}

pub fn matrix_trace(m: &Mat<Complex64>) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}
