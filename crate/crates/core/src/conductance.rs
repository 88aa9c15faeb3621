//! End-to-end pipelines: Hall conductance reports and flux sweeps.

use std::io::Write;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{harper_matrix, Twist};
use crate::error::{Error, Result};
use crate::fuchsian::{cayley_ball, CayleyBall, GroupPresentation};
use crate::hyperbolic::Multiplier;
use crate::spectral::{check_dense_dimension, spectrum, Gap};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FermiChoice {
    /// Midpoint of the widest detected gap.
    AutoLargestGap,
    Energy(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConductanceOptions {
    pub fermi: FermiChoice,
    /// Minimum gap width; `None` uses the spacing-based default.
    pub gap_threshold: Option<f64>,
    /// Support cutoff for the Fourier extraction; `None` means `R − 2`.
    pub support_radius: Option<usize>,
}

impl Default for ConductanceOptions {
    fn default() -> Self {
        ConductanceOptions {
            fermi: FermiChoice::AutoLargestGap,
            gap_threshold: None,
            support_radius: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConductanceReport {
    pub signature: String,
    pub theta: f64,
    pub radius: usize,
    pub fermi_level: f64,
    /// `None` when the Fermi level lies outside the spectrum.
    pub gap: Option<Gap>,
    pub tr_c: f64,
    pub tr_c_imag: f64,
    pub tr_k: f64,
    pub tr_k_imag: f64,
    pub phi: f64,
    /// `k` minimizing `|tr_c − kφ|`.
    pub nearest_multiple: i64,
    /// `|tr_c − kφ|`.
    pub residual: f64,
    /// Largest `|P̂(γ)|` per word length up to the support cutoff.
    pub decay_profile: Vec<f64>,
    pub support_radius: usize,
    /// `Σ |P̂(γ)|` on the outermost retained sphere.
    pub tail_mass: f64,
    /// Occupied states over ball size, and the extracted `tr(P̂)`.
    pub filling: f64,
    pub trace: f64,
    pub rank: usize,
    pub dimension: usize,
    pub notes: Vec<String>,
}

/// Nearest multiple of `phi` and the distance to it.
pub fn nearest_multiple(value: f64, phi: f64) -> (i64, f64) {
    let k = (value / phi).round();
    (k as i64, (value - k * phi).abs())
}

/// Conductance pipeline on a prebuilt ball.
pub fn hall_conductance_on(ball: &CayleyBall, theta: f64, options: &ConductanceOptions) -> Result<ConductanceReport> {
    Ok(hall_conductance_with_projection(ball, theta, options)?.0)
}

/// As [`hall_conductance_on`], also returning the Fermi projection matrix.
pub fn hall_conductance_with_projection(
    ball: &CayleyBall,
    theta: f64,
    options: &ConductanceOptions,
) -> Result<(ConductanceReport, Mat<Complex64>)> {
    check_dense_dimension(ball.len())?;
    let group = &ball.group;
    let radius = ball.radius;
    let twist = Twist::new(ball, Multiplier::new(theta));
    let h = harper_matrix(&twist, None, None)?;
    let spec = spectrum(&h.matrix, true, options.gap_threshold)?;
    let mut notes = Vec::new();
    let energy = match options.fermi {
        FermiChoice::Energy(e) => e,
        FermiChoice::AutoLargestGap => {
            let gap = spec.largest_gap().ok_or_else(|| {
                let (lo, hi) = (spec.eigenvalues[0], spec.eigenvalues[spec.eigenvalues.len() - 1]);
                Error::NoGap {
                    energy: 0.5 * (lo + hi),
                    lower: lo,
                    upper: hi,
                    width: 0.0,
                    threshold: spec.gap_threshold,
                }
            })?;
            gap.midpoint()
        }
    };
    let gap = spec.gap_at(energy)?;
    let p = spec.fermi_projection(energy)?;
    let rank = spec.count_below(energy);
    let support = options.support_radius.unwrap_or(radius.saturating_sub(2));
    let p_hat = twist.fourier_extract(&p, support)?;

    let tr_c = twist.tr_c(&p_hat, &p_hat, &p_hat)?;
    let tr_k = twist.tr_k(&p_hat, &p_hat, &p_hat)?;
    if group.genus() == 0 {
        notes.push("genus 0: the Connes-Kubo sum over handles is empty, tr_K is identically 0".into());
    }
    let phi = group.signature.phi().to_f64();
    let (k, residual) = nearest_multiple(tr_c.re, phi);
    let decay_profile: Vec<f64> = p_hat.decay_profile(ball)[..=support].to_vec();
    let tail_mass = p_hat
        .support()
        .filter(|(i, _)| ball.word_length(*i) == support)
        .map(|(_, v)| v.norm())
        .sum();
    if decay_profile.windows(2).any(|w| w[1] > w[0]) {
        notes.push("extracted coefficients are not monotonically decaying in word length".into());
    }
    let report = ConductanceReport {
        signature: group.signature.to_string(),
        theta,
        radius,
        fermi_level: energy,
        gap,
        tr_c: tr_c.re,
        tr_c_imag: tr_c.im,
        tr_k: tr_k.re,
        tr_k_imag: tr_k.im,
        phi,
        nearest_multiple: k,
        residual,
        decay_profile,
        support_radius: support,
        tail_mass,
        filling: rank as f64 / ball.len() as f64,
        trace: p_hat.coeffs[0].re,
        rank,
        dimension: ball.len(),
        notes,
    };
    Ok((report, p))
}

/// Builds the ball and runs the conductance pipeline.
pub fn hall_conductance(
    group: &GroupPresentation,
    theta: f64,
    radius: usize,
    options: &ConductanceOptions,
) -> Result<ConductanceReport> {
    let ball = cayley_ball(group, radius)?;
    hall_conductance_on(&ball, theta, options)
}

/// Eigenvalues of the Harper operator for each flux, in input order.
pub fn butterfly(ball: &CayleyBall, thetas: &[f64]) -> Result<Vec<(f64, Vec<f64>)>> {
    check_dense_dimension(ball.len())?;
    thetas
        .par_iter()
        .map(|&theta| {
            let twist = Twist::new(ball, Multiplier::new(theta));
            let h = harper_matrix(&twist, None, None)?;
            let spec = spectrum(&h.matrix, false, None)?;
            Ok((theta, spec.eigenvalues))
        })
        .collect()
}

pub const BUTTERFLY_HEADER: &str = "theta,index,eigenvalue";

/// Writes rows as `theta,index,eigenvalue` with round-trip float formatting.
pub fn write_butterfly_csv<W: Write>(out: &mut W, rows: &[(f64, Vec<f64>)], header: bool) -> std::io::Result<()> {
    if header {
        writeln!(out, "{BUTTERFLY_HEADER}")?;
    }
    for (theta, vals) in rows {
        for (i, v) in vals.iter().enumerate() {
            writeln!(out, "{theta:?},{i},{v:?}")?;
        }
    }
    Ok(())
}
