//! Property suites behind `orbihall verify`.
//!
//! Each suite returns a list of named checks with the measured value and the
//! tolerance it was held to. Regression values live in a JSON fixture so a
//! tampered or stale fixture fails loudly.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{harper_matrix, hermitian_defect, AlgebraElement, Twist};
use crate::comparison::{
    coboundary, comparison_run, defect_table, defect_table_with, fundamental_pairings, random_element,
    solve_coboundary, CocycleDefectTable,
};
use crate::error::{Error, Result};
use crate::fuchsian::{cayley_ball, group_for, surface_group, triangle_group, word_metric_constant, CayleyBall};
use crate::hyperbolic::{area_cocycle, triangle_area_signed, MoebiusTransform, Multiplier, TriangleConvention};
use crate::orbifold::OrbifoldSignature;
use crate::search::{enumerate_range, SearchBounds};
use crate::tables::{EXPERIMENTAL, LOW_GENUS};
use crate::Rational;

/// Regression fixture shipped with the crate.
pub const DEFAULT_FIXTURE: &str = include_str!("../fixtures/regression.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureValue {
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub values: BTreeMap<String, FixtureValue>,
    /// Table rows whose printed fraction is known not to match exact arithmetic.
    pub known_errata: Vec<String>,
}

impl Fixture {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("fixture: {e}")))
    }

    pub fn builtin() -> Self {
        Fixture::parse(DEFAULT_FIXTURE).expect("bundled fixture parses")
    }

    fn get(&self, name: &str) -> Result<&FixtureValue> {
        self.values
            .get(name)
            .ok_or_else(|| Error::Parse(format!("fixture has no entry {name:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Cocycle,
    Compare,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Suite::Core),
            "cocycle" => Ok(Suite::Cocycle),
            "compare" => Ok(Suite::Compare),
            "all" => Ok(Suite::All),
            _ => Err(Error::Parse(format!("unknown suite {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<8} {:<44} value={:.3e} tol={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.value,
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, "  ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn at_most(&mut self, suite: &str, name: impl Into<String>, value: f64, tolerance: f64, detail: impl Into<String>) {
        self.checks.push(Check {
            suite: suite.into(),
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
            detail: detail.into(),
        });
    }

    fn regression(&mut self, suite: &str, fixture: &Fixture, name: &str, value: f64) -> Result<()> {
        let expected = fixture.get(name)?;
        let dev = (value - expected.value).abs();
        self.at_most(
            suite,
            format!("fixture {name}"),
            dev,
            expected.tolerance,
            format!("measured {value:.12e}, fixture {:.12e}", expected.value),
        );
        Ok(())
    }
}

pub fn run(suite: Suite, fixture: &Fixture) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    if matches!(suite, Suite::Core | Suite::All) {
        core_suite(&mut report, fixture)?;
    }
    if matches!(suite, Suite::Cocycle | Suite::All) {
        cocycle_suite(&mut report)?;
    }
    if matches!(suite, Suite::Compare | Suite::All) {
        compare_suite(&mut report, fixture)?;
    }
    Ok(report)
}

fn core_suite(report: &mut VerifyReport, fixture: &Fixture) -> Result<()> {
    const S: &str = "core";
    let mut bad = 0usize;
    for row in EXPERIMENTAL.iter().filter(|r| r.signature.is_some()) {
        if row.parsed_signature().expect("filtered").phi() != row.fraction() {
            bad += 1;
        }
    }
    report.at_most(S, "experimental table fractions", bad as f64, 0.0, "exact");

    let mut mismatched = Vec::new();
    for row in LOW_GENUS.iter() {
        for e in row.entries {
            let sig: OrbifoldSignature = e.signature.parse()?;
            if sig.phi() != row.fraction() {
                mismatched.push(format!("{} at {}", e.signature, row.fraction()));
            }
        }
    }
    let unexpected = mismatched.iter().filter(|m| !fixture.known_errata.contains(m)).count();
    let missing = fixture.known_errata.iter().filter(|m| !mismatched.contains(m)).count();
    report.at_most(
        S,
        "low-genus table fractions",
        (unexpected + missing) as f64,
        0.0,
        format!("known errata: {}", mismatched.join("; ")),
    );

    let bounds = SearchBounds::new(2, 5, 42);
    let below = enumerate_range(Some(&Rational::zero()), true, Some(&Rational::new(1, 42)), &bounds)?;
    let floor_ok = below.len() == 1 && below[0].to_string() == "(0;2,3,7)";
    report.at_most(S, "Hurwitz floor (g<=2, n<=5, nu<=42)", (!floor_ok) as u8 as f64, 0.0, "");

    for s in ["(0;2,3,7)", "(2;)", "(1;2,2)", "(0;3,3,4)", "(1;3)", "(2;2,3)"] {
        let g = group_for(&s.parse()?)?;
        let worst = g
            .relation_residuals()
            .into_iter()
            .map(|(r, tol)| r / tol)
            .fold(0.0, f64::max);
        report.at_most(S, format!("relations {s} (relative to tol)"), worst, 1.0, "");
    }

    let g2 = surface_group(2)?;
    let ball = cayley_ball(&g2, 3)?;
    let sizes: Vec<usize> = ball.layer_start.windows(2).map(|w| w[1] - w[0]).collect();
    let expected = [1usize, 8, 56, 392];
    let off: usize = sizes.iter().zip(expected).map(|(a, b)| a.abs_diff(b)).sum();
    report.at_most(S, "genus-2 sphere sizes up to R=3", off as f64, 0.0, format!("{sizes:?}"));
    report.regression(S, fixture, "word_metric_constant_genus2_r3", word_metric_constant(&ball)?)?;
    let tri = cayley_ball(&triangle_group(2, 3, 7)?, 6)?;
    report.regression(S, fixture, "ball_size_237_r6", tri.len() as f64)?;
    report.regression(S, fixture, "word_metric_constant_237_r6", word_metric_constant(&tri)?)?;
    Ok(())
}

/// Max violation of the cocycle identities over random triples of ball
/// elements: `(area cocycle, multiplier)`.
pub fn cocycle_identity_residuals(ball: &CayleyBall, theta: f64, triples: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = Multiplier::new(theta);
    let c = |a: &MoebiusTransform, b: &MoebiusTransform| area_cocycle(a, b, TriangleConvention::Standard);
    let (mut worst_c, mut worst_s) = (0.0f64, 0.0f64);
    for _ in 0..triples {
        let [g1, g2, g3] = [0, 0, 0].map(|_| *ball.matrix(rng.random_range(0..ball.len())));
        let lhs = c(&g1, &g2)? + c(&(g1 * g2), &g3)?;
        let rhs = c(&g1, &(g2 * g3))? + c(&g2, &g3)?;
        worst_c = worst_c.max((lhs - rhs).abs());
        let lhs = sigma.eval(&g1, &g2)? * sigma.eval(&(g1 * g2), &g3)?;
        let rhs = sigma.eval(&g1, &(g2 * g3))? * sigma.eval(&g2, &g3)?;
        worst_s = worst_s.max((lhs - rhs).norm());
    }
    Ok((worst_c, worst_s))
}

/// `max |c(γ,1)|, |c(1,γ)|, |c(γ,γ⁻¹)|` over the ball.
pub fn normalization_residual(ball: &CayleyBall) -> Result<f64> {
    let id = MoebiusTransform::identity();
    let mut worst = 0.0f64;
    for e in &ball.elements {
        let m = &e.matrix;
        for v in [
            area_cocycle(m, &id, TriangleConvention::Standard)?,
            area_cocycle(&id, m, TriangleConvention::Standard)?,
            area_cocycle(m, &m.inverse(), TriangleConvention::Standard)?,
        ] {
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}

/// Column action of `U(γ_i)`: for each column `x`, the row `γx` and the entry.
pub fn rep_columns(twist: &Twist, i: usize) -> Result<Vec<Option<(usize, Complex64)>>> {
    (0..twist.ball.len())
        .map(|x| match twist.mul_index(i, x)? {
            Some(y) => Ok(Some((y, twist.sigma(i, x)?))),
            None => Ok(None),
        })
        .collect()
}

/// `max |U(γ)U(γ') − σ(γ,γ')U(γγ')|` over rows of length `≤ R − |γ| − |γ'|`,
/// for all `γ, γ'` of length `≤ r`. The matrices are monomial, so products
/// are composed column by column.
pub fn representation_law_residual(twist: &Twist, r: usize) -> Result<f64> {
    let ball = twist.ball;
    let cols: Vec<_> = (0..ball.layer_start[r + 1])
        .map(|i| rep_columns(twist, i))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..cols.len() {
        for j in 0..cols.len() {
            let Some(k) = twist.mul_index(i, j)? else { continue };
            let budget = ball.radius as isize - ball.word_length(i) as isize - ball.word_length(j) as isize;
            if budget < 0 {
                continue;
            }
            let uk = rep_columns(twist, k)?;
            let s = twist.sigma(i, j)?;
            for x in 0..ball.len() {
                // Product (U_i U_j)[·, x].
                let prod = cols[j][x].and_then(|(y, a)| cols[i][y].map(|(z, b)| (z, a * b)));
                let target = uk[x].map(|(z, v)| (z, s * v));
                let value_at = |e: Option<(usize, Complex64)>, row: usize| {
                    e.filter(|(z, _)| *z == row).map_or(Complex64::new(0.0, 0.0), |(_, v)| v)
                };
                for (row, _) in [prod, target].into_iter().flatten() {
                    if ball.word_length(row) as isize <= budget {
                        worst = worst.max((value_at(prod, row) - value_at(target, row)).norm());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Twisted convolution by exhaustive matrix products over all ball pairs.
pub fn convolution_oracle(twist: &Twist, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    let ball = twist.ball;
    let mut out = AlgebraElement::zero(ball);
    for i in 0..ball.len() {
        for j in 0..ball.len() {
            if a.coeffs[i] == Complex64::new(0.0, 0.0) || b.coeffs[j] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let m = ball.matrix(i) * ball.matrix(j);
            let k = ball
                .find(&m)?
                .ok_or(Error::SupportOverflow { needed: ball.radius + 1, radius: ball.radius })?;
            let phase = twist.sigma.eval(ball.matrix(i), ball.matrix(j))?;
            out.coeffs[k] += a.coeffs[i] * b.coeffs[j] * phase;
        }
    }
    Ok(out)
}

/// `(associativity, oracle mismatch)` over random elements of radius `r`.
pub fn associativity_residuals(twist: &Twist, r: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut assoc, mut oracle) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let a = random_element(twist.ball, r, &mut rng);
        let b = random_element(twist.ball, r, &mut rng);
        let c = random_element(twist.ball, r, &mut rng);
        let ab = twist.convolve(&a, &b)?;
        let left = twist.convolve(&ab, &c)?;
        let right = twist.convolve(&a, &twist.convolve(&b, &c)?)?;
        assoc = assoc.max(left.max_abs_diff(&right));
        oracle = oracle.max(ab.max_abs_diff(&convolution_oracle(twist, &a, &b)?));
    }
    Ok((assoc, oracle))
}

/// `(‖extract(H) − 1_S‖_∞, ‖extract(I) − δ₁‖_∞)`.
pub fn fourier_exactness(twist: &Twist, r: usize) -> Result<(f64, f64)> {
    let ball = twist.ball;
    let h = harper_matrix(twist, None, None)?;
    let extracted = twist.fourier_extract(&h.matrix, r)?;
    let indicator = AlgebraElement::generators(ball, &vec![1.0; ball.generators()]);
    let n = ball.len();
    let id = faer::Mat::<Complex64>::identity(n, n);
    let e_id = twist.fourier_extract(&id, r)?;
    Ok((
        extracted.max_abs_diff(&indicator),
        e_id.max_abs_diff(&AlgebraElement::delta(ball, 0)),
    ))
}

fn cocycle_suite(report: &mut VerifyReport) -> Result<()> {
    const S: &str = "cocycle";
    let tri = triangle_group(2, 3, 7)?;
    let [a, b, c] = [tri.polygon[0], tri.polygon[1], tri.polygon[2]];
    let area = triangle_area_signed(a, b, c).abs();
    report.at_most(S, "(2,3,7) triangle area - pi/42", (area - PI / 42.0).abs(), 1e-10, "");

    let theta = 2.0 * PI / 5.0;
    let tri_ball = cayley_ball(&tri, 4)?;
    let g2_ball = cayley_ball(&surface_group(2)?, 3)?;
    for (label, ball) in [("(2,3,7) R=4", &tri_ball), ("genus-2 R=3", &g2_ball)] {
        let (dc, ds) = cocycle_identity_residuals(ball, theta, 1000, 7)?;
        report.at_most(S, format!("area cocycle identity {label}"), dc, 1e-9, "1000 triples");
        report.at_most(S, format!("multiplier identity {label}"), ds, 1e-9, "1000 triples");
        report.at_most(S, format!("cocycle normalization {label}"), normalization_residual(ball)?, 1e-12, "");
        let tw = Twist::new(ball, Multiplier::new(theta));
        let h = harper_matrix(&tw, None, None)?;
        report.at_most(S, format!("Harper hermiticity {label}"), hermitian_defect(&h.matrix), 1e-12, "");
        report.at_most(S, format!("representation law {label}"), representation_law_residual(&tw, 1)?, 1e-10, "bulk rows");
        let (assoc, oracle) = associativity_residuals(&tw, 1, 5, 11)?;
        report.at_most(S, format!("convolution associativity {label}"), assoc, 1e-10, "");
        report.at_most(S, format!("convolution vs oracle {label}"), oracle, 1e-10, "");
        let (fh, fi) = fourier_exactness(&tw, ball.radius - 1)?;
        report.at_most(S, format!("Fourier extraction of H {label}"), fh, 1e-12, "");
        report.at_most(S, format!("Fourier extraction of I {label}"), fi, 0.0, "exact");
    }
    Ok(())
}

/// `max |d − δh₀|` after solving for a synthetic coboundary `d = δh₀`.
pub fn synthetic_recovery_residual(ball: &CayleyBall, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unknowns = ball.layer_start[ball.radius];
    let mut h0: Vec<f64> = (0..unknowns).map(|_| rng.random_range(-1.0..1.0)).collect();
    h0[0] = 0.0;
    let shape = defect_table_with(ball, |_, _| Ok(0.0))?;
    let values = coboundary(&shape, &h0);
    let table = CocycleDefectTable { values, ..shape };
    Ok(solve_coboundary(&table, ball.group.genus())?.residual)
}

fn compare_suite(report: &mut VerifyReport, fixture: &Fixture) -> Result<()> {
    const S: &str = "compare";
    let g2 = surface_group(2)?;
    let ball = cayley_ball(&g2, 4)?;
    report.at_most(S, "synthetic coboundary recovery R=4", synthetic_recovery_residual(&ball, 3)?, 1e-10, "");

    let f = fundamental_pairings(&g2)?;
    let area = 2.0 * PI * g2.signature.phi().to_f64();
    report.at_most(S, "fundamental class: |<c,[S]>| - 2 pi phi", (f.area.abs() - area).abs(), 1e-9, "");
    report.at_most(S, "fundamental class: |<Psi,[S]>| - 2g", (f.symplectic.abs() - 4.0).abs(), 0.0, "");

    let literal = solve_coboundary(&defect_table(&ball, 1.0)?, 2)?;
    report.regression(S, fixture, "literal_residual_genus2_r4", literal.residual)?;

    let scale = f.symplectic / f.area;
    let run = comparison_run(&g2, 2.0 * PI / 5.0, &[2, 3, 4], scale, 10, 5)?;
    let worst = run.residual_by_radius.iter().map(|r| r.residual).fold(0.0, f64::max);
    report.at_most(S, "normalized coboundary residual R=2,3,4", worst, 1e-10, "");
    let excess = run
        .triples
        .iter()
        .map(|t| t.deviation - t.bound)
        .fold(f64::NEG_INFINITY, f64::max);
    report.at_most(S, "comparison deviation minus residual bound", excess, 1e-9, "");
    Ok(())
}
