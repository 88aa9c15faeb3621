//! The symplectic-pairing cocycle against the area cocycle.
//!
//! On a ball we tabulate `d(γ₁, γ₂) = ΣΨ_j(γ₁, γ₂) − c(γ₁, γ₂)` over interior
//! pairs and look for `h̃` with `d = h̃(γ₁) − h̃(γ₁γ₂) + h̃(γ₂)` by least
//! squares. The homogeneous system is solved by any homomorphism `Γ → ℝ`, so
//! after fixing `h̃(1) = 0` the expected nullity is `2g`.
//!
//! Both cocycles pair with the fundamental class: `c` gives the orbifold area
//! `2πφ` and `ΣΨ_j` gives `±2g`. The difference `ΣΨ − c` is therefore only a
//! coboundary after rescaling `c` by [`cohomological_area_scale`]; the
//! unscaled table is kept as the literal statement and fails as soon as the
//! ball contains a fundamental cycle.

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{symplectic_form, AlgebraElement, Twist};
use crate::error::{Error, Result};
use crate::fuchsian::{cayley_ball, CayleyBall, GroupPresentation};
use crate::hyperbolic::{area_cocycle, MoebiusTransform, Multiplier, TriangleConvention};

/// Relative singular-value cutoff of the least-squares solve.
pub const SVD_RELATIVE_CUTOFF: f64 = 1e-10;

/// `ΣΨ_j(γ₁, γ₂) = s(Ω(γ₁), Ω(γ₂))` for ball indices.
pub fn symplectic_pairing(ball: &CayleyBall, i: usize, j: usize) -> i64 {
    symplectic_form(ball.omega(i), ball.omega(j))
}

#[derive(Clone, Debug)]
pub struct CocycleDefectTable {
    /// Pairs `(γ₁, γ₂, γ₁γ₂)` with all three within radius `R − 1`.
    pub pairs: Vec<(usize, usize, usize)>,
    pub values: Vec<f64>,
    /// Unknowns are the elements of radius `≤ R − 1`.
    pub unknowns: usize,
}

/// `ΣΨ_j − scale · c` on interior pairs; `scale = 1` is the literal defect.
pub fn defect_table(ball: &CayleyBall, area_scale: f64) -> Result<CocycleDefectTable> {
    let twist = Twist::new(ball, Multiplier::untwisted());
    defect_table_with(ball, |i, j| {
        Ok(symplectic_pairing(ball, i, j) as f64 - area_scale * twist.area(i, j)?)
    })
}

/// Values of `ΣΨ_j` and of the area cocycle on the fundamental 2-cycle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalPairings {
    pub symplectic: f64,
    pub area: f64,
}

/// Pairs both cocycles with the rational 2-cycle of the long relation
/// `x₁⋯x_L`: `Σ_k [x₁⋯x_{k−1} | x_k]`, corrected by `−(1/ν) Σ_k [C^k | C]`
/// per cone generator and by `[s | s⁻¹]` terms (on which both vanish).
pub fn fundamental_pairings(group: &GroupPresentation) -> Result<FundamentalPairings> {
    let long = group
        .relators
        .last()
        .filter(|_| group.genus() > 0 || group.signature.cone_points() > 0)
        .ok_or_else(|| Error::Precondition("group has no long relation".into()))?;
    let mut symplectic = 0i64;
    let mut area = 0.0;
    let mut prefix: Vec<usize> = Vec::new();
    for &x in long {
        let p = group.word_matrix(&prefix);
        let omega_p = crate::fuchsian::abelianization_cocycle(&prefix, group);
        symplectic += symplectic_form(&omega_p, &group.letter_abelianization(x));
        area += area_cocycle(&p, &group.letters[x].matrix, TriangleConvention::Standard)?;
        prefix.push(x);
    }
    let g = group.genus();
    for gen in &group.generators[2 * g..] {
        let nu = gen.order.expect("cone generators carry their order");
        let mut power = MoebiusTransform::identity();
        let mut fan = 0.0;
        for _ in 0..nu {
            fan += area_cocycle(&power, &gen.matrix, TriangleConvention::Standard)?;
            power = power * gen.matrix;
        }
        area -= fan / nu as f64;
    }
    Ok(FundamentalPairings {
        symplectic: symplectic as f64,
        area,
    })
}

/// The factor `α` with `[ΣΨ_j] = α [c]`, i.e. `−2g/(2πφ)` up to orientation.
pub fn cohomological_area_scale(group: &GroupPresentation) -> Result<f64> {
    let f = fundamental_pairings(group)?;
    Ok(f.symplectic / f.area)
}

/// Interior-pair table of an arbitrary 2-cochain.
pub fn defect_table_with(
    ball: &CayleyBall,
    f: impl Fn(usize, usize) -> Result<f64>,
) -> Result<CocycleDefectTable> {
    if ball.radius < 1 {
        return Err(Error::EmptyInterior {
            support: 1,
            radius: ball.radius,
        });
    }
    let twist = Twist::new(ball, Multiplier::untwisted());
    let unknowns = ball.layer_start[ball.radius];
    let mut pairs = Vec::new();
    let mut values = Vec::new();
    for i in 0..unknowns {
        for j in 0..unknowns {
            let Some(k) = twist.mul_index(i, j)? else { continue };
            if k < unknowns {
                pairs.push((i, j, k));
                values.push(f(i, j)?);
            }
        }
    }
    Ok(CocycleDefectTable {
        pairs,
        values,
        unknowns,
    })
}

#[derive(Clone, Debug)]
pub struct CoboundarySolution {
    /// `h̃` on the interior elements, `h̃(1) = 0`.
    pub h: Vec<f64>,
    /// `max |d − δh̃|` over interior pairs.
    pub residual: f64,
    /// Dimension of the solution space of `δh = 0` with `h(1) = 0`.
    pub nullity: usize,
}

/// `δh(γ₁, γ₂) = h(γ₁) − h(γ₁γ₂) + h(γ₂)` for every table pair.
pub fn coboundary(table: &CocycleDefectTable, h: &[f64]) -> Vec<f64> {
    table.pairs.iter().map(|&(i, j, k)| h[i] - h[k] + h[j]).collect()
}

/// Minimum-norm least-squares `h̃` with `h̃(1) = 0`.
pub fn solve_coboundary(table: &CocycleDefectTable, genus: usize) -> Result<CoboundarySolution> {
    let n = table.unknowns;
    if n < 2 {
        return Err(Error::EmptyInterior { support: 1, radius: 1 });
    }
    // Column c ↔ element c + 1; the identity is pinned to zero, which makes
    // rows with a trivial factor vanish identically.
    let rows: Vec<usize> = (0..table.pairs.len())
        .filter(|&r| table.pairs[r].0 != 0 && table.pairs[r].1 != 0)
        .collect();
    let m = rows.len();
    let mut a = Mat::<f64>::zeros(m, n - 1);
    let mut b = Mat::<f64>::zeros(m, 1);
    for (r, &row) in rows.iter().enumerate() {
        let (i, j, k) = table.pairs[row];
        for (idx, coef) in [(i, 1.0), (k, -1.0), (j, 1.0)] {
            if idx != 0 {
                a[(r, idx - 1)] += coef;
            }
        }
        b[(r, 0)] = table.values[row];
    }
    let svd = a.thin_svd().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let smax = (0..s.nrows()).map(|i| s[i]).fold(0.0f64, f64::max);
    let cutoff = SVD_RELATIVE_CUTOFF * smax.max(1.0);
    let nullity = (0..s.nrows()).filter(|&i| s[i] <= cutoff).count();
    let utb = svd.U().transpose() * &b;
    let mut coeffs = Mat::<f64>::zeros(s.nrows(), 1);
    for i in 0..s.nrows() {
        if s[i] > cutoff {
            coeffs[(i, 0)] = utb[(i, 0)] / s[i];
        }
    }
    let x = svd.V() * &coeffs;
    let mut h = vec![0.0; n];
    for c in 0..n - 1 {
        h[c + 1] = x[(c, 0)];
    }
    let residual = coboundary(table, &h)
        .iter()
        .zip(&table.values)
        .map(|(dh, d)| (d - dh).abs())
        .fold(0.0, f64::max);
    if nullity > 2 * genus {
        return Err(Error::RankDeficient {
            nullity,
            expected: 2 * genus,
        });
    }
    Ok(CoboundarySolution { h, residual, nullity })
}

/// `λ(a₀, a₁) = Σ_{γ₀γ₁=1} h̃(γ₁) a₀(γ₀) a₁(γ₁) σ(γ₀, γ₁)`; `h̃` vanishes
/// outside its table.
pub fn lambda(twist: &Twist, h: &[f64], a0: &AlgebraElement, a1: &AlgebraElement) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (g1, y) in a1.support() {
        let hv = h.get(g1).copied().unwrap_or(0.0);
        if hv == 0.0 {
            continue;
        }
        let g0 = twist.ball.inverse[g1];
        let x = a0.coeffs[g0];
        acc += x * y * hv * twist.sigma(g0, g1)?;
    }
    Ok(acc)
}

/// `bλ(a₀, a₁, a₂) = λ(a₀a₁, a₂) − λ(a₀, a₁a₂) + λ(a₂a₀, a₁)`.
pub fn b_lambda(
    twist: &Twist,
    h: &[f64],
    a0: &AlgebraElement,
    a1: &AlgebraElement,
    a2: &AlgebraElement,
) -> Result<Complex64> {
    let a01 = twist.convolve(a0, a1)?;
    let a12 = twist.convolve(a1, a2)?;
    let a20 = twist.convolve(a2, a0)?;
    Ok(lambda(twist, h, &a01, a2)? - lambda(twist, h, a0, &a12)? + lambda(twist, h, &a20, a1)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusResidual {
    pub radius: usize,
    pub residual: f64,
    pub nullity: usize,
    pub pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleCheck {
    pub deviation: f64,
    /// `residual × ‖a₀‖₁‖a₁‖₁‖a₂‖₁`.
    pub bound: f64,
}

/// Residuals and triple checks for one choice of area scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRun {
    pub area_scale: f64,
    pub residual_by_radius: Vec<RadiusResidual>,
    pub max_comparison_deviation: f64,
    pub triples: Vec<TripleCheck>,
    pub within_bound: bool,
}

impl ComparisonRun {
    /// Residuals never increase with the radius.
    pub fn monotone(&self) -> bool {
        self.residual_by_radius
            .windows(2)
            .all(|w| w[1].residual <= w[0].residual)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub signature: String,
    pub radius: usize,
    pub theta: f64,
    /// Literal defect `ΣΨ − c`.
    pub residual_by_radius: Vec<RadiusResidual>,
    pub max_comparison_deviation: f64,
    pub within_bound: bool,
    pub fundamental: FundamentalPairings,
    /// Defect `ΣΨ − αc` with the cohomological scale `α`.
    pub normalized: ComparisonRun,
}

/// Random element supported on radius `≤ radius`, each coefficient present with probability ½.
pub fn random_element(ball: &CayleyBall, radius: usize, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let mut a = AlgebraElement::zero(ball);
    for i in 0..ball.layer_start[radius + 1] {
        if rng.random_bool(0.5) {
            a.coeffs[i] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    a
}

/// `|tr^K − α tr_c − bλ|` for one triple, with its residual bound.
pub fn check_triple(
    twist: &Twist,
    solution: &CoboundarySolution,
    area_scale: f64,
    a0: &AlgebraElement,
    a1: &AlgebraElement,
    a2: &AlgebraElement,
) -> Result<TripleCheck> {
    let lhs = twist.tr_k(a0, a1, a2)? - twist.tr_c(a0, a1, a2)? * area_scale;
    let bl = b_lambda(twist, &solution.h, a0, a1, a2)?;
    Ok(TripleCheck {
        deviation: (lhs - bl).norm(),
        bound: solution.residual * a0.l1_norm() * a1.l1_norm() * a2.l1_norm(),
    })
}

/// Solves the coboundary problem at each radius and checks the comparison
/// identity on random triples in the largest ball. Test elements keep every
/// pair interior: `a₁, a₂` live on the unit ball and `a₀` on radius `R − 2`.
pub fn comparison_run(
    group: &GroupPresentation,
    theta: f64,
    radii: &[usize],
    area_scale: f64,
    samples: usize,
    seed: u64,
) -> Result<ComparisonRun> {
    let radius = *radii
        .iter()
        .max()
        .ok_or_else(|| Error::Precondition("no radii given".into()))?;
    if radius < 3 {
        return Err(Error::Precondition(format!("comparison needs radius >= 3, got {radius}")));
    }
    let mut residual_by_radius = Vec::new();
    let mut last = None;
    for &r in radii {
        let ball = cayley_ball(group, r)?;
        let table = defect_table(&ball, area_scale)?;
        let sol = solve_coboundary(&table, group.genus())?;
        residual_by_radius.push(RadiusResidual {
            radius: r,
            residual: sol.residual,
            nullity: sol.nullity,
            pairs: table.pairs.len(),
        });
        if r == radius {
            last = Some((ball, sol));
        }
    }
    let (ball, sol) = last.expect("largest radius is in the list");
    let twist = Twist::new(&ball, Multiplier::new(theta));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples = Vec::with_capacity(samples);
    for _ in 0..samples {
        let a0 = random_element(&ball, radius - 2, &mut rng);
        let a1 = random_element(&ball, 1, &mut rng);
        let a2 = random_element(&ball, 1, &mut rng);
        triples.push(check_triple(&twist, &sol, area_scale, &a0, &a1, &a2)?);
    }
    let max_comparison_deviation = triples.iter().map(|t| t.deviation).fold(0.0, f64::max);
    // Rounding in the pairings themselves is not covered by the residual bound.
    let within_bound = triples.iter().all(|t| t.deviation <= t.bound + 1e-9);
    Ok(ComparisonRun {
        area_scale,
        residual_by_radius,
        max_comparison_deviation,
        triples,
        within_bound,
    })
}

/// The literal comparison (`α = 1`) next to the cohomologically scaled one.
pub fn comparison_report(
    group: &GroupPresentation,
    theta: f64,
    radii: &[usize],
    samples: usize,
    seed: u64,
) -> Result<ComparisonReport> {
    if group.genus() == 0 {
        return Err(Error::Precondition("the comparison needs genus >= 1".into()));
    }
    let literal = comparison_run(group, theta, radii, 1.0, samples, seed)?;
    let fundamental = fundamental_pairings(group)?;
    let normalized = comparison_run(
        group,
        theta,
        radii,
        fundamental.symplectic / fundamental.area,
        samples,
        seed,
    )?;
    Ok(ComparisonReport {
        signature: group.signature.to_string(),
        radius: *radii.iter().max().expect("radii checked by comparison_run"),
        theta,
        residual_by_radius: literal.residual_by_radius,
        max_comparison_deviation: literal.max_comparison_deviation,
        within_bound: literal.within_bound,
        fundamental,
        normalized,
    })
}
