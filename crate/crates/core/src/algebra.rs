//! The twisted group algebra on a Cayley ball.
//!
//! Elements are coefficient vectors indexed by ball elements. The left
//! σ-regular representation acts by `U(γ)δ_x = σ(γ, x) δ_{γx}`, so
//! `U(γ)U(γ') = σ(γ, γ') U(γγ')` and `(a∗b)(γ) = Σ_{γ₁γ₂=γ} a(γ₁)b(γ₂)σ(γ₁, γ₂)`.
//! The area cocycle vanishes on `(γ, γ⁻¹)`, so `U(γ)* = U(γ⁻¹)` and
//! `a*(γ) = conj(a(γ⁻¹))`.

use std::ops::{Add, Mul, Sub};

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fuchsian::CayleyBall;
use crate::hyperbolic::{area_cocycle, Multiplier};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A finitely supported function on the group, restricted to a ball.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    pub coeffs: Vec<Complex64>,
}

impl AlgebraElement {
    pub fn zero(ball: &CayleyBall) -> Self {
        AlgebraElement {
            coeffs: vec![ZERO; ball.len()],
        }
    }

    /// The point mass `δ_γ` at ball index `i`.
    pub fn delta(ball: &CayleyBall, i: usize) -> Self {
        let mut a = AlgebraElement::zero(ball);
        a.coeffs[i] = ONE;
        a
    }

    pub fn from_pairs(ball: &CayleyBall, pairs: &[(usize, Complex64)]) -> Self {
        let mut a = AlgebraElement::zero(ball);
        for &(i, v) in pairs {
            a.coeffs[i] += v;
        }
        a
    }

    /// Indicator of the generating set, weighted.
    pub fn generators(ball: &CayleyBall, weights: &[f64]) -> Self {
        let mut a = AlgebraElement::zero(ball);
        for (s, w) in weights.iter().enumerate() {
            a.coeffs[1 + s] += Complex64::new(*w, 0.0);
        }
        a
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != ZERO)
            .map(|(i, v)| (i, *v))
    }

    pub fn support_radius(&self, ball: &CayleyBall) -> usize {
        self.support().map(|(i, _)| ball.word_length(i)).max().unwrap_or(0)
    }

    pub fn adjoint(&self, ball: &CayleyBall) -> Self {
        AlgebraElement {
            coeffs: (0..self.len())
                .map(|i| self.coeffs[ball.inverse[i]].conj())
                .collect(),
        }
    }

    /// `max_γ |a(γ) − a*(γ)|`.
    pub fn self_adjoint_defect(&self, ball: &CayleyBall) -> f64 {
        let adj = self.adjoint(ball);
        self.coeffs
            .iter()
            .zip(&adj.coeffs)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|v| v.norm()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        AlgebraElement {
            coeffs: self.coeffs.iter().map(|v| v * k).collect(),
        }
    }

    /// Coefficients multiplied pointwise by a real function of the index.
    pub fn weighted(&self, w: impl Fn(usize) -> f64) -> Self {
        AlgebraElement {
            coeffs: self.coeffs.iter().enumerate().map(|(i, v)| v * w(i)).collect(),
        }
    }

    /// Largest `|a(γ)|` on each sphere of the ball.
    pub fn decay_profile(&self, ball: &CayleyBall) -> Vec<f64> {
        let mut out = vec![0.0f64; ball.radius + 1];
        for (i, v) in self.coeffs.iter().enumerate() {
            let l = ball.word_length(i);
            out[l] = out[l].max(v.norm());
        }
        out
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;

    fn add(self, r: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            coeffs: self.coeffs.iter().zip(&r.coeffs).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;

    fn sub(self, r: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            coeffs: self.coeffs.iter().zip(&r.coeffs).map(|(x, y)| x - y).collect(),
        }
    }
}

impl Mul<Complex64> for &AlgebraElement {
    type Output = AlgebraElement;

    fn mul(self, k: Complex64) -> AlgebraElement {
        self.scale(k)
    }
}

/// How the representation attaches phases to matrix entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RepConvention {
    /// `U(γ)[γx, x] = σ(γ, x)`; a projective representation with multiplier σ.
    #[default]
    Standard,
    /// `U(γ)[γx, x] = σ(γx, x)`, the pointwise formula read literally; it
    /// does not satisfy `U(γ)U(γ') = σ(γ, γ')U(γγ')`.
    Literal,
}

/// A ball together with a multiplier: the finite model of `ℂ(Γ, σ)`.
#[derive(Clone, Copy, Debug)]
pub struct Twist<'a> {
    pub ball: &'a CayleyBall,
    pub sigma: Multiplier,
}

impl<'a> Twist<'a> {
    pub fn new(ball: &'a CayleyBall, sigma: Multiplier) -> Self {
        Twist { ball, sigma }
    }

    /// Index of `x_i x_j`, or `None` outside the ball.
    pub fn mul_index(&self, i: usize, j: usize) -> Result<Option<usize>> {
        let b = self.ball;
        match (b.word_length(i), b.word_length(j)) {
            (0, _) => Ok(Some(j)),
            (_, 0) => Ok(Some(i)),
            (1, _) => Ok(b.left[j][b.elements[i].word[0]]),
            (_, 1) => Ok(b.right[i][b.elements[j].word[0]]),
            _ => b.find(&(b.matrix(i) * b.matrix(j))),
        }
    }

    pub fn area(&self, i: usize, j: usize) -> Result<f64> {
        if i == 0 || j == 0 {
            return Ok(0.0);
        }
        area_cocycle(self.ball.matrix(i), self.ball.matrix(j), self.sigma.convention)
    }

    pub fn sigma(&self, i: usize, j: usize) -> Result<Complex64> {
        if self.sigma.theta == 0.0 {
            return Ok(ONE);
        }
        Ok(self.sigma.phase(self.area(i, j)?))
    }

    /// Twisted convolution; refuses products that could leave the ball.
    pub fn convolve(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        let needed = a.support_radius(self.ball) + b.support_radius(self.ball);
        if needed > self.ball.radius {
            return Err(Error::SupportOverflow {
                needed,
                radius: self.ball.radius,
            });
        }
        let mut out = AlgebraElement::zero(self.ball);
        let bs: Vec<_> = b.support().collect();
        for (i, x) in a.support() {
            for &(j, y) in &bs {
                let k = self.mul_index(i, j)?.ok_or(Error::SupportOverflow {
                    needed,
                    radius: self.ball.radius,
                })?;
                out.coeffs[k] += x * y * self.sigma(i, j)?;
            }
        }
        Ok(out)
    }

    /// The single coefficient `(a∗b)(γ_k)`. Terms whose second factor falls
    /// outside the ball vanish, so no support condition is needed.
    pub fn convolve_at(&self, a: &AlgebraElement, b: &AlgebraElement, k: usize) -> Result<Complex64> {
        let mut acc = ZERO;
        for (i, x) in a.support() {
            let Some(j) = self.mul_index(self.ball.inverse[i], k)? else { continue };
            let y = b.coeffs[j];
            if y != ZERO {
                acc += x * y * self.sigma(i, j)?;
            }
        }
        Ok(acc)
    }

    /// Matrix of `U(γ_i)` truncated to the ball.
    pub fn rep_matrix(&self, i: usize, convention: RepConvention) -> Result<Mat<Complex64>> {
        let n = self.ball.len();
        let mut u = Mat::<Complex64>::zeros(n, n);
        for x in 0..n {
            if let Some(y) = self.mul_index(i, x)? {
                u[(y, x)] = match convention {
                    RepConvention::Standard => self.sigma(i, x)?,
                    RepConvention::Literal => self.sigma(y, x)?,
                };
            }
        }
        Ok(u)
    }

    /// Matrix of `Σ_γ a(γ)U(γ)` truncated to the ball.
    pub fn operator_matrix(&self, a: &AlgebraElement) -> Result<Mat<Complex64>> {
        let n = self.ball.len();
        let mut m = Mat::<Complex64>::zeros(n, n);
        for (i, v) in a.support() {
            for x in 0..n {
                if let Some(y) = self.mul_index(i, x)? {
                    m[(y, x)] += v * self.sigma(i, x)?;
                }
            }
        }
        Ok(m)
    }

    /// Recovers `â(γ)` for `|γ| ≤ r` from a matrix by averaging phase-corrected
    /// entries over the bulk `{x : |x| ≤ R − r}`.
    pub fn fourier_extract(&self, a: &Mat<Complex64>, r: usize) -> Result<AlgebraElement> {
        let ball = self.ball;
        if r > ball.radius {
            return Err(Error::EmptyInterior {
                support: r,
                radius: ball.radius,
            });
        }
        let bulk = ball.layer_start[ball.radius - r + 1];
        let support = ball.layer_start[r + 1];
        let mut out = AlgebraElement::zero(ball);
        for g in 0..support {
            let mut acc = ZERO;
            for x in 0..bulk {
                let y = self.mul_index(g, x)?.ok_or_else(|| {
                    Error::Construction(format!("bulk product {g}·{x} left the ball"))
                })?;
                acc += a[(y, x)] * self.sigma(g, x)?.conj();
            }
            out.coeffs[g] = acc / bulk as f64;
        }
        Ok(out)
    }

    /// Generic cyclic sum `Σ_{γ₀γ₁γ₂=1} a₀(γ₀)a₁(γ₁)a₂(γ₂) f(γ₁,γ₂) σ(γ₁,γ₂)`.
    /// Exact on ball-supported inputs: if `γ₁γ₂` leaves the ball, so does `γ₀`.
    pub fn cyclic_sum(
        &self,
        a0: &AlgebraElement,
        a1: &AlgebraElement,
        a2: &AlgebraElement,
        f: impl Fn(usize, usize) -> Result<f64>,
    ) -> Result<Complex64> {
        let mut acc = ZERO;
        let s2: Vec<_> = a2.support().collect();
        for (i, x) in a1.support() {
            for &(j, y) in &s2 {
                let Some(k) = self.mul_index(i, j)? else { continue };
                let z = a0.coeffs[self.ball.inverse[k]];
                if z == ZERO {
                    continue;
                }
                let w = f(i, j)?;
                if w != 0.0 {
                    acc += z * x * y * w * self.sigma(i, j)?;
                }
            }
        }
        Ok(acc)
    }

    /// The area-cocycle pairing `tr_c`.
    pub fn tr_c(&self, a0: &AlgebraElement, a1: &AlgebraElement, a2: &AlgebraElement) -> Result<Complex64> {
        self.cyclic_sum(a0, a1, a2, |i, j| self.area(i, j))
    }

    /// `δ_j a(γ) = Ω_j(γ) a(γ)`.
    pub fn derivation(&self, a: &AlgebraElement, j: usize) -> AlgebraElement {
        a.weighted(|i| self.ball.omega(i)[j] as f64)
    }

    /// The Connes–Kubo pairing, evaluated through derivations and products:
    /// `Σ_j tr(a₀(δ_j a₁ · δ_{j+g} a₂ − δ_{j+g} a₁ · δ_j a₂))`.
    pub fn tr_k(&self, a0: &AlgebraElement, a1: &AlgebraElement, a2: &AlgebraElement) -> Result<Complex64> {
        let g = self.ball.group.genus();
        let mut acc = ZERO;
        let s0: Vec<_> = a0.support().collect();
        for j in 0..g {
            let (d1j, d1k) = (self.derivation(a1, j), self.derivation(a1, j + g));
            let (d2j, d2k) = (self.derivation(a2, j), self.derivation(a2, j + g));
            for &(i0, x) in &s0 {
                let k = self.ball.inverse[i0];
                let b = self.convolve_at(&d1j, &d2k, k)? - self.convolve_at(&d1k, &d2j, k)?;
                acc += x * b * self.sigma(i0, k)?;
            }
        }
        Ok(acc)
    }
}

/// The von Neumann trace, `a(1)`.
pub fn trace_vn(a: &AlgebraElement) -> Complex64 {
    a.coeffs[0]
}

/// `Σ_j (u_j v_{j+g} − u_{j+g} v_j)` for abelianization vectors.
pub fn symplectic_form(u: &[i64], v: &[i64]) -> i64 {
    let g = u.len() / 2;
    (0..g).map(|j| u[j] * v[j + g] - u[j + g] * v[j]).sum()
}

/// Harper operator `Σ_{s∈S} w_s U(s) + V` on a ball.
#[derive(Clone, Debug)]
pub struct HarperMatrix {
    pub theta: f64,
    pub weights: Vec<f64>,
    pub matrix: Mat<Complex64>,
}

impl HarperMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |H − H*|`.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.matrix)
    }
}

pub fn hermitian_defect(m: &Mat<Complex64>) -> f64 {
    let n = m.nrows();
    let mut d = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            d = d.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    d
}

/// Which generators a Harper term includes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarperPart {
    All,
    /// Hyperbolic generators `A_j^{±1}`, `B_j^{±1}`.
    Free,
    /// Elliptic generators `C_i^{±1}`.
    Interaction,
}

pub fn harper_part(twist: &Twist, weights: &[f64], part: HarperPart) -> Result<Mat<Complex64>> {
    let ball = twist.ball;
    let letters = &ball.group.letters;
    if weights.len() != letters.len() {
        return Err(Error::Precondition(format!(
            "{} weights for {} generators",
            weights.len(),
            letters.len()
        )));
    }
    let two_g = 2 * ball.group.genus();
    let n = ball.len();
    let mut h = Mat::<Complex64>::zeros(n, n);
    for (s, letter) in letters.iter().enumerate() {
        let keep = match part {
            HarperPart::All => true,
            HarperPart::Free => letter.generator < two_g,
            HarperPart::Interaction => letter.generator >= two_g,
        };
        if !keep || weights[s] == 0.0 {
            continue;
        }
        for x in 0..n {
            if let Some(y) = ball.left[x][s] {
                h[(y, x)] += twist.sigma(1 + s, x)? * weights[s];
            }
        }
    }
    Ok(h)
}

/// Assembles `H_{σ,V}`; the potential must be self-adjoint.
pub fn harper_matrix(
    twist: &Twist,
    weights: Option<&[f64]>,
    potential: Option<&AlgebraElement>,
) -> Result<HarperMatrix> {
    let ones = vec![1.0; twist.ball.generators()];
    let weights = weights.unwrap_or(&ones);
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Precondition("non-finite generator weight".into()));
    }
    let mut matrix = harper_part(twist, weights, HarperPart::All)?;
    if let Some(v) = potential {
        let defect = v.self_adjoint_defect(twist.ball);
        if defect > 1e-12 {
            return Err(Error::NotSelfAdjoint(defect));
        }
        let vm = twist.operator_matrix(v)?;
        matrix += vm;
    }
    Ok(HarperMatrix {
        theta: twist.sigma.theta,
        weights: weights.to_vec(),
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::{cayley_ball, surface_group, triangle_group};

    #[test]
    fn identity_is_unit() {
        let g = triangle_group(2, 3, 7).unwrap();
        let ball = cayley_ball(&g, 3).unwrap();
        let tw = Twist::new(&ball, Multiplier::new(0.9));
        let a = AlgebraElement::from_pairs(&ball, &[(2, Complex64::new(0.5, 1.0)), (7, ONE)]);
        let d = AlgebraElement::delta(&ball, 0);
        assert_eq!(tw.convolve(&d, &a).unwrap(), a);
        assert_eq!(tw.convolve(&a, &d).unwrap(), a);
        assert_eq!(trace_vn(&d), ONE);
        assert_eq!(trace_vn(&AlgebraElement::delta(&ball, 5)), ZERO);
    }

    #[test]
    fn overflow_is_reported() {
        let g = surface_group(2).unwrap();
        let ball = cayley_ball(&g, 2).unwrap();
        let tw = Twist::new(&ball, Multiplier::new(0.3));
        let far = AlgebraElement::delta(&ball, ball.len() - 1);
        let err = tw.convolve(&far, &AlgebraElement::delta(&ball, 1)).unwrap_err();
        assert!(matches!(err, Error::SupportOverflow { needed: 3, radius: 2 }));
    }

    #[test]
    fn symplectic_form_examples() {
        assert_eq!(symplectic_form(&[1, 0, 0, 0], &[0, 0, 1, 0]), 1);
        assert_eq!(symplectic_form(&[1, 0, 0, 0], &[1, 0, 0, 0]), 0);
        // Ω(A1 B2) = e1 + e4, Ω(A2) = e2.
        assert_eq!(symplectic_form(&[1, 0, 0, 1], &[0, 1, 0, 0]), -1);
    }

    #[test]
    fn harper_rejects_bad_potential() {
        let g = surface_group(2).unwrap();
        let ball = cayley_ball(&g, 1).unwrap();
        let tw = Twist::new(&ball, Multiplier::new(0.3));
        let v = AlgebraElement::from_pairs(&ball, &[(1, ONE)]);
        assert!(matches!(
            harper_matrix(&tw, None, Some(&v)),
            Err(Error::NotSelfAdjoint(_))
        ));
        let v = AlgebraElement::from_pairs(&ball, &[(0, Complex64::new(0.5, 0.0)), (1, ONE), (2, ONE)]);
        assert!(harper_matrix(&tw, None, Some(&v)).is_ok());
    }
}
