use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use orbifold_hall::algebra::*;
use orbifold_hall::fuchsian::{cayley_ball, surface_group, triangle_group, CayleyBall};
use orbifold_hall::hyperbolic::{area_cocycle, Multiplier, TriangleConvention};
use orbifold_hall::spectral::spectrum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn element(ball: &CayleyBall, radius: usize, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let mut a = AlgebraElement::zero(ball);
    for i in 0..ball.layer_start[radius + 1] {
        a.coeffs[i] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    a
}

/// Multiplier straight from matrices, bypassing the ball tables.
fn sigma(ball: &CayleyBall, theta: f64, i: usize, j: usize) -> Complex64 {
    let c = area_cocycle(ball.matrix(i), ball.matrix(j), TriangleConvention::Standard).unwrap();
    Complex64::from_polar(1.0, theta * c)
}

fn product(ball: &CayleyBall, i: usize, j: usize) -> Option<usize> {
    ball.find(&(ball.matrix(i) * ball.matrix(j))).unwrap()
}

/// Double-loop twisted convolution.
fn convolve_oracle(ball: &CayleyBall, theta: f64, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero(ball);
    for i in 0..ball.len() {
        for j in 0..ball.len() {
            if a.coeffs[i] == ZERO || b.coeffs[j] == ZERO {
                continue;
            }
            let k = product(ball, i, j).expect("supports chosen to stay inside the ball");
            out.coeffs[k] += a.coeffs[i] * b.coeffs[j] * sigma(ball, theta, i, j);
        }
    }
    out
}

/// `Σ_{γ₀γ₁γ₂ = 1} a₀(γ₀)a₁(γ₁)a₂(γ₂) f(γ₁,γ₂) σ(γ₁,γ₂)` over all triples.
fn triple_oracle(
    ball: &CayleyBall,
    theta: f64,
    a: [&AlgebraElement; 3],
    f: impl Fn(usize, usize) -> f64,
) -> Complex64 {
    let supp = |x: &AlgebraElement| -> Vec<usize> { (0..ball.len()).filter(|&i| x.coeffs[i] != ZERO).collect() };
    let (s0, s1, s2) = (supp(a[0]), supp(a[1]), supp(a[2]));
    let mut acc = ZERO;
    for &i0 in &s0 {
        for &i1 in &s1 {
            let m01 = ball.matrix(i0) * ball.matrix(i1);
            for &i2 in &s2 {
                if (m01 * *ball.matrix(i2)).is_identity(1e-7) {
                    acc += a[0].coeffs[i0] * a[1].coeffs[i1] * a[2].coeffs[i2] * f(i1, i2) * sigma(ball, theta, i1, i2);
                }
            }
        }
    }
    acc
}

#[test]
fn untwisted_convolution_is_group_ring_product() {
    let ball = cayley_ball(&surface_group(2).unwrap(), 3).unwrap();
    let tw = Twist::new(&ball, Multiplier::untwisted());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (a, b) = (element(&ball, 1, &mut rng), element(&ball, 2, &mut rng));
    let got = tw.convolve(&a, &b).unwrap();
    assert!(got.max_abs_diff(&convolve_oracle(&ball, 0.0, &a, &b)) < 1e-12);
}

#[test]
fn twisted_convolution_matches_oracle_and_associates() {
    let theta = 0.9;
    for ball in [
        cayley_ball(&surface_group(2).unwrap(), 3).unwrap(),
        cayley_ball(&triangle_group(2, 3, 7).unwrap(), 6).unwrap(),
    ] {
        let tw = Twist::new(&ball, Multiplier::new(theta));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..3 {
            let (a, b, c) = (element(&ball, 1, &mut rng), element(&ball, 1, &mut rng), element(&ball, 1, &mut rng));
            let ab = tw.convolve(&a, &b).unwrap();
            assert!(ab.max_abs_diff(&convolve_oracle(&ball, theta, &a, &b)) < 1e-10);
            let left = tw.convolve(&ab, &c).unwrap();
            let right = tw.convolve(&a, &tw.convolve(&b, &c).unwrap()).unwrap();
            assert!(left.max_abs_diff(&right) < 1e-10);
        }
    }
}

#[test]
fn convolution_refuses_to_leave_the_ball() {
    let ball = cayley_ball(&surface_group(2).unwrap(), 2).unwrap();
    let tw = Twist::new(&ball, Multiplier::new(0.3));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = element(&ball, 2, &mut rng);
    assert!(tw.convolve(&a, &a).is_err());
}

#[test]
fn representation_law_on_bulk_rows() {
    let ball = cayley_ball(&triangle_group(2, 3, 7).unwrap(), 5).unwrap();
    let tw = Twist::new(&ball, Multiplier::new(1.7));
    let bulk = ball.layer_start[ball.radius - 1];
    let reps = |conv| -> Vec<Mat<Complex64>> {
        (0..ball.layer_start[2]).map(|i| tw.rep_matrix(i, conv).unwrap()).collect()
    };
    let mut worst = [0.0f64; 2];
    for (slot, conv) in [RepConvention::Standard, RepConvention::Literal].into_iter().enumerate() {
        let u = reps(conv);
        for i in 0..u.len() {
            for j in 0..u.len() {
                let Some(k) = product(&ball, i, j) else { continue };
                let lhs = &u[i] * &u[j];
                let rhs = faer::Scale(tw.sigma(i, j).unwrap()) * tw.rep_matrix(k, conv).unwrap();
                for row in 0..bulk {
                    for col in 0..ball.len() {
                        worst[slot] = worst[slot].max((lhs[(row, col)] - rhs[(row, col)]).norm());
                    }
                }
            }
        }
    }
    assert!(worst[0] < 1e-10, "standard: {}", worst[0]);
    assert!(worst[1] > 1e-3, "literal convention unexpectedly satisfies the law");
}

#[test]
fn fourier_extraction_inverts_operator_matrix() {
    let ball = cayley_ball(&surface_group(2).unwrap(), 3).unwrap();
    let tw = Twist::new(&ball, Multiplier::new(2.0 * PI / 5.0));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = element(&ball, 1, &mut rng);
    let back = tw.fourier_extract(&tw.operator_matrix(&a).unwrap(), 1).unwrap();
    assert!(back.max_abs_diff(&a) < 1e-12);

    let h = harper_matrix(&tw, None, None).unwrap();
    let ind = tw.fourier_extract(&h.matrix, 2).unwrap();
    let expect = AlgebraElement::generators(&ball, &[1.0; 8]);
    assert!(ind.max_abs_diff(&expect) < 1e-12);

    let n = ball.len();
    let e = tw.fourier_extract(&Mat::<Complex64>::identity(n, n), 2).unwrap();
    assert_eq!(e, AlgebraElement::delta(&ball, 0));
    assert!(tw.fourier_extract(&h.matrix, 4).is_err());
}

#[test]
fn trace_is_cyclic() {
    let ball = cayley_ball(&surface_group(2).unwrap(), 4).unwrap();
    let tw = Twist::new(&ball, Multiplier::new(1.1));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (a, b) = (element(&ball, 2, &mut rng), element(&ball, 2, &mut rng));
    let ab = trace_vn(&tw.convolve(&a, &b).unwrap());
    let ba = trace_vn(&tw.convolve(&b, &a).unwrap());
    assert!((ab - ba).norm() < 1e-12);
}

#[test]
fn area_pairing_matches_triple_loop_and_is_cyclic() {
    let theta = 0.8;
    let ball = cayley_ball(&surface_group(2).unwrap(), 4).unwrap();
    let tw = Twist::new(&ball, Multiplier::new(theta));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // Relators are long, so nondegenerate triples need a₀ beyond the unit ball.
    let a: Vec<_> = [2, 1, 1].iter().map(|&r| element(&ball, r, &mut rng)).collect();
    let area = |i: usize, j: usize| area_cocycle(ball.matrix(i), ball.matrix(j), TriangleConvention::Standard).unwrap();
    let got = tw.tr_c(&a[0], &a[1], &a[2]).unwrap();
    let want = triple_oracle(&ball, theta, [&a[0], &a[1], &a[2]], area);
    assert!((got - want).norm() < 1e-10, "{got} vs {want}");
    assert!(want.norm() > 1e-3, "oracle sum is trivially zero");
    let rotated = tw.tr_c(&a[1], &a[2], &a[0]).unwrap();
    assert!((got - rotated).norm() < 1e-10);

    // Normalized cocycle: δ₁ in a derivation slot kills the pairing.
    let d = AlgebraElement::delta(&ball, 0);
    assert_eq!(tw.tr_c(&a[0], &d, &a[2]).unwrap(), ZERO);
}

#[test]
fn connes_kubo_pairing_matches_both_oracles() {
    let theta = 0.8;
    let ball = cayley_ball(&surface_group(2).unwrap(), 4).unwrap();
    let tw = Twist::new(&ball, Multiplier::new(theta));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a: Vec<_> = [2, 1, 1].iter().map(|&r| element(&ball, r, &mut rng)).collect();
    let got = tw.tr_k(&a[0], &a[1], &a[2]).unwrap();

    let psi = |i: usize, j: usize| symplectic_form(ball.omega(i), ball.omega(j)) as f64;
    let cyclic = triple_oracle(&ball, theta, [&a[0], &a[1], &a[2]], psi);
    assert!((got - cyclic).norm() < 1e-10, "{got} vs {cyclic}");
    assert!(cyclic.norm() > 1e-3);

    // Literal formula with test-side derivations and products.
    let g = 2;
    let deriv = |x: &AlgebraElement, j: usize| {
        let mut y = x.clone();
        for i in 0..ball.len() {
            y.coeffs[i] *= ball.omega(i)[j] as f64;
        }
        y
    };
    let mut literal = ZERO;
    for j in 0..g {
        let p = convolve_oracle(&ball, theta, &deriv(&a[1], j), &deriv(&a[2], j + g));
        let q = convolve_oracle(&ball, theta, &deriv(&a[1], j + g), &deriv(&a[2], j));
        let diff = &p - &q;
        literal += trace_vn(&convolve_oracle(&ball, theta, &a[0], &diff));
    }
    assert!((got - literal).norm() < 1e-10);
}

#[test]
fn derivations_obey_leibniz() {
    let ball = cayley_ball(&surface_group(2).unwrap(), 3).unwrap();
    let tw = Twist::new(&ball, Multiplier::new(1.3));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (a, b) = (element(&ball, 1, &mut rng), element(&ball, 2, &mut rng));
    for j in 0..4 {
        let lhs = tw.derivation(&tw.convolve(&a, &b).unwrap(), j);
        let rhs = &tw.convolve(&tw.derivation(&a, j), &b).unwrap() + &tw.convolve(&a, &tw.derivation(&b, j)).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}

#[test]
fn genus_zero_connes_kubo_vanishes() {
    let ball = cayley_ball(&triangle_group(2, 3, 7).unwrap(), 6).unwrap();
    let tw = Twist::new(&ball, Multiplier::new(0.5));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a: Vec<_> = (0..3).map(|_| element(&ball, 2, &mut rng)).collect();
    assert_eq!(tw.tr_k(&a[0], &a[1], &a[2]).unwrap(), ZERO);
}

#[test]
fn harper_operator_is_hermitian_and_bounded() {
    let g = surface_group(2).unwrap();
    let mut tops = Vec::new();
    for r in 1..=3 {
        let ball = cayley_ball(&g, r).unwrap();
        let tw = Twist::new(&ball, Multiplier::new(2.0 * PI / 5.0));
        let h = harper_matrix(&tw, None, None).unwrap();
        assert!(h.hermitian_defect() < 1e-12);
        let ev = spectrum(&h.matrix, false, None).unwrap().eigenvalues;
        let top = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(top <= 8.0 + 1e-9);
        tops.push(top);
    }
    assert!(tops.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{tops:?}");
}

#[test]
fn harper_parts_and_potentials() {
    let ball = cayley_ball(&triangle_group(2, 3, 7).unwrap(), 4).unwrap();
    let tw = Twist::new(&ball, Multiplier::new(0.7));
    let w = vec![1.0; ball.generators()];
    let all = harper_part(&tw, &w, HarperPart::All).unwrap();
    let free = harper_part(&tw, &w, HarperPart::Free).unwrap();
    let inter = harper_part(&tw, &w, HarperPart::Interaction).unwrap();
    assert!((&all - &free - &inter).norm_l2() < 1e-14);
    // Genus 0 has no hyperbolic generators.
    assert_eq!(free.norm_l2(), 0.0);

    let v = AlgebraElement::delta(&ball, 0).scale(Complex64::new(0.25, 0.0));
    let shifted = harper_matrix(&tw, None, Some(&v)).unwrap();
    let n = ball.len();
    let id = faer::Scale(Complex64::new(0.25, 0.0)) * Mat::<Complex64>::identity(n, n);
    assert!((&shifted.matrix - &all - &id).norm_l2() < 1e-14);

    let bad = AlgebraElement::delta(&ball, 0).scale(Complex64::new(0.0, 1.0));
    assert!(harper_matrix(&tw, None, Some(&bad)).is_err());
}
