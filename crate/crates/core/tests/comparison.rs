use std::f64::consts::PI;

use orbifold_hall::algebra::{symplectic_form, AlgebraElement, Twist};
use orbifold_hall::comparison::*;
use orbifold_hall::fuchsian::{cayley_ball, group_for, surface_group, triangle_group, CayleyBall};
use orbifold_hall::hyperbolic::Multiplier;
use orbifold_hall::OrbifoldSignature;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sig(s: &str) -> OrbifoldSignature {
    s.parse().unwrap()
}

#[test]
fn symplectic_form_examples() {
    assert_eq!(symplectic_form(&[1, 0, 0, 0], &[0, 0, 1, 0]), 1);
    assert_eq!(symplectic_form(&[0, 0, 1, 0], &[1, 0, 0, 0]), -1);
    assert_eq!(symplectic_form(&[1, 0, 0, 0], &[0, 1, 0, 0]), 0);
    assert_eq!(symplectic_form(&[2, 1, 3, -1], &[0, 4, 1, 2]), 4 + 4);
}

#[test]
fn symplectic_pairing_is_an_integer_cocycle() {
    let ball = cayley_ball(&surface_group(2).unwrap(), 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mul = |i: usize, j: usize| ball.find(&(ball.matrix(i) * ball.matrix(j))).unwrap();
    let mut n = 0;
    while n < 500 {
        let [a, b, c] = [0; 3].map(|_| rng.random_range(0..ball.layer_start[2]));
        let (Some(ab), Some(bc)) = (mul(a, b), mul(b, c)) else { continue };
        let lhs = symplectic_pairing(&ball, ab, c) + symplectic_pairing(&ball, a, b);
        let rhs = symplectic_pairing(&ball, a, bc) + symplectic_pairing(&ball, b, c);
        assert_eq!(lhs, rhs);
        n += 1;
    }
}

#[test]
fn literal_defect_is_normalized() {
    // Both cocycles vanish on (1, γ), (γ, 1) and (γ, γ⁻¹).
    let ball = cayley_ball(&surface_group(2).unwrap(), 3).unwrap();
    let table = defect_table(&ball, 1.0).unwrap();
    for (&(i, j, k), v) in table.pairs.iter().zip(&table.values) {
        if k == 0 || i == 0 || j == 0 {
            assert!(v.abs() < 1e-12, "({i},{j}) -> {v}");
        }
        assert_eq!(j == ball.inverse[i], k == 0);
    }
}

fn synthetic(ball: &CayleyBall, seed: u64) -> (Vec<f64>, CocycleDefectTable) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = defect_table_with(ball, |_, _| Ok(0.0)).unwrap();
    let mut h0: Vec<f64> = (0..shape.unknowns).map(|_| rng.random_range(-1.0..1.0)).collect();
    h0[0] = 0.0;
    let values = coboundary(&shape, &h0);
    (h0, CocycleDefectTable { values, ..shape })
}

#[test]
fn synthetic_coboundary_is_recovered_up_to_homomorphisms() {
    let ball = cayley_ball(&surface_group(2).unwrap(), 4).unwrap();
    let (h0, table) = synthetic(&ball, 2);
    let sol = solve_coboundary(&table, 2).unwrap();
    assert!(sol.residual < 1e-10, "{}", sol.residual);
    assert_eq!(sol.nullity, 4);
    // h̃ − h₀ is additive on interior pairs, i.e. a homomorphism.
    for &(i, j, k) in &table.pairs {
        let diff = |x: usize| sol.h[x] - h0[x];
        assert!((diff(i) + diff(j) - diff(k)).abs() < 1e-8);
    }
}

#[test]
fn homomorphisms_are_in_the_kernel() {
    let ball = cayley_ball(&surface_group(2).unwrap(), 3).unwrap();
    let shape = defect_table_with(&ball, |_, _| Ok(0.0)).unwrap();
    let weights = [0.3, -1.2, 2.0, 0.7];
    let hom: Vec<f64> = (0..shape.unknowns)
        .map(|i| ball.omega(i).iter().zip(weights).map(|(&o, w)| o as f64 * w).sum())
        .collect();
    let d = coboundary(&shape, &hom);
    assert!(d.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn fundamental_class_pairings() {
    for s in ["(2;)", "(3;)", "(1;2,2)", "(1;3)", "(0;2,3,7)", "(1;6,6,6)", "(2;2)", "(0;3,3,4)"] {
        let sg = sig(s);
        let f = fundamental_pairings(&group_for(&sg).unwrap()).unwrap();
        let area = 2.0 * PI * sg.phi().to_f64();
        assert!((f.area.abs() - area).abs() < 1e-9, "{s}: {} vs {area}", f.area);
        assert_eq!(f.symplectic.abs(), 2.0 * sg.genus() as f64, "{s}");
    }
}

#[test]
fn rescaled_defect_is_a_coboundary_but_the_literal_one_is_not() {
    let g = surface_group(2).unwrap();
    let ball = cayley_ball(&g, 4).unwrap();
    let alpha = cohomological_area_scale(&g).unwrap();
    assert!((alpha + 1.0 / PI).abs() < 1e-12, "{alpha}");
    let scaled = solve_coboundary(&defect_table(&ball, alpha).unwrap(), 2).unwrap();
    assert!(scaled.residual < 1e-10, "{}", scaled.residual);
    let literal = solve_coboundary(&defect_table(&ball, 1.0).unwrap(), 2).unwrap();
    assert!(literal.residual > 1.0, "{}", literal.residual);
}

#[test]
fn triangle_group_literal_residual_does_not_vanish() {
    let g = triangle_group(2, 3, 7).unwrap();
    let ball = cayley_ball(&g, 6).unwrap();
    let sol = solve_coboundary(&defect_table(&ball, 1.0).unwrap(), 0).unwrap();
    assert!(sol.residual > 1e-3, "{}", sol.residual);
}

#[test]
fn comparison_identity_on_sampled_triples() {
    let g = surface_group(2).unwrap();
    let alpha = cohomological_area_scale(&g).unwrap();
    let run = comparison_run(&g, 2.0 * PI / 5.0, &[3, 4], alpha, 6, 11).unwrap();
    assert!(run.within_bound);
    assert!(run.max_comparison_deviation < 1e-9, "{}", run.max_comparison_deviation);

    // δ₁ in slot 1: both pairings and bλ vanish.
    let ball = cayley_ball(&g, 4).unwrap();
    let sol = solve_coboundary(&defect_table(&ball, alpha).unwrap(), 2).unwrap();
    let twist = Twist::new(&ball, Multiplier::new(0.6));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a0 = random_element(&ball, 2, &mut rng);
    let a2 = random_element(&ball, 1, &mut rng);
    let d = AlgebraElement::delta(&ball, 0);
    let t = check_triple(&twist, &sol, alpha, &a0, &d, &a2).unwrap();
    assert!(t.deviation < 1e-12);
}

#[test]
fn untwisted_comparison_still_holds() {
    let g = surface_group(2).unwrap();
    let alpha = cohomological_area_scale(&g).unwrap();
    let run = comparison_run(&g, 0.0, &[3], alpha, 4, 5).unwrap();
    assert!(run.within_bound);
}

#[test]
fn report_keeps_literal_and_rescaled_runs() {
    let g = surface_group(2).unwrap();
    let rep = comparison_report(&g, 0.7, &[2, 3], 3, 1).unwrap();
    assert_eq!(rep.residual_by_radius.len(), 2);
    assert_eq!(rep.normalized.residual_by_radius.len(), 2);
    assert!((rep.normalized.area_scale + 1.0 / PI).abs() < 1e-12);
    let json = serde_json::to_string(&rep).unwrap();
    assert!(json.contains("\"normalized\""));
    assert!(comparison_report(&triangle_group(2, 3, 7).unwrap(), 0.7, &[3], 1, 1).is_err());
}
