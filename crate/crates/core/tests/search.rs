use orbifold_hall::orbifold::covering_genus;
use orbifold_hall::search::*;
use orbifold_hall::{OrbifoldSignature, Rational};
use proptest::prelude::*;

fn sig(s: &str) -> OrbifoldSignature {
    s.parse().unwrap()
}

/// `−χ` as a reduced `(numerator, denominator)` pair in plain integers.
fn phi_i128(genus: u32, orders: &[u32]) -> (i128, i128) {
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let (mut n, mut d) = (2 * genus as i128 - 2, 1i128);
    for &v in orders {
        let v = v as i128;
        n = n * v + d * (v - 1);
        d *= v;
        let g = gcd(n, d);
        n /= g;
        d /= g;
    }
    (n, d)
}

#[test]
fn one_third_contains_the_tabulated_signatures() {
    let found: Vec<String> = enumerate_signatures(&Rational::new(1, 3), &SearchBounds::default())
        .unwrap()
        .iter()
        .map(|s| s.to_string())
        .collect();
    for s in ["(0;3,6,6)", "(0;2,2,3,3)", "(0;2,12,12)", "(0;3,4,12)", "(0;4,4,6)", "(0;2,2,2,6)"] {
        assert!(found.iter().any(|f| f == s), "missing {s}");
    }
    for s in &found {
        let p = sig(s);
        assert_eq!(phi_i128(p.genus(), p.cone_orders()), (1, 3));
    }
}

#[test]
fn odd_integer_without_cone_points_is_empty() {
    let bounds = SearchBounds::new(10, 0, 2);
    assert!(enumerate_signatures(&Rational::from_integer(7), &bounds).unwrap().is_empty());
    assert_eq!(enumerate_signatures(&Rational::from_integer(8), &bounds).unwrap(), vec![sig("(5;)")]);
}

#[test]
fn enumeration_is_complete_against_integer_arithmetic() {
    // Every signature in a small box, bucketed by φ with integer fractions.
    let bounds = SearchBounds::new(1, 3, 9);
    let target = (1i128, 2i128);
    let mut expected = Vec::new();
    for g in 0..=1u32 {
        expected.extend((phi_i128(g, &[]) == target).then(|| sig(&format!("({g};)"))));
        for a in 2..=9u32 {
            expected.extend((phi_i128(g, &[a]) == target).then(|| sig(&format!("({g};{a})"))));
            for b in a..=9 {
                expected.extend((phi_i128(g, &[a, b]) == target).then(|| sig(&format!("({g};{a},{b})"))));
                for c in b..=9 {
                    let s = format!("({g};{a},{b},{c})");
                    expected.extend((phi_i128(g, &[a, b, c]) == target).then(|| sig(&s)));
                }
            }
        }
    }
    let mut got = enumerate_signatures(&Rational::new(1, 2), &bounds).unwrap();
    got.sort();
    expected.sort();
    assert_eq!(got, expected);
}

#[test]
fn fraction_report_flags_unmatched_rows() {
    let r = fraction_report(&Rational::new(5, 9), &SearchBounds::default()).unwrap();
    let note = r.annotation.expect("5/9 is an unmatched table row");
    assert!(note.contains("(0;3,18,18)"));
    assert!(fraction_report(&Rational::new(1, 3), &SearchBounds::default()).unwrap().annotation.is_none());
}

proptest! {
    #[test]
    fn euler_characteristic_matches_integer_oracle(genus in 0u32..5, orders in proptest::collection::vec(2u32..60, 0..6)) {
        let s = OrbifoldSignature::new(genus, orders.clone()).unwrap();
        let (n, d) = phi_i128(genus, &orders);
        prop_assert_eq!(s.phi(), Rational::new(n as i64, d as i64));
    }

    #[test]
    fn covering_genus_is_multiplicative(genus in 0u32..4, orders in proptest::collection::vec(2u32..13, 0..5), k in 1u64..60) {
        let s = OrbifoldSignature::new(genus, orders).unwrap();
        let order = cone_order_lcm(&s) * k;
        let gp = covering_genus(&s, order);
        prop_assert_eq!(s.euler_characteristic() * Rational::from_integer(order as i64), Rational::from_integer(2) - Rational::from_integer(2) * gp);
    }
}
