use ncdc_core::forms::Calculus;
use ncdc_core::sample::{self, PolyShape};
use ncdc_core::scalar::{Chart, ScalarExpr, T};
use ncdc_core::vector::{cubic_defect, insert, is_second_order, pair, test_scalars, VectorField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pairing_with_differential_is_action(seed in any::<u64>(), n in 1usize..=3) {
        let ch = Chart::new(n).unwrap();
        let c = Calculus::general(ch.clone());
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = sample::vector_field(&mut r, &ch, &[], PolyShape::SMALL);
        let f = sample::poly(&mut r, &ch, &[], PolyShape::MEDIUM);
        prop_assert_eq!(pair(&c, &x, &c.d_scalar(&f)).unwrap(), x.apply(&f));
    }

    #[test]
    fn pairing_is_right_linear(seed in any::<u64>(), n in 1usize..=3) {
        let ch = Chart::new(n).unwrap();
        let c = Calculus::general(ch.clone());
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = sample::vector_field(&mut r, &ch, &[], PolyShape::SMALL);
        let a = sample::one_form(&mut r, &c, &[], PolyShape::SMALL);
        let f = sample::poly(&mut r, &ch, &[], PolyShape::SMALL);
        prop_assert_eq!(pair(&c, &x, &c.right_mul(&a, &f).unwrap()).unwrap(), &pair(&c, &x, &a).unwrap() * &f);
    }

    #[test]
    fn vector_fields_are_second_order(seed in any::<u64>(), n in 1usize..=3) {
        let ch = Chart::new(n).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = sample::vector_field(&mut r, &ch, &[], PolyShape::SMALL);
        let f = sample::poly(&mut r, &ch, &[], PolyShape::MEDIUM);
        prop_assert!(cubic_defect(&|g| x.apply(g), &f).is_zero());
    }
}

#[test]
fn third_order_operator_is_rejected() {
    let ch = Chart::new(2).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(9);
    let family = test_scalars(&ch, 10, &mut r);
    let third = |f: &ScalarExpr| f.partial(1).partial(1).partial(2);
    assert!(!is_second_order(&third, &family));
    assert_eq!(cubic_defect(&third, &ScalarExpr::coord(1)), ScalarExpr::zero());
    let x1 = ScalarExpr::coord(1);
    let f = &x1 + &ScalarExpr::coord(2);
    assert!(!cubic_defect(&third, &f).is_zero());
    let second = |f: &ScalarExpr| f.partial(1).partial(2);
    assert!(is_second_order(&second, &family));
}

#[test]
fn coordinate_fields_pair_with_generators() {
    let ch = Chart::new(2).unwrap();
    let c = Calculus::general(ch.clone());
    assert_eq!(pair(&c, &VectorField::dt(&ch), &c.dt()).unwrap(), ScalarExpr::one());
    assert_eq!(pair(&c, &VectorField::partial(&ch, 1), &c.dx(1)).unwrap(), ScalarExpr::one());
    assert!(pair(&c, &VectorField::partial(&ch, 1), &c.dx(2)).unwrap().is_zero());
    assert_eq!(pair(&c, &VectorField::second(&ch, 1, 2), &c.xi(1, 2)).unwrap(), ScalarExpr::one());
    assert!(pair(&c, &VectorField::second(&ch, 1, 2), &c.dx(1)).unwrap().is_zero());
}

#[test]
fn second_coordinate_field_acts_as_second_derivative() {
    let ch = Chart::new(2).unwrap();
    let f = ScalarExpr::coord(1).pow(2) * ScalarExpr::coord(2);
    assert_eq!(VectorField::second(&ch, 1, 2).apply(&f), f.partial(1).partial(2));
    assert_eq!(VectorField::dt(&ch).apply(&ScalarExpr::coord(T)), ScalarExpr::one());
}

#[test]
fn insertion_into_coordinate_two_form() {
    let ch = Chart::new(1).unwrap();
    let c = Calculus::general(ch.clone());
    let w = c.mul(&c.dt(), &c.dx(1)).unwrap();
    assert_eq!(insert(&c, &VectorField::dt(&ch), &w).unwrap(), c.dx(1));
    assert_eq!(insert(&c, &VectorField::partial(&ch, 1), &w).unwrap(), c.dt().neg());
    assert!(insert(&c, &VectorField::dt(&ch), &c.dt()).is_err());
}
