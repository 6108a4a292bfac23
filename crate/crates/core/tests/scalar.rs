use ncdc_core::sample::{self, PolyShape};
use ncdc_core::scalar::{rat, Chart, ScalarExpr, SymbolDecl, SymbolTable, Variance, T};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn table() -> SymbolTable {
    let mut t = SymbolTable::new(Chart::new(3).unwrap());
    t.declare(SymbolDecl::scalar("u")).unwrap();
    t.declare(SymbolDecl::new("s", &[Variance::Upper, Variance::Upper]).symmetric(&[0, 1])).unwrap();
    t.declare(SymbolDecl::new("w", &[Variance::Lower, Variance::Lower]).antisymmetric(&[0, 1]).static_in_time())
        .unwrap();
    t.declare(SymbolDecl::new("wi", &[Variance::Upper, Variance::Upper]).antisymmetric(&[0, 1]).static_in_time())
        .unwrap();
    t.link_inverse("wi", "w").unwrap();
    t
}

fn polys(seed: u64, k: usize) -> Vec<ScalarExpr> {
    let t = table();
    let atoms = vec![t.s("u", &[]), t.s("s", &[1, 2]), t.s("w", &[1, 3])];
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| sample::poly(&mut r, t.chart(), &atoms, PolyShape::MEDIUM)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(seed in any::<u64>()) {
        let p = polys(seed, 3);
        let (a, b, c) = (&p[0], &p[1], &p[2]);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!(&(a * b) * c, a * &(b * c));
        prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
        prop_assert!((a - a).is_zero());
        prop_assert_eq!(a * &ScalarExpr::one(), a.clone());
    }

    #[test]
    fn partials_obey_leibniz_and_commute(seed in any::<u64>(), i in 0u8..=3, j in 0u8..=3) {
        let p = polys(seed, 2);
        let (f, g) = (&p[0], &p[1]);
        prop_assert_eq!((f * g).partial(i), &(&f.partial(i) * g) + &(f * &g.partial(i)));
        prop_assert_eq!(f.partial(i).partial(j), f.partial(j).partial(i));
    }

    #[test]
    fn substitution_is_a_homomorphism(seed in any::<u64>()) {
        let p = polys(seed, 3);
        let v = p[2].clone();
        let sub = |e: &ScalarExpr| e.substitute(&|s| (s.name() == "u").then(|| v.clone()));
        prop_assert_eq!(sub(&(&p[0] * &p[1])), &sub(&p[0]) * &sub(&p[1]));
        prop_assert_eq!(sub(&(&p[0] + &p[1])), &sub(&p[0]) + &sub(&p[1]));
    }
}

#[test]
fn symmetric_and_antisymmetric_canonicalization() {
    let t = table();
    assert_eq!(t.s("s", &[2, 1]), t.s("s", &[1, 2]));
    assert_eq!(t.s("w", &[2, 1]), -t.s("w", &[1, 2]));
    assert!(t.s("w", &[2, 2]).is_zero());
    assert!(t.sym("s", &[1]).is_err());
    assert!(t.sym("s", &[0, 1]).is_err());
    assert!(t.sym("nope", &[]).is_err());
}

#[test]
fn static_symbols_have_no_time_derivative() {
    let t = table();
    assert!(t.s("w", &[1, 2]).partial(T).is_zero());
    assert!(!t.s("u", &[]).partial(T).is_zero());
}

#[test]
fn inverse_contraction_gives_delta() {
    let t = table();
    for a in 1..=3 {
        for b in 1..=3 {
            let e: ScalarExpr = (1..=3).map(|r| &t.s("wi", &[a, r]) * &t.s("w", &[b, r])).sum();
            let got = t.contract_delta(&e).unwrap();
            assert_eq!(got, ScalarExpr::delta(a, b), "{a}{b}");
        }
    }
}

#[test]
fn rational_arithmetic_is_exact() {
    let third = ScalarExpr::rat(1, 3);
    let sum = &(&third + &third) + &third;
    assert_eq!(sum, ScalarExpr::one());
    assert_eq!(ScalarExpr::coord(1).scale(&rat(2, 4)), ScalarExpr::coord(1).scale(&rat(1, 2)));
    assert_eq!(ScalarExpr::coord(1).pow(3).partial(1).partial(1), ScalarExpr::coord(1).scale(&rat(6, 1)));
}

#[test]
fn chart_rejects_bad_indices() {
    let c = Chart::new(2).unwrap();
    assert!(c.check(3).is_err());
    assert!(c.check_spatial(0).is_err());
    assert!(Chart::new(0).is_err());
    assert_eq!(c.sym_pairs(), vec![(1, 1), (1, 2), (2, 2)]);
}
