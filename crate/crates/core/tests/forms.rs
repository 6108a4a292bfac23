use ncdc_core::forms::{Calculus, Form};
use ncdc_core::sample::{self, PolyShape};
use ncdc_core::scalar::{Chart, ScalarExpr, SymbolDecl, SymbolTable, Variance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn general(n: usize) -> Calculus {
    Calculus::general(Chart::new(n).unwrap())
}

struct Sample {
    f: ScalarExpr,
    g: ScalarExpr,
    a: Form,
    b: Form,
}

fn sample(c: &Calculus, seed: u64) -> Sample {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let ch = c.chart();
    Sample {
        f: sample::poly(&mut r, ch, &[], PolyShape::MEDIUM),
        g: sample::poly(&mut r, ch, &[], PolyShape::MEDIUM),
        a: sample::one_form(&mut r, c, &[], PolyShape::SMALL),
        b: sample::one_form(&mut r, c, &[], PolyShape::SMALL),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn d_squares_to_zero(seed in any::<u64>(), n in 1usize..=3) {
        let c = general(n);
        let s = sample(&c, seed);
        prop_assert!(c.d(&c.d_scalar(&s.f)).unwrap().is_zero());
        prop_assert!(c.d(&c.d(&s.a).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn graded_leibniz(seed in any::<u64>(), n in 1usize..=3) {
        let c = general(n);
        let s = sample(&c, seed);
        let f = c.scalar(s.f.clone());
        let lhs = c.d(&c.mul(&f, &s.a).unwrap()).unwrap();
        let rhs = c.mul(&c.d(&f).unwrap(), &s.a).unwrap().add(&c.mul(&f, &c.d(&s.a).unwrap()).unwrap());
        prop_assert_eq!(lhs, rhs);
        let lhs = c.d(&c.mul(&s.a, &s.b).unwrap()).unwrap();
        let rhs = c
            .mul(&c.d(&s.a).unwrap(), &s.b)
            .unwrap()
            .sub(&c.mul(&s.a, &c.d(&s.b).unwrap()).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn scalar_leibniz_has_bullet_correction(seed in any::<u64>(), n in 1usize..=3) {
        let c = general(n);
        let s = sample(&c, seed);
        let (df, dg) = (c.d_scalar(&s.f), c.d_scalar(&s.g));
        let rhs = c.right_mul(&df, &s.g).unwrap()
            .add(&c.right_mul(&dg, &s.f).unwrap())
            .add(&c.bullet(&df, &dg).unwrap());
        prop_assert_eq!(c.d_scalar(&(&s.f * &s.g)), rhs);
    }

    #[test]
    fn commutator_is_bullet_with_differential(seed in any::<u64>(), n in 1usize..=3) {
        let c = general(n);
        let s = sample(&c, seed);
        let lhs = c.commutator(&s.f, &s.a).unwrap();
        prop_assert_eq!(lhs, c.bullet(&c.d_scalar(&s.f), &s.a).unwrap());
    }

    #[test]
    fn bullet_is_symmetric_and_central(seed in any::<u64>(), n in 1usize..=3) {
        let c = general(n);
        let s = sample(&c, seed);
        let ab = c.bullet(&s.a, &s.b).unwrap();
        prop_assert_eq!(&ab, &c.bullet(&s.b, &s.a).unwrap());
        // Bullet products commute with functions.
        prop_assert!(c.commutator(&s.f, &ab).unwrap().is_zero());
        prop_assert_eq!(c.bullet(&c.right_mul(&s.a, &s.f).unwrap(), &s.b).unwrap(), c.right_mul(&ab, &s.f).unwrap());
    }

    #[test]
    fn multiplication_is_associative(seed in any::<u64>(), n in 1usize..=2) {
        let c = general(n);
        let s = sample(&c, seed);
        let da = c.d(&s.a).unwrap();
        let x = c.mul(&c.mul(&s.a, &s.b).unwrap(), &s.a).unwrap();
        let y = c.mul(&s.a, &c.mul(&s.b, &s.a).unwrap()).unwrap();
        prop_assert_eq!(x, y);
        let x = c.mul(&c.mul(&da, &s.b).unwrap(), &c.scalar(s.f.clone())).unwrap();
        let y = c.mul(&da, &c.right_mul(&s.b, &s.f).unwrap()).unwrap();
        prop_assert_eq!(x, y);
    }
}

#[test]
fn basis_sizes() {
    let sizes: Vec<(usize, usize)> = (1..=3)
        .map(|n| {
            let c = general(n);
            (c.basis(1).unwrap().len(), c.basis(2).unwrap().len())
        })
        .collect();
    assert_eq!(sizes, vec![(3, 4), (6, 21), (10, 65)]);
}

#[test]
fn bullet_of_coordinate_differentials() {
    let c = general(2);
    assert_eq!(c.bullet(&c.dx(1), &c.dx(2)).unwrap(), c.xi(1, 2));
    assert!(c.bullet(&c.dt(), &c.dx(1)).unwrap().is_zero());
    assert!(c.bullet(&c.xi(1, 1), &c.dx(1)).unwrap().is_zero());
}

#[test]
fn ito_calculus_identifies_xi_with_time() {
    let ch = Chart::new(2).unwrap();
    let mut t = SymbolTable::new(ch.clone());
    t.declare(SymbolDecl::new("b", &[Variance::Upper, Variance::Upper]).symmetric(&[0, 1])).unwrap();
    t.declare(SymbolDecl::scalar("f")).unwrap();
    let ito = Calculus::ito(ch, &|a, b| t.s("b", &[a, b])).unwrap();
    assert!(ito.is_ito());
    let xi = ito.bullet(&ito.dx(1), &ito.dx(2)).unwrap();
    assert_eq!(xi, ito.right_mul(&ito.dt(), &-t.s("b", &[1, 2])).unwrap());
    let f = t.s("f", &[]);
    let ddf = ito.d(&ito.d_scalar(&f)).unwrap();
    assert!(ddf.is_zero());
    // Only dt and the dx survive as generators.
    assert_eq!(ito.basis(1).unwrap().len(), 3);
}

#[test]
fn degree_mismatch_is_an_error() {
    let c = general(2);
    assert!(c.bullet(&c.scalar(ScalarExpr::coord(1)), &c.dx(1)).is_err());
    let three = c.mul(&c.mul(&c.dx(1), &c.dx(2)).unwrap(), &c.dt()).unwrap();
    assert!(c.bullet(&three, &c.dx(1)).is_err());
}
