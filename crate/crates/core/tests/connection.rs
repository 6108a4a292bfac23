use ncdc_core::connection::{d_bullet, riemann, Connection, Gamma};
use ncdc_core::forms::Calculus;
use ncdc_core::sample::{self, PolyShape};
use ncdc_core::scalar::{rat, Chart, ScalarExpr, SymbolDecl, SymbolTable, Variance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_setup(seed: u64) -> (Calculus, Gamma) {
    let ch = Chart::new(2).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let g = sample::gamma(&mut r, &ch, &[], PolyShape::SMALL);
    (Calculus::general(ch), g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn derived_tables_satisfy_every_constraint(seed in any::<u64>()) {
        let (c, g) = random_setup(seed);
        let conn = Connection::derive(&c, &g).unwrap();
        for (label, v) in conn.constraint_components().unwrap() {
            prop_assert!(v.is_zero(), "{label}");
        }
    }

    #[test]
    fn wedge_is_antisymmetric_and_right_linear(seed in any::<u64>()) {
        let (c, g) = random_setup(seed);
        let conn = Connection::derive(&c, &g).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let a = sample::one_form(&mut r, &c, &[], PolyShape::SMALL);
        let b = sample::one_form(&mut r, &c, &[], PolyShape::SMALL);
        let f = sample::poly(&mut r, c.chart(), &[], PolyShape::SMALL);
        let ab = conn.wedge(&a, &b).unwrap();
        prop_assert!(ab.add(&conn.wedge(&b, &a).unwrap()).is_zero());
        prop_assert_eq!(conn.wedge(&a, &c.right_mul(&b, &f).unwrap()).unwrap(), c.right_mul(&ab, &f).unwrap());
    }

    #[test]
    fn torsion_is_right_linear(seed in any::<u64>()) {
        let (c, g) = random_setup(seed);
        let conn = Connection::derive(&c, &g).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed ^ 0x7);
        let a = sample::one_form(&mut r, &c, &[], PolyShape::SMALL);
        let f = sample::poly(&mut r, c.chart(), &[], PolyShape::SMALL);
        let lhs = conn.torsion(&c.right_mul(&a, &f).unwrap()).unwrap();
        prop_assert_eq!(lhs, c.right_mul(&conn.torsion(&a).unwrap(), &f).unwrap());
    }
}

#[test]
fn covariant_differentials_shift_by_xi() {
    let (c, g) = random_setup(3);
    let conn = Connection::derive(&c, &g).unwrap();
    let fr = conn.frame();
    let mut want = c.dx(1);
    want.add_assign_scaled(&c.xi(1, 1), &g.get(1, 1, 1).scale(&rat(1, 2)));
    want.add_assign_scaled(&c.xi(1, 2), g.get(1, 1, 2));
    want.add_assign_scaled(&c.xi(2, 2), &g.get(1, 2, 2).scale(&rat(1, 2)));
    assert_eq!(fr.dtilde(1), want);
}

#[test]
fn flat_connection_is_trivial() {
    let c = Calculus::general(Chart::new(2).unwrap());
    let g = Gamma::zero(c.chart());
    let conn = Connection::derive(&c, &g).unwrap();
    for m in 1..=2 {
        assert!(conn.torsion(&c.dx(m)).unwrap().is_zero());
        assert!(conn.nabla(&c.dx(m)).unwrap().is_zero());
    }
    // With zero Γ the circle product is the plain product on dx.
    assert_eq!(conn.circ(&c.dx(1), &c.dx(2)).unwrap(), c.mul(&c.dx(1), &c.dx(2)).unwrap());
}

#[test]
fn nonsymmetric_gamma_is_rejected() {
    let ch = Chart::new(2).unwrap();
    let bad = Gamma::from_fn(&ch, &|_, n, r| if (n, r) == (1, 2) { ScalarExpr::one() } else { ScalarExpr::zero() });
    assert!(bad.is_err());
}

#[test]
fn riemann_of_constant_connection_is_quadratic() {
    let ch = Chart::new(2).unwrap();
    let g = Gamma::from_fn(&ch, &|m, n, r| ScalarExpr::int((m + n + r) as i64 % 3)).unwrap();
    for m in 1..=2 {
        for a in 1..=2 {
            for b in 1..=2 {
                for p in 1..=2 {
                    let mut want = ScalarExpr::zero();
                    for l in 1..=2 {
                        want += g.get(m, b, l) * g.get(l, p, a);
                        want -= g.get(m, p, l) * g.get(l, b, a);
                    }
                    assert_eq!(riemann(&g, m, a, b, p), want);
                }
            }
        }
    }
}

#[test]
fn symbolic_connection_derives_in_one_dimension() {
    let ch = Chart::new(1).unwrap();
    let mut t = SymbolTable::new(ch.clone());
    t.declare(SymbolDecl::new("G", &[Variance::Upper, Variance::Lower, Variance::Lower]).symmetric(&[1, 2])).unwrap();
    let c = Calculus::general(ch);
    let g = Gamma::symbolic(&t, "G").unwrap();
    let conn = Connection::derive(&c, &g).unwrap();
    assert!(conn.constraint_components().unwrap().iter().all(|(_, v)| v.is_zero()));
    assert!(riemann(&g, 1, 1, 1, 1).is_zero());
}

#[test]
fn d_bullet_needs_general_calculus() {
    let ch = Chart::new(1).unwrap();
    let ito = Calculus::ito(ch, &|_, _| ScalarExpr::int(-1)).unwrap();
    assert!(d_bullet(&ito, &ito.dx(1)).is_err());
}
