use ncdc_core::checks::{darboux, standard_fp_symbols, standard_table};
use ncdc_core::connection::{Connection, Gamma};
use ncdc_core::forms::Calculus;
use ncdc_core::scalar::{rat, Chart, ScalarExpr, SymbolDecl, SymbolTable};
use ncdc_core::symplectic::{
    fokker_planck_residual, gibbs_residuals, specialize, FpSubstitutions, Mechanics, SymplecticData,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scalars(names: &[&str], dim: usize) -> SymbolTable {
    let mut t = SymbolTable::new(Chart::new(dim).unwrap());
    for n in names {
        t.declare(SymbolDecl::scalar(n)).unwrap();
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn darboux_bracket_is_antisymmetric_and_leibniz(seed in any::<u64>()) {
        let ch = Chart::new(4).unwrap();
        let data = darboux(&ch, ScalarExpr::zero()).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let shape = ncdc_core::sample::PolyShape::MEDIUM;
        let p: Vec<ScalarExpr> = (0..3).map(|_| ncdc_core::sample::poly(&mut r, &ch, &[], shape)).collect();
        let (f, g, h) = (&p[0], &p[1], &p[2]);
        prop_assert!((&data.poisson(f, g) + &data.poisson(g, f)).is_zero());
        prop_assert_eq!(data.poisson(f, &(g * h)), &(&data.poisson(f, g) * h) + &(g * &data.poisson(f, h)));
        let jacobi = &(&data.poisson(f, &data.poisson(g, h)) + &data.poisson(g, &data.poisson(h, f)))
            + &data.poisson(h, &data.poisson(f, g));
        prop_assert!(jacobi.is_zero());
    }
}

#[test]
fn darboux_bracket_of_coordinates() {
    let ch = Chart::new(2).unwrap();
    let data = darboux(&ch, ScalarExpr::zero()).unwrap();
    let (x1, x2) = (ScalarExpr::coord(1), ScalarExpr::coord(2));
    // The inverse is taken with ω^{μρ}ω_{νρ} = δ^μ_ν, so ω^{12} = ω_{12}.
    assert_eq!(data.w_inv(1, 2), &ScalarExpr::one());
    assert_eq!(data.poisson(&x1, &x2), ScalarExpr::one());
}

#[test]
fn singular_omega_is_rejected() {
    let ch = Chart::new(2).unwrap();
    let zero = vec![vec![ScalarExpr::zero(); 2]; 2];
    assert!(SymplecticData::explicit(&ch, zero, ScalarExpr::zero()).is_err());
}

#[test]
fn specialization_needs_general_source_and_ito_target() {
    let ch = Chart::new(1).unwrap();
    let g = Calculus::general(ch.clone());
    let ito = Calculus::ito(ch, &|_, _| ScalarExpr::int(-1)).unwrap();
    assert!(specialize(&ito, &g, &g.dx(1)).is_err());
    assert!(specialize(&g, &g, &g.dx(1)).is_err());
    let s = specialize(&g, &ito, &g.xi(1, 1)).unwrap();
    assert_eq!(s, ito.dt());
}

/// With Γ = 0, constant b and constant ω the derived generator is
/// `−{H,A} + ½bᵘᵛ∂_μ∂_νA`.
#[test]
fn flat_constant_case_gives_heat_generator() {
    let t = scalars(&["H", "A"], 2);
    let ch = t.chart().clone();
    let b = [[ScalarExpr::int(2), ScalarExpr::int(1)], [ScalarExpr::int(1), ScalarExpr::int(3)]];
    let calc = Calculus::general(ch.clone());
    let ito = Calculus::ito(ch.clone(), &|i, j| b[i as usize - 1][j as usize - 1].clone()).unwrap();
    let g = Gamma::zero(&ch);
    let conn = Connection::derive(&calc, &g).unwrap();
    let mech = Mechanics::new(&conn, &ito).unwrap();
    let data = darboux(&ch, t.s("H", &[])).unwrap();
    let wmu: Vec<ScalarExpr> = ch.space().map(|m| data.omega_mu(&ito, &g, m)).collect();
    let om = mech.omega(&data, &wmu).unwrap();
    let x = mech.hamiltonian_vf(&data, &om).unwrap();
    let a = t.s("A", &[]);
    let rhs = mech.evolution_rhs(&data, &x, &a).unwrap();
    let mut want = -data.poisson(data.h(), &a);
    for i in 1..=2u8 {
        for j in 1..=2u8 {
            want.add_scaled(&(&b[i as usize - 1][j as usize - 1] * &a.partial(i).partial(j)), &rat(1, 2));
        }
    }
    assert_eq!(rhs, want);
}

#[test]
fn withholding_half_b_leaves_the_diffusion_mismatch() {
    let table = standard_table(2, false).unwrap();
    let ch = table.chart().clone();
    let calc = Calculus::general(ch.clone());
    let ito = Calculus::ito(ch.clone(), &|i, j| table.s("b", &[i, j])).unwrap();
    let g = Gamma::symbolic(&table, "G").unwrap();
    let conn = Connection::derive(&calc, &g).unwrap();
    let mech = Mechanics::new(&conn, &ito).unwrap();
    let data = darboux(&ch, table.s("H", &[])).unwrap();
    let names = standard_fp_symbols();
    let a = table.s("A", &[]);
    let full = fokker_planck_residual(&mech, &data, &table, &names, &a, FpSubstitutions::ALL).unwrap();
    assert!(full.is_zero());
    let subs = FpSubstitutions { a_half_b: false, ..FpSubstitutions::ALL };
    let res = fokker_planck_residual(&mech, &data, &table, &names, &a, subs).unwrap();
    assert!(!res.is_zero());
    // The residual is linear in b − 2a: setting b = 2a by hand recovers zero.
    let fixed = res.substitute(&|s| (s.name() == "b").then(|| table.s("a", s.indices()).scale(&rat(2, 1))));
    assert!(fixed.is_zero());
}

#[test]
fn gibbs_condition_on_explicit_connection() {
    let t = scalars(&["beta", "H0"], 1);
    let ch = t.chart().clone();
    let (beta, h0) = (t.s("beta", &[]), t.s("H0", &[]));
    let v = -(&beta * &h0.partial(1));
    let g = Gamma::from_fn(&ch, &|_, _, _| v.clone()).unwrap();
    assert!(gibbs_residuals(&g, &beta, &h0).iter().all(|r| r.is_zero()));
    let g = Gamma::zero(&ch);
    assert!(!gibbs_residuals(&g, &beta, &h0)[0].is_zero());
}
