use ncdc_core::checks::{self, Check};
use ncdc_core::connection::{Connection, Gamma};
use ncdc_core::forms::Calculus;
use ncdc_core::symplectic::{Mechanics, SymplecticData};

fn assert_all(checks: &[Check]) {
    for c in checks {
        println!("{} {} {:?} {:?} {:?}", c.id, c.passed, c.residual, c.note, c.elapsed);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.id.as_str()).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}

#[test]
fn core_calculus_suites() {
    for dim in 1..=3 {
        assert_all(&checks::core_calculus(dim, 20, 7).unwrap());
        assert_all(&checks::vector_fields(dim, 20, 7).unwrap());
    }
}

#[test]
fn random_connection_suite() {
    assert_all(&checks::connection_random(2, 3, 11).unwrap());
}

#[test]
fn symbolic_connection_and_mechanics() {
    let table = checks::standard_table(2, true).unwrap();
    let ch = table.chart().clone();
    let calc = Calculus::general(ch.clone());
    let ito = Calculus::ito(ch.clone(), &|a, b| table.s("b", &[a, b])).unwrap();
    let g = Gamma::symbolic(&table, "G").unwrap();
    let conn = Connection::derive(&calc, &g).unwrap();
    assert_all(&checks::connection_identities(&conn, &ito, "n2"));
    let mech = Mechanics::new(&conn, &ito).unwrap();
    assert_all(&checks::structure(&mech, "n2"));
    let data = SymplecticData::symbolic(&table, "wi", "w", table.s("H", &[])).unwrap();
    let a = table.s("A", &[]);
    let (cs, d) = checks::derivation(&mech, &data, &a, "n2");
    assert_all(&cs);
    assert!(d.is_some());
    assert_all(&checks::fokker_planck(&mech, &data, &table, &checks::standard_fp_symbols(), &a, "n2"));
}

#[test]
fn universal_suite() {
    assert_all(&checks::universal(4, 3));
}

#[test]
fn stochastic_suite_small() {
    let mut p = checks::StochasticParams::default();
    p.sde.steps = 1 << 12;
    p.sde.paths = 64;
    let t = checks::StochasticTolerances { quadratic_variation: 0.05, cubic_variation: 0.05, ..Default::default() };
    assert_all(&checks::stochastic(&p, &t));
}

#[test]
fn darboux_n4_mechanics() {
    let table = checks::standard_table(4, false).unwrap();
    let ch = table.chart().clone();
    let calc = Calculus::general(ch.clone());
    let ito = Calculus::ito(ch.clone(), &|a, b| table.s("b", &[a, b])).unwrap();
    let g = Gamma::symbolic(&table, "G").unwrap();
    let conn = Connection::derive(&calc, &g).unwrap();
    let mech = Mechanics::new(&conn, &ito).unwrap();
    let data = checks::darboux(&ch, table.s("H", &[])).unwrap();
    let a = table.s("A", &[]);
    let (cs, _) = checks::derivation(&mech, &data, &a, "n4");
    assert_all(&cs);
    assert_all(&checks::fokker_planck(&mech, &data, &table, &checks::standard_fp_symbols(), &a, "n4"));
}
