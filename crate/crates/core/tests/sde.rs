use ncdc_core::scalar::ScalarExpr;
use ncdc_core::sde::{
    p_variation, product_rule_residual, simulate_wiener, Catalog, ItoIntegrand, Path, SdeConfig, Stats,
};

fn cfg(steps: usize, paths: usize) -> SdeConfig {
    SdeConfig { gamma: 1.0, horizon: 1.0, steps, paths, seed: 17 }
}

#[test]
fn config_validation() {
    assert!(cfg(1024, 4).validate().is_ok());
    assert!(cfg(1000, 4).validate().is_err());
    assert!(cfg(1, 4).validate().is_err());
    assert!(cfg(1024, 0).validate().is_err());
    assert!(SdeConfig { gamma: -1.0, ..cfg(8, 1) }.validate().is_err());
    assert!(SdeConfig { horizon: 0.0, ..cfg(8, 1) }.validate().is_err());
    assert!(SdeConfig { gamma: f64::NAN, ..cfg(8, 1) }.validate().is_err());
}

#[test]
fn same_seed_same_paths_and_substreams_are_independent() {
    let a = simulate_wiener(&cfg(256, 3)).unwrap();
    let b = simulate_wiener(&cfg(256, 3)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a[0].values, a[1].values);
    // A path depends only on its own substream.
    let more = simulate_wiener(&cfg(256, 5)).unwrap();
    assert_eq!(a[2], more[2]);
    let other = simulate_wiener(&SdeConfig { seed: 18, ..cfg(256, 3) }).unwrap();
    assert_ne!(a[0].values, other[0].values);
}

#[test]
fn zero_diffusion_gives_zero_paths() {
    let ps = simulate_wiener(&SdeConfig { gamma: 0.0, ..cfg(64, 3) }).unwrap();
    assert!(ps.iter().all(|p| p.values.iter().all(|&x| x == 0.0)));
}

#[test]
fn quadratic_variation_concentrates() {
    let ps = simulate_wiener(&cfg(1 << 14, 64)).unwrap();
    let qv: Vec<f64> = ps.iter().map(|p| p_variation(p, 2, &[1 << 14]).unwrap()[0]).collect();
    let s = Stats::of(&qv);
    assert!((s.mean - 1.0).abs() < 0.01, "mean {}", s.mean);
}

#[test]
fn quadratic_variation_variance_halves_when_mesh_halves() {
    let n = 1 << 12;
    let ps = simulate_wiener(&SdeConfig { paths: 512, ..cfg(n, 0) }).unwrap();
    let var = |m: usize| {
        let v: Vec<f64> = ps.iter().map(|p| p_variation(p, 2, &[m]).unwrap()[0]).collect();
        Stats::of(&v).variance
    };
    let ratio = var(n) / var(n / 2);
    assert!((ratio - 0.5).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn cubic_variation_decreases() {
    let n = 1 << 14;
    let p = &simulate_wiener(&cfg(n, 1)).unwrap()[0];
    let v = p_variation(p, 3, &[n / 8, n / 4, n / 2, n]).unwrap();
    assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
    assert!(v[3] < 0.05);
}

#[test]
fn smooth_path_has_vanishing_quadratic_variation() {
    let p = Path::deterministic(1.0, 1 << 12, |t| t);
    let v = p_variation(&p, 2, &[1 << 4, 1 << 8, 1 << 12]).unwrap();
    assert!((v[0] - 1.0 / 16.0).abs() < 1e-12);
    assert!(v[2] < 1e-3);
    assert!(v.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn non_dyadic_mesh_is_rejected() {
    let p = Path::deterministic(1.0, 64, |t| t);
    assert!(p_variation(&p, 2, &[3]).is_err());
    assert!(p_variation(&p, 2, &[128]).is_err());
    assert!(p_variation(&p, 2, &[0]).is_err());
}

#[test]
fn product_rule_holds_to_rounding() {
    for p in simulate_wiener(&cfg(1 << 12, 8)).unwrap() {
        assert!(product_rule_residual(&p) < 1e-9);
    }
    assert_eq!(product_rule_residual(&Path::deterministic(1.0, 8, |_| 0.0)), 0.0);
}

#[test]
fn time_integrand_has_exact_zero_residual() {
    let f = ItoIntegrand::new(&Catalog::T.expr(), 1.0).unwrap();
    for p in simulate_wiener(&cfg(1 << 10, 4)).unwrap() {
        for m in [1 << 6, 1 << 8, 1 << 10] {
            assert_eq!(f.residual(&p, m).unwrap(), 0.0);
        }
    }
}

#[test]
fn ito_residual_shrinks_with_mesh() {
    let n = 1 << 14;
    let ps = simulate_wiener(&SdeConfig { paths: 128, ..cfg(n, 0) }).unwrap();
    for c in [Catalog::XSquared, Catalog::XCubedPlusTX] {
        let f = ItoIntegrand::new(&c.expr(), 1.0).unwrap();
        let mean = |m: usize| {
            let r: Vec<f64> = ps.iter().map(|p| f.residual(p, m).unwrap()).collect();
            Stats::of(&r).mean_abs
        };
        let (coarse, fine) = (mean(n / 16), mean(n));
        assert!(coarse / fine >= 1.5, "{}: {coarse} vs {fine}", c.name());
    }
}

#[test]
fn ito_derivatives_are_symbolic() {
    // With no diffusion the Itô sum is an ordinary left Riemann-Stieltjes sum.
    let f = ItoIntegrand::new(&Catalog::XSquared.expr(), 0.0).unwrap();
    let p = Path::deterministic(1.0, 1 << 10, |t| t);
    let r = f.residual(&p, 1 << 10).unwrap();
    assert!((r - 1.0 / 1024.0).abs() < 1e-12, "{r}");
}

#[test]
fn non_polynomial_integrands_are_rejected() {
    let mut t = ncdc_core::scalar::SymbolTable::new(ncdc_core::scalar::Chart::new(1).unwrap());
    t.declare(ncdc_core::scalar::SymbolDecl::scalar("H")).unwrap();
    let h = t.s("H", &[]);
    assert!(ItoIntegrand::new(&h, 1.0).is_err());
    assert!(ItoIntegrand::new(&ScalarExpr::coord(2), 1.0).is_err());
}

#[test]
fn endpoint_moments_match_wiener_law() {
    let paths = 512;
    let ps = simulate_wiener(&SdeConfig { gamma: 2.0, paths, ..cfg(1 << 10, 0) }).unwrap();
    let ends: Vec<f64> = ps.iter().map(|p| *p.values.last().unwrap()).collect();
    let s = Stats::of(&ends);
    let gt = 2.0;
    assert!(s.mean.abs() < 4.0 * (gt / paths as f64).sqrt(), "mean {}", s.mean);
    let se = gt * (2.0 / (paths as f64 - 1.0)).sqrt();
    assert!((s.variance - gt).abs() < 5.0 * se, "variance {}", s.variance);
}

#[test]
fn x_squared_residual_is_small_at_fine_mesh() {
    let n = 1 << 16;
    let ps = simulate_wiener(&SdeConfig { paths: 256, ..cfg(n, 0) }).unwrap();
    let f = ItoIntegrand::new(&Catalog::XSquared.expr(), 1.0).unwrap();
    let r: Vec<f64> = ps.iter().map(|p| f.residual(p, n).unwrap()).collect();
    assert!(Stats::of(&r).mean_abs < 0.05);
}
