use super::{run, Check, Outcome};
use crate::error::{Error, Result};
use crate::sde::{p_variation, product_rule_residual, simulate_wiener, Catalog, ItoIntegrand, Path, SdeConfig, Stats};

/// Simulation size and the number of dyadic refinement levels examined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StochasticParams {
    pub sde: SdeConfig,
    pub levels: usize,
}

impl Default for StochasticParams {
    fn default() -> Self {
        StochasticParams {
            sde: SdeConfig { gamma: 1.0, horizon: 1.0, steps: 1 << 16, paths: 256, seed: 42 },
            levels: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StochasticTolerances {
    /// Allowed relative deviation of the mean quadratic variation from `γT`.
    pub quadratic_variation: f64,
    pub cubic_variation: f64,
    pub product_rule: f64,
    /// Minimum decrease of the mean Itô residual per 4× refinement.
    pub ito_ratio: f64,
    pub ito_x_squared: f64,
    /// Standard errors allowed for the endpoint mean and variance.
    pub mean_sigmas: f64,
    pub variance_sigmas: f64,
}

impl Default for StochasticTolerances {
    fn default() -> Self {
        StochasticTolerances {
            quadratic_variation: 0.02,
            cubic_variation: 0.02,
            product_rule: 1e-9,
            ito_ratio: 1.5,
            ito_x_squared: 0.05,
            mean_sigmas: 4.0,
            variance_sigmas: 5.0,
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.6e}")
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt(x)).collect::<Vec<_>>().join(" ")
}

/// Meshes `n/step^(levels-1), …, n/step, n`.
fn meshes(n: usize, levels: usize, step: usize) -> Result<Vec<usize>> {
    let mut v = Vec::with_capacity(levels);
    let mut m = n;
    for _ in 0..levels {
        if m == 0 {
            return Err(Error::Invalid(format!("{levels} levels do not fit in {n} steps")));
        }
        v.push(m);
        m /= step;
    }
    v.reverse();
    Ok(v)
}

fn mean_over(paths: &[Path], f: impl Fn(&Path) -> Result<f64>) -> Result<Stats> {
    let v: Vec<f64> = paths.iter().map(f).collect::<Result<_>>()?;
    Ok(Stats::of(&v))
}

/// Statistics of simulated Wiener paths against the Itô calculus.
pub fn stochastic(params: &StochasticParams, tol: &StochasticTolerances) -> Vec<Check> {
    let cfg = params.sde;
    let levels = params.levels;
    let id = |name: &str| format!("sde.{name}");
    let sim = (|| {
        cfg.validate()?;
        if levels < 2 {
            return Err(Error::Invalid("at least two refinement levels are needed".into()));
        }
        simulate_wiener(&cfg)
    })();
    let paths = match sim {
        Ok(p) => p,
        Err(e) => return vec![run(id("simulation"), "simulated paths", || Err(e))],
    };
    let gt = cfg.gamma * cfg.horizon;
    let n = cfg.steps;
    let mut out = Vec::new();

    out.push(run(id("quadratic_variation"), "Σ(ΔX)² → γT", || {
        let s = mean_over(&paths, |p| Ok(p_variation(p, 2, &[n])?[0]))?;
        let ratio = s.mean / gt;
        Ok(Outcome::new((ratio - 1.0).abs() <= tol.quadratic_variation, fmt(ratio)))
    }));

    out.push(run(id("cubic_variation"), "Σ|ΔX|³ → 0, decreasing under dyadic refinement", || {
        let ms = meshes(n, levels, 2)?;
        let per: Vec<Vec<f64>> = paths.iter().map(|p| p_variation(p, 3, &ms)).collect::<Result<_>>()?;
        let means: Vec<f64> =
            (0..ms.len()).map(|k| Stats::of(&per.iter().map(|v| v[k]).collect::<Vec<_>>()).mean).collect();
        let decreasing = means.windows(2).all(|w| w[1] < w[0]);
        let last = *means.last().unwrap_or(&f64::NAN);
        Ok(Outcome::new(decreasing && last < tol.cubic_variation, list(&means)))
    }));

    out.push(run(id("product_rule"), "X_T² − X_0² = 2ΣX_{k−1}ΔX_k + Σ(ΔX_k)²", || {
        let s = mean_over(&paths, |p| Ok(product_rule_residual(p)))?;
        Ok(Outcome::new(s.max_abs < tol.product_rule, fmt(s.max_abs)))
    }));

    out.push(run(
        id("ito_formula"),
        "f(X_T,T) − f(0,0) = Σ(∂_tf + ½γ∂²f)Δt + ∂_xf ΔX + o(1) for f = x³ + t·x",
        || {
            let f = ItoIntegrand::new(&Catalog::XCubedPlusTX.expr(), cfg.gamma)?;
            let ms = meshes(n, levels, 4)?;
            let means: Vec<f64> =
                ms.iter().map(|&m| Ok(mean_over(&paths, |p| f.residual(p, m))?.mean_abs)).collect::<Result<_>>()?;
            let ratios: Vec<f64> = means.windows(2).map(|w| w[0] / w[1]).collect();
            let ok = ratios.iter().all(|&r| r >= tol.ito_ratio);
            Ok(Outcome::new(ok, list(&ratios)).with_note(format!("mean |R| per mesh: {}", list(&means))))
        },
    ));

    out.push(run(id("ito_x_squared"), "mean |R| for f = x² at the finest mesh", || {
        let f = ItoIntegrand::new(&Catalog::XSquared.expr(), cfg.gamma)?;
        let s = mean_over(&paths, |p| f.residual(p, n))?;
        Ok(Outcome::new(s.mean_abs < tol.ito_x_squared, fmt(s.mean_abs)))
    }));

    out.push(run(id("ito_time_only"), "f = t has an exact zero residual", || {
        let f = ItoIntegrand::new(&Catalog::T.expr(), cfg.gamma)?;
        let s = mean_over(&paths, |p| f.residual(p, n))?;
        Ok(Outcome::new(s.max_abs == 0.0, fmt(s.max_abs)))
    }));

    let ends: Vec<f64> = paths.iter().map(|p| p.values[n]).collect();
    let end = Stats::of(&ends);
    let k = paths.len() as f64;

    out.push(run(id("endpoint_mean"), "E[X_T] = 0", || {
        let bound = tol.mean_sigmas * (gt / k).sqrt();
        Ok(Outcome::new(end.mean.abs() < bound, fmt(end.mean)))
    }));

    out.push(run(id("endpoint_variance"), "Var[X_T] = γT", || {
        if paths.len() < 2 {
            return Ok(Outcome::new(false, "needs at least two paths"));
        }
        let se = gt * (2.0 / (k - 1.0)).sqrt();
        Ok(Outcome::new((end.variance - gt).abs() <= tol.variance_sigmas * se, fmt(end.variance)))
    }));
    out
}
