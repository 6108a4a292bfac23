//! Monte-Carlo oracle for the stochastic claims: Wiener paths, p-variation
//! on dyadic meshes, Itô sums and the discrete product rule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::{Atom, ScalarExpr, T};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdeConfig {
    /// Variance rate of the increments.
    pub gamma: f64,
    pub horizon: f64,
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
}

impl SdeConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.gamma >= 0.0
            && self.gamma.is_finite()
            && self.horizon > 0.0
            && self.horizon.is_finite()
            && self.steps >= 2
            && self.steps.is_power_of_two()
            && self.paths >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("invalid SDE configuration {self:?}")))
        }
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }
}

/// A sampled trajectory on the uniform grid `t_k = kT/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub horizon: f64,
    pub values: Vec<f64>,
    /// Generator substream the path was drawn from (`u64::MAX` for
    /// deterministic paths).
    pub stream: u64,
}

impl Path {
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn time(&self, k: usize) -> f64 {
        self.horizon * k as f64 / self.steps() as f64
    }

    /// `X_t = g(t)` sampled on the grid.
    pub fn deterministic(horizon: f64, steps: usize, g: impl Fn(f64) -> f64) -> Path {
        let values = (0..=steps).map(|k| g(horizon * k as f64 / steps as f64)).collect();
        Path { horizon, values, stream: u64::MAX }
    }

    /// Values on the coarser grid with `intervals` steps.
    fn coarse(&self, intervals: usize) -> Result<Vec<f64>> {
        let n = self.steps();
        if intervals == 0 || !intervals.is_power_of_two() || !n.is_multiple_of(intervals) {
            return Err(Error::Invalid(format!("mesh of {intervals} intervals is not a dyadic coarsening of {n}")));
        }
        let stride = n / intervals;
        Ok(self.values.iter().step_by(stride).copied().collect())
    }
}

/// Path `i` draws from substream `i` of the seeded generator, so each path
/// is reproducible on its own.
pub fn simulate_wiener(cfg: &SdeConfig) -> Result<Vec<Path>> {
    cfg.validate()?;
    let sd = (cfg.gamma * cfg.dt()).sqrt();
    Ok((0..cfg.paths as u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i);
            let mut values = Vec::with_capacity(cfg.steps + 1);
            let mut x = 0.0;
            values.push(x);
            for _ in 0..cfg.steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                x += sd * z;
                values.push(x);
            }
            Path { horizon: cfg.horizon, values, stream: i }
        })
        .collect())
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub fn value(&self) -> f64 {
        self.s + self.c
    }
}

impl FromIterator<f64> for Sum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Sum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `Σ|ΔX|^p` on each requested mesh, given as a number of intervals.
pub fn p_variation(path: &Path, p: u32, meshes: &[usize]) -> Result<Vec<f64>> {
    meshes
        .iter()
        .map(|&m| {
            let v = path.coarse(m)?;
            Ok(v.windows(2).map(|w| (w[1] - w[0]).abs().powi(p as i32)).collect::<Sum>().value())
        })
        .collect()
}

/// A polynomial in `t` and `x` compiled for fast floating evaluation.
#[derive(Clone, Debug)]
pub struct Poly {
    terms: Vec<(f64, i32, i32)>,
}

impl Poly {
    /// Accepts only polynomials in the time coordinate and `x¹`.
    pub fn compile(e: &ScalarExpr) -> Result<Poly> {
        let mut terms = Vec::new();
        for (m, c) in e.terms() {
            let (mut pt, mut px) = (0, 0);
            for (a, k) in m.factors() {
                match a {
                    Atom::Coord(i) if *i == T => pt = *k as i32,
                    Atom::Coord(1) => px = *k as i32,
                    other => return Err(Error::Invalid(format!("{other:?} is outside the polynomial catalog"))),
                }
            }
            let q: f64 = c.numer().to_string().parse::<f64>().expect("integer")
                / c.denom().to_string().parse::<f64>().expect("integer");
            terms.push((q, pt, px));
        }
        Ok(Poly { terms })
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.terms.iter().map(|&(c, pt, px)| c * t.powi(pt) * x.powi(px)).sum()
    }
}

/// Test functions for the Itô-formula check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Catalog {
    XSquared,
    XCubedPlusTX,
    T,
}

impl Catalog {
    pub const ALL: [Catalog; 3] = [Catalog::XSquared, Catalog::XCubedPlusTX, Catalog::T];

    pub fn name(self) -> &'static str {
        match self {
            Catalog::XSquared => "x^2",
            Catalog::XCubedPlusTX => "x^3 + t*x",
            Catalog::T => "t",
        }
    }

    pub fn expr(self) -> ScalarExpr {
        let x = ScalarExpr::coord(1);
        let t = ScalarExpr::coord(T);
        match self {
            Catalog::XSquared => x.pow(2),
            Catalog::XCubedPlusTX => x.pow(3) + &t * &x,
            Catalog::T => t,
        }
    }
}

/// Itô's formula with its derivatives taken symbolically.
#[derive(Clone, Debug)]
pub struct ItoIntegrand {
    f: Poly,
    drift: Poly,
    fx: Poly,
}

impl ItoIntegrand {
    pub fn new(f: &ScalarExpr, gamma: f64) -> Result<ItoIntegrand> {
        let half_gamma = crate::scalar::Rational::from_float(gamma / 2.0)
            .ok_or_else(|| Error::Invalid("diffusion coefficient must be finite".into()))?;
        let drift = f.partial(T) + f.partial(1).partial(1).scale(&half_gamma);
        Ok(ItoIntegrand { f: Poly::compile(f)?, drift: Poly::compile(&drift)?, fx: Poly::compile(&f.partial(1))? })
    }

    /// `f(X_T,T) − f(0,0) − Σ[(∂_tf + ½γ∂²f)Δt + ∂_xf ΔX]` on a mesh, with
    /// left-endpoint evaluation.
    pub fn residual(&self, path: &Path, intervals: usize) -> Result<f64> {
        let v = path.coarse(intervals)?;
        let time = |k: usize| path.horizon * k as f64 / intervals as f64;
        let mut sum = Sum::default();
        sum.add(self.f.eval(path.horizon, v[intervals]));
        sum.add(-self.f.eval(0.0, v[0]));
        for k in 1..=intervals {
            let (t0, x0) = (time(k - 1), v[k - 1]);
            sum.add(-self.drift.eval(t0, x0) * (time(k) - t0));
            sum.add(-self.fx.eval(t0, x0) * (v[k] - x0));
        }
        Ok(sum.value())
    }
}

/// Relative defect of `X_T² − X_0² = 2ΣX_{k−1}ΔX_k + Σ(ΔX_k)²`.
pub fn product_rule_residual(path: &Path) -> f64 {
    let v = &path.values;
    let mut cross = Sum::default();
    let mut qv = Sum::default();
    for w in v.windows(2) {
        let dx = w[1] - w[0];
        cross.add(2.0 * w[0] * dx);
        qv.add(dx * dx);
    }
    let (xt, x0) = (v[v.len() - 1], v[0]);
    let mut r = Sum::default();
    r.add(xt * xt);
    r.add(-x0 * x0);
    r.add(-cross.value());
    r.add(-qv.value());
    let scale = (xt * xt).abs().max(qv.value().abs()).max(cross.value().abs());
    if scale == 0.0 {
        0.0
    } else {
        r.value().abs() / scale
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub mean_abs: f64,
    pub max_abs: f64,
    pub variance: f64,
}

impl Stats {
    pub fn of(xs: &[f64]) -> Stats {
        let n = xs.len() as f64;
        let mean = xs.iter().copied().collect::<Sum>().value() / n;
        let mean_abs = xs.iter().map(|x| x.abs()).collect::<Sum>().value() / n;
        let max_abs = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let variance = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean) * (x - mean)).collect::<Sum>().value() / (n - 1.0)
        } else {
            0.0
        };
        Stats { mean, mean_abs, max_abs, variance }
    }
}
