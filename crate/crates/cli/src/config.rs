//! Run configuration: JSON with exprlang strings for explicit expressions.

use std::collections::BTreeMap;
use std::path::Path;

use ncdc_core::checks::{StochasticParams, StochasticTolerances};
use ncdc_core::exprlang::parse_scalar;
use ncdc_core::scalar::Idx;
use ncdc_core::sde::SdeConfig;
use ncdc_core::symplectic::SymplecticData;
use ncdc_core::{Calculus, Chart, Gamma, ScalarExpr, SymbolDecl, SymbolTable, Variance};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub chart: ChartSpec,
    #[serde(default)]
    pub symbols: Vec<SymbolSpec>,
    #[serde(default)]
    pub expressions: Expressions,
    #[serde(default)]
    pub suites: Suites,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub dim: usize,
    #[serde(default = "default_time")]
    pub time: String,
    #[serde(default = "default_space")]
    pub space: String,
}

fn default_time() -> String {
    "t".into()
}

fn default_space() -> String {
    "x".into()
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    #[serde(alias = "upper")]
    Up,
    #[serde(alias = "lower")]
    Down,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub name: String,
    #[serde(default)]
    pub slots: Vec<Slot>,
    #[serde(default)]
    pub symmetric: Vec<usize>,
    #[serde(default)]
    pub antisymmetric: Vec<usize>,
    /// Independent of time.
    #[serde(default, rename = "static")]
    pub is_static: bool,
    pub inverse_of: Option<String>,
}

/// A tensor given either as a declared symbol name or by components keyed
/// `"i,j,…"`; unlisted components are zero, symmetric partners are filled.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum TensorSpec {
    Symbol(String),
    Components(BTreeMap<String, String>),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expressions {
    pub gamma: Option<TensorSpec>,
    pub b: Option<TensorSpec>,
    pub omega: Option<TensorSpec>,
    /// Declared inverse partner of a symbolic `omega`.
    pub omega_inverse: Option<String>,
    pub hamiltonian: Option<String>,
    pub observable: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suites {
    #[serde(default)]
    pub core: CoreSuite,
    #[serde(default)]
    pub connection: ConnectionSuite,
    #[serde(default)]
    pub ito: ItoSuite,
    #[serde(default)]
    pub universal: UniversalSuite,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoreSuite {
    #[serde(default = "CoreSuite::default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "CoreSuite::default_instances")]
    pub instances: usize,
}

impl CoreSuite {
    fn default_dims() -> Vec<usize> {
        vec![1, 2, 3]
    }
    fn default_instances() -> usize {
        50
    }
}

impl Default for CoreSuite {
    fn default() -> Self {
        CoreSuite { dims: Self::default_dims(), instances: Self::default_instances() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSuite {
    #[serde(default = "ConnectionSuite::default_dim")]
    pub random_dim: usize,
    #[serde(default = "ConnectionSuite::default_instances")]
    pub random_instances: usize,
}

impl ConnectionSuite {
    fn default_dim() -> usize {
        2
    }
    fn default_instances() -> usize {
        10
    }
}

impl Default for ConnectionSuite {
    fn default() -> Self {
        ConnectionSuite { random_dim: Self::default_dim(), random_instances: Self::default_instances() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ItoSuite {
    pub gamma: f64,
    pub horizon: f64,
    pub steps: usize,
    pub paths: usize,
    pub levels: usize,
}

impl Default for ItoSuite {
    fn default() -> Self {
        let p = StochasticParams::default();
        ItoSuite {
            gamma: p.sde.gamma,
            horizon: p.sde.horizon,
            steps: p.sde.steps,
            paths: p.sde.paths,
            levels: p.levels,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UniversalSuite {
    pub points: usize,
}

impl Default for UniversalSuite {
    fn default() -> Self {
        UniversalSuite { points: 4 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub quadratic_variation: f64,
    pub cubic_variation: f64,
    pub product_rule: f64,
    pub ito_ratio: f64,
    pub ito_x_squared: f64,
    pub mean_sigmas: f64,
    pub variance_sigmas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let t = StochasticTolerances::default();
        Tolerances {
            quadratic_variation: t.quadratic_variation,
            cubic_variation: t.cubic_variation,
            product_rule: t.product_rule,
            ito_ratio: t.ito_ratio,
            ito_x_squared: t.ito_x_squared,
            mean_sigmas: t.mean_sigmas,
            variance_sigmas: t.variance_sigmas,
        }
    }
}

impl Tolerances {
    pub fn stochastic(&self) -> StochasticTolerances {
        StochasticTolerances {
            quadratic_variation: self.quadratic_variation,
            cubic_variation: self.cubic_variation,
            product_rule: self.product_rule,
            ito_ratio: self.ito_ratio,
            ito_x_squared: self.ito_x_squared,
            mean_sigmas: self.mean_sigmas,
            variance_sigmas: self.variance_sigmas,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn stochastic_params(&self, seed: u64) -> StochasticParams {
        let s = &self.suites.ito;
        StochasticParams {
            sde: SdeConfig { gamma: s.gamma, horizon: s.horizon, steps: s.steps, paths: s.paths, seed },
            levels: s.levels,
        }
    }

    /// Chart and declared symbols.
    pub fn table(&self) -> Result<SymbolTable, CliError> {
        let chart = Chart::with_names(self.chart.dim, &self.chart.time, &self.chart.space).map_err(cfg)?;
        let mut t = SymbolTable::new(chart);
        for s in &self.symbols {
            let slots: Vec<Variance> =
                s.slots.iter().map(|v| if *v == Slot::Up { Variance::Upper } else { Variance::Lower }).collect();
            let mut d = SymbolDecl::new(&s.name, &slots);
            if !s.symmetric.is_empty() {
                d = d.symmetric(&s.symmetric);
            }
            if !s.antisymmetric.is_empty() {
                d = d.antisymmetric(&s.antisymmetric);
            }
            if s.is_static {
                d = d.static_in_time();
            }
            t.declare(d).map_err(|e| CliError::Config(format!("symbol `{}`: {e}", s.name)))?;
        }
        for s in &self.symbols {
            if let Some(other) = &s.inverse_of {
                let (upper, lower) =
                    if s.slots.first() == Some(&Slot::Up) { (&s.name, other) } else { (other, &s.name) };
                t.link_inverse(upper, lower).map_err(|e| CliError::Config(format!("inverse of `{}`: {e}", s.name)))?;
            }
        }
        Ok(t)
    }
}

fn cfg(e: ncdc_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn parse_indices(key: &str, arity: usize, chart: &Chart) -> Result<Vec<Idx>, CliError> {
    let idx: Vec<Idx> = key
        .split(',')
        .map(|s| s.trim().parse::<Idx>().map_err(|_| CliError::Config(format!("bad component key `{key}`"))))
        .collect::<Result<_, _>>()?;
    if idx.len() != arity {
        return Err(CliError::Config(format!("component key `{key}` needs {arity} indices")));
    }
    for &i in &idx {
        chart.check_spatial(i).map_err(cfg)?;
    }
    Ok(idx)
}

/// How the components of a tensor relate under a swap of two slots.
#[derive(Clone, Copy)]
enum Swap {
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
}

/// Components of `tensor` as a function of indices, checked against the
/// declared symmetry.
fn components(
    what: &str,
    tensor: &TensorSpec,
    table: &SymbolTable,
    arity: usize,
    swap: Swap,
) -> Result<BTreeMap<Vec<Idx>, ScalarExpr>, CliError> {
    let ch = table.chart();
    let all = index_tuples(ch, arity);
    let mut out = BTreeMap::new();
    match tensor {
        TensorSpec::Symbol(name) => {
            let d = table.get(name).map_err(|e| CliError::Config(format!("{what}: {e}")))?;
            if d.arity() != arity {
                return Err(CliError::Config(format!("{what}: `{name}` must have {arity} indices")));
            }
            for idx in all {
                let v = table.sym(name, &idx).map_err(cfg)?;
                out.insert(idx, v);
            }
        }
        TensorSpec::Components(map) => {
            let mut given = BTreeMap::new();
            for (k, text) in map {
                let idx = parse_indices(k, arity, ch)?;
                let v = parse_scalar(text, table).map_err(|e| CliError::Config(format!("{what}[{k}]: {e}")))?;
                given.insert(idx, v);
            }
            for idx in all {
                let mut partner = idx.clone();
                let (i, j, sign) = match swap {
                    Swap::Symmetric(i, j) => (i, j, 1),
                    Swap::Antisymmetric(i, j) => (i, j, -1),
                };
                partner.swap(i, j);
                let direct = given.get(&idx).cloned();
                let mirrored = given.get(&partner).map(|v| if sign < 0 { -v } else { v.clone() });
                let v = match (direct, mirrored) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(CliError::Config(format!("{what}: components {idx:?} and {partner:?} disagree")))
                    }
                    (Some(a), _) | (None, Some(a)) => a,
                    (None, None) => ScalarExpr::zero(),
                };
                if idx == partner && sign < 0 && !v.is_zero() {
                    return Err(CliError::Config(format!("{what}: diagonal component {idx:?} must vanish")));
                }
                out.insert(idx, v);
            }
        }
    }
    Ok(out)
}

fn index_tuples(ch: &Chart, arity: usize) -> Vec<Vec<Idx>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out.into_iter().flat_map(|p| ch.space().map(move |i| [p.clone(), vec![i]].concat())).collect();
    }
    out
}

/// The connection, diffusion and symplectic data resolved against a table.
pub struct Resolved {
    pub gamma: Option<Gamma>,
    pub b: Option<BTreeMap<Vec<Idx>, ScalarExpr>>,
    pub hamiltonian: Option<ScalarExpr>,
    pub observable: Option<ScalarExpr>,
}

impl Resolved {
    pub fn new(config: &RunConfig, table: &SymbolTable) -> Result<Resolved, CliError> {
        let e = &config.expressions;
        let gamma = match &e.gamma {
            None => None,
            Some(tensor) => {
                let c = components("gamma", tensor, table, 3, Swap::Symmetric(1, 2))?;
                Some(Gamma::from_fn(table.chart(), &|m, n, r| c[&vec![m, n, r]].clone()).map_err(cfg)?)
            }
        };
        let b = e.b.as_ref().map(|s| components("b", s, table, 2, Swap::Symmetric(0, 1))).transpose()?;
        let scalar = |what: &str, s: &Option<String>| {
            s.as_ref()
                .map(|t| parse_scalar(t, table).map_err(|err| CliError::Config(format!("{what}: {err}"))))
                .transpose()
        };
        Ok(Resolved {
            gamma,
            b,
            hamiltonian: scalar("hamiltonian", &e.hamiltonian)?,
            observable: scalar("observable", &e.observable)?,
        })
    }

    pub fn gamma(&self) -> Result<&Gamma, CliError> {
        self.gamma.as_ref().ok_or_else(|| CliError::Config("expressions.gamma is required".into()))
    }

    pub fn ito(&self, chart: &Chart) -> Result<Calculus, CliError> {
        let b = self.b.as_ref().ok_or_else(|| CliError::Config("expressions.b is required".into()))?;
        Calculus::ito(chart.clone(), &|i, j| b[&vec![i, j]].clone()).map_err(cfg)
    }

    pub fn hamiltonian(&self) -> Result<&ScalarExpr, CliError> {
        self.hamiltonian.as_ref().ok_or_else(|| CliError::Config("expressions.hamiltonian is required".into()))
    }

    pub fn observable(&self) -> Result<&ScalarExpr, CliError> {
        self.observable.as_ref().ok_or_else(|| CliError::Config("expressions.observable is required".into()))
    }
}

/// Symplectic data from `expressions.omega`; the dimension must be even.
pub fn symplectic(config: &RunConfig, table: &SymbolTable, h: ScalarExpr) -> Result<SymplecticData, CliError> {
    let ch = table.chart();
    if !ch.dim().is_multiple_of(2) {
        return Err(CliError::Config(format!("symplectic suites need an even dimension, got {}", ch.dim())));
    }
    let e = &config.expressions;
    let tensor = e.omega.as_ref().ok_or_else(|| CliError::Config("expressions.omega is required".into()))?;
    match tensor {
        TensorSpec::Symbol(lower) => {
            let upper = e
                .omega_inverse
                .as_ref()
                .ok_or_else(|| CliError::Config("a symbolic omega needs expressions.omega_inverse".into()))?;
            SymplecticData::symbolic(table, upper, lower, h).map_err(cfg)
        }
        TensorSpec::Components(_) => {
            let c = components("omega", tensor, table, 2, Swap::Antisymmetric(0, 1))?;
            let n = ch.dim();
            let mut w = vec![vec![ScalarExpr::zero(); n]; n];
            for (idx, v) in c {
                w[idx[0] as usize - 1][idx[1] as usize - 1] = v;
            }
            SymplecticData::explicit(ch, w, h).map_err(cfg)
        }
    }
}
