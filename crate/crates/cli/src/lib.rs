//! Command-line orchestration for the `ncdc` verification engine: loads a
//! JSON configuration, runs the selected suites and writes a JSON report.

pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use ncdc_core::checks::{self, Derivation, StochasticParams};
use ncdc_core::symplectic::{FpSymbols, Mechanics};
use ncdc_core::{Calculus, Check, Connection, Printable, ScalarExpr, SymbolDecl, SymbolTable, Variance};

use config::{Resolved, RunConfig, TensorSpec};
use report::{DerivedEquation, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Parser)]
#[command(name = "ncdc", version, about = "Verify second-order differential calculus identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    #[arg(long, global = true, default_value = "config.json")]
    pub config: PathBuf,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Override the chart dimension.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Also write the derived equation as LaTeX.
    #[arg(long, global = true)]
    pub latex: bool,
}

#[derive(Debug, Clone, Copy, Subcommand, PartialEq, Eq)]
pub enum Command {
    /// Calculus identities and vector-field pairing on random instances.
    VerifyCore,
    /// Connection tables, torsion, wedge and curvature identities.
    VerifyConnection,
    /// Hamiltonian vector field and the evolution equation of an observable.
    Derive,
    /// Match of the evolution equation with the Fokker-Planck generator.
    FpCheck,
    /// Monte Carlo checks of the Wiener-process calculus.
    Ito,
    /// The universal calculus on a finite set.
    Universal,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyCore => "verify-core",
            Command::VerifyConnection => "verify-connection",
            Command::Derive => "derive",
            Command::FpCheck => "fp-check",
            Command::Ito => "ito",
            Command::Universal => "universal",
        }
    }
}

/// What a run produced before it is written out.
pub struct Outcome {
    pub report: Report,
    pub latex: Option<String>,
}

const TAG: &str = "config";

fn core_err(e: ncdc_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

/// Run `command` against a parsed configuration.
pub fn execute(command: Command, mut cfg: RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    if let Some(n) = opts.dim {
        cfg.chart.dim = n;
        cfg.suites.core.dims = vec![n];
        cfg.suites.connection.random_dim = n;
    }
    let seed = opts.seed.unwrap_or(cfg.seed());
    let mut derived = None;
    let checks: Vec<Check> = match command {
        Command::VerifyCore => {
            let mut out = Vec::new();
            for &n in &cfg.suites.core.dims {
                out.extend(checks::core_calculus(n, cfg.suites.core.instances, seed).map_err(core_err)?);
                out.extend(checks::vector_fields(n, cfg.suites.core.instances, seed).map_err(core_err)?);
            }
            out
        }
        Command::VerifyConnection => {
            let s = &cfg.suites.connection;
            let mut out = checks::connection_random(s.random_dim, s.random_instances, seed).map_err(core_err)?;
            let table = cfg.table()?;
            let res = Resolved::new(&cfg, &table)?;
            let calc = Calculus::general(table.chart().clone());
            let ito = res.ito(table.chart())?;
            let conn = Connection::derive(&calc, res.gamma()?).map_err(core_err)?;
            out.extend(checks::connection_identities(&conn, &ito, TAG));
            let mech = Mechanics::new(&conn, &ito).map_err(core_err)?;
            out.extend(checks::structure(&mech, TAG));
            out
        }
        Command::Derive | Command::FpCheck => {
            let mut table = cfg.table()?;
            let fp_names =
                if command == Command::FpCheck { Some(declare_fp_auxiliaries(&cfg, &mut table)?) } else { None };
            let observable = declare_observable(&cfg, &mut table)?;
            let res = Resolved::new(&cfg, &table)?;
            let h = res.hamiltonian()?.clone();
            let a = match &res.observable {
                Some(a) => a.clone(),
                None => table.sym(&observable, &[]).map_err(core_err)?,
            };
            let data = config::symplectic(&cfg, &table, h)?;
            let calc = Calculus::general(table.chart().clone());
            let ito = res.ito(table.chart())?;
            let conn = Connection::derive(&calc, res.gamma()?).map_err(core_err)?;
            let mech = Mechanics::new(&conn, &ito).map_err(core_err)?;
            let (mut out, deriv) = checks::derivation(&mech, &data, &a, TAG);
            if let Some(d) = deriv {
                derived = Some(equation(&cfg, &table, &observable, &d, opts.latex));
            }
            if let Some(names) = fp_names {
                out.extend(checks::fokker_planck(&mech, &data, &table, &names, &a, TAG));
            }
            out
        }
        Command::Ito => {
            let params: StochasticParams = cfg.stochastic_params(seed);
            params.sde.validate().map_err(core_err)?;
            checks::stochastic(&params, &cfg.tolerances.stochastic())
        }
        Command::Universal => {
            let p = cfg.suites.universal.points;
            if p == 0 {
                return Err(CliError::Config("suites.universal.points must be positive".into()));
            }
            checks::universal(p, seed)
        }
    };
    let latex = derived.as_ref().and_then(|d: &DerivedEquation| d.latex.clone());
    let report = Report::new(command.name(), seed, cfg.chart.dim, &checks, derived);
    Ok(Outcome { report, latex })
}

/// Name used for the observable in printed equations. A missing
/// `expressions.observable` means a fresh scalar `A`.
fn declare_observable(cfg: &RunConfig, table: &mut SymbolTable) -> Result<String, CliError> {
    match &cfg.expressions.observable {
        Some(text) => Ok(text.clone()),
        None => {
            if !table.contains("A") {
                table.declare(SymbolDecl::scalar("A")).map_err(core_err)?;
            }
            Ok("A".into())
        }
    }
}

fn symbol_name<'a>(what: &str, tensor: &'a Option<TensorSpec>) -> Result<&'a str, CliError> {
    match tensor {
        Some(TensorSpec::Symbol(s)) => Ok(s),
        _ => Err(CliError::Config(format!("fp-check needs expressions.{what} to name a declared symbol"))),
    }
}

/// Declare `H0`, `F`, `Fmu`, `beta` and `a` unless the config already did.
fn declare_fp_auxiliaries(cfg: &RunConfig, table: &mut SymbolTable) -> Result<FpSymbols, CliError> {
    use Variance::{Lower as L, Upper as U};
    let e = &cfg.expressions;
    let h =
        e.hamiltonian.clone().filter(|h| table.get(h).is_ok_and(|d| d.arity() == 0)).ok_or_else(|| {
            CliError::Config("fp-check needs expressions.hamiltonian to name a declared scalar".into())
        })?;
    let names = FpSymbols {
        h,
        h0: "H0".into(),
        f: "F".into(),
        f_mu: "Fmu".into(),
        beta: "beta".into(),
        a: "a".into(),
        b: symbol_name("b", &e.b)?.into(),
        gamma: symbol_name("gamma", &e.gamma)?.into(),
    };
    let wanted = [
        SymbolDecl::scalar(&names.h0),
        SymbolDecl::scalar(&names.f),
        SymbolDecl::scalar(&names.beta),
        SymbolDecl::new(&names.f_mu, &[L]),
        SymbolDecl::new(&names.a, &[U, U]).symmetric(&[0, 1]),
    ];
    for d in wanted {
        match table.get(&d.name) {
            Ok(existing) if existing.arity() != d.arity() => {
                return Err(CliError::Config(format!("symbol `{}` must have {} indices", d.name, d.arity())))
            }
            Ok(_) => {}
            Err(_) => table.declare(d).map_err(core_err)?,
        }
    }
    Ok(names)
}

fn equation(cfg: &RunConfig, table: &SymbolTable, a: &str, d: &Derivation, latex: bool) -> DerivedEquation {
    let ch = table.chart();
    let h = cfg.expressions.hamiltonian.as_deref().unwrap_or("H");
    let lhs = format!("D[t]({a})");
    let bracket = format!("-{{{h},{a}}}");
    let rest = d.beyond_bracket.canonical(ch);
    let bracket_form = if d.beyond_bracket.is_zero() {
        format!("{lhs} = {bracket}")
    } else if let Some(neg) = rest.strip_prefix('-') {
        format!("{lhs} = {bracket} - {neg}")
    } else {
        format!("{lhs} = {bracket} + {rest}")
    };
    DerivedEquation {
        equation: format!("{lhs} = {}", d.rhs.canonical(ch)),
        bracket_form,
        latex: latex.then(|| format!("\\partial_t {} = {}", latex_name(a, table), d.rhs.latex(table))),
    }
}

fn latex_name(a: &str, table: &SymbolTable) -> String {
    match ncdc_core::exprlang::parse_scalar(a, table) {
        Ok(e) if e != ScalarExpr::zero() => e.latex(table),
        _ => a.to_string(),
    }
}

/// Load, run and write. Returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = RunConfig::load(&cli.opts.config).and_then(|cfg| {
        let outcome = execute(cli.command, cfg, &cli.opts)?;
        let path = outcome.report.write(&cli.opts.out)?;
        if let Some(tex) = &outcome.latex {
            let p = cli.opts.out.join("equation.tex");
            std::fs::write(&p, format!("\\begin{{equation}}\n{tex}\n\\end{{equation}}\n"))
                .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        }
        Ok((outcome, path))
    });
    match result {
        Ok((outcome, path)) => {
            let t = &outcome.report.summary.totals;
            for r in outcome.report.checks.iter().filter(|r| r.status == report::Status::Fail) {
                eprintln!("FAIL {}: {}", r.id, r.residual);
            }
            if let Some(d) = &outcome.report.summary.derivation {
                println!("{}", d.bracket_form);
            }
            println!("{}: {}/{} checks passed, report at {}", cli.command.name(), t.passed, t.checks, path.display());
            if outcome.report.all_passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("ncdc: {e}");
            e.exit_code()
        }
    }
}
