//! Named verification suites. Each check runs one identity over a family of
//! instances and records whether it held, the first offending residual in
//! canonical text, and the elapsed time.

mod calculus;
mod connection;
mod mechanics;
mod stochastic;
mod universal;

use std::time::{Duration, Instant};

use crate::error::Result;
use crate::exprlang::Printable;
use crate::forms::{Form, Tensor};
use crate::scalar::{Chart, ScalarExpr};

pub use calculus::{core_calculus, vector_fields};
pub use connection::{connection_identities, connection_random};
pub use mechanics::{darboux, derivation, fokker_planck, standard_fp_symbols, standard_table, structure, Derivation};
pub use stochastic::{stochastic, StochasticParams, StochasticTolerances};
pub use universal::universal;

/// Result of one named check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub id: String,
    /// The statement being checked.
    pub anchor: String,
    pub passed: bool,
    /// `0` when an exact identity held, otherwise the first nonzero
    /// residual; numeric checks give the measured statistic.
    pub residual: String,
    /// Extra findings reported alongside the verdict.
    pub note: Option<String>,
    pub elapsed: Duration,
}

/// What a check body returns.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub residual: String,
    pub note: Option<String>,
}

impl Outcome {
    pub fn new(passed: bool, residual: impl Into<String>) -> Outcome {
        Outcome { passed, residual: residual.into(), note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Outcome {
        self.note = Some(note.into());
        self
    }
}

/// Run `body` and time it. An error inside the body fails the check with
/// the error text as residual.
pub fn run(id: impl Into<String>, anchor: impl Into<String>, body: impl FnOnce() -> Result<Outcome>) -> Check {
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    let (passed, residual, note) = match out {
        Ok(o) => (o.passed, o.residual, o.note),
        Err(e) => (false, format!("error: {e}"), None),
    };
    Check { id: id.into(), anchor: anchor.into(), passed, residual, note, elapsed }
}

/// Values that can stand as exact residuals.
pub trait Residual {
    fn vanishes(&self) -> bool;
    fn text(&self, chart: &Chart) -> String;
}

impl Residual for ScalarExpr {
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn text(&self, chart: &Chart) -> String {
        self.canonical(chart)
    }
}

impl Residual for Form {
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn text(&self, chart: &Chart) -> String {
        self.canonical(chart)
    }
}

impl Residual for Tensor {
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn text(&self, chart: &Chart) -> String {
        self.canonical(chart)
    }
}

/// Collects exact residuals, remembering the first that does not vanish.
#[derive(Debug, Default)]
pub struct Residuals {
    total: usize,
    nonzero: usize,
    first: Option<String>,
}

impl Residuals {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push<R: Residual + ?Sized>(&mut self, chart: &Chart, r: &R) {
        self.total += 1;
        if !r.vanishes() {
            self.nonzero += 1;
            if self.first.is_none() {
                self.first = Some(r.text(chart));
            }
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn nonzero(&self) -> usize {
        self.nonzero
    }

    /// Passes when every residual vanished.
    pub fn all_zero(self) -> Outcome {
        match self.first {
            None => Outcome::new(self.total > 0, "0"),
            Some(t) => Outcome::new(false, t),
        }
    }

    /// Passes when every residual is nonzero; used for counterexamples.
    pub fn all_nonzero(self) -> Outcome {
        if self.total > 0 && self.nonzero == self.total {
            Outcome::new(true, self.first.unwrap_or_default())
        } else {
            Outcome::new(false, format!("{} of {} residuals vanished", self.total - self.nonzero, self.total))
        }
    }
}
