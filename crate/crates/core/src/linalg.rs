//! Sparse Gauss–Jordan elimination over the scalar ring with rational pivots.
//!
//! Rows are linear combinations `Σ c_k·k = 0` with `ScalarExpr`
//! coefficients. A key may only be eliminated through a coefficient that is
//! a nonzero rational constant, so every reduction step stays inside the
//! polynomial ring.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Rational, ScalarExpr};

pub type Row<K> = BTreeMap<K, ScalarExpr>;

/// Accumulate `coef · row` into `acc`.
pub fn axpy<K: Ord + Clone>(acc: &mut Row<K>, coef: &ScalarExpr, row: &Row<K>) {
    for (k, v) in row {
        let term = coef * v;
        if term.is_zero() {
            continue;
        }
        let e = acc.entry(k.clone()).or_default();
        *e += term;
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

#[derive(Debug)]
pub enum Insert<K> {
    /// The row was already in the span.
    Dependent,
    Pivot(K),
    /// Reduced row has no admissible unit coefficient.
    Stuck(Row<K>),
}

/// Reduced row-echelon rewriting system: each pivot key maps to an
/// expansion over non-pivot keys.
#[derive(Clone, Debug)]
pub struct Eliminator<K: Ord + Clone> {
    rules: BTreeMap<K, Row<K>>,
}

impl<K: Ord + Clone> Default for Eliminator<K> {
    fn default() -> Self {
        Self { rules: BTreeMap::new() }
    }
}

impl<K: Ord + Clone + std::fmt::Debug> Eliminator<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rules(&self) -> &BTreeMap<K, Row<K>> {
        &self.rules
    }

    pub fn is_pivot(&self, k: &K) -> bool {
        self.rules.contains_key(k)
    }

    pub fn reduce(&self, row: &Row<K>) -> Row<K> {
        let mut out = Row::new();
        for (k, c) in row {
            match self.rules.get(k) {
                Some(exp) => axpy(&mut out, c, exp),
                None => axpy(&mut out, c, &BTreeMap::from([(k.clone(), ScalarExpr::one())])),
            }
        }
        out
    }

    /// Insert a relation row. The pivot is the largest admissible key whose
    /// coefficient is a nonzero rational.
    pub fn insert(&mut self, row: &Row<K>, admissible: &dyn Fn(&K) -> bool) -> Insert<K> {
        let r = self.reduce(row);
        if r.is_empty() {
            return Insert::Dependent;
        }
        let pivot = r.iter().rev().find_map(|(k, c)| {
            if !admissible(k) {
                return None;
            }
            c.as_rational().filter(|q| !q.is_zero()).map(|q| (k.clone(), q))
        });
        let Some((p, q)) = pivot else {
            return Insert::Stuck(r);
        };
        let inv = -(Rational::from_integer(1.into()) / q);
        let mut exp = Row::new();
        for (k, c) in &r {
            if *k != p {
                exp.insert(k.clone(), c.scale(&inv));
            }
        }
        for other in self.rules.values_mut() {
            if let Some(c) = other.remove(&p) {
                axpy(other, &c, &exp);
            }
        }
        self.rules.insert(p.clone(), exp);
        Insert::Pivot(p)
    }

    /// Insert rows, retrying stuck rows while progress is made.
    pub fn insert_all(&mut self, rows: Vec<Row<K>>, admissible: &dyn Fn(&K) -> bool) -> Vec<Row<K>> {
        let mut pending = rows;
        loop {
            let mut progress = false;
            let mut stuck = Vec::new();
            for r in pending {
                match self.insert(&r, admissible) {
                    Insert::Dependent => {}
                    Insert::Pivot(_) => progress = true,
                    Insert::Stuck(r) => stuck.push(r),
                }
            }
            if stuck.is_empty() || !progress {
                return stuck;
            }
            pending = stuck;
        }
    }
}

/// Unknown or constant column of an affine linear system.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Col<U> {
    One,
    Var(U),
}

/// Solve `Σ_u a_u·u + c = 0` (one row per equation) for every unknown in
/// `unknowns`. Coefficients used as pivots must be rational; right-hand
/// sides may be arbitrary scalar expressions.
pub fn solve_affine<U: Ord + Clone + std::fmt::Debug>(
    rows: Vec<Row<Col<U>>>,
    unknowns: &[U],
) -> Result<BTreeMap<U, ScalarExpr>> {
    let (el, stuck) = eliminate(rows)?;
    if !stuck.is_empty() {
        return Err(Error::NonUnitPivot(format!("{} rows without a rational pivot", stuck.len())));
    }
    let out = determined(&el, unknowns);
    let free: Vec<String> = unknowns.iter().filter(|u| !out.contains_key(*u)).map(|u| format!("{u:?}")).collect();
    if !free.is_empty() {
        return Err(Error::Ambiguous(free.join(", ")));
    }
    Ok(out)
}

/// Like [`solve_affine`] but returns only the unknowns the rows pin down.
/// Rows left without a rational pivot are ignored unless they are
/// inconsistent.
pub fn solve_partial<U: Ord + Clone + std::fmt::Debug>(
    rows: Vec<Row<Col<U>>>,
    unknowns: &[U],
) -> Result<BTreeMap<U, ScalarExpr>> {
    let (el, _) = eliminate(rows)?;
    Ok(determined(&el, unknowns))
}

type Eliminated<U> = (Eliminator<Col<U>>, Vec<Row<Col<U>>>);

fn eliminate<U: Ord + Clone + std::fmt::Debug>(rows: Vec<Row<Col<U>>>) -> Result<Eliminated<U>> {
    let mut el: Eliminator<Col<U>> = Eliminator::new();
    let stuck = el.insert_all(rows, &|k: &Col<U>| matches!(k, Col::Var(_)));
    if let Some(r) = stuck.iter().find(|r| r.keys().all(|k| matches!(k, Col::One))) {
        return Err(Error::Inconsistent(format!("{:?}", r.get(&Col::One))));
    }
    Ok((el, stuck))
}

fn determined<U: Ord + Clone + std::fmt::Debug>(el: &Eliminator<Col<U>>, unknowns: &[U]) -> BTreeMap<U, ScalarExpr> {
    let mut out = BTreeMap::new();
    for u in unknowns {
        if let Some(exp) = el.rules().get(&Col::Var(u.clone())) {
            if exp.keys().all(|k| matches!(k, Col::One)) {
                out.insert(u.clone(), exp.get(&Col::One).cloned().unwrap_or_default());
            }
        }
    }
    out
}
