//! Quotient differential calculus on a chart: forms of degree ≤ 3 as
//! left-coefficient sums over words in the generators `dt`, `dxᵘ`, `ξᵘᵛ`,
//! reduced modulo the degree-2 relations and their degree-3 consequences.
//!
//! The same machinery also hosts the Itô-specialized calculus, where `ξᵘᵛ`
//! is identified with `−dt·bᵘᵛ` and only `dt`, `dxᵘ` remain as generators.

mod calculus;
mod tensor;

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::scalar::{Idx, Rational, ScalarExpr};

pub use calculus::{Calculus, Kind};
pub use tensor::Tensor;

/// Degree-1 generators, ordered `dt < dx¹ < … < dxᴺ < ξ¹¹ < ξ¹² < …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    Dt,
    Dx(Idx),
    /// Stored with the first index not larger than the second.
    Xi(Idx, Idx),
}

impl Gen {
    pub fn xi(a: Idx, b: Idx) -> Gen {
        if a <= b {
            Gen::Xi(a, b)
        } else {
            Gen::Xi(b, a)
        }
    }

    /// Generators commuting with every function.
    pub fn is_central(self) -> bool {
        !matches!(self, Gen::Dx(_))
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::Dt => write!(f, "dt"),
            Gen::Dx(i) => write!(f, "dx[{i}]"),
            Gen::Xi(a, b) => write!(f, "xi[{a},{b}]"),
        }
    }
}

pub type Word = SmallVec<[Gen; 3]>;

pub const MAX_DEGREE: usize = 3;

/// A homogeneous form with coefficients on the left of each word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Form {
    degree: usize,
    terms: BTreeMap<Word, ScalarExpr>,
}

impl Form {
    pub fn zero(degree: usize) -> Form {
        Form { degree, terms: BTreeMap::new() }
    }

    pub(crate) fn from_terms(degree: usize, terms: BTreeMap<Word, ScalarExpr>) -> Form {
        debug_assert!(terms.keys().all(|w| w.len() == degree));
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Form { degree, terms }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Word, ScalarExpr> {
        &self.terms
    }

    pub fn coeff(&self, w: &[Gen]) -> ScalarExpr {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The degree-0 coefficient (zero for higher degrees).
    pub fn scalar_part(&self) -> ScalarExpr {
        if self.degree == 0 {
            self.coeff(&[])
        } else {
            ScalarExpr::zero()
        }
    }

    fn check_same(&self, other: &Form) {
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
    }

    pub fn add(&self, other: &Form) -> Form {
        self.check_same(other);
        let mut out = self.clone();
        out.add_assign_scaled(other, &ScalarExpr::one());
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.check_same(other);
        let mut out = self.clone();
        out.add_assign_scaled(other, &ScalarExpr::int(-1));
        out
    }

    pub fn neg(&self) -> Form {
        self.scale(&Rational::from_integer((-1).into()))
    }

    pub fn scale(&self, q: &Rational) -> Form {
        Form::from_terms(self.degree, self.terms.iter().map(|(w, c)| (w.clone(), c.scale(q))).collect())
    }

    /// `f·α`; left multiplication by a function only touches coefficients.
    pub fn left_mul(&self, f: &ScalarExpr) -> Form {
        Form::from_terms(self.degree, self.terms.iter().map(|(w, c)| (w.clone(), f * c)).collect())
    }

    /// `self += f·other`.
    pub fn add_assign_scaled(&mut self, other: &Form, f: &ScalarExpr) {
        self.check_same(other);
        for (w, c) in &other.terms {
            let t = f * c;
            if t.is_zero() {
                continue;
            }
            let e = self.terms.entry(w.clone()).or_default();
            *e += t;
            if e.is_zero() {
                self.terms.remove(w);
            }
        }
    }

    /// Apply a function to every coefficient.
    pub fn map_coeffs(&self, f: &dyn Fn(&ScalarExpr) -> ScalarExpr) -> Form {
        Form::from_terms(self.degree, self.terms.iter().map(|(w, c)| (w.clone(), f(c))).collect())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})")?;
            for g in w {
                write!(f, " {g}")?;
            }
        }
        Ok(())
    }
}
