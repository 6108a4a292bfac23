//! Polynomials over ℚ in coordinates and derivative-tagged opaque symbols.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::chart::{Idx, T};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub type Indices = SmallVec<[Idx; 4]>;

/// One instance of an opaque function symbol: name, concrete indices and a
/// sorted multiset of partial-derivative indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymAtom {
    pub(crate) name: Arc<str>,
    pub(crate) indices: Indices,
    pub(crate) derivs: Indices,
    pub(crate) static_t: bool,
}

impl SymAtom {
    pub fn new(name: &str, indices: &[Idx], static_t: bool) -> Self {
        Self { name: name.into(), indices: indices.into(), derivs: Indices::new(), static_t }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn indices(&self) -> &[Idx] {
        &self.indices
    }

    pub fn derivs(&self) -> &[Idx] {
        &self.derivs
    }

    pub fn is_static(&self) -> bool {
        self.static_t
    }

    /// The same symbol instance with its derivative tags removed.
    pub fn base(&self) -> SymAtom {
        SymAtom { derivs: Indices::new(), ..self.clone() }
    }

    fn differentiated(&self, i: Idx) -> Option<SymAtom> {
        if i == T && self.static_t {
            return None;
        }
        let mut a = self.clone();
        let pos = a.derivs.iter().position(|&d| d > i).unwrap_or(a.derivs.len());
        a.derivs.insert(pos, i);
        Some(a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Coord(Idx),
    Sym(SymAtom),
}

/// A power product of atoms, kept sorted by atom.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn atom(a: Atom) -> Self {
        Self(vec![(a, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Divide out one power of `atom`; `None` if it does not divide.
    pub fn without(&self, atom: &Atom) -> Option<Monomial> {
        let pos = self.0.iter().position(|(a, _)| a == atom)?;
        let mut v = self.0.clone();
        if v[pos].1 == 1 {
            v.remove(pos);
        } else {
            v[pos].1 -= 1;
        }
        Some(Monomial(v))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of the scalar ring in canonical form: no zero coefficients,
/// terms sorted by the degree-lexicographic monomial order.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ScalarExpr {
    terms: BTreeMap<Monomial, Rational>,
}

impl ScalarExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(q: Rational) -> Self {
        let mut e = Self::zero();
        if !q.is_zero() {
            e.terms.insert(Monomial::one(), q);
        }
        e
    }

    pub fn int(n: i64) -> Self {
        Self::constant(int(n))
    }

    pub fn rat(n: i64, d: i64) -> Self {
        Self::constant(rat(n, d))
    }

    /// Kronecker delta of two concrete indices.
    pub fn delta(a: Idx, b: Idx) -> Self {
        if a == b {
            Self::one()
        } else {
            Self::zero()
        }
    }

    pub fn coord(i: Idx) -> Self {
        Self::from_atom(Atom::Coord(i))
    }

    /// A bare symbol instance, bypassing symmetry canonicalization.
    pub fn atom(a: SymAtom) -> Self {
        Self::from_atom(Atom::Sym(a))
    }

    pub fn from_atom(a: Atom) -> Self {
        let mut e = Self::zero();
        e.terms.insert(Monomial::atom(a), Rational::one());
        e
    }

    pub fn from_term(m: Monomial, q: Rational) -> Self {
        let mut e = Self::zero();
        if !q.is_zero() {
            e.terms.insert(m, q);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this expression is a rational constant (zero included).
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_rational().is_some()
    }

    fn add_term(&mut self, m: Monomial, q: Rational) {
        if q.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(q);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += q;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &ScalarExpr, q: &Rational) {
        if q.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * q);
        }
    }

    /// `self += a * b` without materializing the product separately.
    pub fn add_product(&mut self, a: &ScalarExpr, b: &ScalarExpr) {
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                self.add_term(ma.mul(mb), ca * cb);
            }
        }
    }

    pub fn scale(&self, q: &Rational) -> ScalarExpr {
        if q.is_zero() {
            return Self::zero();
        }
        ScalarExpr { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub fn pow(&self, n: u32) -> ScalarExpr {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative along coordinate `i` (`0` = time).
    pub fn partial(&self, i: Idx) -> ScalarExpr {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for (k, (atom, e)) in m.0.iter().enumerate() {
                let replacement = match atom {
                    Atom::Coord(j) => {
                        if *j == i {
                            None
                        } else {
                            continue;
                        }
                    }
                    Atom::Sym(s) => match s.differentiated(i) {
                        Some(ds) => Some(Atom::Sym(ds)),
                        None => continue,
                    },
                };
                let mut rest = m.0.clone();
                if *e == 1 {
                    rest.remove(k);
                } else {
                    rest[k].1 -= 1;
                }
                let mut mono = Monomial(rest);
                if let Some(r) = replacement {
                    mono = mono.mul(&Monomial::atom(r));
                }
                out.add_term(mono, c * int(*e as i64));
            }
        }
        out
    }

    /// Partial derivatives along a list of indices, applied in order.
    pub fn partials(&self, idx: &[Idx]) -> ScalarExpr {
        idx.iter().fold(self.clone(), |e, &i| e.partial(i))
    }

    /// All distinct symbol atoms (with derivative tags) occurring.
    pub fn symbols(&self) -> Vec<SymAtom> {
        let mut v: Vec<SymAtom> = Vec::new();
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                if let Atom::Sym(s) = a {
                    v.push(s.clone());
                }
            }
        }
        v.sort();
        v.dedup();
        v
    }

    /// Largest total derivative order of any symbol whose name passes `pred`.
    pub fn max_deriv_order(&self, pred: impl Fn(&str) -> bool) -> usize {
        self.symbols().iter().filter(|s| pred(&s.name)).map(|s| s.derivs.len()).max().unwrap_or(0)
    }

    /// Replace symbol instances. `f` sees the underived base atom; derivative
    /// tags are then applied to the replacement by differentiation.
    pub fn substitute(&self, f: &dyn Fn(&SymAtom) -> Option<ScalarExpr>) -> ScalarExpr {
        let mut cache: HashMap<SymAtom, Option<ScalarExpr>> = HashMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut acc = ScalarExpr::constant(c.clone());
            let mut kept = Monomial::one();
            for (a, e) in &m.0 {
                let rep = match a {
                    Atom::Sym(s) => {
                        cache.entry(s.clone()).or_insert_with(|| f(&s.base()).map(|r| r.partials(&s.derivs))).clone()
                    }
                    Atom::Coord(_) => None,
                };
                match rep {
                    Some(r) => acc = &acc * &r.pow(*e),
                    None => kept = kept.mul(&Monomial(vec![(a.clone(), *e)])),
                }
            }
            for (m2, c2) in acc.terms {
                out.add_term(m2.mul(&kept), c2);
            }
        }
        out
    }

    /// Replace coordinates by scalar expressions.
    pub fn substitute_coords(&self, f: &dyn Fn(Idx) -> Option<ScalarExpr>) -> ScalarExpr {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut acc = ScalarExpr::constant(c.clone());
            let mut kept = Monomial::one();
            for (a, e) in &m.0 {
                match a {
                    Atom::Coord(i) => match f(*i) {
                        Some(r) => acc = &acc * &r.pow(*e),
                        None => kept = kept.mul(&Monomial(vec![(a.clone(), *e)])),
                    },
                    Atom::Sym(_) => kept = kept.mul(&Monomial(vec![(a.clone(), *e)])),
                }
            }
            for (m2, c2) in acc.terms {
                out.add_term(m2.mul(&kept), c2);
            }
        }
        out
    }

    /// Exact evaluation; `sym` must supply a value for every symbol atom.
    pub fn eval(&self, coords: &[Rational], sym: &dyn Fn(&SymAtom) -> Rational) -> Rational {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (a, e) in &m.0 {
                let x = match a {
                    Atom::Coord(i) => coords[*i as usize].clone(),
                    Atom::Sym(s) => sym(s),
                };
                v *= num_traits::pow(x, *e as usize);
            }
            total += v;
        }
        total
    }

    /// Split into parts linear in atoms selected by `is_unknown`:
    /// `self = Σ coeff_u · u + rest`. Fails on products of unknowns or on
    /// unknowns carrying derivative tags.
    pub fn linear_split(
        &self,
        is_unknown: &dyn Fn(&SymAtom) -> bool,
    ) -> crate::error::Result<(BTreeMap<SymAtom, ScalarExpr>, ScalarExpr)> {
        let mut lin: BTreeMap<SymAtom, ScalarExpr> = BTreeMap::new();
        let mut rest = Self::zero();
        for (m, c) in &self.terms {
            let mut found: Option<SymAtom> = None;
            for (a, e) in &m.0 {
                if let Atom::Sym(s) = a {
                    if is_unknown(s) {
                        if found.is_some() || *e > 1 || !s.derivs.is_empty() {
                            return Err(crate::error::Error::NonLinear(format!("{s:?}")));
                        }
                        found = Some(s.clone());
                    }
                }
            }
            match found {
                None => rest.add_term(m.clone(), c.clone()),
                Some(u) => {
                    let cm = m.without(&Atom::Sym(u.clone())).expect("unknown divides monomial");
                    lin.entry(u).or_default().add_term(cm, c.clone());
                }
            }
        }
        lin.retain(|_, v| !v.is_zero());
        Ok((lin, rest))
    }

    pub(crate) fn raw_terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    /// Sign of the leading coefficient, used for display decisions.
    pub fn leading_is_negative(&self) -> bool {
        self.terms.values().next_back().map(|c| c.is_negative()).unwrap_or(false)
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (a, e) in &m.0 {
                match a {
                    Atom::Coord(i) => write!(f, "*c{i}")?,
                    Atom::Sym(s) => write!(f, "*{}{:?}d{:?}", s.name, s.indices.as_slice(), s.derivs.as_slice())?,
                }
                if *e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl From<Rational> for ScalarExpr {
    fn from(q: Rational) -> Self {
        Self::constant(q)
    }
}

impl From<i64> for ScalarExpr {
    fn from(n: i64) -> Self {
        Self::int(n)
    }
}

impl<'a> Add<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &ScalarExpr) -> ScalarExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for ScalarExpr {
    type Output = ScalarExpr;
    fn add(mut self, rhs: ScalarExpr) -> ScalarExpr {
        self += &rhs;
        self
    }
}

impl AddAssign<&ScalarExpr> for ScalarExpr {
    fn add_assign(&mut self, rhs: &ScalarExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign for ScalarExpr {
    fn add_assign(&mut self, rhs: ScalarExpr) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl SubAssign<&ScalarExpr> for ScalarExpr {
    fn sub_assign(&mut self, rhs: &ScalarExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl SubAssign for ScalarExpr {
    fn sub_assign(&mut self, rhs: ScalarExpr) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl<'a> Sub<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &ScalarExpr) -> ScalarExpr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for ScalarExpr {
    type Output = ScalarExpr;
    fn sub(mut self, rhs: ScalarExpr) -> ScalarExpr {
        self -= rhs;
        self
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(mut self) -> ScalarExpr {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl<'a> Mul<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &ScalarExpr) -> ScalarExpr {
        if let Some(q) = rhs.as_rational() {
            return self.scale(&q);
        }
        if let Some(q) = self.as_rational() {
            return rhs.scale(&q);
        }
        let mut out = ScalarExpr::zero();
        out.add_product(self, rhs);
        out
    }
}

impl Mul for ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: ScalarExpr) -> ScalarExpr {
        &self * &rhs
    }
}

impl Mul<&Rational> for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &Rational) -> ScalarExpr {
        self.scale(rhs)
    }
}

impl std::iter::Sum for ScalarExpr {
    fn sum<I: Iterator<Item = ScalarExpr>>(iter: I) -> Self {
        let mut acc = ScalarExpr::zero();
        for e in iter {
            acc += e;
        }
        acc
    }
}
