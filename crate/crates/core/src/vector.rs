//! Second-order vector fields `X = Xᵗ∂_t + Xᵘ∂_μ + ½Xᵘᵛ∂_μ∂_ν`, their
//! duality pairing with 1-forms and insertion into 2-forms.

use rand::Rng;

use crate::error::{Error, Result};
use crate::forms::{Calculus, Form, Gen};
use crate::scalar::{rat, Chart, Idx, ScalarExpr, T};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    chart: Chart,
    t: ScalarExpr,
    x: Vec<ScalarExpr>,
    /// Indexed like `Chart::sym_pairs`.
    xx: Vec<ScalarExpr>,
}

impl VectorField {
    pub fn zero(chart: &Chart) -> VectorField {
        let n = chart.dim();
        VectorField {
            chart: chart.clone(),
            t: ScalarExpr::zero(),
            x: vec![ScalarExpr::zero(); n],
            xx: vec![ScalarExpr::zero(); n * (n + 1) / 2],
        }
    }

    /// `∂_t`.
    pub fn dt(chart: &Chart) -> VectorField {
        let mut v = Self::zero(chart);
        v.t = ScalarExpr::one();
        v
    }

    /// `∂_μ`.
    pub fn partial(chart: &Chart, m: Idx) -> VectorField {
        let mut v = Self::zero(chart);
        v.x[m as usize - 1] = ScalarExpr::one();
        v
    }

    /// `∂_μ∂_ν`, stored so that `½Σ Xᵅᵝ∂_α∂_β` equals it.
    pub fn second(chart: &Chart, m: Idx, n: Idx) -> VectorField {
        let mut v = Self::zero(chart);
        v.set_xx(m, n, ScalarExpr::int(if m == n { 2 } else { 1 }));
        v
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn xt(&self) -> &ScalarExpr {
        &self.t
    }

    pub fn xm(&self, m: Idx) -> &ScalarExpr {
        &self.x[m as usize - 1]
    }

    pub fn xmn(&self, m: Idx, n: Idx) -> &ScalarExpr {
        &self.xx[self.pair(m, n)]
    }

    pub fn set_t(&mut self, e: ScalarExpr) {
        self.t = e;
    }

    pub fn set_x(&mut self, m: Idx, e: ScalarExpr) {
        self.x[m as usize - 1] = e;
    }

    pub fn set_xx(&mut self, m: Idx, n: Idx, e: ScalarExpr) {
        let p = self.pair(m, n);
        self.xx[p] = e;
    }

    fn pair(&self, m: Idx, n: Idx) -> usize {
        let (a, b) = if m <= n { (m, n) } else { (n, m) };
        self.chart.sym_pairs().iter().position(|&p| p == (a, b)).expect("valid pair")
    }

    /// Component paired with a generator: `⟨X, g⟩`.
    pub fn on_gen(&self, g: Gen) -> ScalarExpr {
        match g {
            Gen::Dt => self.t.clone(),
            Gen::Dx(m) => self.xm(m).clone(),
            Gen::Xi(a, b) => self.xmn(a, b).clone(),
        }
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, o: &VectorField, f: impl Fn(&ScalarExpr, &ScalarExpr) -> ScalarExpr) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            t: f(&self.t, &o.t),
            x: self.x.iter().zip(&o.x).map(|(a, b)| f(a, b)).collect(),
            xx: self.xx.iter().zip(&o.xx).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            t: f(&self.t),
            x: self.x.iter().map(&f).collect(),
            xx: self.xx.iter().map(&f).collect(),
        }
    }

    /// `f·X`.
    pub fn left_mul(&self, f: &ScalarExpr) -> VectorField {
        self.map(|c| f * c)
    }

    /// `X·h`, fixed by `⟨X·h, α⟩ = ⟨X, h·α⟩`.
    pub fn right_mul(&self, calc: &Calculus, h: &ScalarExpr) -> Result<VectorField> {
        let mut out = VectorField::zero(&self.chart);
        for g in calc.generators() {
            let v = pair(calc, self, &calc.gen(g).left_mul(h))?;
            match g {
                Gen::Dt => out.t = v,
                Gen::Dx(m) => out.set_x(m, v),
                Gen::Xi(a, b) => out.set_xx(a, b, v),
            }
        }
        if calc.is_ito() {
            out.xx = self.xx.iter().map(|c| c * h).collect();
        }
        Ok(out)
    }

    /// Second-order components forced by the Itô specialization:
    /// `Xᵘᵛ = −bᵘᵛ Xᵗ`.
    pub fn with_ito_completion(&self, calc: &Calculus) -> VectorField {
        let mut v = self.clone();
        for (a, b) in self.chart.sym_pairs() {
            v.set_xx(a, b, -(&calc.b(a, b) * &self.t));
        }
        v
    }

    /// `X(f) = Xᵗ∂_tf + Xᵘ∂_μf + ½Xᵘᵛ∂_μ∂_νf`.
    pub fn apply(&self, f: &ScalarExpr) -> ScalarExpr {
        let mut acc = ScalarExpr::zero();
        acc.add_product(&self.t, &f.partial(T));
        for m in self.chart.space() {
            acc.add_product(self.xm(m), &f.partial(m));
        }
        for (a, b) in self.chart.sym_pairs() {
            let w = if a == b { rat(1, 2) } else { rat(1, 1) };
            acc.add_product(&self.xmn(a, b).scale(&w), &f.partial(a).partial(b));
        }
        acc
    }
}

/// Duality pairing `⟨X, α⟩`, right-linear in `α`.
pub fn pair(calc: &Calculus, x: &VectorField, a: &Form) -> Result<ScalarExpr> {
    calc.pair_right(a, &|g| x.on_gen(g))
}

/// Insertion into a 2-form from its left normal form:
/// `ι_X(c·g h) = c·(⟨X,g⟩h − ⟨X,h⟩g)`.
pub fn insert(calc: &Calculus, x: &VectorField, w: &Form) -> Result<Form> {
    if w.degree() != 2 {
        return Err(Error::Degree { expected: 2, got: w.degree() });
    }
    let mut acc = Form::zero(1);
    for (word, c) in w.terms() {
        let (g, h) = (word[0], word[1]);
        acc.add_assign_scaled(&calc.gen(h), &(c * &x.on_gen(g)));
        acc.add_assign_scaled(&calc.gen(g), &-(c * &x.on_gen(h)));
    }
    Ok(acc)
}

/// `X(f³) − 3fX(f²) + 3f²X(f)`, which vanishes for second-order operators.
pub fn cubic_defect(op: &dyn Fn(&ScalarExpr) -> ScalarExpr, f: &ScalarExpr) -> ScalarExpr {
    let f2 = f * f;
    let f3 = &f2 * f;
    let mut r = op(&f3);
    r -= &(f * &op(&f2)).scale(&rat(3, 1));
    r += &(&f2 * &op(f)).scale(&rat(3, 1));
    r
}

/// Test family for [`is_second_order`]: every coordinate monomial of degree
/// at most three plus `random` random polynomials.
pub fn test_scalars(chart: &Chart, random: usize, rng: &mut impl Rng) -> Vec<ScalarExpr> {
    let coords: Vec<Idx> = chart.all().collect();
    let mut out = vec![ScalarExpr::one()];
    let mut layer = vec![(ScalarExpr::one(), 0usize)];
    for _ in 0..3 {
        let mut next = Vec::new();
        for (m, start) in &layer {
            for (k, &c) in coords.iter().enumerate().skip(*start) {
                next.push((m * &ScalarExpr::coord(c), k));
            }
        }
        out.extend(next.iter().map(|(m, _)| m.clone()));
        layer = next;
    }
    for _ in 0..random {
        let mut p = ScalarExpr::zero();
        for _ in 0..rng.random_range(1..=4) {
            let mut m = ScalarExpr::int(rng.random_range(-5..=5));
            for _ in 0..rng.random_range(0..=2) {
                m = &m * &ScalarExpr::coord(coords[rng.random_range(0..coords.len())]);
            }
            p += m;
        }
        out.push(p);
    }
    out
}

/// Second-order test (2.11) on a generating family of test scalars.
pub fn is_second_order(op: &dyn Fn(&ScalarExpr) -> ScalarExpr, family: &[ScalarExpr]) -> bool {
    family.iter().all(|f| cubic_defect(op, f).is_zero())
}
