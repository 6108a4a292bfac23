use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::forms::{Calculus, Form, Gen, Tensor};
use crate::scalar::{rat, Chart, Idx, Rational, ScalarExpr, SymbolTable};
use crate::vector::VectorField;

/// Components `Γᵘ_{νρ}` of a symmetric ordinary connection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gamma {
    chart: Chart,
    comps: BTreeMap<(Idx, Idx, Idx), ScalarExpr>,
}

impl Gamma {
    pub fn from_fn(chart: &Chart, f: &dyn Fn(Idx, Idx, Idx) -> ScalarExpr) -> Result<Gamma> {
        let mut comps = BTreeMap::new();
        for m in chart.space() {
            for n in chart.space() {
                for r in chart.space() {
                    let v = f(m, n, r);
                    if n < r && v != f(m, r, n) {
                        return Err(Error::Invalid(format!("Γ^{m}_{{{n}{r}}} is not symmetric in its lower pair")));
                    }
                    comps.insert((m, n, r), v);
                }
            }
        }
        Ok(Gamma { chart: chart.clone(), comps })
    }

    pub fn zero(chart: &Chart) -> Gamma {
        Self::from_fn(chart, &|_, _, _| ScalarExpr::zero()).expect("zero is symmetric")
    }

    /// Opaque components of a declared symbol with one upper and two
    /// symmetric lower slots.
    pub fn symbolic(table: &SymbolTable, name: &str) -> Result<Gamma> {
        table.sym(name, &[1, 1, 1])?;
        Self::from_fn(table.chart(), &|m, n, r| table.s(name, &[m, n, r]))
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// `Γᵘ_{νρ}`.
    pub fn get(&self, m: Idx, n: Idx, r: Idx) -> &ScalarExpr {
        &self.comps[&(m, n, r)]
    }

    /// `Γ^ρ_{ρμ}`.
    pub fn trace(&self, m: Idx) -> ScalarExpr {
        self.chart.space().map(|r| self.get(r, r, m).clone()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(ScalarExpr::is_zero)
    }

    pub fn map(&self, f: &dyn Fn(&ScalarExpr) -> ScalarExpr) -> Gamma {
        Gamma { chart: self.chart.clone(), comps: self.comps.iter().map(|(k, v)| (*k, f(v))).collect() }
    }
}

/// Weight of the stored generator `ξ^{ab}` in a full symmetric sum
/// `½ Σ_{ρσ} ξ^{ρσ} c_{ρσ}`.
pub(crate) fn pair_weight(a: Idx, b: Idx) -> Rational {
    if a == b {
        rat(1, 2)
    } else {
        rat(1, 1)
    }
}

/// Right-coefficient components on the covariant basis `{dt, d̃xᵘ, ξᵘᵛ}`;
/// `Gen::Dx` stands for `d̃xᵘ`.
pub type Cov1 = BTreeMap<Gen, ScalarExpr>;

/// `Σ e_i ⊗ e_j c_{ij}` on the covariant basis with right coefficients.
pub type Cov2 = BTreeMap<(Gen, Gen), ScalarExpr>;

/// The covariant basis induced by `Γ` through `P = Γ`.
pub struct Frame<'a> {
    calc: &'a Calculus,
    gamma: &'a Gamma,
}

impl<'a> Frame<'a> {
    pub fn new(calc: &'a Calculus, gamma: &'a Gamma) -> Result<Frame<'a>> {
        if calc.is_ito() {
            return Err(Error::Invalid("the covariant frame lives in the general calculus".into()));
        }
        if calc.chart() != gamma.chart() {
            return Err(Error::Invalid("Γ and calculus use different charts".into()));
        }
        Ok(Frame { calc, gamma })
    }

    pub fn calc(&self) -> &Calculus {
        self.calc
    }

    pub fn gamma(&self) -> &Gamma {
        self.gamma
    }

    /// `d̃xᵘ = dxᵘ + ½ξ^{ρσ}Γᵘ_{ρσ}`.
    pub fn dtilde(&self, m: Idx) -> Form {
        let mut f = self.calc.dx(m);
        for (a, b) in self.calc.chart().sym_pairs() {
            let c = self.gamma.get(m, a, b).scale(&pair_weight(a, b));
            f.add_assign_scaled(&self.calc.xi(a, b), &c);
        }
        f
    }

    /// Basis element for a covariant generator label.
    pub fn basis_form(&self, g: Gen) -> Form {
        match g {
            Gen::Dx(m) => self.dtilde(m),
            _ => self.calc.gen(g),
        }
    }

    /// `∂̃_{μν} = ∂_μ∂_ν − Γ^ρ_{μν}∂_ρ`.
    pub fn del_tilde(&self, m: Idx, n: Idx) -> VectorField {
        let chart = self.calc.chart();
        let mut v = VectorField::second(chart, m, n);
        for r in chart.space() {
            v.set_x(r, -self.gamma.get(r, m, n));
        }
        v
    }

    pub fn to_cov(&self, a: &Form) -> Result<Cov1> {
        let raw = self.calc.to_right(a)?;
        let mut out = raw.clone();
        for (a_, b_) in self.calc.chart().sym_pairs() {
            let mut c = raw.get(&Gen::Xi(a_, b_)).cloned().unwrap_or_default();
            for m in self.calc.chart().space() {
                if let Some(rm) = raw.get(&Gen::Dx(m)) {
                    c -= &(&self.gamma.get(m, a_, b_).scale(&pair_weight(a_, b_)) * rm);
                }
            }
            out.insert(Gen::Xi(a_, b_), c);
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    pub fn from_cov(&self, c: &Cov1) -> Form {
        let mut raw = c.clone();
        for (a_, b_) in self.calc.chart().sym_pairs() {
            let mut v = raw.get(&Gen::Xi(a_, b_)).cloned().unwrap_or_default();
            for m in self.calc.chart().space() {
                if let Some(cm) = c.get(&Gen::Dx(m)) {
                    v += &(&self.gamma.get(m, a_, b_).scale(&pair_weight(a_, b_)) * cm);
                }
            }
            raw.insert(Gen::Xi(a_, b_), v);
        }
        raw.retain(|_, v| !v.is_zero());
        self.calc.from_right(&raw)
    }

    pub fn tensor_to_cov(&self, t: &Tensor) -> Result<Cov2> {
        // Σ c·g⊗h = Σ_h α_h⊗h with α_h = Σ_i e_i a_{ih}, so the tensor is
        // Σ_i e_i⊗β_i with the left 1-form β_i = Σ_h a_{ih}·h.
        let mut by_second: BTreeMap<Gen, Form> = BTreeMap::new();
        for (&(g, h), c) in t.terms() {
            by_second.entry(h).or_insert_with(|| Form::zero(1)).add_assign_scaled(&self.calc.gen(g), c);
        }
        let mut beta: BTreeMap<Gen, Form> = BTreeMap::new();
        for (h, alpha) in by_second {
            for (ei, a) in self.to_cov(&alpha)? {
                beta.entry(ei).or_insert_with(|| Form::zero(1)).add_assign_scaled(&self.calc.gen(h), &a);
            }
        }
        let mut out = Cov2::new();
        for (ei, b) in beta {
            for (ej, c) in self.to_cov(&b)? {
                add2(&mut out, ei, ej, c);
            }
        }
        Ok(out)
    }

    pub fn tensor_from_cov(&self, c: &Cov2) -> Tensor {
        let mut rows: BTreeMap<Gen, Cov1> = BTreeMap::new();
        for (&(ei, ej), v) in c {
            rows.entry(ei).or_default().insert(ej, v.clone());
        }
        let mut out = Tensor::zero();
        for (ei, row) in rows {
            let t = self.calc.tensor(&self.basis_form(ei), &self.from_cov(&row)).expect("degree-1 operands");
            out.add_scaled(&t, &ScalarExpr::one());
        }
        out
    }

    /// First projection: keeps the `dt` and `d̃x` components.
    pub fn p1(&self, a: &Form) -> Result<Form> {
        let mut c = self.to_cov(a)?;
        c.retain(|g, _| !matches!(g, Gen::Xi(..)));
        Ok(self.from_cov(&c))
    }

    /// Second projection: keeps the `ξ` components.
    pub fn p2(&self, a: &Form) -> Result<Form> {
        let mut c = self.to_cov(a)?;
        c.retain(|g, _| matches!(g, Gen::Xi(..)));
        Ok(self.from_cov(&c))
    }
}

pub(crate) fn add2(m: &mut Cov2, a: Gen, b: Gen, c: ScalarExpr) {
    if c.is_zero() {
        return;
    }
    let e = m.entry((a, b)).or_default();
    *e += c;
    if e.is_zero() {
        m.remove(&(a, b));
    }
}

pub(crate) fn is_first(g: Gen) -> bool {
    !matches!(g, Gen::Xi(..))
}
