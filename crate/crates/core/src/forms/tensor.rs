use std::collections::BTreeMap;
use std::fmt;

use super::calculus::expect_degree;
use super::{Calculus, Form, Gen, Word};
use crate::error::Result;
use crate::linalg::Row;
use crate::scalar::ScalarExpr;

/// Element of `Ω¹ ⊗_𝒜 Ω¹` as `Σ c·(g ⊗ h)` with coefficients on the left.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Tensor {
    terms: BTreeMap<(Gen, Gen), ScalarExpr>,
}

impl Tensor {
    pub fn zero() -> Tensor {
        Tensor::default()
    }

    pub fn terms(&self) -> &BTreeMap<(Gen, Gen), ScalarExpr> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, g: Gen, h: Gen, c: ScalarExpr) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((g, h)).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(g, h));
        }
    }

    pub fn add_scaled(&mut self, other: &Tensor, f: &ScalarExpr) {
        for (&(g, h), c) in &other.terms {
            self.add_term(g, h, f * c);
        }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        let mut t = self.clone();
        t.add_scaled(other, &ScalarExpr::one());
        t
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        let mut t = self.clone();
        t.add_scaled(other, &ScalarExpr::int(-1));
        t
    }

    pub fn left_mul(&self, f: &ScalarExpr) -> Tensor {
        let mut t = Tensor::zero();
        t.add_scaled(self, f);
        t
    }

    pub fn map_coeffs(&self, f: &dyn Fn(&ScalarExpr) -> ScalarExpr) -> Tensor {
        let mut t = Tensor::zero();
        for (&(g, h), c) in &self.terms {
            t.add_term(g, h, f(c));
        }
        t
    }
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|((g, h), c)| format!("({c:?}) {g}⊗{h}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Calculus {
    /// `c·g ⊗ β` with `β` a left 1-form: the coefficients of `β` are moved
    /// through `g` to the far left.
    fn gen_tensor_form(&self, c: &ScalarExpr, g: Gen, b: &Form, out: &mut Tensor) {
        for (wb, cb) in b.terms() {
            for (h, c2) in self.commute(g, cb) {
                out.add_term(h, wb[0], c * &c2);
            }
        }
    }

    pub fn tensor(&self, a: &Form, b: &Form) -> Result<Tensor> {
        expect_degree(a, 1)?;
        expect_degree(b, 1)?;
        let mut t = Tensor::zero();
        for (wa, ca) in a.terms() {
            self.gen_tensor_form(ca, wa[0], b, &mut t);
        }
        Ok(t)
    }

    /// `T·f`.
    pub fn tensor_right_mul(&self, t: &Tensor, f: &ScalarExpr) -> Tensor {
        let mut out = Tensor::zero();
        for (&(g, h), c) in t.terms() {
            let hf = self.one_form(&self.commute(h, f));
            self.gen_tensor_form(c, g, &hf, &mut out);
        }
        out
    }

    /// Multiplication map `π: Ω¹⊗Ω¹ → Ω²`.
    pub fn pi(&self, t: &Tensor) -> Result<Form> {
        let mut raw: Row<Word> = Row::new();
        for (&(g, h), c) in t.terms() {
            super::calculus::add_to(&mut raw, smallvec::smallvec![g, h], c.clone());
        }
        self.normal_form(2, raw)
    }

    /// `(α⊗β)•γ = α⊗(β•γ)`: bullet into the second factor.
    pub fn bullet_dir(&self, t: &Tensor, c: &Form) -> Result<Tensor> {
        expect_degree(c, 1)?;
        let mut out = Tensor::zero();
        for (&(g, h), coef) in t.terms() {
            let hb = self.bullet(&self.gen(h), c)?;
            self.gen_tensor_form(coef, g, &hb, &mut out);
        }
        Ok(out)
    }

    /// `γ•(α⊗β) = (γ•α)⊗β`: bullet into the first factor.
    pub fn bullet_val(&self, c: &Form, t: &Tensor) -> Result<Tensor> {
        expect_degree(c, 1)?;
        let mut out = Tensor::zero();
        for (&(g, h), coef) in t.terms() {
            let gb = self.bullet(c, &self.gen(g))?;
            for (w, e) in gb.terms() {
                out.add_term(w[0], h, e * coef);
            }
        }
        Ok(out)
    }

    /// `(α⊗β)•(γ⊗δ) = (α•γ)⊗(β•δ)`.
    pub fn bullet_tt(&self, s: &Tensor, t: &Tensor) -> Result<Tensor> {
        let mut out = Tensor::zero();
        for (&(g1, h1), c1) in s.terms() {
            for (&(g2, h2), c2) in t.terms() {
                let left = self.gen_bullet(g1, g2);
                let right = self.gen_bullet(h1, h2);
                if left.is_empty() || right.is_empty() {
                    continue;
                }
                let c = c1 * c2;
                let rf = self.one_form(&right);
                for (m, em) in left {
                    self.gen_tensor_form(&(&c * &em), m, &rf, &mut out);
                }
            }
        }
        Ok(out)
    }

    /// Contract the two factors with the bullet product, `α⊗β ↦ α•β`.
    pub fn bullet_contract(&self, t: &Tensor) -> Form {
        let mut acc = Form::zero(1);
        for (&(g, h), c) in t.terms() {
            acc.add_assign_scaled(&self.one_form(&self.gen_bullet(g, h)), c);
        }
        acc
    }
}
