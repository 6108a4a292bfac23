//! Symplectic mechanics on the Itô-specialized calculus: the 2-form ω built
//! from the covariant wedge basis, its closedness conditions, the
//! Hamiltonian vector field and the resulting evolution equation, with the
//! Fokker–Planck and Gibbs-volume comparisons.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::forms::{Calculus, Form, Gen, Word};
use crate::scalar::{rat, Chart, Idx, Rational, ScalarExpr, SymAtom, SymbolTable, T};
use crate::vector::{pair, VectorField};

/// Image of a general-calculus form under `ξᵘᵛ ↦ −dt·bᵘᵛ`, renormalized in
/// the Itô calculus.
pub fn specialize(general: &Calculus, ito: &Calculus, a: &Form) -> Result<Form> {
    if general.is_ito() || !ito.is_ito() || general.chart() != ito.chart() {
        return Err(Error::Invalid("specialization maps the general calculus onto an Itô calculus".into()));
    }
    let mut acc = Form::zero(a.degree());
    for (w, c) in a.terms() {
        let mut img = ito.scalar(c.clone());
        for &g in w.iter() {
            img = ito.mul(&img, &gen_image(ito, g))?;
        }
        acc = acc.add(&img);
    }
    Ok(acc)
}

fn gen_image(ito: &Calculus, g: Gen) -> Form {
    match g {
        Gen::Xi(a, b) => ito.dt().left_mul(&-ito.b(a, b)),
        _ => ito.gen(g),
    }
}

/// `∇_κbᵘᵛ = ∂_κbᵘᵛ + Γᵘ_{κα}b^{αν} + Γᵛ_{κα}bᵘᵅ`.
pub fn nabla_b(ito: &Calculus, g: &crate::connection::Gamma, k: Idx, m: Idx, n: Idx) -> ScalarExpr {
    let mut v = ito.b(m, n).partial(k);
    for a in ito.chart().space() {
        v.add_product(g.get(m, k, a), &ito.b(a, n));
        v.add_product(g.get(n, k, a), &ito.b(m, a));
    }
    v
}

/// The antisymmetric `ω_{μν}`, its inverse `ω^{μν}` (with
/// `ω^{μρ}ω_{νρ} = δᵘ_ν`) and the Hamiltonian.
#[derive(Clone, Debug)]
pub struct SymplecticData {
    chart: Chart,
    lower: Vec<Vec<ScalarExpr>>,
    upper: Vec<Vec<ScalarExpr>>,
    h: ScalarExpr,
    symbols: Option<(SymbolTable, String, String)>,
}

impl SymplecticData {
    /// Opaque components from two declared inverse partners.
    pub fn symbolic(table: &SymbolTable, upper: &str, lower: &str, h: ScalarExpr) -> Result<SymplecticData> {
        let chart = table.chart().clone();
        let n = chart.dim();
        if !n.is_multiple_of(2) {
            return Err(Error::Invalid(format!("symplectic data needs an even dimension, got {n}")));
        }
        table.contract_pair(&ScalarExpr::zero(), upper, lower)?;
        let comp = |name: &str| -> Result<Vec<Vec<ScalarExpr>>> {
            chart.space().map(|a| chart.space().map(|b| table.sym(name, &[a, b])).collect()).collect()
        };
        let data = SymplecticData {
            lower: comp(lower)?,
            upper: comp(upper)?,
            chart: chart.clone(),
            h,
            symbols: Some((table.clone(), upper.into(), lower.into())),
        };
        data.check_antisymmetric()?;
        Ok(data)
    }

    /// Explicit `ω_{μν}`; the inverse is computed exactly and must exist.
    pub fn explicit(chart: &Chart, lower: Vec<Vec<ScalarExpr>>, h: ScalarExpr) -> Result<SymplecticData> {
        let n = chart.dim();
        if !n.is_multiple_of(2) || lower.len() != n || lower.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("ω must be an N×N matrix with N even".into()));
        }
        let q: Option<Vec<Vec<Rational>>> =
            lower.iter().map(|r| r.iter().map(ScalarExpr::as_rational).collect()).collect();
        let q = q.ok_or_else(|| Error::Invalid("explicit ω must have constant entries".into()))?;
        // ω^{μρ}ω_{νρ} = δ means the upper matrix is (ωᵀ)⁻¹ = −ω⁻¹.
        let inv = invert(&q).ok_or_else(|| Error::Invalid("ω is degenerate".into()))?;
        let upper = inv.iter().map(|r| r.iter().map(|v| ScalarExpr::constant(-v.clone())).collect()).collect();
        let data = SymplecticData { chart: chart.clone(), lower, upper, h, symbols: None };
        data.check_antisymmetric()?;
        Ok(data)
    }

    fn check_antisymmetric(&self) -> Result<()> {
        for a in self.chart.space() {
            for b in self.chart.space() {
                if self.w(a, b) != &-self.w(b, a) {
                    return Err(Error::Invalid("ω is not antisymmetric".into()));
                }
            }
        }
        Ok(())
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// `ω_{μν}`.
    pub fn w(&self, a: Idx, b: Idx) -> &ScalarExpr {
        &self.lower[a as usize - 1][b as usize - 1]
    }

    /// `ω^{μν}`.
    pub fn w_inv(&self, a: Idx, b: Idx) -> &ScalarExpr {
        &self.upper[a as usize - 1][b as usize - 1]
    }

    pub fn h(&self) -> &ScalarExpr {
        &self.h
    }

    /// Apply `ω^{μρ}ω_{νρ} = δᵘ_ν` wherever it occurs.
    pub fn contract(&self, e: &ScalarExpr) -> Result<ScalarExpr> {
        match &self.symbols {
            Some((t, u, l)) => t.contract_pair(e, u, l),
            None => Ok(e.clone()),
        }
    }

    /// `{f, g} = ∂_μf ω^{μν} ∂_νg`.
    pub fn poisson(&self, f: &ScalarExpr, g: &ScalarExpr) -> ScalarExpr {
        let mut acc = ScalarExpr::zero();
        for m in self.chart.space() {
            for n in self.chart.space() {
                acc += &(&(&f.partial(m) * self.w_inv(m, n)) * &g.partial(n));
            }
        }
        acc
    }

    /// `∇_νω_{ρμ} = ∂_νω_{ρμ} − Γᵃ_{νρ}ω_{aμ} − Γᵃ_{νμ}ω_{ρa}`.
    pub fn nabla_w(&self, g: &crate::connection::Gamma, n: Idx, r: Idx, m: Idx) -> ScalarExpr {
        let mut v = self.w(r, m).partial(n);
        for a in self.chart.space() {
            v -= &(g.get(a, n, r) * self.w(a, m));
            v -= &(g.get(a, n, m) * self.w(r, a));
        }
        v
    }

    /// `ω_μ = −½b^{νρ}∇_νω_{ρμ} + ∂_μH`.
    pub fn omega_mu(&self, ito: &Calculus, g: &crate::connection::Gamma, m: Idx) -> ScalarExpr {
        let mut v = self.h.partial(m);
        for n in self.chart.space() {
            for r in self.chart.space() {
                v.add_scaled(&(&ito.b(n, r) * &self.nabla_w(g, n, r, m)), &rat(-1, 2));
            }
        }
        v
    }

    /// `F_μ = −½∇_ν(b^{νρ}ω_{ρμ})`, the divergence of a mixed tensor.
    pub fn f_mu(&self, ito: &Calculus, g: &crate::connection::Gamma, m: Idx) -> ScalarExpr {
        let v = |n: Idx, a: Idx| -> ScalarExpr { self.chart.space().map(|r| &ito.b(n, r) * self.w(r, a)).sum() };
        let mut div = ScalarExpr::zero();
        for n in self.chart.space() {
            div += v(n, m).partial(n);
            for a in self.chart.space() {
                div += &(g.get(n, n, a) * &v(a, m));
                div -= &(g.get(a, n, m) * &v(n, a));
            }
        }
        div.scale(&rat(-1, 2))
    }
}

fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = Rational::one() / a[c][c].clone();
        for v in a[c].iter_mut() {
            *v *= inv.clone();
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot = a[c].clone();
                for (v, p) in a[r].iter_mut().zip(pivot) {
                    *v -= f.clone() * p;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Right coefficients of a 2-form on the covariant wedge basis
/// `{d̃xᵘ∧d̃xᵛ (μ<ν), dt∧d̃x^κ}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WedgeCoeffs {
    pub pairs: BTreeMap<(Idx, Idx), ScalarExpr>,
    pub time: BTreeMap<Idx, ScalarExpr>,
}

/// The mechanics setting: a derived connection on the general calculus and its
/// Itô specialization.
pub struct Mechanics<'a> {
    conn: &'a Connection<'a>,
    ito: &'a Calculus,
    wedges: BTreeMap<(Idx, Idx), Form>,
}

impl<'a> Mechanics<'a> {
    pub fn new(conn: &'a Connection<'a>, ito: &'a Calculus) -> Result<Mechanics<'a>> {
        let general = conn.calc();
        let frame = conn.frame();
        let mut wedges = BTreeMap::new();
        for m in ito.chart().space() {
            for n in ito.chart().space().filter(|&n| n > m) {
                let w = conn.wedge(&frame.dtilde(m), &frame.dtilde(n))?;
                wedges.insert((m, n), specialize(general, ito, &w)?);
            }
        }
        Ok(Mechanics { conn, ito, wedges })
    }

    pub fn ito(&self) -> &Calculus {
        self.ito
    }

    pub fn conn(&self) -> &Connection<'a> {
        self.conn
    }

    pub fn gamma(&self) -> &crate::connection::Gamma {
        self.conn.gamma()
    }

    pub fn specialize(&self, a: &Form) -> Result<Form> {
        specialize(self.conn.calc(), self.ito, a)
    }

    /// Specialized `d̃xᵘ∧d̃xᵛ` for `μ < ν`.
    pub fn wedge_dxdx(&self, m: Idx, n: Idx) -> Result<Form> {
        match m.cmp(&n) {
            std::cmp::Ordering::Less => Ok(self.wedges[&(m, n)].clone()),
            std::cmp::Ordering::Greater => Ok(self.wedges[&(n, m)].neg()),
            std::cmp::Ordering::Equal => Ok(Form::zero(2)),
        }
    }

    /// Specialized `d̃xᵘ`, a 1-form of the Itô calculus.
    pub fn dtilde(&self, m: Idx) -> Result<Form> {
        self.specialize(&self.conn.frame().dtilde(m))
    }

    /// `ω = ½ d̃xᵘ∧d̃xᵛ ω_{μν} + dt dxᵘ ω_μ` with right coefficients.
    pub fn omega(&self, data: &SymplecticData, omega_mu: &[ScalarExpr]) -> Result<Form> {
        let mut acc = Form::zero(2);
        for (&(m, n), w) in &self.wedges {
            acc = acc.add(&self.ito.right_mul(w, data.w(m, n))?);
        }
        for m in self.ito.chart().space() {
            let dtdx = self.ito.mul(&self.ito.dt(), &self.ito.dx(m))?;
            acc = acc.add(&self.ito.right_mul(&dtdx, &omega_mu[m as usize - 1])?);
        }
        Ok(acc)
    }

    /// Coefficients of `dω` on the degree-3 basis words.
    pub fn closedness_residuals(&self, omega: &Form) -> Result<BTreeMap<Word, ScalarExpr>> {
        Ok(self.ito.d(omega)?.terms().clone())
    }

    fn wedge_basis(&self) -> Result<Vec<(WedgeLabel, Form)>> {
        let mut out: Vec<(WedgeLabel, Form)> =
            self.wedges.iter().map(|(&(m, n), w)| (WedgeLabel::Pair(m, n), w.clone())).collect();
        for k in self.ito.chart().space() {
            out.push((WedgeLabel::Time(k), self.ito.mul(&self.ito.dt(), &self.ito.dx(k))?));
        }
        Ok(out)
    }

    /// Right coefficients of `ω` on the covariant wedge basis, peeled off
    /// leading word by leading word.
    pub fn decompose(&self, omega: &Form) -> Result<WedgeCoeffs> {
        let basis = self.wedge_basis()?;
        let mut leads: BTreeMap<Word, usize> = BTreeMap::new();
        for (i, (_, w)) in basis.iter().enumerate() {
            let (lw, lc) =
                w.terms().iter().next_back().ok_or_else(|| Error::Invalid("zero wedge basis element".into()))?;
            if lc != &ScalarExpr::one() || leads.insert(lw.clone(), i).is_some() {
                return Err(Error::NonUnitPivot("wedge basis is not unit triangular".into()));
            }
        }
        let mut rest = omega.clone();
        let mut out = WedgeCoeffs::default();
        while let Some((w, c)) = rest.terms().iter().next_back().map(|(w, c)| (w.clone(), c.clone())) {
            let i = *leads.get(&w).ok_or_else(|| Error::Invalid(format!("word {w:?} outside the wedge basis")))?;
            let (label, b) = &basis[i];
            rest = rest.sub(&self.ito.right_mul(b, &c)?);
            match *label {
                WedgeLabel::Pair(m, n) => *out.pairs.entry((m, n)).or_default() += c,
                WedgeLabel::Time(k) => *out.time.entry(k).or_default() += c,
            }
        }
        out.pairs.retain(|_, v| !v.is_zero());
        out.time.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    /// `⟨X, d̃xᵘ⟩` through the general-calculus pairing, with the Itô
    /// completion `Xᵘᵛ = −bᵘᵛXᵗ`.
    pub fn covariant_component(&self, x: &VectorField, m: Idx) -> Result<ScalarExpr> {
        let x = x.with_ito_completion(self.ito);
        pair(self.conn.calc(), &x, &self.conn.frame().dtilde(m))
    }

    /// `ι_X(Σ eᵢ∧eⱼ cᵢⱼ) = Σ (eⱼ Yⁱ − eᵢ Yʲ) cᵢⱼ` with `Yⁱ = ⟨X, eᵢ⟩` and all
    /// scalars right of the basis 1-forms. Returned as right coefficients
    /// on `{dt, d̃xᵘ}`, keyed by `Gen::Dt` and `Gen::Dx`.
    pub fn insert_covariant_components(&self, x: &VectorField, omega: &Form) -> Result<BTreeMap<Gen, ScalarExpr>> {
        let c = self.decompose(omega)?;
        let y: Vec<ScalarExpr> =
            self.ito.chart().space().map(|m| self.covariant_component(x, m)).collect::<Result<_>>()?;
        let mut out: BTreeMap<Gen, ScalarExpr> = BTreeMap::new();
        for (&(m, n), cmn) in &c.pairs {
            *out.entry(Gen::Dx(n)).or_default() += &y[m as usize - 1] * cmn;
            *out.entry(Gen::Dx(m)).or_default() -= &y[n as usize - 1] * cmn;
        }
        for (&k, ck) in &c.time {
            *out.entry(Gen::Dx(k)).or_default() += x.xt() * ck;
            *out.entry(Gen::Dt).or_default() -= &y[k as usize - 1] * ck;
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    /// [`Mechanics::insert_covariant_components`] assembled into a 1-form.
    pub fn insert_covariant(&self, x: &VectorField, omega: &Form) -> Result<Form> {
        let mut acc = Form::zero(1);
        for (g, c) in self.insert_covariant_components(x, omega)? {
            let e = match g {
                Gen::Dx(m) => self.dtilde(m)?,
                _ => self.ito.gen(g),
            };
            acc = acc.add(&self.ito.right_mul(&e, &c)?);
        }
        Ok(acc)
    }

    /// Solve `ι_X ω = 0` with `Xᵗ = 1`. The `d̃x^ν` components give
    /// `Y^μ ω_{μν} = −c_{tν}`, solved with `ω^{μν}`; the solution is then
    /// verified by inserting it.
    pub fn hamiltonian_vf(&self, data: &SymplecticData, omega: &Form) -> Result<VectorField> {
        let chart = self.ito.chart();
        let c = self.decompose(omega)?;
        for m in chart.space() {
            for n in chart.space().filter(|&n| n > m) {
                let got = c.pairs.get(&(m, n)).cloned().unwrap_or_default();
                if &got != data.w(m, n) {
                    return Err(Error::Invalid(format!("ω's d̃x{m}∧d̃x{n} coefficient differs from ω_{{{m}{n}}}")));
                }
            }
        }
        let mut x = VectorField::dt(chart);
        for l in chart.space() {
            let mut y = ScalarExpr::zero();
            for n in chart.space() {
                if let Some(ct) = c.time.get(&n) {
                    y -= &(data.w_inv(l, n) * ct);
                }
            }
            let mut shift = ScalarExpr::zero();
            for r in chart.space() {
                for s in chart.space() {
                    shift.add_product(&self.ito.b(r, s), self.gamma().get(l, r, s));
                }
            }
            x.set_x(l, data.contract(&(&y + &shift.scale(&rat(1, 2))))?);
        }
        let x = x.with_ito_completion(self.ito);
        for (g, v) in self.insert_covariant_components(&x, omega)? {
            if !data.contract(&v)?.is_zero() {
                return Err(Error::Inconsistent(format!("ι_X ω has a nonzero {g} component")));
            }
        }
        Ok(x)
    }

    /// Right-hand side of `∂_tA = …` from `X_H(A) = 0` with `Xᵗ = 1`.
    pub fn evolution_rhs(&self, data: &SymplecticData, x: &VectorField, a: &ScalarExpr) -> Result<ScalarExpr> {
        data.contract(&(a.partial(T) - x.apply(a)))
    }

    /// `−{H,A} − F_μω^{μν}∂_νA + ½∂_μ(bᵘᵛ∂_νA) + ½bᵘᵛΓ^ρ_{ρν}∂_μA`, with
    /// `F_μ` supplied by the caller.
    pub fn hand_rhs(&self, data: &SymplecticData, f: &[ScalarExpr], h: &ScalarExpr, a: &ScalarExpr) -> ScalarExpr {
        let chart = self.ito.chart();
        let mut rhs = -data.poisson(h, a);
        for m in chart.space() {
            for n in chart.space() {
                rhs -= &(&(&f[m as usize - 1] * data.w_inv(m, n)) * &a.partial(n));
                let b = self.ito.b(m, n);
                rhs.add_scaled(&(&b * &a.partial(n)).partial(m), &rat(1, 2));
                rhs.add_scaled(&(&(&b * &self.gamma().trace(n)) * &a.partial(m)), &rat(1, 2));
            }
        }
        rhs
    }
}

#[derive(Clone, Copy, Debug)]
enum WedgeLabel {
    Pair(Idx, Idx),
    Time(Idx),
}

/// Which of the matching substitutions to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FpSubstitutions {
    pub f_gradient: bool,
    pub h0: bool,
    pub gamma_trace: bool,
    pub a_half_b: bool,
}

impl FpSubstitutions {
    pub const ALL: FpSubstitutions = FpSubstitutions { f_gradient: true, h0: true, gamma_trace: true, a_half_b: true };

    /// Every variant with exactly one substitution withheld.
    pub fn mutations() -> [(&'static str, FpSubstitutions); 4] {
        let a = Self::ALL;
        [
            ("F_mu = d_mu F", FpSubstitutions { f_gradient: false, ..a }),
            ("H0 = H + F", FpSubstitutions { h0: false, ..a }),
            ("Gamma trace = -beta dH0", FpSubstitutions { gamma_trace: false, ..a }),
            ("a = b/2", FpSubstitutions { a_half_b: false, ..a }),
        ]
    }
}

/// Symbols of the Fokker–Planck target: `H₀, F, F_μ, β, aⁱʲ` alongside
/// `H`, `b` and `Γ` of the derivation.
#[derive(Clone, Debug)]
pub struct FpSymbols {
    pub h: String,
    pub h0: String,
    pub f: String,
    pub f_mu: String,
    pub beta: String,
    pub a: String,
    pub b: String,
    pub gamma: String,
}

/// Substitute the matching conditions into the evolution equation written
/// with opaque `F_μ` and subtract the target
/// `−{H₀,A} + ∂_i(aⁱʲ∂_jA) − βaⁱʲ∂_jH₀∂_iA`.
pub fn fokker_planck_residual(
    mech: &Mechanics<'_>,
    data: &SymplecticData,
    table: &SymbolTable,
    names: &FpSymbols,
    a: &ScalarExpr,
    subs: FpSubstitutions,
) -> Result<ScalarExpr> {
    let chart = table.chart();
    let f_opaque: Vec<ScalarExpr> = chart.space().map(|m| table.sym(&names.f_mu, &[m])).collect::<Result<_>>()?;
    let h = table.sym(&names.h, &[])?;
    let h0 = table.sym(&names.h0, &[])?;
    let f = table.sym(&names.f, &[])?;
    let beta = table.sym(&names.beta, &[])?;
    let mut rhs = mech.hand_rhs(data, &f_opaque, &h, a);

    let trace_rest = |m: Idx| -> Result<ScalarExpr> {
        let mut v = -(&beta * &h0.partial(m));
        for r in chart.space().filter(|&r| r != 1) {
            v -= table.sym(&names.gamma, &[r, r, m])?;
        }
        Ok(v)
    };
    let mut repl: BTreeMap<SymAtom, ScalarExpr> = BTreeMap::new();
    let mut add = |e: ScalarExpr, v: ScalarExpr| {
        if let [s] = e.symbols().as_slice() {
            repl.insert(s.clone(), v);
        }
    };
    if subs.f_gradient {
        for m in chart.space() {
            add(table.sym(&names.f_mu, &[m])?, f.partial(m));
        }
    }
    if subs.h0 {
        add(h.clone(), &h0 - &f);
    }
    if subs.gamma_trace {
        for m in chart.space() {
            add(table.sym(&names.gamma, &[1, 1, m])?, trace_rest(m)?);
        }
    }
    if subs.a_half_b {
        for (p, q) in chart.sym_pairs() {
            add(table.sym(&names.b, &[p, q])?, table.sym(&names.a, &[p, q])?.scale(&rat(2, 1)));
        }
    }
    rhs = rhs.substitute(&|s| repl.get(s).cloned());

    let mut target = -data.poisson(&h0, a);
    for i in chart.space() {
        for j in chart.space() {
            let aij = table.sym(&names.a, &[i, j])?;
            target += (&aij * &a.partial(j)).partial(i);
            target -= &(&(&(&beta * &aij) * &h0.partial(j)) * &a.partial(i));
        }
    }
    data.contract(&(&rhs - &target))
}

/// `Γ^ρ_{ρμ} + β∂_μH₀` for each `μ`; all zero when `e^{−βH₀}` is a
/// covariantly constant density.
pub fn gibbs_residuals(gamma: &crate::connection::Gamma, beta: &ScalarExpr, h0: &ScalarExpr) -> Vec<ScalarExpr> {
    gamma.chart().space().map(|m| &gamma.trace(m) + &(beta * &h0.partial(m))).collect()
}
