//! Connections on 1-forms under the minimal choice: the covariant frame,
//! ∇ tables solved from the vanishing of the tensor blocks K, L, A, B, S,
//! torsion, the circle and wedge products, and the Riemann tensor.

mod frame;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::forms::{Calculus, Form, Gen, Tensor};
use crate::linalg::{solve_partial, Col, Row};
use crate::scalar::{rat, Idx, ScalarExpr, SymAtom};

use frame::{add2, is_first};
pub use frame::{Cov1, Cov2, Frame, Gamma};

/// Sign of the Riemann tensor relative to
/// `∂_βΓᵘ_{ρα} − ∂_ρΓᵘ_{βα} + Γᵘ_{βλ}Γ^λ_{ρα} − Γᵘ_{ρλ}Γ^λ_{βα}`.
pub const RIEMANN_SIGN: i64 = 1;

/// A connection on Ω¹ of the general calculus: `∇` of every covariant basis
/// element, with the right Leibniz rule `∇(αf) = (∇α)f + α⊗df`.
#[derive(Clone, Debug)]
pub struct Connection<'a> {
    calc: &'a Calculus,
    gamma: Gamma,
    table: BTreeMap<Gen, Cov2>,
}

impl<'a> Connection<'a> {
    /// Tables from explicit components; generators without an entry have
    /// `∇e = 0`.
    pub fn from_tables(calc: &'a Calculus, gamma: Gamma, table: BTreeMap<Gen, Cov2>) -> Result<Connection<'a>> {
        Frame::new(calc, &gamma)?;
        Ok(Connection { calc, gamma, table })
    }

    /// Solve the minimal choice `K = L = A = B = 0` for every non-pure block
    /// of `∇d̃xᵘ` and `∇ξᵘᵛ`, then confirm `S = 0`.
    pub fn derive(calc: &'a Calculus, gamma: &Gamma) -> Result<Connection<'a>> {
        let frame = Frame::new(calc, gamma)?;
        let chart = calc.chart();
        let spatial: Vec<Gen> = chart.space().map(Gen::Dx).collect();
        let xis: Vec<Gen> = chart.sym_pairs().into_iter().map(|(a, b)| Gen::Xi(a, b)).collect();
        let mut unknowns = Vec::new();
        let fresh = |unknowns: &mut Vec<SymAtom>| {
            let a = SymAtom::new(&format!("_u{}", unknowns.len()), &[], false);
            unknowns.push(a.clone());
            ScalarExpr::atom(a)
        };
        let mut table = BTreeMap::new();
        for &e in &spatial {
            let Gen::Dx(m) = e else { unreachable!() };
            let mut c = Cov2::new();
            for &i in spatial.iter().chain(&xis) {
                for &j in spatial.iter().chain(&xis) {
                    let v = match (i, j) {
                        (Gen::Dx(n), Gen::Dx(r)) => -frame.gamma().get(m, r, n),
                        _ => fresh(&mut unknowns),
                    };
                    add2(&mut c, i, j, v);
                }
            }
            table.insert(e, c);
        }
        for &e in &xis {
            let mut c = Cov2::new();
            for &i in spatial.iter().chain(&xis) {
                for &j in spatial.iter().chain(&xis) {
                    add2(&mut c, i, j, fresh(&mut unknowns));
                }
            }
            table.insert(e, c);
        }

        // K and L pin two blocks to zero, B then fixes ∇ξ and A the last
        // d̃x⊗ξ block. Each stage is evaluated once on the tables with every
        // earlier solution substituted.
        let mut solved: BTreeMap<SymAtom, ScalarExpr> = BTreeMap::new();
        let mut recorded: Vec<(String, ScalarExpr)> = Vec::new();
        for stage in [Stage::KL, Stage::B, Stage::A] {
            let conn = Connection { calc, gamma: gamma.clone(), table: subst_table(&table, &solved) };
            recorded.extend(conn.stage_components(stage)?);
            loop {
                let open: Vec<SymAtom> = unknowns.iter().filter(|u| !solved.contains_key(*u)).cloned().collect();
                let got = solve_rows(&recorded, &open)?;
                if got.is_empty() {
                    break;
                }
                for v in solved.values_mut() {
                    *v = v.substitute(&|a| got.get(a).cloned());
                }
                for (_, v) in recorded.iter_mut() {
                    *v = v.substitute(&|a| got.get(a).cloned());
                }
                solved.extend(got);
            }
        }
        let open: Vec<String> =
            unknowns.iter().filter(|u| !solved.contains_key(*u)).map(|u| u.name().to_string()).collect();
        if !open.is_empty() {
            return Err(Error::Ambiguous(open.join(", ")));
        }
        for (label, v) in &recorded {
            if !v.is_zero() {
                return Err(Error::Inconsistent(format!("{label}: {v:?}")));
            }
        }
        let conn = Connection { calc, gamma: gamma.clone(), table: subst_table(&table, &solved) };
        for (label, v) in conn.stage_components(Stage::S)? {
            if !v.is_zero() {
                return Err(Error::Inconsistent(format!("{label}: {v:?}")));
            }
        }
        Ok(conn)
    }

    pub fn calc(&self) -> &Calculus {
        self.calc
    }

    pub fn gamma(&self) -> &Gamma {
        &self.gamma
    }

    pub fn frame(&self) -> Frame<'_> {
        Frame::new(self.calc, &self.gamma).expect("checked at construction")
    }

    pub fn table(&self) -> &BTreeMap<Gen, Cov2> {
        &self.table
    }

    /// `∇e` for a covariant basis label.
    pub fn nabla_basis(&self, e: Gen) -> Tensor {
        self.table.get(&e).map(|c| self.frame().tensor_from_cov(c)).unwrap_or_default()
    }

    pub fn nabla_cov(&self, a: &Form) -> Result<Cov2> {
        let frame = self.frame();
        let mut out = Cov2::new();
        for (ei, ai) in frame.to_cov(a)? {
            if let Some(t) = self.table.get(&ei) {
                for (&(p, q), c) in t {
                    add2(&mut out, p, q, c * &ai);
                }
            }
            for (ek, dk) in frame.to_cov(&self.calc.d_scalar(&ai))? {
                add2(&mut out, ei, ek, dk);
            }
        }
        Ok(out)
    }

    pub fn nabla(&self, a: &Form) -> Result<Tensor> {
        Ok(self.frame().tensor_from_cov(&self.nabla_cov(a)?))
    }

    /// `∇•(α⊗β) = ∇α•β + α⊗d•β`.
    pub fn nabla_bullet(&self, t: &Tensor) -> Result<Tensor> {
        let frame = self.frame();
        let mut rows: BTreeMap<Gen, Cov1> = BTreeMap::new();
        for ((ei, ej), c) in frame.tensor_to_cov(t)? {
            rows.entry(ei).or_default().insert(ej, c);
        }
        let mut out = Tensor::zero();
        for (ei, row) in rows {
            let beta = frame.from_cov(&row);
            out = out.add(&self.calc.bullet_dir(&self.nabla_basis(ei), &beta)?);
            out = out.add(&self.calc.tensor(&frame.basis_form(ei), &d_bullet(self.calc, &beta)?)?);
        }
        Ok(out)
    }

    /// `∇•α`: the bullet product of the two factors of `∇α`.
    pub fn nabla_bullet_form(&self, a: &Form) -> Result<Form> {
        Ok(self.calc.bullet_contract(&self.nabla(a)?))
    }

    /// `Θ(α) = dα + π∇α`.
    pub fn torsion(&self, a: &Form) -> Result<Form> {
        Ok(self.calc.d(a)?.add(&self.calc.pi(&self.nabla(a)?)?))
    }

    /// `α∘β = αβ − π(∇α•β)`.
    pub fn circ(&self, a: &Form, b: &Form) -> Result<Form> {
        let corr = self.calc.pi(&self.calc.bullet_dir(&self.nabla(a)?, b)?)?;
        Ok(self.calc.mul(a, b)?.sub(&corr))
    }

    /// `B(α,β) = ∇(α•β) − α•∇β − β•∇α + ∇α•∇β`, with the single-form
    /// bullets acting on the first tensor factor.
    pub fn b_block(&self, a: &Form, b: &Form) -> Result<Tensor> {
        let c = &self.calc;
        let (na, nb) = (self.nabla(a)?, self.nabla(b)?);
        Ok(self
            .nabla(&c.bullet(a, b)?)?
            .sub(&c.bullet_val(a, &nb)?)
            .sub(&c.bullet_val(b, &na)?)
            .add(&c.bullet_tt(&na, &nb)?))
    }

    /// Right-linear antisymmetric wedge product,
    /// `α∧β = α∘β + ½[Θα•β + α•Θβ − Θα•Θβ + πB(α,β) − Θ(α•β)]`.
    pub fn wedge(&self, a: &Form, b: &Form) -> Result<Form> {
        let c = &self.calc;
        let (ta, tb) = (self.torsion(a)?, self.torsion(b)?);
        let corr = c
            .bullet(&ta, b)?
            .add(&c.bullet(a, &tb)?)
            .sub(&c.bullet(&ta, &tb)?)
            .add(&c.pi(&self.b_block(a, b)?)?)
            .sub(&self.torsion(&c.bullet(a, b)?)?);
        Ok(self.circ(a, b)?.add(&corr.scale(&rat(1, 2))))
    }

    /// `K(α) = −(p₂⊗id)∇p₁(α)`.
    pub fn k_block(&self, a: &Form) -> Result<Cov2> {
        let n = self.nabla_cov(&self.frame().p1(a)?)?;
        Ok(project(n, false, -1))
    }

    /// `L(α) = −(p₁⊗id)∇p₂(α)`.
    pub fn l_block(&self, a: &Form) -> Result<Cov2> {
        let n = self.nabla_cov(&self.frame().p2(a)?)?;
        Ok(project(n, true, -1))
    }

    /// `A(α) = −½(p₁⊗id)∇•∇p₁(α)`.
    pub fn a_block(&self, a: &Form) -> Result<Cov2> {
        let nb = self.nabla_bullet(&self.nabla(&self.frame().p1(a)?)?)?;
        let c = project(self.frame().tensor_to_cov(&nb)?, true, 1);
        Ok(c.into_iter().map(|(k, v)| (k, v.scale(&rat(-1, 2)))).collect())
    }

    /// `S(α) = (d• + ∇•)p₁(α)`.
    pub fn s_block(&self, a: &Form) -> Result<Cov1> {
        let p = self.frame().p1(a)?;
        self.frame().to_cov(&d_bullet(self.calc, &p)?.add(&self.nabla_bullet_form(&p)?))
    }

    /// Covariant components of every constraint block evaluated on basis
    /// elements, labelled for diagnostics.
    pub fn constraint_components(&self) -> Result<Vec<(String, ScalarExpr)>> {
        let mut out = Vec::new();
        for stage in [Stage::KL, Stage::B, Stage::A, Stage::S] {
            out.extend(self.stage_components(stage)?);
        }
        Ok(out)
    }

    fn stage_components(&self, stage: Stage) -> Result<Vec<(String, ScalarExpr)>> {
        let frame = self.frame();
        let chart = self.calc.chart();
        let mut basis: Vec<Gen> = chart.space().map(Gen::Dx).collect();
        basis.extend(chart.sym_pairs().into_iter().map(|(a, b)| Gen::Xi(a, b)));
        let mut out = Vec::new();
        let push2 = |out: &mut Vec<(String, ScalarExpr)>, name: String, c: Cov2| {
            for ((i, j), v) in c {
                out.push((format!("{name}[{i}⊗{j}]"), v));
            }
        };
        match stage {
            Stage::KL => {
                for &e in &basis {
                    let f = frame.basis_form(e);
                    push2(&mut out, format!("K({e})"), self.k_block(&f)?);
                    push2(&mut out, format!("L({e})"), self.l_block(&f)?);
                }
            }
            Stage::B => {
                for &e in &basis {
                    for &g in &basis {
                        let t = self.b_block(&frame.basis_form(e), &frame.basis_form(g))?;
                        push2(&mut out, format!("B({e},{g})"), frame.tensor_to_cov(&t)?);
                    }
                }
            }
            Stage::A => {
                for &e in &basis {
                    push2(&mut out, format!("A({e})"), self.a_block(&frame.basis_form(e))?);
                }
            }
            Stage::S => {
                for &e in &basis {
                    for (k, v) in self.s_block(&frame.basis_form(e))? {
                        out.push((format!("S({e})[{k}]"), v));
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug)]
enum Stage {
    KL,
    B,
    A,
    S,
}

fn is_unknown(a: &SymAtom) -> bool {
    a.name().starts_with("_u")
}

/// Solve the rows that are linear in the open unknowns; rows still
/// nonlinear are left for later.
fn solve_rows(rows: &[(String, ScalarExpr)], open: &[SymAtom]) -> Result<BTreeMap<SymAtom, ScalarExpr>> {
    let mut lin_rows: Vec<Row<Col<SymAtom>>> = Vec::new();
    for (label, v) in rows {
        let Ok((lin, rest)) = v.linear_split(&is_unknown) else { continue };
        if lin.is_empty() {
            if !rest.is_zero() && rest.symbols().iter().all(|s| !is_unknown(s)) {
                return Err(Error::Inconsistent(format!("{label}: {rest:?}")));
            }
            continue;
        }
        let mut row: Row<Col<SymAtom>> = lin.into_iter().map(|(u, c)| (Col::Var(u), c)).collect();
        if !rest.is_zero() {
            row.insert(Col::One, rest);
        }
        lin_rows.push(row);
    }
    solve_partial(lin_rows, open)
}

fn subst_table(table: &BTreeMap<Gen, Cov2>, solved: &BTreeMap<SymAtom, ScalarExpr>) -> BTreeMap<Gen, Cov2> {
    if solved.is_empty() {
        return table.clone();
    }
    table
        .iter()
        .map(|(&g, c)| {
            let mut n = Cov2::new();
            for (&(i, j), v) in c {
                add2(&mut n, i, j, v.substitute(&|a| solved.get(a).cloned()));
            }
            (g, n)
        })
        .collect()
}

fn project(c: Cov2, keep_first: bool, sign: i64) -> Cov2 {
    c.into_iter()
        .filter(|((i, _), _)| is_first(*i) == keep_first)
        .map(|(k, v)| (k, if sign < 0 { -v } else { v }))
        .collect()
}

/// `d•` on 1-forms: `d•(f·g) = df•g + f·d•g` with `d•dt = d•dxᵘ = 0` and
/// `d•ξᵘᵛ = 2ξᵘᵛ`.
pub fn d_bullet(calc: &Calculus, a: &Form) -> Result<Form> {
    if calc.is_ito() {
        return Err(Error::Invalid("d• is defined on the general calculus".into()));
    }
    let mut acc = Form::zero(1);
    for (w, c) in a.terms() {
        let g = calc.gen(w[0]);
        acc = acc.add(&calc.bullet(&calc.d_scalar(c), &g)?);
        if let Gen::Xi(..) = w[0] {
            acc.add_assign_scaled(&g, &c.scale(&rat(2, 1)));
        }
    }
    Ok(acc)
}

/// `Rᵘ_{αβρ}`, antisymmetric in `(β, ρ)`.
pub fn riemann(g: &Gamma, m: Idx, a: Idx, b: Idx, r: Idx) -> ScalarExpr {
    let mut v = &g.get(m, r, a).partial(b) - &g.get(m, b, a).partial(r);
    for l in g.chart().space() {
        v.add_product(g.get(m, b, l), g.get(l, r, a));
        v -= &(g.get(m, r, l) * g.get(l, b, a));
    }
    v.scale(&rat(RIEMANN_SIGN, 1))
}
