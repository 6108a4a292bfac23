use std::collections::BTreeMap;
use std::sync::OnceLock;

use itertools::Itertools;
use smallvec::smallvec;

use super::{Form, Gen, Word, MAX_DEGREE};
use crate::error::{Error, Result};
use crate::linalg::{Eliminator, Row};
use crate::scalar::{rat, Chart, Idx, Rational, ScalarExpr, T};

/// Which quotient calculus a [`Calculus`] realizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Generators `dt, dxᵘ, ξᵘᵛ` with the constant-coefficient relations.
    General,
    /// Itô specialization `ξᵘᵛ = −dt·bᵘᵛ`; `b` is indexed by `Chart::sym_pairs`.
    Ito(Vec<ScalarExpr>),
}

/// A differential calculus on a chart together with its cached relation
/// reducers for degrees 2 and 3.
#[derive(Debug)]
pub struct Calculus {
    chart: Chart,
    kind: Kind,
    reducers: [OnceLock<Result<Eliminator<Word>>>; 2],
}

impl Calculus {
    pub fn general(chart: Chart) -> Calculus {
        Calculus { chart, kind: Kind::General, reducers: Default::default() }
    }

    /// `b` maps each pair `(μ, ν)` to `bᵘᵛ`; it must be symmetric.
    pub fn ito(chart: Chart, b: &dyn Fn(Idx, Idx) -> ScalarExpr) -> Result<Calculus> {
        let mut comps = Vec::new();
        for (m, n) in chart.sym_pairs() {
            if b(m, n) != b(n, m) {
                return Err(Error::Invalid(format!("diffusion matrix not symmetric at ({m},{n})")));
            }
            comps.push(b(m, n));
        }
        Ok(Calculus { chart, kind: Kind::Ito(comps), reducers: Default::default() })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn is_ito(&self) -> bool {
        matches!(self.kind, Kind::Ito(_))
    }

    fn pair_index(&self, a: Idx, b: Idx) -> usize {
        let (a, b) = if a <= b { (a as usize, b as usize) } else { (b as usize, a as usize) };
        let n = self.dim();
        (1..a).map(|k| n + 1 - k).sum::<usize>() + (b - a)
    }

    /// Diffusion matrix entry `bᵘᵛ` (zero in the general calculus).
    pub fn b(&self, a: Idx, b: Idx) -> ScalarExpr {
        match &self.kind {
            Kind::General => ScalarExpr::zero(),
            Kind::Ito(v) => v[self.pair_index(a, b)].clone(),
        }
    }

    pub fn generators(&self) -> Vec<Gen> {
        let mut g = vec![Gen::Dt];
        g.extend(self.chart.space().map(Gen::Dx));
        if !self.is_ito() {
            g.extend(self.chart.sym_pairs().into_iter().map(|(a, b)| Gen::Xi(a, b)));
        }
        g
    }

    pub fn check_gen(&self, g: Gen) -> Result<Gen> {
        match g {
            Gen::Dt => Ok(g),
            Gen::Dx(i) => self.chart.check_spatial(i).map(|_| g),
            Gen::Xi(a, b) => {
                if self.is_ito() {
                    return Err(Error::Invalid("ξ is not a generator of the Itô calculus".into()));
                }
                self.chart.check_spatial(a)?;
                self.chart.check_spatial(b)?;
                Ok(Gen::xi(a, b))
            }
        }
    }

    /// All words of the given degree over the generators.
    pub fn words(&self, degree: usize) -> Vec<Word> {
        let g = self.generators();
        (0..degree).map(|_| g.iter().copied()).multi_cartesian_product().map(|v| v.into_iter().collect()).collect()
    }

    pub fn scalar(&self, f: ScalarExpr) -> Form {
        Form::from_terms(0, BTreeMap::from([(Word::new(), f)]))
    }

    pub fn gen(&self, g: Gen) -> Form {
        Form::from_terms(1, BTreeMap::from([(smallvec![g], ScalarExpr::one())]))
    }

    pub fn dx(&self, i: Idx) -> Form {
        self.gen(Gen::Dx(i))
    }

    pub fn dt(&self) -> Form {
        self.gen(Gen::Dt)
    }

    pub fn xi(&self, a: Idx, b: Idx) -> Form {
        self.gen(Gen::xi(a, b))
    }

    /// `g·f = Σ c_h·h`: moves a function to the left of a generator.
    pub fn commute(&self, g: Gen, f: &ScalarExpr) -> Vec<(Gen, ScalarExpr)> {
        match (g, &self.kind) {
            (Gen::Dx(m), Kind::General) => {
                let mut v = vec![(g, f.clone())];
                for r in self.chart.space() {
                    let c = -f.partial(r);
                    if !c.is_zero() {
                        v.push((Gen::xi(r, m), c));
                    }
                }
                v
            }
            (Gen::Dx(m), Kind::Ito(_)) => {
                let mut corr = ScalarExpr::zero();
                for r in self.chart.space() {
                    corr.add_product(&f.partial(r), &self.b(r, m));
                }
                let mut v = vec![(g, f.clone())];
                if !corr.is_zero() {
                    v.push((Gen::Dt, corr));
                }
                v
            }
            _ => vec![(g, f.clone())],
        }
    }

    /// Bullet product of two generators as a left 1-form.
    pub fn gen_bullet(&self, g: Gen, h: Gen) -> Vec<(Gen, ScalarExpr)> {
        match (g, h) {
            (Gen::Dx(a), Gen::Dx(b)) => match &self.kind {
                Kind::General => vec![(Gen::xi(a, b), ScalarExpr::one())],
                Kind::Ito(_) => {
                    let c = -self.b(a, b);
                    if c.is_zero() {
                        vec![]
                    } else {
                        vec![(Gen::Dt, c)]
                    }
                }
            },
            _ => vec![],
        }
    }

    /// `d` of a generator as raw degree-2 words.
    pub fn d_gen(&self, g: Gen) -> Vec<(Word, Rational)> {
        match g {
            Gen::Xi(a, b) => {
                let one = Rational::from_integer(1.into());
                let w1: Word = smallvec![Gen::Dx(a), Gen::Dx(b)];
                let w2: Word = smallvec![Gen::Dx(b), Gen::Dx(a)];
                if a == b {
                    vec![(w1, Rational::from_integer(2.into()))]
                } else {
                    vec![(w1, one.clone()), (w2, one)]
                }
            }
            _ => vec![],
        }
    }

    /// Exterior derivative of a function, coefficients on the left.
    pub fn d_scalar(&self, f: &ScalarExpr) -> Form {
        let mut t = BTreeMap::new();
        let mut ft = f.partial(T);
        if self.is_ito() {
            for m in self.chart.space() {
                for n in self.chart.space() {
                    ft.add_scaled(&(&self.b(m, n) * &f.partial(m).partial(n)), &rat(1, 2));
                }
            }
        }
        t.insert(smallvec![Gen::Dt], ft);
        for m in self.chart.space() {
            t.insert(smallvec![Gen::Dx(m)], f.partial(m));
        }
        if !self.is_ito() {
            for (a, b) in self.chart.sym_pairs() {
                let w = if a == b { rat(-1, 2) } else { rat(-1, 1) };
                t.insert(smallvec![Gen::Xi(a, b)], f.partial(a).partial(b).scale(&w));
            }
        }
        Form::from_terms(1, t)
    }

    /// `w·f` rewritten as `Σ c·w'` with coefficients on the left.
    pub fn word_times_scalar(&self, w: &[Gen], f: &ScalarExpr) -> Vec<(ScalarExpr, Word)> {
        if f.is_zero() {
            return vec![];
        }
        if w.is_empty() {
            return vec![(f.clone(), Word::new())];
        }
        let mut out = Vec::new();
        for (c, tail) in self.word_times_scalar(&w[1..], f) {
            for (h, c2) in self.commute(w[0], &c) {
                let mut nw: Word = smallvec![h];
                nw.extend_from_slice(&tail);
                out.push((c2, nw));
            }
        }
        out
    }

    fn reducer(&self, degree: usize) -> Result<&Eliminator<Word>> {
        assert!((2..=3).contains(&degree));
        self.reducers[degree - 2]
            .get_or_init(|| {
                let mut el = Eliminator::new();
                let stuck = el.insert_all(self.relation_rows(degree), &|_| true);
                if stuck.is_empty() {
                    Ok(el)
                } else {
                    Err(Error::NonUnitPivot(format!(
                        "{} degree-{degree} relation rows lack a rational pivot",
                        stuck.len()
                    )))
                }
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Spanning rows of the relation module in the given degree.
    pub fn relation_rows(&self, degree: usize) -> Vec<Row<Word>> {
        match degree {
            2 => self.degree2_rows(),
            3 => {
                let base = self.degree2_rows();
                let gens = self.generators();
                let mut rows = Vec::new();
                for r in &base {
                    for &g in &gens {
                        let mut right = Row::new();
                        let mut left = Row::new();
                        for (w, c) in r {
                            let mut wg = w.clone();
                            wg.push(g);
                            add_to(&mut right, wg, c.clone());
                            for (h, c2) in self.commute(g, c) {
                                let mut hw: Word = smallvec![h];
                                hw.extend_from_slice(w);
                                add_to(&mut left, hw, c2);
                            }
                        }
                        rows.push(right);
                        rows.push(left);
                    }
                    rows.push(self.d_raw(r));
                }
                rows.retain(|r| !r.is_empty());
                rows
            }
            _ => vec![],
        }
    }

    fn degree2_rows(&self) -> Vec<Row<Word>> {
        let one = ScalarExpr::one;
        let mut rows = Vec::new();
        rows.push(Row::from([(smallvec![Gen::Dt, Gen::Dt], one())]));
        for m in self.chart.space() {
            let mut r = Row::new();
            add_to(&mut r, smallvec![Gen::Dt, Gen::Dx(m)], one());
            add_to(&mut r, smallvec![Gen::Dx(m), Gen::Dt], one());
            rows.push(r);
        }
        match &self.kind {
            Kind::General => {
                let pairs = self.chart.sym_pairs();
                for &(a, b) in &pairs {
                    let mut r = Row::new();
                    add_to(&mut r, smallvec![Gen::Dt, Gen::Xi(a, b)], one());
                    add_to(&mut r, smallvec![Gen::Xi(a, b), Gen::Dt], one());
                    rows.push(r);
                }
                let n = self.dim() as Idx;
                for idx in (1..=n).combinations_with_replacement(3) {
                    let mut r = Row::new();
                    for p in idx.iter().permutations(3) {
                        let (x, y) = (Gen::Dx(*p[0]), Gen::xi(*p[1], *p[2]));
                        add_to(&mut r, smallvec![x, y], one());
                        add_to(&mut r, smallvec![y, x], one());
                    }
                    rows.push(r);
                }
                for idx in (1..=n).combinations_with_replacement(4) {
                    let mut r = Row::new();
                    for p in idx.iter().permutations(4) {
                        let (x, y) = (Gen::xi(*p[0], *p[1]), Gen::xi(*p[2], *p[3]));
                        add_to(&mut r, smallvec![x, y], one());
                        add_to(&mut r, smallvec![y, x], one());
                    }
                    rows.push(r);
                }
            }
            Kind::Ito(_) => {
                // dξᵘᵛ = [dxᵘ, dxᵛ]₊ must agree with d(−bᵘᵛ dt) = −db·dt.
                for (m, n) in self.chart.sym_pairs() {
                    let mut r = Row::new();
                    add_to(&mut r, smallvec![Gen::Dx(m), Gen::Dx(n)], one());
                    add_to(&mut r, smallvec![Gen::Dx(n), Gen::Dx(m)], one());
                    let b = self.b(m, n);
                    for k in self.chart.space() {
                        add_to(&mut r, smallvec![Gen::Dx(k), Gen::Dt], b.partial(k));
                    }
                    rows.push(r);
                }
            }
        }
        rows
    }

    /// `d` applied to a raw left-coefficient combination of words.
    fn d_raw(&self, row: &Row<Word>) -> Row<Word> {
        let mut out = Row::new();
        for (w, c) in row {
            for (g, dc) in self.d_scalar(c).terms() {
                let mut nw = g.clone();
                nw.extend_from_slice(w);
                add_to(&mut out, nw, dc.clone());
            }
            for i in 0..w.len() {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                for (dw, q) in self.d_gen(w[i]) {
                    let mut nw: Word = w[..i].iter().copied().collect();
                    nw.extend_from_slice(&dw);
                    nw.extend_from_slice(&w[i + 1..]);
                    add_to(&mut out, nw, c.scale(&(q * Rational::from_integer(sign.into()))));
                }
            }
        }
        out
    }

    /// Canonical basis words of the given degree.
    pub fn basis(&self, degree: usize) -> Result<Vec<Word>> {
        if degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow(degree));
        }
        let words = self.words(degree);
        if degree < 2 {
            return Ok(words);
        }
        let red = self.reducer(degree)?;
        Ok(words.into_iter().filter(|w| !red.is_pivot(w)).collect())
    }

    /// Reduce a raw left-coefficient combination to normal form.
    pub fn normal_form(&self, degree: usize, raw: Row<Word>) -> Result<Form> {
        if degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow(degree));
        }
        if degree < 2 {
            return Ok(Form::from_terms(degree, raw));
        }
        Ok(Form::from_terms(degree, self.reducer(degree)?.reduce(&raw)))
    }

    pub fn mul(&self, a: &Form, b: &Form) -> Result<Form> {
        let deg = a.degree() + b.degree();
        if deg > MAX_DEGREE {
            return Err(Error::DegreeOverflow(deg));
        }
        let mut raw = Row::new();
        for (wa, ca) in a.terms() {
            for (wb, cb) in b.terms() {
                for (c, w) in self.word_times_scalar(wa, cb) {
                    let mut nw = w;
                    nw.extend_from_slice(wb);
                    add_to(&mut raw, nw, ca * &c);
                }
            }
        }
        self.normal_form(deg, raw)
    }

    /// `α·f`.
    pub fn right_mul(&self, a: &Form, f: &ScalarExpr) -> Result<Form> {
        self.mul(a, &self.scalar(f.clone()))
    }

    /// `[f, α] = fα − αf`.
    pub fn commutator(&self, f: &ScalarExpr, a: &Form) -> Result<Form> {
        Ok(a.left_mul(f).sub(&self.right_mul(a, f)?))
    }

    pub fn d(&self, a: &Form) -> Result<Form> {
        let deg = a.degree() + 1;
        if deg > MAX_DEGREE {
            return Err(Error::DegreeOverflow(deg));
        }
        if a.degree() == 0 {
            return Ok(self.d_scalar(&a.scalar_part()));
        }
        self.normal_form(deg, self.d_raw(a.terms()))
    }

    /// Bullet product of degree-1 forms, or of a 1-form with a 2-form, or of
    /// two 2-forms.
    pub fn bullet(&self, a: &Form, b: &Form) -> Result<Form> {
        match (a.degree(), b.degree()) {
            (1, 1) => {
                let mut t = Row::new();
                for (wa, ca) in a.terms() {
                    for (wb, cb) in b.terms() {
                        for (g, c) in self.gen_bullet(wa[0], wb[0]) {
                            add_to(&mut t, smallvec![g], &(ca * cb) * &c);
                        }
                    }
                }
                Ok(Form::from_terms(1, t))
            }
            (1, 2) => self.bullet_one_two(a, b),
            (2, 1) => self.bullet_one_two(b, a),
            (2, 2) => {
                let mut acc = Form::zero(2);
                for (wa, ca) in a.terms() {
                    for (wb, cb) in b.terms() {
                        let p = self.gen_bullet(wa[0], wb[0]);
                        let q = self.gen_bullet(wa[1], wb[1]);
                        if p.is_empty() || q.is_empty() {
                            continue;
                        }
                        let prod = self.mul(&self.one_form(&p), &self.one_form(&q))?;
                        acc.add_assign_scaled(&prod, &(ca * cb));
                    }
                }
                Ok(acc)
            }
            (x, y) => Err(Error::Invalid(format!("bullet of degrees {x} and {y} is not defined"))),
        }
    }

    /// `(g·df·h)•ω = g[f, ω]h` extended to generators:
    /// `dt•ω = [t, ω]`, `dxᵘ•ω = [xᵘ, ω]`, `ξᵘᵛ•ω = [xᵘ, [xᵛ, ω]]`.
    fn bullet_one_two(&self, a: &Form, w: &Form) -> Result<Form> {
        let mut acc = Form::zero(2);
        for (g, c) in a.terms() {
            let part = match g[0] {
                Gen::Dt => self.commutator(&ScalarExpr::coord(T), w)?,
                Gen::Dx(m) => self.commutator(&ScalarExpr::coord(m), w)?,
                Gen::Xi(p, q) => {
                    let inner = self.commutator(&ScalarExpr::coord(q), w)?;
                    self.commutator(&ScalarExpr::coord(p), &inner)?
                }
            };
            acc.add_assign_scaled(&part, c);
        }
        Ok(acc)
    }

    pub(crate) fn one_form(&self, terms: &[(Gen, ScalarExpr)]) -> Form {
        let mut t = Row::new();
        for (g, c) in terms {
            add_to(&mut t, smallvec![*g], c.clone());
        }
        Form::from_terms(1, t)
    }

    /// Right-coefficient components of a 1-form: `α = Σ g·r_g`.
    pub fn to_right(&self, a: &Form) -> Result<BTreeMap<Gen, ScalarExpr>> {
        expect_degree(a, 1)?;
        let mut r: BTreeMap<Gen, ScalarExpr> = BTreeMap::new();
        for (w, c) in a.terms() {
            // c·g = g·c + dc•g, and dc•g only involves central generators.
            *r.entry(w[0]).or_default() += c;
            for (wk, e) in self.bullet(&self.d_scalar(c), &self.gen(w[0]))?.terms() {
                debug_assert!(wk[0].is_central());
                *r.entry(wk[0]).or_default() += e;
            }
        }
        r.retain(|_, v| !v.is_zero());
        Ok(r)
    }

    /// Inverse of [`Calculus::to_right`].
    pub fn from_right(&self, r: &BTreeMap<Gen, ScalarExpr>) -> Form {
        let mut t = Row::new();
        for (&g, c) in r {
            add_to(&mut t, smallvec![g], c.clone());
            for (h, e) in self.gen_bullet_with_df(c, g) {
                add_to(&mut t, smallvec![h], -e);
            }
        }
        Form::from_terms(1, t)
    }

    /// `df•g` as left 1-form terms.
    fn gen_bullet_with_df(&self, f: &ScalarExpr, g: Gen) -> Vec<(Gen, ScalarExpr)> {
        let mut out = Vec::new();
        for (w, c) in self.d_scalar(f).terms() {
            for (h, e) in self.gen_bullet(w[0], g) {
                out.push((h, c * &e));
            }
        }
        out
    }

    /// The duality pairing `⟨X, α⟩` needs right components; this evaluates
    /// `Σ_g v_g·r_g` for generator values `v`.
    pub fn pair_right(&self, a: &Form, v: &dyn Fn(Gen) -> ScalarExpr) -> Result<ScalarExpr> {
        let mut acc = ScalarExpr::zero();
        for (g, r) in self.to_right(a)? {
            acc.add_product(&v(g), &r);
        }
        Ok(acc)
    }
}

pub(crate) fn add_to(row: &mut Row<Word>, w: Word, c: ScalarExpr) {
    if c.is_zero() {
        return;
    }
    let e = row.entry(w.clone()).or_default();
    *e += c;
    if e.is_zero() {
        row.remove(&w);
    }
}

pub(crate) fn expect_degree(a: &Form, d: usize) -> Result<()> {
    if a.degree() == d {
        Ok(())
    } else {
        Err(Error::Degree { expected: d, got: a.degree() })
    }
}
