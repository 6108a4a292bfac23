use std::collections::BTreeMap;
use std::fmt;

use super::lexer::Pos;
use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::forms::{Calculus, Form, Tensor, Word};
use crate::scalar::{Chart, Idx, Rational, ScalarExpr, SymbolTable, T};

/// Statically known kind of a subexpression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// A form of the given degree; scalars are 0-forms.
    Form(usize),
    Tensor,
}

impl Shape {
    pub(crate) fn describe(self) -> String {
        match self {
            Shape::Form(0) => "a scalar".into(),
            Shape::Form(k) => format!("a {k}-form"),
            Shape::Tensor => "a tensor".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Num(Rational),
    /// `T` for the time coordinate.
    Coord(Idx),
    Sym {
        name: String,
        indices: Vec<Idx>,
    },
    Delta(Idx, Idx),
    Partial(Idx, Box<Expr>),
    Power(Box<Expr>, u32),
    Dt,
    Dx(Idx),
    Xi(Idx, Idx),
    D(Box<Expr>),
    Bullet(Box<Expr>, Box<Expr>),
    Wedge(Box<Expr>, Box<Expr>),
    Tensor(Box<Expr>, Box<Expr>),
    /// Terms with a negation flag each.
    Sum(Vec<(bool, Expr)>),
    Product(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub shape: Shape,
    pub pos: Pos,
}

/// What an expression elaborates to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Form(Form),
    Tensor(Tensor),
}

impl Value {
    pub fn into_form(self) -> Result<Form> {
        match self {
            Value::Form(f) => Ok(f),
            Value::Tensor(_) => Err(Error::Invalid("expected a form, got a tensor".into())),
        }
    }

    pub fn into_scalar(self) -> Result<ScalarExpr> {
        let f = self.into_form()?;
        if f.degree() != 0 {
            return Err(Error::Degree { expected: 0, got: f.degree() });
        }
        Ok(f.scalar_part())
    }
}

/// Elaboration context. Scalar expressions need only the symbol table;
/// forms need a calculus and `wedge` needs a connection.
pub struct Env<'a> {
    pub table: &'a SymbolTable,
    pub calc: Option<&'a Calculus>,
    pub conn: Option<&'a Connection<'a>>,
}

impl<'a> Env<'a> {
    pub fn scalars(table: &'a SymbolTable) -> Self {
        Env { table, calc: None, conn: None }
    }

    pub fn forms(table: &'a SymbolTable, calc: &'a Calculus) -> Self {
        Env { table, calc: Some(calc), conn: None }
    }

    fn calc(&self, pos: Pos) -> Result<&'a Calculus> {
        self.calc.ok_or_else(|| pos.error("forms need a calculus in this context"))
    }
}

impl Expr {
    pub fn elaborate(&self, env: &Env) -> Result<Value> {
        let at = |e: Error| -> Error {
            match e {
                Error::Parse { .. } => e,
                other => self.pos.error(other.to_string()),
            }
        };
        let scalar = |e: ScalarExpr| -> Result<Value> { Ok(Value::Form(scalar_form(e))) };
        match &self.kind {
            ExprKind::Num(q) => scalar(ScalarExpr::constant(q.clone())),
            ExprKind::Coord(i) => scalar(env.table.coord(*i).map_err(at)?),
            ExprKind::Sym { name, indices } => scalar(env.table.sym(name, indices).map_err(at)?),
            ExprKind::Delta(a, b) => scalar(ScalarExpr::delta(*a, *b)),
            ExprKind::Partial(i, e) => scalar(e.elaborate(env)?.into_scalar().map_err(at)?.partial(*i)),
            ExprKind::Power(e, n) => scalar(e.elaborate(env)?.into_scalar().map_err(at)?.pow(*n)),
            ExprKind::Dt => Ok(Value::Form(env.calc(self.pos)?.dt())),
            ExprKind::Dx(i) => Ok(Value::Form(env.calc(self.pos)?.dx(*i))),
            ExprKind::Xi(a, b) => {
                let c = env.calc(self.pos)?;
                if c.is_ito() {
                    let minus_b = -c.b(*a, *b);
                    Ok(Value::Form(c.dt().left_mul(&minus_b)))
                } else {
                    Ok(Value::Form(c.xi(*a, *b)))
                }
            }
            ExprKind::D(e) => {
                let c = env.calc(self.pos)?;
                let f = e.elaborate(env)?.into_form().map_err(at)?;
                Ok(Value::Form(c.d(&f).map_err(at)?))
            }
            ExprKind::Bullet(a, b) => {
                let c = env.calc(self.pos)?;
                let (x, y) = (a.elaborate(env)?.into_form().map_err(at)?, b.elaborate(env)?.into_form().map_err(at)?);
                Ok(Value::Form(c.bullet(&x, &y).map_err(at)?))
            }
            ExprKind::Wedge(a, b) => {
                let conn = env.conn.ok_or_else(|| self.pos.error("wedge needs a connection in this context"))?;
                let (x, y) = (a.elaborate(env)?.into_form().map_err(at)?, b.elaborate(env)?.into_form().map_err(at)?);
                Ok(Value::Form(conn.wedge(&x, &y).map_err(at)?))
            }
            ExprKind::Tensor(a, b) => {
                let c = env.calc(self.pos)?;
                let (x, y) = (a.elaborate(env)?.into_form().map_err(at)?, b.elaborate(env)?.into_form().map_err(at)?);
                Ok(Value::Tensor(c.tensor(&x, &y).map_err(at)?))
            }
            ExprKind::Sum(parts) => {
                let mut acc: Option<Value> = None;
                for (neg, e) in parts {
                    let mut v = e.elaborate(env)?;
                    if *neg {
                        v = negate(v);
                    }
                    acc = Some(match acc {
                        None => v,
                        Some(Value::Form(a)) => Value::Form(a.add(&v.into_form().map_err(at)?)),
                        Some(Value::Tensor(a)) => match v {
                            Value::Tensor(b) => Value::Tensor(a.add(&b)),
                            Value::Form(_) => return Err(self.pos.error("cannot add a form to a tensor")),
                        },
                    });
                }
                Ok(acc.expect("non-empty sum"))
            }
            ExprKind::Product(factors) => {
                let mut acc = factors[0].elaborate(env)?;
                for f in &factors[1..] {
                    let v = f.elaborate(env)?;
                    acc = multiply(env, f.pos, acc, v)?;
                }
                Ok(acc)
            }
        }
    }
}

fn scalar_form(e: ScalarExpr) -> Form {
    Form::from_terms(0, BTreeMap::from([(Word::new(), e)]))
}

fn negate(v: Value) -> Value {
    match v {
        Value::Form(f) => Value::Form(f.neg()),
        Value::Tensor(t) => Value::Tensor(t.left_mul(&ScalarExpr::int(-1))),
    }
}

fn multiply(env: &Env, pos: Pos, a: Value, b: Value) -> Result<Value> {
    let at = |e: Error| pos.error(e.to_string());
    match (a, b) {
        (Value::Form(x), Value::Form(y)) => {
            if x.degree() == 0 {
                return Ok(Value::Form(y.left_mul(&x.scalar_part())));
            }
            let c = env.calc(pos)?;
            Ok(Value::Form(c.mul(&x, &y).map_err(at)?))
        }
        (Value::Form(x), Value::Tensor(t)) if x.degree() == 0 => Ok(Value::Tensor(t.left_mul(&x.scalar_part()))),
        (Value::Tensor(t), Value::Form(y)) if y.degree() == 0 => {
            let c = env.calc(pos)?;
            Ok(Value::Tensor(c.tensor_right_mul(&t, &y.scalar_part())))
        }
        _ => Err(pos.error("unsupported product")),
    }
}

impl Expr {
    /// Canonical text of the syntax tree itself. Reparsing yields a tree
    /// with the same elaboration.
    pub fn display<'a>(&'a self, chart: &'a Chart) -> Shown<'a> {
        Shown { e: self, chart }
    }
}

pub struct Shown<'a> {
    e: &'a Expr,
    chart: &'a Chart,
}

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chart = self.chart;
        let sh = |e: &'_ Expr| Shown { e, chart }.to_string();
        match &self.e.kind {
            ExprKind::Num(q) => write!(f, "{q}"),
            ExprKind::Coord(i) if *i == T => write!(f, "{}", chart.time_name()),
            ExprKind::Coord(i) => write!(f, "{}[{i}]", chart.space_name()),
            ExprKind::Sym { name, indices } if indices.is_empty() => write!(f, "{name}"),
            ExprKind::Sym { name, indices } => write!(f, "{name}[{}]", join_idx(indices)),
            ExprKind::Delta(a, b) => write!(f, "delta[{a},{b}]"),
            ExprKind::Partial(i, e) if *i == T => write!(f, "D[t]({})", sh(e)),
            ExprKind::Partial(i, e) => write!(f, "D[{i}]({})", sh(e)),
            ExprKind::Power(e, n) => {
                if is_atomic(e) {
                    write!(f, "{}^{n}", sh(e))
                } else {
                    write!(f, "({})^{n}", sh(e))
                }
            }
            ExprKind::Dt => write!(f, "dt"),
            ExprKind::Dx(i) => write!(f, "dx[{i}]"),
            ExprKind::Xi(a, b) => write!(f, "xi[{a},{b}]"),
            ExprKind::D(e) => write!(f, "d({})", sh(e)),
            ExprKind::Bullet(a, b) => write!(f, "bullet({}, {})", sh(a), sh(b)),
            ExprKind::Wedge(a, b) => write!(f, "wedge({}, {})", sh(a), sh(b)),
            ExprKind::Tensor(a, b) => write!(f, "tensor({}, {})", sh(a), sh(b)),
            ExprKind::Sum(parts) => {
                for (k, (neg, e)) in parts.iter().enumerate() {
                    match (k, neg) {
                        (0, true) => write!(f, "-")?,
                        (0, false) => {}
                        (_, true) => write!(f, " - ")?,
                        (_, false) => write!(f, " + ")?,
                    }
                    if matches!(e.kind, ExprKind::Sum(_)) {
                        write!(f, "({})", sh(e))?;
                    } else {
                        write!(f, "{}", sh(e))?;
                    }
                }
                Ok(())
            }
            ExprKind::Product(fs) => {
                for (k, e) in fs.iter().enumerate() {
                    if k > 0 {
                        write!(f, "*")?;
                    }
                    if matches!(e.kind, ExprKind::Sum(_)) {
                        write!(f, "({})", sh(e))?;
                    } else {
                        write!(f, "{}", sh(e))?;
                    }
                }
                Ok(())
            }
        }
    }
}

fn is_atomic(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Num(q) => q.is_integer() && *q >= Rational::from_integer(0.into()),
        ExprKind::Coord(_) | ExprKind::Sym { .. } | ExprKind::Delta(..) | ExprKind::Partial(..) => true,
        _ => false,
    }
}

pub(crate) fn join_idx(v: &[Idx]) -> String {
    v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}
