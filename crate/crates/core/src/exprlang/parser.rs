use super::ast::{Expr, ExprKind, Shape};
use super::lexer::{lex, Pos, Tok};
use crate::error::Result;
use crate::forms::MAX_DEGREE;
use crate::scalar::{Idx, SymbolTable, T};

pub(crate) struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    table: &'a SymbolTable,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &str, table: &'a SymbolTable) -> Result<Self> {
        Ok(Parser { toks: lex(src)?, at: 0, table })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Pos> {
        let (t, p) = self.bump();
        if t == want {
            Ok(p)
        } else {
            Err(p.error(format!("expected {}, found {}", want.describe(), t.describe())))
        }
    }

    pub(crate) fn parse_all(mut self) -> Result<Expr> {
        let e = self.expr()?;
        match self.peek() {
            Tok::Eof => Ok(e),
            t => Err(self.pos().error(format!("unexpected {} after expression", t.describe()))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let pos = self.pos();
        let mut parts = Vec::new();
        let mut neg = false;
        if *self.peek() == Tok::Minus {
            self.bump();
            neg = true;
        }
        loop {
            let t = self.term()?;
            if let Some((_, first)) = parts.first() {
                let first: &Expr = first;
                if first.shape != t.shape {
                    return Err(t.pos.error(format!(
                        "cannot add {} to {}",
                        t.shape.describe(),
                        first.shape.describe()
                    )));
                }
            }
            parts.push((neg, t));
            match self.peek() {
                Tok::Plus => neg = false,
                Tok::Minus => neg = true,
                _ => break,
            }
            self.bump();
        }
        if parts.len() == 1 && !parts[0].0 {
            return Ok(parts.pop().expect("one part").1);
        }
        let shape = parts[0].1.shape;
        Ok(Expr { kind: ExprKind::Sum(parts), shape, pos })
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Tok::Num(_) | Tok::Ident(_) | Tok::LParen)
    }

    fn term(&mut self) -> Result<Expr> {
        let pos = self.pos();
        let mut factors = vec![self.power()?];
        let mut shape = factors[0].shape;
        loop {
            if *self.peek() == Tok::Star {
                self.bump();
            } else if !self.starts_factor() {
                break;
            }
            let f = self.power()?;
            shape = product_shape(shape, f.shape).map_err(|m| f.pos.error(m))?;
            factors.push(f);
        }
        if factors.len() == 1 {
            return Ok(factors.pop().expect("one factor"));
        }
        Ok(Expr { kind: ExprKind::Product(factors), shape, pos })
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.factor()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let p = self.bump().1;
        if base.shape != Shape::Form(0) {
            return Err(p.error("only scalars can be raised to a power"));
        }
        let (t, tp) = self.bump();
        let n = match t {
            Tok::Num(q) if q.is_integer() => {
                u32::try_from(q.to_integer()).map_err(|_| tp.error("exponent too large"))?
            }
            other => {
                return Err(tp.error(format!("expected a non-negative integer exponent, found {}", other.describe())))
            }
        };
        let pos = base.pos;
        Ok(Expr { kind: ExprKind::Power(Box::new(base), n), shape: Shape::Form(0), pos })
    }

    fn index(&mut self, allow_time: bool) -> Result<Idx> {
        let (t, p) = self.bump();
        let n = self.table.dim();
        match t {
            Tok::Ident(s) if s == "t" && allow_time => Ok(T),
            Tok::Ident(s) if s == "t" => Err(p.error("the time index is not allowed here")),
            Tok::Num(q) if q.is_integer() => {
                let v = q.to_integer();
                match u8::try_from(&v) {
                    Ok(i) if i >= 1 && (i as usize) <= n => Ok(i),
                    _ => Err(p.error(format!("index {v} out of range 1..={n}"))),
                }
            }
            other => Err(p.error(format!("expected an index, found {}", other.describe()))),
        }
    }

    fn indices(&mut self) -> Result<Vec<Idx>> {
        self.expect(Tok::LBrack)?;
        let mut v = vec![self.index(false)?];
        while *self.peek() == Tok::Comma {
            self.bump();
            v.push(self.index(false)?);
        }
        self.expect(Tok::RBrack)?;
        Ok(v)
    }

    fn two_args(&mut self) -> Result<(Expr, Expr)> {
        self.expect(Tok::LParen)?;
        let a = self.expr()?;
        self.expect(Tok::Comma)?;
        let b = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok((a, b))
    }

    fn factor(&mut self) -> Result<Expr> {
        let pos = self.pos();
        let mk = |kind, shape| Expr { kind, shape, pos };
        let (tok, _) = self.bump();
        match tok {
            Tok::Num(q) => Ok(mk(ExprKind::Num(q), Shape::Form(0))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident_factor(name, pos),
            other => Err(pos.error(format!("expected an expression, found {}", other.describe()))),
        }
    }

    fn ident_factor(&mut self, name: String, pos: Pos) -> Result<Expr> {
        let mk = |kind, shape| Expr { kind, shape, pos };
        let chart = self.table.chart();
        match name.as_str() {
            "D" if *self.peek() == Tok::LBrack => {
                self.bump();
                let i = self.index(true)?;
                self.expect(Tok::RBrack)?;
                self.expect(Tok::LParen)?;
                let arg = self.expr()?;
                self.expect(Tok::RParen)?;
                if arg.shape != Shape::Form(0) {
                    return Err(arg.pos.error("partial derivatives apply to scalars only"));
                }
                Ok(mk(ExprKind::Partial(i, Box::new(arg)), Shape::Form(0)))
            }
            "dt" => Ok(mk(ExprKind::Dt, Shape::Form(1))),
            "dx" => {
                self.expect(Tok::LBrack)?;
                let i = self.index(false)?;
                self.expect(Tok::RBrack)?;
                Ok(mk(ExprKind::Dx(i), Shape::Form(1)))
            }
            "xi" => {
                self.expect(Tok::LBrack)?;
                let a = self.index(false)?;
                self.expect(Tok::Comma)?;
                let b = self.index(false)?;
                self.expect(Tok::RBrack)?;
                Ok(mk(ExprKind::Xi(a, b), Shape::Form(1)))
            }
            "delta" => {
                let v = self.indices()?;
                if v.len() != 2 {
                    return Err(pos.error(format!("delta takes 2 indices, got {}", v.len())));
                }
                Ok(mk(ExprKind::Delta(v[0], v[1]), Shape::Form(0)))
            }
            "d" if *self.peek() == Tok::LParen => {
                self.bump();
                let arg = self.expr()?;
                self.expect(Tok::RParen)?;
                match arg.shape {
                    Shape::Form(k) if k < MAX_DEGREE => Ok(mk(ExprKind::D(Box::new(arg)), Shape::Form(k + 1))),
                    Shape::Form(k) => Err(pos.error(format!("d of a {k}-form exceeds degree {MAX_DEGREE}"))),
                    Shape::Tensor => Err(pos.error("d is not defined on tensors")),
                }
            }
            "bullet" | "wedge" | "tensor" => {
                let (a, b) = self.two_args()?;
                let shape = binary_shape(&name, a.shape, b.shape).map_err(|m| pos.error(m))?;
                let kind = match name.as_str() {
                    "bullet" => ExprKind::Bullet(Box::new(a), Box::new(b)),
                    "wedge" => ExprKind::Wedge(Box::new(a), Box::new(b)),
                    _ => ExprKind::Tensor(Box::new(a), Box::new(b)),
                };
                Ok(mk(kind, shape))
            }
            _ if name == chart.time_name() => Ok(mk(ExprKind::Coord(T), Shape::Form(0))),
            _ if name == chart.space_name() && *self.peek() == Tok::LBrack => {
                self.bump();
                let i = self.index(false)?;
                self.expect(Tok::RBrack)?;
                Ok(mk(ExprKind::Coord(i), Shape::Form(0)))
            }
            _ => {
                let decl = self.table.get(&name).map_err(|_| pos.error(format!("undeclared symbol `{name}`")))?;
                let arity = decl.arity();
                let indices = if *self.peek() == Tok::LBrack { self.indices()? } else { Vec::new() };
                if indices.len() != arity {
                    return Err(pos.error(format!("symbol `{name}` expects {arity} indices, got {}", indices.len())));
                }
                Ok(mk(ExprKind::Sym { name, indices }, Shape::Form(0)))
            }
        }
    }
}

fn product_shape(a: Shape, b: Shape) -> std::result::Result<Shape, String> {
    match (a, b) {
        (Shape::Form(x), Shape::Form(y)) if x + y <= MAX_DEGREE => Ok(Shape::Form(x + y)),
        (Shape::Form(x), Shape::Form(y)) => Err(format!("product of degree {} exceeds {MAX_DEGREE}", x + y)),
        (Shape::Form(0), Shape::Tensor) | (Shape::Tensor, Shape::Form(0)) => Ok(Shape::Tensor),
        _ => Err(format!("cannot multiply {} by {}", a.describe(), b.describe())),
    }
}

fn binary_shape(op: &str, a: Shape, b: Shape) -> std::result::Result<Shape, String> {
    match (op, a, b) {
        ("bullet", Shape::Form(1), Shape::Form(1)) => Ok(Shape::Form(1)),
        ("bullet", Shape::Form(x), Shape::Form(y)) if (1..=2).contains(&x) && (1..=2).contains(&y) => {
            Ok(Shape::Form(2))
        }
        ("wedge", Shape::Form(1), Shape::Form(1)) => Ok(Shape::Form(2)),
        ("tensor", Shape::Form(1), Shape::Form(1)) => Ok(Shape::Tensor),
        _ => Err(format!("{op} is not defined for {} and {}", a.describe(), b.describe())),
    }
}
