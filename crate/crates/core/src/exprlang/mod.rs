//! Text grammar for scalar and form expressions, with canonical and LaTeX
//! printers.
//!
//! ```text
//! expr    := ['-'] term (('+' | '-') term)*
//! term    := power (['*'] power)*
//! power   := factor ['^' integer]
//! factor  := number | ident indices? | 'D' '[' idx ']' '(' expr ')'
//!          | 'dt' | 'dx' '[' idx ']' | 'xi' '[' idx ',' idx ']'
//!          | 'd' '(' expr ')' | 'bullet' '(' expr ',' expr ')'
//!          | 'wedge' '(' expr ',' expr ')' | 'tensor' '(' expr ',' expr ')'
//!          | '(' expr ')'
//! indices := '[' idx (',' idx)* ']'
//! ```
//!
//! Indices are 1-based; `t` is the time index. Numbers are integers or
//! fractions `p/q`. Juxtaposition multiplies, so `dx[1]dx[2]` is a word.

mod ast;
mod lexer;
mod parser;
mod print;

pub use ast::{Env, Expr, ExprKind, Shape, Shown, Value};
pub use lexer::Pos;
pub use print::{name_latex, Printable};

use crate::error::Result;
use crate::forms::{Calculus, Form};
use crate::scalar::{ScalarExpr, SymbolTable};

/// Parse and check declarations, index arity and form degrees.
pub fn parse(text: &str, table: &SymbolTable) -> Result<Expr> {
    parser::Parser::new(text, table)?.parse_all()
}

pub fn parse_scalar(text: &str, table: &SymbolTable) -> Result<ScalarExpr> {
    let e = parse(text, table)?;
    if e.shape != Shape::Form(0) {
        return Err(e.pos.error(format!("expected a scalar, found {}", e.shape.describe())));
    }
    e.elaborate(&Env::scalars(table))?.into_scalar()
}

pub fn parse_form(text: &str, table: &SymbolTable, calc: &Calculus) -> Result<Form> {
    let e = parse(text, table)?;
    if e.shape == Shape::Tensor {
        return Err(e.pos.error("expected a form, found a tensor"));
    }
    e.elaborate(&Env::forms(table, calc))?.into_form()
}
