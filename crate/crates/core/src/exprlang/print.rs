use num_traits::{One, Signed};

use crate::forms::{Form, Gen, Tensor};
use crate::scalar::{Atom, Chart, Monomial, Rational, ScalarExpr, SymAtom, SymbolTable, Variance, T};

/// Deterministic text forms of engine values.
pub trait Printable {
    /// Grammar-conforming text that reparses to an equal value.
    fn canonical(&self, chart: &Chart) -> String;
    /// LaTeX rendering; variances come from the table when declared.
    fn latex(&self, table: &SymbolTable) -> String;
}

struct Piece {
    negative: bool,
    body: String,
}

fn join(pieces: Vec<Piece>) -> String {
    if pieces.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, p) in pieces.into_iter().enumerate() {
        match (k, p.negative) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        s.push_str(&p.body);
    }
    s
}

fn atom_text(a: &Atom, chart: &Chart) -> String {
    match a {
        Atom::Coord(i) if *i == T => chart.time_name().into(),
        Atom::Coord(i) => format!("{}[{i}]", chart.space_name()),
        Atom::Sym(s) => {
            let mut out = if s.indices().is_empty() {
                s.name().to_string()
            } else {
                format!("{}[{}]", s.name(), super::ast::join_idx(s.indices()))
            };
            for &d in s.derivs().iter().rev() {
                let i = if d == T { "t".to_string() } else { d.to_string() };
                out = format!("D[{i}]({out})");
            }
            out
        }
    }
}

fn monomial_text(m: &Monomial, chart: &Chart) -> String {
    m.factors()
        .iter()
        .map(|(a, e)| if *e > 1 { format!("{}^{e}", atom_text(a, chart)) } else { atom_text(a, chart) })
        .collect::<Vec<_>>()
        .join("*")
}

fn scalar_pieces(e: &ScalarExpr, chart: &Chart) -> Vec<Piece> {
    e.terms()
        .map(|(m, c)| {
            let q = c.abs();
            let body = if m.is_one() {
                q.to_string()
            } else if q.is_one() {
                monomial_text(m, chart)
            } else {
                format!("{q}*{}", monomial_text(m, chart))
            };
            Piece { negative: c.is_negative(), body }
        })
        .collect()
}

/// Coefficient in front of a word: returns the sign and the text to place
/// before the word (empty for a unit coefficient).
fn coeff_prefix(
    c: &ScalarExpr,
    text: &dyn Fn(&ScalarExpr) -> String,
    sep: &str,
    paren: (&str, &str),
) -> (bool, String) {
    if c.len() == 1 {
        let neg = c.leading_is_negative();
        let abs = if neg { -c } else { c.clone() };
        if abs == ScalarExpr::one() {
            return (neg, String::new());
        }
        return (neg, format!("{}{sep}", text(&abs)));
    }
    (false, format!("{}{}{}{sep}", paren.0, text(c), paren.1))
}

fn gen_text(g: Gen) -> String {
    g.to_string()
}

fn word_text(w: &[Gen]) -> String {
    let mut s = String::new();
    for (k, g) in w.iter().enumerate() {
        if k > 0 && w[k - 1] == Gen::Dt {
            s.push(' ');
        }
        s.push_str(&gen_text(*g));
    }
    s
}

impl Printable for ScalarExpr {
    fn canonical(&self, chart: &Chart) -> String {
        join(scalar_pieces(self, chart))
    }

    fn latex(&self, table: &SymbolTable) -> String {
        join(
            self.terms()
                .map(|(m, c)| {
                    let q = c.abs();
                    let body = if m.is_one() {
                        rational_latex(&q)
                    } else if q.is_one() {
                        monomial_latex(m, table)
                    } else {
                        format!("{} {}", rational_latex(&q), monomial_latex(m, table))
                    };
                    Piece { negative: c.is_negative(), body }
                })
                .collect(),
        )
    }
}

impl Printable for Form {
    fn canonical(&self, chart: &Chart) -> String {
        if self.degree() == 0 {
            return self.scalar_part().canonical(chart);
        }
        let text = |c: &ScalarExpr| c.canonical(chart);
        join(
            self.terms()
                .iter()
                .map(|(w, c)| {
                    let (negative, pre) = coeff_prefix(c, &text, "*", ("(", ")"));
                    Piece { negative, body: format!("{pre}{}", word_text(w)) }
                })
                .collect(),
        )
    }

    fn latex(&self, table: &SymbolTable) -> String {
        if self.degree() == 0 {
            return self.scalar_part().latex(table);
        }
        let text = |c: &ScalarExpr| c.latex(table);
        join(
            self.terms()
                .iter()
                .map(|(w, c)| {
                    let (negative, pre) = coeff_prefix(c, &text, " ", ("\\left(", "\\right)"));
                    let word = w.iter().map(|g| gen_latex(*g)).collect::<Vec<_>>().join(" ");
                    Piece { negative, body: format!("{pre}{word}") }
                })
                .collect(),
        )
    }
}

impl Printable for Tensor {
    fn canonical(&self, chart: &Chart) -> String {
        let text = |c: &ScalarExpr| c.canonical(chart);
        join(
            self.terms()
                .iter()
                .map(|((g, h), c)| {
                    let (negative, pre) = coeff_prefix(c, &text, "*", ("(", ")"));
                    Piece { negative, body: format!("{pre}tensor({}, {})", gen_text(*g), gen_text(*h)) }
                })
                .collect(),
        )
    }

    fn latex(&self, table: &SymbolTable) -> String {
        let text = |c: &ScalarExpr| c.latex(table);
        join(
            self.terms()
                .iter()
                .map(|((g, h), c)| {
                    let (negative, pre) = coeff_prefix(c, &text, " ", ("\\left(", "\\right)"));
                    Piece { negative, body: format!("{pre}{} \\otimes {}", gen_latex(*g), gen_latex(*h)) }
                })
                .collect(),
        )
    }
}

fn rational_latex(q: &Rational) -> String {
    if q.is_integer() {
        q.to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom())
    }
}

fn gen_latex(g: Gen) -> String {
    match g {
        Gen::Dt => "dt".into(),
        Gen::Dx(i) => format!("dx^{{{i}}}"),
        Gen::Xi(a, b) => format!("\\xi^{{{a}{b}}}"),
    }
}

const GREEK: &[&str] = &[
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa", "lambda", "mu", "nu", "xi",
    "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega", "Gamma", "Delta", "Theta", "Lambda", "Xi",
    "Pi", "Sigma", "Upsilon", "Phi", "Psi", "Omega",
];

pub fn name_latex(name: &str) -> String {
    if GREEK.contains(&name) {
        format!("\\{name}")
    } else if name.chars().count() == 1 {
        name.into()
    } else if let Some((head, tail)) = name.split_once('_') {
        format!("{}_{{{}}}", name_latex(head), tail)
    } else {
        format!("\\mathrm{{{name}}}")
    }
}

fn sym_latex(s: &SymAtom, table: &SymbolTable) -> String {
    let mut out = name_latex(s.name());
    if !s.indices().is_empty() {
        let slots: Vec<Variance> = match table.get(s.name()) {
            Ok(d) => d.slots.clone(),
            Err(_) => vec![Variance::Lower; s.indices().len()],
        };
        let mut k = 0;
        let mut first = true;
        while k < slots.len() {
            let v = slots[k];
            let mut run = String::new();
            while k < slots.len() && slots[k] == v {
                run.push_str(&s.indices()[k].to_string());
                k += 1;
            }
            if !first {
                out.push_str("{}");
            }
            first = false;
            let mark = if v == Variance::Upper { '^' } else { '_' };
            out.push_str(&format!("{mark}{{{run}}}"));
        }
    }
    for &d in s.derivs().iter().rev() {
        let i = if d == T { "t".to_string() } else { d.to_string() };
        out = format!("\\partial_{i} {out}");
    }
    out
}

fn atom_latex(a: &Atom, table: &SymbolTable) -> (String, bool) {
    match a {
        Atom::Coord(i) if *i == T => (table.chart().time_name().into(), false),
        Atom::Coord(i) => (format!("{}^{{{i}}}", table.chart().space_name()), true),
        Atom::Sym(s) => (sym_latex(s, table), !s.derivs().is_empty() || !s.indices().is_empty()),
    }
}

fn monomial_latex(m: &Monomial, table: &SymbolTable) -> String {
    m.factors()
        .iter()
        .map(|(a, e)| {
            let (t, compound) = atom_latex(a, table);
            match (*e, compound) {
                (1, _) => t,
                (e, true) => format!("\\left({t}\\right)^{{{e}}}"),
                (e, false) => format!("{t}^{{{e}}}"),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}
