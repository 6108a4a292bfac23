//! Seeded random instances for property checks.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::connection::Gamma;
use crate::forms::{Calculus, Form};
use crate::scalar::{rat, Chart, Idx, Rational, ScalarExpr, SymbolTable};
use crate::vector::VectorField;

/// Shape limits for random polynomials.
#[derive(Clone, Copy, Debug)]
pub struct PolyShape {
    pub max_terms: usize,
    pub max_degree: usize,
    pub coeff_bound: i64,
}

impl PolyShape {
    pub const SMALL: PolyShape = PolyShape { max_terms: 3, max_degree: 2, coeff_bound: 3 };
    pub const MEDIUM: PolyShape = PolyShape { max_terms: 4, max_degree: 3, coeff_bound: 5 };
}

/// Random polynomial over the coordinates (time included) and `atoms`.
pub fn poly(rng: &mut impl Rng, chart: &Chart, atoms: &[ScalarExpr], shape: PolyShape) -> ScalarExpr {
    let mut pool: Vec<ScalarExpr> = chart.all().map(ScalarExpr::coord).collect();
    pool.extend(atoms.iter().cloned());
    let mut p = ScalarExpr::zero();
    for _ in 0..rng.random_range(1..=shape.max_terms) {
        let mut c = 0;
        while c == 0 {
            c = rng.random_range(-shape.coeff_bound..=shape.coeff_bound);
        }
        let mut m = ScalarExpr::int(c);
        for _ in 0..rng.random_range(0..=shape.max_degree) {
            m = &m * pool.choose(rng).expect("non-empty pool");
        }
        p += m;
    }
    p
}

/// Every scalar atom of the table, instantiated at all index tuples.
pub fn table_atoms(table: &SymbolTable) -> Vec<ScalarExpr> {
    let n = table.dim() as Idx;
    let mut out = Vec::new();
    for d in table.decls() {
        let mut tuples: Vec<Vec<Idx>> = vec![Vec::new()];
        for _ in 0..d.arity() {
            tuples = tuples.into_iter().flat_map(|t| (1..=n).map(move |i| [t.clone(), vec![i]].concat())).collect();
        }
        for t in tuples {
            let e = table.s(&d.name, &t);
            if !e.is_zero() && !out.contains(&e) && !out.contains(&-&e) {
                out.push(e);
            }
        }
    }
    out
}

/// Random 1-form with coefficients on every generator of the calculus.
pub fn one_form(rng: &mut impl Rng, calc: &Calculus, atoms: &[ScalarExpr], shape: PolyShape) -> Form {
    let mut f = Form::zero(1);
    for g in calc.generators() {
        if rng.random_bool(0.7) {
            f.add_assign_scaled(&calc.gen(g), &poly(rng, calc.chart(), atoms, shape));
        }
    }
    f
}

/// Random symmetric connection coefficients.
pub fn gamma(rng: &mut impl Rng, chart: &Chart, atoms: &[ScalarExpr], shape: PolyShape) -> Gamma {
    let mut comps = std::collections::BTreeMap::new();
    for m in chart.space() {
        for (a, b) in chart.sym_pairs() {
            let v = if rng.random_bool(0.6) { poly(rng, chart, atoms, shape) } else { ScalarExpr::zero() };
            comps.insert((m, a, b), v);
        }
    }
    let get = |m: Idx, a: Idx, b: Idx| comps[&(m, a.min(b), a.max(b))].clone();
    Gamma::from_fn(chart, &get).expect("symmetric by construction")
}

/// Random second-order vector field.
pub fn vector_field(rng: &mut impl Rng, chart: &Chart, atoms: &[ScalarExpr], shape: PolyShape) -> VectorField {
    let mut v = VectorField::zero(chart);
    v.set_t(poly(rng, chart, atoms, shape));
    for m in chart.space() {
        v.set_x(m, poly(rng, chart, atoms, shape));
    }
    for (a, b) in chart.sym_pairs() {
        v.set_xx(a, b, poly(rng, chart, atoms, shape));
    }
    v
}

pub fn rational(rng: &mut impl Rng, bound: i64) -> Rational {
    rat(rng.random_range(-bound..=bound), rng.random_range(1..=bound.max(1)))
}
