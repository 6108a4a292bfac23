use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{run, Check, Outcome, Residuals};
use crate::error::Result;
use crate::forms::{Calculus, Form};
use crate::sample::{self, PolyShape};
use crate::scalar::{Chart, Idx, ScalarExpr, SymbolDecl, SymbolTable, T};
use crate::vector::{cubic_defect, insert, is_second_order, pair, test_scalars, VectorField};

/// Generator for the `k`-th check of a suite, independent of the others.
pub(crate) fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k);
    r
}

struct Setup {
    chart: Chart,
    calc: Calculus,
    atoms: Vec<ScalarExpr>,
}

impl Setup {
    fn new(dim: usize) -> Result<Setup> {
        let chart = Chart::new(dim)?;
        let mut table = SymbolTable::new(chart.clone());
        table.declare(SymbolDecl::scalar("u"))?;
        let atoms = vec![table.s("u", &[])];
        Ok(Setup { calc: Calculus::general(chart.clone()), chart, atoms })
    }

    fn poly(&self, rng: &mut ChaCha8Rng, shape: PolyShape) -> ScalarExpr {
        sample::poly(rng, &self.chart, &self.atoms, shape)
    }

    fn one_form(&self, rng: &mut ChaCha8Rng) -> Form {
        sample::one_form(rng, &self.calc, &self.atoms, PolyShape::SMALL)
    }

    fn field(&self, rng: &mut ChaCha8Rng) -> VectorField {
        sample::vector_field(rng, &self.chart, &self.atoms, PolyShape::SMALL)
    }
}

/// Exact identities of the quotient calculus at dimension `dim`.
pub fn core_calculus(dim: usize, instances: usize, seed: u64) -> Result<Vec<Check>> {
    let s = Setup::new(dim)?;
    let (ch, c) = (&s.chart, &s.calc);
    let id = |name: &str| format!("calculus.{name}.n{dim}");
    let mut out = Vec::new();

    out.push(run(id("d_squared"), "d(d f) = 0 and d(d α) = 0", || {
        let mut rng = stream(seed, 1);
        let mut r = Residuals::new();
        for _ in 0..instances {
            let f = s.poly(&mut rng, PolyShape::MEDIUM);
            r.push(ch, &c.d(&c.d_scalar(&f))?);
            let a = s.one_form(&mut rng);
            r.push(ch, &c.d(&c.d(&a)?)?);
        }
        Ok(r.all_zero())
    }));

    out.push(run(id("leibniz"), "d(fg) = (df)g + (dg)f + df•dg", || {
        let mut rng = stream(seed, 2);
        let mut r = Residuals::new();
        for _ in 0..instances {
            let (f, g) = (s.poly(&mut rng, PolyShape::MEDIUM), s.poly(&mut rng, PolyShape::MEDIUM));
            let (df, dg) = (c.d_scalar(&f), c.d_scalar(&g));
            let rhs = c.right_mul(&df, &g)?.add(&c.right_mul(&dg, &f)?).add(&c.bullet(&df, &dg)?);
            r.push(ch, &c.d_scalar(&(&f * &g)).sub(&rhs));
        }
        Ok(r.all_zero())
    }));

    out.push(run(id("graded_leibniz"), "d(fα) = df α + f dα and d(αβ) = dα β − α dβ", || {
        let mut rng = stream(seed, 3);
        let mut r = Residuals::new();
        for _ in 0..instances {
            let f = s.poly(&mut rng, PolyShape::SMALL);
            let (a, b) = (s.one_form(&mut rng), s.one_form(&mut rng));
            let lhs = c.d(&a.left_mul(&f))?;
            r.push(ch, &lhs.sub(&c.mul(&c.d_scalar(&f), &a)?).sub(&c.d(&a)?.left_mul(&f)));
            let lhs = c.d(&c.mul(&a, &b)?)?;
            r.push(ch, &lhs.sub(&c.mul(&c.d(&a)?, &b)?).add(&c.mul(&a, &c.d(&b)?)?));
        }
        Ok(r.all_zero())
    }));

    out.push(run(id("associativity"), "(αβ)γ = α(βγ) and (αf)β = α(fβ)", || {
        let mut rng = stream(seed, 4);
        let mut r = Residuals::new();
        for _ in 0..instances {
            let f = s.poly(&mut rng, PolyShape::SMALL);
            let (a, b, g) = (s.one_form(&mut rng), s.one_form(&mut rng), s.one_form(&mut rng));
            r.push(ch, &c.mul(&c.mul(&a, &b)?, &g)?.sub(&c.mul(&a, &c.mul(&b, &g)?)?));
            r.push(ch, &c.mul(&c.right_mul(&a, &f)?, &b)?.sub(&c.mul(&a, &b.left_mul(&f))?));
        }
        Ok(r.all_zero())
    }));

    out.push(run(id("bullet_relations"), "dt•df = 0, df•dg•dh = 0, α•β = β•α", || {
        let mut rng = stream(seed, 5);
        let mut r = Residuals::new();
        for _ in 0..instances {
            let (f, g, h) = (
                s.poly(&mut rng, PolyShape::MEDIUM),
                s.poly(&mut rng, PolyShape::MEDIUM),
                s.poly(&mut rng, PolyShape::MEDIUM),
            );
            let (df, dg, dh) = (c.d_scalar(&f), c.d_scalar(&g), c.d_scalar(&h));
            r.push(ch, &c.bullet(&c.dt(), &df)?);
            r.push(ch, &c.bullet(&c.bullet(&df, &dg)?, &dh)?);
            r.push(ch, &c.bullet(&df, &c.bullet(&dg, &dh)?)?);
            let (a, b) = (s.one_form(&mut rng), s.one_form(&mut rng));
            r.push(ch, &c.bullet(&a, &b)?.sub(&c.bullet(&b, &a)?));
        }
        Ok(r.all_zero())
    }));

    out.push(run(id("commutation"), "[f, α] = df•α, checked directly and through the pairing", || {
        let mut rng = stream(seed, 6);
        let mut r = Residuals::new();
        for _ in 0..instances {
            let f = s.poly(&mut rng, PolyShape::MEDIUM);
            let a = s.one_form(&mut rng);
            r.push(ch, &c.commutator(&f, &a)?.sub(&c.bullet(&c.d_scalar(&f), &a)?));
            r.push(ch, &c.commutator(&f, &c.dt())?);
            // ⟨X, dxᵘf − f dxᵘ⟩ = −Σ_ρ X^{ρμ}∂_ρf
            let x = s.field(&mut rng);
            for m in ch.space() {
                let lhs = pair(c, &x, &c.right_mul(&c.dx(m), &f)?.sub(&c.dx(m).left_mul(&f)))?;
                let rhs: ScalarExpr = ch.space().map(|p| -(x.xmn(p, m) * &f.partial(p))).sum();
                r.push(ch, &(&lhs - &rhs));
            }
        }
        Ok(r.all_zero())
    }));

    out.push(run(
        id("relations_absorb_scalars"),
        "f·r = r·f = 0 for every relation r; normal form is idempotent",
        || {
            let mut rng = stream(seed, 7);
            let mut r = Residuals::new();
            let rows = c.relation_rows(2);
            for k in 0..instances.max(1) {
                let f = s.poly(&mut rng, PolyShape::SMALL);
                for row in rows.iter().skip(k % 3).step_by(3) {
                    let rel = Form::from_terms(2, row.clone());
                    r.push(ch, &c.normal_form(2, rel.left_mul(&f).terms().clone())?);
                    r.push(ch, &c.right_mul(&rel, &f)?);
                }
                let (a, b) = (s.one_form(&mut rng), s.one_form(&mut rng));
                let p = c.mul(&a, &b)?;
                r.push(ch, &c.normal_form(2, p.terms().clone())?.sub(&p));
            }
            Ok(r.all_zero())
        },
    ));

    out.push(run(id("basis_size"), "degree-1 basis has 1 + N + N(N+1)/2 words; dt dt is absent", || {
        let b1 = c.basis(1)?;
        let want = 1 + dim + dim * (dim + 1) / 2;
        let b2 = c.basis(2)?;
        let dtdt = b2.iter().any(|w| w.len() == 2 && w[0] == crate::forms::Gen::Dt && w[1] == crate::forms::Gen::Dt);
        let ok = b1.len() == want && !dtdt && c.mul(&c.dt(), &c.dt())?.is_zero();
        Ok(Outcome::new(ok, format!("{} degree-1 words, {} degree-2 words", b1.len(), b2.len())))
    }));
    Ok(out)
}

/// Second-order vector fields, their pairing with 1-forms and insertion.
pub fn vector_fields(dim: usize, instances: usize, seed: u64) -> Result<Vec<Check>> {
    let s = Setup::new(dim)?;
    let (ch, c) = (&s.chart, &s.calc);
    let id = |name: &str| format!("vector.{name}.n{dim}");
    let mut out = Vec::new();

    let triple = |op: &dyn Fn(&ScalarExpr) -> ScalarExpr, f: &ScalarExpr, g: &ScalarExpr, h: &ScalarExpr| {
        let mut v = op(&(&(f * g) * h));
        v -= &(f * &op(&(g * h)));
        v -= &(g * &op(&(f * h)));
        v -= &(h * &op(&(f * g)));
        v += &(&(f * g) * &op(h));
        v += &(&(f * h) * &op(g));
        v += &(&(g * h) * &op(f));
        v
    };

    out.push(run(id("triple_rule"), "X(fgh) − fX(gh) − gX(fh) − hX(fg) + fgX(h) + fhX(g) + ghX(f) = 0", || {
        let mut rng = stream(seed, 11);
        let mut r = Residuals::new();
        for _ in 0..instances {
            let x = s.field(&mut rng);
            let fs: Vec<ScalarExpr> = (0..3).map(|_| s.poly(&mut rng, PolyShape::SMALL)).collect();
            r.push(ch, &triple(&|e| x.apply(e), &fs[0], &fs[1], &fs[2]));
        }
        Ok(r.all_zero())
    }));

    out.push(run(id("cubic_rule"), "X(f³) = 3fX(f²) − 3f²X(f) on a generating family", || {
        let mut rng = stream(seed, 12);
        let family = test_scalars(ch, 8, &mut rng);
        let mut ok = is_second_order(&|e| e.partial(1), &family);
        for _ in 0..instances.div_ceil(10) {
            let x = s.field(&mut rng);
            ok &= is_second_order(&|e| x.apply(e), &family);
        }
        Ok(Outcome::new(ok, if ok { "0" } else { "nonzero" }))
    }));

    out.push(run(id("third_order_rejected"), "∂₁∂₁∂₁ violates both characterizations", || {
        let op = |e: &ScalarExpr| e.partial(1).partial(1).partial(1);
        let x1 = ScalarExpr::coord(1);
        let mut r = Residuals::new();
        r.push(ch, &cubic_defect(&op, &x1));
        r.push(ch, &triple(&op, &x1, &x1, &x1));
        let mut rng = stream(seed, 13);
        let rejected = !is_second_order(&op, &test_scalars(ch, 0, &mut rng));
        let o = r.all_nonzero();
        Ok(Outcome::new(o.passed && rejected, o.residual))
    }));

    out.push(run(id("time_rule"), "X(tf) = tX(f) + fX(t)", || {
        let mut rng = stream(seed, 14);
        let t = ScalarExpr::coord(T);
        let mut r = Residuals::new();
        for _ in 0..instances {
            let x = s.field(&mut rng);
            let f = s.poly(&mut rng, PolyShape::MEDIUM);
            r.push(ch, &(&(&x.apply(&(&t * &f)) - &(&t * &x.apply(&f))) - &(&f * &x.apply(&t))));
        }
        Ok(r.all_zero())
    }));

    out.push(run(id("pairing_matches_action"), "⟨X, df⟩ = X(f)", || {
        let mut rng = stream(seed, 15);
        let mut r = Residuals::new();
        for _ in 0..instances.max(100) {
            let x = s.field(&mut rng);
            let f = s.poly(&mut rng, PolyShape::MEDIUM);
            r.push(ch, &(&pair(c, &x, &c.d_scalar(&f))? - &x.apply(&f)));
        }
        Ok(r.all_zero())
    }));

    out.push(run(id("basis_pairing"), "⟨∂_t, dt⟩ = 1 and ⟨∂_μ∂_ν, ξ^{ρσ}⟩ = δδ + δδ", || {
        let mut r = Residuals::new();
        r.push(ch, &(&pair(c, &VectorField::dt(ch), &c.dt())? - &ScalarExpr::one()));
        let d = |a: Idx, b: Idx| if a == b { 1 } else { 0 };
        for (m, n) in ch.sym_pairs() {
            for (p, q) in ch.sym_pairs() {
                let got = pair(c, &VectorField::second(ch, m, n), &c.xi(p, q))?;
                let want = ScalarExpr::int(d(m, p) * d(n, q) + d(n, p) * d(m, q));
                r.push(ch, &(&got - &want));
            }
        }
        Ok(r.all_zero())
    }));

    out.push(run(
        id("bimodule_laws"),
        "⟨fXh, α⟩ = f⟨X, hα⟩, (fX)(g) = fX(g), (Xf)(g) = X(fg) − X(f)g",
        || {
            let mut rng = stream(seed, 16);
            let mut r = Residuals::new();
            for _ in 0..instances {
                let x = s.field(&mut rng);
                let (f, h, g) = (
                    s.poly(&mut rng, PolyShape::SMALL),
                    s.poly(&mut rng, PolyShape::SMALL),
                    s.poly(&mut rng, PolyShape::SMALL),
                );
                let a = s.one_form(&mut rng);
                let fxh = x.left_mul(&f).right_mul(c, &h)?;
                r.push(ch, &(&pair(c, &fxh, &a)? - &(&f * &pair(c, &x, &a.left_mul(&h))?)));
                r.push(ch, &(&x.left_mul(&f).apply(&g) - &(&f * &x.apply(&g))));
                let xf = x.right_mul(c, &f)?;
                r.push(ch, &(&xf.apply(&g) - &(&x.apply(&(&f * &g)) - &(&x.apply(&f) * &g))));
            }
            Ok(r.all_zero())
        },
    ));

    out.push(run(id("insertion"), "ι_X annihilates every relation and is left-linear in X", || {
        let mut rng = stream(seed, 17);
        let mut r = Residuals::new();
        let rows = c.relation_rows(2);
        for _ in 0..instances.div_ceil(5) {
            let x = s.field(&mut rng);
            for row in &rows {
                r.push(ch, &insert(c, &x, &Form::from_terms(2, row.clone()))?);
            }
            let f = s.poly(&mut rng, PolyShape::SMALL);
            let w = c.mul(&s.one_form(&mut rng), &s.one_form(&mut rng))?;
            r.push(ch, &insert(c, &x.left_mul(&f), &w)?.sub(&insert(c, &x, &w)?.left_mul(&f)));
        }
        // ι_{∂_t}(dt dx¹) = dx¹ in the flat frame.
        let w = c.mul(&c.dt(), &c.dx(1))?;
        r.push(ch, &insert(c, &VectorField::dt(ch), &w)?.sub(&c.dx(1)));
        Ok(r.all_zero())
    }));
    Ok(out)
}
