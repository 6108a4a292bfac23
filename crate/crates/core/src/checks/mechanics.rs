use std::collections::BTreeMap;

use super::{run, Check, Outcome, Residuals};
use crate::connection::riemann;
use crate::error::Result;
use crate::forms::Form;
use crate::scalar::{rat, Chart, Idx, ScalarExpr, SymAtom, SymbolDecl, SymbolTable, Variance};
use crate::symplectic::{
    fokker_planck_residual, gibbs_residuals, nabla_b, FpSubstitutions, FpSymbols, Mechanics, SymplecticData,
};

/// Symbol names used by [`standard_table`].
pub fn standard_fp_symbols() -> FpSymbols {
    FpSymbols {
        h: "H".into(),
        h0: "H0".into(),
        f: "F".into(),
        f_mu: "Fmu".into(),
        beta: "beta".into(),
        a: "a".into(),
        b: "b".into(),
        gamma: "G".into(),
    }
}

/// A table with a symbolic connection `G`, diffusion `b`, Hamiltonian `H`,
/// observable `A` and the Fokker–Planck auxiliaries. With `symbolic_omega`
/// it also holds a static antisymmetric `w` with inverse `wi`.
pub fn standard_table(dim: usize, symbolic_omega: bool) -> Result<SymbolTable> {
    use Variance::{Lower as L, Upper as U};
    let mut t = SymbolTable::new(Chart::new(dim)?);
    t.declare(SymbolDecl::new("G", &[U, L, L]).symmetric(&[1, 2]))?;
    t.declare(SymbolDecl::new("b", &[U, U]).symmetric(&[0, 1]))?;
    if symbolic_omega {
        t.declare(SymbolDecl::new("w", &[L, L]).antisymmetric(&[0, 1]).static_in_time())?;
        t.declare(SymbolDecl::new("wi", &[U, U]).antisymmetric(&[0, 1]).static_in_time())?;
        t.link_inverse("wi", "w")?;
    }
    for s in ["H", "A", "H0", "F", "beta"] {
        t.declare(SymbolDecl::scalar(s))?;
    }
    t.declare(SymbolDecl::new("Fmu", &[L]))?;
    t.declare(SymbolDecl::new("a", &[U, U]).symmetric(&[0, 1]))?;
    Ok(t)
}

/// The canonical symplectic form `ω₁₂ = ω₃₄ = … = 1` in even dimension.
pub fn darboux(chart: &Chart, h: ScalarExpr) -> Result<SymplecticData> {
    let n = chart.dim();
    let mut w = vec![vec![ScalarExpr::zero(); n]; n];
    for k in (0..n.saturating_sub(1)).step_by(2) {
        w[k][k + 1] = ScalarExpr::int(1);
        w[k + 1][k] = ScalarExpr::int(-1);
    }
    SymplecticData::explicit(chart, w, h)
}

/// Structure of the specialized torsion and of the covariant wedge basis.
pub fn structure(mech: &Mechanics<'_>, tag: &str) -> Vec<Check> {
    let conn = mech.conn();
    let c = conn.calc();
    let ito = mech.ito();
    let ch = c.chart();
    let g = mech.gamma();
    let fr = conn.frame();
    let id = |name: &str| format!("structure.{name}.{tag}");
    let th1 = |m: Idx| conn.torsion(&fr.dtilde(m));
    let th2 = |a: Idx, b: Idx| conn.torsion(&c.xi(a, b));
    let mut out = Vec::new();

    out.push(run(
        id("torsion_components"),
        "Θᵘ = ½dx^ρ dt bᵅᵝRᵘ_{αβρ} and Θᵘᵛ = dt dx^κ ∇_κbᵘᵛ after specialization",
        || {
            let mut r = Residuals::new();
            for m in ch.space() {
                let got = mech.specialize(&th1(m)?)?;
                let mut want = Form::zero(2);
                for p in ch.space() {
                    let mut k = ScalarExpr::zero();
                    for a in ch.space() {
                        for b in ch.space() {
                            k.add_product(&ito.b(a, b), &riemann(g, m, a, b, p));
                        }
                    }
                    let dxdt = ito.mul(&ito.dx(p), &ito.dt())?;
                    want = want.add(&ito.right_mul(&dxdt, &k.scale(&rat(1, 2)))?);
                }
                r.push(ch, &got.sub(&want));
            }
            for (a, b) in ch.sym_pairs() {
                let got = mech.specialize(&th2(a, b)?)?;
                let mut want = Form::zero(2);
                for k in ch.space() {
                    let dtdx = ito.mul(&ito.dt(), &ito.dx(k))?;
                    want = want.add(&ito.right_mul(&dtdx, &nabla_b(ito, g, k, a, b))?);
                }
                r.push(ch, &got.sub(&want));
            }
            Ok(r.all_zero())
        },
    ));

    out.push(run(
        id("torsion_bullets_vanish"),
        "Θᵘᵛ•Θ^{ρσ} = Θᵘᵛ•d̃x^ρ = 0 after specialization",
        || {
            let mut r = Residuals::new();
            let mut general = 0usize;
            for (m, n) in ch.sym_pairs() {
                let t = th2(m, n)?;
                let mut push = |x: Form| -> Result<()> {
                    if !x.is_zero() {
                        general += 1;
                    }
                    r.push(ch, &mech.specialize(&x)?);
                    Ok(())
                };
                for (p, q) in ch.sym_pairs() {
                    push(c.bullet(&t, &th2(p, q)?)?)?;
                }
                for p in ch.space() {
                    push(c.bullet(&t, &fr.dtilde(p))?)?;
                }
            }
            let o = r.all_zero();
            Ok(if general > 0 {
                o.with_note(format!("{general} of these products are nonzero before specialization"))
            } else {
                o
            })
        },
    ));

    out.push(run(id("wedge_with_time"), "d̃xᵘ∧dt = dxᵘdt after specialization", || {
        let mut r = Residuals::new();
        for m in ch.space() {
            let w = mech.specialize(&conn.wedge(&fr.dtilde(m), &c.dt())?)?;
            r.push(ch, &w.sub(&ito.mul(&ito.dx(m), &ito.dt())?));
        }
        Ok(r.all_zero())
    }));

    out.push(run(
        id("wedge_spatial"),
        "d̃xᵘ∧d̃xᵛ = d̃xᵘd̃xᵛ + dt dx^κ(−½∇_κbᵘᵛ + bᵛᵅΓᵘ_{κα}) after specialization",
        || {
            let mut r = Residuals::new();
            for m in ch.space() {
                for n in ch.space() {
                    let w = mech.specialize(&conn.wedge(&fr.dtilde(m), &fr.dtilde(n))?)?;
                    let mut e = ito.mul(&mech.dtilde(m)?, &mech.dtilde(n)?)?;
                    for k in ch.space() {
                        let mut v = nabla_b(ito, g, k, m, n).scale(&rat(-1, 2));
                        for a in ch.space() {
                            v.add_product(&ito.b(n, a), g.get(m, k, a));
                        }
                        e = e.add(&ito.right_mul(&ito.mul(&ito.dt(), &ito.dx(k))?, &v)?);
                    }
                    r.push(ch, &w.sub(&e));
                }
            }
            Ok(r.all_zero())
        },
    ));
    out
}

/// The evolution equation obtained from `ι_{X_H}ω = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    /// `∂_tA` in terms of `H`, `b`, `Γ` and `ω`.
    pub rhs: ScalarExpr,
    /// `∂_tA + {H,A}`: everything beyond the Hamiltonian flow.
    pub beyond_bracket: ScalarExpr,
}

/// Closedness, the Hamiltonian vector field and the evolution equation for
/// observable `a`.
pub fn derivation(
    mech: &Mechanics<'_>,
    data: &SymplecticData,
    a: &ScalarExpr,
    tag: &str,
) -> (Vec<Check>, Option<Derivation>) {
    let ito = mech.ito();
    let ch = ito.chart().clone();
    let g = mech.gamma();
    let id = |name: &str| format!("mechanics.{name}.{tag}");
    let wmu: Vec<ScalarExpr> = ch.space().map(|m| data.omega_mu(ito, g, m)).collect();
    let mut out = Vec::new();

    let closed = |w: &[ScalarExpr]| -> Result<Residuals> {
        let om = mech.omega(data, w)?;
        let mut r = Residuals::new();
        let dw = mech.closedness_residuals(&om)?;
        if dw.is_empty() {
            // dω already normalized to zero.
            r.push(&ch, &ScalarExpr::zero());
        }
        for v in dw.values() {
            r.push(&ch, &data.contract(v)?);
        }
        Ok(r)
    };

    out.push(run(id("closedness"), "dω = 0 with ω_μ = ∂_μH − ½bᵛᵖ∇_νω_{ρμ}", || {
        Ok(closed(&wmu)?.all_zero())
    }));

    let n = ch.dim() as Idx;
    out.push(run(
        id("closedness_needs_condition"),
        "adding ∂_μφ to ω_μ keeps dω = 0; adding a non-gradient term breaks it",
        || {
            if n < 2 {
                return Ok(Outcome::new(false, "needs dimension at least 2"));
            }
            let phi =
                &(&ScalarExpr::coord(1) * &ScalarExpr::coord(n)) + &(&ScalarExpr::coord(0) * &ScalarExpr::coord(1));
            let grad: Vec<ScalarExpr> = ch.space().map(|m| &wmu[m as usize - 1] + &phi.partial(m)).collect();
            let mut curl = wmu.clone();
            curl[n as usize - 1] += ScalarExpr::coord(1);
            let ok = closed(&grad)?.all_zero();
            let bad = closed(&curl)?;
            if !ok.passed {
                return Ok(Outcome::new(false, format!("gradient shift: {}", ok.residual)));
            }
            if bad.nonzero() == 0 {
                return Ok(Outcome::new(false, "non-gradient shift left dω = 0"));
            }
            Ok(Outcome::new(true, "0"))
        },
    ));

    let setup = (|| -> Result<_> {
        let om = mech.omega(data, &wmu)?;
        let x = mech.hamiltonian_vf(data, &om)?;
        Ok((om, x))
    })();
    let (om, x) = match setup {
        Ok(v) => v,
        Err(e) => {
            let msg = e.to_string();
            out.push(run(id("hamiltonian_kernel"), "ι_{X_H}ω = 0 with X_Hᵗ = 1", || Err(e)));
            out.push(run(
                id("evolution_equation"),
                "∂_tA = −{H,A} − F_μωᵘᵛ∂_νA + ½∂_μ(bᵘᵛ∂_νA) + ½bᵘᵛΓ^ρ_{ρν}∂_μA",
                || Ok(Outcome::new(false, format!("error: {msg}"))),
            ));
            return (out, None);
        }
    };

    out.push(run(id("hamiltonian_kernel"), "ι_{X_H}ω = 0 with X_Hᵗ = 1", || {
        let mut r = Residuals::new();
        for v in mech.insert_covariant_components(&x, &om)?.values() {
            r.push(&ch, &data.contract(v)?);
        }
        r.push(&ch, &(x.xt() - &ScalarExpr::one()));
        Ok(r.all_zero())
    }));

    let mut deriv = None;
    out.push(run(
        id("evolution_equation"),
        "∂_tA = −{H,A} − F_μωᵘᵛ∂_νA + ½∂_μ(bᵘᵛ∂_νA) + ½bᵘᵛΓ^ρ_{ρν}∂_μA",
        || {
            let rhs = mech.evolution_rhs(data, &x, a)?;
            let f: Vec<ScalarExpr> = ch.space().map(|m| data.f_mu(ito, g, m)).collect();
            let hand = mech.hand_rhs(data, &f, data.h(), a);
            let res = data.contract(&(&rhs - &hand))?;
            let beyond = data.contract(&(&rhs + &data.poisson(data.h(), a)))?;
            deriv = Some(Derivation { rhs, beyond_bracket: beyond });
            let mut r = Residuals::new();
            r.push(&ch, &res);
            Ok(r.all_zero())
        },
    ));
    (out, deriv)
}

/// Replace each `Γ¹_{1μ}` so that `Γ^ρ_{ρμ} = sign·β∂_μH₀`.
fn trace_substitution(table: &SymbolTable, names: &FpSymbols, sign: i64) -> Result<BTreeMap<SymAtom, ScalarExpr>> {
    let ch = table.chart();
    let beta = table.sym(&names.beta, &[])?;
    let h0 = table.sym(&names.h0, &[])?;
    let mut repl = BTreeMap::new();
    for m in ch.space() {
        let mut v = (&beta * &h0.partial(m)).scale(&rat(sign, 1));
        for r in ch.space().filter(|&r| r != 1) {
            v -= table.sym(&names.gamma, &[r, r, m])?;
        }
        if let [s] = table.sym(&names.gamma, &[1, 1, m])?.symbols().as_slice() {
            repl.insert(s.clone(), v);
        }
    }
    Ok(repl)
}

/// Match of the evolution equation with the Fokker–Planck generator and
/// the Gibbs-volume condition.
pub fn fokker_planck(
    mech: &Mechanics<'_>,
    data: &SymplecticData,
    table: &SymbolTable,
    names: &FpSymbols,
    a: &ScalarExpr,
    tag: &str,
) -> Vec<Check> {
    let ch = table.chart();
    let id = |name: &str| format!("fokker_planck.{name}.{tag}");
    let mut out = Vec::new();

    out.push(run(
        id("generator_match"),
        "with F_μ = ∂_μF, H₀ = H + F, Γ^ρ_{ρμ} = −β∂_μH₀, a = b/2: ∂_tA = −{H₀,A} + ∂_i(aⁱʲ∂_jA) − βaⁱʲ∂_jH₀∂_iA",
        || {
            let mut r = Residuals::new();
            r.push(ch, &fokker_planck_residual(mech, data, table, names, a, FpSubstitutions::ALL)?);
            Ok(r.all_zero())
        },
    ));

    out.push(run(
        id("single_mutations_fail"),
        "withholding any one matching condition leaves a nonzero residual",
        || {
            let mut r = Residuals::new();
            let mut failed = Vec::new();
            for (name, subs) in FpSubstitutions::mutations() {
                let res = fokker_planck_residual(mech, data, table, names, a, subs)?;
                if res.is_zero() {
                    failed.push(name);
                }
                r.push(ch, &res);
            }
            let o = r.all_nonzero();
            Ok(if failed.is_empty() {
                o
            } else {
                Outcome::new(false, format!("vanished without: {}", failed.join(", ")))
            })
        },
    ));

    out.push(run(
        id("gibbs_density"),
        "Γ^ρ_{ρμ} + β∂_μH₀ = 0 under the trace condition, nonzero with the opposite sign",
        || {
            let beta = table.sym(&names.beta, &[])?;
            let h0 = table.sym(&names.h0, &[])?;
            let mut ok = Residuals::new();
            let mut flipped = Residuals::new();
            for (sign, acc) in [(-1, &mut ok), (1, &mut flipped)] {
                let repl = trace_substitution(table, names, sign)?;
                let gm = mech.gamma().map(&|e| e.substitute(&|s| repl.get(s).cloned()));
                for v in gibbs_residuals(&gm, &beta, &h0) {
                    acc.push(ch, &v);
                }
            }
            let o = ok.all_zero();
            if flipped.nonzero() != flipped.total() {
                return Ok(Outcome::new(false, "opposite trace sign also satisfied the condition"));
            }
            Ok(o)
        },
    ));
    out
}
