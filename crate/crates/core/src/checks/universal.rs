use super::calculus::stream;
use super::{run, Check, Outcome};
use crate::error::{Error, Result};
use crate::universal::{commutator_defect, k_fold_bullet_sign, leibniz_defect, u_bullet, u_d, UniversalForm};

const SAMPLES: usize = 20;
const BOUND: i64 = 6;

/// Count of nonzero forms among `items`, as a pass when there are none.
fn all_vanish(items: impl IntoIterator<Item = Result<UniversalForm>>) -> Result<Outcome> {
    let (mut total, mut bad) = (0usize, 0usize);
    for f in items {
        total += 1;
        if !f?.is_zero() {
            bad += 1;
        }
    }
    Ok(if bad == 0 && total > 0 {
        Outcome::new(true, "0")
    } else {
        Outcome::new(false, format!("{bad} of {total} nonzero"))
    })
}

/// Checks in the representation by functions on `points`-fold products of
/// a finite set.
pub fn universal(points: usize, seed: u64) -> Vec<Check> {
    let id = |name: &str| format!("universal.{name}.s{points}");
    let rand = |k: u64, deg: usize| {
        let mut r = stream(seed, k);
        (0..SAMPLES).map(|_| UniversalForm::random(deg, points, &mut r, BOUND)).collect::<Vec<_>>()
    };
    let mut out = Vec::new();

    out.push(run(id("d_squared"), "d_u² = 0", || {
        let mut all = Vec::new();
        for deg in 0..=2 {
            all.extend(rand(40 + deg as u64, deg).into_iter().map(|f| Ok(u_d(&u_d(&f)))));
        }
        all_vanish(all)
    }));

    out.push(run(id("leibniz"), "d_u(φψ) = (d_uφ)ψ + (−1)^r φ d_uψ", || {
        let mut all = Vec::new();
        for p in 0..=2usize {
            for q in 0..=2usize {
                let (a, b) = (rand(50 + 3 * p as u64 + q as u64, p), rand(60 + 3 * p as u64 + q as u64, q));
                all.extend(a.iter().zip(&b).map(|(x, y)| leibniz_defect(x, y)));
            }
        }
        all_vanish(all)
    }));

    out.push(run(id("bullet_of_differentials"), "(d_uf•d_ug)(x,y) = −(f(y)−f(x))(g(y)−g(x))", || {
        let (fs, gs) = (rand(70, 0), rand(71, 0));
        let mut all = Vec::new();
        for (f, g) in fs.iter().zip(&gs) {
            let lhs = u_bullet(&u_d(f), &u_d(g))?;
            let rhs = UniversalForm::from_fn(1, points, |x| {
                -((f.get(&[x[1]]) - f.get(&[x[0]])) * (g.get(&[x[1]]) - g.get(&[x[0]])))
            });
            all.push(lhs.sub(&rhs));
        }
        all_vanish(all)
    }));

    out.push(run(id("commutation"), "d_uf•α = fα − αf", || {
        let (fs, als) = (rand(72, 0), rand(73, 1));
        all_vanish(fs.iter().zip(&als).map(|(f, a)| commutator_defect(f, a)))
    }));

    out.push(run(
        id("k_fold_sign"),
        "d_uf₁•…•d_uf_k = s(k)Δf₁⋯Δf_k with s(2) = −1, s(3) = +1, s(4) = −1",
        || {
            let mut r = stream(seed, 74);
            let fs: Vec<UniversalForm> = (0..4).map(|_| UniversalForm::random(0, points, &mut r, BOUND)).collect();
            let mut measured = Vec::new();
            for k in 2..=4 {
                let rep = k_fold_bullet_sign(&fs[..k])?;
                let s = rep.sign.ok_or_else(|| Error::Inconsistent(format!("no uniform sign at k = {k}")))?;
                measured.push((k, s));
            }
            let ok = measured.iter().all(|&(k, s)| s == if k % 2 == 0 { -1 } else { 1 });
            let text = measured.iter().map(|(k, s)| format!("s({k})={s:+}")).collect::<Vec<_>>().join(", ");
            let even: Vec<String> = measured.iter().filter(|(_, s)| *s != 1).map(|(k, _)| k.to_string()).collect();
            let o = Outcome::new(ok, text);
            Ok(if even.is_empty() {
                o
            } else {
                o.with_note(format!("the unsigned product Δf₁⋯Δf_k is off by a sign for k = {}", even.join(", ")))
            })
        },
    ));

    out.push(run(id("unit_is_closed"), "d_u1 = 0", || {
        Ok(if u_d(&UniversalForm::one(points)).is_zero() {
            Outcome::new(true, "0")
        } else {
            Outcome::new(false, "d_u1 != 0")
        })
    }));
    out
}
