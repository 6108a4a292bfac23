//! Universal differential envelope on a finite point set: an `r`-form is a
//! function on `S^{r+1}`.

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalForm {
    degree: usize,
    points: usize,
    values: Vec<Rational>,
}

impl UniversalForm {
    pub fn zero(degree: usize, points: usize) -> Self {
        let len = points.pow(degree as u32 + 1);
        UniversalForm { degree, points, values: vec![Rational::zero(); len] }
    }

    pub fn from_fn(degree: usize, points: usize, f: impl Fn(&[usize]) -> Rational) -> Self {
        let mut u = Self::zero(degree, points);
        let mut idx = vec![0; degree + 1];
        for k in 0..u.values.len() {
            u.decode(k, &mut idx);
            u.values[k] = f(&idx);
        }
        u
    }

    /// The constant zero-form `1`.
    pub fn one(points: usize) -> Self {
        Self::from_fn(0, points, |_| Rational::one())
    }

    pub fn random(degree: usize, points: usize, rng: &mut impl Rng, bound: i64) -> Self {
        let mut u = Self::zero(degree, points);
        for v in &mut u.values {
            *v = Rational::new(rng.random_range(-bound..=bound).into(), rng.random_range(1..=bound).into());
        }
        u
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    fn encode(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    fn decode(&self, mut k: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = k % self.points;
            k /= self.points;
        }
    }

    pub fn get(&self, idx: &[usize]) -> &Rational {
        debug_assert_eq!(idx.len(), self.degree + 1);
        &self.values[self.encode(idx)]
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.degree != o.degree || self.points != o.points {
            return Err(Error::Invalid("universal forms of different shape".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(UniversalForm { values: self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect(), ..self.clone() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(UniversalForm { values: self.values.iter().zip(&o.values).map(|(a, b)| a - b).collect(), ..self.clone() })
    }

    pub fn scale(&self, q: &Rational) -> Self {
        UniversalForm { values: self.values.iter().map(|v| v * q).collect(), ..self.clone() }
    }
}

/// `(d_uφ)(x₀,…,x_{r+1}) = Σ_k (−1)^k φ(x₀,…,x̂_k,…,x_{r+1})`.
pub fn u_d(phi: &UniversalForm) -> UniversalForm {
    let r = phi.degree;
    UniversalForm::from_fn(r + 1, phi.points, |x| {
        let mut acc = Rational::zero();
        let mut face = Vec::with_capacity(r + 1);
        for k in 0..=r + 1 {
            face.clear();
            face.extend(x.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, v)| *v));
            let v = phi.get(&face);
            if k % 2 == 0 {
                acc += v;
            } else {
                acc -= v;
            }
        }
        acc
    })
}

/// `(φψ)(x₀,…,x_{r+s}) = φ(x₀,…,x_r)ψ(x_r,…,x_{r+s})`.
pub fn u_mul(phi: &UniversalForm, psi: &UniversalForm) -> Result<UniversalForm> {
    if phi.points != psi.points {
        return Err(Error::Invalid("universal forms over different point sets".into()));
    }
    let r = phi.degree;
    Ok(UniversalForm::from_fn(r + psi.degree, phi.points, |x| phi.get(&x[..=r]) * psi.get(&x[r..])))
}

/// `(α•_uβ)(x,y) = −α(x,y)β(x,y)`.
pub fn u_bullet(a: &UniversalForm, b: &UniversalForm) -> Result<UniversalForm> {
    if a.degree != 1 || b.degree != 1 {
        return Err(Error::Invalid(format!("bullet needs two 1-forms, got degrees {} and {}", a.degree, b.degree)));
    }
    a.same_shape(b)?;
    Ok(UniversalForm { values: a.values.iter().zip(&b.values).map(|(x, y)| -(x * y)).collect(), ..a.clone() })
}

/// Graded Leibniz defect `d(φψ) − (dφ)ψ − (−1)^r φ(dψ)`.
pub fn leibniz_defect(phi: &UniversalForm, psi: &UniversalForm) -> Result<UniversalForm> {
    let lhs = u_d(&u_mul(phi, psi)?);
    let a = u_mul(&u_d(phi), psi)?;
    let b = u_mul(phi, &u_d(psi))?;
    let b = if phi.degree.is_multiple_of(2) { b } else { b.scale(&int(-1)) };
    lhs.sub(&a)?.sub(&b)
}

/// Defect of `(d_uf)•_uα = fα − αf`.
pub fn commutator_defect(f: &UniversalForm, a: &UniversalForm) -> Result<UniversalForm> {
    let lhs = u_bullet(&u_d(f), a)?;
    let rhs = u_mul(f, a)?.sub(&u_mul(a, f)?)?;
    lhs.sub(&rhs)
}

/// Outcome of comparing a left-associated k-fold bullet of exact forms with
/// the plain product of increments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignReport {
    pub k: usize,
    /// `Some(s)` when the bullet equals `s·Δf₁⋯Δf_k` at every point pair.
    pub sign: Option<i64>,
    /// Point pairs where the bullet product is nonzero.
    pub nonzero_pairs: usize,
}

impl SignReport {
    /// Whether the increment product appears without a sign factor.
    pub fn matches_unsigned(&self) -> bool {
        self.sign == Some(1)
    }
}

/// `d_uf₁ •_u ⋯ •_u d_uf_k`, left-associated, against `Δf₁⋯Δf_k`.
pub fn k_fold_bullet_sign(fs: &[UniversalForm]) -> Result<SignReport> {
    let k = fs.len();
    if k < 2 || fs.iter().any(|f| f.degree != 0) {
        return Err(Error::Invalid("k-fold bullet needs at least two zero-forms".into()));
    }
    let mut acc = u_d(&fs[0]);
    for f in &fs[1..] {
        acc = u_bullet(&acc, &u_d(f))?;
    }
    let n = fs[0].points;
    let mut plus = true;
    let mut minus = true;
    let mut nonzero = 0;
    for a in 0..n {
        for b in 0..n {
            let prod: Rational = fs.iter().map(|f| f.get(&[b]) - f.get(&[a])).product();
            let v = acc.get(&[a, b]);
            if !v.is_zero() {
                nonzero += 1;
            }
            plus &= *v == prod;
            minus &= *v == -prod.clone();
        }
    }
    let sign = match (plus, minus, nonzero) {
        (_, _, 0) => None,
        (true, false, _) => Some(1),
        (false, true, _) => Some(-1),
        _ => None,
    };
    Ok(SignReport { k, sign, nonzero_pairs: nonzero })
}
