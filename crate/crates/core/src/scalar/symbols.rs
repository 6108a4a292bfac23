use std::collections::BTreeMap;

use super::chart::{Chart, Idx};
use super::expr::{Atom, ScalarExpr, SymAtom};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    Upper,
    Lower,
}

/// A permutation symmetry acting on a group of index slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SlotSymmetry {
    Symmetric(Vec<usize>),
    Antisymmetric(Vec<usize>),
}

impl SlotSymmetry {
    fn slots(&self) -> &[usize] {
        match self {
            SlotSymmetry::Symmetric(s) | SlotSymmetry::Antisymmetric(s) => s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolDecl {
    pub name: String,
    pub slots: Vec<Variance>,
    pub symmetries: Vec<SlotSymmetry>,
    /// `false` for functions of the spatial coordinates only.
    pub time_dependent: bool,
    pub inverse: Option<String>,
}

impl SymbolDecl {
    pub fn new(name: &str, slots: &[Variance]) -> Self {
        Self { name: name.into(), slots: slots.to_vec(), symmetries: Vec::new(), time_dependent: true, inverse: None }
    }

    pub fn scalar(name: &str) -> Self {
        Self::new(name, &[])
    }

    pub fn symmetric(mut self, slots: &[usize]) -> Self {
        self.symmetries.push(SlotSymmetry::Symmetric(slots.to_vec()));
        self
    }

    pub fn antisymmetric(mut self, slots: &[usize]) -> Self {
        self.symmetries.push(SlotSymmetry::Antisymmetric(slots.to_vec()));
        self
    }

    pub fn static_in_time(mut self) -> Self {
        self.time_dependent = false;
        self
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }
}

const RESERVED: &[&str] = &["d", "D", "dt", "dx", "xi", "bullet", "wedge", "tensor", "delta"];

/// Declared symbols over a chart. Symbol instances are built through the
/// table so that declared index symmetries are applied on construction.
#[derive(Clone, Debug)]
pub struct SymbolTable {
    chart: Chart,
    decls: BTreeMap<String, SymbolDecl>,
}

impl SymbolTable {
    pub fn new(chart: Chart) -> Self {
        Self { chart, decls: BTreeMap::new() }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn declare(&mut self, decl: SymbolDecl) -> Result<()> {
        let name = &decl.name;
        let valid_ident = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid_ident || RESERVED.contains(&name.as_str()) {
            return Err(Error::Declaration(format!("`{name}` is not a usable symbol name")));
        }
        if name == self.chart.time_name() || name == self.chart.space_name() {
            return Err(Error::Declaration(format!("`{name}` clashes with a coordinate name")));
        }
        if self.decls.contains_key(name) {
            return Err(Error::Declaration(format!("`{name}` declared twice")));
        }
        let mut used = vec![false; decl.arity()];
        for s in &decl.symmetries {
            if s.slots().len() < 2 {
                return Err(Error::Declaration(format!("`{name}`: symmetry group needs two slots")));
            }
            for &k in s.slots() {
                if k >= decl.arity() || used[k] {
                    return Err(Error::Declaration(format!("`{name}`: bad symmetry slot {k}")));
                }
                used[k] = true;
            }
            let v0 = decl.slots[s.slots()[0]];
            if s.slots().iter().any(|&k| decl.slots[k] != v0) {
                return Err(Error::Declaration(format!("`{name}`: symmetry mixes variances")));
            }
        }
        if decl.inverse.is_some() {
            return Err(Error::Declaration("inverse partners are linked with link_inverse".into()));
        }
        self.decls.insert(name.clone(), decl);
        Ok(())
    }

    /// Declare `upper` and `lower` as mutually inverse rank-2 symbols,
    /// `upper^{aρ} lower_{bρ} = δ^a_b`.
    pub fn link_inverse(&mut self, upper: &str, lower: &str) -> Result<()> {
        let u = self.get(upper)?.clone();
        let l = self.get(lower)?.clone();
        if u.arity() != 2 || l.arity() != 2 {
            return Err(Error::Declaration("inverse partners must have two index slots".into()));
        }
        if u.slots[1] == l.slots[1] || u.slots[0] == l.slots[0] {
            return Err(Error::Variance(format!("`{upper}` and `{lower}` share a slot variance")));
        }
        if u.inverse.is_some() || l.inverse.is_some() {
            return Err(Error::Declaration("symbol already has an inverse partner".into()));
        }
        self.decls.get_mut(upper).expect("checked").inverse = Some(lower.into());
        self.decls.get_mut(lower).expect("checked").inverse = Some(upper.into());
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&SymbolDecl> {
        self.decls.get(name).ok_or_else(|| Error::UnknownSymbol(name.into()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.decls.contains_key(name)
    }

    pub fn decls(&self) -> impl Iterator<Item = &SymbolDecl> {
        self.decls.values()
    }

    pub fn coord(&self, i: Idx) -> Result<ScalarExpr> {
        self.chart.check(i)?;
        Ok(ScalarExpr::coord(i))
    }

    /// A symbol instance with spatial indices, canonicalized under its
    /// declared symmetries (possibly zero or negated).
    pub fn sym(&self, name: &str, indices: &[Idx]) -> Result<ScalarExpr> {
        let decl = self.get(name)?;
        if indices.len() != decl.arity() {
            return Err(Error::Arity { name: name.into(), expected: decl.arity(), got: indices.len() });
        }
        for &i in indices {
            self.chart.check_spatial(i)?;
        }
        Ok(match canonical_indices(decl, indices) {
            None => ScalarExpr::zero(),
            Some((idx, negate)) => {
                let e = ScalarExpr::atom(SymAtom::new(name, &idx, !decl.time_dependent));
                if negate {
                    -e
                } else {
                    e
                }
            }
        })
    }

    /// Shorthand that panics on invalid input; for internal construction
    /// where names and indices are known to be valid.
    pub fn s(&self, name: &str, indices: &[Idx]) -> ScalarExpr {
        self.sym(name, indices).unwrap_or_else(|e| panic!("symbol {name}{indices:?}: {e}"))
    }

    /// Replace inverse-partner contractions `Σ_ρ U^{aρ} L_{bρ}` by `δ^a_b`.
    /// Concrete-index deltas are already evaluated on construction.
    pub fn contract_delta(&self, e: &ScalarExpr) -> Result<ScalarExpr> {
        let links: Vec<(String, String)> = self
            .decls
            .values()
            .filter_map(|d| d.inverse.as_ref().map(|l| (d.name.clone(), l.clone())))
            .filter(|(u, _)| self.decls[u].slots[1] == super::Variance::Upper)
            .collect();
        let mut cur = e.clone();
        for (u, l) in &links {
            cur = self.contract_pair(&cur, u, l)?;
        }
        Ok(cur)
    }

    /// Contract the second slot of `upper` against the second slot of
    /// `lower` wherever the full index sum occurs. The two symbols must be
    /// declared inverse partners with opposite slot variances.
    pub fn contract_pair(&self, e: &ScalarExpr, upper: &str, lower: &str) -> Result<ScalarExpr> {
        let (du, dl) = (self.get(upper)?, self.get(lower)?);
        if du.arity() != 2 || dl.arity() != 2 || du.slots[1] == dl.slots[1] {
            return Err(Error::Variance(format!("`{upper}` against `{lower}`")));
        }
        if du.inverse.as_deref() != Some(lower) {
            return Err(Error::Declaration(format!("`{upper}` and `{lower}` are not inverse partners")));
        }
        let mut cur = e.clone();
        while let Some(next) = self.contract_once(&cur, upper, lower)? {
            cur = next;
        }
        Ok(cur)
    }

    fn contract_once(&self, e: &ScalarExpr, u: &str, l: &str) -> Result<Option<ScalarExpr>> {
        let n = self.dim() as Idx;
        for (m, c) in e.terms() {
            let us: Vec<&SymAtom> = atoms_named(m, u);
            let ls: Vec<&SymAtom> = atoms_named(m, l);
            for ua in &us {
                for la in &ls {
                    for (a, rho, su) in self.candidates(u, ua)? {
                        for (b, rho2, sl) in self.candidates(l, la)? {
                            if rho != rho2 {
                                continue;
                            }
                            let rest = m
                                .without(&Atom::Sym((*ua).clone()))
                                .and_then(|r| r.without(&Atom::Sym((*la).clone())))
                                .expect("factors divide");
                            let mut scale = c.clone();
                            if su {
                                scale = -scale;
                            }
                            if sl {
                                scale = -scale;
                            }
                            let base = ScalarExpr::from_term(rest, scale);
                            let mut family = ScalarExpr::zero();
                            for r in 1..=n {
                                family += &self.s(u, &[a, r]) * &self.s(l, &[b, r]);
                            }
                            let candidate = &family * &base;
                            let present = candidate.terms().all(|(cm, cq)| e.raw_terms().get(cm) == Some(cq));
                            if present && !candidate.is_zero() {
                                let mut next = e - &candidate;
                                if a == b {
                                    next += &base;
                                }
                                return Ok(Some(next));
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// Ways to read a stored atom as `±name[a, ρ]`; the flag is `true` for
    /// a minus sign.
    fn candidates(&self, name: &str, atom: &SymAtom) -> Result<Vec<(Idx, Idx, bool)>> {
        if !atom.derivs().is_empty() {
            return Ok(Vec::new());
        }
        let (i, j) = (atom.indices()[0], atom.indices()[1]);
        let mut out = Vec::new();
        for (a, rho) in [(i, j), (j, i)] {
            let e = self.sym(name, &[a, rho])?;
            let me = ScalarExpr::atom(atom.clone());
            if e == me {
                out.push((a, rho, false));
            } else if e == -&me {
                out.push((a, rho, true));
            }
        }
        out.dedup();
        Ok(out)
    }
}

fn atoms_named<'a>(m: &'a super::expr::Monomial, name: &str) -> Vec<&'a SymAtom> {
    m.factors()
        .iter()
        .filter_map(|(a, _)| match a {
            Atom::Sym(s) if &*s.name == name && s.derivs.is_empty() => Some(s),
            _ => None,
        })
        .collect()
}

/// Sort indices within each symmetry group. Returns `None` when an
/// antisymmetric group has a repeated index, otherwise the canonical
/// indices and whether the sign flips.
fn canonical_indices(decl: &SymbolDecl, indices: &[Idx]) -> Option<(Vec<Idx>, bool)> {
    let mut idx = indices.to_vec();
    let mut negate = false;
    for s in &decl.symmetries {
        let slots = s.slots();
        let mut vals: Vec<Idx> = slots.iter().map(|&k| idx[k]).collect();
        if let SlotSymmetry::Antisymmetric(_) = s {
            let mut swaps = 0usize;
            for i in 0..vals.len() {
                for j in 0..vals.len() - 1 - i {
                    if vals[j] > vals[j + 1] {
                        vals.swap(j, j + 1);
                        swaps += 1;
                    }
                }
            }
            if vals.windows(2).any(|w| w[0] == w[1]) {
                return None;
            }
            negate ^= swaps % 2 == 1;
        } else {
            vals.sort_unstable();
        }
        for (k, v) in slots.iter().zip(vals) {
            idx[*k] = v;
        }
    }
    Some((idx, negate))
}
