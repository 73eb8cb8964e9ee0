//! Sparse polynomials in `z` and `z̄`, with the Hermitian subclass.

mod real;
mod support;

pub use real::{realify, restrict_real, RealPoly};
pub use support::SupportSet;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{GaussRat, Rat, Scalar, C64};

/// Exponents of a mixed monomial `z^u z̄^v`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentPair {
    pub u: Vec<u32>,
    pub v: Vec<u32>,
}

impl ExponentPair {
    pub fn new(u: Vec<u32>, v: Vec<u32>) -> Self {
        assert_eq!(u.len(), v.len(), "exponent vectors of unequal length");
        ExponentPair { u, v }
    }

    pub fn one(n: usize) -> Self {
        ExponentPair::new(vec![0; n], vec![0; n])
    }

    /// `z_i`
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = ExponentPair::one(n);
        e.u[i] = 1;
        e
    }

    /// `z̄_i`
    pub fn conj_var(n: usize, i: usize) -> Self {
        let mut e = ExponentPair::one(n);
        e.v[i] = 1;
        e
    }

    pub fn nvars(&self) -> usize {
        self.u.len()
    }

    pub fn degree(&self) -> u32 {
        self.u.iter().sum::<u32>() + self.v.iter().sum::<u32>()
    }

    pub fn conj(&self) -> Self {
        ExponentPair::new(self.v.clone(), self.u.clone())
    }

    pub fn is_self_conjugate(&self) -> bool {
        self.u == self.v
    }

    pub fn mul(&self, o: &Self) -> Self {
        ExponentPair::new(
            self.u.iter().zip(&o.u).map(|(a, b)| a + b).collect(),
            self.v.iter().zip(&o.v).map(|(a, b)| a + b).collect(),
        )
    }

    /// `conj(self) * o`
    pub fn conj_mul(&self, o: &Self) -> Self {
        self.conj().mul(o)
    }

    pub fn divides(&self, o: &Self) -> bool {
        self.u.iter().zip(&o.u).all(|(a, b)| a <= b) && self.v.iter().zip(&o.v).all(|(a, b)| a <= b)
    }

    /// `u + v` per variable.
    pub fn total(&self) -> Vec<u32> {
        self.u.iter().zip(&self.v).map(|(a, b)| a + b).collect()
    }

    pub fn block_degree(&self, vars: &[usize]) -> (u32, u32) {
        (
            vars.iter().map(|&i| self.u[i]).sum(),
            vars.iter().map(|&i| self.v[i]).sum(),
        )
    }

    pub fn eval<K: Scalar>(&self, z: &[K]) -> K {
        let mut acc = K::one();
        for (i, zi) in z.iter().enumerate() {
            for _ in 0..self.u[i] {
                acc = acc.times(zi);
            }
            if self.v[i] > 0 {
                let c = zi.conj();
                for _ in 0..self.v[i] {
                    acc = acc.times(&c);
                }
            }
        }
        acc
    }

    pub fn display(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.u.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{e}", names[i])),
            }
        }
        for (i, &e) in self.v.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("conj({})", names[i])),
                _ => parts.push(format!("conj({})^{e}", names[i])),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Debug for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}|{:?}", self.u, self.v)
    }
}

/// Graded order: total degree, then reverse lexicographic comparison of the
/// concatenation `(u, v)` so that earlier variables come first.
impl Ord for ExponentPair {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| o.u.cmp(&self.u))
            .then_with(|| o.v.cmp(&self.v))
    }
}

impl PartialOrd for ExponentPair {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub vars: Vec<usize>,
}

/// Sparse polynomial `Σ c_{uv} z^u z̄^v` with no stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<K> {
    nvars: usize,
    terms: BTreeMap<ExponentPair, K>,
    names: Vec<String>,
    blocks: Vec<Block>,
}

fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("z{i}")).collect()
}

impl<K: Scalar> Poly<K> {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
            names: default_names(nvars),
            blocks: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: K) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(ExponentPair::one(nvars), c);
        p
    }

    pub fn monomial(e: ExponentPair, c: K) -> Self {
        let mut p = Poly::zero(e.nvars());
        p.add_term(e, c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Poly::monomial(ExponentPair::var(nvars, i), K::one())
    }

    pub fn conj_var(nvars: usize, i: usize) -> Self {
        Poly::monomial(ExponentPair::conj_var(nvars, i), K::one())
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (ExponentPair, K)>) -> Result<Self> {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            if e.nvars() != nvars {
                return Err(Error::Dimension(format!(
                    "exponent of length {} in a {nvars}-variable polynomial",
                    e.nvars()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.nvars {
            return Err(Error::Dimension(format!(
                "{} names for {} variables",
                names.len(),
                self.nvars
            )));
        }
        self.names = names;
        Ok(self)
    }

    pub fn with_blocks(mut self, blocks: Vec<Block>) -> Result<Self> {
        for b in &blocks {
            if b.vars.iter().any(|&i| i >= self.nvars) {
                return Err(Error::Dimension(format!("block {} out of range", b.name)));
            }
        }
        self.blocks = blocks;
        Ok(self)
    }

    /// Copies names and blocks from `o`.
    pub fn with_layout_of<L>(mut self, o: &Poly<L>) -> Self {
        if o.nvars == self.nvars {
            self.names = o.names.clone();
            self.blocks = o.blocks.clone();
        }
        self
    }

    pub fn add_term(&mut self, e: ExponentPair, c: K) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let s = old.plus(&c);
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentPair, &K)> {
        self.terms.iter()
    }

    pub fn term_map(&self) -> &BTreeMap<ExponentPair, K> {
        &self.terms
    }

    pub fn coeff(&self, e: &ExponentPair) -> K {
        self.terms.get(e).cloned().unwrap_or_else(K::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(ExponentPair::degree).max().unwrap_or(0)
    }

    pub fn support(&self) -> SupportSet {
        SupportSet::from_pairs(self.nvars, self.terms.keys().cloned())
    }

    fn check_nvars(&self, o: &Self) -> Result<()> {
        if self.nvars != o.nvars {
            return Err(Error::Dimension(format!(
                "{} vs {} variables",
                self.nvars, o.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_nvars(o)?;
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.negate())
    }

    pub fn scale(&self, s: &K) -> Self {
        let mut out = self.map_coeffs(|c| c.times(s));
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_nvars(o)?;
        let mut out = Poly::zero(self.nvars).with_layout_of(self);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term(e1.mul(e2), c1.times(c2));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Poly::constant(self.nvars, K::one()).with_layout_of(self);
        for _ in 0..k {
            acc = acc.mul(self).expect("same variables");
        }
        acc
    }

    /// Swaps `z` and `z̄` and conjugates coefficients.
    pub fn conjugate(&self) -> Self {
        let mut out = Poly::zero(self.nvars).with_layout_of(self);
        for (e, c) in &self.terms {
            out.terms.insert(e.conj(), c.conj());
        }
        out
    }

    /// `g · conj(g)`, which equals `g²` for Hermitian `g`.
    pub fn conjugate_square(&self) -> Self {
        self.mul(&self.conjugate()).expect("same variables")
    }

    pub fn map_coeffs<L: Scalar>(&self, f: impl Fn(&K) -> L) -> Poly<L> {
        let mut out = Poly::<L>::zero(self.nvars).with_layout_of(self);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn to_c64(&self) -> Poly<C64> {
        self.map_coeffs(|c| c.to_c64())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|(e, c)| {
            let partner = self.terms.get(&e.conj()).cloned().unwrap_or_else(K::zero);
            c.approx_eq(&partner.conj(), tol)
        })
    }

    pub fn eval(&self, z: &[K]) -> Result<K> {
        if z.len() != self.nvars {
            return Err(Error::Dimension(format!(
                "point of length {} for {} variables",
                z.len(),
                self.nvars
            )));
        }
        Ok(self
            .terms
            .iter()
            .fold(K::zero(), |acc, (e, c)| acc.plus(&c.times(&e.eval(z)))))
    }

    /// Substitutes `z_j ↦ f_j(w)` and `z̄_j ↦ conj(f_j)(w)`.
    pub fn compose(&self, f: &[Poly<K>]) -> Result<Poly<K>> {
        if f.len() != self.nvars {
            return Err(Error::Dimension(format!(
                "{} substitutions for {} variables",
                f.len(),
                self.nvars
            )));
        }
        let m = f.first().map_or(0, Poly::nvars);
        if f.iter().any(|g| g.nvars != m) {
            return Err(Error::Dimension("substitutions over different variables".into()));
        }
        let fc: Vec<Poly<K>> = f.iter().map(Poly::conjugate).collect();
        let mut cache: BTreeMap<(usize, bool, u32), Poly<K>> = BTreeMap::new();
        let mut power = |j: usize, conj: bool, k: u32| -> Poly<K> {
            cache
                .entry((j, conj, k))
                .or_insert_with(|| if conj { fc[j].pow(k) } else { f[j].pow(k) })
                .clone()
        };
        let mut out = Poly::zero(m);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(m, c.clone());
            for j in 0..self.nvars {
                if e.u[j] > 0 {
                    t = t.mul(&power(j, false, e.u[j]))?;
                }
                if e.v[j] > 0 {
                    t = t.mul(&power(j, true, e.v[j]))?;
                }
            }
            out = out.add(&t)?;
        }
        if let Some(g) = f.first() {
            out = out.with_layout_of(g);
        }
        Ok(out)
    }

    /// Substitutes constants for the given variables and removes them.
    pub fn dehomogenize(&self, assignments: &[(usize, K)]) -> Result<Self> {
        for (i, _) in assignments {
            if *i >= self.nvars {
                return Err(Error::UnknownVariable(format!("index {i}")));
            }
        }
        let keep: Vec<usize> = (0..self.nvars)
            .filter(|i| !assignments.iter().any(|(j, _)| j == i))
            .collect();
        let newpos = |i: usize| keep.iter().position(|&k| k == i);
        let mut out = Poly::zero(keep.len());
        for (e, c) in &self.terms {
            let mut coef = c.clone();
            for (i, val) in assignments {
                for _ in 0..e.u[*i] {
                    coef = coef.times(val);
                }
                let vc = val.conj();
                for _ in 0..e.v[*i] {
                    coef = coef.times(&vc);
                }
            }
            let ne = ExponentPair::new(
                keep.iter().map(|&k| e.u[k]).collect(),
                keep.iter().map(|&k| e.v[k]).collect(),
            );
            out.add_term(ne, coef);
        }
        out.names = keep.iter().map(|&k| self.names[k].clone()).collect();
        out.blocks = self
            .blocks
            .iter()
            .map(|b| Block {
                name: b.name.clone(),
                vars: b.vars.iter().filter_map(|&i| newpos(i)).collect(),
            })
            .filter(|b| !b.vars.is_empty())
            .collect();
        Ok(out)
    }

    pub fn dehomogenize_named(&self, assignments: &[(&str, K)]) -> Result<Self> {
        let idx = assignments
            .iter()
            .map(|(n, v)| Ok((self.var_index(n)?, v.clone())))
            .collect::<Result<Vec<_>>>()?;
        self.dehomogenize(&idx)
    }

    /// Inserts homogenizing variables so that every term reaches the target
    /// degree in each homogenized group.
    pub fn homogenize(&self, hs: &[Homogenizer]) -> Result<Self> {
        let out_n = self.nvars + hs.len();
        let slot = homogenizer_slots(self.nvars, hs)?;
        let mut out = Poly::zero(out_n);
        for (e, c) in &self.terms {
            let ne = homogenize_pair_with(e, hs, &slot).map_err(|err| match err {
                Error::DegreeTooSmall(m) => Error::DegreeTooSmall(format!("term {}: {m}", e.display(&self.names))),
                other => other,
            })?;
            out.add_term(ne, c.clone());
        }
        let mut names = vec![String::new(); out_n];
        for i in 0..self.nvars {
            names[slot[i]] = self.names[i].clone();
        }
        for h in hs {
            names[h.position] = h.name.clone();
        }
        out.names = names;
        out.blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut vars: Vec<usize> = b.vars.iter().map(|&i| slot[i]).collect();
                for h in hs {
                    if !h.members.is_empty() && h.members.iter().all(|m| b.vars.contains(m)) {
                        vars.push(h.position);
                    }
                }
                vars.sort_unstable();
                Block {
                    name: b.name.clone(),
                    vars,
                }
            })
            .collect();
        Ok(out)
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(e, c)| format!("({c:?})*{}", e.display(&self.names)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn homogenizer_slots(nvars: usize, hs: &[Homogenizer]) -> Result<Vec<usize>> {
    let out_n = nvars + hs.len();
    let mut positions: Vec<usize> = hs.iter().map(|h| h.position).collect();
    positions.sort_unstable();
    positions.dedup();
    if positions.len() != hs.len() || positions.iter().any(|&p| p >= out_n) {
        return Err(Error::Invalid("homogenizer positions must be distinct and in range".into()));
    }
    for h in hs {
        if h.members.iter().any(|&i| i >= nvars) {
            return Err(Error::UnknownVariable(format!("member of {}", h.name)));
        }
    }
    let mut slot = Vec::with_capacity(nvars);
    let mut next = 0;
    for _ in 0..nvars {
        while positions.contains(&next) {
            next += 1;
        }
        slot.push(next);
        next += 1;
    }
    Ok(slot)
}

fn homogenize_pair_with(e: &ExponentPair, hs: &[Homogenizer], slot: &[usize]) -> Result<ExponentPair> {
    let out_n = e.nvars() + hs.len();
    let mut u = vec![0; out_n];
    let mut v = vec![0; out_n];
    for (i, &s) in slot.iter().enumerate() {
        u[s] = e.u[i];
        v[s] = e.v[i];
    }
    for h in hs {
        let (du, dv) = e.block_degree(&h.members);
        if du > h.degree.0 || dv > h.degree.1 {
            return Err(Error::DegreeTooSmall(format!(
                "degree ({du},{dv}) in the group of {}, target ({},{})",
                h.name, h.degree.0, h.degree.1
            )));
        }
        u[h.position] = h.degree.0 - du;
        v[h.position] = h.degree.1 - dv;
    }
    Ok(ExponentPair::new(u, v))
}

/// Image of a single exponent pair under homogenization.
pub fn homogenize_pair(e: &ExponentPair, hs: &[Homogenizer]) -> Result<ExponentPair> {
    let slot = homogenizer_slots(e.nvars(), hs)?;
    homogenize_pair_with(e, hs, &slot)
}

/// A variable inserted by [`Poly::homogenize`].
#[derive(Clone, Debug)]
pub struct Homogenizer {
    /// Index of the new variable in the output.
    pub position: usize,
    pub name: String,
    /// Input variables whose degree is topped up.
    pub members: Vec<usize>,
    /// Target (holomorphic, antiholomorphic) degree of the group.
    pub degree: (u32, u32),
}

/// Polynomial with `p_{uv} = conj(p_{vu})`, hence real-valued.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianPolynomial<K>(Poly<K>);

/// Relative bound on the imaginary residue accepted by `evaluate`.
pub const EVAL_RESIDUE_TOL: f64 = 1e-10;

impl<K: Scalar> HermitianPolynomial<K> {
    /// Validates symmetry; floating input within 1e-12 is symmetrized.
    pub fn new(p: Poly<K>) -> Result<Self> {
        if !p.is_hermitian(1e-12) {
            let bad = p
                .terms
                .iter()
                .find(|(e, c)| !c.approx_eq(&p.coeff(&e.conj()).conj(), 1e-12))
                .map(|(e, _)| e.display(&p.names))
                .unwrap_or_default();
            return Err(Error::NotHermitianPoly(format!("coefficient of {bad}")));
        }
        let mut sym = Poly::zero(p.nvars).with_layout_of(&p);
        let half = K::from_ratio(1, 2);
        for (e, c) in &p.terms {
            let partner = p.coeff(&e.conj()).conj();
            sym.add_term(e.clone(), c.plus(&partner).times(&half));
        }
        Ok(HermitianPolynomial(sym))
    }

    pub fn zero(nvars: usize) -> Self {
        HermitianPolynomial(Poly::zero(nvars))
    }

    pub fn poly(&self) -> &Poly<K> {
        &self.0
    }

    pub fn into_poly(self) -> Poly<K> {
        self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.nvars
    }

    pub fn coeff(&self, e: &ExponentPair) -> K {
        self.0.coeff(e)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentPair, &K)> {
        self.0.terms()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn support(&self) -> SupportSet {
        self.0.support()
    }

    /// Real value at `z`; errors if the imaginary residue exceeds
    /// `1e-10 · Σ|term|`.
    pub fn evaluate(&self, z: &[C64]) -> Result<f64> {
        if z.len() != self.nvars() {
            return Err(Error::Dimension(format!(
                "point of length {} for {} variables",
                z.len(),
                self.nvars()
            )));
        }
        let mut sum = C64::new(0.0, 0.0);
        let mut mag = 0.0;
        for (e, c) in self.0.terms() {
            let t = c.to_c64() * e.eval(z);
            mag += t.norm();
            sum += t;
        }
        let bound = EVAL_RESIDUE_TOL * mag;
        if sum.im.abs() > bound {
            return Err(Error::ImaginaryResidue {
                residue: sum.im.abs(),
                bound,
            });
        }
        Ok(sum.re)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(HermitianPolynomial(self.0.add(&o.0)?))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Ok(HermitianPolynomial(self.0.sub(&o.0)?))
    }

    pub fn neg(&self) -> Self {
        HermitianPolynomial(self.0.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        Ok(HermitianPolynomial(self.0.mul(&o.0)?))
    }

    pub fn scale_real(&self, s: &K) -> Result<Self> {
        HermitianPolynomial::new(self.0.scale(s))
    }

    pub fn dehomogenize(&self, assignments: &[(usize, K)]) -> Result<Self> {
        Ok(HermitianPolynomial(self.0.dehomogenize(assignments)?))
    }

    pub fn dehomogenize_named(&self, assignments: &[(&str, K)]) -> Result<Self> {
        Ok(HermitianPolynomial(self.0.dehomogenize_named(assignments)?))
    }

    pub fn homogenize(&self, hs: &[Homogenizer]) -> Result<Self> {
        Ok(HermitianPolynomial(self.0.homogenize(hs)?))
    }

    pub fn to_c64(&self) -> HermitianPolynomial<C64> {
        HermitianPolynomial(self.0.to_c64())
    }
}

impl HermitianPolynomial<GaussRat> {
    pub fn evaluate_exact(&self, z: &[GaussRat]) -> Result<Rat> {
        let v = self.0.eval(z)?;
        if !v.im.is_zero() {
            return Err(Error::NotHermitianPoly("nonzero imaginary value".into()));
        }
        Ok(v.re)
    }
}

/// `g · conj(g)` as a Hermitian polynomial.
pub fn conjugate_square<K: Scalar>(g: &Poly<K>) -> HermitianPolynomial<K> {
    HermitianPolynomial(g.conjugate_square())
}
