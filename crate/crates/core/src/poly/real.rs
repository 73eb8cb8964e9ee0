use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::poly::HermitianPolynomial;
use crate::scalar::{Scalar, C64};

/// Polynomial in real variables with real coefficients (stored in a complex
/// scalar type whose imaginary part is zero).
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly<K> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, K>,
    names: Vec<String>,
}

impl<K: Scalar> RealPoly<K> {
    pub fn zero(nvars: usize) -> Self {
        RealPoly {
            nvars,
            terms: BTreeMap::new(),
            names: (1..=nvars).map(|i| format!("t{i}")).collect(),
        }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, K)>) -> Result<Self> {
        let mut p = RealPoly::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension(format!("exponent of length {} for {nvars} variables", e.len())));
            }
            if !c.is_real_exact() && c.to_c64().im.abs() > 0.0 {
                return Err(Error::Invalid("real polynomial with complex coefficient".into()));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        if names.len() == self.nvars {
            self.names = names;
        }
        self
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: K) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().plus(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &K)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> K {
        self.terms.get(e).cloned().unwrap_or_else(K::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.nvars != o.nvars {
            return Err(Error::Dimension("variable count".into()));
        }
        let mut out = RealPoly::zero(self.nvars).with_names(self.names.clone());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.times(c2));
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.nvars != o.nvars {
            return Err(Error::Dimension("variable count".into()));
        }
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.nvars {
            return Err(Error::Dimension(format!("point of length {} for {} variables", x.len(), self.nvars)));
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                let m: f64 = e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product();
                c.to_c64().re * m
            })
            .sum())
    }
}

fn binomial(n: u32, k: u32) -> i64 {
    let mut r: i64 = 1;
    for j in 0..k {
        r = r * (n - j) as i64 / (j + 1) as i64;
    }
    r
}

/// `P(a, b) = p(a + i b)` in the variables `(a_1..a_n, b_1..b_n)`.
pub fn realify<K: Scalar>(p: &HermitianPolynomial<K>) -> Result<RealPoly<K>> {
    let n = p.nvars();
    let i_pows = [K::one(), K::i(), K::from_int(-1), K::i().negate()];
    // (a_j ± i b_j)^k as maps from (deg a, deg b) to coefficient
    let expand = |k: u32, sign: bool| -> Vec<(u32, u32, K)> {
        (0..=k)
            .map(|s| {
                let mut c = K::from_int(binomial(k, s)).times(&i_pows[(s % 4) as usize]);
                if sign && s % 2 == 1 {
                    c = c.negate();
                }
                (k - s, s, c)
            })
            .collect()
    };
    let mut acc: BTreeMap<Vec<u32>, K> = BTreeMap::new();
    let mut mag = 0.0;
    for (e, c) in p.terms() {
        let mut cur: BTreeMap<Vec<u32>, K> = BTreeMap::new();
        cur.insert(vec![0; 2 * n], c.clone());
        for j in 0..n {
            for (k, neg) in [(e.u[j], false), (e.v[j], true)] {
                if k == 0 {
                    continue;
                }
                let factors = expand(k, neg);
                let mut next = BTreeMap::new();
                for (mono, coef) in &cur {
                    for (da, db, f) in &factors {
                        let mut m = mono.clone();
                        m[j] += da;
                        m[n + j] += db;
                        let entry = next.entry(m).or_insert_with(K::zero);
                        *entry = coef.times(f).plus(entry);
                    }
                }
                cur = next;
            }
        }
        for (m, v) in cur {
            mag += v.to_c64().norm();
            let entry = acc.entry(m).or_insert_with(K::zero);
            *entry = entry.plus(&v);
        }
    }
    let mut out = RealPoly::zero(2 * n);
    let tol = 1e-12 * mag.max(1.0);
    for (m, v) in acc {
        let z = v.to_c64();
        let real = if K::REGIME == crate::scalar::Regime::Exact {
            if !v.is_real_exact() {
                return Err(Error::NotHermitianPoly(format!("imaginary coefficient on {m:?}")));
            }
            v
        } else {
            if z.im.abs() > tol {
                return Err(Error::NotHermitianPoly(format!("imaginary coefficient on {m:?}")));
            }
            v.plus(&v.conj()).times(&K::from_ratio(1, 2))
        };
        out.add_term(m, real);
    }
    let names = p.poly().names();
    let mut rn: Vec<String> = names.iter().map(|s| format!("re_{s}")).collect();
    rn.extend(names.iter().map(|s| format!("im_{s}")));
    Ok(out.with_names(rn))
}

/// Sets every imaginary-part variable to zero, keeping the first half.
pub fn restrict_real<K: Scalar>(p: &RealPoly<K>) -> Result<RealPoly<K>> {
    if p.nvars % 2 != 0 {
        return Err(Error::Dimension("realified polynomial must have an even variable count".into()));
    }
    let n = p.nvars / 2;
    let mut out = RealPoly::zero(n).with_names(p.names[..n].iter().map(|s| s.trim_start_matches("re_").to_string()).collect());
    for (e, c) in &p.terms {
        if e[n..].iter().all(|&k| k == 0) {
            out.add_term(e[..n].to_vec(), c.clone());
        }
    }
    Ok(out)
}

impl RealPoly<C64> {
    pub fn from_real_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        RealPoly::from_terms(nvars, terms.into_iter().map(|(e, c)| (e, C64::new(c, 0.0))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::scalar::GaussRat as G;

    fn herm(p: Poly<G>) -> HermitianPolynomial<G> {
        HermitianPolynomial::new(p).unwrap()
    }

    #[test]
    fn realify_examples() {
        let z = Poly::<G>::var(1, 0);
        let zb = Poly::<G>::conj_var(1, 0);
        let r = realify(&herm(z.mul(&zb).unwrap())).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.coeff(&[2, 0]), G::int(1));
        assert_eq!(r.coeff(&[0, 2]), G::int(1));
        let r = realify(&herm(z.add(&zb).unwrap())).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.coeff(&[1, 0]), G::int(2));
        let p = z.sub(&zb).unwrap().scale(&G::complex(0, 1));
        let r = realify(&herm(p)).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.coeff(&[0, 1]), G::int(-2));
    }

    #[test]
    fn restrict_drops_imaginary_parts() {
        let z = Poly::<G>::var(1, 0);
        let zb = Poly::<G>::conj_var(1, 0);
        let r = realify(&herm(z.mul(&zb).unwrap())).unwrap();
        let s = restrict_real(&r).unwrap();
        assert_eq!(s.nvars(), 1);
        assert_eq!(s.coeff(&[2]), G::int(1));
    }
}
