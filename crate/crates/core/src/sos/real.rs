//! Real sums of squares over the halved Newton polytope.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{ExponentPair, RealPoly};
use crate::scalar::{GaussRat, Rat, Scalar, C64};

use super::gram::{self, Found, GramSystem, SosMargins, SosOptions};
use super::{basis::in_convex_hull, CertScalar, NUMERIC_TOL};

/// `P = x_Bᵀ G x_B` with `G ⪰ 0` real symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct RealGramCertificate<K> {
    pub basis: Vec<Vec<u32>>,
    pub gram: Matrix<K>,
}

/// `L` with `M_ab = L(x^{a+b}) ⪰ 0` and `L(P) < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMomentCertificate<K> {
    pub basis: Vec<Vec<u32>>,
    pub moments: BTreeMap<Vec<u32>, K>,
    pub value_on_p: K,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RealSosVerdict<K> {
    Sos(RealGramCertificate<K>),
    NotSos(RealMomentCertificate<K>),
    Indeterminate(SosMargins),
}

impl<K> RealSosVerdict<K> {
    pub fn label(&self) -> &'static str {
        match self {
            RealSosVerdict::Sos(_) => "sos",
            RealSosVerdict::NotSos(_) => "not-sos",
            RealSosVerdict::Indeterminate(_) => "indeterminate",
        }
    }

    pub fn is_sos(&self) -> bool {
        matches!(self, RealSosVerdict::Sos(_))
    }

    pub fn is_not_sos(&self) -> bool {
        matches!(self, RealSosVerdict::NotSos(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealSosReport<K> {
    pub verdict: RealSosVerdict<K>,
    pub lambda: Option<f64>,
    pub face_reductions: usize,
    pub basis_size: usize,
}

fn add(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Exponents `a` with `2a` in the Newton polytope of `P`, then diagonal
/// elimination to a fixed point.
pub fn real_candidate_basis<K: Scalar>(p: &RealPoly<K>) -> Vec<Vec<u32>> {
    let n = p.nvars();
    if p.is_zero() {
        return Vec::new();
    }
    let supp: Vec<Vec<u32>> = p.terms().map(|(e, _)| e.clone()).collect();
    let mut bound = vec![0u32; n];
    for e in &supp {
        for j in 0..n {
            bound[j] = bound[j].max(e[j] / 2);
        }
    }
    let mut cands: Vec<Vec<u32>> = vec![vec![]];
    for &b in &bound {
        cands = cands
            .into_iter()
            .flat_map(|c| {
                (0..=b).map(move |t| {
                    let mut c = c.clone();
                    c.push(t);
                    c
                })
            })
            .collect();
    }
    let mut basis: Vec<Vec<u32>> = cands
        .into_iter()
        .filter(|a| {
            let q: Vec<Rat> = a.iter().map(|&t| Rat::from_integer((2 * t as i64).into())).collect();
            in_convex_hull(&supp, &q)
        })
        .collect();
    loop {
        let mut counts: BTreeMap<Vec<u32>, (usize, usize)> = BTreeMap::new();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let e = counts.entry(add(a, b)).or_default();
                if i == j {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        let drop: BTreeSet<usize> = basis
            .iter()
            .enumerate()
            .filter(|(_, a)| {
                let d = add(a, a);
                p.coeff(&d).is_zero() && counts[&d].1 == 0
            })
            .map(|(i, _)| i)
            .collect();
        if drop.is_empty() {
            break;
        }
        basis = basis.into_iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, a)| a).collect();
    }
    basis.sort_by(|a, b| a.iter().sum::<u32>().cmp(&b.iter().sum::<u32>()).then(b.cmp(a)));
    basis
}

fn pair(u: &[u32]) -> ExponentPair {
    ExponentPair::new(u.to_vec(), vec![0; u.len()])
}

/// Real Gram feasibility of `P` over [`real_candidate_basis`].
pub fn real_sos_check<K: CertScalar>(p: &RealPoly<K>, opts: &SosOptions) -> Result<RealSosReport<K>> {
    let basis = real_candidate_basis(p);
    real_sos_check_with(p, &basis, opts)
}

pub fn real_sos_check_with<K: CertScalar>(p: &RealPoly<K>, basis: &[Vec<u32>], opts: &SosOptions) -> Result<RealSosReport<K>> {
    if basis.iter().any(|a| a.len() != p.nvars()) {
        return Err(Error::Dimension("basis exponent over the wrong number of variables".into()));
    }
    let report = |verdict, lambda, face_reductions| RealSosReport {
        verdict,
        lambda,
        face_reductions,
        basis_size: basis.len(),
    };
    if p.is_zero() {
        let s = basis.len();
        return Ok(report(
            RealSosVerdict::Sos(RealGramCertificate {
                basis: basis.to_vec(),
                gram: Matrix::filled(s, s, K::zero()),
            }),
            None,
            0,
        ));
    }
    let exact = K::REGIME == crate::scalar::Regime::Exact;
    let fl = p.terms().map(|(_, c)| c.to_c64().re.abs()).fold(0.0, f64::max);
    let ex: Option<Rat> = exact.then(|| {
        p.terms()
            .filter_map(|(_, c)| c.to_exact())
            .map(|g| num_traits::Signed::abs(&g.re))
            .max()
            .unwrap_or_else(Rat::zero)
    });
    let targets: BTreeMap<ExponentPair, (C64, Option<GaussRat>)> = p
        .terms()
        .map(|(e, c)| {
            let z = C64::new(c.to_c64().re / fl, 0.0);
            let g = match (&ex, c.to_exact()) {
                (Some(s), Some(g)) => Some(GaussRat::real(&g.re / s)),
                _ => None,
            };
            (pair(e), (z, g))
        })
        .collect();
    let fb: Vec<ExponentPair> = basis.iter().map(|a| pair(a)).collect();
    let sys = GramSystem::build(fb, |a, b| a.mul(b), |k| k.clone(), &targets, true);
    let scale = K::pick(ex.as_ref().map(|r| GaussRat::real(r.clone())).as_ref(), C64::new(fl, 0.0)).expect("scale in regime");
    let indeterminate = |reason: &str, lambda: Option<f64>, fr: usize| {
        report(
            RealSosVerdict::Indeterminate(SosMargins {
                lambda,
                face_reductions: fr,
                reason: reason.into(),
                ..SosMargins::default()
            }),
            lambda,
            fr,
        )
    };
    match gram::run(&sys, exact, opts) {
        Found::Gram {
            float,
            exact: ge,
            lambda,
            reductions,
        } => {
            let s = basis.len();
            let mut data = Vec::with_capacity(s * s);
            for i in 0..s {
                for j in 0..s {
                    let e = ge.as_ref().map(|m| GaussRat::real(m[(i, j)].re.clone()));
                    match K::pick(e.as_ref(), C64::new(float[(i, j)].re, 0.0)) {
                        Some(v) => data.push(v.times(&scale)),
                        None => return Ok(indeterminate("no certificate in the requested regime", Some(lambda), reductions)),
                    }
                }
            }
            let gm = Matrix::from_vec(s, s, data)?;
            let sym = Matrix::from_fn(s, s, |i, j| gm[(i, j)].plus(&gm[(j, i)]).times(&K::from_ratio(1, 2)));
            let cert = RealGramCertificate {
                basis: basis.to_vec(),
                gram: sym,
            };
            if verify_real_gram(p, &cert)? {
                Ok(report(RealSosVerdict::Sos(cert), Some(lambda), reductions))
            } else {
                Ok(indeterminate("Gram certificate failed verification", Some(lambda), reductions))
            }
        }
        Found::Moment {
            float,
            exact: me,
            lambda,
            ..
        } => {
            let mut moments = BTreeMap::new();
            for (k, v) in &float {
                let e = me.as_ref().and_then(|m| m.get(k)).map(|g| GaussRat::real(g.re.clone()));
                match K::pick(e.as_ref(), C64::new(v.re, 0.0)) {
                    Some(x) => {
                        moments.insert(k.u.clone(), x);
                    }
                    None => return Ok(indeterminate("no moment certificate in the requested regime", lambda, 0)),
                }
            }
            let mut cert = RealMomentCertificate {
                basis: basis.to_vec(),
                moments,
                value_on_p: K::zero(),
            };
            cert.value_on_p = real_functional_value(p, &cert)?;
            if verify_real_moment(p, &cert)? {
                Ok(report(RealSosVerdict::NotSos(cert), lambda, 0))
            } else {
                Ok(indeterminate("moment certificate failed verification", lambda, 0))
            }
        }
        Found::Indeterminate(m) => {
            let (l, fr) = (m.lambda, m.face_reductions);
            Ok(report(RealSosVerdict::Indeterminate(m), l, fr))
        }
    }
}

fn is_real<K: Scalar>(v: &K, tol: f64) -> bool {
    v.is_real_exact() || v.to_c64().im.abs() <= tol
}

pub fn verify_real_gram<K: CertScalar>(p: &RealPoly<K>, cert: &RealGramCertificate<K>) -> Result<bool> {
    let s = cert.basis.len();
    if cert.gram.rows() != s || cert.gram.cols() != s {
        return Err(Error::Dimension(format!("Gram matrix does not match {s} monomials")));
    }
    if cert.basis.iter().any(|a| a.len() != p.nvars()) {
        return Err(Error::Dimension("basis exponent over the wrong number of variables".into()));
    }
    let pmax = p.terms().map(|(_, c)| c.to_c64().norm()).fold(0.0, f64::max);
    let tol = NUMERIC_TOL * (1.0 + pmax);
    let g = &cert.gram;
    for i in 0..s {
        for j in 0..s {
            if !is_real(&g[(i, j)], tol) || !g[(i, j)].approx_eq(&g[(j, i)], tol) {
                return Ok(false);
            }
        }
    }
    let mut expanded: BTreeMap<Vec<u32>, K> = BTreeMap::new();
    for i in 0..s {
        for j in 0..s {
            if g[(i, j)].is_zero() {
                continue;
            }
            let e = expanded.entry(add(&cert.basis[i], &cert.basis[j])).or_insert_with(K::zero);
            *e = e.plus(&g[(i, j)]);
        }
    }
    for (e, v) in &expanded {
        if !v.approx_eq(&p.coeff(e), tol) {
            return Ok(false);
        }
    }
    for (e, c) in p.terms() {
        if !expanded.contains_key(e) && !c.approx_eq(&K::zero(), tol) {
            return Ok(false);
        }
    }
    Ok(K::psd(g, NUMERIC_TOL))
}

pub fn real_functional_value<K: CertScalar>(p: &RealPoly<K>, cert: &RealMomentCertificate<K>) -> Result<K> {
    let mut acc = K::zero();
    for (e, c) in p.terms() {
        let l = cert
            .moments
            .get(e)
            .ok_or_else(|| Error::MissingMoment(format!("{e:?}")))?;
        acc = acc.plus(&c.times(l));
    }
    Ok(acc)
}

pub fn verify_real_moment<K: CertScalar>(p: &RealPoly<K>, cert: &RealMomentCertificate<K>) -> Result<bool> {
    let s = cert.basis.len();
    let mut m = Matrix::filled(s, s, K::zero());
    for i in 0..s {
        for j in 0..s {
            let k = add(&cert.basis[i], &cert.basis[j]);
            m[(i, j)] = cert
                .moments
                .get(&k)
                .cloned()
                .ok_or_else(|| Error::MissingMoment(format!("{k:?}")))?;
        }
    }
    if cert.moments.values().any(|v| !is_real(v, 1e-12)) {
        return Ok(false);
    }
    let value = real_functional_value(p, cert)?;
    let trace: f64 = (0..s).map(|i| m[(i, i)].to_c64().re).sum();
    let pmax = p.terms().map(|(_, c)| c.to_c64().norm()).fold(0.0, f64::max);
    let margin = 1e-9 * trace.abs().max(1e-300) * pmax.max(1.0);
    if !value.approx_eq(&cert.value_on_p, margin.max(1e-12)) || !value.is_negative_real(margin) {
        return Ok(false);
    }
    Ok(K::psd(&m, 1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;

    type G = GaussRat;

    fn poly(n: usize, terms: &[(&[u32], i64)]) -> RealPoly<G> {
        RealPoly::from_terms(n, terms.iter().map(|(e, c)| (e.to_vec(), G::int(*c)))).unwrap()
    }

    #[test]
    fn square_of_sum_of_squares() {
        // (a² + b²)²
        let p = poly(2, &[(&[4, 0], 1), (&[2, 2], 2), (&[0, 4], 1)]);
        let r = real_sos_check(&p, &SosOptions::default()).unwrap();
        let RealSosVerdict::Sos(cert) = &r.verdict else {
            panic!("expected SOS, got {:?}", r.verdict);
        };
        assert!(verify_real_gram(&p, cert).unwrap());
    }

    #[test]
    fn negative_square_is_refuted() {
        let p = poly(1, &[(&[2], -1)]);
        let r = real_sos_check(&p, &SosOptions::default()).unwrap();
        assert!(r.verdict.is_not_sos(), "{:?}", r.verdict);
    }

    #[test]
    fn newton_basis_of_binary_quartic() {
        let p = poly(2, &[(&[4, 0], 1), (&[2, 2], 2), (&[0, 4], 1)]);
        let b = real_candidate_basis(&p);
        assert_eq!(b.len(), 3);
        assert!(b.contains(&vec![1, 1]));
    }
}
