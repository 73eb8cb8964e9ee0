//! Kraus operators from a Gram certificate of a biquadratic form.

use crate::choi::KrausSet;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::HermitianPolynomial;

use super::{verify_gram, CertScalar, GramCertificate};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// `x_i y_k`
    Plain,
    /// `x_i ȳ_k`
    Conj,
}

/// Splits `p = 2 m_P† A_PP m_P + 2 m_Q† A_QQ m_Q` over `P = {x_i y_k}` and
/// `Q = {x_i ȳ_k}`. The `P` part factors into `|xᵀ M y|²` terms (transpose
/// Kraus set `S2`), the `Q` part into `|y† V x|²` terms (`S1`). Reads the
/// `x` (input) and `y` (output) blocks of `p`.
pub fn sos_to_decomposable<K: CertScalar>(
    p: &HermitianPolynomial<K>,
    cert: &GramCertificate<K>,
) -> Result<(KrausSet<K>, KrausSet<K>)> {
    if !verify_gram(p, cert)? {
        return Err(Error::CertificateRejected);
    }
    let poly = p.poly();
    let bx = poly
        .block("x")
        .ok_or_else(|| Error::NotBiquadratic("missing block x".into()))?
        .vars
        .clone();
    let by = poly
        .block("y")
        .ok_or_else(|| Error::NotBiquadratic("missing block y".into()))?
        .vars
        .clone();
    let (m, n) = (bx.len(), by.len());
    let mut slots: Vec<(Kind, usize, usize)> = Vec::with_capacity(cert.basis.len());
    for mono in &cert.basis {
        let bad = || Error::BasisPattern(mono.display(poly.names()));
        if mono.degree() != 2 {
            return Err(bad());
        }
        let xi = bx.iter().position(|&v| mono.u[v] == 1).ok_or_else(bad)?;
        if bx.iter().any(|&v| mono.v[v] != 0) {
            return Err(bad());
        }
        if let Some(k) = by.iter().position(|&v| mono.u[v] == 1) {
            slots.push((Kind::Plain, xi, k));
        } else if let Some(k) = by.iter().position(|&v| mono.v[v] == 1) {
            slots.push((Kind::Conj, xi, k));
        } else {
            return Err(bad());
        }
    }
    let two = K::from_int(2);
    let part = |kind: Kind| -> Result<Vec<(K, Matrix<K>)>> {
        let idx: Vec<usize> = (0..slots.len()).filter(|&i| slots[i].0 == kind).collect();
        if idx.is_empty() {
            return Ok(Vec::new());
        }
        let sub = Matrix::from_fn(idx.len(), idx.len(), |a, b| cert.a[(idx[a], idx[b])].times(&two));
        let factors = K::factor(&sub).ok_or(Error::CertificateRejected)?;
        Ok(factors
            .into_iter()
            .map(|(w, l)| {
                let mut v = Matrix::filled(n, m, K::zero());
                for (t, &i) in idx.iter().enumerate() {
                    let (_, xi, yk) = slots[i];
                    v[(yk, xi)] = match kind {
                        Kind::Plain => l[t].clone(),
                        Kind::Conj => l[t].conj(),
                    };
                }
                (w, v)
            })
            .collect())
    };
    let s2 = KrausSet::weighted(m, n, part(Kind::Plain)?)?;
    let s1 = KrausSet::weighted(m, n, part(Kind::Conj)?)?;
    Ok((s1, s2))
}
