//! Sum-of-squares certification for Hermitian polynomials.
//!
//! A Hermitian polynomial `p` is a sum of squares of real-valued polynomials
//! over a conjugation-closed basis `F` iff `p = F† G F` for some Hermitian
//! `G ⪰ 0`. Certificates come in two shapes: a [`GramCertificate`] (the
//! block form `[[A, B], [B̄, Ā]]` over `[m; m̄]`) and a [`MomentCertificate`]
//! (a PSD moment functional that is negative on `p`). Both are re-verified
//! before a verdict is returned.

mod basis;
mod extract;
mod gram;
mod real;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigh, rational_is_psd, rational_psd_check, HermitianMatrix, Matrix, PsdWitness};
use crate::poly::{ExponentPair, HermitianPolynomial};
use crate::scalar::{GaussRat, Rat, Regime, Scalar, C64};
use crate::sdp::SdpProblem;

pub use basis::{box_basis, candidate_basis, in_convex_hull, GramBasis};
pub use extract::sos_to_decomposable;
pub use gram::{SosMargins, SosOptions, NOTSOS_MARGIN, SOS_MARGIN};
pub use real::{real_candidate_basis, real_sos_check, verify_real_gram, verify_real_moment, RealGramCertificate, RealMomentCertificate, RealSosReport, RealSosVerdict};

use gram::{Found, GramSystem};

/// Relative tolerance for floating coefficient identities and Gram PSD checks.
pub const NUMERIC_TOL: f64 = 1e-6;

/// `p = w† [[A, B], [B̄, Ā]] w` with `w = [m; m̄]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramCertificate<K> {
    pub basis: Vec<ExponentPair>,
    pub a: Matrix<K>,
    pub b: Matrix<K>,
}

impl<K: Scalar> GramCertificate<K> {
    /// The full block matrix `[[A, B], [B̄, Ā]]`.
    pub fn block(&self) -> Matrix<K> {
        let h = self.basis.len();
        Matrix::from_fn(2 * h, 2 * h, |i, j| match (i < h, j < h) {
            (true, true) => self.a[(i, j)].clone(),
            (true, false) => self.b[(i, j - h)].clone(),
            (false, true) => self.b[(i - h, j)].conj(),
            (false, false) => self.a[(i - h, j - h)].conj(),
        })
    }

    /// `[m; m̄]`.
    pub fn monomial_vector(&self) -> Vec<ExponentPair> {
        self.basis.iter().cloned().chain(self.basis.iter().map(|m| m.conj())).collect()
    }

    pub fn to_c64(&self) -> GramCertificate<C64> {
        GramCertificate {
            basis: self.basis.clone(),
            a: self.a.to_c64(),
            b: self.b.to_c64(),
        }
    }
}

/// Linear functional `L` on product monomials with `M_ab = L(conj(F_a)·F_b)`
/// PSD and `L(p) < 0`. Values of conjugate monomials default to
/// `L(μ̄) = conj(L(μ))`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentCertificate<K> {
    pub basis: GramBasis,
    pub moments: BTreeMap<ExponentPair, K>,
    pub value_on_p: K,
}

impl<K: Scalar> MomentCertificate<K> {
    pub fn moment(&self, mu: &ExponentPair) -> Result<K> {
        if let Some(v) = self.moments.get(mu) {
            return Ok(v.clone());
        }
        if let Some(v) = self.moments.get(&mu.conj()) {
            return Ok(v.conj());
        }
        Err(Error::MissingMoment(format!("{:?}", mu)))
    }

    /// `M[a][b] = L(conj(F_b)·F_a)`.
    pub fn moment_matrix(&self) -> Result<Matrix<K>> {
        let f = self.basis.monomials();
        let s = f.len();
        let mut m = Matrix::filled(s, s, K::zero());
        for a in 0..s {
            for b in 0..s {
                m[(a, b)] = self.moment(&f[b].conj_mul(&f[a]))?;
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SosVerdict<K> {
    Sos(GramCertificate<K>),
    NotSos(MomentCertificate<K>),
    Indeterminate(SosMargins),
}

impl<K> SosVerdict<K> {
    pub fn label(&self) -> &'static str {
        match self {
            SosVerdict::Sos(_) => "sos",
            SosVerdict::NotSos(_) => "not-sos",
            SosVerdict::Indeterminate(_) => "indeterminate",
        }
    }

    pub fn is_sos(&self) -> bool {
        matches!(self, SosVerdict::Sos(_))
    }

    pub fn is_not_sos(&self) -> bool {
        matches!(self, SosVerdict::NotSos(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SosReport<K> {
    pub verdict: SosVerdict<K>,
    /// Interior margin of the Gram system (normalized target).
    pub lambda: Option<f64>,
    pub face_reductions: usize,
    pub basis_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictSummary {
    pub verdict: &'static str,
    pub lambda: Option<f64>,
    pub face_reductions: usize,
    pub basis_size: usize,
}

impl<K> SosReport<K> {
    pub fn summary(&self) -> VerdictSummary {
        VerdictSummary {
            verdict: self.verdict.label(),
            lambda: self.lambda,
            face_reductions: self.face_reductions,
            basis_size: self.basis_size,
        }
    }
}

/// Scalars that can carry certificates: exact checks for the Gaussian
/// rationals, tolerance checks for floats.
pub trait CertScalar: Scalar {
    fn to_exact(&self) -> Option<GaussRat>;
    /// Chooses the exact value when the regime is exact, the float otherwise.
    fn pick(exact: Option<&GaussRat>, float: C64) -> Option<Self>;
    /// `m ⪰ 0`; `tol` is relative to `1 + max|m_ij|` for floats.
    fn psd(m: &Matrix<Self>, tol: f64) -> bool;
    /// Real and below `-margin` (strictly negative for exact scalars).
    fn is_negative_real(&self, margin: f64) -> bool;
    /// `m = Σ w_t v_t v_t†` with `w_t > 0`.
    fn factor(m: &Matrix<Self>) -> Option<Vec<(Self, Vec<Self>)>>;
}

impl CertScalar for GaussRat {
    fn to_exact(&self) -> Option<GaussRat> {
        Some(self.clone())
    }

    fn pick(exact: Option<&GaussRat>, _float: C64) -> Option<Self> {
        exact.cloned()
    }

    fn psd(m: &Matrix<Self>, _tol: f64) -> bool {
        HermitianMatrix::new(m.clone())
            .map(|h| rational_is_psd(&h))
            .unwrap_or(false)
    }

    fn is_negative_real(&self, _margin: f64) -> bool {
        self.im.is_zero() && self.re.is_negative()
    }

    fn factor(m: &Matrix<Self>) -> Option<Vec<(Self, Vec<Self>)>> {
        let h = HermitianMatrix::new(m.clone()).ok()?;
        let PsdWitness::Factorization { perm, l, d } = rational_psd_check(&h) else {
            return None;
        };
        let n = perm.len();
        let mut out = Vec::new();
        for t in 0..n {
            if d[t].is_zero() {
                continue;
            }
            let mut v = vec![GaussRat::int(0); n];
            for i in 0..n {
                v[perm[i]] = l[(i, t)].clone();
            }
            out.push((GaussRat::real(d[t].clone()), v));
        }
        Some(out)
    }
}

impl CertScalar for C64 {
    fn to_exact(&self) -> Option<GaussRat> {
        None
    }

    fn pick(_exact: Option<&GaussRat>, float: C64) -> Option<Self> {
        Some(float)
    }

    fn psd(m: &Matrix<Self>, tol: f64) -> bool {
        if m.rows() == 0 {
            return true;
        }
        if !m.is_hermitian(tol * (1.0 + m.max_abs())) {
            return false;
        }
        let (vals, _) = eigh(&m.hermitian_part());
        vals.first().copied().unwrap_or(0.0) >= -tol * (1.0 + m.max_abs())
    }

    fn is_negative_real(&self, margin: f64) -> bool {
        self.im.abs() <= margin.max(1e-12) && self.re < -margin
    }

    fn factor(m: &Matrix<Self>) -> Option<Vec<(Self, Vec<Self>)>> {
        let n = m.rows();
        let (vals, vecs) = eigh(&m.hermitian_part());
        let top = vals.last().copied().unwrap_or(0.0).max(0.0);
        Some(
            (0..n)
                .filter(|&t| vals[t] > 1e-12 * top.max(1e-300))
                .map(|t| (C64::new(vals[t], 0.0), (0..n).map(|i| vecs[(i, t)]).collect()))
                .collect(),
        )
    }
}

fn is_exact<K: Scalar>() -> bool {
    K::REGIME == Regime::Exact
}

/// `max(|Re c|, |Im c|)` over the coefficients, exactly when possible.
fn coefficient_scale<K: CertScalar>(p: &HermitianPolynomial<K>) -> (f64, Option<Rat>) {
    let mut fl: f64 = 0.0;
    let mut ex: Option<Rat> = if is_exact::<K>() { Some(Rat::zero()) } else { None };
    for (_, c) in p.terms() {
        let z = c.to_c64();
        fl = fl.max(z.re.abs()).max(z.im.abs());
        if let (Some(e), Some(g)) = (ex.as_mut(), c.to_exact()) {
            let m = g.re.abs().max(g.im.abs());
            if m > *e {
                *e = m;
            }
        }
    }
    (fl, ex)
}

/// Hermitian targets for the Gram system, divided by the coefficient scale.
fn scaled_targets<K: CertScalar>(
    terms: impl Iterator<Item = (ExponentPair, K)>,
    fl: f64,
    ex: Option<&Rat>,
) -> BTreeMap<ExponentPair, (C64, Option<GaussRat>)> {
    terms
        .map(|(e, c)| {
            let z = c.to_c64() / fl;
            let exact = match (ex, c.to_exact()) {
                (Some(s), Some(g)) => Some(g.scale(&s.recip())),
                _ => None,
            };
            (e, (z, exact))
        })
        .collect()
}

/// Gram feasibility of `p` over `basis`, in the regime of `K`. Exact
/// scalars yield rational, exactly verified certificates.
pub fn sos_check<K: CertScalar>(p: &HermitianPolynomial<K>, basis: &GramBasis, opts: &SosOptions) -> Result<SosReport<K>> {
    if !basis.is_empty() && basis.nvars() != p.nvars() {
        return Err(Error::Dimension(format!(
            "basis over {} variables, polynomial over {}",
            basis.nvars(),
            p.nvars()
        )));
    }
    let report = |verdict, lambda, face_reductions| SosReport {
        verdict,
        lambda,
        face_reductions,
        basis_size: basis.len(),
    };
    if p.is_zero() {
        let h = basis.half().len();
        let cert = GramCertificate {
            basis: basis.half(),
            a: Matrix::filled(h, h, K::zero()),
            b: Matrix::filled(h, h, K::zero()),
        };
        return Ok(report(SosVerdict::Sos(cert), None, 0));
    }
    let (fl, ex) = coefficient_scale(p);
    let targets = scaled_targets(p.terms().map(|(e, c)| (e.clone(), c.clone())), fl, ex.as_ref());
    let sys = GramSystem::build(basis.monomials().to_vec(), |a, b| a.conj_mul(b), |k| k.conj(), &targets, false);
    let scale = K::pick(ex.as_ref().map(|r| GaussRat::real(r.clone())).as_ref(), C64::new(fl, 0.0)).expect("scale in regime");
    match gram::run(&sys, is_exact::<K>(), opts) {
        Found::Gram {
            float,
            exact,
            lambda,
            reductions,
        } => {
            let Some(g) = pick_matrix::<K>(exact.as_ref(), &float) else {
                return Ok(report(SosVerdict::Indeterminate(SosMargins {
                    lambda: Some(lambda),
                    face_reductions: reductions,
                    reason: "no certificate in the requested regime".into(),
                    ..SosMargins::default()
                }), Some(lambda), reductions));
            };
            let g = g.scale(&scale);
            let cert = gram_certificate(basis, &g);
            if verify_gram(p, &cert)? {
                Ok(report(SosVerdict::Sos(cert), Some(lambda), reductions))
            } else {
                Ok(report(SosVerdict::Indeterminate(SosMargins {
                    lambda: Some(lambda),
                    face_reductions: reductions,
                    reason: "Gram certificate failed verification".into(),
                    ..SosMargins::default()
                }), Some(lambda), reductions))
            }
        }
        Found::Moment { float, exact, value, lambda } => {
            let mut moments = BTreeMap::new();
            for (k, v) in &float {
                let e = exact.as_ref().and_then(|m| m.get(k));
                match K::pick(e, *v) {
                    Some(x) => {
                        moments.insert(k.clone(), x);
                    }
                    None => {
                        return Ok(report(SosVerdict::Indeterminate(SosMargins {
                            lambda,
                            dual_value: Some(value),
                            reason: "no moment certificate in the requested regime".into(),
                            ..SosMargins::default()
                        }), lambda, 0));
                    }
                }
            }
            let mut cert = MomentCertificate {
                basis: basis.clone(),
                moments,
                value_on_p: K::zero(),
            };
            cert.value_on_p = functional_value(p, &cert)?;
            if verify_moment(p, &cert)? {
                Ok(report(SosVerdict::NotSos(cert), lambda, 0))
            } else {
                Ok(report(SosVerdict::Indeterminate(SosMargins {
                    lambda,
                    dual_value: Some(value),
                    reason: "moment certificate failed verification".into(),
                    ..SosMargins::default()
                }), lambda, 0))
            }
        }
        Found::Indeterminate(m) => {
            let lambda = m.lambda;
            let fr = m.face_reductions;
            Ok(report(SosVerdict::Indeterminate(m), lambda, fr))
        }
    }
}

/// The plain Gram feasibility SDP for `p` over `basis`, with coefficients
/// divided by their largest modulus.
pub fn gram_feasibility_problem<K: CertScalar>(p: &HermitianPolynomial<K>, basis: &GramBasis) -> Result<SdpProblem> {
    if basis.nvars() != p.nvars() {
        return Err(Error::Dimension(format!(
            "basis over {} variables, polynomial over {}",
            basis.nvars(),
            p.nvars()
        )));
    }
    let (fl, ex) = coefficient_scale(p);
    let fl = if fl > 0.0 { fl } else { 1.0 };
    let ex = ex.filter(|r| !r.is_zero());
    let targets = scaled_targets(p.terms().map(|(e, c)| (e.clone(), c.clone())), fl, ex.as_ref());
    let sys = GramSystem::build(basis.monomials().to_vec(), |a, b| a.conj_mul(b), |k| k.conj(), &targets, false);
    Ok(gram::feasibility_problem(&sys))
}

/// [`sos_check`] over [`candidate_basis`].
pub fn sos_check_auto<K: CertScalar>(p: &HermitianPolynomial<K>, opts: &SosOptions) -> Result<SosReport<K>> {
    sos_check(p, &candidate_basis(p), opts)
}

fn pick_matrix<K: CertScalar>(exact: Option<&Matrix<GaussRat>>, float: &Matrix<C64>) -> Option<Matrix<K>> {
    let (r, c) = (float.rows(), float.cols());
    let mut data = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            data.push(K::pick(exact.map(|m| &m[(i, j)]), float[(i, j)])?);
        }
    }
    Matrix::from_vec(r, c, data).ok()
}

/// Block certificate from a Gram matrix over the full basis: symmetrize
/// under conjugation, then split each self-conjugate monomial evenly between
/// `m` and `m̄`.
pub fn gram_certificate<K: Scalar>(basis: &GramBasis, g: &Matrix<K>) -> GramCertificate<K> {
    let f = basis.monomials();
    let s = f.len();
    let ci = basis.conj_index();
    let half = K::from_ratio(1, 2);
    let gs = Matrix::from_fn(s, s, |a, b| g[(a, b)].plus(&g[(ci[a], ci[b])].conj()).times(&half));
    let reps: Vec<usize> = (0..s).filter(|&i| ci[i] >= i).collect();
    let h = reps.len();
    let rep_pos: BTreeMap<usize, usize> = reps.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let pos: Vec<Vec<(usize, K)>> = (0..s)
        .map(|a| {
            if ci[a] == a {
                let i = rep_pos[&a];
                vec![(i, half.clone()), (h + i, half.clone())]
            } else if ci[a] > a {
                vec![(rep_pos[&a], K::one())]
            } else {
                vec![(h + rep_pos[&ci[a]], K::one())]
            }
        })
        .collect();
    let mut full = Matrix::filled(2 * h, 2 * h, K::zero());
    for a in 0..s {
        for b in 0..s {
            let v = &gs[(a, b)];
            if v.is_zero() {
                continue;
            }
            for (k, wk) in &pos[a] {
                for (l, wl) in &pos[b] {
                    full[(*k, *l)] = full[(*k, *l)].plus(&wk.times(wl).times(v));
                }
            }
        }
    }
    GramCertificate {
        basis: reps.iter().map(|&i| f[i].clone()).collect(),
        a: Matrix::from_fn(h, h, |i, j| full[(i, j)].clone()),
        b: Matrix::from_fn(h, h, |i, j| full[(i, h + j)].clone()),
    }
}

fn coeff_tol<K: Scalar>(p: &HermitianPolynomial<K>) -> f64 {
    let m = p.terms().map(|(_, c)| c.to_c64().norm()).fold(0.0, f64::max);
    NUMERIC_TOL * (1.0 + m)
}

/// Expands `w† H w` into coefficients.
fn expand_block<K: Scalar>(cert: &GramCertificate<K>) -> BTreeMap<ExponentPair, K> {
    let w = cert.monomial_vector();
    let h = cert.block();
    let mut out: BTreeMap<ExponentPair, K> = BTreeMap::new();
    for k in 0..w.len() {
        for l in 0..w.len() {
            let v = &h[(k, l)];
            if v.is_zero() {
                continue;
            }
            let e = out.entry(w[k].conj_mul(&w[l])).or_insert_with(K::zero);
            *e = e.plus(v);
        }
    }
    out
}

/// Exact (or tolerance) coefficient identity plus block PSD.
pub fn verify_gram<K: CertScalar>(p: &HermitianPolynomial<K>, cert: &GramCertificate<K>) -> Result<bool> {
    let h = cert.basis.len();
    if cert.a.rows() != h || cert.a.cols() != h || cert.b.rows() != h || cert.b.cols() != h {
        return Err(Error::Dimension(format!("certificate blocks do not match {h} monomials")));
    }
    if h == 0 {
        return Ok(p.is_zero());
    }
    if cert.basis.iter().any(|m| m.nvars() != p.nvars()) {
        return Err(Error::Dimension("certificate basis over the wrong variables".into()));
    }
    let tol = coeff_tol(p);
    for i in 0..h {
        for j in 0..h {
            if !cert.a[(i, j)].approx_eq(&cert.a[(j, i)].conj(), tol) || !cert.b[(i, j)].approx_eq(&cert.b[(j, i)], tol) {
                return Ok(false);
            }
        }
    }
    let expanded = expand_block(cert);
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
    Ok(K::psd(&cert.block(), NUMERIC_TOL))
}

/// `Σ_μ p_μ L(μ)`.
pub fn functional_value<K: CertScalar>(p: &HermitianPolynomial<K>, cert: &MomentCertificate<K>) -> Result<K> {
    let mut acc = K::zero();
    for (e, c) in p.terms() {
        acc = acc.plus(&c.times(&cert.moment(e)?));
    }
    Ok(acc)
}

/// Moment matrix PSD, functional real, equal to `value_on_p` and negative.
pub fn verify_moment<K: CertScalar>(p: &HermitianPolynomial<K>, cert: &MomentCertificate<K>) -> Result<bool> {
    if !cert.basis.is_empty() && cert.basis.nvars() != p.nvars() {
        return Err(Error::Dimension("certificate basis over the wrong variables".into()));
    }
    let m = cert.moment_matrix()?;
    let value = functional_value(p, cert)?;
    let trace: f64 = (0..m.rows()).map(|i| m[(i, i)].to_c64().re).sum();
    let pmax = p.terms().map(|(_, c)| c.to_c64().norm()).fold(0.0, f64::max);
    let margin = 1e-9 * trace.abs().max(1e-300) * pmax.max(1.0);
    if !value.approx_eq(&cert.value_on_p, margin.max(1e-12)) {
        return Ok(false);
    }
    if !value.is_negative_real(margin) {
        return Ok(false);
    }
    Ok(K::psd(&m, 1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    type G = GaussRat;

    fn modulus_square() -> HermitianPolynomial<G> {
        HermitianPolynomial::new(Poly::monomial(ExponentPair::new(vec![1], vec![1]), G::int(1))).unwrap()
    }

    #[test]
    fn modulus_square_is_sos() {
        let p = modulus_square();
        let r = sos_check_auto(&p, &SosOptions::default()).unwrap();
        let SosVerdict::Sos(cert) = &r.verdict else {
            panic!("expected SOS, got {:?}", r.verdict);
        };
        assert!(verify_gram(&p, cert).unwrap());
        let rn = sos_check_auto(&p.to_c64(), &SosOptions::default()).unwrap();
        assert!(rn.verdict.is_sos());
    }

    #[test]
    fn negative_modulus_square_is_refuted() {
        let p = modulus_square().neg();
        let r = sos_check_auto(&p, &SosOptions::default()).unwrap();
        let SosVerdict::NotSos(cert) = &r.verdict else {
            panic!("expected refutation, got {:?}", r.verdict);
        };
        assert!(verify_moment(&p, cert).unwrap());
        assert!(cert.value_on_p.re.is_negative());
    }

    #[test]
    fn zero_polynomial_and_empty_certificate() {
        let p = HermitianPolynomial::<G>::zero(2);
        let cert = GramCertificate {
            basis: vec![],
            a: Matrix::filled(0, 0, G::int(0)),
            b: Matrix::filled(0, 0, G::int(0)),
        };
        assert!(verify_gram(&p, &cert).unwrap());
        assert!(sos_check_auto(&p, &SosOptions::default()).unwrap().verdict.is_sos());
    }

    #[test]
    fn stray_monomial_gives_refutation() {
        // z² + z̄² has no Gram representation over {1}
        let p = HermitianPolynomial::new(
            Poly::from_terms(1, [(ExponentPair::new(vec![2], vec![0]), G::int(1)), (ExponentPair::new(vec![0], vec![2]), G::int(1))]).unwrap(),
        )
        .unwrap();
        let basis = GramBasis::new(1, vec![ExponentPair::one(1)]).unwrap();
        let r = sos_check(&p, &basis, &SosOptions::default()).unwrap();
        let SosVerdict::NotSos(cert) = &r.verdict else {
            panic!("expected refutation");
        };
        assert!(verify_moment(&p, cert).unwrap());
    }

    #[test]
    fn moment_certificate_cannot_refute_sos() {
        let p = modulus_square();
        let basis = candidate_basis(&p);
        let mut moments = BTreeMap::new();
        for m in [ExponentPair::new(vec![1], vec![1]), ExponentPair::new(vec![2], vec![0])] {
            moments.insert(m, G::int(0));
        }
        moments.insert(ExponentPair::new(vec![1], vec![1]), G::int(-1));
        let cert = MomentCertificate {
            basis,
            moments,
            value_on_p: G::int(-1),
        };
        assert!(!verify_moment(&p, &cert).unwrap());
    }

    #[test]
    fn missing_moment_is_an_error() {
        let p = modulus_square();
        let cert = MomentCertificate {
            basis: candidate_basis(&p),
            moments: BTreeMap::new(),
            value_on_p: G::int(-1),
        };
        assert!(matches!(verify_moment(&p, &cert), Err(Error::MissingMoment(_))));
    }
}
