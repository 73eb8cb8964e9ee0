//! Non-SOS proofs from a parametrized curve of zeros.
//!
//! If `p = Σ g_i²` and `p` vanishes along `z(α)`, every `g_i` vanishes there
//! too. Clearing denominators turns this into exact linear conditions on the
//! coefficients of `g_i` over a candidate basis. Coordinates that are zero in
//! every solution cannot contribute to `p`, so a nonzero diagonal
//! coefficient of `p` supported only on them is a contradiction.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::linalg::{rational_is_psd, solve_linear_exact, HermitianMatrix, Matrix};
use crate::poly::{ExponentPair, HermitianPolynomial, Poly};
use crate::scalar::{GaussRat, Rat, Scalar};
use crate::sos::{functional_value, GramBasis, MomentCertificate};

type G = GaussRat;

/// `z(α) = (c_0(α), …, c_k(α))` in one complex parameter, where the
/// coordinates listed in `cleared` are divided by `c_d(α)` with
/// `d = denominator_index`. Variables of a polynomial are matched to
/// components by name when every name is known, otherwise by position.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroCurve {
    pub names: Vec<String>,
    pub components: Vec<Poly<G>>,
    pub denominator_index: Option<usize>,
    pub cleared: Vec<usize>,
    pub excluded: Vec<G>,
}

impl ZeroCurve {
    /// A curve with no components; imposes no conditions.
    pub fn empty() -> Self {
        ZeroCurve {
            names: Vec::new(),
            components: Vec::new(),
            denominator_index: None,
            cleared: Vec::new(),
            excluded: Vec::new(),
        }
    }

    pub fn new(
        names: Vec<String>,
        components: Vec<Poly<G>>,
        denominator_index: Option<usize>,
        cleared: Vec<usize>,
        excluded: Vec<G>,
    ) -> Result<Self> {
        let c = ZeroCurve {
            names,
            components,
            denominator_index,
            cleared,
            excluded,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.components.len();
        if !self.names.is_empty() && self.names.len() != k {
            return Err(Error::Dimension(format!("{} names for {k} components", self.names.len())));
        }
        if self.components.iter().any(|c| c.nvars() != 1) {
            return Err(Error::Invalid("curve components must be polynomials in one parameter".into()));
        }
        if self.denominator_index.is_some_and(|d| d >= k) || self.cleared.iter().any(|&i| i >= k) {
            return Err(Error::Dimension("curve index out of range".into()));
        }
        if !self.cleared.is_empty() && self.denominator_index.is_none() {
            return Err(Error::Invalid("cleared components need a denominator".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `c_d(α)`, or `1`.
    pub fn denominator(&self) -> Poly<G> {
        match self.denominator_index {
            Some(d) => self.components[d].clone(),
            None => Poly::constant(1, G::int(1)),
        }
    }

    /// The point `z(α)` with cleared coordinates divided, or `None` at a
    /// pole.
    pub fn point(&self, alpha: &G) -> Option<Vec<G>> {
        let a = [alpha.clone()];
        let d = self.denominator().eval(&a).ok()?;
        let dinv = if self.cleared.is_empty() { G::int(1) } else { d.inv()? };
        Some(
            self.components
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let v = c.eval(&a).expect("one parameter");
                    if self.cleared.contains(&i) {
                        &v * &dinv
                    } else {
                        v
                    }
                })
                .collect(),
        )
    }

    /// Component index for each variable of a polynomial with these names.
    fn component_map(&self, names: &[String], nvars: usize) -> Result<Vec<usize>> {
        if names.len() == nvars && names.iter().all(|n| self.names.contains(n)) {
            return Ok(names.iter().map(|n| self.names.iter().position(|m| m == n).expect("known")).collect());
        }
        if nvars == self.len() {
            return Ok((0..nvars).collect());
        }
        Err(Error::UnknownVariable(format!(
            "cannot match variables {names:?} to curve components {:?}",
            self.names
        )))
    }

    /// Degrees of `e` in the cleared coordinates.
    fn cleared_degree(&self, map: &[usize], e: &ExponentPair) -> (u32, u32) {
        let mut d = (0, 0);
        for (j, &c) in map.iter().enumerate() {
            if self.cleared.contains(&c) {
                d.0 += e.u[j];
                d.1 += e.v[j];
            }
        }
        d
    }

    /// `|D|^{2k} · e(z(α))` as a polynomial in `(α, ᾱ)`.
    fn cleared_monomial(&self, map: &[usize], e: &ExponentPair, k: u32, names: &[String]) -> Result<Poly<G>> {
        let (a, b) = self.cleared_degree(map, e);
        if a > k || b > k {
            return Err(Error::Clearing(format!(
                "{} needs power {} but {k} was given",
                e.display(names),
                a.max(b)
            )));
        }
        let subs: Vec<Poly<G>> = map.iter().map(|&c| self.components[c].clone()).collect();
        let mono = Poly::monomial(e.clone(), G::int(1)).compose(&subs)?;
        let d = self.denominator();
        mono.mul(&d.pow(k - a))?.mul(&d.conjugate().pow(k - b))
    }
}

fn names_or_default(p: &Poly<G>) -> Vec<String> {
    p.names().to_vec()
}

/// `|D|^{2K} p(z(α))` with the smallest `K` that clears every term.
pub fn cleared_residual(p: &HermitianPolynomial<G>, curve: &ZeroCurve) -> Result<(u32, Poly<G>)> {
    curve.validate()?;
    if p.is_zero() || curve.is_empty() {
        return Ok((0, Poly::zero(1)));
    }
    let names = names_or_default(p.poly());
    let map = curve.component_map(&names, p.nvars())?;
    let k = p
        .terms()
        .map(|(e, _)| {
            let (a, b) = curve.cleared_degree(&map, e);
            a.max(b)
        })
        .max()
        .unwrap_or(0);
    let mut out = Poly::zero(1);
    for (e, c) in p.terms() {
        out = out.add(&curve.cleared_monomial(&map, e, k, &names)?.scale(c))?;
    }
    Ok((k, out))
}

/// True iff `p` vanishes identically along the curve.
pub fn curve_vanishing_check(p: &HermitianPolynomial<G>, curve: &ZeroCurve) -> Result<bool> {
    Ok(cleared_residual(p, curve)?.1.is_zero())
}

/// Linear conditions `Σ_j c_j [α^r ᾱ^s](|D|^{2K} F_j(z(α))) = 0`, one row
/// per `(α, ᾱ)`-monomial, over independent complex coefficients `c_j` of
/// the basis monomials `F_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct VanishingSystem {
    pub names: Vec<String>,
    pub basis: GramBasis,
    pub clearing_power: u32,
    pub rows: Vec<ExponentPair>,
    pub matrix: Matrix<G>,
    pub kernel: Vec<Vec<G>>,
}

impl VanishingSystem {
    /// Nonzero entries of the row for `α^r ᾱ^s`.
    pub fn row(&self, r: u32, s: u32) -> Option<Vec<(ExponentPair, G)>> {
        let key = ExponentPair::new(vec![r], vec![s]);
        let i = self.rows.iter().position(|m| *m == key)?;
        Some(
            (0..self.matrix.cols())
                .filter(|&j| !Scalar::is_zero(&self.matrix[(i, j)]))
                .map(|j| (self.basis.monomials()[j].clone(), self.matrix[(i, j)].clone()))
                .collect(),
        )
    }

    /// Human-readable rows such as `α^4: 4·c[α·x̄4] = 0`.
    pub fn row_strings(&self) -> Vec<String> {
        let alpha = ["α".to_string()];
        (0..self.rows.len())
            .map(|i| {
                let lhs: Vec<String> = (0..self.matrix.cols())
                    .filter(|&j| !Scalar::is_zero(&self.matrix[(i, j)]))
                    .map(|j| format!("{}·c[{}]", self.matrix[(i, j)], self.basis.monomials()[j].display(&self.names)))
                    .collect();
                format!("{}: {} = 0", self.rows[i].display(&alpha), lhs.join(" + "))
            })
            .collect()
    }

    /// Each kernel vector annihilates every row.
    pub fn kernel_is_valid(&self) -> bool {
        self.kernel.iter().all(|v| {
            v.len() == self.matrix.cols()
                && self
                    .matrix
                    .mul_vec(v)
                    .map(|r| r.iter().all(Scalar::is_zero))
                    .unwrap_or(false)
        })
    }
}

/// [`build_vanishing_system_with`] with the clearing power set to the
/// largest total cleared degree of a basis monomial.
pub fn build_vanishing_system(names: &[String], basis: &GramBasis, curve: &ZeroCurve) -> Result<VanishingSystem> {
    build_vanishing_system_with(names, basis, curve, None)
}

pub fn build_vanishing_system_with(
    names: &[String],
    basis: &GramBasis,
    curve: &ZeroCurve,
    clearing_power: Option<u32>,
) -> Result<VanishingSystem> {
    curve.validate()?;
    let f = basis.monomials();
    let n = f.len();
    let names = names.to_vec();
    if curve.is_empty() {
        return Ok(VanishingSystem {
            names,
            basis: basis.clone(),
            clearing_power: 0,
            rows: Vec::new(),
            matrix: Matrix::zeros(0, n),
            kernel: identity_kernel(n),
        });
    }
    let nvars = if basis.is_empty() { names.len() } else { basis.nvars() };
    let map = curve.component_map(&names, nvars)?;
    let k = clearing_power.unwrap_or_else(|| {
        f.iter()
            .map(|e| {
                let (a, b) = curve.cleared_degree(&map, e);
                a + b
            })
            .max()
            .unwrap_or(0)
    });
    let columns: Vec<Poly<G>> = f
        .iter()
        .map(|e| curve.cleared_monomial(&map, e, k, &names))
        .collect::<Result<_>>()?;
    let mut row_set: BTreeSet<ExponentPair> = BTreeSet::new();
    for c in &columns {
        row_set.extend(c.terms().map(|(e, _)| e.clone()));
    }
    let rows: Vec<ExponentPair> = row_set.into_iter().collect();
    let matrix = Matrix::from_fn(rows.len(), n, |i, j| columns[j].coeff(&rows[i]));
    let kernel = if rows.is_empty() {
        identity_kernel(n)
    } else {
        solve_linear_exact(&matrix, &vec![G::int(0); rows.len()])?.kernel().to_vec()
    };
    Ok(VanishingSystem {
        names,
        basis: basis.clone(),
        clearing_power: k,
        rows,
        matrix,
        kernel,
    })
}

fn identity_kernel(n: usize) -> Vec<Vec<G>> {
    (0..n)
        .map(|i| (0..n).map(|j| G::int(i64::from(i == j))).collect())
        .collect()
}

/// Basis monomials whose coordinate vanishes in every kernel vector.
pub fn forced_zero_coordinates(system: &VanishingSystem) -> Vec<ExponentPair> {
    let f = system.basis.monomials();
    (0..f.len())
        .filter(|&j| system.kernel.iter().all(|v| Scalar::is_zero(&v[j])))
        .map(|j| f[j].clone())
        .collect()
}

/// The diagonal coefficient that no admissible decomposition can produce.
#[derive(Clone, Debug, PartialEq)]
pub struct Contradiction {
    /// `ν`, a forced-zero basis monomial.
    pub monomial: ExponentPair,
    /// `ν̄ν`.
    pub diagonal: ExponentPair,
    /// Coefficient of `ν̄ν` in `p`.
    pub coefficient: G,
    /// Every basis pair `(F_a, F_b)` with `conj(F_a)·F_b = ν̄ν`.
    pub pairs: Vec<(ExponentPair, ExponentPair)>,
}

/// Everything needed to re-check a non-SOS proof by hand.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofReport {
    pub curve_clearing_power: u32,
    pub curve_vanishes: bool,
    pub system: VanishingSystem,
    pub forced: Vec<ExponentPair>,
    pub contradiction: Contradiction,
}

impl ProofReport {
    pub fn summary(&self) -> String {
        let names = &self.system.names;
        let c = &self.contradiction;
        format!(
            "coefficient of {} in p is {} but every term producing it involves forced-zero monomials {{{}}}",
            c.diagonal.display(names),
            c.coefficient,
            self.forced.iter().map(|m| m.display(names)).collect::<Vec<_>>().join(", ")
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZerosOutcome {
    NotSosProof(Box<ProofReport>),
    NoContradiction,
}

impl ZerosOutcome {
    pub fn is_proof(&self) -> bool {
        matches!(self, ZerosOutcome::NotSosProof(_))
    }
}

/// Searches the forced set for `ν` with `p_{ν̄ν} ≠ 0` such that every
/// factorization of `ν̄ν` over the basis uses only forced monomials or
/// their conjugates.
pub fn find_contradiction(p: &HermitianPolynomial<G>, basis: &GramBasis, forced: &[ExponentPair]) -> Option<Contradiction> {
    let zero: BTreeSet<ExponentPair> = forced.iter().flat_map(|m| [m.clone(), m.conj()]).collect();
    let f = basis.monomials();
    for nu in forced {
        let diagonal = nu.conj_mul(nu);
        let coefficient = p.coeff(&diagonal);
        if Scalar::is_zero(&coefficient) {
            continue;
        }
        let mut pairs = Vec::new();
        let mut closed = true;
        for a in f {
            for b in f {
                if a.conj_mul(b) == diagonal {
                    closed &= zero.contains(a) && zero.contains(b);
                    pairs.push((a.clone(), b.clone()));
                }
            }
        }
        if closed {
            return Some(Contradiction {
                monomial: nu.clone(),
                diagonal,
                coefficient,
                pairs,
            });
        }
    }
    None
}

/// Runs the contradiction search and, on success, assembles the report from
/// the curve check on `p` and the system.
pub fn contradiction_check(
    p: &HermitianPolynomial<G>,
    curve: &ZeroCurve,
    system: &VanishingSystem,
    forced: &[ExponentPair],
) -> Result<ZerosOutcome> {
    if forced.iter().any(|m| !system.basis.contains(m)) {
        return Err(Error::Invalid("forced monomials must lie in the basis".into()));
    }
    let Some(contradiction) = find_contradiction(p, &system.basis, forced) else {
        return Ok(ZerosOutcome::NoContradiction);
    };
    let (k, residual) = cleared_residual(p, curve)?;
    Ok(ZerosOutcome::NotSosProof(Box::new(ProofReport {
        curve_clearing_power: k,
        curve_vanishes: residual.is_zero(),
        system: system.clone(),
        forced: forced.to_vec(),
        contradiction,
    })))
}

/// The whole pipeline over a given basis. A proof requires `p` to vanish on
/// the curve.
pub fn prove_not_sos(p: &HermitianPolynomial<G>, curve: &ZeroCurve, basis: &GramBasis) -> Result<ZerosOutcome> {
    if !curve_vanishing_check(p, curve)? {
        return Ok(ZerosOutcome::NoContradiction);
    }
    let system = build_vanishing_system(p.poly().names(), basis, curve)?;
    let forced = forced_zero_coordinates(&system);
    contradiction_check(p, curve, &system, &forced)
}

/// Recomputes every step of a report from `p` and the curve.
pub fn verify_proof(p: &HermitianPolynomial<G>, curve: &ZeroCurve, report: &ProofReport) -> Result<bool> {
    if !report.curve_vanishes || !curve_vanishing_check(p, curve)? {
        return Ok(false);
    }
    let sys = build_vanishing_system_with(
        &report.system.names,
        &report.system.basis,
        curve,
        Some(report.system.clearing_power),
    )?;
    if sys.rows != report.system.rows || sys.matrix != report.system.matrix {
        return Ok(false);
    }
    let (_, pivots) = crate::linalg::rref(&sys.matrix);
    if !report.system.kernel_is_valid() || report.system.kernel.len() + pivots.len() != sys.matrix.cols() {
        return Ok(false);
    }
    // a spanning kernel set is independent iff its rank equals its length
    if !report.system.kernel.is_empty() {
        let k = &report.system.kernel;
        let km = Matrix::from_fn(k.len(), sys.matrix.cols(), |i, j| k[i][j].clone());
        if crate::linalg::rref(&km).1.len() != k.len() {
            return Ok(false);
        }
    }
    if forced_zero_coordinates(&report.system) != report.forced {
        return Ok(false);
    }
    Ok(find_contradiction(p, &sys.basis, &report.forced).as_ref() == Some(&report.contradiction))
}

/// Gaussian integers `a + bi` with `|a|, |b| ≤ 3`, skipping excluded values
/// and poles.
fn curve_parameters(curve: &ZeroCurve) -> impl Iterator<Item = (G, Vec<G>)> + '_ {
    (0..7i64 * 7).filter_map(move |k| {
        let alpha = G::complex(k / 7 - 3, k % 7 - 3);
        if curve.excluded.contains(&alpha) {
            return None;
        }
        curve.point(&alpha).map(|z| (alpha, z))
    })
}

/// Moment certificate that agrees with a proof report: point evaluations
/// along the curve, minus a small multiple of the functional that picks out
/// `ν̄ν`.
pub fn proof_moment_certificate(
    p: &HermitianPolynomial<G>,
    curve: &ZeroCurve,
    report: &ProofReport,
) -> Result<MomentCertificate<G>> {
    let basis = &report.system.basis;
    let f = basis.monomials();
    let names = p.poly().names().to_vec();
    let map = curve.component_map(&names, p.nvars())?;
    let mut classes: BTreeSet<ExponentPair> = BTreeSet::new();
    for a in f {
        for b in f {
            classes.insert(b.conj_mul(a));
        }
    }
    classes.extend(p.terms().map(|(e, _)| e.clone()));
    let mut moments: BTreeMap<ExponentPair, G> = classes.iter().map(|c| (c.clone(), G::int(0))).collect();
    for (_, z) in curve_parameters(curve).take(3 * f.len().max(1)) {
        let zp: Vec<G> = map.iter().map(|&c| z[c].clone()).collect();
        for (c, v) in moments.iter_mut() {
            *v = &*v + &c.eval(&zp);
        }
    }
    let c = &report.contradiction;
    let sign = if c.coefficient.re > Rat::from_integer(0.into()) { 1 } else { -1 };
    let mut eps = G::int(sign);
    for _ in 0..200 {
        let mut m = moments.clone();
        let d = m.get_mut(&c.diagonal).expect("diagonal is a product");
        *d = &*d - &eps;
        let cert = MomentCertificate {
            basis: basis.clone(),
            moments: m,
            value_on_p: G::int(0),
        };
        let mm = cert.moment_matrix()?;
        if rational_is_psd(&HermitianMatrix::new(mm.clone())?) {
            let trace = mm.trace();
            let inv = trace.re.recip();
            let moments = cert.moments.into_iter().map(|(k, v)| (k, v.scale(&inv))).collect();
            let mut cert = MomentCertificate {
                basis: basis.clone(),
                moments,
                value_on_p: G::int(0),
            };
            cert.value_on_p = functional_value(p, &cert)?;
            return Ok(cert);
        }
        eps = eps.scale(&Rat::new(1.into(), 2.into()));
    }
    Err(Error::CertificateRejected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::sos::verify_moment;

    fn appendix_system() -> VanishingSystem {
        let p = fixtures::appendix_p();
        build_vanishing_system(p.poly().names(), &fixtures::appendix_basis(), &fixtures::zero_curve()).unwrap()
    }

    fn names() -> Vec<String> {
        fixtures::appendix_p().poly().names().to_vec()
    }

    fn mono(u: &[(usize, u32)], v: &[(usize, u32)]) -> ExponentPair {
        let mut e = ExponentPair::one(4);
        for &(i, k) in u {
            e.u[i] = k;
        }
        for &(i, k) in v {
            e.v[i] = k;
        }
        e
    }

    // variables (x2, x3, x4, alpha)
    const X3: usize = 1;
    const X4: usize = 2;
    const AL: usize = 3;

    #[test]
    fn w_vanishes_on_the_curve() {
        assert!(curve_vanishing_check(&fixtures::hakye_w(), &fixtures::zero_curve()).unwrap());
        assert!(curve_vanishing_check(&fixtures::appendix_p(), &fixtures::zero_curve()).unwrap());
    }

    #[test]
    fn flipped_x3_breaks_vanishing() {
        let mut c = fixtures::zero_curve();
        c.components[2] = c.components[2].neg();
        assert!(!curve_vanishing_check(&fixtures::hakye_w(), &c).unwrap());
    }

    #[test]
    fn zero_polynomial_vanishes() {
        let z = HermitianPolynomial::zero(6);
        assert!(curve_vanishing_check(&z, &fixtures::zero_curve()).unwrap());
    }

    #[test]
    fn appendix_rows_match_hand_computation() {
        let s = appendix_system();
        assert_eq!(s.clearing_power, 1);
        assert_eq!(s.matrix.cols(), 15);
        assert!(s.kernel_is_valid());
        let h_bar = mono(&[(AL, 1)], &[(X4, 1)]);
        let g_bar = mono(&[(AL, 1)], &[(X3, 1)]);
        let d_bar = mono(&[], &[(X4, 1)]);
        assert_eq!(s.row(4, 0).unwrap(), vec![(h_bar.clone(), G::int(4))]);
        let mut r = s.row(4, 1).unwrap();
        r.sort_by(|a, b| a.0.cmp(&b.0));
        let mut want = vec![(g_bar.clone(), G::int(4)), (h_bar, G::int(2))];
        want.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(r, want);
        let mut r = s.row(2, 0).unwrap();
        r.sort_by(|a, b| a.0.cmp(&b.0));
        let mut want = vec![(d_bar, G::int(-4)), (g_bar, G::int(-8))];
        want.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(r, want);
    }

    #[test]
    fn appendix_forced_set_and_proof() {
        let p = fixtures::appendix_p();
        let curve = fixtures::zero_curve();
        let s = appendix_system();
        let forced = forced_zero_coordinates(&s);
        for m in [mono(&[(X4, 1)], &[]), mono(&[(X3, 1)], &[(AL, 1)]), mono(&[(X4, 1)], &[(AL, 1)])] {
            assert!(forced.contains(&m), "{}", m.display(&names()));
        }
        let ZerosOutcome::NotSosProof(report) = contradiction_check(&p, &curve, &s, &forced).unwrap() else {
            panic!("expected a proof");
        };
        assert_eq!(report.contradiction.diagonal, mono(&[(X4, 1)], &[(X4, 1)]));
        assert_eq!(report.contradiction.coefficient, G::int(4));
        assert!(verify_proof(&p, &curve, &report).unwrap());
        let cert = proof_moment_certificate(&p, &curve, &report).unwrap();
        assert!(verify_moment(&p, &cert).unwrap());
    }

    #[test]
    fn deleting_the_diagonal_term_removes_the_contradiction() {
        let mut q = fixtures::appendix_p().into_poly();
        let d = mono(&[(X4, 1)], &[(X4, 1)]);
        q.add_term(d, G::int(-4));
        let q = HermitianPolynomial::new(q).unwrap();
        let x4 = mono(&[(X4, 1)], &[]);
        assert!(find_contradiction(&q, &fixtures::appendix_basis(), &[x4]).is_none());
        // q no longer vanishes on the curve, so the pipeline stops early
        let curve = fixtures::zero_curve();
        assert!(!curve_vanishing_check(&q, &curve).unwrap());
        let out = prove_not_sos(&q, &curve, &fixtures::appendix_basis()).unwrap();
        assert_eq!(out, ZerosOutcome::NoContradiction);
    }

    #[test]
    fn empty_curve_forces_nothing() {
        let s = build_vanishing_system(&names(), &fixtures::appendix_basis(), &ZeroCurve::empty()).unwrap();
        assert!(s.rows.is_empty());
        assert!(forced_zero_coordinates(&s).is_empty());
    }

    #[test]
    fn constant_basis_is_forced_by_any_curve() {
        let basis = GramBasis::new(4, vec![ExponentPair::one(4)]).unwrap();
        let s = build_vanishing_system(&names(), &basis, &fixtures::zero_curve()).unwrap();
        assert_eq!(forced_zero_coordinates(&s), vec![ExponentPair::one(4)]);
    }

    #[test]
    fn too_small_clearing_power_is_rejected() {
        let r = build_vanishing_system_with(&names(), &fixtures::appendix_basis(), &fixtures::zero_curve(), Some(0));
        assert!(matches!(r, Err(Error::Clearing(_))));
    }
}
