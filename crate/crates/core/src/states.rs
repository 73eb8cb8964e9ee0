//! Density matrices on `C^n ⊗ C^m`: partial transpose and trace, PPT tests,
//! seeded separable states and one-sided map application.
//!
//! Index convention: `ρ[(i m + a), (j m + b)]` with `i, j` on the first
//! factor and `a, b` on the second.

use rand_distr::{Distribution, Exp1};

use crate::choi::{random_unit_vector, stream_rng, MatrixMap};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, HermitianMatrix, Matrix};
use crate::scalar::{Scalar, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Hermitian, unit trace and PSD up to `1e-10`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<K> {
    dims: (usize, usize),
    matrix: HermitianMatrix<K>,
}

pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

impl<K: Scalar> DensityMatrix<K> {
    pub fn new(dims: (usize, usize), matrix: HermitianMatrix<K>) -> Result<Self> {
        check_dims(dims, matrix.dim())?;
        let tr = matrix.matrix().trace();
        let one = K::one();
        if !tr.approx_eq(&one, TRACE_TOL) {
            return Err(Error::Invalid(format!("trace {} is not 1", tr.to_c64())));
        }
        let lmin = min_eig(matrix.matrix());
        if lmin < -PSD_TOL {
            return Err(Error::Invalid(format!("minimum eigenvalue {lmin:e} is negative")));
        }
        Ok(DensityMatrix { dims, matrix })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn matrix(&self) -> &HermitianMatrix<K> {
        &self.matrix
    }

    pub fn to_c64(&self) -> DensityMatrix<C64> {
        DensityMatrix {
            dims: self.dims,
            matrix: HermitianMatrix::new(self.matrix.matrix().to_c64()).expect("Hermitian"),
        }
    }
}

fn check_dims(dims: (usize, usize), size: usize) -> Result<()> {
    if dims.0 * dims.1 != size {
        return Err(Error::Dimension(format!(
            "dims {}x{} for a matrix of size {size}",
            dims.0, dims.1
        )));
    }
    Ok(())
}

fn min_eig<K: Scalar>(m: &Matrix<K>) -> f64 {
    if m.rows() == 0 {
        return 0.0;
    }
    hermitian_eigenvalues(&HermitianMatrix::new(m.to_c64().hermitian_part()).expect("Hermitian part"))[0]
}

/// `I/(nm)`.
pub fn maximally_mixed<K: Scalar>(dims: (usize, usize)) -> DensityMatrix<K> {
    let d = dims.0 * dims.1;
    let v = K::from_ratio(1, d as i64);
    let m = Matrix::from_fn(d, d, |i, j| if i == j { v.clone() } else { K::zero() });
    DensityMatrix {
        dims,
        matrix: HermitianMatrix::new(m).expect("diagonal"),
    }
}

/// `|Φ⁺⟩⟨Φ⁺|` with `|Φ⁺⟩ = Σ_i |ii⟩ / √d`.
pub fn maximally_entangled<K: Scalar>(d: usize) -> DensityMatrix<K> {
    let v = K::from_ratio(1, d as i64);
    let m = Matrix::from_fn(d * d, d * d, |r, c| {
        if r % (d + 1) == 0 && c % (d + 1) == 0 {
            v.clone()
        } else {
            K::zero()
        }
    });
    DensityMatrix {
        dims: (d, d),
        matrix: HermitianMatrix::new(m).expect("rank one"),
    }
}

/// Transpose on one tensor factor. An involution.
pub fn partial_transpose<K: Scalar>(rho: &HermitianMatrix<K>, dims: (usize, usize), which: Factor) -> Result<HermitianMatrix<K>> {
    check_dims(dims, rho.dim())?;
    let (n, m) = dims;
    let r = rho.matrix();
    let out = Matrix::from_fn(n * m, n * m, |p, q| {
        let (i, a, j, b) = (p / m, p % m, q / m, q % m);
        match which {
            Factor::Second => r[(i * m + b, j * m + a)].clone(),
            Factor::First => r[(j * m + a, i * m + b)].clone(),
        }
    });
    HermitianMatrix::new(out)
}

/// Trace over one tensor factor.
pub fn partial_trace<K: Scalar>(rho: &HermitianMatrix<K>, dims: (usize, usize), which: Factor) -> Result<HermitianMatrix<K>> {
    check_dims(dims, rho.dim())?;
    let (n, m) = dims;
    let r = rho.matrix();
    let out = match which {
        Factor::Second => Matrix::from_fn(n, n, |i, j| {
            (0..m).fold(K::zero(), |acc, a| acc.plus(&r[(i * m + a, j * m + a)]))
        }),
        Factor::First => Matrix::from_fn(m, m, |a, b| {
            (0..n).fold(K::zero(), |acc, i| acc.plus(&r[(i * m + a, i * m + b)]))
        }),
    };
    HermitianMatrix::new(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PptResult {
    pub pass: bool,
    pub min_eigenvalue: f64,
    pub min_eigenvalue_pt: f64,
}

/// `λ_min(ρ) ≥ −tol` and `λ_min(ρ^{T₂}) ≥ −tol`.
pub fn ppt_check<K: Scalar>(rho: &DensityMatrix<K>, tol: f64) -> PptResult {
    let pt = partial_transpose(&rho.matrix, rho.dims, Factor::Second).expect("dims checked");
    let min_eigenvalue = min_eig(rho.matrix.matrix());
    let min_eigenvalue_pt = min_eig(pt.matrix());
    PptResult {
        pass: min_eigenvalue >= -tol && min_eigenvalue_pt >= -tol,
        min_eigenvalue,
        min_eigenvalue_pt,
    }
}

/// One term `p_k x_k x_k† ⊗ y_k y_k†` of a separable decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    pub x: Vec<C64>,
    pub y: Vec<C64>,
}

/// A separable state together with the decomposition that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableState {
    pub state: DensityMatrix<C64>,
    pub terms: Vec<ProductTerm>,
}

impl SeparableState {
    pub fn from_terms(dims: (usize, usize), terms: Vec<ProductTerm>) -> Result<Self> {
        let (n, m) = dims;
        if terms.iter().any(|t| t.x.len() != n || t.y.len() != m) {
            return Err(Error::Dimension("product term does not match dims".into()));
        }
        let mut acc = Matrix::filled(n * m, n * m, C64::new(0.0, 0.0));
        for t in &terms {
            let v: Vec<C64> = t.x.iter().flat_map(|xi| t.y.iter().map(move |ya| xi * ya)).collect();
            for p in 0..n * m {
                for q in 0..n * m {
                    acc[(p, q)] += t.weight * v[p] * v[q].conj();
                }
            }
        }
        let state = DensityMatrix::new(dims, HermitianMatrix::new(acc.hermitian_part())?)?;
        Ok(SeparableState { state, terms })
    }

    /// Pads every `x_k` with zeros up to length `big_n`.
    pub fn embed_section(&self, big_n: usize) -> Result<SeparableState> {
        let (n, m) = self.state.dims;
        if big_n < n {
            return Err(Error::Dimension(format!("cannot embed {n} into {big_n}")));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut x = t.x.clone();
                x.resize(big_n, C64::new(0.0, 0.0));
                ProductTerm {
                    weight: t.weight,
                    x,
                    y: t.y.clone(),
                }
            })
            .collect();
        SeparableState::from_terms((big_n, m), terms)
    }
}

/// `Σ_k p_k x_k x_k† ⊗ y_k y_k†` with Dirichlet(1, …, 1) weights and unit
/// complex normal vectors; deterministic in `seed`.
pub fn random_separable(dims: (usize, usize), k: usize, seed: u64) -> Result<SeparableState> {
    if k == 0 {
        return Err(Error::Invalid("need at least one product term".into()));
    }
    let (n, m) = dims;
    let mut rng = stream_rng(seed, 0);
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = raw.iter().sum();
    let terms = raw
        .into_iter()
        .map(|w| ProductTerm {
            weight: w / total,
            x: random_unit_vector(&mut rng, n),
            y: random_unit_vector(&mut rng, m),
        })
        .collect();
    SeparableState::from_terms(dims, terms)
}

/// `(I ⊗ Φ)(ρ)`: applies `Φ: M_m → M_k` to every `m × m` block.
pub fn apply_map_one_side<K: Scalar>(
    phi: &MatrixMap<K>,
    rho: &HermitianMatrix<K>,
    dims: (usize, usize),
) -> Result<HermitianMatrix<K>> {
    check_dims(dims, rho.dim())?;
    let (n, m) = dims;
    if phi.in_dim() != m {
        return Err(Error::Dimension(format!(
            "map on M_{} applied to a second factor of size {m}",
            phi.in_dim()
        )));
    }
    let k = phi.out_dim();
    let r = rho.matrix();
    let mut out = Matrix::filled(n * k, n * k, K::zero());
    for i in 0..n {
        for j in 0..n {
            let block = Matrix::from_fn(m, m, |a, b| r[(i * m + a, j * m + b)].clone());
            let img = phi.apply(&block)?;
            for a in 0..k {
                for b in 0..k {
                    out[(i * k + a, j * k + b)] = img[(a, b)].clone();
                }
            }
        }
    }
    HermitianMatrix::new(out)
}

/// `Σ_kl (C_Φ)_kl (ρ^{T₂})_kl`; on a product state `xx† ⊗ yy†` this is `y† Φ(xx†) y`,
/// so it is nonnegative on separable states whenever `Φ` is positive.
pub fn witness_value<K: Scalar>(phi: &MatrixMap<K>, rho: &HermitianMatrix<K>, dims: (usize, usize)) -> Result<f64> {
    if dims != (phi.in_dim(), phi.out_dim()) {
        return Err(Error::Dimension("witness and state dims differ".into()));
    }
    let pt = partial_transpose(rho, dims, Factor::Second)?;
    let c = phi.choi().matrix().to_c64();
    let r = pt.matrix().to_c64();
    let d = c.rows();
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..d {
        for q in 0..d {
            acc += c[(p, q)] * r[(p, q)];
        }
    }
    Ok(acc.re)
}

/// Pads the first factor with zeros, from `(n, m)` to `(N, m)`.
pub fn embed_section<K: Scalar>(rho: &DensityMatrix<K>, big_n: usize) -> Result<DensityMatrix<K>> {
    let (n, m) = rho.dims;
    if big_n < n {
        return Err(Error::Dimension(format!("cannot embed {n} into {big_n}")));
    }
    let r = rho.matrix.matrix();
    let out = Matrix::from_fn(big_n * m, big_n * m, |p, q| {
        let (i, a, j, b) = (p / m, p % m, q / m, q % m);
        if i < n && j < n {
            r[(i * m + a, j * m + b)].clone()
        } else {
            K::zero()
        }
    });
    DensityMatrix::new((big_n, m), HermitianMatrix::new(out)?)
}

/// `(Tr₂ρ)_ii = 0` for `i = n, …, N − 1`, within `1e-12`.
pub fn section_predicate<K: Scalar>(rho: &DensityMatrix<K>, n: usize) -> Result<bool> {
    let (big_n, _) = rho.dims;
    if n > big_n {
        return Err(Error::Dimension(format!("section of size {n} in {big_n}")));
    }
    let t = partial_trace(&rho.matrix, rho.dims, Factor::Second)?;
    Ok((n..big_n).all(|i| t.get(i, i).to_c64().norm() <= 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choi::MatrixMap;
    use crate::fixtures;
    use crate::scalar::GaussRat;

    type G = GaussRat;

    #[test]
    fn bell_partial_transpose_spectrum() {
        let bell = maximally_entangled::<G>(2);
        assert_eq!(bell.matrix(), &fixtures::bell_state());
        let pt = partial_transpose(bell.matrix(), (2, 2), Factor::Second).unwrap();
        let ev = hermitian_eigenvalues(&HermitianMatrix::new(pt.matrix().to_c64()).unwrap());
        let want = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
        let r = ppt_check(&bell, 1e-10);
        assert!(!r.pass);
        assert!((r.min_eigenvalue_pt + 0.5).abs() < 1e-10);
    }

    #[test]
    fn partial_transpose_is_involution() {
        let s = random_separable((3, 2), 4, 7).unwrap();
        let m = s.state.matrix();
        for f in [Factor::First, Factor::Second] {
            let once = partial_transpose(m, (3, 2), f).unwrap();
            let twice = partial_transpose(&once, (3, 2), f).unwrap();
            assert_eq!(&twice, m);
            assert!((once.matrix().trace() - m.matrix().trace()).norm() < 1e-14);
        }
    }

    #[test]
    fn product_state_partial_transpose_conjugates_y() {
        let t = ProductTerm {
            weight: 1.0,
            x: vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)],
            y: vec![C64::new(0.0, 1.0 / 2f64.sqrt()), C64::new(1.0 / 2f64.sqrt(), 0.0)],
        };
        let s = SeparableState::from_terms((2, 2), vec![t.clone()]).unwrap();
        let pt = partial_transpose(s.state.matrix(), (2, 2), Factor::Second).unwrap();
        let conj = ProductTerm {
            y: t.y.iter().map(|z| z.conj()).collect(),
            ..t
        };
        let want = SeparableState::from_terms((2, 2), vec![conj]).unwrap();
        let d = pt.matrix().sub(want.state.matrix().matrix()).unwrap().max_abs();
        assert!(d < 1e-14);
    }

    #[test]
    fn diagonal_state_is_fixed_by_partial_transpose() {
        let rho = maximally_mixed::<G>((2, 3));
        assert_eq!(&partial_transpose(rho.matrix(), (2, 3), Factor::Second).unwrap(), rho.matrix());
        assert!(ppt_check(&rho, 1e-10).pass);
    }

    #[test]
    fn one_term_separable_state_is_rank_one() {
        let s = random_separable((3, 3), 1, 1).unwrap();
        let ev = hermitian_eigenvalues(s.state.matrix());
        assert!(ev[..8].iter().all(|v| v.abs() < 1e-12));
        assert!((ev[8] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transpose_map_matches_partial_transpose() {
        let s = random_separable((2, 3), 3, 11).unwrap();
        let t = MatrixMap::<C64>::transpose_map(3);
        let a = apply_map_one_side(&t, s.state.matrix(), (2, 3)).unwrap();
        let b = partial_transpose(s.state.matrix(), (2, 3), Factor::Second).unwrap();
        assert!(a.matrix().sub(b.matrix()).unwrap().max_abs() < 1e-14);
        let id = apply_map_one_side(&MatrixMap::<C64>::identity(3), s.state.matrix(), (2, 3)).unwrap();
        assert_eq!(&id, s.state.matrix());
    }

    #[test]
    fn witness_value_is_the_biquadratic_form() {
        let phi = fixtures::hakye_map().to_c64();
        let t = ProductTerm {
            weight: 1.0,
            x: vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)],
            y: vec![C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(-0.5, 0.0)],
        };
        let s = SeparableState::from_terms((2, 4), vec![t.clone()]).unwrap();
        let w = witness_value(&phi, s.state.matrix(), (2, 4)).unwrap();
        let xx = Matrix::from_fn(2, 2, |i, j| t.x[i] * t.x[j].conj());
        let img = phi.apply(&xx).unwrap();
        let y = &t.y;
        let direct = (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .map(|(a, b)| y[a].conj() * img[(a, b)] * y[b])
            .sum::<C64>();
        assert!((w - direct.re).abs() < 1e-12);
    }

    #[test]
    fn section_round_trip() {
        let s = random_separable((2, 3), 3, 5).unwrap();
        let e = embed_section(&s.state, 4).unwrap();
        assert!(section_predicate(&e, 2).unwrap());
        let big = s.embed_section(4).unwrap();
        assert!(big.state.matrix().matrix().sub(e.matrix().matrix()).unwrap().max_abs() < 1e-14);
        assert!(big.terms.iter().all(|t| t.x[2..].iter().all(|z| z.norm() == 0.0)));
        assert!(!section_predicate(&maximally_mixed::<G>((4, 3)), 2).unwrap());
        assert!(embed_section(&s.state, 1).is_err());
    }

    #[test]
    fn support_on_last_coordinate_breaks_predicate() {
        let t = ProductTerm {
            weight: 1.0,
            x: vec![C64::new(0.6, 0.0), C64::new(0.0, 0.0), C64::new(0.8, 0.0)],
            y: vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        };
        let s = SeparableState::from_terms((3, 2), vec![t]).unwrap();
        assert!(!section_predicate(&s.state, 2).unwrap());
    }
}
