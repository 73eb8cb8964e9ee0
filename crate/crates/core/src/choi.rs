//! Linear maps on matrices stored as Choi matrices, and their biquadratic forms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, HermitianMatrix, Matrix};
use crate::par::{map_range, Exec};
use crate::poly::{Block, ExponentPair, HermitianPolynomial, Poly};
use crate::scalar::{Scalar, C64};

/// Which block of variables feeds the map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// `p(x, y) = y† Φ(x x†) y`, variables `[x (input); y (output)]`.
    InputFirst,
    /// `W(x, y) = x† Φ(y y†) x`, variables `[x (output); y (input)]`.
    OutputFirst,
}

/// `Φ: M_m → M_n` with `choi[(i n + a, j n + b)] = Φ(E_ij)[a][b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixMap<K> {
    in_dim: usize,
    out_dim: usize,
    choi: HermitianMatrix<K>,
}

impl<K: Scalar> MatrixMap<K> {
    pub fn new(in_dim: usize, out_dim: usize, choi: HermitianMatrix<K>) -> Result<Self> {
        if choi.dim() != in_dim * out_dim {
            return Err(Error::Dimension(format!(
                "Choi matrix of size {} for a map M_{in_dim} -> M_{out_dim}",
                choi.dim()
            )));
        }
        Ok(MatrixMap {
            in_dim,
            out_dim,
            choi,
        })
    }

    /// Tabulates `f` on the matrix units.
    pub fn from_fn(in_dim: usize, out_dim: usize, f: impl Fn(&Matrix<K>) -> Matrix<K>) -> Result<Self> {
        let mut c = Matrix::<K>::zeros(in_dim * out_dim, in_dim * out_dim);
        for i in 0..in_dim {
            for j in 0..in_dim {
                let img = f(&Matrix::unit(in_dim, i, j));
                if img.rows() != out_dim || img.cols() != out_dim {
                    return Err(Error::Dimension("image has the wrong shape".into()));
                }
                for a in 0..out_dim {
                    for b in 0..out_dim {
                        c[(i * out_dim + a, j * out_dim + b)] = img[(a, b)].clone();
                    }
                }
            }
        }
        MatrixMap::new(in_dim, out_dim, HermitianMatrix::new(c)?)
    }

    pub fn identity(n: usize) -> Self {
        MatrixMap::from_fn(n, n, |x| x.clone()).expect("identity map")
    }

    pub fn transpose_map(n: usize) -> Self {
        MatrixMap::from_fn(n, n, |x| x.transpose()).expect("transpose map")
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn choi(&self) -> &HermitianMatrix<K> {
        &self.choi
    }

    /// `Φ(E_ij)`
    pub fn block(&self, i: usize, j: usize) -> Matrix<K> {
        let n = self.out_dim;
        Matrix::from_fn(n, n, |a, b| self.choi.get(i * n + a, j * n + b).clone())
    }

    pub fn apply(&self, x: &Matrix<K>) -> Result<Matrix<K>> {
        if x.rows() != self.in_dim || x.cols() != self.in_dim {
            return Err(Error::Dimension(format!(
                "{}x{} input for a map on M_{}",
                x.rows(),
                x.cols(),
                self.in_dim
            )));
        }
        let n = self.out_dim;
        let mut out = Matrix::<K>::zeros(n, n);
        for i in 0..self.in_dim {
            for j in 0..self.in_dim {
                let c = &x[(i, j)];
                if c.is_zero() {
                    continue;
                }
                for a in 0..n {
                    for b in 0..n {
                        let v = self.choi.get(i * n + a, j * n + b);
                        if !v.is_zero() {
                            out[(a, b)] = out[(a, b)].plus(&c.times(v));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.in_dim != o.in_dim || self.out_dim != o.out_dim {
            return Err(Error::Dimension("maps of different shapes".into()));
        }
        let c = self.choi.matrix().add(o.choi.matrix())?;
        MatrixMap::new(self.in_dim, self.out_dim, HermitianMatrix::new(c)?)
    }

    /// `Φ ∘ T`
    pub fn compose_transpose(&self) -> Self {
        MatrixMap::from_fn(self.in_dim, self.out_dim, |x| {
            self.apply(&x.transpose()).expect("shape")
        })
        .expect("Hermiticity is preserved")
    }

    pub fn to_c64(&self) -> MatrixMap<C64> {
        MatrixMap {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            choi: HermitianMatrix::new(self.choi.matrix().to_c64()).expect("Hermitian"),
        }
    }

    /// Biquadratic Hermitian form of the map.
    pub fn map_to_biquadratic(&self, orientation: Orientation) -> HermitianPolynomial<K> {
        let (m, n) = (self.in_dim, self.out_dim);
        let nv = m + n;
        // index of input variable i and output variable a
        let (inp, out): (Box<dyn Fn(usize) -> usize>, Box<dyn Fn(usize) -> usize>) = match orientation {
            Orientation::InputFirst => (Box::new(|i| i), Box::new(move |a| m + a)),
            Orientation::OutputFirst => (Box::new(move |i| n + i), Box::new(|a| a)),
        };
        let mut p = Poly::zero(nv);
        for i in 0..m {
            for j in 0..m {
                for a in 0..n {
                    for b in 0..n {
                        let c = self.choi.get(i * n + a, j * n + b);
                        if c.is_zero() {
                            continue;
                        }
                        // x_i x̄_j ȳ_a y_b (InputFirst naming)
                        let mut e = ExponentPair::one(nv);
                        e.u[inp(i)] += 1;
                        e.v[inp(j)] += 1;
                        e.v[out(a)] += 1;
                        e.u[out(b)] += 1;
                        p.add_term(e, c.clone());
                    }
                }
            }
        }
        let (names, blocks) = biquadratic_layout(orientation, m, n);
        let p = p.with_names(names).expect("names").with_blocks(blocks).expect("blocks");
        HermitianPolynomial::new(p).expect("Choi matrix is Hermitian")
    }

    /// Left inverse of [`MatrixMap::map_to_biquadratic`]; reads the blocks
    /// `x` and `y` from the polynomial layout.
    pub fn biquadratic_to_map(p: &HermitianPolynomial<K>, orientation: Orientation) -> Result<Self> {
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
        if bx.len() + by.len() != poly.nvars() {
            return Err(Error::NotBiquadratic("blocks do not cover all variables".into()));
        }
        let (inputs, outputs) = match orientation {
            Orientation::InputFirst => (bx, by),
            Orientation::OutputFirst => (by, bx),
        };
        let (m, n) = (inputs.len(), outputs.len());
        let mut c = Matrix::<K>::zeros(m * n, m * n);
        for (e, coef) in p.terms() {
            let bad = || Error::NotBiquadratic(format!("term {}", e.display(poly.names())));
            if e.block_degree(&inputs) != (1, 1) || e.block_degree(&outputs) != (1, 1) {
                return Err(bad());
            }
            let i = inputs.iter().position(|&k| e.u[k] == 1).ok_or_else(bad)?;
            let j = inputs.iter().position(|&k| e.v[k] == 1).ok_or_else(bad)?;
            let a = outputs.iter().position(|&k| e.v[k] == 1).ok_or_else(bad)?;
            let b = outputs.iter().position(|&k| e.u[k] == 1).ok_or_else(bad)?;
            c[(i * n + a, j * n + b)] = coef.clone();
        }
        MatrixMap::new(m, n, HermitianMatrix::new(c)?)
    }
}

/// Variable names and blocks of a biquadratic form of a map `M_m → M_n`.
pub fn biquadratic_layout(orientation: Orientation, m: usize, n: usize) -> (Vec<String>, Vec<Block>) {
    let (nx, ny) = match orientation {
        Orientation::InputFirst => (m, n),
        Orientation::OutputFirst => (n, m),
    };
    let mut names: Vec<String> = (1..=nx).map(|i| format!("x{i}")).collect();
    names.extend((1..=ny).map(|i| format!("y{i}")));
    let blocks = vec![
        Block {
            name: "x".into(),
            vars: (0..nx).collect(),
        },
        Block {
            name: "y".into(),
            vars: (nx..nx + ny).collect(),
        },
    ];
    (names, blocks)
}

/// Weighted Kraus operators: `S(X) = Σ_t w_t V_t X V_t†` with `V_t` of shape
/// `out_dim × in_dim` and real `w_t ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet<K> {
    in_dim: usize,
    out_dim: usize,
    ops: Vec<(K, Matrix<K>)>,
}

impl<K: Scalar> KrausSet<K> {
    pub fn new(in_dim: usize, out_dim: usize, ops: Vec<Matrix<K>>) -> Result<Self> {
        KrausSet::weighted(in_dim, out_dim, ops.into_iter().map(|v| (K::one(), v)).collect())
    }

    pub fn weighted(in_dim: usize, out_dim: usize, ops: Vec<(K, Matrix<K>)>) -> Result<Self> {
        for (w, v) in &ops {
            if v.rows() != out_dim || v.cols() != in_dim {
                return Err(Error::Dimension(format!(
                    "Kraus operator {}x{} for a map M_{in_dim} -> M_{out_dim}",
                    v.rows(),
                    v.cols()
                )));
            }
            if !w.is_real_exact() && w.to_c64().im != 0.0 {
                return Err(Error::Invalid("Kraus weight must be real".into()));
            }
            if w.to_c64().re < 0.0 {
                return Err(Error::Invalid("Kraus weight must be nonnegative".into()));
            }
        }
        Ok(KrausSet { in_dim, out_dim, ops })
    }

    pub fn empty(in_dim: usize, out_dim: usize) -> Self {
        KrausSet {
            in_dim,
            out_dim,
            ops: Vec::new(),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn ops(&self) -> &[(K, Matrix<K>)] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `Σ_t w_t |ȳᵀ V_t x|²` in the [`Orientation::InputFirst`] layout.
    pub fn biquadratic_sum_of_squares(&self) -> HermitianPolynomial<K> {
        let (m, n) = (self.in_dim, self.out_dim);
        let nv = m + n;
        let mut acc = Poly::zero(nv);
        for (w, v) in &self.ops {
            // ȳᵀ V x = Σ_{a,i} V[a][i] ȳ_a x_i
            let mut g = Poly::zero(nv);
            for a in 0..n {
                for i in 0..m {
                    let mut e = ExponentPair::one(nv);
                    e.u[i] = 1;
                    e.v[m + a] = 1;
                    g.add_term(e, v[(a, i)].clone());
                }
            }
            acc = acc.add(&g.conjugate_square().scale(w)).expect("same variables");
        }
        let (names, blocks) = biquadratic_layout(Orientation::InputFirst, m, n);
        let acc = acc.with_names(names).expect("names").with_blocks(blocks).expect("blocks");
        HermitianPolynomial::new(acc).expect("sum of moduli is Hermitian")
    }
}

/// `X ↦ Σ_t w_t V_t X V_t†`
pub fn cp_from_kraus<K: Scalar>(k: &KrausSet<K>) -> MatrixMap<K> {
    MatrixMap::from_fn(k.in_dim, k.out_dim, |x| {
        let mut acc = Matrix::<K>::zeros(k.out_dim, k.out_dim);
        for (w, v) in &k.ops {
            let t = v.mul(x).and_then(|vx| vx.mul(&v.adjoint())).expect("shapes");
            acc = acc.add(&t.scale(w)).expect("shapes");
        }
        acc
    })
    .expect("completely positive maps preserve Hermiticity")
}

pub fn compose_transpose<K: Scalar>(phi: &MatrixMap<K>) -> MatrixMap<K> {
    phi.compose_transpose()
}

/// `S₁ + S₂ ∘ T`
pub fn decomposable_from<K: Scalar>(s1: &KrausSet<K>, s2: &KrausSet<K>) -> Result<MatrixMap<K>> {
    if s1.in_dim != s2.in_dim || s1.out_dim != s2.out_dim {
        return Err(Error::Dimension("Kraus sets of different shapes".into()));
    }
    cp_from_kraus(s1).add(&cp_from_kraus(s2).compose_transpose())
}

#[derive(Clone, Debug)]
pub struct PositivitySample {
    pub min_eigenvalue: f64,
    pub argmin: Vec<C64>,
}

/// Random unit vector with independent complex normal entries.
pub fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Seeded generator for the `index`-th independent draw.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Minimum of `λ_min(Φ(y y†))` over random unit `y`; negative values refute
/// positivity, nonnegative values are only evidence.
pub fn positivity_sample<K: Scalar>(phi: &MatrixMap<K>, samples: usize, seed: u64, exec: Exec) -> PositivitySample {
    let phi = phi.to_c64();
    let results = map_range(exec, samples.max(1), |s| {
        let mut rng = stream_rng(seed, s as u64);
        let y = random_unit_vector(&mut rng, phi.in_dim);
        let yy = Matrix::from_fn(phi.in_dim, phi.in_dim, |i, j| y[i] * y[j].conj());
        let img = phi.apply(&yy).expect("shape");
        let ev = hermitian_eigenvalues(&HermitianMatrix::new(img.hermitian_part()).expect("Hermitian"));
        (ev[0], y)
    });
    let (min_eigenvalue, argmin) = results
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one sample");
    PositivitySample {
        min_eigenvalue,
        argmin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRat as G;

    #[test]
    fn identity_and_transpose_apply() {
        let id = MatrixMap::<G>::identity(2);
        let x = Matrix::from_rows(vec![vec![G::int(1), G::complex(2, 1)], vec![G::int(3), G::int(4)]]).unwrap();
        assert_eq!(id.apply(&x).unwrap(), x);
        let t = MatrixMap::<G>::transpose_map(2);
        assert_eq!(t.apply(&Matrix::unit(2, 0, 1)).unwrap(), Matrix::unit(2, 1, 0));
        assert!(id.apply(&Matrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn biquadratic_of_identity_and_transpose() {
        let p = MatrixMap::<G>::identity(2).map_to_biquadratic(Orientation::InputFirst);
        // |x†y|² has the four terms x_i x̄_j ȳ_i y_j
        assert_eq!(p.poly().len(), 4);
        let e = ExponentPair::new(vec![1, 0, 0, 1], vec![0, 1, 1, 0]);
        assert_eq!(p.coeff(&e), G::int(1));
        let sq = KrausSet::new(2, 2, vec![Matrix::identity(2)]).unwrap().biquadratic_sum_of_squares();
        assert_eq!(p, sq);
        let q = MatrixMap::<G>::transpose_map(2).map_to_biquadratic(Orientation::InputFirst);
        let e = ExponentPair::new(vec![1, 0, 1, 0], vec![0, 1, 0, 1]);
        assert_eq!(q.coeff(&e), G::int(1));
        let back = MatrixMap::biquadratic_to_map(&q, Orientation::InputFirst).unwrap();
        assert_eq!(back, MatrixMap::transpose_map(2));
    }

    #[test]
    fn kraus_identity_and_decomposable() {
        let k = KrausSet::new(2, 2, vec![Matrix::<G>::identity(2)]).unwrap();
        assert_eq!(cp_from_kraus(&k), MatrixMap::identity(2));
        let d = decomposable_from(&k, &k).unwrap();
        let p = d.map_to_biquadratic(Orientation::InputFirst);
        let expect = MatrixMap::<G>::identity(2)
            .map_to_biquadratic(Orientation::InputFirst)
            .add(&MatrixMap::<G>::transpose_map(2).map_to_biquadratic(Orientation::InputFirst))
            .unwrap();
        assert_eq!(p, expect);
        assert!(KrausSet::new(2, 2, vec![Matrix::<G>::identity(3)]).is_err());
    }

    #[test]
    fn negative_map_is_detected() {
        let neg = MatrixMap::new(2, 2, HermitianMatrix::new(Matrix::<G>::identity(4).neg()).unwrap()).unwrap();
        assert!(positivity_sample(&neg, 10, 1, Exec::Sequential).min_eigenvalue < 0.0);
        let id = MatrixMap::<G>::identity(3);
        let s = positivity_sample(&id, 50, 7, Exec::Parallel);
        assert!(s.min_eigenvalue >= -1e-12);
        let again = positivity_sample(&id, 50, 7, Exec::Sequential);
        assert_eq!(s.min_eigenvalue, again.min_eigenvalue);
    }
}
