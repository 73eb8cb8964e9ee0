//! Exact decisions over the Gaussian rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::matrix::{HermitianMatrix, Matrix};
use crate::scalar::{GaussRat, Rat, Scalar};

/// Outcome of [`rational_psd_check`].
#[derive(Clone, Debug, PartialEq)]
pub enum PsdWitness {
    /// `M[perm[i]][perm[j]] = (L diag(d) L†)[i][j]` with unit lower `L`, `d ≥ 0`.
    Factorization {
        perm: Vec<usize>,
        l: Matrix<GaussRat>,
        d: Vec<Rat>,
    },
    /// `vector† M vector = value < 0`.
    Violating { vector: Vec<GaussRat>, value: Rat },
}

impl PsdWitness {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdWitness::Factorization { .. })
    }

    /// Re-checks the witness against `m` from scratch.
    pub fn verify(&self, m: &HermitianMatrix<GaussRat>) -> bool {
        let n = m.dim();
        match self {
            PsdWitness::Factorization { perm, l, d } => {
                if perm.len() != n || d.len() != n || l.rows() != n || l.cols() != n {
                    return false;
                }
                if d.iter().any(|x| x.is_negative()) {
                    return false;
                }
                for i in 0..n {
                    if l[(i, i)] != GaussRat::int(1) || (i + 1..n).any(|j| !Scalar::is_zero(&l[(i, j)])) {
                        return false;
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        let mut s = GaussRat::int(0);
                        for k in 0..=i.min(j) {
                            if d[k].is_zero() {
                                continue;
                            }
                            s = &s + &(&l[(i, k)] * &l[(j, k)].conj()).scale(&d[k]);
                        }
                        if &s != m.get(perm[i], perm[j]) {
                            return false;
                        }
                    }
                }
                true
            }
            PsdWitness::Violating { vector, value } => {
                let Ok(q) = m.matrix().quadratic_form(vector) else {
                    return false;
                };
                q.im.is_zero() && &q.re == value && value.is_negative()
            }
        }
    }
}

fn simple_violation(m: &HermitianMatrix<GaussRat>) -> Option<(Vec<GaussRat>, Rat)> {
    let n = m.dim();
    let unit = |k: usize, lv: Option<(usize, GaussRat)>| {
        let mut v = vec![GaussRat::int(0); n];
        v[k] = GaussRat::int(1);
        if let Some((l, s)) = lv {
            v[l] = s;
        }
        v
    };
    for k in 0..n {
        if m.get(k, k).re.is_negative() {
            return Some((unit(k, None), m.get(k, k).re.clone()));
        }
    }
    let shifts = [
        GaussRat::int(1),
        GaussRat::int(-1),
        GaussRat::complex(0, 1),
        GaussRat::complex(0, -1),
    ];
    for k in 0..n {
        for l in k + 1..n {
            let base = &m.get(k, k).re + &m.get(l, l).re;
            let best = shifts
                .iter()
                .map(|s| {
                    let cross = (m.get(k, l) * s).re;
                    (s, &base + &(&cross + &cross))
                })
                .min_by(|a, b| a.1.cmp(&b.1))
                .expect("four shifts");
            if best.1.is_negative() {
                return Some((unit(k, Some((l, best.0.clone()))), best.1));
            }
        }
    }
    None
}

/// Exact PSD decision by diagonally pivoted LDL† over `Q(i)`.
pub fn rational_psd_check(m: &HermitianMatrix<GaussRat>) -> PsdWitness {
    let n = m.dim();
    let mut w = m.matrix().clone();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut pivots: Vec<usize> = Vec::with_capacity(n);
    let mut cols: Vec<Vec<GaussRat>> = Vec::with_capacity(n);
    let mut ds: Vec<Rat> = Vec::with_capacity(n);
    // Schur-complement vector (indexed by original positions) with negative value
    let mut violation: Option<Vec<GaussRat>> = None;

    while !remaining.is_empty() {
        if let Some(&r) = remaining.iter().find(|&&r| w[(r, r)].re.is_negative()) {
            let mut v = vec![GaussRat::int(0); n];
            v[r] = GaussRat::int(1);
            violation = Some(v);
            break;
        }
        let &r = remaining
            .iter()
            .max_by(|&&a, &&b| w[(a, a)].re.cmp(&w[(b, b)].re).then(b.cmp(&a)))
            .expect("nonempty");
        let d = w[(r, r)].re.clone();
        if d.is_zero() {
            let mut found = None;
            'outer: for &k in &remaining {
                for &l in &remaining {
                    if k != l && !Scalar::is_zero(&w[(k, l)]) {
                        found = Some((k, l));
                        break 'outer;
                    }
                }
            }
            if let Some((k, l)) = found {
                let mut v = vec![GaussRat::int(0); n];
                v[k] = -&w[(k, l)];
                v[l] = GaussRat::int(1);
                violation = Some(v);
                break;
            }
            for &k in &remaining {
                pivots.push(k);
                let mut col = vec![GaussRat::int(0); n];
                col[k] = GaussRat::int(1);
                cols.push(col);
                ds.push(Rat::zero());
            }
            remaining.clear();
            break;
        }
        remaining.retain(|&k| k != r);
        let dinv = GaussRat::real(d.recip());
        let mut col = vec![GaussRat::int(0); n];
        col[r] = GaussRat::int(1);
        for &i in &remaining {
            col[i] = &w[(i, r)] * &dinv;
        }
        for &i in &remaining {
            if Scalar::is_zero(&w[(i, r)]) {
                continue;
            }
            for &j in &remaining {
                if Scalar::is_zero(&w[(r, j)]) {
                    continue;
                }
                let upd = &(&w[(i, r)] * &w[(r, j)]) * &dinv;
                w[(i, j)] = &w[(i, j)] - &upd;
            }
        }
        pivots.push(r);
        cols.push(col);
        ds.push(d);
    }

    match violation {
        None => {
            let pos: Vec<usize> = {
                let mut p = vec![0; n];
                for (k, &orig) in pivots.iter().enumerate() {
                    p[orig] = k;
                }
                p
            };
            let mut l = Matrix::<GaussRat>::zeros(n, n);
            for (k, col) in cols.iter().enumerate() {
                for (orig, val) in col.iter().enumerate() {
                    if !Scalar::is_zero(val) {
                        l[(pos[orig], k)] = val.clone();
                    }
                }
            }
            PsdWitness::Factorization {
                perm: pivots,
                l,
                d: ds,
            }
        }
        Some(wvec) => {
            if let Some((vector, value)) = simple_violation(m) {
                return PsdWitness::Violating { vector, value };
            }
            // back-substitute through the eliminated pivots: L11† y1 = -L21† w
            let mut x = wvec;
            for k in (0..pivots.len()).rev() {
                let col = &cols[k];
                let mut s = GaussRat::int(0);
                for (i, xi) in x.iter().enumerate() {
                    if i != pivots[k] && !Scalar::is_zero(xi) && !Scalar::is_zero(&col[i]) {
                        s = &s + &(&col[i].conj() * xi);
                    }
                }
                x[pivots[k]] = -&s;
            }
            let value = m
                .matrix()
                .quadratic_form(&x)
                .expect("dimensions agree")
                .re;
            debug_assert!(value.is_negative());
            PsdWitness::Violating { vector: x, value }
        }
    }
}

/// Exact PSD decision without a witness.
///
/// Clears denominators and runs fraction-free (Bareiss) elimination over
/// `Z[i]` with diagonal pivoting, touching only the upper triangle.
pub fn rational_is_psd(m: &HermitianMatrix<GaussRat>) -> bool {
    let n = m.dim();
    let mut lcm = BigInt::one();
    for z in m.matrix().data() {
        lcm = lcm.lcm(z.re.denom()).lcm(z.im.denom());
    }
    let scale = |q: &Rat| -> BigInt { q.numer() * (&lcm / q.denom()) };
    // w[i][j] for j >= i, as (re, im)
    let mut w: Vec<Vec<(BigInt, BigInt)>> = (0..n)
        .map(|i| (0..n).map(|j| { let z = m.get(i, j); (scale(&z.re), scale(&z.im)) }).collect())
        .collect();
    let get = |w: &Vec<Vec<(BigInt, BigInt)>>, i: usize, j: usize| -> (BigInt, BigInt) {
        if i <= j {
            w[i][j].clone()
        } else {
            let (a, b) = &w[j][i];
            (a.clone(), -b)
        }
    };
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut prev = BigInt::one();
    while !remaining.is_empty() {
        if remaining.iter().any(|&k| w[k][k].0.is_negative()) {
            return false;
        }
        let (pos, &r) = remaining
            .iter()
            .enumerate()
            .max_by(|a, b| w[*a.1][*a.1].0.cmp(&w[*b.1][*b.1].0).then(b.1.cmp(a.1)))
            .expect("nonempty");
        let d = w[r][r].0.clone();
        if d.is_zero() {
            return remaining.iter().all(|&i| {
                remaining.iter().all(|&j| i >= j || (w[i.min(j)][i.max(j)].0.is_zero() && w[i.min(j)][i.max(j)].1.is_zero()))
            });
        }
        remaining.remove(pos);
        let col: Vec<(BigInt, BigInt)> = remaining.iter().map(|&i| get(&w, i, r)).collect();
        for (a, &i) in remaining.iter().enumerate() {
            for (b, &j) in remaining.iter().enumerate() {
                let (lo, hi) = if i <= j { (i, j) } else { continue };
                // w_ij <- (d w_ij - w_ir conj(w_jr)) / prev
                let (xr, xi) = &col[a];
                let (yr, yi) = &col[b];
                let pr = xr * yr + xi * yi;
                let pi = xi * yr - xr * yi;
                let (ref mut er, ref mut ei) = w[lo][hi];
                *er = (&d * &*er - pr) / &prev;
                *ei = (&d * &*ei - pi) / &prev;
            }
        }
        prev = d;
    }
    true
}

/// Reduced row echelon form and pivot columns.
pub fn rref(a: &Matrix<GaussRat>) -> (Matrix<GaussRat>, Vec<usize>) {
    let mut r = a.clone();
    let (rows, cols) = (r.rows(), r.cols());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&i| !Scalar::is_zero(&r[(i, col)])) else {
            continue;
        };
        if p != row {
            for j in 0..cols {
                let t = r[(row, j)].clone();
                r[(row, j)] = r[(p, j)].clone();
                r[(p, j)] = t;
            }
        }
        let inv = r[(row, col)].inv().expect("nonzero pivot");
        for j in col..cols {
            r[(row, j)] = &r[(row, j)] * &inv;
        }
        for i in 0..rows {
            if i == row || Scalar::is_zero(&r[(i, col)]) {
                continue;
            }
            let f = r[(i, col)].clone();
            for j in col..cols {
                if Scalar::is_zero(&r[(row, j)]) {
                    continue;
                }
                let upd = &f * &r[(row, j)];
                r[(i, j)] = &r[(i, j)] - &upd;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (r, pivots)
}

/// Solution set of `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution {
    Unique(Vec<GaussRat>),
    Family {
        particular: Vec<GaussRat>,
        kernel: Vec<Vec<GaussRat>>,
    },
    Inconsistent,
}

impl LinearSolution {
    pub fn kernel(&self) -> &[Vec<GaussRat>] {
        match self {
            LinearSolution::Family { kernel, .. } => kernel,
            _ => &[],
        }
    }
}

/// Kernel vectors from an RREF, one per free column, scaled so that the first
/// nonzero coordinate is 1.
fn kernel_from_rref(r: &Matrix<GaussRat>, pivots: &[usize], ncols: usize) -> Vec<Vec<GaussRat>> {
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![GaussRat::int(0); ncols];
            v[f] = GaussRat::int(1);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&r[(row, f)];
            }
            let lead = v.iter().find(|x| !Scalar::is_zero(*x)).expect("free entry").clone();
            let inv = lead.inv().expect("nonzero");
            v.iter().map(|x| x * &inv).collect()
        })
        .collect()
}

pub fn nullspace(a: &Matrix<GaussRat>) -> Vec<Vec<GaussRat>> {
    let (r, pivots) = rref(a);
    kernel_from_rref(&r, &pivots, a.cols())
}

pub fn solve_linear_exact(a: &Matrix<GaussRat>, b: &[GaussRat]) -> Result<LinearSolution> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            a.rows()
        )));
    }
    let n = a.cols();
    let aug = Matrix::from_fn(a.rows(), n + 1, |i, j| {
        if j < n {
            a[(i, j)].clone()
        } else {
            b[i].clone()
        }
    });
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&n) {
        return Ok(LinearSolution::Inconsistent);
    }
    let mut x = vec![GaussRat::int(0); n];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = r[(row, n)].clone();
    }
    let kernel = kernel_from_rref(&r, &pivots, n);
    if kernel.is_empty() {
        Ok(LinearSolution::Unique(x))
    } else {
        Ok(LinearSolution::Family {
            particular: x,
            kernel,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn herm(rows: Vec<Vec<i64>>) -> HermitianMatrix<GaussRat> {
        HermitianMatrix::new(
            Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(GaussRat::int).collect()).collect())
                .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn fraction_free_agrees_with_ldl() {
        let cases = vec![
            herm(vec![vec![-1, 0], vec![0, -1]]),
            herm(vec![vec![1, 2], vec![2, 1]]),
            herm(vec![vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 0]]),
            herm(vec![vec![0, 1], vec![1, 0]]),
            herm(vec![vec![4, 2, 2], vec![2, 2, 0], vec![2, 0, 1]]),
            herm(vec![vec![4, 2, 2], vec![2, 2, 0], vec![2, 0, 2]]),
            herm(vec![vec![2, -1, 0, 0], vec![-1, 2, -1, 0], vec![0, -1, 2, -1], vec![0, 0, -1, 2]]),
            herm(vec![vec![1, 1, 1], vec![1, 1, 1], vec![1, 1, 1]]),
            herm(vec![vec![0, 0], vec![0, 0]]),
        ];
        for m in &cases {
            assert_eq!(rational_is_psd(m), rational_psd_check(m).is_psd(), "{m:?}");
        }
        let complex = |im: i64| {
            HermitianMatrix::new(
                Matrix::from_rows(vec![
                    vec![GaussRat::real(rat(1, 2)), GaussRat::complex(1, im), GaussRat::int(0)],
                    vec![GaussRat::complex(1, -im), GaussRat::int(5), GaussRat::real(rat(1, 3))],
                    vec![GaussRat::int(0), GaussRat::real(rat(1, 3)), GaussRat::real(rat(2, 7))],
                ])
                .unwrap(),
            )
            .unwrap()
        };
        for im in [0, 1, 2] {
            let m = complex(im);
            assert_eq!(rational_is_psd(&m), rational_psd_check(&m).is_psd(), "im = {im}");
        }
    }

    #[test]
    fn negative_identity_gives_e1() {
        let m = herm(vec![vec![-1, 0], vec![0, -1]]);
        let w = rational_psd_check(&m);
        assert_eq!(
            w,
            PsdWitness::Violating {
                vector: vec![GaussRat::int(1), GaussRat::int(0)],
                value: rat_int(-1)
            }
        );
        assert!(w.verify(&m));
    }

    #[test]
    fn indefinite_two_by_two() {
        let m = herm(vec![vec![1, 2], vec![2, 1]]);
        match rational_psd_check(&m) {
            PsdWitness::Violating { vector, value } => {
                assert_eq!(vector, vec![GaussRat::int(1), GaussRat::int(-1)]);
                assert_eq!(value, rat_int(-2));
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn semidefinite_with_zero_pivots() {
        let m = herm(vec![vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 0]]);
        let w = rational_psd_check(&m);
        assert!(w.is_psd());
        assert!(w.verify(&m));
        let bad = herm(vec![vec![0, 1], vec![1, 0]]);
        let w = rational_psd_check(&bad);
        assert!(!w.is_psd());
        assert!(w.verify(&bad));
    }

    #[test]
    fn deep_violation_is_lifted() {
        // PSD leading block, negative Schur complement in the last coordinate
        let m = herm(vec![vec![4, 2, 2], vec![2, 2, 0], vec![2, 0, 1]]);
        let w = rational_psd_check(&m);
        assert!(!w.is_psd());
        assert!(w.verify(&m));
    }

    #[test]
    fn complex_entries() {
        let m = HermitianMatrix::new(
            Matrix::from_rows(vec![
                vec![GaussRat::int(2), GaussRat::complex(1, 1)],
                vec![GaussRat::complex(1, -1), GaussRat::int(1)],
            ])
            .unwrap(),
        )
        .unwrap();
        let w = rational_psd_check(&m);
        assert!(w.is_psd());
        assert!(w.verify(&m));
        if let PsdWitness::Factorization { d, .. } = &w {
            assert!(d.contains(&rat(0, 1)));
        }
    }

    #[test]
    fn linear_examples() {
        let id = Matrix::<GaussRat>::identity(2);
        let e1 = vec![GaussRat::int(1), GaussRat::int(0)];
        assert_eq!(solve_linear_exact(&id, &e1).unwrap(), LinearSolution::Unique(e1.clone()));
        let a = Matrix::from_rows(vec![vec![GaussRat::int(1), GaussRat::int(1)]]).unwrap();
        let sol = solve_linear_exact(&a, &[GaussRat::int(0)]).unwrap();
        assert_eq!(sol.kernel(), &[vec![GaussRat::int(1), GaussRat::int(-1)]]);
        let inc = Matrix::from_rows(vec![vec![GaussRat::int(1)], vec![GaussRat::int(1)]]).unwrap();
        assert_eq!(
            solve_linear_exact(&inc, &[GaussRat::int(0), GaussRat::int(1)]).unwrap(),
            LinearSolution::Inconsistent
        );
        assert!(solve_linear_exact(&id, &[GaussRat::int(1)]).is_err());
    }
}
