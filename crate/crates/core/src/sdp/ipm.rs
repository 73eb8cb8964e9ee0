//! Infeasible primal-dual interior-point method for real symmetric SDPs
//! with free variables: HKM search direction, Mehrotra predictor-corrector.
//!
//! Primal: `min ⟨C, X⟩ + gᵀw  s.t.  ⟨A_i, X⟩ + f_iᵀw = b_i,  X ⪰ 0`.
//! Dual:   `max bᵀy  s.t.  C − Σ y_i A_i = Z ⪰ 0,  Fᵀy = g`.

use crate::linalg::dense::{real_cholesky, real_cholesky_solve, real_solve};
use crate::linalg::eigen::sym_eigenvalues;
use crate::linalg::Matrix;
use crate::par::{map_range, Exec};

/// Symmetric matrix stored as its upper-triangular nonzeros `(i, j, v)`, `i ≤ j`.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct SymEntries(pub Vec<(usize, usize, f64)>);

impl SymEntries {
    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn scale(&mut self, s: f64) {
        for t in &mut self.0 {
            t.2 *= s;
        }
    }

    /// `⟨A, X⟩ = Σ A_ij X_ij` for a dense (not necessarily symmetric) `X`.
    pub fn inner(&self, x: &[f64], n: usize) -> f64 {
        self.0
            .iter()
            .map(|&(i, j, v)| {
                if i == j {
                    v * x[i * n + i]
                } else {
                    v * (x[i * n + j] + x[j * n + i])
                }
            })
            .sum()
    }

    pub fn add_to(&self, out: &mut [f64], n: usize, s: f64) {
        for &(i, j, v) in &self.0 {
            out[i * n + j] += s * v;
            if i != j {
                out[j * n + i] += s * v;
            }
        }
    }

    pub fn frob_sq(&self) -> f64 {
        self.0
            .iter()
            .map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v })
            .sum()
    }

    /// `⟨A, B⟩` by merging sorted entry lists.
    pub fn dot(&self, o: &SymEntries) -> f64 {
        let (mut p, mut q, mut s) = (0, 0, 0.0);
        while p < self.0.len() && q < o.0.len() {
            let (a, b) = (&self.0[p], &o.0[q]);
            match (a.0, a.1).cmp(&(b.0, b.1)) {
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
                std::cmp::Ordering::Equal => {
                    s += if a.0 == a.1 { a.2 * b.2 } else { 2.0 * a.2 * b.2 };
                    p += 1;
                    q += 1;
                }
            }
        }
        s
    }

    pub fn sort(&mut self) {
        self.0.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    }
}

#[derive(Clone, Debug)]
pub(crate) struct RealSdp {
    pub n: usize,
    pub a: Vec<SymEntries>,
    /// Free-variable coefficients, one row per constraint.
    pub f: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: SymEntries,
    pub g: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum IpmStatus {
    Converged,
    MaxIter,
    Stalled,
    Diverged,
    NumericalFailure,
}

#[derive(Clone, Debug)]
pub(crate) struct IpmResult {
    pub status: IpmStatus,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub iterations: usize,
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        let row = &mut out[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let bk = &b[k * n..(k + 1) * n];
            for j in 0..n {
                row[j] += aik * bk[j];
            }
        }
    }
    out
}

fn symmetrize(a: &mut [f64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn to_matrix(a: &[f64], n: usize) -> Matrix<f64> {
    Matrix::from_vec(n, n, a.to_vec()).expect("square")
}

fn lower_inverse(l: &Matrix<f64>) -> Vec<f64> {
    let n = l.rows();
    let mut inv = vec![0.0; n * n];
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in c..i {
                s -= l[(i, k)] * inv[k * n + c];
            }
            inv[i * n + c] = s / l[(i, i)];
        }
    }
    inv
}

fn spd_inverse(l: &Matrix<f64>) -> Vec<f64> {
    let n = l.rows();
    let li = lower_inverse(l);
    // (L Lᵀ)⁻¹ = L⁻ᵀ L⁻¹
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for k in j..n {
                s += li[k * n + i] * li[k * n + j];
            }
            out[i * n + j] = s;
            out[j * n + i] = s;
        }
    }
    out
}

/// Largest `α` with `X + α ΔX ⪰ 0`, given `L⁻¹` for `X = L Lᵀ`.
fn max_step(linv: &[f64], dx: &[f64], n: usize) -> f64 {
    let t = matmul(linv, dx, n);
    let mut lt = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            lt[i * n + j] = linv[j * n + i];
        }
    }
    let w = matmul(&t, &lt, n);
    let ev = sym_eigenvalues(&to_matrix(&w, n));
    let lmin = ev.first().copied().unwrap_or(0.0);
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn chol_regularized(m: &Matrix<f64>) -> Option<Matrix<f64>> {
    if let Some(l) = real_cholesky(m) {
        return Some(l);
    }
    let k = m.rows();
    let dmax = (0..k).fold(0.0f64, |a, i| a.max(m[(i, i)].abs())).max(1e-300);
    let mut delta = 1e-14 * dmax;
    for _ in 0..8 {
        let mut r = m.clone();
        for i in 0..k {
            r[(i, i)] += delta;
        }
        if let Some(l) = real_cholesky(&r) {
            return Some(l);
        }
        delta *= 100.0;
    }
    None
}

impl RealSdp {
    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn k(&self) -> usize {
        self.g.len()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.a.iter().map(|a| a.inner(x, self.n)).collect()
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.n];
        for (a, &yi) in self.a.iter().zip(y) {
            if yi != 0.0 {
                a.add_to(&mut out, self.n, yi);
            }
        }
        out
    }

    fn f_mul(&self, w: &[f64]) -> Vec<f64> {
        self.f.iter().map(|row| dot(row, w)).collect()
    }

    fn ft_mul(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.k()];
        for (row, &yi) in self.f.iter().zip(y) {
            for (o, r) in out.iter_mut().zip(row) {
                *o += r * yi;
            }
        }
        out
    }

    /// `M_ij = ⟨A_i, X A_j Z⁻¹⟩`
    fn schur(&self, x: &[f64], zinv: &[f64], exec: Exec) -> Matrix<f64> {
        let n = self.n;
        let m = self.m();
        let cols = map_range(exec, m, |j| {
            let aj = &self.a[j];
            let g = if aj.nnz() < n {
                let mut g = vec![0.0; n * n];
                let mut outer = |p: usize, q: usize, v: f64| {
                    // v X[:,p] Zinv[q,:]
                    for r in 0..n {
                        let xr = v * x[r * n + p];
                        if xr == 0.0 {
                            continue;
                        }
                        let zq = &zinv[q * n..(q + 1) * n];
                        let gr = &mut g[r * n..(r + 1) * n];
                        for s in 0..n {
                            gr[s] += xr * zq[s];
                        }
                    }
                };
                for &(p, q, v) in &aj.0 {
                    outer(p, q, v);
                    if p != q {
                        outer(q, p, v);
                    }
                }
                g
            } else {
                let mut dense = vec![0.0; n * n];
                aj.add_to(&mut dense, n, 1.0);
                matmul(x, &matmul(&dense, zinv, n), n)
            };
            (0..m).map(|i| self.a[i].inner(&g, n)).collect::<Vec<f64>>()
        });
        let mut out = Matrix::filled(m, m, 0.0);
        for j in 0..m {
            for i in 0..m {
                out[(i, j)] = cols[j][i];
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                let v = 0.5 * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    fn initial_point(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut xi: f64 = 10.0f64.max((n as f64).sqrt());
        let mut eta: f64 = 10.0f64.max((n as f64).sqrt());
        for (a, &b) in self.a.iter().zip(&self.b) {
            let na = a.frob_sq().sqrt();
            xi = xi.max(n as f64 * (1.0 + b.abs()) / (1.0 + na));
            eta = eta.max(1.0 + na);
        }
        eta = eta.max(1.0 + self.c.frob_sq().sqrt());
        let mut x = vec![0.0; n * n];
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            x[i * n + i] = xi;
            z[i * n + i] = eta;
        }
        (x, z)
    }

    pub fn solve(&self, tol: f64, max_iter: usize, exec: Exec) -> IpmResult {
        let n = self.n;
        let m = self.m();
        let k = self.k();
        let (mut x, mut z) = self.initial_point();
        let mut y = vec![0.0; m];
        let mut w = vec![0.0; k];
        let bnorm = norm(&self.b);
        let cnorm = self.c.frob_sq().sqrt() + norm(&self.g);
        let mut status = IpmStatus::MaxIter;
        let mut iterations = 0;
        let mut cdense = vec![0.0; n * n];
        self.c.add_to(&mut cdense, n, 1.0);
        for it in 0..max_iter {
            iterations = it;
            let ax = self.apply(&x);
            let fw = self.f_mul(&w);
            let rp: Vec<f64> = (0..m).map(|i| self.b[i] - ax[i] - fw[i]).collect();
            let aty = self.adjoint(&y);
            let rd: Vec<f64> = (0..n * n).map(|i| cdense[i] - aty[i] - z[i]).collect();
            let fty = self.ft_mul(&y);
            let rf: Vec<f64> = (0..k).map(|i| self.g[i] - fty[i]).collect();
            let mu = dot(&x, &z) / n as f64;
            let pobj = self.c.inner(&x, n) + dot(&self.g, &w);
            let dobj = dot(&self.b, &y);
            let relp = norm(&rp) / (1.0 + bnorm);
            let reld = (norm(&rd) + norm(&rf)) / (1.0 + cnorm);
            let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            let gap_mu = n as f64 * mu / (1.0 + pobj.abs() + dobj.abs());
            if relp <= tol && reld <= tol && gap <= tol && gap_mu <= tol {
                status = IpmStatus::Converged;
                break;
            }
            let big = 1e13 * (1.0 + bnorm + cnorm);
            if norm(&x) > big || norm(&y) > big || norm(&w) > big {
                status = IpmStatus::Diverged;
                break;
            }
            let (lx, lz) = match (real_cholesky(&to_matrix(&x, n)), real_cholesky(&to_matrix(&z, n))) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    status = IpmStatus::NumericalFailure;
                    break;
                }
            };
            let zinv = spd_inverse(&lz);
            let lxinv = lower_inverse(&lx);
            let lzinv = lower_inverse(&lz);
            let schur = self.schur(&x, &zinv, exec);
            let lm = match chol_regularized(&schur) {
                Some(l) => l,
                None => {
                    status = IpmStatus::NumericalFailure;
                    break;
                }
            };
            // ΔX = sym(K − X ΔZ Z⁻¹), ΔZ = Rd − Aᵀ Δy
            let xrdz = matmul(&matmul(&x, &rd, n), &zinv, n);
            let direction = |kmat: &[f64]| -> Option<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
                let kp: Vec<f64> = (0..n * n).map(|i| kmat[i] - xrdz[i]).collect();
                let akp = self.apply(&kp);
                let h: Vec<f64> = (0..m).map(|i| rp[i] - akp[i]).collect();
                let minv_h = real_cholesky_solve(&lm, &h);
                let dw = if k > 0 {
                    let minv_f: Vec<Vec<f64>> = (0..k)
                        .map(|c| {
                            let col: Vec<f64> = self.f.iter().map(|r| r[c]).collect();
                            real_cholesky_solve(&lm, &col)
                        })
                        .collect();
                    let mut s = Matrix::filled(k, k, 0.0);
                    for a in 0..k {
                        for b in 0..k {
                            s[(a, b)] = (0..m).map(|i| self.f[i][a] * minv_f[b][i]).sum::<f64>();
                        }
                    }
                    let smax = (0..k).fold(0.0f64, |acc, i| acc.max(s[(i, i)].abs())).max(1e-300);
                    for i in 0..k {
                        s[(i, i)] += 1e-15 * smax;
                    }
                    let ftmh = self.ft_mul(&minv_h);
                    let rhs: Vec<f64> = (0..k).map(|i| ftmh[i] - rf[i]).collect();
                    let dw = real_solve(&s, &rhs)?;
                    if dw.iter().any(|v| !v.is_finite()) {
                        return None;
                    }
                    dw
                } else {
                    Vec::new()
                };
                let fdw = self.f_mul(&dw);
                let rhs: Vec<f64> = (0..m).map(|i| h[i] - fdw[i]).collect();
                let dy = real_cholesky_solve(&lm, &rhs);
                let atdy = self.adjoint(&dy);
                let dz: Vec<f64> = (0..n * n).map(|i| rd[i] - atdy[i]).collect();
                let xdz = matmul(&matmul(&x, &dz, n), &zinv, n);
                let mut dx: Vec<f64> = (0..n * n).map(|i| kmat[i] - xdz[i]).collect();
                symmetrize(&mut dx, n);
                if dx.iter().chain(&dy).any(|v| !v.is_finite()) {
                    return None;
                }
                Some((dx, dy, dw, dz))
            };
            // predictor
            let kpred: Vec<f64> = x.iter().map(|v| -v).collect();
            let Some((dxa, _, _, dza)) = direction(&kpred) else {
                status = IpmStatus::NumericalFailure;
                break;
            };
            let ap = max_step(&lxinv, &dxa, n).min(1.0);
            let ad = max_step(&lzinv, &dza, n).min(1.0);
            let xa: Vec<f64> = (0..n * n).map(|i| x[i] + ap * dxa[i]).collect();
            let za: Vec<f64> = (0..n * n).map(|i| z[i] + ad * dza[i]).collect();
            let mu_a = dot(&xa, &za) / n as f64;
            let sigma = (mu_a / mu).powi(3).clamp(0.0, 1.0);
            // corrector
            let corr = matmul(&matmul(&dxa, &dza, n), &zinv, n);
            let kcor: Vec<f64> = (0..n * n).map(|i| sigma * mu * zinv[i] - x[i] - corr[i]).collect();
            let Some((dx, dy, dw, dz)) = direction(&kcor) else {
                status = IpmStatus::NumericalFailure;
                break;
            };
            let ap = (0.95 * max_step(&lxinv, &dx, n)).min(1.0);
            let ad = (0.95 * max_step(&lzinv, &dz, n)).min(1.0);
            if ap < 1e-12 && ad < 1e-12 {
                status = IpmStatus::Stalled;
                break;
            }
            for i in 0..n * n {
                x[i] += ap * dx[i];
                z[i] += ad * dz[i];
            }
            for i in 0..k {
                w[i] += ap * dw[i];
            }
            for i in 0..m {
                y[i] += ad * dy[i];
            }
            symmetrize(&mut x, n);
            symmetrize(&mut z, n);
            iterations = it + 1;
        }
        IpmResult {
            status,
            x,
            z,
            y,
            w,
            iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(n: usize, i: usize) -> SymEntries {
        let _ = n;
        SymEntries(vec![(i, i, 1.0)])
    }

    #[test]
    fn trace_one_minimum_eigenvalue() {
        // min ⟨diag(1,2,3), X⟩ s.t. tr X = 1  →  1
        let n = 3;
        let p = RealSdp {
            n,
            a: vec![SymEntries((0..n).map(|i| (i, i, 1.0)).collect())],
            f: vec![vec![]],
            b: vec![1.0],
            c: SymEntries(vec![(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0)]),
            g: vec![],
        };
        let r = p.solve(1e-10, 100, Exec::Sequential);
        assert_eq!(r.status, IpmStatus::Converged);
        assert!((p.c.inner(&r.x, n) - 1.0).abs() < 1e-8);
        assert!((r.x[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn free_variable_maximizes_shift() {
        // max λ s.t. X_00 + λ = 1, X_11 + λ = 3  →  λ = 1
        let p = RealSdp {
            n: 2,
            a: vec![diag(2, 0), diag(2, 1)],
            f: vec![vec![1.0], vec![1.0]],
            b: vec![1.0, 3.0],
            c: SymEntries::default(),
            g: vec![-1.0],
        };
        let r = p.solve(1e-10, 100, Exec::Parallel);
        assert_eq!(r.status, IpmStatus::Converged);
        assert!((r.w[0] - 1.0).abs() < 1e-7, "{:?}", r.w);
    }

    #[test]
    fn sparse_dot_matches_dense() {
        let mut a = SymEntries(vec![(0, 1, 2.0), (1, 1, 3.0)]);
        let mut b = SymEntries(vec![(0, 0, 5.0), (0, 1, 1.5)]);
        a.sort();
        b.sort();
        let mut d = vec![0.0; 4];
        b.add_to(&mut d, 2, 1.0);
        assert_eq!(a.dot(&b), a.inner(&d, 2));
        assert_eq!(a.dot(&b), 6.0);
    }
}
