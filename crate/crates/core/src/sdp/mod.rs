//! Small dense semidefinite programs over one Hermitian PSD variable.
//!
//! Problems are embedded in real symmetric form (`A = R + iS` becomes
//! `[[R, -S], [S, R]] / 2`) and handed to an interior-point core. Every
//! status is re-checked by [`verify_outcome`] against the original complex
//! data before it is returned.

mod ipm;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, HermitianMatrix, Matrix};
use crate::par::{map_range, Exec};
use crate::scalar::C64;

use ipm::{IpmResult, IpmStatus, RealSdp, SymEntries};

/// `⟨A, X⟩ + fᵀw = b`, with `⟨A, X⟩ = tr(A X)`.
#[derive(Clone, Debug)]
pub struct SdpConstraint {
    pub a: HermitianMatrix<C64>,
    pub free: Vec<f64>,
    pub b: f64,
}

/// One Hermitian PSD variable `X` of size `dim`, optional free real
/// variables `w`, affine equality constraints and an optional linear
/// objective `⟨C, X⟩ + gᵀw`.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    dim: usize,
    free_vars: usize,
    constraints: Vec<SdpConstraint>,
    objective: Option<(HermitianMatrix<C64>, Vec<f64>)>,
}

impl SdpProblem {
    pub fn new(dim: usize) -> Self {
        SdpProblem {
            dim,
            free_vars: 0,
            constraints: Vec::new(),
            objective: None,
        }
    }

    pub fn with_free_vars(mut self, k: usize) -> Self {
        self.free_vars = k;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn free_vars(&self) -> usize {
        self.free_vars
    }

    pub fn constraints(&self) -> &[SdpConstraint] {
        &self.constraints
    }

    pub fn objective(&self) -> Option<&(HermitianMatrix<C64>, Vec<f64>)> {
        self.objective.as_ref()
    }

    pub fn add_constraint(&mut self, a: Matrix<C64>, b: f64) -> Result<()> {
        let k = self.free_vars;
        self.add_constraint_free(a, vec![0.0; k], b)
    }

    pub fn add_constraint_free(&mut self, a: Matrix<C64>, free: Vec<f64>, b: f64) -> Result<()> {
        if a.rows() != self.dim || a.cols() != self.dim {
            return Err(Error::Dimension(format!(
                "{}x{} constraint for an SDP of dimension {}",
                a.rows(),
                a.cols(),
                self.dim
            )));
        }
        if free.len() != self.free_vars {
            return Err(Error::Dimension(format!(
                "{} free coefficients for {} free variables",
                free.len(),
                self.free_vars
            )));
        }
        self.constraints.push(SdpConstraint {
            a: HermitianMatrix::new(a)?,
            free,
            b,
        });
        Ok(())
    }

    pub fn set_objective(&mut self, c: Matrix<C64>, free: Vec<f64>) -> Result<()> {
        if c.rows() != self.dim || c.cols() != self.dim || free.len() != self.free_vars {
            return Err(Error::Dimension("objective does not match the problem".into()));
        }
        self.objective = Some((HermitianMatrix::new(c)?, free));
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SdpStatus {
    Feasible,
    Optimal,
    Infeasible,
    Indeterminate,
}

/// Residuals recomputed from the returned data.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Margins {
    /// `max_i |⟨A_i, X⟩ + f_iᵀw − b_i| / (1 + |b_i|)`
    pub primal_residual: f64,
    pub min_eigenvalue: f64,
    /// `λ_max(Σ y_i A_i)` for an infeasibility ray.
    pub ray_max_eigenvalue: Option<f64>,
    /// `yᵀb` for an infeasibility ray.
    pub ray_value: Option<f64>,
    /// Relative duality gap for an optimal outcome.
    pub gap: Option<f64>,
    /// `λ_min(C − Σ y_i A_i)` for an optimal outcome.
    pub dual_min_eigenvalue: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SdpOutcome {
    pub status: SdpStatus,
    pub x: Matrix<C64>,
    pub free: Vec<f64>,
    /// Multipliers: dual solution, or the ray when infeasible.
    pub dual: Vec<f64>,
    /// `C − Σ y_i A_i` (minimize only).
    pub slack: Option<Matrix<C64>>,
    pub objective: Option<f64>,
    pub dual_objective: Option<f64>,
    pub margins: Margins,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Accepted for reproducibility bookkeeping; the solver is deterministic.
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            tol: 1e-9,
            max_iter: 200,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

/// Real embedding scaled so that `⟨E(A), E(X)⟩ = tr(A X)`.
fn embed(a: &Matrix<C64>, n: usize) -> SymEntries {
    let mut e = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            if j >= i && z.re != 0.0 {
                e.push((i, j, 0.5 * z.re));
                e.push((n + i, n + j, 0.5 * z.re));
            }
            if z.im != 0.0 {
                e.push((i, n + j, -0.5 * z.im));
            }
        }
    }
    let mut s = SymEntries(e);
    s.sort();
    s
}

/// Inverse of the embedding on the leading `2n × 2n` block, up to a factor 2
/// on embedded constraint matrices.
fn deembed(x: &[f64], nr: usize, n: usize) -> Matrix<C64> {
    Matrix::from_fn(n, n, |i, j| {
        C64::new(
            0.5 * (x[i * nr + j] + x[(n + i) * nr + n + j]),
            0.5 * (x[(n + i) * nr + j] - x[i * nr + n + j]),
        )
    })
}

fn trace_inner(a: &HermitianMatrix<C64>, x: &Matrix<C64>) -> f64 {
    a.matrix().inner(x)
}

fn herm_min_eig(m: &Matrix<C64>) -> f64 {
    let h = HermitianMatrix::new(m.hermitian_part()).expect("Hermitian part");
    hermitian_eigenvalues(&h).first().copied().unwrap_or(0.0)
}

fn herm_max_eig(m: &Matrix<C64>) -> f64 {
    let h = HermitianMatrix::new(m.hermitian_part()).expect("Hermitian part");
    hermitian_eigenvalues(&h).last().copied().unwrap_or(0.0)
}

/// `max_i |⟨A_i, X⟩ + f_iᵀw − b_i| / (1 + |b_i|)`
pub fn primal_residual(p: &SdpProblem, x: &Matrix<C64>, free: &[f64]) -> f64 {
    p.constraints
        .iter()
        .map(|c| {
            let v = trace_inner(&c.a, x) + c.free.iter().zip(free).map(|(f, w)| f * w).sum::<f64>();
            (v - c.b).abs() / (1.0 + c.b.abs())
        })
        .fold(0.0, f64::max)
}

fn combination(p: &SdpProblem, y: &[f64]) -> Matrix<C64> {
    let n = p.dim;
    let mut s = Matrix::filled(n, n, C64::new(0.0, 0.0));
    for (c, &yi) in p.constraints.iter().zip(y) {
        if yi == 0.0 {
            continue;
        }
        for (o, a) in s.data_mut().iter_mut().zip(c.a.matrix().data()) {
            *o += a * yi;
        }
    }
    s
}

/// Re-derives every margin of `out` from the problem data and reports
/// whether the claimed status holds at tolerance `tol`.
pub fn verify_outcome(p: &SdpProblem, out: &SdpOutcome, tol: f64) -> (bool, Margins) {
    let mut m = Margins {
        primal_residual: primal_residual(p, &out.x, &out.free),
        min_eigenvalue: herm_min_eig(&out.x),
        ..Margins::default()
    };
    let primal_ok = m.primal_residual <= tol && m.min_eigenvalue >= -tol && out.free.len() == p.free_vars;
    match out.status {
        SdpStatus::Feasible => (primal_ok, m),
        SdpStatus::Optimal => {
            let Some((c, g)) = &p.objective else {
                return (false, m);
            };
            let pobj = trace_inner(c, &out.x) + g.iter().zip(&out.free).map(|(a, b)| a * b).sum::<f64>();
            let dobj: f64 = p.constraints.iter().zip(&out.dual).map(|(c, y)| c.b * y).sum();
            let z = c.matrix().sub(&combination(p, &out.dual)).expect("same shape");
            let zmin = herm_min_eig(&z);
            let fty_err = (0..p.free_vars)
                .map(|k| {
                    let s: f64 = p.constraints.iter().zip(&out.dual).map(|(c, y)| c.free[k] * y).sum();
                    (s - g[k]).abs() / (1.0 + g[k].abs())
                })
                .fold(0.0, f64::max);
            let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            let cscale = 1.0 + c.matrix().max_abs();
            m.gap = Some(gap);
            m.dual_min_eigenvalue = Some(zmin);
            let ok = primal_ok && gap <= 10.0 * tol && zmin >= -10.0 * tol * cscale && fty_err <= 10.0 * tol;
            (ok, m)
        }
        SdpStatus::Infeasible => {
            let s = combination(p, &out.dual);
            let lmax = herm_max_eig(&s);
            let val: f64 = p.constraints.iter().zip(&out.dual).map(|(c, y)| c.b * y).sum();
            let fty = (0..p.free_vars)
                .map(|k| p.constraints.iter().zip(&out.dual).map(|(c, y)| c.free[k] * y).sum::<f64>().abs())
                .fold(0.0, f64::max);
            m.ray_max_eigenvalue = Some(lmax);
            m.ray_value = Some(val);
            (out.dual.len() == p.constraints.len() && lmax <= tol && val >= 1.0 && fty <= tol, m)
        }
        SdpStatus::Indeterminate => (true, m),
    }
}

/// Rows of the scaled real problem together with their scale factors.
struct Rows {
    a: Vec<SymEntries>,
    f: Vec<Vec<f64>>,
    b: Vec<f64>,
    scale: Vec<f64>,
}

fn scaled_rows(p: &SdpProblem, extra_free: impl Fn(&SdpConstraint) -> Vec<f64>) -> Rows {
    let n = p.dim;
    let mut rows = Rows {
        a: Vec::new(),
        f: Vec::new(),
        b: Vec::new(),
        scale: Vec::new(),
    };
    for c in &p.constraints {
        let mut a = embed(c.a.matrix(), n);
        let mut f = extra_free(c);
        f.extend_from_slice(&c.free);
        let nrm = (a.frob_sq() + f.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let s = if nrm > 0.0 { 1.0 / nrm } else { 1.0 };
        a.scale(s);
        f.iter_mut().for_each(|v| *v *= s);
        rows.a.push(a);
        rows.f.push(f);
        rows.b.push(c.b * s);
        rows.scale.push(s);
    }
    rows
}

enum Independence {
    Keep(Vec<usize>),
    /// Linear combination of scaled rows `y` with `Σ y_i a_i ≈ 0` and `yᵀb = 1`.
    Inconsistent(Vec<f64>),
}

/// Finds a maximal well-conditioned set of rows by pivoted Cholesky of the
/// row Gram matrix, and checks that the dropped rows are consistent.
fn independent_rows(rows: &Rows, exec: Exec) -> Independence {
    let m = rows.a.len();
    if m == 0 {
        return Independence::Keep(Vec::new());
    }
    let gram_rows = map_range(exec, m, |i| {
        (0..m)
            .map(|j| rows.a[i].dot(&rows.a[j]) + rows.f[i].iter().zip(&rows.f[j]).map(|(a, b)| a * b).sum::<f64>())
            .collect::<Vec<f64>>()
    });
    let mut g = gram_rows;
    let mut perm: Vec<usize> = (0..m).collect();
    let mut l = vec![vec![0.0; m]; m];
    let dmax = (0..m).fold(0.0f64, |a, i| a.max(g[i][i]));
    let mut rank = 0;
    let mut diag: Vec<f64> = (0..m).map(|i| g[i][i]).collect();
    for k in 0..m {
        let (piv, &best) = diag[k..]
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, v)| (i + k, v))
            .expect("nonempty");
        if best <= 1e-14 * dmax.max(1e-300) {
            break;
        }
        perm.swap(k, piv);
        diag.swap(k, piv);
        l.swap(k, piv);
        g.swap(k, piv);
        for row in g.iter_mut() {
            row.swap(k, piv);
        }
        let lkk = diag[k].sqrt();
        l[k][k] = lkk;
        for i in k + 1..m {
            let mut s = g[i][k];
            for t in 0..k {
                s -= l[i][t] * l[k][t];
            }
            l[i][k] = s / lkk;
            diag[i] -= l[i][k] * l[i][k];
        }
        rank = k + 1;
    }
    let bmax = rows.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    // dropped row i: a_i ≈ Σ_t c_t a_{perm[t]} with L_P c = l_i solved from L_P Lᵀ_P c = G_{P,i}
    for r in rank..m {
        let li: Vec<f64> = (0..rank).map(|t| l[r][t]).collect();
        let mut c = li.clone();
        for t in (0..rank).rev() {
            let mut s = c[t];
            for u in t + 1..rank {
                s -= l[u][t] * c[u];
            }
            c[t] = s / l[t][t];
        }
        let i = perm[r];
        let resid = rows.b[i] - (0..rank).map(|t| c[t] * rows.b[perm[t]]).sum::<f64>();
        if resid.abs() > 1e-9 * (1.0 + bmax) {
            let mut y = vec![0.0; m];
            y[i] = 1.0 / resid;
            for t in 0..rank {
                y[perm[t]] -= c[t] / resid;
            }
            return Independence::Inconsistent(y);
        }
    }
    let mut keep: Vec<usize> = perm[..rank].to_vec();
    keep.sort_unstable();
    Independence::Keep(keep)
}

fn empty_outcome(p: &SdpProblem, status: SdpStatus) -> SdpOutcome {
    SdpOutcome {
        status,
        x: Matrix::filled(p.dim, p.dim, C64::new(0.0, 0.0)),
        free: vec![0.0; p.free_vars],
        dual: vec![0.0; p.constraints.len()],
        slack: None,
        objective: None,
        dual_objective: None,
        margins: Margins::default(),
        iterations: 0,
    }
}

fn finish(p: &SdpProblem, mut out: SdpOutcome, tol: f64) -> SdpOutcome {
    let (ok, margins) = verify_outcome(p, &out, tol);
    out.margins = margins;
    if !ok {
        out.status = match out.status {
            // a verified-feasible point with an unverified gap is still feasible
            SdpStatus::Optimal if out.margins.primal_residual <= tol && out.margins.min_eigenvalue >= -tol => {
                SdpStatus::Feasible
            }
            _ => SdpStatus::Indeterminate,
        };
    }
    out
}

fn ray_from_scaled(rows: &Rows, y_scaled: &[f64]) -> Vec<f64> {
    y_scaled.iter().zip(&rows.scale).map(|(y, s)| y * s).collect()
}

fn normalize_ray(p: &SdpProblem, y: Vec<f64>) -> Option<Vec<f64>> {
    let val: f64 = p.constraints.iter().zip(&y).map(|(c, yi)| c.b * yi).sum();
    if !(val > 0.0) || !val.is_finite() {
        return None;
    }
    let s = 1.0 / (val * (1.0 - 1e-12));
    Some(y.into_iter().map(|v| v * s).collect())
}

fn check_dims(p: &SdpProblem) -> Result<()> {
    for c in &p.constraints {
        if c.a.dim() != p.dim || c.free.len() != p.free_vars {
            return Err(Error::Dimension("constraint does not match the problem".into()));
        }
    }
    Ok(())
}

/// Feasibility of `{X ⪰ 0 : ⟨A_i, X⟩ + f_iᵀw = b_i}` via
/// `max λ` over `X = Y + λI`, `Y ⪰ 0`, `λ ≤ 1`.
pub fn solve(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpOutcome> {
    check_dims(p)?;
    let n = p.dim;
    let k = p.free_vars;
    let nr = 2 * n + 1;
    let rows = scaled_rows(p, |c| vec![c.a.matrix().trace().re]);
    let keep = match independent_rows(&rows, opts.exec) {
        Independence::Keep(k) => k,
        Independence::Inconsistent(y) => {
            let mut out = empty_outcome(p, SdpStatus::Infeasible);
            match normalize_ray(p, ray_from_scaled(&rows, &y)) {
                Some(r) => out.dual = r,
                None => out.status = SdpStatus::Indeterminate,
            }
            return Ok(finish(p, out, opts.tol));
        }
    };
    let mut a: Vec<SymEntries> = keep.iter().map(|&i| rows.a[i].clone()).collect();
    let mut f: Vec<Vec<f64>> = keep.iter().map(|&i| rows.f[i].clone()).collect();
    let mut b: Vec<f64> = keep.iter().map(|&i| rows.b[i]).collect();
    // λ + s = 1 with s the trailing diagonal entry
    a.push(SymEntries(vec![(2 * n, 2 * n, 1.0)]));
    let mut cap = vec![0.0; k + 1];
    cap[0] = 1.0;
    f.push(cap);
    b.push(1.0);
    let mut g = vec![0.0; k + 1];
    g[0] = -1.0;
    let real = RealSdp {
        n: nr,
        a,
        f,
        b,
        c: SymEntries::default(),
        g,
    };
    let r = real.solve(opts.tol * 1e-2, opts.max_iter, opts.exec);
    let lambda = r.w[0];
    let free: Vec<f64> = r.w[1..].to_vec();
    let y = deembed(&r.x, nr, n);
    let mut shifted = y.clone();
    for i in 0..n {
        shifted[(i, i)] += C64::new(lambda, 0.0);
    }
    let mut base = empty_outcome(p, SdpStatus::Feasible);
    base.iterations = r.iterations;
    base.free = free;
    for cand in [shifted, y] {
        let out = SdpOutcome {
            x: cand,
            ..base.clone()
        };
        if verify_outcome(p, &out, opts.tol).0 {
            return Ok(finish(p, out, opts.tol));
        }
    }
    if lambda < 0.0 && r.status != IpmStatus::NumericalFailure {
        let mut ys = vec![0.0; p.constraints.len()];
        for (t, &i) in keep.iter().enumerate() {
            ys[i] = r.y[t];
        }
        if let Some(ray) = normalize_ray(p, ray_from_scaled(&rows, &ys)) {
            let mut out = empty_outcome(p, SdpStatus::Infeasible);
            out.dual = ray;
            out.iterations = r.iterations;
            if verify_outcome(p, &out, opts.tol).0 {
                return Ok(finish(p, out, opts.tol));
            }
        }
    }
    let mut out = base;
    out.status = SdpStatus::Indeterminate;
    Ok(finish(p, out, opts.tol))
}

/// Minimizes `⟨C, X⟩ + gᵀw` over the feasible set; problems the direct solve
/// cannot settle are classified by [`solve`].
pub fn minimize(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpOutcome> {
    check_dims(p)?;
    let Some((c, gobj)) = &p.objective else {
        return Err(Error::Invalid("minimize needs an objective".into()));
    };
    let n = p.dim;
    let nr = 2 * n;
    let rows = scaled_rows(p, |_| Vec::new());
    let keep = match independent_rows(&rows, opts.exec) {
        Independence::Keep(k) => k,
        Independence::Inconsistent(_) => return solve(p, opts),
    };
    let mut cemb = embed(c.matrix(), n);
    let cscale = (cemb.frob_sq() + gobj.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let cscale = if cscale > 0.0 { cscale } else { 1.0 };
    cemb.scale(1.0 / cscale);
    let real = RealSdp {
        n: nr,
        a: keep.iter().map(|&i| rows.a[i].clone()).collect(),
        f: keep.iter().map(|&i| rows.f[i].clone()).collect(),
        b: keep.iter().map(|&i| rows.b[i]).collect(),
        c: cemb,
        g: gobj.iter().map(|v| v / cscale).collect(),
    };
    let r: IpmResult = real.solve(opts.tol * 1e-2, opts.max_iter, opts.exec);
    let x = deembed(&r.x, nr, n);
    let mut dual = vec![0.0; p.constraints.len()];
    for (t, &i) in keep.iter().enumerate() {
        dual[i] = r.y[t] * rows.scale[i] * cscale;
    }
    let slack = deembed(&r.z, nr, n).scale(&C64::new(2.0 * cscale, 0.0));
    let pobj = trace_inner(c, &x) + gobj.iter().zip(&r.w).map(|(a, b)| a * b).sum::<f64>();
    let dobj: f64 = p.constraints.iter().zip(&dual).map(|(c, y)| c.b * y).sum();
    let out = SdpOutcome {
        status: SdpStatus::Optimal,
        x,
        free: r.w.clone(),
        dual,
        slack: Some(slack),
        objective: Some(pobj),
        dual_objective: Some(dobj),
        margins: Margins::default(),
        iterations: r.iterations,
    };
    let out = finish(p, out, opts.tol);
    if out.status != SdpStatus::Indeterminate {
        return Ok(out);
    }
    // keep the unverified iterate unless the constraints are infeasible
    let fallback = solve(p, opts)?;
    match fallback.status {
        SdpStatus::Infeasible => Ok(fallback),
        _ => Ok(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn unit(n: usize, i: usize, j: usize) -> Matrix<C64> {
        let mut m = Matrix::filled(n, n, c(0.0));
        m[(i, j)] = c(1.0);
        m
    }

    fn eye(n: usize) -> Matrix<C64> {
        Matrix::from_fn(n, n, |i, j| c(if i == j { 1.0 } else { 0.0 }))
    }

    #[test]
    fn trace_forces_unit() {
        let mut p = SdpProblem::new(2);
        p.add_constraint(eye(2), 1.0).unwrap();
        p.add_constraint(unit(2, 0, 0), 1.0).unwrap();
        let out = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(out.status, SdpStatus::Feasible);
        assert!((out.x[(0, 0)].re - 1.0).abs() < 1e-8);
        assert!(out.x[(1, 1)].norm() < 1e-8);
    }

    #[test]
    fn negative_diagonal_is_infeasible() {
        let mut p = SdpProblem::new(1);
        p.add_constraint(unit(1, 0, 0), -1.0).unwrap();
        let out = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(out.status, SdpStatus::Infeasible, "{out:?}");
        assert!((out.dual[0] + 1.0).abs() < 1e-6, "{:?}", out.dual);
        assert!(out.margins.ray_value.unwrap() >= 1.0);
    }

    #[test]
    fn contradictory_equalities_are_infeasible() {
        let mut p = SdpProblem::new(2);
        p.add_constraint(unit(2, 0, 0), 1.0).unwrap();
        p.add_constraint(unit(2, 0, 0).scale(&c(2.0)), 3.0).unwrap();
        let out = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(out.status, SdpStatus::Infeasible);
    }

    #[test]
    fn minimize_examples() {
        let mut p = SdpProblem::new(2);
        p.add_constraint(eye(2), 1.0).unwrap();
        p.set_objective(unit(2, 0, 0), vec![]).unwrap();
        let out = minimize(&p, &SdpOptions::default()).unwrap();
        assert_eq!(out.status, SdpStatus::Optimal);
        assert!(out.objective.unwrap().abs() < 1e-8);

        let mut q = SdpProblem::new(2);
        q.add_constraint(unit(2, 0, 0), 1.0).unwrap();
        q.set_objective(eye(2), vec![]).unwrap();
        let out = minimize(&q, &SdpOptions::default()).unwrap();
        assert_eq!(out.status, SdpStatus::Optimal);
        assert!((out.objective.unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn complex_off_diagonal_constraint() {
        // X ⪰ 0, X_00 = X_11 = 1, Im X_01 = 1 forces X_01 = i
        let mut p = SdpProblem::new(2);
        p.add_constraint(unit(2, 0, 0), 1.0).unwrap();
        p.add_constraint(unit(2, 1, 1), 1.0).unwrap();
        let mut a = Matrix::filled(2, 2, c(0.0));
        a[(0, 1)] = C64::new(0.0, 0.5);
        a[(1, 0)] = C64::new(0.0, -0.5);
        p.add_constraint(a, 1.0).unwrap();
        let out = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(out.status, SdpStatus::Feasible);
        assert!((out.x[(0, 1)] - C64::new(0.0, 1.0)).norm() < 1e-6, "{:?}", out.x);
    }

    #[test]
    fn scaling_leaves_status() {
        let mut p = SdpProblem::new(2);
        p.add_constraint(eye(2).scale(&c(1e3)), 1e3).unwrap();
        p.add_constraint(unit(2, 0, 0).scale(&c(1e3)), 1e3).unwrap();
        assert_eq!(solve(&p, &SdpOptions::default()).unwrap().status, SdpStatus::Feasible);
    }

    #[test]
    fn tampered_outcome_is_rejected() {
        let mut p = SdpProblem::new(1);
        p.add_constraint(unit(1, 0, 0), 1.0).unwrap();
        let mut out = solve(&p, &SdpOptions::default()).unwrap();
        out.x[(0, 0)] = c(2.0);
        assert!(!verify_outcome(&p, &out, 1e-9).0);
    }
}
