//! Gram feasibility: SDP solve, facial reduction, exact rounding of Gram and
//! moment matrices.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::choi::stream_rng;
use crate::linalg::{eigh, rational_is_psd, rref, solve_linear_exact, HermitianMatrix, LinearSolution, Matrix};
use crate::par::Exec;
use crate::poly::ExponentPair;
use crate::scalar::{rationalize, round_to_grid, GaussRat, Rat, Scalar, C64};
use crate::sdp::{self, SdpOptions, SdpOutcome, SdpProblem, SdpStatus};

use super::NUMERIC_TOL;

/// Lower bound on the interior margin `λ` for an SOS verdict.
pub const SOS_MARGIN: f64 = 1e-7;
/// Margins below this may sit on the boundary of the Gram cone.
const BOUNDARY_MARGIN: f64 = 1e-5;
/// Upper bound on `λ` (negated) for a refutation.
pub const NOTSOS_MARGIN: f64 = 1e-6;
/// Largest common denominator tried for a row of an exposing subspace.
const MAX_EXPOSING_DENOMINATOR: u64 = 100_000;
/// Distance to the integer lattice accepted after scaling by a denominator.
const SNAP: f64 = 0.01;

#[derive(Clone, Copy, Debug)]
enum Rounding {
    /// Best approximation with denominator at most `q`, entry by entry.
    Fraction(u64),
    /// Nearest multiple of `1/q`; keeps exact pivots small.
    Grid(u64),
}

const ROUNDINGS: [Rounding; 4] = [
    Rounding::Fraction(100),
    Rounding::Grid(1 << 12),
    Rounding::Grid(1 << 20),
    Rounding::Grid(1 << 30),
];

impl Rounding {
    fn apply(self, x: f64) -> Rat {
        match self {
            Rounding::Fraction(q) => rationalize(x, q),
            Rounding::Grid(q) => round_to_grid(x, q),
        }
    }

    fn complex(self, z: C64, real: bool) -> GaussRat {
        let im = if real { Rat::zero() } else { self.apply(z.im) };
        GaussRat::new(self.apply(z.re), im)
    }
}

/// Diagnostics for an undecided check.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SosMargins {
    /// Largest `λ` with `G − λ·NN† ⪰ 0` found by the solver (primal side).
    pub lambda: Option<f64>,
    pub primal_residual: Option<f64>,
    /// Normalized moment value `L(p)` (dual side).
    pub dual_value: Option<f64>,
    pub dual_min_eigenvalue: Option<f64>,
    pub face_reductions: usize,
    pub reason: String,
}

/// Options shared by the SOS checks.
#[derive(Clone, Copy, Debug)]
pub struct SosOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SosOptions {
    fn default() -> Self {
        SosOptions {
            tol: 1e-9,
            max_iter: 200,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

/// Product monomial `ω` and the ordered basis pairs `(a, b)` producing it.
#[derive(Clone, Debug)]
pub(crate) struct Class {
    pub key: ExponentPair,
    pub pairs: Vec<(usize, usize)>,
    pub conj: usize,
    pub target: C64,
    pub target_exact: Option<GaussRat>,
}

/// `Σ_{(a,b) ∈ E_ω} G_ab = p_ω` for every class, over Hermitian `G ⪰ 0`.
#[derive(Clone, Debug)]
pub(crate) struct GramSystem {
    pub basis: Vec<ExponentPair>,
    pub classes: Vec<Class>,
    pub class_of: Vec<Vec<usize>>,
    /// Terms of the target outside every class, with their coefficients.
    pub outside: Vec<(ExponentPair, C64, Option<GaussRat>)>,
    /// Real symmetric Gram matrices over real points.
    pub real: bool,
}

impl GramSystem {
    /// Groups basis pairs by `key(a, b)`; `conj_key` maps a key to its
    /// conjugate. Targets are looked up by key.
    pub fn build(
        basis: Vec<ExponentPair>,
        key: impl Fn(&ExponentPair, &ExponentPair) -> ExponentPair,
        conj_key: impl Fn(&ExponentPair) -> ExponentPair,
        target: &BTreeMap<ExponentPair, (C64, Option<GaussRat>)>,
        real: bool,
    ) -> Self {
        let s = basis.len();
        let mut groups: BTreeMap<ExponentPair, Vec<(usize, usize)>> = BTreeMap::new();
        for a in 0..s {
            for b in 0..s {
                groups.entry(key(&basis[a], &basis[b])).or_default().push((a, b));
            }
        }
        let index: BTreeMap<ExponentPair, usize> = groups.keys().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        let exact = target.values().all(|v| v.1.is_some());
        let mut class_of = vec![vec![0usize; s]; s];
        let mut classes = Vec::with_capacity(groups.len());
        for (i, (k, pairs)) in groups.into_iter().enumerate() {
            for &(a, b) in &pairs {
                class_of[a][b] = i;
            }
            let (t, te) = target
                .get(&k)
                .cloned()
                .unwrap_or((C64::new(0.0, 0.0), exact.then(|| GaussRat::int(0))));
            classes.push(Class {
                conj: index[&conj_key(&k)],
                key: k,
                pairs,
                target: t,
                target_exact: te,
            });
        }
        let outside = target
            .iter()
            .filter(|(k, _)| !index.contains_key(*k))
            .map(|(k, (c, e))| (k.clone(), *c, e.clone()))
            .collect();
        GramSystem {
            basis,
            classes,
            class_of,
            outside,
            real,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn exact(&self) -> bool {
        self.classes.iter().all(|c| c.target_exact.is_some())
    }

    /// Constraint matrices with right-hand sides: one real row per
    /// self-conjugate class, real and imaginary rows for each conjugate pair.
    fn rows(&self) -> Vec<Row> {
        let half = GaussRat::ratio(1, 2);
        let ihalf = GaussRat::new(Rat::zero(), Rat::new(1.into(), 2.into()));
        let mut rows = Vec::new();
        for (c, cl) in self.classes.iter().enumerate() {
            if cl.conj < c {
                continue;
            }
            let re_rhs = cl.target.re;
            let re_exact = cl.target_exact.as_ref().map(|t| t.re.clone());
            let mut re = Vec::new();
            for &(a, b) in &cl.pairs {
                re.push((b, a, half.clone()));
                re.push((a, b, half.clone()));
            }
            rows.push(Row {
                entries: merge(re),
                rhs: re_rhs,
                rhs_exact: re_exact,
            });
            if cl.conj != c && !self.real {
                let mut im = Vec::new();
                for &(a, b) in &cl.pairs {
                    im.push((b, a, -&ihalf));
                    im.push((a, b, ihalf.clone()));
                }
                rows.push(Row {
                    entries: merge(im),
                    rhs: cl.target.im,
                    rhs_exact: cl.target_exact.as_ref().map(|t| t.im.clone()),
                });
            }
        }
        rows
    }
}

/// Sparse Hermitian constraint `tr(A G) = rhs`.
#[derive(Clone, Debug)]
struct Row {
    entries: Vec<(usize, usize, GaussRat)>,
    rhs: f64,
    rhs_exact: Option<Rat>,
}

fn merge(mut e: Vec<(usize, usize, GaussRat)>) -> Vec<(usize, usize, GaussRat)> {
    e.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    let mut out: Vec<(usize, usize, GaussRat)> = Vec::with_capacity(e.len());
    for (i, j, v) in e {
        match out.last_mut() {
            Some(l) if l.0 == i && l.1 == j => l.2 = &l.2 + &v,
            _ => out.push((i, j, v)),
        }
    }
    out.retain(|x| !Scalar::is_zero(&x.2));
    out
}

/// `N† A N` for a sparse `A`.
fn face_exact(entries: &[(usize, usize, GaussRat)], n: &Matrix<GaussRat>) -> Matrix<GaussRat> {
    let k = n.cols();
    let mut out = Matrix::filled(k, k, GaussRat::int(0));
    for (a, b, v) in entries {
        for l in 0..k {
            let left = &n[(*a, l)].conj() * v;
            if Scalar::is_zero(&left) {
                continue;
            }
            for j in 0..k {
                let r = &n[(*b, j)];
                if !Scalar::is_zero(r) {
                    out[(l, j)] = &out[(l, j)] + &(&left * r);
                }
            }
        }
    }
    out
}

pub(crate) enum Found {
    Gram {
        float: Matrix<C64>,
        exact: Option<Matrix<GaussRat>>,
        lambda: f64,
        reductions: usize,
    },
    Moment {
        float: BTreeMap<ExponentPair, C64>,
        exact: Option<BTreeMap<ExponentPair, GaussRat>>,
        value: f64,
        lambda: Option<f64>,
    },
    Indeterminate(SosMargins),
}

/// Runs the check; `exact` asks for rational certificates.
pub(crate) fn run(sys: &GramSystem, exact: bool, opts: &SosOptions) -> Found {
    let exact = exact && sys.exact();
    if !sys.outside.is_empty() {
        return outside_certificate(sys, exact);
    }
    let s = sys.dim();
    if s == 0 {
        // only the zero polynomial is representable
        return Found::Gram {
            float: Matrix::filled(0, 0, C64::new(0.0, 0.0)),
            exact: exact.then(|| Matrix::filled(0, 0, GaussRat::int(0))),
            lambda: 0.0,
            reductions: 0,
        };
    }
    let rows = sys.rows();
    let sdp_opts = SdpOptions {
        tol: opts.tol,
        max_iter: opts.max_iter,
        seed: opts.seed,
        exec: opts.exec,
    };
    let mut face: Option<Matrix<GaussRat>> = None;
    let mut margins = SosMargins::default();
    for round in 0..=s {
        margins.face_reductions = round;
        let k = face.as_ref().map_or(s, |n| n.cols());
        if k == 0 {
            margins.reason = "facial reduction emptied the Gram face".into();
            return Found::Indeterminate(margins);
        }
        let faced: Vec<Matrix<GaussRat>> = match &face {
            None => rows.iter().map(|r| dense(&r.entries, s)).collect(),
            Some(n) => rows.iter().map(|r| face_exact(&r.entries, n)).collect(),
        };
        let nn: Option<Matrix<C64>> = face.as_ref().map(|n| n.mul(&n.adjoint()).expect("square").to_c64());
        let mut prob = SdpProblem::new(k).with_free_vars(1);
        for (r, a) in rows.iter().zip(&faced) {
            let f = match &nn {
                None => r.entries.iter().filter(|e| e.0 == e.1).map(|e| e.2.re.clone()).fold(Rat::zero(), |x, y| x + y).to_f64(),
                Some(nn) => r.entries.iter().map(|(i, j, v)| (v.to_c64() * nn[(*j, *i)]).re).sum(),
            };
            prob.add_constraint_free(a.to_c64(), vec![f], r.rhs).expect("face dimensions");
        }
        prob.set_objective(Matrix::filled(k, k, C64::new(0.0, 0.0)), vec![-1.0])
            .expect("objective dimensions");
        let out = match sdp::minimize(&prob, &sdp_opts) {
            Ok(o) => o,
            Err(e) => {
                margins.reason = format!("solver error: {e}");
                return Found::Indeterminate(margins);
            }
        };
        margins.primal_residual = Some(out.margins.primal_residual);
        if out.status == SdpStatus::Infeasible {
            margins.reason = "reduced Gram system infeasible".into();
            return Found::Indeterminate(margins);
        }
        let lambda = out.free.first().copied().unwrap_or(f64::NEG_INFINITY);
        margins.lambda = Some(lambda);
        let lifted = |h: &Matrix<C64>| match &face {
            None => h.clone(),
            Some(n) => {
                let nc = n.to_c64();
                nc.mul(h).and_then(|x| x.mul(&nc.adjoint())).expect("face dimensions")
            }
        };
        let shifted = shift(&out.x, lambda);
        if lambda > SOS_MARGIN || (!exact && lambda >= -SOS_MARGIN && near_optimal(&out)) {
            let mut float = lifted(&shifted);
            if face.is_none() {
                project_classes_float(sys, &mut float);
            }
            if !exact {
                return Found::Gram {
                    float,
                    exact: None,
                    lambda,
                    reductions: round,
                };
            }
            if lambda > SOS_MARGIN {
                if let Some(h) = round_gram(sys, &rows, face.as_ref(), &faced, &shifted) {
                    let g = match &face {
                        None => h,
                        Some(n) => n.mul(&h).and_then(|x| x.mul(&n.adjoint())).expect("face dimensions"),
                    };
                    return Found::Gram {
                        float,
                        exact: Some(g),
                        lambda,
                        reductions: round,
                    };
                }
                if lambda > BOUNDARY_MARGIN {
                    margins.reason = "rounded Gram matrix failed the exact PSD check".into();
                    return Found::Indeterminate(margins);
                }
                // numerically on the boundary: look for a smaller face
            }
        }
        let Some(slack) = out.slack.as_ref().filter(|_| near_optimal(&out)) else {
            margins.reason = format!("solver status {:?}", out.status);
            return Found::Indeterminate(margins);
        };
        if lambda < -NOTSOS_MARGIN {
            if face.is_some() {
                margins.reason = "negative margin on a reduced face".into();
                return Found::Indeterminate(margins);
            }
            return moment_certificate(sys, slack, lambda, exact, opts.seed, &mut margins);
        }
        if !exact {
            margins.reason = "margin inside the indeterminate band".into();
            return Found::Indeterminate(margins);
        }
        match reduce_face(slack, &out.x, sys.real) {
            Some(kernel) => {
                let next = match &face {
                    None => kernel,
                    Some(n) => n.mul(&kernel).expect("face dimensions"),
                };
                face = Some(next);
            }
            None => {
                margins.reason = "facial reduction found no exposing direction".into();
                return Found::Indeterminate(margins);
            }
        }
    }
    margins.reason = "facial reduction did not terminate".into();
    Found::Indeterminate(margins)
}

/// Optimal, or stopped by numerical trouble with residual, gap and dual
/// slack within [`NUMERIC_TOL`]; every certificate is re-verified anyway.
fn near_optimal(out: &SdpOutcome) -> bool {
    let m = &out.margins;
    out.status == SdpStatus::Optimal
        || (out.status == SdpStatus::Indeterminate
            && m.primal_residual <= NUMERIC_TOL
            && m.min_eigenvalue >= -NUMERIC_TOL
            && m.gap.is_some_and(|g| g <= NUMERIC_TOL)
            && m.dual_min_eigenvalue.is_some_and(|d| d >= -NUMERIC_TOL))
}

/// `{G ⪰ 0 : tr(A_r G) = b_r}` with no margin variable; targets outside
/// every class become the unsatisfiable row `0 = |p_ω|`.
pub(crate) fn feasibility_problem(sys: &GramSystem) -> SdpProblem {
    let s = sys.dim();
    let mut prob = SdpProblem::new(s);
    for r in sys.rows() {
        prob.add_constraint(dense(&r.entries, s).to_c64(), r.rhs).expect("basis dimensions");
    }
    for (_, c, _) in &sys.outside {
        prob.add_constraint(Matrix::filled(s, s, C64::new(0.0, 0.0)), c.norm()).expect("basis dimensions");
    }
    prob
}

fn dense(entries: &[(usize, usize, GaussRat)], s: usize) -> Matrix<GaussRat> {
    let mut m = Matrix::filled(s, s, GaussRat::int(0));
    for (i, j, v) in entries {
        m[(*i, *j)] = v.clone();
    }
    m
}

fn shift(x: &Matrix<C64>, lambda: f64) -> Matrix<C64> {
    let mut h = x.clone();
    for i in 0..h.rows() {
        h[(i, i)] += C64::new(lambda, 0.0);
    }
    h
}

trait ToF64 {
    fn to_f64(&self) -> f64;
}

impl ToF64 for Rat {
    fn to_f64(&self) -> f64 {
        crate::scalar::rat_to_f64(self)
    }
}

fn round_hermitian(h: &Matrix<C64>, how: Rounding, real: bool) -> Matrix<GaussRat> {
    let k = h.rows();
    let mut out = Matrix::filled(k, k, GaussRat::int(0));
    for i in 0..k {
        out[(i, i)] = GaussRat::real(how.apply(h[(i, i)].re));
        for j in i + 1..k {
            let z = how.complex(h[(i, j)], real);
            out[(j, i)] = z.conj();
            out[(i, j)] = z;
        }
    }
    out
}

/// Rounds `h` to rationals, projects it exactly onto the constraints and
/// checks PSD; retries with finer denominators.
fn round_gram(
    sys: &GramSystem,
    rows: &[Row],
    face: Option<&Matrix<GaussRat>>,
    faced: &[Matrix<GaussRat>],
    h: &Matrix<C64>,
) -> Option<Matrix<GaussRat>> {
    for how in ROUNDINGS {
        let mut hr = round_hermitian(h, how, sys.real);
        let ok = match face {
            None => {
                project_classes(sys, &mut hr);
                true
            }
            Some(_) => project_rows(rows, faced, &mut hr, sys.real),
        };
        if !ok {
            continue;
        }
        if exact_psd(&hr) {
            return Some(hr);
        }
    }
    None
}

/// Least-norm correction when the face is the whole cone: each class
/// residual is spread evenly over its pairs.
fn project_classes(sys: &GramSystem, g: &mut Matrix<GaussRat>) {
    for cl in &sys.classes {
        let target = cl.target_exact.clone().expect("exact targets");
        let mut sum = GaussRat::int(0);
        for &(a, b) in &cl.pairs {
            sum = &sum + &g[(a, b)];
        }
        let r = &target - &sum;
        if Scalar::is_zero(&r) {
            continue;
        }
        let d = r.scale(&Rat::new(1.into(), (cl.pairs.len() as i64).into()));
        for &(a, b) in &cl.pairs {
            g[(a, b)] = &g[(a, b)] + &d;
        }
    }
}

fn project_classes_float(sys: &GramSystem, g: &mut Matrix<C64>) {
    for cl in &sys.classes {
        let sum: C64 = cl.pairs.iter().map(|&(a, b)| g[(a, b)]).sum();
        let d = (cl.target - sum) / cl.pairs.len() as f64;
        for &(a, b) in &cl.pairs {
            g[(a, b)] += d;
        }
    }
}

/// Least-norm correction over the real parameters of a Hermitian `H`.
fn project_rows(rows: &[Row], faced: &[Matrix<GaussRat>], h: &mut Matrix<GaussRat>, real: bool) -> bool {
    let k = h.rows();
    // parameter layout: Re H_jj, then (Re H_jl, Im H_jl) for j < l
    let mut params: Vec<(usize, usize, bool)> = (0..k).map(|j| (j, j, false)).collect();
    for j in 0..k {
        for l in j + 1..k {
            params.push((j, l, false));
            if !real {
                params.push((j, l, true));
            }
        }
    }
    let two = Rat::from_integer(2.into());
    let coeff = |a: &Matrix<GaussRat>, (j, l, im): (usize, usize, bool)| -> Rat {
        if j == l {
            a[(j, j)].re.clone()
        } else if im {
            -(&two * &a[(l, j)].im)
        } else {
            &two * &a[(l, j)].re
        }
    };
    let value = |(j, l, im): (usize, usize, bool), h: &Matrix<GaussRat>| -> Rat {
        if im {
            h[(j, l)].im.clone()
        } else {
            h[(j, l)].re.clone()
        }
    };
    let m: Vec<Vec<Rat>> = faced.iter().map(|a| params.iter().map(|&p| coeff(a, p)).collect()).collect();
    let theta: Vec<Rat> = params.iter().map(|&p| value(p, h)).collect();
    let resid: Vec<GaussRat> = rows
        .iter()
        .zip(&m)
        .map(|(r, row)| {
            let mut acc = r.rhs_exact.clone().expect("exact targets");
            for (c, t) in row.iter().zip(&theta) {
                if !c.is_zero() && !t.is_zero() {
                    acc -= c * t;
                }
            }
            GaussRat::real(acc)
        })
        .collect();
    if resid.iter().all(Scalar::is_zero) {
        return true;
    }
    let nr = m.len();
    let mmt = Matrix::from_fn(nr, nr, |i, j| {
        let mut acc = Rat::zero();
        for (x, y) in m[i].iter().zip(&m[j]) {
            if !x.is_zero() && !y.is_zero() {
                acc += x * y;
            }
        }
        GaussRat::real(acc)
    });
    let w = match solve_linear_exact(&mmt, &resid) {
        Ok(LinearSolution::Unique(w)) => w,
        Ok(LinearSolution::Family { particular, .. }) => particular,
        _ => return false,
    };
    for (pi, &(j, l, im)) in params.iter().enumerate() {
        let mut d = Rat::zero();
        for (i, row) in m.iter().enumerate() {
            if !row[pi].is_zero() && !w[i].re.is_zero() {
                d += &row[pi] * &w[i].re;
            }
        }
        if d.is_zero() {
            continue;
        }
        if j == l {
            h[(j, j)] = GaussRat::real(&h[(j, j)].re + &d);
        } else {
            let cur = h[(j, l)].clone();
            let next = if im {
                GaussRat::new(cur.re, &cur.im + &d)
            } else {
                GaussRat::new(&cur.re + &d, cur.im)
            };
            h[(l, j)] = next.conj();
            h[(j, l)] = next;
        }
    }
    true
}

/// Rational basis of the orthogonal complement of the dominant eigenspace of
/// `slack`, as columns.
fn reduce_face(slack: &Matrix<C64>, x: &Matrix<C64>, real: bool) -> Option<Matrix<GaussRat>> {
    let k = slack.rows();
    let (sv, svec) = eigh(&slack.hermitian_part());
    let (xv, _) = eigh(&x.hermitian_part());
    let smax = sv.last().copied().unwrap_or(0.0);
    let xmax = xv.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    if smax <= 0.0 {
        return None;
    }
    let rank_x = xv.iter().filter(|&&v| v > 1e-5 * xmax).count();
    let cap = k.saturating_sub(rank_x.max(1));
    let picks: Vec<usize> = (0..k).rev().filter(|&i| sv[i] > 1e-5 * smax).take(cap).collect();
    if picks.is_empty() {
        return None;
    }
    let r = picks.len();
    let rt = Matrix::from_fn(r, k, |i, j| svec[(j, picks[i])].conj());
    let (red, pivots) = numeric_rref(&rt);
    if pivots.is_empty() {
        return None;
    }
    let mut rounded = Matrix::filled(pivots.len(), k, GaussRat::int(0));
    for i in 0..pivots.len() {
        let d = common_denominator(red.row(i), real, MAX_EXPOSING_DENOMINATOR)?;
        for j in 0..k {
            rounded[(i, j)] = Rounding::Grid(d).complex(red[(i, j)], real);
        }
    }
    let (_, piv) = rref(&rounded);
    if piv.len() != pivots.len() {
        return None;
    }
    let kernel = crate::linalg::nullspace(&rounded);
    if kernel.is_empty() {
        return None;
    }
    Some(Matrix::from_fn(k, kernel.len(), |i, j| kernel[j][i].clone()))
}

/// Smallest `d ≤ max` with `d·row` within [`SNAP`] of a Gaussian-integer
/// vector in every coordinate.
fn common_denominator(row: &[C64], real: bool, max: u64) -> Option<u64> {
    let parts: Vec<f64> = row
        .iter()
        .flat_map(|z| if real { [z.re, 0.0] } else { [z.re, z.im] })
        .filter(|v| v.abs() > SNAP / max as f64)
        .collect();
    (1..=max).find(|&d| {
        parts.iter().all(|&v| {
            let t = v * d as f64;
            (t - t.round()).abs() <= SNAP
        })
    })
}

/// Reduced row echelon form with complete pivoting, so every entry outside
/// the pivot columns stays bounded; rows below the pivot threshold are
/// dropped. Pivots are returned in increasing column order.
fn numeric_rref(m: &Matrix<C64>) -> (Matrix<C64>, Vec<usize>) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let mut pivots: Vec<usize> = Vec::new();
    for r in 0..rows.min(cols) {
        let mut best = (r, 0, -1.0);
        for i in r..rows {
            for j in (0..cols).filter(|j| !pivots.contains(j)) {
                let v = a[(i, j)].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        let (bi, c, val) = best;
        if val <= 1e-9 * scale {
            break;
        }
        for j in 0..cols {
            let t = a[(r, j)];
            a[(r, j)] = a[(bi, j)];
            a[(bi, j)] = t;
        }
        let p = a[(r, c)];
        for j in 0..cols {
            a[(r, j)] /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = a[(i, c)];
                if f.norm() > 0.0 {
                    for j in 0..cols {
                        let v = a[(r, j)];
                        a[(i, j)] -= f * v;
                    }
                }
            }
        }
        pivots.push(c);
    }
    let mut order: Vec<usize> = (0..pivots.len()).collect();
    order.sort_by_key(|&i| pivots[i]);
    let out = Matrix::from_fn(pivots.len(), cols, |i, j| a[(order[i], j)]);
    (out, order.iter().map(|&i| pivots[i]).collect())
}

/// Refutation when the target has terms no basis pair can produce: the
/// point evaluation at `(1, …, 1)` plus a large weight on one stray term.
fn outside_certificate(sys: &GramSystem, exact: bool) -> Found {
    let (mu, pf, pe) = sys.outside[0].clone();
    let self_conj = sys.real || mu.is_self_conjugate();
    let mut float: BTreeMap<ExponentPair, C64> = sys.classes.iter().map(|c| (c.key.clone(), C64::new(1.0, 0.0))).collect();
    for (k, _, _) in &sys.outside {
        float.insert(k.clone(), C64::new(0.0, 0.0));
    }
    let mut exact_map = None;
    let mut value;
    if exact {
        let pe = pe.expect("exact target");
        let base = sys
            .classes
            .iter()
            .fold(GaussRat::int(0), |acc, c| &acc + c.target_exact.as_ref().expect("exact targets"));
        let num = &base.re.abs() + &Rat::from_integer(1.into());
        let mut m: BTreeMap<ExponentPair, GaussRat> = sys.classes.iter().map(|c| (c.key.clone(), GaussRat::int(1))).collect();
        for (k, _, _) in &sys.outside {
            m.insert(k.clone(), GaussRat::int(0));
        }
        let s = if self_conj {
            &num / &pe.norm_sqr()
        } else {
            &num / &(pe.norm_sqr() * Rat::from_integer(2.into()))
        };
        let l = (-pe.conj()).scale(&s);
        if !self_conj {
            m.insert(conj_key(&mu, sys.real), l.conj());
        }
        m.insert(mu.clone(), l);
        value = crate::scalar::rat_to_f64(&(&base.re - &num));
        for (k, v) in &m {
            float.insert(k.clone(), v.to_c64());
        }
        exact_map = Some(m);
    } else {
        let base: f64 = sys.classes.iter().map(|c| c.target.re).sum();
        let num = base.abs() + 1.0;
        let s = if self_conj { num / pf.norm_sqr() } else { num / (2.0 * pf.norm_sqr()) };
        let l = -pf.conj() * s;
        if !self_conj {
            float.insert(conj_key(&mu, sys.real), l.conj());
        }
        float.insert(mu.clone(), l);
        value = base - num;
    }
    if !value.is_finite() {
        value = f64::NEG_INFINITY;
    }
    Found::Moment {
        float,
        exact: exact_map,
        value,
        lambda: None,
    }
}

fn conj_key(k: &ExponentPair, real: bool) -> ExponentPair {
    if real {
        k.clone()
    } else {
        k.conj()
    }
}

/// Moment functional read off the dual slack, rounded and repaired with
/// point evaluations when exact output is requested.
fn moment_certificate(
    sys: &GramSystem,
    slack: &Matrix<C64>,
    lambda: f64,
    exact: bool,
    seed: u64,
    margins: &mut SosMargins,
) -> Found {
    let raw: Vec<C64> = sys
        .classes
        .iter()
        .map(|c| {
            let sum: C64 = c.pairs.iter().map(|&(a, b)| slack[(b, a)]).sum();
            sum / c.pairs.len() as f64
        })
        .collect();
    let avg: Vec<C64> = sys
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let v = 0.5 * (raw[i] + raw[c.conj].conj());
            if c.conj == i || sys.real {
                C64::new(v.re, 0.0)
            } else {
                v
            }
        })
        .collect();
    let trace: f64 = (0..sys.dim()).map(|a| avg[sys.class_of[a][a]].re).sum();
    let trace = if trace > 0.0 { trace } else { 1.0 };
    let float_vals: Vec<C64> = avg.iter().map(|v| v / trace).collect();
    let float: BTreeMap<ExponentPair, C64> =
        sys.classes.iter().zip(&float_vals).map(|(c, v)| (c.key.clone(), *v)).collect();
    let value: f64 = sys.classes.iter().zip(&float_vals).map(|(c, v)| (c.target * v).re).sum();
    margins.dual_value = Some(value);
    if !exact {
        return Found::Moment {
            float,
            exact: None,
            value,
            lambda: Some(lambda),
        };
    }
    match exact_moments(sys, &float_vals, seed) {
        Some(m) => {
            let value_exact = moment_value(sys, &m);
            let fl = sys.classes.iter().zip(&m).map(|(c, v)| (c.key.clone(), v.to_c64())).collect();
            Found::Moment {
                float: fl,
                exact: Some(sys.classes.iter().zip(m).map(|(c, v)| (c.key.clone(), v)).collect()),
                value: crate::scalar::rat_to_f64(&value_exact),
                lambda: Some(lambda),
            }
        }
        None => {
            margins.reason = "rounded moment matrix failed the exact checks".into();
            Found::Indeterminate(margins.clone())
        }
    }
}

fn moment_value(sys: &GramSystem, l: &[GaussRat]) -> Rat {
    let mut acc = GaussRat::int(0);
    for (c, v) in sys.classes.iter().zip(l) {
        let t = c.target_exact.as_ref().expect("exact targets");
        if !Scalar::is_zero(t) {
            acc = &acc + &(t * v);
        }
    }
    acc.re
}

fn moment_matrix(sys: &GramSystem, l: &[GaussRat]) -> Matrix<GaussRat> {
    let s = sys.dim();
    // M[b][a] = L(class(a, b))
    Matrix::from_fn(s, s, |b, a| l[sys.class_of[a][b]].clone())
}

/// Exact PSD check, skipped when the float spectrum already rules it out.
fn exact_psd(m: &Matrix<GaussRat>) -> bool {
    let f = m.to_c64();
    let (vals, _) = eigh(&f.hermitian_part());
    if vals.first().is_some_and(|&v| v < -1e-9 * (1.0 + f.max_abs())) {
        return false;
    }
    HermitianMatrix::new(m.clone()).map(|h| rational_is_psd(&h)).unwrap_or(false)
}

/// Seeded Gaussian-integer points (real integers for real systems).
fn sample_points(nvars: usize, count: usize, seed: u64, real: bool) -> Vec<Vec<GaussRat>> {
    (0..count)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            (0..nvars)
                .map(|_| {
                    let re = rng.random_range(-2i64..=2);
                    let im = if real { 0 } else { rng.random_range(-2i64..=2) };
                    GaussRat::complex(re, im)
                })
                .collect()
        })
        .collect()
}

fn key_eval(k: &ExponentPair, z: &[GaussRat]) -> GaussRat {
    k.eval(z)
}

fn exact_moments(sys: &GramSystem, float_vals: &[C64], seed: u64) -> Option<Vec<GaussRat>> {
    let s = sys.dim();
    let nvars = sys.basis.first().map_or(0, |m| m.nvars());
    let points = sample_points(nvars, 2 * s, seed, sys.real);
    let evals: Vec<Vec<GaussRat>> = points
        .iter()
        .map(|z| sys.classes.iter().map(|c| key_eval(&c.key, z)).collect())
        .collect();
    // a single point where the target is negative refutes on its own
    for ev in &evals {
        let v = moment_value(sys, ev);
        if v.is_negative() {
            return Some(normalize_trace(sys, ev.clone()));
        }
    }
    let mut interior = vec![GaussRat::int(0); sys.classes.len()];
    for ev in &evals {
        for (acc, v) in interior.iter_mut().zip(ev) {
            *acc = &*acc + v;
        }
    }
    let interior = normalize_trace(sys, interior);
    let l_int = moment_value(sys, &interior);
    for how in ROUNDINGS {
        let rounded: Vec<GaussRat> = sys
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.conj < i {
                    GaussRat::int(0)
                } else {
                    how.complex(float_vals[i], sys.real || c.conj == i)
                }
            })
            .collect();
        let rounded: Vec<GaussRat> = sys
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| if c.conj < i { rounded[c.conj].conj() } else { rounded[i].clone() })
            .collect();
        let lr = moment_value(sys, &rounded);
        if !lr.is_negative() {
            continue;
        }
        if exact_psd(&moment_matrix(sys, &rounded)) {
            return Some(normalize_trace(sys, rounded));
        }
        let denom = &lr.abs() + &l_int;
        let theta = &lr.abs() / &(denom * Rat::from_integer(2.into()));
        let keep = Rat::from_integer(1.into()) - &theta;
        let mixed: Vec<GaussRat> = rounded
            .iter()
            .zip(&interior)
            .map(|(r, q)| &r.scale(&keep) + &q.scale(&theta))
            .collect();
        if moment_value(sys, &mixed).is_negative() && exact_psd(&moment_matrix(sys, &mixed)) {
            return Some(normalize_trace(sys, mixed));
        }
    }
    None
}

fn normalize_trace(sys: &GramSystem, l: Vec<GaussRat>) -> Vec<GaussRat> {
    let mut t = Rat::zero();
    for a in 0..sys.dim() {
        t += &l[sys.class_of[a][a]].re;
    }
    if !t.is_positive() {
        return l;
    }
    let inv = t.recip();
    l.into_iter().map(|v| v.scale(&inv)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_rref_recovers_rational_rows() {
        let m = Matrix::from_rows(vec![
            vec![C64::new(2.0, 0.0), C64::new(4.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(1.0, 0.0)],
        ])
        .unwrap();
        let (r, p) = numeric_rref(&m);
        assert_eq!(p, vec![1, 2]);
        assert!((r[(0, 0)] - C64::new(0.5, 0.0)).norm() < 1e-12);
        assert!((r[(1, 2)] - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn merge_cancels_entries() {
        let e = merge(vec![
            (0, 1, GaussRat::int(1)),
            (0, 1, GaussRat::int(-1)),
            (1, 1, GaussRat::ratio(1, 2)),
            (1, 1, GaussRat::ratio(1, 2)),
        ]);
        assert_eq!(e, vec![(1, 1, GaussRat::int(1))]);
    }
}
