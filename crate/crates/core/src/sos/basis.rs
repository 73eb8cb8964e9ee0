//! Monomial bases for Gram matrices.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{ExponentPair, HermitianPolynomial};
use crate::scalar::{Rat, Scalar};

/// Mixed monomials `z^u z̄^v`, closed under conjugation, without duplicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramBasis {
    nvars: usize,
    monomials: Vec<ExponentPair>,
}

impl GramBasis {
    pub fn new(nvars: usize, monomials: Vec<ExponentPair>) -> Result<Self> {
        let set: BTreeSet<&ExponentPair> = monomials.iter().collect();
        if set.len() != monomials.len() {
            return Err(Error::Invalid("duplicate basis monomial".into()));
        }
        if monomials.iter().any(|m| m.nvars() != nvars) {
            return Err(Error::Dimension("basis monomial over the wrong number of variables".into()));
        }
        if monomials.iter().any(|m| !set.contains(&m.conj())) {
            return Err(Error::Invalid("basis not closed under conjugation".into()));
        }
        Ok(GramBasis { nvars, monomials })
    }

    /// Closes `half` under conjugation, keeping first occurrences in order
    /// and appending the missing conjugates.
    pub fn closure(nvars: usize, half: &[ExponentPair]) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for m in half {
            if seen.insert(m.clone()) {
                out.push(m.clone());
            }
        }
        for m in half {
            let c = m.conj();
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
        GramBasis::new(nvars, out)
    }

    pub fn empty(nvars: usize) -> Self {
        GramBasis {
            nvars,
            monomials: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn monomials(&self) -> &[ExponentPair] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn contains(&self, m: &ExponentPair) -> bool {
        self.monomials.contains(m)
    }

    /// Index of the conjugate of each monomial.
    pub fn conj_index(&self) -> Vec<usize> {
        let pos: BTreeMap<&ExponentPair, usize> = self.monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
        self.monomials.iter().map(|m| pos[&m.conj()]).collect()
    }

    /// One representative per conjugate pair (the earlier one) plus the
    /// self-conjugate monomials, in basis order.
    pub fn half(&self) -> Vec<ExponentPair> {
        let ci = self.conj_index();
        self.monomials
            .iter()
            .enumerate()
            .filter(|(i, _)| ci[*i] >= *i)
            .map(|(_, m)| m.clone())
            .collect()
    }
}

/// `q ∈ conv(points)` decided by an exact phase-one simplex with Bland's rule.
pub fn in_convex_hull(points: &[Vec<u32>], q: &[Rat]) -> bool {
    if points.is_empty() {
        return false;
    }
    let d = q.len();
    if points.iter().any(|p| p.iter().zip(q).all(|(a, b)| Rat::from_integer((*a).into()) == *b)) {
        return true;
    }
    let n = points.len();
    let m = d + 1;
    let width = n + m + 1;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = vec![Rat::zero(); width];
        let rhs = if i < d { q[i].clone() } else { Rat::from_integer(1.into()) };
        let sign = if rhs.is_negative() { -1 } else { 1 };
        for (j, p) in points.iter().enumerate() {
            let a = if i < d { p[i] as i64 } else { 1 };
            row[j] = Rat::from_integer((sign * a).into());
        }
        row[n + i] = Rat::from_integer(1.into());
        row[width - 1] = if sign < 0 { -rhs } else { rhs };
        t.push(row);
    }
    // phase-one cost row: minimize the sum of artificials
    let mut cost = vec![Rat::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }
    t.push(cost);
    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        let Some(enter) = (0..n + m).find(|&j| t[m][j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            break;
        };
        let piv = t[r][enter].clone();
        for v in t[r].iter_mut() {
            *v = &*v / &piv;
        }
        let prow = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        basis[r] = enter;
    }
    t[m][width - 1].is_zero()
}

fn box_bounds<K: Scalar>(p: &HermitianPolynomial<K>) -> Vec<u32> {
    let n = p.nvars();
    let mut b = vec![0u32; n];
    for (e, _) in p.terms() {
        for j in 0..n {
            b[j] = b[j].max(e.u[j]).max(e.v[j]);
        }
    }
    b
}

/// All `(u, v)` with `u_j + v_j ≤ bound_j`.
fn box_monomials(bounds: &[u32]) -> Vec<ExponentPair> {
    let n = bounds.len();
    let mut out = vec![ExponentPair::one(n)];
    for j in 0..n {
        let mut next = Vec::new();
        for e in &out {
            for t in 0..=bounds[j] {
                for a in 0..=t {
                    let mut f = e.clone();
                    f.u[j] = a;
                    f.v[j] = t - a;
                    next.push(f);
                }
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Every mixed monomial `μ` with `μ·μ̄` inside the coefficient bounding box
/// of `p`, before any Newton or elimination filtering.
pub fn box_basis<K: Scalar>(p: &HermitianPolynomial<K>) -> GramBasis {
    if p.is_zero() {
        return GramBasis::empty(p.nvars());
    }
    GramBasis::new(p.nvars(), box_monomials(&box_bounds(p))).expect("box is closed under conjugation")
}

/// Indices of basis monomials removed by one round of diagonal elimination:
/// `μ` goes when `p` has no `μ·μ̄` term and `μ·μ̄` arises only from diagonal
/// pairs.
fn eliminable<K: Scalar>(p: &HermitianPolynomial<K>, basis: &[ExponentPair]) -> Vec<usize> {
    let mut pairs: BTreeMap<ExponentPair, Vec<(usize, usize)>> = BTreeMap::new();
    for (a, fa) in basis.iter().enumerate() {
        for (b, fb) in basis.iter().enumerate() {
            pairs.entry(fa.conj_mul(fb)).or_default().push((a, b));
        }
    }
    let mut out = Vec::new();
    for (a, fa) in basis.iter().enumerate() {
        let d = fa.conj_mul(fa);
        if !p.coeff(&d).is_zero() {
            continue;
        }
        if pairs[&d].iter().all(|(x, y)| x == y) {
            out.push(a);
        }
    }
    out
}

/// Box rule, Newton halving of the per-variable degree totals, then diagonal
/// elimination to a fixed point.
pub fn candidate_basis<K: Scalar>(p: &HermitianPolynomial<K>) -> GramBasis {
    let n = p.nvars();
    if p.is_zero() {
        return GramBasis::empty(n);
    }
    let totals: Vec<Vec<u32>> = p
        .terms()
        .map(|(e, _)| e.total())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut cand: Vec<ExponentPair> = box_monomials(&box_bounds(p))
        .into_iter()
        .filter(|m| {
            let q: Vec<Rat> = m.total().iter().map(|&t| Rat::from_integer((2 * t as i64).into())).collect();
            in_convex_hull(&totals, &q)
        })
        .collect();
    loop {
        let drop = eliminable(p, &cand);
        if drop.is_empty() {
            break;
        }
        cand = cand
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, m)| m)
            .collect();
    }
    GramBasis::new(n, cand).expect("filters respect conjugation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::scalar::GaussRat as G;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn hull_membership() {
        let pts = vec![vec![0, 0], vec![2, 0], vec![0, 2]];
        assert!(in_convex_hull(&pts, &[r(1), r(1)]));
        assert!(in_convex_hull(&pts, &[r(0), r(0)]));
        assert!(!in_convex_hull(&pts, &[r(2), r(2)]));
        assert!(in_convex_hull(&pts, &[Rat::new(1.into(), 2.into()), r(1)]));
        assert!(!in_convex_hull(&[], &[r(0)]));
    }

    #[test]
    fn modulus_square_basis() {
        // |z|² needs z and z̄
        let p = HermitianPolynomial::new(Poly::monomial(ExponentPair::new(vec![1], vec![1]), G::int(1))).unwrap();
        let b = candidate_basis(&p);
        assert_eq!(b.len(), 2);
        assert!(b.contains(&ExponentPair::var(1, 0)));
        assert_eq!(b.half().len(), 1);
        assert!(candidate_basis(&HermitianPolynomial::<G>::zero(2)).is_empty());
    }

    #[test]
    fn closure_and_validation() {
        let z = ExponentPair::var(2, 0);
        let b = GramBasis::closure(2, &[z.clone(), ExponentPair::one(2)]).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.conj_index(), vec![2, 1, 0]);
        assert!(GramBasis::new(2, vec![z.clone()]).is_err());
        assert!(GramBasis::new(2, vec![ExponentPair::one(2), ExponentPair::one(2)]).is_err());
    }
}
