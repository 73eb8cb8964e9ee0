use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::poly::ExponentPair;
use crate::scalar::Scalar;

/// Finite set of exponent pairs closed under `(u, v) ↦ (v, u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    nvars: usize,
    pairs: BTreeSet<ExponentPair>,
}

impl SupportSet {
    pub fn empty(nvars: usize) -> Self {
        SupportSet {
            nvars,
            pairs: BTreeSet::new(),
        }
    }

    /// Validating constructor: rejects sets not closed under the swap.
    pub fn new(nvars: usize, pairs: impl IntoIterator<Item = ExponentPair>) -> Result<Self> {
        let pairs: BTreeSet<ExponentPair> = pairs.into_iter().collect();
        if pairs.iter().any(|e| e.nvars() != nvars) {
            return Err(Error::Dimension("exponent length differs from nvars".into()));
        }
        if pairs.iter().any(|e| !pairs.contains(&e.conj())) {
            return Err(Error::Invalid("support set not closed under (u,v) -> (v,u)".into()));
        }
        Ok(SupportSet { nvars, pairs })
    }

    pub(crate) fn from_pairs(nvars: usize, pairs: impl IntoIterator<Item = ExponentPair>) -> Self {
        let mut set: BTreeSet<ExponentPair> = BTreeSet::new();
        for e in pairs {
            set.insert(e.conj());
            set.insert(e);
        }
        SupportSet { nvars, pairs: set }
    }

    /// Pairs with `u`, `v` each of degree exactly one in both blocks:
    /// the support of biquadratic forms on `C^n × C^m`.
    pub fn biquadratic(n: usize, m: usize) -> Self {
        Self::block_pattern(n, m, |d| d == 1)
    }

    /// Pairs with `u`, `v` each of degree at most one in both blocks.
    pub fn bounded_bilinear(n: usize, m: usize) -> Self {
        Self::block_pattern(n, m, |d| d <= 1)
    }

    fn block_pattern(n: usize, m: usize, ok: impl Fn(u32) -> bool) -> Self {
        let nv = n + m;
        let choices = |len: usize, offset: usize| -> Vec<Option<usize>> {
            let mut c = vec![None];
            c.extend((0..len).map(|i| Some(offset + i)));
            c
        };
        let mut pairs = BTreeSet::new();
        for a in choices(n, 0) {
            for b in choices(n, 0) {
                for c in choices(m, n) {
                    for d in choices(m, n) {
                        let degs = [a, b, c, d].map(|x| x.is_some() as u32);
                        if !degs.iter().all(|&k| ok(k)) {
                            continue;
                        }
                        let mut e = ExponentPair::one(nv);
                        if let Some(i) = a {
                            e.u[i] += 1;
                        }
                        if let Some(i) = b {
                            e.v[i] += 1;
                        }
                        if let Some(i) = c {
                            e.u[i] += 1;
                        }
                        if let Some(i) = d {
                            e.v[i] += 1;
                        }
                        pairs.insert(e);
                    }
                }
            }
        }
        SupportSet { nvars: nv, pairs }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, e: &ExponentPair) -> bool {
        self.pairs.contains(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ExponentPair> {
        self.pairs.iter()
    }

    pub fn is_subset(&self, o: &SupportSet) -> bool {
        self.pairs.is_subset(&o.pairs)
    }

    fn predecessors(e: &ExponentPair) -> Vec<ExponentPair> {
        let mut out = Vec::new();
        for i in 0..e.nvars() {
            if e.u[i] > 0 {
                let mut p = e.clone();
                p.u[i] -= 1;
                out.push(p);
            }
            if e.v[i] > 0 {
                let mut p = e.clone();
                p.v[i] -= 1;
                out.push(p);
            }
        }
        out
    }

    /// Every componentwise-dominated pair of a member is a member.
    pub fn is_downward_closed(&self) -> bool {
        self.pairs
            .iter()
            .all(|e| Self::predecessors(e).iter().all(|p| self.pairs.contains(p)))
    }

    pub fn downward_closure(&self) -> SupportSet {
        let mut set = self.pairs.clone();
        let mut queue: VecDeque<ExponentPair> = self.pairs.iter().cloned().collect();
        while let Some(e) = queue.pop_front() {
            for p in Self::predecessors(&e) {
                if set.insert(p.clone()) {
                    queue.push_back(p);
                }
            }
        }
        SupportSet {
            nvars: self.nvars,
            pairs: set,
        }
    }

    /// Drops the variables in `drop`. Returns the image set over the
    /// remaining variables and, for each element of `self` in canonical
    /// order, the position of its image.
    pub fn dehomogenize(&self, drop: &[usize]) -> Result<(SupportSet, Vec<usize>)> {
        if drop.iter().any(|&i| i >= self.nvars) {
            return Err(Error::UnknownVariable(format!("index in {drop:?}")));
        }
        let keep: Vec<usize> = (0..self.nvars).filter(|i| !drop.contains(i)).collect();
        let project = |e: &ExponentPair| {
            ExponentPair::new(keep.iter().map(|&i| e.u[i]).collect(), keep.iter().map(|&i| e.v[i]).collect())
        };
        let image = SupportSet::from_pairs(keep.len(), self.pairs.iter().map(project));
        let pos = self
            .pairs
            .iter()
            .map(|e| {
                let t = project(e);
                image.pairs.iter().position(|x| *x == t).expect("image element")
            })
            .collect();
        Ok((image, pos))
    }

    /// `[z^u z̄^v]` over the set in canonical order.
    pub fn monomial_map<K: Scalar>(&self, z: &[K]) -> Result<Vec<K>> {
        if z.len() != self.nvars {
            return Err(Error::Dimension(format!(
                "point of length {} for {} variables",
                z.len(),
                self.nvars
            )));
        }
        Ok(self.pairs.iter().map(|e| e.eval(z)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C64;

    #[test]
    fn biquadratic_dehomogenizes_to_bounded_bilinear() {
        let a = SupportSet::biquadratic(3, 3);
        let (hat, pos) = a.dehomogenize(&[2, 5]).unwrap();
        assert_eq!(hat, SupportSet::bounded_bilinear(2, 2));
        assert_eq!(pos.len(), a.len());
        let mut seen = pos.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), hat.len());
        // section identity at ((1,2,1),(1,1,2))
        let z: Vec<C64> = [1.0, 2.0, 1.0, 1.0, 1.0, 2.0].iter().map(|&v| C64::new(v, 0.0)).collect();
        let zh = vec![z[0] / z[2], z[1] / z[2], z[3] / z[5], z[4] / z[5]];
        let w = z[2].norm_sqr() * z[5].norm_sqr();
        let ma = a.monomial_map(&z).unwrap();
        let mh = hat.monomial_map(&zh).unwrap();
        for (i, v) in ma.iter().enumerate() {
            assert!((v - mh[pos[i]] * w).norm() < 1e-12);
        }
    }

    #[test]
    fn closure_predicates() {
        assert!(SupportSet::empty(3).is_downward_closed());
        assert!(SupportSet::bounded_bilinear(2, 2).is_downward_closed());
        assert!(!SupportSet::biquadratic(3, 3).is_downward_closed());
        assert_eq!(SupportSet::biquadratic(3, 3).len(), 81);
        assert_eq!(SupportSet::bounded_bilinear(2, 2).len(), 81);
        let closed = SupportSet::biquadratic(2, 2).downward_closure();
        assert!(closed.is_downward_closed());
        assert_eq!(closed, SupportSet::bounded_bilinear(2, 2));
    }

    #[test]
    fn monomial_map_examples() {
        let one = SupportSet::new(2, [ExponentPair::one(2)]).unwrap();
        assert_eq!(one.monomial_map(&[C64::new(3.0, 1.0), C64::new(0.5, 0.0)]).unwrap(), vec![C64::new(1.0, 0.0)]);
        let ones = vec![C64::new(1.0, 0.0); 4];
        let m = SupportSet::bounded_bilinear(2, 2).monomial_map(&ones).unwrap();
        assert!(m.iter().all(|z| *z == C64::new(1.0, 0.0)));
        assert!(SupportSet::new(1, [ExponentPair::var(1, 0)]).is_err());
    }
}
