//! Sparse antisymmetric component tables keyed by strictly increasing index
//! tuples.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::kernel::{Expr, ZeroTest};
use crate::scalar::Scalar;

/// Sorts `idx`, returning the sorted tuple and whether the sorting
/// permutation is odd; `None` if an index repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, odd))
    }
}

/// Strictly increasing `r`-tuples drawn from `0..n`, in lexicographic order.
pub fn increasing_tuples(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for k in start..n {
            cur.push(k);
            go(k + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r <= n {
        go(0, n, r, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

/// An element of the `degree`-th exterior power over `n` generators.
/// Only structurally nonzero components are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct AltTable<S> {
    n: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, S>,
}

impl<S: Scalar> AltTable<S> {
    pub fn zero(n: usize, degree: usize) -> Self {
        AltTable {
            n,
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, s: S) -> Self {
        let mut t = AltTable::zero(n, 0);
        t.set(&[], s);
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Component at `idx` in any order, with the antisymmetry sign applied.
    pub fn get(&self, idx: &[usize]) -> S {
        assert_eq!(idx.len(), self.degree, "index arity");
        match sort_with_sign(idx) {
            None => S::zero(),
            Some((key, odd)) => match self.comps.get(&key) {
                None => S::zero(),
                Some(c) if odd => c.neg(),
                Some(c) => c.clone(),
            },
        }
    }

    /// Sets the component at `idx` (any order). Repeated indices only
    /// accept zero.
    pub fn set(&mut self, idx: &[usize], value: S) {
        assert_eq!(idx.len(), self.degree, "index arity");
        assert!(idx.iter().all(|&k| k < self.n), "index out of range");
        match sort_with_sign(idx) {
            None => assert!(value.is_zero_structural(), "diagonal component"),
            Some((key, odd)) => {
                let v = if odd { value.neg() } else { value };
                if v.is_zero_structural() {
                    self.comps.remove(&key);
                } else {
                    self.comps.insert(key, v);
                }
            }
        }
    }

    /// Adds `value` to the component at `idx` (any order).
    pub fn add_at(&mut self, idx: &[usize], value: &S) {
        if value.is_zero_structural() {
            return;
        }
        if let Some((key, odd)) = sort_with_sign(idx) {
            let v = if odd { value.neg() } else { value.clone() };
            let sum = match self.comps.get(&key) {
                Some(c) => c.add(&v),
                None => v,
            };
            if sum.is_zero_structural() {
                self.comps.remove(&key);
            } else {
                self.comps.insert(key, sum);
            }
        }
    }

    /// Nonzero components in increasing key order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &S)> {
        self.comps.iter()
    }

    pub fn is_zero_structural(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        let mut out = AltTable::zero(self.n, self.degree);
        for (k, v) in &self.comps {
            out.set(k, f(v));
        }
        out
    }

    pub fn try_map(&self, f: impl Fn(&S) -> Result<S>) -> Result<Self> {
        let mut out = AltTable::zero(self.n, self.degree);
        for (k, v) in &self.comps {
            out.set(k, f(v)?);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut out = self.clone();
        for (k, v) in &other.comps {
            out.add_at(k, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(S::neg)
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|v| v.mul(s))
    }

    pub fn scale_real(&self, k: &Expr) -> Self {
        self.map(|v| v.mul_real(k))
    }

    /// Exterior product; exceeding `n` yields the zero table of that degree.
    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "generator count");
        let mut out = AltTable::zero(self.n, self.degree + other.degree);
        for (i, a) in &self.comps {
            for (j, b) in &other.comps {
                if i.iter().any(|x| j.contains(x)) {
                    continue;
                }
                let idx: Vec<usize> = i.iter().chain(j).copied().collect();
                out.add_at(&idx, &a.mul(b));
            }
        }
        out
    }

    /// First component that the zero test does not confirm as zero.
    pub fn first_nonzero(&self, zt: &ZeroTest) -> Result<Option<(Vec<usize>, S)>> {
        for (k, v) in &self.comps {
            if !v.is_zero(zt)? {
                return Ok(Some((k.clone(), v.clone())));
            }
        }
        Ok(None)
    }

    pub fn is_zero(&self, zt: &ZeroTest) -> Result<bool> {
        Ok(self.first_nonzero(zt)?.is_none())
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(
            (self.n, self.degree),
            (other.n, other.degree),
            "mismatched tables"
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sort_signs() {
        assert_eq!(sort_with_sign(&[0, 1]), Some((vec![0, 1], false)));
        assert_eq!(sort_with_sign(&[1, 0]), Some((vec![0, 1], true)));
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((vec![0, 1, 2], false)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn tuples() {
        assert_eq!(increasing_tuples(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(increasing_tuples(2, 0), vec![Vec::<usize>::new()]);
        assert!(increasing_tuples(2, 3).is_empty());
    }

    #[test]
    fn wedge_is_graded_commutative() {
        let mut a = AltTable::<Expr>::zero(3, 1);
        a.set(&[0], Expr::sym("x"));
        a.set(&[2], Expr::int(2));
        let mut b = AltTable::<Expr>::zero(3, 1);
        b.set(&[1], Expr::sym("y"));
        assert_eq!(a.wedge(&b), b.wedge(&a).neg());
        assert!(a.wedge(&a).is_zero_structural());
        assert_eq!(a.wedge(&b).get(&[1, 0]), -(&Expr::sym("x") * &Expr::sym("y")));
    }
}
