//! Univariate images of polynomials modulo a word-sized prime.
//!
//! Used to bound which atoms a gcd can involve before running the
//! recursive algorithm over the rationals.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::poly::{Atom, Poly};

const P: u64 = 2_147_483_647;

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    b %= P;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    acc
}

fn inv(a: u64) -> u64 {
    pow_mod(a, P - 2)
}

fn reduce_int(n: &BigInt) -> u64 {
    let r = n % BigInt::from(P);
    let r = if r < BigInt::zero() { r + BigInt::from(P) } else { r };
    r.to_u64().expect("residue fits")
}

fn reduce(c: &BigRational) -> Option<u64> {
    let d = reduce_int(c.denom());
    (d != 0).then(|| reduce_int(c.numer()) * inv(d) % P)
}

/// Point assigned to `atom` in trial `t`.
fn point(atom_index: usize, t: u64) -> u64 {
    let k = atom_index as u64 + 1;
    (k.wrapping_mul(2_654_435_761) ^ t.wrapping_mul(40_503).wrapping_add(12_345)) % (P - 2) + 2
}

/// Dense image of `f` in `F_p[y]`, every other atom evaluated at its point.
fn image(f: &Poly, y: &Atom, atoms: &[Atom], t: u64) -> Option<Vec<u64>> {
    let mut out = vec![0u64; f.degree_in(y) as usize + 1];
    for (m, c) in f.terms() {
        let mut v = reduce(c)?;
        let mut ey = 0;
        for (a, e) in m.factors() {
            if a == y {
                ey = *e as usize;
            } else {
                let k = atoms.binary_search(a).expect("atom listed");
                v = v * pow_mod(point(k, t), *e as u64) % P;
            }
        }
        out[ey] = (out[ey] + v) % P;
    }
    Some(out)
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let lb = inv(*b.last().unwrap());
        let db = b.len() - 1;
        while a.len() > db {
            let k = a.len() - 1 - db;
            let c = a.last().unwrap() * lb % P;
            for (i, bi) in b.iter().enumerate() {
                a[k + i] = (a[k + i] + P - c * bi % P) % P;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Atoms that may occur in `gcd(a, b)`; every other atom provably does not.
///
/// The leading coefficient of the gcd divides that of `a`, so whenever the
/// image of `a` keeps its degree the image gcd degree bounds the true one.
pub(crate) fn gcd_support(a: &Poly, b: &Poly) -> BTreeSet<Atom> {
    let atoms: Vec<Atom> = a.atoms().union(&b.atoms()).cloned().collect();
    let mut support = BTreeSet::new();
    for y in &atoms {
        if !a.contains(y) || !b.contains(y) {
            continue;
        }
        let bounded = (0..3).any(|t| {
            let (Some(ia), Some(ib)) = (image(a, y, &atoms, t), image(b, y, &atoms, t)) else {
                return false;
            };
            ia.last() != Some(&0) && gcd_degree(ia, ib) == 0
        });
        if !bounded {
            support.insert(y.clone());
        }
    }
    support
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_of_shared_factor() {
        // (y + 1)(y + 2) and (y + 1)(y + 3)
        assert_eq!(gcd_degree(vec![2, 3, 1], vec![3, 4, 1]), 1);
        assert_eq!(gcd_degree(vec![2, 3, 1], vec![5, 1]), 0);
        assert_eq!(gcd_degree(vec![0, 0, 1], vec![0, 1]), 1);
    }

    #[test]
    fn inverse() {
        for a in [2u64, 3, 12345, P - 1] {
            assert_eq!(a * inv(a) % P, 1);
        }
    }
}
