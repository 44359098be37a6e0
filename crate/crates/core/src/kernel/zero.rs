//! Three-valued zero test.
//!
//! A structurally zero numerator is zero. A nonzero numerator free of
//! transcendental atoms is a nonzero polynomial and therefore a nonzero
//! function. Everything else is sampled at random rational points; any
//! clearly nonzero sample refutes, and samples that are neither clearly zero
//! nor clearly nonzero make the answer inconclusive.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::complex::CExpr;
use super::expr::{Expr, Point};
use crate::error::{Error, Result};

const ZERO_TOL: f64 = 1e-9;
const NONZERO_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZeroTest {
    /// Evaluation points for the randomized fallback.
    pub samples: usize,
    pub seed: u64,
    /// Resamples allowed after landing on a pole or overflow.
    pub max_retries: usize,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest {
            samples: 16,
            seed: 0x5eed_f011,
            max_retries: 64,
        }
    }
}

impl ZeroTest {
    pub fn with_samples(samples: usize) -> Self {
        ZeroTest {
            samples,
            ..ZeroTest::default()
        }
    }

    pub fn is_zero(&self, e: &Expr) -> Result<bool> {
        if e.is_zero_structural() {
            return Ok(true);
        }
        if e.numerator().is_pure() {
            return Ok(false);
        }
        self.sample(e)
    }

    pub fn is_zero_complex(&self, c: &CExpr) -> Result<bool> {
        let re = self.is_zero(&c.re);
        if re == Ok(false) {
            return Ok(false);
        }
        let im = self.is_zero(&c.im)?;
        Ok(re? && im)
    }

    pub fn equal(&self, a: &Expr, b: &Expr) -> Result<bool> {
        self.is_zero(&(a - b))
    }

    fn sample(&self, e: &Expr) -> Result<bool> {
        let symbols: Vec<Arc<str>> = e.symbols().into_iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut accepted = 0;
        let mut retries = 0;
        let mut ambiguous = false;
        while accepted < self.samples.max(1) {
            let point: Point = symbols
                .iter()
                .map(|s| (s.clone(), random_rational(&mut rng)))
                .collect();
            match e.eval_numerator_with_scale(&point) {
                None => {
                    retries += 1;
                    if retries > self.max_retries {
                        return Err(Error::Inconclusive(e.to_string()));
                    }
                }
                Some((value, scale)) => {
                    accepted += 1;
                    let v = value.abs();
                    if v > NONZERO_TOL * scale.max(f64::MIN_POSITIVE) {
                        return Ok(false);
                    }
                    if v > ZERO_TOL * scale {
                        ambiguous = true;
                    }
                }
            }
            if symbols.is_empty() && accepted > 0 {
                break;
            }
        }
        if ambiguous {
            Err(Error::Inconclusive(e.to_string()))
        } else {
            Ok(true)
        }
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> f64 {
    let q: i64 = rng.gen_range(1..=8);
    let p: i64 = rng.gen_range(-3 * q..=3 * q);
    p as f64 / q as f64
}

/// Zero test with the default configuration.
pub fn is_zero(e: &Expr) -> Result<bool> {
    ZeroTest::default().is_zero(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse::parse_real;

    fn expr(s: &str) -> Expr {
        parse_real(s, &|_| true).unwrap()
    }

    #[test]
    fn commutativity_is_structural() {
        assert_eq!(is_zero(&expr("q*p - p*q")), Ok(true));
    }

    #[test]
    fn distinct_coordinates_differ() {
        assert_eq!(is_zero(&expr("q - p")), Ok(false));
    }

    #[test]
    fn pythagorean_identity() {
        assert_eq!(is_zero(&expr("sin(q)^2 + cos(q)^2 - 1")), Ok(true));
    }

    #[test]
    fn double_angle_needs_sampling() {
        let e = expr("sin(2*q) - 2*sin(q)*cos(q)");
        assert!(!e.is_zero_structural());
        assert_eq!(is_zero(&e), Ok(true));
        assert_eq!(is_zero(&expr("sin(2*q) - sin(q)*cos(q)")), Ok(false));
    }

    #[test]
    fn congruence_through_transcendentals() {
        let a = expr("exp(q+p)");
        let b = expr("exp(q)*exp(p)");
        let c = expr("exp(p)*exp(q)");
        let zt = ZeroTest::default();
        assert_eq!(zt.equal(&a, &b), Ok(true));
        assert_eq!(zt.equal(&b, &c), Ok(true));
        assert_eq!(zt.equal(&a, &c), Ok(true));
    }

    #[test]
    fn unevaluable_is_inconclusive() {
        let zt = ZeroTest {
            samples: 4,
            seed: 1,
            max_retries: 3,
        };
        // overflows at every sample point
        let e = expr("exp(exp(q^2 + 10)) - 1");
        assert!(matches!(zt.is_zero(&e), Err(Error::Inconclusive(_))));
    }
}
