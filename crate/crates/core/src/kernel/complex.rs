//! Complex symbolic scalars as structural `(re, im)` pairs of real expressions.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::expr::{owned_binops, Bindings, Expr};

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CExpr {
    pub re: Expr,
    pub im: Expr,
}

impl CExpr {
    pub fn new(re: Expr, im: Expr) -> Self {
        CExpr { re, im }
    }

    pub fn real(re: Expr) -> Self {
        CExpr { re, im: Expr::zero() }
    }

    pub fn imag(im: Expr) -> Self {
        CExpr { re: Expr::zero(), im }
    }

    pub fn zero() -> Self {
        CExpr::default()
    }

    pub fn one() -> Self {
        CExpr::real(Expr::one())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        CExpr::imag(Expr::one())
    }

    pub fn is_zero_structural(&self) -> bool {
        self.re.is_zero_structural() && self.im.is_zero_structural()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero_structural()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero_structural()
    }

    pub fn conj(&self) -> CExpr {
        CExpr::new(self.re.clone(), -&self.im)
    }

    /// Multiplication by `i`.
    pub fn times_i(&self) -> CExpr {
        CExpr::new(-&self.im, self.re.clone())
    }

    pub fn scale(&self, k: &Expr) -> CExpr {
        CExpr::new(&self.re * k, &self.im * k)
    }

    pub fn norm_sqr(&self) -> Expr {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn recip(&self) -> Option<CExpr> {
        if self.is_real() {
            return self.re.recip().map(CExpr::real);
        }
        let n = self.norm_sqr().recip()?;
        Some(self.conj().scale(&n))
    }

    pub fn checked_div(&self, other: &CExpr) -> Option<CExpr> {
        other.recip().map(|r| self * &r)
    }

    pub fn powi(&self, e: i32) -> Option<CExpr> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc = CExpr::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Some(acc)
    }

    pub fn diff(&self, x: &str) -> CExpr {
        CExpr::new(self.re.diff(x), self.im.diff(x))
    }

    pub fn substitute(&self, b: &Bindings) -> CExpr {
        CExpr::new(self.re.substitute(b), self.im.substitute(b))
    }

    pub fn depends_on(&self, x: &str) -> bool {
        self.re.depends_on(x) || self.im.depends_on(x)
    }

    /// `exp(a + ib) = exp(a) (cos b + i sin b)`.
    pub fn exp(&self) -> CExpr {
        let m = self.re.exp();
        if self.is_real() {
            return CExpr::real(m);
        }
        CExpr::new(&m * &self.im.cos(), &m * &self.im.sin())
    }

    /// `sin(a + ib) = sin a cosh b + i cos a sinh b`.
    pub fn sin(&self) -> CExpr {
        if self.is_real() {
            return CExpr::real(self.re.sin());
        }
        let (ch, sh) = cosh_sinh(&self.im);
        CExpr::new(&self.re.sin() * &ch, &self.re.cos() * &sh)
    }

    /// `cos(a + ib) = cos a cosh b - i sin a sinh b`.
    pub fn cos(&self) -> CExpr {
        if self.is_real() {
            return CExpr::real(self.re.cos());
        }
        let (ch, sh) = cosh_sinh(&self.im);
        CExpr::new(&self.re.cos() * &ch, -(&self.re.sin() * &sh))
    }
}

fn cosh_sinh(b: &Expr) -> (Expr, Expr) {
    let half = Expr::rational(1, 2);
    let ep = b.exp();
    let em = (-b).exp();
    (&half * &(&ep + &em), &half * &(&ep - &em))
}

impl From<Expr> for CExpr {
    fn from(e: Expr) -> Self {
        CExpr::real(e)
    }
}

impl Add for &CExpr {
    type Output = CExpr;
    fn add(self, rhs: &CExpr) -> CExpr {
        CExpr::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &CExpr {
    type Output = CExpr;
    fn sub(self, rhs: &CExpr) -> CExpr {
        CExpr::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &CExpr {
    type Output = CExpr;
    fn mul(self, rhs: &CExpr) -> CExpr {
        if self.is_real() && rhs.is_real() {
            return CExpr::real(&self.re * &rhs.re);
        }
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        CExpr::new(re, im)
    }
}

impl Div for &CExpr {
    type Output = CExpr;
    fn div(self, rhs: &CExpr) -> CExpr {
        self.checked_div(rhs).expect("division by zero expression")
    }
}

impl Neg for &CExpr {
    type Output = CExpr;
    fn neg(self) -> CExpr {
        CExpr::new(-&self.re, -&self.im)
    }
}

impl Neg for CExpr {
    type Output = CExpr;
    fn neg(self) -> CExpr {
        -&self
    }
}

owned_binops!(CExpr, Add add, Sub sub, Mul mul, Div div);

fn is_simple_factor(e: &Expr) -> bool {
    if !e.denominator().is_one() || e.numerator().len() != 1 {
        return false;
    }
    let (_, c) = e.numerator().terms().next().expect("one term");
    use num_traits::Signed;
    !c.is_negative()
}

impl fmt::Display for CExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_real() {
            return write!(f, "{}", self.re);
        }
        let neg = -&self.im;
        let (sign, mag) = if is_simple_factor(&neg) {
            ("-", &neg)
        } else {
            ("+", &self.im)
        };
        let im = if mag.is_one() {
            "i".to_string()
        } else if is_simple_factor(mag) {
            format!("i*{mag}")
        } else {
            format!("i*({mag})")
        };
        match (self.re.is_zero_structural(), sign) {
            (true, "-") => write!(f, "-{im}"),
            (true, _) => write!(f, "{im}"),
            (false, s) => write!(f, "{} {s} {im}", self.re),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_squares_to_minus_one() {
        assert_eq!(&CExpr::i() * &CExpr::i(), CExpr::real(Expr::int(-1)));
    }

    #[test]
    fn complex_division() {
        let z = CExpr::new(Expr::int(1), Expr::sym("q"));
        let w = &z / &z;
        assert_eq!(w, CExpr::one());
    }

    #[test]
    fn prints_negative_imaginary_parts() {
        assert_eq!(CExpr::imag(Expr::int(-1)).to_string(), "-i");
        let z = CExpr::new(Expr::sym("q"), -&Expr::sym("p"));
        assert_eq!(z.to_string(), "q - i*p");
    }

    #[test]
    fn euler_formula_shape() {
        let z = CExpr::imag(Expr::sym("q"));
        let e = z.exp();
        assert_eq!(e.re, Expr::sym("q").cos());
        assert_eq!(e.im, Expr::sym("q").sin());
    }
}
