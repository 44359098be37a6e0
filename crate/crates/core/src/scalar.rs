//! The coefficient interface shared by real and complex component tables.

use std::fmt::{Debug, Display};

use crate::error::Result;
use crate::kernel::{Bindings, CExpr, Expr, ZeroTest};

pub trait Scalar: Clone + PartialEq + Debug + Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(e: Expr) -> Self;
    fn is_zero_structural(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul_real(&self, k: &Expr) -> Self;
    fn diff(&self, x: &str) -> Self;
    fn try_substitute(&self, b: &Bindings) -> Option<Self>;
    fn depends_on(&self, x: &str) -> bool;
    fn is_zero(&self, zt: &ZeroTest) -> Result<bool>;
}

impl Scalar for Expr {
    fn zero() -> Self {
        Expr::zero()
    }
    fn one() -> Self {
        Expr::one()
    }
    fn from_real(e: Expr) -> Self {
        e
    }
    fn is_zero_structural(&self) -> bool {
        Expr::is_zero_structural(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul_real(&self, k: &Expr) -> Self {
        self * k
    }
    fn diff(&self, x: &str) -> Self {
        Expr::diff(self, x)
    }
    fn try_substitute(&self, b: &Bindings) -> Option<Self> {
        Expr::try_substitute(self, b)
    }
    fn depends_on(&self, x: &str) -> bool {
        Expr::depends_on(self, x)
    }
    fn is_zero(&self, zt: &ZeroTest) -> Result<bool> {
        zt.is_zero(self)
    }
}

impl Scalar for CExpr {
    fn zero() -> Self {
        CExpr::zero()
    }
    fn one() -> Self {
        CExpr::one()
    }
    fn from_real(e: Expr) -> Self {
        CExpr::real(e)
    }
    fn is_zero_structural(&self) -> bool {
        CExpr::is_zero_structural(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul_real(&self, k: &Expr) -> Self {
        self.scale(k)
    }
    fn diff(&self, x: &str) -> Self {
        CExpr::diff(self, x)
    }
    fn try_substitute(&self, b: &Bindings) -> Option<Self> {
        Some(CExpr::new(
            self.re.try_substitute(b)?,
            self.im.try_substitute(b)?,
        ))
    }
    fn depends_on(&self, x: &str) -> bool {
        CExpr::depends_on(self, x)
    }
    fn is_zero(&self, zt: &ZeroTest) -> Result<bool> {
        zt.is_zero_complex(self)
    }
}
