//! Infix expression syntax shared by model files and the printer.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' ['-'] integer | '^' '(' ['-'] integer ')')?
//! primary := number | name | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `i` is the imaginary unit, `pi` the circle constant, `sin`, `cos`, `exp`
//! the supported functions. Every other name must be accepted by the caller's
//! resolver.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use super::complex::CExpr;
use super::expr::Expr;
use crate::error::{Error, Result};

pub const RESERVED: [&str; 5] = ["i", "pi", "sin", "cos", "exp"];

pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

/// Parses `src`, accepting free names for which `known` returns true.
pub fn parse(src: &str, known: &dyn Fn(&str) -> bool) -> Result<CExpr> {
    let chars: Vec<char> = src.chars().collect();
    let mut p = Parser {
        chars,
        pos: 0,
        known,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error(&format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(e)
}

/// Parses an expression that must be real.
pub fn parse_real(src: &str, known: &dyn Fn(&str) -> bool) -> Result<Expr> {
    let c = parse(src, known)?;
    if !c.is_real() {
        return Err(Error::Parse {
            column: 1,
            message: format!("expected a real expression, found `{c}`"),
        });
    }
    Ok(c.re)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    known: &'a dyn Fn(&str) -> bool,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Parse {
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<CExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<CExpr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let at = self.pos;
                let d = self.unary()?;
                acc = acc.checked_div(&d).ok_or(Error::Parse {
                    column: at + 1,
                    message: "division by zero".into(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<CExpr> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<CExpr> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let negative = self.eat('-');
        self.skip_ws();
        let at = self.pos;
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return Err(self.error("expected an integer exponent"));
        }
        let mut e: i32 = digits.parse().map_err(|_| Error::Parse {
            column: at + 1,
            message: "exponent too large".into(),
        })?;
        if negative {
            e = -e;
        }
        if paren && !self.eat(')') {
            return Err(self.error("expected `)`"));
        }
        base.powi(e).ok_or(Error::Parse {
            column: at + 1,
            message: "negative power of zero".into(),
        })
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn primary(&mut self) -> Result<CExpr> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => {
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                match name.as_str() {
                    "i" => Ok(CExpr::i()),
                    "pi" => Ok(CExpr::real(Expr::pi())),
                    "sin" | "cos" | "exp" => {
                        if !self.eat('(') {
                            return Err(self.error(&format!("expected `(` after `{name}`")));
                        }
                        let arg = self.expr()?;
                        if !self.eat(')') {
                            return Err(self.error("expected `)`"));
                        }
                        Ok(match name.as_str() {
                            "sin" => arg.sin(),
                            "cos" => arg.cos(),
                            _ => arg.exp(),
                        })
                    }
                    _ if (self.known)(&name) => Ok(CExpr::real(Expr::sym(&name))),
                    _ => Err(Error::Parse {
                        column: start + 1,
                        message: format!("unknown coordinate `{name}`"),
                    }),
                }
            }
            Some(c) => Err(self.error(&format!("unexpected `{c}`"))),
        }
    }

    fn number(&mut self) -> Result<CExpr> {
        let start = self.pos;
        let int_part = self.take_while(|c| c.is_ascii_digit());
        let mut frac = String::new();
        if self.peek() == Some('.') {
            self.pos += 1;
            frac = self.take_while(|c| c.is_ascii_digit());
        }
        if int_part.is_empty() && frac.is_empty() {
            return Err(Error::Parse {
                column: start + 1,
                message: "malformed number".into(),
            });
        }
        let digits = format!("{int_part}{frac}");
        let n: BigInt = digits.parse().map_err(|_| Error::Parse {
            column: start + 1,
            message: "malformed number".into(),
        })?;
        let d: BigInt = Pow::pow(BigInt::from(10u8), frac.len());
        let value = BigRational::new(n, d);
        debug_assert!(!value.denom().is_zero());
        Ok(CExpr::real(Expr::from_rational(value)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn any(_: &str) -> bool {
        true
    }

    fn qp(n: &str) -> bool {
        matches!(n, "q" | "p" | "s" | "eps")
    }

    #[test]
    fn parses_precedence() {
        let e = parse("(1+q^2)*p", &any).unwrap();
        let q = Expr::sym("q");
        let expected = &(&Expr::one() + &(&q * &q)) * &Expr::sym("p");
        assert_eq!(e, CExpr::real(expected));
        let e = parse("-q^2", &any).unwrap();
        assert_eq!(e, CExpr::real(-(&q * &q)));
    }

    #[test]
    fn imaginary_unit_is_structural() {
        let e = parse("i*eps*p", &any).unwrap();
        assert!(e.re.is_zero_structural());
        assert_eq!(e.im, &Expr::sym("eps") * &Expr::sym("p"));
    }

    #[test]
    fn decimals_are_exact() {
        let e = parse("0.25*q", &any).unwrap();
        assert_eq!(e.re, &Expr::rational(1, 4) * &Expr::sym("q"));
    }

    #[test]
    fn negative_exponents() {
        let e = parse("q^-2 * q^(2)", &any).unwrap();
        assert!(e.re.is_one());
    }

    #[test]
    fn unknown_name_reports_column() {
        let err = parse("q + zz", &qp).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                column: 5,
                message: "unknown coordinate `zz`".into()
            }
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("q +", &qp).is_err());
        assert!(parse("(q", &qp).is_err());
        assert!(parse("q)", &qp).is_err());
        assert!(parse("1/(q-q)", &qp).is_err());
        assert!(parse("", &qp).is_err());
    }

    #[test]
    fn printer_output_reparses() {
        for src in [
            "(1+q^2)*p",
            "i*eps*p",
            "3 + i*(q - 1/2)",
            "p/(1+q^2)",
            "-2*q/(1+q^2)^2",
            "sin(q)*exp(s) - cos(2*q)",
            "q/(s*p)",
            "exp(-q)/3",
            "-i",
            "q - i*p",
            "2 - i*(p + 1)",
        ] {
            let e = parse(src, &any).unwrap();
            let printed = e.to_string();
            let back = parse(&printed, &any).unwrap();
            assert_eq!(back, e, "{src} -> {printed}");
        }
    }
}
