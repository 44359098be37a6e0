//! Adapted charts of a foliated manifold, leaf slices and splittings.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{self, parse::is_reserved, Bindings, CExpr, Expr, ZeroTest};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoordClass {
    Transverse,
    Leaf,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coordinate {
    pub name: Arc<str>,
    pub class: CoordClass,
    /// Position within its class.
    pub index: usize,
}

#[derive(Debug, PartialEq, Eq)]
struct ChartData {
    transverse: Vec<Arc<str>>,
    leaf: Vec<Arc<str>>,
    parameters: Vec<Arc<str>>,
}

/// A chart `(z^λ; z^i)` whose leaves are the level sets `z^λ = const`.
///
/// Global indices list the transverse coordinates first, so leaf coordinate
/// `i` has global index `codim + i`. Parameters are symbols that are
/// constant everywhere (such as `eps`); they are never differentiated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart(Arc<ChartData>);

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new(transverse: &[&str], leaf: &[&str]) -> Result<Chart> {
        Chart::with_parameters(transverse, leaf, &[])
    }

    pub fn with_parameters(transverse: &[&str], leaf: &[&str], parameters: &[&str]) -> Result<Chart> {
        if leaf.is_empty() {
            return Err(Error::InvalidChart("no leaf coordinates".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in transverse.iter().chain(leaf).chain(parameters) {
            if !valid_identifier(name) || is_reserved(name) {
                return Err(Error::InvalidChart(format!("`{name}` is not a usable name")));
            }
            if !seen.insert(*name) {
                return Err(Error::InvalidChart(format!("`{name}` declared twice")));
            }
        }
        let arcs = |v: &[&str]| v.iter().map(|s| Arc::from(*s)).collect();
        Ok(Chart(Arc::new(ChartData {
            transverse: arcs(transverse),
            leaf: arcs(leaf),
            parameters: arcs(parameters),
        })))
    }

    pub fn codim(&self) -> usize {
        self.0.transverse.len()
    }

    pub fn leaf_dim(&self) -> usize {
        self.0.leaf.len()
    }

    pub fn dim(&self) -> usize {
        self.codim() + self.leaf_dim()
    }

    pub fn transverse(&self) -> &[Arc<str>] {
        &self.0.transverse
    }

    pub fn leaf(&self) -> &[Arc<str>] {
        &self.0.leaf
    }

    pub fn parameters(&self) -> &[Arc<str>] {
        &self.0.parameters
    }

    /// Name of the coordinate with global index `a`.
    pub fn name(&self, a: usize) -> &str {
        let c = self.codim();
        if a < c {
            &self.0.transverse[a]
        } else {
            &self.0.leaf[a - c]
        }
    }

    pub fn leaf_name(&self, i: usize) -> &str {
        &self.0.leaf[i]
    }

    pub fn leaf_global(&self, i: usize) -> usize {
        self.codim() + i
    }

    pub fn is_leaf_index(&self, a: usize) -> bool {
        a >= self.codim()
    }

    pub fn coordinate(&self, name: &str) -> Option<Coordinate> {
        let find = |v: &[Arc<str>], class| {
            v.iter().position(|s| &**s == name).map(|index| Coordinate {
                name: v[index].clone(),
                class,
                index,
            })
        };
        find(&self.0.transverse, CoordClass::Transverse)
            .or_else(|| find(&self.0.leaf, CoordClass::Leaf))
    }

    pub fn global_index(&self, name: &str) -> Option<usize> {
        self.coordinate(name).map(|c| match c.class {
            CoordClass::Transverse => c.index,
            CoordClass::Leaf => self.codim() + c.index,
        })
    }

    pub fn coordinates(&self) -> Vec<Coordinate> {
        (0..self.dim())
            .map(|a| self.coordinate(self.name(a)).expect("own coordinate"))
            .collect()
    }

    pub fn is_parameter(&self, name: &str) -> bool {
        self.0.parameters.iter().any(|p| &**p == name)
    }

    /// True for coordinates and parameters.
    pub fn knows(&self, name: &str) -> bool {
        self.coordinate(name).is_some() || self.is_parameter(name)
    }

    pub fn parse(&self, src: &str) -> Result<CExpr> {
        kernel::parse(src, &|n| self.knows(n))
    }

    pub fn parse_real(&self, src: &str) -> Result<Expr> {
        kernel::parse_real(src, &|n| self.knows(n))
    }

    /// Partial derivative along a chart coordinate.
    pub fn diff<S: Scalar>(&self, e: &S, x: &str) -> Result<S> {
        if self.coordinate(x).is_none() {
            return Err(Error::UnknownCoordinate(x.to_string()));
        }
        Ok(e.diff(x))
    }

    /// The chart of a single leaf: the same leaf coordinates and parameters,
    /// no transverse ones.
    pub fn leaf_chart(&self) -> Chart {
        Chart(Arc::new(ChartData {
            transverse: Vec::new(),
            leaf: self.0.leaf.clone(),
            parameters: self.0.parameters.clone(),
        }))
    }

    /// Membership in `S_F(Z)`: every leafwise partial derivative vanishes.
    pub fn is_foliated_constant<S: Scalar>(&self, f: &S, zt: &ZeroTest) -> Result<bool> {
        for x in self.leaf() {
            if !f.diff(x).is_zero(zt)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Arc<str>]| v.iter().map(|s| &**s).collect::<Vec<_>>().join(", ");
        write!(f, "({}; {})", join(self.transverse()), join(self.leaf()))
    }
}

/// A leaf `z^λ = c^λ` of an adapted chart.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafSlice {
    chart: Chart,
    bindings: Bindings,
}

impl LeafSlice {
    /// Every transverse coordinate must be bound to an expression free of
    /// chart coordinates.
    pub fn new(chart: &Chart, values: BTreeMap<String, Expr>) -> Result<LeafSlice> {
        let mut bindings = Bindings::new();
        for (name, value) in values {
            match chart.coordinate(&name) {
                Some(c) if c.class == CoordClass::Transverse => {}
                Some(_) => {
                    return Err(Error::InvalidSlice(format!("`{name}` is a leaf coordinate")))
                }
                None => return Err(Error::UnknownCoordinate(name)),
            }
            if let Some(a) = (0..chart.dim()).find(|&a| value.depends_on(chart.name(a))) {
                return Err(Error::InvalidSlice(format!(
                    "value of `{name}` depends on `{}`",
                    chart.name(a)
                )));
            }
            bindings.insert(Arc::from(name.as_str()), value);
        }
        if let Some(missing) = chart.transverse().iter().find(|t| !bindings.contains_key(*t)) {
            return Err(Error::InvalidSlice(format!("`{missing}` is not bound")));
        }
        Ok(LeafSlice {
            chart: chart.clone(),
            bindings,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn bindings(&self) -> &Bindings {
        &self.bindings
    }

    pub fn value(&self, name: &str) -> Option<&Expr> {
        self.bindings.get(name)
    }

    /// Substitutes the transverse values; fails if a denominator vanishes on
    /// the leaf.
    pub fn restrict<S: Scalar>(&self, e: &S) -> Result<S> {
        e.try_substitute(&self.bindings)
            .ok_or_else(|| Error::InvalidSlice(format!("`{e}` has a pole on the leaf {self}")))
    }

    /// Images of all chart coordinates under the leaf inclusion, in global
    /// index order, as functions of the leaf chart coordinates.
    pub fn embedding(&self) -> Vec<Expr> {
        let mut out: Vec<Expr> = self
            .chart
            .transverse()
            .iter()
            .map(|t| self.bindings[t].clone())
            .collect();
        out.extend(self.chart.leaf().iter().map(|x| Expr::sym(x)));
        out
    }
}

impl fmt::Display for LeafSlice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .chart
            .transverse()
            .iter()
            .map(|t| format!("{t}={}", self.bindings[t]))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn restrict_to_leaf<S: Scalar>(e: &S, slice: &LeafSlice) -> Result<S> {
    slice.restrict(e)
}

/// Coefficients `B^i_λ` of a splitting of `0 → TF → TZ → TZ/TF → 0`;
/// the transverse direction `∂_λ` lifts to `∂_λ + B^i_λ ∂_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Splitting {
    codim: usize,
    leaf_dim: usize,
    coefficients: BTreeMap<(usize, usize), Expr>,
}

impl Splitting {
    /// The coordinate splitting, `B = 0`.
    pub fn coordinate(chart: &Chart) -> Splitting {
        Splitting {
            codim: chart.codim(),
            leaf_dim: chart.leaf_dim(),
            coefficients: BTreeMap::new(),
        }
    }

    /// Sets `B^i_λ` for leaf index `i` and transverse index `lambda`.
    pub fn set(&mut self, i: usize, lambda: usize, value: Expr) -> Result<()> {
        if i >= self.leaf_dim || lambda >= self.codim {
            return Err(Error::Dimension(format!("splitting index ({i}, {lambda})")));
        }
        if value.is_zero_structural() {
            self.coefficients.remove(&(i, lambda));
        } else {
            self.coefficients.insert((i, lambda), value);
        }
        Ok(())
    }

    pub fn get(&self, i: usize, lambda: usize) -> Expr {
        self.coefficients
            .get(&(i, lambda))
            .cloned()
            .unwrap_or_default()
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn leaf_dim(&self) -> usize {
        self.leaf_dim
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Chart {
        Chart::with_parameters(&["s"], &["q", "p"], &["eps"]).unwrap()
    }

    #[test]
    fn rejects_bad_charts() {
        assert!(Chart::new(&["s"], &[]).is_err());
        assert!(Chart::new(&["q"], &["q", "p"]).is_err());
        assert!(Chart::new(&[], &["i", "p"]).is_err());
        assert!(Chart::new(&[], &["2x"]).is_err());
    }

    #[test]
    fn indexing() {
        let c = chart();
        assert_eq!(c.dim(), 3);
        assert_eq!(c.name(0), "s");
        assert_eq!(c.name(2), "p");
        assert_eq!(c.global_index("q"), Some(1));
        assert_eq!(c.coordinate("eps"), None);
        assert!(c.knows("eps"));
    }

    #[test]
    fn diff_rejects_unknown() {
        let c = chart();
        let e = c.parse_real("s*q").unwrap();
        assert_eq!(c.diff(&e, "q").unwrap(), Expr::sym("s"));
        assert_eq!(
            c.diff(&e, "x"),
            Err(Error::UnknownCoordinate("x".into()))
        );
    }

    #[test]
    fn foliated_constants() {
        let c = chart();
        let zt = ZeroTest::default();
        for (src, expected) in [("s^2", true), ("s*q", false), ("5", true), ("eps*s", true)] {
            let f = c.parse_real(src).unwrap();
            assert_eq!(c.is_foliated_constant(&f, &zt), Ok(expected), "{src}");
        }
    }

    #[test]
    fn slices() {
        let c = chart();
        let slice = LeafSlice::new(&c, [("s".to_string(), Expr::int(1))].into()).unwrap();
        let e = c.parse_real("s*q").unwrap();
        assert_eq!(slice.restrict(&e).unwrap(), Expr::sym("q"));
        assert!(LeafSlice::new(&c, BTreeMap::new()).is_err());
        assert!(LeafSlice::new(&c, [("q".to_string(), Expr::int(1))].into()).is_err());
        assert!(LeafSlice::new(&c, [("s".to_string(), Expr::sym("q"))].into()).is_err());
        let pole = LeafSlice::new(&c, [("s".to_string(), Expr::zero())].into()).unwrap();
        assert!(pole.restrict(&c.parse_real("q/s").unwrap()).is_err());
    }
}
