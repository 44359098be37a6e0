//! Model files: TOML documents describing a foliated chart model.

use std::collections::BTreeMap;
use std::ops::Range;
use std::path::Path;

use foliaquant_core::calculus::{LeafwiseForm, MultivectorField};
use foliaquant_core::manifold::{Chart, CoordClass, LeafSlice, Splitting};
use foliaquant_core::prequant::{Connection, LeafwiseConnection};
use foliaquant_core::{CExpr, Error, Expr};
use serde::Deserialize;
use toml::Spanned;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Invalid(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    name: Option<String>,
    epsilon: Option<Spanned<String>>,
    #[serde(default)]
    parameters: Vec<String>,
    chart: RawChart,
    structure: RawStructure,
    connection: Option<RawConnection>,
    polarization: Option<RawPolarization>,
    #[serde(default)]
    observables: BTreeMap<String, Spanned<String>>,
    #[serde(default)]
    leaves: Vec<BTreeMap<String, Spanned<String>>>,
    #[serde(default)]
    options: RawOptions,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChart {
    #[serde(default)]
    transverse: Vec<String>,
    leaf: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    omega: Option<Spanned<Vec<RawComponent>>>,
    bivector: Option<Spanned<Vec<RawComponent>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    on: Spanned<Vec<String>>,
    value: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConnection {
    #[serde(default)]
    hermitian_gauge: bool,
    leafwise: Option<BTreeMap<String, Spanned<String>>>,
    full: Option<BTreeMap<String, Spanned<String>>>,
    #[serde(default)]
    splitting: Vec<RawSplit>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSplit {
    leaf: Spanned<String>,
    transverse: Spanned<String>,
    value: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolarization {
    generators: Vec<BTreeMap<String, Spanned<String>>>,
    hamiltonians_of: Option<Vec<Spanned<String>>>,
    reference_section: Option<Spanned<String>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    samples: Option<usize>,
    max_degree: Option<usize>,
    seed: Option<u64>,
}

/// How the leafwise symplectic structure was given.
#[derive(Clone, Debug)]
pub enum Structure {
    Omega(LeafwiseForm),
    Bivector(MultivectorField),
}

#[derive(Clone, Debug)]
pub struct ConnectionData {
    pub leafwise: LeafwiseConnection,
    /// Full potentials, when the model gives them.
    pub full: Option<Connection>,
    pub hermitian_gauge: bool,
    pub splitting: Splitting,
}

#[derive(Clone, Debug)]
pub struct PolarizationData {
    pub generators: Vec<MultivectorField>,
    pub hamiltonians: Option<Vec<Expr>>,
    pub reference_section: CExpr,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ModelOptions {
    pub samples: Option<usize>,
    pub max_degree: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct Model {
    pub name: String,
    pub chart: Chart,
    pub epsilon: Expr,
    pub structure: Structure,
    pub connection: Option<ConnectionData>,
    pub polarization: Option<PolarizationData>,
    pub observables: Vec<(String, Expr)>,
    pub leaves: Vec<LeafSlice>,
    pub options: ModelOptions,
}

/// Maps byte offsets of the source to 1-based line and column.
struct Locator<'a> {
    src: &'a str,
}

impl Locator<'_> {
    fn position(&self, offset: usize) -> (usize, usize) {
        let before = &self.src[..offset.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    }

    fn error(&self, span: Range<usize>, message: impl Into<String>) -> ModelError {
        let (line, column) = self.position(span.start);
        ModelError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    /// Converts a kernel error raised while parsing the string value at
    /// `span` into a located error.
    fn expression_error(&self, span: Range<usize>, e: Error) -> ModelError {
        match e {
            Error::Parse { column, message } => {
                // the span starts at the opening quote
                let offset = self.src[span.start..]
                    .char_indices()
                    .nth(column)
                    .map_or(span.start, |(o, _)| span.start + o);
                self.error(offset..offset, message)
            }
            other => self.error(span, other.to_string()),
        }
    }
}

impl Model {
    pub fn from_path(path: &Path) -> Result<Model, ModelError> {
        let src = std::fs::read_to_string(path).map_err(|e| ModelError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let default_name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".into());
        Model::from_str(&src, &default_name)
    }

    pub fn from_str(src: &str, default_name: &str) -> Result<Model, ModelError> {
        let loc = Locator { src };
        let raw: RawModel = toml::from_str(src).map_err(|e| {
            let span = e.span().unwrap_or(0..0);
            loc.error(span, e.message().to_string())
        })?;
        build(raw, &loc, default_name)
    }
}

fn build(raw: RawModel, loc: &Locator<'_>, default_name: &str) -> Result<Model, ModelError> {
    let coordinate_names: Vec<&str> = raw
        .chart
        .transverse
        .iter()
        .chain(&raw.chart.leaf)
        .map(String::as_str)
        .collect();
    let mut parameters: Vec<String> = raw.parameters.clone();
    let epsilon_src = raw
        .epsilon
        .as_ref()
        .map(|s| s.get_ref().trim().to_string())
        .unwrap_or_else(|| "1".into());
    let is_identifier = epsilon_src
        .chars()
        .next()
        .is_some_and(|c| c.is_alphabetic() || c == '_')
        && epsilon_src.chars().all(|c| c.is_alphanumeric() || c == '_');
    if is_identifier
        && !coordinate_names.contains(&epsilon_src.as_str())
        && !parameters.contains(&epsilon_src)
        && !foliaquant_core::kernel::parse::is_reserved(&epsilon_src)
    {
        parameters.push(epsilon_src.clone());
    }
    let t: Vec<&str> = raw.chart.transverse.iter().map(String::as_str).collect();
    let l: Vec<&str> = raw.chart.leaf.iter().map(String::as_str).collect();
    let p: Vec<&str> = parameters.iter().map(String::as_str).collect();
    let chart = Chart::with_parameters(&t, &l, &p).map_err(|e| ModelError::Invalid(e.to_string()))?;

    let real = |s: &Spanned<String>| -> Result<Expr, ModelError> {
        chart
            .parse_real(s.get_ref())
            .map_err(|e| loc.expression_error(s.span(), e))
    };
    let complex = |s: &Spanned<String>| -> Result<CExpr, ModelError> {
        chart
            .parse(s.get_ref())
            .map_err(|e| loc.expression_error(s.span(), e))
    };

    let epsilon = match &raw.epsilon {
        Some(s) => real(s)?,
        None => Expr::one(),
    };
    if epsilon.as_rational().is_some() {
        if epsilon.eval_f64(&Default::default()).is_none_or(|v| v <= 0.0) {
            let span = raw.epsilon.as_ref().map_or(0..0, |s| s.span());
            return Err(loc.error(span, "epsilon must be positive"));
        }
    }
    for a in 0..chart.dim() {
        if epsilon.depends_on(chart.name(a)) {
            let span = raw.epsilon.as_ref().map_or(0..0, |s| s.span());
            return Err(loc.error(span, "epsilon must not depend on coordinates"));
        }
    }

    let structure = match (&raw.structure.omega, &raw.structure.bivector) {
        (Some(_), Some(b)) => {
            return Err(loc.error(b.span(), "give either omega or bivector, not both"))
        }
        (None, None) => {
            return Err(ModelError::Invalid(
                "[structure] needs omega or bivector".into(),
            ))
        }
        (Some(om), None) => {
            let comps = components(om.get_ref(), 2, &real, loc, |n| {
                matches!(chart.coordinate(n), Some(c) if c.class == CoordClass::Leaf)
            })?;
            let refs: Vec<(Vec<&str>, Expr)> = comps
                .iter()
                .map(|(n, v)| (n.iter().map(String::as_str).collect(), v.clone()))
                .collect();
            Structure::Omega(
                LeafwiseForm::from_components(&chart, 2, &refs)
                    .map_err(|e| loc.error(om.span(), e.to_string()))?,
            )
        }
        (None, Some(bv)) => {
            let comps = components(bv.get_ref(), 2, &real, loc, |n| chart.coordinate(n).is_some())?;
            let refs: Vec<(Vec<&str>, Expr)> = comps
                .iter()
                .map(|(n, v)| (n.iter().map(String::as_str).collect(), v.clone()))
                .collect();
            Structure::Bivector(
                MultivectorField::from_components(&chart, 2, &refs)
                    .map_err(|e| loc.error(bv.span(), e.to_string()))?,
            )
        }
    };

    let connection = match &raw.connection {
        None => None,
        Some(c) => Some(connection(c, &chart, &complex, &real, loc)?),
    };

    let polarization = match &raw.polarization {
        None => None,
        Some(rp) => {
            let mut generators = Vec::new();
            for g in &rp.generators {
                let mut comps = vec![Expr::zero(); chart.dim()];
                for (name, v) in g {
                    let a = chart
                        .global_index(name)
                        .ok_or_else(|| loc.error(v.span(), format!("unknown coordinate `{name}`")))?;
                    comps[a] = real(v)?;
                }
                generators.push(MultivectorField::vector(&chart, comps).expect("chart-sized"));
            }
            let hamiltonians = rp
                .hamiltonians_of
                .as_ref()
                .map(|hs| hs.iter().map(&real).collect::<Result<Vec<_>, _>>())
                .transpose()?;
            if let (Some(hs), Some(raw_hs)) = (&hamiltonians, &rp.hamiltonians_of) {
                if hs.len() != generators.len() {
                    let span = raw_hs.first().map_or(0..0, |s| s.span());
                    return Err(loc.error(
                        span,
                        "hamiltonians_of needs one function per generator",
                    ));
                }
            }
            let reference_section = match &rp.reference_section {
                Some(s) => complex(s)?,
                None => CExpr::one(),
            };
            Some(PolarizationData {
                generators,
                hamiltonians,
                reference_section,
            })
        }
    };

    let observables = raw
        .observables
        .iter()
        .map(|(n, v)| Ok((n.clone(), real(v)?)))
        .collect::<Result<Vec<_>, ModelError>>()?;

    let mut leaves = Vec::new();
    for leaf in &raw.leaves {
        let mut values = BTreeMap::new();
        let mut first_span = 0..0;
        for (name, v) in leaf {
            first_span = v.span();
            values.insert(name.clone(), real(v)?);
        }
        leaves.push(LeafSlice::new(&chart, values).map_err(|e| loc.error(first_span, e.to_string()))?);
    }

    Ok(Model {
        name: raw.name.unwrap_or_else(|| default_name.to_string()),
        chart,
        epsilon,
        structure,
        connection,
        polarization,
        observables,
        leaves,
        options: ModelOptions {
            samples: raw.options.samples,
            max_degree: raw.options.max_degree,
            seed: raw.options.seed,
        },
    })
}

type Components = Vec<(Vec<String>, Expr)>;

fn components(
    raw: &[RawComponent],
    degree: usize,
    real: &dyn Fn(&Spanned<String>) -> Result<Expr, ModelError>,
    loc: &Locator<'_>,
    allowed: impl Fn(&str) -> bool,
) -> Result<Components, ModelError> {
    raw.iter()
        .map(|c| {
            let names = c.on.get_ref();
            if names.len() != degree {
                return Err(loc.error(c.on.span(), format!("expected {degree} coordinate names")));
            }
            if let Some(bad) = names.iter().find(|n| !allowed(n)) {
                return Err(loc.error(c.on.span(), format!("`{bad}` is not allowed here")));
            }
            Ok((names.clone(), real(&c.value)?))
        })
        .collect()
}

fn connection(
    c: &RawConnection,
    chart: &Chart,
    complex: &dyn Fn(&Spanned<String>) -> Result<CExpr, ModelError>,
    real: &dyn Fn(&Spanned<String>) -> Result<Expr, ModelError>,
    loc: &Locator<'_>,
) -> Result<ConnectionData, ModelError> {
    let mut splitting = Splitting::coordinate(chart);
    for s in &c.splitting {
        let leaf = match chart.coordinate(s.leaf.get_ref()) {
            Some(x) if x.class == CoordClass::Leaf => x.index,
            _ => return Err(loc.error(s.leaf.span(), "expected a leaf coordinate")),
        };
        let tr = match chart.coordinate(s.transverse.get_ref()) {
            Some(x) if x.class == CoordClass::Transverse => x.index,
            _ => return Err(loc.error(s.transverse.span(), "expected a transverse coordinate")),
        };
        splitting
            .set(leaf, tr, real(&s.value)?)
            .map_err(|e| ModelError::Invalid(e.to_string()))?;
    }
    let read = |m: &BTreeMap<String, Spanned<String>>, leaf_only: bool| {
        let mut out = vec![CExpr::zero(); chart.dim()];
        for (name, v) in m {
            match chart.coordinate(name) {
                Some(x) if !leaf_only || x.class == CoordClass::Leaf => {
                    out[chart.global_index(name).expect("known")] = complex(v)?;
                }
                Some(_) => {
                    return Err(loc.error(v.span(), format!("`{name}` is not a leaf coordinate")))
                }
                None => return Err(loc.error(v.span(), format!("unknown coordinate `{name}`"))),
            }
        }
        Ok(out)
    };
    let codim = chart.codim();
    let (leafwise, full) = match (&c.leafwise, &c.full) {
        (Some(_), Some(_)) => {
            return Err(ModelError::Invalid(
                "[connection] takes leafwise or full potentials, not both".into(),
            ))
        }
        (Some(m), None) => {
            let pots = read(m, true)?;
            (
                LeafwiseConnection::new(chart, pots[codim..].to_vec()).expect("leaf-sized"),
                None,
            )
        }
        (None, Some(m)) => {
            let pots = read(m, false)?;
            let g = Connection::new(chart, pots[..codim].to_vec(), pots[codim..].to_vec())
                .expect("chart-sized")
                .in_hermitian_gauge(c.hermitian_gauge);
            (g.restrict(), Some(g))
        }
        (None, None) => (LeafwiseConnection::flat(chart), None),
    };
    Ok(ConnectionData {
        leafwise,
        full,
        hermitian_gauge: c.hermitian_gauge,
        splitting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
epsilon = "eps"
[chart]
transverse = ["s"]
leaf = ["q", "p"]
[structure]
omega = [{ on = ["p", "q"], value = "1" }]
"#;

    #[test]
    fn loads_minimal_model() {
        let m = Model::from_str(MINIMAL, "m").unwrap();
        assert_eq!(m.name, "m");
        assert_eq!(m.epsilon, Expr::sym("eps"));
        assert!(m.chart.is_parameter("eps"));
        assert!(matches!(m.structure, Structure::Omega(_)));
    }

    #[test]
    fn locates_unknown_symbols() {
        let src = MINIMAL.replace(r#"value = "1""#, r#"value = "1 + zz""#);
        match Model::from_str(&src, "m") {
            Err(ModelError::Syntax { line, column, message }) => {
                assert_eq!(line, 7);
                let text = src.lines().nth(line - 1).unwrap();
                assert_eq!(&text[column - 1..column + 1], "zz");
                assert!(message.contains("zz"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_both_structures() {
        let src = format!("{MINIMAL}bivector = [{{ on = [\"p\", \"q\"], value = \"1\" }}]\n");
        assert!(matches!(Model::from_str(&src, "m"), Err(ModelError::Syntax { .. })));
    }

    #[test]
    fn reports_toml_syntax_position() {
        let src = "[chart\nleaf = []\n";
        match Model::from_str(src, "m") {
            Err(ModelError::Syntax { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_nonpositive_epsilon() {
        let src = MINIMAL.replace(r#"epsilon = "eps""#, r#"epsilon = "-2""#);
        assert!(Model::from_str(&src, "m").is_err());
    }
}
