//! Serialisable run reports.

use std::collections::BTreeMap;

use foliaquant_core::report::{CheckResult, Status};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub model: String,
    pub seed: u64,
    pub options: ReportOptions,
    pub derived: BTreeMap<String, String>,
    pub checks: Vec<CheckEntry>,
    pub summary: Summary,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

#[derive(Debug, Serialize)]
pub struct ReportOptions {
    pub samples: usize,
    pub max_degree: usize,
}

#[derive(Debug, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub anchor: &'static str,
    pub status: &'static str,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub skipped: usize,
}

impl Summary {
    pub fn of(results: &[CheckResult]) -> Summary {
        let mut s = Summary::default();
        for r in results {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Inconclusive => s.inconclusive += 1,
                Status::Skipped => s.skipped += 1,
            }
        }
        s
    }
}

impl CheckEntry {
    pub fn from_result(r: &CheckResult) -> CheckEntry {
        CheckEntry {
            name: r.name.clone(),
            anchor: anchor(&r.name),
            status: r.status.as_str(),
            samples: r.samples,
            residual: r.residual.clone(),
            note: r.note.clone(),
        }
    }
}

/// The mathematical statement a check verifies, keyed by name.
pub fn anchor(name: &str) -> &'static str {
    let parts: Vec<&str> = name.split('.').collect();
    let key = match parts.as_slice() {
        ["leaves", _, rest @ ..] => format!("leaves.{}", rest.join(".")),
        ["polarization", "algebra", _] => "polarization.algebra".into(),
        ["dirac", "invariance", _] => "dirac.invariance".into(),
        _ => name.to_string(),
    };
    match key.as_str() {
        "selftest.schouten_convention" => "bracket sign convention: contravariant d intertwines with Omega-sharp",
        "structure.symplectic" => "leafwise 2-form is closed and non-degenerate",
        "structure.schouten_square" => "Schouten square [w, w] vanishes",
        "structure.subordinate" => "bivector is tangent to the foliation",
        "structure.intertwining" => "w-hat composed with Omega-sharp equals minus Omega-sharp composed with d~",
        "structure.round_trip" => "symplectic form and bivector determine each other",
        "structure.jacobi" => "Jacobi identity of the leafwise Poisson bracket",
        "structure.antisymmetry" => "antisymmetry of the leafwise Poisson bracket",
        "structure.leibniz" => "Leibniz rule of the leafwise Poisson bracket",
        "structure.bracket_kernel" => "foliated functions Poisson-commute with everything",
        "structure.bracket_reconstruction" => "{f, g} = Omega(theta_f, theta_g) = w(d~f, d~g)",
        "structure.sharp_flat" => "Omega-flat and Omega-sharp are mutually inverse",
        "calculus.d_squared" => "d squared vanishes on forms",
        "calculus.leafwise_d_squared" => "d~ squared vanishes on leafwise forms",
        "calculus.cochain" => "projection to leafwise forms is a cochain map",
        "calculus.leaf_factorization" => "pullback to a leaf factors through leafwise forms",
        "calculus.schouten_antisymmetry" => "graded antisymmetry of the Schouten bracket",
        "calculus.schouten_jacobi" => "graded Jacobi identity of the Schouten bracket",
        "calculus.contravariant_square" => "contravariant differential squares to zero",
        "prequant.condition" => "leafwise curvature equals i eps Omega",
        "prequant.curvature_projection" => "curvature of a connection projects to the leafwise curvature",
        "prequant.lift" => "lift of the leafwise connection restricts to it",
        "prequant.lift_round_trip" => "lift of random leafwise connections restricts back",
        "prequant.gauge_invariance" => "leafwise curvature is gauge invariant",
        "prequant.leibniz" => "Leibniz rule of the leafwise covariant derivative",
        "prequant.endomorphism" => "curvature endomorphism equals R(u, v)",
        "prequant.leaf_curvature" => "restricted connection prequantizes the restricted form",
        "prequant.chern_form" => "leafwise part of the Chern form is -eps/(2 pi) Omega",
        "prequant.unitary_chain" => "unitary reduction has curvature i Im R and the same Chern form",
        "polarization.subordinate" => "polarization generators are tangent to the leaves",
        "polarization.involutive" => "polarization is involutive",
        "polarization.isotropic" => "polarization is isotropic",
        "polarization.rank" => "rank of the polarization",
        "polarization.hamiltonians" => "Hamiltonian fields of the given functions span the polarization",
        "polarization.reference_section" => "reference section is polarized",
        "polarization.algebra" => "observable lies in the quantum algebra",
        "dirac.pairs" => "Dirac condition on observable pairs",
        "dirac.membership" => "sampled functions lie in the quantum algebra",
        "dirac.sample" => "Dirac condition on sampled quantum algebra members",
        "dirac.invariance" => "quantized observable preserves polarized sections",
        "dirac.sample_invariance" => "sampled members preserve polarized sections",
        "dirac.kernel" => "foliated functions quantize to multiplication by eps f",
        "dirac.linearity" => "quantization is linear",
        "dirac.self_adjoint" => "quantized real observables are formally self-adjoint",
        "leaves.symplectic" => "restricted form is symplectic on the leaf",
        "leaves.bracket" => "restriction to a leaf is a Poisson map",
        "leaves.prequant" => "restricted connection prequantizes the leaf",
        "leaves.polarization" => "restricted polarization is a polarization of the leaf",
        "leaves.algebra" => "restricted algebra members stay in the leaf algebra",
        "leaves.commutation" => "quantization commutes with restriction to the leaf",
        "leaves.polarized_restriction" => "polarized sections restrict to polarized sections",
        "leaves.restriction" => "model restricts to the leaf",
        _ => "",
    }
}
