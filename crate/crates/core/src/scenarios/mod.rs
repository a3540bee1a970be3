//! Worked configurations shipped as JSON fixtures, and their self-checks.

mod conic;

pub use conic::{
    conic_from_square, perfect_square_root, tangency_discriminant, verify_degenerate_conic_identity,
    verify_degenerate_conic_samples, Conic, ConicCheck,
};

use crate::arith::{self, Rational};
use crate::configspec::{ConfigJson, ConfigSpec, Perm};
use crate::cremona::{self, CremonaCase};
use crate::eliminate::{self, DecideOptions, Robustness};
use crate::enumerate::Assignment;
use crate::lattice::ClassVector;
use crate::nearness::{self, CombinatorialType, TypeIsomorphism};
use serde::{Deserialize, Serialize};

pub const SCENARIO_NAMES: [&str; 7] =
    ["fano7", "fanoExtended8", "d2conic7", "d2Extended8", "def110", "nineNeg3N12", "sevenNeg2Config"];

fn fixture(name: &str) -> Option<&'static str> {
    Some(match name {
        "fano7" => include_str!("../../fixtures/fano7.json"),
        "fanoExtended8" => include_str!("../../fixtures/fanoExtended8.json"),
        "d2conic7" => include_str!("../../fixtures/d2conic7.json"),
        "d2Extended8" => include_str!("../../fixtures/d2Extended8.json"),
        "def110" => include_str!("../../fixtures/def110.json"),
        "nineNeg3N12" => include_str!("../../fixtures/nineNeg3N12.json"),
        "sevenNeg2Config" => include_str!("../../fixtures/sevenNeg2Config.json"),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{name}`; known: {known}", name = .0, known = SCENARIO_NAMES.join(", "))]
    Unknown(String),
    #[error("fixture `{0}` is malformed: {1}")]
    Malformed(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestGolden {
    pub roots: Vec<usize>,
    /// (child, parent), 1-based.
    pub parents: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformGolden {
    pub gamma: [usize; 3],
    pub case: CremonaCase,
    /// The reflected list exactly as printed, before any relabeling.
    pub reflected: Vec<String>,
    /// 1-based new position of each old class after reordering.
    pub relabeling: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize)]
struct ScenarioJson {
    name: String,
    description: String,
    config: ConfigJson,
    #[serde(default)]
    vectors: Option<Vec<String>>,
    #[serde(default)]
    forest: Option<ForestGolden>,
    #[serde(default)]
    transform: Option<TransformGolden>,
    #[serde(default)]
    robust_certificate: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub spec: ConfigSpec,
    pub assignment: Option<Assignment>,
    pub forest: Option<ForestGolden>,
    pub transform: Option<TransformGolden>,
    pub robust_certificate: Option<Vec<Rational>>,
}

impl Scenario {
    pub fn n(&self) -> usize {
        self.spec.ambient_n
    }
}

pub fn builtin_scenario(name: &str) -> Result<Scenario, ScenarioError> {
    let text = fixture(name).ok_or_else(|| ScenarioError::Unknown(name.to_string()))?;
    let bad = |e: String| ScenarioError::Malformed(name.to_string(), e);
    let j: ScenarioJson = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let spec = ConfigSpec::from_json_value(j.config).map_err(|e| bad(e.to_string()))?;
    let assignment = match &j.vectors {
        Some(v) => {
            let refs: Vec<&str> = v.iter().map(String::as_str).collect();
            Some(Assignment::parse(&refs, spec.ambient_n).map_err(|e| bad(e.to_string()))?)
        }
        None => None,
    };
    Ok(Scenario {
        name: j.name,
        description: j.description,
        spec,
        assignment,
        forest: j.forest,
        transform: j.transform,
        robust_certificate: j.robust_certificate.map(|c| arith::rat_vec(&c)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckLine {
    pub check: String,
    pub ok: bool,
    pub detail: String,
}

fn line(check: &str, ok: bool, detail: impl Into<String>) -> CheckLine {
    CheckLine { check: check.to_string(), ok, detail: detail.into() }
}

fn parse_all(exprs: &[String], n: usize) -> Result<Vec<ClassVector>, String> {
    exprs.iter().map(|e| ClassVector::parse(e, n).map_err(|x| x.to_string())).collect()
}

/// The type both transforms are expected to land on.
pub fn target_type() -> CombinatorialType {
    let s = builtin_scenario("def110").expect("shipped fixture");
    nearness::build_combinatorial_type(s.assignment.as_ref().expect("has vectors"), s.n()).expect("valid fixture")
}

/// Runs every check the fixture carries golden data for.
pub fn check_scenario(s: &Scenario) -> Vec<CheckLine> {
    let mut out = Vec::new();
    let n = s.n();
    let Some(a) = &s.assignment else {
        out.push(line("configuration", true, format!("{} components, N = {}", s.spec.n(), n)));
        return out;
    };
    match a.check(&s.spec) {
        Ok(()) => out.push(line("assignment", true, "admissible; squares, genera and intersections match")),
        Err(e) => out.push(line("assignment", false, e.to_string())),
    }
    if let Some(g) = &s.forest {
        match nearness::build_forest(a, n) {
            Ok(f) => {
                let parents: Vec<(usize, usize)> =
                    f.nodes.iter().filter_map(|v| v.parent.map(|p| (v.index, p))).collect();
                let ok = f.roots() == g.roots && parents == g.parents;
                out.push(line("forest", ok, format!("roots {:?}, parents {:?}", f.roots(), parents)));
            }
            Err(e) => out.push(line("forest", false, e.to_string())),
        }
    }
    if let Some(t) = &s.transform {
        let [r, ss, tt] = t.gamma;
        match cremona::apply_cremona(a, &s.spec, r, ss, tt, false) {
            Ok(rep) => {
                out.push(line("case", rep.case == t.case, format!("{:?}", rep.case)));
                let ok = parse_all(&t.reflected, n).map(|w| w == rep.reflected.vectors).unwrap_or(false);
                out.push(line("reflected vectors", ok, "R(γ) applied to every component"));
                let relabel: Vec<usize> = rep.relabeling.iter().map(|i| i + 1).collect();
                out.push(line("relabeling", relabel == t.relabeling, format!("{relabel:?}")));
                out.push(line("blow-down assumptions", rep.output_blowdown.passed, "(a), (b) on the output"));
                let target = target_type();
                match nearness::types_isomorphic(&rep.output_type, &target) {
                    Ok(Some(w)) => out.push(line("type matches def110", true, format_witness(&w))),
                    Ok(None) => out.push(line("type matches def110", false, "no isomorphism")),
                    Err(e) => out.push(line("type matches def110", false, e.to_string())),
                }
            }
            Err(e) => out.push(line("transform", false, e.to_string())),
        }
    }
    if let Some(x) = &s.robust_certificate {
        match eliminate::robustness(a, n, Some(x), &DecideOptions::default()) {
            Ok(Robustness::RobustCertified { q, .. }) => {
                out.push(line("robust certificate", true, format!("q = {}", arith::format_rational(&q))))
            }
            Ok(other) => out.push(line("robust certificate", false, format!("{other:?}"))),
            Err(e) => out.push(line("robust certificate", false, e.to_string())),
        }
    }
    out
}

/// `components 1→1 2→2 ...; classes 1→2 ...`, 1-based.
pub fn format_witness(w: &TypeIsomorphism) -> String {
    let fmt = |p: &Perm| p.iter().enumerate().map(|(i, j)| format!("{}→{}", i + 1, j + 1)).collect::<Vec<_>>().join(" ");
    format!("components {}; classes {}", fmt(&w.components), fmt(&w.nodes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_loads_and_checks() {
        for name in SCENARIO_NAMES {
            let s = builtin_scenario(name).unwrap();
            assert_eq!(s.name, name);
            for l in check_scenario(&s) {
                assert!(l.ok, "{name}: {} failed: {}", l.check, l.detail);
            }
        }
    }

    #[test]
    fn printed_components() {
        let s = builtin_scenario("fano7").unwrap();
        assert_eq!(s.assignment.unwrap().vectors[0], ClassVector::parse("H-E1-E2-E3", 7).unwrap());
        let s = builtin_scenario("def110").unwrap();
        assert_eq!(s.assignment.unwrap().vectors[6], ClassVector::parse("E1-E2", 8).unwrap());
        let s = builtin_scenario("nineNeg3N12").unwrap();
        assert_eq!(s.assignment.unwrap().vectors[0], ClassVector::parse("H-E1-E4-E5-E6", 12).unwrap());
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(builtin_scenario("nope"), Err(ScenarioError::Unknown(_))));
    }

    #[test]
    fn fano_and_conic_share_a_configuration_but_not_an_orbit() {
        let f = builtin_scenario("fano7").unwrap();
        let d = builtin_scenario("d2conic7").unwrap();
        assert_eq!(f.spec, d.spec);
        let elems = crate::configspec::compute_aut(&f.spec, crate::configspec::DEFAULT_AUT_CAP).elements_or_identity();
        let cf = crate::enumerate::canonical_form(&f.assignment.unwrap(), &elems);
        let cd = crate::enumerate::canonical_form(&d.assignment.unwrap(), &elems);
        assert_ne!(cf, cd);
    }
}
