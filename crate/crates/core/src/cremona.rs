//! Quadratic Cremona transforms of assignments: reflection in
//! γ = H - E_r - E_s - E_t, with the admissibility guard, the position
//! classification of E_r, E_s, E_t in the nearness forest, and the rebuilt
//! virtual expression and combinatorial type.

use crate::arith::{self, Int};
use crate::configspec::{ConfigSpec, Perm};
use crate::enumerate::{Assignment, AssignmentError};
use crate::lattice::{self, LatticeError, TwoClass};
use crate::nearness::{
    self, build_combinatorial_type, build_forest, normalize_order, AssumptionMode, BlowdownReport, CombinatorialType,
    NearnessError, NearnessForest, Proximity,
};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CremonaError {
    #[error(transparent)]
    Index(#[from] LatticeError),
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
    #[error(transparent)]
    Nearness(#[from] NearnessError),
    #[error("reflection is not admissible for components {0:?}")]
    Inadmissible(Vec<usize>),
    #[error("E{0}, E{1}, E{2} match none of the three configurations; pass the unsafe flag to reflect anyway")]
    NotApplicable(usize, usize, usize),
    #[error("reflected component {0} has negative degree")]
    NegativeDegree(usize),
    #[error("reflected assignment no longer matches the configuration: {0}")]
    Invariance(AssignmentError),
}

/// A component that breaks the guard: a = 1 with b_r + b_s + b_t > 2, or
/// a = 0 with b_r + b_s + b_t > 0 (or a < 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityFailure {
    pub component: usize,
    #[serde(with = "arith::serde_int")]
    pub degree: Int,
    #[serde(with = "arith::serde_int")]
    pub sum: Int,
}

/// Necessary conditions for blowing down to CP²; a violation means the
/// assignment cannot arise from a successive blow-down.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum BlowdownDiagnostic {
    /// a >= 2 but b_i + b_j > a.
    PairSum {
        component: usize,
        i: usize,
        j: usize,
        #[serde(with = "arith::serde_int")]
        degree: Int,
        #[serde(with = "arith::serde_int")]
        sum: Int,
    },
    /// a >= 3 but five b's add up to more than 2a.
    FiveSum {
        component: usize,
        indices: Vec<usize>,
        #[serde(with = "arith::serde_int")]
        degree: Int,
        #[serde(with = "arith::serde_int")]
        sum: Int,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub gamma: TwoClass,
    pub failures: Vec<AdmissibilityFailure>,
    pub diagnostics: Vec<BlowdownDiagnostic>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Indices (0-based) of the `count` largest entries, largest first, ties by
/// index.
fn largest(b: &[Int], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..b.len()).collect();
    idx.sort_by(|&i, &j| b[j].cmp(&b[i]).then(i.cmp(&j)));
    idx.truncate(count);
    idx
}

pub fn blowdown_diagnostics(a: &Assignment) -> Vec<BlowdownDiagnostic> {
    let mut out = Vec::new();
    for (k, v) in a.vectors.iter().enumerate() {
        if v.a < arith::int(2) {
            continue;
        }
        let top = largest(&v.b, 5);
        if top.len() >= 2 {
            let sum = &v.b[top[0]] + &v.b[top[1]];
            if sum > v.a {
                let (i, j) = (top[0].min(top[1]) + 1, top[0].max(top[1]) + 1);
                out.push(BlowdownDiagnostic::PairSum { component: k + 1, i, j, degree: v.a.clone(), sum });
            }
        }
        if v.a >= arith::int(3) && top.len() == 5 {
            let sum: Int = top.iter().map(|&i| &v.b[i]).sum();
            if sum > arith::int(2) * &v.a {
                let mut indices: Vec<usize> = top.iter().map(|i| i + 1).collect();
                indices.sort_unstable();
                out.push(BlowdownDiagnostic::FiveSum { component: k + 1, indices, degree: v.a.clone(), sum });
            }
        }
    }
    out
}

/// Every reflected vector is admissible with a' >= 0 exactly when this
/// passes. Vectors with a >= 2 never fail.
pub fn check_reflection_admissible(
    a: &Assignment,
    n: usize,
    r: usize,
    s: usize,
    t: usize,
) -> Result<AdmissibilityReport, CremonaError> {
    let gamma = TwoClass::HEEE(r, s, t);
    gamma.validate(n)?;
    let mut failures = Vec::new();
    for (k, v) in a.vectors.iter().enumerate() {
        if v.n() != n {
            return Err(LatticeError::DimensionMismatch(v.n(), n).into());
        }
        let sum = &v.b[r - 1] + &v.b[s - 1] + &v.b[t - 1];
        let bad = if v.a.is_negative() {
            true
        } else if v.a.is_zero() {
            sum.is_positive()
        } else if v.a == arith::int(1) {
            sum > arith::int(2)
        } else {
            false
        };
        if bad {
            failures.push(AdmissibilityFailure { component: k + 1, degree: v.a.clone(), sum });
        }
    }
    Ok(AdmissibilityReport { gamma, failures, diagnostics: blowdown_diagnostics(a) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CremonaCase {
    /// E_r, E_s, E_t all minimal.
    Case1,
    /// E_r, E_s minimal and E_t infinitely near E_s of order 1.
    Case2,
    /// E_r minimal, E_s near E_r and E_t near E_s (order 1), E_t free.
    Case3,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub case: CremonaCase,
    /// Geometric hypotheses the transform relies on; never verified.
    pub assumptions: Vec<String>,
}

const HOLOMORPHIC: &str = "all components of the arrangement in CP² are J-holomorphic for one compatible almost complex structure J";

/// The order of (r, s, t) matters: it says which class lies over which.
pub fn classify_case(forest: &NearnessForest, r: usize, s: usize, t: usize) -> Classification {
    let [nr, ns, nt] = [r, s, t].map(|i| forest.node(i));
    let mut assumptions = vec![HOLOMORPHIC.to_string()];
    let case = if nr.minimal && ns.minimal && nt.minimal {
        assumptions.push(format!(
            "the points of E{r}, E{s}, E{t} in CP² do not lie on one degree-1 J-holomorphic sphere"
        ));
        CremonaCase::Case1
    } else if nr.minimal && ns.minimal && nt.parent == Some(s) {
        assumptions.push(format!(
            "the point of E{t} is not on the proper transform of the degree-1 J-holomorphic sphere through the points of E{r} and E{s}"
        ));
        CremonaCase::Case2
    } else if nr.minimal && ns.parent == Some(r) && nt.parent == Some(s) && nt.proximity != Some(Proximity::Satellite)
    {
        CremonaCase::Case3
    } else {
        assumptions.clear();
        CremonaCase::NotApplicable
    };
    Classification { case, assumptions }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformReport {
    pub input: Assignment,
    pub gamma: TwoClass,
    pub case: CremonaCase,
    pub assumptions: Vec<String>,
    pub admissibility: AdmissibilityReport,
    /// R(γ) applied to every vector, before relabeling.
    pub reflected: Assignment,
    pub output: Assignment,
    /// `relabeling[i]` is the new 0-based position of old E_{i+1}.
    pub relabeling: Perm,
    pub output_type: CombinatorialType,
    /// Assumptions (a), (b) on the output expression.
    pub output_blowdown: BlowdownReport,
    /// False when the unsafe flag forced a reflection outside the three
    /// configurations; the output is then only a lattice computation.
    pub virtual_expression: bool,
}

pub fn apply_cremona(
    a: &Assignment,
    spec: &ConfigSpec,
    r: usize,
    s: usize,
    t: usize,
    unsafe_reflect: bool,
) -> Result<TransformReport, CremonaError> {
    let n = spec.ambient_n;
    a.check(spec)?;
    let admissibility = check_reflection_admissible(a, n, r, s, t)?;
    if !admissibility.passed() {
        return Err(CremonaError::Inadmissible(admissibility.failures.iter().map(|f| f.component).collect()));
    }
    let forest = build_forest(a, n)?;
    let class = classify_case(&forest, r, s, t);
    if class.case == CremonaCase::NotApplicable && !unsafe_reflect {
        return Err(CremonaError::NotApplicable(r, s, t));
    }
    let gamma = admissibility.gamma;
    let reflected: Vec<_> = a.vectors.iter().map(|v| lattice::reflect(&gamma, v)).collect::<Result<_, _>>()?;
    if let Some(k) = reflected.iter().position(|v| v.a.is_negative()) {
        return Err(CremonaError::NegativeDegree(k + 1));
    }
    let (output, relabeling) = normalize_order(&reflected)?;
    output.check(spec).map_err(CremonaError::Invariance)?;
    let output_type = build_combinatorial_type(&output, n)?;
    let output_blowdown = nearness::check_blowdown_assumptions(&output, n, AssumptionMode::Plain)?;
    Ok(TransformReport {
        input: a.clone(),
        gamma,
        virtual_expression: class.case != CremonaCase::NotApplicable,
        case: class.case,
        assumptions: class.assumptions,
        admissibility,
        reflected: Assignment::new(reflected),
        output,
        relabeling,
        output_type,
        output_blowdown,
    })
}

/// Blows up `extra` fresh points away from every curve: new E-classes that
/// no component contains. They are minimal and maximal in the forest.
pub fn extend_ambient(a: &Assignment, spec: &ConfigSpec, extra: usize) -> (Assignment, ConfigSpec, String) {
    let n = spec.ambient_n;
    let out = Assignment::new(a.vectors.iter().map(|v| v.extended(extra)).collect());
    let note = if extra == 0 {
        String::new()
    } else {
        format!(
            "the new points E{}..E{} are chosen off every component and off every degree-1 J-holomorphic sphere through the other base points",
            n + 1,
            n + extra
        )
    };
    (out, spec.with_ambient(n + extra), note)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ClassVector;

    fn seven() -> ConfigSpec {
        ConfigSpec::disjoint(7, 7, -2, 0)
    }

    fn fano() -> Assignment {
        Assignment::parse(
            &["H-E1-E2-E3", "H-E1-E4-E5", "H-E1-E6-E7", "H-E2-E4-E6", "H-E3-E5-E6", "H-E2-E5-E7", "H-E3-E4-E7"],
            7,
        )
        .unwrap()
    }

    fn d2() -> Assignment {
        Assignment::parse(
            &["H-E1-E2-E5", "H-E1-E3-E6", "H-E1-E4-E7", "2H-E2-E3-E4-E5-E6-E7", "E2-E5", "E3-E6", "E4-E7"],
            7,
        )
        .unwrap()
    }

    fn parsed(exprs: &[&str], n: usize) -> Vec<ClassVector> {
        exprs.iter().map(|e| ClassVector::parse(e, n).unwrap()).collect()
    }

    #[test]
    fn fano_transform_matches_the_primed_list() {
        let (a, spec, note) = extend_ambient(&fano(), &seven(), 1);
        assert!(note.contains("E8"));
        let rep = apply_cremona(&a, &spec, 6, 7, 8, false).unwrap();
        assert_eq!(rep.case, CremonaCase::Case1);
        let want = parsed(
            &[
                "2H-E1-E2-E3-E6-E7-E8",
                "2H-E1-E4-E5-E6-E7-E8",
                "E8-E1",
                "H-E2-E4-E6",
                "H-E3-E5-E6",
                "H-E2-E5-E7",
                "H-E3-E4-E7",
            ],
            8,
        );
        assert_eq!(rep.reflected.vectors, want);
        assert!(rep.output.vectors.iter().all(|v| lattice::is_positive(v).unwrap()));
        assert!(rep.virtual_expression);
    }

    #[test]
    fn d2_transform_matches_the_primed_list() {
        let (a, spec, _) = extend_ambient(&d2(), &seven(), 1);
        let rep = apply_cremona(&a, &spec, 2, 3, 8, false).unwrap();
        assert_eq!(rep.case, CremonaCase::Case1);
        let want = parsed(
            &[
                "H-E1-E2-E5",
                "H-E1-E3-E6",
                "2H-E1-E2-E3-E4-E7-E8",
                "2H-E2-E3-E4-E5-E6-E7",
                "H-E3-E5-E8",
                "H-E2-E6-E8",
                "E4-E7",
            ],
            8,
        );
        assert_eq!(rep.reflected.vectors, want);
        assert_eq!(rep.relabeling, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn d2_child_pattern_is_not_applicable() {
        let (a, spec, _) = extend_ambient(&d2(), &seven(), 1);
        let f = build_forest(&a, 8).unwrap();
        assert_eq!(classify_case(&f, 2, 5, 8).case, CremonaCase::NotApplicable);
        assert_eq!(classify_case(&f, 8, 2, 5).case, CremonaCase::Case2);
        assert!(matches!(apply_cremona(&a, &spec, 2, 5, 8, false), Err(CremonaError::NotApplicable(2, 5, 8))));
    }

    #[test]
    fn chain_is_case3() {
        let a = Assignment::parse(&["E1-E2", "E2-E3", "3H-2E1-2E2-2E3"], 3).unwrap();
        let f = build_forest(&a, 3).unwrap();
        assert_eq!(classify_case(&f, 1, 2, 3).case, CremonaCase::Case3);
        let b = Assignment::parse(&["E1-E2-E3", "E2-E3"], 3).unwrap();
        let f = build_forest(&b, 3).unwrap();
        // E3 is a satellite class here.
        assert_eq!(classify_case(&f, 1, 2, 3).case, CremonaCase::NotApplicable);
    }

    #[test]
    fn zero_degree_guard() {
        let a = Assignment::parse(&["E1-E6"], 8).unwrap();
        let rep = check_reflection_admissible(&a, 8, 6, 7, 8).unwrap();
        assert!(!rep.passed());
        assert_eq!(rep.failures[0].sum, arith::int(1));
        let v = lattice::reflect(&rep.gamma, &a.vectors[0]).unwrap();
        assert!(!lattice::is_admissible(&v));
    }

    #[test]
    fn necessary_conditions_flag_known_classes() {
        let a = Assignment::parse(&["5H-3E1-3E2-E3-E4-E5-E6-E7-E8-E9-E10-E11"], 11).unwrap();
        assert!(matches!(blowdown_diagnostics(&a)[..], [BlowdownDiagnostic::PairSum { i: 1, j: 2, .. }]));
        let b = Assignment::parse(&["7H-3E1-3E2-3E3-3E4-3E5-E6-E7-E8-E9-E10-E11"], 11).unwrap();
        assert!(matches!(blowdown_diagnostics(&b)[..], [BlowdownDiagnostic::FiveSum { .. }]));
        // The second class is the reflection of the first in H - E3 - E4 - E5.
        let g = TwoClass::HEEE(3, 4, 5);
        assert_eq!(lattice::reflect(&g, &a.vectors[0]).unwrap(), b.vectors[0]);
        for v in a.vectors.iter().chain(&b.vectors) {
            assert_eq!(lattice::self_intersection(v), arith::int(-2));
            assert_eq!(lattice::virtual_genus(v), arith::int(0));
        }
    }
}
