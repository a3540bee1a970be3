//! The infinitely-near order on the exceptional classes, the blow-down
//! assumption checkers, and the combinatorial type of the arrangement in CP².
//!
//! Only zero-degree components shape the forest. Such a component is
//! E_m - Σ E_l; E_m is its leading class and every E_l sits above E_m. A class
//! contained (as a subordinate) in no zero-degree component is a root.

mod ctype;
mod order;

pub use ctype::{
    build_combinatorial_type, check_isomorphism, types_isomorphic, types_isomorphic_capped, CombinatorialType,
    TypeComponent, TypeIsomorphism, ZeroComponent, DEFAULT_ISO_CAP,
};
pub use order::normalize_order;

use crate::arith;
use crate::enumerate::Assignment;
use crate::lattice;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NearnessError {
    #[error("vector {0} has length {1}, expected N = {2}")]
    Dimension(usize, usize, usize),
    #[error("component {0} has negative degree")]
    NegativeDegree(usize),
    #[error("vector {0} is not admissible")]
    NotAdmissible(usize),
    #[error("component {0} is not positive: its leading class comes after a subordinate class")]
    PositivityViolation(usize),
    #[error("E{class} is the leading class of components {first} and {second}")]
    DuplicateLeading { class: usize, first: usize, second: usize },
    #[error("E{class} is a subordinate class of more than two zero-degree components: {components:?}")]
    TooManyContainers { class: usize, components: Vec<usize> },
    #[error("component {component} has b_{i} < b_{j} although E{i} <= E{j}")]
    MonotonicityViolation { component: usize, i: usize, j: usize },
    #[error("components {0} and {1} meet negatively")]
    BezoutInconsistent(usize, usize),
    #[error("no order of the E-classes makes every vector positive (cycle through {0:?})")]
    NotOrderable(Vec<usize>),
    #[error("entries of component {0} do not fit in 64 bits")]
    Overflow(usize),
    #[error("isomorphism search visited more than {0} nodes")]
    SearchCap(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Proximity {
    Free,
    Satellite,
}

/// One exceptional class. All indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Node {
    pub index: usize,
    /// The class this one is infinitely near to of order 1.
    pub parent: Option<usize>,
    pub minimal: bool,
    pub maximal: bool,
    /// `None` exactly for minimal classes.
    pub proximity: Option<Proximity>,
    /// Component whose leading class this is.
    pub leading_of: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearnessForest {
    pub nodes: Vec<Node>,
}

impl NearnessForest {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    /// The node for E_i (1-based).
    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i - 1]
    }

    pub fn roots(&self) -> Vec<usize> {
        self.nodes.iter().filter(|v| v.parent.is_none()).map(|v| v.index).collect()
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        self.nodes.iter().filter(|v| v.parent == Some(i)).map(|v| v.index).collect()
    }

    /// E_i together with every class infinitely near to it.
    pub fn subtree(&self, i: usize) -> Vec<usize> {
        // Parents precede children, so one forward sweep suffices.
        let mut inside = vec![false; self.n() + 1];
        inside[i] = true;
        for v in &self.nodes[i..] {
            if let Some(p) = v.parent {
                inside[v.index] = inside[p];
            }
        }
        (1..=self.n()).filter(|&j| inside[j]).collect()
    }

    /// E_i <= E_j in the partial order.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        let mut cur = Some(j);
        while let Some(c) = cur {
            if c == i {
                return true;
            }
            cur = self.node(c).parent;
        }
        false
    }

    pub fn depth(&self, i: usize) -> usize {
        let mut d = 0;
        let mut cur = self.node(i).parent;
        while let Some(c) = cur {
            d += 1;
            cur = self.node(c).parent;
        }
        d
    }
}

/// A zero-degree component E_m - Σ E_l (indices 0-based here).
pub(crate) struct ZeroData {
    pub component: usize,
    pub leading: usize,
    pub members: Vec<usize>,
}

pub(crate) fn zero_components(a: &Assignment) -> Vec<ZeroData> {
    a.vectors
        .iter()
        .enumerate()
        .filter(|(_, v)| v.a.is_zero())
        .map(|(k, v)| ZeroData {
            component: k,
            leading: lattice::leading_index(v).expect("admissible zero-degree vector"),
            members: (0..v.n()).filter(|&i| v.b[i].is_one()).collect(),
        })
        .collect()
}

fn check_shape(a: &Assignment, n: usize) -> Result<(), NearnessError> {
    for (k, v) in a.vectors.iter().enumerate() {
        if v.n() != n {
            return Err(NearnessError::Dimension(k + 1, v.n(), n));
        }
        if v.a.is_negative() {
            return Err(NearnessError::NegativeDegree(k + 1));
        }
        if !lattice::is_admissible(v) {
            return Err(NearnessError::NotAdmissible(k + 1));
        }
    }
    Ok(())
}

pub fn build_forest(a: &Assignment, n: usize) -> Result<NearnessForest, NearnessError> {
    check_shape(a, n)?;
    for (k, v) in a.vectors.iter().enumerate() {
        if !lattice::is_positive(v).expect("admissible") {
            return Err(NearnessError::PositivityViolation(k + 1));
        }
    }
    let zeros = zero_components(a);
    let mut leading_of: Vec<Option<usize>> = vec![None; n];
    for z in &zeros {
        if let Some(first) = leading_of[z.leading] {
            return Err(NearnessError::DuplicateLeading {
                class: z.leading + 1,
                first: first + 1,
                second: z.component + 1,
            });
        }
        leading_of[z.leading] = Some(z.component);
    }
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        let containers: Vec<&ZeroData> = zeros.iter().filter(|z| z.members.contains(&i)).collect();
        if containers.len() > 2 {
            return Err(NearnessError::TooManyContainers {
                class: i + 1,
                components: containers.iter().map(|z| z.component + 1).collect(),
            });
        }
        // Of two containers, the one with the later leading class is the
        // order-1 parent; the order is consistent with the index order.
        let parent = containers.iter().map(|z| z.leading).max();
        let proximity = match containers.len() {
            0 => None,
            1 => Some(Proximity::Free),
            _ => Some(Proximity::Satellite),
        };
        let maximal = match leading_of[i] {
            None => true,
            Some(k) => zeros.iter().any(|z| z.component == k && z.members.is_empty()),
        };
        nodes.push(Node {
            index: i + 1,
            parent: parent.map(|p| p + 1),
            minimal: parent.is_none(),
            maximal,
            proximity,
            leading_of: leading_of[i].map(|k| k + 1),
        });
    }
    let forest = NearnessForest { nodes };
    // b is non-increasing up every edge, hence along the whole order.
    for (k, v) in a.vectors.iter().enumerate() {
        if !v.a.is_positive() {
            continue;
        }
        for node in &forest.nodes {
            if let Some(p) = node.parent {
                if v.b[p - 1] < v.b[node.index - 1] {
                    return Err(NearnessError::MonotonicityViolation { component: k + 1, i: p, j: node.index });
                }
            }
        }
    }
    Ok(forest)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssumptionMode {
    Plain,
    Primed,
}

/// Which assumption governs a zero-degree component S, by the number of
/// other components containing the leading class of S as a subordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssumptionCase {
    /// Two containers: every class of S outside both must be clean.
    TwoContainers,
    /// One container: at most one class of S outside it may be dirty.
    OneContainer,
    NoContainer,
    /// More than two containers; never happens when components meet
    /// non-negatively.
    Excess,
}

/// A class E_l of S that is met by several other components, or by a single
/// one with multiplicity above 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirtyClass {
    pub class: usize,
    /// (component, F_k·E_l) for every other component containing E_l.
    pub met_by: Vec<(usize, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCheck {
    pub component: usize,
    pub leading: usize,
    pub containers: Vec<usize>,
    pub case: AssumptionCase,
    pub passed: bool,
    pub dirty: Vec<DirtyClass>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowdownReport {
    pub mode: AssumptionMode,
    /// The degree-1 component through both E_1 and E_2, if unique.
    pub sigma0: Option<usize>,
    pub components: Vec<ComponentCheck>,
    pub passed: bool,
    /// E_1 and E_2 of equal area: always available by choosing areas.
    pub final_equal_areas: String,
    /// E_1 is a leading class.
    pub final_e1_leading: bool,
    /// Some positive-degree component has 2b_1 < a.
    pub final_small_b1: bool,
}

impl BlowdownReport {
    /// Whether the last blow-down (to CP²) is guaranteed without an area
    /// choice.
    pub fn reaches_cp2_combinatorially(&self) -> bool {
        self.final_e1_leading || self.final_small_b1
    }
}

pub fn check_blowdown_assumptions(
    a: &Assignment,
    n: usize,
    mode: AssumptionMode,
) -> Result<BlowdownReport, NearnessError> {
    build_forest(a, n)?;
    let b = |k: usize, i: usize| -> i64 { a.vectors[k].b[i].to_i64().unwrap_or(i64::MAX) };
    let sigma_candidates: Vec<usize> = if n >= 2 {
        (0..a.n())
            .filter(|&k| a.vectors[k].a.is_one() && b(k, 0) > 0 && b(k, 1) > 0)
            .collect()
    } else {
        Vec::new()
    };
    let sigma0 = match sigma_candidates.as_slice() {
        [k] => Some(*k),
        _ => None,
    };
    let zeros = zero_components(a);
    let mut checks = Vec::new();
    for s in &zeros {
        let m = s.leading;
        let mut containers: Vec<usize> = zeros
            .iter()
            .filter(|z| z.component != s.component && z.members.contains(&m))
            .map(|z| z.component)
            .collect();
        if mode == AssumptionMode::Primed {
            if let Some(k) = sigma0 {
                if b(k, m) > 0 {
                    containers.push(k);
                }
            }
        }
        containers.sort_unstable();
        let case = match containers.len() {
            0 => AssumptionCase::NoContainer,
            1 => AssumptionCase::OneContainer,
            2 => AssumptionCase::TwoContainers,
            _ => AssumptionCase::Excess,
        };
        let mut dirty = Vec::new();
        if matches!(case, AssumptionCase::OneContainer | AssumptionCase::TwoContainers) {
            for &l in &s.members {
                if containers.iter().any(|&c| !a.vectors[c].b[l].is_zero()) {
                    continue;
                }
                let met_by: Vec<(usize, i64)> = (0..a.n())
                    .filter(|&k| k != s.component && !a.vectors[k].b[l].is_zero())
                    .map(|k| (k + 1, b(k, l)))
                    .collect();
                let clean = met_by.len() <= 1 && met_by.iter().all(|&(_, x)| x == 1);
                if !clean {
                    dirty.push(DirtyClass { class: l + 1, met_by });
                }
            }
        }
        let passed = match case {
            AssumptionCase::NoContainer => true,
            AssumptionCase::OneContainer => dirty.len() <= 1,
            AssumptionCase::TwoContainers => dirty.is_empty(),
            AssumptionCase::Excess => false,
        };
        checks.push(ComponentCheck {
            component: s.component + 1,
            leading: m + 1,
            containers: containers.iter().map(|c| c + 1).collect(),
            case,
            passed,
            dirty,
        });
    }
    let final_e1_leading = n >= 1 && zeros.iter().any(|z| z.leading == 0);
    let final_small_b1 = n >= 1
        && a.vectors.iter().any(|v| v.a.is_positive() && arith::int(2) * &v.b[0] < v.a);
    Ok(BlowdownReport {
        mode,
        sigma0: sigma0.map(|k| k + 1),
        passed: checks.iter().all(|c| c.passed),
        components: checks,
        final_equal_areas: "area-dependent: holds after choosing equal areas for E1 and E2".into(),
        final_e1_leading,
        final_small_b1,
    })
}
