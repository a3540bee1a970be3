//! Finiteness bounds: the search box for a class of given square and genus,
//! absolute degree caps, per-component caps from the area cone, the support
//! threshold for a > 3 and the normal form of low-genus classes.
//!
//! Caps stay rational until a [`SearchBox`] is built.

use crate::arith::{self, rat, Rational};
use crate::configspec::{self, ConeError, ConeVariant, ConfigSpec, StarData};
use crate::lattice::ClassVector;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBox {
    pub a_min: i64,
    pub a_max: i64,
    pub b_max_positive_branch: i64,
    pub b_min_negative_branch: i64,
}

impl SearchBox {
    pub fn is_empty(&self) -> bool {
        self.a_max < self.a_min
    }
}

/// Search box for classes with A² = -α, g(A) = g and a <= C.
pub fn search_box(alpha: i64, g: i64, cap: i64) -> SearchBox {
    debug_assert!(g >= 0);
    SearchBox {
        a_min: arith::ceil_div(1 - alpha, 2),
        a_max: cap,
        b_max_positive_branch: cap,
        b_min_negative_branch: arith::ceil_div(-(1 + alpha), 2),
    }
}

/// Absolute cap on a > 0 for A² = -α, g(A) = g in CP²#N(-CP²).
pub fn degree_cap(alpha: i64, g: i64, n: usize) -> Option<i64> {
    let x = alpha + 2 * g - 2;
    let n = n as i64;
    if x > 0 {
        (n <= 9).then_some(3)
    } else if x == 0 {
        (n <= 8).then_some(3)
    } else if x == -1 {
        match n {
            ..=7 => Some(3),
            8 => Some(7),
            _ => None,
        }
    } else {
        match n {
            8 => Some(6 * x.abs()),
            7 => Some(3 * x.abs()),
            ..=6 => Some(2 * x.abs()),
            _ => None,
        }
    }
}

/// A class with a > 3 has at least this many non-zero b_i.
pub fn min_support(alpha: i64, g: i64) -> Option<i64> {
    let x = alpha + 2 * g - 2;
    if x < -2 {
        return None;
    }
    Some(10 - 0.max(1 - x))
}

/// Normal form aH - (a-1)E_j1 - E_j2 - ... - E_j(2a+α):
/// the b-multiset is {a-1} ∪ {1 × (2a+α-1)} ∪ zeros.
pub fn is_normal_form(v: &ClassVector, alpha: i64) -> bool {
    let Some((a, b)) = v.to_i64() else {
        return false;
    };
    if a <= 0 {
        return false;
    }
    let ones_needed = 2 * a + alpha - 1;
    if ones_needed < 0 {
        return false;
    }
    let mut sorted = b.clone();
    sorted.sort_unstable_by(|x, y| y.cmp(x));
    // When a = 2 the leading entry is itself a 1; when a = 1 it is a 0 and
    // sorts after the ones.
    let mut want = vec![a - 1];
    want.extend(std::iter::repeat_n(1, ones_needed as usize));
    if want.len() > b.len() {
        return false;
    }
    want.extend(std::iter::repeat_n(0, b.len() - want.len()));
    want.sort_unstable_by(|x, y| y.cmp(x));
    want == sorted
}

/// Smallest possible degree of an admissible class of square ν.
///
/// For ν < 0 this is ⌈(1+ν)/2⌉ from 2a >= 1 + A² on the non-positive
/// branch. For ν >= 0 no non-positive class exists and a² >= ν.
pub fn degree_lower_bound(nu: i64) -> i64 {
    if nu < 0 {
        arith::ceil_div(1 + nu, 2)
    } else {
        let mut a = 1i64;
        while a * a < nu {
            a += 1;
        }
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CapProvenance {
    DegreeCap,
    ComponentI0,
    ComponentAggregate,
    UserOverride,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapVector {
    #[serde(with = "arith::serde_rational_vec")]
    pub per_component: Vec<Rational>,
    pub provenance: Vec<CapProvenance>,
}

impl CapVector {
    pub fn uniform(n: usize, cap: i64, provenance: CapProvenance) -> Self {
        CapVector { per_component: vec![rat(cap, 1); n], provenance: vec![provenance; n] }
    }

    pub fn len(&self) -> usize {
        self.per_component.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_component.is_empty()
    }

    /// Integer caps (floor), as used for search boxes.
    pub fn integer_caps(&self) -> Vec<i64> {
        self.per_component
            .iter()
            .map(|c| arith::floor_rat(c).to_i64().expect("cap fits in i64"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CapError {
    #[error("condition (*) must be asserted before per-component caps are used")]
    NotAsserted,
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("the interior of C* ∩ C_δ is empty")]
    EmptyInterior,
    #[error("component {0} has no finite cap; supply an override")]
    NoCap(usize),
    #[error("override for component {0} loosens the proven cap; pass the unsafe flag to allow it")]
    OverrideLoosens(usize),
    #[error("override has length {0}, expected {1}")]
    OverrideLength(usize, usize),
}

/// Per-component caps from the area inequality against c (condition (*)).
///
/// Inside the index set I the caps are max(3, (N+ν_k)/2) (variant I0) or 3
/// (I1 / subset). Outside I every c_k < 0 and the a-coefficient of K gives
/// `Σ_{j∉I} -c_j a_j = 3 + Σ_{j∈I} c_j a_j`; the right side is bounded using
/// the cap for c_j >= 0 and the degree lower bound for c_j < 0, and the
/// other terms on the left by their lower bounds. With
/// `at_most_one_negative_a`, only one of those other terms may use a
/// negative degree.
pub fn component_caps(
    spec: &ConfigSpec,
    star: &StarData,
    variant: &ConeVariant,
    at_most_one_negative_a: bool,
) -> Result<CapVector, CapError> {
    if !star.asserted {
        return Err(CapError::NotAsserted);
    }
    let n = spec.n();
    let big_n = spec.ambient_n as i64;
    let cones = configspec::build_cones(spec, star, variant)?;
    if cones.interior_witness.is_none() {
        return Err(CapError::EmptyInterior);
    }
    let index = configspec::variant_indices(star, variant)?;
    let inside = |k: usize| index.contains(&k);
    let inner_cap = |k: usize| -> Rational {
        match variant {
            ConeVariant::I0 => rat(3, 1).max(rat(big_n + spec.nu[k], 2)),
            _ => rat(3, 1),
        }
    };
    let mut ub_inside = rat(3, 1);
    for &j in &index {
        let c = &star.c[j];
        if c.is_negative() {
            ub_inside += c * rat(degree_lower_bound(spec.nu[j]), 1);
        } else {
            ub_inside += c * inner_cap(j);
        }
    }
    let mut caps = Vec::with_capacity(n);
    let mut prov = Vec::with_capacity(n);
    for k in 0..n {
        if inside(k) {
            caps.push(inner_cap(k));
            prov.push(CapProvenance::ComponentI0);
            continue;
        }
        let ck = &star.c[k];
        assert!(ck.is_negative(), "c_k < 0 outside the index set");
        let mut lower = Rational::zero();
        let mut worst_negative = Rational::zero();
        for j in (0..n).filter(|&j| j != k && !inside(j)) {
            let w = -&star.c[j];
            let amin = degree_lower_bound(spec.nu[j]);
            if at_most_one_negative_a {
                let nonneg = amin.max(0);
                lower += &w * rat(nonneg, 1);
                let extra = &w * rat(amin - nonneg, 1);
                if extra < worst_negative {
                    worst_negative = extra;
                }
            } else {
                lower += &w * rat(amin, 1);
            }
        }
        lower += worst_negative;
        caps.push((&ub_inside - lower) / (-ck));
        prov.push(CapProvenance::ComponentAggregate);
    }
    Ok(CapVector { per_component: caps, provenance: prov })
}

/// Componentwise minimum of the absolute degree caps and (if given) the
/// per-component caps, followed by user overrides.
pub fn dispatch_caps(
    spec: &ConfigSpec,
    component: Option<&CapVector>,
    overrides: Option<&[Rational]>,
    allow_unsafe: bool,
) -> Result<CapVector, CapError> {
    let n = spec.n();
    let mut caps: Vec<Option<Rational>> = vec![None; n];
    let mut prov = vec![CapProvenance::DegreeCap; n];
    for k in 0..n {
        if let Some(c) = degree_cap(-spec.nu[k], spec.genus[k], spec.ambient_n) {
            caps[k] = Some(rat(c, 1));
        }
        if let Some(t) = component {
            let c = &t.per_component[k];
            if caps[k].as_ref().is_none_or(|cur| c < cur) {
                caps[k] = Some(c.clone());
                prov[k] = t.provenance[k];
            }
        }
    }
    if let Some(ov) = overrides {
        if ov.len() != n {
            return Err(CapError::OverrideLength(ov.len(), n));
        }
        for k in 0..n {
            let looser = caps[k].as_ref().is_none_or(|cur| &ov[k] > cur);
            if looser && !allow_unsafe {
                return Err(CapError::OverrideLoosens(k + 1));
            }
            caps[k] = Some(ov[k].clone());
            prov[k] = CapProvenance::UserOverride;
        }
    }
    let mut out = Vec::with_capacity(n);
    for (k, c) in caps.into_iter().enumerate() {
        out.push(c.ok_or(CapError::NoCap(k + 1))?);
    }
    Ok(CapVector { per_component: out, provenance: prov })
}

/// Whether at most one component may take negative degree: the caps come
/// from the cone with condition (*) asserted and a non-empty interior.
pub fn single_negative_degree_applies(spec: &ConfigSpec, star: Option<&StarData>, variant: &ConeVariant) -> bool {
    let Some(star) = star else {
        return false;
    };
    star.asserted
        && configspec::build_cones(spec, star, variant)
            .map(|c| c.interior_witness.is_some())
            .unwrap_or(false)
}

/// `true` when a rational cap is at least one.
pub fn cap_allows_positive(c: &Rational) -> bool {
    c >= &Rational::one()
}
