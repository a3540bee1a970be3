//! Area-based elimination: can 𝓘λ = δ be solved with λ ∈ C_λ, λ > 0 and
//! q(λ) = λ_0² - Σλ_i² > 0?
//!
//! The three requirements are decided separately. A max-slack LP settles
//! strict positivity. For the quadratic, convexity does the rest: if `x`
//! solves the closed system with q(x) > 0 and `p` is strictly positive, the
//! points `x + ε(p - x)` are strictly positive for every ε > 0 and still have
//! q > 0 for small ε. So any closed point inside the light cone, together with
//! one strictly positive point, gives a realizing λ.

mod lorentz;
mod robust;
mod search;

pub use lorentz::{in_open_light_cone, is_dual_light_cone, lorentz_q};
pub use robust::{robustness, RejectReason, Robustness};
pub use search::{search_eliminating_delta, DeltaSearchReport, SearchError, SearchStrategy, Survivor};

use crate::arith::{self, Rational};
use crate::configspec::Perm;
use crate::enumerate::Assignment;
use crate::polyhedra::{self, LinearCertificate, LpOutcome, Polyhedron, Sense, DEFAULT_BASIS_CAP};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ElimError {
    #[error("area vector has length {0}, assignment has {1} components")]
    DeltaLength(usize, usize),
    #[error("vector {0} has length {1}, expected N = {2}")]
    Dimension(usize, usize, usize),
}

/// An inequality of C_λ, indexed as in the output (λ_0 is index 0, E-classes
/// are 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CLambdaRow {
    /// λ_i >= 0.
    Sign(usize),
    /// λ_0 - λ_i - λ_j - λ_k >= 0.
    Triple(usize, usize, usize),
}

impl CLambdaRow {
    pub fn coeffs(&self, n: usize) -> Vec<Rational> {
        let mut r = vec![Rational::zero(); n + 1];
        match *self {
            CLambdaRow::Sign(i) => r[i] = Rational::one(),
            CLambdaRow::Triple(i, j, k) => {
                r[0] = Rational::one();
                for x in [i, j, k] {
                    r[x] = -Rational::one();
                }
            }
        }
        r
    }
}

impl std::fmt::Display for CLambdaRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CLambdaRow::Sign(i) => write!(f, "λ_{i} >= 0"),
            CLambdaRow::Triple(i, j, k) => write!(f, "λ_0 - λ_{i} - λ_{j} - λ_{k} >= 0"),
        }
    }
}

/// Sign rows λ_0..λ_N, then the C(N,3) triple rows in lexicographic order.
pub fn c_lambda_rows(n: usize) -> Vec<CLambdaRow> {
    let mut rows: Vec<CLambdaRow> = (0..=n).map(CLambdaRow::Sign).collect();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                rows.push(CLambdaRow::Triple(i, j, k));
            }
        }
    }
    rows
}

/// The closed cone C_λ as a polyhedron in λ_0..λ_N. The ordering
/// constraints λ_1 >= λ_2 >= ... are left out: C_λ is symmetric in
/// λ_1..λ_N, so they only pick a representative.
pub fn c_lambda(n: usize) -> Polyhedron {
    let mut p = Polyhedron::new(n + 1);
    for r in c_lambda_rows(n) {
        p.add_ge(r.coeffs(n), Rational::zero());
    }
    p
}

fn check_dims(a: &Assignment, n: usize) -> Result<(), ElimError> {
    for (k, v) in a.vectors.iter().enumerate() {
        if v.n() != n {
            return Err(ElimError::Dimension(k + 1, v.n(), n));
        }
    }
    Ok(())
}

/// `{λ : 𝓘λ = δ, λ ∈ C_λ}` in ambient dimension `n`.
pub fn realization_system(a: &Assignment, n: usize, delta: &[Rational]) -> Result<Polyhedron, ElimError> {
    check_dims(a, n)?;
    if delta.len() != a.n() {
        return Err(ElimError::DeltaLength(delta.len(), a.n()));
    }
    let mut p = c_lambda(n);
    for (row, d) in a.matrix_rational().into_iter().zip(delta) {
        p.add_eq(row, d.clone());
    }
    Ok(p)
}

/// Adds a variable `t` with λ_i - t >= 0 for all i and t <= 1, plus
/// t >= `floor` when given. Maximizing `t` measures strict positivity.
pub(crate) fn slack_system(real: &Polyhedron, floor: Option<&Rational>) -> Polyhedron {
    let d = real.dim;
    let mut p = Polyhedron::new(d + 1);
    for r in &real.equalities {
        let mut c = r.coeffs.clone();
        c.push(Rational::zero());
        p.add_eq(c, r.rhs.clone());
    }
    for r in &real.inequalities {
        let mut c = r.coeffs.clone();
        c.push(Rational::zero());
        p.add_ge(c, r.rhs.clone());
    }
    for i in 0..d {
        let mut c = vec![Rational::zero(); d + 1];
        c[i] = Rational::one();
        c[d] = -Rational::one();
        p.add_ge(c, Rational::zero());
    }
    let t = unit(d + 1, d);
    p.add_le(t.clone(), Rational::one());
    if let Some(f) = floor {
        p.add_ge(t, f.clone());
    }
    p
}

pub(crate) fn unit(dim: usize, i: usize) -> Vec<Rational> {
    let mut e = vec![Rational::zero(); dim];
    e[i] = Rational::one();
    e
}

fn strictly_positive(x: &[Rational]) -> bool {
    x.iter().all(|v| v.is_positive())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum EliminationProof {
    /// The closed system 𝓘λ = δ, λ ∈ C_λ is infeasible.
    Farkas { certificate: LinearCertificate },
    /// The slack system proves t <= 0: every solution has a zero entry.
    NoStrictPositivity { certificate: LinearCertificate },
    /// N = 9: every strictly positive solution lies on the ray s(3,1,...,1),
    /// where q vanishes. `anchor` is a solution with min entry >= 2·t_floor;
    /// the certificates pin λ_i - λ_0/3 to zero on the slack system with
    /// t >= t_floor, from above and from below.
    MonotoneRay {
        #[serde(with = "arith::serde_rational_vec")]
        anchor: Vec<Rational>,
        #[serde(with = "arith::serde_rational")]
        t_floor: Rational,
        upper: Vec<LinearCertificate>,
        lower: Vec<LinearCertificate>,
    },
    /// `h` is in the closed dual light cone (h_0 > 0, h_0² >= Σh_i²) and the
    /// certificate proves h·λ <= 0 on the closed system. Any λ with λ_0 > 0
    /// and q(λ) > 0 has h·λ > 0, so none is feasible.
    LorentzSeparation {
        #[serde(with = "arith::serde_rational_vec")]
        h: Vec<Rational>,
        certificate: LinearCertificate,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    Eliminated { proof: EliminationProof },
    Realizable {
        #[serde(with = "arith::serde_rational_vec")]
        witness: Vec<Rational>,
        #[serde(with = "arith::serde_rational")]
        q: Rational,
    },
    LinearFeasibleQuadUndecided { notes: Vec<String> },
}

impl Verdict {
    pub fn is_eliminated(&self) -> bool {
        matches!(self, Verdict::Eliminated { .. })
    }

    pub fn is_realizable(&self) -> bool {
        matches!(self, Verdict::Realizable { .. })
    }

    /// Re-checks the verdict against its realization system. Undecided
    /// verdicts claim nothing and always pass.
    pub fn verify(&self, real: &Polyhedron) -> bool {
        let n = real.dim - 1;
        match self {
            Verdict::Realizable { witness, q } => {
                real.contains(witness) && strictly_positive(witness) && &lorentz_q(witness) == q && q.is_positive()
            }
            Verdict::LinearFeasibleQuadUndecided { .. } => true,
            Verdict::Eliminated { proof } => match proof {
                EliminationProof::Farkas { certificate } => certificate.proves_infeasible(real),
                EliminationProof::NoStrictPositivity { certificate } => {
                    let s = slack_system(real, None);
                    certificate.proves_upper_bound(&s, &unit(n + 2, n + 1), &Rational::zero())
                }
                EliminationProof::MonotoneRay { anchor, t_floor, upper, lower } => {
                    if n != 9 || !t_floor.is_positive() || upper.len() != 9 || lower.len() != 9 {
                        return false;
                    }
                    let two_floor = t_floor * Rational::from_integer(2.into());
                    if !real.contains(anchor) || anchor.iter().any(|v| v < &two_floor) {
                        return false;
                    }
                    let s = slack_system(real, Some(t_floor));
                    (1..=9).all(|i| {
                        let o = ray_offset(n + 2, i);
                        let neg: Vec<Rational> = o.iter().map(|c| -c).collect();
                        upper[i - 1].proves_upper_bound(&s, &o, &Rational::zero())
                            && lower[i - 1].proves_upper_bound(&s, &neg, &Rational::zero())
                    })
                }
                EliminationProof::LorentzSeparation { h, certificate } => {
                    let mut obj = h.clone();
                    obj.resize(real.dim, Rational::zero());
                    h.len() == real.dim
                        && is_dual_light_cone(h)
                        && certificate.proves_upper_bound(real, &obj, &Rational::zero())
                }
            },
        }
    }
}

/// λ_i - λ_0/3 as an objective over a system of dimension `dim`.
fn ray_offset(dim: usize, i: usize) -> Vec<Rational> {
    let mut o = vec![Rational::zero(); dim];
    o[0] = -Rational::new(1.into(), 3.into());
    o[i] = Rational::one();
    o
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecideOptions {
    /// Linear-oracle ascent steps per attempt on the light-cone objective.
    pub ascent_iterations: usize,
    /// Cap on candidate bases for the vertex-enumeration fallback.
    pub basis_cap: u64,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { ascent_iterations: 40, basis_cap: DEFAULT_BASIS_CAP }
    }
}

/// Decides one realization system.
pub fn decide_system(real: &Polyhedron, opts: &DecideOptions) -> Verdict {
    let n = real.dim - 1;
    let s = slack_system(real, None);
    let t_obj = unit(n + 2, n + 1);
    let (p, t_star) = match polyhedra::optimize_linear(&s, &t_obj, Sense::Maximize) {
        LpOutcome::Infeasible { .. } => {
            return match polyhedra::lp_feasible(real) {
                LpOutcome::Infeasible { certificate } => Verdict::Eliminated { proof: EliminationProof::Farkas { certificate } },
                _ => unreachable!("slack system infeasible but closed system feasible"),
            };
        }
        LpOutcome::Optimal { value, certificate, .. } if !value.is_positive() => {
            return Verdict::Eliminated { proof: EliminationProof::NoStrictPositivity { certificate } };
        }
        LpOutcome::Optimal { point, value, .. } => (point[..=n].to_vec(), value),
        other => unreachable!("t is bounded above: {other:?}"),
    };
    if in_open_light_cone(&p) {
        return realizable(p);
    }
    let floor = &t_star / Rational::from_integer(2.into());
    let mut notes = Vec::new();
    if n == 9 && on_monotone_ray(&p) {
        match monotone_ray(real, &p, &floor) {
            Ok(v) => return v,
            Err(note) => notes.push(note),
        }
    }
    match lorentz::light_cone_search(real, &p, &floor, opts) {
        Ok(v) => v,
        Err(mut more) => {
            notes.append(&mut more);
            Verdict::LinearFeasibleQuadUndecided { notes }
        }
    }
}

pub(crate) fn realizable(w: Vec<Rational>) -> Verdict {
    let q = lorentz_q(&w);
    Verdict::Realizable { witness: w, q }
}

fn on_monotone_ray(p: &[Rational]) -> bool {
    let third = &p[0] / Rational::from_integer(3.into());
    p[1..].iter().all(|v| v == &third)
}

/// N = 9 with a strictly positive point on the ray: look for a strictly
/// positive point off the ray (where q > 0 on C_λ), or prove there is none.
fn monotone_ray(real: &Polyhedron, p: &[Rational], floor: &Rational) -> Result<Verdict, String> {
    let s = slack_system(real, Some(floor));
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for i in 1..=9 {
        let o = ray_offset(11, i);
        for (sense, store) in [(Sense::Maximize, &mut upper), (Sense::Minimize, &mut lower)] {
            match polyhedra::optimize_linear(&s, &o, sense) {
                LpOutcome::Optimal { point, value, certificate } => {
                    if value.is_zero() {
                        store.push(certificate);
                        continue;
                    }
                    let x = point[..=9].to_vec();
                    if in_open_light_cone(&x) {
                        return Ok(realizable(x));
                    }
                    return Err(format!("off-ray point with q <= 0 at λ = {}", fmt_vec(&x)));
                }
                LpOutcome::Unbounded { point, ray } => {
                    let x: Vec<Rational> = point[..=9].iter().zip(&ray).map(|(a, b)| a + b).collect();
                    for cand in [point[..=9].to_vec(), x] {
                        if in_open_light_cone(&cand) {
                            return Ok(realizable(cand));
                        }
                    }
                    return Err("unbounded off-ray direction without a light-cone point".into());
                }
                LpOutcome::Infeasible { .. } | LpOutcome::Feasible { .. } => {
                    return Err("slack system with floor unexpectedly infeasible".into());
                }
            }
        }
    }
    Ok(Verdict::Eliminated {
        proof: EliminationProof::MonotoneRay { anchor: p.to_vec(), t_floor: floor.clone(), upper, lower },
    })
}

pub(crate) fn fmt_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(arith::format_rational).collect();
    format!("({})", parts.join(", "))
}

/// Decides whether `a` is realized under `delta`.
pub fn decide(a: &Assignment, n: usize, delta: &[Rational], opts: &DecideOptions) -> Result<Verdict, ElimError> {
    Ok(decide_system(&realization_system(a, n, delta)?, opts))
}

/// δ as seen through a row relabeling: component k takes the area of
/// component τ(k).
pub fn permute_delta(delta: &[Rational], tau: &[usize]) -> Vec<Rational> {
    tau.iter().map(|&t| delta[t].clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauVerdict {
    /// 1-based images.
    pub tau: Vec<usize>,
    #[serde(with = "arith::serde_rational_vec")]
    pub delta: Vec<Rational>,
    pub verdict: Verdict,
    /// The verdict re-checked against this τ's system.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaTest {
    pub per_tau: Vec<TauVerdict>,
    /// Every τ gives Eliminated.
    pub orbit_eliminated: bool,
    pub eliminated: usize,
    pub realizable: usize,
    pub undecided: usize,
    /// Distinct permuted area vectors actually solved.
    pub distinct_systems: usize,
}

/// Tests `delta` against every relabeling in `aut`. Membership in 𝓘(C_λ) is
/// already invariant under column permutations, since C_λ is symmetric in
/// λ_1..λ_N, so only the rows are permuted. Identical permuted vectors share
/// one solve, but each τ's verdict is re-verified on its own.
pub fn test_delta(
    a: &Assignment,
    n: usize,
    delta: &[Rational],
    aut: &[Perm],
    opts: &DecideOptions,
) -> Result<DeltaTest, ElimError> {
    check_dims(a, n)?;
    if delta.len() != a.n() {
        return Err(ElimError::DeltaLength(delta.len(), a.n()));
    }
    let identity: Vec<Perm> = vec![(0..a.n()).collect()];
    let aut = if aut.is_empty() { &identity[..] } else { aut };
    let mut distinct: Vec<Vec<Rational>> = aut.iter().map(|t| permute_delta(delta, t)).collect();
    distinct.sort();
    distinct.dedup();
    let solved: HashMap<Vec<Rational>, Verdict> = distinct
        .par_iter()
        .map(|d| (d.clone(), decide(a, n, d, opts).expect("dimensions checked")))
        .collect();
    let per_tau: Vec<TauVerdict> = aut
        .par_iter()
        .map(|t| {
            let d = permute_delta(delta, t);
            let verdict = solved[&d].clone();
            let real = realization_system(a, n, &d).expect("dimensions checked");
            let verified = verdict.verify(&real);
            TauVerdict { tau: t.iter().map(|x| x + 1).collect(), delta: d, verdict, verified }
        })
        .collect();
    let eliminated = per_tau.iter().filter(|v| v.verdict.is_eliminated()).count();
    let realizable = per_tau.iter().filter(|v| v.verdict.is_realizable()).count();
    Ok(DeltaTest {
        orbit_eliminated: eliminated == per_tau.len() && per_tau.iter().all(|v| v.verified),
        eliminated,
        realizable,
        undecided: per_tau.len() - eliminated - realizable,
        distinct_systems: distinct.len(),
        per_tau,
    })
}

/// Fast path for searches: true iff every τ eliminates, stopping at the
/// first survivor.
pub fn orbit_eliminated(a: &Assignment, n: usize, delta: &[Rational], aut: &[Perm], opts: &DecideOptions) -> bool {
    let identity: Vec<Perm> = vec![(0..a.n()).collect()];
    let aut = if aut.is_empty() { &identity[..] } else { aut };
    let mut distinct: Vec<Vec<Rational>> = aut.iter().map(|t| permute_delta(delta, t)).collect();
    distinct.sort();
    distinct.dedup();
    distinct.iter().all(|d| {
        let real = match realization_system(a, n, d) {
            Ok(r) => r,
            Err(_) => return false,
        };
        let v = decide_system(&real, opts);
        v.is_eliminated() && v.verify(&real)
    })
}
