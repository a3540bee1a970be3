//! Search for an area vector δ inside a cone that eliminates as many
//! assignments as possible. Candidates come from four families: the cone's
//! interior witness and random perturbations of it, a random grid sample,
//! "heavy one row" vectors that scale a single entry of the witness, and
//! Farkas-guided vectors that move δ against a dual direction y with
//! yᵀ𝓘 ∈ C_λ*, which is what an infeasibility certificate looks like.

use super::{
    c_lambda_rows, decide, orbit_eliminated, permute_delta, test_delta, DecideOptions, DeltaTest, ElimError,
};
use crate::arith::{self, Rational};
use crate::configspec::{ConeSpec, Perm};
use crate::enumerate::Assignment;
use crate::polyhedra::{self, LpOutcome, Polyhedron, Sense};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchStrategy {
    pub seed: u64,
    /// Grid entries are drawn from 1..=grid_max.
    pub grid_max: i64,
    pub grid_samples: usize,
    pub perturbations: usize,
    pub heavy_weights: Vec<i64>,
    pub farkas_rounds: usize,
    /// Survivors per round that get Farkas-guided candidates.
    pub farkas_targets: usize,
    pub max_candidates: usize,
    pub decide: DecideOptions,
}

impl Default for SearchStrategy {
    fn default() -> Self {
        SearchStrategy {
            seed: 0x5eed,
            grid_max: 4,
            grid_samples: 32,
            perturbations: 16,
            heavy_weights: vec![2, 3, 5, 10, 20],
            farkas_rounds: 3,
            farkas_targets: 4,
            max_candidates: 200,
            decide: DecideOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("the cone has empty interior")]
    EmptyInterior,
    #[error(transparent)]
    Elim(#[from] ElimError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Survivor {
    /// 0-based position in the input list.
    pub index: usize,
    pub test: DeltaTest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaSearchReport {
    #[serde(with = "arith::serde_rational_vec")]
    pub delta: Vec<Rational>,
    /// Which candidate family produced `delta`.
    pub source: String,
    pub survivors: Vec<Survivor>,
    pub candidates_tried: usize,
}

fn normalize(d: &[Rational]) -> Vec<Rational> {
    arith::primitive_integer(d).into_iter().map(Rational::from_integer).collect()
}

struct Pool<'a> {
    cone: &'a ConeSpec,
    seen: BTreeSet<Vec<Rational>>,
    queue: Vec<(String, Vec<Rational>)>,
}

impl Pool<'_> {
    fn push(&mut self, label: &str, d: Vec<Rational>) {
        if !self.cone.contains_strictly(&d) {
            return;
        }
        let d = normalize(&d);
        if self.seen.insert(d.clone()) {
            self.queue.push((label.to_string(), d));
        }
    }
}

fn survivors(
    list: &[Assignment],
    n: usize,
    delta: &[Rational],
    aut: &[Perm],
    opts: &DecideOptions,
) -> Vec<usize> {
    list.par_iter()
        .enumerate()
        .filter(|(_, a)| !orbit_eliminated(a, n, delta, aut, opts))
        .map(|(i, _)| i)
        .collect()
}

pub fn search_eliminating_delta(
    list: &[Assignment],
    n: usize,
    aut: &[Perm],
    cone: &ConeSpec,
    strategy: &SearchStrategy,
) -> Result<DeltaSearchReport, SearchError> {
    let witness = cone.interior_point().ok_or(SearchError::EmptyInterior)?;
    for a in list {
        super::check_dims(a, n)?;
        if a.n() != cone.dim {
            return Err(ElimError::DeltaLength(cone.dim, a.n()).into());
        }
    }
    let dim = cone.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(strategy.seed);
    let mut pool = Pool { cone, seen: BTreeSet::new(), queue: Vec::new() };
    pool.push("interior witness", witness.clone());
    for k in 0..dim {
        for &w in &strategy.heavy_weights {
            let mut d = witness.clone();
            d[k] *= Rational::from_integer(w.into());
            pool.push("heavy row", d);
        }
    }
    let spread = 8i64;
    for _ in 0..strategy.perturbations {
        let d: Vec<Rational> = witness
            .iter()
            .map(|x| x * Rational::from_integer(spread.into()) + Rational::from_integer(rng.gen_range(-spread / 2..=spread / 2).into()))
            .collect();
        pool.push("perturbed witness", d);
    }
    for _ in 0..strategy.grid_samples {
        let d: Vec<Rational> = (0..dim).map(|_| Rational::from_integer(rng.gen_range(1..=strategy.grid_max.max(1)).into())).collect();
        pool.push("grid", d);
    }

    let mut best: Option<(String, Vec<Rational>, Vec<usize>)> = None;
    let mut tried = 0usize;
    let mut next = 0usize;
    let mut guided_from: BTreeSet<Vec<Rational>> = BTreeSet::new();
    loop {
        if next == pool.queue.len() {
            // Out of candidates: derive Farkas-guided ones from the best δ.
            let Some((_, d0, surv)) = best.clone() else { break };
            if surv.is_empty() || !guided_from.insert(d0.clone()) {
                break;
            }
            for &i in surv.iter().take(strategy.farkas_targets) {
                for d in farkas_guided(&list[i], n, &d0, aut, cone, strategy) {
                    pool.push("farkas-guided", d);
                }
            }
            if next == pool.queue.len() {
                break;
            }
        }
        if tried >= strategy.max_candidates {
            break;
        }
        let (label, d) = pool.queue[next].clone();
        next += 1;
        tried += 1;
        let s = survivors(list, n, &d, aut, &strategy.decide);
        let better = best.as_ref().is_none_or(|(_, _, b)| s.len() < b.len());
        if better {
            best = Some((label, d, s));
        }
        if best.as_ref().is_some_and(|(_, _, b)| b.is_empty()) {
            break;
        }
    }
    let (source, delta, surv) = best.unwrap_or_else(|| ("interior witness".into(), normalize(&witness), (0..list.len()).collect()));
    let survivors = surv
        .into_iter()
        .map(|index| {
            let test = test_delta(&list[index], n, &delta, aut, &strategy.decide).expect("dimensions checked");
            Survivor { index, test }
        })
        .collect();
    Ok(DeltaSearchReport { delta, source, survivors, candidates_tried: tried })
}

/// Alternates two LPs. Given δ and a relabeling τ under which `a` survives,
/// find y in [-1, 1]^n with yᵀ𝓘 a non-negative combination of C_λ rows that
/// makes y·δ_τ smallest; then move δ, within the cone and a fixed total, to
/// make y·δ_τ smallest. A negative value is exactly a Farkas certificate.
fn farkas_guided(
    a: &Assignment,
    n: usize,
    d0: &[Rational],
    aut: &[Perm],
    cone: &ConeSpec,
    strategy: &SearchStrategy,
) -> Vec<Vec<Rational>> {
    let identity: Vec<Perm> = vec![(0..a.n()).collect()];
    let aut = if aut.is_empty() { &identity[..] } else { aut };
    let k = a.n();
    let m = a.matrix_rational();
    let rows: Vec<Vec<Rational>> = c_lambda_rows(n).iter().map(|r| r.coeffs(n)).collect();
    let nz = rows.len();
    let mut out = Vec::new();
    let mut d = d0.to_vec();
    for _ in 0..strategy.farkas_rounds {
        let Some(tau) = aut
            .iter()
            .find(|t| !decide(a, n, &permute_delta(&d, t), &strategy.decide).map(|v| v.is_eliminated()).unwrap_or(true))
        else {
            break;
        };
        let dt = permute_delta(&d, tau);
        // Variables (y, z).
        let mut p = Polyhedron::new(k + nz);
        for c in 0..=n {
            let mut row = vec![Rational::zero(); k + nz];
            for j in 0..k {
                row[j] = m[j][c].clone();
            }
            for (j, r) in rows.iter().enumerate() {
                row[k + j] = -r[c].clone();
            }
            p.add_eq(row, Rational::zero());
        }
        for j in 0..nz {
            p.add_ge(super::unit(k + nz, k + j), Rational::zero());
        }
        for j in 0..k {
            p.add_ge(super::unit(k + nz, j), -Rational::one());
            p.add_le(super::unit(k + nz, j), Rational::one());
        }
        let mut obj = dt.clone();
        obj.resize(k + nz, Rational::zero());
        let y = match polyhedra::optimize_linear(&p, &obj, Sense::Minimize) {
            LpOutcome::Optimal { point, .. } => point[..k].to_vec(),
            _ => break,
        };
        if y.iter().all(|v| v.is_zero()) {
            break;
        }
        // y·δ_τ = Σ_j y_j δ[τ(j)].
        let mut c = vec![Rational::zero(); cone.dim];
        for (j, yj) in y.iter().enumerate() {
            c[tau[j]] += yj;
        }
        let mut q = Polyhedron::new(cone.dim);
        let quarter = Rational::new(1.into(), 4.into());
        for r in cone.rational_rows() {
            let floor = arith::dot(&r, &d) * &quarter;
            q.add_ge(r, floor);
        }
        let total: Rational = d.iter().sum();
        q.add_eq(vec![Rational::one(); cone.dim], total);
        match polyhedra::optimize_linear(&q, &c, Sense::Minimize) {
            LpOutcome::Optimal { point, .. } if point != d => {
                // Stop a hair short of the vertex so δ stays interior.
                let nine_tenths = Rational::new(9.into(), 10.into());
                let next: Vec<Rational> = d.iter().zip(&point).map(|(a, b)| a + (b - a) * &nine_tenths).collect();
                out.push(next.clone());
                d = next;
            }
            _ => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fano() -> Assignment {
        Assignment::parse(
            &["H-E1-E2-E3", "H-E1-E4-E5", "H-E1-E6-E7", "H-E2-E4-E6", "H-E3-E5-E6", "H-E2-E5-E7", "H-E3-E4-E7"],
            7,
        )
        .unwrap()
    }

    #[test]
    fn fano_is_eliminated_by_search() {
        let aut: Vec<Perm> = vec![(0..7).collect(), vec![1, 2, 3, 4, 5, 6, 0]];
        let r = search_eliminating_delta(&[fano()], 7, &aut, &ConeSpec::positive_orthant(7), &SearchStrategy::default())
            .unwrap();
        assert!(r.survivors.is_empty(), "{:?}", r.delta);
    }

    #[test]
    fn empty_list_stops_at_first_candidate() {
        let r = search_eliminating_delta(&[], 7, &[], &ConeSpec::positive_orthant(3), &SearchStrategy::default()).unwrap();
        assert!(r.survivors.is_empty());
        assert_eq!(r.candidates_tried, 1);
    }

    #[test]
    fn empty_interior_is_an_error() {
        let cone = ConeSpec::new(1, vec![vec![Rational::one()], vec![-Rational::one()]]);
        assert_eq!(
            search_eliminating_delta(&[], 0, &[], &cone, &SearchStrategy::default()).unwrap_err(),
            SearchError::EmptyInterior
        );
    }
}
