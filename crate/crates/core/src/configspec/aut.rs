//! Aut(D) ⊆ S_n by backtracking over the labeled intersection graph.
//!
//! The group is built as a stabilizer chain on base 0, 1, ..., n-1: level i
//! holds one automorphism fixing 0..i pointwise and sending i to each point
//! of its orbit. The order is the product of orbit sizes, so the full element
//! list is only materialized when it fits under the cap.

use super::ConfigSpec;
use serde::{Deserialize, Serialize};

pub const DEFAULT_AUT_CAP: u128 = 1_000_000;

/// A permutation of component indices: `p[k]` is the image of `k` (0-based).
pub type Perm = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutGroup {
    pub degree: usize,
    pub order: u128,
    pub generators: Vec<Perm>,
    /// Every element, sorted, when `order` is at most the cap.
    pub elements: Option<Vec<Perm>>,
}

/// `(p ∘ q)(x) = p(q(x))`.
pub fn compose(p: &[usize], q: &[usize]) -> Perm {
    q.iter().map(|&x| p[x]).collect()
}

pub fn invert(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

fn compatible(spec: &ConfigSpec, img: &[Option<usize>], k: usize, j: usize) -> bool {
    if spec.nu[k] != spec.nu[j] || spec.genus[k] != spec.genus[j] {
        return false;
    }
    img.iter().enumerate().all(|(l, t)| match t {
        Some(t) => spec.off_diag[k][l] == spec.off_diag[j][*t],
        None => true,
    })
}

fn extend(spec: &ConfigSpec, img: &mut Vec<Option<usize>>, used: &mut Vec<bool>, k: usize) -> bool {
    let n = spec.n();
    if k == n {
        return true;
    }
    if img[k].is_some() {
        return extend(spec, img, used, k + 1);
    }
    for j in 0..n {
        if used[j] || !compatible(spec, img, k, j) {
            continue;
        }
        img[k] = Some(j);
        used[j] = true;
        if extend(spec, img, used, k + 1) {
            return true;
        }
        img[k] = None;
        used[j] = false;
    }
    false
}

/// Some automorphism fixing 0..i pointwise and mapping i to j.
fn find_aut(spec: &ConfigSpec, i: usize, j: usize) -> Option<Perm> {
    let n = spec.n();
    let mut img: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    for k in 0..i {
        img[k] = Some(k);
        used[k] = true;
    }
    if used[j] {
        return None;
    }
    // Check the pair (i -> j) against the fixed prefix before placing it.
    if !compatible(spec, &img, i, j) {
        return None;
    }
    img[i] = Some(j);
    used[j] = true;
    if extend(spec, &mut img, &mut used, 0) {
        Some(img.into_iter().map(|x| x.expect("complete")).collect())
    } else {
        None
    }
}

pub fn compute_aut(spec: &ConfigSpec, cap: u128) -> AutGroup {
    let n = spec.n();
    let mut transversals: Vec<Vec<Perm>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut level = Vec::new();
        for j in i..n {
            if let Some(p) = find_aut(spec, i, j) {
                level.push(p);
            }
        }
        transversals.push(level);
    }
    let order = transversals
        .iter()
        .fold(1u128, |acc, t| acc.saturating_mul(t.len() as u128));
    let identity: Perm = (0..n).collect();
    let mut generators: Vec<Perm> = transversals
        .iter()
        .flatten()
        .filter(|p| **p != identity)
        .cloned()
        .collect();
    generators.sort();
    generators.dedup();
    let elements = (order <= cap).then(|| {
        let mut elems = vec![identity.clone()];
        // g = u_0 ∘ u_1 ∘ ... ∘ u_{n-1}, built from the innermost level out.
        for level in transversals.iter().rev() {
            let mut next = Vec::with_capacity(elems.len() * level.len());
            for u in level {
                for h in &elems {
                    next.push(compose(u, h));
                }
            }
            elems = next;
        }
        elems.sort();
        elems
    });
    AutGroup { degree: n, order, generators, elements }
}

impl AutGroup {
    pub fn trivial(n: usize) -> Self {
        AutGroup { degree: n, order: 1, generators: Vec::new(), elements: Some(vec![(0..n).collect()]) }
    }

    /// The element list, or just the identity when it was not materialized.
    pub fn elements_or_identity(&self) -> Vec<Perm> {
        self.elements.clone().unwrap_or_else(|| vec![(0..self.degree).collect()])
    }
}
