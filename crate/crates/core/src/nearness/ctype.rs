//! Combinatorial type of the blown-down arrangement and isomorphism testing.
//!
//! Two positive-degree curves meet at the root point of a tree T with local
//! intersection number Σ_{j ∈ T} b_kj b_lj (blow-up formula), and
//! transversally elsewhere r_kl = a_k a_l - Σ_j b_kj b_lj times.

use super::{build_forest, zero_components, NearnessError, NearnessForest};
use crate::configspec::{compose, invert, Perm};
use crate::enumerate::Assignment;
use crate::lattice;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub const DEFAULT_ISO_CAP: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeComponent {
    /// 1-based index in the assignment.
    pub component: usize,
    pub degree: i64,
    pub genus: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroComponent {
    pub component: usize,
    pub leading: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinatorialType {
    pub n: usize,
    /// Positive-degree components; these survive in CP².
    pub components: Vec<TypeComponent>,
    pub zero_components: Vec<ZeroComponent>,
    pub forest: NearnessForest,
    /// b_ki, one row per entry of `components`.
    pub multiplicities: Vec<Vec<i64>>,
    /// A_k·S for positive-degree A_k (rows) and zero-degree S (columns).
    pub zero_intersections: Vec<Vec<i64>>,
    /// r_kl; the diagonal holds A_k².
    pub residuals: Vec<Vec<i64>>,
}

impl CombinatorialType {
    pub fn component_count(&self) -> usize {
        self.components.len() + self.zero_components.len()
    }

    /// Local intersection number at the point of `root` between the
    /// positive-degree components at positions `k` and `l`.
    pub fn local_multiplicity(&self, k: usize, l: usize, root: usize) -> i64 {
        self.forest
            .subtree(root)
            .iter()
            .map(|&j| self.multiplicities[k][j - 1] * self.multiplicities[l][j - 1])
            .sum()
    }

    /// (root, m_kl(root)) for every root with a non-zero local number.
    pub fn meeting_points(&self, k: usize, l: usize) -> Vec<(usize, i64)> {
        self.forest
            .roots()
            .into_iter()
            .map(|r| (r, self.local_multiplicity(k, l, r)))
            .filter(|&(_, m)| m != 0)
            .collect()
    }
}

fn small(a: &Assignment) -> Result<Vec<(i64, Vec<i64>)>, NearnessError> {
    a.vectors.iter().enumerate().map(|(k, v)| v.to_i64().ok_or(NearnessError::Overflow(k + 1))).collect()
}

pub fn build_combinatorial_type(a: &Assignment, n: usize) -> Result<CombinatorialType, NearnessError> {
    let forest = build_forest(a, n)?;
    let rows = small(a)?;
    let mut components = Vec::new();
    let mut multiplicities = Vec::new();
    for (k, (deg, b)) in rows.iter().enumerate() {
        if *deg > 0 {
            let genus = lattice::virtual_genus(&a.vectors[k]).to_i64().ok_or(NearnessError::Overflow(k + 1))?;
            components.push(TypeComponent { component: k + 1, degree: *deg, genus });
            multiplicities.push(b.clone());
        }
    }
    let zeros: Vec<ZeroComponent> = zero_components(a)
        .into_iter()
        .map(|z| ZeroComponent {
            component: z.component + 1,
            leading: z.leading + 1,
            members: z.members.iter().map(|i| i + 1).collect(),
        })
        .collect();
    let dot = |x: &[i64], y: &[i64]| -> i64 { x.iter().zip(y).map(|(p, q)| p * q).sum() };
    let zero_intersections = components
        .iter()
        .map(|c| zeros.iter().map(|z| -dot(&rows[c.component - 1].1, &rows[z.component - 1].1)).collect())
        .collect();
    let mut residuals = vec![vec![0; components.len()]; components.len()];
    for (p, c) in components.iter().enumerate() {
        for (q, d) in components.iter().enumerate() {
            residuals[p][q] = c.degree * d.degree - dot(&multiplicities[p], &multiplicities[q]);
        }
    }
    let t = CombinatorialType {
        n,
        components,
        zero_components: zeros,
        forest,
        multiplicities,
        zero_intersections,
        residuals,
    };
    let roots = t.forest.roots();
    for p in 0..t.components.len() {
        for q in p + 1..t.components.len() {
            let local: i64 = roots.iter().map(|&r| t.local_multiplicity(p, q, r)).sum();
            let r = t.residuals[p][q];
            if r < 0 || local + r != t.components[p].degree * t.components[q].degree {
                return Err(NearnessError::BezoutInconsistent(t.components[p].component, t.components[q].component));
            }
        }
    }
    Ok(t)
}

/// A matching of components and of E-classes, 0-based: `components[k]` is
/// the image of component k + 1, `nodes[i]` the image of E_{i+1}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeIsomorphism {
    pub components: Perm,
    pub nodes: Perm,
}

impl TypeIsomorphism {
    pub fn identity(t: &CombinatorialType) -> Self {
        TypeIsomorphism { components: (0..t.component_count()).collect(), nodes: (0..t.n).collect() }
    }

    pub fn inverse(&self) -> Self {
        TypeIsomorphism { components: invert(&self.components), nodes: invert(&self.nodes) }
    }

    /// `self` then `next`.
    pub fn then(&self, next: &TypeIsomorphism) -> Self {
        TypeIsomorphism {
            components: compose(&next.components, &self.components),
            nodes: compose(&next.nodes, &self.nodes),
        }
    }
}

struct Side {
    /// Position in `components` by 0-based component index.
    pos: Vec<Option<usize>>,
    zero_pos: Vec<Option<usize>>,
}

impl Side {
    fn new(t: &CombinatorialType) -> Self {
        let mut pos = vec![None; t.component_count()];
        let mut zero_pos = vec![None; t.component_count()];
        for (p, c) in t.components.iter().enumerate() {
            if let Some(slot) = pos.get_mut(c.component - 1) {
                *slot = Some(p);
            }
        }
        for (p, z) in t.zero_components.iter().enumerate() {
            if let Some(slot) = zero_pos.get_mut(z.component - 1) {
                *slot = Some(p);
            }
        }
        Side { pos, zero_pos }
    }
}

fn is_perm(p: &[usize], len: usize) -> bool {
    let mut seen = vec![false; len];
    p.len() == len && p.iter().all(|&x| x < len && !std::mem::replace(&mut seen[x], true))
}

fn same_node(t1: &CombinatorialType, t2: &CombinatorialType, w: &TypeIsomorphism, i: usize) -> bool {
    let (u, v) = (&t1.forest.nodes[i], &t2.forest.nodes[w.nodes[i]]);
    u.minimal == v.minimal
        && u.maximal == v.maximal
        && u.proximity == v.proximity
        && u.parent.map(|p| w.nodes[p - 1] + 1) == v.parent
        && u.leading_of.map(|k| w.components[k - 1] + 1) == v.leading_of
}

/// Checks every piece of data the type carries against the matching.
pub fn check_isomorphism(t1: &CombinatorialType, t2: &CombinatorialType, w: &TypeIsomorphism) -> bool {
    let m = t1.component_count();
    if t1.n != t2.n || m != t2.component_count() || !is_perm(&w.components, m) || !is_perm(&w.nodes, t1.n) {
        return false;
    }
    let s2 = Side::new(t2);
    let mut image_pos = vec![0; t1.components.len()];
    for (p, c) in t1.components.iter().enumerate() {
        let Some(q) = s2.pos[w.components[c.component - 1]] else { return false };
        let d = &t2.components[q];
        if (c.degree, c.genus) != (d.degree, d.genus) {
            return false;
        }
        if (0..t1.n).any(|i| t1.multiplicities[p][i] != t2.multiplicities[q][w.nodes[i]]) {
            return false;
        }
        image_pos[p] = q;
    }
    let mut zero_image = vec![0; t1.zero_components.len()];
    for (p, z) in t1.zero_components.iter().enumerate() {
        let Some(q) = s2.zero_pos[w.components[z.component - 1]] else { return false };
        let y = &t2.zero_components[q];
        let mut members: Vec<usize> = z.members.iter().map(|&i| w.nodes[i - 1] + 1).collect();
        members.sort_unstable();
        if w.nodes[z.leading - 1] + 1 != y.leading || members != y.members {
            return false;
        }
        zero_image[p] = q;
    }
    for p in 0..t1.components.len() {
        for q in 0..t1.components.len() {
            if t1.residuals[p][q] != t2.residuals[image_pos[p]][image_pos[q]] {
                return false;
            }
        }
        for z in 0..t1.zero_components.len() {
            if t1.zero_intersections[p][z] != t2.zero_intersections[image_pos[p]][zero_image[z]] {
                return false;
            }
        }
    }
    (0..t1.n).all(|i| same_node(t1, t2, w, i))
}

pub fn types_isomorphic(t1: &CombinatorialType, t2: &CombinatorialType) -> Result<Option<TypeIsomorphism>, NearnessError> {
    types_isomorphic_capped(t1, t2, DEFAULT_ISO_CAP)
}

/// Backtracking over positive-degree components (degree, genus and
/// residuals preserved), then over E-classes in index order; parents come
/// first, so each class is matched only to classes with the matched parent,
/// equal flags and an equal multiplicity column.
pub fn types_isomorphic_capped(
    t1: &CombinatorialType,
    t2: &CombinatorialType,
    cap: u64,
) -> Result<Option<TypeIsomorphism>, NearnessError> {
    if t1.n != t2.n
        || t1.components.len() != t2.components.len()
        || t1.zero_components.len() != t2.zero_components.len()
    {
        return Ok(None);
    }
    let mut sig1: Vec<(i64, i64)> = t1.components.iter().map(|c| (c.degree, c.genus)).collect();
    let mut sig2: Vec<(i64, i64)> = t2.components.iter().map(|c| (c.degree, c.genus)).collect();
    sig1.sort_unstable();
    sig2.sort_unstable();
    if sig1 != sig2 {
        return Ok(None);
    }
    let mut search = Search { t1, t2, cap, visited: 0, comp: Vec::new(), used: vec![false; t2.components.len()] };
    search.components()
}

struct Search<'a> {
    t1: &'a CombinatorialType,
    t2: &'a CombinatorialType,
    cap: u64,
    visited: u64,
    /// Positions: comp[p] is the image position of t1.components[p].
    comp: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<(), NearnessError> {
        self.visited += 1;
        if self.visited > self.cap {
            return Err(NearnessError::SearchCap(self.cap));
        }
        Ok(())
    }

    fn components(&mut self) -> Result<Option<TypeIsomorphism>, NearnessError> {
        let p = self.comp.len();
        if p == self.t1.components.len() {
            let mut nodes = vec![usize::MAX; self.t1.n];
            let mut used = vec![false; self.t1.n];
            return self.nodes(0, &mut nodes, &mut used);
        }
        let c = &self.t1.components[p];
        for q in 0..self.t2.components.len() {
            let d = &self.t2.components[q];
            if self.used[q] || (c.degree, c.genus) != (d.degree, d.genus) {
                continue;
            }
            let consistent = (0..=p).all(|r| {
                let qr = if r == p { q } else { self.comp[r] };
                self.t1.residuals[p][r] == self.t2.residuals[q][qr]
            });
            if !consistent {
                continue;
            }
            self.tick()?;
            self.used[q] = true;
            self.comp.push(q);
            if let Some(w) = self.components()? {
                return Ok(Some(w));
            }
            self.comp.pop();
            self.used[q] = false;
        }
        Ok(None)
    }

    fn nodes(&mut self, i: usize, map: &mut Vec<usize>, used: &mut Vec<bool>) -> Result<Option<TypeIsomorphism>, NearnessError> {
        let (t1, t2) = (self.t1, self.t2);
        if i == t1.n {
            return Ok(self.finish(map));
        }
        let u = &t1.forest.nodes[i];
        for j in 0..t2.n {
            if used[j] {
                continue;
            }
            let v = &t2.forest.nodes[j];
            let ok = u.minimal == v.minimal
                && u.maximal == v.maximal
                && u.proximity == v.proximity
                && u.leading_of.is_some() == v.leading_of.is_some()
                && u.parent.map(|p| map[p - 1] + 1) == v.parent
                && (0..t1.components.len())
                    .all(|p| t1.multiplicities[p][i] == t2.multiplicities[self.comp[p]][j]);
            if !ok {
                continue;
            }
            self.tick()?;
            used[j] = true;
            map[i] = j;
            if let Some(w) = self.nodes(i + 1, map, used)? {
                return Ok(Some(w));
            }
            used[j] = false;
        }
        Ok(None)
    }

    /// Completes the component matching (zero-degree components follow
    /// their leading classes) and checks everything.
    fn finish(&self, nodes: &[usize]) -> Option<TypeIsomorphism> {
        let (t1, t2) = (self.t1, self.t2);
        let mut components = vec![usize::MAX; t1.component_count()];
        for (p, c) in t1.components.iter().enumerate() {
            components[c.component - 1] = t2.components[self.comp[p]].component - 1;
        }
        for z in &t1.zero_components {
            let lead = nodes[z.leading - 1] + 1;
            let k = t2.forest.node(lead).leading_of?;
            components[z.component - 1] = k - 1;
        }
        let w = TypeIsomorphism { components, nodes: nodes.to_vec() };
        check_isomorphism(t1, t2, &w).then_some(w)
    }
}
