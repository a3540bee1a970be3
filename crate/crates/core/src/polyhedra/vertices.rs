//! Vertex and extreme-ray enumeration by brute-force basis enumeration.
//!
//! The equalities (plus orthogonality to the lineality space, if any) are
//! solved once to parametrize the affine hull as `x0 + K y`. In `y`
//! coordinates a vertex is the unique solution of `k` tight inequalities and
//! an extreme ray is a one-dimensional solution of `k-1` tight homogeneous
//! inequalities.

use super::nullspace::{null_space_basis, solve_affine};
use super::Polyhedron;
use crate::arith::{dot, primitive_integer, Rational};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::collections::BTreeSet;

pub const DEFAULT_BASIS_CAP: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VertexRayError {
    #[error("basis enumeration needs {needed} candidate bases, cap is {cap}")]
    CapExceeded { needed: u128, cap: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerticesRays {
    pub vertices: Vec<Vec<Rational>>,
    /// Extreme rays of the recession cone modulo the lineality space,
    /// scaled to primitive integer vectors.
    pub rays: Vec<Vec<Rational>>,
    /// Basis of the lineality space (empty for pointed polyhedra).
    pub lineality: Vec<Vec<Rational>>,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Unique solution of a square system, `None` when singular.
fn solve_square(rows: &[Vec<Rational>], rhs: &[Rational], k: usize) -> Option<Vec<Rational>> {
    let sol = solve_affine(rows, rhs, k)?;
    if sol.kernel.is_empty() {
        Some(sol.particular)
    } else {
        None
    }
}

pub fn enumerate_vertices_rays(p: &Polyhedron, basis_cap: u64) -> Result<VerticesRays, VertexRayError> {
    let d = p.dim;
    let all_rows: Vec<Vec<Rational>> = p
        .equalities
        .iter()
        .chain(&p.inequalities)
        .map(|r| r.coeffs.clone())
        .collect();
    let lineality = null_space_basis(&all_rows, d);
    let mut eq_rows: Vec<Vec<Rational>> = p.equalities.iter().map(|r| r.coeffs.clone()).collect();
    let mut eq_rhs: Vec<Rational> = p.equalities.iter().map(|r| r.rhs.clone()).collect();
    for l in &lineality {
        eq_rows.push(l.clone());
        eq_rhs.push(Rational::zero());
    }
    let mut result = VerticesRays { lineality: lineality.clone(), ..Default::default() };
    let Some(hull) = solve_affine(&eq_rows, &eq_rhs, d) else {
        return Ok(result);
    };
    let k = hull.kernel.len();
    // Inequalities in hull coordinates: (c K) y >= d - c x0.
    let red: Vec<(Vec<Rational>, Rational)> = p
        .inequalities
        .iter()
        .map(|r| {
            let coeffs: Vec<Rational> = hull.kernel.iter().map(|kv| dot(&r.coeffs, kv)).collect();
            (coeffs, &r.rhs - dot(&r.coeffs, &hull.particular))
        })
        .collect();
    let m = red.len();
    let needed = binomial(m, k) + if k > 0 { binomial(m, k - 1) } else { 0 };
    if needed > basis_cap as u128 {
        return Err(VertexRayError::CapExceeded { needed, cap: basis_cap });
    }
    let lift = |y: &[Rational]| -> Vec<Rational> {
        let mut x = hull.particular.clone();
        for (yi, kv) in y.iter().zip(&hull.kernel) {
            for (xj, kj) in x.iter_mut().zip(kv) {
                *xj += yi * kj;
            }
        }
        x
    };
    let lift_dir = |y: &[Rational]| -> Vec<Rational> {
        let mut x = vec![Rational::zero(); d];
        for (yi, kv) in y.iter().zip(&hull.kernel) {
            for (xj, kj) in x.iter_mut().zip(kv) {
                *xj += yi * kj;
            }
        }
        x
    };

    let feasible_y = |y: &[Rational]| red.iter().all(|(c, b)| &dot(c, y) >= b);
    let vertices: BTreeSet<Vec<Rational>> = if k == 0 {
        let empty: Vec<Rational> = Vec::new();
        if feasible_y(&empty) {
            std::iter::once(hull.particular.clone()).collect()
        } else {
            BTreeSet::new()
        }
    } else {
        combinations(m, k)
            .into_par_iter()
            .filter_map(|subset| {
                let rows: Vec<Vec<Rational>> = subset.iter().map(|&i| red[i].0.clone()).collect();
                let rhs: Vec<Rational> = subset.iter().map(|&i| red[i].1.clone()).collect();
                let y = solve_square(&rows, &rhs, k)?;
                feasible_y(&y).then(|| lift(&y))
            })
            .collect::<Vec<_>>()
            .into_iter()
            .collect()
    };
    if vertices.is_empty() {
        return Ok(result);
    }
    let rays: BTreeSet<Vec<Rational>> = if k == 0 {
        BTreeSet::new()
    } else {
        combinations(m, k - 1)
            .into_par_iter()
            .flat_map_iter(|subset| {
                let rows: Vec<Vec<Rational>> = subset.iter().map(|&i| red[i].0.clone()).collect();
                let ker = null_space_basis(&rows, k);
                let mut found = Vec::new();
                if ker.len() == 1 {
                    for sign in [1i64, -1] {
                        let y: Vec<Rational> = ker[0].iter().map(|v| v * Rational::from_integer(sign.into())).collect();
                        if red.iter().all(|(c, _)| !dot(c, &y).is_negative()) {
                            let x = lift_dir(&y);
                            if x.iter().any(|v| !v.is_zero()) {
                                found.push(
                                    primitive_integer(&x).into_iter().map(Rational::from_integer).collect::<Vec<_>>(),
                                );
                            }
                        }
                    }
                }
                found
            })
            .collect::<Vec<_>>()
            .into_iter()
            .collect()
    };
    result.vertices = vertices.into_iter().collect();
    result.rays = rays.into_iter().collect();
    Ok(result)
}
