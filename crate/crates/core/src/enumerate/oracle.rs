//! Brute-force reference for the enumeration: candidate lists come from a
//! plain scan of the search box, assignments from a Cartesian product
//! with pairwise filtering, and orbits from canonicalization afterwards.

use super::canonical::{canonical_rows, column_sorted};
use super::candidates::component_box;
use super::{pair_rows, Assignment, EnumError, Row, SearchSpec};
use crate::configspec::{compute_aut, ConfigSpec};
use crate::lattice::{self, ClassVector};
use std::collections::{BTreeSet, HashSet};

pub const DEFAULT_ORACLE_CAP: u64 = 2_000_000_000;

fn box_candidates(spec: &ConfigSpec, k: usize, search: &SearchSpec, budget: &mut u64) -> Result<Vec<Row>, EnumError> {
    let n = spec.ambient_n;
    let bx = component_box(spec, k, &search.caps.per_component[k]);
    let mut out = Vec::new();
    for a in bx.a_min..=bx.a_max {
        // Positive degree: 0 <= b_i <= C. Otherwise one entry -(|a|+1) and
        // the rest in {0, 1}.
        let values: Vec<i64> = if a > 0 { (0..=bx.b_max_positive_branch).collect() } else { vec![a - 1, 0, 1] };
        let width = values.len() as u64;
        let count = (0..n).try_fold(1u64, |acc, _| acc.checked_mul(width)).ok_or(EnumError::CapExceeded { cap: *budget })?;
        if count > *budget {
            return Err(EnumError::CapExceeded { cap: *budget });
        }
        *budget -= count;
        let mut digits = vec![0usize; n];
        loop {
            let b: Vec<i64> = digits.iter().map(|&d| values[d]).collect();
            let v = ClassVector::from_i64(a, &b);
            if lattice::is_admissible(&v)
                && lattice::self_intersection(&v) == spec.nu[k].into()
                && lattice::virtual_genus(&v) == spec.genus[k].into()
            {
                let mut r = vec![a];
                r.extend(b);
                out.push(r);
            }
            let mut i = 0;
            while i < n {
                digits[i] += 1;
                if digits[i] < values.len() {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    Ok(out)
}

/// Orbit set of Ω(D, C̲) by exhaustive product search; `cap` bounds the
/// number of box points and search nodes visited.
pub fn brute_force_oracle(spec: &ConfigSpec, search: &SearchSpec, cap: u64) -> Result<Vec<Assignment>, EnumError> {
    let n = spec.n();
    if search.caps.len() != n {
        return Err(EnumError::CapsLength(search.caps.len(), n));
    }
    let mut budget = cap;
    let lists: Vec<Vec<Row>> = (0..n)
        .map(|k| box_candidates(spec, k, search, &mut budget))
        .collect::<Result<_, _>>()?;
    let mut sorted: HashSet<Vec<Row>> = HashSet::new();
    let mut rows: Vec<Row> = Vec::with_capacity(n);
    let mut stack: Vec<usize> = vec![0];
    // Iterative product over lists[0] x lists[1] x ... with pairwise checks.
    while let Some(&idx) = stack.last() {
        let depth = stack.len() - 1;
        if depth == n {
            let neg = rows.iter().filter(|r| r[0] < 0).count();
            if !(search.at_most_one_negative_a && neg > 1) {
                sorted.insert(column_sorted(&rows));
            }
            stack.pop();
            rows.pop();
            if let Some(t) = stack.last_mut() {
                *t += 1;
            }
            continue;
        }
        if idx >= lists[depth].len() {
            stack.pop();
            if !stack.is_empty() {
                rows.pop();
                *stack.last_mut().expect("non-empty") += 1;
            }
            continue;
        }
        if budget == 0 {
            return Err(EnumError::CapExceeded { cap });
        }
        budget -= 1;
        let cand = &lists[depth][idx];
        let ok = rows
            .iter()
            .enumerate()
            .all(|(j, r)| pair_rows(r, cand) == spec.off_diag[j][depth]);
        if ok {
            rows.push(cand.clone());
            stack.push(0);
        } else {
            *stack.last_mut().expect("non-empty") += 1;
        }
    }
    let elems: Vec<Vec<usize>> = if search.row_symmetry_breaking {
        compute_aut(spec, search.aut_cap).elements.unwrap_or_default()
    } else {
        Vec::new()
    };
    let orbits: BTreeSet<Vec<Row>> = sorted.iter().map(|m| canonical_rows(m, &elems)).collect();
    Ok(orbits.iter().map(|r| Assignment::from_rows(r)).collect())
}
