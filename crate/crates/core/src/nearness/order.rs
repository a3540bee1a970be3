//! Reordering the E-classes so that every vector is positive.

use super::{zero_components, NearnessError};
use crate::configspec::Perm;
use crate::enumerate::Assignment;
use crate::lattice::{self, ClassVector};
use num_traits::Signed;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    New,
    Open,
    Done,
}

/// Finds a relabeling under which each zero-degree vector has its leading
/// class before all of its subordinate classes, and applies it. Classes are
/// placed in index order, each preceded by whatever must come before it, so
/// an already positive list is left alone. `perm[i]` is the new 0-based
/// position of old class i.
pub fn normalize_order(vectors: &[ClassVector]) -> Result<(Assignment, Perm), NearnessError> {
    let n = vectors.first().map_or(0, |v| v.n());
    for (k, v) in vectors.iter().enumerate() {
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
    let a = Assignment::new(vectors.to_vec());
    let mut before: Vec<Vec<usize>> = vec![Vec::new(); n];
    for z in zero_components(&a) {
        for m in z.members {
            before[m].push(z.leading);
        }
    }
    for b in &mut before {
        b.sort_unstable();
        b.dedup();
    }
    let mut mark = vec![Mark::New; n];
    let mut order = Vec::with_capacity(n);
    for i in 0..n {
        if mark[i] == Mark::New {
            place(i, &before, &mut mark, &mut order)?;
        }
    }
    let mut perm = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    Ok((a.relabeled(&perm), perm))
}

/// Iterative depth-first placement; an `Open` class met again closes a cycle.
fn place(start: usize, before: &[Vec<usize>], mark: &mut [Mark], order: &mut Vec<usize>) -> Result<(), NearnessError> {
    let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
    mark[start] = Mark::Open;
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        if let Some(&u) = before[v].get(*next) {
            *next += 1;
            match mark[u] {
                Mark::New => {
                    mark[u] = Mark::Open;
                    stack.push((u, 0));
                }
                Mark::Open => {
                    let from = stack.iter().position(|&(w, _)| w == u).expect("open classes are on the stack");
                    return Err(NearnessError::NotOrderable(stack[from..].iter().map(|&(w, _)| w + 1).collect()));
                }
                Mark::Done => {}
            }
        } else {
            mark[v] = Mark::Done;
            order.push(v);
            stack.pop();
        }
    }
    Ok(())
}
