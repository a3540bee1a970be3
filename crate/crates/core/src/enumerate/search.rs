//! Depth-first assignment search with column symmetry breaking.
//!
//! Columns that agree on every placed row form contiguous blocks. A new row
//! distributes its b-multiset over the blocks and is non-increasing inside
//! each block, so every partial matrix is column-sorted with respect to the
//! placement order; each S_N-orbit is generated exactly once. Aut(D) is
//! handled at the leaves: a leaf is kept only when its column-sorted form is
//! already the canonical form.

use super::candidates::{candidate_patterns, component_box, expand_pattern, Pattern};
use super::canonical::{canonical_rows, column_sorted};
use super::checkpoint::{search_hash, Checkpoint};
use super::{pair_rows, Assignment, EnumError, Row, SearchSpec};
use crate::configspec::{compute_aut, ConfigSpec};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Mutex;

#[derive(Debug, Clone, Default)]
pub struct EnumOptions {
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
    pub checkpoint_path: Option<PathBuf>,
    pub resume: bool,
    pub progress: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumStats {
    pub leaves: u64,
    pub emitted: usize,
    pub duplicates: u64,
    pub work_units: usize,
    pub resumed_units: usize,
    pub placement_order: Vec<usize>,
    pub aut_order: String,
    pub row_symmetry_applied: bool,
    pub spec_hash: String,
    pub checkpoint_errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumResult {
    pub assignments: Vec<Assignment>,
    pub stats: EnumStats,
}

struct Ctx {
    n_amb: usize,
    order: Vec<usize>,
    patterns: Vec<Vec<Pattern>>,
    /// Expanded vectors `[a, b..]`, only when column symmetry breaking is off.
    expanded: Vec<Vec<Row>>,
    q: Vec<Vec<i64>>,
    column_sb: bool,
    one_neg: bool,
}

fn multinomial(counts: &[usize]) -> u128 {
    let mut total = 0usize;
    let mut r: u128 = 1;
    for &c in counts {
        for i in 1..=c {
            total += 1;
            r = r.saturating_mul(total as u128) / i as u128;
        }
    }
    r
}

/// Maximal runs of columns that agree on every row.
fn blocks_of(rows: &[Row], n_amb: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if n_amb == 0 {
        return out;
    }
    let mut start = 0;
    for i in 1..=n_amb {
        if i == n_amb || rows.iter().any(|r| r[i + 1] != r[start + 1]) {
            out.push((start, i - start));
            start = i;
        }
    }
    out
}

impl Ctx {
    fn fits(&self, depth: usize, rows: &[Row], row: &[i64]) -> bool {
        let k = self.order[depth];
        rows.iter()
            .enumerate()
            .all(|(j, r)| pair_rows(r, row) == self.q[k][self.order[j]])
    }

    /// Calls `f` with every consistent extension of `rows` to `target` rows.
    fn extend(&self, rows: &mut Vec<Row>, target: usize, neg: usize, f: &mut dyn FnMut(&[Row])) {
        let depth = rows.len();
        if depth == target {
            f(rows);
            return;
        }
        let k = self.order[depth];
        if self.column_sb {
            let blocks = blocks_of(rows, self.n_amb);
            for p in &self.patterns[k] {
                if self.one_neg && p.a < 0 && neg > 0 {
                    continue;
                }
                let mut counts = p.value_counts();
                let mut row = vec![0i64; self.n_amb + 1];
                row[0] = p.a;
                let neg2 = neg + usize::from(p.a < 0);
                self.distribute(&mut counts, &blocks, 0, &mut row, &mut |row| {
                    if self.fits(depth, rows, row) {
                        rows.push(row.to_vec());
                        self.extend(rows, target, neg2, f);
                        rows.pop();
                    }
                });
            }
        } else {
            for row in &self.expanded[k] {
                if self.one_neg && row[0] < 0 && neg > 0 {
                    continue;
                }
                if self.fits(depth, rows, row) {
                    rows.push(row.clone());
                    self.extend(rows, target, neg + usize::from(row[0] < 0), f);
                    rows.pop();
                }
            }
        }
    }

    /// Splits the remaining value counts over blocks `bi..`, each block
    /// receiving its values in non-increasing order.
    fn distribute(
        &self,
        counts: &mut Vec<(i64, usize)>,
        blocks: &[(usize, usize)],
        bi: usize,
        row: &mut Row,
        f: &mut dyn FnMut(&Row),
    ) {
        if bi == blocks.len() {
            debug_assert!(counts.iter().all(|&(_, c)| c == 0));
            f(row);
            return;
        }
        let (start, len) = blocks[bi];
        self.fill_block(counts, blocks, bi, 0, start + 1, len, row, f);
    }

    #[allow(clippy::too_many_arguments)]
    fn fill_block(
        &self,
        counts: &mut Vec<(i64, usize)>,
        blocks: &[(usize, usize)],
        bi: usize,
        vi: usize,
        pos: usize,
        left: usize,
        row: &mut Row,
        f: &mut dyn FnMut(&Row),
    ) {
        if left == 0 {
            self.distribute(counts, blocks, bi + 1, row, f);
            return;
        }
        if vi == counts.len() {
            return;
        }
        let (v, avail) = counts[vi];
        // Later values must be able to fill the rest of the block.
        let later: usize = counts[vi + 1..].iter().map(|&(_, c)| c).sum();
        let lo = left.saturating_sub(later);
        for take in (lo..=avail.min(left)).rev() {
            for x in &mut row[pos..pos + take] {
                *x = v;
            }
            counts[vi].1 -= take;
            self.fill_block(counts, blocks, bi, vi + 1, pos + take, left - take, row, f);
            counts[vi].1 += take;
        }
    }
}

pub fn enumerate_assignments(spec: &ConfigSpec, search: &SearchSpec) -> Result<EnumResult, EnumError> {
    enumerate_with(spec, search, &EnumOptions::default())
}

pub fn enumerate_with(spec: &ConfigSpec, search: &SearchSpec, opts: &EnumOptions) -> Result<EnumResult, EnumError> {
    let n = spec.n();
    if search.caps.len() != n {
        return Err(EnumError::CapsLength(search.caps.len(), n));
    }
    let n_amb = spec.ambient_n;
    let mut patterns = Vec::with_capacity(n);
    let mut sizes = Vec::with_capacity(n);
    for k in 0..n {
        let cap = &search.caps.per_component[k];
        if crate::arith::floor_rat(cap).to_i64().is_none_or(|c| c > 1 << 20) {
            return Err(EnumError::CapTooLarge(k + 1));
        }
        let bx = component_box(spec, k, cap);
        let pats = candidate_patterns(spec.nu[k], spec.genus[k], n_amb, &bx);
        let size: u128 = pats
            .iter()
            .map(|p| multinomial(&p.value_counts().iter().map(|&(_, c)| c).collect::<Vec<_>>()))
            .fold(0u128, |a, b| a.saturating_add(b));
        sizes.push(size);
        patterns.push(pats);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&k| (sizes[k], k));
    let expanded = if search.column_symmetry_breaking {
        Vec::new()
    } else {
        patterns
            .iter()
            .map(|ps| {
                ps.iter()
                    .flat_map(|p| {
                        expand_pattern(p).into_iter().map(move |b| {
                            let mut r = vec![p.a];
                            r.extend(b);
                            r
                        })
                    })
                    .collect()
            })
            .collect()
    };
    let ctx = Ctx {
        n_amb,
        order: order.clone(),
        patterns,
        expanded,
        q: (0..n).map(|k| (0..n).map(|l| spec.q_entry(k, l)).collect()).collect(),
        column_sb: search.column_symmetry_breaking,
        one_neg: search.at_most_one_negative_a,
    };

    let aut = compute_aut(spec, search.aut_cap);
    let row_sb = search.row_symmetry_breaking && aut.elements.is_some();
    let elems: Vec<Vec<usize>> = if row_sb { aut.elements.clone().expect("checked") } else { Vec::new() };

    let hash = search_hash(spec, search, &order);
    let mut stats = EnumStats {
        placement_order: order.iter().map(|k| k + 1).collect(),
        aut_order: aut.order.to_string(),
        row_symmetry_applied: row_sb,
        spec_hash: hash.clone(),
        ..Default::default()
    };

    let depth = search.frontier_depth.min(n);
    let resumed = match (&opts.checkpoint_path, opts.resume) {
        (Some(p), true) if p.exists() => {
            let cp = Checkpoint::load(p)?;
            if cp.spec_hash != hash {
                return Err(EnumError::CheckpointMismatch { expected: hash, found: cp.spec_hash });
            }
            Some(cp)
        }
        _ => None,
    };
    let mut cp = match resumed {
        Some(cp) => {
            stats.resumed_units = cp.completed.iter().filter(|c| **c).count();
            cp
        }
        None => {
            let mut frontier = Vec::new();
            ctx.extend(&mut Vec::new(), depth, 0, &mut |rows| frontier.push(rows.to_vec()));
            Checkpoint {
                spec_hash: hash.clone(),
                placement_order: order.clone(),
                completed: vec![false; frontier.len()],
                frontier,
                results: Vec::new(),
                leaves: 0,
            }
        }
    };
    stats.work_units = cp.frontier.len();

    let to_component_order = |rows: &[Row]| -> Vec<Row> {
        let mut out = vec![Vec::new(); n];
        for (d, r) in rows.iter().enumerate() {
            out[order[d]] = r.clone();
        }
        out
    };
    let explore = |prefix: &[Row]| -> (Vec<Vec<Row>>, u64) {
        let mut found = Vec::new();
        let mut leaves = 0u64;
        let mut rows = prefix.to_vec();
        let neg = rows.iter().filter(|r| r[0] < 0).count();
        ctx.extend(&mut rows, n, neg, &mut |rows| {
            leaves += 1;
            let comp = to_component_order(rows);
            let canon = canonical_rows(&comp, &elems);
            if row_sb && column_sorted(&comp) != canon {
                return;
            }
            found.push(canon);
        });
        (found, leaves)
    };

    let shared = Mutex::new((cp.clone(), 0usize, Vec::<String>::new()));
    let pending: Vec<usize> = (0..cp.frontier.len()).filter(|&i| !cp.completed[i]).collect();
    let run = || {
        pending.par_iter().for_each(|&i| {
            let (found, leaves) = explore(&cp.frontier[i]);
            let mut guard = shared.lock().expect("no poisoned lock");
            let (state, since, errors) = &mut *guard;
            state.completed[i] = true;
            state.results.extend(found);
            state.leaves += leaves;
            *since += 1;
            if let Some(path) = &opts.checkpoint_path {
                if *since >= search.checkpoint_interval.max(1) {
                    *since = 0;
                    if let Err(e) = state.save(path) {
                        errors.push(e.to_string());
                    }
                }
            }
            if opts.progress {
                let done = state.completed.iter().filter(|c| **c).count();
                eprintln!("enumerate: {done}/{} work units, {} results", state.completed.len(), state.results.len());
            }
        });
    };
    match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }
    let (state, _, errors) = shared.into_inner().expect("no poisoned lock");
    cp = state;
    if let Some(path) = &opts.checkpoint_path {
        if let Err(e) = cp.save(path) {
            stats.checkpoint_errors.push(e.to_string());
        }
    }
    stats.checkpoint_errors.extend(errors);
    stats.leaves = cp.leaves;

    let mut set: BTreeSet<Vec<Row>> = BTreeSet::new();
    for r in &cp.results {
        if !set.insert(r.clone()) {
            stats.duplicates += 1;
        }
    }
    let mut assignments = Vec::with_capacity(set.len());
    for rows in set {
        let a = Assignment::from_rows(&rows);
        assert_eq!(a.check(spec), Ok(()), "emitted assignment satisfies the defining equations");
        assignments.push(a);
    }
    stats.emitted = assignments.len();
    Ok(EnumResult { assignments, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::canonical_form;

    #[test]
    fn single_sphere_n2_one_orbit() {
        let spec = ConfigSpec::disjoint(2, 1, -2, 0);
        let r = enumerate_assignments(&spec, &SearchSpec::uniform(1, 2)).unwrap();
        assert_eq!(r.assignments.len(), 1);
        // The smallest associated-matrix row is (0, -1, 1), i.e. E2 - E1.
        assert_eq!(r.assignments[0].vectors[0], crate::lattice::ClassVector::parse("E2-E1", 2).unwrap());
    }

    #[test]
    fn empty_configuration() {
        let spec = ConfigSpec::disjoint(0, 0, -2, 0);
        let r = enumerate_assignments(&spec, &SearchSpec::uniform(0, 3)).unwrap();
        assert_eq!(r.assignments, vec![Assignment::new(Vec::new())]);
    }

    #[test]
    fn small_config_agrees_without_symmetry_breaking() {
        let spec = ConfigSpec::new(5, vec![-2, -2, -1], vec![0, 0, 0], &[(1, 3)]).unwrap();
        let mut s = SearchSpec::uniform(3, 3);
        let a = enumerate_assignments(&spec, &s).unwrap();
        assert_eq!(a.stats.duplicates, 0);
        s.column_symmetry_breaking = false;
        let b = enumerate_assignments(&spec, &s).unwrap();
        assert_eq!(a.assignments, b.assignments);
        s.row_symmetry_breaking = false;
        let c = enumerate_assignments(&spec, &s).unwrap();
        let g = compute_aut(&spec, 1000).elements.unwrap();
        let quotient: BTreeSet<Assignment> = c.assignments.iter().map(|x| canonical_form(x, &g)).collect();
        assert_eq!(quotient.into_iter().collect::<Vec<_>>(), a.assignments);
    }

    #[test]
    fn blocks_are_maximal_runs() {
        let rows = vec![vec![1, 1, 1, 0, 0], vec![1, 1, 0, 0, 0]];
        assert_eq!(blocks_of(&rows, 4), vec![(0, 1), (1, 1), (2, 2)]);
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[3, 4]), 35);
        assert_eq!(multinomial(&[1, 1, 5]), 42);
    }
}
