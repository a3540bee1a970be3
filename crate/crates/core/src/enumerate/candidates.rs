//! Per-component candidate classes as sorted b-multisets.

use crate::arith;
use crate::bounds::{self, SearchBox};
use crate::configspec::ConfigSpec;
use crate::lattice::ClassVector;
use crate::arith::Rational;
use num_traits::ToPrimitive;

/// A class up to S_N: degree `a` and the b-entries sorted non-increasing
/// (zeros included, length N).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    pub a: i64,
    pub b: Vec<i64>,
}

impl Pattern {
    /// Distinct values with multiplicities, largest value first.
    pub fn value_counts(&self) -> Vec<(i64, usize)> {
        let mut out: Vec<(i64, usize)> = Vec::new();
        for &v in &self.b {
            match out.last_mut() {
                Some((w, c)) if *w == v => *c += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }
}

pub fn component_box(spec: &ConfigSpec, k: usize, cap: &Rational) -> SearchBox {
    let c = arith::floor_rat(cap).to_i64().unwrap_or(i64::MAX);
    bounds::search_box(-spec.nu[k], spec.genus[k], c)
}

/// All admissible (a, b-multiset) with a² - Σb² = ν and -3a + Σb = 2g-2-ν
/// inside `bx`, with at most `n` non-zero entries.
pub fn candidate_patterns(nu: i64, g: i64, n: usize, bx: &SearchBox) -> Vec<Pattern> {
    let d = 2 * g - 2 - nu;
    let alpha = -nu;
    let support = bounds::min_support(alpha, g);
    let mut out = Vec::new();
    for a in bx.a_min..=bx.a_max.min(0) {
        // One entry -(|a|+1), m entries equal to 1.
        let lead = a - 1;
        let m = 2 * a + d + 1;
        if m < 0 || m as usize + 1 > n {
            continue;
        }
        if lead * lead + m != a * a - nu {
            continue;
        }
        let mut b = vec![1; m as usize];
        b.extend(std::iter::repeat_n(0, n - 1 - m as usize));
        b.push(lead);
        out.push(Pattern { a, b });
    }
    for a in 1.max(bx.a_min)..=bx.a_max {
        let sum = 3 * a + d;
        let sumsq = a * a - nu;
        if sum < 0 || sumsq < 0 {
            continue;
        }
        // (a-1)(a-2) = Σ b(b-1) + 2g bounds every entry by max(1, a-1).
        let vmax = 1.max(a - 1).min(bx.b_max_positive_branch.max(1));
        let min_nonzero = match support {
            Some(s) if a > 3 => s.max(0) as usize,
            _ => 0,
        };
        let mut cur = Vec::new();
        multisets(sum, sumsq, vmax, n, &mut cur, &mut |vals| {
            if vals.len() >= min_nonzero {
                let mut b = vals.to_vec();
                b.resize(n, 0);
                out.push(Pattern { a, b });
            }
        });
    }
    out
}

/// Non-increasing sequences of positive integers <= vmax, at most `slots`
/// long, with the given sum and sum of squares.
fn multisets(sum: i64, sumsq: i64, vmax: i64, slots: usize, cur: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
    if sum == 0 {
        if sumsq == 0 {
            f(cur);
        }
        return;
    }
    if slots == 0 || sumsq < sum || sum > vmax * slots as i64 || sumsq > vmax * sum {
        return;
    }
    for v in (1..=vmax.min(sum)).rev() {
        if v * v > sumsq {
            continue;
        }
        cur.push(v);
        multisets(sum - v, sumsq - v * v, v, slots - 1, cur, f);
        cur.pop();
    }
}

/// Every distinct arrangement of the pattern's b-entries, in lexicographic
/// order of b.
pub fn expand_pattern(p: &Pattern) -> Vec<Vec<i64>> {
    let mut b = p.b.clone();
    b.sort_unstable();
    let mut out = vec![b.clone()];
    while next_permutation(&mut b) {
        out.push(b.clone());
    }
    out
}

fn next_permutation(v: &mut [i64]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Candidate classes for component `k`, positions expanded.
pub fn candidate_vectors(k: usize, spec: &ConfigSpec, bx: &SearchBox) -> Vec<ClassVector> {
    let mut out: Vec<ClassVector> = candidate_patterns(spec.nu[k], spec.genus[k], spec.ambient_n, bx)
        .iter()
        .flat_map(|p| expand_pattern(p).into_iter().map(move |b| ClassVector::from_i64(p.a, &b)))
        .collect();
    out.sort();
    out
}
