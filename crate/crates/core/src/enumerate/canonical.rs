//! Canonical representatives: the lexicographically smallest associated
//! matrix (rows (a, -b) read row by row) over all column permutations and
//! the given row permutations.
//!
//! For a fixed row order the smallest matrix is obtained by sorting the
//! columns lexicographically. Its first j rows depend only on the first j
//! rows of the input, so row permutations are explored as a prefix tree over
//! the sorted element list with branch-and-bound on each prefix.

use super::{Assignment, Row};
use std::cmp::Ordering;

/// Rows `[a, b..]` with columns sorted so that the matrix rows `(a, -b)`
/// are lexicographically smallest.
pub fn column_sorted(rows: &[Row]) -> Vec<Row> {
    if rows.is_empty() {
        return Vec::new();
    }
    let n_amb = rows[0].len() - 1;
    let mut cols: Vec<usize> = (1..=n_amb).collect();
    // Ascending in -b means descending in b, comparing row by row.
    cols.sort_by(|&x, &y| {
        for r in rows {
            match r[y].cmp(&r[x]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    });
    rows.iter()
        .map(|r| std::iter::once(r[0]).chain(cols.iter().map(|&c| r[c])).collect())
        .collect()
}

struct Canon<'a> {
    rows: &'a [Row],
    elems: &'a [Vec<usize>],
    best: Vec<Option<Row>>,
}

/// Compares two rows in associated-matrix order: a first, then -b.
fn cmp_matrix_rows(x: &[i64], y: &[i64]) -> Ordering {
    x[0].cmp(&y[0]).then_with(|| {
        for (p, q) in x[1..].iter().zip(&y[1..]) {
            match q.cmp(p) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    })
}

impl Canon<'_> {
    fn rec(&mut self, lo: usize, hi: usize, depth: usize, order: &[usize], blocks: &[(usize, usize)]) {
        if depth == self.rows.len() {
            return;
        }
        let mut g = lo;
        while g < hi {
            let r = self.elems[g][depth];
            let mut e = g;
            while e < hi && self.elems[e][depth] == r {
                e += 1;
            }
            let src = &self.rows[r];
            let mut new_order = order.to_vec();
            let mut new_blocks = Vec::with_capacity(blocks.len());
            for &(s, len) in blocks {
                let slice = &mut new_order[s..s + len];
                slice.sort_by(|&x, &y| src[y].cmp(&src[x]));
                let mut start = s;
                for i in s + 1..=s + len {
                    if i == s + len || src[new_order[i]] != src[new_order[start]] {
                        new_blocks.push((start, i - start));
                        start = i;
                    }
                }
            }
            let row: Row = std::iter::once(src[0]).chain(new_order.iter().map(|&c| src[c])).collect();
            let keep = match &self.best[depth] {
                None => true,
                Some(b) => cmp_matrix_rows(&row, b) != Ordering::Greater,
            };
            if keep {
                let better = self.best[depth].as_ref().is_none_or(|b| cmp_matrix_rows(&row, b) == Ordering::Less);
                if better {
                    self.best[depth] = Some(row);
                    for x in self.best[depth + 1..].iter_mut() {
                        *x = None;
                    }
                }
                self.rec(g, e, depth + 1, &new_order, &new_blocks);
            }
            g = e;
        }
    }
}

/// Canonical rows under column sorting and the row permutations `elems`
/// (sorted lexicographically; `p[k]` is the source row placed at position
/// k). An empty list means the identity only.
pub fn canonical_rows(rows: &[Row], elems: &[Vec<usize>]) -> Vec<Row> {
    if rows.is_empty() {
        return Vec::new();
    }
    if elems.len() <= 1 {
        return column_sorted(rows);
    }
    debug_assert!(elems.windows(2).all(|w| w[0] < w[1]), "element list sorted");
    let n_amb = rows[0].len() - 1;
    let order: Vec<usize> = (1..=n_amb).collect();
    let blocks = if n_amb == 0 { Vec::new() } else { vec![(0, n_amb)] };
    let mut c = Canon { rows, elems, best: vec![None; rows.len()] };
    c.rec(0, elems.len(), 0, &order, &blocks);
    c.best.into_iter().map(|r| r.expect("complete")).collect()
}

pub fn canonical_form(a: &Assignment, elems: &[Vec<usize>]) -> Assignment {
    let rows = a.to_rows().expect("entries fit in i64");
    Assignment::from_rows(&canonical_rows(&rows, elems))
}
