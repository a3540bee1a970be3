//! Fraction-free Gauss-Jordan elimination over the integers.
//!
//! Rational input rows are cleared of denominators first; every row
//! operation is `row_i <- p*row_i - e*row_p` followed by division by the row
//! content, so entries stay integral and small.

use crate::arith::{primitive_integer, Int, Rational};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

struct Reduced {
    /// Integer rows in reduced form (one per pivot), augmented column last
    /// when present.
    rows: Vec<Vec<Int>>,
    pivots: Vec<usize>,
    inconsistent: bool,
}

fn to_integer_row(row: &[Rational]) -> Vec<Int> {
    let l = row.iter().fold(Int::one(), |acc, q| acc.lcm(q.denom()));
    row.iter().map(|q| (q * Rational::from_integer(l.clone())).to_integer()).collect()
}

fn normalize(row: &mut [Int]) {
    let g = row.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Reduces `rows` (each of length `ncols`, plus one augmented entry when
/// `augmented`).
fn reduce(rows: &[Vec<Rational>], ncols: usize, augmented: bool) -> Reduced {
    let mut m: Vec<Vec<Int>> = rows.iter().map(|r| to_integer_row(r)).collect();
    for r in &mut m {
        normalize(r);
    }
    let mut pivots = Vec::new();
    let mut top = 0;
    for c in 0..ncols {
        let Some(p) = (top..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(top, p);
        let prow = m[top].clone();
        let pv = prow[c].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == top || row[c].is_zero() {
                continue;
            }
            let e = row[c].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                *x = &*x * &pv - &e * y;
            }
            normalize(row);
        }
        pivots.push(c);
        top += 1;
        if top == m.len() {
            break;
        }
    }
    let inconsistent = augmented
        && m[top..].iter().any(|r| !r[ncols].is_zero());
    m.truncate(top);
    // Keep pivots positive for readability of downstream formulas.
    for (row, &c) in m.iter_mut().zip(&pivots) {
        if row[c].is_negative() {
            for x in row.iter_mut() {
                *x = -&*x;
            }
        }
    }
    Reduced { rows: m, pivots, inconsistent }
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    reduce(rows, ncols, false).pivots.len()
}

/// Kernel basis as primitive integer vectors (stored as rationals).
/// `ncols` is needed because `rows` may be empty.
pub fn null_space_basis(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let red = reduce(rows, ncols, false);
    kernel_from(&red, ncols)
}

fn kernel_from(red: &Reduced, ncols: usize) -> Vec<Vec<Rational>> {
    let l = red
        .rows
        .iter()
        .zip(&red.pivots)
        .fold(Int::one(), |acc, (r, &c)| acc.lcm(&r[c]));
    let mut basis = Vec::new();
    for f in (0..ncols).filter(|c| !red.pivots.contains(c)) {
        let mut x = vec![Rational::zero(); ncols];
        x[f] = Rational::from_integer(l.clone());
        for (row, &c) in red.rows.iter().zip(&red.pivots) {
            x[c] = -Rational::new(&row[f] * &l, row[c].clone());
        }
        let prim = primitive_integer(&x);
        basis.push(prim.into_iter().map(Rational::from_integer).collect());
    }
    basis
}

/// Solution set `particular + span(kernel)` of `A x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<Rational>,
    pub kernel: Vec<Vec<Rational>>,
}

/// Solves `A x = b` exactly; `None` when inconsistent.
pub fn solve_affine(a: &[Vec<Rational>], b: &[Rational], ncols: usize) -> Option<AffineSolution> {
    let aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut r = r.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let red = reduce(&aug, ncols, true);
    if red.inconsistent {
        return None;
    }
    let mut particular = vec![Rational::zero(); ncols];
    for (row, &c) in red.rows.iter().zip(&red.pivots) {
        particular[c] = Rational::new(row[ncols].clone(), row[c].clone());
    }
    let kernel = kernel_from(&red, ncols);
    Some(AffineSolution { particular, kernel })
}
