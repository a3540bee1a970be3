//! Independent oracles shared by the property suites and the acceptance run.
//! Nothing here calls into the library code it is used to check.
#![allow(dead_code)]

use num_traits::{Signed, Zero};
use rand::Rng;
use sympconfig::arith::{rat, Rational};
use sympconfig::enumerate::Assignment;
use sympconfig::lattice::ClassVector;

pub fn fano() -> Assignment {
    Assignment::parse(
        &["H-E1-E2-E3", "H-E1-E4-E5", "H-E1-E6-E7", "H-E2-E4-E6", "H-E3-E5-E6", "H-E2-E5-E7", "H-E3-E4-E7"],
        7,
    )
    .unwrap()
}

/// (a, b) as plain integers.
pub fn small(v: &ClassVector) -> (i64, Vec<i64>) {
    v.to_i64().expect("small test vectors")
}

pub fn dot(x: &(i64, Vec<i64>), y: &(i64, Vec<i64>)) -> i64 {
    x.0 * y.0 - x.1.iter().zip(&y.1).map(|(p, q)| p * q).sum::<i64>()
}

/// K·A with K = -3H + ΣE_i.
pub fn k_dot(x: &(i64, Vec<i64>)) -> i64 {
    -3 * x.0 + x.1.iter().sum::<i64>()
}

pub fn genus(x: &(i64, Vec<i64>)) -> i64 {
    (dot(x, x) + k_dot(x)) / 2 + 1
}

/// Square, genus and pairwise intersections of an assignment.
pub fn invariants(a: &Assignment) -> (Vec<i64>, Vec<i64>, Vec<Vec<i64>>) {
    let rows: Vec<_> = a.vectors.iter().map(small).collect();
    let sq = rows.iter().map(|r| dot(r, r)).collect();
    let g = rows.iter().map(genus).collect();
    let m = rows.iter().map(|x| rows.iter().map(|y| dot(x, y)).collect()).collect();
    (sq, g, m)
}

/// Reflection in H - E_r - E_s - E_t written out coordinate-wise (1-based).
pub fn reflect_heee(x: &(i64, Vec<i64>), r: usize, s: usize, t: usize) -> (i64, Vec<i64>) {
    let c = x.0 - x.1[r - 1] - x.1[s - 1] - x.1[t - 1];
    let mut b = x.1.clone();
    for i in [r, s, t] {
        b[i - 1] += c;
    }
    (x.0 + c, b)
}

/// q(λ) = λ_0² - Σλ_i².
pub fn lorentz(l: &[Rational]) -> Rational {
    l[1..].iter().fold(&l[0] * &l[0], |acc, x| acc - x * x)
}

/// λ_0 >= every triple sum, which for sorted λ is the three largest.
pub fn in_c_lambda(l: &[Rational]) -> bool {
    if l.iter().any(|x| x.is_negative()) {
        return false;
    }
    let mut rest: Vec<&Rational> = l[1..].iter().collect();
    rest.sort_by(|a, b| b.cmp(a));
    let top: Rational = rest.iter().take(3).fold(Rational::zero(), |acc, x| acc + *x);
    rest.len() < 3 || l[0] >= top
}

/// A random strictly positive λ in C_λ; one draw in eight lies on a
/// boundary row, one in sixteen is a multiple of (3, 1, ..., 1).
pub fn sample_c_lambda<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    if rng.gen_range(0..16) == 0 {
        let s = rat(rng.gen_range(1..40), rng.gen_range(1..9));
        let mut l = vec![&s * rat(3, 1)];
        l.extend(std::iter::repeat_n(s, n));
        return l;
    }
    let mut l: Vec<Rational> = vec![Rational::zero()];
    for _ in 0..n {
        l.push(rat(rng.gen_range(1..60), rng.gen_range(1..12)));
    }
    let mut sorted: Vec<Rational> = l[1..].to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    let top: Rational = sorted.iter().take(3).fold(Rational::zero(), |acc, x| acc + x);
    let slack = if rng.gen_range(0..8) == 0 { Rational::zero() } else { rat(rng.gen_range(0..30), rng.gen_range(1..7)) };
    l[0] = top + slack;
    l
}

/// λ is a positive multiple of (3, 1, ..., 1).
pub fn on_monotone_ray(l: &[Rational]) -> bool {
    let s = &l[1];
    s.is_positive() && l[1..].iter().all(|x| x == s) && l[0] == s * rat(3, 1)
}

/// Admissible positive-branch classes aH - Σb_iE_i with A² = -α and
/// genus g, for a in `degrees`, up to reordering of the b's. Plain
/// recursion over non-increasing b sequences.
pub fn classes_with(alpha: i64, g: i64, n: usize, degrees: std::ops::RangeInclusive<i64>) -> Vec<(i64, Vec<i64>)> {
    fn rec(left: usize, sq: i64, sum: i64, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if left == 0 {
            if sq == 0 && sum == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut b = cap.min(sq.max(0).isqrt());
        while b >= 0 {
            if b * b * (left as i64) < sq || b * (left as i64) < sum {
                break;
            }
            cur.push(b);
            rec(left - 1, sq - b * b, sum - b, b, cur, out);
            cur.pop();
            b -= 1;
        }
    }
    let mut found = Vec::new();
    for a in degrees {
        if a <= 0 {
            continue;
        }
        // Σb² = a² + α and Σb = 3a + α + 2g - 2.
        let sq = a * a + alpha;
        let sum = 3 * a + alpha + 2 * g - 2;
        if sq < 0 || sum < 0 {
            continue;
        }
        let mut out = Vec::new();
        rec(n, sq, sum, sq, &mut Vec::new(), &mut out);
        found.extend(out.into_iter().map(|b| (a, b)));
    }
    found
}

/// Applies `perm` (old 0-based index to new position) to a list.
pub fn permute<T: Clone>(items: &[T], perm: &[usize]) -> Vec<T> {
    let mut out = items.to_vec();
    for (i, &p) in perm.iter().enumerate() {
        out[p] = items[i].clone();
    }
    out
}
