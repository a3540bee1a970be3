//! The algebra behind the non-existence of a conic tangent to three
//! concurrent lines: if the tangency discriminant in the slope w vanishes
//! identically, the conic is a perfect square.

use crate::arith::{self, Rational};
use num_traits::Zero;
use serde::Serialize;

/// Ax² + Bxy + Cy² + Dx + Ey + F.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conic {
    #[serde(with = "arith::serde_rational_vec")]
    pub coeffs: Vec<Rational>,
}

impl Conic {
    pub fn new(c: [Rational; 6]) -> Self {
        Conic { coeffs: c.to_vec() }
    }

    fn c(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }
}

/// A = a², B = 2ac, C = c², D = 2af, E = 2cf, F = f².
pub fn conic_from_square(a: &Rational, c: &Rational, f: &Rational) -> Conic {
    let two = Rational::from_integer(2.into());
    Conic::new([a * a, &two * a * c, c * c, &two * a * f, &two * c * f, f * f])
}

/// Coefficients (in w⁰, w¹, w²) of (D + Ew)² - 4(A + Bw + Cw²)F, the
/// condition for y = wx to touch the conic doubly.
pub fn tangency_discriminant(q: &Conic) -> [Rational; 3] {
    let four = Rational::from_integer(4.into());
    let two = Rational::from_integer(2.into());
    let (a, b, c, d, e, f) = (q.c(0), q.c(1), q.c(2), q.c(3), q.c(4), q.c(5));
    [d * d - &four * a * f, &two * d * e - &four * b * f, e * e - &four * c * f]
}

/// Coefficients of (ax + cy + f)² in the order x², xy, y², x, y, 1, by
/// multiplying out term by term.
fn square_expansion(a: &Rational, c: &Rational, f: &Rational) -> Vec<Rational> {
    // Monomials x^i y^j of degree <= 2 indexed like the conic.
    let index = |i: usize, j: usize| match (i, j) {
        (2, 0) => 0,
        (1, 1) => 1,
        (0, 2) => 2,
        (1, 0) => 3,
        (0, 1) => 4,
        _ => 5,
    };
    let linear = [(a, 1, 0), (c, 0, 1), (f, 0, 0)];
    let mut out = vec![Rational::zero(); 6];
    for (p, i1, j1) in linear {
        for (q, i2, j2) in linear {
            out[index(i1 + i2, j1 + j2)] += p * q;
        }
    }
    out
}

/// Recovers (a, c, f) with the conic equal to (ax + cy + f)², when F is a
/// non-zero rational square and the discriminant vanishes.
pub fn perfect_square_root(q: &Conic) -> Option<(Rational, Rational, Rational)> {
    if tangency_discriminant(q).iter().any(|x| !x.is_zero()) || q.c(5).is_zero() {
        return None;
    }
    let f = arith::rational_sqrt(q.c(5))?;
    let two_f = &f * Rational::from_integer(2.into());
    let a = q.c(3) / &two_f;
    let c = q.c(4) / &two_f;
    (conic_from_square(&a, &c, &f) == *q).then_some((a, c, f))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConicCheck {
    pub conic: Conic,
    #[serde(with = "arith::serde_rational_vec")]
    pub relations: Vec<Rational>,
    pub expansion_matches: bool,
    /// Square root recovered from the coefficients alone (needs f ≠ 0).
    pub recovered: bool,
}

impl ConicCheck {
    pub fn holds(&self) -> bool {
        self.relations.iter().all(|r| r.is_zero()) && self.expansion_matches
    }
}

pub fn verify_degenerate_conic_identity(a: &Rational, c: &Rational, f: &Rational) -> ConicCheck {
    let conic = conic_from_square(a, c, f);
    let relations = tangency_discriminant(&conic).to_vec();
    let expansion_matches = square_expansion(a, c, f) == conic.coeffs;
    let recovered = !f.is_zero() && perfect_square_root(&conic).is_some();
    ConicCheck { conic, relations, expansion_matches, recovered }
}

/// Every sample satisfies the forward identity, and each one with f ≠ 0 is
/// recognized as a perfect square from its coefficients.
pub fn verify_degenerate_conic_samples(samples: &[(Rational, Rational, Rational)]) -> bool {
    samples.iter().all(|(a, c, f)| {
        let chk = verify_degenerate_conic_identity(a, c, f);
        chk.holds() && (f.is_zero() || chk.recovered)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_vec};

    #[test]
    fn ones() {
        let chk = verify_degenerate_conic_identity(&rat(1, 1), &rat(1, 1), &rat(1, 1));
        assert_eq!(chk.conic.coeffs, rat_vec(&[1, 2, 1, 2, 2, 1]));
        assert!(chk.holds() && chk.recovered);
    }

    #[test]
    fn degenerate_a() {
        let chk = verify_degenerate_conic_identity(&rat(0, 1), &rat(1, 1), &rat(1, 1));
        // (y + 1)²
        assert_eq!(chk.conic.coeffs, rat_vec(&[0, 0, 1, 0, 2, 1]));
        assert!(chk.holds());
    }

    #[test]
    fn mixed_signs() {
        assert!(verify_degenerate_conic_identity(&rat(2, 1), &rat(-3, 1), &rat(5, 1)).holds());
    }

    #[test]
    fn irreducible_conic_has_nonzero_discriminant() {
        // x² + y² - 1
        let q = Conic::new([rat(1, 1), rat(0, 1), rat(1, 1), rat(0, 1), rat(0, 1), rat(-1, 1)]);
        assert!(tangency_discriminant(&q).iter().any(|x| !x.is_zero()));
        assert_eq!(perfect_square_root(&q), None);
    }
}
