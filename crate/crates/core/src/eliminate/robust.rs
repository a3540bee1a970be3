//! Area-robustness via the null-space criterion: a vector x with 𝓘x = 0,
//! x strictly inside C_λ and q(x) > 0 lets any δ be realized by η + Cx for a
//! particular solution η and large C (𝓘 has full row rank when Q is
//! non-singular). The criterion is only sufficient, so failure to find such x
//! never means the assignment is not robust.

use super::lorentz::{ascend, in_open_light_cone, lorentz_q};
use super::{c_lambda_rows, check_dims, unit, CLambdaRow, DecideOptions, ElimError};
use crate::arith::{self, Rational};
use crate::enumerate::Assignment;
use crate::polyhedra::{self, LpOutcome, Polyhedron, Sense};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason")]
pub enum RejectReason {
    Length { got: usize, expected: usize },
    /// 1-based component whose row of 𝓘x is non-zero.
    NotInNullSpace {
        component: usize,
        #[serde(with = "arith::serde_rational")]
        value: Rational,
    },
    RankDeficient { rank: usize, components: usize },
    /// Rows of C_λ that x meets with equality (or violates).
    NotInterior { rows: Vec<CLambdaRow> },
    QuadraticNotPositive {
        #[serde(with = "arith::serde_rational")]
        q: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result")]
pub enum Robustness {
    RobustCertified {
        #[serde(with = "arith::serde_rational_vec")]
        x: Vec<Rational>,
        #[serde(with = "arith::serde_rational")]
        q: Rational,
        /// Smallest slack over the rows of C_λ.
        #[serde(with = "arith::serde_rational")]
        margin: Rational,
    },
    CertificateRejected { reason: RejectReason },
    NoCertificateFound { reason: String },
    Undecided { notes: Vec<String> },
}

/// Check mode: validates a proposed null-space certificate.
fn check(a: &Assignment, n: usize, x: &[Rational]) -> Robustness {
    let reject = |reason| Robustness::CertificateRejected { reason };
    if x.len() != n + 1 {
        return reject(RejectReason::Length { got: x.len(), expected: n + 1 });
    }
    let m = a.matrix_rational();
    for (k, row) in m.iter().enumerate() {
        let v = arith::dot(row, x);
        if !v.is_zero() {
            return reject(RejectReason::NotInNullSpace { component: k + 1, value: v });
        }
    }
    let rank = polyhedra::rank(&m, n + 1);
    if rank < a.n() {
        return reject(RejectReason::RankDeficient { rank, components: a.n() });
    }
    let mut margin: Option<Rational> = None;
    let mut boundary = Vec::new();
    for r in c_lambda_rows(n) {
        let v = arith::dot(&r.coeffs(n), x);
        if !v.is_positive() {
            boundary.push(r);
        }
        margin = Some(match margin {
            Some(m) if m <= v => m,
            _ => v,
        });
    }
    if !boundary.is_empty() {
        return reject(RejectReason::NotInterior { rows: boundary });
    }
    let q = lorentz_q(x);
    if !q.is_positive() {
        return reject(RejectReason::QuadraticNotPositive { q });
    }
    Robustness::RobustCertified { x: x.to_vec(), q, margin: margin.expect("C_λ has sign rows") }
}

/// Check mode when `certificate` is given, search mode otherwise.
pub fn robustness(
    a: &Assignment,
    n: usize,
    certificate: Option<&[Rational]>,
    opts: &DecideOptions,
) -> Result<Robustness, ElimError> {
    check_dims(a, n)?;
    if let Some(x) = certificate {
        return Ok(check(a, n, x));
    }
    let m = a.matrix_rational();
    let rank = polyhedra::rank(&m, n + 1);
    if rank < a.n() {
        return Ok(Robustness::NoCertificateFound {
            reason: format!("associated matrix has rank {rank} < {}", a.n()),
        });
    }
    // Variables (x, t): 𝓘x = 0, x_0 = 1, every C_λ row >= t, t <= 1. Points
    // with q > 0 and x_0 = 1 have every x_i < 1, so x_i <= 1 loses nothing.
    let build = |floor: Option<&Rational>| {
        let mut p = Polyhedron::new(n + 2);
        for row in &m {
            let mut c = row.clone();
            c.push(Rational::zero());
            p.add_eq(c, Rational::zero());
        }
        p.add_eq(unit(n + 2, 0), Rational::one());
        for r in c_lambda_rows(n) {
            let mut c = r.coeffs(n);
            c.push(-Rational::one());
            p.add_ge(c, Rational::zero());
        }
        for i in 1..=n {
            p.add_le(unit(n + 2, i), Rational::one());
        }
        p.add_le(unit(n + 2, n + 1), Rational::one());
        if let Some(f) = floor {
            p.add_ge(unit(n + 2, n + 1), f.clone());
        }
        p
    };
    let (x, t) = match polyhedra::optimize_linear(&build(None), &unit(n + 2, n + 1), Sense::Maximize) {
        LpOutcome::Optimal { point, value, .. } if value.is_positive() => (point, value),
        _ => {
            return Ok(Robustness::NoCertificateFound {
                reason: "no null-space vector lies in the interior of C_λ".into(),
            })
        }
    };
    let scaled = |v: &[Rational]| -> Vec<Rational> {
        arith::primitive_integer(v).into_iter().map(Rational::from_integer).collect()
    };
    if in_open_light_cone(&x[..=n]) {
        return Ok(check(a, n, &scaled(&x[..=n])));
    }
    let floor = t / Rational::from_integer(2.into());
    let asc = ascend(&build(Some(&floor)), n + 1, x, opts.ascent_iterations);
    match asc.hit {
        Some(h) => Ok(check(a, n, &scaled(&h))),
        None => Ok(Robustness::Undecided {
            notes: vec![format!(
                "interior null-space vectors exist but ascent stopped at q = {}",
                arith::format_rational(&lorentz_q(&asc.best))
            )],
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_vec;

    fn nine() -> Assignment {
        // i, j, k, r, s, t, u, v, w, x, y, z -> 1..12
        let lines = [
            [1, 4, 5, 6],
            [1, 7, 8, 9],
            [1, 10, 11, 12],
            [2, 4, 7, 10],
            [2, 5, 8, 11],
            [2, 6, 9, 12],
            [3, 4, 8, 12],
            [3, 5, 9, 10],
            [3, 6, 7, 11],
        ];
        let exprs: Vec<String> = lines.iter().map(|l| format!("H-E{}-E{}-E{}-E{}", l[0], l[1], l[2], l[3])).collect();
        let refs: Vec<&str> = exprs.iter().map(|s| s.as_str()).collect();
        Assignment::parse(&refs, 12).unwrap()
    }

    #[test]
    fn nine_spheres_certified() {
        let mut x = vec![4];
        x.extend([1; 12]);
        match robustness(&nine(), 12, Some(&rat_vec(&x)), &DecideOptions::default()).unwrap() {
            Robustness::RobustCertified { q, margin, .. } => {
                assert_eq!(q, Rational::from_integer(4.into()));
                assert_eq!(margin, Rational::one());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nine_spheres_search_finds_a_certificate() {
        let r = robustness(&nine(), 12, None, &DecideOptions::default()).unwrap();
        assert!(matches!(r, Robustness::RobustCertified { .. }), "{r:?}");
    }

    #[test]
    fn fano_certificate_is_on_the_boundary() {
        let a = Assignment::parse(
            &["H-E1-E2-E3", "H-E1-E4-E5", "H-E1-E6-E7", "H-E2-E4-E6", "H-E3-E5-E6", "H-E2-E5-E7", "H-E3-E4-E7"],
            7,
        )
        .unwrap();
        match robustness(&a, 7, Some(&rat_vec(&[3, 1, 1, 1, 1, 1, 1, 1])), &DecideOptions::default()).unwrap() {
            Robustness::CertificateRejected { reason: RejectReason::NotInterior { rows } } => {
                assert_eq!(rows[0], CLambdaRow::Triple(1, 2, 3));
                assert_eq!(rows.len(), 35);
            }
            other => panic!("{other:?}"),
        }
        // The kernel is the line through (3,1,...,1), so search finds nothing.
        let r = robustness(&a, 7, None, &DecideOptions::default()).unwrap();
        assert!(matches!(r, Robustness::NoCertificateFound { .. }), "{r:?}");
    }

    #[test]
    fn empty_assignment_is_robust() {
        for n in [0, 2, 7, 12] {
            let r = robustness(&Assignment::new(vec![]), n, None, &DecideOptions::default()).unwrap();
            assert!(matches!(r, Robustness::RobustCertified { .. }), "N = {n}: {r:?}");
        }
    }
}
