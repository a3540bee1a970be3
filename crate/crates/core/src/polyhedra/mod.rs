//! Exact rational polyhedra: LP with Farkas/dual certificates, null spaces
//! and vertex/ray enumeration.
//!
//! A [`Polyhedron`] is `{x : A x = b, C x >= d}` with free variables. Every
//! negative answer carries a [`LinearCertificate`]: multipliers `y` (free) on
//! the equalities and `z >= 0` on the inequalities such that
//! `(Σ y_i a_i - Σ z_j c_j)·x <= Σ y_i b_i - Σ z_j d_j` for every feasible x.
//! Infeasibility is the case where the left side vanishes and the bound is
//! negative.

mod nullspace;
mod simplex;
mod vertices;

pub use nullspace::{null_space_basis, rank, solve_affine, AffineSolution};
pub use simplex::{lp_feasible, optimize_linear};
pub use vertices::{enumerate_vertices_rays, VertexRayError, VerticesRays, DEFAULT_BASIS_CAP};

use crate::arith::{self, Rational};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub type RationalVector = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearRow {
    #[serde(with = "arith::serde_rational_vec")]
    pub coeffs: Vec<Rational>,
    #[serde(with = "arith::serde_rational")]
    pub rhs: Rational,
}

impl LinearRow {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        LinearRow { coeffs, rhs }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        arith::dot(&self.coeffs, x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polyhedron {
    pub dim: usize,
    /// Rows `a·x = b`.
    pub equalities: Vec<LinearRow>,
    /// Rows `c·x >= d`.
    pub inequalities: Vec<LinearRow>,
}

impl Polyhedron {
    pub fn new(dim: usize) -> Self {
        Polyhedron { dim, equalities: Vec::new(), inequalities: Vec::new() }
    }

    pub fn add_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        assert_eq!(coeffs.len(), self.dim, "row dimension");
        self.equalities.push(LinearRow::new(coeffs, rhs));
    }

    pub fn add_ge(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        assert_eq!(coeffs.len(), self.dim, "row dimension");
        self.inequalities.push(LinearRow::new(coeffs, rhs));
    }

    pub fn add_le(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        self.add_ge(coeffs.into_iter().map(|c| -c).collect(), -rhs);
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim
            && self.equalities.iter().all(|r| r.eval(x) == r.rhs)
            && self.inequalities.iter().all(|r| r.eval(x) >= r.rhs)
    }

    /// Membership with every inequality strict.
    pub fn contains_strictly(&self, x: &[Rational]) -> bool {
        x.len() == self.dim
            && self.equalities.iter().all(|r| r.eval(x) == r.rhs)
            && self.inequalities.iter().all(|r| r.eval(x) > r.rhs)
    }

    /// Direction of the recession cone: `A r = 0`, `C r >= 0`.
    pub fn is_recession_direction(&self, r: &[Rational]) -> bool {
        r.len() == self.dim
            && self.equalities.iter().all(|row| row.eval(r).is_zero())
            && self.inequalities.iter().all(|row| !row.eval(r).is_negative())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearCertificate {
    #[serde(with = "arith::serde_rational_vec")]
    pub eq_multipliers: Vec<Rational>,
    #[serde(with = "arith::serde_rational_vec")]
    pub ineq_multipliers: Vec<Rational>,
}

impl LinearCertificate {
    /// The implied inequality `coeff·x <= bound`, or `None` when the
    /// multipliers are malformed (wrong length or a negative `z`).
    pub fn implied(&self, p: &Polyhedron) -> Option<(Vec<Rational>, Rational)> {
        if self.eq_multipliers.len() != p.equalities.len()
            || self.ineq_multipliers.len() != p.inequalities.len()
            || self.ineq_multipliers.iter().any(|z| z.is_negative())
        {
            return None;
        }
        let mut coeff = vec![Rational::zero(); p.dim];
        let mut bound = Rational::zero();
        for (y, row) in self.eq_multipliers.iter().zip(&p.equalities) {
            if y.is_zero() {
                continue;
            }
            for (c, a) in coeff.iter_mut().zip(&row.coeffs) {
                *c += y * a;
            }
            bound += y * &row.rhs;
        }
        for (z, row) in self.ineq_multipliers.iter().zip(&p.inequalities) {
            if z.is_zero() {
                continue;
            }
            for (c, a) in coeff.iter_mut().zip(&row.coeffs) {
                *c -= z * a;
            }
            bound -= z * &row.rhs;
        }
        Some((coeff, bound))
    }

    /// Re-derives `0 <= bound < 0` from the system.
    pub fn proves_infeasible(&self, p: &Polyhedron) -> bool {
        match self.implied(p) {
            Some((coeff, bound)) => coeff.iter().all(|c| c.is_zero()) && bound.is_negative(),
            None => false,
        }
    }

    /// Re-derives `objective·x <= value` for every feasible x.
    pub fn proves_upper_bound(&self, p: &Polyhedron, objective: &[Rational], value: &Rational) -> bool {
        match self.implied(p) {
            Some((coeff, bound)) => coeff.as_slice() == objective && &bound <= value,
            None => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible {
        point: RationalVector,
    },
    Infeasible {
        certificate: LinearCertificate,
    },
    /// `certificate` proves `objective·x <= value` (maximize) or
    /// `-objective·x <= -value` (minimize).
    Optimal {
        point: RationalVector,
        value: Rational,
        certificate: LinearCertificate,
    },
    Unbounded {
        point: RationalVector,
        ray: RationalVector,
    },
}

impl LpOutcome {
    pub fn point(&self) -> Option<&RationalVector> {
        match self {
            LpOutcome::Feasible { point } | LpOutcome::Optimal { point, .. } | LpOutcome::Unbounded { point, .. } => {
                Some(point)
            }
            LpOutcome::Infeasible { .. } => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible { .. })
    }
}

/// Re-checks an optimization outcome against its system and objective.
pub fn verify_outcome(p: &Polyhedron, objective: &[Rational], sense: Sense, out: &LpOutcome) -> bool {
    let signed: Vec<Rational> = match sense {
        Sense::Maximize => objective.to_vec(),
        Sense::Minimize => objective.iter().map(|c| -c).collect(),
    };
    match out {
        LpOutcome::Feasible { point } => p.contains(point),
        LpOutcome::Infeasible { certificate } => certificate.proves_infeasible(p),
        LpOutcome::Optimal { point, value, certificate } => {
            let v = match sense {
                Sense::Maximize => value.clone(),
                Sense::Minimize => -value.clone(),
            };
            p.contains(point)
                && &arith::dot(objective, point) == value
                && certificate.proves_upper_bound(p, &signed, &v)
        }
        LpOutcome::Unbounded { point, ray } => {
            p.contains(point) && p.is_recession_direction(ray) && arith::dot(&signed, ray).is_positive()
        }
    }
}
