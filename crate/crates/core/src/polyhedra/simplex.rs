//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Standard form columns: `x+` (dim), `x-` (dim), one surplus per
//! inequality, one artificial per row. Artificial columns never enter the
//! basis; they are kept because the initial basis is the identity, so their
//! tableau columns always hold B⁻¹, from which the dual multipliers are read.

use super::{LinearCertificate, LpOutcome, Polyhedron, Sense};
use crate::arith::Rational;
use num_traits::{One, Signed, Zero};

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Row sign applied so that the right-hand side is non-negative.
    sigma: Vec<bool>,
    n: usize,
    n_eq: usize,
    n_ineq: usize,
    art_start: usize,
    ncols: usize,
}

impl Tableau {
    fn build(p: &Polyhedron) -> Tableau {
        let n = p.dim;
        let n_eq = p.equalities.len();
        let n_ineq = p.inequalities.len();
        let m = n_eq + n_ineq;
        let art_start = 2 * n + n_ineq;
        let ncols = art_start + m;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut sigma = Vec::with_capacity(m);
        for r in 0..m {
            let (row, b, surplus) = if r < n_eq {
                (&p.equalities[r], &p.equalities[r].rhs, None)
            } else {
                let j = r - n_eq;
                (&p.inequalities[j], &p.inequalities[j].rhs, Some(2 * n + j))
            };
            // Flip inequality rows with rhs <= 0 so the surplus column becomes
            // +1 and can start in the basis.
            let flip = match surplus {
                Some(_) => !b.is_positive(),
                None => b.is_negative(),
            };
            let s = if flip { -Rational::one() } else { Rational::one() };
            let mut t = vec![Rational::zero(); ncols];
            for (c, a) in row.coeffs.iter().enumerate() {
                if !a.is_zero() {
                    t[c] = &s * a;
                    t[n + c] = -(&s * a);
                }
            }
            if let Some(col) = surplus {
                t[col] = -s.clone();
            }
            t[art_start + r] = Rational::one();
            rhs.push(&s * b);
            basis.push(match surplus {
                Some(col) if flip => col,
                _ => art_start + r,
            });
            sigma.push(flip);
            rows.push(t);
        }
        Tableau { rows, rhs, basis, sigma, n, n_eq, n_ineq, art_start, ncols }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let piv = self.rows[r][q].clone();
        let nz: Vec<usize> = (0..self.ncols).filter(|&j| !self.rows[r][j].is_zero()).collect();
        if !piv.is_one() {
            for &j in &nz {
                self.rows[r][j] = &self.rows[r][j] / &piv;
            }
            self.rhs[r] = &self.rhs[r] / &piv;
        }
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][q].is_zero() {
                continue;
            }
            let f = self.rows[i][q].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.rows[i][j] -= d;
            }
            let d = &f * &prhs;
            self.rhs[i] -= d;
        }
        self.basis[r] = q;
    }

    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut d = cost.to_vec();
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = &cost[bv];
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.ncols {
                if !self.rows[i][j].is_zero() {
                    d[j] -= cb * &self.rows[i][j];
                }
            }
        }
        d
    }

    /// Runs Bland's rule minimizing `cost`. Returns `Err(q)` when column `q`
    /// is an unbounded improving direction.
    fn optimize(&mut self, cost: &[Rational]) -> Result<(), usize> {
        let mut d = self.reduced_costs(cost);
        loop {
            let q = match (0..self.art_start).find(|&j| d[j].is_negative()) {
                Some(q) => q,
                None => return Ok(()),
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let r = match best {
                Some((r, _)) => r,
                None => return Err(q),
            };
            self.pivot(r, q);
            // Update reduced costs with the normalized pivot row.
            let f = d[q].clone();
            for j in 0..self.ncols {
                if !self.rows[r][j].is_zero() {
                    d[j] -= &f * &self.rows[r][j];
                }
            }
        }
    }

    fn objective_value(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .fold(Rational::zero(), |acc, (&b, v)| acc + &cost[b] * v)
    }

    fn primal(&self) -> Vec<Rational> {
        let mut std = vec![Rational::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            std[b] = self.rhs[i].clone();
        }
        (0..self.n).map(|c| &std[c] - &std[self.n + c]).collect()
    }

    /// Maps y = c_Bᵀ B⁻¹ to the certificate convention of the module.
    fn certificate(&self, cost: &[Rational]) -> LinearCertificate {
        let m = self.rows.len();
        let mut u = vec![Rational::zero(); m];
        for (r, ur) in u.iter_mut().enumerate() {
            let mut y = Rational::zero();
            for (i, &b) in self.basis.iter().enumerate() {
                let c = &cost[b];
                if !c.is_zero() {
                    y += c * &self.rows[i][self.art_start + r];
                }
            }
            *ur = if self.sigma[r] { -y } else { y };
        }
        LinearCertificate {
            eq_multipliers: u[..self.n_eq].iter().map(|x| -x).collect(),
            ineq_multipliers: u[self.n_eq..self.n_eq + self.n_ineq].to_vec(),
        }
    }

    /// Pivots artificial variables out of the basis where possible.
    fn expel_artificials(&mut self) {
        for r in 0..self.rows.len() {
            if self.basis[r] < self.art_start {
                continue;
            }
            if let Some(j) = (0..self.art_start).find(|&j| !self.rows[r][j].is_zero()) {
                self.pivot(r, j);
            }
        }
    }
}

fn phase_one(p: &Polyhedron) -> Result<Tableau, LinearCertificate> {
    let mut t = Tableau::build(p);
    let mut cost = vec![Rational::zero(); t.ncols];
    for c in cost.iter_mut().skip(t.art_start) {
        *c = Rational::one();
    }
    t.optimize(&cost).expect("phase one is bounded below");
    if t.objective_value(&cost).is_positive() {
        let cert = t.certificate(&cost);
        assert!(cert.proves_infeasible(p), "phase-one Farkas certificate failed to verify");
        return Err(cert);
    }
    t.expel_artificials();
    Ok(t)
}

/// Decides feasibility; infeasible systems come with a verified Farkas
/// certificate.
pub fn lp_feasible(p: &Polyhedron) -> LpOutcome {
    match phase_one(p) {
        Err(certificate) => LpOutcome::Infeasible { certificate },
        Ok(t) => {
            let point = t.primal();
            assert!(p.contains(&point), "phase-one point failed to verify");
            LpOutcome::Feasible { point }
        }
    }
}

/// Optimizes a linear objective. Optimal outcomes carry a dual certificate
/// bounding the objective; unbounded outcomes carry an improving ray.
pub fn optimize_linear(p: &Polyhedron, objective: &[Rational], sense: Sense) -> LpOutcome {
    assert_eq!(objective.len(), p.dim, "objective dimension");
    let mut t = match phase_one(p) {
        Err(certificate) => return LpOutcome::Infeasible { certificate },
        Ok(t) => t,
    };
    // Internally minimize -g for maximize g.
    let g: Vec<Rational> = match sense {
        Sense::Maximize => objective.to_vec(),
        Sense::Minimize => objective.iter().map(|c| -c).collect(),
    };
    let mut cost = vec![Rational::zero(); t.ncols];
    for c in 0..t.n {
        cost[c] = -g[c].clone();
        cost[t.n + c] = g[c].clone();
    }
    match t.optimize(&cost) {
        Ok(()) => {
            let point = t.primal();
            let value = crate::arith::dot(objective, &point);
            let certificate = t.certificate(&cost);
            let bound = match sense {
                Sense::Maximize => value.clone(),
                Sense::Minimize => -value.clone(),
            };
            assert!(p.contains(&point), "optimal point failed to verify");
            assert!(
                certificate.proves_upper_bound(p, &g, &bound),
                "dual certificate failed to verify"
            );
            LpOutcome::Optimal { point, value, certificate }
        }
        Err(q) => {
            let point = t.primal();
            let mut dir = vec![Rational::zero(); t.ncols];
            dir[q] = Rational::one();
            for (i, &b) in t.basis.iter().enumerate() {
                dir[b] = -t.rows[i][q].clone();
            }
            let ray: Vec<Rational> = (0..t.n).map(|c| &dir[c] - &dir[t.n + c]).collect();
            assert!(p.contains(&point) && p.is_recession_direction(&ray));
            LpOutcome::Unbounded { point, ray }
        }
    }
}
