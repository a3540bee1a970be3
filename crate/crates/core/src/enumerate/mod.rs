//! Enumeration of homological assignments Ω(D, C̲) up to S_N column
//! permutations (and optionally Aut(D) row permutations).
//!
//! The search runs on machine integers: every entry is bounded by the caps,
//! so `i64` cannot overflow for any cap that is itself representable. Rows
//! are stored as `[a, b_1, ..., b_N]`.

mod candidates;
mod canonical;
mod checkpoint;
mod oracle;
mod search;

pub use candidates::{candidate_patterns, candidate_vectors, component_box, expand_pattern, Pattern};
pub use canonical::{canonical_form, canonical_rows, column_sorted};
pub use checkpoint::Checkpoint;
pub use oracle::{brute_force_oracle, DEFAULT_ORACLE_CAP};
pub use search::{enumerate_assignments, enumerate_with, EnumOptions, EnumResult, EnumStats};

use crate::bounds::CapVector;
use crate::configspec::ConfigSpec;
use crate::lattice::{self, ClassVector};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub type Row = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub vectors: Vec<ClassVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssignmentError {
    #[error("assignment has {0} vectors, configuration has {1} components")]
    Length(usize, usize),
    #[error("vector {0} has length {1}, expected N = {2}")]
    Dimension(usize, usize, usize),
    #[error("vector {0} is not admissible")]
    NotAdmissible(usize),
    #[error("vector {0} has the wrong square")]
    Square(usize),
    #[error("vector {0} has the wrong genus")]
    Genus(usize),
    #[error("vectors {0} and {1} have the wrong intersection number")]
    Intersection(usize, usize),
}

impl Assignment {
    pub fn new(vectors: Vec<ClassVector>) -> Self {
        Assignment { vectors }
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn parse(exprs: &[&str], ambient_n: usize) -> Result<Self, lattice::LatticeError> {
        Ok(Assignment {
            vectors: exprs.iter().map(|e| ClassVector::parse(e, ambient_n)).collect::<Result<_, _>>()?,
        })
    }

    /// The associated matrix 𝓘 with rows (a_k, -b_k1, ..., -b_kN).
    pub fn matrix(&self) -> Vec<Vec<crate::arith::Int>> {
        self.vectors.iter().map(|v| v.matrix_row()).collect()
    }

    pub fn matrix_rational(&self) -> Vec<Vec<crate::arith::Rational>> {
        self.matrix()
            .into_iter()
            .map(|r| r.into_iter().map(crate::arith::Rational::from_integer).collect())
            .collect()
    }

    pub fn to_rows(&self) -> Option<Vec<Row>> {
        self.vectors
            .iter()
            .map(|v| {
                let (a, b) = v.to_i64()?;
                let mut r = vec![a];
                r.extend(b);
                Some(r)
            })
            .collect()
    }

    pub fn from_rows(rows: &[Row]) -> Self {
        Assignment { vectors: rows.iter().map(|r| ClassVector::from_i64(r[0], &r[1..])).collect() }
    }

    /// Checks admissibility and the three equation families of the
    /// definition against `spec`.
    pub fn check(&self, spec: &ConfigSpec) -> Result<(), AssignmentError> {
        let n = spec.n();
        if self.n() != n {
            return Err(AssignmentError::Length(self.n(), n));
        }
        for (k, v) in self.vectors.iter().enumerate() {
            if v.n() != spec.ambient_n {
                return Err(AssignmentError::Dimension(k + 1, v.n(), spec.ambient_n));
            }
            if !lattice::is_admissible(v) {
                return Err(AssignmentError::NotAdmissible(k + 1));
            }
            if lattice::self_intersection(v).to_i64() != Some(spec.nu[k]) {
                return Err(AssignmentError::Square(k + 1));
            }
            if lattice::virtual_genus(v).to_i64() != Some(spec.genus[k]) {
                return Err(AssignmentError::Genus(k + 1));
            }
        }
        for k in 0..n {
            for l in k + 1..n {
                let p = lattice::pair(&self.vectors[k], &self.vectors[l]).expect("same dimension");
                if p.to_i64() != Some(spec.off_diag[k][l]) {
                    return Err(AssignmentError::Intersection(k + 1, l + 1));
                }
            }
        }
        Ok(())
    }

    pub fn relabeled(&self, perm: &[usize]) -> Assignment {
        Assignment { vectors: self.vectors.iter().map(|v| v.relabeled(perm)).collect() }
    }
}

/// Search parameters for [`enumerate_assignments`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub caps: CapVector,
    /// Reject assignments with two or more vectors of negative degree.
    pub at_most_one_negative_a: bool,
    /// Quotient by Aut(D) as well as S_N.
    pub row_symmetry_breaking: bool,
    /// Generate only column-sorted partial matrices (otherwise deduplicate).
    pub column_symmetry_breaking: bool,
    /// Work units completed between checkpoint writes.
    pub checkpoint_interval: usize,
    pub frontier_depth: usize,
    pub aut_cap: u128,
}

impl SearchSpec {
    pub fn new(caps: CapVector) -> Self {
        SearchSpec {
            caps,
            at_most_one_negative_a: false,
            row_symmetry_breaking: true,
            column_symmetry_breaking: true,
            checkpoint_interval: 64,
            frontier_depth: 2,
            aut_cap: crate::configspec::DEFAULT_AUT_CAP,
        }
    }

    pub fn uniform(n: usize, cap: i64) -> Self {
        SearchSpec::new(CapVector::uniform(n, cap, crate::bounds::CapProvenance::DegreeCap))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumError {
    #[error("caps have length {0}, configuration has {1} components")]
    CapsLength(usize, usize),
    #[error("cap {0} is too large for the integer search")]
    CapTooLarge(usize),
    #[error("oracle visited more than {cap} nodes")]
    CapExceeded { cap: u64 },
    #[error("checkpoint was written for a different search (hash {found}, expected {expected})")]
    CheckpointMismatch { expected: String, found: String },
    #[error("cannot read checkpoint: {0}")]
    CheckpointRead(String),
}

/// Inner product of two `[a, b..]` rows.
pub(crate) fn pair_rows(x: &[i64], y: &[i64]) -> i64 {
    let mut s = x[0] * y[0];
    for (p, q) in x[1..].iter().zip(&y[1..]) {
        s -= p * q;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_catches_each_equation() {
        let spec = ConfigSpec::disjoint(7, 2, -2, 0);
        let ok = Assignment::parse(&["H-E1-E2-E3", "H-E1-E4-E5"], 7).unwrap();
        assert_eq!(ok.check(&spec), Ok(()));
        let bad = Assignment::parse(&["H-E1-E2-E3", "H-E4-E5-E6"], 7).unwrap();
        assert_eq!(bad.check(&spec), Err(AssignmentError::Intersection(1, 2)));
        let bad = Assignment::parse(&["H-E1-E2", "H-E4-E5-E6"], 7).unwrap();
        assert_eq!(bad.check(&spec), Err(AssignmentError::Square(1)));
        let bad = Assignment::parse(&["E1+E2", "H-E4-E5-E6"], 7).unwrap();
        assert_eq!(bad.check(&spec), Err(AssignmentError::NotAdmissible(1)));
    }
}
