//! The abstract configuration D: per-component self-intersection and genus,
//! the transverse-intersection pattern, conditions (‡) and (*), Aut(D), and
//! the cones of admissible area vectors.

mod aut;

pub use aut::{compose, compute_aut, invert, AutGroup, Perm, DEFAULT_AUT_CAP};

use crate::arith::{self, Int, Rational, WireRational};
use crate::polyhedra::{self, LpOutcome, Polyhedron, Sense};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("intersection pair ({0}, {1}) is out of range or not between distinct components")]
    BadPair(usize, usize),
    #[error("component {0} has negative genus")]
    NegativeGenus(usize),
    #[error("off-diagonal entries must be symmetric and in {{0,1}}")]
    OffDiagonal,
    #[error("star coefficients have length {0}, expected {1}")]
    StarLength(usize, usize),
    #[error("invalid configuration JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub nu: i64,
    pub genus: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<WireRational>>,
    #[serde(default)]
    pub asserted: bool,
}

/// Wire format of a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub components: Vec<ComponentJson>,
    #[serde(default)]
    pub intersections: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star: Option<StarJson>,
}

/// User-supplied part of condition (*).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarInput {
    pub c: Option<Vec<Rational>>,
    pub asserted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigSpec {
    pub ambient_n: usize,
    pub nu: Vec<i64>,
    pub genus: Vec<i64>,
    /// Symmetric 0/1 matrix of transverse intersections, zero diagonal.
    pub off_diag: Vec<Vec<i64>>,
    pub star: Option<StarInput>,
}

impl ConfigSpec {
    pub fn new(ambient_n: usize, nu: Vec<i64>, genus: Vec<i64>, pairs: &[(usize, usize)]) -> Result<Self, ConfigError> {
        let n = nu.len();
        assert_eq!(genus.len(), n, "genus length");
        if let Some(k) = genus.iter().position(|&g| g < 0) {
            return Err(ConfigError::NegativeGenus(k + 1));
        }
        let mut off = vec![vec![0i64; n]; n];
        for &(k, l) in pairs {
            if k == 0 || l == 0 || k > n || l > n || k == l {
                return Err(ConfigError::BadPair(k, l));
            }
            off[k - 1][l - 1] = 1;
            off[l - 1][k - 1] = 1;
        }
        Ok(ConfigSpec { ambient_n, nu, genus, off_diag: off, star: None })
    }

    /// `n` disjoint copies of a (ν, g) component.
    pub fn disjoint(ambient_n: usize, n: usize, nu: i64, genus: i64) -> Self {
        ConfigSpec::new(ambient_n, vec![nu; n], vec![genus; n], &[]).expect("valid")
    }

    pub fn with_star(mut self, c: Option<Vec<Rational>>, asserted: bool) -> Self {
        self.star = Some(StarInput { c, asserted });
        self
    }

    pub fn n(&self) -> usize {
        self.nu.len()
    }

    /// ν_kl, with the diagonal giving ν_k.
    pub fn q_entry(&self, k: usize, l: usize) -> i64 {
        if k == l {
            self.nu[k]
        } else {
            self.off_diag[k][l]
        }
    }

    pub fn q_matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.n();
        (0..n)
            .map(|k| (0..n).map(|l| arith::rat(self.q_entry(k, l), 1)).collect())
            .collect()
    }

    fn check(&self) -> Result<(), ConfigError> {
        let n = self.n();
        if self.genus.len() != n || self.off_diag.len() != n {
            return Err(ConfigError::OffDiagonal);
        }
        for k in 0..n {
            if self.genus[k] < 0 {
                return Err(ConfigError::NegativeGenus(k + 1));
            }
            if self.off_diag[k].len() != n || self.off_diag[k][k] != 0 {
                return Err(ConfigError::OffDiagonal);
            }
            for l in 0..n {
                let v = self.off_diag[k][l];
                if !(v == 0 || v == 1) || v != self.off_diag[l][k] {
                    return Err(ConfigError::OffDiagonal);
                }
            }
        }
        if let Some(StarInput { c: Some(c), .. }) = &self.star {
            if c.len() != n {
                return Err(ConfigError::StarLength(c.len(), n));
            }
        }
        Ok(())
    }

    pub fn from_json_value(j: ConfigJson) -> Result<Self, ConfigError> {
        let nu = j.components.iter().map(|c| c.nu).collect();
        let genus = j.components.iter().map(|c| c.genus).collect();
        let pairs: Vec<(usize, usize)> = j.intersections.iter().map(|p| (p[0], p[1])).collect();
        let mut spec = ConfigSpec::new(j.n, nu, genus, &pairs)?;
        spec.star = j.star.map(|s| StarInput {
            c: s.c.map(|v| v.into_iter().map(|w| w.0).collect()),
            asserted: s.asserted,
        });
        spec.check()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let j: ConfigJson = serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;
        Self::from_json_value(j)
    }

    pub fn to_json_value(&self) -> ConfigJson {
        let n = self.n();
        let mut intersections = Vec::new();
        for k in 0..n {
            for l in k + 1..n {
                if self.off_diag[k][l] == 1 {
                    intersections.push([k + 1, l + 1]);
                }
            }
        }
        ConfigJson {
            n: self.ambient_n,
            components: self
                .nu
                .iter()
                .zip(&self.genus)
                .map(|(&nu, &genus)| ComponentJson { nu, genus })
                .collect(),
            intersections,
            star: self.star.as_ref().map(|s| StarJson {
                c: s.c.as_ref().map(|v| v.iter().cloned().map(WireRational).collect()),
                asserted: s.asserted,
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("serializable")
    }

    /// Same configuration in a larger ambient lattice.
    pub fn with_ambient(&self, ambient_n: usize) -> Self {
        let mut s = self.clone();
        s.ambient_n = ambient_n;
        s
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(k) = queue.pop_front() {
            for l in 0..n {
                if self.off_diag[k][l] == 1 && !seen[l] {
                    seen[l] = true;
                    queue.push_back(l);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Determinant of an integer matrix by Bareiss elimination.
pub fn determinant(m: &[Vec<i64>]) -> Int {
    let n = m.len();
    if n == 0 {
        return Int::one();
    }
    let mut a: Vec<Vec<Int>> = m.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn leading_minor(spec: &ConfigSpec, size: usize, negate: bool) -> Int {
    let m: Vec<Vec<i64>> = (0..size)
        .map(|k| {
            (0..size)
                .map(|l| if negate { -spec.q_entry(k, l) } else { spec.q_entry(k, l) })
                .collect()
        })
        .collect();
    determinant(&m)
}

/// Q negative definite iff every leading principal minor of -Q is positive.
pub fn is_negative_definite(spec: &ConfigSpec) -> bool {
    (1..=spec.n()).all(|s| leading_minor(spec, s, true).is_positive())
}

pub fn q_determinant(spec: &ConfigSpec) -> Int {
    leading_minor(spec, spec.n(), false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfigClass {
    NegDef,
    ConnNonsingNonnegDef,
    FailsDoubleDagger,
}

/// Condition (‡). The second branch is read as "connected, non-singular and
/// not negative definite".
pub fn validate_config(spec: &ConfigSpec) -> ConfigClass {
    if is_negative_definite(spec) {
        ConfigClass::NegDef
    } else if spec.is_connected() && !q_determinant(spec).is_zero() {
        ConfigClass::ConnNonsingNonnegDef
    } else {
        ConfigClass::FailsDoubleDagger
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StarError {
    #[error("Q is singular and d = (2g-2-ν) is outside its column space")]
    SingularInconsistent,
    #[error("Q is singular; choose c from the affine family (particular + kernel span) and supply it")]
    SingularNeedsChoice { particular: Vec<Rational>, kernel: Vec<Vec<Rational>> },
    #[error("supplied c does not satisfy Q c = d")]
    SuppliedMismatch,
    #[error("component {0} has c_k >= 0 but is not a sphere with self-intersection in -3..=0")]
    StarSphereConditionViolated(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarData {
    #[serde(with = "arith::serde_rational_vec")]
    pub c: Vec<Rational>,
    /// 0-based indices with c_k >= 0.
    pub i0: Vec<usize>,
    /// 0-based indices of spheres with ν_k in {0,-1,-2,-3}.
    pub i1: Vec<usize>,
    pub asserted: bool,
    pub warnings: Vec<String>,
}

/// d_l = 2g_l - 2 - ν_l, i.e. K·F_l by adjunction.
pub fn adjunction_vector(spec: &ConfigSpec) -> Vec<Rational> {
    (0..spec.n())
        .map(|l| arith::rat(2 * spec.genus[l] - 2 - spec.nu[l], 1))
        .collect()
}

fn satisfies(q: &[Vec<Rational>], c: &[Rational], d: &[Rational]) -> bool {
    q.iter().zip(d).all(|(row, dl)| &arith::dot(row, c) == dl)
}

/// Solves Q c = d for the coefficients of condition (*).
pub fn star_data(spec: &ConfigSpec) -> Result<StarData, StarError> {
    let n = spec.n();
    let q = spec.q_matrix();
    let d = adjunction_vector(spec);
    let supplied = spec.star.as_ref().and_then(|s| s.c.clone());
    let sol = polyhedra::solve_affine(&q, &d, n).ok_or(StarError::SingularInconsistent)?;
    let c = if sol.kernel.is_empty() {
        if let Some(s) = &supplied {
            if s != &sol.particular {
                return Err(StarError::SuppliedMismatch);
            }
        }
        sol.particular
    } else {
        match supplied {
            Some(s) if satisfies(&q, &s, &d) => s,
            Some(_) => return Err(StarError::SuppliedMismatch),
            None => {
                return Err(StarError::SingularNeedsChoice { particular: sol.particular, kernel: sol.kernel })
            }
        }
    };
    assert!(satisfies(&q, &c, &d), "Q c = d re-check");
    let i0: Vec<usize> = (0..n).filter(|&k| !c[k].is_negative()).collect();
    let i1: Vec<usize> = (0..n)
        .filter(|&k| spec.genus[k] == 0 && (-3..=0).contains(&spec.nu[k]))
        .collect();
    if let Some(&k) = i0.iter().find(|k| !i1.contains(k)) {
        return Err(StarError::StarSphereConditionViolated(k + 1));
    }
    let mut warnings = Vec::new();
    if n > 0 && c.iter().all(|x| x.is_zero()) {
        warnings.push(format!(
            "c = 0: formally I_0 is everything, but K = 0 only when N = 9 (here N = {})",
            spec.ambient_n
        ));
    }
    Ok(StarData {
        c,
        i0,
        i1,
        asserted: spec.star.as_ref().map(|s| s.asserted).unwrap_or(false),
        warnings,
    })
}

/// Homogeneous cone `{x : row·x >= 0 for every row}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub dim: usize,
    pub rows: Vec<Vec<WireRational>>,
}

impl ConeSpec {
    pub fn new(dim: usize, rows: Vec<Vec<Rational>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == dim), "cone row dimension");
        ConeSpec { dim, rows: rows.into_iter().map(|r| r.into_iter().map(WireRational).collect()).collect() }
    }

    pub fn rational_rows(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|r| r.iter().map(|w| w.0.clone()).collect()).collect()
    }

    pub fn positive_orthant(dim: usize) -> Self {
        ConeSpec::new(dim, identity_rows(dim))
    }

    pub fn intersect(&self, other: &ConeSpec) -> ConeSpec {
        assert_eq!(self.dim, other.dim);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        ConeSpec { dim: self.dim, rows }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.rational_rows().iter().all(|r| !arith::dot(r, x).is_negative())
    }

    pub fn contains_strictly(&self, x: &[Rational]) -> bool {
        self.rational_rows().iter().all(|r| arith::dot(r, x).is_positive())
    }

    /// A point with every row strictly positive, via slack maximization.
    pub fn interior_point(&self) -> Option<Vec<Rational>> {
        let n = self.dim;
        if n == 0 {
            return self.rows.is_empty().then(Vec::new);
        }
        // Variables (x, t): row·x - t >= 0, t <= 1.
        let mut p = Polyhedron::new(n + 1);
        for r in self.rational_rows() {
            let mut row = r.clone();
            row.push(-Rational::one());
            p.add_ge(row, Rational::zero());
        }
        let mut t = vec![Rational::zero(); n + 1];
        t[n] = Rational::one();
        p.add_le(t.clone(), Rational::one());
        match polyhedra::optimize_linear(&p, &t, Sense::Maximize) {
            LpOutcome::Optimal { point, value, .. } if value.is_positive() => {
                let x: Vec<Rational> = arith::primitive_integer(&point[..n])
                    .into_iter()
                    .map(Rational::from_integer)
                    .collect();
                debug_assert!(self.contains_strictly(&x));
                Some(x)
            }
            _ => None,
        }
    }
}

fn identity_rows(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|k| {
            let mut e = vec![Rational::zero(); n];
            e[k] = Rational::one();
            e
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeVariant {
    I0,
    I1,
    /// 0-based index set S with I_0 ⊆ S ⊆ I_1.
    Subset(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConeError {
    #[error("configuration fails condition (‡)")]
    FailsDoubleDagger,
    #[error("subset must satisfy I_0 ⊆ S ⊆ I_1")]
    BadSubset,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cones {
    pub c_delta: ConeSpec,
    pub c_star: ConeSpec,
    pub interior_witness: Option<Vec<WireRational>>,
}

impl Cones {
    pub fn combined(&self) -> ConeSpec {
        self.c_delta.intersect(&self.c_star)
    }

    pub fn witness(&self) -> Option<Vec<Rational>> {
        self.interior_witness.as_ref().map(|v| v.iter().map(|w| w.0.clone()).collect())
    }
}

/// Index set used by a cone/cap variant.
pub fn variant_indices(star: &StarData, variant: &ConeVariant) -> Result<Vec<usize>, ConeError> {
    match variant {
        ConeVariant::I0 => Ok(star.i0.clone()),
        ConeVariant::I1 => Ok(star.i1.clone()),
        ConeVariant::Subset(s) => {
            let ok = star.i0.iter().all(|k| s.contains(k)) && s.iter().all(|k| star.i1.contains(k));
            if ok {
                let mut s = s.clone();
                s.sort_unstable();
                s.dedup();
                Ok(s)
            } else {
                Err(ConeError::BadSubset)
            }
        }
    }
}

/// The cone C_δ of condition (‡).
pub fn c_delta(spec: &ConfigSpec) -> Result<ConeSpec, ConeError> {
    let n = spec.n();
    match validate_config(spec) {
        ConfigClass::NegDef => Ok(ConeSpec::positive_orthant(n)),
        ConfigClass::ConnNonsingNonnegDef => {
            let q = spec.q_matrix();
            let mut rows = identity_rows(n);
            // Rows of Q⁻¹ (symmetric), column by column.
            for e in identity_rows(n) {
                let sol = polyhedra::solve_affine(&q, &e, n).expect("non-singular");
                rows.push(sol.particular);
            }
            Ok(ConeSpec::new(n, rows))
        }
        ConfigClass::FailsDoubleDagger => Err(ConeError::FailsDoubleDagger),
    }
}

pub fn build_cones(spec: &ConfigSpec, star: &StarData, variant: &ConeVariant) -> Result<Cones, ConeError> {
    let n = spec.n();
    let cd = c_delta(spec)?;
    let index = variant_indices(star, variant)?;
    let factor = if matches!(variant, ConeVariant::I0) { 1 } else { 2 };
    let rows: Vec<Vec<Rational>> = index
        .iter()
        .map(|&k| {
            let mut r: Vec<Rational> = star.c.iter().map(|c| -c).collect();
            r[k] -= arith::rat(factor, 1);
            r
        })
        .collect();
    let cs = ConeSpec::new(n, rows);
    let witness = cd.intersect(&cs).interior_point();
    Ok(Cones {
        c_delta: cd,
        c_star: cs,
        interior_witness: witness.map(|v| v.into_iter().map(WireRational).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn classification_examples() {
        assert_eq!(validate_config(&ConfigSpec::disjoint(7, 7, -2, 0)), ConfigClass::NegDef);
        assert_eq!(
            validate_config(&ConfigSpec::disjoint(1, 1, 1, 3)),
            ConfigClass::ConnNonsingNonnegDef
        );
        assert_eq!(validate_config(&ConfigSpec::disjoint(2, 2, 0, 0)), ConfigClass::FailsDoubleDagger);
        // A (+1)-curve meeting a (-2)-curve: indefinite, connected, det = -3.
        let s = ConfigSpec::new(3, vec![1, -2], vec![0, 0], &[(1, 2)]).unwrap();
        assert_eq!(validate_config(&s), ConfigClass::ConnNonsingNonnegDef);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]];
        assert_eq!(determinant(&m), Int::from(4));
        let m = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(determinant(&m), Int::from(-1));
    }

    #[test]
    fn star_examples() {
        let s = star_data(&ConfigSpec::disjoint(12, 9, -3, 0)).unwrap();
        assert!(s.c.iter().all(|c| *c == rat(-1, 3)));
        assert!(s.i0.is_empty());
        assert_eq!(s.i1.len(), 9);

        let s = star_data(&ConfigSpec::disjoint(7, 7, -2, 0)).unwrap();
        assert!(s.c.iter().all(|c| c.is_zero()));
        assert_eq!(s.i0.len(), 7);
        assert_eq!(s.warnings.len(), 1);

        let s = star_data(&ConfigSpec::disjoint(5, 1, -4, 0)).unwrap();
        assert_eq!(s.c, vec![rat(-1, 2)]);
        assert!(s.i0.is_empty() && s.i1.is_empty());
    }

    #[test]
    fn star_singular_cases() {
        // Q = 0 with d = (-2, -2): inconsistent.
        let s = ConfigSpec::disjoint(2, 2, 0, 0);
        assert_eq!(star_data(&s), Err(StarError::SingularInconsistent));
        // Two genus-1 curves of square 0: d = 0, singular but consistent.
        let s = ConfigSpec::disjoint(2, 2, 0, 1);
        assert!(matches!(star_data(&s), Err(StarError::SingularNeedsChoice { .. })));
        let s = s.with_star(Some(vec![rat(1, 1), rat(0, 1)]), true);
        // c_1 >= 0 on a genus-1 curve violates I_0 ⊆ I_1.
        assert_eq!(star_data(&s), Err(StarError::StarSphereConditionViolated(1)));
        let s = ConfigSpec::disjoint(2, 2, 0, 1).with_star(Some(vec![rat(-1, 1), rat(-2, 1)]), true);
        let d = star_data(&s).unwrap();
        assert!(d.asserted && d.i0.is_empty());
    }

    #[test]
    fn cone_examples() {
        let spec = ConfigSpec::disjoint(12, 9, -3, 0);
        let star = star_data(&spec).unwrap();
        let cones = build_cones(&spec, &star, &ConeVariant::I1).unwrap();
        let ones = vec![rat(1, 1); 9];
        assert!(cones.combined().contains_strictly(&ones));
        let w = cones.witness().unwrap();
        assert!(cones.combined().contains_strictly(&w));

        let spec = ConfigSpec::disjoint(7, 7, -2, 0);
        let star = star_data(&spec).unwrap();
        let cones = build_cones(&spec, &star, &ConeVariant::I0).unwrap();
        assert!(cones.witness().is_none());
        assert_eq!(cones.c_delta, ConeSpec::positive_orthant(7));
    }

    #[test]
    fn connected_branch_uses_inverse() {
        let s = ConfigSpec::new(3, vec![1, -2], vec![0, 0], &[(1, 2)]).unwrap();
        let cd = c_delta(&s).unwrap();
        assert_eq!(cd.rows.len(), 4);
        // Q⁻¹ = (1/3)[[2,1],[1,-1]]: δ = (1,1) gives Q⁻¹δ = (1, 0), on the boundary.
        assert!(cd.contains(&[rat(1, 1), rat(1, 1)]));
        assert!(!cd.contains_strictly(&[rat(1, 1), rat(1, 1)]));
        assert!(cd.contains_strictly(&[rat(3, 1), rat(1, 1)]));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"N": 8, "components": [{"nu": 4, "genus": 0}, {"nu": -1, "genus": 0}],
                       "intersections": [[1, 2]], "star": {"c": ["-1/2", 3], "asserted": true}}"#;
        let spec = ConfigSpec::from_json(text).unwrap();
        assert_eq!(spec.off_diag[0][1], 1);
        assert_eq!(spec.star.as_ref().unwrap().c.as_ref().unwrap()[0], rat(-1, 2));
        let again = ConfigSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(again, spec);
        assert!(ConfigSpec::from_json(r#"{"N": 1, "components": [{"nu": 0, "genus": 0}], "intersections": [[1,1]]}"#).is_err());
        assert!(ConfigSpec::from_json(r#"{"N": 1, "components": [{"nu": 0, "genus": -1}]}"#).is_err());
    }
}
