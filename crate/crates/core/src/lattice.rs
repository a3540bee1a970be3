//! The lattice H²(CP²#N(-CP²)) in the standard basis H, E_1..E_N.
//!
//! A class is stored as `(a; b_1..b_N)` meaning `aH - Σ b_i E_i`. Indices in
//! the public API (`TwoClass`, expression strings) are 1-based like the
//! geometry; the `b` vector itself is 0-based.

use crate::arith::{Int, WireInt};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("two-class indices must be distinct")]
    RepeatedIndex,
    #[error("vector is not admissible")]
    NotAdmissible,
    #[error("cannot parse class expression `{0}`")]
    Parse(String),
}

/// Ambient data of the lattice: only the number of exceptional classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeContext {
    pub n: usize,
}

impl LatticeContext {
    pub fn new(n: usize) -> Self {
        LatticeContext { n }
    }

    /// K = -3H + ΣE_i, i.e. (a = -3; b_i = -1).
    pub fn canonical_class(&self) -> ClassVector {
        ClassVector::from_i64(-3, &vec![-1; self.n])
    }

    pub fn h(&self) -> ClassVector {
        ClassVector::from_i64(1, &vec![0; self.n])
    }

    /// The exceptional class E_i (1-based).
    pub fn e(&self, i: usize) -> ClassVector {
        let mut b = vec![0; self.n];
        b[i - 1] = -1;
        ClassVector::from_i64(0, &b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassVector {
    pub a: Int,
    pub b: Vec<Int>,
}

impl ClassVector {
    pub fn new(a: Int, b: Vec<Int>) -> Self {
        ClassVector { a, b }
    }

    pub fn from_i64(a: i64, b: &[i64]) -> Self {
        ClassVector {
            a: Int::from(a),
            b: b.iter().map(|&x| Int::from(x)).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        ClassVector::from_i64(0, &vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// Entries as machine integers; `None` if any entry does not fit.
    pub fn to_i64(&self) -> Option<(i64, Vec<i64>)> {
        let a = self.a.to_i64()?;
        let b = self.b.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>()?;
        Some((a, b))
    }

    /// Row of the associated matrix: (a, -b_1, ..., -b_N).
    pub fn matrix_row(&self) -> Vec<Int> {
        std::iter::once(self.a.clone())
            .chain(self.b.iter().map(|x| -x))
            .collect()
    }

    pub fn add(&self, other: &ClassVector) -> Result<ClassVector, LatticeError> {
        same_dim(self, other)?;
        Ok(ClassVector {
            a: &self.a + &other.a,
            b: self.b.iter().zip(&other.b).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn scale(&self, c: &Int) -> ClassVector {
        ClassVector {
            a: &self.a * c,
            b: self.b.iter().map(|x| x * c).collect(),
        }
    }

    /// Appends `extra` zero entries (new exceptional classes not met by A).
    pub fn extended(&self, extra: usize) -> ClassVector {
        let mut b = self.b.clone();
        b.extend(std::iter::repeat_n(Int::zero(), extra));
        ClassVector { a: self.a.clone(), b }
    }

    /// Applies an index relabeling: `perm[i]` is the new 0-based position of
    /// old entry `i`.
    pub fn relabeled(&self, perm: &[usize]) -> ClassVector {
        let mut b = vec![Int::zero(); self.b.len()];
        for (i, x) in self.b.iter().enumerate() {
            b[perm[i]] = x.clone();
        }
        ClassVector { a: self.a.clone(), b }
    }

    /// Parses expressions such as `2H-E1-E2-E3`, `E8-E1`, `-3E2+H`.
    pub fn parse(expr: &str, n: usize) -> Result<ClassVector, LatticeError> {
        let err = || LatticeError::Parse(expr.to_string());
        let cleaned: String = expr
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_' && *c != '{' && *c != '}')
            .map(|c| if c == '\u{2212}' { '-' } else { c })
            .collect();
        if cleaned.is_empty() {
            return Err(err());
        }
        let mut v = ClassVector::zero(n);
        let bytes: Vec<char> = cleaned.chars().collect();
        let mut pos = 0;
        while pos < bytes.len() {
            let mut sign = Int::one();
            if bytes[pos] == '+' || bytes[pos] == '-' {
                if bytes[pos] == '-' {
                    sign = -sign;
                }
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let coeff: Int = if pos > start {
                bytes[start..pos].iter().collect::<String>().parse().map_err(|_| err())?
            } else {
                Int::one()
            };
            let c = sign * coeff;
            match bytes.get(pos) {
                Some('H') => {
                    pos += 1;
                    v.a += c;
                }
                Some('E') => {
                    pos += 1;
                    let s = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if s == pos {
                        return Err(err());
                    }
                    let idx: usize = bytes[s..pos].iter().collect::<String>().parse().map_err(|_| err())?;
                    if idx == 0 || idx > n {
                        return Err(LatticeError::IndexOutOfRange(idx, n));
                    }
                    // A = aH - Σ b_i E_i, so a coefficient c on E_i means b_i = -c.
                    v.b[idx - 1] -= c;
                }
                _ => return Err(err()),
            }
        }
        Ok(v)
    }
}

fn same_dim(x: &ClassVector, y: &ClassVector) -> Result<(), LatticeError> {
    if x.b.len() != y.b.len() {
        Err(LatticeError::DimensionMismatch(x.b.len(), y.b.len()))
    } else {
        Ok(())
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let mut out = String::new();
        let term = |out: &mut String, c: &Int, name: &str| {
            if c.is_zero() {
                return;
            }
            if c.is_negative() {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            let m = c.abs();
            if !m.is_one() {
                out.push_str(&m.to_string());
            }
            out.push_str(name);
        };
        term(&mut out, &self.a, "H");
        for (i, bi) in self.b.iter().enumerate() {
            term(&mut out, &-bi, &format!("E{}", i + 1));
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl Serialize for ClassVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let wire: Vec<WireInt> = std::iter::once(&self.a)
            .chain(self.b.iter())
            .cloned()
            .map(WireInt)
            .collect();
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClassVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire: Vec<WireInt> = Vec::deserialize(d)?;
        if wire.is_empty() {
            return Err(serde::de::Error::custom("class vector needs at least the a entry"));
        }
        let mut it = wire.into_iter().map(|w| w.0);
        let a = it.next().unwrap();
        Ok(ClassVector { a, b: it.collect() })
    }
}

/// A (-2)-class used for reflections. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TwoClass {
    /// E_i - E_j
    EE(usize, usize),
    /// H - E_i - E_j - E_k
    HEEE(usize, usize, usize),
}

impl TwoClass {
    pub fn validate(&self, n: usize) -> Result<(), LatticeError> {
        let idx: Vec<usize> = match *self {
            TwoClass::EE(i, j) => vec![i, j],
            TwoClass::HEEE(i, j, k) => vec![i, j, k],
        };
        for &i in &idx {
            if i == 0 || i > n {
                return Err(LatticeError::IndexOutOfRange(i, n));
            }
        }
        for x in 0..idx.len() {
            for y in x + 1..idx.len() {
                if idx[x] == idx[y] {
                    return Err(LatticeError::RepeatedIndex);
                }
            }
        }
        Ok(())
    }

    pub fn vector(&self, n: usize) -> Result<ClassVector, LatticeError> {
        self.validate(n)?;
        let mut v = ClassVector::zero(n);
        match *self {
            TwoClass::EE(i, j) => {
                v.b[i - 1] = Int::from(-1);
                v.b[j - 1] = Int::one();
            }
            TwoClass::HEEE(i, j, k) => {
                v.a = Int::one();
                for t in [i, j, k] {
                    v.b[t - 1] = Int::one();
                }
            }
        }
        Ok(v)
    }
}

impl fmt::Display for TwoClass {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match *self {
            TwoClass::EE(i, j) => write!(f, "E{i}-E{j}"),
            TwoClass::HEEE(i, j, k) => write!(f, "H-E{i}-E{j}-E{k}"),
        }
    }
}

/// A·B = a_A a_B - Σ b_Ai b_Bi.
pub fn pair(x: &ClassVector, y: &ClassVector) -> Result<Int, LatticeError> {
    same_dim(x, y)?;
    let mut s = &x.a * &y.a;
    for (p, q) in x.b.iter().zip(&y.b) {
        s -= p * q;
    }
    Ok(s)
}

/// K·A = -3a + Σ b_i.
pub fn k_dot(x: &ClassVector) -> Int {
    x.b.iter().fold(Int::from(-3) * &x.a, |acc, b| acc + b)
}

pub fn self_intersection(x: &ClassVector) -> Int {
    pair(x, x).expect("same vector")
}

/// g(A) = (A·A + K·A)/2 + 1.
pub fn virtual_genus(x: &ClassVector) -> Int {
    let num = self_intersection(x) + k_dot(x);
    // a² - Σb² - 3a + Σb = a(a-3) - Σ b(b-1) is always even.
    debug_assert!((&num % Int::from(2)).is_zero());
    num / Int::from(2) + Int::one()
}

pub fn is_admissible(x: &ClassVector) -> bool {
    if x.a.is_positive() {
        return x.b.iter().all(|b| !b.is_negative());
    }
    let lead = -(x.a.abs() + Int::one());
    let mut seen = 0;
    for b in &x.b {
        if *b == lead {
            seen += 1;
        } else if !(b.is_zero() || b.is_one()) {
            return false;
        }
    }
    seen == 1
}

/// Positivity against the natural index order: the leading class comes first.
pub fn is_positive(x: &ClassVector) -> Result<bool, LatticeError> {
    if !is_admissible(x) {
        return Err(LatticeError::NotAdmissible);
    }
    if x.a.is_positive() {
        return Ok(true);
    }
    // The unique negative entry must precede every +1 entry.
    let neg = x.b.iter().position(|b| b.is_negative()).expect("admissible");
    Ok(x.b[..neg].iter().all(|b| b.is_zero()))
}

/// The leading class of a non-positive-degree admissible vector (0-based).
pub fn leading_index(x: &ClassVector) -> Option<usize> {
    if x.a.is_positive() {
        return None;
    }
    x.b.iter().position(|b| b.is_negative())
}

/// R(γ)(A) = A + (γ·A)γ.
pub fn reflect(g: &TwoClass, x: &ClassVector) -> Result<ClassVector, LatticeError> {
    let gv = g.vector(x.n())?;
    let c = pair(&gv, x)?;
    x.add(&gv.scale(&c))
}
