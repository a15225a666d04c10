//! Finite-dimensional commutative unital algebras over the reals, stored as
//! structure constants, and elementwise arithmetic in them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::linalg;

/// Tolerance for axiom checks, relative to the largest structure constant.
pub const AXIOM_TOL: f64 = 1e-10;
/// Relative tolerance used when extracting the kernel of the trace form.
pub const TRACE_KERNEL_TOL: f64 = 1e-9;
/// Tolerance for deciding that a power of an element vanishes.
pub const NILPOTENT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("element with real part {real_part} is not a unit")]
    NonUnit { real_part: f64 },
    #[error("invalid algebra: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("monomials in the pseudobasis span only {spanned} of {radical} radical dimensions")]
    SpanFailure { spanned: usize, radical: usize },
    #[error("malformed structure constants: {0}")]
    Malformed(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// One violated algebra axiom.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Commutativity { i: usize, j: usize, k: usize, defect: f64 },
    Associativity { i: usize, j: usize, k: usize, m: usize, defect: f64 },
    Unit { j: usize, k: usize, defect: f64 },
    Locality { radical_dim: usize, expected: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Commutativity { i, j, k, defect } => {
                write!(f, "commutativity at ({i},{j},{k}) defect={defect:e}")
            }
            Violation::Associativity { i, j, k, m, defect } => {
                write!(f, "associativity at ({i},{j},{k},{m}) defect={defect:e}")
            }
            Violation::Unit { j, k, defect } => write!(f, "unit at ({j},{k}) defect={defect:e}"),
            Violation::Locality { radical_dim, expected } => {
                write!(f, "locality: radical dim {radical_dim} != {expected}")
            }
        }
    }
}

/// An element of A as its coefficient vector in some basis of A.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub coeffs: Vec<f64>,
}

impl AlgebraElement {
    pub fn new(coeffs: Vec<f64>) -> Self {
        AlgebraElement { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        AlgebraElement { coeffs: vec![0.0; n] }
    }

    /// `c · 1`, assuming the unit is basis element 0.
    pub fn scalar(n: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; n];
        coeffs[0] = c;
        AlgebraElement { coeffs }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut coeffs = vec![0.0; n];
        coeffs[i] = 1.0;
        AlgebraElement { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Coefficient of the unit. Meaningful in a standard basis.
    pub fn real_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// `self - real_part · 1`.
    pub fn radical_part(&self) -> AlgebraElement {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = 0.0;
        AlgebraElement { coeffs }
    }

    pub fn scale(&self, s: f64) -> AlgebraElement {
        AlgebraElement { coeffs: self.coeffs.iter().map(|x| x * s).collect() }
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coeffs)
    }

    pub fn from_dvector(v: &DVector<f64>) -> Self {
        AlgebraElement { coeffs: v.iter().copied().collect() }
    }

    fn zip_with(&self, other: &AlgebraElement, f: impl Fn(f64, f64) -> f64) -> AlgebraElement {
        assert_eq!(self.dim(), other.dim(), "algebra element dimension mismatch");
        AlgebraElement { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect() }
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: AlgebraElement) -> AlgebraElement {
        &self + &rhs
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: AlgebraElement) -> AlgebraElement {
        &self - &rhs
    }
}

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, s: f64) -> AlgebraElement {
        self.scale(s)
    }
}

/// The algebra A: `mul(e_i, e_j) = Σ_k c[i][j][k] e_k`, with index 0 the unit.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    n: usize,
    labels: Vec<String>,
    c: Vec<f64>,
}

impl StructureConstants {
    /// Builds the algebra from a flat `n*n*n` tensor in `[i][j][k]` order.
    pub fn new(labels: Vec<String>, c: Vec<f64>) -> Result<Self, AlgebraError> {
        let n = labels.len();
        if n == 0 {
            return Err(AlgebraError::Malformed("dimension must be positive".into()));
        }
        if c.len() != n * n * n {
            return Err(AlgebraError::Malformed(format!("tensor has {} entries, expected {}", c.len(), n * n * n)));
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(AlgebraError::Malformed("non-finite structure constant".into()));
        }
        Ok(StructureConstants { n, labels, c })
    }

    /// Builds the algebra from a closure giving `c[i][j][k]`.
    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self, AlgebraError> {
        let n = labels.len();
        let mut c = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    c[(i * n + j) * n + k] = f(i, j, k);
                }
            }
        }
        Self::new(labels, c)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.n + j) * self.n + k]
    }

    fn scale(&self) -> f64 {
        self.c.iter().fold(1.0_f64, |m, x| m.max(x.abs()))
    }

    fn check_dim(&self, a: &AlgebraElement) -> Result<(), AlgebraError> {
        if a.dim() != self.n {
            Err(AlgebraError::DimensionMismatch { expected: self.n, got: a.dim() })
        } else {
            Ok(())
        }
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement::scalar(self.n, 1.0)
    }

    /// Product of two elements by contraction against the structure constants.
    pub fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub(crate) fn mul_unchecked(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let n = self.n;
        let mut out = vec![0.0; n];
        for (i, &ai) in a.coeffs.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            for (j, &bj) in b.coeffs.iter().enumerate() {
                if bj == 0.0 {
                    continue;
                }
                let w = ai * bj;
                let row = &self.c[(i * n + j) * n..(i * n + j + 1) * n];
                for (o, &ck) in out.iter_mut().zip(row) {
                    *o += w * ck;
                }
            }
        }
        AlgebraElement { coeffs: out }
    }

    /// `a^k` by repeated multiplication; `a^0 = 1`.
    pub fn pow(&self, a: &AlgebraElement, k: u32) -> Result<AlgebraElement, AlgebraError> {
        self.check_dim(a)?;
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul_unchecked(&acc, a);
        }
        Ok(acc)
    }

    /// Regular representation: the matrix of `x ↦ a·x`, column `j` being `a·e_j`.
    pub fn left_matrix(&self, a: &AlgebraElement) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for (i, &ai) in a.coeffs.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    m[(k, j)] += ai * self.get(i, j, k);
                }
            }
        }
        m
    }

    /// `L_{e_i}` for every basis element.
    pub fn basis_matrices(&self) -> Vec<DMatrix<f64>> {
        (0..self.n).map(|i| self.left_matrix(&AlgebraElement::basis(self.n, i))).collect()
    }

    /// Inverse of a unit `a = c + r` (c the real part, r nilpotent) via the
    /// finite geometric series `(1/c) Σ_k (−r/c)^k`.
    ///
    /// Expects coordinates in which basis element 0 is the unit and the
    /// remaining basis elements span the radical.
    pub fn invert(&self, a: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.check_dim(a)?;
        let c = a.real_part();
        if c.abs() <= 1e-9 * (1.0 + a.norm_inf()) {
            return Err(AlgebraError::NonUnit { real_part: c });
        }
        let q = a.radical_part().scale(-1.0 / c);
        let mut term = self.one();
        let mut sum = self.one();
        for _ in 1..self.n {
            term = self.mul_unchecked(&term, &q);
            if term.coeffs.iter().all(|x| *x == 0.0) {
                break;
            }
            sum = &sum + &term;
        }
        Ok(sum.scale(1.0 / c))
    }

    /// Least `S ≤ n` with `a^S = 0` within tolerance, or `None`.
    pub fn nilpotency_index(&self, a: &AlgebraElement) -> Option<usize> {
        if a.dim() != self.n {
            return None;
        }
        let scale = a.norm_inf().max(1.0);
        let mut p = a.clone();
        for s in 1..=self.n {
            if p.norm_inf() <= NILPOTENT_TOL * scale.powi(s as i32) {
                return Some(s);
            }
            p = self.mul_unchecked(&p, a);
        }
        None
    }

    /// Trace Gram matrix `T[i][j] = trace(L_{e_i e_j})`.
    pub fn trace_form(&self) -> DMatrix<f64> {
        let n = self.n;
        // trace(L_{e_k}) = Σ_j c[k][j][j]
        let tr: Vec<f64> = (0..n).map(|k| (0..n).map(|j| self.get(k, j, j)).sum()).collect();
        DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| self.get(i, j, k) * tr[k]).sum())
    }

    /// Orthonormal (canonical) basis of the radical, computed as the kernel of
    /// the trace form.
    pub fn radical_basis(&self) -> Vec<AlgebraElement> {
        linalg::kernel(&self.trace_form(), TRACE_KERNEL_TOL).iter().map(AlgebraElement::from_dvector).collect()
    }

    /// Every violated axiom; empty iff A is a commutative, associative, unital
    /// local algebra.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.n;
        let tol = AXIOM_TOL * self.scale();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let defect = (self.get(i, j, k) - self.get(j, i, k)).abs();
                    if defect > tol {
                        out.push(Violation::Commutativity { i, j, k, defect });
                    }
                }
            }
        }
        for j in 0..n {
            for k in 0..n {
                let want = if j == k { 1.0 } else { 0.0 };
                let defect = (self.get(0, j, k) - want).abs();
                if defect > tol {
                    out.push(Violation::Unit { j, k, defect });
                }
            }
        }
        let assoc_tol = tol * self.scale();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let lhs: f64 = (0..n).map(|l| self.get(i, j, l) * self.get(l, k, m)).sum();
                        let rhs: f64 = (0..n).map(|l| self.get(j, k, l) * self.get(i, l, m)).sum();
                        let defect = (lhs - rhs).abs();
                        if defect > assoc_tol {
                            out.push(Violation::Associativity { i, j, k, m, defect });
                        }
                    }
                }
            }
        }
        let radical_dim = self.radical_basis().len();
        if radical_dim != n - 1 {
            out.push(Violation::Locality { radical_dim, expected: n - 1 });
        }
        out
    }

    /// The same algebra expressed in a new basis whose elements are the
    /// columns of `basis` (in current coordinates). `inverse` must be the
    /// inverse of `basis`. Entries below `snap` times the largest entry are
    /// set to zero and the unit row is made exact.
    pub fn rebase(
        &self,
        basis: &DMatrix<f64>,
        inverse: &DMatrix<f64>,
        labels: Vec<String>,
        snap: f64,
    ) -> Result<StructureConstants, AlgebraError> {
        let n = self.n;
        let cols: Vec<AlgebraElement> =
            (0..n).map(|i| AlgebraElement::from_dvector(&basis.column(i).into_owned())).collect();
        let mut c = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                let prod = self.mul_unchecked(&cols[i], &cols[j]).to_dvector();
                let coords = inverse * prod;
                for k in 0..n {
                    c[(i * n + j) * n + k] = coords[k];
                }
            }
        }
        let big = c.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        for x in c.iter_mut() {
            if x.abs() <= snap * big {
                *x = 0.0;
            }
        }
        for j in 0..n {
            for k in 0..n {
                let v = if j == k { 1.0 } else { 0.0 };
                c[j * n + k] = v;
                c[(j * n) * n + k] = v;
            }
        }
        StructureConstants::new(labels, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn el(v: &[f64]) -> AlgebraElement {
        AlgebraElement::new(v.to_vec())
    }

    #[test]
    fn dual_eps_squared_vanishes() {
        let a = presets::dual();
        assert_eq!(a.mul(&el(&[0.0, 1.0]), &el(&[0.0, 1.0])).unwrap(), el(&[0.0, 0.0]));
        assert!(a.validate().is_empty());
    }

    #[test]
    fn trunc3_products() {
        let a = presets::trunc(3).unwrap();
        assert_eq!(a.mul(&el(&[0., 1., 0.]), &el(&[0., 1., 0.])).unwrap(), el(&[0., 0., 1.]));
        // (1+ε)² = 1 + 2ε + ε²
        assert_eq!(a.mul(&el(&[1., 1., 0.]), &el(&[1., 1., 0.])).unwrap(), el(&[1., 2., 1.]));
    }

    #[test]
    fn mul_rejects_mismatched_dimension() {
        let a = presets::dual();
        let err = a.mul(&el(&[1.0]), &el(&[1.0, 0.0])).unwrap_err();
        assert_eq!(err, AlgebraError::DimensionMismatch { expected: 2, got: 1 });
    }

    #[test]
    fn invert_examples() {
        let d = presets::dual();
        assert_eq!(d.invert(&el(&[2.0, 4.0])).unwrap(), el(&[0.5, -1.0]));
        assert_eq!(d.invert(&el(&[1.0, 0.0])).unwrap(), el(&[1.0, 0.0]));
        let t = presets::trunc(3).unwrap();
        assert_eq!(t.invert(&el(&[1.0, 1.0, 0.0])).unwrap(), el(&[1.0, -1.0, 1.0]));
        assert!(matches!(d.invert(&el(&[1e-12, 1.0])), Err(AlgebraError::NonUnit { .. })));
    }

    #[test]
    fn nilpotency_examples() {
        let d = presets::dual();
        assert_eq!(d.nilpotency_index(&el(&[0.0, 1.0])), Some(2));
        assert_eq!(d.nilpotency_index(&el(&[1.0, 0.0])), None);
        let t = presets::trunc(3).unwrap();
        assert_eq!(t.nilpotency_index(&el(&[0.0, 1.0, 1.0])), Some(3));
        assert_eq!(t.nilpotency_index(&el(&[0.0, 0.0, 0.0])), Some(1));
    }

    #[test]
    fn commutativity_violation_is_located() {
        let mut c = presets::trunc(3).unwrap().c.clone();
        // c[1][2][0] := 1 while c[2][1][0] stays 0
        c[(3 + 2) * 3] = 1.0;
        let a = StructureConstants::new(presets::labels(3), c).unwrap();
        let v = a.validate();
        assert!(v.contains(&Violation::Commutativity { i: 1, j: 2, k: 0, defect: 1.0 }));
    }

    #[test]
    fn split_algebra_is_not_local() {
        // R ⊕ R with e1 idempotent
        let a = StructureConstants::from_fn(presets::labels(2), |i, j, k| match (i, j, k) {
            (0, j, k) | (j, 0, k) if j == k => 1.0,
            (1, 1, 1) => 1.0,
            _ => 0.0,
        })
        .unwrap();
        assert!(a.validate().iter().any(|v| matches!(v, Violation::Locality { radical_dim: 0, expected: 1 })));
        assert!(a.radical_basis().is_empty());
    }

    #[test]
    fn radical_examples() {
        assert_eq!(presets::dual().radical_basis(), vec![el(&[0.0, 1.0])]);
        assert_eq!(presets::square(2).unwrap().radical_basis(), vec![el(&[0., 1., 0.]), el(&[0., 0., 1.])]);
        assert!(presets::trunc(1).unwrap().radical_basis().is_empty());
    }

    #[test]
    fn real_and_radical_parts() {
        let a = el(&[0.5, -1.0, 4.0]);
        assert_eq!(a.real_part(), 0.5);
        assert_eq!(a.radical_part(), el(&[0.0, -1.0, 4.0]));
        let one = el(&[1.0, 0.0, 0.0]);
        assert_eq!((one.real_part(), one.radical_part()), (1.0, el(&[0.0, 0.0, 0.0])));
    }
}
