//! Prolongation of smooth real functions to A-differentiable functions.
//!
//! For `X = x + r` (real parts `x`, radical parts `r`) the lift of `g` is
//!
//! ```text
//! G(X) = g(x) + Σ_{1 ≤ |p| ≤ nu-1} (1/p!) · D^p g(x) · r^p
//! ```
//!
//! Terms with `|p| ≥ nu` vanish because `r^p ∈ rad^{|p|}`. Two routes are
//! provided: [`taylor_lift`] sums the series with symbolic derivatives, and
//! [`lift_eval`] evaluates the expression tree in algebra arithmetic, each
//! primitive being replaced by its own finite Taylor series.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::algebra::{AlgebraElement, AlgebraError};
use crate::expr::{Expr, ExprError};
use crate::standard::{exponents_of_degree, LocalAlgebra};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProlongError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("expression uses x{needed} but the point has {got} components")]
    Arity { needed: usize, got: usize },
}

/// A point of `A^m` in standard coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct APoint {
    pub components: Vec<AlgebraElement>,
}

impl APoint {
    pub fn new(components: Vec<AlgebraElement>) -> Self {
        APoint { components }
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.components.iter().map(AlgebraElement::real_part).collect()
    }

    /// Slot-major flattening: entry `j*n + i` is coefficient `i` of `X^{j+1}`.
    pub fn flatten(&self) -> Vec<f64> {
        self.components.iter().flat_map(|c| c.coeffs.iter().copied()).collect()
    }

    pub fn unflatten(values: &[f64], n: usize) -> APoint {
        APoint { components: values.chunks(n).map(|c| AlgebraElement::new(c.to_vec())).collect() }
    }
}

/// `p = (p_1..p_m)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| (1..=k).map(f64::from).product::<f64>()).product()
    }
}

/// All multi-indices with `1 ≤ |p| ≤ max_order`, graded, then descending lex.
pub fn multi_indices(m: usize, max_order: u32) -> Vec<MultiIndex> {
    (1..=max_order).flat_map(|d| exponents_of_degree(m, d)).map(MultiIndex).collect()
}

/// Precomputed derivative table for repeated lifting of one expression.
#[derive(Debug, Clone)]
pub struct Prolongation {
    m: usize,
    base: Expr,
    terms: Vec<(MultiIndex, f64, Expr)>,
}

impl Prolongation {
    pub fn new(e: &Expr, m: usize, nu: usize) -> Result<Self, ProlongError> {
        if e.max_var() > m {
            return Err(ProlongError::Arity { needed: e.max_var(), got: m });
        }
        let max_order = nu.saturating_sub(1) as u32;
        let mut terms = Vec::new();
        // Build D^p from a lower-order derivative already in the table.
        let mut table: Vec<(MultiIndex, Expr)> = Vec::new();
        for p in multi_indices(m, max_order) {
            let j = p.0.iter().position(|&k| k > 0).expect("|p| >= 1");
            let mut prev = p.0.clone();
            prev[j] -= 1;
            let lower = if prev.iter().all(|&k| k == 0) {
                e.clone()
            } else {
                table.iter().find(|(q, _)| q.0 == prev).expect("graded order").1.clone()
            };
            let d = lower.diff(j + 1);
            table.push((p.clone(), d.clone()));
            let inv_fact = 1.0 / p.factorial();
            terms.push((p, inv_fact, d));
        }
        Ok(Prolongation { m, base: e.clone(), terms })
    }

    pub fn lift(&self, x: &APoint, la: &LocalAlgebra) -> Result<AlgebraElement, ProlongError> {
        if x.m() != self.m {
            return Err(ProlongError::Arity { needed: self.m, got: x.m() });
        }
        let n = la.dim();
        for c in &x.components {
            if c.dim() != n {
                return Err(AlgebraError::DimensionMismatch { expected: n, got: c.dim() }.into());
            }
        }
        let alg = &la.alg;
        let real = x.real_parts();
        let g0 = self.base.eval(&real)?;
        let max_order = la.nu().saturating_sub(1);
        // powers[j][q] = r_j^q
        let powers: Vec<Vec<AlgebraElement>> = x
            .components
            .iter()
            .map(|c| {
                let r = c.radical_part();
                let mut out = vec![alg.one()];
                for q in 1..=max_order {
                    out.push(alg.mul_unchecked(&out[q - 1], &r));
                }
                out
            })
            .collect();
        let mut acc = AlgebraElement::zero(n);
        for (p, inv_fact, d) in &self.terms {
            let coef = d.eval(&real)? * inv_fact;
            let mut mono = alg.one();
            for (j, &k) in p.0.iter().enumerate() {
                if k > 0 {
                    mono = alg.mul_unchecked(&mono, &powers[j][k as usize]);
                }
            }
            acc = &acc + &mono.scale(coef);
        }
        acc.coeffs[0] = g0;
        Ok(acc)
    }
}

/// Sums the prolongation series with symbolic mixed partials.
pub fn taylor_lift(e: &Expr, x: &APoint, la: &LocalAlgebra) -> Result<AlgebraElement, ProlongError> {
    Prolongation::new(e, x.m(), la.nu())?.lift(x, la)
}

/// Evaluates the expression tree in algebra arithmetic.
pub fn lift_eval(e: &Expr, x: &APoint, la: &LocalAlgebra) -> Result<AlgebraElement, ProlongError> {
    if e.max_var() > x.m() {
        return Err(ProlongError::Arity { needed: e.max_var(), got: x.m() });
    }
    let alg = &la.alg;
    let n = la.dim();
    Ok(match e {
        Expr::Const(c) => AlgebraElement::scalar(n, *c),
        Expr::Var(j) => x.components[j - 1].clone(),
        Expr::Add(a, b) => &lift_eval(a, x, la)? + &lift_eval(b, x, la)?,
        Expr::Sub(a, b) => &lift_eval(a, x, la)? - &lift_eval(b, x, la)?,
        Expr::Mul(a, b) => alg.mul(&lift_eval(a, x, la)?, &lift_eval(b, x, la)?)?,
        Expr::Div(a, b) => {
            let den = alg.invert(&lift_eval(b, x, la)?)?;
            alg.mul(&lift_eval(a, x, la)?, &den)?
        }
        Expr::IntPow(a, k) => alg.pow(&lift_eval(a, x, la)?, *k)?,
        Expr::Call(f, a) => {
            let v = lift_eval(a, x, la)?;
            let c = v.real_part();
            let r = v.radical_part();
            let mut acc = AlgebraElement::zero(n);
            let mut rk = alg.one();
            let mut fact = 1.0;
            for k in 0..la.nu().max(1) {
                if k > 0 {
                    rk = alg.mul_unchecked(&rk, &r);
                    fact *= k as f64;
                }
                acc = &acc + &rk.scale(f.derivative(k, c)? / fact);
            }
            acc
        }
    })
}

/// The lift of `e` as a map on slot-major flattened points.
pub fn lifted_map<'a>(
    e: &'a Expr,
    la: &'a LocalAlgebra,
    m: usize,
) -> Result<impl Fn(&[f64]) -> Result<Vec<f64>, ProlongError> + 'a, ProlongError> {
    let pro = Prolongation::new(e, m, la.nu())?;
    Ok(move |v: &[f64]| pro.lift(&APoint::unflatten(v, la.dim()), la).map(|a| a.coeffs))
}

/// Central-difference Jacobian of `f` at `at`.
pub fn numerical_jacobian<E>(
    f: &impl Fn(&[f64]) -> Result<Vec<f64>, E>,
    at: &[f64],
    h: f64,
) -> Result<DMatrix<f64>, E> {
    let mut cols = Vec::with_capacity(at.len());
    let mut p = at.to_vec();
    for k in 0..at.len() {
        p[k] = at[k] + h;
        let fp = f(&p)?;
        p[k] = at[k] - h;
        let fm = f(&p)?;
        p[k] = at[k];
        cols.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
    }
    let rows = cols.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows, at.len(), |i, k| cols[k][i]))
}

/// Largest commutator entry `|J_j L_{e_i} − L_{e_i} J_j|` over slots `j` and
/// standard basis elements `e_i`, with `J` the central-difference Jacobian of
/// `f: R^{n·m} → R^n` at `x`. Zero iff the differential is A-linear.
pub fn adiff_defect<E>(
    f: impl Fn(&[f64]) -> Result<Vec<f64>, E>,
    x: &APoint,
    la: &LocalAlgebra,
    h: f64,
) -> Result<f64, E> {
    let n = la.dim();
    let jac = numerical_jacobian(&f, &x.flatten(), h)?;
    let ls = la.alg.basis_matrices();
    let mut worst = 0.0_f64;
    for j in 0..x.m() {
        let block = jac.columns(j * n, n).into_owned();
        for l in ls.iter().skip(1) {
            let comm = &block * l - l * &block;
            worst = worst.max(comm.amax());
        }
    }
    Ok(worst)
}

/// `|G^1 − Σ_j ∂g/∂x^j(x) · x^{j,1}|`, where `G^1` is the `e_1` coefficient of
/// the lift and `x^{j,1}` the `e_1` coefficient of `X^j`. Zero for the lift
/// because higher products of radical parts lie in `rad²`, which has no
/// `e_1` component in the standard basis.
pub fn e1_component_identity(e: &Expr, x: &APoint, la: &LocalAlgebra) -> Result<f64, ProlongError> {
    if la.dim() < 2 {
        return Ok(0.0);
    }
    let lifted = taylor_lift(e, x, la)?;
    let real = x.real_parts();
    let mut linear = 0.0;
    for (j, c) in x.components.iter().enumerate() {
        linear += e.diff(j + 1).eval(&real)? * c.coeffs[1];
    }
    Ok((lifted.coeffs[1] - linear).abs())
}

/// Negates every radical coordinate of every slot; not A-differentiable.
pub fn radical_negation(n: usize) -> impl Fn(&[f64]) -> Result<Vec<f64>, ProlongError> {
    move |v: &[f64]| Ok(v[..n].iter().enumerate().map(|(i, &x)| if i == 0 { x } else { -x }).collect())
}
