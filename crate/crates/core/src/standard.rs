//! Radical filtration, standard (monomial) basis and socle of a local algebra.
//!
//! The standard basis is `{1} ∪ {selected monomials e_1^{s_1}···e_r^{s_r}}`
//! where `e_1..e_r` (the pseudobasis) span a complement of `rad²` in `rad`.
//! Monomials are tried by total degree, then in descending lexicographic
//! order of their exponent vectors, and kept iff they raise the rank of the
//! span built so far.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{AlgebraElement, AlgebraError, StructureConstants};
use crate::linalg;

/// Rank tolerance for monomial selection and filtration spans.
pub const SPAN_TOL: f64 = 1e-9;
/// Structure constants below this fraction of the largest one are zeroed
/// after the change to the standard basis.
const SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RadicalFiltration {
    /// Orthonormal bases of `rad, rad², ..., rad^nu = 0` (last entry empty).
    pub chain: Vec<Vec<AlgebraElement>>,
    /// Least `k` with `rad^k = 0`.
    pub nu: usize,
}

impl RadicalFiltration {
    pub fn dims(&self) -> Vec<usize> {
        self.chain.iter().map(Vec::len).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardBasisInfo {
    /// Columns are the standard basis elements in input coordinates.
    pub basis: DMatrix<f64>,
    /// Change of basis from input coordinates to standard coordinates.
    pub p: DMatrix<f64>,
    /// Standard indices `1..=r` of the pseudobasis.
    pub pseudobasis: Vec<usize>,
    /// `monomials[k - 1]` is the exponent vector of standard element `k`.
    pub monomials: Vec<Vec<u32>>,
    /// Standard indices of elements annihilating the radical.
    pub socle: Vec<usize>,
    /// Radical nilpotency index.
    pub nu: usize,
    /// Nilpotency index of every standard basis element (`None` for the unit).
    pub element_nilpotency: Vec<Option<usize>>,
    /// Labels of the standard basis.
    pub labels: Vec<String>,
}

impl StandardBasisInfo {
    /// Standard radical indices outside the socle (the ĕ_j).
    pub fn breve(&self) -> Vec<usize> {
        (1..self.basis.ncols()).filter(|k| !self.socle.contains(k)).collect()
    }

    pub fn exponent(&self, k: usize) -> Option<&[u32]> {
        k.checked_sub(1).and_then(|i| self.monomials.get(i)).map(Vec::as_slice)
    }

    pub fn to_standard(&self, a: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_dvector(&(&self.p * a.to_dvector()))
    }

    pub fn to_input(&self, a: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_dvector(&(&self.basis * a.to_dvector()))
    }
}

fn span_of_products(
    alg: &StructureConstants,
    left: &[AlgebraElement],
    right: &[AlgebraElement],
) -> Vec<AlgebraElement> {
    let mut prods = Vec::with_capacity(left.len() * right.len());
    for a in left {
        for b in right {
            prods.push(alg.mul_unchecked(a, b).to_dvector());
        }
    }
    let raw = linalg::orthonormal_span(&prods, SPAN_TOL, linalg::scale_of(&prods));
    linalg::canonicalize(&raw, alg.dim()).iter().map(AlgebraElement::from_dvector).collect()
}

/// `rad ⊇ rad² ⊇ ... ⊇ 0`, each power spanned by products of the previous
/// power with `rad`.
pub fn radical_filtration(alg: &StructureConstants) -> RadicalFiltration {
    let rad = alg.radical_basis();
    let mut chain = vec![rad.clone()];
    while !chain.last().expect("non-empty").is_empty() && chain.len() <= alg.dim() {
        let next = span_of_products(alg, chain.last().expect("non-empty"), &rad);
        chain.push(next);
    }
    let nu = chain.len();
    RadicalFiltration { chain, nu }
}

/// Exponent vectors of total degree `deg` in `r` variables, descending lex.
pub fn exponents_of_degree(r: usize, deg: u32) -> Vec<Vec<u32>> {
    fn rec(r: usize, deg: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == r {
            prefix.push(deg);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=deg).rev() {
            prefix.push(first);
            rec(r, deg - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if r > 0 {
        rec(r, deg, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

fn monomial(alg: &StructureConstants, gens: &[AlgebraElement], exps: &[u32]) -> AlgebraElement {
    let mut acc = alg.one();
    for (g, &s) in gens.iter().zip(exps) {
        for _ in 0..s {
            acc = alg.mul_unchecked(&acc, g);
        }
    }
    acc
}

/// Computes the standard basis of a valid local algebra.
pub fn standard_basis(alg: &StructureConstants) -> Result<StandardBasisInfo, AlgebraError> {
    let n = alg.dim();
    let filtration = radical_filtration(alg);
    let rad = &filtration.chain[0];
    let rad2: Vec<DVector<f64>> =
        filtration.chain.get(1).map(|c| c.iter().map(AlgebraElement::to_dvector).collect()).unwrap_or_default();

    // pseudobasis: complement of rad² inside rad
    let mut gens_v: Vec<DVector<f64>> = Vec::new();
    for v in rad.iter().map(AlgebraElement::to_dvector) {
        let mut against = rad2.clone();
        against.extend(gens_v.iter().cloned());
        if let Some(q) = linalg::orthogonalize_against(&against, &v, SPAN_TOL) {
            gens_v.push(linalg::fix_sign(q));
        }
    }
    let gens: Vec<AlgebraElement> = gens_v.iter().map(AlgebraElement::from_dvector).collect();
    let r = gens.len();

    // greedy monomial selection
    let mut span: Vec<DVector<f64>> = Vec::new();
    let mut selected: Vec<(Vec<u32>, AlgebraElement)> = Vec::new();
    'degrees: for deg in 1..filtration.nu.max(1) as u32 {
        for exps in exponents_of_degree(r, deg) {
            if selected.len() == rad.len() {
                break 'degrees;
            }
            let m = monomial(alg, &gens, &exps);
            let scale = m.norm_inf().max(1.0);
            if let Some(q) = linalg::orthogonalize_against(&span, &m.to_dvector(), SPAN_TOL * scale) {
                span.push(q);
                selected.push((exps, m));
            }
        }
    }
    if selected.len() != rad.len() || rad.len() + 1 != n {
        return Err(AlgebraError::SpanFailure { spanned: selected.len(), radical: n - 1 });
    }

    let mut basis = DMatrix::zeros(n, n);
    basis[(0, 0)] = 1.0;
    for (k, (_, m)) in selected.iter().enumerate() {
        basis.set_column(k + 1, &m.to_dvector());
    }
    let p = basis.clone().try_inverse().ok_or(AlgebraError::SpanFailure { spanned: 0, radical: n - 1 })?;

    let identity = (&basis - DMatrix::<f64>::identity(n, n)).amax() <= SNAP_TOL;
    let labels = if identity { alg.labels().to_vec() } else { crate::presets::labels(n) };
    let std_alg = alg.rebase(&basis, &p, labels.clone(), SNAP_TOL)?;

    let pseudobasis: Vec<usize> = (1..=r).collect();
    let socle = (1..n)
        .filter(|&k| {
            pseudobasis.iter().all(|&l| {
                let prod = std_alg.mul_unchecked(&AlgebraElement::basis(n, k), &AlgebraElement::basis(n, l));
                prod.norm_inf() <= 1e-12
            })
        })
        .collect();
    let element_nilpotency = (0..n).map(|k| std_alg.nilpotency_index(&AlgebraElement::basis(n, k))).collect();

    Ok(StandardBasisInfo {
        basis,
        p,
        pseudobasis,
        monomials: selected.into_iter().map(|(e, _)| e).collect(),
        socle,
        nu: filtration.nu,
        element_nilpotency,
        labels,
    })
}

/// Orthonormal basis of `{x ∈ rad : x·e = 0 for all e ∈ rad}`, the kernel of
/// the stacked multiplication maps restricted to the radical.
pub fn socle_basis(alg: &StructureConstants) -> Vec<AlgebraElement> {
    let n = alg.dim();
    let rad = alg.radical_basis();
    if rad.is_empty() {
        return Vec::new();
    }
    let basis = linalg::columns(&rad.iter().map(AlgebraElement::to_dvector).collect::<Vec<_>>(), n);
    let mut stacked = DMatrix::zeros(n * rad.len(), rad.len());
    for (l, e) in rad.iter().enumerate() {
        let block = alg.left_matrix(e) * &basis;
        stacked.view_mut((l * n, 0), (n, rad.len())).copy_from(&block);
    }
    let coords = linalg::kernel(&stacked, 1e-9);
    let vecs: Vec<DVector<f64>> = coords.iter().map(|y| &basis * y).collect();
    let raw = linalg::orthonormal_span(&vecs, 1e-9, 1.0);
    linalg::canonicalize(&raw, n).iter().map(AlgebraElement::from_dvector).collect()
}

/// A validated local algebra rebased to its standard basis.
#[derive(Debug, Clone)]
pub struct LocalAlgebra {
    pub input: StructureConstants,
    /// The algebra in standard coordinates.
    pub alg: StructureConstants,
    pub info: StandardBasisInfo,
}

impl LocalAlgebra {
    pub fn new(input: StructureConstants) -> Result<Self, AlgebraError> {
        let violations = input.validate();
        if !violations.is_empty() {
            return Err(AlgebraError::Invalid(violations));
        }
        let info = standard_basis(&input)?;
        let alg = input.rebase(&info.basis, &info.p, info.labels.clone(), SNAP_TOL)?;
        Ok(LocalAlgebra { input, alg, info })
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn nu(&self) -> usize {
        self.info.nu
    }

    /// Socle basis in standard coordinates.
    pub fn socle_basis(&self) -> Vec<AlgebraElement> {
        socle_basis(&self.alg)
    }

    pub fn labels(&self) -> &[String] {
        self.alg.labels()
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
    fn filtration_examples() {
        let f = radical_filtration(&presets::trunc(4).unwrap());
        assert_eq!((f.dims(), f.nu), (vec![3, 2, 1, 0], 4));
        let f = radical_filtration(&presets::square(2).unwrap());
        assert_eq!((f.dims(), f.nu), (vec![2, 0], 2));
        let f = radical_filtration(&presets::dual());
        assert_eq!((f.dims(), f.nu), (vec![1, 0], 2));
        let f = radical_filtration(&presets::trunc(1).unwrap());
        assert_eq!((f.dims(), f.nu), (vec![0], 1));
    }

    #[test]
    fn standard_basis_trunc3() {
        let info = standard_basis(&presets::trunc(3).unwrap()).unwrap();
        assert_eq!(info.pseudobasis, vec![1]);
        assert_eq!(info.monomials, vec![vec![1], vec![2]]);
        assert_eq!(info.socle, vec![2]);
        assert_eq!(info.nu, 3);
        assert_eq!(info.basis, DMatrix::identity(3, 3));
        assert_eq!(info.element_nilpotency, vec![None, Some(3), Some(2)]);
        assert_eq!(info.breve(), vec![1]);
    }

    #[test]
    fn standard_basis_square2_and_dual() {
        let info = standard_basis(&presets::square(2).unwrap()).unwrap();
        assert_eq!(info.pseudobasis, vec![1, 2]);
        assert_eq!(info.monomials, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(info.socle, vec![1, 2]);
        assert_eq!(info.nu, 2);
        let info = standard_basis(&presets::dual()).unwrap();
        assert_eq!((&info.pseudobasis, &info.socle), (&vec![1], &vec![1]));
        assert!(info.breve().is_empty());
    }

    #[test]
    fn socle_examples() {
        assert_eq!(socle_basis(&presets::trunc(4).unwrap()), vec![el(&[0., 0., 0., 1.])]);
        assert_eq!(socle_basis(&presets::square(2).unwrap()), vec![el(&[0., 1., 0.]), el(&[0., 0., 1.])]);
        assert_eq!(socle_basis(&presets::dual()), vec![el(&[0., 1.])]);
    }

    #[test]
    fn exponent_order_is_graded_descending_lex() {
        assert_eq!(exponents_of_degree(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(exponents_of_degree(3, 1), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn skewed_input_basis_is_rebased() {
        // trunc:3 written in the basis 1, a = ε + ε², b = ε − ε²
        let spec = "algebra n=3\nbasis 1 a b\nmul a a = 0.5*a - 0.5*b\n\
                    mul a b = 0.5*a - 0.5*b\nmul b b = 0.5*a - 0.5*b\n";
        let la = LocalAlgebra::new(presets::parse_spec(spec).unwrap()).unwrap();
        assert_eq!(la.info.socle, vec![2]);
        assert_eq!(la.info.monomials, vec![vec![1], vec![2]]);
        assert_eq!(la.nu(), 3);
        assert_eq!(la.labels(), presets::labels(3).as_slice());
        let t3 = presets::trunc(3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((la.alg.get(i, j, k) - t3.get(i, j, k)).abs() < 1e-12, "{i} {j} {k}");
                }
            }
        }
        // P maps the standard basis back to the unit vectors
        let back = &la.info.p * &la.info.basis;
        assert!((back - DMatrix::<f64>::identity(3, 3)).amax() < 1e-12);
    }

    #[test]
    fn non_local_is_rejected() {
        let split = presets::parse_spec("algebra n=2\nbasis 1 p\nmul p p = 1*p\n").unwrap();
        assert!(matches!(LocalAlgebra::new(split), Err(AlgebraError::Invalid(_))));
    }
}
