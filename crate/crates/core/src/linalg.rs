//! Dense linear-algebra helpers shared by the algebra and spectral code.
//!
//! Every subspace basis produced here is orthonormal in the ambient
//! coefficient space. A "canonical" basis is obtained by projecting the
//! coordinate axes onto the subspace and orthonormalising the projections,
//! at each step taking the axis with the largest remaining residual
//! (earliest axis on ties). Results are then reproducible and coincide with
//! coordinate axes whenever the subspace contains them.

use nalgebra::{DMatrix, DVector};

/// Modified Gram-Schmidt with one re-orthogonalisation pass.
///
/// A candidate is kept iff its residual against the current span exceeds
/// `tol * scale`. Returns the orthonormal vectors kept, in input order.
pub fn orthonormal_span(candidates: &[DVector<f64>], tol: f64, scale: f64) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in candidates {
        if let Some(q) = orthogonalize_against(&basis, v, tol * scale) {
            basis.push(q);
        }
    }
    basis
}

/// Residual of `v` against the orthonormal `basis`, normalised, or `None`
/// when the residual norm is at most `threshold`.
pub fn orthogonalize_against(basis: &[DVector<f64>], v: &DVector<f64>, threshold: f64) -> Option<DVector<f64>> {
    let mut r = v.clone();
    for _ in 0..2 {
        for q in basis {
            let c = q.dot(&r);
            r.axpy(-c, q, 1.0);
        }
    }
    let norm = r.norm();
    if norm > threshold && norm > 0.0 {
        Some(r / norm)
    } else {
        None
    }
}

/// Largest absolute entry over a set of vectors, at least 1.
pub fn scale_of(vectors: &[DVector<f64>]) -> f64 {
    vectors.iter().map(|v| v.amax()).fold(1.0_f64, f64::max)
}

/// Orthogonal projection of `v` onto the span of the orthonormal `basis`.
pub fn project(basis: &[DVector<f64>], v: &DVector<f64>) -> DVector<f64> {
    let mut p = DVector::zeros(v.len());
    for q in basis {
        p.axpy(q.dot(v), q, 1.0);
    }
    p
}

/// Canonical orthonormal basis of the span of the orthonormal `basis`.
pub fn canonicalize(basis: &[DVector<f64>], dim: usize) -> Vec<DVector<f64>> {
    if basis.is_empty() {
        return Vec::new();
    }
    let axes: Vec<DVector<f64>> =
        (0..dim).map(|i| project(basis, &DVector::from_fn(dim, |k, _| if k == i { 1.0 } else { 0.0 }))).collect();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(basis.len());
    let mut remaining: Vec<usize> = (0..dim).collect();
    while out.len() < basis.len() && !remaining.is_empty() {
        let mut best: Option<(usize, f64)> = None;
        for (pos, &i) in remaining.iter().enumerate() {
            let mut r = axes[i].clone();
            for q in &out {
                let c = q.dot(&r);
                r.axpy(-c, q, 1.0);
            }
            let nr = r.norm();
            match best {
                Some((_, bn)) if nr <= bn * (1.0 + 1e-9) => {}
                _ => best = Some((pos, nr)),
            }
        }
        let (pos, nr) = best.expect("non-empty");
        if nr < 1e-12 {
            break;
        }
        let i = remaining.remove(pos);
        match orthogonalize_against(&out, &axes[i], 1e-12) {
            Some(q) => out.push(fix_sign(q)),
            None => break,
        }
    }
    out
}

/// Flip `v` so that its first entry of largest magnitude is positive.
pub fn fix_sign(mut v: DVector<f64>) -> DVector<f64> {
    let amax = v.amax();
    if amax == 0.0 {
        return v;
    }
    let lead = v.iter().position(|x| x.abs() >= amax * (1.0 - 1e-9)).unwrap_or(0);
    if v[lead] < 0.0 {
        v.neg_mut();
    }
    v
}

/// Singular values and right singular vectors (as columns of `V`) of `mat`,
/// padding with zero rows so that `V` spans the full column space.
pub fn full_right_svd(mat: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (r, c) = mat.shape();
    if c == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let padded = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.rows_mut(0, r).copy_from(mat);
        p
    } else {
        mat.clone()
    };
    let svd = padded.svd(false, true);
    let v = svd.v_t.expect("v_t requested").transpose();
    (svd.singular_values.iter().copied().collect(), v)
}

/// Orthonormal basis of the kernel of `mat`: right singular directions with
/// singular value at most `rtol` times the largest one. A zero matrix has
/// the whole space as kernel.
pub fn kernel(mat: &DMatrix<f64>, rtol: f64) -> Vec<DVector<f64>> {
    let c = mat.ncols();
    if c == 0 {
        return Vec::new();
    }
    if mat.nrows() == 0 || mat.amax() == 0.0 {
        return (0..c).map(|i| DVector::from_fn(c, |k, _| if k == i { 1.0 } else { 0.0 })).collect();
    }
    let (sv, v) = full_right_svd(mat);
    let smax = sv.iter().copied().fold(0.0_f64, f64::max);
    let raw: Vec<DVector<f64>> =
        sv.iter().enumerate().filter(|(_, &s)| s <= rtol * smax).map(|(i, _)| v.column(i).into_owned()).collect();
    canonicalize(&raw, c)
}

/// Numerical rank of `mat`: singular values above `tol * max(σ_max, floor)`.
pub fn rank(mat: &DMatrix<f64>, tol: f64, floor: f64) -> usize {
    if mat.nrows() == 0 || mat.ncols() == 0 {
        return 0;
    }
    let sv = mat.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0_f64, f64::max);
    let cut = tol * smax.max(floor);
    sv.iter().filter(|&&s| s > cut).count()
}

/// Stack vectors as the columns of a matrix.
pub fn columns(vectors: &[DVector<f64>], dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

/// Minimum-norm least-squares solution of `a x = b` with singular values
/// below `rtol * σ_max` discarded.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>, rtol: f64) -> DVector<f64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = (rtol * smax).max(f64::MIN_POSITIVE);
    svd.solve(b, eps).expect("both factors computed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_zero_matrix_is_everything() {
        let k = kernel(&DMatrix::zeros(2, 3), 1e-9);
        assert_eq!(k.len(), 3);
    }

    #[test]
    fn kernel_is_canonical() {
        // kernel of [1 0 0] is span{e1, e2}; canonical basis recovers the axes
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        let k = kernel(&m, 1e-9);
        assert_eq!(k.len(), 2);
        assert!((k[0][1] - 1.0).abs() < 1e-12 && k[0][2].abs() < 1e-12);
        assert!((k[1][2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn span_drops_dependent_vectors() {
        let a = DVector::from_vec(vec![1.0, 1.0]);
        let b = DVector::from_vec(vec![2.0, 2.0]);
        let c = DVector::from_vec(vec![0.0, 1.0]);
        let s = orthonormal_span(&[a, b, c], 1e-9, 1.0);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn rank_with_floor_ignores_noise() {
        let m = DMatrix::from_row_slice(2, 2, &[1e-17, 0.0, 0.0, 0.0]);
        assert_eq!(rank(&m, 1e-8, 1.0), 0);
        assert_eq!(rank(&DMatrix::identity(3, 3), 1e-8, 1.0), 3);
    }
}
