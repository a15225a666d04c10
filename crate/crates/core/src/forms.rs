//! A-valued 1-forms `ω = Σ_α ω_α dθ^α` with trigonometric-polynomial
//! coefficients on A-tori: A-linearity and closedness constraints, the
//! component spaces of closed A-differentiable forms, and the mean-class map.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::constraints::{solve_nullspace, ConstraintError, ConstraintSystem, Layout, Nullspace};
use crate::linalg;
use crate::spectral::{function_solutions, SolveOptions, TorusConfig};
use crate::standard::StandardBasisInfo;

/// Rank cut for component spaces, relative to `max(σ_max, 1)`.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormsError {
    #[error("index {0} is the unit or lies in the socle")]
    IndexNotBreve(usize),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

/// `ω_α` for `α = field`, component `comp`, is `layout.slice(coeffs, α, comp)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AForm1 {
    pub layout: Layout,
    pub coeffs: Vec<f64>,
}

impl AForm1 {
    pub fn zero(layout: Layout) -> Self {
        let coeffs = vec![0.0; layout.n_cols()];
        AForm1 { layout, coeffs }
    }

    pub fn coefficient(&self, alpha: usize, comp: usize) -> &[f64] {
        self.layout.slice(&self.coeffs, alpha, comp)
    }

    pub fn coefficient_mut(&mut self, alpha: usize, comp: usize) -> &mut [f64] {
        let start = self.layout.col(alpha, comp, 0);
        let b = self.layout.b();
        &mut self.coeffs[start..start + b]
    }
}

/// `(dω)_{αβ} = ∂_α ω_β − ∂_β ω_α` for `α < β`, one entry per pair and
/// component: `out[pair][comp]` with pairs in lexicographic order.
pub fn exterior_derivative(w: &AForm1) -> Vec<Vec<Vec<f64>>> {
    let space = &w.layout.space;
    let big_n = w.layout.fields;
    let mut out = Vec::new();
    for a in 0..big_n {
        for b in a + 1..big_n {
            let per_comp = (0..w.layout.components)
                .map(|i| {
                    let mut d = space.differentiate(w.coefficient(b, i), a);
                    for (x, y) in d.iter_mut().zip(space.differentiate(w.coefficient(a, i), b)) {
                        *x -= y;
                    }
                    d
                })
                .collect();
            out.push(per_comp);
        }
    }
    out
}

/// `dG` of a function coefficient vector (one field) as a form.
pub fn differential(g: &[f64], func_layout: &Layout) -> AForm1 {
    let big_n = func_layout.space.dims();
    let layout = Layout { space: func_layout.space.clone(), components: func_layout.components, fields: big_n };
    let mut w = AForm1::zero(layout);
    for alpha in 0..big_n {
        for i in 0..func_layout.components {
            let d = func_layout.space.differentiate(func_layout.slice(g, 0, i), alpha);
            w.coefficient_mut(alpha, i).copy_from_slice(&d);
        }
    }
    w
}

/// Matrix of `G ↦ dG` from function coefficients to form coefficients.
pub fn differential_matrix(func_layout: &Layout) -> DMatrix<f64> {
    let big_n = func_layout.space.dims();
    let form = Layout { space: func_layout.space.clone(), components: func_layout.components, fields: big_n };
    let mut m = DMatrix::zeros(form.n_cols(), func_layout.n_cols());
    for i in 0..func_layout.components {
        for t in 0..func_layout.b() {
            for alpha in 0..big_n {
                if let Some((u, f)) = func_layout.space.derivative(t, alpha) {
                    m[(form.col(alpha, i, u), func_layout.col(0, i, t))] += f;
                }
            }
        }
    }
    m
}

/// Rows `a_linear`: for every slot `j`, radical basis element `e_a` and trig
/// index, the block `W_j[i][b] = ω^i_{x^{j,b}}` commutes with `L_{e_a}`.
/// Rows `closed`: `dω = 0` coefficient-wise.
pub fn assemble_form_constraints(
    cfg: &TorusConfig,
    degree: u32,
    cap: usize,
) -> Result<ConstraintSystem, ConstraintError> {
    let n = cfg.n();
    let big_n = cfg.dims();
    let layout = Layout::checked(big_n, degree, n, big_n, cap)?;
    let big_b = layout.b();
    let alg = &cfg.la.alg;
    let mut sys = ConstraintSystem::new(layout);
    sys.begin_group("a_linear");
    for j in 0..cfg.m {
        for a in 1..n {
            for i in 0..n {
                for c in 0..n {
                    for t in 0..big_b {
                        let mut row = Vec::new();
                        for b in 0..n {
                            let lbc = alg.get(a, c, b);
                            if lbc != 0.0 {
                                row.push((sys.layout.col(cfg.coord(j, b), i, t), lbc));
                            }
                            let lib = alg.get(a, b, i);
                            if lib != 0.0 {
                                row.push((sys.layout.col(cfg.coord(j, c), b, t), -lib));
                            }
                        }
                        sys.push_row(row);
                    }
                }
            }
        }
    }
    sys.begin_group("closed");
    for alpha in 0..big_n {
        for beta in alpha + 1..big_n {
            for i in 0..n {
                for target in 0..big_b {
                    let mut row = Vec::new();
                    if let Some((t, f)) = sys.layout.space.derivative_source(target, alpha) {
                        row.push((sys.layout.col(beta, i, t), f));
                    }
                    if let Some((t, f)) = sys.layout.space.derivative_source(target, beta) {
                        row.push((sys.layout.col(alpha, i, t), -f));
                    }
                    sys.push_row(row);
                }
            }
        }
    }
    Ok(sys.finish())
}

pub fn form_solutions(
    cfg: &TorusConfig,
    degree: u32,
    opts: SolveOptions,
) -> Result<(ConstraintSystem, Nullspace), ConstraintError> {
    let sys = assemble_form_constraints(cfg, degree, opts.cap)?;
    let ns = solve_nullspace(&sys, opts.null_tol);
    Ok((sys, ns))
}

/// All coefficients of component `comp` across every field.
fn component_vector(v: &[f64], layout: &Layout, comp: usize) -> DVector<f64> {
    let b = layout.b();
    let mut out = DVector::zeros(layout.fields * b);
    for f in 0..layout.fields {
        out.rows_mut(f * b, b).copy_from_slice(layout.slice(v, f, comp));
    }
    out
}

/// Rank of the `ĕ_{j0}` components of `solutions` (forms or functions).
pub fn component_space_dim(
    solutions: &[Vec<f64>],
    layout: &Layout,
    j0: usize,
    info: &StandardBasisInfo,
    tol: f64,
) -> Result<usize, FormsError> {
    if !info.breve().contains(&j0) {
        return Err(FormsError::IndexNotBreve(j0));
    }
    if solutions.is_empty() {
        return Ok(0);
    }
    let vecs: Vec<_> = solutions.iter().map(|v| component_vector(v, layout, j0)).collect();
    Ok(linalg::rank(&linalg::columns(&vecs, layout.fields * layout.b()), tol, 1.0))
}

#[derive(Debug, Clone)]
pub struct CohomologyReport {
    pub degree: u32,
    pub dim_solutions: usize,
    /// `(ĕ index, label, dim)` for every non-socle radical index.
    pub component_dims: Vec<(usize, String, usize)>,
    /// `n · N`.
    pub bound: usize,
    /// `(ĕ index, dim)` of the same components of function solutions.
    pub function_component_dims: Vec<(usize, usize)>,
    /// Dimension of A-differentiable functions with `dG = 0`.
    pub dim_h0: usize,
    pub n: usize,
    /// Component dims at `degree − 1` equal those at `degree`
    /// (`None` at degree 0).
    pub stabilized: Option<bool>,
}

impl CohomologyReport {
    pub fn bound_holds(&self) -> bool {
        self.component_dims.iter().all(|c| c.2 <= self.bound)
    }

    pub fn degree0_holds(&self) -> bool {
        self.function_component_dims.iter().all(|c| c.1 == 1)
    }

    pub fn h0_holds(&self) -> bool {
        self.dim_h0 == self.n
    }

    pub fn vacuous(&self) -> bool {
        self.component_dims.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.bound_holds() && self.degree0_holds() && self.h0_holds()
    }
}

fn breve_dims(
    cfg: &TorusConfig,
    solutions: &[Vec<f64>],
    layout: &Layout,
) -> Result<Vec<(usize, String, usize)>, FormsError> {
    let info = &cfg.la.info;
    info.breve()
        .into_iter()
        .map(|j| Ok((j, info.labels[j].clone(), component_space_dim(solutions, layout, j, info, RANK_TOL)?)))
        .collect()
}

/// Component dims of closed A-differentiable forms against `n·N`, the
/// degree-0 step on function solutions, and `dim H⁰`.
pub fn verify_component_bounds(
    cfg: &TorusConfig,
    degree: u32,
    opts: SolveOptions,
) -> Result<CohomologyReport, FormsError> {
    let (sys, ns) = form_solutions(cfg, degree, opts)?;
    let component_dims = breve_dims(cfg, &ns.basis, &sys.layout)?;
    let stabilized = if degree == 0 {
        None
    } else {
        let (psys, pns) = form_solutions(cfg, degree - 1, opts)?;
        let prev = breve_dims(cfg, &pns.basis, &psys.layout)?;
        Some(prev.iter().zip(&component_dims).all(|(p, c)| p.2 == c.2))
    };

    let (fsys, fns) = function_solutions(cfg, degree, opts)?;
    let info = &cfg.la.info;
    let function_component_dims = info
        .breve()
        .into_iter()
        .map(|j| Ok((j, component_space_dim(&fns.basis, &fsys.layout, j, info, RANK_TOL)?)))
        .collect::<Result<Vec<_>, FormsError>>()?;
    let dim_h0 = if fns.dim() == 0 {
        0
    } else {
        let df = differential_matrix(&fsys.layout) * function_basis_matrix(&fns.basis);
        fns.dim() - linalg::rank(&df, RANK_TOL, 1.0)
    };
    Ok(CohomologyReport {
        degree,
        dim_solutions: ns.dim(),
        component_dims,
        bound: cfg.n() * cfg.dims(),
        function_component_dims,
        dim_h0,
        n: cfg.n(),
        stabilized,
    })
}

fn function_basis_matrix(basis: &[Vec<f64>]) -> DMatrix<f64> {
    let rows = basis.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, basis.len(), |r, c| basis[c][r])
}

#[derive(Debug, Clone)]
pub struct InjectivityReport {
    pub dim_solutions: usize,
    /// Rank of the mean-class map on the solutions.
    pub class_rank: usize,
    /// Dimension of the zero-mean subspace.
    pub zero_mean_dim: usize,
    /// Worst `‖dG − ω‖∞` over a basis of the zero-mean subspace.
    pub worst_residual: f64,
    pub tol: f64,
}

impl InjectivityReport {
    pub fn passed(&self) -> bool {
        self.worst_residual <= self.tol
    }
}

/// Mean coefficients of every `ω^i_α`, i.e. the class in `A ⊗ H¹(T^N)`.
pub fn mean_class(v: &[f64], layout: &Layout) -> DVector<f64> {
    DVector::from_fn(layout.fields * layout.components, |k, _| {
        v[layout.col(k / layout.components, k % layout.components, 0)]
    })
}

/// Every zero-mean closed A-differentiable form is `dG` for an
/// A-differentiable function `G` of the same degree.
pub fn verify_injectivity(
    cfg: &TorusConfig,
    degree: u32,
    opts: SolveOptions,
    tol: f64,
) -> Result<InjectivityReport, FormsError> {
    let (sys, ns) = form_solutions(cfg, degree, opts)?;
    let (fsys, fns) = function_solutions(cfg, degree, opts)?;
    let layout = &sys.layout;
    let k = ns.dim();
    let classes: Vec<_> = ns.basis.iter().map(|v| mean_class(v, layout)).collect();
    let class_dim = layout.fields * layout.components;
    let class_mat = linalg::columns(&classes, class_dim);
    let class_rank = linalg::rank(&class_mat, RANK_TOL, 1.0);
    let zero_mean: Vec<DVector<f64>> = if k == 0 {
        Vec::new()
    } else {
        let combos = linalg::kernel(&class_mat, RANK_TOL);
        let basis = function_basis_matrix(&ns.basis);
        combos.iter().map(|c| &basis * c).collect()
    };
    let df = differential_matrix(&fsys.layout) * function_basis_matrix(&fns.basis);
    let mut worst = 0.0_f64;
    for w in &zero_mean {
        let r = if df.ncols() == 0 {
            w.amax()
        } else {
            let c = linalg::least_squares(&df, w, 1e-12);
            (&df * c - w).amax()
        };
        worst = worst.max(r);
    }
    Ok(InjectivityReport { dim_solutions: k, class_rank, zero_mean_dim: zero_mean.len(), worst_residual: worst, tol })
}
