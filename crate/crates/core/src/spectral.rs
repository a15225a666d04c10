//! A-differentiable functions on the A-torus `A^m / (2πZ)^{n·m}` as the
//! nullspace of a linear system on trigonometric coefficients, and checks of
//! the structure of that nullspace.
//!
//! Torus coordinates are ordered `x^{1,0}..x^{m,0}, x^{1,1}..x^{m,1}, ...`,
//! so coordinate `b·m + j` is component `b` of slot `j`. The first `m`
//! coordinates (the real parts) are transversal to the canonical foliation;
//! a leaf is the sub-torus on which they are fixed.

use std::f64::consts::PI;

use crate::algebra::AlgebraElement;
use crate::constraints::{solve_nullspace, ConstraintError, ConstraintSystem, Layout, Nullspace};
use crate::linalg;
use crate::prolong::{adiff_defect, APoint};
use crate::standard::LocalAlgebra;

/// Samples per non-transversal coordinate when scanning a leaf.
pub const LEAF_SAMPLES: usize = 4;

#[derive(Debug, Clone)]
pub struct TorusConfig {
    pub la: LocalAlgebra,
    pub m: usize,
}

impl TorusConfig {
    pub fn new(la: LocalAlgebra, m: usize) -> Self {
        assert!(m > 0, "an A-torus needs at least one slot");
        TorusConfig { la, m }
    }

    pub fn n(&self) -> usize {
        self.la.dim()
    }

    /// Real dimension `N = n·m`.
    pub fn dims(&self) -> usize {
        self.n() * self.m
    }

    #[inline]
    pub fn coord(&self, slot: usize, comp: usize) -> usize {
        comp * self.m + slot
    }

    /// Torus point `θ` as a point of `A^m`.
    pub fn to_apoint(&self, theta: &[f64]) -> APoint {
        let n = self.n();
        APoint::new(
            (0..self.m).map(|j| AlgebraElement::new((0..n).map(|b| theta[self.coord(j, b)]).collect())).collect(),
        )
    }

    pub fn from_apoint(&self, x: &APoint) -> Vec<f64> {
        let mut theta = vec![0.0; self.dims()];
        for (j, c) in x.components.iter().enumerate() {
            for (b, &v) in c.coeffs.iter().enumerate() {
                theta[self.coord(j, b)] = v;
            }
        }
        theta
    }
}

/// Options shared by the assembly and verification entry points.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub null_tol: f64,
    pub cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { null_tol: crate::constraints::DEFAULT_NULL_TOL, cap: crate::constraints::DEFAULT_SIZE_CAP }
    }
}

/// Rows `J_j L_{e_a} − L_{e_a} J_j = 0` for every slot `j`, radical basis
/// element `e_a`, matrix entry and output trig basis function, where
/// `(J_j)_{i,b} = ∂g^i/∂x^{j,b}`.
pub fn assemble_function_constraints(
    cfg: &TorusConfig,
    degree: u32,
    cap: usize,
) -> Result<ConstraintSystem, ConstraintError> {
    let n = cfg.n();
    let layout = Layout::checked(cfg.dims(), degree, n, 1, cap)?;
    let big_b = layout.b();
    let alg = &cfg.la.alg;
    let mut sys = ConstraintSystem::new(layout);
    sys.begin_group("a_linear");
    for j in 0..cfg.m {
        for a in 1..n {
            for i in 0..n {
                for c in 0..n {
                    for target in 0..big_b {
                        let mut row = Vec::new();
                        for b in 0..n {
                            // (J_j)_{i,b} (L_a)_{b,c}
                            let lac = alg.get(a, c, b);
                            if lac != 0.0 {
                                if let Some((t, f)) = sys.layout.space.derivative_source(target, cfg.coord(j, b)) {
                                    row.push((sys.layout.col(0, i, t), lac * f));
                                }
                            }
                            // (L_a)_{i,b} (J_j)_{b,c}
                            let lib = alg.get(a, b, i);
                            if lib != 0.0 {
                                if let Some((t, f)) = sys.layout.space.derivative_source(target, cfg.coord(j, c)) {
                                    row.push((sys.layout.col(0, b, t), -lib * f));
                                }
                            }
                        }
                        sys.push_row(row);
                    }
                }
            }
        }
    }
    Ok(sys.finish())
}

/// Assembles and solves the function system.
pub fn function_solutions(
    cfg: &TorusConfig,
    degree: u32,
    opts: SolveOptions,
) -> Result<(ConstraintSystem, Nullspace), ConstraintError> {
    let sys = assemble_function_constraints(cfg, degree, opts.cap)?;
    let ns = solve_nullspace(&sys, opts.null_tol);
    Ok((sys, ns))
}

/// A coefficient flagged by a structural check.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralViolation {
    pub solution: usize,
    pub component: usize,
    pub frequency: Vec<i32>,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct ConstancyReport {
    pub solutions: usize,
    /// Largest ℓ² norm of the non-constant coefficients of the real part.
    pub real_part_mass: f64,
    /// Largest ℓ² norm of the `e_1` coefficients on non-transversal frequencies.
    pub e1_nonbasic_mass: f64,
    pub real_part_violations: Vec<SpectralViolation>,
    pub e1_violations: Vec<SpectralViolation>,
    pub tol: f64,
}

impl ConstancyReport {
    pub fn real_part_constant(&self) -> bool {
        self.real_part_mass <= self.tol
    }

    pub fn e1_basic(&self) -> bool {
        self.e1_nonbasic_mass <= self.tol
    }

    pub fn passed(&self) -> bool {
        self.real_part_constant() && self.e1_basic()
    }
}

/// For every solution: (a) the real part has no non-constant coefficient;
/// (b) the `e_1` component only uses frequencies with zero entries on the
/// non-transversal coordinates.
pub fn verify_constancy(solutions: &[Vec<f64>], layout: &Layout, cfg: &TorusConfig, tol: f64) -> ConstancyReport {
    let space = &layout.space;
    let mut report = ConstancyReport {
        solutions: solutions.len(),
        real_part_mass: 0.0,
        e1_nonbasic_mass: 0.0,
        real_part_violations: Vec::new(),
        e1_violations: Vec::new(),
        tol,
    };
    for (s, v) in solutions.iter().enumerate() {
        let g = layout.slice(v, 0, 0);
        let mut mass = 0.0;
        for (t, &c) in g.iter().enumerate().skip(1) {
            mass += c * c;
            if c.abs() > tol {
                report.real_part_violations.push(SpectralViolation {
                    solution: s,
                    component: 0,
                    frequency: space.frequency(t),
                    value: c,
                });
            }
        }
        report.real_part_mass = report.real_part_mass.max(mass.sqrt());
        if cfg.n() < 2 {
            continue;
        }
        let g1 = layout.slice(v, 0, 1);
        let mut mass = 0.0;
        for (t, &c) in g1.iter().enumerate() {
            if space.is_transversal(t, cfg.m) {
                continue;
            }
            mass += c * c;
            if c.abs() > tol {
                report.e1_violations.push(SpectralViolation {
                    solution: s,
                    component: 1,
                    frequency: space.frequency(t),
                    value: c,
                });
            }
        }
        report.e1_nonbasic_mass = report.e1_nonbasic_mass.max(mass.sqrt());
    }
    report
}

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub solutions: usize,
    /// Largest ℓ² mass of non-constant coefficients outside
    /// `socle ⊗ (transversal frequencies)`.
    pub max_residual: f64,
    pub violations: Vec<SpectralViolation>,
    pub tol: f64,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tol
    }
}

/// Checks `G = a + Σ_k f^k ẽ_k` with basic `f^k`: for every non-constant
/// trig index the A-valued coefficient must lie in the socle, and must vanish
/// unless the frequency is transversal. `socle` is orthonormal in standard
/// coordinates.
pub fn verify_socle_decomposition(
    solutions: &[Vec<f64>],
    layout: &Layout,
    cfg: &TorusConfig,
    socle: &[AlgebraElement],
    tol: f64,
) -> DecompositionReport {
    let n = cfg.n();
    let socle_v: Vec<_> = socle.iter().map(AlgebraElement::to_dvector).collect();
    let mut report = DecompositionReport { solutions: solutions.len(), max_residual: 0.0, violations: Vec::new(), tol };
    for (s, v) in solutions.iter().enumerate() {
        let mut mass = 0.0;
        for t in 1..layout.b() {
            let coef = nalgebra::DVector::from_fn(n, |i, _| v[layout.col(0, i, t)]);
            let outside =
                if layout.space.is_transversal(t, cfg.m) { &coef - linalg::project(&socle_v, &coef) } else { coef };
            let o = outside.norm_squared();
            mass += o;
            if o.sqrt() > tol {
                let component = outside.iamax();
                report.violations.push(SpectralViolation {
                    solution: s,
                    component,
                    frequency: layout.space.frequency(t),
                    value: outside[component],
                });
            }
        }
        report.max_residual = report.max_residual.max(mass.sqrt());
    }
    report
}

/// Largest system residual over the unit vectors of the constant functions.
pub fn constants_residual(sys: &ConstraintSystem) -> f64 {
    let layout = &sys.layout;
    (0..layout.components)
        .map(|i| {
            let mut v = vec![0.0; layout.n_cols()];
            v[layout.col(0, i, 0)] = 1.0;
            sys.residual(&v)
        })
        .fold(0.0, f64::max)
}

/// Largest system residual of `φ_t · ẽ` over transversal trig basis
/// functions `φ_t` and socle elements `ẽ`.
pub fn socle_embedding_residual(sys: &ConstraintSystem, cfg: &TorusConfig, socle: &[AlgebraElement]) -> f64 {
    let layout = &sys.layout;
    let mut worst = 0.0_f64;
    for t in 0..layout.b() {
        if !layout.space.is_transversal(t, cfg.m) {
            continue;
        }
        for e in socle {
            let mut v = vec![0.0; layout.n_cols()];
            for (i, &c) in e.coeffs.iter().enumerate() {
                v[layout.col(0, i, t)] = c;
            }
            worst = worst.max(sys.residual(&v));
        }
    }
    worst
}

#[derive(Debug, Clone)]
pub struct MinLeafReport {
    /// Transversal grid index of the leaf minimising the leaf average of `g¹`.
    pub leaf: Vec<usize>,
    pub leaf_value: f64,
    /// `max ‖d g‖∞` over the sample points of the minimising leaf.
    pub dg_at_leaf: f64,
    /// `max ‖d g‖∞` over the transversal grid.
    pub dg_max_grid: f64,
    /// `max g − min g` over all sampled points.
    pub g_variation: f64,
    /// Residual of the function against the A-differentiability rows.
    pub constraint_residual: f64,
    pub tol: f64,
}

impl MinLeafReport {
    pub fn leaf_critical(&self) -> bool {
        self.dg_at_leaf <= self.tol
    }

    pub fn g_constant(&self) -> bool {
        self.g_variation <= self.tol && self.dg_max_grid <= self.tol
    }

    pub fn a_differentiable(&self) -> bool {
        self.constraint_residual <= self.tol
    }

    pub fn passed(&self) -> bool {
        self.leaf_critical() && self.g_constant() && self.a_differentiable()
    }
}

fn grid_points(count: usize, dims: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = count.pow(dims as u32);
    (0..total).map(move |code| {
        let mut idx = vec![0; dims];
        let mut rest = code;
        for slot in idx.iter_mut().rev() {
            *slot = rest % count;
            rest /= count;
        }
        idx
    })
}

/// Locates the leaf minimising the leaf average of `g¹` on a `grid^m`
/// transversal lattice (ties: smallest lexicographic index) and measures
/// `d g` there, plus the variation of `g` over the samples and the
/// constraint residual of the whole function.
pub fn verify_min_leaf(
    solution: &[f64],
    sys: &ConstraintSystem,
    cfg: &TorusConfig,
    grid: usize,
    tol: f64,
) -> MinLeafReport {
    let layout = &sys.layout;
    let space = &layout.space;
    let big_n = cfg.dims();
    let g = layout.slice(solution, 0, 0);
    // leaf average keeps only transversal frequencies
    let g1_avg: Vec<f64> = if cfg.n() >= 2 {
        layout
            .slice(solution, 0, 1)
            .iter()
            .enumerate()
            .map(|(t, &c)| if space.is_transversal(t, cfg.m) { c } else { 0.0 })
            .collect()
    } else {
        vec![0.0; layout.b()]
    };
    let step = 2.0 * PI / grid as f64;
    let mut theta = vec![0.0; big_n];
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut dg_max_grid = 0.0_f64;
    let (mut gmin, mut gmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for idx in grid_points(grid, cfg.m) {
        for (j, &k) in idx.iter().enumerate() {
            theta[j] = k as f64 * step;
        }
        let val = space.eval(&g1_avg, &theta);
        if best.as_ref().is_none_or(|b| val < b.1) {
            best = Some((idx.clone(), val));
        }
        let gv = space.eval(g, &theta);
        gmin = gmin.min(gv);
        gmax = gmax.max(gv);
        dg_max_grid = dg_max_grid.max(space.gradient(g, &theta).iter().fold(0.0, |m, x| m.max(x.abs())));
    }
    let (leaf, leaf_value) = best.expect("grid is non-empty");
    for (j, &k) in leaf.iter().enumerate() {
        theta[j] = k as f64 * step;
    }
    let samples = LEAF_SAMPLES.min(grid).max(1);
    let leaf_step = 2.0 * PI / samples as f64;
    let mut dg_at_leaf = 0.0_f64;
    for idx in grid_points(samples, big_n - cfg.m) {
        for (a, &k) in idx.iter().enumerate() {
            theta[cfg.m + a] = k as f64 * leaf_step;
        }
        let gv = space.eval(g, &theta);
        gmin = gmin.min(gv);
        gmax = gmax.max(gv);
        dg_at_leaf = dg_at_leaf.max(space.gradient(g, &theta).iter().fold(0.0, |m, x| m.max(x.abs())));
    }
    MinLeafReport {
        leaf,
        leaf_value,
        dg_at_leaf,
        dg_max_grid,
        g_variation: gmax - gmin,
        constraint_residual: sys.residual(solution),
        tol,
    }
}

/// Evaluates the A-valued function with coefficient vector `v` at `θ`.
pub fn eval_function(v: &[f64], layout: &Layout, theta: &[f64]) -> Vec<f64> {
    (0..layout.components).map(|i| layout.space.eval(layout.slice(v, 0, i), theta)).collect()
}

/// `adiff_defect` of a trig-polynomial function at torus point `θ`.
pub fn function_adiff_defect(v: &[f64], layout: &Layout, cfg: &TorusConfig, theta: &[f64], h: f64) -> f64 {
    let n = cfg.n();
    let f = |flat: &[f64]| -> Result<Vec<f64>, std::convert::Infallible> {
        let x = APoint::unflatten(flat, n);
        Ok(eval_function(v, layout, &cfg.from_apoint(&x)))
    };
    match adiff_defect(f, &cfg.to_apoint(theta), &cfg.la, h) {
        Ok(d) => d,
        Err(never) => match never {},
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn cfg(name: &str) -> TorusConfig {
        TorusConfig::new(LocalAlgebra::new(presets::preset(name).unwrap()).unwrap(), 1)
    }

    #[test]
    fn dual_dimensions_follow_cauchy_riemann_count() {
        let c = cfg("dual");
        for d in 0..=3u32 {
            let (_, ns) = function_solutions(&c, d, SolveOptions::default()).unwrap();
            assert_eq!(ns.dim(), 1 + (2 * d as usize + 1), "degree {d}");
        }
    }

    #[test]
    fn trunc3_real_part_constant() {
        let c = cfg("trunc:3");
        let (sys, ns) = function_solutions(&c, 1, SolveOptions::default()).unwrap();
        let r = verify_constancy(&ns.basis, &sys.layout, &c, 1e-8);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn injected_non_solution_fails() {
        let c = cfg("dual");
        let sys = assemble_function_constraints(&c, 2, 20_000).unwrap();
        let mut v = vec![0.0; sys.n_cols()];
        let (_, sin_idx) = sys.layout.space.index_of(&[1, 0]).unwrap();
        v[sys.layout.col(0, 0, sin_idx)] = 1.0;
        let r = verify_constancy(&[v.clone()], &sys.layout, &c, 1e-8);
        assert!(!r.real_part_constant());
        assert_eq!(r.real_part_violations[0].frequency, vec![1, 0]);

        // g = cos(x^{1,0}): leaf 0 is critical but g varies and G is not A-differentiable
        let mut w = vec![0.0; sys.n_cols()];
        let (cos_idx, _) = sys.layout.space.index_of(&[1, 0]).unwrap();
        w[sys.layout.col(0, 0, cos_idx)] = 1.0;
        let m = verify_min_leaf(&w, &sys, &c, 32, 1e-8);
        assert_eq!(m.leaf, vec![0]);
        assert!(m.leaf_critical());
        assert!(!m.g_constant());
        assert!(!m.a_differentiable());
        assert!(!m.passed());
    }

    #[test]
    fn constant_passes_everything() {
        let c = cfg("trunc:3");
        let sys = assemble_function_constraints(&c, 1, 20_000).unwrap();
        let mut v = vec![0.0; sys.n_cols()];
        v[sys.layout.col(0, 0, 0)] = 2.0;
        v[sys.layout.col(0, 2, 0)] = -1.0;
        assert!(verify_constancy(&[v.clone()], &sys.layout, &c, 1e-12).passed());
        let m = verify_min_leaf(&v, &sys, &c, 8, 1e-12);
        assert_eq!((m.dg_at_leaf, m.g_variation, m.constraint_residual), (0.0, 0.0, 0.0));
        let socle = c.la.socle_basis();
        assert!(verify_socle_decomposition(&[v], &sys.layout, &c, &socle, 1e-12).passed());
    }

    #[test]
    fn size_cap() {
        let c = cfg("trunc:3");
        assert!(matches!(
            assemble_function_constraints(&c, 3, 100),
            Err(ConstraintError::SizeCapExceeded { columns: 1029, cap: 100 })
        ));
    }
}
