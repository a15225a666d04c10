mod common;

use algtorus::constraints::Layout;
use algtorus::forms::{assemble_form_constraints, differential, form_solutions, verify_component_bounds};
use algtorus::parse;
use algtorus::spectral::{
    constants_residual, function_adiff_defect, function_solutions, socle_embedding_residual, verify_constancy,
    verify_min_leaf, verify_socle_decomposition, SolveOptions, TorusConfig,
};
use common::local;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CONFIGS: [(&str, usize, u32); 6] =
    [("dual", 1, 2), ("trunc:3", 1, 1), ("trunc:3", 1, 2), ("square:2", 1, 1), ("trunc:4", 1, 1), ("dual", 2, 1)];

fn cfg(p: &str, m: usize) -> TorusConfig {
    TorusConfig::new(local(p), m)
}

#[test]
fn solutions_are_a_differentiable_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (p, m, d) in CONFIGS {
        let c = cfg(p, m);
        let (sys, ns) = function_solutions(&c, d, SolveOptions::default()).unwrap();
        for v in &ns.basis {
            for _ in 0..10 {
                let theta: Vec<f64> = (0..c.dims()).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
                let defect = function_adiff_defect(v, &sys.layout, &c, &theta, 1e-5);
                assert!(defect <= 1e-5, "{p} d={d}: {defect}");
            }
        }
    }
}

#[test]
fn structure_of_solutions() {
    for (p, m, d) in CONFIGS {
        let c = cfg(p, m);
        let (sys, ns) = function_solutions(&c, d, SolveOptions::default()).unwrap();
        assert!(constants_residual(&sys) <= 1e-10);
        assert!(verify_constancy(&ns.basis, &sys.layout, &c, 1e-8).passed());
        let socle = c.la.socle_basis();
        assert!(verify_socle_decomposition(&ns.basis, &sys.layout, &c, &socle, 1e-8).passed());
        assert!(socle_embedding_residual(&sys, &c, &socle) <= 1e-9);
        for v in &ns.basis {
            let r = verify_min_leaf(v, &sys, &c, 8, 1e-8);
            assert!(r.passed(), "{p}: {r:?}");
        }
    }
}

#[test]
fn non_constant_part_scales_with_socle() {
    // (dim − n) / (number of non-constant transversal trig functions) = dim socle
    for p in ["dual", "trunc:3", "square:2"] {
        let c = cfg(p, 1);
        let socle = c.la.socle_basis().len();
        for d in 1..=3u32 {
            let (_, ns) = function_solutions(&c, d, SolveOptions::default()).unwrap();
            let transversal = 2 * d as usize;
            assert_eq!(ns.dim() - c.n(), socle * transversal, "{p} d={d}");
        }
    }
}

#[test]
fn lifted_transversal_trig_polynomial_times_socle_solves() {
    let c = cfg("trunc:3", 1);
    let sys = algtorus::spectral::assemble_function_constraints(&c, 2, 20_000).unwrap();
    let layout = &sys.layout;
    let f = parse("cos(x1) - 2*sin(x1) + 0.5*cos(2*x1)", 1).unwrap();
    let mut v = vec![0.0; layout.n_cols()];
    let (c1, s1) = layout.space.index_of(&[1, 0, 0]).unwrap();
    let (c2, _) = layout.space.index_of(&[2, 0, 0]).unwrap();
    for (t, a) in [(c1, 1.0), (s1, -2.0), (c2, 0.5)] {
        v[layout.col(0, 2, t)] = a;
    }
    assert!(sys.residual(&v) <= 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let theta: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..6.0)).collect();
        let g = algtorus::spectral::eval_function(&v, layout, &theta);
        assert!((g[2] - f.eval(&theta[..1]).unwrap()).abs() <= 1e-12);
    }
}

#[test]
fn differentials_of_solutions_are_closed_a_linear_forms() {
    for (p, m, d) in CONFIGS {
        let c = cfg(p, m);
        let (fsys, fns) = function_solutions(&c, d, SolveOptions::default()).unwrap();
        let forms = assemble_form_constraints(&c, d, 20_000).unwrap();
        for v in &fns.basis {
            let w = differential(v, &fsys.layout);
            assert_eq!(w.layout, forms.layout);
            assert!(forms.residual(&w.coeffs) <= 1e-9, "{p} d={d}");
        }
    }
}

#[test]
fn cohomologous_forms_share_breve_components() {
    for (p, d) in [("trunc:3", 2), ("trunc:4", 1)] {
        let c = cfg(p, 1);
        let (fsys, fns) = function_solutions(&c, d, SolveOptions::default()).unwrap();
        let (_, forms) = form_solutions(&c, d, SolveOptions::default()).unwrap();
        let omega = &forms.basis[0];
        for g in &fns.basis {
            let dg = differential(g, &fsys.layout);
            let sigma: Vec<f64> = omega.iter().zip(&dg.coeffs).map(|(a, b)| a + b).collect();
            let layout: &Layout = &dg.layout;
            for j in c.la.info.breve() {
                for alpha in 0..layout.fields {
                    let a = layout.slice(omega, alpha, j);
                    let b = layout.slice(&sigma, alpha, j);
                    let diff = a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
                    assert!(diff <= 1e-9, "{p}: component {j} differs by {diff}");
                }
            }
        }
    }
}

#[test]
fn component_dims_settle_and_respect_bound() {
    for (p, degrees) in [("trunc:3", 1..=3u32), ("square:2", 1..=2), ("trunc:4", 1..=1)] {
        let c = cfg(p, 1);
        let mut prev: Option<Vec<usize>> = None;
        for d in degrees {
            let r = verify_component_bounds(&c, d, SolveOptions::default()).unwrap();
            assert!(r.passed(), "{p} d={d}: {r:?}");
            let dims: Vec<usize> = r.component_dims.iter().map(|x| x.2).collect();
            if let Some(prev) = &prev {
                assert!(prev.iter().zip(&dims).all(|(a, b)| a <= b));
            }
            prev = Some(dims);
        }
    }
}
