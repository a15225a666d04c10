mod common;

use algtorus::constraints::Layout;
use algtorus::expr::{eval_real, Func};
use algtorus::forms::{differential, exterior_derivative};
use algtorus::prolong::{adiff_defect, lifted_map};
use algtorus::{lift_eval, parse, taylor_lift, APoint, AlgebraElement, Expr, LocalAlgebra, StructureConstants};
use common::{local, max_abs_diff, CORPUS, PRESETS};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 4)
}

fn el(v: &[f64], n: usize) -> AlgebraElement {
    AlgebraElement::new(v[..n].to_vec())
}

fn point2(a: &[f64], b: &[f64], n: usize) -> APoint {
    APoint::new(vec![el(a, n), el(b, n)])
}

/// `trunc:k` / `square:r` re-expressed in a random basis `1, b_1, ..`
/// with `b_i = Σ_j M[j][i] e_j`.
fn skewed(base: &StructureConstants, m: &DMatrix<f64>) -> Option<StructureConstants> {
    let n = base.dim();
    let mut basis = DMatrix::identity(n, n);
    basis.view_mut((1, 1), (n - 1, n - 1)).copy_from(m);
    let inv = basis.clone().try_inverse()?;
    let col = |i: usize| AlgebraElement::new(basis.column(i).iter().copied().collect());
    StructureConstants::from_fn(algtorus::presets::labels(n), |i, j, k| {
        let p = base.mul(&col(i), &col(j)).unwrap().to_dvector();
        (&inv * p)[k]
    })
    .ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_commutative_and_associative(p in 0..4usize, a in coeffs(), b in coeffs(), c in coeffs()) {
        let la = local(PRESETS[p]);
        let n = la.dim();
        let (a, b, c) = (el(&a, n), el(&b, n), el(&c, n));
        let alg = &la.alg;
        let ab = alg.mul(&a, &b).unwrap();
        prop_assert!(max_abs_diff(&ab, &alg.mul(&b, &a).unwrap()) <= 1e-14);
        let l = alg.mul(&ab, &c).unwrap();
        let r = alg.mul(&a, &alg.mul(&b, &c).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&l, &r) <= 1e-13);
    }

    #[test]
    fn inverse_of_unit(p in 0..4usize, a in coeffs(), re in 0.25..3.0f64, neg in any::<bool>()) {
        let la = local(PRESETS[p]);
        let n = la.dim();
        let mut a = el(&a, n);
        a.coeffs[0] = if neg { -re } else { re };
        let inv = la.alg.invert(&a).unwrap();
        let one = la.alg.mul(&a, &inv).unwrap();
        prop_assert!(max_abs_diff(&one, &la.alg.one()) <= 1e-10);
    }

    #[test]
    fn socle_annihilates_radical(p in 0..4usize, a in coeffs()) {
        let la = local(PRESETS[p]);
        let n = la.dim();
        let r = el(&a, n).radical_part();
        for s in la.socle_basis() {
            prop_assert!(la.alg.mul(&s, &r).unwrap().norm_inf() <= 1e-10);
        }
    }

    #[test]
    fn standard_basis_survives_change_of_basis(p in 1..4usize, entries in prop::collection::vec(-1.0..1.0f64, 9)) {
        let base = algtorus::presets::preset(PRESETS[p]).unwrap();
        let n = base.dim();
        let m = DMatrix::from_fn(n - 1, n - 1, |i, j| entries[i * (n - 1) + j] + if i == j { 2.0 } else { 0.0 });
        let Some(skew) = skewed(&base, &m) else { return Ok(()) };
        let la = LocalAlgebra::new(skew).unwrap();
        let reference = local(PRESETS[p]);
        prop_assert_eq!(la.nu(), reference.nu());
        prop_assert_eq!(la.socle_basis().len(), reference.socle_basis().len());
        prop_assert_eq!(la.info.pseudobasis.len(), reference.info.pseudobasis.len());
        // every standard element is the recorded monomial in the pseudobasis
        for k in 1..n {
            let mut prod = la.alg.one();
            for (&e, &pb) in la.info.exponent(k).unwrap().iter().zip(&la.info.pseudobasis) {
                prod = la.alg.mul(&prod, &la.alg.pow(&AlgebraElement::basis(n, pb), e).unwrap()).unwrap();
            }
            prop_assert!(max_abs_diff(&prod, &AlgebraElement::basis(n, k)) <= 1e-9);
        }
        let x = AlgebraElement::new(entries[..n].to_vec());
        prop_assert!(max_abs_diff(&la.info.to_input(&la.info.to_standard(&x)), &x) <= 1e-12);
    }

    #[test]
    fn both_lift_routes_agree(p in 0..4usize, k in 0..10usize, a in coeffs(), b in coeffs()) {
        let la = local(PRESETS[p]);
        let x = point2(&a, &b, la.dim());
        let e = parse(CORPUS[k], 2).unwrap();
        let t = taylor_lift(&e, &x, &la).unwrap();
        let l = lift_eval(&e, &x, &la).unwrap();
        prop_assert!(max_abs_diff(&t, &l) <= 1e-9 * (1.0 + t.norm_inf()));
    }

    #[test]
    fn real_part_of_lift_is_real_evaluation(p in 0..4usize, k in 0..10usize, a in coeffs(), b in coeffs()) {
        let la = local(PRESETS[p]);
        let x = point2(&a, &b, la.dim());
        let e = parse(CORPUS[k], 2).unwrap();
        let t = taylor_lift(&e, &x, &la).unwrap();
        prop_assert_eq!(t.real_part(), eval_real(&e, &x.real_parts()).unwrap());
    }

    #[test]
    fn lift_is_a_ring_homomorphism(p in 0..4usize, i in 0..10usize, j in 0..10usize, a in coeffs(), b in coeffs()) {
        let la = local(PRESETS[p]);
        let x = point2(&a, &b, la.dim());
        let (ei, ej) = (parse(CORPUS[i], 2).unwrap(), parse(CORPUS[j], 2).unwrap());
        let li = taylor_lift(&ei, &x, &la).unwrap();
        let lj = taylor_lift(&ej, &x, &la).unwrap();
        let sum = taylor_lift(&Expr::add(ei.clone(), ej.clone()), &x, &la).unwrap();
        let prod = taylor_lift(&Expr::mul(ei, ej), &x, &la).unwrap();
        let scale = 1.0 + li.norm_inf() * lj.norm_inf();
        prop_assert!(max_abs_diff(&sum, &(&li + &lj)) <= 1e-9 * scale);
        prop_assert!(max_abs_diff(&prod, &la.alg.mul(&li, &lj).unwrap()) <= 1e-9 * scale);
    }

    #[test]
    fn lift_respects_composition(p in 0..4usize, a in coeffs()) {
        let la = local(PRESETS[p]);
        let x = APoint::new(vec![el(&a, la.dim())]);
        let direct = taylor_lift(&parse("sin(x1^2)", 1).unwrap(), &x, &la).unwrap();
        let square = taylor_lift(&parse("x1^2", 1).unwrap(), &x, &la).unwrap();
        let composed = taylor_lift(&Expr::call(Func::Sin, Expr::Var(1)), &APoint::new(vec![square]), &la).unwrap();
        prop_assert!(max_abs_diff(&direct, &composed) <= 1e-9);
    }

    #[test]
    fn lifts_are_a_differentiable(p in 0..4usize, k in 0..10usize, a in coeffs(), b in coeffs()) {
        let la = local(PRESETS[p]);
        let x = point2(&a, &b, la.dim());
        let e = parse(CORPUS[k], 2).unwrap();
        let f = lifted_map(&e, &la, 2).unwrap();
        prop_assert!(adiff_defect(f, &x, &la, 1e-5).unwrap() <= 1e-6);
    }

    #[test]
    fn derivative_matches_finite_difference(k in 0..10usize, x in -1.0..1.0f64, y in -1.0..1.0f64, j in 1..=2usize) {
        let e = parse(CORPUS[k], 2).unwrap();
        let h = 1e-5;
        let mut plus = [x, y];
        plus[j - 1] += h;
        let mut minus = [x, y];
        minus[j - 1] -= h;
        let fd = (e.eval(&plus).unwrap() - e.eval(&minus).unwrap()) / (2.0 * h);
        let d = e.diff(j).eval(&[x, y]).unwrap();
        prop_assert!((d - fd).abs() <= 1e-6 * (1.0 + d.abs()));
    }

    #[test]
    fn mixed_partials_commute(k in 0..10usize, x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let e = parse(CORPUS[k], 2).unwrap();
        let a = e.diff(1).diff(2).eval(&[x, y]).unwrap();
        let b = e.diff(2).diff(1).eval(&[x, y]).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        prop_assert_eq!(e.diff_multi(&[1, 1]).eval(&[x, y]).unwrap(), a);
    }

    #[test]
    fn printer_round_trips(e in expr_tree(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let text = e.to_string();
        let back = parse(&text, 2).unwrap();
        prop_assert_eq!(back.to_string(), text);
        match (e.eval(&[x, y]), back.eval(&[x, y])) {
            (Ok(u), Ok(v)) => prop_assert!(u == v || (u.is_nan() && v.is_nan())),
            (Err(_), Err(_)) => {}
            other => prop_assert!(false, "evaluation mismatch {:?}", other),
        }
    }

    #[test]
    fn exterior_derivative_of_differential_vanishes(dims in 1..4usize, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let layout = Layout::checked(dims, 2, 2, 1, 10_000).unwrap();
        let g: Vec<f64> = (0..layout.n_cols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w = differential(&g, &layout);
        prop_assert!(exterior_derivative(&w).iter().flatten().flatten().all(|&v| v == 0.0));
    }
}

fn expr_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(-5.0..5.0f64).prop_map(Expr::Const), (1..=2usize).prop_map(Expr::Var),];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner.clone(), 0..4u32).prop_map(|(a, k)| Expr::IntPow(Box::new(a), k)),
            (inner, 0..4usize).prop_map(|(a, f)| {
                let f = [Func::Sin, Func::Cos, Func::Exp, Func::Log][f];
                Expr::Call(f, Box::new(a))
            }),
        ]
    })
}
