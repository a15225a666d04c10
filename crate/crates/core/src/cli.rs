//! `algtorus` subcommands. [`run`] returns the rendered output and the exit
//! code so the front end can be driven in-process.
//!
//! Exit codes: 0 success, 1 bad input, 2 invalid algebra, 3 expression or
//! point error, 4 a check failed, 5 size cap exceeded.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::algebra::AlgebraElement;
use crate::constraints::ConstraintError;
use crate::expr;
use crate::forms::{self, FormsError};
use crate::literal;
use crate::presets;
use crate::prolong::{self, APoint};
use crate::report::{num, Report};
use crate::spectral::{self, SolveOptions, TorusConfig};
use crate::standard::{radical_filtration, LocalAlgebra};
use crate::AlgebraError;

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INVALID_ALGEBRA: i32 = 2;
pub const EXIT_EXPR: i32 = 3;
pub const EXIT_FAIL: i32 = 4;
pub const EXIT_CAP: i32 = 5;

/// Constant functions must solve the system to this accuracy.
pub const CONSTANTS_TOL: f64 = 1e-10;
/// Structural checks on function solutions.
pub const STRUCTURE_TOL: f64 = 1e-8;
/// Embedding and exactness residuals.
pub const EMBED_TOL: f64 = 1e-9;
/// Lift checks in `check`.
pub const DEFECT_TOL: f64 = 1e-5;
pub const DEFECT_STEP: f64 = 1e-5;
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "algtorus", version, about = "Local algebras, A-differentiable lifts and checks on A-tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Radical, filtration, standard basis and socle of an algebra.
    Algebra(Common),
    /// Lift a real expression to A at a point by both routes.
    Lift(LiftArgs),
    /// A-differentiability defect of a lift and of radical negation at a point.
    Check(LiftArgs),
    /// Solve for A-differentiable functions on the torus and check their structure.
    Verify(Common),
    /// Closed A-differentiable 1-forms: component dimensions and exactness.
    Forms(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Preset algebra: dual, trunc:<k>, square:<r>.
    #[arg(long, conflicts_with = "spec")]
    pub preset: Option<String>,
    /// Algebra spec file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// A-dimension of the torus.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub m: u32,
    /// Trigonometric degree of the ansatz.
    #[arg(long, default_value_t = 1)]
    pub degree: u32,
    /// Relative nullspace tolerance.
    #[arg(long, default_value_t = crate::constraints::DEFAULT_NULL_TOL)]
    pub tol: f64,
    /// Points per transversal coordinate for the minimizing-leaf scan.
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..))]
    pub grid: u32,
    /// Maximum number of unknowns.
    #[arg(long, default_value_t = crate::constraints::DEFAULT_SIZE_CAP)]
    pub cap: usize,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct LiftArgs {
    #[command(flatten)]
    pub common: Common,
    /// Expression in x1..xm.
    #[arg(long, allow_hyphen_values = true)]
    pub expr: String,
    /// Point literal, e.g. "3 + 2 e1; 1".
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
}

struct Failure(i32, String);

impl From<ConstraintError> for Failure {
    fn from(e: ConstraintError) -> Self {
        Failure(EXIT_CAP, format!("error: {e}\n"))
    }
}

impl From<FormsError> for Failure {
    fn from(e: FormsError) -> Self {
        match e {
            FormsError::Constraint(c) => c.into(),
            other => Failure(EXIT_INPUT, format!("error: {other}\n")),
        }
    }
}

fn source_name(c: &Common) -> String {
    match (&c.preset, &c.spec) {
        (Some(p), _) => p.clone(),
        (None, Some(path)) => path.display().to_string(),
        (None, None) => "dual".to_string(),
    }
}

fn load(c: &Common) -> Result<LocalAlgebra, Failure> {
    let input = match (&c.preset, &c.spec) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure(EXIT_INPUT, format!("error: cannot read {}: {e}\n", path.display())))?;
            presets::parse_spec(&text)
        }
        (Some(p), None) => presets::preset(p),
        (None, None) => Ok(presets::dual()),
    }
    .map_err(|e| Failure(EXIT_INPUT, format!("error: {e}\n")))?;
    LocalAlgebra::new(input).map_err(invalid_algebra)
}

fn invalid_algebra(e: AlgebraError) -> Failure {
    let mut r = Report::new();
    match &e {
        AlgebraError::Invalid(vs) => {
            for v in vs {
                r.note(format!("violation {v}"));
            }
            r.check("algebra_valid", false, vs.len().to_string());
        }
        other => r.check("algebra_valid", false, other.to_string()),
    }
    Failure(EXIT_INVALID_ALGEBRA, r.render())
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Failure(EXIT_INPUT, format!("error: --tol must lie in (0, 1), got {tol}\n")))
    }
}

/// Parses arguments and runs; returns `(output, exit code)`.
pub fn run_args<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            (e.render().to_string(), code)
        }
    }
}

pub fn run(cli: &Cli) -> (String, i32) {
    let (common, result) = match &cli.command {
        Command::Algebra(c) => (c, cmd_algebra(c)),
        Command::Lift(a) => (&a.common, cmd_lift(a)),
        Command::Check(a) => (&a.common, cmd_check(a)),
        Command::Verify(c) => (c, cmd_verify(c)),
        Command::Forms(c) => (c, cmd_forms(c)),
    };
    let (text, code) = match result {
        Ok(r) => r,
        Err(Failure(code, text)) => (text, code),
    };
    if let Some(path) = &common.out {
        if let Err(e) = std::fs::write(path, &text) {
            return (format!("{text}error: cannot write {}: {e}\n", path.display()), EXIT_INPUT);
        }
    }
    (text, code)
}

fn finish(r: Report) -> Result<(String, i32), Failure> {
    let code = if r.all_passed() { 0 } else { EXIT_FAIL };
    Ok((r.render(), code))
}

fn set(names: impl IntoIterator<Item = String>) -> String {
    format!("{{{}}}", names.into_iter().collect::<Vec<_>>().join(", "))
}

fn element_name(a: &AlgebraElement, labels: &[String]) -> String {
    let nonzero: Vec<usize> = (0..a.dim()).filter(|&i| a.coeffs[i].abs() > 1e-12).collect();
    match nonzero.as_slice() {
        [i] if (a.coeffs[*i] - 1.0).abs() <= 1e-12 => labels[*i].clone(),
        _ => literal::format_element(a, labels),
    }
}

fn cmd_algebra(c: &Common) -> Result<(String, i32), Failure> {
    let la = load(c)?;
    let info = &la.info;
    let labels = la.labels();
    let n = la.dim();
    let filt = radical_filtration(&la.alg).dims();
    let socle: Vec<String> = la.socle_basis().iter().map(|e| element_name(e, labels)).collect();
    let monomial = |k: usize| -> String {
        let exps = info.exponent(k).unwrap_or(&[]);
        let parts: Vec<String> = exps
            .iter()
            .zip(&info.pseudobasis)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, &p)| if e == 1 { labels[p].clone() } else { format!("{}^{e}", labels[p]) })
            .collect();
        parts.join("*")
    };

    let mut out = String::new();
    out.push_str(&format!("algebra = {}\n", source_name(c)));
    out.push_str(&format!("n = {n}\n"));
    out.push_str(&format!("radical = {}\n", set((1..n).map(|k| labels[k].clone()))));
    out.push_str(&format!("filtration = {filt:?}\n"));
    out.push_str(&format!("nu = {}\n", info.nu));
    out.push_str(&format!("pseudobasis = {}\n", set(info.pseudobasis.iter().map(|&k| labels[k].clone()))));
    for (k, label) in labels.iter().enumerate().skip(1) {
        out.push_str(&format!("monomial {label} = {}\n", monomial(k)));
    }
    out.push_str(&format!("socle = {}\n", set(socle.iter().cloned())));
    if la.input.labels() != labels {
        for (k, label) in labels.iter().enumerate() {
            let col = AlgebraElement::new(info.basis.column(k).iter().copied().collect());
            out.push_str(&format!("standard {label} = {}\n", literal::format_element(&col, la.input.labels())));
        }
    }

    let mut r = Report::new();
    r.check("algebra_valid", true, "0");
    r.key("N", n);
    r.key("RADICAL_DIM", n - 1);
    r.key("FILTRATION", filt.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
    r.key("NU", info.nu);
    r.key("SOCLE_DIM", socle.len());
    out.push_str(&r.render());
    Ok((out, 0))
}

fn lift_inputs(a: &LiftArgs) -> Result<(LocalAlgebra, expr::Expr, APoint), Failure> {
    let la = load(&a.common)?;
    let point =
        literal::parse_point(&a.at, la.input.labels()).map_err(|e| Failure(EXIT_EXPR, format!("error: {e}\n")))?;
    let point = APoint::new(point.components.iter().map(|c| la.info.to_standard(c)).collect());
    let e = expr::parse(&a.expr, point.m()).map_err(|e| Failure(EXIT_EXPR, format!("error: {e}\n")))?;
    Ok((la, e, point))
}

fn cmd_lift(a: &LiftArgs) -> Result<(String, i32), Failure> {
    let (la, e, point) = lift_inputs(a)?;
    let expr_err = |e: prolong::ProlongError| Failure(EXIT_EXPR, format!("error: {e}\n"));
    let taylor = prolong::taylor_lift(&e, &point, &la).map_err(expr_err)?;
    let direct = prolong::lift_eval(&e, &point, &la).map_err(expr_err)?;
    let diff = (&taylor - &direct).norm_inf();
    let labels = la.input.labels();
    let mut out = String::new();
    out.push_str(&format!("taylor_lift = {}\n", literal::format_element(&la.info.to_input(&taylor), labels)));
    out.push_str(&format!("lift_eval = {}\n", literal::format_element(&la.info.to_input(&direct), labels)));
    out.push_str(&format!("diff = {}\n", num(diff)));
    Ok((out, 0))
}

fn cmd_check(a: &LiftArgs) -> Result<(String, i32), Failure> {
    let (la, e, point) = lift_inputs(a)?;
    let expr_err = |e: prolong::ProlongError| Failure(EXIT_EXPR, format!("error: {e}\n"));
    let f = prolong::lifted_map(&e, &la, point.m()).map_err(expr_err)?;
    let defect = prolong::adiff_defect(f, &point, &la, DEFECT_STEP).map_err(expr_err)?;
    let identity = prolong::e1_component_identity(&e, &point, &la).map_err(expr_err)?;
    let negation = prolong::adiff_defect(
        prolong::radical_negation(la.dim()),
        &APoint::new(vec![point.components[0].clone()]),
        &la,
        DEFECT_STEP,
    )
    .map_err(expr_err)?;

    let mut r = Report::new();
    r.check("lift_adiff_defect", defect <= DEFECT_TOL, num(defect));
    r.check("e1_component_identity", identity <= IDENTITY_TOL, num(identity));
    r.note(format!("radical negation defect {}", num(negation)));
    r.key_num("LIFT_DEFECT", defect);
    r.key_num("E1_IDENTITY_RESIDUAL", identity);
    r.key_num("NEGATION_DEFECT", negation);
    finish(r)
}

fn torus(c: &Common) -> Result<(TorusConfig, SolveOptions), Failure> {
    check_tol(c.tol)?;
    let la = load(c)?;
    Ok((TorusConfig::new(la, c.m as usize), SolveOptions { null_tol: c.tol, cap: c.cap }))
}

fn header(r: &mut Report, c: &Common, cfg: &TorusConfig) {
    r.key("ALGEBRA", source_name(c));
    r.key("N_ALG", cfg.n());
    r.key("M", cfg.m);
    r.key("DIM_TORUS", cfg.dims());
    r.key("DEGREE", c.degree);
}

fn cmd_verify(c: &Common) -> Result<(String, i32), Failure> {
    let (cfg, opts) = torus(c)?;
    let (sys, ns) = spectral::function_solutions(&cfg, c.degree, opts)?;
    let socle = cfg.la.socle_basis();
    let layout = &sys.layout;

    let mut r = Report::new();
    let constants = spectral::constants_residual(&sys);
    r.check("constants_embed", constants <= CONSTANTS_TOL, num(constants));

    let cons = spectral::verify_constancy(&ns.basis, layout, &cfg, STRUCTURE_TOL);
    for v in cons.real_part_violations.iter().chain(&cons.e1_violations).take(10) {
        r.note(format!(
            "solution {} component {} frequency {:?} coefficient {}",
            v.solution,
            v.component,
            v.frequency,
            num(v.value)
        ));
    }
    r.check("real_part_constant", cons.real_part_constant(), num(cons.real_part_mass));
    r.check("e1_basic", cons.e1_basic(), num(cons.e1_nonbasic_mass));

    let dec = spectral::verify_socle_decomposition(&ns.basis, layout, &cfg, &socle, STRUCTURE_TOL);
    r.check("socle_decomposition", dec.passed(), num(dec.max_residual));
    let embed = spectral::socle_embedding_residual(&sys, &cfg, &socle);
    r.check("socle_embedding", embed <= EMBED_TOL, num(embed));

    let mut worst_leaf = 0.0_f64;
    let mut worst_var = 0.0_f64;
    let mut worst_res = 0.0_f64;
    let mut leaf_ok = true;
    for v in &ns.basis {
        let ml = spectral::verify_min_leaf(v, &sys, &cfg, c.grid as usize, STRUCTURE_TOL);
        leaf_ok &= ml.passed();
        worst_leaf = worst_leaf.max(ml.dg_at_leaf);
        worst_var = worst_var.max(ml.g_variation);
        worst_res = worst_res.max(ml.constraint_residual);
    }
    r.check("min_leaf_critical", leaf_ok, num(worst_leaf));

    header(&mut r, c, &cfg);
    r.key("TRIG_SIZE", layout.b());
    r.key("COLUMNS", sys.n_cols());
    r.key("ROWS", sys.n_rows());
    r.key("DIM_NULLSPACE", ns.dim());
    r.key("SOCLE_DIM", socle.len());
    r.key_num("SIGMA_MAX", ns.sigma_max);
    r.key_num("CONSTANTS_RESIDUAL", constants);
    r.key_num("REAL_PART_MASS", cons.real_part_mass);
    r.key_num("E1_NONBASIC_MASS", cons.e1_nonbasic_mass);
    r.key_num("DECOMPOSITION_RESIDUAL", dec.max_residual);
    r.key_num("EMBEDDING_RESIDUAL", embed);
    r.key_num("MIN_LEAF_DG", worst_leaf);
    r.key_num("G_VARIATION", worst_var);
    r.key_num("SOLUTION_RESIDUAL", worst_res);
    r.key("GRID", c.grid);
    finish(r)
}

fn cmd_forms(c: &Common) -> Result<(String, i32), Failure> {
    let (cfg, opts) = torus(c)?;
    let coh = forms::verify_component_bounds(&cfg, c.degree, opts)?;
    let inj = forms::verify_injectivity(&cfg, c.degree, opts, EMBED_TOL)?;

    let mut r = Report::new();
    if coh.vacuous() {
        r.note("no non-socle radical index: component bound is vacuous");
    }
    for (_, label, dim) in &coh.component_dims {
        r.check(&format!("component_bound[{label}]"), *dim <= coh.bound, format!("{dim}<={}", coh.bound));
    }
    for (j, dim) in &coh.function_component_dims {
        let label = &cfg.la.labels()[*j];
        r.check(&format!("function_component_constant[{label}]"), *dim == 1, dim.to_string());
    }
    r.check("h0_constants", coh.h0_holds(), coh.dim_h0.to_string());
    r.check("zero_mean_exact", inj.passed(), num(inj.worst_residual));
    if let Some(s) = coh.stabilized {
        r.note(format!("component dims equal to degree {}: {s}", c.degree - 1));
    }

    header(&mut r, c, &cfg);
    r.key("DIM_SOLUTIONS", coh.dim_solutions);
    for (_, label, dim) in &coh.component_dims {
        r.key(format!("DIM_ZBREVE[{label}]"), dim);
    }
    r.key("BOUND", coh.bound);
    r.key("DIM_H0", coh.dim_h0);
    r.key("CLASS_RANK", inj.class_rank);
    r.key("ZERO_MEAN_DIM", inj.zero_mean_dim);
    r.key_num("EXACTNESS_RESIDUAL", inj.worst_residual);
    r.key(
        "STABILIZED",
        match coh.stabilized {
            Some(true) => "true",
            Some(false) => "false",
            None => "n/a",
        },
    );
    finish(r)
}
