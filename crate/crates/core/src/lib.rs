//! Computation in finite-dimensional local commutative real algebras and
//! numerical checks of A-differentiability on compact A-tori.
//!
//! * [`algebra`], [`standard`], [`presets`]: structure constants, radical,
//!   standard basis and socle.
//! * [`expr`]: smooth expressions and their symbolic partial derivatives.
//! * [`prolong`]: lifting real functions to A-differentiable functions.
//! * [`trig`], [`constraints`], [`spectral`]: trigonometric ansatz on the
//!   torus, linear constraint systems and their nullspaces, and the checks
//!   on A-differentiable functions.
//! * [`forms`]: closed A-differentiable 1-forms.
//! * [`cli`]: the `algtorus` command-line front end.

pub mod algebra;
pub mod cli;
pub mod constraints;
pub mod expr;
pub mod forms;
pub mod linalg;
pub mod literal;
pub mod presets;
pub mod prolong;
pub mod report;
pub mod spectral;
pub mod standard;
pub mod trig;

pub use algebra::{AlgebraElement, AlgebraError, StructureConstants};
pub use expr::{parse, Expr};
pub use prolong::{lift_eval, taylor_lift, APoint};
pub use standard::{LocalAlgebra, StandardBasisInfo};
