#![allow(dead_code)]

use algtorus::presets;
use algtorus::{APoint, AlgebraElement, LocalAlgebra};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const PRESETS: [&str; 4] = ["dual", "trunc:3", "trunc:4", "square:2"];

/// Smooth on all of R², so any real point is admissible.
pub const CORPUS: [&str; 10] = [
    "x1^2 + sin(x2)",
    "exp(x1)*sin(x2)",
    "x1*x2 - 3*x1",
    "1/(1 + x1^2 + x2^2)",
    "log(2 + cos(x1))",
    "cos(x1*x2)",
    "sin(x1^2)",
    "exp(sin(x1) - x2)",
    "(x1 - x2)^3/(3 + x2^2)",
    "log(x1^2 + 1)*exp(x2)",
];

pub fn local(name: &str) -> LocalAlgebra {
    LocalAlgebra::new(presets::preset(name).unwrap()).unwrap()
}

pub fn random_element(rng: &mut ChaCha8Rng, n: usize) -> AlgebraElement {
    AlgebraElement::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

pub fn random_point(rng: &mut ChaCha8Rng, n: usize, m: usize) -> APoint {
    APoint::new((0..m).map(|_| random_element(rng, n)).collect())
}

pub fn max_abs_diff(a: &AlgebraElement, b: &AlgebraElement) -> f64 {
    (a - b).norm_inf()
}
