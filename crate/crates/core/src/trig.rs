//! Real trigonometric polynomials of bounded degree on the torus `(R/2πZ)^N`.
//!
//! Basis index 0 is the constant; for the `q`-th positive frequency `k`
//! (first nonzero entry positive, enumerated in lexicographic order over
//! `[-d, d]^N`) index `1 + 2q` is `cos(k·θ)` and `2 + 2q` is `sin(k·θ)`.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct TrigSpace {
    dims: usize,
    degree: u32,
    freqs: Vec<Vec<i32>>,
    lookup: BTreeMap<Vec<i32>, usize>,
}

impl TrigSpace {
    /// Number of basis functions `(2d+1)^N`, or `None` on overflow.
    pub fn size_for(dims: usize, degree: u32) -> Option<usize> {
        let base = 2 * degree as usize + 1;
        (0..dims).try_fold(1usize, |acc, _| acc.checked_mul(base))
    }

    pub fn new(dims: usize, degree: u32) -> TrigSpace {
        let d = degree as i32;
        let base = 2 * degree as usize + 1;
        let total = Self::size_for(dims, degree).expect("trig space size overflows usize");
        let mut freqs = Vec::with_capacity(total / 2);
        for code in 0..total {
            // first coordinate most significant
            let mut k = vec![0; dims];
            let mut rest = code;
            for slot in k.iter_mut().rev() {
                *slot = (rest % base) as i32 - d;
                rest /= base;
            }
            if k.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
                freqs.push(k);
            }
        }
        let lookup = freqs.iter().enumerate().map(|(q, k)| (k.clone(), q)).collect();
        TrigSpace { dims, degree, freqs, lookup }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        1 + 2 * self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frequency of basis function `t` (zero vector for the constant).
    pub fn frequency(&self, t: usize) -> Vec<i32> {
        if t == 0 {
            vec![0; self.dims]
        } else {
            self.freqs[(t - 1) / 2].clone()
        }
    }

    pub fn is_cos(&self, t: usize) -> bool {
        t > 0 && (t - 1).is_multiple_of(2)
    }

    /// `(cos index, sin index)` of a positive frequency.
    pub fn index_of(&self, k: &[i32]) -> Option<(usize, usize)> {
        self.lookup.get(k).map(|&q| (1 + 2 * q, 2 + 2 * q))
    }

    /// True iff the frequency of `t` vanishes on every coordinate `>= transversal`.
    pub fn is_transversal(&self, t: usize, transversal: usize) -> bool {
        t == 0 || self.freqs[(t - 1) / 2][transversal..].iter().all(|&x| x == 0)
    }

    /// `∂/∂θ_α` of basis function `t`: `(target index, integer factor)`, or
    /// `None` when the derivative vanishes.
    pub fn derivative(&self, t: usize, alpha: usize) -> Option<(usize, f64)> {
        if t == 0 {
            return None;
        }
        let q = (t - 1) / 2;
        let k = self.freqs[q][alpha];
        if k == 0 {
            return None;
        }
        if self.is_cos(t) {
            Some((2 + 2 * q, -(k as f64)))
        } else {
            Some((1 + 2 * q, k as f64))
        }
    }

    /// Inverse view of [`derivative`](Self::derivative): the source index and
    /// factor whose derivative lands on `target`.
    pub fn derivative_source(&self, target: usize, alpha: usize) -> Option<(usize, f64)> {
        if target == 0 {
            return None;
        }
        let q = (target - 1) / 2;
        let k = self.freqs[q][alpha];
        if k == 0 {
            return None;
        }
        if self.is_cos(target) {
            // d/dθ sin(kθ) = k cos(kθ)
            Some((2 + 2 * q, k as f64))
        } else {
            Some((1 + 2 * q, -(k as f64)))
        }
    }

    fn phase(&self, q: usize, theta: &[f64]) -> f64 {
        self.freqs[q].iter().zip(theta).map(|(&k, &x)| k as f64 * x).sum()
    }

    pub fn eval_basis(&self, t: usize, theta: &[f64]) -> f64 {
        if t == 0 {
            return 1.0;
        }
        let ph = self.phase((t - 1) / 2, theta);
        if self.is_cos(t) {
            ph.cos()
        } else {
            ph.sin()
        }
    }

    /// `Σ_t coeffs[t] φ_t(θ)`.
    pub fn eval(&self, coeffs: &[f64], theta: &[f64]) -> f64 {
        let mut acc = coeffs[0];
        for q in 0..self.freqs.len() {
            let (c, s) = (coeffs[1 + 2 * q], coeffs[2 + 2 * q]);
            if c == 0.0 && s == 0.0 {
                continue;
            }
            let ph = self.phase(q, theta);
            acc += c * ph.cos() + s * ph.sin();
        }
        acc
    }

    /// Gradient with respect to all `N` coordinates.
    pub fn gradient(&self, coeffs: &[f64], theta: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dims];
        for q in 0..self.freqs.len() {
            let (c, s) = (coeffs[1 + 2 * q], coeffs[2 + 2 * q]);
            if c == 0.0 && s == 0.0 {
                continue;
            }
            let ph = self.phase(q, theta);
            let w = -c * ph.sin() + s * ph.cos();
            for (ga, &k) in g.iter_mut().zip(&self.freqs[q]) {
                *ga += w * k as f64;
            }
        }
        g
    }

    /// Coefficients of `∂f/∂θ_α`.
    pub fn differentiate(&self, coeffs: &[f64], alpha: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (t, &c) in coeffs.iter().enumerate() {
            if let Some((u, f)) = self.derivative(t, alpha) {
                out[u] += f * c;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(TrigSpace::new(2, 1).len(), 9);
        assert_eq!(TrigSpace::new(3, 2).len(), 125);
        assert_eq!(TrigSpace::new(1, 0).len(), 1);
        assert_eq!(TrigSpace::size_for(3, 2), Some(125));
        assert_eq!(TrigSpace::size_for(64, 100), None);
    }

    #[test]
    fn ordering_is_lexicographic() {
        let s = TrigSpace::new(2, 1);
        let ks: Vec<Vec<i32>> = (0..4).map(|q| s.frequency(1 + 2 * q)).collect();
        assert_eq!(ks, vec![vec![0, 1], vec![1, -1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let s = TrigSpace::new(2, 2);
        let coeffs: Vec<f64> = (0..s.len()).map(|t| ((t * 7 % 11) as f64 - 5.0) / 5.0).collect();
        let theta = [0.37, -1.1];
        let h = 1e-6;
        for alpha in 0..2 {
            let d = s.differentiate(&coeffs, alpha);
            let mut tp = theta;
            tp[alpha] += h;
            let mut tm = theta;
            tm[alpha] -= h;
            let fd = (s.eval(&coeffs, &tp) - s.eval(&coeffs, &tm)) / (2.0 * h);
            assert!((s.eval(&d, &theta) - fd).abs() < 1e-7);
            assert!((s.gradient(&coeffs, &theta)[alpha] - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn derivative_source_inverts_derivative() {
        let s = TrigSpace::new(3, 1);
        for t in 0..s.len() {
            for a in 0..3 {
                if let Some((u, f)) = s.derivative(t, a) {
                    assert_eq!(s.derivative_source(u, a), Some((t, f)));
                }
            }
        }
    }
}
