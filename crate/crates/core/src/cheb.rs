//! Chebyshev interpolants on Lobatto points.

use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct Cheb {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

/// The `n + 1` Lobatto nodes of `[a, b]`, ordered from `a` to `b`.
pub fn lobatto_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            let x = -(PI * j as f64 / n as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * x
        })
        .collect()
}

impl Cheb {
    /// Interpolant through values at [`lobatto_nodes`]`(a, b, n)`.
    pub fn from_lobatto(a: f64, b: f64, values: &[f64]) -> Self {
        let n = values.len() - 1;
        assert!(n >= 1);
        let nf = n as f64;
        let mut coeffs = vec![0.0; n + 1];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut s = 0.0;
            for (j, &v) in values.iter().enumerate() {
                // nodes run from a to b, i.e. x_j = -cos(pi j / n) = cos(pi (n - j) / n)
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                s += w * v * (PI * (k * (n - j)) as f64 / nf).cos();
            }
            *c = 2.0 * s / nf;
        }
        coeffs[0] *= 0.5;
        coeffs[n] *= 0.5;
        Self { a, b, coeffs }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Size of the two trailing coefficients relative to the largest one.
    pub fn tail_ratio(&self) -> f64 {
        let n = self.coeffs.len();
        let big = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if big == 0.0 {
            return 0.0;
        }
        (self.coeffs[n - 1].abs() + self.coeffs[n - 2].abs()) / big
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * u * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + self.coeffs[0]
    }

    pub fn derivative(&self) -> Cheb {
        let n = self.coeffs.len() - 1;
        let mut d = vec![0.0; n.max(1)];
        if n >= 1 {
            let mut next = 0.0; // d_{k+1}
            let mut next2 = 0.0; // d_{k+2}
            for k in (0..n).rev() {
                let dk = next2 + 2.0 * (k + 1) as f64 * self.coeffs[k + 1];
                d[k] = dk;
                next2 = next;
                next = dk;
            }
            d[0] *= 0.5;
        }
        let scale = 2.0 / (self.b - self.a);
        for c in d.iter_mut() {
            *c *= scale;
        }
        Cheb { a: self.a, b: self.b, coeffs: d }
    }
}
