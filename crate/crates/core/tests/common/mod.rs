//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's elliptic, quadrature or eigen code.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi, GaussLegendre};
use nalgebra::{DMatrix, SymmetricEigen};

/// `K(k)` by the trapezoid rule on the periodic integrand.
pub fn big_k(k: f64) -> f64 {
    let n = 400;
    let h = PI / n as f64;
    let sum: f64 = (0..n).map(|i| 1.0 / (1.0 - (k * (i as f64 * h).sin()).powi(2)).sqrt()).sum();
    0.5 * h * sum
}

/// `(sn, cn, dn)(u, k)`: Maclaurin series at `u / 2^j`, then duplication.
/// Rounding grows with the number of doublings: about 1e-11 absolute for
/// `u` near `2K(0.95)`.
pub fn sn_cn_dn(u: f64, k: f64) -> (f64, f64, f64) {
    let k2 = k * k;
    let mut j = 0;
    let mut v = u;
    while v.abs() > 1e-3 {
        v *= 0.5;
        j += 1;
    }
    let v2 = v * v;
    let mut s = v
        * (1.0 - (1.0 + k2) * v2 / 6.0 + (1.0 + 14.0 * k2 + k2 * k2) * v2 * v2 / 120.0
            - (1.0 + 135.0 * k2 + 135.0 * k2 * k2 + k2 * k2 * k2) * v2 * v2 * v2 / 5040.0);
    let mut c = 1.0 - v2 / 2.0 + (1.0 + 4.0 * k2) * v2 * v2 / 24.0 - (1.0 + 44.0 * k2 + 16.0 * k2 * k2) * v2 * v2 * v2 / 720.0;
    let mut d = 1.0 - k2 * v2 / 2.0 + k2 * (4.0 + k2) * v2 * v2 / 24.0 - k2 * (16.0 + 44.0 * k2 + k2 * k2) * v2 * v2 * v2 / 720.0;
    for _ in 0..j {
        let den = 1.0 - k2 * s.powi(4);
        let (s2, c2, d2) = (2.0 * s * c * d / den, (c * c - s * s * d * d) / den, (d * d - k2 * s * s * c * c) / den);
        s = s2;
        c = c2;
        d = d2;
    }
    (s, c, d)
}

/// Comparison brackets for `Λ_ν^n(κ)` with `ω = π/(2K)`.
pub fn bracket(nu: f64, n: usize, kappa: f64) -> (f64, f64) {
    let w2 = (PI / (2.0 * big_k(kappa))).powi(2);
    let free = w2 * (n as f64 + nu + 1.0).powi(2);
    let shifted = nu * (nu + 1.0) * (1.0 - w2) + free;
    if nu >= 0.0 {
        (free, shifted)
    } else {
        (shifted, free)
    }
}

fn gegenbauer_with_derivative(jmax: usize, lam: f64, x: f64) -> (Vec<f64>, Vec<f64>) {
    let table = |lam: f64, len: usize| {
        let mut c = vec![0.0; len.max(2)];
        c[0] = 1.0;
        c[1] = 2.0 * lam * x;
        for j in 2..len {
            let jf = j as f64;
            c[j] = (2.0 * x * (jf + lam - 1.0) * c[j - 1] - (jf + 2.0 * lam - 2.0) * c[j - 2]) / jf;
        }
        c.truncate(len);
        c
    };
    let c = table(lam, jmax);
    let up = table(lam + 1.0, jmax);
    let dc = (0..jmax).map(|j| if j == 0 { 0.0 } else { 2.0 * lam * up[j - 1] }).collect();
    (c, dc)
}

/// Rayleigh–Ritz for the Lamé–Wangerin problem. With `w = cn^{ν+1} v(sn t)`
/// the energy and mass forms become, with `x = sn t` and `D = 1 - κ²x²`,
/// `∫ (1-x²)^{ν+1/2} D^{-1/2} [(1-x²) D v'² + q v²] dx`, `q = (ν+1)²D - (ν+1)κ²x²`,
/// and `∫ (1-x²)^{ν+1/2} D^{-1/2} v² dx`. Basis `C_j^{ν+1}(x)`, `j < size`.
pub struct Ritz {
    pub nu: f64,
    pub kappa: f64,
    pub values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl Ritz {
    pub fn new(nu: f64, kappa: f64, size: usize) -> Self {
        let a = FiniteAboveNegOneF64::new(nu + 0.5).unwrap();
        let rule = GaussJacobi::new(NonZeroUsize::new(3 * size).unwrap(), a, a);
        let lam = nu + 1.0;
        let k2 = kappa * kappa;
        let mut stiff = DMatrix::<f64>::zeros(size, size);
        let mut mass = DMatrix::<f64>::zeros(size, size);
        for &(x, w) in rule.as_node_weight_pairs() {
            let d = 1.0 - k2 * x * x;
            let q = lam * lam * d - lam * k2 * x * x;
            let wt = w / d.sqrt();
            let (c, dc) = gegenbauer_with_derivative(size, lam, x);
            for i in 0..size {
                for j in 0..=i {
                    let m = wt * c[i] * c[j];
                    mass[(i, j)] += m;
                    stiff[(i, j)] += wt * (1.0 - x * x) * d * dc[i] * dc[j] + q * m;
                }
            }
        }
        for i in 0..size {
            for j in 0..i {
                mass[(j, i)] = mass[(i, j)];
                stiff[(j, i)] = stiff[(i, j)];
            }
        }
        let l = mass.cholesky().expect("mass matrix is positive definite").l();
        let li = l.clone().try_inverse().unwrap();
        let reduced = &li * &stiff * li.transpose();
        let reduced = 0.5 * (&reduced + reduced.transpose());
        let eig = SymmetricEigen::new(reduced);
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let back = li.transpose();
        let mut vectors = DMatrix::<f64>::zeros(size, size);
        for (col, &i) in order.iter().enumerate() {
            vectors.set_column(col, &(&back * eig.eigenvectors.column(i)));
        }
        Self { nu, kappa, values, vectors }
    }

    /// `W_n(t)` with unit `L²(-K, K)` norm and positive value near `t = K`.
    pub fn eigenfunction(&self, n: usize, t: f64) -> f64 {
        let (s, c, _) = sn_cn_dn(t, self.kappa);
        let size = self.values.len();
        let (basis, _) = gegenbauer_with_derivative(size, self.nu + 1.0, s);
        let v: f64 = (0..size).map(|j| self.vectors[(j, n)] * basis[j]).sum();
        let (one, _) = gegenbauer_with_derivative(size, self.nu + 1.0, 1.0);
        let end: f64 = (0..size).map(|j| self.vectors[(j, n)] * one[j]).sum();
        v.signum() * end.signum() * c.powf(self.nu + 1.0) * v.abs()
    }
}

/// `∫_a^b f` by Gauss–Legendre.
pub fn gauss_legendre(n: usize, a: f64, b: f64, f: impl FnMut(f64) -> f64) -> f64 {
    GaussLegendre::new(NonZeroUsize::new(n).unwrap()).integrate(a, b, f)
}

/// Seeded generator for sampled tests.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
