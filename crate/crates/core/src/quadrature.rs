//! Gauss rules and an adaptive integrator.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::specfun::log_gamma;

/// Nodes and weights of a quadrature rule.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Affine map from `[-1, 1]` onto `[a, b]` (the weight function is not rescaled).
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Rule { nodes: self.nodes.iter().map(|x| mid + half * x).collect(), weights: self.weights.iter().map(|w| half * w).collect() }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre rule on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Jacobi rule for the weight `(1-x)^alpha (1+x)^beta` on `[-1, 1]`
/// (Golub–Welsch).
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Rule> {
    if n == 0 || alpha <= -1.0 || beta <= -1.0 {
        return Err(Error::Domain(format!("Gauss-Jacobi needs n >= 1, alpha, beta > -1 (got {n}, {alpha}, {beta})")));
    }
    let ab = alpha + beta;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let fi = i as f64;
        let denom = (2.0 * fi + ab) * (2.0 * fi + ab + 2.0);
        let diag = if denom.abs() < 1e-300 { (beta - alpha) / (ab + 2.0) } else { (beta * beta - alpha * alpha) / denom };
        jm[(i, i)] = diag;
        if i + 1 < n {
            let j = fi + 1.0;
            let num = 4.0 * j * (j + alpha) * (j + beta) * (j + ab);
            let d = (2.0 * j + ab).powi(2) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0);
            let off = (num / d).sqrt();
            jm[(i, i + 1)] = off;
            jm[(i + 1, i)] = off;
        }
    }
    let mu0 = ((ab + 1.0) * 2f64.ln() + log_gamma(alpha + 1.0)? + log_gamma(beta + 1.0)? - log_gamma(ab + 2.0)?).exp();
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() })
}

/// Gauss–Jacobi rule with `α = β = alpha` on `[a, b]`, with the weight
/// divided back out: `integrate(f)` approximates `∫_a^b f` for integrands
/// that vanish like `(b-x)^alpha (x-a)^alpha` times a smooth function.
pub fn endpoint_rule(n: usize, alpha: f64, a: f64, b: f64) -> Result<Rule> {
    let base = gauss_jacobi(n, alpha, alpha)?;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (&x, &w) in base.nodes.iter().zip(&base.weights) {
        nodes.push(mid + half * x);
        weights.push(half * w / ((1.0 - x) * (1.0 + x)).powf(alpha));
    }
    Ok(Rule { nodes, weights })
}

/// Adaptive Gauss–Legendre integration: a panel is accepted when the
/// 10-point rule on the panel and on its two halves agree to `tol` relative
/// to the running magnitude of the integral.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let rule = gauss_legendre(10);
    let panel = |lo: f64, hi: f64, f: &mut F| rule.mapped(lo, hi).integrate(&mut *f);
    let whole = panel(a, b, &mut f);
    let mut stack = vec![(a, b, whole, 0usize)];
    let mut total = 0.0;
    let mut scale = whole.abs();
    let mut evaluations = 0usize;
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(lo, mid, &mut f);
        let right = panel(mid, hi, &mut f);
        evaluations += 20;
        let refined = left + right;
        scale = scale.max(refined.abs());
        if (refined - est).abs() <= tol * scale.max(1e-300) || depth >= 50 {
            if depth >= 50 {
                return Err(Error::Quadrature(format!("adaptive rule did not converge near [{lo}, {hi}]")));
            }
            total += refined;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
        if evaluations > 2_000_000 {
            return Err(Error::Quadrature("adaptive rule exceeded budget".into()));
        }
    }
    Ok(total)
}
