//! Classical special functions: `ln Γ`, Legendre `Q_ν` on `(1, ∞)`,
//! Ferrers `P_n^m`, Gegenbauer `C_n^λ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature;

/// Degree `ν = m - 1/2` of a toroidal (half-integer) Legendre function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfIntegerDegree(pub u32);

impl HalfIntegerDegree {
    pub fn nu(self) -> f64 {
        self.0 as f64 - 0.5
    }
}

const BERNOULLI_TERMS: [f64; 8] =
    [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0];

/// `ln Γ(x)` for `x > 0` (upward shift plus Stirling series).
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma needs x > 0, got {x}")));
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < 16.0 {
        shift += y.ln();
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in BERNOULLI_TERMS {
        series += c * p;
        p *= inv2;
    }
    Ok((y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + series - shift)
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    Ok(log_gamma(x)?.exp())
}

/// Pochhammer symbol `(a)_n`.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, j| acc * (a + j as f64))
}

/// Prefactor `√π Γ(ν+1) / (2^{ν+1} Γ(ν+3/2))` of the large-argument law
/// `Q_ν(z) ~ c_ν z^{-ν-1}`.
pub fn q_asymptotic_prefactor(nu: f64) -> Result<f64> {
    Ok((0.5 * PI.ln() + log_gamma(nu + 1.0)? - (nu + 1.0) * 2f64.ln() - log_gamma(nu + 1.5)?).exp())
}

fn check_q_args(nu: f64, z: f64) -> Result<()> {
    if !(nu >= -0.5) {
        return Err(Error::Domain(format!("legendre_q needs nu >= -1/2, got {nu}")));
    }
    if !(z > 1.0) || !z.is_finite() {
        return Err(Error::Domain(format!("legendre_q needs z > 1, got {z}")));
    }
    if z - 1.0 < 1e-6 {
        log::warn!("Q_{nu}({z}): argument within 1e-6 of the logarithmic singularity at 1");
    }
    Ok(())
}

/// `Q_ν(z)` from the Heine integral `∫_0^∞ (z + √(z²-1) cosh τ)^{-ν-1} dτ`
/// by adaptive quadrature. This is the reference route.
pub fn legendre_q_quadrature(nu: f64, z: f64) -> Result<f64> {
    check_q_args(nu, z)?;
    let root = ((z - 1.0) * (z + 1.0)).sqrt();
    let p = nu + 1.0;
    // integrand(T) / integrand(0) < 1e-18
    let target = (z + root) * (18.0 * std::f64::consts::LN_10 / p).exp();
    let cosh_t = ((target - z) / root).max(1.0);
    let t_max = (cosh_t + (cosh_t * cosh_t - 1.0).sqrt()).ln() + 1.0;
    let body = quadrature::adaptive(|tau| (z + root * tau.cosh()).powf(-p), 0.0, t_max, 1e-14)?;
    let tail = (0.5 * root * t_max.exp()).powf(-p) / p;
    Ok(body + tail)
}

/// `Q_ν(z)` from `√π Γ(ν+1)/Γ(ν+3/2) ξ^{-ν-1} ₂F₁(1/2, ν+1; ν+3/2; ξ^{-2})`
/// with `ξ = z + √(z²-1)`. Converges geometrically with ratio `ξ^{-2}`.
pub fn legendre_q_series(nu: f64, z: f64) -> Result<f64> {
    check_q_args(nu, z)?;
    let xi = z + ((z - 1.0) * (z + 1.0)).sqrt();
    let x = 1.0 / (xi * xi);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 0usize;
    loop {
        let jf = j as f64;
        term *= (0.5 + jf) * (nu + 1.0 + jf) / ((nu + 1.5 + jf) * (jf + 1.0)) * x;
        sum += term;
        j += 1;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        if j > 20_000 {
            return Err(Error::Convergence(format!("hypergeometric series for Q_{nu}({z}) did not converge")));
        }
    }
    let pref = (0.5 * PI.ln() + log_gamma(nu + 1.0)? - log_gamma(nu + 1.5)?).exp();
    Ok(pref * xi.powf(-nu - 1.0) * sum)
}

/// Legendre function of the second kind `Q_ν(z)`, `ν ≥ -1/2`, `z > 1`.
///
/// Uses the hypergeometric series when `ξ^{-2} ≤ 0.6` and the Heine
/// integral otherwise.
pub fn legendre_q(nu: f64, z: f64) -> Result<f64> {
    check_q_args(nu, z)?;
    let xi = z + ((z - 1.0) * (z + 1.0)).sqrt();
    if 1.0 / (xi * xi) <= 0.6 {
        legendre_q_series(nu, z)
    } else {
        legendre_q_quadrature(nu, z)
    }
}

/// Gegenbauer polynomial `C_n^λ(x)` by the three-term recurrence.
pub fn gegenbauer_c(n: usize, lam: f64, x: f64) -> Result<f64> {
    if !(lam > -0.5) {
        return Err(Error::Domain(format!("gegenbauer_c needs lambda > -1/2, got {lam}")));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("gegenbauer_c needs x in [-1, 1], got {x}")));
    }
    Ok(gegenbauer_unchecked(n, lam, x))
}

pub(crate) fn gegenbauer_unchecked(n: usize, lam: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut c0 = 1.0;
    let mut c1 = 2.0 * lam * x;
    for j in 1..n {
        let jf = j as f64;
        let c2 = (2.0 * x * (jf + lam) * c1 - (jf + 2.0 * lam - 1.0) * c0) / (jf + 1.0);
        c0 = c1;
        c1 = c2;
    }
    c1
}

/// Ferrers function of the first kind `P_n^m(x)` on `[-1, 1]`, with the
/// Condon–Shortley phase `(-1)^m`, so that
/// `P_{m+n}^m(x) = (-1/2)^m (2m)!/m! (1-x²)^{m/2} C_n^{m+1/2}(x)`.
pub fn ferrers_p(n: usize, m: usize, x: f64) -> Result<f64> {
    if m > n {
        return Err(Error::Domain(format!("ferrers_p needs m <= n, got m = {m}, n = {n}")));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("ferrers_p needs x in [-1, 1], got {x}")));
    }
    let s = ((1.0 - x) * (1.0 + x)).sqrt();
    let mut pmm = 1.0;
    for j in 0..m {
        pmm *= -((2 * j + 1) as f64) * s;
    }
    if n == m {
        return Ok(pmm);
    }
    let mut p0 = pmm;
    let mut p1 = x * (2 * m + 1) as f64 * pmm;
    for l in (m + 1)..n {
        let lf = l as f64;
        let mf = m as f64;
        let p2 = ((2.0 * lf + 1.0) * x * p1 - (lf + mf) * p0) / (lf - mf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    Ok(p1)
}

/// `e_ν^n = ∫_{-1}^{1} (1-x²)^{ν+1/2} (C_n^{ν+1}(x))² dx`
/// `= π Γ(n+2ν+2) / (2^{2ν+1} n! (n+ν+1) Γ(ν+1)²)`.
pub fn e_coefficient(nu: f64, n: usize) -> Result<f64> {
    if !(nu >= -0.5) {
        return Err(Error::Domain(format!("e_coefficient needs nu >= -1/2, got {nu}")));
    }
    let nf = n as f64;
    let ln = PI.ln() + log_gamma(nf + 2.0 * nu + 2.0)?
        - (2.0 * nu + 1.0) * 2f64.ln()
        - log_gamma(nf + 1.0)?
        - (nf + nu + 1.0).ln()
        - 2.0 * log_gamma(nu + 1.0)?;
    Ok(ln.exp())
}
