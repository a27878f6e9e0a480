//! Power series at the singular endpoint of `w'' + (λ - ν(ν+1) ns²(x)) w = 0`.

use crate::elliptic::Modulus;
use crate::error::{Error, Result};

/// Taylor coefficients of `x² ns²(x, k)` up to `x^order`.
///
/// Built from the Taylor series of sn, cn, dn generated by
/// `sn' = cn dn`, `cn' = -sn dn`, `dn' = -k² sn cn`.
pub fn ns2_laurent(m: &Modulus, order: usize) -> Vec<f64> {
    let len = order + 2;
    let k2 = m.k() * m.k();
    let mut s = vec![0.0; len + 1];
    let mut c = vec![0.0; len + 1];
    let mut d = vec![0.0; len + 1];
    c[0] = 1.0;
    d[0] = 1.0;
    for j in 0..len {
        let (mut cd, mut sd, mut sc) = (0.0, 0.0, 0.0);
        for i in 0..=j {
            cd += c[i] * d[j - i];
            sd += s[i] * d[j - i];
            sc += s[i] * c[j - i];
        }
        let jp = (j + 1) as f64;
        s[j + 1] = cd / jp;
        c[j + 1] = -sd / jp;
        d[j + 1] = -k2 * sc / jp;
    }
    // sn(x)/x = sum sigma_j x^j
    let sigma: Vec<f64> = (0..=order).map(|j| s[j + 1]).collect();
    let mut inv = vec![0.0; order + 1];
    inv[0] = 1.0;
    for j in 1..=order {
        inv[j] = -(1..=j).map(|i| sigma[i] * inv[j - i]).sum::<f64>();
    }
    (0..=order).map(|j| (0..=j).map(|i| inv[i] * inv[j - i]).sum()).collect()
}

/// Coefficients `a_j` (with `a_0 = 1`) of the recessive solution
/// `Σ a_j x^{j+ν+1}` of `w'' = (ν(ν+1) ns²(x) - λ) w`.
pub fn frobenius_coefficients(nu: f64, lambda: f64, m: &Modulus, order: usize) -> Vec<f64> {
    let p = ns2_laurent(m, order);
    let nn = nu * (nu + 1.0);
    let q: Vec<f64> = p.iter().enumerate().map(|(i, &pi)| nn * pi - if i == 2 { lambda } else { 0.0 }).collect();
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    for j in 1..=order {
        let jf = j as f64;
        let s: f64 = (1..=j).map(|i| q[i] * a[j - i]).sum();
        a[j] = s / (jf * (jf + 2.0 * nu + 1.0));
    }
    a
}

/// Sum of `Σ a_j x^{j+ν+1}` and its x-derivative, plus the size of the
/// last nonzero term relative to the sum.
pub fn eval_series(a: &[f64], nu: f64, x: f64) -> (f64, f64, f64) {
    let mut w = 0.0;
    let mut dw = 0.0;
    let mut last = 0.0;
    let mut xp = 1.0;
    for (j, &aj) in a.iter().enumerate() {
        let e = j as f64 + nu + 1.0;
        let term = aj * xp;
        w += term;
        dw += e * term;
        if aj != 0.0 {
            last = term;
        }
        xp *= x;
    }
    let xe = x.powf(nu + 1.0);
    let rel = if w != 0.0 { (last / w).abs() } else { 0.0 };
    (w * xe, dw * xe / x, rel)
}

/// `(Σ a_j x^j)`, i.e. the series divided by `x^{ν+1}`.
pub fn eval_reduced(a: &[f64], x: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `∫_0^δ (Σ a_j x^{j+ν+1})² dx`.
pub fn square_integral(a: &[f64], nu: f64, delta: f64) -> f64 {
    let mut total = 0.0;
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &aj) in a.iter().enumerate() {
            if aj == 0.0 {
                continue;
            }
            let e = (i + j) as f64 + 2.0 * nu + 3.0;
            total += ai * aj * delta.powf(e) / e;
        }
    }
    total
}

/// Checked series evaluation: errors when the tail term is not negligible.
pub fn checked_seed(a: &[f64], nu: f64, x: f64) -> Result<(f64, f64)> {
    let (w, dw, rel) = eval_series(a, nu, x);
    if rel > 1e-10 || !w.is_finite() {
        return Err(Error::SeriesDivergence(format!("endpoint series at x = {x}: last term is {rel:.3e} of the sum")));
    }
    if rel > 1e-13 {
        log::debug!("endpoint series at x = {x}: truncation estimate {rel:.1e}");
    }
    Ok((w, dw))
}
