//! The toroidal argument `χ` and the azimuthal Fourier series of `1/‖r − r*‖`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::elliptic::Modulus;
use crate::error::{Error, Result};
use crate::flatring::CartesianPoint;
use crate::specfun::legendre_q;

/// `χ(s, t, s*, t*)` from the elliptic product form. Valid for any real
/// `s, s*` and `t, t* ∈ (-K', K')`.
pub fn chi(s: f64, t: f64, s_star: f64, t_star: f64, m: &Modulus) -> f64 {
    let (k, kp) = (m.k(), m.k_prime());
    let c = m.complement();
    let (sn1, cn1, dn1) = m.sn_cn_dn(s);
    let (sn2, cn2, dn2) = m.sn_cn_dn(s_star);
    // sn(it) = i sc(t,k'), cn(it) = nc(t,k'), dn(it) = dc(t,k')
    let (a1, b1, d1) = c.sn_cn_dn(t);
    let (a2, b2, d2) = c.sn_cn_dn(t_star);
    let num = -k * k * sn1 * sn2 * a1 * a2 - (k * k / (kp * kp)) * cn1 * cn2 + dn1 * dn2 * d1 * d2 / (kp * kp);
    num / (b1 * b2)
}

/// `χ` for complex `s, s*` given their `(sn, cn, dn)` triples.
pub fn chi_complex(
    first: (Complex64, Complex64, Complex64),
    t: f64,
    second: (Complex64, Complex64, Complex64),
    t_star: f64,
    m: &Modulus,
) -> Complex64 {
    let (k, kp) = (m.k(), m.k_prime());
    let c = m.complement();
    let (a1, b1, d1) = c.sn_cn_dn(t);
    let (a2, b2, d2) = c.sn_cn_dn(t_star);
    let num = -k * k * first.0 * second.0 * a1 * a2 - (k * k / (kp * kp)) * first.1 * second.1 + first.2 * second.2 * d1 * d2 / (kp * kp);
    num / (b1 * b2)
}

/// `χ(iu, t, K + iu, t₀)`, built from
/// `sn(iu) = i sc(u,k')`, `cn(iu) = nc(u,k')`, `dn(iu) = dc(u,k')` and
/// `sn(K+iu) = nd(u,k')`, `cn(K+iu) = -ik' sd(u,k')`, `dn(K+iu) = k' cd(u,k')`.
pub fn chi_shifted(u: f64, t: f64, t0: f64, m: &Modulus) -> Complex64 {
    let kp = m.k_prime();
    let (sn, cn, dn) = m.complement().sn_cn_dn(u);
    let i = Complex64::i();
    let first = (i * (sn / cn), Complex64::from(1.0 / cn), Complex64::from(dn / cn));
    let second = (Complex64::from(1.0 / dn), -i * kp * sn / dn, Complex64::from(kp * cn / dn));
    chi_complex(first, t, second, t0, m)
}

/// `f(t, t₀) = (k/k') nc(t,k') nc(t₀,k') - k sc(t,k') sc(t₀,k')`.
pub fn f_real(t: f64, t0: f64, m: &Modulus) -> f64 {
    let (k, kp) = (m.k(), m.k_prime());
    let c = m.complement();
    let (a1, b1, _) = c.sn_cn_dn(t);
    let (a2, b2, _) = c.sn_cn_dn(t0);
    k * (1.0 / kp - a1 * a2) / (b1 * b2)
}

/// `(R² + R*² + (z - z*)²) / (2RR*)`.
pub fn chi_cartesian(p: &CartesianPoint, q: &CartesianPoint) -> Result<f64> {
    let (r, rs) = (p.cyl_r(), q.cyl_r());
    if r == 0.0 || rs == 0.0 {
        return Err(Error::Domain("chi is undefined on the z-axis".into()));
    }
    Ok((r * r + rs * rs + (p.z - q.z).powi(2)) / (2.0 * r * rs))
}

/// Fourier coefficients `Q_{m-1/2}(χ) / (π √(RR*))`, `m = 0..=m_max`, of
/// `1/‖r - r*‖` in `φ - φ*`.
pub fn azimuthal_fourier(p: &CartesianPoint, q: &CartesianPoint, m_max: usize) -> Result<Vec<f64>> {
    let chi = chi_cartesian(p, q)?;
    if !(chi > 1.0) {
        return Err(Error::Domain("azimuthal Fourier series needs distinct meridian points".into()));
    }
    let pre = 1.0 / (PI * (p.cyl_r() * q.cyl_r()).sqrt());
    (0..=m_max).map(|m| Ok(pre * legendre_q(m as f64 - 0.5, chi)?)).collect()
}

/// `c₀ + 2 Σ_{m≥1} c_m cos(m Δφ)`.
pub fn fourier_sum(coeffs: &[f64], dphi: f64) -> f64 {
    coeffs.iter().enumerate().map(|(m, c)| if m == 0 { *c } else { 2.0 * c * (m as f64 * dphi).cos() }).sum()
}
