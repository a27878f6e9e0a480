//! Complete elliptic integrals and Jacobian elliptic functions.
//!
//! `K(k)` is computed with the arithmetic–geometric mean, `sn`, `cn`, `dn`
//! with the descending Landen transformation. Imaginary arguments are handled
//! through Jacobi's imaginary transformation and returned as a real magnitude
//! plus a flag, so callers never need complex arithmetic.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Moduli closer than this to 0 or 1 are clamped.
pub const MODULUS_CLAMP: f64 = 1e-12;

/// Denominators smaller than this are reported as poles.
pub const POLE_TOL: f64 = 1e-13;

/// Arithmetic–geometric mean of two positive numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if (an - bn).abs() <= 1e-16 * an {
            return 0.5 * (an + bn);
        }
        a = an;
        b = bn;
    }
    0.5 * (a + b)
}

fn check_open_unit(k: f64) -> Result<()> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain(format!("modulus k = {k} is not in (0, 1)")));
    }
    Ok(())
}

/// Complete elliptic integral of the first kind, `K(k)`.
pub fn complete_k(k: f64) -> Result<f64> {
    check_open_unit(k)?;
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    Ok(PI / (2.0 * agm(1.0, kp)))
}

/// An elliptic modulus together with its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    k: f64,
    k_prime: f64,
    big_k: f64,
    big_k_prime: f64,
    omega: f64,
}

impl Modulus {
    /// Builds a modulus from `k`, clamping values within `MODULUS_CLAMP` of 0 or 1.
    pub fn new(k: f64) -> Result<Self> {
        check_open_unit(k)?;
        let k = if k < MODULUS_CLAMP {
            log::warn!("modulus {k} clamped to {MODULUS_CLAMP}");
            MODULUS_CLAMP
        } else if 1.0 - k < MODULUS_CLAMP {
            log::warn!("modulus {k} clamped to 1 - {MODULUS_CLAMP}");
            1.0 - MODULUS_CLAMP
        } else {
            k
        };
        let kp = ((1.0 - k) * (1.0 + k)).sqrt();
        Ok(Self::from_pair(k, kp))
    }

    /// Builds the modulus whose complement is `k_prime`. Accurate when `k` is close to 1.
    pub fn from_complement(k_prime: f64) -> Result<Self> {
        Ok(Self::new(k_prime)?.complement())
    }

    fn from_pair(k: f64, k_prime: f64) -> Self {
        let big_k = PI / (2.0 * agm(1.0, k_prime));
        let big_k_prime = PI / (2.0 * agm(1.0, k));
        Self { k, k_prime, big_k, big_k_prime, omega: PI / (2.0 * big_k) }
    }

    /// The complementary modulus `k'`, with `K` and `K'` swapped.
    pub fn complement(&self) -> Self {
        Self { k: self.k_prime, k_prime: self.k, big_k: self.big_k_prime, big_k_prime: self.big_k, omega: PI / (2.0 * self.big_k_prime) }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn k_prime(&self) -> f64 {
        self.k_prime
    }

    /// Quarter period `K(k)`.
    pub fn big_k(&self) -> f64 {
        self.big_k
    }

    /// Complementary quarter period `K'(k) = K(k')`.
    pub fn big_k_prime(&self) -> f64 {
        self.big_k_prime
    }

    /// `ω = π / (2K)`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn sn_cn_dn(&self, u: f64) -> (f64, f64, f64) {
        sn_cn_dn(u, self)
    }
}

/// `(sn, cn, dn)` at real `u` by the descending Landen transformation.
pub fn sn_cn_dn(u: f64, m: &Modulus) -> (f64, f64, f64) {
    let period = 4.0 * m.big_k;
    let u = u - period * (u / period).round();

    let mut a = [0.0f64; 24];
    let mut c = [0.0f64; 24];
    a[0] = 1.0;
    let mut b = m.k_prime;
    c[0] = m.k;
    let mut n = 0;
    while n + 1 < a.len() && c[n] > 1e-16 * a[n] {
        let an = 0.5 * (a[n] + b);
        let cn = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
        a[n] = an;
        c[n] = cn;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    let dn = (m.k_prime * m.k_prime + m.k * m.k * cn * cn).sqrt();
    (sn, cn, dn)
}

/// Public convenience: `(sn, cn, dn)` for a bare modulus value.
pub fn jacobi_sn_cn_dn(u: f64, k: f64) -> Result<(f64, f64, f64)> {
    if !u.is_finite() {
        return Err(Error::Domain(format!("argument u = {u} is not finite")));
    }
    let m = Modulus::new(k)?;
    Ok(sn_cn_dn(u, &m))
}

/// The twelve Glaisher quotients (including the three basic functions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Glaisher {
    Sc,
    Cs,
    Nc,
    Ns,
    Dc,
    Nd,
    Cd,
    Dn,
    Sn,
    Cn,
    Sd,
    Ds,
}

impl Glaisher {
    pub const ALL: [Glaisher; 12] = [
        Glaisher::Sc,
        Glaisher::Cs,
        Glaisher::Nc,
        Glaisher::Ns,
        Glaisher::Dc,
        Glaisher::Nd,
        Glaisher::Cd,
        Glaisher::Dn,
        Glaisher::Sn,
        Glaisher::Cn,
        Glaisher::Sd,
        Glaisher::Ds,
    ];

    /// Numerator and denominator picked out of `(sn, cn, dn)`; `n` is 1.
    fn parts(self, sn: f64, cn: f64, dn: f64) -> (f64, f64) {
        match self {
            Glaisher::Sc => (sn, cn),
            Glaisher::Cs => (cn, sn),
            Glaisher::Nc => (1.0, cn),
            Glaisher::Ns => (1.0, sn),
            Glaisher::Dc => (dn, cn),
            Glaisher::Nd => (1.0, dn),
            Glaisher::Cd => (cn, dn),
            Glaisher::Dn => (dn, 1.0),
            Glaisher::Sn => (sn, 1.0),
            Glaisher::Cn => (cn, 1.0),
            Glaisher::Sd => (sn, dn),
            Glaisher::Ds => (dn, sn),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Glaisher::Sc => "sc",
            Glaisher::Cs => "cs",
            Glaisher::Nc => "nc",
            Glaisher::Ns => "ns",
            Glaisher::Dc => "dc",
            Glaisher::Nd => "nd",
            Glaisher::Cd => "cd",
            Glaisher::Dn => "dn",
            Glaisher::Sn => "sn",
            Glaisher::Cn => "cn",
            Glaisher::Sd => "sd",
            Glaisher::Ds => "ds",
        }
    }
}

impl fmt::Display for Glaisher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Glaisher {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Glaisher::ALL.into_iter().find(|g| g.name() == s).ok_or_else(|| Error::Domain(format!("unknown Glaisher code '{s}'")))
    }
}

pub fn glaisher_at(code: Glaisher, u: f64, m: &Modulus) -> Result<f64> {
    let (sn, cn, dn) = sn_cn_dn(u, m);
    let (num, den) = code.parts(sn, cn, dn);
    if den.abs() < POLE_TOL {
        return Err(Error::Pole { function: code.to_string(), u });
    }
    Ok(num / den)
}

/// Glaisher quotient `code(u, k)`, e.g. `dc = dn / cn`.
pub fn glaisher(code: Glaisher, u: f64, k: f64) -> Result<f64> {
    glaisher_at(code, u, &Modulus::new(k)?)
}

/// Basic Jacobian function selector for the imaginary transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobiFn {
    Sn,
    Cn,
    Dn,
}

/// Value of `f(i t, k)` via Jacobi's imaginary transformation.
///
/// `sn(it,k) = i sc(t,k')`, `cn(it,k) = nc(t,k')`, `dn(it,k) = dc(t,k')`.
/// The second component is `true` when the value is purely imaginary, in which
/// case the first component is the coefficient of `i`.
pub fn imag_transform_at(f: JacobiFn, t: f64, m: &Modulus) -> Result<(f64, bool)> {
    let (sn, cn, dn) = sn_cn_dn(t, &m.complement());
    if cn.abs() < POLE_TOL {
        return Err(Error::Pole { function: format!("{f:?}(i t)").to_lowercase(), u: t });
    }
    Ok(match f {
        JacobiFn::Sn => (sn / cn, true),
        JacobiFn::Cn => (1.0 / cn, false),
        JacobiFn::Dn => (dn / cn, false),
    })
}

pub fn imag_transform(f: JacobiFn, t: f64, k: f64) -> Result<(f64, bool)> {
    imag_transform_at(f, t, &Modulus::new(k)?)
}
