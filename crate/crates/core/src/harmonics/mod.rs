//! Internal and external peanut harmonics and the expansion of `1/‖r − r*‖`.
//!
//! Order `m` harmonics use the modes `W_{|m|-1/2}^n(·, k')`. On the
//! imaginary axis a mode is stored as a real `Ũ(s)` with `W(is) = i^p Ũ(s)`,
//! `p = n mod 2`. Expansion terms pair two such factors with one Wronskian,
//! `w = (-1)^p w̃`, so the phases cancel and the fast path stays real.

mod chi;
mod dirichlet;

pub use chi::{azimuthal_fourier, chi, chi_cartesian, chi_complex, chi_shifted, f_real, fourier_sum};
pub use dirichlet::{CoefficientEntry, CoefficientTable, DirichletOptions, SampledBoundary};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::elliptic::Modulus;
use crate::error::{Error, Result};
use crate::flatring::{meridian, CartesianPoint, FlatRingCoords, InverseMap};
use crate::lame::{LameMode, LameProblem, ModeCache};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeanutHarmonicIndex {
    pub m: i32,
    pub n: usize,
}

impl PeanutHarmonicIndex {
    pub fn new(m: i32, n: usize) -> Self {
        Self { m, n }
    }

    /// `ν = |m| - 1/2`.
    pub fn nu(&self) -> f64 {
        self.m.unsigned_abs() as f64 - 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub m_max: usize,
    pub n_max: usize,
    /// A series in `n` stops after three consecutive terms below
    /// `tol` times the running sum.
    pub tol: f64,
}

impl TruncationSpec {
    pub fn new(m_max: usize, n_max: usize, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("truncation tolerance must be positive, got {tol}")));
        }
        Ok(Self { m_max, n_max, tol })
    }
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self { m_max: 12, n_max: 25, tol: 1e-15 }
    }
}

/// A solved mode with its real Wronskian `w̃ = Ũ(2K-s)Ũ'(s) + Ũ'(2K-s)Ũ(s)`.
#[derive(Debug, Clone)]
pub struct BasisMode {
    pub mode: LameMode,
    pub wronskian: f64,
}

impl BasisMode {
    /// `w_m^n = (-1)^p w̃`.
    pub fn signed_wronskian(&self) -> f64 {
        self.mode.parity.sign() * self.wronskian
    }

    pub fn u(&self, s: f64) -> Result<f64> {
        Ok(self.mode.eval_u(s)?.0)
    }

    pub fn w(&self, t: f64) -> Result<f64> {
        self.mode.eval_w(t)
    }

    /// `i^p`.
    pub fn phase(&self) -> Complex64 {
        self.mode.phase().to_complex()
    }
}

/// Result of a truncated expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub value: f64,
    pub terms_used: usize,
    pub tail_estimate: f64,
}

/// All modes with `|m| ≤ m_max`, `n ≤ n_max` for one coordinate modulus.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    modulus: Modulus,
    modes: Vec<Vec<BasisMode>>,
    inverse: InverseMap,
}

impl HarmonicBasis {
    pub fn new(modulus: Modulus, m_max: usize, n_max: usize) -> Result<Self> {
        Self::with_cache(modulus, m_max, n_max, &mut ModeCache::in_memory())
    }

    /// Solves the modes in parallel, reusing and then updating `cache`.
    pub fn with_cache(modulus: Modulus, m_max: usize, n_max: usize, cache: &mut ModeCache) -> Result<Self> {
        let kappa = modulus.complement();
        let problems = (0..=m_max)
            .flat_map(|m| (0..=n_max).map(move |n| (m, n)))
            .map(|(m, n)| LameProblem::new(m as f64 - 0.5, n, kappa))
            .collect::<Result<Vec<_>>>()?;
        let shared: &ModeCache = cache;
        let solved = problems
            .par_iter()
            .map(|p| {
                let mode = shared.solve(p)?;
                let wronskian = mode.wronskian()?;
                Ok(BasisMode { mode, wronskian })
            })
            .collect::<Result<Vec<_>>>()?;
        for b in &solved {
            cache.insert(&b.mode);
        }
        let mut modes: Vec<Vec<BasisMode>> = Vec::with_capacity(m_max + 1);
        let mut it = solved.into_iter();
        for _ in 0..=m_max {
            modes.push(it.by_ref().take(n_max + 1).collect());
        }
        Ok(Self { modulus, modes, inverse: InverseMap::new(modulus) })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn m_max(&self) -> usize {
        self.modes.len() - 1
    }

    pub fn n_max(&self) -> usize {
        self.modes[0].len() - 1
    }

    pub fn inverse_map(&self) -> &InverseMap {
        &self.inverse
    }

    pub fn mode(&self, m: i32, n: usize) -> Result<&BasisMode> {
        self.modes.get(m.unsigned_abs() as usize).and_then(|row| row.get(n)).ok_or_else(|| {
            Error::Domain(format!("mode (m = {m}, n = {n}) outside the basis (|m| <= {}, n <= {})", self.m_max(), self.n_max()))
        })
    }

    fn check(&self, c: &FlatRingCoords) -> Result<()> {
        if (c.modulus.k() - self.modulus.k()).abs() > 1e-15 {
            return Err(Error::Domain(format!("point uses modulus {} but the basis was built for {}", c.modulus.k(), self.modulus.k())));
        }
        Ok(())
    }

    /// `G_m^n(r) = R^{-1/2} W(is, k') W(t, k') e^{imφ}`.
    pub fn internal_g(&self, idx: PeanutHarmonicIndex, c: &FlatRingCoords) -> Result<Complex64> {
        self.check(c)?;
        let b = self.mode(idx.m, idx.n)?;
        let (r, _) = meridian(c.s, c.t, &self.modulus);
        let real = b.u(c.s)? * b.w(c.t)? / r.sqrt();
        Ok(b.phase() * real * Complex64::from_polar(1.0, idx.m as f64 * c.phi))
    }

    /// `H_m^n(r) = R^{-1/2} W(2iK - is, k') W(t, k') e^{imφ}`.
    pub fn external_h(&self, idx: PeanutHarmonicIndex, c: &FlatRingCoords) -> Result<Complex64> {
        self.check(c)?;
        let b = self.mode(idx.m, idx.n)?;
        let (r, _) = meridian(c.s, c.t, &self.modulus);
        let real = b.u(2.0 * self.modulus.big_k() - c.s)? * b.w(c.t)? / r.sqrt();
        Ok(b.phase() * real * Complex64::from_polar(1.0, idx.m as f64 * c.phi))
    }

    pub fn internal_g_at(&self, idx: PeanutHarmonicIndex, p: &CartesianPoint) -> Result<Complex64> {
        self.internal_g(idx, &self.inverse.from_cartesian(p)?)
    }

    pub fn external_h_at(&self, idx: PeanutHarmonicIndex, p: &CartesianPoint) -> Result<Complex64> {
        self.external_h(idx, &self.inverse.from_cartesian(p)?)
    }

    /// The signed Wronskian `w_m^n = (-1)^p w̃`.
    pub fn wronskian(&self, m: i32, n: usize) -> Result<f64> {
        Ok(self.mode(m, n)?.signed_wronskian())
    }

    /// `2 Ũ(s) Ũ(2K-s*) W(t) W(t*) / (w̃ √(RR*))`, the coefficient of
    /// `e^{im(φ-φ*)}` contributed by `(m, n)` to the expansion.
    pub fn expansion_term(&self, m: i32, n: usize, s: f64, t: f64, s_star: f64, t_star: f64) -> Result<f64> {
        let b = self.mode(m, n)?;
        let (r, _) = meridian(s, t, &self.modulus);
        let (rs, _) = meridian(s_star, t_star, &self.modulus);
        let u = b.u(s)? * b.u(2.0 * self.modulus.big_k() - s_star)?;
        Ok(2.0 * u * b.w(t)? * b.w(t_star)? / (b.wronskian * (r * rs).sqrt()))
    }

    /// The `n`-sum `2π Σ_n Ũ(s)W(t)Ũ(2K-s*)W(t*)/w̃`, which equals
    /// `Q_{m-1/2}(χ)`. Returns the sum and a geometric tail estimate.
    pub fn addition_sum(&self, m: i32, s: f64, t: f64, s_star: f64, t_star: f64, n_max: usize) -> Result<(f64, f64)> {
        let k2 = 2.0 * self.modulus.big_k();
        let mut sum = 0.0;
        let mut terms = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let b = self.mode(m, n)?;
            let term = 2.0 * PI * b.u(s)? * b.w(t)? * b.u(k2 - s_star)? * b.w(t_star)? / b.wronskian;
            sum += term;
            terms.push(term);
        }
        Ok((sum, geometric_tail(&terms)))
    }

    fn check_order(&self, c: &FlatRingCoords, c_star: &FlatRingCoords) -> Result<()> {
        self.check(c)?;
        self.check(c_star)?;
        if !(c.s < c_star.s) {
            return Err(Error::Precondition(format!("the expansion needs s < s*, got s = {}, s* = {}", c.s, c_star.s)));
        }
        Ok(())
    }

    /// `1/‖r - r*‖ = 2 Σ_m Σ_n G_m^n(r) H_{-m}^n(r*) / w_m^n` for `s < s*`,
    /// summed in real form with `±m` paired.
    pub fn expand_inverse_distance(&self, c: &FlatRingCoords, c_star: &FlatRingCoords, trunc: &TruncationSpec) -> Result<Expansion> {
        self.check_order(c, c_star)?;
        if trunc.m_max > self.m_max() || trunc.n_max > self.n_max() {
            return Err(Error::Domain("truncation exceeds the solved basis".into()));
        }
        let dphi = c.phi - c_star.phi;
        let mut total = 0.0;
        let mut terms_used = 0;
        let mut tail = 0.0;
        let mut m_sums = Vec::with_capacity(trunc.m_max + 1);
        for m in 0..=trunc.m_max {
            let weight = if m == 0 { 1.0 } else { 2.0 * (m as f64 * dphi).cos() };
            let mut a_m = 0.0;
            let mut small = 0;
            let mut terms = Vec::new();
            for n in 0..=trunc.n_max {
                let term = self.expansion_term(m as i32, n, c.s, c.t, c_star.s, c_star.t)?;
                a_m += term;
                terms.push(term);
                terms_used += 1;
                let scale = (total + weight * a_m).abs().max(a_m.abs());
                if term.abs() < trunc.tol * scale {
                    small += 1;
                    if small >= 3 {
                        break;
                    }
                } else {
                    small = 0;
                }
            }
            if small < 3 {
                tail += (if m == 0 { 1.0 } else { 2.0 }) * geometric_tail(&terms);
            }
            total += weight * a_m;
            m_sums.push((if m == 0 { 1.0 } else { 2.0 }) * a_m);
        }
        tail += geometric_tail(&m_sums);
        if tail > 10.0 * trunc.tol * total.abs() {
            log::warn!("expansion not converged at m_max = {}, n_max = {}: tail estimate {tail:.2e}", trunc.m_max, trunc.n_max);
        }
        Ok(Expansion { value: total, terms_used, tail_estimate: tail })
    }

    /// The same double sum evaluated term by term in complex arithmetic
    /// from [`Self::internal_g`], [`Self::external_h`] and `w_m^n`.
    pub fn expand_inverse_distance_complex(
        &self,
        c: &FlatRingCoords,
        c_star: &FlatRingCoords,
        trunc: &TruncationSpec,
    ) -> Result<Complex64> {
        self.check_order(c, c_star)?;
        let mut total = Complex64::new(0.0, 0.0);
        let m_max = trunc.m_max as i32;
        for m in -m_max..=m_max {
            for n in 0..=trunc.n_max {
                let g = self.internal_g(PeanutHarmonicIndex::new(m, n), c)?;
                let h = self.external_h(PeanutHarmonicIndex::new(-m, n), c_star)?;
                total += 2.0 * g * h / self.wronskian(m, n)?;
            }
        }
        Ok(total)
    }
}

/// Geometric extrapolation of the tail from the last three terms.
pub fn geometric_tail(terms: &[f64]) -> f64 {
    let nz: Vec<f64> = terms.iter().map(|t| t.abs()).filter(|t| *t > 0.0).collect();
    let Some(&last) = nz.last() else {
        return 0.0;
    };
    if nz.len() < 3 {
        return last;
    }
    let ratio = (last / nz[nz.len() - 3]).sqrt();
    if ratio < 0.999 {
        last * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}
