//! The Dirichlet problem in a peanut region and the integral
//! representation of external harmonics.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{HarmonicBasis, PeanutHarmonicIndex, TruncationSpec};
use crate::error::{Error, Result};
use crate::flatring::{meridian, region_classify, CartesianPoint, FlatRingCoords, PeanutRegion, Region};
use crate::quadrature::{endpoint_rule, gauss_legendre};

/// Quadrature settings for boundary projections. Zero node counts pick
/// a default from the truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletOptions {
    /// `g(t, φ)` behaves like `(K' ∓ t)^a` at the ends; `1/2` for data of
    /// the form `√R f` with `f` smooth.
    pub g_exponent: f64,
    pub t_nodes: usize,
    pub phi_nodes: usize,
}

impl Default for DirichletOptions {
    fn default() -> Self {
        Self { g_exponent: 0.5, t_nodes: 0, phi_nodes: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub m: i32,
    pub n: usize,
    pub re: f64,
    pub im: f64,
}

impl CoefficientEntry {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Coefficients `c_m^n` of a boundary function on `s = s₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub s0: f64,
    pub entries: Vec<CoefficientEntry>,
    /// Largest change of a coefficient when both node counts are doubled.
    pub doubling_change: f64,
}

impl CoefficientTable {
    pub fn get(&self, m: i32, n: usize) -> Option<Complex64> {
        self.entries.iter().find(|e| e.m == m && e.n == n).map(|e| e.value())
    }

    /// `[{m, n, re, im}, ...]`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.entries)?)
    }

    pub fn from_json(s0: f64, text: &str) -> Result<Self> {
        Ok(Self { s0, entries: serde_json::from_str(text)?, doubling_change: 0.0 })
    }
}

/// `g(t, φ)` sampled on a uniform product grid, interpolated by cubic
/// convolution (periodic in `φ`).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledBoundary {
    t: Vec<f64>,
    phi: Vec<f64>,
    values: Vec<Complex64>,
}

#[derive(Debug, Deserialize, Serialize)]
struct SampleRow {
    t: f64,
    phi: f64,
    re_g: f64,
    im_g: f64,
}

fn uniform(v: &[f64], what: &str) -> Result<()> {
    if v.len() < 4 {
        return Err(Error::Domain(format!("need at least 4 distinct {what} samples")));
    }
    let h = v[1] - v[0];
    if v.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0)) {
        return Err(Error::Domain(format!("{what} samples are not uniformly spaced")));
    }
    Ok(())
}

impl SampledBoundary {
    /// `t_grid` uniform, `phi_grid` uniform over one period starting anywhere.
    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(t_grid: Vec<f64>, phi_grid: Vec<f64>, g: F) -> Result<Self> {
        uniform(&t_grid, "t")?;
        uniform(&phi_grid, "phi")?;
        let values = t_grid.iter().flat_map(|&t| phi_grid.iter().map(move |&p| (t, p))).map(|(t, p)| g(t, p)).collect();
        Ok(Self { t: t_grid, phi: phi_grid, values })
    }

    /// Reads CSV rows `t,phi,re_g,im_g` (with header) covering a full grid.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let rows: Vec<SampleRow> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
        let distinct = |mut v: Vec<f64>| {
            v.sort_by(|a, b| a.total_cmp(b));
            v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            v
        };
        let t = distinct(rows.iter().map(|r| r.t).collect());
        let phi = distinct(rows.iter().map(|r| r.phi).collect());
        uniform(&t, "t")?;
        uniform(&phi, "phi")?;
        if rows.len() != t.len() * phi.len() {
            return Err(Error::Domain(format!(
                "expected {} samples on a {} x {} grid, got {}",
                t.len() * phi.len(),
                t.len(),
                phi.len(),
                rows.len()
            )));
        }
        let mut values = vec![Complex64::new(f64::NAN, 0.0); rows.len()];
        let (ht, hp) = (t[1] - t[0], phi[1] - phi[0]);
        for r in &rows {
            let i = ((r.t - t[0]) / ht).round() as usize;
            let j = ((r.phi - phi[0]) / hp).round() as usize;
            values[i * phi.len() + j] = Complex64::new(r.re_g, r.im_g);
        }
        if values.iter().any(|v| v.re.is_nan()) {
            return Err(Error::Domain("boundary samples contain duplicates or gaps".into()));
        }
        Ok(Self { t, phi, values })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for (i, &t) in self.t.iter().enumerate() {
            for (j, &phi) in self.phi.iter().enumerate() {
                let v = self.values[i * self.phi.len() + j];
                w.serialize(SampleRow { t, phi, re_g: v.re, im_g: v.im })?;
            }
        }
        w.flush()?;
        Ok(())
    }

    fn at(&self, i: isize, j: isize) -> Complex64 {
        let np = self.phi.len() as isize;
        let j = j.rem_euclid(np) as usize;
        let nt = self.t.len() as isize;
        // linear ghost values beyond the t range
        if i < 0 {
            return 2.0 * self.at(0, j as isize) - self.at(1, j as isize);
        }
        if i >= nt {
            return 2.0 * self.at(nt - 1, j as isize) - self.at(nt - 2, j as isize);
        }
        self.values[i as usize * self.phi.len() + j]
    }

    pub fn eval(&self, t: f64, phi: f64) -> Complex64 {
        let (ht, hp) = (self.t[1] - self.t[0], self.phi[1] - self.phi[0]);
        let last = (self.t.len() - 1) as f64;
        let u = ((t - self.t[0]) / ht).clamp(0.0, last);
        let v = (phi - self.phi[0]) / hp;
        let (i, j) = (u.floor().min(last - 1.0), v.floor());
        let (wt, wp) = (keys(u - i), keys(v - j));
        let (i, j) = (i as isize, j as isize);
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, wa) in wt.iter().enumerate() {
            for (b, wb) in wp.iter().enumerate() {
                acc += wa * wb * self.at(i + a as isize - 1, j + b as isize - 1);
            }
        }
        acc
    }
}

/// Cubic convolution weights for offsets `-1, 0, 1, 2`.
fn keys(f: f64) -> [f64; 4] {
    let (f2, f3) = (f * f, f * f * f);
    [0.5 * (-f3 + 2.0 * f2 - f), 0.5 * (3.0 * f3 - 5.0 * f2 + 2.0), 0.5 * (-3.0 * f3 + 4.0 * f2 + f), 0.5 * (f3 - f2)]
}

impl HarmonicBasis {
    /// `∫∫ e^{-imφ} g(t,φ) W_{|m|-1/2}^n(t) dt dφ` for `|m| ≤ m_max`,
    /// `n ≤ n_max`, indexed `[m + m_max][n]`.
    fn project<G>(&self, g: &G, m_max: usize, n_max: usize, nt: usize, nphi: usize, alpha: f64) -> Result<Vec<Vec<Complex64>>>
    where
        G: Fn(f64, f64) -> Complex64 + Sync,
    {
        let kp = self.modulus().big_k_prime();
        let rule = endpoint_rule(nt, alpha, -kp, kp)?;
        let mm = m_max as i32;
        // Fourier coefficients in φ at each t node (trapezoid rule)
        let fourier: Vec<Vec<Complex64>> = rule
            .nodes
            .par_iter()
            .map(|&t| {
                let samples: Vec<Complex64> = (0..nphi).map(|j| g(t, -PI + 2.0 * PI * j as f64 / nphi as f64)).collect();
                (-mm..=mm)
                    .map(|m| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (j, v) in samples.iter().enumerate() {
                            let phi = -PI + 2.0 * PI * j as f64 / nphi as f64;
                            acc += v * Complex64::from_polar(1.0, -(m as f64) * phi);
                        }
                        acc * (2.0 * PI / nphi as f64)
                    })
                    .collect()
            })
            .collect();
        let mut out = Vec::with_capacity(2 * m_max + 1);
        for m in -mm..=mm {
            let mut row = Vec::with_capacity(n_max + 1);
            for n in 0..=n_max {
                let b = self.mode(m, n)?;
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, (&t, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                    acc += w * b.w(t)? * fourier[i][(m + mm) as usize];
                }
                row.push(acc);
            }
            out.push(row);
        }
        Ok(out)
    }

    fn default_nodes(trunc: &TruncationSpec, opts: &DirichletOptions) -> (usize, usize) {
        let nt = if opts.t_nodes > 0 { opts.t_nodes } else { 2 * trunc.n_max + 40 };
        let nphi = if opts.phi_nodes > 0 { opts.phi_nodes } else { (4 * trunc.m_max + 16).max(64) };
        (nt, nphi)
    }

    /// Inner products `⟨g, J_{m,n}⟩` with the orthonormal system
    /// `J_{m,n} = W(t) e^{imφ} / √(2π)`.
    pub fn basis_projection<G>(&self, g: G, trunc: &TruncationSpec, opts: &DirichletOptions) -> Result<Vec<(i32, usize, Complex64)>>
    where
        G: Fn(f64, f64) -> Complex64 + Sync,
    {
        let (nt, nphi) = Self::default_nodes(trunc, opts);
        let alpha = (opts.g_exponent + 0.5).rem_euclid(1.0);
        let p = self.project(&g, trunc.m_max, trunc.n_max, nt, nphi, alpha)?;
        let mm = trunc.m_max as i32;
        let scale = 1.0 / (2.0 * PI).sqrt();
        Ok((-mm..=mm).flat_map(|m| (0..=trunc.n_max).map(move |n| (m, n))).map(|(m, n)| (m, n, scale * p[(m + mm) as usize][n])).collect())
    }

    /// `c_m^n = (2π W(is₀))^{-1} ∫∫ e^{-imφ} g(t,φ) W(t) dt dφ`, with a
    /// node-doubling check.
    pub fn dirichlet_coefficients<G>(
        &self,
        g: G,
        region: &PeanutRegion,
        trunc: &TruncationSpec,
        opts: &DirichletOptions,
    ) -> Result<CoefficientTable>
    where
        G: Fn(f64, f64) -> Complex64 + Sync,
    {
        if (region.modulus.k() - self.modulus().k()).abs() > 1e-15 {
            return Err(Error::Domain("region and basis use different moduli".into()));
        }
        let (nt, nphi) = Self::default_nodes(trunc, opts);
        let alpha = (opts.g_exponent + 0.5).rem_euclid(1.0);
        let coarse = self.project(&g, trunc.m_max, trunc.n_max, nt, nphi, alpha)?;
        let fine = self.project(&g, trunc.m_max, trunc.n_max, 2 * nt, 2 * nphi, alpha)?;
        let mm = trunc.m_max as i32;
        let mut entries = Vec::new();
        let mut change: f64 = 0.0;
        for m in -mm..=mm {
            for n in 0..=trunc.n_max {
                let b = self.mode(m, n)?;
                let denom = 2.0 * PI * b.phase() * b.u(region.s0)?;
                let c = fine[(m + mm) as usize][n] / denom;
                let c0 = coarse[(m + mm) as usize][n] / denom;
                change = change.max((c - c0).norm());
                entries.push(CoefficientEntry { m, n, re: c.re, im: c.im });
            }
        }
        if change > 1e-6 {
            log::warn!("boundary quadrature under-resolved: doubling nodes changed a coefficient by {change:.2e}");
        }
        Ok(CoefficientTable { s0: region.s0, entries, doubling_change: change })
    }

    /// Coefficients for boundary values `f` given on the surface in Cartesian
    /// form, i.e. `g = √R f`.
    pub fn dirichlet_coefficients_cartesian<F>(&self, f: F, region: &PeanutRegion, trunc: &TruncationSpec) -> Result<CoefficientTable>
    where
        F: Fn(&CartesianPoint) -> Complex64 + Sync,
    {
        let m = *self.modulus();
        let s0 = region.s0;
        let g = move |t: f64, phi: f64| {
            let (r, z) = meridian(s0, t, &m);
            let p = CartesianPoint::new(r * phi.cos(), r * phi.sin(), z);
            r.sqrt() * f(&p)
        };
        self.dirichlet_coefficients(g, region, trunc, &DirichletOptions::default())
    }

    /// `u(r) = Σ c_m^n G_m^n(r)` inside the peanut (`s < s₀`).
    pub fn dirichlet_solve(&self, table: &CoefficientTable, c: &FlatRingCoords, trunc: &TruncationSpec) -> Result<Complex64> {
        if !(c.s < table.s0) {
            return Err(Error::Precondition(format!("the series solution needs s < s0, got s = {}, s0 = {}", c.s, table.s0)));
        }
        let mut by_m: std::collections::BTreeMap<i32, Vec<&CoefficientEntry>> = Default::default();
        for e in &table.entries {
            by_m.entry(e.m).or_default().push(e);
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (m, mut list) in by_m {
            list.sort_by_key(|e| e.n);
            let mut small = 0;
            for e in list {
                let term = e.value() * self.internal_g(PeanutHarmonicIndex::new(m, e.n), c)?;
                total += term;
                if term.norm() < trunc.tol * total.norm() {
                    small += 1;
                    if small >= 3 {
                        break;
                    }
                } else {
                    small = 0;
                }
            }
        }
        Ok(total)
    }

    /// `H_m^n(r*)` from the surface integral over `s = s₀`, using
    /// `dS / h = R dt dφ`:
    /// `H = (w / (4π W(is₀))) ∫∫ √R W(t) e^{imφ} / ‖r - r*‖ dt dφ`.
    /// Node counts are doubled until the value settles to `1e-10`.
    pub fn external_from_integral(&self, idx: PeanutHarmonicIndex, region: &PeanutRegion, p_star: &CartesianPoint) -> Result<Complex64> {
        if region_classify(p_star, region) != Region::Exterior {
            return Err(Error::Precondition("the field point must lie outside the closed peanut".into()));
        }
        let b = self.mode(idx.m, idx.n)?;
        let m = *self.modulus();
        let kp = m.big_k_prime();
        let pre = b.phase() * b.wronskian / (4.0 * PI * b.u(region.s0)?);
        let eval = |nt: usize, nphi: usize| -> Result<Complex64> {
            let rule = gauss_legendre(nt).mapped(-kp, kp);
            let parts = rule
                .nodes
                .par_iter()
                .zip(&rule.weights)
                .map(|(&t, &w)| -> Result<Complex64> {
                    let (r, z) = meridian(region.s0, t, &m);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..nphi {
                        let phi = -PI + 2.0 * PI * j as f64 / nphi as f64;
                        let p = CartesianPoint::new(r * phi.cos(), r * phi.sin(), z);
                        acc += Complex64::from_polar(1.0, idx.m as f64 * phi) / p.distance(p_star);
                    }
                    Ok(w * r.sqrt() * b.w(t)? * acc * (2.0 * PI / nphi as f64))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(pre * parts.into_iter().sum::<Complex64>())
        };
        let (mut nt, mut nphi) = (48, 48);
        let mut prev = eval(nt, nphi)?;
        for _ in 0..5 {
            nt *= 2;
            nphi *= 2;
            let next = eval(nt, nphi)?;
            if (next - prev).norm() <= 1e-10 * next.norm().max(1e-300) {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::Quadrature(format!("surface integral for H_{}^{} did not settle with {nt} x {nphi} nodes", idx.m, idx.n)))
    }
}
