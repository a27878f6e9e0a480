//! Flat-ring cyclide coordinates `(s, t, φ)` with `s ∈ (0, 2K)`,
//! `t ∈ (-K', K')`, and the peanut surfaces `s = s₀`.
//!
//! Functions of `s` use the coordinate modulus `k`, functions of `t` its
//! complement `k'`, so every formula below is real.

use std::f64::consts::PI;
use std::io::Write;

use crate::elliptic::Modulus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatRingCoords {
    pub s: f64,
    pub t: f64,
    pub phi: f64,
    pub modulus: Modulus,
}

impl FlatRingCoords {
    pub fn new(s: f64, t: f64, phi: f64, modulus: Modulus) -> Result<Self> {
        let (k2, kp) = (2.0 * modulus.big_k(), modulus.big_k_prime());
        if !(s > 0.0 && s < k2) {
            return Err(Error::Domain(format!("s = {s} outside (0, 2K = {k2})")));
        }
        if !(t.abs() < kp) {
            return Err(Error::Domain(format!("t = {t} outside (-K', K'), K' = {kp}")));
        }
        if !phi.is_finite() {
            return Err(Error::Domain("phi must be finite".into()));
        }
        Ok(Self { s, t, phi: wrap_angle(phi), modulus })
    }
}

/// Wraps to `[-π, π)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CartesianPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn cyl_r(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, o: &CartesianPoint) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2) + (self.z - o.z).powi(2)).sqrt()
    }
}

/// The peanut `s = s₀` and its interior `D₂ = {s < s₀}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeanutRegion {
    pub s0: f64,
    pub modulus: Modulus,
}

impl PeanutRegion {
    pub fn new(s0: f64, modulus: Modulus) -> Result<Self> {
        if !(s0 > 0.0 && s0 < 2.0 * modulus.big_k()) {
            return Err(Error::Domain(format!("s0 = {s0} outside (0, 2K)")));
        }
        Ok(Self { s0, modulus })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
    Exterior,
}

/// `b = (1 - k)/k'`.
pub fn b_param(k: f64) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain(format!("modulus {k} outside (0, 1)")));
    }
    Ok((1.0 - k) / (1.0 - k * k).sqrt())
}

/// `b = √((1 - k)/(1 + k))`, the second form.
pub fn b_param_sqrt(k: f64) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain(format!("modulus {k} outside (0, 1)")));
    }
    Ok(((1.0 - k) / (1.0 + k)).sqrt())
}

/// `(R, z)` of the meridian point `(s, t)`.
pub fn meridian(s: f64, t: f64, m: &Modulus) -> (f64, f64) {
    let (k, kp) = (m.k(), m.k_prime());
    let (sn, cn, dn) = m.sn_cn_dn(s);
    let (snt, cnt, dnt) = m.complement().sn_cn_dn(t);
    let den = k * cn + dn * dnt;
    (kp * cnt / den, k * kp * sn * snt / den)
}

/// `1/R` from the sum form `dn(s) dn(it)/k' + k cn(s) cn(it)/k'`.
pub fn inverse_r_sum_form(s: f64, t: f64, m: &Modulus) -> f64 {
    let (k, kp) = (m.k(), m.k_prime());
    let (_, cn, dn) = m.sn_cn_dn(s);
    let (_, cnt, dnt) = m.complement().sn_cn_dn(t);
    // dn(it, k) = dc(t, k'), cn(it, k) = nc(t, k')
    dn * (dnt / cnt) / kp + k / kp * cn / cnt
}

pub fn to_cartesian(c: &FlatRingCoords) -> CartesianPoint {
    let (r, z) = meridian(c.s, c.t, &c.modulus);
    CartesianPoint::new(r * c.phi.cos(), r * c.phi.sin(), z)
}

/// `(R, z)` and the Jacobian `[[R_s, R_t], [z_s, z_t]]`.
fn meridian_jacobian(s: f64, t: f64, m: &Modulus) -> ((f64, f64), [[f64; 2]; 2]) {
    let (k, kp) = (m.k(), m.k_prime());
    let (sn, cn, dn) = m.sn_cn_dn(s);
    let (snt, cnt, dnt) = m.complement().sn_cn_dn(t);
    let den = k * cn + dn * dnt;
    let r = kp * cnt / den;
    let z = k * kp * sn * snt / den;
    let den_s = -k * sn * (dn + k * cn * dnt);
    let den_t = -dn * kp * kp * snt * cnt;
    let r_s = -r * den_s / den;
    let r_t = -kp * snt * dnt / den - r * den_t / den;
    let z_s = k * kp * cn * dn * snt / den - z * den_s / den;
    let z_t = k * kp * sn * cnt * dnt / den - z * den_t / den;
    ((r, z), [[r_s, r_t], [z_s, z_t]])
}

const GRID: usize = 32;

/// Inverse of the meridian map by damped Newton from the nearest points of
/// a precomputed `32 × 32` grid. Build once per modulus and share.
#[derive(Debug, Clone)]
pub struct InverseMap {
    modulus: Modulus,
    grid: Vec<(f64, f64, f64, f64)>,
}

impl InverseMap {
    pub fn new(modulus: Modulus) -> Self {
        let (k2, kp) = (2.0 * modulus.big_k(), modulus.big_k_prime());
        let mut grid = Vec::with_capacity(GRID * GRID);
        for i in 0..GRID {
            let s = k2 * (i as f64 + 0.5) / GRID as f64;
            for j in 0..GRID {
                let t = kp * (2.0 * (j as f64 + 0.5) / GRID as f64 - 1.0);
                let (r, z) = meridian(s, t, &modulus);
                grid.push((s, t, r, z));
            }
        }
        Self { modulus, grid }
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Coordinates `(s, t)` of the meridian point `(R, z)`, `R > 0`.
    pub fn invert_meridian(&self, r: f64, z: f64) -> Result<(f64, f64)> {
        let b = b_param(self.modulus.k())?;
        if !(r > 1e-10) {
            return Err(Error::Domain(format!("point on the z-axis (R = {r})")));
        }
        if z.abs() <= 1e-10 && (r <= b + 1e-10 || r >= 1.0 / b - 1e-10) {
            return Err(Error::Domain(format!("point (R = {r}, z = {z}) lies on a cut of the chart")));
        }
        // outside the unit sphere, solve for the inverted point and use s ↦ 2K - s
        let rho2 = r * r + z * z;
        if rho2 > 1.0 {
            let (s, t) = self.solve_meridian(r / rho2, z / rho2)?;
            return Ok((2.0 * self.modulus.big_k() - s, t));
        }
        self.solve_meridian(r, z)
    }

    fn solve_meridian(&self, r: f64, z: f64) -> Result<(f64, f64)> {
        // match in log-polar distance so far and near points weigh alike
        let key = |rr: f64, zz: f64| {
            let rho = rr.hypot(zz);
            (rho.ln(), zz.atan2(rr))
        };
        let target = key(r, z);
        let mut order: Vec<(f64, usize)> = self
            .grid
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let kk = key(g.2, g.3);
                ((kk.0 - target.0).powi(2) + (kk.1 - target.1).powi(2), i)
            })
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut last_err = None;
        for &(_, i) in order.iter().take(6) {
            let g = self.grid[i];
            match self.newton(r, z, g.0, g.1) {
                Ok(st) => return Ok(st),
                Err(e) => last_err = Some(e),
            }
        }
        Err(last_err.unwrap_or_else(|| Error::Convergence("inverse map".into())))
    }

    fn newton(&self, r: f64, z: f64, mut s: f64, mut t: f64) -> Result<(f64, f64)> {
        let m = &self.modulus;
        let (k2, kp) = (2.0 * m.big_k(), m.big_k_prime());
        let scale = 1.0 + r.hypot(z);
        let resid = |s: f64, t: f64| {
            let (rr, zz) = meridian(s, t, m);
            (rr - r).hypot(zz - z) / scale
        };
        let mut res = resid(s, t);
        for _ in 0..80 {
            if res < 1e-14 {
                return Ok((s, t));
            }
            let ((rr, zz), j) = meridian_jacobian(s, t, m);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let (fr, fz) = (rr - r, zz - z);
            let ds = (j[1][1] * fr - j[0][1] * fz) / det;
            let dt = (-j[1][0] * fr + j[0][0] * fz) / det;
            let mut lam = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let (sn, tn) = (s - lam * ds, t - lam * dt);
                if sn > 0.0 && sn < k2 && tn.abs() < kp {
                    let rn = resid(sn, tn);
                    if rn < res {
                        s = sn;
                        t = tn;
                        res = rn;
                        improved = true;
                        break;
                    }
                }
                lam *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if res < 1e-12 {
            Ok((s, t))
        } else {
            Err(Error::Convergence(format!("Newton inverse stalled at residual {res:.2e}")))
        }
    }

    pub fn from_cartesian(&self, p: &CartesianPoint) -> Result<FlatRingCoords> {
        let r = p.cyl_r();
        let (s, t) = self.invert_meridian(r, p.z)?;
        FlatRingCoords::new(s, t, p.y.atan2(p.x), self.modulus)
    }
}

/// One-off inverse; prefer a shared [`InverseMap`] for many points.
pub fn from_cartesian(p: &CartesianPoint, modulus: &Modulus) -> Result<FlatRingCoords> {
    InverseMap::new(*modulus).from_cartesian(p)
}

/// The three terms of `Ω`, for `s₀ ≠ K`.
fn omega_terms(p: &CartesianPoint, region: &PeanutRegion) -> Result<[f64; 3]> {
    let m = &region.modulus;
    if (region.s0 - m.big_k()).abs() < 1e-10 {
        return Err(Error::Domain("Omega is undefined on the sphere s0 = K".into()));
    }
    let (sn, cn, dn) = m.sn_cn_dn(region.s0);
    let rho2 = p.x * p.x + p.y * p.y + p.z * p.z;
    let k2 = m.k() * m.k();
    Ok([k2 * (rho2 + 1.0).powi(2) / (dn * dn), -(rho2 - 1.0).powi(2) / (cn * cn), 4.0 * p.z * p.z / (sn * sn)])
}

pub fn omega_surface(p: &CartesianPoint, region: &PeanutRegion) -> Result<f64> {
    Ok(omega_terms(p, region)?.iter().sum())
}

/// `Ω` divided by its largest term.
pub fn omega_scaled(p: &CartesianPoint, region: &PeanutRegion) -> Result<f64> {
    let t = omega_terms(p, region)?;
    let big = t.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(if big == 0.0 { 0.0 } else { t.iter().sum::<f64>() / big })
}

pub fn invert_sphere(p: &CartesianPoint) -> Result<CartesianPoint> {
    let r2 = p.x * p.x + p.y * p.y + p.z * p.z;
    if r2 == 0.0 {
        return Err(Error::Domain("the origin has no inverse point".into()));
    }
    Ok(CartesianPoint::new(p.x / r2, p.y / r2, p.z / r2))
}

pub const BOUNDARY_TOL: f64 = 1e-8;

pub fn region_classify(p: &CartesianPoint, region: &PeanutRegion) -> Region {
    let m = &region.modulus;
    let rho = p.norm();
    if (region.s0 - m.big_k()).abs() < 1e-10 {
        return if (rho - 1.0).abs() < BOUNDARY_TOL {
            Region::Boundary
        } else if rho < 1.0 {
            Region::Interior
        } else {
            Region::Exterior
        };
    }
    let om = omega_scaled(p, region).expect("s0 != K");
    let inner = region.s0 < m.big_k();
    let near = om.abs() < BOUNDARY_TOL;
    if inner {
        if near && rho <= 1.0 {
            Region::Boundary
        } else if rho < 1.0 && om < 0.0 {
            Region::Interior
        } else {
            Region::Exterior
        }
    } else if near && rho >= 1.0 {
        Region::Boundary
    } else if rho < 1.0 || om > 0.0 {
        Region::Interior
    } else {
        Region::Exterior
    }
}

/// `h = kR (sn²(s,k) + sc²(t,k'))^{1/2}`.
pub fn scale_h(s: f64, t: f64, m: &Modulus) -> f64 {
    let (r, _) = meridian(s, t, m);
    let (sn, _, _) = m.sn_cn_dn(s);
    let (snt, cnt, _) = m.complement().sn_cn_dn(t);
    let sc = snt / cnt;
    m.k() * r * (sn * sn + sc * sc).sqrt()
}

/// Vertex/face mesh of a peanut surface.
#[derive(Debug, Clone)]
pub struct Mesh {
    /// `(t, φ, point)`; the two poles carry `t = ±K'`.
    pub vertices: Vec<(f64, f64, CartesianPoint)>,
    /// 1-based vertex indices, quads in the body and triangles at the poles.
    pub faces: Vec<Vec<usize>>,
}

/// Samples `s = s₀` on `n_t` interior t-rings and `n_phi` meridians,
/// closed with one vertex on each pole.
pub fn peanut_mesh(region: &PeanutRegion, n_t: usize, n_phi: usize) -> Result<Mesh> {
    if n_t < 2 || n_phi < 3 {
        return Err(Error::Domain("mesh needs at least 2 rings and 3 meridians".into()));
    }
    let m = region.modulus;
    let kp = m.big_k_prime();
    let mut vertices = Vec::with_capacity(n_t * n_phi + 2);
    let (sn, cn, dn) = m.sn_cn_dn(region.s0);
    let z_pole = m.k_prime() * sn / (cn + dn);
    vertices.push((-kp, 0.0, CartesianPoint::new(0.0, 0.0, -z_pole)));
    for i in 0..n_t {
        let t = kp * (2.0 * (i as f64 + 1.0) / (n_t as f64 + 1.0) - 1.0);
        for j in 0..n_phi {
            let phi = -PI + 2.0 * PI * j as f64 / n_phi as f64;
            let c = FlatRingCoords::new(region.s0, t, phi, m)?;
            vertices.push((t, phi, to_cartesian(&c)));
        }
    }
    vertices.push((kp, 0.0, CartesianPoint::new(0.0, 0.0, z_pole)));
    let idx = |i: usize, j: usize| 2 + i * n_phi + (j % n_phi);
    let last = vertices.len();
    let mut faces = Vec::new();
    for j in 0..n_phi {
        faces.push(vec![1, idx(0, j + 1), idx(0, j)]);
    }
    for i in 0..n_t - 1 {
        for j in 0..n_phi {
            faces.push(vec![idx(i, j), idx(i, j + 1), idx(i + 1, j + 1), idx(i + 1, j)]);
        }
    }
    for j in 0..n_phi {
        faces.push(vec![idx(n_t - 1, j), idx(n_t - 1, j + 1), last]);
    }
    Ok(Mesh { vertices, faces })
}

impl Mesh {
    /// Sum of the (triangulated) face areas.
    pub fn area(&self) -> f64 {
        let p = |i: usize| self.vertices[i - 1].2;
        let tri = |a: CartesianPoint, b: CartesianPoint, c: CartesianPoint| {
            let (u, v) = ((b.x - a.x, b.y - a.y, b.z - a.z), (c.x - a.x, c.y - a.y, c.z - a.z));
            let cx = u.1 * v.2 - u.2 * v.1;
            let cy = u.2 * v.0 - u.0 * v.2;
            let cz = u.0 * v.1 - u.1 * v.0;
            0.5 * (cx * cx + cy * cy + cz * cz).sqrt()
        };
        self.faces.iter().map(|f| (1..f.len() - 1).map(|i| tri(p(f[0]), p(f[i]), p(f[i + 1]))).sum::<f64>()).sum()
    }

    pub fn write_obj<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (_, _, p) in &self.vertices {
            writeln!(out, "v {:.15e} {:.15e} {:.15e}", p.x, p.y, p.z)?;
        }
        for f in &self.faces {
            let ids: Vec<String> = f.iter().map(|i| i.to_string()).collect();
            writeln!(out, "f {}", ids.join(" "))?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, s0: f64, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s0", "t", "phi", "x", "y", "z"])?;
        for (t, phi, p) in &self.vertices {
            w.serialize((s0, t, phi, p.x, p.y, p.z))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    FixedS,
    FixedT,
}

/// A coordinate line in the `(R, z)` half-plane.
#[derive(Debug, Clone)]
pub struct Polyline {
    pub kind: LineKind,
    pub value: f64,
    pub points: Vec<(f64, f64)>,
}

/// Lines `s = const` (over `t`) and `t = const` (over `s`), `samples`
/// points each, open at the chart boundary.
pub fn coordinate_lines(m: &Modulus, s_values: &[f64], t_values: &[f64], samples: usize) -> Vec<Polyline> {
    let (k2, kp) = (2.0 * m.big_k(), m.big_k_prime());
    let mut lines = Vec::new();
    for &s in s_values {
        let points = (0..samples)
            .map(|i| {
                let t = kp * (2.0 * (i as f64 + 0.5) / samples as f64 - 1.0);
                meridian(s, t, m)
            })
            .collect();
        lines.push(Polyline { kind: LineKind::FixedS, value: s, points });
    }
    for &t in t_values {
        let points = (0..samples).map(|i| meridian(k2 * (i as f64 + 0.5) / samples as f64, t, m)).collect();
        lines.push(Polyline { kind: LineKind::FixedT, value: t, points });
    }
    lines
}

pub fn write_lines_csv<W: Write>(lines: &[Polyline], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["line", "kind", "value", "index", "R", "z"])?;
    for (id, l) in lines.iter().enumerate() {
        let kind = match l.kind {
            LineKind::FixedS => "s",
            LineKind::FixedT => "t",
        };
        for (i, (r, z)) in l.points.iter().enumerate() {
            w.serialize((id, kind, l.value, i, r, z))?;
        }
    }
    w.flush()?;
    Ok(())
}
