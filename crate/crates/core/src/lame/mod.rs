//! Lamé–Wangerin eigenproblem for `w'' + (λ - ν(ν+1) dc²(t, κ)) w = 0` on
//! `(-K, K)`, recessive (exponent `ν + 1`) at both ends.
//!
//! Shooting runs in the distance `x = K - t` to the endpoint, where the
//! equation reads `w'' + (λ - ν(ν+1) ns²(x)) w = 0`. The recessive solution
//! is seeded by its power series at `x = δ` and integrated in scaled Prüfer
//! variables to the midpoint; the eigenvalue index is the Prüfer phase.
//!
//! A solved [`LameMode`] carries two interpolants:
//! * on the real axis, `g(x) = W / sin(ωx)^{ν+1}`, which is analytic on
//!   `[0, K]` and so needs one Chebyshev fit;
//! * on the imaginary axis, the real function `Ũ(s)` with `W(is) = i^{n mod 2} Ũ(s)`,
//!   fitted panel by panel because it grows exponentially.

mod cache;
mod series;

pub use cache::{CacheRecord, ModeCache, SOLVER_VERSION};
pub use series::{frobenius_coefficients, ns2_laurent};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cheb::{lobatto_nodes, Cheb};
use crate::elliptic::Modulus;
use crate::error::{Error, Result};
use crate::ode::Gbs;

/// Default seed distance, as a fraction of `K`.
pub const DELTA_FRACTION: f64 = 1e-3;
const SERIES_ORDER: usize = 24;
const MAX_ITER: usize = 200;
const IMAG_NODES: usize = 20;
const REAL_NODES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `(-1)^n`
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Phase of a value on the imaginary axis: `W(is) = phase · Ũ(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    One,
    I,
}

impl Phase {
    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::One => Complex64::new(1.0, 0.0),
            Phase::I => Complex64::new(0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameProblem {
    pub nu: f64,
    pub n: usize,
    pub kappa: Modulus,
}

impl LameProblem {
    pub fn new(nu: f64, n: usize, kappa: Modulus) -> Result<Self> {
        if !(nu >= -0.5) || !nu.is_finite() {
            return Err(Error::Domain(format!("Lamé degree must satisfy nu >= -1/2, got {nu}")));
        }
        Ok(Self { nu, n, kappa })
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.n)
    }

    fn nn(&self) -> f64 {
        self.nu * (self.nu + 1.0)
    }

    /// Comparison bounds for the eigenvalue, `(lower, upper)`.
    pub fn bracket(&self) -> (f64, f64) {
        eigenvalue_bracket(self.nu, self.n, self.kappa.omega())
    }
}

/// Sturm-comparison bounds on `Λ_ν^n` with `ω = π/(2K)`. For `ν ≥ 0` the
/// lower bound is the larger of the two available ones.
pub fn eigenvalue_bracket(nu: f64, n: usize, omega: f64) -> (f64, f64) {
    let nn = nu * (nu + 1.0);
    let free = omega * omega * (n as f64 + nu + 1.0).powi(2);
    let shifted = nn * (1.0 - omega * omega) + free;
    if nu >= 0.0 {
        let alt = nn + omega * omega * (n as f64 + 1.0).powi(2);
        (free.max(alt), shifted)
    } else {
        (shifted, free)
    }
}

/// Value and t-derivative of the recessive series (`a₀ = 1`) at `t = K - δ`.
pub fn frobenius_seed(problem: &LameProblem, lambda: f64, delta: f64, order: usize) -> Result<(f64, f64)> {
    let k = problem.kappa.big_k();
    if !(delta > 0.0 && delta <= 0.05 * k) {
        return Err(Error::Precondition(format!("seed distance {delta} outside (0, 0.05 K]")));
    }
    if order < 8 {
        return Err(Error::Precondition(format!("series order {order} below 8")));
    }
    let a = frobenius_coefficients(problem.nu, lambda, &problem.kappa, order);
    let (w, dwx) = series::checked_seed(&a, problem.nu, delta)?;
    Ok((w, -dwx))
}

struct Shooter<'a> {
    problem: &'a LameProblem,
    lambda: f64,
    scale: f64,
    delta: f64,
    coeffs: Vec<f64>,
    gbs: Gbs,
}

struct Trace {
    theta_end: f64,
    w_end: f64,
    dw_end: f64,
    integral: f64,
    node_values: Vec<(f64, f64)>,
}

impl<'a> Shooter<'a> {
    fn new(problem: &'a LameProblem, lambda: f64) -> Self {
        let delta = DELTA_FRACTION * problem.kappa.big_k();
        Self {
            problem,
            lambda,
            scale: lambda.max(1.0).sqrt(),
            delta,
            coeffs: frobenius_coefficients(problem.nu, lambda, &problem.kappa, SERIES_ORDER),
            gbs: Gbs::with_rtol(1e-13).componentwise(1e-15),
        }
    }

    fn rhs(&self, x: f64, y: &[f64; 3]) -> [f64; 3] {
        let (sn, _, _) = self.problem.kappa.sn_cn_dn(x);
        let q = self.lambda - self.problem.nn() / (sn * sn);
        let s = self.scale;
        let (st, ct) = y[0].sin_cos();
        let rho = y[1].exp();
        [s * ct * ct + q / s * st * st, (s - q / s) * st * ct, rho * rho * st * st]
    }

    fn initial(&self) -> Result<[f64; 3]> {
        let (w, dw) = series::checked_seed(&self.coeffs, self.problem.nu, self.delta)?;
        let v = dw / self.scale;
        let rho = w.hypot(v);
        let i0 = series::square_integral(&self.coeffs, self.problem.nu, self.delta);
        Ok([w.atan2(v), rho.ln(), i0])
    }

    fn theta_end(&self) -> Result<f64> {
        let y = self.gbs.solve(|x, y| self.rhs(x, y), self.delta, self.initial()?, self.problem.kappa.big_k())?;
        Ok(y[0])
    }

    /// Full pass recording `(w, w / sin(ωx)^{ν+1})` at the given ascending nodes.
    fn trace(&self, nodes: &[f64]) -> Result<Trace> {
        let nu = self.problem.nu;
        let omega = self.problem.kappa.omega();
        let mut x = self.delta;
        let mut y = self.initial()?;
        let mut node_values = Vec::with_capacity(nodes.len());
        for &xn in nodes {
            if xn <= self.delta {
                let red = series::eval_reduced(&self.coeffs, xn);
                let ratio = if xn == 0.0 { 1.0 / omega } else { xn / (omega * xn).sin() };
                node_values.push((red * xn.powf(nu + 1.0), red * ratio.powf(nu + 1.0)));
                continue;
            }
            if xn > x {
                y = self.gbs.solve(|x, y| self.rhs(x, y), x, y, xn)?;
                x = xn;
            }
            let w = y[1].exp() * y[0].sin();
            node_values.push((w, w / (omega * xn).sin().powf(nu + 1.0)));
        }
        let k = self.problem.kappa.big_k();
        if x < k {
            y = self.gbs.solve(|x, y| self.rhs(x, y), x, y, k)?;
        }
        let rho = y[1].exp();
        Ok(Trace { theta_end: y[0], w_end: rho * y[0].sin(), dw_end: self.scale * rho * y[0].cos(), integral: y[2], node_values })
    }
}

fn target_phase(n: usize) -> f64 {
    (n as f64 + 1.0) * 0.5 * PI
}

/// Eigencondition mismatch `θ(K; λ) - (n+1)π/2`; increasing in `λ`.
pub fn phase_mismatch(problem: &LameProblem, lambda: f64) -> Result<f64> {
    Ok(Shooter::new(problem, lambda).theta_end()? - target_phase(problem.n))
}

/// A solved eigenpair with evaluators.
#[derive(Debug, Clone)]
pub struct LameMode {
    pub problem: LameProblem,
    pub lambda: f64,
    pub parity: Parity,
    /// `d` with `W = d · F`, where `F` is the recessive solution with `a₀ = 1`.
    pub norm_constant: f64,
    /// Leading endpoint coefficient of the normalized eigenfunction.
    pub frobenius_a0: f64,
    theta_end: f64,
    w_zero: f64,
    dw_zero: f64,
    real: RealAxis,
    imag: ImagAxis,
}

#[derive(Debug, Clone)]
struct ImagAxis {
    width: f64,
    s_max: f64,
    u: Vec<Cheb>,
    du: Vec<Cheb>,
}

/// Solves for `Λ_ν^n(κ)` and builds the normalized eigenfunction.
pub fn solve_eigen(problem: &LameProblem) -> Result<LameMode> {
    let lambda = find_eigenvalue(problem)?;
    LameMode::from_eigenvalue(problem, lambda)
}

fn find_eigenvalue(problem: &LameProblem) -> Result<f64> {
    let (lo0, hi0) = problem.bracket();
    let pad = 0.01 * lo0.abs().max(hi0.abs()) + 1e-12;
    let (mut lo, mut hi) = (lo0 - pad, hi0 + pad);
    let f = |l: f64| phase_mismatch(problem, l);
    let mut flo = f(lo)?;
    let mut fhi = f(hi)?;
    if !(flo <= 0.0 && fhi >= 0.0) {
        return Err(Error::BracketFailure { nu: problem.nu, n: problem.n, lo, hi });
    }
    // a few bisections, then Illinois false position
    let mut side = 0i8;
    for it in 0..MAX_ITER {
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
        let mid = if it < 6 {
            0.5 * (lo + hi)
        } else {
            let c = (lo * fhi - hi * flo) / (fhi - flo);
            if c > lo && c < hi {
                c
            } else {
                0.5 * (lo + hi)
            }
        };
        let fm = f(mid)?;
        if fm == 0.0 || fm.abs() < 1e-15 {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
            flo = fm;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            fhi = fm;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::Convergence(format!("eigenvalue search for nu = {}, n = {} did not converge in {MAX_ITER} steps", problem.nu, problem.n)))
}

impl LameMode {
    /// Builds the mode for a known eigenvalue (e.g. from the cache). Fails
    /// if `lambda` does not satisfy the eigencondition.
    pub fn from_eigenvalue(problem: &LameProblem, lambda: f64) -> Result<Self> {
        let shooter = Shooter::new(problem, lambda);
        let (trace, real) = RealAxis::build(problem, &shooter)?;
        let mismatch = trace.theta_end - target_phase(problem.n);
        if mismatch.abs() > 1e-8 {
            return Err(Error::Inconsistency(format!("lambda = {lambda} misses the eigencondition by {mismatch:.3e}")));
        }
        let d = 1.0 / (2.0 * trace.integral).sqrt();
        let real = real.scaled(d);
        let parity = problem.parity();
        let w_zero = d * trace.w_end;
        let dw_zero = -d * trace.dw_end;
        let imag = ImagAxis::build(problem, lambda, w_zero, dw_zero)?;
        Ok(Self {
            problem: *problem,
            lambda,
            parity,
            norm_constant: d,
            frobenius_a0: d,
            theta_end: trace.theta_end,
            w_zero,
            dw_zero,
            real,
            imag,
        })
    }

    pub fn big_k(&self) -> f64 {
        self.problem.kappa.big_k()
    }

    /// `W(0)` and `W'(0)`.
    pub fn values_at_zero(&self) -> (f64, f64) {
        (self.w_zero, self.dw_zero)
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !(t.abs() < self.big_k()) {
            return Err(Error::Domain(format!("|t| = {} must be below K = {}", t.abs(), self.big_k())));
        }
        Ok(())
    }

    /// `W_ν^n(t, κ)` for `|t| < K`.
    pub fn eval_w(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.eval_w_unchecked(t))
    }

    pub(crate) fn eval_w_unchecked(&self, t: f64) -> f64 {
        self.real.eval(self.big_k() - t).0
    }

    /// `(W, W', W'')` at `t`.
    pub fn eval_w_derivs(&self, t: f64) -> Result<(f64, f64, f64)> {
        self.check_t(t)?;
        let (w, wx, wxx) = self.real.eval(self.big_k() - t);
        Ok((w, -wx, wxx))
    }

    /// Number of zeros in `(-K, K)` implied by the final Prüfer phase.
    pub fn prufer_zero_count(&self) -> usize {
        let open = (1..).take_while(|j| (*j as f64) * PI < self.theta_end - 1e-6).count();
        2 * open + usize::from(self.parity == Parity::Odd)
    }

    /// Largest residual of the equation on `m` interior points, relative to
    /// `max(|λ|, ν(ν+1), 1) · max|W|`.
    pub fn ode_residual(&self, m: usize) -> Result<f64> {
        let k = self.big_k();
        let nn = self.problem.nn();
        let mut worst: f64 = 0.0;
        let mut wmax: f64 = 0.0;
        for i in 1..m {
            let t = -0.98 * k + 1.96 * k * i as f64 / m as f64;
            let (w, _, wtt) = self.eval_w_derivs(t)?;
            let (_, cn, dn) = self.problem.kappa.sn_cn_dn(t);
            let dc = dn / cn;
            worst = worst.max((wtt + (self.lambda - nn * dc * dc) * w).abs());
            wmax = wmax.max(w.abs());
        }
        let scale = self.lambda.abs().max(nn.abs()).max(1.0) * wmax.max(1e-300);
        Ok(worst / scale)
    }

    /// The real representative `Ũ(s)` (with its phase) of `W(is, κ)`.
    pub fn eval_w_imag(&self, s: f64) -> Result<(f64, Phase)> {
        let (u, _) = self.eval_u(s)?;
        Ok((u, self.phase()))
    }

    pub fn phase(&self) -> Phase {
        match self.parity {
            Parity::Even => Phase::One,
            Parity::Odd => Phase::I,
        }
    }

    /// `Ũ(s)` and `Ũ'(s)`.
    pub fn eval_u(&self, s: f64) -> Result<(f64, f64)> {
        self.imag.eval(s, self.parity)
    }

    /// Largest `|s|` at which the imaginary-axis interpolant is available.
    pub fn imag_range(&self) -> f64 {
        self.imag.s_max
    }

    /// Quarter period of the complementary modulus, i.e. `K(k)` when `κ = k'`.
    pub fn complementary_k(&self) -> f64 {
        self.problem.kappa.big_k_prime()
    }

    /// Wronskian `Ũ(2K̂-s)Ũ'(s) + Ũ'(2K̂-s)Ũ(s)` of `Ũ(2K̂ - ·)` and `Ũ`
    /// (with `K̂ = K(κ')`), evaluated at `s = K̂` and checked for constancy.
    pub fn wronskian(&self) -> Result<f64> {
        let kc = self.complementary_k();
        let at = |s: f64| -> Result<f64> {
            let (u1, du1) = self.eval_u(2.0 * kc - s)?;
            let (u2, du2) = self.eval_u(s)?;
            Ok(u1 * du2 + du1 * u2)
        };
        let w = at(kc)?;
        for f in [0.25, 0.5, 1.5, 1.75] {
            let v = at(f * kc)?;
            if (v - w).abs() > 1e-8 * w.abs() {
                return Err(Error::Inconsistency(format!("Wronskian not constant: {w} at K, {v} at {f} K")));
            }
        }
        Ok(w)
    }

    /// Relative spread of the Wronskian over `points` evaluation abscissae.
    pub fn wronskian_spread(&self, points: usize) -> Result<f64> {
        let kc = self.complementary_k();
        let mut vals = Vec::with_capacity(points);
        for i in 0..points {
            let s = kc * (0.2 + 1.6 * i as f64 / (points - 1).max(1) as f64);
            let (u1, du1) = self.eval_u(2.0 * kc - s)?;
            let (u2, du2) = self.eval_u(s)?;
            vals.push(u1 * du2 + du1 * u2);
        }
        let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
        let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
        Ok((hi - lo) / hi.abs().max(lo.abs()))
    }

    /// `W(K-δ)/δ^{ν+1}` at `δ = 1e-2, 1e-3, 1e-4`.
    pub fn endpoint_ratios(&self) -> Result<[f64; 3]> {
        let k = self.big_k();
        let a = self.problem.nu + 1.0;
        let mut out = [0.0; 3];
        for (i, d) in [1e-2, 1e-3, 1e-4].into_iter().enumerate() {
            out[i] = self.eval_w(k - d)? / d.powf(a);
        }
        Ok(out)
    }

    /// `a₀` of the normalized eigenfunction, cross-checked against a
    /// first-order Richardson extrapolation of [`Self::endpoint_ratios`].
    pub fn frobenius_leading_coeff(&self) -> Result<f64> {
        let r = self.endpoint_ratios()?;
        let (d2, d3) = (1e-3, 1e-4);
        let extrap = r[2] + (r[2] - r[1]) * d3 / (d2 - d3);
        if (extrap - self.frobenius_a0).abs() > 1e-6 * self.frobenius_a0.abs() {
            return Err(Error::Inconsistency(format!("endpoint extrapolation {extrap} disagrees with a0 = {}", self.frobenius_a0)));
        }
        Ok(self.frobenius_a0)
    }

    /// `W(i(K̂ - iK(κ)), κ)` where `K̂ = K(κ')`, i.e. `V(K - iK')` in the
    /// imaginary-axis variable. Reached along `s: 0 → K̂` (the interpolant)
    /// and then `s = K̂ - iy`, `y: 0 → K(κ)`, where the equation stays real.
    pub fn corner_value(&self) -> Result<Complex64> {
        let kc = self.complementary_k();
        let (u, du) = self.eval_u(kc)?;
        let nn = self.problem.nn();
        let lam = self.lambda;
        let kappa = self.problem.kappa;
        let k2 = kappa.k_prime() * kappa.k_prime();
        let rhs = |y: f64, v: &[f64; 4]| {
            let (_, _, dn) = kappa.sn_cn_dn(y);
            let q = lam - nn + nn * k2 / (dn * dn);
            [v[1], -q * v[0], v[3], -q * v[2]]
        };
        let end = Gbs::with_rtol(1e-13).solve(rhs, 0.0, [1.0, 0.0, 0.0, 1.0], kappa.big_k())?;
        let (c, s) = (end[0], end[2]);
        let v = Complex64::new(u * c, -du * s);
        Ok(self.phase().to_complex() * v)
    }
}

/// Panels over `x = K - t ∈ [0, 2K]`, mirror-symmetric about `x = K`. The
/// two end panels fit `W / sin(ωx)^{ν+1}`, the others `W` itself, so each
/// fit only sees the dynamic range of its own panel.
#[derive(Debug, Clone)]
struct RealAxis {
    width: f64,
    a: f64,
    omega: f64,
    panels: Vec<[Cheb; 3]>,
}

impl RealAxis {
    fn build(problem: &LameProblem, shooter: &Shooter) -> Result<(Trace, Self)> {
        let k = problem.kappa.big_k();
        let sign = problem.parity().sign();
        let rate = shooter.lambda.max(1.0).sqrt();
        let mut count = ((2.0 * k * rate / (4.0 * PI)).ceil() as usize).max(4);
        let deg = REAL_NODES;
        for attempt in 0..4 {
            let width = 2.0 * k / count as f64;
            let panel_nodes = |i: usize| {
                let b = if i + 1 == count { 2.0 * k } else { (i + 1) as f64 * width };
                lobatto_nodes(i as f64 * width, b, deg)
            };
            // nodes with x <= K, in ascending order
            let mut wanted = Vec::new();
            for i in 0..count.div_ceil(2) {
                let nodes = panel_nodes(i);
                let upto = if 2 * i + 1 == count { deg / 2 } else { deg };
                wanted.extend_from_slice(&nodes[..=upto]);
            }
            let trace = shooter.trace(&wanted)?;
            let mut vals = vec![vec![(0.0, 0.0); deg + 1]; count];
            let mut it = trace.node_values.iter();
            for i in 0..count.div_ceil(2) {
                let upto = if 2 * i + 1 == count { deg / 2 } else { deg };
                for j in 0..=upto {
                    let v = *it.next().expect("node count");
                    vals[i][j] = v;
                    vals[count - 1 - i][deg - j] = (sign * v.0, sign * v.1);
                }
            }
            let mut panels = Vec::with_capacity(count);
            let mut worst: f64 = 0.0;
            for (i, v) in vals.iter().enumerate() {
                let nodes = panel_nodes(i);
                let end = i == 0 || i + 1 == count;
                let data: Vec<f64> = v.iter().map(|p| if end { p.1 } else { p.0 }).collect();
                let c = Cheb::from_lobatto(nodes[0], nodes[deg], &data);
                worst = worst.max(c.tail_ratio());
                let d1 = c.derivative();
                let d2 = d1.derivative();
                panels.push([c, d1, d2]);
            }
            if worst < 1e-11 || attempt == 3 {
                if worst >= 1e-11 {
                    log::warn!("real-axis fit for nu = {}, n = {} has tail {worst:.1e}", problem.nu, problem.n);
                }
                let axis = Self { width, a: problem.nu + 1.0, omega: problem.kappa.omega(), panels };
                return Ok((trace, axis));
            }
            count *= 2;
        }
        unreachable!()
    }

    fn scaled(self, d: f64) -> Self {
        let panels = self
            .panels
            .into_iter()
            .map(|[c, _, _]| {
                let (a, b) = c.domain();
                let n = c.coeffs().len() - 1;
                let vals: Vec<f64> = lobatto_nodes(a, b, n).iter().map(|&x| d * c.eval(x)).collect();
                let c = Cheb::from_lobatto(a, b, &vals);
                let d1 = c.derivative();
                let d2 = d1.derivative();
                [c, d1, d2]
            })
            .collect();
        Self { panels, ..self }
    }

    /// `(W, dW/dx, d²W/dx²)` at `x ∈ [0, 2K]`.
    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let count = self.panels.len();
        let i = ((x / self.width).max(0.0) as usize).min(count - 1);
        let [c, d1, d2] = &self.panels[i];
        let (g0, g1, g2) = (c.eval(x), d1.eval(x), d2.eval(x));
        if i != 0 && i + 1 != count {
            return (g0, g1, g2);
        }
        let (a, om) = (self.a, self.omega);
        let (sn, cs) = (om * x).sin_cos();
        let s0 = sn.powf(a);
        let s1 = a * om * cs * sn.powf(a - 1.0);
        let s2 = a * om * om * ((a - 1.0) * cs * cs * sn.powf(a - 2.0) - s0);
        (s0 * g0, s1 * g0 + s0 * g1, s2 * g0 + 2.0 * s1 * g1 + s0 * g2)
    }
}

impl ImagAxis {
    fn build(problem: &LameProblem, lambda: f64, w0: f64, dw0: f64) -> Result<Self> {
        let kappa = problem.kappa;
        let km = kappa.complement();
        let nn = problem.nn();
        let k2 = km.k() * km.k();
        let s_max = 2.1 * km.big_k();
        let q_max = (lambda - nn + nn * k2).max(lambda - nn).max(1e-2);
        let rate = q_max.sqrt();
        let y0 = match problem.parity() {
            Parity::Even => [w0, 0.0],
            Parity::Odd => [0.0, dw0],
        };
        let rhs = |s: f64, y: &[f64; 2]| {
            let (sn, _, _) = km.sn_cn_dn(s);
            [y[1], (lambda - nn + nn * k2 * sn * sn) * y[0]]
        };
        let gbs = Gbs::with_rtol(1e-13);
        let mut width = (2.0 / rate).min(s_max / 4.0);
        for _ in 0..6 {
            let panels = (s_max / width).ceil() as usize;
            let width_eff = s_max / panels as f64;
            let mut u = Vec::with_capacity(panels);
            let mut du = Vec::with_capacity(panels);
            let mut y = y0;
            let mut x = 0.0;
            let mut worst: f64 = 0.0;
            for p in 0..panels {
                let a = p as f64 * width_eff;
                let nodes = lobatto_nodes(a, a + width_eff, IMAG_NODES);
                let mut uv = Vec::with_capacity(nodes.len());
                let mut dv = Vec::with_capacity(nodes.len());
                for &sn in &nodes {
                    if sn > x {
                        y = gbs.solve(rhs, x, y, sn)?;
                        x = sn;
                    }
                    if !(y[0].abs() < 1e300 && y[1].abs() < 1e300) {
                        return Err(Error::Range(format!(
                            "imaginary-axis solution overflows at s = {sn} (nu = {}, n = {})",
                            problem.nu, problem.n
                        )));
                    }
                    uv.push(y[0]);
                    dv.push(y[1]);
                }
                let cu = Cheb::from_lobatto(a, a + width_eff, &uv);
                let cd = Cheb::from_lobatto(a, a + width_eff, &dv);
                worst = worst.max(cu.tail_ratio()).max(cd.tail_ratio());
                u.push(cu);
                du.push(cd);
            }
            if worst < 1e-12 {
                return Ok(Self { width: width_eff, s_max, u, du });
            }
            width *= 0.5;
        }
        Err(Error::Convergence(format!("imaginary-axis interpolant for nu = {}, n = {} not resolved", problem.nu, problem.n)))
    }

    fn eval(&self, s: f64, parity: Parity) -> Result<(f64, f64)> {
        let a = s.abs();
        if !(a <= self.s_max) {
            return Err(Error::Domain(format!("imaginary-axis argument |s| = {a} beyond {}", self.s_max)));
        }
        let i = ((a / self.width) as usize).min(self.u.len() - 1);
        let (u, du) = (self.u[i].eval(a), self.du[i].eval(a));
        Ok(if s < 0.0 {
            let p = parity.sign();
            (p * u, -p * du)
        } else {
            (u, du)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(nu: f64, n: usize, kappa: f64) -> LameMode {
        let p = LameProblem::new(nu, n, Modulus::new(kappa).unwrap()).unwrap();
        solve_eigen(&p).unwrap()
    }

    #[test]
    fn small_modulus_approaches_free_eigenvalues() {
        for &nu in &[-0.5, 0.5, 1.5] {
            for n in 0..4 {
                let m = mode(nu, n, 0.02);
                let free = (n as f64 + nu + 1.0).powi(2);
                assert!((m.lambda - free).abs() < 1e-3 * free, "nu {nu} n {n}: {}", m.lambda);
                let (lo, hi) = m.problem.bracket();
                assert!(lo - 1e-12 <= m.lambda && m.lambda <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn degree_zero_is_a_sine() {
        // nu = 0 removes the potential: W = sin((n+1) ω (K - t)) / sqrt(K)
        let m = mode(0.0, 2, 0.7);
        let om = m.problem.kappa.omega();
        assert!((m.lambda - 9.0 * om * om).abs() < 1e-11);
        let k = m.big_k();
        for &t in &[-0.9, -0.2, 0.0, 0.4, 1.1] {
            let exact = (3.0 * om * (k - t)).sin() / k.sqrt();
            assert!((m.eval_w(t).unwrap() - exact).abs() < 1e-11);
        }
    }

    #[test]
    fn normalization_parity_and_zeros() {
        let m = mode(0.5, 3, 0.6);
        let k = m.big_k();
        let r = crate::quadrature::gauss_legendre(80).mapped(-k, k);
        let norm = r.integrate(|t| m.eval_w_unchecked(t).powi(2));
        assert!((norm - 1.0).abs() < 1e-10);
        assert_eq!(m.prufer_zero_count(), 3);
        for &t in &[0.1, 0.7, 1.5] {
            assert!((m.eval_w(-t).unwrap() + m.eval_w(t).unwrap()).abs() < 1e-12);
        }
        assert!(m.eval_w(k).is_err());
        assert!(m.ode_residual(200).unwrap() < 1e-9);
    }

    #[test]
    fn seed_preconditions() {
        let p = LameProblem::new(0.5, 0, Modulus::new(0.6).unwrap()).unwrap();
        let k = p.kappa.big_k();
        assert!(frobenius_seed(&p, 3.0, 0.1 * k, 12).is_err());
        assert!(frobenius_seed(&p, 3.0, 1e-3 * k, 4).is_err());
        let (w, dw) = frobenius_seed(&p, 3.0, 1e-3 * k, 12).unwrap();
        let d: f64 = 1e-3 * k;
        assert!((w / d.powf(1.5) - 1.0).abs() < 1e-5);
        assert!(dw < 0.0);
    }

    #[test]
    fn imaginary_axis_grows_and_wronskian_is_constant() {
        let m = mode(0.5, 1, 0.6);
        let (u1, _) = m.eval_u(0.3).unwrap();
        let (u2, _) = m.eval_u(0.9).unwrap();
        assert!(u1.abs() < u2.abs());
        assert!(m.wronskian_spread(5).unwrap() < 1e-10);
        assert!(m.wronskian().unwrap() != 0.0);
        assert_eq!(m.eval_w_imag(0.2).unwrap().1, Phase::I);
    }
}
