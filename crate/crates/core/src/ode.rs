//! Adaptive Gragg–Bulirsch–Stoer integration for small real systems.
//!
//! Modified-midpoint sweeps with the step sequence 2, 4, 6, ... are
//! extrapolated to zero step size (polynomial extrapolation in h²), which
//! gives high order at moderate cost. Used for every linear second-order
//! equation in the crate.

use crate::error::{Error, Result};

const MAX_COLUMNS: usize = 10;
const TARGET_COLUMN: usize = 6;

#[derive(Debug, Clone, Copy)]
pub struct Gbs {
    pub rtol: f64,
    pub atol: f64,
    /// Largest step allowed; also the first trial step when smaller than the span.
    pub h_max: f64,
    pub max_steps: usize,
    /// Scale each component by its own magnitude instead of the largest one.
    pub componentwise: bool,
}

impl Default for Gbs {
    fn default() -> Self {
        Self { rtol: 1e-13, atol: 1e-300, h_max: f64::INFINITY, max_steps: 200_000, componentwise: false }
    }
}

fn midpoint<const N: usize, F>(f: &F, x: f64, y: &[f64; N], dy: &[f64; N], h: f64, steps: usize) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let hh = h / steps as f64;
    let mut z0 = *y;
    let mut z1 = [0.0; N];
    for i in 0..N {
        z1[i] = y[i] + hh * dy[i];
    }
    for s in 1..steps {
        let fz = f(x + s as f64 * hh, &z1);
        let mut z2 = [0.0; N];
        for i in 0..N {
            z2[i] = z0[i] + 2.0 * hh * fz[i];
        }
        z0 = z1;
        z1 = z2;
    }
    let fe = f(x + h, &z1);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = 0.5 * (z0[i] + z1[i] + hh * fe[i]);
    }
    out
}

impl Gbs {
    pub fn with_rtol(rtol: f64) -> Self {
        Self { rtol, ..Self::default() }
    }

    pub fn h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    pub fn componentwise(mut self, atol: f64) -> Self {
        self.componentwise = true;
        self.atol = atol;
        self
    }

    /// One extrapolated step. Returns the new state and the column at which
    /// the error estimate dropped below tolerance, or `None` on failure.
    fn step<const N: usize, F>(&self, f: &F, x: f64, y: &[f64; N], h: f64) -> Option<([f64; N], usize)>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let dy = f(x, y);
        let mut table: Vec<[f64; N]> = Vec::with_capacity(MAX_COLUMNS);
        let seq = |j: usize| 2 * (j + 1);
        for j in 0..MAX_COLUMNS {
            let mut row = vec![midpoint(f, x, y, &dy, h, seq(j))];
            for i in 1..=j {
                let ratio = (seq(j) as f64 / seq(j - i) as f64).powi(2);
                let prev = row[i - 1];
                let up = table[i - 1];
                let mut v = [0.0; N];
                for c in 0..N {
                    v[c] = prev[c] + (prev[c] - up[c]) / (ratio - 1.0);
                }
                row.push(v);
            }
            if j >= 2 {
                let best = row[j];
                let prev = row[j - 1];
                let mut err: f64 = 0.0;
                let ymag = y.iter().chain(best.iter()).fold(0.0f64, |a, v| a.max(v.abs()));
                for c in 0..N {
                    let local = y[c].abs().max(best[c].abs());
                    let sc = if self.componentwise { self.atol + self.rtol * local } else { self.atol + self.rtol * ymag.max(local) };
                    err = err.max((best[c] - prev[c]).abs() / sc);
                }
                if err <= 1.0 && best.iter().all(|v| v.is_finite()) {
                    return Some((best, j));
                }
            }
            table = row;
        }
        None
    }

    /// Integrates from `x0` to `x1` (either direction). `on_step` is called
    /// after every accepted step with the new abscissa and state.
    pub fn integrate<const N: usize, F, S>(&self, f: F, x0: f64, y0: [f64; N], x1: f64, mut on_step: S) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        S: FnMut(f64, &[f64; N]) -> Result<()>,
    {
        let span = x1 - x0;
        if span == 0.0 {
            return Ok(y0);
        }
        let dir = span.signum();
        let mut h = (span.abs() / 8.0).min(self.h_max);
        let mut x = x0;
        let mut y = y0;
        let mut steps = 0usize;
        while (x1 - x) * dir > 0.0 {
            let remaining = (x1 - x).abs();
            let last = h >= remaining * (1.0 - 1e-12);
            let trial = if last { remaining } else { h };
            match self.step(&f, x, &y, dir * trial) {
                Some((ynew, col)) => {
                    x = if last { x1 } else { x + dir * trial };
                    y = ynew;
                    on_step(x, &y)?;
                    let grow = match col {
                        0..=3 => 2.0,
                        4 => 1.6,
                        5 => 1.25,
                        c if c == TARGET_COLUMN => 1.0,
                        7 => 0.8,
                        _ => 0.6,
                    };
                    if !last || grow < 1.0 {
                        h = (trial * grow).min(self.h_max);
                    }
                }
                None => {
                    h = trial * 0.25;
                    if h < 1e-15 * (x.abs() + 1.0) {
                        return Err(Error::Convergence(format!("step size underflow at x = {x}")));
                    }
                }
            }
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::Convergence(format!("more than {} steps integrating from {x0} to {x1}", self.max_steps)));
            }
        }
        Ok(y)
    }

    pub fn solve<const N: usize, F>(&self, f: F, x0: f64, y0: [f64; N], x1: f64) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        self.integrate(f, x0, y0, x1, |_, _| Ok(()))
    }
}
