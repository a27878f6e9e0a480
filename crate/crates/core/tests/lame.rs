mod common;

use common::{bracket, gauss_legendre, sn_cn_dn, Ritz};
use peanut::elliptic::Modulus;
use peanut::lame::{solve_eigen, LameMode, LameProblem, ModeCache};
use proptest::prelude::*;

const NUS: [f64; 4] = [-0.5, 0.5, 1.5, 2.5];

fn modes(nu: f64, kappa: f64, n_max: usize) -> Vec<LameMode> {
    let m = Modulus::new(kappa).unwrap();
    (0..=n_max).map(|n| solve_eigen(&LameProblem::new(nu, n, m).unwrap()).unwrap()).collect()
}

#[test]
fn eigenvalues_match_ritz_oracle_and_brackets() {
    for &kappa in &[0.1, 0.5, 0.9] {
        for &nu in &NUS {
            let ritz = Ritz::new(nu, kappa, 80);
            let ms = modes(nu, kappa, 10);
            for (n, mode) in ms.iter().enumerate() {
                let rel = (mode.lambda - ritz.values[n]).abs() / ritz.values[n].abs();
                assert!(rel < 1e-8, "kappa {kappa} nu {nu} n {n}: rel {rel:.2e}");
                let (lo, hi) = bracket(nu, n, kappa);
                assert!(lo <= mode.lambda && mode.lambda <= hi, "kappa {kappa} nu {nu} n {n}");
            }
            assert!(ms.windows(2).all(|w| w[1].lambda > w[0].lambda));
        }
    }
}

#[test]
fn eigenfunctions_are_orthonormal_with_n_zeros() {
    for &kappa in &[0.1, 0.5, 0.9] {
        let big_k = Modulus::new(kappa).unwrap().big_k();
        for &nu in &NUS {
            let ms = modes(nu, kappa, 10);
            // half-integer orders make W_i W_j analytic up to the endpoints
            let nodes = 400;
            for i in 0..ms.len() {
                for j in 0..=i {
                    let g = gauss_legendre(nodes, -big_k, big_k, |t| ms[i].eval_w(t).unwrap() * ms[j].eval_w(t).unwrap());
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((g - expect).abs() < 1e-8, "kappa {kappa} nu {nu} ({i},{j}): {g}");
                }
            }
            for (n, mode) in ms.iter().enumerate() {
                assert_eq!(mode.prufer_zero_count(), n);
                let grid: Vec<f64> = (1..4000).map(|i| mode.eval_w(-big_k + 2.0 * big_k * i as f64 / 4000.0).unwrap()).collect();
                let changes = grid.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
                assert_eq!(changes, n, "kappa {kappa} nu {nu} n {n}");
            }
        }
    }
}

#[test]
fn eigenfunctions_match_ritz_oracle() {
    for &kappa in &[0.1, 0.5, 0.9] {
        let big_k = Modulus::new(kappa).unwrap().big_k();
        for &nu in &[-0.5, 1.5] {
            let ritz = Ritz::new(nu, kappa, 80);
            for (n, mode) in modes(nu, kappa, 6).iter().enumerate() {
                let sign = mode.eval_w(0.99 * big_k).unwrap().signum();
                for &f in &[-0.95, -0.4, 0.0, 0.3, 0.8] {
                    let t = f * big_k;
                    let d = (sign * mode.eval_w(t).unwrap() - ritz.eigenfunction(n, t)).abs();
                    assert!(d < 1e-8, "kappa {kappa} nu {nu} n {n} t {t}: {d:.2e}");
                }
            }
        }
    }
}

#[test]
fn sup_bounds_hold() {
    for &kappa in &[0.3, 0.8] {
        let big_k = Modulus::new(kappa).unwrap().big_k();
        for &nu in &[0.0, 0.5, 1.5] {
            for (n, mode) in modes(nu, kappa, 8).iter().enumerate() {
                let a = n as f64 + nu + 1.0;
                for i in 0..400 {
                    let t = -big_k + 2.0 * big_k * (i as f64 + 0.5) / 400.0;
                    let w2 = mode.eval_w(t).unwrap().powi(2);
                    let (_, cn, dn) = sn_cn_dn(t, kappa);
                    assert!(w2 <= std::f64::consts::PI * a / (2.0 * big_k) * (1.0 + 1e-12));
                    assert!(dn / cn * w2 <= std::f64::consts::PI.powi(2) * a * a / (4.0 * big_k) * (1.0 + 1e-12));
                }
            }
        }
        // order -1/2: W² and dc W²/(1+n)² stay bounded uniformly in n
        let mut sup = (0.0f64, 0.0f64);
        for (n, mode) in modes(-0.5, kappa, 12).iter().enumerate() {
            for i in 0..400 {
                let t = -big_k + 2.0 * big_k * (i as f64 + 0.5) / 400.0;
                let w2 = mode.eval_w(t).unwrap().powi(2);
                let (_, cn, dn) = sn_cn_dn(t, kappa);
                sup.0 = sup.0.max(w2);
                sup.1 = sup.1.max(dn / cn * w2 / (1.0 + n as f64).powi(2));
            }
        }
        assert!(sup.0 < 2.0 && sup.1 < 2.0, "{sup:?}");
    }
}

#[test]
fn imaginary_axis_continuation() {
    let kappa: f64 = 0.6;
    let kp = (1.0 - kappa * kappa).sqrt();
    for &(nu, n) in &[(-0.5, 0), (0.5, 1), (1.5, 2), (2.5, 3)] {
        let mode = &modes(nu, kappa, n)[n];
        let (w0, dw0) = mode.values_at_zero();
        let (u0, du0) = mode.eval_u(0.0).unwrap();
        if n % 2 == 0 {
            assert!((u0 - w0).abs() < 1e-10 && du0.abs() < 1e-10);
        } else {
            assert!(u0.abs() < 1e-10 && (du0 - dw0).abs() < 1e-9 * dw0.abs());
        }
        // U'' = (λ - ν(ν+1) dn²(s, κ')) U by central differences
        let h = 1e-3;
        for &s in &[0.3, 1.0, 2.0] {
            let u = |x: f64| mode.eval_u(x).unwrap().0;
            let d2 = (u(s + h) - 2.0 * u(s) + u(s - h)) / (h * h);
            let (_, _, dn) = sn_cn_dn(s, kp);
            let rhs = (mode.lambda - nu * (nu + 1.0) * dn * dn) * u(s);
            assert!((d2 - rhs).abs() < 1e-5 * rhs.abs().max(u(s).abs()), "{nu} {n} {s}: {d2} {rhs}");
        }
    }
}

#[test]
fn imaginary_axis_ratio_decays_with_degree() {
    let kappa = 0.5;
    let kprime_big = Modulus::new(kappa).unwrap().big_k_prime();
    let (b, c) = (1.5 * kprime_big, 0.8 * kprime_big);
    for &nu in &[-0.5, 0.5] {
        let ratios: Vec<f64> = modes(nu, kappa, 8)
            .iter()
            .map(|m| {
                let ub = m.eval_u(b).unwrap().0;
                (0..=20).map(|i| m.eval_u(c * i as f64 / 20.0).unwrap().0 / ub).fold(0.0, f64::max)
            })
            .collect();
        for (n, r) in ratios.iter().enumerate() {
            assert!(*r >= 0.0 && *r <= 1.0, "{nu} {n} {r}");
        }
        // geometric decay: r_n^{1/(n+ν+1)} stays below some p < 1
        let p = ratios.iter().enumerate().map(|(n, r)| (r / 2.0).powf(1.0 / (n as f64 + nu + 1.0))).fold(0.0, f64::max);
        assert!(p < 0.9, "{p}");
    }
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("modes.json");
    let m = Modulus::new(0.4).unwrap();
    let problems: Vec<_> = (0..4).map(|n| LameProblem::new(0.5, n, m).unwrap()).collect();
    let mut cache = ModeCache::open(&path).unwrap();
    let first: Vec<_> = problems.iter().map(|p| cache.solve(p).unwrap()).collect();
    for mode in &first {
        cache.insert(mode);
    }
    cache.save().unwrap();
    let warm = ModeCache::open(&path).unwrap();
    for (p, mode) in problems.iter().zip(&first) {
        assert_eq!(warm.solve(p).unwrap().lambda.to_bits(), mode.lambda.to_bits());
    }
    assert_eq!((warm.hits(), warm.misses()), (4, 0));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn eigenvalue_stays_in_bracket(kappa in 0.05f64..0.95, nu_idx in 0usize..4, n in 0usize..6) {
        let nu = NUS[nu_idx];
        let mode = solve_eigen(&LameProblem::new(nu, n, Modulus::new(kappa).unwrap()).unwrap()).unwrap();
        let (lo, hi) = bracket(nu, n, kappa);
        prop_assert!(lo <= mode.lambda && mode.lambda <= hi);
        prop_assert_eq!(mode.prufer_zero_count(), n);
    }

    #[test]
    fn eigenfunction_has_definite_parity(kappa in 0.05f64..0.95, n in 0usize..5, f in 0.0f64..0.99) {
        let m = Modulus::new(kappa).unwrap();
        let mode = solve_eigen(&LameProblem::new(0.5, n, m).unwrap()).unwrap();
        let t = f * m.big_k();
        let (a, b) = (mode.eval_w(t).unwrap(), mode.eval_w(-t).unwrap());
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - sign * b).abs() < 1e-11);
    }
}
