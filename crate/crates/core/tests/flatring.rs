mod common;

use common::{gauss_legendre, rng, sn_cn_dn};
use peanut::elliptic::Modulus;
use peanut::flatring::*;
use proptest::prelude::*;
use rand::Rng;

fn coords(m: Modulus, s: f64, t: f64, phi: f64) -> FlatRingCoords {
    FlatRingCoords::new(s * m.big_k(), t * m.big_k_prime(), phi, m).unwrap()
}

#[test]
fn meridian_matches_oracle_elliptic_functions() {
    for &k in &[0.3, 0.7, 0.95] {
        let m = Modulus::new(k).unwrap();
        let kp = m.k_prime();
        for &(s, t) in &[(0.2, 0.5), (1.0, -0.3), (1.7, 0.9)] {
            let (s, t) = (s * m.big_k(), t * m.big_k_prime());
            let (sn, cn, dn) = sn_cn_dn(s, k);
            let (snt, cnt, dnt) = sn_cn_dn(t, kp);
            let den = k * cn + dn * dnt;
            let (r, z) = meridian(s, t, &m);
            assert!(
                (r - kp * cnt / den).abs() < 1e-9 && (z - k * kp * sn * snt / den).abs() < 1e-9,
                "{k} {s} {t}: {} {}",
                r - kp * cnt / den,
                z - k * kp * sn * snt / den
            );
            assert!((1.0 / r - inverse_r_sum_form(s, t, &m)).abs() < 1e-12 / r);
        }
    }
}

#[test]
fn round_trip_on_ten_thousand_points() {
    let mut g = rng(11);
    let mut worst: f64 = 0.0;
    for &k in &[0.3, 0.6, 0.9] {
        let m = Modulus::new(k).unwrap();
        let inv = InverseMap::new(m);
        for _ in 0..3334 {
            let c = coords(m, g.random_range(0.02..1.98), g.random_range(-0.97..0.97), g.random_range(-3.1..3.1));
            let back = inv.from_cartesian(&to_cartesian(&c)).unwrap();
            let e = ((back.s - c.s) / m.big_k()).abs().max(((back.t - c.t) / m.big_k_prime()).abs()).max((back.phi - c.phi).abs());
            worst = worst.max(e);
        }
    }
    assert!(worst <= 1e-9, "{worst:.2e}");
}

#[test]
fn omega_vanishes_on_coordinate_surfaces() {
    for &k in &[0.5, 0.8] {
        let m = Modulus::new(k).unwrap();
        for &s0 in &[0.3, 0.9, 1.2, 1.7] {
            let region = PeanutRegion::new(s0 * m.big_k(), m).unwrap();
            for i in 0..40 {
                let c = coords(m, s0, -0.99 + 1.98 * i as f64 / 39.0, 0.37 * i as f64);
                let p = to_cartesian(&c);
                assert!(omega_scaled(&p, &region).unwrap().abs() <= 1e-8);
                assert_eq!(region_classify(&p, &region), Region::Boundary);
            }
            let inside = to_cartesian(&coords(m, s0 * 0.8, 0.1, 0.0));
            let outside = to_cartesian(&coords(m, (s0 * 1.1).min(1.99), 0.1, 0.0));
            assert_eq!(region_classify(&inside, &region), Region::Interior);
            assert_eq!(region_classify(&outside, &region), Region::Exterior);
        }
    }
}

#[test]
fn inversion_and_unit_sphere() {
    for &k in &[0.2, 0.5, 0.9] {
        let m = Modulus::new(k).unwrap();
        for i in 0..50 {
            let (s, t, phi) = (0.05 + 1.9 * i as f64 / 49.0, (i as f64 * 0.7).sin() * 0.95, i as f64 * 0.13);
            let p = to_cartesian(&coords(m, s, t, phi));
            let q = to_cartesian(&coords(m, 2.0 - s, t, phi));
            assert!(invert_sphere(&p).unwrap().distance(&q) <= 1e-8 * q.norm().max(1.0));
            let sphere = to_cartesian(&coords(m, 1.0, t, phi));
            assert!((sphere.norm() - 1.0).abs() <= 1e-10);
        }
    }
    assert!((b_param(0.9).unwrap() - 1.0 / 19f64.sqrt()).abs() <= 1e-14);
    assert!((b_param_sqrt(0.9).unwrap() - 1.0 / 19f64.sqrt()).abs() <= 1e-14);
}

#[test]
fn coordinates_are_orthogonal_and_conformal_in_the_meridian() {
    let m = Modulus::new(0.7).unwrap();
    let h = 1e-5;
    for &(s, t) in &[(0.4, 0.2), (1.1, -0.6), (1.6, 0.8)] {
        let (s, t) = (s * m.big_k(), t * m.big_k_prime());
        let ds = {
            let (a, b) = (meridian(s + h, t, &m), meridian(s - h, t, &m));
            ((a.0 - b.0) / (2.0 * h), (a.1 - b.1) / (2.0 * h))
        };
        let dt = {
            let (a, b) = (meridian(s, t + h, &m), meridian(s, t - h, &m));
            ((a.0 - b.0) / (2.0 * h), (a.1 - b.1) / (2.0 * h))
        };
        let (ns, nt) = (ds.0.hypot(ds.1), dt.0.hypot(dt.1));
        assert!((ds.0 * dt.0 + ds.1 * dt.1).abs() < 1e-8 * ns * nt);
        assert!((ns - nt).abs() < 1e-8 * ns);
        assert!((ns - scale_h(s, t, &m)).abs() < 1e-8 * ns);
    }
}

#[test]
fn surface_element_integrates_to_mesh_area() {
    let m = Modulus::new(0.5).unwrap();
    let s0 = 1.7 * m.big_k();
    let kp = m.big_k_prime();
    // dS = h R dt dφ on s = s₀
    let exact = 2.0 * std::f64::consts::PI * gauss_legendre(200, -kp, kp, |t| scale_h(s0, t, &m) * meridian(s0, t, &m).0);
    let region = PeanutRegion::new(s0, m).unwrap();
    let coarse = peanut_mesh(&region, 80, 96).unwrap().area();
    let fine = peanut_mesh(&region, 160, 192).unwrap().area();
    assert!((fine - exact).abs() < (coarse - exact).abs());
    assert!((fine - exact).abs() < 2e-3 * exact, "{fine} {exact}");
    let sphere = 2.0 * std::f64::consts::PI * gauss_legendre(200, -kp, kp, |t| scale_h(m.big_k(), t, &m) * meridian(m.big_k(), t, &m).0);
    assert!((sphere - 4.0 * std::f64::consts::PI).abs() < 1e-10);
}

#[test]
fn coordinate_lines_cross_at_right_angles() {
    let m = Modulus::new(std::f64::consts::FRAC_1_SQRT_2).unwrap();
    let b = b_param(m.k()).unwrap();
    let s_values = [0.5 * m.big_k(), m.big_k(), 1.5 * m.big_k()];
    let t_values = [0.2 * m.big_k_prime(), 0.7 * m.big_k_prime()];
    let lines = coordinate_lines(&m, &s_values, &t_values, 400);
    let sphere = lines.iter().find(|l| l.kind == LineKind::FixedS && l.value == m.big_k()).unwrap();
    assert!(sphere.points.iter().all(|(r, z)| (r.hypot(*z) - 1.0).abs() < 1e-12));
    // t-lines run from the cut R ≥ 1/b to the cut R ≤ b
    for l in lines.iter().filter(|l| l.kind == LineKind::FixedT) {
        let (first, last) = (l.points.first().unwrap(), l.points.last().unwrap());
        assert!(first.1.abs() < 0.05 && last.1.abs() < 0.05);
        let (lo, hi) = (first.0.min(last.0), first.0.max(last.0));
        assert!(lo <= b * 1.02 && hi >= 0.98 / b, "{lo} {hi}");
    }
    let mut out = Vec::new();
    write_lines_csv(&lines, &mut out).unwrap();
    assert!(String::from_utf8(out).unwrap().starts_with("line,kind,value,index,R,z\n"));
    // tangents at crossings
    let h = 1e-6;
    for &s in &s_values {
        for &t in &t_values {
            let a = meridian(s + h, t, &m);
            let c = meridian(s, t + h, &m);
            let o = meridian(s, t, &m);
            let (u, v) = ((a.0 - o.0, a.1 - o.1), (c.0 - o.0, c.1 - o.1));
            let cos = (u.0 * v.0 + u.1 * v.1) / (u.0.hypot(u.1) * v.0.hypot(v.1));
            assert!(cos.abs() < 1e-3);
        }
    }
}

#[test]
fn mesh_for_the_captioned_peanut() {
    let m = Modulus::new(0.5).unwrap();
    let region = PeanutRegion::new(1.7 * m.big_k(), m).unwrap();
    let mesh = peanut_mesh(&region, 40, 48).unwrap();
    for (_, _, p) in &mesh.vertices {
        assert!(omega_scaled(p, &region).unwrap().abs() < 1e-6);
    }
    let a1 = peanut_mesh(&region, 320, 384).unwrap().area();
    let a2 = peanut_mesh(&region, 640, 768).unwrap().area();
    assert!((a1 - a2).abs() < 1e-4 * a2);
    let sphere = peanut_mesh(&PeanutRegion::new(m.big_k(), m).unwrap(), 20, 24).unwrap();
    assert!(sphere.vertices.iter().all(|(_, _, p)| (p.norm() - 1.0).abs() < 1e-9));
}

#[test]
fn axis_and_cuts_are_rejected() {
    let m = Modulus::new(0.6).unwrap();
    let b = b_param(0.6).unwrap();
    assert!(from_cartesian(&CartesianPoint::new(0.0, 0.0, 0.4), &m).is_err());
    assert!(from_cartesian(&CartesianPoint::new(0.5 * b, 0.0, 0.0), &m).is_err());
    assert!(from_cartesian(&CartesianPoint::new(2.0 / b, 0.0, 0.0), &m).is_err());
    assert!(from_cartesian(&CartesianPoint::new(0.5 * (b + 1.0 / b), 0.0, 0.0), &m).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn round_trip_property(k in 0.05f64..0.95, s in 0.05f64..1.95, t in -0.95f64..0.95, phi in -3.0f64..3.0) {
        let m = Modulus::new(k).unwrap();
        let c = coords(m, s, t, phi);
        let back = from_cartesian(&to_cartesian(&c), &m).unwrap();
        prop_assert!((back.s - c.s).abs() < 1e-9 * m.big_k());
        prop_assert!((back.t - c.t).abs() < 1e-9 * m.big_k_prime());
    }

    #[test]
    fn inversion_swaps_interior_and_exterior(k in 0.1f64..0.9, s0 in 0.3f64..0.95, s in 0.05f64..1.95, t in -0.9f64..0.9) {
        let m = Modulus::new(k).unwrap();
        let region = PeanutRegion::new(s0 * m.big_k(), m).unwrap();
        let mirrored = PeanutRegion::new((2.0 - s0) * m.big_k(), m).unwrap();
        prop_assume!((s - s0).abs() > 1e-3);
        let p = to_cartesian(&coords(m, s, t, 0.4));
        let q = invert_sphere(&p).unwrap();
        let a = region_classify(&p, &region);
        let b = region_classify(&q, &mirrored);
        prop_assert!((a == Region::Interior) == (b == Region::Exterior));
    }
}
