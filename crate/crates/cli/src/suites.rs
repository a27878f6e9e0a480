//! Verification suites behind `peanut verify`.

use clap::ValueEnum;
use peanut::flatring::{CartesianPoint, FlatRingCoords};
use peanut::harmonics::{HarmonicBasis, TruncationSpec};
use peanut::lame::LameProblem;
use peanut::limits::{
    check_addition_theorem, check_amn_to_bmn, check_expansion, check_integral_relation, check_inteq1, check_inteq2, limit_w_exponential,
    limit_w_gegenbauer, spherical_coordinate_limit, spherical_multipole, LimitReport, PhaseSign, VerificationReport,
};
use rayon::prelude::*;

use crate::config::parse_index_list;
use crate::{modulus, Context, Failure, Suite, VerifyArgs};

/// Sample geometries `(s/K, t/K', s*/K, t*/K')`, all with `s < s*`.
const GEOMETRIES: [(f64, f64, f64, f64); 10] = [
    (0.8, 0.2, 1.5, -0.4),
    (0.5, -0.6, 1.3, 0.1),
    (0.3, 0.0, 1.6, 0.7),
    (0.9, 0.5, 1.7, -0.8),
    (0.2, 0.9, 1.2, -0.9),
    (1.0, -0.3, 1.8, 0.3),
    (0.6, 0.7, 1.9, 0.6),
    (0.4, -0.9, 1.1, -0.5),
    (0.7, 0.1, 1.4, 0.95),
    (0.1, -0.2, 1.0, 0.4),
];

/// Pairs `((s, t, φ), (s*, t*, φ*))` for the expansion suite, `s, s*` in units of K.
const PAIRS: [((f64, f64, f64), (f64, f64, f64)); 5] = [
    ((0.9, 0.3, 0.4), (1.4, -0.2, 2.1)),
    ((0.5, -0.4, 0.0), (1.5, 0.6, 1.0)),
    ((0.3, 0.8, -1.2), (1.2, -0.7, 2.5)),
    ((0.7, 0.0, 0.3), (1.6, 0.1, -2.0)),
    ((1.0, 0.5, 1.5), (1.8, -0.5, -1.5)),
];

const KAPPAS: [f64; 4] = [0.3, 0.1, 0.03, 0.01];
const KS: [f64; 3] = [0.9, 0.99, 0.999];

type Lines = Vec<(String, bool)>;

fn verification(r: VerificationReport) -> (String, bool) {
    (r.to_json_line(), r.passed)
}

fn limit(r: LimitReport) -> (String, bool) {
    (r.to_json_line(), r.passed)
}

fn basis(ctx: &Context, k: f64, m_max: usize, n_max: usize) -> Result<HarmonicBasis, Failure> {
    let mut cache = ctx.open_cache()?;
    let b = HarmonicBasis::with_cache(modulus(k)?, m_max, n_max, &mut cache)?;
    cache.save()?;
    Ok(b)
}

fn collect<T: Send, F>(items: Vec<T>, f: F) -> Result<Lines, Failure>
where
    F: Fn(T) -> Result<(String, bool), Failure> + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

fn index_list(ctx: &mut Context, key: &str, flag: Option<String>, default: &str) -> Result<Vec<usize>, Failure> {
    let text = ctx.settings.pick(key, flag, default.to_string())?;
    parse_index_list(&text)
}

pub fn run(ctx: &mut Context, a: &VerifyArgs) -> Result<Lines, Failure> {
    let name = a.suite.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    ctx.settings.record("suite", name);
    match a.suite {
        Suite::Addition => {
            let k = ctx.settings.pick("k", a.k, 0.7)?;
            let ms = index_list(ctx, "m", a.m.clone(), "0..3")?;
            let n_max = ctx.settings.pick("n-max", a.n_max, 40)?;
            let b = basis(ctx, k, ms.iter().copied().max().unwrap_or(0), n_max)?;
            let (kk, kp) = (b.modulus().big_k(), b.modulus().big_k_prime());
            let work: Vec<_> = ms.iter().flat_map(|&m| GEOMETRIES.iter().map(move |g| (m, *g))).collect();
            collect(work, |(m, (s, t, ss, ts))| Ok(verification(check_addition_theorem(&b, m, s * kk, t * kp, ss * kk, ts * kp, n_max)?)))
        }
        Suite::Integral => {
            let k = ctx.settings.pick("k", a.k, 0.7)?;
            let ms = index_list(ctx, "m", a.m.clone(), "0..2")?;
            let ns = index_list(ctx, "n", a.n.clone(), "0..3")?;
            let b = basis(ctx, k, ms.iter().copied().max().unwrap_or(0), ns.iter().copied().max().unwrap_or(0))?;
            let (kk, kp) = (b.modulus().big_k(), b.modulus().big_k_prime());
            let work: Vec<_> = ms.iter().flat_map(|&m| ns.iter().map(move |&n| (m, n))).collect();
            collect(work, |(m, n)| Ok(verification(check_integral_relation(&b, m, n, 0.8 * kk, 1.5 * kk, -0.4 * kp)?)))
        }
        Suite::Inteq1 | Suite::Inteq2 => {
            let k = ctx.settings.pick("k", a.k, 0.6)?;
            let (dm, dn) = if a.suite == Suite::Inteq1 { ("0..2", "0..3") } else { ("1..2", "0..1") };
            let ms = index_list(ctx, "m", a.m.clone(), dm)?;
            let ns = index_list(ctx, "n", a.n.clone(), dn)?;
            let phase = if a.suite == Suite::Inteq2 {
                match ctx.settings.pick("phase", a.phase.clone(), "minus".to_string())?.as_str() {
                    "minus" => PhaseSign::Minus,
                    "plus" => PhaseSign::Plus,
                    other => return Err(Failure::Usage(format!("phase must be minus or plus, got {other}"))),
                }
            } else {
                PhaseSign::Minus
            };
            let km = modulus(k)?;
            let mut cache = ctx.open_cache()?;
            let problems = ms
                .iter()
                .flat_map(|&m| ns.iter().map(move |&n| (m as f64 - 0.5, n)))
                .map(|(nu, n)| LameProblem::new(nu, n, km.complement()))
                .collect::<peanut::Result<Vec<_>>>()?;
            let modes = problems.par_iter().map(|p| cache.solve(p)).collect::<peanut::Result<Vec<_>>>()?;
            for m in &modes {
                cache.insert(m);
            }
            cache.save()?;
            let (kk, kp) = (km.big_k(), km.big_k_prime());
            let inteq1 = a.suite == Suite::Inteq1;
            collect(modes, |mode| {
                Ok(verification(if inteq1 {
                    check_inteq1(&mode, 1.2 * kk, 0.4 * kk, 0.3 * kp)?
                } else {
                    check_inteq2(&mode, 0.25 * kp, phase)?
                }))
            })
        }
        Suite::LimitK0 => {
            let ms = index_list(ctx, "m", a.m.clone(), "0..2")?;
            let ns = index_list(ctx, "n", a.n.clone(), "0..2")?;
            ctx.settings.record("kappa", "0.3,0.1,0.03,0.01");
            let taus: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();
            let sigmas = [0.0, 0.5, 1.0, 1.5, 2.0];
            let work: Vec<_> = ms.iter().flat_map(|&m| ns.iter().map(move |&n| (m, n))).collect();
            let mut lines = collect(work.clone(), |(m, n)| Ok(limit(limit_w_gegenbauer(m as f64 - 0.5, n, &KAPPAS, &taus)?.0)))?;
            lines.extend(collect(work, |(m, n)| Ok(limit(limit_w_exponential(m as f64 - 0.5, n, &KAPPAS, &sigmas)?)))?);
            Ok(lines)
        }
        Suite::LimitK1 => {
            let ms = index_list(ctx, "m", a.m.clone(), "0..2")?;
            let ns = index_list(ctx, "n", a.n.clone(), "0..2")?;
            ctx.settings.record("k", "0.9,0.99,0.999");
            let work: Vec<_> = ms.iter().flat_map(|&m| ns.iter().map(move |&n| (m, n))).collect();
            let mut lines = collect(work, |(m, n)| Ok(limit(check_amn_to_bmn(m as i32, n, -0.3, 0.4, 0.7, 2.0, &KS)?)))?;
            let (sigma, tau, phi) = (0.3, 1.0, 0.5);
            let mut point = Vec::new();
            let mut radius = Vec::new();
            for &k in &KS {
                let (d, r) = spherical_coordinate_limit(sigma, tau, phi, k)?;
                point.push(d);
                radius.push(r);
            }
            let params = [("sigma", sigma), ("tau", tau), ("phi", phi)];
            lines.push(limit(LimitReport::new("limit_coordinates", &params, KS.to_vec(), point, 5e-3)));
            lines.push(limit(LimitReport::new("limit_radius", &params, KS.to_vec(), radius, 5e-3)));
            Ok(lines)
        }
        Suite::Expansion => {
            let k = ctx.settings.pick("k", a.k, 0.8)?;
            let m_max = ctx.settings.pick("m-max", a.m_max, 12)?;
            let n_max = ctx.settings.pick("n-max", a.n_max, 25)?;
            let trunc = TruncationSpec::new(m_max, n_max, 1e-10)?;
            let b = basis(ctx, k, m_max, n_max)?;
            let m = *b.modulus();
            let (kk, kp) = (m.big_k(), m.big_k_prime());
            collect(PAIRS.to_vec(), |((s, t, p), (ss, ts, ps))| {
                let c = FlatRingCoords::new(s * kk, t * kp, p, m)?;
                let cs = FlatRingCoords::new(ss * kk, ts * kp, ps, m)?;
                Ok(verification(check_expansion(&b, &c, &cs, &trunc)?))
            })
        }
        Suite::Multipole => {
            let n_max = ctx.settings.pick("n-max", a.n_max, 40)?;
            let trunc = TruncationSpec::new(n_max, n_max, 1e-15)?;
            let work = vec![(0.3, -0.2, 0.4), (-1.0, 0.7, 0.6), (0.0, 0.0, 2.0), (1.5, 1.5, -0.2), (0.1, -0.9, -0.3)];
            collect(work, |(x, y, z)| {
                let q = CartesianPoint::new(x, y, z);
                // half the radius, in a different direction
                let dir = CartesianPoint::new(y - 0.3 * z + 0.1, z + 0.2 * x, x - 0.1 * y + 0.2);
                let scale = 0.5 * q.norm() / dir.norm();
                let p = CartesianPoint::new(dir.x * scale, dir.y * scale, dir.z * scale);
                let direct = 1.0 / p.distance(&q);
                let sum = spherical_multipole(&p, &q, &trunc)?;
                let r = VerificationReport::new(
                    "multipole",
                    &[("r", p.norm()), ("r_star", q.norm()), ("n_max", n_max as f64)],
                    direct.into(),
                    sum.into(),
                    n_max + 1,
                    1e-9,
                );
                Ok(verification(r))
            })
        }
    }
}
