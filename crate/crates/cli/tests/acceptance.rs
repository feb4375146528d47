//! End-to-end acceptance gate. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use modulieis_cli::{dispatch, CommandSpec, Status};
use modulieis_core::analytic::{
    check_division_slopes, check_slope_formula, quasi_periods, LatticeConfig,
};
use modulieis_core::curve::{
    full_torsion_curves, scale_curve, torsion_table, TorsionIndex, TorsionTable, WeierstrassCurve,
};
use modulieis_core::exactfield::is_prime;
use modulieis_core::hecke::{
    reduce_lambda_convolution, required_level, verify_trace_identities, CompositeTorsionContext,
};
use modulieis_core::identities::{fourier_round_trip, verify_all, IdentityId};
use modulieis_core::modelbuild::{build_model, verify_model, QuadricModel};
use modulieis_core::pairing::{sample_points, verify_translation_law, weil_pairing};
use modulieis_core::series::{
    compose_with_n, expand_xy, vertical_series, BalancedSeries, SeriesContext, DEFAULT_ORDER,
};
use modulieis_core::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(r: modulieis_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// The first curve on each of the first `count` primes `p ≡ 1 (mod level)` that carry one.
fn curves_on_distinct_primes(level: u32, count: usize) -> Vec<WeierstrassCurve> {
    let l = level as u64;
    (1u64..)
        .map(|k| k * l + 1)
        .filter(|&p| p > DEFAULT_ORDER as u64 && is_prime(p) && !(6 * l).is_multiple_of(p))
        .filter_map(|p| full_torsion_curves(p, level).ok()?.next())
        .take(count)
        .collect()
}

fn table(c: &WeierstrassCurve, level: u32) -> Result<TorsionTable, String> {
    core(torsion_table(c, level))
}

fn identity_suite() -> Outcome {
    let start = Instant::now();
    let jobs: Vec<(u32, WeierstrassCurve)> = [3u32, 4, 5, 7]
        .into_iter()
        .flat_map(|l| {
            curves_on_distinct_primes(l, 3)
                .into_iter()
                .map(move |c| (l, c))
        })
        .collect();
    let results: Vec<Result<usize, String>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(l, c)| {
                s.spawn(move || {
                    let ctx = core(SeriesContext::new(&table(c, *l)?, DEFAULT_ORDER))?;
                    let reports = core(verify_all(&ctx, &IdentityId::ALL, 200, 0))?;
                    let bad: Vec<_> = reports
                        .iter()
                        .filter(|r| !r.passed())
                        .map(|r| r.identity.clone())
                        .collect();
                    ensure(bad.is_empty(), || {
                        format!("level {l} curve {}: failed {bad:?}", c.to_json())
                    })?;
                    Ok(reports.iter().map(|r| r.trials).sum())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("identity worker"))
            .collect()
    });
    let mut checks = 0;
    for r in results {
        checks += r?;
    }
    let elapsed = start.elapsed();
    ensure(jobs.len() == 12, || {
        format!("found {} curves, wanted 12", jobs.len())
    })?;
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:.1?}")
    })?;
    Ok(format!("12 curves, {checks} checks, {elapsed:.1?}"))
}

fn fourier_duality() -> Outcome {
    let mut n = 0;
    for l in [3u32, 5] {
        for c in curves_on_distinct_primes(l, 2) {
            let ctx = core(SeriesContext::new(&table(&c, l)?, DEFAULT_ORDER))?;
            let r = core(fourier_round_trip(&ctx))?;
            ensure(r.passed(), || {
                format!("level {l}: {:?}", r.failures.first())
            })?;
            n += r.trials;
        }
    }
    Ok(format!("{n} round trips exact"))
}

fn series_patterns() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let primes = [1009u64, 2003, 10007, 65537, 100003];
    let mut done = 0;
    while done < 10 {
        let p = primes[rng.random_range(0..primes.len())];
        let (a, b) = (rng.random_range(1..p as i64), rng.random_range(1..p as i64));
        let Ok(c) = WeierstrassCurve::over_prime(p, 2, a, b) else {
            continue;
        };
        let f = c.field();
        let e = core(expand_xy(&c, DEFAULT_ORDER))?;
        ensure(e.x.coeff_at(2) == Some(-&c.a), || {
            format!("x t^2 on {}", c.to_json())
        })?;
        ensure(e.omega.coeff_at(4) == Some(&f.int(2) * &c.a), || {
            format!("omega t^4 on {}", c.to_json())
        })?;
        for n in [2i64, 3] {
            let tn = core(e.t_times(n as u64))?;
            let opening = &(&(&f.int(2) * &c.a) * &f.int(n - n.pow(5))) / &f.int(5);
            let ok = tn.lead() == 1
                && tn.c(0) == f.int(n)
                && (1..=3).all(|j| tn.c(j).is_zero())
                && tn.c(4) == opening;
            ensure(ok, || format!("t∘[{n}] opening on {}", c.to_json()))?;
        }
        done += 1;
    }
    let mut composed = 0;
    for (p, l) in [(31u64, 3u32), (71, 5)] {
        let c = full_torsion_curves(p, l)
            .map_err(|e| e.to_string())?
            .next()
            .ok_or("no curve")?;
        let ctx = core(SeriesContext::new(&table(&c, l)?, DEFAULT_ORDER))?;
        let t = ctx.table();
        let f = t.curve().field();
        for i in t.nonzero_indices() {
            for n in [2i64, 3] {
                let g = core(compose_with_n(
                    ctx.expansion(),
                    ctx.point_series(i),
                    n as u64,
                ))?
                .scale(&f.int(n));
                let ok = g.c(0).is_one()
                    && g.c(1) == ctx.lambda(i) * &f.int(n)
                    && g.c(2) == ctx.mu(i) * &f.int(n * n)
                    && g.c(3) == ctx.nu(i) * &f.int(n * n * n);
                ensure(ok, || format!("composition pattern n={n} at {}", i.key()))?;
                composed += 1;
            }
        }
    }
    Ok(format!("10 random curves, {composed} compositions"))
}

fn balanced_grading() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for (p, l) in [(31u64, 3u32), (29, 4), (71, 5)] {
        let c = full_torsion_curves(p, l)
            .map_err(|e| e.to_string())?
            .next()
            .ok_or("no curve")?;
        let t = table(&c, l)?;
        let s = core(SeriesContext::new(&t, DEFAULT_ORDER))?;
        for _ in 0..4 {
            let u = t.curve().field().int(rng.random_range(2..p as i64));
            let (c2, map) = core(scale_curve(t.curve(), &u))?;
            let t2 = core(t.transport(&c2, &map))?;
            let s2 = core(SeriesContext::new(&t2, DEFAULT_ORDER))?;
            let graded = |a: &BalancedSeries, b: &BalancedSeries| {
                a.lead() == b.lead()
                    && (0..=DEFAULT_ORDER).all(|j| b.c(j) == &a.c(j) * &u.pow(j as u64))
            };
            let mut pairs = vec![
                (s.expansion().x.clone(), s2.expansion().x.clone()),
                (s.expansion().y.clone(), s2.expansion().y.clone()),
                (s.expansion().omega.clone(), s2.expansion().omega.clone()),
            ];
            for i in t.nonzero_indices() {
                pairs.push((s.point_series(i).clone(), s2.point_series(i).clone()));
                pairs.push((
                    core(vertical_series(&s, i))?,
                    core(vertical_series(&s2, i))?,
                ));
            }
            for (k, (a, b)) in pairs.iter().enumerate() {
                ensure(graded(a, b), || format!("series {k} at p={p} u={u}"))?;
            }
            checked += pairs.len();
        }
    }
    Ok(format!("{checked} series rescale as u^j"))
}

fn weil_pairing_laws() -> Outcome {
    for (p, l) in [(31u64, 3u32), (71, 5)] {
        let c = full_torsion_curves(p, l)
            .map_err(|e| e.to_string())?
            .next()
            .ok_or("no curve")?;
        let t = table(&c, l)?;
        let idx: Vec<TorsionIndex> = t.indices().collect();
        let n = idx.len();
        let mut e = vec![0u32; n * n];
        for (a, &pa) in idx.iter().enumerate() {
            for (b, &pb) in idx.iter().enumerate() {
                e[a * n + b] = core(weil_pairing(&t, t.point(pa), t.point(pb)))?.exponent;
            }
        }
        let pos = |i: TorsionIndex| idx.iter().position(|&k| k == i).expect("index");
        for (a, &pa) in idx.iter().enumerate() {
            ensure(e[a * n + a] == 0, || format!("e(P,P) ≠ 1 at {}", pa.key()))?;
            ensure(pa.is_zero() || (0..n).any(|b| e[a * n + b] != 0), || {
                format!("degenerate at {}", pa.key())
            })?;
            for (a2, &pa2) in idx.iter().enumerate() {
                let sum = pos(t.add(pa, pa2));
                for b in 0..n {
                    ensure(e[sum * n + b] == (e[a * n + b] + e[a2 * n + b]) % l, || {
                        format!(
                            "not bilinear at {},{},{}",
                            pa.key(),
                            pa2.key(),
                            idx[b].key()
                        )
                    })?;
                }
            }
        }
    }
    // [3]Q′ = Q needs rational 9-torsion.
    let c = full_torsion_curves(163, 9)
        .map_err(|e| e.to_string())?
        .next()
        .ok_or("no 9-torsion curve")?;
    let t = table(&c, 3)?;
    let samples = sample_points(&t, 10, 7);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..24 {
        let q = t.idx(rng.random_range(0..3), rng.random_range(0..3));
        let r = t.idx(rng.random_range(0..3), rng.random_range(0..3));
        let rep = core(verify_translation_law(&t, q, r, &samples))?;
        ensure(rep.consistent, || {
            format!("translation law at Q={} R={}", rep.q, rep.r)
        })?;
    }
    Ok("levels 3 and 5 exhaustive, 24 translation pairs".into())
}

fn trace_identities() -> Outcome {
    let ctx = core(CompositeTorsionContext::search(2, 3, 6, 0, DEFAULT_ORDER))?;
    ensure(ctx.inclusions_hold(), || "subgroup inclusions".into())?;
    let r = core(verify_trace_identities(&ctx))?;
    ensure(r.passed(), || format!("{:?}", r.failures.first()))?;
    Ok(format!("{} checks on {}", r.trials, r.curve))
}

fn reduction_certificates() -> Outcome {
    let mut certs = 0;
    for (n, s) in [(2u32, 0i64), (2, 1), (3, 1), (3, 2)] {
        let big = required_level(n, s, 3);
        let mut p_min = 0;
        for _ in 0..3 {
            let ctx = core(CompositeTorsionContext::search(
                n,
                3,
                big,
                p_min,
                DEFAULT_ORDER,
            ))?;
            let t = ctx.table();
            p_min = t.curve().field().characteristic() + 1;
            let pool = ctx.subgroup(n * 3);
            for k in (0..pool.len()).step_by(7) {
                let (a, b) = (pool[k], pool[(k * 5 + 4) % pool.len()]);
                let cert = core(reduce_lambda_convolution(&ctx, a, b, s, n))?;
                let v = cert.constraint_violations();
                ensure(v.is_empty(), || format!("(n,s)=({n},{s}): {v:?}"))?;
                ensure(
                    cert.terms.iter().all(|x| x.coefficient % n as i64 == 0),
                    || format!("(n,s)=({n},{s}) coefficient"),
                )?;
                ensure(core(cert.holds_at(&ctx))?, || {
                    format!(
                        "(n,s)=({n},{s}) A={} B={} p={}",
                        a.key(),
                        b.key(),
                        p_min - 1
                    )
                })?;
                certs += 1;
            }
        }
    }
    Ok(format!("{certs} certificates on 3 curves per (n,s)"))
}

/// Tries successive curves until the rank checks succeed.
fn model_for(
    level: u32,
    curves: impl IntoIterator<Item = WeierstrassCurve>,
) -> Result<(QuadricModel, TorsionTable), String> {
    for c in curves.into_iter().take(8) {
        let t = table(&c, level)?;
        match build_model(&t) {
            Ok(m) => return Ok((m, t)),
            Err(Error::RetryNeeded { .. }) => continue,
            Err(e) => return Err(e.to_string()),
        }
    }
    Err(format!("no model at level {level} after 8 curves"))
}

fn model_dimensions() -> Outcome {
    let expected = [
        (3u32, (3, 5, 1)),
        (4, (5, 9, 6)),
        (5, (11, 21, 45)),
        (7, (26, 54, 297)),
    ];
    let mut out = Vec::new();
    for (l, want) in expected {
        let start = Instant::now();
        let (m, _) = model_for(l, curves_on_distinct_primes(l, 8))?;
        let d = &m.diagnostics;
        let elapsed = start.elapsed();
        ensure((d.dim_v, d.dim_vp, d.kernel) == want, || {
            format!("level {l}: got ({}, {}, {})", d.dim_v, d.dim_vp, d.kernel)
        })?;
        if l == 7 {
            ensure(d.fiber == 168, || format!("level 7 fiber {}", d.fiber))?;
            ensure(elapsed < Duration::from_secs(120), || {
                format!("level 7 took {elapsed:.1?}")
            })?;
        }
        out.push(format!("ℓ={l} {want:?} in {elapsed:.1?}"));
    }
    Ok(out.join(", "))
}

fn conic() -> Outcome {
    let (m, _) = model_for(3, curves_on_distinct_primes(3, 8))?;
    ensure(m.quadrics.len() == 1, || {
        format!("{} quadrics", m.quadrics.len())
    })?;
    let g = core(m.gram_matrix(&m.quadrics[0]))?;
    let det = core(g.determinant())?;
    ensure(!det.is_zero() && g.rank() == 3, || {
        format!("det {det}, rank {}", g.rank())
    })?;
    Ok(format!("det {det}, rank 3"))
}

fn cross_curve() -> Outcome {
    let mut out = Vec::new();
    for (p, l) in [(19u64, 3u32), (31, 3), (71, 5)] {
        let curves: Vec<_> = full_torsion_curves(p, l)
            .map_err(|e| e.to_string())?
            .collect();
        let (m, t1) = model_for(l, curves.clone())?;
        let other = curves
            .iter()
            .find(|c| *c != t1.curve())
            .ok_or_else(|| format!("one curve over F_{p}"))?;
        let chk = core(verify_model(&m, &table(other, l)?))?;
        ensure(chk.passed(), || {
            format!("level {l} p={p}: {} failures", chk.failures.len())
        })?;
        out.push(format!("p={p} ℓ={l} {}×{}", chk.quadrics, chk.fiber));
    }
    Ok(out.join(", "))
}

fn analytic_residuals() -> Outcome {
    let tau = Complex64::new(0.31, 1.7);
    let cfg = core(LatticeConfig::new(tau, 5, 200.0, 1e-6))?;
    let half = core(cfg.with_radius(100.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut worst, mut worst_half) = (0f64, 0f64);
    let mut probes = 0;
    while probes < 10 {
        let mut draw =
            || Complex64::new(rng.random_range(0.0..1.0), 0.0) + tau * rng.random_range(0.0..1.0);
        let (alpha, beta) = (draw(), draw());
        match (
            check_slope_formula(&cfg, alpha, beta),
            check_slope_formula(&half, alpha, beta),
        ) {
            (Ok(r), Ok(h)) => {
                worst = worst.max(r.residual);
                worst_half = worst_half.max(h.residual);
                probes += 1;
            }
            (Err(Error::DegenerateTriple), _) | (_, Err(Error::DegenerateTriple)) => {}
            (Err(e), _) | (_, Err(e)) => return Err(e.to_string()),
        }
    }
    let leg = core(quasi_periods(&cfg))?.legendre_residual;
    let leg_half = core(quasi_periods(&half))?.legendre_residual;
    let div = core(check_division_slopes(&cfg))?.residual;
    let div_half = core(check_division_slopes(&half))?.residual;
    let summary = format!("chord {worst:.1e} (R/2 {worst_half:.1e}), Legendre {leg:.1e} (R/2 {leg_half:.1e}), slopes {div:.1e} (R/2 {div_half:.1e})");
    ensure(worst < 1e-6 && leg < 1e-6 && div < 1e-5, || summary.clone())?;
    ensure(
        worst < worst_half && leg < leg_half && div < div_half,
        || format!("no shrink: {summary}"),
    )?;
    Ok(summary)
}

fn determinism() -> Outcome {
    let spec = CommandSpec::from_args([
        "modulieis",
        "build-model",
        "--level",
        "5",
        "--prime",
        "auto",
        "--seed",
        "0",
    ])
    .map_err(|e| e.to_string())?;
    let a = dispatch(&spec).map_err(|e| e.to_string())?;
    let b = dispatch(&spec).map_err(|e| e.to_string())?;
    ensure(a.status == Status::Ok && b.status == Status::Ok, || {
        "build-model did not succeed".into()
    })?;
    ensure(a.payload_bytes() == b.payload_bytes(), || {
        "payloads differ".into()
    })?;
    Ok(format!(
        "{} identical payload bytes",
        a.payload_bytes().len()
    ))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        ("identity suite", identity_suite),
        ("fourier duality round trip", fourier_duality),
        ("series patterns", series_patterns),
        ("balanced grading", balanced_grading),
        ("weil pairing", weil_pairing_laws),
        ("trace identities", trace_identities),
        ("reduction certificates", reduction_certificates),
        ("model dimensions", model_dimensions),
        ("level 3 conic", conic),
        ("cross-curve model check", cross_curve),
        ("analytic residuals", analytic_residuals),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let tag = if outcome.is_ok() { "PASS" } else { "FAIL" };
        let detail = outcome.unwrap_or_else(|e| {
            failed += 1;
            e
        });
        println!(
            "{tag} C{:<2} {name}: {detail} [{:.1?}]",
            k + 1,
            start.elapsed()
        );
    }
    println!("acceptance: {}/12 passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
