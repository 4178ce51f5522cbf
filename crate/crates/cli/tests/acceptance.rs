//! Acceptance report: one PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use netrev::certificates::{ratio_certificate, CertificateKind, CertificateParams};
use netrev::netmodel::{gadget, generate, GadgetKind, GeneratorKind, GeneratorParams};
use netrev::oracle::{
    best_ie_exhaustive, best_permutation, best_strategy_search, gadget_revenue_table,
    optimize_prices_for_order, simulate, simulate_random_ie, SimulationReport,
};
use netrev::revenue::{
    ie_revenue, random_ie_revenue, revenue_bounds, sorted_order_revenue, strategy_revenue,
    GeneralizedIeStrategy, IeStrategy, MarketingStrategy, Strategy,
};
use netrev::rng;
use netrev::sdprelax::{best_rounding, build_sdp, sdp_ie, solve_sdp, SdpIeParams, SolverOptions};
use netrev::strategies::{round_to_ie, RoundingSchedule, PAPER_Q};
use netrev::SocialNetwork;
use netrev_cli::table::{run_table, TableOptions};
use rand::Rng;

struct Check {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Check {
    Check {
        ok,
        detail: detail.into(),
    }
}

fn near(name: &str, got: f64, want: f64, tol: f64) -> Check {
    check(
        (got - want).abs() <= tol,
        format!("{name}: {got:.6} vs {want} (tol {tol:e})"),
    )
}

fn at_least(name: &str, got: f64, floor: f64) -> Check {
    check(got >= floor, format!("{name}: {got:.6} >= {floor}"))
}

fn report(id: usize, title: &str, limit: Duration, run: impl FnOnce() -> Vec<Check>) -> bool {
    let start = Instant::now();
    let checks = run();
    let elapsed = start.elapsed();
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.ok).collect();
    let in_time = elapsed <= limit;
    let ok = failed.is_empty() && in_time;
    for c in &checks {
        println!("    [{}] {}", if c.ok { "ok" } else { "FAILED" }, c.detail);
    }
    println!(
        "{} criterion {id}: {title} ({}/{} checks, {:.2}s of {}s budget{})",
        if ok { "PASS" } else { "FAIL" },
        checks.len() - failed.len(),
        checks.len(),
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", over budget" }
    );
    ok
}

fn unit(kind: GeneratorKind, n: usize, directed: bool) -> SocialNetwork {
    generate(kind, &GeneratorParams::unit(n, directed)).unwrap()
}

/// Random weighted instance, with a self-weight on buyer 0 for every third seed.
fn random_instance(seed: u64, n: usize, directed: bool, density: f64) -> SocialNetwork {
    let mut params = GeneratorParams::unit(n, directed);
    params.density = density;
    params.weight_min = 0.2;
    params.weight_max = 2.0;
    params.seed = seed;
    let plain = generate(GeneratorKind::Random, &params).unwrap();
    if !seed.is_multiple_of(3) {
        return plain;
    }
    let mut b = SocialNetwork::builder(plain.directedness(), n);
    for e in plain.edges() {
        b.add_edge(e.from, e.to, e.weight).unwrap();
    }
    b.add_self_weight(0, 0.7).unwrap();
    b.build().unwrap()
}

fn criterion1() -> Vec<Check> {
    let cycle = unit(GeneratorKind::Cycle, 4, false);
    let dag = unit(GeneratorKind::CompleteDag, 4, true);
    let ie13 = ie_revenue(&cycle, &IeStrategy::new(vec![0, 2], 0.5).unwrap()).unwrap();
    let (_, reopt) = optimize_prices_for_order(&cycle, &[0, 1, 2, 3]).unwrap();
    let rev = |order: Vec<usize>, prices: Vec<f64>| {
        strategy_revenue(&dag, &MarketingStrategy::new(order, prices).unwrap()).unwrap()
    };
    vec![
        check(
            ie13 == 1.0,
            format!("4-cycle IE({{1,3}}, 1/2) = {ie13} exactly 1"),
        ),
        near("4-cycle re-optimized order (1,2,3,4)", reopt, 0.7772, 5e-4),
        near(
            "DAG first pair",
            rev(vec![0, 1, 2, 3], vec![1.0, 0.7474, 0.5715, 0.5]),
            1.1964,
            5e-4,
        ),
        near(
            "DAG second pair",
            rev(vec![0, 2, 1, 3], vec![1.0, 0.625, 0.625, 0.5]),
            1.03125,
            5e-4,
        ),
        near(
            "DAG third pair",
            rev(vec![1, 0, 2, 3], vec![1.0, 1.0, 0.5625, 0.5]),
            1.1328,
            5e-4,
        ),
        near(
            "DAG IE({u1,u2}, 0.5147)",
            ie_revenue(&dag, &IeStrategy::new(vec![0, 1], 0.5147).unwrap()).unwrap(),
            1.0634,
            5e-4,
        ),
    ]
}

fn criterion2() -> Vec<Check> {
    let tri = best_strategy_search(&gadget(GadgetKind::ExtendedTriangle).unwrap()).unwrap();
    let path = best_strategy_search(&gadget(GadgetKind::ThreePath).unwrap()).unwrap();
    let row = |kind, pat: &[f64]| gadget_revenue_table(kind, Some(pat)).unwrap()[0].value;
    let mut checks = vec![
        near(
            "extended triangle search",
            tri.best_value,
            177.0 / 128.0,
            1e-4,
        ),
        near("3-path search", path.best_value, 0.75, 1e-4),
        near(
            "extended triangle, selection (1/2, 1/2, 1)",
            row(GadgetKind::ExtendedTriangle, &[0.5, 0.5, 1.0]),
            21.0 / 16.0,
            1e-4,
        ),
        near(
            "3-path, selection (1, 1)",
            row(GadgetKind::ThreePath, &[1.0, 1.0]),
            41.0 / 64.0,
            1e-4,
        ),
    ];
    for p in [0.5, 0.75] {
        let want = p * (1.0 - p) * (2.0 + p);
        checks.push(near(
            &format!("set triangle at p = {p}"),
            row(GadgetKind::SetTriangle, &[p]),
            want,
            1e-4,
        ));
        let edge = gadget_revenue_table(GadgetKind::SetEdge { p }, None).unwrap()[0].value;
        checks.push(near(&format!("set edge at p = {p}"), edge, want, 1e-4));
    }
    for pat in [[1.0, 1.0, 1.0], [0.5, 0.5, 0.5]] {
        let v = row(GadgetKind::ExtendedTriangle, &pat);
        checks.push(near(
            &format!("extended triangle, selection {pat:?} (refined {v:.7})"),
            v,
            1.196435,
            1e-4,
        ));
    }
    checks
}

fn criterion3() -> Vec<Check> {
    let cert = |kind, params: CertificateParams| ratio_certificate(kind, &params).unwrap();
    let rho = |kind, p: f64, gamma: f64| {
        cert(
            kind,
            CertificateParams {
                p: Some(p),
                gamma: Some(gamma),
                ..Default::default()
            },
        )
        .min_value
    };
    let rho1 = |gamma: f64| {
        cert(
            CertificateKind::Rho1,
            CertificateParams {
                gamma: Some(gamma),
                ..Default::default()
            },
        )
        .min_value
    };
    let simple = RoundingSchedule::undirected_simple();
    let thm5 = cert(CertificateKind::Thm5Term, CertificateParams::default());
    let eq10 = |directed: bool| {
        cert(
            CertificateKind::Eq10,
            CertificateParams {
                directed: Some(directed),
                ..Default::default()
            },
        )
        .min_value
    };
    let tol = 1e-3;
    vec![
        near(
            "random IE optimum, lambda = 0",
            cert(CertificateKind::Eq3, CertificateParams::default()).min_value,
            0.686,
            tol,
        ),
        near(
            "random IE optimum, directed",
            cert(
                CertificateKind::Eq3,
                CertificateParams {
                    directed: Some(true),
                    ..Default::default()
                },
            )
            .min_value,
            0.343,
            tol,
        ),
        near(
            "rounding minimum, constant schedule",
            cert(
                CertificateKind::Thm4Terms,
                CertificateParams {
                    schedule: Some(simple),
                    ..Default::default()
                },
            )
            .min_value,
            0.8024,
            tol,
        ),
        near(
            "rounding minimum, piecewise schedule",
            cert(CertificateKind::Thm4Terms, CertificateParams::default()).min_value,
            0.9111,
            tol,
        ),
        near("directed rounding minimum", thm5.min_value, 0.55289, tol),
        near(
            "directed rounding argmin",
            thm5.argmin[0],
            (3.0 - 3f64.sqrt()) / 2.0,
            tol,
        ),
        at_least("generalized IE, undirected", eq10(false), 0.7032 - tol),
        at_least("generalized IE, directed", eq10(true), 0.3516 - tol),
        near("rho1(0)", rho1(0.0), 0.87856, tol),
        at_least("rho1(0.209)", rho1(0.209), 0.9035 - tol),
        at_least(
            "rho2(0.586, 0.209)",
            rho(CertificateKind::Rho2, 0.586, 0.209),
            0.9032 - tol,
        ),
        at_least(
            "rho(2/3, 0.722)",
            rho(CertificateKind::RhoDirected, 2.0 / 3.0, 0.722),
            0.9064 - tol,
        ),
        near(
            "rho(0.5, 0.653)",
            rho(CertificateKind::RhoDirected, 0.5, 0.653),
            0.8942,
            tol,
        ),
        near(
            "rho2(0.5, 0.176)",
            rho(CertificateKind::Rho2, 0.5, 0.176),
            0.899,
            tol,
        ),
    ]
}

fn criterion4() -> Vec<Check> {
    let mut dominance_failures = Vec::new();
    let mut rounding_hits = 0;
    let mut worst = f64::INFINITY;
    for seed in 0..50u64 {
        let directed = seed % 2 == 1;
        let n = 4 + (seed as usize % 7);
        let g = random_instance(1000 + seed, n, directed, 0.25 + 0.1 * (seed % 5) as f64);
        let params = SdpIeParams {
            seed,
            ..SdpIeParams::defaults(g.directedness())
        };
        let best = best_ie_exhaustive(&g, Some(params.p)).unwrap().best_value;
        let sol = solve_sdp(
            &build_sdp(&g, params.p).unwrap(),
            &SolverOptions {
                seed,
                ..Default::default()
            },
        );
        if sol.objective_value < best * (1.0 - 1e-3) - 1e-12 {
            dominance_failures.push(format!("seed {seed}: {} < {best}", sol.objective_value));
        }
        let (_, value) = best_rounding(&g, &sol, &params);
        let r = if best > 0.0 { value / best } else { 1.0 };
        worst = worst.min(r);
        if value >= 0.9 * best {
            rounding_hits += 1;
        }
    }
    vec![
        check(
            dominance_failures.is_empty(),
            format!("relaxation >= exhaustive best IE on 50 instances; violations: {dominance_failures:?}"),
        ),
        check(rounding_hits >= 48, format!("best-of-1000 rounding >= 0.9 x best IE on {rounding_hits}/50 (worst ratio {worst:.4})")),
    ]
}

fn criterion5() -> Vec<Check> {
    const TRIALS: u64 = 1_000_000;
    let mut checks = Vec::new();
    let mut record = |name: String, sim: SimulationReport, exact: f64| {
        let z = if sim.standard_error > 0.0 {
            (sim.mean_revenue - exact) / sim.standard_error
        } else {
            0.0
        };
        let ok = (sim.mean_revenue - exact).abs() <= 3.0 * sim.standard_error.max(1e-15);
        checks.push(check(
            ok,
            format!(
                "{name}: mean {:.6} vs {exact:.6} (z = {z:+.2})",
                sim.mean_revenue
            ),
        ));
    };
    for k in 0..20u64 {
        let directed = k % 2 == 0;
        let n = 5 + (k as usize % 6);
        let g = random_instance(2000 + k, n, directed, 0.45);
        let mut r = rng::seeded(3000 + k);
        let mut order: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut r);
        let prices: Vec<f64> = (0..n).map(|_| r.random_range(0.5..=1.0)).collect();
        let m = Strategy::Marketing(MarketingStrategy::new(order, prices).unwrap());
        let set: Vec<usize> = (0..n).filter(|_| r.random_bool(0.3)).collect();
        let ie = Strategy::Ie(IeStrategy::new(set, r.random_range(0.5..0.95)).unwrap());
        let gie =
            Strategy::Generalized(GeneralizedIeStrategy::new(PAPER_Q.to_vec(), None).unwrap());
        for (family, s) in [("marketing", m), ("ie", ie), ("generalized", gie)] {
            let sim = simulate(&g, &s, TRIALS, 4000 + k).unwrap();
            record(
                format!("instance {k} {family}"),
                sim,
                s.expected_revenue(&g).unwrap(),
            );
        }
        let (q, p) = (r.random_range(0.0..0.6), r.random_range(0.5..0.95));
        let sim = simulate_random_ie(&g, q, p, TRIALS, 5000 + k).unwrap();
        record(
            format!("instance {k} random_ie"),
            sim,
            random_ie_revenue(&g, q, p).unwrap(),
        );
    }
    checks
}

fn random_prices<R: Rng>(n: usize, r: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| match r.random_range(0..5) {
            0 => 0.5,
            1 => 1.0,
            _ => r.random_range(0.5..=1.0),
        })
        .collect()
}

fn criterion6() -> Vec<Check> {
    let mut und_violations = Vec::new();
    let mut dir_violations = Vec::new();
    let (mut und_worst, mut dir_worst) = (f64::INFINITY, f64::INFINITY);
    for k in 0..50u64 {
        let mut r = rng::seeded(6000 + k);
        let n = r.random_range(2..=12);
        let g = random_instance(7000 + k, n, false, r.random_range(0.2..0.9));
        let prices = random_prices(n, &mut r);
        let target = sorted_order_revenue(&g, &prices);
        let got = round_to_ie(&g, &prices, k).unwrap().expected_revenue;
        if target > 0.0 {
            und_worst = und_worst.min(got / target);
        }
        if got < 0.9111 * target - 1e-12 {
            und_violations.push(k);
        }
        let n = r.random_range(2..=8);
        let g = random_instance(8000 + k, n, true, r.random_range(0.2..0.9));
        let prices = random_prices(n, &mut r);
        let (_, target) = best_permutation(&g, &prices).unwrap();
        let got = round_to_ie(&g, &prices, k).unwrap().expected_revenue;
        if target > 0.0 {
            dir_worst = dir_worst.min(got / target);
        }
        if got < 0.55289 * target - 1e-12 {
            dir_violations.push(k);
        }
    }
    vec![
        check(
            und_violations.is_empty(),
            format!("undirected: worst ratio {und_worst:.4}, violations {und_violations:?}"),
        ),
        check(
            dir_violations.is_empty(),
            format!("directed: worst ratio {dir_worst:.4}, violations {dir_violations:?}"),
        ),
    ]
}

fn criterion7() -> Vec<Check> {
    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let opts = TableOptions {
        corpus,
        jobs: 4,
        seed: rng::DEFAULT_SEED,
        trials: 1000,
        oracle_limit: 20,
    };
    let table = run_table(&opts).unwrap();
    table
        .rows
        .iter()
        .filter(|r| r.family == "sdp_ie")
        .map(|r| {
            let floor = if r.instance.directed { 0.5011 } else { 0.8229 };
            at_least(&format!("{} sdp-ie/R*", r.instance.name), r.ratio, floor)
        })
        .collect()
}

/// Dense instances lie outside the corpus; printed for reference only.
fn dense_reference() {
    for (directed, n) in [(false, 12), (true, 10)] {
        for seed in 1..=3u64 {
            let mut params = GeneratorParams::unit(n, directed);
            params.density = 0.8;
            params.seed = seed;
            let g = generate(GeneratorKind::Random, &params).unwrap();
            let out = sdp_ie(
                &g,
                &SdpIeParams::defaults(g.directedness()),
                &SolverOptions::default(),
            )
            .unwrap();
            let best = best_ie_exhaustive(&g, None).unwrap().best_value;
            println!(
                "INFO dense {} n={n} seed={seed}: sdp-ie/R* = {:.4}, sdp-ie/best IE = {:.4}",
                if directed { "directed" } else { "undirected" },
                out.revenue / revenue_bounds(&g).upper,
                out.revenue / best
            );
        }
    }
}

fn main() {
    // Keep the default `cargo test` filter arguments from being misread.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let results = [
        report(
            1,
            "worked-example fixtures",
            Duration::from_secs(1),
            criterion1,
        ),
        report(2, "gadget table", Duration::from_secs(30), criterion2),
        report(3, "certificates", Duration::from_secs(600), criterion3),
        report(
            4,
            "relaxation and rounding vs exhaustive best IE",
            Duration::from_secs(600),
            criterion4,
        ),
        report(
            5,
            "simulation vs closed forms",
            Duration::from_secs(300),
            criterion5,
        ),
        report(
            6,
            "rounding guarantee",
            Duration::from_secs(600),
            criterion6,
        ),
        report(
            7,
            "end-to-end ratios on the corpus",
            Duration::from_secs(600),
            criterion7,
        ),
    ];
    dense_reference();
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
}
