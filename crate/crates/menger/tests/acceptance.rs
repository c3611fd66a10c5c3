//! Acceptance run: every criterion at its stated tolerance and time limit.
//!
//! Each criterion prints one `PASS`/`FAIL` line with its runtime. The test
//! fails if any criterion fails.

use std::time::{Duration, Instant};

use menger::cli::halving_instance;
use menger::gen::{self, gen_espace, gen_fixture, gen_pnspace, Fixture, FixtureShape, SpaceShape};
use menger_core::combinatorics::{
    build_relation_r, dense_witness_search, is_m_syndetic, verify_dense_witness_set,
};
use menger_core::contraction::{check_mk_b, contraction_index_set, displacement_profile};
use menger_core::espace::{AffineMap, EPoint, ProbSpace};
use menger_core::pm_space::{orbit, FinitePmSpace, ProbMetric, SelfMap};
use menger_core::pn_space::{
    continuity_at_theta_probe, iterate_to_null, n0_of_epsilon, pn_axiom_check, pn_c_contraction_check,
    uniform_continuity_probe, uniqueness_and_theta_check, FinitePnSpace, Mode, Vector, LAMBDA_GRID,
};
use menger_core::solver::{
    cauchy_subsequence_check, cycle_collapse_check, default_max_iter, distance_to_zero, picard_solve,
    DEFAULT_TOLERANCE,
};
use menger_core::{Ddf, Periodic, Ratio, TNorm, TableMap};
use rand::seq::SliceRandom;
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// Random step function: breakpoints on the 1/8 grid in `(0, 1]`, values on
/// the 1/64 grid. All algebra on these is exact in floating point.
fn random_ddf(rng: &mut impl Rng) -> Ddf {
    let pieces = rng.random_range(1..=5);
    let mut bs: Vec<u32> = (1..=8).collect();
    bs.shuffle(rng);
    bs.truncate(pieces);
    bs.sort_unstable();
    let mut vs: Vec<u32> = (0..pieces).map(|_| rng.random_range(0..=64)).collect();
    vs.sort_unstable();
    if rng.random_bool(0.5) {
        *vs.last_mut().unwrap() = 64;
    }
    Ddf::new(
        bs.into_iter().map(|b| b as f64 / 8.0).collect(),
        vs.into_iter().map(|v| v as f64 / 64.0).collect(),
    )
    .unwrap()
}

fn same_up_to(f: &Ddf, g: &Ddf, tol: f64) -> bool {
    f.breakpoints() == g.breakpoints()
        && f.values().iter().zip(g.values()).all(|(a, b)| (a - b).abs() <= tol)
}

const TNORMS: [TNorm; 3] = [TNorm::W, TNorm::Prod, TNorm::M];

const RES: f64 = 1e-3;
const GRID: usize = 2100;

/// `sup T(F(u), G(x − u))` at `x = j·RES` over `u = (i + ½)·RES`, from the
/// half-offset samples of `F` and `G`.
fn brute_force(f_half: &[f64], g_half: &[f64], t: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    (0..GRID)
        .map(|j| (0..j).map(|i| t(f_half[i], g_half[j - i - 1])).fold(0.0, f64::max))
        .collect()
}

fn criterion_1() -> Outcome {
    let mut algebra_failures = 0;
    let mut grid_failures = 0;
    let mut grid_points = 0usize;
    for seed in 0..500u64 {
        let mut rng = gen::rng(seed);
        let t = TNORMS[seed as usize % 3];
        let (f, g, h) = (random_ddf(&mut rng), random_ddf(&mut rng), random_ddf(&mut rng));
        let fg = t.convolve(&f, &g);
        let commutes = fg == t.convolve(&g, &f);
        let assoc = same_up_to(&t.convolve(&fg, &h), &t.convolve(&f, &t.convolve(&g, &h)), 1e-12);
        let identity = t.convolve(&f, &Ddf::epsilon0()) == f;
        if !(commutes && assoc && identity) {
            algebra_failures += 1;
        }
        // u runs over the half-offset grid so that u > b and x − u > c both
        // hold exactly when x > b + c on the integer grid
        let f_half: Vec<f64> = (0..GRID).map(|i| f.value((i as f64 + 0.5) * RES)).collect();
        let g_half: Vec<f64> = (0..GRID).map(|i| g.value((i as f64 + 0.5) * RES)).collect();
        let brute = match t {
            TNorm::W => brute_force(&f_half, &g_half, |a, b| (a + b - 1.0).max(0.0)),
            TNorm::Prod => brute_force(&f_half, &g_half, |a, b| a * b),
            TNorm::M => brute_force(&f_half, &g_half, f64::min),
        };
        for (j, b) in brute.iter().enumerate() {
            grid_points += 1;
            if (fg.value(j as f64 / 1000.0) - b).abs() > 1e-12 {
                grid_failures += 1;
            }
        }
    }
    outcome(
        algebra_failures == 0 && grid_failures == 0,
        format!("algebra failures {algebra_failures}/500, grid mismatches {grid_failures}/{grid_points}"),
    )
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_triangle = f64::NEG_INFINITY;
    for seed in 0..500u64 {
        let mut rng = gen::rng(10_000 + seed);
        let (f, g, h) = (random_ddf(&mut rng), random_ddf(&mut rng), random_ddf(&mut rng));
        if f.sibley(&f) != 0.0 || f.sibley(&g) != g.sibley(&f) {
            failures.push(format!("seed {seed}: symmetry or identity"));
        }
        let excess = f.sibley(&h) - f.sibley(&g) - g.sibley(&h);
        worst_triangle = worst_triangle.max(excess);
        if excess > 2e-9 {
            failures.push(format!("seed {seed}: triangle excess {excess:e}"));
        }
    }
    for i in 1..=9 {
        let a = i as f64 / 10.0;
        let d = Ddf::epsilon0().sibley(&Ddf::step(a).unwrap());
        if (d - a.min(1.0)).abs() > 1e-9 {
            failures.push(format!("step@{a}: {d}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!("worst triangle excess {worst_triangle:e}, failures {failures:?}"),
    )
}

fn criterion_3() -> Outcome {
    let mut failing = Vec::new();
    let mut violations = 0;
    for seed in 0..100u64 {
        let mut rng = gen::rng(20_000 + seed);
        let shape = SpaceShape {
            points: rng.random_range(2..=8),
            outcomes: rng.random_range(1..=6),
            dim: rng.random_range(1..=3),
        };
        let space = gen_espace(seed, shape).unwrap();
        let report = space.to_pm_space().unwrap().space.check_menger(TNorm::M);
        if !report.passed() {
            failing.push(seed);
            violations += report.violations.len();
        }
    }
    outcome(
        failing.is_empty(),
        format!(
            "{} of 100 instances violate the M triangle inequality ({violations} violating triples)",
            failing.len()
        ),
    )
}

fn fixture(seed: u64, m: usize, points: usize, offset: bool) -> Fixture {
    gen_fixture(
        seed,
        FixtureShape {
            m,
            k: 0.5,
            points,
            outcomes: 3,
            offset,
        },
    )
    .unwrap_or_else(|e| panic!("fixture seed {seed} m {m}: {e}"))
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let mut sets = 0;
    for i in 0..50u64 {
        let m = 1 + (i as usize % 3);
        let fx = fixture(30_000 + i, m, 4, false);
        let pts = fx.space.points();
        for (a, p) in pts.iter().enumerate() {
            let (_, set) = displacement_profile(&fx.space, &fx.map, m, fx.k, p, 60).unwrap();
            sets += 1;
            if !is_m_syndetic(&set, m).unwrap() {
                failures.push(format!("fixture {i} displacement of {a}"));
            }
            for (b, q) in pts.iter().enumerate().skip(a + 1) {
                let set = contraction_index_set(&fx.space, &fx.map, m, fx.k, p, q, 60).unwrap();
                sets += 1;
                if !is_m_syndetic(&set, m).unwrap() {
                    failures.push(format!("fixture {i} pair ({a},{b})"));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{sets} index sets, failures {failures:?}"),
    )
}

/// Cycle lengths of all periodic points of a map on `0..n`.
fn periodic_points(image: &[usize]) -> Vec<(usize, usize)> {
    let n = image.len();
    let mut out = Vec::new();
    for p in 0..n {
        let mut x = image[p];
        for len in 1..=n {
            if x == p {
                out.push((p, len));
                break;
            }
            x = image[x];
        }
    }
    out
}

fn criterion_5() -> Outcome {
    const MAPS_PER_SEED: usize = 40;
    let (mut tried, mut certified, mut periodic, mut longer) = (0, 0, 0, 0);
    for seed in 0..200u64 {
        let mut rng = gen::rng(40_000 + seed);
        let shape = SpaceShape {
            points: rng.random_range(2..=7),
            outcomes: rng.random_range(1..=4),
            dim: rng.random_range(1..=2),
        };
        let space: FinitePmSpace = gen_espace(seed, shape).unwrap().to_pm_space().unwrap().space;
        let n = space.len();
        let pts: Vec<usize> = (0..n).collect();
        for _ in 0..MAPS_PER_SEED {
            // small images make the scaling condition reachable
            let range = rng.random_range(1..=n);
            let image: Vec<usize> = (0..n).map(|_| rng.random_range(0..range)).collect();
            let map = TableMap::new(image.clone()).unwrap();
            let m = rng.random_range(1..=3);
            tried += 1;
            if !check_mk_b(&space, &pts, &map, m, 0.5).unwrap().passed() {
                continue;
            }
            certified += 1;
            for (p, len) in periodic_points(&image) {
                periodic += 1;
                match cycle_collapse_check(&space, &map, m, 0.5, &p, len) {
                    Ok(true) => {}
                    Ok(false) | Err(_) => longer += 1,
                }
            }
        }
    }
    outcome(
        longer == 0 && certified > 0,
        format!(
            "{tried} maps, {certified} pass the scaling check, {periodic} periodic points, {longer} with cycle length > 1"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let mut min_margin = f64::INFINITY;
    for i in 0..20u64 {
        let m = 1 + (i as usize % 3);
        let fx = fixture(60_000 + i, m, 3, false);
        let p = &fx.space.points()[0];
        let (profile, _) = displacement_profile(&fx.space, &fx.map, m, fx.k, p, 400).unwrap();
        let rel = build_relation_r(&fx.space, &fx.map, p, &profile, fx.k, 400).unwrap();
        match dense_witness_search(&rel, m) {
            Ok(found) => {
                let v = verify_dense_witness_set(&rel, &found, m);
                min_margin = min_margin.min(v.density - v.needed);
                if !v.passed() {
                    failures.push(format!("fixture {i}: {v:?}"));
                }
            }
            Err(e) => failures.push(format!("fixture {i}: {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!("smallest density margin {min_margin:.4}, failures {failures:?}"),
    )
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_verified = 0.0_f64;
    let mut worst_spread = 0.0_f64;
    for i in 0..50u64 {
        let m = 1 + (i as usize % 3);
        let fx = fixture(70_000 + i, m, 4, true);
        let mut limits: Vec<Vector> = Vec::new();
        for (s, p) in fx.space.points().iter().enumerate() {
            let trace = picard_solve(&fx.space, &fx.map, p, DEFAULT_TOLERANCE, default_max_iter(None)).unwrap();
            match (trace.fixed_point(), trace.verified_dist) {
                (Some(r), Some(v)) if v <= 1e-6 => {
                    worst_verified = worst_verified.max(v);
                    limits.push(r.clone());
                }
                _ => failures.push(format!("fixture {i} start {s}: {:?}", trace.outcome)),
            }
        }
        for a in &limits {
            for b in &limits {
                let d = distance_to_zero(&fx.space.ddf(a, b));
                worst_spread = worst_spread.max(d);
                if d > 2e-6 {
                    failures.push(format!("fixture {i}: limits {d:e} apart"));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("worst re-verification {worst_verified:e}, worst limit spread {worst_spread:e}, failures {failures:?}"),
    )
}

/// Displacement profile, relation, dense witness set and Cauchy check on the
/// orbit of `p`.
fn pipeline<S: ProbMetric>(
    space: &S,
    f: &impl SelfMap<S::Point>,
    p: &S::Point,
    m: usize,
    k: f64,
) -> Result<(f64, bool), String> {
    const WINDOW: usize = 60;
    let (profile, _) = displacement_profile(space, f, m, k, p, WINDOW).map_err(|e| e.to_string())?;
    let rel = build_relation_r(space, f, p, &profile, k, WINDOW).map_err(|e| e.to_string())?;
    let found = dense_witness_search(&rel, m).map_err(|e| e.to_string())?;
    if !verify_dense_witness_set(&rel, &found, m).passed() {
        return Err("witness set rejected".into());
    }
    let c = cauchy_subsequence_check(space, f, p, &found.set, 10, 1e-2).map_err(|e| e.to_string())?;
    Ok((c.max_dist, c.passed && c.profile_nonincreasing()))
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    let (space, f) = halving_instance();
    let mut record = |name: String, r: Result<(f64, bool), String>| match r {
        Ok((d, ok)) => {
            worst = worst.max(d);
            if !ok {
                failures.push(format!("{name}: max {d:e}"));
            }
        }
        Err(e) => failures.push(format!("{name}: {e}")),
    };
    record("halving".into(), pipeline(&space, &f, &space.points()[0], 1, 0.5));
    for i in 0..10u64 {
        let m = 1 + (i as usize % 3);
        let fx = fixture(80_000 + i, m, 3, false);
        record(format!("fixture {i}"), pipeline(&fx.space, &fx.map, &fx.space.points()[0], m, fx.k));
    }
    outcome(
        failures.is_empty(),
        format!("worst tail spread {worst:e}, failures {failures:?}"),
    )
}

fn direct_n0(eps: f64, k: f64) -> usize {
    (1..).find(|&n| k.powi(n as i32) * (1.0 + eps) <= eps).unwrap()
}

/// `c·Q` for the largest `c = k·2⁻ʲ` that passes the strict threshold check
/// on the samples and their orbits.
fn strict_linear_map(space: &FinitePnSpace, q: &AffineMap, k: f64, samples: &[Vector], len: usize) -> Option<AffineMap> {
    for j in 0..40 {
        let c = k / 2f64.powi(j);
        let rows: Vec<Vec<f64>> = q.matrix_rows().map(|r| r.iter().map(|x| x * c).collect()).collect();
        let f = AffineMap::linear(rows).unwrap();
        let cloud: Vec<Vector> = samples.iter().flat_map(|p| orbit(&f, p, len)).collect();
        if pn_c_contraction_check(space, &f, k, &cloud).unwrap().passed(Mode::Strict) {
            return Some(f);
        }
    }
    None
}

fn criterion_9() -> Outcome {
    const EPS: [f64; 3] = [0.1, 0.25, 0.5];
    const HORIZON: usize = 20;
    let mut failures = Vec::new();
    let (mut axiom_checks, mut null_runs, mut fixed, mut probes) = (0, 0, 0, 0);
    let shape = SpaceShape {
        points: 50,
        outcomes: 4,
        dim: 2,
    };
    for seed in 0..4u64 {
        let inst = gen_pnspace(90_000 + seed, shape, None).unwrap();
        let axioms = pn_axiom_check(&inst.space, &inst.vectors, &LAMBDA_GRID).unwrap();
        axiom_checks += axioms.checks;
        if !axioms.passed() {
            failures.push(format!("seed {seed}: {} axiom violations", axioms.violations.len()));
        }
    }
    for &k in &[0.1, 0.5, 0.9] {
        for &eps in &EPS {
            let n0 = n0_of_epsilon(eps, k).unwrap();
            if n0 != direct_n0(eps, k) {
                failures.push(format!("n0({eps}, {k}) = {n0}, direct {}", direct_n0(eps, k)));
            }
        }
        let len = direct_n0(0.1, k) + HORIZON;
        for seed in 0..3u64 {
            let inst = gen_pnspace(91_000 + seed, SpaceShape { points: 12, ..shape }, Some(k)).unwrap();
            let q = inst.map.as_ref().unwrap();
            let Some(f) = strict_linear_map(&inst.space, q, k, &inst.vectors, len) else {
                failures.push(format!("k {k} seed {seed}: no strict-mode map"));
                continue;
            };
            let mut samples = inst.vectors.clone();
            samples.push(inst.space.theta());
            for p in &samples {
                for &eps in &EPS {
                    let r = iterate_to_null(&inst.space, &f, p, k, eps, HORIZON).unwrap();
                    null_runs += 1;
                    if !r.passed() {
                        failures.push(format!("k {k} seed {seed} eps {eps}: failures at {:?}", r.failures));
                    }
                }
            }
            let fx = uniqueness_and_theta_check(&inst.space, &f, k, &samples).unwrap();
            fixed += fx.fixed.len();
            if !fx.violations.is_empty() {
                failures.push(format!("k {k} seed {seed}: non-zero fixed points {:?}", fx.violations));
            }
            let uniform = uniform_continuity_probe(&inst.space, &f, k, &EPS, &samples).unwrap();
            let at_theta = continuity_at_theta_probe(&inst.space, &f, k, &EPS, &samples).unwrap();
            probes += uniform.inside + at_theta.inside;
            if !uniform.passed() || !at_theta.passed() {
                failures.push(format!(
                    "k {k} seed {seed}: continuity violations {} uniform, {} at theta",
                    uniform.violations.len(),
                    at_theta.violations.len()
                ));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{axiom_checks} axiom checks, {null_runs} null iterations, {fixed} fixed points, {probes} probe pairs, failures {failures:?}"
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut failures = Vec::new();
    if n0_of_epsilon(0.5, 0.5).unwrap() != 2 {
        failures.push("n0(0.5, 0.5) != 2".to_string());
    }
    let line = FinitePnSpace::with_defaults(ProbSpace::uniform(2).unwrap(), 1).unwrap();
    let halving = AffineMap::scale(0.5, vec![0.0]).unwrap();
    let p = EPoint::new(vec![vec![1.0], vec![3.0]]);
    let half = iterate_to_null(&line, &halving, &p, 0.5, 0.5, 10).unwrap();
    if !half.passed() || half.first_achieving.is_none_or(|n| n > 2) {
        failures.push(format!(
            "eps 0.5: failures {:?}, first achieving {:?} (expected <= 2)",
            half.failures, half.first_achieving
        ));
    }
    let tenth = iterate_to_null(&line, &halving, &p, 0.5, 0.1, 10).unwrap();
    if tenth.n0 != 4 || !tenth.passed() {
        failures.push(format!("eps 0.1: n0 {}, failures {:?}", tenth.n0, tenth.failures));
    }
    let threes = Periodic::new(vec![], 3, vec![0], None).unwrap();
    if threes.density() != Ratio::new(1, 3) {
        failures.push(format!("d*(3N) = {}", threes.density()));
    }
    let d = Ddf::step(0.2).unwrap().sibley(&Ddf::step(0.5).unwrap());
    if (d - 0.3).abs() > 1e-9 {
        failures.push(format!("Sibley(step@0.2, step@0.5) = {d}"));
    }
    outcome(failures.is_empty(), format!("failures {failures:?}"))
}

/// Name, check and time limit in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("1 triangle function algebra", criterion_1, 10),
        ("2 Sibley metric", criterion_2, 10),
        ("3 Menger axioms on E-spaces", criterion_3, 30),
        ("4 syndetic index sets", criterion_4, 60),
        ("5 periodic points collapse", criterion_5, 60),
        ("6 dense witness sets", criterion_6, 120),
        ("7 Picard convergence and uniqueness", criterion_7, 60),
        ("8 Cauchy subsequence pipeline", criterion_8, 60),
        ("9 normed-space suite", criterion_9, 60),
        ("10 worked values", criterion_10, 1),
    ];
    let mut failed = Vec::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let passed = out.passed && in_time;
        println!(
            "{} criterion {name}: {:.3} s (limit {limit} s){}; {}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over time" },
            out.detail
        );
        if !passed {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
