//! Acceptance suite. Every test prints one `[PASS]`/`[FAIL]` line; run with
//! `cargo test -p icso-enhance --test acceptance -- --nocapture`.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::{low_contrast_image, median, random_image, rng, verdict};
use icso_enhance::histogram::{apply_lut, compute_histogram, he_lut, normalize};
use icso_enhance::metrics::{entropy, mean_intensity, mse, psnr, psnr_from_mse, variance_intensity};
use icso_enhance::objective::distance;
use icso_enhance::pgm::{encode_pgm, parse_pgm, PgmFormat};
use icso_enhance::pipeline::histogram_swarm;
use icso_enhance::swarm::{role_counts, self_learning_coefficient, Role};
use icso_enhance::{
    enhance, minimize, EnhancementParams, GrayImage, Histogram, ObjectiveSpec, SwarmConfig,
    SwarmState, Variant, LEVELS,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn random_histogram(rng: &mut ChaCha8Rng) -> Histogram {
    let counts: Vec<f64> = (0..LEVELS)
        .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..200.0) })
        .collect();
    Histogram::new(&counts).unwrap()
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

#[test]
fn criterion_01_he_equivalence() {
    let start = Instant::now();
    let mut r = rng(101);
    let mut mismatches = 0;
    for _ in 0..20 {
        let img = random_image(&mut r, 64, 64);
        let pdf = normalize(&compute_histogram(&img).unwrap()).unwrap();
        let classical = apply_lut(&img, &he_lut(&pdf));
        let res = enhance(&img, &EnhancementParams::closed_form(0.0, 0.0)).unwrap();
        if res.output_image != classical {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = mismatches == 0 && within(elapsed, 1.0);
    assert!(verdict(
        "criterion 1",
        "zero weights reproduce classical equalization bitwise",
        ok,
        format!("{mismatches}/20 mismatches, {:.3}s", elapsed.as_secs_f64())
    ));
}

#[test]
fn criterion_02_closed_form_reduction() {
    let start = Instant::now();
    let mut r = rng(102);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let h = random_histogram(&mut r);
        let lambda = r.random_range(0.0..20.0);
        let spec = ObjectiveSpec::new(h, lambda, 0.0).unwrap();
        let tri = spec.closed_form_tricriteria();
        let bi = spec.closed_form_bicriteria();
        for (a, b) in tri.iter().zip(&bi) {
            worst = worst.max((a - b).abs());
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-10 && within(elapsed, 1.0);
    assert!(verdict(
        "criterion 2",
        "smoothness-free solve equals the two-term closed form",
        ok,
        format!("max diff {worst:.3e}, {:.3}s", elapsed.as_secs_f64())
    ));
}

#[test]
fn criterion_03_oracle_residual() {
    let start = Instant::now();
    let img = low_contrast_image(103);
    let h = compute_histogram(&img).unwrap();
    let mut worst_ratio = 0.0f64;
    for &lambda in &[0.0, 1.0, 5.0, 20.0] {
        for &gamma in &[0.0, 1000.0, 50000.0, 1e6] {
            let spec = ObjectiveSpec::new(h.clone(), lambda, gamma).unwrap();
            let sol = spec.closed_form_tricriteria();
            let (lower, diag, upper) = spec.system_matrix();
            let b = spec.rhs();
            let n = sol.len();
            let mut res = 0.0f64;
            for i in 0..n {
                let mut ax = diag[i] * sol[i];
                if i > 0 {
                    ax += lower[i - 1] * sol[i - 1];
                }
                if i + 1 < n {
                    ax += upper[i] * sol[i + 1];
                }
                res = res.max((ax - b[i]).abs());
            }
            let b_inf = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            worst_ratio = worst_ratio.max(res / b_inf);
        }
    }
    let elapsed = start.elapsed();
    let ok = worst_ratio <= 1e-8 && within(elapsed, 1.0);
    assert!(verdict(
        "criterion 3",
        "tridiagonal solve residual over the weight grid",
        ok,
        format!("max |Ax-b|/|b| {worst_ratio:.3e}, {:.3}s", elapsed.as_secs_f64())
    ));
}

#[test]
fn criterion_04_gradient_check() {
    let start = Instant::now();
    let mut r = rng(104);
    let step = 1e-4;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let h = random_histogram(&mut r);
        let lambda = r.random_range(0.0..20.0);
        let gamma = [0.0, 1000.0, 50000.0][r.random_range(0..3)];
        let spec = ObjectiveSpec::new(h, lambda, gamma).unwrap();
        let x: Vec<f64> = (0..LEVELS).map(|_| r.random_range(0.0..200.0)).collect();
        let grad = spec.gradient(&x).unwrap();
        let floor = 1e-3 * grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        let mut probe = x.clone();
        for k in 0..LEVELS {
            probe[k] = x[k] + step;
            let plus = spec.tri_cost(&probe).unwrap();
            probe[k] = x[k] - step;
            let minus = spec.tri_cost(&probe).unwrap();
            probe[k] = x[k];
            let fd = (plus - minus) / (2.0 * step);
            worst = worst.max((fd - grad[k]).abs() / grad[k].abs().max(floor));
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-5 && within(elapsed, 5.0);
    assert!(verdict(
        "criterion 4",
        "analytic gradient matches central differences",
        ok,
        format!("max relative error {worst:.3e}, {:.3}s", elapsed.as_secs_f64())
    ));
}

/// Median relative gap over 10 seeds for each of 5 synthetic images.
fn swarm_gaps(anchor_init: bool) -> (Vec<f64>, Duration) {
    let start = Instant::now();
    let jobs: Vec<(u64, u64)> = (0..5).flat_map(|i| (0..10).map(move |s| (i, s))).collect();
    let gaps: Vec<(u64, f64)> = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let img = low_contrast_image(500 + i);
            let mut params = EnhancementParams::swarm(5.0, 50000.0, Variant::Icso).with_seed(seed);
            params.anchor_init = anchor_init;
            (i, enhance(&img, &params).unwrap().relative_gap())
        })
        .collect();
    let medians = (0..5)
        .map(|i| median(gaps.iter().filter(|g| g.0 == i).map(|g| g.1).collect()))
        .collect();
    (medians, start.elapsed())
}

#[test]
fn criterion_05a_swarm_gap_with_anchors() {
    let (medians, elapsed) = swarm_gaps(true);
    let worst = medians.iter().cloned().fold(0.0f64, f64::max);
    let ok = worst <= 0.05 && within(elapsed, 60.0);
    assert!(verdict(
        "criterion 5 (anchored start)",
        "improved swarm median gap to the oracle within 5%",
        ok,
        format!("per-image medians {medians:.4?}, {:.1}s", elapsed.as_secs_f64())
    ));
}

#[test]
fn criterion_05b_swarm_gap_random_start() {
    let (medians, elapsed) = swarm_gaps(false);
    let worst = medians.iter().cloned().fold(0.0f64, f64::max);
    let ok = worst <= 0.20 && within(elapsed, 60.0);
    assert!(verdict(
        "criterion 5 (random start)",
        "improved swarm median gap to the oracle within 20%",
        ok,
        format!("per-image medians {medians:.4?}, {:.1}s", elapsed.as_secs_f64())
    ));
}

#[test]
fn criterion_06_improved_beats_original() {
    let start = Instant::now();
    let img = low_contrast_image(600);
    let spec = ObjectiveSpec::new(compute_histogram(&img).unwrap(), 5.0, 50000.0).unwrap();
    let base = SwarmConfig::new(20, Vec::new(), Vec::new());
    let run = |variant: Variant, seed: u64| {
        let mut cfg = histogram_swarm(&base, img.len());
        cfg.variant = variant;
        cfg.seed = seed;
        minimize(|h: &[f64]| spec.tri_cost(h).unwrap(), &cfg).unwrap().fitness
    };
    let pairs: Vec<(f64, f64)> = (0..20u64)
        .into_par_iter()
        .map(|seed| (run(Variant::Icso, seed), run(Variant::Cso, seed)))
        .collect();
    let icso = median(pairs.iter().map(|p| p.0).collect());
    let cso = median(pairs.iter().map(|p| p.1).collect());
    let elapsed = start.elapsed();
    let ok = icso <= cso && within(elapsed, 120.0);
    assert!(verdict(
        "criterion 6",
        "improved swarm median final cost not above the original swarm",
        ok,
        format!("ICSO {icso:.6e} vs CSO {cso:.6e}, {:.1}s", elapsed.as_secs_f64())
    ));
}

#[test]
fn criterion_07_schedule_endpoints() {
    let cfg = SwarmConfig::uniform_box(20, 4, -1.0, 1.0);
    let s0 = self_learning_coefficient(0, &cfg);
    let s_tenth = self_learning_coefficient(cfg.max_iters / 10, &cfg);
    let ok = s0 == 0.9 && (s_tenth - 0.6).abs() <= 1e-12;
    assert!(verdict(
        "criterion 7",
        "self-learning schedule endpoints",
        ok,
        format!("s(0) = {s0}, s(T/10) = {s_tenth}")
    ));
}

fn rastrigin(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| {
            let y = v - 0.3;
            y * y - 10.0 * (2.0 * std::f64::consts::PI * y).cos() + 10.0
        })
        .sum()
}

/// Runs 200 generations and returns the history and final state, checking
/// bounds and role counts along the way.
fn invariant_run(cfg: &SwarmConfig) -> Result<(Vec<f64>, SwarmState), String> {
    let mut state = SwarmState::initialize(cfg, &rastrigin).map_err(|e| e.to_string())?;
    let (rn, hn, cn, mn) = role_counts(cfg.population);
    let mut history = Vec::new();
    for _ in 0..200 {
        state.step(cfg, &rastrigin).map_err(|e| e.to_string())?;
        history.push(state.global_best_fitness);
        for c in &state.chickens {
            let inside = c
                .position
                .iter()
                .zip(&cfg.lower_bound)
                .zip(&cfg.upper_bound)
                .all(|((&v, &lo), &hi)| lo <= v && v <= hi);
            if !inside {
                return Err(format!("position out of bounds at generation {}", state.generation));
            }
        }
        let count = |role: Role| state.chickens.iter().filter(|c| c.role == role).count();
        let mothers = state.chickens.iter().filter(|c| c.is_mother).count();
        let counts = (count(Role::Rooster), count(Role::Hen), count(Role::Chick), mothers);
        if counts != (rn, hn, cn, mn)
            || state.roosters().len() != rn
            || state.hens().len() != hn
            || state.chicks().len() != cn
        {
            return Err(format!("role counts {counts:?}, expected {:?}", (rn, hn, cn, mn)));
        }
    }
    Ok((history, state))
}

#[test]
fn criterion_08_optimizer_invariants() {
    let start = Instant::now();
    let mut r = rng(108);
    let mut failures = Vec::new();
    for k in 0..10 {
        let pop = r.random_range(8..=40);
        let dim = r.random_range(1..=20);
        let lo = r.random_range(-10.0..0.0);
        let hi = lo + r.random_range(0.5..20.0);
        let mut cfg = SwarmConfig::uniform_box(pop, dim, lo, hi);
        cfg.seed = r.random();
        cfg.max_iters = 200;
        cfg.reorg_period = r.random_range(1..=15);
        cfg.variant = if r.random_bool(0.5) { Variant::Icso } else { Variant::Cso };
        cfg.per_dimension_rand = r.random_bool(0.5);
        cfg.per_dimension_randn = r.random_bool(0.5);
        let first = invariant_run(&cfg);
        let second = invariant_run(&cfg);
        match (first, second) {
            (Ok((h1, s1)), Ok((h2, s2))) => {
                if h1.windows(2).any(|w| w[1] > w[0]) {
                    failures.push(format!("config {k}: global best increased"));
                }
                let same = h1 == h2
                    && s1.global_best_position == s2.global_best_position
                    && s1.chickens == s2.chickens;
                if !same {
                    failures.push(format!("config {k}: seeded runs differ"));
                }
            }
            (Err(e), _) | (_, Err(e)) => failures.push(format!("config {k}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && within(elapsed, 30.0);
    let detail = if failures.is_empty() {
        format!("10 configs x 200 steps, {:.2}s", elapsed.as_secs_f64())
    } else {
        failures.join("; ")
    };
    assert!(verdict("criterion 8", "swarm invariants", ok, detail));
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

#[test]
fn criterion_09_metrics_oracles() {
    let start = Instant::now();
    let mut r = rng(109);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let w = r.random_range(1..=64);
        let h = r.random_range(1..=64);
        let a = random_image(&mut r, w, h);
        let b = random_image(&mut r, w, h);
        let n = (w * h) as f64;

        let naive_mse = a
            .pixels()
            .iter()
            .zip(b.pixels())
            .map(|(&x, &y)| (x as f64 - y as f64).powi(2))
            .sum::<f64>()
            / n;
        let naive_psnr = 10.0 * (255.0f64 * 255.0 / naive_mse).log10();
        let mut tally = [0usize; 256];
        for &p in a.pixels() {
            tally[p as usize] += 1;
        }
        let naive_entropy: f64 = tally
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln() / std::f64::consts::LN_2
            })
            .sum();
        let naive_mean = a.pixels().iter().map(|&p| p as f64).sum::<f64>() / n;
        let naive_var =
            a.pixels().iter().map(|&p| (p as f64 - naive_mean).powi(2)).sum::<f64>() / n;

        worst = worst
            .max(rel_err(mse(&a, &b).unwrap(), naive_mse))
            .max(rel_err(entropy(&a).unwrap(), naive_entropy))
            .max(rel_err(mean_intensity(&a).unwrap(), naive_mean))
            .max(rel_err(variance_intensity(&a).unwrap(), naive_var));
        if naive_mse > 0.0 {
            worst = worst.max(rel_err(psnr(&a, &b).unwrap(), naive_psnr));
        }
    }

    let mut identities = Vec::new();
    let black = GrayImage::filled(8, 8, 0);
    let white = GrayImage::filled(8, 8, 255);
    if mse(&black, &white).unwrap() != 65025.0 || psnr_from_mse(65025.0).abs() > 1e-12 {
        identities.push("psnr at mse 65025");
    }
    let ramp = GrayImage::from_fn(16, 16, |x, y| (y * 16 + x) as u8);
    if (entropy(&ramp).unwrap() - 8.0).abs() > 1e-12 {
        identities.push("uniform entropy");
    }
    let img = random_image(&mut r, 33, 17);
    let n = img.len() as f64;
    let mean_sq = img.pixels().iter().map(|&p| (p as f64).powi(2)).sum::<f64>() / n;
    let m = mean_intensity(&img).unwrap();
    if rel_err(variance_intensity(&img).unwrap(), mean_sq - m * m) > 1e-6 {
        identities.push("variance identity");
    }
    if !psnr(&img, &img).unwrap().is_infinite() {
        identities.push("psnr of identical images");
    }

    let elapsed = start.elapsed();
    let ok = worst <= 1e-6 && identities.is_empty() && within(elapsed, 5.0);
    assert!(verdict(
        "criterion 9",
        "metrics match naive recomputation and closed-form identities",
        ok,
        format!(
            "max relative error {worst:.3e}, failed identities {identities:?}, {:.3}s",
            elapsed.as_secs_f64()
        )
    ));
}

#[test]
fn criterion_10_trade_off_monotonicity() {
    let start = Instant::now();
    let mut r = rng(110);
    let lambdas = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
    let mut violations = 0;
    for _ in 0..20 {
        let h = random_histogram(&mut r);
        let u = Histogram::uniform(h.total());
        let points: Vec<(f64, f64)> = lambdas
            .iter()
            .map(|&l| {
                let sol = ObjectiveSpec::new(h.clone(), l, 0.0)
                    .unwrap()
                    .closed_form_tricriteria();
                (distance(&sol, u.counts()), distance(&sol, h.counts()))
            })
            .collect();
        for w in points.windows(2) {
            if w[1].0 > w[0].0 || w[1].1 < w[0].1 {
                violations += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = violations == 0 && within(elapsed, 1.0);
    assert!(verdict(
        "criterion 10",
        "distance to uniform shrinks and distance to input grows with lambda",
        ok,
        format!("{violations} violations, {:.3}s", elapsed.as_secs_f64())
    ));
}

fn strip_wall_time(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("wall_time_s");
            map.values_mut().for_each(strip_wall_time);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_wall_time),
        _ => {}
    }
}

fn exit_code(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_icso-enhance"))
        .args(args)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

#[test]
fn criterion_11_cli_round_trip_and_determinism() {
    let start = Instant::now();
    let mut r = rng(111);
    let mut problems = Vec::new();

    let mut round_trip_failures = 0;
    for k in 0..100 {
        let w = r.random_range(1..=48);
        let h = r.random_range(1..=48);
        let img = random_image(&mut r, w, h);
        let format = if k % 2 == 0 { PgmFormat::Ascii } else { PgmFormat::Binary };
        let bytes = encode_pgm(&img, format);
        let back = parse_pgm(&bytes).unwrap();
        if back != img || encode_pgm(&back, format) != bytes {
            round_trip_failures += 1;
        }
    }
    if round_trip_failures > 0 {
        problems.push(format!("{round_trip_failures} PGM round-trip failures"));
    }

    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    std::fs::write(path("in.pgm"), encode_pgm(&low_contrast_image(111), PgmFormat::Binary))
        .unwrap();
    let enhance_args = |tag: &str| {
        vec![
            "enhance".to_owned(),
            "--input".into(),
            path("in.pgm"),
            "--output".into(),
            path(&format!("out{tag}.pgm")),
            "--report".into(),
            path(&format!("report{tag}.json")),
            "--iters".into(),
            "200".into(),
            "--seed".into(),
            "42".into(),
            "--repeats".into(),
            "2".into(),
        ]
    };
    let codes: Vec<i32> = ["a", "b"]
        .iter()
        .map(|tag| exit_code(&enhance_args(tag).iter().map(String::as_str).collect::<Vec<_>>()))
        .collect();
    if codes != [0, 0] {
        problems.push(format!("enhance exit codes {codes:?}"));
    } else {
        let out_a = std::fs::read(path("outa.pgm")).unwrap();
        let out_b = std::fs::read(path("outb.pgm")).unwrap();
        if out_a != out_b {
            problems.push("enhanced images differ".into());
        }
        let load = |name: &str| {
            let mut v: serde_json::Value =
                serde_json::from_slice(&std::fs::read(path(name)).unwrap()).unwrap();
            strip_wall_time(&mut v);
            v
        };
        let (rep_a, rep_b) = (load("reporta.json"), load("reportb.json"));
        if rep_a != rep_b {
            problems.push("reports differ beyond wall time".into());
        }
    }

    let input = path("in.pgm");
    let out = path("x.pgm");
    let missing = path("missing.pgm");
    let expectations: Vec<(Vec<&str>, i32)> = vec![
        (vec!["--help"], 0),
        (vec!["--version"], 0),
        (vec!["enhance", "--input", &input, "--output", &out, "--optimizer", "closed-form"], 0),
        (vec!["enhance", "--input", &missing, "--output", &out], 1),
        (vec!["enhance", "--input", &input, "--output", "/nonexistent/dir/o.pgm", "--optimizer", "closed-form"], 1),
        (vec!["enhance", "--input", &input, "--output", &out, "--bogus"], 2),
        (vec!["enhance", "--input", &input], 2),
        (vec!["enhance", "--input", &input, "--output", &out, "--lambda", "-1"], 2),
        (vec!["enhance", "--input", &input, "--output", &out, "--repeats", "0"], 2),
        (vec!["compare", "--input", &input, "--optimizers", "icso,bogus"], 2),
        (vec!["compare", "--input", &input, "--optimizers", ""], 2),
        (vec!["frobnicate"], 2),
        (vec![], 2),
    ];
    for (args, expected) in &expectations {
        let code = exit_code(args);
        if code != *expected {
            problems.push(format!("{args:?} exited {code}, expected {expected}"));
        }
    }

    let elapsed = start.elapsed();
    let ok = problems.is_empty() && within(elapsed, 10.0);
    let detail = if problems.is_empty() {
        format!(
            "100 round-trips, 2 seeded runs identical, {} exit codes, {:.2}s",
            expectations.len(),
            elapsed.as_secs_f64()
        )
    } else {
        problems.join("; ")
    };
    assert!(verdict("criterion 11", "PGM round-trip, seeded CLI runs and exit codes", ok, detail));
}
