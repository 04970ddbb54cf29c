//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and
//! exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nn_adversary::instance::materialize;
use nn_adversary::optimum::{ratio_to_f64, LOG_BOUND_TOLERANCE};
use nn_adversary::*;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

fn certified_metrics() -> Vec<MetricKind> {
    vec![
        MetricKind::L1,
        MetricKind::L2,
        MetricKind::lp(3.0).unwrap(),
        MetricKind::LINF,
        MetricKind::Graphic,
    ]
}

/// Every k in 0..=8 and every metric: all four certification checks, with the
/// open length equal to (12+4k)·2^k − 3 as integers.
fn tour_certification() -> Outcome {
    let mut rows = 0;
    for metric in certified_metrics() {
        for k in 0..=8 {
            let report = certify_lemma(k, metric).map_err(|e| e.to_string())?;
            ensure!(report.passed(), "k={k} {metric}: failed checks {}", report.failed_checks());
            let want = (12 + 4 * i64::from(k)) * (1 << k) - 3;
            ensure!(
                report.measured_length.exact_true() == Some(want),
                "k={k} {metric}: length {:?} != {want}",
                report.measured_length.exact
            );
            rows += 1;
        }
    }
    Ok(format!("{rows} (k, metric) pairs certified, lengths exact"))
}

/// Ratio chain in exact rationals, logarithmic bound at 1e-12.
fn ratio_table() -> Outcome {
    for metric in certified_metrics() {
        let rows = theorem_table(8, metric).map_err(|e| e.to_string())?;
        ensure!(rows.len() == 9, "{metric}: {} rows", rows.len());
        for row in &rows {
            let k = row.k.unwrap();
            let n = 16 * (1i64 << k) - 6;
            let open = (12 + 4 * i64::from(k)) * (1 << k) - 3;
            let ratio = Ratio::new(open, n);
            let chain = Ratio::new(3 + i64::from(k), 4);
            let lower = 0.25 * ((n as f64).log2() - 1.0);
            ensure!(row.ratio_open_exact == Some(ratio), "k={k} {metric}: ratio {:?}", row.ratio_open_exact);
            ensure!(row.bounds.chain == Some(chain), "k={k}: chain {:?}", row.bounds.chain);
            ensure!(ratio >= chain, "k={k}: {ratio} < {chain}");
            ensure!(
                ratio_to_f64(chain) >= lower - LOG_BOUND_TOLERANCE,
                "k={k}: chain {chain} below log bound {lower}"
            );
            ensure!((row.bounds.lower_bound - lower).abs() <= LOG_BOUND_TOLERANCE, "k={k}: lower bound");
            ensure!(row.chain_holds(), "k={k}: chain_holds false");
        }
        ensure!(rows[0].ratio_open_exact == Some(Ratio::new(9, 10)), "k=0 ratio");
        ensure!(rows[5].ratio_open_exact == Some(Ratio::new(1021, 506)), "k=5 ratio");
        ensure!(rows[8].ratio_open_exact == Some(Ratio::new(11261, 4090)), "k=8 ratio");
    }
    Ok("9/10 >= 3/4, 1021/506 >= 2, 11261/4090 >= 11/4; all rows for 5 metrics".into())
}

/// Held-Karp against the analytic optimum, perimeter tours through k = 8.
fn optimum_claim() -> Outcome {
    let metrics = [MetricKind::L1, MetricKind::L2, MetricKind::LINF, MetricKind::Graphic];
    for metric in metrics {
        let g0 = generate_gk(0, metric).map_err(|e| e.to_string())?;
        let (_, opt) = exact_optimum(&g0, 18).map_err(|e| e.to_string())?;
        ensure!(opt.exact_true() == Some(10), "G_0 {metric}: optimum {}", opt.approx);
        for m in 2..=8 {
            let grid = generate_grid(m, metric).map_err(|e| e.to_string())?;
            let (_, opt) = exact_optimum(&grid, 18).map_err(|e| e.to_string())?;
            ensure!(opt.exact_true() == Some(2 * m as i64), "2x{m} {metric}: {}", opt.approx);
        }
    }
    for metric in certified_metrics() {
        for k in 0..=8 {
            let g = generate_gk(k, metric).map_err(|e| e.to_string())?;
            let (_, len) = perimeter_tour(&g).map_err(|e| e.to_string())?;
            ensure!(len.exact_true() == Some(g.len() as i64), "k={k} {metric}: perimeter {}", len.approx);
        }
    }
    Ok("Held-Karp(G_0) = 10 in 4 metrics; 2x m optimum = 2m for m <= 8; perimeter = n for k <= 8".into())
}

/// Closed NNR tours from every start of G_0 and G_1 stay below ½⌈log₂ n⌉ + ½.
fn upper_bound_envelope() -> Outcome {
    let mut runs = 0;
    for metric in certified_metrics() {
        for k in 0..=1 {
            let g = generate_gk(k, metric).map_err(|e| e.to_string())?;
            let upper = bounds(g.len() as u64, Some(k)).upper_bound;
            let rows = start_sweep(&g, &[TieBreakPolicy::Lexicographic, TieBreakPolicy::IndexOrder], None)
                .map_err(|e| e.to_string())?;
            for row in rows {
                let r = row.ratio_closed.ok_or("missing optimum")?;
                ensure!(row.weak_valid, "k={k} {metric} start {}: not weak-valid", row.start);
                ensure!((1.0..=upper).contains(&r), "k={k} {metric} start {}: ratio {r} > {upper}", row.start);
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} closed NNR tours within the envelope"))
}

/// Grid conditions for all norms and the graphic metric; graphic equals L¹.
fn metric_conditions() -> Outcome {
    let mut metrics: Vec<MetricKind> = [1.0, 1.5, 2.0, 3.0, f64::INFINITY]
        .iter()
        .map(|&p| MetricKind::lp(p).unwrap())
        .collect();
    metrics.push(MetricKind::Graphic);
    for k in 0..=4 {
        for &metric in &metrics {
            let g = generate_gk(k, metric).map_err(|e| e.to_string())?;
            let report = check_metric_conditions(&g);
            ensure!(report.passed, "k={k} {metric}: {:?}", report.violations.first());
        }
        let graphic = generate_gk(k, MetricKind::Graphic).map_err(|e| e.to_string())?;
        let l1 = generate_gk(k, MetricKind::L1).map_err(|e| e.to_string())?;
        for a in 0..graphic.len() {
            for b in 0..graphic.len() {
                ensure!(
                    graphic.distance(a, b).exact == l1.distance(a, b).exact,
                    "k={k}: graphic({a},{b}) != L1"
                );
            }
        }
    }
    Ok("conditions hold for k <= 4 under 6 metrics; graphic = L1 exhaustively".into())
}

/// Strictify makes the adversarial tour the unique NNR tour on G_0..G_2.
fn perturbation_certificate() -> Outcome {
    let metrics = [MetricKind::L1, MetricKind::L2, MetricKind::LINF, MetricKind::lp(3.0).unwrap()];
    let mut certified = 0;
    for (k, scale) in [(0u32, 1024i64), (1, 4096), (2, 16384)] {
        let tour = build_adversarial_tour(k).map_err(|e| e.to_string())?.tour;
        for metric in metrics {
            let g = generate_gk(k, metric).map_err(|e| e.to_string())?;
            let p = perturb(&g, PerturbScheme::Strictify, scale, 1).map_err(|e| format!("k={k} {metric}: {e}"))?;
            let v = validate_nnr(&p, &tour, ValidationMode::Strict).map_err(|e| e.to_string())?;
            ensure!(v.valid, "k={k} {metric}: strict failure {:?}", v.failure);
            ensure!(v.ties.is_empty(), "k={k} {metric}: ties remain");
            let (executed, _) = run_nnr(&p, tour.first().unwrap(), &TieBreakPolicy::IndexOrder).map_err(|e| e.to_string())?;
            ensure!(executed == tour, "k={k} {metric}: executor does not reproduce the tour order");
            certified += 1;
        }
    }
    Ok(format!("{certified} perturbed instances with a unique NNR tour"))
}

fn random_metric(rng: &mut ChaCha8Rng) -> MetricKind {
    *[
        MetricKind::L1,
        MetricKind::L2,
        MetricKind::LINF,
        MetricKind::lp(1.5).unwrap(),
        MetricKind::Graphic,
    ]
    .choose(rng)
    .unwrap()
}

/// Randomly jittered 2 x m grid whose pairwise L² distances are all distinct.
fn distinct_instance(rng: &mut ChaCha8Rng, m: usize) -> Instance {
    let scale = 1 << 16;
    let base = generate_grid(m, MetricKind::L2).unwrap();
    let bound = (scale - 1) / (16 * base.len() as i64);
    loop {
        let cities: Vec<ScaledPoint> = base
            .cities()
            .iter()
            .map(|p| {
                ScaledPoint::new(
                    p.x * scale + rng.gen_range(-bound..=bound),
                    p.y * scale + rng.gen_range(-bound..=bound),
                )
            })
            .collect();
        let mut squared: Vec<i64> = Vec::new();
        for i in 0..cities.len() {
            for j in i + 1..cities.len() {
                let (dx, dy) = (cities[i].x - cities[j].x, cities[i].y - cities[j].y);
                squared.push(dx * dx + dy * dy);
            }
        }
        squared.sort_unstable();
        if squared.windows(2).all(|w| w[0] < w[1]) {
            let metric = materialize(MetricKind::L2, &cities, scale).unwrap();
            return Instance::new("jittered", cities, scale, metric, 0, 0, None).unwrap();
        }
    }
}

/// 1000 random executor runs all weak-validate; with distinct distances all
/// policies coincide.
fn executor_validator_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut runs = 0;
    for _ in 0..1000 {
        let m = rng.gen_range(2..=12);
        let g = generate_grid(m, random_metric(&mut rng)).unwrap();
        let start = rng.gen_range(0..g.len());
        let (lex, _) = run_nnr(&g, start, &TieBreakPolicy::Lexicographic).map_err(|e| e.to_string())?;
        let (idx, _) = run_nnr(&g, start, &TieBreakPolicy::IndexOrder).map_err(|e| e.to_string())?;
        let (adv, _) = run_nnr(&g, start, &TieBreakPolicy::Adversarial(idx.clone())).map_err(|e| e.to_string())?;
        ensure!(adv == idx, "adversarial policy diverged from its target");
        for tour in [&lex, &idx, &adv] {
            let v = validate_nnr(&g, tour, ValidationMode::Weak).map_err(|e| e.to_string())?;
            ensure!(v.valid, "2x{m} {} start {start}: {:?}", g.metric_kind(), v.failure);
        }
        runs += 1;
    }
    let mut distinct = 0;
    for _ in 0..100 {
        let m = rng.gen_range(2..=12);
        let g = distinct_instance(&mut rng, m);
        let start = rng.gen_range(0..g.len());
        let (lex, _) = run_nnr(&g, start, &TieBreakPolicy::Lexicographic).map_err(|e| e.to_string())?;
        let (idx, _) = run_nnr(&g, start, &TieBreakPolicy::IndexOrder).map_err(|e| e.to_string())?;
        let (adv, _) = run_nnr(&g, start, &TieBreakPolicy::Adversarial(lex.clone())).map_err(|e| e.to_string())?;
        ensure!(lex == idx && idx == adv, "policies disagree on a distinct-distance instance");
        ensure!(validate_nnr(&g, &lex, ValidationMode::Strict).map_err(|e| e.to_string())?.valid, "not strict");
        distinct += 1;
    }
    Ok(format!("{runs} random (grid, start) cases weak-valid under 3 policies; {distinct} distinct-distance instances agree across policies"))
}

/// Swapping two interior cities of a certified tour breaks certification at a
/// pinpointed step.
fn fault_injection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..50 {
        let k = rng.gen_range(0..=3);
        let metric = random_metric(&mut rng);
        let g = generate_gk(k, metric).unwrap();
        let rec = build_adversarial_tour(k).unwrap();
        let n = rec.tour.len();
        let i = rng.gen_range(1..n - 1);
        let mut j = rng.gen_range(1..n - 1);
        while j == i {
            j = rng.gen_range(1..n - 1);
        }
        let bad = rec.tour.swapped(i, j);
        let report = certify_tour(&g, &bad, rec.predicted_length).map_err(|e| e.to_string())?;
        ensure!(!report.passed(), "trial {trial}: swap ({i},{j}) in k={k} {metric} still certifies");
        let v = validate_nnr(&g, &bad, ValidationMode::Weak).map_err(|e| e.to_string())?;
        let failure = v.failure.ok_or_else(|| format!("trial {trial}: swap ({i},{j}) k={k} {metric} validates"))?;
        ensure!(failure.step >= i.min(j), "trial {trial}: failure before the swap");
        ensure!(report.nnr.failure.as_ref().map(|f| f.step) == Some(failure.step), "trial {trial}: step mismatch");
    }
    Ok("50 random interior swaps rejected with a pinpointed step".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 tour certification", tour_certification),
        ("2 ratio table", ratio_table),
        ("3 optimum claim", optimum_claim),
        ("4 upper-bound envelope", upper_bound_envelope),
        ("5 metric conditions", metric_conditions),
        ("6 perturbation certificate", perturbation_certificate),
        ("7 executor/validator agreement", executor_validator_agreement),
        ("8 fault injection", fault_injection),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name} ({secs:.2}s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 8 acceptance criteria passed");
}
