//! Acceptance criteria, one test each. Every test writes a single
//! `PASS`/`FAIL` line to stderr (uncaptured) and then asserts.
//!
//! Scale: 500 candidates and 20 outer iterations unless a criterion asks
//! for the full 2000/50 configuration.

use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use erbound::analytic;
use erbound::cha::{simplex_objective, solve_simplex, upper_bound, ActiveLearningConfig, CandidatePool};
use erbound::experiment::{self, ExperimentRecord, Method, Settings, Timings};
use erbound::linalg::{frechet_log, matrix_log_floored, HermitianOperator, DEFAULT_LOG_FLOOR};
use erbound::ppt;
use erbound::seed;
use erbound::states::{self, DensityMatrix};
use rand::Rng;

// tolerances, in bits unless noted
const FAMILY_2X2_TOL: f64 = 0.02;
const SOUNDNESS_SLACK: f64 = 1e-3;
const FAMILY_3X3_TOL: f64 = 0.03;
const PPT_WERNER_TOL: f64 = 0.01;
const MAX_SECONDS_PER_POINT: f64 = 120.0;
const DEMO_TARGET: f64 = 0.918;
const DEMO_TOL: f64 = 0.010;
const TILES_PPT_MAX: f64 = 1e-3;
const TILES_LOW_MAX: f64 = 0.01;
const TILES_HIGH_MIN: f64 = 0.02;
const TILES_WINDOW: (f64, f64) = (0.84, 0.89);
const TILES_PT_MIN: f64 = -1e-10;
const GAP_FLOOR: f64 = -2e-3;
const GAP_MEDIAN_MAX: f64 = 0.02;
const RANDOM_COUNT: usize = 20;
const FRECHET_REL_TOL: f64 = 1e-5;
const CONVEXITY_SLACK_NATS: f64 = 1e-9;
const DYKSTRA_TOL: f64 = 1e-9;
const ISOTROPIC_ARBITRATION_TOL: f64 = 0.05;

fn report(criterion: &str, ok: bool, detail: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[{}] {criterion}: {detail}", if ok { "PASS" } else { "FAIL" });
}

fn info(line: &str) {
    let _ = writeln!(std::io::stderr().lock(), "       {line}");
}

fn desk(seed: u64) -> Settings {
    Settings { seed, ..Settings::desk() }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Closed-form agreement, one-sided soundness and per-point runtime.
fn family_check(records: &[ExperimentRecord], tol: f64) -> (bool, String) {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut slowest = 0.0f64;
    for r in records {
        let (exact, cha) = (r.analytic_bits.unwrap(), r.cha_bits.unwrap_or(f64::NAN));
        let secs = r.cha_seconds.unwrap_or(0.0) + r.ppt_seconds.unwrap_or(0.0);
        let err = (cha - exact).abs();
        ok &= err <= tol && cha >= exact - SOUNDNESS_SLACK && secs <= MAX_SECONDS_PER_POINT;
        worst = worst.max(err);
        slowest = slowest.max(secs);
        info(&format!("alpha {:<5} exact {exact:.5} cha {cha:.5} ({secs:.1}s)", r.alpha.unwrap()));
    }
    (ok, format!("max |cha - exact| = {worst:.2e} (tol {tol}), slowest point {slowest:.1}s"))
}

#[test]
fn c01_werner_2x2() {
    let recs = experiment::werner_sweep(2, &[0.6, 0.7, 0.8, 0.9, 1.0], &Settings { method: Method::Cha, ..desk(1) }).unwrap();
    let (ok, detail) = family_check(&recs, FAMILY_2X2_TOL);
    report("C1 Werner 2x2", ok, &detail);
    assert!(ok);
}

#[test]
fn c02_isotropic_2x2() {
    let recs = experiment::isotropic_sweep(2, &[0.6, 0.7, 0.8, 0.9, 1.0], &Settings { method: Method::Cha, ..desk(2) }).unwrap();
    let (ok, detail) = family_check(&recs, FAMILY_2X2_TOL);
    report("C2 isotropic 2x2", ok, &detail);
    assert!(ok);
}

#[test]
fn c03_werner_isotropic_3x3() {
    let s = Settings { method: Method::Cha, ..desk(3) };
    let alphas = [0.5, 0.75, 1.0];
    let mut recs = experiment::werner_sweep(3, &alphas, &s).unwrap();
    recs.extend(experiment::isotropic_sweep(3, &alphas, &s).unwrap());
    let worst = recs
        .iter()
        .map(|r| (r.cha_bits.unwrap_or(f64::NAN) - r.analytic_bits.unwrap()).abs())
        .fold(0.0, f64::max);
    for r in &recs {
        info(&format!("{}: exact {:.5} cha {:.5}", r.state, r.analytic_bits.unwrap(), r.cha_bits.unwrap_or(f64::NAN)));
    }
    let ok = worst <= FAMILY_3X3_TOL;
    report("C3 Werner and isotropic 3x3", ok, &format!("max |cha - exact| = {worst:.2e} (tol {FAMILY_3X3_TOL})"));
    assert!(ok);
}

#[test]
fn c04_ppt_matches_werner_2x2() {
    let mut worst = 0.0f64;
    let mut all_converged = true;
    for a in [0.6, 0.7, 0.8, 0.9, 1.0] {
        let sol = ppt::ppt_relative_entropy(&states::werner(2, a).unwrap(), 1e-7, 3000).unwrap();
        worst = worst.max((sol.value_bits - analytic::werner_er(2, a).unwrap().value_bits).abs());
        all_converged &= sol.converged;
    }
    let ok = worst <= PPT_WERNER_TOL;
    report("C4 PPT benchmark on Werner 2x2", ok, &format!("max |ppt - exact| = {worst:.2e} (tol {PPT_WERNER_TOL}), all converged: {all_converged}"));
    assert!(ok);
}

#[test]
fn c05_pure_state_demo_full_scale() {
    let settings = Settings { method: Method::Cha, seed: 5, ..Settings::default() };
    let t = Instant::now();
    let demo = experiment::demo_pure(&settings).unwrap();
    let first = demo.history[0].value_bits.unwrap();
    let best = demo.record.cha_bits.unwrap();
    let ok = (best - DEMO_TARGET).abs() <= DEMO_TOL && first > best;
    report(
        "C5 pure-state demo (2000/50)",
        ok,
        &format!("iteration 1 {first:.4}, best {best:.5} (target {DEMO_TARGET} +/- {DEMO_TOL}), {:.0}s", t.elapsed().as_secs_f64()),
    );
    assert!(ok);
}

fn tiles_records() -> &'static [ExperimentRecord] {
    static RECORDS: OnceLock<Vec<ExperimentRecord>> = OnceLock::new();
    RECORDS.get_or_init(|| {
        let alphas = experiment::parse_grid("0:1:0.05").unwrap();
        experiment::tiles_sweep(&alphas, &desk(6)).unwrap().0
    })
}

#[test]
fn c06_tiles_family() {
    let recs = tiles_records();
    let at = |a: f64| recs.iter().find(|r| (r.alpha.unwrap() - a).abs() < 1e-9).unwrap();
    let ppt_max = recs.iter().map(|r| r.ppt_bits.unwrap()).fold(f64::MIN, f64::max);
    let low = at(0.80).cha_bits.unwrap();
    let high = at(0.95).cha_bits.unwrap();
    let summary = experiment::TilesSummary::from_records(recs);
    let first = summary.first_nonzero_alpha;
    for r in recs.iter().filter(|r| r.alpha.unwrap() >= 0.7) {
        info(&format!("alpha {:<5} ppt {:>9.2e} cha {:.5}", r.alpha.unwrap(), r.ppt_bits.unwrap(), r.cha_bits.unwrap()));
    }
    info(&format!("onset from sqrt fit: {:?}", summary.onset_alpha));
    let parts = [
        ppt_max <= TILES_PPT_MAX,
        low <= TILES_LOW_MAX,
        high >= TILES_HIGH_MIN,
        first.is_some_and(|a| a >= TILES_WINDOW.0 && a <= TILES_WINDOW.1),
    ];
    let ok = parts.iter().all(|&p| p);
    report(
        "C6 tiles family",
        ok,
        &format!(
            "max ppt {ppt_max:.1e} [{}], cha(0.80) {low:.5} [{}], cha(0.95) {high:.5} [{}], first alpha with cha > {TILES_LOW_MAX}: {first:?} in {TILES_WINDOW:?} [{}]",
            parts[0], parts[1], parts[2], parts[3]
        ),
    );
    assert!(ok);
}

#[test]
fn c07_tiles_state_is_ppt() {
    let m = states::tiles_state().min_pt_eigenvalue();
    let ok = m >= TILES_PT_MIN;
    report("C7 tiles state PPT", ok, &format!("min eigenvalue of partial transpose {m:.2e}"));
    assert!(ok);
}

#[test]
fn c08_random_gap_study() {
    let mut ok = true;
    let mut parts = Vec::new();
    for (da, db) in [(2, 2), (2, 3), (3, 3)] {
        let recs = experiment::random_study(da, db, RANDOM_COUNT, &desk(8)).unwrap();
        let mut gaps: Vec<f64> = recs.iter().map(|r| r.gap_bits().unwrap_or(f64::NAN)).collect();
        let min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        let med = median(&mut gaps);
        let floor_ok = min >= GAP_FLOOR && gaps.iter().all(|g| g.is_finite());
        let median_ok = (da, db) == (3, 3) || med <= GAP_MEDIAN_MAX;
        ok &= floor_ok && median_ok;
        parts.push(format!("{da}x{db} min {min:.1e} median {med:.1e}"));
        if (da, db) == (3, 3) {
            info(&format!("3x3 gaps: {}", gaps.iter().map(|g| format!("{g:.4}")).collect::<Vec<_>>().join(" ")));
        }
    }
    report("C8 random-state gaps", ok, &parts.join("; "));
    assert!(ok);
}

#[test]
fn c09_property_suites() {
    let mut parts = Vec::new();

    // Fréchet derivative of log against central differences
    let mut rng = seed::rng(90);
    let mut worst_fd = 0.0f64;
    for t in 0..100 {
        let a = states::random_density(1, 3, 3, seed::derive_seed(91, t)).unwrap().op().clone();
        let a = a.add_scaled(&HermitianOperator::identity(3), 0.05);
        let x = states::random_gue(3, &mut rng);
        let h = 1e-6;
        let fd = (&matrix_log_floored(&a.add_scaled(&x, h), DEFAULT_LOG_FLOOR) - &matrix_log_floored(&a.add_scaled(&x, -h), DEFAULT_LOG_FLOOR)).scaled(0.5 / h);
        let an = frechet_log(&a, &x, DEFAULT_LOG_FLOOR).unwrap();
        worst_fd = worst_fd.max((&fd - &an).frobenius_norm() / an.frobenius_norm());
    }
    parts.push((worst_fd <= FRECHET_REL_TOL, format!("frechet rel err {worst_fd:.1e}")));

    // convexity of the simplex objective
    let rho = states::random_entangled(2, 3, 92, 1000).unwrap();
    let pool = CandidatePool::with_fresh(2, 3, 40, 93);
    let mut convex = true;
    let simplex_point = |rng: &mut rand_chacha::ChaCha8Rng| {
        let w: Vec<f64> = (0..pool.len()).map(|_| -rng.random::<f64>().ln()).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect::<Vec<f64>>()
    };
    for _ in 0..50 {
        let (c1, c2) = (simplex_point(&mut rng), simplex_point(&mut rng));
        let f1 = simplex_objective(&rho, &pool, &c1, DEFAULT_LOG_FLOOR).unwrap();
        let f2 = simplex_objective(&rho, &pool, &c2, DEFAULT_LOG_FLOOR).unwrap();
        for th in [0.25, 0.5, 0.75] {
            let mid: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| th * a + (1.0 - th) * b).collect();
            let fm = simplex_objective(&rho, &pool, &mid, DEFAULT_LOG_FLOOR).unwrap();
            convex &= fm <= th * f1 + (1.0 - th) * f2 + CONVEXITY_SLACK_NATS;
        }
    }
    parts.push((convex, "convexity 50 trials".to_string()));

    // Frank-Wolfe gap certificate
    let cfg = ActiveLearningConfig::desk();
    let mut gap_ok = true;
    for s in 0..5 {
        let rho = states::random_entangled(2, 2, 94 + s, 1000).unwrap();
        let sol = solve_simplex(&rho, &CandidatePool::with_fresh(2, 2, 100, 95 + s), &cfg).unwrap();
        gap_ok &= sol.fw_gap_nats >= 0.0 && sol.fw_gap_nats.is_finite();
    }
    parts.push((gap_ok, "FW gap nonnegative".to_string()));

    // Dykstra: feasible and idempotent
    let mut dyk = true;
    for s in 0..10 {
        let a = states::random_gue(6, &mut seed::rng(96 + s)).scaled(0.3);
        let once = ppt::project_feasible(&a, 2, 3, 1e-12, 20_000).unwrap().matrix;
        let d = DensityMatrix::new(once.clone(), 2, 3);
        let pt_min = d.as_ref().map(|d| d.min_pt_eigenvalue()).unwrap_or(f64::NEG_INFINITY);
        let twice = ppt::project_feasible(&once, 2, 3, 1e-12, 20_000).unwrap().matrix;
        dyk &= once.min_eigenvalue() >= -DYKSTRA_TOL
            && pt_min >= -DYKSTRA_TOL
            && (once.trace() - 1.0).abs() <= DYKSTRA_TOL
            && (&twice - &once).frobenius_norm() <= DYKSTRA_TOL;
    }
    parts.push((dyk, "Dykstra feasible + idempotent".to_string()));

    // best-so-far is the exact prefix minimum
    let small = ActiveLearningConfig { pool_size: 150, outer_iterations: 8, ..ActiveLearningConfig::desk() };
    let rep = upper_bound(&states::random_entangled(2, 2, 97, 1000).unwrap(), &small, 98).unwrap();
    let mut running = f64::INFINITY;
    let mut prefix = true;
    for h in &rep.history {
        running = running.min(h.value_bits.unwrap_or(f64::INFINITY));
        prefix &= h.best_bits == Some(running);
    }
    prefix &= rep.best_value_bits == running;
    parts.push((prefix, "prefix minimum exact".to_string()));

    // single-thread CSV bytes
    let s = Settings {
        cha: small.clone(),
        threads: Some(1),
        seed: 99,
        ..Settings::default()
    };
    let csv = || {
        let recs = experiment::random_study(2, 2, 3, &s).unwrap();
        experiment::write_csv_string(&recs, &s, Timings::Omit).unwrap()
    };
    parts.push((csv() == csv(), "CSV byte-identical".to_string()));

    let ok = parts.iter().all(|p| p.0);
    let detail: Vec<String> = parts.iter().map(|(ok, d)| format!("{d} [{ok}]")).collect();
    report("C9 property suites", ok, &detail.join("; "));
    assert!(ok);
}

#[test]
fn c10_isotropic_log_d_arbitration() {
    let rho = states::isotropic(3, 1.0).unwrap();
    let target = 3f64.log2();
    let cha = upper_bound(&rho, &ActiveLearningConfig::desk(), 10).unwrap().best_value_bits;
    let ppt_v = ppt::ppt_relative_entropy(&rho, 1e-7, 3000).unwrap().value_bits;
    let log2_reading = analytic::isotropic_er_log2_leading(3, 1.0).unwrap();
    let ok = (cha - target).abs() <= ISOTROPIC_ARBITRATION_TOL
        && (ppt_v - target).abs() <= ISOTROPIC_ARBITRATION_TOL
        && (cha - log2_reading).abs() > ISOTROPIC_ARBITRATION_TOL;
    report(
        "C10 isotropic log d reading",
        ok,
        &format!("cha {cha:.4}, ppt {ppt_v:.4}, log2 d = {target:.4}, log 2 reading predicts {log2_reading:.4}"),
    );
    assert!(ok);
}
