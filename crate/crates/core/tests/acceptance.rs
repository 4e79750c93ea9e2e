//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test --release --test acceptance`.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sspolicy::heuristics::{bs_policy, mp_policy, HeuristicConfig};
use sspolicy::loss::{
    approximation_error, complementary_loss, loss, make_partition, Partition, PartitionStrategy, PiecewiseLoss,
};
use sspolicy::model::{build_joint, build_minlp_S, build_minlp_s, ModelOptions, SegmentTable};
use sspolicy::sdp::{check_k_convexity, scarf_g, solve_sdp, solve_sdp_auto, InventoryGrid, SdpOptions};
use sspolicy::simulate::simulate_policy;
use sspolicy::solver::{solve_exact, ExactBackend, SolveOptions};
use sspolicy::testbed::{build_instances, run_benchmark, BenchmarkConfig, BenchmarkOptions, Method, PatternName};
use sspolicy::{CostParameters, Error, Instance, NormalDemand};

// tolerances
const PARAM_TOL: f64 = 1.5;
const COST_TOL: f64 = 3.0;
const SDP_VALUE_TOL: f64 = 0.5;
const BS_MP_AGREEMENT: f64 = 0.5;
const GAP_MEAN_MAX: f64 = 1.0;
const GAP_MEDIAN_MAX: f64 = 0.5;
const CROSS_METHOD_MAX: f64 = 2.0;
const IDENTITY_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 5e-3;
const EXTERNAL_TOL: f64 = 1e-4;
const SIM_SE_MULTIPLE: f64 = 3.0;
const KCONVEX_TOL: f64 = 1e-7;

const REFERENCE_S: [f64; 4] = [70.2658, 53.9768, 116.5530, 53.9768];
const MP_SMALL_S: [f64; 4] = [15.0008, 29.0161, 58.1089, 29.0161];
const BS_SMALL_S: [f64; 4] = [15.0, 29.01, 58.1, 29.01];
const REFERENCE_COST: [f64; 4] = [366.138, 311.369, 193.338, 118.031];

struct Outcome {
    pass: Option<bool>,
    detail: String,
}

fn pass(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: Some(ok),
        detail: detail.into(),
    }
}

fn skipped(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: None,
        detail: detail.into(),
    }
}

fn failed(e: Error) -> Outcome {
    pass(false, format!("error: {e}"))
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return failed(e.into()),
        }
    };
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let inst = Instance::worked_example();
    let grid = attempt!(InventoryGrid::for_instance(&inst, 1.0));
    let sol = attempt!(solve_sdp(&inst, &grid, &SdpOptions::default()));
    let secs = started.elapsed().as_secs_f64();
    let (s, big_s) = sol.policy().period(1);
    let g_big = attempt!(scarf_g(&sol, 1, big_s));
    let g_small = attempt!(scarf_g(&sol, 1, s));
    let level = inst.costs.fixed + g_big;
    let ok = s == 14.0
        && big_s == 70.0
        && (g_big - 262.58).abs() <= SDP_VALUE_TOL
        && (level - 362.58).abs() <= SDP_VALUE_TOL
        && (g_small - 366.166).abs() <= SDP_VALUE_TOL
        && secs < 10.0;
    pass(
        ok,
        format!(
            "s_1={s} S_1={big_s} G_1(S_1)={g_big:.3} K+G_1(S_1)={level:.3} G_1(14)={g_small:.3} ({secs:.2}s)"
        ),
    )
}

fn worked_mp() -> sspolicy::Result<sspolicy::heuristics::HeuristicPolicy> {
    mp_policy(&Instance::worked_example(), &HeuristicConfig::default(), &ExactBackend::default())
}

fn worked_bs() -> sspolicy::Result<sspolicy::heuristics::HeuristicPolicy> {
    let cfg = HeuristicConfig {
        segments: 11,
        bs_step: Some(0.01),
        ..Default::default()
    };
    bs_policy(&Instance::worked_example(), &cfg, &ExactBackend::default())
}

fn table_error(p: &sspolicy::heuristics::HeuristicPolicy, small_s: &[f64; 4]) -> (f64, f64) {
    let mut params: f64 = 0.0;
    let mut costs: f64 = 0.0;
    for t in 1..=4 {
        let (s, big_s) = p.policy.period(t);
        params = params.max((s - small_s[t - 1]).abs()).max((big_s - REFERENCE_S[t - 1]).abs());
        costs = costs.max((p.linked_costs[t - 1] - REFERENCE_COST[t - 1]).abs());
    }
    (params, costs)
}

fn criterion_2() -> Outcome {
    let started = Instant::now();
    let p = attempt!(worked_mp());
    let secs = started.elapsed().as_secs_f64();
    let (params, costs) = table_error(&p, &MP_SMALL_S);
    pass(
        params <= PARAM_TOL && costs <= COST_TOL && secs < 60.0,
        format!(
            "s={:?} S={:?} max|param err|={params:.2e} max|cost err|={costs:.2e} ({secs:.2}s)",
            round4(p.policy.reorder_points()),
            round4(p.policy.order_up_to())
        ),
    )
}

fn round4(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|x| (x * 1e4).round() / 1e4).collect()
}

fn criterion_3() -> Outcome {
    let bs = attempt!(worked_bs());
    let mp = attempt!(worked_mp());
    let (params, costs) = table_error(&bs, &BS_SMALL_S);
    let mut agree: f64 = 0.0;
    for t in 1..=4 {
        if !mp.multiple_roots[t - 1] {
            agree = agree.max((bs.policy.period(t).0 - mp.policy.period(t).0).abs());
        }
    }
    pass(
        params <= PARAM_TOL && costs <= COST_TOL && agree <= BS_MP_AGREEMENT,
        format!(
            "s={:?} max|param err|={params:.3} max|cost err|={costs:.2e} max|s_BS-s_MP|={agree:.4}",
            round4(bs.policy.reorder_points())
        ),
    )
}

fn gap_stats(rows: &[&sspolicy::testbed::DetailRow]) -> (f64, f64, usize) {
    let mut gaps: Vec<f64> = rows.iter().filter_map(|r| r.gap_pct).collect();
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    gaps.sort_by(f64::total_cmp);
    let n = gaps.len();
    if n == 0 {
        return (f64::NAN, f64::NAN, failures);
    }
    let mean = gaps.iter().sum::<f64>() / n as f64;
    let median = if n % 2 == 1 { gaps[n / 2] } else { 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]) };
    (mean, median, failures)
}

fn criterion_4() -> Vec<(String, Outcome)> {
    let mut config = match BenchmarkConfig::bundled(8) {
        Ok(c) => c,
        Err(e) => return vec![("4".into(), failed(e))],
    };
    config.replications = 10_000;
    config.bs_segments = 11;
    let instances = match build_instances(&config) {
        Ok(i) => i,
        Err(e) => return vec![("4".into(), failed(e))],
    };
    let started = Instant::now();
    let report = match run_benchmark(
        &config,
        &instances,
        &BenchmarkOptions {
            seed: 20_240_601,
            jobs: None,
            detail_path: None,
        },
    ) {
        Ok(r) => r,
        Err(e) => return vec![("4".into(), failed(e))],
    };
    let secs = started.elapsed().as_secs_f64();
    let mut out = vec![];
    for pattern in [PatternName::Sta, PatternName::Rand] {
        let rows: Vec<_> = report
            .details
            .iter()
            .filter(|r| r.pattern == pattern && r.method == Method::Bs)
            .collect();
        let (mean, median, failures) = gap_stats(&rows);
        out.push((
            format!("4 ({pattern})"),
            pass(
                rows.len() == 27 && failures == 0 && mean <= GAP_MEAN_MAX && median <= GAP_MEDIAN_MAX,
                format!("BS n={} mean gap {mean:.3}% median {median:.3}% failures {failures}", rows.len()),
            ),
        ));
    }
    for method in [Method::Bs, Method::Mp] {
        let rows: Vec<_> = report.details.iter().filter(|r| r.method == method).collect();
        let (mean, median, failures) = gap_stats(&rows);
        out.push((
            format!("4 (full, {method})"),
            pass(
                rows.len() == 270 && failures == 0 && mean <= GAP_MEAN_MAX,
                format!("n={} mean gap {mean:.3}% median {median:.3}% failures {failures}", rows.len()),
            ),
        ));
    }
    let mut worst: f64 = 0.0;
    for b in &instances {
        let gap = |m: Method| {
            report
                .details
                .iter()
                .find(|r| r.instance_id == b.id && r.method == m)
                .and_then(|r| r.gap_pct)
        };
        if let (Some(x), Some(y)) = (gap(Method::Mp), gap(Method::Bs)) {
            worst = worst.max((x - y).abs());
        }
    }
    out.push((
        "4 (MP vs BS)".into(),
        pass(
            worst < CROSS_METHOD_MAX,
            format!("max per-instance |gap_MP - gap_BS| = {worst:.3} pp ({secs:.1}s for 540 policies)"),
        ),
    ));
    out
}

fn criterion_5() -> Outcome {
    let n = 10_001;
    let xs: Vec<f64> = (0..n).map(|i| -5.0 + 10.0 * i as f64 / (n - 1) as f64).collect();
    let identity = xs
        .iter()
        .map(|&x| (complementary_loss(x, 0.0, 1.0) - loss(x, 0.0, 1.0) - x).abs())
        .fold(0.0, f64::max);
    let mut sandwich_breaks = 0;
    let mut errors = vec![];
    for cells in [2, 6, 11] {
        let partition = attempt!(make_partition(cells, PartitionStrategy::default()));
        let pw = PiecewiseLoss::new(&partition, 0.0, 1.0);
        errors.push(approximation_error(&partition));
        for &x in &xs {
            let exact = complementary_loss(x, 0.0, 1.0);
            if pw.lower(x) > exact + 1e-12 || exact > pw.upper(x) + 1e-12 {
                sandwich_breaks += 1;
            }
        }
    }
    pass(
        identity <= IDENTITY_TOL && sandwich_breaks == 0 && errors[2] < errors[1],
        format!(
            "identity max err {identity:.1e}, sandwich violations {sandwich_breaks}, e_W(2,6,11) = {:.6} {:.6} {:.6}",
            errors[0], errors[1], errors[2]
        ),
    )
}

// ---------------------------------------------------------------------------
// criterion 6 oracle: every delta pattern priced from the model definition,
// levels optimized over candidate kinks and a dense grid

struct OracleCase {
    inst: Instance,
    partition: Partition,
    first_order: bool,
    initial: Option<f64>,
}

/// Cost of one cycle `a..=e` (1-based) opened at expected level `y`.
fn cycle_cost(case: &OracleCase, a: usize, e: usize, y: f64) -> f64 {
    let c = case.inst.costs;
    let mut v = 0.0;
    let mut mean = 0.0;
    let mut var = 0.0;
    for t in a..=e {
        let d = case.inst.demands[t - 1];
        mean += d.mean;
        var += d.std_dev * d.std_dev;
        let x = y - mean;
        let h = PiecewiseLoss::new(&case.partition, 0.0, var.sqrt()).upper(x);
        v += c.holding * h + c.penalty * (h - x);
    }
    v
}

/// Minimum over nondecreasing `z` drawn from `candidates` (sorted).
fn chain_minimum(case: &OracleCase, starts: &[usize], candidates: &[f64]) -> f64 {
    let n = case.inst.horizon();
    let m = starts.len();
    let cum: Vec<f64> = std::iter::once(0.0)
        .chain(case.inst.demands.iter().scan(0.0, |s, d| {
            *s += d.mean;
            Some(*s)
        }))
        .collect();
    let c = case.inst.costs.unit;
    let mut best = vec![0.0; candidates.len()];
    for k in 0..m {
        let a = starts[k];
        let e = if k + 1 < m { starts[k + 1] - 1 } else { n };
        let mut prefix = f64::INFINITY;
        for (i, &z) in candidates.iter().enumerate() {
            let mut v = cycle_cost(case, a, e, z - cum[a - 1]);
            if k > 0 || case.first_order {
                v += case.inst.costs.fixed;
            }
            if k == 0 {
                v -= c * z;
                if let Some(y0) = case.initial {
                    if (z - y0).abs() > 1e-12 {
                        v = f64::INFINITY;
                    }
                }
            } else {
                prefix = prefix.min(best[i]);
                v += prefix;
            }
            if k == m - 1 {
                v += c * z;
            }
            best[i] = v;
        }
    }
    best.into_iter().fold(f64::INFINITY, f64::min)
}

fn oracle(case: &OracleCase) -> f64 {
    let n = case.inst.horizon();
    let cum: Vec<f64> = std::iter::once(0.0)
        .chain(case.inst.demands.iter().scan(0.0, |s, d| {
            *s += d.mean;
            Some(*s)
        }))
        .collect();
    // kinks of every possible cycle/period pair
    let mut kinks = vec![];
    for a in 1..=n {
        let mut var = 0.0;
        for t in a..=n {
            var += case.inst.demands[t - 1].std_dev.powi(2);
            let piece = PiecewiseLoss::new(&case.partition, 0.0, var.sqrt());
            for b in piece.breakpoints() {
                kinks.push(b + cum[t]);
            }
        }
    }
    if let Some(y0) = case.initial {
        kinks.push(y0);
    }
    kinks.sort_by(f64::total_cmp);
    kinks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let lo = kinks[0] - 1.0;
    let hi = kinks[kinks.len() - 1] + 1.0;
    let mut dense: Vec<f64> = (0..=((hi - lo) / 0.01) as usize).map(|i| lo + 0.01 * i as f64).collect();
    dense.extend(case.initial);
    dense.sort_by(f64::total_cmp);

    let mut best = f64::INFINITY;
    for mask in 0u32..1 << (n - 1) {
        let mut starts = vec![1];
        starts.extend((2..=n).filter(|t| mask >> (t - 2) & 1 == 1));
        let v = chain_minimum(case, &starts, &kinks).min(chain_minimum(case, &starts, &dense));
        best = best.min(v);
    }
    best
}

fn random_case(rng: &mut ChaCha8Rng, i: usize) -> OracleCase {
    let n = rng.random_range(2..=6);
    let demands = (0..n)
        .map(|_| {
            let mean: f64 = rng.random_range(5.0..60.0_f64).round();
            let cv: f64 = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.1..0.4) };
            NormalDemand::new(mean, cv * mean)
        })
        .collect();
    let costs = CostParameters::new(
        rng.random_range(20.0..300.0_f64).round(),
        if i % 3 == 0 { rng.random_range(0.0..2.0) } else { 0.0 },
        rng.random_range(0.5..2.0),
        rng.random_range(2.0..20.0),
    );
    let i0 = rng.random_range(-20.0..60.0_f64).round();
    let strategy = if i % 2 == 0 { PartitionStrategy::Minimax } else { PartitionStrategy::EqualProbability };
    let partition = make_partition(rng.random_range(2..=10), strategy).expect("valid cell count");
    let inst = Instance::new(costs, demands, i0);
    match i % 3 {
        0 => OracleCase { inst, partition, first_order: false, initial: Some(i0) },
        1 => OracleCase { inst, partition, first_order: false, initial: None },
        _ => OracleCase { inst, partition, first_order: true, initial: None },
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for i in 0..20 {
        let case = random_case(&mut rng, i);
        let segs = SegmentTable::new(&case.inst, &case.partition);
        let opts = ModelOptions::default();
        let model = match (case.first_order, case.initial) {
            (true, _) => build_minlp_S(&case.inst, &segs, &opts),
            (false, init) => build_minlp_s(&case.inst, &segs, init, &opts),
        };
        let model = attempt!(model);
        let got = attempt!(solve_exact(&model, &SolveOptions::default())).objective;
        let want = oracle(&case);
        let err = (got - want).abs();
        if err > worst {
            worst = err;
            detail = format!("case {i} (T={}): exact {got:.6} oracle {want:.6}", case.inst.horizon());
        }
    }
    pass(worst <= ORACLE_TOL, format!("20 instances, max |diff| = {worst:.2e}; worst {detail}"))
}

const HIGHS_SCRIPT: &str = r#"
import sys, highspy
h = highspy.Highs()
h.setOptionValue("output_flag", False)
h.setOptionValue("mip_rel_gap", 0.0)
h.setOptionValue("mip_abs_gap", 0.0)
h.setOptionValue("primal_feasibility_tolerance", 1e-9)
h.setOptionValue("mip_feasibility_tolerance", 1e-9)
h.readModel(sys.argv[1])
h.run()
print(h.modelStatusToString(h.getModelStatus()))
print(repr(h.getInfo().objective_function_value))
"#;

fn criterion_6_external() -> Outcome {
    let probe = Command::new("python3").args(["-c", "import highspy"]).output();
    match probe {
        Ok(o) if o.status.success() => {}
        Ok(_) => return skipped("python3 found but the highspy module is not installed"),
        Err(_) => return skipped("python3 not available to drive HiGHS"),
    }
    let inst = Instance::worked_example();
    let partition = attempt!(make_partition(10, PartitionStrategy::Minimax));
    let segs = SegmentTable::new(&inst, &partition);
    let model = attempt!(build_joint(&inst, &segs, &ModelOptions::default()));
    let exact = attempt!(solve_exact(&model, &SolveOptions::default()));
    let dir = tempfile::tempdir().expect("temp dir");
    let lp = dir.path().join("joint.lp");
    attempt!(model.export_lp(&lp));
    let out = Command::new("python3")
        .arg("-c")
        .arg(HIGHS_SCRIPT)
        .arg(&lp)
        .output()
        .expect("python3 ran before");
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    let status = lines.next().unwrap_or("").to_string();
    let Some(objective) = lines.next().and_then(|l| l.trim().parse::<f64>().ok()) else {
        return pass(false, format!("HiGHS output not understood: {text} {}", String::from_utf8_lossy(&out.stderr)));
    };
    let diff = (objective - exact.objective).abs();
    pass(
        status == "Optimal" && diff <= EXTERNAL_TOL,
        format!("HiGHS {status} {objective:.9} vs exact {:.9} (|diff| {diff:.1e})", exact.objective),
    )
}

fn criterion_7() -> Outcome {
    let inst = Instance::worked_example();
    // tails cut at 1e-8 so that the oracle carries no truncation bias
    let sol = attempt!(solve_sdp_auto(&inst, 0.25, &SdpOptions { truncation: 1.0 - 1e-8 }));
    let sim = attempt!(simulate_policy(&inst, sol.policy(), 1_000_000, 7));
    let z = (sim.mean - sol.expected_cost()) / sim.std_error;
    pass(
        z.abs() <= SIM_SE_MULTIPLE,
        format!(
            "C_1(0)={:.4} simulated {:.4} +- {:.4} (z = {z:.2}, 10^6 reps, seed 7)",
            sol.expected_cost(),
            sim.mean,
            sim.std_error
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut config = attempt!(BenchmarkConfig::bundled(8));
    config.patterns = vec![PatternName::Sta];
    let instances = attempt!(build_instances(&config));
    let mut checked = 0;
    let mut violations = vec![];
    for b in &instances {
        let sol = attempt!(solve_sdp_auto(&b.instance, sspolicy::sdp::auto_step(&b.instance), &SdpOptions::default()));
        for t in 1..=sol.horizon() {
            checked += 1;
            if let Some(v) = check_k_convexity(sol.g_table(t), sol.grid(), b.fixed, KCONVEX_TOL) {
                violations.push(format!("{} t={t} {v:?}", b.id));
            }
        }
    }
    pass(
        violations.is_empty() && instances.len() == 27,
        format!(
            "{} instances, {checked} G tables, violations: {}",
            instances.len(),
            if violations.is_empty() { "none".to_string() } else { violations.join("; ") }
        ),
    )
}

fn criterion_9() -> Outcome {
    // declared, not reproduced: the gate itself is checked
    let long = attempt!(BenchmarkConfig::bundled(25));
    let inst = attempt!(build_instances(&long))[0].instance.clone();
    let segs = SegmentTable::new(&inst, &attempt!(make_partition(10, PartitionStrategy::Minimax)));
    let model = attempt!(build_minlp_s(&inst, &segs, None, &ModelOptions::default()));
    let gated = matches!(solve_exact(&model, &SolveOptions::default()), Err(Error::HorizonTooLarge { .. }));
    Outcome {
        pass: if gated && !long.oracle { None } else { Some(false) },
        detail: "declared: wall-clock tables are hardware specific; 25-period BS needs an external MIP solver \
                 (LP export), the built-in backend refuses T > 16 and the CLI requires --long-horizon"
            .into(),
    }
}

fn main() {
    let mut results: Vec<(String, Outcome)> = vec![
        ("1".into(), criterion_1()),
        ("2".into(), criterion_2()),
        ("3".into(), criterion_3()),
    ];
    results.extend(criterion_4());
    results.push(("5".into(), criterion_5()));
    results.push(("6".into(), criterion_6()));
    results.push(("6 (external)".into(), criterion_6_external()));
    results.push(("7".into(), criterion_7()));
    results.push(("8".into(), criterion_8()));
    results.push(("9".into(), criterion_9()));

    let mut failures = 0;
    for (id, o) in &results {
        let tag = match o.pass {
            Some(true) => "PASS",
            Some(false) => {
                failures += 1;
                "FAIL"
            }
            None => "SKIP",
        };
        println!("criterion {id}: {tag} - {}", o.detail);
    }
    if failures > 0 {
        println!("{failures} criterion line(s) failed");
        std::process::exit(1);
    }
}
