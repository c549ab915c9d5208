//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails or overruns its time budget.
//!
//! Run a subset with `cargo test --test acceptance -- 3 7`.

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dmw::base::{DirectionMode, DirectionSet, RngSeed};
use dmw::estimators::{
    empirical_dmw, enumerate_matrix_law, exact_dmw, hierarchy_check, law_distance, per_direction_costs, sample_matrix_law, OtSolver,
    ScaleWeights, HIERARCHY_SLACK,
};
use dmw::gw::{gw_entropic, gw_permutation_min, EntropicGwConfig};
use dmw::kernels::{gram_from_dissimilarity, msdmw_dissimilarity_matrix, KernelSketchConfig};
use dmw::ot::{assignment_ot, exact_ot, sinkhorn, sorted_uniform_cost, w1d_pth_power, CostMatrix, DiscreteMeasure1D, SinkhornConfig};
use dmw::spaces::{counterexample_x, counterexample_y, random_euclidean_space, MetricMeasureSpace};
use dmw_experiments::directions::run_directions;
use dmw_experiments::scalability::{run_scalability, timing_key};
use dmw_experiments::tradeoff::run_tradeoff;
use dmw_experiments::twosample::run_twosample;
use dmw_experiments::Config;
use rand::Rng;

/// Exact DMW₃,₁ of the four-point counterexample pair, pinned as a regression value.
const COUNTEREXAMPLE_ORDER3: f64 = 0.0625;

type Outcome = Result<String, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dmw_err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// A random space on `m` points; odd seeds also get a random measure.
fn random_space(m: usize, seed: RngSeed) -> MetricMeasureSpace {
    let s = random_euclidean_space(m, 2, seed).unwrap();
    if seed.value().is_multiple_of(2) {
        return s;
    }
    let mut rng = seed.child(99).rng();
    let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = w.iter().sum();
    MetricMeasureSpace::new(s.distances().to_vec(), w.iter().map(|v| v / total).collect()).unwrap()
}

fn counterexample_signature() -> Outcome {
    let (x, y) = (counterexample_x(), counterexample_y());
    let d2 = exact_dmw(&x, &y, 2, 1.0).map_err(dmw_err)?.value;
    let d3 = exact_dmw(&x, &y, 3, 1.0).map_err(dmw_err)?.value;
    ensure(d2 <= 1e-9 && d3 >= 1e-3 && (d3 - COUNTEREXAMPLE_ORDER3).abs() <= 1e-9, format!("order 2 = {d2:.3e}, order 3 = {d3:.12}"))
}

fn hierarchy_monotone() -> Outcome {
    let mut worst = 0.0_f64;
    let mut bad = 0;
    for t in 0..50 {
        let root = RngSeed(1000 + t);
        let x = random_euclidean_space(4, 2, root.child(0)).map_err(dmw_err)?;
        let y = random_euclidean_space(4, 2, root.child(1)).map_err(dmw_err)?;
        let report = hierarchy_check(&x, &y, &[2, 3, 4], 1.0).map_err(dmw_err)?;
        worst = worst.max(report.worst_drop);
        bad += usize::from(!report.monotone);
    }
    ensure(bad == 0, format!("{bad}/50 pairs drop by more than {HIERARCHY_SLACK:e}; worst drop {worst:.2e}"))
}

fn gw_sandwich() -> Outcome {
    let (mut perm_bad, mut ent_bad, mut slack) = (0, 0, f64::INFINITY);
    for t in 0..100 {
        let root = RngSeed(2000 + t);
        let x = random_euclidean_space(5, 2, root.child(0)).map_err(dmw_err)?;
        let y = random_euclidean_space(5, 2, root.child(1)).map_err(dmw_err)?;
        let upper = gw_permutation_min(&x, &y, 1.0).map_err(dmw_err)?.value;
        let entropic = if t < 20 { Some(gw_entropic(&x, &y, &EntropicGwConfig::new(1.0, 0.01)).map_err(dmw_err)?.value) } else { None };
        for n in [2, 3] {
            let d = exact_dmw(&x, &y, n, 1.0).map_err(dmw_err)?.value;
            perm_bad += usize::from(d > upper + 1e-9);
            slack = slack.min(upper - d);
            if let Some(e) = entropic {
                ent_bad += usize::from(d > e + 1e-6);
            }
        }
    }
    ensure(
        perm_bad == 0 && ent_bad == 0,
        format!("permutation violations {perm_bad}/200, entropic violations {ent_bad}/40, tightest gap {slack:.3e}"),
    )
}

fn ot_oracles() -> Outcome {
    let mut rng = RngSeed(3000).rng();
    let mut worst_1d = 0.0_f64;
    for t in 0..500 {
        let (k1, k2) = if t % 2 == 0 {
            let k = rng.random_range(1..=12);
            (k, k)
        } else {
            (rng.random_range(1..=12), rng.random_range(1..=12))
        };
        let p = [1.0, 1.5, 2.0, 3.0][t % 4];
        let xs: Vec<f64> = (0..k1).map(|_| rng.random::<f64>()).collect();
        let ys: Vec<f64> = (0..k2).map(|_| rng.random::<f64>()).collect();
        let (a, b) = if t % 4 < 2 {
            (vec![1.0 / k1 as f64; k1], vec![1.0 / k2 as f64; k2])
        } else {
            let mut w = |k: usize| {
                let v: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
                let s: f64 = v.iter().sum();
                v.into_iter().map(|x| x / s).collect::<Vec<_>>()
            };
            (w(k1), w(k2))
        };
        let simplex = exact_ot(&CostMatrix::abs_power(&xs, &ys, p).map_err(dmw_err)?, &a, &b).map_err(dmw_err)?.cost();
        let mx = DiscreteMeasure1D::new(xs.clone(), a).map_err(dmw_err)?;
        let my = DiscreteMeasure1D::new(ys.clone(), b).map_err(dmw_err)?;
        let mut sorted = w1d_pth_power(&mx, &my, p).map_err(dmw_err)?;
        if k1 == k2 && t % 4 < 2 {
            let (mut sx, mut sy) = (xs, ys);
            sx.sort_by(f64::total_cmp);
            sy.sort_by(f64::total_cmp);
            let direct = sorted_uniform_cost(&sx, &sy, p);
            worst_1d = worst_1d.max((direct - simplex).abs());
            sorted = direct;
        }
        worst_1d = worst_1d.max((sorted - simplex).abs());
    }
    let mut worst_assign = 0.0_f64;
    for _ in 0..200 {
        let k = rng.random_range(1..=12);
        let cost = CostMatrix::new(k, k, (0..k * k).map(|_| rng.random::<f64>()).collect()).map_err(dmw_err)?;
        let u = vec![1.0 / k as f64; k];
        let fast = assignment_ot(&cost).map_err(dmw_err)?.cost();
        worst_assign = worst_assign.max((fast - exact_ot(&cost, &u, &u).map_err(dmw_err)?.cost()).abs());
    }
    let (mut sink_bad, mut worst_ratio) = (0, 0.0_f64);
    for _ in 0..20 {
        let (k1, k2) = (rng.random_range(2..=12), rng.random_range(2..=12));
        let cost = CostMatrix::new(k1, k2, (0..k1 * k2).map(|_| rng.random::<f64>()).collect()).map_err(dmw_err)?;
        let (a, b) = (vec![1.0 / k1 as f64; k1], vec![1.0 / k2 as f64; k2]);
        let exact = exact_ot(&cost, &a, &b).map_err(dmw_err)?.cost();
        let k = k1.max(k2) as f64;
        let mut gaps = Vec::new();
        for eps in [0.1, 0.01, 0.001] {
            let (plan, _) = sinkhorn(&cost, &a, &b, &SinkhornConfig::new(eps)).map_err(dmw_err)?;
            let gap = plan.cost() - exact;
            let bound = 2.0 * eps * k.ln();
            worst_ratio = worst_ratio.max(gap / bound);
            sink_bad += usize::from(gap > bound || gap < -1e-6);
            gaps.push(gap);
        }
        sink_bad += usize::from(gaps[2] > gaps[0] + 1e-9);
    }
    ensure(
        worst_1d <= 1e-9 && worst_assign <= 1e-9 && sink_bad == 0,
        format!(
            "1D vs simplex {worst_1d:.1e}, assignment vs simplex {worst_assign:.1e}, Sinkhorn violations {sink_bad}, worst gap/bound {worst_ratio:.2}"
        ),
    )
}

fn error_decomposition() -> Outcome {
    let (mut bad, mut tightest) = (0, f64::INFINITY);
    for t in 0..50 {
        let root = RngSeed(4000 + t);
        let order = 2 + (t as usize % 2);
        let x = random_space(3 + (t as usize % 2), root.child(0));
        let y = random_space(4, root.child(1));
        let exact = exact_dmw(&x, &y, order, 1.0).map_err(dmw_err)?.value;
        let (ex, ey) = (enumerate_matrix_law(&x, order).map_err(dmw_err)?, enumerate_matrix_law(&y, order).map_err(dmw_err)?);
        let sx = sample_matrix_law(&x, order, 200, root.child(2)).map_err(dmw_err)?;
        let sy = sample_matrix_law(&y, order, 200, root.child(3)).map_err(dmw_err)?;
        let estimate = empirical_dmw(&sx, &sy, 1.0, &OtSolver::Exact).map_err(dmw_err)?.value;
        let bound = law_distance(&sx, &ex, 1.0).map_err(dmw_err)? + law_distance(&sy, &ey, 1.0).map_err(dmw_err)?;
        let err = (estimate - exact).abs();
        bad += usize::from(err > bound + 1e-12);
        tightest = tightest.min(bound - err);
    }
    ensure(bad == 0, format!("{bad}/50 violations, smallest margin {tightest:.2e}"))
}

fn sliced_lower_bound() -> Outcome {
    let (mut bad, mut total, mut margin) = (0, 0, f64::INFINITY);
    for t in 0..10 {
        let root = RngSeed(5000 + t);
        let order = 2 + (t as usize % 2);
        let x = random_space(4, root.child(0));
        let y = random_space(4, root.child(1));
        let exact = exact_dmw(&x, &y, order, 1.0).map_err(dmw_err)?.value;
        let (lx, ly) = (enumerate_matrix_law(&x, order).map_err(dmw_err)?, enumerate_matrix_law(&y, order).map_err(dmw_err)?);
        let dirs = DirectionSet::sample(order, 100, 1.0, DirectionMode::Dual, root.child(2)).map_err(dmw_err)?;
        for c in per_direction_costs(&lx, &ly, &dirs).map_err(dmw_err)? {
            total += 1;
            bad += usize::from(c > exact + 1e-9);
            margin = margin.min(exact - c);
        }
    }
    ensure(bad == 0, format!("{bad}/{total} directions exceed exact DMW; smallest margin {margin:.2e}"))
}

fn direction_concentration() -> Outcome {
    let mut cfg = Config::default().directions;
    cfg.direction_counts = vec![8, 64, 512];
    cfg.normalize = true;
    cfg.mode = dmw_experiments::config::Mode::Dual;
    let out = run_directions(&cfg, 42).map_err(dmw_err)?;
    let mut parts = Vec::new();
    let mut ok = true;
    for r in &out.records {
        ok &= r.std_statistic <= 1.5 * r.bound;
        parts.push(format!("L={} std {:.2e} vs 1.5·bound {:.2e}", r.directions, r.std_statistic, 1.5 * r.bound));
    }
    ensure(ok && out.records.len() == 3, parts.join("; "))
}

fn kernel_psd() -> Outcome {
    let m = 12;
    let (mut bad, mut lowest) = (0, f64::INFINITY);
    let cfg = KernelSketchConfig::new(ScaleWeights::uniform(vec![2, 3, 4]).map_err(dmw_err)?, 100, 32, DirectionMode::Euclidean);
    for c in 0..50 {
        let root = RngSeed(6000 + c);
        let spaces: Vec<MetricMeasureSpace> = (0..m).map(|i| random_space(4 + (i + c as usize) % 7, root.child(i as u64))).collect();
        let d = msdmw_dissimilarity_matrix(&spaces, &cfg, root.child(100)).map_err(dmw_err)?;
        for lambda in [0.5, 1.0, 2.0] {
            let ev = gram_from_dissimilarity(&d, lambda).map_err(dmw_err)?.min_eigenvalue();
            lowest = lowest.min(ev);
            bad += usize::from(ev < -1e-8 * m as f64);
        }
    }
    ensure(bad == 0, format!("{bad}/150 Gram matrices below tolerance; lowest eigenvalue {lowest:.3e}"))
}

fn permutation_validity() -> Outcome {
    let mut cfg = Config::default().twosample;
    cfg.permutations = 199;
    cfg.alpha = 0.05;
    cfg.group_sizes = vec![32];
    cfg.shifts = vec![0.0];
    cfg.trials = 200;
    let null = run_twosample(&cfg, 42).map_err(dmw_err)?.records[0].rejection_rate;
    cfg.shifts = vec![0.08];
    cfg.trials = 40;
    let power = run_twosample(&cfg, 43).map_err(dmw_err)?.records[0].rejection_rate;
    ensure(
        (0.01..=0.12).contains(&null) && power >= 0.9,
        format!("null rejection {null:.3} over 200 trials, power {power:.3} over 40 trials"),
    )
}

fn cost_model_bands() -> Outcome {
    let cfg = Config::default().scalability;
    let out = run_scalability(&cfg, 42).map_err(dmw_err)?;
    let secs = |key: &str, phase: &str| {
        out.timings
            .iter()
            .find(|t| t.key == key && t.phase == phase)
            .map(|t| t.seconds)
            .ok_or_else(|| format!("missing timing {key} {phase}"))
    };
    let sliced = |m: usize, k: usize, l: usize| -> Result<f64, String> {
        let key = timing_key("sliced", m, Some(k), Some(l));
        Ok(secs(&key, "sampling")? + secs(&key, "slicing")?)
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for w in cfg.direction_sweep.windows(2).filter(|w| w[1] == 2 * w[0]) {
        let slicing = |l| secs(&timing_key("sliced", cfg.sweep_nodes, Some(cfg.tuples), Some(l)), "slicing");
        let r = slicing(w[1])? / slicing(w[0])?;
        ok &= (1.5..=3.0).contains(&r);
        parts.push(format!("L {}→{}: {r:.2}", w[0], w[1]));
    }
    for w in cfg.node_counts.windows(2).filter(|w| w[1] == 2 * w[0]) {
        let r = sliced(w[1], cfg.tuples, cfg.directions)? / sliced(w[0], cfg.tuples, cfg.directions)?;
        ok &= r <= 1.5;
        parts.push(format!("nodes {}→{}: {r:.2}", w[0], w[1]));
    }
    ensure(ok && parts.len() >= 4, parts.join(", "))
}

fn tradeoff_trend() -> Outcome {
    let cfg = Config::default().tradeoff;
    let out = run_tradeoff(&cfg, 42).map_err(dmw_err)?;
    let gap = |n: usize| out.records.iter().find(|r| r.order == n).map(|r| r.mean_gap).ok_or(format!("no record at order {n}"));
    let (g2, g12) = (gap(2)?, gap(12)?);
    ensure(g12 < g2, format!("reference gap {g2:.4} at order 2, {g12:.4} at order 12"))
}

fn record_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.file_stem().unwrap().to_string_lossy().ends_with("_timings"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(dmw_err)?;
    common::write_toy_dataset(tmp.path());
    let config = tmp.path().join("small.toml");
    let toml = format!("{}dataset_dir = {:?}\n", common::SMALL_CONFIG, tmp.path());
    fs::write(&config, toml).map_err(dmw_err)?;
    let subcommands = ["tradeoff", "directions", "scalability", "twosample", "hierarchy", "counterexample", "kernel-export"];
    let mut compared = 0;
    for format in ["csv", "json"] {
        for cmd in subcommands {
            let mut runs = Vec::new();
            for rep in 0..2 {
                let out = tmp.path().join(format!("{cmd}-{format}-{rep}"));
                let status = Command::new(env!("CARGO_BIN_EXE_dmw"))
                    .args(["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", format, cmd])
                    .output()
                    .map_err(dmw_err)?;
                if !status.status.success() {
                    return Err(format!("{cmd} failed: {}", String::from_utf8_lossy(&status.stderr)));
                }
                runs.push(record_files(&out));
            }
            if runs[0] != runs[1] {
                return Err(format!("{cmd} ({format}) output differs between identical runs"));
            }
            compared += runs[0].len();
        }
    }
    ensure(compared > 0, format!("{compared} files byte-identical across re-runs of 7 subcommands in 2 formats"))
}

const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, name: "counterexample signature", budget: Duration::from_secs(1), run: counterexample_signature },
    Criterion { id: 2, name: "hierarchy monotonicity", budget: Duration::from_secs(120), run: hierarchy_monotone },
    Criterion { id: 3, name: "GW sandwich", budget: Duration::from_secs(300), run: gw_sandwich },
    Criterion { id: 4, name: "OT oracle equivalence", budget: Duration::from_secs(120), run: ot_oracles },
    Criterion { id: 5, name: "empirical error decomposition", budget: Duration::from_secs(180), run: error_decomposition },
    Criterion { id: 6, name: "sliced lower bound", budget: Duration::from_secs(60), run: sliced_lower_bound },
    Criterion { id: 7, name: "finite-direction concentration", budget: Duration::from_secs(120), run: direction_concentration },
    Criterion { id: 8, name: "kernel PSD", budget: Duration::from_secs(300), run: kernel_psd },
    Criterion { id: 9, name: "permutation test validity", budget: Duration::from_secs(900), run: permutation_validity },
    Criterion { id: 10, name: "cost-model bands", budget: Duration::from_secs(600), run: cost_model_bands },
    Criterion { id: 11, name: "tradeoff trend", budget: Duration::from_secs(600), run: tradeoff_trend },
    Criterion { id: 12, name: "CLI determinism", budget: Duration::from_secs(600), run: cli_determinism },
];

fn main() -> ExitCode {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in CRITERIA.iter().filter(|c| wanted.is_empty() || wanted.contains(&c.id)) {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {}s budget", c.budget.as_secs())),
            Err(d) => (false, d),
        };
        failed += usize::from(!pass);
        println!("{} {:>2} {}: {} [{:.2}s]", if pass { "PASS" } else { "FAIL" }, c.id, c.name, detail, elapsed.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
