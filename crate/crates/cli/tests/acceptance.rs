//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use mse_region::boundary::{affine_boundary, convexity_discriminant, mse_first_derivatives, mse_second_derivatives, Curvature};
use mse_region::counterexample::{self, counterexample_suite, SuiteOptions, SuiteReport, REFERENCE};
use mse_region::kkt::{enumerate_stationary_points, SolverOptions};
use mse_region::random::{colinear_two_user, gaussian_channel_set, gaussian_two_user, random_config};
use mse_region::region::{margin_at, MembershipOptions, TOL_MEMBER};
use mse_region::simplex::{uniform_in_budget, Lattice};
use mse_region::{
    embed_inactive_users, segment_test, weighted_mse_gradient, weighted_sum_mse, ChannelSet, MseTuple,
    PowerAllocation, ReceiveSolve, SystemConfig, TwoUserChannel, WeightVector,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tempfile::TempDir;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite() -> SuiteReport {
    counterexample_suite(&SuiteOptions::default()).expect("suite runs")
}

fn check_named<'a>(r: &'a SuiteReport, name: &str) -> &'a counterexample::Check {
    r.checks.iter().find(|c| c.name == name).expect("check exists")
}

fn c1_objectives() -> Verdict {
    let h = counterexample::channel();
    let cfg = counterexample::config();
    let w = counterexample::weights();
    let mut slowest = Duration::ZERO;
    let mut seen = Vec::new();
    for seed in 0..5 {
        let start = Instant::now();
        let found = enumerate_stationary_points(&h, &cfg, &w, 64, seed, &SolverOptions::default())
            .map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        let obj = found.objectives();
        ensure(obj.len() == 2, || format!("seed {seed}: {} clusters {obj:?}", obj.len()))?;
        ensure((obj[0] - 0.36078).abs() <= 1e-4, || format!("seed {seed}: objective {}", obj[0]))?;
        ensure((obj[1] - 0.3828).abs() <= 5e-4, || format!("seed {seed}: objective {}", obj[1]))?;
        seen = obj;
    }
    ensure(slowest < Duration::from_secs(5), || format!("slowest run {slowest:?}"))?;
    Ok(format!(
        "2 clusters for each of seeds 0-4, objectives {:.6} / {:.6}, slowest {:.2?}",
        seen[0], seen[1], slowest
    ))
}

fn c2_powers_and_multipliers() -> Verdict {
    let r = suite();
    let mut detail = Vec::new();
    for i in 1..=2 {
        for name in ["powers", "lambda", "mu", "reference_kkt_residual"] {
            let c = check_named(&r, &format!("{name}_{i}"));
            ensure(c.pass, || format!("{} computed {:?} reference {:?}", c.name, c.computed, c.reference))?;
        }
        let cert = &r.clusters[i - 1];
        let res = check_named(&r, &format!("reference_kkt_residual_{i}")).computed[0];
        detail.push(format!(
            "lambda {:.5} mu {:?} reference residual {:.1e}",
            cert.lambda,
            cert.mu.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>(),
            res
        ));
    }
    Ok(detail.join("; "))
}

fn c3_mse_triples() -> Verdict {
    let r = suite();
    for i in 1..=2 {
        let c = check_named(&r, &format!("mse_{i}"));
        ensure(c.pass, || format!("{} computed {:?}", c.name, c.computed))?;
    }
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
    Ok(format!("({}) and ({})", fmt(&r.clusters[0].mse), fmt(&r.clusters[1].mse)))
}

/// Minimax margin by the resolution-200 lattice, refined by shrinking
/// lattice searches around the best lattice points.
fn grid_margin(h: &ChannelSet<f64>, cfg: &SystemConfig<f64>, target: &[f64]) -> f64 {
    const GRID: usize = 200;
    let budget = cfg.power_budget();
    let step = budget / GRID as f64;
    let mut scored: Vec<(f64, [f64; 3])> = Lattice::new(3, GRID)
        .map(|i| {
            let p = [i[0] as f64 * step, i[1] as f64 * step, i[2] as f64 * step];
            (margin_at(h, cfg, target, &p).unwrap(), p)
        })
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let feasible = |p: &[f64; 3]| p.iter().all(|x| *x >= 0.0) && p.iter().sum::<f64>() <= budget * (1.0 + 1e-12);
    let mut best = scored[0].0;
    for &(mut value, mut center) in scored.iter().take(8) {
        let mut delta = step;
        while delta > budget * 1e-10 {
            let mut moved = false;
            for i in -3i32..=3 {
                for j in -3i32..=3 {
                    for k in -3i32..=3 {
                        let q = [
                            center[0] + f64::from(i) * delta / 3.0,
                            center[1] + f64::from(j) * delta / 3.0,
                            center[2] + f64::from(k) * delta / 3.0,
                        ];
                        if feasible(&q) {
                            let v = margin_at(h, cfg, target, &q).unwrap();
                            if v < value {
                                value = v;
                                center = q;
                                moved = true;
                            }
                        }
                    }
                }
            }
            if !moved {
                delta *= 0.5;
            }
        }
        best = best.min(value);
    }
    best
}

fn min_power_for_sinr(h: &ChannelSet<f64>, cfg: &SystemConfig<f64>, gamma: &[f64]) -> Option<Vec<f64>> {
    let n = h.antennas();
    let users = h.users();
    let cols: Vec<DMatrix<Complex64>> = (0..users)
        .map(|k| DMatrix::from_column_slice(n, 1, h.column(k)))
        .collect();
    let mut p = vec![0.0; users];
    for _ in 0..200_000 {
        let next: Vec<f64> = (0..users)
            .map(|k| {
                if gamma[k] == 0.0 {
                    return 0.0;
                }
                let mut x = DMatrix::<Complex64>::identity(n, n) * Complex64::from(cfg.noise_variance());
                for j in (0..users).filter(|j| *j != k) {
                    x += &cols[j] * cols[j].adjoint() * Complex64::from(p[j]);
                }
                let q = (cols[k].adjoint() * x.try_inverse().unwrap() * &cols[k])[(0, 0)].re;
                gamma[k] / q
            })
            .collect();
        if next.iter().sum::<f64>() > cfg.power_budget() * (1.0 + 1e-12) {
            return None;
        }
        let moved = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        p = next;
        if moved <= 1e-14 * cfg.power_budget() {
            break;
        }
    }
    Some(p)
}

/// Exact minimax margin by bisection on `s`: targets `t + s` are reachable
/// iff the SINR targets `1/(t_k + s) - 1` fit the budget.
fn exact_margin(h: &ChannelSet<f64>, cfg: &SystemConfig<f64>, target: &[f64]) -> f64 {
    let min_t = target.iter().copied().fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi) = (-min_t, 1.0 - min_t);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let gamma: Vec<f64> = target.iter().map(|t| (1.0 / (t + mid) - 1.0).max(0.0)).collect();
        if min_power_for_sinr(h, cfg, &gamma).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn c4_nonconvexity_witness() -> Verdict {
    let h = counterexample::channel();
    let cfg = counterexample::config();
    let r = suite();
    let a = MseTuple::new(r.clusters[0].mse.clone()).map_err(|e| e.to_string())?;
    let b = MseTuple::new(r.clusters[1].mse.clone()).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let report = segment_test(&h, &cfg, &a, &b, 9, &MembershipOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("segment test took {elapsed:?}"))?;
    ensure(report.nonconvex_witness, || "no witness".into())?;
    for s in &report.steps {
        ensure(!s.dominated && s.margin > TOL_MEMBER, || format!("t = {}: margin {}", s.t, s.margin))?;
    }
    let deviations: Vec<f64> = report
        .steps
        .par_iter()
        .map(|s| (s.margin - grid_margin(&h, &cfg, s.target.as_slice())).abs())
        .collect();
    let worst = deviations.iter().copied().fold(0.0, f64::max);
    ensure(worst <= 1e-3, || format!("grid oracle deviation {worst:e}"))?;
    let exact: Vec<f64> = report
        .steps
        .par_iter()
        .map(|s| (s.margin - exact_margin(&h, &cfg, s.target.as_slice())).abs())
        .collect();
    let exact_worst = exact.iter().copied().fold(0.0, f64::max);
    ensure(exact_worst <= 1e-6, || format!("exact oracle deviation {exact_worst:e}"))?;

    let pa = MseTuple::new(REFERENCE[0].mse.to_vec()).unwrap();
    let pb = MseTuple::new(REFERENCE[1].mse.to_vec()).unwrap();
    let rounded = segment_test(&h, &cfg, &pa, &pb, 9, &MembershipOptions::default()).map_err(|e| e.to_string())?;
    ensure(rounded.steps.iter().all(|s| !s.dominated), || "rounded triples: a step is dominated".into())?;
    let min_margin = report.steps.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
    Ok(format!(
        "9/9 interior points outside, margins {:.5}..{:.5}, grid-200 deviation {:.1e}, exact deviation {:.1e}, segment {:.2?}; rounded reference triples also witness",
        min_margin,
        report.steps.iter().map(|s| s.margin).fold(0.0, f64::max),
        worst,
        exact_worst,
        elapsed
    ))
}

fn c5_two_user_convexity() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let instances: Vec<(TwoUserChannel<f64>, SystemConfig<f64>)> = (0..1000)
        .map(|_| {
            let n = rng.random_range(2..=6);
            (gaussian_two_user(&mut rng, n).unwrap(), random_config(&mut rng).unwrap())
        })
        .collect();
    let worst = instances
        .par_iter()
        .enumerate()
        .map(|(trial, (ch, cfg))| -> Result<f64, String> {
            let mut worst = f64::NEG_INFINITY;
            for i in 1..100 {
                let p = cfg.power_budget() * i as f64 / 100.0;
                let b = ch.coupling_bundle(cfg, p).map_err(|e| e.to_string())?;
                let d = convexity_discriminant(&b, cfg);
                let tol = 1e-9 * d.scale;
                let (d1, _) = mse_first_derivatives(&b, cfg);
                let g2 = d.value / (d1 * d1 * d1);
                ensure(d.value <= tol, || format!("trial {trial} p {p}: discriminant {:e}", d.value))?;
                ensure(g2 >= -tol / d1.abs().powi(3), || format!("trial {trial} p {p}: g'' {g2:e}"))?;
                ensure(d.summands.iter().all(|s| *s <= tol), || format!("trial {trial} p {p}: summands {:?}", d.summands))?;
                ensure(b.checks().cauchy_schwarz(), || format!("trial {trial} p {p}: {:?}", b.checks()))?;
                worst = worst.max(d.normalized());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("1000 instances x 99 interior points, worst normalized discriminant {worst:.2e}, {elapsed:.2?}"))
}

fn richardson(f: impl Fn(f64) -> f64, x: f64, h: f64, second: bool) -> f64 {
    let d = |h: f64| {
        if second {
            (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
        } else {
            (f(x + h) - f(x - h)) / (2.0 * h)
        }
    };
    let (d0, d1, d2) = (d(h), d(h / 2.0), d(h / 4.0));
    let (r1, r2) = ((4.0 * d1 - d0) / 3.0, (4.0 * d2 - d1) / 3.0);
    (16.0 * r2 - r1) / 15.0
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn c6_derivatives() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut first, mut second) = (0.0f64, 0.0f64);
    for trial in 0..100 {
        let n = rng.random_range(2..=6);
        let ch: TwoUserChannel<f64> = gaussian_two_user(&mut rng, n).unwrap();
        let cfg: SystemConfig<f64> = random_config(&mut rng).unwrap();
        let budget = cfg.power_budget();
        let p = [0.1, 0.3, 0.5, 0.7, 0.9][trial % 5] * budget;
        let h = 0.05 * p.min(budget - p);
        let b = ch.coupling_bundle(&cfg, p).unwrap();
        let (d1, d2) = mse_first_derivatives(&b, &cfg);
        let (dd1, dd2) = mse_second_derivatives(&b, &cfg);
        let e1 = |q: f64| ch.mse_pair_at_power(&cfg, q).unwrap().0;
        let e2 = |q: f64| ch.mse_pair_at_power(&cfg, q).unwrap().1;
        first = first.max(rel(richardson(e1, p, h, false), d1)).max(rel(richardson(e2, p, h, false), d2));
        second = second.max(rel(richardson(e1, p, h, true), dd1)).max(rel(richardson(e2, p, h, true), dd2));
    }
    ensure(first <= 1e-6, || format!("first derivative rel err {first:e}"))?;
    ensure(second <= 1e-4, || format!("second derivative rel err {second:e}"))?;

    let mut grad = 0.0f64;
    for users in 1..=5 {
        for _ in 0..20 {
            let n = rng.random_range(1..=6);
            let h = gaussian_channel_set::<f64, _>(&mut rng, n, users).unwrap();
            let cfg: SystemConfig<f64> = random_config(&mut rng).unwrap();
            let w = WeightVector::new((0..users).map(|_| rng.random_range(0.1..1.0)).collect()).unwrap();
            let mut p = uniform_in_budget(&mut rng, users, 0.8 * cfg.power_budget());
            p.iter_mut().for_each(|x| *x += 0.02 * cfg.power_budget() / users as f64);
            let g = weighted_mse_gradient(&h, &PowerAllocation::new(p.clone(), &cfg).unwrap(), &cfg, &w).unwrap();
            for k in 0..users {
                let f = |x: f64| {
                    let mut q = p.clone();
                    q[k] = x;
                    weighted_sum_mse(&h, &PowerAllocation::new(q, &cfg).unwrap(), &cfg, &w).unwrap()
                };
                grad = grad.max((richardson(f, p[k], 0.05 * p[k], false) - g[k]).abs() / g[k].abs().max(1e-12));
            }
        }
    }
    ensure(grad <= 1e-6, || format!("gradient rel err {grad:e}"))?;
    Ok(format!("eps' rel err {first:.1e}, eps'' rel err {second:.1e}, K=1..5 gradient rel err {grad:.1e}"))
}

fn c7_closed_forms() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst_rel, mut worst_im, mut worst_prod) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let ch: TwoUserChannel<f64> = gaussian_two_user(&mut rng, n).unwrap();
        let cfg: SystemConfig<f64> = random_config(&mut rng).unwrap();
        let p = rng.random_range(0.01..0.99) * cfg.power_budget();
        let r = ch.closed_form_ratios(&cfg, p).unwrap();
        let c_rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm().max(1e-300);
        worst_rel = worst_rel.max(c_rel(r.ratio_a, r.direct_a)).max(c_rel(r.ratio_b, r.direct_b));
        worst_im = worst_im.max(r.product.im.abs());
        worst_prod = worst_prod.max(r.product.re);
    }
    ensure(worst_rel <= 1e-9, || format!("closed form rel err {worst_rel:e}"))?;
    ensure(worst_im <= 1e-10, || format!("product imaginary part {worst_im:e}"))?;
    ensure(worst_prod <= 1.0 + 1e-10, || format!("product {worst_prod}"))?;
    Ok(format!("rel err {worst_rel:.1e}, |Im product| {worst_im:.1e}, max product {worst_prod:.4}"))
}

fn c8_affine() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut line_err, mut disc_err) = (0.0f64, 0.0f64);
    for trial in 0..100 {
        let n = rng.random_range(1..=6);
        let (ch, alpha) = colinear_two_user::<f64, _>(&mut rng, n).unwrap();
        let cfg: SystemConfig<f64> = random_config(&mut rng).unwrap();
        ensure(ch.classify() == Curvature::Affine, || format!("trial {trial}: not classified affine"))?;
        let line = affine_boundary(ch.h1(), alpha, &cfg).unwrap();
        let n1: f64 = ch.h1().iter().map(|x| x.norm_sqr()).sum();
        let expected = 1.0 / (1.0 + cfg.snr() * n1);
        ensure(line.eps_min1 == expected, || format!("trial {trial}: eps_min1 {} vs {expected}", line.eps_min1))?;
        let sweep = ch.boundary_sweep(&cfg, 101).unwrap();
        for s in &sweep {
            line_err = line_err.max((s.eps2 - line.eval(s.eps1)).abs());
            if s.derivatives.is_some() {
                let d = convexity_discriminant(&ch.coupling_bundle(&cfg, s.p).unwrap(), &cfg);
                disc_err = disc_err.max(d.value.abs() / d.scale);
            }
        }
        let corner = sweep.last().unwrap().eps1;
        ensure((corner - expected).abs() <= 1e-12, || format!("trial {trial}: sweep corner {corner} vs {expected}"))?;
    }
    ensure(line_err <= 1e-9, || format!("distance to line {line_err:e}"))?;
    ensure(disc_err <= 1e-10, || format!("normalized discriminant {disc_err:e}"))?;
    Ok(format!("100 colinear instances, line distance {line_err:.1e}, normalized |discriminant| {disc_err:.1e}"))
}

fn c9_embedding() -> Verdict {
    let h = counterexample::channel();
    let cfg = counterexample::config();
    let r = suite();
    let a = MseTuple::new(r.clusters[0].mse.clone()).unwrap();
    let b = MseTuple::new(r.clusters[1].mse.clone()).unwrap();
    let mut margins = Vec::new();
    for extra in 1..=3 {
        let wide = embed_inactive_users(&h, extra);
        let powers = r.clusters[0].powers.zero_padded(extra);
        let base = ReceiveSolve::new(&h, r.clusters[0].powers.as_slice(), &cfg).unwrap().mse_values();
        let padded = ReceiveSolve::new(&wide, powers.as_slice(), &cfg).unwrap().mse_values();
        ensure(base.iter().zip(&padded).all(|(x, y)| (x - y).abs() <= 1e-12), || format!("extra {extra}: MSE changed"))?;
        let report = segment_test(&wide, &cfg, &a.one_padded(extra), &b.one_padded(extra), 9, &MembershipOptions::default())
            .map_err(|e| e.to_string())?;
        ensure(report.steps.iter().all(|s| !s.dominated), || format!("extra {extra}: witness lost"))?;
        margins.push(report.steps.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min));
    }
    Ok(format!("witness persists with 1, 2, 3 silent users, smallest margins {margins:.5?}"))
}

fn run_cli(dir: &Path, threads: Option<&str>, args: &[&str]) -> (i32, Vec<u8>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mseregion"));
    cmd.current_dir(dir).env_remove("MSEREGION_SEED");
    if let Some(t) = threads {
        cmd.args(["--threads", t]);
    }
    let out = cmd.args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn c10_determinism() -> Verdict {
    let channel = r#"{"n":2,"k":3,"entries":[[[1,0],[0,0],[1,0]],[[0,0],[1,0],[1,0]]]}"#;
    let commands: Vec<Vec<&str>> = vec![
        vec!["boundary", "--h1", "0.3-1.2i,0.8+0.1i", "--h2", "1.1+0.4i,-0.6+0.9i", "--out", "b.csv", "--plot", "b.gp"],
        vec!["convexity-scan", "--trials", "50", "--dim", "3", "--seed", "3", "--random-config"],
        vec!["counterexample", "--seed", "4", "--region-csv", "r.csv", "--grid", "12", "--plot", "r.gp"],
        vec!["wsmse", "--channels", "h.json", "--weights", "0.22,0.54,0.24", "--seed", "5"],
        vec!["segment", "--channels", "h.json", "--a", "0.2139,0.1365,1", "--b", "1,0.1977,0.2335", "--seed", "6"],
        vec!["region", "--channels", "h.json", "--random", "500", "--seed", "7", "--out", "g.csv"],
    ];
    let mut snapshots = Vec::new();
    for threads in [None, Some("1"), Some("4"), None] {
        let dir = TempDir::new().map_err(|e| e.to_string())?;
        fs::write(dir.path().join("h.json"), channel).map_err(|e| e.to_string())?;
        let mut snap = Vec::new();
        for args in &commands {
            let (code, stdout) = run_cli(dir.path(), threads, args);
            ensure(code == 0 || code == 3, || format!("{} exited {code}", args[0]))?;
            snap.push((args[0].to_string(), code, stdout));
        }
        let mut files: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        for f in files {
            snap.push((f.file_name().unwrap().to_string_lossy().into_owned(), 0, fs::read(&f).unwrap()));
        }
        snapshots.push(snap);
    }
    for (i, snap) in snapshots.iter().enumerate().skip(1) {
        for (x, y) in snapshots[0].iter().zip(snap) {
            ensure(x == y, || format!("run {i}: {} differs", x.0))?;
        }
        ensure(snap.len() == snapshots[0].len(), || format!("run {i}: file sets differ"))?;
    }
    Ok(format!(
        "{} commands, {} outputs identical across default/1/4 threads and repeated runs",
        commands.len(),
        snapshots[0].len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("counterexample objectives", c1_objectives),
        ("counterexample powers and multipliers", c2_powers_and_multipliers),
        ("counterexample MSE triples", c3_mse_triples),
        ("nonconvexity witness", c4_nonconvexity_witness),
        ("two-user convexity", c5_two_user_convexity),
        ("derivative correctness", c6_derivatives),
        ("closed forms", c7_closed_forms),
        ("affine case", c8_affine),
        ("embedding", c9_embedding),
        ("determinism", c10_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {:>2} {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
