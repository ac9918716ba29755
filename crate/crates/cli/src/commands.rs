use std::path::{Path, PathBuf};

use mse_region::boundary::{
    Curvature, CAUCHY_SCHWARZ_REL_TOL, COLINEAR_REL_TOL, DISCRIMINANT_REL_TOL,
};
use mse_region::counterexample::{self, SuiteOptions};
use mse_region::io::{write_boundary_csv, write_region_csv};
use mse_region::kkt::{SolverOptions, CLUSTER_REL_RADIUS, TOL_KKT};
use mse_region::model::FEASIBILITY_REL_TOL;
use mse_region::random::{colinear_two_user, gaussian_two_user, random_config};
use mse_region::region::{TOL_ENDPOINT, TOL_MEMBER};
use mse_region::{
    enumerate_stationary_points, sample_region, segment_test, ChannelSet, ConvexityReport,
    MembershipOptions, MseTuple, SamplingMode, SystemConfig, TwoUserChannel, WeightVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult, Outcome};
use crate::input::{load_channels, parse_real_list};
use crate::manifest::{emit, sidecar_path, to_json, RunManifest, Sigma2};
use crate::plot;
use crate::{ChannelArgs, SystemArgs};

fn config(system: SystemArgs) -> CliResult<SystemConfig<f64>> {
    Ok(SystemConfig::new(system.sigma2, system.power)?)
}

fn channels_with_inputs(
    args: &ChannelArgs,
    mut manifest: RunManifest,
) -> CliResult<(ChannelSet<f64>, RunManifest)> {
    let h = load_channels(args.channels.as_deref(), args.h1.as_deref(), args.h2.as_deref())?;
    manifest = match (&args.channels, &args.h1, &args.h2) {
        (Some(path), _, _) => manifest.input(path.display().to_string()),
        (None, Some(a), Some(b)) => manifest.input(format!("--h1 {a}")).input(format!("--h2 {b}")),
        _ => manifest,
    };
    Ok((h, manifest))
}

fn write_csv(path: Option<&Path>, fill: impl FnOnce(&mut Vec<u8>) -> mse_region::Result<()>) -> CliResult<()> {
    let mut buf = Vec::new();
    fill(&mut buf).map_err(|e| CliError::Failed(e.to_string()))?;
    emit(path, &buf)
}

#[derive(Serialize)]
struct BoundarySummary {
    classification: Curvature,
    samples: usize,
    eps_min1: f64,
    eps_min2: f64,
}

pub fn boundary(
    channels: &ChannelArgs,
    system: SystemArgs,
    samples: usize,
    out: Option<&Path>,
    plot_path: Option<&Path>,
) -> CliResult<Outcome> {
    let manifest = RunManifest::new("boundary", 0, system.sigma2)
        .tolerance("discriminant_rel", DISCRIMINANT_REL_TOL)
        .tolerance("cauchy_schwarz_rel", CAUCHY_SCHWARZ_REL_TOL)
        .tolerance("colinear_rel", COLINEAR_REL_TOL);
    let (h, manifest) = channels_with_inputs(channels, manifest)?;
    if h.users() != 2 {
        return Err(CliError::input(format!(
            "boundary needs exactly 2 users, the channel has {}",
            h.users()
        )));
    }
    let cfg = config(system)?;
    let ch = TwoUserChannel::from_channel_set(&h)?;
    let sweep = ch.boundary_sweep(&cfg, samples)?;
    write_csv(out, |buf| write_boundary_csv(buf, &sweep))?;

    let summary = BoundarySummary {
        classification: ch.classify(),
        samples,
        eps_min1: sweep[sweep.len() - 1].eps1,
        eps_min2: sweep[0].eps2,
    };
    eprintln!(
        "classification: {}  eps_min1: {}  eps_min2: {}",
        summary.classification, summary.eps_min1, summary.eps_min2
    );
    if let Some(out) = out {
        emit(Some(&sidecar_path(out)), to_json(&manifest, &summary)?.as_bytes())?;
        if let Some(p) = plot_path {
            let script = plot::boundary_script(out, summary.eps_min1, summary.eps_min2);
            emit(Some(p), script.as_bytes())?;
        }
    }
    Ok(Outcome::Success)
}

pub struct ScanArgs {
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
    pub grid: usize,
    pub colinear: bool,
    pub system: SystemArgs,
    pub random_config: bool,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ScanTrial {
    trial: usize,
    sigma2: f64,
    power: f64,
    report: ConvexityReport<f64>,
}

#[derive(Serialize)]
struct ScanResult {
    trials: usize,
    dim: usize,
    grid: usize,
    colinear: bool,
    certified: usize,
    all_certified: bool,
    affine: usize,
    /// Largest normalized discriminant over all trials.
    worst_discriminant: f64,
    worst_trial: usize,
    worst_summand: f64,
    per_trial: Vec<ScanTrial>,
}

pub fn convexity_scan(args: &ScanArgs) -> CliResult<Outcome> {
    if args.grid < 11 {
        return Err(CliError::input(format!("--grid must be at least 11, got {}", args.grid)));
    }
    let fixed = config(args.system)?;
    let sigma2 = if args.random_config {
        Sigma2::Drawn("log-uniform on [0.1, 10] per trial".into())
    } else {
        Sigma2::Fixed(args.system.sigma2)
    };
    let manifest = RunManifest::with_sigma2("convexity-scan", args.seed, sigma2)
    .tolerance("discriminant_rel", DISCRIMINANT_REL_TOL)
    .tolerance("cauchy_schwarz_rel", CAUCHY_SCHWARZ_REL_TOL)
    .tolerance("colinear_rel", COLINEAR_REL_TOL);

    // instances are drawn in order before the parallel section
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut instances: Vec<(TwoUserChannel<f64>, SystemConfig<f64>)> = Vec::with_capacity(args.trials);
    for _ in 0..args.trials {
        let ch = if args.colinear {
            colinear_two_user(&mut rng, args.dim)?.0
        } else {
            gaussian_two_user(&mut rng, args.dim)?
        };
        let cfg = if args.random_config { random_config(&mut rng)? } else { fixed };
        instances.push((ch, cfg));
    }
    let per_trial = instances
        .par_iter()
        .enumerate()
        .map(|(trial, (ch, cfg))| {
            Ok(ScanTrial {
                trial,
                sigma2: cfg.noise_variance(),
                power: cfg.power_budget(),
                report: ch.convexity_certificate(cfg, args.grid)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;

    let (worst_trial, worst) = per_trial
        .iter()
        .map(|t| t.report.worst_discriminant)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    let certified = per_trial.iter().filter(|t| t.report.certified).count();
    let result = ScanResult {
        trials: args.trials,
        dim: args.dim,
        grid: args.grid,
        colinear: args.colinear,
        certified,
        all_certified: certified == args.trials,
        affine: per_trial
            .iter()
            .filter(|t| t.report.classification == Curvature::Affine)
            .count(),
        worst_discriminant: worst,
        worst_trial,
        worst_summand: per_trial
            .iter()
            .map(|t| t.report.worst_summand)
            .fold(f64::NEG_INFINITY, f64::max),
        per_trial,
    };
    eprintln!(
        "certified {}/{}  worst normalized discriminant {:e} (trial {})",
        result.certified, result.trials, result.worst_discriminant, result.worst_trial
    );
    emit(args.out.as_deref(), to_json(&manifest, &result)?.as_bytes())?;
    Ok(if result.all_certified { Outcome::Success } else { Outcome::Failed })
}

pub struct CounterexampleArgs {
    pub out: Option<PathBuf>,
    pub starts: usize,
    pub seed: u64,
    pub steps: usize,
    pub region_csv: Option<PathBuf>,
    pub grid: usize,
    pub plot: Option<PathBuf>,
}

pub fn counterexample(args: &CounterexampleArgs) -> CliResult<Outcome> {
    let opts = SuiteOptions {
        starts: args.starts,
        seed: args.seed,
        segment_steps: args.steps,
        solver: SolverOptions::default(),
        membership: MembershipOptions { seed: args.seed, ..MembershipOptions::default() },
    };
    let mut manifest = RunManifest::new("counterexample", args.seed, counterexample::ASSUMED_NOISE_VARIANCE)
        .tolerance("kkt", TOL_KKT)
        .tolerance("cluster_rel_radius", CLUSTER_REL_RADIUS)
        .tolerance("member", TOL_MEMBER)
        .tolerance("endpoint", TOL_ENDPOINT)
        .tolerance("power", counterexample::POWER_TOL)
        .tolerance("multiplier", counterexample::MULTIPLIER_TOL)
        .tolerance("mse", counterexample::MSE_TOL)
        .tolerance("reference_residual", counterexample::REFERENCE_RESIDUAL_TOL);
    let report = counterexample::counterexample_suite(&opts)?;

    if let Some(csv) = &args.region_csv {
        let set = sample_region(
            &counterexample::channel(),
            &counterexample::config(),
            args.grid,
            SamplingMode::Grid,
            args.seed,
        )?;
        write_csv(Some(csv), |buf| write_region_csv(buf, &set))?;
        manifest = manifest.input(format!("region grid {}", args.grid));
        if let (Some(p), [a, b, ..]) = (&args.plot, report.clusters.as_slice()) {
            emit(Some(p), plot::region_script(csv, &a.mse, &b.mse).as_bytes())?;
        }
    }
    for c in &report.checks {
        eprintln!("{} {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
    }
    emit(args.out.as_deref(), to_json(&manifest, &report)?.as_bytes())?;
    Ok(if report.all_pass { Outcome::Success } else { Outcome::Failed })
}

#[derive(Serialize)]
struct WsmseResult<'a> {
    weights: &'a [f64],
    power: f64,
    starts: usize,
    cluster_count: usize,
    #[serde(flatten)]
    points: &'a mse_region::StationaryPoints<f64>,
}

pub fn wsmse(
    channels: &ChannelArgs,
    weights: &str,
    system: SystemArgs,
    starts: usize,
    seed: u64,
    out: Option<&Path>,
) -> CliResult<Outcome> {
    let manifest = RunManifest::new("wsmse", seed, system.sigma2)
        .tolerance("kkt", TOL_KKT)
        .tolerance("cluster_rel_radius", CLUSTER_REL_RADIUS);
    let (h, manifest) = channels_with_inputs(channels, manifest)?;
    let w = WeightVector::new(parse_real_list(weights)?)?;
    if w.len() != h.users() {
        return Err(CliError::input(format!(
            "{} weights given for {} users",
            w.len(),
            h.users()
        )));
    }
    let cfg = config(system)?;
    let points = enumerate_stationary_points(&h, &cfg, &w, starts, seed, &SolverOptions::default())?;
    let result = WsmseResult {
        weights: w.as_slice(),
        power: system.power,
        starts,
        cluster_count: points.clusters.len(),
        points: &points,
    };
    eprintln!("{} stationary cluster(s), objectives {:?}", result.cluster_count, points.objectives());
    emit(out, to_json(&manifest, &result)?.as_bytes())?;
    Ok(Outcome::Success)
}

pub fn segment(
    channels: &ChannelArgs,
    system: SystemArgs,
    a: &str,
    b: &str,
    steps: usize,
    seed: u64,
    out: Option<&Path>,
) -> CliResult<Outcome> {
    let manifest = RunManifest::new("segment", seed, system.sigma2)
        .tolerance("member", TOL_MEMBER)
        .tolerance("endpoint", TOL_ENDPOINT);
    let (h, manifest) = channels_with_inputs(channels, manifest)?;
    let a = MseTuple::new(parse_real_list(a)?)?;
    let b = MseTuple::new(parse_real_list(b)?)?;
    for (name, t) in [("--a", &a), ("--b", &b)] {
        if t.len() != h.users() {
            return Err(CliError::input(format!(
                "{name} has {} entries for {} users",
                t.len(),
                h.users()
            )));
        }
    }
    let cfg = config(system)?;
    let opts = MembershipOptions { seed, ..MembershipOptions::default() };
    let report = segment_test(&h, &cfg, &a, &b, steps, &opts)?;
    eprintln!(
        "nonconvex_witness: {}  smallest interior margin: {:e}",
        report.nonconvex_witness,
        report.steps.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min)
    );
    emit(out, to_json(&manifest, &report)?.as_bytes())?;
    Ok(if report.nonconvex_witness { Outcome::Witness } else { Outcome::Success })
}

#[derive(Serialize)]
struct RegionResult {
    csv: String,
    mode: SamplingMode,
    resolution: usize,
    points: usize,
    users: usize,
    power: f64,
}

pub fn region(
    channels: &ChannelArgs,
    system: SystemArgs,
    grid: Option<usize>,
    random: Option<usize>,
    seed: u64,
    out: &Path,
) -> CliResult<Outcome> {
    let manifest = RunManifest::new("region", seed, system.sigma2)
        .tolerance("feasibility_rel", FEASIBILITY_REL_TOL);
    let (h, manifest) = channels_with_inputs(channels, manifest)?;
    let cfg = config(system)?;
    let (mode, resolution) = match (grid, random) {
        (Some(r), None) => (SamplingMode::Grid, r),
        (None, Some(n)) => (SamplingMode::Random, n),
        _ => return Err(CliError::input("give exactly one of --grid and --random")),
    };
    let set = sample_region(&h, &cfg, resolution, mode, seed)?;
    write_csv(Some(out), |buf| write_region_csv(buf, &set))?;
    let result = RegionResult {
        csv: out.display().to_string(),
        mode,
        resolution,
        points: set.points.len(),
        users: h.users(),
        power: system.power,
    };
    emit(Some(&sidecar_path(out)), to_json(&manifest, &result)?.as_bytes())?;
    eprintln!("{} points written to {}", result.points, result.csv);
    Ok(Outcome::Success)
}
