//! Achievable MSE region for any number of users.
//!
//! A target tuple `t` is *dominated-achievable* when some feasible `p` gives
//! `eps(p) <= t` componentwise. [`dominated_membership`] decides this by
//! minimizing the margin `F(p) = max_k (eps_k(p) - t_k)` over the power set:
//! log-sum-exp smoothing at decreasing temperatures gets close, and a
//! prox-linear polish on the exact max finishes at the kink.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ChannelSet, MseTuple, PowerAllocation, ReceiveSolve, SystemConfig};
use crate::optimize::{projected_gradient, PgOptions};
use crate::scalar::Real;
use crate::simplex::{lattice_count, project_onto_budget, project_onto_face, uniform_in_budget, Lattice};

/// Grids beyond this many points are refused.
pub const MAX_REGION_POINTS: u128 = 10_000_000;
/// `margin <= TOL_MEMBER` counts as dominated.
pub const TOL_MEMBER: f64 = 1e-6;
/// Segment endpoints may miss the region by this much, which admits tuples
/// quoted to four decimals.
pub const TOL_ENDPOINT: f64 = 1e-4;
pub const SMOOTHING_TEMPERATURES: [f64; 3] = [1e-1, 1e-2, 1e-3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    Grid,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionPoint<T> {
    pub powers: PowerAllocation<T>,
    pub mse: MseTuple<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSampleSet<T> {
    pub points: Vec<RegionPoint<T>>,
    pub resolution: usize,
    pub seed: u64,
    pub mode: SamplingMode,
}

/// Grid mode maps the lattice `{i * P_Tx / resolution : sum i <= resolution}`;
/// random mode maps `resolution` uniform draws from the power set.
pub fn sample_region<T: Real>(
    h: &ChannelSet<T>,
    cfg: &SystemConfig<T>,
    resolution: usize,
    mode: SamplingMode,
    seed: u64,
) -> Result<RegionSampleSet<T>> {
    if resolution < 2 {
        return Err(Error::OutOfRange(format!("resolution must be >= 2, got {resolution}")));
    }
    let users = h.users();
    let budget = cfg.power_budget();
    let powers: Vec<Vec<T>> = match mode {
        SamplingMode::Grid => {
            let count = lattice_count(users, resolution);
            if count > MAX_REGION_POINTS {
                return Err(Error::TooLarge(format!(
                    "a resolution-{resolution} grid over {users} users has {count} points \
                     (limit {MAX_REGION_POINTS}); use random sampling instead"
                )));
            }
            let step = budget / T::from_usize_lossy(resolution);
            Lattice::new(users, resolution)
                .map(|idx| idx.into_iter().map(|i| step * T::from_usize_lossy(i)).collect())
                .collect()
        }
        SamplingMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..resolution)
                .map(|_| uniform_in_budget(&mut rng, users, budget))
                .collect()
        }
    };
    let points = powers
        .into_par_iter()
        .map(|p| {
            let powers = PowerAllocation::new(p, cfg)?;
            let mse = crate::model::mse_tuple(h, &powers, cfg)?;
            Ok(RegionPoint { powers, mse })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionSampleSet {
        points,
        resolution,
        seed,
        mode,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipOptions {
    pub temperatures: Vec<f64>,
    pub tol_member: f64,
    pub tol_endpoint: f64,
    /// Seeded uniform starts in addition to the deterministic ones.
    pub random_starts: usize,
    pub seed: u64,
    pub smoothing: PgOptions,
    pub polish_iters: usize,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        Self {
            temperatures: SMOOTHING_TEMPERATURES.to_vec(),
            tol_member: TOL_MEMBER,
            tol_endpoint: TOL_ENDPOINT,
            random_starts: 4,
            seed: 0,
            smoothing: PgOptions {
                max_iters: 500,
                tol: 1e-10,
                ..PgOptions::default()
            },
            polish_iters: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipVerdict<T> {
    pub target: MseTuple<T>,
    /// Smallest `max_k(eps_k(p) - target_k)` found.
    pub margin: T,
    pub witness_powers: PowerAllocation<T>,
    pub dominated: bool,
}

/// Exact margin `max_k(eps_k(p) - t_k)`.
pub fn margin_at<T: Real>(
    h: &ChannelSet<T>,
    cfg: &SystemConfig<T>,
    target: &[T],
    p: &[T],
) -> Result<T> {
    let s = ReceiveSolve::new(h, p, cfg)?;
    Ok((0..target.len()).fold(T::neg_infinity(), |m, k| m.max(s.mse(k) - target[k])))
}

fn smoothed_margin<T: Real>(
    h: &ChannelSet<T>,
    cfg: &SystemConfig<T>,
    target: &[T],
    tau: T,
    p: &[T],
) -> Result<(T, Vec<T>)> {
    let s = ReceiveSolve::new(h, p, cfg)?;
    let v: Vec<T> = (0..target.len()).map(|k| s.mse(k) - target[k]).collect();
    let top = v.iter().fold(T::neg_infinity(), |m, x| m.max(*x));
    let e: Vec<T> = v.iter().map(|x| ((*x - top) / tau).exp()).collect();
    let z: T = e.iter().copied().sum();
    let softmax: Vec<T> = e.iter().map(|x| *x / z).collect();
    Ok((top + tau * z.ln(), s.weighted_gradient(&softmax)))
}

/// One prox-linear step: minimizes
/// `max_k (f_k + G_k d) + ||d||^2 / (2 t)` over `p + d` in the power set
/// through its dual on the probability simplex. Returns `p + d` and the
/// linear model value `max_k (f_k + G_k d)`. `warm` seeds the dual and
/// receives the final dual iterate.
fn prox_linear_step<T: Real>(
    f: &[T],
    jac: &[Vec<T>],
    p: &[T],
    t: T,
    budget: T,
    warm: &mut Vec<T>,
) -> (Vec<T>, T) {
    let k = f.len();
    let n = p.len();
    let candidate = |pi: &[T]| -> Vec<T> {
        let shifted: Vec<T> = (0..n)
            .map(|j| p[j] - t * (0..k).map(|i| pi[i] * jac[i][j]).sum::<T>())
            .collect();
        project_onto_budget(&shifted, budget)
    };
    let linear = |q: &[T]| -> Vec<T> {
        (0..k)
            .map(|i| f[i] + (0..n).map(|j| jac[i][j] * (q[j] - p[j])).sum::<T>())
            .collect()
    };
    let quad = |q: &[T]| -> T {
        q.iter().zip(p).map(|(a, b)| (*a - *b) * (*a - *b)).sum::<T>() / (t + t)
    };
    let lipschitz = t * jac.iter().flatten().map(|v| *v * *v).sum::<T>();
    let step = if lipschitz > T::zero() {
        lipschitz.recip()
    } else {
        T::one()
    };

    let mut pi = warm.clone();
    let mut y = pi.clone();
    let mut best_pi = pi.clone();
    let mut momentum = T::one();
    let mut best_q = p.to_vec();
    let mut best_model = f.iter().fold(T::neg_infinity(), |m, x| m.max(*x));
    let mut best_primal = best_model;
    for _ in 0..400 {
        let q = candidate(&y);
        let lin = linear(&q);
        let ascent: Vec<T> = y.iter().zip(&lin).map(|(a, g)| *a + step * *g).collect();
        let next = project_onto_face(&ascent, T::one());
        let next_momentum =
            (T::one() + (T::one() + T::lit(4.0) * momentum * momentum).sqrt()) / T::lit(2.0);
        let beta = (momentum - T::one()) / next_momentum;
        y = next.iter().zip(&pi).map(|(a, b)| *a + beta * (*a - *b)).collect();
        pi = next;
        momentum = next_momentum;

        let q = candidate(&pi);
        let lin = linear(&q);
        let model = lin.iter().fold(T::neg_infinity(), |m, x| m.max(*x));
        let primal = model + quad(&q);
        let dual = pi.iter().zip(&lin).map(|(a, b)| *a * *b).sum::<T>() + quad(&q);
        if primal < best_primal {
            best_primal = primal;
            best_model = model;
            best_q = q;
            best_pi = pi.clone();
        }
        // the outer loop only needs a fraction of the achievable decrease
        let gap = best_primal - dual;
        let decrease = f.iter().fold(T::neg_infinity(), |m, x| m.max(*x)) - best_primal;
        if gap <= T::lit(1e-15) * (T::one() + best_primal.abs()) || gap <= T::lit(1e-2) * decrease {
            break;
        }
    }
    *warm = best_pi;
    (best_q, best_model)
}


fn polish<T: Real>(
    h: &ChannelSet<T>,
    cfg: &SystemConfig<T>,
    target: &[T],
    start: Vec<T>,
    iters: usize,
) -> Result<(Vec<T>, T)> {
    let budget = cfg.power_budget();
    let k = target.len();
    let mut p = start;
    let mut t = T::one();
    let (t_min, t_max) = (T::lit(1e-12), T::lit(1e8));
    let mut s = ReceiveSolve::new(h, &p, cfg)?;
    let mut value = (0..k).fold(T::neg_infinity(), |m, i| m.max(s.mse(i) - target[i]));
    let mut warm = vec![T::one() / T::from_usize_lossy(k); k];
    for _ in 0..iters {
        let f: Vec<T> = (0..k).map(|i| s.mse(i) - target[i]).collect();
        let jac: Vec<Vec<T>> = (0..k)
            .map(|i| (0..k).map(|j| s.mse_partial(i, j)).collect())
            .collect();
        let (q, model) = prox_linear_step(&f, &jac, &p, t, budget, &mut warm);
        let predicted = value - model;
        if predicted <= T::lit(1e-15) * (T::one() + value.abs()) {
            if t >= t_max {
                break;
            }
            t = (t * T::lit(10.0)).min(t_max);
            continue;
        }
        let sq = ReceiveSolve::new(h, &q, cfg)?;
        let vq = (0..k).fold(T::neg_infinity(), |m, i| m.max(sq.mse(i) - target[i]));
        if vq <= value - T::lit(0.25) * predicted {
            p = q;
            s = sq;
            value = vq;
            t = (t + t).min(t_max);
        } else {
            t /= T::lit(4.0);
            if t < t_min {
                break;
            }
        }
    }
    Ok((p, value))
}

fn minimize_margin<T: Real>(
    h: &ChannelSet<T>,
    cfg: &SystemConfig<T>,
    target: &[T],
    start: &[T],
    opts: &MembershipOptions,
) -> Result<(Vec<T>, T)> {
    let budget = cfg.power_budget();
    let mut p = project_onto_budget(start, budget);
    let mut best_p = p.clone();
    let mut best = margin_at(h, cfg, target, &p)?;
    for tau in &opts.temperatures {
        let tau = T::lit(*tau);
        let out = projected_gradient(
            |x: &[T]| smoothed_margin(h, cfg, target, tau, x),
            &p,
            budget,
            &opts.smoothing,
            |_, _| {},
        )?;
        p = out.point;
        let exact = margin_at(h, cfg, target, &p)?;
        if exact < best {
            best = exact;
            best_p = p.clone();
        }
    }
    let (polished, value) = polish(h, cfg, target, best_p.clone(), opts.polish_iters)?;
    if value < best {
        Ok((polished, value))
    } else {
        Ok((best_p, best))
    }
}

/// Deterministic starts (origin, vertices, face centroid) plus seeded
/// uniform draws.
fn membership_starts<T: Real>(users: usize, budget: T, opts: &MembershipOptions) -> Vec<Vec<T>> {
    let mut starts = vec![vec![T::zero(); users]];
    for k in 0..users {
        let mut v = vec![T::zero(); users];
        v[k] = budget;
        starts.push(v);
    }
    starts.push(vec![budget / T::from_usize_lossy(users); users]);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    starts.extend((0..opts.random_starts).map(|_| uniform_in_budget(&mut rng, users, budget)));
    starts
}

pub fn dominated_membership<T: Real>(
    h: &ChannelSet<T>,
    cfg: &SystemConfig<T>,
    target: &MseTuple<T>,
    opts: &MembershipOptions,
) -> Result<MembershipVerdict<T>> {
    if target.len() != h.users() {
        return Err(Error::DimensionMismatch(format!(
            "target has {} entries for {} users",
            target.len(),
            h.users()
        )));
    }
    let t = target.as_slice();
    let runs = membership_starts(h.users(), cfg.power_budget(), opts)
        .into_par_iter()
        .map(|start| minimize_margin(h, cfg, t, &start, opts))
        .collect::<Result<Vec<_>>>()?;
    let (p, margin) = runs
        .into_iter()
        .reduce(|best, run| if run.1 < best.1 { run } else { best })
        .expect("at least one start");
    Ok(MembershipVerdict {
        target: target.clone(),
        margin,
        witness_powers: PowerAllocation::new(p, cfg)?,
        dominated: margin <= T::lit(opts.tol_member),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentStep<T> {
    pub t: T,
    pub target: MseTuple<T>,
    pub margin: T,
    pub dominated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentReport<T> {
    pub a: MseTuple<T>,
    pub b: MseTuple<T>,
    pub a_margin: T,
    pub b_margin: T,
    pub steps: Vec<SegmentStep<T>>,
    /// Some interior point of the segment is not dominated.
    pub nonconvex_witness: bool,
}

/// Tests `steps` equally spaced interior points of the segment `[a, b]`.
pub fn segment_test<T: Real>(
    h: &ChannelSet<T>,
    cfg: &SystemConfig<T>,
    a: &MseTuple<T>,
    b: &MseTuple<T>,
    steps: usize,
    opts: &MembershipOptions,
) -> Result<SegmentReport<T>> {
    if steps == 0 {
        return Err(Error::OutOfRange("segment test needs at least one step".into()));
    }
    let ends = [a, b]
        .par_iter()
        .map(|e| dominated_membership(h, cfg, e, opts))
        .collect::<Result<Vec<_>>>()?;
    for (name, verdict) in ["a", "b"].iter().zip(&ends) {
        if verdict.margin > T::lit(opts.tol_endpoint) {
            return Err(Error::UnreachableEndpoint(format!(
                "endpoint {name} has margin {} > {}",
                verdict.margin, opts.tol_endpoint
            )));
        }
    }
    let denom = T::from_usize_lossy(steps + 1);
    let points = (1..=steps)
        .map(|i| {
            let t = T::from_usize_lossy(i) / denom;
            Ok((t, a.lerp(b, t)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let steps = points
        .into_par_iter()
        .map(|(t, target)| {
            let v = dominated_membership(h, cfg, &target, opts)?;
            Ok(SegmentStep {
                t,
                target,
                margin: v.margin,
                dominated: v.dominated,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SegmentReport {
        a: a.clone(),
        b: b.clone(),
        a_margin: ends[0].margin,
        b_margin: ends[1].margin,
        nonconvex_witness: steps.iter().any(|s| !s.dominated),
        steps,
    })
}

/// Appends `extra` users whose channels repeat the last column. With those
/// users silent the original MSE tuples are unchanged.
pub fn embed_inactive_users<T: Real>(h: &ChannelSet<T>, extra: usize) -> ChannelSet<T> {
    let mut columns = h.columns().to_vec();
    let last = columns.last().cloned().expect("channel sets are never empty");
    columns.extend(std::iter::repeat_n(last, extra));
    ChannelSet::from_columns(columns).expect("copies of valid columns are valid")
}
