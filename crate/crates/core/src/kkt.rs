//! Weighted sum-MSE minimization over the power set, KKT verification and
//! stationary-point enumeration.
//!
//! The program is `min sum_k w_k eps_k(p)` s.t. `sum p_k <= P_Tx`,
//! `p_k >= 0`, with Lagrangian
//! `L = sum w_k eps_k + lambda (sum p_k - P_Tx) - sum mu_k p_k`.
//! Stationarity reads
//! `h_k^H X^{-1} (w_k X - S) X^{-1} h_k = lambda - mu_k`,
//! `S = sum_l w_l p_l h_l h_l^H`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dotc, CMatrix};
use crate::model::{ChannelSet, PowerAllocation, ReceiveSolve, SystemConfig, WeightVector};
use crate::optimize::{projected_gradient, PgOptions};
use crate::scalar::Real;
use crate::simplex::uniform_in_budget;

/// Residual threshold for a converged certificate.
pub const TOL_KKT: f64 = 1e-7;
/// `p_k > ACTIVE_REL_TOL * P_Tx` counts as an active user.
pub const ACTIVE_REL_TOL: f64 = 1e-8;
/// Runs whose powers are closer than this fraction of `P_Tx` share a cluster.
pub const CLUSTER_REL_RADIUS: f64 = 1e-3;
/// Slack on the sign conditions of the multipliers.
pub const MULTIPLIER_SIGN_TOL: f64 = 1e-9;

/// Signed residual of every KKT condition. Nothing is thresholded here.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktResiduals<T> {
    /// `h_k^H X^{-1}(w_k X - S)X^{-1} h_k - (lambda - mu_k)`.
    pub stationarity: Vec<T>,
    /// `min(p_k, 0)`.
    pub primal_nonnegativity: Vec<T>,
    /// `p_k mu_k`.
    pub complementarity: Vec<T>,
    /// `min(mu_k, 0)`.
    pub dual_nonnegativity: Vec<T>,
    /// `sum p_k - P_Tx`.
    pub budget_slack: T,
    /// `lambda (sum p_k - P_Tx)`.
    pub budget_complementarity: T,
    /// `min(lambda, 0)`.
    pub lambda_nonnegativity: T,
}

impl<T: Real> KktResiduals<T> {
    pub fn max_stationarity(&self) -> T {
        self.stationarity.iter().fold(T::zero(), |m, r| m.max(r.abs()))
    }

    /// Largest violation over all conditions, with the budget terms in their
    /// own units (a positive `budget_slack` counts, a negative one does not).
    pub fn max_abs(&self) -> T {
        let vectors = self
            .stationarity
            .iter()
            .chain(&self.primal_nonnegativity)
            .chain(&self.complementarity)
            .chain(&self.dual_nonnegativity)
            .fold(T::zero(), |m, r| m.max(r.abs()));
        vectors
            .max(self.budget_slack.max(T::zero()))
            .max(self.budget_complementarity.abs())
            .max(self.lambda_nonnegativity.abs())
    }

    /// Certificate acceptance at tolerance `tol`.
    pub fn within(&self, tol: T, cfg: &SystemConfig<T>) -> bool {
        let sign = -T::lit(MULTIPLIER_SIGN_TOL);
        self.max_stationarity() <= tol
            && self.complementarity.iter().all(|c| c.abs() <= tol)
            && self.budget_complementarity.abs() <= tol * cfg.power_budget()
            && self.budget_slack <= cfg.feasibility_tol()
            && self.primal_nonnegativity.iter().all(|v| *v == T::zero())
            && self.dual_nonnegativity.iter().all(|v| *v >= sign)
            && self.lambda_nonnegativity >= sign
    }
}

fn check_dims<T: Real>(h: &ChannelSet<T>, w: &WeightVector<T>, p: &PowerAllocation<T>) -> Result<()> {
    if w.len() != h.users() || p.len() != h.users() {
        return Err(Error::DimensionMismatch(format!(
            "{} users, {} weights, {} powers",
            h.users(),
            w.len(),
            p.len()
        )));
    }
    Ok(())
}

/// Evaluates the KKT system at `(p, lambda, mu)`.
///
/// The left-hand side of stationarity is formed from the explicit matrix
/// `S`, independently of the closed-form gradient used by the solver.
pub fn kkt_residuals<T: Real>(
    h: &ChannelSet<T>,
    cfg: &SystemConfig<T>,
    w: &WeightVector<T>,
    p: &PowerAllocation<T>,
    lambda: T,
    mu: &[T],
) -> Result<KktResiduals<T>> {
    check_dims(h, w, p)?;
    if mu.len() != h.users() {
        return Err(Error::DimensionMismatch(format!(
            "{} multipliers for {} users",
            mu.len(),
            h.users()
        )));
    }
    let solve = ReceiveSolve::new(h, p.as_slice(), cfg)?;
    let mut s = CMatrix::zeros(h.antennas(), h.antennas());
    for (l, hl) in h.columns().iter().enumerate() {
        s.add_outer(w.as_slice()[l] * p.as_slice()[l], hl);
    }
    let stationarity = (0..h.users())
        .map(|k| {
            let u = solve.whitened(k);
            let lhs = w.as_slice()[k] * dotc(h.column(k), u).re - dotc(u, &s.mul_vec(u)).re;
            lhs - (lambda - mu[k])
        })
        .collect();
    let powers = p.as_slice();
    let slack = p.total() - cfg.power_budget();
    Ok(KktResiduals {
        stationarity,
        primal_nonnegativity: powers.iter().map(|v| v.min(T::zero())).collect(),
        complementarity: powers.iter().zip(mu).map(|(a, b)| *a * *b).collect(),
        dual_nonnegativity: mu.iter().map(|v| v.min(T::zero())).collect(),
        budget_slack: slack,
        budget_complementarity: lambda * slack,
        lambda_nonnegativity: lambda.min(T::zero()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Multipliers<T> {
    pub lambda: T,
    pub mu: Vec<T>,
}

/// Nonnegative multipliers consistent with the active set of `p`.
///
/// With a tight budget `lambda` is the largest `-grad_k` over active users,
/// otherwise zero; inactive users get `mu_k = max(lambda + grad_k, 0)` and
/// active ones `mu_k = 0`.
pub fn recover_multipliers<T: Real>(
    h: &ChannelSet<T>,
    cfg: &SystemConfig<T>,
    w: &WeightVector<T>,
    p: &PowerAllocation<T>,
) -> Result<Multipliers<T>> {
    check_dims(h, w, p)?;
    let grad = ReceiveSolve::new(h, p.as_slice(), cfg)?.weighted_gradient(w.as_slice());
    Ok(multipliers_from_gradient(cfg, p.as_slice(), &grad))
}

fn multipliers_from_gradient<T: Real>(cfg: &SystemConfig<T>, p: &[T], grad: &[T]) -> Multipliers<T> {
    let tol_active = T::lit(ACTIVE_REL_TOL) * cfg.power_budget();
    let total: T = p.iter().copied().sum();
    let tight = cfg.power_budget() - total <= tol_active;
    let lambda = if tight {
        p.iter()
            .zip(grad)
            .filter(|(pk, _)| **pk > tol_active)
            .fold(T::zero(), |m, (_, g)| m.max(-*g))
    } else {
        T::zero()
    };
    let mu = p
        .iter()
        .zip(grad)
        .map(|(pk, g)| {
            if *pk > tol_active {
                T::zero()
            } else {
                (lambda + *g).max(T::zero())
            }
        })
        .collect();
    Multipliers { lambda, mu }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub pg: PgOptions,
    pub tol_kkt: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            pg: PgOptions::default(),
            tol_kkt: TOL_KKT,
        }
    }
}

/// A candidate stationary point with its multipliers and residuals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktCertificate<T> {
    pub powers: PowerAllocation<T>,
    pub lambda: T,
    pub mu: Vec<T>,
    pub objective: T,
    pub mse: Vec<T>,
    pub residuals: KktResiduals<T>,
    pub converged: bool,
    pub iterations: usize,
    pub sigma2_assumed: T,
}

/// Builds the certificate for given powers, recovering the multipliers.
pub fn certify<T: Real>(
    h: &ChannelSet<T>,
    cfg: &SystemConfig<T>,
    w: &WeightVector<T>,
    p: PowerAllocation<T>,
    tol_kkt: T,
) -> Result<KktCertificate<T>> {
    check_dims(h, w, &p)?;
    let solve = ReceiveSolve::new(h, p.as_slice(), cfg)?;
    let grad = solve.weighted_gradient(w.as_slice());
    let mult = multipliers_from_gradient(cfg, p.as_slice(), &grad);
    let residuals = kkt_residuals(h, cfg, w, &p, mult.lambda, &mult.mu)?;
    let mse = solve.mse_values();
    let objective = w.as_slice().iter().zip(&mse).map(|(a, b)| *a * *b).sum();
    Ok(KktCertificate {
        converged: residuals.within(tol_kkt, cfg),
        powers: p,
        lambda: mult.lambda,
        mu: mult.mu,
        objective,
        mse,
        residuals,
        iterations: 0,
        sigma2_assumed: cfg.noise_variance(),
    })
}

/// Local minimization from a feasible start.
pub fn minimize_weighted_sum_mse<T: Real>(
    h: &ChannelSet<T>,
    cfg: &SystemConfig<T>,
    w: &WeightVector<T>,
    start: &PowerAllocation<T>,
    opts: &SolverOptions,
) -> Result<KktCertificate<T>> {
    minimize_weighted_sum_mse_traced(h, cfg, w, start, opts, |_, _| {})
}

/// As [`minimize_weighted_sum_mse`], reporting every accepted iterate.
pub fn minimize_weighted_sum_mse_traced<T: Real>(
    h: &ChannelSet<T>,
    cfg: &SystemConfig<T>,
    w: &WeightVector<T>,
    start: &PowerAllocation<T>,
    opts: &SolverOptions,
    observe: impl FnMut(&[T], T),
) -> Result<KktCertificate<T>> {
    check_dims(h, w, start)?;
    // the allocation may have been validated against another budget
    let start = PowerAllocation::new(start.as_slice().to_vec(), cfg)?;
    let weights = w.as_slice();
    let outcome = projected_gradient(
        |p: &[T]| {
            let s = ReceiveSolve::new(h, p, cfg)?;
            let f = (0..p.len()).map(|k| weights[k] * s.mse(k)).sum();
            Ok((f, s.weighted_gradient(weights)))
        },
        start.as_slice(),
        cfg.power_budget(),
        &opts.pg,
        observe,
    )?;
    let powers = PowerAllocation::new(outcome.point, cfg)?;
    let mut cert = certify(h, cfg, w, powers, T::lit(opts.tol_kkt))?;
    cert.converged = cert.converged && outcome.converged;
    cert.iterations = outcome.iterations;
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryCluster<T> {
    /// Lowest-objective member.
    pub certificate: KktCertificate<T>,
    pub members: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryPoints<T> {
    /// Sorted by objective.
    pub clusters: Vec<StationaryCluster<T>>,
    pub runs: usize,
    pub unconverged_runs: usize,
}

impl<T: Real> StationaryPoints<T> {
    pub fn objectives(&self) -> Vec<T> {
        self.clusters.iter().map(|c| c.certificate.objective).collect()
    }
}

/// Start points: `starts` uniform draws from the power set, then the
/// vertices (origin and `P_Tx e_k`) and the centroid.
pub fn start_points<T: Real>(users: usize, budget: T, starts: usize, seed: u64) -> Vec<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<T>> = (0..starts)
        .map(|_| uniform_in_budget(&mut rng, users, budget))
        .collect();
    out.push(vec![T::zero(); users]);
    for k in 0..users {
        let mut v = vec![T::zero(); users];
        v[k] = budget;
        out.push(v);
    }
    out.push(vec![budget / T::from_usize_lossy(users + 1); users]);
    out
}

fn distance<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y) * (*x - *y))
        .sum::<T>()
        .sqrt()
}

/// Multistart minimization followed by clustering of the converged runs.
pub fn enumerate_stationary_points<T: Real>(
    h: &ChannelSet<T>,
    cfg: &SystemConfig<T>,
    w: &WeightVector<T>,
    starts: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<StationaryPoints<T>> {
    if starts == 0 {
        return Err(Error::OutOfRange("at least one start is required".into()));
    }
    if w.len() != h.users() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} users",
            w.len(),
            h.users()
        )));
    }
    let points = start_points(h.users(), cfg.power_budget(), starts, seed);
    let runs: Vec<KktCertificate<T>> = points
        .into_par_iter()
        .map(|p| {
            let start = PowerAllocation::new(p, cfg)?;
            minimize_weighted_sum_mse(h, cfg, w, &start, opts)
        })
        .collect::<Result<_>>()?;

    let radius = T::lit(CLUSTER_REL_RADIUS) * cfg.power_budget();
    let total = runs.len();
    let mut unconverged = 0;
    let mut clusters: Vec<(Vec<T>, StationaryCluster<T>)> = Vec::new();
    for cert in runs {
        if !cert.converged {
            unconverged += 1;
            continue;
        }
        let p = cert.powers.as_slice();
        match clusters.iter_mut().find(|(anchor, _)| distance(anchor, p) <= radius) {
            Some((_, cluster)) => {
                cluster.members += 1;
                if cert.objective < cluster.certificate.objective {
                    cluster.certificate = cert;
                }
            }
            None => clusters.push((
                p.to_vec(),
                StationaryCluster {
                    certificate: cert,
                    members: 1,
                },
            )),
        }
    }
    let mut clusters: Vec<_> = clusters.into_iter().map(|(_, c)| c).collect();
    clusters.sort_by(|a, b| {
        a.certificate
            .objective
            .partial_cmp(&b.certificate.objective)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(StationaryPoints {
        clusters,
        runs: total,
        unconverged_runs: unconverged,
    })
}
