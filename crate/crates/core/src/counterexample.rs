//! The three-user nonconvexity instance and its reference numbers.
//!
//! `H = [[1, 0, 1], [0, 1, 1]]`, `P_Tx = 10`, `w = (0.22, 0.54, 0.24)`.
//! The noise variance is not given; `sigma^2 = 1` reproduces every
//! reported MSE, objective and multiplier, and is recorded in the report.

use serde::Serialize;

use crate::error::Result;
use crate::kkt::{enumerate_stationary_points, kkt_residuals, KktCertificate, SolverOptions};
use crate::model::{ChannelSet, MseTuple, PowerAllocation, SystemConfig, WeightVector};
use crate::region::{segment_test, MembershipOptions, SegmentReport};

pub const CHANNEL_ROWS: [[f64; 3]; 2] = [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]];
pub const POWER_BUDGET: f64 = 10.0;
pub const ASSUMED_NOISE_VARIANCE: f64 = 1.0;
pub const WEIGHTS: [f64; 3] = [0.22, 0.54, 0.24];

/// One reference stationary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferencePoint {
    pub powers: [f64; 3],
    pub lambda: f64,
    pub mu: [f64; 3],
    pub objective: f64,
    pub objective_tol: f64,
    pub mse: [f64; 3],
}

pub const REFERENCE: [ReferencePoint; 2] = [
    ReferencePoint {
        powers: [3.6753, 6.3247, 0.0],
        lambda: 0.0101,
        mu: [0.0, 0.0, 0.0266],
        objective: 0.36078,
        objective_tol: 1e-4,
        mse: [0.2139, 0.1365, 1.0],
    },
    ReferencePoint {
        powers: [0.0, 7.0794, 2.9206],
        lambda: 0.0115,
        mu: [0.007, 0.0, 0.0],
        objective: 0.3828,
        objective_tol: 5e-4,
        mse: [1.0, 0.1977, 0.2335],
    },
];

pub const POWER_TOL: f64 = 1e-3;
pub const MULTIPLIER_TOL: f64 = 1e-3;
pub const MSE_TOL: f64 = 1e-3;
pub const REFERENCE_RESIDUAL_TOL: f64 = 5e-4;

pub fn channel() -> ChannelSet<f64> {
    let rows: Vec<&[f64]> = CHANNEL_ROWS.iter().map(|r| r.as_slice()).collect();
    ChannelSet::from_real_rows(&rows).expect("constant channel is valid")
}

pub fn config() -> SystemConfig<f64> {
    SystemConfig::new(ASSUMED_NOISE_VARIANCE, POWER_BUDGET).expect("constant config is valid")
}

pub fn weights() -> WeightVector<f64> {
    WeightVector::new(WEIGHTS.to_vec()).expect("constant weights are valid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub starts: usize,
    pub seed: u64,
    pub segment_steps: usize,
    pub solver: SolverOptions,
    pub membership: MembershipOptions,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0,
            segment_steps: 9,
            solver: SolverOptions::default(),
            membership: MembershipOptions::default(),
        }
    }
}

/// A reference number next to the reproduced one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub reference: Vec<f64>,
    pub computed: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn close(name: &str, reference: &[f64], computed: &[f64], tolerance: f64) -> Self {
        let pass = reference.len() == computed.len()
            && reference
                .iter()
                .zip(computed)
                .all(|(a, b)| (a - b).abs() <= tolerance);
        Self {
            name: name.into(),
            reference: reference.to_vec(),
            computed: computed.to_vec(),
            tolerance,
            pass,
        }
    }

    fn at_most(name: &str, computed: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            reference: vec![0.0],
            computed: vec![computed],
            tolerance,
            pass: computed.abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub sigma2_assumed: f64,
    pub power_budget: f64,
    pub weights: Vec<f64>,
    pub starts: usize,
    pub seed: u64,
    pub cluster_count: usize,
    pub clusters: Vec<KktCertificate<f64>>,
    pub checks: Vec<Check>,
    pub segment: Option<SegmentReport<f64>>,
    pub all_pass: bool,
}

/// Reproduces every reference number of the instance and reports pass/fail
/// per number. Mismatches are reported, not raised.
pub fn counterexample_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let h = channel();
    let cfg = config();
    let w = weights();
    let found = enumerate_stationary_points(&h, &cfg, &w, opts.starts, opts.seed, &opts.solver)?;
    let clusters: Vec<KktCertificate<f64>> =
        found.clusters.iter().map(|c| c.certificate.clone()).collect();

    let mut checks = vec![Check::close(
        "cluster_count",
        &[2.0],
        &[clusters.len() as f64],
        0.0,
    )];

    for (i, reference) in REFERENCE.iter().enumerate() {
        let label = i + 1;
        // match by powers, not by rank, so a missing point fails its own checks
        let nearest = clusters.iter().min_by(|a, b| {
            let da = dist(a.powers.as_slice(), &reference.powers);
            let db = dist(b.powers.as_slice(), &reference.powers);
            da.total_cmp(&db)
        });
        let nan3 = [f64::NAN; 3];
        let (powers, lambda, mu, objective, mse) = match nearest {
            Some(c) => (
                c.powers.as_slice().to_vec(),
                c.lambda,
                c.mu.clone(),
                c.objective,
                c.mse.clone(),
            ),
            None => (nan3.to_vec(), f64::NAN, nan3.to_vec(), f64::NAN, nan3.to_vec()),
        };
        checks.push(Check::close(
            &format!("objective_{label}"),
            &[reference.objective],
            &[objective],
            reference.objective_tol,
        ));
        checks.push(Check::close(&format!("powers_{label}"), &reference.powers, &powers, POWER_TOL));
        checks.push(Check::close(
            &format!("lambda_{label}"),
            &[reference.lambda],
            &[lambda],
            MULTIPLIER_TOL,
        ));
        checks.push(Check::close(&format!("mu_{label}"), &reference.mu, &mu, MULTIPLIER_TOL));
        checks.push(Check::close(&format!("mse_{label}"), &reference.mse, &mse, MSE_TOL));

        let p = PowerAllocation::new(reference.powers.to_vec(), &cfg)?;
        let residuals = kkt_residuals(&h, &cfg, &w, &p, reference.lambda, &reference.mu)?;
        checks.push(Check::at_most(
            &format!("reference_kkt_residual_{label}"),
            residuals.max_abs(),
            REFERENCE_RESIDUAL_TOL,
        ));
    }

    let segment = if clusters.len() >= 2 {
        let a = MseTuple::new(clusters[0].mse.clone())?;
        let b = MseTuple::new(clusters[1].mse.clone())?;
        let report = segment_test(&h, &cfg, &a, &b, opts.segment_steps, &opts.membership)?;
        checks.push(Check {
            name: "segment_outside_region".into(),
            reference: vec![1.0],
            computed: vec![if report.steps.iter().all(|s| !s.dominated) { 1.0 } else { 0.0 }],
            tolerance: 0.0,
            pass: report.steps.iter().all(|s| !s.dominated),
        });
        Some(report)
    } else {
        checks.push(Check::close("segment_outside_region", &[1.0], &[f64::NAN], 0.0));
        None
    };

    Ok(SuiteReport {
        sigma2_assumed: ASSUMED_NOISE_VARIANCE,
        power_budget: POWER_BUDGET,
        weights: WEIGHTS.to_vec(),
        starts: opts.starts,
        seed: opts.seed,
        cluster_count: clusters.len(),
        all_pass: checks.iter().all(|c| c.pass),
        clusters,
        checks,
        segment,
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
