//! Lower-left boundary of the two-user MSE region.
//!
//! With user one at power `p` and user two at `P_Tx - p` the boundary is the
//! curve `p -> (eps1(p), eps2(p))`, and `eps2 = g(eps1)` is convex iff the
//! discriminant `eps2'' eps1' - eps1'' eps2'` is nonpositive along it (dots
//! are derivatives in `p`). Everything here is expressed through
//!
//! ```text
//! a_ij = h_i^H X^{-1}(p) h_j,   b_ij = h_i^H X^{-2}(p) h_j,
//! X(p) = sigma^2 I + p h1 h1^H + (P_Tx - p) h2 h2^H,
//! ```
//!
//! which come out of a single Cholesky solve per grid point
//! (`b_ij = (X^{-1} h_i)^H (X^{-1} h_j)`).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dotc, norm_sqr, C};
use crate::model::{ChannelSet, ReceiveSolve, SystemConfig};
use crate::scalar::Real;

/// Relative tolerance for sign claims on the discriminant and its summands.
pub const DISCRIMINANT_REL_TOL: f64 = 1e-9;
/// Relative slack on the Cauchy-Schwarz bounds.
pub const CAUCHY_SCHWARZ_REL_TOL: f64 = 1e-10;
/// `d <= COLINEAR_REL_TOL * ||h1||^2 ||h2||^2` counts as colinear.
pub const COLINEAR_REL_TOL: f64 = 1e-12;

/// Shape of the efficient boundary `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Curvature {
    StrictlyConvex,
    Affine,
}

impl std::fmt::Display for Curvature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Curvature::StrictlyConvex => "StrictlyConvex",
            Curvature::Affine => "Affine",
        })
    }
}

/// Two single-antenna users sharing an `N`-antenna receiver.
#[derive(Debug, Clone)]
pub struct TwoUserChannel<T> {
    set: ChannelSet<T>,
    norm1: T,
    norm2: T,
    cross: C<T>,
    gram_det: T,
}

impl<T: Real> TwoUserChannel<T> {
    pub fn new(h1: Vec<C<T>>, h2: Vec<C<T>>) -> Result<Self> {
        Self::from_channel_set(&ChannelSet::from_columns(vec![h1, h2])?)
    }

    pub fn from_channel_set(set: &ChannelSet<T>) -> Result<Self> {
        if set.users() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "two-user analysis needs exactly 2 users, got {}",
                set.users()
            )));
        }
        let (h1, h2) = (set.column(0), set.column(1));
        let norm1 = norm_sqr(h1);
        let norm2 = norm_sqr(h2);
        let cross = dotc(h1, h2);
        let raw = norm1 * norm2 - cross.norm_sqr();
        // d is a difference of nearly equal products for near-colinear channels
        let floor = T::lit(COLINEAR_REL_TOL) * norm1 * norm2;
        let gram_det = if raw < floor { raw.max(T::zero()) } else { raw };
        Ok(Self {
            set: set.clone(),
            norm1,
            norm2,
            cross,
            gram_det,
        })
    }

    pub fn h1(&self) -> &[C<T>] {
        self.set.column(0)
    }

    pub fn h2(&self) -> &[C<T>] {
        self.set.column(1)
    }

    pub fn channel_set(&self) -> &ChannelSet<T> {
        &self.set
    }

    /// `h1^H h2`.
    pub fn cross(&self) -> C<T> {
        self.cross
    }

    /// `d = ||h1||^2 ||h2||^2 - |h1^H h2|^2`, clamped at zero.
    pub fn gram_det(&self) -> T {
        self.gram_det
    }

    pub fn classify(&self) -> Curvature {
        if self.gram_det <= T::lit(COLINEAR_REL_TOL) * self.norm1 * self.norm2 {
            Curvature::Affine
        } else {
            Curvature::StrictlyConvex
        }
    }

    fn check_power(&self, cfg: &SystemConfig<T>, p: T) -> Result<()> {
        if p >= T::zero() && p <= cfg.power_budget() {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!(
                "power {p} outside [0, {}]",
                cfg.power_budget()
            )))
        }
    }

    fn solve(&self, cfg: &SystemConfig<T>, p: T) -> Result<ReceiveSolve<T>> {
        self.check_power(cfg, p)?;
        ReceiveSolve::new(&self.set, &[p, cfg.power_budget() - p], cfg)
    }

    /// `(f1(p), f2(p))` with the whole budget in use.
    pub fn mse_pair_at_power(&self, cfg: &SystemConfig<T>, p: T) -> Result<(T, T)> {
        let s = self.solve(cfg, p)?;
        Ok((s.mse(0), s.mse(1)))
    }

    pub fn coupling_bundle(&self, cfg: &SystemConfig<T>, p: T) -> Result<CouplingBundle<T>> {
        let s = self.solve(cfg, p)?;
        let (u1, u2) = (s.whitened(0), s.whitened(1));
        let sigma2 = cfg.noise_variance();
        let sigma4 = sigma2 * sigma2;
        let rest = cfg.power_budget() - p;
        let two = T::lit(2.0);
        let d = self.gram_det;
        let c1 = sigma2 * self.cross.norm_sqr() * p * d * rest;
        let c2 = (sigma2 * self.norm1 + d * rest) * d * p * (two * sigma2 + p * self.norm1)
            + sigma4 * self.norm2 * d * rest;
        let d2 = (sigma2 * self.norm2 + d * p) * d * rest * (two * sigma2 + rest * self.norm2)
            + sigma4 * self.norm1 * d * p;
        Ok(CouplingBundle {
            p,
            a11: s.coupling(0, 0).re,
            a22: s.coupling(1, 1).re,
            a12: s.coupling(0, 1),
            b11: norm_sqr(u1),
            b22: norm_sqr(u2),
            b12: dotc(u1, u2),
            d,
            c1,
            c2,
            d1: c1,
            d2,
        })
    }

    /// `(g', g'')` at an interior power, with `g' = eps2'/eps1'` and
    /// `g'' = (eps2'' eps1' - eps1'' eps2') / eps1'^3`.
    pub fn g_derivatives(&self, cfg: &SystemConfig<T>, p: T) -> Result<(T, T)> {
        if !(p > T::zero() && p < cfg.power_budget()) {
            return Err(Error::OutOfRange(format!(
                "g derivatives need an interior power, got {p}"
            )));
        }
        let bundle = self.coupling_bundle(cfg, p)?;
        let (d1, d2) = mse_first_derivatives(&bundle, cfg);
        let disc = convexity_discriminant(&bundle, cfg);
        Ok((d2 / d1, disc.value / (d1 * d1 * d1)))
    }

    /// Matrix-inversion-lemma closed forms of `a12/a11` and `b21/b22`,
    /// alongside their direct evaluation.
    pub fn closed_form_ratios(&self, cfg: &SystemConfig<T>, p: T) -> Result<ClosedFormRatios<T>> {
        let bundle = self.coupling_bundle(cfg, p)?;
        let sigma2 = cfg.noise_variance();
        let sigma4 = sigma2 * sigma2;
        let sigma6 = sigma4 * sigma2;
        let rest = cfg.power_budget() - p;
        let d = self.gram_det;
        let two = T::lit(2.0);

        let ratio_a = self.cross * sigma2 / (sigma2 * self.norm1 + d * rest);
        let ratio_b = self.cross.conj() * (sigma4 - p * rest * d)
            / (sigma4 * self.norm2 + d * p * (two * sigma2 + p * self.norm1));
        let product = ratio_a * ratio_b;

        let b21 = bundle.b12.conj();
        let direct_a = bundle.a12 / bundle.a11;
        let direct_b = b21 / bundle.b22;
        let cs = self.cross.norm_sqr();
        let full = sigma6 * self.norm1 * self.norm2;
        Ok(ClosedFormRatios {
            ratio_a,
            ratio_b,
            direct_a,
            direct_b,
            product,
            product_check: product.re,
            second_ratio: (sigma6 * cs - bundle.c1) / (full + bundle.c2),
            third_ratio: (sigma6 * cs - bundle.d1) / (full + bundle.d2),
            third_direct: bundle.a12 * b21 / (bundle.a22 * bundle.b11),
        })
    }

    /// Uniform grid over `[0, P_Tx]`, derivatives filled in on the interior.
    pub fn boundary_sweep(
        &self,
        cfg: &SystemConfig<T>,
        samples: usize,
    ) -> Result<Vec<BoundarySample<T>>> {
        if samples < 3 {
            return Err(Error::OutOfRange(format!("sweep needs >= 3 samples, got {samples}")));
        }
        (0..samples)
            .into_par_iter()
            .map(|i| {
                let p = grid_power(cfg, i, samples);
                let (eps1, eps2) = self.mse_pair_at_power(cfg, p)?;
                let derivatives = if i == 0 || i + 1 == samples {
                    None
                } else {
                    Some(self.derivatives_at(cfg, p)?)
                };
                Ok(BoundarySample {
                    p,
                    eps1,
                    eps2,
                    derivatives,
                })
            })
            .collect()
    }

    fn derivatives_at(&self, cfg: &SystemConfig<T>, p: T) -> Result<SampleDerivatives<T>> {
        let bundle = self.coupling_bundle(cfg, p)?;
        let (deps1, deps2) = mse_first_derivatives(&bundle, cfg);
        let (ddeps1, ddeps2) = mse_second_derivatives(&bundle, cfg);
        let disc = convexity_discriminant(&bundle, cfg);
        Ok(SampleDerivatives {
            deps1,
            deps2,
            ddeps1,
            ddeps2,
            discriminant: disc.value,
            g_prime: deps2 / deps1,
            g_double_prime: disc.value / (deps1 * deps1 * deps1),
        })
    }

    /// Checks the discriminant sign and the Cauchy-Schwarz bounds on every
    /// interior point of a `grid`-point uniform power grid.
    pub fn convexity_certificate(
        &self,
        cfg: &SystemConfig<T>,
        grid: usize,
    ) -> Result<ConvexityReport<T>> {
        if grid < 11 {
            return Err(Error::OutOfRange(format!("certificate grid must be >= 11, got {grid}")));
        }
        let mut report = ConvexityReport {
            certified: true,
            worst_discriminant: T::neg_infinity(),
            worst_p: T::zero(),
            worst_summand: T::neg_infinity(),
            cauchy_schwarz_ok: true,
            classification: self.classify(),
            interior_points: grid - 2,
        };
        for i in 1..grid - 1 {
            let p = grid_power(cfg, i, grid);
            let bundle = self.coupling_bundle(cfg, p)?;
            let disc = convexity_discriminant(&bundle, cfg);
            let normalized = disc.normalized();
            if normalized > report.worst_discriminant {
                report.worst_discriminant = normalized;
                report.worst_p = p;
            }
            let summand = disc
                .summands
                .iter()
                .fold(T::neg_infinity(), |m, s| m.max(*s / disc.scale_or_one()));
            report.worst_summand = report.worst_summand.max(summand);
            if !disc.is_nonpositive() {
                report.certified = false;
            }
            if !bundle.checks().cauchy_schwarz() {
                report.cauchy_schwarz_ok = false;
                report.certified = false;
            }
        }
        Ok(report)
    }
}

fn grid_power<T: Real>(cfg: &SystemConfig<T>, i: usize, points: usize) -> T {
    if i + 1 == points {
        cfg.power_budget()
    } else {
        cfg.power_budget() * T::from_usize_lossy(i) / T::from_usize_lossy(points - 1)
    }
}

/// Coupling coefficients and proof substitutions at one boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingBundle<T> {
    pub p: T,
    pub a11: T,
    pub a22: T,
    pub a12: C<T>,
    pub b11: T,
    pub b22: T,
    pub b12: C<T>,
    pub d: T,
    pub c1: T,
    pub c2: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Real> CouplingBundle<T> {
    /// `Re{a12 b21}`, equal to `Re{a21 b12}`.
    pub fn re_ab(&self) -> T {
        (self.a12 * self.b12.conj()).re
    }

    pub fn checks(&self) -> BundleChecks {
        let tol = T::one() + T::lit(CAUCHY_SCHWARZ_REL_TOL);
        let four = T::lit(4.0);
        let re = self.re_ab();
        let cross = (self.a12.conj() * self.b12).norm_sqr();
        let product = self.a11 * self.a22 * self.b11 * self.b22;
        let sum = self.a22 * self.b11 + self.a11 * self.b22;
        let small = -T::lit(1e-12);
        BundleChecks {
            positive_diagonals: self.a11 > T::zero()
                && self.a22 > T::zero()
                && self.b11 > T::zero()
                && self.b22 > T::zero(),
            cauchy_schwarz_a: self.a12.norm_sqr() <= self.a11 * self.a22 * tol,
            cauchy_schwarz_b: self.b12.norm_sqr() <= self.b11 * self.b22 * tol,
            chain: four * re * re <= four * cross * tol
                && four * cross <= four * product * tol
                && four * product <= sum * sum * tol,
            substitutions_nonnegative: self.d >= small
                && self.c1 >= small
                && self.c2 >= small
                && self.d2 >= small
                && self.d1 == self.c1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BundleChecks {
    pub positive_diagonals: bool,
    pub cauchy_schwarz_a: bool,
    pub cauchy_schwarz_b: bool,
    /// `4 Re^2{a21 b12} <= 4 |a21 b12|^2 <= 4 a11 a22 b11 b22 <= (a22 b11 + a11 b22)^2`.
    pub chain: bool,
    pub substitutions_nonnegative: bool,
}

impl BundleChecks {
    pub fn cauchy_schwarz(&self) -> bool {
        self.cauchy_schwarz_a && self.cauchy_schwarz_b && self.chain
    }

    pub fn all(&self) -> bool {
        self.positive_diagonals && self.cauchy_schwarz() && self.substitutions_nonnegative
    }
}

/// `(eps1', eps2')`.
pub fn mse_first_derivatives<T: Real>(b: &CouplingBundle<T>, cfg: &SystemConfig<T>) -> (T, T) {
    let sigma2 = cfg.noise_variance();
    let coupling = cfg.power_budget() * b.a12.norm_sqr();
    (-sigma2 * b.b11 - coupling, sigma2 * b.b22 + coupling)
}

/// `(eps1'', eps2'')`.
pub fn mse_second_derivatives<T: Real>(b: &CouplingBundle<T>, cfg: &SystemConfig<T>) -> (T, T) {
    let two = T::lit(2.0);
    let sigma2 = cfg.noise_variance();
    let re = b.re_ab();
    let coupling = two * cfg.power_budget() * b.a12.norm_sqr();
    (
        two * sigma2 * (b.a11 * b.b11 - re) + coupling * (b.a11 - b.a22),
        two * sigma2 * (b.a22 * b.b22 - re) + coupling * (b.a22 - b.a11),
    )
}

/// `eps2'' eps1' - eps1'' eps2'` and its three-term split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Discriminant<T> {
    /// Evaluated from the derivative products.
    pub value: T,
    /// `2 s P |a12|^2 [2R - a22 b11 - a11 b22]`, `2 s^2 b11 (R - a11 b22)`,
    /// `2 s^2 b22 (R - a22 b11)` with `s = sigma^2`, `R = Re{a12 b21}`.
    pub summands: [T; 3],
    /// `|eps2'' eps1'| + |eps1'' eps2'|`.
    pub scale: T,
}

impl<T: Real> Discriminant<T> {
    fn scale_or_one(&self) -> T {
        if self.scale > T::zero() {
            self.scale
        } else {
            T::one()
        }
    }

    /// `value / scale`.
    pub fn normalized(&self) -> T {
        self.value / self.scale_or_one()
    }

    pub fn is_nonpositive(&self) -> bool {
        self.value <= T::lit(DISCRIMINANT_REL_TOL) * self.scale
    }

    pub fn summands_nonpositive(&self) -> bool {
        self.summands
            .iter()
            .all(|s| *s <= T::lit(DISCRIMINANT_REL_TOL) * self.scale)
    }

    pub fn summand_total(&self) -> T {
        self.summands.iter().copied().sum()
    }
}

pub fn convexity_discriminant<T: Real>(
    b: &CouplingBundle<T>,
    cfg: &SystemConfig<T>,
) -> Discriminant<T> {
    let (d1, d2) = mse_first_derivatives(b, cfg);
    let (dd1, dd2) = mse_second_derivatives(b, cfg);
    let two = T::lit(2.0);
    let sigma2 = cfg.noise_variance();
    let sigma4 = sigma2 * sigma2;
    let re = b.re_ab();
    let first = two * sigma2 * cfg.power_budget() * b.a12.norm_sqr()
        * (two * re - b.a22 * b.b11 - b.a11 * b.b22);
    let second = two * sigma4 * b.b11 * (re - b.a11 * b.b22);
    let third = two * sigma4 * b.b22 * (re - b.a22 * b.b11);
    Discriminant {
        value: dd2 * d1 - dd1 * d2,
        summands: [first, second, third],
        scale: (dd2 * d1).abs() + (dd1 * d2).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormRatios<T> {
    /// Closed form of `a12 / a11`.
    pub ratio_a: C<T>,
    /// Closed form of `b21 / b22`.
    pub ratio_b: C<T>,
    pub direct_a: C<T>,
    pub direct_b: C<T>,
    /// `ratio_a * ratio_b`, real in exact arithmetic.
    pub product: C<T>,
    pub product_check: T,
    /// `(s^3 |h1^H h2|^2 - c1) / (s^3 ||h1||^2 ||h2||^2 + c2)`.
    pub second_ratio: T,
    /// `(s^3 |h1^H h2|^2 - d1) / (s^3 ||h1||^2 ||h2||^2 + d2)`.
    pub third_ratio: T,
    /// `a12 b21 / (a22 b11)` evaluated directly.
    pub third_direct: C<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleDerivatives<T> {
    pub deps1: T,
    pub deps2: T,
    pub ddeps1: T,
    pub ddeps2: T,
    pub discriminant: T,
    pub g_prime: T,
    pub g_double_prime: T,
}

/// One boundary point; derivative fields only on the open interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySample<T> {
    pub p: T,
    pub eps1: T,
    pub eps2: T,
    pub derivatives: Option<SampleDerivatives<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport<T> {
    pub certified: bool,
    /// Largest `discriminant / scale` over the interior grid.
    pub worst_discriminant: T,
    pub worst_p: T,
    /// Largest `summand / scale` over the interior grid.
    pub worst_summand: T,
    pub cauchy_schwarz_ok: bool,
    pub classification: Curvature,
    pub interior_points: usize,
}

pub fn colinearity_classify<T: Real>(h1: &[C<T>], h2: &[C<T>]) -> Result<Curvature> {
    Ok(TwoUserChannel::new(h1.to_vec(), h2.to_vec())?.classify())
}

/// The affine boundary `g(eps1) = slope * eps1 + intercept` of colinear
/// channels `h2 = alpha h1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineBoundary<T> {
    pub slope: T,
    pub intercept: T,
    /// `1 / (1 + snr ||h1||^2)`.
    pub eps_min1: T,
    /// `1 / (1 + snr |alpha|^2 ||h1||^2)`.
    pub eps_min2: T,
}

impl<T: Real> AffineBoundary<T> {
    pub fn eval(&self, eps1: T) -> T {
        self.slope * eps1 + self.intercept
    }
}

pub fn affine_boundary<T: Real>(
    h1: &[C<T>],
    alpha: C<T>,
    cfg: &SystemConfig<T>,
) -> Result<AffineBoundary<T>> {
    if alpha.norm_sqr() == T::zero() {
        return Err(Error::InvalidChannel("colinearity factor must be nonzero".into()));
    }
    let n1 = norm_sqr(h1);
    if !n1.is_finite() || n1 <= T::zero() {
        return Err(Error::InvalidChannel("h1 must be a finite nonzero vector".into()));
    }
    let a2 = alpha.norm_sqr();
    let gamma = cfg.snr();
    let denom = T::one() + a2 * gamma * n1;
    Ok(AffineBoundary {
        slope: -(a2 + a2 * gamma * n1) / denom,
        intercept: T::one() + a2 / denom,
        eps_min1: (T::one() + gamma * n1).recip(),
        eps_min2: denom.recip(),
    })
}
