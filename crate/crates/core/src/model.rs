//! Channel and system data model, and the MMSE formulas every other module
//! builds on.
//!
//! For uplink powers `p` the received covariance is
//! `X = sigma^2 I + sum_k p_k h_k h_k^H` and user `k` attains
//! `eps_k = 1 - p_k h_k^H X^{-1} h_k` with an MMSE receiver. `X^{-1}` is never
//! formed: one Cholesky factorization is computed per power vector and the
//! whitened channels `X^{-1} h_k` are reused for every quadratic form.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dotc, norm_sqr, CMatrix, Cholesky, C};
use crate::scalar::Real;

/// Relative feasibility slack on the power budget.
pub const FEASIBILITY_REL_TOL: f64 = 1e-9;

/// Complex `N x K` channel matrix; column `k` is user `k`'s channel `h_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet<T> {
    antennas: usize,
    columns: Vec<Vec<C<T>>>,
}

impl<T: Real> ChannelSet<T> {
    /// Builds a channel set from per-user column vectors.
    pub fn from_columns(columns: Vec<Vec<C<T>>>) -> Result<Self> {
        let users = columns.len();
        if users == 0 {
            return Err(Error::InvalidChannel("at least one user is required".into()));
        }
        let antennas = columns[0].len();
        if antennas == 0 {
            return Err(Error::InvalidChannel("at least one antenna is required".into()));
        }
        for (k, col) in columns.iter().enumerate() {
            if col.len() != antennas {
                return Err(Error::DimensionMismatch(format!(
                    "column {k} has {} entries, expected {antennas}",
                    col.len()
                )));
            }
            if col.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::InvalidChannel(format!("column {k} has non-finite entries")));
            }
            if norm_sqr(col) <= T::zero() {
                return Err(Error::InvalidChannel(format!("column {k} is the zero vector")));
            }
        }
        Ok(Self { antennas, columns })
    }

    pub fn from_matrix(m: &CMatrix<T>) -> Result<Self> {
        Self::from_columns((0..m.cols()).map(|k| m.column(k)).collect())
    }

    /// Real-valued channel given row by row, as usually written.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_columns(
            (0..k)
                .map(|j| (0..n).map(|i| Complex::new(T::lit(rows[i][j]), T::zero())).collect())
                .collect(),
        )
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn users(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, k: usize) -> &[C<T>] {
        &self.columns[k]
    }

    pub fn columns(&self) -> &[Vec<C<T>>] {
        &self.columns
    }

    pub fn to_matrix(&self) -> CMatrix<T> {
        CMatrix::from_fn(self.antennas, self.users(), |i, j| self.columns[j][i])
    }
}

/// Noise variance per antenna and total uplink power budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemConfig<T> {
    noise_variance: T,
    power_budget: T,
}

impl<T: Real> SystemConfig<T> {
    pub fn new(noise_variance: T, power_budget: T) -> Result<Self> {
        if !noise_variance.is_finite() || noise_variance <= T::zero() {
            return Err(Error::InvalidConfig(format!(
                "noise variance must be positive and finite, got {noise_variance}"
            )));
        }
        if !power_budget.is_finite() || power_budget <= T::zero() {
            return Err(Error::InvalidConfig(format!(
                "power budget must be positive and finite, got {power_budget}"
            )));
        }
        Ok(Self {
            noise_variance,
            power_budget,
        })
    }

    pub fn noise_variance(&self) -> T {
        self.noise_variance
    }

    pub fn power_budget(&self) -> T {
        self.power_budget
    }

    /// Transmit SNR `P_Tx / sigma^2`.
    pub fn snr(&self) -> T {
        self.power_budget / self.noise_variance
    }

    /// Absolute slack tolerated on `sum p_k <= P_Tx`.
    pub fn feasibility_tol(&self) -> T {
        T::lit(FEASIBILITY_REL_TOL) * self.power_budget
    }
}

/// Nonnegative uplink powers with `sum p_k <= P_Tx` (up to
/// [`SystemConfig::feasibility_tol`]).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PowerAllocation<T> {
    powers: Vec<T>,
}

impl<T: Real> PowerAllocation<T> {
    pub fn new(powers: Vec<T>, cfg: &SystemConfig<T>) -> Result<Self> {
        if let Some((k, p)) = powers
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < T::zero())
        {
            return Err(Error::InfeasiblePower(format!("p[{k}] = {p} is not a nonnegative number")));
        }
        let total: T = powers.iter().copied().sum();
        if total > cfg.power_budget() + cfg.feasibility_tol() {
            return Err(Error::InfeasiblePower(format!(
                "total power {total} exceeds budget {}",
                cfg.power_budget()
            )));
        }
        Ok(Self { powers })
    }

    pub fn zeros(users: usize) -> Self {
        Self {
            powers: vec![T::zero(); users],
        }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.powers
    }

    pub fn into_vec(self) -> Vec<T> {
        self.powers
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn total(&self) -> T {
        self.powers.iter().copied().sum()
    }

    /// Appends `extra` silent users.
    pub fn zero_padded(&self, extra: usize) -> Self {
        let mut powers = self.powers.clone();
        powers.extend(std::iter::repeat_n(T::zero(), extra));
        Self { powers }
    }
}

/// Per-user MSE values, each in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MseTuple<T> {
    values: Vec<T>,
}

impl<T: Real> MseTuple<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::OutOfRange("empty MSE tuple".into()));
        }
        if let Some((k, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > T::zero() && **v <= T::one()))
        {
            return Err(Error::OutOfRange(format!("mse[{k}] = {v} is outside (0, 1]")));
        }
        Ok(Self { values })
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(1 - t) self + t other`.
    pub fn lerp(&self, other: &Self, t: T) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch("MSE tuples of different length".into()));
        }
        Self::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (T::one() - t) * *a + t * *b)
                .collect(),
        )
    }

    /// Appends `extra` users at MSE 1.
    pub fn one_padded(&self, extra: usize) -> Self {
        let mut values = self.values.clone();
        values.extend(std::iter::repeat_n(T::one(), extra));
        Self { values }
    }
}

/// Nonnegative per-user weights, not all zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightVector<T> {
    weights: Vec<T>,
}

impl<T: Real> WeightVector<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) {
            return Err(Error::InvalidWeights("weights must be finite and nonnegative".into()));
        }
        if weights.iter().all(|w| *w == T::zero()) {
            return Err(Error::InvalidWeights("at least one weight must be positive".into()));
        }
        Ok(Self { weights })
    }

    pub fn as_slice(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(self.weights.iter().map(|w| *w * c).collect())
    }
}

/// Factorized receive covariance for one power vector, with the coupling
/// coefficients `a_ij = h_i^H X^{-1} h_j` for all user pairs.
#[derive(Debug, Clone)]
pub struct ReceiveSolve<T> {
    powers: Vec<T>,
    whitened: Vec<Vec<C<T>>>,
    coupling: Vec<C<T>>,
}

impl<T: Real> ReceiveSolve<T> {
    pub fn new(h: &ChannelSet<T>, powers: &[T], cfg: &SystemConfig<T>) -> Result<Self> {
        let x = covariance_from_slice(h, powers, cfg)?;
        let chol = Cholesky::new(&x)?;
        let k = h.users();
        let whitened: Vec<Vec<C<T>>> = h.columns().iter().map(|hk| chol.solve(hk)).collect();
        let mut coupling = Vec::with_capacity(k * k);
        for i in 0..k {
            for u in &whitened {
                coupling.push(dotc(h.column(i), u));
            }
        }
        if coupling.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("coupling coefficients".into()));
        }
        Ok(Self {
            powers: powers.to_vec(),
            whitened,
            coupling,
        })
    }

    pub fn users(&self) -> usize {
        self.powers.len()
    }

    pub fn powers(&self) -> &[T] {
        &self.powers
    }

    /// `a_ij = h_i^H X^{-1} h_j`.
    #[inline]
    pub fn coupling(&self, i: usize, j: usize) -> C<T> {
        self.coupling[i * self.users() + j]
    }

    /// `X^{-1} h_k`.
    pub fn whitened(&self, k: usize) -> &[C<T>] {
        &self.whitened[k]
    }

    #[inline]
    pub fn mse(&self, k: usize) -> T {
        T::one() - self.powers[k] * self.coupling(k, k).re
    }

    pub fn mse_values(&self) -> Vec<T> {
        (0..self.users()).map(|k| self.mse(k)).collect()
    }

    /// `d eps_k / d p_j = -[k == j] a_kk + p_k |a_kj|^2`.
    #[inline]
    pub fn mse_partial(&self, k: usize, j: usize) -> T {
        let cross = self.powers[k] * self.coupling(k, j).norm_sqr();
        if k == j {
            cross - self.coupling(k, k).re
        } else {
            cross
        }
    }

    /// Gradient of `sum_l w_l eps_l` with respect to the powers.
    pub fn weighted_gradient(&self, w: &[T]) -> Vec<T> {
        let k = self.users();
        (0..k)
            .map(|j| {
                let interference: T = (0..k)
                    .map(|l| w[l] * self.powers[l] * self.coupling(l, j).norm_sqr())
                    .sum();
                interference - w[j] * self.coupling(j, j).re
            })
            .collect()
    }
}

fn covariance_from_slice<T: Real>(
    h: &ChannelSet<T>,
    powers: &[T],
    cfg: &SystemConfig<T>,
) -> Result<CMatrix<T>> {
    if powers.len() != h.users() {
        return Err(Error::DimensionMismatch(format!(
            "{} powers for {} users",
            powers.len(),
            h.users()
        )));
    }
    let mut x = CMatrix::scaled_identity(h.antennas(), cfg.noise_variance());
    for (hk, pk) in h.columns().iter().zip(powers) {
        if *pk != T::zero() {
            x.add_outer(*pk, hk);
        }
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("receive covariance".into()));
    }
    Ok(x)
}

fn check_weights<T: Real>(h: &ChannelSet<T>, w: &WeightVector<T>) -> Result<()> {
    if w.len() != h.users() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} users",
            w.len(),
            h.users()
        )));
    }
    Ok(())
}

/// `X = sigma^2 I_N + sum_k p_k h_k h_k^H`.
pub fn receive_covariance<T: Real>(
    h: &ChannelSet<T>,
    p: &PowerAllocation<T>,
    cfg: &SystemConfig<T>,
) -> Result<CMatrix<T>> {
    covariance_from_slice(h, p.as_slice(), cfg)
}

/// Per-user MMSE `eps_k = 1 - p_k h_k^H X^{-1} h_k`.
pub fn mse_tuple<T: Real>(
    h: &ChannelSet<T>,
    p: &PowerAllocation<T>,
    cfg: &SystemConfig<T>,
) -> Result<MseTuple<T>> {
    let solve = ReceiveSolve::new(h, p.as_slice(), cfg)?;
    MseTuple::new(solve.mse_values())
        .map_err(|e| Error::NonFinite(format!("MSE left its range through round-off: {e}")))
}

pub fn weighted_sum_mse<T: Real>(
    h: &ChannelSet<T>,
    p: &PowerAllocation<T>,
    cfg: &SystemConfig<T>,
    w: &WeightVector<T>,
) -> Result<T> {
    check_weights(h, w)?;
    let solve = ReceiveSolve::new(h, p.as_slice(), cfg)?;
    Ok(w
        .as_slice()
        .iter()
        .enumerate()
        .map(|(k, wk)| *wk * solve.mse(k))
        .sum())
}

/// `d/dp_k sum_l w_l eps_l = -w_k a_kk + sum_l w_l p_l |a_lk|^2`.
pub fn weighted_mse_gradient<T: Real>(
    h: &ChannelSet<T>,
    p: &PowerAllocation<T>,
    cfg: &SystemConfig<T>,
    w: &WeightVector<T>,
) -> Result<Vec<T>> {
    check_weights(h, w)?;
    let solve = ReceiveSolve::new(h, p.as_slice(), cfg)?;
    Ok(solve.weighted_gradient(w.as_slice()))
}

fn check_mse_range<T: Real>(eps: T) -> Result<()> {
    if eps > T::zero() && eps <= T::one() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("MSE {eps} is outside (0, 1]")))
    }
}

/// `SINR = 1/eps - 1`.
pub fn sinr_from_mse<T: Real>(eps: T) -> Result<T> {
    check_mse_range(eps)?;
    Ok(eps.recip() - T::one())
}

/// `R = -log2 eps`.
pub fn rate_from_mse<T: Real>(eps: T) -> Result<T> {
    check_mse_range(eps)?;
    Ok(-eps.log2())
}
