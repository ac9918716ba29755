//! Seeded random instances.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::boundary::TwoUserChannel;
use crate::error::Result;
use crate::linalg::C;
use crate::model::{ChannelSet, SystemConfig};
use crate::scalar::Real;

/// Circularly symmetric `CN(0, 1)` entries.
pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C<T>> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(T::lit(re * scale), T::lit(im * scale))
        })
        .collect()
}

pub fn gaussian_channel_set<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    antennas: usize,
    users: usize,
) -> Result<ChannelSet<T>> {
    ChannelSet::from_columns((0..users).map(|_| gaussian_vector(rng, antennas)).collect())
}

pub fn gaussian_two_user<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    antennas: usize,
) -> Result<TwoUserChannel<T>> {
    TwoUserChannel::new(gaussian_vector(rng, antennas), gaussian_vector(rng, antennas))
}

/// `h2 = alpha h1` with `alpha ~ CN(0, 1)`.
pub fn colinear_two_user<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    antennas: usize,
) -> Result<(TwoUserChannel<T>, C<T>)> {
    let h1 = gaussian_vector::<T, _>(rng, antennas);
    let alpha = gaussian_vector::<T, _>(rng, 1)[0];
    let h2 = h1.iter().map(|x| *x * alpha).collect();
    Ok((TwoUserChannel::new(h1, h2)?, alpha))
}

/// Log-uniform draw from `[lo, hi]`.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

/// `sigma^2` log-uniform on `[0.1, 10]`, `P_Tx` log-uniform on `[1, 100]`.
pub fn random_config<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Result<SystemConfig<T>> {
    let sigma2 = log_uniform(rng, 0.1, 10.0);
    let budget = log_uniform(rng, 1.0, 100.0);
    SystemConfig::new(T::lit(sigma2), T::lit(budget))
}
