//! Achievable MSE region of single-antenna users on a multiple-access
//! channel with linear MMSE reception.
//!
//! For channels `h_k`, noise variance `sigma^2` and powers `p` with
//! `sum p_k <= P`, user `k` sees `eps_k = 1 - p_k h_k^H X^-1 h_k` where
//! `X = sigma^2 I + sum_l p_l h_l h_l^H`. The crate provides:
//!
//! * [`model`]: the MSE map, its gradient and the receive covariance.
//! * [`boundary`]: the two-user boundary curve, its derivatives and a
//!   convexity certificate.
//! * [`kkt`]: weighted sum-MSE minimization with KKT certificates and
//!   multistart enumeration of stationary points.
//! * [`region`]: region sampling, dominated-membership tests and segment
//!   tests for nonconvexity.
//! * [`counterexample`]: a three-user instance whose region is not convex.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar.

pub mod boundary;
pub mod counterexample;
pub mod error;
pub mod io;
pub mod kkt;
pub mod linalg;
pub mod model;
pub mod optimize;
pub mod random;
pub mod region;
pub mod scalar;
pub mod simplex;

pub use boundary::{
    affine_boundary, colinearity_classify, convexity_discriminant, mse_first_derivatives,
    mse_second_derivatives, AffineBoundary, BoundarySample, ConvexityReport, CouplingBundle,
    Curvature, TwoUserChannel,
};
pub use error::{Error, Result};
pub use kkt::{
    certify, enumerate_stationary_points, kkt_residuals, minimize_weighted_sum_mse,
    KktCertificate, KktResiduals, SolverOptions, StationaryPoints,
};
pub use model::{
    mse_tuple, weighted_mse_gradient, weighted_sum_mse, ChannelSet, MseTuple, PowerAllocation,
    ReceiveSolve, SystemConfig, WeightVector,
};
pub use region::{
    dominated_membership, embed_inactive_users, sample_region, segment_test, MembershipOptions,
    MembershipVerdict, RegionSampleSet, SamplingMode, SegmentReport,
};
pub use scalar::Real;

pub type Channels = ChannelSet<f64>;
pub type Config = SystemConfig<f64>;
pub type Powers = PowerAllocation<f64>;
pub type Mse = MseTuple<f64>;
pub type Weights = WeightVector<f64>;
pub type TwoUser = TwoUserChannel<f64>;
pub type Certificate = KktCertificate<f64>;

pub type Channels32 = ChannelSet<f32>;
pub type Config32 = SystemConfig<f32>;
pub type Powers32 = PowerAllocation<f32>;
pub type Mse32 = MseTuple<f32>;
pub type Weights32 = WeightVector<f32>;
pub type TwoUser32 = TwoUserChannel<f32>;
