//! Secret-key generation rates from reciprocal channel estimates for
//! half-duplex and in-band full-duplex node pairs.
//!
//! * [`model`]: parameters and the joint covariance of the estimates.
//! * [`keyrate`]: Gaussian mutual-information rates and closed forms.
//! * [`montecarlo`]: signal-level and statistical simulation of the
//!   estimation process, and empirical rates from sample covariances.
//! * [`sweep`]: parameter studies and their CSV/JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod keyrate;
pub mod linalg;
pub mod model;
pub mod montecarlo;
pub mod sweep;

pub use error::{Error, Result};
pub use keyrate::{
    fd_covariance_determinant_closed_form, fd_key_rate, fd_key_rate_closed_form_symmetric,
    gaussian_key_rate, hd_high_snr_limit, hd_key_rate, hd_key_rate_closed_form, KeyRateResult,
    RatePath,
};
pub use model::{
    build_fd_covariance, build_hd_covariance, effective_rsi, ChannelParams, DuplexMode,
    EstimateCovariance, FrameParams, Node, RadioParams, RsiModel, TimeAccountingPolicy,
};
pub use montecarlo::{empirical_key_rate, FrameSimulator, McConfig, SimulationLevel};
pub use sweep::{run_sweep, PowerConvention, RateMode, SweepAxis, SweepResult, SweepSpec};
