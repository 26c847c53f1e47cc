//! Channel, radio and frame parameters, and the joint covariance of the
//! channel estimates held by Alice and Bob.
//!
//! Estimate coordinates are always ordered as follows:
//!
//! * half duplex: `(h1B, h2A)`, i.e. Bob's estimate of `h1` from Alice's pilots
//!   during `T1`, then Alice's estimate of `h2` from Bob's pilots during `T2`;
//! * full duplex: `(h1A, h2A, h1B, h2B)`.
//!
//! All gains are real, zero-mean Gaussian. Every noise term added to an
//! estimate is independent of the channel and of the other node's noise, so
//! the Alice/Bob cross block only ever holds channel statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Human-readable statement of the dB convention used everywhere.
pub const DB_CONVENTION: &str = "power dB: linear = 10^(dB/10)";

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParams(msg()))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    require(v.is_finite() && v > 0.0, || {
        format!("{name} must be finite and > 0 (got {v})")
    })
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    require(v.is_finite() && v >= 0.0, || {
        format!("{name} must be finite and >= 0 (got {v})")
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DuplexMode {
    Hd,
    Fd,
}

impl std::fmt::Display for DuplexMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DuplexMode::Hd => "HD",
            DuplexMode::Fd => "FD",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Alice,
    Bob,
}

impl Node {
    pub fn peer(self) -> Node {
        match self {
            Node::Alice => Node::Bob,
            Node::Bob => Node::Alice,
        }
    }
}

/// One channel-estimate coordinate: which gain, held by which node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coordinate {
    H1A,
    H2A,
    H1B,
    H2B,
}

impl Coordinate {
    pub fn name(self) -> &'static str {
        match self {
            Coordinate::H1A => "h1A",
            Coordinate::H2A => "h2A",
            Coordinate::H1B => "h1B",
            Coordinate::H2B => "h2B",
        }
    }

    pub fn holder(self) -> Node {
        match self {
            Coordinate::H1A | Coordinate::H2A => Node::Alice,
            Coordinate::H1B | Coordinate::H2B => Node::Bob,
        }
    }

    /// 1 for the `T1` gain, 2 for the `T2` gain.
    pub fn interval(self) -> u8 {
        match self {
            Coordinate::H1A | Coordinate::H1B => 1,
            Coordinate::H2A | Coordinate::H2B => 2,
        }
    }
}

pub const HD_COORDINATES: [Coordinate; 2] = [Coordinate::H1B, Coordinate::H2A];
pub const FD_COORDINATES: [Coordinate; 4] = [
    Coordinate::H1A,
    Coordinate::H2A,
    Coordinate::H1B,
    Coordinate::H2B,
];

// ---------------------------------------------------------------------------

/// Second-order statistics of the shared fading channel over one frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelParamsRaw")]
pub struct ChannelParams {
    sigma1_sq: f64,
    sigma2_sq: f64,
    rho: f64,
}

#[derive(Deserialize)]
struct ChannelParamsRaw {
    sigma1_sq: f64,
    sigma2_sq: f64,
    rho: f64,
}

impl TryFrom<ChannelParamsRaw> for ChannelParams {
    type Error = Error;
    fn try_from(raw: ChannelParamsRaw) -> Result<Self> {
        ChannelParams::new(raw.sigma1_sq, raw.sigma2_sq, raw.rho)
    }
}

impl ChannelParams {
    pub fn new(sigma1_sq: f64, sigma2_sq: f64, rho: f64) -> Result<Self> {
        positive("sigma1_sq", sigma1_sq)?;
        positive("sigma2_sq", sigma2_sq)?;
        require(rho.is_finite() && (-1.0..=1.0).contains(&rho), || {
            format!("rho must lie in [-1, 1] (got {rho})")
        })?;
        let ch = Self {
            sigma1_sq,
            sigma2_sq,
            rho,
        };
        let [[a, b], [_, d]] = ch.gain_covariance();
        require(a * d - b * b >= -1e-12 * a * d, || {
            "channel covariance is not positive semidefinite".into()
        })?;
        Ok(ch)
    }

    pub fn sigma1_sq(&self) -> f64 {
        self.sigma1_sq
    }

    pub fn sigma2_sq(&self) -> f64 {
        self.sigma2_sq
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `E[h1 h2] = ρ σ1 σ2`.
    pub fn cross_covariance(&self) -> f64 {
        self.rho * self.sigma1_sq.sqrt() * self.sigma2_sq.sqrt()
    }

    pub fn gain_covariance(&self) -> [[f64; 2]; 2] {
        let c = self.cross_covariance();
        [[self.sigma1_sq, c], [c, self.sigma2_sq]]
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.sigma1_sq, self.sigma2_sq, rho)
    }

    pub fn with_variances(&self, sigma1_sq: f64, sigma2_sq: f64) -> Result<Self> {
        Self::new(sigma1_sq, sigma2_sq, self.rho)
    }
}

// ---------------------------------------------------------------------------

/// How residual self-interference variances are specified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RsiModel {
    /// Fixed RSI variances at Alice and Bob.
    Explicit { alice_sq: f64, bob_sq: f64 },
    /// `σ_RSI² = η · P` at each node, with `P` that node's transmit power.
    Coupled { eta: f64 },
}

impl RsiModel {
    pub fn none() -> Self {
        RsiModel::Explicit {
            alice_sq: 0.0,
            bob_sq: 0.0,
        }
    }

    pub fn symmetric(rsi_sq: f64) -> Self {
        RsiModel::Explicit {
            alice_sq: rsi_sq,
            bob_sq: rsi_sq,
        }
    }
}

/// Transmit powers, thermal noise and residual self-interference. Powers and
/// variances are linear and per received symbol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RadioParamsRaw", into = "RadioParamsRaw")]
pub struct RadioParams {
    p_a: f64,
    p_b: f64,
    noise_sq: f64,
    rsi: RsiModel,
}

#[derive(Clone, Serialize, Deserialize)]
struct RadioParamsRaw {
    p_a: f64,
    p_b: f64,
    noise_sq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rsi_a_sq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rsi_b_sq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta: Option<f64>,
}

impl TryFrom<RadioParamsRaw> for RadioParams {
    type Error = Error;
    fn try_from(r: RadioParamsRaw) -> Result<Self> {
        RadioParams::from_options(r.p_a, r.p_b, r.noise_sq, r.rsi_a_sq, r.rsi_b_sq, r.eta)
    }
}

impl From<RadioParams> for RadioParamsRaw {
    fn from(r: RadioParams) -> Self {
        let (rsi_a_sq, rsi_b_sq, eta) = match r.rsi {
            RsiModel::Explicit { alice_sq, bob_sq } => (Some(alice_sq), Some(bob_sq), None),
            RsiModel::Coupled { eta } => (None, None, Some(eta)),
        };
        RadioParamsRaw {
            p_a: r.p_a,
            p_b: r.p_b,
            noise_sq: r.noise_sq,
            rsi_a_sq,
            rsi_b_sq,
            eta,
        }
    }
}

impl RadioParams {
    pub fn new(p_a: f64, p_b: f64, noise_sq: f64, rsi: RsiModel) -> Result<Self> {
        positive("p_a", p_a)?;
        positive("p_b", p_b)?;
        positive("noise_sq", noise_sq)?;
        match rsi {
            RsiModel::Explicit { alice_sq, bob_sq } => {
                non_negative("rsi_a_sq", alice_sq)?;
                non_negative("rsi_b_sq", bob_sq)?;
            }
            RsiModel::Coupled { eta } => non_negative("eta", eta)?,
        }
        Ok(Self {
            p_a,
            p_b,
            noise_sq,
            rsi,
        })
    }

    /// Flat form: explicit RSI values and `eta` are mutually exclusive.
    /// Missing explicit values default to zero.
    pub fn from_options(
        p_a: f64,
        p_b: f64,
        noise_sq: f64,
        rsi_a_sq: Option<f64>,
        rsi_b_sq: Option<f64>,
        eta: Option<f64>,
    ) -> Result<Self> {
        let rsi = match (eta, rsi_a_sq.is_some() || rsi_b_sq.is_some()) {
            (Some(_), true) => {
                return Err(Error::InvalidParams(
                    "explicit RSI variances and eta coupling are mutually exclusive".into(),
                ))
            }
            (Some(eta), false) => RsiModel::Coupled { eta },
            (None, _) => RsiModel::Explicit {
                alice_sq: rsi_a_sq.unwrap_or(0.0),
                bob_sq: rsi_b_sq.unwrap_or(0.0),
            },
        };
        Self::new(p_a, p_b, noise_sq, rsi)
    }

    pub fn power(&self, node: Node) -> f64 {
        match node {
            Node::Alice => self.p_a,
            Node::Bob => self.p_b,
        }
    }

    pub fn p_a(&self) -> f64 {
        self.p_a
    }

    pub fn p_b(&self) -> f64 {
        self.p_b
    }

    pub fn noise_sq(&self) -> f64 {
        self.noise_sq
    }

    pub fn rsi(&self) -> RsiModel {
        self.rsi
    }

    pub fn eta(&self) -> Option<f64> {
        match self.rsi {
            RsiModel::Coupled { eta } => Some(eta),
            RsiModel::Explicit { .. } => None,
        }
    }

    /// RSI variance seen at `node`.
    pub fn effective_rsi(&self, node: Node) -> f64 {
        match self.rsi {
            RsiModel::Coupled { eta } => eta * self.power(node),
            RsiModel::Explicit { alice_sq, bob_sq } => match node {
                Node::Alice => alice_sq,
                Node::Bob => bob_sq,
            },
        }
    }

    /// Total estimation noise at a full-duplex node, `σ_RSI² + σ²`.
    pub fn fd_noise_sq(&self, node: Node) -> f64 {
        self.effective_rsi(node) + self.noise_sq
    }

    pub fn with_powers(&self, p_a: f64, p_b: f64) -> Result<Self> {
        Self::new(p_a, p_b, self.noise_sq, self.rsi)
    }

    pub fn with_noise_sq(&self, noise_sq: f64) -> Result<Self> {
        Self::new(self.p_a, self.p_b, noise_sq, self.rsi)
    }

    pub fn with_rsi(&self, rsi: RsiModel) -> Result<Self> {
        Self::new(self.p_a, self.p_b, self.noise_sq, rsi)
    }

    /// Alice and Bob exchange roles.
    pub fn swapped(&self) -> Self {
        let rsi = match self.rsi {
            RsiModel::Explicit { alice_sq, bob_sq } => RsiModel::Explicit {
                alice_sq: bob_sq,
                bob_sq: alice_sq,
            },
            coupled => coupled,
        };
        Self {
            p_a: self.p_b,
            p_b: self.p_a,
            noise_sq: self.noise_sq,
            rsi,
        }
    }
}

/// RSI variance at `node`: `η·P_node` when coupled, the explicit value otherwise.
pub fn effective_rsi(radio: &RadioParams, node: Node) -> f64 {
    radio.effective_rsi(node)
}

// ---------------------------------------------------------------------------

/// Key-agreement frame: total length `T = T1 + T2` in symbols (real valued)
/// and the fraction `alpha` spent on self-interference estimation in FD mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameParamsRaw")]
pub struct FrameParams {
    t_total: f64,
    t1: f64,
    t2: f64,
    alpha: f64,
    mode: DuplexMode,
}

#[derive(Deserialize)]
struct FrameParamsRaw {
    t_total: f64,
    t1: f64,
    t2: f64,
    alpha: f64,
    mode: DuplexMode,
}

impl TryFrom<FrameParamsRaw> for FrameParams {
    type Error = Error;
    fn try_from(r: FrameParamsRaw) -> Result<Self> {
        FrameParams::new(r.t_total, r.t1, r.t2, r.alpha, r.mode)
    }
}

impl FrameParams {
    pub fn new(t_total: f64, t1: f64, t2: f64, alpha: f64, mode: DuplexMode) -> Result<Self> {
        positive("t1", t1)?;
        positive("t2", t2)?;
        positive("t_total", t_total)?;
        require((t1 + t2 - t_total).abs() <= 1e-12 * t_total, || {
            format!("t1 + t2 must equal t_total ({t1} + {t2} != {t_total})")
        })?;
        require(alpha.is_finite() && (0.0..1.0).contains(&alpha), || {
            format!("alpha must lie in [0, 1) (got {alpha})")
        })?;
        require(mode == DuplexMode::Fd || alpha == 0.0, || {
            format!("alpha must be 0 in HD mode (got {alpha})")
        })?;
        Ok(Self {
            t_total,
            t1,
            t2,
            alpha,
            mode,
        })
    }

    pub fn hd(t1: f64, t2: f64) -> Result<Self> {
        Self::new(t1 + t2, t1, t2, 0.0, DuplexMode::Hd)
    }

    pub fn fd(t1: f64, t2: f64, alpha: f64) -> Result<Self> {
        Self::new(t1 + t2, t1, t2, alpha, DuplexMode::Fd)
    }

    pub fn t_total(&self) -> f64 {
        self.t_total
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mode(&self) -> DuplexMode {
        self.mode
    }

    /// Same interval lengths in HD mode (alpha dropped).
    pub fn as_hd(&self) -> Self {
        Self {
            alpha: 0.0,
            mode: DuplexMode::Hd,
            ..*self
        }
    }

    /// Same interval lengths in FD mode with the given overhead.
    pub fn as_fd(&self, alpha: f64) -> Result<Self> {
        Self::new(self.t_total, self.t1, self.t2, alpha, DuplexMode::Fd)
    }
}

/// Maps the frame layout and `alpha` to the effective pilot lengths behind
/// each full-duplex estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeAccountingPolicy {
    /// Each of the four estimates sees `(1-α)T/2` pilot symbols.
    #[default]
    Uniform,
    /// `T1` estimates use `T1-αT` symbols for thermal noise and `T1-2αT` for
    /// RSI; `T2` estimates use `T2`.
    #[serde(rename = "appendix")]
    AppendixLiteral,
}

impl std::fmt::Display for TimeAccountingPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TimeAccountingPolicy::Uniform => "uniform",
            TimeAccountingPolicy::AppendixLiteral => "appendix",
        })
    }
}

// ---------------------------------------------------------------------------

/// Which coordinates of a joint covariance belong to which node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl Partition {
    pub fn hd() -> Self {
        Self::from_coordinates(&HD_COORDINATES)
    }

    pub fn fd() -> Self {
        Self::from_coordinates(&FD_COORDINATES)
    }

    pub fn from_coordinates(coords: &[Coordinate]) -> Self {
        let pick = |node| {
            coords
                .iter()
                .enumerate()
                .filter(|(_, c)| c.holder() == node)
                .map(|(i, _)| i)
                .collect()
        };
        Self {
            alice: pick(Node::Alice),
            bob: pick(Node::Bob),
        }
    }

    /// Both blocks non-empty, disjoint, and together covering `0..dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.alice.is_empty() || self.bob.is_empty() {
            return Err(Error::PartitionMismatch(
                "both blocks must be non-empty".into(),
            ));
        }
        let mut seen = vec![false; dim];
        for &i in self.alice.iter().chain(&self.bob) {
            if i >= dim {
                return Err(Error::PartitionMismatch(format!(
                    "index {i} out of range for dimension {dim}"
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::PartitionMismatch(format!("index {i} appears twice")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::PartitionMismatch(format!(
                "blocks do not cover all {dim} coordinates"
            )));
        }
        Ok(())
    }
}

/// Joint covariance of the estimates at both nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateCovariance {
    matrix: Matrix,
    partition: Partition,
    frame_time: f64,
}

impl EstimateCovariance {
    /// Validates symmetry, the partition, and positive definiteness.
    pub fn new(matrix: Matrix, partition: Partition, frame_time: f64) -> Result<Self> {
        partition.validate(matrix.dim())?;
        positive("frame_time", frame_time)?;
        if !matrix.is_finite() {
            return Err(Error::InvalidParams(
                "covariance has non-finite entries".into(),
            ));
        }
        if !matrix.is_symmetric() {
            return Err(Error::InvalidParams("covariance is not symmetric".into()));
        }
        if matrix.cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self {
            matrix,
            partition,
            frame_time,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn frame_time(&self) -> f64 {
        self.frame_time
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// HD when each node holds a single scalar estimate, FD otherwise.
    pub fn mode(&self) -> DuplexMode {
        if self.partition.alice.len() == 1 && self.partition.bob.len() == 1 {
            DuplexMode::Hd
        } else {
            DuplexMode::Fd
        }
    }

    pub fn alice_block(&self) -> Matrix {
        self.matrix
            .submatrix(&self.partition.alice, &self.partition.alice)
    }

    pub fn bob_block(&self) -> Matrix {
        self.matrix
            .submatrix(&self.partition.bob, &self.partition.bob)
    }

    /// Rows from Alice's coordinates, columns from Bob's. Only defined for
    /// equal block sizes, which is every case this crate builds.
    pub fn cross_block(&self) -> Option<Matrix> {
        (self.partition.alice.len() == self.partition.bob.len()).then(|| {
            self.matrix
                .submatrix(&self.partition.alice, &self.partition.bob)
        })
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.matrix.scaled(factor),
            self.partition.clone(),
            self.frame_time,
        )
    }
}

// ---------------------------------------------------------------------------

/// Estimation-noise variances of `(h1B, h2A)`: `σ²/(P_A T1)` and `σ²/(P_B T2)`.
pub fn hd_noise_variances(radio: &RadioParams, frame: &FrameParams) -> [f64; 2] {
    let n = radio.noise_sq();
    [
        n / (radio.p_a() * frame.t1()),
        n / (radio.p_b() * frame.t2()),
    ]
}

/// Estimation-noise variances of `(h1A, h2A, h1B, h2B)` under `policy`.
pub fn fd_noise_variances(
    radio: &RadioParams,
    frame: &FrameParams,
    policy: TimeAccountingPolicy,
) -> Result<[f64; 4]> {
    let t = frame.t_total();
    let alpha = frame.alpha();
    // Node X estimates from node Y's pilots.
    let pilot_power = |x: Node| radio.power(x.peer());
    match policy {
        TimeAccountingPolicy::Uniform => {
            let window = (1.0 - alpha) * t;
            if !(window > 0.0) {
                return Err(Error::NonPositiveEffectiveTime {
                    expression: "(1 - alpha)*T",
                    value: window,
                });
            }
            let add = |x: Node| 2.0 * radio.fd_noise_sq(x) / (pilot_power(x) * window);
            let (a, b) = (add(Node::Alice), add(Node::Bob));
            Ok([a, a, b, b])
        }
        TimeAccountingPolicy::AppendixLiteral => {
            let rsi_window = frame.t1() - 2.0 * alpha * t;
            if !(rsi_window > 0.0) {
                return Err(Error::NonPositiveEffectiveTime {
                    expression: "T1 - 2*alpha*T",
                    value: rsi_window,
                });
            }
            let thermal_window = frame.t1() - alpha * t;
            if !(thermal_window > 0.0) {
                return Err(Error::NonPositiveEffectiveTime {
                    expression: "T1 - alpha*T",
                    value: thermal_window,
                });
            }
            let noise = radio.noise_sq();
            let first = |x: Node| {
                let p = pilot_power(x);
                radio.effective_rsi(x) / (p * rsi_window) + noise / (p * thermal_window)
            };
            let second = |x: Node| radio.fd_noise_sq(x) / (pilot_power(x) * frame.t2());
            Ok([
                first(Node::Alice),
                second(Node::Alice),
                first(Node::Bob),
                second(Node::Bob),
            ])
        }
    }
}

/// HD covariance entries for given noise add-ons `[h1B, h2A]`. No
/// definiteness check.
pub fn hd_matrix(ch: &ChannelParams, noise: [f64; 2]) -> [[f64; 2]; 2] {
    let c = ch.cross_covariance();
    [
        [ch.sigma1_sq() + noise[0], c],
        [c, ch.sigma2_sq() + noise[1]],
    ]
}

/// FD covariance entries for given noise add-ons `[h1A, h2A, h1B, h2B]`. No
/// definiteness check.
pub fn fd_matrix(ch: &ChannelParams, noise: [f64; 4]) -> [[f64; 4]; 4] {
    let g = ch.gain_covariance();
    let mut m = [[0.0; 4]; 4];
    for (i, ci) in FD_COORDINATES.iter().enumerate() {
        for (j, cj) in FD_COORDINATES.iter().enumerate() {
            m[i][j] = g[(ci.interval() - 1) as usize][(cj.interval() - 1) as usize];
        }
        m[i][i] += noise[i];
    }
    m
}

pub fn assemble_hd(
    ch: &ChannelParams,
    noise: [f64; 2],
    frame_time: f64,
) -> Result<EstimateCovariance> {
    EstimateCovariance::new(
        Matrix::from_array(hd_matrix(ch, noise)),
        Partition::hd(),
        frame_time,
    )
}

pub fn assemble_fd(
    ch: &ChannelParams,
    noise: [f64; 4],
    frame_time: f64,
) -> Result<EstimateCovariance> {
    EstimateCovariance::new(
        Matrix::from_array(fd_matrix(ch, noise)),
        Partition::fd(),
        frame_time,
    )
}

/// Covariance of `(h1B, h2A)` for a half-duplex frame.
pub fn build_hd_covariance(
    ch: &ChannelParams,
    radio: &RadioParams,
    frame: &FrameParams,
) -> Result<EstimateCovariance> {
    if frame.mode() != DuplexMode::Hd {
        return Err(Error::InvalidParams(
            "HD covariance requires an HD frame".into(),
        ));
    }
    assemble_hd(ch, hd_noise_variances(radio, frame), frame.t_total())
}

/// Covariance of `(h1A, h2A, h1B, h2B)` for a full-duplex frame.
pub fn build_fd_covariance(
    ch: &ChannelParams,
    radio: &RadioParams,
    frame: &FrameParams,
    policy: TimeAccountingPolicy,
) -> Result<EstimateCovariance> {
    if frame.mode() != DuplexMode::Fd {
        return Err(Error::InvalidParams(
            "FD covariance requires an FD frame".into(),
        ));
    }
    assemble_fd(
        ch,
        fd_noise_variances(radio, frame, policy)?,
        frame.t_total(),
    )
}
