//! Simulation of the channel-probing process and empirical key rates.
//!
//! Two simulation levels are available:
//!
//! * `SignalLevel` builds pilot sequences, adds per-symbol thermal noise and
//!   residual self-interference, and applies the matched filter
//!   `h̃ = Sᵀ Y / ||S||²`. Fractional windows are rounded to whole symbols
//!   (ties to even), and [`FrameSimulator::analytic_covariance`] reflects the
//!   rounded windows.
//! * `Statistical` draws each estimate as `h + e` with `e` Gaussian of the
//!   exact real-valued variance from [`crate::model`].
//!
//! # Random streams
//!
//! Every trial owns independent ChaCha8 streams keyed by the run seed (the
//! 32-byte key is the little-endian seed, zero padded). The stream id is
//! `trial << 3 | tag`, with tags 0 = channel gains, 1 = Alice thermal,
//! 2 = Alice RSI, 3 = Bob thermal, 4 = Bob RSI. A node draws its interval-1
//! noise before its interval-2 noise. Trials are generated in fixed-size
//! chunks and concatenated in trial order, so samples do not depend on the
//! number of worker threads.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyrate::{gaussian_key_rate, KeyRateResult, RatePath};
use crate::linalg::Matrix;
use crate::model::{
    assemble_fd, assemble_hd, fd_noise_variances, hd_noise_variances, ChannelParams, Coordinate,
    DuplexMode, EstimateCovariance, FrameParams, Node, Partition, RadioParams,
    TimeAccountingPolicy, FD_COORDINATES, HD_COORDINATES,
};

const CHUNK_TRIALS: usize = 8192;
const SE_BATCHES: usize = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimulationLevel {
    #[default]
    Statistical,
    #[serde(rename = "signal")]
    SignalLevel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_trials: usize,
    pub seed: u64,
    pub level: SimulationLevel,
}

impl McConfig {
    pub fn new(n_trials: usize, seed: u64, level: SimulationLevel) -> Result<Self> {
        let config = Self {
            n_trials,
            seed,
            level,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials < 2 {
            return Err(Error::InvalidParams(format!(
                "n_trials must be >= 2 (got {})",
                self.n_trials
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
enum StreamTag {
    Channel = 0,
    AliceThermal = 1,
    AliceRsi = 2,
    BobThermal = 3,
    BobRsi = 4,
}

/// Handle on the random streams of one trial.
#[derive(Clone, Copy, Debug)]
pub struct TrialStreams {
    key: [u8; 32],
    trial: u64,
}

impl TrialStreams {
    pub fn new(seed: u64, trial: u64) -> Self {
        assert!(trial < 1 << 61, "trial index out of range");
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Self { key, trial }
    }

    fn rng(&self, tag: StreamTag) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream((self.trial << 3) | tag as u64);
        rng
    }

    /// Stream for channel-gain draws.
    pub fn channel_rng(&self) -> ChaCha8Rng {
        self.rng(StreamTag::Channel)
    }
}

/// Jointly Gaussian `(h1, h2)` with covariance `[[σ1², ρσ1σ2], [ρσ1σ2, σ2²]]`,
/// via the Cholesky factor of that matrix.
pub fn sample_channel_pair<R: Rng + ?Sized>(rng: &mut R, ch: &ChannelParams) -> (f64, f64) {
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    let rho = ch.rho();
    let h1 = ch.sigma1_sq().sqrt() * z1;
    let h2 = ch.sigma2_sq().sqrt() * (rho * z1 + (1.0 - rho * rho).max(0.0).sqrt() * z2);
    (h1, h2)
}

fn rounded_window(length: f64) -> Result<usize> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::ZeroLengthWindow { length });
    }
    let n = length.round_ties_even();
    if n < 1.0 {
        return Err(Error::ZeroLengthWindow { length });
    }
    Ok(n as usize)
}

/// Known training symbols of one sensing window.
#[derive(Clone, Debug, PartialEq)]
pub struct PilotSequence {
    symbols: Vec<f64>,
    requested_length: f64,
}

impl PilotSequence {
    pub fn symbols(&self) -> &[f64] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `||S||²`
    pub fn energy(&self) -> f64 {
        self.symbols.iter().map(|s| s * s).sum()
    }

    pub fn requested_length(&self) -> f64 {
        self.requested_length
    }

    /// Rounded over requested length; scales the analytic `P·L` energy.
    pub fn length_correction(&self) -> f64 {
        self.symbols.len() as f64 / self.requested_length
    }
}

/// Alternating `±sqrt(power)` pilots over the rounded window.
pub fn generate_training_sequence(length_symbols: f64, power: f64) -> Result<PilotSequence> {
    if !(power.is_finite() && power > 0.0) {
        return Err(Error::InvalidParams(format!(
            "pilot power must be > 0 (got {power})"
        )));
    }
    let n = rounded_window(length_symbols)?;
    let amp = power.sqrt();
    Ok(PilotSequence {
        symbols: (0..n)
            .map(|k| if k % 2 == 0 { amp } else { -amp })
            .collect(),
        requested_length: length_symbols,
    })
}

/// `Sᵀ Y / ||S||²`
pub fn matched_filter_estimate(pilots: &[f64], received: &[f64]) -> Result<f64> {
    if pilots.len() != received.len() {
        return Err(Error::LengthMismatch {
            pilots: pilots.len(),
            received: received.len(),
        });
    }
    let energy: f64 = pilots.iter().map(|s| s * s).sum();
    if !(energy > 0.0) {
        return Err(Error::ZeroPilotEnergy);
    }
    let corr: f64 = pilots.iter().zip(received).map(|(s, y)| s * y).sum();
    Ok(corr / energy)
}

#[derive(Clone, Debug)]
enum EstimatePlan {
    Direct {
        std: f64,
    },
    Pilots {
        pilots: PilotSequence,
        thermal_std: f64,
        /// Per-symbol RSI standard deviation (0 where RSI-free).
        rsi_std: Vec<f64>,
    },
}

impl EstimatePlan {
    fn direct(variance: f64) -> Self {
        EstimatePlan::Direct {
            std: variance.sqrt(),
        }
    }

    fn pilots(pilots: PilotSequence, noise_sq: f64, rsi_std: Vec<f64>) -> Self {
        debug_assert_eq!(pilots.len(), rsi_std.len());
        EstimatePlan::Pilots {
            pilots,
            thermal_std: noise_sq.sqrt(),
            rsi_std,
        }
    }

    fn error_variance(&self) -> f64 {
        match self {
            EstimatePlan::Direct { std } => std * std,
            EstimatePlan::Pilots {
                pilots,
                thermal_std,
                rsi_std,
            } => {
                let e = pilots.energy();
                pilots
                    .symbols()
                    .iter()
                    .zip(rsi_std)
                    .map(|(s, r)| s * s * (thermal_std * thermal_std + r * r))
                    .sum::<f64>()
                    / (e * e)
            }
        }
    }

    fn estimate(&self, h: f64, rngs: &mut NodeRngs, received: &mut Vec<f64>) -> f64 {
        match self {
            EstimatePlan::Direct { std } => {
                let z: f64 = rngs.thermal.sample(StandardNormal);
                h + std * z
            }
            EstimatePlan::Pilots {
                pilots,
                thermal_std,
                rsi_std,
            } => {
                received.clear();
                for (s, r) in pilots.symbols().iter().zip(rsi_std) {
                    let z: f64 = rngs.thermal.sample(StandardNormal);
                    let mut y = h * s + thermal_std * z;
                    if *r > 0.0 {
                        let w: f64 = rngs.rsi.sample(StandardNormal);
                        y += r * w;
                    }
                    received.push(y);
                }
                matched_filter_estimate(pilots.symbols(), received)
                    .expect("pilot plans have matching lengths and positive energy")
            }
        }
    }
}

struct NodeRngs {
    thermal: ChaCha8Rng,
    rsi: ChaCha8Rng,
}

impl NodeRngs {
    fn new(streams: &TrialStreams, node: Node) -> Self {
        let (t, r) = match node {
            Node::Alice => (StreamTag::AliceThermal, StreamTag::AliceRsi),
            Node::Bob => (StreamTag::BobThermal, StreamTag::BobRsi),
        };
        Self {
            thermal: streams.rng(t),
            rsi: streams.rng(r),
        }
    }
}

/// Per-trial estimate vectors in partition order.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateSamples {
    coordinates: Vec<Coordinate>,
    data: Vec<f64>,
}

impl EstimateSamples {
    /// `data` is row-major, one row of `coordinates.len()` values per trial.
    pub fn new(coordinates: Vec<Coordinate>, data: Vec<f64>) -> Result<Self> {
        let dim = coordinates.len();
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidParams(
                "sample data is not a whole number of rows".into(),
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("samples must be finite".into()));
        }
        Partition::from_coordinates(&coordinates).validate(dim)?;
        Ok(Self { coordinates, data })
    }

    pub fn coordinates(&self) -> &[Coordinate] {
        &self.coordinates
    }

    pub fn partition(&self) -> Partition {
        Partition::from_coordinates(&self.coordinates)
    }

    pub fn dim(&self) -> usize {
        self.coordinates.len()
    }

    pub fn n_trials(&self) -> usize {
        self.data.len() / self.dim()
    }

    pub fn row(&self, trial: usize) -> &[f64] {
        let d = self.dim();
        &self.data[trial * d..(trial + 1) * d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim())
    }

    fn slice(&self, range: std::ops::Range<usize>) -> EstimateSamples {
        let d = self.dim();
        EstimateSamples {
            coordinates: self.coordinates.clone(),
            data: self.data[range.start * d..range.end * d].to_vec(),
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim()];
        for row in self.rows() {
            for (acc, v) in m.iter_mut().zip(row) {
                *acc += v;
            }
        }
        let n = self.n_trials() as f64;
        m.iter_mut().for_each(|v| *v /= n);
        m
    }

    /// Unbiased sample covariance, accumulated in trial order.
    pub fn sample_covariance(&self) -> Matrix {
        let d = self.dim();
        let mean = self.mean();
        let mut acc = vec![0.0; d * d];
        let mut centered = vec![0.0; d];
        for row in self.rows() {
            for k in 0..d {
                centered[k] = row[k] - mean[k];
            }
            for i in 0..d {
                for j in i..d {
                    acc[i * d + j] += centered[i] * centered[j];
                }
            }
        }
        let denom = (self.n_trials() - 1) as f64;
        Matrix::from_fn(d, |i, j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            acc[a * d + b] / denom
        })
    }

    /// Header of coordinate names, then one row per trial.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.coordinates.iter().map(|c| c.name()))?;
        for row in self.rows() {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Empirical rate: unbiased sample covariance fed to the Gaussian MI formula.
pub fn empirical_key_rate(samples: &EstimateSamples, frame_time: f64) -> Result<KeyRateResult> {
    let n = samples.n_trials();
    if n < samples.dim() + 1 {
        return Err(Error::InvalidParams(format!(
            "need at least {} trials for a {}-dimensional sample covariance (got {n})",
            samples.dim() + 1,
            samples.dim()
        )));
    }
    let cov = EstimateCovariance::new(samples.sample_covariance(), samples.partition(), frame_time)
        .map_err(|e| match e {
            Error::NotPositiveDefinite => Error::SingularSampleCovariance,
            other => other,
        })?;
    let mut result = gaussian_key_rate(&cov).map_err(|e| match e {
        Error::SingularCovariance { .. } | Error::NotPositiveDefinite => {
            Error::SingularSampleCovariance
        }
        other => other,
    })?;
    result.path = RatePath::MonteCarlo;
    Ok(result)
}

/// Batch-means standard error of the empirical rate: the trials are split
/// into up to 20 contiguous batches and the spread of the per-batch rates is
/// scaled by `1/sqrt(batches)`. `None` when there are too few trials.
pub fn batch_standard_error(samples: &EstimateSamples, frame_time: f64) -> Result<Option<f64>> {
    let n = samples.n_trials();
    let batches = SE_BATCHES.min(n / (samples.dim() + 2));
    if batches < 2 {
        return Ok(None);
    }
    let size = n / batches;
    let rates = (0..batches)
        .map(|b| {
            empirical_key_rate(&samples.slice(b * size..(b + 1) * size), frame_time).map(|r| r.rate)
        })
        .collect::<Result<Vec<_>>>()?;
    let k = rates.len() as f64;
    let mean = rates.iter().sum::<f64>() / k;
    let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Ok(Some((var / k).sqrt()))
}

/// One entry of a sample-vs-analytic covariance comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryCheck {
    pub row: usize,
    pub col: usize,
    pub sample: f64,
    pub analytic: f64,
    /// `max(2% of |analytic|, 3 standard errors)`
    pub tolerance: f64,
    pub within: bool,
}

/// Entrywise comparison on the upper triangle. The standard error of a
/// Gaussian sample covariance entry is `sqrt((C_ii C_jj + C_ij²)/N)`.
pub fn covariance_agreement(
    sample: &Matrix,
    analytic: &Matrix,
    n_trials: usize,
) -> Vec<EntryCheck> {
    let d = analytic.dim();
    let n = n_trials as f64;
    let mut checks = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        for j in i..d {
            let a = analytic.get(i, j);
            let se = ((analytic.get(i, i) * analytic.get(j, j) + a * a) / n).sqrt();
            let tolerance = (0.02 * a.abs()).max(3.0 * se);
            let s = sample.get(i, j);
            checks.push(EntryCheck {
                row: i,
                col: j,
                sample: s,
                analytic: a,
                tolerance,
                within: (s - a).abs() <= tolerance,
            });
        }
    }
    checks
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub n_trials: usize,
    pub empirical: KeyRateResult,
    pub analytic: KeyRateResult,
    /// `|empirical - analytic| / analytic`
    pub relative_gap: f64,
    pub standard_error: Option<f64>,
    pub covariance: Vec<EntryCheck>,
}

/// Simulates frames of one fixed configuration.
#[derive(Clone, Debug)]
pub struct FrameSimulator {
    channel: ChannelParams,
    mode: DuplexMode,
    coordinates: Vec<Coordinate>,
    plans: Vec<EstimatePlan>,
    frame_time: f64,
}

impl FrameSimulator {
    pub fn hd(
        ch: &ChannelParams,
        radio: &RadioParams,
        frame: &FrameParams,
        level: SimulationLevel,
    ) -> Result<Self> {
        if frame.mode() != DuplexMode::Hd {
            return Err(Error::InvalidParams(
                "HD simulation requires an HD frame".into(),
            ));
        }
        let plans = match level {
            SimulationLevel::Statistical => hd_noise_variances(radio, frame)
                .into_iter()
                .map(EstimatePlan::direct)
                .collect(),
            SimulationLevel::SignalLevel => {
                // Bob hears Alice over T1; Alice hears Bob over T2.
                let windows = [(frame.t1(), radio.p_a()), (frame.t2(), radio.p_b())];
                windows
                    .into_iter()
                    .map(|(len, p)| {
                        let pilots = generate_training_sequence(len, p)?;
                        let n = pilots.len();
                        Ok(EstimatePlan::pilots(pilots, radio.noise_sq(), vec![0.0; n]))
                    })
                    .collect::<Result<_>>()?
            }
        };
        Ok(Self {
            channel: *ch,
            mode: DuplexMode::Hd,
            coordinates: HD_COORDINATES.to_vec(),
            plans,
            frame_time: frame.t_total(),
        })
    }

    pub fn fd(
        ch: &ChannelParams,
        radio: &RadioParams,
        frame: &FrameParams,
        policy: TimeAccountingPolicy,
        level: SimulationLevel,
    ) -> Result<Self> {
        if frame.mode() != DuplexMode::Fd {
            return Err(Error::InvalidParams(
                "FD simulation requires an FD frame".into(),
            ));
        }
        let variances = fd_noise_variances(radio, frame, policy)?;
        let plans = match level {
            SimulationLevel::Statistical => {
                variances.into_iter().map(EstimatePlan::direct).collect()
            }
            SimulationLevel::SignalLevel => FD_COORDINATES
                .iter()
                .map(|&c| fd_signal_plan(c, radio, frame, policy))
                .collect::<Result<_>>()?,
        };
        Ok(Self {
            channel: *ch,
            mode: DuplexMode::Fd,
            coordinates: FD_COORDINATES.to_vec(),
            plans,
            frame_time: frame.t_total(),
        })
    }

    pub fn mode(&self) -> DuplexMode {
        self.mode
    }

    pub fn coordinates(&self) -> &[Coordinate] {
        &self.coordinates
    }

    pub fn frame_time(&self) -> f64 {
        self.frame_time
    }

    /// Estimation-noise variance of each coordinate as simulated.
    pub fn noise_variances(&self) -> Vec<f64> {
        self.plans
            .iter()
            .map(EstimatePlan::error_variance)
            .collect()
    }

    /// Exact covariance of the simulated estimates (rounded windows included).
    pub fn analytic_covariance(&self) -> Result<EstimateCovariance> {
        let v = self.noise_variances();
        match self.mode {
            DuplexMode::Hd => assemble_hd(&self.channel, [v[0], v[1]], self.frame_time),
            DuplexMode::Fd => assemble_fd(&self.channel, [v[0], v[1], v[2], v[3]], self.frame_time),
        }
    }

    /// Writes one trial's estimates into `out` (length = number of coordinates).
    pub fn simulate_trial(&self, streams: &TrialStreams, out: &mut [f64]) {
        let mut scratch = Vec::new();
        self.simulate_into(streams, out, &mut scratch);
    }

    fn simulate_into(&self, streams: &TrialStreams, out: &mut [f64], scratch: &mut Vec<f64>) {
        let (h1, h2) = sample_channel_pair(&mut streams.channel_rng(), &self.channel);
        let mut alice = NodeRngs::new(streams, Node::Alice);
        let mut bob = NodeRngs::new(streams, Node::Bob);
        for ((slot, coord), plan) in out.iter_mut().zip(&self.coordinates).zip(&self.plans) {
            let h = if coord.interval() == 1 { h1 } else { h2 };
            let rngs = match coord.holder() {
                Node::Alice => &mut alice,
                Node::Bob => &mut bob,
            };
            *slot = plan.estimate(h, rngs, scratch);
        }
    }

    /// Runs `config.n_trials` independent frames.
    pub fn run(&self, config: &McConfig) -> Result<EstimateSamples> {
        config.validate()?;
        let d = self.coordinates.len();
        let n = config.n_trials;
        let chunks: Vec<Vec<f64>> = (0..n.div_ceil(CHUNK_TRIALS))
            .into_par_iter()
            .map(|c| {
                let start = c * CHUNK_TRIALS;
                let end = (start + CHUNK_TRIALS).min(n);
                let mut buf = vec![0.0; (end - start) * d];
                let mut scratch = Vec::new();
                for (t, out) in (start..end).zip(buf.chunks_exact_mut(d)) {
                    self.simulate_into(
                        &TrialStreams::new(config.seed, t as u64),
                        out,
                        &mut scratch,
                    );
                }
                buf
            })
            .collect();
        EstimateSamples::new(self.coordinates.clone(), chunks.concat())
    }

    /// Empirical rate, analytic rate, their gap, and the covariance check.
    pub fn report(&self, samples: &EstimateSamples) -> Result<McReport> {
        let analytic_cov = self.analytic_covariance()?;
        let analytic = gaussian_key_rate(&analytic_cov)?;
        let empirical = empirical_key_rate(samples, self.frame_time)?;
        let relative_gap = if analytic.rate > 0.0 {
            (empirical.rate - analytic.rate).abs() / analytic.rate
        } else {
            f64::INFINITY
        };
        Ok(McReport {
            n_trials: samples.n_trials(),
            relative_gap,
            standard_error: batch_standard_error(samples, self.frame_time)?,
            covariance: covariance_agreement(
                &samples.sample_covariance(),
                analytic_cov.matrix(),
                samples.n_trials(),
            ),
            empirical,
            analytic,
        })
    }
}

fn fd_signal_plan(
    coord: Coordinate,
    radio: &RadioParams,
    frame: &FrameParams,
    policy: TimeAccountingPolicy,
) -> Result<EstimatePlan> {
    let node = coord.holder();
    let power = radio.power(node.peer());
    let rsi = radio.effective_rsi(node);
    let noise = radio.noise_sq();
    let t = frame.t_total();
    let alpha = frame.alpha();
    let full_rsi = |pilots: PilotSequence| {
        let n = pilots.len();
        EstimatePlan::pilots(pilots, noise, vec![rsi.sqrt(); n])
    };
    match (policy, coord.interval()) {
        (TimeAccountingPolicy::Uniform, _) => Ok(full_rsi(generate_training_sequence(
            (1.0 - alpha) * t / 2.0,
            power,
        )?)),
        (TimeAccountingPolicy::AppendixLiteral, 2) => {
            Ok(full_rsi(generate_training_sequence(frame.t2(), power)?))
        }
        (TimeAccountingPolicy::AppendixLiteral, _) => {
            // Thermal noise over T1 - αT symbols; RSI confined to the last
            // T1 - 2αT of them with its per-symbol variance scaled by
            // (L_thermal/L_rsi)² so the RSI term is σ_RSI²/(P·L_rsi).
            let pilots = generate_training_sequence(frame.t1() - alpha * t, power)?;
            let thermal_len = pilots.len();
            let rsi_len = rounded_window(frame.t1() - 2.0 * alpha * t)?.min(thermal_len);
            let scale = thermal_len as f64 / rsi_len as f64;
            let rsi_std: Vec<f64> = (0..thermal_len)
                .map(|k| {
                    if k >= thermal_len - rsi_len {
                        rsi.sqrt() * scale
                    } else {
                        0.0
                    }
                })
                .collect();
            Ok(EstimatePlan::pilots(pilots, noise, rsi_std))
        }
    }
}

/// One HD frame: `(h1B, h2A)`.
pub fn simulate_hd_frame(
    streams: &TrialStreams,
    ch: &ChannelParams,
    radio: &RadioParams,
    frame: &FrameParams,
    level: SimulationLevel,
) -> Result<[f64; 2]> {
    let sim = FrameSimulator::hd(ch, radio, frame, level)?;
    let mut out = [0.0; 2];
    sim.simulate_trial(streams, &mut out);
    Ok(out)
}

/// One FD frame: `(h1A, h2A, h1B, h2B)`.
pub fn simulate_fd_frame(
    streams: &TrialStreams,
    ch: &ChannelParams,
    radio: &RadioParams,
    frame: &FrameParams,
    policy: TimeAccountingPolicy,
    level: SimulationLevel,
) -> Result<[f64; 4]> {
    let sim = FrameSimulator::fd(ch, radio, frame, policy, level)?;
    let mut out = [0.0; 4];
    sim.simulate_trial(streams, &mut out);
    Ok(out)
}
