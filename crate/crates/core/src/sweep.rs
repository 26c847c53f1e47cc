//! Parameter studies: rate-vs-correlation, rate-vs-SNR, overhead and RSI
//! sweeps, plus the RSI-power saturation study.
//!
//! The base radio powers are the half-duplex powers. FD evaluations first
//! apply the [`PowerConvention`] to both nodes. The `snr_db` and `rsi_db` axes
//! are relative to the thermal noise variance: `P = σ²·10^(snr_db/10)` and
//! `σ_RSI² = σ²·10^(rsi_db/10)` at both nodes.
//!
//! Points are evaluated in parallel and stored by grid index. Monte Carlo
//! modes use seed `mc.seed + k` (wrapping) at the `k`-th point in output
//! order, so results never depend on the thread count.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyrate::{fd_key_rate, fd_key_rate_closed_form_symmetric, hd_key_rate_closed_form};
use crate::model::{
    db_to_linear, ChannelParams, FrameParams, RadioParams, RsiModel, TimeAccountingPolicy,
    DB_CONVENTION,
};
use crate::montecarlo::{empirical_key_rate, FrameSimulator, McConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Rho,
    SnrDb,
    Alpha,
    Eta,
    RsiDb,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Rho => "rho",
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::Alpha => "alpha",
            SweepAxis::Eta => "eta",
            SweepAxis::RsiDb => "rsi_db",
        }
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rho" => SweepAxis::Rho,
            "snr_db" => SweepAxis::SnrDb,
            "alpha" => SweepAxis::Alpha,
            "eta" => SweepAxis::Eta,
            "rsi_db" => SweepAxis::RsiDb,
            other => return Err(Error::InvalidSweep(format!("unknown axis {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMode {
    Hd,
    FdClosed,
    FdCovariance,
    McHd,
    McFd,
}

impl RateMode {
    pub fn column(self) -> &'static str {
        match self {
            RateMode::Hd => "R_HD",
            RateMode::FdClosed => "R_FD_closed",
            RateMode::FdCovariance => "R_FD",
            RateMode::McHd => "R_MC_HD",
            RateMode::McFd => "R_MC_FD",
        }
    }

    fn is_monte_carlo(self) -> bool {
        matches!(self, RateMode::McHd | RateMode::McFd)
    }
}

impl std::str::FromStr for RateMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hd" => RateMode::Hd,
            "fd_closed" => RateMode::FdClosed,
            "fd_covariance" | "fd" => RateMode::FdCovariance,
            "mc_hd" => RateMode::McHd,
            "mc_fd" => RateMode::McFd,
            other => return Err(Error::InvalidSweep(format!("unknown mode {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerConvention {
    #[default]
    Equal,
    FdHalf,
}

impl std::fmt::Display for PowerConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PowerConvention::Equal => "equal",
            PowerConvention::FdHalf => "fd_half",
        })
    }
}

/// FD transmit power for a given HD power.
pub fn apply_power_convention(p_hd: f64, convention: PowerConvention) -> f64 {
    match convention {
        PowerConvention::Equal => p_hd,
        PowerConvention::FdHalf => p_hd / 2.0,
    }
}

/// Template parameters. `frame` carries the FD overhead `alpha`; HD
/// evaluations use the same `T1`, `T2` with no overhead.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseParams {
    pub channel: ChannelParams,
    pub radio: RadioParams,
    pub frame: FrameParams,
}

/// A second axis held fixed per curve; each value gets its own columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub base: BaseParams,
    pub modes: Vec<RateMode>,
    #[serde(default)]
    pub power_convention: PowerConvention,
    #[serde(default)]
    pub policy: TimeAccountingPolicy,
    #[serde(default)]
    pub mc: Option<McConfig>,
    #[serde(default)]
    pub series: Option<Series>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    /// One entry per result column; `None` where the point failed.
    pub values: Vec<Option<f64>>,
    /// `column=reason` for every failed entry.
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    /// Saturation studies: the FD rate at the largest grid power.
    #[serde(default)]
    pub limit_estimate: Option<f64>,
}

fn strictly_monotone(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1]) || v.windows(2).all(|w| w[0] > w[1])
}

fn apply_axis(axis: SweepAxis, value: f64, p: &mut BaseParams) -> Result<()> {
    let noise = p.radio.noise_sq();
    match axis {
        SweepAxis::Rho => p.channel = p.channel.with_rho(value)?,
        SweepAxis::SnrDb => {
            let power = noise * db_to_linear(value);
            p.radio = p.radio.with_powers(power, power)?;
        }
        SweepAxis::Alpha => {
            let f = p.frame;
            p.frame = FrameParams::fd(f.t1(), f.t2(), value)?;
        }
        SweepAxis::Eta => p.radio = p.radio.with_rsi(RsiModel::Coupled { eta: value })?,
        SweepAxis::RsiDb => {
            p.radio = p
                .radio
                .with_rsi(RsiModel::symmetric(noise * db_to_linear(value)))?
        }
    }
    Ok(())
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSweep(m));
        if self.grid.is_empty() {
            return bad("grid is empty".into());
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return bad("grid values must be finite".into());
        }
        if !strictly_monotone(&self.grid) {
            return bad("grid must be strictly monotone".into());
        }
        if self.modes.is_empty() {
            return bad("no rate modes requested".into());
        }
        for (i, m) in self.modes.iter().enumerate() {
            if self.modes[..i].contains(m) {
                return bad(format!("mode {} requested twice", m.column()));
            }
        }
        if self.modes.iter().any(|m| m.is_monte_carlo()) {
            match &self.mc {
                Some(mc) => mc.validate()?,
                None => return bad("Monte Carlo modes need an mc configuration".into()),
            }
        }
        if let Some(s) = &self.series {
            if s.axis == self.axis {
                return bad("series axis must differ from the swept axis".into());
            }
            if s.values.is_empty() || s.values.iter().any(|v| !v.is_finite()) {
                return bad("series values must be finite and non-empty".into());
            }
            for (i, v) in s.values.iter().enumerate() {
                if s.values[..i].contains(v) {
                    return bad(format!("series value {v} repeated"));
                }
            }
        }
        for (_, s) in self.series_values() {
            for &g in &self.grid {
                self.point_params(s, g)?;
            }
        }
        Ok(())
    }

    fn series_values(&self) -> Vec<(String, Option<f64>)> {
        match &self.series {
            None => vec![(String::new(), None)],
            Some(s) => s
                .values
                .iter()
                .map(|&v| (format!("_{}{}", s.axis.name(), v), Some(v)))
                .collect(),
        }
    }

    fn point_params(&self, series_value: Option<f64>, grid_value: f64) -> Result<BaseParams> {
        let mut p = self.base;
        if let (Some(s), Some(v)) = (&self.series, series_value) {
            apply_axis(s.axis, v, &mut p)?;
        }
        apply_axis(self.axis, grid_value, &mut p)?;
        Ok(p)
    }

    /// Result column names in output order (axis and flags excluded).
    pub fn columns(&self) -> Vec<String> {
        self.series_values()
            .iter()
            .flat_map(|(suffix, _)| {
                self.modes
                    .iter()
                    .map(move |m| format!("{}{suffix}", m.column()))
            })
            .collect()
    }
}

fn flag_reason(e: &Error) -> String {
    match e {
        Error::NonPositiveEffectiveTime { expression, .. } => {
            format!("infeasible({expression} <= 0)")
        }
        Error::ZeroLengthWindow { .. } => "zero_window".into(),
        Error::AsymmetricParams(_) => "asymmetric".into(),
        Error::SingularCovariance { .. }
        | Error::NotPositiveDefinite
        | Error::SingularSampleCovariance
        | Error::DegenerateCorrelation => "singular".into(),
        Error::NegativeMutualInformation(_) => "negative_mi".into(),
        _ => "error".into(),
    }
}

fn evaluate(spec: &SweepSpec, p: &BaseParams, mode: RateMode, seed_offset: u64) -> Result<f64> {
    let hd_frame = p.frame.as_hd();
    let fd_frame = if p.frame.mode() == crate::model::DuplexMode::Fd {
        p.frame
    } else {
        p.frame.as_fd(0.0)?
    };
    let fd_radio = p.radio.with_powers(
        apply_power_convention(p.radio.p_a(), spec.power_convention),
        apply_power_convention(p.radio.p_b(), spec.power_convention),
    )?;
    let mc = |sim: FrameSimulator| -> Result<f64> {
        let base = spec.mc.expect("validated");
        let cfg = McConfig {
            seed: base.seed.wrapping_add(seed_offset),
            ..base
        };
        let samples = sim.run(&cfg)?;
        Ok(empirical_key_rate(&samples, sim.frame_time())?.rate)
    };
    match mode {
        RateMode::Hd => Ok(hd_key_rate_closed_form(&p.channel, &p.radio, &hd_frame)?.rate),
        RateMode::FdClosed => {
            if spec.policy != TimeAccountingPolicy::Uniform {
                return Err(Error::InvalidParams(
                    "the FD closed form uses uniform time accounting".into(),
                ));
            }
            Ok(fd_key_rate_closed_form_symmetric(&p.channel, &fd_radio, &fd_frame)?.rate)
        }
        RateMode::FdCovariance => {
            Ok(fd_key_rate(&p.channel, &fd_radio, &fd_frame, spec.policy)?.rate)
        }
        RateMode::McHd => {
            let level = spec.mc.expect("validated").level;
            mc(FrameSimulator::hd(&p.channel, &p.radio, &hd_frame, level)?)
        }
        RateMode::McFd => {
            let level = spec.mc.expect("validated").level;
            mc(FrameSimulator::fd(
                &p.channel,
                &fd_radio,
                &fd_frame,
                spec.policy,
                level,
            )?)
        }
    }
}

/// Evaluates every requested mode at every grid point.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let series = spec.series_values();
    let columns = spec.columns();
    let n_grid = spec.grid.len() as u64;
    let rows = spec
        .grid
        .par_iter()
        .enumerate()
        .map(|(gi, &g)| {
            let mut values = Vec::with_capacity(columns.len());
            let mut flags = Vec::new();
            for (si, (suffix, s)) in series.iter().enumerate() {
                let params = spec.point_params(*s, g).expect("validated");
                let offset = si as u64 * n_grid + gi as u64;
                for &mode in &spec.modes {
                    match evaluate(spec, &params, mode, offset) {
                        Ok(r) => values.push(Some(r)),
                        Err(e) => {
                            values.push(None);
                            flags.push(format!("{}{suffix}={}", mode.column(), flag_reason(&e)));
                        }
                    }
                }
            }
            SweepRow {
                axis_value: g,
                values,
                flags,
            }
        })
        .collect();
    Ok(SweepResult {
        axis: spec.axis,
        columns,
        rows,
        limit_estimate: None,
    })
}

impl SweepResult {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    pub fn axis_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.axis_value).collect()
    }

    /// `(min, max)` of the computed values in each column.
    pub fn column_ranges(&self) -> Vec<(String, Option<(f64, f64)>)> {
        self.columns
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let range = self
                    .rows
                    .iter()
                    .filter_map(|r| r.values[i])
                    .fold(None, |acc, v| {
                        Some(match acc {
                            None => (v, v),
                            Some((lo, hi)) => (f64::min(lo, v), f64::max(hi, v)),
                        })
                    });
                (c.clone(), range)
            })
            .collect()
    }

    pub fn flagged_points(&self) -> usize {
        self.rows.iter().filter(|r| !r.flags.is_empty()).count()
    }

    /// Axis column, one column per result, flags last. Missing values are
    /// empty fields; floats use shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![self.axis.name().to_string()];
        header.extend(self.columns.iter().cloned());
        header.push("flags".into());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.axis_value.to_string()];
            rec.extend(
                row.values
                    .iter()
                    .map(|v| v.map(|x| x.to_string()).unwrap_or_default()),
            );
            rec.push(row.flags.join(";"));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Output(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: Option<u64>,
    pub version: String,
    pub policy: TimeAccountingPolicy,
    pub power_convention: PowerConvention,
    pub db_convention: String,
}

/// JSON output: the spec echo, the results and run metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub spec: SweepSpec,
    pub results: SweepResult,
    pub metadata: Metadata,
}

impl SweepDocument {
    pub fn new(spec: SweepSpec, results: SweepResult, seed: Option<u64>) -> Self {
        let metadata = Metadata {
            seed: seed.or(spec.mc.map(|m| m.seed)),
            version: env!("CARGO_PKG_VERSION").to_string(),
            policy: spec.policy,
            power_convention: spec.power_convention,
            db_convention: DB_CONVENTION.to_string(),
        };
        Self {
            spec,
            results,
            metadata,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

// ---------------------------------------------------------------------------
// presets

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![start],
        _ => (0..n)
            .map(|i| start + (end - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Fig.-5 parameters: σ1² = σ2² = 5 dB, σ² = 1, SNR 10 dB, no RSI,
/// T1 = T2 = 2.5, α = 0.35.
pub fn fig5_base() -> BaseParams {
    let g = db_to_linear(5.0);
    BaseParams {
        channel: ChannelParams::new(g, g, 0.0).expect("valid preset"),
        radio: RadioParams::new(10.0, 10.0, 1.0, RsiModel::none()).expect("valid preset"),
        frame: FrameParams::fd(2.5, 2.5, 0.35).expect("valid preset"),
    }
}

/// Rate versus correlation, 50 points on `[0, 0.999]`.
pub fn fig5_spec() -> SweepSpec {
    SweepSpec {
        axis: SweepAxis::Rho,
        grid: linspace(0.0, 0.999, 50),
        base: fig5_base(),
        modes: vec![RateMode::Hd, RateMode::FdCovariance],
        power_convention: PowerConvention::FdHalf,
        policy: TimeAccountingPolicy::Uniform,
        mc: None,
        series: None,
    }
}

/// Fig.-6 parameters: σ1² = σ2² = σ² = 1, RSI at 0 dB, T1 = T2 = 2.5,
/// α = 0.35. Powers are set by the SNR axis.
pub fn fig6_base() -> BaseParams {
    BaseParams {
        channel: ChannelParams::new(1.0, 1.0, 0.0).expect("valid preset"),
        radio: RadioParams::new(1.0, 1.0, 1.0, RsiModel::symmetric(1.0)).expect("valid preset"),
        frame: FrameParams::fd(2.5, 2.5, 0.35).expect("valid preset"),
    }
}

/// Rate versus SNR from -10 to 40 dB in 2 dB steps, one curve per
/// ρ ∈ {0.3, 0.7, 0.9, 0.99}.
pub fn fig6_spec() -> SweepSpec {
    SweepSpec {
        axis: SweepAxis::SnrDb,
        grid: (0..=25).map(|i| -10.0 + 2.0 * i as f64).collect(),
        base: fig6_base(),
        modes: vec![RateMode::Hd, RateMode::FdCovariance],
        power_convention: PowerConvention::FdHalf,
        policy: TimeAccountingPolicy::Uniform,
        mc: None,
        series: Some(Series {
            axis: SweepAxis::Rho,
            values: vec![0.3, 0.7, 0.9, 0.99],
        }),
    }
}

/// Base for the saturation preset: the Fig.-6 frame at ρ = 0.7.
pub fn saturation_base() -> BaseParams {
    let mut b = fig6_base();
    b.channel = b.channel.with_rho(0.7).expect("valid preset");
    b
}

/// Powers `10^0, 10^1, …, 10^8`.
pub fn decade_grid(first: i32, last: i32) -> Vec<f64> {
    (first..=last).map(|k| 10f64.powi(k)).collect()
}

fn saturation_spec(base: BaseParams, eta: f64, power_grid: &[f64]) -> Result<SweepSpec> {
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::InvalidSweep(format!("eta must be >= 0 (got {eta})")));
    }
    if power_grid.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::InvalidSweep("powers must be finite and > 0".into()));
    }
    if !strictly_monotone(power_grid) {
        return Err(Error::InvalidSweep(
            "power grid must be strictly monotone".into(),
        ));
    }
    let (lo, hi) = power_grid
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        });
    if (hi / lo).log10() < 6.0 - 1e-9 {
        return Err(Error::InvalidSweep(
            "power grid must span at least 6 decades".into(),
        ));
    }
    let noise = base.radio.noise_sq();
    let mut base = base;
    base.radio = base.radio.with_rsi(RsiModel::Coupled { eta })?;
    Ok(SweepSpec {
        axis: SweepAxis::SnrDb,
        grid: power_grid
            .iter()
            .map(|p| 10.0 * (p / noise).log10())
            .collect(),
        base,
        modes: vec![RateMode::FdCovariance],
        power_convention: PowerConvention::Equal,
        policy: TimeAccountingPolicy::Uniform,
        mc: None,
        series: None,
    })
}

/// FD rate with `σ_RSI² = η·P` over a power grid (equal HD/FD powers).
/// Adds the successive-difference column `dR_FD` and the rate at the largest
/// power as `limit_estimate`. The axis is `snr_db = 10·log10(P/σ²)`.
pub fn saturation_study(
    base: BaseParams,
    eta: f64,
    power_grid: &[f64],
) -> Result<(SweepSpec, SweepResult)> {
    let spec = saturation_spec(base, eta, power_grid)?;
    let mut result = run_sweep(&spec)?;
    add_saturation_columns(&mut result, power_grid);
    Ok((spec, result))
}

/// Appends `dR_FD` and fills `limit_estimate` on a saturation result.
pub fn add_saturation_columns(result: &mut SweepResult, power_grid: &[f64]) {
    let Some(col) = result.column_index(RateMode::FdCovariance.column()) else {
        return;
    };
    let rates: Vec<Option<f64>> = result.rows.iter().map(|r| r.values[col]).collect();
    result.columns.push("dR_FD".into());
    for (i, row) in result.rows.iter_mut().enumerate() {
        let d = match (i.checked_sub(1).and_then(|j| rates[j]), rates[i]) {
            (Some(prev), Some(cur)) => Some(cur - prev),
            _ => None,
        };
        row.values.push(d);
    }
    let top = power_grid
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i);
    result.limit_estimate = top.and_then(|i| rates[i]);
}

/// Saturation preset: η = 1 over powers `10^0 … 10^8`.
pub fn saturation_preset() -> Result<(SweepSpec, SweepResult)> {
    saturation_study(saturation_base(), 1.0, &decade_grid(0, 8))
}
