use std::io::Write;
use std::path::{Path, PathBuf};

use fdkey::model::{
    db_to_linear, ChannelParams, FrameParams, RadioParams, RsiModel, TimeAccountingPolicy,
};
use fdkey::sweep::{apply_power_convention, PowerConvention};
use fdkey::SimulationLevel;

use crate::config::{ConfigFile, Resolver};
use crate::{CliError, ConventionArg, LevelArg, ParamArgs, PolicyArg, OUTPUT_DIR_ENV};

const DEFAULT_T_WINDOW: f64 = 2.5;
const DEFAULT_ALPHA: f64 = 0.35;
const DEFAULT_RHO: f64 = 0.7;
const DEFAULT_SNR_DB: f64 = 10.0;

/// Fully validated model parameters.
#[derive(Clone, Copy, Debug)]
pub struct Resolved {
    pub channel: ChannelParams,
    /// Half-duplex powers.
    pub radio: RadioParams,
    /// FD frame; `frame.as_hd()` gives the HD frame.
    pub frame: FrameParams,
    pub policy: TimeAccountingPolicy,
    pub convention: PowerConvention,
}

impl Resolved {
    pub fn fd_radio(&self) -> Result<RadioParams, CliError> {
        Ok(self.radio.with_powers(
            apply_power_convention(self.radio.p_a(), self.convention),
            apply_power_convention(self.radio.p_b(), self.convention),
        )?)
    }
}

pub fn load_config(args: &ParamArgs) -> Result<Option<ConfigFile>, CliError> {
    args.config.as_deref().map(ConfigFile::load).transpose()
}

pub fn policy(args: &ParamArgs, r: Resolver) -> Result<Option<TimeAccountingPolicy>, CliError> {
    Ok(r.choice(args.policy, "policy")?.map(|p| match p {
        PolicyArg::Uniform => TimeAccountingPolicy::Uniform,
        PolicyArg::Appendix => TimeAccountingPolicy::AppendixLiteral,
    }))
}

pub fn level(flag: Option<LevelArg>, r: Resolver) -> Result<SimulationLevel, CliError> {
    Ok(
        match r.choice(flag, "level")?.unwrap_or(LevelArg::Statistical) {
            LevelArg::Statistical => SimulationLevel::Statistical,
            LevelArg::Signal => SimulationLevel::SignalLevel,
        },
    )
}

fn frame_lengths(t: Option<f64>, t1: Option<f64>, t2: Option<f64>) -> Result<(f64, f64), CliError> {
    Ok(match (t, t1, t2) {
        (Some(t), Some(t1), Some(t2)) => {
            if ((t1 + t2) - t).abs() > 1e-12 * t.abs() {
                return Err(CliError::invalid(format!(
                    "T1 + T2 = {} but T = {t}",
                    t1 + t2
                )));
            }
            (t1, t2)
        }
        (Some(t), Some(t1), None) => (t1, t - t1),
        (Some(t), None, Some(t2)) => (t - t2, t2),
        (Some(t), None, None) => (t / 2.0, t / 2.0),
        (None, t1, t2) => (
            t1.unwrap_or(DEFAULT_T_WINDOW),
            t2.unwrap_or(DEFAULT_T_WINDOW),
        ),
    })
}

pub fn resolve(args: &ParamArgs, r: Resolver) -> Result<Resolved, CliError> {
    let sigma1_sq = r
        .quantity(args.sigma1_sq, args.sigma1_sq_db, "sigma1-sq")?
        .unwrap_or(1.0);
    let sigma2_sq = r
        .quantity(args.sigma2_sq, args.sigma2_sq_db, "sigma2-sq")?
        .unwrap_or(1.0);
    let rho = r.value(args.rho, "rho")?.unwrap_or(DEFAULT_RHO);
    let channel = ChannelParams::new(sigma1_sq, sigma2_sq, rho)?;

    let noise_sq = r
        .quantity(args.noise_sq, args.noise_sq_db, "noise-sq")?
        .unwrap_or(1.0);
    let snr_db = r.value(args.snr_db, "snr-db")?.unwrap_or(DEFAULT_SNR_DB);
    let p_snr = noise_sq * db_to_linear(snr_db);
    let p_a = r.quantity(args.p_a, args.p_a_db, "p-a")?.unwrap_or(p_snr);
    let p_b = r.quantity(args.p_b, args.p_b_db, "p-b")?.unwrap_or(p_snr);

    let eta = r.value(args.eta, "eta")?;
    let rsi_db = r.value(args.rsi_db, "rsi-db")?;
    let rsi_a = r.quantity(args.rsi_a_sq, args.rsi_a_sq_db, "rsi-a-sq")?;
    let rsi_b = r.quantity(args.rsi_b_sq, args.rsi_b_sq_db, "rsi-b-sq")?;
    let rsi = match eta {
        Some(eta) => {
            if rsi_db.is_some() || rsi_a.is_some() || rsi_b.is_some() {
                return Err(CliError::invalid(
                    "--eta cannot be combined with explicit RSI variances",
                ));
            }
            RsiModel::Coupled { eta }
        }
        None => {
            let both = noise_sq * db_to_linear(rsi_db.unwrap_or(0.0));
            RsiModel::Explicit {
                alice_sq: rsi_a.unwrap_or(both),
                bob_sq: rsi_b.unwrap_or(both),
            }
        }
    };
    let radio = RadioParams::new(p_a, p_b, noise_sq, rsi)?;

    let (t1, t2) = frame_lengths(
        r.value(args.t, "t")?,
        r.value(args.t1, "t1")?,
        r.value(args.t2, "t2")?,
    )?;
    let alpha = r.value(args.alpha, "alpha")?.unwrap_or(DEFAULT_ALPHA);
    let frame = FrameParams::fd(t1, t2, alpha)?;

    let convention = match r.choice(args.power_convention, "power-convention")? {
        None | Some(ConventionArg::Equal) => PowerConvention::Equal,
        Some(ConventionArg::FdHalf) => PowerConvention::FdHalf,
    };
    Ok(Resolved {
        channel,
        radio,
        frame,
        policy: policy(args, r)?.unwrap_or_default(),
        convention,
    })
}

fn output_dir() -> Option<PathBuf> {
    std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

/// Where output goes: `None` means stdout.
pub fn output_target(flag: Option<&str>, default_name: Option<&str>) -> Option<PathBuf> {
    match flag {
        Some("-") => None,
        Some(p) => {
            let p = Path::new(p);
            match output_dir() {
                Some(dir) if p.is_relative() => Some(dir.join(p)),
                _ => Some(p.to_path_buf()),
            }
        }
        None => match (output_dir(), default_name) {
            (Some(dir), Some(name)) => Some(dir.join(name)),
            _ => None,
        },
    }
}

pub fn write_output(target: Option<&Path>, content: &str) -> Result<(), CliError> {
    match target {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(format!("cannot write to stdout: {e}")))
        }
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| {
                    CliError::io(format!("cannot create {}: {e}", parent.display()))
                })?;
            }
            std::fs::write(path, content)
                .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
        }
    }
}
