use std::path::{Path, PathBuf};

use fdkey::keyrate::{
    fd_key_rate, fd_key_rate_closed_form_symmetric, hd_key_rate, hd_key_rate_closed_form,
    KeyRateResult,
};
use fdkey::model::{TimeAccountingPolicy, DB_CONVENTION};
use fdkey::montecarlo::{FrameSimulator, McConfig, McReport};
use fdkey::sweep::{
    decade_grid, fig5_spec, fig6_spec, linspace, run_sweep, saturation_base, saturation_study,
    RateMode, Series, SweepAxis, SweepDocument, SweepResult, SweepSpec,
};
use serde_json::json;

use crate::config::Resolver;
use crate::params::{level, load_config, output_target, policy, resolve, write_output, Resolved};
use crate::{CliError, FormatArg, McArgs, ModeArg, PathArg, PresetArg, RateArgs, SweepArgs};

const DEFAULT_TRIALS: usize = 100_000;
const DEFAULT_SEED: u64 = 1;

fn parameters_json(p: &Resolved) -> Result<serde_json::Value, CliError> {
    Ok(json!({
        "channel": p.channel,
        "radio": p.radio,
        "radio_fd": p.fd_radio()?,
        "frame": p.frame,
        "policy": p.policy,
        "power_convention": p.convention,
    }))
}

fn to_json(value: &serde_json::Value) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::io(e.to_string()))
}

pub fn rate(args: &RateArgs, verbose: u8) -> Result<(), CliError> {
    let cfg = load_config(&args.params)?;
    let r = Resolver::new(cfg.as_ref());
    let p = resolve(&args.params, r)?;
    let mode = r.choice(args.mode, "mode")?.unwrap_or(ModeArg::Both);
    let path = r.choice(args.path, "path")?.unwrap_or(PathArg::Both);
    let format = r
        .choice(args.out.format, "format")?
        .unwrap_or(FormatArg::Table);
    let output = r.value(args.out.output.clone(), "output")?;

    let mut results: Vec<KeyRateResult> = Vec::new();
    if mode != ModeArg::Fd {
        let frame = p.frame.as_hd();
        if path != PathArg::Covariance {
            results.push(hd_key_rate_closed_form(&p.channel, &p.radio, &frame)?);
        }
        if path != PathArg::Closed {
            results.push(hd_key_rate(&p.channel, &p.radio, &frame)?);
        }
    }
    if mode != ModeArg::Hd {
        let radio = p.fd_radio()?;
        if path != PathArg::Closed {
            results.push(fd_key_rate(&p.channel, &radio, &p.frame, p.policy)?);
        }
        if path != PathArg::Covariance {
            let closed = if p.policy != TimeAccountingPolicy::Uniform {
                Err(fdkey::Error::InvalidParams(
                    "the FD closed form assumes uniform time accounting".into(),
                ))
            } else {
                fd_key_rate_closed_form_symmetric(&p.channel, &radio, &p.frame)
            };
            match closed {
                Ok(res) => {
                    let at = results
                        .len()
                        .saturating_sub(usize::from(path == PathArg::Both));
                    results.insert(at, res);
                }
                Err(e) if path == PathArg::Both => {
                    if verbose > 0 {
                        eprintln!("note: FD closed form skipped: {e}");
                    }
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    if verbose > 0 {
        for res in &results {
            eprintln!("{} {}: {:?}", res.mode, res.path, res.diagnostics);
        }
    }

    let text = match format {
        FormatArg::Json => to_json(&json!({
            "parameters": parameters_json(&p)?,
            "results": results,
            "metadata": {
                "version": env!("CARGO_PKG_VERSION"),
                "policy": p.policy,
                "db_convention": DB_CONVENTION,
            },
        }))?,
        FormatArg::Csv => {
            let mut s = String::from("mode,path,rate\n");
            for res in &results {
                s += &format!("{},{},{}\n", res.mode, res.path, res.rate);
            }
            s
        }
        FormatArg::Table => {
            let mut s = format!("{:<4}  {:<11}  {}\n", "mode", "path", "rate (bits/symbol)");
            for res in &results {
                s += &format!(
                    "{:<4}  {:<11}  {}\n",
                    res.mode.to_string(),
                    res.path.to_string(),
                    res.rate
                );
            }
            s
        }
    };
    write_output(output_target(output.as_deref(), None).as_deref(), &text)
}

fn parse_list<T>(
    s: &str,
    what: &str,
    f: impl Fn(&str) -> Result<T, String>,
) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| f(v).map_err(|e| CliError::invalid(format!("{what}: {e}"))))
        .collect()
}

fn parse_f64(v: &str) -> Result<f64, String> {
    v.parse::<f64>().map_err(|e| format!("{v:?}: {e}"))
}

/// `a,b,c` or `start:end:count`.
fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let start = parse_f64(parts[0]).map_err(CliError::invalid)?;
        let end = parse_f64(parts[1]).map_err(CliError::invalid)?;
        let n = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|e| CliError::invalid(format!("grid count: {e}")))?;
        return Ok(linspace(start, end, n));
    }
    parse_list(s, "grid", parse_f64)
}

fn inline_spec(args: &SweepArgs, r: Resolver, seed: Option<u64>) -> Result<SweepSpec, CliError> {
    let Some(axis) = r.value(args.axis.clone(), "axis")? else {
        return Err(CliError::invalid(
            "one of --preset, --spec or --axis is required",
        ));
    };
    let axis: SweepAxis = axis.parse()?;
    let grid = parse_grid(&r.value(args.grid.clone(), "grid")?.unwrap_or_default())?;
    let modes = match r.value(args.modes.clone(), "modes")? {
        Some(m) => parse_list(&m, "modes", |v| {
            v.parse::<RateMode>().map_err(|e| e.to_string())
        })?,
        None => vec![RateMode::Hd, RateMode::FdCovariance],
    };
    let series = match (
        r.value(args.series_axis.clone(), "series-axis")?,
        r.value(args.series.clone(), "series")?,
    ) {
        (Some(a), Some(v)) => Some(Series {
            axis: a.parse()?,
            values: parse_list(&v, "series", parse_f64)?,
        }),
        (None, None) => None,
        _ => return Err(CliError::invalid("--series-axis and --series go together")),
    };
    let p = resolve(&args.params, r)?;
    let mc = if modes
        .iter()
        .any(|m| matches!(m, RateMode::McHd | RateMode::McFd))
    {
        Some(McConfig::new(
            r.value(args.trials, "trials")?.unwrap_or(DEFAULT_TRIALS),
            seed.unwrap_or(DEFAULT_SEED),
            level(args.level, r)?,
        )?)
    } else {
        None
    };
    Ok(SweepSpec {
        axis,
        grid,
        base: fdkey::sweep::BaseParams {
            channel: p.channel,
            radio: p.radio,
            frame: p.frame,
        },
        modes,
        power_convention: p.convention,
        policy: p.policy,
        mc,
        series,
    })
}

fn sweep_summary(result: &SweepResult) -> String {
    let mut s = format!(
        "sweep: {} points over {}; columns {}; {} flagged\n",
        result.rows.len(),
        result.axis,
        result.columns.join(", "),
        result.flagged_points()
    );
    for (col, range) in result.column_ranges() {
        match range {
            Some((lo, hi)) => s += &format!("  {col}: min {lo:.6}, max {hi:.6}\n"),
            None => s += &format!("  {col}: no values\n"),
        }
    }
    if let Some(limit) = result.limit_estimate {
        s += &format!("  limit estimate: {limit:.6}\n");
    }
    s
}

pub fn sweep(args: &SweepArgs, verbose: u8) -> Result<(), CliError> {
    let cfg = load_config(&args.params)?;
    let r = Resolver::new(cfg.as_ref());
    let preset = r.choice(args.preset, "preset")?;
    let spec_file: Option<PathBuf> = r.value(args.spec.clone(), "spec")?;
    let seed = r.value(args.seed, "seed")?;
    let format = r
        .choice(args.out.format, "format")?
        .unwrap_or(FormatArg::Csv);
    if format == FormatArg::Table {
        return Err(CliError::invalid("sweep output is csv or json"));
    }
    let output = r.value(args.out.output.clone(), "output")?;

    let (spec, result, name) = match (preset, spec_file) {
        (Some(_), Some(_)) => {
            return Err(CliError::invalid(
                "--preset and --spec are mutually exclusive",
            ))
        }
        (Some(PresetArg::Saturation), None) => {
            let eta = r.value(args.params.eta, "eta")?.unwrap_or(1.0);
            let (spec, result) = saturation_study(saturation_base(), eta, &decade_grid(0, 8))?;
            (spec, result, "saturation".to_string())
        }
        (Some(preset), None) => {
            let (mut spec, name) = match preset {
                PresetArg::Fig5 => (fig5_spec(), "fig5"),
                _ => (fig6_spec(), "fig6"),
            };
            if let Some(p) = policy(&args.params, r)? {
                spec.policy = p;
            }
            let result = run_sweep(&spec)?;
            (spec, result, name.to_string())
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(&path).map_err(|e| {
                CliError::invalid(format!("cannot read spec {}: {e}", path.display()))
            })?;
            let spec: SweepSpec = serde_json::from_str(&text)
                .map_err(|e| CliError::invalid(format!("invalid spec {}: {e}", path.display())))?;
            let result = run_sweep(&spec)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "sweep".into());
            (spec, result, name)
        }
        (None, None) => {
            let spec = inline_spec(args, r, seed)?;
            let result = run_sweep(&spec)?;
            let name = format!("sweep_{}", spec.axis);
            (spec, result, name)
        }
    };

    let (text, ext) = match format {
        FormatArg::Json => (
            SweepDocument::new(spec, result.clone(), seed).to_json()? + "\n",
            "json",
        ),
        _ => (result.to_csv_string()?, "csv"),
    };
    let target = output_target(output.as_deref(), Some(&format!("{name}.{ext}")));
    write_output(target.as_deref(), &text)?;
    eprint!("{}", sweep_summary(&result));
    if verbose > 0 {
        if let Some(t) = &target {
            eprintln!("wrote {}", t.display());
        }
    }
    Ok(())
}

fn dump_path(base: &Path, mode: &str, both: bool) -> PathBuf {
    if !both {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_{mode}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{mode}"),
    };
    base.with_file_name(name)
}

fn report_table(reports: &[McReport]) -> String {
    let mut s = format!(
        "{:<4}  {:>9}  {:>12}  {:>12}  {:>9}  {:>10}  {}\n",
        "mode", "trials", "empirical", "analytic", "rel_gap", "std_err", "covariance"
    );
    for rep in reports {
        let within = rep.covariance.iter().filter(|c| c.within).count();
        let se = rep
            .standard_error
            .map(|v| format!("{v:.3e}"))
            .unwrap_or_else(|| "n/a".into());
        s += &format!(
            "{:<4}  {:>9}  {:>12.8}  {:>12.8}  {:>9.3e}  {:>10}  {}/{} entries within tolerance\n",
            rep.analytic.mode.to_string(),
            rep.n_trials,
            rep.empirical.rate,
            rep.analytic.rate,
            rep.relative_gap,
            se,
            within,
            rep.covariance.len()
        );
    }
    s
}

pub fn montecarlo(args: &McArgs, verbose: u8) -> Result<(), CliError> {
    let cfg = load_config(&args.params)?;
    let r = Resolver::new(cfg.as_ref());
    let p = resolve(&args.params, r)?;
    let mode = r.choice(args.mode, "mode")?.unwrap_or(ModeArg::Hd);
    let config = McConfig::new(
        r.value(args.trials, "trials")?.unwrap_or(DEFAULT_TRIALS),
        r.value(args.seed, "seed")?.unwrap_or(DEFAULT_SEED),
        level(args.level, r)?,
    )?;
    let format = r
        .choice(args.out.format, "format")?
        .unwrap_or(FormatArg::Table);
    let output = r.value(args.out.output.clone(), "output")?;
    let dump: Option<PathBuf> = r.value(args.dump_samples.clone(), "dump-samples")?;

    let mut sims = Vec::new();
    if mode != ModeArg::Fd {
        sims.push((
            "hd",
            FrameSimulator::hd(&p.channel, &p.radio, &p.frame.as_hd(), config.level)?,
        ));
    }
    if mode != ModeArg::Hd {
        let radio = p.fd_radio()?;
        sims.push((
            "fd",
            FrameSimulator::fd(&p.channel, &radio, &p.frame, p.policy, config.level)?,
        ));
    }

    let mut reports = Vec::new();
    for (name, sim) in &sims {
        let samples = sim.run(&config)?;
        if let Some(base) = &dump {
            let path = dump_path(base, name, sims.len() > 1);
            let mut buf = Vec::new();
            samples.write_csv(&mut buf)?;
            write_output(Some(&path), &String::from_utf8_lossy(&buf))?;
        }
        let report = sim.report(&samples)?;
        if verbose > 0 {
            for c in &report.covariance {
                eprintln!(
                    "{name} C[{}][{}]: sample {:.6e}, analytic {:.6e}, tolerance {:.3e}{}",
                    c.row,
                    c.col,
                    c.sample,
                    c.analytic,
                    c.tolerance,
                    if c.within { "" } else { "  OUTSIDE" }
                );
            }
        }
        reports.push(report);
    }

    let text = match format {
        FormatArg::Json => to_json(&json!({
            "parameters": parameters_json(&p)?,
            "config": config,
            "reports": reports,
            "metadata": {
                "seed": config.seed,
                "version": env!("CARGO_PKG_VERSION"),
                "policy": p.policy,
                "db_convention": DB_CONVENTION,
            },
        }))?,
        FormatArg::Csv => {
            let mut s =
                String::from("mode,trials,empirical,analytic,relative_gap,standard_error\n");
            for rep in &reports {
                s += &format!(
                    "{},{},{},{},{},{}\n",
                    rep.analytic.mode,
                    rep.n_trials,
                    rep.empirical.rate,
                    rep.analytic.rate,
                    rep.relative_gap,
                    rep.standard_error
                        .map(|v| v.to_string())
                        .unwrap_or_default()
                );
            }
            s
        }
        FormatArg::Table => report_table(&reports),
    };
    write_output(output_target(output.as_deref(), None).as_deref(), &text)
}
