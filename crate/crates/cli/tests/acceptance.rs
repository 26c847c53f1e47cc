//! Acceptance gate: one PASS/FAIL line per criterion, written straight to
//! stderr so it shows up even when test output is captured.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use fdkey::keyrate::{
    fd_covariance_determinant_closed_form, fd_key_rate, fd_key_rate_closed_form_symmetric,
    hd_key_rate, hd_key_rate_closed_form,
};
use fdkey::model::{
    db_to_linear, ChannelParams, FrameParams, RadioParams, RsiModel, TimeAccountingPolicy,
};
use fdkey::montecarlo::{
    covariance_agreement, empirical_key_rate, FrameSimulator, McConfig, SimulationLevel,
};
use fdkey::sweep::apply_power_convention;
use fdkey::sweep::{
    fig5_base, fig5_spec, fig6_spec, run_sweep, saturation_preset, PowerConvention,
};
use num_bigint::BigInt;
use num_traits::{Float, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_fdkey");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn open_rho(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let r = uniform(rng, -1.0, 1.0);
        if r.abs() < 1.0 {
            return r;
        }
    }
}

struct HdDraw {
    ch: ChannelParams,
    radio: RadioParams,
    frame: FrameParams,
}

fn hd_draw(rng: &mut ChaCha8Rng, rho: f64) -> HdDraw {
    let ch = ChannelParams::new(uniform(rng, 0.1, 10.0), uniform(rng, 0.1, 10.0), rho).unwrap();
    let radio = RadioParams::new(
        10f64.powf(uniform(rng, -1.0, 3.0)),
        10f64.powf(uniform(rng, -1.0, 3.0)),
        uniform(rng, 0.1, 10.0),
        RsiModel::none(),
    )
    .unwrap();
    let frame = FrameParams::hd(uniform(rng, 0.5, 10.0), uniform(rng, 0.5, 10.0)).unwrap();
    HdDraw { ch, radio, frame }
}

struct FdDraw {
    ch: ChannelParams,
    radio: RadioParams,
    frame: FrameParams,
}

/// Symmetric powers and intervals; RSI may differ between the nodes.
fn fd_draw(rng: &mut ChaCha8Rng) -> FdDraw {
    let ch = ChannelParams::new(
        uniform(rng, 0.5, 5.0),
        uniform(rng, 0.5, 5.0),
        open_rho(rng),
    )
    .unwrap();
    let p = 10f64.powf(uniform(rng, 0.0, 3.0));
    let radio = RadioParams::new(
        p,
        p,
        1.0,
        RsiModel::Explicit {
            alice_sq: uniform(rng, 0.0, 3.0),
            bob_sq: uniform(rng, 0.0, 3.0),
        },
    )
    .unwrap();
    let half = uniform(rng, 1.0, 5.0);
    let frame = FrameParams::fd(half, half, uniform(rng, 0.0, 0.5)).unwrap();
    FdDraw { ch, radio, frame }
}

fn cofactor_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Laplace expansion in exact integer arithmetic: every f64 entry is
/// `mantissa * 2^exp`, so scaling by the smallest power of two makes the
/// matrix integral. The matrix is rank two plus a small diagonal at high
/// power, so a floating expansion cancels too much to serve as a reference.
fn exact_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len() as i32;
    let parts: Vec<Vec<(u64, i16, i8)>> = m
        .iter()
        .map(|row| row.iter().map(|v| v.integer_decode()).collect())
        .collect();
    let emin = parts.iter().flatten().map(|p| p.1).min().unwrap();
    let ints: Vec<Vec<BigInt>> = parts
        .iter()
        .map(|row| {
            row.iter()
                .map(|&(mant, exp, sign)| {
                    let v = BigInt::from(mant) << ((exp - emin) as usize);
                    if sign < 0 {
                        -v
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let det = cofactor_det(&ints);
    let shift = det.bits().saturating_sub(64) as i32;
    let top = (det >> shift as usize).to_f64().unwrap();
    top * 2f64.powi(shift) * 2f64.powi(n * emin as i32)
}

/// Joint covariance of (h1A, h2A, h1B, h2B) written out from the model:
/// every estimate is the gain plus independent noise of variance
/// 2(σ_RSI² + σ²)/(P(1-α)T).
fn fd_matrix_oracle(d: &FdDraw) -> Vec<Vec<f64>> {
    let s1 = d.ch.sigma1_sq();
    let s2 = d.ch.sigma2_sq();
    let c = d.ch.rho() * s1.sqrt() * s2.sqrt();
    let t = d.frame.t_total();
    let a = d.frame.alpha();
    let noise = |rsi: f64| 2.0 * (rsi + d.radio.noise_sq()) / (d.radio.p_a() * (1.0 - a) * t);
    let (rsi_a, rsi_b) = match d.radio.rsi() {
        RsiModel::Explicit { alice_sq, bob_sq } => (alice_sq, bob_sq),
        RsiModel::Coupled { .. } => unreachable!(),
    };
    let (na, nb) = (noise(rsi_a), noise(rsi_b));
    vec![
        vec![s1 + na, c, s1, c],
        vec![c, s2 + na, c, s2],
        vec![s1, c, s1 + nb, c],
        vec![c, s2, c, s2 + nb],
    ]
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d = hd_draw(&mut rng, 0.0);
        let closed = hd_key_rate_closed_form(&d.ch, &d.radio, &d.frame)
            .unwrap()
            .rate;
        let cov = hd_key_rate(&d.ch, &d.radio, &d.frame).unwrap().rate;
        worst = worst.max(closed.abs()).max(cov.abs());
    }
    outcome(
        worst <= 1e-15,
        format!("max |rate| over 100 draws at rho=0: {worst:e}"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_hd: f64 = 0.0;
    for _ in 0..10_000 {
        let rho = open_rho(&mut rng);
        let d = hd_draw(&mut rng, rho);
        let closed = hd_key_rate_closed_form(&d.ch, &d.radio, &d.frame)
            .unwrap()
            .rate;
        let cov = hd_key_rate(&d.ch, &d.radio, &d.frame).unwrap().rate;
        worst_hd = worst_hd.max(rel(closed, cov));
    }
    let mut worst_fd: f64 = 0.0;
    for _ in 0..10_000 {
        let d = fd_draw(&mut rng);
        let closed = fd_key_rate_closed_form_symmetric(&d.ch, &d.radio, &d.frame)
            .unwrap()
            .rate;
        let cov = fd_key_rate(&d.ch, &d.radio, &d.frame, TimeAccountingPolicy::Uniform)
            .unwrap()
            .rate;
        worst_fd = worst_fd.max(rel(closed, cov));
    }
    outcome(
        worst_hd <= 1e-12 && worst_fd <= 1e-9,
        format!("max relative gap HD {worst_hd:e} (tol 1e-12), FD {worst_fd:e} (tol 1e-9)"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let d = fd_draw(&mut rng);
        let closed = fd_covariance_determinant_closed_form(&d.ch, &d.radio, &d.frame).unwrap();
        let direct = exact_det(&fd_matrix_oracle(&d));
        worst = worst.max(rel(closed, direct));
    }
    outcome(
        worst <= 1e-9,
        format!("max relative gap {worst:e} (tol 1e-9)"),
    )
}

fn criterion_4() -> Outcome {
    let p = db_to_linear(120.0);
    let radio = RadioParams::new(p, p, 1.0, RsiModel::none()).unwrap();
    let frame = FrameParams::hd(2.5, 2.5).unwrap();
    let mut worst: f64 = 0.0;
    for rho in [0.3, 0.7, 0.9, 0.99] {
        let ch = ChannelParams::new(1.0, 1.0, rho).unwrap();
        let rate = hd_key_rate_closed_form(&ch, &radio, &frame).unwrap().rate;
        let limit = (1.0 / (1.0f64 - rho * rho).sqrt()).log2() / frame.t_total();
        worst = worst.max(rel(rate, limit));
    }
    outcome(
        worst <= 1e-6,
        format!("max relative gap to the limit at 120 dB: {worst:e} (tol 1e-6)"),
    )
}

fn criterion_5() -> Outcome {
    let spec = fig5_spec();
    let res = run_sweep(&spec).unwrap();
    let hd: Vec<f64> = res
        .column("R_HD")
        .unwrap()
        .into_iter()
        .map(Option::unwrap)
        .collect();
    let fd: Vec<f64> = res
        .column("R_FD")
        .unwrap()
        .into_iter()
        .map(Option::unwrap)
        .collect();
    let a = res.rows.len() == 50 && hd.windows(2).all(|w| w[1] > w[0]);

    let base = fig5_base();
    let p_fd = apply_power_convention(base.radio.p_a(), PowerConvention::FdHalf);
    let radio = base.radio.with_powers(p_fd, p_fd).unwrap();
    let fd_at = |rho: f64| {
        fd_key_rate(
            &base.channel.with_rho(rho).unwrap(),
            &radio,
            &base.frame,
            TimeAccountingPolicy::Uniform,
        )
        .unwrap()
        .rate
    };
    let (lo, hi) = (fd_at(0.05), fd_at(0.95));
    let b = lo > hi;

    let diff: Vec<f64> = hd.iter().zip(&fd).map(|(h, f)| h - f).collect();
    let changes = diff
        .windows(2)
        .filter(|w| (w[0] > 0.0) != (w[1] > 0.0))
        .count();
    let c = changes == 1 && *diff.last().unwrap() > 0.0;
    let crossing = res
        .axis_values()
        .windows(2)
        .zip(diff.windows(2))
        .find(|(_, d)| (d[0] > 0.0) != (d[1] > 0.0))
        .map(|(r, _)| format!("({:.4}, {:.4})", r[0], r[1]))
        .unwrap_or_else(|| "none".into());
    outcome(
        a && b && c,
        format!(
            "(a) HD increasing: {a}; (b) R_FD(0.05)={lo:.6} > R_FD(0.95)={hi:.6}: {b}; \
             (c) sign changes {changes}, crossover in {crossing}, HD above at rho=0.999: {}",
            diff.last().unwrap() > &0.0
        ),
    )
}

fn criterion_6() -> Outcome {
    let res = run_sweep(&fig6_spec()).unwrap();
    let at = |snr: f64, col: &str| {
        let i = res.axis_values().iter().position(|&v| v == snr).unwrap();
        res.rows[i].values[res.column_index(col).unwrap()].unwrap()
    };
    let (hd40, fd40) = (at(40.0, "R_HD_rho0.7"), at(40.0, "R_FD_rho0.7"));
    let (hd10, fd10) = (at(-10.0, "R_HD_rho0.99"), at(-10.0, "R_FD_rho0.99"));
    let a = fd40 > hd40;
    let b = hd10 > fd10;
    outcome(
        a && b,
        format!(
            "(a) 40 dB, rho=0.7: R_FD={fd40:.6} > R_HD={hd40:.6}: {a}; \
             (b) -10 dB, rho=0.99: R_HD={hd10:.6} > R_FD={fd10:.6}: {b}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let (_, res) = saturation_preset().unwrap();
    let rates: Vec<f64> = res
        .column("R_FD")
        .unwrap()
        .into_iter()
        .map(Option::unwrap)
        .collect();
    let diffs: Vec<f64> = rates.windows(2).map(|w| w[1] - w[0]).collect();
    let shrinking = diffs.windows(2).all(|w| w[1].abs() < w[0].abs());
    let last_rate = *rates.last().unwrap();
    let last_diff = *diffs.last().unwrap();
    let small = last_diff.abs() < 0.01 * last_rate;
    outcome(
        shrinking && small && rates.len() == 9,
        format!(
            "differences shrink monotonically: {shrinking}; last difference {last_diff:e} \
             is {:.2e} of the last rate {last_rate:.6}",
            last_diff.abs() / last_rate
        ),
    )
}

fn mc_check(sim: &FrameSimulator, analytic_rate: f64, seed: u64) -> (bool, String) {
    let config = McConfig::new(1_000_000, seed, SimulationLevel::Statistical).unwrap();
    let samples = sim.run(&config).unwrap();
    let empirical = empirical_key_rate(&samples, sim.frame_time()).unwrap().rate;
    let gap = rel(empirical, analytic_rate);
    let checks = covariance_agreement(
        &samples.sample_covariance(),
        sim.analytic_covariance().unwrap().matrix(),
        samples.n_trials(),
    );
    let within = checks.iter().filter(|c| c.within).count();
    let pass = gap <= 0.02 && within == checks.len();
    (
        pass,
        format!(
            "empirical {empirical:.6} vs analytic {analytic_rate:.6}, gap {:.3}%, covariance {within}/{} entries",
            100.0 * gap,
            checks.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let ch = ChannelParams::new(1.0, 1.0, 0.7).unwrap();
    let radio = RadioParams::new(10.0, 10.0, 1.0, RsiModel::symmetric(1.0)).unwrap();
    let frame = FrameParams::hd(2.5, 2.5).unwrap();
    let hd_sim = FrameSimulator::hd(&ch, &radio, &frame, SimulationLevel::Statistical).unwrap();
    let hd_rate = hd_key_rate_closed_form(&ch, &radio, &frame).unwrap().rate;
    let (a, a_detail) = mc_check(&hd_sim, hd_rate, 42);

    let base = fig5_base();
    let ch = base.channel.with_rho(0.5).unwrap();
    let radio = base.radio.with_powers(5.0, 5.0).unwrap();
    let fd_sim = FrameSimulator::fd(
        &ch,
        &radio,
        &base.frame,
        TimeAccountingPolicy::Uniform,
        SimulationLevel::Statistical,
    )
    .unwrap();
    let fd_rate = fd_key_rate_closed_form_symmetric(&ch, &radio, &base.frame)
        .unwrap()
        .rate;
    let (b, b_detail) = mc_check(&fd_sim, fd_rate, 42);
    outcome(a && b, format!("(a) HD: {a_detail}; (b) FD: {b_detail}"))
}

fn criterion_9() -> Outcome {
    let out = Command::new(BIN)
        .args([
            "rate",
            "--mode",
            "fd",
            "--policy",
            "appendix",
            "--sigma1-sq-db",
            "5",
            "--sigma2-sq-db",
            "5",
            "--rho",
            "0.5",
            "--snr-db",
            "10",
            "--noise-sq",
            "1",
            "--rsi-a-sq",
            "0",
            "--rsi-b-sq",
            "0",
            "--alpha",
            "0.35",
            "--t1",
            "2.5",
            "--t2",
            "2.5",
            "--power-convention",
            "fd-half",
        ])
        .output()
        .unwrap();
    let stderr = String::from_utf8_lossy(&out.stderr);
    let code = out.status.code();
    let pass = code == Some(3) && stderr.contains("T1 - 2*alpha*T") && stderr.contains("<= 0");
    outcome(pass, format!("exit {code:?}, message: {}", stderr.trim()))
}

fn sweep_fig5(extra: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(BIN)
        .args(["sweep", "--preset", "fig5", "--seed", "42"])
        .args(extra)
        .env_remove("FDKEY_OUTPUT_DIR")
        .output()
        .unwrap();
    (out.status.code(), out.stdout)
}

fn criterion_10() -> Outcome {
    let first = sweep_fig5(&[]);
    let second = sweep_fig5(&[]);
    let one = sweep_fig5(&["--threads", "1"]);
    let eight = sweep_fig5(&["--threads", "8"]);
    let ok = first.0 == Some(0) && !first.1.is_empty();
    let rerun = first.1 == second.1;
    let threads = one.1 == eight.1 && one.1 == first.1;
    outcome(
        ok && rerun && threads,
        format!(
            "exit {:?}, {} bytes; rerun identical: {rerun}; --threads 1 vs 8 identical: {threads}",
            first.0,
            first.1.len()
        ),
    )
}

type Criterion = (u32, Duration, fn() -> Outcome);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        (1, Duration::from_secs(1), criterion_1),
        (2, Duration::from_secs(5), criterion_2),
        (3, Duration::from_secs(2), criterion_3),
        (4, Duration::from_secs(1), criterion_4),
        (5, Duration::from_secs(1), criterion_5),
        (6, Duration::from_secs(1), criterion_6),
        (7, Duration::from_secs(1), criterion_7),
        (8, Duration::from_secs(60), criterion_8),
        (9, Duration::from_secs(1), criterion_9),
        (10, Duration::from_secs(5), criterion_10),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr().lock();
    for (n, budget, run) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = o.pass && in_time;
        if !pass {
            failed.push(n);
        }
        writeln!(
            err,
            "criterion {n:>2}: {} [{:.3} s, budget {} s] {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            o.detail
        )
        .unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
