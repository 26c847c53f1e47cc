//! Secret-key rates in bits per symbol.
//!
//! With jointly Gaussian estimates the rate is
//! `(1/2T) log2(|C_AA| |C_BB| / |C|)`. The closed forms for the half-duplex
//! frame and the symmetric full-duplex frame are provided alongside so the two
//! routes can be checked against each other.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::model::{
    build_fd_covariance, build_hd_covariance, ChannelParams, DuplexMode, EstimateCovariance,
    FrameParams, Node, RadioParams, TimeAccountingPolicy,
};

/// Rates in `[-NEGATIVE_RATE_FLOOR, 0)` are rounding dust and are reported as 0.
pub const NEGATIVE_RATE_FLOOR: f64 = 1e-12;

/// Joint determinants at or below this are treated as singular.
pub const SINGULAR_DETERMINANT: f64 = 1e-300;

/// Log ratios below `ln 2` are evaluated through the Schur complement and
/// `ln_1p` rather than from the three determinants.
const DIRECT_LOG_RATIO_MIN: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatePath {
    ClosedForm,
    Covariance,
    MonteCarlo,
}

impl std::fmt::Display for RatePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RatePath::ClosedForm => "closed-form",
            RatePath::Covariance => "covariance",
            RatePath::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `|C_AA|`, `|C_BB|`, `|C|` (for closed forms: the numerator factors and
    /// the closed-form joint determinant).
    pub det_alice: Option<f64>,
    pub det_bob: Option<f64>,
    pub det_joint: Option<f64>,
    /// `log2(|C_AA||C_BB|/|C|)` before the `1/2T` factor.
    pub log2_ratio: f64,
    /// Smallest over largest LU pivot magnitude of `C`.
    pub pivot_ratio: Option<f64>,
    /// True when the log ratio came from the Schur-complement `ln_1p` route.
    pub schur_route: bool,
    /// `|R(A,B) - R(B,A)| / R(A,B)` for the FD closed form with labels swapped.
    pub label_asymmetry: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KeyRateResult {
    /// Bits per symbol.
    pub rate: f64,
    pub mode: DuplexMode,
    pub path: RatePath,
    pub diagnostics: Diagnostics,
}

fn finish_rate(log2_ratio: f64, frame_time: f64) -> Result<f64> {
    let rate = log2_ratio / (2.0 * frame_time);
    if rate.is_nan() {
        return Err(Error::InvalidParams("rate evaluated to NaN".into()));
    }
    if rate < 0.0 {
        if rate >= -NEGATIVE_RATE_FLOOR {
            return Ok(0.0);
        }
        return Err(Error::NegativeMutualInformation(rate));
    }
    // Normalizes -0.0.
    Ok(rate + 0.0)
}

fn rect(c: &Matrix, rows: &[usize], cols: &[usize]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| c.get(i, j)).collect())
        .collect()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                .collect()
        })
        .collect()
}

/// `det(I - M) - 1` for a small square `M`, accurate when `M` is small.
fn det_identity_minus_minus_one(m: &Matrix) -> f64 {
    match m.dim() {
        1 => -m.get(0, 0),
        2 => m.det() - m.trace(),
        n => Matrix::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 } - m.get(i, j)).det() - 1.0,
    }
}

/// Gaussian mutual-information rate from a joint estimate covariance.
pub fn gaussian_key_rate(cov: &EstimateCovariance) -> Result<KeyRateResult> {
    let c = cov.matrix();
    let p = cov.partition();
    p.validate(c.dim())?;

    let c_aa = cov.alice_block();
    let c_bb = cov.bob_block();
    let det_a = c_aa.det();
    let det_b = c_bb.det();
    let lu = Lu::factor(c);
    let det_c = if c.dim() <= 2 { c.det() } else { lu.det() };
    if !(det_c > SINGULAR_DETERMINANT) {
        return Err(Error::SingularCovariance { determinant: det_c });
    }
    if !(det_a > 0.0 && det_b > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }

    let ratio = det_a * det_b / det_c;
    let (ln_ratio, schur_route) = if ratio.is_finite() && ratio < DIRECT_LOG_RATIO_MIN {
        // |C| / (|C_AA||C_BB|) = det(I - C_AA^-1 C_AB C_BB^-1 C_BA).
        let c_ab = rect(c, &p.alice, &p.bob);
        let c_ba = rect(c, &p.bob, &p.alice);
        let inv_a = c_aa.inverse().ok_or(Error::NotPositiveDefinite)?.rows();
        let inv_b = c_bb.inverse().ok_or(Error::NotPositiveDefinite)?.rows();
        let m = matmul(&matmul(&matmul(&inv_a, &c_ab), &inv_b), &c_ba);
        let m = Matrix::from_rows(&m).expect("A-by-A product");
        (-det_identity_minus_minus_one(&m).ln_1p(), true)
    } else {
        (det_a.ln() + det_b.ln() - det_c.ln(), false)
    };
    let log2_ratio = ln_ratio / std::f64::consts::LN_2;

    Ok(KeyRateResult {
        rate: finish_rate(log2_ratio, cov.frame_time())?,
        mode: cov.mode(),
        path: RatePath::Covariance,
        diagnostics: Diagnostics {
            det_alice: Some(det_a),
            det_bob: Some(det_b),
            det_joint: Some(det_c),
            log2_ratio,
            pivot_ratio: Some(lu.pivot_ratio()),
            schur_route,
            label_asymmetry: None,
        },
    })
}

/// Half-duplex rate through the covariance path.
pub fn hd_key_rate(
    ch: &ChannelParams,
    radio: &RadioParams,
    frame: &FrameParams,
) -> Result<KeyRateResult> {
    gaussian_key_rate(&build_hd_covariance(ch, radio, frame)?)
}

/// Full-duplex rate through the covariance path; handles asymmetric frames.
pub fn fd_key_rate(
    ch: &ChannelParams,
    radio: &RadioParams,
    frame: &FrameParams,
    policy: TimeAccountingPolicy,
) -> Result<KeyRateResult> {
    gaussian_key_rate(&build_fd_covariance(ch, radio, frame, policy)?)
}

/// Half-duplex closed form:
///
/// `R = (1/2T) log2[ ab / (ab - ρ²σ1²σ2²) ]`, `a = σ1² + σ²/(P_A T1)`,
/// `b = σ2² + σ²/(P_B T2)`.
///
/// The log is taken as `-log2(1 - ρ²σ1²σ2²/(ab))` so that weak correlation
/// does not lose digits.
pub fn hd_key_rate_closed_form(
    ch: &ChannelParams,
    radio: &RadioParams,
    frame: &FrameParams,
) -> Result<KeyRateResult> {
    if frame.mode() != DuplexMode::Hd {
        return Err(Error::InvalidParams(
            "HD closed form requires an HD frame".into(),
        ));
    }
    let s = radio.noise_sq();
    let a = ch.sigma1_sq() + s / (radio.p_a() * frame.t1());
    let b = ch.sigma2_sq() + s / (radio.p_b() * frame.t2());
    let shared = ch.rho() * ch.rho() * ch.sigma1_sq() * ch.sigma2_sq();
    let log2_ratio = -(-shared / (a * b)).ln_1p() / std::f64::consts::LN_2;
    Ok(KeyRateResult {
        rate: finish_rate(log2_ratio, frame.t_total())?,
        mode: DuplexMode::Hd,
        path: RatePath::ClosedForm,
        diagnostics: Diagnostics {
            det_alice: Some(b),
            det_bob: Some(a),
            det_joint: Some(a * b - shared),
            log2_ratio,
            ..Diagnostics::default()
        },
    })
}

/// Ingredients of the symmetric FD closed form.
struct SymmetricFd {
    s1: f64,
    s2: f64,
    shared: f64,
    /// `2σ_{A,FD}²/(P(1-α)T)`
    d_a: f64,
    /// `2σ_{B,FD}²/(P(1-α)T)`
    d_b: f64,
    /// `1 + σ_{A,FD}²/σ_{B,FD}²`
    ratio_term: f64,
}

impl SymmetricFd {
    fn new(ch: &ChannelParams, radio: &RadioParams, frame: &FrameParams) -> Result<Self> {
        if frame.mode() != DuplexMode::Fd {
            return Err(Error::InvalidParams(
                "FD closed form requires an FD frame".into(),
            ));
        }
        let (pa, pb) = (radio.p_a(), radio.p_b());
        if (pa - pb).abs() > 1e-12 * pa.max(pb) {
            return Err(Error::AsymmetricParams(format!(
                "P_A = {pa} differs from P_B = {pb}"
            )));
        }
        let (t1, t2) = (frame.t1(), frame.t2());
        if (t1 - t2).abs() > 1e-12 * frame.t_total() {
            return Err(Error::AsymmetricParams(format!(
                "T1 = {t1} differs from T2 = {t2}"
            )));
        }
        let window = pa * (1.0 - frame.alpha()) * frame.t_total();
        if !(window > 0.0) {
            return Err(Error::NonPositiveEffectiveTime {
                expression: "(1 - alpha)*T",
                value: (1.0 - frame.alpha()) * frame.t_total(),
            });
        }
        let fd_a = radio.fd_noise_sq(Node::Alice);
        let fd_b = radio.fd_noise_sq(Node::Bob);
        Ok(Self {
            s1: ch.sigma1_sq(),
            s2: ch.sigma2_sq(),
            shared: ch.rho() * ch.rho() * ch.sigma1_sq() * ch.sigma2_sq(),
            d_a: 2.0 * fd_a / window,
            d_b: 2.0 * fd_b / window,
            ratio_term: 1.0 + fd_a / fd_b,
        })
    }

    fn swapped(&self) -> Self {
        Self {
            d_a: self.d_b,
            d_b: self.d_a,
            ratio_term: 1.0 + self.d_b / self.d_a,
            ..*self
        }
    }

    fn block_det(&self, d: f64) -> f64 {
        (self.s1 + d) * (self.s2 + d) - self.shared
    }

    fn joint_det(&self) -> f64 {
        let r = self.ratio_term;
        self.d_b.powi(2)
            * ((self.s1 * r + self.d_a) * (self.s2 * r + self.d_a) - self.shared * r * r)
    }

    fn log2_ratio(&self) -> f64 {
        (self.block_det(self.d_a) * self.block_det(self.d_b) / self.joint_det()).log2()
    }
}

/// Closed-form joint determinant of the FD covariance for a symmetric frame
/// (`P_A = P_B`, `T1 = T2`) under uniform time accounting.
pub fn fd_covariance_determinant_closed_form(
    ch: &ChannelParams,
    radio: &RadioParams,
    frame: &FrameParams,
) -> Result<f64> {
    Ok(SymmetricFd::new(ch, radio, frame)?.joint_det())
}

/// Closed-form FD rate for a symmetric frame under uniform time accounting.
/// Asymmetric inputs are rejected; use [`fd_key_rate`] for those.
pub fn fd_key_rate_closed_form_symmetric(
    ch: &ChannelParams,
    radio: &RadioParams,
    frame: &FrameParams,
) -> Result<KeyRateResult> {
    let sym = SymmetricFd::new(ch, radio, frame)?;
    let log2_ratio = sym.log2_ratio();
    let rate = finish_rate(log2_ratio, frame.t_total())?;
    let swapped = finish_rate(sym.swapped().log2_ratio(), frame.t_total())?;
    let label_asymmetry = if rate > 0.0 {
        (rate - swapped).abs() / rate
    } else {
        (rate - swapped).abs()
    };
    Ok(KeyRateResult {
        rate,
        mode: DuplexMode::Fd,
        path: RatePath::ClosedForm,
        diagnostics: Diagnostics {
            det_alice: Some(sym.block_det(sym.d_a)),
            det_bob: Some(sym.block_det(sym.d_b)),
            det_joint: Some(sym.joint_det()),
            log2_ratio,
            label_asymmetry: Some(label_asymmetry),
            ..Diagnostics::default()
        },
    })
}

/// Limit of the HD rate as both powers grow without bound:
/// `(1/T) log2(1/sqrt(1-ρ²))`.
pub fn hd_high_snr_limit(ch: &ChannelParams, frame: &FrameParams) -> Result<f64> {
    let rho = ch.rho();
    if rho.abs() >= 1.0 {
        return Err(Error::DegenerateCorrelation);
    }
    Ok((-0.5 * (-rho * rho).ln_1p() / std::f64::consts::LN_2) / frame.t_total() + 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{assemble_hd, Partition, RsiModel};

    fn rel(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            (a - b).abs() / b.abs()
        }
    }

    fn cov(rows: &[Vec<f64>], alice: Vec<usize>, bob: Vec<usize>, t: f64) -> EstimateCovariance {
        EstimateCovariance::new(
            Matrix::from_rows(rows).unwrap(),
            Partition { alice, bob },
            t,
        )
        .unwrap()
    }

    /// Differential entropy of N(0, C) in bits.
    fn gaussian_entropy_bits(m: &Matrix) -> f64 {
        let k = m.dim() as f64;
        0.5 * ((2.0 * std::f64::consts::PI * std::f64::consts::E).powf(k) * m.det()).log2()
    }

    #[test]
    fn block_diagonal_has_zero_rate() {
        let c = cov(
            &[
                vec![2.0, 0.5, 0.0, 0.0],
                vec![0.5, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 3.0, -0.2],
                vec![0.0, 0.0, -0.2, 1.0],
            ],
            vec![0, 1],
            vec![2, 3],
            1.0,
        );
        assert_eq!(gaussian_key_rate(&c).unwrap().rate, 0.0);
    }

    #[test]
    fn two_by_two_against_entropy_difference() {
        let c = cov(&[vec![2.0, 1.0], vec![1.0, 2.0]], vec![0], vec![1], 1.0);
        let r = gaussian_key_rate(&c).unwrap();
        let m = c.matrix();
        let oracle = gaussian_entropy_bits(&m.submatrix(&[0], &[0]))
            + gaussian_entropy_bits(&m.submatrix(&[1], &[1]))
            - gaussian_entropy_bits(m);
        assert!(rel(r.rate, oracle) < 1e-12, "{} vs {oracle}", r.rate);
        assert!(rel(r.rate, 0.5 * (4.0f64 / 3.0).log2()) < 1e-14);
        assert!((r.rate - 0.2075).abs() < 5e-5);
        assert_eq!(r.mode, DuplexMode::Hd);
    }

    #[test]
    fn joint_rescaling_leaves_rate_unchanged() {
        let c = cov(
            &[
                vec![2.0, 0.5, 1.0, 0.3],
                vec![0.5, 1.5, 0.3, 0.9],
                vec![1.0, 0.3, 2.2, 0.5],
                vec![0.3, 0.9, 0.5, 1.4],
            ],
            vec![0, 1],
            vec![2, 3],
            3.0,
        );
        let a = gaussian_key_rate(&c).unwrap().rate;
        let b = gaussian_key_rate(&c.scaled(7.0).unwrap()).unwrap().rate;
        assert!(rel(b, a) < 1e-12);
    }

    #[test]
    fn non_contiguous_partition() {
        // Same problem as the contiguous case with coordinates interleaved.
        let base = [
            vec![2.0, 0.5, 1.0, 0.3],
            vec![0.5, 1.5, 0.3, 0.9],
            vec![1.0, 0.3, 2.2, 0.5],
            vec![0.3, 0.9, 0.5, 1.4],
        ];
        let a = gaussian_key_rate(&cov(&base, vec![0, 1], vec![2, 3], 1.0))
            .unwrap()
            .rate;
        let perm = [0, 2, 1, 3];
        let permuted = Matrix::from_rows(&base).unwrap().permuted(&perm);
        let c = EstimateCovariance::new(
            permuted,
            Partition {
                alice: vec![0, 2],
                bob: vec![1, 3],
            },
            1.0,
        )
        .unwrap();
        assert!(rel(gaussian_key_rate(&c).unwrap().rate, a) < 1e-13);
    }

    #[test]
    fn hd_closed_form_zero_correlation() {
        let ch = ChannelParams::new(3.0, 0.5, 0.0).unwrap();
        let radio = RadioParams::new(2.0, 7.0, 1.5, RsiModel::none()).unwrap();
        let frame = FrameParams::hd(1.5, 4.0).unwrap();
        let r = hd_key_rate_closed_form(&ch, &radio, &frame).unwrap();
        assert_eq!(r.rate, 0.0);
        assert!(r.rate.is_sign_positive());
    }

    #[test]
    fn hd_closed_form_noiseless_limit() {
        let ch = ChannelParams::new(1.0, 1.0, 0.5).unwrap();
        let radio = RadioParams::new(1.0, 1.0, 1e-200, RsiModel::none()).unwrap();
        let frame = FrameParams::hd(0.5, 0.5).unwrap();
        let closed = hd_key_rate_closed_form(&ch, &radio, &frame).unwrap().rate;
        let oracle = gaussian_key_rate(&assemble_hd(&ch, [0.0, 0.0], 1.0).unwrap())
            .unwrap()
            .rate;
        assert!(rel(closed, oracle) < 1e-14);
        assert!((closed - 0.2075).abs() < 5e-5);
    }

    #[test]
    fn hd_asymptote_from_closed_form() {
        let ch = ChannelParams::new(1.0, 1.0, 0.7).unwrap();
        let frame = FrameParams::hd(2.5, 2.5).unwrap();
        let limit = hd_high_snr_limit(&ch, &frame).unwrap();
        // 0.1 * log2(1 / 0.51)
        assert!((limit - 0.097143).abs() < 1e-6, "{limit}");
        let radio = RadioParams::new(1e9, 1e9, 1.0, RsiModel::none()).unwrap();
        let at_high_power = hd_key_rate_closed_form(&ch, &radio, &frame).unwrap().rate;
        assert!(rel(at_high_power, limit) < 1e-8);
    }

    #[test]
    fn high_snr_limit_cases() {
        let frame = FrameParams::hd(0.5, 0.5).unwrap();
        let ch0 = ChannelParams::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(hd_high_snr_limit(&ch0, &frame).unwrap(), 0.0);
        let ch = ChannelParams::new(1.0, 1.0, 0.99).unwrap();
        let limit = hd_high_snr_limit(&ch, &frame).unwrap();
        assert!((limit - 2.8255).abs() < 1e-4, "{limit}");
        let radio = RadioParams::new(1e9, 1e9, 1.0, RsiModel::none()).unwrap();
        let oracle = hd_key_rate_closed_form(&ch, &radio, &frame).unwrap().rate;
        assert!(rel(oracle, limit) < 1e-7);
        let ch1 = ChannelParams::new(1.0, 1.0, -1.0).unwrap();
        assert_eq!(
            hd_high_snr_limit(&ch1, &frame),
            Err(Error::DegenerateCorrelation)
        );
    }

    #[test]
    fn fd_closed_form_rejects_asymmetry() {
        let ch = ChannelParams::new(1.0, 1.0, 0.5).unwrap();
        let frame = FrameParams::fd(2.5, 2.5, 0.35).unwrap();
        let radio = RadioParams::new(2.0, 3.0, 1.0, RsiModel::none()).unwrap();
        assert!(matches!(
            fd_key_rate_closed_form_symmetric(&ch, &radio, &frame),
            Err(Error::AsymmetricParams(_))
        ));
        let radio = RadioParams::new(2.0, 2.0, 1.0, RsiModel::none()).unwrap();
        let uneven = FrameParams::fd(2.0, 3.0, 0.35).unwrap();
        assert!(matches!(
            fd_key_rate_closed_form_symmetric(&ch, &radio, &uneven),
            Err(Error::AsymmetricParams(_))
        ));
        assert!(fd_key_rate(&ch, &radio, &uneven, TimeAccountingPolicy::Uniform).is_ok());
    }

    #[test]
    fn fd_zero_correlation_splits_into_two_problems() {
        let ch = ChannelParams::new(2.0, 1.5, 0.0).unwrap();
        let radio = RadioParams::new(3.0, 3.0, 1.0, RsiModel::symmetric(0.5)).unwrap();
        let frame = FrameParams::fd(2.0, 2.0, 0.2).unwrap();
        let r = fd_key_rate_closed_form_symmetric(&ch, &radio, &frame).unwrap();
        // With ρ = 0 the h1 pair and the h2 pair are independent 2×2 problems.
        let d = 2.0 * 1.5 / (3.0 * 0.8 * 4.0);
        let pair = |s: f64| {
            let c = cov(&[vec![s + d, s], vec![s, s + d]], vec![0], vec![1], 4.0);
            gaussian_key_rate(&c).unwrap().rate
        };
        let oracle = pair(2.0) + pair(1.5);
        assert!(r.rate > 0.0);
        assert!(rel(r.rate, oracle) < 1e-12, "{} vs {oracle}", r.rate);
    }

    #[test]
    fn fd_closed_form_label_symmetry_is_reported() {
        let ch = ChannelParams::new(1.3, 0.8, 0.6).unwrap();
        let radio = RadioParams::new(
            4.0,
            4.0,
            1.0,
            RsiModel::Explicit {
                alice_sq: 0.2,
                bob_sq: 5.0,
            },
        )
        .unwrap();
        let frame = FrameParams::fd(3.0, 3.0, 0.1).unwrap();
        let r = fd_key_rate_closed_form_symmetric(&ch, &radio, &frame).unwrap();
        let asym = r.diagnostics.label_asymmetry.unwrap();
        assert!(asym < 1e-12, "{asym}");
    }

    #[test]
    fn fig5_point_rate_decreases_with_correlation() {
        let s = 10f64.powf(0.5);
        let radio = RadioParams::new(5.0, 5.0, 1.0, RsiModel::none()).unwrap();
        let frame = FrameParams::fd(2.5, 2.5, 0.35).unwrap();
        let at = |rho| {
            let ch = ChannelParams::new(s, s, rho).unwrap();
            let closed = fd_key_rate_closed_form_symmetric(&ch, &radio, &frame)
                .unwrap()
                .rate;
            let via_cov = fd_key_rate(&ch, &radio, &frame, TimeAccountingPolicy::Uniform)
                .unwrap()
                .rate;
            assert!(rel(closed, via_cov) < 1e-9);
            closed
        };
        let r5 = at(0.5);
        assert!(r5.is_finite() && r5 > 0.0);
        assert!(r5 > at(0.9));
    }

    #[test]
    fn determinant_limit_as_bob_noise_vanishes() {
        // The leading (2σ_B,FD²/..)² factor vanishes but the bracket grows as
        // its inverse square; by the Schur complement |C| -> d_A² |S|.
        let ch = ChannelParams::new(1.0, 1.0, 0.3).unwrap();
        let frame = FrameParams::fd(2.0, 2.0, 0.0).unwrap();
        let radio = RadioParams::new(
            1.0,
            1.0,
            1e-10,
            RsiModel::Explicit {
                alice_sq: 1.0,
                bob_sq: 0.0,
            },
        )
        .unwrap();
        let det = fd_covariance_determinant_closed_form(&ch, &radio, &frame).unwrap();
        let d_a = 2.0 * (1.0 + 1e-10) / 4.0;
        let limit = d_a * d_a * (1.0 - 0.09);
        assert!(rel(det, limit) < 1e-8, "{det} vs {limit}");
    }

    #[test]
    fn equal_rsi_ratio_term_is_two() {
        let ch = ChannelParams::new(1.0, 1.0, 0.3).unwrap();
        let radio = RadioParams::new(2.0, 2.0, 1.0, RsiModel::symmetric(0.7)).unwrap();
        let frame = FrameParams::fd(2.0, 2.0, 0.1).unwrap();
        let sym = SymmetricFd::new(&ch, &radio, &frame).unwrap();
        assert_eq!(sym.ratio_term, 2.0);
        assert_eq!(sym.d_a, sym.d_b);
    }

    #[test]
    fn zero_correlation_determinant_has_product_form() {
        let ch = ChannelParams::new(1.5, 0.5, 0.0).unwrap();
        let radio = RadioParams::new(2.0, 2.0, 1.0, RsiModel::symmetric(1.0)).unwrap();
        let frame = FrameParams::fd(2.0, 2.0, 0.25).unwrap();
        let d = 2.0 * 2.0 / (2.0 * 0.75 * 4.0);
        // d² (2σ1² + d)(2σ2² + d)
        let expected = d * d * (2.0 * 1.5 + d) * (2.0 * 0.5 + d);
        let got = fd_covariance_determinant_closed_form(&ch, &radio, &frame).unwrap();
        assert!(rel(got, expected) < 1e-14);
    }

    #[test]
    fn singular_and_negative_guards() {
        assert!(finish_rate(-1e-13 * 2.0, 1.0).unwrap() == 0.0);
        assert!(matches!(
            finish_rate(-1e-6, 1.0),
            Err(Error::NegativeMutualInformation(_))
        ));
    }
}
