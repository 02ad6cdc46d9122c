//! Nonlinear approximation and Monte-Carlo denoising with a spectral filter bank.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::filterbank::{SpectralFilterBank, SubbandCoefficients};
use crate::generators::derive_seed;
use crate::spectral::{SpectralBasis, SpectralSignal};

/// Reported in place of +inf when an estimate is exact.
pub const SNR_CAP_DB: f64 = 300.0;

/// Spectral amplitude ratio `fbar(lambda_max) / fbar(lambda_0)` of the
/// default smooth signal.
pub const DEFAULT_SMOOTH_RATIO: f64 = 1e-2;

/// Per-vertex RMS amplitude of the clean signal in denoising runs.
pub const DEFAULT_DENOISE_RMS: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalKind {
    /// `fbar(n) = exp(-decay (lambda_n - lambda_0))`; `None` picks the decay
    /// giving [`DEFAULT_SMOOTH_RATIO`] at `lambda_max`.
    SpectrallySmooth { decay: Option<f64> },
    /// Gaussian bump over spectral indices with a seeded multiplicative
    /// perturbation.
    SpectrallyLocalized { center_index: usize, width: f64 },
}

impl SignalKind {
    pub fn smooth() -> Self {
        SignalKind::SpectrallySmooth { decay: None }
    }
}

/// A unit-norm vertex signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSignal {
    pub kind: SignalKind,
    pub values: Vec<f64>,
}

impl TestSignal {
    pub fn scaled(&self, factor: f64) -> Vec<f64> {
        self.values.iter().map(|v| v * factor).collect()
    }

    /// Values rescaled to the given root-mean-square amplitude.
    pub fn with_rms(&self, rms: f64) -> Vec<f64> {
        self.scaled(rms * (self.values.len() as f64).sqrt())
    }
}

pub fn gen_test_signal(basis: &SpectralBasis, kind: SignalKind, seed: u64) -> Result<TestSignal> {
    let lambdas = basis.eigenvalues();
    let n = lambdas.len();
    if n == 0 {
        return Err(Error::InvalidConfig("empty basis".into()));
    }
    let coeffs: Vec<f64> = match kind {
        SignalKind::SpectrallySmooth { decay } => {
            let span = basis.lambda_max() - lambdas[0];
            let decay = match decay {
                Some(d) if d >= 0.0 && d.is_finite() => d,
                Some(d) => return Err(Error::InvalidConfig(format!("decay {d} must be finite and >= 0"))),
                None if span > 0.0 => -DEFAULT_SMOOTH_RATIO.ln() / span,
                None => 0.0,
            };
            lambdas.iter().map(|&l| (-decay * (l - lambdas[0])).exp()).collect()
        }
        SignalKind::SpectrallyLocalized { center_index, width } => {
            if center_index >= n || !(width > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "localized signal needs center < {n} and width > 0"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|i| {
                    let d = (i as f64 - center_index as f64) / width;
                    let jitter: f64 = rng.random_range(-0.2..0.2);
                    (-0.5 * d * d).exp() * (1.0 + jitter)
                })
                .collect()
        }
    };
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    let unit = SpectralSignal::new(coeffs.iter().map(|c| c / norm).collect());
    let mut values = basis.igft(&unit)?;
    let vnorm = norm2(&values);
    values.iter_mut().for_each(|v| *v /= vnorm);
    Ok(TestSignal { kind, values })
}

fn norm2_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn norm2(x: &[f64]) -> f64 {
    norm2_sq(x).sqrt()
}

fn error_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn ratio_db(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        SNR_CAP_DB
    } else {
        (10.0 * (num / den).log10()).min(SNR_CAP_DB)
    }
}

/// `10 log10(|f|^2 / |f - estimate|^2)`, capped at [`SNR_CAP_DB`].
pub fn snr_db(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    check_len(reference.len(), estimate.len())?;
    let energy = norm2_sq(reference);
    if energy == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(ratio_db(energy, error_sq(reference, estimate)))
}

/// Keeps coefficients with `|c| > t` in both channels, zeroes the rest.
pub fn hard_threshold(sub: &SubbandCoefficients, t: f64) -> SubbandCoefficients {
    sub.map(|_, c| if c.abs() > t { c } else { 0.0 })
}

/// Keeps the `round(fraction * N)` largest-magnitude coefficients across both
/// channels; ties go to the lower global index (low-pass block first).
pub fn nla_keep_fraction(sub: &SubbandCoefficients, fraction: f64) -> Result<SubbandCoefficients> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::FractionOutOfRange(fraction));
    }
    let all: Vec<f64> = sub.iter().copied().collect();
    let k = (fraction * all.len() as f64).round() as usize;
    let mut order: Vec<usize> = (0..all.len()).collect();
    order.sort_by(|&a, &b| all[b].abs().total_cmp(&all[a].abs()).then(a.cmp(&b)));
    let mut keep = vec![false; all.len()];
    for &i in order.iter().take(k) {
        keep[i] = true;
    }
    Ok(sub.map(|i, c| if keep[i] { c } else { 0.0 }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NlaCurve {
    pub fractions: Vec<f64>,
    pub snr_db: Vec<f64>,
}

impl NlaCurve {
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.snr_db.windows(2).all(|w| w[1] >= w[0] - slack)
    }
}

pub fn run_nla(bank: &SpectralFilterBank<'_>, f: &[f64], fractions: &[f64]) -> Result<NlaCurve> {
    if fractions.is_empty() {
        return Err(Error::InvalidConfig("no fractions given".into()));
    }
    if let Some(&bad) = fractions.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
        return Err(Error::FractionOutOfRange(bad));
    }
    if fractions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("fractions must be strictly increasing".into()));
    }
    let sub = bank.analyze(f)?;
    let snr = fractions
        .iter()
        .map(|&p| {
            let kept = nla_keep_fraction(&sub, p)?;
            snr_db(f, &bank.synthesize(&kept)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NlaCurve {
        fractions: fractions.to_vec(),
        snr_db: snr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenoiseConfig {
    pub sigma: f64,
    pub threshold: f64,
    pub runs: usize,
    pub seed: u64,
}

impl DenoiseConfig {
    /// Threshold defaults to `3 sigma`.
    pub fn new(sigma: f64, runs: usize, seed: u64) -> Self {
        Self {
            sigma,
            threshold: 3.0 * sigma,
            runs,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidConfig(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if !(self.threshold >= 0.0) {
            return Err(Error::InvalidConfig(format!("threshold must be >= 0, got {}", self.threshold)));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenoiseResult {
    pub delta_snr_db: f64,
    pub per_run: Vec<f64>,
    pub config: DenoiseConfig,
}

/// Noise for run `run`: i.i.d. `N(0, sigma^2)` per vertex from a stream
/// seeded by `(seed, run)`, independent of evaluation order.
pub fn run_noise(cfg: &DenoiseConfig, run: usize, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, run as u64));
    (0..n)
        .map(|_| cfg.sigma * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// One Monte-Carlo trial: `10 log10(|xi|^2 / |denoised - f|^2)`.
pub fn denoise_once(bank: &SpectralFilterBank<'_>, f: &[f64], cfg: &DenoiseConfig, run: usize) -> Result<f64> {
    let noise = run_noise(cfg, run, f.len());
    let noisy: Vec<f64> = f.iter().zip(&noise).map(|(a, b)| a + b).collect();
    let sub = hard_threshold(&bank.analyze(&noisy)?, cfg.threshold);
    let denoised = bank.synthesize(&sub)?;
    Ok(ratio_db(norm2_sq(&noise), error_sq(&denoised, f)))
}

pub fn run_denoise(bank: &SpectralFilterBank<'_>, f: &[f64], cfg: &DenoiseConfig) -> Result<DenoiseResult> {
    run_denoise_parallel(bank, f, cfg, 1)
}

/// Same results as [`run_denoise`], with runs spread over `threads` workers.
pub fn run_denoise_parallel(
    bank: &SpectralFilterBank<'_>,
    f: &[f64],
    cfg: &DenoiseConfig,
    threads: usize,
) -> Result<DenoiseResult> {
    cfg.validate()?;
    check_len(bank.n(), f.len())?;
    let threads = threads.clamp(1, cfg.runs);
    let mut per_run = vec![0.0; cfg.runs];
    if threads == 1 {
        for (r, slot) in per_run.iter_mut().enumerate() {
            *slot = denoise_once(bank, f, cfg, r)?;
        }
    } else {
        let chunk = cfg.runs.div_ceil(threads);
        std::thread::scope(|s| {
            let handles: Vec<_> = per_run
                .chunks_mut(chunk)
                .enumerate()
                .map(|(c, slots)| {
                    s.spawn(move || -> Result<()> {
                        for (i, slot) in slots.iter_mut().enumerate() {
                            *slot = denoise_once(bank, f, cfg, c * chunk + i)?;
                        }
                        Ok(())
                    })
                })
                .collect();
            handles
                .into_iter()
                .try_for_each(|h| h.join().expect("denoise worker panicked"))
        })?;
    }
    let delta_snr_db = per_run.iter().sum::<f64>() / cfg.runs as f64;
    Ok(DenoiseResult {
        delta_snr_db,
        per_run,
        config: *cfg,
    })
}
