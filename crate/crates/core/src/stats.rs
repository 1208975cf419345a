//! Statistics for optimality-gap studies: Weibull maximum likelihood,
//! Weibull moments and Pearson correlation.

use alloc::vec::Vec;

/// Gaps at or below this are treated as zero and left out of the Weibull
/// fit (tabulated gaps have two decimals).
pub const POSITIVE_GAP_THRESHOLD: f64 = 0.005;

/// Convergence target for the shape equation, `|f(beta)|`.
pub const SHAPE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("Weibull parameters must be positive (shape {shape}, scale {scale})")]
    NonpositiveParameter { shape: f64, scale: f64 },
    #[error("need at least {needed} positive samples, got {got}")]
    InsufficientPositiveGaps { needed: usize, got: usize },
    #[error("samples must be positive and finite")]
    InvalidSample,
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("correlation undefined for a constant series")]
    ZeroVariance,
    #[error("shape equation did not converge")]
    NoConvergence,
}

/// Gamma function. Backed by `libm::tgamma` (Lanczos approximation).
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Mean `eta * G(1 + 1/beta)` and standard deviation
/// `eta * sqrt(G(1 + 2/beta) - G(1 + 1/beta)^2)`.
pub fn weibull_moments(shape: f64, scale: f64) -> Result<(f64, f64), StatsError> {
    if !(shape > 0.0 && scale > 0.0) {
        return Err(StatsError::NonpositiveParameter { shape, scale });
    }
    let g1 = gamma(1.0 + 1.0 / shape);
    let g2 = gamma(1.0 + 2.0 / shape);
    Ok((scale * g1, scale * libm::sqrt(g2 - g1 * g1)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullFit {
    pub shape: f64,
    pub scale: f64,
    pub iterations: usize,
}

/// Maximum-likelihood two-parameter Weibull fit.
///
/// The shape solves the profile equation
///
/// ```text
/// f(beta) = 1/beta + mean(ln x) - sum(x^beta ln x) / sum(x^beta) = 0
/// ```
///
/// which is strictly decreasing in `beta`. A bracket is grown by doubling and
/// then narrowed by Newton steps that fall back to bisection when they leave
/// it. The scale follows as `(mean(x^beta))^(1/beta)`.
pub fn weibull_mle(samples: &[f64]) -> Result<WeibullFit, StatsError> {
    if samples.len() < 2 {
        return Err(StatsError::InsufficientPositiveGaps {
            needed: 2,
            got: samples.len(),
        });
    }
    if !samples.iter().all(|&x| x.is_finite() && x > 0.0) {
        return Err(StatsError::InvalidSample);
    }
    let max = samples.iter().copied().fold(0.0, f64::max);
    if samples.iter().all(|&x| x == max) {
        return Err(StatsError::ZeroVariance);
    }
    // Scaling by the maximum keeps x^beta in [0, 1].
    let logs: Vec<f64> = samples.iter().map(|&x| libm::log(x / max)).collect();
    let n = logs.len() as f64;
    let mean_log = logs.iter().sum::<f64>() / n;

    // f, f' at beta.
    let eval = |beta: f64| {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for &l in &logs {
            let p = libm::exp(beta * l);
            s0 += p;
            s1 += p * l;
            s2 += p * l * l;
        }
        let f = 1.0 / beta + mean_log - s1 / s0;
        let df = -1.0 / (beta * beta) - (s2 * s0 - s1 * s1) / (s0 * s0);
        (f, df)
    };

    let (mut lo, mut hi) = (1e-3, 1.0);
    while eval(lo).0 < 0.0 {
        lo /= 2.0;
        if lo < 1e-12 {
            return Err(StatsError::NoConvergence);
        }
    }
    while eval(hi).0 > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(StatsError::NoConvergence);
        }
    }

    let mut beta = 0.5 * (lo + hi);
    for iteration in 1..=200 {
        let (f, df) = eval(beta);
        if f.abs() < SHAPE_TOLERANCE {
            return Ok(WeibullFit {
                shape: beta,
                scale: weibull_scale(samples, beta),
                iterations: iteration,
            });
        }
        if f > 0.0 {
            lo = beta;
        } else {
            hi = beta;
        }
        let newton = beta - f / df;
        beta = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(StatsError::NoConvergence)
}

/// Scale estimate for a given shape, `(mean(x^beta))^(1/beta)`.
pub fn weibull_scale(samples: &[f64], shape: f64) -> f64 {
    let max = samples.iter().copied().fold(0.0, f64::max);
    let mean_pow = samples
        .iter()
        .map(|&x| libm::pow(x / max, shape))
        .sum::<f64>()
        / samples.len() as f64;
    max * libm::pow(mean_pow, 1.0 / shape)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    libm::sqrt(ss / (xs.len() as f64 - 1.0))
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok(sxy / libm::sqrt(sxx * syy))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapStats {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub weibull_shape: f64,
    pub weibull_scale: f64,
    /// Gaps at or below [`POSITIVE_GAP_THRESHOLD`], left out of the fit.
    pub excluded_zero_count: usize,
    pub correlation_with_scale: f64,
}

/// Summary of an empirical gap distribution against a scale index.
pub fn gap_stats(gaps: &[f64], scales: &[f64]) -> Result<GapStats, StatsError> {
    if gaps.len() != scales.len() {
        return Err(StatsError::LengthMismatch(gaps.len(), scales.len()));
    }
    if !gaps.iter().chain(scales).all(|x| x.is_finite()) {
        return Err(StatsError::InvalidSample);
    }
    let positive: Vec<f64> = gaps
        .iter()
        .copied()
        .filter(|&g| g > POSITIVE_GAP_THRESHOLD)
        .collect();
    if positive.len() < 3 {
        return Err(StatsError::InsufficientPositiveGaps {
            needed: 3,
            got: positive.len(),
        });
    }
    let fit = weibull_mle(&positive)?;
    Ok(GapStats {
        n: gaps.len(),
        mean: mean(gaps),
        std: sample_std(gaps),
        weibull_shape: fit.shape,
        weibull_scale: fit.scale,
        excluded_zero_count: gaps.len() - positive.len(),
        correlation_with_scale: pearson(scales, gaps)?,
    })
}
