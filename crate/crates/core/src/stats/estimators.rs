use serde::Serialize;

use crate::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn mean(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(samples.iter().copied().collect::<NeumaierSum>().value() / samples.len() as f64)
}

/// Unbiased sample variance.
pub fn variance(samples: &[f64]) -> Result<f64> {
    let m = mean(samples)?;
    if samples.len() < 2 {
        return Ok(0.0);
    }
    let ss = samples.iter().map(|x| (x - m) * (x - m)).collect::<NeumaierSum>().value();
    Ok(ss / (samples.len() - 1) as f64)
}

/// `(1/N) Σ |x_i|^q` with compensated summation.
pub fn empirical_abs_moment(samples: &[f64], q: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::invalid(format!("moment order must be nonnegative, got {q}")));
    }
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let s: NeumaierSum = samples.iter().map(|x| x.abs().powf(q)).collect();
    Ok(s.value() / samples.len() as f64)
}

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

fn quantile_sorted(v: &[f64], p: f64) -> f64 {
    let h = (v.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// Linearly interpolated sample quantile (the usual "type 7" definition).
pub fn quantile(samples: &[f64], p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("quantile level must be in [0, 1], got {p}")));
    }
    Ok(quantile_sorted(&sorted(samples)?, p))
}

pub fn median(samples: &[f64]) -> Result<f64> {
    quantile(samples, 0.5)
}

/// `x / median(|x|)`: removes the unknown scale of a limit whose location is
/// known to be zero. Unlike the interquartile range, `median(|x|)` is a
/// stable estimate for one-sided laws, whose bulk is squeezed near zero.
pub fn studentize(samples: &[f64]) -> Result<Vec<f64>> {
    let abs: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    let scale = median(&abs)?;
    if !(scale > 0.0) {
        return Err(Error::invalid("median absolute value is zero; cannot studentize"));
    }
    Ok(samples.iter().map(|x| x / scale).collect())
}

/// Least-squares fit of `log moment = intercept + slope · log scale`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub log_scales: Vec<f64>,
    pub log_moments: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

/// Fits a power law through `(scale, moment)` pairs on log–log axes. Needs at
/// least four points with strictly increasing scales spanning a decade.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 4 {
        return Err(Error::invalid(format!("need at least 4 points, got {}", points.len())));
    }
    if points.iter().any(|&(s, m)| !(s > 0.0) || !(m > 0.0) || !m.is_finite()) {
        return Err(Error::invalid("scales and moments must be positive and finite"));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::invalid("scales must be strictly increasing"));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    if xs[xs.len() - 1] - xs[0] < std::f64::consts::LN_10 * (1.0 - 1e-9) {
        return Err(Error::invalid("scales must span at least one decade"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_stderr = (rss / (n - 2.0) / sxx).sqrt();
    Ok(ExponentFit {
        log_scales: xs,
        log_moments: ys,
        slope,
        intercept,
        slope_stderr,
    })
}

/// Exceedance frequency with its 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub count: usize,
    pub n: usize,
    pub p: f64,
    pub lower: f64,
    pub upper: f64,
}

impl TailEstimate {
    fn wilson(count: usize, n: usize) -> Self {
        const Z: f64 = 1.959_963_984_540_054;
        let nf = n as f64;
        let p = count as f64 / nf;
        let z2 = Z * Z;
        let denom = 1.0 + z2 / nf;
        let centre = (p + z2 / (2.0 * nf)) / denom;
        let half = Z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
        Self {
            count,
            n,
            p,
            lower: if count == 0 { 0.0 } else { (centre - half).max(0.0) },
            upper: if count == n { 1.0 } else { (centre + half).min(1.0) },
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

/// `P(X > threshold)`.
pub fn tail_probability(samples: &[f64], threshold: f64) -> Result<TailEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let count = samples.iter().filter(|&&x| x > threshold).count();
    Ok(TailEstimate::wilson(count, samples.len()))
}

/// `P(X < threshold)`.
pub fn tail_probability_below(samples: &[f64], threshold: f64) -> Result<TailEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let count = samples.iter().filter(|&&x| x < threshold).count();
    Ok(TailEstimate::wilson(count, samples.len()))
}
