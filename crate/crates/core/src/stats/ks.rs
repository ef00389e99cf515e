use serde::Serialize;

use crate::{Error, Result};

/// Two-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KSResult {
    pub statistic: f64,
    pub n: usize,
    pub m: usize,
    pub p_value: f64,
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    if lambda < 1.18 {
        // P(K ≤ λ) = √(2π)/λ Σ_k exp(-(2k-1)² π² / (8λ²)), fast for small λ.
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for k in 1..=20 {
            let odd = (2 * k - 1) as f64;
            cdf += (-odd * odd * c).exp();
        }
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * cdf).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        for k in 1..=100 {
            let k = k as f64;
            let term = (-2.0 * k * k * lambda * lambda).exp();
            sum += if k as u64 % 2 == 1 { term } else { -term };
            if term < 1e-18 {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// Exact `D = sup |F_n - G_m|` by a merge scan over the sorted samples, with
/// the asymptotic p-value at effective size `nm/(n+m)`.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<KSResult> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySample);
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(Error::invalid("samples contain NaN"));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < n && a[i] <= v {
            i += 1;
        }
        while j < m && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let effective = (n as f64 * m as f64) / (n + m) as f64;
    Ok(KSResult {
        statistic: d,
        n,
        m,
        p_value: kolmogorov_survival(effective.sqrt() * d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        let r = ks_two_sample(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        let r = ks_two_sample(&[0.0], &[1.0]).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(ks_two_sample(&[], &[1.0]).is_err());
    }

    #[test]
    fn ties_are_handled() {
        let r = ks_two_sample(&[0.0, 0.0, 1.0, 1.0], &[0.0, 1.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
    }

    #[test]
    fn survival_branches_agree() {
        for &l in &[1.1, 1.15, 1.17, 1.19, 1.25] {
            let small = {
                let c = std::f64::consts::PI.powi(2) / (8.0 * l * l);
                let s: f64 = (1..=20).map(|k| (-((2 * k - 1) as f64).powi(2) * c).exp()).sum();
                1.0 - (2.0 * std::f64::consts::PI).sqrt() / l * s
            };
            let large: f64 = 2.0 * (1..=100).map(|k| {
                let k = k as f64;
                let t = (-2.0 * k * k * l * l).exp();
                if k as u64 % 2 == 1 { t } else { -t }
            }).sum::<f64>();
            assert!((small - large).abs() < 1e-12, "{l}: {small} {large}");
        }
        assert!((kolmogorov_survival(1.628) - 0.01).abs() < 2e-4);
        assert!((kolmogorov_survival(1.358) - 0.05).abs() < 5e-4);
    }
}
