//! Closed-form constants of the moment and large-deviation asymptotics of the
//! annealed Lévy–Lorentz gas.

use std::f64::consts::PI;

use crate::medium::{gap_tail, GapLaw};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::special::{ln_gamma, power_sum};
use crate::{Error, Result};

/// `m_q = E|N(0,1)|^q = √(2^q/π) Γ((q+1)/2)`.
pub fn gaussian_abs_moment(q: f64) -> Result<f64> {
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::invalid(format!("moment order must be nonnegative, got {q}")));
    }
    Ok((0.5 * q * std::f64::consts::LN_2 - 0.5 * PI.ln() + ln_gamma(0.5 * (q + 1.0))).exp())
}

/// Number of terms `⌈(1-r)/(2r)⌉` of the finite sum defining `f_α(r)`.
fn term_count(r: f64) -> f64 {
    ((1.0 - r) / (2.0 * r)).ceil().max(1.0)
}

/// `f_α(r) = Σ_{j=0}^{⌈(1-r)/2r⌉-1} ((2j+2)/(1+r))^α - (2j/(1-r))^α`, for `0 < r < 1`.
pub fn f_alpha(alpha: f64, r: f64) -> Result<f64> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("f_alpha needs alpha >= 1, got {alpha}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::invalid(format!("f_alpha needs 0 < r < 1, got {r}")));
    }
    Ok(f_alpha_unchecked(alpha, r))
}

/// Evaluation without argument checks. For more than 64 terms the sum is
/// rewritten through the power sum `H(N) = Σ_{m≤N} m^α` as
/// `2^α (1-r)^{-α} [N^α + H(N) expm1(-2α atanh r)]`, which costs O(1) and
/// does not cancel catastrophically as `r → 0`.
pub(crate) fn f_alpha_unchecked(alpha: f64, r: f64) -> f64 {
    let n = term_count(r);
    if n <= 64.0 {
        let (up, down) = (1.0 + r, 1.0 - r);
        let mut sum = 0.0;
        for j in 0..n as u32 {
            let j = j as f64;
            sum += ((2.0 * j + 2.0) / up).powf(alpha) - (2.0 * j / down).powf(alpha);
        }
        return sum;
    }
    let h = power_sum(alpha, n);
    let bracket = n.powf(alpha) + h * (-2.0 * alpha * r.atanh()).exp_m1();
    2f64.powf(alpha) * (1.0 - r).powf(-alpha) * bracket
}

/// Parameter region where `∫_0^1 r^{q-1} f_α(r) dr` is finite and the
/// ballistic branch of the moment asymptotics is defined.
fn check_convergence(alpha: f64, q: f64) -> Result<()> {
    let corner = 2.0 * alpha - 1.0;
    let ok = (q == corner && alpha > 1.0) || (q > corner && alpha >= 1.0);
    if ok {
        Ok(())
    } else if alpha < 1.0 {
        Err(Error::Divergent(format!("alpha = {alpha} must be at least 1")))
    } else if q == corner {
        Err(Error::Divergent(format!(
            "q = 2 alpha - 1 = {q} needs alpha > 1 (got alpha = {alpha})"
        )))
    } else {
        Err(Error::Divergent(format!(
            "q = {q} is below 2 alpha - 1 = {corner}; the integral of r^(q-1) f_alpha(r) diverges at 0"
        )))
    }
}

/// `∫_0^1 r^{q-1} f_α(r) dr`, with `r = u^k`, `k = 1/(q-α)` turning the
/// `r^{q-1-α}/(α+1)` behaviour at the origin into a bounded integrand.
pub fn moment_integral(alpha: f64, q: f64, config: &QuadratureConfig) -> Result<f64> {
    check_convergence(alpha, q)?;
    let k = 1.0 / (q - alpha);
    let limit = k / (alpha + 1.0);
    let integrand = |u: f64| {
        let r = u.powf(k);
        if r < 1e-280 {
            return limit;
        }
        k * u.powf(k * q - 1.0) * f_alpha_unchecked(alpha, r)
    };
    // Kinks of f_α sit at r = 1/(2j+1).
    let mut points: Vec<f64> = (1..=64)
        .rev()
        .map(|j| (1.0 / (2.0 * j as f64 + 1.0)).powf(q - alpha))
        .collect();
    points.insert(0, 0.0);
    points.push(1.0);
    Ok(integrate(integrand, &points, config)?.value)
}

/// `d_{μ,α,q} = √(2/μ) Γ(q-α+1)/Γ(q-α+3/2) ∫_0^1 r^{q-1} f_α(r) dr`.
pub fn d_const(mu: f64, alpha: f64, q: f64, config: &QuadratureConfig) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::invalid(format!("mu must be positive and finite, got {mu}")));
    }
    check_convergence(alpha, q)?;
    let ratio = (ln_gamma(q - alpha + 1.0) - ln_gamma(q - alpha + 1.5)).exp();
    Ok((2.0 / mu).sqrt() * ratio * moment_integral(alpha, q, config)?)
}

/// `∫_a^1 f_α(a/η) η^{-α} / √(1-η) dη`, with `η = 1 - u²` removing the
/// square-root singularity at `η = 1`.
pub fn tail_integral(alpha: f64, a: f64, config: &QuadratureConfig) -> Result<f64> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be at least 1, got {alpha}")));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::invalid(format!("a must lie in (0, 1], got {a}")));
    }
    if a == 1.0 {
        return Ok(0.0);
    }
    let upper = (1.0 - a).sqrt();
    let integrand = |u: f64| {
        let eta = 1.0 - u * u;
        2.0 * f_alpha_unchecked(alpha, (a / eta).min(1.0)) * eta.powf(-alpha)
    };
    // Kinks where a/η = 1/(2j+1), i.e. η = a(2j+1) < 1.
    let mut points = vec![0.0];
    let mut kinks: Vec<f64> = (1..)
        .map(|j| a * (2.0 * j as f64 + 1.0))
        .take_while(|&eta| eta < 1.0)
        .take(10_000)
        .map(|eta| (1.0 - eta).sqrt())
        .collect();
    kinks.reverse();
    points.extend(kinks);
    points.push(upper);
    Ok(integrate(integrand, &points, config)?.value)
}

/// `F_{μ,α,a} = (2πμ)^{-1/2} ∫_a^1 f_α(a/η) η^{-α} (1-η)^{-1/2} dη`.
#[allow(non_snake_case)]
pub fn F_const(mu: f64, alpha: f64, a: f64, config: &QuadratureConfig) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::invalid(format!("mu must be positive and finite, got {mu}")));
    }
    Ok(tail_integral(alpha, a, config)? / (2.0 * PI * mu).sqrt())
}

/// Which branch of the moment asymptotics applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentRegime {
    Diffusive,
    Corner,
    Ballistic,
}

pub fn moment_regime(alpha: f64, q: f64) -> MomentRegime {
    let corner = 2.0 * alpha - 1.0;
    if q < corner || (q == 1.0 && alpha == 1.0) {
        MomentRegime::Diffusive
    } else if q == corner {
        MomentRegime::Corner
    } else {
        MomentRegime::Ballistic
    }
}

/// Leading large-`t` behaviour of `E|X(t)|^q` for the annealed gas with
/// simple symmetric underlying walk:
///
/// * `q < 2α-1` (or `q = α = 1`): `m_q μ^{q/2} t^{q/2}`;
/// * `q = 2α-1`, `α > 1`: the sum of both terms;
/// * `q > 2α-1`: `d_{μ,α,q} t^{q+1/2} τ_ζ(t)`.
pub fn moment_asymptote(
    mu: f64,
    alpha: f64,
    q: f64,
    t: f64,
    gap_law: &GapLaw,
    config: &QuadratureConfig,
) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::invalid(format!("q must be positive, got {q}")));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::Hypothesis(format!("the mean gap must be finite, got {mu}")));
    }
    if !(alpha >= 1.0) {
        return Err(Error::Hypothesis(format!("the tail index must be at least 1, got {alpha}")));
    }
    match gap_law.tail_index() {
        Some(a) if a == alpha => {}
        _ => {
            return Err(Error::Hypothesis(format!(
                "gap law {gap_law:?} is not regularly varying with index -{alpha}"
            )))
        }
    }
    let diffusive = || -> Result<f64> { Ok(gaussian_abs_moment(q)? * (mu * t).powf(0.5 * q)) };
    let ballistic = || -> Result<f64> {
        Ok(d_const(mu, alpha, q, config)? * t.powf(q + 0.5) * gap_tail(gap_law, t))
    };
    match moment_regime(alpha, q) {
        MomentRegime::Diffusive => diffusive(),
        MomentRegime::Corner => Ok(diffusive()? + ballistic()?),
        MomentRegime::Ballistic => ballistic(),
    }
}

/// `γ(q)`: `q/2` up to the corner `q = 2α-1`, then `q + 1/2 - α`.
pub fn gamma_exponent(alpha: f64, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::invalid(format!("q must be positive, got {q}")));
    }
    if !(alpha >= 1.0) {
        return Err(Error::invalid(format!("alpha must be at least 1, got {alpha}")));
    }
    Ok(if q <= 2.0 * alpha - 1.0 { 0.5 * q } else { q + 0.5 - alpha })
}

/// Tables dumped by `levylab constants`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    GaussianMoments,
    FAlpha,
    D,
    F,
    Gamma,
}

impl std::str::FromStr for Table {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mq" => Ok(Table::GaussianMoments),
            "f" => Ok(Table::FAlpha),
            "d" => Ok(Table::D),
            "F" => Ok(Table::F),
            "gamma" => Ok(Table::Gamma),
            other => Err(Error::invalid(format!("unknown table {other:?} (mq, f, d, F, gamma)"))),
        }
    }
}

/// Rows of a constants table as CSV text.
pub fn table_csv(table: Table, mu: f64, config: &QuadratureConfig) -> Result<String> {
    let alphas = [1.0, 1.25, 1.5, 1.75, 2.0];
    let mut out = String::new();
    match table {
        Table::GaussianMoments => {
            out.push_str("q,m_q\n");
            for i in 0..=16 {
                let q = 0.5 * i as f64;
                out.push_str(&format!("{q},{:.15e}\n", gaussian_abs_moment(q)?));
            }
        }
        Table::FAlpha => {
            out.push_str("alpha,r,f_alpha\n");
            for &alpha in &alphas {
                for &r in &[1e-3, 0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 0.99] {
                    out.push_str(&format!("{alpha},{r},{:.15e}\n", f_alpha(alpha, r)?));
                }
            }
        }
        Table::D => {
            out.push_str("mu,alpha,q,d\n");
            for &alpha in &alphas {
                for i in 0..=6 {
                    let q = 2.0 * alpha - 1.0 + 0.5 * i as f64;
                    if alpha == 1.0 && i == 0 {
                        continue;
                    }
                    out.push_str(&format!("{mu},{alpha},{q},{:.15e}\n", d_const(mu, alpha, q, config)?));
                }
            }
        }
        Table::F => {
            out.push_str("mu,alpha,a,F\n");
            for &alpha in &alphas {
                for &a in &[0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
                    out.push_str(&format!("{mu},{alpha},{a},{:.15e}\n", F_const(mu, alpha, a, config)?));
                }
            }
        }
        Table::Gamma => {
            out.push_str("alpha,q,gamma\n");
            for &alpha in &alphas {
                for i in 1..=16 {
                    let q = 0.5 * i as f64;
                    out.push_str(&format!("{alpha},{q},{}\n", gamma_exponent(alpha, q)?));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gaussian_moments() {
        assert!(rel(gaussian_abs_moment(0.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gaussian_abs_moment(2.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gaussian_abs_moment(1.0).unwrap(), 0.797_884_560_802_865_4) < 1e-14);
        assert!(rel(gaussian_abs_moment(4.0).unwrap(), 3.0) < 1e-14);
        assert!(gaussian_abs_moment(-1.0).is_err());
    }

    #[test]
    fn f_alpha_examples() {
        assert!(rel(f_alpha(1.5, 0.5).unwrap(), (4.0f64 / 3.0).powf(1.5)) < 1e-14);
        assert!(rel(f_alpha(1.0, 0.9).unwrap(), 2.0 / 1.9) < 1e-14);
        assert!(f_alpha(1.5, 0.0).is_err());
        assert!(f_alpha(1.5, 1.0).is_err());
        assert!(f_alpha(0.5, 0.5).is_err());
    }

    fn f_direct(alpha: f64, r: f64) -> f64 {
        let n = ((1.0 - r) / (2.0 * r)).ceil() as u64;
        (0..n)
            .map(|j| {
                let j = j as f64;
                ((2.0 * j + 2.0) / (1.0 + r)).powf(alpha) - (2.0 * j / (1.0 - r)).powf(alpha)
            })
            .sum()
    }

    #[test]
    fn closed_form_agrees_with_direct_sum() {
        for &alpha in &[1.0, 1.3, 1.5, 2.0] {
            for &r in &[7e-3, 3e-3, 1e-3, 1.234e-4, 1e-5] {
                let a = f_alpha(alpha, r).unwrap();
                let b = f_direct(alpha, r);
                assert!(rel(a, b) < 1e-9, "alpha {alpha} r {r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn small_r_asymptote() {
        let alpha = 1.5;
        let r = 1e-3;
        let ratio = f_alpha(alpha, r).unwrap() * (alpha + 1.0) * r.powf(alpha);
        assert!((ratio - 1.0).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn f_is_continuous_across_kinks() {
        for j in 1..200u32 {
            let r = 1.0 / (2.0 * j as f64 + 1.0);
            let lo = f_alpha(1.5, r * (1.0 - 1e-12)).unwrap();
            let hi = f_alpha(1.5, r * (1.0 + 1e-12)).unwrap();
            assert!(rel(lo, hi) < 1e-8, "jump at r = {r}");
        }
    }

    #[test]
    fn gamma_exponent_branches() {
        assert_eq!(gamma_exponent(1.5, 1.0).unwrap(), 0.5);
        assert_eq!(gamma_exponent(1.5, 2.0).unwrap(), 1.0);
        assert_eq!(gamma_exponent(1.5, 4.0).unwrap(), 3.0);
        assert!(gamma_exponent(1.5, 0.0).is_err());
    }

    #[test]
    fn divergent_pairs_are_named() {
        let cfg = QuadratureConfig::default();
        let err = d_const(3.0, 1.5, 1.0, &cfg).unwrap_err();
        assert!(matches!(&err, Error::Divergent(m) if m.contains("below 2 alpha - 1")));
        let err = d_const(3.0, 1.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(&err, Error::Divergent(m) if m.contains("needs alpha > 1")));
        assert!(d_const(3.0, 1.0, 1.5, &cfg).is_ok());
        assert!(d_const(3.0, 1.5, 2.0, &cfg).is_ok());
    }

    #[test]
    fn d_scales_with_inverse_square_root_of_mu() {
        let cfg = QuadratureConfig::default();
        let a = d_const(3.0, 1.5, 4.0, &cfg).unwrap();
        let b = d_const(12.0, 1.5, 4.0, &cfg).unwrap();
        assert!(rel(b, a / 2.0) < 1e-14);
    }

    #[test]
    fn d_decreases_with_q() {
        // r^{q-1} shrinks pointwise in q on (0, 1), and so does the Gamma ratio.
        let cfg = QuadratureConfig::default();
        let d: Vec<f64> = [3.0, 4.0, 5.0].iter().map(|&q| d_const(3.0, 1.5, q, &cfg).unwrap()).collect();
        assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    }

    #[test]
    fn f_const_edge_cases_and_monotonicity() {
        let cfg = QuadratureConfig::default();
        assert_eq!(F_const(3.0, 1.5, 1.0, &cfg).unwrap(), 0.0);
        assert!(F_const(3.0, 1.5, 0.0, &cfg).is_err());
        assert!(F_const(3.0, 1.5, 1.2, &cfg).is_err());
        let f: Vec<f64> = [0.25, 0.5, 0.75].iter().map(|&a| F_const(3.0, 1.5, a, &cfg).unwrap()).collect();
        assert!(f[0] > f[1] && f[1] > f[2], "{f:?}");
    }

    #[test]
    fn moment_asymptote_branches() {
        let cfg = QuadratureConfig::default();
        let law = GapLaw::pareto(1.5, 1.0).unwrap();
        let t = 1e4;
        let diffusive = moment_asymptote(3.0, 1.5, 1.0, t, &law, &cfg).unwrap();
        let m1 = gaussian_abs_moment(1.0).unwrap();
        assert!(rel(diffusive, m1 * 3f64.sqrt() * t.sqrt()) < 1e-14);

        let ballistic = moment_asymptote(3.0, 1.5, 4.0, t, &law, &cfg).unwrap();
        let d = d_const(3.0, 1.5, 4.0, &cfg).unwrap();
        assert!(rel(ballistic, d * t.powi(3)) < 1e-12);

        let corner = moment_asymptote(3.0, 1.5, 2.0, t, &law, &cfg).unwrap();
        let both = gaussian_abs_moment(2.0).unwrap() * 3.0 * t
            + d_const(3.0, 1.5, 2.0, &cfg).unwrap() * t.powf(2.5) * t.powf(-1.5);
        assert!(rel(corner, both) < 1e-12);

        assert!(moment_asymptote(3.0, 1.5, 4.0, t, &GapLaw::ShiftedExponential { rate: 1.0 }, &cfg).is_err());
        assert!(moment_asymptote(f64::INFINITY, 1.5, 4.0, t, &law, &cfg).is_err());
    }

    #[test]
    fn tables_render() {
        let cfg = QuadratureConfig::default();
        for table in ["mq", "f", "d", "F", "gamma"] {
            let csv = table_csv(table.parse().unwrap(), 3.0, &cfg).unwrap();
            assert!(csv.lines().count() > 5, "{table}");
        }
        assert!("zeta".parse::<Table>().is_err());
    }
}
