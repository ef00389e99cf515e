//! α-stable random variables and marginals of stable Lévy processes.
//!
//! Parametrization: a law `(α, β, σ, m)` has characteristic function
//!
//! ```text
//! E exp(iθX) = exp( -σ^α |θ|^α (1 - i β sgn(θ) tan(πα/2)) + i m θ )
//! ```
//!
//! which is the native parametrization of the Chambers–Mallows–Stuck
//! transform. With `α = 2` the skewness drops out and `X ~ N(m, 2σ²)`.
//! `α = 1` is not supported.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableLaw {
    pub stability_index: f64,
    pub skewness: f64,
    pub scale: f64,
    pub location: f64,
}

impl StableLaw {
    pub fn new(stability_index: f64, skewness: f64, scale: f64, location: f64) -> Result<Self> {
        let law = Self {
            stability_index,
            skewness,
            scale,
            location,
        };
        law.validate()?;
        Ok(law)
    }

    /// Strictly stable law with unit scale and no location shift.
    pub fn standard(stability_index: f64, skewness: f64) -> Result<Self> {
        Self::new(stability_index, skewness, 1.0, 0.0)
    }

    /// The normal law `N(mean, variance)` expressed in this parametrization.
    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::invalid(format!("gaussian variance must be > 0, got {variance}")));
        }
        Self::new(2.0, 0.0, (variance / 2.0).sqrt(), mean)
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.stability_index;
        if !(a > 0.0 && a <= 2.0) {
            return Err(Error::invalid(format!("stability index must lie in (0, 2], got {a}")));
        }
        if a == 1.0 {
            return Err(Error::invalid("stability index 1 is not supported"));
        }
        if !(-1.0..=1.0).contains(&self.skewness) {
            return Err(Error::invalid(format!(
                "skewness must lie in [-1, 1], got {}",
                self.skewness
            )));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::invalid(format!("scale must be positive, got {}", self.scale)));
        }
        if !self.location.is_finite() {
            return Err(Error::invalid("location must be finite"));
        }
        Ok(())
    }

    /// A positive, totally skewed law (α < 1, β = 1, no location).
    pub fn is_positive(&self) -> bool {
        self.stability_index < 1.0 && self.skewness == 1.0 && self.location == 0.0
    }

    /// Same law with the scale multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Self {
        Self {
            scale: self.scale * factor,
            location: self.location * factor,
            ..*self
        }
    }

    /// A reusable sampler with the CMS constants precomputed.
    pub fn sampler(&self) -> StableSampler {
        StableSampler::new(*self)
    }
}

/// Chambers–Mallows–Stuck sampler for a fixed law.
#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    law: StableLaw,
    alpha: f64,
    shift: f64,
    factor: f64,
}

impl StableSampler {
    fn new(law: StableLaw) -> Self {
        let alpha = law.stability_index;
        let zeta = law.skewness * (FRAC_PI_2 * alpha).tan();
        let shift = zeta.atan() / alpha;
        let factor = (1.0 + zeta * zeta).powf(0.5 / alpha);
        Self {
            law,
            alpha,
            shift,
            factor,
        }
    }

    pub fn law(&self) -> &StableLaw {
        &self.law
    }

    /// One draw of the standardized variable (unit scale, no location).
    #[inline]
    pub fn sample_standard<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = Open01.sample(rng);
        let v = std::f64::consts::PI * (u - 0.5);
        let w: f64 = Exp1.sample(rng);
        let a = self.alpha;
        let arg = a * (v + self.shift);
        self.factor * arg.sin() / v.cos().powf(1.0 / a)
            * ((v - arg).cos() / w).powf((1.0 - a) / a)
    }
}

impl Distribution<f64> for StableSampler {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.law.scale * self.sample_standard(rng) + self.law.location
    }
}

/// One draw from `law`.
pub fn sample_stable<R: Rng + ?Sized>(law: &StableLaw, rng: &mut R) -> Result<f64> {
    law.validate()?;
    Ok(law.sampler().sample(rng))
}

/// Value at time `t` of the Lévy process whose value at time 1 has law `law`.
///
/// `Z(t) ~ (α, β, σ t^{1/α}, m t)`.
pub fn levy_marginal<R: Rng + ?Sized>(law: &StableLaw, t: f64, rng: &mut R) -> Result<f64> {
    law.validate()?;
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let sampler = law.sampler();
    let scale = law.scale * t.powf(1.0 / law.stability_index);
    Ok(scale * sampler.sample_standard(rng) + law.location * t)
}

/// Two-sided process built from two i.i.d. one-sided copies:
/// `Z_+(s)` for `s ≥ 0` and `-Z_-(-s)` for `s < 0`.
pub fn two_sided_marginal<R: Rng + ?Sized>(law: &StableLaw, s: f64, rng: &mut R) -> Result<f64> {
    if s >= 0.0 {
        levy_marginal(law, s, rng)
    } else {
        Ok(-levy_marginal(law, -s, rng)?)
    }
}
