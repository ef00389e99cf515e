//! The two-sided random medium `ω = (ω_k, k ∈ ℤ)` with `ω_0 = 0` and i.i.d.
//! positive gaps `ζ_k = ω_k - ω_{k-1}`.
//!
//! Gaps are materialized lazily on each side from independent random streams,
//! so the value of `ω_k` depends only on the medium seed and `k`, never on the
//! order in which targets were requested.

use std::borrow::Cow;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01};
use serde::{Deserialize, Serialize};

use crate::rng::{MediumSeed, SimRng};
use crate::{Error, Result};

/// Law of a single gap `ζ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapLaw {
    /// `P(ζ > x) = (x / x_min)^{-α}` for `x ≥ x_min`.
    Pareto { tail_index: f64, x_min: f64 },
    /// `ζ = 1 + E / rate` with `E` standard exponential.
    ShiftedExponential { rate: f64 },
    /// `ζ ≡ value`.
    Deterministic { value: f64 },
}

impl GapLaw {
    pub fn pareto(tail_index: f64, x_min: f64) -> Result<Self> {
        let law = GapLaw::Pareto { tail_index, x_min };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GapLaw::Pareto { tail_index, x_min } => {
                if !(tail_index > 0.0 && tail_index.is_finite()) {
                    return Err(Error::invalid(format!("Pareto tail index must be > 0, got {tail_index}")));
                }
                if !(x_min > 0.0 && x_min.is_finite()) {
                    return Err(Error::invalid(format!("Pareto x_min must be > 0, got {x_min}")));
                }
            }
            GapLaw::ShiftedExponential { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::invalid(format!("exponential rate must be > 0, got {rate}")));
                }
            }
            GapLaw::Deterministic { value } => {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(Error::invalid(format!("deterministic gap must be > 0, got {value}")));
                }
            }
        }
        Ok(())
    }

    /// `μ = E ζ`, infinite for Pareto tails with `α ≤ 1`.
    pub fn mean(&self) -> f64 {
        match *self {
            GapLaw::Pareto { tail_index, x_min } if tail_index > 1.0 => {
                tail_index * x_min / (tail_index - 1.0)
            }
            GapLaw::Pareto { .. } => f64::INFINITY,
            GapLaw::ShiftedExponential { rate } => 1.0 + 1.0 / rate,
            GapLaw::Deterministic { value } => value,
        }
    }

    /// Index `α` of the stable domain the gaps belong to (2 for finite variance).
    pub fn stable_index(&self) -> f64 {
        match *self {
            GapLaw::Pareto { tail_index, .. } => tail_index.min(2.0),
            _ => 2.0,
        }
    }

    /// Whether the law sits in the normal domain of attraction of its stable limit.
    pub fn in_normal_domain(&self) -> bool {
        !matches!(*self, GapLaw::Pareto { tail_index, .. } if tail_index == 2.0 || tail_index == 1.0)
    }

    /// Tail index `α` of a regularly varying tail; `None` for light tails.
    pub fn tail_index(&self) -> Option<f64> {
        match *self {
            GapLaw::Pareto { tail_index, .. } => Some(tail_index),
            _ => None,
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            GapLaw::Pareto { tail_index, x_min } => {
                let u: f64 = Open01.sample(rng);
                x_min * u.powf(-1.0 / tail_index)
            }
            GapLaw::ShiftedExponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                1.0 + e / rate
            }
            GapLaw::Deterministic { value } => value,
        }
    }
}

/// `τ_ζ(x) = P(ζ > x)`.
pub fn gap_tail(law: &GapLaw, x: f64) -> f64 {
    match *law {
        GapLaw::Pareto { tail_index, x_min } => {
            if x <= x_min {
                1.0
            } else {
                (x / x_min).powf(-tail_index)
            }
        }
        GapLaw::ShiftedExponential { rate } => {
            if x <= 1.0 {
                1.0
            } else {
                (-(x - 1.0) * rate).exp()
            }
        }
        GapLaw::Deterministic { value } => {
            if x < value {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Lazily extended window onto one realization of the medium.
///
/// `positive_gaps` holds `ζ_1, ζ_2, …`; `negative_gaps` holds `ζ_0, ζ_-1, …`,
/// so that `ω_{-m} = -(ζ_0 + … + ζ_{-m+1})`. Extension only appends.
#[derive(Debug, Clone)]
pub struct MediumWindow {
    law: GapLaw,
    token: u64,
    positive_gaps: Vec<f64>,
    negative_gaps: Vec<f64>,
    // positive_prefix[i] = ω_{i+1}; negative_prefix[i] = -ω_{-(i+1)}
    positive_prefix: Vec<f64>,
    negative_prefix: Vec<f64>,
    positive_rng: SimRng,
    negative_rng: SimRng,
}

const MIN_CHUNK: usize = 64;

impl MediumWindow {
    pub fn new(law: GapLaw, seed: MediumSeed) -> Result<Self> {
        law.validate()?;
        Ok(Self {
            law,
            token: seed.token(),
            positive_gaps: Vec::new(),
            negative_gaps: Vec::new(),
            positive_prefix: Vec::new(),
            negative_prefix: Vec::new(),
            positive_rng: seed.positive_rng(),
            negative_rng: seed.negative_rng(),
        })
    }

    /// A window whose first gaps are given explicitly; further gaps come from
    /// `law` and `seed`. `negative` lists `ζ_0, ζ_-1, …`.
    pub fn from_gaps(law: GapLaw, seed: MediumSeed, positive: &[f64], negative: &[f64]) -> Result<Self> {
        if positive.iter().chain(negative).any(|&z| !(z > 0.0 && z.is_finite())) {
            return Err(Error::invalid("gaps must be positive and finite"));
        }
        let mut w = Self::new(law, seed)?;
        for &z in positive {
            w.push_positive(z);
        }
        for &z in negative {
            w.push_negative(z);
        }
        Ok(w)
    }

    pub fn law(&self) -> &GapLaw {
        &self.law
    }

    /// Identity token of the realization (shared by clones).
    pub fn token(&self) -> u64 {
        self.token
    }

    /// Number of materialized gaps on each side `(positive, negative)`.
    pub fn extent(&self) -> (usize, usize) {
        (self.positive_gaps.len(), self.negative_gaps.len())
    }

    #[inline]
    fn push_positive(&mut self, z: f64) {
        let last = self.positive_prefix.last().copied().unwrap_or(0.0);
        self.positive_gaps.push(z);
        self.positive_prefix.push(last + z);
    }

    #[inline]
    fn push_negative(&mut self, z: f64) {
        let last = self.negative_prefix.last().copied().unwrap_or(0.0);
        self.negative_gaps.push(z);
        self.negative_prefix.push(last + z);
    }

    /// Materializes `ω_k` for every `k` in `[-negative, positive]`.
    pub fn ensure(&mut self, negative: usize, positive: usize) {
        while self.positive_gaps.len() < positive {
            let z = self.law.sample(&mut self.positive_rng);
            self.push_positive(z);
        }
        while self.negative_gaps.len() < negative {
            let z = self.law.sample(&mut self.negative_rng);
            self.push_negative(z);
        }
    }

    /// Extends both sides until `ω_K > reach` and `ω_{-K'} < -reach`, or until
    /// a side holds `max_sites` gaps.
    pub fn cover(&mut self, reach: f64, max_sites: usize) {
        while self.positive_prefix.last().map_or(true, |&w| w <= reach) && self.positive_gaps.len() < max_sites {
            let z = self.law.sample(&mut self.positive_rng);
            self.push_positive(z);
        }
        while self.negative_prefix.last().map_or(true, |&w| w <= reach) && self.negative_gaps.len() < max_sites {
            let z = self.law.sample(&mut self.negative_rng);
            self.push_negative(z);
        }
    }

    fn grow_to(&mut self, k: i64) {
        let need = k.unsigned_abs() as usize;
        if k > 0 {
            let target = need.max(2 * self.positive_gaps.len()).max(MIN_CHUNK);
            self.ensure(self.negative_gaps.len(), target);
        } else {
            let target = need.max(2 * self.negative_gaps.len()).max(MIN_CHUNK);
            self.ensure(target, self.positive_gaps.len());
        }
    }

    /// `ω_k` if it is already materialized.
    #[inline]
    pub fn get(&self, k: i64) -> Option<f64> {
        if k > 0 {
            self.positive_prefix.get(k as usize - 1).copied()
        } else if k < 0 {
            self.negative_prefix.get((-k) as usize - 1).map(|&s| -s)
        } else {
            Some(0.0)
        }
    }

    /// `ω_k`, extending the window (with doubling) when needed.
    #[inline]
    pub fn target(&mut self, k: i64) -> f64 {
        match self.get(k) {
            Some(w) => w,
            None => {
                self.grow_to(k);
                self.get(k).expect("window extended to k")
            }
        }
    }

    /// `ζ_k`, extending the window when needed.
    pub fn gap(&mut self, k: i64) -> f64 {
        if k >= 1 {
            self.target(k);
            self.positive_gaps[k as usize - 1]
        } else {
            self.target(k - 1);
            self.negative_gaps[(-k) as usize]
        }
    }

    /// Writes `(k, ω_k)` for every materialized target.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(out, "k,omega").map_err(io)?;
        let neg = self.negative_prefix.len() as i64;
        let pos = self.positive_prefix.len() as i64;
        for k in -neg..=pos {
            let w = self.get(k).expect("materialized");
            writeln!(out, "{k},{w}").map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

/// Read-mostly view of a shared, pre-extended window. Requests inside the
/// shared window are free; a request outside it clones the window once and
/// extends the private copy, which yields the same targets the shared window
/// would have produced.
#[derive(Debug, Clone)]
pub struct SharedMedium<'a>(Cow<'a, MediumWindow>);

impl<'a> SharedMedium<'a> {
    pub fn borrowed(window: &'a MediumWindow) -> Self {
        Self(Cow::Borrowed(window))
    }

    pub fn owned(window: MediumWindow) -> SharedMedium<'static> {
        SharedMedium(Cow::Owned(window))
    }

    #[inline]
    pub fn target(&mut self, k: i64) -> f64 {
        match self.0.get(k) {
            Some(w) => w,
            None => self.0.to_mut().target(k),
        }
    }

    pub fn token(&self) -> u64 {
        self.0.token()
    }

    pub fn window(&self) -> &MediumWindow {
        &self.0
    }

    /// Whether this view had to leave the shared window.
    pub fn is_private(&self) -> bool {
        matches!(self.0, Cow::Owned(_))
    }
}

/// How [`rescaled_medium`] normalizes `ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rescaling {
    /// `ω_{⌊ns⌋} / n` (law of large numbers scale).
    Fluid,
    /// `ω_{⌊ns⌋} / n^{1/α}` (infinite-mean media).
    Raw { alpha: f64 },
    /// `(ω_{⌊ns⌋} - μ ⌊ns⌋) / n^{1/α}` (finite-mean media).
    Centered { alpha: f64 },
}

/// The rescaled medium process at `s`; the index is `⌊ns⌋` for `s ≥ 0` and
/// `⌈ns⌉` for `s < 0`.
pub fn rescaled_medium(window: &mut MediumWindow, n: u64, s: f64, mode: Rescaling) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let nf = n as f64;
    let scaled = nf * s;
    let k = if s >= 0.0 { scaled.floor() } else { scaled.ceil() } as i64;
    match mode {
        Rescaling::Fluid => Ok(window.target(k) / nf),
        Rescaling::Raw { alpha } => {
            if !(alpha > 0.0) {
                return Err(Error::invalid("alpha must be positive"));
            }
            Ok(window.target(k) / nf.powf(1.0 / alpha))
        }
        Rescaling::Centered { alpha } => {
            if !(alpha > 0.0) {
                return Err(Error::invalid("alpha must be positive"));
            }
            let mu = window.law().mean();
            if !mu.is_finite() {
                return Err(Error::invalid("centered rescaling requires a finite mean gap"));
            }
            Ok((window.target(k) - mu * k as f64) / nf.powf(1.0 / alpha))
        }
    }
}
