//! Samplers for the limit processes of the flight and the gas: the
//! composition `Z ∘ W` of two independent stable processes, and a discrete
//! random-walk-in-random-scenery approximation of the Kesten–Spitzer
//! time-changed limit.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::medium::{GapLaw, MediumWindow};
use crate::rng::{streams, MediumSeed};
use crate::stable::{levy_marginal, StableLaw};
use crate::{Error, Result};

/// Most doublings of a discretization before giving up.
pub const MAX_DOUBLINGS: u32 = 3;

/// `Z ∘ W`: the outer two-sided process `Z` evaluated along an independent
/// inner process `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositionSpec {
    pub outer: StableLaw,
    pub inner: StableLaw,
    /// Number of grid cells used to resolve `Z` on the range of `W`.
    pub m: usize,
}

impl CompositionSpec {
    pub const DEFAULT_M: usize = 100_000;

    pub fn new(outer: StableLaw, inner: StableLaw) -> Result<Self> {
        let spec = Self {
            outer,
            inner,
            m: Self::DEFAULT_M,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.outer.validate()?;
        self.inner.validate()?;
        if self.m < 1000 {
            return Err(Error::invalid(format!("discretization m = {} is below 1000", self.m)));
        }
        if self.outer.stability_index < 1.0 && self.outer.skewness != 1.0 {
            return Err(Error::invalid(
                "an outer process with index below 1 models an increasing medium and needs skewness 1",
            ));
        }
        Ok(())
    }
}

/// One joint draw of `(Z(W(t_1)), …, Z(W(t_k)))`.
///
/// `W` is sampled exactly at the requested times. `Z` is resolved on a grid of
/// `m` cells spanning `[min(0, w), max(0, w)]`: every `w_i` is snapped to its
/// nearest node and `Z` is sampled exactly at the occupied nodes through its
/// independent stable increments, separately on each side of the origin. The
/// same `Z` path serves every time. Two distinct `w_i` landing on one node is
/// a discretization failure.
pub fn compose_marginals<R: Rng + ?Sized>(spec: &CompositionSpec, times: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    spec.validate()?;
    if times.is_empty() {
        return Err(Error::invalid("times must be nonempty"));
    }
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("times must be nonnegative, finite and nondecreasing"));
    }

    let mut w = Vec::with_capacity(times.len());
    let (mut prev_t, mut prev_w) = (0.0, 0.0);
    for &t in times {
        prev_w += levy_marginal(&spec.inner, t - prev_t, rng)?;
        prev_t = t;
        w.push(prev_w);
    }

    let lo = w.iter().copied().fold(0.0, f64::min);
    let hi = w.iter().copied().fold(0.0, f64::max);
    if hi == lo {
        return Ok(vec![0.0; times.len()]);
    }
    let h = (hi - lo) / spec.m as f64;
    let origin = (-lo / h).round() as i64;
    let nodes: Vec<i64> = w.iter().map(|&x| ((x - lo) / h).round() as i64 - origin).collect();

    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by_key(|&i| nodes[i]);
    for pair in order.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if nodes[a] == nodes[b] && w[a] != w[b] {
            return Err(Error::Discretization(format!(
                "W values {} and {} share a cell of width {h}; increase m",
                w[a], w[b]
            )));
        }
    }
    for &i in &order {
        if nodes[i] == 0 && w[i] != 0.0 {
            return Err(Error::Discretization(format!(
                "W value {} is not resolved from the origin at cell width {h}; increase m",
                w[i]
            )));
        }
    }

    // Z at each node, walking outwards from the origin on both sides.
    let mut z = vec![0.0; w.len()];
    let positive: Vec<usize> = order.iter().copied().filter(|&i| nodes[i] > 0).collect();
    let negative: Vec<usize> = order.iter().rev().copied().filter(|&i| nodes[i] < 0).collect();
    for (side, sign) in [(positive, 1.0), (negative, -1.0)] {
        let (mut node, mut value) = (0i64, 0.0);
        for i in side {
            let gap = (nodes[i] - node).unsigned_abs();
            if gap > 0 {
                value += levy_marginal(&spec.outer, gap as f64 * h, rng)?;
                node = nodes[i];
            }
            z[i] = sign * value;
        }
    }
    Ok(z)
}

/// Discrete random walk in random scenery used to approximate the gas limit
/// when the mean gap is infinite.
///
/// A simple symmetric lattice walk runs over a medium with gaps from
/// `gap_law`; the clock `Δ = Σ_e L(e) ζ_e` charges every crossing of edge `e`
/// its gap, and the walker position is the target it stands on. With
/// `n = steps`, time is measured in units of `n^{(α+1)/(2α)}` and space in
/// units of `n^{1/(2α)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneryApproximation {
    pub gap_law: GapLaw,
    pub steps: usize,
    local_time: Vec<u64>,
    offset: i64,
}

impl SceneryApproximation {
    pub const DEFAULT_STEPS: usize = 1_000_000;

    pub fn new(gap_law: GapLaw, steps: usize) -> Result<Self> {
        gap_law.validate()?;
        let alpha = gap_law.stable_index();
        if !(alpha < 1.0) || gap_law.mean().is_finite() {
            return Err(Error::Hypothesis(format!(
                "the scenery approximation needs an infinite-mean gap law with index below 1, got {gap_law:?}"
            )));
        }
        if steps < 16 {
            return Err(Error::invalid(format!("lattice length {steps} is too short")));
        }
        Ok(Self {
            gap_law,
            steps,
            local_time: Vec::new(),
            offset: 0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.gap_law.stable_index()
    }

    /// Crossings of each edge in the last draw; the edge `(k-1, k)` is
    /// indexed by `k`.
    pub fn local_times(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.local_time
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0)
            .map(move |(i, &l)| (i as i64 - self.offset, l))
    }

    pub fn total_local_time(&self) -> u64 {
        self.local_time.iter().sum()
    }

    fn visit(&mut self, edge: i64) {
        let mut idx = edge + self.offset;
        if idx < 0 {
            let grow = (-idx) as usize + self.local_time.len().max(64);
            let mut v = vec![0; grow];
            v.extend_from_slice(&self.local_time);
            self.local_time = v;
            self.offset += grow as i64;
            idx = edge + self.offset;
        }
        let idx = idx as usize;
        if idx >= self.local_time.len() {
            let len = (idx + 1).max(2 * self.local_time.len()).max(64);
            self.local_time.resize(len, 0);
        }
        self.local_time[idx] += 1;
    }
}

/// One approximate draw of the limit marginal at time `t`.
///
/// The walk runs until the normalized clock first reaches `t` and returns the
/// normalized target at the walk's site at that step. The step budget starts at `steps` and
/// doubles at most [`MAX_DOUBLINGS`] times; a clock that still falls short is a
/// discretization failure.
pub fn ks_marginal<R: RngCore + ?Sized>(scenery: &mut SceneryApproximation, t: f64, rng: &mut R) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("time must be nonnegative and finite, got {t}")));
    }
    scenery.local_time.clear();
    scenery.offset = 0;
    if t == 0.0 {
        return Ok(0.0);
    }
    let alpha = scenery.alpha();
    let n = scenery.steps as f64;
    let time_unit = n.powf((alpha + 1.0) / (2.0 * alpha));
    let space_unit = n.powf(1.0 / (2.0 * alpha));
    let deadline = t * time_unit;
    let budget = (scenery.steps as u64) << MAX_DOUBLINGS;

    let seed = MediumSeed::new(rng.next_u64(), streams::LIMIT, 0);
    let mut medium = MediumWindow::new(scenery.gap_law, seed)?;
    let (mut site, mut clock, mut y) = (0i64, 0.0f64, 0.0f64);
    let mut bits = 0u64;
    let mut left = 0u32;
    for _ in 0..budget {
        if left == 0 {
            bits = rng.next_u64();
            left = 64;
        }
        let up = bits & 1 == 1;
        bits >>= 1;
        left -= 1;
        let (edge, next_site) = if up { (site + 1, site + 1) } else { (site, site - 1) };
        scenery.visit(edge);
        let next = medium.target(next_site);
        let arrival = clock + (next - y).abs();
        if !(arrival > clock) {
            return Err(Error::Discretization("clock failed to increase".into()));
        }
        site = next_site;
        if arrival >= deadline {
            // First lattice step whose clock reaches the deadline; the limit
            // process sits on targets, so report the target at that site.
            return Ok(next / space_unit);
        }
        clock = arrival;
        y = next;
    }
    Err(Error::Discretization(format!(
        "clock reached {} < t = {t} after {budget} lattice steps",
        clock / time_unit
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Lane};
    use crate::stable::two_sided_marginal;
    use crate::stats::{ks_two_sample, mean, variance};

    fn rng(seed: u64) -> crate::rng::SimRng {
        substream(seed, 77, 0, Lane::Aux)
    }

    fn spec(outer_alpha: f64, outer_skew: f64) -> CompositionSpec {
        CompositionSpec::new(
            StableLaw::standard(outer_alpha, outer_skew).unwrap(),
            StableLaw::gaussian(0.0, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn time_zero_is_zero() {
        let mut r = rng(1);
        assert_eq!(compose_marginals(&spec(0.5, 1.0), &[0.0], &mut r).unwrap(), vec![0.0]);
        assert_eq!(compose_marginals(&spec(0.5, 1.0), &[0.0, 0.0], &mut r).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_input() {
        let mut r = rng(1);
        assert!(compose_marginals(&spec(0.5, 1.0), &[], &mut r).is_err());
        assert!(compose_marginals(&spec(0.5, 1.0), &[2.0, 1.0], &mut r).is_err());
        let mut s = spec(0.5, 1.0);
        s.m = 10;
        assert!(compose_marginals(&s, &[1.0], &mut r).is_err());
        assert!(CompositionSpec::new(StableLaw::standard(0.5, 0.0).unwrap(), StableLaw::gaussian(0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn coincident_inner_values_are_a_discretization_failure() {
        // Inner location-only motion: W(t) = 1e-9 t is nearly flat after the
        // first time, so two distinct values share a cell.
        let inner = StableLaw::new(2.0, 0.0, 1e-300, 1e-9).unwrap();
        let s = CompositionSpec {
            outer: StableLaw::standard(0.5, 1.0).unwrap(),
            inner,
            m: 1000,
        };
        let err = compose_marginals(&s, &[1000.0, 1000.0001], &mut rng(2)).unwrap_err();
        assert!(matches!(err, Error::Discretization(_)));
    }

    #[test]
    fn single_time_matches_conditional_self_similarity() {
        let s = spec(0.5, 1.0);
        let mut r = rng(3);
        let draws: Vec<f64> = (0..20_000)
            .map(|_| compose_marginals(&s, &[1.0], &mut r).unwrap()[0])
            .collect();
        let mut r = rng(4);
        let gauss = StableLaw::gaussian(0.0, 1.0).unwrap().sampler();
        let outer = s.outer.sampler();
        let direct: Vec<f64> = (0..20_000)
            .map(|_| {
                use rand_distr::Distribution;
                let w: f64 = gauss.sample(&mut r);
                w.signum() * w.abs().powf(1.0 / 0.5) * outer.sample_standard(&mut r)
            })
            .collect();
        let ks = ks_two_sample(&draws, &direct).unwrap();
        assert!(ks.p_value > 0.01, "{ks:?}");
        let mut r = rng(5);
        let via_two_sided: Vec<f64> = (0..20_000)
            .map(|_| {
                use rand_distr::Distribution;
                let w: f64 = gauss.sample(&mut r);
                two_sided_marginal(&s.outer, w, &mut r).unwrap()
            })
            .collect();
        assert!(ks_two_sample(&draws, &via_two_sided).unwrap().p_value > 0.01);
    }

    #[test]
    fn positive_paths_are_positively_associated() {
        let s = spec(0.5, 1.0);
        let mut r = rng(6);
        let mut pairs = Vec::new();
        for _ in 0..20_000 {
            let z = compose_marginals(&s, &[1.0, 2.0], &mut r).unwrap();
            // Both outputs positive means W stayed on the side where Z increases.
            if z[0] > 0.0 && z[1] > 0.0 {
                pairs.push((z[0].ln(), z[1].ln()));
            }
        }
        assert!(pairs.len() > 2000);
        let n = pairs.len() as f64;
        let (mx, my) = pairs.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
        let cov: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / n;
        let vx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>() / n;
        let vy: f64 = pairs.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>() / n;
        let corr = cov / (vx * vy).sqrt();
        assert!(corr > 0.3, "correlation {corr}");
    }

    #[test]
    fn gaussian_composition_is_heavier_than_gaussian() {
        let s = CompositionSpec::new(StableLaw::gaussian(0.0, 1.0).unwrap(), StableLaw::gaussian(0.0, 1.0).unwrap()).unwrap();
        let mut r = rng(7);
        let draws: Vec<f64> = (0..1_000_000)
            .map(|_| compose_marginals(&s, &[1.0], &mut r).unwrap()[0])
            .collect();
        let m = mean(&draws).unwrap();
        let v = variance(&draws).unwrap();
        let k = draws.iter().map(|x| (x - m).powi(4)).sum::<f64>() / draws.len() as f64 / (v * v);
        assert!(k > 3.0, "kurtosis {k}");
    }

    fn scenery_draws(steps: usize, t: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut s = SceneryApproximation::new(GapLaw::pareto(0.5, 1.0).unwrap(), steps).unwrap();
        let mut r = rng(seed);
        (0..n).map(|_| ks_marginal(&mut s, t, &mut r).unwrap()).collect()
    }

    #[test]
    fn scenery_bookkeeping() {
        let mut s = SceneryApproximation::new(GapLaw::pareto(0.5, 1.0).unwrap(), 1000).unwrap();
        assert_eq!(ks_marginal(&mut s, 0.0, &mut rng(8)).unwrap(), 0.0);
        let x = ks_marginal(&mut s, 0.5, &mut rng(8)).unwrap();
        assert!(x.is_finite());
        let total = s.total_local_time();
        assert!(total > 0 && total <= 8000);
        assert_eq!(s.local_times().map(|(_, l)| l).sum::<u64>(), total);
        assert!(SceneryApproximation::new(GapLaw::pareto(1.5, 1.0).unwrap(), 1000).is_err());
    }

    #[test]
    fn scenery_is_stable_under_refinement() {
        let a = scenery_draws(10_000, 0.5, 10_000, 9);
        let b = scenery_draws(40_000, 0.5, 10_000, 10);
        let ks = ks_two_sample(&a, &b).unwrap();
        assert!(ks.p_value > 0.01, "{ks:?}");
    }

    #[test]
    fn scenery_scales_with_exponent_one_over_alpha_plus_one() {
        let a = scenery_draws(2000, 0.25, 10_000, 11);
        let b = scenery_draws(2000, 0.5, 10_000, 12);
        let factor = 2f64.powf(1.0 / 1.5);
        let a: Vec<f64> = a.iter().map(|x| x * factor).collect();
        let ks = ks_two_sample(&a, &b).unwrap();
        assert!(ks.p_value > 0.01, "{ks:?}");
    }
}
