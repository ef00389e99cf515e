//! The underlying walk `S`, the flight `Y_n = ω_{S_n}` and the unit-speed gas
//! `X(t)` that interpolates `Y`.

use std::io::Write;
use std::path::Path;

use rand::{Rng, RngCore};
use std::sync::Arc;

use rand_distr::{Distribution, Open01};
use serde::{Deserialize, Serialize};

use crate::medium::{MediumWindow, SharedMedium};
use crate::special::{hurwitz_zeta, riemann_zeta};
use crate::{Error, Result};

/// Law of the i.i.d. integer increments `ξ_n = S_n - S_{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IncrementLaw {
    /// `±1` with probability 1/2 each.
    SimpleSymmetric,
    /// `0` with probability `p_zero`, `±1` with probability `(1 - p_zero)/2` each.
    LazySymmetric { p_zero: f64 },
    /// `P(ξ = ±j) = j^{-β-1} / (2 ζ(β+1))` for `j ≥ 1`.
    SymmetricZeta { tail_index: f64 },
    /// `ξ = ε J` with `P(J = j) = j^{-β-1} / ζ(β+1)` and an independent sign
    /// `ε = +1` with probability `p`, chosen so that `E ξ = drift`.
    DriftedZeta { tail_index: f64, drift: f64 },
}

impl IncrementLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            IncrementLaw::SimpleSymmetric => Ok(()),
            IncrementLaw::LazySymmetric { p_zero } => {
                if (0.0..1.0).contains(&p_zero) {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("p_zero must lie in [0, 1), got {p_zero}")))
                }
            }
            IncrementLaw::SymmetricZeta { tail_index } => check_zeta_index(tail_index),
            IncrementLaw::DriftedZeta { tail_index, drift } => {
                check_zeta_index(tail_index)?;
                if tail_index <= 1.0 {
                    return Err(Error::invalid("a drifted zeta law needs tail index > 1"));
                }
                let mean_jump = zeta_mean_jump(tail_index);
                if !(drift.abs() < mean_jump) {
                    return Err(Error::invalid(format!(
                        "drift {drift} out of reach: |drift| must be below E J = {mean_jump:.6}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// `ν = E ξ`; `None` when the mean does not exist.
    pub fn drift(&self) -> Option<f64> {
        match *self {
            IncrementLaw::SimpleSymmetric | IncrementLaw::LazySymmetric { .. } => Some(0.0),
            IncrementLaw::SymmetricZeta { tail_index } => (tail_index > 1.0).then_some(0.0),
            IncrementLaw::DriftedZeta { drift, .. } => Some(drift),
        }
    }

    /// `V_ξ = E ξ²` (infinite when it diverges).
    pub fn second_moment(&self) -> f64 {
        match *self {
            IncrementLaw::SimpleSymmetric => 1.0,
            IncrementLaw::LazySymmetric { p_zero } => 1.0 - p_zero,
            IncrementLaw::SymmetricZeta { tail_index } | IncrementLaw::DriftedZeta { tail_index, .. } => {
                if tail_index > 2.0 {
                    riemann_zeta(tail_index - 1.0) / riemann_zeta(tail_index + 1.0)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `M_ξ = E |ξ|` (infinite when it diverges).
    pub fn first_abs_moment(&self) -> f64 {
        match *self {
            IncrementLaw::SimpleSymmetric => 1.0,
            IncrementLaw::LazySymmetric { p_zero } => 1.0 - p_zero,
            IncrementLaw::SymmetricZeta { tail_index } | IncrementLaw::DriftedZeta { tail_index, .. } => {
                if tail_index > 1.0 {
                    zeta_mean_jump(tail_index)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `q̄ = sup{q ≥ 0 : E|ξ|^q < ∞}`.
    pub fn moment_ceiling(&self) -> f64 {
        match *self {
            IncrementLaw::SimpleSymmetric | IncrementLaw::LazySymmetric { .. } => f64::INFINITY,
            IncrementLaw::SymmetricZeta { tail_index } | IncrementLaw::DriftedZeta { tail_index, .. } => tail_index,
        }
    }

    /// Index `β` of the stable domain of attraction (2 for finite variance).
    pub fn stable_index(&self) -> f64 {
        match *self {
            IncrementLaw::SimpleSymmetric | IncrementLaw::LazySymmetric { .. } => 2.0,
            IncrementLaw::SymmetricZeta { tail_index } | IncrementLaw::DriftedZeta { tail_index, .. } => {
                tail_index.min(2.0)
            }
        }
    }

    /// Skewness of the stable limit of the centred partial sums.
    pub fn limit_skewness(&self) -> f64 {
        match *self {
            IncrementLaw::DriftedZeta { tail_index, drift } if tail_index < 2.0 => {
                2.0 * positive_sign_probability(tail_index, drift) - 1.0
            }
            _ => 0.0,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        !matches!(self, IncrementLaw::DriftedZeta { drift, .. } if *drift != 0.0)
    }

    /// `j ↦ P(ξ = j)` non-increasing for `j ≥ 1` (with symmetry). The simple
    /// symmetric walk qualifies under this reading.
    pub fn is_unimodal(&self) -> bool {
        self.is_symmetric()
    }

    pub fn is_simple_symmetric(&self) -> bool {
        matches!(self, IncrementLaw::SimpleSymmetric)
    }

    pub fn sampler(&self) -> Result<IncrementSampler> {
        IncrementSampler::new(*self)
    }
}

fn check_zeta_index(tail_index: f64) -> Result<()> {
    if !(tail_index > 0.0 && tail_index.is_finite()) {
        return Err(Error::invalid(format!("zeta tail index must be > 0, got {tail_index}")));
    }
    if tail_index == 1.0 || tail_index == 2.0 {
        return Err(Error::invalid(format!(
            "zeta tail index {tail_index} is outside every normal domain of attraction"
        )));
    }
    Ok(())
}

/// `E J = ζ(β) / ζ(β+1)` for the one-sided zeta jump.
fn zeta_mean_jump(tail_index: f64) -> f64 {
    riemann_zeta(tail_index) / riemann_zeta(tail_index + 1.0)
}

fn positive_sign_probability(tail_index: f64, drift: f64) -> f64 {
    0.5 * (1.0 + drift / zeta_mean_jump(tail_index))
}

/// Streaming source of increments. Every step consumes the generator in a
/// fixed pattern, so the first `n` increments of a stream never depend on how
/// many are drawn afterwards.
#[derive(Debug, Clone)]
pub struct IncrementSampler {
    law: IncrementLaw,
    kind: SamplerKind,
    bits: u64,
    bits_left: u32,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Simple,
    Lazy { p_zero: f64 },
    Zeta { jump: Arc<ZetaTable>, p_plus: f64 },
}

impl IncrementSampler {
    pub fn new(law: IncrementLaw) -> Result<Self> {
        law.validate()?;
        let kind = match law {
            IncrementLaw::SimpleSymmetric => SamplerKind::Simple,
            IncrementLaw::LazySymmetric { p_zero } => SamplerKind::Lazy { p_zero },
            IncrementLaw::SymmetricZeta { tail_index } => SamplerKind::Zeta {
                jump: zeta_jump(tail_index)?,
                p_plus: 0.5,
            },
            IncrementLaw::DriftedZeta { tail_index, drift } => SamplerKind::Zeta {
                jump: zeta_jump(tail_index)?,
                p_plus: positive_sign_probability(tail_index, drift),
            },
        };
        Ok(Self {
            law,
            kind,
            bits: 0,
            bits_left: 0,
        })
    }

    pub fn law(&self) -> &IncrementLaw {
        &self.law
    }

    #[inline]
    fn next_bit<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> bool {
        if self.bits_left == 0 {
            self.bits = rng.next_u64();
            self.bits_left = 64;
        }
        let bit = self.bits & 1 == 1;
        self.bits >>= 1;
        self.bits_left -= 1;
        bit
    }

    #[inline]
    pub fn next<R: Rng + ?Sized>(&mut self, rng: &mut R) -> i64 {
        match &self.kind {
            SamplerKind::Simple => {
                if self.next_bit(rng) {
                    1
                } else {
                    -1
                }
            }
            &SamplerKind::Lazy { p_zero } => {
                let u: f64 = rng.random();
                if u < p_zero {
                    0
                } else if u < p_zero + 0.5 * (1.0 - p_zero) {
                    1
                } else {
                    -1
                }
            }
            SamplerKind::Zeta { jump, p_plus } => {
                let j = jump.sample(rng);
                let up = rng.random::<f64>() < *p_plus;
                if up {
                    j
                } else {
                    -j
                }
            }
        }
    }

    /// Sum of the next `n` increments; identical to calling [`next`](Self::next)
    /// `n` times, but word-at-a-time for the simple symmetric walk.
    pub fn sum_next<R: Rng + ?Sized>(&mut self, rng: &mut R, n: u64) -> i64 {
        if !matches!(self.kind, SamplerKind::Simple) {
            return (0..n).map(|_| self.next(rng)).fold(0i64, i64::saturating_add);
        }
        let mut remaining = n;
        let mut up: u64 = 0;
        let take = |bits: u64, k: u32| -> u64 {
            if k == 64 {
                bits.count_ones() as u64
            } else {
                (bits & ((1u64 << k) - 1)).count_ones() as u64
            }
        };
        while remaining > 0 {
            if self.bits_left == 0 {
                self.bits = rng.next_u64();
                self.bits_left = 64;
            }
            let k = (self.bits_left as u64).min(remaining) as u32;
            up += take(self.bits, k);
            self.bits = if k == 64 { 0 } else { self.bits >> k };
            self.bits_left -= k;
            remaining -= k as u64;
        }
        2 * up as i64 - n as i64
    }
}

fn zeta_jump(tail_index: f64) -> Result<Arc<ZetaTable>> {
    Ok(Arc::new(ZetaTable::new(tail_index + 1.0)))
}

/// Exact sampler for `P(J = j) = j^{-s} / ζ(s)`, `j ≥ 1`: inversion on a
/// cumulative table for `j ≤ K`, and for the tail a rounded continuous
/// Pareto proposal accepted with probability `j^{-s} / ∫_{j-1/2}^{j+1/2} y^{-s} dy`,
/// which is at most 1 by convexity and very close to it.
#[derive(Debug)]
struct ZetaTable {
    exponent: f64,
    cdf: Vec<f64>,
}

const ZETA_TABLE: usize = 4096;

impl ZetaTable {
    fn new(exponent: f64) -> Self {
        let total = riemann_zeta(exponent);
        let mut acc = 0.0;
        let cdf = (1..=ZETA_TABLE)
            .map(|j| {
                acc += (j as f64).powf(-exponent);
                acc / total
            })
            .collect::<Vec<_>>();
        // Renormalize against the independently summed tail so the table
        // and the tail branch partition [0, 1) consistently.
        let tail = hurwitz_zeta(exponent, ZETA_TABLE as f64 + 1.0) / total;
        let scale = (1.0 - tail) / cdf[ZETA_TABLE - 1];
        Self {
            exponent,
            cdf: cdf.into_iter().map(|c| c * scale).collect(),
        }
    }

    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.random();
        if u < self.cdf[0] {
            return 1;
        }
        if u < self.cdf[ZETA_TABLE - 1] {
            return self.cdf.partition_point(|&c| c <= u) as i64 + 1;
        }
        let s = self.exponent;
        let start = ZETA_TABLE as f64 + 0.5;
        loop {
            let v: f64 = Open01.sample(rng);
            let y = start * v.powf(-1.0 / (s - 1.0));
            // Jumps beyond 2^62 sites would leave every window anyway.
            if !(y < 4.6e18) {
                return i64::MAX / 2;
            }
            let j = (y + 0.5).floor();
            if j > 1e6 {
                return j as i64;
            }
            let cell = ((j - 0.5).powf(1.0 - s) - (j + 0.5).powf(1.0 - s)) / (s - 1.0);
            let accept = j.powf(-s) / cell;
            if rng.random::<f64>() < accept {
                return j as i64;
            }
        }
    }
}

/// `S_0 = 0, S_1, …, S_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPath {
    pub steps: Vec<i64>,
}

impl WalkPath {
    pub fn from_sites(steps: Vec<i64>) -> Result<Self> {
        if steps.first() != Some(&0) {
            return Err(Error::invalid("a walk path starts at S_0 = 0"));
        }
        Ok(Self { steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> i64 {
        *self.steps.last().expect("S_0 is always present")
    }
}

/// Draws `S_0, …, S_{n_steps}`.
pub fn sample_walk<R: Rng + ?Sized>(law: &IncrementLaw, n_steps: usize, rng: &mut R) -> Result<WalkPath> {
    if n_steps == 0 {
        return Err(Error::invalid("n_steps must be at least 1"));
    }
    let mut sampler = law.sampler()?;
    Ok(extend_walk(&mut sampler, n_steps, rng))
}

fn extend_walk<R: Rng + ?Sized>(sampler: &mut IncrementSampler, n_steps: usize, rng: &mut R) -> WalkPath {
    let mut steps = Vec::with_capacity(n_steps + 1);
    let mut s = 0i64;
    steps.push(s);
    for _ in 0..n_steps {
        s = s.saturating_add(sampler.next(rng));
        steps.push(s);
    }
    WalkPath { steps }
}

/// `Y_n = ω_{S_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlightPath {
    pub positions: Vec<f64>,
}

pub fn flight(window: &mut MediumWindow, path: &WalkPath) -> FlightPath {
    FlightPath {
        positions: path.steps.iter().map(|&k| window.target(k)).collect(),
    }
}

/// Collision times `T_n` and positions `Y_n` of the unit-speed gas.
#[derive(Debug, Clone, PartialEq)]
pub struct GasTrajectory {
    pub collision_times: Vec<f64>,
    pub positions: Vec<f64>,
}

/// `T_0 = 0`, `T_{n+1} = T_n + |Y_{n+1} - Y_n|`.
pub fn interpolate(flight: &FlightPath) -> GasTrajectory {
    let positions = flight.positions.clone();
    let mut collision_times = Vec::with_capacity(positions.len());
    let mut t = 0.0;
    collision_times.push(t);
    for w in positions.windows(2) {
        t += (w[1] - w[0]).abs();
        collision_times.push(t);
    }
    GasTrajectory {
        collision_times,
        positions,
    }
}

impl GasTrajectory {
    /// Last collision time (the horizon up to which `X` is known).
    pub fn horizon(&self) -> f64 {
        *self.collision_times.last().unwrap_or(&0.0)
    }

    /// Writes `(n, S_n, Y_n, T_n)` rows.
    pub fn write_csv(&self, path: &WalkPath, file: &Path) -> Result<()> {
        let f = std::fs::File::create(file).map_err(|e| Error::io(file, e))?;
        let mut out = std::io::BufWriter::new(f);
        let io = |e| Error::io(file, e);
        writeln!(out, "n,S_n,Y_n,T_n").map_err(io)?;
        for (n, ((s, y), t)) in path
            .steps
            .iter()
            .zip(&self.positions)
            .zip(&self.collision_times)
            .enumerate()
        {
            writeln!(out, "{n},{s},{y},{t}").map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

/// `X(t)`: on the segment `T_n ≤ t ≤ T_{n+1}` the gas sits at
/// `Y_n + sgn(Y_{n+1} - Y_n) (t - T_n)`; at a collision time it is exactly at
/// the target.
pub fn position_at(traj: &GasTrajectory, t: f64) -> Result<f64> {
    let times = &traj.collision_times;
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("time must be nonnegative, got {t}")));
    }
    let horizon = traj.horizon();
    if t > horizon {
        return Err(Error::Horizon {
            requested: t,
            horizon,
            steps: times.len().saturating_sub(1) as u64,
        });
    }
    let idx = times.partition_point(|&tn| tn < t);
    if idx == 0 {
        return Ok(traj.positions[0]);
    }
    if times[idx] == t {
        return Ok(traj.positions[idx]);
    }
    Ok(segment_position(
        traj.positions[idx - 1],
        traj.positions[idx],
        times[idx - 1],
        t,
    ))
}

#[inline]
fn segment_position(from: f64, to: f64, start: f64, t: f64) -> f64 {
    let dt = t - start;
    if to > from {
        from + dt
    } else if to < from {
        from - dt
    } else {
        from
    }
}

/// Initial number of steps for observing the gas up to time `t`:
/// `⌈c t⌉` with `c = 2/μ` for a finite mean gap `μ`, `c = 2` otherwise.
pub fn initial_steps(t: f64, mean_gap: f64) -> usize {
    let c = if mean_gap.is_finite() { 2.0 / mean_gap } else { 2.0 };
    ((c * t).ceil() as usize).max(1)
}

/// Most doublings the horizon schedule attempts before giving up.
pub const MAX_DOUBLINGS: u32 = 24;

/// Simulates walk, flight and trajectory until `T_N ≥ t`, starting from
/// [`initial_steps`] and doubling. The walk continues the same stream, so a
/// longer attempt extends the shorter one.
pub fn trajectory_until<R: Rng + ?Sized>(
    window: &mut MediumWindow,
    law: &IncrementLaw,
    t: f64,
    rng: &mut R,
) -> Result<(WalkPath, GasTrajectory)> {
    let mut sampler = law.sampler()?;
    let mut n = initial_steps(t, window.law().mean());
    let mut path = extend_walk(&mut sampler, n, rng);
    for _ in 0..=MAX_DOUBLINGS {
        let traj = interpolate(&flight(window, &path));
        if traj.horizon() >= t {
            return Ok((path, traj));
        }
        let more = extend_walk(&mut sampler, n, rng);
        let last = path.last();
        path.steps
            .extend(more.steps[1..].iter().map(|&s| last.saturating_add(s)));
        n *= 2;
    }
    let traj = interpolate(&flight(window, &path));
    Err(Error::Horizon {
        requested: t,
        horizon: traj.horizon(),
        steps: n as u64,
    })
}

/// Something that can hand out targets `ω_k`.
pub trait Targets {
    fn target(&mut self, k: i64) -> f64;
}

impl Targets for MediumWindow {
    #[inline]
    fn target(&mut self, k: i64) -> f64 {
        MediumWindow::target(self, k)
    }
}

impl Targets for SharedMedium<'_> {
    #[inline]
    fn target(&mut self, k: i64) -> f64 {
        SharedMedium::target(self, k)
    }
}

/// `Y_n` without storing the path.
pub fn flight_endpoint<M: Targets, R: Rng + ?Sized>(
    medium: &mut M,
    sampler: &mut IncrementSampler,
    n: u64,
    rng: &mut R,
) -> f64 {
    let s = sampler.sum_next(rng, n);
    medium.target(s)
}

/// `X(t)` without storing the trajectory. Steps are drawn until the first
/// collision time `T_i ≥ t`; this is the same value [`position_at`] returns on
/// a trajectory from [`trajectory_until`] driven by the same stream.
pub fn gas_position<M: Targets, R: Rng + ?Sized>(
    medium: &mut M,
    sampler: &mut IncrementSampler,
    t: f64,
    mean_gap: f64,
    rng: &mut R,
) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("time must be nonnegative, got {t}")));
    }
    let budget = (initial_steps(t, mean_gap) as u64).saturating_mul(1 << MAX_DOUBLINGS);
    let mut site = 0i64;
    let mut y = 0.0;
    let mut clock = 0.0;
    if t == 0.0 {
        return Ok(0.0);
    }
    for _ in 0..budget {
        site = site.saturating_add(sampler.next(rng));
        let next = medium.target(site);
        let arrival = clock + (next - y).abs();
        if arrival >= t {
            if arrival == t {
                return Ok(next);
            }
            return Ok(segment_position(y, next, clock, t));
        }
        y = next;
        clock = arrival;
    }
    Err(Error::Horizon {
        requested: t,
        horizon: clock,
        steps: budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::GapLaw;
    use crate::rng::{substream, Lane, MediumSeed};

    fn rng(r: u64) -> crate::rng::SimRng {
        substream(99, 1, r, Lane::Walk)
    }

    fn example_window() -> MediumWindow {
        MediumWindow::from_gaps(
            GapLaw::Deterministic { value: 1.0 },
            MediumSeed::new(0, 0, 0),
            &[2.0, 3.0],
            &[1.5, 1.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn simple_symmetric_steps_are_unit() {
        let p = sample_walk(&IncrementLaw::SimpleSymmetric, 10_000, &mut rng(0)).unwrap();
        assert_eq!(p.len(), 10_001);
        assert_eq!(p.steps[0], 0);
        assert!(p.steps.windows(2).all(|w| (w[1] - w[0]).abs() == 1));
        assert!(sample_walk(&IncrementLaw::SimpleSymmetric, 0, &mut rng(0)).is_err());
    }

    #[test]
    fn simple_symmetric_is_centred() {
        let mut sampler = IncrementLaw::SimpleSymmetric.sampler().unwrap();
        let mut r = rng(1);
        let reps = 10_000;
        let mean = (0..reps)
            .map(|_| sampler.sum_next(&mut r, 10_000) as f64 / 100.0)
            .sum::<f64>()
            / reps as f64;
        assert!(mean.abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn word_sums_match_stepwise_draws() {
        for &n in &[1u64, 5, 63, 64, 65, 200, 1000] {
            let mut a = IncrementLaw::SimpleSymmetric.sampler().unwrap();
            let mut b = a.clone();
            let mut ra = rng(2);
            let mut rb = rng(2);
            // leave a partial word behind first
            a.next(&mut ra);
            b.next(&mut rb);
            let fast = a.sum_next(&mut ra, n);
            let slow: i64 = (0..n).map(|_| b.next(&mut rb)).sum();
            assert_eq!(fast, slow, "n = {n}");
            assert_eq!(a.next(&mut ra), b.next(&mut rb));
        }
    }

    #[test]
    fn zeta_jumps_follow_the_exact_law() {
        // s = 1.5 puts about 1% of the mass beyond the table.
        let table = ZetaTable::new(1.5);
        let mut r = rng(21);
        let n = 1_000_000;
        let draws: Vec<i64> = (0..n).map(|_| table.sample(&mut r)).collect();
        let z = riemann_zeta(1.5);
        let freq = |pred: &dyn Fn(i64) -> bool| draws.iter().filter(|&&j| pred(j)).count() as f64 / n as f64;
        let check = |observed: f64, p: f64| {
            let sd = (p * (1.0 - p) / n as f64).sqrt();
            assert!((observed - p).abs() < 5.0 * sd, "{observed} vs {p}");
        };
        for j in 1..=3i64 {
            check(freq(&|x| x == j), (j as f64).powf(-1.5) / z);
        }
        check(freq(&|x| x > 4096), hurwitz_zeta(1.5, 4097.0) / z);
        check(freq(&|x| x > 20_000), hurwitz_zeta(1.5, 20_001.0) / z);
        check(freq(&|x| x > 1_000_000), hurwitz_zeta(1.5, 1_000_001.0) / z);
        assert!(draws.iter().all(|&j| j >= 1));
    }

    #[test]
    fn drifted_zeta_law_of_large_numbers() {
        let law = IncrementLaw::DriftedZeta {
            tail_index: 1.5,
            drift: 0.4,
        };
        let mut sampler = law.sampler().unwrap();
        let mut r = rng(3);
        let n = 100_000u64;
        let mean = (0..100)
            .map(|_| sampler.sum_next(&mut r, n) as f64 / n as f64)
            .sum::<f64>()
            / 100.0;
        assert!((mean - 0.4).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn law_moments() {
        let s = IncrementLaw::SimpleSymmetric;
        assert_eq!((s.drift(), s.second_moment(), s.first_abs_moment()), (Some(0.0), 1.0, 1.0));
        assert!(s.moment_ceiling().is_infinite());
        assert!(s.is_unimodal());
        let lazy = IncrementLaw::LazySymmetric { p_zero: 0.5 };
        assert_eq!(lazy.second_moment(), 0.5);
        assert!(lazy.is_unimodal());
        assert!(!IncrementLaw::DriftedZeta { tail_index: 1.5, drift: 0.4 }.is_unimodal());
        let z = IncrementLaw::SymmetricZeta { tail_index: 1.5 };
        assert!(z.second_moment().is_infinite());
        assert_eq!(z.moment_ceiling(), 1.5);
        assert_eq!(z.stable_index(), 1.5);
        let heavy = IncrementLaw::SymmetricZeta { tail_index: 0.5 };
        assert_eq!(heavy.drift(), None);
        let light = IncrementLaw::DriftedZeta { tail_index: 3.0, drift: 0.4 };
        assert_eq!(light.stable_index(), 2.0);
        assert!(light.second_moment().is_finite());
        assert_eq!(light.limit_skewness(), 0.0);
        let drifted = IncrementLaw::DriftedZeta { tail_index: 1.5, drift: 0.4 };
        assert!(drifted.limit_skewness() > 0.0);
    }

    #[test]
    fn invalid_increment_laws() {
        assert!(IncrementLaw::LazySymmetric { p_zero: 1.0 }.validate().is_err());
        assert!(IncrementLaw::SymmetricZeta { tail_index: 2.0 }.validate().is_err());
        assert!(IncrementLaw::SymmetricZeta { tail_index: 1.0 }.validate().is_err());
        assert!(IncrementLaw::DriftedZeta { tail_index: 0.5, drift: 0.1 }.validate().is_err());
        assert!(IncrementLaw::DriftedZeta { tail_index: 1.5, drift: 50.0 }.validate().is_err());
    }

    #[test]
    fn flight_on_explicit_medium() {
        let mut w = example_window();
        let path = WalkPath::from_sites(vec![0, 2, -3]).unwrap();
        let y = flight(&mut w, &path);
        assert_eq!(y.positions, vec![0.0, 5.0, -3.5]);
        let still = WalkPath::from_sites(vec![0, 0, 0]).unwrap();
        assert_eq!(flight(&mut w, &still).positions, vec![0.0; 3]);
        assert!(WalkPath::from_sites(vec![1, 2]).is_err());
    }

    #[test]
    fn deterministic_gaps_scale_the_walk() {
        let mut w = MediumWindow::new(GapLaw::Deterministic { value: 2.5 }, MediumSeed::new(0, 0, 0)).unwrap();
        let path = sample_walk(&IncrementLaw::SymmetricZeta { tail_index: 1.5 }, 500, &mut rng(4)).unwrap();
        let y = flight(&mut w, &path);
        for (s, y) in path.steps.iter().zip(&y.positions) {
            assert_eq!(*y, 2.5 * *s as f64);
        }
    }

    #[test]
    fn interpolation_and_positions() {
        let traj = interpolate(&FlightPath {
            positions: vec![0.0, 5.0, -3.5],
        });
        assert_eq!(traj.collision_times, vec![0.0, 5.0, 13.5]);
        assert_eq!(position_at(&traj, 3.0).unwrap(), 3.0);
        assert_eq!(position_at(&traj, 7.0).unwrap(), 3.0);
        assert_eq!(position_at(&traj, 0.0).unwrap(), 0.0);
        assert_eq!(position_at(&traj, 13.5).unwrap(), -3.5);
        assert!(matches!(position_at(&traj, 14.0), Err(Error::Horizon { .. })));
        assert!(position_at(&traj, -1.0).is_err());

        let flat = interpolate(&FlightPath {
            positions: vec![0.0, 0.0, 0.0],
        });
        assert_eq!(flat.collision_times, vec![0.0; 3]);
    }

    #[test]
    fn unit_gaps_give_unit_collision_times() {
        let mut w = MediumWindow::new(GapLaw::Deterministic { value: 1.0 }, MediumSeed::new(0, 0, 0)).unwrap();
        let path = sample_walk(&IncrementLaw::SimpleSymmetric, 1000, &mut rng(5)).unwrap();
        let traj = interpolate(&flight(&mut w, &path));
        for (n, t) in traj.collision_times.iter().enumerate() {
            assert_eq!(*t, n as f64);
        }
    }

    #[test]
    fn zero_length_segments_are_instantaneous() {
        let traj = interpolate(&FlightPath {
            positions: vec![0.0, 2.0, 2.0, 2.0, 1.0],
        });
        assert_eq!(traj.collision_times, vec![0.0, 2.0, 2.0, 2.0, 3.0]);
        assert_eq!(position_at(&traj, 2.0).unwrap(), 2.0);
        assert_eq!(position_at(&traj, 2.5).unwrap(), 1.5);
    }

    #[test]
    fn streaming_gas_matches_stored_trajectory() {
        let law = IncrementLaw::SimpleSymmetric;
        let gaps = GapLaw::pareto(1.5, 1.0).unwrap();
        for r in 0..50 {
            let seed = MediumSeed::new(5, 5, r);
            let t = 200.0 + 37.0 * r as f64;
            let mut w1 = MediumWindow::new(gaps, seed).unwrap();
            let (_, traj) = trajectory_until(&mut w1, &law, t, &mut rng(100 + r)).unwrap();
            let stored = position_at(&traj, t).unwrap();
            let mut w2 = MediumWindow::new(gaps, seed).unwrap();
            let mut sampler = law.sampler().unwrap();
            let streamed = gas_position(&mut w2, &mut sampler, t, gaps.mean(), &mut rng(100 + r)).unwrap();
            assert_eq!(stored.to_bits(), streamed.to_bits(), "replica {r}");
        }
    }

    #[test]
    fn trajectory_covers_requested_time() {
        let gaps = GapLaw::pareto(0.5, 1.0).unwrap();
        let mut w = MediumWindow::new(gaps, MediumSeed::new(1, 1, 1)).unwrap();
        let (path, traj) =
            trajectory_until(&mut w, &IncrementLaw::SimpleSymmetric, 5000.0, &mut rng(7)).unwrap();
        assert!(traj.horizon() >= 5000.0);
        assert_eq!(path.len(), traj.positions.len());
    }

    #[test]
    fn trajectory_csv() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("traj.csv");
        let path = WalkPath::from_sites(vec![0, 2, -3]).unwrap();
        let mut w = example_window();
        let traj = interpolate(&flight(&mut w, &path));
        traj.write_csv(&path, &file).unwrap();
        assert_eq!(
            std::fs::read_to_string(file).unwrap(),
            "n,S_n,Y_n,T_n\n0,0,0,0\n1,2,5,5\n2,-3,-3.5,13.5\n"
        );
    }
}
