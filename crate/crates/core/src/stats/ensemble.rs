use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::estimators::{mean, quantile, tail_probability_below, variance, TailEstimate};
use crate::medium::{GapLaw, MediumWindow, SharedMedium};
use crate::par::{try_map_indexed, Execution};
use crate::rng::{stream_id, substream, Lane, MediumSeed};
use crate::walks::{flight_endpoint, gas_position, IncrementLaw};
use crate::{Error, Result};

/// What is recorded per replica.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    /// The flight `Y_n`.
    FlightAt { n: u64 },
    /// The gas position `X(t)`.
    GasAt { t: f64 },
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Observable::FlightAt { .. } => "Y_n",
            Observable::GasAt { .. } => "X_t",
        }
    }

    /// `n` or `t` as a real number.
    pub fn point(&self) -> f64 {
        match *self {
            Observable::FlightAt { n } => n as f64,
            Observable::GasAt { t } => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Protocol {
    /// One medium realization for every replica.
    Quenched { medium_seed: MediumSeed, medium_token: u64 },
    /// A fresh medium per replica.
    Annealed,
}

/// Everything an ensemble needs apart from the protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub gap_law: GapLaw,
    pub inc_law: IncrementLaw,
    pub observable: Observable,
    pub replicas: usize,
    /// Master seed and stream of the walk substreams (replica `r` uses
    /// `(master, stream, r, Walk)`).
    pub master: u64,
    pub stream: u64,
    pub execution: Execution,
}

impl EnsembleSpec {
    fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::invalid("replicas must be at least 1"));
        }
        self.gap_law.validate()?;
        self.inc_law.validate()?;
        if let Observable::GasAt { t } = self.observable {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::invalid(format!("time must be nonnegative and finite, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub observable: Observable,
    pub protocol: Protocol,
    pub gap_law: GapLaw,
    pub inc_law: IncrementLaw,
    pub master_seed: u64,
    pub stream: u64,
    pub replicas: usize,
    pub samples: Vec<f64>,
}

/// Summary statistics written next to the per-replica CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub observable: String,
    pub point: Observable,
    pub protocol: Protocol,
    pub gap_law: GapLaw,
    pub inc_law: IncrementLaw,
    pub master_seed: u64,
    pub stream: u64,
    pub replicas: usize,
    pub mean: f64,
    pub variance: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub min: f64,
    pub max: f64,
}

impl EnsembleResult {
    pub fn summary(&self) -> Result<EnsembleSummary> {
        let s = &self.samples;
        Ok(EnsembleSummary {
            observable: self.observable.name().to_string(),
            point: self.observable,
            protocol: self.protocol,
            gap_law: self.gap_law,
            inc_law: self.inc_law,
            master_seed: self.master_seed,
            stream: self.stream,
            replicas: self.replicas,
            mean: mean(s)?,
            variance: variance(s)?,
            median: quantile(s, 0.5)?,
            q25: quantile(s, 0.25)?,
            q75: quantile(s, 0.75)?,
            min: quantile(s, 0.0)?,
            max: quantile(s, 1.0)?,
        })
    }

    /// One row per replica: `replica,value`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(out, "replica,{}", self.observable.name()).map_err(io)?;
        for (r, v) in self.samples.iter().enumerate() {
            writeln!(out, "{r},{v}").map_err(io)?;
        }
        out.flush().map_err(io)
    }

    pub fn write_summary_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.summary()?)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    /// Samples divided by `scale`.
    pub fn scaled(&self, scale: f64) -> Vec<f64> {
        self.samples.iter().map(|x| x / scale).collect()
    }
}

/// Largest number of gaps a shared quenched window pre-materializes per side.
const MAX_SHARED_SITES: usize = 1 << 22;

/// Sites the flight is likely to visit in `n` steps, with room to spare.
fn flight_reach(law: &IncrementLaw, n: u64) -> usize {
    let nf = n as f64;
    let drift = law.drift().unwrap_or(0.0).abs();
    let spread = if law.second_moment().is_finite() {
        8.0 * (nf * law.second_moment()).sqrt()
    } else {
        20.0 * nf.powf(1.0 / law.stable_index())
    };
    ((drift * nf + spread + 64.0).min(MAX_SHARED_SITES as f64)) as usize
}

fn check_gas_sample(x: f64, t: f64) -> Result<f64> {
    if x.abs() > t * (1.0 + 1e-12) + 1e-9 {
        return Err(Error::Hypothesis(format!("|X(t)| = {} exceeds t = {t}", x.abs())));
    }
    Ok(x)
}

/// The shared window a quenched ensemble pre-materializes before sampling.
pub fn quenched_window(spec: &EnsembleSpec, medium_seed: MediumSeed) -> Result<MediumWindow> {
    let mut window = MediumWindow::new(spec.gap_law, medium_seed)?;
    match spec.observable {
        Observable::FlightAt { n } => {
            let reach = flight_reach(&spec.inc_law, n);
            window.ensure(reach, reach);
        }
        Observable::GasAt { t } => {
            window.cover(t, MAX_SHARED_SITES);
            let (p, m) = window.extent();
            window.ensure(m + 16, p + 16);
        }
    }
    Ok(window)
}

/// One fixed medium from `medium_seed`, `replicas` independent walks.
pub fn quenched_ensemble(spec: &EnsembleSpec, medium_seed: MediumSeed) -> Result<EnsembleResult> {
    spec.validate()?;
    let window = quenched_window(spec, medium_seed)?;
    let token = window.token();
    let prototype = spec.inc_law.sampler()?;
    let samples = try_map_indexed(spec.execution, spec.replicas, |r| {
        let mut medium = SharedMedium::borrowed(&window);
        debug_assert_eq!(medium.token(), token);
        let mut sampler = prototype.clone();
        let mut rng = substream(spec.master, spec.stream, r as u64, Lane::Walk);
        match spec.observable {
            Observable::FlightAt { n } => Ok(flight_endpoint(&mut medium, &mut sampler, n, &mut rng)),
            Observable::GasAt { t } => {
                let x = gas_position(&mut medium, &mut sampler, t, spec.gap_law.mean(), &mut rng)?;
                check_gas_sample(x, t)
            }
        }
    })?;
    Ok(EnsembleResult {
        observable: spec.observable,
        protocol: Protocol::Quenched {
            medium_seed,
            medium_token: token,
        },
        gap_law: spec.gap_law,
        inc_law: spec.inc_law,
        master_seed: spec.master,
        stream: spec.stream,
        replicas: spec.replicas,
        samples,
    })
}

/// A fresh medium per replica: replica `r` draws its medium from
/// `MediumSeed::new(master, stream, r)`.
pub fn annealed_ensemble(spec: &EnsembleSpec) -> Result<EnsembleResult> {
    spec.validate()?;
    let prototype = spec.inc_law.sampler()?;
    let samples = try_map_indexed(spec.execution, spec.replicas, |r| {
        let mut window = MediumWindow::new(spec.gap_law, MediumSeed::new(spec.master, spec.stream, r as u64))?;
        let mut sampler = prototype.clone();
        let mut rng = substream(spec.master, spec.stream, r as u64, Lane::Walk);
        match spec.observable {
            Observable::FlightAt { n } => Ok(flight_endpoint(&mut window, &mut sampler, n, &mut rng)),
            Observable::GasAt { t } => {
                let x = gas_position(&mut window, &mut sampler, t, spec.gap_law.mean(), &mut rng)?;
                check_gas_sample(x, t)
            }
        }
    })?;
    Ok(EnsembleResult {
        observable: spec.observable,
        protocol: Protocol::Annealed,
        gap_law: spec.gap_law,
        inc_law: spec.inc_law,
        master_seed: spec.master,
        stream: spec.stream,
        replicas: spec.replicas,
        samples,
    })
}

/// Empirical decay rate of `P_ω(|X(t)| > at)` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub t: f64,
    pub exceedance: TailEstimate,
    /// `log(max(p̂, 1/replicas)) / √(at)`.
    pub rate: f64,
}

/// Quenched stretched-exponential rates on a time grid. Each grid point gets
/// its own walk stream; the medium is the same for all of them.
#[allow(clippy::too_many_arguments)]
pub fn stretched_exp_rate(
    gap_law: GapLaw,
    inc_law: IncrementLaw,
    a: f64,
    t_grid: &[f64],
    replicas: usize,
    medium_seed: MediumSeed,
    master: u64,
    stream: u64,
    execution: Execution,
) -> Result<Vec<RatePoint>> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::invalid(format!("a must lie in (0, 1], got {a}")));
    }
    if !inc_law.is_simple_symmetric() {
        return Err(Error::Hypothesis("stretched-exponential deviations assume S is a simple symmetric RW".into()));
    }
    if !gap_law.mean().is_finite() {
        return Err(Error::Hypothesis("stretched-exponential deviations assume a finite mean gap".into()));
    }
    t_grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let spec = EnsembleSpec {
                gap_law,
                inc_law,
                observable: Observable::GasAt { t },
                replicas,
                master,
                stream: stream_id(stream, i as u64, 0),
                execution,
            };
            let result = quenched_ensemble(&spec, medium_seed)?;
            let abs: Vec<f64> = result.samples.iter().map(|x| -x.abs()).collect();
            // |X| > at  ⇔  -|X| < -at
            let exceedance = tail_probability_below(&abs, -a * t)?;
            let floor = 1.0 / replicas as f64;
            Ok(RatePoint {
                t,
                exceedance,
                rate: exceedance.p.max(floor).ln() / (a * t).sqrt(),
            })
        })
        .collect()
}
