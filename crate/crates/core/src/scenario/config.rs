use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::medium::GapLaw;
use crate::quadrature::QuadratureConfig;
use crate::walks::IncrementLaw;
use crate::{Error, Result};

/// Identifier of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioId {
    Thm1,
    Thm2,
    Thm3a,
    Thm3b,
    Thm4a,
    Thm4b,
    Thm4c,
    Thm5a,
    Thm5b,
    Thm6,
    Thm7,
    Thm8,
    Thm9,
    Thm10,
    Thm11,
    Custom,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 16] = [
        ScenarioId::Thm1,
        ScenarioId::Thm2,
        ScenarioId::Thm3a,
        ScenarioId::Thm3b,
        ScenarioId::Thm4a,
        ScenarioId::Thm4b,
        ScenarioId::Thm4c,
        ScenarioId::Thm5a,
        ScenarioId::Thm5b,
        ScenarioId::Thm6,
        ScenarioId::Thm7,
        ScenarioId::Thm8,
        ScenarioId::Thm9,
        ScenarioId::Thm10,
        ScenarioId::Thm11,
        ScenarioId::Custom,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioId::Thm1 => "thm1",
            ScenarioId::Thm2 => "thm2",
            ScenarioId::Thm3a => "thm3a",
            ScenarioId::Thm3b => "thm3b",
            ScenarioId::Thm4a => "thm4a",
            ScenarioId::Thm4b => "thm4b",
            ScenarioId::Thm4c => "thm4c",
            ScenarioId::Thm5a => "thm5a",
            ScenarioId::Thm5b => "thm5b",
            ScenarioId::Thm6 => "thm6",
            ScenarioId::Thm7 => "thm7",
            ScenarioId::Thm8 => "thm8",
            ScenarioId::Thm9 => "thm9",
            ScenarioId::Thm10 => "thm10",
            ScenarioId::Thm11 => "thm11",
            ScenarioId::Custom => "custom",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown scenario {s:?}")))
    }
}

/// Medium protocol of the `custom` scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Quenched,
    Annealed,
}

/// Full description of a run. Every field has a default that depends on the
/// scenario; see [`ScenarioConfig::defaults`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioId,
    pub gap_law: GapLaw,
    pub inc_law: IncrementLaw,
    /// Flight step counts `n`.
    pub n_grid: Vec<u64>,
    /// Gas times `t`.
    pub t_grid: Vec<f64>,
    /// Moment orders `q`.
    pub q_grid: Vec<f64>,
    /// Deviation levels `a`.
    pub a_grid: Vec<f64>,
    /// Walks per ensemble (and reference draws per comparison).
    pub replicas: usize,
    /// Independent seed repetitions (fresh medium, walks and reference) that
    /// must all pass.
    pub repetitions: usize,
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    pub out_dir: Option<PathBuf>,
    /// Medium protocol, used by `custom` only.
    pub protocol: ProtocolKind,
    /// KS acceptance level.
    pub p_threshold: f64,
    /// Scenario-specific tolerance (relative for moments, absolute for exponents).
    pub tolerance: f64,
    /// Grid cells of the composed reference process.
    pub composition_m: usize,
    pub quadrature: QuadratureConfig,
}

fn pareto(alpha: f64) -> GapLaw {
    GapLaw::Pareto {
        tail_index: alpha,
        x_min: 1.0,
    }
}

fn decades(exponents: &[f64]) -> Vec<f64> {
    exponents.iter().map(|e| 10f64.powf(*e)).collect()
}

impl ScenarioConfig {
    /// The default configuration of a scenario.
    pub fn defaults(id: ScenarioId) -> Self {
        let base = Self {
            scenario: id,
            gap_law: pareto(1.5),
            inc_law: IncrementLaw::SimpleSymmetric,
            n_grid: vec![],
            t_grid: vec![],
            q_grid: vec![],
            a_grid: vec![],
            replicas: 10_000,
            repetitions: 3,
            seed: 20_240_611,
            workers: 0,
            out_dir: None,
            protocol: ProtocolKind::Annealed,
            p_threshold: 0.01,
            tolerance: 0.1,
            composition_m: 100_000,
            quadrature: QuadratureConfig::default(),
        };
        let drifted = |tail_index: f64| IncrementLaw::DriftedZeta {
            tail_index,
            drift: 0.4,
        };
        match id {
            ScenarioId::Thm1 => Self {
                n_grid: vec![10_000],
                ..base
            },
            ScenarioId::Thm2 => Self {
                n_grid: vec![10_000],
                q_grid: vec![1.0, 2.0, 3.0],
                ..base
            },
            ScenarioId::Thm3a => Self {
                inc_law: IncrementLaw::SymmetricZeta { tail_index: 1.5 },
                n_grid: vec![20_000],
                ..base
            },
            ScenarioId::Thm3b => Self {
                inc_law: drifted(1.8),
                n_grid: vec![100_000],
                replicas: 1000,
                tolerance: 0.03,
                ..base
            },
            ScenarioId::Thm4a => Self {
                gap_law: GapLaw::ShiftedExponential { rate: 1.0 },
                inc_law: drifted(1.5),
                n_grid: vec![100_000],
                ..base
            },
            ScenarioId::Thm4b => Self {
                gap_law: pareto(1.2),
                inc_law: drifted(3.0),
                n_grid: vec![100_000],
                replicas: 4000,
                ..base
            },
            ScenarioId::Thm4c => Self {
                gap_law: GapLaw::ShiftedExponential { rate: 1.0 },
                inc_law: drifted(3.0),
                n_grid: vec![100_000],
                replicas: 4000,
                ..base
            },
            ScenarioId::Thm5a => Self {
                gap_law: pareto(0.5),
                n_grid: vec![100_000],
                ..base
            },
            ScenarioId::Thm5b => Self {
                gap_law: pareto(0.5),
                inc_law: drifted(3.0),
                n_grid: vec![10_000],
                replicas: 4000,
                ..base
            },
            ScenarioId::Thm6 => Self {
                t_grid: vec![10_000.0],
                ..base
            },
            ScenarioId::Thm7 => Self {
                t_grid: vec![10_000.0],
                q_grid: vec![1.0, 2.0],
                ..base
            },
            ScenarioId::Thm8 => Self {
                t_grid: vec![100.0, 400.0, 1600.0],
                a_grid: vec![0.5],
                replicas: 100_000,
                ..base
            },
            ScenarioId::Thm9 => Self {
                t_grid: decades(&[2.0, 2.5, 3.0, 3.5, 4.0]),
                q_grid: vec![1.0, 4.0],
                replicas: 100_000,
                tolerance: 0.15,
                ..base
            },
            ScenarioId::Thm10 => Self {
                t_grid: decades(&[2.0, 2.5, 3.0, 3.5, 4.0]),
                a_grid: vec![0.5],
                replicas: 100_000,
                tolerance: 0.2,
                ..base
            },
            ScenarioId::Thm11 => Self {
                gap_law: pareto(0.5),
                t_grid: decades(&[3.0, 3.5, 4.0, 4.5]),
                tolerance: 0.05,
                ..base
            },
            ScenarioId::Custom => Self {
                n_grid: vec![1000],
                q_grid: vec![1.0, 2.0],
                replicas: 1000,
                repetitions: 1,
                ..base
            },
        }
    }

    /// Defaults of the scenario named in `json` (or `scenario`, which takes
    /// precedence), overlaid with every field present in `json`.
    pub fn from_json(json: &str, scenario: Option<ScenarioId>) -> Result<Self> {
        let doc: Value = serde_json::from_str(json)?;
        let Value::Object(fields) = doc else {
            return Err(Error::invalid("a config must be a JSON object"));
        };
        let id = match (scenario, fields.get("scenario")) {
            (Some(id), _) => id,
            (None, Some(v)) => serde_json::from_value(v.clone())
                .map_err(|_| Error::invalid(format!("unknown scenario {v}")))?,
            (None, None) => return Err(Error::invalid("no scenario given in the config or on the command line")),
        };
        let mut merged = serde_json::to_value(Self::defaults(id))?;
        let target = merged.as_object_mut().expect("config serializes to an object");
        for (k, v) in fields {
            target.insert(k, v);
        }
        target.insert("scenario".into(), serde_json::to_value(id)?);
        Ok(serde_json::from_value(merged)?)
    }

    pub fn from_file(path: &Path, scenario: Option<ScenarioId>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, scenario)
    }

    /// Every violated precondition, each naming the scenario and hypothesis.
    pub fn validate(&self) -> Vec<String> {
        let id = self.scenario;
        let mut v = Vec::new();
        let mut need = |cond: bool, msg: &str| {
            if !cond {
                v.push(format!("{id} {msg}"));
            }
        };

        let gap_ok = self.gap_law.validate();
        let inc_ok = self.inc_law.validate();
        need(gap_ok.is_ok(), &format!("has an invalid gap law: {}", gap_ok.err().map(|e| e.to_string()).unwrap_or_default()));
        need(inc_ok.is_ok(), &format!("has an invalid increment law: {}", inc_ok.err().map(|e| e.to_string()).unwrap_or_default()));
        let min_replicas = if id == ScenarioId::Custom { 1 } else { 100 };
        need(self.replicas >= min_replicas, &format!("needs at least {min_replicas} replicas"));
        need(self.repetitions >= 1, "needs at least one repetition");
        need(self.p_threshold > 0.0 && self.p_threshold < 1.0, "needs p_threshold in (0, 1)");
        need(self.tolerance > 0.0, "needs a positive tolerance");
        need(self.composition_m >= 1000, "needs composition_m of at least 1000");
        need(self.quadrature.validate().is_ok(), "has an invalid quadrature configuration");
        need(self.n_grid.iter().all(|&n| n >= 1), "needs positive step counts in n_grid");
        need(self.t_grid.iter().all(|&t| t > 0.0 && t.is_finite()), "needs positive finite times in t_grid");
        need(self.q_grid.iter().all(|&q| q > 0.0 && q.is_finite()), "needs positive moment orders in q_grid");
        need(self.a_grid.iter().all(|&a| a > 0.0 && a <= 1.0), "needs deviation levels a in (0, 1]");
        if gap_ok_and(&self.gap_law) && inc_ok_and(&self.inc_law) {
            self.hypotheses(&mut need);
        }
        v
    }

    fn hypotheses(&self, need: &mut impl FnMut(bool, &str)) {
        use ScenarioId::*;
        let gap = &self.gap_law;
        let inc = &self.inc_law;
        let mu = gap.mean();
        let alpha = gap.stable_index();
        let beta = inc.stable_index();
        let nu = inc.drift();
        let centred_or_light = beta < 1.0 || (beta > 1.0 && nu == Some(0.0));
        let drifting = beta > 1.0 && matches!(nu, Some(d) if d != 0.0);
        let finite_mean_domain = alpha > 1.0 && mu.is_finite() && gap.in_normal_domain();
        let flight_grid = |need: &mut dyn FnMut(bool, &str)| need(!self.n_grid.is_empty(), "needs a nonempty n_grid");
        let gas_grid = |need: &mut dyn FnMut(bool, &str)| need(!self.t_grid.is_empty(), "needs a nonempty t_grid");
        match self.scenario {
            Thm1 | Thm2 | Thm6 => {
                if self.scenario == Thm6 {
                    gas_grid(need);
                } else {
                    flight_grid(need);
                }
                need(mu.is_finite(), "assumes a finite mean gap μ");
                need(inc.is_symmetric(), "assumes symmetric increments of S");
                need(inc.is_unimodal(), "assumes unimodal increments of S");
                need(inc.second_moment().is_finite(), "assumes increments of S with finite variance");
                if self.scenario == Thm2 {
                    need(!self.q_grid.is_empty(), "needs a nonempty q_grid");
                    let ceiling = inc.moment_ceiling();
                    need(
                        self.q_grid.iter().all(|&q| q < ceiling),
                        "requires every moment order q below the moment ceiling of the increments",
                    );
                }
            }
            Thm3a | Thm3b | Thm4a | Thm4b | Thm4c => {
                flight_grid(need);
                need(finite_mean_domain, "requires gaps in the normal domain of an α-stable law with α ∈ (1, 2]");
                match self.scenario {
                    Thm3a => need(
                        centred_or_light,
                        "requires β ∈ (0, 1), or β ∈ (1, 2] with ν = 0",
                    ),
                    Thm3b => need(drifting, "requires β ∈ (1, 2] with ν ≠ 0"),
                    _ => {
                        need(beta > 1.0 && beta <= 2.0, "requires β ∈ (1, 2]");
                        need(drifting, "requires a drift ν ≠ 0");
                        match self.scenario {
                            Thm4a => need(beta < alpha, "requires β < α"),
                            Thm4b => need(beta > alpha, "requires β > α"),
                            _ => need(beta == alpha, "requires β = α"),
                        }
                    }
                }
            }
            Thm5a | Thm5b => {
                flight_grid(need);
                need(
                    alpha < 1.0 && !mu.is_finite() && gap.in_normal_domain(),
                    "requires gaps in the normal domain of an α-stable law with α ∈ (0, 1)",
                );
                if self.scenario == Thm5a {
                    need(centred_or_light, "requires β ∈ (0, 1), or β ∈ (1, 2] with ν = 0");
                } else {
                    need(drifting, "requires β ∈ (1, 2] with ν ≠ 0");
                }
            }
            Thm7 | Thm8 => {
                gas_grid(need);
                need(mu.is_finite(), "assumes a finite mean gap μ");
                need(inc.is_simple_symmetric(), "requires S simple symmetric");
                if self.scenario == Thm7 {
                    need(!self.q_grid.is_empty(), "needs a nonempty q_grid");
                } else {
                    need(!self.a_grid.is_empty(), "needs a nonempty a_grid");
                }
            }
            Thm9 | Thm10 => {
                gas_grid(need);
                need(inc.is_simple_symmetric(), "assumes S is a simple symmetric RW");
                need(mu.is_finite(), "assumes a finite mean gap μ");
                need(
                    matches!(gap.tail_index(), Some(a) if a >= 1.0),
                    "assumes a regularly varying gap tail with index -α ≤ -1",
                );
                if self.scenario == Thm9 {
                    need(!self.q_grid.is_empty(), "needs a nonempty q_grid");
                    need(self.t_grid.len() >= 4, "needs at least 4 times to fit an exponent");
                } else {
                    need(!self.a_grid.is_empty(), "needs a nonempty a_grid");
                    need(self.t_grid.len() >= 4, "needs at least 4 times to fit an exponent");
                }
            }
            Thm11 => {
                gas_grid(need);
                need(self.t_grid.len() >= 4, "needs at least 4 times to fit an exponent");
                need(
                    alpha < 1.0 && !mu.is_finite() && gap.in_normal_domain(),
                    "requires gaps in the normal domain of an α-stable law with α ∈ (0, 1)",
                );
                need(nu == Some(0.0), "requires centred increments (ν = 0)");
                need(
                    inc.moment_ceiling() > 2.0 / alpha,
                    "requires a finite absolute moment of the increments of order q > 2/α",
                );
            }
            Custom => {
                need(
                    !self.n_grid.is_empty() || !self.t_grid.is_empty(),
                    "needs a nonempty n_grid or t_grid",
                );
            }
        }
    }
}

fn gap_ok_and(law: &GapLaw) -> bool {
    law.validate().is_ok()
}

fn inc_ok_and(law: &IncrementLaw) -> bool {
    law.validate().is_ok()
}
