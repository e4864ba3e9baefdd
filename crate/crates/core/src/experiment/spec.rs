use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristics::Algorithm;
use crate::model::GenerationConfig;

/// The generation parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Number of terminals `|U|`.
    NTerminals,
    /// Terminal uplink rate `r_u`, bit/s.
    UplinkRate,
    /// Satellite compute capacity `C_s`, cycles/s.
    LeoCapacity,
    /// Per-NF satellite allocation `f_ks`, cycles/s.
    NfAllocation,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 4] =
        [SweepParameter::NTerminals, SweepParameter::UplinkRate, SweepParameter::LeoCapacity, SweepParameter::NfAllocation];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::NTerminals => "n_terminals",
            SweepParameter::UplinkRate => "uplink_rate",
            SweepParameter::LeoCapacity => "leo_capacity",
            SweepParameter::NfAllocation => "nf_allocation",
        }
    }

    /// Default grid range (inclusive), SI units.
    pub fn range(self) -> [f64; 2] {
        match self {
            SweepParameter::NTerminals => [5.0, 30.0],
            SweepParameter::UplinkRate => [50.0e6, 350.0e6],
            SweepParameter::LeoCapacity => [2.0e9, 22.0e9],
            SweepParameter::NfAllocation => [0.5e9, 3.0e9],
        }
    }

    /// Six evenly spaced points over [`range`](Self::range).
    pub fn default_grid(self) -> Vec<f64> {
        let [lo, hi] = self.range();
        (0..6).map(|i| lo + (hi - lo) * i as f64 / 5.0).collect()
    }

    /// Returns `base` with the parameter set to `value`.
    pub fn apply(self, base: &GenerationConfig, value: f64) -> Result<GenerationConfig> {
        let mut cfg = base.clone();
        match self {
            SweepParameter::NTerminals => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::InvalidSweep(format!("n_terminals value {value} is not a positive integer")));
                }
                cfg.n_terminals = value as usize;
            }
            SweepParameter::UplinkRate => cfg.r_u = value,
            SweepParameter::LeoCapacity => cfg.sat_compute = value,
            SweepParameter::NfAllocation => cfg.nf_allocation = value,
        }
        Ok(cfg)
    }

    /// The value of this parameter in `cfg`.
    pub fn read(self, cfg: &GenerationConfig) -> f64 {
        match self {
            SweepParameter::NTerminals => cfg.n_terminals as f64,
            SweepParameter::UplinkRate => cfg.r_u,
            SweepParameter::LeoCapacity => cfg.sat_compute,
            SweepParameter::NfAllocation => cfg.nf_allocation,
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        SweepParameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown sweep parameter '{s}'"))
    }
}

/// What a sweep does with an exact solve that stops at its node or time
/// limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitPolicy {
    /// Count the run as a failure and leave it out of the mean.
    #[default]
    Fail,
    /// Keep the best decision found (never worse than GCO or NFCO) and
    /// count the run as budgeted.
    Incumbent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExactSettings {
    pub node_limit: u64,
    pub time_limit_ms: Option<u64>,
    /// Grid points whose instances have more terminals than this run
    /// without the exact solver.
    pub max_terminals: Option<usize>,
    pub on_limit: LimitPolicy,
}

impl Default for ExactSettings {
    fn default() -> Self {
        Self { node_limit: 200_000, time_limit_ms: None, max_terminals: Some(30), on_limit: LimitPolicy::Fail }
    }
}

/// A one-parameter sweep over randomly generated scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    /// Grid values in SI units (a terminal count for `n_terminals`).
    pub values: Vec<f64>,
    pub scenarios: usize,
    pub algorithms: Vec<Algorithm>,
    pub base: GenerationConfig,
    pub master_seed: u64,
    /// Timed runs per algorithm and scenario; the median is reported.
    pub timing_repeats: usize,
    pub exact: ExactSettings,
    /// Permit grid values outside the parameter's default range.
    pub allow_out_of_range: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            parameter: SweepParameter::NTerminals,
            values: SweepParameter::NTerminals.default_grid(),
            scenarios: 100,
            algorithms: Algorithm::ALL.to_vec(),
            base: GenerationConfig::default(),
            master_seed: 0,
            timing_repeats: 3,
            exact: ExactSettings::default(),
            allow_out_of_range: false,
        }
    }
}

impl SweepSpec {
    /// Spec over the parameter's default grid with the other fields at
    /// their defaults.
    pub fn for_parameter(parameter: SweepParameter) -> Self {
        Self { parameter, values: parameter.default_grid(), ..Default::default() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidSweep(msg));
        if self.values.is_empty() {
            return fail("empty value grid".into());
        }
        if self.scenarios == 0 {
            return fail("scenarios must be at least 1".into());
        }
        if self.algorithms.is_empty() {
            return fail("no algorithms".into());
        }
        if self.timing_repeats == 0 {
            return fail("timing_repeats must be at least 1".into());
        }
        let mut seen = self.algorithms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.algorithms.len() {
            return fail("algorithm listed twice".into());
        }
        let [lo, hi] = self.parameter.range();
        for &v in &self.values {
            if !v.is_finite() {
                return fail(format!("non-finite grid value {v}"));
            }
            if !self.allow_out_of_range && !(lo..=hi).contains(&v) {
                return fail(format!(
                    "{} value {v} outside [{lo}, {hi}]; set allow_out_of_range to override",
                    self.parameter
                ));
            }
            // Surfaces bad configs (e.g. f_ks above C_s) before any work starts.
            self.parameter.apply(&self.base, v).and_then(|cfg| crate::model::generate_scenario(&cfg, 0))?;
        }
        Ok(())
    }

    /// Whether the exact solver runs at a grid point with this config.
    pub fn exact_runs_at(&self, cfg: &GenerationConfig) -> bool {
        self.algorithms.contains(&Algorithm::Ilp) && self.exact.max_terminals.map_or(true, |m| cfg.n_terminals <= m)
    }
}
