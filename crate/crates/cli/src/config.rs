//! Sweep configuration: a single TOML file describing the system, the cycle,
//! the grid axes and the requested analyses.

use serde::{Deserialize, Serialize};
use spinmachine::cycle::{CycleConfig, StrokeMode};
use spinmachine::spinchain::{ChainSpec, NoSymPairSpec};
use std::path::PathBuf;

pub type CliResult<T> = Result<T, String>;

/// Top-level sweep file.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SweepFile {
    /// Seed for any randomized analysis (reserved; sweeps themselves are
    /// deterministic).
    #[serde(default)]
    pub seed: u64,
    /// Fixed-point tolerance (trace distance).
    #[serde(default = "default_tol")]
    pub tol: f64,
    pub system: SystemConfig,
    pub cycle: CycleSection,
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_tol() -> f64 {
    1e-12
}

/// The working fluid: either a magnetization-preserving chain or the
/// two-site model with counter-rotating terms.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemConfig {
    #[serde(rename_all = "kebab-case")]
    Chain {
        /// Site count; required when using profile shorthands, otherwise
        /// inferred from `e`.
        sites: Option<usize>,
        e: Option<Vec<f64>>,
        /// `[first, last]`: linear gap profile across the chain.
        e_linear: Option<[f64; 2]>,
        j: Option<Vec<f64>>,
        j_uniform: Option<f64>,
        k: Option<Vec<f64>>,
        k_uniform: Option<f64>,
        f: Option<Vec<f64>>,
        f_uniform: Option<f64>,
    },
    #[serde(rename_all = "kebab-case")]
    NosymPair {
        e1: f64,
        e2: f64,
        j_r: f64,
        #[serde(default)]
        j_i: f64,
        #[serde(default)]
        k_r: f64,
        #[serde(default)]
        k_i: f64,
        #[serde(default)]
        f: f64,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct CycleSection {
    pub mode: StrokeMode,
    pub beta1: f64,
    pub beta2: f64,
    pub tau1: f64,
    #[serde(default)]
    pub tau2: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SweepSection {
    pub axes: Vec<AxisConfig>,
    pub analyses: Vec<Analysis>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct AxisConfig {
    pub field: AxisField,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub steps: Option<usize>,
    pub values: Option<Vec<f64>>,
}

/// Scalar the axis varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisField {
    Tau1,
    Tau2,
    /// Two-stroke free-evolution time (alias for `tau1`).
    Tau,
    Beta1,
    Beta2,
    EFirst,
    ELast,
    /// Sets `E_N = r * E_1`, leaving interior gaps untouched.
    ELastOverFirst,
    /// Sets `E_N = r * E_1` and interpolates the interior gaps linearly.
    ELastOverFirstLinear,
    /// Second local gap of the no-symmetry pair.
    E2,
}

impl AxisField {
    pub fn name(&self) -> &'static str {
        match self {
            AxisField::Tau1 => "tau1",
            AxisField::Tau2 => "tau2",
            AxisField::Tau => "tau",
            AxisField::Beta1 => "beta1",
            AxisField::Beta2 => "beta2",
            AxisField::EFirst => "e-first",
            AxisField::ELast => "e-last",
            AxisField::ELastOverFirst => "e-last-over-first",
            AxisField::ELastOverFirstLinear => "e-last-over-first-linear",
            AxisField::E2 => "e2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Thermo,
    Regime,
    Ansatz,
    Gap,
    Lowtemp,
    Mixing,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub prefix: Option<String>,
}

/// A fully resolved working fluid.
#[derive(Debug, Clone)]
pub enum SystemSpec {
    Chain(ChainSpec),
    Pair(NoSymPairSpec),
}

impl SystemSpec {
    pub fn site_count(&self) -> usize {
        match self {
            SystemSpec::Chain(c) => c.n,
            SystemSpec::Pair(_) => 2,
        }
    }
}

/// Resolved, validated sweep.
#[derive(Debug, Clone)]
pub struct ResolvedSweep {
    pub system: SystemSpec,
    pub cycle: CycleConfig,
    pub axes: Vec<(AxisField, Vec<f64>)>,
    pub analyses: Vec<Analysis>,
    pub seed: u64,
    pub tol: f64,
    pub out_dir: PathBuf,
    pub prefix: String,
}

fn linear_profile(first: f64, last: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| first + (last - first) * i as f64 / (n - 1).max(1) as f64)
        .collect()
}

fn resolve_bond_vector(
    name: &str,
    explicit: &Option<Vec<f64>>,
    uniform: &Option<f64>,
    bonds: usize,
) -> CliResult<Vec<f64>> {
    match (explicit, uniform) {
        (Some(v), None) => {
            if v.len() != bonds {
                return Err(format!("{name} has {} entries, expected {bonds}", v.len()));
            }
            Ok(v.clone())
        }
        (None, Some(u)) => Ok(vec![*u; bonds]),
        (None, None) => Ok(vec![0.0; bonds]),
        (Some(_), Some(_)) => Err(format!("give either {name} or {name}-uniform, not both")),
    }
}

impl SystemConfig {
    pub fn resolve(&self) -> CliResult<SystemSpec> {
        match self {
            SystemConfig::Chain { sites, e, e_linear, j, j_uniform, k, k_uniform, f, f_uniform } => {
                let e = match (e, e_linear) {
                    (Some(v), None) => v.clone(),
                    (None, Some([first, last])) => {
                        let n = sites.ok_or("e-linear requires sites")?;
                        linear_profile(*first, *last, n)
                    }
                    (None, None) => return Err("chain needs e or e-linear".into()),
                    (Some(_), Some(_)) => return Err("give either e or e-linear, not both".into()),
                };
                if let Some(n) = sites {
                    if *n != e.len() {
                        return Err(format!("sites = {n} but e has {} entries", e.len()));
                    }
                }
                let n = e.len();
                if n < 2 {
                    return Err("chain needs at least 2 sites".into());
                }
                let j = resolve_bond_vector("j", j, j_uniform, n - 1)?;
                let k = resolve_bond_vector("k", k, k_uniform, n - 1)?;
                let f = resolve_bond_vector("f", f, f_uniform, n - 1)?;
                ChainSpec::new(e, j, k, f).map(SystemSpec::Chain).map_err(|e| e.to_string())
            }
            SystemConfig::NosymPair { e1, e2, j_r, j_i, k_r, k_i, f } => {
                NoSymPairSpec::new(*e1, *e2, *j_r, *j_i, *k_r, *k_i, *f)
                    .map(SystemSpec::Pair)
                    .map_err(|e| e.to_string())
            }
        }
    }
}

impl AxisConfig {
    pub fn grid(&self) -> CliResult<Vec<f64>> {
        let values = match (&self.values, self.min, self.max, self.steps) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(min), Some(max), Some(steps)) => {
                if steps == 0 {
                    return Err("axis steps must be >= 1".into());
                }
                (0..steps)
                    .map(|i| {
                        if steps == 1 {
                            min
                        } else {
                            min + (max - min) * i as f64 / (steps - 1) as f64
                        }
                    })
                    .collect()
            }
            _ => return Err("axis needs either values or (min, max, steps)".into()),
        };
        if values.is_empty() {
            return Err("axis grid is empty".into());
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err("axis grid contains non-finite values".into());
        }
        Ok(values)
    }
}

impl SweepFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }

    pub fn resolve(&self) -> CliResult<ResolvedSweep> {
        let system = self.system.resolve()?;
        let cycle = match self.cycle.mode {
            StrokeMode::FourStroke => {
                CycleConfig::four_stroke(self.cycle.beta1, self.cycle.beta2, self.cycle.tau1, self.cycle.tau2)
            }
            StrokeMode::TwoStroke => {
                if self.cycle.tau2 != 0.0 {
                    return Err("two-stroke mode uses a single tau (set tau1; tau2 must stay 0)".into());
                }
                CycleConfig::two_stroke(self.cycle.beta1, self.cycle.beta2, self.cycle.tau1)
            }
        }
        .map_err(|e| e.to_string())?;

        if self.sweep.axes.is_empty() || self.sweep.axes.len() > 2 {
            return Err("sweeps support one or two axes".into());
        }
        let mut axes = Vec::new();
        for axis in &self.sweep.axes {
            axis.validate_for(&system)?;
            axes.push((axis.field, axis.grid()?));
        }
        if self.sweep.analyses.is_empty() {
            return Err("request at least one analysis".into());
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err("tol must be positive".into());
        }
        Ok(ResolvedSweep {
            system,
            cycle,
            axes,
            analyses: self.sweep.analyses.clone(),
            seed: self.seed,
            tol: self.tol,
            out_dir: self.output.dir.clone().unwrap_or_else(|| PathBuf::from("out")),
            prefix: self.output.prefix.clone().unwrap_or_else(|| "sweep".into()),
        })
    }
}

impl AxisConfig {
    fn validate_for(&self, system: &SystemSpec) -> CliResult<()> {
        match (self.field, system) {
            (AxisField::E2, SystemSpec::Chain(_)) => {
                Err("axis e2 applies to the nosym-pair system; chains use e-last".into())
            }
            (
                AxisField::ELastOverFirst | AxisField::ELastOverFirstLinear | AxisField::EFirst | AxisField::ELast,
                SystemSpec::Pair(_),
            ) => Err(format!("axis {} applies to chain systems", self.field.name())),
            _ => Ok(()),
        }
    }
}

/// Apply one axis value to a copy of the system/cycle pair.
pub fn apply_axis(
    system: &SystemSpec,
    cycle: &CycleConfig,
    field: AxisField,
    value: f64,
) -> CliResult<(SystemSpec, CycleConfig)> {
    let mut system = system.clone();
    let mut cycle = *cycle;
    match field {
        AxisField::Tau1 | AxisField::Tau => cycle.tau1 = value,
        AxisField::Tau2 => cycle.tau2 = value,
        AxisField::Beta1 => cycle.beta1 = value,
        AxisField::Beta2 => cycle.beta2 = value,
        AxisField::EFirst => match &mut system {
            SystemSpec::Chain(c) => c.e[0] = value,
            SystemSpec::Pair(p) => p.e1 = value,
        },
        AxisField::ELast => match &mut system {
            SystemSpec::Chain(c) => *c.e.last_mut().unwrap() = value,
            SystemSpec::Pair(p) => p.e2 = value,
        },
        AxisField::ELastOverFirst => match &mut system {
            SystemSpec::Chain(c) => *c.e.last_mut().unwrap() = value * c.e[0],
            SystemSpec::Pair(_) => return Err("ratio axis applies to chains".into()),
        },
        AxisField::ELastOverFirstLinear => match &mut system {
            SystemSpec::Chain(c) => {
                let first = c.e[0];
                c.e = linear_profile(first, value * first, c.n);
            }
            SystemSpec::Pair(_) => return Err("ratio axis applies to chains".into()),
        },
        AxisField::E2 => match &mut system {
            SystemSpec::Pair(p) => p.e2 = value,
            SystemSpec::Chain(_) => return Err("axis e2 applies to the nosym pair".into()),
        },
    }
    if cycle.tau1 < 0.0 || cycle.tau2 < 0.0 || cycle.beta1 < 0.0 || cycle.beta2 < 0.0 {
        return Err(format!("axis {} produced an invalid cycle parameter", field.name()));
    }
    Ok((system, cycle))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 7
tol = 1e-12

[system]
kind = "chain"
sites = 4
e-linear = [1.0, 2.0]
j-uniform = 1.0

[cycle]
mode = "two-stroke"
beta1 = 0.5
beta2 = 1.0
tau1 = 1.5

[sweep]
analyses = ["thermo", "regime"]

[[sweep.axes]]
field = "tau"
min = 0.0
max = 2.0
steps = 5

[output]
dir = "out/test"
prefix = "demo"
"#;

    #[test]
    fn sample_config_round_trips() {
        let file = SweepFile::parse(SAMPLE).unwrap();
        let resolved = file.resolve().unwrap();
        assert_eq!(resolved.system.site_count(), 4);
        assert_eq!(resolved.axes.len(), 1);
        assert_eq!(resolved.axes[0].1, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(resolved.seed, 7);
        match &resolved.system {
            SystemSpec::Chain(c) => {
                for (got, want) in c.e.iter().zip([1.0, 4.0 / 3.0, 5.0 / 3.0, 2.0]) {
                    assert!((got - want).abs() < 1e-14);
                }
                assert_eq!(c.j, vec![1.0; 3]);
            }
            _ => panic!("expected chain"),
        }
    }

    #[test]
    fn ratio_axis_rescales_the_profile() {
        let file = SweepFile::parse(SAMPLE).unwrap();
        let resolved = file.resolve().unwrap();
        let (system, _) =
            apply_axis(&resolved.system, &resolved.cycle, AxisField::ELastOverFirstLinear, -0.5).unwrap();
        match system {
            SystemSpec::Chain(c) => {
                assert_eq!(c.e[0], 1.0);
                assert_eq!(*c.e.last().unwrap(), -0.5);
                assert!((c.e[1] - 0.5).abs() < 1e-15);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        assert!(SweepFile::parse("not toml at all [").is_err());

        // an axis without a grid definition resolves to an error
        let no_grid = SAMPLE.replace("min = 0.0\nmax = 2.0\nsteps = 5\n", "");
        let parsed = SweepFile::parse(&no_grid).unwrap();
        assert!(parsed.resolve().is_err());

        let wrong_axis = SAMPLE.replace("field = \"tau\"", "field = \"e2\"");
        let parsed = SweepFile::parse(&wrong_axis).unwrap();
        assert!(parsed.resolve().is_err());
    }
}
