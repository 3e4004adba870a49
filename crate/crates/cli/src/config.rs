//! Experiment configuration: preset defaults, TOML overrides and validation.

use std::fmt;
use std::str::FromStr;

use pseudosym::diagnostics::STEP_COUNT_TOLERANCE;
use pseudosym::problems::{BaseMethod, CglParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Named experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    #[serde(rename = "ho-table1")]
    HoTable1,
    HoEnergy,
    KeplerOrder,
    KeplerEnergy,
    FisherOrder,
    CglOrder,
    CoeffAudit,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::HoTable1,
        Preset::HoEnergy,
        Preset::KeplerOrder,
        Preset::KeplerEnergy,
        Preset::FisherOrder,
        Preset::CglOrder,
        Preset::CoeffAudit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::HoTable1 => "ho-table1",
            Preset::HoEnergy => "ho-energy",
            Preset::KeplerOrder => "kepler-order",
            Preset::KeplerEnergy => "kepler-energy",
            Preset::FisherOrder => "fisher-order",
            Preset::CglOrder => "cgl-order",
            Preset::CoeffAudit => "coeff-audit",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::HoTable1 => "harmonic oscillator leading error, symmetry and determinant terms",
            Preset::HoEnergy => "harmonic oscillator energy error along long integrations",
            Preset::KeplerOrder => "Kepler final relative energy error against the step size",
            Preset::KeplerEnergy => "Kepler relative energy error along a long integration",
            Preset::FisherOrder => "Fisher reaction-diffusion successive errors",
            Preset::CglOrder => "complex Ginzburg-Landau successive errors",
            Preset::CoeffAudit => "arguments of every sub-step coefficient in each family",
        }
    }

    /// Default configuration; `full_scale` selects the long-horizon values.
    pub fn defaults(self, full_scale: bool) -> ExperimentConfig {
        let dyadic = |start: f64, n: i32| (0..n).map(|j| start * 0.5f64.powi(j)).collect();
        // Successive-error runs at full scale use τ_j = 0.1/2^j, j = 1..7.
        let full_taus: Vec<f64> = (1..=7).map(|j| 0.1 * 0.5f64.powi(j)).collect();
        let base = ExperimentConfig {
            preset: self,
            problem: ProblemKind::Harmonic,
            base_method: None,
            levels: None,
            tau_list: Vec::new(),
            t_final: 1.0,
            grid_points: None,
            problem_params: ProblemParams::default(),
            output_path: "results".into(),
        };
        match self {
            Preset::HoTable1 => ExperimentConfig {
                base_method: Some(BaseChoice::Strang),
                levels: Some(3),
                tau_list: dyadic(0.8, 6),
                t_final: 0.8,
                ..base
            },
            Preset::HoEnergy => ExperimentConfig {
                base_method: Some(BaseChoice::Strang),
                levels: Some(2),
                tau_list: vec![0.2, 0.1, 0.05],
                t_final: if full_scale { 1e4 } else { 1e3 },
                ..base
            },
            Preset::KeplerOrder => ExperimentConfig {
                problem: ProblemKind::Kepler,
                base_method: Some(BaseChoice::Strang),
                levels: Some(3),
                tau_list: dyadic(0.08, 6),
                t_final: 20.0,
                ..base
            },
            Preset::KeplerEnergy => ExperimentConfig {
                problem: ProblemKind::Kepler,
                base_method: Some(BaseChoice::Strang),
                levels: Some(3),
                tau_list: vec![0.05],
                t_final: if full_scale { 1e4 } else { 1e3 },
                ..base
            },
            Preset::FisherOrder => ExperimentConfig {
                problem: ProblemKind::Fisher,
                tau_list: if full_scale { full_taus } else { dyadic(0.05, 5) },
                t_final: if full_scale { 10.0 } else { 1.0 },
                grid_points: Some(128),
                ..base
            },
            Preset::CglOrder => ExperimentConfig {
                problem: ProblemKind::Cgl,
                tau_list: if full_scale { full_taus } else { dyadic(0.05, 5) },
                t_final: if full_scale { 10.0 } else { 1.0 },
                grid_points: Some(512),
                ..base
            },
            Preset::CoeffAudit => ExperimentConfig {
                problem: ProblemKind::Harmonic,
                ..base
            },
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                CliError::Validation(format!(
                    "unknown preset '{s}'; known presets: {}",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Harmonic,
    Kepler,
    Fisher,
    Cgl,
}

impl ProblemKind {
    pub fn is_pde(self) -> bool {
        matches!(self, ProblemKind::Fisher | ProblemKind::Cgl)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseChoice {
    Strang,
    S4sim,
}

impl BaseChoice {
    pub fn method(self) -> BaseMethod {
        match self {
            BaseChoice::Strang => BaseMethod::Strang,
            BaseChoice::S4sim => BaseMethod::S4Sim,
        }
    }

    /// Deepest level whose order 64-bit arithmetic still resolves.
    pub fn default_levels(self) -> usize {
        match self {
            BaseChoice::Strang => 3,
            BaseChoice::S4sim => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    /// Kepler eccentricity.
    pub e: f64,
    pub c1: f64,
    pub c3: f64,
    pub eps: f64,
}

impl Default for ProblemParams {
    fn default() -> Self {
        let cgl = CglParams::default();
        ProblemParams {
            e: 0.6,
            c1: cgl.c1,
            c3: cgl.c3,
            eps: cgl.eps,
        }
    }
}

impl ProblemParams {
    pub fn cgl(&self) -> CglParams {
        CglParams {
            c1: self.c1,
            c3: self.c3,
            eps: self.eps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub problem: ProblemKind,
    /// `None` runs the default method set: Strang levels 0..=3 and s4sim
    /// levels 0..=2.
    pub base_method: Option<BaseChoice>,
    pub levels: Option<usize>,
    pub tau_list: Vec<f64>,
    pub t_final: f64,
    pub grid_points: Option<usize>,
    pub problem_params: ProblemParams,
    pub output_path: String,
}

/// A method of a run: the basic method (level 0) or a family level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodSpec {
    pub base: BaseChoice,
    pub level: usize,
}

impl MethodSpec {
    pub fn label(&self) -> String {
        let base = self.base.method().label();
        if self.level == 0 {
            base.to_string()
        } else {
            format!("R{}({base})", self.level)
        }
    }
}

impl ExperimentConfig {
    /// Methods in output order.
    pub fn methods(&self) -> Vec<MethodSpec> {
        let bases: Vec<(BaseChoice, usize)> = match self.base_method {
            Some(b) => vec![(b, self.levels.unwrap_or(b.default_levels()))],
            None => [BaseChoice::Strang, BaseChoice::S4sim]
                .into_iter()
                .map(|b| (b, self.levels.unwrap_or(b.default_levels())))
                .collect(),
        };
        let first = if self.preset == Preset::HoTable1 { 1 } else { 0 };
        bases
            .into_iter()
            .flat_map(|(base, levels)| (first..=levels).map(move |level| MethodSpec { base, level }))
            .collect()
    }

    /// Number of steps of each size in `tau_list`.
    pub fn step_counts(&self) -> Result<Vec<usize>, CliError> {
        self.tau_list
            .iter()
            .map(|&tau| {
                let ratio = self.t_final / tau;
                let n = ratio.round();
                if n < 1.0 || (ratio - n).abs() > STEP_COUNT_TOLERANCE * ratio {
                    Err(field_error(
                        "tau_list",
                        format!("t_final/tau = {ratio} is not an integer for tau = {tau}"),
                    ))
                } else {
                    Ok(n as usize)
                }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(bad) = self.tau_list.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(field_error("tau_list", format!("step sizes must be positive, got {bad}")));
        }
        if self.tau_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(field_error("tau_list", "must be strictly decreasing".into()));
        }
        if self.preset != Preset::CoeffAudit && self.tau_list.is_empty() {
            return Err(field_error("tau_list", "at least one step size is required".into()));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(field_error("t_final", format!("must be positive, got {}", self.t_final)));
        }
        if let Some(levels) = self.levels {
            if !(1..=4).contains(&levels) {
                return Err(field_error("levels", format!("must be in 1..=4, got {levels}")));
            }
        }
        match (self.problem.is_pde(), self.grid_points) {
            (true, Some(n)) if n < 2 || !n.is_power_of_two() => {
                return Err(field_error(
                    "grid_points",
                    format!("must be a power of two, got {n}"),
                ))
            }
            (true, None) => return Err(field_error("grid_points", "required for PDE problems".into())),
            (false, Some(_)) => {
                return Err(field_error("grid_points", "only applies to PDE problems".into()))
            }
            _ => {}
        }
        let e = self.problem_params.e;
        if !(0.0..1.0).contains(&e) {
            return Err(field_error("problem_params.e", format!("must be in [0, 1), got {e}")));
        }
        if self.output_path.is_empty() {
            return Err(field_error("output_path", "must not be empty".into()));
        }
        self.step_counts()?;
        Ok(())
    }
}

fn field_error(field: &str, message: String) -> CliError {
    CliError::Validation(format!("{field}: {message}"))
}

/// Keys accepted in a configuration document.
const TOP_KEYS: [&str; 9] = [
    "preset",
    "problem",
    "base_method",
    "levels",
    "tau_list",
    "t_final",
    "grid_points",
    "problem_params",
    "output_path",
];
const PARAM_KEYS: [&str; 4] = ["e", "c1", "c3", "eps"];

#[derive(Debug, Default, Deserialize)]
struct RawParams {
    e: Option<f64>,
    c1: Option<f64>,
    c3: Option<f64>,
    eps: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
struct RawConfig {
    preset: Option<Preset>,
    problem: Option<ProblemKind>,
    base_method: Option<BaseChoice>,
    levels: Option<usize>,
    tau_list: Option<Vec<f64>>,
    t_final: Option<f64>,
    grid_points: Option<usize>,
    problem_params: Option<RawParams>,
    output_path: Option<String>,
}

fn unknown_keys(doc: &toml::Table) -> Vec<String> {
    let mut unknown = Vec::new();
    for (key, value) in doc {
        if !TOP_KEYS.contains(&key.as_str()) {
            unknown.push(key.clone());
        } else if key == "problem_params" {
            if let Some(table) = value.as_table() {
                unknown.extend(
                    table
                        .keys()
                        .filter(|k| !PARAM_KEYS.contains(&k.as_str()))
                        .map(|k| format!("problem_params.{k}")),
                );
            }
        }
    }
    unknown
}

/// Parses a TOML document into a validated configuration.
///
/// The preset comes from `preset` (argument) or from the document's own
/// `preset` key; when both are given they must agree. Missing fields take the
/// preset's defaults.
pub fn parse_config(
    text: &str,
    preset: Option<Preset>,
    full_scale: bool,
) -> Result<ExperimentConfig, CliError> {
    let doc: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Validation(format!("malformed document: {e}")))?;
    let unknown = unknown_keys(&doc);
    if !unknown.is_empty() {
        return Err(CliError::Validation(format!(
            "unknown keys: {}",
            unknown.join(", ")
        )));
    }
    let raw: RawConfig = toml::Value::Table(doc)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Validation(e.message().to_string()))?;
    let preset = match (preset, raw.preset) {
        (Some(a), Some(b)) if a != b => {
            return Err(field_error(
                "preset",
                format!("document names '{b}' but '{a}' was requested"),
            ))
        }
        (Some(p), _) | (None, Some(p)) => p,
        (None, None) => {
            return Err(field_error("preset", "no preset given".into()));
        }
    };
    let mut config = preset.defaults(full_scale);
    if let Some(problem) = raw.problem {
        config.problem = problem;
    }
    if raw.base_method.is_some() {
        config.base_method = raw.base_method;
    }
    if raw.levels.is_some() {
        config.levels = raw.levels;
    }
    if let Some(taus) = raw.tau_list {
        config.tau_list = taus;
    }
    if let Some(t) = raw.t_final {
        config.t_final = t;
    }
    if raw.grid_points.is_some() {
        config.grid_points = raw.grid_points;
    }
    if let Some(path) = raw.output_path {
        config.output_path = path;
    }
    if let Some(p) = raw.problem_params {
        let params = &mut config.problem_params;
        params.e = p.e.unwrap_or(params.e);
        params.c1 = p.c1.unwrap_or(params.c1);
        params.c3 = p.c3.unwrap_or(params.c3);
        params.eps = p.eps.unwrap_or(params.eps);
    }
    config.validate()?;
    Ok(config)
}
