//! Preset experiments and their output files.

use std::fs;
use std::path::{Path, PathBuf};

use pseudosym::composition::{coefficient_arguments, recursive_family};
use pseudosym::diagnostics::{
    accumulated_roundoff, determinant_fit, energy_error_series, final_energy_error, integrate,
    matrix_defect_report, order_slope, propagate, secular_drift_rate, signed_energy_error_series,
    successive_errors, sweep, symmetry_matrix_fit, truncation_matrix_fit,
    windowed_power_law_fit, LeadingTerm, SweepPoint,
};
use pseudosym::exec::Execution;
use pseudosym::problems::{
    ho_exact, CglProblem, CglState, FisherProblem, HarmonicOscillator, HoMatrix, KeplerProblem,
    SplitProblem,
};
use pseudosym::spectral::SpectralField;
use pseudosym::{FlowMap, OrderBound, C64};
use serde::Serialize;

use crate::config::{BaseChoice, ExperimentConfig, MethodSpec, Preset, ProblemKind};
use crate::error::CliError;
use crate::table::{Cell, Failure, ResultTable};

/// Relative energy errors below this are roundoff.
pub const ENERGY_FLOOR: f64 = 1e-13;

/// Floor below which matrix entries of a method are treated as roundoff.
pub const MATRIX_FLOOR: f64 = 1e-13;

/// Oscillation cycles averaged at each end of a run for the drift rate.
pub const DRIFT_CYCLES: usize = 10;

/// Points kept per (method, τ) in energy-series tables.
pub const SERIES_POINTS: usize = 500;

/// Columns shared by convergence tables.
pub const CONVERGENCE_SCHEMA: [&str; 7] =
    ["problem", "method", "level", "tau", "E_tau", "slope", "samples"];

/// Everything a preset produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    /// The main table comes first; its file is named after the preset.
    pub tables: Vec<ResultTable>,
    /// `(file stem, "x value_re value_im" text)`.
    pub snapshots: Vec<(String, String)>,
    pub error_measure: &'static str,
    pub failures: Vec<Failure>,
    pub cells: usize,
}

impl RunOutput {
    pub fn main_table(&self) -> &ResultTable {
        &self.tables[0]
    }

    /// True when the run integrated something and every cell failed with a
    /// singularity.
    pub fn all_cells_singular(&self) -> bool {
        self.cells > 0 && self.failures.len() == self.cells && self.failures.iter().all(|f| f.singular)
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    artifact: &'static str,
    version: &'static str,
    precision: &'static str,
    config: &'a ExperimentConfig,
    error_measure: &'a str,
    files: Vec<String>,
    failures: &'a [Failure],
}

/// Writes every table, snapshot and the JSON sidecar into `dir`. Returns
/// the paths written, sidecar last.
pub fn write_output(output: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for table in &output.tables {
        let path = dir.join(format!("{}.csv", table.name));
        table.emit(&path)?;
        written.push(path);
    }
    for (stem, text) in &output.snapshots {
        let path = dir.join(format!("{stem}.txt"));
        fs::write(&path, text)?;
        written.push(path);
    }
    let files = written
        .iter()
        .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
        .collect();
    let sidecar = Sidecar {
        artifact: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        precision: "f64",
        config: &output.config,
        error_measure: output.error_measure,
        files,
        failures: &output.failures,
    };
    let mut json = serde_json::to_string_pretty(&sidecar)?;
    json.push('\n');
    let path = dir.join(format!("{}.json", output.config.preset.name()));
    fs::write(&path, json)?;
    written.push(path);
    Ok(written)
}

/// Runs a validated configuration.
pub fn run(config: &ExperimentConfig, exec: Execution) -> Result<RunOutput, CliError> {
    config.validate()?;
    match config.preset {
        Preset::HoTable1 => ho_table(config),
        Preset::HoEnergy | Preset::KeplerEnergy => energy_run(config, exec),
        Preset::KeplerOrder | Preset::FisherOrder | Preset::CglOrder => convergence_run(config, exec),
        Preset::CoeffAudit => coefficient_audit(config),
    }
}

fn build_problem(config: &ExperimentConfig) -> Result<Box<dyn SplitProblem>, CliError> {
    let n = config.grid_points.unwrap_or(0);
    Ok(match config.problem {
        ProblemKind::Harmonic => Box::new(HarmonicOscillator::default()),
        ProblemKind::Kepler => Box::new(KeplerProblem::new(config.problem_params.e)?),
        ProblemKind::Fisher => Box::new(FisherProblem::new(n)?),
        ProblemKind::Cgl => Box::new(CglProblem::new(n, config.problem_params.cgl())?),
    })
}

/// Flows for every method of the run, in order.
fn build_methods(
    config: &ExperimentConfig,
    problem: &dyn SplitProblem,
) -> Result<Vec<(MethodSpec, FlowMap)>, CliError> {
    let specs = config.methods();
    let mut families: Vec<(BaseChoice, Vec<FlowMap>)> = Vec::new();
    for spec in &specs {
        if families.iter().any(|(b, _)| *b == spec.base) {
            continue;
        }
        let deepest = specs.iter().filter(|s| s.base == spec.base).map(|s| s.level).max().unwrap_or(0);
        let basic = spec.base.method().build(problem);
        let mut flows = vec![basic.clone()];
        if deepest > 0 {
            flows.extend(recursive_family(&basic, deepest)?.levels);
        }
        families.push((spec.base, flows));
    }
    Ok(specs
        .into_iter()
        .map(|spec| {
            let (_, flows) = families.iter().find(|(b, _)| *b == spec.base).expect("built above");
            (spec, flows[spec.level].clone().with_name(spec.label()))
        })
        .collect())
}

fn failure(spec: &MethodSpec, tau: f64, e: &pseudosym::Error) -> Failure {
    Failure {
        method: spec.label(),
        tau,
        singular: e.is_singularity(),
        message: e.to_string(),
    }
}

fn method_cells(problem: &str, spec: &MethodSpec, tau: f64) -> Vec<Cell> {
    vec![
        Cell::text(problem),
        Cell::text(spec.label()),
        Cell::Int(spec.level as i64),
        Cell::Num(tau),
    ]
}

fn convergence_run(config: &ExperimentConfig, exec: Execution) -> Result<RunOutput, CliError> {
    let problem = build_problem(config)?;
    let methods = build_methods(config, problem.as_ref())?;
    let taus = &config.tau_list;
    let x0 = problem.initial_state();
    let scale = x0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let counts = config.step_counts()?;
    let (error_measure, floors): (&str, Vec<f64>) = match config.problem {
        ProblemKind::Kepler => ("relative energy error at t_final", vec![ENERGY_FLOOR; taus.len()]),
        _ => (
            "successive error sup|u_tau - u_tau/2| at t_final",
            // Roundoff of the fine run dominates.
            counts.iter().map(|&n| accumulated_roundoff(scale, 2 * n)).collect(),
        ),
    };

    let results: Vec<Vec<SweepPoint>> = exec.map(&methods, |(_, flow)| match config.problem {
        ProblemKind::Kepler => sweep(taus, exec, |tau| {
            final_energy_error(problem.as_ref(), flow, tau, config.t_final)
        }),
        _ => successive_errors(problem.as_ref(), flow, taus, config.t_final, exec),
    });

    let mut table = ResultTable::new(config.preset.name(), &CONVERGENCE_SCHEMA);
    let mut failures = Vec::new();
    for ((spec, _), points) in methods.iter().zip(&results) {
        let errors: Vec<f64> = points
            .iter()
            .map(|p| match &p.value {
                Ok(v) => *v,
                Err(e) => {
                    failures.push(failure(spec, p.tau, e));
                    f64::NAN
                }
            })
            .collect();
        let point_taus: Vec<f64> = points.iter().map(|p| p.tau).collect();
        let fit = order_slope(&point_taus, &errors, &floors)?;
        for (tau, err) in point_taus.iter().zip(&errors) {
            let mut row = method_cells(problem.name(), spec, *tau);
            row.push(Cell::Num(*err));
            row.push(Cell::maybe(fit.map(|f| f.exponent)));
            row.push(Cell::Int(fit.map_or(0, |f| f.samples as i64)));
            table.push(row);
        }
    }

    let snapshots = if config.problem.is_pde() {
        pde_snapshot(config, problem.as_ref(), &methods[0].1)?
    } else {
        Vec::new()
    };
    Ok(RunOutput {
        config: config.clone(),
        tables: vec![table],
        snapshots,
        error_measure,
        failures,
        cells: methods.len() * taus.len(),
    })
}

/// Final field of `method` at the smallest step.
fn pde_snapshot(
    config: &ExperimentConfig,
    problem: &dyn SplitProblem,
    method: &FlowMap,
) -> Result<Vec<(String, String)>, CliError> {
    let tau = *config.tau_list.last().expect("validated non-empty");
    let n = *config.step_counts()?.last().expect("validated non-empty");
    let Ok(x) = propagate(method, &problem.initial_state(), tau, n) else {
        return Ok(Vec::new());
    };
    let field = match config.problem {
        ProblemKind::Fisher => {
            let fisher = FisherProblem::new(config.grid_points.unwrap_or(0))?;
            SpectralField::from_real(fisher.grid(), &x)?
        }
        _ => {
            let cgl = CglProblem::new(config.grid_points.unwrap_or(0), config.problem_params.cgl())?;
            let flat: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
            CglState::from_flat(cgl.grid(), &flat)?.u()
        }
    };
    let mut text = Vec::new();
    field.write_snapshot(&mut text)?;
    let stem = format!("{}-snapshot-{}", config.preset.name(), method.name());
    Ok(vec![(stem, String::from_utf8(text).expect("ascii"))])
}

fn ho_table(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let ho = HarmonicOscillator::default();
    let methods = build_methods(config, &ho)?;
    let taus = &config.tau_list;
    let mut main = ResultTable::new(
        config.preset.name(),
        &[
            "problem",
            "method",
            "level",
            "tau",
            "E_tau",
            "slope",
            "samples",
            "symmetry_defect",
            "symplecticity_defect",
        ],
    );
    let mut terms = ResultTable::new(
        format!("{}-terms", config.preset.name()),
        &["method", "level", "quantity", "entry", "order", "exponent", "coefficient", "samples"],
    );
    for (spec, flow) in &methods {
        let truncation: Vec<f64> = taus
            .iter()
            .map(|&t| {
                let m = HoMatrix::of_flow(flow, C64::new(t, 0.0))?;
                Ok((ho_exact(C64::new(t, 0.0)) - m).max_abs())
            })
            .collect::<Result<_, pseudosym::Error>>()?;
        let (ft, fe): (Vec<f64>, Vec<f64>) = taus
            .iter()
            .zip(&truncation)
            .filter(|(_, e)| **e > MATRIX_FLOOR)
            .map(|(t, e)| (*t, *e))
            .unzip();
        let fit = if ft.len() >= 3 { Some(windowed_power_law_fit(&ft, &fe)?) } else { None };
        let defects = matrix_defect_report(flow, taus, MATRIX_FLOOR)?;
        for (j, &tau) in taus.iter().enumerate() {
            let mut row = method_cells("harmonic", spec, tau);
            row.push(Cell::Num(truncation[j]));
            row.push(Cell::maybe(fit.map(|f| f.exponent)));
            row.push(Cell::Int(fit.map_or(0, |f| f.samples as i64)));
            row.push(Cell::Num(defects.symmetry_defect[j]));
            row.push(Cell::Num(defects.symplecticity_defect[j]));
            main.push(row);
        }

        let mut add = |quantity: &str, entry: String, term: &LeadingTerm| {
            let (order, exponent, coefficient, samples) = match term {
                LeadingTerm::Term {
                    order,
                    exponent,
                    coefficient,
                    samples,
                } => (Cell::Int(*order as i64), *exponent, *coefficient, *samples as i64),
                LeadingTerm::Zero => (Cell::text("none"), f64::NAN, f64::NAN, 0),
            };
            terms.push(vec![
                Cell::text(spec.label()),
                Cell::Int(spec.level as i64),
                Cell::text(quantity),
                Cell::Text(entry),
                order,
                Cell::Num(exponent),
                Cell::Num(coefficient),
                Cell::Int(samples),
            ]);
        };
        let truncation_terms = truncation_matrix_fit(flow, taus, MATRIX_FLOOR)?;
        let symmetry_terms = symmetry_matrix_fit(flow, taus, MATRIX_FLOOR)?;
        for (name, m) in [("truncation", truncation_terms), ("symmetry", symmetry_terms)] {
            for (i, row) in m.iter().enumerate() {
                for (j, term) in row.iter().enumerate() {
                    add(name, format!("{}{}", i + 1, j + 1), term);
                }
            }
        }
        add("determinant", "det".into(), &determinant_fit(flow, taus, MATRIX_FLOOR)?);
    }
    Ok(RunOutput {
        config: config.clone(),
        tables: vec![main, terms],
        snapshots: Vec::new(),
        error_measure: "max entry of exact minus method matrix at one step",
        failures: Vec::new(),
        cells: 0,
    })
}

struct EnergyCell {
    max_error: f64,
    final_error: f64,
    drift_rate: f64,
    series: Vec<(f64, f64)>,
}

fn energy_cell(
    problem: &dyn SplitProblem,
    flow: &FlowMap,
    tau: f64,
    n: usize,
) -> pseudosym::Result<EnergyCell> {
    let energy = |x: &[f64]| problem.energy(x).unwrap_or(f64::NAN);
    let trajectory = integrate(flow, &problem.initial_state(), tau, n, None)?;
    let signed = signed_energy_error_series(&trajectory, &energy)?;
    let errors = energy_error_series(&trajectory, &energy)?;
    let drift_rate = secular_drift_rate(&trajectory, &signed, DRIFT_CYCLES)?;
    let stride = n.div_ceil(SERIES_POINTS).max(1);
    let series = (0..trajectory.len())
        .step_by(stride)
        .chain(std::iter::once(n).filter(|k| k % stride != 0))
        .map(|k| (trajectory.times[k], errors[k]))
        .collect();
    Ok(EnergyCell {
        max_error: errors.iter().copied().fold(0.0, f64::max),
        final_error: errors[n],
        drift_rate,
        series,
    })
}

fn energy_run(config: &ExperimentConfig, exec: Execution) -> Result<RunOutput, CliError> {
    let problem = build_problem(config)?;
    let methods = build_methods(config, problem.as_ref())?;
    let taus = &config.tau_list;
    let counts = config.step_counts()?;
    let cells: Vec<(usize, usize)> = (0..methods.len())
        .flat_map(|m| (0..taus.len()).map(move |t| (m, t)))
        .collect();
    let results = exec.map(&cells, |&(m, t)| {
        energy_cell(problem.as_ref(), &methods[m].1, taus[t], counts[t])
    });

    let mut main = ResultTable::new(
        config.preset.name(),
        &[
            "problem",
            "method",
            "level",
            "tau",
            "E_tau",
            "final_energy_error",
            "drift_rate",
            "slope",
            "samples",
        ],
    );
    let mut series = ResultTable::new(
        format!("{}-series", config.preset.name()),
        &["method", "tau", "time", "energy_error"],
    );
    let mut failures = Vec::new();
    for (m, (spec, _)) in methods.iter().enumerate() {
        let mine: Vec<&pseudosym::Result<EnergyCell>> =
            (0..taus.len()).map(|t| &results[m * taus.len() + t]).collect();
        // The drift rate is fitted once it clears the drift that roundoff
        // alone would produce over the run.
        let rates: Vec<f64> = mine
            .iter()
            .map(|r| r.as_ref().map_or(f64::NAN, |c| c.drift_rate.abs()))
            .collect();
        let floors: Vec<f64> = counts
            .iter()
            .map(|&n| accumulated_roundoff(1.0, n) / config.t_final)
            .collect();
        // Symplectic methods have no secular drift to fit.
        let drifts = methods[m].1.meta().pseudo_symplecticity_order != OrderBound::Infinite;
        let fit = if drifts && taus.len() >= 2 { order_slope(taus, &rates, &floors)? } else { None };
        for (t, cell) in mine.iter().enumerate() {
            let mut row = method_cells(problem.name(), spec, taus[t]);
            match cell {
                Ok(c) => {
                    row.extend([Cell::Num(c.max_error), Cell::Num(c.final_error), Cell::Num(c.drift_rate)]);
                    for (time, e) in &c.series {
                        series.push(vec![
                            Cell::text(spec.label()),
                            Cell::Num(taus[t]),
                            Cell::Num(*time),
                            Cell::Num(*e),
                        ]);
                    }
                }
                Err(e) => {
                    failures.push(failure(spec, taus[t], e));
                    row.extend([Cell::Num(f64::NAN), Cell::Num(f64::NAN), Cell::Num(f64::NAN)]);
                }
            }
            row.push(Cell::maybe(fit.map(|f| f.exponent)));
            row.push(Cell::Int(fit.map_or(0, |f| f.samples as i64)));
            main.push(row);
        }
    }
    Ok(RunOutput {
        config: config.clone(),
        tables: vec![main, series],
        snapshots: Vec::new(),
        error_measure: "max relative energy error over the run; slope fits |drift_rate|",
        failures,
        cells: cells.len(),
    })
}

fn coefficient_audit(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let ho = HarmonicOscillator::default();
    let bases: Vec<(BaseChoice, usize)> = match config.base_method {
        Some(b) => vec![(b, config.levels.unwrap_or(4))],
        None => vec![
            (BaseChoice::Strang, config.levels.unwrap_or(3)),
            (BaseChoice::S4sim, config.levels.unwrap_or(4)),
        ],
    };
    let mut table = ResultTable::new(
        config.preset.name(),
        &[
            "base",
            "level",
            "gamma_re",
            "gamma_im",
            "max_argument",
            "max_argument_over_half_pi",
            "positive_real_parts",
        ],
    );
    for (base, levels) in bases {
        let basic = base.method().build(&ho);
        for level in 1..=levels {
            let family = recursive_family(&basic, level)?;
            let (arg, positive) = coefficient_arguments(&family);
            let gamma = family.level_gammas[level - 1];
            table.push(vec![
                Cell::text(base.method().label()),
                Cell::Int(level as i64),
                Cell::Num(gamma.re),
                Cell::Num(gamma.im),
                Cell::Num(arg),
                Cell::Num(arg / std::f64::consts::FRAC_PI_2),
                Cell::Flag(positive),
            ]);
        }
    }
    Ok(RunOutput {
        config: config.clone(),
        tables: vec![table],
        snapshots: Vec::new(),
        error_measure: "largest |arg| of the sub-step coefficients seen by the basic flows",
        failures: Vec::new(),
        cells: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn audit_rows() {
        let out = run(&Preset::CoeffAudit.defaults(false), Execution::Sequential).unwrap();
        let t = out.main_table();
        assert_eq!(t.rows.len(), 7);
        let ratio = t.rows[2][5].as_f64().unwrap();
        assert!((ratio - 71.0 / 105.0).abs() < 1e-12);
    }

    #[test]
    fn methods_are_named_and_ordered() {
        let config = Preset::FisherOrder.defaults(false);
        let fisher = FisherProblem::new(16).unwrap();
        let methods = build_methods(&config, &fisher).unwrap();
        let names: Vec<&str> = methods.iter().map(|(_, f)| f.name()).collect();
        assert_eq!(names[0], "strang");
        assert_eq!(names[3], "R3(strang)");
        assert_eq!(methods[6].1.meta().order, 8);
    }
}
