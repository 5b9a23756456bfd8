//! The three experiments: a single solve, a refinement sweep and a blow-up scan.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;
use twonorm::engine::SolveError;
use twonorm::oracles::OracleError;
use twonorm::{
    burgers_characteristics, continuation_solve, dense_reference, Config, ProblemInstance, Report,
    Termination,
};

use crate::artifacts::{csv_bytes, fmt_real, write_atomic, write_solve_artifacts, StateValues};
use crate::config::{ConfigError, EmitFlags, InstanceConfig, RunConfig};
use crate::registry::Scenario;
use crate::ExitStatus;

/// Residual tolerance for the characteristics oracle.
const ORACLE_TOL: f64 = 1e-13;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver failed: {0}")]
    Solve(#[from] SolveError),
    #[error("oracle failed: {0}")]
    Oracle(#[from] OracleError),
    #[error("cannot write artifacts to {dir}: {source}")]
    Io {
        dir: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Unsupported(String),
    #[error("{label} stopped before the horizon ({termination})")]
    Incomplete { label: String, termination: String },
}

fn io_error(dir: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        dir: dir.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: ExitStatus,
    pub report: Report,
    pub output_dir: PathBuf,
}

enum FinalState {
    Values(Arc<Vec<f64>>),
    Grid(Arc<twonorm::Grid>),
}

impl FinalState {
    fn values(&self) -> &[f64] {
        match self {
            FinalState::Values(v) => v,
            FinalState::Grid(g) => g.values(),
        }
    }
}

struct Case {
    report: Report,
    last: FinalState,
}

fn solve_generic<I>(
    name: &str,
    instance: &I,
    x0: I::State,
    solver: &Config,
    t_max: f64,
    out: Option<(&Path, &EmitFlags)>,
) -> Result<(Report, Arc<I::State>), RunError>
where
    I: ProblemInstance<f64>,
    I::State: StateValues,
{
    let x0 = instance.element(x0);
    let (segments, report) = continuation_solve(instance, x0.clone(), t_max, solver)?;
    if let Some((dir, emit)) = out {
        write_solve_artifacts(dir, emit, name, &segments, &report).map_err(io_error(dir))?;
    }
    let last = segments
        .last()
        .map_or_else(|| x0.handle().clone(), |s| s.last().handle().clone());
    Ok((report, last))
}

fn solve_case(
    instance: &InstanceConfig,
    solver: &Config,
    t_max: f64,
    out: Option<(&Path, &EmitFlags)>,
) -> Result<Case, RunError> {
    let name = instance.name();
    match instance.build() {
        Scenario::Ode { instance, x0 } => {
            let (report, last) = solve_generic(name, &instance, x0, solver, t_max, out)?;
            Ok(Case {
                report,
                last: FinalState::Values(last),
            })
        }
        Scenario::Transport { instance, u0, .. } => {
            let (report, last) = solve_generic(name, &instance, u0, solver, t_max, out)?;
            Ok(Case {
                report,
                last: FinalState::Grid(last),
            })
        }
    }
}

/// Solves the configured problem and writes its artifacts to the output directory.
pub fn run_solve(cfg: &RunConfig) -> Result<SolveOutcome, RunError> {
    let dir = cfg.resolved_output_dir();
    let case = solve_case(
        &cfg.instance,
        &cfg.solver,
        cfg.t_max,
        Some((&dir, &cfg.emit)),
    )?;
    Ok(SolveOutcome {
        status: ExitStatus::from_termination(&case.report.termination),
        report: case.report,
        output_dir: dir,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub level: usize,
    pub error: f64,
    /// `log2(err_{k-1} / err_k)`; `None` on the first level or when either error is zero.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub output_dir: PathBuf,
}

pub fn observed_orders(errors: &[f64]) -> Vec<Option<f64>> {
    (0..errors.len())
        .map(|k| {
            if k == 0 {
                return None;
            }
            let (coarse, fine) = (errors[k - 1], errors[k]);
            (coarse > 0.0 && fine > 0.0).then(|| (coarse / fine).log2())
        })
        .collect()
}

fn sup_error(
    values: &[f64],
    exact: impl Fn(usize) -> Result<f64, RunError>,
) -> Result<f64, RunError> {
    values
        .iter()
        .enumerate()
        .try_fold(0.0f64, |acc, (i, v)| Ok(acc.max((v - exact(i)?).abs())))
}

/// Error at `t_max` of one refinement level against the instance's oracle.
fn level_error(instance: &InstanceConfig, case: &Case, t_max: f64) -> Result<f64, RunError> {
    let values = case.last.values();
    match (instance, instance.build()) {
        (InstanceConfig::Advect(p), Scenario::Transport { profile, .. }) => {
            if p.speed_variation != 0.0 {
                return Err(RunError::Unsupported(
                    "transport.advect has a closed form only with speed_variation = 0".into(),
                ));
            }
            let dx = p.length / p.n as f64;
            let decay = (-p.damping * t_max).exp();
            sup_error(values, |i| {
                Ok(decay * profile.value(i as f64 * dx + p.speed * t_max))
            })
        }
        (InstanceConfig::Burgers(p), Scenario::Transport { profile, .. }) => {
            let dx = p.length / p.n as f64;
            sup_error(values, |i| {
                Ok(burgers_characteristics(
                    &profile,
                    t_max,
                    i as f64 * dx,
                    ORACLE_TOL,
                )?)
            })
        }
        (_, Scenario::Ode { instance: ode, x0 }) => {
            let reference = dense_reference(&ode.spec, &x0, t_max, 1e-4 * t_max)?;
            sup_error(values, |i| Ok(reference.final_state()[i]))
        }
        _ => unreachable!("scenario kind follows the config variant"),
    }
}

fn require_pre_blowup(instance: &InstanceConfig, t_max: f64) -> Result<(), RunError> {
    match instance.oracle_blowup_time()? {
        Some(t_star) if t_max >= t_star => Err(RunError::Unsupported(format!(
            "{} has no oracle at t_max = {t_max}: blow-up at {t_star}",
            instance.name()
        ))),
        _ => Ok(()),
    }
}

/// Solves at `levels` refinements (grid doubling for transport, substep halving for ODEs),
/// compares each to the oracle at `t_max` and writes `sweep.csv`.
pub fn run_sweep(cfg: &RunConfig, levels: usize) -> Result<SweepOutcome, RunError> {
    if levels == 0 {
        return Err(RunError::Unsupported(
            "a sweep needs at least one level".into(),
        ));
    }
    require_pre_blowup(&cfg.instance, cfg.t_max)?;
    let dir = cfg.resolved_output_dir();
    let errors = (0..levels)
        .into_par_iter()
        .map(|k| {
            let factor = 1usize << k;
            let mut solver = cfg.solver.clone();
            let instance = match cfg.instance.grid_size() {
                Some(n) => cfg.instance.with_grid_size(n * factor),
                None => {
                    solver.substeps_per_window *= factor;
                    solver.substep_length = solver.substep_length.map(|h| h / factor as f64);
                    cfg.instance.clone()
                }
            };
            let case_dir = dir.join(format!("level_{k}"));
            let case = solve_case(&instance, &solver, cfg.t_max, Some((&case_dir, &cfg.emit)))?;
            if case.report.termination != Termination::HorizonReached {
                return Err(RunError::Incomplete {
                    label: format!("sweep level {k}"),
                    termination: format!("{:?}", case.report.termination),
                });
            }
            level_error(&instance, &case, cfg.t_max)
        })
        .collect::<Result<Vec<f64>, RunError>>()?;
    let rows: Vec<SweepRow> = errors
        .iter()
        .zip(observed_orders(&errors))
        .enumerate()
        .map(|(level, (&error, observed_order))| SweepRow {
            level,
            error,
            observed_order,
        })
        .collect();
    let bytes = csv_bytes(
        &["level", "error", "observed_order"],
        rows.iter().map(|r| {
            vec![
                r.level.to_string(),
                fmt_real(r.error),
                r.observed_order.map_or_else(|| "na".into(), fmt_real),
            ]
        }),
    )
    .map_err(io_error(&dir))?;
    write_atomic(&dir, "sweep.csv", &bytes).map_err(io_error(&dir))?;
    Ok(SweepOutcome {
        rows,
        output_dir: dir,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub amplitude: f64,
    /// `+inf` when the horizon was reached; `None` when the run ended without a verdict.
    pub t_c_estimate: Option<f64>,
    pub oracle_t_star: Option<f64>,
    pub status: ExitStatus,
}

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub rows: Vec<ScanRow>,
    pub output_dir: PathBuf,
}

/// Solves once per amplitude and records the blow-up estimate next to the exact time.
pub fn run_blowup_scan(cfg: &RunConfig, amplitudes: &[f64]) -> Result<ScanOutcome, RunError> {
    if !matches!(
        cfg.instance,
        InstanceConfig::Burgers(_) | InstanceConfig::Riccati(_)
    ) {
        return Err(RunError::Unsupported(format!(
            "blow-up scans need transport.burgers or ode.riccati, not {}",
            cfg.instance.name()
        )));
    }
    if let Some(a) = amplitudes.iter().find(|a| !a.is_finite()) {
        return Err(RunError::Unsupported(format!(
            "amplitude {a} is not finite"
        )));
    }
    let dir = cfg.resolved_output_dir();
    let rows = amplitudes
        .par_iter()
        .enumerate()
        .map(|(k, &amplitude)| {
            let instance = cfg.instance.with_amplitude(amplitude);
            let case_dir = dir.join(format!("amplitude_{k}"));
            let case = solve_case(
                &instance,
                &cfg.solver,
                cfg.t_max,
                Some((&case_dir, &cfg.emit)),
            )?;
            let t_c_estimate = match case.report.termination {
                Termination::HorizonReached => Some(f64::INFINITY),
                ref other => other.t_c_estimate(),
            };
            Ok(ScanRow {
                amplitude,
                t_c_estimate,
                oracle_t_star: instance.oracle_blowup_time()?,
                status: ExitStatus::from_termination(&case.report.termination),
            })
        })
        .collect::<Result<Vec<ScanRow>, RunError>>()?;
    let bytes = csv_bytes(
        &["amplitude", "t_c_estimate", "oracle_T_star"],
        rows.iter().map(|r| {
            vec![
                fmt_real(r.amplitude),
                r.t_c_estimate.map(fmt_real).unwrap_or_default(),
                r.oracle_t_star.map(fmt_real).unwrap_or_default(),
            ]
        }),
    )
    .map_err(io_error(&dir))?;
    write_atomic(&dir, "blowup.csv", &bytes).map_err(io_error(&dir))?;
    Ok(ScanOutcome {
        rows,
        output_dir: dir,
    })
}
