//! Files written by a run: `report.json`, `norms.csv`, `windows.csv`, `trajectory.csv`,
//! `sweep.csv`, `blowup.csv`. All writes are atomic (temporary file, then rename).

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use twonorm::{BlowUpReason, Grid, Report, Termination, TrajectorySegment, WindowReport};

use crate::config::EmitFlags;
use crate::ExitStatus;

/// CSV rendering of a real: `inf` / `-inf` / `nan` for non-finite values, plain decimals in a
/// moderate range and exponent notation otherwise. Always round-trips through `str::parse`.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if x == 0.0 || (1e-4..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Writes `contents` to `dir/name` through a temporary file in the same directory.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(dir.join(name)).map_err(|e| e.error)?;
    Ok(())
}

/// Builds a CSV document in memory from a header and string records.
pub fn csv_bytes<R>(header: &[&str], rows: R) -> std::io::Result<Vec<u8>>
where
    R: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

/// Flat view of a state for `trajectory.csv`.
pub trait StateValues {
    fn values(&self) -> &[f64];
}

impl StateValues for Vec<f64> {
    fn values(&self) -> &[f64] {
        self
    }
}

impl StateValues for Grid {
    fn values(&self) -> &[f64] {
        Grid::values(self)
    }
}

/// Samples of glued segments in time order; each junction appears once.
fn samples<X>(
    segments: &[TrajectorySegment<f64, X>],
) -> impl Iterator<Item = (f64, &twonorm::NormedPairElement<f64, X>)> {
    segments.iter().enumerate().flat_map(|(k, seg)| {
        let skip = usize::from(k > 0);
        seg.times().iter().copied().zip(seg.states()).skip(skip)
    })
}

pub fn norms_csv<X>(segments: &[TrajectorySegment<f64, X>]) -> std::io::Result<Vec<u8>> {
    csv_bytes(
        &["t", "weak_norm", "strong_norm"],
        samples(segments).map(|(t, x)| {
            vec![
                fmt_real(t),
                fmt_real(x.weak_norm()),
                fmt_real(x.strong_norm()),
            ]
        }),
    )
}

pub fn windows_csv(windows: &[WindowReport<f64>]) -> std::io::Result<Vec<u8>> {
    csv_bytes(
        &["t_start", "t_end", "iters", "max_ratio"],
        windows.iter().map(|w| {
            vec![
                fmt_real(w.t_start),
                fmt_real(w.t_end),
                w.picard_iters.to_string(),
                w.max_ratio().map(fmt_real).unwrap_or_default(),
            ]
        }),
    )
}

pub fn trajectory_csv<X: StateValues>(
    segments: &[TrajectorySegment<f64, X>],
) -> std::io::Result<Vec<u8>> {
    let rows = samples(segments).flat_map(|(t, x)| {
        x.state()
            .values()
            .iter()
            .enumerate()
            .map(move |(i, v)| vec![fmt_real(t), i.to_string(), fmt_real(*v)])
    });
    csv_bytes(&["t", "index", "value"], rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReasonDto {
    StrongNormCap,
    WindowCollapse,
    ResolutionLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TerminationDto {
    HorizonReached,
    BlowUpDetected {
        last_strong_norm: f64,
        reason: ReasonDto,
    },
    BudgetExhausted,
    ContractionFailure {
        t: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowDto {
    pub t_start: f64,
    pub t_end: f64,
    pub picard_iters: usize,
    pub attempts: usize,
    pub theta: f64,
    pub cap: f64,
    pub end_strong_norm: f64,
    pub distances: Vec<f64>,
    pub observed_ratios: Vec<f64>,
}

/// Schema of `report.json`.
///
/// `t_c_estimate` is `null` when no finite estimate exists; `t_c_is_infinite` then tells an
/// infinite existence time (horizon reached) from an unknown one (budget or contraction
/// failure).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDto {
    pub instance: String,
    pub exit_code: i32,
    pub termination: TerminationDto,
    pub t_c_estimate: Option<f64>,
    pub t_c_is_infinite: bool,
    pub final_time: f64,
    pub windows: Vec<WindowDto>,
}

impl ReportDto {
    pub fn new(instance: &str, report: &Report) -> Self {
        let termination = match &report.termination {
            Termination::HorizonReached => TerminationDto::HorizonReached,
            Termination::BlowUpDetected {
                last_strong_norm,
                reason,
                ..
            } => TerminationDto::BlowUpDetected {
                last_strong_norm: *last_strong_norm,
                reason: match reason {
                    BlowUpReason::StrongNormCap => ReasonDto::StrongNormCap,
                    BlowUpReason::WindowCollapse => ReasonDto::WindowCollapse,
                    BlowUpReason::ResolutionLimit => ReasonDto::ResolutionLimit,
                },
            },
            Termination::BudgetExhausted => TerminationDto::BudgetExhausted,
            Termination::ContractionFailure { t } => TerminationDto::ContractionFailure { t: *t },
        };
        let windows = report
            .windows
            .iter()
            .map(|w| WindowDto {
                t_start: w.t_start,
                t_end: w.t_end,
                picard_iters: w.picard_iters,
                attempts: w.attempts,
                theta: w.theta,
                cap: w.cap,
                end_strong_norm: w.end_strong_norm,
                distances: w.distances.clone(),
                observed_ratios: w.observed_ratios.clone(),
            })
            .collect();
        Self {
            instance: instance.to_string(),
            exit_code: ExitStatus::from_termination(&report.termination).code(),
            termination,
            t_c_estimate: report.termination.t_c_estimate(),
            t_c_is_infinite: matches!(report.termination, Termination::HorizonReached),
            final_time: report.final_time,
            windows,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Writes the per-solve artifacts selected by `emit` into `dir`.
pub fn write_solve_artifacts<X: StateValues>(
    dir: &Path,
    emit: &EmitFlags,
    instance: &str,
    segments: &[TrajectorySegment<f64, X>],
    report: &Report,
) -> std::io::Result<()> {
    if emit.report {
        write_atomic(
            dir,
            "report.json",
            ReportDto::new(instance, report).to_json().as_bytes(),
        )?;
    }
    if emit.norms {
        write_atomic(dir, "norms.csv", &norms_csv(segments)?)?;
    }
    if emit.windows {
        write_atomic(dir, "windows.csv", &windows_csv(&report.windows)?)?;
    }
    if emit.trajectory {
        write_atomic(dir, "trajectory.csv", &trajectory_csv(segments)?)?;
    }
    Ok(())
}
