//! Experiment configuration, dispatch and artifact emission for the `hlog` binary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::constants::Constants;
use super::corpus;
use super::criteria::{self, CriterionReport};
use super::experiments;
use crate::atomic;
use crate::dyadic::Shift;
use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::GridFunction;
use crate::maximal::Mollifier;

/// Deepest grid the runner accepts; `3 * 2^14` samples keeps every suite in memory.
pub const MAX_DEPTH: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Stein,
    Zygmund,
    MeanZeroDivergence,
    Paraproduct,
    Atomic,
    Fourier,
    OrliczTransforms,
    Suite,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Stein => "stein",
            Self::Zygmund => "zygmund",
            Self::MeanZeroDivergence => "mean_zero_divergence",
            Self::Paraproduct => "paraproduct",
            Self::Atomic => "atomic",
            Self::Fourier => "fourier",
            Self::OrliczTransforms => "orlicz_transforms",
            Self::Suite => "suite",
        }
    }
}

fn default_depth() -> u32 {
    7
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub output_path: PathBuf,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, output_path: impl Into<PathBuf>) -> Self {
        Self {
            experiment,
            depth: default_depth(),
            seed: default_seed(),
            params: BTreeMap::new(),
            output_path: output_path.into(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth > MAX_DEPTH {
            return Err(Error::InvalidParameter(format!(
                "depth {} exceeds the limit {MAX_DEPTH}",
                self.depth
            )));
        }
        if self.depth < 2 {
            return Err(Error::InvalidParameter(format!("depth {} is below 2", self.depth)));
        }
        if let Some((k, v)) = self.params.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("parameter {k} = {v} is not finite")));
        }
        Ok(())
    }

    fn param(&self, name: &str, default: f64) -> f64 {
        self.params.get(name).copied().unwrap_or(default)
    }

    fn int_param(&self, name: &str, default: u32) -> Result<u32> {
        let v = self.param(name, default as f64);
        if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
            return Err(Error::InvalidParameter(format!(
                "parameter {name} = {v} must be a nonnegative integer"
            )));
        }
        Ok(v as u32)
    }
}

/// A file produced by a run, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub artifacts: Vec<Artifact>,
    pub reports: Vec<CriterionReport>,
}

impl RunOutcome {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for a in &self.artifacts {
            std::fs::write(dir.join(&a.file_name), &a.contents)?;
        }
        Ok(())
    }
}

fn csv_table<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn artifact(file_name: String, contents: String) -> Artifact {
    Artifact {
        file_name,
        contents,
    }
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    config: &'a ExperimentConfig,
    constants: &'a Constants,
}

#[derive(Serialize)]
struct AtomRow {
    shift: Shift,
    generation: u32,
    index: u64,
    kind: &'static str,
    level: Option<i32>,
    sup_norm: f64,
}

/// Runs one experiment. Nothing is written; see [`RunOutcome::write`].
pub fn run(config: &ExperimentConfig, k: &Constants) -> Result<RunOutcome> {
    config.validate()?;
    let name = config.experiment.name();
    let (depth, seed) = (config.depth, config.seed);
    let mut artifacts = vec![artifact(
        format!("{name}.config.json"),
        json(&ConfigEcho {
            config,
            constants: k,
        })?,
    )];
    let mut reports = Vec::new();

    match config.experiment {
        Experiment::Stein => {
            let (report, rows) = match config.params.get("delta") {
                Some(&delta) => {
                    let row = experiments::stein_row(delta)?;
                    (None, vec![row])
                }
                None => {
                    let (r, rows) = criteria::stein(k)?;
                    (Some(r), rows)
                }
            };
            artifacts.push(artifact(format!("{name}.csv"), csv_table(&rows)?));
            reports.extend(report);
        }
        Experiment::Zygmund => {
            // mean-zero step on [-1, 1], optionally offset so that the mean is nonzero
            let cells = config.int_param("cells", 8)? as usize;
            if cells < 2 || cells % 2 == 1 {
                return Err(Error::InvalidParameter(format!("cells = {cells} must be even and positive")));
            }
            let offset = config.param("offset", 0.0);
            let values: Vec<f64> = (0..cells)
                .map(|j| if 2 * j < cells { 1.0 } else { -1.0 } + offset)
                .collect();
            let f = GridFunction::line_real(-1.0, 1.0, &values)?;
            let report = experiments::run_zygmund(&f, &Mollifier::new()).map_err(|e| match e {
                Error::MeanNotZero(m) => Error::InvalidParameter(format!(
                    "input has nonzero mean {m}; the maximal integral diverges, see mean_zero_divergence"
                )),
                other => other,
            })?;
            artifacts.push(artifact(format!("{name}.json"), json(&report)?));
        }
        Experiment::MeanZeroDivergence => {
            let lo = config.int_param("min_octave", 4)?;
            let hi = config.int_param("max_octave", 12)?;
            if lo < 1 || hi <= lo || hi > 30 {
                return Err(Error::InvalidParameter(format!(
                    "octaves {lo}..{hi} must satisfy 1 <= min < max <= 30"
                )));
            }
            let moll = Mollifier::new();
            let grow = experiments::run_mean_zero_divergence(&criteria::indicator_line(), lo, hi, &moll)?;
            let flat = experiments::run_mean_zero_divergence(&criteria::mean_zero_control(), lo, hi, &moll)?;
            artifacts.push(artifact(format!("{name}.csv"), csv_table(&grow.rows)?));
            artifacts.push(artifact(format!("{name}.control.csv"), csv_table(&flat.rows)?));
            artifacts.push(artifact(format!("{name}.json"), json(&[&grow, &flat])?));
            if (lo, hi) == (4, 12) {
                reports.push(criteria::mean_zero_necessity(k)?.0);
            }
        }
        Experiment::Paraproduct => {
            reports.push(criteria::paraproduct_bounds(depth, seed, k)?);
            reports.push(criteria::covering(depth, seed, k)?);
        }
        Experiment::Atomic => {
            let index = config.int_param("index", 0)? as usize;
            let functions = corpus::function_corpus(depth, seed, index + 1, true);
            let f = &functions[index];
            let shift = if config.param("shift", 0.0) == 0.0 {
                Shift::Zero
            } else {
                Shift::Third
            };
            let d = atomic::atomic_decompose(f, shift)?;
            let rows: Vec<AtomRow> = d
                .atoms
                .iter()
                .map(|a| AtomRow {
                    shift: a.arc.shift,
                    generation: a.arc.generation,
                    index: a.arc.index,
                    kind: match a.kind {
                        atomic::AtomKind::Block { .. } => "block",
                        atomic::AtomKind::Remainder => "remainder",
                    },
                    level: match a.kind {
                        atomic::AtomKind::Block { level } => Some(level),
                        atomic::AtomKind::Remainder => None,
                    },
                    sup_norm: a.sup_norm,
                })
                .collect();
            artifacts.push(artifact(format!("{name}.atoms.csv"), csv_table(&rows)?));
            artifacts.push(artifact(format!("{name}.decomposition.json"), d.to_json()? + "\n"));
            reports.push(criteria::exact_constants(depth, seed, k)?);
            reports.push(criteria::atomic_bounds(depth, seed, k)?);
        }
        Experiment::Fourier => {
            let big_n = config.int_param("order", 6)?;
            if big_n + 3 > MAX_DEPTH {
                return Err(Error::InvalidParameter(format!(
                    "order {big_n} needs depth {} above the limit {MAX_DEPTH}",
                    big_n + 3
                )));
            }
            let a = fourier::a_n_function(big_n, big_n + 3)?;
            let c = fourier::fourier_coefficients(&a, a.len() / 2)?;
            artifacts.push(artifact(format!("{name}.a_{big_n}.csv"), c.to_csv()));
            let (report, sharp) = criteria::fourier_suite(depth, seed, k)?;
            artifacts.push(artifact(format!("{name}.sharpness.csv"), csv_table(&sharp)?));
            reports.push(report);
        }
        Experiment::OrliczTransforms => {
            let (report, transforms) = criteria::transforms(depth, seed, k)?;
            for t in &transforms {
                artifacts.push(artifact(format!("{name}.{}.csv", t.spec), csv_table(&t.rows)?));
            }
            reports.push(report);
        }
        Experiment::Suite => {
            reports = criteria::run_all(depth, seed, k)?;
            let summary: String = reports.iter().map(|r| r.summary_line() + "\n").collect();
            artifacts.push(artifact(format!("{name}.txt"), summary));
        }
    }
    if !reports.is_empty() {
        artifacts.push(artifact(format!("{name}.report.json"), json(&reports)?));
    }
    Ok(RunOutcome { artifacts, reports })
}
