//! Reproduction runs that put published values next to computed ones.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use crate::construct::{cross_evaluate, optimize, OptimizerConfig};
use crate::error::Result;
use crate::evaluator::squared_discrepancy;
use crate::generators::{sobol, DirectionNumbers};
use crate::kernels::kernel_spec;
use crate::measure::MeasureId;
use crate::pathology::{pathology_table, ArbitrationConfig, PathologyRow, PublishedThreshold};
use crate::point_set::PointSet;
use crate::reference::{table3, table4, TABLE3, TABLE4_MEASURES, TABLE4_SUSPECT};

use super::io::{write_file, write_points};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Table1,
    Table3,
    Table4,
    Fig2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Seconds: one small size per table, short runs.
    Smoke,
    /// Minutes: the sizes used for acceptance.
    Desk,
    /// Every published size.
    Full,
}

/// Sizes and budgets behind a [`Preset`].
#[derive(Clone, Debug, PartialEq)]
pub struct Budget {
    pub table1_dims: Vec<usize>,
    pub arbitration_samples: usize,
    pub table3_n: Vec<usize>,
    pub table4_n: Vec<usize>,
    pub fig2_n: Vec<usize>,
    pub restarts: usize,
    pub iterations: usize,
}

impl Preset {
    pub fn budget(self) -> Budget {
        match self {
            Preset::Smoke => Budget {
                table1_dims: (1..=3).collect(),
                arbitration_samples: 20_000,
                table3_n: vec![16],
                table4_n: vec![10],
                fig2_n: vec![16],
                restarts: 2,
                iterations: 2_000,
            },
            Preset::Desk => Budget {
                table1_dims: (1..=10).collect(),
                arbitration_samples: 200_000,
                table3_n: vec![16, 32, 64],
                table4_n: vec![10, 20, 30, 40, 50, 60],
                fig2_n: vec![32, 64],
                restarts: 20,
                iterations: 50_000,
            },
            Preset::Full => Budget {
                table1_dims: (1..=10).collect(),
                arbitration_samples: 1_000_000,
                table3_n: vec![16, 32, 64, 128, 256],
                table4_n: (1..=12).map(|k| 10 * k).collect(),
                fig2_n: vec![16, 32, 64, 128, 256],
                restarts: 20,
                iterations: 50_000,
            },
        }
    }
}

fn relative(computed: f64, published: f64) -> f64 {
    (computed - published) / published
}

fn optimized_set(measure: MeasureId, n: usize, budget: &Budget, seed: u64) -> Result<PointSet> {
    let spec = kernel_spec(measure, 2, None)?;
    let init = sobol(n, 2, &DirectionNumbers::embedded())?;
    let cfg = OptimizerConfig {
        restarts: budget.restarts,
        iterations: budget.iterations,
        seed,
        ..OptimizerConfig::default()
    };
    Ok(optimize(&spec, &init, &cfg)?.0)
}

fn root(measure: MeasureId, set: &PointSet) -> Result<f64> {
    Ok(squared_discrepancy(&kernel_spec(measure, set.dim(), None)?, set)?.root())
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    write_file(path, &bytes)
}

/// Flat CSV form of a [`PathologyRow`].
#[derive(Serialize)]
pub struct PathologyCsvRow {
    measure: MeasureId,
    d: usize,
    anchor: &'static str,
    n_times_expected: f64,
    published_n_times_expected: Option<f64>,
    n_times_expected_match: &'static str,
    single_value: f64,
    published_single_value: Option<f64>,
    single_value_match: &'static str,
    threshold: f64,
    crossover: Option<u64>,
    published_threshold: Option<f64>,
    published_threshold_kind: Option<&'static str>,
    threshold_match: &'static str,
    iid_constant: f64,
    arbitration_n: Option<usize>,
    mc_n_times_expected: Option<f64>,
    mc_n_times_expected_stderr: Option<f64>,
    mc_geometric: Option<bool>,
    mc_single_value: Option<f64>,
    mc_single_value_stderr: Option<f64>,
}

fn flag(m: crate::pathology::TableMatch) -> &'static str {
    match m {
        crate::pathology::TableMatch::Match => "match",
        crate::pathology::TableMatch::Mismatch => "mismatch",
        crate::pathology::TableMatch::NotListed => "not_listed",
    }
}

impl From<&PathologyRow> for PathologyCsvRow {
    fn from(r: &PathologyRow) -> Self {
        let (pt, kind) = match r.published.map(|p| p.threshold) {
            Some(PublishedThreshold::Closed(t)) => (Some(t), Some("closed")),
            Some(PublishedThreshold::Integer(k)) => (Some(k as f64), Some("integer")),
            Some(PublishedThreshold::Approximate(t)) => (Some(t), Some("approximate")),
            None => (None, None),
        };
        let arb = r.arbitration.as_ref();
        PathologyCsvRow {
            measure: r.measure,
            d: r.d,
            anchor: r.anchor.describe(),
            n_times_expected: r.n_times_expected,
            published_n_times_expected: r.published.map(|p| p.n_times_expected),
            n_times_expected_match: flag(r.n_times_expected_match),
            single_value: r.single_value,
            published_single_value: r.published.and_then(|p| p.single_value),
            single_value_match: flag(r.single_value_match),
            threshold: r.threshold.value,
            crossover: r.threshold.crossover,
            published_threshold: pt,
            published_threshold_kind: kind,
            threshold_match: flag(r.threshold_match),
            iid_constant: r.iid_constant,
            arbitration_n: arb.map(|a| a.n),
            mc_n_times_expected: arb.map(|a| a.n_times_expected.mean),
            mc_n_times_expected_stderr: arb.map(|a| a.n_times_expected.stderr),
            mc_geometric: arb.map(|a| a.geometric),
            mc_single_value: arb.and_then(|a| a.single_value.map(|s| s.mean)),
            mc_single_value_stderr: arb.and_then(|a| a.single_value.map(|s| s.stderr)),
        }
    }
}

/// Writes the pathology table for `dims` to `path`.
pub fn write_pathology(path: &Path, dims: &[usize], arbitrate: Option<ArbitrationConfig>) -> Result<Vec<PathologyRow>> {
    let rows = pathology_table(dims, arbitrate)?;
    let flat: Vec<PathologyCsvRow> = rows.iter().map(PathologyCsvRow::from).collect();
    write_rows(path, &flat)?;
    Ok(rows)
}

#[derive(Serialize)]
struct Table3Row {
    measure: MeasureId,
    n: usize,
    published_opt: f64,
    computed_opt: f64,
    rel_dev_opt: f64,
    published_sobol: f64,
    computed_sobol: f64,
    rel_dev_sobol: f64,
    beats_published_sobol: bool,
}

#[derive(Serialize)]
struct Table4Row {
    n: usize,
    measure: MeasureId,
    published: f64,
    computed: f64,
    rel_dev: f64,
    published_suspect: bool,
}

#[derive(Serialize)]
struct Fig2Row {
    n: usize,
    evaluated: MeasureId,
    optimized_for: MeasureId,
    root: f64,
    ratio: f64,
}

/// Runs one reproduction into `dir` and returns the files written.
pub fn run(which: Which, preset: Preset, dir: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    let budget = preset.budget();
    let mut outputs = Vec::new();
    match which {
        Which::Table1 => {
            let path = dir.join("table1.csv");
            let arbitrate = ArbitrationConfig {
                samples: budget.arbitration_samples,
                ..ArbitrationConfig::default()
            };
            write_pathology(&path, &budget.table1_dims, Some(arbitrate))?;
            outputs.push(path);
        }
        Which::Table3 => {
            let mut rows = Vec::new();
            for &n in &budget.table3_n {
                let base = sobol(n, 2, &DirectionNumbers::embedded())?;
                for (measure, _, _) in TABLE3 {
                    let (p_opt, p_sobol) = table3(measure, n).expect("listed size");
                    let set = optimized_set(measure, n, &budget, seed)?;
                    let set_path = dir.join("sets").join(format!("table3_{measure}_{n}.csv"));
                    write_points(&set_path, &set)?;
                    outputs.push(set_path);
                    let opt = root(measure, &set)?;
                    let sob = root(measure, &base)?;
                    rows.push(Table3Row {
                        measure,
                        n,
                        published_opt: p_opt,
                        computed_opt: opt,
                        rel_dev_opt: relative(opt, p_opt),
                        published_sobol: p_sobol,
                        computed_sobol: sob,
                        rel_dev_sobol: relative(sob, p_sobol),
                        beats_published_sobol: opt < p_sobol,
                    });
                }
            }
            let path = dir.join("table3.csv");
            write_rows(&path, &rows)?;
            outputs.push(path);
        }
        Which::Table4 => {
            let mut rows = Vec::new();
            for &n in &budget.table4_n {
                for measure in TABLE4_MEASURES {
                    let set = optimized_set(measure, n, &budget, seed)?;
                    let set_path = dir.join("sets").join(format!("table4_{measure}_{n}.csv"));
                    write_points(&set_path, &set)?;
                    outputs.push(set_path);
                    let published = table4(measure, n).expect("listed size");
                    let computed = root(measure, &set)?;
                    rows.push(Table4Row {
                        n,
                        measure,
                        published,
                        computed,
                        rel_dev: relative(computed, published),
                        published_suspect: TABLE4_SUSPECT.contains(&measure),
                    });
                }
            }
            let path = dir.join("table4.csv");
            write_rows(&path, &rows)?;
            outputs.push(path);
        }
        Which::Fig2 => {
            let mut rows = Vec::new();
            for &n in &budget.fig2_n {
                let mut sets = BTreeMap::new();
                for measure in MeasureId::OPTIMIZABLE {
                    let set = optimized_set(measure, n, &budget, seed)?;
                    let set_path = dir.join("sets").join(format!("fig2_{n}")).join(format!("{measure}.csv"));
                    write_points(&set_path, &set)?;
                    outputs.push(set_path);
                    sets.insert(measure, set);
                }
                let matrix = cross_evaluate(&sets, &MeasureId::OPTIMIZABLE)?;
                for (i, &evaluated) in matrix.measures.iter().enumerate() {
                    for (j, &optimized_for) in matrix.measures.iter().enumerate() {
                        rows.push(Fig2Row {
                            n,
                            evaluated,
                            optimized_for,
                            root: matrix.roots[i][j],
                            ratio: matrix.ratios[i][j],
                        });
                    }
                }
            }
            let path = dir.join("fig2.csv");
            write_rows(&path, &rows)?;
            outputs.push(path);
        }
    }
    Ok(outputs)
}
