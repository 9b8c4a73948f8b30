//! Strategy-matrix benchmark runner.
//!
//! Every (strategy, problem) pair is an isolated prover instance with its own
//! term bank. Runs are spread over a rayon pool and collected in matrix order,
//! so the report depends only on the run outcomes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use num_rational::Ratio;
use rayon::prelude::*;
use walkdir::WalkDir;

use crate::saturation::{
    ratio_to_f64, saturate, OrderingOverrides, RunStatistics, SaturationConfig, SaturationResult,
};
use crate::selection::StrategyId;
use crate::tptp::parse_file;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Unsatisfiable,
    Satisfiable,
    Unknown,
    Timeout,
    Error(String),
}

impl RunStatus {
    fn from_result(r: &SaturationResult) -> Self {
        match r {
            SaturationResult::Unsatisfiable(_) => RunStatus::Unsatisfiable,
            SaturationResult::SaturatedSatisfiable => RunStatus::Satisfiable,
            SaturationResult::SaturatedUnknown => RunStatus::Unknown,
            SaturationResult::ResourceOut => RunStatus::Timeout,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub strategy: StrategyId,
    pub problem: String,
    pub status: RunStatus,
    pub time: Duration,
    /// Absent when the run failed before saturation.
    pub stats: Option<RunStatistics>,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub strategies: Vec<StrategyId>,
    pub time_limit: Option<Duration>,
    pub max_activations: Option<u64>,
    /// Worker threads; `None` uses one per core.
    pub jobs: Option<usize>,
    pub polarity_flip: bool,
    pub ordering: OrderingOverrides,
    pub include_dirs: Vec<PathBuf>,
}

impl BenchConfig {
    pub fn new(strategies: Vec<StrategyId>) -> Self {
        BenchConfig {
            strategies,
            time_limit: Some(Duration::from_secs(10)),
            max_activations: None,
            jobs: None,
            polarity_flip: false,
            ordering: OrderingOverrides::default(),
            include_dirs: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrategySummary {
    pub strategy: StrategyId,
    pub solved: usize,
    pub satisfiable: usize,
    pub unique: usize,
    pub u_score: Ratio<u64>,
    pub avg_children_solved: Option<f64>,
    pub avg_children_all: Option<f64>,
    /// Percentages; `None` when there are no runs to average.
    pub pct_incomp_solved: Option<f64>,
    pub pct_incomp_all: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct MatrixResult {
    pub strategies: Vec<StrategyId>,
    pub problems: Vec<String>,
    /// `runs[s * problems.len() + p]`.
    pub runs: Vec<RunRecord>,
    pub summaries: Vec<StrategySummary>,
    /// Problems solved by at least one strategy.
    pub total_solved: usize,
}

impl MatrixResult {
    pub fn run(&self, s: usize, p: usize) -> &RunRecord {
        &self.runs[s * self.problems.len() + p]
    }

    pub fn summary(&self, s: StrategyId) -> Option<&StrategySummary> {
        self.summaries.iter().find(|x| x.strategy == s)
    }
}

/// `.p` files below `dir`, in sorted path order.
pub fn collect_problems(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(std::io::Error::other)?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "p") {
            out.push(entry.into_path());
        }
    }
    Ok(out)
}

fn problem_label(root: Option<&Path>, path: &Path) -> String {
    root.and_then(|r| path.strip_prefix(r).ok())
        .unwrap_or(path)
        .with_extension("")
        .to_string_lossy()
        .replace('\\', "/")
}

/// One isolated prover run.
pub fn run_one(
    path: &Path,
    strategy: StrategyId,
    config: &BenchConfig,
) -> (RunStatus, Option<RunStatistics>) {
    let mut problem = match parse_file(path, &config.include_dirs) {
        Ok(p) => p,
        Err(e) => return (RunStatus::Error(e.to_string()), None),
    };
    let mut cfg = SaturationConfig::new(strategy);
    cfg.time_limit = config.time_limit;
    cfg.max_activations = config.max_activations;
    cfg.polarity_flip = config.polarity_flip;
    cfg.ordering = config.ordering.clone();
    let input = problem.literal_lists();
    match saturate(&mut problem.bank, &input, &cfg) {
        Ok(run) => (RunStatus::from_result(&run.result), Some(run.stats)),
        Err(e) => (RunStatus::Error(e.to_string()), None),
    }
}

/// Runs every strategy on every problem. Problem labels are paths relative to `root`.
pub fn run_matrix(problems: &[PathBuf], root: Option<&Path>, config: &BenchConfig) -> MatrixResult {
    let pairs: Vec<(StrategyId, &PathBuf)> = config
        .strategies
        .iter()
        .flat_map(|&s| problems.iter().map(move |p| (s, p)))
        .collect();
    let work = || {
        pairs
            .par_iter()
            .map(|&(strategy, path)| {
                let start = std::time::Instant::now();
                let (status, stats) = std::panic::catch_unwind(|| run_one(path, strategy, config))
                    .unwrap_or_else(|_| (RunStatus::Error("prover panicked".into()), None));
                RunRecord {
                    strategy,
                    problem: problem_label(root, path),
                    status,
                    time: start.elapsed(),
                    stats,
                }
            })
            .collect::<Vec<_>>()
    };
    let runs = match config.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(|pool| pool.install(work))
            .unwrap_or_else(|_| work()),
        None => work(),
    };
    let problem_names: Vec<String> = problems.iter().map(|p| problem_label(root, p)).collect();
    summarize(config.strategies.clone(), problem_names, runs)
}

/// Builds per-strategy summaries from runs laid out strategy-major.
pub fn summarize(
    strategies: Vec<StrategyId>,
    problems: Vec<String>,
    runs: Vec<RunRecord>,
) -> MatrixResult {
    let np = problems.len();
    assert_eq!(
        runs.len(),
        strategies.len() * np,
        "run matrix has the wrong shape"
    );
    let solved: Vec<Vec<bool>> = (0..strategies.len())
        .map(|s| {
            (0..np)
                .map(|p| runs[s * np + p].status == RunStatus::Unsatisfiable)
                .collect()
        })
        .collect();
    let u = compute_uscore(&solved);
    let solvers: Vec<usize> = (0..np)
        .map(|p| solved.iter().filter(|row| row[p]).count())
        .collect();
    let total_solved = solvers.iter().filter(|&&n| n > 0).count();
    let mean = |xs: &[f64]| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    let summaries = strategies
        .iter()
        .enumerate()
        .map(|(s, &strategy)| {
            let row = &runs[s * np..(s + 1) * np];
            let mut child_all = Vec::new();
            let mut child_so = Vec::new();
            let mut inc_all = Vec::new();
            let mut inc_so = Vec::new();
            for r in row {
                if let Some(st) = &r.stats {
                    let c = ratio_to_f64(st.avg_children());
                    let i = 100.0 * ratio_to_f64(st.pct_incomp());
                    child_all.push(c);
                    inc_all.push(i);
                    if r.status == RunStatus::Unsatisfiable {
                        child_so.push(c);
                        inc_so.push(i);
                    }
                }
            }
            StrategySummary {
                strategy,
                solved: solved[s].iter().filter(|&&b| b).count(),
                satisfiable: row
                    .iter()
                    .filter(|r| r.status == RunStatus::Satisfiable)
                    .count(),
                unique: (0..np).filter(|&p| solved[s][p] && solvers[p] == 1).count(),
                u_score: u[s],
                avg_children_solved: mean(&child_so),
                avg_children_all: mean(&child_all),
                pct_incomp_solved: mean(&inc_so),
                pct_incomp_all: mean(&inc_all),
            }
        })
        .collect();
    MatrixResult {
        strategies,
        problems,
        runs,
        summaries,
        total_solved,
    }
}

/// `u(s)`: for each problem solved by `s`, one over the number of its solvers.
/// `matrix[s][p]` tells whether strategy `s` solved problem `p`.
pub fn compute_uscore(matrix: &[Vec<bool>]) -> Vec<Ratio<u64>> {
    let np = matrix.iter().map(Vec::len).max().unwrap_or(0);
    let solvers: Vec<u64> = (0..np)
        .map(|p| {
            matrix
                .iter()
                .filter(|row| row.get(p).copied().unwrap_or(false))
                .count() as u64
        })
        .collect();
    matrix
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .fold(Ratio::from_integer(0), |acc, (p, _)| {
                    acc + Ratio::new(1, solvers[p])
                })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Csv,
}

pub const TABLE_HEADER: [&str; 7] = [
    "selection",
    "#solved",
    "%total",
    "#unique",
    "u-score",
    "#child s.o./all",
    "%incomp s.o./all",
];

fn pair(a: Option<f64>, b: Option<f64>) -> String {
    let f = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.1}"));
    format!("{}/{}", f(a), f(b))
}

/// Rows of the summary table, sorted by solved count then strategy number.
pub fn table_rows(result: &MatrixResult) -> Vec<[String; 7]> {
    let mut sums: Vec<&StrategySummary> = result.summaries.iter().collect();
    sums.sort_by(|a, b| b.solved.cmp(&a.solved).then(a.strategy.cmp(&b.strategy)));
    sums.into_iter()
        .map(|s| {
            let total = if result.total_solved == 0 {
                0.0
            } else {
                100.0 * s.solved as f64 / result.total_solved as f64
            };
            let incomp = if s.strategy.is_incomplete() {
                pair(s.pct_incomp_solved, s.pct_incomp_all)
            } else {
                String::new()
            };
            [
                s.strategy.to_string(),
                s.solved.to_string(),
                format!("{total:.1}"),
                s.unique.to_string(),
                format!("{:.1}", ratio_to_f64(s.u_score)),
                pair(s.avg_children_solved, s.avg_children_all),
                incomp,
            ]
        })
        .collect()
}

/// Renders the summary table.
pub fn emit_table(result: &MatrixResult, format: TableFormat) -> String {
    let rows = table_rows(result);
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(&TABLE_HEADER.join(","));
            out.push('\n');
            for r in &rows {
                out.push_str(&r.join(","));
                out.push('\n');
            }
        }
        TableFormat::Text => {
            let mut widths: Vec<usize> = TABLE_HEADER.iter().map(|h| h.len()).collect();
            for r in &rows {
                for (w, c) in widths.iter_mut().zip(r.iter()) {
                    *w = (*w).max(c.len());
                }
            }
            let line = |cells: &[&str]| {
                let mut l = String::new();
                for (i, (c, w)) in cells.iter().zip(widths.iter()).enumerate() {
                    if i == 0 {
                        let _ = write!(l, "{c:<w$}");
                    } else {
                        let _ = write!(l, "  {c:>w$}");
                    }
                }
                l.trim_end().to_string()
            };
            out.push_str(&line(&TABLE_HEADER));
            out.push('\n');
            for r in &rows {
                let cells: Vec<&str> = r.iter().map(String::as_str).collect();
                out.push_str(&line(&cells));
                out.push('\n');
            }
        }
    }
    out
}
