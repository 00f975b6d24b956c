//! Exhaustive layout generation over all-concurrent task models, in two CSP encodings.
//!
//! The baseline gives every action a container label among a fixed number of slots, so
//! layouts that differ only by unused labels are found several times. The improved encoding
//! gives every action a boolean "opens a new container" variable instead, which yields each
//! layout exactly once.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action_set::ActionSet;
use crate::aui::{Layout, ScoreWeights, DEFAULT_CAPACITY};
use crate::task_model::{
    DataAttribute, DataType, ExecState, Property, Task, TaskModel, TaskType, TemporalOperator,
};

pub const DEFAULT_HARD_CAP: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("n_min must be at least 1")]
    ZeroN,
    #[error("n_min {min} exceeds n_max {max}")]
    EmptyRange { min: usize, max: usize },
    #[error("n_max {n} exceeds the hard cap of {cap}")]
    AboveCap { n: usize, cap: usize },
    #[error("repetitions must be at least 1")]
    ZeroRepetitions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n_min: usize,
    pub n_max: usize,
    /// `None` runs both encodings.
    pub improved: Option<bool>,
    /// The fastest of this many runs is reported.
    pub repetitions: usize,
    pub capacity: usize,
    /// Container labels available to the baseline encoding, and the container limit of both.
    pub slots: usize,
    pub hard_cap: usize,
    pub weights: ScoreWeights,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n_min: 1,
            n_max: 7,
            improved: None,
            repetitions: 3,
            capacity: DEFAULT_CAPACITY,
            slots: 3,
            hard_cap: DEFAULT_HARD_CAP,
            weights: ScoreWeights::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n_concurrent: usize,
    pub nodes_explored: u64,
    pub elapsed_ms: f64,
    pub csp_solutions: u64,
    pub unique_solutions: u64,
    pub improved: bool,
    /// Best `−platform_weight·containers − action_weight·displacement` over all solutions.
    pub best_score: f64,
}

pub const CSV_HEADER: &str =
    "n_concurrent,nodes_explored,elapsed_ms,csp_solutions,unique_solutions,improved,best_score";

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{:.3},{},{},{},{}",
            self.n_concurrent,
            self.nodes_explored,
            self.elapsed_ms,
            self.csp_solutions,
            self.unique_solutions,
            self.improved,
            self.best_score
        )
    }
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// `n` text inputs `A1 ||| A2 ||| … ||| An`; a lone action when `n` is 1.
pub fn all_concurrent_model(n: usize) -> TaskModel {
    let children: Vec<Task> = (1..=n)
        .map(|i| {
            Task::action(format!("A{i}"), TaskType::Input).with_data(DataAttribute::with_property(
                DataType::String,
                Property::Bound(30),
            ))
        })
        .collect();
    let ops = vec![TemporalOperator::Concurrency; n.saturating_sub(1)];
    let root = if children.len() == 1 {
        children.into_iter().next().expect("one child")
    } else {
        Task::composite("Root", children, ops)
    };
    TaskModel::new(format!("concurrent-{n}"), root).expect("generated model is valid")
}

pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    if config.n_min == 0 {
        return Err(BenchError::ZeroN);
    }
    if config.n_min > config.n_max {
        return Err(BenchError::EmptyRange {
            min: config.n_min,
            max: config.n_max,
        });
    }
    if config.n_max > config.hard_cap {
        return Err(BenchError::AboveCap {
            n: config.n_max,
            cap: config.hard_cap,
        });
    }
    if config.repetitions == 0 {
        return Err(BenchError::ZeroRepetitions);
    }
    let modes: Vec<bool> = match config.improved {
        Some(m) => vec![m],
        None => vec![false, true],
    };
    let mut rows = Vec::new();
    for n in config.n_min..=config.n_max {
        let model = all_concurrent_model(n);
        for &improved in &modes {
            rows.push(run_row(&model, improved, config));
        }
    }
    Ok(rows)
}

/// Enumerates every layout of `model` under `config`, keeping the fastest of the repetitions.
pub fn run_row(model: &TaskModel, improved: bool, config: &BenchConfig) -> BenchRow {
    let mut best_time = Duration::MAX;
    let mut result = None;
    for _ in 0..config.repetitions.max(1) {
        let start = Instant::now();
        let search = enumerate(model, improved, config);
        best_time = best_time.min(start.elapsed());
        result = Some(search);
    }
    let s = result.expect("at least one repetition");
    BenchRow {
        n_concurrent: model.action_count(),
        nodes_explored: s.nodes,
        elapsed_ms: best_time.as_secs_f64() * 1e3,
        csp_solutions: s.solutions,
        unique_solutions: s.unique,
        improved,
        best_score: s.best,
    }
}

struct Search<'a> {
    model: &'a TaskModel,
    improved: bool,
    slots: usize,
    capacity: usize,
    weights: ScoreWeights,
    reference: Vec<(usize, usize)>,
    nodes: u64,
    solutions: u64,
    unique: u64,
    best: f64,
}

#[derive(Clone, Copy)]
struct Cursor {
    depth: usize,
    /// Label of the previous action (baseline) or `0` (improved).
    label: usize,
    containers: usize,
    in_container: usize,
    changes: usize,
    canonical: bool,
}

fn enumerate<'a>(model: &'a TaskModel, improved: bool, config: &BenchConfig) -> Search<'a> {
    let reference_layout = Layout::dfs_initial(model, config.capacity);
    let mut reference = vec![(usize::MAX, usize::MAX); model.action_count()];
    for (ci, c) in reference_layout.containers.iter().enumerate() {
        for (pos, &a) in c.iter().enumerate() {
            reference[a] = (ci, pos);
        }
    }
    let mut s = Search {
        model,
        improved,
        slots: config.slots.max(1),
        capacity: config.capacity.max(1),
        weights: config.weights,
        reference,
        nodes: 0,
        solutions: 0,
        unique: 0,
        best: f64::NEG_INFINITY,
    };
    let cursor = Cursor {
        depth: 0,
        label: 0,
        containers: 0,
        in_container: 0,
        changes: 0,
        canonical: true,
    };
    s.visit(model.start_state(), ActionSet::new(), cursor);
    s
}

impl Search<'_> {
    fn visit(&mut self, state: ExecState, used: ActionSet, cur: Cursor) {
        let n = self.model.action_count();
        if cur.depth == n {
            if self.model.is_complete_state(&state) {
                self.solutions += 1;
                if cur.canonical {
                    self.unique += 1;
                }
                let score = -self.weights.platform_weight * cur.containers as f64
                    - self.weights.action_weight * cur.changes as f64;
                self.best = self.best.max(score);
            }
            return;
        }
        let enabled = self.model.enabled_in_state(&state);
        for a in enabled.iter().filter(|a| !used.contains(*a)) {
            self.nodes += 1;
            let mut next_state = state.clone();
            if !self.model.step(&mut next_state, a) {
                continue;
            }
            let mut next_used = used.clone();
            next_used.insert(a);
            for next in self.placements(cur) {
                self.nodes += 1;
                let place = (next.containers - 1, next.in_container - 1);
                let next = Cursor {
                    depth: cur.depth + 1,
                    changes: cur.changes + usize::from(self.reference[a] != place),
                    ..next
                };
                self.visit(next_state.clone(), next_used.clone(), next);
            }
        }
    }

    /// Container choices for the action at `cur.depth`, with `containers` and `in_container`
    /// counting the action itself.
    fn placements(&self, cur: Cursor) -> Vec<Cursor> {
        let mut out = Vec::new();
        let stay = Cursor {
            in_container: cur.in_container + 1,
            ..cur
        };
        let open = Cursor {
            containers: cur.containers + 1,
            in_container: 1,
            ..cur
        };
        if self.improved {
            if cur.depth > 0 && cur.in_container < self.capacity {
                out.push(stay);
            }
            if cur.containers < self.slots {
                out.push(open);
            }
            return out;
        }
        let lowest = if cur.depth == 0 { 0 } else { cur.label };
        for label in lowest..self.slots {
            if cur.depth > 0 && label == cur.label {
                if cur.in_container < self.capacity {
                    out.push(Cursor { label, ..stay });
                }
            } else {
                let contiguous = if cur.depth == 0 {
                    label == 0
                } else {
                    label == cur.label + 1
                };
                out.push(Cursor {
                    label,
                    canonical: cur.canonical && contiguous,
                    ..open
                });
            }
        }
        out
    }
}
