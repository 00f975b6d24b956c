//! Report builders behind the command-line subcommands.

use std::collections::BTreeSet;
use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::aui::{
    k_best_search, layout_appropriateness, AuiError, Layout, Reification, ScoreWeights, Scorer,
    SearchConfig,
};
use crate::sequence::{extract_lrs, format_log, MarkovModel, SequenceError};
use crate::task_model::{TaskModel, TaskModelError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    TaskModel(#[from] TaskModelError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Aui(#[from] AuiError),
    #[error("{0}")]
    Usage(String),
}

/// `count` random complete executions of `model`. Each step picks uniformly among the
/// enabled actions not yet performed; once the task can end, it ends with probability 1/2.
pub fn random_sequences(model: &TaskModel, seed: u64, count: usize) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut state = model.start_state();
        let mut seq = Vec::new();
        loop {
            let candidates: Vec<usize> = model
                .enabled_in_state(&state)
                .iter()
                .filter(|a| !seq.contains(a))
                .collect();
            let complete = model.is_complete_state(&state);
            if candidates.is_empty() || (complete && rng.gen_bool(0.5)) {
                break;
            }
            let a = candidates[rng.gen_range(0..candidates.len())];
            if !model.step(&mut state, a) {
                break;
            }
            seq.push(a);
        }
        out.push(model.names(&seq));
    }
    out
}

pub struct SimulateOptions {
    pub order: usize,
    pub threshold: u32,
    pub capacity: usize,
    pub candidates: usize,
    pub seed: u64,
}

/// Trains on `log` and reports the LRS set, the five most likely next actions for every
/// history seen in the log, and the best-scoring first layouts.
pub fn simulate_report(
    model: &TaskModel,
    log: &[Vec<String>],
    opts: &SimulateOptions,
) -> Result<String, CliError> {
    if log.is_empty() {
        return Err(SequenceError::EmptyLog.into());
    }
    for seq in log {
        model.ids(seq)?;
    }
    let mut markov = MarkovModel::new(opts.order, model.actions())?;
    for seq in log {
        markov.update_online(seq)?;
    }
    let mut out = String::new();
    let lrs = extract_lrs(log, opts.threshold)?;
    writeln!(
        out,
        "# model {} ({} actions)",
        model.name(),
        model.action_count()
    )
    .unwrap();
    writeln!(out, "# sequences {}", log.len()).unwrap();
    writeln!(out, "\n## lrs (T={})", opts.threshold).unwrap();
    out.push_str(&format_log(&lrs.sequences));

    writeln!(out, "\n## predictions (k={})", opts.order).unwrap();
    let mut histories: BTreeSet<Vec<String>> = BTreeSet::new();
    for seq in log {
        for i in 0..seq.len() {
            let from = i.saturating_sub(opts.order);
            histories.insert(seq[from..i].to_vec());
        }
    }
    for h in &histories {
        let dist = markov.predict_next(h)?;
        let top: Vec<String> = dist
            .iter()
            .take(5)
            .map(|(a, p)| format!("{a}={p:.3}"))
            .collect();
        writeln!(out, "[{}] -> {}", h.join(","), top.join(" ")).unwrap();
    }

    writeln!(out, "\n## candidates").unwrap();
    let ids: Vec<Vec<usize>> = log.iter().map(|s| model.ids(s)).collect::<Result<_, _>>()?;
    let lrs_ids: Vec<Vec<usize>> = lrs
        .sequences
        .iter()
        .map(|s| model.ids(s))
        .collect::<Result<_, _>>()?;
    let reification = Reification::builder(model)
        .capacity(opts.capacity)
        .lrs_tier(lrs_ids)
        .lrs_tier(ids)
        .build()?;
    let scorer = Scorer::new(&reification, ScoreWeights::default()).with_markov(&markov);
    let config = SearchConfig {
        k: opts.candidates,
        seed: opts.seed,
        ..SearchConfig::default()
    };
    let best = k_best_search(&scorer, &config)?;
    for item in &best.items {
        let s = &item.score;
        let l = layout_appropriateness(model, &item.layout, log)?;
        writeln!(
            out,
            "{} content={:.4} conformance={:.4} ordering={:.4} total={:.4} L={}",
            layout_text(model, &item.layout),
            s.content,
            s.conformance,
            s.ordering,
            s.total,
            l
        )
        .unwrap();
    }
    Ok(out)
}

/// `A,B|C` notation: containers separated by `|`, actions by `,`.
pub fn layout_text(model: &TaskModel, layout: &Layout) -> String {
    layout
        .names(model)
        .iter()
        .map(|c| c.join(","))
        .collect::<Vec<_>>()
        .join("|")
}

pub fn parse_layout(model: &TaskModel, text: &str) -> Result<Layout, CliError> {
    let mut containers = Vec::new();
    for part in text.split('|') {
        let names: Vec<&str> = part
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        if names.is_empty() {
            return Err(CliError::Usage(format!("empty container in `{text}`")));
        }
        containers.push(model.ids(&names)?);
    }
    Ok(Layout::new(containers))
}

/// Scores `layout` after `history`, with displacement measured against the depth-first
/// layout.
pub fn score_report(
    model: &TaskModel,
    layout: &Layout,
    history: &[String],
    log: &[Vec<String>],
    order: usize,
    capacity: usize,
) -> Result<String, CliError> {
    let history = model.ids(history)?;
    let reification = Reification::builder(model)
        .history(&history)
        .capacity(capacity)
        .build()?;
    let markov = if log.is_empty() {
        None
    } else {
        let mut m = MarkovModel::new(order, model.actions())?;
        for seq in log {
            m.update_online(seq)?;
        }
        Some(m)
    };
    let mut scorer = Scorer::new(&reification, ScoreWeights::default());
    if let Some(m) = &markov {
        scorer = scorer.with_markov(m);
    }
    let mut out = String::new();
    match reification.check(layout) {
        Ok(()) => writeln!(out, "valid: yes").unwrap(),
        Err(v) => writeln!(out, "valid: no ({v:?})").unwrap(),
    }
    let s = scorer.score(layout);
    writeln!(out, "content: {:.4}", s.content).unwrap();
    writeln!(out, "conformance: {:.4}", s.conformance).unwrap();
    writeln!(out, "ordering: {:.4}", s.ordering).unwrap();
    writeln!(out, "containers: {:.4}", s.containers).unwrap();
    writeln!(out, "displacement: {:.4}", s.displacement).unwrap();
    writeln!(out, "total: {:.4}", s.total).unwrap();
    if !log.is_empty() {
        writeln!(
            out,
            "layout_appropriateness: {}",
            layout_appropriateness(model, layout, log)?
        )
        .unwrap();
    }
    Ok(out)
}
