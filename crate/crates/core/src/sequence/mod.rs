//! Action logs, Longest Repeating Subsequences and k-th order Markov models.

mod lrs;
mod markov;

use thiserror::Error;

pub use lrs::{extract_lrs, extract_lrs_weighted, LrsConfig, LrsSet};
pub use markov::{
    order_free_log_score, order_free_probability, train_markov, MarkovModel, TrainingSet,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SequenceError {
    #[error("the log contains no sequence")]
    EmptyLog,
    #[error("markov order must be at least 1")]
    ZeroOrder,
    #[error("pruned training needs a threshold of at least 1")]
    PruneThreshold,
    #[error("no action left to learn from after pruning")]
    EmptyVocabulary,
    #[error("action `{0}` is not in the vocabulary")]
    UnknownAction(String),
    #[error("no history matches at any back-off level")]
    ColdStart,
    #[error("no simulated sequence covers the candidate actions")]
    NoCoveringSequence,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Parses the log file format: one sequence per line, comma-separated action names, `#`
/// starting a comment. Blank lines are skipped; names are trimmed.
pub fn parse_log(text: &str) -> Result<Vec<Vec<String>>, SequenceError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let seq: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
        if seq.iter().any(String::is_empty) {
            return Err(SequenceError::Parse {
                line: i + 1,
                message: "empty action name".into(),
            });
        }
        out.push(seq);
    }
    Ok(out)
}

/// Inverse of [`parse_log`].
pub fn format_log(log: &[Vec<String>]) -> String {
    let mut out = String::new();
    for seq in log {
        out.push_str(&seq.join(","));
        out.push('\n');
    }
    out
}
