use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::SequenceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrsConfig {
    /// A subsequence must occur strictly more than this many times. `0` keeps every full
    /// sequence.
    pub threshold: u32,
}

impl Default for LrsConfig {
    fn default() -> Self {
        Self { threshold: 1 }
    }
}

/// Longest Repeating Subsequences mined from one owner's log, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrsSet {
    pub sequences: Vec<Vec<String>>,
    pub threshold_used: u32,
    #[serde(default)]
    pub owner: String,
}

impl LrsSet {
    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }
}

/// Extracts every contiguous subsequence that repeats more than `threshold` times and occurs
/// at least once outside any longer subsequence that itself repeats more than `threshold`
/// times.
pub fn extract_lrs(log: &[Vec<String>], threshold: u32) -> Result<LrsSet, SequenceError> {
    let weighted: Vec<(&[String], f64)> = log.iter().map(|s| (s.as_slice(), 1.0)).collect();
    extract_lrs_weighted(&weighted, threshold)
}

/// Like [`extract_lrs`], with each sequence's occurrences counted `weight` times.
pub fn extract_lrs_weighted<S: AsRef<[String]>>(
    log: &[(S, f64)],
    threshold: u32,
) -> Result<LrsSet, SequenceError> {
    if log.is_empty() {
        return Err(SequenceError::EmptyLog);
    }
    let threshold_f = f64::from(threshold);
    let mut counts: HashMap<&[String], f64> = HashMap::new();
    for (seq, weight) in log {
        let seq = seq.as_ref();
        for start in 0..seq.len() {
            for end in start + 1..=seq.len() {
                *counts.entry(&seq[start..end]).or_default() += weight;
            }
        }
    }
    let repeats = |s: &[String]| counts.get(s).is_some_and(|&c| c > threshold_f + 1e-12);

    let mut found: BTreeSet<Vec<String>> = BTreeSet::new();
    for (seq, weight) in log {
        if *weight <= 0.0 {
            continue;
        }
        let seq = seq.as_ref();
        for start in 0..seq.len() {
            for end in start + 1..=seq.len() {
                let s = &seq[start..end];
                if !repeats(s) {
                    continue;
                }
                // A longer repeating superstring around this occurrence implies a repeating
                // one-step extension, so checking those suffices.
                let left = start > 0 && repeats(&seq[start - 1..end]);
                let right = end < seq.len() && repeats(&seq[start..end + 1]);
                if !left && !right {
                    found.insert(s.to_vec());
                }
            }
        }
    }
    Ok(LrsSet {
        sequences: found.into_iter().collect(),
        threshold_used: threshold,
        owner: String::new(),
    })
}
