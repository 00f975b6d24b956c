use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{extract_lrs, SequenceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainingSet {
    Full,
    LrsPruned,
}

/// Transition counts for every history of length `1..=order`, plus start frequencies under
/// the empty history.
#[derive(Debug, Clone)]
pub struct MarkovModel {
    order: usize,
    vocabulary: BTreeSet<String>,
    counts: HashMap<Vec<String>, BTreeMap<String, u64>>,
    trained_on: TrainingSet,
}

/// Trains an order-`k` model on `log`, or on its LRS set at `threshold` when `prune` is set.
pub fn train_markov(
    log: &[Vec<String>],
    k: usize,
    prune: bool,
    threshold: u32,
) -> Result<MarkovModel, SequenceError> {
    if k == 0 {
        return Err(SequenceError::ZeroOrder);
    }
    if log.is_empty() {
        return Err(SequenceError::EmptyLog);
    }
    let pruned;
    let (training, trained_on) = if prune {
        if threshold == 0 {
            return Err(SequenceError::PruneThreshold);
        }
        pruned = extract_lrs(log, threshold)?.sequences;
        if pruned.is_empty() {
            return Err(SequenceError::EmptyVocabulary);
        }
        (pruned.as_slice(), TrainingSet::LrsPruned)
    } else {
        (log, TrainingSet::Full)
    };
    let mut model = MarkovModel::new(k, std::iter::empty::<String>())?;
    model.trained_on = trained_on;
    for seq in training {
        model.vocabulary.extend(seq.iter().cloned());
        model.observe(seq);
    }
    Ok(model)
}

impl MarkovModel {
    pub fn new<I, S>(order: usize, vocabulary: I) -> Result<Self, SequenceError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if order == 0 {
            return Err(SequenceError::ZeroOrder);
        }
        Ok(Self {
            order,
            vocabulary: vocabulary.into_iter().map(Into::into).collect(),
            counts: HashMap::new(),
            trained_on: TrainingSet::Full,
        })
    }

    /// Widens the vocabulary, e.g. to every action of a task model.
    pub fn with_vocabulary<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.vocabulary.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn trained_on(&self) -> TrainingSet {
        self.trained_on
    }

    /// Raw count of `next` following exactly `history`.
    pub fn count(&self, history: &[&str], next: &str) -> u64 {
        let key: Vec<String> = history.iter().map(|s| s.to_string()).collect();
        self.counts
            .get(&key)
            .and_then(|m| m.get(next))
            .copied()
            .unwrap_or(0)
    }

    fn observe(&mut self, seq: &[String]) {
        for (i, next) in seq.iter().enumerate() {
            if i == 0 {
                *self
                    .counts
                    .entry(Vec::new())
                    .or_default()
                    .entry(next.clone())
                    .or_default() += 1;
            }
            for len in 1..=self.order.min(i) {
                *self
                    .counts
                    .entry(seq[i - len..i].to_vec())
                    .or_default()
                    .entry(next.clone())
                    .or_default() += 1;
            }
        }
    }

    /// Adds one completed sequence. Equivalent to retraining on the log extended by `seq`.
    pub fn update_online(&mut self, seq: &[String]) -> Result<(), SequenceError> {
        if let Some(unknown) = seq.iter().find(|a| !self.vocabulary.contains(*a)) {
            return Err(SequenceError::UnknownAction(unknown.clone()));
        }
        self.observe(seq);
        Ok(())
    }

    /// Distribution over the next action given `history`, using the longest suffix of at most
    /// `order` actions that has been observed and backing off to shorter ones. Sorted by
    /// probability, ties broken by name.
    pub fn predict_next<S: AsRef<str>>(
        &self,
        history: &[S],
    ) -> Result<Vec<(String, f64)>, SequenceError> {
        if let Some(unknown) = history
            .iter()
            .find(|a| !self.vocabulary.contains(a.as_ref()))
        {
            return Err(SequenceError::UnknownAction(unknown.as_ref().to_string()));
        }
        let hist: Vec<String> = history.iter().map(|s| s.as_ref().to_string()).collect();
        self.distribution(&hist).ok_or(SequenceError::ColdStart)
    }

    fn distribution(&self, history: &[String]) -> Option<Vec<(String, f64)>> {
        let longest = self.order.min(history.len());
        for len in (0..=longest).rev() {
            let Some(next) = self.counts.get(&history[history.len() - len..]) else {
                continue;
            };
            let total: u64 = next.values().sum();
            if total == 0 {
                continue;
            }
            let mut dist: Vec<(String, f64)> = next
                .iter()
                .map(|(a, &c)| (a.clone(), c as f64 / total as f64))
                .collect();
            dist.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            return Some(dist);
        }
        None
    }

    /// Probability of `next` after `history`, zero when nothing matches.
    pub fn probability<S: AsRef<str>>(&self, history: &[S], next: &str) -> f64 {
        let hist: Vec<String> = history.iter().map(|s| s.as_ref().to_string()).collect();
        self.distribution(&hist)
            .and_then(|d| d.into_iter().find(|(a, _)| a == next).map(|(_, p)| p))
            .unwrap_or(0.0)
    }

    /// Draws the next action from [`predict_next`](Self::predict_next), deterministically per
    /// `seed`.
    pub fn sample_observation<S: AsRef<str>>(
        &self,
        history: &[S],
        seed: u64,
    ) -> Result<String, SequenceError> {
        let dist = self.predict_next(history)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        for (a, p) in &dist {
            acc += p;
            if r < acc {
                return Ok(a.clone());
            }
        }
        Ok(dist.last().expect("non-empty distribution").0.clone())
    }

    /// Sum of log-probabilities of every transition in `log` under the model; `-inf` if any
    /// transition is unseen.
    pub fn log_likelihood(&self, log: &[Vec<String>]) -> f64 {
        let mut total = 0.0;
        for seq in log {
            for i in 0..seq.len() {
                total += self.probability(&seq[..i], &seq[i]).ln();
            }
        }
        total
    }

    /// For each horizon `m` in `1..=horizon`, the probability that each action occurs within
    /// the next `m` steps after `history`. Paths are expanded from the model's predictions and
    /// pruned below `1e-6`; mass reaching a cold start is dropped.
    pub fn occurrence_within<S: AsRef<str>>(
        &self,
        history: &[S],
        horizon: usize,
    ) -> Vec<BTreeMap<String, f64>> {
        let mut first_hit = vec![BTreeMap::<String, f64>::new(); horizon];
        let mut path: Vec<String> = history.iter().map(|s| s.as_ref().to_string()).collect();
        let base = path.len();
        self.expand(&mut path, base, 1.0, &mut first_hit);
        let mut acc = BTreeMap::new();
        first_hit
            .into_iter()
            .map(|hits| {
                for (a, p) in hits {
                    *acc.entry(a).or_insert(0.0) += p;
                }
                acc.clone()
            })
            .collect()
    }

    fn expand(
        &self,
        path: &mut Vec<String>,
        base: usize,
        mass: f64,
        first_hit: &mut [BTreeMap<String, f64>],
    ) {
        let step = path.len() - base;
        if step >= first_hit.len() {
            return;
        }
        let Some(dist) = self.distribution(path) else {
            return;
        };
        for (a, p) in dist {
            let m = mass * p;
            if m < 1e-6 {
                continue;
            }
            if !path[base..].contains(&a) {
                *first_hit[step].entry(a.clone()).or_insert(0.0) += m;
            }
            path.push(a);
            self.expand(path, base, m, first_hit);
            path.pop();
        }
    }
}

/// Best score over `simulated` sequences whose action set covers `candidate`, where a
/// sequence scores the sum of `ln p(action | prefix)`. An empty candidate scores `0`.
pub fn order_free_log_score<F>(
    simulated: &[Vec<String>],
    candidate: &BTreeSet<String>,
    mut p: F,
) -> Result<f64, SequenceError>
where
    F: FnMut(&[String], &str) -> f64,
{
    if candidate.is_empty() {
        return Ok(0.0);
    }
    let mut best: Option<f64> = None;
    for seq in simulated {
        if !candidate.iter().all(|c| seq.contains(c)) {
            continue;
        }
        let score: f64 = (0..seq.len()).map(|i| p(&seq[..i], &seq[i]).ln()).sum();
        best = Some(best.map_or(score, |b: f64| b.max(score)));
    }
    best.ok_or(SequenceError::NoCoveringSequence)
}

/// [`order_free_log_score`] using `model`'s back-off probabilities.
pub fn order_free_probability(
    model: &MarkovModel,
    simulated: &[Vec<String>],
    candidate: &BTreeSet<String>,
) -> Result<f64, SequenceError> {
    order_free_log_score(simulated, candidate, |h, a| model.probability(h, a))
}
