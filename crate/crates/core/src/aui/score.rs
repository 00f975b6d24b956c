use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::action_set::{ActionId, ActionSet};
use crate::sequence::MarkovModel;
use crate::task_model::TaskModel;

use super::{AuiError, Layout, Reification, DEFAULT_CAPACITY};

/// Weights of the score terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreWeights {
    pub ubp_weight: f64,
    pub model_weight: f64,
    /// How much the task-model order matters, from 0 to 1.
    pub conformance_weight: f64,
    /// Weight of group members' logs relative to the user's own, from 0 to 1.
    pub group_weight: f64,
    /// Added per already displayed action in the next container; not positive.
    pub displayed_malus: f64,
    pub platform_weight: f64,
    pub action_weight: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        Self {
            ubp_weight: 1.0,
            model_weight: 1.0,
            conformance_weight: 1.0,
            group_weight: 1.0,
            displayed_malus: -0.5,
            platform_weight: 4.0,
            action_weight: 1.0,
        }
    }
}

impl ScoreWeights {
    pub fn validate(&self) -> Result<(), String> {
        let all = [
            ("ubp_weight", self.ubp_weight),
            ("model_weight", self.model_weight),
            ("conformance_weight", self.conformance_weight),
            ("group_weight", self.group_weight),
            ("displayed_malus", self.displayed_malus),
            ("platform_weight", self.platform_weight),
            ("action_weight", self.action_weight),
        ];
        for (name, v) in all {
            if !v.is_finite() {
                return Err(format!("{name} must be finite"));
            }
        }
        for (name, v) in [
            ("ubp_weight", self.ubp_weight),
            ("model_weight", self.model_weight),
            ("platform_weight", self.platform_weight),
            ("action_weight", self.action_weight),
        ] {
            if v < 0.0 {
                return Err(format!("{name} must not be negative"));
            }
        }
        for (name, v) in [
            ("conformance_weight", self.conformance_weight),
            ("group_weight", self.group_weight),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("{name} must lie in [0, 1]"));
            }
        }
        if self.displayed_malus > 0.0 {
            return Err("displayed_malus must not be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub content: f64,
    pub conformance: f64,
    pub ordering: f64,
    pub containers: f64,
    pub displacement: f64,
    pub feedback: f64,
    pub total: f64,
}

/// Mean over the container of each action's probability of occurring within the next
/// `container.len()` steps, times `ubp_weight`, plus `displayed_malus` for each action in
/// `already_shown`. `within` gives that probability.
pub fn content_score(
    container: &[ActionId],
    within: impl Fn(ActionId, usize) -> f64,
    weights: &ScoreWeights,
    already_shown: &ActionSet,
) -> f64 {
    if container.is_empty() {
        return 0.0;
    }
    let horizon = container.len();
    let sum: f64 = container
        .iter()
        .map(|&a| within(a, horizon) * weights.ubp_weight)
        .sum();
    let shown = container
        .iter()
        .filter(|a| already_shown.contains(**a))
        .count();
    sum / horizon as f64 + weights.displayed_malus * shown as f64
}

/// Length of the longest common prefix of `order` and `dfs`, times `model_weight` and
/// `conformance_weight`.
pub fn task_conformance_score(order: &[ActionId], dfs: &[ActionId], weights: &ScoreWeights) -> f64 {
    let i = order.iter().zip(dfs).take_while(|(a, b)| a == b).count();
    i as f64 * weights.model_weight * weights.conformance_weight
}

/// Fraction of adjacent action pairs in depth-first order, times the fraction of containers
/// in which every task's actions are adjacent. Action ids are depth-first positions.
pub fn ordering_score(model: &TaskModel, layout: &Layout) -> f64 {
    let flat = layout.flatten();
    let order = if flat.len() < 2 {
        1.0
    } else {
        let agree = flat.windows(2).filter(|w| w[0] < w[1]).count();
        agree as f64 / (flat.len() - 1) as f64
    };
    let containers: Vec<&Vec<ActionId>> =
        layout.containers.iter().filter(|c| !c.is_empty()).collect();
    if containers.is_empty() {
        return order;
    }
    let grouped = containers
        .iter()
        .filter(|c| hierarchy_contiguous(model, c))
        .count();
    order * grouped as f64 / containers.len() as f64
}

fn hierarchy_contiguous(model: &TaskModel, container: &[ActionId]) -> bool {
    model.composite_nodes().all(|node| {
        let leaves = model.node_leaves(node);
        let positions: Vec<usize> = container
            .iter()
            .enumerate()
            .filter(|(_, a)| leaves.contains(**a))
            .map(|(i, _)| i)
            .collect();
        match (positions.first(), positions.last()) {
            (Some(&lo), Some(&hi)) => hi - lo + 1 == positions.len(),
            _ => true,
        }
    })
}

/// Grid placement of every action: `(container, row, col)`. Components flow two per row,
/// each widget one column right of its label.
pub fn grid_cells(layout: &Layout) -> HashMap<ActionId, (usize, usize, usize)> {
    let mut out = HashMap::new();
    for (ci, c) in layout.containers.iter().enumerate() {
        for (i, &a) in c.iter().enumerate() {
            out.insert(a, (ci, i / 2, (i % 2) * 2 + 1));
        }
    }
    out
}

/// Widget coordinates with containers stacked vertically, one empty row between them.
fn global_cells(layout: &Layout) -> HashMap<ActionId, (usize, usize)> {
    let mut offsets = Vec::with_capacity(layout.containers.len());
    let mut row = 0;
    for c in &layout.containers {
        offsets.push(row);
        row += c.len().div_ceil(2) + 1;
    }
    grid_cells(layout)
        .into_iter()
        .map(|(a, (ci, r, col))| (a, (offsets[ci] + r, col)))
        .collect()
}

/// Sum over consecutive action pairs of every logged sequence of the Manhattan distance
/// between their widgets. Lower is better.
pub fn layout_appropriateness<S: AsRef<str>>(
    model: &TaskModel,
    layout: &Layout,
    logged: &[Vec<S>],
) -> Result<f64, AuiError> {
    let cells = global_cells(layout);
    let mut total = 0usize;
    for seq in logged {
        let mut prev: Option<(usize, usize)> = None;
        for name in seq {
            let id = model.action_id(name.as_ref())?;
            let cell = *cells
                .get(&id)
                .ok_or_else(|| AuiError::Unplaced(name.as_ref().to_string()))?;
            if let Some(p) = prev {
                total += p.0.abs_diff(cell.0) + p.1.abs_diff(cell.1);
            }
            prev = Some(cell);
        }
    }
    Ok(total as f64)
}

/// Scores complete layouts of one reification problem.
///
/// The total is the content score of the first right-part container, the task conformance
/// and ordering scores, minus `platform_weight` per container and `action_weight` per
/// action placed differently from the reference, plus the feedback bias of the structure.
#[derive(Debug, Clone)]
pub struct Scorer<'a> {
    reification: &'a Reification<'a>,
    weights: ScoreWeights,
    within: Vec<HashMap<ActionId, f64>>,
    already_shown: ActionSet,
    reference: Layout,
    feedback: HashMap<String, f64>,
}

/// Penalty, in units of `ubp_weight`, for a structure the user declined.
pub const DECLINE_MALUS: f64 = 1.0;

impl<'a> Scorer<'a> {
    pub fn new(reification: &'a Reification<'a>, weights: ScoreWeights) -> Self {
        let model = reification.model();
        let reference = reification
            .reference()
            .cloned()
            .unwrap_or_else(|| Layout::dfs_initial(model, DEFAULT_CAPACITY));
        Self {
            reification,
            weights,
            within: Vec::new(),
            already_shown: ActionSet::new(),
            reference,
            feedback: HashMap::new(),
        }
    }

    /// Uses `markov` for next-action probabilities after the reification's history.
    pub fn with_markov(mut self, markov: &MarkovModel) -> Self {
        let model = self.reification.model();
        let history = model.names(self.reification.history());
        let horizon = self.reification.capacity().max(1);
        self.within = markov
            .occurrence_within(&history, horizon)
            .into_iter()
            .map(|probs: BTreeMap<String, f64>| {
                probs
                    .into_iter()
                    .filter_map(|(name, p)| model.action_id(&name).ok().map(|a| (a, p)))
                    .collect()
            })
            .collect();
        self
    }

    pub fn with_already_shown(mut self, shown: ActionSet) -> Self {
        self.already_shown = shown;
        self
    }

    /// Adds `(rating − 3) / 2 × ubp_weight` to layouts with the given fingerprint.
    pub fn with_rating(mut self, fingerprint: &str, rating: u8) -> Self {
        let bias = (f64::from(rating) - 3.0) / 2.0 * self.weights.ubp_weight;
        *self.feedback.entry(fingerprint.to_string()).or_default() += bias;
        self
    }

    pub fn with_decline(mut self, fingerprint: &str) -> Self {
        *self.feedback.entry(fingerprint.to_string()).or_default() -=
            DECLINE_MALUS * self.weights.ubp_weight;
        self
    }

    pub fn weights(&self) -> &ScoreWeights {
        &self.weights
    }

    pub fn reification(&self) -> &'a Reification<'a> {
        self.reification
    }

    fn within(&self, action: ActionId, horizon: usize) -> f64 {
        if horizon == 0 || self.within.is_empty() {
            return 0.0;
        }
        let h = horizon.min(self.within.len());
        self.within[h - 1].get(&action).copied().unwrap_or(0.0)
    }

    pub fn score(&self, layout: &Layout) -> ScoreBreakdown {
        let model = self.reification.model();
        let right = self.reification.right_part(layout);
        let next: &[ActionId] = right.first().map_or(&[], Vec::as_slice);
        let content = content_score(
            next,
            |a, h| self.within(a, h),
            &self.weights,
            &self.already_shown,
        );
        let order: Vec<ActionId> = right.iter().flatten().copied().collect();
        let conformance = task_conformance_score(&order, self.reification.right(), &self.weights);
        let ordering = ordering_score(model, layout);
        let containers = self.weights.platform_weight * layout.containers.len() as f64;
        let displacement =
            self.weights.action_weight * layout.placement_changes(&self.reference) as f64;
        let feedback = self
            .feedback
            .get(&layout.fingerprint())
            .copied()
            .unwrap_or(0.0);
        ScoreBreakdown {
            content,
            conformance,
            ordering,
            containers,
            displacement,
            feedback,
            total: content + conformance + ordering - containers - displacement + feedback,
        }
    }
}
