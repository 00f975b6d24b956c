use std::ops::ControlFlow;

use crate::action_set::{ActionId, ActionSet};
use crate::dialog::{compute_enablement, is_session_complete};
use crate::task_model::TaskModel;

use super::{AuiError, Layout, DEFAULT_CAPACITY};

/// How the containers of the right part are sized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenerationMode {
    /// Any split into containers of at most the capacity.
    FreeShape,
    /// Container sizes are fixed, typically to those of the layout being adapted.
    FixedShape(Vec<usize>),
}

/// A reason a layout is not a valid reification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The fixed left-part containers were altered.
    PrefixChanged,
    /// An action still to be done sits in the left part.
    LeftPartIntrusion(ActionId),
    MissingAction(ActionId),
    DuplicateAction(ActionId),
    UnexpectedAction(ActionId),
    EmptyContainer,
    OverCapacity {
        container: usize,
        size: usize,
    },
    ShapeMismatch,
    /// The right part does not start with the next action of the active LRS.
    LrsStart,
    /// LRS actions appear out of their LRS order.
    LrsOrder(ActionId, ActionId),
    /// `.0` must come before `.1`.
    Precedence(ActionId, ActionId),
    /// Following the layout order cannot complete the task.
    DeadEnd,
    TooManyChanges(usize),
}

/// Inputs to fractional reification: the fixed left part, the actions to lay out on the right
/// and the constraints over them.
#[derive(Debug, Clone)]
pub struct Reification<'m> {
    model: &'m TaskModel,
    prefix: Vec<Vec<ActionId>>,
    right: Vec<ActionId>,
    done: ActionSet,
    history: Vec<ActionId>,
    lrs_order: Vec<ActionId>,
    lrs_pos: Vec<Option<usize>>,
    preds: Vec<ActionSet>,
    capacity: usize,
    mode: GenerationMode,
    reference: Option<Layout>,
    max_changes: Option<usize>,
    node_budget: usize,
}

#[derive(Debug, Clone)]
pub struct ReificationBuilder<'m> {
    model: &'m TaskModel,
    history: Vec<ActionId>,
    shown_optionals: ActionSet,
    prefix: Option<Vec<Vec<ActionId>>>,
    lrs_tiers: Vec<Vec<Vec<ActionId>>>,
    capacity: usize,
    reference: Option<Layout>,
    max_changes: Option<usize>,
    node_budget: usize,
}

impl<'m> ReificationBuilder<'m> {
    /// Accomplished actions in the order they were performed.
    pub fn history(mut self, history: &[ActionId]) -> Self {
        self.history = history.to_vec();
        self
    }

    pub fn shown_optionals(mut self, shown: ActionSet) -> Self {
        self.shown_optionals = shown;
        self
    }

    /// Left-part containers kept verbatim. Defaults to the leading containers of the
    /// reference that hold accomplished or shown actions, or else to the history chunked by
    /// capacity.
    pub fn prefix(mut self, prefix: Vec<Vec<ActionId>>) -> Self {
        self.prefix = Some(prefix);
        self
    }

    /// Candidate LRS, tried tier by tier; within a tier the sequence matching the longest
    /// suffix of the history wins, then the longest continuation, then the smallest.
    pub fn lrs_tier(mut self, sequences: Vec<Vec<ActionId>>) -> Self {
        self.lrs_tiers.push(sequences);
        self
    }

    pub fn capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity;
        self
    }

    /// The layout being adapted: its right-part shape is kept and at most `capacity`
    /// placements may change.
    pub fn reference(mut self, reference: Layout) -> Self {
        self.reference = Some(reference);
        self
    }

    /// Overrides the bound on placement changes relative to the reference.
    pub fn max_changes(mut self, max: Option<usize>) -> Self {
        self.max_changes = max;
        self
    }

    /// Node cap for the feasibility probes made while choosing the active LRS.
    pub fn node_budget(mut self, budget: usize) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn build(self) -> Result<Reification<'m>, AuiError> {
        if self.capacity == 0 {
            return Err(AuiError::ZeroCapacity);
        }
        let model = self.model;
        let n = model.action_count();
        let mut done = ActionSet::new();
        for &a in &self.history {
            if a >= n {
                return Err(crate::task_model::TaskModelError::UnknownAction(a.to_string()).into());
            }
            done.insert(a);
        }
        let mut left = done.clone();
        left.union_with(&self.shown_optionals);

        let prefix = match (&self.prefix, &self.reference) {
            (Some(p), _) => p.clone(),
            (None, Some(reference)) => {
                let last = reference
                    .containers
                    .iter()
                    .rposition(|c| c.iter().any(|a| left.contains(*a)));
                reference.containers[..last.map_or(0, |l| l + 1)].to_vec()
            }
            (None, None) => {
                let mut order: Vec<ActionId> = Vec::new();
                for a in self
                    .history
                    .iter()
                    .chain(self.shown_optionals.iter().collect::<Vec<_>>().iter())
                {
                    if !order.contains(a) {
                        order.push(*a);
                    }
                }
                order.chunks(self.capacity).map(<[_]>::to_vec).collect()
            }
        };
        let in_prefix: ActionSet = prefix.iter().flatten().copied().collect();
        let right: Vec<ActionId> = (0..n).filter(|a| !in_prefix.contains(*a)).collect();
        let right_set: ActionSet = right.iter().copied().collect();

        let mut preds = vec![ActionSet::new(); n];
        for (l, r) in model.precedence_pairs() {
            for b in r.iter().filter(|b| right_set.contains(*b)) {
                for a in l.iter().filter(|a| right_set.contains(*a)) {
                    preds[b].insert(a);
                }
            }
        }

        let mode = match &self.reference {
            Some(reference) => {
                let rest = &reference.containers[prefix.len().min(reference.containers.len())..];
                let rest_set: ActionSet = rest.iter().flatten().copied().collect();
                let same_prefix = reference.containers.len() >= prefix.len()
                    && reference.containers[..prefix.len()] == prefix[..];
                if same_prefix && rest_set == right_set {
                    GenerationMode::FixedShape(rest.iter().map(Vec::len).collect())
                } else {
                    GenerationMode::FreeShape
                }
            }
            None => GenerationMode::FreeShape,
        };
        let max_changes = match (&self.reference, self.max_changes) {
            (Some(_), Some(m)) => Some(m),
            (Some(_), None) => Some(self.capacity),
            (None, _) => None,
        };

        let mut reification = Reification {
            model,
            prefix,
            right,
            done,
            history: self.history.clone(),
            lrs_order: Vec::new(),
            lrs_pos: vec![None; n],
            preds,
            capacity: self.capacity,
            mode,
            reference: self.reference.clone(),
            max_changes,
            node_budget: self.node_budget,
        };

        for tier in &self.lrs_tiers {
            for continuation in ranked_continuations(tier, &self.history, &right_set) {
                reification.set_lrs(continuation);
                if reification.first().is_some() {
                    return Ok(reification);
                }
            }
        }
        reification.set_lrs(Vec::new());
        Ok(reification)
    }
}

/// Continuations of each LRS after the longest history suffix it contains, restricted to
/// actions still to lay out, best first.
fn ranked_continuations(
    tier: &[Vec<ActionId>],
    history: &[ActionId],
    right: &ActionSet,
) -> Vec<Vec<ActionId>> {
    let mut ranked: Vec<(usize, Vec<ActionId>, &Vec<ActionId>)> = Vec::new();
    for seq in tier {
        let mut matched = 0;
        let mut start = 0;
        for m in (1..=history.len().min(seq.len())).rev() {
            let suffix = &history[history.len() - m..];
            if let Some(p) = seq.windows(m).position(|w| w == suffix) {
                matched = m;
                start = p + m;
                break;
            }
        }
        let mut cont: Vec<ActionId> = Vec::new();
        for &a in &seq[start..] {
            if right.contains(a) && !cont.contains(&a) {
                cont.push(a);
            }
        }
        if !cont.is_empty() {
            ranked.push((matched, cont, seq));
        }
    }
    ranked.sort_by(|a, b| {
        b.0.cmp(&a.0)
            .then_with(|| b.1.len().cmp(&a.1.len()))
            .then_with(|| a.2.cmp(b.2))
    });
    let mut out: Vec<Vec<ActionId>> = Vec::new();
    for (_, cont, _) in ranked {
        if !out.contains(&cont) {
            out.push(cont);
        }
    }
    out
}

/// Greedily follows `order` from the accomplished set `start`, skipping actions that are
/// disabled at their turn, and reports whether the task ends complete.
pub fn replays_cleanly(model: &TaskModel, start: &ActionSet, order: &[ActionId]) -> bool {
    let mut done = start.clone();
    for &a in order {
        if done.contains(a) {
            continue;
        }
        if compute_enablement(model, &done).is_enabled(a) {
            done.insert(a);
        }
    }
    is_session_complete(model, &done)
}

impl<'m> Reification<'m> {
    pub fn builder(model: &'m TaskModel) -> ReificationBuilder<'m> {
        ReificationBuilder {
            model,
            history: Vec::new(),
            shown_optionals: ActionSet::new(),
            prefix: None,
            lrs_tiers: Vec::new(),
            capacity: DEFAULT_CAPACITY,
            reference: None,
            max_changes: None,
            node_budget: 2_000_000,
        }
    }

    fn set_lrs(&mut self, order: Vec<ActionId>) {
        self.lrs_pos = vec![None; self.model.action_count()];
        for (i, &a) in order.iter().enumerate() {
            self.lrs_pos[a] = Some(i);
        }
        self.lrs_order = order;
    }

    /// The same problem without the LRS constraint.
    pub fn without_lrs(&self) -> Self {
        let mut r = self.clone();
        r.set_lrs(Vec::new());
        r
    }

    /// The same problem without the bound on placement changes.
    pub fn without_change_bound(&self) -> Self {
        let mut r = self.clone();
        r.max_changes = None;
        r
    }

    pub fn model(&self) -> &'m TaskModel {
        self.model
    }

    pub fn prefix(&self) -> &[Vec<ActionId>] {
        &self.prefix
    }

    /// Actions to lay out, in depth-first order.
    pub fn right(&self) -> &[ActionId] {
        &self.right
    }

    pub fn done(&self) -> &ActionSet {
        &self.done
    }

    pub fn history(&self) -> &[ActionId] {
        &self.history
    }

    /// Continuation of the active LRS; empty when no LRS constrains the layout.
    pub fn lrs_order(&self) -> &[ActionId] {
        &self.lrs_order
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn mode(&self) -> &GenerationMode {
        &self.mode
    }

    pub fn reference(&self) -> Option<&Layout> {
        self.reference.as_ref()
    }

    pub fn max_changes(&self) -> Option<usize> {
        self.max_changes
    }

    /// Joins the fixed prefix with right-part containers.
    pub fn assemble(&self, right: Vec<Vec<ActionId>>) -> Layout {
        let mut containers = self.prefix.clone();
        containers.extend(right);
        Layout { containers }
    }

    /// The right-part containers of a layout built by [`assemble`](Self::assemble).
    pub fn right_part<'l>(&self, layout: &'l Layout) -> &'l [Vec<ActionId>] {
        &layout.containers[self.prefix.len().min(layout.containers.len())..]
    }

    fn replay_start(&self) -> (ActionSet, Vec<ActionId>) {
        let pending: Vec<ActionId> = self
            .prefix
            .iter()
            .flatten()
            .copied()
            .filter(|a| !self.done.contains(*a))
            .collect();
        (self.done.clone(), pending)
    }

    fn order_replays(&self, order: &[ActionId]) -> bool {
        let (start, mut seq) = self.replay_start();
        seq.extend_from_slice(order);
        replays_cleanly(self.model, &start, &seq)
    }

    /// Checks every constraint on a complete layout.
    pub fn check(&self, layout: &Layout) -> Result<(), Violation> {
        let p = self.prefix.len();
        if layout.containers.len() < p || layout.containers[..p] != self.prefix[..] {
            let right: ActionSet = self.right.iter().copied().collect();
            for c in layout.containers.iter().take(p) {
                if let Some(&a) = c.iter().find(|a| right.contains(**a)) {
                    return Err(Violation::LeftPartIntrusion(a));
                }
            }
            return Err(Violation::PrefixChanged);
        }
        let right_part = &layout.containers[p..];
        let order: Vec<ActionId> = right_part.iter().flatten().copied().collect();
        let mut seen = ActionSet::new();
        let right: ActionSet = self.right.iter().copied().collect();
        for &a in &order {
            if !right.contains(a) {
                return Err(Violation::UnexpectedAction(a));
            }
            if seen.contains(a) {
                return Err(Violation::DuplicateAction(a));
            }
            seen.insert(a);
        }
        if let Some(&a) = self.right.iter().find(|a| !seen.contains(**a)) {
            return Err(Violation::MissingAction(a));
        }
        for (i, c) in right_part.iter().enumerate() {
            if c.is_empty() {
                return Err(Violation::EmptyContainer);
            }
            if c.len() > self.capacity {
                return Err(Violation::OverCapacity {
                    container: p + i,
                    size: c.len(),
                });
            }
        }
        if let GenerationMode::FixedShape(shape) = &self.mode {
            if right_part.iter().map(Vec::len).ne(shape.iter().copied()) {
                return Err(Violation::ShapeMismatch);
            }
        }
        self.check_order(&order)?;
        if let (Some(max), Some(reference)) = (self.max_changes, &self.reference) {
            let changes = layout.placement_changes(reference);
            if changes > max {
                return Err(Violation::TooManyChanges(changes));
            }
        }
        Ok(())
    }

    fn check_order(&self, order: &[ActionId]) -> Result<(), Violation> {
        if let Some(&first) = self.lrs_order.first() {
            if order.first() != Some(&first) {
                return Err(Violation::LrsStart);
            }
        }
        let mut last_lrs: Option<(usize, ActionId)> = None;
        let mut placed = ActionSet::new();
        for &a in order {
            if let Some(i) = self.lrs_pos[a] {
                if let Some((j, b)) = last_lrs {
                    if i < j {
                        return Err(Violation::LrsOrder(a, b));
                    }
                }
                last_lrs = Some((i, a));
            }
            if let Some(b) = self.preds[a].iter().find(|b| !placed.contains(*b)) {
                return Err(Violation::Precedence(b, a));
            }
            placed.insert(a);
        }
        if !self.order_replays(order) {
            return Err(Violation::DeadEnd);
        }
        Ok(())
    }

    /// Whether the right-part order alone satisfies the ordering constraints.
    pub fn order_is_valid(&self, order: &[ActionId]) -> bool {
        self.check_order(order).is_ok()
    }

    /// The first valid layout in enumeration order.
    pub fn first(&self) -> Option<Layout> {
        let mut found = None;
        self.for_each(|l| {
            found = Some(l.clone());
            ControlFlow::Break(())
        });
        found
    }

    /// Every valid layout.
    pub fn generate_partial_auis(&self) -> Vec<Layout> {
        let mut out = Vec::new();
        self.for_each(|l| {
            out.push(l.clone());
            ControlFlow::Continue(())
        });
        out
    }

    /// Visits valid layouts: right-part orders in lexicographic order of depth-first position,
    /// then container splits with earlier cuts first. Returns the number of search nodes
    /// expanded.
    pub fn for_each(&self, mut f: impl FnMut(&Layout) -> ControlFlow<()>) -> usize {
        let mut state = Walk {
            order: Vec::with_capacity(self.right.len()),
            placed: ActionSet::new(),
            nodes: 0,
            slots: match &self.mode {
                GenerationMode::FixedShape(shape) => Some(
                    shape
                        .iter()
                        .enumerate()
                        .flat_map(|(ci, &len)| {
                            (0..len).map(move |pos| (self.prefix.len() + ci, pos))
                        })
                        .collect(),
                ),
                GenerationMode::FreeShape => None,
            },
        };
        let _ = self.walk(&mut state, 0, 0, &mut f);
        state.nodes
    }

    fn walk(
        &self,
        st: &mut Walk,
        lrs_next: usize,
        changes: usize,
        f: &mut impl FnMut(&Layout) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if st.order.len() == self.right.len() {
            if !self.order_replays(&st.order) {
                return ControlFlow::Continue(());
            }
            return self.emit_shapes(&st.order, f);
        }
        for &x in &self.right {
            if st.placed.contains(x) {
                continue;
            }
            if let Some(i) = self.lrs_pos[x] {
                if i != lrs_next {
                    continue;
                }
            } else if st.order.is_empty() && !self.lrs_order.is_empty() {
                continue;
            }
            if !self.preds[x].is_subset(&st.placed) {
                continue;
            }
            let mut next_changes = changes;
            if let (Some(slots), Some(reference)) = (&st.slots, &self.reference) {
                if reference.placement_of(x) != Some(slots[st.order.len()]) {
                    next_changes += 1;
                }
                if self.max_changes.is_some_and(|m| next_changes > m) {
                    continue;
                }
            }
            st.nodes += 1;
            if st.nodes > self.node_budget {
                return ControlFlow::Break(());
            }
            st.order.push(x);
            st.placed.insert(x);
            let next_lrs = lrs_next + usize::from(self.lrs_pos[x].is_some());
            let flow = self.walk(st, next_lrs, next_changes, f);
            st.placed.remove(x);
            st.order.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn emit_shapes(
        &self,
        order: &[ActionId],
        f: &mut impl FnMut(&Layout) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        match &self.mode {
            GenerationMode::FixedShape(shape) => {
                let mut right = Vec::with_capacity(shape.len());
                let mut i = 0;
                for &len in shape {
                    right.push(order[i..i + len].to_vec());
                    i += len;
                }
                f(&self.assemble(right))
            }
            GenerationMode::FreeShape => {
                if order.is_empty() {
                    return f(&self.assemble(Vec::new()));
                }
                let mut right = Vec::new();
                self.splits(order, &mut right, f)
            }
        }
    }

    fn splits(
        &self,
        rest: &[ActionId],
        acc: &mut Vec<Vec<ActionId>>,
        f: &mut impl FnMut(&Layout) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if rest.is_empty() {
            return f(&self.assemble(acc.clone()));
        }
        for len in 1..=rest.len().min(self.capacity) {
            acc.push(rest[..len].to_vec());
            let flow = self.splits(&rest[len..], acc, f);
            acc.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
}

struct Walk {
    order: Vec<ActionId>,
    placed: ActionSet,
    nodes: usize,
    slots: Option<Vec<(usize, usize)>>,
}
