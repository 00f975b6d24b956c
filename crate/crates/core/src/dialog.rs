//! Accomplished-action monitoring and widget enablement derived from temporal operators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::action_set::{ActionId, ActionSet};
use crate::task_model::{TaskModel, TaskModelError, TemporalOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edit {
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonitorEvent {
    Accomplished(String),
    DeAccomplished(String),
}

type Listener = Box<dyn FnMut(&MonitorEvent) + Send>;

/// Ordered record of accomplished actions for one session.
#[derive(Default)]
pub struct ActionMonitorList {
    done: Vec<String>,
    listeners: Vec<Listener>,
}

impl std::fmt::Debug for ActionMonitorList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ActionMonitorList")
            .field("done", &self.done)
            .field("listeners", &self.listeners.len())
            .finish()
    }
}

impl Clone for ActionMonitorList {
    /// Listeners are not cloned.
    fn clone(&self) -> Self {
        Self {
            done: self.done.clone(),
            listeners: Vec::new(),
        }
    }
}

impl ActionMonitorList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn subscribe(&mut self, listener: impl FnMut(&MonitorEvent) + Send + 'static) {
        self.listeners.push(Box::new(listener));
    }

    pub fn ordered(&self) -> &[String] {
        &self.done
    }

    /// Deduplicated view as action ids.
    pub fn done_set(&self, model: &TaskModel) -> ActionSet {
        self.done
            .iter()
            .filter_map(|n| model.action_id(n).ok())
            .collect()
    }

    /// Applies an edit. Returns whether anything changed; removing an absent action is a
    /// no-op.
    pub fn record_action(
        &mut self,
        model: &TaskModel,
        action: &str,
        edit: Edit,
    ) -> Result<bool, TaskModelError> {
        model.action_id(action)?;
        let event = match edit {
            Edit::Add => {
                self.done.push(action.to_string());
                MonitorEvent::Accomplished(action.to_string())
            }
            Edit::Remove => {
                let Some(pos) = self.done.iter().rposition(|a| a == action) else {
                    return Ok(false);
                };
                self.done.remove(pos);
                MonitorEvent::DeAccomplished(action.to_string())
            }
        };
        for l in &mut self.listeners {
            l(&event);
        }
        Ok(true)
    }

    /// Text-input semantics: an emptied value removes, an unchanged value does nothing, any
    /// other change adds.
    pub fn record_value_change(
        &mut self,
        model: &TaskModel,
        action: &str,
        old: &str,
        new: &str,
    ) -> Result<bool, TaskModelError> {
        model.action_id(action)?;
        if old == new {
            Ok(false)
        } else if new.is_empty() {
            self.record_action(model, action, Edit::Remove)
        } else {
            self.record_action(model, action, Edit::Add)
        }
    }
}

/// Enabled actions of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnablementState {
    enabled: ActionSet,
    len: usize,
}

impl EnablementState {
    pub fn is_enabled(&self, action: ActionId) -> bool {
        self.enabled.contains(action)
    }

    pub fn enabled(&self) -> &ActionSet {
        &self.enabled
    }

    pub fn disabled(&self) -> ActionSet {
        (0..self.len)
            .filter(|a| !self.enabled.contains(*a))
            .collect()
    }

    pub fn to_map(&self, model: &TaskModel) -> BTreeMap<String, bool> {
        (0..self.len)
            .map(|a| (model.action_name(a).to_string(), self.enabled.contains(a)))
            .collect()
    }
}

/// Enablement from the accomplished set.
///
/// Every operator contributes disabled actions and the result is everything not disabled by
/// any of them. For `>>`, each adjacent operand pair is judged on whether its left part is
/// complete and its right part entered. `[>` disables the rest of its left side once the
/// right side is entered, `[]` commits to the branch holding a done action, and `|=|` blocks
/// the other operands while one is started but incomplete.
pub fn compute_enablement(model: &TaskModel, done: &ActionSet) -> EnablementState {
    let optional = model.optional_flags();
    let mut disabled = ActionSet::new();
    model.expr().visit_ops(&mut |op, operands| match op {
        TemporalOperator::Enabling => {
            for w in operands.windows(2) {
                let (left, right) = (&w[0], &w[1]);
                let left_complete = left.complete_on(done, optional);
                if left_complete && right.leaves.intersects(done) {
                    disabled.union_with(&left.leaves);
                } else if !left_complete {
                    disabled.union_with(&right.leaves);
                }
            }
        }
        TemporalOperator::Disabling => {
            let (left, right) = (&operands[0], &operands[1]);
            if right.leaves.intersects(done) {
                for a in left.leaves.iter().filter(|a| !done.contains(*a)) {
                    disabled.insert(a);
                }
            }
        }
        TemporalOperator::Choice => {
            if let Some(committed) = operands.iter().position(|e| e.leaves.intersects(done)) {
                for (i, e) in operands.iter().enumerate() {
                    if i != committed {
                        disabled.union_with(&e.leaves);
                    }
                }
            }
        }
        TemporalOperator::OrderIndependence => {
            let open = operands
                .iter()
                .position(|e| e.leaves.intersects(done) && !e.complete_on(done, optional));
            if let Some(open) = open {
                for (i, e) in operands.iter().enumerate() {
                    if i != open {
                        for a in e.leaves.iter().filter(|a| !done.contains(*a)) {
                            disabled.insert(a);
                        }
                    }
                }
            }
        }
        TemporalOperator::Concurrency => {}
    });
    let len = model.action_count();
    EnablementState {
        enabled: (0..len).filter(|a| !disabled.contains(*a)).collect(),
        len,
    }
}

/// Whether the accomplished set completes the model; optional actions never block.
pub fn is_session_complete(model: &TaskModel, done: &ActionSet) -> bool {
    model.expr().complete_on(done, model.optional_flags())
}
