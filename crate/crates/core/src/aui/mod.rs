//! Abstract user interfaces: layout generation under task-model constraints, scoring, k-best
//! search and reification into widget-tree documents.

mod fui;
mod generate;
mod hierarchy;
mod score;
mod search;
mod table;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action_set::ActionId;
use crate::task_model::{TaskModel, TaskModelError};

pub use fui::{
    reify_to_fui, widget_id, FuiDocument, FuiGrid, FuiGroup, FuiNav, FuiNavTarget, FuiPanel,
    FuiRating, FuiWidget, FUI_VERSION,
};
pub use generate::{replays_cleanly, GenerationMode, Reification, ReificationBuilder, Violation};
pub use hierarchy::{express_inside_hierarchy, HierarchyNode};
pub use score::{
    content_score, grid_cells, layout_appropriateness, ordering_score, task_conformance_score,
    ScoreBreakdown, ScoreWeights, Scorer, DECLINE_MALUS,
};
pub use search::{exhaustive_k_best, k_best_search, KBest, ScoredAui, SearchConfig};
pub use table::{
    map_attribute_to_aic, map_task, AicType, WidgetKind, WidgetSpec, DATE_PATTERN, HASHTAG_PATTERN,
    HOUR_PATTERN,
};

/// Default number of components per container.
pub const DEFAULT_CAPACITY: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuiError {
    #[error("no mapping row for data type {data_type} with property {property:?}")]
    NoMappingRow {
        data_type: String,
        property: Option<String>,
    },
    #[error("container capacity must be at least 1")]
    ZeroCapacity,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("the constraints admit no layout")]
    Unsatisfiable,
    #[error("action `{0}` has no placement in the layout")]
    Unplaced(String),
    #[error(transparent)]
    Model(#[from] TaskModelError),
}

/// Ordered containers of actions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Layout {
    pub containers: Vec<Vec<ActionId>>,
}

/// Container index and position of each action; `None` when the action is not laid out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReificationVars {
    pub container: Vec<Option<usize>>,
    pub order: Vec<Option<usize>>,
}

impl Layout {
    pub fn new(containers: Vec<Vec<ActionId>>) -> Self {
        Self { containers }
    }

    /// One container per top-level branch of the task tree, in depth-first order, split into
    /// chunks of at most `capacity` actions.
    pub fn dfs_initial(model: &TaskModel, capacity: usize) -> Self {
        let capacity = capacity.max(1);
        let mut containers = Vec::new();
        for (_, actions) in model.top_level_branches() {
            for chunk in actions.chunks(capacity) {
                containers.push(chunk.to_vec());
            }
        }
        Self { containers }
    }

    pub fn flatten(&self) -> Vec<ActionId> {
        self.containers.iter().flatten().copied().collect()
    }

    pub fn action_count(&self) -> usize {
        self.containers.iter().map(Vec::len).sum()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.containers.iter().map(Vec::len).collect()
    }

    /// Structural identity used for deduplication, e.g. `0,1|2`.
    pub fn fingerprint(&self) -> String {
        self.containers
            .iter()
            .map(|c| {
                c.iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("|")
    }

    pub fn vars(&self, action_count: usize) -> ReificationVars {
        let mut vars = ReificationVars {
            container: vec![None; action_count],
            order: vec![None; action_count],
        };
        for (ci, c) in self.containers.iter().enumerate() {
            for (pos, &a) in c.iter().enumerate() {
                if a < action_count {
                    vars.container[a] = Some(ci);
                    vars.order[a] = Some(pos);
                }
            }
        }
        vars
    }

    pub fn placement_of(&self, action: ActionId) -> Option<(usize, usize)> {
        self.containers
            .iter()
            .enumerate()
            .find_map(|(ci, c)| c.iter().position(|&a| a == action).map(|pos| (ci, pos)))
    }

    /// Number of actions whose `(container, position)` differs between the two layouts,
    /// counting actions present in only one of them.
    pub fn placement_changes(&self, other: &Layout) -> usize {
        let n = self
            .flatten()
            .into_iter()
            .chain(other.flatten())
            .max()
            .map_or(0, |m| m + 1);
        let a = self.vars(n);
        let b = other.vars(n);
        (0..n)
            .filter(|&i| (a.container[i], a.order[i]) != (b.container[i], b.order[i]))
            .count()
    }

    pub fn names(&self, model: &TaskModel) -> Vec<Vec<String>> {
        self.containers.iter().map(|c| model.names(c)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Initial,
    Adapted { iteration: u32 },
    GroupMember { user: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbstractComponent {
    pub action: String,
    pub action_id: ActionId,
    pub aic_type: AicType,
    pub widget: WidgetSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum AuiNode {
    Container(AbstractContainer),
    Component(AbstractComponent),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbstractContainer {
    pub label: String,
    pub source_task: Option<String>,
    pub children: Vec<AuiNode>,
}

impl AbstractContainer {
    pub fn components(&self) -> Vec<&AbstractComponent> {
        let mut out = Vec::new();
        for child in &self.children {
            match child {
                AuiNode::Component(c) => out.push(c),
                AuiNode::Container(c) => out.extend(c.components()),
            }
        }
        out
    }
}

/// An abstract UI: a root whose children are the panels, each nested along the task
/// hierarchy, plus the flat layout it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbstractUI {
    pub root: AbstractContainer,
    pub layout: Layout,
    pub provenance: Provenance,
}

impl AbstractUI {
    pub fn from_layout(
        model: &TaskModel,
        layout: &Layout,
        provenance: Provenance,
    ) -> Result<Self, AuiError> {
        let cells = grid_cells(layout);
        let mut panels = Vec::new();
        for actions in &layout.containers {
            let anchor = model.common_ancestor(actions);
            let label = if actions.is_empty() {
                String::new()
            } else {
                model.node_name(anchor).to_string()
            };
            let nodes = express_inside_hierarchy(model, actions);
            let children = nodes
                .iter()
                .map(|n| build_node(model, n, &cells))
                .collect::<Result<Vec<_>, _>>()?;
            panels.push(AuiNode::Container(AbstractContainer {
                source_task: Some(label.clone()),
                label,
                children,
            }));
        }
        Ok(Self {
            root: AbstractContainer {
                label: model.name().to_string(),
                source_task: Some(model.root().name.clone()),
                children: panels,
            },
            layout: layout.clone(),
            provenance,
        })
    }

    pub fn panels(&self) -> impl Iterator<Item = &AbstractContainer> {
        self.root.children.iter().filter_map(|c| match c {
            AuiNode::Container(c) => Some(c),
            AuiNode::Component(_) => None,
        })
    }
}

fn build_node(
    model: &TaskModel,
    node: &HierarchyNode,
    cells: &std::collections::HashMap<ActionId, (usize, usize, usize)>,
) -> Result<AuiNode, AuiError> {
    Ok(match node {
        HierarchyNode::Action(a) => {
            let (aic_type, kind, pattern) = map_task(model.action_task(*a))?;
            let &(_, row, col) = cells
                .get(a)
                .ok_or_else(|| AuiError::Unplaced(model.action_name(*a).to_string()))?;
            AuiNode::Component(AbstractComponent {
                action: model.action_name(*a).to_string(),
                action_id: *a,
                aic_type,
                widget: WidgetSpec {
                    kind,
                    pattern,
                    grid: (row, col),
                },
            })
        }
        HierarchyNode::Group { task, children } => AuiNode::Container(AbstractContainer {
            label: task.clone(),
            source_task: Some(task.clone()),
            children: children
                .iter()
                .map(|c| build_node(model, c, cells))
                .collect::<Result<Vec<_>, _>>()?,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn names(model: &TaskModel, layout: &Layout) -> Vec<Vec<String>> {
        layout.names(model)
    }

    #[test]
    fn initial_layouts_follow_top_level_branches() {
        let m = fixtures::fig4();
        let l = Layout::dfs_initial(&m, DEFAULT_CAPACITY);
        assert_eq!(
            names(&m, &l),
            vec![vec!["T1", "T2"], vec!["T3", "T4"], vec!["T5", "T6", "T7"]]
        );
        let m = fixtures::example1();
        let l = Layout::dfs_initial(&m, DEFAULT_CAPACITY);
        assert_eq!(names(&m, &l), vec![vec!["T11", "T12"], vec!["T2", "T3"]]);
        let m = fixtures::car_rental();
        assert_eq!(
            Layout::dfs_initial(&m, DEFAULT_CAPACITY).containers.len(),
            5
        );
        let m = fixtures::bank_transfer();
        assert_eq!(
            Layout::dfs_initial(&m, DEFAULT_CAPACITY).shape(),
            vec![5, 1, 2, 2]
        );
        assert_eq!(Layout::dfs_initial(&m, 2).shape(), vec![2, 2, 1, 1, 2, 2]);
    }

    #[test]
    fn placement_changes_count_moved_actions() {
        let a = Layout::new(vec![vec![0, 1], vec![2, 3]]);
        let b = Layout::new(vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(a.placement_changes(&b), 2);
        assert_eq!(a.placement_changes(&a), 0);
        let c = Layout::new(vec![vec![0, 1], vec![2]]);
        assert_eq!(a.placement_changes(&c), 1);
        assert_eq!(a.fingerprint(), "0,1|2,3");
        let vars = b.vars(4);
        assert_eq!(vars.container, vec![Some(0), Some(1), Some(0), Some(1)]);
        assert_eq!(vars.order, vec![Some(0), Some(0), Some(1), Some(1)]);
    }

    #[test]
    fn abstract_ui_nests_along_hierarchy() {
        let m = fixtures::example1();
        let layout = Layout::new(vec![m.ids(&["T12", "T11", "T2", "T3"]).unwrap()]);
        let aui = AbstractUI::from_layout(&m, &layout, Provenance::Initial).unwrap();
        let panel = aui.panels().next().unwrap();
        assert_eq!(panel.label, "T");
        assert!(matches!(&panel.children[0], AuiNode::Container(c) if c.label == "T1"));
        let comps: Vec<&str> = panel
            .components()
            .iter()
            .map(|c| c.action.as_str())
            .collect();
        assert_eq!(comps, vec!["T12", "T11", "T2", "T3"]);
    }
}
