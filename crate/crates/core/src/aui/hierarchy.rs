use serde::{Deserialize, Serialize};

use crate::action_set::ActionId;
use crate::task_model::TaskModel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HierarchyNode {
    Action(ActionId),
    Group {
        task: String,
        children: Vec<HierarchyNode>,
    },
}

/// Nests a flat component order along the task tree: consecutive components that share a
/// child of their deepest common ancestor become a group named after that child, recursively.
/// Order is preserved; a task whose components are not adjacent yields several groups.
pub fn express_inside_hierarchy(model: &TaskModel, actions: &[ActionId]) -> Vec<HierarchyNode> {
    if actions.len() <= 1 {
        return actions.iter().map(|&a| HierarchyNode::Action(a)).collect();
    }
    let anchor = model.common_ancestor(actions);
    let mut out = Vec::new();
    let mut i = 0;
    while i < actions.len() {
        let child = model.child_towards(anchor, actions[i]);
        let mut j = i + 1;
        while j < actions.len() && model.child_towards(anchor, actions[j]) == child {
            j += 1;
        }
        let run = &actions[i..j];
        if run.len() == 1 {
            out.push(HierarchyNode::Action(run[0]));
        } else {
            out.push(HierarchyNode::Group {
                task: model.node_name(child).to_string(),
                children: express_inside_hierarchy(model, run),
            });
        }
        i = j;
    }
    out
}
