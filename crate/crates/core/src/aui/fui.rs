use serde::{Deserialize, Serialize};

use crate::dialog::EnablementState;

use super::{AbstractContainer, AbstractUI, AuiNode, WidgetKind};

pub const FUI_VERSION: u32 = 1;

/// Renderable widget-tree document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuiDocument {
    pub version: u32,
    pub model: String,
    pub current_panel: usize,
    pub panels: Vec<FuiPanel>,
    pub rating: FuiRating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuiPanel {
    pub id: String,
    pub index: usize,
    pub label: String,
    pub widgets: Vec<FuiWidget>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<FuiGroup>,
    pub nav: FuiNav,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuiGrid {
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuiWidget {
    pub id: String,
    pub kind: WidgetKind,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    pub grid: FuiGrid,
    pub enabled: bool,
    pub action: String,
}

/// Widgets nested under a task of the hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuiGroup {
    pub label: String,
    pub widgets: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<FuiGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuiNavTarget {
    pub target: Option<usize>,
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuiNav {
    pub prev: FuiNavTarget,
    pub next: FuiNavTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuiRating {
    pub min: u8,
    pub max: u8,
}

pub fn widget_id(action_id: usize) -> String {
    format!("w{action_id}")
}

/// One panel per container, one widget per component, navigation wired to neighbouring
/// panels, and a 1 to 5 rating. Enablement comes from `enablement`.
pub fn reify_to_fui(
    aui: &AbstractUI,
    enablement: &EnablementState,
    current_panel: usize,
) -> FuiDocument {
    let panels: Vec<&AbstractContainer> = aui.panels().collect();
    let count = panels.len();
    let panels = panels
        .into_iter()
        .enumerate()
        .map(|(index, panel)| {
            let widgets = panel
                .components()
                .into_iter()
                .map(|c| FuiWidget {
                    id: widget_id(c.action_id),
                    kind: c.widget.kind,
                    label: c.action.clone(),
                    pattern: c.widget.pattern.clone(),
                    grid: FuiGrid {
                        row: c.widget.grid.0,
                        col: c.widget.grid.1,
                    },
                    enabled: enablement.is_enabled(c.action_id),
                    action: c.action.clone(),
                })
                .collect();
            FuiPanel {
                id: format!("p{index}"),
                index,
                label: panel.label.clone(),
                widgets,
                groups: groups(&panel.children),
                nav: FuiNav {
                    prev: FuiNavTarget {
                        target: index.checked_sub(1),
                        enabled: index > 0,
                    },
                    next: FuiNavTarget {
                        target: (index + 1 < count).then_some(index + 1),
                        enabled: index + 1 < count,
                    },
                },
            }
        })
        .collect();
    FuiDocument {
        version: FUI_VERSION,
        model: aui.root.label.clone(),
        current_panel,
        panels,
        rating: FuiRating { min: 1, max: 5 },
    }
}

fn groups(children: &[AuiNode]) -> Vec<FuiGroup> {
    children
        .iter()
        .filter_map(|child| match child {
            AuiNode::Container(c) => Some(FuiGroup {
                label: c.label.clone(),
                widgets: c
                    .components()
                    .iter()
                    .map(|w| widget_id(w.action_id))
                    .collect(),
                groups: groups(&c.children),
            }),
            AuiNode::Component(_) => None,
        })
        .collect()
}
