//! W3C-style task models: a tree of tasks whose sibling relations are temporal operators.
//!
//! A [`TaskModel`] is validated once on construction and immutable afterwards. Leaves are
//! *actions*; they are numbered in depth-first, left-to-right order and referred to by
//! [`ActionId`] everywhere else in the crate.

mod process;
mod xml;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action_set::{ActionId, ActionSet};

pub use process::{ExecState, Expr, ExprKind, SequenceIter};
pub use xml::{parse_task_model, serialize_task_model};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaskModelError {
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("schema violation at line {line}: <{element}>: {message}")]
    Schema {
        element: String,
        line: u32,
        message: String,
    },
    #[error("duplicate task name `{0}`")]
    DuplicateName(String),
    #[error("unknown temporal operator `{0}`")]
    UnknownOperator(String),
    #[error("unknown data type `{0}`")]
    UnknownDataType(String),
    #[error("invalid task `{task}`: {message}")]
    Invalid { task: String, message: String },
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("limit must be at least 1")]
    ZeroLimit,
}

/// Temporal operator between two adjacent sibling tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TemporalOperator {
    /// `>>`: the left part must be completed before the right part starts.
    Enabling,
    /// `|||`: both parts interleave freely.
    Concurrency,
    /// `[]`: exactly one of the parts is performed.
    Choice,
    /// `[>`: the right part interrupts the left part.
    Disabling,
    /// `|=|`: both parts are performed one after the other, in any order.
    OrderIndependence,
}

impl TemporalOperator {
    /// Binding strength; higher binds tighter.
    pub fn priority(self) -> u8 {
        match self {
            TemporalOperator::Choice => 3,
            TemporalOperator::Concurrency | TemporalOperator::OrderIndependence => 2,
            TemporalOperator::Disabling => 1,
            TemporalOperator::Enabling => 0,
        }
    }

    /// Token used in the XML `kind` attribute.
    pub fn token(self) -> &'static str {
        match self {
            TemporalOperator::Enabling => ">>",
            TemporalOperator::Concurrency => "[II]",
            TemporalOperator::Choice => "[]",
            TemporalOperator::Disabling => "[>",
            TemporalOperator::OrderIndependence => "OI",
        }
    }

    /// Conventional notation, as printed in diagrams.
    pub fn symbol(self) -> &'static str {
        match self {
            TemporalOperator::Enabling => ">>",
            TemporalOperator::Concurrency => "|||",
            TemporalOperator::Choice => "[]",
            TemporalOperator::Disabling => "[>",
            TemporalOperator::OrderIndependence => "|=|",
        }
    }
}

impl FromStr for TemporalOperator {
    type Err = TaskModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            ">>" => TemporalOperator::Enabling,
            "[II]" | "|||" => TemporalOperator::Concurrency,
            "[]" => TemporalOperator::Choice,
            "[>" => TemporalOperator::Disabling,
            "OI" | "|=|" => TemporalOperator::OrderIndependence,
            other => return Err(TaskModelError::UnknownOperator(other.to_string())),
        })
    }
}

impl fmt::Display for TemporalOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskCategory {
    Abstract,
    Interactive,
    Manual,
    System,
}

impl TaskCategory {
    pub fn token(self) -> &'static str {
        match self {
            TaskCategory::Abstract => "abstract",
            TaskCategory::Interactive => "interactive",
            TaskCategory::Manual => "manual",
            TaskCategory::System => "system",
        }
    }
}

impl FromStr for TaskCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "abstract" => TaskCategory::Abstract,
            "interactive" | "interaction" => TaskCategory::Interactive,
            "manual" | "user" => TaskCategory::Manual,
            "system" | "application" => TaskCategory::System,
            other => return Err(format!("unknown category `{other}`")),
        })
    }
}

/// Kind of interaction an action performs; selects the abstract interaction component type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskType {
    Input,
    Output,
    Selection,
    Trigger,
}

impl TaskType {
    pub fn token(self) -> &'static str {
        match self {
            TaskType::Input => "input",
            TaskType::Output => "output",
            TaskType::Selection => "selection",
            TaskType::Trigger => "trigger",
        }
    }
}

impl FromStr for TaskType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "input" => TaskType::Input,
            "output" => TaskType::Output,
            "selection" => TaskType::Selection,
            "trigger" => TaskType::Trigger,
            other => return Err(format!("unknown task type `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DataType {
    Boolean,
    Hour,
    Date,
    Char,
    #[serde(rename = "URL")]
    Url,
    Hashtag,
    Media,
    String,
    Integer,
    Real,
    Enumeration,
    Method,
}

impl DataType {
    pub const ALL: [DataType; 12] = [
        DataType::Boolean,
        DataType::Hour,
        DataType::Date,
        DataType::Char,
        DataType::Url,
        DataType::Hashtag,
        DataType::Media,
        DataType::String,
        DataType::Integer,
        DataType::Real,
        DataType::Enumeration,
        DataType::Method,
    ];

    pub fn token(self) -> &'static str {
        match self {
            DataType::Boolean => "Boolean",
            DataType::Hour => "Hour",
            DataType::Date => "Date",
            DataType::Char => "Char",
            DataType::Url => "URL",
            DataType::Hashtag => "Hashtag",
            DataType::Media => "Media",
            DataType::String => "String",
            DataType::Integer => "Integer",
            DataType::Real => "Real",
            DataType::Enumeration => "Enumeration",
            DataType::Method => "Method",
        }
    }

    /// Whether the data type takes a property in the mapping table.
    pub fn takes_property(self) -> bool {
        matches!(
            self,
            DataType::String | DataType::Integer | DataType::Enumeration | DataType::Method
        )
    }
}

impl FromStr for DataType {
    type Err = TaskModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DataType::ALL
            .into_iter()
            .find(|d| d.token() == s)
            .ok_or_else(|| TaskModelError::UnknownDataType(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Direct,
    Indirect,
}

/// Length, digit count, or cardinality bound; or the kind of a method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Property {
    Bound(u32),
    Method(MethodKind),
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::Bound(n) => write!(f, "{n}"),
            Property::Method(MethodKind::Direct) => f.write_str("direct"),
            Property::Method(MethodKind::Indirect) => f.write_str("indirect"),
        }
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Property::Method(MethodKind::Direct)),
            "indirect" => Ok(Property::Method(MethodKind::Indirect)),
            n => n
                .parse::<u32>()
                .map(Property::Bound)
                .map_err(|_| format!("invalid property `{n}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DataAttribute {
    pub data_type: DataType,
    pub property: Option<Property>,
}

impl DataAttribute {
    pub fn new(data_type: DataType) -> Self {
        Self {
            data_type,
            property: None,
        }
    }

    pub fn with_property(data_type: DataType, property: Property) -> Self {
        Self {
            data_type,
            property: Some(property),
        }
    }
}

/// A node of the task tree. `operators[i]` relates `children[i]` and `children[i + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub name: String,
    pub description: String,
    pub optional: bool,
    pub category: TaskCategory,
    pub task_type: Option<TaskType>,
    pub data: Option<DataAttribute>,
    pub children: Vec<Task>,
    pub operators: Vec<TemporalOperator>,
}

impl Task {
    /// An interactive leaf.
    pub fn action(name: impl Into<String>, task_type: TaskType) -> Self {
        Task {
            name: name.into(),
            description: String::new(),
            optional: false,
            category: TaskCategory::Interactive,
            task_type: Some(task_type),
            data: None,
            children: Vec::new(),
            operators: Vec::new(),
        }
    }

    /// An abstract task over `children` joined by `operators`.
    pub fn composite(
        name: impl Into<String>,
        children: Vec<Task>,
        operators: Vec<TemporalOperator>,
    ) -> Self {
        Task {
            name: name.into(),
            description: String::new(),
            optional: false,
            category: TaskCategory::Abstract,
            task_type: None,
            data: None,
            children,
            operators,
        }
    }

    pub fn optional(mut self) -> Self {
        self.optional = true;
        self
    }

    pub fn with_data(mut self, data: DataAttribute) -> Self {
        self.data = Some(data);
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    fn all_leaves_optional(&self) -> bool {
        if self.is_leaf() {
            self.optional
        } else {
            self.children.iter().all(Task::all_leaves_optional)
        }
    }
}

#[derive(Debug, Clone)]
struct NodeInfo {
    parent: Option<usize>,
    depth: usize,
}

/// A validated task model.
#[derive(Debug, Clone)]
pub struct TaskModel {
    name: String,
    root: Task,
    actions: Vec<String>,
    action_index: HashMap<String, ActionId>,
    optional: Vec<bool>,
    leaves: Vec<Task>,
    nodes: Vec<NodeInfo>,
    node_names: Vec<String>,
    action_node: Vec<usize>,
    expr: Expr,
    /// For every task node, in preorder: the set of actions below it.
    node_leaves: Vec<ActionSet>,
}

impl PartialEq for TaskModel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.root == other.root
    }
}

impl TaskModel {
    /// Validates `root` and builds the model.
    pub fn new(name: impl Into<String>, root: Task) -> Result<Self, TaskModelError> {
        let mut model = TaskModel {
            name: name.into(),
            root: root.clone(),
            actions: Vec::new(),
            action_index: HashMap::new(),
            optional: Vec::new(),
            leaves: Vec::new(),
            nodes: Vec::new(),
            node_names: Vec::new(),
            action_node: Vec::new(),
            expr: Expr::action(0),
            node_leaves: Vec::new(),
        };
        let mut seen = HashMap::new();
        model.index(&root, None, 0, &mut seen)?;
        model.node_leaves = vec![ActionSet::new(); model.nodes.len()];
        for (action, &node) in model.action_node.iter().enumerate() {
            let mut cur = Some(node);
            while let Some(n) = cur {
                model.node_leaves[n].insert(action);
                cur = model.nodes[n].parent;
            }
        }
        model.expr = process::build_expr(&root, &model.action_index);
        Ok(model)
    }

    fn index(
        &mut self,
        task: &Task,
        parent: Option<usize>,
        depth: usize,
        seen: &mut HashMap<String, ()>,
    ) -> Result<(), TaskModelError> {
        let invalid = |message: &str| TaskModelError::Invalid {
            task: task.name.clone(),
            message: message.to_string(),
        };
        if task.name.trim().is_empty() {
            return Err(invalid("empty task name"));
        }
        if seen.insert(task.name.clone(), ()).is_some() {
            return Err(TaskModelError::DuplicateName(task.name.clone()));
        }
        let id = self.nodes.len();
        self.nodes.push(NodeInfo { parent, depth });
        self.node_names.push(task.name.clone());
        if task.is_leaf() {
            if task.task_type.is_none() {
                return Err(invalid("leaf task needs a task type"));
            }
            if !task.operators.is_empty() {
                return Err(invalid("leaf task cannot carry operators"));
            }
            let action = self.actions.len();
            self.actions.push(task.name.clone());
            self.action_index.insert(task.name.clone(), action);
            self.optional.push(task.optional);
            let mut leaf = task.clone();
            leaf.children.clear();
            self.leaves.push(leaf);
            self.action_node.push(id);
            return Ok(());
        }
        if task.children.len() < 2 {
            return Err(invalid("a composite task needs at least two children"));
        }
        if task.operators.len() != task.children.len() - 1 {
            return Err(invalid(
                "every pair of adjacent children needs exactly one operator",
            ));
        }
        if task.optional && !task.all_leaves_optional() {
            return Err(invalid(
                "a composite task can only be optional when all its actions are",
            ));
        }
        for child in &task.children {
            self.index(child, Some(id), depth + 1, seen)?;
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root(&self) -> &Task {
        &self.root
    }

    /// Action names in DFS order; the position is the [`ActionId`].
    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn action_id(&self, name: &str) -> Result<ActionId, TaskModelError> {
        self.action_index
            .get(name)
            .copied()
            .ok_or_else(|| TaskModelError::UnknownAction(name.to_string()))
    }

    pub fn action_name(&self, id: ActionId) -> &str {
        &self.actions[id]
    }

    pub fn action_task(&self, id: ActionId) -> &Task {
        &self.leaves[id]
    }

    pub fn is_optional(&self, id: ActionId) -> bool {
        self.optional[id]
    }

    pub fn all_actions(&self) -> ActionSet {
        (0..self.actions.len()).collect()
    }

    pub fn mandatory_actions(&self) -> ActionSet {
        (0..self.actions.len())
            .filter(|&a| !self.optional[a])
            .collect()
    }

    /// Resolves names to ids.
    pub fn ids<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<ActionId>, TaskModelError> {
        names.iter().map(|n| self.action_id(n.as_ref())).collect()
    }

    pub fn names(&self, ids: &[ActionId]) -> Vec<String> {
        ids.iter().map(|&a| self.actions[a].clone()).collect()
    }

    /// The operator expression tree, with sibling operators grouped by priority.
    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Depth-first, left-to-right leaf order.
    pub fn dfs_linearization(&self) -> Vec<String> {
        self.actions.clone()
    }

    /// Number of tree edges on the path between two actions.
    pub fn task_distance(&self, a: &str, b: &str) -> Result<usize, TaskModelError> {
        let (a, b) = (self.action_id(a)?, self.action_id(b)?);
        Ok(self.distance_between(self.action_node[a], self.action_node[b]))
    }

    fn distance_between(&self, mut x: usize, mut y: usize) -> usize {
        let mut steps = 0;
        while self.nodes[x].depth > self.nodes[y].depth {
            x = self.nodes[x].parent.expect("non-root has a parent");
            steps += 1;
        }
        while self.nodes[y].depth > self.nodes[x].depth {
            y = self.nodes[y].parent.expect("non-root has a parent");
            steps += 1;
        }
        while x != y {
            x = self.nodes[x].parent.expect("common root");
            y = self.nodes[y].parent.expect("common root");
            steps += 2;
        }
        steps
    }

    /// Task-node index (preorder) of the deepest common ancestor of the given actions.
    pub(crate) fn common_ancestor(&self, actions: &[ActionId]) -> usize {
        let mut iter = actions.iter();
        let Some(&first) = iter.next() else {
            return 0;
        };
        let mut anc = self.action_node[first];
        for &a in iter {
            let mut y = self.action_node[a];
            let mut x = anc;
            while self.nodes[x].depth > self.nodes[y].depth {
                x = self.nodes[x].parent.unwrap();
            }
            while self.nodes[y].depth > self.nodes[x].depth {
                y = self.nodes[y].parent.unwrap();
            }
            while x != y {
                x = self.nodes[x].parent.unwrap();
                y = self.nodes[y].parent.unwrap();
            }
            anc = x;
        }
        anc
    }

    /// The child of `ancestor` on the path down to `action`, or the action's own node when
    /// `ancestor` is that node.
    pub(crate) fn child_towards(&self, ancestor: usize, action: ActionId) -> usize {
        let mut node = self.action_node[action];
        while let Some(p) = self.nodes[node].parent {
            if p == ancestor {
                return node;
            }
            node = p;
        }
        node
    }

    pub(crate) fn node_name(&self, node: usize) -> &str {
        &self.node_names[node]
    }

    pub(crate) fn node_leaves(&self, node: usize) -> &ActionSet {
        &self.node_leaves[node]
    }

    /// Every task node (preorder index) that has more than one action below it.
    pub(crate) fn composite_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&n| self.node_leaves[n].len() > 1)
    }

    /// Top-level branches of the root: each composite child is one branch, consecutive leaf
    /// children are grouped together. A leaf root is a single branch.
    pub fn top_level_branches(&self) -> Vec<(String, Vec<ActionId>)> {
        if self.root.is_leaf() {
            return vec![(self.root.name.clone(), vec![0])];
        }
        let mut branches: Vec<(String, Vec<ActionId>)> = Vec::new();
        let mut pending_leaves: Vec<ActionId> = Vec::new();
        let mut pending_name = String::new();
        for child in &self.root.children {
            let ids: Vec<ActionId> = leaves_of(child)
                .iter()
                .map(|n| self.action_index[*n])
                .collect();
            if child.is_leaf() {
                if pending_leaves.is_empty() {
                    pending_name = child.name.clone();
                }
                pending_leaves.extend(ids);
            } else {
                if !pending_leaves.is_empty() {
                    branches.push((
                        std::mem::take(&mut pending_name),
                        std::mem::take(&mut pending_leaves),
                    ));
                }
                branches.push((child.name.clone(), ids));
            }
        }
        if !pending_leaves.is_empty() {
            branches.push((pending_name, pending_leaves));
        }
        branches
    }

    /// Pairs `(left, right)` of action sets that must be laid out and performed in that order
    /// (from `>>` and `[>` operators).
    pub fn precedence_pairs(&self) -> Vec<(ActionSet, ActionSet)> {
        let mut out = Vec::new();
        self.expr.collect_precedence(&mut out);
        out
    }

    /// Lazily enumerates every action sequence the temporal operators allow, in
    /// lexicographic order over DFS positions (a sequence precedes its extensions).
    pub fn sequences(&self) -> SequenceIter<'_> {
        SequenceIter::new(self)
    }

    /// Collects enumerated sequences as action names; `limit` caps the count.
    pub fn enumerate_action_sequences(
        &self,
        limit: Option<usize>,
    ) -> Result<Vec<ActionSequence>, TaskModelError> {
        if limit == Some(0) {
            return Err(TaskModelError::ZeroLimit);
        }
        let iter = self.sequences();
        let ids: Vec<Vec<ActionId>> = match limit {
            Some(n) => iter.take(n).collect(),
            None => iter.collect(),
        };
        Ok(ids
            .into_iter()
            .map(|s| ActionSequence::simulated(self.names(&s)))
            .collect())
    }

    /// Fresh execution state for replaying actions.
    pub fn start_state(&self) -> ExecState {
        ExecState::initial(&self.expr, &self.optional)
    }

    /// Steps `state` with `action`; returns `false` if the action is not currently legal.
    pub fn step(&self, state: &mut ExecState, action: ActionId) -> bool {
        state.step(&self.expr, action)
    }

    pub fn is_complete_state(&self, state: &ExecState) -> bool {
        state.complete(&self.expr)
    }

    pub fn enabled_in_state(&self, state: &ExecState) -> ActionSet {
        let mut out = ActionSet::new();
        state.enabled(&self.expr, &mut out);
        out
    }

    /// Whether `actions` is a legal (prefix of a) sequence.
    pub fn accepts_prefix(&self, actions: &[ActionId]) -> bool {
        let mut st = self.start_state();
        actions.iter().all(|&a| self.step(&mut st, a))
    }

    pub fn optional_flags(&self) -> &[bool] {
        &self.optional
    }
}

pub(crate) fn leaves_of(task: &Task) -> Vec<&str> {
    if task.is_leaf() {
        return vec![task.name.as_str()];
    }
    task.children.iter().flat_map(leaves_of).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceSource {
    Simulated,
    Monitored,
}

/// An ordered list of action names with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionSequence {
    pub actions: Vec<String>,
    pub source: SequenceSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
}

impl ActionSequence {
    pub fn simulated(actions: Vec<String>) -> Self {
        Self {
            actions,
            source: SequenceSource::Simulated,
            session_id: None,
        }
    }

    pub fn monitored(actions: Vec<String>, session_id: Option<String>) -> Self {
        Self {
            actions,
            source: SequenceSource::Monitored,
            session_id,
        }
    }

    /// Fails with the first action that is not in `model`'s vocabulary.
    pub fn validate(&self, model: &TaskModel) -> Result<(), TaskModelError> {
        model.ids(&self.actions).map(|_| ())
    }
}

#[cfg(test)]
pub(crate) mod tests;
