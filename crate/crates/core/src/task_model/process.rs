//! Operational semantics of temporal operators.
//!
//! Sibling lists are grouped into an expression tree by operator priority, then executed by a
//! small state machine. The same machine drives sequence enumeration, replay checks and
//! session completion.

use std::collections::HashMap;

use super::{Task, TaskModel, TemporalOperator};
use crate::action_set::{ActionId, ActionSet};

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Action(ActionId),
    Op(TemporalOperator, Vec<Expr>),
}

/// Operator expression with the set of actions below each node.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub leaves: ActionSet,
}

impl Expr {
    pub(crate) fn action(id: ActionId) -> Self {
        Expr {
            kind: ExprKind::Action(id),
            leaves: std::iter::once(id).collect(),
        }
    }

    fn op(op: TemporalOperator, operands: Vec<Expr>) -> Self {
        let mut leaves = ActionSet::new();
        for e in &operands {
            leaves.union_with(&e.leaves);
        }
        Expr {
            kind: ExprKind::Op(op, operands),
            leaves,
        }
    }

    pub(crate) fn collect_precedence(&self, out: &mut Vec<(ActionSet, ActionSet)>) {
        if let ExprKind::Op(op, operands) = &self.kind {
            if matches!(op, TemporalOperator::Enabling | TemporalOperator::Disabling) {
                for w in operands.windows(2) {
                    out.push((w[0].leaves.clone(), w[1].leaves.clone()));
                }
            }
            for e in operands {
                e.collect_precedence(out);
            }
        }
    }

    /// Visits every operator node, outermost (weakest binding) first.
    pub fn visit_ops<'a>(&'a self, f: &mut impl FnMut(TemporalOperator, &'a [Expr])) {
        if let ExprKind::Op(op, operands) = &self.kind {
            f(*op, operands);
            for e in operands {
                e.visit_ops(f);
            }
        }
    }

    /// Whether the part is complete given only the set of accomplished actions.
    pub(crate) fn complete_on(&self, done: &ActionSet, optional: &[bool]) -> bool {
        match &self.kind {
            ExprKind::Action(a) => done.contains(*a) || optional[*a],
            ExprKind::Op(op, operands) => match op {
                TemporalOperator::Choice => {
                    match operands.iter().find(|e| e.leaves.intersects(done)) {
                        Some(committed) => committed.complete_on(done, optional),
                        None => operands.iter().any(|e| e.complete_on(done, optional)),
                    }
                }
                TemporalOperator::Disabling => {
                    let (left, right) = (&operands[0], &operands[1]);
                    let right_done = right.complete_on(done, optional);
                    (right.leaves.intersects(done) && right_done)
                        || (left.complete_on(done, optional) && right_done)
                }
                _ => operands.iter().all(|e| e.complete_on(done, optional)),
            },
        }
    }
}

pub(crate) fn build_expr(task: &Task, index: &HashMap<String, ActionId>) -> Expr {
    if task.is_leaf() {
        return Expr::action(index[&task.name]);
    }
    let operands: Vec<Expr> = task.children.iter().map(|c| build_expr(c, index)).collect();
    group(operands, &task.operators)
}

/// Splits at the weakest operators, recursing into the segments between them.
fn group(mut operands: Vec<Expr>, ops: &[TemporalOperator]) -> Expr {
    if ops.is_empty() {
        return operands.pop().expect("one operand");
    }
    let weakest = ops.iter().map(|o| o.priority()).min().unwrap();
    let mut segments = Vec::new();
    let mut split_ops = Vec::new();
    let mut seg_operands = Vec::new();
    let mut seg_ops = Vec::new();
    let mut iter = operands.into_iter();
    seg_operands.push(iter.next().unwrap());
    for (op, operand) in ops.iter().zip(iter) {
        if op.priority() == weakest {
            segments.push(group(
                std::mem::take(&mut seg_operands),
                &std::mem::take(&mut seg_ops),
            ));
            split_ops.push(*op);
        } else {
            seg_ops.push(*op);
        }
        seg_operands.push(operand);
    }
    segments.push(group(seg_operands, &seg_ops));

    let homogeneous = split_ops.iter().all(|o| *o == split_ops[0]);
    let n_ary = homogeneous && split_ops[0] != TemporalOperator::Disabling;
    if n_ary {
        return Expr::op(split_ops[0], segments);
    }
    // Mixed kinds of equal priority, or disabling: fold left-associatively into binary nodes.
    let mut iter = segments.into_iter();
    let mut acc = iter.next().unwrap();
    for (op, rhs) in split_ops.into_iter().zip(iter) {
        acc = Expr::op(op, vec![acc, rhs]);
    }
    acc
}

/// Execution state mirroring the shape of an [`Expr`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExecState {
    Action {
        done: bool,
        optional: bool,
    },
    Seq {
        pos: usize,
        children: Vec<ExecState>,
    },
    Conc(Vec<ExecState>),
    OrderIndep {
        active: Option<usize>,
        finished: Vec<bool>,
        children: Vec<ExecState>,
    },
    Choice {
        chosen: Option<usize>,
        children: Vec<ExecState>,
    },
    Disable {
        right_started: bool,
        left: Box<ExecState>,
        right: Box<ExecState>,
    },
}

impl ExecState {
    pub(crate) fn initial(expr: &Expr, optional: &[bool]) -> Self {
        match &expr.kind {
            ExprKind::Action(a) => ExecState::Action {
                done: false,
                optional: optional[*a],
            },
            ExprKind::Op(op, operands) => {
                let children: Vec<ExecState> = operands
                    .iter()
                    .map(|e| ExecState::initial(e, optional))
                    .collect();
                match op {
                    TemporalOperator::Enabling => ExecState::Seq { pos: 0, children },
                    TemporalOperator::Concurrency => ExecState::Conc(children),
                    TemporalOperator::OrderIndependence => ExecState::OrderIndep {
                        active: None,
                        finished: vec![false; children.len()],
                        children,
                    },
                    TemporalOperator::Choice => ExecState::Choice {
                        chosen: None,
                        children,
                    },
                    TemporalOperator::Disabling => {
                        let mut it = children.into_iter();
                        ExecState::Disable {
                            right_started: false,
                            left: Box::new(it.next().unwrap()),
                            right: Box::new(it.next().unwrap()),
                        }
                    }
                }
            }
        }
    }

    fn operands(expr: &Expr) -> &[Expr] {
        match &expr.kind {
            ExprKind::Op(_, operands) => operands,
            ExprKind::Action(_) => &[],
        }
    }

    pub(crate) fn complete(&self, expr: &Expr) -> bool {
        let ops = Self::operands(expr);
        match self {
            ExecState::Action { done, optional } => *done || *optional,
            ExecState::Seq { pos, children } => children[*pos..]
                .iter()
                .zip(&ops[*pos..])
                .all(|(s, e)| s.complete(e)),
            ExecState::Conc(children) => children.iter().zip(ops).all(|(s, e)| s.complete(e)),
            ExecState::OrderIndep {
                finished, children, ..
            } => children
                .iter()
                .zip(ops)
                .zip(finished)
                .all(|((s, e), &f)| f || s.complete(e)),
            ExecState::Choice { chosen, children } => match chosen {
                Some(i) => children[*i].complete(&ops[*i]),
                None => children.iter().zip(ops).any(|(s, e)| s.complete(e)),
            },
            ExecState::Disable {
                right_started,
                left,
                right,
            } => {
                if *right_started {
                    right.complete(&ops[1])
                } else {
                    left.complete(&ops[0]) && right.complete(&ops[1])
                }
            }
        }
    }

    pub(crate) fn enabled(&self, expr: &Expr, out: &mut ActionSet) {
        let ops = Self::operands(expr);
        match self {
            ExecState::Action { done, .. } => {
                if !done {
                    if let ExprKind::Action(a) = expr.kind {
                        out.insert(a);
                    }
                }
            }
            ExecState::Seq { pos, children } => {
                let mut i = *pos;
                loop {
                    children[i].enabled(&ops[i], out);
                    if i + 1 < children.len() && children[i].complete(&ops[i]) {
                        i += 1;
                    } else {
                        break;
                    }
                }
            }
            ExecState::Conc(children) => {
                for (s, e) in children.iter().zip(ops) {
                    s.enabled(e, out);
                }
            }
            ExecState::OrderIndep {
                active,
                finished,
                children,
            } => {
                if let Some(i) = active {
                    children[*i].enabled(&ops[*i], out);
                    if !children[*i].complete(&ops[*i]) {
                        return;
                    }
                }
                for (j, (s, e)) in children.iter().zip(ops).enumerate() {
                    if Some(j) != *active && !finished[j] {
                        s.enabled(e, out);
                    }
                }
            }
            ExecState::Choice { chosen, children } => match chosen {
                Some(i) => children[*i].enabled(&ops[*i], out),
                None => {
                    for (s, e) in children.iter().zip(ops) {
                        s.enabled(e, out);
                    }
                }
            },
            ExecState::Disable {
                right_started,
                left,
                right,
            } => {
                if !*right_started {
                    left.enabled(&ops[0], out);
                }
                right.enabled(&ops[1], out);
            }
        }
    }

    fn can_take(&self, expr: &Expr, a: ActionId) -> bool {
        let mut set = ActionSet::new();
        self.enabled(expr, &mut set);
        set.contains(a)
    }

    pub(crate) fn step(&mut self, expr: &Expr, a: ActionId) -> bool {
        if !expr.leaves.contains(a) {
            return false;
        }
        let ops = Self::operands(expr);
        match self {
            ExecState::Action { done, .. } => {
                if *done {
                    false
                } else {
                    *done = true;
                    true
                }
            }
            ExecState::Seq { pos, children } => {
                let Some(j) = ops.iter().position(|e| e.leaves.contains(a)) else {
                    return false;
                };
                if j < *pos {
                    return false;
                }
                if !children[*pos..j]
                    .iter()
                    .zip(&ops[*pos..j])
                    .all(|(s, e)| s.complete(e))
                {
                    return false;
                }
                if children[j].step(&ops[j], a) {
                    *pos = j;
                    true
                } else {
                    false
                }
            }
            ExecState::Conc(children) => {
                let j = ops.iter().position(|e| e.leaves.contains(a)).unwrap();
                children[j].step(&ops[j], a)
            }
            ExecState::OrderIndep {
                active,
                finished,
                children,
            } => {
                let j = ops.iter().position(|e| e.leaves.contains(a)).unwrap();
                if finished[j] {
                    return false;
                }
                match *active {
                    Some(i) if i == j => children[j].step(&ops[j], a),
                    Some(i) => {
                        if !children[i].complete(&ops[i]) || !children[j].can_take(&ops[j], a) {
                            return false;
                        }
                        finished[i] = true;
                        *active = Some(j);
                        children[j].step(&ops[j], a)
                    }
                    None => {
                        if children[j].step(&ops[j], a) {
                            *active = Some(j);
                            true
                        } else {
                            false
                        }
                    }
                }
            }
            ExecState::Choice { chosen, children } => {
                let j = ops.iter().position(|e| e.leaves.contains(a)).unwrap();
                match *chosen {
                    Some(i) if i != j => false,
                    _ => {
                        if children[j].step(&ops[j], a) {
                            *chosen = Some(j);
                            true
                        } else {
                            false
                        }
                    }
                }
            }
            ExecState::Disable {
                right_started,
                left,
                right,
            } => {
                if ops[1].leaves.contains(a) {
                    if right.step(&ops[1], a) {
                        *right_started = true;
                        true
                    } else {
                        false
                    }
                } else if *right_started {
                    false
                } else {
                    left.step(&ops[0], a)
                }
            }
        }
    }
}

/// Depth-first enumeration of every legal action sequence.
///
/// A sequence is yielded whenever the execution reaches a complete state, so sequences with
/// and without trailing optional actions are both produced. Extensions are explored in
/// ascending action id order, which makes the output lexicographic over DFS positions.
pub struct SequenceIter<'a> {
    model: &'a TaskModel,
    stack: Vec<Frame>,
}

struct Frame {
    state: ExecState,
    trace: Vec<ActionId>,
    next: Vec<ActionId>,
    cursor: usize,
    visited: bool,
}

impl<'a> SequenceIter<'a> {
    pub(crate) fn new(model: &'a TaskModel) -> Self {
        let state = model.start_state();
        SequenceIter {
            model,
            stack: vec![Frame {
                state,
                trace: Vec::new(),
                next: Vec::new(),
                cursor: 0,
                visited: false,
            }],
        }
    }
}

impl Iterator for SequenceIter<'_> {
    type Item = Vec<ActionId>;

    fn next(&mut self) -> Option<Self::Item> {
        let expr = self.model.expr();
        loop {
            let frame = self.stack.last_mut()?;
            if !frame.visited {
                frame.visited = true;
                let mut enabled = ActionSet::new();
                frame.state.enabled(expr, &mut enabled);
                frame.next = enabled.iter().collect();
                if frame.state.complete(expr) && !frame.trace.is_empty() {
                    return Some(frame.trace.clone());
                }
                continue;
            }
            if frame.cursor >= frame.next.len() {
                self.stack.pop();
                continue;
            }
            let a = frame.next[frame.cursor];
            frame.cursor += 1;
            let mut state = frame.state.clone();
            let ok = state.step(expr, a);
            debug_assert!(ok, "enabled action must be steppable");
            let mut trace = frame.trace.clone();
            trace.push(a);
            self.stack.push(Frame {
                state,
                trace,
                next: Vec::new(),
                cursor: 0,
                visited: false,
            });
        }
    }
}
