//! Walks the appendix model and example 1 action by action, printing which widgets are
//! enabled after each step.

use taoist::dialog::{compute_enablement, is_session_complete};
use taoist::fixtures;
use taoist::task_model::TaskModel;
use taoist::ActionSet;

fn walk(model: &TaskModel, steps: &[&str]) {
    println!("{}", model.name());
    let mut done = ActionSet::new();
    for step in std::iter::once(None).chain(steps.iter().map(Some)) {
        if let Some(name) = step {
            done.insert(model.action_id(name).expect("fixture action"));
        }
        let state = compute_enablement(model, &done);
        let on: Vec<&str> = state
            .to_map(model)
            .into_iter()
            .filter(|(_, enabled)| *enabled)
            .map(|(a, _)| model.action_name(model.action_id(&a).unwrap()))
            .collect();
        println!(
            "  after {:<4} enabled: {:<24} complete: {}",
            step.copied().unwrap_or("-"),
            on.join(" "),
            is_session_complete(model, &done)
        );
    }
}

fn main() {
    walk(&fixtures::appendix(), &["T1", "T2", "T3", "T4"]);
    let ex1 = fixtures::example1();
    let first = ex1.sequences().next().expect("at least one ordering");
    let names = ex1.names(&first);
    let steps: Vec<&str> = names.iter().map(String::as_str).collect();
    walk(&ex1, &steps);
}
