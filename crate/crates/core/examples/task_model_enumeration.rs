//! Parses each fixture model, prints its tree in operator notation and counts the action
//! orderings it accepts.

use taoist::fixtures;
use taoist::task_model::{Task, TaskModel};

fn render(task: &Task) -> String {
    if task.children.is_empty() {
        let opt = if task.optional { "?" } else { "" };
        return format!("{}{opt}", task.name);
    }
    let mut out = String::from("(");
    for (i, child) in task.children.iter().enumerate() {
        if i > 0 {
            out.push_str(&format!(" {} ", task.operators[i - 1].symbol()));
        }
        out.push_str(&render(child));
    }
    out.push(')');
    out
}

fn main() {
    let limit = 200_000;
    for model in fixtures::all_models() {
        println!("{} ({} actions)", model.name(), model.action_count());
        println!("  {}", render(model.root()));
        println!("  depth-first: {}", model.dfs_linearization().join(", "));
        let count = model.sequences().take(limit).count();
        if count == limit {
            println!("  orderings: at least {limit}");
        } else {
            println!("  orderings: {count}");
        }
        print_branches(&model);
    }
}

fn print_branches(model: &TaskModel) {
    for (name, actions) in model.top_level_branches() {
        println!("  branch {name}: {}", model.names(&actions).join(", "));
    }
}
