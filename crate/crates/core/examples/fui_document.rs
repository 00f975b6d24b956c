//! Prints the widget-tree JSON for the depth-first bank transfer layout, or for the model
//! file given as the first argument.

use taoist::aui::{reify_to_fui, AbstractUI, Layout, Provenance, DEFAULT_CAPACITY};
use taoist::dialog::compute_enablement;
use taoist::fixtures;
use taoist::task_model::parse_task_model;
use taoist::ActionSet;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = match std::env::args().nth(1) {
        Some(path) => parse_task_model(&std::fs::read_to_string(path)?)?,
        None => fixtures::bank_transfer(),
    };
    let layout = Layout::dfs_initial(&model, DEFAULT_CAPACITY);
    let aui = AbstractUI::from_layout(&model, &layout, Provenance::Initial)?;
    let enablement = compute_enablement(&model, &ActionSet::new());
    let doc = reify_to_fui(&aui, &enablement, 0);
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}
