//! Car rental walkthrough: the initial five panels, the layout adopted after the recorded
//! visit, layout appropriateness of both, and what a second user's logs change.

use taoist::aui::{layout_appropriateness, Layout};
use taoist::dialog::Edit;
use taoist::engine::{Engine, EngineConfig, FeedbackDecision, Scenario, Verb};
use taoist::fixtures;
use taoist::sequence::parse_log;
use taoist::task_model::TaskModel;

fn print_layout(model: &TaskModel, layout: &Layout) {
    for (i, panel) in layout.names(model).iter().enumerate() {
        println!("  {i}: {}", panel.join(", "));
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let recorded = parse_log(fixtures::CAR_RENTAL_LOG)?;
    let second = parse_log(fixtures::CAR_RENTAL_SECOND_USER_LOG)?;
    let mut engine = Engine::new(EngineConfig::default())?;
    let id = engine.register_model(fixtures::CAR_RENTAL_XML)?;
    let model = engine.model(&id)?.clone();

    let (sid, _) = engine.start_session(&id, Scenario::Inter, "first", None, None)?;
    let initial = engine.session(&sid)?.current_aui().layout.clone();
    println!(
        "initial, L={}",
        layout_appropriateness(&model, &initial, &recorded)?
    );
    print_layout(&model, &initial);
    for a in &recorded[0] {
        engine.handle_action(&sid, a, Edit::Add)?;
    }
    engine.close_session(&sid)?;

    let (sid, _) = engine.start_session(&id, Scenario::Inter, "first", None, None)?;
    let adapted = engine.session(&sid)?.current_aui().layout.clone();
    println!(
        "adapted, L={}",
        layout_appropriateness(&model, &adapted, &recorded)?
    );
    print_layout(&model, &adapted);
    engine.apply_feedback(&sid, &FeedbackDecision::new(Verb::Accept).rated(4))?;
    engine.close_session(&sid)?;

    engine.import_sequences(&id, "second", &second)?;
    let (sid, _) = engine.start_session(&id, Scenario::Inter, "second", None, None)?;
    let theirs = engine.session(&sid)?.current_aui().layout.clone();
    println!(
        "second user, L on their log={} (initial {})",
        layout_appropriateness(&model, &theirs, &second)?,
        layout_appropriateness(&model, &initial, &second)?
    );
    print_layout(&model, &theirs);
    Ok(())
}
