//! Two inter-session runs on the fig4 fixture: the first is depth-first, the second opens
//! with the layout learned from the first. Then an intra-session adaptation with feedback.

use taoist::dialog::Edit;
use taoist::engine::{Engine, EngineConfig, FeedbackDecision, Scenario, Verb};
use taoist::fixtures;

fn show(engine: &Engine, sid: &str) {
    let s = engine.session(sid).expect("live session");
    let panels: Vec<String> = s
        .current_aui()
        .layout
        .names(s.model())
        .iter()
        .map(|c| c.join(" "))
        .collect();
    println!("  {sid}: [{}]", panels.join("] ["));
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut engine = Engine::new(EngineConfig::default())?;
    let id = engine.register_model(fixtures::FIG4_XML)?;

    println!("first visit");
    let (sid, _) = engine.start_session(&id, Scenario::Inter, "ana", None, None)?;
    show(&engine, &sid);
    for a in ["T1", "T3", "T4", "T2", "T6", "T5", "T7"] {
        let out = engine.handle_action(&sid, a, Edit::Add)?;
        if let Some(panel) = out.fui_fragment {
            println!("  {a} done, moving to panel {}", panel.index);
        }
    }
    engine.close_session(&sid)?;

    println!("second visit");
    let (sid, _) = engine.start_session(&id, Scenario::Inter, "ana", None, None)?;
    show(&engine, &sid);
    for view in engine.proposal_views(&sid)? {
        println!("  proposal {} score {:.3}", view.id, view.score.total);
    }
    engine.apply_feedback(&sid, &FeedbackDecision::new(Verb::Accept).rated(5))?;
    engine.close_session(&sid)?;

    println!("intra-session");
    let (sid, _) = engine.start_session(&id, Scenario::Intra, "ana", None, None)?;
    engine.handle_action(&sid, "T1", Edit::Add)?;
    let proposals = engine.trigger_adaptation(&sid)?;
    for p in &proposals {
        println!("  {} {} {:.3}", p.id, p.fingerprint, p.score.total);
    }
    if proposals.len() > 1 {
        let pick = FeedbackDecision::new(Verb::Modify).alternative(proposals[1].id.clone());
        engine.apply_feedback(&sid, &pick)?;
    }
    show(&engine, &sid);

    let profile = engine.store().profile(&id, "ana").expect("profile exists");
    println!("logged sequences: {}", profile.sequences.len());
    println!("adaptations: {}", profile.adaptations.len());
    Ok(())
}
