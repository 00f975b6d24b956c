//! Candidate layouts for the fig4 fixture after `T1`, ranked by tabu search and by full
//! enumeration.

use taoist::aui::{
    exhaustive_k_best, k_best_search, Layout, Reification, ScoreWeights, Scorer, SearchConfig,
    DEFAULT_CAPACITY,
};
use taoist::cli::layout_text;
use taoist::fixtures;
use taoist::sequence::{extract_lrs, parse_log, train_markov};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = fixtures::fig4();
    let log = parse_log(fixtures::FIG5_LOG)?;
    let markov = train_markov(&log, 2, false, 1)?;
    let lrs = extract_lrs(&log, 0)?;
    let tier: Vec<Vec<usize>> = lrs
        .sequences
        .iter()
        .map(|s| model.ids(s))
        .collect::<Result<_, _>>()?;

    let history = model.ids(&["T1"])?;
    let pinned = Reification::builder(&model)
        .history(&history)
        .lrs_tier(tier)
        .reference(Layout::dfs_initial(&model, DEFAULT_CAPACITY))
        .build()?;
    let free = Reification::builder(&model)
        .history(&history)
        .reference(Layout::dfs_initial(&model, DEFAULT_CAPACITY))
        .build()?;

    for (label, reification) in [
        ("following the logged sequence", &pinned),
        ("unconstrained", &free),
    ] {
        println!(
            "{label}: {:?}, {} candidates",
            reification.mode(),
            reification.generate_partial_auis().len()
        );
        let scorer = Scorer::new(reification, ScoreWeights::default()).with_markov(&markov);
        let config = SearchConfig {
            k: 5,
            ..SearchConfig::default()
        };
        let tabu = k_best_search(&scorer, &config)?;
        let exact = exhaustive_k_best(&scorer, 5)?;
        println!("  tabu ({} evaluations):", tabu.evaluations);
        for item in &tabu.items {
            println!(
                "    {:<24} {:.3}",
                layout_text(&model, &item.layout),
                item.score.total
            );
        }
        println!("  exhaustive:");
        for item in &exact.items {
            println!(
                "    {:<24} {:.3}",
                layout_text(&model, &item.layout),
                item.score.total
            );
        }
    }
    Ok(())
}
