//! Longest repeating subsequences of the four small logs, at thresholds 0 to 2.

use taoist::fixtures;
use taoist::sequence::{extract_lrs, parse_log};

fn main() {
    let logs = [
        ("a", fixtures::FIG2A_LOG),
        ("b", fixtures::FIG2B_LOG),
        ("c", fixtures::FIG2C_LOG),
        ("d", fixtures::FIG2D_LOG),
    ];
    for (name, text) in logs {
        let log = parse_log(text).expect("fixture log parses");
        println!("log {name}:");
        for seq in &log {
            println!("    {}", seq.join(" "));
        }
        for t in 0..=2 {
            let lrs = extract_lrs(&log, t).expect("log is not empty");
            let shown: Vec<String> = lrs.sequences.iter().map(|s| s.join(",")).collect();
            println!("  T={t}: {{{}}}", shown.join("; "));
        }
    }
}
