//! Layout enumeration cost for 1 to 6 concurrent actions, baseline against improved
//! encoding, printed as CSV.

use taoist::bench::{run_bench, to_csv, BenchConfig};

fn main() {
    let config = BenchConfig {
        n_max: 6,
        repetitions: 1,
        ..BenchConfig::default()
    };
    match run_bench(&config) {
        Ok(rows) => print!("{}", to_csv(&rows)),
        Err(e) => eprintln!("bench: {e}"),
    }
}
