//! Next-action prediction on the bank transfer log for orders 1 to 3.

use taoist::fixtures;
use taoist::sequence::{parse_log, train_markov};

fn main() {
    let log = parse_log(fixtures::BANK_TRANSFER_LOG).expect("fixture log parses");
    let histories: [&[&str]; 3] = [
        &["Amount"],
        &["IBAN", "Amount"],
        &["Beneficiary address", "Amount"],
    ];
    for k in 1..=3 {
        let model = train_markov(&log, k, false, 1).expect("non-empty log, positive order");
        println!("k={k}");
        for h in histories {
            let dist = model.predict_next(h).expect("known actions");
            let top: Vec<String> = dist
                .iter()
                .take(3)
                .map(|(a, p)| format!("{a} {p:.3}"))
                .collect();
            println!("  [{}] -> {}", h.join(", "), top.join(" | "));
        }
        println!("  log-likelihood {:.3}", model.log_likelihood(&log));
    }

    // Pruning keeps only the repeated parts of the log.
    let pruned = train_markov(&log, 2, true, 1).expect("log has repeats");
    println!("pruned vocabulary: {:?}", pruned.vocabulary());
}
