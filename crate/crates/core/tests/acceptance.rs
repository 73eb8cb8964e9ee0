//! Acceptance suite: one PASS/FAIL line per criterion, each with its own
//! tolerance and wall-time limit (enforced inside the claim).

use sepsos::repro::{run_claim, ClaimStatus, ReproInputs, ReproOptions, CLAIM_IDS};

fn main() {
    let inputs = ReproInputs::builtin();
    let opts = ReproOptions::default();
    let mut failures = Vec::new();
    for index in 0..CLAIM_IDS.len() {
        let c = run_claim(index, &inputs, &opts);
        let line = format!(
            "{} criterion {:>2} [{}] {:.3}s / {:.0}s: {}",
            c.status.label(),
            c.criterion,
            c.id,
            c.wall_time,
            c.time_limit,
            c.data
        );
        println!("{line}");
        if c.status != ClaimStatus::Pass {
            failures.push(line);
        }
    }
    if !failures.is_empty() {
        eprintln!("failing criteria:\n{}", failures.join("\n"));
        std::process::exit(1);
    }
    println!("acceptance: {} criteria passed", CLAIM_IDS.len());
}
