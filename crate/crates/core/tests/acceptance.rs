//! One line per acceptance criterion; the budgets live in `verify::BUDGETS`.

use std::process::ExitCode;

use arithdist::verify::{run_criterion, CriterionOutcome};

fn main() -> ExitCode {
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids: Vec<u8> = if only.is_empty() { (1..=8).collect() } else { only };
    let mut results: Vec<CriterionOutcome> = Vec::new();
    for id in ids {
        let r = run_criterion(id);
        println!("{}", r.summary_line());
        for f in r.failures.iter().skip(1).take(5) {
            println!("    {f}");
        }
        results.push(r);
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
