//! Runs every acceptance suite at its stated tolerances and prints one line per criterion.
//! Built without the test harness so the table is printed on every `cargo test`.

use lab_cli::commands::summary_lines;
use lab_cli::suites::SUITES;
use std::collections::BTreeMap;

fn main() {
    let mut failed = Vec::new();
    for s in SUITES.iter() {
        let run = s.run(&BTreeMap::new());
        let rep = &run.report;
        let worst = rep.checks.iter().find(|c| !c.pass).or(rep.checks.first());
        let mut line = format!(
            "criterion {:>2} {:<22} {} {:>8.2} s",
            rep.criterion,
            rep.name,
            if rep.pass { "PASS" } else { "FAIL" },
            run.seconds
        );
        if let Some(c) = worst {
            line.push_str(&format!("  {} = {:.3e} {} {:.3e}", c.name, c.value, c.relation.symbol(), c.tolerance));
        }
        if let Some(limit) = rep.runtime_limit {
            line.push_str(&format!("  (limit {limit} s)"));
        }
        println!("{line}");
        if !rep.pass {
            for l in summary_lines(rep, Some(run.seconds)).into_iter().skip(1) {
                println!("{l}");
            }
            failed.push(rep.criterion);
        }
    }
    println!("{} of {} criteria pass", SUITES.len() - failed.len(), SUITES.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
