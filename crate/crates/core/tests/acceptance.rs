//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 1-7 run the default suite one criterion at a time so each gets its
//! own wall-clock budget. Criterion 8 reruns the whole suite with the same seed
//! and compares the serialized reports byte for byte.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use triesz::config::emit_report;
use triesz::verify::{run_suite, run_suite_filtered, SuiteConfig, CRITERIA};

const SEED: u64 = 20240611;

fn budget(criterion: u8) -> Option<Duration> {
    let secs = match criterion {
        1 => 5,
        2 => 10,
        3 | 4 => 60,
        5 | 6 => 300,
        _ => return None,
    };
    Some(Duration::from_secs(secs))
}

fn line(criterion: u8, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion} {} ({name}): {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn main() -> ExitCode {
    let config = SuiteConfig::new(SEED);
    let mut all = Vec::new();
    let mut ok = true;

    for (c, name) in CRITERIA {
        let start = Instant::now();
        let entries = run_suite_filtered(&config, |k| k == c);
        let elapsed = start.elapsed();
        let failed: Vec<_> = entries.iter().filter(|e| !e.report.pass).collect();
        let in_time = budget(c).is_none_or(|b| elapsed <= b);
        let pass = !entries.is_empty() && failed.is_empty() && in_time;
        let limit = budget(c).map_or(String::new(), |b| format!(" (budget {}s)", b.as_secs()));
        line(
            c,
            name,
            pass,
            &format!(
                "{} reports, {} failed, {:.1}s{limit}",
                entries.len(),
                failed.len(),
                elapsed.as_secs_f64()
            ),
        );
        for e in failed {
            println!("    {}: {}", e.task, e.report);
        }
        ok &= pass;
        all.extend(entries);
    }

    let first = emit_report(&all);
    let second = emit_report(&run_suite(&config));
    let same = first == second;
    line(
        8,
        "determinism",
        same,
        &format!(
            "two runs with seed {SEED}: {} bytes, {}",
            first.len(),
            if same { "identical" } else { "differ" }
        ),
    );
    ok &= same;

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
