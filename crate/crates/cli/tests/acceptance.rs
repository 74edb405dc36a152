//! Runs the acceptance criteria and prints one verdict line per criterion.

use std::io::{self, Write};

fn main() {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let results = nabla_kit_cli::acceptance::run_all(&mut out).expect("stdout is writable");
    for r in &results {
        let _ = writeln!(io::stderr(), "criterion {:>2}: {:.2} s", r.id, r.elapsed.as_secs_f64());
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() {
        let _ = writeln!(out, "acceptance: all {} criteria pass", results.len());
    } else {
        let _ = writeln!(out, "acceptance: criteria {failed:?} fail");
        std::process::exit(1);
    }
}
