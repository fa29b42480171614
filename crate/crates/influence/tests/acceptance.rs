//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

fn main() {
    let results = influence::acceptance::run_all();
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
