//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::Command;
use std::time::Instant;

use chiralq_core::verify::{self, CriterionReport, VerifyOptions};

fn a9_cli_determinism() -> CriterionReport {
    let dir = tempfile::TempDir::new().expect("temp dir");
    let cfg = dir.path().join("verify.json");
    std::fs::write(&cfg, "{}").expect("config");
    let mut codes = Vec::new();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("verify{i}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_chiralq"))
            .args(["verify", "--threads", "4", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .env_remove("CHIRALQ_THREADS")
            .output()
            .expect("spawn chiralq");
        codes.push(status.status.code());
        outputs.push(std::fs::read(&out).unwrap_or_default());
    }
    let identical = outputs[0] == outputs[1] && !outputs[0].is_empty();
    CriterionReport {
        id: "A9",
        title: "CLI determinism",
        passed: codes.iter().all(|c| *c == Some(0)) && identical,
        measured: format!("exit codes {codes:?}, byte-identical CSV: {identical}"),
        requirement: "verify exits 0 twice with byte-identical CSV".into(),
    }
}

fn main() {
    let opts = VerifyOptions::default();
    let runs: Vec<(&str, Box<dyn Fn() -> CriterionReport>)> = vec![
        ("A1", Box::new(verify::kernel_annihilation)),
        ("A2", Box::new(move || verify::fourier_oracle(opts.seed))),
        ("A3", Box::new(verify::series_resummation)),
        ("A4", Box::new(verify::proposition_equivalence)),
        ("A5", Box::new(verify::factorization)),
        ("A6", Box::new(verify::radiation_decay)),
        ("A7", Box::new({
            let levels = opts.a7_levels.clone();
            move || verify::sourced_solve(&levels)
        })),
        ("A8", Box::new(move || verify::causality(opts.seed))),
        ("A9", Box::new(a9_cli_determinism)),
    ];
    let mut failures = 0;
    for (_, run) in &runs {
        let start = Instant::now();
        let r = run();
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "{} {verdict} {} | {} | requires {} ({:.1} s)",
            r.id,
            r.title,
            r.measured,
            r.requirement,
            start.elapsed().as_secs_f64()
        );
        failures += usize::from(!r.passed);
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
