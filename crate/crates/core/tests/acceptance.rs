//! Acceptance run: one PASS/FAIL line per criterion, followed by the
//! individual checks behind it. Exits non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use grushin::verify::{
    dimension_probe_checks, heat_kernel_checks, hermite_checks, lemma_checks, moment_flatness_checks,
    representation_checks, semigroup_kernel_checks, transference_checks, truncation_convergence_checks,
    truncation_factor_checks, uniformity_checks, vector_identity_checks, Check,
};
use grushin::{Execution, Result};

const SEED: u64 = 0;
const EXEC: Execution = Execution::Parallel;

struct Criterion {
    id: usize,
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Result<Vec<Check>>,
}

fn criteria() -> Vec<Criterion> {
    let mins = |m: u64| Some(Duration::from_secs(60 * m));
    vec![
        Criterion {
            id: 1,
            title: "ladder, H(λ) decomposition and Gram orthonormality",
            budget: mins(1),
            run: || hermite_checks(SEED),
        },
        Criterion {
            id: 2,
            title: "truncation factor closed form vs r-quadrature",
            budget: None,
            run: truncation_factor_checks,
        },
        Criterion {
            id: 3,
            title: "truncated Riesz convergence and norm bound",
            budget: None,
            run: || truncation_convergence_checks(SEED),
        },
        Criterion {
            id: 4,
            title: "vector Riesz L² identity",
            budget: None,
            run: || vector_identity_checks(SEED, EXEC),
        },
        Criterion {
            id: 5,
            title: "Hermite semigroup through the heat kernel",
            budget: mins(2),
            run: semigroup_kernel_checks,
        },
        Criterion {
            id: 6,
            title: "Monte-Carlo representation vs spectral transform",
            budget: mins(5),
            run: || representation_checks(0.25, 1_000_000, SEED, false, EXEC),
        },
        Criterion { id: 7, title: "transference identity", budget: None, run: || transference_checks(SEED, 20) },
        Criterion {
            id: 8,
            title: "heat kernel mass, homogeneity and gradients",
            budget: None,
            run: || heat_kernel_checks(SEED, EXEC),
        },
        Criterion {
            id: 9,
            title: "Schrödinger representation derivative identities",
            budget: None,
            run: || lemma_checks(SEED, 50),
        },
        Criterion {
            id: 10,
            title: "kernel moment flatness in n",
            budget: mins(5),
            run: || moment_flatness_checks(100_000, SEED, EXEC),
        },
        Criterion {
            id: 11,
            title: "dimension-free norm probe",
            budget: None,
            run: || dimension_probe_checks(200, SEED, EXEC),
        },
        Criterion {
            id: 12,
            title: "parabola transform uniformity",
            budget: None,
            run: || uniformity_checks(SEED, 20, EXEC),
        },
    ]
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters come through here too
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let mut failed = Vec::new();
    for c in criteria() {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let mut lines = Vec::new();
        let mut pass = match &outcome {
            Ok(checks) => {
                lines.extend(checks.iter().map(|k| format!("    {k}")));
                !checks.is_empty() && checks.iter().all(|k| k.pass)
            }
            Err(e) => {
                lines.push(format!("    error: {e}"));
                false
            }
        };
        if let Some(b) = c.budget {
            let ok = elapsed <= b;
            lines.push(format!(
                "    {} runtime: {:.1} s <= {} s",
                if ok { "PASS" } else { "FAIL" },
                elapsed.as_secs_f64(),
                b.as_secs()
            ));
            pass &= ok;
        }
        println!(
            "{} criterion {:>2}: {} ({:.1} s)",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            elapsed.as_secs_f64()
        );
        for l in lines {
            println!("{l}");
        }
        if !pass {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 12 criteria fail: {failed:?}", failed.len());
        ExitCode::FAILURE
    }
}
