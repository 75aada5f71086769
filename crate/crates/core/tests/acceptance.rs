//! Acceptance criteria: one PASS/FAIL line each, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use zsdeform_core::deform_map::Budget;
use zsdeform_core::verify::{self, overall, Status, SuiteConfig, VerificationReport};

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    run: fn() -> zsdeform_core::Result<Vec<VerificationReport>>,
}

fn cfg(levels: &[u32], weight: u64) -> SuiteConfig {
    SuiteConfig {
        levels: Some(levels.to_vec()),
        weight: Some(weight),
        budget: Budget::default(),
    }
}

fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion {
            id: 1,
            title: "oracle equivalence, weight <= 8, parts <= 4, n = 1..3",
            limit: secs(60),
            run: || verify::oracle(&cfg(&[1, 2, 3], 8)),
        },
        Criterion {
            id: 2,
            title: "all-ones limit encloses exp(H_n), width < 1e-8; T_1(1^25) gap",
            limit: secs(30),
            run: || verify::closed_form(&cfg(&[1, 2, 3], 0)),
        },
        Criterion {
            id: 3,
            title: "g_n coefficient identities and bounds, m <= 50, n = 1..4",
            limit: secs(5),
            run: || verify::gn_identities(&cfg(&[1, 2, 3, 4], 0)),
        },
        Criterion {
            id: 4,
            title: "fixed-point identity of e_n at order 60, n = 1..4",
            limit: secs(5),
            run: || verify::fixed_point(&cfg(&[1, 2, 3, 4], 0)),
        },
        Criterion {
            id: 5,
            title: "order on entries >= 2, prefix weight <= 8, n = 1, 2",
            limit: secs(300),
            run: || verify::order_t2(&cfg(&[1, 2], 8)),
        },
        Criterion {
            id: 6,
            title: "Delta_n, h_n (weight <= 8) and integral sandwiches, strict",
            limit: secs(120),
            run: || {
                let mut r = verify::sandwiches(&cfg(&[1, 2, 3], 8))?;
                r.extend(verify::integral_bound(&cfg(&[1], 0))?);
                Ok(r)
            },
        },
        Criterion {
            id: 7,
            title: "jump-mass partial sums to weight 14 below 2e^3, n = 1",
            limit: secs(60),
            run: || verify::jump_mass(&cfg(&[1], 14)),
        },
        Criterion {
            id: 8,
            title: "G_1 monotone on 200 points (>= 95% strict); jump at 1/2 within 1e-3",
            limit: secs(300),
            run: || verify::decomposition(&cfg(&[1], 0)),
        },
        Criterion {
            id: 9,
            title: "Moran residual < 1e-12, Cantor dimensions, box counts within 0.05",
            limit: secs(60),
            run: || {
                let mut r = verify::moran(&cfg(&[1, 2, 3], 0))?;
                r.extend(verify::box_count(&cfg(&[1], 0))?);
                Ok(r)
            },
        },
        Criterion {
            id: 10,
            title: "100 bi-Lipschitz pairs in [c1, c2], n = 1",
            limit: secs(180),
            run: || verify::bilipschitz(&cfg(&[1], 8), 100),
        },
        Criterion {
            id: 11,
            title: "10 preimage round trips within 1e-4, n = 1",
            limit: secs(120),
            run: || verify::preimage(&cfg(&[1], 0), 10),
        },
    ]
}

fn main() -> ExitCode {
    let mut failed = 0;
    for c in criteria() {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (status, detail) = match &result {
            Ok(reports) => {
                let worst = reports
                    .iter()
                    .find(|r| r.status != Status::Pass)
                    .map(|r| r.to_string())
                    .unwrap_or_else(|| format!("{} checks", reports.len()));
                (overall(reports), worst)
            }
            Err(e) => (Status::Fail, format!("error: {e}")),
        };
        let in_time = elapsed <= c.limit;
        let pass = status == Status::Pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2}: {} [{:.1}s / {}s] {}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            if in_time { detail } else { format!("over time limit; {detail}") }
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
