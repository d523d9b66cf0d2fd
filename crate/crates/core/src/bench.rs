//! Timing of specialisation and of residual programs.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::engine::{solve, EngineConfig, EngineError};
use crate::fixtures::Fixture;
use crate::lix::specialise;
use crate::logen::{build_genex, run_genex};
use crate::term::{Program, Term};

/// Median wall time of `reps` runs of `f`.
pub fn median_time<T>(reps: usize, mut f: impl FnMut() -> T) -> Duration {
    let mut times: Vec<Duration> = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(f());
            start.elapsed()
        })
        .collect();
    times.sort();
    times[times.len() / 2]
}

/// Runs `goal` to exhaustion and returns the number of answers and engine
/// steps.
pub fn run_to_end(
    p: &Program,
    goal: &Term,
    config: EngineConfig,
) -> Result<(usize, u64), EngineError> {
    let mut sols = solve(p, goal, config);
    let mut n = 0;
    for a in sols.by_ref() {
        a?;
        n += 1;
    }
    Ok((n, sols.steps()))
}

/// One row of the benchmark table.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub fixture: &'static str,
    pub cogen: Duration,
    pub lix: Duration,
    pub genex: Duration,
    pub original: Duration,
    pub residual: Duration,
    pub original_steps: u64,
    pub residual_steps: u64,
}

impl BenchRow {
    /// Original run time over residual run time.
    pub fn speedup(&self) -> f64 {
        ratio(self.original, self.residual)
    }
}

fn ratio(a: Duration, b: Duration) -> f64 {
    a.as_secs_f64() / b.as_secs_f64().max(1e-9)
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{fixture}: {message}")]
    Fixture {
        fixture: &'static str,
        message: String,
    },
}

/// Times one fixture: specialisation by both paths, then all its queries
/// against the original and the residual program.
pub fn bench_fixture(
    f: &Fixture,
    reps: usize,
    config: EngineConfig,
) -> Result<BenchRow, BenchError> {
    let err = |message: String| BenchError::Fixture {
        fixture: f.name,
        message,
    };
    let p = f.program();
    let goal = f.goal_term();
    let residual = specialise(&p, std::slice::from_ref(&goal)).map_err(|e| err(e.to_string()))?;
    let g = build_genex(&p).map_err(|e| err(e.to_string()))?;
    let original = p.strip();
    let runnable = residual.runnable(&original);
    let queries = f.query_terms();

    let cogen = median_time(reps, || build_genex(&p));
    let lix = median_time(reps, || specialise(&p, std::slice::from_ref(&goal)));
    let genex = median_time(reps, || run_genex(&g, std::slice::from_ref(&goal)));

    let mut steps = (0, 0);
    for q in &queries {
        steps.0 += run_to_end(&original, q, config)
            .map_err(|e| err(e.to_string()))?
            .1;
        steps.1 += run_to_end(&runnable, q, config)
            .map_err(|e| err(e.to_string()))?
            .1;
    }
    let run_all = |prog: &Program| {
        for q in &queries {
            let _ = run_to_end(prog, q, config);
        }
    };
    let orig_time = median_time(reps, || run_all(&original));
    let res_time = median_time(reps, || run_all(&runnable));
    Ok(BenchRow {
        fixture: f.name,
        cogen,
        lix,
        genex,
        original: orig_time,
        residual: res_time,
        original_steps: steps.0,
        residual_steps: steps.1,
    })
}

pub const CSV_HEADER: &str =
    "fixture,cogen_ms,lix_ms,genex_ms,lix_over_genex,original_ms,residual_ms,speedup,original_steps,residual_steps";

/// The table as CSV, with a final `total` row for the specialisation times.
pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.4},{:.4},{:.4},{:.3},{:.4},{:.4},{:.3},{},{}",
            r.fixture,
            millis(r.cogen),
            millis(r.lix),
            millis(r.genex),
            ratio(r.lix, r.genex),
            millis(r.original),
            millis(r.residual),
            r.speedup(),
            r.original_steps,
            r.residual_steps,
        );
    }
    let lix: Duration = rows.iter().map(|r| r.lix).sum();
    let genex: Duration = rows.iter().map(|r| r.genex).sum();
    let cogen: Duration = rows.iter().map(|r| r.cogen).sum();
    let _ = writeln!(
        out,
        "total,{:.4},{:.4},{:.4},{:.3},,,,,",
        millis(cogen),
        millis(lix),
        millis(genex),
        ratio(lix, genex)
    );
    out
}

/// Total lix time over total genex time.
pub fn lix_genex_ratio(rows: &[BenchRow]) -> f64 {
    ratio(
        rows.iter().map(|r| r.lix).sum(),
        rows.iter().map(|r| r.genex).sum(),
    )
}

/// `demo(dapp(L1,L2,L3,R))` for three ground lists of length `n`.
pub fn vanilla_query(n: usize) -> Term {
    let list = |tag: i64| Term::list((0..n as i64).map(|i| Term::Int(tag * 100_000 + i)));
    Term::app(
        "demo",
        vec![Term::app(
            "dapp",
            vec![list(1), list(2), list(3), Term::var(0)],
        )],
    )
}

/// Wall-time speedup of the vanilla residual over the interpreted original
/// on lists of length `n`, with the step counts of both.
pub fn vanilla_speedup(n: usize, reps: usize) -> Result<(f64, u64, u64), BenchError> {
    let f = &crate::fixtures::VANILLA;
    let err = |message: String| BenchError::Fixture {
        fixture: f.name,
        message,
    };
    let p = f.program();
    let residual = specialise(&p, &[f.goal_term()]).map_err(|e| err(e.to_string()))?;
    let original = p.strip();
    let runnable = residual.runnable(&original);
    let q = vanilla_query(n);
    let config = EngineConfig::with_budget(100_000_000);
    let (_, s0) = run_to_end(&original, &q, config).map_err(|e| err(e.to_string()))?;
    let (_, s1) = run_to_end(&runnable, &q, config).map_err(|e| err(e.to_string()))?;
    let t0 = median_time(reps, || run_to_end(&original, &q, config));
    let t1 = median_time(reps, || run_to_end(&runnable, &q, config));
    Ok((ratio(t0, t1), s0, s1))
}
