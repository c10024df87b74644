//! Executes the checks of a resolved scenario and assembles the report.

use std::sync::atomic::{AtomicBool, Ordering};

use descent_core::report::{digest, DescentReport, Record, Verdict};
use rayon::prelude::*;
use serde_json::json;

use crate::registry::{lookup, CheckSpec};
use crate::scenario::Resolved;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub jobs: usize,
    pub fail_fast: bool,
    /// Seconds since the epoch written into the report; `None` means now.
    pub timestamp: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { jobs: 1, fail_fast: false, timestamp: None }
    }
}

fn execute(spec: &CheckSpec, ctx: &Resolved) -> Record {
    let (verdict, witness, detail) = match (spec.run)(ctx) {
        Ok(o) => (o.verdict, o.witness, o.detail),
        Err(e) => (Verdict::Fail, Some(format!("error: {e}")), json!({ "error": e.to_string() })),
    };
    let d = digest(&json!({
        "id": spec.id,
        "config": ctx.config_json(),
        "verdict": verdict,
        "witness": witness,
        "detail": detail,
    }));
    Record {
        id: spec.id.to_string(),
        reference: spec.reference.to_string(),
        verdict,
        expected: spec.expected.to_vec(),
        witness,
        detail,
        digest: d,
    }
}

fn skipped(spec: &CheckSpec) -> Record {
    let detail = json!({ "reason": "fail-fast after an unexpected failure" });
    let mut expected = spec.expected.to_vec();
    expected.push(Verdict::Skip);
    Record {
        id: spec.id.to_string(),
        reference: spec.reference.to_string(),
        verdict: Verdict::Skip,
        expected,
        witness: None,
        digest: digest(&json!({ "id": spec.id, "verdict": Verdict::Skip, "detail": detail })),
        detail,
    }
}

pub fn run(ctx: &Resolved, opts: &RunOptions) -> DescentReport {
    let specs: Vec<&CheckSpec> = ctx.scenario.checks.iter().filter_map(|id| lookup(id)).collect();
    let stop = AtomicBool::new(false);
    let one = |spec: &&CheckSpec| {
        if opts.fail_fast && stop.load(Ordering::SeqCst) {
            return skipped(spec);
        }
        let r = execute(spec, ctx);
        if !r.is_expected() {
            stop.store(true, Ordering::SeqCst);
        }
        r
    };
    let records: Vec<Record> = if opts.jobs <= 1 {
        specs.iter().map(one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build().expect("thread pool");
        pool.install(|| specs.par_iter().map(one).collect())
    };
    let ts = opts.timestamp.unwrap_or_else(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    DescentReport::new(&ctx.scenario.name, ctx.config_json(), records, ts)
}

/// 0 when every record is as expected, 1 otherwise.
pub fn exit_code(r: &DescentReport) -> i32 {
    if r.summary.unexpected == 0 {
        0
    } else {
        1
    }
}

/// Short human summary, one line per record.
pub fn summary(r: &DescentReport) -> String {
    let mut s = format!("scenario {}\n", r.scenario);
    for rec in &r.records {
        let mark = if rec.is_expected() { "ok " } else { "!! " };
        let v = format!("{:?}", rec.verdict).to_lowercase();
        s.push_str(&format!("{mark}{:<40} {:<5} [{}]", rec.id, v, rec.reference));
        if let Some(w) = &rec.witness {
            let w: String = w.chars().take(120).collect();
            s.push_str(&format!("\n     witness: {w}"));
        }
        s.push('\n');
    }
    s.push_str(&format!(
        "{} pass, {} fail, {} skip, {} unexpected\n",
        r.summary.pass, r.summary.fail, r.summary.skip, r.summary.unexpected
    ));
    s
}
