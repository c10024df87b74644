//! Check implementations, one function per registry entry.

pub mod aqft;
pub mod causality;
pub mod corpus;
pub mod kg;
pub mod site;

use descent_core::report::Verdict;
use descent_core::Spacetime;
use serde_json::Value;

use crate::scenario::Resolved;

/// What a check returns before it is wrapped into a report record.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub verdict: Verdict,
    pub witness: Option<String>,
    pub detail: Value,
}

impl Outcome {
    pub fn new(ok: bool, witness: Option<String>, detail: Value) -> Self {
        let verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        Outcome { verdict, witness, detail }
    }
}

/// The scenario lattices, or `defaults` with the window and margin overrides.
pub fn lattices(ctx: &Resolved, defaults: Vec<Spacetime>) -> Vec<Spacetime> {
    if !ctx.spacetimes.is_empty() {
        return ctx.spacetimes.clone();
    }
    defaults
        .into_iter()
        .map(|mut st| {
            if let Some(w) = ctx.window {
                st.window = w;
            }
            if ctx.margin.is_some() {
                st.margin = ctx.margin;
            }
            st
        })
        .collect()
}

pub fn backend_name(st: &Spacetime) -> String {
    match st.backend {
        descent_core::Backend::Plane => format!("plane[{}..{}]x[{}..{}]", st.window.0, st.window.1, st.span.0, st.span.1),
        descent_core::Backend::Cylinder(c) => format!("cylinder(c={c})[{}..{}]", st.window.0, st.window.1),
    }
}

/// Records the first witness only.
pub fn first(w: &mut Option<String>, s: impl FnOnce() -> String) {
    if w.is_none() {
        *w = Some(s());
    }
}
