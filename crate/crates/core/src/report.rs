//! Verdicts shared by the verifiers.

use serde::Serialize;
use serde_json::Value;

use crate::context::ClassContext;
use crate::edges::EdgeType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inapplicable,
}

impl Verdict {
    /// Process exit code: 0 pass, 1 fail, 2 inapplicable.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inapplicable => 2,
        }
    }

    /// Fail dominates pass; inapplicable parts are ignored unless nothing applied.
    pub fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::Inapplicable;
        for v in verdicts {
            match v {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Pass => out = Verdict::Pass,
                Verdict::Inapplicable => {}
            }
        }
        out
    }
}

const MAX_COUNTEREXAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub verdict: Verdict,
    /// Number of individual instances of the statement examined.
    pub checked: usize,
    /// Failed hypotheses when inapplicable.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reasons: Vec<String>,
    pub failures: usize,
    /// The first few failures.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub counterexamples: Vec<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Report>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Report {
    pub fn new(check: impl Into<String>) -> Report {
        Report {
            check: check.into(),
            verdict: Verdict::Pass,
            checked: 0,
            reasons: Vec::new(),
            failures: 0,
            counterexamples: Vec::new(),
            parts: Vec::new(),
            details: Value::Null,
        }
    }

    pub fn inapplicable(check: impl Into<String>, reasons: Vec<String>) -> Report {
        let mut r = Report::new(check);
        r.verdict = Verdict::Inapplicable;
        r.reasons = reasons;
        r
    }

    /// Records one examined instance; `None` means it held.
    pub fn record(&mut self, failure: Option<Value>) {
        self.checked += 1;
        if let Some(cx) = failure {
            self.failures += 1;
            self.verdict = Verdict::Fail;
            if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.counterexamples.push(cx);
            }
        }
    }

    pub fn expect(&mut self, ok: bool, cx: impl FnOnce() -> Value) {
        self.record(if ok { None } else { Some(cx()) });
    }

    /// Adds a sub-report; the verdict becomes the combination of all parts.
    pub fn push_part(&mut self, part: Report) {
        self.checked += part.checked;
        self.failures += part.failures;
        self.parts.push(part);
        self.verdict = Verdict::combine(self.parts.iter().map(|p| p.verdict));
    }

    pub fn is_pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Standing assumptions on the class: every member smooth, no unary-type
/// edges, and thin edges computed exactly.
pub fn class_hypotheses(ctx: &ClassContext) -> Vec<String> {
    let mut out = Vec::new();
    if !ctx.ternary.is_complete() || !ctx.binary.is_complete() {
        out.push(format!("term clone truncated at {} operations", ctx.caps.clone));
    } else if ctx.mode != crate::context::Mode::Exact {
        out.push("witness mode does not give exact thin edges".into());
    }
    for (m, an) in ctx.members.iter().zip(&ctx.member_edges) {
        if m.duplicate_of.is_some() {
            continue;
        }
        if !an.smooth.smooth {
            out.push(format!("class member {} is not smooth", m.structure.name()));
        }
        if an.edges.iter().any(|e| e.resolved == EdgeType::Unary) {
            out.push(format!("class member {} has an edge of unary type", m.structure.name()));
        }
    }
    out
}
