//! Report types shared by the subcommands, with JSON and text renderings.

use std::fmt::Write as _;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::automaton::Violation;
use crate::numerics::ExtNonnegReal;

pub const ASSUMED_WELL_FORMED: &str = "well-formedness: assumed (oracle evidence only)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Unitary,
    NotUnitary,
    NotWellFormed,
    InvalidInput,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Unitary => 0,
            Verdict::NotUnitary => 1,
            Verdict::NotWellFormed => 2,
            Verdict::InvalidInput => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Unitary => "UNITARY",
            Verdict::NotUnitary => "NOT_UNITARY",
            Verdict::NotWellFormed => "NOT_WELL_FORMED",
            Verdict::InvalidInput => "INVALID_INPUT",
        }
    }
}

/// Shortest readable form: nine decimals with trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Vector components labeled by their words, kept in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct Labeled(pub Vec<(String, ExtNonnegReal)>);

impl Labeled {
    pub fn get(&self, word: &str) -> Option<ExtNonnegReal> {
        self.0.iter().find(|(w, _)| w == word).map(|(_, v)| *v)
    }

    pub fn values(&self) -> Vec<ExtNonnegReal> {
        self.0.iter().map(|(_, v)| *v).collect()
    }
}

impl Serialize for Labeled {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (word, value) in &self.0 {
            map.serialize_entry(word, value)?;
        }
        map.end()
    }
}

impl std::fmt::Display for Labeled {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(w, v)| format!("{w}: {}", fmt_num(v.to_f64())))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutomatonSummary {
    pub states: usize,
    pub r: usize,
    pub neighborhood: Vec<i64>,
    pub simple: bool,
    pub expansion_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BorderReport {
    pub l: Labeled,
    pub r: Labeled,
    /// `⟨l|r⟩`, absent when a component is infinite.
    pub inner: Option<f64>,
    /// Infinite components as `l[word]` / `r[word]`.
    pub infinite: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureReport {
    pub closed: bool,
    pub final_dimension: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramSummary {
    pub window: [i64; 2],
    pub columns: usize,
    pub max_norm_deviation: f64,
    pub max_offdiag: f64,
    pub worst_pair: Option<[String; 2]>,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub stage: &'static str,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub automaton: Option<AutomatonSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub border_vectors: Option<BorderReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure: Option<ClosureReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_value: Option<f64>,
    /// Largest deviation of the local matrix from an isometry (`r = 1`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_isometry_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram: Option<GramSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
    pub reason: String,
    pub well_formedness: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl VerdictReport {
    pub fn new(verdict: Verdict, reason: impl Into<String>) -> Self {
        VerdictReport {
            verdict,
            automaton: None,
            border_vectors: None,
            closure: None,
            witness_word: None,
            witness_value: None,
            local_isometry_deviation: None,
            gram: None,
            violations: Vec::new(),
            reason: reason.into(),
            well_formedness: ASSUMED_WELL_FORMED.into(),
            timings: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verdict: {}", self.verdict.as_str());
        let _ = writeln!(out, "reason: {}", self.reason);
        for v in &self.violations {
            let _ = writeln!(out, "violation: {v}");
        }
        if let Some(s) = &self.automaton {
            let _ = writeln!(
                out,
                "automaton: {} states, neighborhood {:?}, expansion factor {}",
                s.states,
                s.neighborhood,
                fmt_num(s.expansion_factor)
            );
        }
        if let Some(b) = &self.border_vectors {
            out.push_str(&b.to_text());
        }
        if let Some(d) = self.local_isometry_deviation {
            let _ = writeln!(out, "local isometry deviation: {}", fmt_num(d));
        }
        if let Some(c) = &self.closure {
            let _ = writeln!(
                out,
                "closure: basis dimension {}, {} productive generations",
                c.final_dimension, c.iterations
            );
        }
        if let Some(w) = &self.witness_word {
            let value = self.witness_value.map(fmt_num).unwrap_or_default();
            let _ = writeln!(out, "witness: \"{w}\" with <M_b l|r> = {value}");
        }
        if let Some(g) = &self.gram {
            out.push_str(&g.to_text());
        }
        if let Some(ts) = &self.timings {
            for t in ts {
                let _ = writeln!(out, "time {}: {:.3} ms", t.stage, t.millis);
            }
        }
        let _ = writeln!(out, "{}", self.well_formedness);
        out
    }
}

impl BorderReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("l = {}\nr = {}\n", self.l, self.r);
        match self.inner {
            Some(x) => {
                let _ = writeln!(out, "<l|r> = {}", fmt_num(x));
            }
            None => {
                let _ = writeln!(out, "infinite components: {}", self.infinite.join(", "));
            }
        }
        out
    }
}

impl GramSummary {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "oracle window [{},{}]: {} columns, max norm deviation {:.3e}, max off-diagonal {:.3e}\n",
            self.window[0], self.window[1], self.columns, self.max_norm_deviation, self.max_offdiag
        );
        if !self.passed {
            if let Some([c, d]) = &self.worst_pair {
                let _ = writeln!(out, "worst pair: {c} | {d}");
            }
        }
        let _ = writeln!(
            out,
            "{} (threshold {:e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.threshold
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowNormReport {
    pub word: String,
    pub value: f64,
    /// Brute-force lower bound and the source window it was summed over.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[i64; 2]>,
}

impl RowNormReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("<M_b l|r> for b = \"{}\": {}\n", self.word, fmt_num(self.value));
        if let (Some(bound), Some([lo, hi])) = (self.lower_bound, self.window) {
            let _ = writeln!(out, "brute-force lower bound over [{lo},{hi}]: {}", fmt_num(bound));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepTerm {
    pub configuration: String,
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub steps: usize,
    pub terms: Vec<StepTerm>,
    pub norm: f64,
}

impl StepReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            let _ = writeln!(out, "{:>+.6}{:+.6}i  {}", t.re, t.im, t.configuration);
        }
        let _ = writeln!(out, "terms {}", self.terms.len());
        let _ = writeln!(out, "norm {:.6}", self.norm);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_render_compactly() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.9999999999999998), "1");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(-1e-13), "0");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn exit_codes() {
        let codes: Vec<i32> = [
            Verdict::Unitary,
            Verdict::NotUnitary,
            Verdict::NotWellFormed,
            Verdict::InvalidInput,
        ]
        .iter()
        .map(|v| v.exit_code())
        .collect();
        assert_eq!(codes, [0, 1, 2, 3]);
        assert_eq!(serde_json::to_string(&Verdict::NotWellFormed).unwrap(), "\"NOT_WELL_FORMED\"");
    }

    #[test]
    fn labeled_keeps_order_and_renders_inf() {
        let v = Labeled(vec![
            ("b".into(), ExtNonnegReal::ONE),
            ("a".into(), ExtNonnegReal::Infinite),
        ]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"b":1.0,"a":"inf"}"#);
        assert_eq!(v.to_string(), "{b: 1, a: inf}");
    }
}
