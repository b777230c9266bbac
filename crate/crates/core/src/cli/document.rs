//! JSON automaton documents.
//!
//! ```json
//! {
//!   "states": ["a", "b"],
//!   "quiescent": "a",
//!   "neighborhood": [0, 1],
//!   "rules": {
//!     "aa": { "a": [1, 0] },
//!     "ab": { "a": [0.7071067811865476, 0], "b": [0.7071067811865476, 0] }
//!   }
//! }
//! ```
//!
//! Rule keys are words of length `r`; letters are separated by whitespace,
//! or written back to back when every state symbol is a single character.
//! Amplitudes are `[re, im]` pairs and omitted entries are zero.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::automaton::{word_digits, Alphabet, Automaton, Neighborhood, ValidationReport, Violation};
use crate::error::{LqcaError, Result};
use crate::numerics::amplitude;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub states: Vec<String>,
    pub quiescent: String,
    pub neighborhood: Vec<i64>,
    pub rules: BTreeMap<String, BTreeMap<String, [f64; 2]>>,
}

/// `line:column` (1-based) of the first occurrence of `"needle"` in `source`.
fn locate(source: &str, needle: &str) -> Option<(usize, usize)> {
    let quoted = format!("\"{needle}\"");
    let offset = source.find(&quoted)?;
    let before = &source[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    Some((line, column))
}

impl AutomatonDocument {
    pub fn parse(source: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(source).map_err(|e| LqcaError::Document {
            path: origin.to_string(),
            message: e.to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<(Self, String)> {
        let source = std::fs::read_to_string(path).map_err(|e| LqcaError::Document {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let doc = AutomatonDocument::parse(&source, &path.display().to_string())?;
        Ok((doc, source))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    /// Builds the automaton. Structural problems (unknown symbols, wrong word
    /// lengths, duplicate words) are errors located against `source` when it
    /// is given; a non-increasing neighborhood is reported as a violation.
    pub fn to_automaton(&self, source: Option<&str>, origin: &str) -> Result<Automaton> {
        let at = |needle: &str, message: String| {
            let location = source
                .and_then(|s| locate(s, needle))
                .map(|(l, c)| format!("line {l}, column {c}: "))
                .unwrap_or_default();
            LqcaError::Document {
                path: origin.to_string(),
                message: format!("{location}{message}"),
            }
        };

        let alphabet = Alphabet::new(self.states.iter().cloned(), &self.quiescent)
            .map_err(|e| at("states", e.to_string()))?;
        let neighborhood = Neighborhood::new(self.neighborhood.clone()).map_err(|_| {
            LqcaError::Invalid(ValidationReport {
                violations: vec![Violation::NonIncreasingNeighborhood {
                    offsets: self.neighborhood.clone(),
                }],
                single_cell_neighborhood: false,
            })
        })?;
        let r = neighborhood.len();
        let mut automaton = Automaton::new(alphabet.clone(), neighborhood);
        let mut seen = HashSet::new();
        for (key, outputs) in &self.rules {
            let word = alphabet
                .parse_word(key)
                .map_err(|e| at(key, format!("rule `{key}`: {e}")))?;
            if word.len() != r {
                return Err(at(
                    key,
                    format!("rule `{key}` has {} letters, expected {r}", word.len()),
                ));
            }
            if !seen.insert(word.clone()) {
                return Err(at(key, format!("rule `{key}` repeats an earlier word")));
            }
            automaton.mark_listed(&word);
            for (symbol, &[re, im]) in outputs {
                let y = alphabet
                    .index_of(symbol)
                    .map_err(|e| at(key, format!("rule `{key}`: {e}")))?;
                let value = amplitude(re, im).map_err(|e| at(key, e.to_string()))?;
                automaton.set_amplitude(&word, y, value)?;
            }
        }
        Ok(automaton)
    }

    /// Document listing every listed word and its nonzero amplitudes.
    pub fn from_automaton(a: &Automaton, name: Option<String>) -> Self {
        let alphabet = a.alphabet();
        let (t, r) = (a.num_states(), a.r());
        let mut rules = BTreeMap::new();
        for index in 0..t.pow(r as u32) {
            if !a.is_listed(index) {
                continue;
            }
            let outputs = a
                .row(index)
                .iter()
                .enumerate()
                .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
                .map(|(y, v)| (alphabet.symbol(y).to_string(), [v.re, v.im]))
                .collect();
            rules.insert(alphabet.format_word(&word_digits(index, r, t)), outputs);
        }
        AutomatonDocument {
            name,
            states: alphabet.symbols().to_vec(),
            quiescent: alphabet.quiescent().to_string(),
            neighborhood: a.neighborhood().offsets().to_vec(),
            rules,
        }
    }
}
