//! The automaton model: alphabet, neighborhood, local transition table and
//! finite configurations, plus the two neighborhood reductions (shifting a
//! contiguous neighborhood to `(0, …, r−1)` and expanding a gapped one to a
//! contiguous window).
//!
//! States are stored as dense indices with the quiescent state at index 0.
//! A word `x₁…x_k` is encoded most-significant-digit first in base `|Σ|`, so
//! the all-quiescent word always has index 0 and the de Bruijn successor of
//! `xt` by `y` is `(index(xt) mod |Σ|^{k−1})·|Σ| + y`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{LqcaError, Result};
use crate::numerics::{Amplitude, Tolerance};

/// Index of the quiescent state in every [`Alphabet`].
pub const QUIESCENT: usize = 0;

/// Encodes `word` in base `base`, most significant digit first.
pub fn word_index(word: &[usize], base: usize) -> usize {
    word.iter().fold(0, |acc, &x| acc * base + x)
}

/// Inverse of [`word_index`] for words of length `len`.
pub fn word_digits(mut index: usize, len: usize, base: usize) -> Vec<usize> {
    let mut digits = vec![0; len];
    for slot in digits.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    digits
}

/// Ordered set of state symbols; the quiescent state is always index 0 and
/// the remaining states keep their input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(
        symbols: impl IntoIterator<Item = S>,
        quiescent: &str,
    ) -> Result<Self> {
        let listed: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if listed.is_empty() {
            return Err(LqcaError::EmptyAlphabet);
        }
        for (i, s) in listed.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(LqcaError::InvalidSymbol(s.clone()));
            }
            if listed[..i].contains(s) {
                return Err(LqcaError::DuplicateState(s.clone()));
            }
        }
        if !listed.iter().any(|s| s == quiescent) {
            return Err(LqcaError::UnknownState(quiescent.to_string()));
        }
        let mut symbols = vec![quiescent.to_string()];
        symbols.extend(listed.into_iter().filter(|s| s != quiescent));
        Ok(Alphabet { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn quiescent(&self) -> &str {
        &self.symbols[QUIESCENT]
    }

    pub fn symbol(&self, index: usize) -> &str {
        &self.symbols[index]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, symbol: &str) -> Result<usize> {
        self.symbols
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| LqcaError::UnknownState(symbol.to_string()))
    }

    fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses a word. Whitespace separates letters when present; otherwise
    /// single-character alphabets split per character and multi-character
    /// alphabets read the whole text as one letter.
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        if text.chars().any(char::is_whitespace) {
            return text.split_whitespace().map(|s| self.index_of(s)).collect();
        }
        if self.single_char() {
            return text
                .chars()
                .map(|c| self.index_of(c.encode_utf8(&mut [0; 4])))
                .collect();
        }
        Ok(vec![self.index_of(text)?])
    }

    pub fn format_word(&self, word: &[usize]) -> String {
        let sep = if self.single_char() { "" } else { " " };
        word.iter()
            .map(|&x| self.symbols[x].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }
}

/// Strictly increasing list of neighbor offsets `(a₁, …, a_r)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Neighborhood {
    offsets: Vec<i64>,
}

impl Neighborhood {
    pub fn new(offsets: Vec<i64>) -> Result<Self> {
        if offsets.is_empty() || offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LqcaError::InvalidNeighborhood(offsets));
        }
        Ok(Neighborhood { offsets })
    }

    /// `(0, 1, …, r−1)`.
    pub fn standard(r: usize) -> Self {
        Neighborhood {
            offsets: (0..r as i64).collect(),
        }
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> i64 {
        self.offsets[0]
    }

    pub fn last(&self) -> i64 {
        self.offsets[self.offsets.len() - 1]
    }

    /// `s = a_r − a₁ + 1`.
    pub fn span(&self) -> usize {
        (self.last() - self.first() + 1) as usize
    }

    pub fn is_simple(&self) -> bool {
        self.span() == self.len()
    }

    pub fn is_standard(&self) -> bool {
        self.is_simple() && self.first() == 0
    }
}

/// One violated model axiom.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// No entry for this neighborhood word in the input table.
    IncompleteTable { word: String },
    /// The word is listed but every amplitude is (numerically) zero.
    ZeroSuperposition { word: String },
    /// `δ(q^r)` is not the pure quiescent state.
    QuiescentRule { state: String, re: f64, im: f64 },
    NonIncreasingNeighborhood { offsets: Vec<i64> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IncompleteTable { word } => {
                write!(f, "incomplete table: no entry for word `{word}`")
            }
            Violation::ZeroSuperposition { word } => {
                write!(f, "all amplitudes of word `{word}` are zero")
            }
            Violation::QuiescentRule { state, re, im } => write!(
                f,
                "quiescent rule: amplitude of `{state}` from the all-quiescent word is ({re}, {im})"
            ),
            Violation::NonIncreasingNeighborhood { offsets } => {
                write!(f, "neighborhood {offsets:?} is not strictly increasing")
            }
        }
    }
}

/// Outcome of [`Automaton::validate`]. An empty violation list means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Set for `r = 1`, where cells evolve independently and the border
    /// construction does not apply.
    pub single_cell_neighborhood: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

/// A linear quantum cellular automaton `(Σ, q, N, δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Automaton {
    alphabet: Alphabet,
    neighborhood: Neighborhood,
    /// `table[word * |Σ| + y] = [δ(word)](y)`.
    table: Vec<Amplitude>,
    listed: Vec<bool>,
}

impl Automaton {
    /// Automaton with an empty table; every word starts unlisted.
    pub fn new(alphabet: Alphabet, neighborhood: Neighborhood) -> Self {
        let words = alphabet.len().pow(neighborhood.len() as u32);
        Automaton {
            table: vec![Amplitude::new(0.0, 0.0); words * alphabet.len()],
            listed: vec![false; words],
            alphabet,
            neighborhood,
        }
    }

    /// Builds a fully listed table from `rule(word)`, which returns the
    /// `|Σ|` amplitudes of the word's output superposition.
    pub fn from_fn(
        alphabet: Alphabet,
        neighborhood: Neighborhood,
        mut rule: impl FnMut(&[usize]) -> Vec<Amplitude>,
    ) -> Self {
        let mut automaton = Automaton::new(alphabet, neighborhood);
        let (t, r) = (automaton.num_states(), automaton.r());
        for index in 0..automaton.listed.len() {
            let word = word_digits(index, r, t);
            let row = rule(&word);
            assert_eq!(row.len(), t, "rule row must have one amplitude per state");
            automaton.table[index * t..(index + 1) * t].copy_from_slice(&row);
            automaton.listed[index] = true;
        }
        automaton
    }

    /// Sets one amplitude and marks the word as listed.
    pub fn set_amplitude(&mut self, word: &[usize], y: usize, value: Amplitude) -> Result<()> {
        let t = self.num_states();
        if word.len() != self.r() {
            return Err(LqcaError::WrongWordLength {
                word: self.alphabet.format_word(word),
                expected: self.r(),
                found: word.len(),
            });
        }
        if let Some(&bad) = word.iter().chain(Some(&y)).find(|&&x| x >= t) {
            return Err(LqcaError::UnknownState(format!("#{bad}")));
        }
        let index = word_index(word, t);
        self.table[index * t + y] = value;
        self.listed[index] = true;
        Ok(())
    }

    /// Marks a word as present in the table without setting amplitudes.
    pub fn mark_listed(&mut self, word: &[usize]) {
        let index = word_index(word, self.num_states());
        self.listed[index] = true;
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn neighborhood(&self) -> &Neighborhood {
        &self.neighborhood
    }

    pub fn num_states(&self) -> usize {
        self.alphabet.len()
    }

    /// Neighborhood size `r`.
    pub fn r(&self) -> usize {
        self.neighborhood.len()
    }

    /// `m = |Σ|^{r−1}`, the dimension of the border vectors.
    pub fn border_dim(&self) -> usize {
        self.num_states().pow(self.r().saturating_sub(1) as u32)
    }

    /// `n = |Σ|^{r+1}`.
    pub fn size(&self) -> usize {
        self.num_states().pow(self.r() as u32 + 1)
    }

    /// `(s+1)/(r+1)` with `s` the neighborhood span.
    pub fn expansion_factor(&self) -> f64 {
        (self.neighborhood.span() as f64 + 1.0) / (self.r() as f64 + 1.0)
    }

    /// Amplitudes `[δ(word)](·)` for an encoded word.
    pub fn row(&self, word: usize) -> &[Amplitude] {
        let t = self.num_states();
        &self.table[word * t..(word + 1) * t]
    }

    pub fn amplitude(&self, word: &[usize], y: usize) -> Amplitude {
        self.row(word_index(word, self.num_states()))[y]
    }

    /// `[δ(word)](y)` addressed by symbols.
    pub fn local_amplitude(&self, word: &[&str], y: &str) -> Result<Amplitude> {
        if word.len() != self.r() {
            return Err(LqcaError::WrongWordLength {
                word: word.join(" "),
                expected: self.r(),
                found: word.len(),
            });
        }
        let word = word
            .iter()
            .map(|s| self.alphabet.index_of(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.amplitude(&word, self.alphabet.index_of(y)?))
    }

    pub fn is_listed(&self, word: usize) -> bool {
        self.listed[word]
    }

    /// Checks the model axioms: a complete table, a nonzero superposition for
    /// every word and the quiescent rule.
    pub fn validate(&self, tol: &Tolerance) -> ValidationReport {
        let mut violations = Vec::new();
        let (t, r) = (self.num_states(), self.r());
        for index in 0..self.listed.len() {
            let word = || self.alphabet.format_word(&word_digits(index, r, t));
            if !self.listed[index] {
                violations.push(Violation::IncompleteTable { word: word() });
            } else if self.row(index).iter().all(|a| a.norm_sqr() <= tol.zero_abs) {
                violations.push(Violation::ZeroSuperposition { word: word() });
            }
        }
        for (y, a) in self.row(0).iter().enumerate() {
            let expected = if y == QUIESCENT { 1.0 } else { 0.0 };
            if (a - expected).norm() > tol.zero_abs {
                violations.push(Violation::QuiescentRule {
                    state: self.alphabet.symbol(y).to_string(),
                    re: a.re,
                    im: a.im,
                });
            }
        }
        ValidationReport {
            violations,
            single_cell_neighborhood: r == 1,
        }
    }

    /// Shifts a contiguous neighborhood to `(0, …, r−1)`, keeping the table.
    /// The result differs from the input by a composition with a shift, so
    /// one is unitary exactly when the other is.
    pub fn normalize_neighborhood(&self) -> Result<Automaton> {
        if !self.neighborhood.is_simple() {
            return Err(LqcaError::NotSimple(self.neighborhood.offsets.clone()));
        }
        Ok(Automaton {
            neighborhood: Neighborhood::standard(self.r()),
            ..self.clone()
        })
    }

    /// Rewrites the rule over the contiguous window `a₁ … a_r`; the new rule
    /// reads the original offsets and ignores the gap cells, so the global
    /// operator is unchanged. Simple automata are returned as they are.
    pub fn expand_to_simple(&self) -> Automaton {
        if self.neighborhood.is_simple() {
            return self.clone();
        }
        let t = self.num_states();
        let first = self.neighborhood.first();
        let span = self.neighborhood.span();
        let picks: Vec<usize> = self
            .neighborhood
            .offsets
            .iter()
            .map(|&a| (a - first) as usize)
            .collect();
        let mut expanded = Automaton::new(
            self.alphabet.clone(),
            Neighborhood {
                offsets: (first..first + span as i64).collect(),
            },
        );
        let mut original = vec![0; self.r()];
        for index in 0..expanded.listed.len() {
            let wide = word_digits(index, span, t);
            for (slot, &p) in original.iter_mut().zip(&picks) {
                *slot = wide[p];
            }
            let source = word_index(&original, t);
            expanded.table[index * t..(index + 1) * t].copy_from_slice(self.row(source));
            expanded.listed[index] = self.listed[source];
        }
        expanded
    }

    /// Spatial reflection `c ↦ (i ↦ c₋ᵢ)`: every rule word is reversed and
    /// the neighborhood becomes `(−a_r, …, −a₁)`.
    pub fn reflected(&self) -> Automaton {
        let (t, r) = (self.num_states(), self.r());
        let mut reflected = Automaton {
            neighborhood: Neighborhood {
                offsets: self.neighborhood.offsets.iter().rev().map(|a| -a).collect(),
            },
            ..self.clone()
        };
        for index in 0..self.listed.len() {
            let mut word = word_digits(index, r, t);
            word.reverse();
            let source = word_index(&word, t);
            reflected.table[index * t..(index + 1) * t].copy_from_slice(self.row(source));
            reflected.listed[index] = self.listed[source];
        }
        reflected
    }
}

/// Integer interval `[lo, hi]`; empty when `hi < lo`, canonically `[0, −1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub const EMPTY: Interval = Interval { lo: 0, hi: -1 };

    pub fn new(lo: i64, hi: i64) -> Self {
        if hi < lo {
            Interval::EMPTY
        } else {
            Interval { lo, hi }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.is_empty() || (self.contains(other.lo) && self.contains(other.hi))
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Finite configuration: only non-quiescent cells are stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    cells: BTreeMap<i64, usize>,
}

impl Configuration {
    /// The everywhere quiescent configuration.
    pub fn quiescent() -> Self {
        Configuration::default()
    }

    pub fn from_cells(cells: impl IntoIterator<Item = (i64, usize)>) -> Self {
        Configuration {
            cells: cells.into_iter().filter(|&(_, s)| s != QUIESCENT).collect(),
        }
    }

    /// Places `word` on cells `start, start+1, …`.
    pub fn from_word(start: i64, word: &[usize]) -> Self {
        Configuration::from_cells(word.iter().enumerate().map(|(k, &s)| (start + k as i64, s)))
    }

    pub fn get(&self, i: i64) -> usize {
        self.cells.get(&i).copied().unwrap_or(QUIESCENT)
    }

    pub fn is_quiescent(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.cells.iter().map(|(&i, &s)| (i, s))
    }

    /// Smallest interval containing the support.
    pub fn idom(&self) -> Interval {
        match (self.cells.keys().next(), self.cells.keys().next_back()) {
            (Some(&lo), Some(&hi)) => Interval { lo, hi },
            _ => Interval::EMPTY,
        }
    }

    /// The states over `idom`, empty for the quiescent configuration.
    pub fn word(&self) -> Vec<usize> {
        self.idom().iter().map(|i| self.get(i)).collect()
    }

    pub fn shifted(&self, by: i64) -> Self {
        Configuration {
            cells: self.cells.iter().map(|(&i, &s)| (i + by, s)).collect(),
        }
    }

    /// `idom=[j,k] word` rendering, or `quiescent`.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        if self.is_quiescent() {
            return "quiescent".to_string();
        }
        let idom = self.idom();
        format!("{idom} {}", alphabet.format_word(&self.word()))
    }
}
