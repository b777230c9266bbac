//! Brute-force global evolution on finite superpositions.
//!
//! Everything here works directly from the product formula
//! `U(d,c) = ∏ᵢ [δ(c_{i+N})](dᵢ)` over explicit finite windows, with no use of
//! border vectors or transfer operators. It is the ground truth the rest of
//! the crate is tested against, and it only scales to desk-sized windows.
//!
//! Cell `i` reads `c_{i+a₁} … c_{i+a_r}`, so a configuration supported in
//! `[j,k]` can only influence cells in `[j−a_r, k−a₁]`; every other cell reads
//! `q^r` and contributes the factor `[dᵢ = q]`.

use std::collections::{BTreeMap, HashMap};

use crate::automaton::{word_index, Automaton, Configuration, Interval, QUIESCENT};
use crate::error::{LqcaError, Result};
use crate::numerics::{Amplitude, Tolerance};
use crate::par::Execution;

pub const DEFAULT_ORACLE_LIMIT: usize = 22;

/// Finite-support superposition of configurations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Superposition {
    terms: BTreeMap<Configuration, Amplitude>,
}

impl Superposition {
    pub fn new() -> Self {
        Superposition::default()
    }

    /// Amplitude 1 on a single configuration.
    pub fn pure(c: Configuration) -> Self {
        let mut s = Superposition::new();
        s.add_term(c, Amplitude::new(1.0, 0.0));
        s
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Configuration, Amplitude)>) -> Self {
        let mut s = Superposition::new();
        for (c, a) in terms {
            s.add_term(c, a);
        }
        s
    }

    pub fn add_term(&mut self, c: Configuration, a: Amplitude) {
        *self.terms.entry(c).or_default() += a;
    }

    pub fn amplitude(&self, c: &Configuration) -> Amplitude {
        self.terms.get(c).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Configuration, &Amplitude)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: Amplitude, other: &Superposition, beta: Amplitude) -> Self {
        let mut out = Superposition::new();
        for (c, a) in &self.terms {
            out.add_term(c.clone(), alpha * a);
        }
        for (c, a) in &other.terms {
            out.add_term(c.clone(), beta * a);
        }
        out
    }

    /// Drops terms with magnitude at or below `zero_abs`.
    pub fn pruned(mut self, tol: &Tolerance) -> Self {
        self.terms.retain(|_, a| a.norm() > tol.zero_abs);
        self
    }

    /// Terms by decreasing magnitude; ties keep configuration order.
    pub fn by_magnitude(&self) -> Vec<(&Configuration, Amplitude)> {
        let mut terms: Vec<_> = self.terms.iter().map(|(c, a)| (c, *a)).collect();
        terms.sort_by(|x, y| y.1.norm().total_cmp(&x.1.norm()));
        terms
    }
}

/// Largest deviations of the column Gram matrix from the identity over all
/// configurations supported in `window`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub window: Interval,
    pub columns: usize,
    /// `max |‖U c‖² − 1|`.
    pub max_norm_deviation: f64,
    /// `max |⟨U c | U c′⟩|` over `c ≠ c′`.
    pub max_offdiag: f64,
    /// Pair realizing the larger of the two deviations (`c = c′` for a norm
    /// defect).
    pub worst_pair: Option<(Configuration, Configuration)>,
}

impl GramReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_norm_deviation.max(self.max_offdiag)
    }

    pub fn passes(&self, threshold: f64) -> bool {
        self.max_deviation() <= threshold
    }
}

/// The brute-force evolution oracle for one automaton.
#[derive(Debug, Clone)]
pub struct Evolution<'a> {
    automaton: &'a Automaton,
    tolerance: Tolerance,
    limit: usize,
    execution: Execution,
}

impl<'a> Evolution<'a> {
    pub fn new(automaton: &'a Automaton) -> Self {
        Evolution {
            automaton,
            tolerance: Tolerance::default(),
            limit: DEFAULT_ORACLE_LIMIT,
            execution: Execution::default(),
        }
    }

    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn automaton(&self) -> &Automaton {
        self.automaton
    }

    /// Cells whose input window meets `source`.
    pub fn reach(&self, source: Interval) -> Interval {
        if source.is_empty() {
            return Interval::EMPTY;
        }
        let n = self.automaton.neighborhood();
        Interval::new(source.lo - n.last(), source.hi - n.first())
    }

    fn check_width(&self, width: usize) -> Result<()> {
        if width > self.limit {
            Err(LqcaError::OracleScaleExceeded {
                width,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    /// Product of the local amplitudes over `cells`, with `source(i)` giving
    /// the predecessor state of cell `i`.
    fn product(
        &self,
        cells: Interval,
        source: impl Fn(i64) -> usize,
        target: impl Fn(i64) -> usize,
    ) -> Amplitude {
        let t = self.automaton.num_states();
        let offsets = self.automaton.neighborhood().offsets();
        let mut acc = Amplitude::new(1.0, 0.0);
        for i in cells.iter() {
            let word = offsets.iter().fold(0, |w, &a| w * t + source(i + a));
            acc *= self.automaton.row(word)[target(i)];
            if acc == Amplitude::default() {
                break;
            }
        }
        acc
    }

    /// `U(d, c)`.
    pub fn transition_amplitude(&self, d: &Configuration, c: &Configuration) -> Amplitude {
        let cells = self.reach(c.idom());
        if !cells.contains_interval(&d.idom()) {
            return Amplitude::default();
        }
        if cells.is_empty() {
            return Amplitude::new(1.0, 0.0);
        }
        self.product(cells, |i| c.get(i), |i| d.get(i))
    }

    /// Every successor of the pure configuration `c` with its amplitude
    /// (unpruned). The image factorizes cell by cell, so only nonzero local
    /// choices are expanded.
    fn successors(&self, c: &Configuration) -> Result<Vec<(Configuration, Amplitude)>> {
        let cells = self.reach(c.idom());
        self.check_width(cells.len())?;
        let t = self.automaton.num_states();
        let offsets = self.automaton.neighborhood().offsets();
        let mut partial: Vec<(Vec<(i64, usize)>, Amplitude)> =
            vec![(Vec::new(), Amplitude::new(1.0, 0.0))];
        for i in cells.iter() {
            let word = offsets.iter().fold(0, |w, &a| w * t + c.get(i + a));
            let row = self.automaton.row(word);
            let mut next = Vec::with_capacity(partial.len() * 2);
            for (states, amp) in &partial {
                for (y, &a) in row.iter().enumerate() {
                    if a == Amplitude::default() {
                        continue;
                    }
                    let mut states = states.clone();
                    if y != QUIESCENT {
                        states.push((i, y));
                    }
                    next.push((states, amp * a));
                }
            }
            partial = next;
        }
        Ok(partial
            .into_iter()
            .map(|(states, amp)| (Configuration::from_cells(states), amp))
            .collect())
    }

    /// One application of `U` to `u`, pruned at `zero_abs`.
    pub fn step(&self, u: &Superposition) -> Result<Superposition> {
        let terms: Vec<_> = u.terms().collect();
        let images = self
            .execution
            .map_range(terms.len(), |k| self.successors(terms[k].0));
        let mut out = Superposition::new();
        for ((_, &amp), image) in terms.iter().zip(images) {
            for (d, a) in image? {
                out.add_term(d, amp * a);
            }
        }
        Ok(out.pruned(&self.tolerance))
    }

    /// Column Gram deviations over all configurations supported in `window`.
    /// A clean report is necessary for well-formedness but not sufficient;
    /// any failure is a genuine defect since the columns are computed exactly.
    pub fn truncated_column_gram(&self, window: Interval) -> Result<GramReport> {
        self.check_width(window.len())?;
        let t = self.automaton.num_states();
        let count = t.pow(window.len() as u32);
        let sources: Vec<Configuration> = (0..count)
            .map(|k| configuration_in(window, k, t))
            .collect();
        let columns = self
            .execution
            .map_range(count, |k| self.successors(&sources[k]))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;

        let mut rows: HashMap<&Configuration, Vec<(usize, Amplitude)>> = HashMap::new();
        for (k, column) in columns.iter().enumerate() {
            for (d, a) in column {
                rows.entry(d).or_default().push((k, *a));
            }
        }

        // Per column: (norm deviation, worst off-diagonal magnitude, its partner).
        let stats = self.execution.map_range(count, |k| {
            let mut inner: HashMap<usize, Amplitude> = HashMap::new();
            for (d, a) in &columns[k] {
                for &(other, b) in &rows[d] {
                    if other >= k {
                        *inner.entry(other).or_default() += a.conj() * b;
                    }
                }
            }
            let norm = inner.get(&k).map_or(0.0, |v| v.re);
            let worst = inner
                .iter()
                .filter(|(&other, _)| other != k)
                .map(|(&other, v)| (v.norm(), other))
                .max_by(|x, y| x.0.total_cmp(&y.0).then(y.1.cmp(&x.1)));
            ((norm - 1.0).abs(), worst)
        });

        let mut report = GramReport {
            window,
            columns: count,
            max_norm_deviation: 0.0,
            max_offdiag: 0.0,
            worst_pair: None,
        };
        let mut worst_value = -1.0;
        for (k, (norm_dev, off)) in stats.into_iter().enumerate() {
            if norm_dev > report.max_norm_deviation {
                report.max_norm_deviation = norm_dev;
            }
            if norm_dev > worst_value {
                worst_value = norm_dev;
                report.worst_pair = Some((sources[k].clone(), sources[k].clone()));
            }
            if let Some((value, other)) = off {
                if value > report.max_offdiag {
                    report.max_offdiag = value;
                }
                if value > worst_value {
                    worst_value = value;
                    report.worst_pair = Some((sources[k].clone(), sources[other].clone()));
                }
            }
        }
        Ok(report)
    }

    /// `Σ |U(d,c)|²` over all `c` supported in `window`: a lower bound on the
    /// squared norm of row `d`, nondecreasing in the window.
    pub fn truncated_row_norm(&self, d: &Configuration, window: Interval) -> Result<f64> {
        self.check_width(window.len())?;
        let t = self.automaton.num_states();
        let width = window.len();
        let cells = self.reach(window);
        if !cells.contains_interval(&d.idom()) {
            // Some non-quiescent cell of d is unreachable from the window; only
            // the quiescent source could still contribute, and it cannot.
            return Ok(0.0);
        }
        let target: Vec<usize> = cells.iter().map(|i| d.get(i)).collect();
        let count = t.pow(width as u32);
        Ok(self.execution.sum_range(count, |k| {
            let mut states = vec![QUIESCENT; width];
            let mut rest = k;
            for slot in states.iter_mut().rev() {
                *slot = rest % t;
                rest /= t;
            }
            let source = |i: i64| {
                if window.contains(i) {
                    states[(i - window.lo) as usize]
                } else {
                    QUIESCENT
                }
            };
            self.product(cells, source, |i| target[(i - cells.lo) as usize])
                .norm_sqr()
        }))
    }
}

/// The `k`-th configuration supported in `window` in base-`t` order.
pub fn configuration_in(window: Interval, k: usize, t: usize) -> Configuration {
    let digits = crate::automaton::word_digits(k, window.len(), t);
    Configuration::from_word(window.lo, &digits)
}

/// Every configuration supported in `window`.
pub fn configurations_in(window: Interval, t: usize) -> impl Iterator<Item = Configuration> {
    (0..t.pow(window.len() as u32)).map(move |k| configuration_in(window, k, t))
}

/// Encoded index of the word a cell at `i` reads, for callers that need it.
pub fn neighborhood_word(a: &Automaton, c: &Configuration, i: i64) -> usize {
    let word: Vec<usize> = a
        .neighborhood()
        .offsets()
        .iter()
        .map(|&o| c.get(i + o))
        .collect();
    word_index(&word, a.num_states())
}
