//! Per-letter transfer operators `M_a` on `ℝ^{Σ^{r−1}}`.
//!
//! `M_a(w′, w) = |[δ(xty)](a)|²` when `w = xt` and `w′ = ty`, zero otherwise.
//! For a configuration `d` with interval domain `[j, k]` the squared norm of
//! row `d` of the global operator is `⟨M_{d_j…d_k} l | r⟩`, with
//! `M_{b₁…b_s} = M_{b_s} ⋯ M_{b₁}`.

use crate::automaton::{Automaton, Configuration};
use crate::error::{LqcaError, Result};

/// Dense `m × m` matrix, rows indexed by `w′` and columns by `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferOperator {
    pub letter: usize,
    dim: usize,
    entries: Vec<f64>,
}

impl TransferOperator {
    pub fn from_rows(letter: usize, rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "square matrix expected");
        TransferOperator {
            letter,
            dim,
            entries: rows.concat(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `M(w′, w)`.
    pub fn get(&self, to: usize, from: usize) -> f64 {
        self.entries[to * self.dim + from]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.entries
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum())
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks_exact(self.dim).map(<[f64]>::to_vec).collect()
    }
}

/// `(w, w′)` pairs with `w = xt`, `w′ = ty`, as `(w, y, w′)`.
fn adjacencies(a: &Automaton) -> impl Iterator<Item = (usize, usize, usize)> {
    let t = a.num_states();
    let m = a.border_dim();
    let tail = m / t;
    (0..m).flat_map(move |w| (0..t).map(move |y| (w, y, (w % tail) * t + y)))
}

/// One operator per letter, in alphabet order.
pub fn build_transfer_operators(a: &Automaton) -> Result<Vec<TransferOperator>> {
    if a.r() < 2 {
        return Err(LqcaError::NeighborhoodTooSmall(a.r()));
    }
    if !a.neighborhood().is_simple() {
        return Err(LqcaError::NotSimple(a.neighborhood().offsets().to_vec()));
    }
    let (t, m) = (a.num_states(), a.border_dim());
    let mut ops: Vec<TransferOperator> = (0..t)
        .map(|letter| TransferOperator {
            letter,
            dim: m,
            entries: vec![0.0; m * m],
        })
        .collect();
    for (w, y, next) in adjacencies(a) {
        let row = a.row(w * t + y);
        for (op, amp) in ops.iter_mut().zip(row) {
            op.entries[next * m + w] = amp.norm_sqr();
        }
    }
    Ok(ops)
}

/// Largest `|Σ_a M_a(w′,w) − 1|` over adjacent pairs. Zero when every rule
/// word maps to a unit-norm superposition; the model does not require that,
/// so this is only a diagnostic.
pub fn mass_deviation(a: &Automaton, ops: &[TransferOperator]) -> f64 {
    adjacencies(a)
        .map(|(w, _, next)| (ops.iter().map(|op| op.get(next, w)).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// `M_{b_s} ⋯ M_{b₁} v`; the empty word leaves `v` unchanged.
pub fn apply_word(ops: &[TransferOperator], word: &[usize], v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    for &letter in word {
        let op = ops
            .get(letter)
            .ok_or_else(|| LqcaError::UnknownState(format!("#{letter}")))?;
        if op.dim() != out.len() {
            return Err(LqcaError::DimensionMismatch {
                expected: op.dim(),
                found: out.len(),
            });
        }
        out = op.apply(&out);
    }
    Ok(out)
}

pub fn inner(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// `⟨M_word l | r⟩`.
pub fn word_row_norm(ops: &[TransferOperator], l: &[f64], r: &[f64], word: &[usize]) -> Result<f64> {
    Ok(inner(&apply_word(ops, word, l)?, r))
}

/// Squared norm of row `d` of the global operator, read off the word over
/// `idom(d)`.
pub fn row_norm_squared(ops: &[TransferOperator], l: &[f64], r: &[f64], d: &Configuration) -> f64 {
    word_row_norm(ops, l, r, &d.word()).expect("configuration states index the operator family")
}
