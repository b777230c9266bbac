//! Fixtures, random generators and independent oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use lqca::automaton::{Alphabet, Automaton, Neighborhood};
use lqca::cli::load;
use lqca::numerics::Amplitude;
use lqca::transfer::{apply_word, inner, TransferOperator};
use rand::Rng;

pub const FIXTURES: [&str; 10] = [
    "qflip",
    "xor",
    "shift",
    "identity",
    "r1_unitary",
    "r1_nonunitary",
    "broken_quiescent",
    "broken_rule",
    "qflip_gap",
    "xor_gap",
];

/// Fixtures whose global operator preserves norms.
pub const WELL_FORMED: [&str; 7] = [
    "qflip",
    "xor",
    "shift",
    "identity",
    "r1_unitary",
    "qflip_gap",
    "xor_gap",
];

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

pub fn automaton(name: &str) -> Automaton {
    load(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn digits_alphabet(t: usize) -> Alphabet {
    Alphabet::new((0..t).map(|i| i.to_string()), "0").unwrap()
}

pub fn random_unit_row<R: Rng>(rng: &mut R, t: usize) -> Vec<Amplitude> {
    loop {
        let row: Vec<Amplitude> = (0..t)
            .map(|_| Amplitude::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = row.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return row.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// Unit-norm random rows everywhere except the quiescent word.
pub fn random_automaton<R: Rng>(rng: &mut R, t: usize, r: usize) -> Automaton {
    Automaton::from_fn(digits_alphabet(t), Neighborhood::standard(r), |w| {
        if w.iter().all(|&x| x == 0) {
            let mut row = vec![Amplitude::default(); t];
            row[0] = Amplitude::new(1.0, 0.0);
            row
        } else {
            random_unit_row(rng, t)
        }
    })
}

/// Random unit-norm rows whose quiescent output vanishes on every word
/// `x q` (`x_first = false`) or `q x` (`x_first = true`) with `x ≠ q`. This
/// keeps the quiescent border vertex out of reach on one side, so the border
/// vectors are finite far more often than for unconstrained rows.
pub fn random_guarded_automaton<R: Rng>(rng: &mut R, t: usize, x_first: bool) -> Automaton {
    Automaton::from_fn(digits_alphabet(t), Neighborhood::standard(2), |w| {
        let guarded = if x_first { w[0] == 0 && w[1] != 0 } else { w[1] == 0 && w[0] != 0 };
        if w == [0, 0] {
            let mut row = vec![Amplitude::default(); t];
            row[0] = Amplitude::new(1.0, 0.0);
            row
        } else if guarded {
            let mut row = random_unit_row(rng, t);
            row[0] = Amplitude::default();
            let norm = row.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            row.into_iter().map(|a| a / norm).collect()
        } else {
            random_unit_row(rng, t)
        }
    })
}

/// Random `t × t` unitary fixing the quiescent basis vector, as columns.
pub fn random_unitary_fixing_quiescent<R: Rng>(rng: &mut R, t: usize) -> Vec<Vec<Amplitude>> {
    let mut cols: Vec<Vec<Amplitude>> = vec![{
        let mut e = vec![Amplitude::default(); t];
        e[0] = Amplitude::new(1.0, 0.0);
        e
    }];
    while cols.len() < t {
        let mut v = random_unit_row(rng, t);
        v[0] = Amplitude::default();
        for c in &cols {
            let p: Amplitude = c.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= p * ci;
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            cols.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    cols
}

/// `δ(x t y) = V e_x` (cellwise unitary) or `δ(x t y) = V e_y` (shifted
/// cellwise unitary); both have unitary global operators.
pub fn random_unitary_automaton<R: Rng>(rng: &mut R, t: usize, r: usize) -> Automaton {
    let v = random_unitary_fixing_quiescent(rng, t);
    let pick_last = rng.gen_bool(0.5);
    Automaton::from_fn(digits_alphabet(t), Neighborhood::standard(r), |w| {
        let x = if pick_last { w[w.len() - 1] } else { w[0] };
        v[x].clone()
    })
}

/// `Σ_{k=1}^{max_len} A^k`: the total weight of all paths with between one
/// and `max_len` edges.
pub fn path_sums(n: usize, weights: &[f64], max_len: usize) -> Vec<f64> {
    let mut power = weights.to_vec();
    let mut total = weights.to_vec();
    for _ in 1..max_len {
        let mut next = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let p = power[i * n + k];
                if p == 0.0 {
                    continue;
                }
                for j in 0..n {
                    next[i * n + j] += p * weights[k * n + j];
                }
            }
        }
        power = next;
        for (t, p) in total.iter_mut().zip(&power) {
            *t += p;
        }
    }
    total
}

/// Pairs `(i, j)` joined by a path with at least one edge, over edges with
/// weight above `eps`.
pub fn reachability(n: usize, weights: &[f64], eps: f64) -> Vec<bool> {
    let mut reach: Vec<bool> = weights.iter().map(|&w| w > eps).collect();
    for k in 0..n {
        for i in 0..n {
            if reach[i * n + k] {
                for j in 0..n {
                    if reach[k * n + j] {
                        reach[i * n + j] = true;
                    }
                }
            }
        }
    }
    reach
}

/// Rank by Gaussian elimination with partial pivoting; entries at most
/// `rel · max|entry|` count as zero.
pub fn rank(vectors: &[Vec<f64>], rel: f64) -> usize {
    let mut rows: Vec<Vec<f64>> = vectors.to_vec();
    let Some(cols) = rows.first().map(Vec::len) else {
        return 0;
    };
    let scale = rows
        .iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1.0);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len())
            .max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
        else {
            break;
        };
        if rows[pivot][col].abs() <= rel * scale {
            continue;
        }
        rows.swap(rank, pivot);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
        rank += 1;
    }
    rank
}

pub fn in_span(basis: &[Vec<f64>], u: &[f64], rel: f64) -> bool {
    let mut extended = basis.to_vec();
    extended.push(u.to_vec());
    rank(&extended, rel) == rank(basis, rel)
}

/// Every word over `t` letters with length at most `max_len`, shortest first.
pub fn words(t: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<usize>| {
                (0..t).map(move |a| {
                    let mut w = w.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Does `⟨M_b l | r⟩ = 1` hold for every word with `|b| ≤ max_len`?
pub fn all_rows_unit(
    ops: &[TransferOperator],
    l: &[f64],
    r: &[f64],
    max_len: usize,
    rel: f64,
) -> bool {
    let r_norm = inner(r, r).sqrt();
    words(ops.len(), max_len).iter().all(|b| {
        let v = apply_word(ops, b, l).unwrap();
        let scale = (inner(&v, &v).sqrt() * r_norm).max(1.0);
        (inner(&v, r) - 1.0).abs() <= rel * scale
    })
}
