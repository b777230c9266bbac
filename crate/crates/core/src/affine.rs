//! Closure of `{l}` under the transfer operators, and the incremental basis
//! that drives it.
//!
//! A vector `v` lies in the affine hull of `B` exactly when `(v, 1)` lies in
//! the linear span of `{(b, 1) : b ∈ B}`, so the closure runs entirely on
//! lifted `(m+1)`-vectors and only ever asks linear-span questions.
//!
//! [`DynamicBasis`] keeps an invertible `T` with `T(span B) = ℝ^d × {0}`.
//! Membership of `u` is then a look at the last `n − d` entries of `T u`, and
//! adding `u` only rewrites rows `d+1 … n` of `T`, so both requests cost
//! `O(n(n−d))`.

use std::cell::Cell;

use crate::error::{LqcaError, Result};
use crate::numerics::Tolerance;
use crate::transfer::{inner, TransferOperator};

/// How [`DynamicBasis::add`] clears the tail of `T u` after pivoting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateRule {
    /// Householder reflection on rows `d+1 … n`; keeps `T` orthogonal.
    Householder,
    /// Elimination `v_i ← v_i − v_{d+1} u′_i / u′_{d+1}`; `T` stays invertible
    /// but not orthogonal.
    Shear,
}

impl Default for UpdateRule {
    fn default() -> Self {
        if cfg!(feature = "shear-update") {
            UpdateRule::Shear
        } else {
            UpdateRule::Householder
        }
    }
}

/// Appends the coordinate 1.
pub fn lift(v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len() + 1);
    out.extend_from_slice(v);
    out.push(1.0);
    out
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone)]
pub struct DynamicBasis {
    n: usize,
    /// Row-major `n × n`.
    transform: Vec<f64>,
    dim: usize,
    basis: Vec<Vec<f64>>,
    provenance: Vec<Vec<usize>>,
    rule: UpdateRule,
    membership_rel: f64,
    multiplications: Cell<u64>,
}

impl DynamicBasis {
    /// Empty basis in `ℝⁿ`: `T = I`, `d = 0`.
    pub fn new(n: usize, tol: &Tolerance) -> Self {
        let mut transform = vec![0.0; n * n];
        for i in 0..n {
            transform[i * n + i] = 1.0;
        }
        DynamicBasis {
            n,
            transform,
            dim: 0,
            basis: Vec::new(),
            provenance: Vec::new(),
            rule: UpdateRule::default(),
            membership_rel: tol.membership_rel,
            multiplications: Cell::new(0),
        }
    }

    pub fn with_rule(mut self, rule: UpdateRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn provenance(&self) -> &[Vec<usize>] {
        &self.provenance
    }

    pub fn transform_row(&self, i: usize) -> &[f64] {
        &self.transform[i * self.n..(i + 1) * self.n]
    }

    /// Scalar multiplications performed by requests so far.
    pub fn multiplications(&self) -> u64 {
        self.multiplications.get()
    }

    fn count(&self, k: usize) {
        self.multiplications.set(self.multiplications.get() + k as u64);
    }

    fn check_dim(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n {
            return Err(LqcaError::DimensionMismatch {
                expected: self.n,
                found: u.len(),
            });
        }
        Ok(())
    }

    /// Entries `d+1 … n` of `T u`.
    fn tail(&self, u: &[f64]) -> Vec<f64> {
        self.count((self.n - self.dim) * self.n);
        (self.dim..self.n)
            .map(|i| inner(self.transform_row(i), u))
            .collect()
    }

    fn is_negligible(&self, tail: &[f64], u: &[f64]) -> bool {
        let bound = self.membership_rel * norm(u).max(1.0);
        tail.iter().all(|x| x.abs() <= bound)
    }

    /// Is `u` in the span of the stored vectors?
    pub fn member(&self, u: &[f64]) -> Result<bool> {
        self.check_dim(u)?;
        Ok(self.is_negligible(&self.tail(u), u))
    }

    /// Adds `u`, which must not already be in the span, recording `word` as
    /// the way it was generated.
    pub fn add(&mut self, u: &[f64], word: Vec<usize>) -> Result<()> {
        self.check_dim(u)?;
        let mut tail = self.tail(u);
        if self.is_negligible(&tail, u) {
            return Err(LqcaError::AlreadyInSpan);
        }
        let n = self.n;
        let d = self.dim;

        // Pivot: largest tail entry moves to position d.
        let k = (0..tail.len())
            .max_by(|&i, &j| tail[i].abs().total_cmp(&tail[j].abs()))
            .expect("tail is nonempty when u is outside the span");
        if k != 0 {
            tail.swap(0, k);
            for j in 0..n {
                self.transform.swap(d * n + j, (d + k) * n + j);
            }
        }

        match self.rule {
            UpdateRule::Householder if tail.len() > 1 => {
                // H = I − 2 v vᵀ / vᵀv with H·tail = α e₁.
                let alpha = -tail[0].signum() * norm(&tail);
                let mut v = tail;
                v[0] -= alpha;
                let vv = inner(&v, &v);
                self.count(v.len() + 1);
                for j in 0..n {
                    let s: f64 = v
                        .iter()
                        .enumerate()
                        .map(|(i, vi)| vi * self.transform[(d + i) * n + j])
                        .sum();
                    let f = 2.0 * s / vv;
                    for (i, vi) in v.iter().enumerate() {
                        self.transform[(d + i) * n + j] -= f * vi;
                    }
                }
                self.count(2 * n * v.len() + n);
            }
            UpdateRule::Shear => {
                for i in 1..tail.len() {
                    let f = tail[i] / tail[0];
                    if f == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        let pivot = self.transform[d * n + j];
                        self.transform[(d + i) * n + j] -= f * pivot;
                    }
                }
                self.count(tail.len() * (n + 1));
            }
            UpdateRule::Householder => {}
        }

        self.dim += 1;
        self.basis.push(u.to_vec());
        self.provenance.push(word);
        Ok(())
    }

    /// Largest `‖tail(T b)‖ / ‖b‖` over stored `b`; zero up to roundoff when
    /// the representation invariant holds.
    pub fn invariant_residual(&self) -> f64 {
        self.basis
            .iter()
            .map(|b| {
                let t: f64 = (self.dim..self.n)
                    .map(|i| inner(self.transform_row(i), b).powi(2))
                    .sum();
                t.sqrt() / norm(b).max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

/// Outcome of [`decide_closed`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureVerdict {
    pub closed: bool,
    /// Word `b` of the first stored `M_b l` off the hyperplane.
    pub witness_word: Option<Vec<usize>>,
    /// `⟨M_b l | r⟩` for the witness.
    pub witness_value: Option<f64>,
    /// Size of the final lifted basis.
    pub final_dimension: usize,
    /// Generations that added at least one vector.
    pub iterations: usize,
}

/// Decides whether every `M_b l` has unit inner product with `r`.
///
/// Images are explored breadth first by generation with letters in alphabet
/// order, and only images outside the current span are kept; each
/// productive generation raises the dimension, so at most `m` generations
/// run. The closure lies in `{u : ⟨u|r⟩ = 1}` exactly when every stored
/// generator does. `l` itself is the first generator, so a violation of
/// `⟨l|r⟩ = 1` is reported with the empty word.
pub fn decide_closed(
    l: &[f64],
    r: &[f64],
    ops: &[TransferOperator],
    tol: &Tolerance,
) -> Result<ClosureVerdict> {
    decide_closed_with(l, r, ops, tol, UpdateRule::default())
}

pub fn decide_closed_with(
    l: &[f64],
    r: &[f64],
    ops: &[TransferOperator],
    tol: &Tolerance,
    rule: UpdateRule,
) -> Result<ClosureVerdict> {
    let m = l.len();
    if r.len() != m {
        return Err(LqcaError::DimensionMismatch {
            expected: m,
            found: r.len(),
        });
    }
    if let Some(op) = ops.iter().find(|op| op.dim() != m) {
        return Err(LqcaError::DimensionMismatch {
            expected: m,
            found: op.dim(),
        });
    }

    let mut basis = DynamicBasis::new(m + 1, tol).with_rule(rule);
    let start = lift(l);
    basis.add(&start, Vec::new())?;
    let mut frontier = vec![(start, Vec::new())];
    let mut iterations = 0;

    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (v, word) in &frontier {
            for op in ops {
                let mut image = op.apply(&v[..m]);
                image.push(v[m]);
                if !basis.member(&image)? {
                    let mut w: Vec<usize> = word.clone();
                    w.push(op.letter);
                    basis.add(&image, w.clone())?;
                    next.push((image, w));
                }
            }
        }
        if !next.is_empty() {
            iterations += 1;
        }
        frontier = next;
    }

    let r_norm = norm(r);
    let violator = basis
        .basis()
        .iter()
        .zip(basis.provenance())
        .map(|(b, word)| (inner(&b[..m], r), norm(&b[..m]), word))
        .find(|&(value, b_norm, _)| !tol.is_unit(value, b_norm * r_norm));

    Ok(ClosureVerdict {
        closed: violator.is_none(),
        witness_word: violator.map(|(_, _, w)| w.clone()),
        witness_value: violator.map(|(v, _, _)| v),
        final_dimension: basis.dim(),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::fixtures::*;
    use crate::transfer::build_transfer_operators;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift(&[1.0, 1.0]), vec![1.0, 1.0, 1.0]);
        assert_eq!(lift(&[0.0, 0.0]), vec![0.0, 0.0, 1.0]);
        // (3,−1) = −(1,1) + 2(2,0) with coefficients summing to 1
        let mut b = DynamicBasis::new(3, &tol());
        b.add(&lift(&[1.0, 1.0]), vec![]).unwrap();
        b.add(&lift(&[2.0, 0.0]), vec![]).unwrap();
        assert!(b.member(&lift(&[3.0, -1.0])).unwrap());
        assert!(!b.member(&lift(&[3.0, 0.0])).unwrap());
    }

    #[test]
    fn empty_basis() {
        let b = DynamicBasis::new(4, &tol());
        assert_eq!(b.dim(), 0);
        assert!(!b.member(&[0.0, 1.0, 0.0, 0.0]).unwrap());
        assert!(b.member(&[0.0; 4]).unwrap());
        assert_eq!(b.transform_row(2), [0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn add_then_member() {
        for rule in [UpdateRule::Householder, UpdateRule::Shear] {
            let mut b = DynamicBasis::new(3, &tol()).with_rule(rule);
            b.add(&[1.0, 0.0, 0.0], vec![0]).unwrap();
            assert_eq!(b.dim(), 1);
            assert!(b.member(&[1.0, 0.0, 0.0]).unwrap());
            assert!(b.member(&[-3.5, 0.0, 0.0]).unwrap());
            assert!(matches!(
                b.add(&[2.0, 0.0, 0.0], vec![]),
                Err(LqcaError::AlreadyInSpan)
            ));
            assert!(b.invariant_residual() < 1e-12);
            assert!(b.member(&[1.0]).is_err());
        }
    }

    #[test]
    fn saturation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for rule in [UpdateRule::Householder, UpdateRule::Shear] {
            let n = 6;
            let mut b = DynamicBasis::new(n, &tol()).with_rule(rule);
            for _ in 0..n {
                let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                b.add(&u, vec![]).unwrap();
                assert!(b.invariant_residual() < 1e-10);
            }
            assert_eq!(b.dim(), n);
            let any: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            assert!(b.member(&any).unwrap());
        }
    }

    #[test]
    fn householder_keeps_transform_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 5;
        let mut b = DynamicBasis::new(n, &tol()).with_rule(UpdateRule::Householder);
        for _ in 0..3 {
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            b.add(&u, vec![]).unwrap();
        }
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 1.0 } else { 0.0 };
                let dot = inner(b.transform_row(i), b.transform_row(j));
                assert!((dot - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn qflip_is_closed() {
        let ops = build_transfer_operators(&qflip()).unwrap();
        let v = decide_closed(&[1.0, 1.0], &[1.0, 0.0], &ops, &tol()).unwrap();
        assert!(v.closed);
        assert_eq!(v.final_dimension, 1);
        assert_eq!(v.iterations, 0);
        assert_eq!(v.witness_word, None);
    }

    #[test]
    fn xor_is_not_closed() {
        let ops = build_transfer_operators(&xor()).unwrap();
        let v = decide_closed(&[1.0, 0.0], &[1.0, 0.0], &ops, &tol()).unwrap();
        assert!(!v.closed);
        assert_eq!(v.witness_word, Some(vec![1]));
        assert_eq!(v.witness_value, Some(0.0));
        assert!(v.iterations <= 2 && v.final_dimension <= 3);
    }

    #[test]
    fn no_operators_is_closed() {
        let v = decide_closed(&[0.5, 0.5], &[1.0, 1.0], &[], &tol()).unwrap();
        assert!(v.closed);
        assert_eq!(v.final_dimension, 1);
    }

    #[test]
    fn broken_start_yields_empty_witness() {
        let v = decide_closed(&[0.5, 0.0], &[1.0, 0.0], &[], &tol()).unwrap();
        assert_eq!(v.witness_word, Some(vec![]));
    }

    #[test]
    fn rules_agree_on_fixtures() {
        for (a, l, r) in [
            (qflip(), [1.0, 1.0], [1.0, 0.0]),
            (xor(), [1.0, 0.0], [1.0, 0.0]),
            (shift(), [1.0, 0.0], [1.0, 1.0]),
        ] {
            let ops = build_transfer_operators(&a).unwrap();
            let h = decide_closed_with(&l, &r, &ops, &tol(), UpdateRule::Householder).unwrap();
            let s = decide_closed_with(&l, &r, &ops, &tol(), UpdateRule::Shear).unwrap();
            assert_eq!(h, s);
        }
    }
}
