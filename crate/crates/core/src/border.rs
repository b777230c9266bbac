//! Border graphs and border vectors.
//!
//! `l_w` is the total weight of left-infinite paths in the configuration
//! graph that end at `w` and are quiescent far to the left; `r_w` is the
//! mirror quantity for right-infinite paths starting at `w`. Both reduce to
//! path sums in a finite graph over `Σ^{r−1}` whose edge `(xt, ty)` has weight
//! `|[δ(xty)](q)|²`, augmented with one extra vertex `s·q^{r−2}` that only
//! leads to `q^{r−2}y` for `y ≠ q`. That forces every counted path to leave
//! the quiescent word on its first edge. All-pairs path weights come from the
//! elimination recursion
//!
//! ```text
//! W_k(i,j) = W_{k−1}(i,j) + W_{k−1}(i,k) · W_{k−1}(k,k)* · W_{k−1}(k,j)
//! ```
//!
//! over `ℝ≥0 ∪ {∞}`.
//!
//! The right graph is the left construction applied to the reflected
//! automaton, whose vertex for the word `w` corresponds to the original word
//! `reverse(w)`.

use serde::Serialize;

use crate::automaton::{word_digits, Automaton, QUIESCENT};
use crate::error::{LqcaError, Result};
use crate::numerics::{ExtNonnegReal, Tolerance};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Dense weighted graph over `Σ^{r−1}` plus the augmented start vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderGraph {
    pub side: Side,
    /// Original-automaton word for each word vertex; the augmented vertex is
    /// the last index and has no word.
    labels: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl BorderGraph {
    /// Graph with `n` vertices and no edges; vertex `n − 1` is the augmented one.
    pub fn empty(side: Side, labels: Vec<Vec<usize>>) -> Self {
        let n = labels.len() + 1;
        BorderGraph {
            side,
            labels,
            weights: vec![0.0; n * n],
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len() + 1
    }

    pub fn augmented(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: usize) -> Option<&[usize]> {
        self.labels.get(v).map(Vec::as_slice)
    }

    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.weights[from * self.num_vertices() + to]
    }

    pub fn set_weight(&mut self, from: usize, to: usize, w: f64) {
        let n = self.num_vertices();
        self.weights[from * n + to] = w;
    }

    /// Vertex carrying the original word `word`.
    pub fn vertex_of(&self, word: &[usize]) -> Option<usize> {
        self.labels.iter().position(|l| l == word)
    }

    /// Edges whose weight exceeds `1 + zero_abs`; squared amplitudes of a
    /// normalized rule never do.
    pub fn overweight_edges(&self, tol: &Tolerance) -> Vec<(usize, usize)> {
        let n = self.num_vertices();
        (0..n * n)
            .filter(|&k| self.weights[k] > 1.0 + tol.zero_abs)
            .map(|k| (k / n, k % n))
            .collect()
    }

    /// Same graph with vertices renumbered: old vertex `v` becomes
    /// `perm[v]`. Only meaningful for solver tests; the augmented vertex index
    /// loses its special position.
    pub fn permuted_weights(&self, perm: &[usize]) -> Vec<f64> {
        let n = self.num_vertices();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[perm[i] * n + perm[j]] = self.weights[i * n + j];
            }
        }
        out
    }
}

fn require_standard(a: &Automaton) -> Result<()> {
    if a.r() < 2 {
        return Err(LqcaError::NeighborhoodTooSmall(a.r()));
    }
    if !a.neighborhood().is_simple() {
        return Err(LqcaError::NotSimple(a.neighborhood().offsets().to_vec()));
    }
    Ok(())
}

/// Left border graph with the start vertex `s·q^{r−2}`.
pub fn build_left_border_graph(a: &Automaton) -> Result<BorderGraph> {
    require_standard(a)?;
    let (t, r) = (a.num_states(), a.r());
    let m = a.border_dim();
    let tail = m / t; // |Σ|^{r−2}
    let labels = (0..m).map(|w| word_digits(w, r - 1, t)).collect();
    let mut graph = BorderGraph::empty(Side::Left, labels);
    for w in 0..m {
        for y in 0..t {
            let next = (w % tail) * t + y;
            let weight = a.row(w * t + y)[QUIESCENT].norm_sqr();
            graph.set_weight(w, next, weight);
        }
    }
    let s = graph.augmented();
    for y in 1..t {
        // q^{r−1} → q^{r−2}y has word index y on both ends of the encoding.
        graph.set_weight(s, y, graph.weight(0, y));
    }
    Ok(graph)
}

/// Right border graph: the left construction on the reflected automaton,
/// relabeled with original words.
pub fn build_right_border_graph(a: &Automaton) -> Result<BorderGraph> {
    require_standard(a)?;
    let mirrored = a.reflected().normalize_neighborhood()?;
    let mut graph = build_left_border_graph(&mirrored)?;
    graph.side = Side::Right;
    for label in &mut graph.labels {
        label.reverse();
    }
    Ok(graph)
}

/// `W_k` over `ℝ≥0 ∪ {∞}` for a dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    stage: usize,
    entries: Vec<ExtNonnegReal>,
}

impl WeightMatrix {
    /// Stage 0 from row-major edge weights.
    pub fn from_weights(n: usize, weights: &[f64]) -> Self {
        assert_eq!(weights.len(), n * n);
        WeightMatrix {
            n,
            stage: 0,
            entries: weights.iter().map(|&w| ExtNonnegReal::new(w)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn get(&self, i: usize, j: usize) -> ExtNonnegReal {
        self.entries[i * self.n + j]
    }

    /// Advances from `W_{k−1}` to `W_k`, eliminating vertex `stage`.
    pub fn eliminate_next(&mut self, tol: &Tolerance, exec: Execution) {
        let n = self.n;
        let k = self.stage;
        let loop_star = self.get(k, k).ext_star(tol);
        let prev = &self.entries;
        let rows = exec.map_range(n, |i| {
            let into = prev[i * n + k].ext_mul(loop_star, tol);
            (0..n)
                .map(|j| prev[i * n + j] + into.ext_mul(prev[k * n + j], tol))
                .collect::<Vec<_>>()
        });
        self.entries = rows.concat();
        self.stage += 1;
    }

    /// Runs every remaining stage.
    pub fn close(mut self, tol: &Tolerance, exec: Execution) -> Self {
        while self.stage < self.n {
            self.eliminate_next(tol, exec);
        }
        self
    }
}

/// Total weight of all paths with at least one edge between every ordered
/// pair of vertices; `∞` where the series diverges.
pub fn kleene_all_pairs(g: &BorderGraph, tol: &Tolerance, exec: Execution) -> WeightMatrix {
    WeightMatrix::from_weights(g.num_vertices(), &g.weights).close(tol, exec)
}

/// The pair `(l, r)`, indexed by encoded words of `Σ^{r−1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BorderVectors {
    pub l: Vec<ExtNonnegReal>,
    pub r: Vec<ExtNonnegReal>,
    pub any_infinite: bool,
}

impl BorderVectors {
    pub fn dim(&self) -> usize {
        self.l.len()
    }

    /// Finite `(l, r)` as plain reals, or `None` if any component is `∞`.
    pub fn finite(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.any_infinite {
            return None;
        }
        let fin = |v: &[ExtNonnegReal]| v.iter().map(|x| x.to_f64()).collect();
        Some((fin(&self.l), fin(&self.r)))
    }

    /// Components equal to `∞`.
    pub fn infinite_components(&self) -> Vec<(Side, usize)> {
        let left = self.l.iter().enumerate().map(|(i, x)| (Side::Left, i, x));
        let right = self.r.iter().enumerate().map(|(i, x)| (Side::Right, i, x));
        left.chain(right)
            .filter(|(_, _, x)| x.is_infinite())
            .map(|(side, i, _)| (side, i))
            .collect()
    }

    /// `⟨l | r⟩` when finite.
    pub fn inner(&self) -> Option<f64> {
        self.finite()
            .map(|(l, r)| l.iter().zip(&r).map(|(a, b)| a * b).sum())
    }
}

/// Border vectors of a simple automaton with `r ≥ 2`; the neighborhood only
/// needs to be contiguous, the offset position is irrelevant.
pub fn border_vectors(a: &Automaton, tol: &Tolerance, exec: Execution) -> Result<BorderVectors> {
    let left = build_left_border_graph(a)?;
    let right = build_right_border_graph(a)?;
    let (t, r) = (a.num_states(), a.r());
    let m = a.border_dim();
    let read = |g: &BorderGraph| {
        let w = kleene_all_pairs(g, tol, exec);
        let s = g.augmented();
        (0..m)
            .map(|word| {
                let v = g
                    .vertex_of(&word_digits(word, r - 1, t))
                    .expect("every word has a vertex");
                let paths = w.get(s, v);
                if word == 0 {
                    paths + ExtNonnegReal::ONE
                } else {
                    paths
                }
            })
            .collect::<Vec<_>>()
    };
    let l = read(&left);
    let r = read(&right);
    let any_infinite = l.iter().chain(&r).any(|x| x.is_infinite());
    Ok(BorderVectors { l, r, any_infinite })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::fixtures::*;
    use crate::automaton::{Alphabet, Neighborhood};

    const INF: ExtNonnegReal = ExtNonnegReal::Infinite;

    fn close(x: ExtNonnegReal, y: f64) -> bool {
        matches!(x, ExtNonnegReal::Finite(v) if (v - y).abs() < 1e-9)
    }

    fn exec() -> Execution {
        Execution::default()
    }

    #[test]
    fn qflip_left_graph_weights() {
        let g = build_left_border_graph(&qflip()).unwrap();
        let (a, b, s) = (0, 1, g.augmented());
        assert_eq!(g.num_vertices(), 3);
        assert!((g.weight(a, a) - 1.0).abs() < 1e-12);
        assert!((g.weight(a, b) - 0.5).abs() < 1e-12);
        assert!((g.weight(b, b) - 0.5).abs() < 1e-12);
        assert_eq!(g.weight(b, a), 0.0);
        assert!((g.weight(s, b) - 0.5).abs() < 1e-12);
        assert_eq!(g.weight(s, a), 0.0);
    }

    #[test]
    fn xor_left_graph() {
        let g = build_left_border_graph(&xor()).unwrap();
        assert_eq!(g.weight(0, 0), 1.0);
        assert_eq!(g.weight(1, 1), 1.0);
        assert_eq!(g.weight(0, 1), 0.0);
        assert_eq!(g.weight(1, 0), 0.0);
        let s = g.augmented();
        assert!((0..3).all(|v| g.weight(s, v) == 0.0));
    }

    #[test]
    fn quiescent_self_loop_has_unit_weight() {
        for a in [qflip(), xor(), shift(), identity()] {
            let g = build_left_border_graph(&a).unwrap();
            assert!((g.weight(0, 0) - 1.0).abs() < 1e-12);
            assert!(g.overweight_edges(&Tolerance::default()).is_empty());
        }
    }

    #[test]
    fn kleene_small_cases() {
        let tol = Tolerance::default();
        let half = WeightMatrix::from_weights(1, &[0.5]).close(&tol, exec());
        assert!(close(half.get(0, 0), 1.0));
        let unit = WeightMatrix::from_weights(1, &[1.0]).close(&tol, exec());
        assert_eq!(unit.get(0, 0), INF);
        let g = build_left_border_graph(&qflip()).unwrap();
        let w = kleene_all_pairs(&g, &tol, exec());
        assert!(close(w.get(g.augmented(), 1), 1.0));
        assert_eq!(w.stage(), 3);
    }

    #[test]
    fn border_vector_examples() {
        let tol = Tolerance::default();
        let cases: [(Automaton, [f64; 2], [f64; 2]); 4] = [
            (qflip(), [1.0, 1.0], [1.0, 0.0]),
            (xor(), [1.0, 0.0], [1.0, 0.0]),
            (shift(), [1.0, 0.0], [1.0, 1.0]),
            (identity(), [1.0, 1.0], [1.0, 0.0]),
        ];
        for (a, l, r) in cases {
            let bv = border_vectors(&a, &tol, exec()).unwrap();
            assert!(!bv.any_infinite);
            for k in 0..2 {
                assert!(close(bv.l[k], l[k]), "{bv:?}");
                assert!(close(bv.r[k], r[k]), "{bv:?}");
            }
            assert!((bv.inner().unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn right_graph_is_reflected_left_graph() {
        let g = build_right_border_graph(&qflip()).unwrap();
        assert_eq!(g.side, Side::Right);
        // Only weight-0 edges reach the start vertex's targets on this side.
        let s = g.augmented();
        assert!((0..3).all(|v| g.weight(s, v) == 0.0));
        let bv = border_vectors(&qflip(), &Tolerance::default(), exec()).unwrap();
        assert_eq!(bv.infinite_components(), vec![]);
    }

    #[test]
    fn divergent_border_is_reported() {
        // δ(0y) puts weight on leaving and re-entering the quiescent word:
        // 0 → 1 → 0 with positive weight, then the unit self-loop at 0.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = Automaton::from_fn(binary(["0", "1"]), Neighborhood::standard(2), |w| match w {
            [0, 0] => vec![c(1.0), c(0.0)],
            _ => vec![c(h), c(h)],
        });
        let bv = border_vectors(&a, &Tolerance::default(), exec()).unwrap();
        assert!(bv.any_infinite);
        assert!(bv.finite().is_none());
        assert!(bv.infinite_components().contains(&(Side::Left, 0)));
    }

    #[test]
    fn needs_two_cell_neighborhood() {
        let a = Automaton::from_fn(binary(["0", "1"]), Neighborhood::standard(1), |w| {
            let mut row = vec![c(0.0); 2];
            row[w[0]] = c(1.0);
            row
        });
        assert!(matches!(
            border_vectors(&a, &Tolerance::default(), exec()),
            Err(LqcaError::NeighborhoodTooSmall(1))
        ));
        assert!(build_left_border_graph(&xor_with(vec![0, 2])).is_err());
    }

    #[test]
    fn three_letter_radius_three_labels() {
        let alphabet = Alphabet::new(["0", "1", "2"], "0").unwrap();
        let a = Automaton::from_fn(alphabet, Neighborhood::standard(3), |w| {
            let mut row = vec![c(0.0); 3];
            row[w[1]] = c(1.0);
            row
        });
        let g = build_right_border_graph(&a).unwrap();
        assert_eq!(g.num_vertices(), 10);
        for v in 0..9 {
            let mut reversed = word_digits(v, 2, 3);
            reversed.reverse();
            assert_eq!(g.label(v).unwrap(), reversed.as_slice());
        }
        let bv = border_vectors(&a, &Tolerance::default(), exec()).unwrap();
        assert!((bv.inner().unwrap() - 1.0).abs() < 1e-9);
    }
}
