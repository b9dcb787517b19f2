//! Max-Cut state with O(degree) incremental gain updates, plus an exact
//! enumeration solver for small instances.
//!
//! The cut value of a side assignment is the total weight of edges crossing
//! the partition. `gain[v]` is the change in cut value if `v` flips sides.
//! All synthetic and GSET weights are integers, so f64 arithmetic on them is
//! exact and incremental state can be compared to scratch recomputation with
//! `==`.

use rand::Rng;

use crate::graphs::Graph;
use crate::util::fingerprint_bits;

/// Cut value computed directly from the edge list.
pub fn cut_value_of(g: &Graph, side: &[bool]) -> f64 {
    assert_eq!(side.len(), g.n(), "side length must match vertex count");
    g.edges()
        .iter()
        .map(|&(u, v, w)| {
            if side[u as usize] != side[v as usize] {
                w
            } else {
                0.0
            }
        })
        .sum()
}

/// Per-vertex flip gains computed directly from the adjacency lists.
pub fn gains_of(g: &Graph, side: &[bool]) -> Vec<f64> {
    assert_eq!(side.len(), g.n(), "side length must match vertex count");
    (0..g.n())
        .map(|v| {
            g.neighbors(v)
                .iter()
                .map(|&(u, w)| if side[u as usize] == side[v] { w } else { -w })
                .sum()
        })
        .collect()
}

/// Mutable cut search state.
#[derive(Debug, Clone)]
pub struct CutState<'g> {
    graph: &'g Graph,
    side: Vec<bool>,
    gain: Vec<f64>,
    last_flip: Vec<Option<u64>>,
    step: u64,
    cut_value: f64,
    best_value: f64,
    best_side: Vec<bool>,
}

impl<'g> CutState<'g> {
    /// Starts from the given side assignment; best-so-far starts at the
    /// current value.
    ///
    /// # Panics
    /// If `side.len() != graph.n()`.
    pub fn new(graph: &'g Graph, side: Vec<bool>) -> CutState<'g> {
        assert_eq!(side.len(), graph.n(), "side length must match vertex count");
        let cut_value = cut_value_of(graph, &side);
        let gain = gains_of(graph, &side);
        CutState {
            graph,
            best_value: cut_value,
            best_side: side.clone(),
            side,
            gain,
            last_flip: vec![None; graph.n()],
            step: 0,
            cut_value,
        }
    }

    pub fn random_start<R: Rng + ?Sized>(graph: &'g Graph, rng: &mut R) -> CutState<'g> {
        let side = (0..graph.n()).map(|_| rng.random_bool(0.5)).collect();
        CutState::new(graph, side)
    }

    /// Flips `v`, updating the cut value, all affected gains, the flip clock
    /// and the best-so-far. Returns the applied delta.
    ///
    /// # Panics
    /// If `v` is out of range.
    pub fn flip(&mut self, v: usize) -> f64 {
        let delta = self.gain[v];
        self.cut_value += delta;
        // Neighbors on the same side as v (pre-flip) lose the shared edge
        // from their gain; neighbors across gain it.
        for &(u, w) in self.graph.neighbors(v) {
            let u = u as usize;
            if self.side[u] == self.side[v] {
                self.gain[u] -= 2.0 * w;
            } else {
                self.gain[u] += 2.0 * w;
            }
        }
        self.gain[v] = -delta;
        self.side[v] = !self.side[v];
        self.last_flip[v] = Some(self.step);
        self.step += 1;
        if self.cut_value > self.best_value {
            self.best_value = self.cut_value;
            self.best_side.copy_from_slice(&self.side);
        }
        delta
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn n(&self) -> usize {
        self.side.len()
    }

    pub fn side(&self) -> &[bool] {
        &self.side
    }

    pub fn gains(&self) -> &[f64] {
        &self.gain
    }

    pub fn gain(&self, v: usize) -> f64 {
        self.gain[v]
    }

    pub fn cut_value(&self) -> f64 {
        self.cut_value
    }

    pub fn best_value(&self) -> f64 {
        self.best_value
    }

    pub fn best_side(&self) -> &[bool] {
        &self.best_side
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn last_flip(&self, v: usize) -> Option<u64> {
        self.last_flip[v]
    }

    /// Steps elapsed since `v` last flipped; `None` if it never has.
    pub fn steps_since_flip(&self, v: usize) -> Option<u64> {
        self.last_flip[v].map(|s| self.step - s)
    }

    pub fn max_gain(&self) -> f64 {
        self.gain.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when no flip increases the cut value.
    pub fn is_local_opt(&self) -> bool {
        self.gain.iter().all(|&g| g <= 0.0)
    }

    /// 64-bit hash of the side bit string.
    pub fn fingerprint(&self) -> u64 {
        fingerprint_bits(self.side.iter().copied())
    }
}

/// Largest vertex count `brute_force_optimum` accepts.
pub const BRUTE_FORCE_CAP: usize = 24;

/// Exact maximum cut by Gray-code enumeration of all partitions with vertex 0
/// pinned. Returns the optimal value and one optimal side assignment.
///
/// # Panics
/// If `g.n() > BRUTE_FORCE_CAP`.
pub fn brute_force_optimum(g: &Graph) -> (f64, Vec<bool>) {
    let n = g.n();
    assert!(
        n <= BRUTE_FORCE_CAP,
        "brute force limited to n <= {BRUTE_FORCE_CAP}, got {n}"
    );
    if n <= 1 {
        return (0.0, vec![false; n]);
    }
    let mut side = vec![false; n];
    let mut value = 0.0f64;
    let mut best = value;
    let mut best_side = side.clone();
    // Gray code over vertices 1..n; vertex 0 stays on side false.
    let states = 1u64 << (n - 1);
    for i in 1..states {
        let v = i.trailing_zeros() as usize + 1;
        let delta: f64 = g
            .neighbors(v)
            .iter()
            .map(|&(u, w)| if side[u as usize] == side[v] { w } else { -w })
            .sum();
        side[v] = !side[v];
        value += delta;
        if value > best {
            best = value;
            best_side.copy_from_slice(&side);
        }
    }
    (best, best_side)
}
