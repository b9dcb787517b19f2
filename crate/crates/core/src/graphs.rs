//! Weighted undirected graphs: random generators and GSET-format I/O.
//!
//! Vertices are 0-based internally. The text format uses the 1-based GSET
//! convention: a header line `n m` followed by one `u v w` line per edge.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::util::fmt_num;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFamily {
    Er,
    Ba,
}

impl GraphFamily {
    pub fn parse(s: &str) -> Option<GraphFamily> {
        match s {
            "er" => Some(GraphFamily::Er),
            "ba" => Some(GraphFamily::Ba),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GraphFamily::Er => "er",
            GraphFamily::Ba => "ba",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    /// Every edge has weight +1.
    Unit,
    /// Each edge is +1 or -1 with equal probability.
    SignedUnit,
}

impl WeightScheme {
    pub fn parse(s: &str) -> Option<WeightScheme> {
        match s {
            "unit" => Some(WeightScheme::Unit),
            "signed_unit" => Some(WeightScheme::SignedUnit),
            _ => None,
        }
    }
}

/// Parameters for one random graph draw.
///
/// `param` is the ER edge probability p (0 < p <= 1) or the BA attachment
/// count m (integral, 1 <= m < n).
#[derive(Debug, Clone)]
pub struct GenSpec {
    pub family: GraphFamily,
    pub n: usize,
    pub param: f64,
    pub weights: WeightScheme,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GraphError> {
        match self.family {
            GraphFamily::Er => {
                if !self.param.is_finite() || self.param <= 0.0 || self.param > 1.0 {
                    return Err(GraphError::InvalidSpec(format!(
                        "ER edge probability must satisfy 0 < p <= 1, got {}",
                        self.param
                    )));
                }
            }
            GraphFamily::Ba => {
                let m = self.param;
                if !m.is_finite() || m.fract() != 0.0 || m < 1.0 || m as usize >= self.n {
                    return Err(GraphError::InvalidSpec(format!(
                        "BA attachment count must be an integer with 1 <= m < n, got m={} n={}",
                        self.param, self.n
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Immutable weighted undirected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32, f64)>,
    adj: Vec<Vec<(u32, f64)>>,
}

impl Graph {
    /// Builds a graph from an edge list. Endpoints are normalized to u < v.
    pub fn new(n: usize, edges: Vec<(u32, u32, f64)>) -> Result<Graph, GraphError> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b, w) in &edges {
            if a as usize >= n || b as usize >= n {
                return Err(GraphError::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for n={n}"
                )));
            }
            if a == b {
                return Err(GraphError::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            if !w.is_finite() {
                return Err(GraphError::InvalidGraph(format!(
                    "non-finite weight on edge ({a}, {b})"
                )));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((u, v)) {
                return Err(GraphError::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
            norm.push((u, v, w));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v, w) in &norm {
            adj[u as usize].push((v, w));
            adj[v as usize].push((u, w));
        }
        Ok(Graph { n, edges: norm, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(u32, f64)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn total_abs_weight(&self) -> f64 {
        self.edges.iter().map(|&(_, _, w)| w.abs()).sum()
    }

    /// Draws a graph from `spec`. Deterministic in `spec.seed`.
    pub fn generate(spec: &GenSpec) -> Result<Graph, GraphError> {
        spec.validate()?;
        let mut rng = crate::seeds::rng(spec.seed, "graph-gen", 0);
        let mut edges: Vec<(u32, u32, f64)> = Vec::new();
        let weight = |rng: &mut ChaCha8Rng| -> f64 {
            match spec.weights {
                WeightScheme::Unit => 1.0,
                WeightScheme::SignedUnit => {
                    if rng.random_bool(0.5) {
                        1.0
                    } else {
                        -1.0
                    }
                }
            }
        };
        match spec.family {
            GraphFamily::Er => {
                for i in 0..spec.n {
                    for j in (i + 1)..spec.n {
                        if rng.random::<f64>() < spec.param {
                            let w = weight(&mut rng);
                            edges.push((i as u32, j as u32, w));
                        }
                    }
                }
            }
            GraphFamily::Ba => {
                let m = spec.param as usize;
                let core = (m + 1).min(spec.n);
                // Seed core is complete, so m = n-1 yields the complete graph.
                for i in 0..core {
                    for j in (i + 1)..core {
                        let w = weight(&mut rng);
                        edges.push((i as u32, j as u32, w));
                    }
                }
                // One entry per edge endpoint: sampling an index uniformly is
                // preferential attachment by degree.
                let mut endpoints: Vec<u32> = Vec::new();
                for &(u, v, _) in &edges {
                    endpoints.push(u);
                    endpoints.push(v);
                }
                for v in core..spec.n {
                    let mut targets: Vec<u32> = Vec::with_capacity(m);
                    while targets.len() < m {
                        let t = endpoints[rng.random_range(0..endpoints.len())];
                        if !targets.contains(&t) {
                            targets.push(t);
                        }
                    }
                    for &t in &targets {
                        let w = weight(&mut rng);
                        edges.push((t, v as u32, w));
                        endpoints.push(t);
                        endpoints.push(v as u32);
                    }
                }
            }
        }
        Graph::new(spec.n, edges)
    }

    /// Parses the GSET text format.
    pub fn from_gset_str(text: &str) -> Result<Graph, GraphError> {
        let mut n = 0usize;
        let mut m = 0usize;
        let mut header_seen = false;
        let mut edges: Vec<(u32, u32, f64)> = Vec::new();
        let mut pairs: HashSet<(u32, u32)> = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let toks: Vec<&str> = raw.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            if !header_seen {
                if toks.len() != 2 {
                    return Err(GraphError::Parse {
                        line,
                        msg: format!("expected header `n m`, got {toks:?}"),
                    });
                }
                n = toks[0].parse().map_err(|_| GraphError::Parse {
                    line,
                    msg: format!("bad vertex count {:?}", toks[0]),
                })?;
                m = toks[1].parse().map_err(|_| GraphError::Parse {
                    line,
                    msg: format!("bad edge count {:?}", toks[1]),
                })?;
                header_seen = true;
                continue;
            }
            if toks.len() != 3 {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("expected `u v w`, got {toks:?}"),
                });
            }
            if edges.len() == m {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("more than the declared {m} edges"),
                });
            }
            let u: usize = toks[0].parse().map_err(|_| GraphError::Parse {
                line,
                msg: format!("bad vertex id {:?}", toks[0]),
            })?;
            let v: usize = toks[1].parse().map_err(|_| GraphError::Parse {
                line,
                msg: format!("bad vertex id {:?}", toks[1]),
            })?;
            let w: f64 = toks[2].parse().map_err(|_| GraphError::Parse {
                line,
                msg: format!("bad weight {:?}", toks[2]),
            })?;
            if u < 1 || u > n || v < 1 || v > n {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("vertex id out of range 1..={n}"),
                });
            }
            if u == v {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("self-loop at vertex {u}"),
                });
            }
            if !w.is_finite() {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("non-finite weight {w}"),
                });
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !pairs.insert((a as u32 - 1, b as u32 - 1)) {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("duplicate edge ({a}, {b})"),
                });
            }
            edges.push((a as u32 - 1, b as u32 - 1, w));
        }
        if !header_seen {
            return Err(GraphError::Parse {
                line: 1,
                msg: "missing header".into(),
            });
        }
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: text.lines().count(),
                msg: format!("declared {m} edges, found {}", edges.len()),
            });
        }
        Graph::new(n, edges)
    }

    pub fn load_gset(path: &Path) -> Result<Graph, GraphError> {
        let text = fs::read_to_string(path)?;
        Graph::from_gset_str(&text)
    }

    pub fn to_gset_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for &(u, v, w) in &self.edges {
            let _ = writeln!(out, "{} {} {}", u + 1, v + 1, fmt_num(w));
        }
        out
    }

    pub fn save_gset(&self, path: &Path) -> Result<(), GraphError> {
        fs::write(path, self.to_gset_string())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn er(n: usize, p: f64, weights: WeightScheme, seed: u64) -> Graph {
        Graph::generate(&GenSpec {
            family: GraphFamily::Er,
            n,
            param: p,
            weights,
            seed,
        })
        .unwrap()
    }

    fn ba(n: usize, m: f64, seed: u64) -> Graph {
        Graph::generate(&GenSpec {
            family: GraphFamily::Ba,
            n,
            param: m,
            weights: WeightScheme::Unit,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn er_p1_is_complete_triangle() {
        let g = er(3, 1.0, WeightScheme::Unit, 0);
        let mut pairs: Vec<(u32, u32)> = g.edges().iter().map(|&(u, v, _)| (u, v)).collect();
        pairs.sort_unstable();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2)]);
        assert!(g.edges().iter().all(|&(_, _, w)| w == 1.0));
    }

    #[test]
    fn ba_full_attachment_is_complete() {
        let g = ba(5, 4.0, 3);
        assert_eq!(g.n(), 5);
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn ba_added_vertices_start_with_m_edges() {
        let m = 3usize;
        let g = ba(40, m as f64, 11);
        for v in (m + 1)..40 {
            let back = g
                .edges()
                .iter()
                .filter(|&&(u, x, _)| x as usize == v && (u as usize) < v)
                .count();
            assert_eq!(back, m, "vertex {v}");
        }
    }

    #[test]
    fn generation_is_deterministic_in_seed() {
        let a = er(200, 0.15, WeightScheme::SignedUnit, 7);
        let b = er(200, 0.15, WeightScheme::SignedUnit, 7);
        assert_eq!(a.edges(), b.edges());
        let c = er(200, 0.15, WeightScheme::SignedUnit, 8);
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn er_rejects_bad_probability() {
        for p in [0.0, -0.5, 1.5, f64::NAN] {
            let r = Graph::generate(&GenSpec {
                family: GraphFamily::Er,
                n: 10,
                param: p,
                weights: WeightScheme::Unit,
                seed: 0,
            });
            assert!(matches!(r, Err(GraphError::InvalidSpec(_))), "p={p}");
        }
    }

    #[test]
    fn ba_rejects_bad_attachment() {
        for (n, m) in [(5, 5.0), (5, 0.0), (5, 2.5)] {
            let r = Graph::generate(&GenSpec {
                family: GraphFamily::Ba,
                n,
                param: m,
                weights: WeightScheme::Unit,
                seed: 0,
            });
            assert!(matches!(r, Err(GraphError::InvalidSpec(_))), "m={m}");
        }
    }

    #[test]
    fn parses_triangle() {
        let g = Graph::from_gset_str("3 3\n1 2 1\n1 3 1\n2 3 1\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.edges()[0], (0, 1, 1.0));
    }

    #[test]
    fn parse_rejects_out_of_range_id() {
        let err = Graph::from_gset_str("2 1\n1 3 1\n").unwrap_err();
        match err {
            GraphError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_duplicate_and_self_loop() {
        assert!(Graph::from_gset_str("3 2\n1 2 1\n2 1 5\n").is_err());
        assert!(Graph::from_gset_str("3 1\n2 2 1\n").is_err());
    }

    #[test]
    fn parse_rejects_count_mismatch() {
        assert!(Graph::from_gset_str("3 2\n1 2 1\n").is_err());
        assert!(Graph::from_gset_str("3 1\n1 2 1\n2 3 1\n").is_err());
    }

    #[test]
    fn parse_rejects_bad_header() {
        assert!(Graph::from_gset_str("").is_err());
        assert!(Graph::from_gset_str("3\n").is_err());
        assert!(Graph::from_gset_str("x y\n").is_err());
    }

    #[test]
    fn saves_empty_graph_as_header_only() {
        let g = Graph::new(0, Vec::new()).unwrap();
        assert_eq!(g.to_gset_string(), "0 0\n");
    }

    #[test]
    fn saves_triangle_as_four_lines() {
        let g = Graph::from_gset_str("3 3\n1 2 1\n1 3 1\n2 3 1\n").unwrap();
        assert_eq!(g.to_gset_string(), "3 3\n1 2 1\n1 3 1\n2 3 1\n");
    }

    #[test]
    fn generated_graph_round_trips() {
        let g = er(50, 0.15, WeightScheme::SignedUnit, 99);
        let back = Graph::from_gset_str(&g.to_gset_string()).unwrap();
        assert_eq!(g.n(), back.n());
        assert_eq!(g.edges(), back.edges());
    }

    prop_compose! {
        fn arb_graph()(n in 1usize..12)(
            n in Just(n),
            flags in proptest::collection::vec(any::<bool>(), (n * n.saturating_sub(1)) / 2),
            weights in proptest::collection::vec(
                prop_oneof![Just(-3.0), Just(-1.0), Just(0.5), Just(1.0), Just(2.0), Just(7.25)],
                (n * n.saturating_sub(1)) / 2,
            ),
        ) -> Graph {
            let mut edges = Vec::new();
            let mut k = 0usize;
            for i in 0..n {
                for j in (i + 1)..n {
                    if flags[k] {
                        edges.push((i as u32, j as u32, weights[k]));
                    }
                    k += 1;
                }
            }
            Graph::new(n, edges).unwrap()
        }
    }

    proptest! {
        #[test]
        fn gset_round_trip_is_identity(g in arb_graph()) {
            let back = Graph::from_gset_str(&g.to_gset_string()).unwrap();
            prop_assert_eq!(g.n(), back.n());
            prop_assert_eq!(g.edges(), back.edges());
        }

        #[test]
        fn er_seed_determinism(seed in any::<u64>()) {
            let a = er(20, 0.3, WeightScheme::SignedUnit, seed);
            let b = er(20, 0.3, WeightScheme::SignedUnit, seed);
            prop_assert_eq!(a.edges(), b.edges());
        }

        #[test]
        fn ba_initial_degree_property(n in 6usize..30, m in 1usize..5) {
            prop_assume!(m < n);
            let g = ba(n, m as f64, 5);
            for v in (m + 1)..n {
                let back = g.edges().iter()
                    .filter(|&&(u, x, _)| x as usize == v && (u as usize) < v)
                    .count();
                prop_assert_eq!(back, m);
            }
        }
    }
}
