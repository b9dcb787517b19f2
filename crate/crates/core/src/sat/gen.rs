//! Instance generators: random 3-SAT plus clique, coloring and dominating
//! set encodings over sampled random graphs.

use rand::Rng;

use super::cnf::CnfFormula;
use super::dpll::dpll_sat;
use super::CnfError;
use crate::graphs::{GenSpec, Graph, GraphFamily, WeightScheme};
use crate::seeds;
use crate::util::fmt_num;

/// A family of CNF instances, parsed from and printed as a compact spec
/// string: `rand3:<vars>:<clauses>`, `clique<k>:<n>:<p>`, `color<k>:<n>:<p>`
/// or `domset<k>:<n>:<p>`. The graph families encode the named decision
/// problem over an Erdos-Renyi graph G(n, p).
#[derive(Debug, Clone, PartialEq)]
pub enum CnfDist {
    Rand3 { n_vars: usize, n_clauses: usize },
    Clique { k: usize, n: usize, p: f64 },
    Color { k: usize, n: usize, p: f64 },
    Domset { k: usize, n: usize, p: f64 },
}

impl CnfDist {
    pub fn parse(s: &str) -> Result<CnfDist, CnfError> {
        let bad = || CnfError::InvalidSpec(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let dist = if parts[0] == "rand3" {
            CnfDist::Rand3 {
                n_vars: parts[1].parse().map_err(|_| bad())?,
                n_clauses: parts[2].parse().map_err(|_| bad())?,
            }
        } else {
            let digits = parts[0]
                .find(|c: char| c.is_ascii_digit())
                .ok_or_else(bad)?;
            let (family, k_str) = parts[0].split_at(digits);
            let k: usize = k_str.parse().map_err(|_| bad())?;
            let n: usize = parts[1].parse().map_err(|_| bad())?;
            let p: f64 = parts[2].parse().map_err(|_| bad())?;
            match family {
                "clique" => CnfDist::Clique { k, n, p },
                "color" => CnfDist::Color { k, n, p },
                "domset" => CnfDist::Domset { k, n, p },
                _ => return Err(bad()),
            }
        };
        dist.validate()?;
        Ok(dist)
    }

    pub fn label(&self) -> String {
        match self {
            CnfDist::Rand3 { n_vars, n_clauses } => format!("rand3:{n_vars}:{n_clauses}"),
            CnfDist::Clique { k, n, p } => format!("clique{k}:{n}:{}", fmt_num(*p)),
            CnfDist::Color { k, n, p } => format!("color{k}:{n}:{}", fmt_num(*p)),
            CnfDist::Domset { k, n, p } => format!("domset{k}:{n}:{}", fmt_num(*p)),
        }
    }

    pub fn validate(&self) -> Result<(), CnfError> {
        let bad = |msg: String| Err(CnfError::InvalidSpec(msg));
        match *self {
            CnfDist::Rand3 { n_vars, n_clauses } => {
                if n_vars < 3 {
                    return bad(format!("rand3 needs at least 3 variables, got {n_vars}"));
                }
                if n_clauses == 0 {
                    return bad("rand3 needs at least 1 clause".into());
                }
            }
            CnfDist::Clique { k, n, p }
            | CnfDist::Color { k, n, p }
            | CnfDist::Domset { k, n, p } => {
                if k == 0 {
                    return bad("k must be positive".into());
                }
                if n == 0 {
                    return bad("graph size must be positive".into());
                }
                if !(p > 0.0 && p <= 1.0) {
                    return bad(format!("edge probability {p} outside (0, 1]"));
                }
            }
        }
        Ok(())
    }

    pub fn generate(&self, seed: u64) -> Result<CnfFormula, CnfError> {
        self.validate()?;
        let er = |n: usize, p: f64| {
            Graph::generate(&GenSpec {
                family: GraphFamily::Er,
                n,
                param: p,
                weights: WeightScheme::Unit,
                seed,
            })
            .expect("validated spec")
        };
        Ok(match *self {
            CnfDist::Rand3 { n_vars, n_clauses } => {
                gen_rand3(n_vars, n_clauses, &mut seeds::rng(seed, "rand3", 0))
            }
            CnfDist::Clique { k, n, p } => encode_clique(&er(n, p), k),
            CnfDist::Color { k, n, p } => encode_color(&er(n, p), k),
            CnfDist::Domset { k, n, p } => encode_domset(&er(n, p), k),
        })
    }
}

/// Uniform 3-SAT: each clause picks 3 distinct variables and negates each
/// with probability 1/2. Clauses may repeat.
pub fn gen_rand3<R: Rng + ?Sized>(n_vars: usize, n_clauses: usize, rng: &mut R) -> CnfFormula {
    assert!(n_vars >= 3, "rand3 needs at least 3 variables");
    let mut clauses = Vec::with_capacity(n_clauses);
    for _ in 0..n_clauses {
        let (a, b, c) = loop {
            let a = rng.random_range(0..n_vars);
            let b = rng.random_range(0..n_vars);
            let c = rng.random_range(0..n_vars);
            if a != b && a != c && b != c {
                break (a, b, c);
            }
        };
        let clause = [a, b, c]
            .iter()
            .map(|&v| {
                let sign = if rng.random_bool(0.5) { 1 } else { -1 };
                sign * (v as i32 + 1)
            })
            .collect();
        clauses.push(clause);
    }
    CnfFormula::new(n_vars, clauses).expect("generated clauses are well formed")
}

/// Satisfiable iff the graph has a k-clique. Variable `slot*n + v + 1` puts
/// vertex v in slot i; slots each hold a vertex, no vertex fills two slots,
/// and vertices in distinct slots must be adjacent.
pub fn encode_clique(g: &Graph, k: usize) -> CnfFormula {
    assert!(k >= 1);
    let n = g.n();
    let var = |slot: usize, v: usize| (slot * n + v + 1) as i32;
    let mut adj = vec![vec![false; n]; n];
    for &(u, v, _) in g.edges() {
        adj[u as usize][v as usize] = true;
        adj[v as usize][u as usize] = true;
    }
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    for i in 0..k {
        clauses.push((0..n).map(|v| var(i, v)).collect());
    }
    for v in 0..n {
        for i in 0..k {
            for j in i + 1..k {
                clauses.push(vec![-var(i, v), -var(j, v)]);
            }
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            for (u, row) in adj.iter().enumerate() {
                for (w, &connected) in row.iter().enumerate() {
                    if u != w && !connected {
                        clauses.push(vec![-var(i, u), -var(j, w)]);
                    }
                }
            }
        }
    }
    CnfFormula::new(k * n, clauses).expect("valid encoding")
}

/// Satisfiable iff the graph is k-colorable. Variable `v*k + c + 1` colors
/// vertex v with color c.
pub fn encode_color(g: &Graph, k: usize) -> CnfFormula {
    assert!(k >= 1);
    let n = g.n();
    let var = |v: usize, c: usize| (v * k + c + 1) as i32;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    for v in 0..n {
        clauses.push((0..k).map(|c| var(v, c)).collect());
    }
    for v in 0..n {
        for a in 0..k {
            for b in a + 1..k {
                clauses.push(vec![-var(v, a), -var(v, b)]);
            }
        }
    }
    for &(u, w, _) in g.edges() {
        for c in 0..k {
            clauses.push(vec![-var(u as usize, c), -var(w as usize, c)]);
        }
    }
    CnfFormula::new(n * k, clauses).expect("valid encoding")
}

/// Satisfiable iff the graph has a dominating set of size at most k.
/// Variable `slot*n + v + 1` puts vertex v in slot i; each slot names
/// exactly one vertex and every vertex must see a named one in its closed
/// neighborhood.
pub fn encode_domset(g: &Graph, k: usize) -> CnfFormula {
    assert!(k >= 1);
    let n = g.n();
    let var = |slot: usize, v: usize| (slot * n + v + 1) as i32;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    for i in 0..k {
        clauses.push((0..n).map(|v| var(i, v)).collect());
    }
    for i in 0..k {
        for u in 0..n {
            for v in u + 1..n {
                clauses.push(vec![-var(i, u), -var(i, v)]);
            }
        }
    }
    for w in 0..n {
        let mut closed: Vec<usize> = vec![w];
        closed.extend(g.neighbors(w).iter().map(|&(u, _)| u as usize));
        let clause = (0..k)
            .flat_map(|i| closed.iter().map(move |&v| var(i, v)))
            .collect();
        clauses.push(clause);
    }
    CnfFormula::new(k * n, clauses).expect("valid encoding")
}

/// Draws instances from `dist` and keeps the satisfiable ones, up to a
/// default attempt budget.
pub fn gen_filtered(dist: &CnfDist, count: usize, seed: u64) -> Result<Vec<CnfFormula>, CnfError> {
    gen_filtered_budget(dist, count, seed, (500 * count as u64).max(1000))
}

pub fn gen_filtered_budget(
    dist: &CnfDist,
    count: usize,
    seed: u64,
    budget: u64,
) -> Result<Vec<CnfFormula>, CnfError> {
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0u64;
    while out.len() < count {
        if attempts >= budget {
            return Err(CnfError::RejectionBudget {
                accepted: out.len(),
                wanted: count,
                attempts,
            });
        }
        let f = dist.generate(seeds::derive(seed, "gen-filtered", attempts))?;
        attempts += 1;
        if dpll_sat(&f)?.is_some() {
            out.push(f);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[(u32, u32)]) -> Graph {
        Graph::new(n, edges.iter().map(|&(u, v)| (u, v, 1.0)).collect()).unwrap()
    }

    fn sat(f: &CnfFormula) -> bool {
        dpll_sat(f).unwrap().is_some()
    }

    #[test]
    fn parse_and_label_round_trip() {
        for s in ["rand3:50:213", "clique3:20:0.05", "color5:20:0.5", "domset4:12:0.2"] {
            assert_eq!(CnfDist::parse(s).unwrap().label(), s);
        }
        assert_eq!(
            CnfDist::parse("clique3:20:0.05").unwrap(),
            CnfDist::Clique { k: 3, n: 20, p: 0.05 }
        );
    }

    #[test]
    fn parse_rejects_malformed_specs() {
        for s in [
            "rand3:50",
            "rand3:50:213:9",
            "rand2:5:10",
            "rand3:2:10",
            "rand3:50:0",
            "foo3:1:0.5",
            "clique:10:0.5",
            "clique0:10:0.5",
            "clique3:0:0.5",
            "color3:10:1.5",
            "color3:10:0",
            "color3:10:-0.2",
            "domset4:x:0.2",
            "",
        ] {
            assert!(CnfDist::parse(s).is_err(), "{s} should not parse");
        }
    }

    #[test]
    fn rand3_has_three_distinct_vars_per_clause() {
        let f = gen_rand3(10, 25, &mut crate::seeds::rng(3, "t", 0));
        assert_eq!(f.n_vars(), 10);
        assert_eq!(f.n_clauses(), 25);
        for clause in f.clauses() {
            assert_eq!(clause.len(), 3);
            let mut vars: Vec<u32> = clause.iter().map(|l| l.unsigned_abs()).collect();
            vars.sort_unstable();
            vars.dedup();
            assert_eq!(vars.len(), 3);
            assert!(vars.iter().all(|&v| (1..=10).contains(&v)));
        }
    }

    #[test]
    fn generation_is_deterministic_in_seed() {
        for spec in ["rand3:12:40", "clique3:8:0.4", "color3:8:0.4", "domset2:8:0.4"] {
            let d = CnfDist::parse(spec).unwrap();
            let a = d.generate(9).unwrap();
            let b = d.generate(9).unwrap();
            assert_eq!(a, b, "{spec}");
            let c = d.generate(10).unwrap();
            assert_ne!(a, c, "{spec} should vary with the seed");
        }
    }

    #[test]
    fn clique_encoding_shape() {
        let k3 = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        let f = encode_clique(&k3, 2);
        assert_eq!(f.n_vars(), 6);
        // 2 slot clauses + 3 one-slot-per-vertex pairs, no non-adjacent pairs.
        assert_eq!(f.n_clauses(), 5);

        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let f = encode_clique(&p3, 2);
        // Non-adjacent ordered pairs (0,2) and (2,0) add two clauses.
        assert_eq!(f.n_clauses(), 7);
    }

    #[test]
    fn clique_encoding_semantics() {
        let k3 = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        let k4 = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let k4_minus = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        assert!(sat(&encode_clique(&k3, 3)));
        assert!(!sat(&encode_clique(&p3, 3)));
        assert!(!sat(&encode_clique(&c4, 3)));
        assert!(sat(&encode_clique(&k4, 4)));
        assert!(!sat(&encode_clique(&k4_minus, 4)));
        assert!(sat(&encode_clique(&k4_minus, 3)));
    }

    #[test]
    fn color_encoding_layout() {
        let single = graph(1, &[]);
        let f = encode_color(&single, 2);
        assert_eq!(f.n_vars(), 2);
        assert_eq!(f.clauses(), &[vec![1, 2], vec![-1, -2]]);
    }

    #[test]
    fn color_encoding_semantics() {
        let k3 = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        let p4 = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let k4 = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        assert!(!sat(&encode_color(&k3, 2)));
        assert!(sat(&encode_color(&k3, 3)));
        assert!(sat(&encode_color(&p4, 2)));
        assert!(!sat(&encode_color(&k4, 3)));
        assert!(sat(&encode_color(&k4, 4)));
        assert!(!sat(&encode_color(&c5, 2)));
        assert!(sat(&encode_color(&c5, 3)));
    }

    #[test]
    fn domset_encoding_semantics() {
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let two_k2 = graph(4, &[(0, 1), (2, 3)]);
        let star = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert!(sat(&encode_domset(&p3, 1)));
        assert!(!sat(&encode_domset(&two_k2, 1)));
        assert!(sat(&encode_domset(&two_k2, 2)));
        assert!(sat(&encode_domset(&star, 1)));
    }

    #[test]
    fn domset_slots_hold_exactly_one_vertex() {
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let f = encode_domset(&p3, 2);
        // 2 slot clauses + 2 * C(3,2) at-most-one pairs + 3 domination.
        assert_eq!(f.n_clauses(), 11);
        assert_eq!(f.n_vars(), 6);
    }

    #[test]
    fn filtered_instances_are_satisfiable_and_deterministic() {
        let d = CnfDist::parse("rand3:10:30").unwrap();
        let a = gen_filtered(&d, 5, 17).unwrap();
        assert_eq!(a.len(), 5);
        for f in &a {
            assert!(sat(f));
        }
        let b = gen_filtered(&d, 5, 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn filtered_budget_exhaustion_is_reported() {
        // A 3-clique on 3 vertices at p = 0.01 almost never exists, so the
        // tiny budget runs out.
        let d = CnfDist::Clique { k: 3, n: 3, p: 0.01 };
        match gen_filtered_budget(&d, 1, 5, 5) {
            Err(CnfError::RejectionBudget { accepted, wanted, attempts }) => {
                assert_eq!((accepted, wanted, attempts), (0, 1, 5));
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    fn has_clique(g: &Graph, k: usize) -> bool {
        let n = g.n();
        let mut adj = vec![vec![false; n]; n];
        for &(u, v, _) in g.edges() {
            adj[u as usize][v as usize] = true;
            adj[v as usize][u as usize] = true;
        }
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .any(|m| {
                let vs: Vec<usize> = (0..n).filter(|&v| m >> v & 1 == 1).collect();
                vs.iter()
                    .enumerate()
                    .all(|(i, &u)| vs[i + 1..].iter().all(|&w| adj[u][w]))
            })
    }

    fn is_colorable(g: &Graph, k: usize) -> bool {
        let n = g.n();
        let total = (k as u64).pow(n as u32);
        (0..total).any(|mut code| {
            let mut color = vec![0usize; n];
            for c in color.iter_mut() {
                *c = (code % k as u64) as usize;
                code /= k as u64;
            }
            g.edges()
                .iter()
                .all(|&(u, v, _)| color[u as usize] != color[v as usize])
        })
    }

    fn has_domset(g: &Graph, k: usize) -> bool {
        let n = g.n();
        (0u32..1 << n)
            .filter(|m| (m.count_ones() as usize) <= k)
            .any(|m| {
                (0..n).all(|w| {
                    m >> w & 1 == 1
                        || g.neighbors(w).iter().any(|&(u, _)| m >> u & 1 == 1)
                })
            })
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1..=6usize).prop_flat_map(|n| {
            proptest::collection::vec(proptest::bool::ANY, n * (n - 1) / 2).prop_map(
                move |mask| {
                    let mut edges = Vec::new();
                    let mut idx = 0;
                    for u in 0..n as u32 {
                        for v in u + 1..n as u32 {
                            if mask[idx] {
                                edges.push((u, v, 1.0));
                            }
                            idx += 1;
                        }
                    }
                    Graph::new(n, edges).unwrap()
                },
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]
        #[test]
        fn clique_encoding_is_sound(g in arb_graph(), k in 1..=3usize) {
            prop_assert_eq!(sat(&encode_clique(&g, k)), has_clique(&g, k));
        }

        #[test]
        fn color_encoding_is_sound(g in arb_graph(), k in 1..=3usize) {
            prop_assert_eq!(sat(&encode_color(&g, k)), is_colorable(&g, k));
        }

        #[test]
        fn domset_encoding_is_sound(g in arb_graph(), k in 1..=3usize) {
            prop_assert_eq!(sat(&encode_domset(&g, k)), has_domset(&g, k));
        }
    }
}
