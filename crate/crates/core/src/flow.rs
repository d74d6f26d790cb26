//! Directed s-t flow gadget for density feasibility tests, and an exact
//! maximum-flow / minimum-cut solver over arbitrary-precision integer
//! capacities.
//!
//! For a parameter `lambda`, the network encodes
//! `min over S of (psi + lambda |S| - F(S))` as its minimum cut: each
//! vertex gets an arc to the sink of capacity `lambda`; each edge `e`
//! contributes gadget nodes `u_0..u_{|e|-1}` where `u_i` receives
//! `(|e| - i) * alpha_i` from the source and fans `alpha_i` out to every
//! vertex of `e`, with `alpha` the second differences of the weight table.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::{WeightFn, WeightedHypergraph};
use crate::rational::Rational;

/// Gadget capacities for one edge: `alpha_0 = f(1) - f(0)` and
/// `alpha_i = f(i+1) + f(i-1) - 2 f(i)` for `0 < i < |e|`. Non-negative
/// exactly when the table is convex, and telescoping to
/// `sum_{i<=j} alpha_i = f(j+1) - f(j)`.
pub fn alpha_coefficients(f: &WeightFn) -> Result<Vec<Rational>> {
    let k = f.size();
    let mut alphas = Vec::with_capacity(k);
    for i in 0..k {
        let a = if i == 0 {
            f.value(1) - f.value(0)
        } else {
            f.value(i + 1) + f.value(i - 1) - f.value(i) - f.value(i)
        };
        if a.is_negative() {
            return Err(Error::NotConvex { edge: usize::MAX });
        }
        alphas.push(a);
    }
    Ok(alphas)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub from: u32,
    pub to: u32,
    pub capacity: BigInt,
}

/// The flow network for one `(instance, lambda)` pair. Node ids: `0` is
/// the source, `1` the sink, `2..2+n` the vertex copies, and the edge
/// gadget nodes follow in edge order. All capacities have been multiplied
/// by `scale` (the lcm of the denominators of `lambda` and every table
/// value) so they are integers; zero-capacity arcs are omitted.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    pub node_count: usize,
    pub arcs: Vec<Arc>,
    pub source: u32,
    pub sink: u32,
    pub scale: BigInt,
    vertex_count: usize,
}

pub const SOURCE: u32 = 0;
pub const SINK: u32 = 1;

impl FlowNetwork {
    pub fn vertex_node(&self, v: u32) -> u32 {
        2 + v
    }

    pub fn vertex_of_node(&self, node: u32) -> Option<u32> {
        let idx = node.checked_sub(2)?;
        ((idx as usize) < self.vertex_count).then_some(idx)
    }

    /// `psi * scale`: the cut value of the empty-set cut, and the
    /// feasibility threshold of the search algorithms.
    pub fn scaled_psi(&self, h: &WeightedHypergraph) -> BigInt {
        let scaled = h.psi() * Rational::from_integer(self.scale.clone());
        debug_assert!(scaled.is_integer());
        scaled.to_integer()
    }

    /// DIMACS max-flow rendering (1-based node ids) for cross-checking
    /// with external solvers.
    pub fn to_dimacs(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "p max {} {}", self.node_count, self.arcs.len());
        let _ = writeln!(out, "n {} s", self.source + 1);
        let _ = writeln!(out, "n {} t", self.sink + 1);
        for a in &self.arcs {
            let _ = writeln!(out, "a {} {} {}", a.from + 1, a.to + 1, a.capacity);
        }
        out
    }
}

/// Build the gadget network for `lambda >= 0`. Requires every table to be
/// convex.
pub fn build_network(h: &WeightedHypergraph, lambda: &Rational) -> Result<FlowNetwork> {
    if lambda.is_negative() {
        return Err(Error::InvalidParameter(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    let n = h.vertex_count();
    let mut scale: BigInt = lambda.denom().clone();
    for w in h.weights() {
        for v in w.values() {
            scale = scale.lcm(v.denom());
        }
    }
    let to_scaled = |r: &Rational| -> BigInt {
        let s = r * Rational::from_integer(scale.clone());
        debug_assert!(s.is_integer());
        s.to_integer()
    };

    let mut arcs = Vec::new();
    let lambda_scaled = to_scaled(lambda);
    for v in 0..n as u32 {
        if !lambda_scaled.is_zero() {
            arcs.push(Arc {
                from: 2 + v,
                to: SINK,
                capacity: lambda_scaled.clone(),
            });
        }
    }
    let mut next_node = 2 + n as u32;
    for (idx, (edge, w)) in h.graph().edges().iter().zip(h.weights()).enumerate() {
        let alphas = alpha_coefficients(w).map_err(|e| match e {
            Error::NotConvex { .. } => Error::NotConvex { edge: idx },
            other => other,
        })?;
        let k = edge.len();
        for (i, alpha) in alphas.iter().enumerate() {
            let gadget = next_node;
            next_node += 1;
            let alpha_scaled = to_scaled(alpha);
            if alpha_scaled.is_zero() {
                continue;
            }
            arcs.push(Arc {
                from: SOURCE,
                to: gadget,
                capacity: &alpha_scaled * BigInt::from(k - i),
            });
            for &v in edge {
                arcs.push(Arc {
                    from: gadget,
                    to: 2 + v,
                    capacity: alpha_scaled.clone(),
                });
            }
        }
    }
    Ok(FlowNetwork {
        node_count: next_node as usize,
        arcs,
        source: SOURCE,
        sink: SINK,
        scale,
        vertex_count: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutVariant {
    /// `X = {s} ∪ (nodes reachable from s in the residual graph)`: the
    /// smallest minimum-cut source side.
    MinimalSource,
    /// `X = all nodes − (nodes that reach t in the residual graph)`: the
    /// largest minimum-cut source side, guaranteeing a nonempty vertex
    /// set whenever one attains the optimum.
    MaximalSource,
}

#[derive(Debug, Clone)]
pub struct CutResult {
    /// Exact min-cut value in scaled units.
    pub cut_value: BigInt,
    /// `X ∩ V`, mapped back to vertex ids, sorted.
    pub source_side_vertices: Vec<u32>,
    pub variant: CutVariant,
}

/// Exact minimum s-t cut via Dinic's algorithm on big-integer residual
/// capacities. The gadget networks are three layers deep, so the number
/// of phases stays tiny regardless of size.
pub fn min_cut(net: &FlowNetwork, variant: CutVariant) -> CutResult {
    let mut solver = MaxFlow::new(net.node_count);
    for a in &net.arcs {
        solver.add_arc(a.from as usize, a.to as usize, a.capacity.clone());
    }
    let cut_value = solver.run(net.source as usize, net.sink as usize);
    let source_side = match variant {
        CutVariant::MinimalSource => solver.reachable_from(net.source as usize),
        CutVariant::MaximalSource => {
            let mut side = solver.reaching(net.sink as usize);
            for b in side.iter_mut() {
                *b = !*b;
            }
            side
        }
    };
    debug_assert!(source_side[net.source as usize] && !source_side[net.sink as usize]);
    debug_assert_eq!(
        crossing_capacity(net, &source_side),
        cut_value,
        "extracted cut does not match the flow value"
    );
    let source_side_vertices = (0..net.node_count as u32)
        .filter(|&node| source_side[node as usize])
        .filter_map(|node| net.vertex_of_node(node))
        .collect();
    CutResult {
        cut_value,
        source_side_vertices,
        variant,
    }
}

/// Sum of capacities of arcs leaving `side`. Used to cross-check cuts.
pub fn crossing_capacity(net: &FlowNetwork, side: &[bool]) -> BigInt {
    net.arcs
        .iter()
        .filter(|a| side[a.from as usize] && !side[a.to as usize])
        .map(|a| a.capacity.clone())
        .sum()
}

struct FlowArc {
    to: u32,
    rev: u32,
    residual: BigInt,
}

pub(crate) struct MaxFlow {
    adj: Vec<Vec<FlowArc>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl MaxFlow {
    pub(crate) fn new(n: usize) -> Self {
        MaxFlow {
            adj: (0..n).map(|_| Vec::new()).collect(),
            level: vec![-1; n],
            iter: vec![0; n],
        }
    }

    pub(crate) fn add_arc(&mut self, from: usize, to: usize, capacity: BigInt) {
        let rev_from = self.adj[to].len() as u32;
        let rev_to = self.adj[from].len() as u32;
        self.adj[from].push(FlowArc {
            to: to as u32,
            rev: rev_from,
            residual: capacity,
        });
        self.adj[to].push(FlowArc {
            to: from as u32,
            rev: rev_to,
            residual: BigInt::zero(),
        });
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for arc in &self.adj[v] {
                if arc.residual.is_positive() && self.level[arc.to as usize] < 0 {
                    self.level[arc.to as usize] = self.level[v] + 1;
                    queue.push_back(arc.to as usize);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: usize, t: usize, pushed: &BigInt) -> BigInt {
        if v == t {
            return pushed.clone();
        }
        while self.iter[v] < self.adj[v].len() {
            let i = self.iter[v];
            let (to, rev) = (self.adj[v][i].to as usize, self.adj[v][i].rev as usize);
            if self.adj[v][i].residual.is_positive() && self.level[to] == self.level[v] + 1 {
                let cap = pushed.min(&self.adj[v][i].residual).clone();
                let flowed = self.dfs(to, t, &cap);
                if flowed.is_positive() {
                    self.adj[v][i].residual -= &flowed;
                    self.adj[to][rev].residual += &flowed;
                    return flowed;
                }
                self.level[to] = -1;
            }
            self.iter[v] += 1;
        }
        BigInt::zero()
    }

    pub(crate) fn run(&mut self, s: usize, t: usize) -> BigInt {
        let infinity: BigInt = self.adj[s]
            .iter()
            .map(|a| a.residual.clone())
            .sum::<BigInt>()
            + 1;
        let mut total = BigInt::zero();
        while self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let pushed = self.dfs(s, t, &infinity);
                if !pushed.is_positive() {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Nodes reachable from `start` along positive residual arcs.
    pub(crate) fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for arc in &self.adj[v] {
                if arc.residual.is_positive() && !seen[arc.to as usize] {
                    seen[arc.to as usize] = true;
                    stack.push(arc.to as usize);
                }
            }
        }
        seen
    }

    /// Nodes from which `target` is reachable along positive residual arcs.
    pub(crate) fn reaching(&self, target: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![target];
        seen[target] = true;
        while let Some(v) = stack.pop() {
            // arc (u -> v) has positive residual iff the paired entry in
            // adj[v] points back at a positive reverse capacity
            for arc in &self.adj[v] {
                let u = arc.to as usize;
                if !seen[u] && self.adj[u][arc.rev as usize].residual.is_positive() {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }

    /// Residual reachability closure from an arbitrary node, merged into
    /// an existing side. Used for minimal-minimizer extraction.
    pub(crate) fn close_over(&self, side: &mut [bool], start: usize) {
        if side[start] {
            return;
        }
        let mut stack = vec![start];
        side[start] = true;
        while let Some(v) = stack.pop() {
            for arc in &self.adj[v] {
                if arc.residual.is_positive() && !side[arc.to as usize] {
                    side[arc.to as usize] = true;
                    stack.push(arc.to as usize);
                }
            }
        }
    }
}

/// Max-flow solver plus retained residual state, for callers that need
/// cut-structure queries beyond a single extraction.
pub(crate) fn solve_network(net: &FlowNetwork) -> (MaxFlow, BigInt) {
    let mut solver = MaxFlow::new(net.node_count);
    for a in &net.arcs {
        solver.add_arc(a.from as usize, a.to as usize, a.capacity.clone());
    }
    let value = solver.run(net.source as usize, net.sink as usize);
    (solver, value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Hypergraph, WeightFn};
    use crate::oracle::{random_instance, ShapeClass};
    use crate::rational::{int, ratio};

    fn table(vals: &[i64]) -> WeightFn {
        WeightFn::from_values(vals.iter().map(|&v| int(v)).collect()).unwrap()
    }

    fn instance(n: usize, edges: Vec<Vec<u32>>, tables: Vec<WeightFn>) -> WeightedHypergraph {
        WeightedHypergraph::new(Hypergraph::new(n, edges).unwrap(), tables).unwrap()
    }

    #[test]
    fn alpha_examples() {
        let a = alpha_coefficients(&table(&[0, 1, 3, 6])).unwrap();
        assert_eq!(a, vec![int(1), int(1), int(1)]);
        let a = alpha_coefficients(&WeightFn::linear(int(4), 3).unwrap()).unwrap();
        assert_eq!(a, vec![int(4), int(0), int(0)]);
        let a = alpha_coefficients(&WeightFn::all_or_nothing(int(7), 3).unwrap()).unwrap();
        assert_eq!(a, vec![int(0), int(0), int(7)]);
        assert!(alpha_coefficients(&table(&[0, 2, 3])).is_err());
    }

    #[test]
    fn alpha_telescopes_to_increments() {
        for vals in [
            vec![0, 1, 3, 6],
            vec![0, 0, 0, 9],
            vec![0, 2, 4, 6, 8],
            vec![0, 0, 1, 5, 12],
        ] {
            let f = table(&vals);
            let alphas = alpha_coefficients(&f).unwrap();
            let mut acc = Rational::from_integer(0.into());
            for (j, a) in alphas.iter().enumerate() {
                acc += a;
                assert_eq!(acc, f.increment(j + 1), "prefix {j} of {vals:?}");
            }
        }
    }

    #[test]
    fn network_for_single_edge() {
        let h = instance(2, vec![vec![0, 1]], vec![table(&[0, 1, 3])]);
        let net = build_network(&h, &ratio(3, 2)).unwrap();
        assert_eq!(net.scale, 2.into());
        assert_eq!(net.node_count, 2 + 2 + 2);
        // alpha = (1, 1); scaled by 2: (s,u0)=4, (s,u1)=2, fans of 2, (v,t)=3
        let mut caps: Vec<(u32, u32, i64)> = net
            .arcs
            .iter()
            .map(|a| (a.from, a.to, i64::try_from(&a.capacity).unwrap()))
            .collect();
        caps.sort();
        assert_eq!(
            caps,
            vec![
                (0, 4, 4),
                (0, 5, 2),
                (2, 1, 3),
                (3, 1, 3),
                (4, 2, 2),
                (4, 3, 2),
                (5, 2, 2),
                (5, 3, 2),
            ]
        );
    }

    #[test]
    fn zero_lambda_omits_sink_arcs() {
        let h = instance(2, vec![vec![0, 1]], vec![table(&[0, 1, 3])]);
        let net = build_network(&h, &int(0)).unwrap();
        assert!(net.arcs.iter().all(|a| a.to != SINK));
        // with S = V available for free, the min cut is 0
        let cut = min_cut(&net, CutVariant::MaximalSource);
        assert_eq!(cut.cut_value, 0.into());
        assert_eq!(cut.source_side_vertices, vec![0, 1]);
    }

    #[test]
    fn singleton_edge_cut() {
        let h = instance(1, vec![vec![0]], vec![table(&[0, 5])]);
        let net = build_network(&h, &int(1)).unwrap();
        let cut = min_cut(&net, CutVariant::MaximalSource);
        assert_eq!(cut.cut_value, 1.into()); // psi + lambda - F({0}) = 5 + 1 - 5
        assert_eq!(cut.source_side_vertices, vec![0]);
    }

    #[test]
    fn plain_path_network() {
        // s -> a (3), a -> t (2)
        let net = FlowNetwork {
            node_count: 3,
            arcs: vec![
                Arc { from: 0, to: 2, capacity: 3.into() },
                Arc { from: 2, to: 1, capacity: 2.into() },
            ],
            source: 0,
            sink: 1,
            scale: 1.into(),
            vertex_count: 1,
        };
        let cut = min_cut(&net, CutVariant::MinimalSource);
        assert_eq!(cut.cut_value, 2.into());
        assert_eq!(cut.source_side_vertices, vec![0]); // a stays on the source side
    }

    #[test]
    fn large_lambda_empties_the_source_side() {
        let h = instance(2, vec![vec![0, 1]], vec![table(&[0, 1, 3])]);
        let net = build_network(&h, &int(10)).unwrap();
        let cut = min_cut(&net, CutVariant::MinimalSource);
        assert_eq!(cut.cut_value, net.scaled_psi(&h));
        assert!(cut.source_side_vertices.is_empty());
    }

    #[test]
    fn moderate_lambda_selects_the_edge() {
        let h = instance(2, vec![vec![0, 1]], vec![table(&[0, 1, 3])]);
        let net = build_network(&h, &int(1)).unwrap();
        let cut = min_cut(&net, CutVariant::MaximalSource);
        // (psi + lambda * 2 - F({0,1})) * scale = (3 + 2 - 3) * 1
        assert_eq!(net.scale, 1.into());
        assert_eq!(cut.cut_value, 2.into());
        assert_eq!(cut.source_side_vertices, vec![0, 1]);
        assert!(cut.cut_value < net.scaled_psi(&h));
    }

    /// The cut whose source side is `{s} ∪ S ∪ {u_i : i < |e ∩ S|}`.
    fn lemma_side(h: &WeightedHypergraph, net: &FlowNetwork, s: &[u32]) -> Vec<bool> {
        let mut side = vec![false; net.node_count];
        side[SOURCE as usize] = true;
        for &v in s {
            side[net.vertex_node(v) as usize] = true;
        }
        let mut gadget = 2 + h.vertex_count();
        for edge in h.graph().edges() {
            let inter = edge.iter().filter(|v| s.contains(v)).count();
            for i in 0..edge.len() {
                if i < inter {
                    side[gadget + i] = true;
                }
            }
            gadget += edge.len();
        }
        side
    }

    #[test]
    fn cut_cost_identity_on_random_instances() {
        use rand::prelude::*;
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for seed in 0..25u64 {
            let h = random_instance(seed, 5, 4, 3, ShapeClass::Convex, 6).unwrap();
            let lambda = ratio(rng.random_range(0..12), rng.random_range(1..4));
            let net = build_network(&h, &lambda).unwrap();
            let scale = Rational::from_integer(net.scale.clone());
            let mut brute_min: Option<BigInt> = None;
            for mask in 0u32..1 << 5 {
                let s: Vec<u32> = (0..5).filter(|&v| mask >> v & 1 == 1).collect();
                let side = lemma_side(&h, &net, &s);
                let cost = crossing_capacity(&net, &side);
                let expect = (h.psi() + &lambda * Rational::from_integer(s.len().into())
                    - h.induced_weight(&s).unwrap())
                    * &scale;
                assert!(expect.is_integer());
                assert_eq!(cost, expect.to_integer(), "seed {seed} S {s:?}");
                brute_min = Some(match brute_min {
                    None => cost,
                    Some(b) => b.min(cost),
                });
            }
            let cut = min_cut(&net, CutVariant::MinimalSource);
            assert_eq!(cut.cut_value, brute_min.unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn min_cut_never_exceeds_scaled_psi() {
        for seed in 0..15u64 {
            let h = random_instance(seed, 6, 5, 3, ShapeClass::Convex, 5).unwrap();
            let lambda = ratio(seed as i64 % 7, 2);
            let net = build_network(&h, &lambda).unwrap();
            let cut = min_cut(&net, CutVariant::MinimalSource);
            assert!(cut.cut_value <= net.scaled_psi(&h));
        }
    }

    #[test]
    fn matches_exhaustive_cut_enumeration() {
        // every 2-partition of the inner nodes, on networks with <= 14 nodes
        for seed in 0..20u64 {
            let h = random_instance(seed, 4, 3, 3, ShapeClass::Convex, 5).unwrap();
            let lambda = ratio((seed % 5) as i64, 1 + (seed % 3) as i64);
            let net = build_network(&h, &lambda).unwrap();
            let inner: Vec<u32> = (2..net.node_count as u32).collect();
            assert!(net.node_count <= 14);
            let mut best: Option<BigInt> = None;
            for mask in 0u64..1 << inner.len() {
                let mut side = vec![false; net.node_count];
                side[SOURCE as usize] = true;
                for (bit, &node) in inner.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        side[node as usize] = true;
                    }
                }
                let cost = crossing_capacity(&net, &side);
                best = Some(match best {
                    None => cost,
                    Some(b) => b.min(cost),
                });
            }
            let cut = min_cut(&net, CutVariant::MaximalSource);
            assert_eq!(cut.cut_value, best.unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn dimacs_dump() {
        let h = instance(2, vec![vec![0, 1]], vec![table(&[0, 1, 3])]);
        let net = build_network(&h, &int(1)).unwrap();
        let dump = net.to_dimacs();
        let mut lines = dump.lines();
        assert_eq!(lines.next().unwrap(), format!("p max 6 {}", net.arcs.len()));
        assert_eq!(lines.next().unwrap(), "n 1 s");
        assert_eq!(lines.next().unwrap(), "n 2 t");
        assert!(dump.lines().filter(|l| l.starts_with("a ")).count() == net.arcs.len());
    }
}
