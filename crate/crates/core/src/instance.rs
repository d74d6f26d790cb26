//! Problem instances: hypergraphs, per-edge weight functions, and exact
//! evaluation of induced weights and densities.

use num_traits::{Signed, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::rational::{format_exact, Rational};

/// Classified shape of a weight table. A linear table satisfies both the
/// convexity and concavity inequalities and classifies as `Convex` so the
/// exact algorithms accept it; use [`WeightFn::is_concave`] to test the
/// concavity property itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Convex,
    Concave,
    Neither,
}

/// How a weight table was specified. Kept so instances round-trip through
/// the text format without expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightSpec {
    Table,
    Linear(Rational),
    AllOrNothing(Rational),
    Power(Rational, u32),
}

/// Non-decreasing edge-weight function tabulated on `0..=k` where `k` is
/// the edge size. `values[0]` is always zero: tables with a nonzero offset
/// are shifted down at construction (the optimum is unchanged by a
/// constant per-edge offset).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFn {
    values: Vec<Rational>,
    shape: Shape,
    convex: bool,
    concave: bool,
    source: WeightSpec,
}

impl WeightFn {
    /// Validate and normalize a raw table of `k + 1` values.
    pub fn from_values(values: Vec<Rational>) -> Result<Self> {
        Self::build(values, WeightSpec::Table)
    }

    /// `f(i) = w * i`.
    pub fn linear(w: Rational, size: usize) -> Result<Self> {
        let values = (0..=size).map(|i| &w * Rational::from_integer(i.into())).collect();
        Self::build(values, WeightSpec::Linear(w))
    }

    /// `f(i) = w` if `i = k`, else `0`: the edge counts only when fully
    /// contained, which recovers the classical densest-subgraph objectives.
    pub fn all_or_nothing(w: Rational, size: usize) -> Result<Self> {
        let mut values = vec![Rational::zero(); size + 1];
        values[size] = w.clone();
        Self::build(values, WeightSpec::AllOrNothing(w))
    }

    /// `f(i) = w * i^a` with integer exponent `a >= 1`, evaluated exactly.
    pub fn power(w: Rational, exponent: u32, size: usize) -> Result<Self> {
        if exponent < 1 {
            return Err(Error::InvalidParameter(format!(
                "power exponent must be >= 1, got {exponent}"
            )));
        }
        let values = (0..=size)
            .map(|i| &w * Rational::from_integer(num_bigint::BigInt::from(i).pow(exponent)))
            .collect();
        Self::build(values, WeightSpec::Power(w, exponent))
    }

    fn build(mut values: Vec<Rational>, source: WeightSpec) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Validation(
                "weight table needs at least f(0) and f(1)".into(),
            ));
        }
        if values.iter().any(|v| v.is_negative()) {
            return Err(Error::Validation("negative weight value".into()));
        }
        for i in 0..values.len() - 1 {
            if values[i] > values[i + 1] {
                return Err(Error::Validation(format!(
                    "weight table is decreasing between f({i}) and f({})",
                    i + 1
                )));
            }
        }
        if !values[0].is_zero() {
            log::warn!(
                "weight table has f(0) = {}; shifting all values down by f(0)",
                format_exact(&values[0])
            );
            let offset = values[0].clone();
            for v in values.iter_mut() {
                *v -= &offset;
            }
        }
        let mut convex = true;
        let mut concave = true;
        for i in 1..values.len() - 1 {
            let left = &values[i] - &values[i - 1];
            let right = &values[i + 1] - &values[i];
            if right < left {
                convex = false;
            }
            if right > left {
                concave = false;
            }
        }
        let shape = if convex {
            Shape::Convex
        } else if concave {
            Shape::Concave
        } else {
            Shape::Neither
        };
        Ok(WeightFn {
            values,
            shape,
            convex,
            concave,
            source,
        })
    }

    /// Edge size this table is defined for.
    pub fn size(&self) -> usize {
        self.values.len() - 1
    }

    /// `f(i)`. Panics when `i` exceeds the edge size.
    pub fn value(&self, i: usize) -> &Rational {
        &self.values[i]
    }

    /// `f(i) - f(i-1)` for `1 <= i <= k`.
    pub fn increment(&self, i: usize) -> Rational {
        &self.values[i] - &self.values[i - 1]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn top(&self) -> &Rational {
        &self.values[self.values.len() - 1]
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Convexity as a property of the table; true for linear tables.
    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// Concavity as a property of the table; true for linear tables even
    /// though their classified shape is `Convex`.
    pub fn is_concave(&self) -> bool {
        self.concave
    }

    pub fn source(&self) -> &WeightSpec {
        &self.source
    }
}

/// Immutable hypergraph: `n` vertices and an ordered list of hyperedges.
/// Each edge is a sorted, duplicate-free list of vertex ids. Duplicate
/// edges are allowed and treated independently; isolated vertices are
/// allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<u32>>,
    incidence: Vec<Vec<u32>>,
    p: usize,
    r: usize,
}

impl Hypergraph {
    pub fn new(n: usize, mut edges: Vec<Vec<u32>>) -> Result<Self> {
        for (idx, edge) in edges.iter_mut().enumerate() {
            if edge.is_empty() {
                return Err(Error::Validation(format!("edge {idx} is empty")));
            }
            edge.sort_unstable();
            if edge.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Validation(format!(
                    "edge {idx} contains a duplicate vertex"
                )));
            }
            if let Some(&v) = edge.last() {
                if v as usize >= n {
                    return Err(Error::Validation(format!(
                        "edge {idx} references vertex {v} but n = {n}"
                    )));
                }
            }
        }
        let mut incidence = vec![Vec::new(); n];
        let mut p = 0;
        let mut r = 0;
        for (idx, edge) in edges.iter().enumerate() {
            p += edge.len();
            r = r.max(edge.len());
            for &v in edge {
                incidence[v as usize].push(idx as u32);
            }
        }
        Ok(Hypergraph {
            n,
            edges,
            incidence,
            p,
            r,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Total incidence size `p = sum of edge sizes`.
    pub fn incidence_size(&self) -> usize {
        self.p
    }

    /// Rank `r = max edge size` (0 when there are no edges).
    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn edge(&self, idx: usize) -> &[u32] {
        &self.edges[idx]
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    /// Indices of the edges containing `v`.
    pub fn edges_of(&self, v: u32) -> &[u32] {
        &self.incidence[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.incidence[v as usize].len()
    }
}

/// A hypergraph together with one weight table per edge. Immutable after
/// construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHypergraph {
    graph: Hypergraph,
    weights: Vec<WeightFn>,
    psi: Rational,
}

impl WeightedHypergraph {
    pub fn new(graph: Hypergraph, weights: Vec<WeightFn>) -> Result<Self> {
        if graph.edge_count() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} edges but {} weight tables",
                graph.edge_count(),
                weights.len()
            )));
        }
        for (idx, (e, w)) in graph.edges().iter().zip(&weights).enumerate() {
            if w.size() != e.len() {
                return Err(Error::Validation(format!(
                    "edge {idx} has {} vertices but its table covers 0..={}",
                    e.len(),
                    w.size()
                )));
            }
        }
        let psi = weights.iter().map(|w| w.top().clone()).sum();
        Ok(WeightedHypergraph {
            graph,
            weights,
            psi,
        })
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    pub fn weight(&self, edge: usize) -> &WeightFn {
        &self.weights[edge]
    }

    pub fn weights(&self) -> &[WeightFn] {
        &self.weights
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.n
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edges.len()
    }

    /// Total weight `psi = sum_e f_e(|e|)`: the value of the full graph and
    /// the upper bound used by the search algorithms.
    pub fn psi(&self) -> &Rational {
        &self.psi
    }

    /// Index of the first edge whose table is not convex, if any.
    pub fn first_non_convex(&self) -> Option<usize> {
        self.weights.iter().position(|w| !w.is_convex())
    }

    /// Index of the first edge whose table is not concave, if any.
    pub fn first_non_concave(&self) -> Option<usize> {
        self.weights.iter().position(|w| !w.is_concave())
    }

    pub fn require_convex(&self) -> Result<()> {
        match self.first_non_convex() {
            Some(edge) => Err(Error::NotConvex { edge }),
            None => Ok(()),
        }
    }

    /// Direct one-pass evaluation of `F(S) = sum_e f_e(|e ∩ S|)`.
    pub fn induced_weight(&self, s: &[u32]) -> Result<Rational> {
        let mask = self.set_mask(s)?;
        Ok(self.induced_weight_mask(&mask))
    }

    /// `F(S)` where `S` is given as a membership mask of length `n`.
    pub fn induced_weight_mask(&self, mask: &[bool]) -> Rational {
        let mut total = Rational::zero();
        for (edge, w) in self.graph.edges.iter().zip(&self.weights) {
            let c = edge.iter().filter(|&&v| mask[v as usize]).count();
            if c > 0 {
                total += w.value(c);
            }
        }
        total
    }

    /// `F(S) / |S|` for nonempty `S`.
    pub fn density(&self, s: &[u32]) -> Result<Rational> {
        let mask = self.set_mask(s)?;
        let size = mask.iter().filter(|&&b| b).count();
        if size == 0 {
            return Err(Error::EmptySet);
        }
        Ok(self.induced_weight_mask(&mask) / Rational::from_integer(size.into()))
    }

    fn set_mask(&self, s: &[u32]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.graph.n];
        for &v in s {
            if v as usize >= self.graph.n {
                return Err(Error::Validation(format!(
                    "vertex {v} out of range (n = {})",
                    self.graph.n
                )));
            }
            mask[v as usize] = true;
        }
        Ok(mask)
    }
}

/// Incremental bookkeeping for a vertex set `S`: per-edge intersection
/// counts, `|S|`, and `F(S)`, all maintained exactly under single-vertex
/// insertions and removals. This is the state behind peeling, the
/// brute-force enumeration, and removal-delta queries.
#[derive(Debug, Clone)]
pub struct SubsetState<'a> {
    instance: &'a WeightedHypergraph,
    in_set: Vec<bool>,
    counts: Vec<usize>,
    size: usize,
    weight: Rational,
}

impl<'a> SubsetState<'a> {
    pub fn empty(instance: &'a WeightedHypergraph) -> Self {
        SubsetState {
            instance,
            in_set: vec![false; instance.vertex_count()],
            counts: vec![0; instance.edge_count()],
            size: 0,
            weight: Rational::zero(),
        }
    }

    pub fn full(instance: &'a WeightedHypergraph) -> Self {
        let counts = instance.graph.edges.iter().map(|e| e.len()).collect();
        SubsetState {
            instance,
            in_set: vec![true; instance.vertex_count()],
            counts,
            size: instance.vertex_count(),
            weight: instance.psi.clone(),
        }
    }

    pub fn from_set(instance: &'a WeightedHypergraph, s: &[u32]) -> Result<Self> {
        let mut state = Self::empty(instance);
        for &v in s {
            if v as usize >= instance.vertex_count() {
                return Err(Error::Validation(format!(
                    "vertex {v} out of range (n = {})",
                    instance.vertex_count()
                )));
            }
            if !state.in_set[v as usize] {
                state.insert(v);
            }
        }
        Ok(state)
    }

    pub fn contains(&self, v: u32) -> bool {
        self.in_set[v as usize]
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Current `F(S)`, maintained incrementally.
    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn count(&self, edge: usize) -> usize {
        self.counts[edge]
    }

    pub fn density(&self) -> Result<Rational> {
        if self.size == 0 {
            return Err(Error::EmptySet);
        }
        Ok(&self.weight / Rational::from_integer(self.size.into()))
    }

    pub fn vertices(&self) -> Vec<u32> {
        (0..self.in_set.len() as u32)
            .filter(|&v| self.in_set[v as usize])
            .collect()
    }

    /// `F(S) - F(S \ {v})`, evaluated in time proportional to `deg(v)`.
    pub fn removal_delta(&self, v: u32) -> Result<Rational> {
        if v as usize >= self.in_set.len() || !self.in_set[v as usize] {
            return Err(Error::NotInSet(v));
        }
        let mut delta = Rational::zero();
        for &e in self.instance.graph.edges_of(v) {
            let c = self.counts[e as usize];
            delta += self.instance.weights[e as usize].increment(c);
        }
        Ok(delta)
    }

    /// Remove `v`, returning the exact drop in `F(S)`.
    pub fn remove(&mut self, v: u32) -> Result<Rational> {
        let delta = self.removal_delta(v)?;
        self.in_set[v as usize] = false;
        self.size -= 1;
        for &e in self.instance.graph.edges_of(v) {
            self.counts[e as usize] -= 1;
        }
        self.weight -= &delta;
        Ok(delta)
    }

    /// Insert `v`, returning the exact gain in `F(S)`.
    pub fn insert(&mut self, v: u32) -> Rational {
        debug_assert!(!self.in_set[v as usize]);
        let mut gain = Rational::zero();
        for &e in self.instance.graph.edges_of(v) {
            let c = self.counts[e as usize];
            self.counts[e as usize] = c + 1;
            gain += self.instance.weights[e as usize].increment(c + 1);
        }
        self.in_set[v as usize] = true;
        self.size += 1;
        self.weight += &gain;
        gain
    }
}

/// Result of any solver: a nonempty vertex set with its exact density and
/// provenance. `extras` carries solver-specific certificate data.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub vertices: Vec<u32>,
    pub density: Rational,
    pub algorithm: Algorithm,
    pub iterations: u64,
    pub extras: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Flow,
    FlowEps,
    Greedy,
    Para,
    Concave,
    Brute,
    Sweep,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Flow => "flow",
            Algorithm::FlowEps => "flow-eps",
            Algorithm::Greedy => "greedy",
            Algorithm::Para => "para",
            Algorithm::Concave => "concave",
            Algorithm::Brute => "brute",
            Algorithm::Sweep => "sweep",
        }
    }
}

impl Solution {
    pub fn new(
        mut vertices: Vec<u32>,
        density: Rational,
        algorithm: Algorithm,
        iterations: u64,
    ) -> Self {
        vertices.sort_unstable();
        Solution {
            vertices,
            density,
            algorithm,
            iterations,
            extras: None,
        }
    }

    pub fn with_extras(mut self, extras: serde_json::Value) -> Self {
        self.extras = Some(extras);
        self
    }

    pub fn extras_or_default(&self) -> serde_json::Value {
        self.extras.clone().unwrap_or_else(|| json!({}))
    }
}

/// Deterministic preference between candidate answers of equal standing:
/// higher density wins, then the smaller set, then the lexicographically
/// smaller sorted id list. Every algorithm in the crate resolves ties with
/// this rule.
pub fn better_candidate(
    density_a: &Rational,
    set_a: &[u32],
    density_b: &Rational,
    set_b: &[u32],
) -> bool {
    match density_a.cmp(density_b) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => match set_a.len().cmp(&set_b.len()) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => set_a < set_b,
        },
    }
}
