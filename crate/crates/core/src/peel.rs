//! Greedy peeling solvers: the 1/r-approximation that removes one
//! minimum-delta vertex at a time, the batched 1/(r(1+eps)) variant with
//! logarithmically many iterations, and the closed form for all-concave
//! weights.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::instance::{Algorithm, Solution, SubsetState, WeightedHypergraph};
use crate::rational::Rational;

/// One peeling step: which vertex left, what it cost, and the density of
/// the surviving set (`None` once the set is empty).
#[derive(Debug, Clone)]
pub struct PeelRow {
    pub rank: u32,
    pub vertex: u32,
    pub delta: Rational,
    pub density_after: Option<Rational>,
}

/// Full removal order of a greedy run.
#[derive(Debug, Clone)]
pub struct PeelProfile {
    pub rows: Vec<PeelRow>,
}

impl PeelProfile {
    pub fn order(&self) -> Vec<u32> {
        self.rows.iter().map(|r| r.vertex).collect()
    }

    /// `rank,vertex,delta,density_after` with exact fraction fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,vertex,delta,density_after\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.rank,
                row.vertex,
                crate::rational::format_exact(&row.delta),
                row.density_after
                    .as_ref()
                    .map(crate::rational::format_exact)
                    .unwrap_or_default(),
            ));
        }
        out
    }
}

/// Weight arithmetic used inside the peeling loop. The generic core runs
/// either on `i128` (weights pre-scaled to integers, the common case) or
/// on exact rationals when the scaled values could overflow.
trait PeelWeight: Clone + Ord {
    fn zero() -> Self;
    fn add_assign(&mut self, other: &Self);
    fn sub_assign(&mut self, other: &Self);
    /// Compare `a / size_a` with `b / size_b` without dividing.
    fn density_cmp(a: &Self, size_a: usize, b: &Self, size_b: usize) -> Ordering;
}

impl PeelWeight for i128 {
    fn zero() -> Self {
        0
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
    fn density_cmp(a: &Self, size_a: usize, b: &Self, size_b: usize) -> Ordering {
        (a * size_b as i128).cmp(&(b * size_a as i128))
    }
}

impl PeelWeight for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
    fn density_cmp(a: &Self, size_a: usize, b: &Self, size_b: usize) -> Ordering {
        (a * Rational::from_integer(size_b.into()))
            .cmp(&(b * Rational::from_integer(size_a.into())))
    }
}

/// Per-edge increment tables in the peeling weight domain.
/// `increments[e][i] = f_e(i) - f_e(i-1)` for `i` in `1..=|e|`.
struct ScaledTables<W> {
    increments: Vec<Vec<W>>,
    psi: W,
}

/// Least common multiple of all table denominators, and `psi` scaled by
/// it. Decides whether the i128 fast path is safe.
fn scaling(h: &WeightedHypergraph) -> (BigInt, BigInt) {
    let mut d = BigInt::one();
    for w in h.weights() {
        for v in w.values() {
            d = d.lcm(v.denom());
        }
    }
    let psi_scaled = (h.psi() * Rational::from_integer(d.clone())).to_integer();
    (d, psi_scaled)
}

fn i128_tables(h: &WeightedHypergraph, d: &BigInt) -> ScaledTables<i128> {
    let scale = Rational::from_integer(d.clone());
    let mut psi: i128 = 0;
    let increments = h
        .weights()
        .iter()
        .map(|w| {
            let top = (w.top() * &scale).to_integer().to_i128().unwrap();
            psi += top;
            (1..=w.size())
                .map(|i| (w.increment(i) * &scale).to_integer().to_i128().unwrap())
                .collect()
        })
        .collect();
    ScaledTables { increments, psi }
}

fn rational_tables(h: &WeightedHypergraph) -> ScaledTables<Rational> {
    let increments = h
        .weights()
        .iter()
        .map(|w| (1..=w.size()).map(|i| w.increment(i)).collect())
        .collect();
    ScaledTables {
        increments,
        psi: h.psi().clone(),
    }
}

struct PeelOutcome<W> {
    order: Vec<u32>,
    deltas: Vec<W>,
    /// `F` of the surviving set after each removal.
    weights_after: Vec<W>,
    /// How many removals produce the best set (by density, then smaller
    /// size). 0 means the full vertex set.
    best_prefix: usize,
}

/// Heap entry ordered by (delta, vertex id) ascending; BinaryHeap is a
/// max-heap, so comparisons are reversed.
struct HeapEntry<W> {
    delta: W,
    vertex: u32,
    stamp: u32,
}

impl<W: Ord> PartialEq for HeapEntry<W> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<W: Ord> Eq for HeapEntry<W> {}
impl<W: Ord> PartialOrd for HeapEntry<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<W: Ord> Ord for HeapEntry<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.delta
            .cmp(&other.delta)
            .then(self.vertex.cmp(&other.vertex))
            .reverse()
    }
}

/// The peeling core: repeatedly pop the vertex with the smallest current
/// delta (ties to the smaller id), remove it, and update its neighbors'
/// deltas. Stale heap entries are skipped via version stamps, so no
/// decrease-key structure is needed; total work is O(p r log n).
fn peel_run<W: PeelWeight>(h: &WeightedHypergraph, tables: &ScaledTables<W>) -> PeelOutcome<W> {
    let n = h.vertex_count();
    let mut counts: Vec<usize> = h.graph().edges().iter().map(|e| e.len()).collect();
    let mut alive = vec![true; n];
    let mut deltas: Vec<W> = vec![W::zero(); n];
    let mut stamps = vec![0u32; n];
    for v in 0..n as u32 {
        let mut delta = W::zero();
        for &e in h.graph().edges_of(v) {
            delta.add_assign(&tables.increments[e as usize][counts[e as usize] - 1]);
        }
        deltas[v as usize] = delta;
    }
    let mut heap: BinaryHeap<HeapEntry<W>> = (0..n as u32)
        .map(|v| HeapEntry {
            delta: deltas[v as usize].clone(),
            vertex: v,
            stamp: 0,
        })
        .collect();

    let mut weight = tables.psi.clone();
    let mut best_prefix = 0usize;
    let mut best_weight = weight.clone();
    let mut best_size = n;
    let mut order = Vec::with_capacity(n);
    let mut out_deltas = Vec::with_capacity(n);
    let mut weights_after = Vec::with_capacity(n);

    while order.len() < n {
        let entry = heap.pop().expect("every alive vertex has a fresh entry");
        let v = entry.vertex as usize;
        if !alive[v] || entry.stamp != stamps[v] {
            continue;
        }
        alive[v] = false;
        weight.sub_assign(&entry.delta);
        for &e in h.graph().edges_of(entry.vertex) {
            let e = e as usize;
            counts[e] -= 1;
            let c = counts[e];
            if c == 0 {
                continue;
            }
            // neighbors still alive in e see their increment move down one slot
            for &u in h.graph().edge(e) {
                let u = u as usize;
                if !alive[u] {
                    continue;
                }
                let inc = &tables.increments[e];
                deltas[u].sub_assign(&inc[c]);
                deltas[u].add_assign(&inc[c - 1]);
                stamps[u] += 1;
                heap.push(HeapEntry {
                    delta: deltas[u].clone(),
                    vertex: u as u32,
                    stamp: stamps[u],
                });
            }
        }
        order.push(entry.vertex);
        out_deltas.push(entry.delta);
        weights_after.push(weight.clone());
        let size = n - order.len();
        // better density wins; on equal density the later (smaller) set wins
        if size > 0 && W::density_cmp(&weight, size, &best_weight, best_size) != Ordering::Less {
            best_prefix = order.len();
            best_weight = weight.clone();
            best_size = size;
        }
    }
    PeelOutcome {
        order,
        deltas: out_deltas,
        weights_after,
        best_prefix,
    }
}

/// Greedy 1/r-approximation. Runs on any non-decreasing tables; the
/// ratio guarantee applies when every table is convex.
pub fn solve_greedy(h: &WeightedHypergraph) -> Result<(Solution, PeelProfile)> {
    let n = h.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let (d, psi_scaled) = scaling(h);
    // density comparisons multiply a partial weight by a set size, so the
    // i128 path is safe while psi * scale stays well under 2^127
    let fits = psi_scaled.bits() < 80 && n < (1 << 31);
    let (order, best_prefix, profile) = if fits {
        let tables = i128_tables(h, &d);
        let outcome = peel_run(h, &tables);
        let profile = profile_from_i128(&outcome, n, &d);
        (outcome.order, outcome.best_prefix, profile)
    } else {
        let tables = rational_tables(h);
        let outcome = peel_run(h, &tables);
        let profile = profile_from_rational(&outcome, n);
        (outcome.order, outcome.best_prefix, profile)
    };

    let mut keep = vec![true; n];
    for &v in &order[..best_prefix] {
        keep[v as usize] = false;
    }
    let vertices: Vec<u32> = (0..n as u32).filter(|&v| keep[v as usize]).collect();
    let density = h.density(&vertices)?;
    let sol = Solution::new(vertices, density, Algorithm::Greedy, n as u64);
    Ok((sol, profile))
}

fn profile_from_i128(outcome: &PeelOutcome<i128>, n: usize, d: &BigInt) -> PeelProfile {
    let rows = outcome
        .order
        .iter()
        .enumerate()
        .map(|(i, &v)| PeelRow {
            rank: i as u32,
            vertex: v,
            delta: Rational::new(outcome.deltas[i].into(), d.clone()),
            density_after: (i + 1 < n).then(|| {
                Rational::new(
                    outcome.weights_after[i].into(),
                    d * BigInt::from(n - i - 1),
                )
            }),
        })
        .collect();
    PeelProfile { rows }
}

fn profile_from_rational(outcome: &PeelOutcome<Rational>, n: usize) -> PeelProfile {
    let rows = outcome
        .order
        .iter()
        .enumerate()
        .map(|(i, &v)| PeelRow {
            rank: i as u32,
            vertex: v,
            delta: outcome.deltas[i].clone(),
            density_after: (i + 1 < n)
                .then(|| &outcome.weights_after[i] / Rational::from_integer((n - i - 1).into())),
        })
        .collect();
    PeelProfile { rows }
}

/// Batched peeling: each iteration removes every vertex whose delta is at
/// most `r (1+eps) F(S) / |S|`, giving a `1/(r(1+eps))` guarantee in at
/// most `ceil(log_{1+eps} n) + 1` iterations.
pub fn solve_para(h: &WeightedHypergraph, eps: &Rational) -> Result<(Solution, u64)> {
    let n = h.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if eps <= &Rational::zero() {
        return Err(Error::InvalidEpsilon(format!(
            "para needs eps > 0, got {eps}"
        )));
    }
    h.require_convex()?;

    let r = Rational::from_integer(h.graph().rank().into());
    let factor = &r * (Rational::one() + eps);
    let mut state = SubsetState::full(h);
    let mut best_vertices = state.vertices();
    let mut best_density = state.density()?;
    let mut iterations: u64 = 0;
    while state.size() > 0 {
        iterations += 1;
        let threshold = &factor * state.weight() / Rational::from_integer(state.size().into());
        // deltas are all measured against the same S, then removed as one batch
        let batch: Vec<u32> = (0..n as u32)
            .filter(|&v| state.contains(v))
            .filter(|&v| state.removal_delta(v).expect("alive vertex") <= threshold)
            .collect();
        debug_assert!(!batch.is_empty(), "the degree-sum bound forces progress");
        let before = state.size();
        for &v in &batch {
            state.remove(v)?;
        }
        // Theorem guarantee: the survivors number less than |S| / (1+eps)
        assert!(
            Rational::from_integer(state.size().into()) * (Rational::one() + eps)
                < Rational::from_integer(before.into()),
            "batch shrink factor violated"
        );
        if state.size() > 0 {
            let density = state.density()?;
            if density >= best_density {
                best_density = density;
                best_vertices = state.vertices();
            }
        }
    }
    let sol = Solution::new(best_vertices, best_density, Algorithm::Para, iterations)
        .with_extras(json!({ "eps": crate::rational::format_exact(eps) }));
    Ok((sol, iterations))
}

/// Closed form for all-concave weights: the optimum is the single vertex
/// maximizing the sum of `f_e(1)` over its edges.
pub fn solve_concave(h: &WeightedHypergraph) -> Result<Solution> {
    if h.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if let Some(edge) = h.first_non_concave() {
        return Err(Error::NotAllConcave { edge });
    }
    let mut best_vertex = 0u32;
    let mut best_score = Rational::zero();
    for v in 0..h.vertex_count() as u32 {
        let score: Rational = h
            .graph()
            .edges_of(v)
            .iter()
            .map(|&e| h.weight(e as usize).value(1).clone())
            .sum();
        if score > best_score {
            best_score = score;
            best_vertex = v;
        }
    }
    Ok(Solution::new(
        vec![best_vertex],
        best_score,
        Algorithm::Concave,
        0,
    ))
}

/// Iteration bound of the batched peel: `ceil(log_{1+eps} n) + 1`.
pub fn para_iteration_bound(n: usize, eps: &Rational) -> u64 {
    let eps = eps.to_f64().expect("eps fits in f64");
    let log = (n.max(1) as f64).ln() / (1.0 + eps).ln();
    log.ceil() as u64 + 1
}
