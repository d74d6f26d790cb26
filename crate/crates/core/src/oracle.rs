//! Ground-truth brute-force solver and seeded instance generator. Every
//! guarantee in the crate is checked against this module at desk scale.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{
    better_candidate, Algorithm, Hypergraph, Solution, SubsetState, WeightFn, WeightedHypergraph,
};
use crate::rational::Rational;

/// Hard cap on exhaustive enumeration.
pub const BRUTE_CAP: usize = 24;
/// Cap when the full (subset, density) table is retained.
pub const TABLE_CAP: usize = 16;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best_set: Vec<u32>,
    pub best_density: Rational,
    /// All `(subset mask, density)` pairs, populated by
    /// [`brute_force_table`] for instances with `n <= 16`.
    pub table: Option<Vec<(u32, Rational)>>,
}

impl OracleResult {
    pub fn to_solution(&self, subsets: u64) -> Solution {
        Solution::new(
            self.best_set.clone(),
            self.best_density.clone(),
            Algorithm::Brute,
            subsets,
        )
    }
}

/// Exact maximum density over all nonempty subsets, by Gray-code
/// enumeration with incremental intersection counts. Ties resolve to the
/// smaller set, then the lexicographically smaller id list.
pub fn brute_force(h: &WeightedHypergraph) -> Result<OracleResult> {
    enumerate(h, false)
}

/// As [`brute_force`], additionally retaining the full density table.
pub fn brute_force_table(h: &WeightedHypergraph) -> Result<OracleResult> {
    if h.vertex_count() > TABLE_CAP {
        return Err(Error::TooLarge {
            n: h.vertex_count(),
            cap: TABLE_CAP,
        });
    }
    enumerate(h, true)
}

fn enumerate(h: &WeightedHypergraph, retain: bool) -> Result<OracleResult> {
    let n = h.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if n > BRUTE_CAP {
        return Err(Error::TooLarge { n, cap: BRUTE_CAP });
    }
    let mut state = SubsetState::empty(h);
    let mut table = Vec::new();
    let mut gray: u32 = 0;
    let mut best_mask: u32 = 0;
    let mut best_weight = Rational::from_integer(0.into());
    let mut best_size: usize = 0;
    for k in 1u64..1u64 << n {
        let next = (k ^ (k >> 1)) as u32;
        let flipped = (next ^ gray).trailing_zeros();
        if next & (1 << flipped) != 0 {
            state.insert(flipped);
        } else {
            state.remove(flipped)?;
        }
        gray = next;
        debug_assert_eq!(state.size(), gray.count_ones() as usize);
        let size = state.size();
        let weight = state.weight();
        if retain {
            table.push((gray, weight / Rational::from_integer(size.into())));
        }
        // compare weight/size against best_weight/best_size without
        // materializing the quotients
        let replace = if best_size == 0 {
            true
        } else {
            match (weight * Rational::from_integer(best_size.into()))
                .cmp(&(&best_weight * Rational::from_integer(size.into())))
            {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => better_mask(gray, best_mask, size, best_size),
            }
        };
        if replace {
            best_mask = gray;
            best_weight = weight.clone();
            best_size = size;
        }
    }
    let best_set: Vec<u32> = (0..n as u32).filter(|&v| best_mask >> v & 1 == 1).collect();
    let best_density = &best_weight / Rational::from_integer(best_size.into());
    Ok(OracleResult {
        best_set,
        best_density,
        table: retain.then_some(table),
    })
}

/// Tie-break on equal density: smaller set first, then the set containing
/// the lowest differing vertex id (lexicographic order of sorted lists).
fn better_mask(a: u32, b: u32, size_a: usize, size_b: usize) -> bool {
    if size_a != size_b {
        return size_a < size_b;
    }
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    a & (diff & diff.wrapping_neg()) != 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeClass {
    Convex,
    Concave,
    Mixed,
}

/// Deterministic random instance: `m` edges of size `1..=max_edge_size`
/// over `n` vertices, with integer weight tables bounded by `max_weight`.
/// Convex tables sample non-decreasing increments, concave tables
/// non-increasing increments; `Mixed` flips a coin per edge and, when the
/// sizes permit, forces at least one strictly convex and one strictly
/// concave table.
pub fn random_instance(
    seed: u64,
    n: usize,
    m: usize,
    max_edge_size: usize,
    shape: ShapeClass,
    max_weight: u32,
) -> Result<WeightedHypergraph> {
    if n == 0 || m == 0 || max_edge_size == 0 {
        return Err(Error::InvalidParameter(
            "n, m and max edge size must be positive".into(),
        ));
    }
    if max_edge_size > n {
        return Err(Error::InvalidParameter(format!(
            "max edge size {max_edge_size} exceeds n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for idx in 0..m {
        let k = rng.random_range(1..=max_edge_size);
        let mut verts: Vec<u32> =
            rand::seq::index::sample(&mut rng, n, k).iter().map(|v| v as u32).collect();
        verts.sort_unstable();
        let edge_shape = match shape {
            ShapeClass::Convex => ShapeClass::Convex,
            ShapeClass::Concave => ShapeClass::Concave,
            ShapeClass::Mixed => {
                if rng.random_bool(0.5) {
                    ShapeClass::Convex
                } else {
                    ShapeClass::Concave
                }
            }
        };
        let table = match edge_shape {
            ShapeClass::Convex => convex_table(&mut rng, k, max_weight),
            ShapeClass::Concave => concave_table(&mut rng, k, max_weight),
            ShapeClass::Mixed => unreachable!(),
        };
        // forced exemplars so a Mixed request yields both shapes
        let table = if shape == ShapeClass::Mixed && k >= 2 && max_weight >= 1 && idx < 2 {
            let w = Rational::from_integer(max_weight.max(1).into());
            if idx == 0 {
                WeightFn::all_or_nothing(w, k)? // strictly convex for k >= 2
            } else {
                let mut vals = vec![Rational::from_integer(0.into())];
                vals.extend(std::iter::repeat_n(w, k)); // strictly concave jump
                WeightFn::from_values(vals)?
            }
        } else {
            WeightFn::from_values(table)?
        };
        edges.push(verts);
        weights.push(table);
    }
    WeightedHypergraph::new(Hypergraph::new(n, edges)?, weights)
}

/// Non-decreasing increments with all values `<= max_weight`, sampled so
/// the remaining slots always fit in the budget.
fn convex_table(rng: &mut ChaCha8Rng, k: usize, max_weight: u32) -> Vec<Rational> {
    let budget = max_weight as i64;
    let mut incs = Vec::with_capacity(k);
    let mut sum = 0i64;
    let mut prev = 0i64;
    for i in 0..k {
        // keeping (k - i) future increments at >= d must still fit the budget
        let hi = (budget - sum) / (k - i) as i64;
        let d = rng.random_range(prev..=hi.max(prev));
        incs.push(d);
        sum += d;
        prev = d;
    }
    to_values(&incs)
}

/// Non-increasing increments with total `<= max_weight`.
fn concave_table(rng: &mut ChaCha8Rng, k: usize, max_weight: u32) -> Vec<Rational> {
    let budget = max_weight as i64;
    let mut incs = Vec::with_capacity(k);
    let mut sum = 0i64;
    let mut prev = budget;
    for _ in 0..k {
        let d = rng.random_range(0..=prev.min(budget - sum));
        incs.push(d);
        sum += d;
        prev = d;
    }
    to_values(&incs)
}

fn to_values(incs: &[i64]) -> Vec<Rational> {
    let mut vals = Vec::with_capacity(incs.len() + 1);
    let mut acc = 0i64;
    vals.push(Rational::from_integer(0.into()));
    for &d in incs {
        acc += d;
        vals.push(Rational::from_integer(acc.into()));
    }
    vals
}
