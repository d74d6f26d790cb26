//! Exact and (1-eps)-approximate density search on top of the flow
//! gadget.
//!
//! Both solvers drive the same feasibility test: at parameter `lambda`,
//! the minimum cut drops below `psi * scale` exactly when some nonempty
//! set has density strictly above `lambda`. The exact solver bisects the
//! parameter until the interval is too narrow to contain two distinct
//! achievable densities; the approximate solver shrinks `ub/lb`
//! geometrically.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::flow::{build_network, min_cut, solve_network, CutVariant};
use crate::instance::{Algorithm, Solution, WeightedHypergraph};
use crate::rational::{format_exact, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    RaiseLb,
    LowerUb,
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub lambda: Rational,
    pub cut_value: BigInt,
    pub branch: Branch,
}

/// Record of a parameter search: one entry per min-cut probe, the
/// `(lb, ub)` bracket after each iteration, and the final bracket.
/// `lb` never decreases and `ub` never increases across the trace.
#[derive(Debug, Clone)]
pub struct SearchTrace {
    pub steps: Vec<TraceStep>,
    pub brackets: Vec<(Rational, Rational)>,
    pub final_lb: Rational,
    pub final_ub: Rational,
}

impl SearchTrace {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "iterations": self.steps.iter().map(|s| json!({
                "lambda": format_exact(&s.lambda),
                "cut_value": s.cut_value.to_string(),
                "branch": match s.branch {
                    Branch::RaiseLb => "raise_lb",
                    Branch::LowerUb => "lower_ub",
                },
            })).collect::<Vec<_>>(),
            "final_lb": format_exact(&self.final_lb),
            "final_ub": format_exact(&self.final_ub),
        })
    }
}

struct ProbeOutcome {
    cut_value: BigInt,
    /// True when some nonempty set has density strictly above lambda.
    feasible: bool,
}

fn probe(h: &WeightedHypergraph, lambda: &Rational) -> Result<ProbeOutcome> {
    let net = build_network(h, lambda)?;
    let cut = min_cut(&net, CutVariant::MinimalSource);
    let psi_scaled = net.scaled_psi(h);
    Ok(ProbeOutcome {
        feasible: cut.cut_value < psi_scaled,
        cut_value: cut.cut_value,
    })
}

/// Extract the vertex set of the largest minimizer of
/// `lambda |S| - F(S)`.
fn extract(h: &WeightedHypergraph, lambda: &Rational) -> Result<Vec<u32>> {
    let net = build_network(h, lambda)?;
    Ok(min_cut(&net, CutVariant::MaximalSource).source_side_vertices)
}

/// Least common multiple of all weight-table denominators: after scaling
/// by this, every f value is an integer.
fn weight_denominator_lcm(h: &WeightedHypergraph) -> BigInt {
    let mut d = BigInt::one();
    for w in h.weights() {
        for v in w.values() {
            d = d.lcm(v.denom());
        }
    }
    d
}

/// Exact solver: binary search over the density parameter.
///
/// With weights scaled to integers by their common denominator `D`, two
/// distinct achievable densities differ by at least `1 / (D n (n-1))`,
/// so the bisection stops once the bracket is narrower than that and the
/// minimizer at `lb` is exactly optimal. Ties between optimal sets
/// resolve to the smallest, lexicographically first one via the
/// minimum-cut structure at the optimal density.
pub fn solve_exact(h: &WeightedHypergraph) -> Result<(Solution, SearchTrace)> {
    let n = h.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    h.require_convex()?;
    let mut trace = SearchTrace {
        steps: Vec::new(),
        brackets: Vec::new(),
        final_lb: Rational::zero(),
        final_ub: h.psi().clone(),
    };
    if h.psi().is_zero() {
        // every density is zero; the tie-break picks the first singleton
        let sol = Solution::new(vec![0], Rational::zero(), Algorithm::Flow, 0);
        return Ok((sol, trace));
    }
    if n == 1 {
        let density = h.induced_weight(&[0])?;
        trace.final_lb = density.clone();
        trace.final_ub = density.clone();
        let sol = Solution::new(vec![0], density, Algorithm::Flow, 0);
        return Ok((sol, trace));
    }

    let d = weight_denominator_lcm(h);
    let separation = Rational::new(BigInt::one(), &d * BigInt::from(n * (n - 1)));
    let mut lb = Rational::zero();
    let mut ub = h.psi().clone();
    while &ub - &lb >= separation {
        let lambda = (&lb + &ub) / Rational::from_integer(2.into());
        let outcome = probe(h, &lambda)?;
        let branch = if outcome.feasible {
            lb = lambda.clone();
            Branch::RaiseLb
        } else {
            ub = lambda.clone();
            Branch::LowerUb
        };
        trace.steps.push(TraceStep {
            lambda,
            cut_value: outcome.cut_value,
            branch,
        });
        trace.brackets.push((lb.clone(), ub.clone()));
    }
    trace.final_lb = lb.clone();
    trace.final_ub = ub.clone();

    // lb sits strictly below the optimum and within the separation gap,
    // so the largest minimizer at lb is a maximum-density set
    let largest = extract(h, &lb)?;
    debug_assert!(!largest.is_empty());
    let density = h.density(&largest)?;
    let vertices = smallest_optimal_set(h, &density, largest)?;
    let iterations = trace.steps.len() as u64;
    let sol = Solution::new(vertices, density, Algorithm::Flow, iterations).with_extras(json!({
        "final_lb": format_exact(&trace.final_lb),
        "final_ub": format_exact(&trace.final_ub),
    }));
    Ok((sol, trace))
}

/// Among all maximum-density sets, find the smallest (then
/// lexicographically first). At `lambda = optimum` the minimum-cut source
/// sides form a lattice whose members are exactly the optimal sets plus
/// the empty set; the minimal member containing a vertex `v` is the
/// residual reachability closure of `v`, so scanning all vertices yields
/// every inclusion-minimal optimal set.
fn smallest_optimal_set(
    h: &WeightedHypergraph,
    optimum: &Rational,
    fallback: Vec<u32>,
) -> Result<Vec<u32>> {
    let net = build_network(h, optimum)?;
    let (solver, _value) = solve_network(&net);
    let t_side = solver.reaching(net.sink as usize);
    let base = solver.reachable_from(net.source as usize);
    let mut best: Option<Vec<u32>> = None;
    for v in 0..h.vertex_count() as u32 {
        let node = net.vertex_node(v) as usize;
        if t_side[node] || base[node] {
            // on the sink side of every min cut, or already covered by
            // the closure of the source (impossible for vertex nodes)
            continue;
        }
        let mut side = base.clone();
        solver.close_over(&mut side, node);
        let candidate: Vec<u32> = (0..net.node_count as u32)
            .filter(|&nd| side[nd as usize])
            .filter_map(|nd| net.vertex_of_node(nd))
            .collect();
        debug_assert_eq!(&h.density(&candidate)?, optimum);
        let replace = match &best {
            None => true,
            Some(b) => (candidate.len(), &candidate) < (b.len(), b),
        };
        if replace {
            best = Some(candidate);
        }
    }
    Ok(best.unwrap_or(fallback))
}

/// `(1-eps)`-approximation: geometric search that shrinks `ub/lb` by a
/// square root per iteration, starting from the densest single edge.
///
/// The geometric mean is irrational in general, so each iteration works
/// on a rational grid fine enough (step at most `eps/4 * lb`) that
/// probing the two grid points around `sqrt(lb * ub)` either shrinks the
/// ratio to at most its square root or pins the optimum inside one grid
/// cell, which already satisfies the stopping rule.
pub fn solve_eps(h: &WeightedHypergraph, eps: &Rational) -> Result<(Solution, SearchTrace)> {
    if h.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    h.require_convex()?;
    if !(eps > &Rational::zero() && eps < &Rational::one()) {
        return Err(Error::InvalidEpsilon(format!(
            "flow-eps needs eps in (0, 1), got {eps}"
        )));
    }
    let heaviest = (0..h.edge_count()).max_by(|&a, &b| {
        h.weight(a).top().cmp(h.weight(b).top())
    });
    let mut lb = match heaviest {
        Some(e) if !h.weight(e).top().is_zero() => {
            h.weight(e).top() / Rational::from_integer(h.graph().edge(e).len().into())
        }
        _ => return Err(Error::ZeroWeights),
    };
    let mut ub = h.psi().clone();
    let one_minus_eps = Rational::one() - eps;

    let mut trace = SearchTrace {
        steps: Vec::new(),
        brackets: Vec::new(),
        final_lb: lb.clone(),
        final_ub: ub.clone(),
    };
    let mut iterations: u64 = 0;
    while lb < &one_minus_eps * &ub {
        iterations += 1;
        let grid = grid_denominator(eps, &lb);
        let (lo, hi) = sqrt_bracket(&lb, &ub, &grid);
        let mut record = |lambda: &Rational, outcome: &ProbeOutcome, branch: Branch| {
            trace.steps.push(TraceStep {
                lambda: lambda.clone(),
                cut_value: outcome.cut_value.clone(),
                branch,
            });
        };
        if lo > lb {
            let at_lo = probe(h, &lo)?;
            if !at_lo.feasible {
                record(&lo, &at_lo, Branch::LowerUb);
                ub = lo;
            } else {
                let at_hi = probe(h, &hi)?;
                record(&lo, &at_lo, Branch::RaiseLb);
                if at_hi.feasible {
                    record(&hi, &at_hi, Branch::RaiseLb);
                    lb = hi;
                } else {
                    // optimum pinned inside (lo, hi]: bracket it and stop
                    record(&hi, &at_hi, Branch::LowerUb);
                    lb = lo;
                    ub = hi;
                }
            }
        } else {
            // sqrt(lb * ub) fell within one grid step of lb
            let at_hi = probe(h, &hi)?;
            if at_hi.feasible {
                record(&hi, &at_hi, Branch::RaiseLb);
                lb = hi;
            } else {
                record(&hi, &at_hi, Branch::LowerUb);
                ub = hi;
            }
        }
        trace.brackets.push((lb.clone(), ub.clone()));
    }
    trace.final_lb = lb.clone();
    trace.final_ub = ub.clone();

    let vertices = extract(h, &lb)?;
    debug_assert!(!vertices.is_empty());
    let density = h.density(&vertices)?;
    let sol = Solution::new(vertices, density, Algorithm::FlowEps, iterations).with_extras(json!({
        "eps": format_exact(eps),
        "final_lb": format_exact(&trace.final_lb),
        "final_ub": format_exact(&trace.final_ub),
    }));
    Ok((sol, trace))
}

/// Power-of-two grid denominator `q` with `1/q <= eps/4 * lb`.
fn grid_denominator(eps: &Rational, lb: &Rational) -> BigInt {
    let bound = Rational::from_integer(4.into()) / (eps * lb);
    let mut q = BigInt::one();
    let target = bound.numer().div_ceil(bound.denom());
    while q < target {
        q <<= 1;
    }
    q
}

/// Grid points `(lo, hi)` with `lo <= sqrt(lb * ub) < hi` and
/// `hi = lo + 1/q`, plus the exact square-shrink guarantees
/// `lo^2 <= lb * ub` and `hi^2 >= lb * ub`.
fn sqrt_bracket(lb: &Rational, ub: &Rational, q: &BigInt) -> (Rational, Rational) {
    let scaled = lb * ub * Rational::from_integer(q * q);
    let floor = scaled.numer().div_floor(scaled.denom());
    let root = floor.sqrt();
    let lo = Rational::new(root.clone(), q.clone());
    let hi = Rational::new(root + 1, q.clone());
    (lo, hi)
}

/// Iteration bound of the geometric search with explicit constants:
/// `ceil(log2(ln(r m) / ln(1 / (1 - eps)))) + 2`.
pub fn eps_iteration_bound(r: usize, m: usize, eps: &Rational) -> u64 {
    let rm = (r.max(1) * m.max(1)) as f64;
    let eps = eps.to_f64().expect("eps fits in f64");
    let ratio = rm.ln() / (1.0 / (1.0 - eps)).ln();
    if ratio <= 1.0 {
        return 2;
    }
    ratio.log2().ceil() as u64 + 2
}
