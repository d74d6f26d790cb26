//! LP certificate toolkit: the permutation separation oracle, feasibility
//! checking, sweep rounding of fractional solutions, and LP model export.
//!
//! The LP maximizes `sum_e y_e` subject to `sum_v x_v <= 1`,
//! non-negativity, and for every edge and every ordering `pi` of its
//! vertices `sum_i (f_e(i) - f_e(i-1)) x_{pi(i)} >= y_e`. The ordering
//! family is factorial-sized but separable in `O(|e| log |e|)`: with a
//! convex table, pairing the largest `x` values with the smallest
//! increments minimizes the left-hand side. Solving the LP itself is
//! delegated: the flow solver already produces exact optima, and the
//! export lets external solvers consume the model.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::{better_candidate, Algorithm, Solution, WeightedHypergraph};
use crate::rational::{format_exact, Rational};

/// A fractional LP point: one coordinate per vertex and per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
}

impl FractionalSolution {
    /// The canonical feasible point supported on `S`: `x_v = 1/|S|` on
    /// `S`, `y_e = f_e(|e ∩ S|) / |S|`. Its objective equals the density
    /// of `S`.
    pub fn uniform_on(h: &WeightedHypergraph, s: &[u32]) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        let size = Rational::from_integer(s.len().into());
        let mut x = vec![Rational::zero(); h.vertex_count()];
        for &v in s {
            if v as usize >= h.vertex_count() {
                return Err(Error::Validation(format!("vertex {v} out of range")));
            }
            x[v as usize] = Rational::one() / &size;
        }
        let y = h
            .graph()
            .edges()
            .iter()
            .zip(h.weights())
            .map(|(edge, w)| {
                let c = edge.iter().filter(|v| s.contains(v)).count();
                w.value(c) / &size
            })
            .collect();
        Ok(FractionalSolution { x, y })
    }

    pub fn objective(&self) -> Rational {
        self.y.iter().sum()
    }
}

/// Minimum of `sum_i (f_e(i) - f_e(i-1)) x_{pi(i)}` over all orderings of
/// edge `e`, with the minimizing ordering as witness: the edge's vertices
/// sorted by `x` in non-increasing order (ties by id).
pub fn separate(
    h: &WeightedHypergraph,
    x: &[Rational],
    edge: usize,
) -> Result<(Rational, Vec<u32>)> {
    if x.len() != h.vertex_count() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} entries, instance has {} vertices",
            x.len(),
            h.vertex_count()
        )));
    }
    let w = h.weight(edge);
    if !w.is_convex() {
        return Err(Error::NotConvex { edge });
    }
    let mut order: Vec<u32> = h.graph().edge(edge).to_vec();
    order.sort_by(|&a, &b| {
        x[b as usize]
            .cmp(&x[a as usize])
            .then(a.cmp(&b))
    });
    let mut value = Rational::zero();
    for (i, &v) in order.iter().enumerate() {
        value += w.increment(i + 1) * &x[v as usize];
    }
    Ok((value, order))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible,
    Infeasible(Violation),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NegativeX { vertex: u32 },
    NegativeY { edge: usize },
    SimplexExceeded { total: Rational },
    /// Some ordering of `edge` pushes the left-hand side below `y_e`;
    /// `witness` is the minimizing ordering.
    EdgeBound {
        edge: usize,
        min_value: Rational,
        witness: Vec<u32>,
    },
}

/// Check a fractional point against every LP constraint, reporting the
/// first violation with a witness.
pub fn check_feasible(h: &WeightedHypergraph, sol: &FractionalSolution) -> Result<Feasibility> {
    if sol.x.len() != h.vertex_count() || sol.y.len() != h.edge_count() {
        return Err(Error::DimensionMismatch(format!(
            "solution has {} x / {} y, instance needs {} / {}",
            sol.x.len(),
            sol.y.len(),
            h.vertex_count(),
            h.edge_count()
        )));
    }
    for (v, xv) in sol.x.iter().enumerate() {
        if xv.is_negative() {
            return Ok(Feasibility::Infeasible(Violation::NegativeX {
                vertex: v as u32,
            }));
        }
    }
    for (e, ye) in sol.y.iter().enumerate() {
        if ye.is_negative() {
            return Ok(Feasibility::Infeasible(Violation::NegativeY { edge: e }));
        }
    }
    let total: Rational = sol.x.iter().sum();
    if total > Rational::one() {
        return Ok(Feasibility::Infeasible(Violation::SimplexExceeded {
            total,
        }));
    }
    for e in 0..h.edge_count() {
        let (min_value, witness) = separate(h, &sol.x, e)?;
        if min_value < sol.y[e] {
            return Ok(Feasibility::Infeasible(Violation::EdgeBound {
                edge: e,
                min_value,
                witness,
            }));
        }
    }
    Ok(Feasibility::Feasible)
}

/// Threshold rounding: evaluate `S_r = {v : x_v >= r}` at every distinct
/// positive `x` value and return the densest level set. Applied to an
/// LP-optimal point this recovers an exact optimum.
pub fn sweep_round(h: &WeightedHypergraph, sol: &FractionalSolution) -> Result<Solution> {
    if sol.x.len() != h.vertex_count() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} entries, instance has {} vertices",
            sol.x.len(),
            h.vertex_count()
        )));
    }
    let mut thresholds: Vec<&Rational> = sol.x.iter().filter(|x| x.is_positive()).collect();
    if thresholds.is_empty() {
        return Err(Error::AllZeroX);
    }
    thresholds.sort();
    thresholds.dedup();
    let mut best: Option<(Rational, Vec<u32>)> = None;
    for r in thresholds {
        let level: Vec<u32> = (0..h.vertex_count() as u32)
            .filter(|&v| &sol.x[v as usize] >= r)
            .collect();
        let density = h.density(&level)?;
        let replace = match &best {
            None => true,
            Some((bd, bs)) => better_candidate(&density, &level, bd, bs),
        };
        if replace {
            best = Some((density, level));
        }
    }
    let (density, vertices) = best.expect("at least one threshold");
    Ok(Solution::new(vertices, density, Algorithm::Sweep, 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportMode {
    /// Emit every permutation constraint; only allowed while
    /// `r! * m <= 100_000`.
    Full,
    /// Emit the objective, simplex constraint and bounds, and document
    /// the separation callback for lazy-constraint solvers.
    Callback,
}

const FULL_EXPORT_LIMIT: u128 = 100_000;

/// Render the LP in the standard human-readable LP text format.
/// Constraint coefficients are scaled per edge to integers, so the file
/// is exact.
pub fn export_lp(h: &WeightedHypergraph, mode: ExportMode) -> Result<String> {
    use std::fmt::Write;
    h.require_convex()?;
    if mode == ExportMode::Full {
        let r = h.graph().rank() as u128;
        let mut r_factorial: u128 = 1;
        for i in 2..=r.min(30) {
            r_factorial = r_factorial.saturating_mul(i);
        }
        let constraints = r_factorial.saturating_mul(h.edge_count() as u128);
        if constraints > FULL_EXPORT_LIMIT {
            return Err(Error::LpTooLarge {
                constraints,
                limit: FULL_EXPORT_LIMIT,
            });
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "\\ densest sub-hypergraph LP");
    let _ = writeln!(
        out,
        "\\ variables: x<v> per vertex, y<e> per edge; maximize sum of y"
    );
    if mode == ExportMode::Callback {
        let _ = writeln!(out, "\\");
        let _ = writeln!(
            out,
            "\\ lazy constraints: for every edge e and every ordering pi of its"
        );
        let _ = writeln!(
            out,
            "\\ vertices, sum_i (f_e(i) - f_e(i-1)) * x_pi(i) >= y_e must hold."
        );
        let _ = writeln!(
            out,
            "\\ separation callback: given a candidate x, sort the x values of"
        );
        let _ = writeln!(
            out,
            "\\ each edge in non-increasing order and pair them with the weight"
        );
        let _ = writeln!(
            out,
            "\\ increments in index order; if that minimum drops below y_e, add"
        );
        let _ = writeln!(
            out,
            "\\ the corresponding ordering's constraint and resolve."
        );
    }
    let _ = writeln!(out, "Maximize");
    let obj = (0..h.edge_count())
        .map(|e| format!("y{e}"))
        .collect::<Vec<_>>()
        .join(" + ");
    let _ = writeln!(out, " obj: {}", if obj.is_empty() { "0".into() } else { obj });
    let _ = writeln!(out, "Subject To");
    let simplex = (0..h.vertex_count())
        .map(|v| format!("x{v}"))
        .collect::<Vec<_>>()
        .join(" + ");
    let _ = writeln!(out, " simplex: {simplex} <= 1");
    if mode == ExportMode::Full {
        for (e, (edge, w)) in h.graph().edges().iter().zip(h.weights()).enumerate() {
            // scale this edge's increments to integers
            let scale = w
                .values()
                .iter()
                .fold(num_bigint::BigInt::one(), |acc, v| {
                    num_integer::Integer::lcm(&acc, v.denom())
                });
            let coeff: Vec<num_bigint::BigInt> = (1..=edge.len())
                .map(|i| (w.increment(i) * Rational::from_integer(scale.clone())).to_integer())
                .collect();
            for (p, perm) in permutations(edge).into_iter().enumerate() {
                let lhs = perm
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| format!("{} x{v}", coeff[i]))
                    .collect::<Vec<_>>()
                    .join(" + ");
                let _ = writeln!(out, " e{e}_p{p}: {lhs} - {scale} y{e} >= 0");
            }
        }
    }
    let _ = writeln!(out, "Bounds");
    for v in 0..h.vertex_count() {
        let _ = writeln!(out, " x{v} >= 0");
    }
    for e in 0..h.edge_count() {
        let _ = writeln!(out, " y{e} >= 0");
    }
    let _ = writeln!(out, "End");
    Ok(out)
}

/// All orderings of a slice, in a deterministic order.
pub(crate) fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
    let mut result = Vec::new();
    let mut current = items.to_vec();
    heaps(&mut current, items.len(), &mut result);
    result
}

fn heaps(items: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heaps(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

/// Value of `sum_i (f_e(i) - f_e(i-1)) x_{pi(i)}` for one explicit
/// ordering; exposed for cross-checking the oracle against enumeration.
pub fn ordering_value(
    h: &WeightedHypergraph,
    x: &[Rational],
    edge: usize,
    ordering: &[u32],
) -> Rational {
    let w = h.weight(edge);
    ordering
        .iter()
        .enumerate()
        .map(|(i, &v)| w.increment(i + 1) * &x[v as usize])
        .sum()
}

/// Convenience for reporting: exact objective string of a fractional
/// point.
pub fn objective_string(sol: &FractionalSolution) -> String {
    format_exact(&sol.objective())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Hypergraph, WeightFn};
    use crate::oracle::{brute_force, random_instance, ShapeClass};
    use crate::rational::{int, ratio};

    fn table(vals: &[i64]) -> WeightFn {
        WeightFn::from_values(vals.iter().map(|&v| int(v)).collect()).unwrap()
    }

    fn instance(n: usize, edges: Vec<Vec<u32>>, tables: Vec<WeightFn>) -> WeightedHypergraph {
        WeightedHypergraph::new(Hypergraph::new(n, edges).unwrap(), tables).unwrap()
    }

    #[test]
    fn separate_pairs_large_x_with_small_increments() {
        let h = instance(2, vec![vec![0, 1]], vec![table(&[0, 1, 3])]);
        let x = vec![ratio(1, 2), ratio(1, 4)];
        let (value, witness) = separate(&h, &x, 0).unwrap();
        assert_eq!(value, int(1)); // 1 * 1/2 + 2 * 1/4
        assert_eq!(witness, vec![0, 1]);
        assert_eq!(ordering_value(&h, &x, 0, &[1, 0]), ratio(5, 4));
    }

    #[test]
    fn separate_uniform_identity() {
        // x uniform 1/k on S containing e entirely: minimum is f_e(|e|)/k
        let h = instance(5, vec![vec![1, 2, 3]], vec![table(&[0, 1, 3, 7])]);
        for s in [vec![1, 2, 3], vec![0, 1, 2, 3, 4]] {
            let sol = FractionalSolution::uniform_on(&h, &s).unwrap();
            let (value, _) = separate(&h, &sol.x, 0).unwrap();
            assert_eq!(value, ratio(7, s.len() as i64));
        }
        let zero = vec![int(0); 5];
        assert_eq!(separate(&h, &zero, 0).unwrap().0, int(0));
    }

    #[test]
    fn separate_matches_enumeration() {
        use rand::prelude::*;
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for seed in 0..20u64 {
            let h = random_instance(seed, 6, 4, 5, ShapeClass::Convex, 7).unwrap();
            let x: Vec<Rational> = (0..6)
                .map(|_| ratio(rng.random_range(0..6), rng.random_range(1..5)))
                .collect();
            for e in 0..h.edge_count() {
                let (value, witness) = separate(&h, &x, e).unwrap();
                let brute = permutations(h.graph().edge(e))
                    .into_iter()
                    .map(|p| ordering_value(&h, &x, e, &p))
                    .min()
                    .unwrap();
                assert_eq!(value, brute, "seed {seed} edge {e}");
                assert_eq!(ordering_value(&h, &x, e, &witness), value);
            }
        }
    }

    #[test]
    fn separate_requires_convexity() {
        let h = instance(2, vec![vec![0, 1]], vec![table(&[0, 2, 3])]);
        assert!(matches!(
            separate(&h, &[int(1), int(0)], 0),
            Err(Error::NotConvex { edge: 0 })
        ));
    }

    #[test]
    fn uniform_construction_is_feasible_with_density_objective() {
        for seed in 0..15u64 {
            let h = random_instance(seed + 40, 6, 5, 3, ShapeClass::Convex, 8).unwrap();
            for mask in [0b101u32, 0b111, 0b110101] {
                let s: Vec<u32> = (0..6).filter(|&v| mask >> v & 1 == 1).collect();
                let sol = FractionalSolution::uniform_on(&h, &s).unwrap();
                assert_eq!(check_feasible(&h, &sol).unwrap(), Feasibility::Feasible);
                assert_eq!(sol.objective(), h.density(&s).unwrap());
            }
        }
    }

    #[test]
    fn infeasibility_witnesses() {
        let h = instance(2, vec![vec![0, 1]], vec![table(&[0, 1, 3])]);
        let sol = FractionalSolution {
            x: vec![int(0), int(0)],
            y: vec![int(1)],
        };
        match check_feasible(&h, &sol).unwrap() {
            Feasibility::Infeasible(Violation::EdgeBound { edge: 0, .. }) => {}
            other => panic!("expected edge violation, got {other:?}"),
        }
        let sol = FractionalSolution {
            x: vec![int(1), int(1)],
            y: vec![int(0)],
        };
        assert!(matches!(
            check_feasible(&h, &sol).unwrap(),
            Feasibility::Infeasible(Violation::SimplexExceeded { .. })
        ));
        let sol = FractionalSolution {
            x: vec![ratio(1, 2), ratio(1, 2)],
            y: vec![int(0)],
        };
        assert_eq!(check_feasible(&h, &sol).unwrap(), Feasibility::Feasible);
        let bad = FractionalSolution {
            x: vec![int(0)],
            y: vec![],
        };
        assert!(check_feasible(&h, &bad).is_err());
    }

    #[test]
    fn weak_duality_rejects_inflated_objectives() {
        for seed in 0..15u64 {
            let h = random_instance(seed + 70, 6, 4, 3, ShapeClass::Convex, 8).unwrap();
            if h.psi().is_zero() {
                continue;
            }
            let oracle = brute_force(&h).unwrap();
            let sol = FractionalSolution::uniform_on(&h, &oracle.best_set).unwrap();
            // inflate y uniformly so the objective exceeds the optimum
            let factor = (&oracle.best_density + int(1)) / &oracle.best_density;
            let inflated = FractionalSolution {
                x: sol.x.clone(),
                y: sol.y.iter().map(|y| y * &factor).collect(),
            };
            assert!(inflated.objective() > oracle.best_density);
            assert!(matches!(
                check_feasible(&h, &inflated).unwrap(),
                Feasibility::Infeasible(_)
            ));
        }
    }

    #[test]
    fn sweep_round_examples() {
        let h = instance(3, vec![vec![0, 1, 2]], vec![table(&[0, 1, 4, 9])]);
        let sol = FractionalSolution::uniform_on(&h, &[0, 1, 2]).unwrap();
        let rounded = sweep_round(&h, &sol).unwrap();
        assert_eq!(rounded.vertices, vec![0, 1, 2]);
        assert_eq!(rounded.density, int(3));

        // triangle + pendant: thresholds 1/2 and 1/4 pick the triangle
        let edges = vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 3]];
        let tables = (0..4)
            .map(|_| WeightFn::all_or_nothing(int(1), 2).unwrap())
            .collect();
        let h = instance(4, edges, tables);
        let sol = FractionalSolution {
            x: vec![ratio(1, 2), ratio(1, 4), ratio(1, 4), int(0)],
            y: vec![int(0); 4],
        };
        let rounded = sweep_round(&h, &sol).unwrap();
        assert_eq!(rounded.vertices, vec![0, 1, 2]);
        assert_eq!(rounded.density, int(1));

        let single = FractionalSolution {
            x: vec![int(0), int(1), int(0), int(0)],
            y: vec![int(0); 4],
        };
        assert_eq!(sweep_round(&h, &single).unwrap().vertices, vec![1]);
        let zero = FractionalSolution {
            x: vec![int(0); 4],
            y: vec![int(0); 4],
        };
        assert!(matches!(sweep_round(&h, &zero), Err(Error::AllZeroX)));
    }

    #[test]
    fn sweep_recovers_oracle_optimum_from_uniform_construction() {
        for seed in 0..20u64 {
            let h = random_instance(seed + 90, 7, 5, 3, ShapeClass::Convex, 8).unwrap();
            let oracle = brute_force(&h).unwrap();
            let sol = FractionalSolution::uniform_on(&h, &oracle.best_set).unwrap();
            let rounded = sweep_round(&h, &sol).unwrap();
            assert_eq!(rounded.density, oracle.best_density, "seed {seed}");
        }
    }

    #[test]
    fn export_counts() {
        let h = instance(3, vec![vec![0, 1, 2]], vec![table(&[0, 1, 4, 9])]);
        let full = export_lp(&h, ExportMode::Full).unwrap();
        assert_eq!(full.lines().filter(|l| l.trim_start().starts_with("e0_p")).count(), 6);
        assert!(full.contains("simplex: x0 + x1 + x2 <= 1"));

        let callback = export_lp(&h, ExportMode::Callback).unwrap();
        assert!(callback.contains("separation callback"));
        assert!(!callback.contains("e0_p0"));

        // r = 8, m = 100 in full mode exceeds the limit
        let edges: Vec<Vec<u32>> = (0..100u32).map(|i| (i % 12..i % 12 + 8).collect()).collect();
        let tables = (0..100).map(|_| WeightFn::linear(int(1), 8).unwrap()).collect();
        let big = instance(20, edges, tables);
        assert!(matches!(
            export_lp(&big, ExportMode::Full),
            Err(Error::LpTooLarge { .. })
        ));
        assert!(export_lp(&big, ExportMode::Callback).is_ok());
    }
}
