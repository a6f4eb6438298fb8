//! LP relaxations over the auxiliary DAGs and over per-segment path sets.

use alwdr_lp::{LpProblem, Relation, Sense};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dag::{Dag, EdgeKind};
use crate::instance::{conflict_free, Instance, Occurrence, SegmentMap};
use crate::Rational;

fn one() -> Rational {
    Rational::one()
}

fn zero() -> Rational {
    Rational::zero()
}

/// LP whose first `num_edges` variables are the DAG's edges by id.
#[derive(Debug, Clone)]
pub struct FlowLp {
    pub problem: LpProblem,
    pub num_edges: usize,
    /// Source-to-terminal slack arcs that absorb unused antennae.
    pub idle: Vec<usize>,
}

impl FlowLp {
    pub fn edge_values<'a>(&self, values: &'a [Rational]) -> &'a [Rational] {
        &values[..self.num_edges]
    }
}

fn flow_rows(p: &mut LpProblem, g: &Dag, delta: usize, idle: &[usize], idle_target: usize) {
    for v in 0..g.num_vertices() {
        if v == g.sink {
            continue;
        }
        let mut coeffs: Vec<(usize, Rational)> = g
            .out_edges(v)
            .iter()
            .map(|&e| (e, one()))
            .chain(g.in_edges(v).iter().map(|&e| (e, -one())))
            .collect();
        let rhs = if v == g.source {
            coeffs.extend(idle.iter().map(|&x| (x, one())));
            Rational::from_integer(delta as i128)
        } else {
            if v == idle_target {
                coeffs.extend(idle.iter().map(|&x| (x, -one())));
            }
            zero()
        };
        if coeffs.is_empty() && rhs.is_zero() {
            continue;
        }
        p.add_constraint(format!("flow_{v}"), coeffs, Relation::Eq, rhs);
    }
}

/// Edge relaxation over the basic DAG: `delta` units of s–t flow, every
/// edge in [0, 1], each item's occurrence edges summing to at most 1.
pub fn build_edge_lp(g: &Dag, delta: usize) -> FlowLp {
    let mut p = LpProblem::new(Sense::Maximize);
    for e in &g.edges {
        p.add_variable(format!("x{}", e.id), zero(), Some(one()));
        if !e.weight.is_zero() && e.retrieves() {
            p.set_objective(e.id, e.weight);
        }
    }
    let idle: Vec<usize> = (0..delta)
        .map(|a| p.add_variable(format!("idle{a}"), zero(), Some(one())))
        .collect();
    flow_rows(&mut p, g, delta, &idle, g.sink);
    for (i, group) in g.retrieving_edges().iter().enumerate() {
        if group.len() > 1 {
            p.add_constraint(
                format!("item_{}", i + 1),
                group.iter().map(|&e| (e, one())).collect(),
                Relation::Le,
                one(),
            );
        }
    }
    FlowLp {
        problem: p,
        num_edges: g.num_edges(),
        idle,
    }
}

/// Penalty relaxation over a refined or improved DAG: route `delta` units
/// from the source through the penalty chain and pay an item's weight for
/// every unit of its penalty edge. Each item must be covered by its
/// retrieving edges plus its penalty edge.
pub fn build_dual_lp(g: &Dag, delta: usize) -> FlowLp {
    let junction = g.junction.expect("dual LP needs a DAG with a penalty chain");
    let mut p = LpProblem::new(Sense::Minimize);
    for e in &g.edges {
        p.add_variable(format!("x{}", e.id), zero(), Some(one()));
        if e.kind == EdgeKind::VirtualPenalty {
            p.set_objective(e.id, e.cost * e.weight);
        }
    }
    let idle: Vec<usize> = (0..delta)
        .map(|a| p.add_variable(format!("idle{a}"), zero(), Some(one())))
        .collect();
    flow_rows(&mut p, g, delta, &idle, junction);
    let penalties = g.penalty_edges();
    for (i, group) in g.retrieving_edges().iter().enumerate() {
        let mut coeffs: Vec<(usize, Rational)> = group.iter().map(|&e| (e, one())).collect();
        if let Some(pen) = penalties[i] {
            coeffs.push((pen, one()));
        }
        p.add_constraint(format!("cover_{}", i + 1), coeffs, Relation::Ge, one());
    }
    FlowLp {
        problem: p,
        num_edges: g.num_edges(),
        idle,
    }
}

/// Peels unit paths from an integral flow, starting at the source and
/// stopping at `target`. Each step follows the lowest-id unused edge with
/// value 1.
pub fn integral_paths(g: &Dag, edge_values: &[Rational], target: usize) -> Vec<Vec<usize>> {
    let mut left: Vec<bool> = edge_values.iter().map(|v| *v == one()).collect();
    let mut paths = Vec::new();
    loop {
        let mut at = g.source;
        let mut path = Vec::new();
        while at != target {
            let Some(&e) = g.out_edges(at).iter().find(|&&e| left[e]) else {
                break;
            };
            left[e] = false;
            path.push(e);
            at = g.edges[e].head;
        }
        if path.is_empty() {
            return paths;
        }
        paths.push(path);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentPath {
    pub occurrences: Vec<Occurrence>,
    pub weight: Rational,
}

impl SegmentPath {
    pub fn is_empty(&self) -> bool {
        self.occurrences.is_empty()
    }

    pub fn shares_cell(&self, other: &SegmentPath) -> bool {
        self.occurrences
            .iter()
            .any(|a| other.occurrences.iter().any(|b| a.cell() == b.cell()))
    }
}

/// Every conflict-free retrieval sequence inside each segment, with no item
/// twice and the empty sequence first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentPaths {
    pub segments: Vec<Vec<SegmentPath>>,
}

impl SegmentPaths {
    pub fn total(&self) -> usize {
        self.segments.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("path enumeration exceeded the cap of {cap}")]
pub struct PathCapExceeded {
    pub cap: usize,
}

pub fn enumerate_segment_paths(
    inst: &Instance,
    segments: &SegmentMap,
    cap: usize,
) -> Result<SegmentPaths, PathCapExceeded> {
    let mut out = Vec::with_capacity(segments.len());
    let mut count = 0usize;
    for &(first, last) in segments.segments() {
        let occ: Vec<Occurrence> = inst
            .occurrences()
            .iter()
            .copied()
            .filter(|o| o.slot >= first && o.slot <= last)
            .collect();
        let mut paths = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        extend(inst, &occ, 0, &mut stack, &mut paths, &mut count, cap)?;
        out.push(paths);
    }
    Ok(SegmentPaths { segments: out })
}

fn extend(
    inst: &Instance,
    occ: &[Occurrence],
    from: usize,
    stack: &mut Vec<usize>,
    out: &mut Vec<SegmentPath>,
    count: &mut usize,
    cap: usize,
) -> Result<(), PathCapExceeded> {
    *count += 1;
    if *count > cap {
        return Err(PathCapExceeded { cap });
    }
    let path: Vec<Occurrence> = stack.iter().map(|&i| occ[i]).collect();
    out.push(SegmentPath {
        weight: path.iter().map(|o| inst.weight(o.item)).sum(),
        occurrences: path,
    });
    for next in from..occ.len() {
        let o = occ[next];
        let fits = match stack.last() {
            Some(&prev) => conflict_free(&occ[prev], &o),
            None => true,
        };
        if fits && stack.iter().all(|&i| occ[i].item != o.item) {
            stack.push(next);
            extend(inst, occ, next + 1, stack, out, count, cap)?;
            stack.pop();
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct PathLp {
    pub problem: LpProblem,
    /// `(segment, path index)` of each variable.
    pub vars: Vec<(usize, usize)>,
}

impl PathLp {
    /// Per-segment values in the layout of the path set.
    pub fn split(&self, values: &[Rational]) -> Vec<Vec<Rational>> {
        let mut out: Vec<Vec<Rational>> = Vec::new();
        for (&(s, _), v) in self.vars.iter().zip(values) {
            if out.len() <= s {
                out.resize(s + 1, Vec::new());
            }
            out[s].push(*v);
        }
        out
    }
}

/// Path relaxation: per segment, `delta` units spread over its paths (the
/// empty path may take all of them), and each item chosen at most once
/// overall.
pub fn build_path_lp(inst: &Instance, paths: &SegmentPaths, delta: usize) -> PathLp {
    let mut p = LpProblem::new(Sense::Maximize);
    let mut vars = Vec::with_capacity(paths.total());
    let mut per_item: Vec<Vec<usize>> = vec![Vec::new(); inst.num_items()];
    let d = Rational::from_integer(delta as i128);
    for (s, seg) in paths.segments.iter().enumerate() {
        let mut row = Vec::with_capacity(seg.len());
        for (j, path) in seg.iter().enumerate() {
            let ub = if path.is_empty() { d } else { one() };
            let x = p.add_variable(format!("x{s}_{j}"), zero(), Some(ub));
            vars.push((s, j));
            if !path.weight.is_zero() {
                p.set_objective(x, path.weight);
            }
            for o in &path.occurrences {
                per_item[o.item - 1].push(x);
            }
            row.push((x, one()));
        }
        p.add_constraint(format!("segment_{s}"), row, Relation::Eq, d);
    }
    for (i, xs) in per_item.into_iter().enumerate() {
        if !xs.is_empty() {
            p.add_constraint(
                format!("item_{}", i + 1),
                xs.into_iter().map(|x| (x, one())).collect(),
                Relation::Le,
                one(),
            );
        }
    }
    PathLp { problem: p, vars }
}

/// Exact `1 - ((K-1)/K)^K`.
pub fn compute_ratio_bound(k: u32) -> BigRational {
    assert!(k >= 1, "K must be positive");
    let base = BigRational::new(BigInt::from(k - 1), BigInt::from(k));
    BigRational::one() - num_traits::pow(base, k as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::{build_basic_dag, build_refined_dag};
    use crate::instance::segment_map;
    use alwdr_lp::{is_integral, solve, LpSolution, Status};
    use num_traits::ToPrimitive;

    fn r(n: i128) -> Rational {
        Rational::from_integer(n)
    }

    fn single(weight: i128) -> Instance {
        Instance::new(vec![r(weight)], 1, 1, 1, [Occurrence::new(1, 1, 1)]).unwrap()
    }

    #[test]
    fn edge_lp_single_occurrence() {
        let lp = build_edge_lp(&build_basic_dag(&single(5)), 1);
        let sol: LpSolution<Rational> = solve(&lp.problem).unwrap();
        assert_eq!(sol.objective, r(5));
        assert!(is_integral(&sol, &r(0)));
    }

    #[test]
    fn edge_lp_empty_instance() {
        let inst = Instance::new(vec![], 2, 3, 2, []).unwrap();
        let lp = build_edge_lp(&build_basic_dag(&inst), 2);
        let sol: LpSolution<Rational> = solve(&lp.problem).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert_eq!(sol.objective, r(0));
    }

    #[test]
    fn dual_lp_prices_unreachable_items() {
        let inst = single(5);
        let lp = build_dual_lp(&build_refined_dag(&inst), 1);
        let sol: LpSolution<Rational> = solve(&lp.problem).unwrap();
        assert_eq!(sol.objective, r(0));

        let absent = Instance::new(vec![r(5)], 1, 1, 1, []).unwrap();
        let lp = build_dual_lp(&build_refined_dag(&absent), 1);
        let sol: LpSolution<Rational> = solve(&lp.problem).unwrap();
        assert_eq!(sol.objective, r(5));
    }

    #[test]
    fn path_counts() {
        let both = Instance::new(
            vec![r(1), r(2)],
            2,
            1,
            1,
            [Occurrence::new(1, 1, 1), Occurrence::new(2, 2, 1)],
        )
        .unwrap();
        let paths = enumerate_segment_paths(&both, &segment_map(&both), 100).unwrap();
        assert_eq!(paths.segments[0].len(), 3);

        let line = Instance::new(
            vec![r(1), r(2)],
            1,
            2,
            1,
            [Occurrence::new(1, 1, 1), Occurrence::new(2, 1, 2)],
        )
        .unwrap();
        let paths = enumerate_segment_paths(&line, &segment_map(&line), 100).unwrap();
        assert_eq!(paths.segments[0].len(), 4);
        assert!(enumerate_segment_paths(&line, &segment_map(&line), 3).is_err());
    }

    #[test]
    fn path_lp_single_occurrence() {
        let inst = single(4);
        let paths = enumerate_segment_paths(&inst, &segment_map(&inst), 10).unwrap();
        let lp = build_path_lp(&inst, &paths, 1);
        let sol: LpSolution<Rational> = solve(&lp.problem).unwrap();
        assert_eq!(sol.objective, r(4));
        assert_eq!(sol.values, vec![r(0), r(1)]);
    }

    #[test]
    fn path_lp_second_antenna_idles() {
        // Two channels, one occurrence: the second antenna takes the empty path.
        let inst = Instance::new(vec![r(3)], 2, 1, 2, [Occurrence::new(1, 1, 1)]).unwrap();
        let paths = enumerate_segment_paths(&inst, &segment_map(&inst), 10).unwrap();
        let lp = build_path_lp(&inst, &paths, 2);
        let sol: LpSolution<Rational> = solve(&lp.problem).unwrap();
        assert_eq!(sol.objective, r(3));
        assert_eq!(sol.values, vec![r(1), r(1)]);
    }

    #[test]
    fn ratio_bound_values() {
        assert_eq!(
            compute_ratio_bound(2),
            BigRational::new(BigInt::from(3), BigInt::from(4))
        );
        assert!((compute_ratio_bound(3).to_f64().unwrap() - 0.704).abs() < 5e-4);
        assert!((compute_ratio_bound(4).to_f64().unwrap() - 0.684).abs() < 5e-4);
        assert_eq!(compute_ratio_bound(1), BigRational::one());
    }

    #[test]
    fn ratio_bound_decreases_towards_one_minus_inverse_e() {
        let floor = 1.0 - (-1.0f64).exp();
        for k in 2..64 {
            let (a, b) = (compute_ratio_bound(k), compute_ratio_bound(k + 1));
            assert!(b < a, "K={k}");
            assert!(b.to_f64().unwrap() > floor);
        }
    }
}
