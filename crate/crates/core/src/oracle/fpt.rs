use alwdr_lp::{is_integral, solve, LpProblem, LpSolution, Status};
use num_traits::{One, Zero};

use super::{OracleError, OracleResult, SearchStats};
use crate::dag::{build_improved_dag, build_refined_dag, path_to_schedule};
use crate::formulations::{build_dual_lp, integral_paths};
use crate::instance::{Instance, SegmentMap};
use crate::Rational;

/// Exact optimum through the horizon-wide improved DAG and its penalty LP.
///
/// `cap` bounds `2^B * |E|`, where B counts slots holding an item that is
/// broadcast again later and E is the refined DAG's edge set.
pub fn fpt_exact(inst: &Instance, delta: usize, cap: u64) -> Result<OracleResult, OracleError> {
    if delta > inst.channels() {
        return Err(OracleError::TooManyAntennae {
            antennae: delta,
            channels: inst.channels(),
        });
    }
    let refined = build_refined_dag(inst);
    let b = inst.recurring_slots() as u32;
    let budget = 1u64
        .checked_shl(b)
        .and_then(|x| x.checked_mul(refined.num_edges() as u64));
    if budget.is_none_or(|x| x > cap) {
        return Err(OracleError::CapExceeded {
            what: "2^B * |E|",
            limit: cap,
        });
    }
    let g = build_improved_dag(&refined, &SegmentMap::whole_horizon(inst.slots()));
    let lp = build_dual_lp(&g, delta);
    let mut sol: LpSolution<Rational> = solve(&lp.problem)?;
    if sol.status != Status::Optimal {
        return Err(OracleError::LpStatus(sol.status));
    }
    let mut extra_pivots = 0;
    if !is_integral(&sol, &Rational::zero()) {
        let (fixed, pivots) = integral_vertex(&lp.problem, sol)?;
        sol = fixed;
        extra_pivots = pivots;
    }
    let junction = g.junction.expect("improved DAG keeps the junction");
    let paths = integral_paths(&g, lp.edge_values(&sol.values), junction);
    let mut witness = path_to_schedule(&g, &paths)?;
    witness.antennas.resize(delta, Vec::new());
    Ok(OracleResult {
        optimum: inst.total_weight() - sol.objective,
        witness,
        optimal_count: None,
        stats: SearchStats {
            explored: (sol.pivots + extra_pivots) as u64,
            peak: lp.problem.num_variables() as u64,
        },
    })
}

/// Searches for an integral optimum with the same objective by fixing
/// fractional variables one at a time, first to 1 and otherwise to 0.
fn integral_vertex(
    problem: &LpProblem,
    mut sol: LpSolution<Rational>,
) -> Result<(LpSolution<Rational>, usize), OracleError> {
    let target = sol.objective;
    let mut p = problem.clone();
    let mut pivots = 0;
    while let Some(j) = sol.values.iter().position(|v| !v.is_integer()) {
        let mut found = None;
        for value in [Rational::one(), Rational::zero()] {
            let saved = p.variables[j].clone();
            p.variables[j].lower = value;
            p.variables[j].upper = Some(value);
            let s: LpSolution<Rational> = solve(&p)?;
            pivots += s.pivots;
            if s.status == Status::Optimal && s.objective == target {
                found = Some(s);
                break;
            }
            p.variables[j] = saved;
        }
        sol = found.ok_or(OracleError::NonIntegral)?;
    }
    Ok((sol, pivots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Occurrence;
    use crate::oracle::{brute_force_optimal, Caps};

    fn r(n: i128) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn single_occurrence_needs_no_duplication() {
        let inst = Instance::new(vec![r(4), r(6)], 2, 3, 1, [
            Occurrence::new(1, 1, 1),
            Occurrence::new(2, 2, 3),
        ])
        .unwrap();
        assert_eq!(inst.recurring_slots(), 0);
        let res = fpt_exact(&inst, 1, 1 << 20).unwrap();
        assert_eq!(res.optimum, r(10));
        assert_eq!(res.witness.weight(&inst), r(10));
    }

    #[test]
    fn repeated_item_matches_brute_force() {
        let inst = Instance::new(vec![r(5), r(1), r(2)], 2, 4, 1, [
            Occurrence::new(1, 1, 1),
            Occurrence::new(2, 2, 1),
            Occurrence::new(3, 2, 2),
            Occurrence::new(1, 1, 3),
            Occurrence::new(2, 2, 4),
        ])
        .unwrap();
        let res = fpt_exact(&inst, 1, 1 << 20).unwrap();
        let bf = brute_force_optimal(&inst, 1, &Caps::default()).unwrap();
        assert_eq!(res.optimum, bf.optimum);
        assert!(matches!(fpt_exact(&inst, 1, 4), Err(OracleError::CapExceeded { .. })));
    }
}
