use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rational::{self, Rational};

use super::combination::AlphaConvexCombination;
use super::context::{check_conditions, term_degree, PackingContext};

/// Packs mass `t` of edge `e` into a combination for `x'` (described by
/// `before`) so that it becomes a combination for `x = x' + tχ_e`
/// (described by `after`) that still satisfies conditions (i) and (ii).
///
/// For every `v ∈ e` a blocked set `Q_v` is chosen according to how the
/// degree at `v` moves from `(Ax')_v` to `(Ax)_v`; the mass `t` then goes
/// into unblocked terms in index order. The conditions are re-checked
/// exactly before returning.
pub fn modified_packing_step(
    h: &Hypergraph,
    comb: &mut AlphaConvexCombination,
    e: usize,
    t: &Rational,
    before: &PackingContext,
    after: &PackingContext,
) -> Result<()> {
    if !t.is_positive() || *t > Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "packing target {t} must lie in (0, 1]"
        )));
    }
    if !before.target.values[e].is_zero() || after.target.values[e] != *t {
        return Err(Error::invariant(
            format!("contexts do not describe x = x' + {t}·χ_{e}"),
            comb.dump(),
        ));
    }

    let mut blocked = vec![false; comb.len()];
    for &v in h.edge(e) {
        let old = &before.degree[v];
        let new = &after.degree[v];
        if old.is_zero() {
            // Case I: nothing at v yet.
            continue;
        }
        if before.ceiling[v] == after.ceiling[v] {
            // Case II: terms already at the ceiling cannot take e.
            let ceiling = &after.ceiling[v];
            for (i, term) in comb.terms().iter().enumerate() {
                if BigInt::from(term_degree(h, &term.solution, v)) == *ceiling {
                    blocked[i] = true;
                }
            }
            continue;
        }
        // Case III: the ceiling rises by one.
        if rational::is_integral(old) || rational::is_integral(new) {
            continue;
        }
        let old_ceiling = &before.ceiling[v];
        let mut needed = Rational::one() - t;
        let mut i = 0;
        while i < comb.len() && needed.is_positive() {
            let term = &comb.terms()[i];
            if BigInt::from(term_degree(h, &term.solution, v)) != *old_ceiling {
                i += 1;
                continue;
            }
            if term.lambda <= needed {
                needed -= &term.lambda;
                blocked[i] = true;
            } else {
                comb.split_term(i, &needed)?;
                // The remainder inherits whatever other vertices decided.
                blocked.insert(i + 1, blocked[i]);
                blocked[i] = true;
                needed = Rational::zero();
            }
            i += 1;
        }
    }

    let eligible: Vec<bool> = blocked.iter().map(|b| !b).collect();
    comb.pack_into(e, t, &eligible).map_err(|err| match err {
        Error::InsufficientMass { needed, available } => Error::invariant(
            format!("modified packing of edge {e} needs {needed} but only {available} is unblocked"),
            format!("{}\nblocked = {blocked:?}", comb.dump()),
        ),
        other => other,
    })?;
    check_conditions(h, comb, after)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{FractionalSolution, IntegralSolution};
    use crate::packing::Term;
    use crate::rational::{int, ratio};

    fn fractional(values: Vec<Rational>) -> FractionalSolution {
        FractionalSolution { values }
    }

    #[test]
    fn case_one_everywhere() {
        // Single 3-edge, x' = 0, t = 1/3, ρ = 7/3.
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let mut comb = AlphaConvexCombination::trivial(ratio(7, 3), 1).unwrap();
        let before = PackingContext::new(&h, FractionalSolution::zeros(1));
        let after = PackingContext::new(&h, fractional(vec![ratio(1, 3)]));
        modified_packing_step(&h, &mut comb, 0, &ratio(1, 3), &before, &after).unwrap();
        assert_eq!(comb.len(), 2);
        assert_eq!(comb.terms()[0].lambda, ratio(1, 3));
        assert_eq!(comb.terms()[0].solution.multiplicities, vec![1]);
        // Mass at degree 1 is 1/3 = <1/3> at each vertex.
        for v in 0..3 {
            assert_eq!(after.fraction[v], ratio(1, 3));
        }
    }

    #[test]
    fn case_three_limits_mass_at_new_ceiling() {
        // Vertex 0 carries edges 0, 1, 2 with b = 2. x' = (1/4, 1/2, 0):
        // (Ax')_0 = 3/4; packing 1/2 of edge 2 gives (Ax)_0 = 5/4.
        let h = Hypergraph::new(1, vec![vec![0], vec![0], vec![0]]).unwrap();
        let x_before = fractional(vec![ratio(1, 4), ratio(1, 2), int(0)]);
        let x_after = fractional(vec![ratio(1, 4), ratio(1, 2), ratio(1, 2)]);
        // A 1-combination (exact convex combination) satisfying (i)/(ii) for x'.
        let terms = vec![
            Term { lambda: ratio(1, 4), solution: IntegralSolution::from_edges(3, &[0]) },
            Term { lambda: ratio(1, 2), solution: IntegralSolution::from_edges(3, &[1]) },
            Term { lambda: ratio(1, 4), solution: IntegralSolution::zeros(3) },
        ];
        let mut comb = AlphaConvexCombination::from_terms(3, terms).unwrap();
        let before = PackingContext::new(&h, x_before);
        let after = PackingContext::new(&h, x_after);
        check_conditions(&h, &comb, &before).unwrap();
        // ρ = 1 leaves no slack, so only the Q_v bookkeeping decides.
        modified_packing_step(&h, &mut comb, 2, &ratio(1, 2), &before, &after).unwrap();
        let at_two = comb
            .terms()
            .iter()
            .filter(|t| term_degree(&h, &t.solution, 0) == 2)
            .fold(int(0), |acc, t| acc + &t.lambda);
        assert!(at_two <= ratio(1, 4));
        check_conditions(&h, &comb, &after).unwrap();
    }

    #[test]
    fn integral_old_degree_allows_any_packing() {
        // b = 2 at vertex 0: (Ax')_0 = 1 exactly, t = 1/2.
        let h = Hypergraph::new(1, vec![vec![0], vec![0], vec![0]]).unwrap();
        let before_x = fractional(vec![ratio(1, 2), ratio(1, 2), int(0)]);
        let after_x = fractional(vec![ratio(1, 2), ratio(1, 2), ratio(1, 2)]);
        let before = PackingContext::new(&h, before_x);
        let after = PackingContext::new(&h, after_x);
        let terms = vec![
            Term { lambda: ratio(1, 2), solution: IntegralSolution::from_edges(3, &[0]) },
            Term { lambda: ratio(1, 2), solution: IntegralSolution::from_edges(3, &[1]) },
            Term { lambda: int(1), solution: IntegralSolution::zeros(3) },
        ];
        // Every ordering of the terms yields a different packing; all are valid.
        let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for order in orders {
            let ts: Vec<Term> = order.iter().map(|&i| terms[i].clone()).collect();
            let mut comb = AlphaConvexCombination::from_terms(3, ts).unwrap();
            check_conditions(&h, &comb, &before).unwrap();
            modified_packing_step(&h, &mut comb, 2, &ratio(1, 2), &before, &after).unwrap();
            assert_eq!(comb.mass(), int(2));
        }
    }

    #[test]
    fn rejects_out_of_range_target() {
        let h = Hypergraph::new(1, vec![vec![0]]).unwrap();
        let mut comb = AlphaConvexCombination::trivial(int(1), 1).unwrap();
        let ctx = PackingContext::new(&h, FractionalSolution::zeros(1));
        assert!(modified_packing_step(&h, &mut comb, 0, &int(0), &ctx, &ctx).is_err());
        assert!(modified_packing_step(&h, &mut comb, 0, &int(2), &ctx, &ctx).is_err());
    }
}
