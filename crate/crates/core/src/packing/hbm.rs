use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hypergraph::{min_nonzero_degree_vertex, mu, rho, FractionalSolution, Hypergraph};
use crate::linalg;
use crate::rational::Rational;

use super::combination::AlphaConvexCombination;
use super::context::PackingContext;
use super::modified::modified_packing_step;

/// Result of one HbM run.
#[derive(Clone, Debug)]
pub struct HbmRun {
    pub combination: AlphaConvexCombination,
    /// Edges in the order they were removed; packing happens in reverse.
    pub removal_order: Vec<usize>,
    /// Number of modified packing steps whose conditions were verified.
    pub steps_checked: usize,
}

/// Writes `x` (with `0 < x_e < 1` exactly on `support`, and linearly
/// independent incidence columns there) as a ρ-convex combination of 0/1
/// solutions satisfying `Ax^i ≤ ⌈Ax⌉` and the mass bound at ceiling
/// degrees.
///
/// The recursion is unrolled: repeatedly take a vertex of minimum nonzero
/// degree in the remaining support and remove its incident edge of largest
/// value; then, starting from the trivial combination, pack the removed
/// edges back in reverse order with modified packing steps.
pub fn hbm_core(
    h: &Hypergraph,
    support: &[usize],
    x: &FractionalSolution,
    bipartite: bool,
) -> Result<HbmRun> {
    let m = h.num_edges();
    if x.values.len() != m {
        return Err(Error::DimensionMismatch {
            what: "x",
            expected: m,
            actual: x.values.len(),
        });
    }
    let mut in_support = vec![false; m];
    for &e in support {
        if e >= m || in_support[e] {
            return Err(Error::InvalidParameter(format!("bad support entry {e}")));
        }
        in_support[e] = true;
    }
    for (e, value) in x.values.iter().enumerate() {
        let ok = if in_support[e] {
            *value > Rational::zero() && *value < Rational::one()
        } else {
            value.is_zero()
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "x_{e} = {value} violates 0 < x < 1 on the support and 0 elsewhere"
            )));
        }
    }
    if !linalg::incidence_columns_independent(h, support) {
        return Err(Error::InvalidParameter(
            "incidence columns of the support are linearly dependent".into(),
        ));
    }

    let k = h.k().max(1);
    let bipartite = bipartite && k >= 2;
    let rho = rho(k, bipartite)?;
    let degree_bound = mu(k, bipartite)?;

    let mut live: Vec<usize> = support.to_vec();
    live.sort_unstable();
    let mut removal_order = Vec::with_capacity(live.len());
    while let Some(v) = min_nonzero_degree_vertex(h, &live) {
        debug_assert!(
            h.degrees_in(&live)[v] <= degree_bound,
            "independent columns must leave a vertex of degree ≤ μ"
        );
        let e = h
            .incident(v)
            .iter()
            .copied()
            .filter(|e| live.binary_search(e).is_ok())
            .fold(None::<usize>, |best, e| match best {
                Some(b) if x.values[b] >= x.values[e] => Some(b),
                _ => Some(e),
            })
            .expect("a vertex of nonzero degree has an incident live edge");
        removal_order.push(e);
        live.retain(|&f| f != e);
    }

    let mut comb = AlphaConvexCombination::trivial(rho, m)?;
    let mut current = FractionalSolution::zeros(m);
    let mut before = PackingContext::new(h, current.clone());
    let mut steps_checked = 0;
    for &e in removal_order.iter().rev() {
        current.values[e] = x.values[e].clone();
        let after = PackingContext::new(h, current.clone());
        let t = x.values[e].clone();
        modified_packing_step(h, &mut comb, e, &t, &before, &after)?;
        steps_checked += 1;
        if comb.len() > 1 + (k + 1) * steps_checked {
            return Err(Error::invariant(
                format!("term count {} exceeds 1 + (k+1)·{steps_checked}", comb.len()),
                comb.dump(),
            ));
        }
        for term in comb.terms() {
            if term.solution.multiplicities.iter().any(|&mult| mult > 1) {
                return Err(Error::invariant("term is not a 0/1 solution", comb.dump()));
            }
        }
        before = after;
    }
    comb.check_consistency()?;
    Ok(HbmRun {
        combination: comb,
        removal_order,
        steps_checked,
    })
}
