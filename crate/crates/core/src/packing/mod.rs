//! Iterated packing: α-convex combinations, (modified) packing steps, the
//! HbM decomposition and the full LP-to-combination pipeline.

mod combination;
mod context;
mod hbm;
mod modified;

pub use combination::{AlphaConvexCombination, Term};
pub use context::{check_conditions, PackingContext};
pub use hbm::{hbm_core, HbmRun};
pub use modified::modified_packing_step;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hypergraph::{rho, BMatchInstance, IntegralSolution};
use crate::lp::{self, LpResult, SupportSplit};
use crate::rational::{self, Rational};

/// Output of [`decompose`].
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub lp: LpResult,
    pub split: SupportSplit,
    pub bipartite: bool,
    pub rho: Rational,
    /// HbM output for the fractional part on the residual instance.
    pub core: HbmRun,
    /// ρ-convex combination of feasible b-matchings recomposing to `x*`.
    pub combination: AlphaConvexCombination,
}

impl Decomposition {
    pub fn best_term(&self, w: &[Rational]) -> Result<(IntegralSolution, Rational)> {
        let (i, value) = self.combination.best_term(w)?;
        Ok((self.combination.terms()[i].solution.clone(), value))
    }

    /// `LP / w(best term)`, with `0/0` read as 1.
    pub fn certified_ratio(&self, w: &[Rational]) -> Result<Rational> {
        let (_, best) = self.best_term(w)?;
        ratio_or_one(&self.lp.value, &best)
    }
}

/// `numer / denom`, with `0/0 = 1`. A positive numerator over zero is an
/// invariant violation.
pub(crate) fn ratio_or_one(numer: &Rational, denom: &Rational) -> Result<Rational> {
    if denom.is_zero() {
        if numer.is_zero() {
            Ok(Rational::one())
        } else {
            Err(Error::invariant(
                "positive LP value but zero-weight best solution",
                format!("lp = {numer}"),
            ))
        }
    } else {
        Ok(numer / denom)
    }
}

/// Solves the LP relaxation to a vertex `x*`, fixes `⌊x*⌋`, decomposes the
/// fractional part with HbM on the residual simple instance, and returns a
/// ρ-convex combination of feasible b-matchings with `Σλ_i x^i = x*`.
///
/// When `⌊x*⌋ ≠ 0` each HbM term `(λ, y)` contributes `(λ/ρ, y + ⌊x*⌋)` and
/// `(λ(ρ-1)/ρ, y)`: total mass ρ and recomposition `x_f + ⌊x*⌋` exactly.
/// A valid bipartite witness switches ρ to `k - 1`.
pub fn decompose(instance: &BMatchInstance) -> Result<Decomposition> {
    decompose_with(instance, true)
}

/// As [`decompose`], but `use_witness = false` ignores any witness.
pub fn decompose_with(instance: &BMatchInstance, use_witness: bool) -> Result<Decomposition> {
    let instance = instance.clone().validate()?;
    let h = &instance.hypergraph;
    let bipartite = if use_witness && instance.bipartite_witness.is_some() {
        if !instance.has_valid_witness() {
            return Err(Error::InvalidWitness(
                "some edge does not meet the distinguished set exactly once".into(),
            ));
        }
        h.k() >= 2
    } else {
        false
    };
    let k = h.k().max(1);
    let rho = rho(k, bipartite)?;

    let lp = lp::solve_to_vertex(&lp::build_bmatch_lp(&instance))?;
    let split = lp::fractional_support_split(h, &lp)?;
    let core = hbm_core(h, &split.support, &split.fractional, bipartite)?;

    let m = h.num_edges();
    let combination = if split.integer.is_zero() {
        core.combination.clone()
    } else {
        let lifted = Rational::one() / &rho;
        let bare = (&rho - Rational::one()) / &rho;
        let mut terms = Vec::with_capacity(2 * core.combination.len());
        for term in core.combination.terms() {
            terms.push(Term {
                lambda: &term.lambda * &lifted,
                solution: term.solution.add(&split.integer),
            });
        }
        for term in core.combination.terms() {
            terms.push(Term {
                lambda: &term.lambda * &bare,
                solution: term.solution.clone(),
            });
        }
        AlphaConvexCombination::from_terms(m, terms)?
    };

    if combination.alpha() != &rho || combination.value() != lp.solution.values.as_slice() {
        return Err(Error::invariant(
            "decomposition does not recompose to the LP vertex",
            combination.dump(),
        ));
    }
    if let Some(bad) = combination
        .terms()
        .iter()
        .position(|t| !instance.is_feasible(&t.solution))
    {
        return Err(Error::invariant(
            format!("term {bad} is infeasible for the instance"),
            combination.dump(),
        ));
    }
    let (_, best) = combination.best_term(&instance.w)?;
    if &best * &rho < lp.value {
        return Err(Error::invariant(
            format!(
                "best term {} · ρ = {} falls below the LP value {}",
                rational::format(&best),
                rational::format(&(&best * &rho)),
                rational::format(&lp.value)
            ),
            combination.dump(),
        ));
    }

    Ok(Decomposition {
        lp,
        split,
        bipartite,
        rho,
        core,
        combination,
    })
}
