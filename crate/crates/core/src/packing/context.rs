use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hypergraph::{FractionalSolution, Hypergraph, IntegralSolution};
use crate::rational::{self, Rational};

use super::combination::AlphaConvexCombination;

/// Degree data of a target fractional vector `x`: `(Ax)_v`, `⌈(Ax)_v⌉` and
/// `<(Ax)_v>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingContext {
    pub target: FractionalSolution,
    pub degree: Vec<Rational>,
    pub ceiling: Vec<BigInt>,
    pub fraction: Vec<Rational>,
}

impl PackingContext {
    pub fn new(h: &Hypergraph, target: FractionalSolution) -> Self {
        let degree = h.fractional_degrees(&target.values);
        let ceiling = degree.iter().map(|d| d.ceil().to_integer()).collect();
        let fraction = degree.iter().map(rational::fract).collect();
        Self {
            target,
            degree,
            ceiling,
            fraction,
        }
    }

    /// Stored fields agree with a fresh computation from `target`.
    pub fn is_consistent(&self, h: &Hypergraph) -> bool {
        *self == Self::new(h, self.target.clone())
    }
}

/// Degree of a 0/1 (or general integral) term at `v`.
pub(crate) fn term_degree(h: &Hypergraph, x: &IntegralSolution, v: usize) -> u64 {
    h.incident(v).iter().map(|&e| x.multiplicities[e]).sum()
}

/// Checks the two invariants maintained by modified packing steps, plus
/// exact recomposition:
///
/// (i) `Ax^i ≤ ⌈Ax⌉` for every term;
/// (ii) for every `v` with `(Ax)_v` non-integral,
///      `λ({i : (Ax^i)_v = ⌈(Ax)_v⌉}) ≤ <(Ax)_v>`.
pub fn check_conditions(
    h: &Hypergraph,
    comb: &AlphaConvexCombination,
    ctx: &PackingContext,
) -> Result<()> {
    if comb.value() != ctx.target.values.as_slice() {
        return Err(Error::invariant(
            "combination does not recompose to the target",
            comb.dump(),
        ));
    }
    for v in 0..h.num_vertices() {
        let ceiling = &ctx.ceiling[v];
        let mut at_ceiling = Rational::zero();
        for (i, term) in comb.terms().iter().enumerate() {
            let degree = BigInt::from(term_degree(h, &term.solution, v));
            if degree > *ceiling {
                return Err(Error::invariant(
                    format!("condition (i) fails at vertex {v}, term {i}: degree {degree} > ceiling {ceiling}"),
                    comb.dump(),
                ));
            }
            if degree == *ceiling {
                at_ceiling += &term.lambda;
            }
        }
        let fraction = &ctx.fraction[v];
        if !fraction.is_zero() && at_ceiling > *fraction {
            return Err(Error::invariant(
                format!(
                    "condition (ii) fails at vertex {v}: mass {at_ceiling} at ceiling {ceiling} exceeds {fraction}"
                ),
                comb.dump(),
            ));
        }
    }
    Ok(())
}
