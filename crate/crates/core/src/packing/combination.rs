use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hypergraph::IntegralSolution;
use crate::linalg;
use crate::rational::{self, Rational};

/// One weighted integral solution. `lambda > 0` always.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub lambda: Rational,
    pub solution: IntegralSolution,
}

/// `Σ_i λ_i x^i` with `Σ_i λ_i = α`. The value vector `Σ_i λ_i x^i` is kept
/// up to date by every mutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaConvexCombination {
    alpha: Rational,
    terms: Vec<Term>,
    value: Vec<Rational>,
}

impl AlphaConvexCombination {
    /// The single term `(α, 0)`.
    pub fn trivial(alpha: Rational, num_edges: usize) -> Result<Self> {
        if alpha < Rational::one() {
            return Err(Error::AlphaBelowOne(rational::format(&alpha)));
        }
        Ok(Self {
            terms: vec![Term {
                lambda: alpha.clone(),
                solution: IntegralSolution::zeros(num_edges),
            }],
            alpha,
            value: vec![Rational::zero(); num_edges],
        })
    }

    /// Builds a combination from explicit terms; `α` is their mass sum.
    /// Terms with zero mass are dropped.
    pub fn from_terms(num_edges: usize, terms: Vec<Term>) -> Result<Self> {
        let mut value = vec![Rational::zero(); num_edges];
        let mut alpha = Rational::zero();
        let mut kept = Vec::with_capacity(terms.len());
        for term in terms {
            if term.solution.multiplicities.len() != num_edges {
                return Err(Error::DimensionMismatch {
                    what: "term solution",
                    expected: num_edges,
                    actual: term.solution.multiplicities.len(),
                });
            }
            if term.lambda.is_negative() {
                return Err(Error::InvalidParameter(format!(
                    "negative multiplier {}",
                    term.lambda
                )));
            }
            if term.lambda.is_zero() {
                continue;
            }
            alpha += &term.lambda;
            accumulate(&mut value, &term.solution, &term.lambda);
            kept.push(term);
        }
        Ok(Self {
            alpha,
            terms: kept,
            value,
        })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_edges(&self) -> usize {
        self.value.len()
    }

    /// The maintained `Σ_i λ_i x^i`.
    pub fn value(&self) -> &[Rational] {
        &self.value
    }

    /// `Σ_i λ_i x^i` recomputed from scratch.
    pub fn recompute_value(&self) -> Vec<Rational> {
        let mut value = vec![Rational::zero(); self.num_edges()];
        for term in &self.terms {
            accumulate(&mut value, &term.solution, &term.lambda);
        }
        value
    }

    pub fn mass(&self) -> Rational {
        rational::sum(self.terms.iter().map(|t| &t.lambda))
    }

    /// Checks `Σλ = α`, `λ > 0` and the maintained value vector.
    pub fn check_consistency(&self) -> Result<()> {
        if self.mass() != self.alpha {
            return Err(Error::invariant("Σλ differs from α", self.dump()));
        }
        if self.terms.iter().any(|t| !t.lambda.is_positive()) {
            return Err(Error::invariant("nonpositive multiplier", self.dump()));
        }
        if self.recompute_value() != self.value {
            return Err(Error::invariant("stale combination value", self.dump()));
        }
        Ok(())
    }

    /// Replaces term `index` by `(portion, x)` at `index` and
    /// `(λ - portion, x)` at `index + 1`.
    pub fn split_term(&mut self, index: usize, portion: &Rational) -> Result<()> {
        let len = self.terms.len();
        let term = self
            .terms
            .get_mut(index)
            .ok_or(Error::TermOutOfRange { index, len })?;
        if !portion.is_positive() || *portion >= term.lambda {
            return Err(Error::PortionOutOfRange {
                portion: rational::format(portion),
                lambda: rational::format(&term.lambda),
            });
        }
        let rest = Term {
            lambda: &term.lambda - portion,
            solution: term.solution.clone(),
        };
        term.lambda = portion.clone();
        self.terms.insert(index + 1, rest);
        Ok(())
    }

    /// Adds `χ_e` to the whole of term `index`.
    pub(crate) fn add_edge_to_term(&mut self, index: usize, e: usize) {
        let term = &mut self.terms[index];
        term.solution.multiplicities[e] += 1;
        self.value[e] += &term.lambda;
    }

    /// Moves mass `t` from each eligible `x^i` to `x^i + χ_e`, visiting
    /// eligible terms in index order and splitting at most one of them.
    pub(crate) fn pack_into(&mut self, e: usize, t: &Rational, eligible: &[bool]) -> Result<()> {
        debug_assert_eq!(eligible.len(), self.terms.len());
        if t.is_zero() {
            return Ok(());
        }
        let available = rational::sum(
            self.terms
                .iter()
                .zip(eligible)
                .filter(|(_, ok)| **ok)
                .map(|(term, _)| &term.lambda),
        );
        if available < *t {
            return Err(Error::InsufficientMass {
                needed: rational::format(t),
                available: rational::format(&available),
            });
        }
        let mut remaining = t.clone();
        let mut index = 0;
        while remaining.is_positive() {
            if !eligible[index] {
                index += 1;
                continue;
            }
            if self.terms[index].lambda <= remaining {
                remaining -= &self.terms[index].lambda;
                self.add_edge_to_term(index, e);
            } else {
                // The only split; the loop ends right after it.
                self.split_term(index, &remaining)?;
                self.add_edge_to_term(index, e);
                remaining = Rational::zero();
            }
            index += 1;
        }
        Ok(())
    }

    /// Packing step: move exactly mass `t` of `e` into terms whose solution
    /// stays feasible after adding `e` (per `packable`).
    pub fn packing_step(
        &mut self,
        e: usize,
        t: &Rational,
        packable: impl Fn(&IntegralSolution) -> bool,
    ) -> Result<()> {
        if t.is_negative() {
            return Err(Error::InvalidParameter(format!("negative packing target {t}")));
        }
        if e >= self.num_edges() {
            return Err(Error::InvalidParameter(format!("edge {e} out of range")));
        }
        let eligible: Vec<bool> = self
            .terms
            .iter()
            .map(|term| {
                let mut grown = term.solution.clone();
                grown.multiplicities[e] += 1;
                packable(&grown)
            })
            .collect();
        self.pack_into(e, t, &eligible)
    }

    /// Adds `base` to every term's solution.
    pub fn shift_terms(&mut self, base: &IntegralSolution) {
        for term in &mut self.terms {
            term.solution = term.solution.add(base);
        }
        self.value = self.recompute_value();
    }

    /// Merges terms with identical solutions into the first occurrence.
    pub fn merge_identical_terms(&mut self) {
        let mut first: HashMap<IntegralSolution, usize> = HashMap::new();
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for term in self.terms.drain(..) {
            match first.get(&term.solution) {
                Some(&i) => merged[i].lambda += term.lambda,
                None => {
                    first.insert(term.solution.clone(), merged.len());
                    merged.push(term);
                }
            }
        }
        self.terms = merged;
    }

    /// Rewrites the combination with at most `|E| + 1` terms, keeping `α`
    /// and `Σλx` exactly, by repeatedly shifting mass along an affine
    /// dependency among the term vectors.
    pub fn caratheodory_prune(&mut self) {
        self.merge_identical_terms();
        let limit = self.num_edges() + 1;
        while self.terms.len() > limit {
            // Any `|E| + 2` lifted vectors (x^i, 1) are dependent.
            let window = limit + 1;
            let columns: Vec<Vec<Rational>> = self.terms[..window]
                .iter()
                .map(|t| {
                    let mut col: Vec<Rational> =
                        t.solution.to_fractional().values;
                    col.push(Rational::one());
                    col
                })
                .collect();
            let mut dependency =
                linalg::kernel_vector(&columns).expect("|E|+2 vectors in R^{|E|+1} are dependent");
            if !dependency.iter().any(Signed::is_positive) {
                for v in dependency.iter_mut() {
                    *v = -v.clone();
                }
            }
            let step = dependency
                .iter()
                .zip(&self.terms)
                .filter(|(mu, _)| mu.is_positive())
                .map(|(mu, t)| &t.lambda / mu)
                .min()
                .expect("dependency has a positive entry");
            for (term, mu) in self.terms.iter_mut().zip(&dependency) {
                term.lambda -= &step * mu;
            }
            self.terms.retain(|t| t.lambda.is_positive());
        }
        debug_assert_eq!(self.recompute_value(), self.value);
    }

    /// The term maximizing `w·x^i` (lowest index on ties) and its weight.
    pub fn best_term(&self, w: &[Rational]) -> Result<(usize, Rational)> {
        let mut best: Option<(usize, Rational)> = None;
        for (i, term) in self.terms.iter().enumerate() {
            let weight = term.solution.weight(w);
            if best.as_ref().is_none_or(|(_, b)| weight > *b) {
                best = Some((i, weight));
            }
        }
        best.ok_or(Error::EmptyCombination)
    }

    /// `Σ_i (λ_i / α) w·x^i`.
    pub fn expected_value(&self, w: &[Rational]) -> Result<Rational> {
        if self.terms.is_empty() {
            return Err(Error::EmptyCombination);
        }
        let total = self
            .terms
            .iter()
            .fold(Rational::zero(), |acc, t| acc + &t.lambda * t.solution.weight(w));
        Ok(total / &self.alpha)
    }

    /// Draws term `i` with probability exactly `λ_i / α`.
    pub fn sample_term(&self, seed: u64) -> Result<usize> {
        if self.terms.is_empty() {
            return Err(Error::EmptyCombination);
        }
        let probabilities: Vec<Rational> =
            self.terms.iter().map(|t| &t.lambda / &self.alpha).collect();
        let denom = rational::common_denominator(&probabilities);
        let scale = Rational::from_integer(denom.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = rng.gen_bigint_range(&BigInt::zero(), &denom);
        let mut cumulative = BigInt::zero();
        for (i, p) in probabilities.iter().enumerate() {
            cumulative += (p * &scale).to_integer();
            if draw < cumulative {
                return Ok(i);
            }
        }
        Err(Error::invariant(
            "multipliers do not sum to alpha",
            self.dump(),
        ))
    }

    /// Human-readable state for invariant reports.
    pub fn dump(&self) -> String {
        let mut out = format!("alpha = {}\n", self.alpha);
        for (i, t) in self.terms.iter().enumerate() {
            let _ = writeln!(out, "  [{i}] λ = {} edges = {:?}", t.lambda, t.solution.edge_list());
        }
        let _ = write!(
            out,
            "  value = [{}]",
            self.value.iter().map(rational::format).collect::<Vec<_>>().join(", ")
        );
        out
    }
}

fn accumulate(value: &mut [Rational], solution: &IntegralSolution, lambda: &Rational) {
    for (v, &m) in value.iter_mut().zip(&solution.multiplicities) {
        if m > 0 {
            *v += lambda * rational::uint(m);
        }
    }
}
