//! Ground truth: brute-force integer optima, tight-gap instance families and
//! integrality-gap reports.

mod geometry;
pub mod random;

pub use geometry::{
    gen_projective_plane, gen_truncated_plane, is_projective_plane, GaloisField,
    SUPPORTED_ORDERS,
};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hypergraph::{BMatchInstance, DemandInstance, Hypergraph, IntegralSolution};
use crate::lp;
use crate::packing::{self, ratio_or_one};
use crate::rational::{self, Rational};

pub const DEFAULT_BUDGET: u128 = 1 << 22;

/// Exhaustive enumeration settings.
#[derive(Clone, Copy, Debug)]
pub struct BruteForce {
    /// Maximum number of multiplicity vectors the search may cover.
    pub budget: u128,
    pub execution: Execution,
}

impl Default for BruteForce {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            execution: Execution::default(),
        }
    }
}

impl BruteForce {
    pub fn with_budget(budget: u128) -> Self {
        Self {
            budget,
            ..Self::default()
        }
    }

    pub fn sequential(mut self) -> Self {
        self.execution = Execution::Sequential;
        self
    }

    /// Exact b-matching optimum and the lexicographically smallest optimal
    /// multiplicity vector.
    pub fn bmatch(&self, instance: &BMatchInstance) -> Result<(Rational, IntegralSolution)> {
        let instance = instance.clone().validate()?;
        let caps: Vec<u64> = (0..instance.hypergraph.num_edges())
            .map(|e| instance.cap(e))
            .collect();
        self.search(&instance.hypergraph, &instance.b, &caps, None, &instance.w)
    }

    /// Exact demand-matching optimum over 0/1 selections.
    pub fn demand(&self, instance: &DemandInstance) -> Result<(Rational, IntegralSolution)> {
        let instance = instance.clone().validate()?;
        let caps = vec![1; instance.hypergraph.num_edges()];
        self.search(
            &instance.hypergraph,
            &instance.b,
            &caps,
            Some(&instance.d),
            &instance.w,
        )
    }

    fn search(
        &self,
        h: &Hypergraph,
        b: &[u64],
        caps: &[u64],
        demand: Option<&[u64]>,
        w: &[Rational],
    ) -> Result<(Rational, IntegralSolution)> {
        let required = caps
            .iter()
            .try_fold(1u128, |acc, &c| acc.checked_mul(c as u128 + 1));
        match required {
            Some(r) if r <= self.budget => {}
            _ => {
                return Err(Error::BudgetExceeded {
                    required: required.map_or_else(|| "more than 2^128".into(), |r| r.to_string()),
                    budget: self.budget,
                })
            }
        }
        let m = h.num_edges();
        let denom = rational::common_denominator(w);
        let scaled: Vec<BigInt> = w
            .iter()
            .map(|we| (we * Rational::from_integer(denom.clone())).to_integer())
            .collect();
        let search = Search {
            h,
            b,
            caps,
            demand,
            weights: &scaled,
        };
        if m == 0 {
            return Ok((Rational::zero(), IntegralSolution::zeros(0)));
        }
        // Branch on the first edge's multiplicity; lower branches are
        // lexicographically smaller, so ties go to the earliest branch.
        let branches = self.execution.map_range(caps[0] as usize + 1, |first| {
            let mut state = State::new(m, h.num_vertices());
            if !search.apply(&mut state, 0, first as u64) {
                return None;
            }
            search.descend(&mut state, 1);
            state.best
        });
        let (value, best) = branches
            .into_iter()
            .flatten()
            .fold(None::<(BigInt, Vec<u64>)>, |acc, cand| match acc {
                Some(a) if a.0 >= cand.0 => Some(a),
                _ => Some(cand),
            })
            .expect("the all-zero solution is always feasible");
        Ok((
            Rational::new(value, denom),
            IntegralSolution {
                multiplicities: best,
            },
        ))
    }
}

struct Search<'a> {
    h: &'a Hypergraph,
    b: &'a [u64],
    caps: &'a [u64],
    demand: Option<&'a [u64]>,
    weights: &'a [BigInt],
}

struct State {
    current: Vec<u64>,
    load: Vec<u64>,
    value: BigInt,
    best: Option<(BigInt, Vec<u64>)>,
}

impl State {
    fn new(m: usize, n: usize) -> Self {
        Self {
            current: vec![0; m],
            load: vec![0; n],
            value: BigInt::zero(),
            best: None,
        }
    }
}

impl Search<'_> {
    /// Sets edge `e` to multiplicity `mult` if that keeps every load within
    /// `b`; returns whether it did.
    fn apply(&self, state: &mut State, e: usize, mult: u64) -> bool {
        let add = mult * self.demand.map_or(1, |d| d[e]);
        if self.h.edge(e).iter().any(|&v| state.load[v] + add > self.b[v]) {
            return false;
        }
        for &v in self.h.edge(e) {
            state.load[v] += add;
        }
        state.current[e] = mult;
        state.value += &self.weights[e] * BigInt::from(mult);
        true
    }

    fn undo(&self, state: &mut State, e: usize) {
        let mult = state.current[e];
        let add = mult * self.demand.map_or(1, |d| d[e]);
        for &v in self.h.edge(e) {
            state.load[v] -= add;
        }
        state.value -= &self.weights[e] * BigInt::from(mult);
        state.current[e] = 0;
    }

    fn descend(&self, state: &mut State, e: usize) {
        if e == self.caps.len() {
            if state.best.as_ref().is_none_or(|(v, _)| state.value > *v) {
                state.best = Some((state.value.clone(), state.current.clone()));
            }
            return;
        }
        for mult in 0..=self.caps[e] {
            if !self.apply(state, e, mult) {
                // Loads only grow with the multiplicity.
                break;
            }
            self.descend(state, e + 1);
            self.undo(state, e);
        }
    }
}

/// Every feasible 0/1 selection among `live` edges, as edge lists.
pub fn feasible_demand_subsets(
    instance: &DemandInstance,
    live: &[usize],
    budget: u128,
) -> Result<Vec<Vec<usize>>> {
    if live.len() >= 128 || (1u128 << live.len()) > budget {
        return Err(Error::BudgetExceeded {
            required: format!("2^{}", live.len()),
            budget,
        });
    }
    let h = &instance.hypergraph;
    let mut out = Vec::new();
    for mask in 0u128..(1u128 << live.len()) {
        let chosen: Vec<usize> = (0..live.len())
            .filter(|i| (mask >> i) & 1 == 1)
            .map(|i| live[i])
            .collect();
        let mut load = vec![0u64; h.num_vertices()];
        let ok = chosen.iter().all(|&e| {
            h.edge(e).iter().all(|&v| {
                load[v] += instance.d[e];
                load[v] <= instance.b[v]
            })
        });
        if ok {
            out.push(chosen);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapReport {
    pub lp_value: Rational,
    pub ilp_value: Rational,
    /// `lp / ilp` (1 when both vanish).
    pub gap: Rational,
    pub best_term_value: Rational,
    /// `lp / best term weight` (1 when both vanish).
    pub decomposition_ratio: Rational,
    pub rho: Rational,
    pub bipartite: bool,
}

/// Exact LP, exact ILP and the decomposition ratio of one instance.
pub fn integrality_gap(instance: &BMatchInstance, oracle: &BruteForce) -> Result<GapReport> {
    let (ilp_value, _) = oracle.bmatch(instance)?;
    let decomposition = packing::decompose(instance)?;
    let lp_value = decomposition.lp.value.clone();
    let (_, best_term_value) = decomposition.best_term(&instance.w)?;
    let gap = ratio_or_one(&lp_value, &ilp_value)?;
    let decomposition_ratio = ratio_or_one(&lp_value, &best_term_value)?;
    if decomposition_ratio > decomposition.rho {
        return Err(Error::invariant(
            format!(
                "decomposition ratio {decomposition_ratio} exceeds ρ = {}",
                decomposition.rho
            ),
            decomposition.combination.dump(),
        ));
    }
    if best_term_value > ilp_value || ilp_value > lp_value {
        return Err(Error::invariant(
            "values are not sandwiched as best ≤ ILP ≤ LP",
            format!("best = {best_term_value}, ilp = {ilp_value}, lp = {lp_value}"),
        ));
    }
    // Sanity: the exact LP is independent of the decomposition path.
    debug_assert_eq!(
        lp::solve_to_vertex(&lp::build_bmatch_lp(&instance.clone().validate()?))?.value,
        lp_value
    );
    Ok(GapReport {
        lp_value,
        ilp_value,
        gap,
        best_term_value,
        decomposition_ratio,
        rho: decomposition.rho,
        bipartite: decomposition.bipartite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Capacity;
    use crate::rational::{int, ratio};

    #[test]
    fn triangle_and_empty() {
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let inst = BMatchInstance::simple(h, vec![1; 3], vec![int(1); 3]);
        let (value, sol) = BruteForce::default().bmatch(&inst).unwrap();
        assert_eq!(value, int(1));
        // Lexicographically smallest optimum: (0, 0, 1).
        assert_eq!(sol.multiplicities, vec![0, 0, 1]);

        let empty = BMatchInstance::simple(Hypergraph::new(2, vec![]).unwrap(), vec![1, 1], vec![]);
        let (value, sol) = BruteForce::default().bmatch(&empty).unwrap();
        assert_eq!(value, int(0));
        assert!(sol.multiplicities.is_empty());
    }

    #[test]
    fn multiplicities_and_budget() {
        let h = Hypergraph::new(2, vec![vec![0, 1], vec![0]]).unwrap();
        let inst = BMatchInstance {
            hypergraph: h,
            b: vec![3, 2],
            c: vec![Capacity::Unbounded, Capacity::Finite(3)],
            w: vec![ratio(3, 2), int(1)],
            bipartite_witness: None,
        };
        // Best: two copies of edge 0 (3) plus one of edge 1 (1) = 4.
        let (value, sol) = BruteForce::default().bmatch(&inst).unwrap();
        assert_eq!(value, int(4));
        assert_eq!(sol.multiplicities, vec![2, 1]);
        assert!(matches!(
            BruteForce::with_budget(5).bmatch(&inst),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let h = Hypergraph::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3], vec![0, 2]]).unwrap();
        let inst = BMatchInstance::simple(h, vec![2, 1, 2, 1], vec![int(1), int(2), int(1), int(2), int(1)]);
        let seq = BruteForce::default().sequential().bmatch(&inst).unwrap();
        let par = BruteForce { execution: Execution::Parallel, ..BruteForce::default() }
            .bmatch(&inst)
            .unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn demand_brute_force() {
        let h = Hypergraph::new(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let inst = DemandInstance {
            hypergraph: h,
            b: vec![1, 1],
            d: vec![1, 1],
            w: vec![int(2), int(5)],
        };
        let (value, sol) = BruteForce::default().demand(&inst).unwrap();
        assert_eq!(value, int(5));
        assert_eq!(sol.multiplicities, vec![0, 1]);

        let single = DemandInstance {
            hypergraph: Hypergraph::new(1, vec![vec![0]]).unwrap(),
            b: vec![2],
            d: vec![2],
            w: vec![int(3)],
        };
        assert_eq!(BruteForce::default().demand(&single).unwrap().1.multiplicities, vec![1]);
    }

    #[test]
    fn feasible_subsets_enumeration() {
        let inst = DemandInstance {
            hypergraph: Hypergraph::new(1, vec![vec![0], vec![0], vec![0]]).unwrap(),
            b: vec![3],
            d: vec![1, 2, 2],
            w: vec![int(1); 3],
        };
        let subsets = feasible_demand_subsets(&inst, &[0, 1, 2], 1 << 10).unwrap();
        // ∅, {0}, {1}, {2}, {0,1}, {0,2}
        assert_eq!(subsets.len(), 6);
    }

    #[test]
    fn gap_of_integral_instance_is_one() {
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let inst = BMatchInstance::simple(h, vec![1; 3], vec![int(1), int(1)]);
        let report = integrality_gap(&inst, &BruteForce::default()).unwrap();
        assert_eq!(report.gap, int(1));
        assert_eq!(report.decomposition_ratio, int(1));
    }
}
