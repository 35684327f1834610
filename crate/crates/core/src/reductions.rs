//! Bounded-color b-matching and combinatorial auctions as bipartite
//! hypergraph b-matching.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::hypergraph::{BMatchInstance, BipartiteWitness, Capacity, Hypergraph, IntegralSolution};
use crate::lp::{self, LinearProgram, RowSense};
use crate::packing::{self, Decomposition};
use crate::rational::{self, uint, Rational};
use crate::report::SolveReport;

/// Correspondence between source objects (colored edges or bids) and the
/// hyperedges of a reduced instance. Both reductions use the identity
/// numbering, but callers should go through the map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMap {
    target_of: Vec<usize>,
    source_of: Vec<usize>,
}

impl EdgeMap {
    fn identity(m: usize) -> Self {
        Self {
            target_of: (0..m).collect(),
            source_of: (0..m).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.target_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target_of.is_empty()
    }

    pub fn target(&self, source: usize) -> usize {
        self.target_of[source]
    }

    pub fn source(&self, target: usize) -> usize {
        self.source_of[target]
    }

    pub fn to_target(&self, x: &IntegralSolution) -> IntegralSolution {
        let mut out = IntegralSolution::zeros(self.len());
        for (s, &m) in x.multiplicities.iter().enumerate() {
            out.multiplicities[self.target_of[s]] = m;
        }
        out
    }

    pub fn to_source(&self, x: &IntegralSolution) -> IntegralSolution {
        let mut out = IntegralSolution::zeros(self.len());
        for (t, &m) in x.multiplicities.iter().enumerate() {
            out.multiplicities[self.source_of[t]] = m;
        }
        out
    }
}

/// b-matching where at most `budgets[i]` edges (with multiplicity) may come
/// from color class `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColoredInstance {
    pub base: BMatchInstance,
    pub colors: Vec<usize>,
    pub budgets: Vec<u64>,
}

impl ColoredInstance {
    pub fn validate(mut self) -> Result<Self> {
        self.base = self.base.validate()?;
        let m = self.base.hypergraph.num_edges();
        if self.colors.len() != m {
            return Err(Error::DimensionMismatch {
                what: "colors",
                expected: m,
                actual: self.colors.len(),
            });
        }
        if let Some(e) = self.colors.iter().position(|&c| c >= self.budgets.len()) {
            return Err(Error::InvalidParameter(format!(
                "edge {e} has color {} but only {} budgets are given",
                self.colors[e],
                self.budgets.len()
            )));
        }
        if let Some(i) = self.budgets.iter().position(|&b| b == 0) {
            return Err(Error::InvalidParameter(format!("color {i} has zero budget")));
        }
        Ok(self)
    }

    pub fn is_feasible(&self, x: &IntegralSolution) -> bool {
        if !self.base.is_feasible(x) {
            return false;
        }
        let mut used = vec![0u64; self.budgets.len()];
        for (e, &m) in x.multiplicities.iter().enumerate() {
            used[self.colors[e]] += m;
        }
        used.iter().zip(&self.budgets).all(|(u, b)| u <= b)
    }
}

/// Adds one vertex per color with capacity equal to its budget and appends
/// it to every edge of that color. The new vertices meet every edge once.
pub fn bounded_color_to_bipartite(ci: &ColoredInstance) -> Result<(BMatchInstance, EdgeMap)> {
    let ci = ci.clone().validate()?;
    let base = &ci.base;
    let n = base.hypergraph.num_vertices();
    let edges: Vec<Vec<usize>> = base
        .hypergraph
        .edges()
        .iter()
        .zip(&ci.colors)
        .map(|(e, &color)| {
            let mut e = e.clone();
            e.push(n + color);
            e
        })
        .collect();
    let hypergraph = Hypergraph::new(n + ci.budgets.len(), edges)?;
    let mut b = base.b.clone();
    b.extend(&ci.budgets);
    let reduced = BMatchInstance {
        hypergraph,
        b,
        c: base.c.clone(),
        w: base.w.clone(),
        bipartite_witness: Some(BipartiteWitness::new(n..n + ci.budgets.len())),
    };
    debug_assert!(reduced.has_valid_witness());
    Ok((reduced, EdgeMap::identity(base.hypergraph.num_edges())))
}

/// Outcome of solving a colored instance through its reduction.
#[derive(Clone, Debug)]
pub struct ColoredSolution {
    pub reduced: BMatchInstance,
    pub map: EdgeMap,
    pub decomposition: Decomposition,
    /// Best term mapped back to source edges; `best_value` is its weight.
    pub report: SolveReport,
}

pub fn solve_bounded_color(ci: &ColoredInstance) -> Result<ColoredSolution> {
    let ci = ci.clone().validate()?;
    let (reduced, map) = bounded_color_to_bipartite(&ci)?;
    let decomposition = packing::decompose(&reduced)?;
    let mut report = SolveReport::from_decomposition("bounded-color", &reduced, &decomposition)?;
    report.best_solution = map.to_source(&report.best_solution);
    if !ci.is_feasible(&report.best_solution)
        || report.best_solution.weight(&ci.base.w) != report.best_value
    {
        return Err(Error::invariant(
            "mapped-back best term does not respect the color budgets",
            format!("{:?}", report.best_solution.multiplicities),
        ));
    }
    Ok(ColoredSolution {
        reduced,
        map,
        decomposition,
        report,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bid {
    pub bidder: usize,
    pub items: Vec<usize>,
    pub value: Rational,
}

/// Explicit bid lists; every bidder may also win nothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuctionInput {
    pub bidders: usize,
    pub items: usize,
    pub bids: Vec<Bid>,
}

impl AuctionInput {
    pub fn validate(mut self) -> Result<Self> {
        for (i, bid) in self.bids.iter_mut().enumerate() {
            if bid.bidder >= self.bidders {
                return Err(Error::InvalidParameter(format!(
                    "bid {i}: bidder {} out of range",
                    bid.bidder
                )));
            }
            if bid.items.is_empty() {
                return Err(Error::InvalidParameter(format!("bid {i} has an empty bundle")));
            }
            bid.items.sort_unstable();
            if let Some(w) = bid.items.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!("bid {i} repeats item {}", w[0])));
            }
            if let Some(&j) = bid.items.iter().find(|&&j| j >= self.items) {
                return Err(Error::InvalidParameter(format!("bid {i}: item {j} out of range")));
            }
            if bid.value.is_negative() {
                return Err(Error::NegativeWeight {
                    edge: i,
                    weight: rational::format(&bid.value),
                });
            }
        }
        Ok(self)
    }

    /// Whether each bidder wins at most one bid and each item is sold once.
    pub fn is_allocation(&self, won: &IntegralSolution) -> bool {
        let mut bidder = vec![0u64; self.bidders];
        let mut item = vec![0u64; self.items];
        for (bid, &m) in self.bids.iter().zip(&won.multiplicities) {
            bidder[bid.bidder] += m;
            for &j in &bid.items {
                item[j] += m;
            }
        }
        won.multiplicities.len() == self.bids.len()
            && bidder.iter().chain(&item).all(|&load| load <= 1)
    }
}

/// Bidders are vertices `0..n`, items `n..n+m`; each bid becomes the edge
/// `{bidder} ∪ items`. The bidders form the witness.
pub fn auction_to_bipartite(a: &AuctionInput) -> Result<(BMatchInstance, EdgeMap)> {
    let a = a.clone().validate()?;
    let n = a.bidders;
    let edges: Vec<Vec<usize>> = a
        .bids
        .iter()
        .map(|bid| {
            std::iter::once(bid.bidder)
                .chain(bid.items.iter().map(|j| n + j))
                .collect()
        })
        .collect();
    let m = edges.len();
    let reduced = BMatchInstance {
        hypergraph: Hypergraph::new(n + a.items, edges)?,
        b: vec![1; n + a.items],
        c: vec![Capacity::Finite(1); m],
        w: a.bids.iter().map(|bid| bid.value.clone()).collect(),
        bipartite_witness: Some(BipartiteWitness::new(0..n)),
    };
    debug_assert!(reduced.has_valid_witness());
    Ok((reduced, EdgeMap::identity(m)))
}

/// The fractional allocation LP with one variable per bid, one "nothing"
/// variable per bidder (indices `|bids|..|bids|+n`), an equality per bidder
/// and a `≤ 1` row per item.
pub fn build_allocation_lp(a: &AuctionInput) -> Result<LinearProgram> {
    let a = a.clone().validate()?;
    let nb = a.bids.len();
    let vars = nb + a.bidders;
    let mut objective: Vec<Rational> = a.bids.iter().map(|bid| bid.value.clone()).collect();
    objective.resize(vars, Rational::zero());
    let mut rows = Vec::with_capacity(a.bidders + a.items);
    let mut senses = Vec::with_capacity(rows.capacity());
    for i in 0..a.bidders {
        let mut row = vec![Rational::zero(); vars];
        for (s, bid) in a.bids.iter().enumerate() {
            if bid.bidder == i {
                row[s] = uint(1);
            }
        }
        row[nb + i] = uint(1);
        rows.push(row);
        senses.push(RowSense::Eq);
    }
    for j in 0..a.items {
        let row = (0..vars)
            .map(|s| {
                if s < nb && a.bids[s].items.contains(&j) {
                    uint(1)
                } else {
                    Rational::zero()
                }
            })
            .collect();
        rows.push(row);
        senses.push(RowSense::Le);
    }
    let rhs = vec![uint(1); rows.len()];
    Ok(LinearProgram {
        objective,
        rows,
        senses,
        rhs,
        bounds: vec![(Rational::zero(), uint(1)); vars],
    })
}

#[derive(Clone, Debug)]
pub struct AuctionOutcome {
    /// Winning bid index per bidder (`None`: wins nothing).
    pub assignment: Vec<Option<usize>>,
    pub sampled_term: usize,
    pub sampled_welfare: Rational,
    /// `Σ (λ_i/ρ) w(x^i)`, equal to `LP / ρ`.
    pub expected_welfare: Rational,
    pub lp_value: Rational,
    pub best_welfare: Rational,
    pub rho: Rational,
    pub decomposition: Decomposition,
}

/// Decomposes the matching LP of the reduction and draws one term with
/// probability `λ_i / ρ`.
pub fn sample_allocation(a: &AuctionInput, seed: u64) -> Result<AuctionOutcome> {
    let a = a.clone().validate()?;
    let (reduced, map) = auction_to_bipartite(&a)?;
    let decomposition = packing::decompose(&reduced)?;
    let comb = &decomposition.combination;
    let expected_welfare = comb.expected_value(&reduced.w)?;
    if expected_welfare != &decomposition.lp.value / &decomposition.rho {
        return Err(Error::invariant(
            "expected welfare differs from LP / ρ",
            comb.dump(),
        ));
    }
    let sampled_term = comb.sample_term(seed)?;
    let won = map.to_source(&comb.terms()[sampled_term].solution);
    if !a.is_allocation(&won) {
        return Err(Error::invariant(
            format!("term {sampled_term} sells an item twice"),
            comb.dump(),
        ));
    }
    let mut assignment = vec![None; a.bidders];
    for (s, &m) in won.multiplicities.iter().enumerate() {
        if m > 0 {
            assignment[a.bids[s].bidder] = Some(s);
        }
    }
    let (_, best_welfare) = decomposition.best_term(&reduced.w)?;
    Ok(AuctionOutcome {
        assignment,
        sampled_term,
        sampled_welfare: won.weight(&reduced.w),
        expected_welfare,
        lp_value: decomposition.lp.value.clone(),
        best_welfare,
        rho: decomposition.rho.clone(),
        decomposition,
    })
}

/// Solves the allocation LP directly (for cross-checking the reduction).
pub fn allocation_lp_value(a: &AuctionInput) -> Result<Rational> {
    Ok(lp::solve_to_vertex(&build_allocation_lp(a)?)?.value)
}
