//! JSON file dialect for instances, auctions and decompositions.
//!
//! Rationals are written as `"p/q"` strings and read from strings or plain
//! integers; capacities are integers or `"inf"`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{
    BMatchInstance, BipartiteWitness, Capacity, DemandInstance, FractionalSolution, Hypergraph,
    IntegralSolution,
};
use crate::packing::{AlphaConvexCombination, Term};
use crate::rational::{self, Rational};
use crate::reductions::{AuctionInput, Bid, ColoredInstance};

/// A rational in the file dialect.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Q(#[serde(with = "rational::serde_text")] pub Rational);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CapacityText {
    Finite(u64),
    Text(String),
}

impl CapacityText {
    fn parse(&self) -> Result<Capacity> {
        match self {
            CapacityText::Finite(c) => Ok(Capacity::Finite(*c)),
            CapacityText::Text(t) if t == "inf" => Ok(Capacity::Unbounded),
            CapacityText::Text(t) => Err(Error::Parse(format!("capacity {t:?} is neither an integer nor \"inf\""))),
        }
    }
}

impl From<Capacity> for CapacityText {
    fn from(c: Capacity) -> Self {
        match c {
            Capacity::Finite(c) => CapacityText::Finite(c),
            Capacity::Unbounded => CapacityText::Text("inf".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub num_vertices: usize,
    pub edges: Vec<Vec<usize>>,
    pub b: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<CapacityText>>,
    pub w: Vec<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bipartite_u: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Vec<u64>>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types always serialize")
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?)
    }

    fn hypergraph(&self) -> Result<Hypergraph> {
        Hypergraph::new(self.num_vertices, self.edges.clone())
    }

    fn weights(&self) -> Vec<Rational> {
        self.w.iter().map(|q| q.0.clone()).collect()
    }

    /// The b-matching instance; absent capacities default to 1. Not yet
    /// validated.
    pub fn to_bmatch(&self) -> Result<BMatchInstance> {
        let c = match &self.c {
            Some(c) => c.iter().map(CapacityText::parse).collect::<Result<_>>()?,
            None => vec![Capacity::Finite(1); self.edges.len()],
        };
        Ok(BMatchInstance {
            hypergraph: self.hypergraph()?,
            b: self.b.clone(),
            c,
            w: self.weights(),
            bipartite_witness: self.bipartite_u.as_ref().map(|u| BipartiteWitness::new(u.iter().copied())),
        })
    }

    pub fn to_demand(&self) -> Result<DemandInstance> {
        let d = self
            .d
            .clone()
            .ok_or_else(|| Error::InvalidParameter("demand instance needs a `d` field".into()))?;
        if let Some(c) = &self.c {
            if let Some(e) = c.iter().position(|c| *c != CapacityText::Finite(1)) {
                return Err(Error::NonUnitDemandCapacity(e));
            }
        }
        Ok(DemandInstance {
            hypergraph: self.hypergraph()?,
            b: self.b.clone(),
            d,
            w: self.weights(),
        })
    }

    pub fn to_colored(&self) -> Result<ColoredInstance> {
        let (Some(colors), Some(budgets)) = (&self.colors, &self.budgets) else {
            return Err(Error::InvalidParameter(
                "bounded-color instance needs `colors` and `budgets`".into(),
            ));
        };
        Ok(ColoredInstance {
            base: self.to_bmatch()?,
            colors: colors.clone(),
            budgets: budgets.clone(),
        })
    }

    pub fn from_bmatch(instance: &BMatchInstance) -> Self {
        let h = &instance.hypergraph;
        let unit = instance.c.iter().all(|&c| c == Capacity::Finite(1));
        Self {
            num_vertices: h.num_vertices(),
            edges: h.edges().to_vec(),
            b: instance.b.clone(),
            c: (!unit).then(|| instance.c.iter().map(|&c| c.into()).collect()),
            w: instance.w.iter().cloned().map(Q).collect(),
            d: None,
            bipartite_u: instance
                .bipartite_witness
                .as_ref()
                .map(|u| u.distinguished_set.iter().copied().collect()),
            colors: None,
            budgets: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuctionFile {
    pub bidders: usize,
    pub items: usize,
    /// `(bidder, items, value)` triples.
    pub bids: Vec<(usize, Vec<usize>, Q)>,
}

impl AuctionFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?)
    }

    pub fn to_input(&self) -> AuctionInput {
        AuctionInput {
            bidders: self.bidders,
            items: self.items,
            bids: self
                .bids
                .iter()
                .map(|(bidder, items, value)| Bid {
                    bidder: *bidder,
                    items: items.clone(),
                    value: value.0.clone(),
                })
                .collect(),
        }
    }

    pub fn from_input(a: &AuctionInput) -> Self {
        Self {
            bidders: a.bidders,
            items: a.items,
            bids: a
                .bids
                .iter()
                .map(|bid| (bid.bidder, bid.items.clone(), Q(bid.value.clone())))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub lambda: Q,
    /// Edge multiset: indices, repeated by multiplicity.
    pub edges: Vec<usize>,
}

/// A saved ρ-convex combination together with the vector it represents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionFile {
    pub alpha: Q,
    pub x: Vec<Q>,
    pub terms: Vec<TermFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub alpha: String,
    pub term_count: usize,
    pub positive_multipliers: bool,
    pub mass_matches_alpha: bool,
    pub recomposes: bool,
    pub terms_feasible: bool,
    pub x_feasible: bool,
    pub ok: bool,
}

impl DecompositionFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?)
    }

    pub fn from_combination(comb: &AlphaConvexCombination, x: &FractionalSolution) -> Self {
        Self {
            alpha: Q(comb.alpha().clone()),
            x: x.values.iter().cloned().map(Q).collect(),
            terms: comb
                .terms()
                .iter()
                .map(|t| TermFile {
                    lambda: Q(t.lambda.clone()),
                    edges: t.solution.edge_list(),
                })
                .collect(),
        }
    }

    /// Re-checks the saved combination against `instance` from scratch.
    pub fn verify(&self, instance: &BMatchInstance) -> Result<VerifyReport> {
        let instance = instance.clone().validate()?;
        let m = instance.hypergraph.num_edges();
        if self.x.len() != m {
            return Err(Error::DimensionMismatch {
                what: "x",
                expected: m,
                actual: self.x.len(),
            });
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            if let Some(&e) = t.edges.iter().find(|&&e| e >= m) {
                return Err(Error::InvalidParameter(format!("term {i} references edge {e}")));
            }
            terms.push(Term {
                lambda: t.lambda.0.clone(),
                solution: IntegralSolution::from_edges(m, &t.edges),
            });
        }
        let positive_multipliers = terms.iter().all(|t| t.lambda > Rational::from_integer(0.into()));
        let terms_feasible = terms.iter().all(|t| instance.is_feasible(&t.solution));
        let comb = AlphaConvexCombination::from_terms(m, terms)?;
        let x: Vec<Rational> = self.x.iter().map(|q| q.0.clone()).collect();
        let mass_matches_alpha = comb.mass() == self.alpha.0;
        let recomposes = comb.recompute_value() == x;
        let x_feasible = instance.is_fractionally_feasible(&FractionalSolution { values: x });
        Ok(VerifyReport {
            alpha: rational::format(&self.alpha.0),
            term_count: self.terms.len(),
            ok: positive_multipliers && mass_matches_alpha && recomposes && terms_feasible && x_feasible,
            positive_multipliers,
            mass_matches_alpha,
            recomposes,
            terms_feasible,
            x_feasible,
        })
    }
}
