//! Instances, validation and incidence queries shared by every algorithm.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A multiset of hyperedges over `0..num_vertices`. Each edge is stored as a
/// sorted set of vertex ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    num_vertices: usize,
    edges: Vec<Vec<usize>>,
    incidence: Vec<Vec<usize>>,
    k: usize,
}

impl Hypergraph {
    pub fn new(num_vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let mut sorted = Vec::with_capacity(edges.len());
        for (index, mut edge) in edges.into_iter().enumerate() {
            if edge.is_empty() {
                return Err(Error::EmptyEdge(index));
            }
            edge.sort_unstable();
            for pair in edge.windows(2) {
                if pair[0] == pair[1] {
                    return Err(Error::RepeatedVertex {
                        edge: index,
                        vertex: pair[0],
                    });
                }
            }
            if let Some(&vertex) = edge.last().filter(|&&v| v >= num_vertices) {
                return Err(Error::VertexOutOfRange {
                    edge: index,
                    vertex,
                    num_vertices,
                });
            }
            sorted.push(edge);
        }
        let mut incidence = vec![Vec::new(); num_vertices];
        for (index, edge) in sorted.iter().enumerate() {
            for &v in edge {
                incidence[v].push(index);
            }
        }
        let k = sorted.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            num_vertices,
            edges: sorted,
            incidence,
            k,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Maximum edge size.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edge(&self, e: usize) -> &[usize] {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    /// `δ(v)`: the edges containing `v`, in increasing order.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn contains(&self, e: usize, v: usize) -> bool {
        self.edges[e].binary_search(&v).is_ok()
    }

    /// Vertex degrees in the sub-hypergraph `(V, support)`.
    pub fn degrees_in(&self, support: &[usize]) -> Vec<usize> {
        let mut degree = vec![0; self.num_vertices];
        for &e in support {
            for &v in &self.edges[e] {
                degree[v] += 1;
            }
        }
        degree
    }

    /// `(Ax)_v` for every vertex.
    pub fn fractional_degrees(&self, x: &[Rational]) -> Vec<Rational> {
        let mut degree = vec![Rational::zero(); self.num_vertices];
        for (e, value) in x.iter().enumerate() {
            if value.is_zero() {
                continue;
            }
            for &v in &self.edges[e] {
                degree[v] += value;
            }
        }
        degree
    }

    /// `(A[d]x)_v` for an integral vector, with per-edge scale `d` (all ones
    /// for plain b-matching).
    pub fn integral_loads(&self, x: &[u64], demand: Option<&[u64]>) -> Vec<u64> {
        let mut load = vec![0u64; self.num_vertices];
        for (e, &m) in x.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let scale = demand.map_or(1, |d| d[e]);
            for &v in &self.edges[e] {
                load[v] += m * scale;
            }
        }
        load
    }
}

/// The distinguished vertex set `U` of a bipartite hypergraph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteWitness {
    pub distinguished_set: BTreeSet<usize>,
}

impl BipartiteWitness {
    pub fn new(vertices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            distinguished_set: vertices.into_iter().collect(),
        }
    }
}

/// True iff every edge meets `u` in exactly one vertex.
pub fn check_bipartite_witness(h: &Hypergraph, u: &BTreeSet<usize>) -> bool {
    if u.iter().any(|&v| v >= h.num_vertices()) {
        return false;
    }
    h.edges()
        .iter()
        .all(|e| e.iter().filter(|v| u.contains(v)).count() == 1)
}

/// Per-edge capacity as it appears in input files.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Capacity {
    Finite(u64),
    Unbounded,
}

/// A k-hypergraph b-matching instance.
#[derive(Clone, Debug, PartialEq)]
pub struct BMatchInstance {
    pub hypergraph: Hypergraph,
    pub b: Vec<u64>,
    pub c: Vec<Capacity>,
    pub w: Vec<Rational>,
    pub bipartite_witness: Option<BipartiteWitness>,
}

impl BMatchInstance {
    /// Simple instance: unit capacities.
    pub fn simple(hypergraph: Hypergraph, b: Vec<u64>, w: Vec<Rational>) -> Self {
        let c = vec![Capacity::Finite(1); hypergraph.num_edges()];
        Self {
            hypergraph,
            b,
            c,
            w,
            bipartite_witness: None,
        }
    }

    pub fn with_witness(mut self, witness: BipartiteWitness) -> Self {
        self.bipartite_witness = Some(witness);
        self
    }

    /// Checks dimensions and weights, and replaces every capacity by
    /// `min(c_e, min_{v ∈ e} b_v)`. Idempotent.
    pub fn validate(mut self) -> Result<Self> {
        let h = &self.hypergraph;
        check_len("b", h.num_vertices(), self.b.len())?;
        check_len("c", h.num_edges(), self.c.len())?;
        check_len("w", h.num_edges(), self.w.len())?;
        check_weights(&self.w)?;
        if let Some(witness) = &self.bipartite_witness {
            if let Some(&v) = witness
                .distinguished_set
                .iter()
                .find(|&&v| v >= h.num_vertices())
            {
                return Err(Error::InvalidWitness(format!(
                    "vertex {v} is out of range"
                )));
            }
        }
        for e in 0..h.num_edges() {
            let bound = h.edge(e).iter().map(|&v| self.b[v]).min().unwrap_or(0);
            let cap = match self.c[e] {
                Capacity::Finite(c) => c.min(bound),
                Capacity::Unbounded => bound,
            };
            self.c[e] = Capacity::Finite(cap);
        }
        Ok(self)
    }

    /// Normalized capacity of `e`.
    pub fn cap(&self, e: usize) -> u64 {
        let bound = self
            .hypergraph
            .edge(e)
            .iter()
            .map(|&v| self.b[v])
            .min()
            .unwrap_or(0);
        match self.c[e] {
            Capacity::Finite(c) => c.min(bound),
            Capacity::Unbounded => bound,
        }
    }

    /// Whether the embedded witness (if any) is valid for the hypergraph.
    pub fn has_valid_witness(&self) -> bool {
        self.bipartite_witness
            .as_ref()
            .is_some_and(|u| check_bipartite_witness(&self.hypergraph, &u.distinguished_set))
    }

    pub fn is_feasible(&self, x: &IntegralSolution) -> bool {
        if x.multiplicities.len() != self.hypergraph.num_edges() {
            return false;
        }
        if (0..x.multiplicities.len()).any(|e| x.multiplicities[e] > self.cap(e)) {
            return false;
        }
        self.hypergraph
            .integral_loads(&x.multiplicities, None)
            .iter()
            .zip(&self.b)
            .all(|(load, limit)| load <= limit)
    }

    pub fn is_fractionally_feasible(&self, x: &FractionalSolution) -> bool {
        if x.values.len() != self.hypergraph.num_edges() {
            return false;
        }
        let in_box = x
            .values
            .iter()
            .enumerate()
            .all(|(e, v)| !v.is_negative() && *v <= rational::uint(self.cap(e)));
        in_box
            && self
                .hypergraph
                .fractional_degrees(&x.values)
                .iter()
                .zip(&self.b)
                .all(|(deg, &limit)| *deg <= rational::uint(limit))
    }
}

/// A k-hypergraph demand matching instance with unit capacities.
#[derive(Clone, Debug, PartialEq)]
pub struct DemandInstance {
    pub hypergraph: Hypergraph,
    pub b: Vec<u64>,
    pub d: Vec<u64>,
    pub w: Vec<Rational>,
}

impl DemandInstance {
    /// Checks dimensions, weights, positive demands and the no-clipping
    /// assumption `d_e ≤ b_v` for all `v ∈ e`.
    pub fn validate(self) -> Result<Self> {
        let h = &self.hypergraph;
        check_len("b", h.num_vertices(), self.b.len())?;
        check_len("d", h.num_edges(), self.d.len())?;
        check_len("w", h.num_edges(), self.w.len())?;
        check_weights(&self.w)?;
        for (e, &demand) in self.d.iter().enumerate() {
            if demand == 0 {
                return Err(Error::ZeroDemand(e));
            }
            if let Some(&v) = h.edge(e).iter().find(|&&v| demand > self.b[v]) {
                return Err(Error::NoClipping {
                    edge: e,
                    vertex: v,
                    demand,
                    limit: self.b[v],
                });
            }
        }
        Ok(self)
    }

    /// Exact feasibility of a 0/1 edge selection: `A[d]x ≤ b`.
    pub fn is_feasible(&self, x: &IntegralSolution) -> bool {
        x.multiplicities.len() == self.hypergraph.num_edges()
            && x.multiplicities.iter().all(|&m| m <= 1)
            && self
                .hypergraph
                .integral_loads(&x.multiplicities, Some(&self.d))
                .iter()
                .zip(&self.b)
                .all(|(load, limit)| load <= limit)
    }
}

fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            actual,
        })
    }
}

fn check_weights(w: &[Rational]) -> Result<()> {
    match w.iter().position(Signed::is_negative) {
        Some(edge) => Err(Error::NegativeWeight {
            edge,
            weight: rational::format(&w[edge]),
        }),
        None => Ok(()),
    }
}

/// An exact fractional edge vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalSolution {
    pub values: Vec<Rational>,
}

impl FractionalSolution {
    pub fn zeros(num_edges: usize) -> Self {
        Self {
            values: vec![Rational::zero(); num_edges],
        }
    }

    pub fn weight(&self, w: &[Rational]) -> Rational {
        rational::dot(w, &self.values)
    }

    /// Edges with a nonzero value.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&e| !self.values[e].is_zero())
            .collect()
    }
}

/// An integral edge multiset (multiplicity per edge).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegralSolution {
    pub multiplicities: Vec<u64>,
}

impl IntegralSolution {
    pub fn zeros(num_edges: usize) -> Self {
        Self {
            multiplicities: vec![0; num_edges],
        }
    }

    /// The unit vector `χ_e`.
    pub fn unit(num_edges: usize, e: usize) -> Self {
        let mut x = Self::zeros(num_edges);
        x.multiplicities[e] = 1;
        x
    }

    /// Expands an edge multiset (edge indices, repeats allowed).
    pub fn from_edges(num_edges: usize, edges: &[usize]) -> Self {
        let mut x = Self::zeros(num_edges);
        for &e in edges {
            x.multiplicities[e] += 1;
        }
        x
    }

    /// The multiset as a sorted list of edge indices.
    pub fn edge_list(&self) -> Vec<usize> {
        self.multiplicities
            .iter()
            .enumerate()
            .flat_map(|(e, &m)| std::iter::repeat_n(e, m as usize))
            .collect()
    }

    pub fn weight(&self, w: &[Rational]) -> Rational {
        self.multiplicities
            .iter()
            .zip(w)
            .filter(|(m, _)| **m > 0)
            .fold(Rational::zero(), |acc, (&m, we)| acc + rational::uint(m) * we)
    }

    pub fn to_fractional(&self) -> FractionalSolution {
        FractionalSolution {
            values: self.multiplicities.iter().map(|&m| rational::uint(m)).collect(),
        }
    }

    pub fn add(&self, other: &IntegralSolution) -> IntegralSolution {
        IntegralSolution {
            multiplicities: self
                .multiplicities
                .iter()
                .zip(&other.multiplicities)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.multiplicities.iter().all(|&m| m == 0)
    }
}

/// Approximation ratio `ρ`: `k - 1 + 1/k` in general, `k - 1` for bipartite.
pub fn rho(k: usize, bipartite: bool) -> Result<Rational> {
    check_k(k, bipartite)?;
    let k = rational::uint(k as u64);
    Ok(if bipartite {
        k - Rational::one()
    } else {
        &k - Rational::one() + k.recip()
    })
}

/// Degree bound `μ`: `k` in general, `k - 1` for bipartite.
pub fn mu(k: usize, bipartite: bool) -> Result<usize> {
    check_k(k, bipartite)?;
    Ok(if bipartite { k - 1 } else { k })
}

fn check_k(k: usize, bipartite: bool) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("edge-size bound k must be at least 1".into()));
    }
    if bipartite && k < 2 {
        return Err(Error::InvalidParameter(
            "bipartite hypergraphs need edge-size bound k of at least 2".into(),
        ));
    }
    Ok(())
}

/// A vertex of minimum nonzero degree in `(V, support)`, lowest id on ties.
/// Returns `None` iff `support` is empty.
pub fn min_nonzero_degree_vertex(h: &Hypergraph, support: &[usize]) -> Option<usize> {
    let degree = h.degrees_in(support);
    (0..h.num_vertices())
        .filter(|&v| degree[v] > 0)
        .min_by_key(|&v| (degree[v], v))
}
