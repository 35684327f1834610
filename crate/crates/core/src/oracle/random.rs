//! Seeded random instance families for the test suites.
//!
//! Every suite instance `i` is drawn from its own `ChaCha8Rng` seeded with
//! `seed + i`, so a failing instance can be regenerated in isolation.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hypergraph::{BMatchInstance, BipartiteWitness, Capacity, DemandInstance, Hypergraph};
use crate::rational::Rational;
use crate::reductions::{AuctionInput, Bid, ColoredInstance};

/// Nonnegative weight `p/q`, `p ∈ 0..=9`, `q ∈ 1..=6`.
pub fn random_weight(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(0..=9).into(), rng.gen_range(1..=6).into())
}

/// Weights from a narrow range, so that many edges compete on equal terms
/// and LP optima are more often fractional.
fn clustered_weight(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(2..=4).into(), rng.gen_range(1..=2).into())
}

/// `b_v ∈ [1,3]`, skewed towards 1.
fn random_b(rng: &mut impl Rng) -> u64 {
    match rng.gen_range(0..10) {
        0..=5 => 1,
        6..=8 => 2,
        _ => 3,
    }
}

fn random_subset(rng: &mut impl Rng, pool: &[usize], size: usize) -> Vec<usize> {
    index::sample(rng, pool.len(), size)
        .into_iter()
        .map(|i| pool[i])
        .collect()
}

/// Edge sizes in `low..=k`, mostly `k`, with the first edge of size
/// exactly `k` so that the hypergraph really has rank `k`.
fn edge_sizes(rng: &mut impl Rng, m: usize, low: usize, k: usize) -> Vec<usize> {
    (0..m)
        .map(|e| {
            if e == 0 || rng.gen_bool(0.7) {
                k
            } else {
                rng.gen_range(low..=k)
            }
        })
        .collect()
}

/// `|V| ≤ 8`, `|E| ≤ 10`, edge sizes up to `k`, `b ∈ [1,3]`, `c ∈ [1,2]`.
///
/// Sparse random hypergraphs almost always have integral LP optima, so
/// most draws are dense: either a few vertices and many edges, or a
/// "tight" instance of `k`-edges on `k + 1` or `k + 2` vertices with
/// `b ≡ 1`, in which every pair of edges overlaps heavily.
pub fn random_bmatch(rng: &mut impl Rng, k: usize) -> BMatchInstance {
    let k = k.max(1);
    let tight = rng.gen_bool(0.4);
    let (n, m) = if tight {
        (rng.gen_range(k + 1..=(k + 2).min(8)), rng.gen_range(5..=10))
    } else {
        dimensions(rng, k.max(2))
    };
    let vertices: Vec<usize> = (0..n).collect();
    let sizes = if tight { vec![k; m] } else { edge_sizes(rng, m, 1, k) };
    let edges = sizes
        .into_iter()
        .map(|size| random_subset(rng, &vertices, size))
        .collect();
    finish_bmatch(rng, n, edges, None, tight)
}

/// As [`random_bmatch`], but every edge meets a random distinguished set
/// `U` exactly once, and `U` is attached as the witness.
pub fn random_bipartite_bmatch(rng: &mut impl Rng, k: usize) -> BMatchInstance {
    let k = k.max(2);
    let tight = rng.gen_bool(0.4);
    let (u_size, n, m) = if tight {
        let u_size = rng.gen_range(2..=3);
        let rest = rng.gen_range(k..=(k + 1).min(8 - u_size));
        (u_size, u_size + rest, rng.gen_range(5..=10))
    } else {
        let (n, m) = dimensions(rng, k + 1);
        (rng.gen_range(1..=(n - (k - 1)).min(3)), n, m)
    };
    let order = random_subset(rng, &(0..n).collect::<Vec<_>>(), n);
    let (u, rest) = order.split_at(u_size);
    let sizes = if tight { vec![k; m] } else { edge_sizes(rng, m, 2, k) };
    let edges = sizes
        .into_iter()
        .map(|size| {
            let mut e = random_subset(rng, rest, size - 1);
            e.push(u[rng.gen_range(0..u.len())]);
            e
        })
        .collect();
    let witness = BipartiteWitness::new(u.iter().copied());
    finish_bmatch(rng, n, edges, Some(witness), tight)
}

/// `(|V|, |E|)` with `low ≤ |V| ≤ 8` and `|E| ≤ 10`, mostly dense.
fn dimensions(rng: &mut impl Rng, low: usize) -> (usize, usize) {
    let low = low.min(8);
    if rng.gen_bool(0.6) {
        (rng.gen_range(low..=(low + 2).min(8)), rng.gen_range(5..=10))
    } else {
        (rng.gen_range(low..=8), rng.gen_range(1..=10))
    }
}

fn finish_bmatch(
    rng: &mut impl Rng,
    n: usize,
    edges: Vec<Vec<usize>>,
    witness: Option<BipartiteWitness>,
    unit_b: bool,
) -> BMatchInstance {
    let m = edges.len();
    let clustered = rng.gen_bool(0.5);
    BMatchInstance {
        hypergraph: Hypergraph::new(n, edges).expect("generated edges are valid"),
        b: (0..n).map(|_| if unit_b { 1 } else { random_b(rng) }).collect(),
        c: (0..m).map(|_| Capacity::Finite(rng.gen_range(1..=2))).collect(),
        w: (0..m)
            .map(|_| if clustered { clustered_weight(rng) } else { random_weight(rng) })
            .collect(),
        bipartite_witness: witness,
    }
}

/// No-clipping demand instance: `|E| ≤ 10`, edge sizes up to `k`,
/// `b ∈ [1,6]`, `d_e ∈ [1, min_{v∈e} b_v]`.
pub fn random_demand(rng: &mut impl Rng, k: usize) -> DemandInstance {
    let n = rng.gen_range(k.max(2)..=7);
    let m = rng.gen_range(1..=10);
    let vertices: Vec<usize> = (0..n).collect();
    let b: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
    let edges: Vec<Vec<usize>> = edge_sizes(rng, m, 1, k)
        .into_iter()
        .map(|size| random_subset(rng, &vertices, size))
        .collect();
    let d = edges
        .iter()
        .map(|e| {
            let limit = e.iter().map(|&v| b[v]).min().expect("edges are nonempty");
            rng.gen_range(1..=limit)
        })
        .collect();
    DemandInstance {
        hypergraph: Hypergraph::new(n, edges).expect("generated edges are valid"),
        b,
        d,
        w: (0..m).map(|_| random_weight(rng)).collect(),
    }
}

/// Colored graph: `|V| ≤ 6`, `|E| ≤ 8`, up to 3 colors with budgets in
/// `[1,3]`.
pub fn random_colored(rng: &mut impl Rng) -> ColoredInstance {
    let n = rng.gen_range(2..=6);
    let m = rng.gen_range(1..=8);
    let vertices: Vec<usize> = (0..n).collect();
    let edges: Vec<Vec<usize>> = (0..m).map(|_| random_subset(rng, &vertices, 2)).collect();
    let classes = rng.gen_range(1..=3);
    let base = BMatchInstance {
        hypergraph: Hypergraph::new(n, edges).expect("generated edges are valid"),
        b: (0..n).map(|_| rng.gen_range(1..=2)).collect(),
        c: (0..m).map(|_| Capacity::Finite(rng.gen_range(1..=2))).collect(),
        w: (0..m).map(|_| random_weight(rng)).collect(),
        bipartite_witness: None,
    };
    ColoredInstance {
        base,
        colors: (0..m).map(|_| rng.gen_range(0..classes)).collect(),
        budgets: (0..classes).map(|_| rng.gen_range(1..=3)).collect(),
    }
}

/// `n ≤ 4` bidders, `m ≤ 5` items, bundles of one or two items, and at
/// least one two-item bundle (so the reduction has rank 3).
pub fn random_auction(rng: &mut impl Rng) -> AuctionInput {
    let bidders = rng.gen_range(1..=4);
    let items = rng.gen_range(2..=5);
    let pool: Vec<usize> = (0..items).collect();
    let mut bids = Vec::new();
    for bidder in 0..bidders {
        for _ in 0..rng.gen_range(1..=3) {
            let size = if bids.is_empty() { 2 } else { rng.gen_range(1..=2) };
            bids.push(Bid {
                bidder,
                items: random_subset(rng, &pool, size),
                value: Rational::new(rng.gen_range(1..=10).into(), rng.gen_range(1..=3).into()),
            });
        }
    }
    AuctionInput {
        bidders,
        items,
        bids,
    }
}

fn suite<T>(seed: u64, count: usize, mut draw: impl FnMut(usize, &mut ChaCha8Rng) -> T) -> Vec<T> {
    (0..count)
        .map(|i| draw(i, &mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64))))
        .collect()
}

/// `count` b-matching instances cycling through `k ∈ {2, 3, 4}`.
pub fn bmatch_suite(seed: u64, count: usize, bipartite: bool) -> Vec<BMatchInstance> {
    suite(seed, count, |i, rng| {
        let k = 2 + i % 3;
        if bipartite {
            random_bipartite_bmatch(rng, k)
        } else {
            random_bmatch(rng, k)
        }
    })
}

/// `count` demand instances cycling through `k ∈ {1, 2, 3}`.
pub fn demand_suite(seed: u64, count: usize) -> Vec<DemandInstance> {
    suite(seed, count, |i, rng| random_demand(rng, 1 + i % 3))
}

pub fn colored_suite(seed: u64, count: usize) -> Vec<ColoredInstance> {
    suite(seed, count, |_, rng| random_colored(rng))
}

pub fn auction_suite(seed: u64, count: usize) -> Vec<AuctionInput> {
    suite(seed, count, |_, rng| random_auction(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_instances_validate() {
        for inst in bmatch_suite(1, 30, false) {
            assert!(inst.validate().is_ok());
        }
        for inst in bmatch_suite(2, 30, true) {
            assert!(inst.has_valid_witness());
            assert!(inst.hypergraph.k() >= 2);
        }
        for inst in demand_suite(3, 30) {
            assert!(inst.validate().is_ok());
        }
        for ci in colored_suite(4, 30) {
            assert!(ci.validate().is_ok());
        }
        for a in auction_suite(5, 30) {
            assert!(a.bids.iter().any(|b| b.items.len() == 2));
            assert!(a.validate().is_ok());
        }
    }

    #[test]
    fn suites_are_reproducible() {
        assert_eq!(bmatch_suite(9, 5, true), bmatch_suite(9, 5, true));
        assert_eq!(auction_suite(9, 5), auction_suite(9, 5));
    }
}
