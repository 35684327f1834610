//! Exact linear algebra: fraction-free rank and kernel vectors.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::hypergraph::Hypergraph;
use crate::rational::{self, Rational};

/// Rank of an integer matrix by Bareiss fraction-free elimination.
pub fn rank_integer(mut rows: Vec<Vec<BigInt>>) -> usize {
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev_pivot = BigInt::from(1);
    for col in 0..width {
        let Some(pivot_row) = (rank..height).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let pivot = rows[rank][col].clone();
        for r in (rank + 1)..height {
            let factor = rows[r][col].clone();
            for c in 0..width {
                let value = &pivot * &rows[r][c] - &factor * &rows[rank][c];
                // Bareiss: the division is exact.
                rows[r][c] = value / &prev_pivot;
            }
        }
        prev_pivot = pivot;
        rank += 1;
        if rank == height {
            break;
        }
    }
    rank
}

/// Rank of a rational matrix: each row is scaled to integers first.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let scaled = rows
        .iter()
        .map(|row| {
            let denom = rational::common_denominator(row);
            row.iter()
                .map(|v| (v * Rational::from_integer(denom.clone())).to_integer())
                .collect()
        })
        .collect();
    rank_integer(scaled)
}

/// Whether the incidence columns `{χ(e) : e ∈ support}` are linearly
/// independent.
pub fn incidence_columns_independent(h: &Hypergraph, support: &[usize]) -> bool {
    if support.is_empty() {
        return true;
    }
    if support.len() > h.num_vertices() {
        return false;
    }
    // Transposed: one row per support edge; row rank equals column rank.
    let rows = support
        .iter()
        .map(|&e| {
            let mut row = vec![BigInt::zero(); h.num_vertices()];
            for &v in h.edge(e) {
                row[v] = BigInt::from(1);
            }
            row
        })
        .collect();
    rank_integer(rows) == support.len()
}

/// A nonzero vector `y` with `M y = 0`, where `M` is given by its columns, or
/// `None` if the columns are independent.
pub fn kernel_vector(columns: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    let n = columns.len();
    let m = columns.first().map_or(0, Vec::len);
    // Row-major copy for elimination.
    let mut a: Vec<Vec<Rational>> = (0..m)
        .map(|r| (0..n).map(|c| columns[c][r].clone()).collect())
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for c in col..n {
            a[row][c] = &a[row][c] * &inv;
        }
        for r in 0..m {
            if r != row && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..n {
                    let sub = &factor * &a[row][c];
                    a[r][c] -= sub;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == m {
            break;
        }
    }
    let free = (0..n).find(|c| !pivot_cols.contains(c))?;
    let mut y = vec![Rational::zero(); n];
    y[free] = rational::int(1);
    for (r, &pc) in pivot_cols.iter().enumerate() {
        y[pc] = -a[r][free].clone();
    }
    debug_assert!(y.iter().any(|v| !v.is_zero()));
    debug_assert!((0..m).all(|r| {
        rational::dot(&y, &(0..n).map(|c| columns[c][r].clone()).collect::<Vec<_>>()).is_zero()
    }));
    Some(y)
}
