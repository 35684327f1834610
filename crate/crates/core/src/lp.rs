//! Naive LP relaxations and an exact two-phase simplex with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hypergraph::{BMatchInstance, DemandInstance, FractionalSolution, Hypergraph, IntegralSolution};
use crate::linalg;
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
}

/// `max objective·x` subject to `rows[i]·x (≤ | =) rhs[i]` and
/// `lo_j ≤ x_j ≤ hi_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub rows: Vec<Vec<Rational>>,
    pub senses: Vec<RowSense>,
    pub rhs: Vec<Rational>,
    pub bounds: Vec<(Rational, Rational)>,
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::MalformedLp(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        if self.senses.len() != self.rows.len() || self.rhs.len() != self.rows.len() {
            return Err(Error::MalformedLp("row, sense and rhs counts differ".into()));
        }
        if let Some(i) = self.rows.iter().position(|r| r.len() != n) {
            return Err(Error::MalformedLp(format!("row {i} has the wrong width")));
        }
        if let Some(j) = self.bounds.iter().position(|(lo, hi)| lo > hi) {
            return Err(Error::MalformedLp(format!("variable {j} has lo > hi")));
        }
        Ok(())
    }

    /// Exact feasibility check.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && x
                .iter()
                .zip(&self.bounds)
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
            && self.rows.iter().zip(&self.senses).zip(&self.rhs).all(|((row, sense), rhs)| {
                let lhs = rational::dot(row, x);
                match sense {
                    RowSense::Le => lhs <= *rhs,
                    RowSense::Eq => lhs == *rhs,
                }
            })
    }

    /// Constraints tight at `x`.
    pub fn tight_set(&self, x: &[Rational]) -> Vec<Tight> {
        let mut tight = Vec::new();
        for (i, (row, rhs)) in self.rows.iter().zip(&self.rhs).enumerate() {
            if rational::dot(row, x) == *rhs {
                tight.push(Tight::Row(i));
            }
        }
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            if x[j] == *lo {
                tight.push(Tight::Lower(j));
            }
            if x[j] == *hi {
                tight.push(Tight::Upper(j));
            }
        }
        tight
    }

    /// Rank of the constraint normals in `tight`.
    pub fn tight_rank(&self, tight: &[Tight]) -> usize {
        let n = self.num_vars();
        let normals: Vec<Vec<Rational>> = tight
            .iter()
            .map(|t| match *t {
                Tight::Row(i) => self.rows[i].clone(),
                Tight::Lower(j) | Tight::Upper(j) => {
                    let mut unit = vec![Rational::zero(); n];
                    unit[j] = Rational::one();
                    unit
                }
            })
            .collect();
        linalg::rank(&normals)
    }
}

/// A constraint that holds with equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tight {
    Row(usize),
    Lower(usize),
    Upper(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub value: Rational,
    pub solution: FractionalSolution,
    /// Tight constraints at `solution`; their normals span the variable space.
    pub tight: Vec<Tight>,
}

/// One variable per edge in `[0, c_e]`, one row `Σ_{e ∋ v} x_e ≤ b_v` per
/// vertex, objective `w`.
pub fn build_bmatch_lp(instance: &BMatchInstance) -> LinearProgram {
    let h = &instance.hypergraph;
    let bounds = (0..h.num_edges())
        .map(|e| (Rational::zero(), rational::uint(instance.cap(e))))
        .collect();
    let (rows, rhs) = degree_rows(h, &instance.b, None);
    LinearProgram {
        objective: instance.w.clone(),
        senses: vec![RowSense::Le; rows.len()],
        rows,
        rhs,
        bounds,
    }
}

/// Rows `Σ_{e ∋ v} d_e x_e ≤ b_v`, bounds `[0, 1]`, objective `w`.
pub fn build_demand_lp(instance: &DemandInstance) -> LinearProgram {
    let h = &instance.hypergraph;
    let (rows, rhs) = degree_rows(h, &instance.b, Some(&instance.d));
    LinearProgram {
        objective: instance.w.clone(),
        senses: vec![RowSense::Le; rows.len()],
        rows,
        rhs,
        bounds: vec![(Rational::zero(), Rational::one()); h.num_edges()],
    }
}

fn degree_rows(
    h: &Hypergraph,
    b: &[u64],
    demand: Option<&[u64]>,
) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let rows = (0..h.num_vertices())
        .map(|v| {
            let mut row = vec![Rational::zero(); h.num_edges()];
            for &e in h.incident(v) {
                row[e] = rational::uint(demand.map_or(1, |d| d[e]));
            }
            row
        })
        .collect();
    (rows, b.iter().map(|&bv| rational::uint(bv)).collect())
}

/// Dense simplex tableau over standard-form variables (structural, slack,
/// artificial). Row `i` reads `Σ_j a[i][j] z_j = rhs[i]` with `basis[i]`
/// basic.
struct Tableau {
    a: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.a[row][col].recip();
        for v in self.a[row].iter_mut() {
            *v *= &inv;
        }
        self.rhs[row] *= &inv;
        let pivot_row = self.a[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.a.len() {
            if r == row || self.a[r][col].is_zero() {
                continue;
            }
            let factor = self.a[r][col].clone();
            for (c, p) in pivot_row.iter().enumerate() {
                if !p.is_zero() {
                    self.a[r][c] -= &factor * p;
                }
            }
            self.rhs[r] -= &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost·z` over the current basis, restricted to columns
    /// `allowed`. Bland's rule: lowest-index entering column, and among
    /// minimum-ratio rows the one whose basic variable has the lowest index.
    fn maximize(&mut self, cost: &[Rational], allowed: &dyn Fn(usize) -> bool) -> Result<()> {
        loop {
            let entering = (0..self.width).find(|&j| {
                allowed(j) && !self.basis.contains(&j) && self.reduced_cost(cost, j).is_positive()
            });
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.a.len() {
                if !self.a[r][col].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / &self.a[r][col];
                let better = match &leave {
                    None => true,
                    Some((best_r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_r])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return Err(Error::Unbounded),
            }
        }
    }

    fn reduced_cost(&self, cost: &[Rational], col: usize) -> Rational {
        let mut rc = cost[col].clone();
        for (r, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.a[r][col].is_zero() {
                rc -= &cost[b] * &self.a[r][col];
            }
        }
        rc
    }

    fn value_of(&self, col: usize) -> Rational {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map_or_else(Rational::zero, |r| self.rhs[r].clone())
    }
}

/// Solves `lp` exactly and returns an optimal vertex with its tight set.
pub fn solve_to_vertex(lp: &LinearProgram) -> Result<LpResult> {
    lp.check()?;
    let n = lp.num_vars();

    // Shift x = lo + y so that y ≥ 0; upper bounds become rows y_j ≤ hi - lo.
    let mut rows: Vec<(Vec<Rational>, RowSense, Rational)> = Vec::new();
    for ((row, sense), rhs) in lp.rows.iter().zip(&lp.senses).zip(&lp.rhs) {
        let lo: Vec<Rational> = lp.bounds.iter().map(|(lo, _)| lo.clone()).collect();
        rows.push((row.clone(), *sense, rhs - rational::dot(row, &lo)));
    }
    for (j, (lo, hi)) in lp.bounds.iter().enumerate() {
        let mut unit = vec![Rational::zero(); n];
        unit[j] = Rational::one();
        rows.push((unit, RowSense::Le, hi - lo));
    }

    let num_slack = rows.iter().filter(|r| r.1 == RowSense::Le).count();
    let needs_artificial: Vec<bool> = rows
        .iter()
        .map(|(_, sense, rhs)| *sense == RowSense::Eq || rhs.is_negative())
        .collect();
    let num_artificial = needs_artificial.iter().filter(|&&b| b).count();
    let width = n + num_slack + num_artificial;

    let mut a = Vec::with_capacity(rows.len());
    let mut rhs = Vec::with_capacity(rows.len());
    let mut basis = Vec::with_capacity(rows.len());
    let (mut next_slack, mut next_art) = (n, n + num_slack);
    for ((row, sense, b), &artificial) in rows.into_iter().zip(&needs_artificial) {
        let mut full = vec![Rational::zero(); width];
        full[..n].clone_from_slice(&row);
        let mut slack_col = None;
        if sense == RowSense::Le {
            full[next_slack] = Rational::one();
            slack_col = Some(next_slack);
            next_slack += 1;
        }
        let mut b = b;
        if b.is_negative() {
            for v in full.iter_mut() {
                *v = -v.clone();
            }
            b = -b;
        }
        if artificial {
            full[next_art] = Rational::one();
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(slack_col.expect("rows without artificials are ≤ rows"));
        }
        a.push(full);
        rhs.push(b);
    }
    let mut tab = Tableau { a, rhs, basis, width };
    let first_artificial = n + num_slack;

    if num_artificial > 0 {
        let mut phase1 = vec![Rational::zero(); width];
        for c in phase1.iter_mut().skip(first_artificial) {
            *c = -Rational::one();
        }
        tab.maximize(&phase1, &|_| true)?;
        let infeasibility: Rational = (first_artificial..width).map(|c| tab.value_of(c)).sum();
        if infeasibility.is_positive() {
            return Err(Error::Infeasible);
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < tab.a.len() {
            if tab.basis[r] >= first_artificial {
                match (0..first_artificial).find(|&c| !tab.a[r][c].is_zero()) {
                    Some(c) => tab.pivot(r, c),
                    None => {
                        tab.a.remove(r);
                        tab.rhs.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut cost = vec![Rational::zero(); width];
    cost[..n].clone_from_slice(&lp.objective);
    tab.maximize(&cost, &|j| j < first_artificial)?;

    let values: Vec<Rational> = (0..n)
        .map(|j| &lp.bounds[j].0 + tab.value_of(j))
        .collect();
    if !lp.is_feasible(&values) {
        return Err(Error::invariant(
            "simplex returned an infeasible point",
            format!("{values:?}"),
        ));
    }
    let value = rational::dot(&lp.objective, &values);
    let tight = lp.tight_set(&values);
    if lp.tight_rank(&tight) != n {
        return Err(Error::invariant(
            "simplex returned a non-vertex",
            format!("x = {values:?}, tight = {tight:?}"),
        ));
    }
    Ok(LpResult {
        value,
        solution: FractionalSolution { values },
        tight,
    })
}

/// `x* = integer part + fractional part`, with the fractional part's support.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportSplit {
    pub integer: IntegralSolution,
    pub fractional: FractionalSolution,
    pub support: Vec<usize>,
}

/// Splits an LP vertex into `⌊x*⌋` and `x* - ⌊x*⌋`, and certifies that the
/// incidence columns of the fractional support are linearly independent.
pub fn fractional_support_split(h: &Hypergraph, result: &LpResult) -> Result<SupportSplit> {
    let x = &result.solution.values;
    if x.len() != h.num_edges() {
        return Err(Error::DimensionMismatch {
            what: "LP solution",
            expected: h.num_edges(),
            actual: x.len(),
        });
    }
    let mut integer = Vec::with_capacity(x.len());
    let mut fractional = Vec::with_capacity(x.len());
    for v in x {
        let floor = v.floor();
        integer.push(rational::to_u64(&floor).ok_or_else(|| {
            Error::invariant("negative LP coordinate", format!("{x:?}"))
        })?);
        fractional.push(v - floor);
    }
    let fractional = FractionalSolution { values: fractional };
    let support = fractional.support();
    if !linalg::incidence_columns_independent(h, &support) {
        return Err(Error::invariant(
            "fractional support has dependent incidence columns (input is not a vertex)",
            format!("x = {x:?}, support = {support:?}"),
        ));
    }
    Ok(SupportSplit {
        integer: IntegralSolution {
            multiplicities: integer,
        },
        fractional,
        support,
    })
}
