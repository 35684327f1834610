//! Local-ratio 2k-approximation for demand matching with unit capacities.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::hypergraph::{DemandInstance, IntegralSolution};
use crate::rational::{uint, Rational};

/// One level of the local-ratio recursion.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceLevel {
    /// Minimum-demand edge chosen at this level.
    pub edge: usize,
    /// Its current weight `w_e`, the multiple of ŵ subtracted.
    pub scale: Rational,
    /// ŵ over all edges (zero off `live`).
    pub what: Vec<Rational>,
    /// Edges live at this level, ascending.
    pub live: Vec<usize>,
    /// `w - scale·ŵ` on `live`, zero elsewhere.
    pub residual: Vec<Rational>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightDecompositionTrace {
    pub levels: Vec<TraceLevel>,
}

impl WeightDecompositionTrace {
    /// Checks ŵ_e = 1 and w'_e = 0 at every level, and that
    /// `w - Σ scale·ŵ` is nonpositive on every edge that was ever live.
    pub fn check(&self, w: &[Rational]) -> Result<()> {
        let mut remaining = w.to_vec();
        for (depth, level) in self.levels.iter().enumerate() {
            if level.what[level.edge] != uint(1)
                || !level.residual[level.edge].is_zero()
            {
                return Err(Error::invariant(
                    format!("level {depth}: ŵ_e ≠ 1 or w'_e ≠ 0 at edge {}", level.edge),
                    format!("{level:?}"),
                ));
            }
            for (r, h) in remaining.iter_mut().zip(&level.what) {
                *r -= &level.scale * h;
            }
        }
        let ever_live = self.levels.first().map_or(&[][..], |l| &l.live[..]);
        if let Some(&f) = ever_live.iter().find(|&&f| remaining[f].is_positive()) {
            return Err(Error::invariant(
                format!("local-ratio residual is positive at edge {f}"),
                format!("{remaining:?}"),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemandMatching {
    pub solution: IntegralSolution,
    pub value: Rational,
    pub trace: WeightDecompositionTrace,
}

/// ŵ for edge `e` over `live`: `ŵ_e = 1` and, for `f ≠ e`,
/// `ŵ_f = Σ_{v ∈ e ∩ f} d_f / max(b_v - d_e, d_e)`.
pub fn what_weights(instance: &DemandInstance, live: &[usize], e: usize) -> Result<Vec<Rational>> {
    if !live.contains(&e) {
        return Err(Error::InvalidParameter(format!("edge {e} is not live")));
    }
    let h = &instance.hypergraph;
    let d_e = instance.d[e];
    let mut what = vec![Rational::zero(); h.num_edges()];
    for &f in live {
        if f == e {
            what[f] = uint(1);
            continue;
        }
        for &v in h.edge(e) {
            if h.contains(f, v) {
                // No-clipping keeps b_v ≥ d_e ≥ 1, so the denominator is positive.
                let denom = instance.b[v].saturating_sub(d_e).max(d_e);
                what[f] += Rational::new(instance.d[f].into(), denom.into());
            }
        }
    }
    Ok(what)
}

/// Local-ratio demand matching, iteratively: descend by repeatedly taking
/// the live edge of minimum demand, then rebuild `F` on the way back up.
pub fn hdm(instance: &DemandInstance) -> Result<DemandMatching> {
    let instance = instance.clone().validate()?;
    let h = &instance.hypergraph;
    let m = h.num_edges();

    let mut weights = instance.w.clone();
    let mut live: Vec<usize> = (0..m).collect();
    let mut trace = WeightDecompositionTrace::default();
    while !live.is_empty() {
        let e = *live
            .iter()
            .min_by_key(|&&f| (instance.d[f], f))
            .expect("live is nonempty");
        let what = what_weights(&instance, &live, e)?;
        let scale = weights[e].clone();
        let mut residual = vec![Rational::zero(); m];
        for &f in &live {
            residual[f] = &weights[f] - &scale * &what[f];
        }
        let next: Vec<usize> = live
            .iter()
            .copied()
            .filter(|&f| residual[f].is_positive())
            .collect();
        for &f in &live {
            weights[f] = residual[f].clone();
        }
        trace.levels.push(TraceLevel {
            edge: e,
            scale,
            what,
            live: std::mem::replace(&mut live, next),
            residual,
        });
    }

    let mut load = vec![0u64; h.num_vertices()];
    let mut solution = IntegralSolution::zeros(m);
    for level in trace.levels.iter().rev() {
        let e = level.edge;
        let d = instance.d[e];
        if h.edge(e).iter().all(|&v| load[v] + d <= instance.b[v]) {
            for &v in h.edge(e) {
                load[v] += d;
            }
            solution.multiplicities[e] = 1;
        }
    }
    if !instance.is_feasible(&solution) {
        return Err(Error::invariant(
            "local-ratio output is infeasible",
            format!("{:?}", solution.multiplicities),
        ));
    }
    trace.check(&instance.w)?;
    let value = solution.weight(&instance.w);
    Ok(DemandMatching {
        solution,
        value,
        trace,
    })
}
