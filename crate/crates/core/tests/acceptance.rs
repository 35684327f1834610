//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hypermatch::exec::Execution;
use hypermatch::hypergraph::{BMatchInstance, DemandInstance, IntegralSolution};
use hypermatch::local_ratio::hdm;
use hypermatch::oracle::random::{auction_suite, bmatch_suite, colored_suite, demand_suite};
use hypermatch::oracle::{
    feasible_demand_subsets, gen_projective_plane, gen_truncated_plane, BruteForce,
};
use hypermatch::packing::Decomposition;
use hypermatch::rational::{int, ratio, uint, Rational};
use hypermatch::reductions::{
    allocation_lp_value, auction_to_bipartite, bounded_color_to_bipartite, sample_allocation,
    solve_bounded_color, ColoredInstance,
};
use hypermatch::{check_bipartite_witness, decompose, lp};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: hypermatch::Error) -> String {
    e.to_string()
}

/// Loads and capacities recomputed from scratch.
fn feasible(inst: &BMatchInstance, x: &IntegralSolution) -> bool {
    let h = &inst.hypergraph;
    let mut load = vec![0u64; h.num_vertices()];
    for (e, &m) in x.multiplicities.iter().enumerate() {
        let cap = h.edge(e).iter().map(|&v| inst.b[v]).min().unwrap_or(0);
        let cap = match inst.c[e] {
            hypermatch::Capacity::Finite(c) => c.min(cap),
            hypermatch::Capacity::Unbounded => cap,
        };
        if m > cap {
            return false;
        }
        for &v in h.edge(e) {
            load[v] += m;
        }
    }
    load.iter().zip(&inst.b).all(|(l, b)| l <= b)
}

fn weight(x: &IntegralSolution, w: &[Rational]) -> Rational {
    x.multiplicities
        .iter()
        .zip(w)
        .fold(int(0), |acc, (&m, we)| acc + uint(m) * we)
}

/// Exactness checks shared by every decomposition: mass, recomposition,
/// term feasibility and the certified bound.
fn audit(inst: &BMatchInstance, dec: &Decomposition) -> Result<Rational, String> {
    let comb = &dec.combination;
    let mass = comb.terms().iter().fold(int(0), |acc, t| acc + &t.lambda);
    ensure(mass == dec.rho && comb.alpha() == &dec.rho, || {
        format!("Σλ = {mass}, ρ = {}", dec.rho)
    })?;
    let mut value = vec![int(0); inst.hypergraph.num_edges()];
    for t in comb.terms() {
        ensure(t.lambda > int(0), || "nonpositive multiplier".into())?;
        ensure(feasible(inst, &t.solution), || {
            format!("infeasible term {:?}", t.solution.multiplicities)
        })?;
        for (v, &m) in value.iter_mut().zip(&t.solution.multiplicities) {
            *v += &t.lambda * uint(m);
        }
    }
    ensure(value == dec.lp.solution.values, || "Σλx^i ≠ x*".into())?;
    let lp_value: Rational = dec
        .lp
        .solution
        .values
        .iter()
        .zip(&inst.w)
        .map(|(x, w)| x * w)
        .sum();
    ensure(lp_value == dec.lp.value, || "LP value does not match x*".into())?;
    let best = comb
        .terms()
        .iter()
        .map(|t| weight(&t.solution, &inst.w))
        .max()
        .unwrap_or_else(|| int(0));
    ensure(&best * &dec.rho >= dec.lp.value, || {
        format!("best {best} · ρ {} < LP {}", dec.rho, dec.lp.value)
    })?;
    Ok(best)
}

fn tight_gap(inst: &BMatchInstance, lp_target: Rational, rho: Rational) -> Result<(), String> {
    let dec = decompose(inst).map_err(err)?;
    ensure(dec.lp.value == lp_target, || format!("LP = {}", dec.lp.value))?;
    let (ilp, _) = BruteForce::default().bmatch(inst).map_err(err)?;
    ensure(ilp == int(1), || format!("ILP = {ilp}"))?;
    ensure(dec.rho == rho, || format!("ρ = {}", dec.rho))?;
    let best = audit(inst, &dec)?;
    ensure(best == int(1), || format!("best = {best}"))?;
    let ratio = &dec.lp.value / &best;
    ensure(ratio == rho, || format!("ratio = {ratio}"))?;
    Ok(())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let fano = gen_projective_plane(2).map_err(err)?;
    tight_gap(&fano, ratio(7, 3), ratio(7, 3))?;
    let fano_time = start.elapsed();
    ensure(fano_time < Duration::from_secs(1), || format!("Fano took {fano_time:?}"))?;
    let pg3 = gen_projective_plane(3).map_err(err)?;
    tight_gap(&pg3, ratio(13, 4), ratio(13, 4))?;
    Ok(format!("Fano LP 7/3, ratio 7/3 ({fano_time:.2?}); PG(2,3) LP 13/4, ratio 13/4"))
}

fn criterion_2() -> Outcome {
    let ag = gen_truncated_plane(2).map_err(err)?;
    ensure(ag.has_valid_witness(), || "witness rejected".into())?;
    tight_gap(&ag, int(2), int(2))?;
    let dec = decompose(&ag).map_err(err)?;
    ensure(dec.bipartite, || "decomposition not bipartite".into())?;
    Ok("dual AG(2,2) LP 2, α 2, ratio 2".into())
}

struct Suite {
    general: Vec<BMatchInstance>,
    bipartite: Vec<BMatchInstance>,
}

fn suite() -> Suite {
    Suite {
        general: bmatch_suite(1_000, 200, false),
        bipartite: bmatch_suite(2_000, 200, true),
    }
}

fn criterion_3(s: &Suite) -> Outcome {
    let all: Vec<&BMatchInstance> = s.general.iter().chain(&s.bipartite).collect();
    let results = Execution::Parallel.map(&all, |inst| -> Result<usize, String> {
        let dec = decompose(inst).map_err(err)?;
        let expect_bipartite = inst.has_valid_witness() && inst.hypergraph.k() >= 2;
        ensure(dec.bipartite == expect_bipartite, || "witness handling differs".into())?;
        audit(inst, &dec)?;
        // Every modified packing step re-checks (i)/(ii) and fails loudly.
        Ok(dec.core.steps_checked)
    });
    let mut steps = 0;
    for (i, r) in results.into_iter().enumerate() {
        steps += r.map_err(|e| format!("instance {i}: {e}"))?;
    }
    Ok(format!("{} instances, {steps} packing steps checked", all.len()))
}

fn criterion_4(s: &Suite) -> Outcome {
    let all: Vec<&BMatchInstance> = s.general.iter().chain(&s.bipartite).collect();
    let results = Execution::Parallel.map(&all, |inst| -> Result<(), String> {
        let dec = decompose(inst).map_err(err)?;
        let expected = dec.combination.expected_value(&inst.w).map_err(err)?;
        let direct = dec
            .combination
            .terms()
            .iter()
            .fold(int(0), |acc, t| acc + &t.lambda / &dec.rho * weight(&t.solution, &inst.w));
        ensure(expected == direct && expected == &dec.lp.value / &dec.rho, || {
            format!("E = {expected}, LP/ρ = {}", &dec.lp.value / &dec.rho)
        })
    });
    for (i, r) in results.into_iter().enumerate() {
        r.map_err(|e| format!("instance {i}: {e}"))?;
    }
    Ok(format!("{} instances, E[w] = LP/ρ exactly", all.len()))
}

fn demand_feasible(inst: &DemandInstance, chosen: &[usize]) -> bool {
    let mut load = vec![0u64; inst.hypergraph.num_vertices()];
    for &e in chosen {
        for &v in inst.hypergraph.edge(e) {
            load[v] += inst.d[e];
        }
    }
    load.iter().zip(&inst.b).all(|(l, b)| l <= b)
}

fn what_weight_properties(inst: &DemandInstance, k: usize) -> Result<usize, String> {
    let out = hdm(inst).map_err(err)?;
    let bound = uint(2 * k as u64);
    let mut checked = 0;
    for level in &out.trace.levels {
        let e = level.edge;
        ensure(level.what[e] == int(1), || "ŵ_e ≠ 1".into())?;
        let subsets = feasible_demand_subsets(inst, &level.live, 1 << 12).map_err(err)?;
        for x in &subsets {
            let w_hat: Rational = x.iter().map(|&f| &level.what[f]).sum();
            ensure(w_hat <= bound, || format!("(i): ŵ({x:?}) = {w_hat} > 2k"))?;
            if !x.contains(&e) {
                let mut with_e = x.clone();
                with_e.push(e);
                if !demand_feasible(inst, &with_e) {
                    ensure(w_hat >= int(1), || format!("(iii): ŵ({x:?}) = {w_hat} < 1"))?;
                }
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn criterion_5(demand: &[DemandInstance]) -> Outcome {
    let results = Execution::Parallel.map(demand, |inst| -> Result<usize, String> {
        let out = hdm(inst).map_err(err)?;
        let chosen = out.solution.edge_list();
        ensure(
            out.solution.multiplicities.iter().all(|&m| m <= 1) && demand_feasible(inst, &chosen),
            || "hdm output infeasible".into(),
        )?;
        let k = inst.hypergraph.k();
        let factor = uint(2 * k as u64);
        let lp_value = lp::solve_to_vertex(&lp::build_demand_lp(inst)).map_err(err)?.value;
        let (ilp, _) = BruteForce::default().demand(inst).map_err(err)?;
        ensure(&out.value * &factor >= lp_value, || {
            format!("w(F) = {} · 2k < LP = {lp_value}", out.value)
        })?;
        ensure(&out.value * &factor >= ilp, || format!("w(F) · 2k < ILP = {ilp}"))?;
        if inst.hypergraph.num_edges() <= 8 {
            what_weight_properties(inst, k)
        } else {
            Ok(0)
        }
    });
    let mut subsets = 0;
    for (i, r) in results.into_iter().enumerate() {
        subsets += r.map_err(|e| format!("instance {i}: {e}"))?;
    }
    Ok(format!("{} instances, {subsets} level/subset pairs enumerated", demand.len()))
}

/// Source-side optimum over all multiplicity vectors, checked directly
/// against b, c and the color budgets.
fn colored_optimum(ci: &ColoredInstance) -> Rational {
    let base = ci.base.clone().validate().expect("suite instances validate");
    let m = base.hypergraph.num_edges();
    let caps: Vec<u64> = (0..m).map(|e| base.cap(e)).collect();
    let mut x = vec![0u64; m];
    let mut best = int(0);
    loop {
        let sol = IntegralSolution { multiplicities: x.clone() };
        let mut used = vec![0u64; ci.budgets.len()];
        for (e, &mult) in x.iter().enumerate() {
            used[ci.colors[e]] += mult;
        }
        if feasible(&base, &sol) && used.iter().zip(&ci.budgets).all(|(u, b)| u <= b) {
            best = best.max(weight(&sol, &base.w));
        }
        let Some(i) = (0..m).find(|&i| x[i] < caps[i]) else { break };
        x[i] += 1;
        x[..i].iter_mut().for_each(|v| *v = 0);
    }
    best
}

fn criterion_6(colored: &[ColoredInstance]) -> Outcome {
    let results = Execution::Parallel.map(colored, |ci| -> Result<(), String> {
        let (reduced, _) = bounded_color_to_bipartite(ci).map_err(err)?;
        let u = &reduced.bipartite_witness.as_ref().expect("witness attached").distinguished_set;
        ensure(check_bipartite_witness(&reduced.hypergraph, u), || "witness fails".into())?;
        ensure(reduced.hypergraph.k() <= 3, || "edge larger than k + 1".into())?;
        let out = solve_bounded_color(ci).map_err(err)?;
        ensure(out.decomposition.rho == int(2), || format!("ρ = {}", out.decomposition.rho))?;
        audit(&reduced, &out.decomposition)?;
        let best = &out.report.best_solution;
        let mut used = vec![0u64; ci.budgets.len()];
        for (e, &m) in best.multiplicities.iter().enumerate() {
            used[ci.colors[e]] += m;
        }
        let base = ci.base.clone().validate().map_err(err)?;
        ensure(
            feasible(&base, best) && used.iter().zip(&ci.budgets).all(|(u, b)| u <= b),
            || "mapped-back best violates budgets".into(),
        )?;
        let best_value = weight(best, &ci.base.w);
        ensure(&best_value * int(2) >= out.decomposition.lp.value, || {
            format!("w(best) = {best_value}, LP = {}", out.decomposition.lp.value)
        })?;
        let (target_ilp, _) = BruteForce::default().bmatch(&reduced).map_err(err)?;
        let source_ilp = colored_optimum(ci);
        ensure(source_ilp == target_ilp, || {
            format!("source ILP {source_ilp} ≠ target ILP {target_ilp}")
        })
    });
    for (i, r) in results.into_iter().enumerate() {
        r.map_err(|e| format!("instance {i}: {e}"))?;
    }
    Ok(format!("{} colored instances", colored.len()))
}

fn criterion_7() -> Outcome {
    let auctions = auction_suite(7_000, 50);
    let results = Execution::Parallel.map(&auctions, |a| -> Result<(), String> {
        let (reduced, _) = auction_to_bipartite(a).map_err(err)?;
        ensure(reduced.hypergraph.k() == 3, || format!("k = {}", reduced.hypergraph.k()))?;
        for seed in 0..8 {
            let out = sample_allocation(a, seed).map_err(err)?;
            ensure(out.rho == int(2), || format!("ρ = {}", out.rho))?;
            ensure(out.expected_welfare == &out.lp_value / int(2), || {
                format!("E[welfare] = {}, LP = {}", out.expected_welfare, out.lp_value)
            })?;
            ensure(&out.best_welfare * int(2) >= out.lp_value, || "best < LP/2".into())?;
            let mut sold = vec![false; a.items];
            for bid in out.assignment.iter().flatten() {
                for &j in &a.bids[*bid].items {
                    ensure(!sold[j], || format!("item {j} sold twice"))?;
                    sold[j] = true;
                }
            }
        }
        let direct = allocation_lp_value(a).map_err(err)?;
        let lp_value = decompose(&reduced).map_err(err)?.lp.value;
        ensure(direct == lp_value, || format!("LP (A) = {direct}, matching LP = {lp_value}"))
    });
    for (i, r) in results.into_iter().enumerate() {
        r.map_err(|e| format!("auction {i}: {e}"))?;
    }
    Ok(format!("{} auctions × 8 seeds", auctions.len()))
}

fn sandwich(inst: &BMatchInstance) -> Result<(), String> {
    let dec = decompose(inst).map_err(err)?;
    let (ilp, witness) = BruteForce::default().bmatch(inst).map_err(err)?;
    ensure(feasible(inst, &witness) && weight(&witness, &inst.w) == ilp, || {
        "oracle witness inconsistent".into()
    })?;
    let (_, best) = dec.best_term(&inst.w).map_err(err)?;
    ensure(best <= ilp && ilp <= dec.lp.value, || {
        format!("best {best}, ILP {ilp}, LP {}", dec.lp.value)
    })
}

fn criterion_8(s: &Suite, demand: &[DemandInstance], colored: &[ColoredInstance]) -> Outcome {
    let mut bmatch: Vec<BMatchInstance> = vec![
        gen_projective_plane(2).map_err(err)?,
        gen_truncated_plane(2).map_err(err)?,
    ];
    bmatch.extend(s.general.iter().cloned());
    bmatch.extend(s.bipartite.iter().cloned());
    for ci in colored {
        bmatch.push(bounded_color_to_bipartite(ci).map_err(err)?.0);
    }
    for a in auction_suite(7_000, 50) {
        bmatch.push(auction_to_bipartite(&a).map_err(err)?.0);
    }
    bmatch.retain(|inst| inst.hypergraph.num_edges() <= 10);
    for (i, r) in Execution::Parallel.map(&bmatch, sandwich).into_iter().enumerate() {
        r.map_err(|e| format!("b-matching instance {i}: {e}"))?;
    }
    let results = Execution::Parallel.map(demand, |inst| -> Result<(), String> {
        let out = hdm(inst).map_err(err)?;
        let (ilp, _) = BruteForce::default().demand(inst).map_err(err)?;
        let lp_value = lp::solve_to_vertex(&lp::build_demand_lp(inst)).map_err(err)?.value;
        ensure(out.value <= ilp && ilp <= lp_value, || {
            format!("hdm {}, ILP {ilp}, LP {lp_value}", out.value)
        })
    });
    for (i, r) in results.into_iter().enumerate() {
        r.map_err(|e| format!("demand instance {i}: {e}"))?;
    }
    Ok(format!(
        "{} b-matching and {} demand instances sandwiched",
        bmatch.len(),
        demand.len()
    ))
}

fn main() -> ExitCode {
    let s = suite();
    let demand = demand_suite(5_000, 200);
    let colored = colored_suite(6_000, 100);
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("tight gap, general case", Duration::from_secs(3), Box::new(criterion_1)),
        ("tight gap, bipartite case", Duration::from_secs(1), Box::new(criterion_2)),
        ("LP-relative guarantee suite", Duration::from_secs(60), Box::new(|| criterion_3(&s))),
        ("expected-value identity", Duration::from_secs(60), Box::new(|| criterion_4(&s))),
        ("demand matching", Duration::from_secs(120), Box::new(|| criterion_5(&demand))),
        ("bounded-color reduction", Duration::from_secs(60), Box::new(|| criterion_6(&colored))),
        ("auction welfare", Duration::from_secs(60), Box::new(criterion_7)),
        (
            "oracle equivalence",
            Duration::from_secs(120),
            Box::new(|| criterion_8(&s, &demand, &colored)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, ceiling, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *ceiling => Err(format!("{detail}; too slow (limit {ceiling:?})")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why} ({elapsed:.2?})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
