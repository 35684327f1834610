use hypermatch::oracle::{gen_projective_plane, gen_truncated_plane, BruteForce};
use hypermatch::packing::decompose_with;
use hypermatch::rational::{int, ratio, uint, Rational};
use hypermatch::{
    decompose, AlphaConvexCombination, BMatchInstance, Hypergraph, IntegralSolution, Term,
};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn matchings(h: &Hypergraph) -> Vec<IntegralSolution> {
    let m = h.num_edges();
    (0u32..1 << m)
        .map(|mask| IntegralSolution {
            multiplicities: (0..m).map(|e| ((mask >> e) & 1) as u64).collect(),
        })
        .filter(|x| {
            h.integral_loads(&x.multiplicities, None)
                .iter()
                .all(|&l| l <= 1)
        })
        .collect()
}

fn is_matching(h: &Hypergraph, x: &IntegralSolution) -> bool {
    h.integral_loads(&x.multiplicities, None).iter().all(|&l| l <= 1)
}

/// Packing a 0/1 matching that leaves room `t` at `e` always succeeds once
/// `α ≥ k - (k-1)t`: every two-matching combination on a grid of
/// multipliers, all edges and all targets.
#[test]
fn basic_packing_step_has_room() {
    let planes = [
        Hypergraph::new(5, vec![vec![0, 1, 2], vec![0, 3, 4], vec![1, 3, 4], vec![2, 3, 4], vec![0, 1, 3]]).unwrap(),
        gen_projective_plane(2).unwrap().hypergraph,
    ];
    let grid = [ratio(1, 4), ratio(1, 2), ratio(3, 4)];
    let targets = [ratio(1, 4), ratio(1, 2), ratio(3, 4), int(1)];
    let mut steps = 0;
    for h in &planes {
        let k = h.k() as i64;
        let all = matchings(h);
        for (a, xa) in all.iter().enumerate() {
            for xb in &all[a..] {
                for la in &grid {
                    for lb in &grid {
                        for t in &targets {
                            let alpha = int(k) - int(k - 1) * t;
                            let rest = &alpha - la - lb;
                            if rest <= int(0) {
                                continue;
                            }
                            let terms = vec![
                                Term { lambda: la.clone(), solution: xa.clone() },
                                Term { lambda: lb.clone(), solution: xb.clone() },
                                Term { lambda: rest, solution: IntegralSolution::zeros(h.num_edges()) },
                            ];
                            let comb = AlphaConvexCombination::from_terms(h.num_edges(), terms).unwrap();
                            let degrees = h.fractional_degrees(comb.value());
                            for e in 0..h.num_edges() {
                                let fits = h.edge(e).iter().all(|&v| &degrees[v] + t <= int(1));
                                if !fits {
                                    continue;
                                }
                                let mut packed = comb.clone();
                                packed
                                    .packing_step(e, t, |grown| is_matching(h, grown))
                                    .unwrap_or_else(|err| panic!("e = {e}, t = {t}: {err}\n{}", comb.dump()));
                                assert_eq!(packed.mass(), alpha);
                                assert!(packed.terms().iter().all(|x| is_matching(h, &x.solution)));
                                let mut expected = comb.value().to_vec();
                                expected[e] += t;
                                assert_eq!(packed.value(), expected.as_slice());
                                assert!(packed.len() <= comb.len() + 1);
                                steps += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(steps > 1000, "only {steps} packing steps exercised");
}

/// Exact checks of a decomposition from first principles.
fn audit(inst: &BMatchInstance) -> (Rational, Rational, usize) {
    let dec = decompose(inst).unwrap();
    let comb = &dec.combination;
    let m = inst.hypergraph.num_edges();
    assert_eq!(comb.mass(), dec.rho);
    let mut value = vec![int(0); m];
    for t in comb.terms() {
        assert!(inst.is_feasible(&t.solution));
        for (v, &mult) in value.iter_mut().zip(&t.solution.multiplicities) {
            *v += &t.lambda * uint(mult);
        }
    }
    assert_eq!(value, dec.lp.solution.values);
    let (_, best) = dec.best_term(&inst.w).unwrap();
    assert!(&best * &dec.rho >= dec.lp.value);
    (dec.lp.value, best, dec.core.steps_checked)
}

/// Randomly weighted sub-planes and their multiples: the fractional
/// structure of projective and affine planes survives in many of them.
#[test]
fn planted_planes_decompose_exactly() {
    let mut r = ChaCha8Rng::seed_from_u64(17);
    let mut steps = 0;
    let mut fractional = 0;
    let bases = [
        gen_projective_plane(2).unwrap(),
        gen_projective_plane(3).unwrap(),
        gen_truncated_plane(2).unwrap(),
        gen_truncated_plane(3).unwrap(),
    ];
    for base in &bases {
        for _ in 0..25 {
            let h = &base.hypergraph;
            let m = h.num_edges();
            let size = r.gen_range(m / 2..=m);
            let mut keep = index::sample(&mut r, m, size).into_vec();
            keep.sort_unstable();
            let edges: Vec<Vec<usize>> = keep.iter().map(|&e| h.edge(e).to_vec()).collect();
            let n = h.num_vertices();
            let scale = r.gen_range(1..=2);
            let inst = BMatchInstance {
                hypergraph: Hypergraph::new(n, edges).unwrap(),
                b: (0..n).map(|_| scale).collect(),
                c: vec![hypermatch::Capacity::Finite(scale); keep.len()],
                w: (0..keep.len()).map(|_| ratio(r.gen_range(4..=6), r.gen_range(4..=5))).collect(),
                bipartite_witness: base.bipartite_witness.clone(),
            };
            let (lp, best, s) = audit(&inst);
            steps += s;
            if s > 0 {
                fractional += 1;
            }
            if keep.len() <= 10 {
                let (ilp, _) = BruteForce::default().bmatch(&inst).unwrap();
                assert!(best <= ilp && ilp <= lp);
            }
        }
    }
    assert!(fractional >= 20, "only {fractional} fractional instances");
    assert!(steps >= 60);
}

#[test]
fn integral_vertices_give_ratio_one() {
    // A path: the LP is integral and x* itself is a term.
    let h = Hypergraph::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
    let inst = BMatchInstance::simple(h, vec![1; 4], vec![int(2), int(1), int(2)]);
    let dec = decompose(&inst).unwrap();
    assert_eq!(dec.lp.value, int(4));
    assert_eq!(dec.certified_ratio(&inst.w).unwrap(), int(1));
    let (best, _) = dec.best_term(&inst.w).unwrap();
    assert_eq!(best.multiplicities, vec![1, 0, 1]);
}

#[test]
fn zero_weights_report_ratio_one() {
    let h = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
    let inst = BMatchInstance::simple(h, vec![1; 3], vec![int(0); 3]);
    let dec = decompose(&inst).unwrap();
    assert_eq!(dec.lp.value, int(0));
    assert_eq!(dec.certified_ratio(&inst.w).unwrap(), int(1));
}

#[test]
fn witness_can_be_ignored() {
    let ag = gen_truncated_plane(2).unwrap();
    let general = decompose_with(&ag, false).unwrap();
    assert!(!general.bipartite);
    assert_eq!(general.rho, ratio(7, 3));
    assert_eq!(general.lp.value, int(2));
    let bipartite = decompose(&ag).unwrap();
    assert_eq!(bipartite.rho, int(2));
}

#[test]
fn invalid_witness_is_rejected() {
    let mut fano = gen_projective_plane(2).unwrap();
    fano.bipartite_witness = Some(hypermatch::BipartiteWitness::new([0]));
    assert!(matches!(decompose(&fano), Err(hypermatch::Error::InvalidWitness(_))));
}

#[test]
fn integer_part_mixture_is_feasible() {
    // Edge {0,1} at value 1 next to a half-integral triangle on {2,3,4}.
    let h = Hypergraph::new(5, vec![vec![0, 1], vec![2, 3], vec![3, 4], vec![2, 4]]).unwrap();
    let mut inst = BMatchInstance::simple(h, vec![2, 2, 1, 1, 1], vec![int(3), int(1), int(1), int(1)]);
    inst.c[0] = hypermatch::Capacity::Finite(2);
    let dec = decompose(&inst).unwrap();
    assert_eq!(dec.lp.value, int(6) + ratio(3, 2));
    assert_eq!(dec.split.integer.multiplicities, vec![2, 0, 0, 0]);
    let (best, value) = dec.best_term(&inst.w).unwrap();
    assert_eq!(value, int(7));
    assert_eq!(best.multiplicities[0], 2);
    assert_eq!(dec.combination.expected_value(&inst.w).unwrap(), &dec.lp.value / &dec.rho);
}
