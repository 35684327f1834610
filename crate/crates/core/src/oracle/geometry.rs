//! Finite planes over small Galois fields: PG(2, q) and the dual of AG(2, q).

use crate::error::{Error, Result};
use crate::hypergraph::{BMatchInstance, BipartiteWitness, Capacity, Hypergraph};
use crate::rational::int;

pub const SUPPORTED_ORDERS: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];

/// GF(q) with elements `0..q`. Prime orders use modular arithmetic; for
/// `q = p^n` an element is the base-`p` digit vector of a polynomial and
/// products are reduced modulo a Conway polynomial.
#[derive(Clone, Debug)]
pub struct GaloisField {
    q: usize,
    add: Vec<Vec<usize>>,
    mul: Vec<Vec<usize>>,
}

impl GaloisField {
    pub fn new(q: u64) -> Result<Self> {
        // (p, n, low coefficients of the monic Conway polynomial of degree n)
        let (p, n, modulus): (usize, usize, &[usize]) = match q {
            2 | 3 | 5 | 7 => (q as usize, 1, &[]),
            4 => (2, 2, &[1, 1]),       // x^2 + x + 1
            8 => (2, 3, &[1, 1, 0]),    // x^3 + x + 1
            9 => (3, 2, &[2, 2]),       // x^2 + 2x + 2
            _ => return Err(Error::UnsupportedOrder(q)),
        };
        let q = q as usize;
        let digits = |mut a: usize| {
            let mut out = vec![0; n];
            for d in out.iter_mut() {
                *d = a % p;
                a /= p;
            }
            out
        };
        let pack = |ds: &[usize]| ds.iter().rev().fold(0, |acc, &d| acc * p + d);

        let mut add = vec![vec![0; q]; q];
        let mut mul = vec![vec![0; q]; q];
        for a in 0..q {
            for b in 0..q {
                let (da, db) = (digits(a), digits(b));
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a][b] = pack(&sum);

                let mut prod = vec![0; 2 * n];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                // x^n = -(modulus), applied from the top degree down.
                for top in (n..2 * n).rev() {
                    let coeff = prod[top];
                    if coeff == 0 {
                        continue;
                    }
                    prod[top] = 0;
                    for (i, m) in modulus.iter().enumerate() {
                        let at = top - n + i;
                        prod[at] = (prod[at] + coeff * (p - m)) % p;
                    }
                }
                mul[a][b] = pack(&prod[..n]);
            }
        }
        let field = Self { q, add, mul };
        field.check_axioms()?;
        Ok(field)
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a][b]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        (0..self.q)
            .find(|&c| self.add[c][b] == a)
            .expect("additive group is a group")
    }

    fn check_axioms(&self) -> Result<()> {
        for a in 1..self.q {
            if (0..self.q).filter(|&b| self.mul[a][b] == 1).count() != 1 {
                return Err(Error::invariant(
                    format!("GF({}) element {a} has no unique inverse", self.q),
                    String::new(),
                ));
            }
        }
        Ok(())
    }
}

/// Normalized representatives of the 1-dimensional subspaces of GF(q)^3:
/// the first nonzero coordinate is 1.
fn projective_points(f: &GaloisField) -> Vec<[usize; 3]> {
    let q = f.order();
    let mut out = Vec::with_capacity(q * q + q + 1);
    for a in 0..q {
        for b in 0..q {
            out.push([1, a, b]);
        }
    }
    for a in 0..q {
        out.push([0, 1, a]);
    }
    out.push([0, 0, 1]);
    out
}

/// Whether every pair of edges meets in exactly one vertex and every pair of
/// vertices lies on exactly one edge.
pub fn is_projective_plane(h: &Hypergraph) -> bool {
    let m = h.num_edges();
    for e in 0..m {
        for f in e + 1..m {
            let shared = h.edge(e).iter().filter(|&&v| h.contains(f, v)).count();
            if shared != 1 {
                return false;
            }
        }
    }
    let n = h.num_vertices();
    for u in 0..n {
        for v in u + 1..n {
            let common = h.incident(u).iter().filter(|&&e| h.contains(e, v)).count();
            if common != 1 {
                return false;
            }
        }
    }
    true
}

fn unit_instance(h: Hypergraph) -> BMatchInstance {
    let m = h.num_edges();
    let n = h.num_vertices();
    BMatchInstance {
        hypergraph: h,
        b: vec![1; n],
        c: vec![Capacity::Finite(1); m],
        w: vec![int(1); m],
        bipartite_witness: None,
    }
}

/// PG(2, q): points are vertices, lines are edges of size `q + 1`.
pub fn gen_projective_plane(q: u64) -> Result<BMatchInstance> {
    let f = GaloisField::new(q)?;
    let points = projective_points(&f);
    let on = |p: &[usize; 3], l: &[usize; 3]| {
        let dot = (0..3).fold(0, |acc, i| f.add(acc, f.mul(p[i], l[i])));
        dot == 0
    };
    let lines: Vec<Vec<usize>> = points
        .iter()
        .map(|l| (0..points.len()).filter(|&i| on(&points[i], l)).collect())
        .collect();
    let h = Hypergraph::new(points.len(), lines)?;
    let q = q as usize;
    if h.k() != q + 1
        || h.edges().iter().any(|e| e.len() != q + 1)
        || (0..h.num_vertices()).any(|v| h.incident(v).len() != q + 1)
        || !is_projective_plane(&h)
    {
        return Err(Error::invariant(
            format!("PG(2, {q}) construction failed its incidence checks"),
            format!("{:?}", h.edges()),
        ));
    }
    Ok(unit_instance(h))
}

/// Dual of AG(2, q): the `q² + q` affine lines are vertices and the `q²`
/// points are edges (each point lies on `q + 1` lines). The vertical lines
/// form a parallel class meeting every edge once, which is the witness.
pub fn gen_truncated_plane(q: u64) -> Result<BMatchInstance> {
    let f = GaloisField::new(q)?;
    let q = q as usize;
    // Line y = m·x + c is vertex m·q + c; line x = c is vertex q² + c.
    let mut edges = Vec::with_capacity(q * q);
    for x in 0..q {
        for y in 0..q {
            let mut e: Vec<usize> = (0..q).map(|m| m * q + f.sub(y, f.mul(m, x))).collect();
            e.push(q * q + x);
            edges.push(e);
        }
    }
    let h = Hypergraph::new(q * q + q, edges)?;
    let pairwise = (0..h.num_edges()).all(|e| {
        (e + 1..h.num_edges())
            .all(|g| h.edge(e).iter().filter(|&&v| h.contains(g, v)).count() == 1)
    });
    if h.k() != q + 1 || !pairwise {
        return Err(Error::invariant(
            format!("dual AG(2, {q}) construction failed its incidence checks"),
            format!("{:?}", h.edges()),
        ));
    }
    let witness = BipartiteWitness::new(q * q..q * q + q);
    let instance = unit_instance(h).with_witness(witness);
    if !instance.has_valid_witness() {
        return Err(Error::invariant(
            "vertical lines do not meet every point exactly once",
            String::new(),
        ));
    }
    Ok(instance)
}
