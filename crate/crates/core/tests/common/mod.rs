//! Independent oracles shared by the integration tests. Nothing here calls
//! the burning algorithm or the reduction engine.
#![allow(dead_code)]

use std::collections::HashMap;

use gonlab::graph::Multigraph;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Linear equivalence through the inverse of the reduced Laplacian: with the
/// last vertex dropped, `d1 ~ d2` iff the degrees agree and
/// `L̃⁻¹ (d1 - d2)` is integral.
pub struct LatticeOracle {
    n: usize,
    inv: Vec<Vec<BigRational>>,
}

impl LatticeOracle {
    pub fn new(g: &Multigraph) -> Self {
        assert!(g.is_connected());
        let n = g.vertex_count();
        let m = n - 1;
        let lap = g.laplacian();
        let big = |x: i64| BigRational::from_integer(BigInt::from(x));
        let mut a: Vec<Vec<BigRational>> = (0..m)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..m).map(|j| big(lap.get(i, j))).collect();
                row.extend((0..m).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
                row
            })
            .collect();
        for col in 0..m {
            let pivot = (col..m).find(|&r| !a[r][col].is_zero()).expect("reduced Laplacian is invertible");
            a.swap(col, pivot);
            let p = a[col][col].clone();
            for x in a[col].iter_mut() {
                *x = &*x / &p;
            }
            let pivot_row = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != col && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (x, p) in row.iter_mut().zip(&pivot_row) {
                        *x = &*x - &f * p;
                    }
                }
            }
        }
        let inv = a.into_iter().map(|row| row[m..].to_vec()).collect();
        Self { n, inv }
    }

    /// Class of a chip vector among vectors of the same degree.
    pub fn key(&self, chips: &[i64]) -> Vec<BigRational> {
        assert_eq!(chips.len(), self.n);
        self.inv
            .iter()
            .map(|row| {
                let mut s = BigRational::zero();
                for (x, &c) in row.iter().zip(chips) {
                    s += x * BigRational::from_integer(BigInt::from(c));
                }
                &s - s.floor()
            })
            .collect()
    }

    pub fn equivalent(&self, a: &[i64], b: &[i64]) -> bool {
        a.iter().sum::<i64>() == b.iter().sum::<i64>() && self.key(a) == self.key(b)
    }
}

/// Every effective chip vector of degree `d` on `n` vertices.
pub fn effective_divisors(n: usize, d: i64) -> Vec<Vec<i64>> {
    fn rec(v: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if v + 1 == cur.len() {
            cur[v] = left;
            out.push(cur.clone());
            return;
        }
        for c in 0..=left {
            cur[v] = c;
            rec(v + 1, left - c, cur, out);
        }
    }
    let mut out = Vec::new();
    if n > 0 && d >= 0 {
        rec(0, d, &mut vec![0; n], &mut out);
    }
    out
}

/// Positive rank by brute force: every vertex carries a chip in some
/// effective divisor of the class.
pub fn oracle_positive_rank(oracle: &LatticeOracle, chips: &[i64]) -> bool {
    let n = chips.len();
    let d: i64 = chips.iter().sum();
    if d < 1 {
        return false;
    }
    let key = oracle.key(chips);
    let mut covered = vec![false; n];
    for e in effective_divisors(n, d) {
        if oracle.key(&e) == key {
            for v in 0..n {
                covered[v] |= e[v] > 0;
            }
        }
    }
    covered.iter().all(|&c| c)
}

/// Gonality by grouping all effective divisors of each degree into classes.
pub fn oracle_gonality(g: &Multigraph) -> usize {
    let n = g.vertex_count();
    let oracle = LatticeOracle::new(g);
    let full = (1u64 << n) - 1;
    for d in 1..=n as i64 {
        let mut classes: HashMap<Vec<BigRational>, u64> = HashMap::new();
        for e in effective_divisors(n, d) {
            let mask = (0..n).filter(|&v| e[v] > 0).fold(0u64, |m, v| m | 1 << v);
            *classes.entry(oracle.key(&e)).or_default() |= mask;
        }
        if classes.values().any(|&m| m == full) {
            return d as usize;
        }
    }
    unreachable!("n chips, one per vertex, always have positive rank")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected Erdős–Rényi-style graph; with `multi`, some edges are doubled.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, p: f64, multi: bool) -> Multigraph {
    loop {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(p) {
                    edges.push((a, b));
                    if multi && rng.random_bool(0.2) {
                        edges.push((a, b));
                    }
                }
            }
        }
        let g = Multigraph::from_edges(n, &edges).unwrap();
        if g.is_connected() {
            return g;
        }
    }
}

/// Every subset of `0..n` as a mask.
pub fn masks(n: usize) -> impl Iterator<Item = u64> {
    0..1u64 << n
}

pub fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|&v| mask >> v & 1 == 1).collect()
}

/// Edges with exactly one end in `mask`, counted with multiplicity.
pub fn boundary(g: &Multigraph, mask: u64) -> u64 {
    g.edges()
        .filter(|&(a, b, _)| (mask >> a & 1) != (mask >> b & 1))
        .map(|(_, _, m)| u64::from(m))
        .sum()
}
