//! Divisors (chip configurations) and chip-firing moves.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::Multigraph;
use crate::reduction;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DivisorError {
    #[error("malformed divisor literal `{0}`; expected `v:c` pairs such as `0:1,4:2`")]
    Malformed(String),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
}

/// Integer chip vector indexed by vertex. Coefficients may be negative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Divisor {
    chips: Vec<i64>,
}

impl Divisor {
    pub fn zero(n: usize) -> Self {
        Self { chips: vec![0; n] }
    }

    pub fn from_chips(chips: Vec<i64>) -> Self {
        Self { chips }
    }

    /// One chip on each listed vertex (repeats accumulate).
    pub fn from_vertices(n: usize, vertices: &[usize]) -> Self {
        let mut d = Self::zero(n);
        for &v in vertices {
            d.chips[v] += 1;
        }
        d
    }

    /// Parses the `v:c,v:c` literal against a graph with `n` vertices.
    /// Unlisted vertices hold zero chips; repeated vertices accumulate.
    pub fn parse(text: &str, n: usize) -> Result<Self, DivisorError> {
        let malformed = || DivisorError::Malformed(text.to_string());
        let mut d = Self::zero(n);
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (v, c) = item.split_once(':').ok_or_else(malformed)?;
            let v: usize = v.trim().parse().map_err(|_| malformed())?;
            let c: i64 = c.trim().parse().map_err(|_| malformed())?;
            if v >= n {
                return Err(DivisorError::VertexOutOfRange { vertex: v, n });
            }
            d.chips[v] += c;
        }
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn chips(&self) -> &[i64] {
        &self.chips
    }

    pub fn get(&self, v: usize) -> i64 {
        self.chips[v]
    }

    pub fn add(&mut self, v: usize, c: i64) {
        self.chips[v] += c;
    }

    pub fn degree(&self) -> i64 {
        self.chips.iter().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.chips.iter().all(|&c| c >= 0)
    }

    /// Non-negative everywhere except possibly at `v`.
    pub fn is_effective_away_from(&self, v: usize) -> bool {
        self.chips
            .iter()
            .enumerate()
            .all(|(w, &c)| w == v || c >= 0)
    }

    /// Vertices holding at least one chip. Only meaningful for effective divisors.
    pub fn support(&self) -> Vec<usize> {
        debug_assert!(self.is_effective(), "support of a non-effective divisor");
        (0..self.chips.len()).filter(|&v| self.chips[v] > 0).collect()
    }

    /// `self - other`, coefficientwise.
    pub fn difference(&self, other: &Divisor) -> Divisor {
        assert_eq!(self.len(), other.len(), "divisors live on different graphs");
        Divisor::from_chips(
            self.chips
                .iter()
                .zip(&other.chips)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// `self + other`, coefficientwise.
    pub fn sum(&self, other: &Divisor) -> Divisor {
        assert_eq!(self.len(), other.len(), "divisors live on different graphs");
        Divisor::from_chips(
            self.chips
                .iter()
                .zip(&other.chips)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Renders as the `v:c` literal, omitting zero entries.
    pub fn to_literal(&self) -> String {
        self.chips
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(v, c)| format!("{v}:{c}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

impl Serialize for Divisor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.chips.serialize(s)
    }
}

/// Parses a literal whose vertex count is the largest index plus one.
impl FromStr for Divisor {
    type Err = DivisorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let max = s
            .split(',')
            .filter_map(|item| item.split_once(':'))
            .filter_map(|(v, _)| v.trim().parse::<usize>().ok())
            .max()
            .map_or(0, |v| v + 1);
        Divisor::parse(s, max)
    }
}

/// Fires `v` once: it loses `val(v)` chips and each neighbour `w` gains
/// `ε(w, v)`.
pub fn fire_vertex(g: &Multigraph, d: &Divisor, v: usize) -> Divisor {
    let mut out = d.clone();
    fire_vertex_in_place(g, &mut out, v, 1);
    out
}

pub(crate) fn fire_vertex_in_place(g: &Multigraph, d: &mut Divisor, v: usize, times: i64) {
    d.chips[v] -= times * i64::from(g.valence(v));
    for &(w, m) in g.neighbors(v) {
        d.chips[w] += times * i64::from(m);
    }
}

/// Fires every vertex of `set` once. Edges internal to the set cancel, so only
/// boundary edges move chips.
pub fn fire_set(g: &Multigraph, d: &Divisor, set: &[usize]) -> Divisor {
    let mut mask = vec![false; g.vertex_count()];
    for &v in set {
        mask[v] = true;
    }
    let mut out = d.clone();
    fire_mask_in_place(g, &mut out, &mask, 1);
    out
}

pub(crate) fn fire_mask_in_place(g: &Multigraph, d: &mut Divisor, mask: &[bool], times: i64) {
    for v in (0..g.vertex_count()).filter(|&v| mask[v]) {
        for &(w, m) in g.neighbors(v) {
            if !mask[w] {
                let moved = times * i64::from(m);
                d.chips[v] -= moved;
                d.chips[w] += moved;
            }
        }
    }
}

/// Whether `d1 - d2` lies in the image of the Laplacian.
///
/// Decided by comparing reduced forms at vertex 0 on each connected component,
/// after checking that the degrees agree componentwise.
pub fn is_equivalent(g: &Multigraph, d1: &Divisor, d2: &Divisor) -> bool {
    assert_eq!(d1.len(), g.vertex_count(), "divisor does not match graph");
    assert_eq!(d2.len(), g.vertex_count(), "divisor does not match graph");
    if d1.degree() != d2.degree() {
        return false;
    }
    if g.is_connected() {
        let a = reduction::v_reduce(g, d1, 0).expect("connected graph");
        let b = reduction::v_reduce(g, d2, 0).expect("connected graph");
        return a == b;
    }
    // Firing never moves chips between components, so compare each separately.
    g.components(&[]).iter().all(|comp| {
        let sub = induced(g, comp);
        let pick = |d: &Divisor| Divisor::from_chips(comp.iter().map(|&v| d.get(v)).collect());
        let (a, b) = (pick(d1), pick(d2));
        a.degree() == b.degree()
            && reduction::v_reduce(&sub, &a, 0).expect("component is connected")
                == reduction::v_reduce(&sub, &b, 0).expect("component is connected")
    })
}

fn induced(g: &Multigraph, vertices: &[usize]) -> Multigraph {
    let mut index = vec![None; g.vertex_count()];
    for (i, &v) in vertices.iter().enumerate() {
        index[v] = Some(i);
    }
    let edges: Vec<(usize, usize)> = g
        .edge_list()
        .into_iter()
        .filter_map(|(u, v)| Some((index[u]?, index[v]?)))
        .collect();
    Multigraph::from_edges(vertices.len(), &edges).expect("induced subgraph is valid")
}

/// `K(v) = val(v) - 2`, of degree `2·genus - 2` on a connected graph.
pub fn canonical_divisor(g: &Multigraph) -> Divisor {
    Divisor::from_chips(g.valences().iter().map(|&d| i64::from(d) - 2).collect())
}
