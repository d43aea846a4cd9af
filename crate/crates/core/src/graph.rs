//! Undirected loop-free multigraphs on dense vertex indices.
//!
//! A [`Multigraph`] is immutable once built. Every other module borrows one
//! and indexes vertices as `0..n`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("unknown named graph `{0}`")]
    UnknownName(String),
}

/// Loop-free undirected multigraph.
///
/// Neighbour lists are sorted by vertex index and carry the edge
/// multiplicity, so `neighbors(v)` lists each adjacent vertex exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    adj: Vec<Vec<(usize, u32)>>,
    valence: Vec<u32>,
    edge_count: usize,
}

impl Multigraph {
    /// Builds a graph from an edge list. Repeated pairs accumulate multiplicity.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            bump(&mut adj[u], v);
            bump(&mut adj[v], u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let valence: Vec<u32> = adj.iter().map(|l| l.iter().map(|&(_, m)| m).sum()).collect();
        Ok(Self {
            adj,
            valence,
            edge_count: edges.len(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Number of edges counted with multiplicity.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn valence(&self, v: usize) -> u32 {
        self.valence[v]
    }

    pub fn valences(&self) -> &[u32] {
        &self.valence
    }

    pub fn max_valence(&self) -> u32 {
        self.valence.iter().copied().max().unwrap_or(0)
    }

    /// Adjacent vertices of `v` with edge multiplicities, sorted by index.
    pub fn neighbors(&self, v: usize) -> &[(usize, u32)] {
        &self.adj[v]
    }

    /// Number of edges between `v` and `w` (zero when `v == w`).
    pub fn multiplicity(&self, v: usize, w: usize) -> u32 {
        match self.adj[v].binary_search_by_key(&w, |&(x, _)| x) {
            Ok(i) => self.adj[v][i].1,
            Err(_) => 0,
        }
    }

    /// Distinct adjacent pairs `(v, w, multiplicity)` with `v < w`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(v, list)| {
            list.iter()
                .filter(move |&&(w, _)| v < w)
                .map(move |&(w, m)| (v, w, m))
        })
    }

    /// `Some(k)` when every vertex has valence `k`.
    pub fn regularity(&self) -> Option<u32> {
        let first = *self.valence.first()?;
        self.valence.iter().all(|&d| d == first).then_some(first)
    }

    /// No parallel edges.
    pub fn is_simple(&self) -> bool {
        self.adj.iter().all(|l| l.iter().all(|&(_, m)| m == 1))
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.components(&[]).len() == 1
    }

    /// First Betti number `m - n + 1` of a connected graph.
    pub fn genus(&self) -> Result<usize, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(self.edge_count + 1 - self.vertex_count())
    }

    /// The Laplacian with `-val(v)` on the diagonal and multiplicities off it.
    pub fn laplacian(&self) -> Laplacian {
        let n = self.vertex_count();
        let mut entries = vec![0i64; n * n];
        for v in 0..n {
            entries[v * n + v] = -i64::from(self.valence[v]);
            for &(w, m) in &self.adj[v] {
                entries[v * n + w] = i64::from(m);
            }
        }
        Laplacian { n, entries }
    }

    /// Connected components of the subgraph induced on `V \ excluded`,
    /// each sorted, ordered by smallest vertex.
    pub fn components(&self, excluded: &[usize]) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        for &x in excluded {
            seen[x] = true;
        }
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &(w, _) in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Breadth-first distances from `source`; `None` for unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &(w, _) in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// A copy of this graph with one more `u`–`v` edge.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self, GraphError> {
        let mut edges = self.edge_list();
        edges.push((u, v));
        Self::from_edges(self.vertex_count(), &edges)
    }

    /// Edge list with parallel edges repeated, sorted.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.edges()
            .flat_map(|(v, w, m)| std::iter::repeat_n((v, w), m as usize))
            .collect()
    }

    /// Serializes to the `n m` / `u v` edge-list text format.
    pub fn to_edge_list_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.vertex_count(), self.edge_count);
        for (u, v) in self.edge_list() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// Graphs available without a file: `pappus`, `k4`, `cycle:<n>`,
    /// `path:<n>`, `complete:<n>`.
    pub fn named(id: &str) -> Result<Self, GraphError> {
        let unknown = || GraphError::UnknownName(id.to_string());
        let (name, arg) = match id.split_once(':') {
            Some((name, arg)) => (name, Some(arg.parse::<usize>().map_err(|_| unknown())?)),
            None => (id, None),
        };
        match (name, arg) {
            ("pappus", None) => Ok(pappus()),
            ("k4", None) => Ok(complete(4)),
            ("cycle", Some(n)) if n >= 3 => Ok(cycle(n)),
            ("path", Some(n)) if n >= 1 => Ok(path(n)),
            ("complete", Some(n)) if n >= 1 => Ok(complete(n)),
            _ => Err(unknown()),
        }
    }
}

fn bump(list: &mut Vec<(usize, u32)>, w: usize) {
    match list.iter_mut().find(|(x, _)| *x == w) {
        Some((_, m)) => *m += 1,
        None => list.push((w, 1)),
    }
}

/// Dense integer Laplacian, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Laplacian {
    n: usize,
    entries: Vec<i64>,
}

impl Laplacian {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }
}

/// Parses the edge-list text format.
///
/// First significant line is `n m`, followed by exactly `m` lines `u v`.
/// Lines starting with `#` and blank lines are ignored.
pub fn load_graph(text: &str) -> Result<Multigraph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "missing `n m` header".into(),
    })?;
    let [n, m] = parse_pair(header_line, header)?;

    let mut edges = Vec::with_capacity(m);
    let mut last_line = header_line;
    for (line, l) in lines {
        last_line = line;
        if edges.len() == m {
            return Err(GraphError::Parse {
                line,
                msg: format!("more than the declared {m} edge lines"),
            });
        }
        let [u, v] = parse_pair(line, l)?;
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("vertex {x} out of range 0..{n}"),
                });
            }
        }
        if u == v {
            return Err(GraphError::Parse {
                line,
                msg: format!("self-loop at vertex {u}"),
            });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: last_line,
            msg: format!("expected {m} edge lines, found {}", edges.len()),
        });
    }
    Multigraph::from_edges(n, &edges)
}

fn parse_pair(line: usize, text: &str) -> Result<[usize; 2], GraphError> {
    let err = |msg: String| GraphError::Parse { line, msg };
    let mut it = text.split_whitespace();
    let mut next = || -> Result<usize, GraphError> {
        let tok = it.next().ok_or_else(|| err(format!("expected two integers, got `{text}`")))?;
        tok.parse()
            .map_err(|_| err(format!("`{tok}` is not a non-negative integer")))
    };
    let pair = [next()?, next()?];
    if it.next().is_some() {
        return Err(err(format!("trailing tokens in `{text}`")));
    }
    Ok(pair)
}

pub fn cycle(n: usize) -> Multigraph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Multigraph::from_edges(n, &edges).expect("cycle edges are valid")
}

pub fn path(n: usize) -> Multigraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Multigraph::from_edges(n, &edges).expect("path edges are valid")
}

pub fn complete(n: usize) -> Multigraph {
    let edges: Vec<_> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    Multigraph::from_edges(n, &edges).expect("complete graph edges are valid")
}

/// Vertex indices of the Pappus graph rings in [`pappus`].
pub mod pappus_rings {
    /// Carries the rank-one divisor: one chip per vertex.
    pub const MIDDLE: [usize; 6] = [0, 1, 2, 3, 4, 5];
    /// Six-cycle.
    pub const OUTER: [usize; 6] = [6, 7, 8, 9, 10, 11];
    /// Three disjoint chords.
    pub const INNER: [usize; 6] = [12, 13, 14, 15, 16, 17];
}

/// The Pappus graph: 18 vertices, 27 edges, 3-regular, bipartite, girth 6.
///
/// Vertices 0..6 form the middle ring, 6..12 the outer six-cycle and 12..18
/// the inner ring of three chords. Each middle vertex meets one outer and two
/// inner vertices.
pub fn pappus() -> Multigraph {
    let mut edges = vec![(12, 15), (13, 16), (14, 17)];
    let spokes = [
        (0, 6, 13, 17),
        (1, 7, 14, 12),
        (2, 8, 15, 13),
        (3, 9, 16, 14),
        (4, 10, 17, 15),
        (5, 11, 12, 16),
    ];
    for (w, x, y, z) in spokes {
        edges.extend([(w, x), (w, y), (w, z)]);
    }
    edges.extend((0..6).map(|i| (6 + i, 6 + (i + 1) % 6)));
    Multigraph::from_edges(18, &edges).expect("pappus edges are valid")
}
