//! Edge expansion: u-Cheeger constants, minimum component-bounding
//! separators (`B_u`), and the balanced split of separator components.
//!
//! Both `h_u` and `B_u` only change when `u·n` crosses an integer, so every
//! profile is evaluated on the grid `u = j/n`, `1 <= j <= ⌊n/2⌋`.
//!
//! Exact routines work on `u64` vertex masks and therefore need `n <= 64`;
//! the default caps are far below that.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Multigraph;
use crate::rational::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpansionError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph needs at least two vertices")]
    TooSmall,
    #[error("exact enumeration needs n <= {cap}, graph has {n} vertices")]
    TooLarge { n: usize, cap: usize },
    #[error("u = {0} is outside (0, 1/2]")]
    InvalidFraction(Rational),
    #[error("exact Cheeger enumeration exceeded {cap} subsets")]
    SubsetBudget { cap: u64 },
    #[error("separator search exhausted its budget; B_u lies in [{lower}, {}]", incumbent.size)]
    SeparatorBudget { lower: usize, incumbent: Box<SeparatorCertificate> },
    #[error("component of size {size} is not smaller than half of {n} vertices")]
    ComponentTooLarge { size: usize, n: usize },
    #[error("no union of components lands in [{total}/3, 2·{total}/3]")]
    Unbalanced { total: usize },
}

/// Number of edges with exactly one endpoint in `set`, with multiplicity.
pub fn edge_boundary(g: &Multigraph, set: &[usize]) -> u64 {
    let mut inside = vec![false; g.vertex_count()];
    for &v in set {
        inside[v] = true;
    }
    set.iter()
        .flat_map(|&v| g.neighbors(v))
        .filter(|&&(w, _)| !inside[w])
        .map(|&(_, m)| u64::from(m))
        .sum()
}

/// Whether the profile values are exact minima or only upper bounds from a
/// local search. Upper bounds must not feed a gonality lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Exact,
    UpperBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheegerRow {
    /// Grid index: sets of size at most `j` are allowed.
    pub j: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub u: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub h_u: Rational,
    pub witness: Vec<usize>,
    pub boundary: u64,
}

/// `u ↦ h_u(G)` on the grid `j/n`. The last row is the Cheeger constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheegerProfile {
    pub n: usize,
    pub kind: ProfileKind,
    pub rows: Vec<CheegerRow>,
}

impl CheegerProfile {
    pub fn is_exact(&self) -> bool {
        self.kind == ProfileKind::Exact
    }

    /// `h(G) = h_{1/2}(G)`.
    pub fn cheeger_constant(&self) -> Rational {
        self.rows.last().expect("profile has at least one row").h_u
    }

    /// `h_u` for the grid point `j/n`.
    pub fn at(&self, j: usize) -> Option<&CheegerRow> {
        self.rows.get(j.checked_sub(1)?)
    }
}

/// How exact mode visits candidate sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Enumeration {
    /// Only sets inducing a connected subgraph. A disconnected set has a
    /// ratio at least that of one of its parts, so the minimum is unchanged.
    #[default]
    Connected,
    /// Every subset, via a Gray-code walk.
    AllSubsets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheegerBudget {
    /// Largest `n` computed exactly; larger graphs get a flagged upper bound.
    pub exact_max_n: usize,
    pub enumeration: Enumeration,
    pub max_subsets: u64,
}

impl Default for CheegerBudget {
    fn default() -> Self {
        Self { exact_max_n: 24, enumeration: Enumeration::Connected, max_subsets: 2_000_000_000 }
    }
}

/// Computes `h_u` at every grid point, exactly when `n <= exact_max_n`.
///
/// Witnesses are the smallest optimal set, ties broken by the
/// lexicographically smallest sorted vertex list.
pub fn cheeger_profile(
    g: &Multigraph,
    budget: &CheegerBudget,
) -> Result<CheegerProfile, ExpansionError> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(ExpansionError::TooSmall);
    }
    if !g.is_connected() {
        return Err(ExpansionError::Disconnected);
    }
    if n > budget.exact_max_n {
        return Ok(heuristic_profile(g));
    }
    if n > 64 {
        return Err(ExpansionError::TooLarge { n, cap: 64 });
    }
    let best = match budget.enumeration {
        Enumeration::Connected => best_connected(g, budget.max_subsets)?,
        Enumeration::AllSubsets => {
            if n > 40 {
                return Err(ExpansionError::TooLarge { n, cap: 40 });
            }
            let count = 1u64 << n;
            if count > budget.max_subsets {
                return Err(ExpansionError::SubsetBudget { cap: budget.max_subsets });
            }
            best_all_subsets(g)
        }
    };
    let witnesses: Vec<Option<(u64, Vec<usize>)>> = best
        .iter()
        .map(|b| (b.boundary != u64::MAX).then(|| (b.boundary, mask_to_vec(b.mask))))
        .collect();
    Ok(profile_from_sizes(n, ProfileKind::Exact, &witnesses))
}

/// Folds per-size minima into the cumulative grid profile. Index 0 of
/// `by_size` is unused.
fn profile_from_sizes(
    n: usize,
    kind: ProfileKind,
    by_size: &[Option<(u64, Vec<usize>)>],
) -> CheegerProfile {
    let half = n / 2;
    let mut rows = Vec::with_capacity(half);
    let mut current: Option<(Rational, u64, &Vec<usize>)> = None;
    for j in 1..=half {
        if let Some((b, set)) = &by_size[j] {
            let ratio = Rational::new(*b as i64, j as i64);
            if current.is_none_or(|(r, _, _)| ratio < r) {
                current = Some((ratio, *b, set));
            }
        }
        let (h_u, boundary, witness) = current.expect("every size up to n/2 has a candidate");
        rows.push(CheegerRow {
            j,
            u: Rational::new(j as i64, n as i64),
            h_u,
            witness: witness.clone(),
            boundary,
        });
    }
    CheegerProfile { n, kind, rows }
}

#[derive(Debug, Clone, Copy)]
struct SizeBest {
    boundary: u64,
    mask: u64,
}

const UNSET: SizeBest = SizeBest { boundary: u64::MAX, mask: 0 };

/// Lowest differing vertex belongs to `a`: `a` precedes `b` as a sorted list
/// when both have the same size.
fn lex_less(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    diff != 0 && a & diff & diff.wrapping_neg() != 0
}

fn offer(best: &mut [SizeBest], size: usize, boundary: u64, mask: u64) {
    let slot = &mut best[size];
    if boundary < slot.boundary || (boundary == slot.boundary && lex_less(mask, slot.mask)) {
        *slot = SizeBest { boundary, mask };
    }
}

fn merge(mut a: Vec<SizeBest>, b: Vec<SizeBest>) -> Vec<SizeBest> {
    for (size, s) in b.into_iter().enumerate() {
        if s.boundary != u64::MAX {
            offer(&mut a, size, s.boundary, s.mask);
        }
    }
    a
}

fn neighbor_masks(g: &Multigraph) -> Vec<u64> {
    (0..g.vertex_count())
        .map(|v| g.neighbors(v).iter().fold(0u64, |acc, &(w, _)| acc | 1 << w))
        .collect()
}

/// Edges from `v` into `mask`, with multiplicity.
fn edges_into(g: &Multigraph, v: usize, mask: u64) -> u64 {
    g.neighbors(v)
        .iter()
        .filter(|&&(w, _)| mask >> w & 1 == 1)
        .map(|&(_, m)| u64::from(m))
        .sum()
}

fn mask_to_vec(mask: u64) -> Vec<usize> {
    (0..64).filter(|&v| mask >> v & 1 == 1).collect()
}

fn vec_to_mask(set: &[usize]) -> u64 {
    set.iter().fold(0, |acc, &v| acc | 1 << v)
}

/// Per-size minimum boundary over connected vertex sets of size `<= n/2`.
///
/// Each connected set is generated exactly once from its smallest vertex:
/// the extension set only admits vertices above the root that are not yet
/// adjacent to the current set.
fn best_connected(g: &Multigraph, cap: u64) -> Result<Vec<SizeBest>, ExpansionError> {
    let n = g.vertex_count();
    let half = n / 2;
    let nbr = neighbor_masks(g);
    let counter = AtomicU64::new(0);

    struct Walk<'a> {
        g: &'a Multigraph,
        nbr: &'a [u64],
        half: usize,
        above_root: u64,
        best: Vec<SizeBest>,
        counter: &'a AtomicU64,
        cap: u64,
        seen: u64,
    }

    impl Walk<'_> {
        fn extend(&mut self, set: u64, size: usize, boundary: u64, ext: u64, closed: u64) -> bool {
            offer(&mut self.best, size, boundary, set);
            self.seen += 1;
            if self.seen.is_multiple_of(4096) && self.counter.fetch_add(4096, Ordering::Relaxed) > self.cap {
                return false;
            }
            if size == self.half {
                return true;
            }
            let mut ext = ext;
            while ext != 0 {
                let w = ext.trailing_zeros() as usize;
                ext &= ext - 1;
                let fresh = self.nbr[w] & !closed & self.above_root;
                let b = boundary + u64::from(self.g.valence(w)) - 2 * edges_into(self.g, w, set);
                if !self.extend(set | 1 << w, size + 1, b, ext | fresh, closed | self.nbr[w] | 1 << w) {
                    return false;
                }
            }
            true
        }
    }

    let per_root: Vec<Option<Vec<SizeBest>>> = (0..n)
        .into_par_iter()
        .map(|root| {
            let above_root = u64::MAX.checked_shl(root as u32 + 1).unwrap_or(0);
            let mut walk = Walk {
                g,
                nbr: &nbr,
                half,
                above_root,
                best: vec![UNSET; half + 1],
                counter: &counter,
                cap,
                seen: 0,
            };
            let set = 1u64 << root;
            let ok = walk.extend(
                set,
                1,
                u64::from(g.valence(root)),
                nbr[root] & above_root,
                nbr[root] | set,
            );
            let rest = walk.seen % 4096;
            let total = counter.fetch_add(rest, Ordering::Relaxed) + rest;
            (ok && total <= cap).then_some(walk.best)
        })
        .collect();
    per_root
        .into_iter()
        .try_fold(vec![UNSET; half + 1], |acc, b| b.map(|b| merge(acc, b)))
        .ok_or(ExpansionError::SubsetBudget { cap })
}

/// Per-size minimum boundary over all subsets of size `<= n/2`, by a
/// Gray-code walk split into blocks on the leading vertices.
fn best_all_subsets(g: &Multigraph) -> Vec<SizeBest> {
    let n = g.vertex_count();
    let half = n / 2;
    let lead = n.min(6);
    let low = n - lead;
    (0u64..1 << lead)
        .into_par_iter()
        .map(|block| {
            let mut best = vec![UNSET; half + 1];
            let mut set = block << low;
            let mut size = set.count_ones() as usize;
            let mut boundary: u64 = mask_to_vec(set)
                .iter()
                .map(|&v| u64::from(g.valence(v)) - edges_into(g, v, set))
                .sum();
            if (1..=half).contains(&size) {
                offer(&mut best, size, boundary, set);
            }
            for step in 1u64..1 << low {
                let v = step.trailing_zeros() as usize;
                let bit = 1u64 << v;
                let val = u64::from(g.valence(v));
                if set & bit == 0 {
                    boundary = boundary + val - 2 * edges_into(g, v, set);
                    set |= bit;
                    size += 1;
                } else {
                    set &= !bit;
                    boundary = boundary + 2 * edges_into(g, v, set) - val;
                    size -= 1;
                }
                if (1..=half).contains(&size) {
                    offer(&mut best, size, boundary, set);
                }
            }
            best
        })
        .reduce(|| vec![UNSET; half + 1], merge)
}

/// Greedy growth from up to 32 seeds, always adding the frontier vertex that
/// increases the boundary least. Gives upper bounds on every `h_u`.
fn heuristic_profile(g: &Multigraph) -> CheegerProfile {
    let n = g.vertex_count();
    let half = n / 2;
    let seeds = n.min(32);
    let per_seed: Vec<Vec<Option<(u64, Vec<usize>)>>> = (0..seeds)
        .into_par_iter()
        .map(|i| {
            let seed = i * n / seeds;
            let mut out = vec![None; half + 1];
            let mut inside = vec![false; n];
            let mut into = vec![0u64; n];
            let mut order = vec![seed];
            inside[seed] = true;
            let mut boundary = u64::from(g.valence(seed));
            for &(w, m) in g.neighbors(seed) {
                into[w] += u64::from(m);
            }
            out[1] = Some((boundary, order.clone()));
            for size in 2..=half {
                let pick = (0..n)
                    .filter(|&w| !inside[w] && into[w] > 0)
                    .min_by_key(|&w| (i64::from(g.valence(w)) - 2 * into[w] as i64, w));
                let Some(w) = pick else { break };
                boundary = boundary + u64::from(g.valence(w)) - 2 * into[w];
                inside[w] = true;
                order.push(w);
                for &(x, m) in g.neighbors(w) {
                    into[x] += u64::from(m);
                }
                let mut set = order.clone();
                set.sort_unstable();
                out[size] = Some((boundary, set));
            }
            out
        })
        .collect();
    let mut by_size: Vec<Option<(u64, Vec<usize>)>> = vec![None; half + 1];
    for seed in per_seed {
        for (size, cand) in seed.into_iter().enumerate() {
            if let Some((b, set)) = cand {
                if by_size[size].as_ref().is_none_or(|(best, s)| b < *best || (b == *best && set < *s)) {
                    by_size[size] = Some((b, set));
                }
            }
        }
    }
    profile_from_sizes(n, ProfileKind::UpperBound, &by_size)
}

/// Minimum vertex set whose removal leaves only components of size
/// `<= ⌊u·n⌋`. `B_u(G)` is its size: one chip per support vertex already
/// realises the component condition, so the minimum divisor degree equals
/// the minimum support size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparatorCertificate {
    #[serde(serialize_with = "rational::serialize")]
    pub u: Rational,
    pub max_component: usize,
    pub separator: Vec<usize>,
    pub size: usize,
    pub component_sizes: Vec<usize>,
    /// No smaller set has the property (the search ran to completion).
    pub optimal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparatorBudget {
    pub max_nodes: u64,
}

impl Default for SeparatorBudget {
    fn default() -> Self {
        Self { max_nodes: 50_000_000 }
    }
}

/// Exact `B_u(G)` by branch and bound.
///
/// Any connected set of `⌊u·n⌋ + 1` surviving vertices must lose a vertex to
/// the separator, so the search branches over the vertices of one such set.
/// The lower bound packs disjoint connected sets of that size.
pub fn b_u(
    g: &Multigraph,
    u: Rational,
    budget: &SeparatorBudget,
) -> Result<SeparatorCertificate, ExpansionError> {
    let n = g.vertex_count();
    if u <= Rational::from_integer(0) || u > Rational::new(1, 2) {
        return Err(ExpansionError::InvalidFraction(u));
    }
    if n > 64 {
        return Err(ExpansionError::TooLarge { n, cap: 64 });
    }
    let limit = (u * Rational::from_integer(n as i64)).floor().to_integer() as usize;
    let nbr = neighbor_masks(g);
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let certificate = |sep: u64, optimal: bool| {
        let separator = mask_to_vec(sep);
        let component_sizes = g.components(&separator).iter().map(Vec::len).collect();
        SeparatorCertificate {
            u,
            max_component: limit,
            size: separator.len(),
            separator,
            component_sizes,
            optimal,
        }
    };
    if limit == 0 {
        return Ok(certificate(all, true));
    }
    let mut search = SeparatorSearch {
        nbr: &nbr,
        limit,
        best: greedy_separator(&nbr, all, limit),
        nodes: 0,
        max_nodes: budget.max_nodes,
    };
    let root_lower = search.packing_bound(all, 0).unwrap_or(usize::MAX);
    let complete = search.branch(0, 0, all);
    if complete {
        Ok(certificate(search.best, true))
    } else {
        Err(ExpansionError::SeparatorBudget {
            lower: root_lower,
            incumbent: Box::new(certificate(search.best, false)),
        })
    }
}

/// Removes a highest-degree vertex of a too-large component until none is left.
fn greedy_separator(nbr: &[u64], all: u64, limit: usize) -> u64 {
    let mut sep = 0u64;
    loop {
        let alive = all & !sep;
        let Some(comp) = components_of(nbr, alive).into_iter().find(|c| c.count_ones() as usize > limit)
        else {
            return sep;
        };
        let v = mask_to_vec(comp)
            .into_iter()
            .max_by_key(|&v| ((nbr[v] & alive).count_ones(), std::cmp::Reverse(v)))
            .expect("component is non-empty");
        sep |= 1 << v;
    }
}

fn flood(nbr: &[u64], start: u64, allowed: u64) -> u64 {
    let mut comp = start;
    let mut frontier = start;
    while frontier != 0 {
        let mut next = 0;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= nbr[v];
        }
        next &= allowed & !comp;
        comp |= next;
        frontier = next;
    }
    comp
}

fn components_of(nbr: &[u64], alive: u64) -> Vec<u64> {
    let mut rest = alive;
    let mut out = Vec::new();
    while rest != 0 {
        let comp = flood(nbr, rest & rest.wrapping_neg(), alive);
        out.push(comp);
        rest &= !comp;
    }
    out
}

/// First `count` vertices of a breadth-first order from `start` inside `allowed`.
fn bfs_prefix(nbr: &[u64], start: usize, allowed: u64, count: usize) -> u64 {
    let mut taken = 1u64 << start;
    let mut queue = vec![start];
    let mut head = 0;
    while head < queue.len() && (taken.count_ones() as usize) < count {
        let v = queue[head];
        head += 1;
        let mut fresh = nbr[v] & allowed & !taken;
        while fresh != 0 && (taken.count_ones() as usize) < count {
            let w = fresh.trailing_zeros() as usize;
            fresh &= fresh - 1;
            taken |= 1 << w;
            queue.push(w);
        }
    }
    taken
}

struct SeparatorSearch<'a> {
    nbr: &'a [u64],
    limit: usize,
    best: u64,
    nodes: u64,
    max_nodes: u64,
}

impl SeparatorSearch<'_> {
    /// Disjoint connected `(limit + 1)`-sets in the surviving graph. `None`
    /// when one of them consists of forbidden vertices only (infeasible).
    fn packing_bound(&self, alive: u64, forbidden: u64) -> Option<usize> {
        let mut count = 0;
        for comp in components_of(self.nbr, alive) {
            let mut rest = comp;
            while rest.count_ones() as usize > self.limit {
                let start = rest.trailing_zeros() as usize;
                let blob = bfs_prefix(self.nbr, start, rest, self.limit + 1);
                if blob.count_ones() as usize > self.limit {
                    if blob & !forbidden == 0 {
                        return None;
                    }
                    count += 1;
                    rest &= !blob;
                } else {
                    rest &= !flood(self.nbr, 1 << start, rest);
                }
            }
        }
        Some(count)
    }

    /// Returns false when the node budget ran out.
    fn branch(&mut self, sep: u64, forbidden: u64, all: u64) -> bool {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return false;
        }
        let alive = all & !sep;
        let size = sep.count_ones() as usize;
        let Some(lower) = self.packing_bound(alive, forbidden) else {
            return true;
        };
        if size + lower >= self.best.count_ones() as usize {
            return true;
        }
        let Some(big) = components_of(self.nbr, alive)
            .into_iter()
            .find(|c| c.count_ones() as usize > self.limit)
        else {
            self.best = sep;
            return true;
        };
        // Start from a forbidden vertex when possible so the blob has fewer
        // branchable vertices.
        let start_mask = if big & forbidden != 0 { big & forbidden } else { big };
        let start = start_mask.trailing_zeros() as usize;
        let blob = bfs_prefix(self.nbr, start, big, self.limit + 1);
        let mut choices: Vec<usize> = mask_to_vec(blob & !forbidden);
        choices.sort_by_key(|&v| std::cmp::Reverse((self.nbr[v] & alive).count_ones()));
        let mut forbid = forbidden;
        for v in choices {
            if !self.branch(sep | 1 << v, forbid, all) {
                return false;
            }
            forbid |= 1 << v;
        }
        true
    }
}

/// Split of the non-support vertices into two unions of components with no
/// edge between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

/// Splits `V \ support` into unions of components `A`, `B` with
/// `|A|` between a third and two thirds of `|V \ support|`.
///
/// Components are taken largest first (ties by smallest vertex) into `A`
/// while the two-thirds cap holds. If `A` ends below a third, a component of
/// `B` replaces it. Every component must be smaller than `n/2`. Some
/// component size patterns admit no balanced split at all, such as
/// `{4, 1}`; those return [`ExpansionError::Unbalanced`].
pub fn separator_bipartition(
    g: &Multigraph,
    support: &[usize],
) -> Result<Bipartition, ExpansionError> {
    let n = g.vertex_count();
    let mut comps = g.components(support);
    if let Some(c) = comps.iter().find(|c| 2 * c.len() >= n) {
        return Err(ExpansionError::ComponentTooLarge { size: c.len(), n });
    }
    comps.sort_by_key(|c| (std::cmp::Reverse(c.len()), c[0]));
    let total: usize = comps.iter().map(Vec::len).sum();
    let in_window = |size: usize| 3 * size >= total && 3 * size <= 2 * total;

    let mut in_a = vec![false; comps.len()];
    let mut size_a = 0;
    for (i, c) in comps.iter().enumerate() {
        if 3 * (size_a + c.len()) <= 2 * total {
            in_a[i] = true;
            size_a += c.len();
        }
    }
    if !in_window(size_a) {
        let swap = (0..comps.len()).find(|&i| !in_a[i]).ok_or(ExpansionError::Unbalanced { total })?;
        if !in_window(comps[swap].len()) {
            return Err(ExpansionError::Unbalanced { total });
        }
        in_a.iter_mut().enumerate().for_each(|(i, x)| *x = i == swap);
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (c, &take) in comps.iter().zip(&in_a) {
        if take { a.extend(c) } else { b.extend(c) }
    }
    a.sort_unstable();
    b.sort_unstable();
    Ok(Bipartition { a, b })
}

/// All `B_u` on the grid `j/n`, `1 <= j <= ⌊n/2⌋`.
pub fn b_u_profile(
    g: &Multigraph,
    budget: &SeparatorBudget,
) -> Vec<Result<SeparatorCertificate, ExpansionError>> {
    let n = g.vertex_count() as i64;
    (1..=n / 2)
        .into_par_iter()
        .map(|j| b_u(g, Rational::new(j, n), budget))
        .collect()
}

#[doc(hidden)]
pub fn separator_is_valid(g: &Multigraph, separator: &[usize], limit: usize) -> bool {
    g.components(separator).iter().all(|c| c.len() <= limit)
}

#[doc(hidden)]
pub fn mask_of(set: &[usize]) -> u64 {
    vec_to_mask(set)
}
