//! Exact gonality by exhaustive search, plus two cheap upper bounds.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::divisor::Divisor;
use crate::graph::Multigraph;
use crate::multiset::{multiset_count, next_colex, to_chips};
use crate::reduction::{rank_at_least, RankChecker};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GonalityError {
    #[error("gonality is only defined here for connected graphs")]
    Disconnected,
    #[error("search budget exhausted; gonality lies in [{lower}, {upper}]")]
    BudgetExhausted {
        lower: usize,
        upper: usize,
        /// Every degree `<= cleared_through` has no positive-rank divisor.
        cleared_through: usize,
    },
}

/// Limits for [`exact_gonality`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Highest degree to search.
    pub max_degree: Option<usize>,
    /// Total effective divisors to test across all degrees.
    pub max_candidates: u128,
    pub time_limit: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_degree: None, max_candidates: 50_000_000, time_limit: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GonalityCertificate {
    pub value: usize,
    /// Colex-first positive-rank effective divisor of degree `value`.
    pub witness: Divisor,
    /// All effective divisors of degree `1..=cleared_through` fail the
    /// positive-rank test; always `value - 1`.
    pub cleared_through: usize,
    pub exhaustive: bool,
    pub candidates_checked: u128,
}

const CHUNK: usize = 4096;

/// Smallest degree of a positive-rank divisor, found by testing every
/// effective divisor of degree 1, 2, … in colex order.
///
/// Within a degree the candidates are checked in parallel chunks; the
/// reported witness is always the colex-first one.
pub fn exact_gonality(
    g: &Multigraph,
    budget: &SearchBudget,
) -> Result<GonalityCertificate, GonalityError> {
    if !g.is_connected() {
        return Err(GonalityError::Disconnected);
    }
    let n = g.vertex_count();
    let upper = genus_upper_bound(g)?
        .value
        .min(independence_upper_bound(g, &MisBudget::default()).value);
    let start = Instant::now();
    let mut checked: u128 = 0;
    let exhausted = |cleared: usize| GonalityError::BudgetExhausted {
        lower: cleared + 1,
        upper,
        cleared_through: cleared,
    };

    for degree in 1..=upper {
        if budget.max_degree.is_some_and(|max| degree > max) {
            return Err(exhausted(degree - 1));
        }
        if checked + multiset_count(n, degree) > budget.max_candidates {
            return Err(exhausted(degree - 1));
        }
        let mut items = vec![0usize; degree];
        let mut more = true;
        while more {
            if budget.time_limit.is_some_and(|t| start.elapsed() > t) {
                return Err(exhausted(degree - 1));
            }
            let mut batch = Vec::with_capacity(CHUNK);
            while more && batch.len() < CHUNK {
                batch.push(items.clone());
                more = next_colex(&mut items, n);
            }
            checked += batch.len() as u128;
            let found = batch
                .par_iter()
                .map_init(
                    || (RankChecker::new(g), vec![0i64; n]),
                    |(checker, chips), cand| {
                        to_chips(cand, n, chips);
                        checker.failure(chips).is_none()
                    },
                )
                .position_first(|ok| ok);
            if let Some(i) = found {
                let witness = Divisor::from_vertices(n, &batch[i]);
                let recheck = rank_at_least(g, &witness, 1, u64::MAX)
                    .expect("connected graph, unbounded cap");
                assert!(recheck.holds, "gonality witness failed the independent rank check");
                return Ok(GonalityCertificate {
                    value: degree,
                    witness,
                    cleared_through: degree - 1,
                    exhaustive: true,
                    candidates_checked: checked,
                });
            }
        }
    }
    unreachable!("the independent-set divisor has positive rank and degree <= upper bound")
}

/// `gon(G) <= genus` via Riemann–Roch, valid from genus 2 on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenusBound {
    pub genus: usize,
    pub value: usize,
    /// Genus 0 or 1, where the bound is `genus + 1` instead: every
    /// divisor of degree `genus + 1` has positive rank.
    pub small_genus: bool,
}

pub fn genus_upper_bound(g: &Multigraph) -> Result<GenusBound, GonalityError> {
    let genus = g.genus().map_err(|_| GonalityError::Disconnected)?;
    let small_genus = genus < 2;
    let value = if small_genus { genus + 1 } else { genus };
    Ok(GenusBound { genus, value, small_genus })
}

/// Limits for the exact independent-set search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MisBudget {
    pub max_nodes: u64,
}

impl Default for MisBudget {
    fn default() -> Self {
        Self { max_nodes: 20_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceBound {
    /// Degree of [`Self::divisor`]; `n - α` on simple graphs.
    pub value: usize,
    pub independent_set: Vec<usize>,
    /// The set is a maximum independent set.
    pub exact: bool,
    /// Positive-rank divisor supported on the complement of the set.
    pub divisor: Divisor,
}

/// Upper bound from a positive-rank divisor on the complement of an
/// independent set `I`.
///
/// Each `w ∉ I` carries `max(1, max_{v ∈ I} ε(w, v))` chips, which is one chip
/// on simple graphs. Firing `V \ {v}` for `v ∈ I` then moves a chip onto `v`
/// without making anything negative.
pub fn independence_upper_bound(g: &Multigraph, budget: &MisBudget) -> IndependenceBound {
    let (set, exact) = maximum_independent_set(g, budget);
    let n = g.vertex_count();
    let mut in_set = vec![false; n];
    for &v in &set {
        in_set[v] = true;
    }
    let chips: Vec<i64> = (0..n)
        .map(|w| {
            if in_set[w] {
                0
            } else {
                let heaviest = g
                    .neighbors(w)
                    .iter()
                    .filter(|&&(v, _)| in_set[v])
                    .map(|&(_, m)| m)
                    .max()
                    .unwrap_or(0);
                i64::from(heaviest.max(1))
            }
        })
        .collect();
    // a lone vertex is its own maximum independent set but still needs a chip
    let chips = if n == 1 { vec![1] } else { chips };
    let divisor = Divisor::from_chips(chips);
    IndependenceBound { value: divisor.degree() as usize, independent_set: set, exact, divisor }
}

/// Maximum independent set by branch and bound on graphs of at most 128
/// vertices; falls back to a greedy set beyond that or when the node budget
/// runs out. Returns the set and whether it is provably maximum.
pub fn maximum_independent_set(g: &Multigraph, budget: &MisBudget) -> (Vec<usize>, bool) {
    let greedy = greedy_independent_set(g);
    let n = g.vertex_count();
    if n > 128 {
        return (greedy, false);
    }
    let nbr: Vec<u128> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u128, |acc, &(w, _)| acc | 1 << w))
        .collect();
    let mut search = MisSearch {
        nbr: &nbr,
        best: greedy.iter().fold(0u128, |acc, &v| acc | 1 << v),
        nodes: 0,
        max_nodes: budget.max_nodes,
    };
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let complete = search.branch(0, all);
    let set = (0..n).filter(|&v| search.best >> v & 1 == 1).collect();
    (set, complete)
}

struct MisSearch<'a> {
    nbr: &'a [u128],
    best: u128,
    nodes: u64,
    max_nodes: u64,
}

impl MisSearch<'_> {
    /// Returns false when the node budget ran out.
    fn branch(&mut self, chosen: u128, mut candidates: u128) -> bool {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return false;
        }
        let mut chosen = chosen;
        // Vertices of degree <= 1 among the candidates can always be taken.
        loop {
            let mut changed = false;
            let mut rest = candidates;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if candidates >> v & 1 == 1 && (self.nbr[v] & candidates).count_ones() <= 1 {
                    chosen |= 1 << v;
                    candidates &= !(self.nbr[v] | 1 << v);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if candidates == 0 {
            if chosen.count_ones() > self.best.count_ones() {
                self.best = chosen;
            }
            return true;
        }
        if chosen.count_ones() + candidates.count_ones() <= self.best.count_ones() {
            return true;
        }
        let mut pivot = 0;
        let mut pivot_deg = 0;
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (self.nbr[v] & candidates).count_ones();
            if d > pivot_deg {
                pivot = v;
                pivot_deg = d;
            }
        }
        let take = self.branch(chosen | 1 << pivot, candidates & !(self.nbr[pivot] | 1 << pivot));
        take && self.branch(chosen, candidates & !(1 << pivot))
    }
}

/// Repeatedly takes a minimum-degree vertex of what remains.
pub fn greedy_independent_set(g: &Multigraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut alive = vec![true; n];
    let mut set = Vec::new();
    loop {
        let pick = (0..n).filter(|&v| alive[v]).min_by_key(|&v| {
            g.neighbors(v).iter().filter(|&&(w, _)| alive[w]).count()
        });
        let Some(v) = pick else { break };
        set.push(v);
        alive[v] = false;
        for &(w, _) in g.neighbors(v) {
            alive[w] = false;
        }
    }
    set.sort_unstable();
    set
}
