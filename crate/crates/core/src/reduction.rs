//! Dhar's burning algorithm and reduced divisors.
//!
//! Every divisor on a connected graph is equivalent to exactly one
//! `v`-reduced divisor: effective away from `v`, and such that no set-firing
//! avoiding `v` keeps it so. Reduced forms are the canonical representatives
//! used for equivalence and rank queries.
//!
//! [`v_reduce`] runs in two stages:
//!
//! 1. Deficit repair. With BFS layers `L_t` around `v`, walk `t` from the
//!    outermost layer down to 1 and fire the ball `{dist <= t - 1}` enough
//!    times to clear every negative entry on `L_t`. Each vertex of `L_t` has
//!    an edge into `L_{t-1}`, and firing the ball does not touch layers beyond
//!    `t`, so after step `t` every layer `>= t` is effective.
//! 2. Burning. While the fire started at `v` leaves an unburnt set `U`, fire
//!    `U` as many times as it stays effective away from `v`. Each unburnt `w`
//!    has at most `D(w)` edges into the burnt part, so at least one firing is
//!    legal. The chips on `v` never decrease and are bounded by `deg D`; while
//!    they stay constant, `U` has no edge to `v` and the chips drift strictly
//!    towards the burnt region, which bounds the run.

use serde::Serialize;
use thiserror::Error;

use crate::divisor::{fire_mask_in_place, Divisor};
use crate::graph::Multigraph;
use crate::multiset::next_colex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("reduced divisors need a connected graph")]
    Disconnected,
    #[error("divisor has {chips} chips at vertex {vertex}; burning needs it effective away from the source")]
    NotEffectiveAway { vertex: usize, chips: i64 },
    #[error("rank check exceeded its budget of {cap} subtracted divisors")]
    BudgetExceeded { cap: u64 },
    #[error("divisor has {got} entries but the graph has {n} vertices")]
    SizeMismatch { got: usize, n: usize },
}

/// Fixed point of the fire started at `source`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BurnResult {
    pub source: usize,
    pub burnt: Vec<usize>,
    pub unburnt: Vec<usize>,
    pub fully_burnt: bool,
}

/// Runs the burning process from `v` on `d`.
///
/// A vertex `w` catches fire once the number of burnt edges at `w` exceeds
/// `d(w)`. The fixed point does not depend on scan order.
pub fn dhar_burn(g: &Multigraph, d: &Divisor, v: usize) -> Result<BurnResult, ReductionError> {
    check_len(g, d)?;
    if let Some(w) = (0..g.vertex_count()).find(|&w| w != v && d.get(w) < 0) {
        return Err(ReductionError::NotEffectiveAway { vertex: w, chips: d.get(w) });
    }
    let mut scratch = Scratch::new(g.vertex_count());
    let fully_burnt = scratch.burn(g, d.chips(), v);
    let (burnt, unburnt): (Vec<usize>, Vec<usize>) =
        (0..g.vertex_count()).partition(|&w| scratch.burnt[w]);
    Ok(BurnResult { source: v, burnt, unburnt, fully_burnt })
}

/// The unique `v`-reduced divisor equivalent to `d`.
pub fn v_reduce(g: &Multigraph, d: &Divisor, v: usize) -> Result<Divisor, ReductionError> {
    check_len(g, d)?;
    if !g.is_connected() {
        return Err(ReductionError::Disconnected);
    }
    let mut out = d.clone();
    let mut scratch = Scratch::new(g.vertex_count());
    repair_deficits(g, &mut out, v);
    scratch.reduce_effective_away(g, &mut out, v);
    Ok(out)
}

/// Whether `d` has rank at least one: for every `v`, the `v`-reduced form of
/// `d` keeps a chip on `v`.
pub fn has_positive_rank(g: &Multigraph, d: &Divisor) -> Result<bool, ReductionError> {
    Ok(positive_rank_failure(g, d)?.is_none())
}

/// First vertex `v` for which `d - v` is not equivalent to an effective
/// divisor, or `None` when `d` has positive rank.
pub fn positive_rank_failure(g: &Multigraph, d: &Divisor) -> Result<Option<usize>, ReductionError> {
    check_len(g, d)?;
    if !g.is_connected() {
        return Err(ReductionError::Disconnected);
    }
    if d.degree() <= 0 {
        return Ok(Some(0));
    }
    let mut checker = RankChecker::new(g);
    Ok(checker.failure(d.chips()))
}

/// Outcome of a [`rank_at_least`] query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankQuery {
    pub holds: bool,
    /// Effective divisor `E` with `d - E` not equivalent to any effective divisor.
    pub witness: Option<Divisor>,
    pub checked: u64,
}

/// Whether `d - E` is equivalent to an effective divisor for every effective
/// `E` of degree `r`. `E` runs in colex order and the first failure is
/// returned as the witness.
pub fn rank_at_least(
    g: &Multigraph,
    d: &Divisor,
    r: usize,
    cap: u64,
) -> Result<RankQuery, ReductionError> {
    check_len(g, d)?;
    if !g.is_connected() {
        return Err(ReductionError::Disconnected);
    }
    let n = g.vertex_count();
    if d.degree() < r as i64 {
        let witness = Divisor::from_vertices(n, &vec![0; r]);
        return Ok(RankQuery { holds: false, witness: Some(witness), checked: 0 });
    }
    let mut scratch = Scratch::new(n);
    let mut base = d.clone();
    repair_deficits(g, &mut base, 0);
    scratch.reduce_effective_away(g, &mut base, 0);

    let mut items = vec![0usize; r];
    let mut checked = 0u64;
    loop {
        if checked == cap {
            return Err(ReductionError::BudgetExceeded { cap });
        }
        checked += 1;
        let mut trial = base.clone();
        for &v in &items {
            trial.add(v, -1);
        }
        repair_deficits(g, &mut trial, 0);
        scratch.reduce_effective_away(g, &mut trial, 0);
        if trial.get(0) < 0 {
            let witness = Divisor::from_vertices(n, &items);
            return Ok(RankQuery { holds: false, witness: Some(witness), checked });
        }
        if !next_colex(&mut items, n) {
            return Ok(RankQuery { holds: true, witness: None, checked });
        }
    }
}

fn check_len(g: &Multigraph, d: &Divisor) -> Result<(), ReductionError> {
    if d.len() != g.vertex_count() {
        return Err(ReductionError::SizeMismatch { got: d.len(), n: g.vertex_count() });
    }
    Ok(())
}

/// Stage one of [`v_reduce`]: makes `d` effective away from `v` by firing
/// BFS balls around `v`, outermost layer first. Needs a connected graph.
fn repair_deficits(g: &Multigraph, d: &mut Divisor, v: usize) {
    if d.is_effective_away_from(v) {
        return;
    }
    let dist: Vec<usize> = g
        .distances_from(v)
        .into_iter()
        .map(|x| x.expect("connected graph"))
        .collect();
    let depth = dist.iter().copied().max().unwrap_or(0);
    let mut ball = vec![false; g.vertex_count()];
    for t in (1..=depth).rev() {
        let deficit = (0..g.vertex_count())
            .filter(|&w| dist[w] == t)
            .map(|w| (-d.get(w)).max(0))
            .max()
            .unwrap_or(0);
        if deficit > 0 {
            for (w, inside) in ball.iter_mut().enumerate() {
                *inside = dist[w] < t;
            }
            fire_mask_in_place(g, d, &ball, deficit);
        }
    }
    debug_assert!(d.is_effective_away_from(v));
}

/// Reusable buffers for the burning loop.
struct Scratch {
    burnt: Vec<bool>,
    burnt_edges: Vec<i64>,
    queue: Vec<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self { burnt: vec![false; n], burnt_edges: vec![0; n], queue: Vec::with_capacity(n) }
    }

    /// Burns from `v`; returns whether every vertex caught fire.
    fn burn(&mut self, g: &Multigraph, chips: &[i64], v: usize) -> bool {
        self.burnt.fill(false);
        self.burnt_edges.fill(0);
        self.queue.clear();
        self.burnt[v] = true;
        self.queue.push(v);
        let mut count = 1;
        while let Some(x) = self.queue.pop() {
            for &(w, m) in g.neighbors(x) {
                if self.burnt[w] {
                    continue;
                }
                self.burnt_edges[w] += i64::from(m);
                if self.burnt_edges[w] > chips[w] {
                    self.burnt[w] = true;
                    count += 1;
                    self.queue.push(w);
                }
            }
        }
        count == g.vertex_count()
    }

    /// Stage two of [`v_reduce`]; `d` must already be effective away from `v`.
    fn reduce_effective_away(&mut self, g: &Multigraph, d: &mut Divisor, v: usize) {
        loop {
            if self.burn(g, d.chips(), v) {
                return;
            }
            // Largest repeat count keeping every unburnt vertex non-negative.
            let mut times = i64::MAX;
            for w in (0..g.vertex_count()).filter(|&w| !self.burnt[w]) {
                let out: i64 = g
                    .neighbors(w)
                    .iter()
                    .filter(|&&(x, _)| self.burnt[x])
                    .map(|&(_, m)| i64::from(m))
                    .sum();
                if out > 0 {
                    times = times.min(d.get(w) / out);
                }
            }
            debug_assert!((1..i64::MAX).contains(&times));
            let unburnt: Vec<bool> = self.burnt.iter().map(|b| !b).collect();
            fire_mask_in_place(g, d, &unburnt, times);
        }
    }
}

/// Positive-rank test specialised for effective divisors; reuses buffers
/// across calls on the same graph.
pub(crate) struct RankChecker<'g> {
    graph: &'g Multigraph,
    scratch: Scratch,
    work: Divisor,
}

impl<'g> RankChecker<'g> {
    pub(crate) fn new(graph: &'g Multigraph) -> Self {
        let n = graph.vertex_count();
        Self { graph, scratch: Scratch::new(n), work: Divisor::zero(n) }
    }

    /// First vertex whose reduced form of `chips` has no chip there.
    /// The graph must be connected.
    pub(crate) fn failure(&mut self, chips: &[i64]) -> Option<usize> {
        let g = self.graph;
        let effective = chips.iter().all(|&c| c >= 0);
        for v in 0..g.vertex_count() {
            if effective && chips[v] >= 1 {
                continue;
            }
            self.work = Divisor::from_chips(chips.to_vec());
            repair_deficits(g, &mut self.work, v);
            self.scratch.reduce_effective_away(g, &mut self.work, v);
            if self.work.get(v) < 1 {
                return Some(v);
            }
        }
        None
    }
}
