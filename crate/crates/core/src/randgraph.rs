//! Random `k`-regular multigraphs from the configuration model, and a
//! Monte Carlo harness that runs the bound pipeline over seeded samples.
//!
//! A sample is a uniform perfect matching of the `k·n` half-edges: shuffle
//! the half-edge array with Fisher–Yates and pair consecutive entries. Every
//! matching arises from exactly `2^{kn/2}·(kn/2)!` permutations, so the
//! matching is uniform. Loops are rejected by resampling the whole matching,
//! which keeps the result uniform over loop-free configurations.
//!
//! The generator is ChaCha8 seeded with the experiment seed; sample `i` uses
//! ChaCha stream `i`, so samples do not depend on evaluation order.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bounds::{
    thm11_from_lower_bounds, thm13_bound, thm14_constant, ramanujan_lambda2, BuSource,
};
use crate::expansion::{b_u, cheeger_profile, CheegerBudget, CheegerProfile, ExpansionError, SeparatorBudget};
use crate::gonality::{exact_gonality, genus_upper_bound, independence_upper_bound, MisBudget, SearchBudget};
use crate::graph::Multigraph;
use crate::rational::{self, Rational};
use crate::spectral::{algebraic_connectivity, spectral_gonality_bound, DEFAULT_TOL};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RandGraphError {
    #[error("k·n must be even (k = {k}, n = {n})")]
    OddHalfEdges { k: u32, n: usize },
    #[error("need k >= 1 and n >= 1")]
    Empty,
    #[error("no simple {k}-regular graph on {n} vertices")]
    NoSimpleGraph { k: u32, n: usize },
    #[error("a single vertex with {k} half-edges can only form loops")]
    LoopsOnly { k: u32 },
    #[error("no acceptable configuration after {attempts} attempts")]
    ResampleCap { attempts: u32 },
    #[error("unknown mode {0:?}; expected multigraph or simple")]
    UnknownMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Parallel edges kept, loops resampled.
    Multigraph,
    /// Resampled until loop- and parallel-free.
    Simple,
}

impl FromStr for Mode {
    type Err = RandGraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "multigraph" => Ok(Mode::Multigraph),
            "simple" => Ok(Mode::Simple),
            other => Err(RandGraphError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConfigModelParams {
    pub k: u32,
    pub n: usize,
    pub seed: u64,
    pub mode: Mode,
}

pub const MAX_ATTEMPTS: u32 = 1_000_000;

impl ConfigModelParams {
    pub fn validate(&self) -> Result<(), RandGraphError> {
        if self.k == 0 || self.n == 0 {
            return Err(RandGraphError::Empty);
        }
        if (self.k as usize * self.n) % 2 == 1 {
            return Err(RandGraphError::OddHalfEdges { k: self.k, n: self.n });
        }
        if self.mode == Mode::Simple && self.k as usize >= self.n {
            return Err(RandGraphError::NoSimpleGraph { k: self.k, n: self.n });
        }
        if self.n == 1 {
            return Err(RandGraphError::LoopsOnly { k: self.k });
        }
        Ok(())
    }
}

fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn draw(params: &ConfigModelParams, rng: &mut ChaCha8Rng) -> Result<Multigraph, RandGraphError> {
    params.validate()?;
    let k = params.k as usize;
    let mut points: Vec<usize> = (0..params.n).flat_map(|v| std::iter::repeat_n(v, k)).collect();
    for _ in 0..MAX_ATTEMPTS {
        points.shuffle(rng);
        let mut edges: Vec<(usize, usize)> = points
            .chunks_exact(2)
            .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
            .collect();
        if edges.iter().any(|&(a, b)| a == b) {
            continue;
        }
        if params.mode == Mode::Simple {
            edges.sort_unstable();
            if edges.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
        }
        return Ok(Multigraph::from_edges(params.n, &edges).expect("loop-free, in range"));
    }
    Err(RandGraphError::ResampleCap { attempts: MAX_ATTEMPTS })
}

/// One configuration-model sample for the parameters' seed.
pub fn sample_configuration(params: &ConfigModelParams) -> Result<Multigraph, RandGraphError> {
    sample_for_index(params, 0)
}

/// The `index`-th sample of an experiment with these parameters.
pub fn sample_for_index(params: &ConfigModelParams, index: u64) -> Result<Multigraph, RandGraphError> {
    draw(params, &mut rng_for(params.seed, index))
}

/// First eight bytes of the SHA-256 of the edge-list text, in hex.
pub fn graph_hash(g: &Multigraph) -> String {
    let digest = Sha256::digest(g.to_edge_list_text().as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Which per-sample computations run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentCaps {
    /// Exact `h_u` (and `B_u`) profile for `n` up to this.
    pub cheeger_max_n: Option<usize>,
    /// Exact gonality for `n` up to this.
    pub gonality_max_n: Option<usize>,
    pub gonality_budget: SearchBudget,
    pub separator_budget: SeparatorBudget,
    /// Per-vertex level for the summary's `thm14/n` fraction; defaults to
    /// the spectral constant at `λ₂ = k - 2√(k-1)`.
    pub threshold: Option<f64>,
}

impl Default for ExperimentCaps {
    fn default() -> Self {
        Self {
            cheeger_max_n: Some(20),
            gonality_max_n: Some(12),
            gonality_budget: SearchBudget::default(),
            separator_budget: SeparatorBudget::default(),
            threshold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub index: u64,
    pub graph_hash: String,
    pub connected: bool,
    pub simple: bool,
    pub lambda2: f64,
    pub lambda2_error: f64,
    pub thm14: Option<f64>,
    pub thm14_ceiling: Option<i64>,
    pub thm14_per_vertex: Option<f64>,
    pub cheeger: Option<CheegerProfile>,
    #[serde(serialize_with = "rational::serialize_opt")]
    pub thm11: Option<Rational>,
    #[serde(serialize_with = "rational::serialize_opt")]
    pub thm13: Option<Rational>,
    /// `min(genus bound, independence bound)`.
    pub upper: Option<usize>,
    pub gonality: Option<usize>,
    /// Lower ceilings `<= gonality <=` upper; present with the gonality.
    pub sandwich_holds: Option<bool>,
    /// Rows skipped or stopped by a budget.
    pub notes: Vec<String>,
}

fn evaluate(index: u64, g: &Multigraph, caps: &ExperimentCaps) -> ExperimentRecord {
    let n = g.vertex_count();
    let connected = g.is_connected();
    let mut rec = ExperimentRecord {
        index,
        graph_hash: graph_hash(g),
        connected,
        simple: g.is_simple(),
        lambda2: 0.0,
        lambda2_error: 0.0,
        thm14: None,
        thm14_ceiling: None,
        thm14_per_vertex: None,
        cheeger: None,
        thm11: None,
        thm13: None,
        upper: None,
        gonality: None,
        sandwich_holds: None,
        notes: Vec::new(),
    };
    if !connected {
        rec.notes.push("disconnected: bound rows skipped".into());
        return rec;
    }
    match algebraic_connectivity(g, DEFAULT_TOL) {
        Ok(s) => {
            rec.lambda2 = s.lambda2;
            rec.lambda2_error = s.error_bound;
            if let Ok(b) = spectral_gonality_bound(&s) {
                rec.thm14 = Some(b.value);
                rec.thm14_ceiling = Some(b.ceiling);
                rec.thm14_per_vertex = Some(b.value / n as f64);
            }
        }
        Err(e) => rec.notes.push(format!("spectral: {e}")),
    }
    if caps.cheeger_max_n.is_some_and(|cap| n <= cap) {
        let budget = CheegerBudget { exact_max_n: n, ..CheegerBudget::default() };
        match cheeger_profile(g, &budget) {
            Ok(p) => {
                if let Ok(b) = thm13_bound(g, &p) {
                    rec.thm13 = Some(b.value);
                }
                let lower: Vec<_> = (1..=n / 2)
                    .map(|j| {
                        let u = Rational::new(j as i64, n as i64);
                        match b_u(g, u, &caps.separator_budget) {
                            Ok(c) => Ok((u, c.size, BuSource::Exact)),
                            Err(ExpansionError::SeparatorBudget { lower, .. }) => {
                                Ok((u, lower, BuSource::SearchLowerBound))
                            }
                            Err(e) => Err(e),
                        }
                    })
                    .collect::<Result<_, _>>()
                    .unwrap_or_default();
                if lower.iter().any(|&(_, _, s)| s == BuSource::SearchLowerBound) {
                    rec.notes.push("separator budget: thm11 uses search lower bounds".into());
                }
                match thm11_from_lower_bounds(g, &p, &lower) {
                    Ok(b) => rec.thm11 = Some(b.value),
                    Err(e) => rec.notes.push(format!("thm11: {e}")),
                }
                rec.cheeger = Some(p);
            }
            Err(e) => rec.notes.push(format!("cheeger: {e}")),
        }
    }
    let genus = genus_upper_bound(g).map(|b| b.value).unwrap_or(usize::MAX);
    let independence = independence_upper_bound(g, &MisBudget::default()).value;
    rec.upper = Some(genus.min(independence));
    if caps.gonality_max_n.is_some_and(|cap| n <= cap) {
        match exact_gonality(g, &caps.gonality_budget) {
            Ok(c) => {
                let gon = c.value as i64;
                let lowers = [
                    rec.thm11.map(|r| rational::ceil(&r)),
                    rec.thm13.map(|r| rational::ceil(&r)),
                    rec.thm14_ceiling,
                ];
                let upper = rec.upper.map_or(i64::MAX, |u| u as i64);
                rec.gonality = Some(c.value);
                rec.sandwich_holds = Some(lowers.iter().flatten().all(|&l| l <= gon) && gon <= upper);
            }
            Err(e) => rec.notes.push(format!("gonality: {e}")),
        }
    }
    rec
}

/// Mean, extremes and nearest-rank quantiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
    pub max: f64,
}

impl Distribution {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q = |p: f64| sorted[((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1];
        Some(Self {
            count: sorted.len(),
            mean: values.iter().sum::<f64>() / values.len() as f64,
            min: sorted[0],
            q10: q(0.1),
            median: q(0.5),
            q90: q(0.9),
            max: sorted[sorted.len() - 1],
        })
    }
}

pub const ASYMPTOTIC_NOTE: &str = "The linear-in-n gonality bounds for random regular graphs hold \
asymptotically almost surely as n grows; these finite samples illustrate the distribution and \
cannot confirm them.";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub samples: usize,
    pub connected: usize,
    pub lambda2: Option<Distribution>,
    pub thm14_per_vertex: Option<Distribution>,
    pub threshold: f64,
    /// Share of connected samples with `thm14/n >= threshold`.
    pub fraction_at_threshold: Option<f64>,
    pub with_gonality: usize,
    pub sandwich_violations: usize,
    pub note: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Experiment {
    pub params: ConfigModelParams,
    pub records: Vec<ExperimentRecord>,
    pub summary: ExperimentSummary,
}

/// Samples `samples` graphs and evaluates each. Output depends only on the
/// arguments, not on the thread count.
pub fn run_experiment(
    params: &ConfigModelParams,
    samples: u64,
    caps: &ExperimentCaps,
) -> Result<Experiment, RandGraphError> {
    params.validate()?;
    let records = (0..samples)
        .into_par_iter()
        .map(|i| Ok(evaluate(i, &sample_for_index(params, i)?, caps)))
        .collect::<Result<Vec<_>, RandGraphError>>()?;
    let threshold = caps
        .threshold
        .unwrap_or_else(|| thm14_constant(ramanujan_lambda2(f64::from(params.k)), f64::from(params.k)));
    let connected: Vec<&ExperimentRecord> = records.iter().filter(|r| r.connected).collect();
    let lambdas: Vec<f64> = connected.iter().map(|r| r.lambda2).collect();
    let per_vertex: Vec<f64> = connected.iter().filter_map(|r| r.thm14_per_vertex).collect();
    let at_threshold = per_vertex.iter().filter(|&&x| x >= threshold).count();
    let summary = ExperimentSummary {
        samples: records.len(),
        connected: connected.len(),
        lambda2: Distribution::of(&lambdas),
        thm14_per_vertex: Distribution::of(&per_vertex),
        threshold,
        fraction_at_threshold: (!per_vertex.is_empty()).then(|| at_threshold as f64 / per_vertex.len() as f64),
        with_gonality: records.iter().filter(|r| r.gonality.is_some()).count(),
        sandwich_violations: records.iter().filter(|r| r.sandwich_holds == Some(false)).count(),
        note: ASYMPTOTIC_NOTE,
    };
    Ok(Experiment { params: *params, records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: u32, n: usize, seed: u64, mode: Mode) -> ConfigModelParams {
        ConfigModelParams { k, n, seed, mode }
    }

    #[test]
    fn small_simple_cases_are_forced() {
        for seed in 0..20 {
            let g = sample_configuration(&params(3, 4, seed, Mode::Simple)).unwrap();
            assert_eq!(g.edge_count(), 6);
            assert!(g.is_simple());
            let c = sample_configuration(&params(2, 5, seed, Mode::Simple)).unwrap();
            assert!(c.is_simple() && c.is_connected());
            assert_eq!(c.regularity(), Some(2));
        }
    }

    #[test]
    fn samples_are_regular_and_loop_free() {
        for seed in 0..30 {
            let g = sample_for_index(&params(3, 10, seed, Mode::Multigraph), seed).unwrap();
            assert_eq!(g.regularity(), Some(3));
            let s = sample_for_index(&params(4, 9, seed, Mode::Simple), seed).unwrap();
            assert_eq!(s.regularity(), Some(4));
            assert!(s.is_simple());
        }
    }

    #[test]
    fn parameter_errors() {
        assert_eq!(params(3, 5, 0, Mode::Simple).validate(), Err(RandGraphError::OddHalfEdges { k: 3, n: 5 }));
        assert_eq!(params(4, 4, 0, Mode::Simple).validate(), Err(RandGraphError::NoSimpleGraph { k: 4, n: 4 }));
        assert_eq!(params(0, 4, 0, Mode::Simple).validate(), Err(RandGraphError::Empty));
        assert_eq!("multi".parse::<Mode>(), Err(RandGraphError::UnknownMode("multi".into())));
    }

    #[test]
    fn golden_hash() {
        let g = sample_configuration(&params(3, 100, 42, Mode::Simple)).unwrap();
        assert_eq!(g.regularity(), Some(3));
        assert_eq!(graph_hash(&g), "2bfb0a908a18106c");
    }

    #[test]
    fn experiment_is_deterministic_and_sound() {
        let p = params(3, 8, 7, Mode::Simple);
        let caps = ExperimentCaps::default();
        let a = run_experiment(&p, 12, &caps).unwrap();
        let b = run_experiment(&p, 12, &caps).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.summary.sandwich_violations, 0);
        assert_eq!(a.summary.with_gonality, a.summary.connected);
        let empty = run_experiment(&p, 0, &caps).unwrap();
        assert!(empty.records.is_empty());
        assert_eq!((empty.summary.lambda2.clone(), empty.summary.fraction_at_threshold), (None, None));
    }

    #[test]
    fn distribution_quantiles() {
        let d = Distribution::of(&[5.0, 1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!((d.min, d.median, d.max, d.mean), (1.0, 3.0, 5.0, 3.0));
        assert_eq!((d.q10, d.q90), (1.0, 5.0));
    }
}
