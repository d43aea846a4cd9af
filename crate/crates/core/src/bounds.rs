//! Gonality lower bounds from expansion, assembled into one report together
//! with the genus and independence upper bounds.
//!
//! Grid bounds take `max_u min{B_u, h·u·n}` over `u = j/n`. `B_u` comes
//! either from exact separators or, on `k`-regular graphs, from the
//! transform `h_u/(k + h_u)·n`, which never exceeds it.

use serde::Serialize;
use thiserror::Error;

use crate::expansion::{
    b_u_profile, cheeger_profile, CheegerBudget, CheegerProfile, ExpansionError,
    SeparatorBudget, SeparatorCertificate,
};
use crate::gonality::{
    genus_upper_bound, independence_upper_bound, GenusBound, GonalityError, IndependenceBound,
    MisBudget,
};
use crate::graph::Multigraph;
use crate::rational::{self, Rational};
use crate::spectral::{
    algebraic_connectivity, gonality_bound_formula, spectral_gonality_bound, SpectralBound,
    SpectralError, SpectralSummary, DEFAULT_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("h_u values are heuristic upper bounds and cannot give a lower bound")]
    HeuristicProfile,
    #[error("B_u certificate for u = {0} is not optimal")]
    NonOptimalSeparator(Rational),
    #[error("no B_u value for grid point j = {0}")]
    MissingGridPoint(usize),
    #[error("graph is not regular")]
    NotRegular,
    #[error("profile is for {profile} vertices, graph has {graph}")]
    SizeMismatch { profile: usize, graph: usize },
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Gonality(#[from] GonalityError),
}

/// Where a row's `B_u` value comes from. Every source is a lower bound on
/// the true `B_u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BuSource {
    /// Optimal separator.
    Exact,
    /// Certified lower end of an unfinished separator search.
    SearchLowerBound,
    /// `h_u/(k + h_u)·n` on a `k`-regular graph.
    CheegerTransform,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridRow {
    pub j: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub u: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub b_u: Rational,
    pub b_u_source: BuSource,
    /// `h(G)·u·n`.
    #[serde(serialize_with = "rational::serialize")]
    pub cheeger_term: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub row_min: Rational,
}

/// Best grid value, at the smallest maximising `u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridBound {
    #[serde(serialize_with = "rational::serialize")]
    pub value: Rational,
    pub argmax_j: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub argmax_u: Rational,
    pub ceiling: i64,
    pub rows: Vec<GridRow>,
}

impl GridBound {
    fn from_rows(rows: Vec<GridRow>) -> Self {
        let best = rows
            .iter()
            .fold(None::<&GridRow>, |best, r| match best {
                Some(b) if b.row_min >= r.row_min => Some(b),
                _ => Some(r),
            })
            .expect("grid has at least one point");
        let (value, argmax_j, argmax_u) = (best.row_min, best.j, best.u);
        Self { value, argmax_j, argmax_u, ceiling: rational::ceil(&value), rows }
    }
}

fn checked_profile(g: &Multigraph, profile: &CheegerProfile) -> Result<(), BoundsError> {
    if !profile.is_exact() {
        return Err(BoundsError::HeuristicProfile);
    }
    if profile.n != g.vertex_count() {
        return Err(BoundsError::SizeMismatch { profile: profile.n, graph: g.vertex_count() });
    }
    Ok(())
}

fn grid_rows(
    profile: &CheegerProfile,
    mut b_u: impl FnMut(usize) -> Result<(Rational, BuSource), BoundsError>,
) -> Result<Vec<GridRow>, BoundsError> {
    let h = profile.cheeger_constant();
    let n = Rational::from_integer(profile.n as i64);
    profile
        .rows
        .iter()
        .map(|row| {
            let (b, source) = b_u(row.j)?;
            let cheeger_term = h * row.u * n;
            Ok(GridRow {
                j: row.j,
                u: row.u,
                b_u: b,
                b_u_source: source,
                cheeger_term,
                row_min: b.min(cheeger_term),
            })
        })
        .collect()
}

/// `max_u min{B_u, h·u·n}` with exact `B_u` from optimal separators.
pub fn thm11_bound(
    g: &Multigraph,
    profile: &CheegerProfile,
    bu_values: &[SeparatorCertificate],
) -> Result<GridBound, BoundsError> {
    let lower: Vec<(Rational, usize)> = bu_values
        .iter()
        .map(|c| {
            if c.optimal {
                Ok((c.u, c.size))
            } else {
                Err(BoundsError::NonOptimalSeparator(c.u))
            }
        })
        .collect::<Result<_, _>>()?;
    let sources: Vec<_> = lower.iter().map(|&(u, s)| (u, s, BuSource::Exact)).collect();
    thm11_from_lower_bounds(g, profile, &sources)
}

/// As [`thm11_bound`], from per-`u` lower bounds on `B_u`.
pub fn thm11_from_lower_bounds(
    g: &Multigraph,
    profile: &CheegerProfile,
    bu_lower: &[(Rational, usize, BuSource)],
) -> Result<GridBound, BoundsError> {
    checked_profile(g, profile)?;
    let rows = grid_rows(profile, |j| {
        let u = Rational::new(j as i64, profile.n as i64);
        bu_lower
            .iter()
            .find(|&&(v, _, _)| v == u)
            .map(|&(_, size, source)| (Rational::from_integer(size as i64), source))
            .ok_or(BoundsError::MissingGridPoint(j))
    })?;
    Ok(GridBound::from_rows(rows))
}

/// `max_u min{h_u/(k + h_u)·n, h·u·n}` on a `k`-regular graph.
pub fn thm13_bound(g: &Multigraph, profile: &CheegerProfile) -> Result<GridBound, BoundsError> {
    checked_profile(g, profile)?;
    let k = Rational::from_integer(i64::from(g.regularity().ok_or(BoundsError::NotRegular)?));
    let n = Rational::from_integer(profile.n as i64);
    let rows = grid_rows(profile, |j| {
        let h_u = profile.at(j).ok_or(BoundsError::MissingGridPoint(j))?.h_u;
        Ok((h_u / (k + h_u) * n, BuSource::CheegerTransform))
    })?;
    Ok(GridBound::from_rows(rows))
}

pub fn thm14_bound(summary: &SpectralSummary) -> Result<SpectralBound, BoundsError> {
    Ok(spectral_gonality_bound(summary)?)
}

/// Cheeger-side constants for the per-vertex `thm13` pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheegerConstants {
    pub k: i64,
    #[serde(serialize_with = "rational::serialize")]
    pub u: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub h_u: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub h: Rational,
}

impl CheegerConstants {
    /// `h_u >= 0.24` at `u = 0.36` and `h >= 1/4.95` for random cubic graphs.
    pub fn random_cubic() -> Self {
        Self {
            k: 3,
            u: Rational::new(36, 100),
            h_u: Rational::new(24, 100),
            h: Rational::new(100, 495),
        }
    }
}

/// `min{h_u/(k + h_u), h·u}`: the coefficient of `n` in the Cheeger bound.
pub fn thm13_constant(c: &CheegerConstants) -> Rational {
    let transform = c.h_u / (Rational::from_integer(c.k) + c.h_u);
    transform.min(c.h * c.u)
}

/// Coefficient of `n` in the spectral bound for given `λ₂` and `d`.
pub fn thm14_constant(lambda2: f64, d: f64) -> f64 {
    gonality_bound_formula(lambda2, d, 1.0)
}

/// `d - 2√(d-1)`, the asymptotic `λ₂` of random `d`-regular graphs.
pub fn ramanujan_lambda2(d: f64) -> f64 {
    d - 2.0 * (d - 1.0).sqrt()
}

/// One report entry: a value, or why there is none.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", content = "result", rename_all = "snake_case")]
pub enum Row<T> {
    Computed(T),
    Inapplicable(String),
    Exhausted(String),
}

impl<T> Row<T> {
    pub fn computed(&self) -> Option<&T> {
        match self {
            Row::Computed(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, Row::Exhausted(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralRow {
    pub lambda2: f64,
    pub lambda2_error: f64,
    pub d_max: u32,
    pub value: f64,
    pub certified: f64,
    pub ceiling: i64,
}

/// `[lower, upper]` for the gonality. `consistent` is false when a lower
/// bound exceeds an upper bound, which means some bound is wrong for this
/// graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bracket {
    pub lower: i64,
    pub upper: i64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub edges: usize,
    pub regularity: Option<u32>,
    pub cheeger: Row<CheegerProfile>,
    pub separators: Row<Vec<SeparatorCertificate>>,
    pub thm11: Row<GridBound>,
    pub thm13: Row<GridBound>,
    pub thm14: Row<SpectralRow>,
    pub genus: GenusBound,
    pub independence: IndependenceBound,
    pub bracket: Bracket,
}

impl BoundReport {
    /// Some row stopped on a budget.
    pub fn partial(&self) -> bool {
        self.cheeger.is_exhausted()
            || self.separators.is_exhausted()
            || self.thm11.is_exhausted()
            || self.thm13.is_exhausted()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportBudget {
    pub cheeger: CheegerBudget,
    pub separator: SeparatorBudget,
    pub mis: MisBudget,
    pub spectral_tol: f64,
}

impl Default for ReportBudget {
    fn default() -> Self {
        Self {
            cheeger: CheegerBudget::default(),
            separator: SeparatorBudget::default(),
            mis: MisBudget::default(),
            spectral_tol: DEFAULT_TOL,
        }
    }
}

fn separators(
    g: &Multigraph,
    budget: &SeparatorBudget,
) -> (Row<Vec<SeparatorCertificate>>, Vec<(Rational, usize, BuSource)>) {
    let mut certs = Vec::new();
    let mut lower = Vec::new();
    let mut failure = None;
    for result in b_u_profile(g, budget) {
        match result {
            Ok(c) => {
                lower.push((c.u, c.size, BuSource::Exact));
                certs.push(c);
            }
            Err(ExpansionError::SeparatorBudget { lower: lo, incumbent }) => {
                lower.push((incumbent.u, lo, BuSource::SearchLowerBound));
                failure.get_or_insert_with(|| {
                    format!("separator search for u = {} stopped with B_u in [{lo}, {}]", incumbent.u, incumbent.size)
                });
                certs.push(*incumbent);
            }
            Err(e) => return (Row::Inapplicable(e.to_string()), Vec::new()),
        }
    }
    match failure {
        Some(msg) => (Row::Exhausted(msg), lower),
        None => (Row::Computed(certs), lower),
    }
}

/// Every applicable bound for `g`. Budget exhaustion in one row leaves the
/// others intact; see [`BoundReport::partial`].
pub fn full_report(g: &Multigraph, budget: &ReportBudget) -> Result<BoundReport, BoundsError> {
    let genus = genus_upper_bound(g)?;
    let small = g.vertex_count() < 2;
    let ((cheeger, separators_row, thm11, thm13), (thm14, independence)) = rayon::join(
        || {
            if small {
                let why = || "needs at least two vertices".to_string();
                return (Row::Inapplicable(why()), Row::Inapplicable(why()), Row::Inapplicable(why()), Row::Inapplicable(why()));
            }
            let (profile, (sep_row, lower)) = rayon::join(
                || cheeger_profile(g, &budget.cheeger),
                || separators(g, &budget.separator),
            );
            let cheeger = match profile {
                Ok(p) => Row::Computed(p),
                Err(e @ ExpansionError::SubsetBudget { .. }) => Row::Exhausted(e.to_string()),
                Err(e) => Row::Inapplicable(e.to_string()),
            };
            let (thm11, thm13) = match &cheeger {
                Row::Computed(p) if !p.is_exact() => {
                    let why = BoundsError::HeuristicProfile.to_string();
                    (Row::Inapplicable(why.clone()), Row::Inapplicable(why))
                }
                Row::Computed(p) => {
                    let thm11 = match (&sep_row, thm11_from_lower_bounds(g, p, &lower)) {
                        (Row::Inapplicable(why), _) => Row::Inapplicable(why.clone()),
                        (_, Ok(b)) => Row::Computed(b),
                        (_, Err(e)) => Row::Inapplicable(e.to_string()),
                    };
                    let thm13 = match thm13_bound(g, p) {
                        Ok(b) => Row::Computed(b),
                        Err(e) => Row::Inapplicable(e.to_string()),
                    };
                    (thm11, thm13)
                }
                Row::Exhausted(why) => (Row::Exhausted(why.clone()), Row::Exhausted(why.clone())),
                Row::Inapplicable(why) => (Row::Inapplicable(why.clone()), Row::Inapplicable(why.clone())),
            };
            (cheeger, sep_row, thm11, thm13)
        },
        || {
            let spectral = algebraic_connectivity(g, budget.spectral_tol)
                .map_err(BoundsError::from)
                .and_then(|s| Ok((thm14_bound(&s)?, s)));
            let thm14 = match spectral {
                Ok((b, s)) => Row::Computed(SpectralRow {
                    lambda2: s.lambda2,
                    lambda2_error: s.error_bound,
                    d_max: s.d_max,
                    value: b.value,
                    certified: b.certified,
                    ceiling: b.ceiling,
                }),
                Err(e) => Row::Inapplicable(e.to_string()),
            };
            (thm14, independence_upper_bound(g, &budget.mis))
        },
    );
    let lower = [
        thm11.computed().map(|b| b.ceiling),
        thm13.computed().map(|b| b.ceiling),
        thm14.computed().map(|s| s.ceiling),
    ]
    .into_iter()
    .flatten()
    .fold(1, i64::max);
    let upper = genus.value.min(independence.value) as i64;
    Ok(BoundReport {
        n: g.vertex_count(),
        edges: g.edge_count(),
        regularity: g.regularity(),
        cheeger,
        separators: separators_row,
        thm11,
        thm13,
        thm14,
        genus,
        independence,
        bracket: Bracket { lower, upper, consistent: lower <= upper },
    })
}
