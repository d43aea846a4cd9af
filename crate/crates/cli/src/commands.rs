use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use gonlab::bounds::{
    full_report, ramanujan_lambda2, thm11_bound, thm13_bound, thm13_constant, thm14_constant,
    BoundReport, CheegerConstants, GridBound, ReportBudget, Row,
};
use gonlab::expansion::{
    b_u, b_u_profile, cheeger_profile, CheegerBudget, CheegerProfile, Enumeration, ExpansionError,
    SeparatorBudget, SeparatorCertificate,
};
use gonlab::gonality::{
    exact_gonality, genus_upper_bound, independence_upper_bound, GonalityError, MisBudget,
    SearchBudget,
};
use gonlab::graph::pappus_rings;
use gonlab::randgraph::{run_experiment, sample_for_index, ConfigModelParams, ExperimentCaps, Mode};
use gonlab::reduction::{dhar_burn, has_positive_rank, rank_at_least, v_reduce, ReductionError};
use gonlab::spectral::{algebraic_connectivity, spectral_gonality_bound};
use gonlab::{load_graph, rational, Divisor, Multigraph};

use crate::output::{list, opt, Report};

/// Budgets shared by all subcommands.
#[derive(Debug, Clone, Copy)]
pub struct Budgets {
    pub seconds: Option<f64>,
    pub candidates: u128,
    pub cheeger_n: usize,
    pub subsets: u64,
    pub separator_nodes: u64,
    pub mis_nodes: u64,
    pub rank_checks: u64,
}

impl Budgets {
    fn search(&self, max_degree: Option<usize>) -> SearchBudget {
        SearchBudget {
            max_degree,
            max_candidates: self.candidates,
            time_limit: self.seconds.map(Duration::from_secs_f64),
        }
    }

    fn cheeger(&self, enumeration: Enumeration) -> CheegerBudget {
        CheegerBudget { exact_max_n: self.cheeger_n, enumeration, max_subsets: self.subsets }
    }

    fn separator(&self) -> SeparatorBudget {
        SeparatorBudget { max_nodes: self.separator_nodes }
    }

    fn mis(&self) -> MisBudget {
        MisBudget { max_nodes: self.mis_nodes }
    }

    fn report(&self) -> ReportBudget {
        ReportBudget {
            cheeger: self.cheeger(Enumeration::Connected),
            separator: self.separator(),
            mis: self.mis(),
            ..ReportBudget::default()
        }
    }
}

/// A finished command. `exhausted` carries the message when a budget ran
/// out and the report is partial.
pub struct Outcome {
    pub report: Report,
    pub exhausted: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self { report, exhausted: None }
    }
}

/// A file path if one exists, otherwise a named graph.
pub fn load(source: &str) -> Result<Multigraph> {
    let path = Path::new(source);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {source}"))?;
        return load_graph(&text).with_context(|| source.to_string());
    }
    Multigraph::named(source)
        .with_context(|| format!("{source} is neither a readable file nor a named graph"))
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn graph_fields(g: &Multigraph) -> Vec<(&'static str, String)> {
    vec![
        ("vertices", g.vertex_count().to_string()),
        ("edges", g.edge_count().to_string()),
        ("regularity", opt(g.regularity())),
    ]
}

fn graph_json(g: &Multigraph) -> Value {
    json!({"vertices": g.vertex_count(), "edges": g.edge_count(), "regularity": g.regularity()})
}

fn row_text<T>(row: &Row<T>, f: impl Fn(&T) -> String) -> String {
    match row {
        Row::Computed(t) => f(t),
        Row::Inapplicable(why) => format!("inapplicable ({why})"),
        Row::Exhausted(why) => format!("exhausted ({why})"),
    }
}

fn grid_rows(b: &GridBound) -> Vec<Vec<String>> {
    b.rows
        .iter()
        .map(|r| {
            vec![
                r.u.to_string(),
                r.b_u.to_string(),
                to_json(&r.b_u_source).as_str().unwrap_or_default().to_string(),
                r.cheeger_term.to_string(),
                r.row_min.to_string(),
            ]
        })
        .collect()
}

fn grid_summary(b: &GridBound) -> String {
    format!("{} at u = {} (ceiling {})", b.value, b.argmax_u, b.ceiling)
}

const GRID_HEADERS: [&str; 5] = ["u", "B_u", "source", "h·u·n", "row-min"];

fn bounds_report(g: &Multigraph, rep: &BoundReport) -> Report {
    let mut report = Report::new(to_json(rep)).fields("graph", graph_fields(g));
    if let Row::Computed(b) = &rep.thm11 {
        report = report.table("thm11 grid (B_u from separators)", &GRID_HEADERS, grid_rows(b));
    }
    if let Row::Computed(b) = &rep.thm13 {
        report = report.table("thm13 grid (B_u from h_u/(k+h_u)·n)", &GRID_HEADERS, grid_rows(b));
    }
    report.fields(
        "bounds",
        [
            ("thm11", row_text(&rep.thm11, grid_summary)),
            ("thm13", row_text(&rep.thm13, grid_summary)),
            (
                "thm14",
                row_text(&rep.thm14, |s| {
                    format!("{} (certified {}, ceiling {})", fmt_f64(s.value), fmt_f64(s.certified), s.ceiling)
                }),
            ),
            ("upper (genus)", rep.genus.value.to_string()),
            ("upper (independence)", rep.independence.value.to_string()),
            ("bracket", format!("[{}, {}]", rep.bracket.lower, rep.bracket.upper)),
            ("consistent", rep.bracket.consistent.to_string()),
        ],
    )
}

pub fn bounds(g: &Multigraph, budgets: &Budgets) -> Result<Outcome> {
    let rep = full_report(g, &budgets.report())?;
    let exhausted = rep.partial().then(|| "a budget ran out; affected rows are marked".to_string());
    Ok(Outcome { report: bounds_report(g, &rep), exhausted })
}

pub fn gonality(g: &Multigraph, budgets: &Budgets, max_degree: Option<usize>) -> Result<Outcome> {
    let genus = genus_upper_bound(g)?;
    let independence = independence_upper_bound(g, &budgets.mis());
    let uppers = [("genus_bound", genus.value), ("independence_bound", independence.value)];
    match exact_gonality(g, &budgets.search(max_degree)) {
        Ok(c) => {
            let json = json!({
                "graph": graph_json(g),
                "gonality": to_json(&c),
                "genus_bound": to_json(&genus),
                "independence_bound": to_json(&independence),
            });
            let report = Report::new(json).fields("graph", graph_fields(g)).fields(
                "gonality",
                [
                    ("value", c.value.to_string()),
                    ("witness", c.witness.to_literal()),
                    ("cleared through degree", c.cleared_through.to_string()),
                    ("candidates checked", c.candidates_checked.to_string()),
                    ("exhaustive", c.exhaustive.to_string()),
                ]
                .into_iter()
                .chain(uppers.iter().map(|&(k, v)| (k, v.to_string()))),
            );
            Ok(report.into())
        }
        Err(e @ GonalityError::BudgetExhausted { lower, upper, cleared_through }) => {
            let json = json!({
                "graph": graph_json(g),
                "status": "exhausted",
                "lower": lower,
                "upper": upper,
                "cleared_through": cleared_through,
            });
            let report = Report::new(json).fields("graph", graph_fields(g)).fields(
                "gonality (partial)",
                [
                    ("lower", lower.to_string()),
                    ("upper", upper.to_string()),
                    ("cleared through degree", cleared_through.to_string()),
                ],
            );
            Ok(Outcome { report, exhausted: Some(e.to_string()) })
        }
        Err(e) => Err(e.into()),
    }
}

fn cheeger_table(p: &CheegerProfile) -> Vec<Vec<String>> {
    p.rows
        .iter()
        .map(|r| vec![r.j.to_string(), r.u.to_string(), r.h_u.to_string(), r.boundary.to_string(), list(&r.witness)])
        .collect()
}

pub fn cheeger(g: &Multigraph, budgets: &Budgets, all_subsets: bool) -> Result<Outcome> {
    let enumeration = if all_subsets { Enumeration::AllSubsets } else { Enumeration::Connected };
    match cheeger_profile(g, &budgets.cheeger(enumeration)) {
        Ok(p) => {
            let kind = to_json(&p.kind).as_str().unwrap_or_default().to_string();
            let report = Report::new(json!({"graph": graph_json(g), "profile": to_json(&p)}))
                .fields("graph", graph_fields(g))
                .table("u-Cheeger profile", &["j", "u", "h_u", "boundary", "witness"], cheeger_table(&p))
                .fields("summary", [("kind", kind), ("h", p.cheeger_constant().to_string())]);
            Ok(report.into())
        }
        Err(e @ ExpansionError::SubsetBudget { .. }) => {
            let report = Report::new(json!({"graph": graph_json(g), "status": "exhausted", "error": e.to_string()}))
                .fields("graph", graph_fields(g));
            Ok(Outcome { report, exhausted: Some(e.to_string()) })
        }
        Err(e) => Err(e.into()),
    }
}

fn separator_row(c: &SeparatorCertificate) -> Vec<String> {
    vec![
        c.u.to_string(),
        c.max_component.to_string(),
        c.size.to_string(),
        c.optimal.to_string(),
        list(&c.separator),
        list(&c.component_sizes),
    ]
}

pub fn bu(g: &Multigraph, budgets: &Budgets, u: Option<&str>) -> Result<Outcome> {
    let results = match u {
        Some(text) => {
            let u = rational::parse(text).with_context(|| format!("bad fraction `{text}`; expected p/q"))?;
            vec![b_u(g, u, &budgets.separator())]
        }
        None => {
            if g.vertex_count() < 2 {
                bail!("B_u needs at least two vertices");
            }
            b_u_profile(g, &budgets.separator())
        }
    };
    let mut certs = Vec::new();
    let mut exhausted = None;
    for r in results {
        match r {
            Ok(c) => certs.push(c),
            Err(ExpansionError::SeparatorBudget { lower, incumbent }) => {
                exhausted.get_or_insert(format!(
                    "separator search stopped; B_u({}) lies in [{lower}, {}]",
                    incumbent.u, incumbent.size
                ));
                certs.push(*incumbent);
            }
            Err(e) => return Err(e.into()),
        }
    }
    let report = Report::new(json!({"graph": graph_json(g), "separators": to_json(&certs)}))
        .fields("graph", graph_fields(g))
        .table(
            "B_u",
            &["u", "max component", "B_u", "optimal", "separator", "components"],
            certs.iter().map(separator_row).collect(),
        );
    Ok(Outcome { report, exhausted })
}

pub fn spectral(g: &Multigraph, tol: f64) -> Result<Outcome> {
    let s = algebraic_connectivity(g, tol)?;
    let bound = s.connected.then(|| spectral_gonality_bound(&s)).transpose()?;
    let (lo, hi) = s.lambda2_interval();
    let json = json!({
        "graph": graph_json(g),
        "spectral": to_json(&s),
        "lambda2_interval": [lo, hi],
        "thm14": bound.as_ref().map(to_json),
    });
    let report = Report::new(json).fields("graph", graph_fields(g)).fields(
        "spectral",
        [
            ("lambda2", fmt_f64(s.lambda2)),
            ("error bound", fmt_f64(s.error_bound)),
            ("residual", fmt_f64(s.residual)),
            ("d_max", s.d_max.to_string()),
            ("connected", s.connected.to_string()),
            ("thm14", opt(bound.as_ref().map(|b| fmt_f64(b.value)))),
            ("thm14 certified", opt(bound.as_ref().map(|b| fmt_f64(b.certified)))),
            ("thm14 ceiling", opt(bound.as_ref().map(|b| b.ceiling))),
        ],
    );
    Ok(report.into())
}

fn parse_divisor(g: &Multigraph, text: &str) -> Result<Divisor> {
    Ok(Divisor::parse(text, g.vertex_count())?)
}

pub fn reduce(g: &Multigraph, divisor: &str, vertex: usize) -> Result<Outcome> {
    let d = parse_divisor(g, divisor)?;
    if vertex >= g.vertex_count() {
        bail!("vertex {vertex} out of range for a graph on {} vertices", g.vertex_count());
    }
    let reduced = v_reduce(g, &d, vertex)?;
    let burn = dhar_burn(g, &reduced, vertex)?;
    let json = json!({
        "graph": graph_json(g),
        "input": d,
        "vertex": vertex,
        "reduced": reduced,
        "burn": to_json(&burn),
    });
    let report = Report::new(json).fields("graph", graph_fields(g)).fields(
        "reduction",
        [
            ("input", d.to_literal()),
            ("degree", d.degree().to_string()),
            ("vertex", vertex.to_string()),
            ("reduced", reduced.to_literal()),
            ("chips at vertex", reduced.get(vertex).to_string()),
            ("fully burnt", burn.fully_burnt.to_string()),
        ],
    );
    Ok(report.into())
}

pub fn rank(g: &Multigraph, budgets: &Budgets, divisor: &str, r: usize) -> Result<Outcome> {
    let d = parse_divisor(g, divisor)?;
    match rank_at_least(g, &d, r, budgets.rank_checks) {
        Ok(q) => {
            let json = json!({"graph": graph_json(g), "divisor": d, "r": r, "query": to_json(&q)});
            let report = Report::new(json).fields("graph", graph_fields(g)).fields(
                "rank",
                [
                    ("divisor", d.to_literal()),
                    ("degree", d.degree().to_string()),
                    (&*format!("rank >= {r}"), q.holds.to_string()),
                    ("witness", opt(q.witness.as_ref().map(Divisor::to_literal))),
                    ("checked", q.checked.to_string()),
                ],
            );
            Ok(report.into())
        }
        Err(e @ ReductionError::BudgetExceeded { .. }) => {
            let json = json!({"graph": graph_json(g), "divisor": d, "r": r, "status": "exhausted"});
            let report = Report::new(json).fields("graph", graph_fields(g));
            Ok(Outcome { report, exhausted: Some(e.to_string()) })
        }
        Err(e) => Err(e.into()),
    }
}

pub struct RandomArgs {
    pub k: u32,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub mode: Mode,
    pub gonality_cap: usize,
    pub cheeger_cap: usize,
    pub threshold: Option<f64>,
    pub emit_graphs: Option<std::path::PathBuf>,
}

fn fmt_f64(x: f64) -> String {
    // same digits as the JSON output
    serde_json::Value::from(x).to_string()
}

pub fn random(args: &RandomArgs, budgets: &Budgets) -> Result<Outcome> {
    let params = ConfigModelParams { k: args.k, n: args.n, seed: args.seed, mode: args.mode };
    let caps = ExperimentCaps {
        cheeger_max_n: (args.cheeger_cap > 0).then_some(args.cheeger_cap),
        gonality_max_n: (args.gonality_cap > 0).then_some(args.gonality_cap),
        gonality_budget: budgets.search(None),
        separator_budget: budgets.separator(),
        threshold: args.threshold,
    };
    let exp = run_experiment(&params, args.samples, &caps)?;
    if let Some(dir) = &args.emit_graphs {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for r in &exp.records {
            let g = sample_for_index(&params, r.index)?;
            let path = dir.join(format!("sample_{:04}.txt", r.index));
            fs::write(&path, g.to_edge_list_text()).with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    let cubic = CheegerConstants::random_cubic();
    let cheeger_constant = thm13_constant(&cubic);
    let k = f64::from(args.k);
    let spectral_constant = thm14_constant(ramanujan_lambda2(k), k);
    let json = json!({
        "params": to_json(&exp.params),
        "samples": args.samples,
        "records": to_json(&exp.records),
        "summary": to_json(&exp.summary),
        "constants": {
            "cheeger_pipeline": to_json(&cubic),
            "cheeger_per_vertex": cheeger_constant.to_string(),
            "spectral_lambda2": ramanujan_lambda2(k),
            "spectral_per_vertex": spectral_constant,
        },
    });
    let rows = exp
        .records
        .iter()
        .map(|r| {
            vec![
                r.index.to_string(),
                r.graph_hash.clone(),
                r.connected.to_string(),
                fmt_f64(r.lambda2),
                opt(r.thm14.map(fmt_f64)),
                opt(r.thm14_per_vertex.map(fmt_f64)),
                opt(r.thm11),
                opt(r.thm13),
                opt(r.gonality),
                opt(r.upper),
                opt(r.sandwich_holds),
            ]
        })
        .collect();
    let s = &exp.summary;
    let dist = |d: &Option<gonlab::randgraph::Distribution>| {
        d.as_ref().map_or("-".to_string(), |d| {
            format!(
                "mean {} min {} q10 {} median {} q90 {} max {}",
                fmt_f64(d.mean),
                fmt_f64(d.min),
                fmt_f64(d.q10),
                fmt_f64(d.median),
                fmt_f64(d.q90),
                fmt_f64(d.max)
            )
        })
    };
    let report = Report::new(json)
        .fields(
            "parameters",
            [
                ("k", args.k.to_string()),
                ("n", args.n.to_string()),
                ("samples", args.samples.to_string()),
                ("seed", args.seed.to_string()),
                ("mode", to_json(&args.mode).as_str().unwrap_or_default().to_string()),
            ],
        )
        .table(
            "samples",
            &["index", "hash", "connected", "lambda2", "thm14", "thm14/n", "thm11", "thm13", "gonality", "upper", "sandwich"],
            rows,
        )
        .fields(
            "summary",
            [
                ("connected", s.connected.to_string()),
                ("lambda2", dist(&s.lambda2)),
                ("thm14/n", dist(&s.thm14_per_vertex)),
                ("threshold", fmt_f64(s.threshold)),
                ("fraction >= threshold", opt(s.fraction_at_threshold.map(fmt_f64))),
                ("with gonality", s.with_gonality.to_string()),
                ("sandwich violations", s.sandwich_violations.to_string()),
                ("note", s.note.to_string()),
            ],
        )
        .fields(
            "constants",
            [
                ("cheeger per vertex", format!("{cheeger_constant} = {}", fmt_f64(rational::to_f64(&cheeger_constant)))),
                ("spectral lambda2", fmt_f64(ramanujan_lambda2(k))),
                ("spectral per vertex", fmt_f64(spectral_constant)),
            ],
        );
    Ok(report.into())
}

pub fn pappus_demo(budgets: &Budgets) -> Result<Outcome> {
    let g = gonlab::graph::pappus();
    let profile = cheeger_profile(&g, &budgets.cheeger(Enumeration::Connected))?;
    if !profile.is_exact() {
        bail!("the Cheeger cap is below 18; the demo needs the exact profile");
    }
    let certs: Vec<SeparatorCertificate> =
        b_u_profile(&g, &budgets.separator()).into_iter().collect::<Result<_, _>>()?;
    let thm11 = thm11_bound(&g, &profile, &certs)?;
    let thm13 = thm13_bound(&g, &profile)?;
    let s = algebraic_connectivity(&g, gonlab::spectral::DEFAULT_TOL)?;
    let thm14 = spectral_gonality_bound(&s)?;
    let middle = Divisor::from_vertices(g.vertex_count(), &pappus_rings::MIDDLE);
    let middle_ok = has_positive_rank(&g, &middle)?;
    let gon = exact_gonality(&g, &budgets.search(None))?;
    let genus = genus_upper_bound(&g)?;
    let independence = independence_upper_bound(&g, &budgets.mis());
    let exact_lambda = 3.0 - 3f64.sqrt();
    let json = json!({
        "cheeger": to_json(&profile),
        "lambda2": s.lambda2,
        "lambda2_error": s.error_bound,
        "lambda2_closed_form": exact_lambda,
        "thm11_exact_separators": to_json(&thm11),
        "thm11_cheeger_transform": to_json(&thm13),
        "thm14": to_json(&thm14),
        "middle_ring_divisor": middle,
        "middle_ring_positive_rank": middle_ok,
        "gonality": to_json(&gon),
        "genus_bound": to_json(&genus),
        "independence_bound": to_json(&independence),
    });
    let report = Report::new(json)
        .fields("graph", graph_fields(&g))
        .table("u-Cheeger profile", &["j", "u", "h_u", "boundary", "witness"], cheeger_table(&profile))
        .table("grid with B_u from h_u/(3+h_u)·n", &GRID_HEADERS, grid_rows(&thm13))
        .table("grid with exact B_u", &GRID_HEADERS, grid_rows(&thm11))
        .fields(
            "bounds",
            [
                ("lambda2", format!("{} (3-√3 = {}, error <= {})", fmt_f64(s.lambda2), fmt_f64(exact_lambda), fmt_f64(s.error_bound))),
                ("cheeger-transform grid", grid_summary(&thm13)),
                ("exact-separator grid", grid_summary(&thm11)),
                ("thm14", format!("{} (certified {}, ceiling {})", fmt_f64(thm14.value), fmt_f64(thm14.certified), thm14.ceiling)),
                ("middle ring divisor", middle.to_literal()),
                ("positive rank", middle_ok.to_string()),
                ("gonality", gon.value.to_string()),
                ("cleared through degree", gon.cleared_through.to_string()),
                ("candidates checked", gon.candidates_checked.to_string()),
                ("upper (genus)", genus.value.to_string()),
                ("upper (independence)", independence.value.to_string()),
            ],
        );
    Ok(report.into())
}
