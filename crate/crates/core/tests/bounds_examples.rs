mod common;

use common::{oracle_gonality, random_connected, rng};
use gonlab::bounds::{full_report, Bracket, ReportBudget, Row};
use gonlab::graph::{complete, cycle, pappus, path};
use gonlab::Multigraph;
use rand::Rng;

#[test]
fn bracket_contains_the_gonality_of_random_graphs() {
    let mut r = rng(17);
    for trial in 0..80 {
        let n = r.random_range(3..=8);
        let p = r.random_range(0.25..0.9);
        let g = random_connected(&mut r, n, p, trial % 4 == 0);
        let rep = full_report(&g, &ReportBudget::default()).unwrap();
        let gon = oracle_gonality(&g) as i64;
        assert!(rep.bracket.consistent);
        assert!(rep.bracket.lower <= gon && gon <= rep.bracket.upper, "trial {trial}: {:?}", g.edge_list());
        assert!(!rep.partial());
    }
}

#[test]
fn trees_have_bracket_one() {
    for g in [path(3), path(6), Multigraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap()] {
        let rep = full_report(&g, &ReportBudget::default()).unwrap();
        assert_eq!(rep.bracket, Bracket { lower: 1, upper: 1, consistent: true });
    }
}

#[test]
fn cycles_and_complete_graphs() {
    for n in 3..=9 {
        let rep = full_report(&cycle(n), &ReportBudget::default()).unwrap();
        assert_eq!(rep.bracket.upper, 2);
        assert!(rep.bracket.lower <= 2);
    }
    let rep = full_report(&complete(4), &ReportBudget::default()).unwrap();
    assert_eq!(rep.regularity, Some(3));
    assert_eq!(rep.thm13.computed().unwrap().ceiling, 2);
    assert_eq!(rep.thm11.computed().unwrap().ceiling, 2);
    assert!(rep.bracket.lower <= 3 && rep.bracket.upper == 3);
}

#[test]
fn pappus_rows() {
    let rep = full_report(&pappus(), &ReportBudget::default()).unwrap();
    assert_eq!(rep.thm11.computed().unwrap().ceiling, 6);
    assert_eq!(rep.thm13.computed().unwrap().ceiling, 5);
    assert_eq!(rep.bracket, Bracket { lower: 6, upper: 9, consistent: true });
}

/// On a single edge the spectral lower bound evaluates to about 1.316,
/// above the gonality 1. The report keeps the value and flags the bracket.
#[test]
fn single_edge_spectral_row_overshoots() {
    let rep = full_report(&path(2), &ReportBudget::default()).unwrap();
    let row = rep.thm14.computed().unwrap();
    assert!((row.value - 1.3160).abs() < 1e-4);
    assert_eq!(oracle_gonality(&path(2)), 1);
    assert!(!rep.bracket.consistent);
}

#[test]
fn heuristic_profile_blocks_expansion_rows() {
    let budget = ReportBudget {
        cheeger: gonlab::expansion::CheegerBudget { exact_max_n: 8, ..Default::default() },
        ..ReportBudget::default()
    };
    let rep = full_report(&pappus(), &budget).unwrap();
    assert!(matches!(rep.thm11, Row::Inapplicable(_)));
    assert!(matches!(rep.thm13, Row::Inapplicable(_)));
    assert_eq!(rep.bracket.lower, 6);
}
