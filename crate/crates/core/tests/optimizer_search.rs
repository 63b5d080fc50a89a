use zzc_core::optimizer::{grid_seed, refine, search, Axis, Objective, SearchReport, SeedBounds};
use zzc_core::tables::published;
use zzc_core::{validate, Error, PrecisionConfig};

fn row2_start() -> zzc_core::SearchPoint {
    published().preset(2).unwrap().point(1, &PrecisionConfig::default()).unwrap()
}

#[test]
fn zero_budget_returns_the_start() {
    let prec = PrecisionConfig::default();
    let start = row2_start();
    let rep = refine(&start, &Objective::c1_capped(0.245).unwrap(), 0, &prec).unwrap();
    assert_eq!(rep.best, start);
    assert_eq!(rep.evaluations, 1);
    assert_eq!(rep.trace.len(), 1);
}

#[test]
fn capped_refinement_improves_and_respects_cap() {
    let prec = PrecisionConfig::default();
    let rep = refine(&row2_start(), &Objective::c1_capped(0.245).unwrap(), 60, &prec).unwrap();
    assert!(rep.best_constants.c1 <= 0.245);
    assert!(rep.best_constants.c2 <= 6.666);
    assert!(validate(&rep.best).is_empty());
    assert!(rep.evaluations <= 61);
    for pair in rep.trace.windows(2) {
        assert!(pair[1].objective < pair[0].objective);
    }
}

#[test]
fn reports_are_byte_identical_and_round_trip() {
    let prec = PrecisionConfig::default();
    let objective = Objective::weighted([1.0, 0.1, 0.1]).unwrap();
    let a = refine(&row2_start(), &objective, 40, &prec).unwrap();
    let b = refine(&row2_start(), &objective, 40, &prec).unwrap();
    let (ja, jb) = (serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(ja, jb);
    let back: SearchReport = serde_json::from_str(&ja).unwrap();
    assert_eq!(back, a);
}

#[test]
fn seeded_search_is_deterministic() {
    let prec = PrecisionConfig::default();
    let bounds = SeedBounds {
        c: Axis::new("1.03", "1.06", 3),
        r: Axis::new("1.2", "1.3", 3),
        eta: Axis::new("1e-3", "5e-2", 3),
    };
    let seeds = grid_seed(&bounds, 64, 39, &prec.float(1), &prec).unwrap();
    assert!(seeds.iter().all(|s| validate(s).is_empty()));
    let objective = Objective::c1_capped(0.25).unwrap();
    let a = search(&seeds, &objective, 20, 2, &prec).unwrap();
    let b = search(&seeds, &objective, 20, 2, &prec).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.best_constants.c1 <= 0.25);
}

#[test]
fn empty_feasible_lattice_is_an_error() {
    let prec = PrecisionConfig::default();
    let bounds = SeedBounds {
        c: Axis::fixed("0.9"),
        r: Axis::fixed("1.2"),
        eta: Axis::fixed("1e-3"),
    };
    assert!(matches!(grid_seed(&bounds, 64, 39, &prec.float(1), &prec), Err(Error::Search(_))));
}
