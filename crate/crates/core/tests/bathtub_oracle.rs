//! Both bathtub fills against exhaustive greedy references.

mod common;

#[test]
fn bathtub_fills_match_greedy_reference() {
    let bad = common::bathtub_oracle_mismatches(11, 200);
    assert!(bad.is_empty(), "{} mismatches: {bad:?}", bad.len());
}

#[test]
fn radial_profile_gives_concentric_levels() {
    use patchvortex::solver::bathtub_two_level;
    use patchvortex::ScalarField;
    let grid = common::disk_grid(256);
    let psi = ScalarField::from_fn(grid.clone(), |p| -p.norm()).unwrap();
    let (lower, upper, c) = bathtub_two_level(&psi, 20.0, 800.0).unwrap();
    let r_upper = upper.support().map(|(k, _)| grid.center(k).norm()).fold(0.0, f64::max);
    let r_lower_min = lower
        .support()
        .filter(|&(k, _)| Some(k) != lower.shared().map(|s| s.0))
        .map(|(k, _)| grid.center(k).norm())
        .fold(f64::INFINITY, f64::min);
    assert!(r_upper <= r_lower_min + 1e-12);
    assert!((upper.occupied_area() - 1.0 / 800.0).abs() < 1e-12);
    assert!((lower.occupied_area() - 1.0 / 20.0).abs() < 1e-12);
    assert!(c <= 0.0 && -c >= r_upper - 1e-12);
}
