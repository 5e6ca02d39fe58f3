//! Preset datasets must come out complete: every row ok, the grid exactly
//! the advertised size, and the headline landmarks where the presets put
//! them.

use nhpb_cli::{figure_preset, run_scan, Dataset};

fn run(name: &str) -> Dataset {
    let config = figure_preset(name).expect("preset exists");
    run_scan(&config).expect("preset scan runs")
}

fn assert_complete(data: &Dataset, rows: usize) {
    assert_eq!(data.rows.len(), rows);
    let failed = data.failed_rows();
    if failed > 0 {
        let first = data.rows.iter().find(|r| r.failed()).unwrap();
        panic!("{failed} rows failed; first at {:?}: {}", first.axis_values, first.status);
    }
}

#[test]
fn fig2_plane_is_complete_and_antibunched_at_the_working_point() {
    let data = run("fig2");
    assert_complete(&data, 201 * 301);

    // d = gamma_2/10 sits at axis index 100, zero detuning at index 150.
    let row = &data.rows[100 * 301 + 150];
    assert_eq!(row.axis_values, vec![0.1, 0.0]);
    assert!(row.values.g2.unwrap() < 1e-2);
    // Width and occupation columns ride along on this preset.
    let (p1, p2) = (row.values.gamma_p1.unwrap(), row.values.gamma_p2.unwrap());
    assert!(p1 < p2 / 10.0, "narrow chain not separated: {p1} vs {p2}");
    assert!(row.values.n2_p1.unwrap() < 1e-3);
}

#[test]
fn fig3_spectrum_reproduces_the_frozen_minimum() {
    let data = run("fig3");
    assert_complete(&data, 301);

    let row = &data.rows[150];
    assert_eq!(row.axis_values, vec![0.0]);
    let g2 = row.values.g2.unwrap();
    let frozen = 3.505_650_597_187_839e-3;
    assert!(((g2 - frozen) / frozen).abs() < 1e-12, "g2 drifted: {g2:e}");
    assert!(row.values.g3.unwrap() < g2);
    assert!(row.values.g2_two_state.unwrap() < 1e-2);
    let tampered = row.values.g2_tampered.unwrap();
    assert!((0.5..2.0).contains(&tampered), "tampered g2 left unity: {tampered}");
}

#[test]
fn fig_s1_plane_is_complete() {
    let data = run("figS1");
    assert_complete(&data, 201 * 301);
}

#[test]
fn fig_s2_plane_is_complete_with_a_constant_threshold_per_column() {
    let data = run("figS2");
    assert_complete(&data, 201 * 201);

    // The threshold depends on the coupling column only, never on d.
    for col in [0usize, 100, 200] {
        let base = data.rows[col * 201].values.d_threshold.unwrap();
        for i in 0..201 {
            assert_eq!(data.rows[col * 201 + i].values.d_threshold, Some(base));
        }
    }
    // The uncoupled edge of the plane is exactly unstructured light.
    let edge = data.rows[100 * 201].values.g2.unwrap();
    assert!((edge - 1.0).abs() < 1e-12, "g2 at d = 0 is {edge}");
}

#[test]
fn fig_s3_plane_is_complete_and_the_link_tracks_the_axis() {
    let data = run("figS3");
    assert_complete(&data, 201 * 301);
}

#[test]
fn fig_s4_plane_is_complete() {
    let data = run("figS4");
    assert_complete(&data, 201 * 301);
}

#[test]
fn fig_s5_plane_is_complete() {
    let data = run("figS5");
    assert_complete(&data, 201 * 301);
}
