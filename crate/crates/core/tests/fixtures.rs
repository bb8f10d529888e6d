//! Implications that hold on certified orthonormal fixtures.

mod common;

use common::{bad_freq, fixtures, Fixture};
use gabortile::{
    build_h, density_from_tiling, detect_periodic_form, liu_wang_conditions, nonnegative_structure,
    step_test_family, tiling_sum, uniform_density, verify_h_tiling, verify_onb, GaborSystem, Grid,
    LiuWangConfig, OnbConfig, PeriodicForm, ShiftSet, SpectralDensity,
};

fn system(fx: &Fixture) -> GaborSystem<f64> {
    GaborSystem::new(fx.g.clone(), fx.t.clone(), fx.s.clone(), 6.0, 6.0).unwrap()
}

fn detected(set: &ShiftSet<f64>) -> PeriodicForm<f64> {
    let pts = set.enumerate(-40.0, 40.0).unwrap();
    detect_periodic_form(&pts, 10.0, 1e-9).unwrap().unwrap()
}

#[test]
fn liu_wang_conditions_imply_an_orthonormal_basis() {
    let lw = LiuWangConfig::default();
    for fx in fixtures() {
        let conditions = liu_wang_conditions(&fx.g, &fx.t, &fx.s, &lw).unwrap();
        assert!(conditions.verdict, "{}", fx.name);
        let onb = verify_onb(&system(&fx), &OnbConfig::default()).unwrap();
        assert!(onb.gram.passes(1e-10), "{}", fx.name);
        assert!(onb.parseval_passes, "{}: {:?}", fx.name, onb.parseval);
    }
}

#[test]
fn orthonormal_fixtures_tile_at_their_densities() {
    for fx in fixtures() {
        assert!(
            verify_onb(&system(&fx), &OnbConfig::default())
                .unwrap()
                .verdict
        );
        let (form_t, form_s) = (detected(&fx.t), detected(&fx.s));
        let (d_t, d_s) = (form_t.density(), form_s.density());
        assert!((d_t * d_s - 1.0).abs() <= 0.02, "{}", fx.name);

        let grid = Grid::half_open(0.0, form_t.period, 1.0 / 128.0).unwrap();
        let time = tiling_sum(&fx.g.square_modulus(), &fx.t, &grid, 10.0, d_t, 1e-10).unwrap();
        assert!(time.max_abs_deviation <= 1e-10, "{}", fx.name);

        let grid = Grid::half_open(0.0, form_s.period, 1.0 / 128.0).unwrap();
        let phi = SpectralDensity::new(fx.g.clone());
        let freq = tiling_sum(&phi, &fx.s, &grid, 60.0, d_s, 0.02).unwrap();
        assert!(freq.verdict, "{}: {}", fx.name, freq.combined_error);
        // the reported tail really bounds what the truncation leaves out
        assert!(freq.max_abs_deviation <= freq.truncation_tail_bound + 1e-12);
    }
}

#[test]
fn h_tiles_for_every_test_function() {
    for fx in fixtures() {
        let grid = Grid::half_open(0.0, detected(&fx.s).period, 1.0 / 32.0).unwrap();
        for f in step_test_family(&fx.g, 1).unwrap() {
            let h = build_h(&f, &fx.g, &fx.t).unwrap();
            let rep = verify_h_tiling(&h, &fx.s, &grid, 60.0, 0.02).unwrap();
            assert!(rep.verdict, "{}: {}", fx.name, rep.combined_error);
            assert!(rep.max_abs_deviation <= rep.truncation_tail_bound + 1e-12);
        }
    }
}

#[test]
fn h_fails_to_tile_without_orthogonality() {
    let fx = bad_freq();
    assert!(
        !verify_onb(&system(&fx), &OnbConfig::default())
            .unwrap()
            .verdict
    );
    let h = build_h(&fx.g, &fx.g, &fx.t).unwrap();
    let grid = Grid::half_open(0.0, 1.5, 1.0 / 128.0).unwrap();
    assert!(
        verify_h_tiling(&h, &fx.s, &grid, 60.0, 0.02)
            .unwrap()
            .max_abs_deviation
            > 0.1
    );
}

#[test]
fn tiling_densities_match_window_counts() {
    for fx in fixtures() {
        let d_t = detected(&fx.t).density();
        let from_tiling = density_from_tiling(&fx.g.square_modulus(), d_t).unwrap();
        let counted = uniform_density(&fx.t, &[50.0, 100.0, 200.0], 64).unwrap();
        assert!(
            (from_tiling.density - counted.estimate).abs()
                <= from_tiling.error_bound + counted.error_band,
            "{}",
            fx.name
        );
    }
}

#[test]
fn nonnegative_orthonormal_windows_have_the_structure() {
    let lw = LiuWangConfig::default();
    for fx in fixtures() {
        let rep = nonnegative_structure(&fx.g, &fx.t, &fx.s, &lw).unwrap();
        assert!(
            rep.disjoint && rep.value_holds && rep.product_holds,
            "{}",
            fx.name
        );
        assert!(rep.spectral.verdict, "{}", fx.name);
    }
}
