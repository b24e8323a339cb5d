use proptest::prelude::*;
use salhi_core::analytic::{self, DetectionScheme};
use salhi_core::optimizer::{optimize_g2, run_sweep, Grid, Objective, SweepSpec, Swept};
use salhi_core::{Bounds, Config, ConfigF32};

fn cfg(g1: f64, g2: f64, l: f64, eta: f64) -> Config {
    Config::with_amplitudes(g1, g2, l, eta).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn optimized_gain_never_loses(g1 in 1.1f64..5.0, g2 in 1.0f64..10.0, l in 0.0f64..0.99, eta in 0.0f64..0.9) {
        let base = cfg(g1, g2, l, eta);
        for (objective, before) in [
            (Objective::Visibility, analytic::visibility_su(&base).value),
            (Objective::Snr, analytic::snr_su_id(&base).value),
        ] {
            let o = optimize_g2(&base, objective, DetectionScheme::Id, Bounds::default());
            prop_assert!(o.value >= before * (1.0 - 1e-12), "{objective:?}: {} < {before}", o.value);
        }
    }

    #[test]
    fn id_optima_coincide(g1 in 1.5f64..5.0, l in 0.3f64..0.95, eta in 0.0f64..0.6) {
        let base = cfg(g1, 5.0, l, eta);
        let v = optimize_g2(&base, Objective::Visibility, DetectionScheme::Id, Bounds::default());
        prop_assume!(v.exact && v.gain.amplitude() > 1.05 && v.gain.amplitude() < 9.5);
        let s = optimize_g2(&base, Objective::Snr, DetectionScheme::Id, Bounds::default());
        prop_assert!((s.gain.amplitude() - v.gain.amplitude()).abs() <= 1e-3);
    }

    #[test]
    fn sweep_rows_follow_the_grid(points in 2usize..40, g1 in 1.1f64..5.0) {
        let spec = SweepSpec {
            swept: Swept::LossEta,
            grid: Grid { min: 0.0, max: 0.9, points },
            base: cfg(g1, 3.0, 0.5, 0.2),
            scheme: DetectionScheme::Id,
            objective: None,
            bounds: Bounds::default(),
        };
        let rows = run_sweep(&spec).unwrap().rows;
        prop_assert_eq!(rows.len(), points);
        for (row, eta) in rows.iter().zip(spec.grid.values()) {
            prop_assert_eq!(row.swept_value, eta);
            let point = spec.base.with_losses(salhi_core::Losses { l: 0.5, eta });
            prop_assert_eq!(row.visibility_su, analytic::visibility_su(&point).value);
        }
    }

    #[test]
    fn single_precision_tracks_double(g1 in 1.0f64..5.0, g2 in 1.0f64..5.0, l in 0.0f64..=1.0, eta in 0.0f64..=1.0) {
        let v64 = analytic::visibility_su(&cfg(g1, g2, l, eta)).value;
        let c32 = ConfigF32::with_amplitudes(g1 as f32, g2 as f32, l as f32, eta as f32).unwrap();
        let v32 = analytic::visibility_su(&c32).value;
        prop_assert!((v32 as f64 - v64).abs() <= 1e-4, "{v32} vs {v64}");
    }
}
