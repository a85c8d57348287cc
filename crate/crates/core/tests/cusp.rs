use std::f64::consts::{PI, TAU};

use conemetric::cusp::{
    annulus_area, annulus_area_log, calabi_energy, calabi_energy_log, cusp_limit_check, hyperbolic_annulus_area_log,
    indicator_curve_log, psi_mean_derivative, weak_cusp_indicator, weak_cusp_indicator_log, AnnulusGrid,
    LogRadiusFactor,
};
use conemetric::{ConformalFactor, Preset};
use proptest::prelude::*;

/// Area of `e^{t_in} < r < e^{t_out}` under the spherical cone:
/// `∫ 2π 4α^2 u/(1+u)^2 dt` with `u = e^{2αt}`, i.e. `4πα [1/(1+u)]`.
fn spherical_annulus_area(alpha: f64, t_in: f64, t_out: f64) -> f64 {
    let g = |t: f64| 1.0 / (1.0 + (2.0 * alpha * t).exp());
    4.0 * PI * alpha * (g(t_in) - g(t_out))
}

#[test]
fn hyperbolic_indicator_is_two_pi_over_t() {
    for big_t in [10.0, 100.0, 1e4] {
        let v = weak_cusp_indicator_log(&Preset::HyperbolicCusp, &[-big_t]).unwrap();
        let expected = TAU / big_t;
        assert!((v - expected).abs() <= 1e-6 * expected, "{big_t}: {v}");
    }
}

#[test]
fn spherical_cones_keep_their_angle() {
    for alpha in [0.5, 1.0, 1.5, 2.0] {
        let f = Preset::spherical_cone(alpha).unwrap();
        let v = weak_cusp_indicator_log(&f, &[-10.0, -100.0, -1e4]).unwrap();
        assert!(v >= TAU * alpha - 1e-3, "{alpha}: {v}");
        assert!(v <= TAU * alpha + 1e-12);
    }
}

#[test]
fn flat_cones_are_exact() {
    for alpha in [0.3, 1.0, 2.5] {
        let v = weak_cusp_indicator(&Preset::flat_cone(alpha).unwrap(), &[0.9, 0.5, 1e-3, 1e-8]).unwrap();
        assert!((v - TAU * alpha).abs() < 1e-12);
    }
}

#[test]
fn numerical_derivatives_track_the_presets() {
    for preset in [Preset::spherical_cone(1.5).unwrap(), Preset::HyperbolicCusp, Preset::flat_cone(0.7).unwrap()] {
        let numeric = LogRadiusFactor(move |t: f64, th: f64| preset.phi_log(t, th));
        for t in [-0.5, -2.0, -10.0] {
            let a = psi_mean_derivative(&preset, t, 32).unwrap();
            let b = psi_mean_derivative(&numeric, t, 32).unwrap();
            assert!((a - b).abs() < 1e-7 * (1.0 + a.abs()), "{preset:?} at {t}: {a} vs {b}");
        }
    }
}

#[test]
fn angular_dependence_is_averaged() {
    // φ = (α-1) ln r + ε r cos θ: the harmonic term integrates to zero.
    let alpha = 1.5;
    let f = LogRadiusFactor(move |t: f64, th: f64| (alpha - 1.0) * t + 0.3 * t.exp() * th.cos());
    for t in [-1.0, -3.0] {
        let v = psi_mean_derivative(&f, t, 64).unwrap();
        assert!((v - TAU * alpha).abs() < 1e-8, "{v}");
    }
}

#[test]
fn limit_checks_match_the_asymptotics() {
    let rs = [0.5, 1e-2, 1e-4, 1e-6, 1e-8];
    assert!(cusp_limit_check(&Preset::HyperbolicCusp, &rs).unwrap());
    for alpha in [0.5, 1.5, 2.0] {
        assert!(cusp_limit_check(&Preset::spherical_cone(alpha).unwrap(), &rs).unwrap());
    }
    // φ = -ln r leaves φ + ln r = 0.
    assert!(!cusp_limit_check(&LogRadiusFactor(|t: f64, _| -t), &rs).unwrap());
    assert!(cusp_limit_check(&Preset::HyperbolicCusp, &[0.1, 0.5]).is_err());
}

#[test]
fn calabi_energy_of_constant_curvature_models() {
    let grid = AnnulusGrid::default();
    for alpha in [0.5, 1.5, 2.0] {
        let f = Preset::spherical_cone(alpha).unwrap();
        for (r_in, r_out) in [(0.05, 0.5), (0.2, 0.9), (1e-3, 0.1)] {
            let e = calabi_energy(&f, r_in, r_out, grid).unwrap();
            let exact = spherical_annulus_area(alpha, f64::ln(r_in), f64::ln(r_out));
            assert!((e - exact).abs() < 1e-3 * exact, "α {alpha} ({r_in}, {r_out}): {e} vs {exact}");
            let a = annulus_area(&f, r_in, r_out, grid).unwrap();
            assert!((a - exact).abs() < 1e-9 * exact);
        }
    }
    for alpha in [0.5, 2.0] {
        let e = calabi_energy(&Preset::flat_cone(alpha).unwrap(), 0.01, 0.9, grid).unwrap();
        assert!(e.abs() < 1e-6, "{e}");
    }
    for (t_in, t_out) in [(-50.0, -1.0), (-5.0, -0.5), (-1e3, -10.0)] {
        let e = calabi_energy_log(&Preset::HyperbolicCusp, t_in, t_out, grid).unwrap();
        let exact = hyperbolic_annulus_area_log(t_in, t_out);
        assert!(exact > 0.0);
        assert!((e - exact).abs() < 1e-3 * exact, "({t_in}, {t_out}): {e} vs {exact}");
        let a = annulus_area_log(&Preset::HyperbolicCusp, t_in, t_out, grid).unwrap();
        assert!((a - exact).abs() < 1e-6 * exact);
    }
}

#[test]
fn coarse_grids_are_rejected() {
    let f = Preset::spherical_cone(1.5).unwrap();
    assert!(calabi_energy(&f, 0.1, 0.5, AnnulusGrid { radial: 1, angular: 32 }).is_err());
    assert!(calabi_energy(&f, 0.1, 0.5, AnnulusGrid { radial: 16, angular: 4 }).is_err());
    assert!(calabi_energy(&f, 0.5, 0.1, AnnulusGrid::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// -Δψ = K e^{2ψ} >= 0 makes Ψ'(t) non-increasing in t.
    #[test]
    fn mean_derivative_is_monotone_for_nonnegative_curvature(
        alpha in 0.1..4.0f64,
        spherical in any::<bool>(),
    ) {
        let f = if spherical { Preset::spherical_cone(alpha).unwrap() } else { Preset::flat_cone(alpha).unwrap() };
        let ts: Vec<f64> = (0..=98).map(|k| -50.0 + 0.5 * k as f64).collect();
        let values: Vec<f64> = ts.iter().map(|&t| psi_mean_derivative(&f, t, 16).unwrap()).collect();
        for w in values.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-6);
        }
        let curve = indicator_curve_log(&f, &[-1.0, -10.0, -50.0]).unwrap();
        prop_assert!(curve.iter().all(|&(_, v)| v > 0.0 && v <= TAU * alpha + 1e-12));
    }

    #[test]
    fn hyperbolic_indicator_scales_inversely(big_t in 1.0..1e5f64) {
        let v = weak_cusp_indicator_log(&Preset::HyperbolicCusp, &[-big_t]).unwrap();
        prop_assert!((v * big_t / TAU - 1.0).abs() < 1e-6);
    }
}
