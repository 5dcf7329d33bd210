use chiralq_core::bq::Biquaternion;
use chiralq_core::convergence::{extrapolate_to_zero, fit_order};
use chiralq_core::diffops::{apply_m, SampledField, SpacetimeGrid, StencilSpec};
use chiralq_core::fundamental::{
    alpha_of_omega, fourier_F, fourier_F_reparametrized, fundamental_f, fundamental_f_intermediate, k_alpha,
    radiation_residual,
};
use chiralq_core::maxwell::{assemble_v, recover_eh, EMField};
use chiralq_core::presets::{gaussian_pulse, GaussianPulse};
use chiralq_core::specfun::bessel_j0_j1;
use chiralq_core::MediumParams;
use num_complex::Complex64;
use proptest::prelude::*;

fn medium() -> impl Strategy<Value = MediumParams> {
    (0.5f64..3.0, 0.5f64..3.0, 0.2f64..2.0, any::<bool>())
        .prop_map(|(e, m, b, neg)| MediumParams::new(e, m, if neg { -b } else { b }).unwrap())
}

fn point(r_min: f64, r_max: f64) -> impl Strategy<Value = [f64; 3]> {
    (prop::array::uniform3(-1.0f64..1.0), r_min..r_max)
        .prop_filter("direction", |(d, _)| {
            let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            n > 0.1 && n <= 1.0
        })
        .prop_map(|(d, r)| {
            let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            d.map(|c| c * r / n)
        })
}

fn rel(a: Biquaternion, b: Biquaternion) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn kernel_is_zero_before_zero(p in medium(), x in point(1e-3, 10.0), t in -100.0f64..-1e-12) {
        prop_assert_eq!(fundamental_f(t, x, &p).unwrap(), Biquaternion::ZERO);
    }

    #[test]
    fn final_and_intermediate_forms_agree(p in medium(), x in point(0.05, 5.0), t in 0.0f64..5.0) {
        let a = fundamental_f(t, x, &p).unwrap();
        let b = fundamental_f_intermediate(t, x, &p).unwrap();
        prop_assert!(rel(a, b) < 1e-12, "{}", rel(a, b));
    }

    #[test]
    fn fourier_kernel_paths_agree(
        p in medium(),
        x in point(0.2, 4.0),
        re in -10.0f64..10.0,
        im in 0.0f64..2.0,
    ) {
        let omega = Complex64::new(re, -im);
        prop_assume!((p.beta() * p.sqrt_eps_mu() * omega - 1.0).norm() > 1e-3);
        let f = fourier_F(omega, x, &p).unwrap();
        let g = fourier_F_reparametrized(omega, x, &p).unwrap();
        prop_assert!(rel(g, f) < 1e-12);
        // (βsω - 1) i F = K_α(ω)
        let lhs = f.scale((p.beta() * p.sqrt_eps_mu() * omega - 1.0) * Complex64::i());
        let k = k_alpha(x, alpha_of_omega(omega, &p).unwrap()).unwrap();
        prop_assert!(rel(lhs, k) < 1e-12);
    }

    #[test]
    fn radiation_residual_decays_quadratically(x in point(1.0, 2.0), alpha in 0.1f64..5.0) {
        let a = radiation_residual(x, Complex64::new(alpha, 0.0)).unwrap();
        let b = radiation_residual(x.map(|c| 10.0 * c), Complex64::new(alpha, 0.0)).unwrap();
        prop_assert!((b * 100.0 - a).abs() <= 1e-10 * a);
    }

    #[test]
    fn bessel_values_are_bounded(z in 0.0f64..1e4) {
        let (j0, j1) = bessel_j0_j1(z).unwrap();
        prop_assert!(j0.abs() <= 1.0 && j1.abs() <= 1.0);
    }

    #[test]
    fn j0_derivative_is_minus_j1(z in 0.1f64..50.0) {
        let h = 1e-5;
        let d = (bessel_j0_j1(z + h).unwrap().0 - bessel_j0_j1(z - h).unwrap().0) / (2.0 * h);
        prop_assert!((d + bessel_j0_j1(z).unwrap().1).abs() < 1e-8);
    }

    #[test]
    fn extrapolation_is_exact_on_low_degree_polynomials(
        c in prop::array::uniform4(-5.0f64..5.0),
        h in 0.01f64..1.0,
    ) {
        let xs = [h, h / 2.0, h / 4.0, h / 8.0];
        let poly = |x: f64| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
        let samples: Vec<(f64, f64)> = xs.iter().map(|&x| (x, poly(x))).collect();
        let v = extrapolate_to_zero(&samples).unwrap();
        prop_assert!((v - c[0]).abs() <= 1e-9 * (1.0 + c.iter().map(|v| v.abs()).sum::<f64>()));
    }

    #[test]
    fn order_fit_recovers_power_laws(p in 0.5f64..6.0, k in 1e-3f64..1e3) {
        let s: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&h: &f64| (h, k * h.powf(p))).collect();
        let fit = fit_order(&s).unwrap();
        prop_assert!((fit.order - p).abs() < 1e-9 && fit.r_squared > 1.0 - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recover_inverts_assemble(p in medium(), e in prop::array::uniform3(-5.0f64..5.0), h in prop::array::uniform3(-5.0f64..5.0)) {
        let g = SpacetimeGrid::uniform(0.1, 0.1, [2, 2, 2, 2], [0.0; 4]).unwrap();
        let em = EMField::from_fn(g, |t, x| {
            let s = 1.0 + t + x[0] - x[1] * x[2];
            (e.map(|c| c * s), h.map(|c| c * s))
        });
        let back = recover_eh(&assemble_v(&em, &p), &p).unwrap();
        for (a, b) in em.e().iter().chain(em.h()).zip(back.e().iter().chain(back.h())) {
            for k in 0..3 {
                prop_assert!((a[k] - b[k]).abs() <= 1e-14 * a[k].abs().max(1.0));
            }
        }
    }

    #[test]
    fn m_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in prop::array::uniform8(-1.0f64..1.0)) {
        let p = MediumParams::new(1.3, 0.8, 0.4).unwrap();
        let g = SpacetimeGrid::uniform(0.1, 0.1, [4, 4, 4, 4], [0.0; 4]).unwrap();
        let f = SampledField::from_fn(g.clone(), |t, x| {
            Biquaternion::from_components(std::array::from_fn(|k| seed[k] * (t + (k as f64 + 1.0) * x[k % 3]).sin()))
        });
        let h = SampledField::from_fn(g.clone(), |t, x| {
            Biquaternion::from_components(std::array::from_fn(|k| seed[7 - k] * (x[0] * x[1] - t * k as f64)))
        });
        let comb = SampledField::new(
            g,
            f.values().iter().zip(h.values()).map(|(u, v)| u.scale_real(a) + v.scale_real(b)).collect(),
        )
        .unwrap();
        let s = StencilSpec::default();
        let (mf, mh, mc) = (apply_m(&f, &p, s).unwrap(), apply_m(&h, &p, s).unwrap(), apply_m(&comb, &p, s).unwrap());
        let scale = mc.max_norm().max(mf.max_norm() * a.abs() + mh.max_norm() * b.abs()).max(1e-300);
        for ((x, y), z) in mf.values().iter().zip(mh.values()).zip(mc.values()) {
            prop_assert!((x.scale_real(a) + y.scale_real(b) - *z).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn gaussian_pulse_satisfies_continuity(
        j0 in prop::array::uniform3(-2.0f64..2.0),
        center in prop::array::uniform3(-0.5f64..0.5),
        sigma in 0.2f64..0.6,
        t in 0.0f64..2.4,
        x in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let src = gaussian_pulse(GaussianPulse { j0, center, sigma, ..Default::default() }).unwrap();
        let s = StencilSpec::default();
        let lhs = src.rho_t(t, x, 0.1, s) + src.div_j(t, x, [0.1; 3], s);
        let scale = src.rho_t(t, x, 0.1, s).abs() + src.div_j(t, x, [0.1; 3], s).abs();
        prop_assert!(lhs.abs() <= 1e-12 * scale.max(1e-300) || lhs == 0.0);
    }
}
