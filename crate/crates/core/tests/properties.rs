use num_complex::Complex64;
use proptest::prelude::*;
use yangtrace::contour_quadrature::mellin_barnes_4gamma;
use yangtrace::gauss_manin::{gm_connection, gm_residual, total_difference_identity};
use yangtrace::special_core::{c64, relative_residual};
use yangtrace::trace_evaluators::{
    general_trace, general_trace_with, trace_type_ii_multipoint_vanishing, ContourOptions, Sign, TraceSpec,
};
use yangtrace::{DeformParams, PrecisionConfig};

fn prec() -> PrecisionConfig {
    PrecisionConfig::default()
}

fn point(re: std::ops::Range<f64>, im: std::ops::Range<f64>) -> impl Strategy<Value = Complex64> {
    (re, im).prop_map(|(a, b)| c64(a, b))
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mellin_barnes_is_symmetric_in_pairs(
        a in point(0.2..1.5, -0.3..0.3), b in point(0.2..1.5, -0.3..0.3),
        c in point(0.2..1.5, -0.3..0.3), d in point(0.2..1.5, -0.3..0.3),
    ) {
        let x = mellin_barnes_4gamma(a, b, c, d, &prec()).unwrap().numeric;
        let y = mellin_barnes_4gamma(b, a, d, c, &prec()).unwrap().numeric;
        prop_assert!(relative_residual(x, y) < 1e-10);
    }

    #[test]
    fn type_i_trace_depends_on_differences(
        z1 in point(-0.3..0.3, -0.2..0.2), z2 in point(-0.3..0.3, -0.2..0.2),
        shift in point(-0.5..0.5, -0.5..0.5), nu in sign(), g in 2.3f64..3.5,
    ) {
        let p = DeformParams::real(1.0, g).unwrap();
        let a = TraceSpec::new(vec![], vec![(z1, nu.flip()), (z2, nu)], p).unwrap();
        let b = TraceSpec::new(vec![], vec![(z1 + shift, nu.flip()), (z2 + shift, nu)], p).unwrap();
        let x = general_trace(&a, &prec()).unwrap().value;
        let y = general_trace(&b, &prec()).unwrap().value;
        prop_assert!(relative_residual(x, y) < 1e-9);
    }

    #[test]
    fn type_ii_trace_ignores_line_position(
        b1 in point(-0.2..0.2, -0.2..0.2), b2 in point(-0.2..0.2, -0.2..0.2),
        eps in sign(), g in 2.3f64..3.5, gap in 0.15f64..0.85,
    ) {
        let p = DeformParams::real(1.0, g).unwrap();
        let spec = TraceSpec::new(vec![(b1, eps), (b2, eps.flip())], vec![], p).unwrap();
        let x = general_trace(&spec, &prec()).unwrap().value;
        let y = general_trace_with(&spec, &prec(), &ContourOptions { gap_fraction: gap }).unwrap().value;
        prop_assert!(relative_residual(x, y) < 1e-9);
    }

    #[test]
    fn two_point_type_ii_vanishes_at_free_point(
        b1 in point(0.0..0.5, -0.2..0.2), b2 in point(0.0..0.5, -0.2..0.2), eps in sign(),
    ) {
        let p = DeformParams::real(1.0, 2.0).unwrap();
        let rep = trace_type_ii_multipoint_vanishing(&[b1, b2], &[eps, eps.flip()], &p, &prec()).unwrap();
        prop_assert!(rep.residual < 1e-8);
    }

    #[test]
    fn total_difference_identity_holds(
        b1 in point(0.0..0.7, -0.2..0.2), b2 in point(0.0..0.7, -0.2..0.2), b3 in point(0.0..0.7, -0.2..0.2),
        m in 1usize..=3, s in sign(),
    ) {
        prop_assume!((b1 - b2).norm() > 1e-3 && (b2 - b3).norm() > 1e-3 && (b1 - b3).norm() > 1e-3);
        let c = total_difference_identity(m, s, [b1, b2, b3], 1.0, &prec(), &ContourOptions::default()).unwrap();
        prop_assert!(c.residual < 1e-8);
    }

    #[test]
    fn corrected_connection_holds(
        b1 in point(0.0..0.6, -0.2..0.2), b2 in point(0.0..0.6, -0.2..0.2), b3 in point(0.0..0.6, -0.2..0.2),
        k in sign(),
    ) {
        prop_assume!((b1 - b2).norm() > 1e-2 && (b2 - b3).norm() > 1e-2 && (b1 - b3).norm() > 1e-2);
        let beta = [b1, b2, b3];
        let res = gm_residual(beta, k, 1.0, &gm_connection(beta, 1.0), &prec()).unwrap();
        prop_assert!(res.iter().all(|r| *r < 1e-9));
    }
}
