use balanced_g::cli::to_json;
use balanced_g::gfun::{eval_internal, g1011_closed_form, sine_sum, GParams};
use balanced_g::identities::{cor53_sum, psi_integral_check, theorem51_integral, SumIntegralSpec};
use balanced_g::miller_paris::{qhat_poly, qm_poly};
use balanced_g::special::ParamVec;
use balanced_g::verify::{random_suite, random_suite_sequential, Identity};
use balanced_g::Complex64;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mod1_apart(v: &[f64], gap: f64) -> bool {
    v.iter().enumerate().all(|(i, x)| {
        v[..i].iter().all(|y| {
            let d = (x - y).rem_euclid(1.0);
            d.min(1.0 - d) >= gap
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sine_sum_holds(a in prop::collection::vec(0.1f64..2.5, 1..5), shift in prop::collection::vec(-1.0f64..1.0, 4)) {
        prop_assume!(mod1_apart(&a, 0.05));
        let b: Vec<f64> = a.iter().zip(&shift).map(|(x, s)| x + s).collect();
        let (lhs, rhs) = sine_sum(&ParamVec::from_real(&a), &ParamVec::from_real(&b)).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn elementary_g_matches_closed_form(a in 0.1f64..2.0, d in 0.2f64..2.5, r in 0.05f64..0.9, t in -3.0f64..3.0) {
        let g = GParams::from_real(1, 0, &[a + d], &[a]).unwrap();
        let z = Complex64::from_polar(r, t);
        let v = eval_internal(&g, z).unwrap().value;
        let want = g1011_closed_form(c(a + d), c(a), z);
        prop_assert!((v - want).norm() < 1e-11 * want.norm().max(1e-300));
    }

    #[test]
    fn characteristic_polynomials_are_one_at_zero(
        ab in (0.1f64..1.0, 0.1f64..1.0),
        f in 0.3f64..2.5,
        cc in 4.5f64..6.5,
        m in 1u32..=3,
    ) {
        prop_assume!((ab.0 - ab.1).abs() > 0.05 && (f - ab.1).abs() > 0.05);
        let fv = ParamVec::from_real(&[f]);
        let q = qm_poly(c(ab.1), c(cc), &fv, &[m]).unwrap();
        let qh = qhat_poly(c(ab.0), c(ab.1), c(cc), &fv, &[m]).unwrap();
        prop_assert_eq!(q.degree(), m as usize);
        prop_assert!((q.eval(c(0.0)) - 1.0).norm() < 1e-12);
        prop_assert!((qh.eval(c(0.0)) - 1.0).norm() < 1e-12);
        for r in &q.roots {
            prop_assert!(q.eval(*r).norm() < 1e-8 * (1.0 + r.norm()).powi(m as i32));
        }
    }

    #[test]
    fn difference_sum_is_symmetric(
        a in prop::collection::vec(0.1f64..2.5, 1..3),
        lift in 0.2f64..2.0,
        alpha in 0.2f64..1.5,
        beta in 0.2f64..1.5,
        m in 0usize..4,
    ) {
        let b: Vec<f64> = a.iter().map(|x| x + lift).collect();
        let s = SumIntegralSpec::from_real(&a, &b).with_m(m);
        let one = cor53_sum(&s.clone().with_alpha_beta(alpha, beta)).unwrap();
        let two = cor53_sum(&s.with_alpha_beta(beta, alpha)).unwrap();
        prop_assert!((one - two).norm() < 1e-12 * one.norm().max(1.0));
    }

    #[test]
    fn json_numbers_round_trip(x in prop::num::f64::NORMAL) {
        let text = to_json(&serde_json::json!({ "x": x }));
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back["x"].as_f64().unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn digamma_difference_integral(a in 0.05f64..3.0, m in 0usize..6) {
        let r = psi_integral_check(a, m, 1e-9).unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn moment_integral_is_symmetric_in_shifts(a in 0.2f64..2.0, lift in 0.3f64..1.5, mu in 0.0f64..0.8, nu in 0.0f64..0.8) {
        let s = SumIntegralSpec::from_real(&[a], &[a + lift]);
        let one = theorem51_integral(&s.clone().with_mu_nu(mu, nu)).unwrap().value;
        let two = theorem51_integral(&s.with_mu_nu(nu, mu)).unwrap().value;
        prop_assert!((one - two).norm() < 1e-9 * one.norm().max(1.0), "{} vs {}", one, two);
    }

    #[test]
    fn parallel_and_sequential_suites_agree(seed in 0u64..1000) {
        let par = random_suite(Identity::Lemma21, 8, seed, 1e-10);
        let seq = random_suite_sequential(Identity::Lemma21, 8, seed, 1e-10);
        prop_assert_eq!(format!("{:?}", par), format!("{:?}", seq));
    }
}
