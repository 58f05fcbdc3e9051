use proptest::prelude::*;

use rfseries::arith::{self, build_sieve, divisors, gcd};
use rfseries::catalog;
use rfseries::dirichlet2::{convolve2, delta2, f_star_mu, gcd_lift, mobius2, ArithFn1};
use rfseries::engine::TruncationParams;
use rfseries::ramanujan::{csum, csum_exponential, csum_row, eps};
use rfseries::Rational;

fn sigma1(n: u64) -> i64 {
    arith::sigma_s_int(n, 1).unwrap() as i64
}

fn coprime_pair() -> impl Strategy<Value = (u64, u64)> {
    (1u64..=300, 1u64..=300).prop_filter("coprime", |&(a, b)| gcd(a, b) == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn divisor_form_equals_exponential_form(q in 1u64..=600, n in 1u64..=2000) {
        prop_assert_eq!(csum(q, n).unwrap(), csum_exponential(q, n).unwrap());
    }

    #[test]
    fn hardy_multiplicativity((q1, q2) in coprime_pair(), n in 1u64..=5000) {
        prop_assert_eq!(
            csum(q1 * q2, n).unwrap(),
            csum(q1, n).unwrap() * csum(q2, n).unwrap()
        );
    }

    #[test]
    fn divisor_sum_is_eps(k in 1u64..=3000, n in 1u64..=3000) {
        let total: i64 = divisors(k).unwrap().iter().map(|&q| csum(q, n).unwrap()).sum();
        prop_assert_eq!(total, eps(k, n).unwrap() as i64);
    }

    #[test]
    fn delange_bound(k in 1u64..=3000, n in 1u64..=3000) {
        let total: i64 = divisors(k).unwrap().iter().map(|&q| csum(q, n).unwrap().abs()).sum();
        let bound = n as i64 * (1i64 << arith::omega(k).unwrap());
        prop_assert!(total <= bound);
    }

    #[test]
    fn csum_bounded_by_gcd_divisor_sum(q in 1u64..=5000, n in 1u64..=5000) {
        prop_assert!(csum(q, n).unwrap().abs() <= sigma1(gcd(q, n)));
    }

    #[test]
    fn rows_match_pointwise_values(n in 1u64..=500, qmax in 1u64..=400) {
        let row = csum_row(qmax, n).unwrap();
        for q in (1..=qmax).step_by(7) {
            prop_assert_eq!(row.get(q), csum(q, n).unwrap());
        }
    }

    #[test]
    fn sieve_agrees_with_pointwise_functions(n in 1u64..=20_000) {
        let tables = build_sieve(20_000).unwrap();
        prop_assert_eq!(tables.mobius(n), arith::mobius(n).unwrap());
        prop_assert_eq!(tables.euler_phi(n), arith::euler_phi(n).unwrap());
        prop_assert_eq!(tables.factorize(n), arith::factorize(n).unwrap());
        if n > 1 {
            let spf = arith::factorize(n).unwrap().factors()[0].0;
            prop_assert_eq!(tables.smallest_prime_factor(n), spf);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn mobius_inversion_round_trip(seed in any::<u64>(), n1 in 1u64..=60, n2 in 1u64..=60) {
        // An arbitrary integer-valued f, fixed by the seed.
        let f = move |a: u64, b: u64| {
            let h = (a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F))
                .wrapping_add(seed);
            Rational::from_integer((h % 17) as i128 - 8)
        };
        let g = |a: u64, b: u64| f_star_mu::<Rational, _>(f, a, b).unwrap();
        let one = |_: u64, _: u64| Rational::from_integer(1);
        prop_assert_eq!(convolve2(g, one, n1, n2).unwrap(), f(n1, n2));
    }

    #[test]
    fn mobius_is_inverse_of_one(n1 in 1u64..=500, n2 in 1u64..=500) {
        let v: f64 = convolve2(|a, b| mobius2(a, b).unwrap() as f64, |_, _| 1.0, n1, n2).unwrap();
        prop_assert_eq!(v, delta2::<f64>(n1, n2));
    }

    #[test]
    fn multiplicative_reconstruction_is_exact(n1 in 1u64..=2000, n2 in 1u64..=2000) {
        for f in [
            catalog::phi_product_exact(),
            catalog::custom_32_exact(),
            catalog::tau_gcd_exact(),
            catalog::delta_gcd_exact(),
            catalog::r_gcd_exact(),
        ] {
            prop_assert_eq!(f.mult2_eval(n1, n2).unwrap(), f.eval(n1, n2), "{}", f.description());
        }
    }

    #[test]
    fn gcd_lift_evaluates_on_the_gcd(n1 in 1u64..=3000, n2 in 1u64..=3000) {
        let g = ArithFn1::multiplicative(
            "phi",
            |n| Rational::from_integer(arith::euler_phi(n).unwrap() as i128),
            |p, e| {
                let p = p as i128;
                let now = if e == 0 { 1 } else { (p - 1) * p.pow(e - 1) };
                let before = match e {
                    1 => 1,
                    e => (p - 1) * p.pow(e - 2),
                };
                Rational::from_integer(now - before)
            },
        );
        let lifted = gcd_lift(&g).unwrap();
        let expected = Rational::from_integer(arith::euler_phi(gcd(n1, n2)).unwrap() as i128);
        prop_assert_eq!(lifted.mult2_eval(n1, n2).unwrap(), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closed_form_ratio_is_multiplicative(
        family in 0usize..7,
        (a1, a2) in (1u64..=300, 1u64..=300),
        (b1, b2) in (1u64..=300, 1u64..=300),
    ) {
        // (a1, a2) and (b1, b2) are coprime-support parts of (a1 b1, a2 b2)
        // when every prime of a1 a2 avoids b1 b2.
        prop_assume!(gcd(a1 * a2, b1 * b2) == 1);
        let params = TruncationParams { prime_cutoff: 1000, ..TruncationParams::default() };
        let fam = catalog::family(catalog::TWO_VARIABLE[family], None, &params).unwrap();
        let f = fam.as_two().unwrap();
        let whole = f.ratio(a1 * b1, a2 * b2).unwrap();
        let split = f.ratio(a1, a2).unwrap() * f.ratio(b1, b2).unwrap();
        prop_assert!((whole - split).abs() <= 1e-13 * whole.abs(), "{whole} vs {split}");
    }
}
