//! Randomised properties of the public API.

use proptest::prelude::*;
use uplink_noma::channel::{sample, Scenario};
use uplink_noma::cli::{parse_csv, to_csv, CsvRow, Engine, Metric};
use uplink_noma::full_csit::{activity_probability, decide_two_user, instantaneous_rates, rates, Mode};
use uplink_noma::no_csit::{phi_noma_strong, phi_noma_weak, phi_oma_strong, phi_oma_weak, select_no_csit, throughput};
use uplink_noma::special::{exp_integral_e1, scaled_e1};
use uplink_noma::Strategy as Access;

fn scenario() -> impl Strategy<Value = Scenario> {
    (0.01f64..0.5, 0.0f64..20.0, -10.0f64..60.0)
        .prop_map(|(p1, g, r)| Scenario::from_db(p1, 1.0 - p1, g, r).expect("valid by construction"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn probabilities_are_ordered(s in scenario()) {
        let (an, bn, ao, bo) = (phi_noma_weak(&s), phi_noma_strong(&s), phi_oma_weak(&s), phi_oma_strong(&s));
        for p in [an, bn, ao, bo] {
            prop_assert!((0.0..=1.0).contains(&p));
        }
        prop_assert!(an <= bn + 1e-15);
        prop_assert!(ao <= bo + 1e-15);
    }

    #[test]
    fn theorems_hold(s in scenario()) {
        let (n, o, a) = (rates(&s, Access::Noma), rates(&s, Access::Oma), rates(&s, Access::NomaA));
        prop_assert!(n.r_weak - a.r_weak >= -1e-9);
        prop_assert!(a.r_weak - o.r_weak >= -1e-9);
        prop_assert!(a.r_strong - n.r_strong >= -1e-9);
        for r in [n, o, a] {
            prop_assert!(r.r_weak >= 0.0 && r.r_strong >= 0.0);
            prop_assert_eq!(r.r_sum, r.r_weak + r.r_strong);
        }
    }

    #[test]
    fn selection_is_the_argmax(s in scenario()) {
        let chosen = throughput(&s, select_no_csit(&s)).t_sum;
        prop_assert!(chosen >= throughput(&s, Access::Noma).t_sum);
        prop_assert!(chosen >= throughput(&s, Access::Oma).t_sum);
        prop_assert_eq!(throughput(&s, Access::NomaA).t_sum, chosen);
        let a = activity_probability(&s, Access::NomaA);
        prop_assert!(a >= activity_probability(&s, Access::Noma));
        prop_assert!(a >= activity_probability(&s, Access::Oma));
    }

    #[test]
    fn decisions_are_consistent(s in scenario(), u in 0.0f64..5.0, v in 0.0f64..5.0) {
        let (xa, xb) = (u.min(v), u.max(v));
        let mode = decide_two_user(&s, xa, xb);
        let (ra, rb) = instantaneous_rates(&s, xa, xb, mode);
        let rho = s.rho();
        let min_rate = s.gamma().log2();
        match mode {
            Mode::NomaBoth => {
                prop_assert!(ra >= min_rate * (1.0 - 1e-12) && rb > 0.0);
                prop_assert!((ra + rb - (rho * (xa + xb)).ln_1p() / std::f64::consts::LN_2).abs() < 1e-9);
            }
            Mode::OmaBoth => prop_assert!(ra > 0.0 && rb >= ra),
            Mode::Idle => prop_assert!(ra == 0.0 && rb == 0.0),
            Mode::WeakOnlyFree => prop_assert!(ra > 0.0 && rb == 0.0),
            Mode::StrongOnlyFree | Mode::StrongOnlyFallback => prop_assert!(ra == 0.0 && rb > 0.0),
        }
    }

    #[test]
    fn e1_is_positive_and_decreasing(x in 1e-8f64..700.0, dx in 1e-6f64..1.0) {
        let (a, b) = (exp_integral_e1(x).unwrap(), exp_integral_e1(x + dx).unwrap());
        prop_assert!(a > 0.0 && b < a);
        // x e^x E1(x) lies in (x/(x+1), 1)
        let sx = scaled_e1(x).unwrap() * x;
        prop_assert!(sx < 1.0 && sx > x / (x + 1.0) * (1.0 - 1e-14));
    }

    #[test]
    fn csv_round_trips(values in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| !v.is_nan()), 0..4),
                       sum in any::<f64>().prop_filter("not NaN", |v| !v.is_nan()),
                       seed in any::<u64>()) {
        let row = CsvRow {
            powers: vec![0.1, 0.9],
            gamma: 10.0,
            gamma_db: 10.0,
            rho: 1.0 / 3.0,
            rho_db: -4.771212547196624,
            strategy: "noma".into(),
            metric: Metric::Rate,
            engine: Engine::MonteCarlo,
            values: values.clone(),
            sum,
            std_errors: values,
            sum_std_error: Some(sum.abs()),
            samples: Some(seed / 2),
            seed: Some(seed),
        };
        let back = parse_csv(&to_csv(std::slice::from_ref(&row))).unwrap();
        prop_assert_eq!(back, vec![row]);
    }
}

#[test]
fn sampler_matches_exponential_order_statistics() {
    let s = Scenario::from_db(0.1, 0.9, 10.0, 20.0).unwrap();
    let n = 400_000u64;
    let (mut sum_a, mut sum_b, mut above) = (0.0, 0.0, 0u64);
    let t = 0.05;
    for d in sample(&s.powers(), n, 3) {
        sum_a += d.weak();
        sum_b += d.strong();
        above += u64::from(d.weak() > t);
    }
    let nf = n as f64;
    let (l1, l2) = (s.lambda1(), s.lambda2());
    // min of exponentials is exponential with rate λ1+λ2; the max has mean 1/λ1 + 1/λ2 - 1/(λ1+λ2)
    let mean_a = 1.0 / (l1 + l2);
    let mean_b = 1.0 / l1 + 1.0 / l2 - mean_a;
    assert!((sum_a / nf - mean_a).abs() < 4.0 * mean_a / nf.sqrt());
    let sd_b = 1.0; // the max is dominated by the P2 = 0.9 exponential
    assert!((sum_b / nf - mean_b).abs() < 4.0 * sd_b / nf.sqrt());
    let p = (-(l1 + l2) * t).exp();
    assert!((above as f64 / nf - p).abs() < 4.0 * (p * (1.0 - p) / nf).sqrt());
}

#[test]
fn sampler_is_reproducible_and_chunk_aligned() {
    let a: Vec<_> = sample(&[0.2, 0.8], 70_000, 5).collect();
    let b: Vec<_> = sample(&[0.2, 0.8], 70_000, 5).collect();
    assert_eq!(a, b);
    assert!(a.iter().all(|d| d.weak() <= d.strong()));
    let c: Vec<_> = sample(&[0.2, 0.8], 70_000, 6).collect();
    assert_ne!(a, c);
}
