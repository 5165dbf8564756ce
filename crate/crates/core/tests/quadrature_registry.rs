//! Every registered closed form against quadrature of its defining integral.

use uplink_noma::oracle::{quad_verify, FORMULAS};
use uplink_noma::Scenario;

#[test]
fn operating_point_sweep() {
    let mut worst = 0.0f64;
    for rho_db in [0.0, 10.0, 20.0, 30.0, 40.0] {
        let s = Scenario::from_db(0.1, 0.9, 10.0, rho_db).unwrap();
        for id in FORMULAS {
            let c = quad_verify(&s, id).unwrap();
            println!("{rho_db:>4} dB {id:<22} closed {:.15e} quad {:.15e} rel {:.2e}", c.closed, c.integral, c.rel_err);
            assert!(c.rel_err <= 1e-6, "{id} at {rho_db} dB: {c:?}");
            worst = worst.max(c.rel_err);
        }
    }
    println!("worst relative error {worst:.2e}");
}

#[test]
fn random_scenarios() {
    // fixed pseudo-random grid: P1 in (0, 0.5], gamma 0..20 dB, rho 0..40 dB
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..20 {
        let p1 = 0.02 + 0.48 * next();
        let s = Scenario::from_db(p1, 1.0 - p1, 20.0 * next(), 40.0 * next()).unwrap();
        for id in FORMULAS {
            let c = quad_verify(&s, id).unwrap();
            assert!(c.rel_err <= 1e-6, "{id} at {s:?}: {c:?}");
        }
    }
}

#[test]
fn single_exponential_pair_is_exact() {
    let s = Scenario::from_db(0.1, 0.9, 10.0, 20.0).unwrap();
    assert!(quad_verify(&s, "phi_oma_weak").unwrap().rel_err <= 1e-12);
}
