use proptest::prelude::*;
use symradio::modem::{
    build_constellation, gamma_from_impedance, gamma_from_symbol, impedance_from_gamma, Impedance,
    ReflectionCoefficient, ReflectionMode,
};
use symradio::{Error, Scheme, C64};

proptest! {
    #[test]
    fn impedance_round_trip(r in 0.0f64..0.999, phase in 0.0f64..std::f64::consts::TAU, ra in 0.5f64..200.0, xa in -100.0f64..100.0) {
        let z_a = Impedance::antenna(ra, xa).unwrap();
        let gamma = ReflectionCoefficient(C64::from_polar(r, phase));
        let z_l = impedance_from_gamma(gamma, z_a).unwrap();
        prop_assert!(!z_l.is_active());
        let back = gamma_from_impedance(z_l, z_a).unwrap();
        prop_assert!((back.value() - gamma.value()).norm() < 1e-10);
    }

    #[test]
    fn active_round_trip_uses_negative_resistance(r in 1.01f64..5.0, phase in 0.1f64..6.0) {
        let z_a = Impedance::antenna(50.0, 0.0).unwrap();
        let gamma = ReflectionCoefficient(C64::from_polar(r, phase));
        let z_l = impedance_from_gamma(gamma, z_a).unwrap();
        prop_assert!(z_l.is_active());
        let back = gamma_from_impedance(z_l, z_a).unwrap();
        prop_assert!((back.value() - gamma.value()).norm() < 1e-9 * r);
    }

    #[test]
    fn passive_symbols_stay_inside_unit_disk(alpha in 0.0f64..=1.0, idx in 0usize..16) {
        let a = build_constellation(Scheme::Mqam(16)).unwrap();
        let c = a.point(idx) / a.max_amplitude();
        let g = gamma_from_symbol(c, alpha, ReflectionMode::Passive).unwrap();
        prop_assert!(g.is_passive());
    }
}

#[test]
fn passive_mode_rejects_gain() {
    let err = gamma_from_symbol(C64::new(1.0, 0.0), 1.5, ReflectionMode::Passive).unwrap_err();
    assert!(matches!(err, Error::PassiveBoundViolation { .. }));
    assert!(gamma_from_symbol(C64::new(1.0, 0.0), 1.5, ReflectionMode::Active).is_ok());
}
