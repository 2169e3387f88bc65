//! Backscatter modulation: symbols to reflection coefficients to load
//! impedances, for passive and active (negative-resistance) loads.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::types::{Constellation, Scheme};
use crate::{Error, Result, C64};

/// Largest reflection magnitude accepted in active-load mode.
pub const ACTIVE_GAMMA_CAP: f64 = 10.0;

const UNIT_SLACK: f64 = 1e-12;

/// Builds a normalized alphabet (`max |c| = 1`) in its fixed point order.
///
/// QPSK is ordered `(1+j, 1-j, -1+j, -1-j)/√2`; square QAM enumerates the
/// in-phase level first, then quadrature, each Gray labelled.
pub fn build_constellation(scheme: Scheme) -> Result<Constellation> {
    let (points, labels, bits) = match scheme {
        Scheme::Bpsk => (vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)], vec![0, 1], 1),
        Scheme::Qpsk => {
            let a = FRAC_1_SQRT_2;
            (
                vec![
                    C64::new(a, a),
                    C64::new(a, -a),
                    C64::new(-a, a),
                    C64::new(-a, -a),
                ],
                vec![0b00, 0b01, 0b10, 0b11],
                2,
            )
        }
        Scheme::Mqam(m) => {
            let side = (m as f64).sqrt().round() as u32;
            if m < 4 || side * side != m || !side.is_multiple_of(2) {
                return Err(Error::UnsupportedScheme(format!(
                    "{m}-QAM (order must be an even-sided perfect square >= 4)"
                )));
            }
            let axis_bits = side.trailing_zeros();
            if 1 << axis_bits != side {
                return Err(Error::UnsupportedScheme(format!(
                    "{m}-QAM (side must be a power of two for Gray labelling)"
                )));
            }
            let scale = (side as f64 - 1.0) * std::f64::consts::SQRT_2;
            let level = |i: u32| (2.0 * i as f64 - (side as f64 - 1.0)) / scale;
            let gray = |i: u32| i ^ (i >> 1);
            let mut points = Vec::with_capacity(m as usize);
            let mut labels = Vec::with_capacity(m as usize);
            for i in 0..side {
                for q in 0..side {
                    points.push(C64::new(level(i), level(q)));
                    labels.push((gray(i) << axis_bits) | gray(q));
                }
            }
            (points, labels, 2 * axis_bits)
        }
    };
    Ok(Constellation {
        scheme,
        points,
        labels,
        bits_per_symbol: bits,
    })
}

/// Circuit impedance in ohms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Impedance {
    pub resistance: f64,
    pub reactance: f64,
}

impl Impedance {
    pub fn new(resistance: f64, reactance: f64) -> Self {
        Impedance {
            resistance,
            reactance,
        }
    }

    /// Antenna impedance; the radiation resistance must be positive.
    pub fn antenna(resistance: f64, reactance: f64) -> Result<Self> {
        if !(resistance > 0.0) {
            return Err(Error::invalid(
                "z_a",
                format!("antenna resistance must be > 0, got {resistance}"),
            ));
        }
        Ok(Impedance::new(resistance, reactance))
    }

    pub fn from_complex(z: C64) -> Self {
        Impedance::new(z.re, z.im)
    }

    pub fn to_complex(self) -> C64 {
        C64::new(self.resistance, self.reactance)
    }

    /// Negative resistance: the load injects power.
    pub fn is_active(self) -> bool {
        self.resistance < 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReflectionMode {
    #[default]
    Passive,
    /// Negative-resistance loads; `|Γ|` may exceed 1 up to [`ACTIVE_GAMMA_CAP`].
    Active,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionCoefficient(pub C64);

impl ReflectionCoefficient {
    pub fn value(self) -> C64 {
        self.0
    }

    pub fn magnitude(self) -> f64 {
        self.0.norm()
    }

    pub fn is_passive(self) -> bool {
        self.0.norm() <= 1.0 + UNIT_SLACK
    }
}

/// `Γ = α·c` for a point of a normalized alphabet.
pub fn gamma_from_symbol(
    c: C64,
    alpha: f64,
    mode: ReflectionMode,
) -> Result<ReflectionCoefficient> {
    if !(alpha >= 0.0) {
        return Err(Error::invalid(
            "alpha",
            format!("must be >= 0, got {alpha}"),
        ));
    }
    if c.norm() > 1.0 + UNIT_SLACK {
        return Err(Error::invalid(
            "c",
            format!("|c| = {} exceeds the normalized maximum of 1", c.norm()),
        ));
    }
    match mode {
        ReflectionMode::Passive if alpha > 1.0 => Err(Error::PassiveBoundViolation { alpha }),
        ReflectionMode::Active if alpha * c.norm() > ACTIVE_GAMMA_CAP => {
            Err(Error::ActiveCapExceeded {
                magnitude: alpha * c.norm(),
                cap: ACTIVE_GAMMA_CAP,
            })
        }
        _ => Ok(ReflectionCoefficient(c * alpha)),
    }
}

/// Load impedance realizing `gamma` against antenna `z_a`:
/// `Z_L = (Z_a* + Γ Z_a) / (1 − Γ)`.
pub fn impedance_from_gamma(gamma: ReflectionCoefficient, z_a: Impedance) -> Result<Impedance> {
    let g = gamma.value();
    let denom = C64::new(1.0, 0.0) - g;
    if denom.norm() <= f64::EPSILON {
        return Err(Error::SingularReflection);
    }
    let za = z_a.to_complex();
    Ok(Impedance::from_complex((za.conj() + g * za) / denom))
}

/// `Γ = (Z_L − Z_a*) / (Z_L + Z_a)`.
pub fn gamma_from_impedance(z_l: Impedance, z_a: Impedance) -> Result<ReflectionCoefficient> {
    let zl = z_l.to_complex();
    let za = z_a.to_complex();
    let denom = zl + za;
    if denom.norm() <= f64::EPSILON * za.norm().max(1.0) {
        return Err(Error::SingularCircuit);
    }
    Ok(ReflectionCoefficient((zl - za.conj()) / denom))
}

/// Closed-form `|Γ|²` of an active load `Z_L = −R_L + jX_L` (`R_L > 0`).
pub fn active_load_gain_sq(load_resistance: f64, load_reactance: f64, z_a: Impedance) -> f64 {
    let x = load_reactance + z_a.reactance;
    let num = (load_resistance + z_a.resistance).powi(2) + x * x;
    let den = (load_resistance - z_a.resistance).powi(2) + x * x;
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn bpsk_and_qpsk() {
        let b = build_constellation(Scheme::Bpsk).unwrap();
        assert_eq!(b.points(), &[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
        let q = build_constellation(Scheme::Qpsk).unwrap();
        let expected = [
            C64::new(1.0, 1.0) / SQRT_2,
            C64::new(1.0, -1.0) / SQRT_2,
            C64::new(-1.0, 1.0) / SQRT_2,
            C64::new(-1.0, -1.0) / SQRT_2,
        ];
        for (p, e) in q.points().iter().zip(expected) {
            assert!(close(*p, e, 1e-15));
            assert!((p.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn qam16_matches_explicit_grid() {
        let q = build_constellation(Scheme::Mqam(16)).unwrap();
        let scale = C64::new(3.0, 3.0).norm();
        let mut grid = Vec::new();
        for i in [-3.0, -1.0, 1.0, 3.0] {
            for j in [-3.0, -1.0, 1.0, 3.0] {
                grid.push(C64::new(i, j) / scale);
            }
        }
        assert_eq!(q.len(), 16);
        for g in &grid {
            assert!(q.points().iter().any(|p| close(*p, *g, 1e-15)));
        }
        assert!((q.max_amplitude() - 1.0).abs() < 1e-15);
        // corner 3+3j against nearest-axis point 1+1j
        let inner = C64::new(1.0, 1.0) / scale;
        assert!(((1.0 / inner.norm()) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn qam_gray_neighbours_differ_by_one_bit() {
        let q = build_constellation(Scheme::Mqam(16)).unwrap();
        let step = 2.0 / (3.0 * SQRT_2);
        for a in 0..q.len() {
            for b in 0..q.len() {
                if ((q.point(a) - q.point(b)).norm() - step).abs() < 1e-12 {
                    assert_eq!(q.bit_errors(a, b), 1);
                }
            }
        }
    }

    #[test]
    fn unsupported_qam_orders() {
        for m in [2, 8, 9, 32, 36] {
            assert!(matches!(
                build_constellation(Scheme::Mqam(m)),
                Err(Error::UnsupportedScheme(_))
            ));
        }
    }

    #[test]
    fn constellation_points_distinct() {
        for s in [
            Scheme::Bpsk,
            Scheme::Qpsk,
            Scheme::Mqam(4),
            Scheme::Mqam(64),
        ] {
            let c = build_constellation(s).unwrap();
            for i in 0..c.len() {
                for j in (i + 1)..c.len() {
                    assert!((c.point(i) - c.point(j)).norm() > 1e-9);
                }
            }
            assert!((c.max_amplitude() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gamma_from_symbol_examples() {
        let g = gamma_from_symbol(C64::new(1.0, 0.0), 1.0, ReflectionMode::Passive).unwrap();
        assert_eq!(g.value(), C64::new(1.0, 0.0));
        let g = gamma_from_symbol(C64::new(-1.0, 0.0), 0.5, ReflectionMode::Passive).unwrap();
        assert_eq!(g.value(), C64::new(-0.5, 0.0));
        let c = C64::new(1.0, 1.0) / SQRT_2;
        let g = gamma_from_symbol(c, 0.8, ReflectionMode::Passive).unwrap();
        assert!(close(g.value(), c * 0.8, 1e-15));
        assert!((g.magnitude() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn gamma_from_symbol_bounds() {
        let one = C64::new(1.0, 0.0);
        assert!(matches!(
            gamma_from_symbol(one, 1.2, ReflectionMode::Passive),
            Err(Error::PassiveBoundViolation { .. })
        ));
        assert!(gamma_from_symbol(one, 4.0, ReflectionMode::Active).is_ok());
        assert!(matches!(
            gamma_from_symbol(one, 10.5, ReflectionMode::Active),
            Err(Error::ActiveCapExceeded { .. })
        ));
        assert!(gamma_from_symbol(C64::new(2.0, 0.0), 0.5, ReflectionMode::Passive).is_err());
    }

    #[test]
    fn impedance_examples() {
        let za = Impedance::antenna(50.0, 0.0).unwrap();
        let zl = impedance_from_gamma(ReflectionCoefficient(C64::new(0.0, 0.0)), za).unwrap();
        assert!(close(zl.to_complex(), C64::new(50.0, 0.0), 1e-12));

        let zl = impedance_from_gamma(ReflectionCoefficient(C64::new(0.5, 0.0)), za).unwrap();
        assert!(close(zl.to_complex(), C64::new(150.0, 0.0), 1e-12));
        let back = gamma_from_impedance(zl, za).unwrap();
        assert!(close(back.value(), C64::new(0.5, 0.0), 1e-12));

        let zl = impedance_from_gamma(ReflectionCoefficient(C64::new(-4.0, 0.0)), za).unwrap();
        assert!(close(zl.to_complex(), C64::new(-30.0, 0.0), 1e-12));
        assert!(zl.is_active());
    }

    #[test]
    fn gamma_from_impedance_examples() {
        let za = Impedance::antenna(50.0, 0.0).unwrap();
        let g = gamma_from_impedance(Impedance::new(50.0, 0.0), za).unwrap();
        assert!(g.value().norm() < 1e-15);

        let g = gamma_from_impedance(Impedance::new(-30.0, 0.0), za).unwrap();
        assert!(close(g.value(), C64::new(-4.0, 0.0), 1e-12));
        assert!((g.value().norm_sqr() - 16.0).abs() < 1e-12);
        assert!((active_load_gain_sq(30.0, 0.0, za) - 16.0).abs() < 1e-12);

        let g = gamma_from_impedance(Impedance::new(0.0, 0.0), za).unwrap();
        assert!(close(g.value(), C64::new(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn singular_cases() {
        let za = Impedance::antenna(50.0, 10.0).unwrap();
        assert!(matches!(
            impedance_from_gamma(ReflectionCoefficient(C64::new(1.0, 0.0)), za),
            Err(Error::SingularReflection)
        ));
        assert!(matches!(
            gamma_from_impedance(Impedance::new(-50.0, -10.0), za),
            Err(Error::SingularCircuit)
        ));
        assert!(Impedance::antenna(0.0, 1.0).is_err());
    }
}
