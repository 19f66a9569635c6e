//! The first integral `cos²x · (2ẋ − 1)/(1 − ẋ)² = c` and what it says about
//! the shape of orbits.

use crate::closed_form::is_singular_position;
use crate::consts::RADICAND_CLAMP;
use crate::error::{Error, Result};

/// Velocity bounds (and amplitude, for closed orbits) of one energy level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLevel {
    pub c: f64,
    /// Position amplitude `α` with `cos α = √(−c)`; only for `c ∈ (−1, 0)`.
    pub alpha: Option<f64>,
    pub xdot_lo: f64,
    pub xdot_hi: f64,
}

/// Energy of the state `(x, v)`.
pub fn energy_value(x: f64, v: f64) -> Result<f64> {
    if v == 1.0 {
        return Err(Error::SingularVelocity);
    }
    let cos_x = x.cos();
    let gap = 1.0 - v;
    Ok(cos_x * cos_x * (2.0 * v - 1.0) / (gap * gap))
}

/// Polynomial form `cos²x (2v − 1) − c (1 − v)²` of the energy equation.
///
/// Finite everywhere and zero at the crossings `(odd·π/2, 1)` of every level.
pub fn energy_residual(x: f64, v: f64, c: f64) -> f64 {
    let cos_x = x.cos();
    let gap = 1.0 - v;
    cos_x * cos_x * (2.0 * v - 1.0) - c * gap * gap
}

/// Velocities compatible with level `c` at position `x`, ascending.
///
/// For `c < 0` this is empty outside the amplitude and a single `0` at the
/// turning points; for `c > 0` it is the lower branch below 1 and the upper
/// branch above 1.
pub fn xdot_branches(x: f64, c: f64) -> Result<Vec<f64>> {
    if is_singular_position(x) {
        return Err(Error::SingularPosition { a: x });
    }
    let sec = 1.0 / x.cos();
    let mut radicand = 1.0 + c * sec * sec;
    if radicand.abs() <= RADICAND_CLAMP {
        radicand = 0.0;
    }
    if radicand < 0.0 {
        return Ok(Vec::new());
    }
    let root = radicand.sqrt();
    let values = if c > 0.0 {
        vec![root / (root + 1.0), root / (root - 1.0)]
    } else if c == 0.0 {
        vec![0.5]
    } else if root == 0.0 {
        vec![0.0]
    } else {
        vec![-root / (1.0 - root), root / (1.0 + root)]
    };
    Ok(values)
}

/// Bounds of the velocity (and position, for closed orbits) on level `c`.
pub fn level_bounds(c: f64) -> Result<EnergyLevel> {
    if !c.is_finite() || c <= -1.0 || c == 0.0 {
        return Err(Error::InvalidLevel(c));
    }
    let root = (1.0 + c).sqrt();
    if c < 0.0 {
        Ok(EnergyLevel {
            c,
            alpha: Some((-c).sqrt().acos()),
            xdot_lo: -root / (1.0 - root),
            xdot_hi: root / (1.0 + root),
        })
    } else {
        Ok(EnergyLevel {
            c,
            alpha: None,
            xdot_lo: root / (root + 1.0),
            xdot_hi: root / (root - 1.0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    use proptest::prelude::*;

    #[test]
    fn energy_value_examples() {
        assert_eq!(energy_value(0.0, 0.0).unwrap(), -1.0);
        assert_eq!(energy_value(0.0, 0.75).unwrap(), 8.0);
        assert!((energy_value(FRAC_PI_3, 0.25).unwrap() + 2.0 / 9.0).abs() < 1e-15);
        assert!(matches!(energy_value(0.3, 1.0), Err(Error::SingularVelocity)));
    }

    #[test]
    fn residual_examples() {
        assert!(energy_residual(FRAC_PI_2, 1.0, 8.0).abs() < 1e-30);
        assert_eq!(energy_residual(0.0, 0.75, 8.0), 0.0);
        assert_eq!(energy_residual(0.0, 0.0, -1.0), 0.0);
    }

    #[test]
    fn branch_examples() {
        assert_eq!(xdot_branches(0.0, 8.0).unwrap(), vec![0.75, 1.5]);
        let v = xdot_branches(0.0, -8.0 / 9.0).unwrap();
        assert_eq!(v.len(), 2);
        assert!((v[0] + 0.5).abs() < 1e-15 && (v[1] - 0.25).abs() < 1e-15);

        let alpha = (2.0 * 2f64.sqrt() / 3.0).acos();
        assert_eq!(xdot_branches(alpha, -8.0 / 9.0).unwrap(), vec![0.0]);
        assert!(xdot_branches(alpha + 0.01, -8.0 / 9.0).unwrap().is_empty());
        assert!(matches!(xdot_branches(FRAC_PI_2, 8.0), Err(Error::SingularPosition { .. })));
    }

    #[test]
    fn level_examples() {
        let l = level_bounds(8.0).unwrap();
        assert_eq!((l.xdot_lo, l.xdot_hi, l.alpha), (0.75, 1.5, None));

        let l = level_bounds(-8.0 / 9.0).unwrap();
        assert!((l.xdot_lo + 0.5).abs() < 1e-15);
        assert!((l.xdot_hi - 0.25).abs() < 1e-15);
        assert!((l.alpha.unwrap() - 0.339_836_909_454_121_9).abs() < 1e-15);

        let l = level_bounds(-45.0 / 49.0).unwrap();
        assert!((l.xdot_lo + 0.4).abs() < 1e-15);
        assert!((l.xdot_hi - 2.0 / 9.0).abs() < 1e-15);
        assert!((l.alpha.unwrap() - (3.0 * 5f64.sqrt() / 7.0).acos()).abs() < 1e-15);

        for c in [-1.0, -2.0, 0.0, f64::NAN] {
            assert!(matches!(level_bounds(c), Err(Error::InvalidLevel(_))));
        }
    }

    proptest! {
        #[test]
        fn harmonic_mean_of_strip_is_one(c in 1e-6f64..1e6) {
            let l = level_bounds(c).unwrap();
            let hm = 2.0 * l.xdot_lo * l.xdot_hi;
            prop_assert!((hm - (l.xdot_lo + l.xdot_hi)).abs() <= 8.0 * f64::EPSILON * hm);
        }

        #[test]
        fn branches_lie_on_their_level(x in -1.5f64..1.5, c in -0.999f64..50.0) {
            for v in xdot_branches(x, c).unwrap() {
                let scale = 1.0 + c.abs() * (1.0 - v).powi(2);
                prop_assert!(energy_residual(x, v, c).abs() <= 1e-12 * scale);
            }
        }
    }
}
