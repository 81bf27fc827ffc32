//! PEN personality factors and the interpersonal distances they imply.
//!
//! Distances stay in centimeters here; the navigation layer converts to
//! meters exactly once.

use crate::personality::TraitVector;
use serde::{Deserialize, Serialize};

/// 3x6 linear map from the six traits to (psychoticism, extraversion,
/// neuroticism).
#[rustfmt::skip]
pub const PEN_MAT_ROWS: [[f64; 6]; 3] = [
    [ 0.22, 0.28, -0.09, -0.01, -0.17,  0.31],
    [ 0.16, 0.33,  0.07,  0.53,  0.05,  0.10],
    [-0.15, 0.16,  0.47, -0.01,  0.42, -0.08],
];

/// Personal-distance endpoints (cm): extrovert and introvert.
pub const PERSONAL_EXTROVERT_CM: f64 = 179.58;
pub const PERSONAL_INTROVERT_CM: f64 = 88.9;
/// Social-distance choices (cm): below / at-or-above the 0.5 threshold.
pub const SOCIAL_INTROVERT_CM: f64 = 233.17;
pub const SOCIAL_EXTROVERT_CM: f64 = 267.97;

/// Eysenck three-factor personality values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenVector {
    pub psychoticism: f64,
    pub extraversion: f64,
    pub neuroticism: f64,
}

impl PenVector {
    pub fn norm(&self) -> f64 {
        (self.psychoticism * self.psychoticism
            + self.extraversion * self.extraversion
            + self.neuroticism * self.neuroticism)
            .sqrt()
    }
}

/// Per-pedestrian proxemic distances in centimeters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxemicProfile {
    /// Personal distance: closer than this causes discomfort (cm).
    pub d_p_cm: f64,
    /// Social distance: conversational radius (cm).
    pub d_s_cm: f64,
}

impl ProxemicProfile {
    pub fn d_p_m(&self) -> f64 {
        self.d_p_cm / 100.0
    }

    pub fn d_s_m(&self) -> f64 {
        self.d_s_cm / 100.0
    }
}

/// PEN factors for a trait vector (matrix-vector product).
pub fn pen_from_traits(b: &TraitVector) -> PenVector {
    let mut out = [0.0; 3];
    for (r, row) in PEN_MAT_ROWS.iter().enumerate() {
        out[r] = row.iter().zip(&b.b).map(|(m, t)| m * t).sum();
    }
    PenVector {
        psychoticism: out[0],
        extraversion: out[1],
        neuroticism: out[2],
    }
}

/// Extraversion normalized by the PEN magnitude, clamped into [0, 1].
/// A vanishing PEN vector maps to the neutral 0.5.
pub fn normalized_extraversion(pen: &PenVector) -> f64 {
    let n = pen.norm();
    if n < 1e-9 {
        return 0.5;
    }
    (pen.extraversion / n).clamp(0.0, 1.0)
}

/// Personal distance in cm, linear between the introvert and extrovert
/// endpoints.
pub fn personal_distance(pen_e_norm: f64) -> f64 {
    PERSONAL_EXTROVERT_CM * pen_e_norm + PERSONAL_INTROVERT_CM * (1.0 - pen_e_norm)
}

/// Social distance in cm: introvert value below 0.5, extrovert at or above.
pub fn social_distance(pen_e_norm: f64) -> f64 {
    if pen_e_norm < 0.5 {
        SOCIAL_INTROVERT_CM
    } else {
        SOCIAL_EXTROVERT_CM
    }
}

/// Full proxemic profile for a trait vector.
pub fn profile_from_traits(b: &TraitVector) -> ProxemicProfile {
    let e = normalized_extraversion(&pen_from_traits(b));
    ProxemicProfile {
        d_p_cm: personal_distance(e),
        d_s_cm: social_distance(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_traits_zero_pen() {
        let pen = pen_from_traits(&TraitVector::new([0.0; 6]));
        assert_eq!(pen.psychoticism, 0.0);
        assert_eq!(pen.extraversion, 0.0);
        assert_eq!(pen.neuroticism, 0.0);
    }

    #[test]
    fn basis_traits_reproduce_pen_columns() {
        for c in 0..6 {
            let mut b = [0.0; 6];
            b[c] = 1.0;
            let pen = pen_from_traits(&TraitVector::new(b));
            assert!((pen.psychoticism - PEN_MAT_ROWS[0][c]).abs() < 1e-12);
            assert!((pen.extraversion - PEN_MAT_ROWS[1][c]).abs() < 1e-12);
            assert!((pen.neuroticism - PEN_MAT_ROWS[2][c]).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_aggressive_column() {
        let pen = pen_from_traits(&TraitVector::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        assert!((pen.psychoticism - 0.22).abs() < 1e-12);
        assert!((pen.extraversion - 0.16).abs() < 1e-12);
        assert!((pen.neuroticism - (-0.15)).abs() < 1e-12);
    }

    #[test]
    fn all_ones_traits_row_sums() {
        let pen = pen_from_traits(&TraitVector::new([1.0; 6]));
        assert!((pen.psychoticism - 0.54).abs() < 1e-12);
        assert!((pen.extraversion - 1.24).abs() < 1e-12);
        assert!((pen.neuroticism - 0.81).abs() < 1e-12);
    }

    #[test]
    fn pen_is_linear() {
        let u = [0.1, -0.4, 0.3, 0.9, -0.2, 0.5];
        let v = [-0.7, 0.2, 0.8, -0.3, 0.6, -0.1];
        let (a, b) = (2.5, -0.75);
        let mut comb = [0.0; 6];
        for i in 0..6 {
            comb[i] = a * u[i] + b * v[i];
        }
        let pu = pen_from_traits(&TraitVector::new(u));
        let pv = pen_from_traits(&TraitVector::new(v));
        let pc = pen_from_traits(&TraitVector::new(comb));
        assert!((pc.psychoticism - (a * pu.psychoticism + b * pv.psychoticism)).abs() < 1e-12);
        assert!((pc.extraversion - (a * pu.extraversion + b * pv.extraversion)).abs() < 1e-12);
        assert!((pc.neuroticism - (a * pu.neuroticism + b * pv.neuroticism)).abs() < 1e-12);
    }

    #[test]
    fn normalized_extraversion_cases() {
        let pure = PenVector {
            psychoticism: 0.0,
            extraversion: 1.0,
            neuroticism: 0.0,
        };
        assert_eq!(normalized_extraversion(&pure), 1.0);
        let zero = PenVector {
            psychoticism: 0.0,
            extraversion: 0.0,
            neuroticism: 0.0,
        };
        assert_eq!(normalized_extraversion(&zero), 0.5);
        let ones = PenVector {
            psychoticism: 1.0,
            extraversion: 1.0,
            neuroticism: 1.0,
        };
        let e = normalized_extraversion(&ones);
        assert!((e - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        let negative = PenVector {
            psychoticism: 1.0,
            extraversion: -1.0,
            neuroticism: 0.0,
        };
        assert_eq!(normalized_extraversion(&negative), 0.0);
    }

    #[test]
    fn personal_distance_endpoints_and_midpoint() {
        assert_eq!(personal_distance(1.0), 179.58);
        assert_eq!(personal_distance(0.0), 88.9);
        assert!((personal_distance(0.5) - 134.24).abs() < 1e-12);
    }

    #[test]
    fn personal_distance_monotone() {
        let mut prev = personal_distance(0.0);
        for i in 1..=100 {
            let d = personal_distance(i as f64 / 100.0);
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn social_distance_threshold() {
        assert_eq!(social_distance(0.4), 233.17);
        assert_eq!(social_distance(0.6), 267.97);
        assert_eq!(social_distance(0.5), 267.97);
    }

    #[test]
    fn personal_always_below_social() {
        for i in 0..=100 {
            let e = i as f64 / 100.0;
            assert!(personal_distance(e) < social_distance(e));
        }
    }
}
