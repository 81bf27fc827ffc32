//! Mapping between motion-model parameters and personality traits, and the
//! trait-derived parameter bounds used to keep predicted behavior stable.

use crate::rvo::MotionModel;
use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// 6x5 linear map from normalized motion parameters to the six traits
/// (aggressive, assertive, shy, active, tense, impulsive).
#[rustfmt::skip]
pub const RVO_MAT_ROWS: [[f64; 5]; 6] = [
    [-0.02,  0.32,  0.13, -0.41,  1.02],
    [ 0.03,  0.22,  0.11, -0.28,  1.05],
    [-0.04, -0.08,  0.02,  0.58, -0.88],
    [-0.06,  0.04,  0.04, -0.16,  1.07],
    [ 0.10,  0.07, -0.08,  0.19,  0.15],
    [ 0.03, -0.15,  0.03, -0.23,  0.23],
];

/// Normalization centers for the five parameters.
pub const PARAM_CENTERS: [f64; 5] = [15.0, 10.0, 30.0, 0.8, 1.4];
/// Normalization scales for the five parameters.
pub const PARAM_SCALES: [f64; 5] = [13.5, 49.5, 14.5, 0.85, 0.5];

fn rvo_mat() -> &'static SMatrix<f64, 6, 5> {
    static MAT: OnceLock<SMatrix<f64, 6, 5>> = OnceLock::new();
    MAT.get_or_init(|| {
        SMatrix::<f64, 6, 5>::from_fn(|r, c| RVO_MAT_ROWS[r][c])
    })
}

fn rvo_mat_pinv() -> &'static SMatrix<f64, 5, 6> {
    static PINV: OnceLock<SMatrix<f64, 5, 6>> = OnceLock::new();
    PINV.get_or_init(|| {
        rvo_mat()
            .pseudo_inverse(1e-12)
            .expect("trait matrix SVD failed")
    })
}

/// Dimensionless motion parameters: `(value - center) / scale` per component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedParams(pub [f64; 5]);

pub fn normalize(m: &MotionModel) -> NormalizedParams {
    let a = m.to_array();
    let mut out = [0.0; 5];
    for i in 0..5 {
        out[i] = (a[i] - PARAM_CENTERS[i]) / PARAM_SCALES[i];
    }
    NormalizedParams(out)
}

pub fn denormalize(n: &NormalizedParams) -> MotionModel {
    let mut a = [0.0; 5];
    for i in 0..5 {
        a[i] = n.0[i] * PARAM_SCALES[i] + PARAM_CENTERS[i];
    }
    MotionModel::from_array(a)
}

/// The six behavior classes, in matrix row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trait {
    Aggressive,
    Assertive,
    Shy,
    Active,
    Tense,
    Impulsive,
}

impl Trait {
    pub const ALL: [Trait; 6] = [
        Trait::Aggressive,
        Trait::Assertive,
        Trait::Shy,
        Trait::Active,
        Trait::Tense,
        Trait::Impulsive,
    ];

    pub fn index(self) -> usize {
        Trait::ALL.iter().position(|&t| t == self).unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            Trait::Aggressive => "aggressive",
            Trait::Assertive => "assertive",
            Trait::Shy => "shy",
            Trait::Active => "active",
            Trait::Tense => "tense",
            Trait::Impulsive => "impulsive",
        }
    }
}

/// Weighted behavior classification of one pedestrian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraitVector {
    /// Trait values (aggressive, assertive, shy, active, tense, impulsive).
    pub b: [f64; 6],
    /// Personality weights; all ones unless recomputed after clamping.
    pub w: [f64; 6],
}

impl TraitVector {
    pub fn new(b: [f64; 6]) -> Self {
        TraitVector { b, w: [1.0; 6] }
    }
}

/// Componentwise bounds on the motion parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds {
    pub lb: MotionModel,
    pub ub: MotionModel,
}

impl ParamBounds {
    /// Bounds wide enough to never clamp anything meaningful.
    pub fn unbounded() -> Self {
        ParamBounds {
            lb: MotionModel::from_array([1e-6; 5]),
            ub: MotionModel::from_array([1e9; 5]),
        }
    }
}

/// Trait values for a motion model, at unit weights.
pub fn traits_from_params(m: &MotionModel) -> TraitVector {
    let n = SVector::<f64, 5>::from_column_slice(&normalize(m).0);
    let b = rvo_mat() * n;
    TraitVector::new([b[0], b[1], b[2], b[3], b[4], b[5]])
}

/// Index of the largest trait value; ties go to the earlier trait.
pub fn dominant_trait(b: &TraitVector) -> Trait {
    let mut best = 0;
    for i in 1..6 {
        if b.b[i] > b.b[best] {
            best = i;
        }
    }
    Trait::ALL[best]
}

/// Parameter bounds spanned by perturbing the dominant trait by `y`% and the
/// rest by `y/3`%, mapped back to parameter space through the pseudo-inverse
/// of the trait matrix.
pub fn compute_bounds(b: &TraitVector, y: f64) -> ParamBounds {
    let dom = dominant_trait(b).index();
    let mut up = [0.0; 6];
    let mut dn = [0.0; 6];
    for i in 0..6 {
        let f = if i == dom { y / 100.0 } else { y / 300.0 };
        up[i] = b.b[i] * (1.0 + f);
        dn[i] = b.b[i] * (1.0 - f);
    }
    let to_params = |t: [f64; 6]| -> [f64; 5] {
        let v = SVector::<f64, 6>::from_column_slice(&t);
        let n = rvo_mat_pinv() * v;
        denormalize(&NormalizedParams([n[0], n[1], n[2], n[3], n[4]])).to_array()
    };
    let a = to_params(up);
    let c = to_params(dn);
    let mut lo = [0.0; 5];
    let mut hi = [0.0; 5];
    for i in 0..5 {
        lo[i] = a[i].min(c[i]);
        hi[i] = a[i].max(c[i]);
    }
    ParamBounds {
        lb: MotionModel::from_array(lo),
        ub: MotionModel::from_array(hi),
    }
}

/// Componentwise clamp of `m` into the bounds.
pub fn clamp_params(m: &MotionModel, bounds: &ParamBounds) -> MotionModel {
    let a = m.to_array();
    let lo = bounds.lb.to_array();
    let hi = bounds.ub.to_array();
    let mut out = [0.0; 5];
    for i in 0..5 {
        out[i] = a[i].clamp(lo[i], hi[i]);
    }
    MotionModel::from_array(out)
}

/// Weights that rescale unit-weight traits `b_unit` onto the desired trait
/// values; components where `b_unit` vanishes keep weight 1.
pub fn recompute_weights(desired: &[f64; 6], b_unit: &[f64; 6]) -> [f64; 6] {
    let mut w = [1.0; 6];
    for i in 0..6 {
        if b_unit[i].abs() >= 1e-9 {
            w[i] = desired[i] / b_unit[i];
        }
    }
    w
}
