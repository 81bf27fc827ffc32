//! Plain 2D vector math and segment geometry used across the crate.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A 2D point or vector in meters (or m/s when used as a velocity).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// 2D cross product (z-component of the 3D cross product).
    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn dist(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the same direction, or zero when the norm is negligible.
    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        if n > 1e-12 {
            Vec2::new(self.x / n, self.y / n)
        } else {
            Vec2::ZERO
        }
    }

    /// Counter-clockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn from_angle(theta: f64) -> Vec2 {
        Vec2::new(theta.cos(), theta.sin())
    }

    pub fn rotated(self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Scale down to `max` length if longer; direction preserved.
    pub fn clamped_norm(self, max: f64) -> Vec2 {
        let n = self.norm();
        if n > max && n > 0.0 {
            self * (max / n)
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Closest point on segment `[a, b]` to `p`.
pub fn closest_point_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq < 1e-24 {
        return a;
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    a + ab * t
}

pub fn dist_point_segment(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    p.dist(closest_point_on_segment(p, a, b))
}

/// Minimum distance between segments `[a1, b1]` and `[a2, b2]`.
pub fn dist_segment_segment(a1: Vec2, b1: Vec2, a2: Vec2, b2: Vec2) -> f64 {
    if segments_intersect(a1, b1, a2, b2) {
        return 0.0;
    }
    dist_point_segment(a1, a2, b2)
        .min(dist_point_segment(b1, a2, b2))
        .min(dist_point_segment(a2, a1, b1))
        .min(dist_point_segment(b2, a1, b1))
}

fn segments_intersect(a1: Vec2, b1: Vec2, a2: Vec2, b2: Vec2) -> bool {
    let d1 = (b1 - a1).cross(a2 - a1);
    let d2 = (b1 - a1).cross(b2 - a1);
    let d3 = (b2 - a2).cross(a1 - a2);
    let d4 = (b2 - a2).cross(b1 - a2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    // Collinear touching cases.
    (d1 == 0.0 && on_segment(a1, b1, a2))
        || (d2 == 0.0 && on_segment(a1, b1, b2))
        || (d3 == 0.0 && on_segment(a2, b2, a1))
        || (d4 == 0.0 && on_segment(a2, b2, b1))
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Minimum distance from a point moving as `p + t*v`, `t` in `[0, horizon]`,
/// to the segment `[a, b]`.
pub fn min_dist_moving_point_segment(p: Vec2, v: Vec2, horizon: f64, a: Vec2, b: Vec2) -> f64 {
    let end = p + v * horizon;
    dist_segment_segment(p, end, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_345() {
        let v = Vec2::new(3.0, 4.0);
        assert!((v.norm() - 5.0).abs() < 1e-12);
        let u = v.normalized();
        assert!((u.x - 0.6).abs() < 1e-12 && (u.y - 0.8).abs() < 1e-12);
    }

    #[test]
    fn zero_vector_normalizes_to_zero() {
        assert_eq!(Vec2::ZERO.normalized(), Vec2::ZERO);
    }

    #[test]
    fn point_segment_distance() {
        let a = Vec2::new(0.0, 0.0);
        let b = Vec2::new(2.0, 0.0);
        assert!((dist_point_segment(Vec2::new(1.0, 1.0), a, b) - 1.0).abs() < 1e-12);
        assert!((dist_point_segment(Vec2::new(3.0, 0.0), a, b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn segment_segment_crossing_is_zero() {
        let d = dist_segment_segment(
            Vec2::new(-1.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, -1.0),
            Vec2::new(0.0, 1.0),
        );
        assert_eq!(d, 0.0);
    }

    #[test]
    fn parallel_segments_distance() {
        let d = dist_segment_segment(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 0.5),
            Vec2::new(1.0, 0.5),
        );
        assert!((d - 0.5).abs() < 1e-12);
    }
}
