//! Planar geometry primitives shared across the pipeline.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::num::Real;

/// A 2D point (or vector) in metres.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T = f64> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product `self × other`.
    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> T {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn dist(self, other: Self) -> T {
        (self - other).norm()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() {
            Some(Self::new(self.x / n, self.y / n))
        } else {
            None
        }
    }

    /// Rotation by +90° (counter-clockwise): `(x, y) -> (-y, x)`.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn rotate(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Polar angle `atan2(y, x)`.
    pub fn bearing(self) -> T {
        self.y.atan2(self.x)
    }

    pub fn scale(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k)
    }

    /// Linear interpolation `self + t * (other - self)`.
    pub fn lerp(self, other: Self, t: T) -> Self {
        self + (other - self).scale(t)
    }
}

impl<T: Real> Add for Point2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> AddAssign for Point2<T> {
    fn add_assign(&mut self, rhs: Self) {
        self.x = self.x + rhs.x;
        self.y = self.y + rhs.y;
    }
}

impl<T: Real> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> Neg for Point2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<T: Real> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        self.scale(rhs)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle<T: Real>(a: T) -> T {
    let two_pi = T::two_pi();
    let mut a = a % two_pi;
    if a > T::pi() {
        a = a - two_pi;
    } else if a <= -T::pi() {
        a = a + two_pi;
    }
    a
}

/// A planar pose: position plus heading in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose<T = f64> {
    pub x: T,
    pub y: T,
    pub heading: T,
}

impl<T: Real> Pose<T> {
    pub fn new(x: T, y: T, heading: T) -> Self {
        Self {
            x,
            y,
            heading: normalize_angle(heading),
        }
    }

    pub fn position(self) -> Point2<T> {
        Point2::new(self.x, self.y)
    }

    /// Unit vector along the heading.
    pub fn direction(self) -> Point2<T> {
        Point2::new(self.heading.cos(), self.heading.sin())
    }

    /// Maps a point given in this pose's body frame into the world frame.
    pub fn body_to_world(self, p: Point2<T>) -> Point2<T> {
        self.position() + p.rotate(self.heading)
    }

    /// Maps a world-frame point into this pose's body frame.
    pub fn world_to_body(self, p: Point2<T>) -> Point2<T> {
        (p - self.position()).rotate(-self.heading)
    }
}

/// Cumulative arc length along a polyline, starting at zero.
pub fn cumulative_arc_lengths<T: Real>(points: &[Point2<T>]) -> Vec<T> {
    let mut s = Vec::with_capacity(points.len());
    let mut acc = T::zero();
    s.push(acc);
    for w in points.windows(2) {
        acc = acc + w[0].dist(w[1]);
        s.push(acc);
    }
    s
}

/// Total arc length of a polyline.
pub fn polyline_length<T: Real>(points: &[Point2<T>]) -> T {
    points
        .windows(2)
        .fold(T::zero(), |acc, w| acc + w[0].dist(w[1]))
}

/// True when segments `a0-a1` and `b0-b1` properly intersect (shared
/// endpoints count as an intersection).
pub fn segments_intersect<T: Real>(
    a0: Point2<T>,
    a1: Point2<T>,
    b0: Point2<T>,
    b1: Point2<T>,
) -> bool {
    let d1 = (b1 - b0).cross(a0 - b0);
    let d2 = (b1 - b0).cross(a1 - b0);
    let d3 = (a1 - a0).cross(b0 - a0);
    let d4 = (a1 - a0).cross(b1 - a0);
    if ((d1 > T::zero() && d2 < T::zero()) || (d1 < T::zero() && d2 > T::zero()))
        && ((d3 > T::zero() && d4 < T::zero()) || (d3 < T::zero() && d4 > T::zero()))
    {
        return true;
    }
    let on = |d: T, p: Point2<T>, q0: Point2<T>, q1: Point2<T>| {
        d == T::zero()
            && p.x >= q0.x.min(q1.x)
            && p.x <= q0.x.max(q1.x)
            && p.y >= q0.y.min(q1.y)
            && p.y <= q0.y.max(q1.y)
    };
    on(d1, a0, b0, b1) || on(d2, a1, b0, b1) || on(d3, b0, a0, a1) || on(d4, b1, a0, a1)
}

/// Signed curvature of the circumcircle through three points.
pub fn discrete_curvature<T: Real>(a: Point2<T>, b: Point2<T>, c: Point2<T>) -> T {
    let ab = b - a;
    let bc = c - b;
    let ac = c - a;
    let denom = ab.norm() * bc.norm() * ac.norm();
    if denom == T::zero() {
        return T::zero();
    }
    T::two() * ab.cross(bc) / denom
}

/// Distance from point `p` to the segment `a-b`.
pub fn point_segment_distance<T: Real>(p: Point2<T>, a: Point2<T>, b: Point2<T>) -> T {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == T::zero() {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).max(T::zero()).min(T::one());
    p.dist(a + ab.scale(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_normalisation_wraps_into_half_open_interval() {
        assert!((normalize_angle(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert!((normalize_angle(-std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert!((normalize_angle(0.5f64) - 0.5).abs() < 1e-15);
        assert!((normalize_angle(7.0f64) - (7.0 - std::f64::consts::TAU)).abs() < 1e-12);
    }

    #[test]
    fn body_world_round_trip() {
        let pose = Pose::new(1.0, -2.0, 0.7);
        let p = Point2::new(3.0, 4.0);
        let q = pose.world_to_body(pose.body_to_world(p));
        assert!(p.dist(q) < 1e-12);
    }

    #[test]
    fn segment_intersection_cases() {
        let o = Point2::new(0.0, 0.0);
        assert!(segments_intersect(
            o,
            Point2::new(2.0, 2.0),
            Point2::new(0.0, 2.0),
            Point2::new(2.0, 0.0)
        ));
        assert!(!segments_intersect(
            o,
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0)
        ));
    }

    #[test]
    fn generic_over_f32() {
        let p: Point2<f32> = Point2::new(3.0, 4.0);
        assert!((p.norm() - 5.0).abs() < 1e-6);
    }
}
