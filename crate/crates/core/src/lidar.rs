//! Planar LiDAR scan representation.

use crate::num::Real;

/// A single planar range scan: `distances[i]` is the range measured at
/// relative bearing `-fov/2 + i * fov / n_beams`, clamped to `max_range`.
#[derive(Debug, Clone, PartialEq)]
pub struct LidarScan<T = f64> {
    pub distances: Vec<T>,
    pub fov: T,
    pub max_range: T,
}

impl<T: Real> LidarScan<T> {
    pub fn new(distances: Vec<T>, fov: T, max_range: T) -> Self {
        Self {
            distances,
            fov,
            max_range,
        }
    }

    pub fn n_beams(&self) -> usize {
        self.distances.len()
    }

    /// Bearing of beam `i` relative to the sensor heading.
    pub fn relative_bearing(&self, i: usize) -> T {
        let n = T::from_usize(self.n_beams()).unwrap();
        -self.fov * T::half() + T::from_usize(i).unwrap() * self.fov / n
    }

    /// Iterator over `(relative_bearing, distance)` pairs.
    pub fn beams(&self) -> impl Iterator<Item = (T, T)> + '_ {
        (0..self.n_beams()).map(move |i| (self.relative_bearing(i), self.distances[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bearing_formula() {
        let scan = LidarScan::new(vec![1.0f64; 1080], 4.7, 30.0);
        assert!((scan.relative_bearing(0) + 2.35).abs() < 1e-12);
        assert!((scan.relative_bearing(540) - 0.0).abs() < 1e-12);
        // The last beam sits one increment short of +fov/2.
        assert!((scan.relative_bearing(1079) - (2.35 - 4.7 / 1080.0)).abs() < 1e-12);
    }
}
