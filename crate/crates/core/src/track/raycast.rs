//! Grid ray casting and LiDAR scan synthesis.

use super::{TrackError, TrackMap};
use crate::lidar::LidarScan;
use crate::num::Real;
use crate::geom::Pose;

/// Distance from `origin` along `bearing` to the first occupied cell, or
/// `max_range` when nothing is hit.
///
/// Uses cell-by-cell grid traversal, so thin walls cannot be tunnelled
/// through; the returned distance is exact to the occupied cell's boundary.
pub fn cast_ray<T: Real>(
    map: &TrackMap<T>,
    origin: Pose<T>,
    bearing: T,
    max_range: T,
) -> Result<T, TrackError> {
    let p = origin.position();
    if map.is_occupied_world(p) {
        return Err(TrackError::PoseInWall);
    }
    let dx = bearing.cos();
    let dy = bearing.sin();

    // Clip the ray against the grid's bounding box.
    let (lo, hi) = map.extents();
    let mut t_enter = T::zero();
    let mut t_exit = max_range;
    for (pos, dir, l, h) in [(p.x, dx, lo.x, hi.x), (p.y, dy, lo.y, hi.y)] {
        if dir == T::zero() {
            if pos < l || pos > h {
                return Ok(max_range); // travels outside the grid forever
            }
        } else {
            let t1 = (l - pos) / dir;
            let t2 = (h - pos) / dir;
            t_enter = t_enter.max(t1.min(t2));
            t_exit = t_exit.min(t1.max(t2));
        }
    }
    if t_enter > t_exit {
        return Ok(max_range);
    }

    let res = map.resolution;
    let start = Pose::new(p.x + dx * t_enter, p.y + dy * t_enter, T::zero()).position();
    let mut ix = ((start.x - lo.x) / res).floor().to_isize().unwrap_or(0);
    let mut iy = ((start.y - lo.y) / res).floor().to_isize().unwrap_or(0);
    ix = ix.clamp(0, map.grid_width() as isize - 1);
    iy = iy.clamp(0, map.grid_height() as isize - 1);

    // Entering the grid directly into a wall cell.
    if t_enter > T::zero() && map.is_occupied_cell(ix as usize, iy as usize) {
        return Ok(t_enter.min(max_range));
    }

    let step_x: isize = if dx > T::zero() { 1 } else { -1 };
    let step_y: isize = if dy > T::zero() { 1 } else { -1 };
    let t_delta_x = if dx == T::zero() {
        T::infinity()
    } else {
        res / dx.abs()
    };
    let t_delta_y = if dy == T::zero() {
        T::infinity()
    } else {
        res / dy.abs()
    };
    // Parameter value at which the ray crosses the next cell boundary.
    let cell_x = lo.x + T::from_isize(ix).unwrap() * res;
    let cell_y = lo.y + T::from_isize(iy).unwrap() * res;
    let mut t_max_x = if dx == T::zero() {
        T::infinity()
    } else if dx > T::zero() {
        t_enter + (cell_x + res - start.x) / dx
    } else {
        t_enter + (cell_x - start.x) / dx
    };
    let mut t_max_y = if dy == T::zero() {
        T::infinity()
    } else if dy > T::zero() {
        t_enter + (cell_y + res - start.y) / dy
    } else {
        t_enter + (cell_y - start.y) / dy
    };

    loop {
        let t;
        if t_max_x < t_max_y {
            t = t_max_x;
            t_max_x = t_max_x + t_delta_x;
            ix += step_x;
        } else {
            t = t_max_y;
            t_max_y = t_max_y + t_delta_y;
            iy += step_y;
        }
        if t > max_range {
            return Ok(max_range);
        }
        if ix < 0 || iy < 0 || ix as usize >= map.grid_width() || iy as usize >= map.grid_height() {
            return Ok(max_range); // left the grid; outside is free
        }
        if map.is_occupied_cell(ix as usize, iy as usize) {
            return Ok(t);
        }
    }
}

/// Synthesises a LiDAR scan at `pose`: beam `i` points along
/// `pose.heading - fov/2 + i * fov / n_beams`.
pub fn scan<T: Real>(
    map: &TrackMap<T>,
    pose: Pose<T>,
    n_beams: usize,
    fov: T,
    max_range: T,
) -> Result<LidarScan<T>, TrackError> {
    assert!(n_beams >= 2, "scan needs at least two beams");
    if map.is_occupied_world(pose.position()) {
        return Err(TrackError::PoseInWall);
    }
    let n = T::from_usize(n_beams).unwrap();
    let mut distances = Vec::with_capacity(n_beams);
    for i in 0..n_beams {
        let rel = -fov * T::half() + T::from_usize(i).unwrap() * fov / n;
        distances.push(cast_ray(map, pose, pose.heading + rel, max_range)?);
    }
    Ok(LidarScan::new(distances, fov, max_range))
}
