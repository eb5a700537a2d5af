//! Two-stage trajectory optimisation: minimum-curvature path, then a
//! minimum-time speed profile. Works identically on a global centreline and
//! on an extracted local map.

pub mod mincurv;
pub mod oracle;
pub mod speed;

pub use mincurv::{min_curvature_path, Anchor, MinCurvPath, PathDomain, PlanError};
pub use speed::{braking_terminal_speed, speed_profile, TerminalRule};

use crate::geom::{cumulative_arc_lengths, discrete_curvature, Point2};
use crate::localmap::LocalMap;
use crate::num::Real;
use crate::track::{resample_uniform, Centreline};
pub use crate::vehicle::VehicleLimits;

/// Tuning for the two-stage planner.
#[derive(Debug, Clone, Copy)]
pub struct TrajOptConfig<T = f64> {
    /// Working point spacing for the optimiser.
    pub spacing: T,
    /// Corner speed the vehicle must be able to reach past the horizon end.
    pub v_safe: T,
    /// Distance assumed drivable beyond the horizon before the vehicle must
    /// be down to `v_safe`; sized to the shortest local maps seen in
    /// practice so blind corners are approached braking.
    pub horizon_brake_dist: T,
    /// QP convergence tolerance on the objective.
    pub qp_tol: T,
    pub qp_max_iter: usize,
    /// Lower bound on the planning start speed for local plans.
    pub v_plan_floor: T,
}

impl<T: Real> Default for TrajOptConfig<T> {
    fn default() -> Self {
        Self {
            spacing: T::c(0.2),
            v_safe: T::c(2.0),
            horizon_brake_dist: T::c(4.0),
            qp_tol: T::c(1e-8),
            qp_max_iter: 400,
            v_plan_floor: T::c(1.0),
        }
    }
}

/// Optimised path with curvature and speed profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T = f64> {
    pub points: Vec<Point2<T>>,
    pub curvatures: Vec<T>,
    pub speeds: Vec<T>,
    pub s: Vec<T>,
    pub closed: bool,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total arc length including the wrap segment for closed trajectories.
    pub fn total_arc(&self) -> T {
        let open = self.s.last().copied().unwrap_or_else(T::zero);
        if self.closed && self.points.len() > 1 {
            open + self.points[self.points.len() - 1].dist(self.points[0])
        } else {
            open
        }
    }

    /// Index of the point closest to `p`.
    pub fn closest_index(&self, p: Point2<T>) -> usize {
        let mut best = 0;
        let mut best_d = T::infinity();
        for (i, q) in self.points.iter().enumerate() {
            let d = p.dist(*q);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// First point at arc distance >= `dist` ahead of index `from`. Closed
    /// trajectories wrap; open ones clamp to the final point.
    pub fn point_ahead(&self, from: usize, dist: T) -> Point2<T> {
        let n = self.points.len();
        let mut acc = T::zero();
        let mut i = from;
        loop {
            let j = if self.closed { (i + 1) % n } else { i + 1 };
            if j >= n {
                return self.points[n - 1];
            }
            acc = acc + self.points[i].dist(self.points[j]);
            if acc >= dist {
                return self.points[j];
            }
            i = j;
            if self.closed && i == from {
                return self.points[i]; // lookahead longer than the loop
            }
        }
    }

    /// CSV with header `s,x,y,kappa,v`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,x,y,kappa,v\n");
        for i in 0..self.points.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.s[i], self.points[i].x, self.points[i].y, self.curvatures[i], self.speeds[i]
            ));
        }
        out
    }
}

/// Discrete curvature per point from the circumcircle of each point and its
/// neighbours; open-line ends copy their neighbour's value.
pub fn path_curvatures<T: Real>(points: &[Point2<T>], closed: bool) -> Vec<T> {
    let n = points.len();
    let mut k = vec![T::zero(); n];
    if n < 3 {
        return k;
    }
    for i in 0..n {
        if closed {
            k[i] = discrete_curvature(points[(i + n - 1) % n], points[i], points[(i + 1) % n]);
        } else if i > 0 && i + 1 < n {
            k[i] = discrete_curvature(points[i - 1], points[i], points[i + 1]);
        }
    }
    if !closed {
        k[0] = k[1];
        k[n - 1] = k[n - 2];
    }
    k
}

fn arc_steps<T: Real>(points: &[Point2<T>], closed: bool) -> Vec<T> {
    let mut ds: Vec<T> = points.windows(2).map(|w| w[0].dist(w[1])).collect();
    if closed {
        ds.push(points[points.len() - 1].dist(points[0]));
    }
    ds
}

/// Interpolates widths of a centreline onto resampled points by arc length.
fn resample_widths<T: Real>(
    line: &Centreline<T>,
    new_points: &[Point2<T>],
) -> (Vec<T>, Vec<T>) {
    // Nearest original point is adequate: widths vary slowly.
    let mut wl = Vec::with_capacity(new_points.len());
    let mut wr = Vec::with_capacity(new_points.len());
    for p in new_points {
        let mut best = 0;
        let mut best_d = T::infinity();
        for (i, q) in line.points.iter().enumerate() {
            let d = p.dist(*q);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        wl.push(line.widths_left[best]);
        wr.push(line.widths_right[best]);
    }
    (wl, wr)
}

/// Full-track raceline: minimum-curvature path plus closed speed profile.
pub fn plan_global_trajectory<T: Real>(
    line: &Centreline<T>,
    limits: &VehicleLimits<T>,
    cfg: &TrajOptConfig<T>,
) -> Result<Trajectory<T>, PlanError> {
    if line.points.len() < 5 {
        return Err(PlanError::Degenerate(format!(
            "centreline has {} points",
            line.points.len()
        )));
    }
    let points = resample_uniform(&line.points, cfg.spacing, line.closed);
    let (wl, wr) = resample_widths(line, &points);
    let domain = PathDomain::with_derived_normals(points, wl, wr, line.closed);
    let path = min_curvature_path(&domain, limits.half_width, None, cfg.qp_tol, cfg.qp_max_iter)?;

    let curvatures = path_curvatures(&path.points, line.closed);
    let ds = arc_steps(&path.points, line.closed);
    let speeds = if line.closed {
        speed_profile(&curvatures, &ds, limits, None, TerminalRule::Free)
    } else {
        speed_profile(
            &curvatures,
            &ds,
            limits,
            Some(limits.v_max),
            TerminalRule::CapEnd(braking_terminal_speed(
                limits,
                cfg.v_safe,
                cfg.horizon_brake_dist,
            )),
        )
    };
    let s = cumulative_arc_lengths(&path.points);
    Ok(Trajectory {
        points: path.points,
        curvatures,
        speeds,
        s,
        closed: line.closed,
    })
}

/// Receding-horizon raceline over one local map, anchored at the vehicle.
///
/// The local map lives in the vehicle frame, so the anchor is the origin and
/// the returned trajectory is also vehicle-frame.
pub fn plan_local_trajectory<T: Real>(
    map: &LocalMap<T>,
    current_speed: T,
    limits: &VehicleLimits<T>,
    cfg: &TrajOptConfig<T>,
) -> Result<Trajectory<T>, PlanError> {
    if map.len() < 5 {
        return Err(PlanError::Degenerate(format!(
            "local map has {} points",
            map.len()
        )));
    }
    let domain = PathDomain {
        points: map.points.clone(),
        normals: map.normals.clone(),
        widths_left: map.widths_left.clone(),
        widths_right: map.widths_right.clone(),
        closed: false,
    };
    // Vehicle at the origin of the map frame.
    let anchor = Anchor {
        lateral_offset: domain.normals[0].dot(-domain.points[0]),
        heading: T::zero(),
    };
    let path = min_curvature_path(
        &domain,
        limits.half_width,
        Some(anchor),
        cfg.qp_tol,
        cfg.qp_max_iter,
    )?;

    let curvatures = path_curvatures(&path.points, false);
    let ds = arc_steps(&path.points, false);
    let v_end = braking_terminal_speed(limits, cfg.v_safe, cfg.horizon_brake_dist);
    let v_start = current_speed.max(cfg.v_plan_floor).min(limits.v_max);
    let speeds = speed_profile(
        &curvatures,
        &ds,
        limits,
        Some(v_start),
        TerminalRule::CapEnd(v_end),
    );
    let s = cumulative_arc_lengths(&path.points);
    Ok(Trajectory {
        points: path.points,
        curvatures,
        speeds,
        s,
        closed: false,
    })
}
