//! Tracking controllers: pure pursuit and the Follow-The-Gap baseline.

use crate::lidar::LidarScan;
use crate::localmap::scan_to_points;
use crate::num::Real;
use crate::trajopt::Trajectory;
use crate::vehicle::{Action, VehicleState};

#[derive(Debug, thiserror::Error)]
pub enum ControlError {
    #[error("cannot track an empty trajectory")]
    EmptyTrajectory,
}

/// Pure pursuit tuning: lookahead grows linearly with speed,
/// `l_d = l_c + l_s * v`.
#[derive(Debug, Clone, Copy)]
pub struct PurePursuitConfig<T = f64> {
    pub lookahead_base: T,
    pub lookahead_speed_gain: T,
    pub wheelbase: T,
    pub delta_max: T,
}

impl<T: Real> Default for PurePursuitConfig<T> {
    fn default() -> Self {
        Self {
            lookahead_base: T::c(0.5),
            lookahead_speed_gain: T::c(0.18),
            wheelbase: T::c(0.33),
            delta_max: T::c(0.4),
        }
    }
}

/// One pure pursuit step: steer toward the waypoint one lookahead distance
/// ahead of the closest trajectory point, `δ = atan(L sin α / l_d)`.
///
/// Closed trajectories wrap the lookahead; open ones clamp to the final
/// point so short horizons keep being tracked. Commanded speed is the
/// profile speed at the closest point.
pub fn pure_pursuit_step<T: Real>(
    traj: &Trajectory<T>,
    state: &VehicleState<T>,
    cfg: &PurePursuitConfig<T>,
) -> Result<Action<T>, ControlError> {
    if traj.is_empty() {
        return Err(ControlError::EmptyTrajectory);
    }
    let lookahead = cfg.lookahead_base + cfg.lookahead_speed_gain * state.speed;
    let closest = traj.closest_index(state.pose.position());
    let target = traj.point_ahead(closest, lookahead);

    let to_target = state.pose.world_to_body(target);
    let alpha = to_target.y.atan2(to_target.x);
    let steer = (cfg.wheelbase * alpha.sin() / lookahead)
        .atan()
        .max(-cfg.delta_max)
        .min(cfg.delta_max);
    Ok(Action::new(steer, traj.speeds[closest]))
}

/// Follow-The-Gap tuning.
#[derive(Debug, Clone, Copy)]
pub struct FtgConfig<T = f64> {
    /// Returns within this distance of the nearest return are blanked.
    pub bubble_radius: T,
    /// Beams farther than this count as free space.
    pub safe_distance: T,
    /// Only beams within ±fov_clip of straight ahead are considered.
    pub fov_clip: T,
    pub delta_max: T,
    /// Piecewise speed map over |δ|: (threshold, speed) pairs plus a floor.
    pub speed_map: [(T, T); 2],
    pub speed_floor: T,
}

impl<T: Real> Default for FtgConfig<T> {
    fn default() -> Self {
        Self {
            bubble_radius: T::c(0.5),
            safe_distance: T::c(1.2),
            fov_clip: T::c(1.5),
            delta_max: T::c(0.4),
            speed_map: [(T::c(0.1), T::c(5.0)), (T::c(0.25), T::c(3.0))],
            speed_floor: T::c(1.5),
        }
    }
}

impl<T: Real> FtgConfig<T> {
    /// Monotone non-increasing speed as a function of |steering|.
    pub fn speed_for(&self, steer: T) -> T {
        let mag = steer.abs();
        for &(threshold, speed) in &self.speed_map {
            if mag < threshold {
                return speed;
            }
        }
        self.speed_floor
    }
}

/// Reactive Follow-The-Gap step: blank a bubble around the nearest return,
/// pick the widest run of far-enough beams and steer at its furthest point.
///
/// Stateless: the action depends only on the scan and the config.
pub fn ftg_step<T: Real>(scan: &LidarScan<T>, cfg: &FtgConfig<T>) -> Action<T> {
    let n = scan.n_beams();
    let points = scan_to_points(scan);
    // scan_to_points drops max-range beams, so work on the raw arrays and
    // look points up by beam index.
    let mut ranges: Vec<T> = scan.distances.clone();
    let in_fov: Vec<bool> = (0..n)
        .map(|i| scan.relative_bearing(i).abs() <= cfg.fov_clip)
        .collect();

    // Nearest return inside the clipped fov.
    let mut nearest: Option<(usize, T)> = None;
    for i in 0..n {
        if !in_fov[i] || ranges[i] >= scan.max_range {
            continue;
        }
        if nearest.map_or(true, |(_, d)| ranges[i] < d) {
            nearest = Some((i, ranges[i]));
        }
    }

    if let Some((ni, nd)) = nearest {
        let near_pt = {
            let bearing = scan.relative_bearing(ni);
            crate::geom::Point2::new(nd * bearing.cos(), nd * bearing.sin())
        };
        let _ = &points;
        for i in 0..n {
            if ranges[i] >= scan.max_range {
                continue;
            }
            let bearing = scan.relative_bearing(i);
            let p = crate::geom::Point2::new(ranges[i] * bearing.cos(), ranges[i] * bearing.sin());
            if p.dist(near_pt) < cfg.bubble_radius {
                ranges[i] = T::zero();
            }
        }
    }

    // Widest contiguous run of far-enough beams (ties: first run wins).
    let free = |i: usize| in_fov[i] && ranges[i] > cfg.safe_distance;
    let mut best_run: Option<(usize, usize)> = None; // [start, end)
    let mut run_start: Option<usize> = None;
    for i in 0..=n {
        let is_free = i < n && free(i);
        match (is_free, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(s)) => {
                let len = i - s;
                if best_run.map_or(true, |(bs, be)| len > be - bs) {
                    best_run = Some((s, i));
                }
                run_start = None;
            }
            _ => {}
        }
    }

    let Some((s, e)) = best_run else {
        return Action::stop(); // fully blocked: emergency stop
    };

    // Furthest return within the gap is the goal point; ties (typically a
    // block of max-range beams) resolve to their median beam.
    let mut max_range_val = ranges[s];
    for i in s..e {
        if ranges[i] > max_range_val {
            max_range_val = ranges[i];
        }
    }
    let ties: Vec<usize> = (s..e).filter(|&i| ranges[i] == max_range_val).collect();
    let best = ties[ties.len() / 2];
    let steer = scan
        .relative_bearing(best)
        .max(-cfg.delta_max)
        .min(cfg.delta_max);
    Action::new(steer, cfg.speed_for(steer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Point2, Pose};

    fn straight_traj(speed: f64) -> Trajectory<f64> {
        let n = 200;
        let points: Vec<Point2<f64>> = (0..n).map(|i| Point2::new(0.2 * i as f64, 0.0)).collect();
        let s = crate::geom::cumulative_arc_lengths(&points);
        Trajectory {
            curvatures: vec![0.0; n],
            speeds: vec![speed; n],
            s,
            points,
            closed: false,
        }
    }

    #[test]
    fn zero_alpha_zero_steer() {
        let traj = straight_traj(3.0);
        let state = VehicleState::at_pose(Pose::new(1.0, 0.0, 0.0));
        let a = pure_pursuit_step(&traj, &state, &PurePursuitConfig::default()).unwrap();
        assert_eq!(a.steer, 0.0);
    }

    #[test]
    fn steering_formula_is_exact() {
        // δ = atan(L sin α / l_d) with L = 0.33, α = 0.2, l_d = 1.0.
        let l: f64 = 0.33;
        let alpha: f64 = 0.2;
        let expect = (l * alpha.sin() / 1.0).atan();
        assert!((expect - 0.0654670).abs() < 1e-6);
        assert!((expect - 0.0655).abs() < 1e-4);

        // Reproduce through the controller: trajectory along +x, vehicle
        // rotated so the lookahead point sits at bearing α.
        let traj = straight_traj(2.0);
        let cfg = PurePursuitConfig {
            lookahead_base: 1.0,
            lookahead_speed_gain: 0.0,
            wheelbase: 0.33,
            delta_max: 0.4,
        };
        let state = VehicleState {
            pose: Pose::new(0.0, 0.0, -alpha),
            speed: 2.0,
            steering: 0.0,
            time: 0.0,
        };
        let a = pure_pursuit_step(&traj, &state, &cfg).unwrap();
        assert!((a.steer - expect).abs() < 1e-12);
    }

    #[test]
    fn lookahead_law() {
        let cfg = PurePursuitConfig::<f64> {
            lookahead_base: 0.5,
            lookahead_speed_gain: 0.15,
            ..Default::default()
        };
        let ld = cfg.lookahead_base + cfg.lookahead_speed_gain * 4.0;
        assert!((ld - 1.1).abs() < 1e-12);
    }

    #[test]
    fn steering_is_clamped() {
        let traj = straight_traj(2.0);
        let state = VehicleState::at_pose(Pose::new(0.0, 0.0, 2.5));
        let a = pure_pursuit_step(&traj, &state, &PurePursuitConfig::default()).unwrap();
        assert!(a.steer.abs() <= 0.4 + 1e-15);
    }

    #[test]
    fn empty_trajectory_is_error() {
        let traj = Trajectory::<f64> {
            points: vec![],
            curvatures: vec![],
            speeds: vec![],
            s: vec![],
            closed: false,
        };
        let state = VehicleState::at_pose(Pose::new(0.0, 0.0, 0.0));
        assert!(pure_pursuit_step(&traj, &state, &PurePursuitConfig::default()).is_err());
    }

    #[test]
    fn invariant_under_rigid_transforms() {
        let traj = straight_traj(3.0);
        let state = VehicleState {
            pose: Pose::new(1.33, 0.4, 0.2),
            speed: 3.0,
            steering: 0.0,
            time: 0.0,
        };
        let cfg = PurePursuitConfig::default();
        let a0 = pure_pursuit_step(&traj, &state, &cfg).unwrap();

        // Rotate and translate trajectory and state together.
        let rot = 0.9f64;
        let shift = Point2::new(-4.0, 2.5);
        let moved = Trajectory {
            points: traj.points.iter().map(|p| p.rotate(rot) + shift).collect(),
            ..traj.clone()
        };
        let mp = state.pose.position().rotate(rot) + shift;
        let mstate = VehicleState {
            pose: Pose::new(mp.x, mp.y, state.pose.heading + rot),
            ..state
        };
        let a1 = pure_pursuit_step(&moved, &mstate, &cfg).unwrap();
        assert!((a0.steer - a1.steer).abs() < 1e-9);
        assert!((a0.speed - a1.speed).abs() < 1e-12);
    }

    fn scan_from(ranges: Vec<f64>) -> LidarScan<f64> {
        LidarScan::new(ranges, 3.0, 30.0)
    }

    #[test]
    fn symmetric_corridor_goes_straight() {
        // Even beam count puts beam n/2 at bearing 0; ranges mirror around
        // it (beam 0 has no mirror partner and is set to the far value).
        let n = 100;
        let mut ranges = vec![0.0; n];
        for (i, r) in ranges.iter_mut().enumerate() {
            let d = (i as i64 - 50).unsigned_abs() as f64;
            *r = 4.0 + (50.0 - d) / 10.0;
        }
        let a = ftg_step(&scan_from(ranges), &FtgConfig::default());
        assert_eq!(a.steer, 0.0);
    }

    #[test]
    fn obstacle_on_the_right_steers_left() {
        let n = 100;
        let mut ranges = vec![8.0; n];
        for r in ranges.iter_mut().take(50) {
            *r = 1.0; // right half blocked (negative bearings come first)
        }
        let a = ftg_step(&scan_from(ranges), &FtgConfig::default());
        assert!(a.steer > 0.0, "steer {:?}", a.steer);
    }

    #[test]
    fn widest_gap_wins() {
        // Two gaps above the safe distance: 30 beams and 80 beams.
        let n = 200;
        let mut ranges = vec![0.9; n];
        for r in ranges.iter_mut().skip(10).take(30) {
            *r = 5.0;
        }
        for r in ranges.iter_mut().skip(90).take(80) {
            *r = 5.0;
        }
        let cfg = FtgConfig {
            fov_clip: 10.0, // keep every beam eligible
            bubble_radius: 0.0,
            ..FtgConfig::default()
        };
        let a = ftg_step(&scan_from(ranges), &cfg);
        // The 80-beam gap spans indices 90..170; its bearings are positive.
        assert!(a.steer > 0.0);
    }

    #[test]
    fn fully_blocked_scan_stops() {
        let a = ftg_step(&scan_from(vec![0.4; 64]), &FtgConfig::default());
        assert_eq!(a.speed, 0.0);
        assert_eq!(a.steer, 0.0);
    }

    #[test]
    fn speed_map_is_monotone() {
        let cfg = FtgConfig::<f64>::default();
        assert_eq!(cfg.speed_for(0.05), 5.0);
        assert_eq!(cfg.speed_for(0.2), 3.0);
        assert_eq!(cfg.speed_for(0.3), 1.5);
        let mut last = f64::INFINITY;
        for k in 0..40 {
            let v = cfg.speed_for(0.01 * k as f64);
            assert!(v <= last);
            last = v;
        }
    }
}
