//! Synthetic track generation.
//!
//! Each generator returns both the rasterised occupancy grid and the exact
//! analytic centreline used to draw it, so tests can treat the centreline as
//! ground truth for extraction and planning.

use super::{Centreline, TrackError, TrackMap};
use crate::geom::{polyline_length, Point2, Pose};
use crate::num::Real;

/// Shape descriptor for generated tracks.
#[derive(Debug, Clone)]
pub enum TrackSpec<T = f64> {
    /// Straight corridor along +x, open at both ends.
    Corridor { length: T, width: T },
    /// Circular ring centred on the origin.
    Annulus { radius: T, width: T },
    /// Rectangle with rounded corners; sizes are the centreline extents.
    RoundedRect {
        size_x: T,
        size_y: T,
        corner_radius: T,
        width: T,
    },
    /// Closed spline through waypoints (centripetal Catmull-Rom).
    WaypointLoop { points: Vec<Point2<T>>, width: T },
}

impl<T: Real> TrackSpec<T> {
    pub fn name(&self) -> &'static str {
        match self {
            TrackSpec::Corridor { .. } => "corridor",
            TrackSpec::Annulus { .. } => "annulus",
            TrackSpec::RoundedRect { .. } => "rounded_rect",
            TrackSpec::WaypointLoop { .. } => "waypoint_loop",
        }
    }

    pub fn width(&self) -> T {
        match self {
            TrackSpec::Corridor { width, .. }
            | TrackSpec::Annulus { width, .. }
            | TrackSpec::RoundedRect { width, .. }
            | TrackSpec::WaypointLoop { width, .. } => *width,
        }
    }

    pub fn closed(&self) -> bool {
        !matches!(self, TrackSpec::Corridor { .. })
    }
}

/// Resamples a polyline to near-uniform spacing.
///
/// Open lines keep both endpoints; closed lines are treated as a ring and do
/// not repeat the first point.
pub fn resample_uniform<T: Real>(
    points: &[Point2<T>],
    target_spacing: T,
    closed: bool,
) -> Vec<Point2<T>> {
    assert!(points.len() >= 2);
    let mut pts: Vec<Point2<T>> = points.to_vec();
    if closed {
        pts.push(points[0]);
    }
    let total = polyline_length(&pts);
    let n = (total / target_spacing)
        .round()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let step = total / T::from_usize(n).unwrap();
    let count = if closed { n } else { n + 1 };

    let mut out = Vec::with_capacity(count);
    let mut seg = 0usize;
    let mut seg_start_s = T::zero();
    let mut seg_len = pts[0].dist(pts[1]);
    for k in 0..count {
        let target = step * T::from_usize(k).unwrap();
        while seg + 2 < pts.len() && seg_start_s + seg_len < target {
            seg_start_s = seg_start_s + seg_len;
            seg += 1;
            seg_len = pts[seg].dist(pts[seg + 1]);
        }
        let t = if seg_len > T::zero() {
            ((target - seg_start_s) / seg_len).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        out.push(pts[seg].lerp(pts[seg + 1], t));
    }
    if !closed {
        *out.last_mut().unwrap() = *pts.last().unwrap();
    }
    out
}

pub use crate::geom::discrete_curvature;

fn centripetal_catmull_rom<T: Real>(
    control: &[Point2<T>],
    samples_per_segment: usize,
) -> Vec<Point2<T>> {
    let n = control.len();
    let mut out = Vec::with_capacity(n * samples_per_segment);
    let alpha = T::half(); // centripetal parametrisation
    let knot = |a: Point2<T>, b: Point2<T>| a.dist(b).powf(alpha).max(T::c(1e-9));
    for i in 0..n {
        let p0 = control[(i + n - 1) % n];
        let p1 = control[i];
        let p2 = control[(i + 1) % n];
        let p3 = control[(i + 2) % n];
        let t0 = T::zero();
        let t1 = t0 + knot(p0, p1);
        let t2 = t1 + knot(p1, p2);
        let t3 = t2 + knot(p2, p3);
        for k in 0..samples_per_segment {
            let u = T::from_usize(k).unwrap() / T::from_usize(samples_per_segment).unwrap();
            let t = t1 + (t2 - t1) * u;
            // Barry-Goldman pyramid.
            let a1 = p0.scale((t1 - t) / (t1 - t0)) + p1.scale((t - t0) / (t1 - t0));
            let a2 = p1.scale((t2 - t) / (t2 - t1)) + p2.scale((t - t1) / (t2 - t1));
            let a3 = p2.scale((t3 - t) / (t3 - t2)) + p3.scale((t - t2) / (t3 - t2));
            let b1 = a1.scale((t2 - t) / (t2 - t0)) + a2.scale((t - t0) / (t2 - t0));
            let b2 = a2.scale((t3 - t) / (t3 - t1)) + a3.scale((t - t1) / (t3 - t1));
            let c = b1.scale((t2 - t) / (t2 - t1)) + b2.scale((t - t1) / (t2 - t1));
            out.push(c);
        }
    }
    out
}

fn polyline_self_intersects<T: Real>(pts: &[Point2<T>], closed: bool) -> bool {
    let n = pts.len();
    let seg_count = if closed { n } else { n - 1 };
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
    for i in 0..seg_count {
        for j in i + 2..seg_count {
            if closed && i == 0 && j == seg_count - 1 {
                continue; // wrap-adjacent
            }
            let (a0, a1) = seg(i);
            let (b0, b1) = seg(j);
            if crate::geom::segments_intersect(a0, a1, b0, b1) {
                return true;
            }
        }
    }
    false
}

/// Generates a rasterised track plus its analytic centreline.
pub fn generate_track<T: Real>(
    spec: &TrackSpec<T>,
    resolution: T,
) -> Result<(TrackMap<T>, Centreline<T>), TrackError> {
    if resolution <= T::zero() {
        return Err(TrackError::InvalidSpec("resolution must be positive".into()));
    }
    let width = spec.width();
    if width < resolution * T::two() {
        return Err(TrackError::WidthBelowResolution {
            width: width.to_f64(),
            resolution: resolution.to_f64(),
        });
    }
    let half_width = width * T::half();
    let spacing = resolution * T::two();
    let closed = spec.closed();

    let raw_centre: Vec<Point2<T>> = match spec {
        TrackSpec::Corridor { length, .. } => {
            if *length <= T::zero() {
                return Err(TrackError::InvalidSpec("corridor length must be positive".into()));
            }
            vec![Point2::zero(), Point2::new(*length, T::zero())]
        }
        TrackSpec::Annulus { radius, .. } => {
            if *radius <= half_width {
                return Err(TrackError::InvalidSpec(
                    "annulus radius must exceed half the track width".into(),
                ));
            }
            let n = (T::two_pi() * *radius / spacing).ceil().to_usize().unwrap().max(16);
            (0..n)
                .map(|i| {
                    let phi = T::two_pi() * T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
                    Point2::new(*radius * phi.cos(), *radius * phi.sin())
                })
                .collect()
        }
        TrackSpec::RoundedRect {
            size_x,
            size_y,
            corner_radius,
            ..
        } => {
            let r = *corner_radius;
            if r <= half_width
                || *size_x <= r * T::two()
                || *size_y <= r * T::two()
            {
                return Err(TrackError::InvalidSpec(
                    "rounded rectangle needs corner_radius > width/2 and sizes > 2*corner_radius"
                        .into(),
                ));
            }
            let mut pts = Vec::new();
            let quarter = |cx: T, cy: T, a0: T, pts: &mut Vec<Point2<T>>| {
                let arc_len = r * T::pi() * T::half();
                let n = (arc_len / spacing).ceil().to_usize().unwrap().max(4);
                for i in 0..n {
                    let a = a0
                        + T::pi() * T::half() * T::from_usize(i).unwrap()
                            / T::from_usize(n).unwrap();
                    pts.push(Point2::new(cx + r * a.cos(), cy + r * a.sin()));
                }
            };
            let line = |a: Point2<T>, b: Point2<T>, pts: &mut Vec<Point2<T>>| {
                let n = (a.dist(b) / spacing).ceil().to_usize().unwrap().max(2);
                for i in 0..n {
                    let t = T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
                    pts.push(a.lerp(b, t));
                }
            };
            let (sx, sy) = (*size_x, *size_y);
            line(Point2::new(r, T::zero()), Point2::new(sx - r, T::zero()), &mut pts);
            quarter(sx - r, r, -T::pi() * T::half(), &mut pts);
            line(Point2::new(sx, r), Point2::new(sx, sy - r), &mut pts);
            quarter(sx - r, sy - r, T::zero(), &mut pts);
            line(Point2::new(sx - r, sy), Point2::new(r, sy), &mut pts);
            quarter(r, sy - r, T::pi() * T::half(), &mut pts);
            line(Point2::new(T::zero(), sy - r), Point2::new(T::zero(), r), &mut pts);
            quarter(r, r, T::pi(), &mut pts);
            pts
        }
        TrackSpec::WaypointLoop { points, .. } => {
            if points.len() < 4 {
                return Err(TrackError::InvalidSpec(
                    "waypoint loop needs at least 4 control points".into(),
                ));
            }
            centripetal_catmull_rom(points, 24)
        }
    };

    // The annulus points are already exactly uniform on the circle;
    // resampling would pull them onto chords.
    let centre = if matches!(spec, TrackSpec::Annulus { .. }) {
        raw_centre
    } else {
        resample_uniform(&raw_centre, spacing, closed)
    };
    if centre.len() < 2 {
        return Err(TrackError::InvalidSpec("degenerate centreline".into()));
    }

    if closed {
        if polyline_self_intersects(&centre, true) {
            return Err(TrackError::SelfIntersectingSpline);
        }
        // The tube must not pinch: curvature radius must exceed half-width.
        let n = centre.len();
        for i in 0..n {
            let k = discrete_curvature(centre[(i + n - 1) % n], centre[i], centre[(i + 1) % n]);
            if k.abs() * (half_width + resolution * T::two()) > T::one() {
                return Err(TrackError::InvalidSpec(format!(
                    "curvature {:.3} too sharp for track width",
                    k.abs().to_f64()
                )));
            }
        }
    }

    // Grid extents: closed shapes get a wall border all round; the corridor
    // ends exactly at its endpoints so it stays open.
    let pad = half_width + resolution * T::c(4.0);
    let (mut min_x, mut max_x, mut min_y, mut max_y) = {
        let first = centre[0];
        (first.x, first.x, first.y, first.y)
    };
    for p in &centre {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let (lo, hi) = match spec {
        TrackSpec::Corridor { length, .. } => (
            Point2::new(T::zero(), min_y - pad),
            Point2::new(*length, max_y + pad),
        ),
        _ => (
            Point2::new(min_x - pad, min_y - pad),
            Point2::new(max_x + pad, max_y + pad),
        ),
    };
    let g_width = ((hi.x - lo.x) / resolution).ceil().to_usize().unwrap().max(1);
    let g_height = ((hi.y - lo.y) / resolution).ceil().to_usize().unwrap().max(1);

    // Stamp free space as a union of discs along a fine centreline sampling.
    let mut grid = vec![true; g_width * g_height];
    let fine = resample_uniform(&centre, resolution * T::half(), closed);
    let half = T::half();
    let r_cells = (half_width / resolution).ceil().to_isize().unwrap() + 1;
    for p in &fine {
        let cx = ((p.x - lo.x) / resolution).floor().to_isize().unwrap_or(0);
        let cy = ((p.y - lo.y) / resolution).floor().to_isize().unwrap_or(0);
        for dy in -r_cells..=r_cells {
            for dx in -r_cells..=r_cells {
                let (ix, iy) = (cx + dx, cy + dy);
                if ix < 0 || iy < 0 || ix as usize >= g_width || iy as usize >= g_height {
                    continue;
                }
                let centre_x = lo.x + (T::from_isize(ix).unwrap() + half) * resolution;
                let centre_y = lo.y + (T::from_isize(iy).unwrap() + half) * resolution;
                if p.dist(Point2::new(centre_x, centre_y)) <= half_width {
                    grid[iy as usize * g_width + ix as usize] = false;
                }
            }
        }
    }

    let centreline = Centreline {
        widths_left: vec![half_width; centre.len()],
        widths_right: vec![half_width; centre.len()],
        points: centre,
        closed,
    };

    let p0 = centreline.points[0];
    let p1 = centreline.points[1];
    let tangent = (p1 - p0).normalized().expect("distinct centreline points");
    let normal = tangent.perp();
    let start_pose = Pose::new(p0.x, p0.y, tangent.bearing());
    let line_half = half_width + resolution * T::c(3.0);
    let start_line = (p0 + normal.scale(-line_half), p0 + normal.scale(line_half));

    let map = TrackMap::from_grid(
        grid,
        g_width,
        g_height,
        resolution,
        lo,
        start_pose,
        start_line,
        spec.name(),
        Some(centreline.clone()),
    )?;
    Ok((map, centreline))
}
