//! Local map extraction: one LiDAR scan in, a drivable centreline with track
//! widths and normals out.
//!
//! The pipeline is: scan to Cartesian points, split the points into boundary
//! runs, resample the two dominant runs, pair long-boundary points with their
//! nearest short-boundary points (projecting across the track at constant
//! width once the short boundary runs out), then take segment midpoints as
//! the centreline. Everything works in the vehicle frame: the sensor sits at
//! the origin heading along +x.

use crate::geom::{cumulative_arc_lengths, polyline_length, Point2};
use crate::lidar::LidarScan;
use crate::num::Real;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("scan produced no returns")]
    EmptyScan,
    #[error("too few scan points for boundary identification: {got} < {need}")]
    TooFewPoints { got: usize, need: usize },
    #[error("fewer than two boundary runs visible")]
    SingleBoundary,
    #[error("line too short to resample")]
    DegenerateLine,
    #[error("too few cross-track segments to build a local map")]
    TooFewSegments,
}

/// Tuning for the extraction pipeline. All values in metres.
#[derive(Debug, Clone, Copy)]
pub struct ExtractionConfig<T = f64> {
    /// Consecutive-point distance that splits boundary runs.
    pub gap_threshold: T,
    /// Resample spacing for boundaries and centreline.
    pub spacing: T,
    /// Maximum plausible cross-track width; longer pairings are rejected.
    pub w_max: T,
    /// Width assumed when projecting the hidden boundary.
    pub w_track: T,
}

impl<T: Real> Default for ExtractionConfig<T> {
    fn default() -> Self {
        Self {
            gap_threshold: T::c(0.8),
            spacing: T::c(0.2),
            w_max: T::c(2.5),
            w_track: T::c(1.6),
        }
    }
}

/// The two dominant boundary lines, ordered in the direction of travel.
#[derive(Debug, Clone)]
pub struct BoundaryPair<T = f64> {
    pub long_line: Vec<Point2<T>>,
    pub short_line: Vec<Point2<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    /// Both endpoints observed.
    Matched,
    /// Far endpoint synthesised at constant track width.
    Projected,
}

/// One cross-track segment from the long boundary to the short (or
/// projected) boundary.
#[derive(Debug, Clone, Copy)]
pub struct Segment<T = f64> {
    pub long_pt: Point2<T>,
    pub short_pt: Point2<T>,
    pub kind: SegmentKind,
}

impl<T: Real> Segment<T> {
    pub fn length(&self) -> T {
        self.long_pt.dist(self.short_pt)
    }

    pub fn midpoint(&self) -> Point2<T> {
        (self.long_pt + self.short_pt).scale(T::half())
    }
}

#[derive(Debug, Clone)]
pub struct SegmentList<T = f64> {
    pub segments: Vec<Segment<T>>,
}

impl<T: Real> SegmentList<T> {
    pub fn matched_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| s.kind == SegmentKind::Matched)
            .count()
    }
}

/// Centreline of the visible track region, in the vehicle frame.
///
/// Points are equidistant, `s` is the cumulative arc length from the vehicle
/// and `normals` are unit vectors pointing to the left of travel.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMap<T = f64> {
    pub points: Vec<Point2<T>>,
    pub widths_left: Vec<T>,
    pub widths_right: Vec<T>,
    pub normals: Vec<Point2<T>>,
    pub s: Vec<T>,
    /// Arc length of the portion where both boundaries were observed.
    pub matched_arc: T,
    /// True when no pairing succeeded and the whole map is projected.
    pub all_projected: bool,
}

impl<T: Real> LocalMap<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_arc(&self) -> T {
        self.s.last().copied().unwrap_or_else(T::zero)
    }

    pub fn projected_arc(&self) -> T {
        self.total_arc() - self.matched_arc
    }

    /// CSV with header `s,x,y,w_left,w_right,nx,ny`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,x,y,w_left,w_right,nx,ny\n");
        for i in 0..self.points.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.s[i],
                self.points[i].x,
                self.points[i].y,
                self.widths_left[i],
                self.widths_right[i],
                self.normals[i].x,
                self.normals[i].y
            ));
        }
        out
    }
}

/// Converts a scan to Cartesian points in the vehicle frame, dropping
/// max-range beams as non-returns.
pub fn scan_to_points<T: Real>(scan: &LidarScan<T>) -> Vec<Point2<T>> {
    scan.beams()
        .filter(|&(_, d)| d < scan.max_range)
        .map(|(bearing, d)| Point2::new(d * bearing.cos(), d * bearing.sin()))
        .collect()
}

/// Orients a run so it starts at the end with the larger bearing magnitude,
/// i.e. the end beside or behind the vehicle, and runs forward.
fn orient_forward<T: Real>(mut run: Vec<Point2<T>>) -> Vec<Point2<T>> {
    let first = run.first().unwrap().bearing().abs();
    let last = run.last().unwrap().bearing().abs();
    if last > first {
        run.reverse();
    }
    run
}

/// Splits the scan points into contiguous runs and returns the two with the
/// greatest arc length as the boundary pair.
pub fn identify_boundaries<T: Real>(
    points: &[Point2<T>],
    gap_threshold: T,
) -> Result<BoundaryPair<T>, ExtractError> {
    if points.len() < 4 {
        return Err(ExtractError::TooFewPoints {
            got: points.len(),
            need: 4,
        });
    }
    let mut runs: Vec<Vec<Point2<T>>> = Vec::new();
    let mut current = vec![points[0]];
    for w in points.windows(2) {
        if w[0].dist(w[1]) > gap_threshold {
            runs.push(std::mem::take(&mut current));
        }
        current.push(w[1]);
    }
    runs.push(current);
    runs.retain(|r| r.len() >= 2);
    if runs.len() < 2 {
        return Err(ExtractError::SingleBoundary);
    }

    // Two longest runs by arc length.
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&a, &b| {
        polyline_length(&runs[b])
            .partial_cmp(&polyline_length(&runs[a]))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let a = runs[order[0]].clone();
    let b = runs[order[1]].clone();
    let (la, lb) = (polyline_length(&a), polyline_length(&b));

    let mean_y = |r: &[Point2<T>]| {
        r.iter().fold(T::zero(), |acc, p| acc + p.y) / T::from_usize(r.len()).unwrap()
    };
    let (long, short) = if la > lb {
        (a, b)
    } else if lb > la {
        (b, a)
    } else if mean_y(&a) >= mean_y(&b) {
        (a, b) // tie: the left-hand line counts as long
    } else {
        (b, a)
    };
    Ok(BoundaryPair {
        long_line: orient_forward(long),
        short_line: orient_forward(short),
    })
}

/// Resamples a line at exactly `spacing` by linear interpolation. Endpoints
/// are preserved; only the final interval may be shorter.
pub fn resample_line<T: Real>(
    line: &[Point2<T>],
    spacing: T,
) -> Result<Vec<Point2<T>>, ExtractError> {
    if line.len() < 2 || spacing <= T::zero() {
        return Err(ExtractError::DegenerateLine);
    }
    let total = polyline_length(line);
    if total < spacing {
        return Err(ExtractError::DegenerateLine);
    }
    let mut out = Vec::new();
    let mut seg = 0usize;
    let mut seg_start = T::zero();
    let mut seg_len = line[0].dist(line[1]);
    let mut k = 0usize;
    loop {
        let target = spacing * T::from_usize(k).unwrap();
        if target > total {
            break;
        }
        while seg + 2 < line.len() && seg_start + seg_len < target {
            seg_start = seg_start + seg_len;
            seg += 1;
            seg_len = line[seg].dist(line[seg + 1]);
        }
        let t = if seg_len > T::zero() {
            ((target - seg_start) / seg_len).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        out.push(line[seg].lerp(line[seg + 1], t));
        k += 1;
    }
    // Preserve the endpoint; skip it if the last sample already landed there.
    let end = *line.last().unwrap();
    if out.last().map_or(true, |p| p.dist(end) > T::c(1e-9)) {
        out.push(end);
    }
    Ok(out)
}

/// Unit normals of a line by central differences, rotated +90° from the
/// tangent (one-sided differences at the ends).
fn line_normals<T: Real>(line: &[Point2<T>]) -> Vec<Point2<T>> {
    let n = line.len();
    let mut normals = Vec::with_capacity(n);
    for i in 0..n {
        let a = if i == 0 { line[0] } else { line[i - 1] };
        let b = if i + 1 == n { line[n - 1] } else { line[i + 1] };
        let t = (b - a)
            .normalized()
            .unwrap_or_else(|| Point2::new(T::one(), T::zero()));
        normals.push(t.perp());
    }
    normals
}

/// Pairs each long-boundary point with its nearest short-boundary point.
///
/// Pairing stops at the first distance that reaches `w_max`; the remaining
/// long points are paired with a synthetic boundary offset by `w_track` along
/// the long line's normals. Nearest-index matches are kept non-decreasing so
/// segments cannot cross at concave corners.
pub fn match_segments<T: Real>(pair: &BoundaryPair<T>, w_max: T, w_track: T) -> SegmentList<T> {
    let long = &pair.long_line;
    let short = &pair.short_line;
    let mut segments = Vec::with_capacity(long.len());
    let mut prev_k = 0usize;
    let mut have_match = false;
    let mut break_at = long.len();

    for (i, &lp) in long.iter().enumerate() {
        let mut best_k = 0usize;
        let mut best_d = T::infinity();
        for (k, &sp) in short.iter().enumerate() {
            let d = lp.dist(sp);
            if d < best_d {
                best_d = d;
                best_k = k;
            }
        }
        if have_match && best_k < prev_k {
            best_k = prev_k; // monotonicity repair
            best_d = lp.dist(short[best_k]);
        }
        if best_d < w_max {
            segments.push(Segment {
                long_pt: lp,
                short_pt: short[best_k],
                kind: SegmentKind::Matched,
            });
            prev_k = best_k;
            have_match = true;
        } else {
            break_at = i;
            break;
        }
    }

    if break_at < long.len() {
        // Project the rest of the long line across the track.
        let normals = line_normals(long);
        let sign = if have_match {
            let i = break_at - 1;
            let toward = segments[i].short_pt - segments[i].long_pt;
            if normals[i].dot(toward) >= T::zero() {
                T::one()
            } else {
                -T::one()
            }
        } else {
            let centroid = short
                .iter()
                .fold(Point2::zero(), |acc, &p| acc + p)
                .scale(T::one() / T::from_usize(short.len()).unwrap());
            if normals[break_at].dot(centroid - long[break_at]) >= T::zero() {
                T::one()
            } else {
                -T::one()
            }
        };
        for i in break_at..long.len() {
            segments.push(Segment {
                long_pt: long[i],
                short_pt: long[i] + normals[i].scale(sign * w_track),
                kind: SegmentKind::Projected,
            });
        }
    }

    SegmentList { segments }
}

/// Builds the local map from the segment list: midpoints become the
/// centreline, trimmed to start at the point nearest the vehicle and
/// resampled to equidistant points.
pub fn build_local_map<T: Real>(
    segs: &SegmentList<T>,
    spacing: T,
) -> Result<LocalMap<T>, ExtractError> {
    if segs.segments.len() < 2 {
        return Err(ExtractError::TooFewSegments);
    }
    let mids: Vec<Point2<T>> = segs.segments.iter().map(Segment::midpoint).collect();
    let halves: Vec<T> = segs
        .segments
        .iter()
        .map(|s| s.length() * T::half())
        .collect();

    // The map starts at the vehicle: drop midpoints behind the nearest one.
    let mut nearest = 0usize;
    let mut nearest_d = T::infinity();
    for (i, m) in mids.iter().enumerate() {
        let d = m.norm();
        if d < nearest_d {
            nearest_d = d;
            nearest = i;
        }
    }
    let mids = &mids[nearest..];
    let halves = &halves[nearest..];
    let kinds: Vec<SegmentKind> = segs.segments[nearest..].iter().map(|s| s.kind).collect();
    if mids.len() < 2 {
        return Err(ExtractError::TooFewSegments);
    }

    let raw_s = cumulative_arc_lengths(mids);
    let total = *raw_s.last().unwrap();
    if total <= T::zero() {
        return Err(ExtractError::TooFewSegments);
    }
    let matched_arc_raw = kinds
        .iter()
        .zip(&raw_s)
        .filter(|(k, _)| **k == SegmentKind::Matched)
        .map(|(_, &s)| s)
        .fold(T::zero(), T::max);

    // Equidistant resampling (even division keeps every interval equal).
    let n = (total / spacing).round().to_usize().unwrap_or(1).max(1);
    let step = total / T::from_usize(n).unwrap();
    let sample = |target: T, values: &dyn Fn(usize) -> T| -> T {
        // Interpolate a per-point quantity at arc position `target`.
        let mut i = 0usize;
        while i + 2 < raw_s.len() && raw_s[i + 1] < target {
            i += 1;
        }
        let span = raw_s[i + 1] - raw_s[i];
        let t = if span > T::zero() {
            ((target - raw_s[i]) / span).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        values(i) + (values(i + 1) - values(i)) * t
    };

    let mut points = Vec::with_capacity(n + 1);
    let mut widths = Vec::with_capacity(n + 1);
    let mut s_out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let target = step * T::from_usize(k).unwrap();
        let x = sample(target, &|i| mids[i].x);
        let y = sample(target, &|i| mids[i].y);
        points.push(Point2::new(x, y));
        widths.push(sample(target, &|i| halves[i]));
        s_out.push(target);
    }
    let normals = line_normals(&points);
    let all_projected = segs.matched_count() == 0;

    Ok(LocalMap {
        widths_left: widths.clone(),
        widths_right: widths,
        normals,
        s: s_out,
        points,
        matched_arc: matched_arc_raw.min(total),
        all_projected,
    })
}

/// Full extraction pipeline for one scan.
pub fn extract<T: Real>(
    scan: &LidarScan<T>,
    cfg: &ExtractionConfig<T>,
) -> Result<LocalMap<T>, ExtractError> {
    let points = scan_to_points(scan);
    if points.is_empty() {
        return Err(ExtractError::EmptyScan);
    }
    let pair = identify_boundaries(&points, cfg.gap_threshold)?;
    let pair = BoundaryPair {
        long_line: resample_line(&pair.long_line, cfg.spacing)?,
        short_line: resample_line(&pair.short_line, cfg.spacing)?,
    };
    let segments = match_segments(&pair, cfg.w_max, cfg.w_track);
    build_local_map(&segments, cfg.spacing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose;
    use crate::track::{generate_track, scan, TrackSpec};

    fn corridor_map() -> crate::track::TrackMap<f64> {
        let (map, _) = generate_track(
            &TrackSpec::Corridor {
                length: 20.0,
                width: 2.0,
            },
            0.05,
        )
        .unwrap();
        map
    }

    #[test]
    fn scan_points_land_on_beam_directions() {
        // fov 2π over 4 beams: bearings -π, -π/2, 0, π/2.
        let s = LidarScan::new(vec![30.0, 30.0, 4.0, 2.0], std::f64::consts::TAU, 30.0);
        let pts = scan_to_points(&s);
        assert_eq!(pts.len(), 2);
        assert!(pts[0].dist(Point2::new(4.0, 0.0)) < 1e-12);
        assert!(pts[1].dist(Point2::new(0.0, 2.0)) < 1e-12);
    }

    #[test]
    fn all_max_range_scan_is_empty() {
        let s = LidarScan::new(vec![10.0; 16], 4.7, 10.0);
        assert!(scan_to_points(&s).is_empty());
    }

    #[test]
    fn corridor_scan_splits_into_two_near_equal_boundaries() {
        let map = corridor_map();
        let pose = Pose::new(10.0, 0.0, 0.0);
        let s = scan(&map, pose, 1080, 4.7, 30.0).unwrap();
        let pts = scan_to_points(&s);
        let pair = identify_boundaries(&pts, 0.8).unwrap();
        let ll = polyline_length(&pair.long_line);
        let ls = polyline_length(&pair.short_line);
        assert!(ll >= ls);
        assert!(ll - ls <= 0.2 + 0.1, "lengths {ll} vs {ls}");
        // Both lines run forward.
        assert!(pair.long_line.last().unwrap().x > pair.long_line[0].x);
        assert!(pair.short_line.last().unwrap().x > pair.short_line[0].x);
    }

    #[test]
    fn exact_tie_assigns_left_line_as_long() {
        let pts = vec![
            Point2::new(0.0, -1.0),
            Point2::new(0.5, -1.0),
            Point2::new(1.0, -1.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.5, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let pair = identify_boundaries(&pts, 0.8).unwrap();
        assert!(pair.long_line[0].y > 0.0, "left line should be long");
        // Orientation: left line reversed into forward order.
        assert!(pair.long_line.last().unwrap().x > pair.long_line[0].x);
    }

    #[test]
    fn corner_scan_makes_outer_boundary_long() {
        let (map, _) = generate_track(
            &TrackSpec::Annulus {
                radius: 5.0,
                width: 2.0,
            },
            0.05,
        )
        .unwrap();
        // On the centreline at angle 0, heading counter-clockwise (a left turn).
        let pose = Pose::new(5.0, 0.0, std::f64::consts::FRAC_PI_2);
        let s = scan(&map, pose, 1080, 4.7, 30.0).unwrap();
        let pts = scan_to_points(&s);
        let pair = identify_boundaries(&pts, 0.8).unwrap();
        let world = |p: Point2<f64>| pose.body_to_world(p);
        let mean_r = |line: &[Point2<f64>]| {
            line.iter().map(|&p| world(p).norm()).sum::<f64>() / line.len() as f64
        };
        assert!(
            mean_r(&pair.long_line) > 5.0 && mean_r(&pair.short_line) < 5.0,
            "outer wall must be the long boundary"
        );
    }

    #[test]
    fn single_wall_fails_extraction() {
        let s = LidarScan::new(
            vec![30.0, 1.5, 1.5, 1.5, 1.5, 30.0, 30.0, 30.0],
            std::f64::consts::PI,
            30.0,
        );
        let pts = scan_to_points(&s);
        assert_eq!(pts.len(), 4);
        assert_eq!(
            identify_boundaries(&pts, 0.8).unwrap_err(),
            ExtractError::SingleBoundary
        );
    }

    #[test]
    fn resample_unit_segment() {
        let line = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)];
        let out = resample_line(&line, 0.25).unwrap();
        assert_eq!(out.len(), 5);
        for (i, p) in out.iter().enumerate() {
            assert!((p.x - 0.25 * i as f64).abs() < 1e-12);
            assert!(p.y.abs() < 1e-12);
        }
    }

    #[test]
    fn resample_closed_square_repeats_endpoint() {
        let line = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.0, 0.0),
        ];
        let out = resample_line(&line, 0.5).unwrap();
        assert_eq!(out.len(), 9);
        assert!(out[0].dist(*out.last().unwrap()) < 1e-12);
    }

    #[test]
    fn resample_shorter_than_spacing_is_degenerate() {
        let line = vec![Point2::new(0.0, 0.0), Point2::new(0.1, 0.0)];
        assert_eq!(
            resample_line(&line, 0.25).unwrap_err(),
            ExtractError::DegenerateLine
        );
    }

    fn straight_line(y: f64, x0: f64, x1: f64, step: f64) -> Vec<Point2<f64>> {
        let n = ((x1 - x0) / step).round() as usize;
        (0..=n)
            .map(|i| Point2::new(x0 + step * i as f64, y))
            .collect()
    }

    #[test]
    fn parallel_lines_match_index_for_index() {
        let pair = BoundaryPair {
            long_line: straight_line(0.75, 0.0, 2.0, 0.2),
            short_line: straight_line(-0.75, 0.0, 2.0, 0.2),
        };
        let segs = match_segments(&pair, 2.5, 1.6);
        assert_eq!(segs.segments.len(), pair.long_line.len());
        for (i, seg) in segs.segments.iter().enumerate() {
            assert_eq!(seg.kind, SegmentKind::Matched);
            assert!((seg.length() - 1.5).abs() < 1e-12);
            assert!(seg.short_pt.dist(pair.short_line[i]) < 1e-12, "k_{i} != {i}");
        }
    }

    #[test]
    fn long_overhang_is_projected_at_exact_track_width() {
        let pair = BoundaryPair {
            long_line: straight_line(0.0, 0.0, 10.0, 0.2),
            short_line: straight_line(-1.5, 0.0, 5.0, 0.2),
        };
        let segs = match_segments(&pair, 2.5, 1.6);
        let projected: Vec<_> = segs
            .segments
            .iter()
            .filter(|s| s.kind == SegmentKind::Projected)
            .collect();
        assert!(!projected.is_empty());
        for seg in &projected {
            assert!((seg.length() - 1.6).abs() < 1e-12);
            assert!(seg.short_pt.y < 0.0, "projection must aim at the short side");
        }
        // Matching stops where the distance to the short end reaches w_max:
        // sqrt((x-5)^2 + 1.5^2) >= 2.5 at x = 7.0.
        let first_projected = segs
            .segments
            .iter()
            .position(|s| s.kind == SegmentKind::Projected)
            .unwrap();
        assert!((segs.segments[first_projected].long_pt.x - 7.0).abs() < 0.2 + 1e-9);
        // Everything from the break to the end of the long line is projected.
        assert_eq!(projected.len(), pair.long_line.len() - first_projected);
    }

    #[test]
    fn corridor_segments_give_axis_centreline() {
        let pair = BoundaryPair {
            long_line: straight_line(1.0, 0.0, 4.0, 0.2),
            short_line: straight_line(-1.0, 0.0, 4.0, 0.2),
        };
        let segs = match_segments(&pair, 2.5, 1.6);
        let lm = build_local_map(&segs, 0.2).unwrap();
        for (i, p) in lm.points.iter().enumerate() {
            assert!(p.y.abs() < 1e-9);
            assert!((lm.widths_left[i] - 1.0).abs() < 1e-9);
            assert!((lm.widths_right[i] - 1.0).abs() < 1e-9);
        }
        // Normals unit and perpendicular to the tangent.
        for w in lm.points.windows(2).zip(lm.normals.windows(2)) {
            let t = (w.0[1] - w.0[0]).normalized().unwrap();
            assert!((w.1[0].norm() - 1.0).abs() < 1e-9);
            assert!(t.dot(w.1[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn two_identical_segments_give_midline() {
        let segs: SegmentList<f64> = SegmentList {
            segments: vec![
                Segment {
                    long_pt: Point2::new(0.0, 0.25),
                    short_pt: Point2::new(0.0, -0.25),
                    kind: SegmentKind::Matched,
                },
                Segment {
                    long_pt: Point2::new(1.0, 0.25),
                    short_pt: Point2::new(1.0, -0.25),
                    kind: SegmentKind::Matched,
                },
            ],
        };
        let lm = build_local_map(&segs, 0.2).unwrap();
        for (i, p) in lm.points.iter().enumerate() {
            assert!(p.y.abs() < 1e-12);
            assert!((lm.widths_left[i] - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn corridor_map_spans_from_vehicle_to_visible_end() {
        let map = corridor_map();
        let pose = Pose::new(1.0, 0.0, 0.0); // 1 m past the corridor start
        // Beam count chosen so consecutive wall returns stay within the gap
        // threshold out to the corridor end: spacing ~ x^2 * fov / n <= 0.8
        // needs n >= 20^2 * 4.7 / 0.8 ~ 2350.
        let s = scan(&map, pose, 4096, 4.7, 30.0).unwrap();
        let lm = extract(&s, &ExtractionConfig::default()).unwrap();
        let arc = lm.total_arc();
        assert!(
            (arc - 19.0).abs() <= 2.0 * 0.2 + 0.1,
            "visible arc {arc} should be about 19 m"
        );
        assert!(arc <= 30.0 + 1.6, "arc bounded by sensor range");
    }

    #[test]
    fn coarse_scan_is_limited_by_the_gap_threshold() {
        let map = corridor_map();
        let pose = Pose::new(1.0, 0.0, 0.0);
        let (n_beams, fov, gap) = (1080usize, 4.7, 0.8);
        let s = scan(&map, pose, n_beams, fov, 30.0).unwrap();
        let lm = extract(&s, &ExtractionConfig::default()).unwrap();
        // Along a wall 1 m to the side, consecutive returns sit about
        // x^2 * (fov/n) apart, so the boundary run splits near
        // x* = sqrt(gap * n / fov).
        let x_split = (gap * n_beams as f64 / fov).sqrt();
        let arc = lm.total_arc();
        assert!(
            (arc - x_split).abs() < 1.5,
            "gap-limited arc {arc}, predicted split at {x_split}"
        );
    }

    #[test]
    fn corridor_extraction_matches_analytic_centreline() {
        let map = corridor_map();
        let pose = Pose::new(2.0, 0.0, 0.0);
        let s = scan(&map, pose, 1080, 4.7, 30.0).unwrap();
        let lm = extract(&s, &ExtractionConfig::default()).unwrap();
        assert!(!lm.all_projected);
        for (i, p) in lm.points.iter().enumerate() {
            // Vehicle frame = world frame shifted by 2 m here.
            assert!(
                p.y.abs() < 2.0 * map.resolution,
                "lateral error at {i}: {}",
                p.y
            );
        }
        // Width about 1 m each side where both walls are visible.
        let mid = lm.len() / 2;
        assert!((lm.widths_left[mid] - 1.0).abs() < 2.0 * map.resolution + 0.1);
    }

    #[test]
    fn extraction_is_a_pure_function() {
        let map = corridor_map();
        let pose = Pose::new(3.0, 0.2, 0.05);
        let s = scan(&map, pose, 1080, 4.7, 30.0).unwrap();
        let a = extract(&s, &ExtractionConfig::default()).unwrap();
        let b = extract(&s, &ExtractionConfig::default()).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn empty_scan_is_an_error() {
        let s = LidarScan::new(vec![30.0; 32], 4.7, 30.0);
        assert_eq!(
            extract(&s, &ExtractionConfig::default()).unwrap_err(),
            ExtractError::EmptyScan
        );
    }

    #[test]
    fn annulus_blind_corner_projects_remaining_segments() {
        let (map, _) = generate_track(
            &TrackSpec::Annulus {
                radius: 5.0,
                width: 2.0,
            },
            0.05,
        )
        .unwrap();
        let pose = Pose::new(5.0, 0.0, std::f64::consts::FRAC_PI_2);
        let s = scan(&map, pose, 1080, 4.7, 30.0).unwrap();
        let pts = scan_to_points(&s);
        let pair = identify_boundaries(&pts, 0.8).unwrap();
        let pair = BoundaryPair {
            long_line: resample_line(&pair.long_line, 0.2).unwrap(),
            short_line: resample_line(&pair.short_line, 0.2).unwrap(),
        };
        let segs = match_segments(&pair, 2.5, 1.6);
        let first_projected = segs
            .segments
            .iter()
            .position(|s| s.kind == SegmentKind::Projected);
        // The inner wall occludes itself, so the outer line outlives it.
        let fp = first_projected.expect("corner should produce projected segments");
        assert!(segs.segments[..fp]
            .iter()
            .all(|s| s.kind == SegmentKind::Matched));
        assert_eq!(segs.segments.len() - fp, pair.long_line.len() - fp);
        let lm = build_local_map(&segs, 0.2).unwrap();
        assert!(lm.matched_arc > 0.0);
        assert!(lm.projected_arc() > 0.0);
        // Extracted points stay inside the track.
        for p in &lm.points {
            let world = pose.body_to_world(*p);
            assert!(map.is_free_world(world), "point {world:?} in wall");
        }
    }
}
