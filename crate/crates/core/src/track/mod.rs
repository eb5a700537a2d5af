//! Occupancy-grid track model: map files, synthetic generation and
//! geometric queries.

mod generate;
mod io;
mod raycast;

pub use generate::{generate_track, resample_uniform, TrackSpec};
pub use raycast::{cast_ray, scan};

use std::collections::VecDeque;

use crate::geom::{cumulative_arc_lengths, normalize_angle, Point2, Pose};
use crate::num::Real;

#[derive(Debug, thiserror::Error)]
pub enum TrackError {
    #[error("map file not found or unreadable: {0}")]
    MissingFile(String),
    #[error("malformed map metadata: {0}")]
    MalformedMetadata(String),
    #[error("malformed map image: {0}")]
    MalformedImage(String),
    #[error("free space is not a single connected region")]
    DisconnectedFreeSpace,
    #[error("start pose lies in occupied space")]
    StartPoseInWall,
    #[error("start line does not span the track")]
    BadStartLine,
    #[error("invalid track parameters: {0}")]
    InvalidSpec(String),
    #[error("generated spline self-intersects")]
    SelfIntersectingSpline,
    #[error("track width {width} is below twice the resolution {resolution}")]
    WidthBelowResolution { width: f64, resolution: f64 },
    #[error("query pose lies in occupied space")]
    PoseInWall,
}

/// Ordered centreline with per-point track widths.
///
/// For `closed` lines the first point is not repeated; the wrap from the last
/// point back to the first is implied.
#[derive(Debug, Clone, PartialEq)]
pub struct Centreline<T = f64> {
    pub points: Vec<Point2<T>>,
    pub widths_left: Vec<T>,
    pub widths_right: Vec<T>,
    pub closed: bool,
}

impl<T: Real> Centreline<T> {
    /// Cumulative arc length per point (zero at the first point).
    pub fn arc_lengths(&self) -> Vec<T> {
        cumulative_arc_lengths(&self.points)
    }

    /// Total length, including the closing segment for closed lines.
    pub fn length(&self) -> T {
        let open = self
            .points
            .windows(2)
            .fold(T::zero(), |acc, w| acc + w[0].dist(w[1]));
        if self.closed && self.points.len() > 1 {
            open + self.points[self.points.len() - 1].dist(self.points[0])
        } else {
            open
        }
    }

    /// Serialises as CSV (`x,y,w_left,w_right` with a leading `# closed=` line).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# closed={}\n", self.closed));
        out.push_str("x,y,w_left,w_right\n");
        for i in 0..self.points.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.points[i].x, self.points[i].y, self.widths_left[i], self.widths_right[i]
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, TrackError> {
        let mut closed = false;
        let mut points = Vec::new();
        let mut widths_left = Vec::new();
        let mut widths_right = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("closed=") {
                    closed = v.trim() == "true";
                }
                continue;
            }
            if line.starts_with('x') {
                continue; // header
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(TrackError::MalformedMetadata(format!(
                    "centreline row has {} fields, expected 4",
                    fields.len()
                )));
            }
            let parse = |s: &str| -> Result<T, TrackError> {
                s.trim()
                    .parse::<f64>()
                    .map(T::c)
                    .map_err(|_| TrackError::MalformedMetadata(format!("bad number '{s}'")))
            };
            points.push(Point2::new(parse(fields[0])?, parse(fields[1])?));
            widths_left.push(parse(fields[2])?);
            widths_right.push(parse(fields[3])?);
        }
        Ok(Self {
            points,
            widths_left,
            widths_right,
            closed,
        })
    }
}

/// Occupancy-grid race track. `grid[iy * width + ix] == true` means the cell
/// is a wall. Cell `(0, 0)` has its lower-left corner at `origin`; world `y`
/// grows with `iy`.
///
/// Cells outside the grid are treated as free, which lets generated
/// corridors stay open-ended. Immutable after construction; all queries are
/// read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackMap<T = f64> {
    grid: Vec<bool>,
    width: usize,
    height: usize,
    pub resolution: T,
    pub origin: Point2<T>,
    pub start_pose: Pose<T>,
    pub start_line: (Point2<T>, Point2<T>),
    pub name: String,
    pub centreline: Option<Centreline<T>>,
}

impl<T: Real> TrackMap<T> {
    /// Builds a map from a raw grid and validates the track invariants.
    #[allow(clippy::too_many_arguments)]
    pub fn from_grid(
        grid: Vec<bool>,
        width: usize,
        height: usize,
        resolution: T,
        origin: Point2<T>,
        start_pose: Pose<T>,
        start_line: (Point2<T>, Point2<T>),
        name: impl Into<String>,
        centreline: Option<Centreline<T>>,
    ) -> Result<Self, TrackError> {
        if resolution <= T::zero() {
            return Err(TrackError::MalformedMetadata(
                "resolution must be positive".into(),
            ));
        }
        if width == 0 || height == 0 || grid.len() != width * height {
            return Err(TrackError::MalformedImage(format!(
                "grid size {}x{} does not match buffer length {}",
                width,
                height,
                grid.len()
            )));
        }
        let map = Self {
            grid,
            width,
            height,
            resolution,
            origin,
            start_pose: Pose::new(start_pose.x, start_pose.y, normalize_angle(start_pose.heading)),
            start_line,
            name: name.into(),
            centreline,
        };
        map.validate()?;
        Ok(map)
    }

    fn validate(&self) -> Result<(), TrackError> {
        if !self.is_free_world(self.start_pose.position()) {
            return Err(TrackError::StartPoseInWall);
        }
        self.check_connectivity()?;
        Ok(())
    }

    /// Flood fill from the start pose: every free cell must be reachable.
    fn check_connectivity(&self) -> Result<(), TrackError> {
        let total_free = self.grid.iter().filter(|&&o| !o).count();
        if total_free == 0 {
            return Err(TrackError::DisconnectedFreeSpace);
        }
        let start = self
            .cell_of(self.start_pose.position())
            .ok_or(TrackError::StartPoseInWall)?;
        let mut seen = vec![false; self.grid.len()];
        let mut queue = VecDeque::new();
        let idx = start.1 * self.width + start.0;
        seen[idx] = true;
        queue.push_back(start);
        let mut reached = 1usize;
        while let Some((ix, iy)) = queue.pop_front() {
            let neighbours = [
                (ix.wrapping_sub(1), iy),
                (ix + 1, iy),
                (ix, iy.wrapping_sub(1)),
                (ix, iy + 1),
            ];
            for (nx, ny) in neighbours {
                if nx >= self.width || ny >= self.height {
                    continue;
                }
                let ni = ny * self.width + nx;
                if !seen[ni] && !self.grid[ni] {
                    seen[ni] = true;
                    reached += 1;
                    queue.push_back((nx, ny));
                }
            }
        }
        if reached != total_free {
            return Err(TrackError::DisconnectedFreeSpace);
        }
        Ok(())
    }

    pub fn grid_width(&self) -> usize {
        self.width
    }

    pub fn grid_height(&self) -> usize {
        self.height
    }

    pub fn free_cell_count(&self) -> usize {
        self.grid.iter().filter(|&&o| !o).count()
    }

    pub fn raw_grid(&self) -> &[bool] {
        &self.grid
    }

    /// World extent covered by the grid: `(min, max)` corners.
    pub fn extents(&self) -> (Point2<T>, Point2<T>) {
        let max = Point2::new(
            self.origin.x + T::from_usize(self.width).unwrap() * self.resolution,
            self.origin.y + T::from_usize(self.height).unwrap() * self.resolution,
        );
        (self.origin, max)
    }

    /// Grid cell containing a world point, if inside the grid.
    pub fn cell_of(&self, p: Point2<T>) -> Option<(usize, usize)> {
        let fx = ((p.x - self.origin.x) / self.resolution).floor();
        let fy = ((p.y - self.origin.y) / self.resolution).floor();
        if fx < T::zero() || fy < T::zero() {
            return None;
        }
        let ix = fx.to_usize()?;
        let iy = fy.to_usize()?;
        if ix < self.width && iy < self.height {
            Some((ix, iy))
        } else {
            None
        }
    }

    pub fn is_occupied_cell(&self, ix: usize, iy: usize) -> bool {
        ix < self.width && iy < self.height && self.grid[iy * self.width + ix]
    }

    /// Occupancy at a world point; outside the grid counts as free.
    pub fn is_occupied_world(&self, p: Point2<T>) -> bool {
        match self.cell_of(p) {
            Some((ix, iy)) => self.grid[iy * self.width + ix],
            None => false,
        }
    }

    pub fn is_free_world(&self, p: Point2<T>) -> bool {
        !self.is_occupied_world(p)
    }

    /// True when a disc footprint of `radius` centred at `p` overlaps any
    /// occupied cell.
    pub fn footprint_collides(&self, p: Point2<T>, radius: T) -> bool {
        let r_cells = (radius / self.resolution).ceil().to_isize().unwrap_or(1) + 1;
        let centre = (
            ((p.x - self.origin.x) / self.resolution).floor().to_isize(),
            ((p.y - self.origin.y) / self.resolution).floor().to_isize(),
        );
        let (Some(cx), Some(cy)) = centre else {
            return false;
        };
        let half = T::half();
        for dy in -r_cells..=r_cells {
            for dx in -r_cells..=r_cells {
                let ix = cx + dx;
                let iy = cy + dy;
                if ix < 0 || iy < 0 {
                    continue;
                }
                let (ix, iy) = (ix as usize, iy as usize);
                if !self.is_occupied_cell(ix, iy) {
                    continue;
                }
                // Distance from p to the closest point of the cell.
                let cx_w = self.origin.x + (T::from_usize(ix).unwrap() + half) * self.resolution;
                let cy_w = self.origin.y + (T::from_usize(iy).unwrap() + half) * self.resolution;
                let hx = (p.x - cx_w).abs() - self.resolution * half;
                let hy = (p.y - cy_w).abs() - self.resolution * half;
                let dx_c = hx.max(T::zero());
                let dy_c = hy.max(T::zero());
                if (dx_c * dx_c + dy_c * dy_c).sqrt() <= radius {
                    return true;
                }
            }
        }
        false
    }

    /// World centre of a grid cell.
    pub fn cell_centre(&self, ix: usize, iy: usize) -> Point2<T> {
        Point2::new(
            self.origin.x + (T::from_usize(ix).unwrap() + T::half()) * self.resolution,
            self.origin.y + (T::from_usize(iy).unwrap() + T::half()) * self.resolution,
        )
    }
}
