//! Map file IO: 8-bit grayscale image (PGM or PNG) plus a text sidecar.
//!
//! The sidecar `<stem>.meta` holds `key value` lines with the keys
//! `resolution`, `origin_x`, `origin_y`, `start_x`, `start_y`,
//! `start_heading` and `occupied_thresh`. A `<stem>.centreline.csv` file is
//! picked up when present so racing maps can carry their centreline.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use image::{GrayImage, ImageReader};

use super::{Centreline, TrackError, TrackMap};
use crate::geom::{Point2, Pose};
use crate::num::Real;

/// Default occupancy threshold (fraction of full-scale pixel value).
pub const DEFAULT_OCCUPIED_THRESH: f64 = 0.45;

fn sidecar_path(image_path: &Path) -> PathBuf {
    image_path.with_extension("meta")
}

fn centreline_path(image_path: &Path) -> PathBuf {
    image_path.with_extension("centreline.csv")
}

impl<T: Real> TrackMap<T> {
    /// Writes the map image, sidecar and (when present) centreline CSV.
    pub fn save(&self, image_path: &Path) -> Result<(), TrackError> {
        let w = self.grid_width() as u32;
        let h = self.grid_height() as u32;
        let img = GrayImage::from_fn(w, h, |x, y| {
            let iy = (h - 1 - y) as usize; // image row 0 is the top of the map
            if self.is_occupied_cell(x as usize, iy) {
                image::Luma([0u8])
            } else {
                image::Luma([255u8])
            }
        });
        img.save(image_path)
            .map_err(|e| TrackError::MalformedImage(e.to_string()))?;

        let mut meta = String::new();
        meta.push_str(&format!("name {}\n", self.name));
        meta.push_str(&format!("resolution {}\n", self.resolution));
        meta.push_str(&format!("origin_x {}\n", self.origin.x));
        meta.push_str(&format!("origin_y {}\n", self.origin.y));
        meta.push_str(&format!("start_x {}\n", self.start_pose.x));
        meta.push_str(&format!("start_y {}\n", self.start_pose.y));
        meta.push_str(&format!("start_heading {}\n", self.start_pose.heading));
        meta.push_str(&format!("occupied_thresh {DEFAULT_OCCUPIED_THRESH}\n"));
        meta.push_str(&format!(
            "start_line {} {} {} {}\n",
            self.start_line.0.x, self.start_line.0.y, self.start_line.1.x, self.start_line.1.y
        ));
        std::fs::write(sidecar_path(image_path), meta)
            .map_err(|e| TrackError::MissingFile(e.to_string()))?;

        if let Some(c) = &self.centreline {
            std::fs::write(centreline_path(image_path), c.to_csv())
                .map_err(|e| TrackError::MissingFile(e.to_string()))?;
        }
        Ok(())
    }

    /// Loads a map image plus sidecar, validating all track invariants.
    pub fn load(image_path: &Path) -> Result<Self, TrackError> {
        let reader = ImageReader::open(image_path)
            .map_err(|_| TrackError::MissingFile(image_path.display().to_string()))?;
        let img = reader
            .decode()
            .map_err(|e| TrackError::MalformedImage(e.to_string()))?
            .to_luma8();
        let (w, h) = (img.width() as usize, img.height() as usize);

        let meta_path = sidecar_path(image_path);
        let meta_text = std::fs::read_to_string(&meta_path)
            .map_err(|_| TrackError::MissingFile(meta_path.display().to_string()))?;
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for line in meta_text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(2, [' ', '=', ':']);
            let key = parts.next().unwrap_or_default().trim();
            let value = parts.next().unwrap_or_default().trim();
            if key.is_empty() || value.is_empty() {
                return Err(TrackError::MalformedMetadata(format!("bad line '{line}'")));
            }
            kv.insert(key.to_string(), value.to_string());
        }
        let get = |key: &str| -> Result<f64, TrackError> {
            kv.get(key)
                .ok_or_else(|| TrackError::MalformedMetadata(format!("missing key '{key}'")))?
                .parse::<f64>()
                .map_err(|_| TrackError::MalformedMetadata(format!("key '{key}' is not a number")))
        };

        let resolution = get("resolution")?;
        if resolution <= 0.0 {
            return Err(TrackError::MalformedMetadata(
                "resolution must be positive".into(),
            ));
        }
        let origin = Point2::new(T::c(get("origin_x")?), T::c(get("origin_y")?));
        let start_pose = Pose::new(
            T::c(get("start_x")?),
            T::c(get("start_y")?),
            T::c(get("start_heading")?),
        );
        let thresh = kv
            .get("occupied_thresh")
            .map(|v| {
                v.parse::<f64>().map_err(|_| {
                    TrackError::MalformedMetadata("occupied_thresh is not a number".into())
                })
            })
            .transpose()?
            .unwrap_or(DEFAULT_OCCUPIED_THRESH);

        let mut grid = vec![false; w * h];
        for (x, y, pix) in img.enumerate_pixels() {
            let iy = h - 1 - y as usize;
            grid[iy * w + x as usize] = (pix.0[0] as f64 / 255.0) < thresh;
        }

        let name = kv
            .get("name")
            .cloned()
            .unwrap_or_else(|| {
                image_path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "track".into())
            });

        let centreline = match std::fs::read_to_string(centreline_path(image_path)) {
            Ok(text) => Some(Centreline::from_csv(&text)?),
            Err(_) => None,
        };

        // Start line: from the sidecar, or derived by probing across the track.
        let explicit_line = kv.get("start_line").map(|v| {
            let nums: Vec<f64> = v
                .split_whitespace()
                .filter_map(|t| t.parse::<f64>().ok())
                .collect();
            if nums.len() == 4 {
                Ok((
                    Point2::new(T::c(nums[0]), T::c(nums[1])),
                    Point2::new(T::c(nums[2]), T::c(nums[3])),
                ))
            } else {
                Err(TrackError::MalformedMetadata(
                    "start_line needs four numbers".into(),
                ))
            }
        });
        let placeholder = (start_pose.position(), start_pose.position());
        let mut map = TrackMap::from_grid(
            grid,
            w,
            h,
            T::c(resolution),
            origin,
            start_pose,
            placeholder,
            name,
            centreline,
        )?;
        map.start_line = match explicit_line {
            Some(line) => line?,
            None => derive_start_line(&map)?,
        };
        Ok(map)
    }
}

/// Probes perpendicular to the start heading and extends the line one cell
/// past the walls (or to the grid edge), so endpoints sit in occupied or
/// boundary cells on opposite sides of the track.
fn derive_start_line<T: Real>(map: &TrackMap<T>) -> Result<(Point2<T>, Point2<T>), TrackError> {
    let pose = map.start_pose;
    let (lo, hi) = map.extents();
    let reach = (hi - lo).norm();
    let left = super::raycast::cast_ray(map, pose, pose.heading + T::pi() * T::half(), reach)
        .map_err(|_| TrackError::StartPoseInWall)?;
    let right = super::raycast::cast_ray(map, pose, pose.heading - T::pi() * T::half(), reach)
        .map_err(|_| TrackError::StartPoseInWall)?;
    let n = pose.direction().perp();
    let pad = map.resolution * T::two();
    Ok((
        pose.position() + n.scale(left + pad),
        pose.position() - n.scale(right + pad),
    ))
}
