//! Mapless racing workbench.
//!
//! The crate covers the full pipeline used by the `lmrace` CLI:
//!
//! * [`track`] — occupancy-grid race tracks: file IO, synthetic generation,
//!   ray casting and LiDAR scan synthesis.
//! * [`localmap`] — extraction of a drivable local map (centreline, widths,
//!   normals) from a single LiDAR scan.
//! * [`trajopt`] — minimum-curvature path optimisation and forward/backward
//!   speed profiling over either a global centreline or a local map.
//! * [`control`] — pure pursuit tracking and the Follow-The-Gap baseline.
//! * [`mpcc`] — model predictive contouring control over a reference line.
//! * [`sim`] — deterministic closed-loop simulation with lap timing,
//!   collision detection and trace recording.
//!
//! All numeric code is generic over the scalar type through [`num::Real`]
//! (implemented for `f32` and `f64`). Public structs default their scalar
//! parameter to `f64`, so `TrackMap`, `LocalMap`, `Trajectory` etc. name the
//! double-precision instantiations used by the simulator and CLI.

pub mod config;
pub mod control;
pub mod geom;
pub mod lidar;
pub mod linalg;
pub mod localmap;
pub mod mpcc;
pub mod num;
pub mod qp;
pub mod refline;
pub mod sim;
pub mod track;
pub mod trajopt;
pub mod util;
pub mod vehicle;

