//! Brute-force verification oracles for the path optimiser.
//!
//! These evaluate the offset-path curvature objective directly from the
//! geometry and search offset grids exhaustively (dynamic programming over
//! per-point offset levels). They share no code with the QP solve path, so
//! tests can pit the two against each other.

use crate::geom::normalize_angle;
use crate::num::Real;

use super::mincurv::PathDomain;

/// Σ κ² of the path `c_i + α_i n_i`, with κ taken as heading change per
/// joint divided by the mean adjacent segment length.
pub fn offset_path_objective<T: Real>(domain: &PathDomain<T>, alpha: &[T]) -> T {
    let n = domain.points.len();
    assert_eq!(alpha.len(), n);
    let p = |i: usize| domain.points[i] + domain.normals[i].scale(alpha[i]);
    let seg_count = if domain.closed { n } else { n - 1 };
    let psi_len = |i: usize| {
        let d = p((i + 1) % n) - p(i % n);
        (d.y.atan2(d.x), d.norm())
    };
    let joints: Vec<usize> = if domain.closed {
        (0..n).collect()
    } else {
        (1..n - 1).collect()
    };
    let mut total = T::zero();
    for &j in &joints {
        let s_prev = (j + seg_count - 1) % seg_count;
        let s_next = j % seg_count;
        let (psi_p, len_p) = psi_len(s_prev);
        let (psi_n, len_n) = psi_len(s_next);
        let h = (len_p + len_n) * T::half();
        let k = normalize_angle(psi_n - psi_p) / h;
        total = total + k * k;
    }
    total
}

fn bounds<T: Real>(domain: &PathDomain<T>, half_width_veh: T, i: usize) -> (T, T) {
    (
        -(domain.widths_right[i] - half_width_veh),
        domain.widths_left[i] - half_width_veh,
    )
}

/// Exhaustive search of an open instance over per-point offset grids via
/// dynamic programming (each joint couples three consecutive offsets).
///
/// `grids[i]` lists the candidate offsets for point `i`; infeasible levels
/// are skipped.
pub fn grid_search_open<T: Real>(
    domain: &PathDomain<T>,
    grids: &[Vec<T>],
    half_width_veh: T,
) -> (T, Vec<T>) {
    let n = domain.points.len();
    assert!(!domain.closed);
    assert_eq!(grids.len(), n);
    let feasible = |i: usize, a: T| {
        let (lo, hi) = bounds(domain, half_width_veh, i);
        a >= lo && a <= hi
    };
    // Joint cost as a function of three consecutive offsets, evaluated
    // directly from the geometry.
    let joint_cost = |j: usize, am: T, a0: T, ap: T| {
        let pm = domain.points[j - 1] + domain.normals[j - 1].scale(am);
        let p0 = domain.points[j] + domain.normals[j].scale(a0);
        let pp = domain.points[j + 1] + domain.normals[j + 1].scale(ap);
        let d0 = p0 - pm;
        let d1 = pp - p0;
        let h = (d0.norm() + d1.norm()) * T::half();
        let k = normalize_angle(d1.y.atan2(d1.x) - d0.y.atan2(d0.x)) / h;
        k * k
    };

    let g = |i: usize| grids[i].len();
    let idx = |i: usize, a: usize, b: usize| a * g(i + 1) + b;
    let inf = T::infinity();
    // best[(a_{j-1}, a_j)] = minimal cost of joints < j.
    let mut best = vec![inf; g(0) * g(1)];
    let mut back: Vec<Vec<usize>> = Vec::new();
    for (a0, &v0) in grids[0].iter().enumerate() {
        for (a1, &v1) in grids[1].iter().enumerate() {
            if feasible(0, v0) && feasible(1, v1) {
                best[idx(0, a0, a1)] = T::zero();
            }
        }
    }
    for j in 1..n - 1 {
        let mut next = vec![inf; g(j) * g(j + 1)];
        let mut back_j = vec![usize::MAX; g(j) * g(j + 1)];
        for (prev, &vp) in grids[j - 1].iter().enumerate() {
            for (cur, &vc) in grids[j].iter().enumerate() {
                let base = best[idx(j - 1, prev, cur)];
                if !base.is_finite() {
                    continue;
                }
                for (nxt, &vn) in grids[j + 1].iter().enumerate() {
                    if !feasible(j + 1, vn) {
                        continue;
                    }
                    let c = base + joint_cost(j, vp, vc, vn);
                    let slot = idx(j, cur, nxt);
                    if c < next[slot] {
                        next[slot] = c;
                        back_j[slot] = prev;
                    }
                }
            }
        }
        best = next;
        back.push(back_j);
    }

    // Recover the minimising offset sequence.
    let mut best_obj = inf;
    let (mut cur, mut nxt) = (0usize, 0usize);
    for a in 0..g(n - 2) {
        for b in 0..g(n - 1) {
            let v = best[idx(n - 2, a, b)];
            if v < best_obj {
                best_obj = v;
                cur = a;
                nxt = b;
            }
        }
    }
    let mut levels = vec![0usize; n];
    levels[n - 1] = nxt;
    levels[n - 2] = cur;
    for j in (1..n - 1).rev() {
        let prev = back[j - 1][idx(j, levels[j], levels[j + 1])];
        levels[j - 1] = prev;
    }
    let alpha: Vec<T> = levels
        .iter()
        .enumerate()
        .map(|(i, &l)| grids[i][l])
        .collect();
    (best_obj, alpha)
}

/// Multi-resolution exhaustive search: repeats [`grid_search_open`] with the
/// grid shrunk around the previous optimum.
pub fn refined_grid_search_open<T: Real>(
    domain: &PathDomain<T>,
    levels: usize,
    stages: usize,
    half_width_veh: T,
) -> (T, Vec<T>) {
    let n = domain.points.len();
    let make_grid = |centre: T, half_span: T, i: usize| -> Vec<T> {
        let (lo, hi) = bounds(domain, half_width_veh, i);
        (0..levels)
            .map(|k| {
                let t = T::from_usize(k).unwrap() / T::from_usize(levels - 1).unwrap();
                let v = centre - half_span + t * half_span * T::two();
                v.max(lo).min(hi)
            })
            .collect()
    };
    let mut centres: Vec<T> = vec![T::zero(); n];
    let mut span = (0..n)
        .map(|i| {
            let (lo, hi) = bounds(domain, half_width_veh, i);
            (hi - lo) * T::half()
        })
        .fold(T::zero(), T::max);
    let mut result = (T::infinity(), vec![T::zero(); n]);
    for _ in 0..stages {
        let grids: Vec<Vec<T>> = (0..n).map(|i| make_grid(centres[i], span, i)).collect();
        let (obj, alpha) = grid_search_open(domain, &grids, half_width_veh);
        if obj < result.0 {
            result = (obj, alpha.clone());
        }
        centres = alpha;
        span = span * T::two() / T::from_usize(levels - 1).unwrap();
    }
    result
}

/// Exhaustive ring search on a fixed grid: enumerates the first two offsets
/// and runs the open DP for the rest, closing the wrap joints by hand.
pub fn grid_search_ring<T: Real>(
    domain: &PathDomain<T>,
    grid: &[T],
    half_width_veh: T,
) -> (T, Vec<T>) {
    let n = domain.points.len();
    assert!(domain.closed);
    let feasible = |i: usize, a: T| {
        let (lo, hi) = bounds(domain, half_width_veh, i);
        a >= lo && a <= hi
    };
    let pt = |i: usize, a: T| domain.points[i] + domain.normals[i].scale(a);
    let joint_cost = |j: usize, am: T, a0: T, ap: T| {
        let pm = pt((j + n - 1) % n, am);
        let p0 = pt(j, a0);
        let pp = pt((j + 1) % n, ap);
        let d0 = p0 - pm;
        let d1 = pp - p0;
        let h = (d0.norm() + d1.norm()) * T::half();
        let k = normalize_angle(d1.y.atan2(d1.x) - d0.y.atan2(d0.x)) / h;
        k * k
    };
    let g = grid.len();
    let inf = T::infinity();
    let mut best_total = inf;
    let mut best_alpha = vec![T::zero(); n];

    for (i0, &v0) in grid.iter().enumerate() {
        if !feasible(0, v0) {
            continue;
        }
        for (i1, &v1) in grid.iter().enumerate() {
            if !feasible(1, v1) {
                continue;
            }
            // DP over joints 1..=n-2 with states (α_{j}, α_{j+1}).
            let mut best = vec![inf; g * g];
            let mut back: Vec<Vec<usize>> = Vec::new();
            best[i0 * g + i1] = T::zero();
            for j in 1..n - 1 {
                let mut next = vec![inf; g * g];
                let mut back_j = vec![usize::MAX; g * g];
                for prev in 0..g {
                    for cur in 0..g {
                        let base = best[prev * g + cur];
                        if !base.is_finite() {
                            continue;
                        }
                        for (nxt, &vn) in grid.iter().enumerate() {
                            if !feasible(j + 1, vn) {
                                continue;
                            }
                            let c = base + joint_cost(j, grid[prev], grid[cur], vn);
                            if c < next[cur * g + nxt] {
                                next[cur * g + nxt] = c;
                                back_j[cur * g + nxt] = prev;
                            }
                        }
                    }
                }
                best = next;
                back.push(back_j);
            }
            // Close the loop: joints n-1 (α_{n-2}, α_{n-1}, α_0) and 0
            // (α_{n-1}, α_0, α_1).
            for a in 0..g {
                for b in 0..g {
                    let base = best[a * g + b];
                    if !base.is_finite() {
                        continue;
                    }
                    let total = base
                        + joint_cost(n - 1, grid[a], grid[b], v0)
                        + joint_cost(0, grid[b], v0, v1);
                    if total < best_total {
                        best_total = total;
                        let mut levels = vec![0usize; n];
                        levels[0] = i0;
                        levels[1] = i1;
                        levels[n - 1] = b;
                        levels[n - 2] = a;
                        for j in (2..n - 1).rev() {
                            levels[j - 1] = back[j - 1][levels[j] * g + levels[j + 1]];
                        }
                        for (i, &l) in levels.iter().enumerate() {
                            best_alpha[i] = grid[l];
                        }
                    }
                }
            }
        }
    }
    (best_total, best_alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point2;

    #[test]
    fn straight_offsets_cost_nothing() {
        let points: Vec<Point2<f64>> = (0..8).map(|i| Point2::new(i as f64, 0.0)).collect();
        let d = PathDomain::with_derived_normals(points, vec![1.0; 8], vec![1.0; 8], false);
        let zero = vec![0.0; 8];
        assert!(offset_path_objective(&d, &zero) < 1e-18);
        // Constant offset keeps the path straight.
        let shifted = vec![0.5; 8];
        assert!(offset_path_objective(&d, &shifted) < 1e-18);
    }

    #[test]
    fn grid_search_finds_the_straight_path() {
        // Zig-zag centreline whose straightened version lies on the grid.
        let points: Vec<Point2<f64>> = (0..8)
            .map(|i| Point2::new(i as f64, if i % 2 == 0 { 0.1 } else { -0.1 }))
            .collect();
        let d = PathDomain::with_derived_normals(points, vec![1.0; 8], vec![1.0; 8], false);
        let grids: Vec<Vec<f64>> = (0..8)
            .map(|i| {
                vec![
                    -0.2,
                    -0.1,
                    0.0,
                    0.1,
                    0.2,
                    if i % 2 == 0 { -0.1 } else { 0.1 },
                ]
            })
            .collect();
        let (obj, alpha) = grid_search_open(&d, &grids, 0.0);
        // Normals are not exactly vertical on the zig-zag, so straightening
        // is approximate; still the search should come close to zero.
        assert!(obj < offset_path_objective(&d, &vec![0.0; 8]) * 0.2, "obj {obj}");
        assert_eq!(alpha.len(), 8);
    }

    #[test]
    fn ring_search_pushes_outwards() {
        let n = 12;
        let points: Vec<Point2<f64>> = (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                Point2::new(5.0 * a.cos(), 5.0 * a.sin())
            })
            .collect();
        let d = PathDomain::with_derived_normals(points, vec![1.0; n], vec![1.0; n], true);
        let grid = [-0.85, -0.4, 0.0, 0.4, 0.85];
        let (obj, alpha) = grid_search_ring(&d, &grid, 0.15);
        // Best ring is the widest one. Left-of-travel normals point inwards
        // on a counter-clockwise ring, so outward offsets are negative.
        for a in &alpha {
            assert!((a + 0.85).abs() < 1e-12, "offset {a}");
        }
        assert!(obj < offset_path_objective(&d, &vec![0.0; n]));
    }
}
