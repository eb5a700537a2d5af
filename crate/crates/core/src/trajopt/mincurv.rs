//! Minimum-curvature path optimisation.
//!
//! Decision variables are lateral offsets along the centreline normals,
//! `p_i = c_i + α_i n_i`. Curvature is discretised from the linearised
//! heading change of the offset path, giving a convex box-constrained QP in
//! one linearisation pass.

use crate::geom::{normalize_angle, Point2};
use crate::num::Real;
use crate::qp::{solve_box_qp, QpStatus};
use crate::linalg::Mat;

#[derive(Debug, thiserror::Error)]
pub enum PlanError {
    #[error("track narrower than the vehicle at point {index}")]
    InfeasibleWidths { index: usize },
    #[error("optimiser did not converge after {iterations} iterations (objective {objective})")]
    SolverFailure { iterations: usize, objective: f64 },
    #[error("degenerate planning input: {0}")]
    Degenerate(String),
}

/// Geometry the optimiser works on; widths are free distances each side of
/// the line, normals point to the left of travel.
#[derive(Debug, Clone)]
pub struct PathDomain<T = f64> {
    pub points: Vec<Point2<T>>,
    pub normals: Vec<Point2<T>>,
    pub widths_left: Vec<T>,
    pub widths_right: Vec<T>,
    pub closed: bool,
}

impl<T: Real> PathDomain<T> {
    /// Derives normals from the points when the caller has none.
    pub fn with_derived_normals(
        points: Vec<Point2<T>>,
        widths_left: Vec<T>,
        widths_right: Vec<T>,
        closed: bool,
    ) -> Self {
        let n = points.len();
        let mut normals = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = if closed {
                (points[(i + n - 1) % n], points[(i + 1) % n])
            } else {
                (points[i.saturating_sub(1)], points[(i + 1).min(n - 1)])
            };
            let t = (b - a)
                .normalized()
                .unwrap_or_else(|| Point2::new(T::one(), T::zero()));
            normals.push(t.perp());
        }
        Self {
            points,
            normals,
            widths_left,
            widths_right,
            closed,
        }
    }
}

/// Anchor for local plans: the path must start at the vehicle.
#[derive(Debug, Clone, Copy)]
pub struct Anchor<T = f64> {
    /// Vehicle's lateral offset from the first line point, along its normal.
    pub lateral_offset: T,
    /// Vehicle heading in the line's frame.
    pub heading: T,
}

#[derive(Debug, Clone)]
pub struct MinCurvPath<T = f64> {
    pub points: Vec<Point2<T>>,
    pub offsets: Vec<T>,
    /// Σ κ² of the optimised path (linearised model).
    pub objective: T,
    /// Σ κ² of the feasible baseline the solver started from.
    pub baseline_objective: T,
}

struct CurvatureModel<T> {
    /// Sparse rows: (joint index) -> entries [(column, coefficient)].
    rows: Vec<Vec<(usize, T)>>,
    kappa0: Vec<T>,
}

/// Curvature of the offset path `c_i + α_i n_i`, evaluated exactly:
/// heading change per joint over the mean adjacent segment length.
fn exact_objective<T: Real>(domain: &PathDomain<T>, alpha: &[T]) -> T {
    let n = domain.points.len();
    let p = |i: usize| domain.points[i] + domain.normals[i].scale(alpha[i]);
    let seg_count = if domain.closed { n } else { n - 1 };
    let joints: Vec<usize> = if domain.closed {
        (0..n).collect()
    } else {
        (1..n - 1).collect()
    };
    let mut total = T::zero();
    for &j in &joints {
        let s_prev = (j + seg_count - 1) % seg_count;
        let s_next = j % seg_count;
        let d0 = p((s_prev + 1) % n) - p(s_prev % n);
        let d1 = p((s_next + 1) % n) - p(s_next % n);
        let h = (d0.norm() + d1.norm()) * T::half();
        let k = normalize_angle(d1.y.atan2(d1.x) - d0.y.atan2(d0.x)) / h;
        total = total + k * k;
    }
    total
}

/// Linearised curvature `κ = K (α - α̂) + κ(α̂)` around the offsets `α̂`.
///
/// `κ_j = Δψ_j / h_j` is linearised in both the heading change and the mean
/// segment length: freezing `h` would make the model blind to the widening
/// of a constant-curvature arc, whose per-joint heading change is invariant.
fn curvature_model<T: Real>(domain: &PathDomain<T>, alpha_hat: &[T]) -> CurvatureModel<T> {
    let nrm = &domain.normals;
    let n = domain.points.len();
    let pts: Vec<Point2<T>> = (0..n)
        .map(|i| domain.points[i] + nrm[i].scale(alpha_hat[i]))
        .collect();
    let seg_count = if domain.closed { n } else { n - 1 };

    // Per-segment heading, length and their offset sensitivities.
    let mut psi = Vec::with_capacity(seg_count);
    let mut dpsi_start = Vec::with_capacity(seg_count); // ∂ψ/∂α_i
    let mut dpsi_end = Vec::with_capacity(seg_count); // ∂ψ/∂α_{i+1}
    let mut len = Vec::with_capacity(seg_count);
    let mut dlen_start = Vec::with_capacity(seg_count); // ∂|Δ|/∂α_i
    let mut dlen_end = Vec::with_capacity(seg_count); // ∂|Δ|/∂α_{i+1}
    for i in 0..seg_count {
        let d = pts[(i + 1) % n] - pts[i % n];
        let l2 = d.dot(d);
        let l = l2.sqrt();
        let t = d.scale(T::one() / l);
        psi.push(d.y.atan2(d.x));
        dpsi_start.push(-d.cross(nrm[i % n]) / l2);
        dpsi_end.push(d.cross(nrm[(i + 1) % n]) / l2);
        len.push(l);
        dlen_start.push(-t.dot(nrm[i % n]));
        dlen_end.push(t.dot(nrm[(i + 1) % n]));
    }

    // Joints between consecutive segments.
    let joints: Vec<usize> = if domain.closed {
        (0..n).collect()
    } else {
        (1..n - 1).collect()
    };
    let mut rows = Vec::with_capacity(joints.len());
    let mut kappa0 = Vec::with_capacity(joints.len());
    for &j in &joints {
        // Joint j sits between segment j-1 and segment j (wrapped).
        let s_prev = (j + seg_count - 1) % seg_count;
        let s_next = j % seg_count;
        let h = (len[s_prev] + len[s_next]) * T::half();
        let inv_h = T::one() / h;
        let k0 = normalize_angle(psi[s_next] - psi[s_prev]) * inv_h;
        let mut row: Vec<(usize, T)> = Vec::with_capacity(3);
        let push = |col: usize, v: T, row: &mut Vec<(usize, T)>| {
            if let Some(e) = row.iter_mut().find(|(c, _)| *c == col) {
                e.1 = e.1 + v;
            } else {
                row.push((col, v));
            }
        };
        // Heading part: ∂κ/∂α = ∂Δψ/∂α / h.
        push(s_next % n, dpsi_start[s_next] * inv_h, &mut row);
        push((s_next + 1) % n, dpsi_end[s_next] * inv_h, &mut row);
        push(s_prev % n, -dpsi_start[s_prev] * inv_h, &mut row);
        push((s_prev + 1) % n, -dpsi_end[s_prev] * inv_h, &mut row);
        // Length part: -κ̄/h · ∂h/∂α, with h the mean of the two segments.
        let w = -k0 * inv_h * T::half();
        push(s_prev % n, w * dlen_start[s_prev], &mut row);
        push((s_prev + 1) % n, w * dlen_end[s_prev], &mut row);
        push(s_next % n, w * dlen_start[s_next], &mut row);
        push((s_next + 1) % n, w * dlen_end[s_next], &mut row);
        // Rewrite into absolute offsets: κ ≈ (κ̂ - K α̂) + K α.
        let shift = row
            .iter()
            .fold(T::zero(), |acc, &(col, coef)| acc + coef * alpha_hat[col]);
        rows.push(row);
        kappa0.push(k0 - shift);
    }
    CurvatureModel { rows, kappa0 }
}

/// Optimises lateral offsets within the track bounds.
///
/// With an `anchor`, the first offset is fixed to the vehicle's lateral
/// position and the second is chosen so the initial heading matches; both are
/// eliminated from the QP rather than constrained.
pub fn min_curvature_path<T: Real>(
    domain: &PathDomain<T>,
    half_width_veh: T,
    anchor: Option<Anchor<T>>,
    tol: T,
    max_iter: usize,
) -> Result<MinCurvPath<T>, PlanError> {
    let n = domain.points.len();
    if n < 5 {
        return Err(PlanError::Degenerate(format!(
            "need at least 5 points, got {n}"
        )));
    }
    if domain.closed && anchor.is_some() {
        return Err(PlanError::Degenerate(
            "anchoring applies to open lines only".into(),
        ));
    }

    // Box bounds: stay within the walls with the vehicle half-width margin.
    let mut lb = Vec::with_capacity(n);
    let mut ub = Vec::with_capacity(n);
    for i in 0..n {
        let lo = -(domain.widths_right[i] - half_width_veh);
        let hi = domain.widths_left[i] - half_width_veh;
        if hi < lo {
            return Err(PlanError::InfeasibleWidths { index: i });
        }
        lb.push(lo);
        ub.push(hi);
    }

    // Fixed variables from the anchor, recomputed per linearisation.
    let fixed_at = |alpha_hat: &[T]| -> Vec<Option<T>> {
        let mut fixed: Vec<Option<T>> = vec![None; n];
        if let Some(a) = anchor {
            let alpha0 = a.lateral_offset.max(lb[0]).min(ub[0]);
            fixed[0] = Some(alpha0);
            // ψ_0(α) = ψ̂_0 + d_start·(α_0 - α̂_0) + d_end·(α_1 - α̂_1) = heading
            let p0 = domain.points[0] + domain.normals[0].scale(alpha_hat[0]);
            let p1 = domain.points[1] + domain.normals[1].scale(alpha_hat[1]);
            let d = p1 - p0;
            let l2 = d.dot(d);
            let psi0 = d.y.atan2(d.x);
            let a0 = -d.cross(domain.normals[0]) / l2;
            let a1 = d.cross(domain.normals[1]) / l2;
            if a1.abs() > T::c(1e-9) {
                let alpha1 = alpha_hat[1]
                    + (normalize_angle(a.heading - psi0) - a0 * (alpha0 - alpha_hat[0])) / a1;
                fixed[1] = Some(alpha1.max(lb[1]).min(ub[1]));
            }
        }
        fixed
    };

    // Feasible starting point: the centreline, anchor applied.
    let mut alpha: Vec<T> = {
        let fixed = fixed_at(&vec![T::zero(); n]);
        (0..n).map(|i| fixed[i].unwrap_or_else(T::zero)).collect()
    };
    let baseline_objective = exact_objective(domain, &alpha);
    let mut f_best = baseline_objective;

    // Sequential linearised QPs with monotone step acceptance: re-linearise
    // around the incumbent until the true objective stops improving.
    let max_passes = 10usize;
    for _pass in 0..max_passes {
        let fixed = fixed_at(&alpha);
        let model = curvature_model(domain, &alpha);

        // Map free columns into the reduced QP.
        let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
        let col_of: Vec<Option<usize>> = {
            let mut m = vec![None; n];
            for (k, &i) in free.iter().enumerate() {
                m[i] = Some(k);
            }
            m
        };
        let nf = free.len();
        let mut h: Mat<T> = Mat::zeros(nf, nf);
        let mut g = vec![T::zero(); nf];
        for (row, &k0) in model.rows.iter().zip(&model.kappa0) {
            // Split the row into free and fixed contributions.
            let mut c = k0;
            let mut entries: Vec<(usize, T)> = Vec::with_capacity(row.len());
            for &(col, coef) in row {
                match fixed[col] {
                    Some(v) => c = c + coef * v,
                    None => entries.push((col_of[col].unwrap(), coef)),
                }
            }
            // (Σ coef α + c)² accumulates into H and g.
            for &(i, ci) in &entries {
                g[i] = g[i] + T::two() * ci * c;
                for &(j, cj) in &entries {
                    h[(i, j)] = h[(i, j)] + T::two() * ci * cj;
                }
            }
        }
        // Ridge keeps the free block positive definite.
        let diag_max = (0..nf).fold(T::c(1e-30), |m, i| m.max(h[(i, i)].abs()));
        for i in 0..nf {
            h[(i, i)] = h[(i, i)] + diag_max * T::c(1e-10);
        }

        let lb_f: Vec<T> = free.iter().map(|&i| lb[i]).collect();
        let ub_f: Vec<T> = free.iter().map(|&i| ub[i]).collect();
        let x0: Vec<T> = free.iter().map(|&i| alpha[i]).collect();
        let sol = solve_box_qp(&h, &g, &lb_f, &ub_f, &x0, tol, max_iter);
        if sol.status == QpStatus::MaxIter {
            return Err(PlanError::SolverFailure {
                iterations: sol.iterations,
                objective: sol.objective.to_f64(),
            });
        }

        let mut candidate = alpha.clone();
        for (k, &i) in free.iter().enumerate() {
            candidate[i] = sol.x[k];
        }
        for (i, f) in fixed.iter().enumerate() {
            if let Some(v) = f {
                candidate[i] = *v;
            }
        }

        // Halve the step until the exact objective improves.
        let mut accepted = false;
        let mut t = T::one();
        for _ in 0..6 {
            let trial: Vec<T> = alpha
                .iter()
                .zip(&candidate)
                .map(|(&a, &c)| a + t * (c - a))
                .collect();
            let f_trial = exact_objective(domain, &trial);
            if f_trial < f_best {
                let improvement = f_best - f_trial;
                alpha = trial;
                f_best = f_trial;
                accepted = true;
                if improvement <= tol {
                    return Ok(finish(domain, alpha, f_best, baseline_objective));
                }
                break;
            }
            t = t * T::half();
        }
        if !accepted {
            break;
        }
    }

    Ok(finish(domain, alpha, f_best, baseline_objective))
}

fn finish<T: Real>(
    domain: &PathDomain<T>,
    alpha: Vec<T>,
    objective: T,
    baseline_objective: T,
) -> MinCurvPath<T> {
    let points: Vec<Point2<T>> = alpha
        .iter()
        .enumerate()
        .map(|(i, &a)| domain.points[i] + domain.normals[i].scale(a))
        .collect();
    MinCurvPath {
        points,
        objective,
        baseline_objective,
        offsets: alpha,
    }
}
