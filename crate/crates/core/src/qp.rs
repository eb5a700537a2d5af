//! Dense convex quadratic programming.
//!
//! Two solvers cover the crate's needs:
//!
//! * [`solve_box_qp`] — projected Newton for `min ½xᵀHx + gᵀx` subject to
//!   `lb ≤ x ≤ ub`. Used by the minimum-curvature path optimiser.
//! * [`solve_qp`] — primal active-set for the same objective subject to
//!   general rows `aᵢᵀx ≤ bᵢ`, starting from a feasible point. Used by the
//!   contouring controller's linearised subproblems.
//!
//! `H` must be positive definite; callers add a ridge when their Hessian is
//! only semidefinite.

use crate::linalg::{cholesky_solve, dot, lu_solve, Mat};
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Converged,
    /// Iteration cap hit; the returned iterate is the best found.
    MaxIter,
}

#[derive(Debug, Clone)]
pub struct QpSolution<T = f64> {
    pub x: Vec<T>,
    pub objective: T,
    pub iterations: usize,
    pub status: QpStatus,
}

fn objective<T: Real>(h: &Mat<T>, g: &[T], x: &[T]) -> T {
    let hx = h.matvec(x);
    T::half() * dot(x, &hx) + dot(g, x)
}

fn clamp_vec<T: Real>(x: &mut [T], lb: &[T], ub: &[T]) {
    for i in 0..x.len() {
        x[i] = x[i].max(lb[i]).min(ub[i]);
    }
}

/// Projected-Newton solver for box-constrained convex QPs.
///
/// Converges when both the projected-gradient norm and the objective change
/// drop below `tol`. Free-set Newton systems are solved by Cholesky with an
/// automatic ridge fallback.
pub fn solve_box_qp<T: Real>(
    h: &Mat<T>,
    g: &[T],
    lb: &[T],
    ub: &[T],
    x0: &[T],
    tol: T,
    max_iter: usize,
) -> QpSolution<T> {
    let n = g.len();
    assert_eq!(h.rows(), n);
    assert_eq!(lb.len(), n);
    assert_eq!(ub.len(), n);
    let mut x = x0.to_vec();
    clamp_vec(&mut x, lb, ub);
    let mut f_prev = objective(h, g, &x);
    let eps_active = T::c(1e-12);

    for iter in 0..max_iter {
        let mut grad = h.matvec(&x);
        for i in 0..n {
            grad[i] = grad[i] + g[i];
        }

        // Projected-gradient optimality measure.
        let mut pg_norm = T::zero();
        for i in 0..n {
            let step = (x[i] - grad[i]).max(lb[i]).min(ub[i]) - x[i];
            pg_norm = pg_norm.max(step.abs());
        }
        if pg_norm <= tol {
            return QpSolution {
                objective: f_prev,
                x,
                iterations: iter,
                status: QpStatus::Converged,
            };
        }

        // Free variables: not pinned at a bound with the gradient pushing out.
        let free: Vec<usize> = (0..n)
            .filter(|&i| {
                let at_lo = x[i] - lb[i] <= eps_active && grad[i] > T::zero();
                let at_hi = ub[i] - x[i] <= eps_active && grad[i] < T::zero();
                !(at_lo || at_hi)
            })
            .collect();
        if free.is_empty() {
            return QpSolution {
                objective: f_prev,
                x,
                iterations: iter,
                status: QpStatus::Converged,
            };
        }

        // Newton direction on the free subspace.
        let nf = free.len();
        let mut hff = Mat::zeros(nf, nf);
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                hff[(a, b)] = h[(i, j)];
            }
        }
        let gf: Vec<T> = free.iter().map(|&i| grad[i]).collect();
        let neg_gf: Vec<T> = gf.iter().map(|&v| -v).collect();
        let df = cholesky_solve(&hff, &neg_gf).unwrap_or_else(|| {
            // Semidefinite free block: retry with a ridge.
            let mut ridged = hff.clone();
            let scale = (0..nf).fold(T::c(1e-30), |m, i| m.max(hff[(i, i)].abs()));
            for i in 0..nf {
                ridged[(i, i)] = ridged[(i, i)] + scale * T::c(1e-10);
            }
            cholesky_solve(&ridged, &neg_gf).unwrap_or_else(|| neg_gf.clone())
        });

        // Projected backtracking line search.
        let mut alpha = T::one();
        let mut improved = false;
        for _ in 0..60 {
            let mut cand = x.clone();
            for (a, &i) in free.iter().enumerate() {
                cand[i] = cand[i] + alpha * df[a];
            }
            clamp_vec(&mut cand, lb, ub);
            let f_cand = objective(h, g, &cand);
            if f_cand < f_prev {
                let f_change = (f_prev - f_cand).abs();
                x = cand;
                f_prev = f_cand;
                improved = true;
                if f_change <= tol && pg_norm <= tol.sqrt() {
                    return QpSolution {
                        objective: f_prev,
                        x,
                        iterations: iter + 1,
                        status: QpStatus::Converged,
                    };
                }
                break;
            }
            alpha = alpha * T::half();
        }
        if !improved {
            // No descent left at machine precision.
            return QpSolution {
                objective: f_prev,
                x,
                iterations: iter + 1,
                status: QpStatus::Converged,
            };
        }
    }

    QpSolution {
        objective: f_prev,
        x,
        iterations: max_iter,
        status: QpStatus::MaxIter,
    }
}

/// Primal active-set solver for `min ½xᵀHx + gᵀx` s.t. `A x ≤ b`.
///
/// `x0` must be feasible. Ties are broken by lowest constraint index, which
/// keeps the iteration sequence deterministic.
pub fn solve_qp<T: Real>(
    h: &Mat<T>,
    g: &[T],
    a: &Mat<T>,
    b: &[T],
    x0: &[T],
    max_iter: usize,
) -> QpSolution<T> {
    let n = g.len();
    let m = b.len();
    assert_eq!(h.rows(), n);
    assert_eq!(a.rows(), m);
    assert_eq!(a.cols(), n);

    let tol = T::c(1e-10);
    let mut x = x0.to_vec();
    let mut working: Vec<usize> = Vec::new();

    for iter in 0..max_iter {
        // KKT system for the equality-constrained subproblem.
        let nw = working.len();
        let dim = n + nw;
        let mut kkt = Mat::zeros(dim, dim);
        for i in 0..n {
            for j in 0..n {
                kkt[(i, j)] = h[(i, j)];
            }
        }
        for (wi, &ci) in working.iter().enumerate() {
            for j in 0..n {
                kkt[(j, n + wi)] = a[(ci, j)];
                kkt[(n + wi, j)] = a[(ci, j)];
            }
        }
        let mut rhs = vec![T::zero(); dim];
        let hx = h.matvec(&x);
        for i in 0..n {
            rhs[i] = -(hx[i] + g[i]);
        }

        let sol = match lu_solve(&kkt, &rhs) {
            Some(s) => s,
            None => {
                // Dependent working set; drop the most recent addition.
                if working.pop().is_none() {
                    break;
                }
                continue;
            }
        };
        let d = &sol[..n];
        let lambda = &sol[n..];

        let d_norm = d.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
        if d_norm <= tol {
            // Stationary on the working set: check multiplier signs.
            let (mut worst, mut worst_idx) = (-tol, None);
            for (wi, &l) in lambda.iter().enumerate() {
                if l < worst {
                    worst = l;
                    worst_idx = Some(wi);
                }
            }
            match worst_idx {
                None => {
                    return QpSolution {
                        objective: objective(h, g, &x),
                        x,
                        iterations: iter,
                        status: QpStatus::Converged,
                    }
                }
                Some(wi) => {
                    working.remove(wi);
                }
            }
        } else {
            // Step to the nearest blocking constraint.
            let mut alpha = T::one();
            let mut blocking = None;
            for ci in 0..m {
                if working.contains(&ci) {
                    continue;
                }
                let ad = dot(a.row(ci), d);
                if ad > tol {
                    let slack = b[ci] - dot(a.row(ci), &x);
                    let step = (slack / ad).max(T::zero());
                    if step < alpha {
                        alpha = step;
                        blocking = Some(ci);
                    }
                }
            }
            for i in 0..n {
                x[i] = x[i] + alpha * d[i];
            }
            if let Some(ci) = blocking {
                working.push(ci);
            }
        }
    }

    QpSolution {
        objective: objective(h, g, &x),
        x,
        iterations: max_iter,
        status: QpStatus::MaxIter,
    }
}
