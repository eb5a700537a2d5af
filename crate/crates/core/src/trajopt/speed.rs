//! Minimum-time speed profile via a forward-backward pass.

use crate::num::Real;
use crate::vehicle::VehicleLimits;

/// What happens at the end of an open profile.
#[derive(Debug, Clone, Copy)]
pub enum TerminalRule<T = f64> {
    /// No terminal cap.
    Free,
    /// Final speed must not exceed this value.
    CapEnd(T),
}

/// Terminal speed that still allows braking to `v_safe` within `brake_dist`.
pub fn braking_terminal_speed<T: Real>(limits: &VehicleLimits<T>, v_safe: T, brake_dist: T) -> T {
    (v_safe * v_safe + T::two() * limits.a_long_max * brake_dist)
        .sqrt()
        .min(limits.v_max)
}

/// Fastest speed per point under lateral-friction and longitudinal limits.
///
/// Open profiles (`v_start = Some(..)`) run one forward pass from the start
/// speed and one backward pass from the terminal rule. Closed profiles
/// (`v_start = None`, `ds.len() == curvatures.len()` including the wrap
/// interval) sweep forward/backward around the ring until the fixed point is
/// reached.
pub fn speed_profile<T: Real>(
    curvatures: &[T],
    ds: &[T],
    limits: &VehicleLimits<T>,
    v_start: Option<T>,
    terminal: TerminalRule<T>,
) -> Vec<T> {
    let n = curvatures.len();
    if n == 0 {
        return Vec::new();
    }
    let closed = v_start.is_none();
    if closed {
        assert_eq!(ds.len(), n, "closed profile needs a wrap interval");
    } else {
        assert_eq!(ds.len(), n.saturating_sub(1));
    }

    // (a) lateral cap: v = sqrt(a_lat / |kappa|), guarded at kappa = 0.
    let mut v: Vec<T> = curvatures
        .iter()
        .map(|&k| {
            if k.abs() > T::zero() {
                (limits.a_lat_max / k.abs()).sqrt().min(limits.v_max)
            } else {
                limits.v_max
            }
        })
        .collect();

    let accel_reach = |v0: T, d: T| (v0 * v0 + T::two() * limits.a_long_max * d).sqrt();

    if let Some(vs) = v_start {
        v[0] = v[0].min(vs.max(T::zero()));
        // (b) forward pass.
        for i in 0..n - 1 {
            v[i + 1] = v[i + 1].min(accel_reach(v[i], ds[i]));
        }
        // (c) backward pass from the terminal speed.
        if let TerminalRule::CapEnd(ve) = terminal {
            v[n - 1] = v[n - 1].min(ve.max(T::zero()));
        }
        for i in (0..n - 1).rev() {
            v[i] = v[i].min(accel_reach(v[i + 1], ds[i]));
        }
    } else {
        // Closed: iterate to the fixed point (monotone non-increasing).
        let tol = limits.v_max * T::c(1e-12);
        let mut sweeps = 0usize;
        loop {
            let mut changed = false;
            for i in 0..n {
                let j = (i + 1) % n;
                let cap = accel_reach(v[i], ds[i]);
                if v[j] > cap + tol {
                    v[j] = cap;
                    changed = true;
                }
            }
            for i in (0..n).rev() {
                let j = (i + 1) % n;
                let cap = accel_reach(v[j], ds[i]);
                if v[i] > cap + tol {
                    v[i] = cap;
                    changed = true;
                }
            }
            sweeps += 1;
            if !changed {
                break;
            }
            assert!(sweeps < 8, "closed speed profile failed to converge");
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> VehicleLimits<f64> {
        VehicleLimits {
            a_lat_max: 7.85,
            ..VehicleLimits::default()
        }
    }

    #[test]
    fn straight_line_at_top_speed() {
        let l = VehicleLimits::<f64>::default();
        let v = speed_profile(&[0.0; 10], &[0.2; 9], &l, Some(8.0), TerminalRule::Free);
        assert!(v.iter().all(|&s| s == 8.0));
    }

    #[test]
    fn lateral_cap_formula() {
        let l = limits();
        let v = speed_profile(
            &[0.5; 3],
            &[10.0; 2],
            &l,
            Some(100.0),
            TerminalRule::Free,
        );
        let expect = (7.85f64 / 0.5).sqrt();
        for s in v {
            assert!((s - expect).abs() < 1e-12, "cap {s} vs {expect}");
        }
        assert!((expect - 3.962).abs() < 1e-3);
    }

    #[test]
    fn forward_pass_from_standstill() {
        let l = VehicleLimits::<f64>::default();
        let v = speed_profile(&[0.0; 3], &[0.2; 2], &l, Some(0.0), TerminalRule::Free);
        assert_eq!(v[0], 0.0);
        assert!((v[1] - (2.0f64 * 4.0 * 0.2).sqrt()).abs() < 1e-12);
        assert!((v[1] - 1.2649).abs() < 1e-4);
    }

    #[test]
    fn terminal_cap_propagates_backwards() {
        let l = VehicleLimits::<f64>::default();
        let v = speed_profile(
            &[0.0; 5],
            &[0.2; 4],
            &l,
            Some(8.0),
            TerminalRule::CapEnd(0.0),
        );
        assert_eq!(*v.last().unwrap(), 0.0);
        for i in (0..4).rev() {
            let reach = (v[i + 1] * v[i + 1] + 2.0 * 4.0 * 0.2f64).sqrt();
            assert!(v[i] <= reach + 1e-12);
        }
    }

    #[test]
    fn closed_profile_satisfies_both_limits_everywhere() {
        let l = limits();
        // Ring with a single sharp corner.
        let mut kappa = vec![0.0; 40];
        for k in kappa.iter_mut().take(25).skip(20) {
            *k = 1.0;
        }
        let ds = vec![0.5; 40];
        let v = speed_profile(&kappa, &ds, &l, None, TerminalRule::Free);
        for i in 0..40 {
            let j = (i + 1) % 40;
            assert!(v[i] * v[i] * kappa[i].abs() <= l.a_lat_max * (1.0 + 1e-9));
            let dv2 = (v[j] * v[j] - v[i] * v[i]).abs();
            assert!(dv2 / (2.0 * ds[i]) <= l.a_long_max * (1.0 + 1e-9));
        }
    }

    #[test]
    fn braking_rule_value() {
        let l = VehicleLimits::<f64>::default();
        let ve = braking_terminal_speed(&l, 2.0, 11.0);
        assert!((ve - (4.0f64 + 2.0 * 4.0 * 11.0).sqrt().min(8.0)).abs() < 1e-12);
    }

    #[test]
    fn works_in_f32() {
        let l = VehicleLimits::<f32>::default();
        let v = speed_profile(
            &[0.0f32; 4],
            &[0.2; 3],
            &l,
            Some(0.0),
            TerminalRule::Free,
        );
        assert!((v[1] - (2.0f32 * 4.0 * 0.2).sqrt()).abs() < 1e-6);
    }
}
