//! Distance between Monge–Ampère eigenfunctions and the cone `|x| − 1`.
//!
//! If the normalized eigenfunctions stayed within `α` of the cone for all
//! large `n`, then `1/4 <= ∫₀¹ max_{0<=s<=t} s(1 + α − s) dt
//! = (1 + α)²(5 − α)/24`, i.e. `α³ − 3α² − 9α + 1 <= 0`. The root `α₀` of
//! that cubic in `(0, 1)` is therefore a lower bound for the limsup of the
//! distances. At finite `n` the distance is only reported.

use crate::eigensolver::{sweep, EigenResult, SolverConfig};
use crate::error::{Error, Result};
use crate::radial::{HessianOrder, RadialProfile};

/// Default bisection width for [`cubic_gap_constant`].
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRecord {
    pub n: u32,
    /// `max_r (|u(r)| − 1 + r)`.
    pub distance: f64,
    pub attained_radius: f64,
    pub alpha0: f64,
}

/// `x³ − 3x² − 9x + 1`.
pub fn gap_cubic(x: f64) -> f64 {
    ((x - 3.0) * x - 9.0) * x + 1.0
}

/// Root of [`gap_cubic`] in `(0, 1)` by bisection to bracket width `tol`.
pub fn cubic_gap_constant(tol: f64) -> f64 {
    let (mut a, mut b) = (0.0f64, 1.0f64);
    // f(0) = 1 > 0, f(1) = −10 < 0
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if gap_cubic(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `max_{0<=s<=t} s(1 + α − s)`.
pub fn envelope_max(alpha: f64, t: f64) -> f64 {
    let peak = 0.5 * (1.0 + alpha);
    let s = t.min(peak);
    s * (1.0 + alpha - s)
}

/// `∫₀¹ max_{0<=s<=t} s(1 + α − s) dt = (1 + α)²(5 − α)/24`.
pub fn envelope_max_closed_form(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    Ok((1.0 + alpha).powi(2) * (5.0 - alpha) / 24.0)
}

/// `max_i (|u_i| − 1 + r_i)` and the radius attaining it.
pub fn profile_cone_distance(p: &RadialProfile) -> (f64, f64) {
    p.radii()
        .iter()
        .zip(p.values())
        .map(|(&r, &u)| (u.abs() - 1.0 + r, r))
        .fold((f64::NEG_INFINITY, 0.0), |best, cur| {
            if cur.0 > best.0 {
                cur
            } else {
                best
            }
        })
}

/// Sup-norm distance of a converged Monge–Ampère eigenfunction to the cone.
pub fn cone_distance(res: &EigenResult) -> Result<GapRecord> {
    if !res.converged {
        return Err(Error::NotConverged {
            k: res.order.k(),
            n: res.order.n(),
            iterations: res.iterations,
        });
    }
    if !res.order.is_monge_ampere() {
        return Err(Error::InvalidArgument(format!(
            "cone distance is defined for k = n only, got {}",
            res.order
        )));
    }
    let (distance, attained_radius) = profile_cone_distance(&res.profile);
    Ok(GapRecord {
        n: res.order.n(),
        distance,
        attained_radius,
        alpha0: cubic_gap_constant(DEFAULT_ROOT_TOL),
    })
}

/// Solves `(n, n)` for each `n` and reports the distances next to `α₀`.
pub fn gap_trend(ns: &[u32], cfg: &SolverConfig) -> Vec<Result<GapRecord>> {
    let orders: Vec<Result<HessianOrder>> =
        ns.iter().map(|&n| HessianOrder::monge_ampere(n)).collect();
    let valid: Vec<HessianOrder> = orders
        .iter()
        .filter_map(|o| o.as_ref().ok().copied())
        .collect();
    let mut solved = sweep(&valid, cfg).into_iter();
    orders
        .into_iter()
        .map(|o| {
            o?;
            let res = solved.next().expect("one result per valid order")?;
            cone_distance(&res)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::quad_with_breakpoints;
    use crate::radial::RadialGrid;
    use approx::assert_relative_eq;

    #[test]
    fn cubic_root() {
        let a = cubic_gap_constant(1e-6);
        assert!((a - 0.1074).abs() < 1e-3);
        assert!(gap_cubic(a).abs() < 1e-5);
        assert!(gap_cubic(0.1) > 0.0);
        assert!(gap_cubic(0.11) < 0.0);
    }

    #[test]
    fn envelope_values() {
        let a = cubic_gap_constant(1e-12);
        assert_relative_eq!(envelope_max_closed_form(a).unwrap(), 0.25, epsilon = 1e-10);
        assert_relative_eq!(envelope_max_closed_form(0.0).unwrap(), 5.0 / 24.0);
        assert_relative_eq!(envelope_max_closed_form(1.0).unwrap(), 2.0 / 3.0);
        assert!(envelope_max_closed_form(1.5).is_err());
        assert!(envelope_max_closed_form(-0.1).is_err());
    }

    #[test]
    fn envelope_closed_form_matches_quadrature() {
        for alpha in [0.0, 0.05, cubic_gap_constant(1e-12), 0.5, 0.9, 1.0] {
            let kink = 0.5 * (1.0 + alpha);
            let pts: Vec<f64> = if kink < 1.0 {
                vec![0.0, kink, 1.0]
            } else {
                vec![0.0, 1.0]
            };
            let q = quad_with_breakpoints(|t| envelope_max(alpha, t), &pts, 1e-13).unwrap();
            assert_relative_eq!(q, envelope_max_closed_form(alpha).unwrap(), epsilon = 1e-10);
        }
    }

    #[test]
    fn cone_has_zero_distance() {
        let p = RadialProfile::cone(RadialGrid::uniform(128).unwrap());
        assert_eq!(profile_cone_distance(&p).0, 0.0);
    }

    #[test]
    fn synthetic_perturbation() {
        // u = −(1 − r)(1 + 0.2 r): distance max 0.2 r(1 − r) = 0.05 at r = 1/2.
        let g = RadialGrid::uniform(128).unwrap();
        let c = 0.2;
        let values = g
            .nodes()
            .iter()
            .map(|r| -(1.0 - r) * (1.0 + c * r))
            .collect();
        let p = RadialProfile::from_values(g, values).unwrap();
        let (d, r) = profile_cone_distance(&p);
        assert_relative_eq!(d, 0.05, epsilon = 1e-15);
        assert_eq!(r, 0.5);
    }

    #[test]
    fn rejects_unconverged_and_non_monge_ampere() {
        let cfg = SolverConfig {
            grid_size: 128,
            max_iters: 1,
            ..Default::default()
        };
        let res = crate::eigensolver::solve(HessianOrder::new(2, 2).unwrap(), &cfg).unwrap();
        assert!(cone_distance(&res).is_err());
        let cfg = SolverConfig {
            grid_size: 128,
            ..Default::default()
        };
        let res = crate::eigensolver::solve(HessianOrder::new(1, 2).unwrap(), &cfg).unwrap();
        assert!(cone_distance(&res).is_err());
    }

    #[test]
    fn trend_shapes() {
        let cfg = SolverConfig {
            grid_size: 256,
            ..Default::default()
        };
        assert!(gap_trend(&[], &cfg).is_empty());
        let out = gap_trend(&[2, 1, 3], &cfg);
        assert_eq!(out.len(), 3);
        assert!(out[0].as_ref().unwrap().distance > 0.0);
        assert!(out[1].is_err());
        assert_eq!(out[2].as_ref().unwrap().n, 3);
    }
}
