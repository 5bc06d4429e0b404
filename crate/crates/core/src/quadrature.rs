//! Adaptive composite Gauss–Legendre quadrature.
//!
//! Every integral over `(0, 1)` in the crate goes through [`quad_weighted`] or
//! [`quad_with_breakpoints`]. Panels are refined by interval halving; the
//! error of a panel is estimated as the difference between the 15-point rule
//! on the panel and the sum of the rule on its two halves. The panel with the
//! largest error is split first, so endpoint singularities of power type are
//! resolved by a geometric cascade of small panels near the endpoint.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Number of Gauss–Legendre nodes per panel.
pub const GAUSS_POINTS: usize = 15;

/// Default relative tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_PANELS: usize = 200_000;
const MIN_WIDTH: f64 = 1e-300;
// Below this the error estimate is dominated by rounding in the panel sums.
const TOL_FLOOR: f64 = 4.0 * f64::EPSILON;

struct Rule {
    nodes: [f64; GAUSS_POINTS],
    weights: [f64; GAUSS_POINTS],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let (nodes, weights) = legendre_rule(GAUSS_POINTS);
        let mut r = Rule {
            nodes: [0.0; GAUSS_POINTS],
            weights: [0.0; GAUSS_POINTS],
        };
        r.nodes.copy_from_slice(&nodes);
        r.weights.copy_from_slice(&weights);
        r
    })
}

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on the three-term recurrence.
pub fn legendre_rule(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_eval(m, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_eval(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=m {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed 15-point Gauss–Legendre estimate on `[a, b]`.
pub fn gauss_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (x, w) in r.nodes.iter().zip(r.weights.iter()) {
        s += w * f(mid + half * x);
    }
    s * half
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    estimate: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let m = 0.5 * (a + b);
    let whole = gauss_panel(f, a, b);
    let halves = gauss_panel(f, a, m) + gauss_panel(f, m, b);
    Panel {
        a,
        b,
        estimate: halves,
        error: (whole - halves).abs(),
    }
}

/// Adaptive estimate of `∫_0^1 f(r) dr` to relative tolerance `tol`.
///
/// On failure the error carries the best estimate reached.
pub fn quad_weighted<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<f64> {
    quad_with_breakpoints(f, &[0.0, 1.0], tol)
}

/// Adaptive estimate of `∫ f` over `[points[0], points[last]]`, starting from
/// the panels delimited by `points` (strictly increasing).
pub fn quad_with_breakpoints<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: f64) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "quadrature needs at least two breakpoints".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    let tol = tol.max(TOL_FLOOR);
    let mut heap = BinaryHeap::with_capacity(points.len() * 2);
    let mut total = 0.0;
    let mut err = 0.0;
    // Panels that can no longer be split keep contributing to the totals.
    let mut frozen_total = 0.0;
    let mut frozen_err = 0.0;
    for w in points.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidArgument(
                "quadrature breakpoints must be strictly increasing".into(),
            ));
        }
        let p = refine(&f, w[0], w[1]);
        total += p.estimate;
        err += p.error;
        heap.push(p);
    }
    if !total.is_finite() {
        return Err(Error::QuadratureFailed {
            estimate: total,
            error: f64::INFINITY,
        });
    }

    let mut panels = heap.len();
    loop {
        if err <= tol * total.abs() || err == 0.0 {
            return Ok(total);
        }
        let Some(p) = heap.pop() else {
            break;
        };
        if p.b - p.a < MIN_WIDTH.max(4.0 * f64::EPSILON * p.b.abs().max(p.a.abs())) {
            frozen_total += p.estimate;
            frozen_err += p.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        if panels >= MAX_PANELS {
            heap.push(p);
            break;
        }
        let m = 0.5 * (p.a + p.b);
        let left = refine(&f, p.a, m);
        let right = refine(&f, m, p.b);
        total += left.estimate + right.estimate - p.estimate;
        err += left.error + right.error - p.error;
        panels += 1;
        heap.push(left);
        heap.push(right);
    }

    // Recompute the sums from scratch to shed accumulated rounding before
    // the final verdict.
    let (t, e) = heap.iter().fold((frozen_total, frozen_err), |(t, e), p| {
        (t + p.estimate, e + p.error)
    });
    if e <= tol * t.abs() {
        Ok(t)
    } else {
        Err(Error::QuadratureFailed {
            estimate: t,
            error: e,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_weights_sum_to_two() {
        let (x, w) = legendre_rule(GAUSS_POINTS);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        for i in 0..GAUSS_POINTS {
            assert_relative_eq!(x[i], -x[GAUSS_POINTS - 1 - i], epsilon = 1e-15);
        }
        assert!(x[GAUSS_POINTS / 2].abs() < 1e-15);
    }

    #[test]
    fn rule_is_exact_for_degree_29() {
        let v = gauss_panel(&|x: f64| x.powi(28), -1.0, 1.0);
        assert_relative_eq!(v, 2.0 / 29.0, max_relative = 1e-14);
    }

    #[test]
    fn linear_integrand() {
        let v = quad_weighted(|r| r, 1e-12).unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn euler_first_integral_n2() {
        let v = quad_weighted(|r| r * (1.0 - r).powi(2), 1e-12).unwrap();
        assert_relative_eq!(v, 1.0 / 12.0, max_relative = 1e-13);
    }

    #[test]
    fn holder_denominator_for_order_2_3() {
        // r²(√r − 1)² = r³ − 2r^{5/2} + r², integrating to 1/4 − 4/7 + 1/3 = 1/84.
        let v = quad_weighted(|r| r * r * (r.sqrt() - 1.0).powi(2), 1e-12).unwrap();
        assert_relative_eq!(v, 1.0 / 84.0, max_relative = 1e-12);
    }

    #[test]
    fn inverse_square_root_singularity() {
        let v = quad_weighted(|r: f64| if r > 0.0 { r.powf(-0.5) } else { 0.0 }, 1e-10).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn zero_integrand() {
        assert_eq!(quad_weighted(|_| 0.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn nonfinite_integrand_fails_with_estimate() {
        let e = quad_weighted(|r| 1.0 / (r - 0.5), 1e-12);
        assert!(matches!(e, Err(Error::QuadratureFailed { .. })));
    }

    #[test]
    fn breakpoints_must_increase() {
        assert!(quad_with_breakpoints(|r| r, &[0.0, 0.5, 0.5, 1.0], 1e-12).is_err());
        assert!(quad_with_breakpoints(|r| r, &[0.0], 1e-12).is_err());
        assert!(quad_weighted(|r| r, 0.0).is_err());
    }
}
