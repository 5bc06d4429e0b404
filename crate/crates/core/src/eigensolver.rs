//! Principal radial eigenpair of `S_k(D²u) = λ^k |u|^k` on the unit ball.
//!
//! For a radial eigenfunction the k-Hessian has the flux form
//! `S_k = k⁻¹ C(n−1,k−1) r^{1−n} [r^{n−k} (u')^k]'`, so with `u'(0) = 0`
//!
//! ```text
//!   u'(r) = λ (k / C(n−1,k−1))^{1/k} [ r^{k−n} ∫₀^r s^{n−1} |u(s)|^k ds ]^{1/k}.
//! ```
//!
//! The solver iterates the positively 1-homogeneous map `u ↦ ũ`,
//! `ũ(r) = −∫_r^1 φ`, where `φ` is the right-hand side above with `λ = 1`.
//! A fixed point of the normalized map satisfies `ũ = u/λ`, so each step
//! reports `λ ≈ 1/‖ũ‖_∞`. Integrating the slope relation from 0 to 1 and
//! using `u(0) = −1`, `u(1) = 0` gives the identity
//! `λ (k/C)^{1/k} ∫₀¹ (r^{k−n} ∫₀^r s^{n−1}|u|^k ds)^{1/k} dr = 1`,
//! which is checked as a residual alongside the pointwise equation.

use crate::error::{Error, Result};
use crate::radial::{binomial_f64, sk_radial_fine, HessianOrder, RadialGrid, RadialProfile};

/// Knobs of [`solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Number of uniform grid intervals.
    pub grid_size: usize,
    /// Relative change of `λ` between iterates.
    pub tol_lambda: f64,
    /// Sup-norm change of the normalized profile between iterates.
    pub tol_profile: f64,
    pub max_iters: usize,
    /// Tolerance handed to adaptive quadrature by callers that need it
    /// (bounds, Rayleigh quotients).
    pub quad_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid_size: 4096,
            tol_lambda: 1e-10,
            tol_profile: 1e-8,
            max_iters: 500,
            quad_tol: 1e-12,
        }
    }
}

/// Smallest accepted grid.
pub const MIN_GRID_SIZE: usize = 64;

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < MIN_GRID_SIZE {
            return Err(Error::InvalidConfig(format!(
                "grid_size must be >= {MIN_GRID_SIZE}, got {}",
                self.grid_size
            )));
        }
        for (name, v) in [
            ("tol_lambda", self.tol_lambda),
            ("tol_profile", self.tol_profile),
            ("quad_tol", self.quad_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

/// Converged (or last) iterate of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub order: HessianOrder,
    /// `λ(k; n)` (not its `k`-th power).
    pub lam: f64,
    /// Normalized eigenfunction, `u(0) = −1`, `u(1) = 0`.
    pub profile: RadialProfile,
    pub iterations: usize,
    pub residual_ode: f64,
    pub residual_identity: f64,
    pub converged: bool,
}

impl EigenResult {
    /// `λ^k`.
    pub fn lam_pow_k(&self) -> f64 {
        self.lam.powi(self.order.k() as i32)
    }

    pub fn ode_residual(&self) -> f64 {
        ode_residual(&self.profile, self.order, self.lam)
    }

    pub fn identity_residual(&self) -> Result<f64> {
        identity_residual(&self.profile, self.order, self.lam)
    }
}

/// Discretization of `u ↦ (φ, φ')` and `φ ↦ ũ` on a fixed grid.
///
/// The scaled cumulative integral `K(r) = r^{−n} ∫₀^r s^{n−1} f(s) ds`
/// (`f = |u|^k` interpolated linearly per cell) is accumulated with exact
/// product-integration weights, so no power of `r` ever under- or overflows:
/// `K_i = q_i^n K_{i−1} + a_i f_{i−1} + b_i f_i` with `q_i = r_{i−1}/r_i`.
/// Then `φ = c r K^{1/k}` with `c = (k/C(n−1,k−1))^{1/k}`.
#[derive(Debug, Clone)]
pub struct FluxOperator {
    order: HessianOrder,
    grid: RadialGrid,
    decay: Vec<f64>,
    w_prev: Vec<f64>,
    w_curr: Vec<f64>,
    w_slope: Vec<f64>,
    scale: f64,
}

/// One application of the operator: `ũ` with the slopes `φ` and `φ'`.
#[derive(Debug, Clone)]
pub struct FluxImage {
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
    pub slope_derivs: Vec<f64>,
}

impl FluxOperator {
    pub fn new(grid: RadialGrid, order: HessianOrder) -> Self {
        let n = order.n() as f64;
        let r = grid.nodes();
        let len = r.len();
        let mut decay = vec![0.0; len];
        let mut w_prev = vec![0.0; len];
        let mut w_curr = vec![0.0; len];
        let mut w_slope = vec![0.0; len];
        for i in 1..len {
            let (a, b) = (r[i - 1], r[i]);
            let h = b - a;
            let ln_q = if a == 0.0 {
                f64::NEG_INFINITY
            } else {
                (-h / b).ln_1p()
            };
            // A = b^{−n} ∫_a^b s^{n−1} ds,  B = b^{−n} ∫_a^b s^n ds
            let big_a = -(n * ln_q).exp_m1() / n;
            let big_b = -b * ((n + 1.0) * ln_q).exp_m1() / (n + 1.0);
            decay[i] = (n * ln_q).exp();
            w_prev[i] = (b * big_a - big_b) / h;
            w_curr[i] = (big_b - a * big_a) / h;
            w_slope[i] = big_a * h / 12.0;
        }
        let k = order.k() as f64;
        let scale = (k / binomial_f64(order.n() - 1, order.k() - 1)).powf(1.0 / k);
        Self {
            order,
            grid,
            decay,
            w_prev,
            w_curr,
            w_slope,
            scale,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn order(&self) -> HessianOrder {
        self.order
    }

    /// Slopes `φ_i` and their derivatives for `λ = 1`, given the values and
    /// slopes of `u`. Each cell of `K` carries the endpoint correction
    /// `(h/12) ∫w (f'_{i−1} − f'_i)` on top of the linear product rule.
    pub fn slopes(&self, values: &[f64], du: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let kf = self.order.k() as f64;
        let k = self.order.k() as i32;
        let n = self.order.n() as f64;
        let r = self.grid.nodes();
        let len = r.len();
        let f: Vec<f64> = values.iter().map(|u| u.abs().powi(k)).collect();
        // f = |u|^k with u <= 0, so f' = −k |u|^{k−1} u'
        let df: Vec<f64> = values
            .iter()
            .zip(du)
            .map(|(u, d)| -kf * u.abs().powi(k - 1) * d)
            .collect();
        let mut phi = vec![0.0; len];
        let mut dphi = vec![0.0; len];
        let mut big_k = f[0] / n;
        for i in 0..len {
            if i > 0 {
                big_k = self.decay[i] * big_k
                    + self.w_prev[i] * f[i - 1]
                    + self.w_curr[i] * f[i]
                    + self.w_slope[i] * (df[i - 1] - df[i]);
            }
            if big_k > 0.0 {
                let root = big_k.powf(1.0 / kf);
                phi[i] = self.scale * r[i] * root;
                // K' = (f − nK)/r  ⇒  φ' = c K^{1/k − 1} (K + (f − nK)/k)
                dphi[i] = self.scale * root / big_k * (big_k + (f[i] - n * big_k) / kf);
            }
        }
        (phi, dphi)
    }

    /// `ũ(r_i) = −∫_{r_i}^1 φ` by the endpoint-corrected trapezoid rule.
    pub fn integrate(&self, phi: &[f64], dphi: &[f64]) -> Vec<f64> {
        let r = self.grid.nodes();
        let len = r.len();
        let mut u = vec![0.0; len];
        for i in (0..len - 1).rev() {
            let h = r[i + 1] - r[i];
            let cell = 0.5 * h * (phi[i] + phi[i + 1]) + h * h / 12.0 * (dphi[i] - dphi[i + 1]);
            u[i] = u[i + 1] - cell;
        }
        u
    }

    pub fn apply(&self, values: &[f64], du: &[f64]) -> FluxImage {
        let (slopes, slope_derivs) = self.slopes(values, du);
        let values = self.integrate(&slopes, &slope_derivs);
        FluxImage {
            values,
            slopes,
            slope_derivs,
        }
    }

    /// `∫₀¹ φ[u]` for `λ = 1`; the identity reads `λ · flux_integral = |u(0)|`.
    pub fn flux_integral(&self, values: &[f64], du: &[f64]) -> f64 {
        let img = self.apply(values, du);
        -img.values[0]
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// One normalized step: returns the next profile and `λ ≈ 1/‖ũ‖_∞`.
pub fn iterate_step(
    p: &RadialProfile,
    ord: HessianOrder,
    _cfg: &SolverConfig,
) -> Result<(RadialProfile, f64)> {
    if p.is_zero() {
        return Err(Error::Degenerate(
            "iteration started from the zero profile".into(),
        ));
    }
    let op = FluxOperator::new(p.grid().clone(), ord);
    let (values, slopes, lam) = normalized_step(&op, p.values(), p.slopes())?;
    Ok((RadialProfile::new(p.grid().clone(), values, slopes)?, lam))
}

fn normalized_step(
    op: &FluxOperator,
    values: &[f64],
    du: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let img = op.apply(values, du);
    let norm = sup_norm(&img.values);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Degenerate(format!(
            "iterate has sup norm {norm} for {}",
            op.order()
        )));
    }
    let values = img.values.iter().map(|v| v / norm).collect();
    let slopes = img.slopes.iter().map(|s| s / norm).collect();
    Ok((values, slopes, 1.0 / norm))
}

/// Runs the normalized iteration from the cone `r − 1` until both the
/// relative change of `λ` and the sup-norm change of the profile fall below
/// their tolerances on two consecutive steps, or `max_iters` is reached.
///
/// Non-convergence is reported through [`EigenResult::converged`]; only an
/// invalid configuration is an error.
pub fn solve(ord: HessianOrder, cfg: &SolverConfig) -> Result<EigenResult> {
    cfg.validate()?;
    let grid = RadialGrid::uniform(cfg.grid_size)?;
    let op = FluxOperator::new(grid.clone(), ord);

    let mut values: Vec<f64> = grid.nodes().iter().map(|r| r - 1.0).collect();
    let mut slopes = vec![1.0; grid.len()];
    slopes[0] = 0.0;
    let mut lam = f64::NAN;
    let mut streak = 0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iters {
        iterations += 1;
        let (next, next_slopes, next_lam) = normalized_step(&op, &values, &slopes)?;
        let dl = ((next_lam - lam) / next_lam).abs();
        let du = values
            .iter()
            .zip(&next)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        values = next;
        slopes = next_slopes;
        lam = next_lam;
        if dl < cfg.tol_lambda && du < cfg.tol_profile {
            streak += 1;
            if streak >= 2 {
                converged = true;
                break;
            }
        } else {
            streak = 0;
        }
    }

    let profile = RadialProfile::new(grid, values, slopes)?;
    let residual_identity = identity_with(&op, &profile, lam);
    let residual_ode = ode_residual(&profile, ord, lam);
    Ok(EigenResult {
        order: ord,
        lam,
        profile,
        iterations,
        residual_ode,
        residual_identity,
        converged,
    })
}

/// Pointwise relative residual of `S_k(D²u) = λ^k |u|^k`:
/// `max |S_k − λ^k|u|^k| / (1 + λ^k|u|^k)` over nodes at least two cells
/// away from both ends, with `u''` from the five-point stencil.
pub fn ode_residual(p: &RadialProfile, ord: HessianOrder, lam: f64) -> f64 {
    let len = p.len();
    if len < 6 {
        return f64::NAN;
    }
    let k = ord.k() as i32;
    (2..=len - 3)
        .map(|i| {
            let sk = sk_radial_fine(p, ord, i).unwrap_or(f64::NAN);
            let rhs = (lam * p.values()[i].abs()).powi(k);
            (sk - rhs).abs() / (1.0 + rhs)
        })
        .fold(0.0f64, |m, x| {
            if x.is_nan() || m.is_nan() {
                f64::NAN
            } else {
                m.max(x)
            }
        })
}

/// `|λ (k/C)^{1/k} ∫₀¹ (r^{k−n} ∫₀^r s^{n−1}|u|^k ds)^{1/k} dr − 1|` for a
/// profile normalized to `u(0) = −1`. At `k = n` the constant is `n^{1/n}`.
pub fn identity_residual(p: &RadialProfile, ord: HessianOrder, lam: f64) -> Result<f64> {
    if p.is_zero() {
        return Err(Error::Degenerate(
            "identity residual of the zero profile".into(),
        ));
    }
    let op = FluxOperator::new(p.grid().clone(), ord);
    Ok(identity_with(&op, p, lam))
}

fn identity_with(op: &FluxOperator, p: &RadialProfile, lam: f64) -> f64 {
    (lam * op.flux_integral(p.values(), p.slopes()) - 1.0).abs()
}

/// Solves every order independently; results come back in input order and
/// are bit-identical to [`sweep_sequential`].
pub fn sweep(orders: &[HessianOrder], cfg: &SolverConfig) -> Vec<Result<EigenResult>> {
    crate::parallel::map_ordered(orders, |ord| solve(*ord, cfg))
}

pub fn sweep_sequential(orders: &[HessianOrder], cfg: &SolverConfig) -> Vec<Result<EigenResult>> {
    orders.iter().map(|ord| solve(*ord, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn order(k: u32, n: u32) -> HessianOrder {
        HessianOrder::new(k, n).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = [
            SolverConfig {
                grid_size: 32,
                ..Default::default()
            },
            SolverConfig {
                tol_lambda: 0.0,
                ..Default::default()
            },
            SolverConfig {
                tol_profile: -1.0,
                ..Default::default()
            },
            SolverConfig {
                quad_tol: f64::NAN,
                ..Default::default()
            },
            SolverConfig {
                max_iters: 0,
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
            assert!(solve(order(1, 2), &c).is_err());
        }
    }

    #[test]
    fn product_weights_integrate_constants_exactly() {
        // f ≡ 1 gives K(r) = 1/n at every node.
        let g = RadialGrid::uniform(256).unwrap();
        for n in [2, 7, 40] {
            let op = FluxOperator::new(g.clone(), order(n, n));
            let ones = vec![-1.0; g.len()];
            let (phi, _) = op.slopes(&ones, &vec![0.0; ones.len()]);
            let c = (n as f64).powf(1.0 / n as f64);
            for (r, p) in g.nodes().iter().zip(&phi) {
                let expect = c * r * (1.0 / n as f64).powf(1.0 / n as f64);
                assert_relative_eq!(*p, expect, max_relative = 1e-11, epsilon = 1e-300);
            }
        }
    }

    #[test]
    fn zero_profile_is_rejected() {
        let z = RadialProfile::zero(RadialGrid::uniform(64).unwrap());
        assert!(iterate_step(&z, order(1, 2), &SolverConfig::default()).is_err());
        assert!(identity_residual(&z, order(1, 2), 1.0).is_err());
    }

    #[test]
    fn laplace_disk() {
        let res = solve(order(1, 2), &SolverConfig::default()).unwrap();
        assert!(res.converged);
        assert_relative_eq!(res.lam, 5.783_185_962_946_784, max_relative = 1e-6);
    }

    #[test]
    fn fixed_point_is_reproduced() {
        let cfg = SolverConfig {
            grid_size: 512,
            ..Default::default()
        };
        let res = solve(order(2, 2), &cfg).unwrap();
        assert!(res.converged);
        let (next, lam) = iterate_step(&res.profile, res.order, &cfg).unwrap();
        assert!(((lam - res.lam) / res.lam).abs() < cfg.tol_lambda);
        let du = next
            .values()
            .iter()
            .zip(res.profile.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(du < cfg.tol_profile);
    }

    #[test]
    fn cone_is_not_an_eigenpair() {
        let g = RadialGrid::uniform(4096).unwrap();
        let cone = RadialProfile::cone(g);
        let r = identity_residual(&cone, order(2, 2), 4.0).unwrap();
        // 4·√2·∫₀¹(∫₀^t s(1−s)² ds)^{1/2} dt = 0.93049…, by adaptive quadrature
        // of the closed-form inner integral t²/2 − 2t³/3 + t⁴/4.
        let lhs = 4.0
            * 2f64.sqrt()
            * crate::quadrature::quad_weighted(
                |t: f64| (t * t / 2.0 - 2.0 * t.powi(3) / 3.0 + t.powi(4) / 4.0).sqrt(),
                1e-13,
            )
            .unwrap();
        assert_relative_eq!(r, (lhs - 1.0).abs(), epsilon = 1e-7);
        assert!(r > 0.05);
    }

    #[test]
    fn one_iteration_is_not_converged() {
        let cfg = SolverConfig {
            max_iters: 1,
            ..Default::default()
        };
        let res = solve(order(2, 2), &cfg).unwrap();
        assert!(!res.converged);
        assert_eq!(res.iterations, 1);
        assert!(res.residual_identity > cfg.tol_lambda);
        assert!(res.residual_ode > 1e-4);
    }

    #[test]
    fn sweep_matches_sequential_and_keeps_order() {
        let cfg = SolverConfig {
            grid_size: 256,
            ..Default::default()
        };
        let orders: Vec<_> = [(3, 5), (1, 2), (2, 2), (4, 4)]
            .iter()
            .map(|&(k, n)| order(k, n))
            .collect();
        let a = sweep(&orders, &cfg);
        let b = sweep_sequential(&orders, &cfg);
        for ((x, y), ord) in a.iter().zip(&b).zip(&orders) {
            let (x, y) = (x.as_ref().unwrap(), y.as_ref().unwrap());
            assert_eq!(x.order, *ord);
            assert_eq!(x.lam.to_bits(), y.lam.to_bits());
            assert_eq!(x.profile, y.profile);
        }
        let single = sweep(&orders[..1], &cfg);
        assert_eq!(
            single[0].as_ref().unwrap(),
            &solve(orders[0], &cfg).unwrap()
        );
    }
}
