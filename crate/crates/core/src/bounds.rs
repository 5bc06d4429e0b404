//! Closed-form bounds on `λ(k; n)` for the unit ball, evaluated in exact
//! rational arithmetic with float projections.
//!
//! Monge–Ampère case `k = n`:
//!
//! ```text
//!   C(2n, n)  <=  λ(n)^n  <=  C(2n, n) (2n + 1)/(n + 1)
//! ```
//!
//! General `k`:
//!
//! ```text
//!   λ(k; n)^k <= (n + k + 1)! / (k! (k + 1)! (n − k + 1)!)
//!   λ(k; n)   >= max{ (n/k − 2)(n/k)^{(k−1)/k}, 4 (2n)^{−1/n} }
//!   λ(k; n)^k >= (n/k − 2)^k k⁻¹ C(n−1, k−1) / ∫₀¹ r^{n−1} (r^{2−n/k} − 1)^k dr
//! ```
//!
//! together with the two-sided maximum-principle bounds `γ₁ <= λ <= γ₂`.

use num_bigint::BigInt;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::quad_weighted;
use crate::radial::{binomial_f64, HessianOrder};
use crate::rational::{factorial, factorial_exact, ExactRational};

/// Relative guard used when comparing bounds in floating point.
pub const COMPARE_GUARD: f64 = 1e-12;

fn check_dimension(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension must be >= 2, got {n}"
        )));
    }
    Ok(())
}

/// Exact `C(n, k)`.
pub fn binomial_exact(n: u64, k: u64) -> Result<ExactRational> {
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "binomial needs 0 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    Ok(ExactRational::from_integer(acc))
}

/// Euler's first integral `∫₀¹ r^{a−1} (1 − r)^{b−1} dr = (a−1)!(b−1)!/(a+b−1)!`.
pub fn beta_integral_exact(a: u64, b: u64) -> Result<ExactRational> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidArgument(format!(
            "Beta integral needs positive arguments, got ({a}, {b})"
        )));
    }
    Ok(ExactRational::new(
        factorial(a - 1) * factorial(b - 1),
        factorial(a + b - 1),
    ))
}

/// `C(2n, n)`, the lower bound on `λ(n)^n`.
pub fn ma_lower_exact(n: u32) -> Result<ExactRational> {
    check_dimension(n)?;
    binomial_exact(2 * n as u64, n as u64)
}

/// `C(2n, n)^{1/n}`.
pub fn ma_lower(n: u32) -> Result<f64> {
    Ok(ma_lower_exact(n)?.root(n))
}

/// `C(2n, n)(2n + 1)/(n + 1)`, the upper bound on `λ(n)^n`.
pub fn ma_upper_exact(n: u32) -> Result<ExactRational> {
    check_dimension(n)?;
    let n64 = n as u64;
    Ok(binomial_exact(2 * n64, n64)? * ExactRational::new(2 * n64 + 1, n64 + 1))
}

pub fn ma_upper(n: u32) -> Result<f64> {
    Ok(ma_upper_exact(n)?.root(n))
}

/// `4 (2n)^{−1/n}`, the closed lower envelope of `λ(n)`.
pub fn ma_lower_floor(n: u32) -> f64 {
    4.0 * (2.0 * n as f64).powf(-1.0 / n as f64)
}

/// Upper bound `λ(k; n) <= root <= coarse`.
#[derive(Debug, Clone, PartialEq)]
pub struct KUpper {
    /// `(n + k + 1)! / (k! (k + 1)! (n − k + 1)!)`, bounding `λ^k`.
    pub exact: ExactRational,
    /// `exact^{1/k}`.
    pub root: f64,
    /// `2^{(2n + k + 1)/k}`.
    pub coarse: f64,
}

pub fn khessian_upper(ord: HessianOrder) -> KUpper {
    let (k, n) = (ord.k() as u64, ord.n() as u64);
    let exact = ExactRational::new(
        factorial(n + k + 1),
        factorial(k) * factorial(k + 1) * factorial(n - k + 1),
    );
    let root = exact.root(ord.k());
    let coarse = 2f64.powf((2 * n + k + 1) as f64 / k as f64);
    KUpper {
        exact,
        root,
        coarse,
    }
}

/// `max{(n/k − 2)(n/k)^{(k−1)/k}, 4(2n)^{−1/n}}`; the first branch only
/// participates when `n/k > 2`.
pub fn khessian_lower_simple(ord: HessianOrder) -> f64 {
    let floor = ma_lower_floor(ord.n());
    let (k, n) = (ord.k(), ord.n());
    if n > 2 * k {
        let x = ord.ratio();
        let branch = (x - 2.0) * x.powf((k as f64 - 1.0) / k as f64);
        branch.max(floor)
    } else {
        floor
    }
}

/// `λ^k` lower bound from the Hölder argument (the quotient before taking
/// the `k`-th root).
pub fn khessian_lower_holder_power(ord: HessianOrder, tol: f64) -> Result<f64> {
    Ok(holder_log_power(ord, tol)?.exp())
}

/// `k`-th root of [`khessian_lower_holder_power`].
pub fn khessian_lower_holder(ord: HessianOrder, tol: f64) -> Result<f64> {
    Ok((holder_log_power(ord, tol)? / ord.k() as f64).exp())
}

fn holder_log_power(ord: HessianOrder, tol: f64) -> Result<f64> {
    let (k, n) = (ord.k(), ord.n());
    if n == 2 * k {
        return Err(Error::HolderCriticalRatio);
    }
    let x = ord.ratio();
    let ki = k as i32;
    // Signs (−1)^k of numerator and denominator cancel when n/k < 2, so both
    // are evaluated in absolute value.
    let integral = if x > 2.0 {
        // r^{n−1}(r^{2−x} − 1)^k = r^{2k−1}(1 − r^{x−2})^k
        let p = x - 2.0;
        quad_weighted(
            |r: f64| r.powi(2 * ki - 1) * (1.0 - r.powf(p)).powi(ki),
            tol,
        )?
    } else {
        let p = 2.0 - x;
        let m = n as i32 - 1;
        quad_weighted(|r: f64| r.powi(m) * (1.0 - r.powf(p)).powi(ki), tol)?
    };
    let ln_num =
        k as f64 * (x - 2.0).abs().ln() + binomial_f64(n - 1, k - 1).ln() - (k as f64).ln();
    Ok(ln_num - integral.ln())
}

/// The logarithmic form of the Hölder bound at `n = 2k`, where
/// `(r^{2−n/k} − 1)/(n/k − 2)` degenerates to `ln(1/r)`:
///
/// ```text
///   λ^k >= k⁻¹ C(n−1, k−1) / ∫₀¹ r^{n−1} ln(1/r)^k dr = k⁻¹ C(n−1, k−1) n^{k+1} / k!
/// ```
pub fn khessian_lower_holder_log_exact(ord: HessianOrder) -> Result<ExactRational> {
    let (k, n) = (ord.k() as u64, ord.n() as u64);
    if n != 2 * k {
        return Err(Error::InvalidArgument(format!(
            "logarithmic Hölder variant applies only at n = 2k, got {ord}"
        )));
    }
    let c = binomial_exact(n - 1, k - 1)?;
    let np = ExactRational::from_integer(BigInt::from(n).pow(k as u32 + 1));
    Ok(c * np / (ExactRational::from(k) * factorial_exact(k)))
}

pub fn khessian_lower_holder_log(ord: HessianOrder) -> Result<f64> {
    Ok(khessian_lower_holder_log_exact(ord)?.root(ord.k()))
}

/// Maximum-principle bounds `(γ₁, γ₂)`:
/// `γ₁ = 2 C(n,k)^{1/k}`, `γ₂ = 2 [(n−1)!/(k!(n−k)!) ((n+2k)/(k+1))^{k+1}]^{1/k}`.
pub fn bp_bounds(ord: HessianOrder) -> (f64, f64) {
    let (k, n) = (ord.k() as u64, ord.n() as u64);
    if n > EXACT_MAX_N {
        return bp_bounds_log(ord);
    }
    let c = binomial_exact(n, k).expect("k <= n");
    let gamma1 = 2.0 * c.root(ord.k());
    let inner = ExactRational::new(factorial(n - 1), factorial(k) * factorial(n - k))
        * ExactRational::new(n + 2 * k, k + 1).pow(ord.k() + 1);
    let gamma2 = 2.0 * inner.root(ord.k());
    (gamma1, gamma2)
}

/// Above this dimension [`bp_bounds`] is evaluated through `lnΓ`.
pub const EXACT_MAX_N: u64 = 170;

fn bp_bounds_log(ord: HessianOrder) -> (f64, f64) {
    let (k, n) = (ord.k() as f64, ord.n() as f64);
    let ln_c = ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
    let ln_inner = ln_gamma(n) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
        + (k + 1.0) * ((n + 2.0 * k) / (k + 1.0)).ln();
    (2.0 * (ln_c / k).exp(), 2.0 * (ln_inner / k).exp())
}

/// Exact check of `2^{2n}/(2n) <= C(2n,n) <= C(2n,n)(2n+1)/(n+1) <= 2^{2n}`.
pub fn sandwich_check(n: u32) -> bool {
    if n < 1 {
        return false;
    }
    let n64 = n as u64;
    let four_n = ExactRational::from_integer(BigInt::from(1) << (2 * n64));
    let low = &four_n / &ExactRational::from(2 * n64);
    let c = binomial_exact(2 * n64, n64).expect("n <= 2n");
    let up = &c * &ExactRational::new(2 * n64 + 1, n64 + 1);
    low <= c && c <= up && up <= four_n
}

/// `|B₁ⁿ| = coeff · π^{pi_power}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallVolume {
    pub coeff: ExactRational,
    pub pi_power: u32,
    pub value: f64,
}

/// `Γ(1 + n/2) = q` (n even) or `q √π` (n odd); returns `(q, has_sqrt_pi)`.
pub fn gamma_one_plus_half(n: u32) -> (ExactRational, bool) {
    let n64 = n as u64;
    if n.is_multiple_of(2) {
        (factorial_exact(n64 / 2), false)
    } else {
        // Γ(1 + n/2) = n!! / 2^{(n+1)/2} · √π
        let dfact = (1..=n64).step_by(2).fold(BigInt::from(1), |a, i| a * i);
        (
            ExactRational::new(dfact, BigInt::from(1) << n64.div_ceil(2)),
            true,
        )
    }
}

/// Volume of the unit ball `π^{n/2}/Γ(1 + n/2)` with the `√π` factors
/// cleared symbolically.
pub fn ball_volume(n: u32) -> Result<BallVolume> {
    if n < 1 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let (g, _) = gamma_one_plus_half(n);
    let coeff = g.recip();
    let pi_power = n / 2;
    let value = (coeff.ln_abs() + pi_power as f64 * std::f64::consts::PI.ln()).exp();
    Ok(BallVolume {
        coeff,
        pi_power,
        value,
    })
}

/// Relative slack of [`volume_extremal_check`].
pub const VOLUME_SLACK: f64 = 1e-9;

/// `lam^n |B₁ⁿ|² <= (4π)^n / Γ(1 + n/2)²`, with the powers of `π` cancelled
/// symbolically before one float comparison in log space.
pub fn volume_extremal_check(n: u32, lam: f64) -> Result<bool> {
    let vol = ball_volume(n)?;
    if !(lam > 0.0) {
        return Ok(lam == 0.0);
    }
    let (g, sqrt_pi) = gamma_one_plus_half(n);
    // lhs = lam^n · coeff² · π^{2p};  rhs = 4^n / q² · π^{n − [n odd]}
    let lhs_pi = 2 * vol.pi_power;
    let rhs_pi = n - u32::from(sqrt_pi);
    let rhs_coeff = ExactRational::from_integer(BigInt::from(1) << (2 * n as u64)) / g.pow(2);
    let common = lhs_pi.min(rhs_pi);
    let ln_pi = std::f64::consts::PI.ln();
    let ln_lhs = n as f64 * lam.ln() + 2.0 * vol.coeff.ln_abs() + (lhs_pi - common) as f64 * ln_pi;
    let ln_rhs = rhs_coeff.ln_abs() + (rhs_pi - common) as f64 * ln_pi;
    Ok(ln_lhs <= ln_rhs + VOLUME_SLACK.ln_1p())
}

/// One row of the diagonal limit table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRow {
    pub k: u32,
    pub n: u32,
    pub upper_root: f64,
}

/// Upper-bound roots via log-Gamma:
/// `exp[(lnΓ(n+k+2) − lnΓ(k+1) − lnΓ(k+2) − lnΓ(n−k+2))/k]`.
pub fn stirling_limit_table(pairs: &[HessianOrder]) -> Vec<LimitRow> {
    pairs
        .iter()
        .map(|ord| {
            let (k, n) = (ord.k() as f64, ord.n() as f64);
            let ln = ln_gamma(n + k + 2.0)
                - ln_gamma(k + 1.0)
                - ln_gamma(k + 2.0)
                - ln_gamma(n - k + 2.0);
            LimitRow {
                k: ord.k(),
                n: ord.n(),
                upper_root: (ln / k).exp(),
            }
        })
        .collect()
}

/// All bounds for one order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub order: HessianOrder,
    /// `C(2n,n)^{1/n}` (only for `k = n`).
    pub ma_lower: Option<f64>,
    /// `[C(2n,n)(2n+1)/(n+1)]^{1/n}` (only for `k = n`).
    pub ma_upper: Option<f64>,
    pub k_upper_exact: ExactRational,
    pub k_upper: f64,
    pub k_upper_coarse: f64,
    pub k_lower_simple: f64,
    /// Undefined at `n = 2k` unless the logarithmic variant was requested.
    pub k_lower_holder: Option<f64>,
    pub bp_lower: f64,
    pub bp_upper: f64,
}

impl BoundsReport {
    /// Evaluates every bound; `log_variant` fills the Hölder slot at `n = 2k`
    /// with the logarithmic form instead of leaving it empty.
    pub fn compute(ord: HessianOrder, tol: f64, log_variant: bool) -> Result<Self> {
        let (ma_lower, ma_upper) = if ord.is_monge_ampere() {
            (Some(ma_lower(ord.n())?), Some(ma_upper(ord.n())?))
        } else {
            (None, None)
        };
        let up = khessian_upper(ord);
        let k_lower_holder = match khessian_lower_holder(ord, tol) {
            Ok(v) => Some(v),
            Err(Error::HolderCriticalRatio) if log_variant => Some(khessian_lower_holder_log(ord)?),
            Err(Error::HolderCriticalRatio) => None,
            Err(e) => return Err(e),
        };
        let (bp_lower, bp_upper) = bp_bounds(ord);
        Ok(Self {
            order: ord,
            ma_lower,
            ma_upper,
            k_upper_exact: up.exact,
            k_upper: up.root,
            k_upper_coarse: up.coarse,
            k_lower_simple: khessian_lower_simple(ord),
            k_lower_holder,
            bp_lower,
            bp_upper,
        })
    }

    pub fn lower_bounds(&self) -> Vec<f64> {
        let mut v = vec![self.k_lower_simple, self.bp_lower];
        v.extend(self.ma_lower);
        v.extend(self.k_lower_holder);
        v
    }

    pub fn upper_bounds(&self) -> Vec<f64> {
        let mut v = vec![self.k_upper, self.k_upper_coarse, self.bp_upper];
        v.extend(self.ma_upper);
        v
    }

    pub fn max_lower(&self) -> f64 {
        self.lower_bounds()
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_upper(&self) -> f64 {
        self.upper_bounds()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// `max lower − slack <= lam <= min upper + slack`.
    pub fn contains(&self, lam: f64, slack: f64) -> bool {
        self.max_lower() - slack <= lam && lam <= self.min_upper() + slack
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn order(k: u32, n: u32) -> HessianOrder {
        HessianOrder::new(k, n).unwrap()
    }

    fn int(v: u64) -> ExactRational {
        ExactRational::from(v)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_exact(4, 2).unwrap(), int(6));
        assert_eq!(binomial_exact(4, 0).unwrap(), int(1));
        assert!(binomial_exact(2, 3).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_eq!(
            beta_integral_exact(2, 3).unwrap(),
            ExactRational::new(1, 12)
        );
        assert_eq!(beta_integral_exact(1, 1).unwrap(), int(1));
        assert_eq!(
            beta_integral_exact(2, 4).unwrap(),
            ExactRational::new(1, 20)
        );
        assert!(beta_integral_exact(0, 3).is_err());
    }

    #[test]
    fn monge_ampere_bounds_small_n() {
        assert_eq!(ma_lower_exact(2).unwrap(), int(6));
        assert_eq!(ma_upper_exact(2).unwrap(), int(10));
        assert_eq!(ma_lower_exact(3).unwrap(), int(20));
        assert_eq!(ma_upper_exact(3).unwrap(), int(35));
        assert_relative_eq!(ma_lower(2).unwrap(), 6f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(ma_upper(3).unwrap(), 35f64.cbrt(), max_relative = 1e-15);
        assert_eq!(ma_lower_floor(2), 2.0);
        assert!(ma_lower_exact(1).is_err());
    }

    #[test]
    fn upper_examples() {
        let u = khessian_upper(order(2, 3));
        assert_eq!(u.exact, int(30));
        assert_relative_eq!(u.root, 30f64.sqrt(), max_relative = 1e-15);
        assert_eq!(khessian_upper(order(2, 2)).exact, int(10));
        let u = khessian_upper(order(1, 2));
        assert_eq!(u.exact, int(6));
        assert_eq!(u.root, 6.0);
        assert_eq!(u.coarse, 64.0);
    }

    #[test]
    fn simple_lower_examples() {
        assert_eq!(khessian_lower_simple(order(2, 2)), 2.0);
        assert_relative_eq!(
            khessian_lower_simple(order(1, 10)),
            8.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            khessian_lower_simple(order(2, 3)),
            4.0 * 6f64.powf(-1.0 / 3.0),
            max_relative = 1e-15
        );
    }

    #[test]
    fn holder_examples() {
        let p = khessian_lower_holder_power(order(2, 3), 1e-13).unwrap();
        assert_relative_eq!(p, 21.0, max_relative = 1e-11);
        assert_relative_eq!(
            khessian_lower_holder(order(1, 4), 1e-13).unwrap(),
            8.0,
            max_relative = 1e-11
        );
        assert_eq!(
            khessian_lower_holder(order(2, 4), 1e-12),
            Err(Error::HolderCriticalRatio)
        );
        for n in 2..=8 {
            let h = khessian_lower_holder_power(order(n, n), 1e-13).unwrap();
            let c = ma_lower_exact(n).unwrap().to_f64();
            assert_relative_eq!(h, c, max_relative = 1e-10);
        }
    }

    #[test]
    fn holder_log_variant_matches_quadrature() {
        for k in 1..=6u32 {
            let ord = order(k, 2 * k);
            let exact = khessian_lower_holder_log_exact(ord).unwrap().to_f64();
            let ki = k as i32;
            let integral = quad_weighted(
                |r: f64| {
                    if r > 0.0 {
                        r.powi(2 * ki - 1) * (-r.ln()).powi(ki)
                    } else {
                        0.0
                    }
                },
                1e-13,
            )
            .unwrap();
            let q = binomial_f64(2 * k - 1, k - 1) / k as f64 / integral;
            assert_relative_eq!(exact, q, max_relative = 1e-10);
        }
        assert!(khessian_lower_holder_log(order(2, 3)).is_err());
    }

    #[test]
    fn bp_examples() {
        let (g1, g2) = bp_bounds(order(2, 2));
        assert_relative_eq!(g1, 2.0, max_relative = 1e-15);
        assert_relative_eq!(g2, 4.0, max_relative = 1e-15);
        assert_relative_eq!(bp_bounds(order(7, 7)).0, 2.0, max_relative = 1e-15);
        assert_relative_eq!(
            bp_bounds(order(2, 3)).0,
            2.0 * 3f64.sqrt(),
            max_relative = 1e-15
        );
        // γ₂(n, n) >= 4, tending to 6.
        for n in 2..60 {
            assert!(bp_bounds(order(n, n)).1 >= 4.0 - 1e-12);
        }
        assert!((bp_bounds(order(3000, 3000)).1 - 6.0).abs() < 0.05);
        // both paths agree where they meet
        for ord in [order(1, 170), order(60, 170), order(170, 170)] {
            let (e1, e2) = bp_bounds(ord);
            let (l1, l2) = bp_bounds_log(ord);
            assert_relative_eq!(e1, l1, max_relative = 1e-11);
            assert_relative_eq!(e2, l2, max_relative = 1e-11);
        }
    }

    #[test]
    fn sandwich_small() {
        assert!(sandwich_check(1));
        assert!(sandwich_check(2));
        assert!(sandwich_check(100));
        assert!(!sandwich_check(0));
    }

    #[test]
    fn ball_volumes() {
        let v = ball_volume(2).unwrap();
        assert_eq!((v.coeff.clone(), v.pi_power), (int(1), 1));
        assert_relative_eq!(v.value, std::f64::consts::PI, max_relative = 1e-15);
        let v = ball_volume(3).unwrap();
        assert_eq!((v.coeff.clone(), v.pi_power), (ExactRational::new(4, 3), 1));
        let v = ball_volume(4).unwrap();
        assert_eq!((v.coeff.clone(), v.pi_power), (ExactRational::new(1, 2), 2));
        let v = ball_volume(1).unwrap();
        assert_eq!((v.coeff.clone(), v.pi_power), (int(2), 0));
    }

    #[test]
    fn volume_check_examples() {
        assert!(volume_extremal_check(2, 10f64.sqrt()).unwrap());
        assert!(!volume_extremal_check(2, 4.1).unwrap());
        assert!(volume_extremal_check(3, 35f64.cbrt()).unwrap());
        assert!(volume_extremal_check(5, 4.0).unwrap());
        assert!(!volume_extremal_check(5, 4.0 * (1.0 + 1e-8)).unwrap());
    }

    #[test]
    fn limit_table_matches_exact_roots() {
        let pairs: Vec<_> = (2..=40).map(|n| order(n, n)).collect();
        for row in stirling_limit_table(&pairs) {
            let exact = khessian_upper(order(row.k, row.n)).root;
            assert_relative_eq!(row.upper_root, exact, max_relative = 1e-12);
        }
        let t = stirling_limit_table(&[order(2, 2)]);
        assert_relative_eq!(t[0].upper_root, 10f64.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn report_orders_bounds() {
        let r = BoundsReport::compute(order(2, 3), 1e-12, false).unwrap();
        assert!(r.ma_lower.is_none());
        assert_relative_eq!(
            r.k_lower_holder.unwrap(),
            21f64.sqrt(),
            max_relative = 1e-11
        );
        assert!(r.max_lower() <= r.min_upper());
        let r = BoundsReport::compute(order(2, 4), 1e-12, false).unwrap();
        assert!(r.k_lower_holder.is_none());
        let r = BoundsReport::compute(order(2, 4), 1e-12, true).unwrap();
        assert!(r.k_lower_holder.is_some());
    }
}
