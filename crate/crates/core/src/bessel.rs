//! First Dirichlet eigenvalue of the Laplacian on the unit ball, `j²_{n/2−1}`,
//! from the power series of `J_ν` and bisection on its first sign change.
//!
//! This is the independent reference for the `k = 1` solves.

use crate::error::{Error, Result};

const MAX_TERMS: usize = 500;

/// `J_ν(x) · Γ(ν + 1) (2/x)^ν`, i.e. the power series of `J_ν` without its
/// positive prefactor. Same sign as `J_ν(x)` for `x > 0`.
pub fn bessel_j_reduced(nu: f64, x: f64) -> Result<f64> {
    let q = -0.25 * x * x;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    for m in 1..MAX_TERMS {
        let mf = m as f64;
        term *= q / (mf * (mf + nu));
        // Kahan summation: the alternating series cancels heavily at the
        // larger zeros.
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && mf > 0.5 * x {
            return Ok(sum);
        }
    }
    Err(Error::SeriesFailed(format!(
        "Bessel series for nu = {nu} at x = {x} did not converge"
    )))
}

/// First positive zero of `J_ν`.
pub fn bessel_first_zero(nu: f64) -> Result<f64> {
    // j_{ν,1} > ν; zeros are spaced by about π, so a 0.05 scan cannot skip
    // the first one.
    let step = 0.05;
    let mut a = nu.max(step);
    let mut fa = bessel_j_reduced(nu, a)?;
    let mut b = a + step;
    let mut fb = bessel_j_reduced(nu, b)?;
    while fa.signum() == fb.signum() {
        a = b;
        fa = fb;
        b += step;
        fb = bessel_j_reduced(nu, b)?;
        if b > nu + 100.0 {
            return Err(Error::SeriesFailed(format!(
                "no sign change found for nu = {nu}"
            )));
        }
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = bessel_j_reduced(nu, m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// `λ(1; n) = j²_{n/2 − 1}`.
pub fn laplace_reference(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension must be >= 2, got {n}"
        )));
    }
    let j = bessel_first_zero(n as f64 / 2.0 - 1.0)?;
    Ok(j * j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn j0_first_zero() {
        assert_relative_eq!(
            bessel_first_zero(0.0).unwrap(),
            2.404_825_557_695_773,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            laplace_reference(2).unwrap(),
            5.783_185_962_946_784,
            max_relative = 1e-13
        );
    }

    #[test]
    fn half_integer_orders_are_closed_form() {
        // J_{1/2} ∝ sin(x)/√x, zero at π.
        assert_relative_eq!(
            laplace_reference(3).unwrap(),
            std::f64::consts::PI.powi(2),
            max_relative = 1e-13
        );
        // J_{3/2} zero solves tan x = x: 4.493409457909064.
        assert_relative_eq!(
            bessel_first_zero(1.5).unwrap(),
            4.493_409_457_909_064,
            max_relative = 1e-13
        );
    }

    #[test]
    fn integer_orders_table() {
        // j_{1,1}, j_{2,1}, j_{4,1}
        assert_relative_eq!(
            bessel_first_zero(1.0).unwrap(),
            3.831_705_970_207_512,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            bessel_first_zero(2.0).unwrap(),
            5.135_622_301_840_683,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            bessel_first_zero(4.0).unwrap(),
            7.588_342_434_503_804,
            max_relative = 1e-12
        );
    }

    #[test]
    fn quadratic_growth_in_dimension() {
        // j_ν ~ ν for large ν, so j²/n² decreases toward 1/4.
        let mut prev = f64::INFINITY;
        for n in 10..=50 {
            let v = laplace_reference(n).unwrap() / (n as f64).powi(2);
            assert!((0.25..=0.6).contains(&v), "n = {n}: {v}");
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(laplace_reference(1).is_err());
    }
}
