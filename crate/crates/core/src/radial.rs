//! Radial calculus on the unit ball.
//!
//! A radial function `w(x) = u(|x|)` has Hessian eigenvalues `u''(r)` (once)
//! and `u'(r)/r` (with multiplicity `n - 1`). Everything in this module works
//! with that reduced spectrum: the elementary symmetric functions, the
//! pointwise k-Hessian `S_k(D²w)`, Gårding-cone admissibility and the radial
//! form of the Hessian Rayleigh quotient
//!
//! ```text
//!            k⁻¹ C(n−1, k−1) ∫₀¹ r^{n−k} |u'|^{k+1} dr
//!   Q_k[u] = ------------------------------------------
//!                   ∫₀¹ r^{n−1} |u|^{k+1} dr
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature::{self, quad_weighted, quad_with_breakpoints};

/// The pair `(k, n)`: Hessian order `k` in ambient dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HessianOrder {
    k: u32,
    n: u32,
}

impl HessianOrder {
    pub fn new(k: u32, n: u32) -> Result<Self> {
        if n < 2 || k < 1 || k > n {
            return Err(Error::InvalidOrder { k, n });
        }
        Ok(Self { k, n })
    }

    /// The Monge–Ampère order `(n, n)`.
    pub fn monge_ampere(n: u32) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_monge_ampere(&self) -> bool {
        self.k == self.n
    }

    /// `n / k` as a float.
    pub fn ratio(&self) -> f64 {
        self.n as f64 / self.k as f64
    }
}

impl fmt::Display for HessianOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, n={})", self.k, self.n)
    }
}

/// Binomial coefficient as a float (exact for every argument used here).
pub fn binomial_f64(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Minimum number of grid intervals.
pub const MIN_INTERVALS: usize = 16;

/// Radii `0 = r₀ < r₁ < … < r_M = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    uniform: bool,
}

impl RadialGrid {
    /// Uniform grid with `intervals` cells.
    pub fn uniform(intervals: usize) -> Result<Self> {
        if intervals < MIN_INTERVALS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_INTERVALS} intervals, got {intervals}"
            )));
        }
        let m = intervals as f64;
        let mut nodes: Vec<f64> = (0..=intervals).map(|i| i as f64 / m).collect();
        nodes[intervals] = 1.0;
        Ok(Self {
            nodes,
            uniform: true,
        })
    }

    /// Arbitrary node list; validated against the grid invariants.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < MIN_INTERVALS + 1 {
            return Err(Error::InvalidGrid(format!(
                "need at least {} nodes, got {}",
                MIN_INTERVALS + 1,
                nodes.len()
            )));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidGrid(format!(
                "first radius must be 0, got {}",
                nodes[0]
            )));
        }
        if *nodes.last().unwrap() != 1.0 {
            return Err(Error::InvalidGrid(format!(
                "last radius must be 1, got {}",
                nodes.last().unwrap()
            )));
        }
        if let Some(i) = nodes.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid(format!(
                "radii must be strictly increasing (nodes {} and {})",
                i,
                i + 1
            )));
        }
        Ok(Self {
            nodes,
            uniform: false,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of intervals `M`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index `i` with `r_i <= r <= r_{i+1}`, clamped to a valid cell.
    fn cell(&self, r: f64) -> usize {
        let m = self.intervals();
        if r <= 0.0 {
            return 0;
        }
        if r >= 1.0 {
            return m - 1;
        }
        if self.uniform {
            ((r * m as f64) as usize).min(m - 1)
        } else {
            match self.nodes.binary_search_by(|x| x.total_cmp(&r)) {
                Ok(i) => i.min(m - 1),
                Err(i) => (i - 1).min(m - 1),
            }
        }
    }
}

/// Anything that can report `u(r)` and `u'(r)` on `[0, 1]`.
pub trait RadialFunction {
    fn value(&self, r: f64) -> f64;
    fn slope(&self, r: f64) -> f64;
    /// Points where the function is only piecewise smooth; quadrature starts
    /// with these as panel boundaries.
    fn breakpoints(&self) -> Option<&[f64]> {
        None
    }
}

/// `u(r) = (r² − 1)/2`, the restriction of `(|x|² − 1)/2`. Identity Hessian.
#[derive(Debug, Clone, Copy, Default)]
pub struct Quadratic;

impl RadialFunction for Quadratic {
    fn value(&self, r: f64) -> f64 {
        0.5 * (r * r - 1.0)
    }
    fn slope(&self, r: f64) -> f64 {
        r
    }
}

/// The cone `u(r) = r − 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Cone;

impl RadialFunction for Cone {
    fn value(&self, r: f64) -> f64 {
        r - 1.0
    }
    fn slope(&self, _r: f64) -> f64 {
        1.0
    }
}

/// `u(r) = (r² + ε)^{1/2} − (1 + ε)^{1/2}`, the smooth convex approximation of
/// the cone.
#[derive(Debug, Clone, Copy)]
pub struct SmoothedCone {
    epsilon: f64,
}

impl SmoothedCone {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "smoothing parameter must be positive and finite, got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Exact second derivative `ε (r² + ε)^{−3/2}`.
    pub fn curvature(&self, r: f64) -> f64 {
        self.epsilon / (r * r + self.epsilon).powf(1.5)
    }
}

impl RadialFunction for SmoothedCone {
    fn value(&self, r: f64) -> f64 {
        // Difference of square roots written without cancellation.
        let e = self.epsilon;
        (r * r - 1.0) / ((r * r + e).sqrt() + (1.0 + e).sqrt())
    }
    fn slope(&self, r: f64) -> f64 {
        r / (r * r + self.epsilon).sqrt()
    }
}

/// A radial function sampled on a grid: values `u_i` and slopes `u'_i`.
///
/// Invariants: `u_i <= 0`, `u_M = 0`, `u'_i >= 0`, `u'_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    grid: RadialGrid,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: RadialGrid, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        let len = grid.len();
        if values.len() != len || slopes.len() != len {
            return Err(Error::InvalidProfile(format!(
                "expected {len} values and slopes, got {} and {}",
                values.len(),
                slopes.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile(format!(
                "value at node {i} is not finite"
            )));
        }
        if let Some(i) = slopes.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile(format!(
                "slope at node {i} is not finite"
            )));
        }
        if let Some(i) = values.iter().position(|&v| v > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "values must be <= 0 (node {i} has u = {})",
                values[i]
            )));
        }
        if values[len - 1] != 0.0 {
            return Err(Error::InvalidProfile(format!(
                "boundary condition u(1) = 0 violated (u(1) = {})",
                values[len - 1]
            )));
        }
        if let Some(i) = slopes.iter().position(|&s| s < 0.0) {
            return Err(Error::InvalidProfile(format!(
                "slopes must be >= 0 (node {i} has u' = {})",
                slopes[i]
            )));
        }
        if slopes[0] != 0.0 {
            return Err(Error::InvalidProfile(format!(
                "slope at r = 0 must be 0 (got {})",
                slopes[0]
            )));
        }
        Ok(Self {
            grid,
            values,
            slopes,
        })
    }

    /// Builds a profile from values only; slopes come from second-order
    /// finite differences and the slope at `r = 0` is set to 0 (radial
    /// symmetry).
    pub fn from_values(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidProfile(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        let mut slopes = differentiate(grid.nodes(), &values);
        slopes[0] = 0.0;
        Self::new(grid, values, slopes)
    }

    /// Samples an analytic radial function. The slope at `r = 0` is replaced
    /// by 0 so that kinked functions such as the cone are stored with the
    /// symmetric subgradient at the tip.
    pub fn sample<F: RadialFunction>(f: &F, grid: RadialGrid) -> Result<Self> {
        let values: Vec<f64> = grid.nodes().iter().map(|&r| f.value(r)).collect();
        let mut slopes: Vec<f64> = grid.nodes().iter().map(|&r| f.slope(r)).collect();
        slopes[0] = 0.0;
        let mut values = values;
        let last = values.len() - 1;
        if values[last].abs() < 1e-15 {
            values[last] = 0.0;
        }
        Self::new(grid, values, slopes)
    }

    pub fn quadratic(grid: RadialGrid) -> Self {
        Self::sample(&Quadratic, grid).expect("quadratic profile satisfies the invariants")
    }

    /// Grid samples of `r − 1` with slope 0 stored at the tip.
    pub fn cone(grid: RadialGrid) -> Self {
        Self::sample(&Cone, grid).expect("cone profile satisfies the invariants")
    }

    /// The identically zero profile.
    pub fn zero(grid: RadialGrid) -> Self {
        let len = grid.len();
        Self {
            grid,
            values: vec![0.0; len],
            slopes: vec![0.0; len],
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn radii(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `max |u|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `u''(r_i)` by centered differences of the stored slopes (one-sided
    /// three-point stencils at the ends).
    pub fn curvature(&self, i: usize) -> Result<f64> {
        let len = self.len();
        if i >= len {
            return Err(Error::IndexOutOfRange { index: i, len });
        }
        let r = self.grid.nodes();
        let s = &self.slopes;
        let j = i.clamp(1, len - 2);
        Ok(lagrange_derivative(
            &r[j - 1..=j + 1],
            &s[j - 1..=j + 1],
            r[i],
        ))
    }

    /// `u''` at node `i` from the centered five-point stencil on the slopes,
    /// falling back to [`curvature`](Self::curvature) within two nodes of
    /// either end. More accurate on smooth profiles, but it can overshoot to
    /// negative values next to a kink.
    pub fn curvature_fine(&self, i: usize) -> Result<f64> {
        let len = self.len();
        if i >= 2 && i + 2 < len {
            let r = self.grid.nodes();
            let s = &self.slopes;
            return Ok(lagrange_derivative(
                &r[i - 2..=i + 2],
                &s[i - 2..=i + 2],
                r[i],
            ));
        }
        self.curvature(i)
    }
}

/// Derivative at `at` of the Lagrange polynomial through `(x_j, y_j)`.
fn lagrange_derivative(x: &[f64], y: &[f64], at: f64) -> f64 {
    let m = x.len();
    // The weights sum to zero; differencing against the middle value keeps
    // constant data exact.
    let y_ref = y[m / 2];
    let mut total = 0.0;
    for j in 0..m {
        let denom: f64 = (0..m).filter(|&l| l != j).map(|l| x[j] - x[l]).product();
        // d/dt of prod_{l != j}(t − x_l)
        let mut num = 0.0;
        for skip in (0..m).filter(|&l| l != j) {
            num += (0..m)
                .filter(|&l| l != j && l != skip)
                .map(|l| at - x[l])
                .product::<f64>();
        }
        total += (y[j] - y_ref) * num / denom;
    }
    total
}

fn differentiate(x: &[f64], y: &[f64]) -> Vec<f64> {
    let len = x.len();
    (0..len)
        .map(|i| {
            let j = i.clamp(1, len - 2);
            lagrange_derivative(&x[j - 1..=j + 1], &y[j - 1..=j + 1], x[i])
        })
        .collect()
}

impl RadialFunction for RadialProfile {
    /// Cubic Hermite interpolation of the stored values and slopes.
    fn value(&self, r: f64) -> f64 {
        let i = self.grid.cell(r);
        let x = self.grid.nodes();
        let h = x[i + 1] - x[i];
        let t = (r - x[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d1
    }

    /// Derivative of the Hermite interpolant.
    fn slope(&self, r: f64) -> f64 {
        let i = self.grid.cell(r);
        let x = self.grid.nodes();
        let h = x[i + 1] - x[i];
        let t = (r - x[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * d1)
            / h
    }

    fn breakpoints(&self) -> Option<&[f64]> {
        Some(self.grid.nodes())
    }
}

/// Hessian spectrum of a radial function at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSpectrum {
    /// `u''(r)`.
    pub radial: f64,
    /// `u'(r)/r`, or its limit `u''(0)` at the origin.
    pub tangential: f64,
    /// `n − 1`.
    pub tangential_multiplicity: u32,
}

impl RadialSpectrum {
    /// The full multiset of `n` eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.tangential_multiplicity as usize + 1);
        v.push(self.radial);
        v.extend(std::iter::repeat_n(
            self.tangential,
            self.tangential_multiplicity as usize,
        ));
        v
    }
}

/// Hessian spectrum at node `i`.
pub fn radial_hessian_spectrum(
    p: &RadialProfile,
    ord: HessianOrder,
    i: usize,
) -> Result<RadialSpectrum> {
    let radial = p.curvature(i)?;
    let r = p.radii()[i];
    let tangential = if r == 0.0 { radial } else { p.slopes[i] / r };
    Ok(RadialSpectrum {
        radial,
        tangential,
        tangential_multiplicity: ord.n() - 1,
    })
}

/// Elementary symmetric polynomials `σ_0, …, σ_k` of `lams`, by the
/// incremental product recurrence.
pub fn elementary_symmetric(lams: &[f64], k: usize) -> Vec<f64> {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (m, &l) in lams.iter().enumerate() {
        for j in (1..=k.min(m + 1)).rev() {
            e[j] += l * e[j - 1];
        }
    }
    e
}

/// `σ_k(lams)`.
pub fn sigma_k(lams: &[f64], k: usize) -> Result<f64> {
    if k < 1 || k > lams.len() {
        return Err(Error::InvalidArgument(format!(
            "sigma_k needs 1 <= k <= {}, got k = {k}",
            lams.len()
        )));
    }
    Ok(elementary_symmetric(lams, k)[k])
}

/// True iff every node in `[0, 1)` has `σ_j > 0` for `j = 1..=k` on its
/// radial Hessian spectrum. The origin uses the limit spectrum.
pub fn is_k_admissible(p: &RadialProfile, ord: HessianOrder) -> bool {
    let k = ord.k() as usize;
    (0..p.len() - 1).all(|i| match radial_hessian_spectrum(p, ord, i) {
        Ok(spec) => {
            let e = elementary_symmetric(&spec.eigenvalues(), k);
            e[1..].iter().all(|&s| s > 0.0)
        }
        Err(_) => false,
    })
}

/// `S_k(D²w)` at node `i`, from `C(n−1,k−1) t^{k−1} u'' + C(n−1,k) t^k` with
/// `t = u'/r` (or `u''(0)` at the origin).
pub fn sk_radial(p: &RadialProfile, ord: HessianOrder, i: usize) -> Result<f64> {
    let spec = radial_hessian_spectrum(p, ord, i)?;
    Ok(sk_from_spectrum(spec.radial, spec.tangential, ord))
}

/// [`sk_radial`] with `u''` from [`RadialProfile::curvature_fine`].
pub fn sk_radial_fine(p: &RadialProfile, ord: HessianOrder, i: usize) -> Result<f64> {
    let radial = p.curvature_fine(i)?;
    let r = p.radii()[i];
    let tangential = if r == 0.0 { radial } else { p.slopes[i] / r };
    Ok(sk_from_spectrum(radial, tangential, ord))
}

pub(crate) fn sk_from_spectrum(radial: f64, tangential: f64, ord: HessianOrder) -> f64 {
    let (k, n) = (ord.k(), ord.n());
    let t_km1 = tangential.powi(k as i32 - 1);
    binomial_f64(n - 1, k - 1) * t_km1 * radial + binomial_f64(n - 1, k) * t_km1 * tangential
}

/// Numerator and denominator of the radial Rayleigh quotient.
pub fn rayleigh_parts<F: RadialFunction>(f: &F, ord: HessianOrder, tol: f64) -> Result<(f64, f64)> {
    let (k, n) = (ord.k() as i32, ord.n() as i32);
    let num_integrand = |r: f64| r.powi(n - k) * f.slope(r).abs().powi(k + 1);
    let den_integrand = |r: f64| r.powi(n - 1) * f.value(r).abs().powi(k + 1);
    let (num, den) = match f.breakpoints() {
        Some(pts) => (
            quad_with_breakpoints(num_integrand, pts, tol)?,
            quad_with_breakpoints(den_integrand, pts, tol)?,
        ),
        None => (
            quad_weighted(num_integrand, tol)?,
            quad_weighted(den_integrand, tol)?,
        ),
    };
    Ok((binomial_f64(ord.n() - 1, ord.k() - 1) / k as f64 * num, den))
}

/// The radial Hessian Rayleigh quotient `Q_k[u]`; at the eigenfunction it
/// equals `λ(k; n)^k`, and it is at least that for any admissible profile.
pub fn rayleigh_quotient<F: RadialFunction>(f: &F, ord: HessianOrder) -> Result<f64> {
    rayleigh_quotient_with_tol(f, ord, quadrature::DEFAULT_TOL)
}

pub fn rayleigh_quotient_with_tol<F: RadialFunction>(
    f: &F,
    ord: HessianOrder,
    tol: f64,
) -> Result<f64> {
    let (num, den) = rayleigh_parts(f, ord, tol)?;
    if !(den > f64::MIN_POSITIVE) {
        return Err(Error::Degenerate(
            "Rayleigh quotient of a zero profile (denominator vanishes)".into(),
        ));
    }
    Ok(num / den)
}

/// Grid samples of the smoothed cone, with exact slopes.
pub fn smoothed_cone(epsilon: f64, grid: RadialGrid) -> Result<RadialProfile> {
    let f = SmoothedCone::new(epsilon)?;
    RadialProfile::sample(&f, grid)
}
