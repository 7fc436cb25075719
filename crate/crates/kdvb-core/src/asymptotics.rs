//! Tail expansions of the decaying travelling-wave branch.
//!
//! In the Emden-Fowler frame the decaying branch has a power-series tail
//!
//! ```text
//! y(xi) = sum_i c_i xi^{i epsilon},   epsilon = sigma + 2 in (-1/2, 0),
//! ```
//!
//! whose coefficients follow from direct substitution into
//! `y'' = xi^sigma y^2`:
//!
//! ```text
//! c_{i+1} (i+1) epsilon ((i+1) epsilon - 1) = sum_{a+b=i} c_a c_b.
//! ```
//!
//! `c_0 = u_inf` is the limit of `y` at infinity and doubles as the
//! translation parameter of the orbit. Mapped back to the travelling frame
//! the series becomes a sum of decaying exponentials,
//!
//! ```text
//! u(zeta) = -(2 k^2 alpha^2 / beta) sum_i c_i e^{-(i+1) r zeta},
//! r = (k-1) alpha / (2 beta),
//! ```
//!
//! whose leading two terms are
//! `-2 k^2 alpha^2 u_inf / beta * e^{-r zeta}` and
//! `-8 k^4 alpha^2 u_inf^2 / ((k-1)(3k-1) beta) * e^{-2 r zeta}`.
//!
//! A product-form closed expression for the higher coefficients follows from
//! iterating the tail integral equation with only the `2 c_0 c_{i-1}` source
//! retained:
//!
//! ```text
//! c_i = 2^{i-1} u_inf^{i+1} / prod_{j=1}^{i} [ j epsilon (j epsilon - 1) ].
//! ```
//!
//! It agrees with the full recurrence through order 2 and undershoots from
//! order 3 on (it drops products of lower-order corrections such as `c_1^2`);
//! [`series_coefficient_comparison`] exposes the discrepancy. The full
//! recurrence is the series that actually satisfies the Emden-Fowler
//! equation and is used everywhere a tail value is needed.
//!
//! For `lambda = 0` the power series degenerates (`epsilon = 0`) and the tail
//! is algebraic instead: `u ~ -2 alpha / zeta`.

use crate::error::{Error, Result};
use crate::model::{emden_fowler_form, ExponentialFrame, WaveParameters};
use crate::odeint::WaveProfile;

/// Truncated tail expansion in the Emden-Fowler frame, together with the
/// constants needed to evaluate it in the travelling frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TailExpansion {
    /// Amplitude/translation parameter `c_0`. The positive sign gives the
    /// branch with `u < 0`; negative seeds the physical `u > 0` shock tail.
    pub u_inf: f64,
    /// Truncation order: coefficients `c_0 ..= c_m` are kept.
    pub order_m: usize,
    pub coefficients: Vec<f64>,
    /// `sigma + 2`.
    pub epsilon: f64,
    /// Leading exponential decay rate `(k-1) alpha / (2 beta)`.
    pub decay_rate: f64,
    frame: ExponentialFrame,
}

/// Value and derivative of the tail at a point of the travelling frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailValue {
    pub u: f64,
    pub du_dzeta: f64,
}

/// One term of the travelling-frame series: `coefficient * e^{-rate * zeta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTerm {
    pub coefficient: f64,
    pub rate: f64,
}

fn check_epsilon(sigma: f64) -> Result<f64> {
    if !sigma.is_finite() {
        return Err(Error::Domain("non-finite sigma".into()));
    }
    if sigma == -2.0 {
        return Err(Error::SigmaDegenerate);
    }
    if !(-2.5 < sigma && sigma < -2.0) {
        return Err(Error::SigmaOutOfRange { sigma });
    }
    Ok(sigma + 2.0)
}

/// Coefficients `c_0 ..= c_m` of the tail series from the exact substitution
/// recurrence. `c_1 = u_inf^2 / ((sigma+1)(sigma+2))`.
pub fn exact_tail_coefficients(u_inf: f64, sigma: f64, m: usize) -> Result<Vec<f64>> {
    let eps = check_epsilon(sigma)?;
    let mut c = Vec::with_capacity(m + 1);
    c.push(u_inf);
    for i in 0..m {
        let source: f64 = (0..=i).map(|a| c[a] * c[i - a]).sum();
        let n1 = (i + 1) as f64 * eps;
        c.push(source / (n1 * (n1 - 1.0)));
    }
    Ok(c)
}

/// Coefficients `c_0 ..= c_m` from the product-form closed expression,
/// `c_i = 2^{i-1} u_inf^{i+1} / prod_{j<=i} [j eps (j eps - 1)]`: the
/// iteration that keeps only the `2 c_0 c_{i-1}` source beyond first order.
pub fn closed_form_tail_coefficients(u_inf: f64, sigma: f64, m: usize) -> Result<Vec<f64>> {
    let eps = check_epsilon(sigma)?;
    let mut c = Vec::with_capacity(m + 1);
    c.push(u_inf);
    for i in 0..m {
        let source = if i == 0 { u_inf * u_inf } else { 2.0 * u_inf * c[i] };
        let n1 = (i + 1) as f64 * eps;
        c.push(source / (n1 * (n1 - 1.0)));
    }
    Ok(c)
}

impl TailExpansion {
    /// Builds the order-`m` expansion for `lambda > 0`, `alpha > 0`.
    pub fn new(params: &WaveParameters, u_inf: f64, m: usize) -> Result<Self> {
        params.validate()?;
        if !u_inf.is_finite() {
            return Err(Error::Domain("non-finite u_inf".into()));
        }
        if params.lambda == 0.0 {
            return Err(Error::SigmaDegenerate);
        }
        let form = emden_fowler_form(params)?;
        let coefficients = exact_tail_coefficients(u_inf, form.sigma, m.max(1))?;
        Ok(Self {
            u_inf,
            order_m: m,
            coefficients,
            epsilon: form.epsilon(),
            decay_rate: params.decay_rate()?,
            frame: ExponentialFrame::new(params)?,
        })
    }

    /// Travelling-frame series terms `(coefficient_i, (i+1) r)` for
    /// `i = 0 ..= m`.
    pub fn terms(&self) -> Vec<SeriesTerm> {
        self.coefficients[..=self.order_m.min(self.coefficients.len() - 1)]
            .iter()
            .enumerate()
            .map(|(i, &c)| SeriesTerm {
                coefficient: -self.frame.amplitude * c,
                rate: (i + 1) as f64 * self.decay_rate,
            })
            .collect()
    }

    /// Smallest `zeta` at which the first correction stays below half the
    /// leading term.
    pub fn min_admissible_zeta(&self) -> f64 {
        if self.u_inf == 0.0 {
            return f64::NEG_INFINITY;
        }
        let ratio = (self.coefficients[1] / self.coefficients[0]).abs();
        (2.0 * ratio).ln() / self.decay_rate
    }

    /// Evaluates `u` and `du/dzeta`, refusing points outside the asymptotic
    /// regime (first correction larger than half the leading term).
    pub fn eval(&self, zeta: f64) -> Result<TailValue> {
        if self.u_inf == 0.0 {
            return Ok(TailValue { u: 0.0, du_dzeta: 0.0 });
        }
        let min_zeta = self.min_admissible_zeta();
        if zeta < min_zeta {
            return Err(Error::OutsideAsymptoticRegime { min_zeta });
        }
        let mut u = 0.0;
        let mut du = 0.0;
        for (i, &c) in self.coefficients[..=self.order_m.min(self.coefficients.len() - 1)]
            .iter()
            .enumerate()
        {
            let rate = (i + 1) as f64 * self.decay_rate;
            let term = -self.frame.amplitude * c * (-rate * zeta).exp();
            u += term;
            du += -rate * term;
        }
        Ok(TailValue { u, du_dzeta: du })
    }
}

/// Convenience wrapper: order-`m` tail value at `zeta`.
pub fn eval_tail(params: &WaveParameters, u_inf: f64, m: usize, zeta: f64) -> Result<TailValue> {
    TailExpansion::new(params, u_inf, m)?.eval(zeta)
}

/// `i`-th correction term (`i >= 1`) of the travelling-frame tail series in
/// product form. The `i = 1` term is
/// `-8 k^4 alpha^2 u_inf^2 / ((k-1)(3k-1) beta)` at rate `2 r`.
pub fn closed_form_series_term(
    params: &WaveParameters,
    u_inf: f64,
    i: usize,
) -> Result<SeriesTerm> {
    params.validate()?;
    if i == 0 {
        return Err(Error::Domain("term index must be >= 1".into()));
    }
    if params.lambda == 0.0 {
        return Err(Error::SigmaDegenerate);
    }
    let form = emden_fowler_form(params)?;
    let coeffs = closed_form_tail_coefficients(u_inf, form.sigma, i)?;
    let frame = ExponentialFrame::new(params)?;
    Ok(SeriesTerm {
        coefficient: -frame.amplitude * coeffs[i],
        rate: (i + 1) as f64 * params.decay_rate()?,
    })
}

/// Side-by-side Emden-Fowler-frame coefficients of the exact recurrence and
/// the product-form closed expression.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientComparison {
    pub exact: Vec<f64>,
    pub closed_form: Vec<f64>,
}

/// Named diagnostic for the order `>= 3` discrepancy between the two
/// coefficient routes. They agree exactly through order 2.
pub fn series_coefficient_comparison(
    u_inf: f64,
    sigma: f64,
    m: usize,
) -> Result<CoefficientComparison> {
    Ok(CoefficientComparison {
        exact: exact_tail_coefficients(u_inf, sigma, m)?,
        closed_form: closed_form_tail_coefficients(u_inf, sigma, m)?,
    })
}

/// Zero-speed tail `u = -2 alpha / zeta` (the `k = 1` limit, where the
/// exponential factor degenerates to 1). Requires `lambda = 0`, `zeta > 0`.
pub fn eval_tail_zero_speed(params: &WaveParameters, zeta: f64) -> Result<f64> {
    params.validate()?;
    if params.lambda != 0.0 {
        return Err(Error::Domain(format!(
            "zero-speed tail requires lambda = 0 (got {})",
            params.lambda
        )));
    }
    if params.alpha <= 0.0 {
        return Err(Error::TransformUndefined);
    }
    if !(zeta > 0.0) {
        return Err(Error::Domain(format!("zeta = {zeta} must be positive")));
    }
    Ok(-2.0 * params.alpha / zeta)
}

/// `d/dzeta` of the zero-speed tail, `2 alpha / zeta^2`.
pub fn eval_tail_zero_speed_derivative(params: &WaveParameters, zeta: f64) -> Result<f64> {
    eval_tail_zero_speed(params, zeta)?;
    Ok(2.0 * params.alpha / (zeta * zeta))
}

/// Residual `y'' - xi^sigma y^2` of a truncated series at `xi`.
///
/// For the order-`m` exact-recurrence series the residual is
/// `O(xi^{m epsilon + sigma})` as `xi -> infinity`; the `m = 0` residual is
/// `-xi^sigma c_0^2` exactly.
pub fn emden_fowler_residual(sigma: f64, coefficients: &[f64], xi: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("xi = {xi} must be positive")));
    }
    let eps = sigma + 2.0;
    let mut y = 0.0;
    let mut ypp = 0.0;
    for (i, &c) in coefficients.iter().enumerate() {
        let p = i as f64 * eps;
        y += c * xi.powf(p);
        if i > 0 {
            ypp += c * p * (p - 1.0) * xi.powf(p - 2.0);
        }
    }
    Ok(ypp - xi.powf(sigma) * y * y)
}

/// Zero structure of a sampled wave profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroReport {
    /// Number of isolated zeros.
    pub count: usize,
    /// Isolated zero locations, refined by bisection of the cubic Hermite
    /// interpolant to `1e-10` in `zeta`.
    pub locations: Vec<f64>,
    /// Stretches where the profile vanishes identically (two or more
    /// consecutive zero samples); not counted as isolated zeros.
    pub zero_intervals: Vec<(f64, f64)>,
}

fn hermite(z0: f64, u0: f64, v0: f64, z1: f64, u1: f64, v1: f64, z: f64) -> f64 {
    let h = z1 - z0;
    let t = (z - z0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * u0
        + (t3 - 2.0 * t2 + t) * h * v0
        + (-2.0 * t3 + 3.0 * t2) * u1
        + (t3 - t2) * h * v1
}

/// Counts isolated zeros of `u` along the profile. A sample is treated as
/// zero when `|u| < 1e-12 * max|u|`; runs of two or more zero samples are
/// reported as intervals per [`ZeroReport::zero_intervals`].
pub fn count_isolated_zeros(profile: &WaveProfile) -> Result<ZeroReport> {
    let s = &profile.samples;
    if s.len() < 2 {
        return Err(Error::Domain("profile needs at least two samples".into()));
    }
    let max_abs = s.iter().map(|p| p.u.abs()).fold(0.0f64, f64::max);
    if max_abs == 0.0 {
        return Ok(ZeroReport {
            count: 0,
            locations: Vec::new(),
            zero_intervals: vec![(s[0].zeta, s[s.len() - 1].zeta)],
        });
    }
    let tol = 1e-12 * max_abs;
    let is_zero: Vec<bool> = s.iter().map(|p| p.u.abs() < tol).collect();

    let mut locations = Vec::new();
    let mut zero_intervals = Vec::new();

    // Runs of zero samples: a single one is an isolated zero, longer runs are
    // intervals where the profile vanishes identically.
    let mut i = 0;
    while i < s.len() {
        if is_zero[i] {
            let start = i;
            while i + 1 < s.len() && is_zero[i + 1] {
                i += 1;
            }
            if i == start {
                locations.push(s[start].zeta);
            } else {
                zero_intervals.push((s[start].zeta, s[i].zeta));
            }
        }
        i += 1;
    }

    // Sign changes between consecutive nonzero samples, refined on the cubic
    // Hermite interpolant.
    for w in 0..s.len() - 1 {
        let (p0, p1) = (&s[w], &s[w + 1]);
        if is_zero[w] || is_zero[w + 1] {
            continue;
        }
        if p0.u.signum() == p1.u.signum() {
            continue;
        }
        let (mut lo, mut hi) = (p0.zeta, p1.zeta);
        let f = |z: f64| hermite(p0.zeta, p0.u, p0.v, p1.zeta, p1.u, p1.v, z);
        let mut f_lo = p0.u;
        while (hi - lo).abs() > 1e-10 {
            let mid = 0.5 * (lo + hi);
            let f_mid = f(mid);
            if f_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if f_lo.signum() == f_mid.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        locations.push(0.5 * (lo + hi));
    }

    locations.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ZeroReport {
        count: locations.len(),
        locations,
        zero_intervals,
    })
}
