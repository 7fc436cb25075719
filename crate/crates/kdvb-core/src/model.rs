//! Physical parameters and the exact transformations of the travelling frame.
//!
//! Substituting `u = f(zeta)`, `zeta = x - lambda t` into the evolution
//! equation and integrating once in `zeta` gives
//!
//! ```text
//! u'' + c1 u' + c2 u^2 + c3 u = c0,
//! c1 = -alpha/beta,  c2 = 1/(2 beta),  c3 = -lambda/beta,
//! ```
//!
//! with real equilibria iff the integration constant satisfies
//! `c0 > -lambda^2 / (2 beta)`. For `c0 = 0` and `alpha > 0` the exponential
//! change of variables
//!
//! ```text
//! u = -(2 k^2 alpha^2 / beta) e^{-(k-1) alpha zeta / (2 beta)} y(xi),
//! xi = e^{(alpha/beta) k zeta},   k = sqrt(1 + 4 beta lambda / alpha^2) >= 1,
//! ```
//!
//! reduces the ODE to the Emden-Fowler equation `y'' = xi^sigma y^2` with
//! `sigma = (1 - 5k) / (2k)`; `sigma = -2` exactly when `lambda = 0` and
//! `-5/2 < sigma < -2` for `lambda > 0`.

use crate::error::{Error, Result};

/// Physical coefficients of the wave equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParameters {
    /// Dissipation coefficient, `>= 0`.
    pub alpha: f64,
    /// Dispersion coefficient, `> 0`.
    pub beta: f64,
    /// Travelling-wave speed, `>= 0`. The `lambda < 0` branch is excluded:
    /// normalize via `lambda -> -lambda` before constructing.
    pub lambda: f64,
}

impl WaveParameters {
    pub fn new(alpha: f64, beta: f64, lambda: f64) -> Result<Self> {
        let p = Self { alpha, beta, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.beta.is_finite() && self.lambda.is_finite()) {
            return Err(Error::InvalidParameters("non-finite coefficient".into()));
        }
        if self.beta <= 0.0 {
            return Err(Error::InvalidParameters(format!(
                "beta = {} violates beta > 0",
                self.beta
            )));
        }
        if self.alpha < 0.0 {
            return Err(Error::InvalidParameters(format!(
                "alpha = {} violates alpha >= 0",
                self.alpha
            )));
        }
        if self.lambda < 0.0 {
            return Err(Error::InvalidParameters(format!(
                "lambda = {} violates lambda >= 0 (normalize lambda -> -lambda first)",
                self.lambda
            )));
        }
        Ok(())
    }

    /// `k = sqrt(1 + 4 beta lambda / alpha^2)`. Requires `alpha > 0`.
    pub fn k(&self) -> Result<f64> {
        self.validate()?;
        if self.alpha == 0.0 {
            return Err(Error::TransformUndefined);
        }
        Ok((1.0 + 4.0 * self.beta * self.lambda / (self.alpha * self.alpha)).sqrt())
    }

    /// Leading exponential decay rate of the tail, `(k-1) alpha / (2 beta)`.
    ///
    /// Equals the magnitude of the stable eigenvalue of the saddle at the
    /// origin. Evaluated as `x / (1 + k) * alpha / (2 beta)` with
    /// `x = 4 beta lambda / alpha^2`, which avoids the `k - 1` cancellation
    /// when `lambda` is small.
    pub fn decay_rate(&self) -> Result<f64> {
        let k = self.k()?;
        let x = 4.0 * self.beta * self.lambda / (self.alpha * self.alpha);
        Ok(x / (1.0 + k) * self.alpha / (2.0 * self.beta))
    }
}

/// Coefficients of the once-integrated travelling-wave ODE
/// `u'' + c1 u' + c2 u^2 + c3 u = c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c0: f64,
}

impl ReducedCoefficients {
    /// `c3^2 + 4 c0 c2`; non-negative iff the equilibria are real.
    pub fn equilibrium_discriminant(&self) -> f64 {
        self.c3 * self.c3 + 4.0 * self.c0 * self.c2
    }
}

/// Computes the ODE coefficients for the given parameters and integration
/// constant. Rejects `c0 <= -lambda^2/(2 beta)`, where the equilibria stop
/// being real and distinct.
pub fn reduce_coefficients(params: &WaveParameters, c0: f64) -> Result<ReducedCoefficients> {
    params.validate()?;
    if !c0.is_finite() {
        return Err(Error::InvalidParameters("non-finite c0".into()));
    }
    let bound = -params.lambda * params.lambda / (2.0 * params.beta);
    if c0 <= bound {
        return Err(Error::InvalidIntegrationConstant { c0, bound });
    }
    Ok(ReducedCoefficients {
        c1: -params.alpha / params.beta,
        c2: 1.0 / (2.0 * params.beta),
        c3: -params.lambda / params.beta,
        c0,
    })
}

/// Result of shifting the dependent variable onto an equilibrium so that the
/// constant term vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumShift {
    /// The two roots of `c2 r^2 + c3 r - c0 = 0`, ascending.
    pub roots: [f64; 2],
    /// Linear coefficient `c3 + 2 c2 r` of the shifted equation, per root.
    pub shifted_linear: [f64; 2],
    pub discriminant: f64,
}

/// Translation `u = u_tilde + r` with `r = (-c3 +/- sqrt(c3^2 + 4 c0 c2)) / (2 c2)`,
/// after which `u_tilde'' + c1 u_tilde' + c2 u_tilde^2 + (c3 + 2 c2 r) u_tilde = 0`.
pub fn shift_equilibrium(coeffs: &ReducedCoefficients) -> Result<EquilibriumShift> {
    let disc = coeffs.equilibrium_discriminant();
    if disc < 0.0 {
        return Err(Error::ComplexEquilibria { discriminant: disc });
    }
    let sq = disc.sqrt();
    let lo = (-coeffs.c3 - sq) / (2.0 * coeffs.c2);
    let hi = (-coeffs.c3 + sq) / (2.0 * coeffs.c2);
    Ok(EquilibriumShift {
        roots: [lo, hi],
        shifted_linear: [coeffs.c3 + 2.0 * coeffs.c2 * lo, coeffs.c3 + 2.0 * coeffs.c2 * hi],
        discriminant: disc,
    })
}

/// Constants of the reduced Emden-Fowler equation `y'' = xi^sigma y^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmdenFowlerForm {
    /// `sqrt(1 + 4 beta lambda / alpha^2) >= 1`.
    pub k: f64,
    /// `(1 - 5k) / (2k)`; equals `-2` iff `lambda = 0`.
    pub sigma: f64,
}

impl EmdenFowlerForm {
    /// `epsilon = sigma + 2 = (1 - k) / (2k)`, the exponent increment of the
    /// tail power series; lies in `(-1/2, 0)` for `lambda > 0`.
    pub fn epsilon(&self) -> f64 {
        self.sigma + 2.0
    }
}

/// Derives `k` and `sigma`. Fails for `alpha = 0`, where the exponential
/// transform degenerates.
pub fn emden_fowler_form(params: &WaveParameters) -> Result<EmdenFowlerForm> {
    let k = params.k()?;
    Ok(EmdenFowlerForm {
        k,
        sigma: (1.0 - 5.0 * k) / (2.0 * k),
    })
}

/// The exponential change of variables between the travelling frame
/// `(zeta, u)` and the Emden-Fowler frame `(xi, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFrame {
    /// Exponent of the amplitude prefactor: `-(k-1) alpha / (2 beta)` (< 0).
    pub growth: f64,
    /// Exponent of the independent variable: `xi = e^{xi_rate * zeta}` with
    /// `xi_rate = (alpha/beta) k` (> 0).
    pub xi_rate: f64,
    /// Magnitude of the amplitude prefactor, `2 k^2 alpha^2 / beta`.
    pub amplitude: f64,
}

impl ExponentialFrame {
    pub fn new(params: &WaveParameters) -> Result<Self> {
        let k = params.k()?;
        let a = params.alpha;
        let b = params.beta;
        Ok(Self {
            growth: -(k - 1.0) * a / (2.0 * b),
            xi_rate: a / b * k,
            amplitude: 2.0 * k * k * a * a / b,
        })
    }

    pub fn xi(&self, zeta: f64) -> f64 {
        (self.xi_rate * zeta).exp()
    }

    pub fn u_from_y(&self, zeta: f64, y: f64) -> f64 {
        -self.amplitude * (self.growth * zeta).exp() * y
    }

    pub fn y_from_u(&self, zeta: f64, u: f64) -> f64 {
        -u * (-self.growth * zeta).exp() / self.amplitude
    }
}

/// Maps a point of the Emden-Fowler frame into the travelling frame:
/// `(zeta, y) -> (xi, u)`. `xi` is strictly increasing in `zeta`.
pub fn map_frame(params: &WaveParameters, zeta: f64, y: f64) -> Result<(f64, f64)> {
    let frame = ExponentialFrame::new(params)?;
    Ok((frame.xi(zeta), frame.u_from_y(zeta, y)))
}

/// Inverse of [`map_frame`]: recovers `(xi, y)` from `(zeta, u)`.
pub fn invert_frame(params: &WaveParameters, zeta: f64, u: f64) -> Result<(f64, f64)> {
    let frame = ExponentialFrame::new(params)?;
    Ok((frame.xi(zeta), frame.y_from_u(zeta, u)))
}

/// One sample of the logarithmic diagnostic frame used to probe the
/// `sigma = -2` tail: `s = ln xi`, `p = dy/ds`, `v_recip = 1/y`,
/// `w = d(1/y)/ds = -p / y^2`. Along the decaying zero-speed branch
/// `w -> 1` as `s -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticFrame {
    pub s: f64,
    pub y: f64,
    pub p: f64,
    pub v_recip: f64,
    pub w: f64,
}

/// Maps `(xi, y, dy/dxi)` samples into the diagnostic frame.
/// Samples with `y = 0` or `xi <= 0` are reported individually.
pub fn diagnostic_frames(samples: &[(f64, f64, f64)]) -> Vec<Result<DiagnosticFrame>> {
    samples
        .iter()
        .enumerate()
        .map(|(index, &(xi, y, dy_dxi))| {
            if !(xi.is_finite() && y.is_finite() && dy_dxi.is_finite()) || xi <= 0.0 {
                return Err(Error::Domain(format!(
                    "sample {index}: xi must be positive and finite (xi = {xi})"
                )));
            }
            if y == 0.0 {
                return Err(Error::ZeroSample { index });
            }
            let p = xi * dy_dxi;
            Ok(DiagnosticFrame {
                s: xi.ln(),
                y,
                p,
                v_recip: 1.0 / y,
                w: -p / (y * y),
            })
        })
        .collect()
}
