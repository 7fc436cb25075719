//! Singular points and local classification of the travelling-wave system
//!
//! ```text
//! u' = v
//! v' = -c2 u (u - 2 lambda) - c1 v
//! ```
//!
//! The system has the two equilibria `(0, 0)` and `(2 lambda, 0)`. The origin
//! is invariably a saddle for `lambda > 0`; the character of `(2 lambda, 0)`
//! splits into three regimes:
//!
//! - `alpha >= 2 sqrt(beta lambda)`: node (monotone shock),
//! - `0 < alpha < 2 sqrt(beta lambda)`: focus (oscillatory shock),
//! - `alpha = 0`: center (solitary waves).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::WaveParameters;

/// Local equilibrium type from the linearization eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Saddle,
    Node,
    Focus,
    Center,
    /// Coincident equilibria (`lambda = 0`): one eigenvalue vanishes.
    Degenerate,
}

impl std::fmt::Display for PointKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PointKind::Saddle => "saddle",
            PointKind::Node => "node",
            PointKind::Focus => "focus",
            PointKind::Center => "center",
            PointKind::Degenerate => "degenerate",
        };
        f.write_str(s)
    }
}

/// A singular point of the first-order system with its linearization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPoint {
    pub location: (f64, f64),
    pub kind: PointKind,
    pub eigenvalues: (Complex64, Complex64),
}

/// Locations of the two singular points, `(0, 0)` and `(2 lambda, 0)`.
/// They coincide at the origin when `lambda = 0`.
pub fn singular_points(params: &WaveParameters) -> Result<[(f64, f64); 2]> {
    params.validate()?;
    Ok([(0.0, 0.0), (2.0 * params.lambda, 0.0)])
}

/// Eigenvalues of the linearization at a singular point.
///
/// At an equilibrium `(u*, 0)` the eigenvalues solve
/// `mu^2 + c1 mu + 2 c2 (u* - lambda) = 0`, i.e.
///
/// - at `(0, 0)`:        `mu = [alpha/beta +/- sqrt((alpha/beta)^2 + 4 lambda/beta)] / 2`,
/// - at `(2 lambda, 0)`: `mu = [alpha/beta +/- sqrt((alpha/beta)^2 - 4 lambda/beta)] / 2`.
pub fn linearize(params: &WaveParameters, point: (f64, f64)) -> Result<(Complex64, Complex64)> {
    let points = singular_points(params)?;
    let scale = (2.0 * params.lambda).abs().max(1.0);
    let is = |p: (f64, f64)| {
        (point.0 - p.0).abs() <= 1e-9 * scale && (point.1 - p.1).abs() <= 1e-9 * scale
    };
    if !points.iter().any(|&p| is(p)) {
        return Err(Error::NotSingularPoint {
            u: point.0,
            v: point.1,
        });
    }
    let u_star = if is(points[0]) { 0.0 } else { 2.0 * params.lambda };
    let trace = params.alpha / params.beta; // = -c1
    // mu^2 - trace mu + det = 0 with det = 2 c2 (u* - lambda)
    let det = (u_star - params.lambda) / params.beta;
    let disc = trace * trace - 4.0 * det;
    if disc >= 0.0 {
        // Large root from the quadratic formula, small root from the product:
        // no cancellation when |det| << trace^2.
        let sq = disc.sqrt();
        let (small, large) = if trace == 0.0 || det == 0.0 {
            ((trace - sq) / 2.0, (trace + sq) / 2.0)
        } else {
            let big = (trace + trace.signum() * sq) / 2.0;
            let other = det / big;
            (other.min(big), other.max(big))
        };
        Ok((Complex64::new(small, 0.0), Complex64::new(large, 0.0)))
    } else {
        let sq = (-disc).sqrt();
        Ok((
            Complex64::new(trace / 2.0, -sq / 2.0),
            Complex64::new(trace / 2.0, sq / 2.0),
        ))
    }
}

fn kind_from_eigenvalues(params: &WaveParameters, eig: (Complex64, Complex64)) -> PointKind {
    if eig.0.im != 0.0 {
        // The real part is exactly alpha/(2 beta): a center iff alpha = 0.
        if params.alpha == 0.0 {
            PointKind::Center
        } else {
            PointKind::Focus
        }
    } else {
        let product = eig.0.re * eig.1.re;
        if product < 0.0 {
            PointKind::Saddle
        } else if product == 0.0 {
            PointKind::Degenerate
        } else {
            PointKind::Node
        }
    }
}

/// Both singular points with their linearization and local type.
pub fn singular_point_analysis(params: &WaveParameters) -> Result<[SingularPoint; 2]> {
    let points = singular_points(params)?;
    let mut out = [SingularPoint {
        location: (0.0, 0.0),
        kind: PointKind::Degenerate,
        eigenvalues: (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
    }; 2];
    for (i, &loc) in points.iter().enumerate() {
        let eig = linearize(params, loc)?;
        out[i] = SingularPoint {
            location: loc,
            kind: kind_from_eigenvalues(params, eig),
            eigenvalues: eig,
        };
    }
    Ok(out)
}

/// The three wave regimes, split by the character of `(2 lambda, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeCase {
    /// `alpha >= 2 sqrt(beta lambda)`, nodal point: monotone shock.
    ANodal,
    /// `0 < alpha < 2 sqrt(beta lambda)`, focal point: oscillatory shock.
    BFocal,
    /// `alpha = 0`, central point: solitary waves.
    CCentral,
    /// `lambda = 0`: both singular points coincide, the trichotomy does not
    /// apply.
    Degenerate,
}

impl std::fmt::Display for RegimeCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegimeCase::ANodal => "A_nodal",
            RegimeCase::BFocal => "B_focal",
            RegimeCase::CCentral => "C_central",
            RegimeCase::Degenerate => "degenerate_zero_speed",
        };
        f.write_str(s)
    }
}

/// Regime classification of `(2 lambda, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeClassification {
    pub case: RegimeCase,
    /// `alpha^2 - 4 beta lambda`; its sign separates cases A and B.
    pub discriminant: f64,
    /// True on the boundary `alpha = 2 sqrt(beta lambda)`, where the
    /// eigenvalue at `(2 lambda, 0)` is a defective double root.
    pub boundary_double_root: bool,
}

/// Classifies the regime from the discriminant `alpha^2 - 4 beta lambda`.
/// The boundary belongs to case A. `lambda = 0` is reported as degenerate
/// rather than forced into the trichotomy.
pub fn classify(params: &WaveParameters) -> Result<RegimeClassification> {
    params.validate()?;
    let discriminant = params.alpha * params.alpha - 4.0 * params.beta * params.lambda;
    if params.lambda == 0.0 {
        return Ok(RegimeClassification {
            case: RegimeCase::Degenerate,
            discriminant,
            boundary_double_root: false,
        });
    }
    let scale = (params.alpha * params.alpha).max(4.0 * params.beta * params.lambda);
    let boundary = discriminant.abs() <= 1e-12 * scale;
    let case = if params.alpha == 0.0 {
        RegimeCase::CCentral
    } else if discriminant >= 0.0 || boundary {
        RegimeCase::ANodal
    } else {
        RegimeCase::BFocal
    };
    Ok(RegimeClassification {
        case,
        discriminant,
        boundary_double_root: boundary,
    })
}
