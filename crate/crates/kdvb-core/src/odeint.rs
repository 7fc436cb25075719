//! Adaptive Runge-Kutta integration and tail-seeded wave reconstruction.
//!
//! [`integrate`] is an embedded Dormand-Prince 4(5) pair with a PI step-size
//! controller and cubic Hermite dense output; it runs forward or backward
//! depending on the span orientation.
//!
//! Profiles are reconstructed by shooting backward from the saddle tail at
//! `zeta -> +infinity`: the decaying branch is seeded from the asymptotic
//! expansion and integrated toward the `(2 lambda, 0)` state at
//! `zeta -> -infinity`. Backward integration is the stable direction — the
//! saddle's unstable mode decays when `zeta` decreases.

use crate::asymptotics::{
    eval_tail_zero_speed, eval_tail_zero_speed_derivative, TailExpansion,
};
use crate::error::{Error, Result};
use crate::model::WaveParameters;

/// Tolerances and step bounds for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: 0.5,
            min_step: 1e-13,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok_tol = |t: f64| t > 0.0 && t < 1.0 && t.is_finite();
        if !ok_tol(self.rel_tol) || !ok_tol(self.abs_tol) {
            return Err(Error::InvalidConfig(
                "tolerances must lie in (0, 1)".into(),
            ));
        }
        if !(self.min_step > 0.0 && self.max_step > self.min_step) {
            return Err(Error::InvalidConfig(
                "require 0 < min_step < max_step".into(),
            ));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct DenseStep<const D: usize> {
    t0: f64,
    t1: f64,
    y0: [f64; D],
    y1: [f64; D],
    f0: [f64; D],
    f1: [f64; D],
}

impl<const D: usize> DenseStep<D> {
    /// Cubic Hermite interpolation inside the step.
    fn eval(&self, t: f64) -> [f64; D] {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let (h00, h10, h01, h11) = (
            2.0 * s3 - 3.0 * s2 + 1.0,
            s3 - 2.0 * s2 + s,
            -2.0 * s3 + 3.0 * s2,
            s3 - s2,
        );
        let mut out = [0.0; D];
        for i in 0..D {
            out[i] = h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i];
        }
        out
    }
}

/// Densely queryable solution of an initial value problem.
#[derive(Debug, Clone)]
pub struct Trajectory<const D: usize> {
    steps: Vec<DenseStep<D>>,
}

impl<const D: usize> Trajectory<D> {
    pub fn start_time(&self) -> f64 {
        self.steps.first().map(|s| s.t0).unwrap_or(f64::NAN)
    }

    pub fn end_time(&self) -> f64 {
        self.steps.last().map(|s| s.t1).unwrap_or(f64::NAN)
    }

    pub fn end_state(&self) -> [f64; D] {
        self.steps.last().map(|s| s.y1).unwrap_or([f64::NAN; D])
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn contains(&self, t: f64) -> bool {
        if self.steps.is_empty() {
            return false;
        }
        let (a, b) = (self.start_time(), self.end_time());
        if a <= b {
            (a..=b).contains(&t)
        } else {
            (b..=a).contains(&t)
        }
    }

    /// State at `t`, interpolated by the cubic Hermite dense output.
    /// `None` outside the integrated span.
    pub fn sample(&self, t: f64) -> Option<[f64; D]> {
        if !self.contains(t) {
            return None;
        }
        let forward = self.end_time() >= self.start_time();
        // Binary search for the step containing t.
        let mut lo = 0usize;
        let mut hi = self.steps.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            let step = &self.steps[mid];
            let past = if forward { t > step.t1 } else { t < step.t1 };
            if past {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        Some(self.steps[lo].eval(t))
    }
}

// Dormand-Prince 5(4) tableau (FSAL).
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
/// 5th-order weights equal the last row of `A` (FSAL); the embedded 4th-order
/// weights differ below.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn scaled_error_norm<const D: usize>(
    err: &[f64; D],
    y0: &[f64; D],
    y1: &[f64; D],
    cfg: &IntegratorConfig,
) -> f64 {
    let mut acc = 0.0;
    for i in 0..D {
        let scale = cfg.abs_tol + cfg.rel_tol * y0[i].abs().max(y1[i].abs());
        let e = err[i] / scale;
        acc += e * e;
    }
    (acc / D as f64).sqrt()
}

/// Automatic initial step size (order-5 variant of the usual heuristic).
fn initial_step<const D: usize, F: Fn(f64, &[f64; D]) -> [f64; D]>(
    field: &F,
    t0: f64,
    y0: &[f64; D],
    f0: &[f64; D],
    direction: f64,
    span: f64,
    cfg: &IntegratorConfig,
) -> f64 {
    let norm = |v: &[f64; D], w: &[f64; D]| -> f64 {
        let mut acc = 0.0f64;
        for i in 0..D {
            let scale = cfg.abs_tol + cfg.rel_tol * w[i].abs();
            let e = v[i] / scale;
            acc += e * e;
        }
        (acc / D as f64).sqrt()
    };
    let d0 = norm(y0, y0);
    let d1 = norm(f0, y0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(span.abs()).min(cfg.max_step);
    let mut y1 = [0.0; D];
    for i in 0..D {
        y1[i] = y0[i] + direction * h0 * f0[i];
    }
    let f1 = field(t0 + direction * h0, &y1);
    let mut diff = [0.0; D];
    for i in 0..D {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff, y0) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span.abs()).min(cfg.max_step)
}

/// Integrates `y' = field(t, y)` over `span` (forward or backward) with the
/// embedded 4(5) pair. The local error per step is kept below
/// `abs_tol + rel_tol * |y|` component-wise in the RMS sense.
pub fn integrate<const D: usize, F: Fn(f64, &[f64; D]) -> [f64; D]>(
    field: F,
    y0: [f64; D],
    span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory<D>> {
    integrate_until(field, y0, span, cfg, |_, _| false).map(|(t, _)| t)
}

/// Like [`integrate`], but stops early once `stop(t, y)` holds at the end of
/// an accepted step. Returns the trajectory and whether the stop fired.
pub fn integrate_until<const D: usize, F: Fn(f64, &[f64; D]) -> [f64; D]>(
    field: F,
    y0: [f64; D],
    span: (f64, f64),
    cfg: &IntegratorConfig,
    stop: impl Fn(f64, &[f64; D]) -> bool,
) -> Result<(Trajectory<D>, bool)> {
    cfg.validate()?;
    let (t0, t1) = span;
    if !(t0.is_finite() && t1.is_finite()) || t0 == t1 {
        return Err(Error::InvalidConfig("degenerate integration span".into()));
    }
    let direction = (t1 - t0).signum();
    let span_len = (t1 - t0).abs();

    let mut t = t0;
    let mut y = y0;
    let mut f = field(t, &y);
    let mut h = initial_step(&field, t0, &y0, &f, direction, span_len, cfg)
        .max(cfg.min_step);
    let mut err_prev: f64 = 1.0;
    let mut rejected = false;
    let mut steps = Vec::new();
    let mut n_steps = 0usize;

    while (t1 - t) * direction > 0.0 {
        if n_steps >= cfg.max_steps {
            return Err(Error::MaxStepsExceeded {
                t,
                max_steps: cfg.max_steps,
                state: y.to_vec(),
            });
        }
        n_steps += 1;
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        let h_step = if last { remaining } else { h };
        let hd = direction * h_step;

        // Stage evaluations; k[0] is the FSAL derivative from the previous step.
        let mut k = [[0.0; D]; 7];
        k[0] = f;
        for stage in 0..6 {
            let mut ys = y;
            for i in 0..D {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    acc += A[stage][j] * kj[i];
                }
                ys[i] += hd * acc;
            }
            k[stage + 1] = field(t + C[stage] * hd, &ys);
        }

        // 5th-order solution (weights = A[5]) and embedded 4th-order error.
        let mut y_new = y;
        let mut err = [0.0; D];
        for i in 0..D {
            let mut acc5 = 0.0;
            for j in 0..6 {
                acc5 += A[5][j] * k[j][i];
            }
            let mut acc4 = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc4 += B4[j] * kj[i];
            }
            y_new[i] += hd * acc5;
            err[i] = hd * (acc5 - acc4);
        }
        if y_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::StepSizeUnderflow {
                t,
                state: y.to_vec(),
            });
        }
        let err_norm = scaled_error_norm(&err, &y, &y_new, cfg);

        if err_norm <= 1.0 {
            let f_new = k[6]; // FSAL
            steps.push(DenseStep {
                t0: t,
                t1: t + hd,
                y0: y,
                y1: y_new,
                f0: f,
                f1: f_new,
            });
            t += hd;
            y = y_new;
            f = f_new;
            // PI controller
            let e = err_norm.max(1e-10);
            let mut fac = 0.9 * e.powf(-0.17) * err_prev.powf(0.04);
            fac = fac.clamp(0.2, 5.0);
            if rejected {
                fac = fac.min(1.0);
            }
            h = (h_step * fac).clamp(cfg.min_step, cfg.max_step);
            err_prev = e;
            rejected = false;
            if stop(t, &y) {
                return Ok((Trajectory { steps }, true));
            }
        } else {
            if h_step <= cfg.min_step * (1.0 + 1e-9) {
                return Err(Error::StepSizeUnderflow {
                    t,
                    state: y.to_vec(),
                });
            }
            let fac = (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9);
            h = (h_step * fac).max(cfg.min_step);
            rejected = true;
        }
    }

    Ok((Trajectory { steps }, false))
}

/// Right-hand side of the travelling-wave system
/// `u' = v, v' = -c2 u (u - 2 lambda) - c1 v`.
///
/// Built from the coefficient identities directly (`c0 = 0` throughout the
/// pipeline): for `lambda = 0` the equilibria merge and the strict
/// integration-constant guard of [`reduce_coefficients`] does not apply.
pub fn wave_field(params: &WaveParameters) -> Result<impl Fn(f64, &[f64; 2]) -> [f64; 2]> {
    params.validate()?;
    let c1 = -params.alpha / params.beta;
    let c2 = 1.0 / (2.0 * params.beta);
    let two_lambda = 2.0 * params.lambda;
    Ok(move |_t: f64, y: &[f64; 2]| [y[1], -c2 * y[0] * (y[0] - two_lambda) - c1 * y[1]])
}

/// One sample of a travelling-wave profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub zeta: f64,
    pub u: f64,
    /// `du/dzeta`.
    pub v: f64,
}

/// A sampled travelling-wave solution on a strictly increasing `zeta` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    pub samples: Vec<ProfileSample>,
    pub params: WaveParameters,
}

impl WaveProfile {
    pub fn min_zeta(&self) -> f64 {
        self.samples.first().map(|s| s.zeta).unwrap_or(f64::NAN)
    }

    pub fn max_zeta(&self) -> f64 {
        self.samples.last().map(|s| s.zeta).unwrap_or(f64::NAN)
    }

    /// Samples with `zeta` inside `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> Vec<ProfileSample> {
        self.samples
            .iter()
            .copied()
            .filter(|s| s.zeta >= lo && s.zeta <= hi)
            .collect()
    }

    pub fn max_u(&self) -> f64 {
        self.samples.iter().map(|s| s.u).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Outcome of a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceStatus {
    Completed,
    /// `|u|` exceeded ten times the left state `2 lambda`: the orbit left the
    /// heteroclinic funnel (non-physical branch or blow-up).
    LeftFunnel { zeta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub profile: WaveProfile,
    pub status: TraceStatus,
}

/// Tail state `(u, v)` at `zeta0` from the order-`m` expansion.
pub fn seed_from_tail(
    params: &WaveParameters,
    u_inf: f64,
    zeta0: f64,
    m: usize,
) -> Result<(f64, f64)> {
    if params.lambda == 0.0 {
        let u = eval_tail_zero_speed(params, zeta0)?;
        let v = eval_tail_zero_speed_derivative(params, zeta0)?;
        return Ok((u, v));
    }
    let value = TailExpansion::new(params, u_inf, m)?.eval(zeta0)?;
    Ok((value.u, value.du_dzeta))
}

fn sample_profile(
    params: &WaveParameters,
    traj: &Trajectory<2>,
    zeta_hi: f64,
    zeta_lo: f64,
    sample_step: f64,
) -> WaveProfile {
    // Descending grid from the seed, then reversed into ascending order.
    let mut samples = Vec::new();
    let n = ((zeta_hi - zeta_lo) / sample_step).floor() as usize;
    for j in 0..=n {
        let zeta = zeta_hi - j as f64 * sample_step;
        if let Some(state) = traj.sample(zeta) {
            samples.push(ProfileSample {
                zeta,
                u: state[0],
                v: state[1],
            });
        }
    }
    samples.reverse();
    WaveProfile {
        samples,
        params: *params,
    }
}

/// Reconstructs a wave profile by shooting backward from the tail at `zeta0`
/// down to `zeta_end < zeta0`.
///
/// For `alpha > 0`, `lambda > 0` the seed is the order-`m` tail expansion;
/// `u_inf < 0` selects the physical branch with `u > 0`. For `alpha = 0`
/// (solitary waves) the exponential transform is unavailable and the seed is
/// placed on the saddle eigenvector at offset `1e-6 * 2 lambda` from the
/// origin instead. The trace terminates early, with a status flag, if `|u|`
/// exceeds `10 * 2 lambda`.
pub fn trace_wave(
    params: &WaveParameters,
    u_inf: f64,
    zeta0: f64,
    zeta_end: f64,
    m: usize,
    sample_step: f64,
    cfg: &IntegratorConfig,
) -> Result<TraceResult> {
    params.validate()?;
    if !(zeta_end < zeta0) {
        return Err(Error::Domain("require zeta_end < zeta0".into()));
    }
    if !(sample_step > 0.0) {
        return Err(Error::Domain("sample_step must be positive".into()));
    }
    if params.lambda == 0.0 {
        return Err(Error::Domain(
            "zero-speed profiles use trace_algebraic_tail".into(),
        ));
    }
    let seed = if params.alpha == 0.0 {
        // Saddle eigenvector toward the decaying (zeta -> +inf) direction.
        let mu = -(params.lambda / params.beta).sqrt();
        let branch = if u_inf < 0.0 { 1.0 } else { -1.0 };
        let u0 = branch * 1e-6 * 2.0 * params.lambda;
        (u0, mu * u0)
    } else {
        seed_from_tail(params, u_inf, zeta0, m)?
    };

    let field = wave_field(params)?;
    let funnel = 10.0 * 2.0 * params.lambda;
    let (traj, stopped) = integrate_until(
        field,
        [seed.0, seed.1],
        (zeta0, zeta_end),
        cfg,
        |_z, y| y[0].abs() > funnel,
    )?;
    let reached = traj.end_time();
    let profile = sample_profile(params, &traj, zeta0, reached.max(zeta_end), sample_step);
    Ok(TraceResult {
        profile,
        status: if stopped {
            TraceStatus::LeftFunnel { zeta: reached }
        } else {
            TraceStatus::Completed
        },
    })
}

/// Reconstructs the algebraic zero-speed tail (`lambda = 0`) on
/// `[zeta_min, zeta_max]`.
///
/// The orbit family is invariant under `zeta`-translation and nothing in the
/// seed pins the translation, so the profile is gauged after integration: the
/// labels are shifted by the offset that minimizes
/// `max |(zeta u(zeta) + 2 alpha)|` over the window. Forward integration is
/// not an option here — the degenerate saddle at the origin amplifies
/// off-manifold error like `e^{(alpha/beta) zeta}` — so the trace runs
/// backward from a seed placed well beyond `zeta_max`.
pub fn trace_algebraic_tail(
    params: &WaveParameters,
    zeta_min: f64,
    zeta_max: f64,
    sample_step: f64,
    cfg: &IntegratorConfig,
) -> Result<WaveProfile> {
    params.validate()?;
    if params.lambda != 0.0 {
        return Err(Error::Domain("algebraic tail requires lambda = 0".into()));
    }
    if params.alpha <= 0.0 {
        return Err(Error::TransformUndefined);
    }
    if !(0.0 < zeta_min && zeta_min < zeta_max) {
        return Err(Error::Domain("require 0 < zeta_min < zeta_max".into()));
    }
    if !(sample_step > 0.0) {
        return Err(Error::Domain("sample_step must be positive".into()));
    }

    let zeta_seed = 2.5 * zeta_max;
    let u0 = eval_tail_zero_speed(params, zeta_seed)?;
    let v0 = eval_tail_zero_speed_derivative(params, zeta_seed)?;
    // Room for the gauge shift below; the log correction stays within a few
    // units of beta/alpha.
    let shift_margin = 10.0 * params.beta / params.alpha + 2.0 * sample_step;
    let zeta_stop = (zeta_min - shift_margin).max(1e-3 * zeta_min);
    let field = wave_field(params)?;
    let traj = integrate(field, [u0, v0], (zeta_seed, zeta_stop), cfg)?;

    // Best-translate gauge: minimize the worst-case deviation of
    // (zeta + delta) u from -2 alpha over the window.
    let target = 2.0 * params.alpha;
    let worst = |delta: f64| -> f64 {
        let mut worst = 0.0f64;
        let n = 200;
        for j in 0..=n {
            let zeta = zeta_min + (zeta_max - zeta_min) * j as f64 / n as f64;
            match traj.sample(zeta - delta) {
                Some(state) => worst = worst.max((zeta * state[0] + target).abs()),
                None => return f64::INFINITY,
            }
        }
        worst
    };
    let mut best = (0.0, worst(0.0));
    let coarse = 0.05 * params.beta / params.alpha;
    let mut j = 1;
    loop {
        let delta = j as f64 * coarse;
        if zeta_min - delta <= zeta_stop {
            break;
        }
        let e = worst(delta);
        if e < best.1 {
            best = (delta, e);
        }
        j += 1;
    }
    // Golden-section refinement around the coarse optimum.
    let (mut lo, mut hi) = (best.0 - coarse, best.0 + coarse);
    for _ in 0..40 {
        let m1 = lo + 0.382 * (hi - lo);
        let m2 = lo + 0.618 * (hi - lo);
        if worst(m1) < worst(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let delta = 0.5 * (lo + hi);

    let mut samples = Vec::new();
    let n = ((zeta_max - zeta_min) / sample_step).floor() as usize;
    for j in 0..=n {
        let zeta = zeta_min + j as f64 * sample_step;
        if let Some(state) = traj.sample(zeta - delta) {
            samples.push(ProfileSample {
                zeta,
                u: state[0],
                v: state[1],
            });
        }
    }
    Ok(WaveProfile {
        samples,
        params: *params,
    })
}

fn window_samples(profile: &WaveProfile, window: (f64, f64)) -> Result<Vec<ProfileSample>> {
    let samples = profile.window(window.0.min(window.1), window.0.max(window.1));
    if samples.len() < 5 {
        return Err(Error::Domain(
            "fewer than five profile samples in the window".into(),
        ));
    }
    let sign = samples[0].u.signum();
    if samples.iter().any(|s| s.u == 0.0 || s.u.signum() != sign) {
        return Err(Error::SignChangeInWindow);
    }
    Ok(samples)
}

/// Least-squares exponential decay rate over the window: the negated slope
/// of `ln |u|` against `zeta`. Fails if `u` changes sign inside the window.
pub fn measure_decay_rate(profile: &WaveProfile, window: (f64, f64)) -> Result<f64> {
    let samples = window_samples(profile, window)?;
    let n = samples.len() as f64;
    let sx: f64 = samples.iter().map(|s| s.zeta).sum();
    let sy: f64 = samples.iter().map(|s| s.u.abs().ln()).sum();
    let sxx: f64 = samples.iter().map(|s| s.zeta * s.zeta).sum();
    let sxy: f64 = samples.iter().map(|s| s.zeta * s.u.abs().ln()).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(-slope)
}

/// Least-squares constant `c` of the algebraic model `u = c / zeta` over the
/// window; `zeta u -> c` for the zero-speed tail (`c = -2 alpha`).
pub fn measure_algebraic_limit(profile: &WaveProfile, window: (f64, f64)) -> Result<f64> {
    let samples = window_samples(profile, window)?;
    let num: f64 = samples.iter().map(|s| s.u / s.zeta).sum();
    let den: f64 = samples.iter().map(|s| 1.0 / (s.zeta * s.zeta)).sum();
    Ok(num / den)
}

/// How a profile approaches its left state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproachMode {
    Monotone,
    Oscillatory,
}

impl std::fmt::Display for ApproachMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ApproachMode::Monotone => "monotone",
            ApproachMode::Oscillatory => "oscillatory",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeftState {
    pub limit: f64,
    /// Half the spread of the settled window.
    pub uncertainty: f64,
    pub mode: ApproachMode,
}

/// Estimates the `zeta -> -infinity` state of a profile and whether the
/// approach is monotone (nodal regime) or oscillatory (focal regime).
///
/// The lowest-`zeta` fifth of the samples must have settled: it may vary by
/// at most 5% of the limit. The mode comes from counting interior extrema of
/// `u - limit` above a small prominence floor.
pub fn detect_left_state(profile: &WaveProfile) -> Result<LeftState> {
    let s = &profile.samples;
    if s.len() < 10 {
        return Err(Error::InsufficientExtent);
    }
    let tail = &s[..(s.len() / 5).max(2)];
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for p in tail {
        lo = lo.min(p.u);
        hi = hi.max(p.u);
        sum += p.u;
    }
    let limit = sum / tail.len() as f64;
    if hi - lo > 0.05 * limit.abs().max(1e-12) {
        return Err(Error::InsufficientExtent);
    }

    let dev: Vec<f64> = s.iter().map(|p| p.u - limit).collect();
    let max_dev = dev.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let floor = 1e-7 * max_dev;
    let mut extrema = 0usize;
    for i in 1..dev.len() - 1 {
        let interior_max = dev[i] > dev[i - 1] && dev[i] > dev[i + 1];
        let interior_min = dev[i] < dev[i - 1] && dev[i] < dev[i + 1];
        if (interior_max || interior_min) && dev[i].abs() > floor {
            extrema += 1;
        }
    }
    Ok(LeftState {
        limit,
        uncertainty: 0.5 * (hi - lo),
        mode: if extrema >= 2 {
            ApproachMode::Oscillatory
        } else {
            ApproachMode::Monotone
        },
    })
}

/// Direction of the series-vs-ODE cross-check relative to the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareDirection {
    /// Seed at the bottom of the window and integrate up. This runs *into*
    /// the saddle: truncation and roundoff are amplified like
    /// `e^{mu_plus * window}`.
    Forward,
    /// Seed at the top of the window and integrate down — the numerically
    /// stable direction.
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub zeta: f64,
    pub u_series: f64,
    pub u_ode: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub max_rel_err: f64,
    /// Exponential rate fitted to the integrated solution over the window;
    /// `None` if the integrated solution changes sign there.
    pub fitted_decay_rate: Option<f64>,
}

/// Cross-validates the order-`m` tail expansion against direct integration of
/// the travelling-wave ODE over `[zeta0, zeta0 + window]`.
pub fn compare_series_ode(
    params: &WaveParameters,
    u_inf: f64,
    m: usize,
    zeta0: f64,
    window: f64,
    direction: CompareDirection,
    n_rows: usize,
    cfg: &IntegratorConfig,
) -> Result<CompareReport> {
    params.validate()?;
    if !(window > 0.0) || n_rows < 2 {
        return Err(Error::Domain("need window > 0 and at least two rows".into()));
    }
    let tail = TailExpansion::new(params, u_inf, m)?;
    let zeta_hi = zeta0 + window;
    let (seed_at, span) = match direction {
        CompareDirection::Forward => (zeta0, (zeta0, zeta_hi)),
        CompareDirection::Backward => (zeta_hi, (zeta_hi, zeta0)),
    };
    let seed = tail.eval(seed_at)?;
    let field = wave_field(params)?;
    let traj = integrate(field, [seed.u, seed.du_dzeta], span, cfg)?;

    let mut rows = Vec::with_capacity(n_rows + 1);
    let mut max_rel_err = 0.0f64;
    for j in 0..=n_rows {
        let zeta = zeta0 + window * j as f64 / n_rows as f64;
        let u_series = tail.eval(zeta)?.u;
        let u_ode = traj
            .sample(zeta)
            .ok_or_else(|| Error::Domain(format!("zeta = {zeta} outside trajectory")))?[0];
        let rel_err = (u_ode - u_series).abs() / u_series.abs().max(f64::MIN_POSITIVE);
        max_rel_err = max_rel_err.max(rel_err);
        rows.push(CompareRow {
            zeta,
            u_series,
            u_ode,
            rel_err,
        });
    }

    let sign = rows[0].u_ode.signum();
    let fitted_decay_rate = if rows.iter().all(|r| r.u_ode.signum() == sign && r.u_ode != 0.0) {
        let n = rows.len() as f64;
        let sx: f64 = rows.iter().map(|r| r.zeta).sum();
        let sy: f64 = rows.iter().map(|r| r.u_ode.abs().ln()).sum();
        let sxx: f64 = rows.iter().map(|r| r.zeta * r.zeta).sum();
        let sxy: f64 = rows.iter().map(|r| r.zeta * r.u_ode.abs().ln()).sum();
        Some(-(n * sxy - sx * sy) / (n * sxx - sx * sx))
    } else {
        None
    };

    Ok(CompareReport {
        rows,
        max_rel_err,
        fitted_decay_rate,
    })
}
