//! Method-of-lines solver for the full evolution equation
//! `u_t + u u_x - alpha u_xx + beta u_xxx = 0`.
//!
//! Second-order central stencils throughout: a conservative central flux for
//! the nonlinear term (so mass telescopes exactly on periodic grids), central
//! second and third differences for the dissipative and dispersive terms.
//! Time integration is classical fourth-order Runge-Kutta with a fixed step.
//!
//! The semi-discrete symbol of a Fourier mode `e^{i kappa x}` (with
//! `theta = kappa dx`) is
//!
//! ```text
//! d/dt -> -alpha (2 - 2 cos theta) / dx^2  - i beta (sin 2 theta - 2 sin theta) / dx^3 + advection
//! ```
//!
//! so the dispersive stability limit under RK4 (imaginary-axis extent
//! `2 sqrt 2`) is `dt <= 2 sqrt 2 / (2.598...) * dx^3 / beta ~ 1.089 dx^3 / beta`
//! and the diffusive limit is `dt <= 2.785 dx^2 / (4 alpha)`. The default
//! step `0.4 min(dx^2 / (2 alpha), dx^3 / (2.8 beta))` sits well inside both;
//! the constants are exercised by the linear-stability tests rather than
//! trusted on paper.

use std::io::Write;

use crate::error::{Error, Result};
use crate::model::WaveParameters;

/// Boundary treatment of a [`Grid1D`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Periodic,
    /// Endpoints pinned to fixed values, with a ten-cell sponge relaxing the
    /// field toward them. For heteroclinic profiles the natural clamps are
    /// `2 lambda` on the left and `0` on the right.
    Clamped { left: f64, right: f64 },
}

/// Uniform one-dimensional grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
    pub boundary: Boundary,
}

impl Grid1D {
    /// Grid of `n` cells spanning `[x0, x1]`. On periodic grids `x1` is the
    /// wrap point (excluded); on clamped grids the last node sits at `x1`.
    pub fn uniform(x0: f64, x1: f64, n: usize, boundary: Boundary) -> Result<Self> {
        if n < 8 {
            return Err(Error::Domain("grid needs at least 8 cells".into()));
        }
        if !(x1 > x0) {
            return Err(Error::Domain("require x1 > x0".into()));
        }
        let dx = match boundary {
            Boundary::Periodic => (x1 - x0) / n as f64,
            Boundary::Clamped { .. } => (x1 - x0) / (n - 1) as f64,
        };
        Ok(Self { x0, dx, n, boundary })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn length(&self) -> f64 {
        self.n as f64 * self.dx
    }
}

/// Spatial snapshot of the field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: Grid1D,
    pub u: Vec<f64>,
    pub time: f64,
}

impl FieldState {
    pub fn new(grid: Grid1D, u: Vec<f64>) -> Result<Self> {
        if u.len() != grid.n {
            return Err(Error::Domain(format!(
                "field length {} does not match grid size {}",
                u.len(),
                grid.n
            )));
        }
        let state = Self { grid, u, time: 0.0 };
        state.check_finite()?;
        Ok(state)
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField { time: self.time });
        }
        Ok(())
    }

    /// Discrete mass `sum u dx`.
    pub fn mass(&self) -> f64 {
        self.u.iter().sum::<f64>() * self.grid.dx
    }

    /// Discrete energy `sum u^2 dx`.
    pub fn energy(&self) -> f64 {
        self.u.iter().map(|v| v * v).sum::<f64>() * self.grid.dx
    }
}

const SPONGE_CELLS: usize = 10;
const SPONGE_RATE: f64 = 1.0;

fn tendency_into(grid: &Grid1D, u: &[f64], params: &WaveParameters, out: &mut [f64]) {
    let n = grid.n;
    let dx = grid.dx;
    let inv_2dx = 1.0 / (2.0 * dx);
    let inv_dx2 = 1.0 / (dx * dx);
    let inv_2dx3 = 1.0 / (2.0 * dx * dx * dx);
    let alpha = params.alpha;
    let beta = params.beta;

    match grid.boundary {
        Boundary::Periodic => {
            for i in 0..n {
                let im1 = if i == 0 { n - 1 } else { i - 1 };
                let ip1 = if i == n - 1 { 0 } else { i + 1 };
                let im2 = if i < 2 { n + i - 2 } else { i - 2 };
                let ip2 = if i >= n - 2 { i + 2 - n } else { i + 2 };
                let flux = (u[ip1] * u[ip1] - u[im1] * u[im1]) * 0.5 * inv_2dx;
                let d2 = (u[im1] - 2.0 * u[i] + u[ip1]) * inv_dx2;
                let d3 = (u[ip2] - 2.0 * u[ip1] + 2.0 * u[im1] - u[im2]) * inv_2dx3;
                out[i] = -flux + alpha * d2 - beta * d3;
            }
        }
        Boundary::Clamped { left, right } => {
            // Endpoints pinned; rows next to them close the central stencils
            // with ghost values held at the clamps. (A genuinely one-sided
            // third-difference closure puts an O(beta/dx^3) eigenvalue in the
            // right half-plane and blows up on fine grids.)
            out[0] = 0.0;
            out[n - 1] = 0.0;
            let at = |i: isize| -> f64 {
                if i < 0 {
                    left
                } else if i as usize >= n {
                    right
                } else {
                    u[i as usize]
                }
            };
            for i in 1..n - 1 {
                let j = i as isize;
                let flux = (u[i + 1] * u[i + 1] - u[i - 1] * u[i - 1]) * 0.5 * inv_2dx;
                let d2 = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
                let d3 = (at(j + 2) - 2.0 * u[i + 1] + 2.0 * u[i - 1] - at(j - 2)) * inv_2dx3;
                out[i] = -flux + alpha * d2 - beta * d3;
            }
            // Sponge toward the clamp values.
            for j in 1..=SPONGE_CELLS.min(n / 2 - 1) {
                let w = SPONGE_RATE * (1.0 - (j - 1) as f64 / SPONGE_CELLS as f64);
                out[j] += -w * (u[j] - left);
                out[n - 1 - j] += -w * (u[n - 1 - j] - right);
            }
        }
    }
}

/// Semi-discrete tendency `-d/dx(u^2/2) + alpha d2u/dx2 - beta d3u/dx3`.
pub fn semidiscretize(state: &FieldState, params: &WaveParameters) -> Result<Vec<f64>> {
    params.validate()?;
    state.check_finite()?;
    let mut out = vec![0.0; state.grid.n];
    tendency_into(&state.grid, &state.u, params, &mut out);
    Ok(out)
}

/// Conservative default step `0.4 min(dx^2 / (2 alpha), dx^3 / (2.8 beta))`.
pub fn default_time_step(grid: &Grid1D, params: &WaveParameters) -> f64 {
    let dx = grid.dx;
    let diffusive = dx * dx / (2.0 * params.alpha + 1e-12);
    let dispersive = dx * dx * dx / (2.8 * params.beta);
    0.4 * diffusive.min(dispersive)
}

/// Advances the field to `t_end` with classical RK4 at fixed step `dt`,
/// returning snapshots every `snapshot_stride` steps (initial and final
/// states always included; `0` keeps only those two).
///
/// Aborts with [`Error::AbortedRun`] if the field stops being finite or its
/// amplitude grows beyond ten times the initial maximum.
pub fn run(
    state: &FieldState,
    params: &WaveParameters,
    t_end: f64,
    dt: f64,
    snapshot_stride: usize,
) -> Result<Vec<FieldState>> {
    params.validate()?;
    state.check_finite()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain("dt must be positive".into()));
    }
    if !(t_end > state.time) {
        return Err(Error::Domain("t_end must exceed the state time".into()));
    }

    let n = state.grid.n;
    let amplitude_bound = 10.0 * state.u.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);

    let mut u = state.u.clone();
    let mut time = state.time;
    let mut snapshots = vec![state.clone()];

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut stage = vec![0.0; n];

    let total_steps = ((t_end - state.time) / dt).ceil() as usize;
    for step in 1..=total_steps {
        let h = if time + dt > t_end { t_end - time } else { dt };
        tendency_into(&state.grid, &u, params, &mut k1);
        for i in 0..n {
            stage[i] = u[i] + 0.5 * h * k1[i];
        }
        tendency_into(&state.grid, &stage, params, &mut k2);
        for i in 0..n {
            stage[i] = u[i] + 0.5 * h * k2[i];
        }
        tendency_into(&state.grid, &stage, params, &mut k3);
        for i in 0..n {
            stage[i] = u[i] + h * k3[i];
        }
        tendency_into(&state.grid, &stage, params, &mut k4);
        let mut max_abs = 0.0f64;
        for i in 0..n {
            u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            max_abs = max_abs.max(u[i].abs());
        }
        time += h;
        if !max_abs.is_finite() {
            return Err(Error::AbortedRun {
                time,
                reason: "field is no longer finite".into(),
            });
        }
        if max_abs > amplitude_bound {
            return Err(Error::AbortedRun {
                time,
                reason: format!("max |u| = {max_abs} exceeded 10x the initial amplitude"),
            });
        }
        let is_last = step == total_steps;
        if is_last || (snapshot_stride > 0 && step % snapshot_stride == 0) {
            snapshots.push(FieldState {
                grid: state.grid,
                u: u.clone(),
                time,
            });
        }
    }
    Ok(snapshots)
}

/// Wave speed from a linear fit of the tracked `u = level` crossing position
/// against time. Requires at least three snapshots and a unique interior
/// crossing in each.
pub fn measure_speed(snapshots: &[FieldState], level: f64) -> Result<f64> {
    if snapshots.len() < 3 {
        return Err(Error::Domain("need at least three snapshots".into()));
    }
    let margin = 2;
    let mut points = Vec::with_capacity(snapshots.len());
    for snap in snapshots {
        let u = &snap.u;
        let mut crossing = None;
        for i in margin..u.len() - 1 - margin {
            let (a, b) = (u[i] - level, u[i + 1] - level);
            if a == 0.0 || a.signum() != b.signum() {
                if crossing.is_some() {
                    return Err(Error::CrossingNotFound);
                }
                let frac = a / (a - b);
                crossing = Some(snap.grid.x(i) + frac * snap.grid.dx);
            }
        }
        points.push((snap.time, crossing.ok_or(Error::CrossingNotFound)?));
    }
    let n = points.len() as f64;
    let st: f64 = points.iter().map(|p| p.0).sum();
    let sx: f64 = points.iter().map(|p| p.1).sum();
    let stt: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let stx: f64 = points.iter().map(|p| p.0 * p.1).sum();
    Ok((n * stx - st * sx) / (n * stt - st * st))
}

/// Wave speed from a linear fit of the peak position against time; parabolic
/// sub-grid refinement of the maximum. Suited to pulse-shaped profiles where
/// a level crossing is not unique.
pub fn measure_peak_speed(snapshots: &[FieldState]) -> Result<f64> {
    if snapshots.len() < 3 {
        return Err(Error::Domain("need at least three snapshots".into()));
    }
    let mut points = Vec::with_capacity(snapshots.len());
    for snap in snapshots {
        let (mut idx, mut best) = (0usize, f64::NEG_INFINITY);
        for (i, &v) in snap.u.iter().enumerate() {
            if v > best {
                best = v;
                idx = i;
            }
        }
        if idx == 0 || idx == snap.u.len() - 1 {
            return Err(Error::CrossingNotFound);
        }
        let (ym, y0, yp) = (snap.u[idx - 1], snap.u[idx], snap.u[idx + 1]);
        let denom = ym - 2.0 * y0 + yp;
        let frac = if denom == 0.0 { 0.0 } else { 0.5 * (ym - yp) / denom };
        points.push((snap.time, snap.grid.x(idx) + frac * snap.grid.dx));
    }
    let n = points.len() as f64;
    let st: f64 = points.iter().map(|p| p.0).sum();
    let sx: f64 = points.iter().map(|p| p.1).sum();
    let stt: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let stx: f64 = points.iter().map(|p| p.0 * p.1).sum();
    Ok((n * stx - st * sx) / (n * stt - st * st))
}

fn shifted_l2_error(reference: &FieldState, state: &FieldState, shift: f64) -> f64 {
    // Evaluate reference(x - shift) by linear interpolation with edge
    // extension, compare in L2.
    let grid = &state.grid;
    let r = &reference.u;
    let n = r.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &ui) in state.u.iter().enumerate() {
        let x = grid.x(i) - shift;
        let pos = (x - reference.grid.x0) / reference.grid.dx;
        let interp = if pos <= 0.0 {
            r[0]
        } else if pos >= (n - 1) as f64 {
            r[n - 1]
        } else {
            let j = pos.floor() as usize;
            let frac = pos - j as f64;
            r[j] * (1.0 - frac) + r[j + 1] * frac
        };
        let d = ui - interp;
        num += d * d;
        den += interp * interp;
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

/// Relative L2 shape error of `state` against `reference`, minimized over
/// spatial shifts (golden-section refinement of a coarse scan). A travelling
/// wave that keeps its shape scores near zero regardless of phase.
pub fn shape_drift(reference: &FieldState, state: &FieldState) -> f64 {
    let span = 0.5 * state.grid.length();
    let coarse_steps = 200;
    let mut best = (0.0, f64::INFINITY);
    for j in 0..=coarse_steps {
        let s = -span + 2.0 * span * j as f64 / coarse_steps as f64;
        let e = shifted_l2_error(reference, state, s);
        if e < best.1 {
            best = (s, e);
        }
    }
    let step = 2.0 * span / coarse_steps as f64;
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    for _ in 0..60 {
        let m1 = lo + 0.382 * (hi - lo);
        let m2 = lo + 0.618 * (hi - lo);
        if shifted_l2_error(reference, state, m1) < shifted_l2_error(reference, state, m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    shifted_l2_error(reference, state, 0.5 * (lo + hi))
}

/// Writes a snapshot as CSV with header `x,u`, twelve significant digits and
/// LF line endings.
pub fn write_snapshot_csv<W: Write>(state: &FieldState, mut out: W) -> std::io::Result<()> {
    out.write_all(b"x,u\n")?;
    for (i, &u) in state.u.iter().enumerate() {
        writeln!(out, "{:.11e},{:.11e}", state.grid.x(i), u)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WaveParameters;

    fn params(alpha: f64, beta: f64, lambda: f64) -> WaveParameters {
        WaveParameters::new(alpha, beta, lambda).unwrap()
    }

    fn periodic_grid(x0: f64, x1: f64, n: usize) -> Grid1D {
        Grid1D::uniform(x0, x1, n, Boundary::Periodic).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::uniform(0.0, 1.0, 4, Boundary::Periodic).is_err());
        assert!(Grid1D::uniform(1.0, 0.0, 64, Boundary::Periodic).is_err());
        let g = periodic_grid(0.0, 1.0, 10);
        assert!((g.length() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_field_has_zero_tendency() {
        let grid = periodic_grid(0.0, 10.0, 64);
        let state = FieldState::new(grid, vec![1.3; 64]).unwrap();
        let t = semidiscretize(&state, &params(1.0, 1.0, 1.0)).unwrap();
        assert!(t.iter().all(|&v| v.abs() < 1e-12));

        let grid = Grid1D::uniform(0.0, 10.0, 64, Boundary::Clamped { left: 1.3, right: 1.3 })
            .unwrap();
        let state = FieldState::new(grid, vec![1.3; 64]).unwrap();
        let t = semidiscretize(&state, &params(1.0, 1.0, 1.0)).unwrap();
        assert!(t.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn rejects_nan_input() {
        let grid = periodic_grid(0.0, 10.0, 64);
        let mut u = vec![0.0; 64];
        u[5] = f64::NAN;
        assert!(FieldState::new(grid, u).is_err());
    }

    #[test]
    fn fourier_mode_follows_the_discrete_dispersion_relation() {
        // Small-amplitude mode: growth and phase from the stencil symbols.
        let n = 128;
        let length = 16.0;
        let grid = periodic_grid(0.0, length, n);
        let mode = 5.0;
        let kappa = 2.0 * std::f64::consts::PI * mode / length;
        let theta = kappa * grid.dx;
        let p = params(0.3, 0.7, 0.0);
        let amp = 1e-6;
        let u: Vec<f64> = (0..n).map(|i| amp * (kappa * grid.x(i)).cos()).collect();
        let state = FieldState::new(grid, u).unwrap();

        let dt = 0.2 * default_time_step(&grid, &p);
        let t_end = 400.0 * dt;
        let snaps = run(&state, &p, t_end, dt, 0).unwrap();
        let last = snaps.last().unwrap();

        // Project onto the complex mode.
        let project = |f: &FieldState| -> (f64, f64) {
            let mut re = 0.0;
            let mut im = 0.0;
            for i in 0..n {
                let phase = kappa * f.grid.x(i);
                re += f.u[i] * phase.cos();
                im += -f.u[i] * phase.sin();
            }
            (2.0 * re / n as f64, 2.0 * im / n as f64)
        };
        let (re0, im0) = project(&snaps[0]);
        let (re1, im1) = project(last);
        let a0 = (re0 * re0 + im0 * im0).sqrt();
        let a1 = (re1 * re1 + im1 * im1).sqrt();
        let measured_decay = -(a1 / a0).ln() / t_end;
        let measured_omega = (im1.atan2(re1) - im0.atan2(re0)) / t_end;

        let expected_decay = p.alpha * (2.0 - 2.0 * theta.cos()) / (grid.dx * grid.dx);
        // d/dt u_hat = -i beta (sin 2 theta - 2 sin theta)/dx^3 u_hat, so the
        // phase advances at +beta (2 sin theta - sin 2 theta)/dx^3 (a wave
        // moving left, like the continuous -beta kappa^2 phase speed).
        let expected_omega =
            p.beta * (2.0 * theta.sin() - (2.0 * theta).sin()) / (grid.dx * grid.dx * grid.dx);
        assert!(
            (measured_decay - expected_decay).abs() < 1e-3 * expected_decay.abs(),
            "decay {measured_decay} vs {expected_decay}"
        );
        assert!(
            (measured_omega - expected_omega).abs() < 1e-3 * expected_omega.abs(),
            "omega {measured_omega} vs {expected_omega}"
        );
    }

    #[test]
    fn default_step_is_stable_and_large_steps_are_not() {
        // Pure dispersion on a single mode: the default step keeps the run
        // bounded, eight times the dispersive limit blows up.
        let n = 64;
        let grid = periodic_grid(0.0, 8.0, n);
        let p = params(0.0, 1.0, 0.0);
        let kappa = 2.0 * std::f64::consts::PI * 10.0 / 8.0;
        let u: Vec<f64> = (0..n).map(|i| 1e-3 * (kappa * grid.x(i)).sin()).collect();
        let state = FieldState::new(grid, u).unwrap();

        let dt = default_time_step(&grid, &p);
        let ok = run(&state, &p, 4000.0 * dt, dt, 0);
        assert!(ok.is_ok());

        let unstable = run(&state, &p, 4000.0 * dt, 8.0 * dt, 0);
        assert!(matches!(unstable, Err(Error::AbortedRun { .. })));
    }

    #[test]
    fn mass_is_conserved_on_periodic_grids() {
        let n = 128;
        let grid = periodic_grid(-10.0, 10.0, n);
        let p = params(0.5, 0.5, 0.0);
        let u: Vec<f64> = (0..n)
            .map(|i| {
                let x = grid.x(i);
                (-x * x / 4.0).exp()
            })
            .collect();
        let state = FieldState::new(grid, u).unwrap();
        let dt = default_time_step(&grid, &p);
        let snaps = run(&state, &p, 1.0, dt, 0).unwrap();
        let drift = (snaps.last().unwrap().mass() - snaps[0].mass()).abs();
        assert!(drift < 1e-10, "mass drift {drift}");
    }

    #[test]
    fn energy_monotone_with_dissipation_and_conserved_without() {
        // The central flux is conservative in mass, not in energy: its energy
        // defect is O(dx^2 u^3), so the conservation check runs on a
        // well-resolved, modest-amplitude field.
        let n = 256;
        let grid = periodic_grid(-10.0, 10.0, n);
        let u: Vec<f64> = (0..n)
            .map(|i| {
                let x = grid.x(i);
                0.2 * (-x * x / 4.0).exp()
            })
            .collect();
        let state = FieldState::new(grid, u).unwrap();

        let p = params(0.5, 0.5, 0.0);
        let dt = default_time_step(&grid, &p);
        let snaps = run(&state, &p, 1.0, dt, 200).unwrap();
        for w in snaps.windows(2) {
            assert!(w[1].energy() <= w[0].energy() + 1e-12);
        }

        let p0 = params(0.0, 0.5, 0.0);
        let dt = default_time_step(&grid, &p0);
        let snaps = run(&state, &p0, 1.0, dt, 0).unwrap();
        let drift = (snaps.last().unwrap().energy() - snaps[0].energy()).abs();
        assert!(drift < 1e-6, "energy drift {drift}");
    }

    #[test]
    fn speed_of_a_synthetically_shifted_profile() {
        let n = 256;
        let grid = periodic_grid(-20.0, 20.0, n);
        let profile = |x: f64| 1.0 - 0.5 * (1.0 + (x / 1.5).tanh());
        let lambda = 0.8;
        let snapshots: Vec<FieldState> = (0..5)
            .map(|s| {
                let t = s as f64 * 0.7;
                FieldState {
                    grid,
                    u: (0..n).map(|i| profile(grid.x(i) - lambda * t)).collect(),
                    time: t,
                }
            })
            .collect();
        let speed = measure_speed(&snapshots, 0.5).unwrap();
        assert!((speed - lambda).abs() < 1e-3);
    }

    #[test]
    fn stationary_field_has_zero_speed() {
        let n = 256;
        let grid = periodic_grid(-20.0, 20.0, n);
        let front = |x: f64| 0.5 * (1.0 - (x / 2.0).tanh());
        let snapshots: Vec<FieldState> = (0..4)
            .map(|s| FieldState {
                grid,
                u: (0..n).map(|i| front(grid.x(i))).collect(),
                time: s as f64,
            })
            .collect();
        let speed = measure_speed(&snapshots, 0.25).unwrap();
        assert!(speed.abs() < 1e-3);
    }

    #[test]
    fn peak_speed_of_a_shifted_pulse() {
        let n = 512;
        let grid = periodic_grid(-20.0, 20.0, n);
        let pulse = |x: f64| 3.0 / (x / 2.0).cosh().powi(2);
        let lambda = 1.0;
        let snapshots: Vec<FieldState> = (0..5)
            .map(|s| {
                let t = s as f64 * 0.5;
                FieldState {
                    grid,
                    u: (0..n).map(|i| pulse(grid.x(i) - lambda * t)).collect(),
                    time: t,
                }
            })
            .collect();
        let speed = measure_peak_speed(&snapshots).unwrap();
        assert!((speed - lambda).abs() < 1e-2);
    }

    #[test]
    fn missing_crossing_is_an_error() {
        let n = 64;
        let grid = periodic_grid(0.0, 10.0, n);
        let snapshots: Vec<FieldState> = (0..3)
            .map(|s| FieldState {
                grid,
                u: vec![0.0; n],
                time: s as f64,
            })
            .collect();
        assert!(matches!(
            measure_speed(&snapshots, 0.5),
            Err(Error::CrossingNotFound)
        ));
    }

    #[test]
    fn travelling_profile_tendency_is_minus_lambda_u_x() {
        // For a travelling solution u(x - lambda t) the time tendency equals
        // -lambda du/dx pointwise.
        use crate::odeint::{trace_wave, IntegratorConfig};
        let p = params(3.0, 1.0, 1.0);
        let cfg = IntegratorConfig {
            rel_tol: 1e-11,
            abs_tol: 1e-14,
            max_step: 0.05,
            ..IntegratorConfig::default()
        };
        let n = 1024;
        let (x_min, x_max) = (-15.0, 15.0);
        let dx = (x_max - x_min) / (n - 1) as f64;
        let traced = trace_wave(&p, -1.0, x_max, x_min - 1.0, 4, dx, &cfg).unwrap();
        let samples = &traced.profile.samples;
        let offset = samples
            .iter()
            .position(|s| (s.zeta - x_min).abs() < 1e-9)
            .unwrap();
        let u: Vec<f64> = samples[offset..offset + n].iter().map(|s| s.u).collect();
        let grid = Grid1D::uniform(
            x_min,
            x_max,
            n,
            Boundary::Clamped { left: u[0], right: u[n - 1] },
        )
        .unwrap();
        let state = FieldState::new(grid, u).unwrap();
        let tendency = semidiscretize(&state, &p).unwrap();

        let max_slope = samples[offset..offset + n]
            .iter()
            .map(|s| s.v.abs())
            .fold(0.0f64, f64::max);
        let mut checked = 0;
        for i in (SPONGE_CELLS + 2)..(n - SPONGE_CELLS - 2) {
            let slope = samples[offset + i].v;
            if slope.abs() < 0.05 * max_slope {
                continue;
            }
            let expected = -p.lambda * slope;
            assert!(
                ((tendency[i] - expected) / expected).abs() < 0.02,
                "x = {}: {} vs {}",
                grid.x(i),
                tendency[i],
                expected
            );
            checked += 1;
        }
        assert!(checked > 100);
    }

    #[test]
    fn zero_speed_profile_is_stationary() {
        use crate::odeint::{trace_algebraic_tail, IntegratorConfig};
        let p = params(1.0, 1.0, 0.0);
        let cfg = IntegratorConfig {
            rel_tol: 1e-11,
            abs_tol: 1e-14,
            max_step: 2.0,
            ..IntegratorConfig::default()
        };
        let n = 512;
        let (x_min, x_max) = (60.0, 160.0);
        let profile = trace_algebraic_tail(&p, x_min - 1.0, x_max + 1.0, 0.1, &cfg).unwrap();
        let grid_probe = Grid1D::uniform(x_min, x_max, n, Boundary::Periodic).unwrap();
        let u0: Vec<f64> = (0..n)
            .map(|i| {
                let x = grid_probe.x(i);
                let s = &profile.samples;
                let j = s.partition_point(|q| q.zeta <= x).min(s.len() - 1).max(1) - 1;
                let frac = (x - s[j].zeta) / (s[j + 1].zeta - s[j].zeta);
                s[j].u * (1.0 - frac) + s[j + 1].u * frac
            })
            .collect();
        let grid = Grid1D::uniform(
            x_min,
            x_max,
            n,
            Boundary::Clamped { left: u0[0], right: u0[n - 1] },
        )
        .unwrap();
        let state = FieldState::new(grid, u0).unwrap();
        let dt = default_time_step(&grid, &p);
        let snaps = run(&state, &p, 10.0, dt, 0).unwrap();
        let drift = snaps
            .last()
            .unwrap()
            .u
            .iter()
            .zip(&snaps[0].u)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(drift < 1e-3, "stationary drift {drift}");
    }

    #[test]
    fn second_order_spatial_convergence() {
        // Error against a fine-grid reference drops ~4x when dx halves.
        let p = params(0.2, 0.1, 0.0);
        let length = 8.0 * std::f64::consts::PI;
        let t_end = 1.0;
        let solve = |n: usize| -> FieldState {
            let grid = periodic_grid(0.0, length, n);
            let u: Vec<f64> = (0..n)
                .map(|i| 0.5 * (2.0 * 2.0 * std::f64::consts::PI * grid.x(i) / length).sin())
                .collect();
            let state = FieldState::new(grid, u).unwrap();
            // Same small dt everywhere so the time error is negligible.
            let fine = periodic_grid(0.0, length, 1024);
            let dt = 0.5 * default_time_step(&fine, &p);
            let steps = (t_end / dt).ceil();
            let dt = t_end / steps;
            run(&state, &p, t_end, dt, 0).unwrap().pop().unwrap()
        };
        let reference = solve(1024);
        let err = |state: &FieldState| -> f64 {
            let ratio = 1024 / state.grid.n;
            state
                .u
                .iter()
                .enumerate()
                .map(|(i, &v)| (v - reference.u[i * ratio]).abs())
                .fold(0.0f64, f64::max)
        };
        let e128 = err(&solve(128));
        let e256 = err(&solve(256));
        let order = (e128 / e256).log2();
        assert!(
            (1.6..=2.6).contains(&order),
            "observed order {order} (e128 = {e128}, e256 = {e256})"
        );
    }

    #[test]
    fn snapshot_csv_format() {
        let grid = Grid1D::uniform(0.0, 1.0, 8, Boundary::Clamped { left: 0.0, right: 0.0 })
            .unwrap();
        let state = FieldState::new(grid, vec![0.25; 8]).unwrap();
        let mut buf = Vec::new();
        write_snapshot_csv(&state, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,u"));
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 2);
        assert!(first.contains("2.50000000000e-1"));
        assert!(!text.contains('\r'));
    }
}
