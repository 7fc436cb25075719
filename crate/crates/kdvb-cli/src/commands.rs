//! Subcommand implementations.

use std::path::{Path, PathBuf};

use kdvb_core::asymptotics::{self, TailExpansion};
use kdvb_core::pde_sim;
use kdvb_core::*;
// the core prelude exports its own Result alias; plain std::result::Result here
use std::result::Result;

use crate::config::{resolve, resolve_opt, FileConfig};
use crate::output::{self, Series};
use crate::summary::Summary;
use crate::{
    ClassifyArgs, CliError, CommonArgs, CompareArgs, IntegratorArgs, PdeCheckArgs, ProfileArgs,
    SeriesArgs, SweepArgs, ZerosArgs,
};

struct Context {
    params: WaveParameters,
    file: FileConfig,
    out_dir: PathBuf,
    json: bool,
}

fn context(common: &CommonArgs) -> Result<Context, CliError> {
    let file = FileConfig::load(common.config.as_deref())?;
    let params = WaveParameters::new(
        resolve(common.alpha, file.alpha, 2.0),
        resolve(common.beta, file.beta, 1.0),
        resolve(common.lambda, file.lambda, 1.0),
    )?;
    let out_dir = common
        .out_dir
        .clone()
        .or_else(|| file.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok(Context {
        params,
        file,
        out_dir,
        json: common.json,
    })
}

impl Context {
    fn ensure_out_dir(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", self.out_dir.display())))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn integrator(&self, args: &IntegratorArgs) -> Result<IntegratorConfig, CliError> {
        let cfg = IntegratorConfig {
            rel_tol: resolve(args.rel_tol, self.file.rel_tol, 1e-10),
            abs_tol: resolve(args.abs_tol, self.file.abs_tol, 1e-13),
            max_step: resolve(args.max_step, self.file.max_step, 0.05),
            ..IntegratorConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn emit(&self, summary: &Summary) {
        if self.json {
            println!("{}", summary.json());
        } else {
            println!("{}", summary.line());
        }
    }
}

fn fmt_point(p: (f64, f64)) -> String {
    format!("({},{})", p.0, p.1)
}

fn fmt_complex(c: kdvb_core::num_complex::Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im > 0.0 {
        format!("{}+{}i", c.re, c.im)
    } else {
        format!("{}{}i", c.re, c.im)
    }
}

pub fn classify(args: ClassifyArgs) -> Result<(), CliError> {
    let ctx = context(&args.common)?;
    let class = kdvb_core::classify(&ctx.params)?;
    let points = singular_point_analysis(&ctx.params)?;

    let mut summary = Summary::new()
        .text("case", class.case.to_string())
        .text("saddle", fmt_point(points[0].location))
        .text("second", fmt_point(points[1].location))
        .num("discriminant", class.discriminant)
        .bool("boundary_double_root", class.boundary_double_root)
        .text("eig_second", fmt_complex(points[1].eigenvalues.0))
        .text("eig_second_conj", fmt_complex(points[1].eigenvalues.1));
    if let Ok(form) = emden_fowler_form(&ctx.params) {
        summary = summary.num("k", form.k).num("sigma", form.sigma);
    }
    ctx.emit(&summary);

    if let Some(name) = &args.csv {
        ctx.ensure_out_dir()?;
        write_classification_csv(&ctx.path(name), &ctx.params, &class, &points[1])?;
    }
    Ok(())
}

fn write_classification_csv(
    path: &Path,
    params: &WaveParameters,
    class: &RegimeClassification,
    second: &SingularPoint,
) -> Result<(), CliError> {
    let mut text = String::new();
    text.push_str("alpha,beta,lambda,case,discriminant,boundary,eig_re,eig_im\n");
    text.push_str(&format!(
        "{},{},{},{},{},{},{},{}\n",
        output::num(params.alpha),
        output::num(params.beta),
        output::num(params.lambda),
        class.case,
        output::num(class.discriminant),
        class.boundary_double_root,
        output::num(second.eigenvalues.1.re),
        output::num(second.eigenvalues.1.im),
    ));
    output::write_bytes(path, text.as_bytes())
}

pub fn series(args: SeriesArgs) -> Result<(), CliError> {
    let ctx = context(&args.common)?;
    let zeta = resolve(args.zeta, ctx.file.zeta, 10.0);
    if ctx.params.lambda == 0.0 {
        let u = asymptotics::eval_tail_zero_speed(&ctx.params, zeta)?;
        ctx.emit(
            &Summary::new()
                .num("zeta", zeta)
                .num("u", u)
                .text("form", "algebraic")
                .num("zeta_u", zeta * u),
        );
        return Ok(());
    }
    let u_inf = resolve(args.u_inf, ctx.file.u_inf, 1.0);
    let order = resolve(args.order, ctx.file.order, 3);
    let tail = TailExpansion::new(&ctx.params, u_inf, order)?;
    let value = tail.eval(zeta)?;
    let form = emden_fowler_form(&ctx.params)?;
    ctx.emit(
        &Summary::new()
            .num("zeta", zeta)
            .num("u", value.u)
            .num("du_dzeta", value.du_dzeta)
            .int("order", order as i64)
            .num("k", form.k)
            .num("sigma", form.sigma)
            .num("decay_rate", tail.decay_rate)
            .num("min_admissible_zeta", tail.min_admissible_zeta()),
    );
    Ok(())
}

fn default_zeta0(params: &WaveParameters, u_inf: f64, order: usize) -> Result<f64, CliError> {
    let tail = TailExpansion::new(params, u_inf, order)?;
    Ok((2.0 * tail.min_admissible_zeta()).max(2.0))
}

struct Traced {
    profile: WaveProfile,
    status: TraceStatus,
    zeta0: f64,
    zeta_end: f64,
}

fn trace_from_args(
    ctx: &Context,
    u_inf: f64,
    order: usize,
    zeta0: Option<f64>,
    zeta_end: Option<f64>,
    sample_step: f64,
    cfg: &IntegratorConfig,
) -> Result<Traced, CliError> {
    if ctx.params.lambda == 0.0 {
        let hi = resolve(zeta0, ctx.file.zeta0, 200.0);
        let lo = resolve(zeta_end, ctx.file.zeta_end, 50.0);
        let profile = trace_algebraic_tail(&ctx.params, lo, hi, sample_step, cfg)?;
        return Ok(Traced {
            profile,
            status: TraceStatus::Completed,
            zeta0: hi,
            zeta_end: lo,
        });
    }
    let zeta0 = match resolve_opt(zeta0, ctx.file.zeta0) {
        Some(z) => z,
        None if ctx.params.alpha == 0.0 => 0.0,
        None => default_zeta0(&ctx.params, u_inf, order)?,
    };
    let zeta_end = resolve(zeta_end, ctx.file.zeta_end, zeta0 - 45.0);
    let result = trace_wave(&ctx.params, u_inf, zeta0, zeta_end, order, sample_step, cfg)?;
    Ok(Traced {
        profile: result.profile,
        status: result.status,
        zeta0,
        zeta_end,
    })
}

fn status_text(status: TraceStatus) -> String {
    match status {
        TraceStatus::Completed => "completed".into(),
        TraceStatus::LeftFunnel { zeta } => format!("left_funnel_at_{zeta:.3}"),
    }
}

pub fn profile(args: ProfileArgs) -> Result<(), CliError> {
    let ctx = context(&args.common)?;
    let cfg = ctx.integrator(&args.integrator)?;
    ctx.ensure_out_dir()?;

    if args.overlay {
        return overlay(&ctx, &cfg);
    }

    let u_inf = resolve(args.u_inf, ctx.file.u_inf, -1.0);
    let order = resolve(args.order, ctx.file.order, 3);
    let sample_step = resolve(args.sample_step, ctx.file.sample_step, 0.01);
    let traced = trace_from_args(
        &ctx,
        u_inf,
        order,
        args.zeta0,
        args.zeta_end,
        sample_step,
        &cfg,
    )?;
    let class = kdvb_core::classify(&ctx.params)?;

    let rows: Vec<Vec<f64>> = traced
        .profile
        .samples
        .iter()
        .map(|s| vec![s.zeta, s.u, s.v])
        .collect();
    output::write_csv(&ctx.path("profile.csv"), &["zeta", "u", "v"], &rows)?;
    let svg = output::render_svg(
        &[Series::new(
            class.case.to_string(),
            traced.profile.samples.iter().map(|s| (s.zeta, s.u)).collect(),
        )],
        "zeta",
        "u",
    );
    output::write_bytes(&ctx.path("profile.svg"), svg.as_bytes())?;

    let zeros = count_isolated_zeros(&traced.profile)?;
    let mut summary = Summary::new()
        .text("case", class.case.to_string())
        .text("status", status_text(traced.status))
        .num("zeta0", traced.zeta0)
        .num("zeta_end", traced.zeta_end)
        .int("samples", traced.profile.samples.len() as i64)
        .int("zeros", zeros.count as i64)
        .num("max_u", traced.profile.max_u());
    if ctx.params.lambda == 0.0 {
        let window = (traced.zeta_end, traced.zeta0);
        summary = summary.num("zeta_u_limit", measure_algebraic_limit(&traced.profile, window)?);
    } else if let Ok(left) = detect_left_state(&traced.profile) {
        summary = summary
            .num("left_state", left.limit)
            .num("left_uncertainty", left.uncertainty)
            .text("mode", left.mode.to_string());
    }
    ctx.emit(&summary);
    Ok(())
}

/// Three canonical regimes in one figure: nodal (alpha = 3 sqrt(beta lambda)),
/// focal (alpha = 0.8 sqrt(beta lambda)) and central (alpha = 0), each shifted
/// so that comparable features align near zeta = 0.
fn overlay(ctx: &Context, cfg: &IntegratorConfig) -> Result<(), CliError> {
    let beta = ctx.params.beta;
    let lambda = if ctx.params.lambda > 0.0 { ctx.params.lambda } else { 1.0 };
    let scale = (beta * lambda).sqrt();
    let mut curves = Vec::new();
    for (label, alpha) in [
        ("A_nodal", 3.0 * scale),
        ("B_focal", 0.8 * scale),
        ("C_central", 0.0),
    ] {
        let p = WaveParameters::new(alpha, beta, lambda)?;
        let (zeta0, zeta_end) = if alpha == 0.0 {
            (0.0, -30.0)
        } else {
            let z0 = default_zeta0(&p, -1.0, 3)?;
            (z0, z0 - 40.0)
        };
        let result = trace_wave(&p, -1.0, zeta0, zeta_end, 3, 0.02, cfg)?;
        // Align: heteroclinic profiles at the u = lambda crossing, the pulse
        // at its peak.
        let samples = &result.profile.samples;
        let anchor = if alpha == 0.0 {
            samples
                .iter()
                .max_by(|a, b| a.u.partial_cmp(&b.u).unwrap())
                .map(|s| s.zeta)
                .unwrap_or(0.0)
        } else {
            samples
                .windows(2)
                .find(|w| (w[0].u - lambda) * (w[1].u - lambda) <= 0.0)
                .map(|w| w[0].zeta)
                .unwrap_or(0.0)
        };
        curves.push(Series::new(
            label,
            samples.iter().map(|s| (s.zeta - anchor, s.u)).collect(),
        ));
    }
    let svg = output::render_svg(&curves, "zeta", "u");
    output::write_bytes(&ctx.path("regimes.svg"), svg.as_bytes())?;
    ctx.emit(
        &Summary::new()
            .text("overlay", "regimes.svg")
            .text("cases", "A_nodal,B_focal,C_central"),
    );
    Ok(())
}

pub fn compare(args: CompareArgs) -> Result<(), CliError> {
    let ctx = context(&args.common)?;
    let cfg = ctx.integrator(&args.integrator)?;
    ctx.ensure_out_dir()?;
    let u_inf = resolve(args.u_inf, ctx.file.u_inf, 1.0);
    let order = resolve(args.order, ctx.file.order, 3);
    let zeta0 = match resolve_opt(args.zeta0, ctx.file.zeta0) {
        Some(z) => z,
        None => default_zeta0(&ctx.params, u_inf, order)?,
    };
    let window = resolve(args.window, ctx.file.window, 5.0);
    let rows = resolve(args.rows, None, 100);
    let direction = match args.direction.as_str() {
        "backward" => CompareDirection::Backward,
        "forward" => CompareDirection::Forward,
        other => {
            return Err(CliError::invalid(format!(
                "direction must be forward or backward, got {other}"
            )))
        }
    };
    let report =
        compare_series_ode(&ctx.params, u_inf, order, zeta0, window, direction, rows, &cfg)?;

    let table: Vec<Vec<f64>> = report
        .rows
        .iter()
        .map(|r| vec![r.zeta, r.u_series, r.u_ode, r.rel_err])
        .collect();
    output::write_csv(
        &ctx.path("compare.csv"),
        &["zeta", "u_series", "u_ode", "rel_err"],
        &table,
    )?;

    let mut summary = Summary::new()
        .text("direction", args.direction.clone())
        .num("zeta0", zeta0)
        .num("window", window)
        .int("order", order as i64)
        .num("max_rel_err", report.max_rel_err)
        .num("expected_decay_rate", ctx.params.decay_rate()?);
    summary = match report.fitted_decay_rate {
        Some(rate) => summary.num("fitted_decay_rate", rate),
        None => summary.text("fitted_decay_rate", "sign_change"),
    };
    ctx.emit(&summary);
    Ok(())
}

fn resample_onto_grid(profile: &WaveProfile, grid: &Grid1D) -> Result<Vec<f64>, CliError> {
    let s = &profile.samples;
    if s.len() < 2 {
        return Err(CliError::numerical("profile too short to resample"));
    }
    let mut out = Vec::with_capacity(grid.n);
    for i in 0..grid.n {
        let x = grid.x(i);
        if x <= s[0].zeta {
            out.push(s[0].u);
            continue;
        }
        if x >= s[s.len() - 1].zeta {
            out.push(s[s.len() - 1].u);
            continue;
        }
        let j = s.partition_point(|p| p.zeta <= x) - 1;
        let (a, b) = (&s[j], &s[j + 1]);
        let frac = (x - a.zeta) / (b.zeta - a.zeta);
        out.push(a.u * (1.0 - frac) + b.u * frac);
    }
    Ok(out)
}

pub fn pde_check(args: PdeCheckArgs) -> Result<(), CliError> {
    let ctx = context(&args.common)?;
    let cfg = ctx.integrator(&args.integrator)?;
    ctx.ensure_out_dir()?;
    let zero_speed = ctx.params.lambda == 0.0;
    let u_inf = resolve(args.u_inf, ctx.file.u_inf, -1.0);
    let order = resolve(args.order, ctx.file.order, 3);
    let x_min = resolve(args.x_min, ctx.file.x_min, if zero_speed { 60.0 } else { -40.0 });
    let x_max = resolve(args.x_max, ctx.file.x_max, if zero_speed { 160.0 } else { 40.0 });
    let n = resolve(args.grid_n, ctx.file.grid_n, 1024);
    let t_end = resolve(args.t_end, ctx.file.t_end, 5.0);
    let snapshots = resolve(args.snapshots, ctx.file.snapshots, 10).max(2);

    // Travelling profile as the initial condition.
    let profile = if zero_speed {
        trace_algebraic_tail(&ctx.params, x_min.max(1e-3), x_max, 0.02, &cfg)?
    } else {
        let result = trace_wave(&ctx.params, u_inf, x_max, x_min - 1.0, order, 0.02, &cfg)?;
        if let TraceStatus::LeftFunnel { zeta } = result.status {
            return Err(CliError::numerical(format!(
                "trace left the heteroclinic funnel at zeta = {zeta}"
            )));
        }
        result.profile
    };

    let probe = Grid1D::uniform(x_min, x_max, n, Boundary::Periodic)
        .map_err(CliError::from)?;
    let u0 = resample_onto_grid(&profile, &probe)?;
    let grid = Grid1D::uniform(
        x_min,
        x_max,
        n,
        Boundary::Clamped {
            left: u0[0],
            right: u0[n - 1],
        },
    )?;
    let u0 = resample_onto_grid(&profile, &grid)?;
    let state = FieldState::new(grid, u0)?;

    let dt = resolve(args.dt, ctx.file.dt, pde_sim::default_time_step(&grid, &ctx.params));
    let steps = (t_end / dt).ceil() as usize;
    let stride = (steps / snapshots).max(1);
    let snaps = pde_sim::run(&state, &ctx.params, t_end, dt, stride)?;

    for (i, snap) in snaps.iter().enumerate() {
        let mut buf = Vec::new();
        pde_sim::write_snapshot_csv(snap, &mut buf)
            .map_err(|e| CliError::io(format!("snapshot encoding failed: {e}")))?;
        output::write_bytes(&ctx.path(&format!("snapshot_{i:03}.csv")), &buf)?;
    }

    let speed = if zero_speed {
        let level = 0.5 * (state.u[0] + state.u[n - 1]);
        measure_speed(&snaps, level)?
    } else if ctx.params.alpha == 0.0 {
        measure_peak_speed(&snaps)?
    } else {
        measure_speed(&snaps, ctx.params.lambda)?
    };
    let drift = shape_drift(&snaps[0], snaps.last().unwrap());
    let mass_change = (snaps.last().unwrap().mass() - snaps[0].mass()).abs();
    let max_drift = snaps
        .last()
        .unwrap()
        .u
        .iter()
        .zip(&snaps[0].u)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    ctx.emit(
        &Summary::new()
            .num("speed", speed)
            .num("target_speed", ctx.params.lambda)
            .num("shape_drift", drift)
            .num("max_drift", max_drift)
            .num("mass_change", mass_change)
            .num("dt", dt)
            .int("grid_n", n as i64)
            .num("t_end", t_end)
            .int("snapshots", snaps.len() as i64),
    );
    Ok(())
}

pub fn zeros(args: ZerosArgs) -> Result<(), CliError> {
    let ctx = context(&args.common)?;
    let cfg = ctx.integrator(&args.integrator)?;
    let u_inf = resolve(args.u_inf, ctx.file.u_inf, -1.0);
    let order = resolve(args.order, ctx.file.order, 3);
    let sample_step = resolve(args.sample_step, ctx.file.sample_step, 0.01);
    let traced = trace_from_args(
        &ctx,
        u_inf,
        order,
        args.zeta0,
        args.zeta_end,
        sample_step,
        &cfg,
    )?;
    let report = count_isolated_zeros(&traced.profile)?;
    let locations = report
        .locations
        .iter()
        .map(|z| format!("{z:.6}"))
        .collect::<Vec<_>>()
        .join(";");
    ctx.emit(
        &Summary::new()
            .int("zeros", report.count as i64)
            .text("locations", format!("[{locations}]"))
            .int("zero_intervals", report.zero_intervals.len() as i64)
            .text("status", status_text(traced.status))
            .int("samples", traced.profile.samples.len() as i64),
    );
    Ok(())
}

fn parse_list(text: Option<&str>, fallback: f64) -> Result<Vec<f64>, CliError> {
    match text {
        None => Ok(vec![fallback]),
        Some(t) => t
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::invalid(format!("bad list entry {s:?}: {e}")))
            })
            .collect(),
    }
}

fn param_hash(alpha: f64, beta: f64, lambda: f64) -> u64 {
    // FNV-1a over the canonical formatting.
    let text = format!(
        "alpha={},beta={},lambda={}",
        output::num(alpha),
        output::num(beta),
        output::num(lambda)
    );
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in text.bytes() {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let ctx = context(&args.common)?;
    ctx.ensure_out_dir()?;
    let alphas = parse_list(args.alpha_list.as_deref(), ctx.params.alpha)?;
    let betas = parse_list(args.beta_list.as_deref(), ctx.params.beta)?;
    let lambdas = parse_list(args.lambda_list.as_deref(), ctx.params.lambda)?;
    let threads = resolve(args.threads, None, 4).max(1);

    let mut points = Vec::new();
    for &a in &alphas {
        for &b in &betas {
            for &l in &lambdas {
                points.push((a, b, l));
            }
        }
    }

    // Each grid point is an isolated pure computation; files are named by
    // parameter hash, so workers cannot collide.
    let results: Vec<Result<Vec<String>, CliError>> = std::thread::scope(|scope| {
        let chunks: Vec<&[(f64, f64, f64)]> =
            points.chunks(points.len().div_ceil(threads)).collect();
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|chunk| {
                let out_dir = ctx.out_dir.clone();
                scope.spawn(move || {
                    let mut rows = Vec::new();
                    for &(a, b, l) in chunk {
                        let p = WaveParameters::new(a, b, l)?;
                        let class = kdvb_core::classify(&p)?;
                        let pts = singular_point_analysis(&p)?;
                        let name = format!("classify_{:016x}.csv", param_hash(a, b, l));
                        write_classification_csv(&out_dir.join(name), &p, &class, &pts[1])?;
                        rows.push(format!(
                            "{},{},{},{},{},{},{},{}",
                            output::num(a),
                            output::num(b),
                            output::num(l),
                            class.case,
                            output::num(class.discriminant),
                            class.boundary_double_root,
                            output::num(pts[1].eigenvalues.1.re),
                            output::num(pts[1].eigenvalues.1.im),
                        ));
                    }
                    Ok(rows)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    rows.sort();
    let mut text = String::from("alpha,beta,lambda,case,discriminant,boundary,eig_re,eig_im\n");
    for row in &rows {
        text.push_str(row);
        text.push('\n');
    }
    output::write_bytes(&ctx.path("sweep.csv"), text.as_bytes())?;

    ctx.emit(
        &Summary::new()
            .int("points", points.len() as i64)
            .text("table", "sweep.csv")
            .int("threads", threads as i64),
    );
    Ok(())
}
