//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test -p kdvb-cli --test acceptance -- --nocapture` to see
//! the lines for passing criteria too).
//!
//! Criterion 3 is implemented exactly as specified and is expected to FAIL:
//! the configuration it pins (order-3 seed at zeta0 = 12, comparison window
//! [12, 17], relative tolerance 1e-6) is not numerically attainable in any
//! integration direction. The test body documents the analysis and prints the
//! nearest attainable configurations alongside the faithful measurement.

use std::process::Command;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use kdvb_core::asymptotics::{self, TailExpansion};
use kdvb_core::pde_sim;
use kdvb_core::*;

fn params(alpha: f64, beta: f64, lambda: f64) -> WaveParameters {
    WaveParameters::new(alpha, beta, lambda).unwrap()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn report(criterion: usize, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// 1. Classification trichotomy at (beta, lambda) = (1, 1):
///    alpha in {3, 2, 1, 0} gives {nodal, nodal boundary, focal, central},
///    with a defective double eigenvalue mu = 1 on the boundary.
#[test]
fn criterion_01_classification_trichotomy() {
    let cases = [
        (3.0, RegimeCase::ANodal, false),
        (2.0, RegimeCase::ANodal, true),
        (1.0, RegimeCase::BFocal, false),
        (0.0, RegimeCase::CCentral, false),
    ];
    let mut ok = true;
    for &(alpha, expected, boundary) in &cases {
        let class = classify(&params(alpha, 1.0, 1.0)).unwrap();
        ok &= class.case == expected && class.boundary_double_root == boundary;
    }
    let eig = linearize(&params(2.0, 1.0, 1.0), (2.0, 0.0)).unwrap();
    let double_root = eig.0 == eig.1 && rel_err(eig.0.re, 1.0) < 1e-12 && eig.0.im == 0.0;
    ok &= double_root;
    report(1, ok, "alpha {3,2,1,0} -> {A, A(boundary, mu=1 double), B, C}");
    assert!(ok);
}

/// 2. Leading tail coefficients equal -2 k^2 a^2 u/b and
///    -8 k^4 a^2 u^2/((k-1)(3k-1) b) to 1e-12 relative, 100 random sets.
#[test]
fn criterion_02_tail_term_coefficients() {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let alpha = rng.random_range(0.2..5.0);
        let beta = rng.random_range(0.1..3.0);
        let lambda = rng.random_range(0.1..4.0);
        let u_inf = rng.random_range(0.2..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let p = params(alpha, beta, lambda);
        let k = p.k().unwrap();
        let terms = TailExpansion::new(&p, u_inf, 1).unwrap().terms();
        let t0 = -2.0 * k * k * alpha * alpha * u_inf / beta;
        let t1 = -8.0 * k.powi(4) * alpha * alpha * u_inf * u_inf
            / ((k - 1.0) * (3.0 * k - 1.0) * beta);
        worst = worst
            .max(rel_err(terms[0].coefficient, t0))
            .max(rel_err(terms[1].coefficient, t1));
    }
    let ok = worst < 1e-12;
    report(2, ok, &format!("worst coefficient deviation {worst:.3e} (tolerance 1e-12)"));
    assert!(ok);
}

/// 3. Series-vs-ODE at (2, 1, 1), u_inf = 1, order 3: integrate from a
///    zeta0 = 12 tail seed across [12, 17]; required max relative error
///    < 1e-6 and fitted decay rate within 1% of (k-1) alpha / (2 beta).
///
/// Implemented exactly as stated — seeded at zeta0 = 12, integrated forward
/// across the window — and expected to FAIL. The window runs into the saddle
/// at the origin, whose unstable mode amplifies perturbations by
/// e^{mu_plus * 5} ~ 1.7e5 across the window. The order-3 truncation error of
/// the seed at zeta0 = 12 is ~1e-7, with a component ~1.1e-7 off the stable
/// manifold, so the integrated solution departs from the series by O(1)
/// relative error near zeta = 17 regardless of integrator tolerances (f64
/// roundoff alone is amplified to ~1e-11). Seeding at the deep end instead
/// and integrating backward — the stable direction — still measures
/// ~1.7e-6 > 1e-6, because the same truncation residual is integrated over
/// the window with growth e^{|mu_minus| * 5} ~ 8. The fitted-rate clause
/// fails independently: over [12, 17] the second series term steepens the
/// log-slope of even a perfect trajectory by ~1.7%. Nearest attainable
/// configurations (demonstrated by the passing cross-check tests in the core
/// crate): order 3 seeded at zeta0 >= 22 forward, or order >= 4 backward.
#[test]
fn criterion_03_series_vs_ode_cross_check() {
    let p = params(2.0, 1.0, 1.0);
    let cfg = IntegratorConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-16,
        max_step: 0.02,
        ..IntegratorConfig::default()
    };
    let expected_rate = p.decay_rate().unwrap();

    // Supplementary diagnostics: the stable direction and a deeper seed.
    let backward =
        compare_series_ode(&p, 1.0, 3, 12.0, 5.0, CompareDirection::Backward, 100, &cfg).unwrap();
    println!(
        "criterion 3 (supplementary): backward-from-17 max_rel_err = {:.3e}, fitted rate = {:?}",
        backward.max_rel_err, backward.fitted_decay_rate
    );
    let deep =
        compare_series_ode(&p, 1.0, 3, 22.0, 5.0, CompareDirection::Forward, 100, &cfg).unwrap();
    println!(
        "criterion 3 (supplementary): forward-from-22 max_rel_err = {:.3e}, fitted rate = {:?}",
        deep.max_rel_err, deep.fitted_decay_rate
    );

    // The criterion as stated.
    let faithful =
        compare_series_ode(&p, 1.0, 3, 12.0, 5.0, CompareDirection::Forward, 100, &cfg).unwrap();
    let rate_ok = faithful
        .fitted_decay_rate
        .map(|r| rel_err(r, expected_rate) < 0.01)
        .unwrap_or(false);
    let err_ok = faithful.max_rel_err < 1e-6;
    report(
        3,
        err_ok && rate_ok,
        &format!(
            "forward-from-12 max_rel_err = {:.3e} (required < 1e-6), fitted rate = {:?} (required within 1% of {expected_rate:.6})",
            faithful.max_rel_err, faithful.fitted_decay_rate
        ),
    );
    assert!(
        err_ok,
        "max relative error {:.3e} exceeds 1e-6; see the test doc comment for why this \
         configuration cannot meet the tolerance",
        faithful.max_rel_err
    );
    assert!(rate_ok);
}

/// 4. Zero-speed tail at (1, 1, 0): |zeta u(zeta) + 2| < 0.04 across
///    zeta in [50, 200] on the traced profile (best-translate gauge: the
///    orbit family is translation-invariant and nothing pins the offset).
#[test]
fn criterion_04_zero_speed_tail() {
    let p = params(1.0, 1.0, 0.0);
    let cfg = IntegratorConfig {
        rel_tol: 1e-11,
        abs_tol: 1e-14,
        max_step: 2.0,
        ..IntegratorConfig::default()
    };
    let profile = trace_algebraic_tail(&p, 50.0, 200.0, 0.25, &cfg).unwrap();
    let worst = profile
        .samples
        .iter()
        .map(|s| (s.zeta * s.u + 2.0).abs())
        .fold(0.0f64, f64::max);
    let ok = worst < 0.04;
    report(4, ok, &format!("sup |zeta u + 2 alpha| = {worst:.4} over [50, 200] (tolerance 0.04)"));
    assert!(ok);
}

/// 5. Convergence of the product-form series (consecutive-term ratios < 1 in
///    the admissible window) and the documented order-3 discrepancy between
///    the closed form (~99.50) and the exact recurrence (~155.59) at
///    (2, 1, 1), u_inf = 1, to three significant digits.
#[test]
fn criterion_05_series_convergence_and_discrepancy() {
    let p = params(2.0, 1.0, 1.0);
    let zeta = 10.0;
    let mut ratios_ok = true;
    let mut prev = f64::INFINITY;
    for i in 1..=8 {
        let t = asymptotics::closed_form_series_term(&p, 1.0, i).unwrap();
        let magnitude = t.coefficient.abs() * (-t.rate * zeta).exp();
        ratios_ok &= magnitude < prev;
        prev = magnitude;
    }

    let form = emden_fowler_form(&p).unwrap();
    let cmp = asymptotics::series_coefficient_comparison(1.0, form.sigma, 3).unwrap();
    let closed_ok = rel_err(cmp.closed_form[3], 99.50) < 5e-3;
    let exact_ok = rel_err(cmp.exact[3], 155.59) < 5e-3;
    let ok = ratios_ok && closed_ok && exact_ok;
    report(
        5,
        ok,
        &format!(
            "term ratios < 1: {ratios_ok}; order-3 closed form {:.4} vs 99.50, exact {:.4} vs 155.59",
            cmp.closed_form[3], cmp.exact[3]
        ),
    );
    assert!(ok);
}

/// 6. Zero-crossing counts of traced profiles are finite and unchanged under
///    2x refinement of integrator tolerance and sampling density, for one
///    nodal and one focal parameter set.
#[test]
fn criterion_06_zero_counts_stable() {
    let mut ok = true;
    let mut detail = String::new();
    for &(alpha, label) in &[(3.0, "A"), (1.0, "B")] {
        let p = params(alpha, 1.0, 1.0);
        let tail = TailExpansion::new(&p, -1.0, 3).unwrap();
        let zeta0 = 2.0 * tail.min_admissible_zeta().max(2.0);
        let base_cfg = IntegratorConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: 0.05,
            ..IntegratorConfig::default()
        };
        let fine_cfg = IntegratorConfig {
            rel_tol: base_cfg.rel_tol / 2.0,
            abs_tol: base_cfg.abs_tol / 2.0,
            ..base_cfg
        };
        let base = trace_wave(&p, -1.0, zeta0, zeta0 - 50.0, 3, 0.02, &base_cfg).unwrap();
        let fine = trace_wave(&p, -1.0, zeta0, zeta0 - 50.0, 3, 0.01, &fine_cfg).unwrap();
        let zb = count_isolated_zeros(&base.profile).unwrap();
        let zf = count_isolated_zeros(&fine.profile).unwrap();
        ok &= zb.count == zf.count;
        detail.push_str(&format!("case {label}: {} vs {} zeros; ", zb.count, zf.count));
    }
    report(6, ok, detail.trim_end_matches("; "));
    assert!(ok);
}

/// 7. Solitary-wave oracle at (0, 1, 1): the traced pulse peaks at
///    3.000 +/- 0.005, returns below 1e-3, and the first integral
///    H = v^2/2 + c2 (u^3/3 - lambda u^2) drifts less than 1e-8.
#[test]
fn criterion_07_soliton_oracle() {
    let p = params(0.0, 1.0, 1.0);
    let cfg = IntegratorConfig {
        rel_tol: 1e-11,
        abs_tol: 1e-15,
        max_step: 0.02,
        ..IntegratorConfig::default()
    };
    let result = trace_wave(&p, -1.0, 0.0, -27.0, 3, 0.005, &cfg).unwrap();
    assert_eq!(result.status, TraceStatus::Completed);
    let profile = &result.profile;

    let max_u = profile.max_u();
    let returns = profile.samples.first().unwrap().u.abs();
    let c2 = 0.5;
    let h = |u: f64, v: f64| 0.5 * v * v + c2 * (u * u * u / 3.0 - u * u);
    let h0 = h(profile.samples[0].u, profile.samples[0].v);
    let drift = profile
        .samples
        .iter()
        .map(|s| (h(s.u, s.v) - h0).abs())
        .fold(0.0f64, f64::max);

    let peak_ok = (max_u - 3.0).abs() < 5e-3;
    let return_ok = returns < 1e-3;
    let drift_ok = drift < 1e-8;
    let ok = peak_ok && return_ok && drift_ok;
    report(
        7,
        ok,
        &format!("max u = {max_u:.5} (3.000 +/- 0.005), far-side |u| = {returns:.2e} (< 1e-3), H drift = {drift:.2e} (< 1e-8)"),
    );
    assert!(ok);
}

/// 8. Saddle stable-eigenvalue magnitude equals the leading tail decay rate
///    to 1e-12 relative over 100 random parameter sets.
#[test]
fn criterion_08_eigenvalue_decay_identity() {
    let mut rng = StdRng::seed_from_u64(88);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = params(
            rng.random_range(0.05..5.0),
            rng.random_range(0.05..3.0),
            rng.random_range(0.05..4.0),
        );
        let eig = linearize(&p, (0.0, 0.0)).unwrap();
        let stable = eig.0.re.min(eig.1.re);
        worst = worst.max(rel_err(-stable, p.decay_rate().unwrap()));
    }
    let ok = worst < 1e-12;
    report(8, ok, &format!("worst |mu_minus| vs decay-rate deviation {worst:.3e} (tolerance 1e-12)"));
    assert!(ok);
}

fn resample(profile: &WaveProfile, grid: &Grid1D) -> Vec<f64> {
    let s = &profile.samples;
    (0..grid.n)
        .map(|i| {
            let x = grid.x(i);
            if x <= s[0].zeta {
                s[0].u
            } else if x >= s[s.len() - 1].zeta {
                s[s.len() - 1].u
            } else {
                let j = s.partition_point(|p| p.zeta <= x) - 1;
                let frac = (x - s[j].zeta) / (s[j + 1].zeta - s[j].zeta);
                s[j].u * (1.0 - frac) + s[j + 1].u * frac
            }
        })
        .collect()
}

/// 9. Full-equation verification: nodal profile (3, 1, 1) on [-40, 40] with
///    2048 cells simulated to t = 5 travels at lambda within 2% with L2 shape
///    drift < 1e-2; a periodic run with the same coefficients conserves mass
///    to 1e-10.
#[test]
fn criterion_09_pde_verification() {
    let p = params(3.0, 1.0, 1.0);
    let cfg = IntegratorConfig {
        rel_tol: 1e-10,
        abs_tol: 1e-13,
        max_step: 0.05,
        ..IntegratorConfig::default()
    };
    let traced = trace_wave(&p, -1.0, 40.0, -41.0, 3, 0.02, &cfg).unwrap();
    assert_eq!(traced.status, TraceStatus::Completed);

    let n = 2048;
    let probe = Grid1D::uniform(-40.0, 40.0, n, Boundary::Periodic).unwrap();
    let u0 = resample(&traced.profile, &probe);
    let grid = Grid1D::uniform(
        -40.0,
        40.0,
        n,
        Boundary::Clamped {
            left: u0[0],
            right: u0[n - 1],
        },
    )
    .unwrap();
    let u0 = resample(&traced.profile, &grid);
    let state = FieldState::new(grid, u0).unwrap();
    let dt = 3e-5;
    let snaps = pde_sim::run(&state, &p, 5.0, dt, 20_000).unwrap();

    let speed = measure_speed(&snaps, p.lambda).unwrap();
    let drift = shape_drift(&snaps[0], snaps.last().unwrap());
    let speed_ok = rel_err(speed, p.lambda) < 0.02;
    let drift_ok = drift < 1e-2;

    // Periodic mass conservation with the same coefficients.
    let n_per = 512;
    let per_grid = Grid1D::uniform(-20.0, 20.0, n_per, Boundary::Periodic).unwrap();
    let bump: Vec<f64> = (0..n_per)
        .map(|i| {
            let x = per_grid.x(i);
            (-x * x / 4.0).exp()
        })
        .collect();
    let per_state = FieldState::new(per_grid, bump).unwrap();
    let per_dt = pde_sim::default_time_step(&per_grid, &p);
    let per_snaps = pde_sim::run(&per_state, &p, 1.0, per_dt, 0).unwrap();
    let mass_drift = (per_snaps.last().unwrap().mass() - per_snaps[0].mass()).abs();
    let mass_ok = mass_drift < 1e-10;

    let ok = speed_ok && drift_ok && mass_ok;
    report(
        9,
        ok,
        &format!("speed = {speed:.5} (lambda = 1 within 2%), shape drift = {drift:.2e} (< 1e-2), periodic mass drift = {mass_drift:.2e} (< 1e-10)"),
    );
    assert!(ok);
}

/// 10. Determinism: identical CLI invocations produce byte-identical CSV and
///     SVG artifacts and identical summary lines.
#[test]
fn criterion_10_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, args: &[&str]| -> Vec<u8> {
        let out = Command::new(env!("CARGO_BIN_EXE_kdvb"))
            .args(args)
            .arg("--out-dir")
            .arg(sub)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let profile_args = ["profile", "--alpha", "3", "--beta", "1", "--lambda", "1"];
    let compare_args = [
        "compare", "--alpha", "2", "--beta", "1", "--lambda", "1", "--u-inf", "1", "--order", "3",
    ];
    let s1 = run("a", &profile_args);
    let s2 = run("b", &profile_args);
    let c1 = run("a", &compare_args);
    let c2 = run("b", &compare_args);

    let file = |sub: &str, name: &str| std::fs::read(dir.path().join(sub).join(name)).unwrap();
    let csv_ok = file("a", "profile.csv") == file("b", "profile.csv");
    let svg_ok = file("a", "profile.svg") == file("b", "profile.svg");
    let cmp_ok = file("a", "compare.csv") == file("b", "compare.csv");
    let stdout_ok = s1 == s2 && c1 == c2;
    let ok = csv_ok && svg_ok && cmp_ok && stdout_ok;
    report(
        10,
        ok,
        &format!("profile.csv identical: {csv_ok}, profile.svg identical: {svg_ok}, compare.csv identical: {cmp_ok}, summaries identical: {stdout_ok}"),
    );
    assert!(ok);
}
