use std::f64::consts::PI;
use std::fmt::Write as _;

use ghost_opa_core::coincidence::RNG_ALGORITHM;
use ghost_opa_core::optics::{combined_propagator, Regime};
use ghost_opa_core::photon_stats::{p_good_closed, p_good_oracle};
use ghost_opa_core::presets::q_accept;
use ghost_opa_core::rates::{
    fringe_period, fringe_threshold, fringe_zero, scan_visibility, singles_fringe_visible,
};
use ghost_opa_core::{
    mc_visibility, singles_rate_a, visibility, visibility_curve, DoubleSlitAperture,
    Error as CoreError, McSettings, OpticalGeometry, QuadOptions, RateModel,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::svg::{Plot, Series};
use crate::table::{CsvTable, TOOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Coincidence pattern against the D2 position.
    Pattern,
    /// Visibility against gain for each configured bandwidth.
    Visibility,
    /// Single counts at D2 and at D1.
    Singles,
    /// Monte Carlo coincidence fringe.
    Mc,
    /// Invariant checks.
    Check,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pattern => "pattern",
            Command::Visibility => "visibility",
            Command::Singles => "singles",
            Command::Mc => "mc",
            Command::Check => "check",
        }
    }
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    /// CSV for data commands, the report for `check`.
    pub text: String,
    pub table: Option<CsvTable>,
    pub svg: Option<String>,
    /// Short human-readable lines.
    pub summary: Vec<String>,
    pub failed_checks: usize,
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Output, CliError> {
    match command {
        Command::Pattern => pattern(cfg),
        Command::Visibility => visibility_cmd(cfg),
        Command::Singles => singles(cfg),
        Command::Mc => mc(cfg),
        Command::Check => check(cfg),
    }
}

fn model(cfg: &RunConfig) -> Result<RateModel, CliError> {
    Ok(RateModel::new(
        cfg.source()?,
        cfg.detection()?,
        cfg.geometry()?,
        cfg.aperture()?,
        &cfg.quad()?,
    )?)
}

fn footer(cfg: &RunConfig) -> String {
    format!("{TOOL}  config sha256 {}", cfg.hash())
}

fn data_output(
    command: Command,
    cfg: &RunConfig,
    table: CsvTable,
    svg: Option<String>,
    summary: Vec<String>,
) -> Output {
    Output {
        text: table.render(command.name(), cfg),
        table: Some(table),
        svg,
        summary,
        failed_checks: 0,
    }
}

fn pattern(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = model(cfg)?;
    let xs = cfg.rho_grid()?;
    let y = cfg.rho2_y;
    let acc = m.accidental();
    let ent: Vec<f64> = xs.iter().map(|&x| m.entangled((x, y))).collect();
    let total: Vec<f64> = ent.iter().map(|e| e + acc).collect();
    let peak = total.iter().copied().fold(0.0, f64::max);
    let norm = if peak > 0.0 { peak } else { 1.0 };

    let mut t = CsvTable::new(&[
        ("rho2x", "m"),
        ("total", ""),
        ("entangled", ""),
        ("accidental", ""),
    ]);
    for (i, &x) in xs.iter().enumerate() {
        t.push(vec![x, total[i] / norm, ent[i] / norm, acc / norm]);
    }
    let period = fringe_period(&m.geom, &m.ap);
    t.meta("normalisation", format!("{norm:e}"));
    t.meta("fringe_period_m", format!("{period:e}"));
    t.meta(
        "first_zero_m",
        format!("{:e}", fringe_zero(0, &m.geom, &m.ap)),
    );
    let vis = scan_visibility(&total);
    t.meta(
        "scan_visibility",
        vis.map_or("undefined".into(), |v| format!("{v:e}")),
    );

    let x_mm: Vec<f64> = xs.iter().map(|x| x * 1e3).collect();
    let total_n = t.column("total").expect("column");
    let ent_n = t.column("entangled").expect("column");
    let svg = Plot {
        title: format!("Coincidence pattern, xi = {}", cfg.xi),
        x_label: "rho2x [mm]".into(),
        y_label: "rate / peak [1]".into(),
        series: vec![
            Series {
                label: "total".into(),
                x: &x_mm,
                y: &total_n,
            },
            Series {
                label: "entangled".into(),
                x: &x_mm,
                y: &ent_n,
            },
        ],
        footer: footer(cfg),
    }
    .render();
    let summary = vec![format!(
        "fringe period {period:e} m, scan visibility {}",
        vis.map_or("undefined".into(), |v| format!("{v:e}"))
    )];
    Ok(data_output(Command::Pattern, cfg, t, Some(svg), summary))
}

fn nm_label(bw: f64) -> String {
    format!("{}nm", (bw * 1e9 * 1e6).round() / 1e6)
}

fn visibility_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let xi = cfg.xi_grid()?;
    if cfg.bandwidths.is_empty() {
        return Err(CliError::Usage(
            "bandwidths: at least one bandwidth is required".into(),
        ));
    }
    let (geom, ap, det, opts) = (
        cfg.geometry()?,
        cfg.aperture()?,
        cfg.detection()?,
        cfg.quad()?,
    );
    let labels: Vec<String> = cfg
        .bandwidths
        .iter()
        .map(|&b| format!("V_{}", nm_label(b)))
        .collect();
    let mut curves = Vec::new();
    for &bw in &cfg.bandwidths {
        let delta = cfg.delta_for(bw)?;
        let curve =
            visibility_curve(&xi, &[delta], &det, &geom, &ap, &opts).map_err(|e| match e {
                CoreError::Contract(msg) => {
                    CliError::Usage(format!("bandwidth {}: {msg}", nm_label(bw)))
                }
                other => other.into(),
            })?;
        curves.push((
            delta,
            curve.into_iter().next().expect("one curve per bandwidth"),
        ));
    }

    let mut cols: Vec<(&str, &str)> = vec![("xi", "")];
    cols.extend(labels.iter().map(|l| (l.as_str(), "")));
    let mut t = CsvTable::new(&cols);
    for (i, &x) in xi.iter().enumerate() {
        let mut row = vec![x];
        row.extend(curves.iter().map(|(_, c)| c.values[i]));
        t.push(row);
    }
    let mut summary = Vec::new();
    for ((delta, curve), &bw) in curves.iter().zip(&cfg.bandwidths) {
        let meta = |k: &str| {
            curve
                .meta
                .iter()
                .find(|(m, _)| m == k)
                .map(|(_, v)| v.clone())
                .unwrap_or_default()
        };
        let dt = delta * cfg.window_t;
        t.meta(
            &format!("delta_{}", nm_label(bw)),
            format!("{delta:e} rad/s"),
        );
        t.meta(&format!("delta_t_{}", nm_label(bw)), format!("{dt:e}"));
        let a: f64 = meta("A").parse().unwrap_or(f64::NAN);
        let b: f64 = meta("B").parse().unwrap_or(f64::NAN);
        let plateau = a / (a + 2.0 * b * dt);
        t.meta(&format!("plateau_{}", nm_label(bw)), format!("{plateau:e}"));
        summary.push(format!(
            "{}: delta*T = {dt:.4e}, plateau {plateau:.6e}",
            nm_label(bw)
        ));
    }
    let cols: Vec<Vec<f64>> = labels
        .iter()
        .map(|l| t.column(l).expect("column"))
        .collect();
    let svg = Plot {
        title: "Fringe visibility against gain".into(),
        x_label: "xi [1]".into(),
        y_label: "visibility [1]".into(),
        series: labels
            .iter()
            .zip(&cols)
            .map(|(l, y)| Series {
                label: l.clone(),
                x: &xi,
                y,
            })
            .collect(),
        footer: footer(cfg),
    }
    .render();
    Ok(data_output(Command::Visibility, cfg, t, Some(svg), summary))
}

fn singles(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = model(cfg)?;
    let n = cfg.singles_points;
    let xs = crate::config::linspace("rho", cfg.rho_min, cfg.rho_max, n)?;
    let angles = cfg.angle_grid()?;
    let opts = cfg.quad()?;
    let mut t = CsvTable::new(&[
        ("rho2x", "m"),
        ("singles_b", "arb"),
        ("accept_angle_a", "rad"),
        ("singles_a", "arb"),
    ]);
    for (&x, &angle) in xs.iter().zip(&angles) {
        let sb = ghost_opa_core::singles_rate_b((x, cfg.rho2_y), &m.src, &m.det);
        let sa = singles_rate_a(q_accept(&m.geom, angle), &m.src, &m.geom, &m.ap, &opts)?;
        t.push(vec![x, sb, angle, sa]);
    }
    let threshold = fringe_threshold(cfg.lambda_p, cfg.slit_separation);
    let visible = singles_fringe_visible(cfg.detection_angle, cfg.lambda_p, cfg.slit_separation);
    t.meta("fringe_threshold_rad", format!("{threshold:e}"));
    t.meta("detection_angle_rad", format!("{:e}", cfg.detection_angle));
    t.meta("fringe_visible", visible);
    let summary = vec![format!(
        "fringe_visible = {visible} (detection angle {:e} rad, threshold {threshold:e} rad)",
        cfg.detection_angle
    )];
    Ok(data_output(Command::Singles, cfg, t, None, summary))
}

fn mc(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = model(cfg)?;
    let settings = McSettings {
        n_points: cfg.mc_points,
        singles_rate: cfg.mc_singles_rate,
        duration: cfg.mc_duration,
        bootstrap: cfg.mc_bootstrap,
        seed: cfg.seed,
    };
    let r = mc_visibility(&m, &settings)?;
    let mut t = CsvTable::new(&[
        ("rho2x", "m"),
        ("total", "counts"),
        ("true", "counts"),
        ("accidental", "counts"),
        ("expected", "counts"),
    ]);
    for ((x, tally), e) in r.scan.abscissa.iter().zip(&r.tallies).zip(&r.expected) {
        t.push(vec![
            *x,
            tally.total_count as f64,
            tally.true_count as f64,
            tally.accidental_count as f64,
            *e,
        ]);
    }
    let sigma = if r.std_error > 0.0 {
        (r.visibility - r.analytic).abs() / r.std_error
    } else {
        f64::INFINITY
    };
    t.meta("visibility_mc", format!("{:e}", r.visibility));
    t.meta("visibility_mc_stderr", format!("{:e}", r.std_error));
    t.meta("visibility_analytic", format!("{:e}", r.analytic));
    t.meta("deviation_sigma", format!("{sigma:e}"));
    t.meta("singles_rate_hz", format!("{:e}", r.singles_rate));
    t.meta("peak_pair_rate_hz", format!("{:e}", r.peak_pair_rate));
    t.meta("jitter_sigma_s", format!("{:e}", 1.0 / m.src.delta));
    t.meta("rng", RNG_ALGORITHM);

    let x_mm: Vec<f64> = r.scan.abscissa.iter().map(|x| x * 1e3).collect();
    let svg = Plot {
        title: format!("Monte Carlo coincidences, xi = {}", cfg.xi),
        x_label: "rho2x [mm]".into(),
        y_label: "coincidences [counts]".into(),
        series: vec![
            Series {
                label: "simulated".into(),
                x: &x_mm,
                y: &r.scan.values,
            },
            Series {
                label: "expected".into(),
                x: &x_mm,
                y: &r.expected,
            },
        ],
        footer: footer(cfg),
    }
    .render();
    let summary = vec![format!(
        "V_mc = {:.6e} +- {:.2e}, V_analytic = {:.6e} ({sigma:.2} sigma)",
        r.visibility, r.std_error, r.analytic
    )];
    Ok(data_output(Command::Mc, cfg, t, Some(svg), summary))
}

/// Distance factor that moves the reference setup deep into the far field.
pub const FAR_FIELD_SCALE: f64 = 1e4;

/// Largest `||F| − |G||` over the scan, relative to the largest `|G|`, where
/// `F` is the Fresnel quadrature and `G` the closed-form far field.
pub fn propagator_deviation(
    geom: &OpticalGeometry,
    ap: &DoubleSlitAperture,
    rho_x: &[f64],
    rho_y: f64,
    opts: &QuadOptions,
) -> Result<f64, CoreError> {
    let omega = geom.signal_omega();
    let mut worst: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for &x in rho_x {
        let f = combined_propagator(omega, (x, rho_y), geom, ap, Regime::Fresnel, opts)?.norm();
        let g = combined_propagator(omega, (x, rho_y), geom, ap, Regime::Fraunhofer, opts)?.norm();
        worst = worst.max((f - g).abs());
        peak = peak.max(g);
    }
    Ok(worst / peak)
}

/// Largest `|V_scan − V_law|` over the given gains, with the scan covering
/// one fringe period.
pub fn visibility_identity_error(m: &RateModel, gains: &[f64]) -> Result<f64, CoreError> {
    let period = fringe_period(&m.geom, &m.ap);
    let xs: Vec<f64> = (0..=40).map(|i| period * (i as f64 / 40.0 - 0.5)).collect();
    let mut worst: f64 = 0.0;
    for &xi in gains {
        let mi = m.with_source(m.src.with_xi(xi)?)?;
        let scan = mi.pattern_scan(&xs)?;
        let from_scan = scan_visibility(&scan.values)
            .ok_or_else(|| CoreError::Contract("empty pattern".into()))?;
        let law = visibility(xi, mi.delta_t(), &mi.constants()?)?;
        worst = worst.max((from_scan - law).abs());
    }
    Ok(worst)
}

/// Largest `|oracle − closed form|` over `n ≤ 8`, `ξ ∈ {0.1, 0.2, 0.4}`.
pub fn p_good_oracle_error() -> Result<f64, CoreError> {
    let mut worst: f64 = 0.0;
    for n in 1..=8usize {
        for xi in [0.1, 0.2, 0.4] {
            worst = worst.max((p_good_oracle(n, xi)? - p_good_closed(n as u64, xi)?).abs());
        }
    }
    Ok(worst)
}

struct Report {
    text: String,
    failed: usize,
    passed: usize,
}

impl Report {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        let _ = writeln!(self.text, "{tag} {name}: {detail}");
    }

    fn info(&mut self, name: &str, detail: String) {
        let _ = writeln!(self.text, "INFO {name}: {detail}");
    }
}

fn check(cfg: &RunConfig) -> Result<Output, CliError> {
    let geom = cfg.geometry()?;
    let ap = cfg.aperture()?;
    let m = model(cfg)?;
    let opts = cfg.quad()?;

    let mut r = Report {
        text: String::new(),
        failed: 0,
        passed: 0,
    };
    let _ = writeln!(r.text, "tool = {TOOL}");
    let _ = writeln!(r.text, "config_sha256 = {}", cfg.hash());
    let _ = writeln!(r.text, "seed = {}", cfg.seed);

    let fine = QuadOptions::with_rel_tol(1e-9);
    let area = ap.open_area();
    let wide = ap.power_in_box(2000.0 * PI / ap.b, 2000.0 * PI / ap.slit_len, &fine)?;
    let err = (wide / area - 1.0).abs();
    r.check(
        "parseval",
        err < 1e-3,
        format!("|P/area - 1| = {err:.3e} over |qx| <= 2000pi/b, |qy| <= 2000pi/L (limit 1e-3)"),
    );
    let narrow = ap.power_in_box(40.0 * PI / ap.b, 40.0 * PI / ap.slit_len, &fine)?;
    r.info(
        "parseval_narrow_box",
        format!(
            "P/area - 1 = {:.4e} over |qx| <= 40pi/b, |qy| <= 40pi/L",
            narrow / area - 1.0
        ),
    );

    let rho: Vec<f64> = crate::config::linspace("rho", -5e-3, 5e-3, 101)?;
    let far = geom.scaled(FAR_FIELD_SCALE)?;
    let rho_far: Vec<f64> = rho.iter().map(|x| x * FAR_FIELD_SCALE).collect();
    let dev_far = propagator_deviation(&far, &ap, &rho_far, 0.0, &opts)?;
    r.check(
        "fraunhofer_vs_quadrature",
        dev_far < 1e-2,
        format!(
            "max||F| - |G||/max|G| = {dev_far:.3e} with distances and |rho2x| <= 5 mm scaled by {FAR_FIELD_SCALE:e} (limit 1e-2)"
        ),
    );
    let dev_near = propagator_deviation(&geom, &ap, &rho, 0.0, &opts)?;
    r.info(
        "fraunhofer_vs_quadrature_configured",
        format!("max||F| - |G||/max|G| = {dev_near:.3e} over |rho2x| <= 5 mm at the configured distances"),
    );

    let vis_err = visibility_identity_error(&m, &[0.05, 0.5, 2.0])?;
    r.check(
        "visibility_identity",
        vis_err < 1e-9,
        format!("max |V_scan - V_law| = {vis_err:.3e} for xi in {{0.05, 0.5, 2}} (limit 1e-9)"),
    );

    let pg_err = p_good_oracle_error()?;
    r.check(
        "p_good_oracle",
        pg_err <= 1e-12,
        format!("max |oracle - closed form| = {pg_err:.3e} for n <= 8, xi in {{0.1, 0.2, 0.4}} (limit 1e-12)"),
    );
    let limit = p_good_closed(1_000_000, 0.4)? - 0.5;
    r.info(
        "p_good_large_n",
        format!("P(good | n = 1e6, xi = 0.4) - 1/2 = {limit:.4e}"),
    );

    let threshold = fringe_threshold(cfg.lambda_p, cfg.slit_separation);
    r.info(
        "singles_fringe_visible",
        format!(
            "{} at detection angle {:e} rad (threshold {threshold:.4e} rad)",
            singles_fringe_visible(cfg.detection_angle, cfg.lambda_p, cfg.slit_separation),
            cfg.detection_angle
        ),
    );
    let _ = writeln!(r.text, "summary: {} passed, {} failed", r.passed, r.failed);

    Ok(Output {
        summary: vec![format!("{} passed, {} failed", r.passed, r.failed)],
        text: r.text,
        table: None,
        svg: None,
        failed_checks: r.failed,
    })
}
