//! Scenario execution: turns a validated [`ScenarioConfig`] into a
//! deterministic payload (CSV or JSON), optionally written to disk, plus a
//! [`RunRecord`] describing the run.

use crate::config::{Format, Mode, ScenarioConfig};
use crate::emit::{csv, fmt_float, Json};
use crate::geometry::{
    codazzi_residual, gauss_residual, nanson_residual, projector, second_fundamental_form,
    surface_jacobian, surface_jacobian_referential, GeometryError, MetricField3,
};
use crate::sphere::{
    pressure_sweep, relax, solve_stretch, stress_profile, CavitySolution, NondimensionalProblem,
    SolverError, SweepRow,
};
use crate::tensor::{Metric3, TwoPointMap3};
use std::fmt;
use std::time::Instant;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum RunError {
    Config(crate::config::ConfigError),
    Solver(SolverError),
    Geometry(GeometryError),
    Io(std::io::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error: {e}"),
            RunError::Solver(e) => write!(f, "solver error: {e}"),
            RunError::Geometry(e) => write!(f, "geometry error: {e}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl RunError {
    /// Process exit code: 2 config, 3 solver, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Solver(_) | RunError::Geometry(_) => 3,
            RunError::Io(_) => 4,
        }
    }
}

impl From<SolverError> for RunError {
    fn from(e: SolverError) -> Self {
        RunError::Solver(e)
    }
}

impl From<GeometryError> for RunError {
    fn from(e: GeometryError) -> Self {
        RunError::Geometry(e)
    }
}

/// Metadata and payload of a completed run. Re-running an identical config
/// byte-reproduces `payload`; `wall_ms` is diagnostic only.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config_echo: String,
    pub version: &'static str,
    pub solver_tol: f64,
    pub scan_points: usize,
    pub bracket: (f64, f64),
    pub wall_ms: f64,
    pub warnings: Vec<String>,
    pub out_path: Option<String>,
    pub payload: String,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        Json::Obj(vec![
            ("version", Json::Str(self.version.into())),
            ("config", Json::Str(self.config_echo.clone())),
            ("bracket_lo", Json::Num(self.bracket.0)),
            ("bracket_hi", Json::Num(self.bracket.1)),
            ("scan", Json::Int(self.scan_points as i64)),
            ("tol", Json::Num(self.solver_tol)),
            ("wall_ms", Json::Num(self.wall_ms)),
            (
                "warnings",
                Json::Arr(self.warnings.iter().map(|w| Json::Str(w.clone())).collect()),
            ),
            (
                "out_path",
                self.out_path.clone().map(Json::Str).unwrap_or(Json::Null),
            ),
            ("payload_bytes", Json::Int(self.payload.len() as i64)),
        ])
        .render()
    }
}

const SWEEP_HEADER: [&str; 8] =
    ["p_hat_o", "x", "lambda_o", "strain", "gamma0_over_mu_Ri", "e_c", "p_f_over_mu", "residual"];

fn sweep_row_cells(row: &SweepRow) -> Vec<String> {
    vec![
        fmt_float(row.p_hat_o),
        fmt_float(row.x),
        fmt_float(row.lambda_o),
        fmt_float(row.strain),
        fmt_float(row.gamma0_over_mu_ri),
        fmt_float(row.e_c),
        row.p_f_over_mu.map(fmt_float).unwrap_or_default(),
        fmt_float(row.residual),
    ]
}

fn sweep_row_json(row: &SweepRow) -> Json {
    Json::Obj(vec![
        ("p_hat_o", Json::Num(row.p_hat_o)),
        ("x", Json::Num(row.x)),
        ("lambda_o", Json::Num(row.lambda_o)),
        ("strain", Json::Num(row.strain)),
        ("gamma0_over_mu_Ri", Json::Num(row.gamma0_over_mu_ri)),
        ("e_c", Json::Num(row.e_c)),
        ("p_f_over_mu", row.p_f_over_mu.map(Json::Num).unwrap_or(Json::Null)),
        ("residual", Json::Num(row.residual)),
    ])
}

fn solution_json(mode: Mode, p_hat_o: f64, sol: &CavitySolution, strain: f64, nd: &NondimensionalProblem) -> Json {
    Json::Obj(vec![
        ("mode", Json::Str(mode.as_str().into())),
        ("p_hat_o", Json::Num(p_hat_o)),
        ("x", Json::Num(sol.x)),
        ("lambda_o", Json::Num(sol.lambda_o)),
        ("strain", Json::Num(strain)),
        ("residual", Json::Num(sol.residual)),
        ("gamma0_over_mu_Ri", Json::Num(sol.gamma0_over_mu_ri)),
        ("e_c", Json::Num(sol.e_c)),
        ("e_c_initial", Json::Num(sol.e_c_initial)),
        ("sigma_i_over_mu", Json::Num(sol.sigma_i_over_mu)),
        ("j0", sol.j0.map(Json::Num).unwrap_or(Json::Null)),
        ("p_f_over_mu", sol.p_f_over_mu.map(Json::Num).unwrap_or(Json::Null)),
        (
            "laplace_residual",
            Json::Num(sol.generalized_laplace_residual(nd)),
        ),
        (
            "all_roots",
            Json::Arr(sol.all_roots.iter().map(|&r| Json::Num(r)).collect()),
        ),
    ])
}

fn solution_row(p_hat_o: f64, sol: &CavitySolution, strain: f64) -> SweepRow {
    SweepRow {
        p_hat_o,
        x: sol.x,
        lambda_o: sol.lambda_o,
        strain,
        gamma0_over_mu_ri: sol.gamma0_over_mu_ri,
        e_c: sol.e_c,
        p_f_over_mu: sol.p_f_over_mu,
        residual: sol.residual,
    }
}

/// One row of the geometry diagnostic table.
pub struct GeometryCheckRow {
    pub fixture: &'static str,
    pub quantity: &'static str,
    pub residual: f64,
    pub threshold: f64,
}

/// Gauss, Codazzi, curvature, area-map, and projection diagnostics over the
/// built-in sphere and cylinder fixtures.
pub fn geometry_check_rows() -> Result<Vec<GeometryCheckRow>, GeometryError> {
    let h = 1e-4;
    let mut rows = Vec::new();
    let sphere = MetricField3::sphere_adapted();
    let p_s = [1.0, 0.7, 1.0];
    rows.push(GeometryCheckRow {
        fixture: "sphere",
        quantity: "gauss",
        residual: gauss_residual(&sphere, &p_s, h)?,
        threshold: 1e-6,
    });
    let (c1, c2) = codazzi_residual(&sphere, &p_s, h)?;
    rows.push(GeometryCheckRow { fixture: "sphere", quantity: "codazzi_1", residual: c1, threshold: 1e-6 });
    rows.push(GeometryCheckRow { fixture: "sphere", quantity: "codazzi_2", residual: c2, threshold: 1e-6 });
    // second fundamental form against the analytic diag(r, r sin^2)
    let k = second_fundamental_form(&sphere, &p_s, 1e-6)?;
    let s2 = p_s[0].sin() * p_s[0].sin();
    let k_err = (k.get(0, 0) - p_s[2])
        .abs()
        .max((k.get(1, 1) - p_s[2] * s2).abs())
        .max(k.get(0, 1).abs());
    rows.push(GeometryCheckRow {
        fixture: "sphere",
        quantity: "second_fundamental_form",
        residual: k_err,
        threshold: 1e-10,
    });
    let cyl = MetricField3::cylinder_adapted();
    let p_c = [0.9, 0.3, 1.3];
    rows.push(GeometryCheckRow {
        fixture: "cylinder",
        quantity: "gauss",
        residual: gauss_residual(&cyl, &p_c, h)?,
        threshold: 1e-6,
    });
    let (c1, c2) = codazzi_residual(&cyl, &p_c, h)?;
    rows.push(GeometryCheckRow { fixture: "cylinder", quantity: "codazzi_1", residual: c1, threshold: 1e-6 });
    rows.push(GeometryCheckRow { fixture: "cylinder", quantity: "codazzi_2", residual: c2, threshold: 1e-6 });
    // area-map identities on an eigenstrained radial interface
    let om = 0.15f64;
    let g_ref = Metric3::from_diag([
        (2.0 * om).exp(),
        (2.0 * om).exp() * 1.21,
        (2.0 * om).exp() * 1.21 * 0.7,
    ])
    .map_err(GeometryError::Tensor)?;
    let g_cur = Metric3::from_diag([1.0, 1.44, 1.44 * 0.7]).map_err(GeometryError::Tensor)?;
    let f = TwoPointMap3::from_diag([1.1, 1.0, 1.0]);
    let n = [(-om).exp(), 0.0, 0.0];
    rows.push(GeometryCheckRow {
        fixture: "radial-interface",
        quantity: "nanson",
        residual: nanson_residual(&f, &n, &g_ref, &g_cur)?,
        threshold: 1e-12,
    });
    let ja = surface_jacobian(&f, &n, &g_ref, &g_cur)?;
    let jb = surface_jacobian_referential(&f, &n, &g_ref, &g_cur)?;
    rows.push(GeometryCheckRow {
        fixture: "radial-interface",
        quantity: "surface_jacobian_routes",
        residual: ja - jb,
        threshold: 1e-12,
    });
    let pi = projector(&n, &g_ref)?;
    let pi2 = crate::tensor::mul3(&pi, &pi);
    let mut idem = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            idem = idem.max((pi2[a][b] - pi[a][b]).abs());
        }
    }
    rows.push(GeometryCheckRow {
        fixture: "radial-interface",
        quantity: "projector_idempotency",
        residual: idem,
        threshold: 1e-13,
    });
    Ok(rows)
}

fn geometry_payload(format: Format) -> Result<String, GeometryError> {
    let rows = geometry_check_rows()?;
    Ok(match format {
        Format::Csv => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.fixture.to_string(),
                        r.quantity.to_string(),
                        fmt_float(r.residual),
                        fmt_float(r.threshold),
                        (r.residual.abs() <= r.threshold).to_string(),
                    ]
                })
                .collect();
            csv(&["fixture", "quantity", "residual", "threshold", "pass"], &cells)
        }
        Format::Json => Json::Arr(
            rows.iter()
                .map(|r| {
                    Json::Obj(vec![
                        ("fixture", Json::Str(r.fixture.into())),
                        ("quantity", Json::Str(r.quantity.into())),
                        ("residual", Json::Num(r.residual)),
                        ("threshold", Json::Num(r.threshold)),
                        ("pass", Json::Bool(r.residual.abs() <= r.threshold)),
                    ])
                })
                .collect::<Vec<_>>(),
        )
        .render()
            + "\n",
    })
}

/// Executes a scenario and returns the run record; writes the payload to
/// `config.out_path` when set.
pub fn run(cfg: &ScenarioConfig) -> Result<RunRecord, RunError> {
    let start = Instant::now();
    let format = cfg.effective_format();
    let mut warnings = Vec::new();
    let payload = match cfg.mode {
        Mode::GeometryCheck => geometry_payload(format)?,
        mode => {
            let nd = cfg.nondimensional()?;
            if let Some(w) = nd.thin_shell_warning() {
                warnings.push(w);
            }
            match mode {
                Mode::Relax => {
                    let sol = relax(&nd, &cfg.solver)?;
                    match format {
                        Format::Json => {
                            solution_json(mode, 0.0, &sol, 0.0, &nd).render() + "\n"
                        }
                        Format::Csv => csv(
                            &SWEEP_HEADER,
                            &[sweep_row_cells(&solution_row(0.0, &sol, 0.0))],
                        ),
                    }
                }
                Mode::Solve => {
                    let relaxed = relax(&nd, &cfg.solver)?;
                    let sol = solve_stretch(&nd, &cfg.solver)?;
                    let strain = sol.lambda_o - relaxed.lambda_o;
                    match format {
                        Format::Json => {
                            solution_json(mode, nd.p_hat_o, &sol, strain, &nd).render() + "\n"
                        }
                        Format::Csv => csv(
                            &SWEEP_HEADER,
                            &[sweep_row_cells(&solution_row(nd.p_hat_o, &sol, strain))],
                        ),
                    }
                }
                Mode::Sweep => {
                    let spec = cfg.sweep.as_ref().ok_or_else(|| {
                        RunError::Config(crate::config::ConfigError::MissingKey {
                            path: "sweep.from".into(),
                        })
                    })?;
                    if spec.count < 2 {
                        return Err(RunError::Config(crate::config::ConfigError::SweepCount {
                            count: spec.count,
                        }));
                    }
                    let rows = pressure_sweep(&nd, &spec.grid(), &cfg.solver)?;
                    match format {
                        Format::Csv => {
                            let cells: Vec<Vec<String>> =
                                rows.iter().map(sweep_row_cells).collect();
                            csv(&SWEEP_HEADER, &cells)
                        }
                        Format::Json => {
                            Json::Arr(rows.iter().map(sweep_row_json).collect()).render() + "\n"
                        }
                    }
                }
                Mode::StressProfile => {
                    let prof = stress_profile(&nd, nd.p_hat_o, cfg.profile_samples, &cfg.solver)?;
                    match format {
                        Format::Csv => {
                            let cells: Vec<Vec<String>> = prof
                                .samples
                                .iter()
                                .map(|s| {
                                    vec![
                                        fmt_float(s.r_over_ri),
                                        fmt_float(s.sigma_rr),
                                        fmt_float(s.sigma_hoop),
                                        fmt_float(s.pressure),
                                    ]
                                })
                                .collect();
                            csv(
                                &["R_over_Ri", "sigma_rr_over_mu", "sigma_hoop_over_mu", "p_over_mu"],
                                &cells,
                            )
                        }
                        Format::Json => {
                            Json::Obj(vec![
                                ("p_hat_o", Json::Num(prof.p_hat_o)),
                                ("x", Json::Num(prof.x)),
                                (
                                    "samples",
                                    Json::Arr(
                                        prof.samples
                                            .iter()
                                            .map(|s| {
                                                Json::Obj(vec![
                                                    ("R_over_Ri", Json::Num(s.r_over_ri)),
                                                    ("sigma_rr_over_mu", Json::Num(s.sigma_rr)),
                                                    ("sigma_hoop_over_mu", Json::Num(s.sigma_hoop)),
                                                    ("p_over_mu", Json::Num(s.pressure)),
                                                ])
                                            })
                                            .collect(),
                                    ),
                                ),
                            ])
                            .render()
                                + "\n"
                        }
                    }
                }
                Mode::GeometryCheck => unreachable!("handled above"),
            }
        }
    };
    if let Some(path) = &cfg.out_path {
        std::fs::write(path, &payload).map_err(RunError::Io)?;
    }
    Ok(RunRecord {
        config_echo: cfg.echo(),
        version: VERSION,
        solver_tol: cfg.solver.tol,
        scan_points: cfg.solver.scan_points,
        bracket: cfg.solver.bracket,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        warnings,
        out_path: cfg.out_path.clone(),
        payload,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    const RELAX_CFG: &str = "\
[problem]
omega_s = 0.2

[problem.nondimensional]
alpha = 3.0
xi = 1.0
eta = 2.0
";

    #[test]
    fn relax_json_payload() {
        let cfg = parse_config(RELAX_CFG).unwrap();
        let rec = run(&cfg).unwrap();
        assert!(rec.payload.starts_with("{\"mode\":\"relax\""));
        assert!(rec.payload.contains("\"x\":8.497312047588"));
        assert!(rec.payload.contains("\"j0\":null"));
    }

    #[test]
    fn trivial_relax_payload_reports_unit_stretch() {
        let cfg = parse_config(
            "[problem.nondimensional]\nalpha = 3.0\n",
        )
        .unwrap();
        let rec = run(&cfg).unwrap();
        assert!(rec.payload.contains("\"x\":1.0000000000"), "{}", rec.payload);
    }

    #[test]
    fn sweep_csv_header_and_rows() {
        let text = format!(
            "mode = \"sweep\"\n{RELAX_CFG}\n[sweep]\nfrom = 0.0\nto = 0.3\ncount = 4\n"
        );
        let cfg = parse_config(&text).unwrap();
        let rec = run(&cfg).unwrap();
        let mut lines = rec.payload.lines();
        assert_eq!(
            lines.next().unwrap(),
            "p_hat_o,x,lambda_o,strain,gamma0_over_mu_Ri,e_c,p_f_over_mu,residual"
        );
        assert_eq!(rec.payload.lines().count(), 5);
        // dry runs leave the fluid column empty
        let first = lines.next().unwrap();
        let cells: Vec<&str> = first.split(',').collect();
        assert_eq!(cells[6], "");
        // the p=0 row has exactly zero strain
        assert_eq!(cells[3], fmt_float(0.0));
    }

    #[test]
    fn runs_are_deterministic() {
        let text = format!(
            "mode = \"sweep\"\n{RELAX_CFG}\n[sweep]\nfrom = 0.0\nto = 0.5\ncount = 11\n"
        );
        let cfg = parse_config(&text).unwrap();
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.payload, b.payload);
    }

    #[test]
    fn geometry_check_all_pass() {
        let rows = geometry_check_rows().unwrap();
        assert!(rows.len() >= 10);
        for r in &rows {
            assert!(
                r.residual.abs() <= r.threshold,
                "{} {} residual {:e} over {:e}",
                r.fixture,
                r.quantity,
                r.residual,
                r.threshold
            );
        }
        let payload = geometry_payload(Format::Csv).unwrap();
        assert!(payload.starts_with("fixture,quantity,residual,threshold,pass"));
        assert!(!payload.contains("false"));
    }

    #[test]
    fn stress_profile_payload() {
        let text = format!("mode = \"stress-profile\"\n{RELAX_CFG}");
        let mut cfg = parse_config(&text).unwrap();
        cfg.profile_samples = 11;
        let rec = run(&cfg).unwrap();
        assert_eq!(rec.payload.lines().count(), 12);
        let last = rec.payload.lines().last().unwrap();
        let cells: Vec<&str> = last.split(',').collect();
        assert_eq!(cells[1], fmt_float(0.0)); // sigma_rr(R_o) = -p_o = 0 exactly
    }

    #[test]
    fn unwritable_output_path_is_io_error() {
        let mut cfg = parse_config(RELAX_CFG).unwrap();
        cfg.out_path = Some("/nonexistent-dir/out.json".into());
        match run(&cfg) {
            Err(RunError::Io(_)) => {}
            other => panic!("expected io error, got {other:?}"),
        }
    }

    #[test]
    fn record_json_shape() {
        let cfg = parse_config(RELAX_CFG).unwrap();
        let rec = run(&cfg).unwrap();
        let json = rec.to_json();
        assert!(json.contains("\"version\""));
        assert!(json.contains("\"scan\":4000"));
    }

    #[test]
    fn thin_shell_warning_reaches_record() {
        let cfg = parse_config(
            "[problem.nondimensional]\nalpha = 1.005\n",
        )
        .unwrap();
        let rec = run(&cfg).unwrap();
        assert_eq!(rec.warnings.len(), 1);
        assert!(rec.warnings[0].contains("close to 1"));
    }

    #[test]
    fn wet_sweep_populates_fluid_column() {
        let text = "\
mode = \"sweep\"
[problem]
wet = true
omega_l = 0.05
[problem.nondimensional]
alpha = 3.0
eta_f = 20.0
[sweep]
from = 0.0
to = 0.2
count = 3
";
        let cfg = parse_config(text).unwrap();
        let rec = run(&cfg).unwrap();
        for line in rec.payload.lines().skip(1) {
            let cells: Vec<&str> = line.split(',').collect();
            let p_f: f64 = cells[6].parse().expect("fluid column must be numeric for wet runs");
            let j0_from_x: f64 = cells[1].parse::<f64>().unwrap().powi(3) * (-0.15f64).exp();
            assert!((p_f - 20.0 * (j0_from_x - 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn config_echo_reproduces_payload() {
        // the echo alone carries enough state to replay the run byte-for-byte
        let text = format!("mode = \"stress-profile\"\nprofile_samples = 17\n{RELAX_CFG}");
        let cfg = parse_config(&text).unwrap();
        let rec = run(&cfg).unwrap();
        let replay_cfg = parse_config(&rec.config_echo).unwrap();
        let replay = run(&replay_cfg).unwrap();
        assert_eq!(rec.payload, replay.payload);
        assert_eq!(replay_cfg.profile_samples, 17);
    }

    #[test]
    fn sweep_strain_column_is_monotone() {
        // stiffening scenario: the emitted strain column decreases with load
        let text = "\
mode = \"sweep\"
[problem]
omega_s = 0.1
[problem.nondimensional]
alpha = 1.5
xi = 0.1
eta = 0.2
[sweep]
from = 0.0
to = 0.6
count = 13
";
        let cfg = parse_config(text).unwrap();
        let rec = run(&cfg).unwrap();
        let strains: Vec<f64> = rec
            .payload
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
            .collect();
        assert_eq!(strains[0], 0.0);
        assert!(strains.windows(2).all(|w| w[1] < w[0]));
    }
}
