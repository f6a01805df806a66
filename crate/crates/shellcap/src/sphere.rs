//! Radial boundary-value problem for an incompressible isotropic spherical
//! shell enclosing a dry or fluid-filled cavity bounded by an eigenstrained
//! elastic surface.
//!
//! The shell occupies `R_i <= R <= R_o` in the reference configuration and
//! deforms radially with `r(R) = (R^3 + r_i^3 - R_i^3)^(1/3)`; the fluid (if
//! present) fills the cavity homogeneously. The single unknown is the
//! interface stretch `x = r_i / R_i`, fixed by the normal equilibrium at the
//! interface: bulk traction jump balanced against the surface stress
//! contracted with the curvature, with eigenstrain factors (a generalized
//! Laplace law). Everything downstream of the root - radii, residual-stress
//! profiles, pressure-stretch sweeps, elasto-capillary numbers - is in
//! closed form.
//!
//! The solver works in nondimensional variables: lengths in `R_i`, stresses
//! in the shell shear modulus `mu`. The shell is neo-Hookean; the general
//! `(W1, W2)` material enters through the quadrature stress route.
//!
//! Solves, sweeps, and profiles are pure; sweep grid points are independent
//! solves and rows always follow the input grid order.

use crate::quadrature;
use crate::roots::{self, RootError};
use std::fmt;

#[derive(Debug, Clone)]
pub enum SolverError {
    /// Objective has no sign change in the scanned bracket; carries the scan
    /// table for diagnosis.
    Bracketing { lo: f64, hi: f64, table: Vec<(f64, f64)> },
    /// Argument outside the admissible range of a kinematic map.
    Domain { what: String },
    /// Problem parameters violate their invariants.
    InvalidProblem { what: String },
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Bracketing { lo, hi, table } => write!(
                f,
                "equilibrium residual has no sign change in [{lo}, {hi}] ({} scan points)",
                table.len()
            ),
            SolverError::Domain { what } => write!(f, "domain error: {what}"),
            SolverError::InvalidProblem { what } => write!(f, "invalid problem: {what}"),
        }
    }
}

impl std::error::Error for SolverError {}

impl From<RootError> for SolverError {
    fn from(e: RootError) -> Self {
        match e {
            RootError::NoSignChange { lo, hi, table } => SolverError::Bracketing { lo, hi, table },
            RootError::BadBracket { lo, hi, points } => SolverError::InvalidProblem {
                what: format!("bad root bracket [{lo}, {hi}] with {points} points"),
            },
        }
    }
}

/// Dimensional parameter set of the shell/cavity problem.
#[derive(Debug, Clone, Copy)]
pub struct SphereProblem {
    /// Reference cavity radius (length).
    pub r_i: f64,
    /// Reference outer radius (length).
    pub r_o: f64,
    /// Shell shear modulus (stress).
    pub mu: f64,
    /// Surface shear modulus (stress * length).
    pub mu_s: f64,
    /// Surface bulk modulus (stress * length).
    pub kappa_s: f64,
    /// Fluid bulk modulus (stress); ignored when dry.
    pub kappa_f: f64,
    /// Surface dilatational eigenstrain (>= 0).
    pub omega_s: f64,
    /// Fluid dilatational eigenstrain (>= 0).
    pub omega_l: f64,
    /// Applied outer pressure (stress).
    pub p_o: f64,
    /// Fluid present in the cavity.
    pub wet: bool,
}

impl SphereProblem {
    pub fn nondimensionalize(&self) -> Result<NondimensionalProblem, SolverError> {
        if !(self.r_i > 0.0) || !(self.r_o > self.r_i) {
            return Err(SolverError::InvalidProblem {
                what: format!("need R_o > R_i > 0, got R_i = {}, R_o = {}", self.r_i, self.r_o),
            });
        }
        if !(self.mu > 0.0) {
            return Err(SolverError::InvalidProblem {
                what: format!("shear modulus mu = {} must be positive", self.mu),
            });
        }
        let nd = NondimensionalProblem {
            alpha: self.r_o / self.r_i,
            xi: self.mu_s / (self.r_i * self.mu),
            eta: self.kappa_s / (self.r_i * self.mu),
            eta_f: self.kappa_f / self.mu,
            p_hat_o: self.p_o / self.mu,
            omega_s: self.omega_s,
            omega_l: self.omega_l,
            wet: self.wet,
        };
        nd.validate()?;
        Ok(nd)
    }
}

/// Nondimensional image of [`SphereProblem`]: `alpha = R_o/R_i`,
/// `xi = mu_s/(R_i mu)`, `eta = kappa_s/(R_i mu)`, `eta_f = kappa_f/mu`,
/// `p_hat_o = p_o/mu`.
#[derive(Debug, Clone, Copy)]
pub struct NondimensionalProblem {
    pub alpha: f64,
    pub xi: f64,
    pub eta: f64,
    pub eta_f: f64,
    pub p_hat_o: f64,
    pub omega_s: f64,
    pub omega_l: f64,
    pub wet: bool,
}

impl NondimensionalProblem {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.alpha >= 1.0 + 1e-6) {
            return Err(SolverError::InvalidProblem {
                what: format!("alpha = {} must be at least 1 + 1e-6", self.alpha),
            });
        }
        for (name, v) in [
            ("xi", self.xi),
            ("eta", self.eta),
            ("eta_f", self.eta_f),
            ("omega_s", self.omega_s),
            ("omega_l", self.omega_l),
        ] {
            if !(v >= 0.0) {
                return Err(SolverError::InvalidProblem {
                    what: format!("{name} = {v} must be non-negative"),
                });
            }
        }
        if !self.p_hat_o.is_finite() {
            return Err(SolverError::InvalidProblem {
                what: format!("p_hat_o = {} must be finite", self.p_hat_o),
            });
        }
        Ok(())
    }

    /// Thin shells approach a cancellation-prone regime; callers may want to
    /// surface this to the user.
    pub fn thin_shell_warning(&self) -> Option<String> {
        (self.alpha < 1.01).then(|| {
            format!("alpha = {} is close to 1; expect cancellation in the shell terms", self.alpha)
        })
    }
}

/// Root-finding configuration: pre-scan bracket and density, residual
/// tolerance.
#[derive(Debug, Clone, Copy)]
pub struct SolverSettings {
    pub bracket: (f64, f64),
    pub scan_points: usize,
    pub tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { bracket: (0.2, 5.0), scan_points: 4000, tol: 1e-12 }
    }
}

/// Solved interface state. All stresses are per shell shear modulus, the
/// surface tension per `mu * R_i`.
#[derive(Debug, Clone)]
pub struct CavitySolution {
    /// Interface stretch `r_i / R_i`.
    pub x: f64,
    /// Outer stretch `r_o / R_o`.
    pub lambda_o: f64,
    /// Equilibrium residual at `x`.
    pub residual: f64,
    /// Surface tension `gamma_0 / (mu R_i)` at the solved stretch.
    pub gamma0_over_mu_ri: f64,
    /// Elasto-capillary number at the solved stretch.
    pub e_c: f64,
    /// Initial elasto-capillary number (at `x = 1`).
    pub e_c_initial: f64,
    /// Radial stress on the shell side of the interface, `sigma_i / mu`.
    pub sigma_i_over_mu: f64,
    /// Fluid volumetric ratio (wet only).
    pub j0: Option<f64>,
    /// Fluid pressure `p_f / mu` (wet only).
    pub p_f_over_mu: Option<f64>,
    /// Every root found in the scanned bracket, ascending.
    pub all_roots: Vec<f64>,
}

impl CavitySolution {
    /// Reassembles the interface balance from the solution's parts:
    /// `sigma_i - exp(-4 w_l) p_f - exp(2 w_s) 2 gamma_0 / r_i`; vanishes at
    /// equilibrium.
    pub fn generalized_laplace_residual(&self, nd: &NondimensionalProblem) -> f64 {
        let p_f = self.p_f_over_mu.unwrap_or(0.0);
        self.sigma_i_over_mu
            - (-4.0 * nd.omega_l).exp() * p_f
            - (2.0 * nd.omega_s).exp() * 2.0 * self.gamma0_over_mu_ri / self.x
    }
}

/// One row of a pressure sweep; strains are measured from the relaxed state.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub p_hat_o: f64,
    pub x: f64,
    pub lambda_o: f64,
    pub strain: f64,
    pub gamma0_over_mu_ri: f64,
    pub e_c: f64,
    pub p_f_over_mu: Option<f64>,
    pub residual: f64,
}

/// Radial stress profile through the shell at a solved state.
#[derive(Debug, Clone)]
pub struct StressProfile {
    pub p_hat_o: f64,
    pub x: f64,
    pub samples: Vec<StressSample>,
}

#[derive(Debug, Clone, Copy)]
pub struct StressSample {
    pub r_over_ri: f64,
    /// `sigma^rr / mu`
    pub sigma_rr: f64,
    /// physical hoop stress `/ mu`
    pub sigma_hoop: f64,
    /// Lagrange multiplier field `p / mu`
    pub pressure: f64,
}

fn cbrt4(y: f64) -> f64 {
    let c = y.cbrt();
    (c * c) * (c * c)
}

// ---------------------------------------------------------------------------
// kinematics
// ---------------------------------------------------------------------------

/// Isochoric radial map of the shell, `r(R) = (R^3 + r_i^3 - R_i^3)^(1/3)`.
pub fn shell_map(r_ref: f64, r_i: f64, r_i_ref: f64) -> Result<f64, SolverError> {
    let arg = r_ref * r_ref * r_ref + r_i * r_i * r_i - r_i_ref * r_i_ref * r_i_ref;
    if arg <= 0.0 {
        return Err(SolverError::Domain {
            what: format!("shell map undefined: R^3 + r_i^3 - R_i^3 = {arg} <= 0"),
        });
    }
    Ok(arg.cbrt())
}

/// Homogeneous map of the fluid inclusion, `r(R) = (r_i / R_i) R`.
pub fn fluid_map(r_ref: f64, x: f64) -> f64 {
    x * r_ref
}

/// Volumetric state of the fluid inclusion at interface stretch `x`:
/// `J0 = x^3 exp(-3 w_l)` and `p_f = kappa_f (J0 - 1)`.
pub fn fluid_state(x: f64, omega_l: f64, kappa_f: f64) -> (f64, f64) {
    let j0 = x * x * x * (-3.0 * omega_l).exp();
    (j0, kappa_f * (j0 - 1.0))
}

// ---------------------------------------------------------------------------
// radial stress
// ---------------------------------------------------------------------------

/// Integrand of the radial equilibrium ODE,
/// `f(R) = 4 (r^6 - R^6) / r^5 * (W1 / r^2 + W2 / R^2)`, with `W1`, `W2`
/// evaluated at `R`. Lengths in units of `R_i`.
pub fn integrand_f(r_ref: f64, x: f64, w1: f64, w2: f64) -> Result<f64, SolverError> {
    let r = shell_map(r_ref, x, 1.0)?;
    let r2 = r * r;
    let r6 = r2 * r2 * r2;
    let rr2 = r_ref * r_ref;
    let rr6 = rr2 * rr2 * rr2;
    Ok(4.0 * (r6 - rr6) / (r6 / r) * (w1 / r2 + w2 / rr2))
}

fn stress_kernel(r_ref: f64, x: f64) -> f64 {
    // R (5 R^3 + 4 x^3 - 4) / (2 (R^3 + x^3 - 1)^(4/3)); antiderivative
    // combination for the neo-Hookean shell, mu = 1, R_i = 1
    let r3 = r_ref * r_ref * r_ref;
    let x3 = x * x * x;
    r_ref * (5.0 * r3 + 4.0 * x3 - 4.0) / (2.0 * cbrt4(r3 + x3 - 1.0))
}

/// Radial Cauchy stress `sigma^rr(R) / mu` of the neo-Hookean shell in
/// closed form. Satisfies `sigma^rr(R_o) = -p_hat_o` exactly (the kernel
/// difference vanishes identically at the outer radius). Lengths in `R_i`.
pub fn radial_stress_closed_form(r_ref: f64, x: f64, alpha: f64, p_hat_o: f64) -> f64 {
    // kernel difference first: at R = alpha it cancels exactly, giving the
    // outer boundary condition bit-for-bit
    -p_hat_o + (stress_kernel(r_ref, x) - stress_kernel(alpha, x))
}

/// Radial Cauchy stress by adaptive quadrature of the equilibrium ODE,
/// `sigma^rr(R) = -p_hat_o - int_R^alpha f`; the general-material route,
/// with `W1(R)`, `W2(R)` supplied pointwise (per shear modulus).
pub fn radial_stress_quadrature(
    r_ref: f64,
    x: f64,
    alpha: f64,
    p_hat_o: f64,
    w1: &dyn Fn(f64) -> f64,
    w2: &dyn Fn(f64) -> f64,
    tol: f64,
) -> Result<f64, SolverError> {
    // validate the whole span once
    shell_map(r_ref.min(1.0), x, 1.0)?;
    let integral = quadrature::integrate(
        &|s: f64| {
            integrand_f(s, x, w1(s), w2(s)).unwrap_or(f64::NAN)
        },
        r_ref,
        alpha,
        tol,
    );
    if !integral.is_finite() {
        return Err(SolverError::Domain {
            what: format!("radial stress integrand not finite on [{r_ref}, {alpha}]"),
        });
    }
    Ok(-p_hat_o - integral)
}

/// Physical hoop stress from the radial stress:
/// `sigma^theta_phys = sigma^rr + 2 W1 (r^2/R^2 - R^4/r^4) + 2 W2 (r^4/R^4 - R^2/r^2)`.
pub fn hoop_stress(r_ref: f64, x: f64, w1: f64, w2: f64, sigma_rr: f64) -> Result<f64, SolverError> {
    let r = shell_map(r_ref, x, 1.0)?;
    let q = (r / r_ref) * (r / r_ref);
    Ok(sigma_rr + 2.0 * w1 * (q - 1.0 / (q * q)) + 2.0 * w2 * (q * q - 1.0 / q))
}

/// Lagrange multiplier field recovered from the radial stress:
/// `p = -sigma^rr + 2 W1 R^4/r^4 - 2 W2 r^4/R^4`.
pub fn pressure_field(r_ref: f64, x: f64, w1: f64, w2: f64, sigma_rr: f64) -> Result<f64, SolverError> {
    let r = shell_map(r_ref, x, 1.0)?;
    let q = (r / r_ref) * (r / r_ref);
    Ok(-sigma_rr + 2.0 * w1 / (q * q) - 2.0 * w2 * q * q)
}

// ---------------------------------------------------------------------------
// surface quantities
// ---------------------------------------------------------------------------

/// Deformation-dependent surface tension of the neo-Hookean surface,
/// `gamma_0 = (-1 + x^2 e^{2w}) kappa_s + (1 - x^-2 e^{-2w}) mu_s`.
pub fn surface_tension(x: f64, omega_s: f64, mu_s: f64, kappa_s: f64) -> f64 {
    let e2 = (2.0 * omega_s).exp();
    (-1.0 + x * x * e2) * kappa_s + (1.0 - 1.0 / (x * x * e2)) * mu_s
}

/// Elasto-capillary function `e_c = gamma_0 / (2 R_i mu)` in nondimensional
/// moduli.
pub fn elasto_capillary(x: f64, omega_s: f64, xi: f64, eta: f64) -> f64 {
    0.5 * surface_tension(x, omega_s, xi, eta)
}

/// Initial elasto-capillary number, the elasto-capillary function at `x = 1`.
pub fn initial_elasto_capillary(omega_s: f64, xi: f64, eta: f64) -> f64 {
    elasto_capillary(1.0, omega_s, xi, eta)
}

/// Classical Laplace-law residual `p_in - p_out - 2 gamma / r_i` for a
/// constant-tension interface.
pub fn laplace_classical_check(p_in: f64, p_out: f64, gamma: f64, r_i: f64) -> f64 {
    p_in - p_out - 2.0 * gamma / r_i
}

/// Components of the tangential surface divergence of a uniform isotropic
/// surface stress `diag(s_tt, s_pp)` on a sphere, assembled from the
/// connection coefficients of the spherical chart. Both vanish identically
/// for the uniform-tension state.
pub fn sphere_surface_divergence(s_tt: f64, s_pp: f64, theta: f64) -> (f64, f64) {
    let cot = theta.cos() / theta.sin();
    // theta: d/dtheta s^tt + Gamma^phi_phitheta s^tt + Gamma^theta_phiphi s^pp
    let div_t = cot * s_tt + (-theta.sin() * theta.cos()) * s_pp;
    // phi: every contraction pairs a vanishing off-diagonal component or a
    // vanishing coefficient
    let div_p = 0.0 * s_tt + 0.0 * s_pp;
    (div_t, div_p)
}

// ---------------------------------------------------------------------------
// equilibrium and solve
// ---------------------------------------------------------------------------

/// Precomputed constants of the equilibrium residual.
struct Residual {
    alpha: f64,
    a3: f64,
    e2s: f64,
    xi: f64,
    eta: f64,
    p_hat_o: f64,
    fluid_scale: f64, // 2 e^{-7 w_l} eta_f (0 when dry)
    fluid_nat: f64,   // e^{3 w_l}
}

impl Residual {
    fn new(nd: &NondimensionalProblem, p_hat_o: f64) -> Self {
        Self {
            alpha: nd.alpha,
            a3: nd.alpha * nd.alpha * nd.alpha,
            e2s: (2.0 * nd.omega_s).exp(),
            xi: nd.xi,
            eta: nd.eta,
            p_hat_o,
            fluid_scale: if nd.wet { 2.0 * (-7.0 * nd.omega_l).exp() * nd.eta_f } else { 0.0 },
            fluid_nat: (3.0 * nd.omega_l).exp(),
        }
    }

    fn domain_ok(&self, x: f64) -> bool {
        x > 0.0 && x * x * x + self.a3 - 1.0 > 0.0
    }

    fn eval(&self, x: f64) -> f64 {
        let x3 = x * x * x;
        let bulk = 1.0 / (x3 * x)
            + 4.0 / x
            + self.alpha * (4.0 - 4.0 * x3 - 5.0 * self.a3) / cbrt4(x3 + self.a3 - 1.0);
        let surface = -(4.0 / x) * (self.e2s * x * x - 1.0) * (self.xi / (x * x) + self.eta * self.e2s);
        let fluid = self.fluid_scale * (self.fluid_nat - x3);
        bulk + surface + fluid - 2.0 * self.p_hat_o
    }
}

/// Nondimensional interface equilibrium residual `g(x)`; the equilibrium
/// stretch satisfies `g(x) = 0`.
pub fn equilibrium_residual(x: f64, nd: &NondimensionalProblem) -> Result<f64, SolverError> {
    nd.validate()?;
    let res = Residual::new(nd, nd.p_hat_o);
    if !res.domain_ok(x) {
        return Err(SolverError::Domain {
            what: format!("x = {x} outside the admissible stretch range"),
        });
    }
    Ok(res.eval(x))
}

fn solve_at_pressure(
    nd: &NondimensionalProblem,
    p_hat_o: f64,
    settings: &SolverSettings,
) -> Result<CavitySolution, SolverError> {
    nd.validate()?;
    let (lo, hi) = settings.bracket;
    let res = Residual::new(nd, p_hat_o);
    if !res.domain_ok(lo) || !res.domain_ok(hi) {
        return Err(SolverError::InvalidProblem {
            what: format!("bracket [{lo}, {hi}] leaves the admissible stretch range"),
        });
    }
    let f = |x: f64| res.eval(x);
    let all_roots = roots::find_roots(&f, lo, hi, settings.scan_points)?;
    let x = all_roots
        .iter()
        .copied()
        .min_by(|a, b| (a - 1.0).abs().partial_cmp(&(b - 1.0).abs()).unwrap())
        .expect("find_roots returns at least one root");
    let residual = res.eval(x);
    let lambda_o = (nd.alpha * nd.alpha * nd.alpha + x * x * x - 1.0).cbrt() / nd.alpha;
    let gamma0 = surface_tension(x, nd.omega_s, nd.xi, nd.eta);
    let (j0, p_f) = if nd.wet {
        let (j0, p_f) = fluid_state(x, nd.omega_l, nd.eta_f);
        (Some(j0), Some(p_f))
    } else {
        (None, None)
    };
    Ok(CavitySolution {
        x,
        lambda_o,
        residual,
        gamma0_over_mu_ri: gamma0,
        e_c: elasto_capillary(x, nd.omega_s, nd.xi, nd.eta),
        e_c_initial: initial_elasto_capillary(nd.omega_s, nd.xi, nd.eta),
        sigma_i_over_mu: radial_stress_closed_form(1.0, x, nd.alpha, p_hat_o),
        j0,
        p_f_over_mu: p_f,
        all_roots,
    })
}

/// Solves the interface equilibrium at the problem's applied pressure. When
/// several roots lie in the bracket the one closest to `x = 1` is returned;
/// all of them are reported in the solution.
pub fn solve_stretch(
    nd: &NondimensionalProblem,
    settings: &SolverSettings,
) -> Result<CavitySolution, SolverError> {
    solve_at_pressure(nd, nd.p_hat_o, settings)
}

/// Relaxed (zero applied pressure) equilibrium state.
pub fn relax(
    nd: &NondimensionalProblem,
    settings: &SolverSettings,
) -> Result<CavitySolution, SolverError> {
    solve_at_pressure(nd, 0.0, settings)
}

/// Solves every pressure in `grid` independently; strains are measured from
/// a fresh relaxed state of the same parameter set, so the `p_hat_o = 0` row
/// has exactly zero strain. Rows follow the input grid order.
pub fn pressure_sweep(
    nd: &NondimensionalProblem,
    grid: &[f64],
    settings: &SolverSettings,
) -> Result<Vec<SweepRow>, SolverError> {
    let relaxed = relax(nd, settings)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &p in grid {
        let sol = solve_at_pressure(nd, p, settings)?;
        rows.push(SweepRow {
            p_hat_o: p,
            x: sol.x,
            lambda_o: sol.lambda_o,
            strain: sol.lambda_o - relaxed.lambda_o,
            gamma0_over_mu_ri: sol.gamma0_over_mu_ri,
            e_c: sol.e_c,
            p_f_over_mu: sol.p_f_over_mu,
            residual: sol.residual,
        });
    }
    Ok(rows)
}

/// Radial stress profile of the neo-Hookean shell at the solved state for
/// the given applied pressure; `samples` equispaced radii over `[R_i, R_o]`.
pub fn stress_profile(
    nd: &NondimensionalProblem,
    p_hat_o: f64,
    samples: usize,
    settings: &SolverSettings,
) -> Result<StressProfile, SolverError> {
    if samples < 2 {
        return Err(SolverError::InvalidProblem {
            what: format!("need at least 2 profile samples, got {samples}"),
        });
    }
    let sol = solve_at_pressure(nd, p_hat_o, settings)?;
    let (w1, w2) = (0.5, 0.0); // neo-Hookean shell, per shear modulus
    let mut out = Vec::with_capacity(samples);
    for k in 0..samples {
        let r_ref = if k == samples - 1 {
            nd.alpha
        } else {
            1.0 + (nd.alpha - 1.0) * k as f64 / (samples - 1) as f64
        };
        let sigma_rr = radial_stress_closed_form(r_ref, sol.x, nd.alpha, p_hat_o);
        out.push(StressSample {
            r_over_ri: r_ref,
            sigma_rr,
            sigma_hoop: hoop_stress(r_ref, sol.x, w1, w2, sigma_rr)?,
            pressure: pressure_field(r_ref, sol.x, w1, w2, sigma_rr)?,
        });
    }
    Ok(StressProfile { p_hat_o, x: sol.x, samples: out })
}
