//! Numerical differential geometry of charts and embedded surfaces in
//! foliation coordinates.
//!
//! A [`MetricField3`] is a callable metric over a 3D chart; when its
//! foliation flag is set, the third coordinate is the unit-normal direction
//! of the `X3 = const` surfaces (tangential-normal metric block structure,
//! with `G_13 = G_23 = 0` and `G_33 = 1` on each slice). Christoffel
//! symbols, the second fundamental form, and the Gauss/Codazzi residuals are
//! all computed by second-order central finite differences of the metric
//! field, which keeps this module agnostic of where the metric came from.
//!
//! Every operation is a pure function of its inputs; metric-field callables
//! are `Send + Sync` and re-entrant, so distinct points may be evaluated in
//! parallel.

use crate::tensor::{matvec3, Metric2, Metric3, SymTensor2, TensorError, TwoPointMap3, Variance};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub enum GeometryError {
    /// Operation requires a foliation chart (normal = third coordinate).
    NotFoliation { detail: String },
    /// The chart degenerates at the requested point (e.g. polar axis).
    ChartSingularity { detail: String },
    /// The metric field failed positive-definiteness at a stencil point.
    Tensor(TensorError),
    /// A vector that must be unit in the given metric is not.
    NonUnitNormal { norm_sq: f64 },
    /// A deformation map with non-positive determinant.
    SingularMap { det: f64 },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::NotFoliation { detail } => write!(f, "not a foliation chart: {detail}"),
            GeometryError::ChartSingularity { detail } => write!(f, "chart singularity: {detail}"),
            GeometryError::Tensor(e) => write!(f, "metric evaluation: {e}"),
            GeometryError::NonUnitNormal { norm_sq } => {
                write!(f, "normal vector is not unit: <N,N> = {norm_sq}")
            }
            GeometryError::SingularMap { det } => {
                write!(f, "deformation map must have positive determinant, got {det:e}")
            }
        }
    }
}

impl std::error::Error for GeometryError {}

impl From<TensorError> for GeometryError {
    fn from(e: TensorError) -> Self {
        GeometryError::Tensor(e)
    }
}

type Eval3 = dyn Fn(&[f64; 3]) -> Result<Metric3, GeometryError> + Send + Sync;
type Eval2 = dyn Fn(&[f64; 2]) -> Result<Metric2, GeometryError> + Send + Sync;

/// Tolerance for the numeric foliation-block check on a slice.
const FOLIATION_TOL: f64 = 1e-10;

/// Callable SPD metric over a 3D chart.
#[derive(Clone)]
pub struct MetricField3 {
    eval: Arc<Eval3>,
    chart: String,
    foliation: bool,
}

impl MetricField3 {
    pub fn from_fn<F>(f: F, chart: &str, foliation: bool) -> Self
    where
        F: Fn(&[f64; 3]) -> Result<Metric3, GeometryError> + Send + Sync + 'static,
    {
        Self { eval: Arc::new(f), chart: chart.to_owned(), foliation }
    }

    pub fn eval(&self, p: &[f64; 3]) -> Result<Metric3, GeometryError> {
        (self.eval)(p)
    }

    pub fn chart(&self) -> &str {
        &self.chart
    }

    pub fn is_foliation(&self) -> bool {
        self.foliation
    }

    /// Euclidean metric in Cartesian coordinates.
    pub fn euclidean() -> Self {
        Self::from_fn(|_| Ok(Metric3::identity()), "cartesian", true)
    }

    /// Euclidean metric adapted to round spheres: chart `(theta, phi, r)`
    /// with the radial direction third, `G = diag(r^2, r^2 sin^2 theta, 1)`.
    pub fn sphere_adapted() -> Self {
        Self::from_fn(
            |p| {
                let (theta, r) = (p[0], p[2]);
                let s = theta.sin();
                if s.abs() < 1e-7 {
                    return Err(GeometryError::ChartSingularity {
                        detail: format!("polar axis: sin(theta) = {s:e}"),
                    });
                }
                if r < 1e-12 {
                    return Err(GeometryError::ChartSingularity {
                        detail: format!("origin: r = {r:e}"),
                    });
                }
                Metric3::from_diag([r * r, r * r * s * s, 1.0]).map_err(Into::into)
            },
            "sphere-adapted",
            true,
        )
    }

    /// Euclidean metric adapted to coaxial cylinders: chart `(phi, z, rho)`
    /// with the radial direction third, `G = diag(rho^2, 1, 1)`.
    pub fn cylinder_adapted() -> Self {
        Self::from_fn(
            |p| {
                let rho = p[2];
                if rho < 1e-12 {
                    return Err(GeometryError::ChartSingularity {
                        detail: format!("axis: rho = {rho:e}"),
                    });
                }
                Metric3::from_diag([rho * rho, 1.0, 1.0]).map_err(Into::into)
            },
            "cylinder-adapted",
            true,
        )
    }

    /// Euclidean metric in spherical polar order `(R, Theta, Phi)`,
    /// `G = diag(1, R^2, R^2 sin^2 Theta)`. Not a foliation chart.
    pub fn spherical_polar() -> Self {
        Self::from_fn(
            |p| {
                let (r, theta) = (p[0], p[1]);
                let s = theta.sin();
                if s.abs() < 1e-7 {
                    return Err(GeometryError::ChartSingularity {
                        detail: format!("polar axis: sin(Theta) = {s:e}"),
                    });
                }
                if r < 1e-12 {
                    return Err(GeometryError::ChartSingularity {
                        detail: format!("origin: R = {r:e}"),
                    });
                }
                Metric3::from_diag([1.0, r * r, r * r * s * s]).map_err(Into::into)
            },
            "spherical-polar",
            false,
        )
    }

    /// Induced metric of the `X3 = x3` slice as a 2D field over `(X1, X2)`.
    pub fn induced_surface(&self, x3: f64) -> Result<MetricField2, GeometryError> {
        if !self.foliation {
            return Err(GeometryError::NotFoliation {
                detail: format!("chart '{}' does not mark X3 as the normal direction", self.chart),
            });
        }
        let eval = Arc::clone(&self.eval);
        Ok(MetricField2 {
            eval: Arc::new(move |uv: &[f64; 2]| {
                let g = eval(&[uv[0], uv[1], x3])?;
                let c = g.cov_components();
                Metric2::new([c[0][0], c[0][1], c[1][1]]).map_err(Into::into)
            }),
            chart: format!("{}|slice", self.chart),
        })
    }

    fn check_foliation_block(&self, p: &[f64; 3]) -> Result<(), GeometryError> {
        let g = self.eval(p)?;
        let c = g.cov_components();
        let scale = g.covariant().max_abs().max(1.0);
        if c[0][2].abs() > FOLIATION_TOL * scale
            || c[1][2].abs() > FOLIATION_TOL * scale
            || (c[2][2] - 1.0).abs() > FOLIATION_TOL
        {
            return Err(GeometryError::NotFoliation {
                detail: format!(
                    "metric block at {p:?} is not tangential-normal: G13={:e} G23={:e} G33={}",
                    c[0][2], c[1][2], c[2][2]
                ),
            });
        }
        Ok(())
    }
}

/// Callable SPD metric over a 2D chart.
#[derive(Clone)]
pub struct MetricField2 {
    eval: Arc<Eval2>,
    chart: String,
}

impl MetricField2 {
    pub fn from_fn<F>(f: F, chart: &str) -> Self
    where
        F: Fn(&[f64; 2]) -> Result<Metric2, GeometryError> + Send + Sync + 'static,
    {
        Self { eval: Arc::new(f), chart: chart.to_owned() }
    }

    pub fn eval(&self, p: &[f64; 2]) -> Result<Metric2, GeometryError> {
        (self.eval)(p)
    }

    pub fn chart(&self) -> &str {
        &self.chart
    }

    /// Round sphere of the given radius in `(theta, phi)`.
    pub fn round_sphere(radius: f64) -> Self {
        Self::from_fn(
            move |p| {
                let s = p[0].sin();
                if s.abs() < 1e-7 {
                    return Err(GeometryError::ChartSingularity {
                        detail: format!("polar axis: sin(theta) = {s:e}"),
                    });
                }
                Metric2::from_diag([radius * radius, radius * radius * s * s]).map_err(Into::into)
            },
            "round-sphere",
        )
    }
}

/// Default central-difference step: `1e-5 * coordinate scale`.
pub fn default_fd_step(p: &[f64]) -> f64 {
    1e-5 * p.iter().fold(1.0f64, |a, &v| a.max(v.abs()))
}

/// Christoffel symbols `Gamma^C_AB` at a point, symmetric in the lower pair.
#[derive(Debug, Clone, Copy)]
pub struct Christoffel3(pub [[[f64; 3]; 3]; 3]);

#[derive(Debug, Clone, Copy)]
pub struct Christoffel2(pub [[[f64; 2]; 2]; 2]);

/// Levi-Civita connection coefficients of a 3D metric field by central
/// differences: `Gamma^C_AB = G^CK (G_KA,B + G_KB,A - G_AB,K) / 2`.
pub fn christoffel3(
    field: &MetricField3,
    p: &[f64; 3],
    step: f64,
) -> Result<Christoffel3, GeometryError> {
    let g = field.eval(p)?;
    let ginv = g.inv_components();
    // d[d][i][j] = dG_ij / dX^d
    let mut d = [[[0.0; 3]; 3]; 3];
    for dir in 0..3 {
        let mut pp = *p;
        let mut pm = *p;
        pp[dir] += step;
        pm[dir] -= step;
        let gp = field.eval(&pp)?;
        let gm = field.eval(&pm)?;
        for i in 0..3 {
            for j in 0..3 {
                d[dir][i][j] =
                    (gp.cov_components()[i][j] - gm.cov_components()[i][j]) / (2.0 * step);
            }
        }
    }
    let mut gam = [[[0.0; 3]; 3]; 3];
    for c in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += ginv[c][k] * (d[b][k][a] + d[a][k][b] - d[k][a][b]);
                }
                gam[c][a][b] = 0.5 * s;
            }
        }
    }
    Ok(Christoffel3(gam))
}

/// 2D analogue of [`christoffel3`].
pub fn christoffel2(
    field: &MetricField2,
    p: &[f64; 2],
    step: f64,
) -> Result<Christoffel2, GeometryError> {
    let g = field.eval(p)?;
    let ginv = g.inv_components();
    let mut d = [[[0.0; 2]; 2]; 2];
    for dir in 0..2 {
        let mut pp = *p;
        let mut pm = *p;
        pp[dir] += step;
        pm[dir] -= step;
        let gp = field.eval(&pp)?;
        let gm = field.eval(&pm)?;
        for i in 0..2 {
            for j in 0..2 {
                d[dir][i][j] =
                    (gp.cov_components()[i][j] - gm.cov_components()[i][j]) / (2.0 * step);
            }
        }
    }
    let mut gam = [[[0.0; 2]; 2]; 2];
    for c in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                let mut s = 0.0;
                for k in 0..2 {
                    s += ginv[c][k] * (d[b][k][a] + d[a][k][b] - d[k][a][b]);
                }
                gam[c][a][b] = 0.5 * s;
            }
        }
    }
    Ok(Christoffel2(gam))
}

/// Second fundamental form of the `X3 = const` slice through `p` in a
/// foliation chart: `K_AB = dG_AB/dX3 / 2`.
pub fn second_fundamental_form(
    field: &MetricField3,
    p: &[f64; 3],
    step: f64,
) -> Result<SymTensor2, GeometryError> {
    if !field.is_foliation() {
        return Err(GeometryError::NotFoliation {
            detail: format!("chart '{}': normal-derivative formula needs X3 normal", field.chart()),
        });
    }
    field.check_foliation_block(p)?;
    let mut pp = *p;
    let mut pm = *p;
    pp[2] += step;
    pm[2] -= step;
    let gp = field.eval(&pp)?;
    let gm = field.eval(&pm)?;
    let mut k = [0.0; 3]; // (K11, K12, K22)
    let c_p = gp.cov_components();
    let c_m = gm.cov_components();
    k[0] = 0.5 * (c_p[0][0] - c_m[0][0]) / (2.0 * step);
    k[1] = 0.5 * (c_p[0][1] - c_m[0][1]) / (2.0 * step);
    k[2] = 0.5 * (c_p[1][1] - c_m[1][1]) / (2.0 * step);
    Ok(SymTensor2::from_sym(k, Variance::Covariant))
}

/// Fully covariant curvature component `R_{rho sigma mu nu}` of a 3D metric
/// field, indices 0-based. Convention fixed so that the round sphere's
/// surface curvature satisfies the Gauss identity
/// `R_1212 = Rbar_1212 + K_12^2 - K_11 K_22` with `K = +dG/dX3 / 2`.
pub fn riemann3_component(
    field: &MetricField3,
    p: &[f64; 3],
    step: f64,
    idx: [usize; 4],
) -> Result<f64, GeometryError> {
    let [rho, sig, mu, nu] = idx;
    let g = field.eval(p)?;
    let gam = christoffel3(field, p, step)?.0;
    // dgam[d][c][a][b] = d Gamma^c_ab / dX^d
    let mut dgam_mu = [[[0.0; 3]; 3]; 3];
    let mut dgam_nu = [[[0.0; 3]; 3]; 3];
    for (dir, out) in [(mu, &mut dgam_mu), (nu, &mut dgam_nu)] {
        let mut pp = *p;
        let mut pm = *p;
        pp[dir] += step;
        pm[dir] -= step;
        let gp = christoffel3(field, &pp, step)?.0;
        let gm = christoffel3(field, &pm, step)?.0;
        for c in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    out[c][a][b] = (gp[c][a][b] - gm[c][a][b]) / (2.0 * step);
                }
            }
        }
    }
    let mut up = [0.0; 3]; // R^lam_{sig mu nu}
    for (lam, val) in up.iter_mut().enumerate() {
        let mut s = dgam_mu[lam][nu][sig] - dgam_nu[lam][mu][sig];
        for k in 0..3 {
            s += gam[lam][mu][k] * gam[k][nu][sig] - gam[lam][nu][k] * gam[k][mu][sig];
        }
        *val = s;
    }
    Ok(matvec3(g.cov_components(), &up)[rho])
}

/// 2D analogue of [`riemann3_component`].
pub fn riemann2_component(
    field: &MetricField2,
    p: &[f64; 2],
    step: f64,
    idx: [usize; 4],
) -> Result<f64, GeometryError> {
    let [rho, sig, mu, nu] = idx;
    let g = field.eval(p)?;
    let gam = christoffel2(field, p, step)?.0;
    let mut dgam_mu = [[[0.0; 2]; 2]; 2];
    let mut dgam_nu = [[[0.0; 2]; 2]; 2];
    for (dir, out) in [(mu, &mut dgam_mu), (nu, &mut dgam_nu)] {
        let mut pp = *p;
        let mut pm = *p;
        pp[dir] += step;
        pm[dir] -= step;
        let gp = christoffel2(field, &pp, step)?.0;
        let gm = christoffel2(field, &pm, step)?.0;
        for c in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    out[c][a][b] = (gp[c][a][b] - gm[c][a][b]) / (2.0 * step);
                }
            }
        }
    }
    let mut up = [0.0; 2];
    for (lam, val) in up.iter_mut().enumerate() {
        let mut s = dgam_mu[lam][nu][sig] - dgam_nu[lam][mu][sig];
        for k in 0..2 {
            s += gam[lam][mu][k] * gam[k][nu][sig] - gam[lam][nu][k] * gam[k][mu][sig];
        }
        *val = s;
    }
    let gc = g.cov_components();
    Ok(gc[rho][0] * up[0] + gc[rho][1] * up[1])
}

/// Residual of the Gauss identity at a surface point of a foliation chart:
/// `R_1212 - (Rbar_1212 + K_12^2 - K_11 K_22)`; zero (to FD error) for a
/// surface correctly embedded in the ambient metric.
pub fn gauss_residual(
    field: &MetricField3,
    p: &[f64; 3],
    step: f64,
) -> Result<f64, GeometryError> {
    let ambient = riemann3_component(field, p, step, [0, 1, 0, 1])?;
    let surface = field.induced_surface(p[2])?;
    let intrinsic = riemann2_component(&surface, &[p[0], p[1]], step, [0, 1, 0, 1])?;
    let k = second_fundamental_form(field, p, step)?;
    Ok(ambient - (intrinsic + k.get(0, 1) * k.get(0, 1) - k.get(0, 0) * k.get(1, 1)))
}

/// Residuals of the two Codazzi-Mainardi identities at a surface point:
/// `R_1213 - (K_11|2 - K_12|1)` and `R_2123 - (K_22|1 - K_12|2)`, with the
/// surface-covariant derivative `K_AB|C = K_AB,C - Gbar^K_AC K_KB - Gbar^K_BC K_AK`.
pub fn codazzi_residual(
    field: &MetricField3,
    p: &[f64; 3],
    step: f64,
) -> Result<(f64, f64), GeometryError> {
    let amb_1213 = riemann3_component(field, p, step, [0, 1, 0, 2])?;
    let amb_2123 = riemann3_component(field, p, step, [1, 0, 1, 2])?;
    let surface = field.induced_surface(p[2])?;
    let gam = christoffel2(&surface, &[p[0], p[1]], step)?.0;
    let k0 = second_fundamental_form(field, p, step)?;
    // dk[c] = dK/dX^c at the surface point
    let mut dk = [[[0.0; 2]; 2]; 2];
    for dir in 0..2 {
        let mut pp = *p;
        let mut pm = *p;
        pp[dir] += step;
        pm[dir] -= step;
        let kp = second_fundamental_form(field, &pp, step)?;
        let km = second_fundamental_form(field, &pm, step)?;
        for a in 0..2 {
            for b in 0..2 {
                dk[dir][a][b] = (kp.get(a, b) - km.get(a, b)) / (2.0 * step);
            }
        }
    }
    let cov_deriv = |a: usize, b: usize, c: usize| -> f64 {
        let mut s = dk[c][a][b];
        for k in 0..2 {
            s -= gam[k][a][c] * k0.get(k, b) + gam[k][b][c] * k0.get(a, k);
        }
        s
    };
    let r1 = amb_1213 - (cov_deriv(0, 0, 1) - cov_deriv(0, 1, 0));
    let r2 = amb_2123 - (cov_deriv(1, 1, 0) - cov_deriv(0, 1, 1));
    Ok((r1, r2))
}

/// Projected metric `G_par = G - N_flat (x) N_flat`: measures tangential
/// lengths only and is degenerate along the normal, so it is returned as a
/// plain covariant tensor rather than a [`Metric3`].
pub fn projected_metric(
    n: &[f64; 3],
    g: &Metric3,
) -> Result<crate::tensor::SymTensor3, GeometryError> {
    let norm_sq = g.dot(n, n);
    if (norm_sq - 1.0).abs() > 1e-12 {
        return Err(GeometryError::NonUnitNormal { norm_sq });
    }
    let n_low = g.lower_vec(n);
    let gc = g.cov_components();
    let mut out = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            out[a][b] = gc[a][b] - n_low[a] * n_low[b];
        }
    }
    Ok(crate::tensor::SymTensor3::from_sym(
        [out[0][0], out[0][1], out[0][2], out[1][1], out[1][2], out[2][2]],
        Variance::Covariant,
    ))
}

/// Projection onto the tangent complement of a unit vector:
/// `pi^a_b = delta^a_b - N^a N_b`, with the index lowered by `g`.
pub fn projector(n: &[f64; 3], g: &Metric3) -> Result<[[f64; 3]; 3], GeometryError> {
    let norm_sq = g.dot(n, n);
    if (norm_sq - 1.0).abs() > 1e-12 {
        return Err(GeometryError::NonUnitNormal { norm_sq });
    }
    let n_low = g.lower_vec(n);
    let mut pi = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            pi[a][b] = if a == b { 1.0 } else { 0.0 };
            pi[a][b] -= n[a] * n_low[b];
        }
    }
    Ok(pi)
}

/// Image of the reference normal under the inverse-transpose map,
/// `(F^-T N)^a = g^ab F^-B_b G_BA N^A`; the deformed normal direction.
fn inverse_transpose_normal(
    f: &TwoPointMap3,
    n_ref: &[f64; 3],
    g_ref: &Metric3,
    g_cur: &Metric3,
) -> Result<[f64; 3], GeometryError> {
    let finv = f.inverse().map_err(|_| GeometryError::SingularMap { det: f.det() })?;
    let n_low = g_ref.lower_vec(n_ref);
    // (F^-T N)^a = g^ab (F^-1)^B_b N_B
    let mut covec = [0.0; 3];
    for b in 0..3 {
        for cap in 0..3 {
            covec[b] += finv.get(cap, b) * n_low[cap];
        }
    }
    Ok(g_cur.raise_vec(&covec))
}

/// Deformed-to-reference area ratio `Jbar = J * |F^-T N|_g` for a surface
/// with unit reference normal `n_ref`.
pub fn surface_jacobian(
    f: &TwoPointMap3,
    n_ref: &[f64; 3],
    g_ref: &Metric3,
    g_cur: &Metric3,
) -> Result<f64, GeometryError> {
    if f.det() <= 0.0 {
        return Err(GeometryError::SingularMap { det: f.det() });
    }
    let norm_sq = g_ref.dot(n_ref, n_ref);
    if (norm_sq - 1.0).abs() > 1e-12 {
        return Err(GeometryError::NonUnitNormal { norm_sq });
    }
    let j = f.jacobian(g_ref, g_cur);
    let v = inverse_transpose_normal(f, n_ref, g_ref, g_cur)?;
    Ok(j * g_cur.norm(&v))
}

/// Same area ratio through the referential route `Jbar = J * sqrt(<N, C^-1 N>_G)`.
pub fn surface_jacobian_referential(
    f: &TwoPointMap3,
    n_ref: &[f64; 3],
    g_ref: &Metric3,
    g_cur: &Metric3,
) -> Result<f64, GeometryError> {
    if f.det() <= 0.0 {
        return Err(GeometryError::SingularMap { det: f.det() });
    }
    let j = f.jacobian(g_ref, g_cur);
    let c_cov = f.pull_back_metric(g_cur);
    let c_inv = crate::tensor::inv3(c_cov.components())?;
    let n_low = g_ref.lower_vec(n_ref);
    let w = matvec3(&c_inv, &n_low);
    let q = n_low[0] * w[0] + n_low[1] * w[1] + n_low[2] * w[2];
    Ok(j * q.sqrt())
}

/// Normal stretch `lambda_n = <F N, n>_g`; equals `J / Jbar` when `n` is the
/// true deformed normal.
pub fn normal_stretch(
    f: &TwoPointMap3,
    n_ref: &[f64; 3],
    n_cur: &[f64; 3],
    g_cur: &Metric3,
) -> f64 {
    let fn_vec = f.apply(n_ref);
    g_cur.dot(&fn_vec, n_cur)
}

/// Area-weighted normal map residual `| Jbar n - J F^-T N |_g` where `n` is
/// the normalized image of `F^-T N`; a self-consistency diagnostic that
/// vanishes to rounding for any admissible deformation.
pub fn nanson_residual(
    f: &TwoPointMap3,
    n_ref: &[f64; 3],
    g_ref: &Metric3,
    g_cur: &Metric3,
) -> Result<f64, GeometryError> {
    let j = f.jacobian(g_ref, g_cur);
    if j <= 0.0 {
        return Err(GeometryError::SingularMap { det: f.det() });
    }
    let v = inverse_transpose_normal(f, n_ref, g_ref, g_cur)?;
    let jbar = surface_jacobian(f, n_ref, g_ref, g_cur)?;
    let norm = g_cur.norm(&v);
    let n_cur = [v[0] / norm, v[1] / norm, v[2] / norm];
    let resid = [
        jbar * n_cur[0] - j * v[0],
        jbar * n_cur[1] - j * v[1],
        jbar * n_cur[2] - j * v[2],
    ];
    Ok(g_cur.norm(&resid))
}
