//! Hyperelastic constitutive models for bulk solids, hyperelastic fluids,
//! and elastic surfaces, parameterized by eigenstrain-bearing material
//! metrics.
//!
//! Materials carry energy-derivative callables (`W1 = dW/dI1`, ...): the
//! stress representations consume derivatives directly, and an optional
//! energy callable enables the finite-difference cross-check
//! [`bulk_energy_fd_check`] / [`surface_energy_fd_check`] against
//! `S = 2 dW/dC`.
//!
//! Eigenstrains enter exclusively through the material metric used for
//! invariant computation: a bulk material with dilatational eigenstrain `w`
//! measures natural lengths with `G = exp(2w) G0`, an elastic surface with
//! `exp(-2w) G0bar` (tensile when placed on the reference surface).
//!
//! Convention for the incompressible representations: the Lagrange
//! multiplier `p` (resp. `pbar`) passed to the incompressible operations is
//! the reduced multiplier that has absorbed the `2 I2 W2` (resp.
//! `2 I2bar W2bar`) term of the compressible representation. The multiplier
//! is an input here, never solved for; pressure determination belongs to the
//! boundary-value layer.

use crate::tensor::{
    det3, fiber_invariants, inv2, inv3, matvec3, mul3, principal_invariants, surface_invariants,
    transpose3, Metric2, Metric3, SymTensor2, SymTensor3, TensorError, TwoPointMap3, Variance,
};
use std::fmt;

pub type ScalarFn1 = Box<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ScalarFn2 = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type ScalarFn3 = Box<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type ScalarFn4 = Box<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;
pub type ScalarFn5 = Box<dyn Fn(f64, f64, f64, f64, f64) -> f64 + Send + Sync>;

/// Tolerance on |J - 1| and |Jbar - 1| for the incompressible operations.
/// Inputs in this crate are analytic, so violations indicate caller bugs.
pub const INCOMPRESSIBILITY_TOL: f64 = 1e-10;

#[derive(Debug)]
pub enum ConstitutiveError {
    WrongMaterial { expected: &'static str },
    IncompressibilityViolation { j: f64 },
    SurfaceIncompressibilityViolation { jbar: f64 },
    Domain { what: String },
    NonUnitFiber { norm_sq: f64 },
    MissingEnergy,
    NegativeModulus { name: &'static str, value: f64 },
    Tensor(TensorError),
}

impl fmt::Display for ConstitutiveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstitutiveError::WrongMaterial { expected } => {
                write!(f, "operation requires a {expected} material")
            }
            ConstitutiveError::IncompressibilityViolation { j } => {
                write!(f, "incompressibility violated: J = {j}")
            }
            ConstitutiveError::SurfaceIncompressibilityViolation { jbar } => {
                write!(f, "surface incompressibility violated: Jbar = {jbar}")
            }
            ConstitutiveError::Domain { what } => write!(f, "domain error: {what}"),
            ConstitutiveError::NonUnitFiber { norm_sq } => {
                write!(f, "fiber direction is not unit in the material metric: <N,N> = {norm_sq}")
            }
            ConstitutiveError::MissingEnergy => {
                write!(f, "material has no energy callable for the finite-difference check")
            }
            ConstitutiveError::NegativeModulus { name, value } => {
                write!(f, "modulus {name} must be non-negative, got {value}")
            }
            ConstitutiveError::Tensor(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ConstitutiveError {}

impl From<TensorError> for ConstitutiveError {
    fn from(e: TensorError) -> Self {
        ConstitutiveError::Tensor(e)
    }
}

// ---------------------------------------------------------------------------
// materials
// ---------------------------------------------------------------------------

/// A bulk constitutive record: energy derivatives, optional energy, a
/// dilatational eigenstrain, and (for transverse isotropy) a fiber
/// direction.
pub enum BulkMaterial {
    IncompressibleIsotropic {
        w1: ScalarFn2,
        w2: ScalarFn2,
        energy: Option<ScalarFn2>,
        eigenstrain: f64,
    },
    CompressibleIsotropic {
        w1: ScalarFn3,
        w2: ScalarFn3,
        w3: ScalarFn3,
        energy: Option<ScalarFn3>,
        eigenstrain: f64,
    },
    TransverselyIsotropicCompressible {
        w1: ScalarFn5,
        w2: ScalarFn5,
        w3: ScalarFn5,
        w4: ScalarFn5,
        w5: ScalarFn5,
        fiber: [f64; 3],
        energy: Option<ScalarFn5>,
        eigenstrain: f64,
    },
    TransverselyIsotropicIncompressible {
        // derivatives of W(I1, I2, I4, I5)
        w1: ScalarFn4,
        w2: ScalarFn4,
        w4: ScalarFn4,
        w5: ScalarFn4,
        fiber: [f64; 3],
        energy: Option<ScalarFn4>,
        eigenstrain: f64,
    },
    HyperelasticFluid {
        dw: ScalarFn1,
        d2w: ScalarFn1,
        energy: Option<ScalarFn1>,
        eigenstrain: f64,
    },
}

impl BulkMaterial {
    /// Incompressible neo-Hookean solid, `W = mu/2 (I1 - 3)`.
    pub fn neo_hookean(mu: f64) -> Self {
        BulkMaterial::IncompressibleIsotropic {
            w1: Box::new(move |_, _| 0.5 * mu),
            w2: Box::new(|_, _| 0.0),
            energy: Some(Box::new(move |i1, _| 0.5 * mu * (i1 - 3.0))),
            eigenstrain: 0.0,
        }
    }

    /// Incompressible Mooney-Rivlin solid, `W = c1 (I1 - 3) + c2 (I2 - 3)`.
    pub fn mooney_rivlin(c1: f64, c2: f64) -> Self {
        BulkMaterial::IncompressibleIsotropic {
            w1: Box::new(move |_, _| c1),
            w2: Box::new(move |_, _| c2),
            energy: Some(Box::new(move |i1, i2| c1 * (i1 - 3.0) + c2 * (i2 - 3.0))),
            eigenstrain: 0.0,
        }
    }

    /// Compressible neo-Hookean solid,
    /// `W = mu/2 (I1 - 3 - ln I3) + lam/8 ln^2 I3`; stress-free at `C = G`.
    pub fn compressible_neo_hookean(mu: f64, lam: f64) -> Self {
        BulkMaterial::CompressibleIsotropic {
            w1: Box::new(move |_, _, _| 0.5 * mu),
            w2: Box::new(|_, _, _| 0.0),
            w3: Box::new(move |_, _, i3| -0.5 * mu / i3 + 0.25 * lam * i3.ln() / i3),
            energy: Some(Box::new(move |i1, _, i3| {
                0.5 * mu * (i1 - 3.0 - i3.ln()) + 0.125 * lam * i3.ln() * i3.ln()
            })),
            eigenstrain: 0.0,
        }
    }

    /// Compressible neo-Hookean matrix reinforced along `fiber` with
    /// constant-derivative fiber terms `c4 (I4 - 1) + c5 (I5 - 1)`.
    pub fn transversely_isotropic(mu: f64, lam: f64, c4: f64, c5: f64, fiber: [f64; 3]) -> Self {
        BulkMaterial::TransverselyIsotropicCompressible {
            w1: Box::new(move |_, _, _, _, _| 0.5 * mu),
            w2: Box::new(|_, _, _, _, _| 0.0),
            w3: Box::new(move |_, _, i3, _, _| -0.5 * mu / i3 + 0.25 * lam * i3.ln() / i3),
            w4: Box::new(move |_, _, _, _, _| c4),
            w5: Box::new(move |_, _, _, _, _| c5),
            fiber,
            energy: Some(Box::new(move |i1, _, i3, i4, i5| {
                0.5 * mu * (i1 - 3.0 - i3.ln())
                    + 0.125 * lam * i3.ln() * i3.ln()
                    + c4 * (i4 - 1.0)
                    + c5 * (i5 - 1.0)
            })),
            eigenstrain: 0.0,
        }
    }

    /// Incompressible neo-Hookean matrix with constant-derivative fiber terms.
    pub fn transversely_isotropic_incompressible(mu: f64, c4: f64, c5: f64, fiber: [f64; 3]) -> Self {
        BulkMaterial::TransverselyIsotropicIncompressible {
            w1: Box::new(move |_, _, _, _| 0.5 * mu),
            w2: Box::new(|_, _, _, _| 0.0),
            w4: Box::new(move |_, _, _, _| c4),
            w5: Box::new(move |_, _, _, _| c5),
            fiber,
            energy: Some(Box::new(move |i1, _, i4, i5| {
                0.5 * mu * (i1 - 3.0) + c4 * (i4 - 1.0) + c5 * (i5 - 1.0)
            })),
            eigenstrain: 0.0,
        }
    }

    /// Hyperelastic fluid with quadratic volumetric energy
    /// `W = kappa/2 (J - 1)^2` and dilatational eigenstrain `omega` (the
    /// natural volumetric state is `exp(3 omega)` relative to the reference).
    pub fn fluid_quadratic(kappa: f64, omega: f64) -> Result<Self, ConstitutiveError> {
        if kappa < 0.0 {
            return Err(ConstitutiveError::NegativeModulus { name: "kappa_f", value: kappa });
        }
        Ok(BulkMaterial::HyperelasticFluid {
            dw: Box::new(move |j| kappa * (j - 1.0)),
            d2w: Box::new(move |_| kappa),
            energy: Some(Box::new(move |j| 0.5 * kappa * (j - 1.0) * (j - 1.0))),
            eigenstrain: omega,
        })
    }

    pub fn eigenstrain(&self) -> f64 {
        match self {
            BulkMaterial::IncompressibleIsotropic { eigenstrain, .. }
            | BulkMaterial::CompressibleIsotropic { eigenstrain, .. }
            | BulkMaterial::TransverselyIsotropicCompressible { eigenstrain, .. }
            | BulkMaterial::TransverselyIsotropicIncompressible { eigenstrain, .. }
            | BulkMaterial::HyperelasticFluid { eigenstrain, .. } => *eigenstrain,
        }
    }

    pub fn with_eigenstrain(mut self, omega: f64) -> Self {
        match &mut self {
            BulkMaterial::IncompressibleIsotropic { eigenstrain, .. }
            | BulkMaterial::CompressibleIsotropic { eigenstrain, .. }
            | BulkMaterial::TransverselyIsotropicCompressible { eigenstrain, .. }
            | BulkMaterial::TransverselyIsotropicIncompressible { eigenstrain, .. }
            | BulkMaterial::HyperelasticFluid { eigenstrain, .. } => *eigenstrain = omega,
        }
        self
    }

    /// Material metric `G = exp(2 omega) G0` measuring natural, stress-free
    /// lengths; equals the reference metric in the eigenstrain-free case.
    pub fn material_metric(&self, reference: &Metric3) -> Metric3 {
        reference
            .scaled((2.0 * self.eigenstrain()).exp())
            .expect("exp(2w) > 0")
    }
}

/// A surface constitutive record with 2D dilatational eigenstrain.
pub enum SurfaceMaterial {
    CompressibleIsotropic {
        w1: ScalarFn2,
        w2: ScalarFn2,
        energy: Option<ScalarFn2>,
        eigenstrain: f64,
    },
    IncompressibleIsotropic {
        w1: ScalarFn1,
        energy: Option<ScalarFn1>,
        eigenstrain: f64,
    },
}

impl SurfaceMaterial {
    /// Compressible neo-Hookean elastic surface,
    /// `W = mu_s/2 (I1 - 2 - ln I2) + kappa_s/2 (sqrt(I2) - 1)^2`.
    /// Stress-free at `I1 = 2, I2 = 1`.
    pub fn neo_hookean(mu_s: f64, kappa_s: f64, omega_s: f64) -> Result<Self, ConstitutiveError> {
        if mu_s < 0.0 {
            return Err(ConstitutiveError::NegativeModulus { name: "mu_s", value: mu_s });
        }
        if kappa_s < 0.0 {
            return Err(ConstitutiveError::NegativeModulus { name: "kappa_s", value: kappa_s });
        }
        Ok(SurfaceMaterial::CompressibleIsotropic {
            w1: Box::new(move |_, _| 0.5 * mu_s),
            w2: Box::new(move |_, i2| -0.5 * mu_s / i2 + 0.5 * kappa_s * (1.0 - 1.0 / i2.sqrt())),
            energy: Some(Box::new(move |i1, i2| {
                let d = i2.sqrt() - 1.0;
                0.5 * mu_s * (i1 - 2.0 - i2.ln()) + 0.5 * kappa_s * d * d
            })),
            eigenstrain: omega_s,
        })
    }

    /// Incompressible neo-Hookean elastic surface, `W = mu/2 (I1 - 2)`.
    pub fn incompressible_neo_hookean(mu: f64, omega_s: f64) -> Result<Self, ConstitutiveError> {
        if mu < 0.0 {
            return Err(ConstitutiveError::NegativeModulus { name: "mu_s", value: mu });
        }
        Ok(SurfaceMaterial::IncompressibleIsotropic {
            w1: Box::new(move |_| 0.5 * mu),
            energy: Some(Box::new(move |i1| 0.5 * mu * (i1 - 2.0))),
            eigenstrain: omega_s,
        })
    }

    pub fn eigenstrain(&self) -> f64 {
        match self {
            SurfaceMaterial::CompressibleIsotropic { eigenstrain, .. }
            | SurfaceMaterial::IncompressibleIsotropic { eigenstrain, .. } => *eigenstrain,
        }
    }

    /// Surface material metric `Gbar = exp(-2 omega_s) G0bar`: the natural
    /// surface is smaller than the reference one, so a positive eigenstrain
    /// puts the surface in tension in the initial configuration.
    pub fn material_metric(&self, first_fundamental: &Metric2) -> Metric2 {
        first_fundamental
            .scaled((-2.0 * self.eigenstrain()).exp())
            .expect("exp(-2w) > 0")
    }
}

/// Cauchy stress with the optional Lagrange multiplier that produced it.
#[derive(Debug, Clone, Copy)]
pub struct StressState {
    pub cauchy: SymTensor3,
    pub pressure: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SurfaceStressState {
    pub cauchy: SymTensor2,
    pub pressure: Option<f64>,
}

// ---------------------------------------------------------------------------
// kinematics helper
// ---------------------------------------------------------------------------

/// Spatial strain measures and invariants of a deformation against a
/// material metric, shared by the isotropic and transversely isotropic
/// operations.
pub struct BulkKinematics {
    pub b: SymTensor3,
    pub c_spatial: SymTensor3,
    pub c_flat: SymTensor3,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub j: f64,
}

pub fn bulk_kinematics(
    f: &TwoPointMap3,
    g_mat: &Metric3,
    g_cur: &Metric3,
) -> Result<BulkKinematics, ConstitutiveError> {
    if f.det() <= 0.0 {
        return Err(ConstitutiveError::Domain {
            what: format!("deformation gradient determinant {} <= 0", f.det()),
        });
    }
    let c_flat = f.pull_back_metric(g_cur);
    let (i1, i2, i3) = principal_invariants(&c_flat, g_mat)?;
    Ok(BulkKinematics {
        b: f.finger_tensor(g_mat),
        c_spatial: f.spatial_strain_con(g_mat, g_cur)?,
        c_flat,
        i1,
        i2,
        i3,
        j: f.jacobian(g_mat, g_cur),
    })
}

// ---------------------------------------------------------------------------
// bulk stress operations
// ---------------------------------------------------------------------------

fn incompressible_isotropic_assembly(
    w1v: f64,
    w2v: f64,
    b: &SymTensor3,
    c: &SymTensor3,
    g: &Metric3,
    p: f64,
) -> SymTensor3 {
    g.inverse()
        .scale(-p)
        .add(&b.scale(2.0 * w1v))
        .add(&c.scale(-2.0 * w2v))
}

/// Cauchy stress of an incompressible isotropic solid,
/// `sigma = -p g# + 2 W1 b - 2 W2 c`, with invariants taken from the
/// supplied strain measures (`I1 = b : g`, `I2 = c : g` at `J = 1`).
pub fn cauchy_incompressible_isotropic(
    mat: &BulkMaterial,
    b: &SymTensor3,
    c: &SymTensor3,
    g: &Metric3,
    p: f64,
) -> Result<StressState, ConstitutiveError> {
    let BulkMaterial::IncompressibleIsotropic { w1, w2, .. } = mat else {
        return Err(ConstitutiveError::WrongMaterial { expected: "incompressible isotropic" });
    };
    let j = (b.det() * g.det()).sqrt();
    if (j - 1.0).abs() > INCOMPRESSIBILITY_TOL {
        return Err(ConstitutiveError::IncompressibilityViolation { j });
    }
    let i1 = b.contract(&g.covariant());
    let i2 = c.contract(&g.covariant());
    let sigma = incompressible_isotropic_assembly(w1(i1, i2), w2(i1, i2), b, c, g, p);
    Ok(StressState { cauchy: sigma, pressure: Some(p) })
}

#[allow(clippy::too_many_arguments)]
fn compressible_isotropic_assembly(
    w1v: f64,
    w2v: f64,
    w3v: f64,
    i2: f64,
    i3: f64,
    b: &SymTensor3,
    c: &SymTensor3,
    g: &Metric3,
) -> SymTensor3 {
    let s = 2.0 / i3.sqrt();
    g.inverse()
        .scale(s * (i2 * w2v + i3 * w3v))
        .add(&b.scale(s * w1v))
        .add(&c.scale(-s * i3 * w2v))
}

/// Cauchy stress of a compressible isotropic solid,
/// `sigma = 2/sqrt(I3) [ (I2 W2 + I3 W3) g# + W1 b - I3 W2 c ]`.
///
/// At `I3 = 1` this reduces to the incompressible representation with the
/// reduced multiplier standing in for the volumetric response:
/// `-p = 2 (I2 W2 + W3)`.
pub fn cauchy_compressible_isotropic(
    mat: &BulkMaterial,
    invariants: (f64, f64, f64),
    b: &SymTensor3,
    c: &SymTensor3,
    g: &Metric3,
) -> Result<StressState, ConstitutiveError> {
    let BulkMaterial::CompressibleIsotropic { w1, w2, w3, .. } = mat else {
        return Err(ConstitutiveError::WrongMaterial { expected: "compressible isotropic" });
    };
    let (i1, i2, i3) = invariants;
    if i3 <= 0.0 {
        return Err(ConstitutiveError::Domain { what: format!("I3 = {i3} <= 0") });
    }
    let sigma = compressible_isotropic_assembly(
        w1(i1, i2, i3),
        w2(i1, i2, i3),
        w3(i1, i2, i3),
        i2,
        i3,
        b,
        c,
        g,
    );
    Ok(StressState { cauchy: sigma, pressure: None })
}

/// Fiber contribution tensors: deformed fiber `n = F N` and
/// `l^ab = n^a b^bc n_c + n^b b^ac n_c`.
fn fiber_terms(
    f: &TwoPointMap3,
    fiber: &[f64; 3],
    b: &SymTensor3,
    g_cur: &Metric3,
) -> (SymTensor3, SymTensor3) {
    let n = f.apply(fiber);
    let mut nn = [[0.0; 3]; 3];
    for a in 0..3 {
        for bb in 0..3 {
            nn[a][bb] = n[a] * n[bb];
        }
    }
    let n_low = g_cur.lower_vec(&n);
    let bn = matvec3(b.components(), &n_low); // b^ac n_c
    let mut l = [[0.0; 3]; 3];
    for a in 0..3 {
        for bb in 0..3 {
            l[a][bb] = n[a] * bn[bb] + n[bb] * bn[a];
        }
    }
    (
        SymTensor3::from_sym([nn[0][0], nn[0][1], nn[0][2], nn[1][1], nn[1][2], nn[2][2]], Variance::Contravariant),
        SymTensor3::from_sym([l[0][0], l[0][1], l[0][2], l[1][1], l[1][2], l[2][2]], Variance::Contravariant),
    )
}

/// Cauchy stress of a transversely isotropic solid. For the compressible
/// tag: `sigma = 2/sqrt(I3) [ W1 b + (I2 W2 + I3 W3) g# - I3 W2 c + W4 n(x)n + W5 l ]`;
/// for the incompressible tag the isotropic part is the reduced-multiplier
/// form and `p` is required. With `W4 = W5 = 0` the result is bitwise equal
/// to the corresponding isotropic operation.
pub fn cauchy_transversely_isotropic(
    mat: &BulkMaterial,
    f: &TwoPointMap3,
    g_ref: &Metric3,
    g_cur: &Metric3,
    p: Option<f64>,
) -> Result<StressState, ConstitutiveError> {
    let g_mat = mat.material_metric(g_ref);
    let kin = bulk_kinematics(f, &g_mat, g_cur)?;
    match mat {
        BulkMaterial::TransverselyIsotropicCompressible { w1, w2, w3, w4, w5, fiber, .. } => {
            if kin.i3 <= 0.0 {
                return Err(ConstitutiveError::Domain { what: format!("I3 = {} <= 0", kin.i3) });
            }
            let fiber_norm = g_mat.dot(fiber, fiber);
            if (fiber_norm - 1.0).abs() > 1e-12 {
                return Err(ConstitutiveError::NonUnitFiber { norm_sq: fiber_norm });
            }
            let (i4, i5) = fiber_invariants(&kin.c_flat, &g_mat, fiber);
            let args = (kin.i1, kin.i2, kin.i3, i4, i5);
            let sigma = compressible_isotropic_assembly(
                w1(args.0, args.1, args.2, args.3, args.4),
                w2(args.0, args.1, args.2, args.3, args.4),
                w3(args.0, args.1, args.2, args.3, args.4),
                kin.i2,
                kin.i3,
                &kin.b,
                &kin.c_spatial,
                g_cur,
            );
            let w4v = w4(args.0, args.1, args.2, args.3, args.4);
            let w5v = w5(args.0, args.1, args.2, args.3, args.4);
            let sigma = if w4v == 0.0 && w5v == 0.0 {
                sigma
            } else {
                let s = 2.0 / kin.i3.sqrt();
                let (nn, l) = fiber_terms(f, fiber, &kin.b, g_cur);
                sigma.add(&nn.scale(s * w4v)).add(&l.scale(s * w5v))
            };
            Ok(StressState { cauchy: sigma, pressure: None })
        }
        BulkMaterial::TransverselyIsotropicIncompressible { w1, w2, w4, w5, fiber, .. } => {
            let p = p.ok_or(ConstitutiveError::Domain {
                what: "incompressible material needs a multiplier p".into(),
            })?;
            if (kin.j - 1.0).abs() > INCOMPRESSIBILITY_TOL {
                return Err(ConstitutiveError::IncompressibilityViolation { j: kin.j });
            }
            let fiber_norm = g_mat.dot(fiber, fiber);
            if (fiber_norm - 1.0).abs() > 1e-12 {
                return Err(ConstitutiveError::NonUnitFiber { norm_sq: fiber_norm });
            }
            let (i4, i5) = fiber_invariants(&kin.c_flat, &g_mat, fiber);
            let i1 = kin.b.contract(&g_cur.covariant());
            let i2 = kin.c_spatial.contract(&g_cur.covariant());
            let sigma = incompressible_isotropic_assembly(
                w1(i1, i2, i4, i5),
                w2(i1, i2, i4, i5),
                &kin.b,
                &kin.c_spatial,
                g_cur,
                p,
            );
            let w4v = w4(i1, i2, i4, i5);
            let w5v = w5(i1, i2, i4, i5);
            let sigma = if w4v == 0.0 && w5v == 0.0 {
                sigma
            } else {
                let (nn, l) = fiber_terms(f, fiber, &kin.b, g_cur);
                sigma.add(&nn.scale(2.0 * w4v)).add(&l.scale(2.0 * w5v))
            };
            Ok(StressState { cauchy: sigma, pressure: Some(p) })
        }
        _ => Err(ConstitutiveError::WrongMaterial { expected: "transversely isotropic" }),
    }
}

/// Hydrostatic stress of a hyperelastic fluid, `sigma = W'(J) g#`.
pub fn fluid_stress(
    mat: &BulkMaterial,
    j: f64,
    g_cur: &Metric3,
) -> Result<StressState, ConstitutiveError> {
    let BulkMaterial::HyperelasticFluid { dw, .. } = mat else {
        return Err(ConstitutiveError::WrongMaterial { expected: "hyperelastic fluid" });
    };
    if j <= 0.0 {
        return Err(ConstitutiveError::Domain { what: format!("J = {j} <= 0") });
    }
    Ok(StressState { cauchy: g_cur.inverse().scale(dw(j)), pressure: None })
}

// ---------------------------------------------------------------------------
// surface stress operations
// ---------------------------------------------------------------------------

/// Cauchy surface stress of a compressible isotropic elastic surface,
/// `sigma = 2/sqrt(I2) [ I2 W2 g# + W1 b ]`, invariants computed against the
/// (possibly eigenstrained) surface material metric by the caller.
pub fn surface_cauchy_isotropic(
    smat: &SurfaceMaterial,
    invariants: (f64, f64),
    b: &SymTensor2,
    g: &Metric2,
) -> Result<SurfaceStressState, ConstitutiveError> {
    let SurfaceMaterial::CompressibleIsotropic { w1, w2, .. } = smat else {
        return Err(ConstitutiveError::WrongMaterial { expected: "compressible isotropic surface" });
    };
    let (i1, i2) = invariants;
    if i2 <= 0.0 {
        return Err(ConstitutiveError::Domain { what: format!("I2bar = {i2} <= 0") });
    }
    let s = 2.0 / i2.sqrt();
    let sigma = g
        .inverse()
        .scale(s * i2 * w2(i1, i2))
        .add(&b.scale(s * w1(i1, i2)));
    Ok(SurfaceStressState { cauchy: sigma, pressure: None })
}

/// Cauchy surface stress of an incompressible elastic surface,
/// `sigma = -pbar g# + 2 W1 b`. The multiplier `pbar` is data here.
pub fn surface_cauchy_incompressible(
    smat: &SurfaceMaterial,
    b: &SymTensor2,
    g: &Metric2,
    p_bar: f64,
) -> Result<SurfaceStressState, ConstitutiveError> {
    let SurfaceMaterial::IncompressibleIsotropic { w1, .. } = smat else {
        return Err(ConstitutiveError::WrongMaterial { expected: "incompressible isotropic surface" });
    };
    let jbar = (b.det() * g.det()).sqrt();
    if (jbar - 1.0).abs() > INCOMPRESSIBILITY_TOL {
        return Err(ConstitutiveError::SurfaceIncompressibilityViolation { jbar });
    }
    let i1 = b.contract(&g.covariant());
    let sigma = g.inverse().scale(-p_bar).add(&b.scale(2.0 * w1(i1)));
    Ok(SurfaceStressState { cauchy: sigma, pressure: Some(p_bar) })
}

// ---------------------------------------------------------------------------
// stress measure conversions
// ---------------------------------------------------------------------------

/// First Piola-Kirchhoff stress from Cauchy stress,
/// `P^aA = J sigma^ab F^-A_b` with `J = sqrt(det g / det G) det F`.
pub fn first_pk_from_cauchy(
    sigma: &SymTensor3,
    f: &TwoPointMap3,
    g_ref: &Metric3,
    g_cur: &Metric3,
) -> Result<TwoPointMap3, ConstitutiveError> {
    if f.det() <= 0.0 {
        return Err(ConstitutiveError::Domain {
            what: format!("deformation gradient determinant {} <= 0", f.det()),
        });
    }
    let j = f.jacobian(g_ref, g_cur);
    let finv = inv3(f.components())?;
    let mut p = mul3(sigma.components(), &transpose3(&finv));
    for row in &mut p {
        for v in row {
            *v *= j;
        }
    }
    Ok(TwoPointMap3::new(p, f.target, f.source))
}

/// Traction against the material unit normal, `t^a = P^aA N^A`.
pub fn traction(p: &TwoPointMap3, n_ref: &[f64; 3]) -> [f64; 3] {
    p.apply(n_ref)
}

/// Second Piola-Kirchhoff stress, `S^AB = F^-A_a P^aB`.
pub fn second_pk(p: &TwoPointMap3, f: &TwoPointMap3) -> Result<SymTensor3, ConstitutiveError> {
    let finv = inv3(f.components())?;
    let s = mul3(&finv, p.components());
    Ok(SymTensor3::from_sym(
        [s[0][0], s[0][1], s[0][2], s[1][1], s[1][2], s[2][2]],
        Variance::Contravariant,
    ))
}

// ---------------------------------------------------------------------------
// finite-difference validation of energies
// ---------------------------------------------------------------------------

/// Analytic second Piola-Kirchhoff stress of the energetic part of a bulk
/// model (excluding any incompressibility multiplier):
/// `S = 2 sum_j W_j dI_j/dC`.
pub fn analytic_second_pk(
    mat: &BulkMaterial,
    c_flat: &SymTensor3,
    g_mat: &Metric3,
) -> Result<SymTensor3, ConstitutiveError> {
    let (i1, i2, i3) = principal_invariants(c_flat, g_mat)?;
    let ginv = g_mat.inv_components();
    let c = c_flat.components();
    // dI2/dC = I1 G# - G^-1 C G^-1
    let gcg = mul3(ginv, &mul3(c, ginv));
    let cinv = inv3(c)?;
    let mut s = [[0.0; 3]; 3];
    let add = |s: &mut [[f64; 3]; 3], k: f64, t: &[[f64; 3]; 3]| {
        for i in 0..3 {
            for j in 0..3 {
                s[i][j] += k * t[i][j];
            }
        }
    };
    match mat {
        BulkMaterial::IncompressibleIsotropic { w1, w2, .. } => {
            let (w1v, w2v) = (w1(i1, i2), w2(i1, i2));
            add(&mut s, 2.0 * w1v + 2.0 * w2v * i1, ginv);
            add(&mut s, -2.0 * w2v, &gcg);
        }
        BulkMaterial::CompressibleIsotropic { w1, w2, w3, .. } => {
            let (w1v, w2v, w3v) = (w1(i1, i2, i3), w2(i1, i2, i3), w3(i1, i2, i3));
            add(&mut s, 2.0 * w1v + 2.0 * w2v * i1, ginv);
            add(&mut s, -2.0 * w2v, &gcg);
            add(&mut s, 2.0 * w3v * i3, &cinv);
        }
        BulkMaterial::TransverselyIsotropicCompressible { w1, w2, w3, w4, w5, fiber, .. } => {
            let (i4, i5) = fiber_invariants(c_flat, g_mat, fiber);
            let a = (i1, i2, i3, i4, i5);
            add(&mut s, 2.0 * w1(a.0, a.1, a.2, a.3, a.4) + 2.0 * w2(a.0, a.1, a.2, a.3, a.4) * i1, ginv);
            add(&mut s, -2.0 * w2(a.0, a.1, a.2, a.3, a.4), &gcg);
            add(&mut s, 2.0 * w3(a.0, a.1, a.2, a.3, a.4) * i3, &cinv);
            let (nn, ncn) = fiber_outer_products(c_flat, g_mat, fiber);
            add(&mut s, 2.0 * w4(a.0, a.1, a.2, a.3, a.4), &nn);
            add(&mut s, 2.0 * w5(a.0, a.1, a.2, a.3, a.4), &ncn);
        }
        BulkMaterial::TransverselyIsotropicIncompressible { w1, w2, w4, w5, fiber, .. } => {
            let (i4, i5) = fiber_invariants(c_flat, g_mat, fiber);
            let a = (i1, i2, i4, i5);
            add(&mut s, 2.0 * w1(a.0, a.1, a.2, a.3) + 2.0 * w2(a.0, a.1, a.2, a.3) * i1, ginv);
            add(&mut s, -2.0 * w2(a.0, a.1, a.2, a.3), &gcg);
            let (nn, ncn) = fiber_outer_products(c_flat, g_mat, fiber);
            add(&mut s, 2.0 * w4(a.0, a.1, a.2, a.3), &nn);
            add(&mut s, 2.0 * w5(a.0, a.1, a.2, a.3), &ncn);
        }
        BulkMaterial::HyperelasticFluid { .. } => {
            return Err(ConstitutiveError::WrongMaterial { expected: "solid" });
        }
    }
    Ok(SymTensor3::from_sym(
        [s[0][0], s[0][1], s[0][2], s[1][1], s[1][2], s[2][2]],
        Variance::Contravariant,
    ))
}

fn fiber_outer_products(
    c_flat: &SymTensor3,
    g_mat: &Metric3,
    n: &[f64; 3],
) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let mut nn = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            nn[a][b] = n[a] * n[b];
        }
    }
    // (C.N)^A = G^AM C_MB N^B
    let cn = matvec3(g_mat.inv_components(), &matvec3(c_flat.components(), n));
    let mut ncn = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            ncn[a][b] = n[a] * cn[b] + cn[a] * n[b];
        }
    }
    (nn, ncn)
}

fn bulk_energy_at(
    mat: &BulkMaterial,
    c_flat: &SymTensor3,
    g_mat: &Metric3,
) -> Result<f64, ConstitutiveError> {
    let (i1, i2, i3) = principal_invariants(c_flat, g_mat)?;
    match mat {
        BulkMaterial::IncompressibleIsotropic { energy, .. } => {
            energy.as_ref().map(|w| w(i1, i2)).ok_or(ConstitutiveError::MissingEnergy)
        }
        BulkMaterial::CompressibleIsotropic { energy, .. } => {
            energy.as_ref().map(|w| w(i1, i2, i3)).ok_or(ConstitutiveError::MissingEnergy)
        }
        BulkMaterial::TransverselyIsotropicCompressible { energy, fiber, .. } => {
            let (i4, i5) = fiber_invariants(c_flat, g_mat, fiber);
            energy.as_ref().map(|w| w(i1, i2, i3, i4, i5)).ok_or(ConstitutiveError::MissingEnergy)
        }
        BulkMaterial::TransverselyIsotropicIncompressible { energy, fiber, .. } => {
            let (i4, i5) = fiber_invariants(c_flat, g_mat, fiber);
            energy.as_ref().map(|w| w(i1, i2, i4, i5)).ok_or(ConstitutiveError::MissingEnergy)
        }
        BulkMaterial::HyperelasticFluid { .. } => {
            Err(ConstitutiveError::WrongMaterial { expected: "solid" })
        }
    }
}

/// Maximum relative deviation between the analytic energetic second
/// Piola-Kirchhoff stress and the central difference of the energy in the
/// components of `C`. For hyperelastic fluids the scalar `|W' - FD(W)|` is
/// returned (relative to `max(|W'|, 1)`).
pub fn bulk_energy_fd_check(
    mat: &BulkMaterial,
    c_flat: &SymTensor3,
    g_mat: &Metric3,
    step: f64,
) -> Result<f64, ConstitutiveError> {
    if let BulkMaterial::HyperelasticFluid { dw, energy, .. } = mat {
        let energy = energy.as_ref().ok_or(ConstitutiveError::MissingEnergy)?;
        let j = (det3(c_flat.components()) / g_mat.det()).sqrt().sqrt().powi(2); // sqrt(I3)
        let fd = (energy(j + step) - energy(j - step)) / (2.0 * step);
        return Ok((dw(j) - fd).abs() / dw(j).abs().max(1.0));
    }
    let analytic = analytic_second_pk(mat, c_flat, g_mat)?;
    let mut fd = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in a..3 {
            let mut cp = *c_flat.components();
            let mut cm = cp;
            cp[a][b] += step;
            cm[a][b] -= step;
            if a != b {
                cp[b][a] += step;
                cm[b][a] -= step;
            }
            let wp = bulk_energy_at(
                mat,
                &SymTensor3::from_sym(
                    [cp[0][0], cp[0][1], cp[0][2], cp[1][1], cp[1][2], cp[2][2]],
                    Variance::Covariant,
                ),
                g_mat,
            )?;
            let wm = bulk_energy_at(
                mat,
                &SymTensor3::from_sym(
                    [cm[0][0], cm[0][1], cm[0][2], cm[1][1], cm[1][2], cm[2][2]],
                    Variance::Covariant,
                ),
                g_mat,
            )?;
            let d = (wp - wm) / (2.0 * step);
            // diagonal: S^AA = 2 dW/dC_AA; off-diagonal: the symmetric
            // perturbation already counts both slots
            fd[a][b] = if a == b { 2.0 * d } else { d };
            fd[b][a] = fd[a][b];
        }
    }
    let scale = analytic.max_abs().max(1e-12);
    let mut dev = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            dev = dev.max((fd[a][b] - analytic.get(a, b)).abs());
        }
    }
    Ok(dev / scale)
}

/// Surface analogue of [`analytic_second_pk`]:
/// `S = 2 W1 G# + 2 W2 I2 C^-1` (energetic part only for the
/// incompressible tag).
pub fn surface_analytic_second_pk(
    smat: &SurfaceMaterial,
    c_flat: &SymTensor2,
    g_mat: &Metric2,
) -> Result<SymTensor2, ConstitutiveError> {
    let (i1, i2) = surface_invariants(c_flat, g_mat)?;
    let cinv = inv2(c_flat.components())?;
    let ginv = g_mat.inv_components();
    let mut s = [[0.0; 2]; 2];
    let (w1v, w2v) = match smat {
        SurfaceMaterial::CompressibleIsotropic { w1, w2, .. } => (w1(i1, i2), w2(i1, i2)),
        SurfaceMaterial::IncompressibleIsotropic { w1, .. } => (w1(i1), 0.0),
    };
    for a in 0..2 {
        for b in 0..2 {
            s[a][b] = 2.0 * w1v * ginv[a][b] + 2.0 * w2v * i2 * cinv[a][b];
        }
    }
    Ok(SymTensor2::from_sym([s[0][0], s[0][1], s[1][1]], Variance::Contravariant))
}

fn surface_energy_at(
    smat: &SurfaceMaterial,
    c_flat: &SymTensor2,
    g_mat: &Metric2,
) -> Result<f64, ConstitutiveError> {
    let (i1, i2) = surface_invariants(c_flat, g_mat)?;
    match smat {
        SurfaceMaterial::CompressibleIsotropic { energy, .. } => {
            energy.as_ref().map(|w| w(i1, i2)).ok_or(ConstitutiveError::MissingEnergy)
        }
        SurfaceMaterial::IncompressibleIsotropic { energy, .. } => {
            energy.as_ref().map(|w| w(i1)).ok_or(ConstitutiveError::MissingEnergy)
        }
    }
}

/// Surface analogue of [`bulk_energy_fd_check`].
pub fn surface_energy_fd_check(
    smat: &SurfaceMaterial,
    c_flat: &SymTensor2,
    g_mat: &Metric2,
    step: f64,
) -> Result<f64, ConstitutiveError> {
    let analytic = surface_analytic_second_pk(smat, c_flat, g_mat)?;
    let mut fd = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in a..2 {
            let mut cp = *c_flat.components();
            let mut cm = cp;
            cp[a][b] += step;
            cm[a][b] -= step;
            if a != b {
                cp[b][a] += step;
                cm[b][a] -= step;
            }
            let wp = surface_energy_at(
                smat,
                &SymTensor2::from_sym([cp[0][0], cp[0][1], cp[1][1]], Variance::Covariant),
                g_mat,
            )?;
            let wm = surface_energy_at(
                smat,
                &SymTensor2::from_sym([cm[0][0], cm[0][1], cm[1][1]], Variance::Covariant),
                g_mat,
            )?;
            let d = (wp - wm) / (2.0 * step);
            fd[a][b] = if a == b { 2.0 * d } else { d };
            fd[b][a] = fd[a][b];
        }
    }
    let scale = analytic.max_abs().max(1e-12);
    let mut dev = 0.0f64;
    for a in 0..2 {
        for b in 0..2 {
            dev = dev.max((fd[a][b] - analytic.get(a, b)).abs());
        }
    }
    Ok(dev / scale)
}

/// Pushes a second Piola-Kirchhoff stress forward to Cauchy,
/// `sigma = J^-1 F S F*`.
pub fn cauchy_from_second_pk(
    s: &SymTensor3,
    f: &TwoPointMap3,
    g_ref: &Metric3,
    g_cur: &Metric3,
) -> SymTensor3 {
    f.push_forward_con(s).scale(1.0 / f.jacobian(g_ref, g_cur))
}
