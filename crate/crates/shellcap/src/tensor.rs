//! Dense symmetric 2x2/3x3 tensor algebra with explicit metric-dependent
//! index manipulation.
//!
//! Components are stored as small fixed-size arrays and carry an index
//! variance tag, so raising/lowering against a metric is always an explicit
//! operation. Determinants and inverses use closed-form cofactors; the
//! square root of a positive-spectrum mixed tensor uses the analytic
//! eigenvalues of its characteristic polynomial.
//!
//! All values are immutable after construction and all operations are pure,
//! so everything here is freely shared between threads.

use std::fmt;

/// Index variance of a rank-2 tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    /// Both indices down, (0,2).
    Covariant,
    /// Both indices up, (2,0).
    Contravariant,
    /// One index up, one down, (1,1).
    Mixed,
}

#[derive(Debug, Clone)]
pub enum TensorError {
    /// A leading principal minor failed the positive-definiteness threshold.
    NotPositiveDefinite { minor: usize, value: f64 },
    /// Spectral square root requested for a tensor with a non-positive eigenvalue.
    NonPositiveEigenvalue { value: f64 },
    /// A map that must be invertible has (near-)zero determinant.
    Singular { det: f64 },
    /// An operation received a tensor with the wrong variance tag.
    VarianceMismatch { expected: Variance, got: Variance },
}

impl fmt::Display for TensorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorError::NotPositiveDefinite { minor, value } => {
                write!(f, "not positive definite: leading minor {minor} = {value:e}")
            }
            TensorError::NonPositiveEigenvalue { value } => {
                write!(f, "non-positive eigenvalue {value:e} in spectral square root")
            }
            TensorError::Singular { det } => write!(f, "singular map: det = {det:e}"),
            TensorError::VarianceMismatch { expected, got } => {
                write!(f, "variance mismatch: expected {expected:?}, got {got:?}")
            }
        }
    }
}

impl std::error::Error for TensorError {}

/// Relative threshold for leading-minor positivity checks.
const SPD_TOL: f64 = 1e-14;

// ---------------------------------------------------------------------------
// closed-form matrix helpers
// ---------------------------------------------------------------------------

pub(crate) fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub(crate) fn inv3(m: &[[f64; 3]; 3]) -> Result<[[f64; 3]; 3], TensorError> {
    let d = det3(m);
    let scale = m.iter().flatten().fold(0.0f64, |a, &v| a.max(v.abs())).max(1.0);
    if d.abs() <= SPD_TOL * scale * scale * scale {
        return Err(TensorError::Singular { det: d });
    }
    let c = [
        [
            m[1][1] * m[2][2] - m[1][2] * m[2][1],
            m[0][2] * m[2][1] - m[0][1] * m[2][2],
            m[0][1] * m[1][2] - m[0][2] * m[1][1],
        ],
        [
            m[1][2] * m[2][0] - m[1][0] * m[2][2],
            m[0][0] * m[2][2] - m[0][2] * m[2][0],
            m[0][2] * m[1][0] - m[0][0] * m[1][2],
        ],
        [
            m[1][0] * m[2][1] - m[1][1] * m[2][0],
            m[0][1] * m[2][0] - m[0][0] * m[2][1],
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
        ],
    ];
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = c[i][j] / d;
        }
    }
    Ok(out)
}

pub(crate) fn mul3(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                s += a[i][k] * b[k][j];
            }
            out[i][j] = s;
        }
    }
    out
}

pub(crate) fn transpose3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[j][i];
        }
    }
    out
}

pub(crate) fn matvec3(m: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    }
    out
}

pub(crate) fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub(crate) fn inv2(m: &[[f64; 2]; 2]) -> Result<[[f64; 2]; 2], TensorError> {
    let d = det2(m);
    let scale = m.iter().flatten().fold(0.0f64, |a, &v| a.max(v.abs())).max(1.0);
    if d.abs() <= SPD_TOL * scale * scale {
        return Err(TensorError::Singular { det: d });
    }
    Ok([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
}

pub(crate) fn mul2(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn spd_check3(m: &[[f64; 3]; 3]) -> Result<(), TensorError> {
    let scale = m.iter().flatten().fold(0.0f64, |a, &v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let m1 = m[0][0];
    let m2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let m3 = det3(m);
    for (k, (v, s)) in [(m1, scale), (m2, scale * scale), (m3, scale * scale * scale)]
        .iter()
        .enumerate()
        .map(|(k, &(v, s))| (k, (v, s)))
    {
        if v <= SPD_TOL * s {
            return Err(TensorError::NotPositiveDefinite { minor: k + 1, value: v });
        }
    }
    Ok(())
}

fn spd_check2(m: &[[f64; 2]; 2]) -> Result<(), TensorError> {
    let scale = m.iter().flatten().fold(0.0f64, |a, &v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    if m[0][0] <= SPD_TOL * scale {
        return Err(TensorError::NotPositiveDefinite { minor: 1, value: m[0][0] });
    }
    let d = det2(m);
    if d <= SPD_TOL * scale * scale {
        return Err(TensorError::NotPositiveDefinite { minor: 2, value: d });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// symmetric tensors
// ---------------------------------------------------------------------------

/// A rank-2 tensor on a 3D chart with a variance tag.
///
/// Covariant and contravariant tensors are symmetric by construction; mixed
/// tensors (produced by raising one index) are generally not symmetric as a
/// component matrix and are stored in full.
#[derive(Debug, Clone, Copy)]
pub struct SymTensor3 {
    m: [[f64; 3]; 3],
    var: Variance,
}

impl SymTensor3 {
    /// Builds a symmetric tensor from its upper-triangle components
    /// `(t11, t12, t13, t22, t23, t33)`.
    pub fn from_sym(c: [f64; 6], var: Variance) -> Self {
        assert!(var != Variance::Mixed, "mixed tensors are built with from_mixed");
        Self {
            m: [
                [c[0], c[1], c[2]],
                [c[1], c[3], c[4]],
                [c[2], c[4], c[5]],
            ],
            var,
        }
    }

    pub fn from_diag(d: [f64; 3], var: Variance) -> Self {
        Self::from_sym([d[0], 0.0, 0.0, d[1], 0.0, d[2]], var)
    }

    /// Builds a mixed (1,1) tensor from its full component matrix `t^A_B`.
    pub fn from_mixed(m: [[f64; 3]; 3]) -> Self {
        Self { m, var: Variance::Mixed }
    }

    pub fn identity(var: Variance) -> Self {
        Self {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            var,
        }
    }

    pub fn variance(&self) -> Variance {
        self.var
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.m[a][b]
    }

    pub fn components(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn det(&self) -> f64 {
        det3(&self.m)
    }

    /// Plain component trace; meaningful for mixed tensors.
    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    /// Full contraction with another tensor of opposite variance,
    /// e.g. `b^{ab} g_{ab}`.
    pub fn contract(&self, other: &SymTensor3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.m[i][j] * other.m[i][j];
            }
        }
        s
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut m = self.m;
        for row in &mut m {
            for v in row {
                *v *= k;
            }
        }
        Self { m, var: self.var }
    }

    pub fn add(&self, other: &SymTensor3) -> Self {
        debug_assert_eq!(self.var, other.var);
        let mut m = self.m;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += other.m[i][j];
            }
        }
        Self { m, var: self.var }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    /// Component-matrix inverse with the dual variance: the inverse of a
    /// (0,2) strain is its (2,0) counterpart (`B = C^-1`), and vice versa;
    /// mixed tensors invert in place.
    pub fn inverse(&self) -> Result<SymTensor3, TensorError> {
        let inv = inv3(&self.m)?;
        let var = match self.var {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
            Variance::Mixed => Variance::Mixed,
        };
        Ok(match var {
            Variance::Mixed => SymTensor3::from_mixed(inv),
            v => SymTensor3::symmetrized(inv, v),
        })
    }

    fn symmetrized(m: [[f64; 3]; 3], var: Variance) -> Self {
        let mut s = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                s[i][j] = 0.5 * (m[i][j] + m[j][i]);
            }
        }
        Self { m: s, var }
    }
}

/// A rank-2 tensor on a 2D chart with a variance tag.
#[derive(Debug, Clone, Copy)]
pub struct SymTensor2 {
    m: [[f64; 2]; 2],
    var: Variance,
}

impl SymTensor2 {
    /// Builds a symmetric tensor from `(t11, t12, t22)`.
    pub fn from_sym(c: [f64; 3], var: Variance) -> Self {
        assert!(var != Variance::Mixed, "mixed tensors are built with from_mixed");
        Self { m: [[c[0], c[1]], [c[1], c[2]]], var }
    }

    pub fn from_diag(d: [f64; 2], var: Variance) -> Self {
        Self::from_sym([d[0], 0.0, d[1]], var)
    }

    pub fn from_mixed(m: [[f64; 2]; 2]) -> Self {
        Self { m, var: Variance::Mixed }
    }

    pub fn identity(var: Variance) -> Self {
        Self { m: [[1.0, 0.0], [0.0, 1.0]], var }
    }

    pub fn variance(&self) -> Variance {
        self.var
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.m[a][b]
    }

    pub fn components(&self) -> &[[f64; 2]; 2] {
        &self.m
    }

    pub fn det(&self) -> f64 {
        det2(&self.m)
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn contract(&self, other: &SymTensor2) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += self.m[i][j] * other.m[i][j];
            }
        }
        s
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut m = self.m;
        for row in &mut m {
            for v in row {
                *v *= k;
            }
        }
        Self { m, var: self.var }
    }

    pub fn add(&self, other: &SymTensor2) -> Self {
        debug_assert_eq!(self.var, other.var);
        let mut m = self.m;
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += other.m[i][j];
            }
        }
        Self { m, var: self.var }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    /// 2x2 analogue of [`SymTensor3::inverse`].
    pub fn inverse(&self) -> Result<SymTensor2, TensorError> {
        let inv = inv2(&self.m)?;
        let var = match self.var {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
            Variance::Mixed => Variance::Mixed,
        };
        Ok(match var {
            Variance::Mixed => SymTensor2::from_mixed(inv),
            v => SymTensor2::symmetrized(inv, v),
        })
    }

    fn symmetrized(m: [[f64; 2]; 2], var: Variance) -> Self {
        Self {
            m: [
                [m[0][0], 0.5 * (m[0][1] + m[1][0])],
                [0.5 * (m[0][1] + m[1][0]), m[1][1]],
            ],
            var,
        }
    }
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

/// A symmetric positive-definite metric on a 3D chart with cached inverse
/// and determinant. Construction rejects non-SPD input via leading minors.
#[derive(Debug, Clone, Copy)]
pub struct Metric3 {
    cov: [[f64; 3]; 3],
    inv: [[f64; 3]; 3],
    det: f64,
}

impl Metric3 {
    pub fn new(c: [f64; 6]) -> Result<Self, TensorError> {
        let m = SymTensor3::from_sym(c, Variance::Covariant).m;
        spd_check3(&m)?;
        let inv = inv3(&m)?;
        Ok(Self { cov: m, inv, det: det3(&m) })
    }

    pub fn from_diag(d: [f64; 3]) -> Result<Self, TensorError> {
        Self::new([d[0], 0.0, 0.0, d[1], 0.0, d[2]])
    }

    pub fn identity() -> Self {
        Self {
            cov: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            inv: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            det: 1.0,
        }
    }

    /// Uniform conformal scaling `k * G` (k > 0).
    pub fn scaled(&self, k: f64) -> Result<Self, TensorError> {
        if k <= 0.0 {
            return Err(TensorError::NotPositiveDefinite { minor: 1, value: k });
        }
        let mut cov = self.cov;
        let mut inv = self.inv;
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] *= k;
                inv[i][j] /= k;
            }
        }
        Ok(Self { cov, inv, det: self.det * k * k * k })
    }

    pub fn covariant(&self) -> SymTensor3 {
        SymTensor3 { m: self.cov, var: Variance::Covariant }
    }

    pub fn inverse(&self) -> SymTensor3 {
        SymTensor3 { m: self.inv, var: Variance::Contravariant }
    }

    pub fn cov_components(&self) -> &[[f64; 3]; 3] {
        &self.cov
    }

    pub fn inv_components(&self) -> &[[f64; 3]; 3] {
        &self.inv
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// Lowers a vector index: `v_A = G_AB v^B`.
    pub fn lower_vec(&self, v: &[f64; 3]) -> [f64; 3] {
        matvec3(&self.cov, v)
    }

    /// Raises a covector index: `v^A = G^AB v_B`.
    pub fn raise_vec(&self, v: &[f64; 3]) -> [f64; 3] {
        matvec3(&self.inv, v)
    }

    /// Inner product of two vectors in this metric.
    pub fn dot(&self, u: &[f64; 3], v: &[f64; 3]) -> f64 {
        let lu = self.lower_vec(u);
        lu[0] * v[0] + lu[1] * v[1] + lu[2] * v[2]
    }

    pub fn norm(&self, v: &[f64; 3]) -> f64 {
        self.dot(v, v).sqrt()
    }
}

/// A symmetric positive-definite metric on a 2D chart.
#[derive(Debug, Clone, Copy)]
pub struct Metric2 {
    cov: [[f64; 2]; 2],
    inv: [[f64; 2]; 2],
    det: f64,
}

impl Metric2 {
    pub fn new(c: [f64; 3]) -> Result<Self, TensorError> {
        let m = SymTensor2::from_sym(c, Variance::Covariant).m;
        spd_check2(&m)?;
        let inv = inv2(&m)?;
        Ok(Self { cov: m, inv, det: det2(&m) })
    }

    pub fn from_diag(d: [f64; 2]) -> Result<Self, TensorError> {
        Self::new([d[0], 0.0, d[1]])
    }

    pub fn identity() -> Self {
        Self {
            cov: [[1.0, 0.0], [0.0, 1.0]],
            inv: [[1.0, 0.0], [0.0, 1.0]],
            det: 1.0,
        }
    }

    pub fn scaled(&self, k: f64) -> Result<Self, TensorError> {
        if k <= 0.0 {
            return Err(TensorError::NotPositiveDefinite { minor: 1, value: k });
        }
        let mut cov = self.cov;
        let mut inv = self.inv;
        for i in 0..2 {
            for j in 0..2 {
                cov[i][j] *= k;
                inv[i][j] /= k;
            }
        }
        Ok(Self { cov, inv, det: self.det * k * k })
    }

    pub fn covariant(&self) -> SymTensor2 {
        SymTensor2 { m: self.cov, var: Variance::Covariant }
    }

    pub fn inverse(&self) -> SymTensor2 {
        SymTensor2 { m: self.inv, var: Variance::Contravariant }
    }

    pub fn cov_components(&self) -> &[[f64; 2]; 2] {
        &self.cov
    }

    pub fn inv_components(&self) -> &[[f64; 2]; 2] {
        &self.inv
    }

    pub fn det(&self) -> f64 {
        self.det
    }
}

// ---------------------------------------------------------------------------
// index manipulation
// ---------------------------------------------------------------------------

/// Raises one index against `m`: a (0,2) tensor becomes (1,1) via
/// `t^A_B = G^AM t_MB`; applying again to the (1,1) result yields (2,0).
pub fn raise_index(t: &SymTensor3, m: &Metric3) -> Result<SymTensor3, TensorError> {
    match t.var {
        Variance::Covariant => Ok(SymTensor3::from_mixed(mul3(&m.inv, &t.m))),
        Variance::Mixed => Ok(SymTensor3::symmetrized(
            mul3(&t.m, &m.inv),
            Variance::Contravariant,
        )),
        Variance::Contravariant => Err(TensorError::VarianceMismatch {
            expected: Variance::Covariant,
            got: t.var,
        }),
    }
}

/// Lowers one index against `m`; inverse of [`raise_index`].
pub fn lower_index(t: &SymTensor3, m: &Metric3) -> Result<SymTensor3, TensorError> {
    match t.var {
        Variance::Contravariant => Ok(SymTensor3::from_mixed(mul3(&t.m, &m.cov))),
        Variance::Mixed => Ok(SymTensor3::symmetrized(
            mul3(&m.cov, &t.m),
            Variance::Covariant,
        )),
        Variance::Covariant => Err(TensorError::VarianceMismatch {
            expected: Variance::Contravariant,
            got: t.var,
        }),
    }
}

pub fn raise_index2(t: &SymTensor2, m: &Metric2) -> Result<SymTensor2, TensorError> {
    match t.var {
        Variance::Covariant => Ok(SymTensor2::from_mixed(mul2(&m.inv, &t.m))),
        Variance::Mixed => Ok(SymTensor2::symmetrized(
            mul2(&t.m, &m.inv),
            Variance::Contravariant,
        )),
        Variance::Contravariant => Err(TensorError::VarianceMismatch {
            expected: Variance::Covariant,
            got: t.var,
        }),
    }
}

pub fn lower_index2(t: &SymTensor2, m: &Metric2) -> Result<SymTensor2, TensorError> {
    match t.var {
        Variance::Contravariant => Ok(SymTensor2::from_mixed(mul2(&t.m, &m.cov))),
        Variance::Mixed => Ok(SymTensor2::symmetrized(
            mul2(&m.cov, &t.m),
            Variance::Covariant,
        )),
        Variance::Covariant => Err(TensorError::VarianceMismatch {
            expected: Variance::Contravariant,
            got: t.var,
        }),
    }
}

// ---------------------------------------------------------------------------
// invariants
// ---------------------------------------------------------------------------

/// Principal invariants of a covariant strain `C` against the metric `G`:
/// `I1 = C_AB G^AB`, `I2 = (I1^2 - tr((G^-1 C)^2)) / 2`, `I3 = det C / det G`.
pub fn principal_invariants(c: &SymTensor3, g: &Metric3) -> Result<(f64, f64, f64), TensorError> {
    if c.var != Variance::Covariant {
        return Err(TensorError::VarianceMismatch {
            expected: Variance::Covariant,
            got: c.var,
        });
    }
    spd_check3(&c.m)?;
    let mixed = mul3(&g.inv, &c.m);
    let i1 = mixed[0][0] + mixed[1][1] + mixed[2][2];
    let sq = mul3(&mixed, &mixed);
    let tr_sq = sq[0][0] + sq[1][1] + sq[2][2];
    let i2 = 0.5 * (i1 * i1 - tr_sq);
    let i3 = det3(&c.m) / g.det;
    Ok((i1, i2, i3))
}

/// Surface principal invariants: `I1 = C_AB G^AB`, `I2 = det C / det G`.
/// The second invariant equals the squared surface Jacobian.
pub fn surface_invariants(c: &SymTensor2, g: &Metric2) -> Result<(f64, f64), TensorError> {
    if c.var != Variance::Covariant {
        return Err(TensorError::VarianceMismatch {
            expected: Variance::Covariant,
            got: c.var,
        });
    }
    spd_check2(&c.m)?;
    let mixed = mul2(&g.inv, &c.m);
    let i1 = mixed[0][0] + mixed[1][1];
    let i2 = det2(&c.m) / g.det;
    Ok((i1, i2))
}

/// Anisotropy invariants for a fiber direction `n` (unit in `G`):
/// `I4 = N^A N^B C_AB`, `I5 = N^A N^B C_BM C^M_A`.
pub fn fiber_invariants(c: &SymTensor3, g: &Metric3, n: &[f64; 3]) -> (f64, f64) {
    let cn = matvec3(&c.m, n); // (C N)_A
    let i4 = n[0] * cn[0] + n[1] * cn[1] + n[2] * cn[2];
    let cn_up = matvec3(&g.inv, &cn); // C^A_B N^B
    let ccn = matvec3(&c.m, &cn_up);
    let i5 = n[0] * ccn[0] + n[1] * ccn[1] + n[2] * ccn[2];
    (i4, i5)
}

// ---------------------------------------------------------------------------
// spectral square root
// ---------------------------------------------------------------------------

/// Real roots of `x^3 - i1 x^2 + i2 x - i3 = 0`, ascending. Uses the
/// trigonometric solution with a clamped arccos for stability. Suitable for
/// the characteristic polynomial of a diagonalizable matrix with a real
/// spectrum (e.g. products of SPD matrices).
pub(crate) fn char_cubic_roots(i1: f64, i2: f64, i3: f64) -> [f64; 3] {
    let s = i1 / 3.0;
    let p = i2 - i1 * i1 / 3.0;
    let q = -2.0 * i1 * i1 * i1 / 27.0 + i1 * i2 / 3.0 - i3;
    let scale = i1.abs().max(i2.abs().sqrt()).max(i3.abs().cbrt()).max(1.0);
    if -p <= 1e-14 * scale * scale {
        // near-triple root
        let t = (-q).cbrt();
        let mut r = [t + s; 3];
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return r;
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (-4.0 * q / (m * m * m)).clamp(-1.0, 1.0);
    let theta = arg.acos();
    let mut r = [
        m * (theta / 3.0).cos() + s,
        m * ((theta - 2.0 * std::f64::consts::PI) / 3.0).cos() + s,
        m * ((theta - 4.0 * std::f64::consts::PI) / 3.0).cos() + s,
    ];
    r.sort_by(|a, b| a.partial_cmp(b).unwrap());
    r
}

/// Spectral square root of a mixed (1,1) tensor with positive real
/// eigenvalues, e.g. `C = G^-1 C_flat` with both factors SPD.
///
/// Eigenvalues come from the analytic characteristic cubic; the root is then
/// assembled through the Cayley-Hamilton identity
/// `B (A + II_B I) = I_B A + III_B I` with `B = sqrt(A)`, which is exact for
/// repeated eigenvalues and needs no eigenvectors. Two commuting Newton
/// steps polish the result to machine precision.
pub fn spd_sqrt(t: &SymTensor3) -> Result<SymTensor3, TensorError> {
    if t.var != Variance::Mixed {
        return Err(TensorError::VarianceMismatch {
            expected: Variance::Mixed,
            got: t.var,
        });
    }
    let a = &t.m;
    let i1 = a[0][0] + a[1][1] + a[2][2];
    let sq = mul3(a, a);
    let i2 = 0.5 * (i1 * i1 - (sq[0][0] + sq[1][1] + sq[2][2]));
    let i3 = det3(a);
    let eig = char_cubic_roots(i1, i2, i3);
    let scale = eig[2].abs().max(1e-300);
    for &l in &eig {
        if l <= 1e-14 * scale {
            return Err(TensorError::NonPositiveEigenvalue { value: l });
        }
    }
    let (s1, s2, s3) = (eig[0].sqrt(), eig[1].sqrt(), eig[2].sqrt());
    let b1 = s1 + s2 + s3;
    let b2 = s1 * s2 + s2 * s3 + s3 * s1;
    let b3 = s1 * s2 * s3;
    // B = (i1_B * A + iii_B * I) (A + ii_B * I)^-1
    let mut lhs = *a;
    for (i, row) in lhs.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v *= b1;
            if i == j {
                *v += b3;
            }
        }
    }
    let mut rhs = *a;
    for (i, row) in rhs.iter_mut().enumerate() {
        row[i] += b2;
    }
    let mut b = mul3(&lhs, &inv3(&rhs)?);
    // Newton polish: B <- (B + A B^-1) / 2, valid since B commutes with A.
    for _ in 0..2 {
        let binv = inv3(&b)?;
        let ab = mul3(a, &binv);
        for i in 0..3 {
            for j in 0..3 {
                b[i][j] = 0.5 * (b[i][j] + ab[i][j]);
            }
        }
    }
    Ok(SymTensor3::from_mixed(b))
}

/// 2x2 analogue of [`spd_sqrt`]: `sqrt(A) = (A + sqrt(det A) I) / sqrt(tr A + 2 sqrt(det A))`.
pub fn spd_sqrt2(t: &SymTensor2) -> Result<SymTensor2, TensorError> {
    if t.var != Variance::Mixed {
        return Err(TensorError::VarianceMismatch {
            expected: Variance::Mixed,
            got: t.var,
        });
    }
    let a = &t.m;
    let d = det2(a);
    let tr = a[0][0] + a[1][1];
    if d <= 0.0 || tr <= 0.0 {
        return Err(TensorError::NonPositiveEigenvalue { value: if d <= 0.0 { d } else { tr } });
    }
    let sd = d.sqrt();
    let denom = (tr + 2.0 * sd).sqrt();
    let mut b = *a;
    for (i, row) in b.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i == j {
                *v += sd;
            }
            *v /= denom;
        }
    }
    Ok(SymTensor2::from_mixed(b))
}

// ---------------------------------------------------------------------------
// two-point maps
// ---------------------------------------------------------------------------

/// A 3x3 two-point tensor `F^a_A` between labelled charts (deformation
/// gradients, rotations, traction maps).
#[derive(Debug, Clone, Copy)]
pub struct TwoPointMap3 {
    m: [[f64; 3]; 3],
    pub source: &'static str,
    pub target: &'static str,
}

impl TwoPointMap3 {
    pub fn new(m: [[f64; 3]; 3], source: &'static str, target: &'static str) -> Self {
        Self { m, source, target }
    }

    pub fn from_diag(d: [f64; 3]) -> Self {
        Self {
            m: [[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]],
            source: "reference",
            target: "current",
        }
    }

    pub fn identity() -> Self {
        Self::from_diag([1.0, 1.0, 1.0])
    }

    pub fn components(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.m[a][b]
    }

    pub fn det(&self) -> f64 {
        det3(&self.m)
    }

    pub fn inverse(&self) -> Result<TwoPointMap3, TensorError> {
        Ok(Self { m: inv3(&self.m)?, source: self.target, target: self.source })
    }

    pub fn apply(&self, v: &[f64; 3]) -> [f64; 3] {
        matvec3(&self.m, v)
    }

    /// Jacobian against explicit metrics: `J = sqrt(det g / det G) det F`.
    pub fn jacobian(&self, g_ref: &Metric3, g_cur: &Metric3) -> f64 {
        (g_cur.det / g_ref.det).sqrt() * self.det()
    }

    /// Pulled-back metric `C_AB = F^a_A g_ab F^b_B`.
    pub fn pull_back_metric(&self, g_cur: &Metric3) -> SymTensor3 {
        let t = mul3(&transpose3(&self.m), &mul3(&g_cur.cov, &self.m));
        SymTensor3::symmetrized(t, Variance::Covariant)
    }

    /// Push-forward of a contravariant tensor: `(F S F*)^{ab} = F^a_A S^AB F^b_B`.
    pub fn push_forward_con(&self, s: &SymTensor3) -> SymTensor3 {
        let t = mul3(&self.m, &mul3(&s.m, &transpose3(&self.m)));
        SymTensor3::symmetrized(t, Variance::Contravariant)
    }

    /// Push-forward of the inverse reference metric: `b^{ab} = F^a_A G^AB F^b_B`.
    pub fn finger_tensor(&self, g_ref: &Metric3) -> SymTensor3 {
        self.push_forward_con(&g_ref.inverse())
    }

    /// Spatial strain `c^{ab} = g^{ac} c_cd g^{db}` with `c_ab = F^-A_a G_AB F^-B_b`.
    pub fn spatial_strain_con(&self, g_ref: &Metric3, g_cur: &Metric3) -> Result<SymTensor3, TensorError> {
        let finv = inv3(&self.m)?;
        let c_cov = mul3(&transpose3(&finv), &mul3(&g_ref.cov, &finv));
        let c_con = mul3(&g_cur.inv, &mul3(&c_cov, &g_cur.inv));
        Ok(SymTensor3::symmetrized(c_con, Variance::Contravariant))
    }
}

/// A 2x2 two-point tensor between surface charts.
#[derive(Debug, Clone, Copy)]
pub struct TwoPointMap2 {
    m: [[f64; 2]; 2],
    pub source: &'static str,
    pub target: &'static str,
}

impl TwoPointMap2 {
    pub fn new(m: [[f64; 2]; 2], source: &'static str, target: &'static str) -> Self {
        Self { m, source, target }
    }

    pub fn from_diag(d: [f64; 2]) -> Self {
        Self {
            m: [[d[0], 0.0], [0.0, d[1]]],
            source: "reference-surface",
            target: "current-surface",
        }
    }

    pub fn identity() -> Self {
        Self::from_diag([1.0, 1.0])
    }

    pub fn components(&self) -> &[[f64; 2]; 2] {
        &self.m
    }

    pub fn det(&self) -> f64 {
        det2(&self.m)
    }

    pub fn jacobian(&self, g_ref: &Metric2, g_cur: &Metric2) -> f64 {
        (g_cur.det / g_ref.det).sqrt() * self.det()
    }

    pub fn pull_back_metric(&self, g_cur: &Metric2) -> SymTensor2 {
        let ft = [[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]];
        let t = mul2(&ft, &mul2(&g_cur.cov, &self.m));
        SymTensor2::symmetrized(t, Variance::Covariant)
    }

    pub fn push_forward_con(&self, s: &SymTensor2) -> SymTensor2 {
        let ft = [[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]];
        let t = mul2(&self.m, &mul2(&s.m, &ft));
        SymTensor2::symmetrized(t, Variance::Contravariant)
    }

    pub fn finger_tensor(&self, g_ref: &Metric2) -> SymTensor2 {
        self.push_forward_con(&g_ref.inverse())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn splitmix(state: &mut u64) -> f64 {
        *state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64
    }

    fn random_spd3(state: &mut u64) -> [f64; 6] {
        // A^T A + I stays well conditioned
        let mut a = [[0.0; 3]; 3];
        for row in &mut a {
            for v in row.iter_mut() {
                *v = 2.0 * splitmix(state) - 1.0;
            }
        }
        let ata = mul3(&transpose3(&a), &a);
        [
            ata[0][0] + 1.0,
            ata[0][1],
            ata[0][2],
            ata[1][1] + 1.0,
            ata[1][2],
            ata[2][2] + 1.0,
        ]
    }

    #[test]
    fn raise_identity_is_identity() {
        let t = SymTensor3::identity(Variance::Covariant);
        let m = Metric3::identity();
        let r = raise_index(&t, &m).unwrap();
        assert_eq!(r.variance(), Variance::Mixed);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((r.get(i, j) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn raise_diag_formula() {
        // t = diag(4,1,1) cov, m = diag(2,1,1) -> mixed diag(2,1,1)
        let t = SymTensor3::from_diag([4.0, 1.0, 1.0], Variance::Covariant);
        let m = Metric3::from_diag([2.0, 1.0, 1.0]).unwrap();
        let r = raise_index(&t, &m).unwrap();
        assert!((r.get(0, 0) - 2.0).abs() < 1e-15);
        assert!((r.get(1, 1) - 1.0).abs() < 1e-15);
        assert!((r.get(2, 2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn raise_lower_round_trip() {
        let mut st = 7u64;
        for _ in 0..50 {
            let t = SymTensor3::from_sym(random_spd3(&mut st), Variance::Covariant);
            let m = Metric3::new(random_spd3(&mut st)).unwrap();
            let up = raise_index(&raise_index(&t, &m).unwrap(), &m).unwrap();
            assert_eq!(up.variance(), Variance::Contravariant);
            let back = lower_index(&lower_index(&up, &m).unwrap(), &m).unwrap();
            let scale = t.max_abs();
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        (back.get(i, j) - t.get(i, j)).abs() < 1e-14 * scale,
                        "round trip drift at ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn raise_on_contravariant_rejected() {
        let t = SymTensor3::identity(Variance::Contravariant);
        assert!(matches!(
            raise_index(&t, &Metric3::identity()),
            Err(TensorError::VarianceMismatch { .. })
        ));
    }

    #[test]
    fn non_spd_metric_rejected() {
        assert!(Metric3::from_diag([1.0, -1.0, 1.0]).is_err());
        assert!(Metric3::new([1.0, 2.0, 0.0, 1.0, 0.0, 1.0]).is_err()); // minor2 < 0
        assert!(Metric2::from_diag([0.0, 1.0]).is_err());
    }

    #[test]
    fn metric_inverse_consistency() {
        let mut st = 13u64;
        for _ in 0..50 {
            let g = Metric3::new(random_spd3(&mut st)).unwrap();
            let prod = mul3(g.cov_components(), g.inv_components());
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((prod[i][j] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn invariants_at_identity_strain() {
        let mut st = 21u64;
        for _ in 0..20 {
            let g = Metric3::new(random_spd3(&mut st)).unwrap();
            let c = g.covariant();
            let (i1, i2, i3) = principal_invariants(&c, &g).unwrap();
            assert!((i1 - 3.0).abs() < 1e-12);
            assert!((i2 - 3.0).abs() < 1e-12);
            assert!((i3 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn invariants_diag_eigenvalue_oracle() {
        // C = diag(4,1,1), G = I: eigenvalues {4,1,1}
        let c = SymTensor3::from_diag([4.0, 1.0, 1.0], Variance::Covariant);
        let (i1, i2, i3) = principal_invariants(&c, &Metric3::identity()).unwrap();
        assert!((i1 - 6.0).abs() < 1e-14);
        assert!((i2 - 9.0).abs() < 1e-14);
        assert!((i3 - 4.0).abs() < 1e-14);
    }

    #[test]
    fn invariants_conformal_scaling() {
        let mut st = 3u64;
        let g = Metric3::new(random_spd3(&mut st)).unwrap();
        let lam2 = 1.7;
        let c = g.covariant().scale(lam2);
        let (i1, i2, i3) = principal_invariants(&c, &g).unwrap();
        assert!((i1 - 3.0 * lam2).abs() < 1e-12);
        assert!((i2 - 3.0 * lam2 * lam2).abs() < 1e-11);
        assert!((i3 - lam2 * lam2 * lam2).abs() < 1e-12);
    }

    #[test]
    fn invariants_congruence_invariance() {
        // C -> M^T C M, G -> M^T G M leaves invariants unchanged
        let mut st = 99u64;
        for _ in 0..50 {
            let c = SymTensor3::from_sym(random_spd3(&mut st), Variance::Covariant);
            let g = Metric3::new(random_spd3(&mut st)).unwrap();
            let mut m = [[0.0; 3]; 3];
            for row in &mut m {
                for v in row.iter_mut() {
                    *v = 2.0 * splitmix(&mut st) - 1.0;
                }
            }
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += 2.0; // keep invertible
            }
            let congr = |t: &[[f64; 3]; 3]| mul3(&transpose3(&m), &mul3(t, &m));
            let c2 = SymTensor3::symmetrized(congr(c.components()), Variance::Covariant);
            let g2m = congr(g.cov_components());
            let g2 = Metric3::new([
                g2m[0][0], g2m[0][1], g2m[0][2], g2m[1][1], g2m[1][2], g2m[2][2],
            ])
            .unwrap();
            let (a1, a2, a3) = principal_invariants(&c, &g).unwrap();
            let (b1, b2, b3) = principal_invariants(&c2, &g2).unwrap();
            assert!((a1 - b1).abs() < 1e-10 * a1.abs().max(1.0));
            assert!((a2 - b2).abs() < 1e-10 * a2.abs().max(1.0));
            assert!((a3 - b3).abs() < 1e-10 * a3.abs().max(1.0));
        }
    }

    // I2(C,G) = I1(C^-1 in the G sense) * I3, via a Jacobi eigenvalue oracle.
    #[test]
    fn second_invariant_eigenvalue_relation() {
        fn jacobi_eigs(mut a: [[f64; 3]; 3]) -> [f64; 3] {
            for _ in 0..100 {
                let mut p = 0;
                let mut q = 1;
                let mut off = 0.0;
                for i in 0..3 {
                    for j in (i + 1)..3 {
                        if a[i][j].abs() > off {
                            off = a[i][j].abs();
                            p = i;
                            q = j;
                        }
                    }
                }
                if off < 1e-14 {
                    break;
                }
                let theta = 0.5 * (2.0 * a[p][q]).atan2(a[p][p] - a[q][q]);
                let (c, s) = (theta.cos(), theta.sin());
                let k = 3 - p - q;
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp + s * akq;
                a[p][k] = a[k][p];
                a[k][q] = -s * akp + c * akq;
                a[q][k] = a[k][q];
                let (app, aqq, apq) = (a[p][p], a[q][q], a[p][q]);
                a[p][p] = c * c * app + 2.0 * s * c * apq + s * s * aqq;
                a[q][q] = s * s * app - 2.0 * s * c * apq + c * c * aqq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
            }
            let mut e = [a[0][0], a[1][1], a[2][2]];
            e.sort_by(|x, y| x.partial_cmp(y).unwrap());
            e
        }

        let mut st = 17u64;
        for _ in 0..100 {
            let c = SymTensor3::from_sym(random_spd3(&mut st), Variance::Covariant);
            let g = Metric3::new(random_spd3(&mut st)).unwrap();
            let (_, i2, i3) = principal_invariants(&c, &g).unwrap();
            // eigenvalues of G^-1 C via the symmetric reduction L^-1 C L^-T, G = L L^T
            let gm = g.cov_components();
            let l11 = gm[0][0].sqrt();
            let l21 = gm[0][1] / l11;
            let l31 = gm[0][2] / l11;
            let l22 = (gm[1][1] - l21 * l21).sqrt();
            let l32 = (gm[1][2] - l21 * l31) / l22;
            let l33 = (gm[2][2] - l31 * l31 - l32 * l32).sqrt();
            let l = [[l11, 0.0, 0.0], [l21, l22, 0.0], [l31, l32, l33]];
            let linv = inv3(&l).unwrap();
            let sym = mul3(&linv, &mul3(c.components(), &transpose3(&linv)));
            let eig = jacobi_eigs(sym);
            let i2_oracle = eig[0] * eig[1] + eig[1] * eig[2] + eig[2] * eig[0];
            assert!(
                (i2 - i2_oracle).abs() < 1e-9 * i2.abs().max(1.0),
                "I2 {} vs oracle {}",
                i2,
                i2_oracle
            );
            // same relation through I1 of the inverse strain
            let i1_inv = eig.iter().map(|l| 1.0 / l).sum::<f64>();
            assert!((i2 - i1_inv * i3).abs() < 1e-9 * i2.abs().max(1.0));
        }
    }

    #[test]
    fn surface_invariants_identity_and_scaling() {
        // identity strain gives (2, 1) exactly: same determinant bits divided
        let g = Metric2::new([2.0, 0.3, 1.0]).unwrap();
        let (i1, i2) = surface_invariants(&g.covariant(), &g).unwrap();
        assert_eq!(i1, 2.0);
        assert_eq!(i2, 1.0);
        let lam2 = 2.3;
        let (j1, j2) = surface_invariants(&g.covariant().scale(lam2), &g).unwrap();
        assert!((j1 - 2.0 * lam2).abs() < 1e-14);
        assert!((j2 - lam2 * lam2).abs() < 1e-14);
    }

    #[test]
    fn surface_invariants_sphere_eigenstrain_values() {
        // relaxed-state check: x = 1.2, surface eigenstrain 0.1
        let x = 1.2f64;
        let om = 0.1f64;
        let g_mat = Metric2::from_diag([(-2.0 * om).exp(), (-2.0 * om).exp() * 0.25]).unwrap();
        let c = SymTensor2::from_diag([x * x, x * x * 0.25], Variance::Covariant);
        let (i1, i2) = surface_invariants(&c, &g_mat).unwrap();
        assert!((i1 - 3.51763994350128906).abs() < 1e-13);
        assert!((i2 - 3.09344769302893807).abs() < 1e-13);
    }

    #[test]
    fn sqrt_identity_and_diagonal() {
        let i = SymTensor3::identity(Variance::Mixed);
        let r = spd_sqrt(&i).unwrap();
        for k in 0..3 {
            assert!((r.get(k, k) - 1.0).abs() < 1e-14);
        }
        let d = SymTensor3::from_mixed([[4.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 9.0]]);
        let r = spd_sqrt(&d).unwrap();
        assert!((r.get(0, 0) - 2.0).abs() < 1e-13);
        assert!((r.get(1, 1) - 1.0).abs() < 1e-13);
        assert!((r.get(2, 2) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn sqrt_squares_back_to_input() {
        let mut st = 41u64;
        for _ in 0..100 {
            let c = SymTensor3::from_sym(random_spd3(&mut st), Variance::Covariant);
            let g = Metric3::new(random_spd3(&mut st)).unwrap();
            let mixed = raise_index(&c, &g).unwrap();
            let u = spd_sqrt(&mixed).unwrap();
            let u2 = mul3(u.components(), u.components());
            let scale = mixed.max_abs();
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        (u2[i][j] - mixed.get(i, j)).abs() < 1e-10 * scale,
                        "sqrt drift {} at ({i},{j})",
                        (u2[i][j] - mixed.get(i, j)).abs() / scale
                    );
                }
            }
        }
    }

    #[test]
    fn sqrt_rejects_negative_spectrum() {
        let d = SymTensor3::from_mixed([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(spd_sqrt(&d), Err(TensorError::NonPositiveEigenvalue { .. })));
    }

    #[test]
    fn sqrt2_diagonal_and_square() {
        let d = SymTensor2::from_mixed([[4.0, 0.0], [0.0, 9.0]]);
        let r = spd_sqrt2(&d).unwrap();
        assert!((r.get(0, 0) - 2.0).abs() < 1e-14);
        assert!((r.get(1, 1) - 3.0).abs() < 1e-14);
        let a = SymTensor2::from_mixed([[2.0, 0.7], [0.4, 1.5]]);
        let r = spd_sqrt2(&a).unwrap();
        let r2 = mul2(r.components(), r.components());
        for i in 0..2 {
            for j in 0..2 {
                assert!((r2[i][j] - a.get(i, j)).abs() < 1e-12);
            }
        }
        assert!(matches!(
            spd_sqrt2(&SymTensor2::from_mixed([[-1.0, 0.0], [0.0, 2.0]])),
            Err(TensorError::NonPositiveEigenvalue { .. })
        ));
    }

    #[test]
    fn mixed_trace_matches_metric_trace() {
        let mut st = 55u64;
        for _ in 0..20 {
            let t = SymTensor3::from_sym(random_spd3(&mut st), Variance::Covariant);
            let g = Metric3::new(random_spd3(&mut st)).unwrap();
            let mixed = raise_index(&t, &g).unwrap();
            let metric_trace = t.contract(&g.inverse());
            assert!((mixed.trace() - metric_trace).abs() < 1e-12 * metric_trace.abs().max(1.0));
        }
    }

    #[test]
    fn two_point_map_jacobian_and_pullback() {
        let f = TwoPointMap3::from_diag([2.0, 1.0, 1.0]);
        let g = Metric3::identity();
        assert!((f.jacobian(&g, &g) - 2.0).abs() < 1e-15);
        let c = f.pull_back_metric(&g);
        assert!((c.get(0, 0) - 4.0).abs() < 1e-15);
        assert!((c.get(1, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn strain_inverse_flips_variance() {
        let mut st = 29u64;
        for _ in 0..20 {
            let c = SymTensor3::from_sym(random_spd3(&mut st), Variance::Covariant);
            let b = c.inverse().unwrap();
            assert_eq!(b.variance(), Variance::Contravariant);
            let prod = mul3(b.components(), c.components());
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((prod[i][j] - want).abs() < 1e-12);
                }
            }
        }
        let c2 = SymTensor2::from_sym([2.0, 0.3, 1.5], Variance::Covariant);
        assert_eq!(c2.inverse().unwrap().variance(), Variance::Contravariant);
    }

    // polar decomposition through the spectral square root: R = F U^-1 is
    // (G, g)-orthogonal, i.e. R* g R = G
    #[test]
    fn polar_rotation_is_metric_orthogonal() {
        let mut st = 71u64;
        for _ in 0..30 {
            let g_ref = Metric3::new(random_spd3(&mut st)).unwrap();
            let g_cur = Metric3::new(random_spd3(&mut st)).unwrap();
            let mut m = [[0.0; 3]; 3];
            for (i, row) in m.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = 0.4 * (splitmix(&mut st) - 0.5) + if i == j { 1.0 } else { 0.0 };
                }
            }
            let f = TwoPointMap3::new(m, "ref", "cur");
            if f.det() <= 0.1 {
                continue;
            }
            let c_flat = f.pull_back_metric(&g_cur);
            let u = spd_sqrt(&raise_index(&c_flat, &g_ref).unwrap()).unwrap();
            let r = mul3(f.components(), &inv3(u.components()).unwrap());
            let pulled = mul3(&transpose3(&r), &mul3(g_cur.cov_components(), &r));
            let scale = g_ref.covariant().max_abs();
            for a in 0..3 {
                for b in 0..3 {
                    assert!(
                        (pulled[a][b] - g_ref.cov_components()[a][b]).abs() < 1e-9 * scale,
                        "rotation not metric-orthogonal at ({a},{b})"
                    );
                }
            }
        }
    }
}
