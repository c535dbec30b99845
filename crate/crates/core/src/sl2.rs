//! 2×2 real matrices, the one-parameter flows, and the Iwasawa, Cartan and
//! Bruhat decompositions.
//!
//! Conventions: `g_t = diag(e^t, e^{-t})`, `h_s = [[1, s], [0, 1]]`,
//! `ĥ_s = [[1, 0], [s, 1]]`, `r_θ = [[cos θ, -sin θ], [sin θ, cos θ]]`.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Mul;

use crate::exact::{ArithError, ExactReal, Field};

/// Matrix `[[a, b], [c, d]]` stored row-major.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mat2 {
    Exact([ExactReal; 4]),
    Float([f64; 4]),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sl2Error {
    NotUnimodular,
    Singular,
    Arith(ArithError),
}

impl fmt::Display for Sl2Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sl2Error::NotUnimodular => f.write_str("matrix does not have determinant 1"),
            Sl2Error::Singular => f.write_str("matrix is singular"),
            Sl2Error::Arith(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for Sl2Error {}

impl From<ArithError> for Sl2Error {
    fn from(e: ArithError) -> Self {
        Sl2Error::Arith(e)
    }
}

/// Float determinant tolerance used by the unimodularity precondition.
pub const FLOAT_DET_TOL: f64 = 1e-9;

fn mul_exact(x: &[ExactReal; 4], y: &[ExactReal; 4]) -> Result<[ExactReal; 4], ArithError> {
    let e = |i: usize, j: usize, k: usize, l: usize| -> Result<ExactReal, ArithError> {
        x[i].try_mul(&y[j])?.try_add(&x[k].try_mul(&y[l])?)
    };
    Ok([e(0, 0, 1, 2)?, e(0, 1, 1, 3)?, e(2, 0, 3, 2)?, e(2, 1, 3, 3)?])
}

fn mul_float(x: &[f64; 4], y: &[f64; 4]) -> [f64; 4] {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

impl Mat2 {
    pub fn exact(a: ExactReal, b: ExactReal, c: ExactReal, d: ExactReal) -> Self {
        Mat2::Exact([a, b, c, d])
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::Exact([a.into(), b.into(), c.into(), d.into()])
    }

    pub fn float(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::Float([a, b, c, d])
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1)
    }

    /// `ι = [[0, -1], [1, 0]]`.
    pub fn iota() -> Self {
        Self::from_ints(0, -1, 1, 0)
    }

    pub fn diag(x: ExactReal, y: ExactReal) -> Self {
        Mat2::Exact([x, ExactReal::zero(), ExactReal::zero(), y])
    }

    /// `g_t`, float.
    pub fn g(t: f64) -> Self {
        Mat2::Float([libm::exp(t), 0.0, 0.0, libm::exp(-t)])
    }

    /// `g_t` with `e^t = lambda` given exactly.
    pub fn g_exact(lambda: &ExactReal) -> Result<Self, ArithError> {
        Ok(Self::diag(lambda.clone(), lambda.try_recip()?))
    }

    pub fn h(s: ExactReal) -> Self {
        Mat2::Exact([ExactReal::one(), s, ExactReal::zero(), ExactReal::one()])
    }

    pub fn h_hat(s: ExactReal) -> Self {
        Mat2::Exact([ExactReal::one(), ExactReal::zero(), s, ExactReal::one()])
    }

    pub fn h_float(s: f64) -> Self {
        Mat2::Float([1.0, s, 0.0, 1.0])
    }

    pub fn h_hat_float(s: f64) -> Self {
        Mat2::Float([1.0, 0.0, s, 1.0])
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = (libm::sin(theta), libm::cos(theta));
        Mat2::Float([c, -s, s, c])
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Mat2::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&[ExactReal; 4]> {
        match self {
            Mat2::Exact(e) => Some(e),
            Mat2::Float(_) => None,
        }
    }

    pub fn to_float(&self) -> [f64; 4] {
        match self {
            Mat2::Exact(e) => [e[0].to_f64(), e[1].to_f64(), e[2].to_f64(), e[3].to_f64()],
            Mat2::Float(f) => *f,
        }
    }

    pub fn into_float(self) -> Self {
        Mat2::Float(self.to_float())
    }

    /// Coordinate field of an exact matrix.
    pub fn field(&self) -> Result<Option<Field>, ArithError> {
        match self {
            Mat2::Exact(e) => e.iter().try_fold(Field::Rational, |f, x| f.join(x.field())).map(Some),
            Mat2::Float(_) => Ok(None),
        }
    }

    pub fn det(&self) -> Result<ExactOrFloat, ArithError> {
        match self {
            Mat2::Exact(e) => Ok(ExactOrFloat::Exact(e[0].try_mul(&e[3])?.try_sub(&e[1].try_mul(&e[2])?)?)),
            Mat2::Float(f) => Ok(ExactOrFloat::Float(f[0] * f[3] - f[1] * f[2])),
        }
    }

    pub fn det_f64(&self) -> f64 {
        let f = self.to_float();
        f[0] * f[3] - f[1] * f[2]
    }

    pub fn try_mul(&self, other: &Mat2) -> Result<Mat2, ArithError> {
        match (self, other) {
            (Mat2::Exact(x), Mat2::Exact(y)) => Ok(Mat2::Exact(mul_exact(x, y)?)),
            _ => Ok(Mat2::Float(mul_float(&self.to_float(), &other.to_float()))),
        }
    }

    pub fn inverse(&self) -> Result<Mat2, Sl2Error> {
        match self {
            Mat2::Exact(e) => {
                let det = e[0].try_mul(&e[3])?.try_sub(&e[1].try_mul(&e[2])?)?;
                if det.is_zero() {
                    return Err(Sl2Error::Singular);
                }
                let inv = det.try_recip()?;
                Ok(Mat2::Exact([
                    e[3].try_mul(&inv)?,
                    (-&e[1]).try_mul(&inv)?,
                    (-&e[2]).try_mul(&inv)?,
                    e[0].try_mul(&inv)?,
                ]))
            }
            Mat2::Float(f) => {
                let det = f[0] * f[3] - f[1] * f[2];
                if det == 0.0 {
                    return Err(Sl2Error::Singular);
                }
                Ok(Mat2::Float([f[3] / det, -f[1] / det, -f[2] / det, f[0] / det]))
            }
        }
    }

    /// Frobenius norm of `self - other`, in floating point.
    pub fn frobenius_distance(&self, other: &Mat2) -> f64 {
        let (x, y) = (self.to_float(), other.to_float());
        libm::sqrt((0..4).map(|i| (x[i] - y[i]) * (x[i] - y[i])).sum())
    }

    /// Checks `det = 1`: exactly for exact matrices, to [`FLOAT_DET_TOL`] otherwise.
    pub fn check_unimodular(&self) -> Result<(), Sl2Error> {
        let ok = match self.det()? {
            ExactOrFloat::Exact(d) => d == ExactReal::one(),
            ExactOrFloat::Float(d) => (d - 1.0).abs() <= FLOAT_DET_TOL,
        };
        if ok {
            Ok(())
        } else {
            Err(Sl2Error::NotUnimodular)
        }
    }

    /// Product of a list of matrices, left to right.
    pub fn product(list: &[Mat2]) -> Result<Mat2, ArithError> {
        list.iter().try_fold(Mat2::identity(), |acc, m| acc.try_mul(m))
    }

    pub fn apply_exact(&self, v: &(ExactReal, ExactReal)) -> Result<(ExactReal, ExactReal), ArithError> {
        let e = self.as_exact().expect("apply_exact on a float matrix");
        Ok((
            e[0].try_mul(&v.0)?.try_add(&e[1].try_mul(&v.1)?)?,
            e[2].try_mul(&v.0)?.try_add(&e[3].try_mul(&v.1)?)?,
        ))
    }

    pub fn apply_f64(&self, v: [f64; 2]) -> [f64; 2] {
        let m = self.to_float();
        [m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]]
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: &Mat2) -> Mat2 {
        self.try_mul(rhs).expect("matrix entries in different fields")
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        &self * &rhs
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mat2::Exact(e) => write!(f, "[[{}, {}], [{}, {}]]", e[0], e[1], e[2], e[3]),
            Mat2::Float(x) => write!(f, "[[{:e}, {:e}], [{:e}, {:e}]]", x[0], x[1], x[2], x[3]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExactOrFloat {
    Exact(ExactReal),
    Float(f64),
}

impl ExactOrFloat {
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactOrFloat::Exact(x) => x.to_f64(),
            ExactOrFloat::Float(x) => *x,
        }
    }
}

/// Which decomposition produced a [`Factorization`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DecompositionKind {
    Iwasawa,
    Cartan,
    Bruhat,
}

/// Three factors whose product is the input, plus the exponent `t` of the
/// diagonal factor `g_t`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Factorization {
    pub kind: DecompositionKind,
    pub factors: [Mat2; 3],
    /// Natural log of the first diagonal entry of the middle factor. For the
    /// Bruhat `a ≠ 0` branch with `a < 0` this is `ln |a|`.
    pub t: f64,
    /// Bruhat only: true when the `ι` branch (`a = 0`) was taken.
    pub iota_branch: bool,
}

impl Factorization {
    pub fn recompose(&self) -> Result<Mat2, ArithError> {
        Mat2::product(&self.factors)
    }

    pub fn residual(&self, a: &Mat2) -> f64 {
        self.recompose().map(|m| m.frobenius_distance(a)).unwrap_or(f64::INFINITY)
    }
}

/// `A = k · diag(r, 1/r) · h_x` with `k` a rotation, `r > 0`.
///
/// For rational entries the factors are exact (in ℚ(√(a²+c²))); for
/// quadratic entries they stay exact whenever `a² + c²` is a square in the
/// field, and fall back to floating point otherwise.
pub fn iwasawa(m: &Mat2) -> Result<Factorization, Sl2Error> {
    m.check_unimodular()?;
    if let Mat2::Exact(e) = m {
        let r2 = e[0].square().try_add(&e[2].square())?;
        if let Some(r) = r2.sqrt_exact() {
            if r.field().join(r2.field()).is_ok() && m.field()?.is_some_and(|f| f.join(r.field()).is_ok()) {
                let rinv = r.try_recip()?;
                let r2inv = r2.try_recip()?;
                let k = Mat2::Exact([
                    e[0].try_mul(&rinv)?,
                    (-&e[2]).try_mul(&rinv)?,
                    e[2].try_mul(&rinv)?,
                    e[0].try_mul(&rinv)?,
                ]);
                let x = e[0].try_mul(&e[1])?.try_add(&e[2].try_mul(&e[3])?)?.try_mul(&r2inv)?;
                let t = libm::log(r.to_f64());
                return Ok(Factorization {
                    kind: DecompositionKind::Iwasawa,
                    factors: [k, Mat2::diag(r, rinv), Mat2::h(x)],
                    t,
                    iota_branch: false,
                });
            }
        }
    }
    let [a, b, c, d] = m.to_float();
    let r = libm::hypot(a, c);
    let x = (a * b + c * d) / (r * r);
    Ok(Factorization {
        kind: DecompositionKind::Iwasawa,
        factors: [
            Mat2::Float([a / r, -c / r, c / r, a / r]),
            Mat2::Float([r, 0.0, 0.0, 1.0 / r]),
            Mat2::h_float(x),
        ],
        t: libm::log(r),
        iota_branch: false,
    })
}

/// `A = r_φ · diag(σ, 1/σ) · r_ψ` with `σ ≥ 1` the largest singular value.
/// Always floating point: the rotation angles leave quadratic fields.
pub fn cartan(m: &Mat2) -> Result<Factorization, Sl2Error> {
    m.check_unimodular()?;
    let [a, b, c, d] = m.to_float();
    let e = (a + d) / 2.0;
    let f = (a - d) / 2.0;
    let g = (c + b) / 2.0;
    let h = (c - b) / 2.0;
    let q = libm::hypot(e, h);
    let r = libm::hypot(f, g);
    let sx = q + r;
    let a1 = libm::atan2(g, f);
    let a2 = libm::atan2(h, e);
    let (phi, psi) = if r == 0.0 {
        (a2, 0.0)
    } else {
        ((a2 + a1) / 2.0, (a2 - a1) / 2.0)
    };
    Ok(Factorization {
        kind: DecompositionKind::Cartan,
        factors: [Mat2::rotation(phi), Mat2::Float([sx, 0.0, 0.0, 1.0 / sx]), Mat2::rotation(psi)],
        t: libm::log(sx),
        iota_branch: false,
    })
}

/// The two-branch Bruhat formula:
/// `a ≠ 0`: `A = ĥ_{c/a} · diag(a, 1/a) · h_{b/a}`;
/// `a = 0`: `A = ι · diag(c, 1/c) · h_{d/c}`.
pub fn bruhat(m: &Mat2) -> Result<Factorization, Sl2Error> {
    m.check_unimodular()?;
    match m {
        Mat2::Exact(e) => {
            let [a, b, c, d] = e;
            if !a.is_zero() {
                let ai = a.try_recip()?;
                Ok(Factorization {
                    kind: DecompositionKind::Bruhat,
                    factors: [Mat2::h_hat(c.try_mul(&ai)?), Mat2::diag(a.clone(), ai.clone()), Mat2::h(b.try_mul(&ai)?)],
                    t: libm::log(a.to_f64().abs()),
                    iota_branch: false,
                })
            } else {
                let ci = c.try_recip()?;
                Ok(Factorization {
                    kind: DecompositionKind::Bruhat,
                    factors: [Mat2::iota(), Mat2::diag(c.clone(), ci.clone()), Mat2::h(d.try_mul(&ci)?)],
                    t: libm::log(c.to_f64().abs()),
                    iota_branch: true,
                })
            }
        }
        Mat2::Float([a, b, c, d]) => {
            if *a != 0.0 {
                Ok(Factorization {
                    kind: DecompositionKind::Bruhat,
                    factors: [Mat2::h_hat_float(c / a), Mat2::Float([*a, 0.0, 0.0, 1.0 / a]), Mat2::h_float(b / a)],
                    t: libm::log(a.abs()),
                    iota_branch: false,
                })
            } else {
                Ok(Factorization {
                    kind: DecompositionKind::Bruhat,
                    factors: [Mat2::iota().into_float(), Mat2::Float([*c, 0.0, 0.0, 1.0 / c]), Mat2::h_float(d / c)],
                    t: libm::log(c.abs()),
                    iota_branch: true,
                })
            }
        }
    }
}

pub fn decompose(kind: DecompositionKind, m: &Mat2) -> Result<Factorization, Sl2Error> {
    match kind {
        DecompositionKind::Iwasawa => iwasawa(m),
        DecompositionKind::Cartan => cartan(m),
        DecompositionKind::Bruhat => bruhat(m),
    }
}

/// Outcome of multiplying out `ĥ_{-tan θ} · g_{log cos θ} · h_{tan θ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NanRotationCheck {
    pub theta: f64,
    pub product: Mat2,
    pub residual_to_r_theta: f64,
    pub residual_to_r_minus_theta: f64,
}

impl NanRotationCheck {
    /// `+1` if the product is `r_θ`, `-1` if it is `r_{-θ}`, `0` if neither
    /// within `tol`.
    pub fn rotation_sign(&self, tol: f64) -> i8 {
        if self.residual_to_r_theta <= tol {
            1
        } else if self.residual_to_r_minus_theta <= tol {
            -1
        } else {
            0
        }
    }
}

/// Multiplies the lower-unipotent, diagonal, upper-unipotent product of the
/// form `ĥ_{-tan θ} g_{log cos θ} h_{tan θ}` and compares it with `r_{±θ}`.
/// Requires `|θ| < π/2`.
pub fn nan_rotation_check(theta: f64) -> NanRotationCheck {
    let tan = libm::tan(theta);
    let product = &(&Mat2::h_hat_float(-tan) * &Mat2::g(libm::log(libm::cos(theta)))) * &Mat2::h_float(tan);
    NanRotationCheck {
        theta,
        residual_to_r_theta: product.frobenius_distance(&Mat2::rotation(theta)),
        residual_to_r_minus_theta: product.frobenius_distance(&Mat2::rotation(-theta)),
        product,
    }
}

/// Residual of `g_t h_u g_{-t} = h_{u e^{2t}}` in floating point.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjShearCheck {
    pub t: f64,
    pub u: f64,
    pub lhs: Mat2,
    pub rhs: Mat2,
    pub residual: f64,
}

pub fn conj_shear(t: f64, u: f64) -> ConjShearCheck {
    let lhs = &(&Mat2::g(t) * &Mat2::h_float(u)) * &Mat2::g(-t);
    let rhs = Mat2::h_float(u * libm::exp(2.0 * t));
    let residual = lhs.frobenius_distance(&rhs);
    ConjShearCheck { t, u, lhs, rhs, residual }
}

/// Exact form of the conjugation identity with `e^t = lambda`: checks
/// `diag(λ, 1/λ) h_u diag(1/λ, λ) = h_{u λ²}` symbolically.
pub fn conj_shear_exact(lambda: &ExactReal, u: &ExactReal) -> Result<bool, ArithError> {
    let g = Mat2::g_exact(lambda)?;
    let gi = Mat2::g_exact(&lambda.try_recip()?)?;
    let lhs = Mat2::product(&[g, Mat2::h(u.clone()), gi])?;
    Ok(lhs == Mat2::h(u.try_mul(&lambda.square())?))
}

/// `g_t r_θ` against `ĥ_{e^{-2t} tan θ} g_{log cos θ} h_{-e^{2t} tan θ} g_t`;
/// returns the Frobenius residual.
pub fn tracking_identity_residual(t: f64, theta: f64) -> f64 {
    let tan = libm::tan(theta);
    let e2 = libm::exp(2.0 * t);
    let lhs = &Mat2::g(t) * &Mat2::rotation(theta);
    let rhs = Mat2::product(&[
        Mat2::h_hat_float(tan / e2),
        Mat2::g(libm::log(libm::cos(theta))),
        Mat2::h_float(-e2 * tan),
        Mat2::g(t),
    ])
    .expect("float product");
    lhs.frobenius_distance(&rhs)
}

/// Products of elementary unipotents with small integer parameters; a
/// convenient generator of exact unimodular test matrices.
pub fn word_matrix(steps: &[(bool, i64)]) -> Mat2 {
    let list: Vec<Mat2> = steps
        .iter()
        .map(|&(upper, s)| if upper { Mat2::h(s.into()) } else { Mat2::h_hat(s.into()) })
        .collect();
    Mat2::product(&list).expect("rational product")
}
