//! Metric geometry of the Lorentzian Berger sphere.
//!
//! Points of S³ are stored as unit vectors of ℝ⁴ with `z = x1 + i x2`,
//! `w = x3 + i x4`. The global frame is `X_k = J_k p`; the Lorentzian
//! metric shrinks the Hopf direction `X_1` by `-ε²`, so that
//! `E_1 = X_1 / ε`, `E_2 = X_2`, `E_3 = X_3` is orthonormal with
//! signature `(-, +, +)`.
//!
//! Tangent vectors are expanded in that frame as `c1 E1 + c2 E2 + c3 E3`;
//! the connection and curvature act on those coefficients.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Vec4 = Vector4<f64>;
pub type Mat4 = Matrix4<f64>;

/// Points closer than this to the unit sphere are accepted as-is.
pub const SPHERE_TOLERANCE: f64 = 1e-12;
/// Tangency defects below this are exact; between this and
/// [`TANGENCY_REPAIR_LIMIT`] they are projected away.
pub const TANGENCY_TOLERANCE: f64 = 1e-12;
pub const TANGENCY_REPAIR_LIMIT: f64 = 1e-6;
/// Default step of central differences along vector fields.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[rustfmt::skip]
pub fn j1() -> Mat4 {
    Mat4::new(
        0.0, -1.0, 0.0,  0.0,
        1.0,  0.0, 0.0,  0.0,
        0.0,  0.0, 0.0, -1.0,
        0.0,  0.0, 1.0,  0.0,
    )
}

#[rustfmt::skip]
pub fn j2() -> Mat4 {
    Mat4::new(
        0.0, 0.0,  0.0, -1.0,
        0.0, 0.0, -1.0,  0.0,
        0.0, 1.0,  0.0,  0.0,
        1.0, 0.0,  0.0,  0.0,
    )
}

#[rustfmt::skip]
pub fn j3() -> Mat4 {
    Mat4::new(
        0.0,  0.0, -1.0, 0.0,
        0.0,  0.0,  0.0, 1.0,
        1.0,  0.0,  0.0, 0.0,
        0.0, -1.0,  0.0, 0.0,
    )
}

/// Causal character of a surface, encoded by `λ = g(N, N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Causality {
    /// Riemannian induced metric, timelike normal, `λ = -1`.
    Spacelike,
    /// Lorentzian induced metric, spacelike normal, `λ = +1`.
    Timelike,
}

impl Causality {
    pub fn lambda(self) -> f64 {
        match self {
            Causality::Spacelike => -1.0,
            Causality::Timelike => 1.0,
        }
    }

    pub fn from_lambda(lambda: i32) -> Result<Self> {
        match lambda {
            -1 => Ok(Causality::Spacelike),
            1 => Ok(Causality::Timelike),
            other => Err(Error::Domain(format!("lambda must be -1 or +1, got {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Causality::Spacelike => "spacelike",
            Causality::Timelike => "timelike",
        }
    }
}

/// The ambient Lorentzian metric `g_ε`, for a fixed `ε > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BergerMetric {
    epsilon: f64,
}

/// Deformation, causal character and angle function of a helix surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BergerParams {
    pub metric: BergerMetric,
    pub causality: Causality,
    pub nu: f64,
}

impl BergerParams {
    pub fn new(epsilon: f64, causality: Causality, nu: f64) -> Result<Self> {
        let metric = BergerMetric::new(epsilon)?;
        if !nu.is_finite() {
            return Err(Error::Domain(format!("nu must be finite, got {nu}")));
        }
        match causality {
            Causality::Spacelike if nu.abs() <= 1.0 => Err(Error::Domain(format!(
                "spacelike helix surfaces require |nu| > 1 (got nu = {nu}): \
                 with |nu| = 1 the horizontal distribution would be integrable"
            ))),
            Causality::Timelike if nu == 0.0 => Err(Error::Domain(
                "timelike helix surfaces require nu != 0: nu = 0 is a Hopf tube, excluded".into(),
            )),
            _ => Ok(BergerParams {
                metric,
                causality,
                nu,
            }),
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.metric.epsilon()
    }

    pub fn lambda(&self) -> f64 {
        self.causality.lambda()
    }
}

/// A unit vector of ℝ⁴.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientPoint(Vec4);

impl AmbientPoint {
    pub fn new(x: Vec4) -> Result<Self> {
        let norm = x.norm();
        if (norm - 1.0).abs() > SPHERE_TOLERANCE || !norm.is_finite() {
            return Err(Error::NotOnSphere { norm });
        }
        Ok(AmbientPoint(x))
    }

    /// Radial projection of a nonzero vector onto S³.
    pub fn normalized(x: Vec4) -> Result<Self> {
        let norm = x.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotOnSphere { norm });
        }
        Ok(AmbientPoint(x / norm))
    }

    pub fn from_slice(x: [f64; 4]) -> Result<Self> {
        Self::new(Vec4::from(x))
    }

    pub fn coords(&self) -> &Vec4 {
        &self.0
    }

    /// `X_1 = J_1 p`, the (unnormalized) Hopf field.
    pub fn hopf_direction(&self) -> Vec4 {
        j1() * self.0
    }
}

/// A 4-vector attached to a point of S³ and orthogonal to it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVector {
    base: AmbientPoint,
    v: Vec4,
}

impl TangentVector {
    /// Attach `v` to `base`, projecting away small normal components.
    pub fn new(base: AmbientPoint, v: Vec4) -> Result<Self> {
        let p = base.coords();
        let radial = v.dot(p);
        let defect = radial.abs() / v.norm().max(1.0);
        if defect <= TANGENCY_TOLERANCE {
            Ok(TangentVector { base, v })
        } else if defect < TANGENCY_REPAIR_LIMIT {
            Ok(TangentVector {
                base,
                v: v - p * radial,
            })
        } else {
            Err(Error::NotTangent { defect })
        }
    }

    /// Skips the tangency check; `v` must already be orthogonal to `base`.
    pub(crate) fn new_unchecked(base: AmbientPoint, v: Vec4) -> Self {
        TangentVector { base, v }
    }

    pub fn zero(base: AmbientPoint) -> Self {
        TangentVector {
            base,
            v: Vec4::zeros(),
        }
    }

    pub fn base(&self) -> &AmbientPoint {
        &self.base
    }

    pub fn vector(&self) -> &Vec4 {
        &self.v
    }

    pub fn scale(&self, s: f64) -> Self {
        TangentVector {
            base: self.base,
            v: self.v * s,
        }
    }

    pub fn try_add(&self, other: &TangentVector) -> Result<Self> {
        same_base(self, other)?;
        Ok(TangentVector {
            base: self.base,
            v: self.v + other.v,
        })
    }

    pub fn try_sub(&self, other: &TangentVector) -> Result<Self> {
        same_base(self, other)?;
        Ok(TangentVector {
            base: self.base,
            v: self.v - other.v,
        })
    }
}

fn same_base(a: &TangentVector, b: &TangentVector) -> Result<()> {
    if a.base == b.base {
        Ok(())
    } else {
        Err(Error::BasePointMismatch)
    }
}

/// Coefficients of a tangent vector in the orthonormal frame `(E1, E2, E3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl FrameCoefficients {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        FrameCoefficients { c1, c2, c3 }
    }

    pub fn as_vec(&self) -> Vec3 {
        Vec3::new(self.c1, self.c2, self.c3)
    }

    pub fn from_vec(c: Vec3) -> Self {
        FrameCoefficients::new(c.x, c.y, c.z)
    }
}

/// `(E1, E2, E3)` at a point.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    pub e1: TangentVector,
    pub e2: TangentVector,
    pub e3: TangentVector,
}

impl Frame {
    pub fn as_array(&self) -> [TangentVector; 3] {
        [self.e1, self.e2, self.e3]
    }

    /// `c1 E1 + c2 E2 + c3 E3`.
    pub fn combine(&self, c: &Vec3) -> TangentVector {
        TangentVector::new_unchecked(
            *self.e1.base(),
            self.e1.v * c.x + self.e2.v * c.y + self.e3.v * c.z,
        )
    }
}

/// Which route `curvature` takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvatureMode {
    /// Trilinear extension of the nonzero frame components.
    FrameTable,
    /// The invariant expression in terms of `g_ε` and `E1`.
    ClosedForm,
}

impl std::str::FromStr for CurvatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frame-table" => Ok(CurvatureMode::FrameTable),
            "closed-form" => Ok(CurvatureMode::ClosedForm),
            other => Err(Error::Config(format!("unknown curvature mode `{other}`"))),
        }
    }
}

/// Hopf map `ψ(z, w) = ½ (2 z w̄, |z|² − |w|²)`, landing on S²(1/2) ⊂ ℂ × ℝ ≅ ℝ³.
pub fn hopf_map(p: &AmbientPoint) -> Vec3 {
    let x = p.coords();
    // z w̄ = (x1 + i x2)(x3 - i x4)
    let re = x[0] * x[2] + x[1] * x[3];
    let im = x[1] * x[2] - x[0] * x[3];
    let t = 0.5 * (x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3]);
    Vec3::new(re, im, t)
}

impl BergerMetric {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(BergerMetric { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn frame_at(&self, p: &AmbientPoint) -> Frame {
        let x = p.coords();
        Frame {
            e1: TangentVector::new_unchecked(*p, j1() * x / self.epsilon),
            e2: TangentVector::new_unchecked(*p, j2() * x),
            e3: TangentVector::new_unchecked(*p, j3() * x),
        }
    }

    /// `g_ε(U, V) = <U, V> − (ε² + 1) <U, X1> <V, X1>`.
    pub fn metric(&self, u: &TangentVector, v: &TangentVector) -> Result<f64> {
        same_base(u, v)?;
        Ok(self.metric_raw(u.base(), &u.v, &v.v))
    }

    /// `g_ε` on raw 4-vectors at `p`, with no tangency bookkeeping.
    pub fn metric_raw(&self, p: &AmbientPoint, u: &Vec4, v: &Vec4) -> f64 {
        let x1 = p.hopf_direction();
        u.dot(v) - (self.epsilon * self.epsilon + 1.0) * u.dot(&x1) * v.dot(&x1)
    }

    pub fn frame_coefficients(&self, v: &TangentVector) -> FrameCoefficients {
        FrameCoefficients::from_vec(self.coefficients_raw(v.base(), &v.v))
    }

    /// Frame coefficients of a raw 4-vector at `p` (`c1 = −g(V, E1)`).
    pub fn coefficients_raw(&self, p: &AmbientPoint, v: &Vec4) -> Vec3 {
        let x = p.coords();
        // With E1 = X1/ε and g(V, X1) = -ε² <V, X1>, the coefficient c1 = ε <V, X1>.
        let c1 = self.epsilon * v.dot(&(j1() * x));
        let c2 = v.dot(&(j2() * x));
        let c3 = v.dot(&(j3() * x));
        Vec3::new(c1, c2, c3)
    }

    pub fn cross(&self, u: &TangentVector, v: &TangentVector) -> Result<TangentVector> {
        same_base(u, v)?;
        let a = self.coefficients_raw(u.base(), &u.v);
        let b = self.coefficients_raw(v.base(), &v.v);
        Ok(self.frame_at(u.base()).combine(&cross_coefficients(&a, &b)))
    }

    /// `∇_X Y` for a field `Y` sampled around the base point of `X`.
    pub fn covariant_derivative<F: VectorField + ?Sized>(
        &self,
        x: &TangentVector,
        field: &F,
        step: f64,
    ) -> Result<TangentVector> {
        if !(step > 0.0) {
            return Err(Error::Config(format!("finite-difference step must be positive, got {step}")));
        }
        let p = x.base();
        let y = field.coefficients(self, p);
        let dy = match field.coefficient_derivative(self, p, x) {
            Some(d) => d,
            None => self.directional_derivative_fd(x, step, |q| field.coefficients(self, q))?,
        };
        Ok(self.covariant_derivative_from_parts(x, &y, &dy))
    }

    /// Leibniz rule: `∇_X Y = Σ X(y_j) E_j + Σ x_i y_j ∇_{E_i} E_j`.
    pub fn covariant_derivative_from_parts(
        &self,
        x: &TangentVector,
        y: &Vec3,
        dy: &Vec3,
    ) -> TangentVector {
        let xc = self.coefficients_raw(x.base(), &x.v);
        let c = dy + self.connection_coefficients(&xc, y);
        self.frame_at(x.base()).combine(&c)
    }

    /// Frame coefficients of `Σ x_i y_j ∇_{E_i} E_j` (the zeroth-order part of `∇_X Y`).
    pub fn connection_coefficients(&self, x: &Vec3, y: &Vec3) -> Vec3 {
        let eps = self.epsilon;
        let k = (2.0 + eps * eps) / eps;
        // Nonzero entries of the connection table:
        //   ∇E1 E2 =  k E3,  ∇E1 E3 = -k E2,
        //   ∇E2 E1 =  ε E3,  ∇E3 E1 = -ε E2,
        //   ∇E2 E3 =  ε E1,  ∇E3 E2 = -ε E1.
        let (x1, x2, x3) = (x.x, x.y, x.z);
        let (y1, y2, y3) = (y.x, y.y, y.z);
        Vec3::new(
            eps * (x2 * y3 - x3 * y2),
            -k * x1 * y3 - eps * x3 * y1,
            k * x1 * y2 + eps * x2 * y1,
        )
    }

    /// Central difference of `f` along `x`, following the great circle through the base point.
    pub fn directional_derivative_fd<G>(&self, x: &TangentVector, step: f64, f: G) -> Result<Vec3>
    where
        G: Fn(&AmbientPoint) -> Vec3,
    {
        if !(step > 0.0) {
            return Err(Error::Config(format!("finite-difference step must be positive, got {step}")));
        }
        let p = x.base().coords();
        let plus = AmbientPoint::normalized(p + x.v * step)?;
        let minus = AmbientPoint::normalized(p - x.v * step)?;
        Ok((f(&plus) - f(&minus)) / (2.0 * step))
    }

    /// Norm of `∇_X E1 + ε X ∧ E1`, which vanishes because `E1` is Killing.
    pub fn killing_residual(&self, x: &TangentVector) -> Result<f64> {
        let frame = self.frame_at(x.base());
        let lhs = self.covariant_derivative(x, &ConstantFrameField::new(1.0, 0.0, 0.0), DEFAULT_FD_STEP)?;
        let wedge = self.cross(x, &frame.e1)?;
        let r = lhs.v + wedge.v * self.epsilon;
        Ok(self.coefficient_norm(&self.coefficients_raw(x.base(), &r)))
    }

    /// Same as [`killing_residual`](Self::killing_residual), but differentiates
    /// `E1 = J1 p / ε` as an ambient field with central differences.
    pub fn killing_residual_fd(&self, x: &TangentVector, step: f64) -> Result<f64> {
        let field = AmbientField::new(|p: &AmbientPoint| j1() * p.coords() / self.epsilon);
        let lhs = self.covariant_derivative(x, &field, step)?;
        let wedge = self.cross(x, &self.frame_at(x.base()).e1)?;
        let r = lhs.v + wedge.v * self.epsilon;
        Ok(self.coefficient_norm(&self.coefficients_raw(x.base(), &r)))
    }

    /// Euclidean size of a frame-coefficient vector; `g_ε` is indefinite,
    /// so residual magnitudes are measured this way.
    pub fn coefficient_norm(&self, c: &Vec3) -> f64 {
        c.norm()
    }

    pub fn curvature(
        &self,
        x: &TangentVector,
        y: &TangentVector,
        z: &TangentVector,
        mode: CurvatureMode,
    ) -> Result<TangentVector> {
        same_base(x, y)?;
        same_base(x, z)?;
        let p = x.base();
        match mode {
            CurvatureMode::FrameTable => {
                let xc = self.coefficients_raw(p, &x.v);
                let yc = self.coefficients_raw(p, &y.v);
                let zc = self.coefficients_raw(p, &z.v);
                Ok(self.frame_at(p).combine(&self.curvature_table_coefficients(&xc, &yc, &zc)))
            }
            CurvatureMode::ClosedForm => Ok(self.curvature_closed_form(x, y, z)),
        }
    }

    /// `R(X, Y)Z` in frame coefficients via the table of basis components.
    pub fn curvature_table_coefficients(&self, x: &Vec3, y: &Vec3, z: &Vec3) -> Vec3 {
        let table = self.curvature_table();
        let mut out = Vec3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                out += table[i][j] * z * xy;
            }
        }
        out
    }

    /// `table[i][j]` is the matrix of `Z ↦ R(E_i, E_j) Z` in frame coefficients.
    pub fn curvature_table(&self) -> [[Matrix3<f64>; 3]; 3] {
        let e2 = self.epsilon * self.epsilon;
        let c = 4.0 + 3.0 * e2;
        let mut t = [[Matrix3::zeros(); 3]; 3];
        // R(E1,E2)E1 = -ε² E2, R(E1,E2)E2 = -ε² E1
        t[0][1][(1, 0)] = -e2;
        t[0][1][(0, 1)] = -e2;
        // R(E1,E3)E1 = -ε² E3, R(E1,E3)E3 = -ε² E1
        t[0][2][(2, 0)] = -e2;
        t[0][2][(0, 2)] = -e2;
        // R(E2,E3)E3 = (4+3ε²) E2, R(E2,E3)E2 = -(4+3ε²) E3
        t[1][2][(1, 2)] = c;
        t[1][2][(2, 1)] = -c;
        for i in 0..3 {
            for j in 0..i {
                t[i][j] = -t[j][i];
            }
        }
        t
    }

    fn curvature_closed_form(&self, x: &TangentVector, y: &TangentVector, z: &TangentVector) -> TangentVector {
        let p = x.base();
        let e1 = self.frame_at(p).e1;
        let g = |a: &Vec4, b: &Vec4| self.metric_raw(p, a, b);
        let e2 = self.epsilon * self.epsilon;
        let (xv, yv, zv, ev) = (&x.v, &y.v, &z.v, &e1.v);
        let (gyz, gxz) = (g(yv, zv), g(xv, zv));
        let (gx1, gy1, gz1) = (g(xv, ev), g(yv, ev), g(zv, ev));
        let r = (xv * gyz - yv * gxz) * (4.0 + 3.0 * e2)
            + (xv * (gy1 * gz1) - yv * (gx1 * gz1) + ev * (gx1 * gyz) - ev * (gy1 * gxz))
                * (4.0 * (1.0 + e2));
        TangentVector::new_unchecked(*p, r)
    }

    /// Sectional curvature `g(R(X,Y)Y, X) / (g(X,X) g(Y,Y) − g(X,Y)²)` of the plane spanned by `X, Y`.
    pub fn sectional_curvature(&self, x: &TangentVector, y: &TangentVector) -> Result<f64> {
        let r = self.curvature(x, y, y, CurvatureMode::ClosedForm)?;
        let num = self.metric(&r, x)?;
        let den = self.metric(x, x)? * self.metric(y, y)? - self.metric(x, y)?.powi(2);
        Ok(num / den)
    }
}

/// `U ∧ V` on frame coefficients.
pub fn cross_coefficients(u: &Vec3, v: &Vec3) -> Vec3 {
    Vec3::new(
        -(u.y * v.z - u.z * v.y),
        u.z * v.x - u.x * v.z,
        u.x * v.y - u.y * v.x,
    )
}

/// A vector field on (an open set of) S³, described by its frame coefficients.
pub trait VectorField: Sync {
    fn coefficients(&self, metric: &BergerMetric, p: &AmbientPoint) -> Vec3;

    /// `X(y_j)` for the frame coefficients `y_j`, when known in closed form.
    fn coefficient_derivative(
        &self,
        _metric: &BergerMetric,
        _p: &AmbientPoint,
        _x: &TangentVector,
    ) -> Option<Vec3> {
        None
    }
}

/// A field with constant frame coefficients, e.g. `E1` itself.
#[derive(Clone, Copy, Debug)]
pub struct ConstantFrameField(Vec3);

impl ConstantFrameField {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        ConstantFrameField(Vec3::new(c1, c2, c3))
    }
}

impl VectorField for ConstantFrameField {
    fn coefficients(&self, _metric: &BergerMetric, _p: &AmbientPoint) -> Vec3 {
        self.0
    }

    fn coefficient_derivative(&self, _: &BergerMetric, _: &AmbientPoint, _: &TangentVector) -> Option<Vec3> {
        Some(Vec3::zeros())
    }
}

/// A field given as a callable returning ambient 4-vectors; differentiated numerically.
pub struct AmbientField<F> {
    f: F,
}

impl<F> AmbientField<F>
where
    F: Fn(&AmbientPoint) -> Vec4 + Sync,
{
    pub fn new(f: F) -> Self {
        AmbientField { f }
    }
}

impl<F> VectorField for AmbientField<F>
where
    F: Fn(&AmbientPoint) -> Vec4 + Sync,
{
    fn coefficients(&self, metric: &BergerMetric, p: &AmbientPoint) -> Vec3 {
        metric.coefficients_raw(p, &(self.f)(p))
    }
}

/// A field given by coefficient callables, with optional analytic derivative.
pub struct CoefficientField<F, D> {
    f: F,
    d: Option<D>,
}

impl<F> CoefficientField<F, fn(&AmbientPoint, &TangentVector) -> Vec3>
where
    F: Fn(&AmbientPoint) -> Vec3 + Sync,
{
    pub fn numeric(f: F) -> Self {
        CoefficientField { f, d: None }
    }
}

impl<F, D> CoefficientField<F, D>
where
    F: Fn(&AmbientPoint) -> Vec3 + Sync,
    D: Fn(&AmbientPoint, &TangentVector) -> Vec3 + Sync,
{
    pub fn analytic(f: F, d: D) -> Self {
        CoefficientField { f, d: Some(d) }
    }
}

impl<F, D> VectorField for CoefficientField<F, D>
where
    F: Fn(&AmbientPoint) -> Vec3 + Sync,
    D: Fn(&AmbientPoint, &TangentVector) -> Vec3 + Sync,
{
    fn coefficients(&self, _metric: &BergerMetric, p: &AmbientPoint) -> Vec3 {
        (self.f)(p)
    }

    fn coefficient_derivative(&self, _: &BergerMetric, p: &AmbientPoint, x: &TangentVector) -> Option<Vec3> {
        self.d.as_ref().map(|d| d(p, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn pt(x: [f64; 4]) -> AmbientPoint {
        AmbientPoint::from_slice(x).unwrap()
    }

    #[test]
    fn hopf_map_examples() {
        assert_abs_diff_eq!(hopf_map(&pt([1.0, 0.0, 0.0, 0.0])), Vec3::new(0.0, 0.0, 0.5));
        assert_abs_diff_eq!(hopf_map(&pt([0.0, 0.0, 1.0, 0.0])), Vec3::new(0.0, 0.0, -0.5));
        let p = pt([FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0]);
        assert_abs_diff_eq!(hopf_map(&p), Vec3::new(0.5, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn frames_at_north_pole() {
        let p = pt([1.0, 0.0, 0.0, 0.0]);
        let f = BergerMetric::new(1.0).unwrap().frame_at(&p);
        assert_eq!(*f.e1.vector(), Vec4::new(0.0, 1.0, 0.0, 0.0));
        assert_eq!(*f.e2.vector(), Vec4::new(0.0, 0.0, 0.0, 1.0));
        assert_eq!(*f.e3.vector(), Vec4::new(0.0, 0.0, 1.0, 0.0));
        let f2 = BergerMetric::new(2.0).unwrap().frame_at(&p);
        assert_eq!(*f2.e1.vector(), Vec4::new(0.0, 0.5, 0.0, 0.0));
    }

    #[test]
    fn metric_signature_on_frame() {
        let m = BergerMetric::new(0.7).unwrap();
        let p = AmbientPoint::normalized(Vec4::new(0.3, -0.2, 0.9, 0.1)).unwrap();
        let f = m.frame_at(&p);
        assert_abs_diff_eq!(m.metric(&f.e1, &f.e1).unwrap(), -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.metric(&f.e2, &f.e2).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.metric(&f.e2, &f.e3).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn metric_rejects_mismatched_bases() {
        let m = BergerMetric::new(1.0).unwrap();
        let a = m.frame_at(&pt([1.0, 0.0, 0.0, 0.0])).e2;
        let b = m.frame_at(&pt([0.0, 1.0, 0.0, 0.0])).e2;
        assert!(matches!(m.metric(&a, &b), Err(Error::BasePointMismatch)));
        assert!(matches!(m.cross(&a, &b), Err(Error::BasePointMismatch)));
    }

    #[test]
    fn frame_coefficients_examples() {
        let m = BergerMetric::new(1.5).unwrap();
        let p = AmbientPoint::normalized(Vec4::new(0.1, 0.5, -0.4, 0.3)).unwrap();
        let f = m.frame_at(&p);
        assert_abs_diff_eq!(m.frame_coefficients(&f.e1).as_vec(), Vec3::new(1.0, 0.0, 0.0), epsilon = 1e-14);
        let v = f.e2.try_add(&f.e3).unwrap();
        assert_abs_diff_eq!(m.frame_coefficients(&v).as_vec(), Vec3::new(0.0, 1.0, 1.0), epsilon = 1e-14);
    }

    #[test]
    fn cross_examples() {
        let m = BergerMetric::new(1.3).unwrap();
        let p = AmbientPoint::normalized(Vec4::new(0.2, 0.1, 0.7, -0.4)).unwrap();
        let f = m.frame_at(&p);
        let c = m.cross(&f.e2, &f.e3).unwrap();
        assert_abs_diff_eq!(*c.vector(), -f.e1.vector(), epsilon = 1e-14);
        let c = m.cross(&f.e1, &f.e2).unwrap();
        assert_abs_diff_eq!(*c.vector(), *f.e3.vector(), epsilon = 1e-14);
        let c = m.cross(&f.e2, &f.e2).unwrap();
        assert_abs_diff_eq!(*c.vector(), Vec4::zeros());
    }

    #[test]
    fn connection_table_entries() {
        let eps = 1.7;
        let m = BergerMetric::new(eps).unwrap();
        let p = AmbientPoint::normalized(Vec4::new(0.5, 0.5, -0.5, 0.5)).unwrap();
        let f = m.frame_at(&p);
        let e1 = ConstantFrameField::new(1.0, 0.0, 0.0);
        let e2 = ConstantFrameField::new(0.0, 1.0, 0.0);
        let d = m.covariant_derivative(&f.e2, &e1, DEFAULT_FD_STEP).unwrap();
        assert_abs_diff_eq!(*d.vector(), f.e3.vector() * eps, epsilon = 1e-14);
        let d = m.covariant_derivative(&f.e1, &e2, DEFAULT_FD_STEP).unwrap();
        assert_abs_diff_eq!(*d.vector(), f.e3.vector() * ((2.0 + eps * eps) / eps), epsilon = 1e-14);
        let d = m.covariant_derivative(&f.e1, &e1, DEFAULT_FD_STEP).unwrap();
        assert_abs_diff_eq!(*d.vector(), Vec4::zeros(), epsilon = 1e-14);
    }

    #[test]
    fn nonpositive_step_is_config_error() {
        let m = BergerMetric::new(1.0).unwrap();
        let f = m.frame_at(&pt([1.0, 0.0, 0.0, 0.0]));
        let field = ConstantFrameField::new(1.0, 0.0, 0.0);
        assert!(matches!(m.covariant_derivative(&f.e2, &field, 0.0), Err(Error::Config(_))));
        assert!(matches!(m.killing_residual_fd(&f.e2, -1e-5), Err(Error::Config(_))));
    }

    #[test]
    fn killing_examples() {
        let m = BergerMetric::new(0.8).unwrap();
        let p = AmbientPoint::normalized(Vec4::new(-0.3, 0.2, 0.4, 0.8)).unwrap();
        let f = m.frame_at(&p);
        assert!(m.killing_residual(&f.e2).unwrap() < 1e-14);
        assert!(m.killing_residual(&f.e3).unwrap() < 1e-14);
        assert_eq!(m.killing_residual(&TangentVector::zero(p)).unwrap(), 0.0);
    }

    #[test]
    fn curvature_examples() {
        let eps = 1.4;
        let m = BergerMetric::new(eps).unwrap();
        let p = AmbientPoint::normalized(Vec4::new(0.1, -0.6, 0.3, 0.2)).unwrap();
        let f = m.frame_at(&p);
        for mode in [CurvatureMode::FrameTable, CurvatureMode::ClosedForm] {
            let r = m.curvature(&f.e1, &f.e2, &f.e2, mode).unwrap();
            assert_abs_diff_eq!(*r.vector(), f.e1.vector() * (-eps * eps), epsilon = 1e-13);
            let r = m.curvature(&f.e2, &f.e3, &f.e3, mode).unwrap();
            assert_abs_diff_eq!(*r.vector(), f.e2.vector() * (4.0 + 3.0 * eps * eps), epsilon = 1e-13);
            let r = m.curvature(&f.e2, &f.e2, &f.e3, mode).unwrap();
            assert_abs_diff_eq!(*r.vector(), Vec4::zeros(), epsilon = 1e-13);
        }
    }

    #[test]
    fn curvature_mode_parsing() {
        assert_eq!("frame-table".parse::<CurvatureMode>().unwrap(), CurvatureMode::FrameTable);
        assert!("ricci".parse::<CurvatureMode>().is_err());
    }

    #[test]
    fn params_validation() {
        assert!(BergerParams::new(1.0, Causality::Spacelike, 1.0).is_err());
        assert!(BergerParams::new(1.0, Causality::Spacelike, -0.5).is_err());
        assert!(BergerParams::new(1.0, Causality::Spacelike, -1.5).is_ok());
        assert!(BergerParams::new(1.0, Causality::Timelike, 0.0).is_err());
        assert!(BergerParams::new(1.0, Causality::Timelike, 0.1).is_ok());
        assert!(BergerParams::new(0.0, Causality::Timelike, 2.0).is_err());
        assert!(BergerParams::new(-1.0, Causality::Timelike, 2.0).is_err());
    }

    #[test]
    fn tangency_enforcement() {
        let p = pt([1.0, 0.0, 0.0, 0.0]);
        let tiny = TangentVector::new(p, Vec4::new(1e-9, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(tiny.vector()[0], 0.0);
        assert!(matches!(
            TangentVector::new(p, Vec4::new(1e-3, 1.0, 0.0, 0.0)),
            Err(Error::NotTangent { .. })
        ));
        assert!(AmbientPoint::new(Vec4::new(1.0 + 1e-9, 0.0, 0.0, 0.0)).is_err());
    }
}
