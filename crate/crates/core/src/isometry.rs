//! One-parameter families `Q(v)` of orthogonal 4×4 matrices that commute
//! (or anticommute) with `J1`, i.e. curves in the isometry group of S³_ε.
//!
//! A family is driven by a constant angle `ξ` and three scalar curves
//! `ξ1(v), ξ2(v), ξ3(v)`. The rows of `Q(v)` are
//!
//! ```text
//! r1,  ±J1 r1,  cos ξ J2 r1 + sin ξ J3 r1,  ∓cos ξ J3 r1 ± sin ξ J2 r1
//! ```
//!
//! where `r1 = (cos ξ1 cos ξ2, −cos ξ1 sin ξ2, sin ξ1 cos ξ3, −sin ξ1 sin ξ3)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::ambient::{j1, j2, j3, Mat4, Vec4};
use crate::error::{Error, Result};

/// Number of evenly spaced samples used to validate a family on its domain.
pub const VALIDATION_SAMPLES: usize = 257;
/// `Q J1 − J1 Q` (or `Q J1 + J1 Q`) must vanish to this entrywise.
pub const COMMUTATION_TOLERANCE: f64 = 1e-12;
pub const COMPAT_TOLERANCE: f64 = 1e-9;

/// A scalar function of `v` together with its first derivative.
pub trait ScalarCurve: Send + Sync + fmt::Debug {
    fn value(&self, v: f64) -> f64;
    fn derivative(&self, v: f64) -> f64;
}

/// Analytic curves that can be named on the command line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NamedCurve {
    Constant(f64),
    /// `slope · v + offset`
    Linear { slope: f64, offset: f64 },
    /// `scale · e^v`
    Exp { scale: f64 },
    /// `amplitude · sin(v)`
    Sin { amplitude: f64 },
}

impl NamedCurve {
    pub fn identity() -> Self {
        NamedCurve::Linear {
            slope: 1.0,
            offset: 0.0,
        }
    }
}

impl ScalarCurve for NamedCurve {
    fn value(&self, v: f64) -> f64 {
        match *self {
            NamedCurve::Constant(c) => c,
            NamedCurve::Linear { slope, offset } => slope * v + offset,
            NamedCurve::Exp { scale } => scale * v.exp(),
            NamedCurve::Sin { amplitude } => amplitude * v.sin(),
        }
    }

    fn derivative(&self, v: f64) -> f64 {
        match *self {
            NamedCurve::Constant(_) => 0.0,
            NamedCurve::Linear { slope, .. } => slope,
            NamedCurve::Exp { scale } => scale * v.exp(),
            NamedCurve::Sin { amplitude } => amplitude * v.cos(),
        }
    }
}

impl fmt::Display for NamedCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NamedCurve::Constant(c) => write!(f, "const:{c}"),
            NamedCurve::Linear { slope, offset } if slope == 1.0 && offset == 0.0 => write!(f, "v"),
            NamedCurve::Linear { slope, offset } => write!(f, "linear:{slope}:{offset}"),
            NamedCurve::Exp { scale } if scale == 1.0 => write!(f, "exp"),
            NamedCurve::Exp { scale } => write!(f, "exp:{scale}"),
            NamedCurve::Sin { amplitude } if amplitude == 1.0 => write!(f, "sin"),
            NamedCurve::Sin { amplitude } => write!(f, "sin:{amplitude}"),
        }
    }
}

impl std::str::FromStr for NamedCurve {
    type Err = Error;

    /// Accepts `v`, `exp[:scale]`, `sin[:amplitude]`, `const:c`, `linear:slope[:offset]`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let nums: Vec<f64> = parts
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number `{p}` in curve `{s}`")))
            })
            .collect::<Result<_>>()?;
        let arity = |lo: usize, hi: usize| {
            if nums.len() < lo || nums.len() > hi {
                Err(Error::Config(format!("curve `{s}`: wrong number of arguments")))
            } else {
                Ok(())
            }
        };
        match head {
            "v" => {
                arity(0, 0)?;
                Ok(NamedCurve::identity())
            }
            "exp" => {
                arity(0, 1)?;
                Ok(NamedCurve::Exp {
                    scale: nums.first().copied().unwrap_or(1.0),
                })
            }
            "sin" => {
                arity(0, 1)?;
                Ok(NamedCurve::Sin {
                    amplitude: nums.first().copied().unwrap_or(1.0),
                })
            }
            "const" => {
                arity(1, 1)?;
                Ok(NamedCurve::Constant(nums[0]))
            }
            "linear" => {
                arity(1, 2)?;
                Ok(NamedCurve::Linear {
                    slope: nums[0],
                    offset: nums.get(1).copied().unwrap_or(0.0),
                })
            }
            other => Err(Error::Config(format!(
                "unknown curve `{other}` (expected v, exp, sin, const:c, linear:a[:b])"
            ))),
        }
    }
}

/// Wraps a curve without a known derivative; differentiates with central differences.
pub struct FdCurve<F> {
    f: F,
    step: f64,
}

impl<F: Fn(f64) -> f64 + Send + Sync> FdCurve<F> {
    pub fn new(f: F) -> Self {
        FdCurve { f, step: 1e-6 }
    }

    pub fn with_step(f: F, step: f64) -> Self {
        FdCurve { f, step }
    }
}

impl<F> fmt::Debug for FdCurve<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FdCurve").field("step", &self.step).finish()
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> ScalarCurve for FdCurve<F> {
    fn value(&self, v: f64) -> f64 {
        (self.f)(v)
    }

    fn derivative(&self, v: f64) -> f64 {
        let h = self.step;
        ((self.f)(v + h) - (self.f)(v - h)) / (2.0 * h)
    }
}

/// Selects the upper or lower sign of the `±/∓` pair in the row formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignChoice {
    Upper,
    Lower,
}

impl SignChoice {
    pub fn sign(self) -> f64 {
        match self {
            SignChoice::Upper => 1.0,
            SignChoice::Lower => -1.0,
        }
    }

    /// The sign choice whose matrices commute with `J1`, found by evaluating
    /// both on a generic set of angles.
    pub fn commuting() -> SignChoice {
        let probe = |s: SignChoice| {
            let q = rows_matrix(&r1(0.37, 1.1, -0.6), 0.9, s);
            (q * j1() - j1() * q).abs().max()
        };
        if probe(SignChoice::Upper) <= probe(SignChoice::Lower) {
            SignChoice::Upper
        } else {
            SignChoice::Lower
        }
    }

    pub fn anticommuting() -> SignChoice {
        match SignChoice::commuting() {
            SignChoice::Upper => SignChoice::Lower,
            SignChoice::Lower => SignChoice::Upper,
        }
    }
}

/// An element of O(4).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthogonalMatrix4(Mat4);

impl OrthogonalMatrix4 {
    pub fn new(m: Mat4) -> Result<Self> {
        let defect = (m.transpose() * m - Mat4::identity()).abs().max();
        if defect > 1e-12 {
            return Err(Error::Validation(format!("matrix is not orthogonal (defect {defect:e})")));
        }
        Ok(OrthogonalMatrix4(m))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn commutator_with_j1(&self) -> f64 {
        (self.0 * j1() - j1() * self.0).abs().max()
    }

    pub fn anticommutator_with_j1(&self) -> f64 {
        (self.0 * j1() + j1() * self.0).abs().max()
    }
}

/// `r1(ξ1, ξ2, ξ3)`, the first row of `Q`.
pub fn r1(xi1: f64, xi2: f64, xi3: f64) -> Vec4 {
    let (s1, c1) = xi1.sin_cos();
    let (s2, c2) = xi2.sin_cos();
    let (s3, c3) = xi3.sin_cos();
    Vec4::new(c1 * c2, -c1 * s2, s1 * c3, -s1 * s3)
}

/// Derivative of `r1` along the curve, by the chain rule.
fn r1_dot(xi1: f64, xi2: f64, xi3: f64, d1: f64, d2: f64, d3: f64) -> Vec4 {
    let (s1, c1) = xi1.sin_cos();
    let (s2, c2) = xi2.sin_cos();
    let (s3, c3) = xi3.sin_cos();
    Vec4::new(
        -s1 * c2 * d1 - c1 * s2 * d2,
        s1 * s2 * d1 - c1 * c2 * d2,
        c1 * c3 * d1 - s1 * s3 * d3,
        -c1 * s3 * d1 - s1 * c3 * d3,
    )
}

/// The four constant matrices `M_k` with `row_k(Q) = M_k r1`.
fn row_maps(xi: f64, sign: SignChoice) -> [Mat4; 4] {
    let s = sign.sign();
    let (sx, cx) = xi.sin_cos();
    [
        Mat4::identity(),
        j1() * s,
        j2() * cx + j3() * sx,
        (j3() * (-cx) + j2() * sx) * s,
    ]
}

fn rows_matrix(r: &Vec4, xi: f64, sign: SignChoice) -> Mat4 {
    let maps = row_maps(xi, sign);
    let mut q = Mat4::zeros();
    for (k, m) in maps.iter().enumerate() {
        q.set_row(k, &(m * r).transpose());
    }
    q
}

/// `Q(v)` built from `ξ` and the curves `ξ1, ξ2, ξ3`.
#[derive(Clone, Debug)]
pub struct IsometryFamily {
    pub xi: f64,
    pub xi1: Arc<dyn ScalarCurve>,
    pub xi2: Arc<dyn ScalarCurve>,
    pub xi3: Arc<dyn ScalarCurve>,
    pub sign: SignChoice,
    /// Closed interval of admissible `v`.
    pub domain: (f64, f64),
    /// Set when `v` is normalized so that `<F_v, F_v> = λ + ν²`.
    pub canonical_v: bool,
}

impl IsometryFamily {
    pub fn new(
        xi: f64,
        xi1: Arc<dyn ScalarCurve>,
        xi2: Arc<dyn ScalarCurve>,
        xi3: Arc<dyn ScalarCurve>,
    ) -> Self {
        IsometryFamily {
            xi,
            xi1,
            xi2,
            xi3,
            sign: SignChoice::commuting(),
            domain: (-2.0 * PI, 2.0 * PI),
            canonical_v: false,
        }
    }

    pub fn with_sign(mut self, sign: SignChoice) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = (lo.min(hi), lo.max(hi));
        self
    }

    pub fn with_canonical_v(mut self, canonical: bool) -> Self {
        self.canonical_v = canonical;
        self
    }

    pub fn angles(&self, v: f64) -> (f64, f64, f64) {
        (self.xi1.value(v), self.xi2.value(v), self.xi3.value(v))
    }

    pub fn angle_rates(&self, v: f64) -> (f64, f64, f64) {
        (self.xi1.derivative(v), self.xi2.derivative(v), self.xi3.derivative(v))
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.domain.0 && v <= self.domain.1
    }

    pub fn check_domain(&self, v: f64) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                v,
                lo: self.domain.0,
                hi: self.domain.1,
            })
        }
    }

    /// Raw `Q(v)` with no orthogonality re-check (rows are orthonormal by construction).
    pub fn q_matrix(&self, v: f64) -> Mat4 {
        let (a1, a2, a3) = self.angles(v);
        rows_matrix(&r1(a1, a2, a3), self.xi, self.sign)
    }

    pub fn build_q(&self, v: f64) -> Result<OrthogonalMatrix4> {
        OrthogonalMatrix4::new(self.q_matrix(v))
    }

    /// `dQ/dv`, from the analytic rates of the `ξ` curves.
    pub fn q_derivative(&self, v: f64) -> Mat4 {
        let (a1, a2, a3) = self.angles(v);
        let (d1, d2, d3) = self.angle_rates(v);
        rows_matrix(&r1_dot(a1, a2, a3, d1, d2, d3), self.xi, self.sign)
    }

    /// `cos²ξ1 ξ2' − sin²ξ1 ξ3'`; zero for families that sweep helix surfaces.
    pub fn compat_residual(&self, v: f64) -> f64 {
        let (s1, c1) = self.xi1.value(v).sin_cos();
        c1 * c1 * self.xi2.derivative(v) - s1 * s1 * self.xi3.derivative(v)
    }

    pub fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        let (lo, hi) = self.domain;
        let n = VALIDATION_SAMPLES;
        (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
    }

    /// Largest `|compat_residual|` over the validation samples.
    pub fn max_compat_residual(&self) -> f64 {
        self.samples()
            .map(|v| self.compat_residual(v).abs())
            .fold(0.0, f64::max)
    }

    /// Checks that every sampled `Q(v)` commutes with `J1`.
    pub fn validate_commuting(&self) -> Result<()> {
        for v in self.samples() {
            let q = self.build_q(v)?;
            let c = q.commutator_with_j1();
            if !(c <= COMMUTATION_TOLERANCE) {
                return Err(Error::Validation(format!(
                    "Q({v}) does not commute with J1 (|QJ1 - J1Q| = {c:e}); \
                     the anticommuting branch cannot sweep a helix surface"
                )));
            }
        }
        Ok(())
    }

    pub fn validate_compat(&self) -> Result<()> {
        let worst = self.max_compat_residual();
        if !(worst <= COMPAT_TOLERANCE) {
            return Err(Error::Validation(format!(
                "family violates cos^2(xi1) xi2' - sin^2(xi1) xi3' = 0 (max residual {worst:e})"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn example1(xi2: NamedCurve) -> IsometryFamily {
        let c = Arc::new(xi2);
        IsometryFamily::new(FRAC_PI_2, Arc::new(NamedCurve::Constant(FRAC_PI_4)), c.clone(), c)
    }

    /// The matrix displayed for Example 1, as a function of `ξ2`.
    fn example1_matrix(t: f64) -> Mat4 {
        let (s, c) = t.sin_cos();
        #[rustfmt::skip]
        let m = Mat4::new(
             c, -s,  c, -s,
             s,  c,  s,  c,
            -c, -s,  c,  s,
             s, -c, -s,  c,
        );
        m * FRAC_1_SQRT_2
    }

    #[test]
    fn r1_examples() {
        assert_abs_diff_eq!(r1(0.0, 0.0, 0.0), Vec4::new(1.0, 0.0, 0.0, 0.0));
        assert_abs_diff_eq!(
            r1(FRAC_PI_4, 0.0, 0.0),
            Vec4::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(r1(FRAC_PI_2, 0.0, FRAC_PI_2), Vec4::new(0.0, 0.0, 0.0, -1.0), epsilon = 1e-15);
    }

    #[test]
    fn upper_sign_commutes() {
        assert_eq!(SignChoice::commuting(), SignChoice::Upper);
        assert_eq!(SignChoice::anticommuting(), SignChoice::Lower);
    }

    #[test]
    fn example1_matches_displayed_matrix() {
        let fam = example1(NamedCurve::identity());
        for v in [0.0, FRAC_PI_2, -1.3, 2.9] {
            let q = fam.build_q(v).unwrap();
            assert_abs_diff_eq!(*q.matrix(), example1_matrix(v), epsilon = 1e-15);
            assert!(q.commutator_with_j1() < 1e-15);
        }
    }

    #[test]
    fn constant_family_has_zero_derivative() {
        let fam = IsometryFamily::new(
            0.4,
            Arc::new(NamedCurve::Constant(0.3)),
            Arc::new(NamedCurve::Constant(1.0)),
            Arc::new(NamedCurve::Constant(-2.0)),
        );
        assert_eq!(fam.q_derivative(0.7), Mat4::zeros());
    }

    #[test]
    fn example1_derivative_matches_fd_of_displayed_matrix() {
        let fam = example1(NamedCurve::identity());
        let h = 1e-5;
        let fd = (example1_matrix(h) - example1_matrix(-h)) / (2.0 * h);
        assert_abs_diff_eq!(fam.q_derivative(0.0), fd, epsilon = 1e-9);
    }

    #[test]
    fn compat_examples() {
        let fam = example1(NamedCurve::Exp { scale: 1.0 });
        for v in fam.samples() {
            assert_abs_diff_eq!(fam.compat_residual(v), 0.0, epsilon = 1e-12);
        }
        let bad = IsometryFamily::new(
            0.0,
            Arc::new(NamedCurve::Constant(0.0)),
            Arc::new(NamedCurve::identity()),
            Arc::new(NamedCurve::Constant(0.0)),
        );
        assert_eq!(bad.compat_residual(0.3), 1.0);
        assert!(bad.validate_compat().is_err());
    }

    #[test]
    fn anticommuting_branch_is_rejected() {
        let fam = example1(NamedCurve::identity()).with_sign(SignChoice::anticommuting());
        assert!(matches!(fam.validate_commuting(), Err(Error::Validation(_))));
        let q = fam.build_q(0.2).unwrap();
        assert!(q.anticommutator_with_j1() < 1e-15);
    }

    #[test]
    fn named_curve_parsing() {
        assert_eq!("v".parse::<NamedCurve>().unwrap(), NamedCurve::identity());
        assert_eq!("exp".parse::<NamedCurve>().unwrap(), NamedCurve::Exp { scale: 1.0 });
        assert_eq!(
            "linear:2:0.5".parse::<NamedCurve>().unwrap(),
            NamedCurve::Linear { slope: 2.0, offset: 0.5 }
        );
        assert_eq!("const:1.5".parse::<NamedCurve>().unwrap(), NamedCurve::Constant(1.5));
        assert!("const".parse::<NamedCurve>().is_err());
        assert!("cosh".parse::<NamedCurve>().is_err());
        assert!("linear:x".parse::<NamedCurve>().is_err());
        for c in ["v", "exp", "sin:2", "const:1.5", "linear:2:0.5"] {
            assert_eq!(c.parse::<NamedCurve>().unwrap().to_string(), c);
        }
    }

    #[test]
    fn fd_curve_adapter() {
        let c = FdCurve::new(|v: f64| v.sin());
        assert_abs_diff_eq!(c.derivative(0.3), 0.3f64.cos(), epsilon = 1e-9);
    }
}
