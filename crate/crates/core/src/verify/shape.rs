//! Weingarten map `A(X) = −∇_X N` by finite differences of the normal.

use nalgebra::Matrix2;

use crate::ambient::{BergerParams, Vec3};
use crate::error::{Error, Result};
use crate::helix::{HelixConstants, Surface};
use crate::verify::normal::{g, unit_normal, NormalData};

/// Finite-difference settings shared by the derivative-based checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdOptions {
    /// Parameter step for derivatives of `N` and `φ`.
    pub step: f64,
    /// One level of Richardson extrapolation on top of the central difference.
    pub richardson: bool,
    /// Outer step for `∂μ/∂u`, in units of the phase `2|ν|√(λB) u` of `μ`.
    pub mu_step: f64,
    /// Points with `|μ| / (2√(λB))` above this are treated as near a pole of `μ`.
    pub mu_pole_ratio: f64,
    /// Relative disagreement between Richardson levels above which a shape operator is unreliable.
    pub reliability: f64,
    /// `sin²` of the angle between `F_u` and `F_v` below which derivatives of `N` are not attempted.
    pub min_rank: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions {
            step: 1e-5,
            richardson: true,
            mu_step: 0.02,
            mu_pole_ratio: 5.0,
            reliability: 1e-4,
            min_rank: 1e-6,
        }
    }
}

impl FdOptions {
    pub fn validate(&self) -> Result<()> {
        for (name, h) in [("step", self.step), ("mu_step", self.mu_step)] {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::Config(format!("finite-difference {name} must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

/// Central difference of `f` at `x`, optionally Richardson-extrapolated.
/// Returns the estimate and the size of the correction.
pub fn central_difference<F, T>(f: F, x: f64, h: f64, richardson: bool) -> Result<(T, f64)>
where
    F: Fn(f64) -> Result<T>,
    T: Diff,
{
    let d = |h: f64| -> Result<T> { Ok(f(x + h)?.sub(&f(x - h)?).scale(0.5 / h)) };
    let coarse = d(h)?;
    if !richardson {
        return Ok((coarse, 0.0));
    }
    let fine = d(0.5 * h)?;
    let extrapolated = fine.scale(4.0 / 3.0).sub(&coarse.scale(1.0 / 3.0));
    let err = extrapolated.sub(&coarse).size();
    Ok((extrapolated, err))
}

/// Minimal vector-space operations needed by [`central_difference`].
pub trait Diff: Sized {
    fn sub(&self, other: &Self) -> Self;
    fn scale(&self, s: f64) -> Self;
    fn size(&self) -> f64;
}

impl Diff for f64 {
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn size(&self) -> f64 {
        self.abs()
    }
}

impl Diff for Vec3 {
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn size(&self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ShapeData {
    /// Columns are `A(T)` and `A(JT)` in the basis `(T, JT)`.
    pub matrix: Matrix2<f64>,
    pub mu: f64,
    /// `K̄ + λ det A` with the ambient sectional curvature of the tangent plane.
    pub gauss: f64,
    pub reliable: bool,
    /// Largest Richardson correction relative to the derivative size.
    pub fd_error: f64,
    /// Frame coefficients of `A(F_u)` and `A(F_v)`.
    pub a_fu: Vec3,
    pub a_fv: Vec3,
    pub normal: NormalData,
}

fn normal_coefficients<S: Surface + ?Sized>(surface: &S, params: &BergerParams, u: f64, v: f64) -> Result<Vec3> {
    Ok(unit_normal(&surface.jet(u, v)?, params)?.n_coeffs)
}

/// `(p, q)` with `x = p a + q b`, by least squares in coefficient space.
fn decompose(x: &Vec3, a: &Vec3, b: &Vec3) -> (f64, f64) {
    let (aa, ab, bb) = (a.dot(a), a.dot(b), b.dot(b));
    let (xa, xb) = (x.dot(a), x.dot(b));
    let det = aa * bb - ab * ab;
    ((xa * bb - xb * ab) / det, (aa * xb - ab * xa) / det)
}

pub fn shape_operator<S: Surface + ?Sized>(
    surface: &S,
    u: f64,
    v: f64,
    params: &BergerParams,
    opts: &FdOptions,
) -> Result<ShapeData> {
    opts.validate()?;
    let normal = unit_normal(&surface.jet(u, v)?, params)?;
    let (dn_u, err_u) = central_difference(|x| normal_coefficients(surface, params, x, v), u, opts.step, opts.richardson)?;
    let (dn_v, err_v) = central_difference(|y| normal_coefficients(surface, params, u, y), v, opts.step, opts.richardson)?;

    let metric = &params.metric;
    let n = normal.n_coeffs;
    let (a, b) = (normal.fu_coeffs, normal.fv_coeffs);
    let a_fu = -(dn_u + metric.connection_coefficients(&a, &n));
    let a_fv = -(dn_v + metric.connection_coefficients(&b, &n));

    let (t, jt) = (normal.t_coeffs, normal.jt_coeffs);
    let apply = |x: &Vec3| {
        let (p, q) = decompose(x, &a, &b);
        a_fu * p + a_fv * q
    };
    let (at, ajt) = (apply(&t), apply(&jt));
    let (tt, jj) = (g(&t, &t), g(&jt, &jt));
    let matrix = Matrix2::new(
        g(&at, &t) / tt,
        g(&ajt, &t) / tt,
        g(&at, &jt) / jj,
        g(&ajt, &jt) / jj,
    );
    let mu = matrix[(1, 1)];
    let fd_error = (err_u / dn_u.norm().max(1.0)).max(err_v / dn_v.norm().max(1.0));
    let nu = normal.nu;
    Ok(ShapeData {
        matrix,
        mu,
        gauss: gauss_curvature(&matrix, params, nu),
        reliable: fd_error <= opts.reliability,
        fd_error,
        a_fu,
        a_fv,
        normal,
    })
}

/// Ambient sectional curvature of a plane with normal angle `ν`.
pub fn ambient_sectional(params: &BergerParams, nu: f64) -> f64 {
    let eps2 = params.epsilon().powi(2);
    -eps2 - 4.0 * params.lambda() * nu * nu * (1.0 + eps2)
}

/// Gauss equation `K = K̄ + λ det A`.
pub fn gauss_curvature(matrix: &Matrix2<f64>, params: &BergerParams, nu: f64) -> f64 {
    ambient_sectional(params, nu) + params.lambda() * matrix.determinant()
}

/// Constant Gauss curvature `−4λ(1 + ε²)ν²` of a helix surface.
pub fn expected_gauss(params: &BergerParams) -> f64 {
    -4.0 * params.lambda() * (1.0 + params.epsilon().powi(2)) * params.nu * params.nu
}

/// Outcome of the `μ` equation at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MuPde {
    Residual(f64),
    /// Too close to a pole of `μ`; carries `|μ| / (2√(λB))`.
    Skipped(f64),
}

/// `∂μ/∂u + νμ² + 4λνB` with a seven-point derivative of `μ` along `u`.
pub fn check_mu_pde<S: Surface + ?Sized>(
    surface: &S,
    u: f64,
    v: f64,
    params: &BergerParams,
    constants: &HelixConstants,
    opts: &FdOptions,
) -> Result<MuPde> {
    let mu = |x: f64| -> Result<f64> { Ok(shape_operator(surface, x, v, params, opts)?.mu) };
    let scale = 2.0 * constants.sqrt_lambda_b;
    let m = mu(u)?;
    let ratio = m.abs() / scale;
    if ratio > opts.mu_pole_ratio {
        return Ok(MuPde::Skipped(ratio));
    }
    // μ = 2√(λB) tan θ with θ linear in u, so the usable step shrinks near a pole.
    let rate = 2.0 * params.nu.abs() * constants.sqrt_lambda_b;
    let h = opts.mu_step / (rate * (1.0 + ratio));
    let f = |k: f64| mu(u + k * h);
    let du = (45.0 * (f(1.0)? - f(-1.0)?) - 9.0 * (f(2.0)? - f(-2.0)?) + (f(3.0)? - f(-3.0)?)) / (60.0 * h);
    let nu = params.nu;
    Ok(MuPde::Residual((du + nu * m * m + 4.0 * params.lambda() * nu * constants.b).abs()))
}

/// Residuals of `φ_u + 2B/ε` and `φ_v`, with `φ` unwrapped around the base point.
pub fn check_normal_phase<S: Surface + ?Sized>(
    surface: &S,
    u: f64,
    v: f64,
    params: &BergerParams,
    opts: &FdOptions,
) -> Result<(f64, f64)> {
    opts.validate()?;
    let phi0 = unit_normal(&surface.jet(u, v)?, params)?.phi;
    let unwrap = |phi: f64| phi0 + wrap_angle(phi - phi0);
    let phase = |x: f64, y: f64| -> Result<f64> { Ok(unwrap(unit_normal(&surface.jet(x, y)?, params)?.phi)) };
    let (phi_u, _) = central_difference(|x| phase(x, v), u, opts.step, opts.richardson)?;
    let (phi_v, _) = central_difference(|y| phase(u, y), v, opts.step, opts.richardson)?;
    let b = 1.0 + params.lambda() * params.nu.powi(2) * (1.0 + params.epsilon().powi(2));
    Ok(((phi_u + 2.0 * b / params.epsilon()).abs(), phi_v.abs()))
}

/// Representative of `x` modulo `2π` in `[−π, π)`.
pub fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    (x + PI).rem_euclid(TAU) - PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::Causality;
    use crate::helix::PresetKind;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fig2_timelike_shape_form() {
        let p = PresetKind::Fig2.preset(Causality::Timelike).unwrap();
        let s = shape_operator(&p.spec, 0.013, 0.3, &p.spec.params, &FdOptions::default()).unwrap();
        assert_abs_diff_eq!(s.matrix[(0, 0)], 0.0, epsilon = 1e-4);
        assert_abs_diff_eq!(s.matrix[(0, 1)], -1.0, epsilon = 1e-4);
        assert_abs_diff_eq!(s.matrix[(1, 0)], 1.0, epsilon = 1e-4);
        assert!(s.reliable);
        assert_abs_diff_eq!(s.gauss, -32.0, epsilon = 32e-3);
        assert_abs_diff_eq!(s.matrix.trace(), s.mu, epsilon = 1e-4);
    }

    #[test]
    fn fig1_spacelike_gauss() {
        let p = PresetKind::Fig1.preset(Causality::Spacelike).unwrap();
        let s = shape_operator(&p.spec, 0.02, -0.4, &p.spec.params, &FdOptions::default()).unwrap();
        assert_abs_diff_eq!(s.gauss, 320.0, epsilon = 320e-3);
        assert_abs_diff_eq!(expected_gauss(&p.spec.params), 320.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_rates() {
        let p = PresetKind::Fig2.preset(Causality::Timelike).unwrap();
        let (ru, rv) = check_normal_phase(&p.spec, 0.05, 0.5, &p.spec.params, &FdOptions::default()).unwrap();
        assert!(ru < 1e-4 && rv < 1e-4, "{ru} {rv}");
    }

    #[test]
    fn mu_equation_along_a_u_line() {
        let p = PresetKind::Fig2.preset(Causality::Timelike).unwrap();
        let opts = FdOptions::default();
        let mut evaluated = 0;
        for k in 0..20 {
            let u = -0.5 + 0.05 * k as f64;
            let out = check_mu_pde(&p.spec, u, 0.3, &p.spec.params, &p.spec.constants, &opts);
            match out {
                Err(e) => assert!(e.is_degenerate(), "{e}"),
                Ok(MuPde::Residual(r)) => {
                    evaluated += 1;
                    assert!(r < 1e-3, "u = {u}: {r}");
                }
                Ok(MuPde::Skipped(ratio)) => assert!(ratio > opts.mu_pole_ratio),
            }
        }
        assert!(evaluated > 10);
    }

    #[test]
    fn wrap_angle_range() {
        assert_abs_diff_eq!(wrap_angle(3.0 * std::f64::consts::PI), -std::f64::consts::PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(0.25), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn bad_step_is_rejected() {
        let p = PresetKind::Fig2.preset(Causality::Timelike).unwrap();
        let opts = FdOptions { step: 0.0, ..FdOptions::default() };
        assert!(matches!(shape_operator(&p.spec, 0.0, 0.0, &p.spec.params, &opts), Err(Error::Config(_))));
    }
}
