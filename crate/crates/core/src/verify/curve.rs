//! Metric invariants of the torus geodesic `β` as a curve in `S³` and in `S³_ε`.

use crate::ambient::{AmbientPoint, BergerParams, Vec4};
use crate::error::Result;
use crate::helix::{beta_arclength, beta_arclength_derivative, HelixConstants};
use crate::verify::normal::hyperbolic_angle;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveMetrics {
    /// `‖β'‖_ε = ε√(λ/B)` (closed form).
    pub speed_eps: f64,
    /// `g_ε(β', E1) / ‖β'‖_ε = −λ√(λ+ν²)` (closed form).
    pub helix_angle: f64,
    /// `(1 − d²)/d`.
    pub kappa_g: f64,
    /// `2ε|ν| / √(λ+ν²)`.
    pub kappa_g_alt: f64,
    pub tau_g: f64,
}

/// Values measured on the curve itself rather than read from closed forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasuredCurve {
    pub speed_eps: f64,
    pub helix_angle: f64,
    /// Geodesic curvature in round `S³` from a finite-difference Frenet frame.
    pub kappa_g: f64,
    /// Absolute torsion in round `S³` from the same frame.
    pub tau_g: f64,
    /// `sinh ϑ` (spacelike) or `−cosh ϑ` (timelike) from the hyperbolic angle of `ν`.
    pub hyperbolic: f64,
}

pub fn curve_metrics(c: &HelixConstants, params: &BergerParams) -> CurveMetrics {
    let eps = params.epsilon();
    let lam = params.lambda();
    let nu = params.nu;
    CurveMetrics {
        speed_eps: eps * (lam / c.b).sqrt(),
        helix_angle: -lam * c.sqrt_lambda_nu2,
        kappa_g: (1.0 - c.d * c.d) / c.d,
        kappa_g_alt: 2.0 * eps * nu.abs() / c.sqrt_lambda_nu2,
        tau_g: 1.0,
    }
}

/// Sixth-order accurate derivatives `(β', β'', β''')` of the arc-length curve at `s`.
fn fd_derivatives(c: &HelixConstants, params: &BergerParams, s: f64) -> (Vec4, Vec4, Vec4) {
    let f = |x: f64| beta_arclength(c, params.causality, x);
    let level = |h: f64| {
        let (p1, m1, p2, m2) = (f(s + h), f(s - h), f(s + 2.0 * h), f(s - 2.0 * h));
        let f0 = f(s);
        let d1 = (p1 - m1) / (2.0 * h);
        let d2 = (p1 - f0 * 2.0 + m1) / (h * h);
        let d3 = (p2 - p1 * 2.0 + m1 * 2.0 - m2) / (2.0 * h * h * h);
        (d1, d2, d3)
    };
    // The fast component oscillates with frequency 1/d; scale the step to it.
    let h = 0.02 * c.d;
    let (a1, a2, a3) = level(h);
    let (b1, b2, b3) = level(0.5 * h);
    let r = |coarse: Vec4, fine: Vec4| (fine * 4.0 - coarse) / 3.0;
    (r(a1, b1), r(a2, b2), r(a3, b3))
}

/// `κ` and `|τ|` of a unit-speed curve in round `S³` from its position and first three derivatives.
pub fn frenet_round_sphere(b: &Vec4, d1: &Vec4, d2: &Vec4, d3: &Vec4) -> (f64, f64) {
    let accel = d2 + b;
    let kappa = accel.norm();
    let n = accel / kappa;
    let t = d1 / d1.norm();
    // d/ds(κ n) = β''' + β'; removing the β, t and n components leaves κ τ B.
    let w = d3 + d1;
    let rest = w - b * w.dot(b) - t * w.dot(&t) - n * w.dot(&n);
    (kappa, rest.norm() / kappa)
}

/// Measures speed, helix angle, curvature and torsion of `β` at arc length `s`.
pub fn measure_curve(c: &HelixConstants, params: &BergerParams, s: f64) -> Result<MeasuredCurve> {
    let metric = &params.metric;
    let p = AmbientPoint::normalized(beta_arclength(c, params.causality, s))?;
    let db = beta_arclength_derivative(c, params.causality, s, 1);
    let norm2 = metric.metric_raw(&p, &db, &db);
    let speed_eps = norm2.abs().sqrt();
    let e1 = crate::ambient::j1() * p.coords() / params.epsilon();
    let helix_angle = metric.metric_raw(&p, &db, &e1) / speed_eps;

    let (d1, d2, d3) = fd_derivatives(c, params, s);
    let (kappa_g, tau_g) = frenet_round_sphere(p.coords(), &d1, &d2, &d3);

    let theta = hyperbolic_angle(params.nu, params.causality)?;
    let hyperbolic = match params.causality {
        crate::ambient::Causality::Spacelike => theta.sinh(),
        crate::ambient::Causality::Timelike => -theta.cosh(),
    };
    Ok(MeasuredCurve {
        speed_eps,
        helix_angle,
        kappa_g,
        tau_g,
        hyperbolic,
    })
}
