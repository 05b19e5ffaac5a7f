//! Unit normal, angle function and the `(T, JT)` frame of a surface.

use crate::ambient::{cross_coefficients, AmbientPoint, BergerParams, Causality, TangentVector, Vec3};
use crate::error::{Error, Result};
use crate::helix::SurfaceJet;

/// Relative size of `F_u ∧ F_v` below which the parametrization is not an immersion.
pub const RANK_TOLERANCE: f64 = 1e-12;
/// Relative size of `|−N1² + N2² + N3²|` below which the normal is null.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// `g_ε` on frame coefficients: `−a1 b1 + a2 b2 + a3 b3`.
pub fn g(a: &Vec3, b: &Vec3) -> f64 {
    -a.x * b.x + a.y * b.y + a.z * b.z
}

#[derive(Clone, Copy, Debug)]
pub struct NormalData {
    pub point: AmbientPoint,
    pub n: TangentVector,
    pub nu: f64,
    /// Tangential projection of `E1`.
    pub t: TangentVector,
    pub jt: TangentVector,
    pub phi: f64,
    /// Sign of `−N1² + N2² + N3²` before normalization; equals `λ` on a surface of the declared type.
    pub causal_sign: f64,
    pub n_coeffs: Vec3,
    pub t_coeffs: Vec3,
    pub jt_coeffs: Vec3,
    pub fu_coeffs: Vec3,
    pub fv_coeffs: Vec3,
}

impl NormalData {
    /// `J X = N ∧ X` on frame coefficients.
    pub fn j(&self, x: &Vec3) -> Vec3 {
        cross_coefficients(&self.n_coeffs, x)
    }
}

/// `sin²` of the angle between `F_u` and `F_v`.
pub fn rank_measure(jet: &SurfaceJet) -> f64 {
    let (uu, vv, uv) = (jet.fu.norm_squared(), jet.fv.norm_squared(), jet.fu.dot(&jet.fv));
    let denom = uu * vv;
    if denom == 0.0 {
        return 0.0;
    }
    ((uu * vv - uv * uv) / denom).max(0.0)
}

/// Unit normal of the surface at the jet, oriented so that `ν` has the sign of `params.nu`.
pub fn unit_normal(jet: &SurfaceJet, params: &BergerParams) -> Result<NormalData> {
    let rank = rank_measure(jet);
    if rank < RANK_TOLERANCE {
        return Err(Error::Rank { measure: rank });
    }
    let metric = &params.metric;
    let p = jet.f;
    let a = metric.coefficients_raw(&p, &jet.fu);
    let b = metric.coefficients_raw(&p, &jet.fv);
    let mut n = Vec3::new(
        a.z * b.y - a.y * b.z,
        a.z * b.x - a.x * b.z,
        a.x * b.y - a.y * b.x,
    );
    let q = g(&n, &n);
    let measure = q.abs() / (jet.fu.norm_squared() * jet.fv.norm_squared());
    if measure < DEGENERACY_TOLERANCE {
        return Err(Error::DegenerateNormal { measure });
    }
    n /= q.abs().sqrt();
    let lambda = params.lambda();
    if (lambda * -n.x).signum() != params.nu.signum() {
        n = -n;
    }
    let nu = lambda * -n.x;

    // Tangential part of E1: solve the induced Gram system for E1 = p F_u + q F_v + (normal part).
    let e1 = Vec3::new(1.0, 0.0, 0.0);
    let (guu, guv, gvv) = (g(&a, &a), g(&a, &b), g(&b, &b));
    let (ru, rv) = (g(&e1, &a), g(&e1, &b));
    let det = guu * gvv - guv * guv;
    if det == 0.0 {
        return Err(Error::DegenerateNormal { measure: 0.0 });
    }
    let cu = (ru * gvv - rv * guv) / det;
    let cv = (guu * rv - guv * ru) / det;
    let t = a * cu + b * cv;
    let jt = cross_coefficients(&n, &t);

    let frame = metric.frame_at(&p);
    Ok(NormalData {
        point: p,
        n: frame.combine(&n),
        nu,
        t: frame.combine(&t),
        jt: frame.combine(&jt),
        phi: n.z.atan2(n.y),
        causal_sign: q.signum(),
        n_coeffs: n,
        t_coeffs: t,
        jt_coeffs: jt,
        fu_coeffs: a,
        fv_coeffs: b,
    })
}

/// `ν = λ g_ε(N, E1)` at the jet.
pub fn angle_function(jet: &SurfaceJet, params: &BergerParams) -> Result<f64> {
    Ok(unit_normal(jet, params)?.nu)
}

/// Hyperbolic angle between `N` and `E1`: `ν = cosh ϑ` (spacelike) or `ν = sinh ϑ` (timelike).
pub fn hyperbolic_angle(nu: f64, causality: Causality) -> Result<f64> {
    match causality {
        Causality::Spacelike if nu.abs() <= 1.0 => Err(Error::Domain(format!(
            "spacelike hyperbolic angle requires |nu| > 1, got {nu}"
        ))),
        Causality::Spacelike => Ok(nu.abs().acosh()),
        Causality::Timelike if nu == 0.0 => Err(Error::Domain("nu = 0 is a Hopf tube".into())),
        Causality::Timelike => Ok(nu.asinh()),
    }
}
