//! Pointwise identities satisfied by the position vector of a helix surface.

use crate::ambient::{j1, BergerParams, Vec3, Vec4};
use crate::helix::{HelixConstants, SurfaceJet};
use crate::verify::normal::{g, NormalData};
use crate::verify::shape::ShapeData;

/// Euclidean norm of `F_uuuu + (b̃² − 2ã) F_uu + ã² F`.
pub fn check_ode(jet: &SurfaceJet, c: &HelixConstants) -> f64 {
    (jet.fuuuu + jet.fuu * c.ode_middle() + jet.position() * (c.a_tilde * c.a_tilde)).norm()
}

/// Names of the inner-product relations, in report order.
pub const PRODUCT_NAMES: [&str; 16] = [
    "product_f_f",
    "product_fu_fu",
    "product_f_fu",
    "product_fu_fuu",
    "product_fuu_fuu",
    "product_f_fuu",
    "product_fu_fuuu",
    "product_fuu_fuuu",
    "product_f_fuuu",
    "product_fuuu_fuuu",
    "product_j1f_fu",
    "product_j1f_fuu",
    "product_fu_j1fuu",
    "product_j1fu_fuuu",
    "product_j1fu_fuu_sum",
    "product_j1fuu_fuuu_sum",
];

/// One side of a relation: `Σ <a_i, b_i>` compared with a constant.
struct Relation<'a> {
    terms: Vec<(&'a Vec4, Vec4)>,
    rhs: f64,
}

impl Relation<'_> {
    /// `|lhs − rhs| / max(1, Σ |a_i| |b_i|)`.
    fn residual(&self) -> f64 {
        let lhs: f64 = self.terms.iter().map(|(a, b)| a.dot(b)).sum();
        let scale: f64 = self.terms.iter().map(|(a, b)| a.norm() * b.norm()).sum();
        (lhs - self.rhs).abs() / scale.max(1.0)
    }
}

/// Residuals of the sixteen inner-product relations, in [`PRODUCT_NAMES`] order.
pub fn check_products(jet: &SurfaceJet, c: &HelixConstants, params: &BergerParams) -> [f64; 16] {
    let j = j1();
    let f = *jet.position();
    let (fu, fuu, fuuu, fuuuu) = (jet.fu, jet.fuu, jet.fuuu, jet.fuuuu);
    let (jf, jfu, jfuu) = (j * f, j * fu, j * fuu);
    let lam = params.lambda();
    let first = (1.0 + lam * params.nu * params.nu) / params.epsilon();
    let one = |x: &Vec4, y: &Vec4, rhs: f64| {
        Relation {
            terms: vec![(x, *y)],
            rhs,
        }
        .residual()
    };
    [
        one(&f, &f, 1.0),
        one(&fu, &fu, c.a_tilde),
        one(&f, &fu, 0.0),
        one(&fu, &fuu, 0.0),
        one(&fuu, &fuu, c.big_d),
        one(&f, &fuu, -c.a_tilde),
        one(&fu, &fuuu, -c.big_d),
        one(&fuu, &fuuu, 0.0),
        one(&f, &fuuu, 0.0),
        one(&fuuu, &fuuu, c.big_e),
        one(&jf, &fu, first),
        one(&jf, &fuu, 0.0),
        one(&fu, &jfuu, c.big_i),
        one(&jfu, &fuuu, 0.0),
        Relation {
            terms: vec![(&jfu, fuu), (&jf, fuuu)],
            rhs: 0.0,
        }
        .residual(),
        Relation {
            terms: vec![(&jfuu, fuuu), (&jfu, fuuuu)],
            rhs: 0.0,
        }
        .residual(),
    ]
}

/// `g_ε(F_u, F_u) = g_ε(E1, F_u) = −(1 + λν²)` and `g_ε(F_u, F_v) − g_ε(F_v, E1) = 0`.
///
/// The first value is the larger of the two deviations in the first condition.
pub fn check_helix_conditions(jet: &SurfaceJet, params: &BergerParams) -> (f64, f64) {
    let m = &params.metric;
    let p = &jet.f;
    let e1 = j1() * p.coords() / params.epsilon();
    let target = -(1.0 + params.lambda() * params.nu * params.nu);
    let first = (m.metric_raw(p, &jet.fu, &jet.fu) - target)
        .abs()
        .max((m.metric_raw(p, &e1, &jet.fu) - target).abs());
    let second = (m.metric_raw(p, &jet.fu, &jet.fv) - m.metric_raw(p, &jet.fv, &e1)).abs();
    (first, second)
}

/// `|g_ε(N, N) − λ|`.
pub fn normal_norm_residual(n: &NormalData, params: &BergerParams) -> f64 {
    (g(&n.n_coeffs, &n.n_coeffs) - params.lambda()).abs()
}

/// Largest `|g_ε(N, F_u)|`, `|g_ε(N, F_v)|` relative to `|F_u|`, `|F_v|`.
pub fn normal_tangency_residual(n: &NormalData) -> f64 {
    let rel = |x: &Vec3| g(&n.n_coeffs, x).abs() / x.norm().max(1.0);
    rel(&n.fu_coeffs).max(rel(&n.fv_coeffs))
}

/// `|E1 − T − νN|` with the declared `ν`.
pub fn t_decomposition_residual(n: &NormalData, params: &BergerParams) -> f64 {
    (Vec3::new(1.0, 0.0, 0.0) - n.t_coeffs - n.n_coeffs * params.nu).norm()
}

/// Deviations of `g(T,T) = −(1+λν²)`, `g(JT,JT) = λ+ν²` and `g(T,JT) = 0`.
pub fn t_norm_residual(n: &NormalData, params: &BergerParams) -> f64 {
    let (lam, nu) = (params.lambda(), params.nu);
    let (t, jt) = (&n.t_coeffs, &n.jt_coeffs);
    (g(t, t) + 1.0 + lam * nu * nu)
        .abs()
        .max((g(jt, jt) - lam - nu * nu).abs())
        .max(g(t, jt).abs())
}

/// `g(JX, JY) + λ g(X, Y)` and `J²X − λX` over `X, Y ∈ {T, JT}`.
pub fn j_algebra_residual(n: &NormalData, params: &BergerParams) -> f64 {
    let lam = params.lambda();
    let basis = [n.t_coeffs, n.jt_coeffs];
    let mut worst = 0.0f64;
    for x in &basis {
        let jx = n.j(x);
        worst = worst.max((n.j(&jx) - x * lam).norm());
        for y in &basis {
            worst = worst.max((g(&jx, &n.j(y)) + lam * g(x, y)).abs());
        }
    }
    worst
}

/// `|N − (−λν E1 + √(λ+ν²)(cos φ E2 + sin φ E3))|` with the declared `ν`.
pub fn normal_reconstruction_residual(n: &NormalData, params: &BergerParams) -> f64 {
    let (lam, nu) = (params.lambda(), params.nu);
    let r = (lam + nu * nu).max(0.0).sqrt();
    let expected = Vec3::new(-lam * nu, r * n.phi.cos(), r * n.phi.sin());
    (n.n_coeffs - expected).norm()
}

/// Right-hand side `−λ g_ε(A X + ε J X, T)` of the structure equation for `X(ν)`,
/// for `X = F_u` and `X = F_v`.
pub fn structure_rhs(shape: &ShapeData, params: &BergerParams) -> (f64, f64) {
    let n = &shape.normal;
    let lam = params.lambda();
    let eps = params.epsilon();
    let rhs = |ax: &Vec3, x: &Vec3| -lam * g(&(ax + n.j(x) * eps), &n.t_coeffs);
    (rhs(&shape.a_fu, &n.fu_coeffs), rhs(&shape.a_fv, &n.fv_coeffs))
}

/// `|<F_v, F_v> − (λ + ν²)|` for families in the canonical `v` scale.
pub fn canonical_v_residual(jet: &SurfaceJet, params: &BergerParams) -> f64 {
    (jet.fv.norm_squared() - params.lambda() - params.nu * params.nu).abs()
}
