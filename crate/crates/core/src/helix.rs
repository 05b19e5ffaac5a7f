//! Constant-angle surfaces `F(u, v) = Q(v) β(u)`.
//!
//! `β` is a geodesic of the flat torus `S¹(√g11) × S¹(√g33) ⊂ S³` winding
//! with frequencies `α1 > α2 > 0`; `Q(v)` sweeps it through isometries of
//! the Berger sphere. All `u`-derivatives are exact; `F_v = Q'(v) β(u)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::Arc;

use crate::ambient::{AmbientPoint, BergerParams, Causality, Mat4, Vec4};
use crate::error::{Error, Result};
use crate::isometry::{IsometryFamily, NamedCurve, ScalarCurve};

/// Scalars that govern the surface ODE and the torus geodesic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HelixConstants {
    /// `B = 1 + λ ν² (1 + ε²)`; `λB > 0`.
    pub b: f64,
    /// `ã = λ ε⁻² B (λ + ν²) = <F_u, F_u>`.
    pub a_tilde: f64,
    /// `b̃ = −2 ε⁻¹ B`.
    pub b_tilde: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub g11: f64,
    pub g33: f64,
    /// Slope `√(α2/α1)` of the torus geodesic.
    pub d: f64,
    pub big_d: f64,
    pub big_e: f64,
    pub big_i: f64,
    /// `√(λB)`, cached.
    pub sqrt_lambda_b: f64,
    /// `√(λ + ν²)`, cached.
    pub sqrt_lambda_nu2: f64,
}

impl HelixConstants {
    pub fn new(params: &BergerParams) -> Result<Self> {
        let eps = params.epsilon();
        let lambda = params.lambda();
        let nu = params.nu;
        let nu_abs = nu.abs();

        let b = 1.0 + lambda * nu * nu * (1.0 + eps * eps);
        let lambda_b = lambda * b;
        let lambda_nu2 = lambda + nu * nu;
        if !(lambda_b > 0.0) {
            return Err(Error::Domain(format!("lambda*B must be positive, got {lambda_b}")));
        }
        if !(lambda_nu2 > 0.0) {
            return Err(Error::Domain(format!("lambda + nu^2 must be positive, got {lambda_nu2}")));
        }
        let sqrt_lambda_b = lambda_b.sqrt();
        let sqrt_lambda_nu2 = lambda_nu2.sqrt();

        let a_tilde = lambda_b * lambda_nu2 / (eps * eps);
        let b_tilde = -2.0 * b / eps;
        let alpha1 = (lambda_b + eps * nu_abs * sqrt_lambda_b) / eps;
        let alpha2 = (lambda_b - eps * nu_abs * sqrt_lambda_b) / eps;
        let g11 = lambda * eps * alpha2 / (2.0 * b);
        let g33 = lambda * eps * alpha1 / (2.0 * b);
        let d = (alpha2 / alpha1).sqrt();
        let big_d = a_tilde * b_tilde * b_tilde - 3.0 * a_tilde * a_tilde;
        let big_e = (b_tilde * b_tilde - 2.0 * a_tilde) * big_d - a_tilde.powi(3);
        let big_i = a_tilde * ((1.0 + lambda * nu * nu) / eps + b_tilde);

        if !(alpha2 > 0.0 && d > 0.0 && d < 1.0) {
            return Err(Error::Domain(format!("degenerate torus geodesic (alpha2 = {alpha2}, d = {d})")));
        }

        Ok(HelixConstants {
            b,
            a_tilde,
            b_tilde,
            alpha1,
            alpha2,
            g11,
            g33,
            d,
            big_d,
            big_e,
            big_i,
            sqrt_lambda_b,
            sqrt_lambda_nu2,
        })
    }

    /// Coefficient of `F_uu` in the fourth-order equation.
    pub fn ode_middle(&self) -> f64 {
        self.b_tilde * self.b_tilde - 2.0 * self.a_tilde
    }

    /// `r⁴ − (b̃² − 2ã) r² + ã²` at `r`.
    pub fn characteristic(&self, r: f64) -> f64 {
        let r2 = r * r;
        r2 * r2 - self.ode_middle() * r2 + self.a_tilde * self.a_tilde
    }
}

/// Convenience wrapper for [`HelixConstants::new`].
pub fn constants(params: &BergerParams) -> Result<HelixConstants> {
    HelixConstants::new(params)
}

/// `k`-th derivative of `(cos(αu), sin(αu))`.
fn trig_derivative(alpha: f64, u: f64, k: u32) -> (f64, f64) {
    let (s, c) = (alpha * u).sin_cos();
    let scale = alpha.powi(k as i32);
    let (dc, ds) = match k % 4 {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    };
    (scale * dc, scale * ds)
}

/// `k`-th `u`-derivative of the torus geodesic
/// `β(u) = (√g11 cos α1u, λ√g11 sin α1u, √g33 cos α2u, λ√g33 sin α2u)`.
pub fn beta_derivative(c: &HelixConstants, causality: Causality, u: f64, k: u32) -> Vec4 {
    let lambda = causality.lambda();
    let (r11, r33) = (c.g11.sqrt(), c.g33.sqrt());
    let (c1, s1) = trig_derivative(c.alpha1, u, k);
    let (c2, s2) = trig_derivative(c.alpha2, u, k);
    Vec4::new(r11 * c1, lambda * r11 * s1, r33 * c2, lambda * r33 * s2)
}

pub fn beta(c: &HelixConstants, causality: Causality, u: f64) -> Result<AmbientPoint> {
    AmbientPoint::normalized(beta_derivative(c, causality, u, 0))
}

/// The same geodesic parametrized by Euclidean arc length `s = √ã u`.
pub fn beta_arclength(c: &HelixConstants, causality: Causality, s: f64) -> Vec4 {
    beta_arclength_derivative(c, causality, s, 0)
}

/// `k`-th `s`-derivative of [`beta_arclength`].
pub fn beta_arclength_derivative(c: &HelixConstants, causality: Causality, s: f64, k: u32) -> Vec4 {
    let lambda = causality.lambda();
    let d = c.d;
    let (c1, s1) = trig_derivative(1.0 / d, s, k);
    let (c2, s2) = trig_derivative(d, s, k);
    Vec4::new(d * c1, lambda * d * s1, c2, lambda * s2) / (1.0 + d * d).sqrt()
}

/// Position and derivatives of a parametrized surface at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceJet {
    pub u: f64,
    pub v: f64,
    pub f: AmbientPoint,
    pub fu: Vec4,
    pub fuu: Vec4,
    pub fuuu: Vec4,
    pub fuuuu: Vec4,
    pub fv: Vec4,
}

impl SurfaceJet {
    pub fn position(&self) -> &Vec4 {
        self.f.coords()
    }
}

/// Anything that can produce surface jets on a parameter domain.
pub trait Surface: Sync {
    fn jet(&self, u: f64, v: f64) -> Result<SurfaceJet>;

    fn position(&self, u: f64, v: f64) -> Result<Vec4> {
        Ok(*self.jet(u, v)?.position())
    }
}

/// A validated helix surface: parameters, derived constants and sweeping family.
#[derive(Clone, Debug)]
pub struct HelixSpec {
    pub params: BergerParams,
    pub constants: HelixConstants,
    pub family: IsometryFamily,
}

impl HelixSpec {
    /// Builds the surface, rejecting families that anticommute with `J1`
    /// or violate `cos²ξ1 ξ2' − sin²ξ1 ξ3' = 0`.
    pub fn new(params: BergerParams, family: IsometryFamily) -> Result<Self> {
        family.validate_commuting()?;
        family.validate_compat()?;
        Self::unchecked(params, family)
    }

    /// Skips the family checks. Used to build negative controls.
    pub fn unchecked(params: BergerParams, family: IsometryFamily) -> Result<Self> {
        let constants = HelixConstants::new(&params)?;
        Ok(HelixSpec {
            params,
            constants,
            family,
        })
    }

    pub fn causality(&self) -> Causality {
        self.params.causality
    }

    pub fn surface_jet(&self, u: f64, v: f64) -> Result<SurfaceJet> {
        self.family.check_domain(v)?;
        let q: Mat4 = self.family.q_matrix(v);
        let dq: Mat4 = self.family.q_derivative(v);
        let c = &self.constants;
        let lam = self.causality();
        let b0 = beta_derivative(c, lam, u, 0);
        Ok(SurfaceJet {
            u,
            v,
            f: AmbientPoint::normalized(q * b0)?,
            fu: q * beta_derivative(c, lam, u, 1),
            fuu: q * beta_derivative(c, lam, u, 2),
            fuuu: q * beta_derivative(c, lam, u, 3),
            fuuuu: q * beta_derivative(c, lam, u, 4),
            fv: dq * b0,
        })
    }
}

impl Surface for HelixSpec {
    fn jet(&self, u: f64, v: f64) -> Result<SurfaceJet> {
        self.surface_jet(u, v)
    }
}

/// Replaces the analytic `F_v` of an inner surface by a central difference in `v`.
pub struct FdVSurface<'a, S: ?Sized> {
    pub inner: &'a S,
    pub step: f64,
}

impl<S: Surface + ?Sized> Surface for FdVSurface<'_, S> {
    fn jet(&self, u: f64, v: f64) -> Result<SurfaceJet> {
        let mut jet = self.inner.jet(u, v)?;
        let plus = self.inner.position(u, v + self.step)?;
        let minus = self.inner.position(u, v - self.step)?;
        jet.fv = (plus - minus) / (2.0 * self.step);
        Ok(jet)
    }
}

/// Example 1: `ξ = π/2`, `ξ1 = π/4`, `ξ2 = ξ3` an arbitrary curve.
pub fn example1_family(xi2: Arc<dyn ScalarCurve>) -> IsometryFamily {
    IsometryFamily::new(
        FRAC_PI_2,
        Arc::new(NamedCurve::Constant(FRAC_PI_4)),
        xi2.clone(),
        xi2,
    )
}

pub fn example1_spec(params: BergerParams, xi2: Arc<dyn ScalarCurve>) -> Result<HelixSpec> {
    HelixSpec::new(params, example1_family(xi2))
}

/// Example 2: constant `ξ1` with `tan ξ1 = 1/d`, and linear `ξ2`, `ξ3` normalized
/// so that `<F_v, F_v> = λ + ν²`.
pub fn example2_family(params: &BergerParams, d2: f64, d3: f64) -> Result<IsometryFamily> {
    let c = HelixConstants::new(params)?;
    let xi1 = (1.0 / c.d).atan();
    let k = c.sqrt_lambda_nu2;
    Ok(IsometryFamily::new(
        0.0,
        Arc::new(NamedCurve::Constant(xi1)),
        Arc::new(NamedCurve::Linear {
            slope: k / c.d,
            offset: d2,
        }),
        Arc::new(NamedCurve::Linear {
            slope: k * c.d,
            offset: d3,
        }),
    )
    .with_canonical_v(true))
}

pub fn example2_spec(params: BergerParams, d2: f64, d3: f64) -> Result<HelixSpec> {
    let family = example2_family(&params, d2, d3)?;
    HelixSpec::new(params, family)
}

/// Margin of the family domain beyond the plotted `v`-range, so that
/// finite-difference stencils at the grid edges stay inside it.
pub const PRESET_DOMAIN_PAD: f64 = 1e-2;

/// Surfaces drawn in the figures, with their parameter ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PresetKind {
    Fig1,
    Fig2,
    Fig3,
    Fig3Bis,
}

impl std::str::FromStr for PresetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(PresetKind::Fig1),
            "fig2" => Ok(PresetKind::Fig2),
            "fig3" => Ok(PresetKind::Fig3),
            "fig3bis" => Ok(PresetKind::Fig3Bis),
            other => Err(Error::Config(format!(
                "unknown preset `{other}` (expected fig1, fig2, fig3, fig3bis)"
            ))),
        }
    }
}

impl PresetKind {
    pub fn name(self) -> &'static str {
        match self {
            PresetKind::Fig1 => "fig1",
            PresetKind::Fig2 => "fig2",
            PresetKind::Fig3 => "fig3",
            PresetKind::Fig3Bis => "fig3bis",
        }
    }

    pub fn epsilon(self) -> f64 {
        match self {
            PresetKind::Fig1 => 2.0,
            PresetKind::Fig2 | PresetKind::Fig3 | PresetKind::Fig3Bis => 1.0,
        }
    }

    pub fn nu(self) -> f64 {
        match self {
            PresetKind::Fig1 => 4.0,
            PresetKind::Fig2 | PresetKind::Fig3Bis => 2.0,
            PresetKind::Fig3 => 5f64.sqrt(),
        }
    }

    /// `None` when the figure shows both causal variants.
    pub fn fixed_causality(self) -> Option<Causality> {
        match self {
            PresetKind::Fig1 | PresetKind::Fig2 => None,
            PresetKind::Fig3 => Some(Causality::Spacelike),
            PresetKind::Fig3Bis => Some(Causality::Timelike),
        }
    }

    pub fn causalities(self) -> Vec<Causality> {
        match self.fixed_causality() {
            Some(c) => vec![c],
            None => vec![Causality::Spacelike, Causality::Timelike],
        }
    }

    /// Arc-length range of the figure.
    pub fn s_range(self) -> (f64, f64) {
        match self {
            PresetKind::Fig2 => (-2.0 * PI, 2.0 * PI),
            _ => (-4.0 * PI, 4.0 * PI),
        }
    }

    pub fn v_range(self) -> (f64, f64) {
        match self {
            PresetKind::Fig2 => (-2.0, 2.0),
            _ => (-2.0 * PI, 2.0 * PI),
        }
    }

    pub fn preset(self, causality: Causality) -> Result<Preset> {
        if let Some(fixed) = self.fixed_causality() {
            if fixed != causality {
                return Err(Error::Config(format!(
                    "preset {} is {} only",
                    self.name(),
                    fixed.name()
                )));
            }
        }
        let params = BergerParams::new(self.epsilon(), causality, self.nu())?;
        let (vlo, vhi) = self.v_range();
        let family = match self {
            PresetKind::Fig1 => example1_family(Arc::new(NamedCurve::identity())),
            PresetKind::Fig2 => example1_family(Arc::new(NamedCurve::Exp { scale: 1.0 })),
            PresetKind::Fig3 | PresetKind::Fig3Bis => example2_family(&params, 0.0, 0.0)?,
        }
        .with_domain(vlo - PRESET_DOMAIN_PAD, vhi + PRESET_DOMAIN_PAD);
        let spec = HelixSpec::new(params, family)?;
        let root = spec.constants.a_tilde.sqrt();
        let (slo, shi) = self.s_range();
        Ok(Preset {
            kind: self,
            spec,
            u_range: (slo / root, shi / root),
            v_range: (vlo, vhi),
        })
    }
}

/// A figure surface with its canonical-`u` and `v` ranges.
#[derive(Clone, Debug)]
pub struct Preset {
    pub kind: PresetKind,
    pub spec: HelixSpec,
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
}

impl Preset {
    pub fn label(&self) -> String {
        format!("{}-{}", self.kind.name(), self.spec.causality().name())
    }
}
