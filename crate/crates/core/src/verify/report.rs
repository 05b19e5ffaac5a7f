//! Grid aggregation of every check into a [`ResidualReport`].

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::ambient::{BergerParams, Mat4};
use crate::error::{Error, Result};
use crate::helix::{HelixConstants, HelixSpec, Surface};
use crate::verify::checks::{self, PRODUCT_NAMES};
use crate::verify::curve::{curve_metrics, measure_curve};
use crate::helix::SurfaceJet;
use crate::verify::normal::{rank_measure, unit_normal, NormalData};
use crate::verify::shape::{
    central_difference, check_mu_pde, check_normal_phase, expected_gauss, shape_operator, FdOptions, MuPde,
};

/// Default tolerance of every named check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub normal_norm: f64,
    pub algebraic: f64,
    pub angle: f64,
    pub ode: f64,
    pub products: f64,
    pub helix: f64,
    pub shape_form: f64,
    /// Relative.
    pub gauss: f64,
    pub mu_pde: f64,
    pub phase: f64,
    pub structure: f64,
    pub commutation: f64,
    pub compat: f64,
    pub constants: f64,
    pub characteristic: f64,
    pub curve_closed_form: f64,
    pub curve_algebraic: f64,
    pub frenet: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            normal_norm: 1e-10,
            algebraic: 1e-8,
            angle: 1e-8,
            ode: 1e-8,
            products: 1e-8,
            helix: 1e-8,
            shape_form: 1e-4,
            gauss: 1e-3,
            mu_pde: 1e-3,
            phase: 1e-4,
            structure: 1e-4,
            commutation: 1e-12,
            compat: 1e-9,
            constants: 1e-12,
            characteristic: 1e-9,
            curve_closed_form: 1e-10,
            curve_algebraic: 1e-12,
            frenet: 1e-6,
        }
    }
}

impl Tolerances {
    /// Every tolerance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::Config(format!("tolerance factor must be positive, got {factor}")));
        }
        let mut t = *self;
        for x in [
            &mut t.normal_norm,
            &mut t.algebraic,
            &mut t.angle,
            &mut t.ode,
            &mut t.products,
            &mut t.helix,
            &mut t.shape_form,
            &mut t.gauss,
            &mut t.mu_pde,
            &mut t.phase,
            &mut t.structure,
            &mut t.commutation,
            &mut t.compat,
            &mut t.constants,
            &mut t.characteristic,
            &mut t.curve_closed_form,
            &mut t.curve_algebraic,
            &mut t.frenet,
        ] {
            *x *= factor;
        }
        Ok(t)
    }
}

/// Rectangular parameter grid, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    pub nu: usize,
    pub nv: usize,
}

impl GridSpec {
    pub fn new(u_range: (f64, f64), v_range: (f64, f64), nu: usize, nv: usize) -> Self {
        GridSpec { u_range, v_range, nu, nv }
    }

    pub fn is_empty(&self) -> bool {
        self.nu == 0 || self.nv == 0
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    fn coordinate(range: (f64, f64), n: usize, i: usize) -> f64 {
        if n <= 1 {
            range.0
        } else {
            range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
        }
    }

    pub fn u(&self, i: usize) -> f64 {
        Self::coordinate(self.u_range, self.nu, i)
    }

    pub fn v(&self, j: usize) -> f64 {
        Self::coordinate(self.v_range, self.nv, j)
    }

    /// Points in row-major order (`v` outer, `u` inner).
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.nv).flat_map(move |j| (0..self.nu).map(move |i| (self.u(i), self.v(j))))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Parameter point of the largest residual, for grid checks.
    pub worst: Option<(f64, f64)>,
    pub samples: usize,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, max_residual: f64, tolerance: f64, worst: Option<(f64, f64)>, samples: usize) -> Self {
        CheckRecord {
            name: name.into(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            worst,
            samples,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegeneratePoint {
    pub u: f64,
    pub v: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResidualReport {
    pub meta: Vec<(String, String)>,
    pub records: Vec<CheckRecord>,
    pub degenerate: Vec<DegeneratePoint>,
}

impl ResidualReport {
    pub fn pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Line-oriented text form: `meta,`, `check,`, `worst,` and `degenerate,` records.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "meta,{k},{v}");
        }
        for r in &self.records {
            let _ = writeln!(
                out,
                "check,{},{:.6e},{:.3e},{}",
                r.name,
                r.max_residual,
                r.tolerance,
                if r.pass { "pass" } else { "fail" }
            );
        }
        for r in &self.records {
            if let Some((u, v)) = r.worst {
                let _ = writeln!(out, "worst,{},{u:.12},{v:.12}", r.name);
            }
        }
        for d in &self.degenerate {
            let _ = writeln!(out, "degenerate,{:.12},{:.12},{}", d.u, d.v, d.reason);
        }
        out
    }
}

/// Residuals of one grid point, in the order of [`point_check_names`].
type PointValues = Vec<Option<f64>>;

enum PointOutcome {
    Values(PointValues),
    Degenerate(String),
}

/// Per-point check names with their tolerances.
pub fn point_check_names(tol: &Tolerances, canonical_v: bool) -> Vec<(&'static str, f64)> {
    let mut names = vec![
        ("normal_norm", tol.normal_norm),
        ("normal_tangency", tol.algebraic),
        ("angle_constancy", tol.angle),
        ("normal_reconstruction", tol.algebraic),
        ("t_decomposition", tol.algebraic),
        ("t_norms", tol.algebraic),
        ("j_algebra", tol.algebraic),
        ("ode", tol.ode),
    ];
    names.extend(PRODUCT_NAMES.iter().map(|n| (*n, tol.products)));
    names.extend([
        ("helix_condition_1", tol.helix),
        ("helix_condition_2", tol.helix),
        ("shape_form", tol.shape_form),
        ("gauss_curvature", tol.gauss),
        ("mu_pde", tol.mu_pde),
        ("phase_u", tol.phase),
        ("phase_v", tol.phase),
        ("structure_nu", tol.structure),
    ]);
    if canonical_v {
        names.push(("canonical_v_norm", tol.algebraic));
    }
    names
}

/// Counters that are reported but do not affect pass/fail.
#[derive(Default)]
struct Diagnostics {
    mu_skips: usize,
    unreliable: usize,
    ill_conditioned: usize,
}

/// Checks that need only the jet and the normal, in report order.
fn algebraic_values(
    jet: &SurfaceJet,
    normal: &NormalData,
    params: &BergerParams,
    constants: &HelixConstants,
) -> PointValues {
    let mut values: PointValues = vec![
        Some(checks::normal_norm_residual(normal, params)),
        Some(checks::normal_tangency_residual(normal)),
        Some((normal.nu - params.nu).abs()),
        Some(checks::normal_reconstruction_residual(normal, params)),
        Some(checks::t_decomposition_residual(normal, params)),
        Some(checks::t_norm_residual(normal, params)),
        Some(checks::j_algebra_residual(normal, params)),
        Some(checks::check_ode(jet, constants)),
    ];
    values.extend(checks::check_products(jet, constants, params).into_iter().map(Some));
    let (h1, h2) = checks::check_helix_conditions(jet, params);
    values.extend([Some(h1), Some(h2)]);
    values
}

/// Finite-difference checks, in report order.
fn derivative_values<S: Surface + ?Sized>(
    surface: &S,
    params: &BergerParams,
    constants: &HelixConstants,
    fd: &FdOptions,
    u: f64,
    v: f64,
    diag: &mut Diagnostics,
) -> Result<PointValues> {
    let shape = shape_operator(surface, u, v, params, fd)?;
    let mu = check_mu_pde(surface, u, v, params, constants, fd)?;
    let (phase_u, phase_v) = check_normal_phase(surface, u, v, params, fd)?;
    let nu_at = |x: f64, y: f64| -> Result<f64> { Ok(unit_normal(&surface.jet(x, y)?, params)?.nu) };
    let (nu_u, _) = central_difference(|x| nu_at(x, v), u, fd.step, fd.richardson)?;
    let (nu_v, _) = central_difference(|y| nu_at(u, y), v, fd.step, fd.richardson)?;

    if !shape.reliable {
        diag.unreliable += 1;
    }
    let mu_value = match mu {
        MuPde::Residual(r) => Some(r),
        MuPde::Skipped(_) => {
            diag.mu_skips += 1;
            None
        }
    };
    let m = shape.matrix;
    let lam = params.lambda();
    let eps = params.epsilon();
    let shape_form = m[(0, 0)].abs().max((m[(0, 1)] + lam * eps).abs()).max((m[(1, 0)] - eps).abs());
    let k_expected = expected_gauss(params);
    let (rhs_u, rhs_v) = checks::structure_rhs(&shape, params);
    let structure = nu_u.abs().max(nu_v.abs()).max(rhs_u.abs()).max(rhs_v.abs());
    Ok(vec![
        Some(shape_form),
        Some((shape.gauss - k_expected).abs() / k_expected.abs()),
        mu_value,
        Some(phase_u),
        Some(phase_v),
        Some(structure),
    ])
}

fn evaluate_point<S: Surface + ?Sized>(
    surface: &S,
    params: &BergerParams,
    constants: &HelixConstants,
    canonical_v: bool,
    fd: &FdOptions,
    u: f64,
    v: f64,
) -> Result<(PointOutcome, Diagnostics)> {
    let degenerate = |e: Error| -> Result<(PointOutcome, Diagnostics)> {
        if e.is_degenerate() {
            Ok((PointOutcome::Degenerate(e.to_string()), Diagnostics::default()))
        } else {
            Err(e)
        }
    };
    let jet = surface.jet(u, v)?;
    let normal = match unit_normal(&jet, params) {
        Ok(n) => n,
        Err(e) => return degenerate(e),
    };
    let mut diag = Diagnostics::default();
    let mut values = algebraic_values(&jet, &normal, params, constants);
    if rank_measure(&jet) < fd.min_rank {
        diag.ill_conditioned = 1;
        values.extend([None; 6]);
    } else {
        match derivative_values(surface, params, constants, fd, u, v, &mut diag) {
            Ok(d) => values.extend(d),
            Err(e) => return degenerate(e),
        }
    }
    if canonical_v {
        values.push(Some(checks::canonical_v_residual(&jet, params)));
    }
    Ok((PointOutcome::Values(values), diag))
}

/// Runs every per-point check of `surface` over `grid`, verified against `params`.
pub fn grid_report<S: Surface + ?Sized>(
    surface: &S,
    params: &BergerParams,
    canonical_v: bool,
    grid: &GridSpec,
    tol: &Tolerances,
    fd: &FdOptions,
) -> Result<ResidualReport> {
    let mut report = ResidualReport::default();
    if grid.is_empty() {
        return Ok(report);
    }
    fd.validate()?;
    let constants = HelixConstants::new(params)?;
    let points: Vec<(f64, f64)> = grid.points().collect();
    let outcomes: Vec<(PointOutcome, Diagnostics)> = points
        .par_iter()
        .map(|&(u, v)| evaluate_point(surface, params, &constants, canonical_v, fd, u, v))
        .collect::<Result<_>>()?;

    let names = point_check_names(tol, canonical_v);
    let mut best: Vec<(f64, Option<(f64, f64)>, usize)> = vec![(0.0, None, 0); names.len()];
    let (mut skips, mut unreliable, mut ill) = (0, 0, 0);
    for (&(u, v), (outcome, diag)) in points.iter().zip(&outcomes) {
        skips += diag.mu_skips;
        unreliable += diag.unreliable;
        ill += diag.ill_conditioned;
        match outcome {
            PointOutcome::Degenerate(reason) => report.degenerate.push(DegeneratePoint {
                u,
                v,
                reason: reason.clone(),
            }),
            PointOutcome::Values(values) => {
                for (slot, value) in best.iter_mut().zip(values) {
                    if let Some(x) = *value {
                        slot.2 += 1;
                        // NaN must win so that it surfaces as a failure.
                        if slot.1.is_none() || x > slot.0 || x.is_nan() && !slot.0.is_nan() {
                            slot.0 = x;
                            slot.1 = Some((u, v));
                        }
                    }
                }
            }
        }
    }
    report.push_meta("points", points.len());
    report.push_meta("degenerate_points", report.degenerate.len());
    report.push_meta("mu_pole_skips", skips);
    report.push_meta("unreliable_shape_points", unreliable);
    report.push_meta("ill_conditioned_points", ill);
    for ((name, t), (max, worst, n)) in names.into_iter().zip(best) {
        report.records.push(CheckRecord::new(name, max, t, worst, n));
    }
    Ok(report)
}

/// Checks of the family, the constants and the curve, independent of any grid point.
pub fn spec_checks(spec: &HelixSpec, params: &BergerParams, tol: &Tolerances) -> Result<Vec<CheckRecord>> {
    let fam = &spec.family;
    let j1 = crate::ambient::j1();
    let (mut commutation, mut orthogonality) = (0.0f64, 0.0f64);
    for v in fam.samples() {
        let q = fam.q_matrix(v);
        commutation = commutation.max((q * j1 - j1 * q).abs().max());
        orthogonality = orthogonality.max((q.transpose() * q - Mat4::identity()).abs().max());
    }
    let c = HelixConstants::new(params)?;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let lam = params.lambda();
    let nu = params.nu;
    let identities = [
        rel(c.alpha1 * c.alpha2, c.a_tilde),
        rel(c.alpha1.powi(2) + c.alpha2.powi(2), c.ode_middle()),
        rel(c.g11 + c.g33, 1.0),
        rel(c.g11 * c.g33, (1.0 + lam * nu * nu) / (4.0 * c.b)),
        rel(c.d * c.d, c.alpha2 / c.alpha1),
    ]
    .into_iter()
    .fold(0.0f64, f64::max);
    let characteristic = c.characteristic(c.alpha1).abs().max(c.characteristic(c.alpha2).abs()) / c.alpha1.powi(4);

    let closed = curve_metrics(&c, params);
    let mut curve = [0.0f64; 5];
    let samples = 17;
    for k in 0..samples {
        let s = -4.0 * std::f64::consts::PI + 8.0 * std::f64::consts::PI * k as f64 / (samples - 1) as f64;
        let m = measure_curve(&c, params, s)?;
        for (slot, r) in curve.iter_mut().zip([
            (m.speed_eps - closed.speed_eps).abs(),
            (m.helix_angle - closed.helix_angle).abs(),
            (m.hyperbolic - closed.helix_angle).abs(),
            (m.kappa_g - closed.kappa_g).abs(),
            (m.tau_g - closed.tau_g).abs(),
        ]) {
            *slot = slot.max(r);
        }
    }
    Ok(vec![
        CheckRecord::new("family_commutation", commutation, tol.commutation, None, fam.samples().count()),
        CheckRecord::new("family_orthogonality", orthogonality, tol.commutation, None, fam.samples().count()),
        CheckRecord::new("family_compat", fam.max_compat_residual(), tol.compat, None, fam.samples().count()),
        CheckRecord::new("constants_identities", identities, tol.constants, None, 1),
        CheckRecord::new("characteristic_roots", characteristic, tol.characteristic, None, 2),
        CheckRecord::new("curve_speed", curve[0], tol.curve_closed_form, None, samples),
        CheckRecord::new("curve_helix_angle", curve[1], tol.curve_closed_form, None, samples),
        CheckRecord::new("curve_hyperbolic_angle", curve[2], tol.curve_closed_form, None, samples),
        CheckRecord::new("curve_kappa_algebraic", (closed.kappa_g - closed.kappa_g_alt).abs(), tol.curve_algebraic, None, 1),
        CheckRecord::new("curve_kappa_frenet", curve[3], tol.frenet, None, samples),
        CheckRecord::new("curve_tau_frenet", curve[4], tol.frenet, None, samples),
    ])
}

/// Full verification of `spec` against `params` (normally `spec.params`).
pub fn full_report_with(
    spec: &HelixSpec,
    params: &BergerParams,
    grid: &GridSpec,
    tol: &Tolerances,
    fd: &FdOptions,
) -> Result<ResidualReport> {
    if grid.is_empty() {
        return Ok(ResidualReport::default());
    }
    let mut report = ResidualReport::default();
    report.push_meta("epsilon", params.epsilon());
    report.push_meta("lambda", params.lambda());
    report.push_meta("nu", params.nu);
    report.push_meta("grid", format!("{}x{}", grid.nu, grid.nv));
    report.push_meta("u_range", format!("{}:{}", grid.u_range.0, grid.u_range.1));
    report.push_meta("v_range", format!("{}:{}", grid.v_range.0, grid.v_range.1));
    let points = grid_report(spec, params, spec.family.canonical_v, grid, tol, fd)?;
    report.meta.extend(points.meta);
    report.records = spec_checks(spec, params, tol)?;
    report.records.extend(points.records);
    report.degenerate = points.degenerate;
    Ok(report)
}

/// Full verification at default finite-difference settings.
pub fn full_report(spec: &HelixSpec, grid: &GridSpec, tol: &Tolerances) -> Result<ResidualReport> {
    full_report_with(spec, &spec.params, grid, tol, &FdOptions::default())
}
