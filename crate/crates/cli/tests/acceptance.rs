//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Random samples come from fixed seeds, so every run sees the same points.

use std::process::Command;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use helix_core::ambient::{AmbientPoint, BergerMetric, BergerParams, Causality, CurvatureMode, TangentVector, Vec4};
use helix_core::helix::{HelixConstants, HelixSpec, Preset, PresetKind, Surface};
use helix_core::isometry::{IsometryFamily, NamedCurve};
use helix_core::verify::shape::expected_gauss;
use helix_core::verify::{
    angle_function, check_helix_conditions, check_ode, check_products, curve_metrics, full_report, measure_curve,
    GridSpec, ResidualReport, Tolerances,
};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn random_point(rng: &mut StdRng) -> AmbientPoint {
    loop {
        let x = Vec4::from_fn(|_, _| rng.random_range(-1.0..1.0));
        if x.norm() > 0.1 {
            return AmbientPoint::normalized(x).unwrap();
        }
    }
}

fn random_tangent(rng: &mut StdRng, p: &AmbientPoint) -> TangentVector {
    let v = Vec4::from_fn(|_, _| rng.random_range(-1.0..1.0));
    let x = p.coords();
    TangentVector::new(*p, v - x * v.dot(x)).unwrap()
}

fn random_params(rng: &mut StdRng) -> BergerParams {
    let eps = rng.random_range(0.2..3.0);
    let causality = if rng.random_bool(0.5) { Causality::Spacelike } else { Causality::Timelike };
    let nu = rng.random_range(1.05..6.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    BergerParams::new(eps, causality, nu).unwrap()
}

fn presets() -> Vec<Preset> {
    [PresetKind::Fig1, PresetKind::Fig2, PresetKind::Fig3, PresetKind::Fig3Bis]
        .into_iter()
        .flat_map(|k| k.causalities().into_iter().map(move |c| k.preset(c).unwrap()))
        .collect()
}

fn random_uv(rng: &mut StdRng, preset: &Preset) -> (f64, f64) {
    (
        rng.random_range(preset.u_range.0..preset.u_range.1),
        rng.random_range(preset.v_range.0..preset.v_range.1),
    )
}

fn frame_metric() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for eps in [0.5, 1.0, 2.0] {
        let m = BergerMetric::new(eps).unwrap();
        for _ in 0..1000 {
            let frame = m.frame_at(&random_point(&mut rng)).as_array();
            for i in 0..3 {
                for j in 0..3 {
                    let want = match (i, j) {
                        (0, 0) => -1.0,
                        _ if i == j => 1.0,
                        _ => 0.0,
                    };
                    worst = worst.max((m.metric(&frame[i], &frame[j]).unwrap() - want).abs());
                }
            }
        }
    }
    Outcome::new(worst < 1e-12, format!("max Gram deviation {worst:.3e}"))
}

fn killing() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let m = BergerMetric::new(rng.random_range(0.2..3.0)).unwrap();
        let p = random_point(&mut rng);
        let x = random_tangent(&mut rng, &p);
        worst = worst.max(m.killing_residual(&x).unwrap());
    }
    Outcome::new(worst < 1e-9, format!("max residual {worst:.3e}"))
}

fn curvature() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let m = BergerMetric::new(rng.random_range(0.2..3.0)).unwrap();
        let p = random_point(&mut rng);
        let (x, y, z) = (random_tangent(&mut rng, &p), random_tangent(&mut rng, &p), random_tangent(&mut rng, &p));
        let a = m.curvature(&x, &y, &z, CurvatureMode::FrameTable).unwrap();
        let b = m.curvature(&x, &y, &z, CurvatureMode::ClosedForm).unwrap();
        worst = worst.max((a.vector() - b.vector()).norm());
    }
    Outcome::new(worst < 1e-10, format!("max disagreement {worst:.3e}"))
}

fn constants_oracle() -> Outcome {
    let p = BergerParams::new(1.0, Causality::Timelike, 2.0).unwrap();
    let c = HelixConstants::new(&p).unwrap();
    let expected = [
        (c.b, 9.0),
        (c.a_tilde, 45.0),
        (c.b_tilde, -18.0),
        (c.alpha1, 15.0),
        (c.alpha2, 3.0),
        (c.g11, 1.0 / 6.0),
        (c.g33, 5.0 / 6.0),
        (c.d, 1.0 / 5f64.sqrt()),
    ];
    let exact = expected.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut rng = StdRng::seed_from_u64(4);
    let mut identities: f64 = 0.0;
    for _ in 0..500 {
        let c = HelixConstants::new(&random_params(&mut rng)).unwrap();
        identities = identities
            .max((c.alpha1 * c.alpha2 - c.a_tilde).abs() / c.a_tilde.abs())
            .max((c.g11 + c.g33 - 1.0).abs());
    }
    Outcome::new(
        exact < 1e-12 && identities < 1e-11,
        format!("oracle deviation {exact:.3e}, identity deviation {identities:.3e}"),
    )
}

fn fourth_order_ode() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut weakest_control = f64::INFINITY;
    for preset in presets() {
        let p = preset.spec.params;
        let perturbed = HelixConstants::new(&BergerParams::new(p.epsilon(), p.causality, p.nu * 1.01).unwrap()).unwrap();
        let mut control: f64 = 0.0;
        for _ in 0..100 {
            let (u, v) = random_uv(&mut rng, &preset);
            let jet = preset.spec.jet(u, v).unwrap();
            worst = worst.max(check_ode(&jet, &preset.spec.constants));
            control = control.max(check_ode(&jet, &perturbed));
        }
        weakest_control = weakest_control.min(control);
    }
    Outcome::new(
        worst < 1e-8 && weakest_control > 1e-1,
        format!("max residual {worst:.3e}, weakest 1% control {weakest_control:.3e}"),
    )
}

fn products() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for preset in presets() {
        for _ in 0..100 {
            let (u, v) = random_uv(&mut rng, &preset);
            let jet = preset.spec.jet(u, v).unwrap();
            let r = check_products(&jet, &preset.spec.constants, &preset.spec.params);
            worst = r.iter().fold(worst, |a, &b| a.max(b));
        }
    }
    Outcome::new(worst < 1e-8, format!("max of 16 residuals {worst:.3e}"))
}

fn constant_angle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut degenerate = 0;
    let mut evaluated = 0;
    for preset in presets() {
        let grid = GridSpec::new(preset.u_range, preset.v_range, 64, 64);
        for (u, v) in grid.points() {
            match angle_function(&preset.spec.jet(u, v).unwrap(), &preset.spec.params) {
                Ok(nu) => {
                    evaluated += 1;
                    worst = worst.max((nu - preset.spec.params.nu).abs());
                }
                Err(e) if e.is_degenerate() => degenerate += 1,
                Err(e) => return Outcome::new(false, format!("{}: {e}", preset.label())),
            }
        }
    }
    Outcome::new(
        worst < 1e-8,
        format!("max |nu - nu_spec| {worst:.3e} over {evaluated} points ({degenerate} degenerate excluded)"),
    )
}

fn helix_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for preset in presets() {
        for _ in 0..100 {
            let (u, v) = random_uv(&mut rng, &preset);
            let (a, b) = check_helix_conditions(&preset.spec.jet(u, v).unwrap(), &preset.spec.params);
            worst = worst.max(a).max(b);
        }
    }
    let p = BergerParams::new(1.0, Causality::Timelike, 2.0).unwrap();
    let mut ratios = Vec::new();
    let mut smallest: f64 = f64::INFINITY;
    for slope in [0.1, 0.5, 1.0, 3.0] {
        let family = IsometryFamily::new(
            std::f64::consts::FRAC_PI_2,
            Arc::new(NamedCurve::Constant(0.0)),
            Arc::new(NamedCurve::Linear { slope, offset: 0.0 }),
            Arc::new(NamedCurve::Constant(0.0)),
        );
        let spec = HelixSpec::unchecked(p, family).unwrap();
        for _ in 0..10 {
            let (u, v) = (rng.random_range(-1.0..1.0), rng.random_range(-3.0..3.0));
            let (_, second) = check_helix_conditions(&spec.jet(u, v).unwrap(), &p);
            smallest = smallest.min(second);
            ratios.push(second / spec.family.compat_residual(v));
        }
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    let spread = (hi - lo) / hi;
    Outcome::new(
        worst < 1e-8 && smallest > 1e-8 && spread < 1e-9,
        format!(
            "preset max {worst:.3e}; violating family min residual {smallest:.3e}, residual/compat = {hi:.10} (spread {spread:.1e})"
        ),
    )
}

fn preset_reports() -> Vec<(String, ResidualReport)> {
    let tol = Tolerances::default();
    presets()
        .into_iter()
        .map(|p| {
            let grid = GridSpec::new(p.u_range, p.v_range, 64, 64);
            (p.label(), full_report(&p.spec, &grid, &tol).unwrap())
        })
        .collect()
}

fn worst_of(reports: &[(String, ResidualReport)], name: &str) -> f64 {
    reports.iter().map(|(_, r)| r.get(name).unwrap().max_residual).fold(0.0, f64::max)
}

fn shape_curvature(reports: &[(String, ResidualReport)]) -> Outcome {
    let shape = worst_of(reports, "shape_form");
    let gauss = worst_of(reports, "gauss_curvature");
    let fig2 = expected_gauss(&PresetKind::Fig2.preset(Causality::Timelike).unwrap().spec.params);
    let fig1 = expected_gauss(&PresetKind::Fig1.preset(Causality::Spacelike).unwrap().spec.params);
    Outcome::new(
        shape < 1e-4 && gauss < 1e-3 && (fig2 + 32.0).abs() < 1e-12 && (fig1 - 320.0).abs() < 1e-12,
        format!("shape form {shape:.3e}, Gauss relative {gauss:.3e}, K(fig2) = {fig2}, K(fig1) = {fig1}"),
    )
}

fn mu_and_phase(reports: &[(String, ResidualReport)]) -> Outcome {
    let mu = worst_of(reports, "mu_pde");
    let phase = worst_of(reports, "phase_u").max(worst_of(reports, "phase_v"));
    let skips: usize = reports
        .iter()
        .map(|(_, r)| r.meta_value("mu_pole_skips").unwrap().parse::<usize>().unwrap())
        .sum();
    Outcome::new(
        mu < 1e-3 && phase < 1e-4,
        format!("mu residual {mu:.3e}, phase residual {phase:.3e} ({skips} near-pole points skipped)"),
    )
}

fn curve_invariants() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let mut sets: Vec<BergerParams> = presets().iter().map(|p| p.spec.params).collect();
    sets.push(BergerParams::new(1.0, Causality::Timelike, 2.0).unwrap());
    sets.extend((0..20).map(|_| random_params(&mut rng)));
    let (mut algebraic, mut kappa, mut tau, mut angle) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in &sets {
        let c = HelixConstants::new(p).unwrap();
        let closed = curve_metrics(&c, p);
        algebraic = algebraic.max((closed.kappa_g - closed.kappa_g_alt).abs());
        angle = angle.max((closed.helix_angle + p.lambda() * (p.lambda() + p.nu * p.nu).sqrt()).abs());
        for s in [-3.0, -0.4, 0.0, 1.3, 5.0] {
            let m = measure_curve(&c, p, s).unwrap();
            kappa = kappa.max((m.kappa_g - closed.kappa_g).abs());
            tau = tau.max((m.tau_g - 1.0).abs());
            angle = angle.max((m.helix_angle - closed.helix_angle).abs());
        }
    }
    Outcome::new(
        algebraic < 1e-12 && kappa < 1e-6 && tau < 1e-6 && angle < 1e-10,
        format!("algebraic {algebraic:.3e}, Frenet kappa {kappa:.3e}, |tau| {tau:.3e}, helix angle {angle:.3e}"),
    )
}

fn run_helix(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_helix")).args(args).output().unwrap();
    (out.status.code(), out.stdout)
}

fn cli_determinism() -> Outcome {
    let args = ["verify", "--preset", "fig2", "--grid", "64x64"];
    let (code_a, first) = run_helix(&args);
    let (code_b, second) = run_helix(&args);
    let (perturbed, _) = run_helix(&["verify", "--preset", "fig2", "--grid", "64x64", "--perturb", "nu=0.01"]);
    let (invalid, _) = run_helix(&["verify", "-e", "1", "-n", "0.5", "-l", "-1"]);
    let identical = !first.is_empty() && first == second;
    Outcome::new(
        identical && code_a == Some(0) && code_b == Some(0) && perturbed == Some(1) && invalid == Some(2),
        format!(
            "identical reports: {identical} ({} bytes); exit codes pass={code_a:?} perturbed={perturbed:?} invalid={invalid:?}",
            first.len()
        ),
    )
}

fn main() {
    let reports = preset_reports();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("frame/metric", frame_metric()),
        ("Killing identity", killing()),
        ("curvature equivalence", curvature()),
        ("constants oracle", constants_oracle()),
        ("fourth-order ODE", fourth_order_ode()),
        ("product relations", products()),
        ("constant angle", constant_angle()),
        ("helix oracle", helix_oracle()),
        ("shape/curvature", shape_curvature(&reports)),
        ("mu-PDE and phase", mu_and_phase(&reports)),
        ("curve metrics", curve_invariants()),
        ("CLI determinism", cli_determinism()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in criteria.iter().enumerate() {
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {name}: {status} ({})", i + 1, outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
