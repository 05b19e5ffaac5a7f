//! Command-line arguments and their validation into a [`RunConfig`].

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use helix_core::ambient::{BergerParams, Causality};
use helix_core::export::{Format, Pole};
use helix_core::helix::{example1_family, example2_family, HelixConstants, HelixSpec, PresetKind, PRESET_DOMAIN_PAD};
use helix_core::isometry::{IsometryFamily, NamedCurve, ScalarCurve, SignChoice};
use helix_core::verify::{GridSpec, Tolerances};
use helix_core::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "HELIX_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "helix", version, about = "Constant-angle surfaces in the Lorentzian Berger sphere")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the derived constants B, ã, b̃, α1, α2, g11, g33, d, D, E, I.
    Constants(ParamArgs),
    /// Print speed, helix angle, geodesic curvature and torsion of the torus geodesic.
    Curve(ParamArgs),
    /// Sample, project and export a surface, with its verification report.
    Surface(SurfaceArgs),
    /// Run every check over a parameter grid and print the report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Metric deformation ε > 0.
    #[arg(short = 'e', long = "epsilon", allow_negative_numbers = true)]
    pub epsilon: Option<f64>,

    /// Angle function ν.
    #[arg(short = 'n', long = "nu", allow_negative_numbers = true)]
    pub nu: Option<f64>,

    /// Causal character: +1, -1, spacelike or timelike.
    #[arg(short = 'l', long = "lambda", allow_hyphen_values = true)]
    pub lambda: Option<String>,

    /// Figure preset.
    #[arg(long)]
    pub preset: Option<PresetArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PresetArg {
    Fig1,
    Fig2,
    Fig3,
    Fig3bis,
}

impl From<PresetArg> for PresetKind {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Fig1 => PresetKind::Fig1,
            PresetArg::Fig2 => PresetKind::Fig2,
            PresetArg::Fig3 => PresetKind::Fig3,
            PresetArg::Fig3bis => PresetKind::Fig3Bis,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum FamilyArg {
    Example1,
    Example2,
    Custom,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum BranchArg {
    Commuting,
    Anticommuting,
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceSelection {
    #[command(flatten)]
    pub params: ParamArgs,

    /// Isometry family sweeping the torus geodesic.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,

    /// ξ2 curve: v, exp[:s], sin[:a], const:c or linear:a[:b].
    #[arg(long, allow_hyphen_values = true)]
    pub xi2: Option<String>,

    /// ξ1 curve of a custom family.
    #[arg(long, allow_hyphen_values = true)]
    pub xi1: Option<String>,

    /// ξ3 curve of a custom family.
    #[arg(long, allow_hyphen_values = true)]
    pub xi3: Option<String>,

    /// Constant ξ of a custom family.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,

    /// Integration constant d2 of the Example-2 family.
    #[arg(long, allow_hyphen_values = true)]
    pub d2: Option<String>,

    /// Integration constant d3 of the Example-2 family.
    #[arg(long, allow_hyphen_values = true)]
    pub d3: Option<String>,

    /// Sign branch of Q(v); `anticommuting` requires --unchecked.
    #[arg(long, value_enum)]
    pub branch: Option<BranchArg>,

    /// Build the surface without validating the family (negative controls).
    #[arg(long)]
    pub unchecked: bool,

    /// Canonical parameter range a:b (numbers may use `pi`, e.g. -2pi:2pi).
    #[arg(long, allow_hyphen_values = true)]
    pub u_range: Option<String>,

    /// Arc-length range a:b, converted with u = s/√ã [default: preset range or -4pi:4pi].
    #[arg(long, allow_hyphen_values = true)]
    pub s_range: Option<String>,

    /// Family parameter range a:b [default: preset range or -2pi:2pi].
    #[arg(long, allow_hyphen_values = true)]
    pub v_range: Option<String>,

    /// Grid resolution NxM (u samples x v samples).
    #[arg(long, default_value = "64x64")]
    pub grid: String,

    /// Multiplier applied to every default tolerance.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub tol: f64,

    /// Verify against perturbed parameters: nu=<rel> or epsilon=<rel>.
    #[arg(long)]
    pub perturb: Option<String>,

    /// Write the verification report to this path.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub selection: SurfaceSelection,

    /// Projection pole {1,2,3,4}{+,-}.
    #[arg(long, default_value = "4-", allow_hyphen_values = true)]
    pub pole: String,

    /// Output formats, comma separated (obj, ply, csv).
    #[arg(long, default_value = "obj", value_delimiter = ',')]
    pub format: Vec<String>,

    /// Output file; the extension is replaced per format and a suffix added per variant.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Default output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub selection: SurfaceSelection,
}

/// Parses a real number, accepting `pi` multiples such as `-2pi`, `pi/2` or `0.5pi`.
pub fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    let bad = || Error::Config(format!("invalid number `{s}`"));
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (t, None),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        };
        c * std::f64::consts::PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    let value = match den {
        Some(d) => value / d.parse::<f64>().map_err(|_| bad())?,
        None => value,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("invalid range `{s}` (expected a:b)")))?;
    let (a, b) = (parse_real(a)?, parse_real(b)?);
    if a >= b {
        return Err(Error::Config(format!("range `{s}` is empty (need a < b)")));
    }
    Ok((a, b))
}

pub fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("invalid grid `{s}` (expected NxM)"));
    let (a, b) = s.to_ascii_lowercase().split_once('x').map(|(a, b)| (a.to_string(), b.to_string())).ok_or_else(bad)?;
    let (n, m) = (a.trim().parse::<usize>().map_err(|_| bad())?, b.trim().parse::<usize>().map_err(|_| bad())?);
    if n < 2 || m < 2 {
        return Err(Error::Config(format!("grid {n}x{m} is degenerate: each resolution must be at least 2")));
    }
    Ok((n, m))
}

pub fn parse_lambda(s: &str) -> Result<Causality> {
    match s.trim().to_ascii_lowercase().as_str() {
        "+1" | "1" | "timelike" => Ok(Causality::Timelike),
        "-1" | "spacelike" => Ok(Causality::Spacelike),
        other => Err(Error::Config(format!(
            "invalid lambda `{other}` (expected +1, -1, spacelike or timelike)"
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Perturbation {
    Nu(f64),
    Epsilon(f64),
}

impl FromStr for Perturbation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("invalid perturbation `{s}` (expected nu=<rel> or epsilon=<rel>)"));
        let (k, v) = s.split_once('=').ok_or_else(bad)?;
        let rel = parse_real(v)?;
        match k.trim() {
            "nu" => Ok(Perturbation::Nu(rel)),
            "epsilon" | "eps" => Ok(Perturbation::Epsilon(rel)),
            _ => Err(bad()),
        }
    }
}

impl Perturbation {
    pub fn apply(self, p: &BergerParams) -> Result<BergerParams> {
        match self {
            Perturbation::Nu(r) => BergerParams::new(p.epsilon(), p.causality, p.nu * (1.0 + r)),
            Perturbation::Epsilon(r) => BergerParams::new(p.epsilon() * (1.0 + r), p.causality, p.nu),
        }
    }
}

/// One surface to sample or verify.
#[derive(Clone, Debug)]
pub struct Variant {
    pub label: String,
    pub spec: HelixSpec,
    /// Parameters the surface is checked against.
    pub verify_params: BergerParams,
    pub grid: GridSpec,
}

/// Validated run configuration shared by `surface` and `verify`.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub variants: Vec<Variant>,
    pub tolerances: Tolerances,
    pub report: Option<PathBuf>,
}

/// Validated ε, ν, λ (possibly several λ for a preset) without a family.
pub fn resolve_params(args: &ParamArgs) -> Result<Vec<(String, BergerParams, Option<PresetKind>)>> {
    let lambda = args.lambda.as_deref().map(parse_lambda).transpose()?;
    match args.preset {
        Some(p) => {
            let kind = PresetKind::from(p);
            let mut conflicts = Vec::new();
            if args.epsilon.is_some() {
                conflicts.push("-e/--epsilon");
            }
            if args.nu.is_some() {
                conflicts.push("-n/--nu");
            }
            if !conflicts.is_empty() {
                return Err(Error::Config(format!(
                    "--preset {} fixes the parameters; conflicting options: {}",
                    kind.name(),
                    conflicts.join(", ")
                )));
            }
            let causalities = match (lambda, kind.fixed_causality()) {
                (Some(l), Some(fixed)) if l != fixed => {
                    return Err(Error::Config(format!(
                        "--preset {} is {} only; conflicting option: -l/--lambda {}",
                        kind.name(),
                        fixed.name(),
                        l.name()
                    )))
                }
                (Some(l), _) => vec![l],
                (None, _) => kind.causalities(),
            };
            causalities
                .into_iter()
                .map(|c| {
                    let params = BergerParams::new(kind.epsilon(), c, kind.nu())?;
                    Ok((format!("{}-{}", kind.name(), c.name()), params, Some(kind)))
                })
                .collect()
        }
        None => {
            let mut missing = Vec::new();
            if args.epsilon.is_none() {
                missing.push("-e/--epsilon");
            }
            if args.nu.is_none() {
                missing.push("-n/--nu");
            }
            if lambda.is_none() {
                missing.push("-l/--lambda");
            }
            if !missing.is_empty() {
                return Err(Error::Config(format!(
                    "missing {} (or use --preset)",
                    missing.join(", ")
                )));
            }
            let c = lambda.unwrap();
            let params = BergerParams::new(args.epsilon.unwrap(), c, args.nu.unwrap())?;
            Ok(vec![(format!("custom-{}", c.name()), params, None)])
        }
    }
}

fn curve(s: &str) -> Result<Arc<dyn ScalarCurve>> {
    Ok(Arc::new(s.parse::<NamedCurve>()?))
}

fn build_family(sel: &SurfaceSelection, params: &BergerParams, preset: Option<PresetKind>) -> Result<IsometryFamily> {
    let family = match preset {
        Some(_) => None,
        None => Some(sel.family.unwrap_or(FamilyArg::Example1)),
    };
    let given = |name: &'static str, o: &Option<String>| o.as_ref().map(|_| name);
    let used: Vec<&str> = [
        given("--xi1", &sel.xi1),
        given("--xi2", &sel.xi2),
        given("--xi3", &sel.xi3),
        given("--xi", &sel.xi),
        given("--d2", &sel.d2),
        given("--d3", &sel.d3),
        sel.family.map(|_| "--family"),
    ]
    .into_iter()
    .flatten()
    .collect();
    let allowed: &[&str] = match family {
        None => &[],
        Some(FamilyArg::Example1) => &["--xi2", "--family"],
        Some(FamilyArg::Example2) => &["--d2", "--d3", "--family"],
        Some(FamilyArg::Custom) => &["--xi1", "--xi2", "--xi3", "--xi", "--family"],
    };
    let conflicts: Vec<&str> = used.iter().copied().filter(|u| !allowed.contains(u)).collect();
    if !conflicts.is_empty() {
        let what = match family {
            None => "a preset".to_string(),
            Some(f) => format!("--family {}", f.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()),
        };
        return Err(Error::Config(format!("{what} does not accept: {}", conflicts.join(", "))));
    }
    let real = |o: &Option<String>| o.as_deref().map(parse_real).transpose().map(|x| x.unwrap_or(0.0));
    let fam = match family {
        None => preset.unwrap().preset(params.causality)?.spec.family,
        Some(FamilyArg::Example1) => example1_family(curve(sel.xi2.as_deref().unwrap_or("v"))?),
        Some(FamilyArg::Example2) => example2_family(params, real(&sel.d2)?, real(&sel.d3)?)?,
        Some(FamilyArg::Custom) => {
            fn need<'a>(o: &'a Option<String>, name: &str) -> Result<&'a str> {
                o.as_deref().ok_or_else(|| Error::Config(format!("--family custom requires {name}")))
            }
            IsometryFamily::new(
                real(&sel.xi)?,
                curve(need(&sel.xi1, "--xi1")?)?,
                curve(need(&sel.xi2, "--xi2")?)?,
                curve(need(&sel.xi3, "--xi3")?)?,
            )
        }
    };
    Ok(match sel.branch {
        Some(BranchArg::Anticommuting) => fam.with_sign(SignChoice::anticommuting()),
        Some(BranchArg::Commuting) => fam.with_sign(SignChoice::commuting()),
        None => fam,
    })
}

impl RunConfig {
    pub fn from_selection(sel: &SurfaceSelection) -> Result<Self> {
        let (nu, nv) = parse_grid(&sel.grid)?;
        let tolerances = Tolerances::default().scaled(sel.tol)?;
        let perturbation = sel.perturb.as_deref().map(str::parse::<Perturbation>).transpose()?;
        if sel.u_range.is_some() && sel.s_range.is_some() {
            return Err(Error::Config("--u-range and --s-range are mutually exclusive".into()));
        }
        if sel.branch == Some(BranchArg::Anticommuting) && !sel.unchecked {
            return Err(Error::Validation(
                "the anticommuting branch does not generate helix surfaces; pass --unchecked to build it anyway".into(),
            ));
        }
        let mut variants = Vec::new();
        for (label, params, preset) in resolve_params(&sel.params)? {
            let constants = HelixConstants::new(&params)?;
            let root = constants.a_tilde.sqrt();
            let (default_s, default_v) = match preset {
                Some(k) => (k.s_range(), k.v_range()),
                None => ((-4.0 * std::f64::consts::PI, 4.0 * std::f64::consts::PI), (-2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI)),
            };
            let u_range = match (&sel.u_range, &sel.s_range) {
                (Some(u), _) => parse_range(u)?,
                (None, s) => {
                    let s = s.as_deref().map(parse_range).transpose()?.unwrap_or(default_s);
                    (s.0 / root, s.1 / root)
                }
            };
            let v_range = sel.v_range.as_deref().map(parse_range).transpose()?.unwrap_or(default_v);
            let family = build_family(sel, &params, preset)?;
            let family = if preset.is_some() && sel.v_range.is_none() {
                family
            } else {
                family.with_domain(v_range.0 - PRESET_DOMAIN_PAD, v_range.1 + PRESET_DOMAIN_PAD)
            };
            let spec = if sel.unchecked {
                HelixSpec::unchecked(params, family)?
            } else {
                HelixSpec::new(params, family)?
            };
            let verify_params = match perturbation {
                Some(p) => p.apply(&params)?,
                None => params,
            };
            variants.push(Variant {
                label,
                spec,
                verify_params,
                grid: GridSpec::new(u_range, v_range, nu, nv),
            });
        }
        Ok(RunConfig {
            variants,
            tolerances,
            report: sel.report.clone(),
        })
    }
}

pub fn parse_formats(list: &[String]) -> Result<Vec<Format>> {
    let mut out: Vec<Format> = Vec::new();
    for f in list {
        let f: Format = f.parse()?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    Ok(out)
}

pub fn parse_pole(s: &str) -> Result<Pole> {
    s.parse()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_with_pi() {
        use std::f64::consts::PI;
        assert_eq!(parse_real("-2pi").unwrap(), -2.0 * PI);
        assert_eq!(parse_real("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_real("-pi").unwrap(), -PI);
        assert_eq!(parse_real("0.25").unwrap(), 0.25);
        assert!(parse_real("two").is_err());
    }

    #[test]
    fn ranges_and_grids() {
        assert_eq!(parse_range("-1:2").unwrap(), (-1.0, 2.0));
        assert!(parse_range("2:1").is_err());
        assert!(parse_range("1").is_err());
        assert_eq!(parse_grid("64x32").unwrap(), (64, 32));
        assert!(parse_grid("1x5").is_err());
        assert!(parse_grid("64").is_err());
    }

    #[test]
    fn lambda_spellings() {
        for s in ["+1", "1", "timelike"] {
            assert_eq!(parse_lambda(s).unwrap(), Causality::Timelike);
        }
        for s in ["-1", "spacelike", "Spacelike"] {
            assert_eq!(parse_lambda(s).unwrap(), Causality::Spacelike);
        }
        assert!(parse_lambda("0").is_err());
    }

    #[test]
    fn perturbation_parsing() {
        assert_eq!("nu=0.01".parse::<Perturbation>().unwrap(), Perturbation::Nu(0.01));
        assert_eq!("epsilon=-0.01".parse::<Perturbation>().unwrap(), Perturbation::Epsilon(-0.01));
        assert!("mu=1".parse::<Perturbation>().is_err());
    }

    #[test]
    fn preset_conflicts() {
        let args = ParamArgs {
            epsilon: Some(1.0),
            nu: None,
            lambda: None,
            preset: Some(PresetArg::Fig2),
        };
        let err = resolve_params(&args).unwrap_err().to_string();
        assert!(err.contains("-e/--epsilon"), "{err}");
        let args = ParamArgs {
            epsilon: None,
            nu: None,
            lambda: Some("timelike".into()),
            preset: Some(PresetArg::Fig3),
        };
        assert!(resolve_params(&args).is_err());
        let args = ParamArgs {
            lambda: None,
            ..args
        };
        assert_eq!(resolve_params(&args).unwrap().len(), 1);
    }
}
