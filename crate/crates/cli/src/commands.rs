use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use helix_core::export::{sample_mesh, write_mesh, Format};
use helix_core::helix::HelixConstants;
use helix_core::verify::{curve_metrics, full_report_with, measure_curve, FdOptions, ResidualReport};
use helix_core::Result;

use crate::config::{parse_formats, parse_pole, resolve_params, ParamArgs, RunConfig, SurfaceArgs, Variant, VerifyArgs};

/// Arc-length samples used for the measured curve invariants.
const CURVE_SAMPLES: [f64; 5] = [-2.0, -0.7, 0.0, 0.9, 3.1];

/// Integers within 1e-9 print without decimals; everything else with ten.
pub fn format_number(x: f64) -> String {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        format!("{}", r as i64)
    } else {
        format!("{x:.10}")
    }
}

fn header(out: &mut String, label: &str, multiple: bool) {
    if multiple {
        out.push_str(&format!("[{label}]\n"));
    }
}

pub fn constants(args: &ParamArgs) -> Result<bool> {
    let sets = resolve_params(args)?;
    let mut out = String::new();
    for (label, params, _) in &sets {
        let c = HelixConstants::new(params)?;
        header(&mut out, label, sets.len() > 1);
        for (k, v) in [
            ("B", c.b),
            ("a_tilde", c.a_tilde),
            ("b_tilde", c.b_tilde),
            ("alpha1", c.alpha1),
            ("alpha2", c.alpha2),
            ("g11", c.g11),
            ("g33", c.g33),
            ("d", c.d),
            ("D", c.big_d),
            ("E", c.big_e),
            ("I", c.big_i),
        ] {
            out.push_str(&format!("{k}={}\n", format_number(v)));
        }
    }
    print!("{out}");
    Ok(true)
}

pub fn curve(args: &ParamArgs) -> Result<bool> {
    let sets = resolve_params(args)?;
    let mut out = String::new();
    for (label, params, _) in &sets {
        let c = HelixConstants::new(params)?;
        let closed = curve_metrics(&c, params);
        let mut measured = [0.0f64; 4];
        for &s in &CURVE_SAMPLES {
            let m = measure_curve(&c, params, s)?;
            for (acc, x) in measured.iter_mut().zip([m.speed_eps, m.helix_angle, m.kappa_g, m.tau_g]) {
                *acc += x / CURVE_SAMPLES.len() as f64;
            }
        }
        header(&mut out, label, sets.len() > 1);
        for (k, v) in [
            ("speed_eps", closed.speed_eps),
            ("helix_angle", closed.helix_angle),
            ("kappa_g", closed.kappa_g),
            ("abs_tau_g", closed.tau_g),
            ("measured_speed_eps", measured[0]),
            ("measured_helix_angle", measured[1]),
            ("measured_kappa_g", measured[2]),
            ("measured_abs_tau_g", measured[3]),
        ] {
            out.push_str(&format!("{k}={}\n", format_number(v)));
        }
    }
    print!("{out}");
    Ok(true)
}

fn report_for(variant: &Variant, config: &RunConfig) -> Result<ResidualReport> {
    full_report_with(
        &variant.spec,
        &variant.verify_params,
        &variant.grid,
        &config.tolerances,
        &FdOptions::default(),
    )
}

fn render(blocks: &[(String, ResidualReport)]) -> String {
    let mut text = String::new();
    for (label, report) in blocks {
        text.push_str(&format!("meta,label,{label}\n"));
        text.push_str(&report.to_text());
    }
    text
}

fn emit_report(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn print_summary(blocks: &[(String, ResidualReport)]) {
    for (label, report) in blocks {
        let failed: Vec<&str> = report.failures().map(|r| r.name.as_str()).collect();
        if failed.is_empty() {
            eprintln!("{label}: pass ({} checks)", report.records.len());
        } else {
            eprintln!("{label}: FAIL ({})", failed.join(", "));
        }
    }
}

pub fn verify(args: &VerifyArgs) -> Result<bool> {
    let config = RunConfig::from_selection(&args.selection)?;
    let mut blocks = Vec::new();
    for variant in &config.variants {
        blocks.push((variant.label.clone(), report_for(variant, &config)?));
    }
    emit_report(&render(&blocks), config.report.as_deref())?;
    if config.report.is_some() {
        print_summary(&blocks);
    }
    Ok(blocks.iter().all(|(_, r)| r.pass()))
}

fn output_path(args: &SurfaceArgs, label: &str, multiple: bool, format: Format) -> PathBuf {
    match &args.out {
        Some(out) => {
            let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "surface".into());
            let name = if multiple { format!("{stem}-{label}") } else { stem };
            out.with_file_name(name).with_extension(format.extension())
        }
        None => {
            let dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            dir.join(label).with_extension(format.extension())
        }
    }
}

pub fn surface(args: &SurfaceArgs) -> Result<bool> {
    let config = RunConfig::from_selection(&args.selection)?;
    let formats = parse_formats(&args.format)?;
    let pole = parse_pole(&args.pole)?;
    let multiple = config.variants.len() > 1;
    let mut blocks = Vec::new();
    for variant in &config.variants {
        let mesh = sample_mesh(&variant.spec, &variant.spec.params, &variant.grid, pole)?;
        for &format in &formats {
            let path = output_path(args, &variant.label, multiple, format);
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let mut w = BufWriter::new(File::create(&path)?);
            write_mesh(&mesh, format, &mut w)?;
            w.flush()?;
            eprintln!("wrote {}", path.display());
        }
        let mut report = report_for(variant, &config)?;
        report.push_meta("pole", pole);
        report.push_meta("dropped_vertices", mesh.dropped);
        report.push_meta("faces", mesh.faces.len());
        blocks.push((variant.label.clone(), report));
    }
    emit_report(&render(&blocks), config.report.as_deref())?;
    print_summary(&blocks);
    Ok(blocks.iter().all(|(_, r)| r.pass()))
}
