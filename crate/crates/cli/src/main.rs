use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bctorus::bitquad::{isometry_classes, pointed_orbits, QuadForm};
use bctorus::eala::{Eala, ExportScope};
use bctorus::hermitian::HermitianData;
use bctorus::identities::{run_suite, SuiteConfig, DEFAULT_COUNT, DEFAULT_SEED};
use bctorus::io::{parse_quad_form, parse_spec, quad_form_to_json, spec_to_json};
use bctorus::lietorus::{check_lt_axioms_on, check_support_lemmas_on, centre_window_check_on, Slice, Window};
use bctorus::unitary::Unitary;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

/// Lie tori of type BC_r from quadratic forms over Z2.
#[derive(Parser)]
#[command(name = "bctorus", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Isometry classes of forms on Z2^n with their pointed-orbit catalogs.
    ClassifyForms {
        #[arg(long)]
        n: usize,
    },
    /// Pointed orbits of O(kappa) on subsets of iso(kappa).
    Orbits {
        #[arg(long)]
        n: usize,
        /// JSON form {"n","diag","polar_upper"} or a polynomial string like "l3 + l1l2".
        #[arg(long)]
        kappa: PathBuf,
    },
    /// Builds the data from a spec and runs the verification suite.
    Build {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 2)]
        window: i64,
        /// Exit with status 1 unless every check passes.
        #[arg(long)]
        check: bool,
        #[arg(long, env = "BCTORUS_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random instances per identity.
        #[arg(long, default_value_t = DEFAULT_COUNT)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exports structure constants of the EALA over a window.
    Eala {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1)]
        window: i64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_spec(path: &Path) -> Result<HermitianData> {
    parse_spec(&read(path)?).with_context(|| format!("invalid spec {}", path.display()))
}

fn load_form(n: usize, path: &Path) -> Result<QuadForm> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).context("kappa file is not JSON")?;
    let form = match value {
        Value::String(s) => QuadForm::parse(n, &s)?,
        _ => parse_quad_form(&text)?,
    };
    if form.dim() != n {
        bail!("kappa has dimension {}, expected {n}", form.dim());
    }
    Ok(form)
}

fn form_summary(k: &QuadForm) -> Value {
    json!({
        "polynomial": k.to_polynomial(),
        "form": quad_form_to_json(k),
        "radical": k.radical(),
        "iso": k.iso_set(),
    })
}

fn classify(n: usize) -> Result<Value> {
    if !(1..=4).contains(&n) {
        bail!("n must be between 1 and 4, got {n}");
    }
    let mut classes = Vec::new();
    for (index, k) in isometry_classes(n)?.iter().enumerate() {
        let mut entry = form_summary(k);
        entry["index"] = json!(index);
        entry["orbits"] = json!(pointed_orbits(k)?);
        classes.push(entry);
    }
    Ok(json!({"n": n, "classes": classes}))
}

fn build_report(data: HermitianData, window: Window, config: SuiteConfig) -> Value {
    let spec = spec_to_json(&data);
    let anisotropy = data.check_anisotropic();
    let u = Unitary::new(data);
    let slice = Slice::build(&u, window);
    let axioms = check_lt_axioms_on(&u, &slice);
    let support = check_support_lemmas_on(&u, &slice);
    let centre = centre_window_check_on(&u, &slice);
    let identities = run_suite(&u, config);
    let passed = anisotropy.passed && axioms.passed() && support.passed() && centre == 0 && identities.passed();
    json!({
        "spec": spec,
        "window": window.w,
        "anisotropy": {
            "passed": anisotropy.passed,
            "duplicates": anisotropy.duplicates,
            "bad_degrees": anisotropy.bad_degrees,
        },
        "axioms": axioms.to_json(),
        "support_lemmas": support.to_json(),
        "centre_dimension": centre,
        "identities": serde_json::to_value(&identities).expect("report serializes"),
        "type_b": axioms.type_b,
        "passed": passed,
    })
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::ClassifyForms { n } => emit(&classify(n)?, None)?,
        Command::Orbits { n, kappa } => {
            let k = load_form(n, &kappa)?;
            let mut doc = form_summary(&k);
            doc["orbits"] = json!(pointed_orbits(&k)?);
            emit(&doc, None)?;
        }
        Command::Build { spec, window, check, seed, count, out } => {
            if window < 0 {
                bail!("window must be nonnegative");
            }
            let data = load_spec(&spec)?;
            let report = build_report(data, Window::new(window), SuiteConfig { seed, count, ..SuiteConfig::default() });
            emit(&report, out.as_deref())?;
            return Ok(!check || report["passed"] == json!(true));
        }
        Command::Eala { spec, window, out } => {
            if window < 0 {
                bail!("window must be nonnegative");
            }
            let e = Eala::new(&load_spec(&spec)?)?;
            let doc = e.export(ExportScope::Window(Window::new(window))).to_json();
            emit(&doc, Some(&out))?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
