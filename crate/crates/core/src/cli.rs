//! Command-line front end.
//!
//! Exit codes: `0` success, `1` unreadable or malformed input (including
//! bad flags), `2` analysis error (including `∂∘∂ ≠ 0`), `3` harness
//! inconsistency, `4` self-test failure.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::asymptotic::{analyze_map, parse_map_file, AsymptoticError, Verdict};
use crate::ih::{
    betti_table, corpus, duality_check, homology, ih_betti, invariance_check, ordinary_duality, validate_pseudomanifold,
    FilteredComplex, IhError, Variant,
};
use crate::nf_models::{
    build_nf_model, equivalence_harness, equivalence_harness_on_complex, example_3_2, Consistency, EquivalenceReport, Field,
    ModelError, ModelParams,
};
use crate::strata::{all_perversities, make_perversity, Perversity, PerversityKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ANALYSIS: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;
pub const EXIT_SELFTEST: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "polyinf", version, about = "Singularities at infinity of polynomial maps and intersection homology")]
pub struct Cli {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Base disk radius for the models (chosen automatically if unset).
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Closed,
    Relative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Auto,
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerdictArg {
    Proper,
    NonProper,
    Unknown,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Singular locus, critical values, non-properness set, leading rank
    /// and properness verdict of a map.
    Analyze { map: PathBuf },
    /// Intersection homology of a complex file or built-in complex.
    Ih {
        /// JSON complex file, or one of the built-in names.
        complex: String,
        /// zero | max | lower-middle | upper-middle | custom:p2,p3,… (repeatable;
        /// default: every perversity).
        #[arg(long = "perversity")]
        perversities: Vec<String>,
        #[arg(long, value_enum, default_value_t = VariantArg::Closed)]
        variant: VariantArg,
        /// Barycentric subdivisions applied before computing.
        #[arg(long, default_value_t = 1)]
        subdivide: usize,
        #[arg(long)]
        duality: bool,
        #[arg(long)]
        invariance: bool,
    },
    /// Compare the properness verdict with the homology of the model.
    Harness {
        /// Map file. Omit when `--complex` is given.
        map: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FieldArg::Auto)]
        field: FieldArg,
        #[arg(long = "perversity")]
        perversities: Vec<String>,
        /// Run the homological half on a complex file or built-in complex.
        #[arg(long, conflicts_with = "map")]
        complex: Option<String>,
        /// Properness verdict paired with `--complex`.
        #[arg(long, value_enum, default_value_t = VerdictArg::Unknown)]
        verdict: VerdictArg,
    },
    /// The worked example (x, x²y(y+2)): analysis, model and triangulation.
    Example32,
    /// Quick end-to-end checks on fixed inputs.
    Selftest,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure { code: EXIT_INPUT, message: message.to_string() }
    }

    fn analysis(message: impl ToString) -> Self {
        Failure { code: EXIT_ANALYSIS, message: message.to_string() }
    }
}

impl From<IhError> for Failure {
    fn from(e: IhError) -> Self {
        match e {
            IhError::NotAComplex(_) => Failure::analysis(e),
            IhError::Format(_) | IhError::Malformed(_) | IhError::Filtration(_) | IhError::DimensionMismatch { .. } => {
                Failure::input(e)
            }
            other => Failure::analysis(other),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Ih(inner) => inner.into(),
            other => Failure::analysis(other),
        }
    }
}

/// A finished report: text body, JSON body and exit code.
struct Report {
    text: String,
    json: Value,
    code: i32,
}

pub fn run_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    if cli.radius.is_some_and(|r| !(r.is_finite() && r > 0.0)) {
        let _ = writeln!(err, "error: --radius must be positive");
        return EXIT_INPUT;
    }
    match execute(&cli) {
        Ok(report) => {
            let _ = match cli.format {
                Format::Text => write!(out, "{}{}", report.text, trailer(cli.seed)),
                Format::Json => {
                    let doc = json!({
                        "tool": env!("CARGO_PKG_NAME"),
                        "version": env!("CARGO_PKG_VERSION"),
                        "seed": cli.seed,
                        "report": report.json,
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("JSON values serialise"))
                }
            };
            report.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn trailer(seed: u64) -> String {
    format!("#trailer tool={} version={} seed={seed}\n", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    let params = ModelParams { seed: cli.seed, radius: cli.radius };
    match &cli.command {
        Command::Analyze { map } => analyze(map, cli.seed),
        Command::Ih { complex, perversities, variant, subdivide, duality, invariance } => {
            let variant = match variant {
                VariantArg::Closed => Variant::Closed,
                VariantArg::Relative => Variant::Relative,
            };
            ih(&load_complex(complex)?, perversities, variant, *subdivide, *duality, *invariance)
        }
        Command::Harness { map, field, perversities, complex, verdict } => {
            let kinds = perversity_kinds(perversities)?;
            match (map, complex) {
                (_, Some(c)) => harness_complex(&load_complex(c)?, *verdict, &kinds),
                (Some(m), None) => harness(&load_map(m)?, *field, &params, &kinds),
                (None, None) => Err(Failure::input("harness needs a map file or --complex")),
            }
        }
        Command::Example32 => example32(),
        Command::Selftest => Ok(selftest()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_map(path: &Path) -> Result<crate::poly::PolyMap, Failure> {
    parse_map_file(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// A path to a JSON complex, or a built-in name when no such file exists.
fn load_complex(spec: &str) -> Result<FilteredComplex, Failure> {
    let path = Path::new(spec);
    if !path.exists() && corpus::BUILTIN_NAMES.contains(&spec) {
        return Ok(corpus::by_name(spec)?);
    }
    let text = read(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{spec}: {e}")))?;
    Ok(FilteredComplex::from_json(&v)?)
}

fn perversity_kinds(specs: &[String]) -> Result<Vec<PerversityKind>, Failure> {
    specs.iter().map(|s| PerversityKind::parse(s).map_err(Failure::input)).collect()
}

fn analyze(path: &Path, seed: u64) -> Result<Report, Failure> {
    let f = load_map(path)?;
    let a = analyze_map(&f, seed);
    // Elimination needs n = 2; for other n the report is still complete.
    let failed = |r: Result<(), &AsymptoticError>| matches!(r, Err(e) if !matches!(e, AsymptoticError::Dimension(_)));
    let code = if failed(a.critical.as_ref().map(|_| ())) || failed(a.jelonek.as_ref().map(|_| ())) {
        EXIT_ANALYSIS
    } else {
        EXIT_OK
    };
    Ok(Report { text: a.to_text(), json: a.to_json(), code })
}

fn ih(
    k: &FilteredComplex,
    specs: &[String],
    variant: Variant,
    subdivide: usize,
    duality: bool,
    invariance: bool,
) -> Result<Report, Failure> {
    let mut k = k.clone();
    for _ in 0..subdivide {
        k = k.barycentric_subdivision();
    }
    let m = k.m();
    let perversities: Vec<Perversity> = if specs.is_empty() {
        all_perversities(m)
    } else {
        let kinds = perversity_kinds(specs)?;
        kinds.iter().map(|kind| make_perversity(kind, m).map_err(Failure::input)).collect::<Result<_, _>>()?
    };
    if variant == Variant::Relative && !k.has_boundary() {
        return Err(Failure::input(IhError::NoBoundary));
    }

    let mut text = String::new();
    let h = homology(&k, variant)?;
    let _ = writeln!(text, "dimension: {m}");
    let _ = writeln!(text, "subdivisions: {subdivide}");
    let _ = writeln!(text, "H ({variant}): {}", tuple(&h));
    let results = perversities.iter().map(|p| ih_betti(&k, p, variant)).collect::<Result<Vec<_>, _>>()?;
    text.push_str(&betti_table(&results));
    let pm = validate_pseudomanifold(&k);
    let _ = writeln!(text, "pseudomanifold: {}", pm.is_pseudomanifold);

    let mut json = json!({
        "dimension": m,
        "subdivisions": subdivide,
        "variant": variant.to_string(),
        "homology": h,
        "ih": results.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        "pseudomanifold": pm.to_json(),
    });

    if duality {
        let mut rows = Vec::new();
        match ordinary_duality(&k) {
            Ok((pass, left, right)) => {
                let _ = writeln!(text, "duality ordinary: {} H_k = {} vs H_(m-k) = {}", verdict(pass), tuple(&left), reversed(&right));
                rows.push(json!({"kind": "ordinary", "pass": pass, "left": left, "right": right}));
            }
            Err(e) => {
                let _ = writeln!(text, "duality ordinary: unavailable ({e})");
                rows.push(json!({"kind": "ordinary", "error": e.to_string()}));
            }
        }
        for p in &perversities {
            let q = p.complement();
            match duality_check(&k, p, &q) {
                Ok(r) => {
                    let _ = writeln!(
                        text,
                        "duality IH^{p} vs IH^{q}: {} IH_k = {} vs IH_(m-k) = {}",
                        verdict(r.pass),
                        tuple(&r.left.betti),
                        reversed(&r.right.betti)
                    );
                    rows.push(json!({"kind": "intersection", "perversity": p.values(), "report": r.to_json()}));
                }
                Err(e @ IhError::NotAComplex(_)) => return Err(e.into()),
                Err(e) => {
                    let _ = writeln!(text, "duality IH^{p}: unavailable ({e})");
                    rows.push(json!({"kind": "intersection", "perversity": p.values(), "error": e.to_string()}));
                }
            }
        }
        json["duality"] = Value::Array(rows);
    }

    if invariance {
        let mut rows = Vec::new();
        for p in &perversities {
            let r = invariance_check(&k, p, None)?;
            let _ = writeln!(
                text,
                "invariance IH^{p}: {} {} after one more subdivision {}",
                verdict(r.pass),
                tuple(&r.base),
                tuple(&r.subdivided)
            );
            rows.push(json!({"perversity": p.values(), "report": r.to_json()}));
        }
        json["invariance"] = Value::Array(rows);
    }
    Ok(Report { text, json, code: EXIT_OK })
}

fn tuple(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn reversed(v: &[usize]) -> String {
    tuple(&v.iter().rev().copied().collect::<Vec<_>>())
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn default_kinds(kinds: &[PerversityKind]) -> Vec<PerversityKind> {
    if kinds.is_empty() {
        vec![PerversityKind::Zero, PerversityKind::LowerMiddle, PerversityKind::UpperMiddle, PerversityKind::Max]
    } else {
        kinds.to_vec()
    }
}

/// Perversities that coincide in the model dimension are reported once.
fn dedup_kinds(kinds: &[PerversityKind], m: usize) -> Vec<PerversityKind> {
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for kind in kinds {
        match make_perversity(kind, m) {
            Ok(p) if seen.contains(&p) => {}
            Ok(p) => {
                seen.push(p);
                out.push(kind.clone());
            }
            Err(_) => out.push(kind.clone()),
        }
    }
    out
}

fn harness_report(r: EquivalenceReport, field: Option<Field>) -> Report {
    let code = if r.consistency == Consistency::Inconsistent { EXIT_INCONSISTENT } else { EXIT_OK };
    let mut text = String::new();
    if let Some(field) = field {
        let _ = writeln!(text, "field: {field:?}");
    }
    text.push_str(&r.to_text());
    let mut json = r.to_json();
    if let Some(field) = field {
        json["field"] = json!(format!("{field:?}").to_lowercase());
    }
    Report { text, json, code }
}

fn harness(f: &crate::poly::PolyMap, field: FieldArg, params: &ModelParams, kinds: &[PerversityKind]) -> Result<Report, Failure> {
    let field = match field {
        FieldArg::Real => Field::Real,
        FieldArg::Complex => Field::Complex,
        FieldArg::Auto => match build_nf_model(f, Field::Real, params) {
            Ok(_) => Field::Real,
            Err(_) => Field::Complex,
        },
    };
    let m = build_nf_model(f, field, params)?.dim();
    let kinds = dedup_kinds(&default_kinds(kinds), m);
    Ok(harness_report(equivalence_harness(f, field, params, &kinds)?, Some(field)))
}

fn harness_complex(k: &FilteredComplex, verdict: VerdictArg, kinds: &[PerversityKind]) -> Result<Report, Failure> {
    let verdict = match verdict {
        VerdictArg::Proper => Verdict::Proper,
        VerdictArg::NonProper => Verdict::NonProper,
        VerdictArg::Unknown => Verdict::Unknown,
    };
    let kinds = dedup_kinds(&default_kinds(kinds), k.m());
    Ok(harness_report(equivalence_harness_on_complex(k, verdict, &kinds)?, None))
}

fn example32() -> Result<Report, Failure> {
    let (f, model, k) = example_3_2();
    let a = analyze_map(&f, 0);
    let pm = validate_pseudomanifold(&k);
    let h = homology(&k, Variant::Closed)?;
    let counts: Vec<usize> = (0..=k.m()).map(|d| k.count(d)).collect();
    let mut text = String::new();
    text.push_str(&a.to_text());
    text.push_str(&model.to_text());
    let _ = writeln!(text, "triangulation cells per dimension: {}", tuple(&counts));
    let _ = writeln!(text, "pseudomanifold: {} (singular codimension {:?})", pm.is_pseudomanifold, pm.codim);
    let _ = writeln!(text, "H (closed): {}", tuple(&h));
    let json = json!({
        "analysis": a.to_json(),
        "model": model.to_json(),
        "triangulation": {"cells": counts, "pseudomanifold": pm.to_json(), "homology": h},
    });
    Ok(Report { text, json, code: EXIT_OK })
}

fn selftest() -> Report {
    let mut checks: Vec<(&str, bool)> = Vec::new();
    let p0 = |m| make_perversity(&PerversityKind::Zero, m).expect("zero perversity exists for m ≥ 2");
    let pinched = ih_betti(&corpus::pinched_torus(), &p0(2), Variant::Closed).map(|r| r.betti);
    checks.push(("pinched torus IH^0 = (1, 0, 1)", pinched.is_ok_and(|b| b == [1, 0, 1])));
    checks.push(("torus H = (1, 2, 1)", homology(&corpus::torus(), Variant::Closed).is_ok_and(|h| h == [1, 2, 1])));
    let st = corpus::suspended_torus();
    let top = make_perversity(&PerversityKind::Max, 3).expect("max perversity exists for m = 3");
    checks.push(("suspended torus ordinary duality fails", ordinary_duality(&st).is_ok_and(|r| !r.0)));
    checks.push(("suspended torus IH duality holds", duality_check(&st, &top, &top.complement()).is_ok_and(|r| r.pass)));
    let (_, model, k) = example_3_2();
    let sheets: Vec<usize> = model.regions.iter().map(|r| r.sheet_count).collect();
    checks.push(("worked example sheet counts (2, 2, 0)", sheets == [2, 2, 0]));
    checks.push(("worked example model is connected", homology(&k, Variant::Closed).is_ok_and(|h| h[0] == 1)));

    checks_report(&checks)
}

fn checks_report(checks: &[(&str, bool)]) -> Report {
    let mut text = String::new();
    for (name, ok) in checks {
        let _ = writeln!(text, "{} {name}", verdict(*ok));
    }
    let pass = checks.iter().all(|c| c.1);
    let json = json!({
        "pass": pass,
        "checks": checks.iter().map(|(n, ok)| json!({"name": n, "pass": ok})).collect::<Vec<_>>(),
    });
    Report { text, json, code: if pass { EXIT_OK } else { EXIT_SELFTEST } }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_check_sets_the_selftest_code() {
        assert_eq!(checks_report(&[("a", true), ("b", false)]).code, EXIT_SELFTEST);
        assert_eq!(checks_report(&[("a", true)]).code, EXIT_OK);
    }

    #[test]
    fn selftest_passes() {
        let r = selftest();
        assert_eq!(r.code, EXIT_OK, "{}", r.text);
    }
}
