use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use spectral_forge::dataset::{
    builtin_dataset, compare_scaling, read_series_csv, scaling_comparison, synthetic_scaling, write_scaling_csv,
    ScalingRow, SeriesId,
};
use spectral_forge::inversion::{forward_residuals_with, invert as run_inversion, max_abs_residual, write_residuals_csv};
use spectral_forge::observables::{ground_state_form_factor, FormFactorCurve};
use spectral_forge::{
    curve_from_points, eigensolver::ground_state_with, Error, PotentialShape, ProblemSetup, Provenance, SpectralCurve,
    TabulatedShape,
};

use crate::config::{ConfigFile, KGrid};
use crate::manifest::Run;
use crate::CliError;

pub struct Context {
    pub out_dir: PathBuf,
    pub config: ConfigFile,
    pub config_path: Option<PathBuf>,
}

impl Context {
    fn out_dir(&self) -> Result<&Path, CliError> {
        fs::create_dir_all(&self.out_dir).map_err(Error::from)?;
        Ok(&self.out_dir)
    }

    fn start(&self, subcommand: &str) -> Result<Run, CliError> {
        let mut run = Run::start(subcommand);
        if let Some(p) = &self.config_path {
            run.input_file(p)?;
        }
        Ok(run)
    }
}

fn parse_shape(spec: &str, mu: Option<f64>) -> Result<PotentialShape, CliError> {
    if spec.trim().eq_ignore_ascii_case("yukawa") {
        let mu = mu.ok_or_else(|| CliError::Usage("`yukawa` needs --mu or yukawa:mu=<value>".into()))?;
        return PotentialShape::yukawa(mu).map_err(|e| CliError::Usage(e.to_string()));
    }
    PotentialShape::from_spec(spec).map_err(|e| match e {
        Error::Io(_) | Error::Csv(_) => CliError::Core(e),
        Error::NonMonotone { .. } | Error::InvalidShape(_) if spec.starts_with("table:") => CliError::Core(e),
        other => CliError::Usage(other.to_string()),
    })
}

fn setup(m: f64, v: f64) -> Result<ProblemSetup, CliError> {
    ProblemSetup::new(m, v).map_err(|e| CliError::Usage(e.to_string()))
}

fn label(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

#[derive(Serialize)]
struct SolveConfig<'a> {
    shape: String,
    v: f64,
    m: f64,
    solver: &'a spectral_forge::SolverOptions,
}

pub fn solve(
    ctx: &Context,
    spec: &str,
    v: f64,
    m: f64,
    mu: Option<f64>,
    output: Option<PathBuf>,
) -> Result<(), CliError> {
    let shape = parse_shape(spec, mu)?;
    let solver = ctx.config.solver();
    let mut run = ctx.start("solve")?;
    run.config(&SolveConfig { shape: shape.to_string(), v, m, solver: &solver })?;
    if let Some(path) = spec.strip_prefix("table:") {
        run.input_file(Path::new(path))?;
    }
    let gs = ground_state_with(&shape, setup(m, v)?, &solver)?;
    let out_dir = ctx.out_dir()?;
    let path = output.unwrap_or_else(|| out_dir.join("wavefunction.csv"));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(Error::from)?;
    }
    gs.wavefunction.write_csv(fs::File::create(&path).map_err(Error::from)?)?;
    run.output(path);
    println!("{:.10}", gs.energy);
    eprintln!("dE/dv = {:.10}, tolerance {:.1e}, domain r <= {:.1}", gs.slope, gs.tolerance, gs.domain);
    run.finish(out_dir)?;
    Ok(())
}

/// Spectral data named on the command line: builtin series or CSV.
struct Data {
    name: String,
    curve: SpectralCurve,
}

fn load_data(spec: &str, run: &mut Run) -> Result<Data, CliError> {
    if let Ok(id) = spec.parse::<SeriesId>() {
        let d = builtin_dataset();
        run.input_bytes(&format!("builtin:{id}"), d.checksum().as_bytes());
        return Ok(Data { name: id.name().into(), curve: d.curve(id)? });
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "`{spec}` is neither a builtin series (ladder-0.15, ladder-0.5, lcl-0.5) nor a file"
        )));
    }
    let bytes = fs::read(path).map_err(Error::from)?;
    run.input_bytes(&path.display().to_string(), &bytes);
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "data".into());
    let header = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
    let header: String = String::from_utf8_lossy(header).chars().filter(|c| !c.is_whitespace()).collect();
    let curve = match header.as_str() {
        "v,E" => SpectralCurve::from_csv(bytes.as_slice(), Provenance::Dataset)?,
        "series,mu,v,E" => {
            let series = read_series_csv(bytes.as_slice())?;
            match series.as_slice() {
                [one] => curve_from_points(&one.points)?,
                _ => {
                    return Err(CliError::Core(Error::InsufficientData(format!(
                        "{} holds {} series; give a file with exactly one",
                        path.display(),
                        series.len()
                    ))))
                }
            }
        }
        other => return Err(CliError::Core(Error::Parse(format!("unrecognized header `{other}` in {spec}")))),
    };
    Ok(Data { name, curve })
}

#[derive(Serialize)]
struct InvertConfig<'a> {
    data: &'a str,
    seed: String,
    inversion: &'a spectral_forge::inversion::InversionConfig,
}

fn inversion_trace(
    ctx: &Context,
    data: &Data,
    seed: &PotentialShape,
    n: Option<usize>,
    m: f64,
) -> Result<spectral_forge::inversion::InversionTrace, CliError> {
    let config = ctx.config.inversion(n, m)?;
    Ok(run_inversion(&data.curve, seed, &config).map_err(|e| match e {
        Error::InvalidShape(msg) => CliError::Usage(msg),
        other => CliError::Core(other),
    })?)
}

pub fn invert(
    ctx: &Context,
    data_spec: &str,
    seed_spec: &str,
    n: Option<usize>,
    m: f64,
    mu: Option<f64>,
) -> Result<(), CliError> {
    let seed = parse_shape(seed_spec, mu)?;
    let mut run = ctx.start("invert")?;
    let data = load_data(data_spec, &mut run)?;
    let config = ctx.config.inversion(n, m)?;
    run.config(&InvertConfig { data: data_spec, seed: seed.to_string(), inversion: &config })?;
    let trace = inversion_trace(ctx, &data, &seed, n, m)?;
    let dir = ctx.out_dir()?.join(&data.name);
    run.outputs(trace.export(&dir)?);

    let residuals = forward_residuals_with(&trace.final_shape()?, &data.curve, m, &config.solver);
    let res_path = dir.join("residuals.csv");
    write_residuals_csv(fs::File::create(&res_path).map_err(Error::from)?, &residuals)?;
    run.output(res_path);

    for (i, s) in trace.stages().iter().enumerate() {
        println!(
            "stage {i}: |f{} - f{i}| = {:.3e}, boundary maxima K {} f {}",
            i + 1,
            s.step_norm,
            s.k_boundary,
            s.f_boundary
        );
    }
    let missing = residuals.iter().filter(|r| r.residual.is_none()).count();
    println!("max |F{}(v) - F(v)| = {:.3e} over {} samples ({missing} missing)", trace.iterations(), max_abs_residual(&residuals), residuals.len());
    println!("trace written to {}", dir.display());
    run.finish(&dir)?;
    Ok(())
}

pub enum Source {
    Shape(String),
    Trace(String),
}

/// Resolves `<dir>/f<n>` to an iterate CSV, or `<series>/f<n>` to a fresh
/// inversion of a builtin series.
fn resolve_trace(ctx: &Context, spec: &str, m: f64, run: &mut Run) -> Result<PotentialShape, CliError> {
    let mut candidates = vec![PathBuf::from(spec), PathBuf::from(format!("{spec}.csv"))];
    candidates.push(ctx.out_dir.join(spec));
    candidates.push(ctx.out_dir.join(format!("{spec}.csv")));
    if let Some(path) = candidates.into_iter().find(|p| p.is_file()) {
        run.input_file(&path)?;
        return Ok(PotentialShape::Tabulated(TabulatedShape::from_csv_path(&path)?));
    }
    let (series, iterate) = spec
        .rsplit_once('/')
        .ok_or_else(|| CliError::Usage(format!("trace `{spec}` is not a file and not of the form <series>/f<n>")))?;
    let id: SeriesId = series
        .parse()
        .map_err(|_| CliError::Usage(format!("no iterate file for `{spec}` and `{series}` is not a builtin series")))?;
    let n: usize = iterate
        .strip_prefix('f')
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| CliError::Usage(format!("iterate `{iterate}` should look like f8")))?;
    eprintln!("no iterate file for {spec}; running the inversion of {id} ({n} iterations)");
    let data = load_data(series, run)?;
    let trace = inversion_trace(ctx, &data, &PotentialShape::Coulomb, Some(n.max(1)), m)?;
    Ok(trace.shape(n)?)
}

fn source_shape(ctx: &Context, source: &Source, mu: Option<f64>, m: f64, run: &mut Run) -> Result<PotentialShape, CliError> {
    match source {
        Source::Shape(spec) => {
            if let Some(path) = spec.strip_prefix("table:") {
                run.input_file(Path::new(path))?;
            }
            parse_shape(spec, mu)
        }
        Source::Trace(spec) => resolve_trace(ctx, spec, m, run),
    }
}

#[derive(Serialize)]
struct FormFactorConfig<'a> {
    sources: Vec<&'a str>,
    v: f64,
    m: f64,
    k_grid: KGrid,
}

fn write_form_factor(dir: &Path, stem: &str, ff: &FormFactorCurve, run: &mut Run) -> Result<(), CliError> {
    let csv = dir.join(format!("{stem}.csv"));
    ff.write_csv(fs::File::create(&csv).map_err(Error::from)?)?;
    run.output(csv);
    let json = dir.join(format!("{stem}.json"));
    ff.write_meta(fs::File::create(&json).map_err(Error::from)?)?;
    run.output(json);
    Ok(())
}

fn source_name(source: &Source) -> &str {
    match source {
        Source::Shape(s) | Source::Trace(s) => s,
    }
}

pub fn formfactor(
    ctx: &Context,
    source: Source,
    v: f64,
    m: f64,
    mu: Option<f64>,
    k_grid: KGrid,
    single: bool,
) -> Result<(), CliError> {
    let mut run = ctx.start("formfactor")?;
    run.config(&FormFactorConfig { sources: vec![source_name(&source)], v, m, k_grid })?;
    let shape = source_shape(ctx, &source, mu, m, &mut run)?;
    let ff = ground_state_form_factor(&shape, setup(m, v)?, &k_grid.values()?)?;
    let dir = ctx.out_dir()?;
    write_form_factor(dir, "formfactor", &ff, &mut run)?;
    if single {
        println!("{:.10}", ff.values()[0]);
    } else {
        println!("F(0) = {:.12}", ff.values()[0]);
        match ff.half_max_crossing() {
            Some(k) => println!("k_half = {k:.6}"),
            None => println!("k_half not reached below k = {}", k_grid.k_max),
        }
    }
    run.finish(dir)?;
    Ok(())
}

pub fn formfactor_compare(
    ctx: &Context,
    specs: &[String],
    v: f64,
    m: f64,
    mu: Option<f64>,
    k_grid: KGrid,
) -> Result<(), CliError> {
    let mut run = ctx.start("formfactor")?;
    run.config(&FormFactorConfig { sources: specs.iter().map(String::as_str).collect(), v, m, k_grid })?;
    let dir = ctx.out_dir()?.to_path_buf();
    let ks = k_grid.values()?;
    let mut crossings = Vec::new();
    for spec in specs {
        // a spec that parses as a shape is a shape; anything else is a trace
        let source = match parse_shape(spec, mu) {
            Ok(_) => Source::Shape(spec.clone()),
            Err(_) => Source::Trace(spec.clone()),
        };
        let shape = source_shape(ctx, &source, mu, m, &mut run)?;
        let ff = ground_state_form_factor(&shape, setup(m, v)?, &ks)?;
        write_form_factor(&dir, &format!("formfactor-{}", label(spec)), &ff, &mut run)?;
        crossings.push((spec.as_str(), ff.half_max_crossing()));
    }
    crossings.sort_by(|a, b| b.1.unwrap_or(f64::INFINITY).total_cmp(&a.1.unwrap_or(f64::INFINITY)));
    println!("half-maximum momenta, broadest first:");
    for (spec, k) in &crossings {
        match k {
            Some(k) => println!("  {spec}\t{k:.6}"),
            None => println!("  {spec}\tabove k = {}", k_grid.k_max),
        }
    }
    run.finish(&dir)?;
    Ok(())
}

#[derive(Serialize)]
struct ScaleConfig<'a> {
    mode: &'a str,
    ratio: f64,
    series: Option<&'a str>,
    mu_ref: Option<f64>,
    m: f64,
}

/// Couplings of the synthetic scaling check.
const SYNTHETIC_COUPLINGS: [f64; 6] = [1.0, 1.5, 2.0, 3.0, 4.0, 5.0];

pub fn scale_check(
    ctx: &Context,
    ratio: Option<f64>,
    series: &str,
    synthetic: Option<&str>,
    mu: f64,
    m: f64,
) -> Result<(), CliError> {
    let mut run = ctx.start("scale-check")?;
    let rows: Vec<ScalingRow> = match (synthetic, ratio) {
        (Some(family), r) => {
            if !family.eq_ignore_ascii_case("yukawa") {
                return Err(CliError::Usage(format!("--synthetic supports `yukawa`, got `{family}`")));
            }
            let r = r.unwrap_or(10.0 / 3.0);
            if !(r > 0.0) {
                return Err(CliError::Usage(format!("--R must be > 0, got {r}")));
            }
            run.config(&ScaleConfig { mode: "synthetic-yukawa", ratio: r, series: None, mu_ref: Some(mu), m })?;
            synthetic_scaling(mu, mu / r, &SYNTHETIC_COUPLINGS, m)?
        }
        (None, Some(r)) => {
            let id: SeriesId = series.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
            if !(r > 0.0) {
                return Err(CliError::Usage(format!("--R must be > 0, got {r}")));
            }
            run.config(&ScaleConfig { mode: "single-series", ratio: r, series: Some(series), mu_ref: None, m })?;
            let d = builtin_dataset();
            run.input_bytes(&format!("builtin:{id}"), d.checksum().as_bytes());
            let p = d.points(id);
            compare_scaling(&p, &p, r * id.mu(), id.mu())?
        }
        (None, None) => {
            run.config(&ScaleConfig { mode: "bundled", ratio: 10.0 / 3.0, series: None, mu_ref: None, m })?;
            let d = builtin_dataset();
            run.input_bytes("builtin:dataset", d.checksum().as_bytes());
            scaling_comparison(&d)?
        }
    };
    let dir = ctx.out_dir()?;
    let path = dir.join("scaling.csv");
    write_scaling_csv(&rows, fs::File::create(&path).map_err(Error::from)?)?;
    run.output(path);
    let fmt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"));
    println!("origin\tv\tE_actual\tE_scaled\tdiscrepancy");
    for r in &rows {
        let origin = match r.origin {
            spectral_forge::dataset::RowOrigin::Mapped => "mapped",
            spectral_forge::dataset::RowOrigin::Observed => "observed",
        };
        // mapped couplings are products R v; trim float noise for display
        let v = format!("{:.8}", r.v);
        let v = v.trim_end_matches('0').trim_end_matches('.');
        println!("{origin}\t{v}\t{}\t{}\t{}", fmt(r.e_actual), fmt(r.e_scaled), fmt(r.discrepancy));
    }
    let worst = rows.iter().filter_map(|r| r.discrepancy).map(f64::abs).fold(0.0, f64::max);
    println!("max |discrepancy| = {worst:.3e}");
    run.finish(dir)?;
    Ok(())
}

pub fn dataset_export(ctx: &Context, output: Option<PathBuf>) -> Result<(), CliError> {
    let mut run = ctx.start("dataset-export")?;
    let d = builtin_dataset();
    run.config(&serde_json::json!({ "checksum": d.checksum() }))?;
    let dir = ctx.out_dir()?;
    let path = output.unwrap_or_else(|| dir.join("bs_dataset.csv"));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(Error::from)?;
    }
    d.write_csv(fs::File::create(&path).map_err(Error::from)?)?;
    run.output(path.clone());
    println!("{}", path.display());
    println!("sha256 {}", d.checksum());
    run.finish(dir)?;
    Ok(())
}
