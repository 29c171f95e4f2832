use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float, Integer};
use serde::Serialize;
use serde_json::{json, Value};

use lavrik_core::hadamard::{arg_track, ProductConstants};
use lavrik_core::lambda::{l_function, lambda, mellin_barnes_check, verify_decomposition, xi_and_xi, z_from_l, EvalPoint};
use lavrik_core::numerics::decimal;
use lavrik_core::theta::{theta, theta_functional_check};
use lavrik_core::xray::{extract_curves, render, sign_grid, Canvas, Format, XrayFunction};
use lavrik_core::zeros::{read_table, verify_halfplane, write_table_with, zero_stats, AtlasOptions, Rect, ZeroAtlas};
use lavrik_core::PrecisionContext;

use crate::{
    ArgtrackArgs, Cli, CliError, CliResult, Command, EvalArgs, OutFormat, RunConfig, VerifyArgs, VerifyKind, Which,
    XrayArgs, ZerosArgs,
};

/// Table written by `zeros` when --out is absent.
pub const DEFAULT_TABLE: &str = "zeros.jsonl";

/// The text a command produced: `document` goes to --out (or stdout), `report`
/// to stdout when the document went to a file and to stderr otherwise.
#[derive(Debug)]
pub struct Output {
    pub document: String,
    pub report: Option<String>,
    /// False when a verification ran but did not pass.
    pub pass: bool,
}

impl Output {
    fn doc(document: String) -> Self {
        Output {
            document,
            report: None,
            pass: true,
        }
    }
}

/// Runs the parsed command line and returns its output unwritten (the zero
/// table of `zeros` is still written).
pub fn execute(cli: &Cli) -> CliResult<Output> {
    let ctx = cli.global.context()?;
    let cfg = RunConfig::new(cli, &ctx);
    match &cli.command {
        Command::Eval(a) => eval(a, &cfg, &ctx),
        Command::Verify(a) => verify(a, &cfg, &ctx),
        Command::Zeros(a) => zeros(a, &cfg, &ctx),
        Command::Xray(a) => xray(a, &cfg, &ctx),
        Command::Argtrack(a) => argtrack(a, &cfg, &ctx),
    }
}

/// Runs the parsed command line and writes its output.
pub fn run(cli: &Cli) -> CliResult<Output> {
    let out = execute(cli)?;
    let to_file = match (&cli.command, &cli.global.out) {
        // the zeros command writes its table itself; its document is the summary
        (Command::Zeros(_), _) | (_, None) => None,
        (_, Some(p)) => Some(p),
    };
    match to_file {
        Some(p) => {
            fs::write(p, &out.document)?;
            if let Some(r) = &out.report {
                print!("{r}");
            }
        }
        None => {
            print!("{}", out.document);
            if let Some(r) = &out.report {
                eprint!("{r}");
            }
        }
    }
    std::io::stdout().flush()?;
    Ok(out)
}

fn config_value(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

/// Envelope shared by the JSON documents.
fn envelope(cfg: &RunConfig, ctx: &PrecisionContext, result: Value) -> String {
    let doc = json!({
        "tool": cfg.tool,
        "version": cfg.version,
        "config": config_value(cfg),
        "precision": {"bits": ctx.bits(), "eps_log2": ctx.eps_log2()},
        "result": result,
    });
    serde_json::to_string_pretty(&doc).expect("document serializes") + "\n"
}

fn dec(x: &Float) -> String {
    decimal(x, x.prec())
}

fn dec_c(z: &Complex) -> Value {
    json!({"re": dec(z.real()), "im": dec(z.imag())})
}

/// x rounded to `places` decimals, written positionally.
pub fn fixed(x: &Float, places: u32) -> String {
    let scale = Integer::from(Integer::u_pow_u(10, places));
    let scaled = Float::with_val(x.prec() + 64, x * &scale);
    let n = scaled.round().to_integer().expect("finite value");
    let neg = n < 0;
    let digits = n.abs().to_string();
    let p = places as usize;
    let digits = if digits.len() <= p { format!("{}{digits}", "0".repeat(p + 1 - digits.len())) } else { digits };
    let (int, frac) = digits.split_at(digits.len() - p);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

fn tau(cfg: &RunConfig, prec: u32) -> Complex {
    Complex::with_val(prec, (cfg.global.tau_re, cfg.global.tau_im))
}

fn point(sigma: f64, t: f64, cfg: &RunConfig, ctx: &PrecisionContext) -> CliResult<EvalPoint> {
    Ok(EvalPoint::new(Complex::with_val(ctx.bits(), (sigma, t)), tau(cfg, ctx.bits()))?)
}

fn abs64(z: &Complex) -> Float {
    Float::with_val(64, z.abs_ref())
}

/// One value with an error estimate, as decimal strings.
#[derive(Serialize)]
struct EvalResult {
    which: Which,
    s: Value,
    tau: Value,
    value: Value,
    /// Bound on |error|: the relative target times |value|, plus any
    /// truncation bound the kernel reports.
    error: String,
}

pub fn eval(a: &EvalArgs, cfg: &RunConfig, ctx: &PrecisionContext) -> CliResult<Output> {
    let bits = ctx.bits();
    let rel = |v: &Complex| Float::with_val(64, abs64(v) * ctx.eps());
    let (value, error): (Complex, Float) = match a.which {
        Which::Lambda => {
            let v = lambda(&point(a.sigma, a.t, cfg, ctx)?, ctx)?.complex();
            let e = rel(&v);
            (v, e)
        }
        Which::L => {
            let v = l_function(&point(a.sigma, a.t, cfg, ctx)?, ctx)?;
            let e = rel(&v);
            (v, e)
        }
        Which::Z => {
            if a.sigma != 0.5 {
                log::warn!("Z is evaluated on the critical line; sigma = {} ignored", a.sigma);
            }
            let z = z_from_l(a.t, ctx)?;
            let v = Complex::with_val(bits, (z, 0));
            let e = rel(&v);
            (v, e)
        }
        Which::Theta => {
            let z = Complex::with_val(bits, (a.sigma, a.t));
            let th = theta(&z, ctx)?;
            let e = Float::with_val(64, &th.tail_bound + rel(&th.value));
            (th.value, e)
        }
        Which::Xi => {
            // ξ(s) = Ξ(z) with s = 1/2 + iz, i.e. z = t - i(σ - 1/2)
            let z = Complex::with_val(bits, (a.t, 0.5 - a.sigma));
            let v = xi_and_xi(&z, ctx)?.xi;
            let e = rel(&v);
            (v, e)
        }
    };
    let res = EvalResult {
        which: a.which,
        s: json!({"re": a.sigma.to_string(), "im": a.t.to_string()}),
        tau: json!({"re": cfg.global.tau_re.to_string(), "im": cfg.global.tau_im.to_string()}),
        value: dec_c(&value),
        error: decimal(&error, 24),
    };
    let document = match cfg.global.format.unwrap_or(OutFormat::Json) {
        OutFormat::Text => {
            if value.imag().is_zero() {
                format!("{}\n", dec(value.real()))
            } else {
                format!("{} {}\n", dec(value.real()), dec(value.imag()))
            }
        }
        OutFormat::Json => envelope(cfg, ctx, serde_json::to_value(&res).expect("serializes")),
        f => return Err(CliError::Usage(format!("eval writes json or text, not {f:?}"))),
    };
    Ok(Output::doc(document))
}

#[derive(Serialize)]
struct VerifyRow {
    s: Value,
    tau: Option<Value>,
    c: Option<f64>,
    residual: String,
}

fn pole_free(sigma: f64, t: f64) -> bool {
    sigma.hypot(t) > 0.1 && (sigma - 1.0).hypot(t) > 0.1
}

pub fn verify(a: &VerifyArgs, cfg: &RunConfig, ctx: &PrecisionContext) -> CliResult<Output> {
    if !(a.t_min <= a.t_max) {
        return Err(CliError::Usage(format!("t-min {} exceeds t-max {}", a.t_min, a.t_max)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.global.seed);
    let fixed_point = match (a.sigma, a.t) {
        (Some(s), t) => Some((s, t.unwrap_or(0.0))),
        (None, Some(t)) => Some((0.5, t)),
        (None, None) => None,
    };
    let n = if fixed_point.is_some() { 1 } else { a.samples };
    let mut rows = Vec::new();
    let mut max = Float::with_val(64, 0);
    let bits = ctx.bits();
    let tolerance = match a.which {
        VerifyKind::ThetaFe => ctx.eps(),
        _ => Float::with_val(64, ctx.eps() * 10u32),
    };
    for _ in 0..n {
        match a.which {
            VerifyKind::Decomposition => {
                let (sigma, t, tau) = match fixed_point {
                    Some((s, t)) => (s, t, tau(cfg, bits)),
                    None => loop {
                        let sigma = rng.gen_range(-2.0..3.0);
                        let t = rng.gen_range(a.t_min..=a.t_max);
                        let tau = Complex::with_val(bits, (rng.gen_range(0.25..4.0), rng.gen_range(-1.0..1.0)));
                        if pole_free(sigma, t) {
                            break (sigma, t, tau);
                        }
                    },
                };
                let p = EvalPoint::new(Complex::with_val(bits, (sigma, t)), tau.clone())?;
                let r = verify_decomposition(&p, ctx)?;
                max.max_mut(&r);
                rows.push(VerifyRow {
                    s: json!({"re": sigma.to_string(), "im": t.to_string()}),
                    tau: Some(dec_c(&tau)),
                    c: None,
                    residual: decimal(&r, 24),
                });
            }
            VerifyKind::Mellin => {
                let (sigma, t) = match fixed_point {
                    Some(p) => p,
                    None => loop {
                        let sigma = rng.gen_range(-1.0..2.0);
                        let t = rng.gen_range(a.t_min..=a.t_max);
                        if pole_free(sigma, t) {
                            break (sigma, t);
                        }
                    },
                };
                let base = sigma.max(1.0);
                let cs: Vec<f64> = if a.c.is_empty() { vec![base + 0.5, base + 1.5] } else { a.c.clone() };
                let p = point(sigma, t, cfg, ctx)?;
                for c in cs {
                    let r = mellin_barnes_check(&p, c, ctx)?;
                    max.max_mut(&r);
                    rows.push(VerifyRow {
                        s: json!({"re": sigma.to_string(), "im": t.to_string()}),
                        tau: Some(dec_c(&p.tau)),
                        c: Some(c),
                        residual: decimal(&r, 24),
                    });
                }
            }
            VerifyKind::ThetaFe => {
                let (x, y) = match fixed_point {
                    Some(p) => p,
                    None => (rng.gen_range(0.25..4.0), rng.gen_range(-1.0..1.0)),
                };
                let z = Complex::with_val(bits, (x, y));
                let r = theta_functional_check(&z, ctx)?;
                max.max_mut(&r);
                rows.push(VerifyRow {
                    s: json!({"re": x.to_string(), "im": y.to_string()}),
                    tau: None,
                    c: None,
                    residual: decimal(&r, 24),
                });
            }
        }
    }
    let pass = max < tolerance;
    let result = json!({
        "which": a.which,
        "rows": rows,
        "max_residual": decimal(&max, 24),
        "tolerance": decimal(&tolerance, 24),
        "pass": pass,
    });
    let document = match cfg.global.format.unwrap_or(OutFormat::Json) {
        OutFormat::Json => envelope(cfg, ctx, result),
        OutFormat::Csv | OutFormat::Text => {
            let mut s = String::from("re,im,c,residual\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    r.s["re"].as_str().unwrap_or(""),
                    r.s["im"].as_str().unwrap_or(""),
                    r.c.map(|c| c.to_string()).unwrap_or_default(),
                    r.residual
                ));
            }
            s.push_str(&format!(
                "# max_residual {} tolerance {} {}\n",
                decimal(&max, 24),
                decimal(&tolerance, 24),
                if pass { "PASS" } else { "FAIL" }
            ));
            s
        }
        f => return Err(CliError::Usage(format!("verify writes json, csv or text, not {f:?}"))),
    };
    Ok(Output {
        document,
        report: None,
        pass,
    })
}

/// Grid for the N(x) comparison: multiples of 25 up to the coverage, and the
/// coverage itself.
fn count_grid(coverage: f64) -> Vec<f64> {
    let mut xs: Vec<f64> = (1..).map(|k| 25.0 * k as f64).take_while(|x| *x < coverage).collect();
    if coverage > 0.0 {
        xs.push(coverage);
    }
    xs
}

pub fn zeros(a: &ZerosArgs, cfg: &RunConfig, ctx: &PrecisionContext) -> CliResult<Output> {
    let path: PathBuf = cfg.global.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_TABLE));
    let existing = if a.resume && path.exists() { Some(read_table(&path)?) } else { None };
    if a.resume && existing.is_none() {
        log::info!("{} not found; starting a new table", path.display());
    }
    let opts = AtlasOptions {
        step: a.step,
        ..AtlasOptions::default()
    };
    let reused = existing.as_ref().map_or(0, |e| e.zeros.len());
    let atlas = ZeroAtlas::extend(existing, a.t_max, &opts, ctx)?;
    let run = json!({"tool": cfg.tool, "version": cfg.version, "config": config_value(cfg)});
    write_table_with(&path, &atlas, Some(&run))?;

    let stats = zero_stats(&atlas.zeros, &count_grid(atlas.coverage), atlas.coverage)?;
    let half = verify_halfplane(&atlas.zeros);
    let max_r = stats.counts.iter().map(|r| r.r.abs()).fold(0.0, f64::max);
    let inequality = stats.laws.iter().all(|l| l.inequality || l.gamma <= 2.0 * std::f64::consts::PI);
    let region = atlas.region.as_ref().map(|(r, w, found)| json!({"box": r.0, "winding": w, "found": found}));
    let b0 = atlas.b0().map(|z| dec(z.b.real()));
    let result = json!({
        "table": path.display().to_string(),
        "coverage": atlas.coverage,
        "zeros": atlas.zeros.len(),
        "reused": reused,
        "b0": b0,
        "counts": stats.counts,
        "max_abs_r": max_r,
        "laws": stats.laws,
        "inequality_holds": inequality,
        "halfplane": {"pass": half.pass(), "b0": half.b0, "min_re": half.min_re, "violations": half.violations},
        "region": region,
    });
    let document = match cfg.global.format.unwrap_or(OutFormat::Json) {
        OutFormat::Json => envelope(cfg, ctx, result),
        OutFormat::Text => {
            let mut s = format!(
                "{} zeros up to Im b = {} in {} ({} reused)\n",
                atlas.zeros.len(),
                atlas.coverage,
                path.display(),
                reused
            );
            if let Some(b) = &b0 {
                s.push_str(&format!("b0 = {b}\n"));
            }
            s.push_str("x,N(x),formula,R\n");
            for r in &stats.counts {
                s.push_str(&format!("{},{},{:.4},{:.4}\n", r.x, r.empirical, r.formula, r.r));
            }
            s.push_str(&format!(
                "halfplane {} (min Re {:.12}); gamma/log(gamma/2pi) >= 2beta/pi {}\n",
                if half.pass() { "PASS" } else { "FAIL" },
                half.min_re,
                if inequality { "holds" } else { "FAILS" }
            ));
            s
        }
        f => return Err(CliError::Usage(format!("zeros writes a json or text summary, not {f:?}"))),
    };
    Ok(Output {
        document,
        report: None,
        pass: half.pass(),
    })
}

fn parse_region(s: &str) -> CliResult<Rect> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("region {s:?}: {e}")))?;
    match v.as_slice() {
        &[a, b, c, d] if a < b && c < d => Ok(Rect([a, b, c, d])),
        _ => Err(CliError::Usage(format!("region must be sigma1,sigma2,t1,t2 with sigma1<sigma2, t1<t2; got {s:?}"))),
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn plot_format(cfg: &RunConfig) -> CliResult<Format> {
    match cfg.global.format {
        Some(OutFormat::Svg) => Ok(Format::Svg),
        Some(OutFormat::Csv) => Ok(Format::Csv),
        Some(f) => Err(CliError::Usage(format!("xray writes svg or csv, not {f:?}"))),
        None => Ok(match cfg.global.out.as_deref().and_then(Path::extension) {
            Some(e) if e == "csv" => Format::Csv,
            _ => Format::Svg,
        }),
    }
}

pub fn xray(a: &XrayArgs, cfg: &RunConfig, ctx: &PrecisionContext) -> CliResult<Output> {
    let function: XrayFunction = a.which.parse()?;
    let region = parse_region(&a.region)?;
    let format = plot_format(cfg)?;
    let curves = if a.markers_only {
        Vec::new()
    } else {
        let grid = sign_grid(function, region, a.nx, a.ny, ctx)?;
        extract_curves(&grid, a.refine, ctx)?
    };
    let table = a.zeros.as_deref().map(read_table).transpose()?;
    let mut canvas = Canvas::new(region);
    canvas.thick = a.thick;
    canvas.thin = a.thin;
    let body = render(&curves, table.as_ref().map(|t| t.zeros.as_slice()), format, &canvas);
    let meta = json!({
        "tool": cfg.tool,
        "version": cfg.version,
        "config": config_value(cfg),
        "precision": {"bits": ctx.bits(), "grid_bits": lavrik_core::xray::GRID_BITS},
        "function": function.name(),
        "curves": curves.len(),
        "refined": a.refine,
    });
    let meta = serde_json::to_string(&meta).expect("serializes");
    let document = match format {
        Format::Svg => {
            let tag = format!("<metadata>{}</metadata>\n", xml_escape(&meta));
            match body.find("<style>") {
                Some(k) => format!("{}{tag}{}", &body[..k], &body[k..]),
                None => body,
            }
        }
        Format::Csv => format!("# {meta}\n{body}"),
    };
    Ok(Output::doc(document))
}

pub fn argtrack(a: &ArgtrackArgs, cfg: &RunConfig, ctx: &PrecisionContext) -> CliResult<Output> {
    let track = arg_track(a.t_max, ctx)?;
    let consts = ProductConstants::compute(ctx)?;
    let wp = ctx.bits();
    let bound = Float::with_val(wp, Float::with_val(wp, 0.2) / &consts.a).asin();
    let max_a = track.max_abs_a_beyond(10.0);
    let max_sl = track.max_s_lambda_plus(&consts.a);
    let onset = track.im_monotone_onset();
    let anchor = track.arg_values.first().map(dec);
    let report = json!({
        "alpha": fixed(&consts.alpha, 33),
        "A": fixed(&consts.a, 30),
        "arcsin_0.2_over_A": fixed(&bound, 12),
        "anchor_arg": anchor,
        "samples": track.t_grid.len(),
        "max_abs_a_beyond_10": max_a,
        "a_bound_0.19": max_a <= 0.19,
        "max_abs_s_lambda_plus_A": max_sl,
        "bound_0.0922": max_sl <= 0.0922,
        "im_lambda_decreasing_from": onset,
    });
    let meta = json!({"tool": cfg.tool, "version": cfg.version, "config": config_value(cfg), "precision": {"bits": ctx.bits()}});
    let format = cfg.global.format.unwrap_or(OutFormat::Csv);
    let document = match format {
        OutFormat::Csv => {
            let mut buf = format!("# {}\n", serde_json::to_string(&meta).expect("serializes")).into_bytes();
            track.write_csv(&mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
        OutFormat::Json => envelope(cfg, ctx, report.clone()),
        f => return Err(CliError::Usage(format!("argtrack writes csv or json, not {f:?}"))),
    };
    let pass = max_a <= 0.19 && max_sl <= 0.0922;
    Ok(Output {
        document,
        report: (format == OutFormat::Csv).then(|| serde_json::to_string_pretty(&report).expect("serializes") + "\n"),
        pass,
    })
}
