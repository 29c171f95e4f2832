//! Acceptance run: one PASS/FAIL line per criterion on stderr. Criteria whose
//! published reference disagrees with every independent evaluation report
//! FAIL for that reference and are checked against the independent values.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use rug::{Complex, Float};
use serde_json::Value;

use lavrik_cli::{execute, Cli, Output};
use lavrik_core::hadamard::{alpha_constant, alpha_from_log_expansion, arg_track, partial_product, u_function, ProductConstants};
use lavrik_core::lambda::{lambda, z_from_l, z_oracle, EvalPoint};
use lavrik_core::theta::theta;
use lavrik_core::xray::{line_crossings, parse_csv, CurveKind, XRayCurve, XrayFunction};
use lavrik_core::zeros::{read_table, ZeroRecord};
use lavrik_core::PrecisionContext;

/// Ordinates of the first zeta zeros.
const ZETA_ZEROS: [f64; 13] = [
    14.134_725_141_734_695,
    21.022_039_638_771_556,
    25.010_857_580_145_69,
    30.424_876_125_859_512,
    32.935_061_587_739_19,
    37.586_178_158_825_675,
    40.918_719_012_147_5,
    43.327_073_280_915,
    48.005_150_881_167_16,
    49.773_832_477_672_3,
    52.970_321_477_714_464,
    56.446_247_697_063_39,
    59.347_044_002_602_35,
];

struct Verdict {
    pass: bool,
    /// Failure against a published value that independent evaluation
    /// contradicts; does not fail the run.
    known: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: String) -> Self {
        Verdict {
            pass,
            known: false,
            detail,
        }
    }
}

fn workdir() -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&d).expect("tmp dir");
    d
}

fn cli(args: &[&str]) -> Output {
    let argv = std::iter::once("lavrik").chain(args.iter().copied());
    let c = Cli::try_parse_from(argv).unwrap_or_else(|e| panic!("{e}"));
    execute(&c).unwrap_or_else(|e| panic!("lavrik {}: {e}", args.join(" ")))
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&out.document).expect("json document")
}

fn num(v: &Value) -> f64 {
    match v {
        Value::String(s) => s.parse().expect("decimal string"),
        v => v.as_f64().expect("number"),
    }
}

fn rel_err(x: f64, reference: f64) -> f64 {
    ((x - reference) / reference).abs()
}

fn lambda_at(t: f64, bits: u32) -> Complex {
    let ctx = PrecisionContext::new(bits).unwrap();
    lambda(&EvalPoint::from_f64(0.5, t, bits), &ctx).unwrap().complex()
}

fn criterion_1() -> Verdict {
    let ctx = PrecisionContext::new(128).unwrap();
    let consts = ProductConstants::compute(&ctx).unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, good: bool, text: String| {
        if !good {
            ok = false;
        }
        notes.push(format!("{name} {text}{}", if good { "" } else { " (off)" }));
    };
    let b0 = consts.b0.to_f64();
    check("b0", (b0 - 11.25170908146).abs() <= 1e-9, format!("{b0:.12}"));
    let alpha = lavrik_cli::fixed(&consts.alpha, 33);
    check("alpha", alpha.starts_with("0.010906559198968892180277118987"), alpha[..20].to_string());
    let a = consts.a.to_f64();
    check("A", (a - 1.0864348112).abs() <= 1e-9, format!("{a:.11}"));
    let l_half = num(&json(&cli(&["eval", "--which", "Lambda", "--sigma", "0.5", "--t", "0"]))["result"]["value"]["re"]);
    check("Lambda(1/2)", (l_half + 1.988483112753).abs() <= 1e-10, format!("{l_half:.13}"));
    if !ok {
        return Verdict::new(false, notes.join(", "));
    }

    // the line values against the published figures and an independent reference
    let published = [(100.0, 256, 6.844655e-16, 0.010862286), (1000.0, 1408, 7.955229e-17, 0.0010864328)];
    let reference = [
        ("7.4098595475785964452789e-35", "0.010862286404925854615399939"),
        ("1.599494267503374409825673e-342", "0.00108643275278405532409116"),
    ];
    let mut published_re_ok = true;
    for (&(t, bits, p_re, p_im), &(r_re, r_im)) in published.iter().zip(&reference) {
        let start = Instant::now();
        let v = lambda_at(t, bits);
        let secs = start.elapsed().as_secs_f64();
        // Re Λ(1/2+1000i) is below the f64 range
        let rel = |x: &Float, r: &str| {
            let r = Float::with_val(bits, Float::parse(r).unwrap());
            Float::with_val(64, (Float::with_val(bits, x - &r) / &r).abs()).to_f64()
        };
        let (re, im) = (v.real().to_string_radix(10, Some(7)), v.imag().to_f64());
        let re_ref = rel(v.real(), r_re) < 1e-12;
        let im_ok = rel_err(im, p_im) <= 1e-5 && rel(v.imag(), r_im) < 1e-12;
        let re_published = rel(v.real(), &format!("{p_re:e}")) <= 1e-5;
        published_re_ok &= re_published;
        ok &= re_ref && im_ok;
        notes.push(format!(
            "Lambda(1/2+{t}i) = {re} + {im:.10}i at {bits} bits in {secs:.1}s (published Re {p_re:e}: {}; independent Re {})",
            if re_published { "match" } else { "mismatch" },
            if re_ref { "match" } else { "mismatch" },
        ));
    }
    Verdict {
        pass: ok && published_re_ok,
        known: ok && !published_re_ok,
        detail: notes.join("; "),
    }
}

fn criterion_2() -> Verdict {
    let runs = [
        ("decomposition", vec!["verify", "--which", "decomposition", "--samples", "100", "--seed", "1"]),
        ("mellin", vec!["verify", "--which", "mellin", "--samples", "10", "--seed", "2", "--t-min", "-20", "--t-max", "20"]),
        ("theta-fe", vec!["verify", "--which", "theta-fe", "--samples", "50", "--seed", "3"]),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, args) in runs {
        let start = Instant::now();
        let out = cli(&args);
        let doc = json(&out);
        let rows = doc["result"]["rows"].as_array().map_or(0, Vec::len);
        let complex_tau = doc["result"]["rows"]
            .as_array()
            .map_or(0, |r| r.iter().filter(|row| row["tau"]["im"].as_str().is_some_and(|s| s != "0")).count());
        ok &= out.pass;
        if name == "decomposition" {
            ok &= rows == 100 && complex_tau > 50;
        }
        if name == "mellin" {
            ok &= rows == 20;
        }
        notes.push(format!(
            "{name}: {rows} checks, max residual {} < {} in {:.0}s",
            doc["result"]["max_residual"].as_str().unwrap_or("?"),
            doc["result"]["tolerance"].as_str().unwrap_or("?"),
            start.elapsed().as_secs_f64()
        ));
    }
    Verdict::new(ok, notes.join("; "))
}

/// Roots of `f` on (lo, hi) from a grid scan refined by bisection.
fn roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    while a < hi {
        let b = (a + step).min(hi);
        let fb = f(b);
        if (fa < 0.0) != (fb < 0.0) {
            let (mut x0, mut x1, mut f0) = (a, b, fa);
            for _ in 0..40 {
                let m = 0.5 * (x0 + x1);
                let fm = f(m);
                if (fm < 0.0) == (f0 < 0.0) {
                    x0 = m;
                    f0 = fm;
                } else {
                    x1 = m;
                }
            }
            out.push(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    out
}

fn criterion_3() -> Verdict {
    let ctx = PrecisionContext::new(200).unwrap();
    let mut max_diff = 0.0f64;
    for k in 1..=10 {
        let t = 10.0 * k as f64;
        let a = z_from_l(t, &ctx).unwrap();
        let b = z_oracle(t, &ctx).unwrap();
        max_diff = max_diff.max(Float::with_val(64, a - b).abs().to_f64());
    }
    let z_l = roots(|t| z_from_l(t, &ctx).unwrap().to_f64(), 10.0, 60.0, 0.25);
    let z_o = roots(|t| z_oracle(t, &ctx).unwrap().to_f64(), 10.0, 60.0, 0.25);
    let paired = z_l.len() == z_o.len() && z_l.len() == ZETA_ZEROS.len();
    let max_root = z_l
        .iter()
        .zip(&z_o)
        .zip(&ZETA_ZEROS)
        .map(|((a, b), c)| (a - b).abs().max((a - c).abs()))
        .fold(0.0, f64::max);
    Verdict::new(
        max_diff < 1e-10 && paired && max_root < 1e-6,
        format!(
            "max |Z_L - Z_oracle| on t=10..100 = {max_diff:.2e}; {} sign changes on (10,60), max offset {max_root:.2e}",
            z_l.len()
        ),
    )
}

fn table_paths() -> (PathBuf, PathBuf) {
    let d = workdir();
    (d.join("zeros200.jsonl"), d.join("zeros400.jsonl"))
}

fn criterion_4() -> Verdict {
    let (p200, _) = table_paths();
    let start = Instant::now();
    let out = cli(&["zeros", "--t-max", "200", "--out", p200.to_str().unwrap()]);
    let secs = start.elapsed().as_secs_f64();
    let doc = json(&out);
    let r = &doc["result"];
    let half = r["halfplane"]["pass"].as_bool() == Some(true);
    let max_r = num(&r["max_abs_r"]);
    let ineq = r["inequality_holds"].as_bool() == Some(true);
    let region = &r["region"];
    let winding_ok = region["winding"].as_i64().is_some() && region["winding"].as_i64() == region["found"].as_i64();

    let atlas = read_table(&p200).unwrap();
    let upper: Vec<&ZeroRecord> = atlas.zeros.iter().filter(|z| z.n > 0).collect();
    let ordered = upper.windows(2).all(|w| w[0].modulus() <= w[1].modulus())
        && upper.iter().enumerate().all(|(k, z)| z.n == k as i64 + 1)
        && atlas.zeros.iter().all(|z| z.gamma() >= 0.0 && z.gamma() <= 200.0);
    let conj = upper.iter().all(|z| {
        let c = z.conjugate();
        c.n == -z.n && c.gamma() == -z.gamma() && c.beta() == z.beta()
    });
    let min_gap = upper
        .iter()
        .enumerate()
        .flat_map(|(i, a)| upper[i + 1..].iter().map(move |b| (a.beta() - b.beta()).hypot(a.gamma() - b.gamma())))
        .fold(f64::INFINITY, f64::min);
    let ok = half && max_r < 5.0 && ineq && winding_ok && ordered && conj && min_gap > 1e-6;
    Verdict::new(
        ok,
        format!(
            "{} zeros with Im b <= 200 in {secs:.0}s; half-plane {} (min Re {:.9}); winding {} vs {} found; max |R| = {max_r:.3}; inequality {}; ordering {}; conjugates {}",
            atlas.zeros.len(),
            if half { "ok" } else { "violated" },
            num(&r["halfplane"]["min_re"]),
            region["winding"],
            region["found"],
            if ineq { "holds" } else { "fails" },
            if ordered { "ok" } else { "broken" },
            if conj { "ok" } else { "broken" },
        ),
    )
}

fn criterion_5() -> Verdict {
    let ctx = PrecisionContext::new(128).unwrap();
    let start = Instant::now();
    let track = arg_track(200.0, &ctx).unwrap();
    let a = theta(&Complex::with_val(128, 1), &ctx).unwrap().value.real().clone();
    let anchor = (track.arg_values[0].to_f64() - PI).abs() < 1e-30 && track.t_grid[0] == 0.0;
    let max_a = track.max_abs_a_beyond(10.0);
    let max_sl = track.max_s_lambda_plus(&a);
    let changes = track.sign_changes(10.0, 60.0);
    let steps: Vec<f64> = track.t_grid.windows(2).map(|w| w[1] - w[0]).collect();
    let coarsest = steps.iter().copied().fold(0.0, f64::max);
    let coincide = changes.len() == ZETA_ZEROS.len()
        && changes.iter().zip(&ZETA_ZEROS).all(|(m, z)| (m - z).abs() <= coarsest);
    let u_ok = (1..=20).all(|k| {
        let t = 3.0 * k as f64 - 1.3;
        u_function(t, &ctx).unwrap() > 0
    });
    Verdict::new(
        anchor && max_a <= 0.19 && max_sl <= 0.0922 && coincide && u_ok,
        format!(
            "{} samples in {:.0}s; max |a| on (10,200] = {max_a:.3e}; max |sLambda+A| = {max_sl:.7}; {} sign changes of a on (10,60) {} the zeta zeros; u > 0 at 20 points {}",
            track.t_grid.len(),
            start.elapsed().as_secs_f64(),
            changes.len(),
            if coincide { "at" } else { "away from" },
            if u_ok { "yes" } else { "no" },
        ),
    )
}

/// Zero table complete to Im b = 400, built by resuming the height-200 one
/// and kept between runs.
fn atlas_400() -> Vec<ZeroRecord> {
    let (p200, p400) = table_paths();
    if let Ok(t) = read_table(&p400) {
        if t.coverage >= 400.0 {
            return t.zeros;
        }
    }
    if !p200.exists() {
        cli(&["zeros", "--t-max", "200", "--out", p200.to_str().unwrap()]);
    }
    std::fs::copy(&p200, &p400).unwrap();
    let meta = |p: &Path| PathBuf::from(format!("{}.meta.json", p.display()));
    std::fs::copy(meta(&p200), meta(&p400)).unwrap();
    cli(&["zeros", "--t-max", "400", "--resume", "--out", p400.to_str().unwrap()]);
    read_table(&p400).unwrap().zeros
}

fn criterion_6() -> Verdict {
    let ctx = PrecisionContext::new(128).unwrap();
    let start = Instant::now();
    let zeros = atlas_400();
    let consts = ProductConstants::compute(&ctx).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for (re, im) in [(0.5, 0.0), (2.0, 0.0), (5.0, 5.0)] {
        let s = Complex::with_val(128, (re, im));
        let exact = lambda(&EvalPoint::unit(s.clone()), &ctx).unwrap().complex();
        // 50, 100, 200 zeros = 25, 50, 100 conjugate pairs
        let errs: Vec<f64> = [25, 50, 100]
            .iter()
            .map(|&pairs| {
                let p = partial_product(&s, &zeros, &consts, pairs, &ctx).unwrap();
                let d = Complex::with_val(128, &p - &exact);
                (Float::with_val(64, d.abs_ref()) / Float::with_val(64, exact.abs_ref())).to_f64()
            })
            .collect();
        ok &= errs[0] > errs[1] && errs[1] > errs[2];
        notes.push(format!("s={re}+{im}i rel err {:.2e} > {:.2e} > {:.2e}", errs[0], errs[1], errs[2]));
    }
    let fd = alpha_from_log_expansion(&ctx).unwrap();
    let q = alpha_constant(&ctx).unwrap();
    let d = Float::with_val(64, &fd - &q).abs().to_f64();
    ok &= d < 1e-8;
    notes.push(format!("finite-difference alpha off by {d:.1e}"));
    Verdict::new(ok, format!("{} ({} zeros, {:.0}s)", notes.join("; "), zeros.len(), start.elapsed().as_secs_f64()))
}

/// Distance from p to the segment ab.
fn seg_dist(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let u = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    (p.0 - a.0 - u * dx).hypot(p.1 - a.1 - u * dy)
}

fn near_imaginary_curve(curves: &[XRayCurve], p: (f64, f64)) -> f64 {
    curves
        .iter()
        .filter(|c| c.kind == CurveKind::Imaginary)
        .flat_map(|c| {
            let pts: Vec<(f64, f64)> = c.points.iter().map(|z| (z.real().to_f64(), z.imag().to_f64())).collect();
            pts.windows(2).map(|w| seg_dist(p, w[0], w[1])).collect::<Vec<_>>()
        })
        .fold(f64::INFINITY, f64::min)
}

fn criterion_7() -> Verdict {
    let ctx = PrecisionContext::new(128).unwrap();
    let d = workdir();
    let start = Instant::now();
    let out = cli(&[
        "xray", "--which", "Lambda", "--region", "-10,30,-20,40", "--nx", "81", "--ny", "121", "--refine", "--format", "csv",
    ]);
    let curves = parse_csv(&out.document).unwrap();
    let far = (0..=100)
        .map(|k| near_imaginary_curve(&curves, (0.5, 15.0 + 0.25 * k as f64)))
        .fold(0.0, f64::max);
    let crossings = line_crossings(&curves, CurveKind::Imaginary, XrayFunction::Lambda, 0.5, 15.0, 40.0, &ctx);
    let expected: Vec<f64> = ZETA_ZEROS.iter().copied().filter(|t| (15.0..=40.0).contains(t)).collect();
    let matched = crossings.len() == expected.len() && crossings.iter().zip(&expected).all(|(a, b)| (a - b).abs() < 1e-3);
    let max_off = crossings.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let l_panel = cli(&["xray", "--which", "L", "--region", "-10,30,-20,40", "--nx", "41", "--ny", "61", "--format", "csv"]);
    let l_curves = parse_csv(&l_panel.document).unwrap();

    let (_, p400) = table_paths();
    if !p400.exists() {
        atlas_400();
    }
    let svg_path = d.join("uno.svg");
    let uno = cli(&[
        "xray", "--which", "sLambda", "--region", "-2,200,-2,200", "--zeros", p400.to_str().unwrap(), "--markers-only",
        "--format", "svg", "--out", svg_path.to_str().unwrap(),
    ]);
    let markers = uno.document.matches(r#"class="zero""#).count();
    let table = read_table(&p400).unwrap();
    let in_box: Vec<&ZeroRecord> = table
        .zeros
        .iter()
        .filter(|z| (-2.0..=200.0).contains(&z.beta()) && (-2.0..=200.0).contains(&z.gamma()))
        .collect();
    let first_quadrant = in_box.iter().all(|z| z.beta() > 0.0 && z.gamma() >= 0.0);
    let ok = far < 0.5 && matched && !l_curves.is_empty() && markers == in_box.len() && first_quadrant;
    Verdict::new(
        ok,
        format!(
            "{} curves; imaginary curve within {far:.3} of sigma=1/2 on [15,40]; crossings {:?} (max offset {max_off:.1e}); L panel {} curves; zero plot {} markers for {} atlas zeros, first quadrant {} ({:.0}s)",
            curves.len(),
            crossings.iter().map(|t| format!("{t:.6}")).collect::<Vec<_>>(),
            l_curves.len(),
            markers,
            in_box.len(),
            if first_quadrant { "yes" } else { "no" },
            start.elapsed().as_secs_f64(),
        ),
    )
}

fn main() -> ExitCode {
    // the libtest flags cargo passes are not used
    let criteria: [(&str, fn() -> Verdict); 7] = [
        ("constants", criterion_1),
        ("identity suites", criterion_2),
        ("Z reconstruction", criterion_3),
        ("zero atlas to 200", criterion_4),
        ("argument representation", criterion_5),
        ("product expansion", criterion_6),
        ("figures", criterion_7),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = false;
    for (k, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != k + 1) {
            continue;
        }
        let v = f();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let known = if v.known { " [published value not reproduced]" } else { "" };
        eprintln!("criterion {} {name}: {tag}{known}: {}", k + 1, v.detail);
        failed |= !v.pass && !v.known;
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
