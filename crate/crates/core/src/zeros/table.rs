//! JSON-lines zero table, one record per line, with the covered height kept
//! in a small sidecar file `<table>.meta.json`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use super::{Rect, ZeroAtlas, ZeroRecord};
use crate::error::{Error, Result};
use crate::numerics::decimal;

#[derive(Serialize, Deserialize)]
struct Line {
    n: i64,
    re: String,
    im: String,
    residual: String,
    bits: u32,
    #[serde(rename = "box")]
    cert_box: [f64; 4],
}

#[derive(Serialize, Deserialize)]
struct Meta {
    coverage: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    run: Option<serde_json::Value>,
}

fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn line_of(z: &ZeroRecord) -> Line {
    Line {
        n: z.n,
        re: decimal(z.b.real(), z.bits),
        im: decimal(z.b.imag(), z.bits),
        residual: decimal(&z.residual, 64),
        bits: z.bits,
        cert_box: z.cert_box.0,
    }
}

/// Writes the table and its coverage sidecar.
pub fn write_table(path: &Path, atlas: &ZeroAtlas) -> Result<()> {
    write_table_with(path, atlas, None)
}

/// Same as [`write_table`], recording `run` (the producing configuration) in
/// the sidecar.
pub fn write_table_with(path: &Path, atlas: &ZeroAtlas, run: Option<&serde_json::Value>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for z in &atlas.zeros {
        let s = serde_json::to_string(&line_of(z)).expect("plain record serializes");
        writeln!(w, "{s}")?;
    }
    w.flush()?;
    let meta = serde_json::to_string(&Meta {
        coverage: atlas.coverage,
        run: run.cloned(),
    })
    .expect("plain record serializes");
    std::fs::write(meta_path(path), meta + "\n")?;
    Ok(())
}

fn parse_float(s: &str, bits: u32, line: usize) -> Result<Float> {
    Float::parse(s)
        .map(|p| Float::with_val(bits, p))
        .map_err(|e| Error::Table {
            line,
            msg: format!("bad number {s:?}: {e}"),
        })
}

/// Reads a table written by [`write_table`]. Without a sidecar the coverage
/// is taken as the largest stored Im b.
pub fn read_table(path: &Path) -> Result<ZeroAtlas> {
    let r = BufReader::new(File::open(path)?);
    let mut zeros = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let l: Line = serde_json::from_str(&line).map_err(|e| Error::Table {
            line: i + 1,
            msg: e.to_string(),
        })?;
        let re = parse_float(&l.re, l.bits, i + 1)?;
        let im = parse_float(&l.im, l.bits, i + 1)?;
        zeros.push(ZeroRecord {
            n: l.n,
            b: Complex::with_val(l.bits, (re, im)),
            residual: parse_float(&l.residual, 64, i + 1)?,
            bits: l.bits,
            cert_box: Rect(l.cert_box),
        });
    }
    let coverage = match std::fs::read_to_string(meta_path(path)) {
        Ok(s) => {
            serde_json::from_str::<Meta>(&s)
                .map_err(|e| Error::Table {
                    line: 0,
                    msg: format!("meta: {e}"),
                })?
                .coverage
        }
        Err(_) => zeros.iter().map(|z| z.gamma()).fold(0.0, f64::max),
    };
    Ok(ZeroAtlas {
        zeros,
        coverage,
        region: None,
    })
}
