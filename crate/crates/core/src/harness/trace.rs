//! CSV trace files and their metadata sidecar.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::Summary;
use crate::quantities::{ScenarioConfig, TraceRecord};
use crate::Result;

/// Trace column names, in file order.
pub fn header() -> Vec<String> {
    let mut cols: Vec<String> = ["time_us", "clock_index", "fsm_state", "code"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend((0..16).rev().map(|b| format!("b{b}")));
    cols.extend(
        [
            "v_solar",
            "v_out",
            "p_sense_uw",
            "S",
            "S1",
            "S2",
            "Ssen",
            "S3",
            "S4",
            "S5",
            "i",
            "v_cap_mv",
            "rst",
            "trojan_flag",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    cols
}

/// Formats `x` with nine significant digits in fixed notation.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000000".to_string();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    let decimals = (8 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn bit(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn row(r: &TraceRecord) -> Vec<String> {
    let mut out = vec![
        sig9(r.time.micros()),
        r.clock_index.to_string(),
        r.fsm_state.name().to_string(),
        r.thermometer_code.count().to_string(),
    ];
    out.extend((0..16u8).rev().map(|b| bit(r.thermometer_code.bit(b))));
    let s = &r.control_signals;
    out.extend([
        sig9(r.v_solar.0),
        sig9(r.v_out.0),
        sig9(r.p_sense.0 * 1e6),
        bit(s.s),
        bit(s.s1),
        bit(s.s2),
        bit(s.ssen),
        bit(s.s3),
        bit(s.s4),
        bit(s.s5),
        bit(s.i),
        sig9(r.trojan_cap_v.0 * 1e3),
        bit(r.rst),
        bit(r.trojan_flag),
    ]);
    out
}

pub fn write_trace<W: Write>(records: &[TraceRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header())?;
    for r in records {
        w.write_record(row(r))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct Meta<'a> {
    generator: &'static str,
    version: &'static str,
    rows: usize,
    summary: &'a Summary,
    config: &'a ScenarioConfig,
}

/// `trace.csv` → `trace.csv.meta.json`.
pub fn sidecar_path(trace: &Path) -> PathBuf {
    let mut name = trace.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the trace CSV and a JSON sidecar with the run's config and summary.
pub fn write_trace_files(
    path: &Path,
    records: &[TraceRecord],
    summary: &Summary,
    cfg: &ScenarioConfig,
) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_trace(records, file)?;
    let meta = Meta {
        generator: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        rows: records.len(),
        summary,
        config: cfg,
    };
    let json =
        serde_json::to_string_pretty(&meta).map_err(|e| crate::Error::Config(e.to_string()))?;
    std::fs::write(sidecar_path(path), json + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let h = header();
        assert_eq!(h.len(), 4 + 16 + 14);
        assert_eq!(h[3], "code");
        assert_eq!(h[4], "b15");
        assert_eq!(h[19], "b0");
        assert_eq!(h.last().unwrap(), "trojan_flag");
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(3.541_935_483_870_967_3), "3.54193548");
        assert_eq!(sig9(153.333_333_333_333_34), "153.333333");
        assert_eq!(sig9(0.012_345_678_91), "0.0123456789");
        assert_eq!(sig9(1_234_567_891_234.0), "1234567891234");
        assert_eq!(sig9(-2.5), "-2.50000000");
        assert_eq!(sig9(0.0), "0.00000000");
    }
}
