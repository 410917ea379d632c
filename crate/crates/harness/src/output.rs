//! Persisted artifacts: JSONL traces, long-format CSV curves, timings,
//! summary table and an SVG plot. File contents depend only on the records.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::metrics::{band, group, row_at, summarize, Statistic, SummaryRow};
use crate::runner::{Phase, RunRecord};

pub const RECORDS: &str = "records.jsonl";
pub const CURVES: &str = "curves.csv";
pub const TIMINGS: &str = "timings.csv";
pub const SUMMARY: &str = "summary.csv";
pub const PLOT: &str = "plot.svg";

fn bits(x: &bocs_core::BinaryPoint) -> String {
    x.bits()
        .iter()
        .map(|&b| if b == 1 { '1' } else { '0' })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| HarnessError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> HarnessError {
    HarnessError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = create(path)?;
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| HarnessError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        writeln!(w, "{line}").map_err(|e| HarnessError::io(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let file = fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| HarnessError::Format {
                path: path.to_path_buf(),
                message: format!("line {}: {e}", k + 1),
            })?,
        );
    }
    Ok(out)
}

#[derive(Serialize)]
struct CurveRow<'a> {
    benchmark: &'a str,
    lambda: f64,
    optimizer: &'a str,
    instance: usize,
    replication: usize,
    evaluation: usize,
    /// Iterations after the initial design; 0 for the initial rows.
    iteration: usize,
    phase: Phase,
    x: String,
    value: f64,
    best: f64,
    regret: Option<f64>,
}

pub fn write_curves(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in records {
        for row in &r.rows {
            w.serialize(CurveRow {
                benchmark: &r.benchmark,
                lambda: r.lambda,
                optimizer: &r.optimizer,
                instance: r.instance,
                replication: r.replication,
                evaluation: row.evaluation,
                iteration: row.evaluation.saturating_sub(r.n0),
                phase: row.phase,
                x: bits(&row.x),
                value: row.value,
                best: row.best,
                regret: r.optimum.map(|o| (o - row.best).abs()),
            })
            .map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

#[derive(Serialize)]
struct TimingRow<'a> {
    optimizer: &'a str,
    instance: usize,
    replication: usize,
    evaluation: usize,
    model_s: f64,
    acquisition_s: f64,
    evaluation_s: f64,
    total_s: f64,
}

/// Wall-clock data; unlike the other artifacts this differs between runs.
pub fn write_timings(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in records {
        for (k, t) in r.timings.iter().enumerate() {
            w.serialize(TimingRow {
                optimizer: &r.optimizer,
                instance: r.instance,
                replication: r.replication,
                evaluation: k + 1,
                model_s: t.model,
                acquisition_s: t.acquisition,
                evaluation_s: t.evaluation,
                total_s: t.total,
            })
            .map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for row in rows {
        w.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Mean ± 2 SE curves from iteration 0 (best initial) on, one panel per
/// (benchmark, λ).
pub fn render_svg(records: &[RunRecord]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 360.0;
    const ML: f64 = 70.0;
    const MR: f64 = 150.0;
    const MT: f64 = 30.0;
    const MB: f64 = 45.0;

    let groups = group(records);
    let mut panels: Vec<(String, f64)> = Vec::new();
    for ((b, l, _), _) in &groups {
        if !panels.iter().any(|(pb, pl)| pb == b && pl == l) {
            panels.push((b.clone(), *l));
        }
    }
    let mut s = String::new();
    let total_h = H * panels.len().max(1) as f64;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{total_h}" font-family="sans-serif" font-size="12">"#
    );
    for (pi, (bench, lambda)) in panels.iter().enumerate() {
        let oy = pi as f64 * H;
        let members: Vec<_> = groups
            .iter()
            .filter(|((b, l, _), _)| b == bench && l == lambda)
            .collect();
        let all: Vec<&RunRecord> = members
            .iter()
            .flat_map(|(_, v)| v.iter().copied())
            .collect();
        let stat = Statistic::for_records(&all);
        let series: Vec<(&str, Vec<crate::metrics::MeanSe>)> = members
            .iter()
            .map(|((_, _, opt), v)| (opt.as_str(), band(v, stat)[row_at(v[0], 0)..].to_vec()))
            .collect();
        let t_max = series
            .iter()
            .map(|(_, b)| b.len())
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
            .max(1) as f64;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (_, b) in &series {
            for m in b {
                lo = lo.min(m.lower());
                hi = hi.max(m.upper());
            }
        }
        if !(hi > lo) {
            lo -= 0.5;
            hi += 0.5;
        }
        let pw = W - ML - MR;
        let ph = H - MT - MB;
        let px = |t: f64| ML + pw * t / t_max;
        let py = |v: f64| oy + MT + ph * (1.0 - (v - lo) / (hi - lo));

        let _ = writeln!(
            s,
            r##"<text x="{:.1}" y="{:.1}" text-anchor="middle">{bench} (λ = {lambda})</text>"##,
            ML + pw / 2.0,
            oy + 18.0
        );
        let _ = writeln!(
            s,
            r##"<rect x="{ML}" y="{:.1}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##,
            oy + MT
        );
        for k in 0..=4 {
            let v = lo + (hi - lo) * k as f64 / 4.0;
            let t = t_max * k as f64 / 4.0;
            let _ = writeln!(
                s,
                r##"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.3}</text>"##,
                ML - 6.0,
                py(v) + 4.0
            );
            let _ = writeln!(
                s,
                r##"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t:.0}</text>"##,
                px(t),
                oy + H - MB + 16.0
            );
        }
        let _ = writeln!(
            s,
            r##"<text x="{:.1}" y="{:.1}" text-anchor="middle">iteration</text>"##,
            ML + pw / 2.0,
            oy + H - 8.0
        );
        let _ = writeln!(
            s,
            r##"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"##,
            oy + MT + ph / 2.0,
            oy + MT + ph / 2.0,
            stat.name()
        );
        for (k, (opt, b)) in series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let mut poly = String::new();
            for (t, m) in b.iter().enumerate() {
                let _ = write!(poly, "{:.2},{:.2} ", px(t as f64), py(m.upper()));
            }
            for (t, m) in b.iter().enumerate().rev() {
                let _ = write!(poly, "{:.2},{:.2} ", px(t as f64), py(m.lower()));
            }
            let _ = writeln!(
                s,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                poly.trim_end()
            );
            let line: Vec<String> = b
                .iter()
                .enumerate()
                .map(|(t, m)| format!("{:.2},{:.2}", px(t as f64), py(m.mean)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                line.join(" ")
            );
            let ly = oy + MT + 14.0 + 18.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/>"#,
                W - MR + 12.0,
                W - MR + 32.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}">{opt}</text>"#,
                W - MR + 38.0,
                ly + 4.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(render_svg(records).as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| HarnessError::io(path, e))
}

/// Every artifact into `dir`; returns the paths written.
pub fn emit_outputs(
    dir: &Path,
    records: &[RunRecord],
    report_at: &[usize],
) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(HarnessError::Config("no records to write".into()));
    }
    let paths: Vec<PathBuf> = [RECORDS, CURVES, TIMINGS, SUMMARY, PLOT]
        .iter()
        .map(|f| dir.join(f))
        .collect();
    write_records(&paths[0], records)?;
    write_curves(&paths[1], records)?;
    write_timings(&paths[2], records)?;
    write_summary(&paths[3], &summarize(records, report_at))?;
    write_svg(&paths[4], records)?;
    Ok(paths)
}
