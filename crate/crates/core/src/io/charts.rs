//! Static SVG bar and line charts emitted as plain markup.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::allocation::Acuity;
use crate::error::Result;
use crate::forecast::TrainReport;
use crate::io::write_atomic;
use crate::simulation::SimulationMetrics;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn plot_w() -> f64 {
    WIDTH - MARGIN_L - MARGIN_R
}

fn plot_h() -> f64 {
    HEIGHT - MARGIN_T - MARGIN_B
}

/// A tidy upper bound for the y axis.
fn nice_max(v: f64) -> f64 {
    if v.is_nan() || v <= 0.0 {
        return 1.0;
    }
    let mag = 10f64.powf(v.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .into_iter()
        .find(|s| s * mag >= v)
        .unwrap_or(10.0);
    step * mag
}

fn header(out: &mut String, title: &str, x_label: &str, y_label: &str, y_max: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text class="title" x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (x0, y0) = (MARGIN_L, MARGIN_T + plot_h());
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{x0}" y1="{MARGIN_T}" x2="{x0}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#,
        MARGIN_L + plot_w()
    );
    for k in 0..=4 {
        let v = y_max * k as f64 / 4.0;
        let y = y0 - plot_h() * k as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text class="tick" x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            y + 4.0,
            trim(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text class="xlabel" x="{}" y="{}" text-anchor="middle">{}</text>"#,
        MARGIN_L + plot_w() / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text class="ylabel" x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        MARGIN_T + plot_h() / 2.0,
        MARGIN_T + plot_h() / 2.0,
        escape(y_label)
    );
}

fn trim(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// One bar per label. Returns `None` for empty data.
pub fn bar_chart(title: &str, x_label: &str, y_label: &str, labels: &[String], values: &[f64]) -> Option<String> {
    if labels.is_empty() || labels.len() != values.len() {
        return None;
    }
    let y_max = nice_max(values.iter().copied().fold(0.0, f64::max));
    let mut out = String::new();
    header(&mut out, title, x_label, y_label, y_max);
    let slot = plot_w() / labels.len() as f64;
    let bar_w = slot * 0.7;
    let base = MARGIN_T + plot_h();
    for (i, (label, &v)) in labels.iter().zip(values).enumerate() {
        let h = plot_h() * v.max(0.0) / y_max;
        let x = MARGIN_L + slot * i as f64 + (slot - bar_w) / 2.0;
        let _ = writeln!(
            out,
            r#"<rect class="bar" data-label="{}" data-value="{}" x="{x:.2}" y="{:.2}" width="{bar_w:.2}" height="{h:.2}" fill="{}"/>"#,
            escape(label),
            v,
            base - h,
            PALETTE[0]
        );
        let _ = writeln!(
            out,
            r#"<text class="label" x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            x + bar_w / 2.0,
            base + 16.0,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    Some(out)
}

/// One polyline per named series over a shared index axis. Returns `None`
/// when every series is empty.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[(&str, &[f64])]) -> Option<String> {
    let n = series.iter().map(|(_, s)| s.len()).max().unwrap_or(0);
    if n == 0 {
        return None;
    }
    let y_max = nice_max(series.iter().flat_map(|(_, s)| s.iter().copied()).fold(0.0, f64::max));
    let mut out = String::new();
    header(&mut out, title, x_label, y_label, y_max);
    let base = MARGIN_T + plot_h();
    let dx = if n > 1 { plot_w() / (n - 1) as f64 } else { 0.0 };
    for (k, (name, values)) in series.iter().enumerate() {
        if values.is_empty() {
            continue;
        }
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let y = base - plot_h() * (v.max(0.0) / y_max).min(1.0);
                format!("{:.2},{:.2}", MARGIN_L + dx * i as f64, y)
            })
            .collect();
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<polyline class="series" data-name="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            escape(name),
            points.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text class="legend" x="{}" y="{}" fill="{color}">{}</text>"#,
            MARGIN_L + 10.0,
            MARGIN_T + 14.0 + 16.0 * k as f64,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    Some(out)
}

pub const LOSS_CHART: &str = "loss.svg";
pub const RELOCATIONS_CHART: &str = "relocations.svg";
pub const DISTRIBUTION_CHART: &str = "distribution.svg";
pub const COST_CHART: &str = "cost.svg";
pub const ACUITY_CHART: &str = "acuity.svg";

/// Files written and warnings for charts skipped on empty data.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct ChartOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl ChartOutput {
    fn emit(&mut self, dir: &Path, name: &str, svg: Option<String>) -> Result<()> {
        match svg {
            Some(body) => {
                let path = dir.join(name);
                write_atomic(&path, body.as_bytes())?;
                self.files.push(path);
            }
            None => self.warnings.push(format!("{name}: no data, chart skipped")),
        }
        Ok(())
    }

    pub fn file_names(&self) -> Vec<String> {
        self.files
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect()
    }
}

pub fn render_loss_chart(report: &TrainReport, out_dir: &Path) -> Result<ChartOutput> {
    let mut out = ChartOutput::default();
    let svg = line_chart(
        "Model loss vs epochs",
        "epoch",
        "MSE (normalized)",
        &[("train", &report.train_loss), ("validation", &report.val_loss)],
    );
    out.emit(out_dir, LOSS_CHART, svg)?;
    Ok(out)
}

/// Relocations per hour, served per hospital, cumulative cost and acuity.
pub fn render_metric_charts(metrics: &SimulationMetrics, out_dir: &Path) -> Result<ChartOutput> {
    let mut out = ChartOutput::default();
    let hours: Vec<String> = (0..metrics.horizon_hours()).map(|h| h.to_string()).collect();
    let reloc: Vec<f64> = metrics.relocations_per_hour.iter().map(|&n| n as f64).collect();
    out.emit(
        out_dir,
        RELOCATIONS_CHART,
        bar_chart("Relocations per hour", "hour", "patients relocated", &hours, &reloc),
    )?;
    let served: Vec<f64> = metrics.served_per_hospital.iter().map(|&n| n as f64).collect();
    out.emit(
        out_dir,
        DISTRIBUTION_CHART,
        bar_chart(
            "Patients served per hospital",
            "hospital",
            "patients",
            &metrics.hospital_ids,
            &served,
        ),
    )?;
    out.emit(
        out_dir,
        COST_CHART,
        line_chart(
            "Cumulative transfer cost",
            "hour",
            "cost",
            &[("cumulative cost", &metrics.cumulative_cost_series)],
        ),
    )?;
    let levels: Vec<String> = Acuity::ALL.iter().map(|a| a.to_string()).collect();
    let counts: Vec<f64> = metrics.acuity_counts_relocated.iter().map(|&n| n as f64).collect();
    out.emit(
        out_dir,
        ACUITY_CHART,
        bar_chart("Relocated patients by acuity", "acuity", "patients", &levels, &counts),
    )?;
    Ok(out)
}
