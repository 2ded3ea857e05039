//! CSV and SVG emission.
//!
//! All numeric output uses fixed explicit formats, so a given experiment
//! result always serializes to identical bytes — determinism is checked
//! end to end (config + seed → file bytes), not just value-wise.
//!
//! The SVG writers are small hand-rolled renderers (line plot, step plot,
//! cell grid) with axes, tick labels, and a legend; enough to eyeball a
//! result without pulling in a plotting stack.

use std::fmt::Write as _;
use std::path::Path;

use kronrad::theory::DetectionCurve;

use crate::realistic::{HeatmapGrid, OipCdf, OipRun};
use crate::roc::RocCurve;
use crate::Result;

/// Writes `contents` to `dir/name`, creating the directory if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

// ───────────────────────────── CSV ─────────────────────────────

/// ROC sweep: `detector,gamma,pfa_theory,pfa_empirical,pd_theory,pd_empirical,ci_halfwidth`.
#[must_use]
pub fn roc_csv(curves: &[RocCurve]) -> String {
    let mut out = String::from(
        "detector,gamma,pfa_theory,pfa_empirical,pd_theory,pd_empirical,ci_halfwidth\n",
    );
    for c in curves {
        for p in &c.points {
            let _ = writeln!(
                out,
                "{},{:.6e},{:.6},{:.6},{:.6},{:.6},{:.6}",
                c.detector,
                p.gamma,
                p.pfa_theory,
                p.pfa_empirical,
                p.pd_theory,
                p.pd_empirical,
                p.ci_halfwidth
            );
        }
    }
    out
}

/// Analytical curves only: `detector,gamma,pfa,pd,lambda`.
#[must_use]
pub fn theory_csv(curves: &[DetectionCurve<f64>]) -> String {
    let mut out = String::from("detector,gamma,pfa,pd,lambda\n");
    for c in curves {
        for i in 0..c.gamma_grid.len() {
            let _ = writeln!(
                out,
                "{},{:.6e},{:.6},{:.6},{:.6e}",
                c.detector, c.gamma_grid[i], c.pfa[i], c.pd[i], c.lambda
            );
        }
    }
    out
}

/// Heatmap of one detector: a header row of angle-grid degrees, then one
/// row of dB values per range bin.
#[must_use]
pub fn heatmap_csv(grid: &HeatmapGrid) -> String {
    let mut out = String::from("range_bin");
    for a in &grid.angles_deg {
        let _ = write!(out, ",{a:.4}");
    }
    out.push('\n');
    for (l, row) in grid.rows.iter().enumerate() {
        let _ = write!(out, "{l}");
        for v in row {
            let _ = write!(out, ",{v:.4e}");
        }
        out.push('\n');
    }
    out
}

/// OIP samples: `detector,run,angle_deg,range_m,oip_db`.
#[must_use]
pub fn oip_csv(runs: &[OipRun]) -> String {
    let mut out = String::from("detector,run,angle_deg,range_m,oip_db\n");
    for r in runs {
        for (det, db) in &r.values {
            let _ = writeln!(
                out,
                "{det},{},{:.4},{:.4},{:.4}",
                r.run, r.angle_deg, r.range_m, db
            );
        }
    }
    out
}

/// OIP empirical CDFs: `detector,oip_db,cdf`.
#[must_use]
pub fn oip_cdf_csv(cdfs: &[OipCdf]) -> String {
    let mut out = String::from("detector,oip_db,cdf\n");
    for c in cdfs {
        for (v, p) in c.oip_db.iter().zip(&c.cdf) {
            let _ = writeln!(out, "{},{v:.4},{p:.6}", c.detector);
        }
    }
    out
}

// ───────────────────────────── SVG ─────────────────────────────

const PLOT_W: f64 = 720.0;
const PLOT_H: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

/// Fixed series palette (colorblind-safe Okabe–Ito subset).
const PALETTE: [&str; 6] = [
    "#0072b2", "#d55e00", "#009e73", "#cc79a7", "#e69f00", "#56b4e9",
];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        let span = (self.x1 - self.x0).max(f64::MIN_POSITIVE);
        MARGIN_L + (x - self.x0) / span * (PLOT_W - MARGIN_L - MARGIN_R)
    }
    fn sy(&self, y: f64) -> f64 {
        let span = (self.y1 - self.y0).max(f64::MIN_POSITIVE);
        PLOT_H - MARGIN_B - (y - self.y0) / span * (PLOT_H - MARGIN_T - MARGIN_B)
    }
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" \
         viewBox=\"0 0 {PLOT_W} {PLOT_H}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{title}</text>\n",
        (MARGIN_L + PLOT_W - MARGIN_R) / 2.0
    )
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (px0, px1) = (f.sx(f.x0), f.sx(f.x1));
    let (py0, py1) = (f.sy(f.y0), f.sy(f.y1));
    let _ = writeln!(
        out,
        "<rect x=\"{px0:.1}\" y=\"{py1:.1}\" width=\"{:.1}\" height=\"{:.1}\" \
         fill=\"none\" stroke=\"#333\"/>",
        px1 - px0,
        py0 - py1
    );
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let xv = f.x0 + t * (f.x1 - f.x0);
        let yv = f.y0 + t * (f.y1 - f.y0);
        let (gx, gy) = (f.sx(xv), f.sy(yv));
        let _ = writeln!(
            out,
            "<line x1=\"{gx:.1}\" y1=\"{py0:.1}\" x2=\"{gx:.1}\" y2=\"{py1:.1}\" \
             stroke=\"#ddd\"/>\n\
             <text x=\"{gx:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{xv:.3}</text>\n\
             <line x1=\"{px0:.1}\" y1=\"{gy:.1}\" x2=\"{px1:.1}\" y2=\"{gy:.1}\" \
             stroke=\"#ddd\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{yv:.3}</text>",
            py0 + 18.0,
            px0 - 6.0,
            gy + 4.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{xlabel}</text>\n\
         <text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.1})\">{ylabel}</text>",
        (px0 + px1) / 2.0,
        PLOT_H - 12.0,
        (py0 + py1) / 2.0,
        (py0 + py1) / 2.0
    );
}

fn legend(out: &mut String, entries: &[(String, &str)]) {
    let x = PLOT_W - MARGIN_R + 12.0;
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = MARGIN_T + 16.0 * i as f64 + 10.0;
        let _ = writeln!(
            out,
            "<line x1=\"{x:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" \
             stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\">{label}</text>",
            x + 22.0,
            x + 28.0,
            y + 4.0
        );
    }
}

fn polyline(out: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, dashed: bool) {
    let mut d = String::new();
    for &(x, y) in pts {
        let _ = write!(d, "{:.1},{:.1} ", f.sx(x), f.sy(y.clamp(f.y0, f.y1)));
    }
    let dash = if dashed { " stroke-dasharray=\"6 4\"" } else { "" };
    let _ = writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"{dash}/>",
        d.trim_end()
    );
}

/// ROC curves: empirical P_D vs P_FA (solid) with theory overlaid (dashed).
#[must_use]
pub fn roc_svg(curves: &[RocCurve]) -> String {
    let mut out = svg_open("Receiver operating characteristic");
    let f = Frame {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };
    axes(&mut out, &f, "false-alarm probability", "detection probability");
    let mut entries = Vec::new();
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let emp: Vec<_> = c
            .points
            .iter()
            .map(|p| (p.pfa_empirical, p.pd_empirical))
            .collect();
        let th: Vec<_> = c.points.iter().map(|p| (p.pfa_theory, p.pd_theory)).collect();
        polyline(&mut out, &f, &th, color, true);
        polyline(&mut out, &f, &emp, color, false);
        entries.push((c.detector.to_string(), color));
    }
    entries.push(("(dashed: theory)".to_owned(), "#333"));
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// Analytical ROC curves only.
#[must_use]
pub fn theory_svg(curves: &[DetectionCurve<f64>]) -> String {
    let mut out = svg_open("Theoretical receiver operating characteristic");
    let f = Frame {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };
    axes(&mut out, &f, "false-alarm probability", "detection probability");
    let mut entries = Vec::new();
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<_> = c.pfa.iter().zip(&c.pd).map(|(&x, &y)| (x, y)).collect();
        polyline(&mut out, &f, &pts, color, false);
        entries.push((c.detector.to_string(), color));
    }
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// OIP CDFs: one step curve per detector.
#[must_use]
pub fn oip_cdf_svg(cdfs: &[OipCdf]) -> String {
    let mut out = svg_open("Output interference power CDF");
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in cdfs {
        for &v in &c.oip_db {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    let f = Frame {
        x0: lo,
        x1: hi.max(lo + 1.0),
        y0: 0.0,
        y1: 1.0,
    };
    axes(&mut out, &f, "output interference power [dB]", "CDF");
    let mut entries = Vec::new();
    for (i, c) in cdfs.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<_> = c.oip_db.iter().zip(&c.cdf).map(|(&v, &p)| (v, p)).collect();
        polyline(&mut out, &f, &pts, color, false);
        entries.push((c.detector.clone(), color));
    }
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// Simple two-segment colormap from deep blue through teal to yellow.
fn colormap(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
    let (r, g, b) = if t < 0.5 {
        let u = t / 0.5;
        (lerp(13.0, 32.0, u), lerp(8.0, 144.0, u), lerp(135.0, 140.0, u))
    } else {
        let u = (t - 0.5) / 0.5;
        (lerp(32.0, 253.0, u), lerp(144.0, 231.0, u), lerp(140.0, 37.0, u))
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

/// Range-angle heatmap as a colored cell grid. Rows are averaged down to at
/// most 256 display rows; the CSV keeps full resolution.
#[must_use]
pub fn heatmap_svg(grid: &HeatmapGrid) -> String {
    let mut out = svg_open(&format!(
        "Detection statistic [dB] - {} (Doppler bin {})",
        grid.detector, grid.doppler_bin
    ));
    let n_rows = grid.rows.len();
    let n_cols = grid.angles_deg.len();
    let stride = n_rows.div_ceil(256);
    let display_rows = n_rows.div_ceil(stride);

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut cells = vec![vec![0.0f64; n_cols]; display_rows];
    for (ri, chunk) in grid.rows.chunks(stride).enumerate() {
        for ci in 0..n_cols {
            let mean = chunk.iter().map(|r| r[ci]).sum::<f64>() / chunk.len() as f64;
            cells[ri][ci] = mean;
            lo = lo.min(mean);
            hi = hi.max(mean);
        }
    }
    if !(hi > lo) {
        hi = lo + 1.0;
    }
    // Compress the color range to the top 60 dB so the noise floor does
    // not wash out the signal structure.
    let lo = lo.max(hi - 60.0);

    let x0 = MARGIN_L;
    let y0 = MARGIN_T + 10.0;
    let w = (PLOT_W - MARGIN_L - MARGIN_R) / n_cols as f64;
    let h = (PLOT_H - y0 - MARGIN_B) / display_rows as f64;
    for (ri, row) in cells.iter().enumerate() {
        for (ci, &v) in row.iter().enumerate() {
            let t = (v - lo) / (hi - lo);
            let _ = writeln!(
                out,
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                x0 + ci as f64 * w,
                y0 + ri as f64 * h,
                w + 0.05,
                h + 0.05,
                colormap(t)
            );
        }
    }
    // Angle ticks (bottom) and range-bin ticks (left).
    for ci in (0..n_cols).step_by(n_cols.div_ceil(8).max(1)) {
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{:.1}</text>",
            x0 + (ci as f64 + 0.5) * w,
            PLOT_H - MARGIN_B + 16.0,
            grid.angles_deg[ci]
        );
    }
    for ri in (0..display_rows).step_by(display_rows.div_ceil(8).max(1)) {
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>",
            x0 - 6.0,
            y0 + (ri as f64 + 0.5) * h + 4.0,
            ri * stride
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">angle [deg]</text>\n\
         <text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.1})\">range bin</text>",
        x0 + (PLOT_W - MARGIN_L - MARGIN_R) / 2.0,
        PLOT_H - 12.0,
        y0 + (PLOT_H - y0 - MARGIN_B) / 2.0,
        y0 + (PLOT_H - y0 - MARGIN_B) / 2.0
    );
    // Color scale.
    let bar_x = PLOT_W - MARGIN_R + 24.0;
    for i in 0..40 {
        let t = 1.0 - i as f64 / 39.0;
        let _ = writeln!(
            out,
            "<rect x=\"{bar_x:.1}\" y=\"{:.1}\" width=\"16\" height=\"6.2\" fill=\"{}\"/>",
            y0 + i as f64 * 6.0,
            colormap(t)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\">{hi:.0}</text>\n\
         <text x=\"{:.1}\" y=\"{:.1}\">{lo:.0}</text>",
        bar_x + 20.0,
        y0 + 8.0,
        bar_x + 20.0,
        y0 + 40.0 * 6.0
    );
    out.push_str("</svg>\n");
    out
}
